//! The axiom auditor: executable checks for every law an algebra can be
//! asked to satisfy, with replayable counterexamples.
//!
//! Finite axioms are checked exhaustively when the instance space fits the
//! budget (verdict `Pass`); otherwise instances are drawn deterministically
//! from a seeded generator (verdict `Exhausted` when nothing failed). A
//! `Fail` always carries a witness whose replay reproduces the discrepancy.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, EvalError, Sort};
use crate::ordinal::Ordinal;
use crate::word::{render, ScatteredTerm};

/// Identifier of an audited law.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AxiomId {
    /// Singleton products are the element itself.
    U,
    /// Ternary regrouping: defined triple products admit both bracketings.
    Assoc3,
    /// `(xy)^ω = x(yx)^ω` and `(x^n)^ω = x^ω`.
    Wilke,
    /// Regrouping along order-preserving surjections preserves products.
    NPart,
    /// Defined products define all convex subproducts.
    Convex,
    /// Evaluation is invariant under order isomorphism (normal forms).
    Iso,
    /// Products are invariant under arbitrary bijections of positions.
    C,
    /// The named element is a complete identity.
    Id(String),
    /// Grouped definedness forces direct definedness.
    Narr,
    /// Any two defined regroupings of the same sequence agree.
    Eq,
    /// The (N) instances whose quotient index has a maximum.
    NMax,
    /// The (N) instances whose quotient index has no maximum.
    NLim,
    /// The two-sorted ω-semigroup typing discipline.
    OmegaPP,
}

impl AxiomId {
    pub fn parse(s: &str) -> Option<AxiomId> {
        Some(match s {
            "U" => AxiomId::U,
            "ASSOC3" | "N_FIN" => AxiomId::Assoc3,
            "WILKE" => AxiomId::Wilke,
            "N_PART" => AxiomId::NPart,
            "CONVEX" => AxiomId::Convex,
            "ISO" => AxiomId::Iso,
            "C" => AxiomId::C,
            "NARR" => AxiomId::Narr,
            "EQ" => AxiomId::Eq,
            "NMAX" => AxiomId::NMax,
            "NLIM" => AxiomId::NLim,
            "OMEGAPP" => AxiomId::OmegaPP,
            _ => {
                let inner = s.strip_prefix("ID(")?.strip_suffix(')')?;
                AxiomId::Id(inner.to_owned())
            }
        })
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomId::U => write!(f, "U"),
            AxiomId::Assoc3 => write!(f, "ASSOC3"),
            AxiomId::Wilke => write!(f, "WILKE"),
            AxiomId::NPart => write!(f, "N_PART"),
            AxiomId::Convex => write!(f, "CONVEX"),
            AxiomId::Iso => write!(f, "ISO"),
            AxiomId::C => write!(f, "C"),
            AxiomId::Id(e) => write!(f, "ID({})", e),
            AxiomId::Narr => write!(f, "NARR"),
            AxiomId::Eq => write!(f, "EQ"),
            AxiomId::NMax => write!(f, "NMAX"),
            AxiomId::NLim => write!(f, "NLIM"),
            AxiomId::OmegaPP => write!(f, "OMEGAPP"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// Exhaustively verified.
    Pass,
    /// A violation was found; the report carries a witness.
    Fail,
    /// The randomized budget ran out without finding a violation.
    Exhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "Pass"),
            Verdict::Fail => write!(f, "Fail"),
            Verdict::Exhausted => write!(f, "Exhausted"),
        }
    }
}

/// One convex regrouping of a word: `outer` is a word whose letters are
/// decimal indices into `inners`; substituting the inners back yields the
/// original word.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupedWord {
    pub inners: Vec<ScatteredTerm>,
    pub outer: ScatteredTerm,
}

impl GroupedWord {
    /// The word the grouping presents, with groups substituted back in.
    pub fn flatten(&self) -> ScatteredTerm {
        fn subst(t: &ScatteredTerm, inners: &[ScatteredTerm]) -> ScatteredTerm {
            match t {
                ScatteredTerm::Empty => ScatteredTerm::Empty,
                ScatteredTerm::Letter(l) => {
                    let i: usize = l.parse().expect("group index");
                    inners[i].clone()
                }
                ScatteredTerm::Concat(cs) => {
                    ScatteredTerm::concat(cs.iter().map(|c| subst(c, inners)).collect())
                }
                ScatteredTerm::Power(b, e) => {
                    ScatteredTerm::power(subst(b, inners), e.clone())
                }
                ScatteredTerm::StarPower(b) => ScatteredTerm::star(subst(b, inners)),
            }
        }
        subst(&self.outer, &self.inners)
    }
}

/// An evaluation route a witness records.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordExpr {
    /// Direct evaluation of a word.
    Plain(ScatteredTerm),
    /// Inner products first, then the outer product of their values.
    Grouped(GroupedWord),
    /// A literal element (used for expected values).
    Value(String),
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Plain(t) => write!(f, "{}", render(t)),
            WordExpr::Grouped(g) => {
                write!(f, "{} with groups [", render(&g.outer))?;
                for (i, inner) in g.inners.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", render(inner))?;
                }
                write!(f, "]")
            }
            WordExpr::Value(v) => write!(f, "element {}", v),
        }
    }
}

/// What the two routes of a witness were required to satisfy.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    /// Definedness and value must agree.
    Agree,
    /// Values must agree when both routes are defined.
    AgreeWhenBothDefined,
    /// A defined lhs forces a defined rhs.
    DefinednessFlows,
    /// The two results must differ.
    Differ,
    /// lhs must be defined and fall in the set the rhs value lists
    /// (comma-separated; the empty list demands undefinedness).
    MemberOf,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Agree => "agree",
            Relation::AgreeWhenBothDefined => "agree-when-defined",
            Relation::DefinednessFlows => "definedness-flows",
            Relation::Differ => "differ",
            Relation::MemberOf => "member-of",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        Some(match s {
            "agree" => Relation::Agree,
            "agree-when-defined" => Relation::AgreeWhenBothDefined,
            "definedness-flows" => Relation::DefinednessFlows,
            "differ" => Relation::Differ,
            "member-of" => Relation::MemberOf,
            _ => return None,
        })
    }

    /// Whether the recorded outcomes violate the required relation.
    pub fn violated(&self, lhs: &Option<String>, rhs: &Option<String>) -> bool {
        match self {
            Relation::Agree => lhs != rhs,
            Relation::AgreeWhenBothDefined => {
                matches!((lhs, rhs), (Some(a), Some(b)) if a != b)
            }
            Relation::DefinednessFlows => lhs.is_some() && rhs.is_none(),
            Relation::Differ => lhs.is_some() && lhs == rhs,
            Relation::MemberOf => {
                let set: Vec<&str> = match rhs.as_deref() {
                    Some("") | None => Vec::new(),
                    Some(s) => s.split(',').collect(),
                };
                match lhs {
                    None => !set.is_empty(),
                    Some(v) => !set.iter().any(|x| x == v),
                }
            }
        }
    }
}

/// A replayable counterexample: two evaluation routes, their recorded
/// outcomes (`None` = undefined), and the relation they were meant to
/// satisfy.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub lhs: WordExpr,
    pub rhs: WordExpr,
    pub lhs_out: Option<String>,
    pub rhs_out: Option<String>,
    pub relation: Relation,
    pub note: Option<String>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |o: &Option<String>| match o {
            Some(v) => v.clone(),
            None => "undefined".to_owned(),
        };
        write!(
            f,
            "{} -> {}  vs  {} -> {}  (must {})",
            self.lhs,
            show(&self.lhs_out),
            self.rhs,
            show(&self.rhs_out),
            self.relation.as_str()
        )?;
        if let Some(n) = &self.note {
            write!(f, "  [{}]", n)?;
        }
        Ok(())
    }
}

/// Outcome of an axiom audit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub tested: u64,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl CheckReport {
    fn pass(axiom: AxiomId, tested: u64) -> Self {
        CheckReport {
            axiom,
            verdict: Verdict::Pass,
            tested,
            witness: None,
            note: None,
        }
    }

    fn exhausted(axiom: AxiomId, tested: u64) -> Self {
        CheckReport {
            axiom,
            verdict: Verdict::Exhausted,
            tested,
            witness: None,
            note: None,
        }
    }

    fn fail(axiom: AxiomId, tested: u64, witness: Witness) -> Self {
        CheckReport {
            axiom,
            verdict: Verdict::Fail,
            tested,
            witness: Some(witness),
            note: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} tested={}", self.axiom, self.verdict, self.tested)?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {}", w)?;
        }
        if let Some(n) = &self.note {
            write!(f, " note: {}", n)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditError {
    UnsupportedAxiom { axiom: String, reason: String },
    BadBudget,
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::UnsupportedAxiom { axiom, reason } => {
                write!(f, "axiom {} unsupported here: {}", axiom, reason)
            }
            AuditError::BadBudget => write!(f, "budget must be at least 1"),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation helpers

/// Defined value, undefined, or an instance we cannot judge (exponent too
/// large, star power unsupported).
fn outcome_of(alg: &dyn Algebra, t: &ScatteredTerm) -> Result<Option<String>, EvalError> {
    match alg.eval(t) {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_undefined() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates a grouping: all inner products, then the outer product over
/// their values. Undefined as soon as any stage is undefined.
pub fn eval_grouped(alg: &dyn Algebra, g: &GroupedWord) -> Result<Option<String>, EvalError> {
    let mut vals: Vec<String> = Vec::with_capacity(g.inners.len());
    for inner in &g.inners {
        match outcome_of(alg, inner)? {
            Some(v) => vals.push(v),
            None => return Ok(None),
        }
    }
    let outer = g
        .outer
        .map_letters(&|l| l.parse::<usize>().ok().and_then(|i| vals.get(i).cloned()))
        .map_err(|bad| EvalError::Unsupported {
            what: format!("bad group index '{}'", bad),
        })?;
    outcome_of(alg, &outer)
}

pub fn eval_expr(alg: &dyn Algebra, e: &WordExpr) -> Result<Option<String>, EvalError> {
    match e {
        WordExpr::Plain(t) => outcome_of(alg, t),
        WordExpr::Grouped(g) => eval_grouped(alg, g),
        WordExpr::Value(v) => Ok(Some(v.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    OutcomeChanged {
        side: &'static str,
        recorded: Option<String>,
        got: Option<String>,
    },
    ViolationGone,
    Unevaluable(EvalError),
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::OutcomeChanged { side, recorded, got } => {
                let s = |o: &Option<String>| o.clone().unwrap_or_else(|| "undefined".into());
                write!(
                    f,
                    "{} outcome changed: recorded {}, got {}",
                    side,
                    s(recorded),
                    s(got)
                )
            }
            ReplayError::ViolationGone => write!(f, "recorded outcomes no longer violate the relation"),
            ReplayError::Unevaluable(e) => write!(f, "cannot re-evaluate witness: {}", e),
        }
    }
}

/// Re-evaluates both routes of a witness and confirms the recorded
/// discrepancy bit for bit.
pub fn replay_witness(alg: &dyn Algebra, w: &Witness) -> Result<(), ReplayError> {
    let lhs = eval_expr(alg, &w.lhs).map_err(ReplayError::Unevaluable)?;
    if lhs != w.lhs_out {
        return Err(ReplayError::OutcomeChanged {
            side: "lhs",
            recorded: w.lhs_out.clone(),
            got: lhs,
        });
    }
    let rhs = eval_expr(alg, &w.rhs).map_err(ReplayError::Unevaluable)?;
    if rhs != w.rhs_out {
        return Err(ReplayError::OutcomeChanged {
            side: "rhs",
            recorded: w.rhs_out.clone(),
            got: rhs,
        });
    }
    if !w.relation.violated(&w.lhs_out, &w.rhs_out) {
        return Err(ReplayError::ViolationGone);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Deterministic generators

/// Exponents the word generator draws from: small finite powers and the
/// small limit ordinals.
fn exponent_pool() -> Vec<Ordinal> {
    vec![
        Ordinal::from(2),
        Ordinal::from(3),
        Ordinal::from(4),
        Ordinal::omega(),
        "w*2".parse().unwrap(),
        "w^2".parse().unwrap(),
    ]
}

pub struct WordGen {
    alphabet: Vec<String>,
    exponents: Vec<Ordinal>,
    allow_star: bool,
}

impl WordGen {
    pub fn new(alphabet: Vec<String>, allow_star: bool) -> Self {
        WordGen {
            alphabet,
            exponents: exponent_pool(),
            allow_star,
        }
    }

    pub fn for_algebra(alg: &dyn Algebra) -> Self {
        WordGen::new(alg.alphabet(), alg.supports_scattered())
    }

    fn letter(&self, rng: &mut ChaCha8Rng) -> ScatteredTerm {
        let i = rng.gen_range(0..self.alphabet.len());
        ScatteredTerm::letter(self.alphabet[i].clone())
    }

    pub fn gen(&self, rng: &mut ChaCha8Rng, depth: u32) -> ScatteredTerm {
        if depth == 0 || rng.gen_range(0..100) < 30 {
            return self.letter(rng);
        }
        match rng.gen_range(0..100) {
            0..=44 => {
                let k = rng.gen_range(2..=3);
                ScatteredTerm::concat((0..k).map(|_| self.gen(rng, depth - 1)).collect())
            }
            45..=84 => {
                let e = self.exponents[rng.gen_range(0..self.exponents.len())].clone();
                ScatteredTerm::power(self.gen(rng, depth - 1), e)
            }
            _ => {
                if self.allow_star {
                    ScatteredTerm::star(self.gen(rng, depth - 1))
                } else {
                    let e = self.exponents[rng.gen_range(0..self.exponents.len())].clone();
                    ScatteredTerm::power(self.gen(rng, depth - 1), e)
                }
            }
        }
    }
}

fn idx_letter(i: usize) -> ScatteredTerm {
    ScatteredTerm::letter(i.to_string())
}

/// Splits a CNF exponent into two nonzero parts summing to it.
fn split_exponent(e: &Ordinal) -> Option<(Ordinal, Ordinal)> {
    let terms = e.terms();
    if terms.len() >= 2 {
        let head = Ordinal::monomial(terms[0].0.clone(), terms[0].1.clone());
        let rest = head.left_sub(e)?;
        Some((head, rest))
    } else if terms.len() == 1 && terms[0].1 > 1u32.into() {
        let head = Ordinal::monomial(terms[0].0.clone(), 1u32.into());
        let rest = head.left_sub(e)?;
        Some((head, rest))
    } else {
        None
    }
}

/// Draws one convex regrouping of `w` from the documented family:
/// prefix/suffix splits, constant-size block groupings of limit powers,
/// CNF-run regroupings, and groupings pushed inside a factor or a power
/// base.
pub fn random_regroup(w: &ScatteredTerm, rng: &mut ChaCha8Rng) -> Option<GroupedWord> {
    match w {
        ScatteredTerm::Empty | ScatteredTerm::Letter(_) => None,
        ScatteredTerm::Concat(cs) => {
            let choice = rng.gen_range(0..3);
            if choice < 2 {
                // consecutive block partition of the children
                let mut groups: Vec<Vec<ScatteredTerm>> = vec![vec![cs[0].clone()]];
                for c in &cs[1..] {
                    if rng.gen_bool(0.5) {
                        groups.push(vec![c.clone()]);
                    } else {
                        groups.last_mut().unwrap().push(c.clone());
                    }
                }
                if groups.len() < 2 {
                    // force a split so the regrouping is proper
                    let cut = rng.gen_range(1..cs.len());
                    groups = vec![cs[..cut].to_vec(), cs[cut..].to_vec()];
                }
                let inners: Vec<ScatteredTerm> = groups
                    .into_iter()
                    .map(ScatteredTerm::concat)
                    .collect();
                let outer =
                    ScatteredTerm::concat((0..inners.len()).map(idx_letter).collect());
                Some(GroupedWord { inners, outer })
            } else {
                // regroup inside one child, other children become singleton groups
                let i = rng.gen_range(0..cs.len());
                let g = random_regroup(&cs[i], rng)?;
                let mut inners = Vec::new();
                let mut outer_parts = Vec::new();
                for (j, c) in cs.iter().enumerate() {
                    if j == i {
                        let shift = inners.len();
                        let shifted = g
                            .outer
                            .map_letters(&|l| {
                                l.parse::<usize>().ok().map(|k| (k + shift).to_string())
                            })
                            .expect("group indices");
                        outer_parts.push(shifted);
                        inners.extend(g.inners.iter().cloned());
                    } else {
                        outer_parts.push(idx_letter(inners.len()));
                        inners.push(c.clone());
                    }
                }
                Some(GroupedWord {
                    inners,
                    outer: ScatteredTerm::concat(outer_parts),
                })
            }
        }
        ScatteredTerm::Power(b, e) => {
            if let Some(n) = e.as_u64() {
                match rng.gen_range(0..2) {
                    0 => {
                        let i = rng.gen_range(1..n);
                        let inners = vec![
                            ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(i)),
                            ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(n - i)),
                        ];
                        Some(GroupedWord {
                            inners,
                            outer: ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                        })
                    }
                    _ => {
                        // regroup each copy of the base the same way
                        let g = random_regroup(b, rng)?;
                        Some(GroupedWord {
                            inners: g.inners,
                            outer: ScatteredTerm::power(g.outer, e.clone()),
                        })
                    }
                }
            } else {
                match rng.gen_range(0..5) {
                    0 if e.is_limit() => {
                        // peel finitely many copies off the front
                        let j = rng.gen_range(1..=2);
                        let inners = vec![
                            ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(j)),
                            w.clone(),
                        ];
                        Some(GroupedWord {
                            inners,
                            outer: ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                        })
                    }
                    1 if e.is_limit() => {
                        // constant-size blocks: k·e = e for limit e
                        let k = rng.gen_range(2..=3);
                        let inners =
                            vec![ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(k))];
                        Some(GroupedWord {
                            inners,
                            outer: ScatteredTerm::power(idx_letter(0), e.clone()),
                        })
                    }
                    2 => {
                        // split along the CNF of the exponent
                        let (e1, e2) = split_exponent(e)?;
                        let inners = vec![
                            ScatteredTerm::power(b.as_ref().clone(), e1),
                            ScatteredTerm::power(b.as_ref().clone(), e2),
                        ];
                        Some(GroupedWord {
                            inners,
                            outer: ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                        })
                    }
                    3 => {
                        // group into ω-blocks when the exponent is ω·(rest)
                        let omega = Ordinal::omega();
                        let (q, r) = e.divmod(&omega);
                        if r.is_zero() && !q.is_zero() && q != Ordinal::one() {
                            let inners = vec![ScatteredTerm::power(
                                b.as_ref().clone(),
                                omega,
                            )];
                            Some(GroupedWord {
                                inners,
                                outer: ScatteredTerm::power(idx_letter(0), q),
                            })
                        } else {
                            None
                        }
                    }
                    _ => {
                        let g = random_regroup(b, rng)?;
                        Some(GroupedWord {
                            inners: g.inners,
                            outer: ScatteredTerm::power(g.outer, e.clone()),
                        })
                    }
                }
            }
        }
        ScatteredTerm::StarPower(b) => match rng.gen_range(0..3) {
            0 => {
                // lower ω* part plus the last j copies
                let j = rng.gen_range(1..=2);
                let inners = vec![
                    w.clone(),
                    ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(j)),
                ];
                Some(GroupedWord {
                    inners,
                    outer: ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                })
            }
            1 => {
                let k = rng.gen_range(2..=3);
                let inners = vec![ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(k))];
                Some(GroupedWord {
                    inners,
                    outer: ScatteredTerm::star(idx_letter(0)),
                })
            }
            _ => {
                let g = random_regroup(b, rng)?;
                Some(GroupedWord {
                    inners: g.inners,
                    outer: ScatteredTerm::star(g.outer),
                })
            }
        },
    }
}

/// Whether the quotient index of a grouping has a maximum.
fn outer_has_max(g: &GroupedWord) -> bool {
    g.outer.last_letter().is_some()
}

// ---------------------------------------------------------------------------
// The checker

pub fn check_axiom(
    alg: &dyn Algebra,
    axiom: &AxiomId,
    budget: u64,
    seed: u64,
) -> Result<CheckReport, AuditError> {
    if budget == 0 {
        return Err(AuditError::BadBudget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ axiom_tag(axiom));
    match axiom {
        AxiomId::U => check_u(alg, budget),
        AxiomId::Assoc3 => check_assoc3(alg, budget, &mut rng),
        AxiomId::Wilke => check_wilke(alg, budget, &mut rng),
        AxiomId::NPart => check_n(alg, budget, &mut rng, AxiomId::NPart, MaxFilter::All),
        AxiomId::NMax => check_n(alg, budget, &mut rng, AxiomId::NMax, MaxFilter::WithMax),
        AxiomId::NLim => check_n(alg, budget, &mut rng, AxiomId::NLim, MaxFilter::WithoutMax),
        AxiomId::Convex => check_convex(alg, budget, &mut rng),
        AxiomId::Iso => check_iso(alg, budget, &mut rng),
        AxiomId::C => check_c(alg, budget, &mut rng),
        AxiomId::Id(e) => check_id(alg, e, budget, &mut rng),
        AxiomId::Narr => check_narr(alg, budget, &mut rng),
        AxiomId::Eq => check_eq(alg, budget, &mut rng),
        AxiomId::OmegaPP => check_omegapp(alg, budget, &mut rng),
    }
}

fn axiom_tag(a: &AxiomId) -> u64 {
    match a {
        AxiomId::U => 0x55,
        AxiomId::Assoc3 => 0xA3,
        AxiomId::Wilke => 0x317B,
        AxiomId::NPart => 0x42,
        AxiomId::Convex => 0xC0,
        AxiomId::Iso => 0x150,
        AxiomId::C => 0xCC,
        AxiomId::Id(_) => 0x1D,
        AxiomId::Narr => 0x4A,
        AxiomId::Eq => 0xE9,
        AxiomId::NMax => 0x4AA,
        AxiomId::NLim => 0x4AB,
        AxiomId::OmegaPP => 0x3AA,
    }
}

fn check_u(alg: &dyn Algebra, _budget: u64) -> Result<CheckReport, AuditError> {
    let elems = alg.carrier().unwrap_or_else(|| alg.alphabet());
    let mut tested = 0;
    for x in &elems {
        tested += 1;
        let word = ScatteredTerm::letter(x.clone());
        let out = outcome_of(alg, &word).map_err(eval_unsupported)?;
        if out.as_deref() != Some(x.as_str()) {
            let witness = Witness {
                lhs: WordExpr::Plain(word),
                rhs: WordExpr::Value(x.clone()),
                lhs_out: out,
                rhs_out: Some(x.clone()),
                relation: Relation::Agree,
                note: Some("singleton product must be the element".into()),
            };
            return Ok(CheckReport::fail(AxiomId::U, tested, witness));
        }
    }
    Ok(CheckReport::pass(AxiomId::U, tested))
}

fn eval_unsupported(e: EvalError) -> AuditError {
    AuditError::UnsupportedAxiom {
        axiom: "eval".into(),
        reason: format!("{}", e),
    }
}

fn check_assoc3(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let carrier = alg.carrier();
    let exhaustive = carrier
        .as_ref()
        .map(|c| (c.len() as u64).pow(3) <= budget)
        .unwrap_or(false);
    let mut tested = 0;
    let run = |a: &str, b: &str, c: &str, tested: &mut u64| -> Option<Witness> {
        *tested += 1;
        let w = ScatteredTerm::concat(vec![
            ScatteredTerm::letter(a),
            ScatteredTerm::letter(b),
            ScatteredTerm::letter(c),
        ]);
        let direct = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => return None,
        };
        if direct.is_none() {
            return None;
        }
        for split in 1..=2usize {
            let (inners, outer) = if split == 1 {
                (
                    vec![
                        ScatteredTerm::concat(vec![
                            ScatteredTerm::letter(a),
                            ScatteredTerm::letter(b),
                        ]),
                        ScatteredTerm::letter(c),
                    ],
                    ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                )
            } else {
                (
                    vec![
                        ScatteredTerm::letter(a),
                        ScatteredTerm::concat(vec![
                            ScatteredTerm::letter(b),
                            ScatteredTerm::letter(c),
                        ]),
                    ],
                    ScatteredTerm::concat(vec![idx_letter(0), idx_letter(1)]),
                )
            };
            let g = GroupedWord { inners, outer };
            let grouped = match eval_grouped(alg, &g) {
                Ok(v) => v,
                Err(_) => return None,
            };
            if grouped != direct {
                return Some(Witness {
                    lhs: WordExpr::Plain(w.clone()),
                    rhs: WordExpr::Grouped(g),
                    lhs_out: direct.clone(),
                    rhs_out: grouped,
                    relation: Relation::Agree,
                    note: None,
                });
            }
        }
        None
    };
    if exhaustive {
        let c = carrier.unwrap();
        for a in &c {
            for b in &c {
                for x in &c {
                    if let Some(w) = run(a, b, x, &mut tested) {
                        return Ok(CheckReport::fail(AxiomId::Assoc3, tested, w));
                    }
                }
            }
        }
        Ok(CheckReport::pass(AxiomId::Assoc3, tested))
    } else {
        let alpha = alg.alphabet();
        for _ in 0..budget {
            let a = &alpha[rng.gen_range(0..alpha.len())];
            let b = &alpha[rng.gen_range(0..alpha.len())];
            let c = &alpha[rng.gen_range(0..alpha.len())];
            if let Some(w) = run(a, b, c, &mut tested) {
                return Ok(CheckReport::fail(AxiomId::Assoc3, tested, w));
            }
        }
        Ok(CheckReport::exhausted(AxiomId::Assoc3, tested))
    }
}

fn check_wilke(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    if !alg.has_omega_power() {
        return Err(AuditError::UnsupportedAxiom {
            axiom: "WILKE".into(),
            reason: "no omega table".into(),
        });
    }
    let carrier = alg.carrier();
    let exhaustive = carrier
        .as_ref()
        .map(|c| (c.len() as u64) * (c.len() as u64 + 3) <= budget)
        .unwrap_or(false);
    let elems: Vec<String> = if exhaustive {
        carrier.unwrap()
    } else {
        let alpha = alg.alphabet();
        (0..(budget / 8).clamp(1, 64))
            .map(|_| alpha[rng.gen_range(0..alpha.len())].clone())
            .collect()
    };
    let mut pairs = Vec::new();
    for a in &elems {
        for b in &elems {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let mut tested = 0;
    for (x, y) in &pairs {
        tested += 1;
        // (xy)^ω versus x(yx)^ω: the same word, regrouped
        let lhs = ScatteredTerm::power(
            ScatteredTerm::concat(vec![
                ScatteredTerm::letter(x.clone()),
                ScatteredTerm::letter(y.clone()),
            ]),
            Ordinal::omega(),
        );
        let rhs = ScatteredTerm::concat(vec![
            ScatteredTerm::letter(x.clone()),
            ScatteredTerm::power(
                ScatteredTerm::concat(vec![
                    ScatteredTerm::letter(y.clone()),
                    ScatteredTerm::letter(x.clone()),
                ]),
                Ordinal::omega(),
            ),
        ]);
        let lo = outcome_of(alg, &lhs).map_err(eval_unsupported)?;
        let ro = outcome_of(alg, &rhs).map_err(eval_unsupported)?;
        if lo != ro {
            let witness = Witness {
                lhs: WordExpr::Plain(lhs),
                rhs: WordExpr::Plain(rhs),
                lhs_out: lo,
                rhs_out: ro,
                relation: Relation::Agree,
                note: Some("(xy)^w = x(yx)^w".into()),
            };
            return Ok(CheckReport::fail(AxiomId::Wilke, tested, witness));
        }
    }
    for x in &elems {
        for n in 2..=4u64 {
            tested += 1;
            let lhs = ScatteredTerm::power(
                ScatteredTerm::power(ScatteredTerm::letter(x.clone()), Ordinal::from(n)),
                Ordinal::omega(),
            );
            let rhs = ScatteredTerm::power(ScatteredTerm::letter(x.clone()), Ordinal::omega());
            let lo = outcome_of(alg, &lhs).map_err(eval_unsupported)?;
            let ro = outcome_of(alg, &rhs).map_err(eval_unsupported)?;
            if lo != ro {
                let witness = Witness {
                    lhs: WordExpr::Plain(lhs),
                    rhs: WordExpr::Plain(rhs),
                    lhs_out: lo,
                    rhs_out: ro,
                    relation: Relation::Agree,
                    note: Some("(x^n)^w = x^w".into()),
                };
                return Ok(CheckReport::fail(AxiomId::Wilke, tested, witness));
            }
        }
    }
    if exhaustive {
        Ok(CheckReport::pass(AxiomId::Wilke, tested))
    } else {
        Ok(CheckReport::exhausted(AxiomId::Wilke, tested))
    }
}

enum MaxFilter {
    All,
    WithMax,
    WithoutMax,
}

fn check_n(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
    axiom: AxiomId,
    filter: MaxFilter,
) -> Result<CheckReport, AuditError> {
    let gen = WordGen::for_algebra(alg);
    let mut tested = 0;
    for _ in 0..budget {
        let w = gen.gen(rng, 3);
        let g = match random_regroup(&w, rng) {
            Some(g) => g,
            None => continue,
        };
        match filter {
            MaxFilter::All => {}
            MaxFilter::WithMax => {
                if !outer_has_max(&g) {
                    continue;
                }
            }
            MaxFilter::WithoutMax => {
                if outer_has_max(&g) {
                    continue;
                }
            }
        }
        tested += 1;
        let direct = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if direct.is_none() {
            continue;
        }
        let grouped = match eval_grouped(alg, &g) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if grouped != direct {
            let witness = Witness {
                lhs: WordExpr::Plain(w),
                rhs: WordExpr::Grouped(g),
                lhs_out: direct,
                rhs_out: grouped,
                relation: Relation::Agree,
                note: None,
            };
            return Ok(CheckReport::fail(axiom, tested, witness));
        }
    }
    Ok(CheckReport::exhausted(axiom, tested))
}

fn check_convex(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let gen = WordGen::for_algebra(alg);
    let mut tested = 0;
    for _ in 0..budget {
        let w = gen.gen(rng, 3);
        let direct = match outcome_of(alg, &w) {
            Ok(Some(v)) => Some(v),
            _ => continue,
        };
        // the inners of any regrouping are convex subwords
        let g = match random_regroup(&w, rng) {
            Some(g) => g,
            None => continue,
        };
        tested += 1;
        for inner in &g.inners {
            let sub = match outcome_of(alg, inner) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if sub.is_none() {
                let witness = Witness {
                    lhs: WordExpr::Plain(w.clone()),
                    rhs: WordExpr::Plain(inner.clone()),
                    lhs_out: direct.clone(),
                    rhs_out: None,
                    relation: Relation::DefinednessFlows,
                    note: Some("convex subproduct of a defined product".into()),
                };
                return Ok(CheckReport::fail(AxiomId::Convex, tested, witness));
            }
        }
    }
    Ok(CheckReport::exhausted(AxiomId::Convex, tested))
}

fn check_iso(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let gen = WordGen::for_algebra(alg);
    let mut tested = 0;
    for _ in 0..budget {
        let w = gen.gen(rng, 3);
        let n = w.normalize();
        if n == w {
            continue;
        }
        tested += 1;
        let a = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = match outcome_of(alg, &n) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if a != b {
            let witness = Witness {
                lhs: WordExpr::Plain(w),
                rhs: WordExpr::Plain(n),
                lhs_out: a,
                rhs_out: b,
                relation: Relation::Agree,
                note: Some("order-isomorphic presentations".into()),
            };
            return Ok(CheckReport::fail(AxiomId::Iso, tested, witness));
        }
    }
    Ok(CheckReport::exhausted(AxiomId::Iso, tested))
}

fn check_c(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let alpha = alg.alphabet();
    let mut tested = 0;
    for _ in 0..budget {
        tested += 1;
        let kind = rng.gen_range(0..3);
        let (lhs, rhs, note) = match kind {
            0 => {
                // finite word versus a random permutation of it
                let k = rng.gen_range(2..=5usize);
                let letters: Vec<String> = (0..k)
                    .map(|_| alpha[rng.gen_range(0..alpha.len())].clone())
                    .collect();
                let mut perm = letters.clone();
                for i in (1..perm.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    perm.swap(i, j);
                }
                (
                    ScatteredTerm::concat(letters.into_iter().map(ScatteredTerm::letter).collect()),
                    ScatteredTerm::concat(perm.into_iter().map(ScatteredTerm::letter).collect()),
                    "finite permutation",
                )
            }
            1 => {
                // (xy)^ω versus (yx)^ω: same letters with ω multiplicity
                let x = alpha[rng.gen_range(0..alpha.len())].clone();
                let y = alpha[rng.gen_range(0..alpha.len())].clone();
                (
                    ScatteredTerm::power(
                        ScatteredTerm::concat(vec![
                            ScatteredTerm::letter(x.clone()),
                            ScatteredTerm::letter(y.clone()),
                        ]),
                        Ordinal::omega(),
                    ),
                    ScatteredTerm::power(
                        ScatteredTerm::concat(vec![
                            ScatteredTerm::letter(y),
                            ScatteredTerm::letter(x),
                        ]),
                        Ordinal::omega(),
                    ),
                    "rotation of an omega word",
                )
            }
            _ => {
                // (xy)^ω versus x^ω y^ω: both have ω of each letter
                let x = alpha[rng.gen_range(0..alpha.len())].clone();
                let y = alpha[rng.gen_range(0..alpha.len())].clone();
                (
                    ScatteredTerm::power(
                        ScatteredTerm::concat(vec![
                            ScatteredTerm::letter(x.clone()),
                            ScatteredTerm::letter(y.clone()),
                        ]),
                        Ordinal::omega(),
                    ),
                    ScatteredTerm::concat(vec![
                        ScatteredTerm::power(ScatteredTerm::letter(x), Ordinal::omega()),
                        ScatteredTerm::power(ScatteredTerm::letter(y), Ordinal::omega()),
                    ]),
                    "interleaving versus blocks",
                )
            }
        };
        let a = match outcome_of(alg, &lhs) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = match outcome_of(alg, &rhs) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if a != b {
            let witness = Witness {
                lhs: WordExpr::Plain(lhs),
                rhs: WordExpr::Plain(rhs),
                lhs_out: a,
                rhs_out: b,
                relation: Relation::Agree,
                note: Some(note.into()),
            };
            return Ok(CheckReport::fail(AxiomId::C, tested, witness));
        }
    }
    Ok(CheckReport::exhausted(AxiomId::C, tested))
}

fn check_id(
    alg: &dyn Algebra,
    e: &str,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let mut tested = 1;
    // the empty product must be e itself
    let empty = outcome_of(alg, &ScatteredTerm::Empty).map_err(eval_unsupported)?;
    if empty.as_deref() != Some(e) {
        let witness = Witness {
            lhs: WordExpr::Plain(ScatteredTerm::Empty),
            rhs: WordExpr::Value(e.to_owned()),
            lhs_out: empty,
            rhs_out: Some(e.to_owned()),
            relation: Relation::Agree,
            note: Some("empty product of a complete identity".into()),
        };
        return Ok(CheckReport::fail(AxiomId::Id(e.to_owned()), tested, witness));
    }
    let mut alphabet = alg.alphabet();
    if !alphabet.iter().any(|x| x == e) {
        alphabet.push(e.to_owned());
    }
    let gen = WordGen::new(alphabet, alg.supports_scattered());
    for _ in 0..budget {
        tested += 1;
        let w = gen.gen(rng, 3);
        let deleted = w.delete_letter(e);
        if deleted == w {
            continue;
        }
        let a = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = match outcome_of(alg, &deleted) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if a != b {
            let witness = Witness {
                lhs: WordExpr::Plain(w),
                rhs: WordExpr::Plain(deleted),
                lhs_out: a,
                rhs_out: b,
                relation: Relation::Agree,
                note: Some(format!("deleting the identity '{}'", e)),
            };
            return Ok(CheckReport::fail(AxiomId::Id(e.to_owned()), tested, witness));
        }
    }
    Ok(CheckReport::exhausted(AxiomId::Id(e.to_owned()), tested))
}

fn check_narr(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let gen = WordGen::for_algebra(alg);
    let mut tested = 0;
    for _ in 0..budget {
        let w = gen.gen(rng, 3);
        let g = match random_regroup(&w, rng) {
            Some(g) => g,
            None => continue,
        };
        tested += 1;
        let grouped = match eval_grouped(alg, &g) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if grouped.is_none() {
            continue;
        }
        let direct = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if direct.is_none() {
            let witness = Witness {
                lhs: WordExpr::Grouped(g),
                rhs: WordExpr::Plain(w),
                lhs_out: grouped,
                rhs_out: None,
                relation: Relation::DefinednessFlows,
                note: Some("grouped subproducts defined, direct product undefined".into()),
            };
            return Ok(CheckReport::fail(AxiomId::Narr, tested, witness));
        }
    }
    Ok(CheckReport::exhausted(AxiomId::Narr, tested))
}

fn check_eq(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let gen = WordGen::for_algebra(alg);
    let mut tested = 0;
    for _ in 0..budget {
        let w = gen.gen(rng, 3);
        let g1 = match random_regroup(&w, rng) {
            Some(g) => g,
            None => continue,
        };
        let g2 = match random_regroup(&w, rng) {
            Some(g) => g,
            None => continue,
        };
        if g1 == g2 {
            continue;
        }
        tested += 1;
        let a = match eval_grouped(alg, &g1) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = match eval_grouped(alg, &g2) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if let (Some(x), Some(y)) = (&a, &b) {
            if x != y {
                let witness = Witness {
                    lhs: WordExpr::Grouped(g1),
                    rhs: WordExpr::Grouped(g2),
                    lhs_out: a.clone(),
                    rhs_out: b.clone(),
                    relation: Relation::AgreeWhenBothDefined,
                    note: Some("two regroupings of one sequence".into()),
                };
                return Ok(CheckReport::fail(AxiomId::Eq, tested, witness));
            }
        }
    }
    Ok(CheckReport::exhausted(AxiomId::Eq, tested))
}

fn check_omegapp(
    alg: &dyn Algebra,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CheckReport, AuditError> {
    let sorts = alg.sort_partition().ok_or_else(|| AuditError::UnsupportedAxiom {
        axiom: "OMEGAPP".into(),
        reason: "no sort partition".into(),
    })?;
    let (plus, omega) = sorts;
    let sort_of = |x: &str| -> Option<Sort> {
        if plus.iter().any(|p| p == x) {
            Some(Sort::Plus)
        } else if omega.iter().any(|o| o == x) {
            Some(Sort::Omega)
        } else {
            None
        }
    };
    let allowed = |s: Option<Sort>| -> String {
        match s {
            Some(Sort::Plus) => plus.join(","),
            Some(Sort::Omega) => omega.join(","),
            None => String::new(),
        }
    };
    let mut tested = 0;
    // every defined word product must respect the typing: plus letters
    // throughout give a plus value; a final omega-sorted letter gives an
    // omega value; anything after an omega-sorted letter is undefined.
    let gen = WordGen::new(alg.alphabet(), false);
    let mut rest = budget;
    for x in &plus {
        rest = rest.saturating_sub(1);
        tested += 1;
        let w = ScatteredTerm::power(ScatteredTerm::letter(x.clone()), Ordinal::omega());
        let out = outcome_of(alg, &w).map_err(eval_unsupported)?;
        let want = allowed(Some(Sort::Omega));
        if Relation::MemberOf.violated(&out, &Some(want.clone())) {
            let witness = Witness {
                lhs: WordExpr::Plain(w),
                rhs: WordExpr::Value(want.clone()),
                lhs_out: out,
                rhs_out: Some(want),
                relation: Relation::MemberOf,
                note: Some("omega power of a plus element".into()),
            };
            return Ok(CheckReport::fail(AxiomId::OmegaPP, tested, witness));
        }
    }
    for _ in 0..rest {
        tested += 1;
        let w = gen.gen(rng, 2);
        let out = match outcome_of(alg, &w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if out.is_none() {
            continue;
        }
        // defined: the shape must be type correct and the value must
        // carry the sort the typing assigns
        let want = allowed(typing_of(&w, &sort_of));
        if Relation::MemberOf.violated(&out, &Some(want.clone())) {
            let witness = Witness {
                lhs: WordExpr::Plain(w),
                rhs: WordExpr::Value(want.clone()),
                lhs_out: out,
                rhs_out: Some(want),
                relation: Relation::MemberOf,
                note: Some("sorted typing violated".into()),
            };
            return Ok(CheckReport::fail(AxiomId::OmegaPP, tested, witness));
        }
    }
    Ok(CheckReport::exhausted(AxiomId::OmegaPP, tested))
}

/// Sort a defined product of this word must have, or `None` when the
/// typing forbids the word outright.
fn typing_of(t: &ScatteredTerm, sort_of: &dyn Fn(&str) -> Option<Sort>) -> Option<Sort> {
    match t {
        ScatteredTerm::Empty => None,
        ScatteredTerm::Letter(s) => sort_of(s),
        ScatteredTerm::Concat(cs) => {
            let mut result = None;
            for (i, c) in cs.iter().enumerate() {
                let s = typing_of(c, sort_of)?;
                match s {
                    Sort::Plus => {
                        result = Some(Sort::Plus);
                    }
                    Sort::Omega => {
                        if i + 1 != cs.len() {
                            return None;
                        }
                        result = Some(Sort::Omega);
                    }
                }
            }
            result
        }
        ScatteredTerm::Power(b, e) => {
            let s = typing_of(b, sort_of)?;
            match s {
                Sort::Plus => {
                    if e.is_finite() {
                        Some(Sort::Plus)
                    } else {
                        Some(Sort::Omega)
                    }
                }
                Sort::Omega => None,
            }
        }
        ScatteredTerm::StarPower(_) => None,
    }
}

/// The standard audit battery: U, ASSOC3, WILKE (when an ω table exists),
/// N_PART, CONVEX, ISO, plus ID(e) when an empty product is declared and
/// OMEGAPP when the algebra is sorted.
pub fn audit_suite(alg: &dyn Algebra, budget: u64, seed: u64) -> Vec<CheckReport> {
    let mut axioms = vec![AxiomId::U, AxiomId::Assoc3];
    if alg.has_omega_power() {
        axioms.push(AxiomId::Wilke);
    }
    axioms.push(AxiomId::NPart);
    axioms.push(AxiomId::Convex);
    axioms.push(AxiomId::Iso);
    if let Some(e) = alg.empty_product_id() {
        axioms.push(AxiomId::Id(e));
    }
    if alg.sort_partition().is_some() {
        axioms.push(AxiomId::OmegaPP);
    }
    axioms
        .into_iter()
        .map(|a| {
            check_axiom(alg, &a, budget, seed).unwrap_or_else(|err| CheckReport {
                axiom: a,
                verdict: Verdict::Exhausted,
                tested: 0,
                witness: None,
                note: Some(format!("{}", err)),
            })
        })
        .collect()
}

/// True when no report in the suite failed.
pub fn suite_passes(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| !r.failed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CompletenessClass, FinAlgebra};

    fn z2_no_omega() -> FinAlgebra {
        FinAlgebra::from_entries(
            vec!["0".into(), "1".into()],
            &[
                (("0", "0"), "0"),
                (("0", "1"), "1"),
                (("1", "0"), "1"),
                (("1", "1"), "0"),
            ],
            &[],
            None,
            None,
            None,
            CompletenessClass::LtOmega,
        )
        .unwrap()
    }

    #[test]
    fn unsupported_axioms() {
        let alg = z2_no_omega();
        assert!(matches!(
            check_axiom(&alg, &AxiomId::Wilke, 100, 0),
            Err(AuditError::UnsupportedAxiom { .. })
        ));
        assert!(matches!(
            check_axiom(&alg, &AxiomId::OmegaPP, 100, 0),
            Err(AuditError::UnsupportedAxiom { .. })
        ));
        assert!(matches!(
            check_axiom(&alg, &AxiomId::U, 0, 0),
            Err(AuditError::BadBudget)
        ));
    }

    #[test]
    fn axiom_ids_roundtrip() {
        for s in [
            "U", "ASSOC3", "WILKE", "N_PART", "CONVEX", "ISO", "C", "ID(e)", "NARR", "EQ",
            "NMAX", "NLIM", "OMEGAPP",
        ] {
            let a = AxiomId::parse(s).unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert_eq!(AxiomId::parse("bogus"), None);
    }

    #[test]
    fn narr_violation_found_and_replayed() {
        // a·a = b, b·b = c, but b·a undefined: the pair grouping of
        // a.a.a.a is defined while the direct left fold is not
        let alg = FinAlgebra::from_entries(
            vec!["a".into(), "b".into(), "c".into()],
            &[(("a", "a"), "b"), (("b", "b"), "c")],
            &[],
            None,
            None,
            None,
            CompletenessClass::LtOmega,
        )
        .unwrap();
        let report = (0..8)
            .map(|seed| check_axiom(&alg, &AxiomId::Narr, 1500, seed).unwrap())
            .find(|r| r.verdict == Verdict::Fail)
            .expect("some seed finds the pair-grouping violation");
        replay_witness(&alg, &report.witness.unwrap()).unwrap();
    }

    #[test]
    fn nmax_nlim_split_the_partitions() {
        // Z2 with a total omega table fails full N; the NMAX fragment
        // catches it via the peel split (quotient 2 has a maximum), while
        // NLIM needs a maximum-free quotient
        let alg = FinAlgebra::from_entries(
            vec!["0".into(), "1".into()],
            &[
                (("0", "0"), "0"),
                (("0", "1"), "1"),
                (("1", "0"), "1"),
                (("1", "1"), "0"),
            ],
            &[("0", "0"), ("1", "0")],
            None,
            None,
            None,
            CompletenessClass::CompleteOnEncodable,
        )
        .unwrap();
        let nmax = check_axiom(&alg, &AxiomId::NMax, 2000, 5).unwrap();
        assert_eq!(nmax.verdict, Verdict::Fail);
        let w = nmax.witness.unwrap();
        assert!(outer_has_max(&match &w.rhs {
            WordExpr::Grouped(g) => g.clone(),
            _ => panic!("expected grouped rhs"),
        }));
        replay_witness(&alg, &w).unwrap();
        // (1^2)^ω = 0^ω = 0 = 1^ω here, and (xy)^ω rotations agree, so the
        // NLIM block groupings pass while peeling fails
        let nlim = check_axiom(&alg, &AxiomId::NLim, 1500, 5).unwrap();
        assert_ne!(nlim.verdict, Verdict::Fail, "{}", nlim);
    }

    #[test]
    fn pseq_constructor_edges() {
        use crate::ordinal::Ordinal;
        use crate::pseq::{PiecewiseError, PiecewiseSeq};
        assert_eq!(
            PiecewiseSeq::<u32>::new(vec![]),
            Err(PiecewiseError::Empty)
        );
        assert_eq!(
            PiecewiseSeq::new(vec![(Ordinal::zero(), 1u32)]),
            Err(PiecewiseError::ZeroLengthRun)
        );
        let merged = PiecewiseSeq::new(vec![
            (Ordinal::one(), 7u32),
            (Ordinal::from(2), 7u32),
            (Ordinal::one(), 9u32),
        ])
        .unwrap();
        assert_eq!(merged.runs().len(), 2);
        assert_eq!(merged.runs()[0].0, Ordinal::from(3));
    }
}
