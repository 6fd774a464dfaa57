//! Executable oracles for the structural results: the absorbing element of
//! commutative complete algebras, the rigidity of infinitary identities with
//! inverses, the no-right-inverse property of ω-powers, and a detector for
//! the one-sided-inverse phenomenon.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, CompletenessClass, FinAlgebra};
use crate::audit::{
    check_axiom, eval_expr, AxiomId, CheckReport, GroupedWord, Relation, Verdict, Witness,
    WordExpr, WordGen,
};
use crate::ordinal::Ordinal;
use crate::word::ScatteredTerm;

#[derive(Clone, Debug)]
pub enum KrobError {
    NotCommutative(Witness),
    /// The algebra is not complete on encodable words; the word is
    /// undefined.
    NotComplete(ScatteredTerm),
    /// The candidate absorbing element failed two-sided absorption,
    /// contradicting the completeness/commutativity claims.
    AbsorptionFails(Witness),
    NeedsFiniteCarrier,
}

impl fmt::Display for KrobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KrobError::NotCommutative(w) => write!(f, "not commutative: {}", w),
            KrobError::NotComplete(t) => write!(f, "not complete on encodable words: {}", t),
            KrobError::AbsorptionFails(w) => write!(f, "absorption fails: {}", w),
            KrobError::NeedsFiniteCarrier => write!(f, "a finite carrier is required"),
        }
    }
}

/// Computes the absorbing element of a commutative complete algebra as the
/// product of the ω-word cycling through the whole carrier, then verifies
/// two-sided absorption and absorption inside generated encodable words.
pub fn krob_omega(alg: &dyn Algebra, budget: u64, seed: u64) -> Result<String, KrobError> {
    let carrier = alg.carrier().ok_or(KrobError::NeedsFiniteCarrier)?;
    let c_report =
        check_axiom(alg, &AxiomId::C, budget, seed).map_err(|_| KrobError::NeedsFiniteCarrier)?;
    if let Some(w) = c_report.witness {
        return Err(KrobError::NotCommutative(w));
    }
    let gen = WordGen::for_algebra(alg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0B5);
    for _ in 0..budget.min(512) {
        let w = gen.gen(&mut rng, 3);
        match alg.eval(&w) {
            Ok(_) => {}
            Err(e) if e.is_undefined() => return Err(KrobError::NotComplete(w)),
            Err(_) => {}
        }
    }
    // Ω = π((s1 s2 ... sk)^ω)
    let cycle = ScatteredTerm::concat(
        carrier
            .iter()
            .map(|s| ScatteredTerm::letter(s.clone()))
            .collect(),
    );
    let word = ScatteredTerm::power(cycle, Ordinal::omega());
    let omega = match alg.eval(&word) {
        Ok(v) => v,
        Err(_) => return Err(KrobError::NotComplete(word)),
    };
    for a in &carrier {
        for (lhs, note) in [
            (
                ScatteredTerm::concat(vec![
                    ScatteredTerm::letter(omega.clone()),
                    ScatteredTerm::letter(a.clone()),
                ]),
                "left absorption",
            ),
            (
                ScatteredTerm::concat(vec![
                    ScatteredTerm::letter(a.clone()),
                    ScatteredTerm::letter(omega.clone()),
                ]),
                "right absorption",
            ),
        ] {
            let out = match alg.eval(&lhs) {
                Ok(v) => Some(v),
                Err(e) if e.is_undefined() => None,
                Err(_) => continue,
            };
            if out.as_deref() != Some(omega.as_str()) {
                return Err(KrobError::AbsorptionFails(Witness {
                    lhs: WordExpr::Plain(lhs),
                    rhs: WordExpr::Value(omega.clone()),
                    lhs_out: out,
                    rhs_out: Some(omega.clone()),
                    relation: Relation::Agree,
                    note: Some(note.to_owned()),
                }));
            }
        }
    }
    // generated encodable words containing Ω must evaluate to Ω
    for _ in 0..budget.min(512) {
        let w = gen.gen(&mut rng, 2);
        let with_omega = ScatteredTerm::concat(vec![
            w.clone(),
            ScatteredTerm::letter(omega.clone()),
            w,
        ]);
        let out = match alg.eval(&with_omega) {
            Ok(v) => Some(v),
            Err(e) if e.is_undefined() => None,
            Err(_) => continue,
        };
        if out.as_deref() != Some(omega.as_str()) {
            return Err(KrobError::AbsorptionFails(Witness {
                lhs: WordExpr::Plain(with_omega),
                rhs: WordExpr::Value(omega.clone()),
                lhs_out: out,
                rhs_out: Some(omega.clone()),
                relation: Relation::Agree,
                note: Some("absorption in an encodable word".to_owned()),
            }));
        }
    }
    Ok(omega)
}

/// Which hypothesis of the inverse-pair proposition the triple `(a, b, e)`
/// fails, if any: `ab = e = ba`, `ae = a`, `be = b`, `π(e^ω) = e`, and
/// `π((ab)^ω)` defined.
pub fn abeba_hypothesis_gap(
    alg: &dyn Algebra,
    a: &str,
    b: &str,
    e: &str,
) -> Option<&'static str> {
    let pair = |x: &str, y: &str| {
        alg.eval(&ScatteredTerm::concat(vec![
            ScatteredTerm::letter(x),
            ScatteredTerm::letter(y),
        ]))
        .ok()
    };
    if pair(a, b).as_deref() != Some(e) {
        return Some("ab = e");
    }
    if pair(b, a).as_deref() != Some(e) {
        return Some("ba = e");
    }
    if pair(a, e).as_deref() != Some(a) {
        return Some("ae = a");
    }
    if pair(b, e).as_deref() != Some(b) {
        return Some("be = b");
    }
    let e_omega = ScatteredTerm::power(ScatteredTerm::letter(e), Ordinal::omega());
    if alg.eval(&e_omega).ok().as_deref() != Some(e) {
        return Some("e^w = e");
    }
    let ab_omega = ScatteredTerm::power(
        ScatteredTerm::concat(vec![ScatteredTerm::letter(a), ScatteredTerm::letter(b)]),
        Ordinal::omega(),
    );
    if alg.eval(&ab_omega).is_err() {
        return Some("(ab)^w defined");
    }
    None
}

/// Exhaustive check that inverse pairs around an infinitary identity are
/// trivial: every `(a, b, e)` satisfying all the hypotheses has
/// `a = e = b`. A failure is a counterexample to the audit suite itself;
/// the witness replays the broken regrouping step of the derivation.
pub fn verify_abeba(alg: &dyn Algebra) -> CheckReport {
    let carrier = match alg.carrier() {
        Some(c) => c,
        None => {
            return CheckReport {
                axiom: AxiomId::NPart,
                verdict: Verdict::Exhausted,
                tested: 0,
                witness: None,
                note: Some("inverse-pair check needs a finite carrier".into()),
            }
        }
    };
    let mut tested = 0u64;
    let mut qualifying = 0u64;
    for a in &carrier {
        for b in &carrier {
            for e in &carrier {
                tested += 1;
                if abeba_hypothesis_gap(alg, a, b, e).is_some() {
                    continue;
                }
                qualifying += 1;
                if a == e && b == e {
                    continue;
                }
                let witness = abeba_broken_step(alg, a, b, e);
                return CheckReport {
                    axiom: AxiomId::NPart,
                    verdict: Verdict::Fail,
                    tested,
                    witness,
                    note: Some(format!(
                        "internal inconsistency: nontrivial inverse pair a={}, b={}, e={}",
                        a, b, e
                    )),
                };
            }
        }
    }
    CheckReport {
        axiom: AxiomId::NPart,
        verdict: Verdict::Pass,
        tested,
        witness: None,
        note: Some(format!("qualifying triples: {}", qualifying)),
    }
}

/// Replays the derivation `(ab)^ω = e^ω = e` and `(ab)^ω = a(ba)^ω = a` on
/// a violating triple and returns the first regrouping whose two routes
/// disagree.
fn abeba_broken_step(alg: &dyn Algebra, a: &str, b: &str, e: &str) -> Option<Witness> {
    let ab = ScatteredTerm::concat(vec![ScatteredTerm::letter(a), ScatteredTerm::letter(b)]);
    let ba = ScatteredTerm::concat(vec![ScatteredTerm::letter(b), ScatteredTerm::letter(a)]);
    let ab_omega = ScatteredTerm::power(ab.clone(), Ordinal::omega());
    let candidates = [
        Witness {
            lhs: WordExpr::Plain(ab_omega.clone()),
            rhs: WordExpr::Grouped(GroupedWord {
                inners: vec![ab],
                outer: ScatteredTerm::power(ScatteredTerm::letter("0"), Ordinal::omega()),
            }),
            lhs_out: None,
            rhs_out: None,
            relation: Relation::Agree,
            note: Some("(ab)(ab)... = e e ... step".into()),
        },
        Witness {
            lhs: WordExpr::Plain(ab_omega),
            rhs: WordExpr::Grouped(GroupedWord {
                inners: vec![
                    ScatteredTerm::letter(a),
                    ScatteredTerm::power(ba, Ordinal::omega()),
                ],
                outer: ScatteredTerm::concat(vec![
                    ScatteredTerm::letter("0"),
                    ScatteredTerm::letter("1"),
                ]),
            }),
            lhs_out: None,
            rhs_out: None,
            relation: Relation::Agree,
            note: Some("a(ba)(ba)... step".into()),
        },
        Witness {
            lhs: WordExpr::Plain(ScatteredTerm::power(
                ScatteredTerm::letter(e),
                Ordinal::omega(),
            )),
            rhs: WordExpr::Value(e.to_owned()),
            lhs_out: None,
            rhs_out: Some(e.to_owned()),
            relation: Relation::Agree,
            note: Some("e^w = e step".into()),
        },
    ];
    for mut w in candidates {
        let lhs = eval_expr(alg, &w.lhs).ok()?;
        let rhs = eval_expr(alg, &w.rhs).ok()?;
        if lhs != rhs {
            w.lhs_out = lhs;
            w.rhs_out = rhs;
            return Some(w);
        }
    }
    None
}

/// Finitary-neutral elements (two-sided, defined on all pairs).
pub fn neutral_elements(alg: &dyn Algebra) -> Vec<String> {
    let carrier = match alg.carrier() {
        Some(c) => c,
        None => return Vec::new(),
    };
    let pair = |x: &str, y: &str| {
        alg.eval(&ScatteredTerm::concat(vec![
            ScatteredTerm::letter(x),
            ScatteredTerm::letter(y),
        ]))
        .ok()
    };
    carrier
        .iter()
        .filter(|e| {
            carrier.iter().all(|x| {
                pair(e, x).as_deref() == Some(x.as_str())
                    && pair(x, e).as_deref() == Some(x.as_str())
            })
        })
        .cloned()
        .collect()
}

/// Checks that no defined product `a^ω · c` with `a` non-neutral equals a
/// finitary-neutral element: ω-powers have no right inverse.
pub fn verify_notut(alg: &dyn Algebra) -> CheckReport {
    let carrier = match alg.carrier() {
        Some(c) => c,
        None => {
            return CheckReport {
                axiom: AxiomId::U,
                verdict: Verdict::Exhausted,
                tested: 0,
                witness: None,
                note: Some("right-inverse check needs a finite carrier".into()),
            }
        }
    };
    let neutrals = neutral_elements(alg);
    if neutrals.is_empty() {
        return CheckReport {
            axiom: AxiomId::U,
            verdict: Verdict::Pass,
            tested: 0,
            witness: None,
            note: Some("no finitary-neutral element; vacuous".into()),
        };
    }
    let mut tested = 0u64;
    for e in &neutrals {
        for a in &carrier {
            if a == e {
                continue;
            }
            let a_omega =
                ScatteredTerm::power(ScatteredTerm::letter(a.clone()), Ordinal::omega());
            if alg.eval(&a_omega).is_err() {
                continue;
            }
            for c in &carrier {
                tested += 1;
                let word = ScatteredTerm::concat(vec![
                    a_omega.clone(),
                    ScatteredTerm::letter(c.clone()),
                ]);
                if let Ok(v) = alg.eval(&word) {
                    if &v == e {
                        return CheckReport {
                            axiom: AxiomId::U,
                            verdict: Verdict::Fail,
                            tested,
                            witness: Some(Witness {
                                lhs: WordExpr::Plain(word),
                                rhs: WordExpr::Value(e.clone()),
                                lhs_out: Some(v),
                                rhs_out: Some(e.clone()),
                                relation: Relation::Differ,
                                note: Some(format!(
                                    "a^w * c = e with a = {}, c = {}, e = {}",
                                    a, c, e
                                )),
                            }),
                            note: Some(
                                "internal inconsistency: omega power has a right inverse".into(),
                            ),
                        };
                    }
                }
            }
        }
    }
    CheckReport {
        axiom: AxiomId::U,
        verdict: Verdict::Pass,
        tested,
        witness: None,
        note: Some(format!("neutral elements: {}", neutrals.join(";"))),
    }
}

/// Detector for the one-sided-inverse phenomenon: a pair `a, b` distinct
/// from a complete identity `e` with `ab = e`. Reports whether the input
/// exhibits it; it never constructs such an algebra.
pub fn abe_statement_check(alg: &dyn Algebra, budget: u64, seed: u64) -> CheckReport {
    let carrier = match alg.carrier() {
        Some(c) => c,
        None => {
            return CheckReport {
                axiom: AxiomId::Eq,
                verdict: Verdict::Exhausted,
                tested: 0,
                witness: None,
                note: Some("detector needs a finite carrier".into()),
            }
        }
    };
    let mut tested = 0u64;
    let mut id_failures: Vec<String> = Vec::new();
    for e in &carrier {
        for a in &carrier {
            for b in &carrier {
                if a == e || b == e {
                    continue;
                }
                tested += 1;
                let ab = ScatteredTerm::concat(vec![
                    ScatteredTerm::letter(a.clone()),
                    ScatteredTerm::letter(b.clone()),
                ]);
                if alg.eval(&ab).ok().as_deref() != Some(e.as_str()) {
                    continue;
                }
                let id_report = check_axiom(alg, &AxiomId::Id(e.clone()), budget, seed)
                    .unwrap_or_else(|_| CheckReport {
                        axiom: AxiomId::Id(e.clone()),
                        verdict: Verdict::Fail,
                        tested: 0,
                        witness: None,
                        note: None,
                    });
                if id_report.failed() {
                    id_failures.push(format!(
                        "pair ({}, {}) -> {} rejected: ID({}) fails",
                        a, b, e, e
                    ));
                    continue;
                }
                return CheckReport {
                    axiom: AxiomId::Eq,
                    verdict: Verdict::Pass,
                    tested,
                    witness: None,
                    note: Some(format!("exhibited: a={}, b={}, e={}", a, b, e)),
                };
            }
        }
    }
    let mut note = String::from("not exhibited");
    for f in id_failures {
        note.push_str("; ");
        note.push_str(&f);
    }
    CheckReport {
        axiom: AxiomId::Eq,
        verdict: Verdict::Pass,
        tested,
        witness: None,
        note: Some(note),
    }
}

// ---------------------------------------------------------------------------
// Desk-scale enumeration of commutative complete algebras

/// Enumerates every commutative complete-on-encodable algebra on carriers
/// of size `1..=max_size`: total commutative associative binary tables
/// paired with total ω tables consistent with the regrouping laws, kept
/// when the audit suite plus a commutativity audit passes at the given
/// budget.
pub fn commutative_complete_algebras(max_size: usize, budget: u64, seed: u64) -> Vec<FinAlgebra> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        let ids: Vec<String> = (0..n).map(|i| format!("s{}", i)).collect();
        let cells: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .collect();
        let total = (n as u64).pow(cells.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut table = vec![0usize; n * n];
            for &(i, j) in &cells {
                let v = (c % n as u64) as usize;
                c /= n as u64;
                table[i * n + j] = v;
                table[j * n + i] = v;
            }
            let bin = |a: usize, b: usize| table[a * n + b];
            let assoc = (0..n)
                .all(|a| (0..n).all(|b| (0..n).all(|c| bin(bin(a, b), c) == bin(a, bin(b, c)))));
            if !assoc {
                continue;
            }
            for om_code in 0..(n as u64).pow(n as u32) {
                let mut c = om_code;
                let mut om = vec![0usize; n];
                for slot in om.iter_mut() {
                    *slot = (c % n as u64) as usize;
                    c /= n as u64;
                }
                // x * x^ω = x^ω (peeling one factor)
                if !(0..n).all(|x| bin(x, om[x]) == om[x]) {
                    continue;
                }
                // (x^k)^ω = x^ω for small k (block regrouping)
                let mut ok = true;
                for x in 0..n {
                    let mut p = x;
                    for _ in 2..=3 {
                        p = bin(p, x);
                        if om[p] != om[x] {
                            ok = false;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                // commutative interleaving: (xy)^ω = x^ω y^ω
                if !(0..n).all(|x| (0..n).all(|y| om[bin(x, y)] == bin(om[x], om[y]))) {
                    continue;
                }
                let alg = FinAlgebra::new(
                    ids.clone(),
                    table.iter().map(|&v| Some(v)).collect(),
                    om.iter().map(|&v| Some(v)).collect(),
                    None,
                    None,
                    None,
                    CompletenessClass::CompleteOnEncodable,
                )
                .expect("enumerated tables are well formed");
                let mut reports = crate::audit::audit_suite(&alg, budget, seed);
                if let Ok(c_rep) = check_axiom(&alg, &AxiomId::C, budget, seed) {
                    reports.push(c_rep);
                }
                if crate::audit::suite_passes(&reports) {
                    out.push(alg);
                }
            }
        }
    }
    out
}

/// A two-sided binary absorber, when one exists.
pub fn find_binary_absorber(alg: &dyn Algebra) -> Option<String> {
    let carrier = alg.carrier()?;
    let pair = |x: &str, y: &str| {
        alg.eval(&ScatteredTerm::concat(vec![
            ScatteredTerm::letter(x),
            ScatteredTerm::letter(y),
        ]))
        .ok()
    };
    carrier
        .iter()
        .find(|o| {
            carrier.iter().all(|a| {
                pair(o, a).as_deref() == Some(o.as_str())
                    && pair(a, o).as_deref() == Some(o.as_str())
            })
        })
        .cloned()
}
