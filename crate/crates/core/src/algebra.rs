//! Finitely presented partial infinitary semigroups and product evaluation
//! over transfinite words.
//!
//! A `FinAlgebra` is a finite carrier with a partial binary table, a partial
//! ω-power table, optionally an ω*-power table, an optional sort partition
//! in the style of ω-semigroups, an optional empty-product element, and a
//! claimed completeness class. Products of encodable words (ordinal words
//! with exponents below ω^ω, plus ω*-powers when the table exists) are
//! computed by the canonical recursion `pi_eval`.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::ordinal::Ordinal;
use crate::word::{ScatteredTerm, WordTerm};

/// Completeness claim carried by an algebra; audits test the claim on
/// encodable sequences, they never assume it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CompletenessClass {
    LtOmega,
    LeqOmega,
    LtOmega1Symbolic,
    Ordinal,
    CompleteOnEncodable,
}

impl CompletenessClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompletenessClass::LtOmega => "lt-omega",
            CompletenessClass::LeqOmega => "leq-omega",
            CompletenessClass::LtOmega1Symbolic => "lt-omega1-symbolic",
            CompletenessClass::Ordinal => "ordinal",
            CompletenessClass::CompleteOnEncodable => "complete-on-encodable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lt-omega" => CompletenessClass::LtOmega,
            "leq-omega" => CompletenessClass::LeqOmega,
            "lt-omega1-symbolic" => CompletenessClass::LtOmega1Symbolic,
            "ordinal" => CompletenessClass::Ordinal,
            "complete-on-encodable" => CompletenessClass::CompleteOnEncodable,
            _ => return None,
        })
    }
}

impl fmt::Display for CompletenessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sort {
    Plus,
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    EmptyCarrier,
    DuplicateId(String),
    BadId(String),
    BadIndex,
    SortViolation(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::EmptyCarrier => write!(f, "carrier must be nonempty"),
            AlgebraError::DuplicateId(s) => write!(f, "duplicate element id '{}'", s),
            AlgebraError::BadId(s) => write!(f, "invalid element id '{}'", s),
            AlgebraError::BadIndex => write!(f, "table entry outside the carrier"),
            AlgebraError::SortViolation(s) => write!(f, "sort typing violated: {}", s),
        }
    }
}

/// Evaluation failure: a missing table entry (with the subterm that needed
/// it), an exponent outside the encodable fragment, or a malformed word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Undefined { witness: ScatteredTerm },
    ExponentTooLarge { exponent: Ordinal },
    UnknownElement { id: String },
    Unsupported { what: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Undefined { witness } => write!(f, "undefined at {}", witness),
            EvalError::ExponentTooLarge { exponent } => {
                write!(f, "exponent {} is not below w^w", exponent)
            }
            EvalError::UnknownElement { id } => write!(f, "unknown element '{}'", id),
            EvalError::Unsupported { what } => write!(f, "unsupported: {}", what),
        }
    }
}

impl EvalError {
    pub fn is_undefined(&self) -> bool {
        matches!(self, EvalError::Undefined { .. })
    }
}

pub type EvalOutcome = Result<String, EvalError>;

/// The evaluator interface audits are written against. Table algebras and
/// the structured instances from the constructions module both implement
/// it.
pub trait Algebra {
    fn describe(&self) -> String;

    /// Finite sample of elements used to generate audit words; the whole
    /// carrier when it is finite and small.
    fn alphabet(&self) -> Vec<String>;

    /// The full carrier, when finite.
    fn carrier(&self) -> Option<Vec<String>>;

    fn eval(&self, t: &ScatteredTerm) -> EvalOutcome;

    fn empty_product_id(&self) -> Option<String>;

    fn claimed_class(&self) -> CompletenessClass;

    /// Whether ω*-powers (hence scattered shapes) can be evaluated.
    fn supports_scattered(&self) -> bool {
        false
    }

    /// Whether ω-powers are available at all (the Wilke audit needs them).
    fn has_omega_power(&self) -> bool {
        true
    }

    /// The `(plus, omega)` sort partition, when the instance is sorted.
    fn sort_partition(&self) -> Option<(Vec<String>, Vec<String>)> {
        None
    }
}

fn id_is_valid(id: &str) -> bool {
    if id.is_empty() || id.trim() != id {
        return false;
    }
    let mut depth = 0i32;
    for c in id.chars() {
        match c {
            '(' | '{' | '[' | '<' => depth += 1,
            ')' | '}' | ']' | '>' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            ',' if depth == 0 => return false,
            _ => {}
        }
    }
    depth == 0
}

/// A finitely presented partial infinitary semigroup.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinAlgebra {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    bin: Vec<Option<usize>>,
    omega: Vec<Option<usize>>,
    omega_star: Option<Vec<Option<usize>>>,
    sorts: Option<Vec<Sort>>,
    empty_product: Option<usize>,
    class: CompletenessClass,
}

impl FinAlgebra {
    pub fn new(
        ids: Vec<String>,
        bin: Vec<Option<usize>>,
        omega: Vec<Option<usize>>,
        omega_star: Option<Vec<Option<usize>>>,
        sorts: Option<Vec<Sort>>,
        empty_product: Option<usize>,
        class: CompletenessClass,
    ) -> Result<FinAlgebra, AlgebraError> {
        let n = ids.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if !id_is_valid(id) {
                return Err(AlgebraError::BadId(id.clone()));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateId(id.clone()));
            }
        }
        if bin.len() != n * n || omega.len() != n {
            return Err(AlgebraError::BadIndex);
        }
        let in_range = |v: &Option<usize>| v.is_none_or(|x| x < n);
        if !bin.iter().all(in_range) || !omega.iter().all(in_range) {
            return Err(AlgebraError::BadIndex);
        }
        if let Some(star) = &omega_star {
            if star.len() != n || !star.iter().all(in_range) {
                return Err(AlgebraError::BadIndex);
            }
        }
        if let Some(e) = empty_product {
            if e >= n {
                return Err(AlgebraError::BadIndex);
            }
        }
        if let Some(sorts) = &sorts {
            if sorts.len() != n {
                return Err(AlgebraError::BadIndex);
            }
            let alg = FinAlgebra {
                ids: ids.clone(),
                index: index.clone(),
                bin: bin.clone(),
                omega: omega.clone(),
                omega_star: omega_star.clone(),
                sorts: Some(sorts.clone()),
                empty_product,
                class,
            };
            alg.check_sort_typing()?;
            return Ok(alg);
        }
        Ok(FinAlgebra {
            ids,
            index,
            bin,
            omega,
            omega_star,
            sorts,
            empty_product,
            class,
        })
    }

    /// ω-semigroup typing: products of two plus-sorted elements stay plus,
    /// a plus then an omega-sorted element lands in the omega sort, nothing
    /// follows an omega-sorted element, and the ω-power is defined exactly
    /// on the plus sort with omega-sorted values.
    fn check_sort_typing(&self) -> Result<(), AlgebraError> {
        let sorts = self.sorts.as_ref().unwrap();
        let n = self.ids.len();
        for a in 0..n {
            for b in 0..n {
                let v = self.bin[a * n + b];
                match (sorts[a], sorts[b]) {
                    (Sort::Omega, _) => {
                        if v.is_some() {
                            return Err(AlgebraError::SortViolation(format!(
                                "bin({}, {}) defined after an omega-sorted factor",
                                self.ids[a], self.ids[b]
                            )));
                        }
                    }
                    (Sort::Plus, Sort::Plus) => {
                        if let Some(v) = v {
                            if sorts[v] != Sort::Plus {
                                return Err(AlgebraError::SortViolation(format!(
                                    "bin({}, {}) leaves the plus sort",
                                    self.ids[a], self.ids[b]
                                )));
                            }
                        }
                    }
                    (Sort::Plus, Sort::Omega) => {
                        if let Some(v) = v {
                            if sorts[v] != Sort::Omega {
                                return Err(AlgebraError::SortViolation(format!(
                                    "bin({}, {}) must land in the omega sort",
                                    self.ids[a], self.ids[b]
                                )));
                            }
                        }
                    }
                }
            }
            match sorts[a] {
                Sort::Plus => match self.omega[a] {
                    Some(v) if sorts[v] == Sort::Omega => {}
                    Some(_) => {
                        return Err(AlgebraError::SortViolation(format!(
                            "omega({}) must land in the omega sort",
                            self.ids[a]
                        )))
                    }
                    None => {
                        return Err(AlgebraError::SortViolation(format!(
                            "omega({}) must be defined on the plus sort",
                            self.ids[a]
                        )))
                    }
                },
                Sort::Omega => {
                    if self.omega[a].is_some() {
                        return Err(AlgebraError::SortViolation(format!(
                            "omega({}) defined on an omega-sorted element",
                            self.ids[a]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn idx(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn bin_idx(&self, a: usize, b: usize) -> Option<usize> {
        self.bin[a * self.ids.len() + b]
    }

    pub fn omega_idx(&self, a: usize) -> Option<usize> {
        self.omega[a]
    }

    pub fn omega_star_idx(&self, a: usize) -> Option<Option<usize>> {
        self.omega_star.as_ref().map(|t| t[a])
    }

    pub fn has_omega_star(&self) -> bool {
        self.omega_star.is_some()
    }

    pub fn omega_table_is_empty(&self) -> bool {
        self.omega.iter().all(|v| v.is_none())
    }

    pub fn sorts(&self) -> Option<&[Sort]> {
        self.sorts.as_deref()
    }

    pub fn empty_product_idx(&self) -> Option<usize> {
        self.empty_product
    }

    pub fn class(&self) -> CompletenessClass {
        self.class
    }

    pub fn with_class(mut self, class: CompletenessClass) -> Self {
        self.class = class;
        self
    }

    pub fn bin_by_id(&self, a: &str, b: &str) -> Option<&str> {
        let (a, b) = (self.idx(a)?, self.idx(b)?);
        self.bin_idx(a, b).map(|v| self.id(v))
    }

    /// Iterated binary power `x^c` (left fold), with cycle detection so
    /// arbitrarily large coefficients evaluate in at most carrier-many
    /// steps. `c` must be ≥ 1.
    fn bin_pow(&self, x: usize, c: &BigUint) -> Result<usize, EvalError> {
        let mut seq = vec![x];
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        seen.insert(x, 0);
        loop {
            if BigUint::from(seq.len()) == *c {
                return Ok(*seq.last().unwrap());
            }
            let last = *seq.last().unwrap();
            let next = self.bin_idx(last, x).ok_or_else(|| EvalError::Undefined {
                witness: ScatteredTerm::concat(vec![
                    ScatteredTerm::letter(self.id(last)),
                    ScatteredTerm::letter(self.id(x)),
                ]),
            })?;
            if let Some(&start) = seen.get(&next) {
                // powers are eventually periodic: seq[m] = x^(m+1)
                let period = seq.len() - start;
                let offset = ((c - 1u32) - start) % period;
                let idx = start + offset.to_usize().expect("offset below period");
                return Ok(seq[idx]);
            }
            seen.insert(next, seq.len());
            seq.push(next);
        }
    }

    fn eval_idx(&self, t: &ScatteredTerm) -> Result<usize, EvalError> {
        match t {
            ScatteredTerm::Empty => self.empty_product.ok_or(EvalError::Undefined {
                witness: ScatteredTerm::Empty,
            }),
            ScatteredTerm::Letter(s) => {
                self.idx(s).ok_or_else(|| EvalError::UnknownElement { id: s.clone() })
            }
            ScatteredTerm::Concat(cs) => {
                let mut acc: Option<usize> = None;
                for c in cs {
                    let v = self.eval_idx(c)?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => {
                            self.bin_idx(a, v).ok_or_else(|| EvalError::Undefined {
                                witness: ScatteredTerm::concat(vec![
                                    ScatteredTerm::letter(self.id(a)),
                                    ScatteredTerm::letter(self.id(v)),
                                ]),
                            })?
                        }
                    });
                }
                acc.ok_or(EvalError::Undefined {
                    witness: ScatteredTerm::Empty,
                })
            }
            ScatteredTerm::Power(b, e) => {
                if !e.degree().is_finite() {
                    return Err(EvalError::ExponentTooLarge {
                        exponent: e.clone(),
                    });
                }
                let v = self.eval_idx(b)?;
                // e = w^k1*c1 + ... + ck in CNF; the power splits into the
                // product of its CNF blocks, each block being an iterated
                // ω-power raised to a finite coefficient
                let mut acc: Option<usize> = None;
                for (exp, coeff) in e.terms() {
                    let k = exp.as_u64().expect("finite exponent of the exponent");
                    let mut block = v;
                    for _ in 0..k {
                        block =
                            self.omega_idx(block).ok_or_else(|| EvalError::Undefined {
                                witness: ScatteredTerm::power(
                                    ScatteredTerm::letter(self.id(block)),
                                    Ordinal::omega(),
                                ),
                            })?;
                    }
                    let block = self.bin_pow(block, coeff)?;
                    acc = Some(match acc {
                        None => block,
                        Some(a) => {
                            self.bin_idx(a, block).ok_or_else(|| EvalError::Undefined {
                                witness: ScatteredTerm::concat(vec![
                                    ScatteredTerm::letter(self.id(a)),
                                    ScatteredTerm::letter(self.id(block)),
                                ]),
                            })?
                        }
                    });
                }
                acc.ok_or(EvalError::Undefined {
                    witness: t.clone(),
                })
            }
            ScatteredTerm::StarPower(b) => {
                if self.omega_star.is_none() {
                    return Err(EvalError::Unsupported {
                        what: "omega*-power without an omega_star table".to_owned(),
                    });
                }
                let v = self.eval_idx(b)?;
                self.omega_star_idx(v).unwrap().ok_or_else(|| EvalError::Undefined {
                    witness: ScatteredTerm::star(ScatteredTerm::letter(self.id(v))),
                })
            }
        }
    }
}

/// Product of an encodable ordinal word over the carrier: `π(letter)` is
/// the letter, concatenations fold through the binary table, `w^ω` is the
/// ω-power table, and `w^(ω^(k+1)) = (w^(ω^k))^ω`. Exponents must stay
/// below ω^ω.
pub fn pi_eval(alg: &FinAlgebra, w: &WordTerm) -> EvalOutcome {
    alg.eval_idx(w.as_term()).map(|i| alg.id(i).to_owned())
}

/// Like `pi_eval` but accepting ω*-powers when the algebra carries an
/// omega_star table.
pub fn pi_eval_scattered(alg: &FinAlgebra, t: &ScatteredTerm) -> EvalOutcome {
    alg.eval_idx(t).map(|i| alg.id(i).to_owned())
}

impl Algebra for FinAlgebra {
    fn describe(&self) -> String {
        format!("table algebra on {} elements", self.ids.len())
    }

    fn alphabet(&self) -> Vec<String> {
        self.ids.clone()
    }

    fn carrier(&self) -> Option<Vec<String>> {
        Some(self.ids.clone())
    }

    fn eval(&self, t: &ScatteredTerm) -> EvalOutcome {
        self.eval_idx(t).map(|i| self.id(i).to_owned())
    }

    fn empty_product_id(&self) -> Option<String> {
        self.empty_product.map(|i| self.id(i).to_owned())
    }

    fn claimed_class(&self) -> CompletenessClass {
        self.class
    }

    fn supports_scattered(&self) -> bool {
        self.omega_star.is_some()
    }

    fn has_omega_power(&self) -> bool {
        !self.omega_table_is_empty()
    }

    fn sort_partition(&self) -> Option<(Vec<String>, Vec<String>)> {
        self.sorts.as_ref().map(|sorts| {
            let mut plus = Vec::new();
            let mut om = Vec::new();
            for (i, s) in sorts.iter().enumerate() {
                match s {
                    Sort::Plus => plus.push(self.ids[i].clone()),
                    Sort::Omega => om.push(self.ids[i].clone()),
                }
            }
            (plus, om)
        })
    }
}

/// Evaluates a labeled order in an algebra through an embedding of its
/// labels into the carrier: the unique homomorphism determined by the
/// letter images, whenever the algebra's partial products cover it.
pub fn evaluate_in(
    t: &crate::word::LabeledOrder,
    alg: &dyn Algebra,
    embed: &BTreeMap<String, String>,
) -> EvalOutcome {
    let word = t
        .map_letters(&|l| embed.get(l).cloned())
        .map_err(|l| EvalError::UnknownElement { id: l })?;
    alg.eval(&word)
}

// ---------------------------------------------------------------------------
// Canonical expansion of declared well-orders (labeling invariance)

/// Where a block of positions sits inside the declared well-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeySpec {
    /// Finitely many explicit keys.
    List(Vec<Ordinal>),
    /// The infinite arithmetic progression `start, start+step, ...`.
    Stride { start: u64, step: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexBlock {
    pub label: String,
    pub keys: KeySpec,
    pub letter: String,
}

/// A labeled well-order presentation: finitely many blocks, each a finite
/// key list or an infinite stride of finite keys, each carrying one letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedSeq {
    pub blocks: Vec<IndexBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpandError {
    Overlap(String, String),
    BadStride(String),
    UnknownLabel(String),
    TooLarge,
    Eval(EvalError),
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::Overlap(a, b) => {
                write!(f, "blocks '{}' and '{}' declare a common position", a, b)
            }
            ExpandError::BadStride(l) => write!(f, "block '{}' has a zero stride", l),
            ExpandError::UnknownLabel(l) => write!(f, "label '{}' missing from the order", l),
            ExpandError::TooLarge => write!(f, "declared order too large to canonicalize"),
            ExpandError::Eval(e) => write!(f, "{}", e),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Canonicalizes a declared well-order to the word it is uniquely order
/// isomorphic to, then evaluates through `pi_eval`. The result depends
/// only on the order type and the letters, never on labels or on the
/// particular key values chosen to present the order.
pub fn canonical_expand(alg: &FinAlgebra, seq: &IndexedSeq) -> Result<String, ExpandError> {
    let mut strides: Vec<(u64, u64, &IndexBlock)> = Vec::new();
    let mut finite_keys: Vec<(u64, &IndexBlock)> = Vec::new();
    let mut infinite_keys: Vec<(Ordinal, &IndexBlock)> = Vec::new();
    for b in &seq.blocks {
        match &b.keys {
            KeySpec::Stride { start, step } => {
                if *step == 0 {
                    return Err(ExpandError::BadStride(b.label.clone()));
                }
                strides.push((*start, *step, b));
            }
            KeySpec::List(keys) => {
                for k in keys {
                    match k.as_u64() {
                        Some(v) => finite_keys.push((v, b)),
                        None => infinite_keys.push((k.clone(), b)),
                    }
                }
            }
        }
    }
    // distinctness of the declared positions
    for i in 0..strides.len() {
        for j in i + 1..strides.len() {
            let (s1, d1, b1) = strides[i];
            let (s2, d2, b2) = strides[j];
            let g = gcd(d1, d2);
            if s1 % g == s2 % g {
                return Err(ExpandError::Overlap(b1.label.clone(), b2.label.clone()));
            }
        }
    }
    finite_keys.sort_by_key(|(k, _)| *k);
    for w in finite_keys.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ExpandError::Overlap(
                w[0].1.label.clone(),
                w[1].1.label.clone(),
            ));
        }
    }
    for (k, b) in &finite_keys {
        for (s, d, sb) in &strides {
            if k >= s && (k - s) % d == 0 {
                return Err(ExpandError::Overlap(b.label.clone(), sb.label.clone()));
            }
        }
    }
    infinite_keys.sort_by(|a, b| a.0.cmp(&b.0));
    for w in infinite_keys.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ExpandError::Overlap(
                w[0].1.label.clone(),
                w[1].1.label.clone(),
            ));
        }
    }

    let letter_at_key = |k: u64| -> Option<&str> {
        if let Ok(i) = finite_keys.binary_search_by_key(&k, |(v, _)| *v) {
            return Some(&finite_keys[i].1.letter);
        }
        strides
            .iter()
            .find(|(s, d, _)| k >= *s && (k - s) % d == 0)
            .map(|(_, _, b)| b.letter.as_str())
    };

    let mut parts: Vec<ScatteredTerm> = Vec::new();
    if strides.is_empty() {
        for (_, b) in &finite_keys {
            parts.push(ScatteredTerm::letter(b.letter.clone()));
        }
    } else {
        let max_start = strides.iter().map(|(s, _, _)| *s).max().unwrap_or(0);
        let max_finite = finite_keys.last().map(|(k, _)| *k).unwrap_or(0);
        let head_end = max_start.max(max_finite) + 1;
        let mut lcm: u64 = 1;
        for (_, d, _) in &strides {
            lcm = lcm / gcd(lcm, *d) * *d;
            if lcm > 100_000 {
                return Err(ExpandError::TooLarge);
            }
        }
        if head_end > 1_000_000 {
            return Err(ExpandError::TooLarge);
        }
        for k in 0..head_end {
            if let Some(l) = letter_at_key(k) {
                parts.push(ScatteredTerm::letter(l));
            }
        }
        let mut period: Vec<ScatteredTerm> = Vec::new();
        for k in head_end..head_end + lcm {
            if let Some(l) = letter_at_key(k) {
                period.push(ScatteredTerm::letter(l));
            }
        }
        parts.push(ScatteredTerm::power(
            ScatteredTerm::concat(period),
            Ordinal::omega(),
        ));
    }
    for (_, b) in &infinite_keys {
        parts.push(ScatteredTerm::letter(b.letter.clone()));
    }
    let word = ScatteredTerm::concat(parts).normalize();
    let word = WordTerm::try_from(word).expect("expansion is star free");
    pi_eval(alg, &word).map_err(ExpandError::Eval)
}

/// Finite convenience form: distinct labeled positions with their letters,
/// plus the declared order as the ascending list of labels.
pub fn canonical_expand_positions(
    alg: &FinAlgebra,
    positions: &[(String, String)],
    order: &[String],
) -> Result<String, ExpandError> {
    let rank: BTreeMap<&str, u64> = order
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u64))
        .collect();
    let mut blocks = Vec::with_capacity(positions.len());
    for (label, letter) in positions {
        let key = *rank
            .get(label.as_str())
            .ok_or_else(|| ExpandError::UnknownLabel(label.clone()))?;
        blocks.push(IndexBlock {
            label: label.clone(),
            keys: KeySpec::List(vec![Ordinal::from(key)]),
            letter: letter.clone(),
        });
    }
    canonical_expand(alg, &IndexedSeq { blocks })
}

// ---------------------------------------------------------------------------
// Ternary tables and the semigroup they induce

/// Result of extracting a binary operation from a total ternary table.
#[derive(Clone, Debug)]
pub enum TernaryResult {
    /// The lexicographically least consistent binary table, with the
    /// number of consistent tables overall.
    Consistent {
        algebra: FinAlgebra,
        multiplicity: u64,
    },
    /// No binary operation matches; the triple names a constraint that
    /// failed in every branch of the search.
    Inconsistent { witness: (String, String, String) },
}

/// Searches for a total binary `bin` with
/// `tern(a,b,c) = bin(bin(a,b),c) = bin(a,bin(b,c))` for all triples.
pub fn check_ternary_to_assoc(ids: &[String], tern: &dyn Fn(usize, usize, usize) -> usize) -> TernaryResult {
    let n = ids.len();
    struct Search<'a> {
        n: usize,
        tern: &'a dyn Fn(usize, usize, usize) -> usize,
        solutions: u64,
        first: Option<Vec<usize>>,
        conflict: (usize, usize, usize),
    }
    impl Search<'_> {
        /// Assigns `cell = val` and propagates the row/column constraints;
        /// returns false on conflict.
        fn assign(&mut self, table: &mut Vec<Option<usize>>, cell: (usize, usize), val: usize) -> bool {
            let (a, b) = cell;
            match table[a * self.n + b] {
                Some(v) => return v == val,
                None => table[a * self.n + b] = Some(val),
            }
            // bin(a,b) = val forces row val: bin(val, c) = tern(a,b,c)
            for c in 0..self.n {
                let want = (self.tern)(a, b, c);
                if !self.assign(table, (val, c), want) {
                    self.conflict = (a, b, c);
                    return false;
                }
            }
            // bin(b', c') = val forces column val: bin(a', val) = tern(a',b',c')
            // handled symmetrically: bin(a, b)=val means for all x:
            // bin(x, val) = tern(x, a, b)
            for x in 0..self.n {
                let want = (self.tern)(x, a, b);
                if !self.assign(table, (x, val), want) {
                    self.conflict = (x, a, b);
                    return false;
                }
            }
            true
        }

        fn solve(&mut self, table: Vec<Option<usize>>) {
            if let Some(pos) = table.iter().position(|v| v.is_none()) {
                let cell = (pos / self.n, pos % self.n);
                for val in 0..self.n {
                    let mut next = table.clone();
                    if self.assign(&mut next, cell, val) {
                        self.solve(next);
                    }
                }
            } else {
                // complete: verify every constraint before accepting
                let bin = |a: usize, b: usize| table[a * self.n + b].unwrap();
                for a in 0..self.n {
                    for b in 0..self.n {
                        for c in 0..self.n {
                            let t = (self.tern)(a, b, c);
                            if bin(bin(a, b), c) != t || bin(a, bin(b, c)) != t {
                                self.conflict = (a, b, c);
                                return;
                            }
                        }
                    }
                }
                self.solutions += 1;
                if self.first.is_none() {
                    self.first = Some(table.iter().map(|v| v.unwrap()).collect());
                }
            }
        }
    }
    let mut search = Search {
        n,
        tern,
        solutions: 0,
        first: None,
        conflict: (0, 0, 0),
    };
    search.solve(vec![None; n * n]);
    match search.first {
        Some(table) => {
            let algebra = FinAlgebra::new(
                ids.to_vec(),
                table.into_iter().map(Some).collect(),
                vec![None; n],
                None,
                None,
                None,
                CompletenessClass::LtOmega,
            )
            .expect("extracted table is well formed");
            TernaryResult::Consistent {
                algebra,
                multiplicity: search.solutions,
            }
        }
        None => {
            let (a, b, c) = search.conflict;
            TernaryResult::Inconsistent {
                witness: (ids[a].clone(), ids[b].clone(), ids[c].clone()),
            }
        }
    }
}

// convenience constructors used across the crate and its tests
impl FinAlgebra {
    /// Builds a table algebra from id-level entries.
    #[allow(clippy::too_many_arguments)]
    pub fn from_entries(
        ids: Vec<String>,
        bin: &[((&str, &str), &str)],
        omega: &[(&str, &str)],
        omega_star: Option<&[(&str, &str)]>,
        sorts: Option<(&[&str], &[&str])>,
        empty: Option<&str>,
        class: CompletenessClass,
    ) -> Result<FinAlgebra, AlgebraError> {
        let n = ids.len();
        let index: BTreeMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let look = |s: &str| index.get(s).copied().ok_or_else(|| AlgebraError::BadId(s.to_owned()));
        let mut bt = vec![None; n * n];
        for ((a, b), v) in bin {
            bt[look(a)? * n + look(b)?] = Some(look(v)?);
        }
        let mut ot = vec![None; n];
        for (a, v) in omega {
            ot[look(a)?] = Some(look(v)?);
        }
        let st = match omega_star {
            None => None,
            Some(entries) => {
                let mut t = vec![None; n];
                for (a, v) in entries {
                    t[look(a)?] = Some(look(v)?);
                }
                Some(t)
            }
        };
        let sorts = match sorts {
            None => None,
            Some((plus, om)) => {
                let mut s = vec![None; n];
                for p in plus {
                    s[look(p)?] = Some(Sort::Plus);
                }
                for o in om {
                    s[look(o)?] = Some(Sort::Omega);
                }
                if s.iter().any(|x| x.is_none()) {
                    return Err(AlgebraError::SortViolation(
                        "sorts must partition the carrier".to_owned(),
                    ));
                }
                Some(s.into_iter().map(|x| x.unwrap()).collect())
            }
        };
        let empty = match empty {
            None => None,
            Some(e) => Some(look(e)?),
        };
        FinAlgebra::new(ids, bt, ot, st, sorts, empty, class)
    }
}
