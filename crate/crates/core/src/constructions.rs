//! Semigroup-building recipes: Ω-completion, identity adjunction, power-set
//! algebras, direct products, convex restriction, quotients by compatible
//! maps, endpoint evaluators on scattered shapes, inflationary map algebras,
//! and exact rational series.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    Algebra, AlgebraError, CompletenessClass, EvalError, EvalOutcome, FinAlgebra,
};
use crate::audit::{check_axiom, AxiomId, Witness};
use crate::ordinal::Ordinal;
use crate::word::{render, ScatteredTerm};

#[derive(Clone, Debug)]
pub enum ConstructionError {
    /// The completability condition failed; the witness regrouping is
    /// defined while the direct product is not.
    NarrViolated(Box<Witness>),
    /// The base operation is not total where totality is required.
    NotTotal { a: String, b: String },
    /// The base operation is not associative.
    NotAssociative { a: String, b: String, c: String },
    /// The `a*b*c = a*c` law required by the endpoint evaluator fails.
    IdentityFails { a: String, b: String, c: String },
    EmptySubset,
    /// Two pointwise phi-equal sequences with defined products have
    /// different images.
    ConditionStarFails(Box<StarWitness>),
    NotInflationary { map: String, at: String },
    BadPoset(String),
    TooLarge(String),
    Algebra(AlgebraError),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::NarrViolated(w) => write!(f, "completability (narr) fails: {}", w),
            ConstructionError::NotTotal { a, b } => {
                write!(f, "binary product {} * {} is not defined", a, b)
            }
            ConstructionError::NotAssociative { a, b, c } => {
                write!(f, "associativity fails on ({}, {}, {})", a, b, c)
            }
            ConstructionError::IdentityFails { a, b, c } => {
                write!(f, "a*b*c = a*c fails on ({}, {}, {})", a, b, c)
            }
            ConstructionError::EmptySubset => write!(f, "restriction subset must be nonempty"),
            ConstructionError::ConditionStarFails(w) => {
                write!(f, "condition (*) fails: {}", w)
            }
            ConstructionError::NotInflationary { map, at } => {
                write!(f, "map {} is not inflationary at {}", map, at)
            }
            ConstructionError::BadPoset(s) => write!(f, "invalid poset: {}", s),
            ConstructionError::TooLarge(s) => write!(f, "construction too large: {}", s),
            ConstructionError::Algebra(e) => write!(f, "{}", e),
        }
    }
}

impl From<AlgebraError> for ConstructionError {
    fn from(e: AlgebraError) -> Self {
        ConstructionError::Algebra(e)
    }
}

fn fresh_id(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|t| t == base) {
        return base.to_owned();
    }
    let mut k = 1u64;
    loop {
        let cand = format!("{}{}", base, k);
        if !taken.iter().any(|t| t == &cand) {
            return cand;
        }
        k += 1;
    }
}

// ---------------------------------------------------------------------------
// Ω-completion (adding an absorbing element at infinity)

/// Extends a partial algebra to a total one by sending every previously
/// undefined encodable product to a fresh fully absorbing element Ω.
/// Requires the completability condition: a regrouping with all parts
/// defined must already have a defined direct product.
pub fn omega_completion(
    alg: &FinAlgebra,
    budget: u64,
    seed: u64,
) -> Result<FinAlgebra, ConstructionError> {
    let narr = check_axiom(alg, &AxiomId::Narr, budget, seed)
        .map_err(|e| ConstructionError::TooLarge(format!("narr audit failed to run: {}", e)))?;
    if let Some(w) = narr.witness {
        return Err(ConstructionError::NarrViolated(Box::new(w)));
    }
    let n = alg.size();
    let mut ids = alg.ids().to_vec();
    let omega_id = fresh_id(&ids, "Omega");
    ids.push(omega_id);
    let big = ids.len();
    let o = big - 1;
    let mut bin = vec![Some(o); big * big];
    for a in 0..n {
        for b in 0..n {
            bin[a * big + b] = Some(alg.bin_idx(a, b).unwrap_or(o));
        }
    }
    let mut omega_t = vec![Some(o); big];
    for a in 0..n {
        omega_t[a] = Some(alg.omega_idx(a).unwrap_or(o));
    }
    // every encodable product becomes defined, ω*-powers included
    let mut omega_star = vec![Some(o); big];
    for a in 0..n {
        omega_star[a] = Some(
            alg.omega_star_idx(a)
                .and_then(|entry| entry)
                .unwrap_or(o),
        );
    }
    Ok(FinAlgebra::new(
        ids,
        bin,
        omega_t,
        Some(omega_star),
        None,
        alg.empty_product_idx(),
        CompletenessClass::CompleteOnEncodable,
    )?)
}

// ---------------------------------------------------------------------------
// Adjoining a complete identity

/// Adds a fresh element `e` acting as a complete identity: products with
/// `e` deleted keep their value, the all-`e` product is `e`, and the empty
/// product becomes `e` (displacing any previous empty product).
pub fn adjoin_identity(alg: &FinAlgebra) -> FinAlgebra {
    let n = alg.size();
    let mut ids = alg.ids().to_vec();
    let e_id = fresh_id(&ids, "e");
    ids.push(e_id);
    let big = ids.len();
    let e = big - 1;
    let mut bin = vec![None; big * big];
    for a in 0..n {
        for b in 0..n {
            bin[a * big + b] = alg.bin_idx(a, b);
        }
    }
    for a in 0..big {
        bin[a * big + e] = Some(a);
        bin[e * big + a] = Some(a);
    }
    let mut omega_t = vec![None; big];
    for a in 0..n {
        omega_t[a] = alg.omega_idx(a);
    }
    omega_t[e] = Some(e);
    let mut star_t = vec![None; big];
    if alg.has_omega_star() {
        for a in 0..n {
            star_t[a] = alg.omega_star_idx(a).unwrap();
        }
    }
    star_t[e] = Some(e);
    FinAlgebra::new(ids, bin, omega_t, Some(star_t), None, Some(e), alg.class())
        .expect("identity adjunction preserves validity")
}

// ---------------------------------------------------------------------------
// Power-set constructions

const POWERSET_MAX: usize = 6;

fn subset_id(ids: &[String], mask: u64) -> String {
    let mut members: Vec<&str> = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        if mask & (1 << i) != 0 {
            members.push(id);
        }
    }
    members.sort_unstable();
    let mut s = String::from("{");
    for (i, m) in members.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(m);
    }
    s.push('}');
    s
}

fn require_total_assoc(s: &FinAlgebra) -> Result<(), ConstructionError> {
    let n = s.size();
    for a in 0..n {
        for b in 0..n {
            if s.bin_idx(a, b).is_none() {
                return Err(ConstructionError::NotTotal {
                    a: s.id(a).to_owned(),
                    b: s.id(b).to_owned(),
                });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ab = s.bin_idx(a, b).unwrap();
                let bc = s.bin_idx(b, c).unwrap();
                if s.bin_idx(ab, c) != s.bin_idx(a, bc) {
                    return Err(ConstructionError::NotAssociative {
                        a: s.id(a).to_owned(),
                        b: s.id(b).to_owned(),
                        c: s.id(c).to_owned(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Closure of the subset `mask` under right multiplication: the values of
/// all nonempty finite pick products. Saturates within `2n` rounds; the
/// bound is verified afterwards rather than trusted.
fn pick_closure(s: &FinAlgebra, mask: u64) -> u64 {
    let n = s.size();
    let step = |set: u64| -> u64 {
        let mut next = set;
        for a in 0..n {
            if set & (1 << a) == 0 {
                continue;
            }
            for b in 0..n {
                if mask & (1 << b) == 0 {
                    continue;
                }
                if let Some(v) = s.bin_idx(a, b) {
                    next |= 1 << v;
                }
            }
        }
        next
    };
    let mut closure = mask;
    for _ in 0..2 * n {
        let next = step(closure);
        if next == closure {
            break;
        }
        closure = next;
    }
    assert_eq!(step(closure), closure, "pick closure failed to saturate");
    closure
}

/// Power set of a classical semigroup with the pick-product operation:
/// the product over a word collects every finite product along strictly
/// increasing positions. `S` itself is fully absorbing.
pub fn powerset_concat(
    s: &FinAlgebra,
    nonempty_only: bool,
) -> Result<FinAlgebra, ConstructionError> {
    require_total_assoc(s)?;
    let n = s.size();
    if n > POWERSET_MAX {
        return Err(ConstructionError::TooLarge(format!(
            "power set of {} elements",
            n
        )));
    }
    let masks: Vec<u64> = (0..(1u64 << n))
        .filter(|m| !nonempty_only || *m != 0)
        .collect();
    let ids: Vec<String> = masks.iter().map(|m| subset_id(s.ids(), *m)).collect();
    let pos: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let k = masks.len();
    let mut bin = vec![None; k * k];
    for (i, &x) in masks.iter().enumerate() {
        for (j, &y) in masks.iter().enumerate() {
            // picks from the two-position word: x alone, y alone, or x then y
            let mut out = x | y;
            for a in 0..n {
                if x & (1 << a) == 0 {
                    continue;
                }
                for b in 0..n {
                    if y & (1 << b) == 0 {
                        continue;
                    }
                    out |= 1 << s.bin_idx(a, b).unwrap();
                }
            }
            bin[i * k + j] = Some(pos[&out]);
        }
    }
    let mut omega_t = vec![None; k];
    let mut star_t = vec![None; k];
    for (i, &x) in masks.iter().enumerate() {
        // picks from an ω (or ω*) word over X are exactly the finite pick
        // products, i.e. the closure
        let c = pick_closure(s, x);
        omega_t[i] = Some(pos[&c]);
        star_t[i] = Some(pos[&c]);
    }
    let empty = if nonempty_only { None } else { Some(pos[&0]) };
    Ok(FinAlgebra::new(
        ids,
        bin,
        omega_t,
        Some(star_t),
        None,
        empty,
        CompletenessClass::CompleteOnEncodable,
    )?)
}

/// Power set of a partial infinitary semigroup with the choice-product
/// operation: the lifted product collects the defined products over all
/// componentwise choices. The empty set is fully absorbing. Requires the
/// completability condition on the base.
pub fn powerset_lift(
    alg: &FinAlgebra,
    budget: u64,
    seed: u64,
) -> Result<FinAlgebra, ConstructionError> {
    let narr = check_axiom(alg, &AxiomId::Narr, budget, seed)
        .map_err(|e| ConstructionError::TooLarge(format!("narr audit failed to run: {}", e)))?;
    if let Some(w) = narr.witness {
        return Err(ConstructionError::NarrViolated(Box::new(w)));
    }
    let n = alg.size();
    if n > POWERSET_MAX {
        return Err(ConstructionError::TooLarge(format!(
            "power set of {} elements",
            n
        )));
    }
    let k = 1usize << n;
    // the carrier is all masks in numeric order, so a mask is its index
    let ids: Vec<String> = (0..k as u64).map(|m| subset_id(alg.ids(), m)).collect();
    // left-fold values of nonempty finite choice words over the mask
    let fold_values = |mask: u64| -> u64 {
        let mut vals = mask;
        loop {
            let mut next = vals;
            for a in 0..n {
                if vals & (1 << a) == 0 {
                    continue;
                }
                for b in 0..n {
                    if mask & (1 << b) == 0 {
                        continue;
                    }
                    if let Some(v) = alg.bin_idx(a, b) {
                        next |= 1 << v;
                    }
                }
            }
            if next == vals {
                return vals;
            }
            vals = next;
        }
    };
    let mut bin = vec![None; k * k];
    for x in 0..k as u64 {
        for y in 0..k as u64 {
            let mut out = 0u64;
            for a in 0..n {
                if x & (1 << a) == 0 {
                    continue;
                }
                for b in 0..n {
                    if y & (1 << b) == 0 {
                        continue;
                    }
                    if let Some(v) = alg.bin_idx(a, b) {
                        out |= 1 << v;
                    }
                }
            }
            bin[(x as usize) * k + y as usize] = Some(out as usize);
        }
    }
    let mut omega_t = vec![None; k];
    for x in 0..k as u64 {
        // ultimately periodic choice words u·g^ω: values omega(g) and
        // bin(f, omega(g)) over finite choice values f, g
        let f = fold_values(x);
        let mut out = 0u64;
        for g in 0..n {
            if f & (1 << g) == 0 {
                continue;
            }
            if let Some(og) = alg.omega_idx(g) {
                out |= 1 << og;
                for a in 0..n {
                    if f & (1 << a) == 0 {
                        continue;
                    }
                    if let Some(v) = alg.bin_idx(a, og) {
                        out |= 1 << v;
                    }
                }
            }
        }
        omega_t[x as usize] = Some(out as usize);
    }
    let star_t = if alg.has_omega_star() {
        let mut t = vec![None; k];
        for x in 0..k as u64 {
            let f = fold_values(x);
            let mut out = 0u64;
            for g in 0..n {
                if f & (1 << g) == 0 {
                    continue;
                }
                if let Some(sg) = alg.omega_star_idx(g).unwrap() {
                    out |= 1 << sg;
                    for a in 0..n {
                        if f & (1 << a) == 0 {
                            continue;
                        }
                        if let Some(v) = alg.bin_idx(sg, a) {
                            out |= 1 << v;
                        }
                    }
                }
            }
            t[x as usize] = Some(out as usize);
        }
        Some(t)
    } else {
        None
    };
    let empty = alg.empty_product_idx().map(|e| 1usize << e);
    Ok(FinAlgebra::new(
        ids,
        bin,
        omega_t,
        star_t,
        None,
        empty,
        CompletenessClass::CompleteOnEncodable,
    )?)
}

// ---------------------------------------------------------------------------
// Direct products

const PRODUCT_MAX: usize = 4096;

/// Pointwise product: a product of tuples is defined iff it is defined in
/// every coordinate. The empty family gives the one-element algebra on the
/// empty tuple.
pub fn direct_product(algs: &[&FinAlgebra]) -> Result<FinAlgebra, ConstructionError> {
    if algs.is_empty() {
        let ids = vec!["<>".to_owned()];
        return Ok(FinAlgebra::new(
            ids,
            vec![Some(0)],
            vec![Some(0)],
            Some(vec![Some(0)]),
            None,
            Some(0),
            CompletenessClass::CompleteOnEncodable,
        )?);
    }
    let total: usize = algs.iter().map(|a| a.size()).product();
    if total > PRODUCT_MAX {
        return Err(ConstructionError::TooLarge(format!(
            "direct product with {} tuples",
            total
        )));
    }
    let sizes: Vec<usize> = algs.iter().map(|a| a.size()).collect();
    let unrank = |mut r: usize| -> Vec<usize> {
        let mut t = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            t[i] = r % sizes[i];
            r /= sizes[i];
        }
        t
    };
    let rank = |t: &[usize]| -> usize {
        let mut r = 0;
        for (i, &x) in t.iter().enumerate() {
            r = r * sizes[i] + x;
        }
        r
    };
    let ids: Vec<String> = (0..total)
        .map(|r| {
            let t = unrank(r);
            let mut s = String::from("<");
            for (i, &x) in t.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(algs[i].id(x));
            }
            s.push('>');
            s
        })
        .collect();
    let pointwise = |xs: &[usize], get: &dyn Fn(usize, usize) -> Option<usize>| -> Option<usize> {
        let mut out = Vec::with_capacity(sizes.len());
        for (i, &x) in xs.iter().enumerate() {
            out.push(get(i, x)?);
        }
        Some(rank(&out))
    };
    let mut bin = vec![None; total * total];
    for a in 0..total {
        let ta = unrank(a);
        for b in 0..total {
            let tb = unrank(b);
            let mut out = Vec::with_capacity(sizes.len());
            let mut ok = true;
            for i in 0..sizes.len() {
                match algs[i].bin_idx(ta[i], tb[i]) {
                    Some(v) => out.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                bin[a * total + b] = Some(rank(&out));
            }
        }
    }
    let mut omega_t = vec![None; total];
    for a in 0..total {
        let ta = unrank(a);
        omega_t[a] = pointwise(&ta, &|i, x| algs[i].omega_idx(x));
    }
    let star_t = if algs.iter().any(|a| a.has_omega_star()) {
        let mut t = vec![None; total];
        for a in 0..total {
            let ta = unrank(a);
            t[a] = pointwise(&ta, &|i, x| algs[i].omega_star_idx(x).flatten());
        }
        Some(t)
    } else {
        None
    };
    let empty = {
        let mut out = Vec::with_capacity(sizes.len());
        let mut ok = true;
        for a in algs {
            match a.empty_product_idx() {
                Some(v) => out.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            Some(rank(&out))
        } else {
            None
        }
    };
    let class = algs
        .iter()
        .map(|a| a.class())
        .min()
        .unwrap_or(CompletenessClass::CompleteOnEncodable);
    Ok(FinAlgebra::new(ids, bin, omega_t, star_t, None, empty, class)?)
}

// ---------------------------------------------------------------------------
// Convex restriction

/// Restriction of an algebra to a subset: a product is defined iff every
/// convex subproduct is defined in the base and lands in the subset. This
/// needs evaluation-level checking, so it is a structured instance rather
/// than a table.
pub struct RestrictedAlgebra {
    base: FinAlgebra,
    allowed: BTreeSet<String>,
}

pub fn restrict(
    alg: &FinAlgebra,
    allowed: &[String],
) -> Result<RestrictedAlgebra, ConstructionError> {
    if allowed.is_empty() {
        return Err(ConstructionError::EmptySubset);
    }
    for t in allowed {
        if alg.idx(t).is_none() {
            return Err(ConstructionError::Algebra(AlgebraError::BadId(t.clone())));
        }
    }
    Ok(RestrictedAlgebra {
        base: alg.clone(),
        allowed: allowed.iter().cloned().collect(),
    })
}

const CONVEX_FAMILY_CAP: usize = 4096;

impl RestrictedAlgebra {
    pub fn base(&self) -> &FinAlgebra {
        &self.base
    }

    fn cycle_bound(&self) -> u64 {
        self.base.size() as u64 + 1
    }

    /// Structural prefixes of a term, with power counts taken to the
    /// value-cycle bound.
    fn prefixes(&self, t: &ScatteredTerm, out: &mut BTreeSet<ScatteredTerm>) {
        if out.len() > CONVEX_FAMILY_CAP {
            return;
        }
        match t {
            ScatteredTerm::Empty => {}
            ScatteredTerm::Letter(_) => {
                out.insert(t.clone());
            }
            ScatteredTerm::Concat(cs) => {
                for i in 0..cs.len() {
                    let mut head: Vec<ScatteredTerm> = cs[..i].to_vec();
                    let mut subs = BTreeSet::new();
                    self.prefixes(&cs[i], &mut subs);
                    for p in subs {
                        let mut parts = head.clone();
                        parts.push(p);
                        out.insert(ScatteredTerm::concat(parts));
                    }
                    head.push(cs[i].clone());
                    out.insert(ScatteredTerm::concat(head));
                }
            }
            ScatteredTerm::Power(b, e) => {
                let mut subs = BTreeSet::new();
                self.prefixes(b, &mut subs);
                for k in 0..=self.cycle_bound() {
                    let kk = Ordinal::from(k);
                    if &kk >= e {
                        break;
                    }
                    let head = ScatteredTerm::power(b.as_ref().clone(), kk);
                    for p in &subs {
                        out.insert(ScatteredTerm::concat(vec![head.clone(), p.clone()]));
                    }
                }
                for cut in exponent_prefixes(e) {
                    out.insert(ScatteredTerm::power(b.as_ref().clone(), cut));
                }
                out.insert(t.clone());
            }
            ScatteredTerm::StarPower(b) => {
                // initial segments of an ω* stack are ω* stacks again,
                // possibly with a partial copy at the end
                let mut subs = BTreeSet::new();
                self.prefixes(b, &mut subs);
                out.insert(t.clone());
                for p in subs {
                    out.insert(ScatteredTerm::concat(vec![t.clone(), p]));
                }
            }
        }
    }

    fn suffixes(&self, t: &ScatteredTerm, out: &mut BTreeSet<ScatteredTerm>) {
        if out.len() > CONVEX_FAMILY_CAP {
            return;
        }
        match t {
            ScatteredTerm::Empty => {}
            ScatteredTerm::Letter(_) => {
                out.insert(t.clone());
            }
            ScatteredTerm::Concat(cs) => {
                for i in 0..cs.len() {
                    let tail: Vec<ScatteredTerm> = cs[i + 1..].to_vec();
                    let mut subs = BTreeSet::new();
                    self.suffixes(&cs[i], &mut subs);
                    for p in subs {
                        let mut parts = vec![p];
                        parts.extend(tail.iter().cloned());
                        out.insert(ScatteredTerm::concat(parts));
                    }
                    let mut whole = vec![cs[i].clone()];
                    whole.extend(tail);
                    out.insert(ScatteredTerm::concat(whole));
                }
            }
            ScatteredTerm::Power(b, e) => {
                let mut subs = BTreeSet::new();
                self.suffixes(b, &mut subs);
                if e.is_limit() {
                    // final segments of a limit power are the power again,
                    // possibly with a leading partial copy
                    out.insert(t.clone());
                    for s in &subs {
                        out.insert(ScatteredTerm::concat(vec![s.clone(), t.clone()]));
                    }
                } else {
                    for k in 0..=self.cycle_bound() {
                        let kk = Ordinal::from(k);
                        if &kk >= e {
                            break;
                        }
                        let tail = ScatteredTerm::power(b.as_ref().clone(), kk);
                        for s in &subs {
                            out.insert(ScatteredTerm::concat(vec![s.clone(), tail.clone()]));
                        }
                    }
                    out.insert(t.clone());
                }
            }
            ScatteredTerm::StarPower(b) => {
                let mut subs = BTreeSet::new();
                self.suffixes(b, &mut subs);
                for k in 1..=self.cycle_bound() {
                    let tail = ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(k));
                    out.insert(tail.clone());
                    for s in &subs {
                        out.insert(ScatteredTerm::concat(vec![s.clone(), tail.clone()]));
                    }
                }
                for s in subs {
                    out.insert(s);
                }
                out.insert(t.clone());
            }
        }
    }

    /// The documented convex-subword family: the term itself, child
    /// ranges, boundary-crossing windows, and power windows up to the
    /// value-cycle bound.
    fn convex_family(&self, t: &ScatteredTerm, out: &mut BTreeSet<ScatteredTerm>) {
        if out.len() > CONVEX_FAMILY_CAP {
            return;
        }
        out.insert(t.clone());
        match t {
            ScatteredTerm::Empty | ScatteredTerm::Letter(_) => {}
            ScatteredTerm::Concat(cs) => {
                for c in cs {
                    self.convex_family(c, out);
                }
                for i in 0..cs.len() {
                    for j in i..cs.len() {
                        out.insert(ScatteredTerm::concat(cs[i..=j].to_vec()));
                    }
                }
                for i in 0..cs.len() {
                    let mut sufs = BTreeSet::new();
                    self.suffixes(&cs[i], &mut sufs);
                    for j in i + 1..cs.len() {
                        let mut prefs = BTreeSet::new();
                        self.prefixes(&cs[j], &mut prefs);
                        let middle: Vec<ScatteredTerm> = cs[i + 1..j].to_vec();
                        for s in &sufs {
                            for p in &prefs {
                                if out.len() > CONVEX_FAMILY_CAP {
                                    return;
                                }
                                let mut parts = vec![s.clone()];
                                parts.extend(middle.iter().cloned());
                                parts.push(p.clone());
                                out.insert(ScatteredTerm::concat(parts));
                            }
                        }
                    }
                }
            }
            ScatteredTerm::Power(b, e) => {
                self.convex_family(b, out);
                for k in 1..=self.cycle_bound() {
                    let kk = Ordinal::from(k);
                    if &kk > e {
                        break;
                    }
                    out.insert(ScatteredTerm::power(b.as_ref().clone(), kk));
                }
                let mut sufs = BTreeSet::new();
                self.suffixes(b, &mut sufs);
                let mut prefs = BTreeSet::new();
                self.prefixes(b, &mut prefs);
                for k in 0..=2u64 {
                    let mid = ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(k));
                    for s in &sufs {
                        for p in &prefs {
                            if out.len() > CONVEX_FAMILY_CAP {
                                return;
                            }
                            out.insert(ScatteredTerm::concat(vec![
                                s.clone(),
                                mid.clone(),
                                p.clone(),
                            ]));
                        }
                    }
                }
                if !e.is_finite() {
                    out.insert(ScatteredTerm::power(b.as_ref().clone(), Ordinal::omega()));
                    for s in &sufs {
                        out.insert(ScatteredTerm::concat(vec![
                            s.clone(),
                            ScatteredTerm::power(b.as_ref().clone(), Ordinal::omega()),
                        ]));
                    }
                }
            }
            ScatteredTerm::StarPower(b) => {
                self.convex_family(b, out);
                for k in 1..=self.cycle_bound() {
                    out.insert(ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(k)));
                }
                let mut sufs = BTreeSet::new();
                self.suffixes(b, &mut sufs);
                let mut prefs = BTreeSet::new();
                self.prefixes(b, &mut prefs);
                for s in &sufs {
                    for p in &prefs {
                        if out.len() > CONVEX_FAMILY_CAP {
                            return;
                        }
                        out.insert(ScatteredTerm::concat(vec![s.clone(), p.clone()]));
                        out.insert(ScatteredTerm::concat(vec![
                            s.clone(),
                            ScatteredTerm::power(b.as_ref().clone(), Ordinal::from(1)),
                            p.clone(),
                        ]));
                    }
                }
                for p in prefs {
                    out.insert(ScatteredTerm::concat(vec![t.clone(), p]));
                }
            }
        }
    }
}

impl Algebra for RestrictedAlgebra {
    fn describe(&self) -> String {
        format!(
            "restriction of a {}-element algebra to {{{}}}",
            self.base.size(),
            self.allowed.iter().cloned().collect::<Vec<_>>().join(",")
        )
    }

    fn alphabet(&self) -> Vec<String> {
        self.allowed.iter().cloned().collect()
    }

    fn carrier(&self) -> Option<Vec<String>> {
        Some(self.allowed.iter().cloned().collect())
    }

    fn eval(&self, t: &ScatteredTerm) -> EvalOutcome {
        for l in t.letters() {
            if !self.allowed.contains(&l) {
                return Err(EvalError::UnknownElement { id: l });
            }
        }
        let mut family = BTreeSet::new();
        self.convex_family(t, &mut family);
        if family.len() > CONVEX_FAMILY_CAP {
            return Err(EvalError::Unsupported {
                what: "convex family too large for restriction".to_owned(),
            });
        }
        for piece in &family {
            if piece.is_empty_word() {
                continue;
            }
            match self.base.eval(piece) {
                Ok(v) => {
                    if !self.allowed.contains(&v) {
                        return Err(EvalError::Undefined {
                            witness: piece.clone(),
                        });
                    }
                }
                Err(EvalError::Undefined { .. }) => {
                    return Err(EvalError::Undefined {
                        witness: piece.clone(),
                    })
                }
                Err(e) => return Err(e),
            }
        }
        self.base.eval(t)
    }

    fn empty_product_id(&self) -> Option<String> {
        self.base
            .empty_product_id()
            .filter(|e| self.allowed.contains(e))
    }

    fn claimed_class(&self) -> CompletenessClass {
        CompletenessClass::LtOmega
    }

    fn supports_scattered(&self) -> bool {
        self.base.supports_scattered()
    }

    fn has_omega_power(&self) -> bool {
        self.base.has_omega_power()
    }
}

/// CNF prefixes of an ordinal: partial sums of its terms, including small
/// coefficient cuts of each term.
fn exponent_prefixes(e: &Ordinal) -> Vec<Ordinal> {
    let mut out = Vec::new();
    let mut acc = Ordinal::zero();
    for (exp, c) in e.terms() {
        let mut cut = num_bigint::BigUint::one();
        while &cut < c && out.len() < 8 {
            out.push(acc.add(&Ordinal::monomial(exp.clone(), cut.clone())));
            cut += 1u32;
        }
        acc = acc.add(&Ordinal::monomial(exp.clone(), c.clone()));
        out.push(acc.clone());
    }
    out.pop();
    out
}

// ---------------------------------------------------------------------------
// Quotients by compatible maps

/// Two pointwise phi-equal presentations with defined products whose
/// images differ: the replayable refutation of condition (*).
#[derive(Clone, Debug)]
pub struct StarWitness {
    pub word_a: ScatteredTerm,
    pub word_b: ScatteredTerm,
    pub val_a: String,
    pub val_b: String,
    pub image_a: String,
    pub image_b: String,
}

impl fmt::Display for StarWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} (image {}) vs {} -> {} (image {})",
            render(&self.word_a),
            self.val_a,
            self.image_a,
            render(&self.word_b),
            self.val_b,
            self.image_b
        )
    }
}

/// Quotient along `phi` when condition (*) holds: a product of images is
/// defined iff some pointwise preimage has a defined product, with the
/// image of that product as value. `extra` extends the target carrier for
/// non-surjective maps; such elements only have singleton products.
pub fn quotient_by_map(
    alg: &FinAlgebra,
    phi: &BTreeMap<String, String>,
    extra: &[String],
    budget: u64,
    seed: u64,
) -> Result<FinAlgebra, ConstructionError> {
    let n = alg.size();
    let mut phi_idx = vec![String::new(); n];
    for i in 0..n {
        match phi.get(alg.id(i)) {
            Some(v) => phi_idx[i] = v.clone(),
            None => {
                return Err(ConstructionError::Algebra(AlgebraError::BadId(
                    alg.id(i).to_owned(),
                )))
            }
        }
    }
    let mut targets: Vec<String> = phi_idx.clone();
    targets.extend(extra.iter().cloned());
    targets.sort();
    targets.dedup();
    let t_index: BTreeMap<&str, usize> = targets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let tn = targets.len();
    let class_of =
        |c: usize| -> Vec<usize> { (0..n).filter(|&i| phi_idx[i] == targets[c]).collect() };

    // condition (*) audit: random words against random phi-equal relabelings
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x57A8);
    let gen = crate::audit::WordGen::for_algebra(alg);
    for _ in 0..budget {
        let w = gen.gen(&mut rng, 3);
        let w2 = relabel_phi_equal(&w, alg, &phi_idx, &mut rng);
        let (va, vb) = match (alg.eval(&w), alg.eval(&w2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let (ia, ib) = (
            phi_idx[alg.idx(&va).unwrap()].clone(),
            phi_idx[alg.idx(&vb).unwrap()].clone(),
        );
        if ia != ib {
            return Err(ConstructionError::ConditionStarFails(Box::new(
                StarWitness {
                    word_a: w,
                    word_b: w2,
                    val_a: va,
                    val_b: vb,
                    image_a: ia,
                    image_b: ib,
                },
            )));
        }
    }

    // binary table: exhaustive over preimage pairs, requiring all defined
    // choices to agree in the image
    let mut bin = vec![None; tn * tn];
    for c in 0..tn {
        for d in 0..tn {
            let mut images: Vec<(usize, usize, usize)> = Vec::new();
            for &a in &class_of(c) {
                for &b in &class_of(d) {
                    if let Some(v) = alg.bin_idx(a, b) {
                        images.push((a, b, v));
                    }
                }
            }
            if let Some(&(a0, b0, v0)) = images.first() {
                let img0 = phi_idx[v0].clone();
                for &(a1, b1, v1) in &images[1..] {
                    if phi_idx[v1] != img0 {
                        return Err(ConstructionError::ConditionStarFails(Box::new(
                            StarWitness {
                                word_a: ScatteredTerm::concat(vec![
                                    ScatteredTerm::letter(alg.id(a0)),
                                    ScatteredTerm::letter(alg.id(b0)),
                                ]),
                                word_b: ScatteredTerm::concat(vec![
                                    ScatteredTerm::letter(alg.id(a1)),
                                    ScatteredTerm::letter(alg.id(b1)),
                                ]),
                                val_a: alg.id(v0).to_owned(),
                                val_b: alg.id(v1).to_owned(),
                                image_a: img0,
                                image_b: phi_idx[v1].clone(),
                            },
                        )));
                    }
                }
                bin[c * tn + d] = Some(t_index[phi_idx[v0].as_str()]);
            }
        }
    }
    // ω table: ultimately periodic preimage words over each class
    let mut omega_t = vec![None; tn];
    for c in 0..tn {
        let cls = class_of(c);
        if cls.is_empty() {
            continue;
        }
        let mut fold: BTreeSet<usize> = cls.iter().copied().collect();
        loop {
            let mut next = fold.clone();
            for &a in &fold {
                for &b in &cls {
                    if let Some(v) = alg.bin_idx(a, b) {
                        next.insert(v);
                    }
                }
            }
            if next == fold {
                break;
            }
            fold = next;
        }
        let mut images: Vec<usize> = Vec::new();
        for &g in &fold {
            if let Some(og) = alg.omega_idx(g) {
                images.push(og);
                for &a in &fold {
                    if let Some(v) = alg.bin_idx(a, og) {
                        images.push(v);
                    }
                }
            }
        }
        if let Some(&v0) = images.first() {
            let img0 = phi_idx[v0].clone();
            for &v in &images[1..] {
                if phi_idx[v] != img0 {
                    return Err(ConstructionError::ConditionStarFails(Box::new(
                        StarWitness {
                            word_a: ScatteredTerm::power(
                                ScatteredTerm::letter(targets[c].clone()),
                                Ordinal::omega(),
                            ),
                            word_b: ScatteredTerm::power(
                                ScatteredTerm::letter(targets[c].clone()),
                                Ordinal::omega(),
                            ),
                            val_a: alg.id(v0).to_owned(),
                            val_b: alg.id(v).to_owned(),
                            image_a: img0,
                            image_b: phi_idx[v].clone(),
                        },
                    )));
                }
            }
            omega_t[c] = Some(t_index[img0.as_str()]);
        }
    }
    let empty = alg
        .empty_product_idx()
        .map(|e| t_index[phi_idx[e].as_str()]);
    Ok(FinAlgebra::new(
        targets, bin, omega_t, None, None, empty, alg.class(),
    )?)
}

fn relabel_phi_equal(
    t: &ScatteredTerm,
    alg: &FinAlgebra,
    phi_idx: &[String],
    rng: &mut ChaCha8Rng,
) -> ScatteredTerm {
    match t {
        ScatteredTerm::Empty => ScatteredTerm::Empty,
        ScatteredTerm::Letter(l) => {
            let i = alg.idx(l).expect("carrier letter");
            let cls: Vec<usize> = (0..alg.size())
                .filter(|&j| phi_idx[j] == phi_idx[i])
                .collect();
            let j = cls[rng.gen_range(0..cls.len())];
            ScatteredTerm::letter(alg.id(j))
        }
        ScatteredTerm::Concat(cs) => ScatteredTerm::concat(
            cs.iter()
                .map(|c| relabel_phi_equal(c, alg, phi_idx, rng))
                .collect(),
        ),
        ScatteredTerm::Power(b, e) => {
            ScatteredTerm::power(relabel_phi_equal(b, alg, phi_idx, rng), e.clone())
        }
        ScatteredTerm::StarPower(b) => {
            ScatteredTerm::star(relabel_phi_equal(b, alg, phi_idx, rng))
        }
    }
}

// ---------------------------------------------------------------------------
// Endpoint evaluators on scattered shapes

/// A complete semigroup whose products only see the endpoints of the index
/// order: the five-case evaluator over scattered shapes. Covers both the
/// first-letter projection (a left-zero base) and the general `abc = ac`
/// case.
pub struct EndpointsAlgebra {
    name: String,
    base: FinAlgebra,
    s0: usize,
    s1: usize,
}

/// The first-letter projection: the product of a shape with a minimum is
/// the letter there, and `s0` otherwise.
pub fn left_projection(elems: &[String], s0: &str) -> Result<EndpointsAlgebra, ConstructionError> {
    let n = elems.len();
    let mut bin = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            bin[a * n + b] = Some(a);
        }
    }
    let base = FinAlgebra::new(
        elems.to_vec(),
        bin,
        vec![None; n],
        None,
        None,
        None,
        CompletenessClass::LtOmega,
    )?;
    let s0 = base
        .idx(s0)
        .ok_or_else(|| ConstructionError::Algebra(AlgebraError::BadId(s0.to_owned())))?;
    Ok(EndpointsAlgebra {
        name: "left-projection".to_owned(),
        base,
        s0,
        s1: s0,
    })
}

/// The endpoint evaluator over a classical semigroup satisfying
/// `a*b*c = a*c`, with defaults `s0` (missing minimum) and `s1` (missing
/// maximum).
pub fn endpoints_algebra(
    s: &FinAlgebra,
    s0: &str,
    s1: &str,
) -> Result<EndpointsAlgebra, ConstructionError> {
    require_total_assoc(s)?;
    let n = s.size();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ab = s.bin_idx(a, b).unwrap();
                let abc = s.bin_idx(ab, c).unwrap();
                if Some(abc) != s.bin_idx(a, c) {
                    return Err(ConstructionError::IdentityFails {
                        a: s.id(a).to_owned(),
                        b: s.id(b).to_owned(),
                        c: s.id(c).to_owned(),
                    });
                }
            }
        }
    }
    let s0 = s
        .idx(s0)
        .ok_or_else(|| ConstructionError::Algebra(AlgebraError::BadId(s0.to_owned())))?;
    let s1 = s
        .idx(s1)
        .ok_or_else(|| ConstructionError::Algebra(AlgebraError::BadId(s1.to_owned())))?;
    Ok(EndpointsAlgebra {
        name: "endpoints".to_owned(),
        base: s.clone(),
        s0,
        s1,
    })
}

impl EndpointsAlgebra {
    /// The table presentation of the same products on encodable words:
    /// `x^ω = x*s1` and `x^(ω*) = s0*x`.
    pub fn to_table(&self) -> FinAlgebra {
        let n = self.base.size();
        let mut omega_t = vec![None; n];
        let mut star_t = vec![None; n];
        for a in 0..n {
            omega_t[a] = self.base.bin_idx(a, self.s1);
            star_t[a] = self.base.bin_idx(self.s0, a);
        }
        let mut bin = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                bin[a * n + b] = self.base.bin_idx(a, b);
            }
        }
        FinAlgebra::new(
            self.base.ids().to_vec(),
            bin,
            omega_t,
            Some(star_t),
            None,
            None,
            CompletenessClass::CompleteOnEncodable,
        )
        .expect("endpoint table is well formed")
    }

    /// The five-case evaluation by shape analysis (also the oracle the
    /// table presentation is cross-checked against).
    pub fn eval_by_shape(&self, t: &ScatteredTerm) -> EvalOutcome {
        for l in t.letters() {
            if self.base.idx(&l).is_none() {
                return Err(EvalError::UnknownElement { id: l });
            }
        }
        let norm = t.normalize();
        if norm.is_empty_word() {
            return Err(EvalError::Undefined {
                witness: ScatteredTerm::Empty,
            });
        }
        if let ScatteredTerm::Letter(a) = &norm {
            return Ok(a.clone());
        }
        let left = match norm.first_letter() {
            Some(a) => self.base.idx(a).unwrap(),
            None => self.s0,
        };
        let right = match norm.last_letter() {
            Some(a) => self.base.idx(a).unwrap(),
            None => self.s1,
        };
        let v = self.base.bin_idx(left, right).unwrap();
        Ok(self.base.id(v).to_owned())
    }
}

impl Algebra for EndpointsAlgebra {
    fn describe(&self) -> String {
        format!("{} on {} elements", self.name, self.base.size())
    }

    fn alphabet(&self) -> Vec<String> {
        self.base.ids().to_vec()
    }

    fn carrier(&self) -> Option<Vec<String>> {
        Some(self.base.ids().to_vec())
    }

    fn eval(&self, t: &ScatteredTerm) -> EvalOutcome {
        self.eval_by_shape(t)
    }

    fn empty_product_id(&self) -> Option<String> {
        None
    }

    fn claimed_class(&self) -> CompletenessClass {
        CompletenessClass::CompleteOnEncodable
    }

    fn supports_scattered(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Inflationary maps on a finite poset

/// A finite partial order, validated at construction.
#[derive(Clone, Debug)]
pub struct MonotonePoset {
    elems: Vec<String>,
    leq: Vec<bool>,
}

impl MonotonePoset {
    pub fn new(elems: Vec<String>, pairs: &[(String, String)]) -> Result<Self, ConstructionError> {
        let n = elems.len();
        if n == 0 {
            return Err(ConstructionError::BadPoset("empty poset".into()));
        }
        let index: BTreeMap<&str, usize> = elems
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let (ia, ib) = match (index.get(a.as_str()), index.get(b.as_str())) {
                (Some(&x), Some(&y)) => (x, y),
                _ => {
                    return Err(ConstructionError::BadPoset(format!(
                        "unknown pair {} <= {}",
                        a, b
                    )))
                }
            };
            leq[ia * n + ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i * n + k] && leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(ConstructionError::BadPoset(format!(
                        "antisymmetry fails on {} and {}",
                        elems[i], elems[j]
                    )));
                }
            }
        }
        Ok(MonotonePoset { elems, leq })
    }

    pub fn chain(labels: &[&str]) -> Self {
        let elems: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let pairs: Vec<(String, String)> = labels
            .windows(2)
            .map(|w| (w[0].to_string(), w[1].to_string()))
            .collect();
        MonotonePoset::new(elems, &pairs).expect("chains are posets")
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[String] {
        &self.elems
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.elems.len() + b]
    }
}

const INFLATIONARY_MAX: usize = 4096;

fn map_label(poset: &MonotonePoset, images: &[usize]) -> String {
    let mut s = String::from("[");
    for (i, &v) in images.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&poset.elems()[v]);
    }
    s.push(']');
    s
}

/// The ordinal semigroup of inflationary self-maps of a finite poset:
/// composition in diagram order at successor steps, pointwise stabilized
/// values at limits (a constant ω-run of `f` evaluates to the fixpoint
/// iterate of `f`). The identity map is the empty product.
pub fn inflationary_algebra(poset: &MonotonePoset) -> Result<FinAlgebra, ConstructionError> {
    let n = poset.size();
    let ups: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| poset.leq(x, y)).collect())
        .collect();
    let count: usize = ups.iter().map(|u| u.len()).product();
    if count > INFLATIONARY_MAX {
        return Err(ConstructionError::TooLarge(format!(
            "{} inflationary maps",
            count
        )));
    }
    let mut maps: Vec<Vec<usize>> = vec![Vec::new()];
    for x in 0..n {
        let mut next = Vec::new();
        for m in &maps {
            for &y in &ups[x] {
                let mut m2 = m.clone();
                m2.push(y);
                next.push(m2);
            }
        }
        maps = next;
    }
    maps.sort();
    let ids: Vec<String> = maps.iter().map(|m| map_label(poset, m)).collect();
    let pos: BTreeMap<&[usize], usize> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let k = maps.len();
    // diagram order: (f ∘ g)(x) = g(f(x))
    let compose = |f: &[usize], g: &[usize]| -> Vec<usize> { (0..n).map(|x| g[f[x]]).collect() };
    let mut bin = vec![None; k * k];
    for (i, f) in maps.iter().enumerate() {
        for (j, g) in maps.iter().enumerate() {
            bin[i * k + j] = Some(pos[compose(f, g).as_slice()]);
        }
    }
    let mut omega_t = vec![None; k];
    for (i, f) in maps.iter().enumerate() {
        omega_t[i] = Some(pos[stabilize(f, n).as_slice()]);
    }
    let identity: Vec<usize> = (0..n).collect();
    let e = pos[identity.as_slice()];
    Ok(FinAlgebra::new(
        ids,
        bin,
        omega_t,
        None,
        None,
        Some(e),
        CompletenessClass::Ordinal,
    )?)
}

/// Iterates `f` (diagram order) until every point stabilizes: the
/// pointwise least upper bound of the iteration chain in a finite poset.
pub fn stabilize(f: &[usize], n: usize) -> Vec<usize> {
    let mut h: Vec<usize> = f.to_vec();
    loop {
        let next: Vec<usize> = (0..n).map(|x| f[h[x]]).collect();
        if next == h {
            return h;
        }
        h = next;
    }
}

/// Renders an image list as the map id used by `inflationary_algebra`,
/// rejecting maps that are not inflationary.
pub fn inflationary_map_id(
    poset: &MonotonePoset,
    images: &[&str],
) -> Result<String, ConstructionError> {
    if images.len() != poset.size() {
        return Err(ConstructionError::BadPoset(
            "image list length differs from the poset".into(),
        ));
    }
    let mut idx = Vec::with_capacity(images.len());
    for (x, im) in images.iter().enumerate() {
        let i = poset
            .elems()
            .iter()
            .position(|e| e == im)
            .ok_or_else(|| ConstructionError::BadPoset(format!("unknown element {}", im)))?;
        if !poset.leq(x, i) {
            return Err(ConstructionError::NotInflationary {
                map: format!("[{}]", images.join(",")),
                at: poset.elems()[x].clone(),
            });
        }
        idx.push(i);
    }
    Ok(map_label(poset, &idx))
}

// ---------------------------------------------------------------------------
// Exact rational series

/// A rational series presented as a finite prefix followed by an optional
/// geometric tail `first*ratio^k`, k ≥ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSeq {
    pub prefix: Vec<BigRational>,
    pub tail: Option<(BigRational, BigRational)>,
}

impl SeriesSeq {
    pub fn finite(prefix: Vec<BigRational>) -> Self {
        SeriesSeq { prefix, tail: None }
    }

    pub fn geometric(prefix: Vec<BigRational>, first: BigRational, ratio: BigRational) -> Self {
        SeriesSeq {
            prefix,
            tail: Some((first, ratio)),
        }
    }

    /// Convergence in the classical sense. Suffixes of a geometric tail
    /// are geometric with the same ratio, so every convex subpresentation
    /// converges exactly when the whole does.
    pub fn is_convergent(&self) -> bool {
        match &self.tail {
            None => true,
            Some((a, r)) => a.is_zero() || r.abs() < BigRational::one(),
        }
    }

    pub fn term(&self, k: usize) -> Option<BigRational> {
        if k < self.prefix.len() {
            return Some(self.prefix[k].clone());
        }
        let (a, r) = self.tail.as_ref()?;
        let mut v = a.clone();
        for _ in 0..(k - self.prefix.len()) {
            v *= r;
        }
        Some(v)
    }
}

/// Exact sum of a convergent series: prefix plus `first/(1-ratio)`.
/// `None` means the series diverges and the product is undefined.
pub fn series_sum(s: &SeriesSeq) -> Option<BigRational> {
    let mut acc: BigRational = BigRational::zero();
    for t in &s.prefix {
        acc += t;
    }
    match &s.tail {
        None => Some(acc),
        Some((a, _)) if a.is_zero() => Some(acc),
        Some((a, r)) => {
            if r.abs() < BigRational::one() {
                Some(acc + a / (BigRational::one() - r))
            } else {
                None
            }
        }
    }
}

/// A consecutive regrouping of a series: finitely many leading groups of
/// the given sizes, then constant blocks of `tail_block` terms forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesGrouping {
    pub head_groups: Vec<usize>,
    pub tail_block: usize,
}

/// Regroups a series by summing each group exactly; a geometric tail taken
/// in blocks of k is geometric with ratio `r^k`.
pub fn regroup_series(s: &SeriesSeq, g: &SeriesGrouping) -> Option<SeriesSeq> {
    if g.tail_block == 0 || g.head_groups.iter().any(|&x| x == 0) {
        return None;
    }
    let mut consumed = 0usize;
    let mut prefix = Vec::new();
    for &size in &g.head_groups {
        let mut sum = BigRational::zero();
        for _ in 0..size {
            sum += s.term(consumed)?;
            consumed += 1;
        }
        prefix.push(sum);
    }
    match &s.tail {
        None => {
            let mut rest = s.prefix.get(consumed..).unwrap_or(&[]).to_vec();
            while !rest.is_empty() {
                let take = g.tail_block.min(rest.len());
                let mut sum = BigRational::zero();
                for t in rest.drain(..take) {
                    sum += t;
                }
                prefix.push(sum);
            }
            Some(SeriesSeq::finite(prefix))
        }
        Some((a, r)) => {
            // blocks must start at or after the geometric part
            let mut consumed = consumed;
            while consumed < s.prefix.len() {
                let mut sum = BigRational::zero();
                for _ in 0..g.tail_block {
                    sum += s.term(consumed)?;
                    consumed += 1;
                }
                prefix.push(sum);
            }
            let skip = consumed - s.prefix.len();
            let mut first = a.clone();
            for _ in 0..skip {
                first *= r;
            }
            // block sum first*(1 + r + ... + r^(k-1)), ratio r^k
            let mut geo = BigRational::zero();
            let mut pow = BigRational::one();
            for _ in 0..g.tail_block {
                geo += &pow;
                pow *= r;
            }
            Some(SeriesSeq::geometric(prefix, first * geo, pow))
        }
    }
}

/// The completion of the finitary rational-sum semigroup: finite
/// presentations keep their exact sum, every infinite presentation is the
/// absorbing element at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletedSum {
    Value(BigRational),
    Omega,
}

impl fmt::Display for CompletedSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompletedSum::Value(v) => write!(f, "{}", v),
            CompletedSum::Omega => write!(f, "Omega"),
        }
    }
}

pub fn completed_sum(s: &SeriesSeq) -> CompletedSum {
    match &s.tail {
        None => CompletedSum::Value(series_sum(s).expect("finite series always sum")),
        Some(_) => CompletedSum::Omega,
    }
}

/// The grouped route through the completion: group sums are finite and
/// exact; the outer product is the completed sum of the group sequence,
/// which stays infinite whenever the input is.
pub fn completed_grouped(s: &SeriesSeq, g: &SeriesGrouping) -> Option<CompletedSum> {
    match &s.tail {
        None => regroup_series(s, g).map(|r| completed_sum(&r)),
        Some(_) => {
            if g.tail_block == 0 || g.head_groups.iter().any(|&x| x == 0) {
                return None;
            }
            // every group is finite, so infinitely many groups remain
            Some(CompletedSum::Omega)
        }
    }
}
