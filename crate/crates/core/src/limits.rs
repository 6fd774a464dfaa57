//! The inferior-limit operator on finite meet-semilattices and on strings:
//! suffix meets, their supremum along the index, the pumped-family string
//! limit, and the executable regrouping failure that keeps this operator
//! out of the semigroup fold.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audit::{AxiomId, Verdict};
use crate::ordinal::Ordinal;
use crate::pseq::PiecewiseSeq;
use crate::word::WordTerm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    UnknownElement(String),
    NotIdempotent(String),
    NotCommutative(String, String),
    NotAssociative(String, String, String),
    Empty,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::UnknownElement(x) => write!(f, "unknown element '{}'", x),
            LatticeError::NotIdempotent(x) => write!(f, "meet({0},{0}) != {0}", x),
            LatticeError::NotCommutative(a, b) => {
                write!(f, "meet({0},{1}) != meet({1},{0})", a, b)
            }
            LatticeError::NotAssociative(a, b, c) => {
                write!(f, "meet not associative on ({},{},{})", a, b, c)
            }
            LatticeError::Empty => write!(f, "a semilattice needs elements"),
        }
    }
}

/// A finite meet-semilattice given by a total meet table, audited for
/// idempotence, commutativity and associativity at construction. The
/// order is induced: `x ≤ y` iff `meet(x,y) = x`; finiteness makes every
/// chain supremum exist.
#[derive(Clone, Debug)]
pub struct FiniteMeetSemilattice {
    ids: Vec<String>,
    meet: Vec<usize>,
}

impl FiniteMeetSemilattice {
    pub fn new(ids: Vec<String>, entries: &[((String, String), String)]) -> Result<Self, LatticeError> {
        if ids.is_empty() {
            return Err(LatticeError::Empty);
        }
        let idx = |x: &str| -> Result<usize, LatticeError> {
            ids.iter()
                .position(|i| i == x)
                .ok_or_else(|| LatticeError::UnknownElement(x.to_string()))
        };
        let n = ids.len();
        let mut table = vec![usize::MAX; n * n];
        for ((a, b), v) in entries {
            table[idx(a)? * n + idx(b)?] = idx(v)?;
        }
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == usize::MAX {
                    return Err(LatticeError::UnknownElement(format!(
                        "meet({},{}) missing",
                        ids[a], ids[b]
                    )));
                }
            }
        }
        let lat = FiniteMeetSemilattice { ids, meet: table };
        for a in 0..n {
            if lat.meet_idx(a, a) != a {
                return Err(LatticeError::NotIdempotent(lat.ids[a].clone()));
            }
            for b in 0..n {
                if lat.meet_idx(a, b) != lat.meet_idx(b, a) {
                    return Err(LatticeError::NotCommutative(
                        lat.ids[a].clone(),
                        lat.ids[b].clone(),
                    ));
                }
                for c in 0..n {
                    if lat.meet_idx(lat.meet_idx(a, b), c) != lat.meet_idx(a, lat.meet_idx(b, c)) {
                        return Err(LatticeError::NotAssociative(
                            lat.ids[a].clone(),
                            lat.ids[b].clone(),
                            lat.ids[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(lat)
    }

    /// The chain `bottom < others` with pairwise-incomparable others.
    pub fn flat(bottom: &str, others: &[&str]) -> Self {
        let mut ids: Vec<String> = vec![bottom.to_string()];
        ids.extend(others.iter().map(|s| s.to_string()));
        let n = ids.len();
        let mut meet = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = if a == b { a } else { 0 };
            }
        }
        FiniteMeetSemilattice { ids, meet }
    }

    /// A linear chain, least element first.
    pub fn chain(labels: &[&str]) -> Self {
        let ids: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let n = ids.len();
        let mut meet = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = a.min(b);
            }
        }
        FiniteMeetSemilattice { ids, meet }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn idx(&self, x: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == x)
    }

    fn meet_idx(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.ids.len() + b]
    }

    pub fn meet_of(&self, a: &str, b: &str) -> Option<&str> {
        Some(&self.ids[self.meet_idx(self.idx(a)?, self.idx(b)?)])
    }

    pub fn leq(&self, a: &str, b: &str) -> Option<bool> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        Some(self.meet_idx(ia, ib) == ia)
    }
}

// ---------------------------------------------------------------------------
// Inferior limits

/// An ω-indexed sequence given as a finite prefix followed by a repeating
/// period; an empty period means the sequence is the finite prefix alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSeq<V> {
    pub prefix: Vec<V>,
    pub period: Vec<V>,
}

impl<V: Clone> PeriodicSeq<V> {
    pub fn at(&self, i: usize) -> &V {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// The sequence of block-last elements under the constant-size block
    /// grouping: the inferior limit of a finite block is its last element.
    pub fn block_lasts(&self, k: usize) -> PeriodicSeq<V> {
        assert!(k >= 1);
        if self.is_finite() {
            let lasts: Vec<V> = self
                .prefix
                .chunks(k)
                .map(|c| c.last().unwrap().clone())
                .collect();
            return PeriodicSeq {
                prefix: lasts,
                period: Vec::new(),
            };
        }
        // block j ends at position jk + k - 1; past the prefix the block
        // ends repeat with period |period|
        let j0 = self.prefix.len().div_ceil(k);
        let prefix: Vec<V> = (0..j0).map(|j| self.at(j * k + k - 1).clone()).collect();
        let period: Vec<V> = (j0..j0 + self.period.len())
            .map(|j| self.at(j * k + k - 1).clone())
            .collect();
        PeriodicSeq { prefix, period }
    }
}

/// ⋁ᵢ ⋀_{h≥i} via a generic meet: the suffix meets form a nondecreasing
/// chain whose supremum is attained at the deepest suffix.
fn inflim_with<V: Clone + PartialEq>(s: &PeriodicSeq<V>, meet: impl Fn(&V, &V) -> V) -> V {
    assert!(
        !(s.prefix.is_empty() && s.period.is_empty()),
        "inferior limit of an empty sequence"
    );
    let suffix_meet = |i: usize| -> V {
        let mut acc: Option<V> = None;
        for v in s.prefix.iter().skip(i).chain(s.period.iter()) {
            acc = Some(match acc {
                None => v.clone(),
                Some(a) => meet(&a, v),
            });
        }
        acc.expect("nonempty suffix")
    };
    // the deepest suffix: from the last prefix element when finite, past
    // the whole prefix when periodic
    let max_i = if s.period.is_empty() {
        s.prefix.len() - 1
    } else {
        s.prefix.len()
    };
    let chain: Vec<V> = (0..=max_i).map(suffix_meet).collect();
    chain.last().unwrap().clone()
}

/// Inferior limit of a piecewise-constant ordinal-indexed sequence: the
/// suffix meets stabilize run by run and their supremum is the last run's
/// value (the finite-index case gives the last element).
pub fn inflim_lattice(
    q: &FiniteMeetSemilattice,
    s: &PiecewiseSeq<String>,
) -> Result<String, LatticeError> {
    let runs = s.runs();
    let mut suffix: Vec<usize> = Vec::with_capacity(runs.len());
    let mut acc: Option<usize> = None;
    for (_, v) in runs.iter().rev() {
        let iv = q
            .idx(v)
            .ok_or_else(|| LatticeError::UnknownElement(v.clone()))?;
        acc = Some(match acc {
            None => iv,
            Some(a) => q.meet_idx(iv, a),
        });
        suffix.push(acc.unwrap());
    }
    suffix.reverse();
    // the chain of suffix meets is nondecreasing; its supremum is attained
    for w in suffix.windows(2) {
        debug_assert_eq!(q.meet_idx(w[0], w[1]), w[0], "suffix meets must form a chain");
    }
    Ok(q.ids[*suffix.last().unwrap()].clone())
}

/// Inferior limit of an ultimately periodic ω-sequence over the lattice.
pub fn inflim_periodic(
    q: &FiniteMeetSemilattice,
    s: &PeriodicSeq<String>,
) -> Result<String, LatticeError> {
    for v in s.prefix.iter().chain(s.period.iter()) {
        if q.idx(v).is_none() {
            return Err(LatticeError::UnknownElement(v.clone()));
        }
    }
    Ok(inflim_with(s, |a, b| {
        q.meet_of(a, b).expect("validated elements").to_string()
    }))
}

// ---------------------------------------------------------------------------
// The (Nmax)/(N) audit for the inferior limit

/// A replayable regrouping discrepancy for the inferior limit: the direct
/// value against the value through constant-size blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitWitness {
    pub seq: PeriodicSeq<String>,
    pub block: usize,
    pub direct: String,
    pub grouped: String,
}

impl LimitWitness {
    pub fn replay(&self, q: &FiniteMeetSemilattice) -> Result<(), String> {
        let direct = inflim_lattice_periodic_checked(q, &self.seq)?;
        let grouped = inflim_lattice_periodic_checked(q, &self.seq.block_lasts(self.block))?;
        if direct != self.direct {
            return Err(format!("direct value changed: {} vs {}", self.direct, direct));
        }
        if grouped != self.grouped {
            return Err(format!(
                "grouped value changed: {} vs {}",
                self.grouped, grouped
            ));
        }
        if direct == grouped {
            return Err("values no longer differ".to_string());
        }
        Ok(())
    }
}

fn inflim_lattice_periodic_checked(
    q: &FiniteMeetSemilattice,
    s: &PeriodicSeq<String>,
) -> Result<String, String> {
    inflim_periodic(q, s).map_err(|e| e.to_string())
}

impl fmt::Display for LimitWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seq prefix [{}] period [{}] in blocks of {}: direct {} vs grouped {}",
            self.seq.prefix.join(","),
            self.seq.period.join(","),
            self.block,
            self.direct,
            self.grouped
        )
    }
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub tested: u64,
    pub witness: Option<LimitWitness>,
}

impl fmt::Display for LimitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} tested={}", self.axiom, self.verdict, self.tested)?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {}", w)?;
        }
        Ok(())
    }
}

/// Audits the regrouping behavior of the inferior limit: instances whose
/// quotient index has a maximum (finite prefix splits) are expected to
/// pass, while the full regrouping law fails on block groupings as soon
/// as the lattice has two comparable distinct elements.
pub fn check_nmax(
    q: &FiniteMeetSemilattice,
    budget: u64,
    seed: u64,
) -> (LimitReport, LimitReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x111);
    let n = q.ids.len();
    let random_seq = |rng: &mut ChaCha8Rng| -> PeriodicSeq<String> {
        let np = rng.gen_range(0..=3usize);
        let npr = rng.gen_range(0..=3usize);
        let prefix: Vec<String> = (0..np).map(|_| q.ids[rng.gen_range(0..n)].clone()).collect();
        let mut period: Vec<String> =
            (0..npr).map(|_| q.ids[rng.gen_range(0..n)].clone()).collect();
        if prefix.is_empty() && period.is_empty() {
            period.push(q.ids[rng.gen_range(0..n)].clone());
        }
        PeriodicSeq { prefix, period }
    };

    // (Nmax): finitely many convex groups, the last one infinite; the
    // quotient is finite and has a maximum
    let mut nmax_tested = 0;
    let mut nmax_witness = None;
    for _ in 0..budget {
        let s = random_seq(&mut rng);
        let n0 = s.prefix.len();
        let p = s.period.len();
        // split position: the head is s[0..m], the tail starts at m
        let upper = if p == 0 { n0 - 1 } else { n0 + 2 * p };
        if upper == 0 {
            continue;
        }
        let m = rng.gen_range(1..=upper);
        nmax_tested += 1;
        let direct = inflim_periodic(q, &s).expect("elements validated");
        let head_last = s.at(m - 1).clone();
        let tail = if p == 0 {
            PeriodicSeq {
                prefix: s.prefix[m..].to_vec(),
                period: Vec::new(),
            }
        } else {
            // one full period window at the right phase keeps the tail
            // ultimately periodic
            let base = n0.max(m);
            PeriodicSeq {
                prefix: (m..base).map(|i| s.at(i).clone()).collect(),
                period: (base..base + p).map(|i| s.at(i).clone()).collect(),
            }
        };
        let tail_direct = inflim_periodic(q, &tail).expect("elements validated");
        // the quotient is the two-element order (head group, tail group)
        let outer = PeriodicSeq {
            prefix: vec![head_last, tail_direct],
            period: Vec::new(),
        };
        let grouped = inflim_periodic(q, &outer).expect("elements validated");
        if grouped != direct {
            nmax_witness = Some(LimitWitness {
                seq: s,
                block: 0,
                direct,
                grouped,
            });
            break;
        }
    }
    let nmax_report = LimitReport {
        axiom: AxiomId::NMax,
        verdict: if nmax_witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Exhausted
        },
        tested: nmax_tested,
        witness: nmax_witness,
    };

    // full (N): constant-size block groupings; the quotient is ω and has
    // no maximum. The canonical alternating pair grouping goes first.
    let mut n_tested = 0;
    let mut n_witness = None;
    let mut instances: Vec<(PeriodicSeq<String>, usize)> = Vec::new();
    'search: for a in 0..n {
        for b in 0..n {
            if a != b {
                instances.push((
                    PeriodicSeq {
                        prefix: Vec::new(),
                        period: vec![q.ids[a].clone(), q.ids[b].clone()],
                    },
                    2,
                ));
                break 'search;
            }
        }
    }
    while (instances.len() as u64) < budget {
        let s = random_seq(&mut rng);
        let k = rng.gen_range(2..=4usize);
        instances.push((s, k));
    }
    for (s, k) in instances {
        if s.is_finite() {
            continue;
        }
        n_tested += 1;
        let direct = inflim_periodic(q, &s).expect("elements validated");
        let grouped_seq = s.block_lasts(k);
        let grouped = inflim_periodic(q, &grouped_seq).expect("elements validated");
        if grouped != direct {
            n_witness = Some(LimitWitness {
                seq: s,
                block: k,
                direct,
                grouped,
            });
            break;
        }
    }
    let n_report = LimitReport {
        axiom: AxiomId::NPart,
        verdict: if n_witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Exhausted
        },
        tested: n_tested,
        witness: n_witness,
    };
    (nmax_report, n_report)
}

// ---------------------------------------------------------------------------
// The string limit

/// Longest common prefix of two finite strings.
pub fn lcp(a: &str, b: &str) -> String {
    a.chars()
        .zip(b.chars())
        .take_while(|(x, y)| x == y)
        .map(|(x, _)| x)
        .collect()
}

/// The ω-indexed string family `s_n = u·vⁿ·w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpedFamily {
    pub u: String,
    pub v: String,
    pub w: String,
}

impl PumpedFamily {
    pub fn term(&self, n: usize) -> String {
        let mut s = self.u.clone();
        for _ in 0..n {
            s.push_str(&self.v);
        }
        s.push_str(&self.w);
        s
    }
}

fn letters_word(s: &str) -> WordTerm {
    WordTerm::concat(
        s.chars()
            .map(|c| WordTerm::letter(c.to_string()))
            .collect(),
    )
}

/// The string inferior limit of a pumped family: the common prolongment
/// `u·v^ω` for a nonempty pump, and the constant value `u·w` otherwise.
pub fn string_inflim(f: &PumpedFamily) -> WordTerm {
    if f.v.is_empty() {
        let mut s = f.u.clone();
        s.push_str(&f.w);
        letters_word(&s).normalize()
    } else {
        WordTerm::concat(vec![
            letters_word(&f.u),
            WordTerm::power(letters_word(&f.v), Ordinal::omega()),
        ])
        .normalize()
    }
}

/// Inferior limit of an ultimately periodic sequence of finite strings in
/// the prefix semilattice (meet = longest common prefix).
pub fn inflim_strings(s: &PeriodicSeq<String>) -> String {
    inflim_with(s, |a, b| lcp(a, b))
}

/// The canonical regrouping failure of the string limit: the alternating
/// one-letter family has empty limit, while every pair group has limit
/// `b`, so the grouped limit is `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringNFailure {
    pub seq: PeriodicSeq<String>,
    pub block: usize,
    pub direct: String,
    pub grouped: String,
}

impl fmt::Display for StringNFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alternating [{}] in blocks of {}: direct '{}' vs grouped '{}'",
            self.seq.period.join(","),
            self.block,
            self.direct,
            self.grouped
        )
    }
}

pub fn n_failure_witness() -> StringNFailure {
    let seq = PeriodicSeq {
        prefix: Vec::new(),
        period: vec!["a".to_string(), "b".to_string()],
    };
    let direct = inflim_strings(&seq);
    let grouped = inflim_strings(&seq.block_lasts(2));
    StringNFailure {
        seq,
        block: 2,
        direct,
        grouped,
    }
}

/// Recomputes both routes of the string failure and confirms they still
/// differ as recorded.
pub fn replay_string_n_failure(w: &StringNFailure) -> Result<(), String> {
    let direct = inflim_strings(&w.seq);
    let grouped = inflim_strings(&w.seq.block_lasts(w.block));
    if direct != w.direct {
        return Err(format!("direct changed: '{}' vs '{}'", w.direct, direct));
    }
    if grouped != w.grouped {
        return Err(format!("grouped changed: '{}' vs '{}'", w.grouped, grouped));
    }
    if direct == grouped {
        return Err("values no longer differ".to_string());
    }
    Ok(())
}
