//! Term-represented transfinite words and scattered labeled orders.
//!
//! `ScatteredTerm` is the full grammar (empty word, letters, concatenation,
//! ordinal powers, ω*-powers); `WordTerm` is the star-free fragment, i.e.
//! genuinely ordinal-indexed strings with a length, positions, and a
//! decidable equality below ω².

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::ordinal::{Ordinal, ParseOrdinalError};
use crate::pseq::PiecewiseSeq;

/// A finitely generated scattered linear order with labeled points:
/// finite sums, ordinal powers, and ω*-powers of labeled orders.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScatteredTerm {
    Empty,
    Letter(String),
    /// Flattened: never directly contains another `Concat`.
    Concat(Vec<ScatteredTerm>),
    /// Exponent is never 0 or 1 and the base is never `Empty`.
    Power(Box<ScatteredTerm>, Ordinal),
    /// ω*-many copies of the base, in reverse order.
    StarPower(Box<ScatteredTerm>),
}

/// A labeled scattered order; identical to `ScatteredTerm` with letters
/// read as labels.
pub type LabeledOrder = ScatteredTerm;

impl ScatteredTerm {
    pub fn letter(s: impl Into<String>) -> Self {
        ScatteredTerm::Letter(s.into())
    }

    /// Concatenation; flattens nested `Concat` nodes and drops empties.
    pub fn concat(parts: Vec<ScatteredTerm>) -> Self {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                ScatteredTerm::Empty => {}
                ScatteredTerm::Concat(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => ScatteredTerm::Empty,
            1 => out.pop().unwrap(),
            _ => ScatteredTerm::Concat(out),
        }
    }

    /// Ordinal power; exponent 0 gives the empty word, exponent 1 the base.
    pub fn power(base: ScatteredTerm, exp: Ordinal) -> Self {
        if exp.is_zero() || base == ScatteredTerm::Empty {
            return ScatteredTerm::Empty;
        }
        if exp == Ordinal::one() {
            return base;
        }
        ScatteredTerm::Power(Box::new(base), exp)
    }

    pub fn star(base: ScatteredTerm) -> Self {
        if base == ScatteredTerm::Empty {
            return ScatteredTerm::Empty;
        }
        ScatteredTerm::StarPower(Box::new(base))
    }

    pub fn is_empty_word(&self) -> bool {
        matches!(self, ScatteredTerm::Empty)
    }

    pub fn contains_star(&self) -> bool {
        match self {
            ScatteredTerm::Empty | ScatteredTerm::Letter(_) => false,
            ScatteredTerm::Concat(cs) => cs.iter().any(|c| c.contains_star()),
            ScatteredTerm::Power(b, _) => b.contains_star(),
            ScatteredTerm::StarPower(_) => true,
        }
    }

    /// Distinct letters, in first-occurrence order.
    pub fn letters(&self) -> Vec<String> {
        fn walk(t: &ScatteredTerm, out: &mut Vec<String>) {
            match t {
                ScatteredTerm::Empty => {}
                ScatteredTerm::Letter(s) => {
                    if !out.iter().any(|x| x == s) {
                        out.push(s.clone());
                    }
                }
                ScatteredTerm::Concat(cs) => cs.iter().for_each(|c| walk(c, out)),
                ScatteredTerm::Power(b, _) | ScatteredTerm::StarPower(b) => walk(b, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Rewrites every letter through `f`; `Err` carries the first letter
    /// `f` does not cover.
    pub fn map_letters(
        &self,
        f: &impl Fn(&str) -> Option<String>,
    ) -> Result<ScatteredTerm, String> {
        Ok(match self {
            ScatteredTerm::Empty => ScatteredTerm::Empty,
            ScatteredTerm::Letter(s) => match f(s) {
                Some(t) => ScatteredTerm::Letter(t),
                None => return Err(s.clone()),
            },
            ScatteredTerm::Concat(cs) => ScatteredTerm::concat(
                cs.iter()
                    .map(|c| c.map_letters(f))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            ScatteredTerm::Power(b, e) => {
                ScatteredTerm::power(b.map_letters(f)?, e.clone())
            }
            ScatteredTerm::StarPower(b) => ScatteredTerm::star(b.map_letters(f)?),
        })
    }

    /// Deletes every occurrence of `letter`, keeping the induced order.
    pub fn delete_letter(&self, letter: &str) -> ScatteredTerm {
        match self {
            ScatteredTerm::Empty => ScatteredTerm::Empty,
            ScatteredTerm::Letter(s) => {
                if s == letter {
                    ScatteredTerm::Empty
                } else {
                    self.clone()
                }
            }
            ScatteredTerm::Concat(cs) => {
                ScatteredTerm::concat(cs.iter().map(|c| c.delete_letter(letter)).collect())
            }
            ScatteredTerm::Power(b, e) => {
                ScatteredTerm::power(b.delete_letter(letter), e.clone())
            }
            ScatteredTerm::StarPower(b) => ScatteredTerm::star(b.delete_letter(letter)),
        }
    }

    /// Letter at the minimum position, or `None` if the shape has no
    /// minimum. `Some(None)` never occurs for nonempty terms.
    pub fn first_letter(&self) -> Option<&str> {
        match self {
            ScatteredTerm::Empty => None,
            ScatteredTerm::Letter(s) => Some(s),
            ScatteredTerm::Concat(cs) => cs
                .iter()
                .find(|c| !c.is_empty_word())
                .and_then(|c| c.first_letter()),
            ScatteredTerm::Power(b, _) => b.first_letter(),
            ScatteredTerm::StarPower(_) => None,
        }
    }

    /// Letter at the maximum position, or `None` if the shape has no
    /// maximum (e.g. under a limit power).
    pub fn last_letter(&self) -> Option<&str> {
        match self {
            ScatteredTerm::Empty => None,
            ScatteredTerm::Letter(s) => Some(s),
            ScatteredTerm::Concat(cs) => cs
                .iter()
                .rev()
                .find(|c| !c.is_empty_word())
                .and_then(|c| c.last_letter()),
            ScatteredTerm::Power(b, e) => {
                if e.is_successor() {
                    b.last_letter()
                } else {
                    None
                }
            }
            // ω* runs ..., -2, -1: the last copy exists
            ScatteredTerm::StarPower(b) => b.last_letter(),
        }
    }

    /// Sound rewriting to a canonical-ish form: flattening, merging of
    /// adjacent equal factors into powers, power fusion, absorption of a
    /// finite factor into a following ω*-power, and the limit rotation
    /// `u·(v·u)^α → (u·v)^α`. Idempotent, and preserves length and every
    /// letter position on the star-free fragment.
    pub fn normalize(&self) -> ScatteredTerm {
        match self {
            ScatteredTerm::Empty | ScatteredTerm::Letter(_) => self.clone(),
            ScatteredTerm::Power(b, e) => {
                let b = b.normalize();
                match b {
                    // (x^a)^b = x^(a*b)
                    ScatteredTerm::Power(inner, e2) => {
                        ScatteredTerm::power(*inner, e2.mul(e)).normalize_shallow()
                    }
                    other => ScatteredTerm::power(other, e.clone()),
                }
            }
            ScatteredTerm::StarPower(b) => {
                let b = b.normalize();
                match b {
                    // (x^n)^(ω*) has order type n·ω* = ω*
                    ScatteredTerm::Power(inner, e) if e.is_finite() => {
                        ScatteredTerm::star(*inner)
                    }
                    other => ScatteredTerm::star(other),
                }
            }
            ScatteredTerm::Concat(cs) => {
                let parts: Vec<ScatteredTerm> = cs.iter().map(|c| c.normalize()).collect();
                normalize_concat(parts)
            }
        }
    }

    fn normalize_shallow(self) -> ScatteredTerm {
        match self {
            ScatteredTerm::Power(b, e) => match *b {
                ScatteredTerm::Power(inner, e2) => {
                    ScatteredTerm::power(*inner, e2.mul(&e)).normalize_shallow()
                }
                other => ScatteredTerm::power(other, e),
            },
            other => other,
        }
    }
}

/// Base and exponent of a factor: `x^e` splits as `(x, e)`, anything else
/// is itself to the first power.
fn factor_base(t: &ScatteredTerm) -> (&ScatteredTerm, Ordinal) {
    match t {
        ScatteredTerm::Power(b, e) => (b, e.clone()),
        other => (other, Ordinal::one()),
    }
}

fn normalize_concat(mut parts: Vec<ScatteredTerm>) -> ScatteredTerm {
    // flatten and drop empties up front
    parts = match ScatteredTerm::concat(parts) {
        ScatteredTerm::Concat(cs) => cs,
        other => return other,
    };
    loop {
        let mut changed = false;
        // merge adjacent factors with a common base
        let mut i = 0;
        while i + 1 < parts.len() {
            let merged = {
                let (b1, e1) = factor_base(&parts[i]);
                let (b2, e2) = factor_base(&parts[i + 1]);
                if b1 == b2 {
                    Some(ScatteredTerm::power(b1.clone(), e1.add(&e2)))
                } else {
                    None
                }
            };
            if let Some(m) = merged {
                parts.splice(i..i + 2, [m]);
                changed = true;
                continue;
            }
            // x^(ω*) · x^n has order type ω* + n = ω* (the top gains n
            // points but still has no minimum and keeps its maximum)
            let absorb = {
                let (b2, e2) = factor_base(&parts[i + 1]);
                matches!(&parts[i], ScatteredTerm::StarPower(sb)
                    if e2.is_finite() && b2 == sb.as_ref())
            };
            if absorb {
                parts.remove(i + 1);
                changed = true;
                continue;
            }
            i += 1;
        }
        // rotation u·(v·u)^ω → (u·v)^ω; sound only for the exponent ω
        // itself, since at any later limit position the period restarts
        // with v on the left but with u on the right
        let mut i = 0;
        while i + 1 < parts.len() {
            let rotated = match &parts[i + 1] {
                ScatteredTerm::Power(b, e) if e == &Ordinal::omega() => match b.as_ref() {
                    ScatteredTerm::Concat(ps) if ps.last() == Some(&parts[i]) => {
                        let mut base = vec![parts[i].clone()];
                        base.extend_from_slice(&ps[..ps.len() - 1]);
                        Some(ScatteredTerm::power(
                            normalize_concat(base),
                            e.clone(),
                        ))
                    }
                    _ => None,
                },
                _ => None,
            };
            if let Some(new_power) = rotated {
                parts.splice(i..i + 2, [new_power.normalize()]);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
        // re-flatten in case a merge produced an unwrapped concat
        parts = match ScatteredTerm::concat(parts) {
            ScatteredTerm::Concat(cs) => cs,
            other => return other,
        };
    }
    ScatteredTerm::concat(parts)
}

// ---------------------------------------------------------------------------
// WordTerm: the star-free (ordinal-indexed) fragment

/// An ordinal-indexed word: a `ScatteredTerm` containing no ω*-power.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordTerm(ScatteredTerm);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordError {
    /// The term contains an ω*-power and is not an ordinal word.
    StarPower,
    /// `letter_at` position at or beyond the word length.
    PositionOutOfRange { pos: Ordinal, length: Ordinal },
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::StarPower => write!(f, "term contains an omega*-power"),
            WordError::PositionOutOfRange { pos, length } => {
                write!(f, "position {} out of range for word of length {}", pos, length)
            }
        }
    }
}

impl WordTerm {
    pub fn empty() -> Self {
        WordTerm(ScatteredTerm::Empty)
    }

    pub fn letter(s: impl Into<String>) -> Self {
        WordTerm(ScatteredTerm::letter(s))
    }

    pub fn concat(parts: Vec<WordTerm>) -> Self {
        WordTerm(ScatteredTerm::concat(
            parts.into_iter().map(|w| w.0).collect(),
        ))
    }

    pub fn power(base: WordTerm, exp: Ordinal) -> Self {
        WordTerm(ScatteredTerm::power(base.0, exp))
    }

    pub fn as_term(&self) -> &ScatteredTerm {
        &self.0
    }

    pub fn into_term(self) -> ScatteredTerm {
        self.0
    }

    /// Word length: 0 / 1 / sum / base-length·exponent by structure.
    pub fn length(&self) -> Ordinal {
        fn len(t: &ScatteredTerm) -> Ordinal {
            match t {
                ScatteredTerm::Empty => Ordinal::zero(),
                ScatteredTerm::Letter(_) => Ordinal::one(),
                ScatteredTerm::Concat(cs) => {
                    let mut acc = Ordinal::zero();
                    for c in cs {
                        acc = acc.add(&len(c));
                    }
                    acc
                }
                ScatteredTerm::Power(b, e) => len(b).mul(e),
                ScatteredTerm::StarPower(_) => unreachable!("star-free invariant"),
            }
        }
        len(&self.0)
    }

    /// Label at `pos`, by structural recursion with ordinal division at
    /// power nodes.
    pub fn letter_at(&self, pos: &Ordinal) -> Result<&str, WordError> {
        fn at<'t>(t: &'t ScatteredTerm, pos: &Ordinal) -> Option<&'t str> {
            match t {
                ScatteredTerm::Empty => None,
                ScatteredTerm::Letter(s) => {
                    if pos.is_zero() {
                        Some(s)
                    } else {
                        None
                    }
                }
                ScatteredTerm::Concat(cs) => {
                    let mut rest = pos.clone();
                    for c in cs {
                        let l = WordTerm(c.clone()).length();
                        if rest < l {
                            return at(c, &rest);
                        }
                        rest = l.left_sub(&rest)?;
                    }
                    None
                }
                ScatteredTerm::Power(b, e) => {
                    let l = WordTerm(b.as_ref().clone()).length();
                    if l.is_zero() {
                        return None;
                    }
                    let (q, r) = pos.divmod(&l);
                    if &q >= e {
                        return None;
                    }
                    at(b, &r)
                }
                ScatteredTerm::StarPower(_) => unreachable!("star-free invariant"),
            }
        }
        at(&self.0, pos).ok_or_else(|| WordError::PositionOutOfRange {
            pos: pos.clone(),
            length: self.length(),
        })
    }

    pub fn normalize(&self) -> WordTerm {
        WordTerm(self.0.normalize())
    }

    pub fn letters(&self) -> Vec<String> {
        self.0.letters()
    }
}

impl TryFrom<ScatteredTerm> for WordTerm {
    type Error = WordError;

    fn try_from(t: ScatteredTerm) -> Result<Self, Self::Error> {
        if t.contains_star() {
            Err(WordError::StarPower)
        } else {
            Ok(WordTerm(t))
        }
    }
}

impl From<WordTerm> for ScatteredTerm {
    fn from(w: WordTerm) -> Self {
        w.0
    }
}

/// Transfinite concatenation of a run presentation: each run `(λ, w)`
/// contributes `w^λ`; the result is normalized.
pub fn concat_seq(s: &PiecewiseSeq<WordTerm>) -> WordTerm {
    let parts = s
        .runs()
        .iter()
        .map(|(len, w)| WordTerm::power(w.clone(), len.clone()))
        .collect();
    WordTerm::concat(parts).normalize()
}

// ---------------------------------------------------------------------------
// Equality

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EqVerdict {
    Equal,
    Unequal,
    Unknown,
}

/// Ultimately periodic ω-word `head · period^ω`.
#[derive(Clone, PartialEq, Eq, Debug)]
struct UpChunk {
    head: Vec<String>,
    period: Vec<String>,
}

impl UpChunk {
    fn at(&self, i: usize) -> &str {
        if i < self.head.len() {
            &self.head[i]
        } else {
            &self.period[(i - self.head.len()) % self.period.len()]
        }
    }

    fn same_word(&self, other: &UpChunk) -> bool {
        let bound = self.head.len().max(other.head.len())
            + self.period.len() * other.period.len();
        (0..bound).all(|i| self.at(i) == other.at(i))
    }
}

/// A word of length < ω² as ω-chunks followed by a finite tail.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct UpDecomp {
    chunks: Vec<UpChunk>,
    tail: Vec<String>,
}

impl UpDecomp {
    fn append(&mut self, other: UpDecomp) {
        if other.chunks.is_empty() {
            self.tail.extend(other.tail);
            return;
        }
        let mut chunks = other.chunks.into_iter();
        let first = chunks.next().unwrap();
        let mut head = core::mem::take(&mut self.tail);
        head.extend(first.head);
        self.chunks.push(UpChunk {
            head,
            period: first.period,
        });
        self.chunks.extend(chunks);
        self.tail = other.tail;
    }
}

const DECOMP_CAP: u64 = 4096;

/// Block decomposition of a word of length < ω²; `None` when the term
/// needs more than `DECOMP_CAP` chunks or letter repetitions.
fn up_decomp(t: &ScatteredTerm) -> Option<UpDecomp> {
    match t {
        ScatteredTerm::Empty => Some(UpDecomp::default()),
        ScatteredTerm::Letter(s) => Some(UpDecomp {
            chunks: Vec::new(),
            tail: vec![s.clone()],
        }),
        ScatteredTerm::Concat(cs) => {
            let mut acc = UpDecomp::default();
            for c in cs {
                acc.append(up_decomp(c)?);
            }
            Some(acc)
        }
        ScatteredTerm::Power(b, e) => {
            let db = up_decomp(b)?;
            if db.chunks.is_empty() {
                let f = db.tail;
                if f.is_empty() {
                    return Some(UpDecomp::default());
                }
                // e = ω·m + n with m, n finite, since the length is < ω²
                let mut m: u64 = 0;
                let mut n: u64 = 0;
                for (exp, c) in e.terms() {
                    if exp == &Ordinal::one() {
                        m = c.to_u64()?;
                    } else if exp.is_zero() {
                        n = c.to_u64()?;
                    } else {
                        return None;
                    }
                }
                if m > DECOMP_CAP || n.checked_mul(f.len() as u64)? > DECOMP_CAP {
                    return None;
                }
                let mut out = UpDecomp::default();
                for _ in 0..m {
                    out.chunks.push(UpChunk {
                        head: Vec::new(),
                        period: f.clone(),
                    });
                }
                for _ in 0..n {
                    out.tail.extend(f.iter().cloned());
                }
                Some(out)
            } else {
                let n = e.as_u64()?;
                if n > DECOMP_CAP {
                    return None;
                }
                let mut acc = UpDecomp::default();
                for _ in 0..n {
                    acc.append(db.clone());
                }
                Some(acc)
            }
        }
        ScatteredTerm::StarPower(_) => None,
    }
}

/// Sound three-valued equality of ordinal words. `Equal` and `Unequal`
/// are always correct; `Unknown` only occurs beyond the ω² fragment.
pub fn word_eq(a: &WordTerm, b: &WordTerm) -> EqVerdict {
    let la = a.length();
    let lb = b.length();
    if la != lb {
        return EqVerdict::Unequal;
    }
    let na = a.normalize();
    let nb = b.normalize();
    if na == nb {
        return EqVerdict::Equal;
    }
    if la.degree() <= Ordinal::one() {
        if let (Some(da), Some(db)) = (up_decomp(na.as_term()), up_decomp(nb.as_term())) {
            if da.tail != db.tail || da.chunks.len() != db.chunks.len() {
                return EqVerdict::Unequal;
            }
            let same = da
                .chunks
                .iter()
                .zip(db.chunks.iter())
                .all(|(x, y)| x.same_word(y));
            return if same {
                EqVerdict::Equal
            } else {
                EqVerdict::Unequal
            };
        }
    }
    // beyond the exact fragment: sample positions, soundly report
    // mismatches, otherwise give up
    for pos in sample_positions(&na, &la) {
        match (na.letter_at(&pos), nb.letter_at(&pos)) {
            (Ok(x), Ok(y)) if x == y => {}
            _ => return EqVerdict::Unequal,
        }
    }
    EqVerdict::Unknown
}

/// Positions worth probing: an initial segment plus block boundaries and
/// small offsets around them.
fn sample_positions(w: &WordTerm, len: &Ordinal) -> Vec<Ordinal> {
    fn boundaries(t: &ScatteredTerm, origin: &Ordinal, out: &mut Vec<Ordinal>) {
        if out.len() > 64 {
            return;
        }
        match t {
            ScatteredTerm::Empty | ScatteredTerm::Letter(_) => {}
            ScatteredTerm::Concat(cs) => {
                let mut off = origin.clone();
                for c in cs {
                    out.push(off.clone());
                    boundaries(c, &off, out);
                    off = off.add(&WordTerm(c.clone()).length());
                }
            }
            ScatteredTerm::Power(b, e) => {
                let l = WordTerm(b.as_ref().clone()).length();
                for q in [Ordinal::from(0), Ordinal::from(1), Ordinal::omega()] {
                    if &q < e {
                        let off = origin.add(&l.mul(&q));
                        out.push(off.clone());
                        boundaries(b, &off, out);
                    }
                }
            }
            ScatteredTerm::StarPower(_) => {}
        }
    }
    let mut cands = Vec::new();
    for i in 0..20u64 {
        cands.push(Ordinal::from(i));
    }
    boundaries(w.as_term(), &Ordinal::zero(), &mut cands);
    let mut with_offsets = Vec::new();
    for c in cands {
        for j in 0..3u64 {
            with_offsets.push(c.add(&Ordinal::from(j)));
        }
    }
    with_offsets.sort();
    with_offsets.dedup();
    with_offsets.retain(|p| p < len);
    with_offsets.truncate(96);
    with_offsets
}

// ---------------------------------------------------------------------------
// Ordered sums of labeled orders

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderedSumError {
    BadIndex(String),
}

impl fmt::Display for OrderedSumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderedSumError::BadIndex(s) => write!(f, "shape leaf '{}' is not a part index", s),
        }
    }
}

/// Substitutes `parts[i]` for each leaf `i` of `shape` and normalizes;
/// the scattered generalization of `concat_seq`.
pub fn ordered_sum(
    parts: &[LabeledOrder],
    shape: &ScatteredTerm,
) -> Result<LabeledOrder, OrderedSumError> {
    fn subst(
        t: &ScatteredTerm,
        parts: &[LabeledOrder],
    ) -> Result<ScatteredTerm, OrderedSumError> {
        Ok(match t {
            ScatteredTerm::Empty => ScatteredTerm::Empty,
            ScatteredTerm::Letter(lbl) => {
                let idx: usize = lbl
                    .parse()
                    .map_err(|_| OrderedSumError::BadIndex(lbl.clone()))?;
                parts
                    .get(idx)
                    .cloned()
                    .ok_or_else(|| OrderedSumError::BadIndex(lbl.clone()))?
            }
            ScatteredTerm::Concat(cs) => ScatteredTerm::concat(
                cs.iter()
                    .map(|c| subst(c, parts))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            ScatteredTerm::Power(b, e) => ScatteredTerm::power(subst(b, parts)?, e.clone()),
            ScatteredTerm::StarPower(b) => ScatteredTerm::star(subst(b, parts)?),
        })
    }
    Ok(subst(shape, parts)?.normalize())
}

// ---------------------------------------------------------------------------
// Text form: `()` empty, identifiers as letters, `.` concatenation,
// `^(ordinal)` powers, `^*` star powers.

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

pub fn render(t: &ScatteredTerm) -> String {
    fn atom(t: &ScatteredTerm, out: &mut String) {
        match t {
            ScatteredTerm::Letter(s) => out.push_str(s),
            other => {
                out.push('(');
                go(other, out);
                out.push(')');
            }
        }
    }
    fn go(t: &ScatteredTerm, out: &mut String) {
        match t {
            ScatteredTerm::Empty => out.push_str("()"),
            ScatteredTerm::Letter(s) => out.push_str(s),
            ScatteredTerm::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push('.');
                    }
                    match c {
                        ScatteredTerm::Concat(_) => atom(c, out),
                        _ => go(c, out),
                    }
                }
            }
            ScatteredTerm::Power(b, e) => {
                atom(b, out);
                out.push_str("^(");
                out.push_str(&alloc::format!("{}", e));
                out.push(')');
            }
            ScatteredTerm::StarPower(b) => {
                atom(b, out);
                out.push_str("^*");
            }
        }
    }
    let mut out = String::new();
    go(t, &mut out);
    out
}

impl fmt::Display for ScatteredTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Debug for ScatteredTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Display for WordTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.0))
    }
}

impl fmt::Debug for WordTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl From<ParseOrdinalError> for WordParseError {
    fn from(e: ParseOrdinalError) -> Self {
        WordParseError {
            pos: e.pos,
            msg: e.msg,
        }
    }
}

struct WParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> WParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, WordParseError> {
        Err(WordParseError {
            pos: self.pos,
            msg: msg.to_owned(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<ScatteredTerm, WordParseError> {
        let mut parts = vec![self.factor()?];
        while self.peek() == Some(b'.') {
            self.pos += 1;
            parts.push(self.factor()?);
        }
        Ok(ScatteredTerm::concat(parts))
    }

    fn factor(&mut self) -> Result<ScatteredTerm, WordParseError> {
        let mut t = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    t = ScatteredTerm::star(t);
                }
                Some(b'(') => {
                    let start = self.pos;
                    let mut depth = 0usize;
                    let mut end = None;
                    for (i, &b) in self.src[start..].iter().enumerate() {
                        match b {
                            b'(' => depth += 1,
                            b')' => {
                                depth -= 1;
                                if depth == 0 {
                                    end = Some(start + i);
                                    break;
                                }
                            }
                            _ => {}
                        }
                    }
                    let end = match end {
                        Some(e) => e,
                        None => return self.err("unbalanced '(' in exponent"),
                    };
                    let inner = core::str::from_utf8(&self.src[start + 1..end])
                        .map_err(|_| WordParseError {
                            pos: start,
                            msg: "invalid utf-8".to_owned(),
                        })?;
                    let e: Ordinal = inner.parse().map_err(|e: ParseOrdinalError| {
                        WordParseError {
                            pos: start + 1 + e.pos,
                            msg: e.msg,
                        }
                    })?;
                    self.pos = end + 1;
                    t = ScatteredTerm::power(t, e);
                }
                _ => return self.err("expected '(' or '*' after '^'"),
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<ScatteredTerm, WordParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    return Ok(ScatteredTerm::Empty);
                }
                let inner = self.word()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    self.err("expected ')'")
                }
            }
            // composite element ids: a balanced {...}, [...] or <...> group
            // is one letter
            Some(open @ (b'{' | b'[' | b'<')) => {
                let close = match open {
                    b'{' => b'}',
                    b'[' => b']',
                    _ => b'>',
                };
                let start = self.pos;
                let mut depth = 0usize;
                while self.pos < self.src.len() {
                    let b = self.src[self.pos];
                    self.pos += 1;
                    if b == open {
                        depth += 1;
                    } else if b == close {
                        depth -= 1;
                        if depth == 0 {
                            let s =
                                core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                            return Ok(ScatteredTerm::letter(s));
                        }
                    }
                }
                self.err("unbalanced bracketed letter")
            }
            Some(c) if is_ident_byte(c) => {
                let start = self.pos;
                while self.pos < self.src.len() && is_ident_byte(self.src[self.pos]) {
                    self.pos += 1;
                }
                let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(ScatteredTerm::letter(s))
            }
            Some(_) => self.err("expected a letter or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses the word syntax into a scattered term. The parse is exact: the
/// term structure mirrors the text, up to the constructor invariants.
pub fn parse_scattered(s: &str) -> Result<ScatteredTerm, WordParseError> {
    let mut p = WParser {
        src: s.as_bytes(),
        pos: 0,
    };
    let t = p.word()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

/// Parses an ordinal word, rejecting ω*-powers.
pub fn parse_word(s: &str) -> Result<WordTerm, WordParseError> {
    let t = parse_scattered(s)?;
    WordTerm::try_from(t).map_err(|_| WordParseError {
        pos: 0,
        msg: "omega*-power not allowed in an ordinal word".to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> WordTerm {
        parse_word(s).unwrap()
    }

    fn st(s: &str) -> ScatteredTerm {
        parse_scattered(s).unwrap()
    }

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(WordTerm::empty().length(), Ordinal::zero());
        assert_eq!(w("(a.b)^(w)").length(), Ordinal::omega());
        assert_eq!(w("a^(w).b").length(), ord("w+1"));
        assert_eq!(w("(a.b.c)^(w*2)").length(), ord("w*2"));
    }

    #[test]
    fn letter_at_examples() {
        assert_eq!(w("(a.b)^(w)").letter_at(&ord("5")).unwrap(), "b");
        assert_eq!(w("a^(w).b").letter_at(&ord("w")).unwrap(), "b");
        // oracle: positions of (abc)^(w*2) below w+10 enumerate blocks
        // of 3; position w+4 sits at offset 1 of its block
        let t = w("(a.b.c)^(w*2)");
        assert_eq!(t.letter_at(&ord("w+4")).unwrap(), "b");
        for (i, expect) in ["a", "b", "c", "a", "b", "c", "a"].iter().enumerate() {
            assert_eq!(t.letter_at(&Ordinal::from(i as u64)).unwrap(), *expect);
        }
        assert_eq!(t.letter_at(&ord("w")).unwrap(), "a");
        assert!(t.letter_at(&ord("w*2")).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(w("a.(b.a)^(w)").normalize(), w("(a.b)^(w)"));
        assert_eq!(w("(a^(w))^(w)").normalize(), w("a^(w^2)"));
        assert_eq!(w("a.a.a").normalize(), w("a^(3)"));
        // finite rotation does not fire: both sides stay distinct terms
        // but are equal words
        assert_eq!(word_eq(&w("a.(b.a)^(3)"), &w("(a.b)^(3).a")), EqVerdict::Equal);
    }

    #[test]
    fn rotation_only_at_omega() {
        // a·(ba)^(ω·2) restarts its period with b at position ω, while
        // (ab)^(ω·2) restarts with a: the words differ and no rotation
        // may identify them
        let lhs = w("a.(b.a)^(w*2)");
        let rhs = w("(a.b)^(w*2)");
        let pos: Ordinal = "w".parse().unwrap();
        assert_eq!(lhs.letter_at(&pos).unwrap(), "b");
        assert_eq!(rhs.letter_at(&pos).unwrap(), "a");
        assert_eq!(lhs.normalize(), lhs);
        assert_eq!(word_eq(&lhs, &rhs), EqVerdict::Unequal);
        // same shape with ω² exponents
        let lhs = w("a.(b.a)^(w^2)");
        let rhs = w("(a.b)^(w^2)");
        assert_eq!(lhs.normalize(), lhs);
        assert_eq!(word_eq(&lhs, &rhs), EqVerdict::Unequal);
    }

    #[test]
    fn normalize_idempotent_and_preserving() {
        let samples = [
            "a.(b.a)^(w)",
            "(a^(w))^(w).b.b",
            "a.a.b.a^(2).c^(w)",
            "(a.b)^(w).(a.b)^(w)",
            "a.(b.a)^(w*2+3)",
        ];
        for s in samples {
            let t = w(s);
            let n = t.normalize();
            assert_eq!(n.normalize(), n, "normalize not idempotent on {}", s);
            assert_eq!(t.length(), n.length(), "length changed on {}", s);
            for i in 0..12u64 {
                let p = Ordinal::from(i);
                if p < t.length() {
                    assert_eq!(
                        t.letter_at(&p).unwrap(),
                        n.letter_at(&p).unwrap(),
                        "letter {} changed on {}",
                        i,
                        s
                    );
                }
            }
        }
    }

    #[test]
    fn word_eq_examples() {
        assert_eq!(word_eq(&w("(a.b)^(w)"), &w("a.(b.a)^(w)")), EqVerdict::Equal);
        assert_eq!(word_eq(&w("a^(w).b"), &w("a^(w)")), EqVerdict::Unequal);
        assert_eq!(word_eq(&w("(a^(w))^(w)"), &w("a^(w^2)")), EqVerdict::Equal);
        assert_eq!(word_eq(&w("(a.b)^(w)"), &w("(a.a.b)^(w)")), EqVerdict::Unequal);
        assert_eq!(
            word_eq(&w("(a.b)^(w).c"), &w("a.(b.a)^(w).c")),
            EqVerdict::Equal
        );
        // same length, different letters in the second chunk
        assert_eq!(
            word_eq(&w("a^(w).b^(w)"), &w("a^(w).a^(w)")),
            EqVerdict::Unequal
        );
    }

    #[test]
    fn concat_seq_examples() {
        let s = PiecewiseSeq::new(vec![(Ordinal::omega(), w("a.b"))]).unwrap();
        assert_eq!(concat_seq(&s), w("(a.b)^(w)"));
        let s = PiecewiseSeq::new(vec![
            (Ordinal::one(), w("a")),
            (Ordinal::one(), w("b")),
        ])
        .unwrap();
        assert_eq!(concat_seq(&s), w("a.b"));
        // runs a^w, b, a^w: length w + 1 + w = w*2
        let s = PiecewiseSeq::new(vec![
            (Ordinal::omega(), w("a")),
            (Ordinal::one(), w("b")),
            (Ordinal::omega(), w("a")),
        ])
        .unwrap();
        let t = concat_seq(&s);
        assert_eq!(t.length(), ord("w*2"));
        assert_eq!(t.letter_at(&Ordinal::zero()).unwrap(), "a");
        assert_eq!(t.letter_at(&ord("w")).unwrap(), "b");
        assert_eq!(t.letter_at(&ord("w+1")).unwrap(), "a");
    }

    #[test]
    fn ordered_sum_examples() {
        let a = st("a.a");
        let b = st("b");
        let sum = ordered_sum(&[a.clone(), b.clone()], &st("0.1")).unwrap();
        assert_eq!(sum, st("a^(2).b"));
        let sum = ordered_sum(&[st("a.b")], &st("0^(w)")).unwrap();
        assert_eq!(sum, st("(a.b)^(w)"));
        // the ζ-shaped all-a word
        let zeta = ordered_sum(&[st("a")], &st("0^*.0^(w)")).unwrap();
        assert_eq!(zeta, st("a^*.a^(w)"));
        assert!(ordered_sum(&[st("a")], &st("0.3")).is_err());
    }

    #[test]
    fn parse_render_roundtrip() {
        for s in [
            "()",
            "a",
            "a.b.c",
            "(a.b)^(w)",
            "a^(w).b",
            "a^*.a^(w)",
            "(a.b)^(w^2*3 + 1)",
            "x_1.y2^(5)",
        ] {
            let t = st(s);
            assert_eq!(render(&t), s);
            assert_eq!(parse_scattered(&render(&t)).unwrap(), t);
        }
    }

    #[test]
    fn shape_ends() {
        assert_eq!(st("a^*.b^(w)").first_letter(), None);
        assert_eq!(st("a^*.b^(w)").last_letter(), None);
        assert_eq!(st("c.a^*").first_letter(), Some("c"));
        assert_eq!(st("c.a^*").last_letter(), Some("a"));
        assert_eq!(st("a^(w+1)").last_letter(), Some("a"));
        assert_eq!(st("a^(w)").last_letter(), None);
        assert_eq!(st("a^(w*2+1)").last_letter(), Some("a"));
    }

    #[test]
    fn star_normalization() {
        // x^(ω*) · x^3 collapses into the star power
        assert_eq!(st("x^*.x^(3)").normalize(), st("x^*"));
        // x^3 · x^(ω*) has a minimum and must stay as it is
        assert_eq!(st("x^(3).x^*").normalize(), st("x^(3).x^*"));
        // (x^2)^(ω*) has order type ω*
        assert_eq!(st("(x^(2))^*").normalize(), st("x^*"));
        // ζ stays ζ
        assert_eq!(st("x^*.x^(w)").normalize(), st("x^*.x^(w)"));
    }
}
