//! Finite presentation of an ordinal-indexed sequence as constant runs.

use alloc::vec::Vec;
use core::fmt;

use crate::ordinal::Ordinal;

/// A nonempty ordinal-indexed sequence given as finitely many constant
/// runs `(length, value)`. Adjacent runs with equal values are merged at
/// construction, so equality of presentations is syntactic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PiecewiseSeq<V> {
    runs: Vec<(Ordinal, V)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PiecewiseError {
    Empty,
    ZeroLengthRun,
}

impl fmt::Display for PiecewiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiecewiseError::Empty => write!(f, "a piecewise sequence needs at least one run"),
            PiecewiseError::ZeroLengthRun => write!(f, "run lengths must be nonzero"),
        }
    }
}

impl<V: PartialEq> PiecewiseSeq<V> {
    /// Builds a sequence, rejecting zero-length runs and merging adjacent
    /// runs that carry equal values (lengths combined by ordinal sum).
    pub fn new(runs: Vec<(Ordinal, V)>) -> Result<Self, PiecewiseError> {
        if runs.is_empty() {
            return Err(PiecewiseError::Empty);
        }
        let mut merged: Vec<(Ordinal, V)> = Vec::with_capacity(runs.len());
        for (len, v) in runs {
            if len.is_zero() {
                return Err(PiecewiseError::ZeroLengthRun);
            }
            match merged.last_mut() {
                Some((prev_len, prev_v)) if *prev_v == v => {
                    *prev_len = prev_len.add(&len);
                }
                _ => merged.push((len, v)),
            }
        }
        Ok(PiecewiseSeq { runs: merged })
    }

    pub fn runs(&self) -> &[(Ordinal, V)] {
        &self.runs
    }

    /// Total index length: the ordinal sum of the run lengths.
    pub fn length(&self) -> Ordinal {
        let mut acc = Ordinal::zero();
        for (len, _) in &self.runs {
            acc = acc.add(len);
        }
        acc
    }

    pub fn map<W: PartialEq>(&self, f: impl Fn(&V) -> W) -> PiecewiseSeq<W> {
        PiecewiseSeq::new(
            self.runs
                .iter()
                .map(|(len, v)| (len.clone(), f(v)))
                .collect(),
        )
        .expect("mapping preserves run validity")
    }
}
