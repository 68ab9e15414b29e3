//! Extremum bookkeeping shared by the quadruple scans.
//!
//! Every scan reports the extremal value together with the lexicographically
//! smallest `(indices, pairing)` key achieving it. Merging two partial results
//! with [`Candidate::merge_max`] / [`Candidate::merge_min`] is associative and
//! commutative, so any partition of the index space reduces to the same
//! answer as a sequential scan.

use std::cmp::Ordering;

use crate::space::{Pairing, QuadrupleWitness};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Candidate {
    pub value: f64,
    pub indices: [usize; 4],
    pub pairing: Option<Pairing>,
}

impl Candidate {
    pub fn new(value: f64, indices: [usize; 4], pairing: Option<Pairing>) -> Self {
        Self {
            value,
            indices,
            pairing,
        }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.indices
            .cmp(&other.indices)
            .then(self.pairing.cmp(&other.pairing))
    }

    pub fn merge_max(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(match a.value.total_cmp(&b.value) {
                Ordering::Greater => a,
                Ordering::Less => b,
                Ordering::Equal if a.key_cmp(&b) != Ordering::Greater => a,
                Ordering::Equal => b,
            }),
        }
    }

    pub fn merge_min(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(match a.value.total_cmp(&b.value) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal if a.key_cmp(&b) != Ordering::Greater => a,
                Ordering::Equal => b,
            }),
        }
    }

    /// Replaces `slot` when `self` is strictly larger. Valid only when
    /// candidates are offered in increasing key order.
    #[inline]
    pub fn offer_max(slot: &mut Option<Self>, value: f64, indices: [usize; 4], pairing: Option<Pairing>) {
        if slot.is_none_or(|c| value > c.value) {
            *slot = Some(Self::new(value, indices, pairing));
        }
    }

    #[inline]
    pub fn offer_min(slot: &mut Option<Self>, value: f64, indices: [usize; 4], pairing: Option<Pairing>) {
        if slot.is_none_or(|c| value < c.value) {
            *slot = Some(Self::new(value, indices, pairing));
        }
    }

    pub fn witness(self) -> QuadrupleWitness {
        QuadrupleWitness {
            indices: self.indices,
            pairing: self.pairing,
            value: self.value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_resolve_to_smallest_key() {
        let a = Candidate::new(1.0, [0, 1, 2, 3], Some(Pairing::P13_24));
        let b = Candidate::new(1.0, [0, 1, 2, 3], Some(Pairing::P12_34));
        let c = Candidate::new(1.0, [0, 1, 2, 4], None);
        for (x, y) in [(a, b), (b, a)] {
            assert_eq!(Candidate::merge_max(Some(x), Some(y)), Some(b));
            assert_eq!(Candidate::merge_min(Some(x), Some(y)), Some(b));
        }
        assert_eq!(Candidate::merge_max(Some(c), Some(a)), Some(a));
        let big = Candidate::new(2.0, [5, 5, 5, 5], None);
        assert_eq!(Candidate::merge_max(Some(a), Some(big)), Some(big));
        assert_eq!(Candidate::merge_min(Some(a), Some(big)), Some(a));
        assert_eq!(Candidate::merge_max(None, Some(a)), Some(a));
    }
}
