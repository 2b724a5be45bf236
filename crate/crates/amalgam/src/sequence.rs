//! Finitely supported weighted sequences and their norms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exponent::{ReciprocalExponent, SmoothnessIndex};
use crate::numeric::{pairwise_sum, Power};

/// Index set and weight of a sequence space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeqKind {
    /// Indexed by `k ∈ Z`, weight `⟨k⟩^s`.
    Uniform,
    /// Indexed by `j ∈ N`, weight `2^{js}`.
    Dyadic,
}

impl SeqKind {
    /// `log2` of the weight at `index` for smoothness `s`.
    pub fn log2_weight(self, index: i64, s: f64) -> f64 {
        match self {
            SeqKind::Uniform => s * 0.5 * (1.0 + (index as f64).powi(2)).log2(),
            SeqKind::Dyadic => s * index as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeq {
    pub kind: SeqKind,
    pub entries: BTreeMap<i64, Complex64>,
}

impl WeightedSeq {
    pub fn new(kind: SeqKind) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Real entries `values[i]` at indices `first + i`.
    pub fn from_values(kind: SeqKind, first: i64, values: impl IntoIterator<Item = f64>) -> Self {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (first + i as i64, Complex64::new(v, 0.0)))
            .collect();
        Self { kind, entries }
    }

    pub fn get(&self, index: i64) -> Complex64 {
        self.entries.get(&index).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|index|` present.
    pub fn reach(&self) -> i64 {
        self.entries.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kind: self.kind,
            entries: self.entries.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Entries with `index < limit`.
    pub fn truncated(&self, limit: i64) -> Self {
        Self {
            kind: self.kind,
            entries: self.entries.range(..limit).map(|(k, v)| (*k, *v)).collect(),
        }
    }
}

/// `log2` of the weighted `ℓ_q` norm; `-∞` for the zero sequence.
///
/// Working in logarithms keeps dyadic weights like `2^{4096 s}` finite.
pub fn seq_log2_norm(a: &WeightedSeq, q: ReciprocalExponent, s: SmoothnessIndex) -> f64 {
    let s = s.to_f64();
    let logs: Vec<f64> = a
        .entries
        .iter()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(k, v)| v.norm().log2() + a.kind.log2_weight(*k, s))
        .collect();
    let Some(top) = logs.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    match q.to_power() {
        Power::Infinite => top,
        Power::Finite(q) => {
            let terms: Vec<f64> = logs.iter().map(|l| ((l - top) * q).exp2()).collect();
            top + pairwise_sum(&terms).log2() / q
        }
    }
}

/// Weighted `ℓ_q` norm with `⟨k⟩^s` or `2^{js}`; `q = ∞` is the weighted sup.
pub fn seq_norm(a: &WeightedSeq, q: ReciprocalExponent, s: SmoothnessIndex) -> f64 {
    seq_log2_norm(a, q, s).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn deltas_and_counting() {
        let s = SmoothnessIndex::new(3, 2);
        let mut d = WeightedSeq::new(SeqKind::Uniform);
        d.entries.insert(3, Complex64::new(1.0, 0.0));
        assert_relative_eq!(
            seq_norm(&d, ReciprocalExponent::p(2), s),
            10f64.powf(0.75),
            max_relative = 1e-14
        );
        let mut dy = WeightedSeq::new(SeqKind::Dyadic);
        dy.entries.insert(4, Complex64::new(1.0, 0.0));
        assert_relative_eq!(
            seq_norm(&dy, ReciprocalExponent::INFINITY, s),
            64.0,
            max_relative = 1e-14
        );
        let n = 10;
        let flat = WeightedSeq::from_values(SeqKind::Uniform, -n, vec![1.0; 2 * n as usize + 1]);
        assert_relative_eq!(
            seq_norm(&flat, ReciprocalExponent::p(2), SmoothnessIndex::zero()),
            21f64.sqrt(),
            max_relative = 1e-14
        );
        assert_eq!(
            seq_norm(
                &WeightedSeq::new(SeqKind::Dyadic),
                ReciprocalExponent::p(1),
                s
            ),
            0.0
        );
    }

    #[test]
    fn huge_dyadic_weights_stay_finite_in_log() {
        let a = WeightedSeq::from_values(SeqKind::Dyadic, 0, vec![1.0; 4096]);
        let l = seq_log2_norm(&a, ReciprocalExponent::p(2), SmoothnessIndex::new(1, 2));
        assert!(l.is_finite() && l > 2000.0);
    }
}
