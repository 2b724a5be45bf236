use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exponent::{ReciprocalExponent, SmoothnessIndex};
use crate::sequence::{seq_log2_norm, SeqKind, WeightedSeq};

/// Truncation lengths `2^4, …, 2^12` searched by the oracle.
pub const ORACLE_TRUNCATIONS: std::ops::RangeInclusive<u32> = 4..=12;

/// A growth factor of at least `1.125` over the truncation range…
const MIN_GROWTH_LOG2: f64 = 0.169_925_001_442_312_37;
/// …whose last `log2` increment keeps at least this share of the first.
const TAIL_SHARE: f64 = 0.25;
const PERTURBATIONS: u64 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub holds_estimate: bool,
    /// The candidate with the largest growth, at the longest truncation.
    pub witness: WeightedSeq,
    pub witness_label: String,
    pub candidate: OracleCandidate,
    /// `(truncation, target_norm / source_norm)` for the witness.
    pub ratios: Vec<(usize, f64)>,
    /// `log2` of the same ratios; finite where `ratios` overflows.
    pub log2_ratios: Vec<f64>,
    pub growth: f64,
}

/// Sequence shapes searched by the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OracleCandidate {
    /// `w(k)^{-θ}` for the kind's weight `w`.
    Power(f64),
    SpikeAtZero,
    /// `δ` at the last index of each truncation.
    SpikeAtTop,
    /// A power law times seeded factors drawn from `[1/2, 3/2)`.
    Perturbed(f64, u64),
}

impl OracleCandidate {
    pub fn label(self) -> String {
        match self {
            OracleCandidate::Power(t) => format!("power({t})"),
            OracleCandidate::SpikeAtZero => "spike(0)".into(),
            OracleCandidate::SpikeAtTop => "spike(top)".into(),
            OracleCandidate::Perturbed(t, seed) => format!("power({t})*random({seed})"),
        }
    }

    /// The candidate truncated to `len` entries.
    pub fn build(self, kind: SeqKind, len: usize) -> WeightedSeq {
        let decay = |k: i64, theta: f64| (-kind.log2_weight(k, theta)).exp2();
        match self {
            OracleCandidate::Power(theta) => {
                WeightedSeq::from_values(kind, 0, (0..len as i64).map(|k| decay(k, theta)))
            }
            OracleCandidate::SpikeAtZero => WeightedSeq::from_values(kind, 0, [1.0]),
            OracleCandidate::SpikeAtTop => WeightedSeq::from_values(kind, len as i64 - 1, [1.0]),
            OracleCandidate::Perturbed(theta, seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values: Vec<f64> = (0..len as i64)
                    .map(|k| decay(k, theta) * rng.random_range(0.5..1.5))
                    .collect();
                WeightedSeq::from_values(kind, 0, values)
            }
        }
    }
}

struct Trace {
    candidate: OracleCandidate,
    log_ratios: Vec<f64>,
}

impl Trace {
    fn growth_log2(&self) -> f64 {
        self.log_ratios.last().unwrap_or(&0.0) - self.log_ratios.first().unwrap_or(&0.0)
    }

    fn diverges(&self) -> bool {
        let lr = &self.log_ratios;
        if lr.len() < 3 || !lr.iter().all(|v| v.is_finite()) {
            return false;
        }
        let first = lr[1] - lr[0];
        let last = lr[lr.len() - 1] - lr[lr.len() - 2];
        self.growth_log2() >= MIN_GROWTH_LOG2 && last > 0.0 && last >= TAIL_SHARE * first
    }
}

/// Searches power laws `w(k)^{-θ}` (`θ = -2, -7/4, …, 4`), spikes at both
/// ends and randomly perturbed power laws for a ratio
/// `‖a‖_{ℓ^{s2}_{q2}} / ‖a‖_{ℓ^{s1}_{q1}}` that keeps growing over the
/// truncations `2^4..=2^12` (capped at `budget`).
pub fn seq_embedding_oracle(
    q1: ReciprocalExponent,
    s1: SmoothnessIndex,
    q2: ReciprocalExponent,
    s2: SmoothnessIndex,
    kind: SeqKind,
    budget: usize,
) -> OracleResult {
    let lengths: Vec<usize> = ORACLE_TRUNCATIONS
        .map(|e| 1usize << e)
        .filter(|&t| t <= budget.max(16))
        .collect();
    let longest = *lengths.last().expect("at least one truncation");
    let mut candidates: Vec<OracleCandidate> = (-8..=16)
        .map(|i| OracleCandidate::Power(i as f64 / 4.0))
        .collect();
    candidates.push(OracleCandidate::SpikeAtZero);
    candidates.push(OracleCandidate::SpikeAtTop);
    for i in 0..PERTURBATIONS {
        candidates.push(OracleCandidate::Perturbed((i as f64 - 2.0) / 2.0, i));
    }
    let traces: Vec<Trace> = candidates
        .par_iter()
        .map(|&candidate| {
            let full = candidate.build(kind, longest);
            let log_ratios = lengths
                .iter()
                .map(|&t| {
                    let a = match candidate {
                        OracleCandidate::SpikeAtTop => candidate.build(kind, t),
                        _ => full.truncated(t as i64),
                    };
                    seq_log2_norm(&a, q2, s2) - seq_log2_norm(&a, q1, s1)
                })
                .collect();
            Trace {
                candidate,
                log_ratios,
            }
        })
        .collect();
    let holds_estimate = !traces.iter().any(Trace::diverges);
    let best = traces
        .iter()
        .filter(|t| holds_estimate || t.diverges())
        .max_by(|a, b| a.growth_log2().total_cmp(&b.growth_log2()))
        .expect("candidate list is not empty");
    OracleResult {
        holds_estimate,
        witness: best.candidate.build(kind, longest),
        witness_label: best.candidate.label(),
        candidate: best.candidate,
        ratios: lengths
            .iter()
            .zip(&best.log_ratios)
            .map(|(&t, lr)| (t, lr.exp2()))
            .collect(),
        log2_ratios: best.log_ratios.clone(),
        growth: best.growth_log2().exp2(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(num: i64, den: i64) -> ReciprocalExponent {
        ReciprocalExponent::inv(num, den)
    }

    #[test]
    fn identity_holds_with_unit_ratio() {
        let s = SmoothnessIndex::new(1, 4);
        let r = seq_embedding_oracle(u(1, 2), s, u(1, 2), s, SeqKind::Uniform, 4096);
        assert!(r.holds_estimate);
        assert!(r.ratios.iter().all(|(_, v)| *v == 1.0));
    }

    #[test]
    fn uniform_smoothness_trade_holds() {
        let r = seq_embedding_oracle(
            u(1, 2),
            SmoothnessIndex::new(1, 1),
            u(1, 4),
            SmoothnessIndex::zero(),
            SeqKind::Uniform,
            4096,
        );
        assert!(r.holds_estimate);
    }

    #[test]
    fn dyadic_four_into_two_fails_with_a_power_law() {
        let s0 = SmoothnessIndex::zero();
        let r = seq_embedding_oracle(u(1, 4), s0, u(1, 2), s0, SeqKind::Dyadic, 4096);
        assert!(!r.holds_estimate);
        assert!(r.witness_label.starts_with("power"), "{}", r.witness_label);
        assert!(r.growth > 2.0);
    }
}
