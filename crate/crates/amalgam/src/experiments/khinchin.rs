use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::exponent::ReciprocalExponent;
use crate::grid::GridSpec;
use crate::norms::trig_values;
use crate::numeric::{pairwise_sum, Power};
use crate::sequence::{SeqKind, WeightedSeq};
use crate::witnesses::{Profile, SignVector};

/// Samples per unit length; `e^{2πikx}` repeats every `RESIDUES` samples.
const RESIDUES: usize = 128;
const EXTENT: f64 = 1024.0;
pub const MIN_TRIALS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinEstimate {
    /// Mean of `‖G^ω‖_{L_p}^p` over the trials.
    pub empirical_mean: f64,
    /// `‖a‖_{ℓ_2}^p ‖g‖_{L_p}^p`.
    pub reference: f64,
    pub ratio: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of `E ‖Σ_k ω_k a_k M_k g‖_{L_p}^p`; trial `t` draws
/// its signs from stream `t` of the seeded generator.
///
/// Because `g` varies on scales far above one period of every `e^{2πikx}`,
/// the integral splits into per-residue weights `Σ_{m ≡ r} |g(x_m)|^p Δx`
/// times `|P(r/128)|^p`, so each trial costs one FFT of length 128.
pub fn khinchin_mc(
    a: &WeightedSeq,
    p: ReciprocalExponent,
    trials: usize,
    seed: u64,
) -> Result<KhinchinEstimate, ExperimentError> {
    let bad = |reason: &str| ExperimentError::Parameter {
        key: "khinchin".into(),
        reason: reason.into(),
    };
    if a.kind != SeqKind::Uniform {
        return Err(bad("coefficients must be a uniform sequence"));
    }
    if a.entries
        .keys()
        .any(|&k| !(-(RESIDUES as i64) / 2..(RESIDUES as i64) / 2).contains(&k))
    {
        return Err(bad("indices must lie in [-64, 64)"));
    }
    if trials < MIN_TRIALS {
        return Err(bad("at least 1000 trials are required"));
    }
    let Power::Finite(exp) = p.to_power() else {
        return Err(bad("p must be finite"));
    };
    let spec = GridSpec::new(EXTENT, EXTENT as usize * RESIDUES)?;
    let g = Profile::Lattice.sample(spec)?;
    let mut weights = vec![0.0; RESIDUES];
    for (m, v) in g.values().iter().enumerate() {
        weights[m % RESIDUES] += v.norm().powf(exp) * spec.dx();
    }
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let signs = SignVector::draw(seed, t, a.entries.keys().copied());
            let signed = WeightedSeq {
                kind: SeqKind::Uniform,
                entries: a
                    .entries
                    .iter()
                    .map(|(&k, &c)| (k, c * signs.get(k)))
                    .collect(),
            };
            let terms: Vec<f64> = trig_values(&signed, RESIDUES)
                .iter()
                .zip(&weights)
                .map(|(v, w)| w * v.norm().powf(exp))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let empirical_mean = pairwise_sum(&values) / trials as f64;
    let l2: f64 =
        pairwise_sum(&a.entries.values().map(|c| c.norm_sqr()).collect::<Vec<_>>()).sqrt();
    let reference = l2.powf(exp) * pairwise_sum(&weights);
    Ok(KhinchinEstimate {
        empirical_mean,
        reference,
        ratio: empirical_mean / reference,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::{make_truncated_seq, SeqGenerator};

    #[test]
    fn p_two_is_exact() {
        let a = make_truncated_seq(SeqGenerator::Random(5), SeqKind::Uniform, 20);
        let est = khinchin_mc(&a, ReciprocalExponent::p(2), 1000, 1).unwrap();
        assert!((est.ratio - 1.0).abs() < 1e-6, "{}", est.ratio);
    }

    #[test]
    fn homogeneous_in_the_coefficients() {
        let a = make_truncated_seq(SeqGenerator::Flat, SeqKind::Uniform, 8);
        let p = ReciprocalExponent::p(4);
        let base = khinchin_mc(&a, p, 1000, 3).unwrap();
        let scaled = khinchin_mc(&a.scaled(3.0), p, 1000, 3).unwrap();
        assert!((scaled.ratio / base.ratio - 1.0).abs() < 1e-10);
        assert_eq!(base, khinchin_mc(&a, p, 1000, 3).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let a = make_truncated_seq(SeqGenerator::Flat, SeqKind::Uniform, 8);
        assert!(khinchin_mc(&a, ReciprocalExponent::p(2), 10, 0).is_err());
        assert!(khinchin_mc(&a, ReciprocalExponent::INFINITY, 1000, 0).is_err());
        let far = WeightedSeq::from_values(SeqKind::Uniform, 100, [1.0]);
        assert!(khinchin_mc(&far, ReciprocalExponent::p(2), 1000, 0).is_err());
    }
}
