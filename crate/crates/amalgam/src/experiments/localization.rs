use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, ProbePoint};
use crate::exponent::{Family, SpaceSpec};
use crate::filters::{FilterBank, PartitionCell};
use crate::grid::{GridFunction, GridSpec};
use crate::norms::{localized_norm, triebel_norm, wiener_norm, NormError};

/// Ratio spread allowed between localized and direct norms.
pub const LOCALIZATION_SPREAD: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    /// `parameter` is the member index; `source_norm` the direct norm,
    /// `target_norm` the localized one.
    pub points: Vec<ProbePoint>,
    /// `max ratio / min ratio`.
    pub spread: f64,
    pub within_bound: bool,
}

/// Modulated Gaussians with random centers in `[-L/8, L/8]`, widths in
/// `[1/2, 2]`, frequencies in `[-4, 4]` and phases.
pub fn gaussian_family(spec: GridSpec, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = spec.extent() / 8.0;
    (0..count)
        .map(|_| {
            let center = rng.random_range(-reach..reach);
            let width = rng.random_range(0.5..2.0);
            let eta = rng.random_range(-4.0..4.0);
            let phase = rng.random_range(0.0..1.0);
            GridFunction::from_fn(spec, |x| {
                let t = (x - center) / width;
                Complex64::from_polar((-PI * t * t).exp(), 2.0 * PI * (eta * x + phase))
            })
        })
        .collect()
}

/// Localized-to-direct norm ratios over a family, for a Wiener amalgam or
/// Triebel-Lizorkin space.
pub fn localization_check(
    family: &[GridFunction],
    partition: &[PartitionCell],
    space: &SpaceSpec,
) -> Result<LocalizationReport, ExperimentError> {
    let mut points = Vec::with_capacity(family.len());
    for (i, f) in family.iter().enumerate() {
        let direct = match space.family {
            Family::WienerAmalgam => wiener_norm(f, space.p, space.q, space.s)?,
            Family::TriebelLizorkin => {
                let bank = FilterBank::new(*f.spec(), FilterBank::max_shells(f.spec()))
                    .map_err(NormError::from)?;
                triebel_norm(f, &bank, space.p, space.q, space.s)?
            }
            other => return Err(NormError::NotLocalizable(other).into()),
        };
        let local = localized_norm(f, partition, space, space.p)?;
        points.push(ProbePoint::new(i as f64, direct, local));
    }
    let top = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let bottom = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let spread = top / bottom;
    Ok(LocalizationReport {
        points,
        spread,
        within_bound: spread <= LOCALIZATION_SPREAD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{ReciprocalExponent, SmoothnessIndex};
    use crate::filters::uniform_partition;

    #[test]
    fn translates_share_a_ratio() {
        let spec = GridSpec::new(32.0, 1 << 11).unwrap();
        let base = GridFunction::from_fn(spec, |x| Complex64::new((-PI * x * x).exp(), 0.0));
        let family = vec![
            base.clone(),
            base.translate_samples(256),
            base.translate_samples(-512),
        ];
        let w = SpaceSpec::try_new(
            Family::WienerAmalgam,
            ReciprocalExponent::p(2),
            ReciprocalExponent::p(2),
            SmoothnessIndex::zero(),
            1,
        )
        .unwrap();
        let report = localization_check(&family, &uniform_partition(spec), &w).unwrap();
        for p in &report.points {
            assert!((p.ratio / report.points[0].ratio - 1.0).abs() < 1e-2);
        }
        let single = localization_check(&family[..1], &uniform_partition(spec), &w).unwrap();
        assert!(single.points[0].ratio > 0.0 && single.spread == 1.0);
    }
}
