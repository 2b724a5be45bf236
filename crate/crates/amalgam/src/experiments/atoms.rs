use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, ProbePoint, ScheduleAxis};
use crate::exponent::{ReciprocalExponent, SmoothnessIndex};
use crate::norms::{local_hardy_norm, wiener_norm};
use crate::numeric::{fit_line, LineFit};
use crate::witnesses::{make_atom, AtomKind};

pub const ATOM_FAMILY_SIZE: usize = 12;

/// Cube sides with `log2 |Q| = -6 + 10k/11`, `k = 0..12`.
pub fn atom_family_sizes() -> Vec<f64> {
    (0..ATOM_FAMILY_SIZE)
        .map(|k| (-6.0 + 10.0 * k as f64 / (ATOM_FAMILY_SIZE - 1) as f64).exp2())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomProbe {
    pub p: ReciprocalExponent,
    pub q: ReciprocalExponent,
    pub s: SmoothnessIndex,
    /// `parameter` is `|Q|`, `source_norm` the local Hardy norm and
    /// `target_norm` the Wiener amalgam norm.
    pub points: Vec<ProbePoint>,
    /// Fit of `log2 ‖a‖_{h_p}` against `log2 |Q|`.
    pub hardy_fit: Option<LineFit>,
    /// Fit of `log2 ‖a‖_{W^s_{p,q}}` against `log2 |Q|`.
    pub wiener_fit: Option<LineFit>,
}

/// Norms of a seeded atom family in one dimension, with
/// `s = 1 - 1/p - 1/q`; atom `k` uses seed `seed + k`.
pub fn atom_uniformity(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    seed: u64,
) -> Result<AtomProbe, ExperimentError> {
    let s = SmoothnessIndex(num_rational::Ratio::from_integer(1) - p.value() - q.value());
    let points = atom_family_sizes()
        .into_par_iter()
        .enumerate()
        .map(|(k, side)| {
            let kind = if side < 1.0 {
                AtomKind::Small
            } else {
                AtomKind::Big
            };
            let atom = make_atom(kind, p, side, seed + k as u64)?;
            let hardy = local_hardy_norm(&atom.values, p)?;
            let wiener = wiener_norm(&atom.values, p, q, s)?;
            Ok(ProbePoint::new(side, hardy, wiener))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let fit = |pick: fn(&ProbePoint) -> f64| {
        let xs: Vec<f64> = points
            .iter()
            .map(|pt| ScheduleAxis::Log.abscissa(pt.parameter))
            .collect();
        let ys: Vec<f64> = points.iter().map(|pt| pick(pt).log2()).collect();
        fit_line(&xs, &ys)
    };
    Ok(AtomProbe {
        p,
        q,
        s,
        hardy_fit: fit(|pt| pt.source_norm),
        wiener_fit: fit(|pt| pt.target_norm),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_spans_ten_octaves() {
        let sizes = atom_family_sizes();
        assert_eq!(sizes.len(), 12);
        assert!((sizes[0] - 1.0 / 64.0).abs() < 1e-15);
        assert!((sizes[11] - 16.0).abs() < 1e-12);
    }
}
