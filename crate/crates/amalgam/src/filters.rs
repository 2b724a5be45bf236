//! Smooth cutoffs: the Littlewood-Paley filter bank and the uniform
//! partition of unity, both glued from the same `exp(-1/t)` transition.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Domain, GridError, GridFunction, GridSpec};

/// `0` for `t ≤ 0`, `1` for `t ≥ 1`, smooth in between, and
/// `smooth_step(t) + smooth_step(1 - t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Low-pass bump: exactly `1` on `|ξ| ≤ 4/3`, exactly `0` on `|ξ| ≥ 3/2`.
pub fn low_pass(xi: f64) -> f64 {
    smooth_step((1.5 - xi.abs()) * 6.0)
}

/// Shell `j` of the Littlewood-Paley system at frequency `xi`.
pub fn shell(j: u32, xi: f64) -> f64 {
    let scale = 2f64.powi(j as i32);
    if j == 0 {
        low_pass(xi)
    } else {
        low_pass(xi / scale) - low_pass(2.0 * xi / scale)
    }
}

/// Frequencies on which shell `j` equals `1` exactly.
pub fn flat_band(j: u32) -> (f64, f64) {
    let scale = 2f64.powi(j as i32);
    if j == 0 {
        (0.0, 4.0 / 3.0)
    } else {
        (0.75 * scale, 4.0 / 3.0 * scale)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("jmax must be at least 1")]
    NoShells,
    #[error("shell {jmax} reaches |ξ| = {top} but the grid resolves only |ξ| < {band_edge}")]
    Aliasing { jmax: u32, top: f64, band_edge: f64 },
    #[error("shell index {j} outside 0..={jmax}")]
    ShellOutOfRange { j: u32, jmax: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Shells `ψ_0, …, ψ_jmax` sampled on a grid's frequency axis.
#[derive(Clone, Debug)]
pub struct FilterBank {
    spec: GridSpec,
    jmax: u32,
    filters: Vec<Vec<f64>>,
}

impl FilterBank {
    pub fn new(spec: GridSpec, jmax: u32) -> Result<Self, FilterError> {
        if jmax == 0 {
            return Err(FilterError::NoShells);
        }
        let top = 2f64.powi(jmax as i32) * 1.5;
        let band_edge = spec.band() / 2.0;
        if top >= band_edge {
            return Err(FilterError::Aliasing {
                jmax,
                top,
                band_edge,
            });
        }
        let xis = spec.xis();
        let filters = (0..=jmax)
            .map(|j| xis.iter().map(|&xi| shell(j, xi)).collect())
            .collect();
        Ok(Self {
            spec,
            jmax,
            filters,
        })
    }

    /// Largest admissible `jmax` for a grid.
    pub fn max_shells(spec: &GridSpec) -> u32 {
        let edge = spec.band() / 2.0;
        (1..64)
            .take_while(|&j| 2f64.powi(j) * 1.5 < edge)
            .last()
            .unwrap_or(0) as u32
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn jmax(&self) -> u32 {
        self.jmax
    }

    pub fn filter(&self, j: u32) -> &[f64] {
        &self.filters[j as usize]
    }

    /// `Δ_j f = F^{-1} ψ_j F f`.
    pub fn project(&self, f: &GridFunction, j: u32) -> Result<GridFunction, FilterError> {
        if j > self.jmax {
            return Err(FilterError::ShellOutOfRange { j, jmax: self.jmax });
        }
        if *f.spec() != self.spec {
            return Err(GridError::GridMismatch.into());
        }
        let hat = f.fourier()?;
        Ok(self.project_spectrum(&hat, j).inverse_fourier()?)
    }

    /// All blocks `Δ_0 f, …, Δ_jmax f` sharing one forward transform.
    pub fn decompose(&self, f: &GridFunction) -> Result<Vec<GridFunction>, FilterError> {
        if *f.spec() != self.spec {
            return Err(GridError::GridMismatch.into());
        }
        let hat = f.fourier()?;
        (0..=self.jmax)
            .map(|j| Ok(self.project_spectrum(&hat, j).inverse_fourier()?))
            .collect()
    }

    fn project_spectrum(&self, hat: &GridFunction, j: u32) -> GridFunction {
        let psi = self.filter(j);
        let values = hat.values().iter().zip(psi).map(|(v, w)| v * *w).collect();
        GridFunction::new(self.spec, Domain::Frequency, values)
            .expect("filtering keeps samples finite")
    }

    /// Squared `L_2` mass of `f̂` above the flat region of shell `jmax - 1`,
    /// relative to the total.
    pub fn mass_above_top(&self, f: &GridFunction) -> Result<f64, FilterError> {
        let hat = f.fourier()?;
        let cut = flat_band(self.jmax - 1).1;
        let total: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return Ok(0.0);
        }
        let above: f64 = hat
            .values()
            .iter()
            .enumerate()
            .filter(|(l, _)| self.spec.xi(*l).abs() > cut)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        Ok(above / total)
    }
}

/// `ψ(x) = S(1 - |x|)`, supported on `[-1, 1]`; integer translates sum to 1.
pub fn partition_bump(x: f64) -> f64 {
    smooth_step(1.0 - x.abs())
}

/// One cell of the uniform partition of unity.
#[derive(Clone, Debug)]
pub struct PartitionCell {
    pub center: i64,
    pub window: GridFunction,
}

/// `ψ_k = ψ(· - k)` for every integer `k` in `[-L/2, L/2]`.
pub fn uniform_partition(spec: GridSpec) -> Vec<PartitionCell> {
    let half = (spec.extent() / 2.0).floor() as i64;
    (-half..=half)
        .map(|k| PartitionCell {
            center: k,
            window: GridFunction::from_fn(spec, |x| {
                Complex64::new(partition_bump(x - k as f64), 0.0)
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_and_shell_values() {
        assert_eq!(low_pass(4.0 / 3.0), 1.0);
        assert_eq!(low_pass(1.5), 0.0);
        assert_eq!(shell(1, 2.0), 1.0);
        assert_eq!(shell(0, 0.0), 1.0);
        for j in 1..10 {
            assert_eq!(shell(j, 2f64.powi(j as i32)), 1.0);
            let (lo, hi) = flat_band(j);
            assert_eq!(shell(j, lo), 1.0);
            assert_eq!(shell(j, hi), 1.0);
            assert_eq!(shell(j, -hi), 1.0);
        }
    }

    #[test]
    fn shell_supports() {
        for j in 1..8u32 {
            let s = 2f64.powi(j as i32);
            assert_eq!(shell(j, s * 2.0 / 3.0), 0.0);
            assert_eq!(shell(j, s * 1.5), 0.0);
            assert!(shell(j, s * 0.7) > 0.0);
        }
    }

    #[test]
    fn bank_rejects_aliasing() {
        let spec = GridSpec::new(64.0, 1 << 14).unwrap();
        assert!(FilterBank::new(spec, 8).is_err());
        assert_eq!(FilterBank::max_shells(&spec), 6);
        assert!(FilterBank::new(spec, 6).is_ok());
    }

    #[test]
    fn partition_sums_to_one() {
        let spec = GridSpec::new(16.0, 1024).unwrap();
        let cells = uniform_partition(spec);
        let at = |x: f64| {
            cells
                .iter()
                .map(|c| partition_bump(x - c.center as f64))
                .sum::<f64>()
        };
        assert!((at(0.37) - 1.0).abs() < 1e-12);
        assert_eq!(partition_bump(0.0), 1.0);
        assert_eq!(partition_bump(2.0), 0.0);
        assert_eq!(partition_bump(-1.0), 0.0);
        for m in (64..960).step_by(7) {
            let total: f64 = cells.iter().map(|c| c.window.values()[m].re).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    proptest::proptest! {
        #[test]
        fn shells_are_bounded_and_telescope(xi in -400.0f64..400.0) {
            let mut total = 0.0;
            for j in 0..=8 {
                let v = shell(j, xi);
                proptest::prop_assert!((0.0..=1.0).contains(&v));
                total += v;
            }
            if xi.abs() <= 2.0 / 3.0 * 256.0 {
                proptest::prop_assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }
}
