//! Uniform one-dimensional grids and the continuous-convention Fourier
//! transform `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx` approximated by the FFT.
//!
//! Sample `m` of a time-domain function sits at `x_m = -L/2 + m·Δx`; sample
//! `l` of a frequency-domain function sits at `ξ_l = (l - M/2)/L`.

mod chirp;
pub mod io;

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::pairwise_sum;
use crate::spectrum::Spectrum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("extent must be positive and finite, got {0}")]
    BadExtent(f64),
    #[error("sample count must be a power of two and at least 4, got {0}")]
    BadSampleCount(usize),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sample {0} is not finite")]
    NonFinite(usize),
    #[error("operation needs a {expected:?}-domain function")]
    WrongDomain { expected: Domain },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("dilation factor {factor} outside the resolvable range [{min}, {max}]")]
    Unresolvable { factor: f64, min: f64, max: f64 },
}

/// Uniform grid on `[-L/2, L/2)` with `M` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    extent: f64,
    samples: usize,
}

impl GridSpec {
    pub fn new(extent: f64, samples: usize) -> Result<Self, GridError> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(GridError::BadExtent(extent));
        }
        if samples < 4 || !samples.is_power_of_two() {
            return Err(GridError::BadSampleCount(samples));
        }
        Ok(Self { extent, samples })
    }

    /// Grid with extent `L` and spacing `Δx` (`L/Δx` rounded up to a power of two).
    pub fn with_spacing(extent: f64, dx: f64) -> Result<Self, GridError> {
        let m = (extent / dx).ceil().max(4.0) as usize;
        Self::new(extent, m.next_power_of_two())
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dx(&self) -> f64 {
        self.extent / self.samples as f64
    }

    pub fn dxi(&self) -> f64 {
        1.0 / self.extent
    }

    /// Width `M/L` of the resolved frequency band.
    pub fn band(&self) -> f64 {
        self.samples as f64 / self.extent
    }

    pub fn x(&self, m: usize) -> f64 {
        -self.extent / 2.0 + m as f64 * self.dx()
    }

    pub fn xi(&self, l: usize) -> f64 {
        (l as f64 - (self.samples / 2) as f64) / self.extent
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.samples).map(|m| self.x(m)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.samples).map(|l| self.xi(l)).collect()
    }

    pub fn coord(&self, domain: Domain, i: usize) -> f64 {
        match domain {
            Domain::Time => self.x(i),
            Domain::Frequency => self.xi(i),
        }
    }

    pub fn cell(&self, domain: Domain) -> f64 {
        match domain {
            Domain::Time => self.dx(),
            Domain::Frequency => self.dxi(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Time,
    Frequency,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

fn alternate(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Complex samples of a function on a [`GridSpec`], in time or frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    spec: GridSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, domain: Domain, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != spec.samples {
            return Err(GridError::LengthMismatch {
                expected: spec.samples,
                got: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(GridError::NonFinite(i));
        }
        Ok(Self {
            spec,
            domain,
            values,
        })
    }

    pub fn zeros(spec: GridSpec, domain: Domain) -> Self {
        Self {
            spec,
            domain,
            values: vec![Complex64::new(0.0, 0.0); spec.samples],
        }
    }

    /// Samples `f(x_m)` of a time-domain function.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..spec.samples).map(|m| f(spec.x(m))).collect();
        Self {
            spec,
            domain: Domain::Time,
            values,
        }
    }

    /// Time samples of a function given through its Fourier transform.
    pub fn from_spectrum(spec: GridSpec, spectrum: &dyn Spectrum) -> Self {
        let values = (0..spec.samples)
            .map(|l| spectrum.eval(spec.xi(l)))
            .collect();
        Self {
            spec,
            domain: Domain::Frequency,
            values,
        }
        .inverse_fourier_unchecked()
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.spec.samples)
            .map(|i| self.spec.coord(self.domain, i))
            .collect()
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<(), GridError> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(GridError::WrongDomain { expected })
        }
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| f(self.spec.coord(self.domain, i), *v))
            .collect();
        Self {
            spec: self.spec,
            domain: self.domain,
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| c * v)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self, GridError> {
        if self.spec != other.spec || self.domain != other.domain {
            return Err(GridError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            spec: self.spec,
            domain: self.domain,
            values,
        })
    }

    pub fn multiply(&self, other: &GridFunction) -> Result<Self, GridError> {
        if self.spec != other.spec || self.domain != other.domain {
            return Err(GridError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            spec: self.spec,
            domain: self.domain,
            values,
        })
    }

    /// Continuous-convention transform of a time-domain function.
    pub fn fourier(&self) -> Result<Self, GridError> {
        self.expect_domain(Domain::Time)?;
        let n = self.spec.samples;
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(m, v)| v * alternate(m))
            .collect();
        forward_plan(n).process(&mut buf);
        let dx = self.spec.dx();
        let half = n / 2;
        for (l, v) in buf.iter_mut().enumerate() {
            *v *= dx * alternate(l + half);
        }
        Ok(Self {
            spec: self.spec,
            domain: Domain::Frequency,
            values: buf,
        })
    }

    /// Inverse of [`GridFunction::fourier`].
    pub fn inverse_fourier(&self) -> Result<Self, GridError> {
        self.expect_domain(Domain::Frequency)?;
        Ok(self.clone().inverse_fourier_unchecked())
    }

    fn inverse_fourier_unchecked(self) -> Self {
        let n = self.spec.samples;
        let half = n / 2;
        let mut buf: Vec<Complex64> = self
            .values
            .into_iter()
            .enumerate()
            .map(|(l, v)| v * alternate(l + half))
            .collect();
        inverse_plan(n).process(&mut buf);
        let dxi = self.spec.dxi();
        for (m, v) in buf.iter_mut().enumerate() {
            *v *= dxi * alternate(m);
        }
        Self {
            spec: self.spec,
            domain: Domain::Time,
            values: buf,
        }
    }

    /// Circular shift by a whole number of samples (`T_{k·Δx}`).
    pub fn translate_samples(&self, shift: isize) -> Self {
        let n = self.spec.samples as isize;
        let values = (0..n)
            .map(|m| self.values[(m - shift).rem_euclid(n) as usize])
            .collect();
        Self {
            spec: self.spec,
            domain: self.domain,
            values,
        }
    }

    /// `(M_η f)(x) = e^{2πiηx} f(x)` for a time-domain function.
    pub fn modulate(&self, eta: f64) -> Result<Self, GridError> {
        self.expect_domain(Domain::Time)?;
        Ok(self.map(|x, v| v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * eta * x)))
    }

    /// Fraction of the squared `L_2` mass carried by `|coord| ≤ radius`.
    pub fn mass_fraction_within(&self, radius: f64) -> f64 {
        let all: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        let inside: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if self.spec.coord(self.domain, i).abs() <= radius {
                    v.norm_sqr()
                } else {
                    0.0
                }
            })
            .collect();
        let total = pairwise_sum(&all);
        if total == 0.0 {
            1.0
        } else {
            pairwise_sum(&inside) / total
        }
    }

    /// `g` with `ĝ(ξ) = f̂(ξ/λ)`, i.e. `g(x) = λ f(λx)`.
    ///
    /// The transform is evaluated off-grid through the DTFT of the samples
    /// (band-limited interpolation), computed with a chirp-z transform.
    pub fn dilate(&self, factor: f64) -> Result<Self, GridError> {
        self.expect_domain(Domain::Time)?;
        let (min, max) = (4.0 / self.spec.extent, 1.0 / (4.0 * self.spec.dx()));
        if !(factor.is_finite() && factor >= min && factor <= max) {
            return Err(GridError::Unresolvable { factor, min, max });
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let n = self.spec.samples;
        let half = n as f64 / 2.0;
        // f̂(ξ_l/λ) = Δx e^{πi k/λ} Σ_m f_m e^{-2πi m k/(Mλ)},  k = l - M/2.
        let ks: Vec<f64> = (0..n).map(|l| l as f64 - half).collect();
        let sums = chirp::dtft(&self.values, 1.0 / (n as f64 * factor), &ks);
        let dx = self.spec.dx();
        let values = sums
            .into_iter()
            .zip(&ks)
            .map(|(s, k)| {
                // The sample DTFT is periodic; beyond the sampled band it only repeats.
                if (k / factor).abs() >= half {
                    Complex64::new(0.0, 0.0)
                } else {
                    s * dx * Complex64::from_polar(1.0, std::f64::consts::PI * k / factor)
                }
            })
            .collect();
        Ok(Self {
            spec: self.spec,
            domain: Domain::Frequency,
            values,
        }
        .inverse_fourier_unchecked())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Power;
    use crate::spectrum::FnSpectrum;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gaussian(x: f64) -> Complex64 {
        Complex64::new((-PI * x * x).exp(), 0.0)
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_is_self_dual() {
        let spec = GridSpec::new(32.0, 1024).unwrap();
        let g = GridFunction::from_fn(spec, gaussian);
        let ghat = g.fourier().unwrap();
        let expected: Vec<Complex64> = spec.xis().into_iter().map(gaussian).collect();
        assert!(max_err(ghat.values(), &expected) < 1e-10);
    }

    #[test]
    fn shift_theorem() {
        let spec = GridSpec::new(32.0, 1024).unwrap();
        let x0 = 1.25;
        let shifted = GridFunction::from_fn(spec, |x| gaussian(x - x0))
            .fourier()
            .unwrap();
        let expected: Vec<Complex64> = spec
            .xis()
            .into_iter()
            .map(|xi| gaussian(xi) * Complex64::from_polar(1.0, -2.0 * PI * x0 * xi))
            .collect();
        assert!(max_err(shifted.values(), &expected) < 1e-10);
    }

    #[test]
    fn zero_maps_to_zero_and_round_trips() {
        let spec = GridSpec::new(16.0, 256).unwrap();
        let z = GridFunction::zeros(spec, Domain::Time);
        assert!(z
            .fourier()
            .unwrap()
            .values()
            .iter()
            .all(|v| v.norm() == 0.0));
        let f = GridFunction::from_fn(spec, |x| Complex64::new(gaussian(x).re, x * gaussian(x).re));
        let back = f.fourier().unwrap().inverse_fourier().unwrap();
        assert!(max_err(back.values(), f.values()) < 1e-12);
    }

    #[test]
    fn spectrum_sampling_matches_direct_sampling() {
        let spec = GridSpec::new(32.0, 1024).unwrap();
        let from_hat = GridFunction::from_spectrum(spec, &FnSpectrum::new(gaussian, 4.0, 6.5));
        let direct = GridFunction::from_fn(spec, gaussian);
        assert!(max_err(from_hat.values(), direct.values()) < 1e-10);
    }

    #[test]
    fn dilation_scales_l2_mass() {
        let spec = GridSpec::new(64.0, 4096).unwrap();
        let g = GridFunction::from_fn(spec, gaussian);
        assert_eq!(g.dilate(1.0).unwrap(), g);
        for eps in [0.5, 0.25, 2.0] {
            let d = g.dilate(eps).unwrap();
            let ratio = crate::norms::lebesgue_values(d.values(), spec.dx(), Power::Finite(2.0))
                / crate::norms::lebesgue_values(g.values(), spec.dx(), Power::Finite(2.0));
            assert_relative_eq!(ratio, eps.sqrt(), max_relative = 5e-3);
            let exact: Vec<Complex64> = spec
                .xs()
                .into_iter()
                .map(|x| gaussian(eps * x) * eps)
                .collect();
            assert!(max_err(d.values(), &exact) < 1e-9);
        }
        assert!(g.dilate(1e-6).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]
        #[test]
        fn parseval_for_band_limited_inputs(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            width in 0.5f64..2.0,
        ) {
            let spec = GridSpec::new(32.0, 512).unwrap();
            let f = GridFunction::from_fn(spec, |x| {
                coeffs.iter().enumerate().map(|(k, (a, b))| {
                    Complex64::new(*a, *b) * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x / 4.0)
                }).sum::<Complex64>() * (-PI * (x / width).powi(2)).exp()
            });
            let n_time = crate::norms::lebesgue_values(f.values(), spec.dx(), Power::Finite(2.0));
            let n_freq = crate::norms::lebesgue_values(f.fourier().unwrap().values(), spec.dxi(), Power::Finite(2.0));
            proptest::prop_assert!((n_time - n_freq).abs() <= 1e-10 * n_time.max(1e-300));
        }
    }
}
