//! Functions described by a closed-form Fourier transform.
//!
//! Witness families are built from explicit transforms; keeping them in this
//! form lets the spectral STFT evaluate shells far beyond any grid's band.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub trait Spectrum: Send + Sync {
    /// `f̂(ξ)`.
    fn eval(&self, xi: f64) -> Complex64;

    /// `f̂(ξ + u)` for an offset `u` that may be negligible next to `ξ` in
    /// floating point. Dilations override this so `u` is never rounded away.
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        self.eval(xi + u)
    }

    /// Closed intervals whose union contains the support of `f̂`.
    fn support(&self) -> Vec<(f64, f64)>;

    /// Radius about the origin holding all but a negligible part of `f`.
    fn time_radius(&self) -> f64;
}

impl<S: Spectrum + ?Sized> Spectrum for Arc<S> {
    fn eval(&self, xi: f64) -> Complex64 {
        (**self).eval(xi)
    }
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        (**self).eval_offset(xi, u)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        (**self).support()
    }
    fn time_radius(&self) -> f64 {
        (**self).time_radius()
    }
}

/// A transform given by a closure, supported in `|ξ| ≤ freq_radius`.
pub struct FnSpectrum<F> {
    f: F,
    freq_radius: f64,
    time_radius: f64,
}

impl<F: Fn(f64) -> Complex64 + Send + Sync> FnSpectrum<F> {
    pub fn new(f: F, freq_radius: f64, time_radius: f64) -> Self {
        Self {
            f,
            freq_radius,
            time_radius,
        }
    }
}

impl<F: Fn(f64) -> Complex64 + Send + Sync> Spectrum for FnSpectrum<F> {
    fn eval(&self, xi: f64) -> Complex64 {
        (self.f)(xi)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        vec![(-self.freq_radius, self.freq_radius)]
    }
    fn time_radius(&self) -> f64 {
        self.time_radius
    }
}

/// `ĝ(ξ) = f̂(ξ/λ)`, i.e. `g(x) = λ f(λx)`.
#[derive(Clone)]
pub struct Dilated<S> {
    pub inner: S,
    pub factor: f64,
}

impl<S: Spectrum> Spectrum for Dilated<S> {
    fn eval(&self, xi: f64) -> Complex64 {
        self.inner.eval(xi / self.factor)
    }
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        self.inner.eval_offset(xi / self.factor, u / self.factor)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.inner
            .support()
            .into_iter()
            .map(|(a, b)| (a * self.factor, b * self.factor))
            .collect()
    }
    fn time_radius(&self) -> f64 {
        self.inner.time_radius() / self.factor
    }
}

/// Frequency shift `ĝ(ξ) = f̂(ξ - η)`, i.e. the modulation `M_η f`.
#[derive(Clone)]
pub struct Modulated<S> {
    pub inner: S,
    pub eta: f64,
}

impl<S: Spectrum> Spectrum for Modulated<S> {
    fn eval(&self, xi: f64) -> Complex64 {
        self.inner.eval(xi - self.eta)
    }
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        self.inner.eval_offset(xi - self.eta, u)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.inner
            .support()
            .into_iter()
            .map(|(a, b)| (a + self.eta, b + self.eta))
            .collect()
    }
    fn time_radius(&self) -> f64 {
        self.inner.time_radius()
    }
}

/// Time translation `T_{x0} f`, i.e. `ĝ(ξ) = e^{-2πi x0 ξ} f̂(ξ)`.
#[derive(Clone)]
pub struct Translated<S> {
    pub inner: S,
    pub shift: f64,
}

impl<S: Spectrum> Spectrum for Translated<S> {
    fn eval(&self, xi: f64) -> Complex64 {
        self.eval_offset(xi, 0.0)
    }
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        let turns = (self.shift * xi).rem_euclid(1.0) + self.shift * u;
        Complex64::from_polar(1.0, -2.0 * PI * turns) * self.inner.eval_offset(xi, u)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.inner.support()
    }
    fn time_radius(&self) -> f64 {
        self.inner.time_radius() + self.shift.abs()
    }
}

/// Finite linear combination `Σ c_i f_i`.
#[derive(Clone, Default)]
pub struct Combination {
    pub terms: Vec<(Complex64, Arc<dyn Spectrum>)>,
}

impl Combination {
    pub fn push(&mut self, coefficient: Complex64, term: Arc<dyn Spectrum>) {
        self.terms.push((coefficient, term));
    }
}

impl Spectrum for Combination {
    fn eval(&self, xi: f64) -> Complex64 {
        self.terms.iter().map(|(c, s)| c * s.eval(xi)).sum()
    }
    fn eval_offset(&self, xi: f64, u: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, s)| c * s.eval_offset(xi, u))
            .sum()
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.terms.iter().flat_map(|(_, s)| s.support()).collect()
    }
    fn time_radius(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, s)| s.time_radius())
            .fold(0.0, f64::max)
    }
}

/// Merges overlapping closed intervals after widening each by `pad`.
pub fn merged_support(spectrum: &dyn Spectrum, pad: f64) -> Vec<(f64, f64)> {
    let mut ivs: Vec<(f64, f64)> = spectrum
        .support()
        .into_iter()
        .map(|(a, b)| (a - pad, b + pad))
        .collect();
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
    for (a, b) in ivs {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> FnSpectrum<impl Fn(f64) -> Complex64 + Send + Sync> {
        FnSpectrum::new(
            |xi: f64| Complex64::new((-PI * xi * xi).exp(), 0.0),
            4.0,
            6.5,
        )
    }

    #[test]
    fn dilation_keeps_small_offsets_at_huge_frequencies() {
        let big = 2f64.powi(100);
        let d = Dilated {
            inner: gauss(),
            factor: big,
        };
        let v = d.eval_offset(0.0, 0.5 * big);
        assert!((v.re - (-PI * 0.25f64).exp()).abs() < 1e-15);
        assert_eq!(d.support()[0].1, 4.0 * big);
    }

    #[test]
    fn support_merging() {
        let mut c = Combination::default();
        c.push(
            Complex64::new(1.0, 0.0),
            Arc::new(Modulated {
                inner: gauss(),
                eta: 10.0,
            }),
        );
        c.push(Complex64::new(1.0, 0.0), Arc::new(gauss()));
        c.push(
            Complex64::new(1.0, 0.0),
            Arc::new(Modulated {
                inner: gauss(),
                eta: 7.0,
            }),
        );
        let merged = merged_support(&c, 0.0);
        assert_eq!(merged, vec![(-4.0, 14.0)]);
        assert_eq!(merged_support(&c, -1.0).len(), 2);
    }
}
