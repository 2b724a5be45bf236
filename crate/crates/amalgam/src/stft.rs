//! Short-time Fourier transform `V_φf(x, ξ) = ⟨f, M_ξ T_x φ⟩` on a
//! time-frequency lattice, by two engines:
//!
//! * [`GridStft`] works from time samples: one folded FFT per lattice time.
//! * [`SpectralStft`] works from a closed-form transform through
//!   `V_φf(x, ξ) = ∫ f̂(ξ + u) conj(φ̂(u)) e^{2πixu} du`, one FFT per lattice
//!   frequency, so it reaches shells no grid can hold.
//!
//! Both stream rows through [`TfSource`]; [`TfMatrix`] materializes them.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{forward_plan, inverse_plan, Domain, GridError, GridFunction, GridSpec};
use crate::spectrum::{merged_support, FnSpectrum, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StftError {
    #[error("time stride {stride} does not divide {samples} samples")]
    TimeStride { stride: usize, samples: usize },
    #[error("frequency decimation {decimation} does not divide {samples} samples")]
    Decimation { decimation: usize, samples: usize },
    #[error("window needs |ξ| ≤ {needed} but the grid resolves only {band_edge}")]
    WindowUnresolved { needed: f64, band_edge: f64 },
    #[error("lattice and grid disagree")]
    LatticeMismatch,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Analysis windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Window {
    /// `φ(x) = e^{-πx²}`, its own Fourier transform.
    GaussianUnit,
    /// `φ̂(ξ) = exp(1 - 1/(1 - ξ²))` on `|ξ| < 1`: exact frequency support.
    CompactBump,
}

impl Window {
    pub fn spectrum(self, u: f64) -> f64 {
        match self {
            Window::GaussianUnit => (-PI * u * u).exp(),
            Window::CompactBump => {
                if u.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Frequency radius used by the spectral engine (truncation for the Gaussian).
    pub fn freq_radius(self) -> f64 {
        match self {
            Window::GaussianUnit => 3.5,
            Window::CompactBump => 1.0,
        }
    }

    /// Radius beyond which `|φ|` is negligible for lattice sizing.
    pub fn time_radius(self) -> f64 {
        match self {
            Window::GaussianUnit => 6.5,
            Window::CompactBump => 24.0,
        }
    }

    /// Time samples centered at index `M/2`, with the half-width in samples
    /// outside of which they vanish (`None` when they never vanish).
    pub fn samples(self, spec: GridSpec) -> Result<(Vec<Complex64>, Option<usize>), StftError> {
        match self {
            Window::GaussianUnit => {
                let radius = self.time_radius();
                let half = ((radius / spec.dx()).floor() as usize).min(spec.samples() / 2 - 1);
                let center = spec.samples() / 2;
                let values = (0..spec.samples())
                    .map(|c| {
                        let x = (c as f64 - center as f64) * spec.dx();
                        if c.abs_diff(center) <= half {
                            Complex64::new((-PI * x * x).exp(), 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                Ok((values, Some(half)))
            }
            Window::CompactBump => {
                let band_edge = spec.band() / 2.0;
                if band_edge <= 1.0 {
                    return Err(StftError::WindowUnresolved {
                        needed: 1.0,
                        band_edge,
                    });
                }
                let hat = FnSpectrum::new(
                    |u| Complex64::new(Window::CompactBump.spectrum(u), 0.0),
                    1.0,
                    24.0,
                );
                Ok((GridFunction::from_spectrum(spec, &hat).into_values(), None))
            }
        }
    }

    /// `‖φ‖_{L_2} = ‖φ̂‖_{L_2}`.
    pub fn l2_norm(self) -> f64 {
        match self {
            Window::GaussianUnit => 2f64.powf(-0.25),
            Window::CompactBump => {
                let n = 1 << 16;
                let h = 2.0 / n as f64;
                let sum: f64 = (0..n)
                    .map(|i| self.spectrum(-1.0 + (i as f64 + 0.5) * h).powi(2))
                    .sum();
                (sum * h).sqrt()
            }
        }
    }
}

/// Uniformly spaced coordinates `start + i·step`, `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.at(i)).collect()
    }
}

/// Sampling points of `V_φf`: times `x_i` and frequencies `ξ_l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfLattice {
    pub time: Axis,
    pub freq: Axis,
}

impl TfLattice {
    /// Every `time_stride`-th grid time and every `decimation`-th DFT
    /// frequency of the grid, covering both full extents.
    pub fn on_grid(
        spec: GridSpec,
        time_stride: usize,
        decimation: usize,
    ) -> Result<Self, StftError> {
        let m = spec.samples();
        if time_stride == 0 || !m.is_multiple_of(time_stride) {
            return Err(StftError::TimeStride {
                stride: time_stride,
                samples: m,
            });
        }
        if decimation == 0 || !m.is_multiple_of(decimation) || m / decimation < 2 {
            return Err(StftError::Decimation {
                decimation,
                samples: m,
            });
        }
        let k = m / decimation;
        let b = decimation as f64 / spec.extent();
        Ok(Self {
            time: Axis {
                start: spec.x(0),
                step: time_stride as f64 * spec.dx(),
                count: m / time_stride,
            },
            freq: Axis {
                start: -((k / 2) as f64) * b,
                step: b,
                count: k,
            },
        })
    }

    /// Default lattice for a window: time step near 1/4 and the coarsest
    /// frequency decimation whose fold still holds the window.
    pub fn for_window(spec: GridSpec, window: Window) -> Result<Self, StftError> {
        let mut stride = 1;
        while (2 * stride) as f64 * spec.dx() <= 0.25 && 2 * stride <= spec.samples() {
            stride *= 2;
        }
        let decimation = match window {
            Window::GaussianUnit => {
                let needed = 4.0 * window.time_radius();
                let mut d = 1;
                while spec.extent() / (2 * d) as f64 >= needed && spec.samples() / (2 * d) >= 2 {
                    d *= 2;
                }
                d
            }
            Window::CompactBump => 1,
        };
        Self::on_grid(spec, stride, decimation)
    }

    pub fn cell(&self) -> f64 {
        self.time.step * self.freq.step
    }
}

/// Whether a streamed row fixes a time (and runs over frequency) or fixes
/// a frequency (and runs over time).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Time,
    Frequency,
}

/// Row-wise producer of STFT values.
pub trait TfSource: Sync {
    fn row_kind(&self) -> RowKind;
    /// Coordinates along each row.
    fn cross_axis(&self) -> Axis;
    /// Spacing between consecutive rows.
    fn row_step(&self) -> f64;
    fn row_count(&self) -> usize;
    fn row_coord(&self, r: usize) -> f64;
    /// Rows in `range`; `None` marks a row that vanishes identically.
    fn compute_rows(&self, range: Range<usize>) -> Vec<Option<Vec<Complex64>>>;
}

const CHUNK: usize = 64;

/// Visits every row in order; rows are computed in parallel in fixed
/// chunks, so the visiting order never depends on scheduling.
pub fn for_each_row(source: &dyn TfSource, mut visit: impl FnMut(f64, Option<&[Complex64]>)) {
    let n = source.row_count();
    let block = CHUNK * rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < n {
        let end = (start + block).min(n);
        let chunks: Vec<Range<usize>> = (start..end)
            .step_by(CHUNK)
            .map(|s| s..(s + CHUNK).min(end))
            .collect();
        let rows: Vec<Vec<Option<Vec<Complex64>>>> = chunks
            .into_par_iter()
            .map(|r| source.compute_rows(r))
            .collect();
        for (r, row) in (start..end).zip(rows.into_iter().flatten()) {
            visit(source.row_coord(r), row.as_deref());
        }
        start = end;
    }
}

/// Sampled STFT stored time-major: `values[i * freq.count + l] = V(x_i, ξ_l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfMatrix {
    pub lattice: TfLattice,
    pub window: Window,
    pub values: Vec<Complex64>,
}

impl TfMatrix {
    pub fn new(lattice: TfLattice, window: Window, values: Vec<Complex64>) -> Self {
        assert_eq!(
            values.len(),
            lattice.time.count * lattice.freq.count,
            "matrix shape"
        );
        Self {
            lattice,
            window,
            values,
        }
    }

    pub fn get(&self, i: usize, l: usize) -> Complex64 {
        self.values[i * self.lattice.freq.count + l]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let k = self.lattice.freq.count;
        &self.values[i * k..(i + 1) * k]
    }

    /// Materializes any source on its own lattice.
    pub fn collect(source: &dyn TfSource, window: Window) -> Self {
        let cross = source.cross_axis();
        let rows_axis = Axis {
            start: if source.row_count() > 0 {
                source.row_coord(0)
            } else {
                0.0
            },
            step: source.row_step(),
            count: match source.row_count() {
                0 => 0,
                n => {
                    ((source.row_coord(n - 1) - source.row_coord(0)) / source.row_step()).round()
                        as usize
                        + 1
                }
            },
        };
        let mut gathered = vec![Complex64::new(0.0, 0.0); rows_axis.count * cross.count];
        let visit = |coord: f64, row: Option<&[Complex64]>, write: &mut Vec<Complex64>| {
            if let Some(row) = row {
                let r = ((coord - rows_axis.start) / rows_axis.step).round() as usize;
                write[r * cross.count..(r + 1) * cross.count].copy_from_slice(row);
            }
        };
        for_each_row(source, |c, row| visit(c, row, &mut gathered));
        match source.row_kind() {
            RowKind::Time => Self::new(
                TfLattice {
                    time: rows_axis,
                    freq: cross,
                },
                window,
                gathered,
            ),
            RowKind::Frequency => {
                let (nf, nt) = (rows_axis.count, cross.count);
                let mut values = vec![Complex64::new(0.0, 0.0); nf * nt];
                for l in 0..nf {
                    for i in 0..nt {
                        values[i * nf + l] = gathered[l * nt + i];
                    }
                }
                Self::new(
                    TfLattice {
                        time: cross,
                        freq: rows_axis,
                    },
                    window,
                    values,
                )
            }
        }
    }
}

impl TfSource for TfMatrix {
    fn row_kind(&self) -> RowKind {
        RowKind::Time
    }
    fn cross_axis(&self) -> Axis {
        self.lattice.freq
    }
    fn row_step(&self) -> f64 {
        self.lattice.time.step
    }
    fn row_count(&self) -> usize {
        self.lattice.time.count
    }
    fn row_coord(&self, r: usize) -> f64 {
        self.lattice.time.at(r)
    }
    fn compute_rows(&self, range: Range<usize>) -> Vec<Option<Vec<Complex64>>> {
        range.map(|i| Some(self.row(i).to_vec())).collect()
    }
}

/// STFT of time samples on a [`TfLattice::on_grid`] lattice.
///
/// Row `i` is `Δx · FFT_K` of the product `f · conj(φ(· - x_i))` folded to
/// `K` samples, which samples the DTFT exactly at every `d`-th frequency.
pub struct GridStft<'a> {
    f: &'a GridFunction,
    window: Vec<Complex64>,
    support: Option<usize>,
    lattice: TfLattice,
    stride: usize,
    decimation: usize,
}

impl<'a> GridStft<'a> {
    pub fn new(f: &'a GridFunction, window: Window, lattice: TfLattice) -> Result<Self, StftError> {
        f.expect_domain(Domain::Time)?;
        let spec = *f.spec();
        let m = spec.samples();
        let stride = (lattice.time.step / spec.dx()).round() as usize;
        let decimation = (lattice.freq.step * spec.extent()).round() as usize;
        if TfLattice::on_grid(spec, stride.max(1), decimation.max(1)).ok() != Some(lattice) {
            return Err(StftError::LatticeMismatch);
        }
        debug_assert_eq!(m / decimation, lattice.freq.count);
        let (samples, support) = window.samples(spec)?;
        Ok(Self {
            f,
            window: samples,
            support,
            lattice,
            stride,
            decimation,
        })
    }

    fn row(&self, i: usize) -> Vec<Complex64> {
        let m = self.f.spec().samples();
        let k = m / self.decimation;
        let shift = i * self.stride;
        let f = self.f.values();
        let mut fold = vec![Complex64::new(0.0, 0.0); k];
        let mut add = |idx: usize| {
            let w = self.window[(idx + m + m / 2 - shift) % m];
            let sign = if idx.is_multiple_of(2) { 1.0 } else { -1.0 };
            fold[idx % k] += f[idx] * w.conj() * sign;
        };
        match self.support {
            Some(half) if 2 * half + 1 < m => {
                for off in 0..=2 * half {
                    add((shift + m + off - half) % m);
                }
            }
            _ => (0..m).for_each(&mut add),
        }
        let plan = forward_plan(k);
        plan.process(&mut fold);
        let dx = self.f.spec().dx();
        for (l, v) in fold.iter_mut().enumerate() {
            let flip = (l + k / 2) * self.decimation % 2 == 1;
            *v *= if flip { -dx } else { dx };
        }
        fold
    }
}

impl TfSource for GridStft<'_> {
    fn row_kind(&self) -> RowKind {
        RowKind::Time
    }
    fn cross_axis(&self) -> Axis {
        self.lattice.freq
    }
    fn row_step(&self) -> f64 {
        self.lattice.time.step
    }
    fn row_count(&self) -> usize {
        self.lattice.time.count
    }
    fn row_coord(&self, r: usize) -> f64 {
        self.lattice.time.at(r)
    }
    fn compute_rows(&self, range: Range<usize>) -> Vec<Option<Vec<Complex64>>> {
        range.map(|i| Some(self.row(i))).collect()
    }
}

/// STFT of grid samples as a matrix.
pub fn stft(f: &GridFunction, window: Window, lattice: TfLattice) -> Result<TfMatrix, StftError> {
    Ok(TfMatrix::collect(
        &GridStft::new(f, window, lattice)?,
        window,
    ))
}

/// Discretization of the spectral engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLattice {
    /// Quadrature step in the window variable `u`; the time span is `1/du`.
    pub du: f64,
    /// FFT length; time step is `1/(fft_len·du)`.
    pub fft_len: usize,
    /// Spacing of the frequency rows.
    pub freq_step: f64,
}

impl SpectralLattice {
    /// Span covering both radii twice, time step at most 1/16, and row
    /// spacing fine enough for the narrower of signal and window.
    pub fn auto(spectrum: &dyn Spectrum, window: Window) -> Self {
        let reach = spectrum.time_radius() + window.time_radius();
        let span = (2.0 * reach).max(1.0);
        let du = 2f64.powi(-(span.log2().ceil() as i32));
        let fft_len = ((16.0 / du).ceil() as usize).next_power_of_two();
        let width = spectrum.time_radius().clamp(f64::MIN_POSITIVE, 8.0);
        let freq_step = 2f64.powi((1.0 / (16.0 * width)).log2().floor() as i32);
        Self {
            du,
            fft_len,
            freq_step,
        }
    }

    pub fn time_axis(&self) -> Axis {
        let dt = 1.0 / (self.fft_len as f64 * self.du);
        Axis {
            start: -((self.fft_len / 2) as f64) * dt,
            step: dt,
            count: self.fft_len,
        }
    }
}

/// STFT of a closed-form transform; rows are lattice frequencies `r·b` on
/// which `f̂(ξ + u) conj(φ̂(u))` can be nonzero.
pub struct SpectralStft<'a> {
    spectrum: &'a dyn Spectrum,
    window: Window,
    lattice: SpectralLattice,
    rows: Vec<i64>,
    us: Vec<f64>,
    taper: Vec<f64>,
}

impl<'a> SpectralStft<'a> {
    pub fn new(spectrum: &'a dyn Spectrum, window: Window, lattice: SpectralLattice) -> Self {
        let r = window.freq_radius();
        let b = lattice.freq_step;
        let mut rows = Vec::new();
        for (lo, hi) in merged_support(spectrum, r) {
            let first = (lo / b).ceil() as i64;
            let last = (hi / b).floor() as i64;
            let from = rows.last().map_or(first, |&prev: &i64| first.max(prev + 1));
            rows.extend(from..=last);
        }
        let n_u = ((2.0 * r / lattice.du).round() as usize).min(lattice.fft_len);
        let us: Vec<f64> = (0..n_u).map(|i| -r + i as f64 * lattice.du).collect();
        let taper = us.iter().map(|&u| window.spectrum(u)).collect();
        Self {
            spectrum,
            window,
            lattice,
            rows,
            us,
            taper,
        }
    }

    pub fn auto(spectrum: &'a dyn Spectrum, window: Window) -> Self {
        Self::new(spectrum, window, SpectralLattice::auto(spectrum, window))
    }

    pub fn lattice(&self) -> SpectralLattice {
        self.lattice
    }

    fn row(&self, xi: f64) -> Option<Vec<Complex64>> {
        let k = self.lattice.fft_len;
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        let mut any = false;
        for (i, (&u, &w)) in self.us.iter().zip(&self.taper).enumerate() {
            if w == 0.0 {
                continue;
            }
            let v = self.spectrum.eval_offset(xi, u);
            if v.re != 0.0 || v.im != 0.0 {
                any = true;
                buf[i] = if i % 2 == 0 { v * w } else { -v * w };
            }
        }
        if !any {
            return None;
        }
        inverse_plan(k).process(&mut buf);
        let axis = self.lattice.time_axis();
        let r = self.window.freq_radius();
        for (j, v) in buf.iter_mut().enumerate() {
            let turns = (axis.at(j) * r).rem_euclid(1.0);
            *v *= Complex64::from_polar(self.lattice.du, -2.0 * PI * turns);
        }
        Some(buf)
    }
}

impl TfSource for SpectralStft<'_> {
    fn row_kind(&self) -> RowKind {
        RowKind::Frequency
    }
    fn cross_axis(&self) -> Axis {
        self.lattice.time_axis()
    }
    fn row_step(&self) -> f64 {
        self.lattice.freq_step
    }
    fn row_count(&self) -> usize {
        self.rows.len()
    }
    fn row_coord(&self, r: usize) -> f64 {
        self.rows[r] as f64 * self.lattice.freq_step
    }
    fn compute_rows(&self, range: Range<usize>) -> Vec<Option<Vec<Complex64>>> {
        range.map(|r| self.row(self.row_coord(r))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(spec: GridSpec) -> GridFunction {
        GridFunction::from_fn(spec, |x| Complex64::new((-PI * x * x).exp(), 0.0))
    }

    fn ambiguity(x: f64, xi: f64) -> f64 {
        2f64.powf(-0.5) * (-PI * (x * x + xi * xi) / 2.0).exp()
    }

    #[test]
    fn gaussian_ambiguity_on_grid() {
        let spec = GridSpec::new(32.0, 1024).unwrap();
        for d in [1, 2] {
            let lattice = TfLattice::on_grid(spec, 8, d).unwrap();
            let v = stft(&gaussian(spec), Window::GaussianUnit, lattice).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..lattice.time.count {
                for l in 0..lattice.freq.count {
                    let want = ambiguity(lattice.time.at(i), lattice.freq.at(l));
                    worst = worst.max((v.get(i, l).norm() - want).abs());
                }
            }
            assert!(worst < 1e-6, "decimation {d}: {worst}");
        }
    }

    #[test]
    fn gaussian_ambiguity_spectral() {
        let g = FnSpectrum::new(
            |xi: f64| Complex64::new((-PI * xi * xi).exp(), 0.0),
            3.5,
            6.5,
        );
        let engine = SpectralStft::auto(&g, Window::GaussianUnit);
        let mut worst: f64 = 0.0;
        for_each_row(&engine, |xi, row| {
            let axis = engine.cross_axis();
            for (i, v) in row.unwrap().iter().enumerate() {
                worst = worst.max((v.norm() - ambiguity(axis.at(i), xi)).abs());
            }
        });
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn zero_function_gives_zero_matrix() {
        let spec = GridSpec::new(16.0, 256).unwrap();
        let z = GridFunction::zeros(spec, Domain::Time);
        let v = stft(
            &z,
            Window::CompactBump,
            TfLattice::for_window(spec, Window::CompactBump).unwrap(),
        )
        .unwrap();
        assert!(v.values.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn rejects_bad_strides() {
        let spec = GridSpec::new(16.0, 256).unwrap();
        assert!(TfLattice::on_grid(spec, 3, 1).is_err());
        assert!(TfLattice::on_grid(spec, 1, 5).is_err());
    }

    #[test]
    fn engines_agree_on_a_shell() {
        let spec = GridSpec::new(64.0, 1 << 13).unwrap();
        let bump = FnSpectrum::new(
            |xi: f64| {
                Complex64::new(
                    crate::filters::smooth_step((1.0 - (xi - 3.0).abs()) * 2.0),
                    0.0,
                )
            },
            4.0,
            12.0,
        );
        let f = GridFunction::from_spectrum(spec, &bump);
        let lattice = TfLattice::on_grid(spec, 32, 1).unwrap();
        let grid = stft(&f, Window::CompactBump, lattice).unwrap();
        let engine = SpectralStft::new(
            &bump,
            Window::CompactBump,
            SpectralLattice {
                du: 1.0 / 64.0,
                fft_len: 4096,
                freq_step: 1.0 / 64.0,
            },
        );
        let spectral = TfMatrix::collect(&engine, Window::CompactBump);
        // compare at common lattice points: x = -8..8 step 1/2, ξ = 1..5 step 1/8
        let mut worst: f64 = 0.0;
        for xi_i in 0..=32 {
            let xi = 1.0 + xi_i as f64 / 8.0;
            for x_i in 0..=32 {
                let x = -8.0 + x_i as f64 / 2.0;
                let gi = ((x - lattice.time.start) / lattice.time.step).round() as usize;
                let gl = ((xi - lattice.freq.start) / lattice.freq.step).round() as usize;
                let si = ((x - spectral.lattice.time.start) / spectral.lattice.time.step).round()
                    as usize;
                let sl = ((xi - spectral.lattice.freq.start) / spectral.lattice.freq.step).round()
                    as usize;
                worst = worst.max((grid.get(gi, gl).norm() - spectral.get(si, sl).norm()).abs());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }
}
