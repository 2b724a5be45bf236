//! Quadrature evaluators for weighted Lebesgue, Wiener amalgam, modulation,
//! Besov, Triebel-Lizorkin, local Hardy and periodic Lebesgue norms.
//!
//! Infinite exponents become maxima over samples. Quasi-norm exponents below
//! one use the same formulas.

mod registry;

pub use registry::{Evaluation, NormEvaluator, NormParams, NormRegistry};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponent::{Family, ReciprocalExponent, SmoothnessIndex, SpaceSpec};
use crate::filters::{FilterBank, FilterError, PartitionCell};
use crate::grid::{inverse_plan, GridError, GridFunction};
use crate::numeric::{power_norm, CompensatedSum, Power};
use crate::sequence::{SeqKind, WeightedSeq};
use crate::spectrum::Spectrum;
use crate::stft::{
    for_each_row, Axis, GridStft, RowKind, SpectralStft, StftError, TfLattice, TfMatrix, TfSource,
    Window,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("{0:?} norms need p < ∞")]
    InfiniteP(Family),
    #[error("{0:?} is not a localizable inner space")]
    NotLocalizable(Family),
    #[error("Fourier-series norms take a uniform sequence")]
    NotUniform,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Stft(#[from] StftError),
}

/// `⟨t⟩^s = (1 + t²)^{s/2}`.
pub fn japanese_weight(t: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + t * t).powf(s / 2.0)
    }
}

/// `(cell · Σ |v|^p)^{1/p}` over raw samples.
pub fn lebesgue_values(values: &[Complex64], cell: f64, p: Power) -> f64 {
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    power_norm(&mags, p, cell)
}

/// `‖⟨·⟩^s f‖_{L_p}` by Riemann sum over the samples, in whichever domain
/// `f` lives (so `lebesgue_norm(f̂, q, s)` is the weighted `L_q` of `f̂`).
pub fn lebesgue_norm(f: &GridFunction, p: ReciprocalExponent, s: SmoothnessIndex) -> f64 {
    let s = s.to_f64();
    let mags: Vec<f64> = f
        .values()
        .iter()
        .zip(f.coords())
        .map(|(v, t)| v.norm() * japanese_weight(t, s))
        .collect();
    power_norm(&mags, p.to_power(), f.spec().cell(f.domain()))
}

/// Which axis of `V_φf` is reduced first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    /// Wiener amalgam: `‖ ‖V(x, ·)‖_{L^s_q} ‖_{L_p}`.
    FreqInnerTimeOuter,
    /// Modulation: `‖ ‖V(·, ξ)‖_{L_p} ‖_{L^s_q}`.
    TimeInnerFreqOuter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub inner_exponent: ReciprocalExponent,
    pub outer_exponent: ReciprocalExponent,
    pub weight_s: SmoothnessIndex,
    pub order: Order,
}

impl MixedNormSpec {
    pub fn wiener(p: ReciprocalExponent, q: ReciprocalExponent, s: SmoothnessIndex) -> Self {
        Self {
            inner_exponent: q,
            outer_exponent: p,
            weight_s: s,
            order: Order::FreqInnerTimeOuter,
        }
    }

    pub fn modulation(p: ReciprocalExponent, q: ReciprocalExponent, s: SmoothnessIndex) -> Self {
        Self {
            inner_exponent: p,
            outer_exponent: q,
            weight_s: s,
            order: Order::TimeInnerFreqOuter,
        }
    }
}

/// Streaming reduction of STFT rows for one [`MixedNormSpec`].
struct MixedAccumulator {
    inner: Power,
    outer: Power,
    s: f64,
    kind: RowKind,
    cross: Axis,
    cross_weights: Vec<f64>,
    row_step: f64,
    inner_along_rows: bool,
    row_norms: Vec<f64>,
    sums: Vec<CompensatedSum>,
    maxima: Vec<f64>,
}

impl MixedAccumulator {
    fn new(spec: &MixedNormSpec, source: &dyn TfSource) -> Self {
        let kind = source.row_kind();
        let cross = source.cross_axis();
        let s = spec.weight_s.to_f64();
        let cross_weights = match kind {
            RowKind::Time => cross
                .coords()
                .into_iter()
                .map(|xi| japanese_weight(xi, s))
                .collect(),
            RowKind::Frequency => Vec::new(),
        };
        let inner_along_rows = matches!(
            (spec.order, kind),
            (Order::FreqInnerTimeOuter, RowKind::Time)
                | (Order::TimeInnerFreqOuter, RowKind::Frequency)
        );
        let width = if inner_along_rows { 0 } else { cross.count };
        Self {
            inner: spec.inner_exponent.to_power(),
            outer: spec.outer_exponent.to_power(),
            s,
            kind,
            cross,
            cross_weights,
            row_step: source.row_step(),
            inner_along_rows,
            row_norms: Vec::new(),
            sums: vec![CompensatedSum::default(); width],
            maxima: vec![0.0; width],
        }
    }

    fn magnitudes(&self, coord: f64, row: &[Complex64]) -> Vec<f64> {
        match self.kind {
            RowKind::Time => row
                .iter()
                .zip(&self.cross_weights)
                .map(|(v, w)| v.norm() * w)
                .collect(),
            RowKind::Frequency => {
                let w = japanese_weight(coord, self.s);
                row.iter().map(|v| v.norm() * w).collect()
            }
        }
    }

    fn push(&mut self, coord: f64, row: Option<&[Complex64]>) {
        let Some(row) = row else {
            if self.inner_along_rows {
                self.row_norms.push(0.0);
            }
            return;
        };
        let mags = self.magnitudes(coord, row);
        if self.inner_along_rows {
            self.row_norms
                .push(power_norm(&mags, self.inner, self.cross.step));
            return;
        }
        match self.inner {
            Power::Infinite => {
                for (m, v) in self.maxima.iter_mut().zip(&mags) {
                    *m = m.max(*v);
                }
            }
            Power::Finite(q) => {
                for (acc, v) in self.sums.iter_mut().zip(&mags) {
                    if *v > 0.0 {
                        acc.add(v.powf(q));
                    }
                }
            }
        }
    }

    fn finish(self) -> f64 {
        if self.inner_along_rows {
            return power_norm(&self.row_norms, self.outer, self.row_step);
        }
        let inner: Vec<f64> = match self.inner {
            Power::Infinite => self.maxima,
            Power::Finite(q) => self
                .sums
                .iter()
                .map(|acc| (self.row_step * acc.value()).powf(1.0 / q))
                .collect(),
        };
        power_norm(&inner, self.outer, self.cross.step)
    }
}

/// Several mixed norms of one STFT, sharing a single pass over its rows.
pub fn mixed_norms(source: &dyn TfSource, specs: &[MixedNormSpec]) -> Vec<f64> {
    let mut accs: Vec<MixedAccumulator> = specs
        .iter()
        .map(|s| MixedAccumulator::new(s, source))
        .collect();
    for_each_row(source, |coord, row| {
        accs.iter_mut().for_each(|a| a.push(coord, row))
    });
    accs.into_iter().map(MixedAccumulator::finish).collect()
}

/// Mixed norm of a materialized STFT with Riemann weights `a·b` per cell.
pub fn mixed_norm(v: &TfMatrix, spec: &MixedNormSpec) -> f64 {
    mixed_norms(v, std::slice::from_ref(spec))[0]
}

/// Wiener or modulation norms of grid samples with an explicit window and lattice.
pub fn grid_mixed_norms(
    f: &GridFunction,
    window: Window,
    lattice: TfLattice,
    specs: &[MixedNormSpec],
) -> Result<Vec<f64>, NormError> {
    Ok(mixed_norms(&GridStft::new(f, window, lattice)?, specs))
}

fn default_grid_norm(
    f: &GridFunction,
    window: Window,
    spec: MixedNormSpec,
) -> Result<f64, NormError> {
    let lattice = TfLattice::for_window(*f.spec(), window)?;
    Ok(grid_mixed_norms(f, window, lattice, &[spec])?[0])
}

/// `‖f‖_{W^s_{p,q}}` with the Gaussian window on the default lattice.
pub fn wiener_norm(
    f: &GridFunction,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
) -> Result<f64, NormError> {
    default_grid_norm(f, Window::GaussianUnit, MixedNormSpec::wiener(p, q, s))
}

/// `‖f‖_{M^s_{p,q}}` with the Gaussian window on the default lattice.
pub fn modulation_norm(
    f: &GridFunction,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
) -> Result<f64, NormError> {
    default_grid_norm(f, Window::GaussianUnit, MixedNormSpec::modulation(p, q, s))
}

/// Mixed norms of a closed-form transform through the spectral engine.
pub fn spectral_mixed_norms(
    spectrum: &dyn Spectrum,
    window: Window,
    specs: &[MixedNormSpec],
) -> Vec<f64> {
    mixed_norms(&SpectralStft::auto(spectrum, window), specs)
}

fn block_weights(bank: &FilterBank, s: SmoothnessIndex) -> Vec<f64> {
    (0..=bank.jmax())
        .map(|j| (j as f64 * s.to_f64()).exp2())
        .collect()
}

/// `(Σ_j 2^{jsq} ‖Δ_j f‖_{L_p}^q)^{1/q}` over the bank's shells.
pub fn besov_norm(
    f: &GridFunction,
    bank: &FilterBank,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
) -> Result<f64, NormError> {
    let blocks = bank.decompose(f)?;
    let cell = f.spec().dx();
    let terms: Vec<f64> = blocks
        .iter()
        .zip(block_weights(bank, s))
        .map(|(b, w)| w * lebesgue_values(b.values(), cell, p.to_power()))
        .collect();
    Ok(power_norm(&terms, q.to_power(), 1.0))
}

/// `‖(Σ_j 2^{jsq} |Δ_j f|^q)^{1/q}‖_{L_p}`.
pub fn triebel_norm(
    f: &GridFunction,
    bank: &FilterBank,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
) -> Result<f64, NormError> {
    if p.is_infinite() {
        return Err(NormError::InfiniteP(Family::TriebelLizorkin));
    }
    let blocks = bank.decompose(f)?;
    let weights = block_weights(bank, s);
    let q = q.to_power();
    let pointwise: Vec<f64> = (0..f.spec().samples())
        .map(|m| {
            let column: Vec<f64> = blocks
                .iter()
                .zip(&weights)
                .map(|(b, w)| w * b.values()[m].norm())
                .collect();
            power_norm(&column, q, 1.0)
        })
        .collect();
    Ok(power_norm(&pointwise, p.to_power(), f.spec().dx()))
}

/// Finest dyadic scale `2^{-HARDY_SCALES}` of the local maximal function.
pub const HARDY_SCALES: u32 = 10;

/// `‖sup_{t} |ψ_t * f|‖_{L_p}` over `t = 2^{-m}`, `m = 0..=10`, with the
/// Gaussian `ψ(x) = e^{-πx²}` (unit integral, `ψ̂_t(ξ) = e^{-πt²ξ²}`).
pub fn local_hardy_norm(f: &GridFunction, p: ReciprocalExponent) -> Result<f64, NormError> {
    if p.is_infinite() {
        return Err(NormError::InfiniteP(Family::LocalHardy));
    }
    let hat = f.fourier()?;
    let mut sup = vec![0.0f64; f.spec().samples()];
    for m in 0..=HARDY_SCALES {
        let t = (-(m as f64)).exp2();
        let smoothed = hat
            .map(|xi, v| v * (-PI * t * t * xi * xi).exp())
            .inverse_fourier()?;
        for (s, v) in sup.iter_mut().zip(smoothed.values()) {
            *s = s.max(v.norm());
        }
    }
    Ok(power_norm(&sup, p.to_power(), f.spec().dx()))
}

/// Oversampling of the periodic grid relative to the largest frequency.
pub const FOURIER_SERIES_OVERSAMPLING: usize = 32;

/// `‖Σ_k a_k e^{2πikx}‖_{L_p(T)}` on a periodic grid of at least 32 points
/// per period and unit of the largest `|k|`.
pub fn fourier_series_norm(a: &WeightedSeq, p: ReciprocalExponent) -> Result<f64, NormError> {
    if a.kind != SeqKind::Uniform {
        return Err(NormError::NotUniform);
    }
    let size = (FOURIER_SERIES_OVERSAMPLING * (a.reach() as usize + 1)).next_power_of_two();
    Ok(lebesgue_values(
        &trig_values(a, size),
        1.0 / size as f64,
        p.to_power(),
    ))
}

/// Discrete periodic values `P(m/size)` of a trigonometric polynomial.
pub fn trig_values(a: &WeightedSeq, size: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for (k, v) in &a.entries {
        buf[k.rem_euclid(size as i64) as usize] += v;
    }
    inverse_plan(size).process(&mut buf);
    buf
}

/// `(Σ_k ‖ψ_k f‖_X^p)^{1/p}` for `X` a Wiener amalgam or Triebel-Lizorkin space.
pub fn localized_norm(
    f: &GridFunction,
    partition: &[PartitionCell],
    inner: &SpaceSpec,
    p_outer: ReciprocalExponent,
) -> Result<f64, NormError> {
    let bank = match inner.family {
        Family::WienerAmalgam => None,
        Family::TriebelLizorkin => Some(FilterBank::new(
            *f.spec(),
            FilterBank::max_shells(f.spec()),
        )?),
        other => return Err(NormError::NotLocalizable(other)),
    };
    let mut pieces = Vec::with_capacity(partition.len());
    for cell in partition {
        let piece = f.multiply(&cell.window)?;
        if piece.values().iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        let value = match &bank {
            None => wiener_norm(&piece, inner.p, inner.q, inner.s)?,
            Some(bank) => triebel_norm(&piece, bank, inner.p, inner.q, inner.s)?,
        };
        pieces.push(value);
    }
    Ok(power_norm(&pieces, p_outer.to_power(), 1.0))
}

/// Relative squared `L_2` mass outside `[-L/4, L/4]`.
pub fn mass_outside_core(f: &GridFunction) -> f64 {
    1.0 - f.mass_fraction_within(f.spec().extent() / 4.0)
}
