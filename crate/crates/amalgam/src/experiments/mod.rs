//! Probes that turn embedding statements into finite numerical verdicts,
//! plus brute-force oracles for the sequence-space statements.

mod atlas;
mod atoms;
mod fourier;
mod khinchin;
mod localization;
mod oracle;
mod probe;
mod registry;

pub use atlas::{atlas_grid, region_atlas, AtlasPair, AtlasRow, SMode};
pub use atoms::{atom_family_sizes, atom_uniformity, AtomProbe, ATOM_FAMILY_SIZE};
pub use fourier::{dirichlet, fourier_series_sharpness, Direction, FourierReport, FourierRow};
pub use khinchin::{khinchin_mc, KhinchinEstimate, MIN_TRIALS};
pub use localization::{
    gaussian_family, localization_check, LocalizationReport, LOCALIZATION_SPREAD,
};
pub use oracle::{seq_embedding_oracle, OracleCandidate, OracleResult, ORACLE_TRUNCATIONS};
pub use probe::{
    embedding_probe, expected_slope, monotone_after_first, scaling_probe, separated_ratio,
    separation_convergence, Member, NormSetup, ProbeConfig, WitnessFamily, MIN_SCHEDULE,
};
pub use registry::{
    endpoint_divergence, khinchin_sequences, Experiment, ExperimentOutput, ExperimentRegistry,
    Params,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::exponent::ExponentError;
use crate::grid::GridError;
use crate::norms::NormError;
use crate::numeric::{fit_line, LineFit};
use crate::stft::StftError;
use crate::witnesses::WitnessError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("schedule needs at least {needed} points, got {got}")]
    ShortSchedule { needed: usize, got: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid parameter {key}: {reason}")]
    Parameter { key: String, reason: String },
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Stft(#[from] StftError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    ConsistentWithEmbedding,
    DivergenceDetected,
    Inconclusive,
}

/// Ratio growth (last over first) required before divergence is declared.
pub const DIVERGENCE_GROWTH: f64 = 2.0;
/// Largest root-mean-square residual, in `log2` units, of a divergent fit.
pub const DIVERGENCE_RESIDUAL: f64 = 0.2;
/// Ratios varying by less than this factor count as bounded.
pub const BOUNDED_SPREAD: f64 = 2.0;

/// How the schedule parameter enters the slope fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScheduleAxis {
    /// Fit `log2 y` against the parameter itself (dyadic indices, truncation levels).
    Linear,
    /// Fit `log2 y` against `log2` of the parameter.
    Log,
}

impl ScheduleAxis {
    pub fn abscissa(self, parameter: f64) -> f64 {
        match self {
            ScheduleAxis::Linear => parameter,
            ScheduleAxis::Log => parameter.log2(),
        }
    }
}

/// One schedule point: `ratio = target_norm / source_norm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub parameter: f64,
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: f64,
}

impl ProbePoint {
    pub fn new(parameter: f64, source_norm: f64, target_norm: f64) -> Self {
        Self {
            parameter,
            source_norm,
            target_norm,
            ratio: target_norm / source_norm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub series: String,
    pub config: Vec<(String, String)>,
    pub axis: ScheduleAxis,
    pub points: Vec<ProbePoint>,
    /// Fit of `log2 ratio` against the schedule abscissa.
    pub fit: Option<LineFit>,
    pub expected_slope: Option<f64>,
    pub verdict: Verdict,
    pub classifier_holds: Option<bool>,
    /// Divergence detected where the classifier says the embedding holds.
    pub disagreement: bool,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(
        experiment: &str,
        series: &str,
        axis: ScheduleAxis,
        points: Vec<ProbePoint>,
    ) -> Self {
        let fit = ratio_fit(&points, axis);
        let verdict = judge(&points, fit.as_ref());
        Self {
            experiment: experiment.to_string(),
            series: series.to_string(),
            config: Vec::new(),
            axis,
            points,
            fit,
            expected_slope: None,
            verdict,
            classifier_holds: None,
            disagreement: false,
            seed: 0,
            notes: Vec::new(),
        }
    }

    pub fn with_config(mut self, config: impl IntoIterator<Item = (String, String)>) -> Self {
        self.config.extend(config);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_expected_slope(mut self, slope: f64) -> Self {
        self.expected_slope = Some(slope);
        self
    }

    pub fn with_classifier(mut self, holds: bool) -> Self {
        self.classifier_holds = Some(holds);
        self.disagreement = holds && self.verdict == Verdict::DivergenceDetected;
        self
    }

    pub fn growth(&self) -> Option<f64> {
        let (first, last) = (self.points.first()?, self.points.last()?);
        Some(last.ratio / first.ratio)
    }
}

/// Fit of `log2 ratio` against the schedule abscissa.
pub fn ratio_fit(points: &[ProbePoint], axis: ScheduleAxis) -> Option<LineFit> {
    if points.iter().any(|p| {
        !(p.ratio > 0.0 && p.ratio.is_finite())
            || !(p.parameter > 0.0 || axis == ScheduleAxis::Linear)
    }) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| axis.abscissa(p.parameter)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ratio.log2()).collect();
    fit_line(&xs, &ys)
}

/// Divergence needs `≥ 2×` growth, a positive slope and a residual below
/// `0.2`; bounded ratios (spread below `2×`) are consistent; anything else
/// is inconclusive.
pub fn judge(points: &[ProbePoint], fit: Option<&LineFit>) -> Verdict {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Verdict::Inconclusive;
    };
    if points.iter().any(|p| !p.ratio.is_finite() || p.ratio < 0.0) {
        return Verdict::Inconclusive;
    }
    if let Some(fit) = fit {
        if last.ratio >= DIVERGENCE_GROWTH * first.ratio
            && fit.slope > 0.0
            && fit.residual < DIVERGENCE_RESIDUAL
        {
            return Verdict::DivergenceDetected;
        }
    }
    let top = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    if first.ratio > 0.0 && top < BOUNDED_SPREAD * first.ratio {
        Verdict::ConsistentWithEmbedding
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(ratios: &[f64]) -> Vec<ProbePoint> {
        ratios
            .iter()
            .enumerate()
            .map(|(i, r)| ProbePoint::new((i + 1) as f64, 1.0, *r))
            .collect()
    }

    #[test]
    fn verdict_rule() {
        let geometric = points(&[1.0, 2.0, 4.0, 8.0]);
        let fit = ratio_fit(&geometric, ScheduleAxis::Linear);
        assert_eq!(judge(&geometric, fit.as_ref()), Verdict::DivergenceDetected);
        let flat = points(&[1.0, 1.1, 1.05, 1.2]);
        assert_eq!(
            judge(&flat, ratio_fit(&flat, ScheduleAxis::Linear).as_ref()),
            Verdict::ConsistentWithEmbedding
        );
        let jumpy = points(&[1.0, 8.0, 1.0, 8.0]);
        assert_eq!(
            judge(&jumpy, ratio_fit(&jumpy, ScheduleAxis::Linear).as_ref()),
            Verdict::Inconclusive
        );
        let falling = points(&[8.0, 4.0, 2.0, 1.0]);
        assert_eq!(
            judge(&falling, ratio_fit(&falling, ScheduleAxis::Linear).as_ref()),
            Verdict::ConsistentWithEmbedding
        );
    }

    #[test]
    fn disagreement_flag() {
        let report = ExperimentReport::new(
            "t",
            "s",
            ScheduleAxis::Linear,
            points(&[1.0, 2.0, 4.0, 8.0]),
        );
        assert!(report.clone().with_classifier(true).disagreement);
        assert!(!report.with_classifier(false).disagreement);
    }
}
