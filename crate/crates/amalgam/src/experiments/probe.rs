use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ExperimentError, ExperimentReport, OracleCandidate, OracleResult, ProbePoint, ScheduleAxis,
    Verdict,
};
use crate::classifier::classify;
use crate::exponent::{Family, SpaceSpec};
use crate::grid::{GridFunction, GridSpec};
use crate::norms::{lebesgue_norm, spectral_mixed_norms, MixedNormSpec, NormParams, NormRegistry};
use crate::numeric::power_norm;
use crate::sequence::{SeqKind, WeightedSeq};
use crate::spectrum::Spectrum;
use crate::stft::Window;
use crate::witnesses::{h_j_spectrum, make_f_n, make_g_n, make_h_eps, make_h_j, Profile};

/// Fewest schedule points that leave degrees of freedom for the slope fit.
pub const MIN_SCHEDULE: usize = 4;
/// Grid on which `‖h_0‖_{L_p}` is sampled for separated sums.
const SHELL_GRID: (f64, usize) = (256.0, 1 << 13);

/// Witness family together with its parameter schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WitnessFamily {
    /// `h_ε` from samples of the low profile, one member per `ε`.
    HEps { eps: Vec<f64> },
    /// `h_j` in closed form, one member per `j`.
    HJ { js: Vec<u32> },
    /// `Σ_{j<J} a_j T_{Nj} h_j` in the limit `N → ∞`, where translates no
    /// longer interact; `a` is the oracle candidate truncated to `J`.
    Separated {
        candidate: OracleCandidate,
        lengths: Vec<usize>,
    },
    /// Grid samples of `Σ_{j<J} a_j T_{Nj} h_j` at a finite separation.
    FiniteDyadic {
        a: WeightedSeq,
        separation: f64,
        lengths: Vec<usize>,
    },
    /// Grid samples of `Σ_k b_k T_{Nk} g_k` over the first `len` lattice indices.
    Lattice {
        b: WeightedSeq,
        separation: f64,
        lengths: Vec<usize>,
    },
    /// The same Gaussian `count` times.
    Constant { count: usize },
}

impl WitnessFamily {
    /// Separated sums driven by an oracle witness.
    pub fn from_oracle(oracle: &OracleResult, lengths: Vec<usize>) -> Self {
        WitnessFamily::Separated {
            candidate: oracle.candidate,
            lengths,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WitnessFamily::HEps { .. } => "h-eps",
            WitnessFamily::HJ { .. } => "h-j",
            WitnessFamily::Separated { .. } => "separated",
            WitnessFamily::FiniteDyadic { .. } => "finite-dyadic",
            WitnessFamily::Lattice { .. } => "lattice",
            WitnessFamily::Constant { .. } => "constant",
        }
    }

    pub fn schedule(&self) -> Vec<f64> {
        match self {
            WitnessFamily::HEps { eps } => eps.clone(),
            WitnessFamily::HJ { js } => js.iter().map(|&j| j as f64).collect(),
            WitnessFamily::Separated { lengths, .. }
            | WitnessFamily::FiniteDyadic { lengths, .. }
            | WitnessFamily::Lattice { lengths, .. } => lengths.iter().map(|&l| l as f64).collect(),
            WitnessFamily::Constant { count } => (1..=*count).map(|i| i as f64).collect(),
        }
    }

    /// Exponential laws (`h_j`, top spikes) are fitted against the
    /// parameter, power laws against its logarithm.
    pub fn default_axis(&self) -> ScheduleAxis {
        match self {
            WitnessFamily::HJ { .. } | WitnessFamily::Constant { .. } => ScheduleAxis::Linear,
            WitnessFamily::Separated {
                candidate: OracleCandidate::SpikeAtTop,
                ..
            } => ScheduleAxis::Linear,
            _ => ScheduleAxis::Log,
        }
    }

    /// Builds every member; grid families are sampled on `grid`.
    pub fn members(&self, grid: GridSpec) -> Result<Vec<Member>, ExperimentError> {
        let members = match self {
            WitnessFamily::HEps { eps } => {
                let low = Profile::Low.sample(grid)?;
                eps.par_iter()
                    .map(|&e| Ok(Member::Grid(make_h_eps(&low, e)?)))
                    .collect::<Result<_, ExperimentError>>()?
            }
            WitnessFamily::HJ { js } => js
                .iter()
                .map(|&j| Member::Spectral(Arc::new(h_j_spectrum(j))))
                .collect(),
            WitnessFamily::Separated { candidate, lengths } => lengths
                .iter()
                .map(|&len| Member::Separated(candidate.build(SeqKind::Dyadic, len)))
                .collect(),
            WitnessFamily::FiniteDyadic {
                a,
                separation,
                lengths,
            } => lengths
                .par_iter()
                .map(|&len| {
                    Ok(Member::Grid(make_f_n(
                        grid,
                        &a.truncated(len as i64),
                        *separation,
                    )?))
                })
                .collect::<Result<_, ExperimentError>>()?,
            WitnessFamily::Lattice {
                b,
                separation,
                lengths,
            } => lengths
                .par_iter()
                .map(|&len| {
                    let first: WeightedSeq = WeightedSeq {
                        kind: b.kind,
                        entries: b.entries.iter().take(len).map(|(k, v)| (*k, *v)).collect(),
                    };
                    Ok(Member::Grid(make_g_n(grid, &first, *separation)?))
                })
                .collect::<Result<_, ExperimentError>>()?,
            WitnessFamily::Constant { count } => {
                let g = GridFunction::from_fn(grid, |x| {
                    Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0)
                });
                vec![Member::Grid(g); *count]
            }
        };
        Ok(members)
    }
}

/// One evaluated function of a witness family.
#[derive(Clone)]
pub enum Member {
    Grid(GridFunction),
    /// A closed-form transform; Wiener and modulation norms go through the
    /// spectral engine, other norms through grid samples.
    Spectral(Arc<dyn Spectrum>),
    /// Coefficients of a separated dyadic sum.
    Separated(WeightedSeq),
}

/// Space, window and grid used to evaluate family members.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSetup {
    pub space: SpaceSpec,
    pub window: Window,
    pub grid: GridSpec,
    pub jmax: Option<u32>,
}

struct Measured {
    value: f64,
    warnings: Vec<String>,
}

impl NormSetup {
    fn params(&self) -> NormParams {
        NormParams {
            window: self.window,
            jmax: self.jmax,
            ..NormParams::new(self.space.p, self.space.q, self.space.s)
        }
    }

    fn mixed_spec(&self) -> Option<MixedNormSpec> {
        let SpaceSpec { p, q, s, .. } = self.space;
        match self.space.family {
            Family::WienerAmalgam => Some(MixedNormSpec::wiener(p, q, s)),
            Family::Modulation => Some(MixedNormSpec::modulation(p, q, s)),
            _ => None,
        }
    }

    fn grid_norm(
        &self,
        registry: &NormRegistry,
        f: &GridFunction,
    ) -> Result<Measured, ExperimentError> {
        let evaluator = registry.for_family(self.space.family).ok_or_else(|| {
            ExperimentError::Unsupported(format!("no norm for {:?}", self.space.family))
        })?;
        let e = evaluator.evaluate(f, &self.params())?;
        Ok(Measured {
            value: e.value,
            warnings: e.warnings,
        })
    }

    fn sample(&self, spectrum: &dyn Spectrum) -> Result<GridFunction, ExperimentError> {
        let top = spectrum
            .support()
            .iter()
            .map(|(a, b)| a.abs().max(b.abs()))
            .fold(0.0, f64::max);
        let edge = self.grid.band() / 2.0;
        if top >= edge {
            return Err(crate::witnesses::WitnessError::Aliasing {
                top,
                band_edge: edge,
            }
            .into());
        }
        Ok(GridFunction::from_spectrum(self.grid, spectrum))
    }

    fn measure(
        &self,
        registry: &NormRegistry,
        shells: &ShellTable,
        member: &Member,
    ) -> Result<Measured, ExperimentError> {
        match member {
            Member::Grid(f) => self.grid_norm(registry, f),
            Member::Spectral(spectrum) => match self.mixed_spec() {
                Some(spec) => Ok(Measured {
                    value: spectral_mixed_norms(spectrum.as_ref(), self.window, &[spec])[0],
                    warnings: Vec::new(),
                }),
                None => self.grid_norm(registry, &self.sample(spectrum.as_ref())?),
            },
            Member::Separated(a) => Ok(Measured {
                value: shells.separated_norm(&self.space, a)?,
                warnings: Vec::new(),
            }),
        }
    }
}

/// Per-shell norms `‖h_j‖` needed by separated sums.
struct ShellTable {
    /// `‖h_0‖_{L_p}`.
    base_lp: f64,
    /// Wiener or modulation norms of `h_j` by `j`.
    mixed: Vec<f64>,
}

impl ShellTable {
    fn build(setup: &NormSetup, top: usize) -> Result<Self, ExperimentError> {
        let grid = GridSpec::new(SHELL_GRID.0, SHELL_GRID.1)?;
        let base_lp = lebesgue_norm(
            &make_h_j(grid, 0)?,
            setup.space.p,
            crate::exponent::SmoothnessIndex::zero(),
        );
        let mixed = match setup.mixed_spec() {
            Some(spec) => (0..top as u32)
                .into_par_iter()
                .map(|j| spectral_mixed_norms(&h_j_spectrum(j), setup.window, &[spec])[0])
                .collect(),
            None => Vec::new(),
        };
        Ok(Self { base_lp, mixed })
    }

    /// `‖h_j‖_{L_p} = 2^{j(1-1/p)} ‖h_0‖_{L_p}`.
    fn lp(&self, space: &SpaceSpec, j: i64) -> f64 {
        (j as f64 * (1.0 - crate::exponent::to_f64(space.p.value()))).exp2() * self.base_lp
    }

    /// Norm of `Σ_j a_j T_{Nj} h_j` once translates are far apart: shells
    /// combine in `ℓ_p` for `L_p`, `F` and `W`, and in `ℓ_q` for `B` and `M`.
    fn separated_norm(&self, space: &SpaceSpec, a: &WeightedSeq) -> Result<f64, ExperimentError> {
        let s = space.s.to_f64();
        let term = |j: i64, c: Complex64| -> f64 {
            let h = match space.family {
                Family::Lebesgue => self.lp(space, j),
                Family::Besov | Family::TriebelLizorkin => {
                    (j as f64 * s).exp2() * self.lp(space, j)
                }
                _ => self.mixed[j as usize],
            };
            c.norm() * h
        };
        let outer = match space.family {
            Family::Lebesgue if space.s.0 == num_rational::Ratio::from_integer(0) => space.p,
            Family::TriebelLizorkin | Family::WienerAmalgam => space.p,
            Family::Besov | Family::Modulation => space.q,
            other => {
                return Err(ExperimentError::Unsupported(format!(
                    "separated sums in {other:?}"
                )))
            }
        };
        let terms: Vec<f64> = a.entries.iter().map(|(&j, &c)| term(j, c)).collect();
        Ok(power_norm(&terms, outer.to_power(), 1.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub source: SpaceSpec,
    pub target: SpaceSpec,
    pub family: WitnessFamily,
    pub window: Window,
    pub grid: GridSpec,
    pub axis: ScheduleAxis,
    /// Top Littlewood-Paley shell for grid `B` and `F` norms.
    pub jmax: Option<u32>,
    pub seed: u64,
}

impl ProbeConfig {
    /// Gaussian window on the default `L = 64`, `M = 2^14` grid.
    pub fn new(source: SpaceSpec, target: SpaceSpec, family: WitnessFamily) -> Self {
        let axis = family.default_axis();
        Self {
            source,
            target,
            family,
            window: Window::GaussianUnit,
            grid: GridSpec::new(64.0, 1 << 14).expect("default grid is valid"),
            axis,
            jmax: None,
            seed: 0,
        }
    }

    fn setup(&self, space: SpaceSpec) -> NormSetup {
        NormSetup {
            space,
            window: self.window,
            grid: self.grid,
            jmax: self.jmax,
        }
    }

    fn echo(&self) -> Vec<(String, String)> {
        let space =
            |s: &SpaceSpec| format!("{:?}(p={}, q={}, s={}, n={})", s.family, s.p, s.q, s.s, s.n);
        vec![
            ("source".into(), space(&self.source)),
            ("target".into(), space(&self.target)),
            ("family".into(), self.family.name().into()),
            ("window".into(), format!("{:?}", self.window)),
            (
                "grid".into(),
                format!("L={} M={}", self.grid.extent(), self.grid.samples()),
            ),
            ("axis".into(), format!("{:?}", self.axis)),
        ]
    }
}

fn check_schedule(len: usize) -> Result<(), ExperimentError> {
    if len < MIN_SCHEDULE {
        return Err(ExperimentError::ShortSchedule {
            needed: MIN_SCHEDULE,
            got: len,
        });
    }
    Ok(())
}

fn measure_all(setup: &NormSetup, members: &[Member]) -> Result<Vec<Measured>, ExperimentError> {
    let registry = NormRegistry::with_defaults();
    let top = members
        .iter()
        .filter_map(|m| match m {
            Member::Separated(a) => a.entries.keys().max().map(|&j| j as usize + 1),
            _ => None,
        })
        .max();
    let shells = match top {
        Some(top) => ShellTable::build(setup, top)?,
        None => ShellTable {
            base_lp: 0.0,
            mixed: Vec::new(),
        },
    };
    members
        .par_iter()
        .map(|m| setup.measure(&registry, &shells, m))
        .collect()
}

/// Law predicted for the slope of a family's norms, when one is known.
pub fn expected_slope(family: &WitnessFamily, space: &SpaceSpec) -> Option<f64> {
    let n = space.n as f64;
    let inv_p = crate::exponent::to_f64(space.p.value());
    let inv_q = crate::exponent::to_f64(space.q.value());
    let s = space.s.to_f64();
    match (family, space.family) {
        (WitnessFamily::HEps { .. }, Family::WienerAmalgam | Family::Lebesgue) => {
            Some(n * (1.0 - inv_p))
        }
        (WitnessFamily::HJ { .. }, Family::WienerAmalgam) => Some(s + n * inv_q),
        (WitnessFamily::HJ { .. }, Family::Besov | Family::Lebesgue) => Some(s + n * (1.0 - inv_p)),
        (WitnessFamily::Constant { .. }, _) => Some(0.0),
        _ => None,
    }
}

/// Slope of `log2 ‖member‖` along the schedule. Points carry
/// `source_norm = 1` and the measured norm as `target_norm`; any quadrature
/// warning makes the verdict `Inconclusive`.
pub fn scaling_probe(
    family: &WitnessFamily,
    space: SpaceSpec,
    window: Window,
    grid: GridSpec,
) -> Result<ExperimentReport, ExperimentError> {
    let schedule = family.schedule();
    check_schedule(schedule.len())?;
    let setup = NormSetup {
        space,
        window,
        grid,
        jmax: None,
    };
    let measured = measure_all(&setup, &family.members(grid)?)?;
    let points = schedule
        .iter()
        .zip(&measured)
        .map(|(&t, m)| ProbePoint::new(t, 1.0, m.value))
        .collect();
    let mut report = ExperimentReport::new("scaling", family.name(), family.default_axis(), points);
    if let Some(slope) = expected_slope(family, &space) {
        report = report.with_expected_slope(slope);
    }
    let warnings: Vec<String> = measured.into_iter().flat_map(|m| m.warnings).collect();
    report.verdict = if warnings.is_empty() && report.fit.is_some() {
        Verdict::ConsistentWithEmbedding
    } else {
        Verdict::Inconclusive
    };
    report.notes = warnings;
    let space_label = format!(
        "{:?}(p={}, q={}, s={})",
        space.family, space.p, space.q, space.s
    );
    Ok(report.with_config([
        ("space".to_string(), space_label),
        ("window".to_string(), format!("{window:?}")),
    ]))
}

/// Ratio `‖·‖_target / ‖·‖_source` along the schedule, judged by the
/// divergence rule and cross-checked against the classifier.
pub fn embedding_probe(config: &ProbeConfig) -> Result<ExperimentReport, ExperimentError> {
    let schedule = config.family.schedule();
    check_schedule(schedule.len())?;
    let members = config.family.members(config.grid)?;
    let source = measure_all(&config.setup(config.source), &members)?;
    let target = measure_all(&config.setup(config.target), &members)?;
    let points = schedule
        .iter()
        .zip(source.iter().zip(&target))
        .map(|(&t, (a, b))| ProbePoint::new(t, a.value, b.value))
        .collect();
    let mut report = ExperimentReport::new("embedding", config.family.name(), config.axis, points)
        .with_config(config.echo())
        .with_seed(config.seed);
    let warnings: Vec<String> = source
        .into_iter()
        .chain(target)
        .flat_map(|m| m.warnings)
        .collect();
    if !warnings.is_empty() {
        report.verdict = Verdict::Inconclusive;
        report.notes.extend(warnings);
    }
    match classify(&config.source, &config.target) {
        Ok(c) => report = report.with_classifier(c.holds()),
        Err(e) => report.notes.push(format!("classifier: {e}")),
    }
    Ok(report)
}

/// Ratio at two finite separations `N` and `2N` for `a` sampled on `grid`,
/// to show convergence toward the separated limit.
pub fn separation_convergence(
    config: &ProbeConfig,
    a: &WeightedSeq,
    separation: f64,
) -> Result<[ProbePoint; 2], ExperimentError> {
    let f = |n: f64| -> Result<ProbePoint, ExperimentError> {
        let member = [Member::Grid(make_f_n(config.grid, a, n)?)];
        let source = measure_all(&config.setup(config.source), &member)?;
        let target = measure_all(&config.setup(config.target), &member)?;
        Ok(ProbePoint::new(n, source[0].value, target[0].value))
    };
    Ok([f(separation)?, f(2.0 * separation)?])
}

/// Target-to-source ratio of one separated sum.
pub fn separated_ratio(config: &ProbeConfig, a: &WeightedSeq) -> Result<f64, ExperimentError> {
    let member = [Member::Separated(a.clone())];
    let source = measure_all(&config.setup(config.source), &member)?;
    let target = measure_all(&config.setup(config.target), &member)?;
    Ok(target[0].value / source[0].value)
}

/// Whether ratios never fall more than `tolerance` below their running
/// maximum after the first point.
pub fn monotone_after_first(points: &[ProbePoint], tolerance: f64) -> bool {
    let mut top = f64::NEG_INFINITY;
    points.iter().skip(1).all(|p| {
        top = top.max(p.ratio);
        p.ratio >= (1.0 - tolerance) * top
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{ReciprocalExponent, SmoothnessIndex};

    fn space(family: Family, p: i64, q: i64) -> SpaceSpec {
        SpaceSpec::try_new(
            family,
            ReciprocalExponent::p(p),
            ReciprocalExponent::p(q),
            SmoothnessIndex::zero(),
            1,
        )
        .unwrap()
    }

    fn h_eps_family() -> (WitnessFamily, GridSpec) {
        (
            WitnessFamily::HEps {
                eps: vec![1.0, 0.5, 0.25, 0.125],
            },
            GridSpec::new(2048.0, 1 << 13).unwrap(),
        )
    }

    #[test]
    fn constant_family_has_zero_slope() {
        let family = WitnessFamily::Constant { count: 4 };
        let grid = GridSpec::new(32.0, 1 << 10).unwrap();
        let report = scaling_probe(
            &family,
            space(Family::Lebesgue, 2, 2),
            Window::GaussianUnit,
            grid,
        )
        .unwrap();
        assert!(report.fit.unwrap().slope.abs() < 1e-6);
        assert_eq!(report.expected_slope, Some(0.0));
    }

    #[test]
    fn h_eps_lebesgue_slope() {
        let (family, grid) = h_eps_family();
        let report = scaling_probe(
            &family,
            space(Family::Lebesgue, 2, 2),
            Window::GaussianUnit,
            grid,
        )
        .unwrap();
        assert!((report.fit.unwrap().slope - 0.5).abs() < 0.1);
        assert_eq!(report.verdict, Verdict::ConsistentWithEmbedding);
    }

    #[test]
    fn lebesgue_into_wiener_at_two_is_flat() {
        let (family, grid) = h_eps_family();
        let config = ProbeConfig {
            grid,
            ..ProbeConfig::new(
                space(Family::Lebesgue, 2, 2),
                space(Family::WienerAmalgam, 2, 2),
                family,
            )
        };
        let report = embedding_probe(&config).unwrap();
        let first = report.points[0].ratio;
        assert!(report
            .points
            .iter()
            .all(|p| (p.ratio / first - 1.0).abs() < 0.02));
        assert_eq!(report.verdict, Verdict::ConsistentWithEmbedding);
    }

    #[test]
    fn flat_separated_sum_stays_bounded() {
        let family = WitnessFamily::Separated {
            candidate: OracleCandidate::Power(0.0),
            lengths: vec![1, 2, 4, 8, 16],
        };
        let config = ProbeConfig::new(
            space(Family::WienerAmalgam, 2, 2),
            space(Family::Besov, 2, 2),
            family,
        );
        let report = embedding_probe(&config).unwrap();
        assert_eq!(report.verdict, Verdict::ConsistentWithEmbedding);
        assert_eq!(report.classifier_holds, Some(true));
        assert!(!report.disagreement);
    }

    #[test]
    fn short_schedules_are_rejected() {
        let family = WitnessFamily::Constant { count: 3 };
        let grid = GridSpec::new(32.0, 1 << 10).unwrap();
        let err = scaling_probe(
            &family,
            space(Family::Lebesgue, 2, 2),
            Window::GaussianUnit,
            grid,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::ShortSchedule { needed: 4, got: 3 }
        ));
    }

    #[test]
    fn monotonicity_tolerates_small_dips() {
        let pts = |r: &[f64]| {
            r.iter()
                .enumerate()
                .map(|(i, &v)| ProbePoint::new(i as f64 + 1.0, 1.0, v))
                .collect::<Vec<_>>()
        };
        assert!(monotone_after_first(
            &pts(&[5.0, 1.0, 2.0, 1.97, 3.0]),
            0.05
        ));
        assert!(!monotone_after_first(&pts(&[1.0, 2.0, 1.5]), 0.05));
    }
}
