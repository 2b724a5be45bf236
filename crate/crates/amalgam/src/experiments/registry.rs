use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::probe::{separated_ratio, separation_convergence};
use super::{
    atlas_grid, atom_uniformity, embedding_probe, fourier_series_sharpness, gaussian_family,
    khinchin_mc, localization_check, region_atlas, scaling_probe, seq_embedding_oracle, AtlasPair,
    AtlasRow, Direction, ExperimentError, ExperimentReport, OracleCandidate, ProbeConfig,
    ProbePoint, SMode, ScheduleAxis, WitnessFamily,
};
use crate::classifier::{decide_seq_dyadic, decide_seq_uniform};
use crate::exponent::{Family, Rational, ReciprocalExponent, SmoothnessIndex, SpaceSpec};
use crate::filters::uniform_partition;
use crate::grid::GridSpec;
use crate::sequence::{SeqKind, WeightedSeq};
use crate::stft::Window;
use crate::witnesses::{make_truncated_seq, SeqGenerator};

/// `key=value` parameters of an experiment run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.set(key, value);
        self
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str) -> Result<Self, ExperimentError> {
        let mut params = Self::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::Parameter {
                    key: line.to_string(),
                    reason: "expected key=value".into(),
                })?;
            params.set(key.trim(), value.trim());
        }
        Ok(params)
    }

    /// Canonical `key=value` lines in key order.
    pub fn canonical(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T, ExperimentError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|e: T::Err| ExperimentError::Parameter {
                key: key.to_string(),
                reason: e.to_string(),
            }),
        }
    }

    fn exponent(&self, key: &str, default: &str) -> Result<ReciprocalExponent, ExperimentError> {
        self.parsed(key, default.parse().expect("default exponent parses"))
    }

    fn smoothness(&self, key: &str, default: &str) -> Result<SmoothnessIndex, ExperimentError> {
        self.parsed(key, default.parse().expect("default smoothness parses"))
    }

    fn window(&self, default: Window) -> Result<Window, ExperimentError> {
        match self.get("window") {
            None => Ok(default),
            Some("gaussian") => Ok(Window::GaussianUnit),
            Some("bump") => Ok(Window::CompactBump),
            Some(other) => Err(ExperimentError::Parameter {
                key: "window".into(),
                reason: format!("{other:?} is not gaussian or bump"),
            }),
        }
    }

    fn grid(&self, extent: f64, samples: usize) -> Result<GridSpec, ExperimentError> {
        Ok(GridSpec::new(
            self.parsed("extent", extent)?,
            self.parsed("samples", samples)?,
        )?)
    }
}

/// Everything an experiment produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub reports: Vec<ExperimentReport>,
    pub atlas: Vec<AtlasRow>,
}

impl From<Vec<ExperimentReport>> for ExperimentOutput {
    fn from(reports: Vec<ExperimentReport>) -> Self {
        Self {
            reports,
            atlas: Vec::new(),
        }
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Accepted parameter keys; anything else is rejected.
    fn keys(&self) -> &'static [&'static str];
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError>;
}

/// Experiments looked up by name.
pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(HEpsScaling));
        registry.register(Box::new(HJScaling));
        registry.register(Box::new(BesovBlocks));
        registry.register(Box::new(Khinchin));
        registry.register(Box::new(EndpointDivergence));
        registry.register(Box::new(SeqOracle));
        registry.register(Box::new(Atoms));
        registry.register(Box::new(FourierSeries));
        registry.register(Box::new(Localization));
        registry.register(Box::new(Atlas));
        registry
    }

    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.experiments.insert(experiment.name(), experiment);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.experiments.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.experiments.keys().copied()
    }

    /// Validates the keys and runs the named experiment.
    pub fn run(&self, name: &str, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let experiment = self
            .get(name)
            .ok_or_else(|| ExperimentError::Unsupported(format!("unknown experiment {name:?}")))?;
        if let Some((key, _)) = params.iter().find(|(k, _)| !experiment.keys().contains(k)) {
            return Err(ExperimentError::Parameter {
                key: key.to_string(),
                reason: format!(
                    "not accepted by {name}; expected one of {:?}",
                    experiment.keys()
                ),
            });
        }
        experiment.run(params)
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

fn echo(params: &Params) -> Vec<(String, String)> {
    params
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn space(
    family: Family,
    params: &Params,
    p: &str,
    q: &str,
    s: &str,
) -> Result<SpaceSpec, ExperimentError> {
    Ok(SpaceSpec::try_new(
        family,
        params.exponent("p", p)?,
        params.exponent("q", q)?,
        params.smoothness("s", s)?,
        1,
    )?)
}

fn dyadic_range(params: &Params, lo: u32, hi: u32) -> Result<Vec<u32>, ExperimentError> {
    Ok((params.parsed("jmin", lo)?..=params.parsed("jmax", hi)?).collect())
}

struct HEpsScaling;
struct HJScaling;
struct BesovBlocks;
struct Khinchin;
struct EndpointDivergence;
struct SeqOracle;
struct Atoms;
struct FourierSeries;
struct Localization;
struct Atlas;

impl Experiment for HEpsScaling {
    fn name(&self) -> &'static str {
        "h-eps-scaling"
    }
    fn summary(&self) -> &'static str {
        "slope of the Wiener amalgam norm of h_eps against eps"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "q", "s", "window", "extent", "samples", "levels"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let levels: i32 = params.parsed("levels", 6)?;
        let family = WitnessFamily::HEps {
            eps: (1..=levels).map(|k| 2f64.powi(-k)).collect(),
        };
        let w = space(Family::WienerAmalgam, params, "2", "2", "0")?;
        let report = scaling_probe(
            &family,
            w,
            params.window(Window::GaussianUnit)?,
            params.grid(4096.0, 1 << 15)?,
        )?;
        Ok(vec![named(report, self.name(), "h-eps").with_config(echo(params))].into())
    }
}

impl Experiment for HJScaling {
    fn name(&self) -> &'static str {
        "h-j-scaling"
    }
    fn summary(&self) -> &'static str {
        "slope in j of the Wiener amalgam norm of h_j, spectral engine"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "q", "s", "window", "jmin", "jmax"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let family = WitnessFamily::HJ {
            js: dyadic_range(params, 2, 8)?,
        };
        let w = space(Family::WienerAmalgam, params, "2", "2", "0")?;
        let grid = GridSpec::new(64.0, 1 << 14)?;
        let report = scaling_probe(&family, w, params.window(Window::CompactBump)?, grid)?;
        Ok(vec![named(report, self.name(), "h-j").with_config(echo(params))].into())
    }
}

impl Experiment for BesovBlocks {
    fn name(&self) -> &'static str {
        "besov-blocks"
    }
    fn summary(&self) -> &'static str {
        "slope in j of the Besov norm of sampled h_j"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "q", "s", "jmin", "jmax", "extent", "samples"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let family = WitnessFamily::HJ {
            js: dyadic_range(params, 2, 8)?,
        };
        let b = space(Family::Besov, params, "2", "2", "0")?;
        let report = scaling_probe(
            &family,
            b,
            Window::GaussianUnit,
            params.grid(32.0, 1 << 16)?,
        )?;
        Ok(vec![named(report, self.name(), "h-j").with_config(echo(params))].into())
    }
}

fn named(mut report: ExperimentReport, experiment: &str, series: &str) -> ExperimentReport {
    report.experiment = experiment.to_string();
    report.series = series.to_string();
    report
}

/// Coefficient sequences compared by the Khinchin experiment.
pub fn khinchin_sequences(seed: u64) -> Vec<(&'static str, WeightedSeq)> {
    vec![
        (
            "flat-8",
            make_truncated_seq(SeqGenerator::Flat, SeqKind::Uniform, 8),
        ),
        (
            "flat-16",
            make_truncated_seq(SeqGenerator::Flat, SeqKind::Uniform, 16),
        ),
        (
            "spike",
            make_truncated_seq(SeqGenerator::Spike, SeqKind::Uniform, 1),
        ),
        (
            "random-32",
            make_truncated_seq(SeqGenerator::Random(seed), SeqKind::Uniform, 32),
        ),
    ]
}

impl Experiment for Khinchin {
    fn name(&self) -> &'static str {
        "khinchin"
    }
    fn summary(&self) -> &'static str {
        "Monte Carlo random-sign sums against the square-function reference"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "trials", "seed"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let p = params.exponent("p", "2")?;
        let trials = params.parsed("trials", 10_000usize)?;
        let seed = params.parsed("seed", 7u64)?;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (i, (label, a)) in khinchin_sequences(seed).into_iter().enumerate() {
            let estimate = khinchin_mc(&a, p, trials, seed)?;
            points.push(ProbePoint::new(
                (i + 1) as f64,
                estimate.reference,
                estimate.empirical_mean,
            ));
            labels.push(format!("{}={label}", i + 1));
        }
        let mut report =
            ExperimentReport::new(self.name(), "sequences", ScheduleAxis::Linear, points)
                .with_config(echo(params))
                .with_seed(seed);
        report.notes.push(format!(
            "parameter indexes the coefficient sequence: {}",
            labels.join(", ")
        ));
        Ok(vec![report].into())
    }
}

/// Length and base separation of the finite-`N` convergence check.
pub const CONVERGENCE_LENGTH: usize = 3;
pub const CONVERGENCE_SEPARATION: f64 = 64.0;

/// `W^s_{p,q} → B_{p,q}` (or the reverse) along separated sums whose
/// coefficients come from the sequence-space oracle.
pub fn endpoint_divergence(
    pair: AtlasPair,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    convergence: bool,
) -> Result<ExperimentReport, ExperimentError> {
    let (source, target) = pair.spaces(p, q, s, 1)?;
    let (r1, s1) = shell_exponents(&source)?;
    let (r2, s2) = shell_exponents(&target)?;
    let oracle = seq_embedding_oracle(r1, s1, r2, s2, SeqKind::Dyadic, 4096);
    let lengths: Vec<usize> = match oracle.candidate {
        OracleCandidate::SpikeAtTop => (3..=10).collect(),
        _ => (0..=7).map(|k| 1usize << k).collect(),
    };
    let mut config = ProbeConfig::new(source, target, WitnessFamily::from_oracle(&oracle, lengths));
    config.window = Window::CompactBump;
    let mut report = embedding_probe(&config)?;
    report.experiment = "endpoint-divergence".into();
    report.series = pair.label().replace(':', "-in-");
    report.notes.push(format!(
        "coefficients: oracle witness {} for dyadic ({}, {}) -> ({}, {}), oracle growth {:.3}",
        oracle.witness_label, r1, s1, r2, s2, oracle.growth
    ));
    if convergence {
        // Fine sampling keeps the Riemann sums of |h_j|^p accurate; the
        // Gaussian window keeps the grid transform affordable at this size.
        let mut finite = config.clone();
        finite.grid = GridSpec::new(2048.0, 1 << 18)?;
        finite.window = Window::GaussianUnit;
        let a = oracle.candidate.build(SeqKind::Dyadic, CONVERGENCE_LENGTH);
        let [near, far] = separation_convergence(&finite, &a, CONVERGENCE_SEPARATION)?;
        let limit = separated_ratio(&finite, &a)?;
        report.notes.push(format!(
            "J={CONVERGENCE_LENGTH} convergence in N: ratio {:.6} at N={}, {:.6} at N={}, separated limit {:.6}",
            near.ratio, near.parameter, far.ratio, far.parameter, limit
        ));
    }
    Ok(report)
}

/// Outer exponent and per-shell growth `σ` with `‖a_j h_j‖ ~ |a_j| 2^{jσ}`
/// combined in `ℓ_r`.
fn shell_exponents(
    space: &SpaceSpec,
) -> Result<(ReciprocalExponent, SmoothnessIndex), ExperimentError> {
    let n = Rational::from_integer(space.n as i64);
    match space.family {
        Family::WienerAmalgam => Ok((space.p, SmoothnessIndex(space.s.0 + n * space.q.value()))),
        Family::Besov => Ok((
            space.q,
            SmoothnessIndex(space.s.0 + n * (Rational::from_integer(1) - space.p.value())),
        )),
        other => Err(ExperimentError::Unsupported(format!(
            "no shell law for {other:?}"
        ))),
    }
}

impl Experiment for EndpointDivergence {
    fn name(&self) -> &'static str {
        "endpoint-divergence"
    }
    fn summary(&self) -> &'static str {
        "ratio growth along oracle-driven separated dyadic sums"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["pair", "p", "q", "s", "convergence"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let pair: AtlasPair = params.parsed("pair", AtlasPair::WienerInBesov)?;
        let report = endpoint_divergence(
            pair,
            params.exponent("p", "4")?,
            params.exponent("q", "2")?,
            params.smoothness("s", "1/4")?,
            params.parsed("convergence", true)?,
        )?;
        Ok(vec![report.with_config(echo(params))].into())
    }
}

impl Experiment for SeqOracle {
    fn name(&self) -> &'static str {
        "seq-oracle"
    }
    fn summary(&self) -> &'static str {
        "brute-force search for a sequence violating l^{s1}_{q1} into l^{s2}_{q2}"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["q1", "s1", "q2", "s2", "kind", "budget"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let (q1, s1) = (params.exponent("q1", "2")?, params.smoothness("s1", "1")?);
        let (q2, s2) = (params.exponent("q2", "4")?, params.smoothness("s2", "0")?);
        let kind = match params.get("kind").unwrap_or("uniform") {
            "uniform" => SeqKind::Uniform,
            "dyadic" => SeqKind::Dyadic,
            other => {
                return Err(ExperimentError::Parameter {
                    key: "kind".into(),
                    reason: format!("{other:?} is not uniform or dyadic"),
                })
            }
        };
        let result =
            seq_embedding_oracle(q1, s1, q2, s2, kind, params.parsed("budget", 4096usize)?);
        let points = result
            .ratios
            .iter()
            .map(|&(t, r)| ProbePoint::new(t as f64, 1.0, r))
            .collect();
        let holds = match kind {
            SeqKind::Uniform => decide_seq_uniform(q1, s1, q2, s2, 1),
            SeqKind::Dyadic => decide_seq_dyadic(q1, s1, q2, s2),
        };
        let mut report = ExperimentReport::new(self.name(), "witness", ScheduleAxis::Log, points)
            .with_config(echo(params))
            .with_classifier(holds);
        report.disagreement = holds != result.holds_estimate;
        report.notes.push(format!(
            "witness {} holds_estimate={} growth={:.4}",
            result.witness_label, result.holds_estimate, result.growth
        ));
        Ok(vec![report].into())
    }
}

impl Experiment for Atoms {
    fn name(&self) -> &'static str {
        "atoms"
    }
    fn summary(&self) -> &'static str {
        "local Hardy and Wiener amalgam norms over a family of atoms"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "q", "seed"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let seed = params.parsed("seed", 11u64)?;
        let probe = atom_uniformity(
            params.exponent("p", "1")?,
            params.exponent("q", "inf")?,
            seed,
        )?;
        let mut report = ExperimentReport::new(
            self.name(),
            "atoms",
            ScheduleAxis::Log,
            probe.points.clone(),
        )
        .with_config(echo(params))
        .with_seed(seed);
        report.expected_slope = Some(0.0);
        let slope = |f: &Option<crate::numeric::LineFit>| f.as_ref().map_or(f64::NAN, |f| f.slope);
        report.notes.push(format!(
            "s={} hardy slope {:.4}, wiener slope {:.4}",
            probe.s,
            slope(&probe.hardy_fit),
            slope(&probe.wiener_fit)
        ));
        Ok(vec![report].into())
    }
}

impl Experiment for FourierSeries {
    fn name(&self) -> &'static str {
        "fourier-series"
    }
    fn summary(&self) -> &'static str {
        "trigonometric polynomial norms against weighted coefficient norms"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["p", "q", "s", "direction", "budget", "seed"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let direction = match params.get("direction").unwrap_or("1") {
            "1" | "bounded" => Direction::Bounded,
            "2" | "reverse" => Direction::Reverse,
            other => {
                return Err(ExperimentError::Parameter {
                    key: "direction".into(),
                    reason: format!("{other:?} is not 1 or 2"),
                })
            }
        };
        let seed = params.parsed("seed", 5u64)?;
        let result = fourier_series_sharpness(
            params.exponent("p", "2")?,
            params.exponent("q", "2")?,
            params.smoothness("s", "0")?,
            direction,
            params.parsed("budget", 256usize)?,
            seed,
        )?;
        let mut labels: Vec<&str> = result.rows.iter().map(|r| r.label.as_str()).collect();
        labels.dedup();
        let reports = labels
            .into_iter()
            .map(|label| {
                let points = result
                    .family(label)
                    .iter()
                    .map(|r| ProbePoint::new(r.n as f64, r.rhs, r.lhs))
                    .collect();
                ExperimentReport::new(self.name(), label, ScheduleAxis::Log, points)
                    .with_config(echo(params))
                    .with_seed(seed)
                    .with_classifier(result.classifier_holds)
            })
            .collect::<Vec<_>>();
        Ok(reports.into())
    }
}

impl Experiment for Localization {
    fn name(&self) -> &'static str {
        "localization"
    }
    fn summary(&self) -> &'static str {
        "localized against direct norms over random modulated Gaussians"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["space", "count", "seed"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let family = match params.get("space").unwrap_or("W") {
            "W" => Family::WienerAmalgam,
            "F" => Family::TriebelLizorkin,
            other => {
                return Err(ExperimentError::Parameter {
                    key: "space".into(),
                    reason: format!("{other:?} is not W or F"),
                })
            }
        };
        let two = ReciprocalExponent::p(2);
        let target = SpaceSpec::try_new(family, two, two, SmoothnessIndex::zero(), 1)?;
        let seed = params.parsed("seed", 3u64)?;
        let grid = GridSpec::new(32.0, 1 << 12)?;
        let functions = gaussian_family(grid, params.parsed("count", 20usize)?, seed);
        let result = localization_check(&functions, &uniform_partition(grid), &target)?;
        let mut report = ExperimentReport::new(
            self.name(),
            params.get("space").unwrap_or("W"),
            ScheduleAxis::Linear,
            result.points,
        )
        .with_config(echo(params))
        .with_seed(seed);
        report.notes.push(format!(
            "max/min ratio {:.4}, within bound: {}",
            result.spread, result.within_bound
        ));
        Ok(vec![report].into())
    }
}

impl Experiment for Atlas {
    fn name(&self) -> &'static str {
        "atlas"
    }
    fn summary(&self) -> &'static str {
        "classifier verdicts over a grid of (1/p, 1/q)"
    }
    fn keys(&self) -> &'static [&'static str] {
        &["pair", "offset", "resolution", "n"]
    }
    fn run(&self, params: &Params) -> Result<ExperimentOutput, ExperimentError> {
        let pair: AtlasPair = params.parsed("pair", AtlasPair::WienerInBesov)?;
        let mode = match params.get("offset") {
            None => SMode::AtCritical,
            Some(_) => SMode::Offset(params.smoothness("offset", "0")?.0),
        };
        let grid = atlas_grid(params.parsed("resolution", 4i64)?);
        Ok(ExperimentOutput {
            reports: Vec::new(),
            atlas: region_atlas(pair, mode, &grid, params.parsed("n", 1u32)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_every_experiment() {
        let names: Vec<&str> = ExperimentRegistry::with_defaults().names().collect();
        assert_eq!(names.len(), 10);
        assert!(names.contains(&"h-eps-scaling") && names.contains(&"atlas"));
    }

    #[test]
    fn unknown_keys_and_names_are_rejected() {
        let registry = ExperimentRegistry::with_defaults();
        assert!(registry.run("nope", &Params::new()).is_err());
        let err = registry
            .run("khinchin", &Params::new().with("bogus", "1"))
            .unwrap_err();
        assert!(matches!(err, ExperimentError::Parameter { .. }));
    }

    #[test]
    fn params_round_trip_through_lines() {
        let params = Params::parse_lines("# comment\np = 4\n\nq=inf\n").unwrap();
        assert_eq!(params.get("p"), Some("4"));
        assert_eq!(Params::parse_lines(&params.canonical()).unwrap(), params);
        assert!(Params::parse_lines("novalue").is_err());
    }

    #[test]
    fn khinchin_at_two_is_exact() {
        let out = ExperimentRegistry::with_defaults()
            .run(
                "khinchin",
                &Params::new()
                    .with("p", "2")
                    .with("trials", "1000")
                    .with("seed", "7"),
            )
            .unwrap();
        for point in &out.reports[0].points {
            assert!((point.ratio - 1.0).abs() < 1e-6);
        }
    }
}
