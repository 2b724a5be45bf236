//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the terminal.
//! The process fails if any criterion outside `KNOWN_FAILURES` fails.

use std::collections::BTreeMap;
use std::time::Instant;

use amalgam::classifier::{
    decide_b_subset_w, decide_hp_subset_w, decide_lebesgue_subset_w_endpoint, decide_seq_dyadic,
    decide_seq_uniform, decide_w_subset_b, decide_w_subset_hp, decide_w_subset_lebesgue_endpoint,
};
use amalgam::experiments::{
    atom_uniformity, dirichlet, endpoint_divergence, fourier_series_sharpness, khinchin_mc,
    khinchin_sequences, seq_embedding_oracle, AtlasPair, Direction, ExperimentRegistry, Params,
    Verdict,
};
use amalgam::filters::{flat_band, shell, FilterBank};
use amalgam::grid::GridSpec;
use amalgam::norms::{fourier_series_norm, mixed_norm, MixedNormSpec};
use amalgam::report::write_outputs;
use amalgam::sequence::SeqKind;
use amalgam::stft::{Axis, TfLattice, TfMatrix, Window};
use amalgam::{
    alpha, beta, region, EmbeddingVerdict, Endpoint, Rational, ReciprocalExponent, RegionFamily,
    RegionLabel, SmoothnessIndex,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail; each has a written analysis in the project notes.
const KNOWN_FAILURES: &[u32] = &[11];

const PARTITION_TOL: f64 = 1e-9;
const SLOPE_TOL_WIENER: f64 = 0.1;
const SLOPE_TOL_BESOV: f64 = 0.05;
const MINKOWSKI_TOL: f64 = 1e-12;
const KHINCHIN_EXACT_TOL: f64 = 1e-6;
const KHINCHIN_SPREAD: f64 = 0.15;
const KHINCHIN_TRIALS: usize = 10_000;
const DIVERGENCE_GROWTH: f64 = 2.0;
const ORACLE_MIN_GROWTH: f64 = 1.125;
const ATOM_SLOPE_TOL: f64 = 0.15;
const PARSEVAL_TOL: f64 = 1e-10;
const DIRICHLET_BAND: f64 = 0.2;
const LOCALIZATION_SPREAD: f64 = 4.0;

type Outcome = (bool, String);
type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn rat(text: &str) -> Rational {
    text.parse().expect("rational literal")
}

fn u(text: &str) -> ReciprocalExponent {
    ReciprocalExponent::new(rat(text)).expect("reciprocal exponent in range")
}

fn sm(text: &str) -> SmoothnessIndex {
    SmoothnessIndex(rat(text))
}

#[derive(Clone, Copy, Debug)]
enum Statement {
    WienerInBesov,
    BesovInWiener,
    WienerInHardy,
    HardyInWiener,
    WienerInL1,
    WienerInLinf,
    L1InWiener,
    LinfInWiener,
}

/// `(statement, 1/p, 1/q, s, holds, critical s, strict)`, worked out by hand
/// from the two-sided conditions; `1/p` is ignored for the endpoint rows.
const TRUTH_TABLE: [(Statement, &str, &str, &str, bool, &str, bool); 60] = {
    use Statement::*;
    [
        (WienerInBesov, "1/2", "1/2", "0", true, "0", false),
        (WienerInBesov, "1/4", "1/2", "1/4", false, "1/4", true),
        (WienerInBesov, "1/4", "1/2", "3/10", true, "1/4", true),
        (WienerInBesov, "0", "0", "1", true, "1", false),
        (WienerInBesov, "0", "0", "9/10", false, "1", false),
        (WienerInBesov, "1", "0", "1/2", true, "1/2", false),
        (WienerInBesov, "1", "0", "1/4", false, "1/2", false),
        (WienerInBesov, "1/4", "1", "0", false, "0", true),
        (WienerInBesov, "1/4", "1", "1/100", true, "0", true),
        (WienerInBesov, "1", "1", "0", true, "0", false),
        (WienerInBesov, "2", "1/2", "0", true, "0", false),
        (WienerInBesov, "1/2", "2", "0", false, "0", true),
        (WienerInBesov, "3/4", "0", "1/2", true, "1/2", false),
        (WienerInBesov, "1/4", "1/4", "1/2", true, "1/2", false),
        (WienerInBesov, "1/4", "1/4", "0", false, "1/2", false),
        (WienerInBesov, "1/2", "0", "1/2", true, "1/2", false),
        (BesovInWiener, "1", "1/2", "-1/2", false, "-1/2", true),
        (BesovInWiener, "1", "1/2", "-3/5", true, "-1/2", true),
        (BesovInWiener, "1/2", "1", "-1/2", true, "-1/2", false),
        (BesovInWiener, "1/2", "1", "-2/5", false, "-1/2", false),
        (BesovInWiener, "0", "0", "0", true, "0", false),
        (BesovInWiener, "1", "1", "-1", true, "-1", false),
        (BesovInWiener, "1", "0", "0", false, "0", true),
        (BesovInWiener, "1", "0", "-1/100", true, "0", true),
        (BesovInWiener, "2", "1/2", "-3/2", false, "-3/2", true),
        (BesovInWiener, "0", "1", "-1/2", true, "-1/2", false),
        (BesovInWiener, "1/4", "3/4", "-1/4", true, "-1/4", false),
        (WienerInHardy, "1/2", "1/2", "0", true, "0", false),
        (WienerInHardy, "1/2", "1/4", "1/4", false, "1/4", true),
        (WienerInHardy, "1/2", "1/4", "1/2", true, "1/4", true),
        (WienerInHardy, "2", "0", "1/2", false, "1/2", true),
        (WienerInHardy, "2", "0", "1", true, "1/2", true),
        (WienerInHardy, "1/4", "1/8", "5/8", false, "5/8", true),
        (WienerInHardy, "1/4", "1/4", "1/2", true, "1/2", false),
        (WienerInHardy, "1", "1/2", "0", true, "0", false),
        (WienerInHardy, "2", "2", "0", true, "0", false),
        (WienerInHardy, "2", "2", "-1/100", false, "0", false),
        (HardyInWiener, "1/2", "1/2", "0", true, "0", false),
        (HardyInWiener, "1/2", "1", "-1/2", false, "-1/2", true),
        (HardyInWiener, "1/2", "1", "-1", true, "-1/2", true),
        (HardyInWiener, "1", "1/2", "-1/2", true, "-1/2", false),
        (HardyInWiener, "1/4", "1", "-1/2", false, "-1/2", true),
        (HardyInWiener, "2", "1", "-2", true, "-2", false),
        (HardyInWiener, "3/4", "0", "0", true, "0", false),
        (HardyInWiener, "3/4", "0", "1/100", false, "0", false),
        (WienerInL1, "1", "1/2", "0", true, "0", false),
        (WienerInL1, "1", "0", "1/2", false, "1/2", true),
        (WienerInL1, "1", "1/4", "1/3", true, "1/4", true),
        (WienerInL1, "1", "1", "0", true, "0", false),
        (WienerInLinf, "0", "1", "0", true, "0", false),
        (WienerInLinf, "0", "1/2", "1/2", false, "1/2", true),
        (WienerInLinf, "0", "0", "1", false, "1", true),
        (WienerInLinf, "0", "0", "11/10", true, "1", true),
        (L1InWiener, "1", "0", "0", true, "0", false),
        (L1InWiener, "1", "1/2", "-1/2", false, "-1/2", true),
        (L1InWiener, "1", "1", "-1", false, "-1", true),
        (L1InWiener, "1", "1", "-2", true, "-1", true),
        (LinfInWiener, "0", "1/2", "0", true, "0", false),
        (LinfInWiener, "0", "1", "-1/2", false, "-1/2", true),
        (LinfInWiener, "0", "0", "0", true, "0", false),
    ]
};

fn decide(
    statement: Statement,
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
) -> EmbeddingVerdict {
    use Statement::*;
    match statement {
        WienerInBesov => decide_w_subset_b(p, q, s, 1),
        BesovInWiener => decide_b_subset_w(p, q, s, 1),
        WienerInHardy => decide_w_subset_hp(p, q, s, 1).expect("finite p"),
        HardyInWiener => decide_hp_subset_w(p, q, s, 1).expect("finite p"),
        WienerInL1 => decide_w_subset_lebesgue_endpoint(Endpoint::One, q, s, 1),
        WienerInLinf => decide_w_subset_lebesgue_endpoint(Endpoint::Infinity, q, s, 1),
        L1InWiener => decide_lebesgue_subset_w_endpoint(Endpoint::One, q, s, 1),
        LinfInWiener => decide_lebesgue_subset_w_endpoint(Endpoint::Infinity, q, s, 1),
    }
}

fn c1_truth_tables() -> Outcome {
    let mut mismatches = Vec::new();
    for (i, &(statement, p, q, s, holds, critical, strict)) in TRUTH_TABLE.iter().enumerate() {
        let v = decide(statement, u(p), u(q), sm(s));
        if v.holds != holds || v.critical_s != sm(critical) || v.strict_required != strict {
            mismatches.push(format!(
                "#{i} {statement:?} 1/p={p} 1/q={q} s={s}: got {v:?}"
            ));
        }
    }
    let regions = [
        ("1/4", "1", RegionFamily::Alpha, RegionLabel::A1),
        ("1/4", "1/2", RegionFamily::Alpha, RegionLabel::A2),
        ("1", "0", RegionFamily::Alpha, RegionLabel::A3),
        ("0", "0", RegionFamily::Beta, RegionLabel::B1),
        ("1", "1", RegionFamily::Beta, RegionLabel::B2),
        ("0", "1", RegionFamily::Beta, RegionLabel::B3),
        (
            "1/2",
            "1/2",
            RegionFamily::Alpha,
            RegionLabel::BoundaryOfSeveral,
        ),
        (
            "1/2",
            "0",
            RegionFamily::Alpha,
            RegionLabel::BoundaryOfSeveral,
        ),
    ];
    for (p, q, family, label) in regions {
        let got = region(u(p), u(q), family);
        if got != label {
            mismatches.push(format!(
                "region 1/p={p} 1/q={q}: got {got:?}, want {label:?}"
            ));
        }
    }
    let detail = format!(
        "{} statements, {} region labels, {} mismatches",
        TRUTH_TABLE.len(),
        regions.len(),
        mismatches.len()
    );
    (
        mismatches.is_empty(),
        mismatches.first().cloned().unwrap_or(detail),
    )
}

fn c2_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for _ in 0..1000 {
        let mut draw = || {
            let den = rng.random_range(1..=60i64);
            let num = rng.random_range(0..=den);
            ReciprocalExponent::new(Rational::new(num, den)).expect("in [0, 1]")
        };
        let (p, q) = (draw(), draw());
        let (pc, qc) = (p.conjugate().expect("p ≥ 1"), q.conjugate().expect("q ≥ 1"));
        if alpha(p, q, 1).0 != -beta(pc, qc, 1).0 {
            failures += 1;
        }
    }
    (failures == 0, format!("1000 points, {failures} violations"))
}

fn c3_partition_of_unity() -> Outcome {
    let spec = GridSpec::new(16.0, 1 << 14).expect("grid");
    let bank = FilterBank::new(spec, 8).expect("jmax 8 resolves on this grid");
    let resolved = flat_band(8).1;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (l, xi) in spec.xis().into_iter().enumerate() {
        if xi.abs() <= resolved {
            let total: f64 = (0..=8).map(|j| bank.filter(j)[l]).sum();
            worst = worst.max((total - 1.0).abs());
            count += 1;
        }
    }
    let off_grid = (0..=8).map(|j| shell(j, 123.456)).sum::<f64>() - 1.0;
    worst = worst.max(off_grid.abs());
    (
        worst <= PARTITION_TOL,
        format!("max |Σψ_j − 1| = {worst:.2e} over {count} frequencies, |ξ| ≤ {resolved:.1}"),
    )
}

fn run_slope(registry: &ExperimentRegistry, experiment: &str, params: Params) -> (f64, f64) {
    let out = registry.run(experiment, &params).expect("experiment runs");
    let report = &out.reports[0];
    (
        report.fit.as_ref().map_or(f64::NAN, |f| f.slope),
        report.expected_slope.unwrap_or(f64::NAN),
    )
}

fn slope_criterion(
    registry: &ExperimentRegistry,
    experiment: &str,
    cases: &[(&str, &str, &str, f64)],
    tolerance: f64,
) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(p, q, s, expected) in cases {
        let (slope, reported) = run_slope(
            registry,
            experiment,
            Params::new().with("p", p).with("q", q).with("s", s),
        );
        let pass = (slope - expected).abs() <= tolerance && (reported - expected).abs() < 1e-12;
        ok &= pass;
        parts.push(format!("({p},{q},{s}) {slope:.4}/{expected}"));
    }
    (
        ok,
        format!("slope/expected {} ±{tolerance}", parts.join(", ")),
    )
}

fn c4_h_eps(registry: &ExperimentRegistry) -> Outcome {
    slope_criterion(
        registry,
        "h-eps-scaling",
        &[
            ("2", "2", "0", 0.5),
            ("4", "2", "1/4", 0.75),
            ("1", "inf", "0", 0.0),
        ],
        SLOPE_TOL_WIENER,
    )
}

fn c5_h_j(registry: &ExperimentRegistry) -> Outcome {
    slope_criterion(
        registry,
        "h-j-scaling",
        &[
            ("2", "2", "0", 0.5),
            ("2", "4", "0", 0.25),
            ("4", "2", "1/2", 1.0),
        ],
        SLOPE_TOL_WIENER,
    )
}

fn c6_besov(registry: &ExperimentRegistry) -> Outcome {
    slope_criterion(
        registry,
        "besov-blocks",
        &[
            ("1", "2", "0", 0.0),
            ("2", "2", "0", 0.5),
            ("4", "2", "0", 0.75),
        ],
        SLOPE_TOL_BESOV,
    )
}

fn c7_minkowski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = [("1/2", "1/4"), ("1/4", "1/2"), ("1", "0")];
    let mut violations = 0;
    let mut checked = 0;
    for (p, q) in cases {
        let (p, q) = (u(p), u(q));
        for _ in 0..100 {
            let (nt, nf) = (rng.random_range(2..12usize), rng.random_range(2..12usize));
            let lattice = TfLattice {
                time: Axis {
                    start: -1.0,
                    step: rng.random_range(0.1..1.0),
                    count: nt,
                },
                freq: Axis {
                    start: -2.0,
                    step: rng.random_range(0.1..1.0),
                    count: nf,
                },
            };
            let values = (0..nt * nf)
                .map(|_| {
                    let scale = rng.random_range(-8.0..8.0f64).exp2();
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
                })
                .collect();
            let v = TfMatrix::new(lattice, Window::GaussianUnit, values);
            let w = mixed_norm(&v, &MixedNormSpec::wiener(p, q, SmoothnessIndex::zero()));
            let m = mixed_norm(
                &v,
                &MixedNormSpec::modulation(p, q, SmoothnessIndex::zero()),
            );
            // Minkowski: the larger exponent outside gives the smaller norm.
            let (small, large) = if p.value() <= q.value() {
                (w, m)
            } else {
                (m, w)
            };
            if small > large * (1.0 + MINKOWSKI_TOL) {
                violations += 1;
            }
            checked += 1;
        }
    }
    (
        violations == 0,
        format!("{checked} random matrices over (2,4), (4,2), (1,∞): {violations} violations"),
    )
}

fn c8_khinchin() -> Outcome {
    let sequences: BTreeMap<&str, _> = khinchin_sequences(7).into_iter().collect();
    let seed = 7;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut worst_exact: f64 = 0.0;
    for a in sequences.values() {
        let e =
            khinchin_mc(a, ReciprocalExponent::p(2), KHINCHIN_TRIALS, seed).expect("p = 2 runs");
        worst_exact = worst_exact.max((e.ratio - 1.0).abs());
    }
    ok &= worst_exact <= KHINCHIN_EXACT_TOL;
    parts.push(format!("p=2 max |ratio−1| {worst_exact:.1e}"));
    // The long sequences share one limit; a single spike is compared at p = 1 only.
    let families: [(i64, &[&str]); 2] = [
        (1, &["flat-8", "flat-16", "random-32", "spike"]),
        (4, &["flat-8", "flat-16", "random-32"]),
    ];
    for (p, names) in families {
        let ratios: Vec<f64> = names
            .iter()
            .map(|n| {
                khinchin_mc(
                    &sequences[n],
                    ReciprocalExponent::p(p),
                    KHINCHIN_TRIALS,
                    seed,
                )
                .expect("runs")
                .ratio
            })
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
        ok &= hi / lo <= 1.0 + KHINCHIN_SPREAD;
        parts.push(format!(
            "p={p} ratios {:.3?} max/min {:.3}",
            ratios,
            hi / lo
        ));
    }
    (ok, parts.join("; "))
}

fn c9_endpoint() -> Outcome {
    let cases = [
        (
            AtlasPair::WienerInBesov,
            u("1/4"),
            u("1/2"),
            sm("1/4"),
            true,
        ),
        (AtlasPair::BesovInWiener, u("1"), u("1/2"), sm("0"), false),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (pair, p, q, s, convergence) in cases {
        let report = endpoint_divergence(pair, p, q, s, convergence).expect("probe runs");
        let growth = report.growth().unwrap_or(0.0);
        let pass = report.verdict == Verdict::DivergenceDetected
            && growth >= DIVERGENCE_GROWTH
            && report.classifier_holds == Some(false);
        ok &= pass;
        parts.push(format!(
            "{} {:?} growth {growth:.2}",
            report.series, report.verdict
        ));
    }
    (ok, parts.join("; "))
}

fn c10_oracle() -> Outcome {
    let recips = ["0", "1/4", "1/2", "1"].map(u);
    let smooth = [
        ("0", "0"),
        ("1/2", "0"),
        ("0", "1/2"),
        ("1/4", "1/4"),
        ("1", "1/2"),
        ("1/2", "1"),
    ];
    let extras = [
        ("1/2", "1/4", "1/4", "0"),
        ("1", "0", "0", "-1"),
        ("1/4", "1/2", "1/2", "1/4"),
        ("0", "1", "1", "0"),
    ];
    let mut cases = Vec::new();
    for kind in [SeqKind::Uniform, SeqKind::Dyadic] {
        for q1 in recips {
            for q2 in recips {
                for (s1, s2) in smooth {
                    cases.push((kind, q1, sm(s1), q2, sm(s2)));
                }
            }
        }
        for (q1, s1, q2, s2) in extras {
            cases.push((kind, u(q1), sm(s1), u(q2), sm(s2)));
        }
    }
    let mut mismatches = 0;
    let mut weak_witnesses = 0;
    let mut divergent = 0;
    for &(kind, q1, s1, q2, s2) in &cases {
        let holds = match kind {
            SeqKind::Uniform => decide_seq_uniform(q1, s1, q2, s2, 1),
            SeqKind::Dyadic => decide_seq_dyadic(q1, s1, q2, s2),
        };
        let r = seq_embedding_oracle(q1, s1, q2, s2, kind, 4096);
        if holds != r.holds_estimate {
            mismatches += 1;
        }
        if !r.holds_estimate {
            divergent += 1;
            let lr = &r.log2_ratios;
            let growing = lr.windows(2).last().is_some_and(|w| w[1] > w[0]);
            let growth = lr.last().zip(lr.first()).map_or(0.0, |(l, f)| l - f);
            if growth < ORACLE_MIN_GROWTH.log2() || !growing || r.witness.is_empty() {
                weak_witnesses += 1;
            }
        }
    }
    (
        cases.len() == 200 && mismatches == 0 && weak_witnesses == 0,
        format!("{} cases, {mismatches} mismatches, {divergent} divergent with {weak_witnesses} weak witnesses", cases.len()),
    )
}

fn c11_atoms() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, q) in [("2", "1"), ("1", "0")] {
        let probe = atom_uniformity(u(p), u(q), 11).expect("atoms evaluate");
        let slope = probe.wiener_fit.as_ref().map_or(f64::NAN, |f| f.slope);
        ok &= slope.abs() <= ATOM_SLOPE_TOL;
        let range = probe
            .points
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), pt| {
                (lo.min(pt.target_norm), hi.max(pt.target_norm))
            });
        parts.push(format!(
            "1/p={p} 1/q={q} s={} slope {slope:.3} norms in [{:.3}, {:.3}]",
            probe.s, range.0, range.1
        ));
    }
    (ok, format!("{} (±{ATOM_SLOPE_TOL})", parts.join("; ")))
}

fn c12_fourier() -> Outcome {
    let two = ReciprocalExponent::p(2);
    let report = fourier_series_sharpness(
        two,
        two,
        SmoothnessIndex::zero(),
        Direction::Bounded,
        256,
        5,
    )
    .expect("runs");
    let parseval = report
        .rows
        .iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    let values: Vec<f64> = [16usize, 32, 64, 128]
        .iter()
        .map(|&n| {
            fourier_series_norm(&dirichlet(n), ReciprocalExponent::p(1)).expect("uniform")
                / (n as f64).ln()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let band = values
        .iter()
        .map(|v| (v / mean - 1.0).abs())
        .fold(0.0, f64::max);
    (
        parseval <= PARSEVAL_TOL && band <= DIRICHLET_BAND,
        format!("Parseval max |ratio−1| {parseval:.1e} over {} rows; ‖D_N‖_1/ln N {values:.3?}, max deviation from mean {band:.3}", report.rows.len()),
    )
}

fn c13_localization(registry: &ExperimentRegistry) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for space in ["W", "F"] {
        let out = registry
            .run("localization", &Params::new().with("space", space))
            .expect("runs");
        let ratios: Vec<f64> = out.reports[0].points.iter().map(|p| p.ratio).collect();
        let spread = ratios.iter().cloned().fold(0.0, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= ratios.len() == 20 && spread <= LOCALIZATION_SPREAD;
        parts.push(format!("{space}: max/min {spread:.3}"));
    }
    (
        ok,
        format!("{} (≤ {LOCALIZATION_SPREAD})", parts.join(", ")),
    )
}

fn c14_determinism(registry: &ExperimentRegistry) -> Outcome {
    let runs: [(&str, Params); 7] = [
        ("khinchin", Params::new().with("p", "4")),
        ("seq-oracle", Params::new()),
        ("atoms", Params::new()),
        (
            "fourier-series",
            Params::new().with("p", "1").with("q", "inf"),
        ),
        ("localization", Params::new().with("space", "F")),
        ("h-j-scaling", Params::new()),
        ("atlas", Params::new().with("resolution", "2")),
    ];
    let dirs = [
        tempfile::tempdir().expect("tempdir"),
        tempfile::tempdir().expect("tempdir"),
    ];
    let mut files = 0;
    let mut differing = Vec::new();
    for (experiment, params) in &runs {
        let mut written = Vec::new();
        for dir in &dirs {
            let out = registry.run(experiment, params).expect("runs");
            written.push(write_outputs(dir.path(), experiment, &out).expect("writes"));
        }
        for name in written[0].iter().filter(|n| n.ends_with(".csv")) {
            files += 1;
            let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(name)).expect("written");
            if read(&dirs[0]) != read(&dirs[1]) {
                differing.push(name.clone());
            }
        }
    }
    (
        differing.is_empty() && files > 0,
        format!(
            "{files} CSV files from {} experiments, differing: {differing:?}",
            runs.len()
        ),
    )
}

fn main() {
    let registry = ExperimentRegistry::with_defaults();
    let criteria: Vec<Criterion> = vec![
        (1, "classifier truth tables", Box::new(c1_truth_tables)),
        (2, "duality identity", Box::new(c2_duality)),
        (
            3,
            "filter bank partition of unity",
            Box::new(c3_partition_of_unity),
        ),
        (4, "h_eps scaling law", Box::new(|| c4_h_eps(&registry))),
        (5, "h_j scaling law", Box::new(|| c5_h_j(&registry))),
        (6, "Besov block slopes", Box::new(|| c6_besov(&registry))),
        (7, "discrete Minkowski sandwich", Box::new(c7_minkowski)),
        (8, "Khinchin ratios", Box::new(c8_khinchin)),
        (9, "endpoint divergence", Box::new(c9_endpoint)),
        (10, "sequence oracle concordance", Box::new(c10_oracle)),
        (11, "atom uniformity", Box::new(c11_atoms)),
        (12, "Fourier series checks", Box::new(c12_fourier)),
        (13, "localization", Box::new(|| c13_localization(&registry))),
        (14, "determinism", Box::new(|| c14_determinism(&registry))),
    ];
    let mut unexpected = Vec::new();
    for (id, title, check) in &criteria {
        let start = Instant::now();
        let (pass, detail) = check();
        let status = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && KNOWN_FAILURES.contains(id) {
            " (known)"
        } else {
            ""
        };
        println!(
            "C{id:<2} {status}{known} {title}: {detail} [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        if !pass && !KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
