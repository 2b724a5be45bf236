use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{judge, ratio_fit, ExperimentError, ProbePoint, ScheduleAxis, Verdict};
use crate::classifier::{decide_lebesgue_subset_w, decide_w_subset_lebesgue};
use crate::exponent::{ReciprocalExponent, SmoothnessIndex};
use crate::norms::fourier_series_norm;
use crate::sequence::{seq_norm, SeqKind, WeightedSeq};

const FIRST_DEGREE: usize = 16;
const MIN_DEGREES: usize = 4;

/// Which side of the trigonometric-polynomial inequality is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `‖Σ a_k e^{2πikx}‖_{L_p(T)} ≲ ‖a‖_{ℓ_q^s}`, the shadow of `W^s_{p,q} ⊂ L_p`.
    Bounded,
    /// `‖a‖_{ℓ_q^s} ≲ ‖Σ a_k e^{2πikx}‖_{L_p(T)}`, the shadow of `L_p ⊂ W^s_{p,q}`.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierRow {
    pub label: String,
    /// Degree: coefficients live on `-n..=n`.
    pub n: usize,
    /// The side claimed to be dominated.
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierReport {
    pub p: ReciprocalExponent,
    pub q: ReciprocalExponent,
    pub s: SmoothnessIndex,
    pub direction: Direction,
    pub rows: Vec<FourierRow>,
    pub classifier_holds: bool,
    /// `DivergenceDetected` if any family diverges along the degree schedule,
    /// `ConsistentWithEmbedding` if all stay bounded.
    pub verdict: Verdict,
    /// Family with the largest ratio growth.
    pub worst_family: String,
}

impl FourierReport {
    pub fn family(&self, label: &str) -> Vec<&FourierRow> {
        self.rows.iter().filter(|r| r.label == label).collect()
    }
}

/// Dirichlet coefficients: ones on `-n..=n`.
pub fn dirichlet(n: usize) -> WeightedSeq {
    WeightedSeq::from_values(SeqKind::Uniform, -(n as i64), vec![1.0; 2 * n + 1])
}

fn spike(n: usize) -> WeightedSeq {
    WeightedSeq::from_values(SeqKind::Uniform, n as i64, [1.0])
}

fn random_signs(n: usize, seed: u64) -> WeightedSeq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..=2 * n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    WeightedSeq::from_values(SeqKind::Uniform, -(n as i64), values)
}

/// `e^{iπk²/n}`, whose polynomial has nearly flat modulus.
fn chirp(n: usize) -> WeightedSeq {
    let mut a = WeightedSeq::new(SeqKind::Uniform);
    for k in -(n as i64)..=n as i64 {
        a.entries.insert(
            k,
            Complex64::from_polar(1.0, PI * ((k * k) as f64 / n as f64).rem_euclid(2.0)),
        );
    }
    a
}

/// Evaluates the inequality in `direction` on Dirichlet, spike, random-sign
/// and chirp coefficients of degrees `16, 32, …, budget`.
pub fn fourier_series_sharpness(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    direction: Direction,
    budget: usize,
    seed: u64,
) -> Result<FourierReport, ExperimentError> {
    let degrees: Vec<usize> = std::iter::successors(Some(FIRST_DEGREE), |n| Some(n * 2))
        .take_while(|n| *n <= budget)
        .collect();
    if degrees.len() < MIN_DEGREES {
        return Err(ExperimentError::ShortSchedule {
            needed: MIN_DEGREES,
            got: degrees.len(),
        });
    }
    let classifier_holds = match direction {
        Direction::Bounded => decide_w_subset_lebesgue(p, q, s, 1)?,
        Direction::Reverse => decide_lebesgue_subset_w(p, q, s, 1)?,
    }
    .holds;
    let families: [(&str, &dyn Fn(usize) -> WeightedSeq); 4] = [
        ("dirichlet", &dirichlet),
        ("spike", &spike),
        ("random", &|n| random_signs(n, seed ^ n as u64)),
        ("chirp", &chirp),
    ];
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut worst = (f64::NEG_INFINITY, String::new());
    for (label, make) in families {
        let mut points = Vec::with_capacity(degrees.len());
        for &n in &degrees {
            let a = make(n);
            let poly = fourier_series_norm(&a, p)?;
            let coeff = seq_norm(&a, q, s);
            let (lhs, rhs) = match direction {
                Direction::Bounded => (poly, coeff),
                Direction::Reverse => (coeff, poly),
            };
            rows.push(FourierRow {
                label: label.to_string(),
                n,
                lhs,
                rhs,
                ratio: lhs / rhs,
            });
            points.push(ProbePoint::new(n as f64, rhs, lhs));
        }
        let growth = points.last().map_or(0.0, |l| l.ratio) / points[0].ratio;
        if growth > worst.0 {
            worst = (growth, label.to_string());
        }
        verdicts.push(judge(
            &points,
            ratio_fit(&points, ScheduleAxis::Log).as_ref(),
        ));
    }
    let verdict = if verdicts.contains(&Verdict::DivergenceDetected) {
        Verdict::DivergenceDetected
    } else if verdicts
        .iter()
        .all(|v| *v == Verdict::ConsistentWithEmbedding)
    {
        Verdict::ConsistentWithEmbedding
    } else {
        Verdict::Inconclusive
    };
    Ok(FourierReport {
        p,
        q,
        s,
        direction,
        rows,
        classifier_holds,
        verdict,
        worst_family: worst.1,
    })
}
