//! Extremal families: dilated profiles, separated dyadic sums, lattice sums
//! with random signs, `h_p`-atoms and truncated sequences.
//!
//! Every family exists in two forms: samples on a [`GridSpec`] for the grid
//! engines, and a closed-form [`Spectrum`] for the spectral STFT.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::smooth_step;
use crate::grid::io::{write_binary, FormatError, Precision};
use crate::grid::{GridError, GridFunction, GridSpec};
use crate::sequence::{SeqKind, WeightedSeq};
use crate::spectrum::{Combination, Dilated, Modulated, Spectrum, Translated};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("family reaches |x| = {reach} but the core of the grid ends at {limit}")]
    DomainOverflow { reach: f64, limit: f64 },
    #[error("frequency {top} is beyond the grid band edge {band_edge}")]
    Aliasing { top: f64, band_edge: f64 },
    #[error("{kind:?} atoms need a cube of side {requirement}, got {side}")]
    CubeSize {
        kind: AtomKind,
        side: f64,
        requirement: &'static str,
    },
    #[error("cannot orthogonalize against degree {degree} on {samples} samples")]
    Degenerate { degree: usize, samples: usize },
    #[error("expected a {expected:?} sequence")]
    SeqKind { expected: SeqKind },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Real, even spectral profiles with exact frequency support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// Supported in `3/4 ≤ |ξ| ≤ 4/3`, equal to `1` on `7/8 ≤ |ξ| ≤ 8/7`.
    Dyadic,
    /// Supported in `|ξ| ≤ 1`, equal to `1` on `|ξ| ≤ 1/2`.
    Low,
    /// Supported in `|ξ| ≤ 1/16`, so integer shifts have disjoint supports.
    Lattice,
}

/// Support radius of [`Profile::Lattice`].
pub const LATTICE_RADIUS: Ratio<i64> = Ratio::new_raw(1, 16);

impl Profile {
    pub fn value(self, xi: f64) -> f64 {
        let a = xi.abs();
        match self {
            Profile::Dyadic => {
                if a <= 0.75 || a >= 4.0 / 3.0 {
                    0.0
                } else if a < 0.875 {
                    smooth_step((a - 0.75) * 8.0)
                } else if a <= 8.0 / 7.0 {
                    1.0
                } else {
                    smooth_step((4.0 / 3.0 - a) / (4.0 / 3.0 - 8.0 / 7.0))
                }
            }
            Profile::Low => smooth_step((1.0 - a) * 2.0),
            Profile::Lattice => smooth_step((1.0 - 16.0 * a) * 2.0),
        }
    }

    pub fn freq_radius(self) -> f64 {
        match self {
            Profile::Dyadic => 4.0 / 3.0,
            Profile::Low => 1.0,
            Profile::Lattice => 1.0 / 16.0,
        }
    }

    /// Outside this radius `|f|` stays below `1e-5` of its peak.
    pub fn time_radius(self) -> f64 {
        match self {
            Profile::Dyadic => 64.0,
            Profile::Low => 32.0,
            Profile::Lattice => 256.0,
        }
    }

    pub fn sample(self, spec: GridSpec) -> Result<GridFunction, WitnessError> {
        check_band(&spec, self.freq_radius())?;
        Ok(GridFunction::from_spectrum(spec, &self))
    }
}

impl Spectrum for Profile {
    fn eval(&self, xi: f64) -> Complex64 {
        Complex64::new(self.value(xi), 0.0)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        let r = self.freq_radius();
        match self {
            Profile::Dyadic => vec![(-r, -0.75), (0.75, r)],
            _ => vec![(-r, r)],
        }
    }
    fn time_radius(&self) -> f64 {
        Profile::time_radius(*self)
    }
}

/// Radius holding all but `1e-6` of the squared `L_2` mass.
fn core_radius(profile: Profile) -> f64 {
    profile.time_radius() / 2.0
}

fn check_band(spec: &GridSpec, top: f64) -> Result<(), WitnessError> {
    let band_edge = spec.band() / 2.0;
    if top >= band_edge {
        return Err(WitnessError::Aliasing { top, band_edge });
    }
    Ok(())
}

fn check_core(spec: &GridSpec, reach: f64) -> Result<(), WitnessError> {
    let limit = spec.extent() / 4.0;
    if reach > limit {
        return Err(WitnessError::DomainOverflow { reach, limit });
    }
    Ok(())
}

/// `ĥ_ε(ξ) = ĥ(ξ/ε)` from samples of the low profile.
pub fn make_h_eps(profile_low: &GridFunction, eps: f64) -> Result<GridFunction, WitnessError> {
    Ok(profile_low.dilate(eps)?)
}

/// Closed form of [`make_h_eps`].
pub fn h_eps_spectrum(eps: f64) -> Dilated<Profile> {
    Dilated {
        inner: Profile::Low,
        factor: eps,
    }
}

/// `ĥ_j(ξ) = ĥ(ξ/2^j)` for the dyadic profile.
pub fn h_j_spectrum(j: u32) -> Dilated<Profile> {
    Dilated {
        inner: Profile::Dyadic,
        factor: 2f64.powi(j as i32),
    }
}

/// Samples of `h_j`, taken from its exact transform.
pub fn make_h_j(spec: GridSpec, j: u32) -> Result<GridFunction, WitnessError> {
    let h = h_j_spectrum(j);
    check_band(&spec, h.support()[1].1)?;
    Ok(GridFunction::from_spectrum(spec, &h))
}

/// `F_N = Σ_j a_j T_{Nj} h_j`.
pub fn f_n_spectrum(a: &WeightedSeq, separation: f64) -> Result<Combination, WitnessError> {
    if a.kind != SeqKind::Dyadic {
        return Err(WitnessError::SeqKind {
            expected: SeqKind::Dyadic,
        });
    }
    let mut sum = Combination::default();
    for (&j, &c) in &a.entries {
        if c.norm() == 0.0 {
            continue;
        }
        let term = Translated {
            inner: h_j_spectrum(j as u32),
            shift: separation * j as f64,
        };
        sum.push(c, Arc::new(term));
    }
    Ok(sum)
}

/// Grid samples of `F_N`; every translate must sit in `[-L/4, L/4]`.
pub fn make_f_n(
    spec: GridSpec,
    a: &WeightedSeq,
    separation: f64,
) -> Result<GridFunction, WitnessError> {
    let sum = f_n_spectrum(a, separation)?;
    let top = a
        .entries
        .keys()
        .max()
        .map_or(0.0, |&j| 2f64.powi(j as i32) * 4.0 / 3.0);
    check_band(&spec, top)?;
    let reach = a
        .entries
        .keys()
        .map(|&j| separation * j as f64 + core_radius(Profile::Dyadic) / 2f64.powi(j as i32))
        .fold(0.0, f64::max);
    check_core(&spec, reach)?;
    Ok(GridFunction::from_spectrum(spec, &sum))
}

/// Lattice points `k` whose shifted support `[k - 1/16, k + 1/16]` lies
/// strictly inside the flat band of shell `j`.
pub fn lattice_indices(j: u32) -> Vec<i64> {
    let r = LATTICE_RADIUS;
    let scale = Ratio::from_integer(1i64 << j);
    let (lo, hi) = if j == 0 {
        (Ratio::new(-4, 3), Ratio::new(4, 3))
    } else {
        (Ratio::new(3, 4) * scale, Ratio::new(4, 3) * scale)
    };
    let inside = |k: i64| {
        let k = Ratio::from_integer(k);
        if j == 0 {
            lo < k - r && k + r < hi
        } else {
            let a = if k < Ratio::from_integer(0) { -k } else { k };
            lo < a - r && a + r < hi
        }
    };
    let reach = hi.to_integer() + 1;
    (-reach..=reach).filter(|&k| inside(k)).collect()
}

/// `M_k g`, the lattice profile shifted to frequency `k`.
pub fn lattice_atom(k: i64) -> Modulated<Profile> {
    Modulated {
        inner: Profile::Lattice,
        eta: k as f64,
    }
}

/// `G_N = Σ_j b_j Σ_{k ∈ Γ_j} T_{Nk} M_k g`.
pub fn g_n_spectrum(b: &WeightedSeq, separation: f64) -> Result<Combination, WitnessError> {
    if b.kind != SeqKind::Dyadic {
        return Err(WitnessError::SeqKind {
            expected: SeqKind::Dyadic,
        });
    }
    let mut sum = Combination::default();
    for (&j, &c) in &b.entries {
        if c.norm() == 0.0 {
            continue;
        }
        for k in lattice_indices(j as u32) {
            sum.push(
                c,
                Arc::new(Translated {
                    inner: lattice_atom(k),
                    shift: separation * k as f64,
                }),
            );
        }
    }
    Ok(sum)
}

pub fn make_g_n(
    spec: GridSpec,
    b: &WeightedSeq,
    separation: f64,
) -> Result<GridFunction, WitnessError> {
    let sum = g_n_spectrum(b, separation)?;
    let reach_k = b
        .entries
        .keys()
        .flat_map(|&j| lattice_indices(j as u32))
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    check_band(&spec, reach_k as f64 + Profile::Lattice.freq_radius())?;
    check_core(
        &spec,
        separation * reach_k as f64 + core_radius(Profile::Lattice),
    )?;
    Ok(GridFunction::from_spectrum(spec, &sum))
}

/// Independent `±1` signs, reproducible from `(seed, stream)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignVector {
    pub seed: u64,
    pub stream: u64,
    pub signs: BTreeMap<i64, i8>,
}

impl SignVector {
    pub fn draw(seed: u64, stream: u64, indices: impl IntoIterator<Item = i64>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let signs = indices
            .into_iter()
            .map(|k| (k, if rng.random::<bool>() { 1 } else { -1 }))
            .collect();
        Self {
            seed,
            stream,
            signs,
        }
    }

    pub fn get(&self, k: i64) -> f64 {
        f64::from(self.signs.get(&k).copied().unwrap_or(1))
    }
}

/// `G^ω = Σ_k ω_k a_k M_k g` as a spectrum.
pub fn khinchin_spectrum(a: &WeightedSeq, signs: &SignVector) -> Combination {
    let mut sum = Combination::default();
    for (&k, &c) in &a.entries {
        sum.push(c * signs.get(k), Arc::new(lattice_atom(k)));
    }
    sum
}

/// Grid samples of `G^ω`: `g(x) · Σ_k ω_k a_k e^{2πikx}`.
pub fn make_khinchin(
    spec: GridSpec,
    a: &WeightedSeq,
    signs: &SignVector,
) -> Result<GridFunction, WitnessError> {
    if a.kind != SeqKind::Uniform {
        return Err(WitnessError::SeqKind {
            expected: SeqKind::Uniform,
        });
    }
    check_band(&spec, a.reach() as f64 + Profile::Lattice.freq_radius())?;
    let g = Profile::Lattice.sample(spec)?;
    Ok(g.map(|x, v| {
        let poly: Complex64 = a
            .entries
            .iter()
            .map(|(&k, &c)| {
                c * signs.get(k)
                    * Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * (k as f64 * x).rem_euclid(1.0),
                    )
            })
            .sum();
        v * poly
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    /// `|Q| < 1`, with vanishing moments.
    Small,
    /// `|Q| ≥ 1`, no cancellation required.
    Big,
}

#[derive(Clone, Debug)]
pub struct Atom {
    pub values: GridFunction,
    pub cube_center: f64,
    pub cube_side: f64,
    pub kind: AtomKind,
    pub p: crate::exponent::ReciprocalExponent,
}

impl Atom {
    /// Number of vanishing moments required: `⌊1/p - 1⌋ + 1` for small atoms.
    pub fn moment_count(kind: AtomKind, p: crate::exponent::ReciprocalExponent) -> usize {
        match kind {
            AtomKind::Big => 0,
            AtomKind::Small => {
                let excess = p.value() - Ratio::from_integer(1);
                if excess < Ratio::from_integer(0) {
                    0
                } else {
                    excess.floor().to_integer() as usize + 1
                }
            }
        }
    }

    /// `∫ x^γ a(x) dx` about the cube center.
    pub fn moment(&self, degree: u32) -> f64 {
        let spec = self.values.spec();
        let terms: Vec<f64> = self
            .values
            .values()
            .iter()
            .zip(spec.xs())
            .map(|(v, x)| v.re * (x - self.cube_center).powi(degree as i32))
            .collect();
        crate::numeric::pairwise_sum(&terms) * spec.dx()
    }
}

/// Grid used for an atom on a cube of side `side` centered at the origin.
pub fn atom_grid(side: f64) -> Result<GridSpec, GridError> {
    let extent = if side < 1.0 { 32.0 } else { 64.0 };
    GridSpec::with_spacing(extent, (side / 64.0).min(1.0 / 32.0))
}

/// A pseudo-random smooth atom on `[-side/2, side/2]`, with `‖a‖_∞ = side^{-1/p}`.
///
/// The profile is a bump times `t^{g+1}` plus a random low-frequency cosine;
/// small atoms are then projected off the polynomials of degree `< g + 1`
/// orthonormal for the bump weight.
pub fn make_atom(
    kind: AtomKind,
    p: crate::exponent::ReciprocalExponent,
    cube_side: f64,
    seed: u64,
) -> Result<Atom, WitnessError> {
    match kind {
        AtomKind::Small if !(cube_side > 0.0 && cube_side < 1.0) => {
            return Err(WitnessError::CubeSize {
                kind,
                side: cube_side,
                requirement: "in (0, 1)",
            })
        }
        AtomKind::Big if !(cube_side >= 1.0 && cube_side.is_finite()) => {
            return Err(WitnessError::CubeSize {
                kind,
                side: cube_side,
                requirement: "at least 1",
            })
        }
        _ => {}
    }
    let spec = atom_grid(cube_side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let freq: f64 = rng.random_range(0.5..1.5);
    let phase: f64 = rng.random_range(0.0..6.0);
    let ts: Vec<f64> = spec.xs().into_iter().map(|x| 2.0 * x / cube_side).collect();
    let weight: Vec<f64> = ts
        .iter()
        .map(|&t| {
            if t.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let lead = Atom::moment_count(AtomKind::Small, p) as i32;
    let mut profile: Vec<f64> = ts
        .iter()
        .map(|&t| t.powi(lead) + 0.1 * (std::f64::consts::PI * freq * t + phase).cos())
        .collect();
    let support = weight.iter().filter(|w| **w > 0.0).count();
    if kind == AtomKind::Small {
        let count = Atom::moment_count(kind, p);
        let inner = |a: &[f64], b: &[f64]| -> f64 {
            let terms: Vec<f64> = a
                .iter()
                .zip(b)
                .zip(&weight)
                .map(|((x, y), w)| x * y * w)
                .collect();
            crate::numeric::pairwise_sum(&terms)
        };
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
        for degree in 0..count {
            let mut e: Vec<f64> = ts.iter().map(|t| t.powi(degree as i32)).collect();
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(&e, b);
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = inner(&e, &e).sqrt();
            if norm.is_nan() || norm <= 1e-8 || support <= count {
                return Err(WitnessError::Degenerate {
                    degree,
                    samples: support,
                });
            }
            e.iter_mut().for_each(|x| *x /= norm);
            basis.push(e);
        }
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&profile, b);
                profile.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
    }
    let raw: Vec<f64> = profile.iter().zip(&weight).map(|(r, w)| r * w).collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let target = cube_side.powf(-crate::exponent::to_f64(p.value()));
    let values = raw
        .iter()
        .map(|v| Complex64::new(v * target / peak, 0.0))
        .collect();
    Ok(Atom {
        values: GridFunction::new(spec, crate::grid::Domain::Time, values)?,
        cube_center: 0.0,
        cube_side,
        kind,
        p,
    })
}

/// Generators for truncated sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeqGenerator {
    /// `δ_0`.
    Spike,
    /// All ones.
    Flat,
    /// `⟨k⟩^{-θ}` (uniform) or `2^{-jθ}` (dyadic).
    Power(f64),
    /// Uniform magnitudes in `[0, 1)` from a seeded stream.
    Random(u64),
}

/// `size` entries at indices `0..size` (the spike has a single entry).
pub fn make_truncated_seq(generator: SeqGenerator, kind: SeqKind, size: usize) -> WeightedSeq {
    match generator {
        SeqGenerator::Spike => WeightedSeq::from_values(kind, 0, [1.0]),
        SeqGenerator::Flat => WeightedSeq::from_values(kind, 0, vec![1.0; size]),
        SeqGenerator::Power(theta) => WeightedSeq::from_values(
            kind,
            0,
            (0..size as i64).map(|k| (-kind.log2_weight(k, theta)).exp2()),
        ),
        SeqGenerator::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            WeightedSeq::from_values(
                kind,
                0,
                (0..size).map(|_| rng.random::<f64>()).collect::<Vec<_>>(),
            )
        }
    }
}

/// Provenance written next to an exported witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessManifest {
    pub family: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub grid_extent: f64,
    pub grid_samples: usize,
}

/// Writes `<stem>.grdf` and `<stem>.json` into `dir`; returns both paths.
pub fn export_witness(
    dir: &Path,
    stem: &str,
    f: &GridFunction,
    family: &str,
    parameters: BTreeMap<String, String>,
    seed: Option<u64>,
) -> Result<(PathBuf, PathBuf), WitnessError> {
    let data = dir.join(format!("{stem}.grdf"));
    let meta = dir.join(format!("{stem}.json"));
    write_binary(
        f,
        Precision::Double,
        std::io::BufWriter::new(std::fs::File::create(&data)?),
    )?;
    let manifest = WitnessManifest {
        family: family.to_string(),
        parameters,
        seed,
        grid_extent: f.spec().extent(),
        grid_samples: f.spec().samples(),
    };
    let mut out = std::fs::File::create(&meta)?;
    serde_json::to_writer_pretty(&mut out, &manifest).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok((data, meta))
}
