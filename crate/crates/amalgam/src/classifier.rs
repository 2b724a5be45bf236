//! Sharp embedding decisions between Wiener amalgam, Besov, local Hardy and
//! Lebesgue spaces, the amalgam-to-amalgam embedding and the two weighted
//! sequence-space embeddings. Everything here is exact rational arithmetic.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponent::{Family, Rational, ReciprocalExponent, SmoothnessIndex, SpaceSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("local Hardy space statements need p < ∞")]
    HardyAtInfinity,
    #[error("endpoint statements exist only for p = 1 and p = ∞, got p = {0}")]
    NotEndpoint(ReciprocalExponent),
    #[error("Lebesgue statements below p = 1 are not covered")]
    LebesgueBelowOne,
    #[error("no embedding statement for {0:?} into {1:?}")]
    UnsupportedPair(Family, Family),
    #[error("dimensions differ: {0} vs {1}")]
    DimensionMismatch(u32, u32),
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn branches(p: ReciprocalExponent, q: ReciprocalExponent, n: u32) -> [Rational; 3] {
    let n = Rational::from_integer(n as i64);
    let (u, v) = (p.value(), q.value());
    [
        Rational::zero(),
        n * (Rational::one() - u - v),
        n * (half() - v),
    ]
}

/// Lower threshold: the largest of `0`, `n(1 - 1/p - 1/q)` and `n(1/2 - 1/q)`.
pub fn alpha(p: ReciprocalExponent, q: ReciprocalExponent, n: u32) -> SmoothnessIndex {
    let [a, b, c] = branches(p, q, n);
    SmoothnessIndex(a.max(b).max(c))
}

/// Upper threshold: the smallest of the same three branches.
pub fn beta(p: ReciprocalExponent, q: ReciprocalExponent, n: u32) -> SmoothnessIndex {
    let [a, b, c] = branches(p, q, n);
    SmoothnessIndex(a.min(b).min(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    BoundaryOfSeveral,
}

/// Which partition of the `(1/p, 1/q)` quadrant to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionFamily {
    /// Regions A1-A3, on which `alpha` is a single affine branch.
    Alpha,
    /// Regions B1-B3, on which `beta` is a single affine branch.
    Beta,
}

/// Region of `(1/p, 1/q)`; points lying in more than one closed region are
/// reported as `BoundaryOfSeveral`. The dimension does not affect regions.
pub fn region(p: ReciprocalExponent, q: ReciprocalExponent, family: RegionFamily) -> RegionLabel {
    let (u, v) = (p.value(), q.value());
    let one = Rational::one();
    let candidates: [(bool, RegionLabel); 3] = match family {
        RegionFamily::Alpha => [
            (v >= (one - u).max(half()), RegionLabel::A1),
            (u <= (one - v).min(half()), RegionLabel::A2),
            (v <= half() && half() <= u, RegionLabel::A3),
        ],
        RegionFamily::Beta => [
            (v <= (one - u).min(half()), RegionLabel::B1),
            (u >= (one - v).max(half()), RegionLabel::B2),
            (u <= half() && half() <= v, RegionLabel::B3),
        ],
    };
    let mut hits = candidates
        .iter()
        .filter(|(inside, _)| *inside)
        .map(|(_, l)| *l);
    match (hits.next(), hits.next()) {
        (Some(label), None) => label,
        _ => RegionLabel::BoundaryOfSeveral,
    }
}

/// Value of the affine branch belonging to a region label.
pub fn region_branch(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    n: u32,
    label: RegionLabel,
) -> Option<Rational> {
    let [zero, dual, half_branch] = branches(p, q, n);
    match label {
        RegionLabel::A1 | RegionLabel::B1 => Some(zero),
        RegionLabel::A2 | RegionLabel::B2 => Some(dual),
        RegionLabel::A3 | RegionLabel::B3 => Some(half_branch),
        RegionLabel::BoundaryOfSeveral => None,
    }
}

/// Direction of the smoothness condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bound {
    /// The embedding needs `s ≥ critical` (or `>` when strict).
    AtLeast,
    /// The embedding needs `s ≤ critical` (or `<` when strict).
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingVerdict {
    pub holds: bool,
    pub critical_s: SmoothnessIndex,
    pub strict_required: bool,
    pub bound: Bound,
}

impl EmbeddingVerdict {
    pub fn evaluate(
        s: SmoothnessIndex,
        critical_s: SmoothnessIndex,
        strict_required: bool,
        bound: Bound,
    ) -> Self {
        let (s_val, c) = (s.0, critical_s.0);
        let holds = match (bound, strict_required) {
            (Bound::AtLeast, false) => s_val >= c,
            (Bound::AtLeast, true) => s_val > c,
            (Bound::AtMost, false) => s_val <= c,
            (Bound::AtMost, true) => s_val < c,
        };
        Self {
            holds,
            critical_s,
            strict_required,
            bound,
        }
    }
}

/// `W^s_{p,q} ⊂ B_{p,q}`.
pub fn decide_w_subset_b(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> EmbeddingVerdict {
    let strict = p.value() < q.value();
    EmbeddingVerdict::evaluate(s, alpha(p, q, n), strict, Bound::AtLeast)
}

/// `B_{p,q} ⊂ W^s_{p,q}`.
pub fn decide_b_subset_w(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> EmbeddingVerdict {
    let strict = p.value() > q.value();
    EmbeddingVerdict::evaluate(s, beta(p, q, n), strict, Bound::AtMost)
}

/// `W^s_{p,q} ⊂ h_p`, for `p < ∞`.
pub fn decide_w_subset_hp(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> Result<EmbeddingVerdict, ClassifierError> {
    if p.is_infinite() {
        return Err(ClassifierError::HardyAtInfinity);
    }
    let strict = q.value() < p.value().min(half());
    Ok(EmbeddingVerdict::evaluate(
        s,
        alpha(p, q, n),
        strict,
        Bound::AtLeast,
    ))
}

/// `h_p ⊂ W^s_{p,q}`, for `p < ∞`.
pub fn decide_hp_subset_w(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> Result<EmbeddingVerdict, ClassifierError> {
    if p.is_infinite() {
        return Err(ClassifierError::HardyAtInfinity);
    }
    let strict = q.value() > p.value().max(half());
    Ok(EmbeddingVerdict::evaluate(
        s,
        beta(p, q, n),
        strict,
        Bound::AtMost,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    One,
    Infinity,
}

impl Endpoint {
    pub fn from_exponent(p: ReciprocalExponent) -> Result<Self, ClassifierError> {
        if p.is_infinite() {
            Ok(Endpoint::Infinity)
        } else if p.value() == Rational::one() {
            Ok(Endpoint::One)
        } else {
            Err(ClassifierError::NotEndpoint(p))
        }
    }

    pub fn exponent(self) -> ReciprocalExponent {
        match self {
            Endpoint::One => ReciprocalExponent::p(1),
            Endpoint::Infinity => ReciprocalExponent::INFINITY,
        }
    }
}

/// `W^s_{1,q} ⊂ L_1` or `W^s_{∞,q} ⊂ L_∞`.
pub fn decide_w_subset_lebesgue_endpoint(
    p: Endpoint,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> EmbeddingVerdict {
    let v = q.value();
    let strict = match p {
        Endpoint::One => v < half(),
        Endpoint::Infinity => v < Rational::one(),
    };
    EmbeddingVerdict::evaluate(s, alpha(p.exponent(), q, n), strict, Bound::AtLeast)
}

/// `L_1 ⊂ W^s_{1,q}` or `L_∞ ⊂ W^s_{∞,q}`.
pub fn decide_lebesgue_subset_w_endpoint(
    p: Endpoint,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> EmbeddingVerdict {
    let strict = match p {
        Endpoint::One => !q.is_infinite(),
        Endpoint::Infinity => q.value() > half(),
    };
    EmbeddingVerdict::evaluate(s, beta(p.exponent(), q, n), strict, Bound::AtMost)
}

/// `W^s_{p,q} ⊂ L_p` for any `p ≥ 1`; `1 < p < ∞` goes through `h_p`.
pub fn decide_w_subset_lebesgue(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> Result<EmbeddingVerdict, ClassifierError> {
    if p.value() > Rational::one() {
        return Err(ClassifierError::LebesgueBelowOne);
    }
    match Endpoint::from_exponent(p) {
        Ok(e) => Ok(decide_w_subset_lebesgue_endpoint(e, q, s, n)),
        Err(_) => decide_w_subset_hp(p, q, s, n),
    }
}

/// `L_p ⊂ W^s_{p,q}` for any `p ≥ 1`; `1 < p < ∞` goes through `h_p`.
pub fn decide_lebesgue_subset_w(
    p: ReciprocalExponent,
    q: ReciprocalExponent,
    s: SmoothnessIndex,
    n: u32,
) -> Result<EmbeddingVerdict, ClassifierError> {
    if p.value() > Rational::one() {
        return Err(ClassifierError::LebesgueBelowOne);
    }
    match Endpoint::from_exponent(p) {
        Ok(e) => Ok(decide_lebesgue_subset_w_endpoint(e, q, s, n)),
        Err(_) => decide_hp_subset_w(p, q, s, n),
    }
}

/// `W^{s1}_{p1,q1} ⊂ W^{s2}_{p2,q2}`.
#[allow(clippy::too_many_arguments)]
pub fn decide_w_subset_w(
    p1: ReciprocalExponent,
    q1: ReciprocalExponent,
    s1: SmoothnessIndex,
    p2: ReciprocalExponent,
    q2: ReciprocalExponent,
    s2: SmoothnessIndex,
    n: u32,
) -> bool {
    let n = Rational::from_integer(n as i64);
    let local = q2.value() + s2.0 / n < q1.value() + s1.0 / n;
    let global = p2.value() <= p1.value();
    (s2.0 <= s1.0 && global && local) || (s2 == s1 && global && q2 == q1)
}

/// `l^{s1,0}_{q1} ⊂ l^{s2,0}_{q2}` (weights `⟨k⟩^s` on `Z^n`).
pub fn decide_seq_uniform(
    q1: ReciprocalExponent,
    s1: SmoothnessIndex,
    q2: ReciprocalExponent,
    s2: SmoothnessIndex,
    n: u32,
) -> bool {
    let n = Rational::from_integer(n as i64);
    let local = q2.value() + s2.0 / n < q1.value() + s1.0 / n;
    (s2.0 <= s1.0 && local) || (s2 == s1 && q2 == q1)
}

/// `l^{s1,1}_{q1} ⊂ l^{s2,1}_{q2}` (weights `2^{js}` on `N`).
pub fn decide_seq_dyadic(
    q1: ReciprocalExponent,
    s1: SmoothnessIndex,
    q2: ReciprocalExponent,
    s2: SmoothnessIndex,
) -> bool {
    s2.0 < s1.0 || (s2 == s1 && q2.value() <= q1.value())
}

/// Outcome of a generic classification request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Threshold(EmbeddingVerdict),
    Boolean(bool),
}

impl Classification {
    pub fn holds(&self) -> bool {
        match self {
            Classification::Threshold(v) => v.holds,
            Classification::Boolean(b) => *b,
        }
    }
}

/// Dispatches `source ⊂ target` to the matching decision procedure.
///
/// Threshold statements carry their smoothness on the amalgam side; the
/// other side must have `s = 0`.
pub fn classify(source: &SpaceSpec, target: &SpaceSpec) -> Result<Classification, ClassifierError> {
    use Family::*;
    if source.n != target.n {
        return Err(ClassifierError::DimensionMismatch(source.n, target.n));
    }
    let n = source.n;
    let unsupported = || ClassifierError::UnsupportedPair(source.family, target.family);
    let same_pq = source.p == target.p && source.q == target.q;
    let (w, other) = match (source.family, target.family) {
        (WienerAmalgam, WienerAmalgam) => {
            return Ok(Classification::Boolean(decide_w_subset_w(
                source.p, source.q, source.s, target.p, target.q, target.s, n,
            )))
        }
        (SeqUniform, SeqUniform) => {
            return Ok(Classification::Boolean(decide_seq_uniform(
                source.q, source.s, target.q, target.s, n,
            )))
        }
        (SeqDyadic, SeqDyadic) => {
            return Ok(Classification::Boolean(decide_seq_dyadic(
                source.q, source.s, target.q, target.s,
            )))
        }
        (WienerAmalgam, _) => (source, target),
        (_, WienerAmalgam) => (target, source),
        _ => return Err(unsupported()),
    };
    let plain_other = other.s.0.is_zero();
    let into_w = target.family == WienerAmalgam;
    let verdict = match other.family {
        Besov if same_pq && plain_other => {
            if into_w {
                decide_b_subset_w(w.p, w.q, w.s, n)
            } else {
                decide_w_subset_b(w.p, w.q, w.s, n)
            }
        }
        LocalHardy if source.p == target.p && plain_other => {
            if into_w {
                decide_hp_subset_w(w.p, w.q, w.s, n)?
            } else {
                decide_w_subset_hp(w.p, w.q, w.s, n)?
            }
        }
        Lebesgue if source.p == target.p && plain_other => {
            if into_w {
                decide_lebesgue_subset_w(w.p, w.q, w.s, n)?
            } else {
                decide_w_subset_lebesgue(w.p, w.q, w.s, n)?
            }
        }
        _ => return Err(unsupported()),
    };
    Ok(Classification::Threshold(verdict))
}
