//! Function-space norms, sharp embedding decisions and extremal witness
//! families for Wiener amalgam, modulation, Besov, Triebel-Lizorkin, local
//! Hardy and Lebesgue spaces, evaluated on uniform grids.

#![forbid(unsafe_code)]

pub mod classifier;
pub mod experiments;
pub mod exponent;
pub mod filters;
pub mod grid;
pub mod norms;
pub mod numeric;
pub mod report;
pub mod sequence;
pub mod spectrum;
pub mod stft;
pub mod witnesses;

pub use classifier::{
    alpha, beta, classify, region, Bound, Classification, ClassifierError, EmbeddingVerdict,
    Endpoint, RegionFamily, RegionLabel,
};
pub use exponent::{
    ExponentError, Family, Rational, ReciprocalExponent, SmoothnessIndex, SpaceSpec,
};
