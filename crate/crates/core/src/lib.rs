//! Braid actions on Dynnikov coordinates of the punctured disk, Dynnikov
//! matrices of pseudo-Anosov braids, exact spectra, and measured train tracks.
//!
//! Braid words act left to right: in `σ₃⁻¹σ₂σ₁⁻¹` the letter `σ₃⁻¹` acts first.

#![allow(clippy::needless_range_loop)]

pub mod braid;
pub mod coords;
pub mod error;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod spectral;
pub mod traintrack;
pub mod update;

pub use braid::{BraidWord, Letter};
pub use coords::{from_triangle, projective_distance, DynnikovVector, TriangleCoords};
pub use error::{Error, Result};
pub use linalg::{IntMatrix, Mat, RatMatrix};
pub use matrix::{
    dynnikov_matrices, enumerate_regions_n3, find_unstable_direction, stable_direction,
    DynnikovMatrix, RegionArc, SearchOptions, UnstableDirection,
};
pub use scalar::{BigFloat, FieldScalar, Scalar, ScalarKind};
pub use spectral::{
    char_poly, compare_power, dilatation, double_cover_lift, isospectral_up_to,
    strip_trivial_factors, Dilatation, IntPoly, SpectrumMode, SpectrumReport, StrippedFactor,
};
pub use update::{apply_braid, apply_generator, traced_apply, BranchSignature, TieRule, TracedAction};
