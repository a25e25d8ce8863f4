//! Measured train tracks in the punctured disk and their change of
//! coordinates to Dynnikov coordinates.

mod arcs;
mod conjugacy;
mod extension;
mod measure;
mod moves;
mod paths;
mod track;
mod transition;

pub use arcs::{
    all_arcs, arc_measure, arc_measure_with, change_of_coords, linearize_change_of_coords, ArcAnnotations, ArcId,
    ArcSpec,
};
pub use conjugacy::{solve_completion, verify_conjugacy};
pub use extension::{
    catalan, diagonal_extensions_count, enumerate_diagonal_extensions, triangulation_diagonals, triangulations,
    DiagonalExtension,
};
pub use measure::{check_switch_conditions, nullspace, switch_matrix, Measure, MeasureChart};
pub use moves::{pinch_punctured, pinch_unpunctured, MeasureMap, MovedTrack};
pub use paths::{
    check_smooth, path_measure, path_measure_with, Affine, AffineWeights, ScalarWeights, TrainPath, WeightAlgebra,
};
pub use track::{load_track, Branch, BranchKind, End, Endpoint, HalfBranch, Polygon, Side, Switch, TrainTrack};
pub use transition::{transition_pf, PerronFrobenius, TransitionMatrix};

/// Polygon edge lists that walk around genuine cusps.
pub fn check_polygon_edges(t: &TrainTrack) -> crate::Result<()> {
    for p in t.polygons() {
        if !p.edges.is_empty() {
            moves::polygon_corners(t, p)?;
        }
    }
    Ok(())
}

/// A track document with its optional annotations.
pub fn load_annotated(v: &serde_json::Value) -> crate::Result<(TrainTrack, Option<ArcAnnotations>)> {
    let t = load_track(v)?;
    let ann = match v.get("annotations") {
        Some(a) => {
            let ann = ArcAnnotations::from_json(a)?;
            ann.validate(&t)?;
            Some(ann)
        }
        None => None,
    };
    Ok((t, ann))
}
