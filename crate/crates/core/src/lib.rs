//! G-code forensics: parse toolpaths, reduce them to per-layer trajectories,
//! compare two programs independently of where they sit on the build plate,
//! and rebuild printable G-code from noisy per-move trajectory estimates.
//!
//! The crate is organised bottom-up:
//!
//! - [`gcode`]: instruction model, parser/emitter and skeleton extraction.
//! - [`geometry`]: convex hulls, areas, centroids, rigid transforms, convex overlap.
//! - [`manipulator`]: rigid rotation/translation of whole programs.
//! - [`equivalence`]: the layer-wise equivalence checker and the nMSE baseline.
//! - [`postprocess`]: change-point based Z recovery and extrusion/feed synthesis.
//! - [`dataset`]: synthetic objects and rotated/translated evaluation sets.

pub mod dataset;
pub mod equivalence;
mod error;
pub mod gcode;
pub mod geometry;
pub mod manipulator;
pub mod postprocess;

pub use dataset::{gen_shape, gen_variants, inject_noise, Infill, ShapeKind, ShapeSpec, Variant, VariantKind, VariantSpec};
pub use equivalence::{
    align_layer, align_layer_with, best_rotation, compare, compare_programs, compare_with, layer_dissimilarity, nmse_similarity,
    subsequence_dtw, AlignmentResult, CompareOptions, ComparisonReport, LayerScore,
};
pub use error::{Error, Result};
pub use gcode::{emit_program, extract_skeleton, parse_program, Command, GcodeProgram, Instruction, Layer, Skeleton};
pub use geometry::{convex_hull, polygon_area, polygon_centroid, Point, Polygon, Transform2D};
pub use manipulator::{rotate_gcode, transform_gcode, translate_gcode};
pub use postprocess::{
    assign_feed_rate, build_gcode, compute_extrusion, detect_z_changepoints, normalize_z, ExtrusionMode, MoveClass, PrinterProfile,
    TrajectoryPrediction,
};

/// Build plate edge length in mm (square bed).
pub const BED_SIZE_MM: f64 = 250.0;
