//! Rigid rotation and translation of whole programs.
//!
//! Only the XY parameters of `G0`/`G1` moves change. Z, E, F, all other
//! lines and the instruction order are left as they are, so the infill
//! pattern is carried along unchanged.

use crate::error::{Error, Result};
use crate::gcode::{extract_skeleton, Command, GcodeProgram, ModalPosition};
use crate::geometry::{convex_hull, Point, Transform2D};
use crate::BED_SIZE_MM;

/// Centroid of the convex hull of every skeleton point of `program`.
pub fn program_pivot(program: &GcodeProgram) -> Result<Point> {
    let skeleton = extract_skeleton(program);
    if skeleton.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let points: Vec<Point> = skeleton.all_points().collect();
    Ok(convex_hull(&points)?.centroid())
}

/// Rotates every move of `program` by `deg` counter-clockwise about the
/// centroid of the whole object's hull.
pub fn rotate_gcode(program: &GcodeProgram, deg: f64) -> Result<GcodeProgram> {
    let pivot = program_pivot(program)?;
    Ok(transform_gcode(program, &Transform2D::rotation(pivot, deg)))
}

/// Shifts every move of `program` by `(dx, dy)`. Moves that leave the bed
/// are reported with a warning and kept.
pub fn translate_gcode(program: &GcodeProgram, dx: f64, dy: f64) -> Result<GcodeProgram> {
    if extract_skeleton(program).is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let out = transform_gcode(program, &Transform2D::translation(dx, dy));
    let outside = bed_violations(&out, BED_SIZE_MM);
    if outside > 0 {
        log::warn!("{outside} moves fall outside the {BED_SIZE_MM} mm bed after translating by ({dx}, {dy})");
    }
    Ok(out)
}

/// Applies a rigid transform to the XY position of every move.
///
/// Any move that carries X or Y is rewritten with both, since a rotated
/// coordinate depends on the pair. A `G1` that carries only Z before any XY
/// has been set gets the transformed origin so its skeleton point follows.
pub fn transform_gcode(program: &GcodeProgram, transform: &Transform2D) -> GcodeProgram {
    let mut pos = ModalPosition::default();
    let mut instructions = Vec::with_capacity(program.len());
    for inst in &program.instructions {
        let mut inst = inst.clone();
        let was_set = pos.xy_set;
        pos.apply(&inst);
        let needs_xy = inst.has_xy() || (!was_set && inst.command == Command::G1);
        if inst.is_move() && needs_xy {
            let p = transform.apply(pos.xy());
            inst.x = Some(p.x);
            inst.y = Some(p.y);
            inst.refresh_raw();
        }
        instructions.push(inst);
    }
    GcodeProgram {
        instructions,
        source_name: program.source_name.clone(),
    }
}

/// Number of moves whose XY lies outside `[0, bed]²`.
pub fn bed_violations(program: &GcodeProgram, bed: f64) -> usize {
    let mut pos = ModalPosition::default();
    program
        .instructions
        .iter()
        .filter(|inst| {
            pos.apply(inst);
            let on_bed = (0.0..=bed).contains(&pos.x) && (0.0..=bed).contains(&pos.y);
            inst.has_xy() && !on_bed
        })
        .count()
}
