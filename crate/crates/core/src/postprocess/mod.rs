//! Rebuilds printable G-code from per-move trajectory estimates.
//!
//! Noisy Z estimates are snapped to discrete layer heights using change
//! points, extrusion is derived from bead-volume conservation along each
//! print segment, and feed rates come from the move class.

mod pelt;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcode::{Command, GcodeProgram, Instruction};
use crate::geometry::Point;
use crate::BED_SIZE_MM;

pub use pelt::detect_z_changepoints;

/// Default PELT penalty per change point.
pub const DEFAULT_PELT_PENALTY: f64 = 0.05;
/// Default minimum segment length for PELT.
pub const DEFAULT_PELT_MIN_SEGMENT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveClass {
    G0,
    G1,
}

impl MoveClass {
    pub fn command(self) -> Command {
        match self {
            MoveClass::G0 => Command::G0,
            MoveClass::G1 => Command::G1,
        }
    }
}

/// One predicted nozzle movement. Field names follow the `cmd,x,y,z` CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPrediction {
    #[serde(rename = "cmd")]
    pub command_class: MoveClass,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "z")]
    pub z_raw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExtrusionMode {
    #[default]
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrinterProfile {
    /// Layer height in mm; also the height of the first layer.
    pub layer_height: f64,
    /// Flow multiplier (1.0 = 100 %).
    pub flow_modifier: f64,
    pub nozzle_diameter: f64,
    pub filament_diameter: f64,
    /// Z increment between consecutive recovered layers.
    pub z_step: f64,
    /// Travel feed rate, mm/min.
    pub feed_g0: f64,
    /// Print feed rate, mm/min.
    pub feed_g1: f64,
    pub extrusion_mode: ExtrusionMode,
}

impl Default for PrinterProfile {
    fn default() -> Self {
        PrinterProfile {
            layer_height: 0.3,
            flow_modifier: 1.0,
            nozzle_diameter: 0.4,
            filament_diameter: 1.75,
            z_step: 0.3,
            feed_g0: 7740.0,
            feed_g1: 3600.0,
            extrusion_mode: ExtrusionMode::Absolute,
        }
    }
}

impl PrinterProfile {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("layer_height", self.layer_height),
            ("flow_modifier", self.flow_modifier),
            ("nozzle_diameter", self.nozzle_diameter),
            ("filament_diameter", self.filament_diameter),
            ("z_step", self.z_step),
            ("feed_g0", self.feed_g0),
            ("feed_g1", self.feed_g1),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Snaps each sample to its layer height: the first segment sits at the
/// profile's layer height and each change point adds one `z_step`.
pub fn normalize_z(z_series: &[f64], changepoints: &[usize], profile: &PrinterProfile) -> Vec<f64> {
    let mut out = Vec::with_capacity(z_series.len());
    let mut layer = 0usize;
    let mut next = changepoints.iter().peekable();
    for i in 0..z_series.len() {
        while next.next_if(|&&cp| cp <= i).is_some() {
            layer += 1;
        }
        out.push(profile.layer_height + layer as f64 * profile.z_step);
    }
    out
}

/// Filament length (mm) needed to lay a bead of length `length` mm:
/// bead volume `h·s·l·d_n` over the filament cross-section `π·d_f²/4`.
pub fn compute_extrusion(profile: &PrinterProfile, length: f64) -> Result<f64> {
    if !length.is_finite() || length < 0.0 {
        return Err(Error::InvalidArgument(format!("segment length must be ≥ 0, got {length}")));
    }
    let p = profile;
    Ok(4.0 * p.layer_height * p.flow_modifier * length * p.nozzle_diameter / (PI * p.filament_diameter * p.filament_diameter))
}

pub fn assign_feed_rate(class: MoveClass, profile: &PrinterProfile) -> f64 {
    match class {
        MoveClass::G0 => profile.feed_g0,
        MoveClass::G1 => profile.feed_g1,
    }
}

/// Builds a program with one move per prediction.
///
/// XY are clamped to the bed and Z is replaced by its normalized layer
/// height. Print moves after the first get E from the XY distance to the
/// previous position (cumulative in absolute mode). F is written on the
/// first move of every run of the same class.
pub fn build_gcode(
    predictions: &[TrajectoryPrediction],
    profile: &PrinterProfile,
    pelt_penalty: f64,
    pelt_min_segment: usize,
) -> Result<GcodeProgram> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("no trajectory predictions"));
    }
    profile.validate()?;
    let z_raw: Vec<f64> = predictions.iter().map(|p| p.z_raw).collect();
    let changepoints = detect_z_changepoints(&z_raw, pelt_penalty, pelt_min_segment)?;
    let z = normalize_z(&z_raw, &changepoints, profile);

    let mut instructions = Vec::with_capacity(predictions.len());
    let mut previous: Option<Point> = None;
    let mut last_class = None;
    let mut total_e = 0.0;
    for (pred, &z) in predictions.iter().zip(&z) {
        if !(pred.x.is_finite() && pred.y.is_finite()) {
            return Err(Error::InvalidArgument("prediction with non-finite coordinates".into()));
        }
        let here = Point::new(pred.x.clamp(0.0, BED_SIZE_MM), pred.y.clamp(0.0, BED_SIZE_MM));
        let f = (last_class != Some(pred.command_class)).then(|| assign_feed_rate(pred.command_class, profile));
        let e = match (pred.command_class, previous) {
            (MoveClass::G1, Some(from)) => {
                let segment = compute_extrusion(profile, from.distance(here))?;
                Some(match profile.extrusion_mode {
                    ExtrusionMode::Relative => segment,
                    ExtrusionMode::Absolute => {
                        total_e += segment;
                        total_e
                    }
                })
            }
            _ => None,
        };
        instructions.push(Instruction::movement(
            pred.command_class.command(),
            Some(here.x),
            Some(here.y),
            Some(z),
            e,
            f,
        ));
        previous = Some(here);
        last_class = Some(pred.command_class);
    }
    Ok(GcodeProgram::new(instructions))
}
