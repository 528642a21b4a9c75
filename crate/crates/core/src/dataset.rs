//! Synthetic test objects and the rotated/translated evaluation sets built
//! from them, plus simulated noisy trajectory predictions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcode::{extract_skeleton, format_number, Command, GcodeProgram, Instruction, ModalPosition};
use crate::geometry::Point;
use crate::manipulator::{rotate_gcode, translate_gcode};
use crate::postprocess::{compute_extrusion, MoveClass, PrinterProfile, TrajectoryPrediction};
use crate::BED_SIZE_MM;

/// Spacing between concentric infill rings (nozzle width).
pub const RING_PITCH: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    /// Regular polygon whose width across flats is the footprint.
    PolygonPrism { sides: usize },
    /// Star with `points` tips inscribed in the footprint.
    StarPrism { points: usize },
    /// L-shaped footprint without rotational or mirror symmetry.
    #[serde(rename = "asymmetric_L")]
    AsymmetricL,
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polygon_prism" | "square_prism" => Ok(ShapeKind::PolygonPrism { sides: 4 }),
            "star_prism" => Ok(ShapeKind::StarPrism { points: 5 }),
            "asymmetric_L" | "asymmetric_l" => Ok(ShapeKind::AsymmetricL),
            other => Err(Error::InvalidArgument(format!("unknown shape {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Infill {
    #[default]
    Concentric,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub num_layers: usize,
    /// Footprint width in mm.
    pub footprint_size: f64,
    pub infill: Infill,
    /// Minimum number of points on the outer loop; edges are subdivided
    /// evenly to reach it. Values up to the vertex count leave edges whole.
    pub points_per_layer: usize,
}

impl Default for ShapeSpec {
    fn default() -> Self {
        ShapeSpec {
            kind: ShapeKind::PolygonPrism { sides: 4 },
            num_layers: 10,
            footprint_size: 10.0,
            infill: Infill::Concentric,
            points_per_layer: 0,
        }
    }
}

/// Rounds to the precision G-code is emitted with, so generated programs
/// survive a write/read cycle unchanged.
fn snap(v: f64) -> f64 {
    let s = (v * 1e4).round() / 1e4;
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

/// Outline vertices (counter-clockwise), the centre the infill rings shrink
/// towards, and the distance from that centre to the outline.
struct Footprint {
    outline: Vec<Point>,
    center: Point,
    half_width: f64,
}

fn footprint(kind: ShapeKind, size: f64) -> Result<Footprint> {
    let bed_center = Point::new(BED_SIZE_MM / 2.0, BED_SIZE_MM / 2.0);
    let fp = match kind {
        ShapeKind::PolygonPrism { sides } => {
            if sides < 3 {
                return Err(Error::InvalidArgument(format!("polygon needs ≥ 3 sides, got {sides}")));
            }
            let n = sides as f64;
            let apothem = size / 2.0;
            let radius = apothem / (PI / n).cos();
            let outline = (0..sides)
                .map(|i| {
                    let a = -PI / 2.0 + PI / n + 2.0 * PI * i as f64 / n;
                    bed_center + Point::new(a.cos(), a.sin()) * radius
                })
                .collect();
            Footprint {
                outline,
                center: bed_center,
                half_width: apothem,
            }
        }
        ShapeKind::StarPrism { points } => {
            if points < 3 {
                return Err(Error::InvalidArgument(format!("star needs ≥ 3 points, got {points}")));
            }
            let outer = size / 2.0;
            let inner = 0.45 * outer;
            let outline: Vec<Point> = (0..2 * points)
                .map(|i| {
                    let a = PI / 2.0 + PI * i as f64 / points as f64;
                    let r = if i % 2 == 0 { outer } else { inner };
                    bed_center + Point::new(a.cos(), a.sin()) * r
                })
                .collect();
            let half_width = distance_to_outline(bed_center, &outline);
            Footprint {
                outline,
                center: bed_center,
                half_width,
            }
        }
        ShapeKind::AsymmetricL => {
            let local = [(0.0, 0.0), (1.0, 0.0), (1.0, 0.35), (0.45, 0.35), (0.45, 1.0), (0.0, 1.0)];
            let origin = bed_center - Point::new(size / 2.0, size / 2.0);
            let outline: Vec<Point> = local.iter().map(|&(x, y)| origin + Point::new(x, y) * size).collect();
            let center = origin + Point::new(0.225, 0.175) * size;
            let half_width = distance_to_outline(center, &outline);
            Footprint {
                outline,
                center,
                half_width,
            }
        }
    };
    Ok(fp)
}

fn distance_to_outline(p: Point, outline: &[Point]) -> f64 {
    let n = outline.len();
    (0..n)
        .map(|i| {
            let (a, b) = (outline[i], outline[(i + 1) % n]);
            let ab = b - a;
            let t = (((p - a).x * ab.x + (p - a).y * ab.y) / (ab.x * ab.x + ab.y * ab.y)).clamp(0.0, 1.0);
            p.distance(a + ab * t)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Number of concentric infill rings inside a loop of the given half-width.
pub fn ring_count(half_width: f64, pitch: f64) -> usize {
    (half_width / pitch + 1e-9).floor() as usize
}

/// Loops of one layer: the outline followed by the infill rings, each as
/// an open vertex list (closing vertex not repeated).
fn layer_loops(fp: &Footprint, spec: &ShapeSpec) -> Vec<Vec<Point>> {
    let n = fp.outline.len();
    let per_edge = if spec.points_per_layer > n + 1 {
        (spec.points_per_layer - 1).div_ceil(n)
    } else {
        1
    };
    let subdivide = |ring: &[Point]| -> Vec<Point> {
        let mut out = Vec::with_capacity(ring.len() * per_edge);
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            for k in 0..per_edge {
                out.push(a + (b - a) * (k as f64 / per_edge as f64));
            }
        }
        out
    };

    let mut loops = vec![subdivide(&fp.outline)];
    if spec.infill == Infill::Concentric {
        for k in 1..=ring_count(fp.half_width, RING_PITCH) {
            let scale = (fp.half_width - k as f64 * RING_PITCH) / fp.half_width;
            if scale <= 1e-9 {
                loops.push(vec![fp.center]);
                continue;
            }
            let ring: Vec<Point> = fp.outline.iter().map(|&v| fp.center + (v - fp.center) * scale).collect();
            loops.push(subdivide(&ring));
        }
    }
    loops
}

/// Generates a prism program: every layer traces the outline and then the
/// infill rings inwards. Each loop starts with a non-extruding print move to
/// its seam vertex, chosen per loop from `seed`. Layers sit at `0.3·k` mm,
/// entered with a travel-only Z move.
pub fn gen_shape(spec: &ShapeSpec, seed: u64) -> Result<GcodeProgram> {
    if spec.num_layers == 0 {
        return Err(Error::InvalidArgument("num_layers must be ≥ 1".into()));
    }
    if !(spec.footprint_size.is_finite() && spec.footprint_size > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "footprint must be positive, got {}",
            spec.footprint_size
        )));
    }
    if spec.footprint_size > BED_SIZE_MM {
        return Err(Error::FootprintOutOfBed {
            size: spec.footprint_size,
            bed: BED_SIZE_MM,
        });
    }
    let profile = PrinterProfile::default();
    let fp = footprint(spec.kind, spec.footprint_size)?;
    let loops = layer_loops(&fp, spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut out = Vec::new();
    let mut last_class = None;
    let mut push = |out: &mut Vec<Instruction>, cmd: Command, x: Option<f64>, y: Option<f64>, z: Option<f64>, e: Option<f64>| {
        let feed = match cmd {
            Command::G0 => profile.feed_g0,
            _ => profile.feed_g1,
        };
        let f = (last_class.as_ref() != Some(&cmd)).then_some(feed);
        last_class = Some(cmd.clone());
        out.push(Instruction::movement(cmd, x, y, z, e, f));
    };

    let mut extruded = 0.0;
    for layer in 1..=spec.num_layers {
        let z = snap(profile.layer_height * layer as f64);
        push(&mut out, Command::G0, None, None, Some(z), None);
        for ring in &loops {
            let start = rng.random_range(0..ring.len());
            let order: Vec<Point> = (0..=ring.len()).map(|i| ring[(start + i) % ring.len()]).collect();
            let mut prev = Point::new(snap(order[0].x), snap(order[0].y));
            push(&mut out, Command::G1, Some(prev.x), Some(prev.y), None, None);
            if ring.len() == 1 {
                continue;
            }
            for p in &order[1..] {
                let p = Point::new(snap(p.x), snap(p.y));
                extruded += compute_extrusion(&profile, prev.distance(p))?;
                push(&mut out, Command::G1, Some(p.x), Some(p.y), None, Some(snap(extruded)));
                prev = p;
            }
        }
    }
    Ok(GcodeProgram::new(out).with_name(format!("{:?}", spec.kind)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantKind {
    R,
    T,
    RT,
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "R" => Ok(VariantKind::R),
            "T" => Ok(VariantKind::T),
            "RT" => Ok(VariantKind::RT),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantKind::R => "R",
            VariantKind::T => "T",
            VariantKind::RT => "RT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub variant: VariantKind,
    pub rotation_step_deg: f64,
    pub rotation_max_deg: f64,
    pub grid_spacing: f64,
    pub grid_bound: f64,
    pub rt_translation_points: usize,
}

impl VariantSpec {
    pub fn new(variant: VariantKind) -> Self {
        VariantSpec {
            variant,
            rotation_step_deg: 5.0,
            rotation_max_deg: 180.0,
            grid_spacing: 4.0,
            grid_bound: 10.0,
            rt_translation_points: 8,
        }
    }

    /// `step, 2·step, …` up to the maximum angle.
    pub fn rotations(&self) -> Vec<f64> {
        if self.rotation_step_deg <= 0.0 {
            return Vec::new();
        }
        let count = (self.rotation_max_deg / self.rotation_step_deg + 1e-9).floor() as usize;
        (1..=count).map(|k| self.rotation_step_deg * k as f64).collect()
    }

    /// Lattice coordinates from `-grid_bound` to `grid_bound` in steps of `grid_spacing`.
    pub fn grid_axis(&self) -> Vec<f64> {
        if self.grid_spacing <= 0.0 {
            return vec![0.0];
        }
        let count = (2.0 * self.grid_bound / self.grid_spacing + 1e-9).floor() as usize + 1;
        (0..count).map(|i| snap(-self.grid_bound + self.grid_spacing * i as f64)).collect()
    }

    pub fn lattice(&self) -> Vec<(f64, f64)> {
        let axis = self.grid_axis();
        axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect()
    }

    /// Translation points for combined variants: half on the diagonals at the
    /// grid bound, half at half the grid spacing.
    pub fn rt_points(&self) -> Vec<(f64, f64)> {
        let far = self.rt_translation_points.div_ceil(2);
        let near = self.rt_translation_points - far;
        let ring = |count: usize, extent: f64| -> Vec<(f64, f64)> {
            let r = extent * 2f64.sqrt();
            (0..count)
                .map(|j| {
                    let a = PI / 4.0 + 2.0 * PI * j as f64 / count as f64;
                    (snap(r * a.cos()), snap(r * a.sin()))
                })
                .collect()
        };
        let mut pts = ring(far, self.grid_bound);
        pts.extend(ring(near, self.grid_spacing / 2.0));
        pts
    }
}

/// One generated variant of a source program.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub rotation_deg: f64,
    pub dx: f64,
    pub dy: f64,
    pub program: GcodeProgram,
}

pub fn variant_label(kind: VariantKind, rotation_deg: f64, dx: f64, dy: f64) -> String {
    format!(
        "{kind}_rot{}_dx{}_dy{}",
        format_number(rotation_deg),
        format_number(dx),
        format_number(dy)
    )
}

/// Rotated (R), translated (T) or rotated-then-translated (RT) copies of
/// `program`. Rotation is about the object's hull centroid.
pub fn gen_variants(program: &GcodeProgram, vspec: &VariantSpec) -> Result<Vec<Variant>> {
    let params: Vec<(f64, f64, f64)> = match vspec.variant {
        VariantKind::R => vspec.rotations().into_iter().map(|r| (r, 0.0, 0.0)).collect(),
        VariantKind::T => vspec.lattice().into_iter().map(|(dx, dy)| (0.0, dx, dy)).collect(),
        VariantKind::RT => vspec
            .rt_points()
            .into_iter()
            .flat_map(|(dx, dy)| vspec.rotations().into_iter().map(move |r| (r, dx, dy)))
            .collect(),
    };
    params
        .into_iter()
        .map(|(rot, dx, dy)| {
            let mut p = if rot != 0.0 { rotate_gcode(program, rot)? } else { program.clone() };
            if dx != 0.0 || dy != 0.0 {
                p = translate_gcode(&p, dx, dy)?;
            }
            let label = variant_label(vspec.variant, rot, dx, dy);
            p.source_name = label.clone();
            Ok(Variant {
                label,
                rotation_deg: rot,
                dx,
                dy,
                program: p,
            })
        })
        .collect()
}

/// One prediction per `G0`/`G1` move at its modal position, with independent
/// Gaussian noise on x, y and z.
pub fn inject_noise(program: &GcodeProgram, xy_sigma: f64, z_sigma: f64, seed: u64) -> Result<Vec<TrajectoryPrediction>> {
    if extract_skeleton(program).is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let bad = |what: &str, v: f64| Error::InvalidArgument(format!("{what} must be finite and ≥ 0, got {v}"));
    for (what, v) in [("xy_sigma", xy_sigma), ("z_sigma", z_sigma)] {
        if !v.is_finite() || v < 0.0 {
            return Err(bad(what, v));
        }
    }
    let xy = Normal::new(0.0, xy_sigma).map_err(|_| bad("xy_sigma", xy_sigma))?;
    let zn = Normal::new(0.0, z_sigma).map_err(|_| bad("z_sigma", z_sigma))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = ModalPosition::default();
    let mut out = Vec::new();
    for inst in &program.instructions {
        let class = match inst.command {
            Command::G0 => MoveClass::G0,
            Command::G1 => MoveClass::G1,
            Command::Other(_) => continue,
        };
        pos.apply(inst);
        out.push(TrajectoryPrediction {
            command_class: class,
            x: (pos.x + xy.sample(&mut rng)).clamp(0.0, BED_SIZE_MM),
            y: (pos.y + xy.sample(&mut rng)).clamp(0.0, BED_SIZE_MM),
            z_raw: pos.z + zn.sample(&mut rng),
        });
    }
    Ok(out)
}
