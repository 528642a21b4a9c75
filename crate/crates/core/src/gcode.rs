//! G-code instruction model, parser, emitter and skeleton extraction.
//!
//! Only linear moves (`G0`, `G1`) are interpreted. Every other line,
//! including arcs, M-codes, comments and blank lines, is kept verbatim as
//! [`Command::Other`] so that a parse/emit cycle preserves the program.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Most decimal places ever printed for a numeric parameter.
pub const MAX_EMIT_DECIMALS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    /// Travel move, no extrusion.
    G0,
    /// Print move.
    G1,
    /// Any other line, stored verbatim.
    Other(String),
}

impl Command {
    pub fn is_move(&self) -> bool {
        matches!(self, Command::G0 | Command::G1)
    }
}

/// One line of a G-code program.
///
/// Equality ignores [`Instruction::raw`]: two instructions are equal when
/// they describe the same command with the same parameters.
#[derive(Debug, Clone)]
pub struct Instruction {
    pub command: Command,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
    pub e: Option<f64>,
    pub f: Option<f64>,
    /// Source line text, without the line terminator.
    pub raw: String,
}

impl PartialEq for Instruction {
    fn eq(&self, other: &Self) -> bool {
        self.command == other.command
            && self.x == other.x
            && self.y == other.y
            && self.z == other.z
            && self.e == other.e
            && self.f == other.f
    }
}

impl Instruction {
    /// A linear move. `raw` is filled with the emitted form.
    pub fn movement(command: Command, x: Option<f64>, y: Option<f64>, z: Option<f64>, e: Option<f64>, f: Option<f64>) -> Self {
        debug_assert!(command.is_move());
        let mut inst = Instruction {
            command,
            x,
            y,
            z,
            e,
            f,
            raw: String::new(),
        };
        inst.raw = inst.to_string();
        inst
    }

    pub fn other(text: impl Into<String>) -> Self {
        let text = text.into();
        Instruction {
            command: Command::Other(text.clone()),
            x: None,
            y: None,
            z: None,
            e: None,
            f: None,
            raw: text,
        }
    }

    pub fn is_move(&self) -> bool {
        self.command.is_move()
    }

    pub fn has_xy(&self) -> bool {
        self.x.is_some() || self.y.is_some()
    }

    /// Re-render `raw` after the numeric fields were edited.
    pub(crate) fn refresh_raw(&mut self) {
        if self.is_move() {
            self.raw = self.to_string();
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match &self.command {
            Command::G0 => "G0",
            Command::G1 => "G1",
            Command::Other(text) => return f.write_str(text),
        };
        f.write_str(word)?;
        let params = [('X', self.x), ('Y', self.y), ('Z', self.z), ('E', self.e), ('F', self.f)];
        for (letter, value) in params {
            if let Some(v) = value {
                write!(f, " {letter}{}", format_number(v))?;
            }
        }
        Ok(())
    }
}

/// Formats `v` with the fewest decimals (at most [`MAX_EMIT_DECIMALS`]) that
/// read back as exactly `v`, or with the maximum when none does. Trailing
/// zeros are trimmed.
pub fn format_number(v: f64) -> String {
    let mut s = (0..MAX_EMIT_DECIMALS)
        .map(|prec| format!("{v:.prec$}"))
        .find(|s| s.parse::<f64>() == Ok(v))
        .unwrap_or_else(|| format!("{v:.prec$}", prec = MAX_EMIT_DECIMALS));
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GcodeProgram {
    pub instructions: Vec<Instruction>,
    pub source_name: String,
}

impl GcodeProgram {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        GcodeProgram {
            instructions,
            source_name: String::new(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of `G0`/`G1` instructions.
    pub fn movement_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.is_move()).count()
    }
}

/// Parses G-code text. Accepts LF or CRLF line endings.
pub fn parse_program(text: &str) -> Result<GcodeProgram> {
    let instructions = text
        .lines()
        .enumerate()
        .map(|(idx, line)| parse_line(line, idx + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(GcodeProgram::new(instructions))
}

fn parse_line(line: &str, line_no: usize) -> Result<Instruction> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let code = line.split(';').next().unwrap_or_default();
    let mut words = Words::new(code);

    let mut first = words.next();
    // Skip an optional line number.
    if let Some(('N', _)) = first {
        first = words.next();
    }
    let command = match first {
        Some(('G', "0" | "00")) => Command::G0,
        Some(('G', "1" | "01")) => Command::G1,
        _ => return Ok(Instruction::other(line)),
    };

    let mut inst = Instruction {
        command,
        x: None,
        y: None,
        z: None,
        e: None,
        f: None,
        raw: line.to_owned(),
    };
    for (letter, number) in words {
        let slot = match letter {
            'X' => &mut inst.x,
            'Y' => &mut inst.y,
            'Z' => &mut inst.z,
            'E' => &mut inst.e,
            'F' => &mut inst.f,
            // Checksum marker: the rest of the line is not parameters.
            '*' => break,
            _ => continue,
        };
        let value = number.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("malformed {letter} parameter {number:?}"),
        })?;
        *slot = Some(value);
    }

    // Moves that change no axis (feed-rate changes, retractions) are not
    // positional and are kept verbatim.
    if inst.x.is_none() && inst.y.is_none() && inst.z.is_none() {
        return Ok(Instruction::other(line));
    }
    Ok(inst)
}

/// Splits a code fragment into `(letter, number-text)` words. Handles both
/// `G1 X1 Y2` and compact `G1X1Y2` forms; letters are upper-cased.
struct Words<'a> {
    rest: &'a str,
}

impl<'a> Words<'a> {
    fn new(code: &'a str) -> Self {
        Words { rest: code }
    }
}

impl<'a> Iterator for Words<'a> {
    type Item = (char, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        let trimmed = self.rest.trim_start();
        let mut chars = trimmed.char_indices();
        let (_, letter) = chars.next()?;
        let body = &trimmed[letter.len_utf8()..];
        let body_trim = body.trim_start();
        let end = body_trim
            .find(|c: char| c.is_ascii_alphabetic() || c.is_whitespace() || c == '*')
            .unwrap_or(body_trim.len());
        let end = if letter == '*' { body_trim.len() } else { end };
        self.rest = &body_trim[end..];
        Some((letter.to_ascii_uppercase(), &body_trim[..end]))
    }
}

/// Renders a program, one LF-terminated line per instruction.
pub fn emit_program(program: &GcodeProgram) -> String {
    let mut out = String::new();
    for inst in &program.instructions {
        out.push_str(&inst.to_string());
        out.push('\n');
    }
    out
}

/// A single print layer: the ordered XY trajectory at a fixed Z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub z: f64,
    pub points: Vec<Point>,
}

/// Per-layer print trajectory of a program, bottom to top.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub layers: Vec<Layer>,
}

impl Skeleton {
    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn point_count(&self) -> usize {
        self.layers.iter().map(|l| l.points.len()).sum()
    }

    pub fn all_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.layers.iter().flat_map(|l| l.points.iter().copied())
    }

    /// True when layer heights strictly increase.
    pub fn is_monotonic(&self) -> bool {
        self.layers.windows(2).all(|w| w[0].z < w[1].z)
    }

    /// Maximum pointwise distance to `other` when both have the same shape,
    /// `None` when layer or point counts differ.
    pub fn max_deviation(&self, other: &Skeleton) -> Option<f64> {
        if self.layers.len() != other.layers.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.layers.iter().zip(&other.layers) {
            if a.points.len() != b.points.len() {
                return None;
            }
            worst = worst.max((a.z - b.z).abs());
            for (p, q) in a.points.iter().zip(&b.points) {
                worst = worst.max(p.distance(*q));
            }
        }
        Some(worst)
    }
}

/// Modal machine position while walking a program. Unset axes start at 0.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ModalPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub xy_set: bool,
}

impl ModalPosition {
    pub fn apply(&mut self, inst: &Instruction) {
        if !inst.is_move() {
            return;
        }
        if let Some(x) = inst.x {
            self.x = x;
            self.xy_set = true;
        }
        if let Some(y) = inst.y {
            self.y = y;
            self.xy_set = true;
        }
        if let Some(z) = inst.z {
            self.z = z;
        }
    }

    pub fn xy(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Reduces a program to its per-layer print trajectory.
///
/// Every `G1` contributes the modal XY position it ends at; `G0` moves only
/// update the tracked position. A new layer begins whenever the Z of a `G1`
/// point differs from the current layer's Z. An empty result means the
/// program contains no print moves.
pub fn extract_skeleton(program: &GcodeProgram) -> Skeleton {
    let mut pos = ModalPosition::default();
    let mut layers: Vec<Layer> = Vec::new();
    for inst in &program.instructions {
        pos.apply(inst);
        if inst.command != Command::G1 {
            continue;
        }
        match layers.last_mut() {
            Some(layer) if layer.z == pos.z => layer.points.push(pos.xy()),
            _ => layers.push(Layer {
                z: pos.z,
                points: vec![pos.xy()],
            }),
        }
    }
    if layers.is_empty() && program.movement_count() > 0 {
        log::warn!("program {:?} has no G1 print moves", program.source_name);
    }
    Skeleton { layers }
}
