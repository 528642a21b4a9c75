//! SVG overlay of two layer trajectories.

use std::fmt::Write;

use anyhow::{bail, Result};
use gcode_forensics::geometry::bounding_box;
use gcode_forensics::Point;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;
const CAPTION_HEIGHT: f64 = 24.0;

pub struct LayerPlot<'a> {
    pub gt: &'a [Point],
    pub cand: &'a [Point],
    pub caption: &'a str,
}

impl LayerPlot<'_> {
    /// Ground truth in blue, candidate in red, y axis pointing up.
    pub fn render(&self) -> Result<String> {
        let all: Vec<Point> = self.gt.iter().chain(self.cand).copied().collect();
        let Some((lo, hi)) = bounding_box(&all) else {
            bail!("nothing to plot: both layers are empty")
        };
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        let height = (hi.y - lo.y) * scale + 2.0 * MARGIN + CAPTION_HEIGHT;
        let map = |p: &Point| ((p.x - lo.x) * scale + MARGIN, height - MARGIN - (p.y - lo.y) * scale);

        let mut svg = String::new();
        writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.3}">"#
        )?;
        writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
        writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{:.0}" font-family="sans-serif" font-size="14">{}</text>"#,
            CAPTION_HEIGHT - 6.0,
            escape(self.caption)
        )?;
        for (points, colour, id) in [(self.gt, "blue", "ground-truth"), (self.cand, "red", "candidate")] {
            let coords: Vec<String> = points.iter().map(map).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            writeln!(
                svg,
                r#"<polyline id="{id}" points="{}" fill="none" stroke="{colour}" stroke-width="1.5" stroke-linejoin="round" opacity="0.8"/>"#,
                coords.join(" ")
            )?;
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colours_and_flip() {
        let gt = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(10.0, 10.0)];
        let cand = [Point::new(0.0, 10.0)];
        let svg = LayerPlot {
            gt: &gt,
            cand: &cand,
            caption: "a < b",
        }
        .render()
        .unwrap();
        assert!(
            svg.contains(r#"id="ground-truth" points="20.000,804.000 780.000,804.000 780.000,44.000""#),
            "{svg}"
        );
        assert!(svg.contains(r#"stroke="blue""#) && svg.contains(r#"stroke="red""#));
        assert!(svg.contains("a &lt; b"));
    }

    #[test]
    fn empty_is_error() {
        assert!(LayerPlot {
            gt: &[],
            cand: &[],
            caption: ""
        }
        .render()
        .is_err());
    }
}
