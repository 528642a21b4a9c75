//! Planar geometry kernel: convex hulls, polygon area and centroid, rigid
//! transforms and convex overlap areas. Angles are in degrees throughout.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on cross products for orientation tests.
pub const EPSILON: f64 = 1e-9;

/// Hull area below which a polygon is treated as degenerate for alignment.
pub const DEGENERATE_AREA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Rotates counter-clockwise by `deg` about `pivot`.
    pub fn rotated(self, pivot: Point, deg: f64) -> Point {
        let (sin, cos) = deg.to_radians().sin_cos();
        let d = self - pivot;
        Point::new(pivot.x + d.x * cos - d.y * sin, pivot.y + d.x * sin + d.y * cos)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Twice the signed area of triangle `o, a, b`; positive for a left turn.
pub fn orient(o: Point, a: Point, b: Point) -> f64 {
    (a - o).cross(b - o)
}

/// Convex polygon, vertices counter-clockwise without a closing repeat.
///
/// Fewer than three vertices marks a degenerate polygon (a point or a segment).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Polygon { vertices }
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    pub fn centroid(&self) -> Point {
        polygon_centroid(self)
    }

    /// Degenerate for alignment purposes: fewer than three vertices or
    /// negligible area.
    pub fn is_thin(&self) -> bool {
        self.is_degenerate() || self.area() < DEGENERATE_AREA
    }

    /// Convexity check on every consecutive edge pair.
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return true;
        }
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            orient(a, b, c) >= -EPSILON
        })
    }

    /// Signed distance from `p` to the boundary, positive inside.
    /// Only meaningful for non-degenerate convex polygons.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                orient(a, b, p) / a.distance(b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        bounding_box(&self.vertices)
    }

    pub fn rotated(&self, pivot: Point, deg: f64) -> Polygon {
        Polygon::new(rotate_points(&self.vertices, pivot, deg))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        Polygon::new(translate_points(&self.vertices, dx, dy))
    }
}

pub fn bounding_box(points: &[Point]) -> Option<(Point, Point)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| {
        (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y)))
    }))
}

/// Convex hull by Andrew's monotone chain.
///
/// Collinear boundary points are dropped. With fewer than three
/// non-collinear points the result is degenerate: the single point, or the
/// two extreme points of the segment.
pub fn convex_hull(points: &[Point]) -> Result<Polygon> {
    if points.is_empty() {
        return Err(Error::EmptyInput("convex hull of no points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(Polygon::new(pts));
    }

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= EPSILON {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= EPSILON {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() < 3 {
        // All points collinear: keep the two extremes.
        return Ok(Polygon::new(vec![pts[0], pts[pts.len() - 1]]));
    }
    Ok(Polygon::new(hull))
}

/// Shoelace area; 0 for degenerate polygons.
pub fn polygon_area(p: &Polygon) -> f64 {
    if p.is_degenerate() {
        return 0.0;
    }
    signed_area(&p.vertices)
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let twice: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
    twice / 2.0
}

/// Area-weighted centroid, falling back to the vertex mean when the area
/// is below 1e-12. Returns the origin for an empty polygon.
pub fn polygon_centroid(p: &Polygon) -> Point {
    let v = &p.vertices;
    if v.is_empty() {
        return Point::default();
    }
    let area = polygon_area(p);
    if area.abs() < 1e-12 {
        return vertex_mean(v);
    }
    // Offsetting by the first vertex keeps the sums well conditioned far
    // from the origin.
    let origin = v[0];
    let n = v.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let a = v[i] - origin;
        let b = v[(i + 1) % n] - origin;
        let w = a.cross(b);
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    let k = 1.0 / (6.0 * area);
    Point::new(origin.x + cx * k, origin.y + cy * k)
}

pub fn vertex_mean(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let sum = points.iter().fold(Point::default(), |acc, &p| acc + p);
    Point::new(sum.x / n, sum.y / n)
}

pub fn rotate_points(points: &[Point], pivot: Point, deg: f64) -> Vec<Point> {
    let (sin, cos) = deg.to_radians().sin_cos();
    points
        .iter()
        .map(|&p| {
            let d = p - pivot;
            Point::new(pivot.x + d.x * cos - d.y * sin, pivot.y + d.x * sin + d.y * cos)
        })
        .collect()
}

pub fn translate_points(points: &[Point], dx: f64, dy: f64) -> Vec<Point> {
    points.iter().map(|&p| Point::new(p.x + dx, p.y + dy)).collect()
}

/// Rotation about a pivot followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Transform2D {
    pub rotation_deg: f64,
    pub pivot: Point,
    pub translation: Point,
}

impl Transform2D {
    pub fn translation(dx: f64, dy: f64) -> Self {
        Transform2D {
            translation: Point::new(dx, dy),
            ..Default::default()
        }
    }

    pub fn rotation(pivot: Point, deg: f64) -> Self {
        Transform2D {
            rotation_deg: deg,
            pivot,
            translation: Point::default(),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        p.rotated(self.pivot, self.rotation_deg) + self.translation
    }

    pub fn apply_all(&self, points: &[Point]) -> Vec<Point> {
        points.iter().map(|&p| self.apply(p)).collect()
    }

    /// The transform undoing `self`: translate back, then rotate back about
    /// the same pivot.
    pub fn inverse(&self) -> InverseTransform2D {
        InverseTransform2D(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseTransform2D(Transform2D);

impl InverseTransform2D {
    pub fn apply(&self, p: Point) -> Point {
        let t = &self.0;
        (p - t.translation).rotated(t.pivot, -t.rotation_deg)
    }

    pub fn apply_all(&self, points: &[Point]) -> Vec<Point> {
        points.iter().map(|&p| self.apply(p)).collect()
    }
}

/// Area of the intersection of two convex polygons (Sutherland-Hodgman
/// clipping). Zero when either is degenerate or they are disjoint.
pub fn convex_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    if a.is_degenerate() || b.is_degenerate() {
        return 0.0;
    }
    if let (Some((alo, ahi)), Some((blo, bhi))) = (a.bounding_box(), b.bounding_box()) {
        if ahi.x < blo.x || bhi.x < alo.x || ahi.y < blo.y || bhi.y < alo.y {
            return 0.0;
        }
    }

    let mut output = a.vertices.clone();
    let mut input = Vec::with_capacity(output.len() + b.vertices.len());
    let m = b.vertices.len();
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let c0 = b.vertices[i];
        let c1 = b.vertices[(i + 1) % m];
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let k = input.len();
        for j in 0..k {
            let cur = input[j];
            let prev = input[(j + k - 1) % k];
            let cur_in = orient(c0, c1, cur) >= 0.0;
            let prev_in = orient(c0, c1, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, c0, c1));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, c0, c1));
            }
        }
    }
    if output.len() < 3 {
        return 0.0;
    }
    signed_area(&output).max(0.0)
}

/// Intersection of segment `p0-p1` with the infinite line through `c0-c1`.
fn line_intersection(p0: Point, p1: Point, c0: Point, c1: Point) -> Point {
    let d0 = orient(c0, c1, p0);
    let d1 = orient(c0, c1, p1);
    let denom = d0 - d1;
    if denom.abs() < f64::MIN_POSITIVE {
        return p0;
    }
    let t = d0 / denom;
    p0 + (p1 - p0) * t
}

/// Area of the union of two convex polygons.
pub fn union_area(a: &Polygon, b: &Polygon) -> f64 {
    polygon_area(a) + polygon_area(b) - convex_intersection_area(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
        raw.iter().map(|&p| p.into()).collect()
    }

    fn unit_square() -> Polygon {
        Polygon::new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]))
    }

    #[test]
    fn hull_excludes_interior_point() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)])).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(!hull.vertices.contains(&Point::new(0.5, 0.5)));
        assert_eq!(hull.area(), 1.0);
    }

    #[test]
    fn hull_drops_collinear_edge_points() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert_eq!(hull.vertices.len(), 4);
    }

    #[test]
    fn collinear_points_give_segment() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(hull.is_degenerate());
        assert_eq!(hull.vertices, pts(&[(0.0, 0.0), (2.0, 0.0)]));
        assert_eq!(polygon_area(&hull), 0.0);
    }

    #[test]
    fn hull_of_nothing_is_error() {
        assert!(convex_hull(&[]).is_err());
        assert_eq!(convex_hull(&pts(&[(3.0, 4.0), (3.0, 4.0)])).unwrap().vertices.len(), 1);
    }

    #[test]
    fn areas() {
        assert_eq!(polygon_area(&unit_square()), 1.0);
        let tri = Polygon::new(pts(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]));
        assert_eq!(polygon_area(&tri), 2.0);
        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let a = (60.0 * k as f64).to_radians();
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let expected = 3.0 * 3f64.sqrt() / 2.0;
        assert!((polygon_area(&Polygon::new(hex)) - expected).abs() < 1e-12);
    }

    #[test]
    fn centroids() {
        assert_eq!(polygon_centroid(&unit_square()), Point::new(0.5, 0.5));
        let seg = Polygon::new(pts(&[(0.0, 0.0), (2.0, 0.0)]));
        assert_eq!(polygon_centroid(&seg), Point::new(1.0, 0.0));
        let tri = Polygon::new(pts(&[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)]));
        let c = polygon_centroid(&tri);
        assert!((c.x - 1.0).abs() < 1e-12 && (c.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotations_and_translations() {
        let r = rotate_points(&[Point::new(1.0, 0.0)], Point::default(), 90.0)[0];
        assert!(r.distance(Point::new(0.0, 1.0)) < 1e-12);
        let p = pts(&[(1.0, 2.0), (-3.5, 7.25)]);
        assert_eq!(rotate_points(&p, Point::new(4.0, 4.0), 0.0), p);
        let back = rotate_points(&rotate_points(&p, Point::new(1.0, 1.0), 37.0), Point::new(1.0, 1.0), -37.0);
        assert!(back.iter().zip(&p).all(|(a, b)| a.distance(*b) < 1e-9));
        assert_eq!(translate_points(&pts(&[(1.0, 2.0)]), 3.0, 4.0), pts(&[(4.0, 6.0)]));
        assert_eq!(translate_points(&p, 0.0, 0.0), p);
        assert_eq!(translate_points(&translate_points(&p, 2.5, -1.0), -2.5, 1.0), p);
    }

    #[test]
    fn transform_inverse_restores() {
        let t = Transform2D {
            rotation_deg: 123.0,
            pivot: Point::new(10.0, -3.0),
            translation: Point::new(4.0, 4.0),
        };
        let p = Point::new(17.3, 2.2);
        assert!(t.inverse().apply(t.apply(p)).distance(p) < 1e-9);
    }

    #[test]
    fn intersection_and_union() {
        let a = unit_square();
        assert!((convex_intersection_area(&a, &a) - 1.0).abs() < 1e-12);
        let half = a.translated(0.5, 0.0);
        assert!((convex_intersection_area(&a, &half) - 0.5).abs() < 1e-12);
        let far = a.translated(3.0, 0.0);
        assert_eq!(convex_intersection_area(&a, &far), 0.0);

        assert!((union_area(&a, &a) - 1.0).abs() < 1e-12);
        assert!((union_area(&a, &far) - 2.0).abs() < 1e-12);
        assert!((union_area(&a, &half) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_intersection_is_zero() {
        let seg = Polygon::new(pts(&[(0.0, 0.0), (1.0, 1.0)]));
        assert_eq!(convex_intersection_area(&unit_square(), &seg), 0.0);
    }

    #[test]
    fn nested_polygons_intersect_to_inner() {
        let big = Polygon::new(pts(&[(-2.0, -2.0), (2.0, -2.0), (2.0, 2.0), (-2.0, 2.0)]));
        let small = unit_square();
        assert!((convex_intersection_area(&big, &small) - 1.0).abs() < 1e-12);
        assert!((convex_intersection_area(&small, &big) - 1.0).abs() < 1e-12);
    }
}
