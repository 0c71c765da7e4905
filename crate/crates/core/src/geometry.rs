//! Exact planar predicates over rational coordinates.
//!
//! Everything here works on squared quantities so that no square root is
//! ever formed; distance comparisons are dimension-generic, all other
//! predicates require 2-dimensional points.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Shorthand for the rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative distance threshold")]
    NegativeThreshold,
    #[error("convex hull of an empty point set")]
    EmptyInput,
    #[error("half-plane boundary needs two distinct points")]
    DegenerateHalfPlane,
}

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn xy(x: Rational, y: Rational) -> Self {
        Self { coords: vec![x, y] }
    }

    /// Planar point from integer numerators over a common denominator.
    pub fn from_ints(x: i64, y: i64, den: i64) -> Self {
        Self::xy(rat(x, den), rat(y, den))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn x(&self) -> &Rational {
        &self.coords[0]
    }

    pub fn y(&self) -> &Rational {
        &self.coords[1]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_dim(p: &Point, expected: usize) -> Result<(), GeometryError> {
    if p.dim() != expected {
        return Err(GeometryError::DimensionMismatch { expected, found: p.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Counter-clockwise turn.
    Left,
    /// Clockwise turn.
    Right,
    Collinear,
}

impl Orientation {
    pub fn reverse(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

fn cross(a: &Point, b: &Point, c: &Point) -> Rational {
    let abx = b.x() - a.x();
    let aby = b.y() - a.y();
    let acx = c.x() - a.x();
    let acy = c.y() - a.y();
    abx * acy - aby * acx
}

fn orient_unchecked(a: &Point, b: &Point, c: &Point) -> Orientation {
    let s = cross(a, b, c);
    if s.is_positive() {
        Orientation::Left
    } else if s.is_negative() {
        Orientation::Right
    } else {
        Orientation::Collinear
    }
}

/// Sign of the cross product of `b - a` and `c - a`.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Result<Orientation, GeometryError> {
    check_dim(a, 2)?;
    check_dim(b, 2)?;
    check_dim(c, 2)?;
    Ok(orient_unchecked(a, b, c))
}

pub fn squared_distance(a: &Point, b: &Point) -> Result<Rational, GeometryError> {
    check_dim(b, a.dim())?;
    Ok(sq_dist_unchecked(a, b))
}

pub(crate) fn sq_dist_unchecked(a: &Point, b: &Point) -> Rational {
    a.coords.iter().zip(&b.coords).fold(Rational::zero(), |acc, (x, y)| {
        let d = x - y;
        acc + &d * &d
    })
}

/// Compares `|a - b|` against `t` through `|a - b|^2` and `t^2`.
pub fn cmp_dist(a: &Point, b: &Point, t: &Rational) -> Result<Ordering, GeometryError> {
    if t.is_negative() {
        return Err(GeometryError::NegativeThreshold);
    }
    let d2 = squared_distance(a, b)?;
    Ok(d2.cmp(&(t * t)))
}

/// Compares a squared distance against a squared threshold.
pub fn cmp_sq_dist(a: &Point, b: &Point, t_squared: &Rational) -> Result<Ordering, GeometryError> {
    Ok(squared_distance(a, b)?.cmp(t_squared))
}

/// Closed convex polygon in counter-clockwise order. One vertex is a point,
/// two vertices a segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        // a segment contributes one edge, a point none
        let count = match n {
            1 => 0,
            2 => 1,
            _ => n,
        };
        (0..count).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Closed membership test.
    pub fn contains(&self, p: &Point) -> bool {
        match self.vertices.len() {
            1 => &self.vertices[0] == p,
            2 => on_segment(&self.vertices[0], &self.vertices[1], p),
            _ => self.edges().all(|(a, b)| orient_unchecked(a, b, p) != Orientation::Right),
        }
    }
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient_unchecked(a, b, p) == Orientation::Collinear
        && p.x() >= a.x().min(b.x())
        && p.x() <= a.x().max(b.x())
        && p.y() >= a.y().min(b.y())
        && p.y() <= a.y().max(b.y())
}

/// Monotone-chain hull; collinear boundary points are dropped.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    for p in points {
        check_dim(p, 2)?;
    }
    let mut pts: Vec<&Point> = points.iter().collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(ConvexPolygon { vertices: pts.into_iter().cloned().collect() });
    }

    let mut lower: Vec<&Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && orient_unchecked(lower[lower.len() - 2], lower[lower.len() - 1], p) != Orientation::Left
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && orient_unchecked(upper[upper.len() - 2], upper[upper.len() - 1], p) != Orientation::Left
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // all input collinear: the chains collapse onto the two extremes
    Ok(ConvexPolygon { vertices: lower.into_iter().cloned().collect() })
}

fn project(poly: &ConvexPolygon, ax: &Rational, ay: &Rational) -> (Rational, Rational) {
    let mut it = poly.vertices.iter().map(|p| p.x() * ax + p.y() * ay);
    let first = it.next().expect("polygon has at least one vertex");
    it.fold((first.clone(), first), |(lo, hi), v| {
        let lo = if v < lo { v.clone() } else { lo };
        let hi = if v > hi { v } else { hi };
        (lo, hi)
    })
}

/// True iff the closed regions share no point. Touching counts as
/// intersecting.
///
/// Separating-axis test: candidate axes are the normals of every edge of
/// both polygons plus every vertex-pair difference, which covers the
/// degenerate point and segment cases.
pub fn hulls_disjoint(p1: &ConvexPolygon, p2: &ConvexPolygon) -> bool {
    let mut axes: Vec<(Rational, Rational)> = Vec::new();
    for poly in [p1, p2] {
        for (a, b) in poly.edges() {
            axes.push((-(b.y() - a.y()), b.x() - a.x()));
        }
    }
    for a in &p1.vertices {
        for b in &p2.vertices {
            let dx = b.x() - a.x();
            let dy = b.y() - a.y();
            if !dx.is_zero() || !dy.is_zero() {
                axes.push((dx, dy));
            }
        }
    }
    axes.iter().any(|(ax, ay)| {
        let (lo1, hi1) = project(p1, ax, ay);
        let (lo2, hi2) = project(p2, ax, ay);
        hi1 < lo2 || hi2 < lo1
    })
}

/// Intersection of the two closed disks of squared radius `r_squared`
/// centred at `u` and `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensRegion {
    pub u: Point,
    pub v: Point,
    pub r_squared: Rational,
}

impl LensRegion {
    /// The lens spanned by `u` and `v` with radius `|u - v|`.
    pub fn spanned_by(u: &Point, v: &Point) -> Self {
        Self { u: u.clone(), v: v.clone(), r_squared: sq_dist_unchecked(u, v) }
    }
}

pub fn in_lens(p: &Point, lens: &LensRegion) -> bool {
    sq_dist_unchecked(p, &lens.u) <= lens.r_squared && sq_dist_unchecked(p, &lens.v) <= lens.r_squared
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfPlane {
    /// The whole plane; neutral element for intersections.
    Everything,
    Bounded {
        a: Point,
        b: Point,
        side: Side,
        closed: bool,
    },
}

impl HalfPlane {
    pub fn new(a: Point, b: Point, side: Side, closed: bool) -> Self {
        HalfPlane::Bounded { a, b, side, closed }
    }
}

pub fn in_halfplane(p: &Point, h: &HalfPlane) -> Result<bool, GeometryError> {
    match h {
        HalfPlane::Everything => Ok(true),
        HalfPlane::Bounded { a, b, side, closed } => {
            if a == b {
                return Err(GeometryError::DegenerateHalfPlane);
            }
            Ok(match orientation(a, b, p)? {
                Orientation::Collinear => *closed,
                Orientation::Left => *side == Side::Left,
                Orientation::Right => *side == Side::Right,
            })
        }
    }
}
