//! Concave piecewise-linear polygons with exact rational data.
//!
//! A polygon starts at the origin and is stored as its slope multiset: a list
//! of segments with strictly decreasing slopes. Vertices are derived on
//! demand. Every Newton, Hodge and Harder-Narasimhan polygon in the crate
//! uses this one representation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// One linear piece: `width` units of run at slope `slope`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlopeSeg {
    pub slope: Rat,
    pub width: Rat,
}

impl SlopeSeg {
    pub fn rise(&self) -> Rat {
        &self.slope * &self.width
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Point {
        Point { x, y }
    }

    pub fn origin() -> Point {
        Point::new(Rat::zero(), Rat::zero())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Object { x: Rat, y: Rat },
    Pair(Rat, Rat),
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Point, D::Error> {
        Ok(match PointRepr::deserialize(deserializer)? {
            PointRepr::Object { x, y } | PointRepr::Pair(x, y) => Point { x, y },
        })
    }
}

/// Serialize a point as the compact pair `[[a,b],[c,d]]`. Either form parses back.
pub mod point_pair {
    use super::Point;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
        (&p.x, &p.y).serialize(s)
    }

    pub fn serialize_vec<S: Serializer>(ps: &[Point], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ps.iter().map(|p| (&p.x, &p.y)))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct ConcavePolygon {
    segments: Vec<SlopeSeg>,
}

#[derive(Deserialize)]
struct RawPolygon {
    segments: Vec<SlopeSeg>,
}

impl TryFrom<RawPolygon> for ConcavePolygon {
    type Error = Error;

    fn try_from(raw: RawPolygon) -> Result<ConcavePolygon> {
        ConcavePolygon::from_slopes(raw.segments.into_iter().map(|s| (s.slope, s.width)))
    }
}

impl fmt::Debug for ConcavePolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", s.slope, s.width)?;
        }
        f.write_str("]")
    }
}

impl ConcavePolygon {
    pub fn empty() -> ConcavePolygon {
        ConcavePolygon { segments: Vec::new() }
    }

    /// Builds the polygon with the given `(slope, width)` multiset. Order does
    /// not matter; equal slopes are merged.
    pub fn from_slopes<I>(slopes: I) -> Result<ConcavePolygon>
    where
        I: IntoIterator<Item = (Rat, Rat)>,
    {
        let mut segs: Vec<SlopeSeg> = Vec::new();
        for (slope, width) in slopes {
            if !width.is_positive() {
                return Err(Error::NonPositiveWidth(width));
            }
            segs.push(SlopeSeg { slope, width });
        }
        segs.sort_by(|a, b| b.slope.cmp(&a.slope));
        let mut merged: Vec<SlopeSeg> = Vec::with_capacity(segs.len());
        for s in segs {
            match merged.last_mut() {
                Some(last) if last.slope == s.slope => last.width += s.width,
                _ => merged.push(s),
            }
        }
        Ok(ConcavePolygon { segments: merged })
    }

    /// Builds a polygon from its vertex list, which must start at the origin,
    /// have strictly increasing abscissae and non-increasing slopes.
    pub fn from_vertices(vertices: &[Point]) -> Result<ConcavePolygon> {
        let Some(first) = vertices.first() else {
            return Ok(ConcavePolygon::empty());
        };
        if first.x != Rat::zero() || first.y != Rat::zero() {
            return Err(Error::NotConcave(format!("first vertex {first:?} is not the origin")));
        }
        let mut segs: Vec<SlopeSeg> = Vec::new();
        for w in vertices.windows(2) {
            let dx = &w[1].x - &w[0].x;
            if !dx.is_positive() {
                return Err(Error::NotConcave(format!(
                    "abscissae not increasing at {:?}",
                    w[1]
                )));
            }
            let slope = (&w[1].y - &w[0].y) / &dx;
            match segs.last_mut() {
                Some(last) if last.slope == slope => last.width += dx,
                Some(last) if last.slope < slope => {
                    return Err(Error::NotConcave(format!("slope increases at {:?}", w[0])));
                }
                _ => segs.push(SlopeSeg { slope, width: dx }),
            }
        }
        Ok(ConcavePolygon { segments: segs })
    }

    pub fn segments(&self) -> &[SlopeSeg] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `(slope, width)` pairs, slopes strictly decreasing.
    pub fn slope_multiset(&self) -> Vec<(Rat, Rat)> {
        self.segments
            .iter()
            .map(|s| (s.slope.clone(), s.width.clone()))
            .collect()
    }

    pub fn width(&self) -> Rat {
        self.segments.iter().map(|s| &s.width).sum()
    }

    pub fn end_height(&self) -> Rat {
        self.segments.iter().map(|s| s.rise()).sum()
    }

    pub fn end_point(&self) -> Point {
        Point::new(self.width(), self.end_height())
    }

    /// All vertices including `(0,0)` and the end point.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut p = Point::origin();
        out.push(p.clone());
        for s in &self.segments {
            p = Point::new(&p.x + &s.width, &p.y + s.rise());
            out.push(p.clone());
        }
        out
    }

    /// Interior vertices where the slope strictly drops.
    pub fn break_points(&self) -> Vec<Point> {
        let mut v = self.vertices();
        if v.len() <= 2 {
            return Vec::new();
        }
        v.pop();
        v.remove(0);
        v
    }

    pub fn is_break_abscissa(&self, x: &Rat) -> bool {
        self.break_points().iter().any(|p| &p.x == x)
    }

    pub fn evaluate(&self, x: &Rat) -> Result<Rat> {
        let width = self.width();
        if x.is_negative() || *x > width {
            return Err(Error::OutOfDomain { x: x.clone(), width });
        }
        let mut cx = Rat::zero();
        let mut cy = Rat::zero();
        for s in &self.segments {
            let nx = &cx + &s.width;
            if *x <= nx {
                return Ok(cy + &s.slope * (x - &cx));
            }
            cy += s.rise();
            cx = nx;
        }
        Ok(cy)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        matches!(self.evaluate(&p.x), Ok(y) if y == p.y)
    }

    pub fn mu_max(&self) -> Option<Rat> {
        self.segments.first().map(|s| s.slope.clone())
    }

    pub fn mu_min(&self) -> Option<Rat> {
        self.segments.last().map(|s| s.slope.clone())
    }

    fn abscissae_union(&self, other: &ConcavePolygon) -> BTreeSet<Rat> {
        self.vertices()
            .into_iter()
            .chain(other.vertices())
            .map(|p| p.x)
            .collect()
    }

    /// Dominance order: same end points and `self` on or below `other`.
    pub fn leq(&self, other: &ConcavePolygon) -> bool {
        self.first_violation(other).is_none()
    }

    /// `None` when `self <= other`; otherwise the first abscissa witnessing
    /// failure (the common width is reported for end point mismatches).
    pub fn first_violation(&self, other: &ConcavePolygon) -> Option<Rat> {
        let (w1, w2) = (self.width(), other.width());
        if w1 != w2 {
            return Some(w1.min(w2));
        }
        for x in self.abscissae_union(other) {
            let a = self.evaluate(&x).expect("abscissa in domain");
            let b = other.evaluate(&x).expect("abscissa in domain");
            if a > b {
                return Some(x);
            }
        }
        if self.end_height() != other.end_height() {
            return Some(w1);
        }
        None
    }

    /// Break points of `self` that touch `upper`. Requires `self <= upper`.
    pub fn contact_break_points(&self, upper: &ConcavePolygon) -> Result<Vec<Point>> {
        if let Some(x) = self.first_violation(upper) {
            return Err(Error::NotComparable(format!("lower polygon exceeds upper at x = {x}")));
        }
        Ok(self
            .break_points()
            .into_iter()
            .filter(|p| upper.evaluate(&p.x).map(|y| y == p.y).unwrap_or(false))
            .collect())
    }

    /// `x ↦ P(d·x)/d`: widths divided by `d`, slopes unchanged.
    pub fn normalize(&self, d: u64) -> ConcavePolygon {
        assert!(d > 0, "normalization factor must be positive");
        let d = Rat::from(d);
        ConcavePolygon {
            segments: self
                .segments
                .iter()
                .map(|s| SlopeSeg { slope: s.slope.clone(), width: &s.width / &d })
                .collect(),
        }
    }

    /// Pointwise average of polygons of a common width.
    pub fn average(polys: &[ConcavePolygon]) -> Result<ConcavePolygon> {
        let first = polys.first().ok_or(Error::EmptyInput)?;
        let width = first.width();
        if let Some(p) = polys.iter().find(|p| p.width() != width) {
            return Err(Error::WidthMismatch(format!("{} vs {}", p.width(), width)));
        }
        let xs: BTreeSet<Rat> = polys
            .iter()
            .flat_map(|p| p.vertices().into_iter().map(|v| v.x))
            .collect();
        let k = Rat::from(polys.len() as u64);
        let verts: Vec<Point> = xs
            .into_iter()
            .map(|x| {
                let sum: Rat = polys.iter().map(|p| p.evaluate(&x).expect("in domain")).sum();
                Point::new(x, sum / &k)
            })
            .collect();
        ConcavePolygon::from_vertices(&verts)
    }

    /// Slopes mapped by `λ ↦ c − λ`, widths kept.
    pub fn dual(&self, c: &Rat) -> ConcavePolygon {
        let mut segs: Vec<SlopeSeg> = self
            .segments
            .iter()
            .rev()
            .map(|s| SlopeSeg { slope: c - &s.slope, width: s.width.clone() })
            .collect();
        segs.shrink_to_fit();
        ConcavePolygon { segments: segs }
    }

    pub fn is_symmetric(&self, c: &Rat) -> bool {
        &self.dual(c) == self
    }

    /// Mirror image of a point under the symmetry `λ ↦ 1 − λ`:
    /// `(w − x, e − x + y)`.
    pub fn symmetric_point(&self, x: &Point) -> Result<Point> {
        if !self.is_symmetric(&Rat::one()) {
            return Err(Error::NotSymmetric);
        }
        if !self.contains_point(x) {
            return Err(Error::NotOnPolygon { x: x.x.clone(), y: x.y.clone() });
        }
        Ok(Point::new(self.width() - &x.x, self.end_height() - &x.x + &x.y))
    }

    /// Splits at a point on the polygon into the part up to it and the part
    /// after it, translated to the origin.
    pub fn split_at(&self, x: &Point) -> Result<(ConcavePolygon, ConcavePolygon)> {
        if !self.contains_point(x) {
            return Err(Error::NotOnPolygon { x: x.x.clone(), y: x.y.clone() });
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut cx = Rat::zero();
        for s in &self.segments {
            let nx = &cx + &s.width;
            if nx <= x.x {
                left.push(s.clone());
            } else if cx >= x.x {
                right.push(s.clone());
            } else {
                left.push(SlopeSeg { slope: s.slope.clone(), width: &x.x - &cx });
                right.push(SlopeSeg { slope: s.slope.clone(), width: &nx - &x.x });
            }
            cx = nx;
        }
        Ok((ConcavePolygon { segments: left }, ConcavePolygon { segments: right }))
    }

    /// Slope-multiset union.
    pub fn concat(&self, other: &ConcavePolygon) -> ConcavePolygon {
        ConcavePolygon::from_slopes(self.slope_multiset().into_iter().chain(other.slope_multiset()))
            .expect("segment widths are positive")
    }
}

/// Upper concave hull of `points ∪ {(0,0), anchor_end}` over `[0, anchor_end.x]`.
pub fn concave_envelope(points: &[Point], anchor_end: &Point) -> Result<ConcavePolygon> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let zero = Rat::zero();
    for p in points {
        if p.x.is_negative() || p.x > anchor_end.x {
            return Err(Error::OutOfDomain { x: p.x.clone(), width: anchor_end.x.clone() });
        }
        if p.x == anchor_end.x && p.y > anchor_end.y {
            return Err(Error::AnchorInconsistent(format!(
                "point {p:?} lies above the anchor {anchor_end:?}"
            )));
        }
        if p.x == zero && p.y > zero {
            return Err(Error::AnchorInconsistent(format!("point {p:?} lies above the origin")));
        }
    }
    if anchor_end.x.is_negative() {
        return Err(Error::OutOfDomain { x: anchor_end.x.clone(), width: zero });
    }
    if anchor_end.x == zero {
        if anchor_end.y != zero {
            return Err(Error::AnchorInconsistent("zero width with non-zero height".into()));
        }
        return Ok(ConcavePolygon::empty());
    }

    // Interior abscissae only; the end points are pinned.
    let mut pts: Vec<&Point> = points
        .iter()
        .filter(|p| p.x > zero && p.x < anchor_end.x)
        .collect();
    pts.sort();
    let origin = Point::origin();
    let mut hull: Vec<&Point> = vec![&origin];
    let candidates = pts.into_iter().chain(std::iter::once(anchor_end));
    for p in candidates {
        // Keep only the highest point at each abscissa.
        if let Some(last) = hull.last() {
            if last.x == p.x {
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b unless it lies strictly above the chord a–p.
            let cross = (&b.x - &a.x) * (&p.y - &a.y) - (&b.y - &a.y) * (&p.x - &a.x);
            if !cross.is_negative() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let verts: Vec<Point> = hull.into_iter().cloned().collect();
    ConcavePolygon::from_vertices(&verts)
}
