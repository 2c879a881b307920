//! Exact circle-slice oracle in the plane.
//!
//! For a circle `S(x,r)` and a region tree built from primitives that admit
//! exact circle intersection (half-planes, disks, boxes, convex polygons,
//! piecewise-linear graphs), the trace of the region on the circle is a
//! finite union of open angular intervals. This module implements the
//! interval algebra and the per-primitive intersectors.

use crate::geom::Point;
use crate::region::{GraphSide, Region, RegionError, RegionPair};
use std::f64::consts::{PI, TAU};

/// A finite union of disjoint angular intervals inside `[0, 2*pi]`,
/// sorted by start. Intervals never wrap; a wrapping arc is stored as two
/// pieces split at `0 == 2*pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    intervals: Vec<(f64, f64)>,
}

fn norm_angle(t: f64) -> f64 {
    let mut t = t % TAU;
    if t < 0.0 {
        t += TAU;
    }
    t
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { intervals: vec![] }
    }

    pub fn full() -> Self {
        ArcSet {
            intervals: vec![(0.0, TAU)],
        }
    }

    /// Builds from raw (possibly overlapping, possibly wrapping) intervals.
    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        let mut parts = Vec::new();
        for (s, e) in iter {
            if e <= s {
                continue;
            }
            if e - s >= TAU {
                return ArcSet::full();
            }
            let len = e - s;
            let s = norm_angle(s);
            if s + len <= TAU {
                parts.push((s, s + len));
            } else {
                parts.push((s, TAU));
                parts.push((0.0, s + len - TAU));
            }
        }
        parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (s, e) in parts {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        ArcSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Total angular length.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(s, e)| e - s).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        let t = norm_angle(t);
        self.intervals.iter().any(|&(s, e)| s < t && t < e)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        ArcSet::from_intervals(
            self.intervals
                .iter()
                .chain(other.intervals.iter())
                .copied(),
        )
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::new();
        let mut cursor = 0.0_f64;
        for &(s, e) in &self.intervals {
            if s > cursor {
                out.push((cursor, s));
            }
            cursor = cursor.max(e);
        }
        if cursor < TAU {
            out.push((cursor, TAU));
        }
        ArcSet { intervals: out }
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        self.complement()
            .union(&other.complement())
            .complement()
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &ArcSet) -> ArcSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Rotates the set by `phi` (mod `2*pi`).
    pub fn rotate(&self, phi: f64) -> ArcSet {
        ArcSet::from_intervals(self.intervals.iter().map(|&(s, e)| (s + phi, e + phi)))
    }

    /// Length of the longest single open arc, joining across the `0 == 2*pi`
    /// seam.
    pub fn longest_arc(&self) -> f64 {
        if self.intervals.is_empty() {
            return 0.0;
        }
        let mut best = self
            .intervals
            .iter()
            .map(|(s, e)| e - s)
            .fold(0.0, f64::max);
        let first = self.intervals[0];
        let last = *self.intervals.last().unwrap();
        if first.0 <= 1e-12 && (TAU - last.1) <= 1e-12 && self.intervals.len() >= 2 {
            best = best.max(first.1 - first.0 + last.1 - last.0);
        }
        best.min(TAU)
    }
}

/// Solves `a*cos(t) + b*sin(t) + c > 0` exactly on the circle.
pub fn sinusoid_gt(a: f64, b: f64, c: f64) -> ArcSet {
    let r = a.hypot(b);
    if r < 1e-300 {
        return if c > 0.0 { ArcSet::full() } else { ArcSet::empty() };
    }
    let u = -c / r;
    if u >= 1.0 {
        ArcSet::empty()
    } else if u <= -1.0 {
        ArcSet::full()
    } else {
        let phi = b.atan2(a);
        let d = u.acos(); // in (0, pi)
        ArcSet::from_intervals([(phi - d, phi + d)])
    }
}

/// Trace of a region tree on the circle `S(x, r)` as an [`ArcSet`].
pub fn region_on_circle(region: &Region, x: Point, r: f64) -> Result<ArcSet, RegionError> {
    match region {
        Region::Empty => Ok(ArcSet::empty()),
        Region::HalfSpace { anchor, normal } => {
            let c = (x[0] - anchor[0]) * normal[0] + (x[1] - anchor[1]) * normal[1];
            Ok(sinusoid_gt(r * normal[0], r * normal[1], c))
        }
        Region::Ball { center, radius } => {
            let dx = x[0] - center[0];
            let dy = x[1] - center[1];
            let c = dx * dx + dy * dy + r * r - radius * radius;
            // |p - center|^2 < radius^2  <=>  -(2r dx cos + 2r dy sin + c) > 0
            Ok(sinusoid_gt(-2.0 * r * dx, -2.0 * r * dy, -c))
        }
        Region::Box { min, max } => {
            let mut acc = ArcSet::full();
            // x0 > min, x0 < max, x1 > min, x1 < max
            acc = acc.intersection(&sinusoid_gt(r, 0.0, x[0] - min[0]));
            acc = acc.intersection(&sinusoid_gt(-r, 0.0, max[0] - x[0]));
            acc = acc.intersection(&sinusoid_gt(0.0, r, x[1] - min[1]));
            acc = acc.intersection(&sinusoid_gt(0.0, -r, max[1] - x[1]));
            Ok(acc)
        }
        Region::Polygon { vertices } => {
            let n = vertices.len();
            let mut acc = ArcSet::full();
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                // inner normal of a CCW edge: (-ey, ex)
                let c = -ey * (x[0] - a[0]) + ex * (x[1] - a[1]);
                acc = acc.intersection(&sinusoid_gt(-ey * r, ex * r, c));
            }
            Ok(acc)
        }
        Region::PlGraph { f, side } => {
            let b = &f.breakpoints;
            let mut acc = ArcSet::empty();
            // segment list with open x-bounds; end segments extend to +-inf
            let nseg = b.len() - 1;
            for i in 0..nseg {
                let (x0, y0) = b[i];
                let (x1, y1) = b[i + 1];
                let m = (y1 - y0) / (x1 - x0);
                let q = y0 - m * x0;
                // above: p_y - m p_x - q > 0
                let sgn = match side {
                    GraphSide::Above => 1.0,
                    GraphSide::Below => -1.0,
                };
                let mut piece = sinusoid_gt(
                    sgn * (-m * r),
                    sgn * r,
                    sgn * (x[1] - m * x[0] - q),
                );
                if i > 0 {
                    // p_x > x0
                    piece = piece.intersection(&sinusoid_gt(r, 0.0, x[0] - x0));
                }
                if i + 1 < nseg {
                    // p_x < x1
                    piece = piece.intersection(&sinusoid_gt(-r, 0.0, x1 - x[0]));
                }
                acc = acc.union(&piece);
            }
            Ok(acc)
        }
        Region::Polyhedron { .. } => Err(RegionError::UnsupportedPrimitive(
            "polyhedron has no exact circle intersector (3D primitive)".into(),
        )),
        Region::Union(cs) => {
            let mut acc = ArcSet::empty();
            for c in cs {
                acc = acc.union(&region_on_circle(c, x, r)?);
            }
            Ok(acc)
        }
        Region::Intersection(cs) => {
            if cs.is_empty() {
                return Ok(ArcSet::empty());
            }
            let mut acc = ArcSet::full();
            for c in cs {
                acc = acc.intersection(&region_on_circle(c, x, r)?);
            }
            Ok(acc)
        }
        Region::Complement(c) => Ok(region_on_circle(c, x, r)?.complement()),
    }
}

/// Exact decomposition of the circle `S(x,r)` into `Plus`, `Minus` and
/// `Free` angular interval families. The three families partition
/// `[0, 2*pi)` up to finitely many endpoints.
#[derive(Debug, Clone)]
pub struct ArcDecomposition {
    pub plus: ArcSet,
    pub minus: ArcSet,
    pub free: ArcSet,
}

pub fn arc_decomposition(
    pair: &RegionPair,
    x: Point,
    r: f64,
) -> Result<ArcDecomposition, RegionError> {
    assert!(pair.dim == 2, "arc decomposition is a 2D oracle");
    assert!(r > 0.0);
    let plus = region_on_circle(&pair.plus, x, r)?;
    let minus = region_on_circle(&pair.minus, x, r)?;
    let free = plus.union(&minus).complement();
    Ok(ArcDecomposition { plus, minus, free })
}

impl ArcDecomposition {
    /// Angular measure sanity: the three families tile the circle.
    pub fn total_measure(&self) -> f64 {
        self.plus.measure() + self.minus.measure() + self.free.measure()
    }
}

/// Upper half circle interval `(nu - pi/2, nu + pi/2)` for the half-space
/// through the circle center with inner normal at angle `nu`.
pub fn halfspace_arcs(normal_angle: f64) -> ArcSet {
    ArcSet::from_intervals([(normal_angle - PI / 2.0, normal_angle + PI / 2.0)])
}
