//! Region trees and the membership oracle for disjoint set pairs.
//!
//! A scene holds two region trees `plus` and `minus` built from open
//! primitives (half-spaces, balls, boxes, convex polygons/polyhedra,
//! sub/epigraphs of piecewise-linear functions) closed under union,
//! intersection and complement. All primitives are open and boundaries
//! classify `Free`, so membership uses three-valued logic: `In`, `On`
//! (boundary) and `Out`.

use crate::geom::{dot, norm, sub, Aabb, Point};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mem {
    In,
    On,
    Out,
}

impl Mem {
    fn from_sign(s: f64) -> Mem {
        if s > 0.0 {
            Mem::In
        } else if s < 0.0 {
            Mem::Out
        } else {
            Mem::On
        }
    }

    fn complement(self) -> Mem {
        match self {
            Mem::In => Mem::Out,
            Mem::Out => Mem::In,
            Mem::On => Mem::On,
        }
    }
}

/// Classification label of a point with respect to a [`RegionPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Plus,
    Minus,
    Free,
}

/// Piecewise-linear function of one variable given by breakpoints sorted by
/// abscissa, extended beyond the breakpoint range by the end segment slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlFunction {
    /// `(x, y)` breakpoints, strictly increasing in `x`, at least two.
    pub breakpoints: Vec<(f64, f64)>,
}

impl PlFunction {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self, RegionError> {
        if breakpoints.len() < 2 {
            return Err(RegionError::BadPrimitive(
                "plgraph needs at least two breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(RegionError::BadPrimitive(
                "plgraph breakpoints must be strictly increasing in x".into(),
            ));
        }
        Ok(PlFunction { breakpoints })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        let seg = if x <= b[0].0 {
            (b[0], b[1])
        } else if x >= b[b.len() - 1].0 {
            (b[b.len() - 2], b[b.len() - 1])
        } else {
            let i = b.partition_point(|&(bx, _)| bx <= x) - 1;
            (b[i], b[i + 1])
        };
        let ((x0, y0), (x1, y1)) = seg;
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Maximum absolute segment slope.
    pub fn lipschitz(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

/// Which side of a piecewise-linear graph a region occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSide {
    /// Epigraph `{ y > f(x) }`.
    Above,
    /// Subgraph `{ y < f(x) }`.
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Empty,
    /// Open half-space `{ (p - anchor) . normal > 0 }`.
    HalfSpace { anchor: Point, normal: Point },
    /// Open ball.
    Ball { center: Point, radius: f64 },
    /// Open axis-aligned box.
    Box { min: Point, max: Point },
    /// Interior of a convex polygon in the plane (vertices in CCW order).
    Polygon { vertices: Vec<Point> },
    /// Interior of a convex polyhedron given as an intersection of open
    /// half-spaces.
    Polyhedron { faces: Vec<(Point, Point)> },
    /// Open sub/epigraph of a piecewise-linear Lipschitz function (2D).
    PlGraph { f: PlFunction, side: GraphSide },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
}

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("scene regions are not disjoint: point {0:?} classifies Plus and Minus")]
    NotDisjoint(Point),
    #[error("invalid primitive: {0}")]
    BadPrimitive(String),
    #[error("unsupported primitive for this operation: {0}")]
    UnsupportedPrimitive(String),
    #[error("ambient dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
}

impl Region {
    pub fn membership(&self, p: Point) -> Mem {
        match self {
            Region::Empty => Mem::Out,
            Region::HalfSpace { anchor, normal } => Mem::from_sign(dot(sub(p, *anchor), *normal)),
            Region::Ball { center, radius } => {
                let d2 = dot(sub(p, *center), sub(p, *center));
                Mem::from_sign(radius * radius - d2)
            }
            Region::Box { min, max } => {
                let mut m = Mem::In;
                for k in 0..3 {
                    // Degenerate axes (min == max == 0 in 2D z) stay neutral.
                    if min[k] == max[k] {
                        continue;
                    }
                    let s = (p[k] - min[k]).min(max[k] - p[k]);
                    match Mem::from_sign(s) {
                        Mem::Out => return Mem::Out,
                        Mem::On => m = Mem::On,
                        Mem::In => {}
                    }
                }
                m
            }
            Region::Polygon { vertices } => {
                let mut m = Mem::In;
                let n = vertices.len();
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let e = sub(b, a);
                    // Inner normal of a CCW edge.
                    let s = -e[1] * (p[0] - a[0]) + e[0] * (p[1] - a[1]);
                    match Mem::from_sign(s) {
                        Mem::Out => return Mem::Out,
                        Mem::On => m = Mem::On,
                        Mem::In => {}
                    }
                }
                m
            }
            Region::Polyhedron { faces } => {
                let mut m = Mem::In;
                for (anchor, normal) in faces {
                    match Mem::from_sign(dot(sub(p, *anchor), *normal)) {
                        Mem::Out => return Mem::Out,
                        Mem::On => m = Mem::On,
                        Mem::In => {}
                    }
                }
                m
            }
            Region::PlGraph { f, side } => {
                let s = p[1] - f.eval(p[0]);
                match side {
                    GraphSide::Above => Mem::from_sign(s),
                    GraphSide::Below => Mem::from_sign(-s),
                }
            }
            Region::Union(children) => {
                let mut m = Mem::Out;
                for c in children {
                    match c.membership(p) {
                        Mem::In => return Mem::In,
                        Mem::On => m = Mem::On,
                        Mem::Out => {}
                    }
                }
                m
            }
            Region::Intersection(children) => {
                if children.is_empty() {
                    return Mem::Out;
                }
                let mut m = Mem::In;
                for c in children {
                    match c.membership(p) {
                        Mem::Out => return Mem::Out,
                        Mem::On => m = Mem::On,
                        Mem::In => {}
                    }
                }
                m
            }
            Region::Complement(c) => c.membership(p).complement(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.membership(p) == Mem::In
    }

    /// Grow `bbox` by the defining data of every primitive in the tree.
    fn grow_bbox(&self, bbox: &mut Aabb) {
        match self {
            Region::Empty => {}
            Region::HalfSpace { anchor, .. } => bbox.grow(*anchor),
            Region::Ball { center, radius } => {
                bbox.grow([center[0] - radius, center[1] - radius, center[2] - radius]);
                bbox.grow([center[0] + radius, center[1] + radius, center[2] + radius]);
            }
            Region::Box { min, max } => {
                bbox.grow(*min);
                bbox.grow(*max);
            }
            Region::Polygon { vertices } => {
                for &v in vertices {
                    bbox.grow(v);
                }
            }
            Region::Polyhedron { faces } => {
                for &(a, _) in faces {
                    bbox.grow(a);
                }
            }
            Region::PlGraph { f, .. } => {
                for &(x, y) in &f.breakpoints {
                    bbox.grow([x, y, 0.0]);
                }
            }
            Region::Union(cs) | Region::Intersection(cs) => {
                for c in cs {
                    c.grow_bbox(bbox);
                }
            }
            Region::Complement(c) => c.grow_bbox(bbox),
        }
    }

    fn validate(&self, dim: usize) -> Result<(), RegionError> {
        match self {
            Region::Empty => Ok(()),
            Region::HalfSpace { normal, .. } => {
                if (norm(*normal) - 1.0).abs() > 1e-9 {
                    return Err(RegionError::BadPrimitive(
                        "half-space normal must be unit length".into(),
                    ));
                }
                Ok(())
            }
            Region::Ball { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(RegionError::BadPrimitive(
                        "ball radius must be positive".into(),
                    ));
                }
                Ok(())
            }
            Region::Box { min, max } => {
                for k in 0..dim {
                    if min[k] >= max[k] {
                        return Err(RegionError::BadPrimitive(
                            "box must satisfy min < max on every axis".into(),
                        ));
                    }
                }
                Ok(())
            }
            Region::Polygon { vertices } => {
                if dim != 2 {
                    return Err(RegionError::BadPrimitive("polygon requires dim = 2".into()));
                }
                if vertices.len() < 3 {
                    return Err(RegionError::BadPrimitive(
                        "polygon needs at least three vertices".into(),
                    ));
                }
                Ok(())
            }
            Region::Polyhedron { faces } => {
                if faces.is_empty() {
                    return Err(RegionError::BadPrimitive(
                        "polyhedron needs at least one face".into(),
                    ));
                }
                for (_, n) in faces {
                    if (norm(*n) - 1.0).abs() > 1e-9 {
                        return Err(RegionError::BadPrimitive(
                            "polyhedron face normal must be unit length".into(),
                        ));
                    }
                }
                Ok(())
            }
            Region::PlGraph { f, .. } => {
                if dim != 2 {
                    return Err(RegionError::BadPrimitive("plgraph requires dim = 2".into()));
                }
                PlFunction::new(f.breakpoints.clone()).map(|_| ())
            }
            Region::Union(cs) | Region::Intersection(cs) => {
                cs.iter().try_for_each(|c| c.validate(dim))
            }
            Region::Complement(c) => c.validate(dim),
        }
    }
}

/// A pair of disjoint open regions `(plus, minus)`; the rest of space is
/// the free set `F`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionPair {
    pub dim: usize,
    pub plus: Region,
    pub minus: Region,
    pub bbox: Aabb,
}

/// Number of random samples used by the construction-time disjointness
/// check.
pub const DISJOINTNESS_SAMPLES: usize = 10_000;

impl RegionPair {
    /// Builds a pair, computing the bounding box from the primitives and
    /// verifying disjointness on `DISJOINTNESS_SAMPLES` seeded random
    /// samples.
    pub fn new(dim: usize, plus: Region, minus: Region) -> Result<Self, RegionError> {
        Self::with_bbox(dim, plus, minus, None)
    }

    pub fn with_bbox(
        dim: usize,
        plus: Region,
        minus: Region,
        bbox: Option<Aabb>,
    ) -> Result<Self, RegionError> {
        if dim != 2 && dim != 3 {
            return Err(RegionError::BadDimension(dim));
        }
        plus.validate(dim)?;
        minus.validate(dim)?;
        let bbox = bbox.unwrap_or_else(|| {
            let mut b = Aabb::empty();
            plus.grow_bbox(&mut b);
            minus.grow_bbox(&mut b);
            if b.is_empty() {
                b.grow([0.0; 3]);
            }
            let pad = 1.0 + 0.5 * b.diameter();
            b.pad(pad)
        });
        let pair = RegionPair {
            dim,
            plus,
            minus,
            bbox,
        };
        pair.check_disjoint()?;
        Ok(pair)
    }

    fn check_disjoint(&self) -> Result<(), RegionError> {
        let mut rng = SplitMix64::new(0x9e37_79b9_7f4a_7c15);
        for _ in 0..DISJOINTNESS_SAMPLES {
            let mut p = [0.0; 3];
            for k in 0..self.dim {
                let u = rng.next_f64();
                p[k] = self.bbox.min[k] + u * (self.bbox.max[k] - self.bbox.min[k]);
            }
            if self.plus.contains(p) && self.minus.contains(p) {
                return Err(RegionError::NotDisjoint(p));
            }
        }
        Ok(())
    }

    /// Deterministic three-way classification: `Free` means the point lies
    /// in neither open region (in particular on any boundary).
    pub fn classify(&self, p: Point) -> Label {
        debug_assert!(p.iter().all(|c| c.is_finite()));
        if self.plus.contains(p) {
            Label::Plus
        } else if self.minus.contains(p) {
            Label::Minus
        } else {
            Label::Free
        }
    }

    pub fn is_free(&self, p: Point) -> bool {
        self.classify(p) == Label::Free
    }

    /// The pair with the roles of the two regions swapped.
    pub fn swapped(&self) -> RegionPair {
        RegionPair {
            dim: self.dim,
            plus: self.minus.clone(),
            minus: self.plus.clone(),
            bbox: self.bbox,
        }
    }

    pub fn diameter(&self) -> f64 {
        self.bbox.diameter()
    }
}

/// The standard half-plane pair `{y > 0} / {y < 0}` in 2D.
pub fn halfplane_pair() -> RegionPair {
    RegionPair::new(
        2,
        Region::HalfSpace {
            anchor: [0.0; 3],
            normal: [0.0, 1.0, 0.0],
        },
        Region::HalfSpace {
            anchor: [0.0; 3],
            normal: [0.0, -1.0, 0.0],
        },
    )
    .unwrap()
}

/// Half-space pair `{z > 0} / {z < 0}` in 3D.
pub fn halfspace_pair_3d() -> RegionPair {
    RegionPair::new(
        3,
        Region::HalfSpace {
            anchor: [0.0; 3],
            normal: [0.0, 0.0, 1.0],
        },
        Region::HalfSpace {
            anchor: [0.0; 3],
            normal: [0.0, 0.0, -1.0],
        },
    )
    .unwrap()
}

/// Gap-strip pair `{y > 0} / {y < -h}`: a strip of free space of width `h`.
pub fn gap_strip_pair(h: f64) -> RegionPair {
    assert!(h >= 0.0);
    RegionPair::new(
        2,
        Region::HalfSpace {
            anchor: [0.0; 3],
            normal: [0.0, 1.0, 0.0],
        },
        Region::HalfSpace {
            anchor: [0.0, -h, 0.0],
            normal: [0.0, -1.0, 0.0],
        },
    )
    .unwrap()
}

/// The empty pair (everything is free).
pub fn empty_pair(dim: usize) -> RegionPair {
    RegionPair::new(dim, Region::Empty, Region::Empty).unwrap()
}
