//! Basic geometric primitives shared by every module: points, hyperplanes,
//! balls, cones and rigid motions.
//!
//! Points live in `R^2` or `R^3`; both are stored as `[f64; 3]` with the
//! third coordinate fixed to zero in the planar case. The ambient dimension
//! is carried by the containing scene or operation.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 3];

pub const UNIT_NORMAL_TOL: f64 = 1e-12;

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Point, t: f64) -> Point {
    [a[0] * t, a[1] * t, a[2] * t]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalize(a: Point) -> Point {
    let n = norm(a);
    assert!(n > 0.0, "cannot normalize the zero vector");
    scale(a, 1.0 / n)
}

/// Reflection through `x`: `y -> 2x - y`.
#[inline]
pub fn reflect_through(x: Point, y: Point) -> Point {
    sub(scale(x, 2.0), y)
}

/// Surface measure of the unit sphere `S^n` in `R^{n+1}`:
/// `sigma_1 = 2*pi` (circle), `sigma_2 = 4*pi` (2-sphere).
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported ambient dimension {dim}"),
    }
}

/// Volume of the unit ball in `R^dim`.
pub fn ball_volume(dim: usize) -> f64 {
    match dim {
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => panic!("unsupported ambient dimension {dim}"),
    }
}

/// Affine half-space `{ y : (y - anchor) . normal > 0 }` with unit inner
/// normal. The boundary hyperplane passes through `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub anchor: Point,
    pub normal: Point,
}

impl HalfSpace {
    pub fn new(anchor: Point, normal: Point) -> Self {
        let h = HalfSpace { anchor, normal };
        assert!(
            (norm(normal) - 1.0).abs() <= UNIT_NORMAL_TOL,
            "half-space normal must be unit length"
        );
        h
    }

    /// Signed distance of `p` to the boundary hyperplane (positive inside).
    #[inline]
    pub fn signed_dist(&self, p: Point) -> f64 {
        dot(sub(p, self.anchor), self.normal)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.signed_dist(p) > 0.0
    }

    /// The complementary open half-space (normal negated, same boundary).
    pub fn complement(&self) -> Self {
        HalfSpace {
            anchor: self.anchor,
            normal: scale(self.normal, -1.0),
        }
    }
}

/// A hyperplane given by a point and a unit normal. Used for beta-number
/// fits and as the boundary `L_H` of a half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub anchor: Point,
    pub normal: Point,
}

impl Hyperplane {
    pub fn new(anchor: Point, normal: Point) -> Self {
        assert!(
            (norm(normal) - 1.0).abs() <= 1e-9,
            "hyperplane normal must be unit length"
        );
        Hyperplane { anchor, normal }
    }

    #[inline]
    pub fn dist(&self, p: Point) -> f64 {
        dot(sub(p, self.anchor), self.normal).abs()
    }

    /// Angle between two hyperplanes, measured between unit normals and
    /// folded to `[0, pi/2]`.
    pub fn angle(&self, other: &Hyperplane) -> f64 {
        let c = dot(self.normal, other.normal).abs().min(1.0);
        c.acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        dist(p, self.center) < self.radius
    }

    pub fn scaled(&self, t: f64) -> Ball {
        Ball::new(self.center, self.radius * t)
    }
}

/// Two-sided open cone `X_a(apex, u) = { y : |(y-apex).u| > a |y-apex| }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: Point,
    pub axis: Point,
    pub aperture: f64,
}

impl Cone {
    pub fn new(apex: Point, axis: Point, aperture: f64) -> Self {
        assert!(
            aperture > 0.0 && aperture < 1.0,
            "cone aperture must lie strictly in (0,1)"
        );
        assert!(
            (norm(axis) - 1.0).abs() <= UNIT_NORMAL_TOL,
            "cone axis must be unit length"
        );
        Cone {
            apex,
            axis,
            aperture,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let v = sub(p, self.apex);
        dot(v, self.axis).abs() > self.aperture * norm(v)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn of_points<I: IntoIterator<Item = Point>>(pts: I) -> Self {
        let mut b = Aabb::empty();
        for p in pts {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: Point) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn merge(&mut self, other: &Aabb) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(other.min[k]);
            self.max[k] = self.max[k].max(other.max[k]);
        }
    }

    pub fn pad(&self, t: f64) -> Aabb {
        Aabb {
            min: [self.min[0] - t, self.min[1] - t, self.min[2] - t],
            max: [self.max[0] + t, self.max[1] + t, self.max[2] + t],
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn diameter(&self) -> f64 {
        if self.min[0] > self.max[0] {
            0.0
        } else {
            dist(self.min, self.max)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min[0] > self.max[0]
    }
}

/// In-plane unit vector at angle `theta` (2D helper).
#[inline]
pub fn unit2(theta: f64) -> Point {
    [theta.cos(), theta.sin(), 0.0]
}

/// Build an orthonormal basis `(e1, e2)` of the plane orthogonal to `n`
/// in `R^3`. In 2D (`n` with zero third coordinate) call with care: `e1`
/// will lie in the plane, `e2` out of it.
pub fn orthonormal_complement(n: Point) -> (Point, Point) {
    let a = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(sub(a, scale(n, dot(a, n))));
    let e2 = cross(n, e1);
    (e1, e2)
}
