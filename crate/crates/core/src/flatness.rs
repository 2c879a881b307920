//! Jones-type flatness numbers `beta_inf` for point sets in balls, plus
//! the good-ball predicate and the stopping height of the corona
//! construction.

use crate::cloud::WeightedCloud;
use crate::geom::{cross, dist, dot, norm, normalize, sub, Ball, Hyperplane, Point};
use crate::sphere::SphereSample;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlatnessError {
    #[error("the ball contains no points of the set")]
    EmptyIntersection,
}

/// Width/2 of the point set along direction `n` and the mid-offset.
fn half_width(points: &[Point], n: Point) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in points {
        let s = dot(p, n);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    ((hi - lo) / 2.0, (hi + lo) / 2.0)
}

fn plane_from(n: Point, offset: f64) -> Hyperplane {
    Hyperplane {
        anchor: [n[0] * offset, n[1] * offset, n[2] * offset],
        normal: n,
    }
}

/// Exact minimal-width direction in the plane via convex hull + rotating
/// over hull edges (the minimal width of a convex polygon is attained with
/// a side flush against the hull).
fn min_width_2d(points: &[Point]) -> (f64, Hyperplane) {
    let hull = convex_hull_2d(points);
    if hull.len() <= 2 {
        // collinear (or a single point): zero width, normal perpendicular
        // to the spanning direction
        let dir = if hull.len() == 2 {
            normalize(sub(hull[1], hull[0]))
        } else {
            [1.0, 0.0, 0.0]
        };
        let n = [-dir[1], dir[0], 0.0];
        let (_, off) = half_width(points, n);
        return (0.0, plane_from(n, off));
    }
    let mut best = (f64::INFINITY, plane_from([0.0, 1.0, 0.0], 0.0));
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let e = normalize(sub(b, a));
        let n = [-e[1], e[0], 0.0];
        let (w, off) = half_width(&hull, n);
        if w < best.0 {
            best = (w, plane_from(n, off));
        }
    }
    best
}

/// Andrew monotone chain; input need not be sorted. Returns CCW hull.
pub fn convex_hull_2d(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// 3D minimal-width direction: exact support-set enumeration for small
/// sets, otherwise a Fibonacci direction grid with local refinement.
fn min_width_3d(points: &[Point]) -> (f64, Hyperplane) {
    let mut best = (f64::INFINITY, plane_from([0.0, 0.0, 1.0], 0.0));
    fn consider_dir(points: &[Point], best: &mut (f64, Hyperplane), n: Point) {
        let nn = norm(n);
        if nn < 1e-12 {
            return;
        }
        let n = normalize(n);
        let (w, off) = half_width(points, n);
        if w < best.0 {
            *best = (w, plane_from(n, off));
        }
    }
    let consider = |best: &mut (f64, Hyperplane), n: Point| consider_dir(points, best, n);
    if points.len() <= 12 {
        // the minimal width is attained normal to a hull face (triple) or
        // across an edge-edge antipodal pair (cross of two edges)
        let m = points.len();
        for i in 0..m {
            for j in (i + 1)..m {
                let eij = sub(points[j], points[i]);
                for k in (j + 1)..m {
                    consider(&mut best, cross(eij, sub(points[k], points[i])));
                }
                for k in 0..m {
                    for l in (k + 1)..m {
                        if (k, l) != (i, j) {
                            consider(&mut best, cross(eij, sub(points[l], points[k])));
                        }
                    }
                }
            }
        }
        if m == 1 {
            consider(&mut best, [0.0, 0.0, 1.0]);
        }
        if m == 2 {
            let e = sub(points[1], points[0]);
            let (a, _) = crate::geom::orthonormal_complement(normalize(e));
            consider(&mut best, a);
        }
        return best;
    }
    let dirs = SphereSample::fibonacci([0.0; 3], 1.0, 2000);
    for &n in &dirs.nodes {
        consider(&mut best, n);
    }
    // local refinement around the incumbent normal
    let n0 = best.1.normal;
    let (e1, e2) = crate::geom::orthonormal_complement(n0);
    let mut step = 0.05;
    for _ in 0..60 {
        let cur = best.0;
        for (du, dv) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let n0 = best.1.normal;
            consider(&mut best, [
                n0[0] + du * e1[0] + dv * e2[0],
                n0[1] + du * e1[1] + dv * e2[1],
                n0[2] + du * e1[2] + dv * e2[2],
            ]);
        }
        if best.0 >= cur {
            step *= 0.5;
        }
        if step < 1e-7 {
            break;
        }
    }
    best
}

/// `beta_inf(E, B) = inf_L sup_{y in E n B} dist(y, L) / rad(B)` together
/// with the minimizing plane.
pub fn beta_inf(e: &[Point], b: &Ball, dim: usize) -> Result<(f64, Hyperplane), FlatnessError> {
    let inside: Vec<Point> = e
        .iter()
        .copied()
        .filter(|&p| dist(p, b.center) < b.radius)
        .collect();
    beta_inf_points(&inside, b.radius, dim)
}

/// Same as [`beta_inf`] with the ball intersection already extracted.
pub fn beta_inf_points(
    inside: &[Point],
    radius: f64,
    dim: usize,
) -> Result<(f64, Hyperplane), FlatnessError> {
    if inside.is_empty() {
        return Err(FlatnessError::EmptyIntersection);
    }
    let (w, plane) = if dim == 2 {
        min_width_2d(inside)
    } else {
        min_width_3d(inside)
    };
    Ok(((w / radius).min(1.0), plane))
}

/// `Theta_mu(B) = mu(B) / rad(B)^n`.
pub fn theta_density(mu: &WeightedCloud, b: &Ball) -> f64 {
    mu.mu_ball(b) / b.radius.powi(mu.dim as i32 - 1)
}

/// Good ball: density at least `theta` and best-plane direction within
/// angle `alpha` of the reference plane.
pub fn ball_is_good(
    mu: &WeightedCloud,
    e: &[Point],
    b: &Ball,
    theta: f64,
    alpha: f64,
    l_ref: &Hyperplane,
) -> bool {
    if theta_density(mu, b) < theta {
        return false;
    }
    match beta_inf(e, b, mu.dim) {
        Ok((_, l)) => l.angle(l_ref) <= alpha,
        Err(_) => false,
    }
}

/// Geometric radius grid with factor `2^{1/4}` from `r_min` up to
/// `50 r0` (both clipped in).
pub fn vg_radius_grid(r_min: f64, r0: f64) -> Vec<f64> {
    let top = 50.0 * r0;
    assert!(r_min > 0.0 && r_min < top);
    let f = 2.0_f64.powf(0.25);
    let mut grid = vec![];
    let mut r = r_min;
    while r < top {
        grid.push(r);
        r *= f;
    }
    grid.push(top);
    grid
}

/// Stopping height `h(x)`: the smallest grid radius `r` such that
/// `B(x, s)` is good for every grid radius `s in [r, 50 r0]`; `+inf` when
/// even the top ball is bad.
pub fn stopping_height(
    mu: &WeightedCloud,
    e: &[Point],
    x: Point,
    theta: f64,
    alpha: f64,
    l_ref: &Hyperplane,
    radius_grid: &[f64],
) -> f64 {
    let mut h = f64::INFINITY;
    for &r in radius_grid.iter().rev() {
        let b = Ball { center: x, radius: r };
        if ball_is_good(mu, e, &b, theta, alpha, l_ref) {
            h = r;
        } else {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn ball(c: Point, r: f64) -> Ball {
        Ball { center: c, radius: r }
    }

    #[test]
    fn collinear_beta_zero() {
        let e: Vec<Point> = (0..20).map(|i| [i as f64 * 0.05, 0.0, 0.0]).collect();
        let (b, l) = beta_inf(&e, &ball([0.5, 0.0, 0.0], 1.0), 2).unwrap();
        assert!(b < 1e-12);
        assert!(l.normal[1].abs() > 0.999);
    }

    #[test]
    fn triangle_matches_brute_force() {
        let e: Vec<Point> = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.3, 0.0]];
        let b = ball([0.5, 0.0, 0.0], 1.0);
        let (beta, _) = beta_inf(&e, &b, 2).unwrap();
        // brute force over 10^5 directions
        let mut brute = f64::INFINITY;
        for k in 0..100_000 {
            let t = k as f64 * std::f64::consts::PI / 100_000.0;
            let n = [-t.sin(), t.cos(), 0.0];
            let (w, _) = half_width(&e, n);
            brute = brute.min(w);
        }
        assert!((beta - brute / b.radius).abs() < 1e-4, "{beta} vs {brute}");
    }

    #[test]
    fn perturbed_grid_beta_bounded() {
        let delta = 0.01;
        let mut rng = SplitMix64::new(5);
        let e: Vec<Point> = (0..50)
            .map(|i| {
                [
                    -0.9 + i as f64 * 0.036,
                    delta * (2.0 * rng.next_f64() - 1.0),
                    0.0,
                ]
            })
            .collect();
        let (beta, _) = beta_inf(&e, &ball([0.0; 3], 1.0), 2).unwrap();
        assert!(beta <= delta + 1e-12);
    }

    #[test]
    fn empty_intersection_error() {
        let e: Vec<Point> = vec![[10.0, 0.0, 0.0]];
        assert!(matches!(
            beta_inf(&e, &ball([0.0; 3], 1.0), 2),
            Err(FlatnessError::EmptyIntersection)
        ));
    }

    #[test]
    fn beta3d_plane_points() {
        let mut rng = SplitMix64::new(9);
        let e: Vec<Point> = (0..40)
            .map(|_| {
                [
                    rng.next_f64() - 0.5,
                    rng.next_f64() - 0.5,
                    0.02 * (rng.next_f64() - 0.5),
                ]
            })
            .collect();
        let (beta, l) = beta_inf(&e, &ball([0.0; 3], 1.0), 3).unwrap();
        assert!(beta <= 0.011, "beta = {beta}");
        assert!(l.normal[2].abs() > 0.99);
    }

    #[test]
    fn beta3d_small_case_exact_tetra() {
        // regular-ish tetrahedron: min width equals brute force
        let e: Vec<Point> = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, 0.9, 0.0],
            [0.5, 0.3, 0.4],
        ];
        let b = ball([0.5, 0.3, 0.1], 1.0);
        let (beta, _) = beta_inf(&e, &b, 3).unwrap();
        let dirs = SphereSample::fibonacci([0.0; 3], 1.0, 200_000);
        let mut brute = f64::INFINITY;
        for &n in &dirs.nodes {
            let (w, _) = half_width(&e, n);
            brute = brute.min(w);
        }
        assert!(beta <= brute / b.radius + 1e-9, "{beta} vs {brute}");
        assert!((beta - brute / b.radius).abs() < 1e-3);
    }

    #[test]
    fn density_and_good_ball() {
        let pts: Vec<Point> = (0..101).map(|i| [-1.0 + i as f64 * 0.02, 0.0, 0.0]).collect();
        let mu = WeightedCloud::uniform(2, pts.clone()).unwrap();
        let b = ball([0.0; 3], 1.0);
        let th = theta_density(&mu, &b);
        assert!(th > 0.9); // ~99 of 101 points inside, radius 1
        let l0 = Hyperplane {
            anchor: [0.0; 3],
            normal: [0.0, 1.0, 0.0],
        };
        assert!(ball_is_good(&mu, &pts, &b, 0.5, 0.1, &l0));
        // ball missing E
        assert!(!ball_is_good(&mu, &pts, &ball([0.0, 5.0, 0.0], 0.5), 0.01, 0.1, &l0));
        // low density threshold
        assert!(!ball_is_good(&mu, &pts, &b, 10.0, 0.1, &l0));
    }

    #[test]
    fn stopping_height_flat_cloud() {
        let pts: Vec<Point> = (0..2001)
            .map(|i| [-10.0 + i as f64 * 0.01, 0.0, 0.0])
            .collect();
        let mu = WeightedCloud::uniform(2, pts.clone()).unwrap();
        let l0 = Hyperplane {
            anchor: [0.0; 3],
            normal: [0.0, 1.0, 0.0],
        };
        let grid = vg_radius_grid(0.05, 0.1); // up to 5.0
        let h = stopping_height(&mu, &pts, [0.0; 3], 1e-4, 0.1, &l0, &grid);
        assert_eq!(h, grid[0]);
    }
}
