//! Stopping-time corona construction: given a measure-with-growth cloud
//! concentrated near a flat set in the plane, build the Lipschitz graph
//! approximation, the Whitney family it rides on, and the Z / LD / BA
//! classification of the base points. Also houses the dense dyadic
//! interval search used by the corkscrew argument.

use crate::cloud::WeightedCloud;
use crate::flatness::beta_inf;
use crate::geom::{dot, sub, Ball, Hyperplane, Point};
use crate::region::PlFunction;
use crate::whitney::{whitney, Whitney};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoronaError {
    #[error("base ball density {0} is below the stopping threshold {1}")]
    DensityTooLow(f64, f64),
    #[error("the corona construction requires a planar cloud (dim = 2)")]
    UnsupportedDimension,
    #[error(transparent)]
    Flatness(#[from] crate::flatness::FlatnessError),
}

/// Classification of a base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoronaLabel {
    /// Very good at every grid scale: the point is captured by the graph.
    Z,
    /// Stopped with low density.
    Ld,
    /// Stopped with density but a big-angle / non-flat obstruction.
    Ba,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoronaParams {
    /// Density stopping threshold.
    pub theta: f64,
    /// Angle stopping threshold (radians).
    pub alpha: f64,
    /// Flatness scale recorded with the run (enters the reported
    /// graph-distance constant, not the stopping rule).
    pub eps: f64,
    /// Geometric factor of the radius grid.
    pub radius_factor: f64,
    /// Lower end of the radius grid as a fraction of `rad(B0)`.
    pub r_min_frac: f64,
    /// Nodes of the vertical segment grid used by the projected gauge `D`.
    pub t_grid: usize,
    /// Breakpoints of the exported graph function.
    pub graph_nodes: usize,
    /// Whitney recursion floor, in levels below `log2(rad(B0))`.
    pub whitney_depth: i32,
}

impl Default for CoronaParams {
    fn default() -> Self {
        CoronaParams {
            theta: 0.01,
            alpha: 0.1,
            eps: 0.01,
            radius_factor: 2.0_f64.powf(0.25),
            r_min_frac: 0.02,
            t_grid: 65,
            graph_nodes: 1024,
            whitney_depth: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoronaStats {
    pub mu_e0: f64,
    pub mu_z: f64,
    pub mu_ld: f64,
    pub mu_ba: f64,
    pub slope: f64,
    /// max over Z points of `dist(x, graph) / (eps * d(x))`, the empirical
    /// constant of the graph-distance bound (0 when no Z point has
    /// positive gauge).
    pub graph_dist_const: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoronaResult {
    pub base_ball: Ball,
    pub l0: Hyperplane,
    /// Frame of the construction: `origin + s*u + t*v` with `v = l0.normal`.
    pub origin: Point,
    pub u: Point,
    pub v: Point,
    /// Graph `t = A(s)` in frame coordinates.
    pub graph: PlFunction,
    pub whitney: Whitney,
    /// Label of every base point (index-aligned with `e0`).
    pub labels: Vec<CoronaLabel>,
    /// Indices into the cloud of the points of `E0 = E n B0`.
    pub e0: Vec<usize>,
    /// Stopping height per cloud point (frame grid radii; `inf` if the
    /// top ball is already bad).
    pub h: Vec<f64>,
    /// Regularized gauge `d` per cloud point.
    pub d: Vec<f64>,
    pub radius_grid: Vec<f64>,
    /// Projected gauge table `(s, t_offset, h)` in frame coordinates,
    /// sorted by `s`; `projected_gauge` queries it.
    pub proj: Vec<(f64, f64, f64)>,
    pub params: CoronaParams,
    pub stats: CoronaStats,
}

/// Frame coordinates of all points: `s` along the plane, `t` across.
fn frame_coords(points: &[Point], origin: Point, u: Point, v: Point) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|&p| {
            let q = sub(p, origin);
            (dot(q, u), dot(q, v))
        })
        .collect()
}

/// Exact minimal width (half) and normal angle (vs the `t` axis) of a set
/// of frame points sorted by `(s, t)`, via monotone chain + edge scan.
fn width_and_angle(sorted: &[(f64, f64)]) -> (f64, f64) {
    let m = sorted.len();
    if m <= 1 {
        return (0.0, 0.0);
    }
    let turn = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * m);
    for &p in sorted {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len();
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() > lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() <= 2 {
        // collinear: width 0, direction along the segment
        let a = sorted[0];
        let b = sorted[m - 1];
        let ang = if (b.0 - a.0).abs() + (b.1 - a.1).abs() == 0.0 {
            0.0
        } else {
            // normal of the spanning direction vs (0,1)
            let d = ((b.1 - a.1).atan2(b.0 - a.0)).abs();
            d.min(std::f64::consts::PI - d)
        };
        return (0.0, ang);
    }
    // rotating calipers: the vertex farthest from each edge advances
    // monotonically around the hull, so the scan is linear
    let h = hull.len();
    let cross = |a: (f64, f64), b: (f64, f64), p: (f64, f64)| {
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
    };
    let mut best = (f64::INFINITY, 0.0);
    let mut j = 1usize;
    for i in 0..h {
        let a = hull[i];
        let b = hull[(i + 1) % h];
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let el = ex.hypot(ey);
        if el == 0.0 {
            continue;
        }
        let mut guard = 0;
        while guard < 2 * h {
            let nj = (j + 1) % h;
            if cross(a, b, hull[nj]).abs() > cross(a, b, hull[j]).abs() {
                j = nj;
                guard += 1;
            } else {
                break;
            }
        }
        let w = cross(a, b, hull[j]).abs() / el / 2.0;
        if w < best.0 {
            // angle of the edge normal against the t axis (0, 1)
            let ny = ex / el;
            let ang = ny.abs().clamp(-1.0, 1.0).acos();
            best = (w, ang);
        }
    }
    best
}

/// Best affine fit line of the subset: slope and intercept in frame
/// coordinates of the minimal-width midline.
fn midline(sorted: &[(f64, f64)]) -> (f64, f64) {
    let m = sorted.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    if m == 1 {
        return (0.0, sorted[0].1);
    }
    // direction of minimal width via a local rescan
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let hull_pts = sorted;
    for i in 0..hull_pts.len() {
        for j in (i + 1)..hull_pts.len() {
            let (ex, ey) = (
                hull_pts[j].0 - hull_pts[i].0,
                hull_pts[j].1 - hull_pts[i].1,
            );
            let el = ex.hypot(ey);
            if el == 0.0 || ex.abs() < 1e-12 * el {
                continue;
            }
            let slope = ey / ex;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &p in hull_pts {
                let c = p.1 - slope * p.0;
                lo = lo.min(c);
                hi = hi.max(c);
            }
            let w = (hi - lo) / 2.0;
            if w < best.0 {
                best = (w, slope, (hi + lo) / 2.0);
            }
        }
    }
    if best.0.is_finite() {
        (best.1, best.2)
    } else {
        (0.0, sorted[0].1)
    }
}

struct GoodScanner {
    sorted_coords: Vec<(f64, f64)>,
    weights_sorted: Vec<f64>,
    n_exp: i32,
    total_mass: f64,
    global_angle: f64,
}

impl GoodScanner {
    fn new(mu: &WeightedCloud, fr: &[(f64, f64)]) -> Self {
        let mut order: Vec<usize> = (0..fr.len()).collect();
        order.sort_by(|&a, &b| fr[a].partial_cmp(&fr[b]).unwrap());
        let sorted_coords: Vec<(f64, f64)> = order.iter().map(|&i| fr[i]).collect();
        let weights_sorted: Vec<f64> = order.iter().map(|&i| mu.weights[i]).collect();
        let (_global_width, global_angle) = width_and_angle(&sorted_coords);
        GoodScanner {
            sorted_coords,
            weights_sorted,
            n_exp: mu.dim as i32 - 1,
            total_mass: mu.mass(),
            global_angle,
        }
    }

    /// Subset of frame points in the open ball around frame center
    /// `(cs, ct)` of radius `r`, in sorted order, with its mass.
    fn subset(&self, cs: f64, ct: f64, r: f64, out: &mut Vec<(f64, f64)>) -> f64 {
        out.clear();
        let lo = self
            .sorted_coords
            .partition_point(|&(s, _)| s <= cs - r);
        let mut mass = 0.0;
        for k in lo..self.sorted_coords.len() {
            let (s, t) = self.sorted_coords[k];
            if s >= cs + r {
                break;
            }
            let ds = s - cs;
            let dt = t - ct;
            if ds * ds + dt * dt < r * r {
                out.push((s, t));
                mass += self.weights_sorted[k];
            }
        }
        mass
    }

    /// Good-ball test at frame center `(cs, ct)` and radius `r`.
    fn good(&self, cs: f64, ct: f64, r: f64, theta: f64, alpha: f64, max_dist: f64, scratch: &mut Vec<(f64, f64)>) -> bool {
        if r >= max_dist {
            // the ball swallows the whole cloud: cached global fit
            let density = self.total_mass / r.powi(self.n_exp);
            return density >= theta && self.global_angle <= alpha;
        }
        let mass = self.subset(cs, ct, r, scratch);
        if mass / r.powi(self.n_exp) < theta {
            return false;
        }
        if scratch.is_empty() {
            return false;
        }
        let (_, ang) = width_and_angle(scratch);
        ang <= alpha
    }
}

/// Geometric radius grid used by the corona stopping time.
pub fn corona_radius_grid(params: &CoronaParams, r0: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut r = params.r_min_frac * r0;
    let top = 50.0 * r0;
    while r < top {
        grid.push(r);
        r *= params.radius_factor;
    }
    grid.push(top);
    grid
}

/// Runs the full corona pipeline on a planar cloud.
pub fn corona(
    mu: &WeightedCloud,
    b0: &Ball,
    params: &CoronaParams,
) -> Result<CoronaResult, CoronaError> {
    if mu.dim != 2 {
        return Err(CoronaError::UnsupportedDimension);
    }
    let r0 = b0.radius;
    let density0 = mu.mu_ball(b0) / r0;
    if density0 < params.theta {
        return Err(CoronaError::DensityTooLow(density0, params.theta));
    }
    let (_beta0, l0) = beta_inf(&mu.points, b0, 2)?;
    let v = l0.normal;
    let u = [v[1], -v[0], 0.0];
    // anchor the frame at the projection of the ball center onto L0
    let shift = dot(sub(b0.center, l0.anchor), v);
    let origin = [
        b0.center[0] - shift * v[0],
        b0.center[1] - shift * v[1],
        0.0,
    ];
    let fr = frame_coords(&mu.points, origin, u, v);
    let scan = GoodScanner::new(mu, &fr);
    let grid = corona_radius_grid(params, r0);

    // stopping height per point: descend from the top radius while good
    let npts = mu.len();
    let mut h = vec![f64::INFINITY; npts];
    let mut scratch: Vec<(f64, f64)> = Vec::new();
    let max_dists: Vec<f64> = fr
        .iter()
        .map(|&(cs, ct)| {
            scan.sorted_coords
                .iter()
                .map(|&(s, t)| (s - cs).hypot(t - ct))
                .fold(0.0, f64::max)
        })
        .collect();
    for i in 0..npts {
        let (cs, ct) = fr[i];
        for &r in grid.iter().rev() {
            if scan.good(cs, ct, r, params.theta, params.alpha, max_dists[i], &mut scratch) {
                h[i] = r;
            } else {
                break;
            }
        }
    }

    // labels on E0
    let e0 = mu.in_ball(b0);
    let labels: Vec<CoronaLabel> = e0
        .iter()
        .map(|&i| {
            if h[i] <= grid[0] {
                CoronaLabel::Z
            } else {
                let r = if h[i].is_finite() { h[i] } else { grid[grid.len() - 1] };
                let mass = scan.subset(fr[i].0, fr[i].1, r, &mut scratch);
                if mass / r < params.theta {
                    CoronaLabel::Ld
                } else {
                    CoronaLabel::Ba
                }
            }
        })
        .collect();

    // regularized gauge d over the cloud points (inf over the very-good
    // balls B(z, h(z)) centered at data points)
    let finite: Vec<(f64, f64, f64)> = {
        let mut f: Vec<(f64, f64, f64)> = (0..npts)
            .filter(|&j| h[j].is_finite())
            .map(|j| (fr[j].0, fr[j].1, h[j]))
            .collect();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        f
    };
    let d_query_full = |qs: f64, qt: f64| -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut arg = usize::MAX;
        if finite.is_empty() {
            return (best, arg);
        }
        let start = finite.partition_point(|&(s, _, _)| s < qs);
        let (mut left, mut right) = (start, start);
        loop {
            let cand_left = if left > 0 { Some(left - 1) } else { None };
            let cand_right = if right < finite.len() { Some(right) } else { None };
            let pick = match (cand_left, cand_right) {
                (None, None) => break,
                (Some(l), None) => { left -= 1; l }
                (None, Some(r)) => { right += 1; r }
                (Some(l), Some(r)) => {
                    if (qs - finite[l].0).abs() <= (finite[r].0 - qs).abs() {
                        left -= 1;
                        l
                    } else {
                        right += 1;
                        r
                    }
                }
            };
            let (s, t, hz) = finite[pick];
            if (s - qs).abs() >= best {
                break;
            }
            let v = (s - qs).hypot(t - qt) + hz;
            if v < best {
                best = v;
                arg = pick;
            }
        }
        (best, arg)
    };
    let d: Vec<f64> = fr.iter().map(|&(s, t)| d_query_full(s, t).0).collect();

    // projected gauge D over the base plane: the vertical segment grid
    // contributes, per center z, its minimal offset to the grid
    let t_span = 2.0 * r0;
    let m = params.t_grid.max(2);
    let t_off = |tz: f64| -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..m {
            let tg = -t_span + 2.0 * t_span * k as f64 / (m - 1) as f64;
            best = best.min((tz - tg).abs());
        }
        best
    };
    let proj: Vec<(f64, f64, f64)> = {
        let mut p: Vec<(f64, f64, f64)> = finite
            .iter()
            .map(|&(s, t, hz)| (s, t_off(t), hz))
            .collect();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    };
    let d_proj = |qs: f64| -> (f64, usize) { proj_query(&proj, qs) };

    // Whitney family over the 13 r0 window in the base coordinate
    let min_level = (r0.log2().floor() as i32) - params.whitney_depth;
    let w = whitney(
        1,
        [-13.0 * r0, 0.0],
        [13.0 * r0, 0.0],
        min_level,
        |p| d_proj(p[0]).0,
    );

    // per-cube approximating line from the very-good ball at the gauge
    // minimizer
    let mut line_cache: std::collections::HashMap<usize, (f64, f64)> =
        std::collections::HashMap::new();
    let mut cube_line: Vec<(f64, f64)> = Vec::with_capacity(w.cubes.len());
    for c in &w.cubes {
        let (_, arg) = d_proj(c.center()[0]);
        if arg == usize::MAX {
            cube_line.push((0.0, 0.0));
            continue;
        }
        let line = *line_cache.entry(arg).or_insert_with(|| {
            let (s, _e, hz) = proj[arg];
            // recover the frame point: search finite for matching s
            let k = finite.partition_point(|&(fs, _, _)| fs < s);
            let k = k.min(finite.len() - 1);
            let (zs, zt, zh) = finite[k];
            let _ = hz;
            let mut sub = Vec::new();
            scan.subset(zs, zt, zh.max(grid[0]), &mut sub);
            midline(&sub)
        });
        cube_line.push(line);
    }

    // extension A on the export grid
    let gn = params.graph_nodes.max(2);
    let mut vals: Vec<Option<f64>> = Vec::with_capacity(gn);
    let s_lo = -13.0 * r0;
    let s_hi = 13.0 * r0;
    for k in 0..gn {
        let s = s_lo + (s_hi - s_lo) * k as f64 / (gn - 1) as f64;
        let pou = w.pou([s, 0.0]);
        if pou.is_empty() {
            vals.push(None);
        } else {
            let mut a = 0.0;
            for (i, phi) in pou {
                let (mi, ci) = cube_line[i];
                a += phi * (mi * s + ci);
            }
            vals.push(Some(a));
        }
    }
    // fill undefined nodes by nearest defined neighbors (linear between)
    let filled = fill_gaps(&vals);
    let breakpoints: Vec<(f64, f64)> = (0..gn)
        .map(|k| {
            (
                s_lo + (s_hi - s_lo) * k as f64 / (gn - 1) as f64,
                filled[k],
            )
        })
        .collect();
    let graph = PlFunction::new(breakpoints).expect("graph grid is strictly increasing");
    let slope = graph.lipschitz();

    // stats
    let mut mu_z = 0.0;
    let mut mu_ld = 0.0;
    let mut mu_ba = 0.0;
    let mut gconst: f64 = 0.0;
    for (k, &i) in e0.iter().enumerate() {
        let wgt = mu.weights[i];
        match labels[k] {
            CoronaLabel::Z => {
                mu_z += wgt;
                let dv = d[i];
                if dv > 0.0 && params.eps > 0.0 {
                    let dist_graph = (fr[i].1 - graph.eval(fr[i].0)).abs();
                    gconst = gconst.max(dist_graph / (params.eps * dv));
                }
            }
            CoronaLabel::Ld => mu_ld += wgt,
            CoronaLabel::Ba => mu_ba += wgt,
        }
    }
    let stats = CoronaStats {
        mu_e0: mu_z + mu_ld + mu_ba,
        mu_z,
        mu_ld,
        mu_ba,
        slope,
        graph_dist_const: gconst,
    };
    Ok(CoronaResult {
        base_ball: *b0,
        l0,
        origin,
        u,
        v,
        graph,
        whitney: w,
        labels,
        e0,
        h,
        d,
        radius_grid: grid,
        proj,
        params: params.clone(),
        stats,
    })
}

/// Nearest-point query against a projected gauge table sorted by `s`:
/// returns `min_z (|qs - s_z| + t_offset_z contribution + h_z)` via the
/// pruned expanding-window scan, together with the argmin index.
pub fn proj_query(proj: &[(f64, f64, f64)], qs: f64) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = usize::MAX;
    if proj.is_empty() {
        return (best, arg);
    }
    let start = proj.partition_point(|&(s, _, _)| s < qs);
    let (mut left, mut right) = (start, start);
    loop {
        let cand_left = if left > 0 { Some(left - 1) } else { None };
        let cand_right = if right < proj.len() { Some(right) } else { None };
        let pick = match (cand_left, cand_right) {
            (None, None) => break,
            (Some(l), None) => { left -= 1; l }
            (None, Some(r)) => { right += 1; r }
            (Some(l), Some(r)) => {
                if (qs - proj[l].0).abs() <= (proj[r].0 - qs).abs() {
                    left -= 1;
                    l
                } else {
                    right += 1;
                    r
                }
            }
        };
        let (s, e, hz) = proj[pick];
        if (s - qs).abs() >= best {
            break;
        }
        let v = (s - qs).hypot(e) + hz;
        if v < best {
            best = v;
            arg = pick;
        }
    }
    (best, arg)
}

/// The projected regularized gauge `D` of a finished construction.
pub fn projected_gauge(res: &CoronaResult, s: f64) -> f64 {
    proj_query(&res.proj, s).0
}

fn fill_gaps(vals: &[Option<f64>]) -> Vec<f64> {
    let n = vals.len();
    let mut out = vec![0.0; n];
    let defined: Vec<usize> = (0..n).filter(|&i| vals[i].is_some()).collect();
    if defined.is_empty() {
        return out;
    }
    for i in 0..n {
        match vals[i] {
            Some(v) => out[i] = v,
            None => {
                let right = defined.partition_point(|&j| j < i);
                let lo = if right > 0 { Some(defined[right - 1]) } else { None };
                let hi = defined.get(right).copied();
                out[i] = match (lo, hi) {
                    (Some(a), Some(b)) => {
                        let va = vals[a].unwrap();
                        let vb = vals[b].unwrap();
                        va + (vb - va) * (i - a) as f64 / (b - a) as f64
                    }
                    (Some(a), None) => vals[a].unwrap(),
                    (None, Some(b)) => vals[b].unwrap(),
                    (None, None) => 0.0,
                };
            }
        }
    }
    out
}

/// Checks the projection inequality
/// `|t_x - t_y| <= 6 alpha |s_x - s_y| + 4 d(x) + 4 d(y) + tol`
/// on sampled point pairs; returns the worst violation (<= 0 means pass).
pub fn piperp_violation(res: &CoronaResult, mu: &WeightedCloud, pairs: &[(usize, usize)]) -> f64 {
    let fr = frame_coords(&mu.points, res.origin, res.u, res.v);
    let mut worst = f64::NEG_INFINITY;
    for &(i, j) in pairs {
        let lhs = (fr[i].1 - fr[j].1).abs();
        let rhs = 6.0 * res.params.alpha * (fr[i].0 - fr[j].0).abs()
            + 4.0 * res.d[i]
            + 4.0 * res.d[j];
        worst = worst.max(lhs - rhs);
    }
    worst
}

/// Dense dyadic subinterval search (Top/Next recursion). `g` is a union
/// of disjoint intervals inside `i = (a, b)`; requires `|G| >= c2 |I|`.
/// Returns `j` such that every dyadic descendant of `j` with length
/// `>= theta * len(j)` carries `G`-density at least `c2 / 2`.
pub fn dense_dyadic_interval(
    i: (f64, f64),
    g: &[(f64, f64)],
    c2: f64,
    theta: f64,
) -> Result<(f64, f64), DenseIntervalError> {
    let len = i.1 - i.0;
    if !(len > 0.0) || !(c2 > 0.0 && c2 <= 1.0) || !(theta > 0.0 && theta <= 0.5) {
        return Err(DenseIntervalError::BadParameters);
    }
    let gmass = |l: (f64, f64)| -> f64 {
        g.iter()
            .map(|&(a, b)| (b.min(l.1) - a.max(l.0)).max(0.0))
            .sum()
    };
    if gmass(i) < c2 * len - 1e-12 * len {
        return Err(DenseIntervalError::PreconditionViolated);
    }
    let n_theta = (-theta.log2()).ceil() as u32;
    let is_ld = |l: (f64, f64)| gmass(l) <= 0.5 * c2 * (l.1 - l.0);
    // good: no LD descendant within the first n_theta generations
    let is_good = |j: (f64, f64)| -> bool {
        let mut gen = vec![j];
        for _ in 0..=n_theta {
            if gen.iter().any(|&l| is_ld(l)) {
                return false;
            }
            gen = gen
                .iter()
                .flat_map(|&(a, b)| {
                    let mid = 0.5 * (a + b);
                    [(a, mid), (mid, b)]
                })
                .collect();
        }
        true
    };
    // Top levels: descendants n_theta generations down that are not inside
    // any LD interval of the intermediate generations
    let mut tops = vec![i];
    for _iter in 0..64 {
        let mut next_tops = Vec::new();
        for &j in &tops {
            if is_good(j) {
                return Ok(j);
            }
            // expand to generation n_theta, pruning below LD intervals
            let mut gen = vec![j];
            for _ in 0..n_theta {
                let mut nxt = Vec::new();
                for &(a, b) in &gen {
                    if is_ld((a, b)) {
                        continue; // prune: descendants of LD intervals leave Next(J)
                    }
                    let mid = 0.5 * (a + b);
                    nxt.push((a, mid));
                    nxt.push((mid, b));
                }
                gen = nxt;
            }
            next_tops.extend(gen.into_iter().filter(|&l| !is_ld(l)));
        }
        if next_tops.is_empty() {
            break;
        }
        tops = next_tops;
    }
    Err(DenseIntervalError::NotFound)
}

#[derive(Debug, Error)]
pub enum DenseIntervalError {
    #[error("interval, density or theta parameters out of range")]
    BadParameters,
    #[error("G does not fill the required c2 fraction of I")]
    PreconditionViolated,
    #[error("recursion budget exhausted without a dense interval")]
    NotFound,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn graph_cloud(n: usize, slope: f64, seed: u64) -> WeightedCloud {
        let mut rng = SplitMix64::new(seed);
        let pts: Vec<Point> = (0..n)
            .map(|_| {
                let s = 2.0 * rng.next_f64() - 1.0;
                [s, slope * (s * 7.0).sin() / 7.0 * 1.0, 0.0]
            })
            .collect();
        WeightedCloud::uniform(2, pts).unwrap()
    }

    #[test]
    fn exact_line_all_z() {
        let pts: Vec<Point> = (0..400).map(|k| [-1.0 + k as f64 / 200.0, 0.0, 0.0]).collect();
        let mu = WeightedCloud::uniform(2, pts).unwrap();
        let b0 = Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let res = corona(&mu, &b0, &CoronaParams::default()).unwrap();
        assert!(res.labels.iter().all(|&l| l == CoronaLabel::Z));
        assert_eq!(res.stats.mu_ld, 0.0);
        assert_eq!(res.stats.mu_ba, 0.0);
        // graph hugs the line
        for k in 0..50 {
            let s = -0.9 + 1.8 * k as f64 / 49.0;
            assert!(res.graph.eval(s).abs() < 1e-9, "A({s}) = {}", res.graph.eval(s));
        }
    }

    #[test]
    fn low_density_rejected() {
        let mu = WeightedCloud::uniform(2, vec![[0.0; 3]]).unwrap();
        let b0 = Ball {
            center: [5.0, 0.0, 0.0],
            radius: 0.1,
        };
        assert!(matches!(
            corona(&mu, &b0, &CoronaParams::default()),
            Err(CoronaError::DensityTooLow(_, _))
        ));
    }

    #[test]
    fn shallow_graph_mostly_z() {
        let mu = graph_cloud(1500, 0.03, 11);
        let b0 = Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let res = corona(&mu, &b0, &CoronaParams::default()).unwrap();
        assert!(res.stats.mu_z >= 0.9 * res.stats.mu_e0, "{:?}", res.stats);
        assert!(res.stats.slope <= 0.5, "slope {}", res.stats.slope);
    }

    #[test]
    fn piperp_holds_on_pairs() {
        let mu = graph_cloud(800, 0.03, 3);
        let b0 = Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let res = corona(&mu, &b0, &CoronaParams::default()).unwrap();
        let mut rng = SplitMix64::new(77);
        let pairs: Vec<(usize, usize)> = (0..2000)
            .map(|_| {
                (
                    (rng.next_f64() * mu.len() as f64) as usize % mu.len(),
                    (rng.next_f64() * mu.len() as f64) as usize % mu.len(),
                )
            })
            .collect();
        assert!(piperp_violation(&res, &mu, &pairs) <= 1e-9);
    }

    #[test]
    fn spike_goes_to_ba() {
        let mut pts: Vec<Point> = (0..900)
            .map(|k| [-1.0 + k as f64 / 450.0, 0.0, 0.0])
            .collect();
        // orthogonal spike at the origin
        for k in 0..100 {
            pts.push([0.0, 0.02 + k as f64 * 0.005, 0.0]);
        }
        let mu = WeightedCloud::uniform(2, pts).unwrap();
        let b0 = Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let res = corona(&mu, &b0, &CoronaParams::default()).unwrap();
        let mut spike_ba = 0;
        let mut spike_total = 0;
        for (k, &i) in res.e0.iter().enumerate() {
            if mu.points[i][1] > 0.01 {
                spike_total += 1;
                if res.labels[k] == CoronaLabel::Ba {
                    spike_ba += 1;
                }
            }
        }
        assert!(spike_total > 0);
        assert!(
            spike_ba as f64 >= 0.8 * spike_total as f64,
            "{spike_ba}/{spike_total}"
        );
    }

    #[test]
    fn dense_interval_full_and_half() {
        let i = (0.0, 1.0);
        let j = dense_dyadic_interval(i, &[(0.0, 1.0)], 0.9, 0.25).unwrap();
        assert_eq!(j, i);
        // left half only
        let g = [(0.0, 0.5)];
        let j = dense_dyadic_interval(i, &g, 0.5, 0.5).unwrap();
        // verify the postcondition by exhaustive descendant scan
        let lenj = j.1 - j.0;
        let mut gen = vec![j];
        while gen[0].1 - gen[0].0 >= 0.5 * lenj {
            for &(a, b) in &gen {
                let mass: f64 = g
                    .iter()
                    .map(|&(ga, gb)| (gb.min(b) - ga.max(a)).max(0.0))
                    .sum();
                assert!(mass >= 0.25 * (b - a) - 1e-12, "descendant ({a},{b})");
            }
            gen = gen
                .iter()
                .flat_map(|&(a, b)| {
                    let m = 0.5 * (a + b);
                    [(a, m), (m, b)]
                })
                .collect();
        }
        assert!(lenj >= 0.03);
    }

    #[test]
    fn dense_interval_precondition() {
        assert!(matches!(
            dense_dyadic_interval((0.0, 1.0), &[(0.0, 0.2)], 0.5, 0.25),
            Err(DenseIntervalError::PreconditionViolated)
        ));
    }
}
