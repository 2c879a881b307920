//! Riesz s-capacities and logarithmic capacity of finite nets by
//! energy minimization, plus the derived quantities: CDC margins, thick
//! points, the epsilon_s coefficient, and the spherical slicing check.

use crate::content::choquet_integral;
use crate::geom::{dist, sub, HalfSpace, Point};
use crate::region::{Label, RegionPair};
use crate::sphere::SphereSample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("masses must be nonnegative and sum to 1 (got {0})")]
    BadMasses(f64),
    #[error("mollification length must be positive")]
    BadMollification,
    #[error("the exponent s must lie in (0, dim)")]
    BadExponent,
}

/// A discrete probability measure with a mollified Riesz kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub masses: Vec<f64>,
    /// Kernel truncation scale: distances are clamped below at delta.
    pub mollification: f64,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<Point>, masses: Vec<f64>, mollification: f64) -> Result<Self, CapacityError> {
        if !(mollification > 0.0) {
            return Err(CapacityError::BadMollification);
        }
        let total: f64 = masses.iter().sum();
        if masses.iter().any(|&m| m < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(CapacityError::BadMasses(total));
        }
        assert_eq!(support.len(), masses.len());
        Ok(DiscreteMeasure { support, masses, mollification })
    }

    pub fn uniform(support: Vec<Point>, mollification: f64) -> Result<Self, CapacityError> {
        let n = support.len().max(1);
        let masses = vec![1.0 / n as f64; support.len()];
        DiscreteMeasure::new(support, masses, mollification)
    }
}

/// Mollified Riesz kernel. `s = 0` is the logarithmic kernel
/// `(1/2pi) log(1/d)`; `s > 0` is `d^{-s}`, with `d = max(|x-y|, delta)`.
pub fn riesz_kernel(d: f64, s: f64, delta: f64) -> f64 {
    let d = d.max(delta);
    if s == 0.0 {
        (1.0 / d).ln() / (2.0 * std::f64::consts::PI)
    } else {
        d.powf(-s)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub self_energy: f64,
    pub cross_energy: f64,
    pub total: f64,
}

/// The s-energy of the measure, split into the diagonal (mollified
/// self-interaction) part and the off-diagonal part.
pub fn riesz_energy_breakdown(mu: &DiscreteMeasure, s: f64) -> EnergyBreakdown {
    let n = mu.support.len();
    let mut self_energy = 0.0;
    let mut cross = 0.0;
    for i in 0..n {
        self_energy += mu.masses[i] * mu.masses[i] * riesz_kernel(0.0, s, mu.mollification);
        for j in (i + 1)..n {
            let k = riesz_kernel(dist(mu.support[i], mu.support[j]), s, mu.mollification);
            cross += 2.0 * mu.masses[i] * mu.masses[j] * k;
        }
    }
    EnergyBreakdown { self_energy, cross_energy: cross, total: self_energy + cross }
}

pub fn riesz_energy(mu: &DiscreteMeasure, s: f64) -> f64 {
    riesz_energy_breakdown(mu, s).total
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub s: f64,
    /// Mollification length (half the net spacing).
    pub delta: f64,
    /// Cap_s = 1/energy for s > 0; Cap_L = exp(-2 pi * energy) for s = 0.
    pub value: f64,
    pub energy: f64,
    pub iterations: usize,
    /// Duality-gap bound on the remaining energy suboptimality.
    pub residual: f64,
    pub diverged: bool,
    pub net_size: usize,
}

impl CapacityEstimate {
    fn empty(s: f64, delta: f64) -> Self {
        CapacityEstimate {
            s,
            delta,
            value: 0.0,
            energy: f64::INFINITY,
            iterations: 0,
            residual: 0.0,
            diverged: false,
            net_size: 0,
        }
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64], out: &mut [f64]) {
    let n = v.len();
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            rho = k;
            theta = t;
        }
    }
    let _ = rho;
    for i in 0..n {
        out[i] = (v[i] - theta).max(0.0);
    }
}

/// Median nearest-neighbor distance of the net — the default notion of
/// net spacing.
pub fn net_spacing(points: &[Point]) -> f64 {
    if points.len() < 2 {
        return 1.0;
    }
    let mut nn: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| dist(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nn[nn.len() / 2]
}

/// Minimizes the mollified s-energy over probability measures on the net
/// by projected gradient with Armijo backtracking.
fn minimize_energy(points: &[Point], s: f64, delta: f64, max_iters: usize) -> CapacityEstimate {
    let n = points.len();
    if n == 0 {
        return CapacityEstimate::empty(s, delta);
    }
    // kernel matrix
    let mut k = vec![0.0f64; n * n];
    for i in 0..n {
        k[i * n + i] = riesz_kernel(0.0, s, delta);
        for j in (i + 1)..n {
            let v = riesz_kernel(dist(points[i], points[j]), s, delta);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let matvec = |m: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.resize(n, 0.0);
        for i in 0..n {
            let row = &k[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * m[j];
            }
            out[i] = acc;
        }
    };
    let mut m = vec![1.0 / n as f64; n];
    let mut km = Vec::new();
    matvec(&m, &mut km);
    let mut energy: f64 = m.iter().zip(&km).map(|(a, b)| a * b).sum();
    let mut step = 1.0 / (1.0 + k.iter().cloned().fold(0.0, f64::max).abs());
    let mut iters = 0;
    let mut diverged = false;
    let mut trial = vec![0.0; n];
    let mut ktrial = Vec::new();
    for _ in 0..max_iters {
        iters += 1;
        // gradient = 2 K m
        let grad: Vec<f64> = km.iter().map(|&v| 2.0 * v).collect();
        let mut accepted = false;
        let mut new_energy = energy;
        for _ in 0..60 {
            let cand: Vec<f64> = (0..n).map(|i| m[i] - step * grad[i]).collect();
            project_simplex(&cand, &mut trial);
            matvec(&trial, &mut ktrial);
            let e: f64 = trial.iter().zip(&ktrial).map(|(a, b)| a * b).sum();
            let decrease: f64 = (0..n)
                .map(|i| {
                    let d = trial[i] - m[i];
                    d * d
                })
                .sum::<f64>()
                / step;
            if e <= energy - 1e-4 * decrease {
                m.copy_from_slice(&trial);
                std::mem::swap(&mut km, &mut ktrial);
                new_energy = e;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
        if new_energy > energy + 1e-12 * energy.abs() {
            diverged = true;
            break;
        }
        let drop = energy - new_energy;
        energy = new_energy;
        if drop < 1e-8 * (energy.abs() + 1e-6) {
            break;
        }
    }
    // duality gap bound: energy - E* <= g.m - min_i g_i
    let grad: Vec<f64> = km.iter().map(|&v| 2.0 * v).collect();
    let gm: f64 = grad.iter().zip(&m).map(|(a, b)| a * b).sum();
    let gmin = grad.iter().cloned().fold(f64::INFINITY, f64::min);
    let residual = (gm - gmin).max(0.0);
    let value = if s == 0.0 {
        (-2.0 * std::f64::consts::PI * energy).exp()
    } else {
        1.0 / energy
    };
    CapacityEstimate { s, delta, value, energy, iterations: iters, residual, diverged, net_size: n }
}

/// Riesz s-capacity of a finite net. `spacing <= 0` lets the net spacing
/// be measured from the points; the kernel is mollified at spacing / 2.
pub fn capacity_s(points: &[Point], s: f64, spacing: f64) -> Result<CapacityEstimate, CapacityError> {
    if !(s > 0.0 && s < 4.0) {
        return Err(CapacityError::BadExponent);
    }
    if points.is_empty() {
        return Ok(CapacityEstimate::empty(s, spacing.max(0.0)));
    }
    let sp = if spacing > 0.0 { spacing } else { net_spacing(points) };
    Ok(minimize_energy(points, s, sp / 2.0, 10_000))
}

/// Logarithmic capacity `Cap_L = exp(-2 pi inf I_0)` of a finite net.
pub fn capacity_log(points: &[Point], spacing: f64) -> CapacityEstimate {
    if points.is_empty() {
        return CapacityEstimate::empty(0.0, spacing.max(0.0));
    }
    let sp = if spacing > 0.0 { spacing } else { net_spacing(points) };
    minimize_energy(points, 0.0, sp / 2.0, 10_000)
}

/// Grid net of the complement `B(x,r) \ (Omega+ u Omega-)`.
pub fn complement_net(pair: &RegionPair, x: Point, r: f64, per_axis: usize) -> (Vec<Point>, f64) {
    let n = per_axis.max(2);
    let step = 2.0 * r / (n - 1) as f64;
    let mut pts = Vec::new();
    let axes: usize = pair.dim;
    let idx_max: Vec<usize> = vec![n; axes];
    let mut idx = vec![0usize; axes];
    loop {
        let mut p = x;
        for k in 0..axes {
            p[k] = x[k] - r + idx[k] as f64 * step;
        }
        if dist(p, x) <= r && pair.classify(p) == Label::Free {
            pts.push(p);
        }
        // odometer
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < idx_max[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == axes {
                return (pts, step);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdcReport {
    pub holds: bool,
    pub margin: f64,
    pub capacity: CapacityEstimate,
    pub threshold: f64,
}

/// Capacity density condition `Cap_s(B(x,r) \ Omega) >= c r^s`.
pub fn cdc_check(
    pair: &RegionPair,
    x: Point,
    r: f64,
    s: f64,
    c: f64,
    per_axis: usize,
) -> Result<CdcReport, CapacityError> {
    let (net, step) = complement_net(pair, x, r, per_axis);
    let cap = if net.len() < 2 {
        // a degenerate net stands for (at most) a point, which has zero
        // s-capacity for s > 0
        let mut e = CapacityEstimate::empty(s, step / 2.0);
        e.net_size = net.len();
        e
    } else {
        capacity_s(&net, s, step)?
    };
    let threshold = c * r.powf(s);
    let margin = cap.value - threshold;
    Ok(CdcReport { holds: margin >= 0.0, margin, capacity: cap, threshold })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThickPoint {
    pub point: Point,
    /// +1 / -1 for the H-side of the sphere the point sits on.
    pub side: i8,
    /// Distance to the boundary plane of H.
    pub delta: f64,
    /// Logarithmic capacity of the probed spherical patch minus Omega^i.
    pub cap: f64,
    pub thick: bool,
    /// cap - c0 * delta (nonnegative iff thick).
    pub margin: f64,
}

/// Thick points of `S(x,r)` relative to a half-space `H` (n = 2 branch,
/// ambient dimension 3): `y` in `S_H^i \ Omega^i` is thick when
/// `Cap_L(clB(y, a delta(y)) n S(x,r) \ Omega^i) >= c0 delta(y)`.
pub fn thick_points(
    pair: &RegionPair,
    x: Point,
    r: f64,
    h: &HalfSpace,
    c0: f64,
    a: f64,
    grid: usize,
) -> Vec<ThickPoint> {
    assert_eq!(pair.dim, 3, "thick points are implemented for n = 2 only");
    assert!(a > 0.0 && a < 1.0);
    let sample = SphereSample::fibonacci(x, r, grid.max(8));
    let mut out = Vec::new();
    for &y in sample.nodes.iter() {
        let sd = h.signed_dist(y);
        let side: i8 = if sd >= 0.0 { 1 } else { -1 };
        let omega_label = if side == 1 { Label::Plus } else { Label::Minus };
        if pair.classify(y) == omega_label {
            continue; // y must avoid Omega^i
        }
        let delta = sd.abs();
        let (cap, thick, margin) = if delta == 0.0 {
            (0.0, true, 0.0) // threshold degenerates; the point set {y} suffices
        } else {
            // net of the spherical patch clB(y, a delta) n S(x,r) \ Omega^i
            let patch = spherical_patch_net(pair, x, r, y, a * delta, omega_label);
            let cap = if patch.is_empty() {
                0.0
            } else {
                capacity_log(&patch, 0.0).value
            };
            let margin = cap - c0 * delta;
            (cap, margin >= 0.0, margin)
        };
        out.push(ThickPoint { point: y, side, delta, cap, thick, margin });
    }
    out
}

/// Net of the spherical cap of chordal radius `rho` around `y` on
/// `S(x,r)`, excluding points labeled `omega_label` by the pair.
fn spherical_patch_net(
    pair: &RegionPair,
    x: Point,
    r: f64,
    y: Point,
    rho: f64,
    omega_label: Label,
) -> Vec<Point> {
    // local tangent frame at y
    let nrm = crate::geom::normalize(sub(y, x));
    let (e1, e2) = crate::geom::orthonormal_complement(nrm);
    let m = 9; // 9x9 tangent grid, reprojected to the sphere
    let mut pts = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let u = -rho + 2.0 * rho * i as f64 / (m - 1) as f64;
            let v = -rho + 2.0 * rho * j as f64 / (m - 1) as f64;
            if u * u + v * v > rho * rho {
                continue;
            }
            let q = [
                y[0] + u * e1[0] + v * e2[0],
                y[1] + u * e1[1] + v * e2[1],
                y[2] + u * e1[2] + v * e2[2],
            ];
            // reproject to the sphere
            let d = sub(q, x);
            let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if dn == 0.0 {
                continue;
            }
            let p = [x[0] + r * d[0] / dn, x[1] + r * d[1] / dn, x[2] + r * d[2] / dn];
            if dist(p, y) <= rho && pair.classify(p) != omega_label {
                pts.push(p);
            }
        }
    }
    pts
}

/// The epsilon_s coefficient: `inf_H r^{-s} int_{V(H)} (delta_L(y)/r)^{n-s}
/// dH^s_inf`, the infimum running over half-spaces with `x` on the
/// boundary. Direction search over a Fibonacci grid.
pub fn epsilon_s(
    pair: &RegionPair,
    x: Point,
    r: f64,
    s: f64,
    c0: f64,
    a: f64,
    dirs: usize,
    grid: usize,
) -> f64 {
    assert_eq!(pair.dim, 3);
    let n_exp = 2.0; // n = 2
    let dir_sample = SphereSample::fibonacci([0.0; 3], 1.0, dirs.max(6));
    let mut candidates: Vec<Point> = dir_sample.nodes.clone();
    candidates.extend_from_slice(&[
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ]);
    let mut best = f64::INFINITY;
    for nrm in candidates {
        let h = HalfSpace { anchor: x, normal: nrm };
        let tps = thick_points(pair, x, r, &h, c0, a, grid);
        let thick: Vec<Point> = tps.iter().filter(|t| t.thick).map(|t| t.point).collect();
        let val = if thick.is_empty() {
            0.0
        } else {
            // content depth tied to the thick-net resolution so that the
            // value is stable across sphere grids
            let sp = net_spacing(&thick);
            let depth = ((2.0 * r / sp).log2().floor() as i64).clamp(1, 8) as u32;
            choquet_integral(
                &thick,
                |y| (h.signed_dist(y).abs() / r).powf(n_exp - s),
                3,
                s,
                1.0,
                depth,
            ) / r.powf(s)
        };
        best = best.min(val);
        if best == 0.0 {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlicingReport {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// LHS / RHS; the proposition asserts this is bounded by C(tau).
    pub ratio: f64,
    pub cap_k: CapacityEstimate,
    pub net_spacing: f64,
}

/// Spherical slicing inequality: compares
/// `LHS = Cap_s(K) H^n(G)^2 / r0^n` against
/// `RHS = int_G int Cap_{s-1}(K n S(z,r)) dr dH^n(z)`, with the sphere
/// slices realized as annuli of width equal to the net spacing of `K`.
pub fn slicing_check(
    k: &[Point],
    g: &[(Point, f64)],
    r0: f64,
    s: f64,
    radius_grid: &[f64],
) -> Result<SlicingReport, CapacityError> {
    assert!(s > 1.0);
    let n_exp = g_dim_exponent(g);
    if k.is_empty() || g.is_empty() {
        let cap = CapacityEstimate::empty(s, 0.0);
        return Ok(SlicingReport { s, lhs: 0.0, rhs: 0.0, ratio: 0.0, cap_k: cap, net_spacing: 0.0 });
    }
    let spacing = net_spacing(k);
    let cap_k = capacity_s(k, s, spacing)?;
    let hn_g: f64 = g.iter().map(|&(_, w)| w).sum();
    let lhs = cap_k.value * hn_g * hn_g / r0.powf(n_exp);
    let mut rhs = 0.0;
    for &(z, w) in g {
        let mut inner = 0.0;
        for win in radius_grid.windows(2) {
            let (rl, rh) = (win[0], win[1]);
            let slab: Vec<Point> = k
                .iter()
                .copied()
                .filter(|&p| {
                    let d = dist(p, z);
                    d >= rl && d < rh
                })
                .collect();
            if slab.is_empty() {
                continue;
            }
            let cap = capacity_s(&slab, s - 1.0, spacing)?;
            inner += cap.value * (rh - rl);
        }
        rhs += w * inner;
    }
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
    Ok(SlicingReport { s, lhs, rhs, ratio, cap_k, net_spacing: spacing })
}

/// The exponent n used for the H^n(G)^2 / r0^n normalization is inferred
/// from the ambient data: flat planar G nets carry n = 2, line nets n = 1.
fn g_dim_exponent(g: &[(Point, f64)]) -> f64 {
    // detect whether the y-extent is nontrivial
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(p, _) in g {
        lo = lo.min(p[1]);
        hi = hi.max(p[1]);
    }
    if hi - lo > 1e-12 {
        2.0
    } else {
        1.0
    }
}

/// Net of the closed ball `B(c, r)` in the given dimension on a regular
/// grid with roughly `target` points; returns the net and its spacing.
pub fn ball_net(c: Point, r: f64, dim: usize, target: usize) -> (Vec<Point>, f64) {
    // points per axis so the grid meets the target count inside the ball
    let frac = match dim {
        1 => 1.0,
        2 => std::f64::consts::FRAC_PI_4,
        _ => std::f64::consts::PI / 6.0,
    };
    let per_axis = ((target as f64 / frac).powf(1.0 / dim as f64)).ceil() as usize;
    let per_axis = per_axis.max(2);
    let step = 2.0 * r / (per_axis - 1) as f64;
    let mut pts = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let mut p = c;
        for k in 0..dim {
            p[k] = c[k] - r + idx[k] as f64 * step;
        }
        if dist(p, c) <= r + 1e-12 {
            pts.push(p);
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dim {
                return (pts, step);
            }
        }
    }
}
