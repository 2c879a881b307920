//! Planar (n = 1) spectral quantities: longest-arc characteristic
//! constants, the classical Carleson epsilon from arcs, the associated
//! Dini square function, the planar AKN-type inequality check, and
//! L1 tangent defects.

use crate::arcs::arc_decomposition;
use crate::dini::{dini, DiniResult, Report};
use crate::geom::{dot, Point};
use crate::region::{Label, RegionError, RegionPair};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Longest open arcs of `S(x,r)` inside each component and their
/// characteristic constants (planar closed form: alpha = pi / theta).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcProfile {
    pub x: Point,
    pub r: f64,
    /// Angle of the longest open Plus arc, in [0, 2 pi].
    pub theta_plus: f64,
    pub theta_minus: f64,
    /// pi / theta; +infinity when the side is empty on the circle.
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl ArcProfile {
    /// min(1, alpha+ + alpha- - 2), the Friedland-Hayman defect. The
    /// infinity sentinel clamps to 1.
    pub fn fh_defect(&self) -> f64 {
        if !self.alpha_plus.is_finite() || !self.alpha_minus.is_finite() {
            return 1.0;
        }
        (self.alpha_plus + self.alpha_minus - 2.0).min(1.0)
    }
}

fn characteristic(theta: f64) -> f64 {
    if theta > 0.0 {
        PI / theta
    } else {
        f64::INFINITY
    }
}

/// Longest-arc profile of the pair on `S(x,r)` (exact 2D arc mode).
pub fn arc_profile(pair: &RegionPair, x: Point, r: f64) -> Result<ArcProfile, RegionError> {
    let dec = arc_decomposition(pair, x, r)?;
    let theta_plus = dec.plus.longest_arc();
    let theta_minus = dec.minus.longest_arc();
    Ok(ArcProfile {
        x,
        r,
        theta_plus,
        theta_minus,
        alpha_plus: characteristic(theta_plus),
        alpha_minus: characteristic(theta_minus),
    })
}

/// The classical planar Carleson epsilon:
/// `(1/r) max(|pi r - H1(I+)|, |pi r - H1(I-)|) = max(|pi - theta+|, |pi - theta-|)`.
pub fn carleson_epsilon(pair: &RegionPair, x: Point, r: f64) -> Result<f64, RegionError> {
    let p = arc_profile(pair, x, r)?;
    Ok((PI - p.theta_plus).abs().max((PI - p.theta_minus).abs()))
}

/// Dini integral of `min(1, alpha+ + alpha- - 2)` over `[r_min, r_max]`
/// (first power, per the square-function definition; the harness's
/// quadratic form is fed its square root).
pub fn alpha_dini(
    pair: &RegionPair,
    x: Point,
    r_min: f64,
    r_max: f64,
    factor: f64,
) -> Result<DiniResult, RegionError> {
    let mut err = None;
    let res = dini(
        "alpha-defect",
        |r| match arc_profile(pair, x, r) {
            Ok(p) => p.fh_defect().max(0.0).sqrt(),
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        r_min,
        r_max,
        factor,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(res),
    }
}

/// Planar AKN-type inequality `eps(x,r)^2 <= C min(1, alpha+ + alpha- - 2)`
/// checked over a radius grid; the report records the empirical constant.
pub fn akn_check(
    pair: &RegionPair,
    x: Point,
    r_grid: &[f64],
    pinned_c: f64,
) -> Result<Report, RegionError> {
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let p = arc_profile(pair, x, r)?;
        let eps = (PI - p.theta_plus).abs().max((PI - p.theta_minus).abs());
        let defect = p.fh_defect();
        // FH nonnegativity is exact in the planar closed form
        debug_assert!(defect >= -1e-12);
        rows.push((r, eps * eps, pinned_c * defect));
    }
    Ok(Report::from_table("akn planar: eps^2 <= C min(1, a+ + a- - 2)", 1e-9, rows))
}

/// Empirical ratio table for the recorded relation `eps_1 <~ eps`: per
/// radius, the exact-arc epsilon_1 and the longest-arc epsilon.
pub fn epsilon_ratio_table(
    pair: &RegionPair,
    x: Point,
    r_grid: &[f64],
    cfg: &crate::coeffs::SearchCfg,
) -> Result<Vec<(f64, f64, f64)>, RegionError> {
    let mut rows = Vec::new();
    for &r in r_grid {
        let q = crate::sphere::SphereSample::circle(x, r, cfg.coarse_2d);
        let (e1, _) = crate::coeffs::epsilon(pair, x, r, &q, cfg);
        let e = carleson_epsilon(pair, x, r)?;
        rows.push((r, e1, e));
    }
    Ok(rows)
}

/// L1 tangent defects of the rescaled scene against the half-space pair
/// with inner normal `u`: the volumes of the two symmetric differences
/// inside the unit ball, by deterministic grid quadrature.
pub fn l1_tangent_defect(
    pair: &RegionPair,
    x: Point,
    r: f64,
    u: Point,
    per_axis: usize,
) -> (f64, f64) {
    let n = per_axis.max(8);
    let step = 2.0 / (n - 1) as f64;
    let cell = if pair.dim == 2 { step * step } else { step * step * step };
    let mut plus = 0.0;
    let mut minus = 0.0;
    let kmax = if pair.dim == 2 { 1 } else { n };
    for i in 0..n {
        for j in 0..n {
            for k in 0..kmax {
                let y: Point = [
                    -1.0 + i as f64 * step,
                    -1.0 + j as f64 * step,
                    if pair.dim == 2 { 0.0 } else { -1.0 + k as f64 * step },
                ];
                if dot(y, y) > 1.0 {
                    continue;
                }
                let p: Point = [x[0] + r * y[0], x[1] + r * y[1], x[2] + r * y[2]];
                let lab = pair.classify(p);
                let side = dot(y, u);
                let in_hplus = side > 0.0;
                let in_hminus = side < 0.0;
                if (lab == Label::Plus) != in_hplus {
                    plus += cell;
                }
                if (lab == Label::Minus) != in_hminus {
                    minus += cell;
                }
            }
        }
    }
    (plus, minus)
}

/// Rescaled-scene L1 defect against a Monte-Carlo oracle with `samples`
/// points (used by tests; seeded, deterministic).
pub fn l1_defect_mc(
    pair: &RegionPair,
    x: Point,
    r: f64,
    u: Point,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = crate::rng::SplitMix64::new(seed);
    let mut hit_p = 0usize;
    let mut hit_m = 0usize;
    let mut total = 0usize;
    while total < samples {
        let y: Point = [
            2.0 * rng.next_f64() - 1.0,
            2.0 * rng.next_f64() - 1.0,
            if pair.dim == 2 { 0.0 } else { 2.0 * rng.next_f64() - 1.0 },
        ];
        if dot(y, y) > 1.0 {
            continue;
        }
        total += 1;
        let p: Point = [x[0] + r * y[0], x[1] + r * y[1], x[2] + r * y[2]];
        let lab = pair.classify(p);
        let side = dot(y, u);
        if (lab == Label::Plus) != (side > 0.0) {
            hit_p += 1;
        }
        if (lab == Label::Minus) != (side < 0.0) {
            hit_m += 1;
        }
    }
    let vol = if pair.dim == 2 { PI } else { 4.0 * PI / 3.0 };
    (
        vol * hit_p as f64 / total as f64,
        vol * hit_m as f64 / total as f64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::normalize;
    use crate::region::{empty_pair, gap_strip_pair, halfplane_pair, Region, RegionPair};

    #[test]
    fn halfplane_profile() {
        let pair = halfplane_pair();
        let p = arc_profile(&pair, [0.0; 3], 1.0).unwrap();
        assert!((p.theta_plus - PI).abs() < 1e-12);
        assert!((p.theta_minus - PI).abs() < 1e-12);
        assert!((p.alpha_plus - 1.0).abs() < 1e-12);
        assert!(p.fh_defect().abs() < 1e-12);
        assert!(carleson_epsilon(&pair, [0.0; 3], 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn gap_strip_profile() {
        let h = 0.1;
        let r = 1.0;
        let pair = gap_strip_pair(h);
        let p = arc_profile(&pair, [0.0; 3], r).unwrap();
        let u = (h / r).asin();
        assert!((p.theta_plus - PI).abs() < 1e-12);
        assert!((p.theta_minus - (PI - 2.0 * u)).abs() < 1e-12);
        assert!((p.alpha_minus - PI / (PI - 2.0 * u)).abs() < 1e-12);
        let eps = carleson_epsilon(&pair, [0.0; 3], r).unwrap();
        assert!((eps - 2.0 * u).abs() < 1e-12);
    }

    #[test]
    fn empty_side_sentinel() {
        let plus = Region::HalfSpace { anchor: [0.0; 3], normal: [0.0, 1.0, 0.0] };
        let pair = RegionPair::new(2, plus, Region::Empty).unwrap();
        let p = arc_profile(&pair, [0.0; 3], 1.0).unwrap();
        assert!(p.alpha_minus.is_infinite());
        assert_eq!(p.fh_defect(), 1.0);
        // fully empty scene: epsilon = pi
        let e = carleson_epsilon(&empty_pair(2), [0.0; 3], 1.0).unwrap();
        assert!((e - PI).abs() < 1e-12);
    }

    #[test]
    fn alpha_dini_examples() {
        let half = halfplane_pair();
        let d = alpha_dini(&half, [0.0; 3], 0.01, 1.0, 2f64.powf(0.125)).unwrap();
        assert!(d.value < 1e-12);
        // one side empty at all scales: integrand is identically 1
        let plus = Region::HalfSpace { anchor: [0.0; 3], normal: [0.0, 1.0, 0.0] };
        let pair = RegionPair::new(2, plus, Region::Empty).unwrap();
        let d = alpha_dini(&pair, [0.0; 3], 0.01, 1.0, 2f64.powf(0.125)).unwrap();
        assert!((d.value - (1.0f64 / 0.01).ln()).abs() < 1e-9, "{}", d.value);
        // gap strip: stable under a 10x finer grid
        let pair = gap_strip_pair(0.05);
        let a = alpha_dini(&pair, [0.0; 3], 0.06, 1.0, 2f64.powf(0.125)).unwrap();
        let b = alpha_dini(&pair, [0.0; 3], 0.06, 1.0, 2f64.powf(0.0125)).unwrap();
        assert!((a.value / b.value - 1.0).abs() < 0.01, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn akn_gap_strip_family() {
        let grid: Vec<f64> = (0..16).map(|k| 0.3 * 1.25f64.powi(k)).collect();
        let mut consts = Vec::new();
        for h in [0.02, 0.05, 0.1, 0.15, 0.2] {
            let pair = gap_strip_pair(h);
            let rep = akn_check(&pair, [0.0; 3], &grid, 10.0).unwrap();
            assert!(rep.max_violation <= 1e-9, "h={h}: {}", rep.max_violation);
            consts.push(rep.empirical_constant);
        }
        let cmax = consts.iter().cloned().fold(0.0, f64::max);
        let cmin = consts.iter().cloned().fold(f64::INFINITY, f64::min);
        // per-h constants vary with h (the ratio scales like asin(h/r)),
        // but the family-wide constant is what the acceptance run pins;
        // here we only require finiteness and validity
        assert!(cmax.is_finite() && cmin >= 0.0);
    }

    #[test]
    fn akn_rotation_invariance() {
        // gap strip vs the same scene rotated by 30 degrees
        let h = 0.08;
        let pair = gap_strip_pair(h);
        let phi = PI / 6.0;
        let n1 = [-phi.sin(), phi.cos(), 0.0];
        let plus = Region::HalfSpace { anchor: [0.0; 3], normal: n1 };
        let minus = Region::HalfSpace {
            anchor: [h * phi.sin(), -h * phi.cos(), 0.0],
            normal: [phi.sin(), -phi.cos(), 0.0],
        };
        let rot = RegionPair::new(2, plus, minus).unwrap();
        let grid: Vec<f64> = (0..10).map(|k| 0.3 * 1.3f64.powi(k)).collect();
        let a = akn_check(&pair, [0.0; 3], &grid, 10.0).unwrap();
        let b = akn_check(&rot, [0.0; 3], &grid, 10.0).unwrap();
        for (ra, rb) in a.per_scale.iter().zip(&b.per_scale) {
            assert!((ra.1 - rb.1).abs() < 1e-9 && (ra.2 - rb.2).abs() < 1e-9);
        }
    }

    #[test]
    fn l1_defect_halfplane_and_rotation() {
        let pair = halfplane_pair();
        let (p, m) = l1_tangent_defect(&pair, [0.0; 3], 1.0, [0.0, 1.0, 0.0], 600);
        assert!(p < 0.02 && m < 0.02, "{p} {m}");
        // rotated test direction: each defect is the double-wedge area phi
        let phi = 0.3_f64;
        let u = normalize([phi.sin(), phi.cos(), 0.0]);
        let (p, m) = l1_tangent_defect(&pair, [0.0; 3], 1.0, u, 600);
        assert!((p - phi).abs() < 0.02, "plus defect {p}");
        assert!((m - phi).abs() < 0.02, "minus defect {m}");
        // Monte-Carlo oracle agreement
        let (pm, mm) = l1_defect_mc(&pair, [0.0; 3], 1.0, u, 1_000_000, 42);
        assert!((p - pm).abs() < 0.01 && (m - mm).abs() < 0.01);
    }

    #[test]
    fn l1_defect_gap_strip_large_r() {
        let h = 0.05;
        let pair = gap_strip_pair(h);
        let u = [0.0, 1.0, 0.0];
        let mut prev = f64::INFINITY;
        for r in [2.0, 8.0, 32.0] {
            let (_, m) = l1_tangent_defect(&pair, [0.0; 3], r, u, 500);
            // the minus defect is the rescaled strip: area ~ 2 h / r
            assert!((m - 2.0 * h / r).abs() < 0.02, "r={r}: {m}");
            assert!(m <= prev);
            prev = m;
        }
    }
}
