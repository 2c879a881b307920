//! Whitney-type dyadic decompositions of a window in the base plane with
//! respect to a 1-Lipschitz gauge `D`, plus the associated smooth
//! partition of unity.
//!
//! Cubes are genuine dyadic cubes over integer indices: the cube at
//! `(level, idx)` has side `2^level` and lower corner `idx * 2^level`,
//! so disjointness and maximality are exact integer statements.

use serde::{Deserialize, Serialize};

/// Dyadic cube in `dim` = 1 or 2 base dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub idx: [i64; 2],
    pub dim: usize,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2.0_f64.powi(self.level)
    }

    pub fn lower(&self) -> [f64; 2] {
        let s = self.side();
        [self.idx[0] as f64 * s, self.idx[1] as f64 * s]
    }

    pub fn center(&self) -> [f64; 2] {
        let s = self.side();
        let lo = self.lower();
        match self.dim {
            1 => [lo[0] + 0.5 * s, 0.0],
            _ => [lo[0] + 0.5 * s, lo[1] + 0.5 * s],
        }
    }

    pub fn corners(&self) -> Vec<[f64; 2]> {
        let s = self.side();
        let lo = self.lower();
        match self.dim {
            1 => vec![[lo[0], 0.0], [lo[0] + s, 0.0]],
            _ => vec![
                [lo[0], lo[1]],
                [lo[0] + s, lo[1]],
                [lo[0], lo[1] + s],
                [lo[0] + s, lo[1] + s],
            ],
        }
    }

    pub fn children(&self) -> Vec<DyadicCube> {
        let l = self.level - 1;
        let base = [self.idx[0] * 2, self.idx[1] * 2];
        match self.dim {
            1 => (0..2)
                .map(|i| DyadicCube {
                    level: l,
                    idx: [base[0] + i, 0],
                    dim: 1,
                })
                .collect(),
            _ => (0..4)
                .map(|k| DyadicCube {
                    level: l,
                    idx: [base[0] + (k & 1), base[1] + (k >> 1)],
                    dim: 2,
                })
                .collect(),
        }
    }

    /// Membership in the concentric scaled cube `factor * R`.
    pub fn in_scaled(&self, factor: f64, p: [f64; 2]) -> bool {
        let c = self.center();
        let half = 0.5 * factor * self.side();
        (0..self.dim).all(|k| (p[k] - c[k]).abs() <= half)
    }

    /// Do the scaled cubes `factor*R_a` and `factor*R_b` intersect?
    pub fn scaled_intersects(&self, other: &DyadicCube, factor: f64) -> bool {
        let ca = self.center();
        let cb = other.center();
        let h = 0.5 * factor * (self.side() + other.side());
        (0..self.dim).all(|k| (ca[k] - cb[k]).abs() <= h)
    }
}

fn smoothstep5(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (u * (u * 6.0 - 15.0) + 10.0)
}

/// A Whitney family over a window, with the gauge values `D(I)` (min over
/// cube corners, per the construction rule `l(I) < D(I)/20`) recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Whitney {
    pub dim: usize,
    pub cubes: Vec<DyadicCube>,
    pub d_of_cube: Vec<f64>,
    pub window_lo: [f64; 2],
    pub window_hi: [f64; 2],
    pub min_level: i32,
}

/// Builds the maximal dyadic cubes `I` inside the window with
/// `l(I) < D(I)/20`, where `D(I)` is the minimum of the gauge over the
/// corners of `I`. Cubes still violating the inequality at `min_level`
/// (the `{D = 0}` zone) are dropped.
pub fn whitney<F: Fn([f64; 2]) -> f64>(
    dim: usize,
    window_lo: [f64; 2],
    window_hi: [f64; 2],
    min_level: i32,
    d: F,
) -> Whitney {
    assert!(dim == 1 || dim == 2);
    let extent = (0..dim)
        .map(|k| window_hi[k] - window_lo[k])
        .fold(0.0_f64, f64::max);
    assert!(extent > 0.0);
    let top_level = extent.log2().ceil() as i32;
    let top_side = 2.0_f64.powi(top_level);
    let range = |k: usize| {
        let lo = (window_lo[k] / top_side).floor() as i64;
        let hi = ((window_hi[k] / top_side).ceil() as i64).max(lo + 1);
        lo..hi
    };
    let mut stack: Vec<DyadicCube> = Vec::new();
    match dim {
        1 => {
            for i in range(0) {
                stack.push(DyadicCube {
                    level: top_level,
                    idx: [i, 0],
                    dim,
                });
            }
        }
        _ => {
            for i in range(0) {
                for j in range(1) {
                    stack.push(DyadicCube {
                        level: top_level,
                        idx: [i, j],
                        dim,
                    });
                }
            }
        }
    }
    let mut cubes = Vec::new();
    let mut d_vals = Vec::new();
    while let Some(c) = stack.pop() {
        // skip cubes fully outside the window
        let lo = c.lower();
        let s = c.side();
        let outside = (0..dim).any(|k| lo[k] >= window_hi[k] || lo[k] + s <= window_lo[k]);
        if outside {
            continue;
        }
        let dc = c
            .corners()
            .iter()
            .map(|&p| d(p))
            .fold(f64::INFINITY, f64::min);
        if s < dc / 20.0 {
            cubes.push(c);
            d_vals.push(dc);
        } else if c.level > min_level {
            stack.extend(c.children());
        }
    }
    // deterministic order: by level then index
    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by_key(|&i| (cubes[i].level, cubes[i].idx));
    let cubes: Vec<DyadicCube> = order.iter().map(|&i| cubes[i]).collect();
    let d_of_cube: Vec<f64> = order.iter().map(|&i| d_vals[i]).collect();
    Whitney {
        dim,
        cubes,
        d_of_cube,
        window_lo,
        window_hi,
        min_level,
    }
}

impl Whitney {
    /// Unnormalized bump of cube `i` at `p`: `1` on `R_i`, smooth quintic
    /// falloff, `0` outside `3R_i` (per coordinate profile, product over
    /// dimensions). Gradient is `O(1/l(R_i))` by construction.
    pub fn bump(&self, i: usize, p: [f64; 2]) -> f64 {
        let c = self.cubes[i].center();
        let half = 0.5 * self.cubes[i].side();
        let mut v = 1.0;
        for k in 0..self.dim {
            let t = (p[k] - c[k]).abs() / half;
            v *= smoothstep5((3.0 - t) / 2.0);
        }
        v
    }

    /// Normalized partition of unity at `p`: pairs `(cube index, phi_i(p))`.
    /// The weights sum to exactly 1 wherever some cube contains `p`.
    pub fn pou(&self, p: [f64; 2]) -> Vec<(usize, f64)> {
        let mut raw: Vec<(usize, f64)> = (0..self.cubes.len())
            .filter_map(|i| {
                let b = self.bump(i, p);
                (b > 0.0).then_some((i, b))
            })
            .collect();
        let total: f64 = raw.iter().map(|&(_, b)| b).sum();
        if total > 0.0 {
            for e in raw.iter_mut() {
                e.1 /= total;
            }
        }
        raw
    }

    /// Does some cube of the family contain `p`?
    pub fn covers(&self, p: [f64; 2]) -> bool {
        self.cubes.iter().any(|c| {
            let lo = c.lower();
            let s = c.side();
            (0..self.dim).all(|k| lo[k] <= p[k] && p[k] < lo[k] + s)
        })
    }

    /// Property (a): `5 l(R_i) <= D(x) <= 50 l(R_i)` for probe points `x`
    /// on a per-cube grid of `15 R_i`. Returns the worst (low, high) slack.
    pub fn check_gauge_bounds<F: Fn([f64; 2]) -> f64>(&self, d: F, probes: usize) -> (f64, f64) {
        let mut worst_low = f64::INFINITY; // min of D(x) - 5l
        let mut worst_high = f64::INFINITY; // min of 50l - D(x)
        for c in &self.cubes {
            let ctr = c.center();
            let half = 7.5 * c.side();
            let m = probes.max(2);
            let probe = |a: i64, b: i64| {
                let mut p = [0.0; 2];
                p[0] = ctr[0] - half + 2.0 * half * a as f64 / (m - 1) as f64;
                if self.dim == 2 {
                    p[1] = ctr[1] - half + 2.0 * half * b as f64 / (m - 1) as f64;
                }
                p
            };
            let bs = if self.dim == 2 { m as i64 } else { 1 };
            for a in 0..m as i64 {
                for b in 0..bs {
                    let x = probe(a, b);
                    let dv = d(x);
                    worst_low = worst_low.min(dv - 5.0 * c.side());
                    worst_high = worst_high.min(50.0 * c.side() - dv);
                }
            }
        }
        (worst_low, worst_high)
    }

    /// Property (b): cubes whose `15R` dilates intersect have comparable
    /// sides; returns the worst ratio (`>= 1`). Cubes are bucketed by level
    /// and level pairs scanned by decreasing side ratio, so the first
    /// intersecting pair found settles the answer.
    pub fn neighbor_ratio(&self) -> f64 {
        use std::collections::BTreeMap;
        let mut by_level: BTreeMap<i32, Vec<&DyadicCube>> = BTreeMap::new();
        for c in &self.cubes {
            by_level.entry(c.level).or_default().push(c);
        }
        let mut groups: Vec<(i32, Vec<&DyadicCube>)> = by_level
            .into_iter()
            .map(|(l, mut v)| {
                v.sort_by(|a, b| a.center()[0].partial_cmp(&b.center()[0]).unwrap());
                (l, v)
            })
            .collect();
        groups.sort_by_key(|&(l, _)| l);
        let nl = groups.len();
        let mut deltas: Vec<(i32, usize, usize)> = Vec::new();
        for i in 0..nl {
            for j in i..nl {
                deltas.push((groups[j].0 - groups[i].0, i, j));
            }
        }
        deltas.sort_by_key(|&(d, _, _)| std::cmp::Reverse(d));
        for (delta, i, j) in deltas {
            if delta == 0 {
                return 1.0;
            }
            let (la, ga) = (&groups[j].0, &groups[j].1);
            let (_, gb) = (&groups[i].0, &groups[i].1);
            let sa = 2.0_f64.powi(*la);
            let sb = 2.0_f64.powi(la - delta);
            let win = 7.5 * (sa + sb);
            // sweep: both groups sorted by center x
            let mut lo = 0usize;
            for a in ga.iter() {
                let ax = a.center()[0];
                while lo < gb.len() && gb[lo].center()[0] < ax - win {
                    lo += 1;
                }
                let mut k = lo;
                while k < gb.len() && gb[k].center()[0] <= ax + win {
                    if a.scaled_intersects(gb[k], 15.0) {
                        return 2.0_f64.powi(delta);
                    }
                    k += 1;
                }
            }
        }
        1.0
    }

    /// Property (c): maximum number of dilated cubes `15 R_i` containing a
    /// common probe point (probing the cube centers and corners).
    pub fn max_overlap(&self) -> usize {
        let mut probes: Vec<[f64; 2]> = Vec::new();
        for c in &self.cubes {
            probes.push(c.center());
            probes.extend(c.corners());
        }
        probes
            .iter()
            .map(|&p| {
                self.cubes
                    .iter()
                    .filter(|c| c.in_scaled(15.0, p))
                    .count()
            })
            .fold(0, usize::max)
    }

    /// Disjointness of cube interiors: exact on integer dyadic data.
    pub fn interiors_disjoint(&self) -> bool {
        for i in 0..self.cubes.len() {
            for j in (i + 1)..self.cubes.len() {
                let (a, b) = (&self.cubes[i], &self.cubes[j]);
                // dyadic cubes overlap iff one contains the other
                let (big, small) = if a.level >= b.level { (a, b) } else { (b, a) };
                let shift = big.level - small.level;
                let contained = (0..self.dim)
                    .all(|k| (small.idx[k] >> shift) == big.idx[k]);
                if contained {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gauge_forces_uniform_side() {
        // D == 100 on [0,256]^2: maximality forces side 4 (4 < 5 <= 8)
        let w = whitney(2, [0.0, 0.0], [256.0, 256.0], -8, |_| 100.0);
        assert!(!w.cubes.is_empty());
        assert!(w.cubes.iter().all(|c| c.side() == 4.0));
        assert_eq!(w.cubes.len(), 64 * 64);
        assert!(w.interiors_disjoint());
    }

    #[test]
    fn graded_gauge_properties_1d() {
        let w = whitney(1, [-256.0, 0.0], [256.0, 0.0], -16, |p| p[0].abs());
        assert!(w.cubes.len() > 20);
        assert!(w.interiors_disjoint());
        let (lo, hi) = w.check_gauge_bounds(|p| p[0].abs(), 9);
        assert!(lo >= 0.0, "property (a) lower slack {lo}");
        assert!(hi >= 0.0, "property (a) upper slack {hi}");
        assert!(w.neighbor_ratio() <= 10.0);
        assert!(w.max_overlap() <= 64);
    }

    #[test]
    fn graded_gauge_properties_2d() {
        let w = whitney(2, [-64.0, -64.0], [64.0, 64.0], -12, |p| p[0].hypot(p[1]));
        assert!(w.interiors_disjoint());
        let (lo, _hi) = w.check_gauge_bounds(|p| p[0].hypot(p[1]), 5);
        assert!(lo >= 0.0, "property (a) lower slack {lo}");
        assert!(w.neighbor_ratio() <= 10.0);
    }

    #[test]
    fn zero_gauge_empty() {
        let w = whitney(1, [0.0, 0.0], [16.0, 0.0], -10, |_| 0.0);
        assert!(w.cubes.is_empty());
    }

    #[test]
    fn coverage_where_gauge_positive() {
        let w = whitney(1, [-256.0, 0.0], [256.0, 0.0], -16, |p| p[0].abs());
        let floor = 20.0 * 2.0_f64.powi(w.min_level + 1);
        for k in 0..2000 {
            let x = -255.9 + 511.8 * k as f64 / 1999.0;
            if x.abs() > floor {
                assert!(w.covers([x, 0.0]), "uncovered x = {x}");
            }
        }
    }

    #[test]
    fn pou_sums_to_one_on_cubes() {
        let w = whitney(1, [-256.0, 0.0], [256.0, 0.0], -16, |p| p[0].abs());
        for k in 0..500 {
            let x = -200.0 + 400.0 * k as f64 / 499.0;
            if w.covers([x, 0.0]) {
                let s: f64 = w.pou([x, 0.0]).iter().map(|&(_, v)| v).sum();
                assert!((s - 1.0).abs() <= 1e-9, "sum {s} at {x}");
            }
        }
    }
}
