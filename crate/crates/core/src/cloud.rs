//! Weighted point clouds with an `n`-growth bound on ball masses.

use crate::geom::{dist, Ball, Point};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("cloud must contain at least one point with positive total mass")]
    EmptyCloud,
    #[error("weights must be nonnegative and match the point count")]
    BadWeights,
    #[error(
        "growth bound violated: mu(B(p{index}, {radius})) = {mass} > {bound} = C0 * r^n"
    )]
    GrowthViolated {
        index: usize,
        radius: f64,
        mass: f64,
        bound: f64,
    },
}

/// A finite measure `mu = sum w_i delta_{p_i}` with the growth bound
/// `mu(B(x, r)) <= C0 r^n` checked at construction for every data point
/// center and every dyadic radius between the minimal spacing and the
/// diameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedCloud {
    pub dim: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub growth_const: f64,
}

impl WeightedCloud {
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        weights: Vec<f64>,
        growth_const: f64,
    ) -> Result<Self, CloudError> {
        let cloud = Self::unchecked(dim, points, weights)?;
        let needed = cloud.minimal_growth_const();
        if needed > growth_const {
            // report the witness ball
            let (index, radius, mass) = cloud.growth_witness(growth_const);
            return Err(CloudError::GrowthViolated {
                index,
                radius,
                mass,
                bound: growth_const * radius.powi(dim as i32 - 1),
            });
        }
        Ok(WeightedCloud {
            growth_const,
            ..cloud
        })
    }

    /// Normalized counting measure with the tightest admissible growth
    /// constant.
    pub fn uniform(dim: usize, points: Vec<Point>) -> Result<Self, CloudError> {
        let n = points.len();
        let w = vec![1.0 / n.max(1) as f64; n];
        let cloud = Self::unchecked(dim, points, w)?;
        let c0 = cloud.minimal_growth_const();
        Ok(WeightedCloud {
            growth_const: c0,
            ..cloud
        })
    }

    fn unchecked(dim: usize, points: Vec<Point>, weights: Vec<f64>) -> Result<Self, CloudError> {
        if points.is_empty() {
            return Err(CloudError::EmptyCloud);
        }
        if weights.len() != points.len() || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(CloudError::BadWeights);
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(CloudError::EmptyCloud);
        }
        Ok(WeightedCloud {
            dim,
            points,
            weights,
            growth_const: f64::INFINITY,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `mu(B)` over the open ball.
    pub fn mu_ball(&self, b: &Ball) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(&p, _)| dist(p, b.center) < b.radius)
            .map(|(_, &w)| w)
            .sum()
    }

    /// Indices of points in the open ball.
    pub fn in_ball(&self, b: &Ball) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| dist(self.points[i], b.center) < b.radius)
            .collect()
    }

    /// Smallest `C0` such that `mu(B(p_i, r)) <= C0 r^n` for all data-point
    /// centers and dyadic radii between the minimal positive spacing and
    /// the diameter. Exhaustive over centers; per center the dyadic mass
    /// profile is a histogram over pair distances.
    pub fn minimal_growth_const(&self) -> f64 {
        self.growth_scan(f64::INFINITY).0
    }

    fn growth_witness(&self, c0: f64) -> (usize, f64, f64) {
        let (_, witness) = self.growth_scan(c0);
        witness.expect("growth_witness called without a violation")
    }

    /// Returns the minimal admissible constant and, if `c0` is exceeded,
    /// the first witnessing `(center index, radius, mass)`.
    fn growth_scan(&self, c0: f64) -> (f64, Option<(usize, f64, f64)>) {
        let n = self.dim as i32 - 1;
        let npts = self.len();
        // dyadic radius range
        let mut dmin = f64::INFINITY;
        let mut dmax: f64 = 0.0;
        for i in 0..npts {
            for j in (i + 1)..npts {
                let d = dist(self.points[i], self.points[j]);
                if d > 0.0 {
                    dmin = dmin.min(d);
                }
                dmax = dmax.max(d);
            }
        }
        if !dmin.is_finite() || dmax == 0.0 {
            // single location: mass at arbitrarily small radius
            let m = self.mass();
            return (f64::INFINITY, Some((0, 0.0, m)));
        }
        let k_lo = dmin.log2().floor() as i32;
        let k_hi = dmax.log2().ceil() as i32 + 1;
        let nbins = (k_hi - k_lo + 1) as usize;
        let mut needed: f64 = 0.0;
        let mut witness = None;
        let mut hist = vec![0.0_f64; nbins];
        for i in 0..npts {
            hist.iter_mut().for_each(|h| *h = 0.0);
            for j in 0..npts {
                let d = dist(self.points[i], self.points[j]);
                let bin = if d <= 0.0 {
                    0
                } else {
                    // smallest dyadic radius 2^k with d < 2^k
                    ((d.log2().floor() as i32 + 1).clamp(k_lo, k_hi) - k_lo) as usize
                };
                hist[bin] += self.weights[j];
            }
            let mut acc = 0.0;
            for (b, h) in hist.iter().enumerate() {
                acc += h;
                let r = 2.0_f64.powi(k_lo + b as i32);
                let ratio = acc / r.powi(n);
                if ratio > needed {
                    needed = ratio;
                }
                if witness.is_none() && acc > c0 * r.powi(n) {
                    witness = Some((i, r, acc));
                }
            }
        }
        (needed, witness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_cloud(n: usize) -> Vec<Point> {
        (0..n).map(|i| [i as f64, 0.0, 0.0]).collect()
    }

    #[test]
    fn uniform_line_growth() {
        let c = WeightedCloud::uniform(2, line_cloud(100)).unwrap();
        // counting measure 1/100 per unit spacing: mu(B(x,r)) ~ 2r/100
        assert!(c.growth_const <= 0.05);
        assert!((c.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn growth_violation_detected() {
        // ten coincident-ish points of total mass 10 in a tiny ball
        let pts: Vec<Point> = (0..10).map(|i| [i as f64 * 1e-6, 0.0, 0.0]).collect();
        let res = WeightedCloud::new(2, pts, vec![1.0; 10], 1.0);
        assert!(matches!(res, Err(CloudError::GrowthViolated { .. })));
    }

    #[test]
    fn mu_ball_counts_open() {
        let c = WeightedCloud::uniform(2, line_cloud(10)).unwrap();
        let b = Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        assert!((c.mu_ball(&b) - 0.1).abs() < 1e-12); // only the origin point
        assert_eq!(c.in_ball(&b), vec![0]);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            WeightedCloud::uniform(2, vec![]),
            Err(CloudError::EmptyCloud)
        ));
    }
}
