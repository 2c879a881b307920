//! Quadrature nodes on circles and spheres.
//!
//! Three node families are provided: exact angular intervals in the plane
//! (measure computations are then closed-form), a Fibonacci lattice on the
//! 2-sphere (deterministic, near-uniform weights), and stratified random
//! nodes for Monte Carlo cross-checks. All weights sum to the exact surface
//! measure `sigma_n * r^n`.

use crate::geom::{sphere_measure, Point};
use crate::rng::SplitMix64;
use std::f64::consts::{PI, TAU};

/// A weighted node set on the sphere `S(x, r)` in ambient dimension `dim`.
#[derive(Debug, Clone)]
pub struct SphereSample {
    pub center: Point,
    pub radius: f64,
    pub dim: usize,
    /// Node positions, on the sphere to within `1e-12 * r`.
    pub nodes: Vec<Point>,
    /// Quadrature weights; `sum(weights) == sigma_n * r^n` to within `1e-9`.
    pub weights: Vec<f64>,
}

impl SphereSample {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total surface measure represented by the sample.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integrates a function over the sphere with respect to surface
    /// measure, in node order (deterministic reduction).
    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    /// Uniform angular grid on the circle `S(x,r)` (2D). Node `k` sits at
    /// angle `(k + 1/2) * 2*pi / count`; weights are equal.
    pub fn circle(center: Point, r: f64, count: usize) -> SphereSample {
        assert!(count > 0 && r > 0.0);
        let w = TAU * r / count as f64;
        let mut nodes = Vec::with_capacity(count);
        for k in 0..count {
            let t = (k as f64 + 0.5) * TAU / count as f64;
            nodes.push([center[0] + r * t.cos(), center[1] + r * t.sin(), 0.0]);
        }
        SphereSample {
            center,
            radius: r,
            dim: 2,
            nodes,
            weights: vec![w; count],
        }
    }

    /// Fibonacci lattice on the sphere `S(x,r)` in 3D: `count` equal-weight
    /// nodes at `z_k = 1 - (2k+1)/count`, azimuth `k * golden angle`.
    pub fn fibonacci(center: Point, r: f64, count: usize) -> SphereSample {
        assert!(count > 0 && r > 0.0);
        let golden = PI * (3.0 - 5.0_f64.sqrt());
        let w = 4.0 * PI * r * r / count as f64;
        let mut nodes = Vec::with_capacity(count);
        for k in 0..count {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            nodes.push([
                center[0] + r * rho * phi.cos(),
                center[1] + r * rho * phi.sin(),
                center[2] + r * z,
            ]);
        }
        SphereSample {
            center,
            radius: r,
            dim: 3,
            nodes,
            weights: vec![w; count],
        }
    }

    /// Stratified random nodes: the sphere is split into `count` equal-area
    /// cells (angular in 2D, `z`-slabs in 3D) and one uniform point is drawn
    /// in each.
    pub fn stratified(center: Point, r: f64, dim: usize, count: usize, seed: u64) -> SphereSample {
        assert!(count > 0 && r > 0.0);
        let mut rng = SplitMix64::new(seed);
        let mut nodes = Vec::with_capacity(count);
        let w = sphere_measure(dim) * r.powi(dim as i32 - 1) / count as f64;
        match dim {
            2 => {
                for k in 0..count {
                    let t = (k as f64 + rng.next_f64()) * TAU / count as f64;
                    nodes.push([center[0] + r * t.cos(), center[1] + r * t.sin(), 0.0]);
                }
            }
            3 => {
                for k in 0..count {
                    let z = 1.0 - 2.0 * (k as f64 + rng.next_f64()) / count as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let phi = TAU * rng.next_f64();
                    nodes.push([
                        center[0] + r * rho * phi.cos(),
                        center[1] + r * rho * phi.sin(),
                        center[2] + r * z,
                    ]);
                }
            }
            _ => panic!("ambient dimension must be 2 or 3"),
        }
        SphereSample {
            center,
            radius: r,
            dim,
            nodes,
            weights: vec![w; count],
        }
    }

    /// Antipodally symmetric node set: reuses the node layout but pairs
    /// every node `p` with its reflection `2x - p` so reflection-based
    /// integrands see exactly matched quadrature.
    pub fn with_antipodes(&self) -> SphereSample {
        let mut nodes = Vec::with_capacity(self.len() * 2);
        let mut weights = Vec::with_capacity(self.len() * 2);
        for (&p, &w) in self.nodes.iter().zip(&self.weights) {
            nodes.push(p);
            nodes.push([
                2.0 * self.center[0] - p[0],
                2.0 * self.center[1] - p[1],
                2.0 * self.center[2] - p[2],
            ]);
            weights.push(0.5 * w);
            weights.push(0.5 * w);
        }
        SphereSample {
            center: self.center,
            radius: self.radius,
            dim: self.dim,
            nodes,
            weights,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dist;

    fn check_invariants(s: &SphereSample) {
        let sigma = sphere_measure(s.dim) * s.radius.powi(s.dim as i32 - 1);
        assert!((s.total_weight() - sigma).abs() <= 1e-9 * sigma.max(1.0));
        for &p in &s.nodes {
            assert!((dist(p, s.center) - s.radius).abs() <= 1e-12 * s.radius.max(1.0));
        }
    }

    #[test]
    fn circle_invariants() {
        check_invariants(&SphereSample::circle([1.0, -2.0, 0.0], 3.0, 720));
    }

    #[test]
    fn fibonacci_invariants() {
        check_invariants(&SphereSample::fibonacci([0.5, 0.5, 0.5], 2.0, 4000));
    }

    #[test]
    fn stratified_invariants() {
        check_invariants(&SphereSample::stratified([0.0; 3], 1.5, 2, 500, 7));
        check_invariants(&SphereSample::stratified([0.0; 3], 1.5, 3, 500, 7));
    }

    #[test]
    fn fibonacci_hemisphere_balance() {
        // Integrating the indicator of {z > c} approximates the exact cap
        // measure 2*pi*(1 - c).
        let s = SphereSample::fibonacci([0.0; 3], 1.0, 20_000);
        let cap = s.integrate(|p| if p[2] > 0.3 { 1.0 } else { 0.0 });
        assert!((cap - 2.0 * PI * 0.7).abs() < 1e-2);
    }

    #[test]
    fn antipodes_preserve_total() {
        let s = SphereSample::fibonacci([1.0, 0.0, 0.0], 1.0, 101).with_antipodes();
        check_invariants(&s);
        assert_eq!(s.len(), 202);
    }

    #[test]
    fn stratified_is_seed_deterministic() {
        let a = SphereSample::stratified([0.0; 3], 1.0, 3, 64, 42);
        let b = SphereSample::stratified([0.0; 3], 1.0, 3, 64, 42);
        assert_eq!(a.nodes, b.nodes);
    }
}
