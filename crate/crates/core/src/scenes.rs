//! Seeded generators for random planar scenes.
//!
//! Scenes are built side-by-side around a random separating line, so the
//! disjointness of the two open sets holds by construction for every seed.

use crate::geom::Point;
use crate::region::{Region, RegionPair};
use crate::rng::SplitMix64;

/// A random 2-D scene with the given number of primitives split between
/// the two sides of a random separating line through the origin. The
/// primitives are balls, triangles, and shifted half-planes, each kept at
/// a positive distance from the line.
pub fn random_planar_scene(seed: u64, primitives: usize) -> RegionPair {
    let mut rng = SplitMix64::new(seed);
    let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
    let n = [phi.cos(), phi.sin(), 0.0];
    let u = [-phi.sin(), phi.cos(), 0.0];
    let gap = 0.02 + 0.1 * rng.next_f64();
    let mut plus: Vec<Region> = Vec::new();
    let mut minus: Vec<Region> = Vec::new();
    let place = |side: f64, rng: &mut SplitMix64| -> Region {
        let kind = rng.next_u64() % 3;
        let t = 4.0 * (rng.next_f64() - 0.5);
        let at = |t: f64, d: f64| -> Point {
            [t * u[0] + side * d * n[0], t * u[1] + side * d * n[1], 0.0]
        };
        match kind {
            0 => {
                let radius = 0.2 + 0.8 * rng.next_f64();
                let d = gap + radius + 0.05 + 1.5 * rng.next_f64();
                Region::Ball { center: at(t, d), radius }
            }
            1 => {
                // triangle with all vertices at distance >= gap from the line
                let mut vs: Vec<Point> = (0..3)
                    .map(|_| {
                        let tv = t + 1.5 * (rng.next_f64() - 0.5);
                        let dv = gap + 0.05 + 2.0 * rng.next_f64();
                        at(tv, dv)
                    })
                    .collect();
                // counter-clockwise ordering
                let cx = (vs[0][0] + vs[1][0] + vs[2][0]) / 3.0;
                let cy = (vs[0][1] + vs[1][1] + vs[2][1]) / 3.0;
                vs.sort_by(|a, b| {
                    let aa = (a[1] - cy).atan2(a[0] - cx);
                    let ab = (b[1] - cy).atan2(b[0] - cx);
                    aa.partial_cmp(&ab).unwrap()
                });
                Region::Polygon { vertices: vs }
            }
            _ => {
                let d = gap + 0.3 + 2.0 * rng.next_f64();
                Region::HalfSpace {
                    anchor: at(0.0, d),
                    normal: [side * n[0], side * n[1], 0.0],
                }
            }
        }
    };
    for i in 0..primitives {
        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
        let r = place(side, &mut rng);
        if side > 0.0 {
            plus.push(r);
        } else {
            minus.push(r);
        }
    }
    let wrap = |v: Vec<Region>| -> Region {
        match v.len() {
            0 => Region::Empty,
            1 => v.into_iter().next().unwrap(),
            _ => Region::Union(v),
        }
    };
    RegionPair::new(2, wrap(plus), wrap(minus)).expect("sides are separated by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn scenes_are_disjoint_and_seeded() {
        for seed in 0..50 {
            let pair = random_planar_scene(seed, 5);
            let mut rng = SplitMix64::new(seed.wrapping_add(977));
            for _ in 0..400 {
                let p = [
                    12.0 * (rng.next_f64() - 0.5),
                    12.0 * (rng.next_f64() - 0.5),
                    0.0,
                ];
                let in_plus = pair.plus.contains(p);
                let in_minus = pair.minus.contains(p);
                assert!(!(in_plus && in_minus), "seed {seed}: overlap at {p:?}");
            }
            // determinism
            let again = random_planar_scene(seed, 5);
            assert_eq!(pair.plus, again.plus);
            assert_eq!(pair.minus, again.minus);
        }
    }
}
