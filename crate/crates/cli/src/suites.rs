//! End-to-end `verify` suites. Each check prints exactly one PASS/FAIL
//! line; a suite passes iff all of its checks pass. The suites are the
//! quick counterparts of the acceptance criteria and share their logic.

use eps2_core::capacity;
use eps2_core::cloud::WeightedCloud;
use eps2_core::coeffs::SearchCfg;
use eps2_core::corona::{corona, piperp_violation, CoronaParams};
use eps2_core::dini::Verdict;
use eps2_core::fourier::{self, GridFunction};
use eps2_core::geom::{Ball, Point};
use eps2_core::region::{gap_strip_pair, halfplane_pair};
use eps2_core::rng::SplitMix64;
use eps2_core::scenes::random_planar_scene;
use eps2_core::spectral;
use std::f64::consts::PI;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Check {
        Check { name: name.into(), pass, detail }
    }

    pub fn print(&self) {
        println!(
            "check: {} | {} | {}",
            self.name,
            self.detail,
            if self.pass { "PASS" } else { "FAIL" }
        );
    }
}

pub const SUITES: &[&str] = &["chain", "smoothed", "fourier", "corona", "capacity", "akn"];

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Check>, String> {
    match name {
        "chain" => Ok(suite_chain(seed)),
        "smoothed" => Ok(suite_smoothed(seed)),
        "fourier" => Ok(suite_fourier(seed)),
        "corona" => Ok(suite_corona(seed)),
        "capacity" => Ok(suite_capacity()),
        "akn" => Ok(suite_akn(seed)),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?);
            }
            Ok(all)
        }
        other => Err(format!(
            "unknown suite `{other}`; expected one of chain, smoothed, fourier, corona, capacity, akn, all"
        )),
    }
}

fn suite_chain(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let cfg = SearchCfg::default();
    // half-plane: exactly zero coefficients
    let hp = halfplane_pair();
    let mut worst = 0.0_f64;
    for k in 0..8 {
        let r = 0.05 * 2.0_f64.powi(k);
        let rec = eps2_core::coeffs::evaluate_record(&hp, [0.0; 3], r, 2048, 64, &cfg);
        worst = worst.max(rec.eps).max(rec.a_sym).max(rec.gamma_sym);
    }
    checks.push(Check::new(
        "half-plane coefficients vanish",
        worst <= 1e-6,
        format!("max coefficient {worst:.3e} (tol 1e-6)"),
    ));
    // gap-strip closed forms
    let h = 0.1;
    let gs = gap_strip_pair(h);
    let mut worst = 0.0_f64;
    for rr in [0.5, 1.0, 2.0] {
        let q = eps2_core::sphere::SphereSample::circle([0.0; 3], rr, 4096);
        let eps = eps2_core::coeffs::epsilon(&gs, [0.0; 3], rr, &q, &cfg).0;
        let a = eps2_core::coeffs::asym_a(&gs, [0.0; 3], rr, &q);
        let g = eps2_core::coeffs::gamma_sym(&gs, [0.0; 3], rr, &q);
        let asin = (h / rr).asin();
        worst = worst
            .max((eps - 2.0 * asin).abs())
            .max((a - 2.0 * asin).abs())
            .max((g - 4.0 * asin).abs());
    }
    checks.push(Check::new(
        "gap-strip closed forms",
        worst <= 1e-6,
        format!("max abs error {worst:.3e} (tol 1e-6)"),
    ));
    // chain 2a <= gamma <= 2eps on random scenes
    let mut rng = SplitMix64::new(seed);
    let mut max_violation = 0.0_f64;
    for i in 0..10 {
        let pair = random_planar_scene(rng.next_u64().wrapping_add(i), 5);
        let grid = eps2_core::dini::log_grid(0.05, 4.0, 2.0_f64.powf(0.5));
        let rep = eps2_core::dini::verify_chain(&pair, [0.0; 3], &grid, 2048, 1e-9, &cfg);
        max_violation = max_violation.max(rep.max_violation);
    }
    checks.push(Check::new(
        "chain 2a <= gamma <= 2 eps on random scenes",
        max_violation <= 1e-9,
        format!("max violation {max_violation:.3e} (tol 1e-9)"),
    ));
    checks
}

fn suite_smoothed(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let cfg = SearchCfg::default();
    let scenes: Vec<(String, eps2_core::region::RegionPair)> = vec![
        ("gap-strip h=0.1".into(), gap_strip_pair(0.1)),
        ("random scene".into(), random_planar_scene(seed.wrapping_add(5), 5)),
    ];
    for (name, pair) in scenes {
        let rep = eps2_core::dini::verify_smoothed_domination(
            &pair,
            [0.0; 3],
            2.0,
            4.0,
            2.0_f64.powf(0.5),
            2048,
            &cfg,
        );
        checks.push(Check::new(
            &format!("smoothed domination on {name}"),
            rep.verdict == Verdict::Pass,
            format!(
                "empirical constant {:.4}, violation {:.3e}",
                rep.empirical_constant, rep.max_violation
            ),
        ));
        let (g_rep, gamma_rep) = eps2_core::dini::verify_g_domination(
            &pair,
            [0.0; 3],
            2.0,
            2.0_f64.powf(0.5),
            2048,
            &cfg,
        );
        let pass = g_rep.verdict == Verdict::Pass && gamma_rep.verdict == Verdict::Pass;
        checks.push(Check::new(
            &format!("g/gamma domination on {name}"),
            pass,
            format!(
                "constants {:.4} / {:.4}",
                g_rep.empirical_constant, gamma_rep.empirical_constant
            ),
        ));
    }
    checks
}

fn suite_fourier(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let kernel = eps2_core::coeffs::Kernel::Bump;
    let f = GridFunction::bump(1 << 12, 16.0, 1.5, 0.2);
    let rep = fourier::verify_fourier_identity(&f, kernel, 0.02);
    checks.push(Check::new(
        "fourier identity (bump)",
        rep.pass,
        format!("rel error {:.4} (tol 0.02)", rep.rel_error),
    ));
    let g = GridFunction::random_lipschitz(1 << 12, 16.0, 0.08, seed.wrapping_add(11));
    let rep = fourier::verify_fourier_identity(&g, kernel, 0.02);
    checks.push(Check::new(
        "fourier identity (random lipschitz)",
        rep.pass,
        format!("rel error {:.4} (tol 0.02)", rep.rel_error),
    ));
    let rep = fourier::verify_second_diff(&f, kernel, 0.03);
    checks.push(Check::new(
        "second-difference identity",
        rep.pass,
        format!("rel error {:.4} (tol 0.03)", rep.rel_error),
    ));
    checks
}

fn graph_cloud(n: usize, slope: f64, seed: u64) -> WeightedCloud {
    let mut rng = SplitMix64::new(seed);
    let pts: Vec<Point> = (0..n)
        .map(|_| {
            let s = 2.0 * rng.next_f64() - 1.0;
            [s, slope * (s * 7.0).sin() / 7.0, 0.0]
        })
        .collect();
    WeightedCloud::uniform(2, pts).unwrap()
}

fn suite_corona(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let mu = graph_cloud(1500, 0.03, seed.wrapping_add(3));
    let b0 = Ball { center: [0.0; 3], radius: 1.0 };
    let res = match corona(&mu, &b0, &CoronaParams::default()) {
        Ok(r) => r,
        Err(e) => {
            checks.push(Check::new("corona construction", false, e.to_string()));
            return checks;
        }
    };
    checks.push(Check::new(
        "corona Z mass on shallow graph",
        res.stats.mu_z >= 0.9 * res.stats.mu_e0,
        format!("mu(Z) {} of mu(E0) {}", res.stats.mu_z, res.stats.mu_e0),
    ));
    checks.push(Check::new(
        "corona graph slope",
        res.stats.slope <= 0.5,
        format!("slope {}", res.stats.slope),
    ));
    // partition of unity sums to 1 on covered probes
    let mut worst = 0.0_f64;
    let mut rng = SplitMix64::new(seed.wrapping_add(17));
    for _ in 0..500 {
        let s = 20.0 * (rng.next_f64() - 0.5);
        let t = 0.2 * (rng.next_f64() - 0.5);
        if res.whitney.covers([s, t]) {
            let sum: f64 = res.whitney.pou([s, t]).iter().map(|&(_, w)| w).sum();
            worst = worst.max((sum - 1.0).abs());
        }
    }
    checks.push(Check::new(
        "whitney partition of unity",
        worst <= 1e-9,
        format!("max |sum - 1| = {worst:.3e}"),
    ));
    let mut rng = SplitMix64::new(seed.wrapping_add(29));
    let pairs: Vec<(usize, usize)> = (0..2000)
        .map(|_| {
            (
                (rng.next_f64() * mu.len() as f64) as usize % mu.len(),
                (rng.next_f64() * mu.len() as f64) as usize % mu.len(),
            )
        })
        .collect();
    let viol = piperp_violation(&res, &mu, &pairs);
    checks.push(Check::new(
        "perpendicular projection bound on pairs",
        viol <= 1e-9,
        format!("max violation {viol:.3e}"),
    ));
    checks
}

fn suite_capacity() -> Vec<Check> {
    let mut checks = Vec::new();
    // scaling law Cap_s(lambda K) = lambda^s Cap_s(K)
    let (net, step) = capacity::ball_net([0.0; 3], 1.0, 2, 400);
    let base = capacity::capacity_s(&net, 1.0, step).unwrap();
    let lam = 2.0;
    let scaled: Vec<Point> = net.iter().map(|p| [p[0] * lam, p[1] * lam, p[2] * lam]).collect();
    let scaled_est = capacity::capacity_s(&scaled, 1.0, step * lam).unwrap();
    let ratio = scaled_est.value / (lam * base.value);
    checks.push(Check::new(
        "capacity scaling law s=1, lambda=2",
        (ratio - 1.0).abs() <= 0.02,
        format!("ratio {ratio:.5} (tol 2%)"),
    ));
    // capacity density condition on the half-plane scene
    let hp = halfplane_pair();
    let rep = capacity::cdc_check(&hp, [0.0; 3], 1.0, 0.5, 0.05, 41).unwrap();
    checks.push(Check::new(
        "cdc holds for half-plane complement",
        rep.holds,
        format!("capacity {} vs threshold {}", rep.capacity.value, rep.threshold),
    ));
    checks
}

fn suite_akn(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    // gap-strip family: eps^2 <= C * defect with pinned C = 10
    let grid = eps2_core::dini::log_grid(0.2, 4.0, 2.0_f64.powf(0.25));
    let mut worst = f64::NEG_INFINITY;
    for h in [0.05, 0.1, 0.2] {
        let pair = gap_strip_pair(h);
        let rep = spectral::akn_check(&pair, [0.0; 3], &grid, 10.0).unwrap();
        worst = worst.max(rep.max_violation);
    }
    checks.push(Check::new(
        "akn bound on gap-strip family (C = 10)",
        worst <= 1e-9,
        format!("max violation {worst:.3e}"),
    ));
    // random planar scenes, FH defect >= 0 exactly
    let mut rng = SplitMix64::new(seed.wrapping_add(41));
    let mut min_defect = f64::INFINITY;
    let mut max_violation = f64::NEG_INFINITY;
    for _ in 0..10 {
        let pair = random_planar_scene(rng.next_u64(), 5);
        for &r in &grid {
            if let Ok(p) = spectral::arc_profile(&pair, [0.0; 3], r) {
                min_defect = min_defect.min(p.fh_defect());
            }
        }
        let rep = spectral::akn_check(&pair, [0.0; 3], &grid, 10.0).unwrap();
        max_violation = max_violation.max(rep.max_violation);
    }
    checks.push(Check::new(
        "fh defect nonnegative on random scenes",
        min_defect >= 0.0,
        format!("min defect {min_defect:.3e}"),
    ));
    checks.push(Check::new(
        "akn bound on random scenes (C = 10)",
        max_violation <= 1e-9,
        format!("max violation {max_violation:.3e}"),
    ));
    // empty scene sanity: eps = pi exactly at every radius
    let empty = eps2_core::region::empty_pair(2);
    let eps = spectral::carleson_epsilon(&empty, [0.0; 3], 1.0).unwrap();
    checks.push(Check::new(
        "empty scene arc epsilon",
        (eps - PI).abs() <= 1e-12,
        format!("eps {eps} vs pi"),
    ));
    checks
}
