//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::fs;
use std::process::Command;
use std::time::Instant;

use wolbachia::analysis::{
    lyapunov_exponent, min_statistic, occupation_measure, stationary_ks, time_average,
    DEFAULT_AVERAGE_BURN_IN, DEFAULT_KS_SPACING, DEFAULT_SLOPE_BURN_IN,
};
use wolbachia::experiments::find_scenario;
use wolbachia::model::{classify, derive, drift, equilibria, stationary_law, GammaLaw, RegimeTag};
use wolbachia::sde::{
    simulate_boundary, simulate_coupled, simulate_ensemble, simulate_path, SimConfig, Trajectory,
};
use wolbachia::{ModelParams, Species, State};

const CASES: [(&str, f64, f64); 5] = [
    ("A.1", 1.0, 1.2),
    ("A.2", 0.2, 1.2),
    ("B.1", 0.1, 0.5),
    ("B.2", 1.1, 0.5),
    ("B.3", 0.6, 0.5),
];

fn base_rates(sigma_i: f64, sigma_u: f64) -> ModelParams {
    ModelParams::base_rates().with_noise(sigma_i, sigma_u)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Tracks that every path simulated here is nonnegative and absorbing.
#[derive(Default)]
struct Audit {
    paths: usize,
    bad: usize,
}

impl Audit {
    fn check(&mut self, t: &Trajectory) {
        self.paths += 1;
        if !(t.is_nonnegative() && t.respects_absorption()) {
            self.bad += 1;
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let lambda_i = [-0.1, 0.38, 0.395, -0.205, 0.22];
    let lambda_u = [-0.218, -0.218, 0.377, 0.377, 0.377];
    let mut worst: f64 = 0.0;
    for (k, &(_, si, su)) in CASES.iter().enumerate() {
        let d = derive(&base_rates(si, su));
        worst = worst
            .max(rel(d.lambda_i, lambda_i[k]))
            .max(rel(d.lambda_u, lambda_u[k]));
    }
    let a2 = stationary_law(&base_rates(0.2, 1.2), Species::Infected).unwrap();
    let b1 = stationary_law(&base_rates(0.1, 0.5), Species::Infected).unwrap();
    for (got, want) in [
        (a2.shape(), 19.0),
        (a2.rate(), 0.05),
        (b1.shape(), 79.0),
        (b1.rate(), 0.2),
    ] {
        worst = worst.max(rel(got, want));
    }
    Outcome {
        pass: worst <= 1e-14,
        detail: format!("max relative error {worst:.1e} (tolerance 1e-14)"),
    }
}

fn criterion_2() -> Outcome {
    let tags: Vec<RegimeTag> = CASES
        .iter()
        .map(|&(_, si, su)| classify(&base_rates(si, su)).unwrap().tag)
        .collect();
    let codes: Vec<&str> = tags.iter().map(|t| t.code()).collect();
    let expected: Vec<&str> = CASES.iter().map(|c| c.0).collect();
    Outcome {
        pass: codes == expected,
        detail: codes.join(", "),
    }
}

fn criterion_3(audit: &mut Audit) -> Outcome {
    let p = ModelParams::base_rates();
    let eq = equilibria(&p).unwrap();
    let targets = [
        (eq.e1, State::new(0.0, 502.0)),
        (eq.e2, State::new(400.0, 0.0)),
        (eq.e3, State::new(816.0 / 11.0, 3584.0 / 11.0)),
    ];
    let mut ok = true;
    let mut residual: f64 = 0.0;
    for (got, want) in targets {
        let got = got.expect("equilibrium exists");
        ok &= got.distance(&want) <= 1e-9 * (1.0 + want.norm());
        let (fi, fu) = drift(got, &p);
        residual = residual.max(fi.abs()).max(fu.abs());
    }
    ok &= residual <= 1e-10;

    let mut errs = Vec::new();
    for (initial, target) in [
        (State::new(100.0, 500.0), State::new(0.0, 502.0)),
        (State::new(120.0, 500.0), State::new(400.0, 0.0)),
    ] {
        let t = simulate_path(&SimConfig::new(initial, 600.0, 0), &p).unwrap();
        audit.check(&t);
        let e = t.final_state.distance(&target) / target.norm();
        ok &= e <= 0.01;
        errs.push(e);
    }
    Outcome {
        pass: ok,
        detail: format!(
            "drift residual {residual:.1e}; final distance to E1 {:.1e}, to E2 {:.1e} (relative, tolerance 1e-2)",
            errs[0], errs[1]
        ),
    }
}

/// Long boundary-I paths for seeds 0..20 at σ_I = 0.2 and 0.1.
fn boundary_runs(audit: &mut Audit) -> Vec<(f64, Vec<Trajectory>)> {
    [0.2, 0.1]
        .into_iter()
        .map(|sigma| {
            let p = base_rates(sigma, 0.0);
            let runs = (0..20)
                .map(|seed| {
                    let c = SimConfig::new(State::new(100.0, 500.0), 2000.0, seed);
                    let t = simulate_boundary(&c, &p, Species::Infected).unwrap();
                    audit.check(&t);
                    t
                })
                .collect();
            (sigma, runs)
        })
        .collect()
}

fn criterion_4(runs: &[(f64, Vec<Trajectory>)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for ((sigma, paths), target) in runs.iter().zip([380.0, 395.0]) {
        let avg = time_average(&paths[0], Species::Infected, 1.0, DEFAULT_AVERAGE_BURN_IN).unwrap();
        ok &= rel(avg, target) <= 0.05;
        parts.push(format!("σ_I = {sigma}: {avg:.2} vs {target}"));
    }
    Outcome {
        pass: ok,
        detail: format!("{} (seed 0, T = 2000, tolerance 5%)", parts.join("; ")),
    }
}

fn criterion_5(runs: &[(f64, Vec<Trajectory>)]) -> Outcome {
    let wrong = GammaLaw::new(19.0, 0.10).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for ((sigma, paths), law) in runs.iter().zip([
        GammaLaw::new(19.0, 0.05).unwrap(),
        GammaLaw::new(79.0, 0.2).unwrap(),
    ]) {
        let (mut right, mut rejected, mut n_min) = (0, 0, usize::MAX);
        for t in paths {
            let r = stationary_ks(t, Species::Infected, &law, 0.1, DEFAULT_KS_SPACING).unwrap();
            let w = stationary_ks(t, Species::Infected, &wrong, 0.1, DEFAULT_KS_SPACING).unwrap();
            right += r.pass as usize;
            rejected += !w.pass as usize;
            n_min = n_min.min(r.n);
        }
        ok &= right >= 18 && rejected >= 18 && n_min >= 150;
        parts.push(format!(
            "σ_I = {sigma}: {right}/20 accept {law}, {rejected}/20 reject {wrong} (n = {n_min})"
        ));
    }
    Outcome {
        pass: ok,
        detail: parts.join("; "),
    }
}

fn criterion_6(audit: &mut Audit) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, species, predicted) in [
        ("stoch-A2", Species::Uninfected, -1.148),
        ("stoch-B1", Species::Uninfected, -0.568),
        ("stoch-B2", Species::Infected, -0.582),
    ] {
        let s = find_scenario(name).unwrap();
        let paths = simulate_ensemble(&s.sim_config(0), &s.params, 20, 0, jobs()).unwrap();
        let mut sum = 0.0;
        for t in &paths {
            audit.check(t);
            sum += lyapunov_exponent(t, species, DEFAULT_SLOPE_BURN_IN)
                .unwrap()
                .slope;
        }
        let mean = sum / paths.len() as f64;
        ok &= rel(mean, predicted) <= 0.15;
        parts.push(format!(
            "{name} {}: {mean:.4} vs {predicted}",
            species.symbol()
        ));
    }
    Outcome {
        pass: ok,
        detail: format!("{} (tolerance 15%)", parts.join("; ")),
    }
}

fn criterion_7(audit: &mut Audit) -> Outcome {
    let s = find_scenario("stoch-B3").unwrap();
    let paths = simulate_ensemble(&s.sim_config(0), &s.params, 200, 0, jobs()).unwrap();
    paths.iter().for_each(|t| audit.check(t));
    let early = min_statistic(&paths, 5.0).unwrap();
    let late = min_statistic(&paths, 150.0).unwrap();
    let ratio = late / early;
    Outcome {
        pass: ratio < 0.1,
        detail: format!(
            "E[min(I, U)] {early:.4} at t = 5, {late:.3e} at t = 150, ratio {ratio:.2e} (< 0.1)"
        ),
    }
}

fn criterion_8(audit: &Audit, runs: &[(f64, Vec<Trajectory>)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = audit.bad == 0;
    parts.push(format!(
        "nonnegative and absorbing {}/{} paths",
        audit.paths - audit.bad,
        audit.paths
    ));

    let (mut checked, mut violations) = (0usize, 0usize);
    for &(_, si, su) in &CASES {
        for seed in 0..2 {
            let c = SimConfig::new(State::new(120.0, 500.0), 100.0, seed);
            let cp = simulate_coupled(&c, &base_rates(si, su)).unwrap();
            for k in 0..cp.full.len() {
                let s = cp.full.state(k);
                checked += 2;
                violations += (s.infected > cp.boundary_i.infected()[k] + 1e-6) as usize;
                violations += (s.uninfected > cp.boundary_u.uninfected()[k] + 1e-6) as usize;
            }
        }
    }
    let rate = violations as f64 / checked as f64;
    ok &= rate < 1e-3;
    parts.push(format!("coupled violations {rate:.1e}"));

    let mut worst_norm: f64 = 0.0;
    for (_, paths) in runs {
        for t in paths.iter().take(5) {
            let h = occupation_measure(&t.after(200.0), (100, 100));
            worst_norm = worst_norm.max((h.total() - 1.0).abs());
        }
    }
    ok &= worst_norm <= 1e-12;
    parts.push(format!("histogram mass error {worst_norm:.1e}"));

    let mut cdf_ok = true;
    for (shape, rate) in [
        (0.3, 2.0),
        (1.0, 1.0),
        (19.0, 0.05),
        (79.0, 0.2),
        (500.0, 3.0),
    ] {
        let law = GammaLaw::new(shape, rate).unwrap();
        let top = law.mean() + 60.0 * law.std_dev();
        let mut prev = 0.0;
        for k in 0..=2000 {
            let f = law.cdf(top * k as f64 / 2000.0);
            cdf_ok &= f >= prev;
            prev = f;
        }
        cdf_ok &= (1.0 - law.cdf(top)).abs() <= 1e-9;
    }
    ok &= cdf_ok;
    parts.push(format!("gamma_cdf monotone and saturating: {cdf_ok}"));

    let dir = std::env::temp_dir().join(format!("wolbachia-acceptance-{}", std::process::id()));
    let run = |sub: &str, jobs: &str| {
        let out = dir.join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_wolbachia"))
            .args([
                "scenario", "stoch-A1", "--seed", "0", "--jobs", jobs, "--out",
            ])
            .arg(&out)
            .env_remove("WOLBACHIA_SEED")
            .output()
            .unwrap()
            .status;
        (
            status.code(),
            fs::read(out.join("verdict.json")).unwrap_or_default(),
        )
    };
    let (a, b, c) = (run("a", "1"), run("b", "1"), run("c", "8"));
    let _ = fs::remove_dir_all(&dir);
    let bytes_ok = a.0 == Some(0) && !a.1.is_empty() && a.1 == b.1 && a.1 == c.1;
    ok &= bytes_ok;
    parts.push(format!(
        "verdict.json identical across reruns and --jobs 1/8: {bytes_ok}"
    ));

    Outcome {
        pass: ok,
        detail: parts.join("; "),
    }
}

fn main() {
    let mut audit = Audit::default();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |n, name, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((n, name, o, start.elapsed().as_secs_f64()));
    };

    timed(1, "derived-quantity table", &mut criterion_1);
    timed(2, "classifier table", &mut criterion_2);
    timed(3, "deterministic equilibria", &mut || {
        criterion_3(&mut audit)
    });
    let start = Instant::now();
    let runs = boundary_runs(&mut audit);
    let boundary_secs = start.elapsed().as_secs_f64();
    timed(4, "ergodic mean", &mut || criterion_4(&runs));
    timed(5, "stationary K-S", &mut || criterion_5(&runs));
    timed(6, "extinction exponents", &mut || criterion_6(&mut audit));
    timed(7, "min-statistic decay", &mut || criterion_7(&mut audit));
    timed(8, "property suites", &mut || criterion_8(&audit, &runs));

    println!();
    for (n, name, o, secs) in &results {
        let secs = if *n == 4 || *n == 5 {
            secs + boundary_secs / 2.0
        } else {
            *secs
        };
        println!(
            "criterion {n} {}: {name}: {} [{secs:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!(
        "\nacceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
