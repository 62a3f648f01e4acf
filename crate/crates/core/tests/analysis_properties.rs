use proptest::prelude::*;

use wolbachia::analysis::{
    gamma_cdf, ks_statistic, ks_test, lyapunov_exponent, occupation_measure, time_average,
};
use wolbachia::model::GammaLaw;
use wolbachia::sde::{simulate_boundary, simulate_path, SimConfig};
use wolbachia::{ModelParams, Species, State};

fn short_path(sigma: (f64, f64), seed: u64) -> wolbachia::sde::Trajectory {
    let c = SimConfig {
        dt: 1e-3,
        record_stride: 10,
        ..SimConfig::new(State::new(120.0, 500.0), 50.0, seed)
    };
    simulate_path(&c, &ModelParams::base_rates().with_noise(sigma.0, sigma.1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn histogram_is_normalized(seed in any::<u64>(), ni in 1usize..60, nu in 1usize..60) {
        let t = short_path((0.6, 0.5), seed);
        let h = occupation_measure(&t, (ni, nu));
        prop_assert!((h.total() - 1.0).abs() < 1e-12);
        for s in Species::BOTH {
            let m: f64 = h.marginal(s).iter().sum();
            prop_assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn time_average_agrees_with_histogram_mean(seed in any::<u64>()) {
        let t = short_path((0.2, 0.5), seed).after(5.0);
        let h = occupation_measure(&t, (100, 100));
        for s in Species::BOTH {
            // the histogram weights points equally, the time average is
            // trapezoidal; they differ by at most one bin width plus an end term
            let avg = time_average(&t, s, 1.0, 0.0).unwrap();
            prop_assert!((avg - h.marginal_mean(s)).abs() <= h.bin_width(s), "{:?}", s);
        }
    }
}

#[test]
fn boundary_time_average_matches_long_run_mean() {
    let p = ModelParams::base_rates().with_noise(0.2, 0.0);
    let c = SimConfig::new(State::new(100.0, 500.0), 1000.0, 4);
    let t = simulate_boundary(&c, &p, Species::Infected).unwrap();
    let avg = time_average(&t, Species::Infected, 1.0, 0.1).unwrap();
    assert!((avg - 380.0).abs() / 380.0 < 0.05, "{avg}");
}

#[test]
fn extinction_slope_of_dying_boundary() {
    // σ_U large enough that λ_U < 0: ln Ǔ(t)/t → λ_U = -0.218 on the boundary
    let p = ModelParams::base_rates().with_noise(0.0, 1.2);
    let slopes: Vec<f64> = (0..10)
        .map(|seed| {
            let c = SimConfig::new(State::new(0.0, 500.0), 300.0, seed);
            let t = simulate_boundary(&c, &p, Species::Uninfected).unwrap();
            lyapunov_exponent(&t, Species::Uninfected, 0.2)
                .unwrap()
                .slope
        })
        .collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!((mean + 0.218).abs() / 0.218 < 0.15, "{mean}");
}

#[test]
fn ks_rejects_distant_samples_and_extinct_values() {
    let law = GammaLaw::new(19.0, 0.05).unwrap();
    let far: Vec<f64> = (1..=50).map(|k| k as f64 * 1e4).collect();
    assert!(!ks_test(&far, &law).unwrap().pass);
    // a path whose U column reached 0 cannot be tested against a Gamma law
    let mut zeros = far.clone();
    zeros[10] = 0.0;
    assert!(ks_test(&zeros, &law).is_err());
}

#[test]
fn statistic_against_own_cdf_of_uniform_grid() {
    let samples: Vec<f64> = (0..10).map(|k| (k as f64 + 0.5) / 10.0).collect();
    assert!((ks_statistic(&samples, |x| x.clamp(0.0, 1.0)) - 0.05).abs() < 1e-15);
}

#[test]
fn gamma_cdf_reference_values() {
    // Ga(1, β) is exponential; Ga(k, 1) at x = k has known values
    let exp = GammaLaw::new(1.0, 0.5).unwrap();
    assert!((gamma_cdf(&exp, 2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    let g = GammaLaw::new(2.0, 1.0).unwrap();
    let expected = 1.0 - 3.0 * (-2.0f64).exp();
    assert!((gamma_cdf(&g, 2.0) - expected).abs() < 1e-14);
    assert_eq!(gamma_cdf(&g, 0.0), 0.0);
    assert_eq!(gamma_cdf(&g, -1.0), 0.0);
}
