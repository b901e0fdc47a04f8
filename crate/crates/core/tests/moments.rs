use graphcorr::moments::{
    gf_bound_forest, gf_bound_jk, gf_orbit_forests_bruteforce, gf_orbit_pseudoforests_bruteforce,
    incomplete_orbit_moment_er, lambert_w, log_orbit_product, orbit_moment_er, orbit_moment_gaussian,
    poisson_cycle_moment, second_moment_exact, second_moment_monte_carlo, zeta_threshold,
};
use graphcorr::oracle::{gf_unpruned, incomplete_orbit_moment_er_oracle, orbit_moment_er_oracle, poisson_cycle_moment_exact};
use graphcorr::orbit::{edge_orbits, node_cycles, orbits_up_to};
use graphcorr::{ErParams, GaussianParams, ModelParams, Permutation, SeedSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn per_orbit_moments_match_oracle() {
    for k in 1..=4 {
        for &p in &[0.1, 0.5, 0.9] {
            for &s in &[0.2, 0.6, 1.0] {
                let exact: f64 = orbit_moment_er(k, p, s).unwrap();
                assert!((exact - orbit_moment_er_oracle(k, p, s).unwrap()).abs() < 1e-12);
                if p * s < 1.0 {
                    let inc: f64 = incomplete_orbit_moment_er(k, p, s).unwrap();
                    assert!((inc - incomplete_orbit_moment_er_oracle(k, p, s).unwrap()).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn incomplete_orbit_moment_at_most_one_in_sparse_half() {
    for k in 1..=6 {
        for i in 1..=10 {
            for j in 1..=10 {
                let (p, s) = (0.05 * i as f64, 0.05 * j as f64);
                let v: f64 = incomplete_orbit_moment_er(k, p, s).unwrap();
                assert!(v <= 1.0 + 1e-15, "k={k} p={p} s={s}: {v}");
            }
        }
    }
}

#[test]
fn census_product_matches_per_orbit_product() {
    let er = ModelParams::Er(ErParams { n: 0, p: 0.3, s: 0.6 });
    let gauss = ModelParams::Gaussian(GaussianParams { n: 0, rho: 0.5 });
    for n in 1..=8 {
        Permutation::for_each_of_size(n, |sigma| {
            let (orbits, _) = edge_orbits(sigma);
            let mut by_orbit = (0.0, 0.0);
            for o in &orbits {
                by_orbit.0 += orbit_moment_er::<f64>(o.len(), 0.3, 0.6).unwrap().ln();
                by_orbit.1 += orbit_moment_gaussian::<f64>(o.len(), 0.5).unwrap().ln();
            }
            assert!((by_orbit.0 - log_orbit_product(&er, sigma).unwrap()).abs() < 1e-9);
            assert!((by_orbit.1 - log_orbit_product(&gauss, sigma).unwrap()).abs() < 1e-9);
        });
    }
}

#[test]
fn second_moment_monotone_in_correlation() {
    for n in 2..=6 {
        let mut last = 0.0;
        for i in 0..=8 {
            let rho = 0.1 * i as f64;
            let v = second_moment_exact(&ModelParams::Gaussian(GaussianParams { n, rho })).unwrap().exact.unwrap();
            assert!(v >= last - 1e-12, "n={n} rho={rho}");
            last = v;
        }
        let mut last = 0.0;
        for i in 0..=10 {
            let s = 0.1 * i as f64;
            let v = second_moment_exact(&ModelParams::Er(ErParams { n, p: 0.3, s })).unwrap().exact.unwrap();
            assert!(v >= last - 1e-12, "n={n} s={s}");
            last = v;
        }
    }
}

#[test]
fn monte_carlo_second_moment_brackets_exact() {
    let params = ModelParams::Er(ErParams { n: 6, p: 0.5, s: 0.4 });
    let exact = second_moment_exact(&params).unwrap().exact.unwrap();
    let mc = second_moment_monte_carlo(&params, 200_000, SeedSpec::new(31, 0)).unwrap().monte_carlo.unwrap();
    assert!((mc.mean - exact).abs() <= 2.0 * mc.ci, "exact {exact}, mc {} ± {}", mc.mean, mc.ci);
}

#[test]
fn generating_function_search_agrees_with_plain_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut checked = 0;
    while checked < 40 {
        let n = rng.gen_range(2..=9);
        let sigma = Permutation::uniform(n, &mut rng);
        let k = rng.gen_range(1..=5);
        if orbits_up_to(&sigma, k).len() > 14 {
            continue;
        }
        checked += 1;
        for &s in &[0.1, 0.5] {
            let pruned: f64 = gf_orbit_pseudoforests_bruteforce(&sigma, k, s).unwrap();
            assert!((pruned - gf_unpruned(&sigma, k, s, false).unwrap()).abs() < 1e-12);
            let forest: f64 = gf_orbit_forests_bruteforce(&sigma, k, s).unwrap();
            assert!((forest - gf_unpruned(&sigma, k, s, true).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn generating_function_bounds_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for round in 0..60 {
        let n = rng.gen_range(2..=10);
        let sigma = Permutation::uniform(n, &mut rng);
        let k = 2 + round % 4;
        let ct = node_cycles(&sigma).cycle_type();
        for &s in &[0.05, 0.1, 0.3] {
            let (Ok(pf), Ok(f)) = (
                gf_orbit_pseudoforests_bruteforce::<f64>(&sigma, k, s),
                gf_orbit_forests_bruteforce::<f64>(&sigma, k, s),
            ) else {
                continue;
            };
            assert!(pf <= gf_bound_jk(&ct, k, s) * (1.0 + 1e-12), "{sigma} k={k} s={s}");
            assert!(f <= gf_bound_forest(&ct, k, s) * (1.0 + 1e-12), "{sigma} k={k} s={s}");
        }
    }
}

#[test]
fn lambert_w_values() {
    let w: f64 = lambert_w(1.0).unwrap();
    assert!((w - 0.567_143_290_409_783_8).abs() < 1e-15);
    assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0f64).abs() < 1e-15);
    assert!((lambert_w(-(-1f64).exp()).unwrap() + 1.0f64).abs() < 1e-6);
    assert_eq!(lambert_w(0.0f64).unwrap(), 0.0);
    assert!(lambert_w(-1.0f64).is_err());
    let w32: f32 = lambert_w(2.0f32).unwrap();
    assert!((w32 * w32.exp() - 2.0).abs() < 1e-5);
}

#[test]
fn zeta_round_trip() {
    let (k, n, p, s) = (6usize, 500usize, 0.2, 0.8);
    let zeta: f64 = zeta_threshold(k, n, p, s).unwrap();
    let scale = (k * (k - 1) / 2) as f64 * p * s * s;
    let y = zeta / scale;
    let target = 2.0 * (2.0 * std::f64::consts::E * n as f64 / k as f64).ln() / ((k - 1) as f64 * p * s * s) - 1.0;
    assert!((y * y.ln() - y - target).abs() < 1e-10 * target.abs().max(1.0));
}

#[test]
fn poisson_cycle_moments_are_exact_for_small_n() {
    for n in 1..=6 {
        for a1 in 0..=n {
            for a2 in 0..=(n - a1) / 2 {
                let a = [a1, a2];
                assert!((poisson_cycle_moment(&a) - poisson_cycle_moment_exact(n, &a)).abs() < 1e-12, "n={n} a={a:?}");
            }
        }
    }
    // Beyond the budget Σ ℓ a_ℓ ≤ n the identity fails.
    assert!(poisson_cycle_moment_exact(2, &[3]) == 0.0 && poisson_cycle_moment(&[3]) > 0.0);
}
