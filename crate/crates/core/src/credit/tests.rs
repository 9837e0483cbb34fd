use super::*;
use crate::numerics::{bvn_cdf, gauss_hermite, norm_cdf, norm_inv_cdf};
use crate::sde_engine::{RngSpec, TimeGrid};
use crate::stats::ecdf_sorted;

fn stepped() -> SurvivalCurve {
    SurvivalCurve::new(vec![(1.0, 0.05), (3.0, 0.06), (5.0, 0.08), (7.0, 0.085), (10.0, 0.065)]).unwrap()
}

fn surface(eta: f64) -> SurvivalSurfaceParams {
    SurvivalSurfaceParams::new(stepped(), eta).unwrap()
}

const MATURITIES: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 7.0, 10.0];

#[test]
fn surface_parameters() {
    let p = surface(0.2);
    assert_eq!(p.m(0.0, 3.0), p.x0(3.0));
    assert_eq!(p.v(0.0), 0.0);
    assert!((p.v(2.0) - (0.08f64).exp_m1()).abs() < 1e-16);
    assert_eq!(p.x0(0.0), f64::INFINITY);
}

#[test]
fn surface_starts_on_curve_and_is_martingale() {
    let p = surface(0.25);
    let grid = TimeGrid::uniform(5.0, 10).unwrap();
    let sets = simulate_surface(&p, &MATURITIES, &grid, 40_000, RngSpec::new(9)).unwrap();
    for (set, &mat) in sets.iter().zip(&MATURITIES) {
        assert!(set.column(0).iter().all(|&s| s == p.curve.survival(mat)));
        for k in 1..grid.len() {
            assert!(set.mean_at(k).z_score(p.curve.survival(mat)) < 4.0, "T={mat}, k={k} {:?} {}", set.mean_at(k), p.curve.survival(mat));
        }
        let (lo, hi) = set.range();
        assert!(lo >= 0.0 && hi <= 1.0);
    }
    // maturity monotonicity pathwise
    for i in 0..sets[0].n_paths() {
        for k in 0..grid.len() {
            assert!(sets.windows(2).all(|w| w[1].value(i, k) <= w[0].value(i, k)));
        }
    }
}

#[test]
fn frozen_surface_without_volatility() {
    let p = surface(0.0);
    let grid = TimeGrid::uniform(3.0, 6).unwrap();
    let sets = simulate_surface(&p, &[4.0], &grid, 5, RngSpec::new(1)).unwrap();
    assert!(sets[0].paths().all(|r| r.iter().all(|&s| s == p.curve.survival(4.0))));
}

#[test]
fn surface_exports() {
    let p = surface(0.1);
    let grid = TimeGrid::uniform(1.0, 2).unwrap();
    let mats = [1.0, 2.0];
    let sets = simulate_surface(&p, &mats, &grid, 3, RngSpec::new(0)).unwrap();
    let mut buf = Vec::new();
    write_surface_csv(&mats, &sets, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("t,T,path,value"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 3);
    let mut buf = Vec::new();
    write_surface_summary(&p, &mats, &sets, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert_eq!(row[3], p.curve.survival(2.0));
}

#[test]
fn azema_coefficient_examples() {
    let p = SurvivalSurfaceParams::new(SurvivalCurve::flat(0.08).unwrap(), 0.15).unwrap();
    assert_eq!(azema_coefficients(&p, 0.0, 1.0).unwrap(), (1.0, 0.0));
    let t = 2.0;
    let (zeta, _) = azema_coefficients(&p, t, p.curve.survival(t)).unwrap();
    assert!((zeta - (0.5 * 0.0225 * t).exp()).abs() < 1e-14);
    let (_, d) = azema_coefficients(&p, t, 0.4).unwrap();
    assert!((d - 0.15 * crate::numerics::norm_pdf(norm_inv_cdf(0.4).unwrap())).abs() < 1e-16);
    assert!(azema_coefficients(&p, t, 1.2).is_err());
}

#[test]
fn azema_euler_converges() {
    let p = SurvivalSurfaceParams::new(SurvivalCurve::flat(0.08).unwrap(), 0.15).unwrap();
    let levels = azema_strong_error(&p, 5.0, &[25, 100], 16, 400, RngSpec::new(3)).unwrap();
    let ratio = levels[0].error.mean / levels[1].error.mean;
    assert!(ratio >= 1.8, "{levels:?}");
}

#[test]
fn conditional_survival_examples() {
    let p = surface(0.25);
    assert_eq!(conditional_survival(&p, 2.0, 2.0, 0.3).unwrap(), 1.0);
    let tiny = surface(1e-8);
    let want = stepped().survival(6.0) / stepped().survival(2.0);
    assert!((conditional_survival(&tiny, 2.0, 6.0, 1.5).unwrap() - want).abs() < 1e-6);
    assert!((expected_conditional_survival(&tiny, 2.0, 6.0, 16).unwrap() - want).abs() < 1e-6);
    for z in [-2.0, 0.0, 1.7] {
        let mut prev = 1.0;
        for i in 1..=90 {
            let q = conditional_survival(&p, 1.0, 1.0 + i as f64 * 0.1, z).unwrap();
            assert!(q <= prev && q > 0.0);
            prev = q;
        }
    }
    assert!(conditional_survival(&p, 0.0, 1.0, 0.0).is_err());
    assert!(conditional_survival(&p, 2.0, 1.0, 0.0).is_err());
}

#[test]
fn expected_conditional_survival_quadrature() {
    for eta in [0.1, 0.25] {
        let p = surface(eta);
        assert_eq!(expected_conditional_survival(&p, 1.0, 1.0, 16).unwrap(), 1.0);
        for &mat in &[2.0, 3.0, 5.0, 7.0, 10.0] {
            let a = expected_conditional_survival(&p, 1.0, mat, 16).unwrap();
            let b = expected_conditional_survival(&p, 1.0, mat, 64).unwrap();
            assert!((a - b).abs() < 1e-6, "eta={eta}, T={mat}: {a} vs {b}");
            let gap = conditional_survival_gap(&p, 1.0, mat, 64).unwrap();
            assert!(gap.is_finite() && gap.abs() < 0.1);
        }
    }
}

#[test]
fn q_cdf_properties() {
    let p = surface(0.25);
    let (t, mat) = (1.0, 5.0);
    let mut prev = 0.0;
    for i in 1..100 {
        let v = q_cdf(&p, t, mat, i as f64 / 100.0).unwrap();
        assert!(v >= prev);
        prev = v;
    }
    assert_eq!(q_cdf(&p, t, mat, 0.0).unwrap(), 0.0);
    assert_eq!(q_cdf(&p, t, mat, 1.0).unwrap(), 1.0);
    assert!(q_cdf(&p, t, mat, 1e-6).unwrap() < 1e-3);
    assert!(q_cdf(&p, t, mat, 1.0 - 1e-9).unwrap() > 0.999);
    let flat = surface(0.0);
    let ratio = stepped().survival(mat) / stepped().survival(t);
    assert_eq!(q_cdf(&flat, t, mat, ratio - 1e-9).unwrap(), 0.0);
    assert_eq!(q_cdf(&flat, t, mat, ratio + 1e-9).unwrap(), 1.0);
}

#[test]
fn q_cdf_uniqueness_witness() {
    let p = surface(0.25);
    let (t, mat) = (1.0, 5.0);
    let m = p.m(t, t) - p.m(t, mat);
    for x in [0.2, 0.6, 0.9] {
        let y0 = q_cdf_turning_point(&p, t, mat, x);
        let gt = |y: f64| x * crate::numerics::norm_pdf(m + y) - crate::numerics::norm_pdf(y);
        for d in [0.01, 0.5, 3.0] {
            assert!(gt(y0 - d) > 0.0 && gt(y0 + d) < 0.0);
        }
        assert!(gt(y0).abs() < 1e-15);
    }
}

#[test]
fn q_cdf_against_empirical_law() {
    let p = surface(0.25);
    let (t, mat) = (1.0, 5.0);
    let r = RngSpec::new(515);
    let mut qs: Vec<f64> = (0..100_000u64).map(|i| conditional_survival(&p, t, mat, r.normal(i, 0)).unwrap()).collect();
    qs.sort_by(f64::total_cmp);
    let worst = (1..100)
        .map(|i| {
            let x = i as f64 / 100.0;
            (q_cdf(&p, t, mat, x).unwrap() - ecdf_sorted(&qs, x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 0.01, "{worst}");
}

fn fig4(rho: f64) -> BivariateParams {
    BivariateParams::new(SurvivalCurve::flat(0.08).unwrap(), SurvivalCurve::flat(0.125).unwrap(), 0.15, 0.25, rho).unwrap()
}

#[test]
fn copula_correlation_examples() {
    let same = BivariateParams::new(stepped(), stepped(), 0.2, 0.2, -0.4).unwrap();
    assert!((copula_correlation(&same) + 0.4).abs() < 1e-15);
    assert_eq!(copula_correlation(&fig4(0.0)), 0.0);
    assert!((copula_correlation(&fig4(0.8)) - 0.06 / 0.085).abs() < 1e-15);
    assert!((copula_correlation(&fig4(0.8)) - 0.705882).abs() < 1e-6);
    for rho in [-1.0, -0.3, 0.5, 1.0] {
        assert!(copula_correlation(&fig4(rho)).abs() <= rho.abs());
    }
    assert!(BivariateParams::new(stepped(), stepped(), 0.0, 0.0, 0.1).is_err());
    assert!(BivariateParams::new(stepped(), stepped(), 0.1, 0.1, 1.1).is_err());
}

#[test]
fn bivariate_independent_start() {
    let b = fig4(0.0);
    let grid = TimeGrid::uniform(1.0, 4).unwrap();
    let g = bivariate_surface(&b, Maturities::Fixed(5.0, 5.0), &grid, 3, RngSpec::new(1)).unwrap();
    let want = b.curve1.survival(5.0) * b.curve2.survival(5.0);
    assert!(g.column(0).iter().all(|&v| (v - want).abs() < 1e-15));
}

#[test]
fn bivariate_bounds_and_martingale() {
    let grid = TimeGrid::uniform(5.0, 100).unwrap();
    for rho in [-0.8, 0.0, 0.8] {
        let b = fig4(rho);
        let paths = simulate_bivariate(&b, Maturities::Fixed(5.0, 5.0), &grid, 4_000, RngSpec::new(6), copula_correlation(&b)).unwrap();
        for i in 0..paths.g.n_paths() {
            for k in 0..grid.len() {
                let (s1, s2, g) = (paths.s1.value(i, k), paths.s2.value(i, k), paths.g.value(i, k));
                assert!(g <= s1.min(s2) + 1e-15 && g >= (s1 + s2 - 1.0).max(0.0) - 1e-15);
            }
        }
        let m = paths.g.mean_at(100);
        assert!(m.z_score(b.initial_joint_survival(5.0, 5.0)) < 3.5, "rho={rho}: {m:?}");
    }
}

#[test]
fn running_maturity_mean() {
    let b = fig4(0.8);
    let grid = TimeGrid::uniform(4.0, 8).unwrap();
    let g = bivariate_surface(&b, Maturities::Running, &grid, 40_000, RngSpec::new(12)).unwrap();
    let r = copula_correlation(&b);
    for (k, &t) in grid.times().iter().enumerate().skip(1) {
        let want = bvn_cdf(
            norm_inv_cdf(b.curve1.survival(t)).unwrap(),
            norm_inv_cdf(b.curve2.survival(t)).unwrap(),
            r,
        )
        .unwrap();
        assert!(g.mean_at(k).z_score(want) < 4.0, "t={t}");
    }
}

#[test]
fn bivariate_draws_are_shared_across_rho() {
    let grid = TimeGrid::uniform(1.0, 5).unwrap();
    let a = simulate_bivariate(&fig4(-0.8), Maturities::Fixed(3.0, 3.0), &grid, 10, RngSpec::new(2), 0.0).unwrap();
    let b = simulate_bivariate(&fig4(0.8), Maturities::Fixed(3.0, 3.0), &grid, 10, RngSpec::new(2), 0.0).unwrap();
    // the first factor only depends on stream 0
    assert_eq!(a.s1, b.s1);
    assert_ne!(a.s2, b.s2);
}

#[test]
fn xi_coefficients() {
    let b = fig4(0.8);
    let r = copula_correlation(&b);
    let (s1, s2) = (0.93, 0.88);
    let (x1, x2) = (norm_inv_cdf(s1).unwrap(), norm_inv_cdf(s2).unwrap());
    let t = 0.25;
    let (xi1, xi2) = bivariate_azema_coefficients(&b, t, s1, s2).unwrap();
    let (h1, _) = crate::numerics::bvn_partials(x1, x2, r).unwrap();
    let (h2, _) = crate::numerics::bvn_partials(x2, x1, r).unwrap();
    let d = |c: &SurvivalCurve| crate::numerics::norm_pdf(norm_inv_cdf(c.survival(t)).unwrap());
    assert!((xi1 - (0.5 * 0.0225 * t).exp() * h1 / d(&b.curve1)).abs() < 1e-13 * xi1);
    assert!((xi2 - (0.5 * 0.0625 * t).exp() * h2 / d(&b.curve2)).abs() < 1e-13 * xi2);
    // swapping the two names swaps the coefficients
    let swapped = BivariateParams::new(b.curve2.clone(), b.curve1.clone(), b.eta2, b.eta1, b.rho).unwrap();
    let (a1, a2) = bivariate_azema_coefficients(&b, 1.5, s1, s2).unwrap();
    let (c1, c2) = bivariate_azema_coefficients(&swapped, 1.5, s2, s1).unwrap();
    assert!((a1 - c2).abs() < 1e-15 && (a2 - c1).abs() < 1e-15);
    assert!(bivariate_azema_coefficients(&b, 1.0, 1.0, 0.5).is_err());
}

#[test]
fn xi_matches_maturity_roll_of_joint_survival() {
    // G_t(T,T) at a fixed factor value, rolled from T = t to T = t + δ, moves
    // by ξ¹ΔS¹₀ + ξ²ΔS²₀ to first order
    let b = SurvivalCurve::new(vec![(2.0, 0.05), (4.0, 0.09)])
        .and_then(|c1| BivariateParams::new(c1, SurvivalCurve::flat(0.12).unwrap(), 0.2, 0.3, 0.5))
        .unwrap();
    let r = copula_correlation(&b);
    let (mu1, mu2) = b.mu();
    let t = 1.3;
    let (u1, u2) = (0.17, -0.25);
    let x = |mat: f64| {
        (
            norm_inv_cdf(b.curve1.survival(mat)).unwrap() * (mu1 * t).exp() + u1,
            norm_inv_cdf(b.curve2.survival(mat)).unwrap() * (mu2 * t).exp() + u2,
        )
    };
    let (x1, x2) = x(t);
    let (xi1, xi2) = bivariate_azema_coefficients(&b, t, norm_cdf(x1), norm_cdf(x2)).unwrap();
    for delta in [1e-3, 1e-4] {
        let (y1, y2) = x(t + delta);
        let roll = bvn_cdf(y1, y2, r).unwrap() - bvn_cdf(x1, x2, r).unwrap();
        let lin = xi1 * (b.curve1.survival(t + delta) - b.curve1.survival(t))
            + xi2 * (b.curve2.survival(t + delta) - b.curve2.survival(t));
        assert!((roll - lin).abs() < 50.0 * delta * roll.abs(), "delta={delta}: {roll} vs {lin}");
    }
}

#[test]
fn gauss_hermite_is_used_for_expectation() {
    let p = surface(0.25);
    let rule = gauss_hermite(16).unwrap();
    let manual: f64 = rule.iter().map(|(z, w)| w * conditional_survival(&p, 1.0, 5.0, z).unwrap()).sum();
    assert_eq!(manual, expected_conditional_survival(&p, 1.0, 5.0, 16).unwrap());
}

#[test]
fn surface_density_integrates_to_one() {
    let p = surface(0.25);
    let mass = crate::numerics::integrate_adaptive(|s| surface_density(&p, 3.0, 5.0, s), 0.0, 1.0, 1e-12, 1e-10, 500).unwrap().value;
    assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    let eps = 1e-6;
    let x = norm_inv_cdf(0.7).unwrap();
    let cdf = |s: f64| norm_cdf((norm_inv_cdf(s).unwrap() - p.m(3.0, 5.0)) / p.v(3.0).sqrt());
    let fd = (cdf(0.7 + eps) - cdf(0.7 - eps)) / (2.0 * eps);
    assert!((fd - surface_density(&p, 3.0, 5.0, 0.7)).abs() < 1e-6 * fd.max(1.0), "{x}");
    assert_eq!(surface_density(&p, 0.0, 5.0, 0.5), 0.0);
}

#[test]
fn azema_paths_share_noise_and_stay_close() {
    let p = SurvivalSurfaceParams::new(SurvivalCurve::flat(0.08).unwrap(), 0.15).unwrap();
    let grid = TimeGrid::uniform(5.0, 500).unwrap();
    let (exact, euler) = azema_paths(&p, &grid, 50, RngSpec::new(3)).unwrap();
    assert_eq!(exact.value(0, 0), 1.0);
    assert_eq!(euler.value(0, 0), 1.0);
    let worst = (0..50).flat_map(|i| (0..grid.len()).map(move |k| (i, k))).map(|(i, k)| (exact.value(i, k) - euler.value(i, k)).abs()).fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
    for k in [100, 500] {
        assert!((exact.mean_at(k).mean - euler.mean_at(k).mean).abs() < 0.01);
    }
}

#[test]
fn q_cdf_small_factor_variance() {
    // √v(0.2) ≈ 0.022: the root sits far out in z
    let p = surface(0.05);
    let (t, mat) = (0.2, 3.0);
    let r = RngSpec::new(77);
    let mut qs: Vec<f64> = (0..20_000u64).map(|i| conditional_survival(&p, t, mat, r.normal(i, 0)).unwrap()).collect();
    qs.sort_by(f64::total_cmp);
    for x in [0.8, 0.85, 0.86, 0.9, 0.99] {
        let c = q_cdf(&p, t, mat, x).unwrap();
        assert!((c - ecdf_sorted(&qs, x)).abs() < 0.02, "x={x}: {c}");
    }
}
