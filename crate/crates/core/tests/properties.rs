use conic::conic_core::Mapping;
use conic::credit::{conditional_survival, q_cdf, SurvivalCurve, SurvivalSurfaceParams};
use conic::numerics::{bvn_cdf, norm_cdf, norm_inv_cdf};
use conic::phi_martingale::{phi_cdf, phi_quantile, PhiMartingaleParams};
use conic::sde_engine::{PathSet, RngSpec, TimeGrid};
use proptest::prelude::*;

fn curve() -> impl Strategy<Value = SurvivalCurve> {
    prop::collection::vec((0.1f64..3.0, 0.0f64..0.3), 1..6).prop_map(|pieces| {
        let mut end = 0.0;
        let records = pieces
            .into_iter()
            .map(|(len, h)| {
                end += len;
                (end, h)
            })
            .collect();
        SurvivalCurve::new(records).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bvn_within_frechet_bounds(a in -6.0f64..6.0, b in -6.0f64..6.0, rho in -0.999f64..0.999) {
        let (pa, pb) = (norm_cdf(a), norm_cdf(b));
        let g = bvn_cdf(a, b, rho).unwrap();
        prop_assert!(g >= (pa + pb - 1.0).max(0.0) - 1e-14);
        prop_assert!(g <= pa.min(pb) + 1e-14);
    }

    #[test]
    fn bvn_monotone_in_each_argument(a in -5.0f64..5.0, b in -5.0f64..5.0, da in 0.0f64..2.0, rho in -0.99f64..0.99, dr in 0.0f64..0.5) {
        let g = bvn_cdf(a, b, rho).unwrap();
        prop_assert!(bvn_cdf(a + da, b, rho).unwrap() >= g - 1e-14);
        prop_assert!(bvn_cdf(a, b + da, rho).unwrap() >= g - 1e-14);
        let r2 = (rho + dr).min(0.99);
        prop_assert!(bvn_cdf(a, b, r2).unwrap() >= g - 1e-14);
    }

    #[test]
    fn normal_cdf_and_quantile_invert(x in -8.0f64..5.0, p in 1e-12f64..(1.0 - 1e-12)) {
        let back = norm_inv_cdf(norm_cdf(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-8 * (1.0 + x.abs()), "{x} -> {back}");
        let q = norm_cdf(norm_inv_cdf(p).unwrap());
        prop_assert!((q - p).abs() <= 1e-13 * p.max(1e-3));
    }

    #[test]
    fn mapping_inverse_round_trips(x in -4.0f64..4.0, c in 0.2f64..5.0, lambda in 0.2f64..3.0) {
        let maps = [
            Mapping::phi(),
            Mapping::logistic(c).unwrap(),
            Mapping::tanh_half(),
            Mapping::bimodal(0.0, 1.5, 0.7).unwrap(),
            Mapping::exp_neg(lambda).unwrap(),
        ];
        for m in &maps {
            let y = m.value(x);
            let (lo, hi) = m.image();
            prop_assert!(y >= lo && y <= hi);
            prop_assert!(m.density(x) >= 0.0);
            if y > lo + 1e-9 && y < hi - 1e-9 {
                let back = m.inverse(y).unwrap();
                prop_assert!((m.value(back) - y).abs() <= 1e-12 * (1.0 + y.abs()), "{m:?} at {x}");
            }
        }
    }

    #[test]
    fn survival_curve_is_monotone(c in curve(), times in prop::collection::vec(0.0f64..20.0, 2..20)) {
        prop_assert_eq!(c.survival(0.0), 1.0);
        let mut times = times;
        times.sort_by(f64::total_cmp);
        let s: Vec<f64> = times.iter().map(|&t| c.survival(t)).collect();
        prop_assert!(s.iter().all(|&v| v > 0.0 && v <= 1.0));
        prop_assert!(s.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn conditional_survival_is_a_probability_decreasing_in_maturity(
        c in curve(), eta in 0.01f64..0.6, t in 0.1f64..4.0, gap in 0.0f64..6.0, more in 0.0f64..3.0, z in -5.0f64..5.0,
    ) {
        let p = SurvivalSurfaceParams::new(c, eta).unwrap();
        let q1 = conditional_survival(&p, t, t + gap, z).unwrap();
        let q2 = conditional_survival(&p, t, t + gap + more, z).unwrap();
        prop_assert!((0.0..=1.0).contains(&q1));
        prop_assert!(q2 <= q1 + 1e-15);
    }

    #[test]
    fn q_cdf_is_a_cdf(c in curve(), eta in 0.05f64..0.5, t in 0.2f64..3.0, gap in 0.5f64..6.0, x in 0.01f64..0.98, dx in 0.0f64..0.5) {
        let p = SurvivalSurfaceParams::new(c, eta).unwrap();
        let lo = q_cdf(&p, t, t + gap, x).unwrap();
        let hi = q_cdf(&p, t, t + gap, (x + dx).min(0.999)).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn phi_quantile_inverts_phi_cdf(y0 in 0.02f64..0.98, eta in 0.05f64..1.0, t in 0.01f64..5.0, prob in 0.01f64..0.99) {
        let p = PhiMartingaleParams::new(y0, eta).unwrap();
        let q = phi_quantile(&p, t, prob).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        // near 0 and 1 the round trip is limited by the resolution of q itself
        if q > 1e-6 && q < 1.0 - 1e-6 {
            prop_assert!((phi_cdf(&p, t, q) - prob).abs() <= 1e-9);
        }
        prop_assert!(phi_quantile(&p, t, (prob + 0.005).min(0.995)).unwrap() >= q);
    }

    #[test]
    fn normals_are_a_pure_function_of_their_counter(seed in any::<u64>(), path in any::<u64>(), step in any::<u32>()) {
        let a = RngSpec::new(seed).normal(path, step);
        prop_assert!(a.is_finite());
        prop_assert_eq!(a.to_bits(), RngSpec::new(seed).normal(path, step).to_bits());
    }

    #[test]
    fn path_sets_round_trip_through_json(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 1..5), seed in any::<u64>()) {
        let grid = TimeGrid::uniform(1.5, 3).unwrap();
        let set = PathSet::from_rows(grid, rows, seed, "prop").unwrap();
        prop_assert_eq!(PathSet::from_json(&set.to_json().unwrap()).unwrap(), set);
    }
}
