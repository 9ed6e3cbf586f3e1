use proptest::prelude::*;

use warpflow::diagnostics::{interpolate_cubic, scalar_lower_bound, Verdict};
use warpflow::flow::{FlowConfig, OuterBc, ReparamPair};
use warpflow::geometry::{build_grid, curvature, Profile};
use warpflow::io::{config_to_text, fmt_num, parse_config, Preset};

fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![
        Just(Preset::Hyperbolic),
        Just(Preset::Flat),
        (0.1f64..4.0).prop_map(|lambda_sq| Preset::ScaledHyperbolic { lambda_sq }),
        (-0.19f64..0.19, 0.5f64..4.0, 0.1f64..2.0).prop_map(|(epsilon, x_c, width)| Preset::PerturbedHyperbolic {
            epsilon,
            x_c,
            width
        }),
    ]
}

proptest! {
    #[test]
    fn verdict_agrees_with_margin_sign(margin in -1e3f64..1e3, tol in 0.0f64..1.0) {
        let v = Verdict::from_margin(margin, tol);
        if margin.abs() <= tol {
            prop_assert_eq!(v, Verdict::Boundary);
        } else {
            prop_assert_eq!(v.ok(), margin > 0.0);
        }
    }

    #[test]
    fn scalar_bound_solves_comparison_ode(t in 0.01f64..5.0, r0 in -20.0f64..-0.1, d in 2.0f64..6.0) {
        // b' = (2/d) b²
        let h = 1e-5 * t;
        let db = (scalar_lower_bound(t + h, r0, d) - scalar_lower_bound(t - h, r0, d)) / (2.0 * h);
        let b = scalar_lower_bound(t, r0, d);
        prop_assert!((db - 2.0 / d * b * b).abs() <= 1e-6 * (1.0 + b * b));
        prop_assert!(b >= r0 && b < 0.0);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics(
        c in prop::array::uniform4(-3.0f64..3.0),
        gaps in prop::collection::vec(0.05f64..0.5, 6..20),
        frac in 0.0f64..1.0,
    ) {
        let mut s = vec![0.0];
        for g in &gaps {
            s.push(s.last().unwrap() + g);
        }
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let f: Vec<f64> = s.iter().map(|&x| p(x)).collect();
        let r = frac * s.last().unwrap();
        let scale = 1.0 + s.last().unwrap().powi(3) * 3.0;
        prop_assert!((interpolate_cubic(&s, &f, r) - p(r)).abs() < 1e-10 * scale);
    }

    #[test]
    fn numbers_roundtrip_bit_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn config_text_roundtrips(
        preset in preset(),
        n in 2usize..6,
        length in 1.0f64..20.0,
        intervals in 8usize..2048,
        cfl in 0.01f64..0.5,
        t_end in 0.0f64..10.0,
        extrapolate in any::<bool>(),
        modified in any::<bool>(),
        record_every in 1usize..500,
    ) {
        let cfg = FlowConfig {
            n,
            length,
            intervals,
            cfl,
            t_end,
            outer_bc: if extrapolate { OuterBc::ExtrapolateZeroCurvatureGradient } else { OuterBc::DirichletExactHyperbolic },
            modified,
            record_every,
            ..FlowConfig::new(preset)
        };
        prop_assume!(cfg.validate().is_ok());
        prop_assert_eq!(parse_config(&config_to_text(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn reparameterization_inverts(n in 2usize..6, tau in 0.0f64..50.0) {
        for pair in ReparamPair::ALL {
            let t = pair.time(n, tau);
            prop_assert!((pair.tau(n, t) - tau).abs() <= 1e-9 * (1.0 + tau));
            prop_assert!(pair.scale(n, tau) >= 1.0);
        }
    }

    #[test]
    fn scaling_divides_curvature(lambda_sq in 0.25f64..4.0) {
        let grid = build_grid(4.0, 128, 0.0).unwrap();
        let p = Profile::from_fn(grid, 2, |_| 1.0, f64::sinh).unwrap();
        let a = curvature(&p).unwrap();
        let b = curvature(&p.scaled(lambda_sq)).unwrap();
        for i in 10..100 {
            prop_assert!((b.k0[i] * lambda_sq - a.k0[i]).abs() < 1e-9);
            prop_assert!((b.k1[i] * lambda_sq - a.k1[i]).abs() < 1e-9);
        }
    }
}
