mod common;

use std::f64::consts::TAU;

use hitchin_nerve::periods::PeriodTriangle;
use hitchin_nerve::rotation::{
    arc_decomposition, critical_angle, dominant_side, projections, wrapped_difference, Side,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn triangle_strategy() -> impl Strategy<Value = PeriodTriangle> {
    (0.2f64..5.0, 0.0f64..TAU, 0.2f64..5.0, 0.0f64..TAU).prop_filter_map(
        "non-degenerate",
        |(ra, ta, rb, tb)| {
            let a = Complex64::from_polar(ra, ta);
            let b = Complex64::from_polar(rb, tb);
            let tri = PeriodTriangle::new(a, b, -a - b).ok()?;
            ((b / a).im.abs() > 1e-2 * (b / a).norm()).then_some(tri)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn critical_angles_are_unique_zeros(tri in triangle_strategy()) {
        for s in tri.sides() {
            let phi = critical_angle(s).unwrap();
            let proj = (Complex64::from_polar(1.0, phi / 2.0) * s).re;
            prop_assert!(proj.abs() < 1e-12 * s.norm());
            let scanned = common::scanned_critical_angle(s);
            prop_assert!(wrapped_difference(phi, scanned).abs() < 1e-9);
        }
    }

    #[test]
    fn dominance_of_b_and_c_swaps_across_phi_a(tri in triangle_strategy()) {
        let (angles, _) = arc_decomposition(&tri).unwrap();
        let gap = |phi: f64| {
            let p = projections(&tri, phi);
            p[1].abs() - p[2].abs()
        };
        let (before, after) = (gap(angles.phi_a - 1e-3), gap(angles.phi_a + 1e-3));
        prop_assert!(before * after < 0.0, "{before} {after}");
    }

    #[test]
    fn arcs_match_brute_force_dominance(tri in triangle_strategy()) {
        let (_, arcs) = arc_decomposition(&tri).unwrap();
        let sides = tri.sides();
        let n = 10_000;
        for k in 0..n {
            let phi = TAU * (k as f64 + 0.5) / n as f64;
            let (side, margin) = dominant_side(&tri, phi);
            if margin < 1e-9 * tri.scale() {
                continue;
            }
            prop_assert_eq!(side.index(), common::brute_dominant(sides, phi));
            prop_assert_eq!(arcs.arc_containing(phi, 0.0), Some(side));
        }
    }

    #[test]
    fn angles_covary_with_scaling(tri in triangle_strategy(), r in 0.1f64..10.0, theta in -3.0f64..3.0) {
        let (base, _) = arc_decomposition(&tri).unwrap();
        let (real, _) = arc_decomposition(&tri.scaled(Complex64::new(r, 0.0)).unwrap()).unwrap();
        let (flip, _) = arc_decomposition(&tri.scaled(Complex64::new(-1.0, 0.0)).unwrap()).unwrap();
        let (rot, _) = arc_decomposition(&tri.scaled(Complex64::from_polar(1.0, theta)).unwrap()).unwrap();
        for s in Side::ALL {
            prop_assert!(wrapped_difference(real.get(s), base.get(s)).abs() < 1e-12);
            prop_assert!(wrapped_difference(flip.get(s), base.get(s)).abs() < 1e-12);
            prop_assert!(wrapped_difference(rot.get(s), base.get(s) - 2.0 * theta).abs() < 1e-11);
        }
    }

    #[test]
    fn arcs_tile_the_circle(tri in triangle_strategy()) {
        let (angles, arcs) = arc_decomposition(&tri).unwrap();
        let total: f64 = arcs.arcs.iter().map(|a| a.length()).sum();
        prop_assert!((total - TAU).abs() < 1e-12);
        for s in Side::ALL {
            prop_assert!(!arcs.arc(s).contains(angles.get(s)));
        }
    }
}
