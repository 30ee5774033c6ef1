mod common;

use hitchin_nerve::contour::{
    integrate_branch_tracked, BranchState, ParamPath, Puncture, PunctureConfig, DEFAULT_TOL,
};
use hitchin_nerve::periods::{
    half_period, half_periods, period_triangle, PeriodTriangle, DEFAULT_BASEPOINT,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn triangle(t: Complex64, z0: Complex64) -> PeriodTriangle {
    let cfg = PunctureConfig::new(t).unwrap();
    let hp = half_periods(&cfg, z0, DEFAULT_TOL).unwrap();
    period_triangle(&hp).unwrap()
}

#[test]
fn real_t_matches_agm_complete_integrals() {
    // a = pi0 - pi1 is twice the integral over [0, 1]; c = pi1 - pit is twice the
    // integral over [1, 4], which is imaginary because the cubic is negative there.
    let tri = triangle(c(4.0, 0.0), DEFAULT_BASEPOINT);
    let inner = 2.0 * common::inner_real_period(4.0);
    let outer = 2.0 * common::outer_real_period(4.0);
    assert!(tri.a.im.abs() < 1e-9 * inner, "a = {}", tri.a);
    assert!(tri.c.re.abs() < 1e-9 * outer, "c = {}", tri.c);
    assert!(
        (tri.a.norm() - inner).abs() < 1e-8 * inner,
        "{} vs {inner}",
        tri.a.norm()
    );
    assert!(
        (tri.c.norm() - outer).abs() < 1e-8 * outer,
        "{} vs {outer}",
        tri.c.norm()
    );
    let b_expected = (inner * inner + outer * outer).sqrt();
    assert!((tri.b.norm() - b_expected).abs() < 1e-8 * b_expected);
}

#[test]
fn two_point_loop_matches_trapezoid_oracle() {
    let t = c(2.0, 0.5);
    let cfg = PunctureConfig::new(t).unwrap();
    let (center, radius) = (c(0.5, 0.1), 0.8);
    let path = ParamPath::circle(center, radius).unwrap();
    let r = integrate_branch_tracked(&path, &cfg, BranchState::Principal, DEFAULT_TOL).unwrap();
    assert_eq!(r.final_state, BranchState::Principal);
    let inside = [c(0.0, 0.0), c(1.0, 0.0)];
    let oracle = common::two_point_circle_integral(center, radius, inside, t, 4000);
    // align the oracle's branch with the principal root at the path start
    let start = path.start();
    let lib_root = cfg.cubic(start).sqrt();
    let oracle_root = common::two_point_root(start, center, inside, t);
    let sign = if (lib_root * oracle_root.conj()).re > 0.0 {
        1.0
    } else {
        -1.0
    };
    let oracle = oracle * sign;
    assert!(
        (r.value - oracle).norm() < 1e-10 * oracle.norm(),
        "{} vs {}",
        r.value,
        oracle
    );
}

#[test]
fn symmetric_t_gives_equal_moduli() {
    // z -> 1 - conj(z) fixes {0, 1, 1/2} and the basepoint 1/2 - 2i, swapping the loops
    // around 0 and 1; it preserves |dz / sqrt(cubic)|.
    let t = c(0.5, 0.0);
    let cfg = PunctureConfig::new(t).unwrap();
    let hp = half_periods(&cfg, c(0.5, -2.0), DEFAULT_TOL).unwrap();
    assert!((hp.pi0.norm() - hp.pi1.norm()).abs() < 1e-8 * hp.pi0.norm());
    // the sides b (over [0, 1/2]) and c (over [1/2, 1]) are swapped by z -> 1 - z
    let tri = triangle(t, DEFAULT_BASEPOINT);
    assert!((tri.b.norm() - tri.c.norm()).abs() < 1e-8 * tri.b.norm());
}

#[test]
fn triangle_is_basepoint_independent_up_to_global_sign() {
    let t = c(2.0, 0.5);
    let first = triangle(t, DEFAULT_BASEPOINT);
    let second = triangle(t, c(-1.5, -2.6));
    let sign = if (first.a * second.a.conj()).re > 0.0 {
        1.0
    } else {
        -1.0
    };
    for (x, y) in first.sides().iter().zip(second.sides()) {
        assert!((x - y * sign).norm() < 2.0 * DEFAULT_TOL, "{x} vs {y}");
    }
}

#[test]
fn radius_change_leaves_half_period_unchanged() {
    let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
    for p in Puncture::ALL {
        let r = 0.1 * cfg.nearest_other_distance(p);
        let (small, _) = half_period(
            &cfg,
            p,
            DEFAULT_BASEPOINT,
            r,
            BranchState::Principal,
            DEFAULT_TOL,
        )
        .unwrap();
        let (large, _) = half_period(
            &cfg,
            p,
            DEFAULT_BASEPOINT,
            3.0 * r,
            BranchState::Principal,
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(
            (small - large).norm() < 1e-8 * small.norm(),
            "{p}: {small} vs {large}"
        );
    }
}

#[test]
fn half_periods_vary_continuously_in_t() {
    for t in [c(2.0, 0.5), c(0.3, 0.7), c(5.0, 0.0), c(-1.0, 1.5)] {
        let cfg = PunctureConfig::new(t).unwrap();
        let cfg2 = PunctureConfig::new(t + c(1e-6, 0.0)).unwrap();
        let a = half_periods(&cfg, DEFAULT_BASEPOINT, DEFAULT_TOL).unwrap();
        let b = half_periods(&cfg2, DEFAULT_BASEPOINT, DEFAULT_TOL).unwrap();
        for p in Puncture::ALL {
            assert!((a.get(p) - b.get(p)).norm() < 1e-3, "t = {t}, {p}");
        }
    }
}
