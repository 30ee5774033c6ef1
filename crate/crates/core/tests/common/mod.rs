//! Reference computations that share no code with the library's integrator.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Complete elliptic integral of the first kind, parameter convention
/// `K(m) = int_0^{pi/2} (1 - m sin^2)^{-1/2}`, via the arithmetic-geometric mean.
pub fn ellip_k_agm(m: f64) -> f64 {
    assert!((0.0..1.0).contains(&m));
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-16 * an {
            a = an;
            break;
        }
        a = an;
        b = bn;
    }
    PI / (2.0 * a)
}

/// `int_0^1 dx / sqrt(x (1 - x) (lambda - x))` for `lambda > 1`.
pub fn inner_real_period(lambda: f64) -> f64 {
    2.0 / lambda.sqrt() * ellip_k_agm(1.0 / lambda)
}

/// `int_1^lambda dx / sqrt(x (x - 1) (lambda - x))` for `lambda > 1`.
pub fn outer_real_period(lambda: f64) -> f64 {
    2.0 / lambda.sqrt() * ellip_k_agm(1.0 - 1.0 / lambda)
}

/// Integral of `dz / sqrt(z (z - 1) (z - t))` over the positively oriented circle
/// `|z - center| = radius` enclosing exactly two of the branch points, by the
/// trapezoid rule on an explicitly single-valued factorization of the root.
///
/// Inside points `p, q` and outside point `r`:
/// `sqrt((z-p)(z-q)(z-r)) = (z - c) sqrt(1 - u_p) sqrt(1 - u_q) sqrt(c - r) sqrt(1 + (z - c)/(c - r))`
/// with `u = (x - c) / (z - c)`; each principal root has argument in `(-pi/2, pi/2)`.
pub fn two_point_circle_integral(
    center: Complex64,
    radius: f64,
    inside: [Complex64; 2],
    outside: Complex64,
    nodes: usize,
) -> Complex64 {
    let cr = center - outside;
    assert!(cr.norm() > radius);
    for p in inside {
        assert!((p - center).norm() < radius);
    }
    let root = |z: Complex64| {
        let w = z - center;
        let f1 = (Complex64::new(1.0, 0.0) - (inside[0] - center) / w).sqrt();
        let f2 = (Complex64::new(1.0, 0.0) - (inside[1] - center) / w).sqrt();
        let f3 = cr.sqrt() * (Complex64::new(1.0, 0.0) + w / cr).sqrt();
        w * f1 * f2 * f3
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = TAU * k as f64 / nodes as f64;
        let e = Complex64::from_polar(1.0, theta);
        let z = center + e * radius;
        let dz = Complex64::i() * e * radius;
        sum += dz / root(z);
    }
    sum * (TAU / nodes as f64)
}

/// Principal-branch value of the same factorized root at `z`, for relating
/// the oracle's branch to the library's.
pub fn two_point_root(
    z: Complex64,
    center: Complex64,
    inside: [Complex64; 2],
    outside: Complex64,
) -> Complex64 {
    let w = z - center;
    let cr = center - outside;
    w * (Complex64::new(1.0, 0.0) - (inside[0] - center) / w).sqrt()
        * (Complex64::new(1.0, 0.0) - (inside[1] - center) / w).sqrt()
        * cr.sqrt()
        * (Complex64::new(1.0, 0.0) + w / cr).sqrt()
}

/// Brute-force projected-length dominance: index (0-based) of the side with
/// the largest `|Re(e^{i phi / 2} s)|`.
pub fn brute_dominant(sides: [Complex64; 3], phi: f64) -> usize {
    let rot = Complex64::from_polar(1.0, phi / 2.0);
    let proj: Vec<f64> = sides.iter().map(|s| (rot * s).re.abs()).collect();
    let mut best = 0;
    for k in 1..3 {
        if proj[k] > proj[best] {
            best = k;
        }
    }
    best
}

/// Critical angle found by scanning and bisection, independent of the closed form.
pub fn scanned_critical_angle(side: Complex64) -> f64 {
    let g = |phi: f64| (Complex64::from_polar(1.0, phi / 2.0) * side).re;
    let n = 4096;
    for k in 0..n {
        let lo = TAU * k as f64 / n as f64;
        let hi = TAU * (k + 1) as f64 / n as f64;
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 {
            return lo;
        }
        if glo.signum() != ghi.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if g(m).signum() == g(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
    }
    panic!("no sign change found for side {side}");
}

/// Seeded suite of random circles around none, one, two or all three of
/// `{0, 1, t}`, each circle kept well clear of every branch point.
/// Returns `(t, center, radius, number of enclosed branch points)`.
pub fn random_loop_suite(seed: u64, count: usize) -> Vec<(Complex64, Complex64, f64, usize)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = Complex64::new(rng.gen_range(-2.0..3.0), rng.gen_range(-2.0..2.0));
        let points = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), t];
        if (t - points[0]).norm() < 0.3 || (t - points[1]).norm() < 0.3 {
            continue;
        }
        let center = Complex64::new(rng.gen_range(-2.0..3.0), rng.gen_range(-2.0..2.0));
        let radius = rng.gen_range(0.1..3.0);
        let clear = points
            .iter()
            .all(|p| ((p - center).norm() - radius).abs() > 0.1 * radius.max(0.5));
        if !clear {
            continue;
        }
        let enclosed = points
            .iter()
            .filter(|p| (*p - center).norm() < radius)
            .count();
        out.push((t, center, radius, enclosed));
    }
    out
}
