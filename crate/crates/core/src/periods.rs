//! Half-period integrals around `0`, `1`, `t` and the triangle of their differences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{
    integrate_branch_tracked, make_puncture_loop, BranchState, Puncture, PunctureConfig,
};
use crate::error::{Error, Result};

pub const DEFAULT_BASEPOINT: Complex64 = Complex64::new(-2.0, -2.0);

/// Loop radius as a fraction of the distance to the nearest other puncture.
pub const AUTO_RADIUS_FRACTION: f64 = 0.25;

/// Floor on `|Im(b / a)|` below which the triangle is treated as collinear.
pub const DEGENERACY_FLOOR: f64 = 1e-6;

const CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriods {
    pub pi0: Complex64,
    pub pi1: Complex64,
    pub pit: Complex64,
    pub basepoint: Complex64,
    pub tol_used: f64,
    /// Largest per-loop quadrature error estimate.
    pub max_error_estimate: f64,
}

impl HalfPeriods {
    pub fn get(&self, p: Puncture) -> Complex64 {
        match p {
            Puncture::Zero => self.pi0,
            Puncture::One => self.pi1,
            Puncture::T => self.pit,
        }
    }
}

pub fn auto_radius(config: &PunctureConfig, p: Puncture) -> f64 {
    AUTO_RADIUS_FRACTION * config.nearest_other_distance(p)
}

/// Integral of the form over the keyhole loop around `p`, starting on
/// `initial` at the basepoint.
pub fn half_period(
    config: &PunctureConfig,
    p: Puncture,
    z0: Complex64,
    radius: f64,
    initial: BranchState,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let path = make_puncture_loop(config, p, z0, radius)?;
    let r = integrate_branch_tracked(&path, config, initial, tol)?;
    Ok((r.value, r.error_estimate))
}

/// All three half-periods, each transported from the principal root at `z0`.
pub fn half_periods(config: &PunctureConfig, z0: Complex64, tol: f64) -> Result<HalfPeriods> {
    half_periods_on_branch(config, z0, tol, BranchState::Principal)
}

/// As [`half_periods`], with every loop starting on `initial` at `z0`.
pub fn half_periods_on_branch(
    config: &PunctureConfig,
    z0: Complex64,
    tol: f64,
    initial: BranchState,
) -> Result<HalfPeriods> {
    let mut values = [Complex64::new(0.0, 0.0); 3];
    let mut max_err: f64 = 0.0;
    for (slot, p) in values.iter_mut().zip(Puncture::ALL) {
        let (v, err) = half_period(config, p, z0, auto_radius(config, p), initial, tol)?;
        *slot = v;
        max_err = max_err.max(err);
    }
    Ok(HalfPeriods {
        pi0: values[0],
        pi1: values[1],
        pit: values[2],
        basepoint: z0,
        tol_used: tol,
        max_error_estimate: max_err,
    })
}

/// The triangle with sides `a = pi0 - pi1`, `b = pit - pi0`, `c = pi1 - pit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodTriangle {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl PeriodTriangle {
    /// Validates closure `a + b + c = 0` and non-degeneracy.
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let tri = PeriodTriangle { a, b, c };
        let scale = tri.scale();
        if !scale.is_finite() {
            return Err(Error::degenerate("non-finite side"));
        }
        if scale == 0.0 {
            return Err(Error::degenerate("all sides vanish"));
        }
        let closure = (a + b + c).norm();
        if closure > CLOSURE_TOL * scale {
            return Err(Error::degenerate(format!(
                "sides do not close: |a + b + c| = {closure:e} at scale {scale:e}"
            )));
        }
        if a.norm() == 0.0 || b.norm() == 0.0 || c.norm() == 0.0 {
            return Err(Error::degenerate("a side vanishes"));
        }
        let shape = (b / a).im.abs();
        if shape <= DEGENERACY_FLOOR {
            return Err(Error::degenerate(format!(
                "periods are collinear: |Im(b/a)| = {shape:e}"
            )));
        }
        Ok(tri)
    }

    pub fn sides(&self) -> [Complex64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn scale(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }

    pub fn scaled(&self, lambda: Complex64) -> Result<Self> {
        PeriodTriangle::new(self.a * lambda, self.b * lambda, self.c * lambda)
    }
}

pub fn period_triangle(hp: &HalfPeriods) -> Result<PeriodTriangle> {
    let a = hp.pi0 - hp.pi1;
    let b = hp.pit - hp.pi0;
    let c = hp.pi1 - hp.pit;
    PeriodTriangle::new(a, b, c)
}
