//! Critical angles of the rotating period triangle and the resulting split of
//! the circle into three dominance arcs.
//!
//! Rotating the triangle by `phi / 2` sweeps each side through a half-turn as
//! `phi` runs over `[0, 2 pi)`, so each side becomes purely imaginary exactly
//! once. Because `a + b + c = 0`, the side with the largest projection
//! `|Re(e^{i phi/2} s)|` is the one whose projection has the opposite sign to
//! the other two, and dominance can only change hands where some projection
//! vanishes, i.e. at a critical angle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periods::PeriodTriangle;

/// Minimum circular gap between two critical angles.
pub const MIN_ANGLE_GAP: f64 = 1e-8;

/// A side of the period triangle. Side `A` goes with trace `X1`, arc `I1` and
/// nerve vertex `v1`, and cyclically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    C,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::A, Side::B, Side::C];

    /// Zero-based position.
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based label, as in `X1`, `I1`, `v1`.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_index(i: usize) -> Side {
        Side::ALL[i % 3]
    }

    /// The other two sides in cyclic order.
    pub fn others(self) -> [Side; 2] {
        let i = self.index();
        [Side::from_index(i + 1), Side::from_index(i + 2)]
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "a",
            Side::B => "b",
            Side::C => "c",
        })
    }
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed difference `x - y` wrapped into `(-pi, pi]`.
pub fn wrapped_difference(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// The unique `phi` in `[0, 2 pi)` with `Re(e^{i phi/2} side) = 0`.
pub fn critical_angle(side: Complex64) -> Result<f64> {
    if side.norm() == 0.0 || !side.norm().is_finite() {
        return Err(Error::degenerate(format!(
            "side {side} has no critical angle"
        )));
    }
    Ok(wrap_angle(2.0 * (FRAC_PI_2 - side.arg()).rem_euclid(PI)))
}

/// `Re(e^{i phi/2} s)` for each side.
pub fn projections(tri: &PeriodTriangle, phi: f64) -> [f64; 3] {
    let rot = Complex64::from_polar(1.0, 0.5 * phi);
    tri.sides().map(|s| (rot * s).re)
}

/// `|Re(e^{i phi/2} s)|` for each side.
pub fn projected_lengths(tri: &PeriodTriangle, phi: f64) -> [f64; 3] {
    projections(tri, phi).map(f64::abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAngles {
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_c: f64,
}

impl CriticalAngles {
    pub fn get(&self, side: Side) -> f64 {
        match side {
            Side::A => self.phi_a,
            Side::B => self.phi_b,
            Side::C => self.phi_c,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.phi_a, self.phi_b, self.phi_c]
    }
}

/// A closed arc of the circle traversed counter-clockwise from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub start: f64,
    pub end: f64,
}

impl CircleArc {
    pub fn length(&self) -> f64 {
        (self.end - self.start).rem_euclid(TAU)
    }

    /// Counter-clockwise offset of `phi` from the start, in `[0, 2 pi)`.
    fn offset(&self, phi: f64) -> f64 {
        (phi - self.start).rem_euclid(TAU)
    }

    pub fn contains(&self, phi: f64) -> bool {
        self.offset(phi) <= self.length()
    }

    /// Whether `phi` lies in the interior at distance more than `guard` from both ends.
    pub fn contains_interior(&self, phi: f64, guard: f64) -> bool {
        let o = self.offset(phi);
        o > guard && o < self.length() - guard
    }
}

/// Arcs `I1, I2, I3`; `I_k` is bounded by the critical angles of the two other
/// sides and does not contain the critical angle of side `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcDecomposition {
    pub arcs: [CircleArc; 3],
}

impl ArcDecomposition {
    pub fn arc(&self, side: Side) -> CircleArc {
        self.arcs[side.index()]
    }

    /// The arc whose interior (shrunk by `guard` at both ends) contains `phi`.
    pub fn arc_containing(&self, phi: f64, guard: f64) -> Option<Side> {
        Side::ALL
            .into_iter()
            .find(|&s| self.arc(s).contains_interior(phi, guard))
    }

    pub fn shortest_arc(&self) -> f64 {
        self.arcs
            .iter()
            .map(CircleArc::length)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn critical_angles(tri: &PeriodTriangle) -> Result<CriticalAngles> {
    let [phi_a, phi_b, phi_c] = [
        critical_angle(tri.a)?,
        critical_angle(tri.b)?,
        critical_angle(tri.c)?,
    ];
    let angles = CriticalAngles {
        phi_a,
        phi_b,
        phi_c,
    };
    for (x, y) in [(phi_a, phi_b), (phi_b, phi_c), (phi_c, phi_a)] {
        if wrapped_difference(x, y).abs() < MIN_ANGLE_GAP {
            return Err(Error::degenerate(format!(
                "critical angles {x} and {y} coincide"
            )));
        }
    }
    Ok(angles)
}

pub fn arc_decomposition(tri: &PeriodTriangle) -> Result<(CriticalAngles, ArcDecomposition)> {
    let angles = critical_angles(tri)?;
    let arcs = Side::ALL.map(|side| {
        let [s, t] = side.others();
        let (p, q) = (angles.get(s), angles.get(t));
        let excluded = angles.get(side);
        let forward = CircleArc { start: p, end: q };
        if forward.contains(excluded) {
            CircleArc { start: q, end: p }
        } else {
            forward
        }
    });
    Ok((angles, ArcDecomposition { arcs }))
}

/// The side with the largest projected length at `phi` and the gap to the
/// runner-up. Exact ties go to the earliest side.
pub fn dominant_side(tri: &PeriodTriangle, phi: f64) -> (Side, f64) {
    let lens = projected_lengths(tri, phi);
    let mut best = 0;
    for k in 1..3 {
        if lens[k] > lens[best] {
            best = k;
        }
    }
    let second = (0..3)
        .filter(|&k| k != best)
        .map(|k| lens[k])
        .fold(f64::NEG_INFINITY, f64::max);
    (Side::from_index(best), lens[best] - second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn equilateral() -> PeriodTriangle {
        PeriodTriangle::new(
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, TAU / 3.0),
            Complex64::from_polar(1.0, 2.0 * TAU / 3.0),
        )
        .unwrap()
    }

    #[test]
    fn critical_angle_examples() {
        assert!((critical_angle(Complex64::new(1.0, 0.0)).unwrap() - PI).abs() < 1e-15);
        assert!((critical_angle(Complex64::new(-1.0, 0.0)).unwrap() - PI).abs() < 1e-15);
        let s = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((critical_angle(s).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(
            critical_angle(Complex64::new(0.0, 0.0)),
            Err(Error::DegenerateTriangle { .. })
        ));
    }

    #[test]
    fn equilateral_angles_and_arcs() {
        let (angles, arcs) = arc_decomposition(&equilateral()).unwrap();
        assert!((angles.phi_a - PI).abs() < 1e-14);
        assert!((angles.phi_b - 5.0 * PI / 3.0).abs() < 1e-14);
        assert!((angles.phi_c - PI / 3.0).abs() < 1e-14);
        let i1 = arcs.arc(Side::A);
        assert!((i1.start - 5.0 * PI / 3.0).abs() < 1e-14);
        assert!((i1.end - PI / 3.0).abs() < 1e-14);
        assert!(i1.contains_interior(0.0, 0.0));
        assert!(!i1.contains(PI));
        let total: f64 = arcs.arcs.iter().map(CircleArc::length).sum();
        assert!((total - TAU).abs() < 1e-13);
    }

    #[test]
    fn equilateral_dominance_at_zero() {
        let (side, margin) = dominant_side(&equilateral(), 0.0);
        assert_eq!(side, Side::A);
        assert!((margin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn equilateral_at_pi_ties_b_and_c() {
        let tri = equilateral();
        let lens = projected_lengths(&tri, PI);
        assert!(lens[0] < 1e-15);
        let (side, margin) = dominant_side(&tri, PI);
        assert!(matches!(side, Side::B | Side::C));
        assert!(margin < 1e-12);
    }

    #[test]
    fn coincident_angles_are_degenerate() {
        // b and c parallel: identical critical angles
        let tri = PeriodTriangle {
            a: Complex64::new(-2.0, -2.0),
            b: Complex64::new(1.0, 1.0),
            c: Complex64::new(1.0, 1.0),
        };
        assert!(matches!(
            critical_angles(&tri),
            Err(Error::DegenerateTriangle { .. })
        ));
    }

    #[test]
    fn wrapped_difference_range() {
        assert!((wrapped_difference(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
        assert!((wrapped_difference(TAU - 0.1, 0.1) + 0.2).abs() < 1e-15);
        assert_eq!(wrapped_difference(PI, 0.0), PI);
        assert_eq!(wrap_angle(-1e-20), 0.0);
    }
}
