//! The nerve of the divisor at infinity of the Fricke cubic: three vertices
//! `v1, v2, v3` (the lines `{X0 = 0 = Xj}`) joined pairwise by three edges,
//! so its body is a circle. Points of the projective closure near infinity
//! are sent into the body by a partition of unity built from log moduli.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::wrapped_difference;
use crate::traces::ProjectivePoint;

pub const DEFAULT_NEAR_INFINITY_THRESHOLD: f64 = 1e3;

/// Log-scale width of the tubes around the boundary components.
pub const DEFAULT_TUBE_WIDTH: f64 = 6.907755278982137; // ln 1e3

const VERTEX_ANGLE: f64 = TAU / 3.0;

/// Fixed combinatorics of the nerve: vertices and the intersection point
/// labelling each edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NerveComplex;

impl NerveComplex {
    pub const VERTICES: [&'static str; 3] = ["{X0=0=X1}", "{X0=0=X2}", "{X0=0=X3}"];

    /// Edges `[v1 v2], [v2 v3], [v3 v1]` as vertex index pairs.
    pub const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

    pub const EDGE_LABELS: [&'static str; 3] = ["[0:0:0:1]", "[0:1:0:0]", "[0:0:1:0]"];

    /// Index into [`Self::EDGES`] of the edge not containing vertex `j` (0-based).
    pub fn opposite_edge(j: usize) -> usize {
        (j + 1) % 3
    }
}

/// Barycentric coordinates on the boundary of the 2-simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NervePoint {
    pub bary: [f64; 3],
}

impl NervePoint {
    pub fn new(bary: [f64; 3]) -> Result<Self> {
        if bary.iter().any(|&b| !(0.0..=1.0).contains(&b)) {
            return Err(Error::InvalidNervePoint(format!(
                "coordinates {bary:?} outside [0, 1]"
            )));
        }
        if (bary.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidNervePoint(format!(
                "coordinates {bary:?} do not sum to 1"
            )));
        }
        if bary.iter().all(|&b| b > 0.0) {
            return Err(Error::InvalidNervePoint(format!(
                "{bary:?} is an interior point"
            )));
        }
        Ok(NervePoint { bary })
    }

    pub fn vertex(j: usize) -> Self {
        let mut bary = [0.0; 3];
        bary[j] = 1.0;
        NervePoint { bary }
    }

    /// Whether the point lies on the closed edge opposite vertex `j`.
    pub fn on_edge_opposite(&self, j: usize) -> bool {
        self.bary[j] == 0.0
    }
}

/// Partition of unity subordinate to log-modulus tubes around the three
/// boundary components.
///
/// The membership of component `j` is `clamp((lmax - l_j) / width, 0, 1)`
/// where `lmax` is the largest of `l1, l2, l3`: a point is deep inside the
/// tube of `{X0 = 0 = Xj}` once `Xj` is `e^width` times smaller than the
/// dominant trace. The dominant coordinate has membership zero, so the image
/// always lies on the boundary of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub near_infinity_threshold: f64,
    pub tube_width: f64,
}

impl Default for PartitionOfUnity {
    fn default() -> Self {
        PartitionOfUnity {
            near_infinity_threshold: DEFAULT_NEAR_INFINITY_THRESHOLD,
            tube_width: DEFAULT_TUBE_WIDTH,
        }
    }
}

impl PartitionOfUnity {
    pub fn new(near_infinity_threshold: f64, tube_width: f64) -> Result<Self> {
        if !(near_infinity_threshold > 1.0 && near_infinity_threshold.is_finite()) {
            return Err(Error::Config(format!(
                "near-infinity threshold must exceed 1, got {near_infinity_threshold}"
            )));
        }
        if !(tube_width > 0.0 && tube_width.is_finite()) {
            return Err(Error::Config(format!(
                "tube width must be positive, got {tube_width}"
            )));
        }
        Ok(PartitionOfUnity {
            near_infinity_threshold,
            tube_width,
        })
    }

    pub fn apply(&self, p: &ProjectivePoint) -> Result<NervePoint> {
        let [l0, l1, l2, l3] = p.log_moduli;
        let l = [l1, l2, l3];
        let lmax = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lmax.is_nan() || !(lmax - l0 > self.near_infinity_threshold.ln()) {
            return Err(Error::NotNearInfinity(format!(
                "largest trace exceeds X0 by only e^{:.6}",
                lmax - l0
            )));
        }
        let m = l.map(|lj| ((lmax - lj) / self.tube_width).clamp(0.0, 1.0));
        let total: f64 = m.iter().sum();
        if total == 0.0 {
            return Err(Error::AmbiguousPoint);
        }
        Ok(NervePoint {
            bary: m.map(|mj| mj / total),
        })
    }
}

pub fn partition_of_unity(p: &ProjectivePoint) -> Result<NervePoint> {
    PartitionOfUnity::default().apply(p)
}

/// Circle coordinate on the body: `v1, v2, v3` at `0, 2pi/3, 4pi/3`, linear
/// along each edge in the coordinate of its second vertex.
pub fn nerve_angle(p: &NervePoint) -> Result<f64> {
    let [b1, b2, b3] = p.bary;
    let angle = if b3 == 0.0 {
        VERTEX_ANGLE * b2
    } else if b1 == 0.0 {
        VERTEX_ANGLE * (1.0 + b3)
    } else if b2 == 0.0 {
        VERTEX_ANGLE * (2.0 + b1)
    } else {
        return Err(Error::InvalidNervePoint(format!(
            "{:?} is an interior point",
            p.bary
        )));
    };
    Ok(if angle >= TAU { angle - TAU } else { angle })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub phi: f64,
    pub point: ProjectivePoint,
    pub nerve: NervePoint,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub closed: bool,
}

impl Trajectory {
    /// Checks that parameters increase strictly within `[0, 2pi]`, and for a
    /// closed trajectory that it starts at 0, ends at `2pi` and returns to
    /// its starting angle.
    pub fn new(samples: Vec<TrajectorySample>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config(
                "a trajectory needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1].phi > w[0].phi) {
                return Err(Error::Config(format!(
                    "sample parameters not increasing at {}",
                    w[1].phi
                )));
            }
        }
        let (first, last) = (&samples[0], &samples[samples.len() - 1]);
        if first.phi < 0.0 || last.phi > TAU {
            return Err(Error::Config("sample parameters outside [0, 2pi]".into()));
        }
        if closed {
            if first.phi != 0.0 || last.phi != TAU {
                return Err(Error::Config("closed trajectory must span [0, 2pi]".into()));
            }
            if wrapped_difference(last.angle, first.angle).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "trajectory does not close: angles {} and {}",
                    first.angle, last.angle
                )));
            }
        }
        Ok(Trajectory { samples, closed })
    }

    pub fn angles(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.angle).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.phi).collect()
    }
}

/// First pair of consecutive samples whose angle step is at least `pi/2`.
pub fn first_undersampled(angles: &[f64]) -> Option<(usize, f64)> {
    angles.windows(2).enumerate().find_map(|(i, w)| {
        let step = wrapped_difference(w[1], w[0]);
        (step.abs() >= 0.5 * PI).then_some((i, step))
    })
}

/// Winding of a closed sequence of circle angles with parameters `phis`.
pub fn winding_of_angles(phis: &[f64], angles: &[f64]) -> Result<i64> {
    if phis.len() != angles.len() {
        return Err(Error::Config(
            "parameter and angle sequences differ in length".into(),
        ));
    }
    if let Some((i, step)) = first_undersampled(angles) {
        return Err(Error::Undersampled {
            phi_lo: phis[i],
            phi_hi: phis[i + 1],
            step,
        });
    }
    let total: f64 = angles
        .windows(2)
        .map(|w| wrapped_difference(w[1], w[0]))
        .sum();
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::Config(format!(
            "angle sequence is not closed ({turns} turns)"
        )));
    }
    Ok(rounded as i64)
}

pub fn winding_number(traj: &Trajectory) -> Result<i64> {
    if !traj.closed {
        return Err(Error::Config(
            "winding number needs a closed trajectory".into(),
        ));
    }
    winding_of_angles(&traj.phis(), &traj.angles())
}
