//! Asymptotic trace coordinates `X1, X2, X3` of the monodromy along the
//! Hitchin section `det = -R e^{i phi}`, their point in projective 3-space,
//! and the Fricke cubic evaluated on them.
//!
//! Each trace has the form `2 cosh(i delta + rho)` where `rho` is twice
//! `sqrt(R)` times the projection of a triangle side and `delta` is a
//! difference of unitary phases `mu_j`. Everything is kept in log scale.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::logcomplex::LogComplex;
use crate::periods::PeriodTriangle;
use crate::rotation::projections;

/// Bounded factors at or below this modulus are exact zeros up to rounding.
const ZERO_FACTOR: f64 = 4.0 * f64::EPSILON;

pub const DEFAULT_HARMONICS: usize = 3;

/// `2 cosh(rho + i delta)` without overflow: the factor `e^{|rho|}` is kept
/// in the log modulus and only the bounded remainder is formed explicitly.
pub fn cosh_log(rho: f64, delta: f64) -> LogComplex {
    let a = rho.abs();
    let decay = (-2.0 * a).exp();
    let plus = 1.0 + decay;
    let minus = -(-2.0 * a).exp_m1();
    let (sin, cos) = delta.sin_cos();
    let factor = Complex64::new(cos * plus, rho.signum() * sin * minus);
    let m = factor.norm();
    if m <= ZERO_FACTOR {
        return LogComplex::ZERO;
    }
    LogComplex::new(a + m.ln(), factor.arg())
}

/// The unitary phases `mu_0, mu_1, mu_t` as functions of `(R, phi)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum MuProfile {
    #[default]
    Zero,
    Constant {
        mu0: f64,
        mu1: f64,
        mut_: f64,
    },
    SmoothRandom(RandomMu),
}

/// Random trigonometric polynomial of fixed degree in `phi`, independent of
/// `R`. Coefficients come from a seeded ChaCha stream, harmonic `k` scaled by `1/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMu {
    seed: u64,
    harmonics: usize,
    /// Per puncture: constant term, then `(cos, sin)` pairs.
    coefficients: [Vec<f64>; 3],
}

impl RandomMu {
    pub fn new(seed: u64, harmonics: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = std::array::from_fn(|_| {
            (0..1 + 2 * harmonics)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect()
        });
        RandomMu {
            seed,
            harmonics,
            coefficients,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    fn evaluate(&self, phi: f64) -> [f64; 3] {
        self.coefficients.each_ref().map(|c| {
            let mut v = c[0];
            for k in 1..=self.harmonics {
                let (s, co) = (k as f64 * phi).sin_cos();
                v += (c[2 * k - 1] * co + c[2 * k] * s) / k as f64;
            }
            v
        })
    }
}

impl MuProfile {
    pub fn constant(mu0: f64, mu1: f64, mut_: f64) -> Self {
        MuProfile::Constant { mu0, mu1, mut_ }
    }

    pub fn random(seed: u64) -> Self {
        MuProfile::SmoothRandom(RandomMu::new(seed, DEFAULT_HARMONICS))
    }

    /// `[mu_0, mu_1, mu_t]`.
    pub fn evaluate(&self, _r: f64, phi: f64) -> [f64; 3] {
        match self {
            MuProfile::Zero => [0.0; 3],
            MuProfile::Constant { mu0, mu1, mut_ } => [*mu0, *mu1, *mut_],
            MuProfile::SmoothRandom(m) => m.evaluate(phi),
        }
    }

    /// Phase offsets `(mu1 - mu0, mu0 - mut, mut - mu1)` of `X1, X2, X3`.
    pub fn trace_phases(&self, r: f64, phi: f64) -> [f64; 3] {
        let [m0, m1, mt] = self.evaluate(r, phi);
        [m1 - m0, m0 - mt, mt - m1]
    }
}

impl fmt::Display for MuProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuProfile::Zero => write!(f, "zero"),
            MuProfile::Constant { mu0, mu1, mut_ } => write!(f, "const:{mu0},{mu1},{mut_}"),
            MuProfile::SmoothRandom(m) if m.harmonics == DEFAULT_HARMONICS => {
                write!(f, "random:{}", m.seed)
            }
            MuProfile::SmoothRandom(m) => write!(f, "random:{}:{}", m.seed, m.harmonics),
        }
    }
}

impl FromStr for MuProfile {
    type Err = Error;

    /// `zero`, `const:MU0,MU1,MUT`, `random:SEED` or `random:SEED:HARMONICS`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognised mu profile {s:?}"));
        let s = s.trim();
        if s == "zero" {
            return Ok(MuProfile::Zero);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let vals: Vec<f64> = rest
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?;
            let [mu0, mu1, mut_] = vals[..] else {
                return Err(bad());
            };
            if !(mu0.is_finite() && mu1.is_finite() && mut_.is_finite()) {
                return Err(bad());
            }
            return Ok(MuProfile::constant(mu0, mu1, mut_));
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let mut parts = rest.split(':');
            let seed = parts
                .next()
                .and_then(|p| p.trim().parse::<u64>().ok())
                .ok_or_else(bad)?;
            let harmonics = match parts.next() {
                Some(h) => h.trim().parse::<usize>().map_err(|_| bad())?,
                None => DEFAULT_HARMONICS,
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            return Ok(MuProfile::SmoothRandom(RandomMu::new(seed, harmonics)));
        }
        Err(bad())
    }
}

impl Serialize for MuProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MuProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceTriple {
    pub x: [LogComplex; 3],
    pub r: f64,
    pub phi: f64,
}

/// `X_k = 2 cosh(i delta_k + 2 sqrt(R) Re(e^{i phi/2} s_k))` for the sides
/// `s = (a, b, c)` and the phase offsets of `mu`.
pub fn trace_coordinates(
    r: f64,
    phi: f64,
    tri: &PeriodTriangle,
    mu: &MuProfile,
) -> Result<TraceTriple> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Config(format!(
            "R must be finite and non-negative, got {r}"
        )));
    }
    if !phi.is_finite() {
        return Err(Error::Config(format!("phi must be finite, got {phi}")));
    }
    let scale = 2.0 * r.sqrt();
    let proj = projections(tri, phi);
    let deltas = mu.trace_phases(r, phi);
    let x = std::array::from_fn(|k| cosh_log(scale * proj[k], deltas[k]));
    Ok(TraceTriple { x, r, phi })
}

/// `[1 : X1 : X2 : X3]` rescaled so the largest log modulus is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    /// Relative log moduli `(l0, l1, l2, l3)`; `-inf` marks a zero coordinate.
    pub log_moduli: [f64; 4],
    pub phases: [f64; 4],
}

impl ProjectivePoint {
    pub fn new(log_moduli: [f64; 4], phases: [f64; 4]) -> Self {
        ProjectivePoint { log_moduli, phases }
    }

    /// `(l1, l2, l3)`.
    pub fn trace_log_moduli(&self) -> [f64; 3] {
        [self.log_moduli[1], self.log_moduli[2], self.log_moduli[3]]
    }
}

pub fn projective_normalize(tt: &TraceTriple) -> ProjectivePoint {
    let raw = [
        0.0,
        tt.x[0].log_modulus(),
        tt.x[1].log_modulus(),
        tt.x[2].log_modulus(),
    ];
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let phases = [0.0, tt.x[0].phase, tt.x[1].phase, tt.x[2].phase];
    ProjectivePoint {
        log_moduli: raw.map(|l| l - max),
        phases,
    }
}

/// `X1 X2 X3 + X1^2 + X2^2 + X3^2 - s1 X1 - s2 X2 - s3 X3 + s4`, summed in log scale.
pub fn fricke_residual(tt: &TraceTriple, s: [Complex64; 4]) -> LogComplex {
    let [x1, x2, x3] = tt.x;
    let terms = [
        x1 * x2 * x3,
        x1.powi(2),
        x2.powi(2),
        x3.powi(2),
        -(x1.scale(s[0])),
        -(x2.scale(s[1])),
        -(x3.scale(s[2])),
        LogComplex::from_complex(s[3]),
    ];
    LogComplex::sum(&terms)
}

/// Build a trace triple from plain complex values, for diagnostics and tests.
pub fn trace_triple_from_values(values: [Complex64; 3], r: f64, phi: f64) -> TraceTriple {
    TraceTriple {
        x: values.map(LogComplex::from_complex),
        r,
        phi: phi.rem_euclid(TAU),
    }
}
