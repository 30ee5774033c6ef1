//! Complex numbers stored as `(ln |z|, arg z)` so that products and sums of
//! quantities like `exp(2 sqrt(R) x)` stay finite for astronomically large `R`.

use std::f64::consts::PI;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative magnitude below which a cancelled sum counts as exactly zero.
pub const CANCELLATION_FLOOR: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    /// Natural log of the modulus; ignored when `is_zero`.
    pub logmag: f64,
    /// Argument in `(-pi, pi]`.
    pub phase: f64,
    pub is_zero: bool,
}

fn normalize_phase(phase: f64) -> f64 {
    let p = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        PI
    } else {
        p
    }
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        logmag: f64::NEG_INFINITY,
        phase: 0.0,
        is_zero: true,
    };

    pub const ONE: LogComplex = LogComplex {
        logmag: 0.0,
        phase: 0.0,
        is_zero: false,
    };

    pub fn new(logmag: f64, phase: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            logmag,
            phase: normalize_phase(phase),
            is_zero: false,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex {
            logmag: z.norm().ln(),
            phase: z.arg(),
            is_zero: false,
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// Ordinary complex value; overflows to infinity for `logmag > ~709`.
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.logmag.exp(), self.phase)
        }
    }

    /// `ln |z|`, with `-inf` for zero.
    pub fn log_modulus(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.logmag
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if self.is_zero {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        LogComplex::new(self.logmag * n as f64, self.phase * n as f64)
    }

    pub fn scale(self, factor: Complex64) -> Self {
        self * LogComplex::from_complex(factor)
    }

    /// Stable sum of many terms: the largest modulus is factored out before
    /// the terms are added as ordinary complex numbers. A result smaller than
    /// [`CANCELLATION_FLOOR`] times the largest term is reported as zero.
    pub fn sum(terms: &[LogComplex]) -> LogComplex {
        let max = terms
            .iter()
            .filter(|t| !t.is_zero)
            .map(|t| t.logmag)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let acc: Complex64 = terms
            .iter()
            .filter(|t| !t.is_zero)
            .map(|t| Complex64::from_polar((t.logmag - max).exp(), t.phase))
            .sum();
        let m = acc.norm();
        if m <= CANCELLATION_FLOOR {
            return Self::ZERO;
        }
        LogComplex::new(max + m.ln(), acc.arg())
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero || rhs.is_zero {
            return Self::ZERO;
        }
        LogComplex::new(self.logmag + rhs.logmag, self.phase + rhs.phase)
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;

    fn neg(self) -> LogComplex {
        if self.is_zero {
            return self;
        }
        LogComplex::new(self.logmag, self.phase + PI)
    }
}
