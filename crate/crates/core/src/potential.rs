//! Double-well potentials with wells at +-1.

use crate::error::{Error, Result};

/// A double-well potential W >= 0, even, vanishing exactly at +-1, with
/// W''(+-1) = lambda > 0. The two built-in wells cover the cases with a
/// known oracle: `quartic` is (1-u^2)^2 and `cosine` is (1+cos(pi u))/pi^2,
/// whose s = 1/2 layer solution is (2/pi) atan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoubleWell {
    Quartic,
    Cosine,
}

impl DoubleWell {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "quartic" => Ok(DoubleWell::Quartic),
            "cosine" => Ok(DoubleWell::Cosine),
            other => Err(Error::Config(format!("unknown potential '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DoubleWell::Quartic => "quartic",
            DoubleWell::Cosine => "cosine",
        }
    }

    pub fn w(&self, u: f64) -> f64 {
        match self {
            DoubleWell::Quartic => {
                let q = 1.0 - u * u;
                q * q
            }
            DoubleWell::Cosine => {
                let pi = std::f64::consts::PI;
                (1.0 + (pi * u).cos()) / (pi * pi)
            }
        }
    }

    pub fn dw(&self, u: f64) -> f64 {
        match self {
            DoubleWell::Quartic => 4.0 * u * (u * u - 1.0),
            DoubleWell::Cosine => {
                let pi = std::f64::consts::PI;
                -(pi * u).sin() / pi
            }
        }
    }

    pub fn d2w(&self, u: f64) -> f64 {
        match self {
            DoubleWell::Quartic => 12.0 * u * u - 4.0,
            DoubleWell::Cosine => -(std::f64::consts::PI * u).cos(),
        }
    }

    pub fn d3w(&self, u: f64) -> f64 {
        match self {
            DoubleWell::Quartic => 24.0 * u,
            DoubleWell::Cosine => {
                let pi = std::f64::consts::PI;
                pi * (pi * u).sin()
            }
        }
    }

    /// Well curvature W''(+-1).
    pub fn lambda(&self) -> f64 {
        match self {
            DoubleWell::Quartic => 8.0,
            DoubleWell::Cosine => 1.0,
        }
    }

    /// Sup of |W''| over the physical range [-1, 1]; used for step-size control.
    pub fn sup_d2w(&self) -> f64 {
        match self {
            DoubleWell::Quartic => 8.0,
            DoubleWell::Cosine => 1.0,
        }
    }
}
