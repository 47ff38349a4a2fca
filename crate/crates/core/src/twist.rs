//! Deformation functions `f_κ(t)` controlling the coordinate commutator
//! `[x̄₁, x̄₂] = i f_κ(t)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistFamily {
    Constant,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl TwistFamily {
    pub fn name(self) -> &'static str {
        match self {
            TwistFamily::Constant => "constant",
            TwistFamily::Sin => "sin",
            TwistFamily::Cos => "cos",
            TwistFamily::Sinh => "sinh",
            TwistFamily::Cosh => "cosh",
        }
    }

    pub fn is_time_dependent(self) -> bool {
        self != TwistFamily::Constant
    }
}

impl FromStr for TwistFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" | "const" => Ok(TwistFamily::Constant),
            "sin" => Ok(TwistFamily::Sin),
            "cos" => Ok(TwistFamily::Cos),
            "sinh" => Ok(TwistFamily::Sinh),
            "cosh" => Ok(TwistFamily::Cosh),
            other => Err(Error::InvalidParameter(format!(
                "unknown twist family {other:?}"
            ))),
        }
    }
}

/// A single-term deformation `κ·g(t/τ)` with `g` one of
/// `1, sin, cos, sinh, cosh`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistFunction {
    pub family: TwistFamily,
    pub kappa: f64,
    /// Time constant. Ignored (and reported as `None`) for the constant family.
    pub tau: Option<f64>,
}

impl TwistFunction {
    pub fn new(family: TwistFamily, kappa: f64, tau: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kappa must be finite, got {kappa}"
            )));
        }
        if !family.is_time_dependent() {
            return Ok(Self::constant(kappa));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive for the {} family, got {tau}",
                family.name()
            )));
        }
        Ok(TwistFunction {
            family,
            kappa,
            tau: Some(tau),
        })
    }

    /// `f(t) = θ` for every `t`: the canonical (Moyal) deformation.
    pub fn constant(theta: f64) -> Self {
        TwistFunction {
            family: TwistFamily::Constant,
            kappa: theta,
            tau: None,
        }
    }

    pub fn undeformed() -> Self {
        Self::constant(0.0)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let kappa = self.kappa;
        let value = match (self.family, self.tau) {
            (TwistFamily::Constant, _) => return Ok(kappa),
            (family, Some(tau)) => {
                let x = t / tau;
                let g = match family {
                    TwistFamily::Sin => x.sin(),
                    TwistFamily::Cos => x.cos(),
                    TwistFamily::Sinh => x.sinh(),
                    TwistFamily::Cosh => x.cosh(),
                    TwistFamily::Constant => unreachable!(),
                };
                if kappa == 0.0 {
                    0.0
                } else {
                    kappa * g
                }
            }
            (family, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{} twist without tau",
                    family.name()
                )))
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Range(format!(
                "{} twist overflows at t = {t}",
                self.family.name()
            )))
        }
    }
}

impl Default for TwistFunction {
    fn default() -> Self {
        Self::undeformed()
    }
}

impl fmt::Display for TwistFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={},kappa={:?}", self.family.name(), self.kappa)?;
        if let Some(tau) = self.tau {
            write!(f, ",tau={tau:?}")?;
        }
        Ok(())
    }
}

/// Parses the comma key-value form `family=sin,kappa=2.0,tau=1.0`.
impl FromStr for TwistFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut kappa = None;
        let mut tau = None;
        for item in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value in twist spec, got {item:?}"))
            })?;
            let number = || {
                value.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!("bad number for {key}: {value:?}"))
                })
            };
            match key.trim() {
                "family" => family = Some(value.parse::<TwistFamily>()?),
                "kappa" | "theta" => kappa = Some(number()?),
                "tau" => tau = Some(number()?),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown twist key {other:?}"
                    )))
                }
            }
        }
        let family = family.unwrap_or(TwistFamily::Constant);
        let kappa = kappa.unwrap_or(0.0);
        match (family.is_time_dependent(), tau) {
            (true, None) => Err(Error::InvalidParameter(format!(
                "the {} family needs tau",
                family.name()
            ))),
            (_, tau) => TwistFunction::new(family, kappa, tau.unwrap_or(1.0)),
        }
    }
}
