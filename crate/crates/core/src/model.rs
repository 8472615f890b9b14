use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::yukawa::{check_smallness, YukawaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `i u_t = (-Delta + V0) u + (Q1 e^{-mu1 r}/r * |u|^2) u`
    Nls,
    /// `i w_t = sqrt(1 - Delta) w + (Q2 e^{-mu2 r}/r * |w|^2) w`
    Srh,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nls" => Ok(Family::Nls),
            "srh" => Ok(Family::Srh),
            other => Err(Error::Config(format!("unknown family `{other}` (nls|srh)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Nls => "nls",
            Family::Srh => "srh",
        })
    }
}

/// Linear potential pair, nonlinearity pair and equation family.
///
/// `v0 = (Q0, mu0)` enters as `V0 = -Q0 e^{-mu0 r}/r`; `v1` is the Hartree
/// kernel `Q e^{-mu r}/r` taken with a plus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub v0: YukawaParams,
    pub v1: YukawaParams,
    pub family: Family,
}

impl ModelParams {
    pub fn nls(q0: f64, mu0: f64, q1: f64, mu1: f64) -> Result<Self> {
        let m = Self {
            v0: YukawaParams::new(q0, mu0)?,
            v1: YukawaParams::new(q1, mu1)?,
            family: Family::Nls,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn srh(q2: f64, mu2: f64) -> Result<Self> {
        let m = Self {
            v0: YukawaParams { q: 0.0, mu: 1.0 },
            v1: YukawaParams::new(q2, mu2)?,
            family: Family::Srh,
        };
        m.validate()?;
        Ok(m)
    }

    /// The model used throughout the examples: `(Q0, mu0, Q1, mu1) = (0.5, 1, 1, 1)`.
    pub fn default_nls() -> Self {
        Self::nls(0.5, 1.0, 1.0, 1.0).expect("default model is admissible")
    }

    pub fn validate(&self) -> Result<()> {
        self.v0.validate()?;
        self.v1.validate()?;
        match self.family {
            Family::Nls => {
                let s = check_smallness(self.v0);
                if !s.ok {
                    return Err(Error::NotSmall {
                        margin: s.rk_margin,
                    });
                }
            }
            Family::Srh => {
                if self.v0.q != 0.0 {
                    return Err(Error::InvalidArgument(
                        "the semi-relativistic equation has no linear potential (Q0 must be 0)"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn with_v0(self, v0: YukawaParams) -> Self {
        Self { v0, ..self }
    }

    pub fn with_v1(self, v1: YukawaParams) -> Self {
        Self { v1, ..self }
    }

    pub fn linear(self) -> Self {
        self.with_v1(YukawaParams { q: 0.0, ..self.v1 })
    }

    pub fn free(self) -> Self {
        self.with_v0(YukawaParams { q: 0.0, ..self.v0 })
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(Q0={}, mu0={}, Q={}, mu={})",
            self.family, self.v0.q, self.v0.mu, self.v1.q, self.v1.mu
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(ModelParams::nls(0.5, 1.0, 1.0, 1.0).is_ok());
        assert!(matches!(
            ModelParams::nls(1.0, 1.0, 1.0, 1.0),
            Err(Error::NotSmall { .. })
        ));
        let mut m = ModelParams::srh(1.0, 1.0).unwrap();
        m.v0.q = 0.1;
        assert!(m.validate().is_err());
    }

    #[test]
    fn family_parse() {
        assert_eq!("NLS".parse::<Family>().unwrap(), Family::Nls);
        assert!("kg".parse::<Family>().is_err());
    }
}
