//! Closed-form analytics for the Yukawa kernel `Q e^{-mu r}/r`.
//!
//! Everything here works with the positive-form kernel; the minus sign of the
//! linear potential `V0 = -Q0 e^{-mu0 r}/r` is applied once, in the propagators.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::spectral::Multiplier;

/// One kernel `Q e^{-mu r}/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YukawaParams {
    pub q: f64,
    pub mu: f64,
}

impl YukawaParams {
    pub fn new(q: f64, mu: f64) -> Result<Self> {
        let p = Self { q, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) || !self.q.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Yukawa pair needs finite Q and mu > 0, got Q={}, mu={}",
                self.q, self.mu
            )));
        }
        Ok(())
    }

    /// The pair describing `lambda^2 K(lambda x)`: `(lambda Q, lambda mu)`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            q: lambda * self.q,
            mu: lambda * self.mu,
        }
    }

    /// `Q / mu^2`, the quantity the ratio formula recovers.
    pub fn ratio(&self) -> f64 {
        self.q / (self.mu * self.mu)
    }

    /// Fourier symbol `4 pi Q / (mu^2 + |xi|^2)` as a function of `|xi|^2`.
    #[inline]
    pub fn symbol(&self, k2: f64) -> f64 {
        4.0 * PI * self.q / (self.mu * self.mu + k2)
    }
}

/// `Q e^{-mu r} / r`.
pub fn yukawa_value(params: YukawaParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Singularity { r });
    }
    Ok(params.q * (-params.mu * r).exp() / r)
}

/// Convolution by the kernel as a multiplier.
pub fn yukawa_multiplier(params: YukawaParams) -> Multiplier {
    let label = format!("yukawa(Q={}, mu={})", params.q, params.mu);
    Multiplier::real_radial(label, move |k2| params.symbol(k2))
}

/// `||e^{-r}/r||_p = (4 pi p^{p-3} Gamma(3-p))^{1/p}` for `1 <= p < 3`.
pub fn lp_norm_closed(p: f64) -> Result<f64> {
    if p >= 3.0 || p.is_nan() {
        return Err(Error::Divergent { p });
    }
    if p < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "norm exponent must be >= 1, got {p}"
        )));
    }
    Ok((4.0 * PI * p.powf(p - 3.0) * gamma(3.0 - p)).powf(1.0 / p))
}

/// Norms of the unit kernel `e^{-r}/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNorms {
    pub l1: f64,
    pub l3_2: f64,
    /// Upper bound on the Rollnik norm from the sharp HLS inequality.
    pub rollnik_bound: f64,
    pub kato: f64,
}

impl KernelNorms {
    pub fn unit() -> Self {
        let c = constants();
        Self {
            l1: 4.0 * PI,
            l3_2: 2f64.powf(5.0 / 3.0) * PI / 3.0,
            rollnik_bound: c.rollnik_bound,
            kato: c.kato,
        }
    }

    pub fn lp(&self, p: f64) -> Result<f64> {
        lp_norm_closed(p)
    }
}

/// Constants attached to the unit kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// `(1/(3 pi)) (4/sqrt(pi))^{2/3}`, the square of the sharp constant of
    /// the embedding of the homogeneous `H^1` into `L^6`.
    pub c_b: f64,
    /// Sharp Hardy-Littlewood-Sobolev constant for `r^{-2}`, `2^{2/3} pi^{4/3}`.
    pub hls: f64,
    pub rollnik_bound: f64,
    pub kato: f64,
    /// `c_b * ||e^{-r}/r||_{3/2} = 8 pi^{-1/3} / 9`.
    pub embedding_margin: f64,
}

pub fn constants() -> Constants {
    let c_b = (4.0 / PI.sqrt()).powf(2.0 / 3.0) / (3.0 * PI);
    let l3_2 = 2f64.powf(5.0 / 3.0) * PI / 3.0;
    let hls = 2f64.powf(2.0 / 3.0) * PI.powf(4.0 / 3.0);
    Constants {
        c_b,
        hls,
        // sqrt(hls) * ||e^{-r}/r||_{3/2}
        rollnik_bound: hls.sqrt() * l3_2,
        kato: 4.0 * PI,
        embedding_margin: c_b * l3_2,
    }
}

/// `(e^{-r}/r * 1/r)(x) = 4 pi (1 - e^{-|x|}) / |x|`.
pub fn convolution_identity(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Singularity { r });
    }
    Ok(4.0 * PI * (-(-r).exp_m1()) / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smallness {
    pub ok: bool,
    /// `|Q0| / mu0`; must be below 1.
    pub rk_margin: f64,
    /// `|Q0| / mu0` divided by `4 pi min(1/rollnik, 1/kato)`; below 1 iff admissible.
    pub rk_e_margin: f64,
}

pub fn check_smallness(v0: YukawaParams) -> Smallness {
    let c = constants();
    let rk_margin = v0.q.abs() / v0.mu;
    let bound = 4.0 * PI * (1.0 / c.rollnik_bound).min(1.0 / c.kato);
    let rk_e_margin = rk_margin / bound;
    Smallness {
        ok: rk_margin < 1.0,
        rk_margin,
        rk_e_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn values() {
        let one = YukawaParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(yukawa_value(one, 1.0).unwrap(), (-1f64).exp());
        assert_eq!(yukawa_value(YukawaParams::new(0.0, 3.0).unwrap(), 2.0).unwrap(), 0.0);
        let p = YukawaParams::new(2.0, 3.0).unwrap();
        assert_relative_eq!(yukawa_value(p, 0.5).unwrap(), 4.0 * (-1.5f64).exp(), max_relative = 1e-15);
        assert!(matches!(yukawa_value(one, 0.0), Err(Error::Singularity { .. })));
        assert!(YukawaParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn symbol_at_origin() {
        let m = yukawa_multiplier(YukawaParams::new(1.0, 1.0).unwrap());
        assert_relative_eq!(m.eval([0.0; 3]).re, 4.0 * PI);
        let m = yukawa_multiplier(YukawaParams::new(1.0, 2.0).unwrap());
        assert_relative_eq!(m.eval([0.0; 3]).re, PI);
    }

    #[test]
    fn closed_form_norms() {
        assert_relative_eq!(lp_norm_closed(1.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(
            lp_norm_closed(1.5).unwrap(),
            2f64.powf(5.0 / 3.0) * PI / 3.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(lp_norm_closed(2.0).unwrap(), (2.0 * PI).sqrt(), max_relative = 1e-14);
        assert!(matches!(lp_norm_closed(3.0), Err(Error::Divergent { .. })));
    }

    #[test]
    fn constant_values() {
        let c = constants();
        assert_relative_eq!(c.kato, 4.0 * PI);
        assert!(c.rollnik_bound < 4.0 * PI);
        assert_relative_eq!(c.rollnik_bound, 4.0 * PI * PI.powf(2.0 / 3.0) / 3.0, max_relative = 1e-14);
        assert_relative_eq!(c.embedding_margin, 8.0 * PI.powf(-1.0 / 3.0) / 9.0, max_relative = 1e-14);
        assert!(c.embedding_margin < 1.0);
    }

    #[test]
    fn convolution_identity_limits() {
        assert!(convolution_identity(0.0).is_err());
        assert_relative_eq!(convolution_identity(1e-9).unwrap(), 4.0 * PI, max_relative = 1e-8);
        assert_relative_eq!(
            convolution_identity(1.0).unwrap(),
            4.0 * PI * (1.0 - (-1f64).exp()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn smallness() {
        let s = check_smallness(YukawaParams::new(0.5, 1.0).unwrap());
        assert!(s.ok);
        assert_relative_eq!(s.rk_margin, 0.5);
        assert!(s.rk_e_margin < 1.0);
        assert!(!check_smallness(YukawaParams::new(1.0, 1.0).unwrap()).ok);
        let s = check_smallness(YukawaParams::new(-0.3, 0.5).unwrap());
        assert!(s.ok);
        assert_relative_eq!(s.rk_margin, 0.6, max_relative = 1e-15);
        assert_eq!(s, check_smallness(YukawaParams::new(0.3, 0.5).unwrap()));
    }
}
