//! Analytic test profiles and exact dilation by re-sampling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use statrs::function::erf::erfc;

use super::field::ComplexField;
use super::grid::Grid3;
use crate::error::{Error, Result};
use crate::oracles::quadrature::RadialQuadrature;

/// Tail budget used by [`dilate`] when none is given.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// A profile that can be evaluated anywhere, so dilation never interpolates.
pub trait Profile: Send + Sync {
    fn value(&self, x: [f64; 3]) -> Complex64;

    /// Fraction of the continuum L2 mass outside the ball of `radius` about the origin.
    fn tail_mass_fraction(&self, radius: f64) -> f64;
}

/// The profile families used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    /// `amplitude * exp(-|x - center|^2 / (2 width))`.
    Gaussian {
        width: f64,
        amplitude: f64,
        center: [f64; 3],
    },
    /// Smooth bump supported in the shell `inner < r < outer`; vanishes near 0.
    Ring {
        inner: f64,
        outer: f64,
        amplitude: f64,
    },
    /// Smooth bump supported in the ball `r < radius`.
    Bump { radius: f64, amplitude: f64 },
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl ProfileSpec {
    pub fn gaussian(width: f64) -> Self {
        ProfileSpec::Gaussian {
            width,
            amplitude: 1.0,
            center: [0.0; 3],
        }
    }

    pub fn ring(inner: f64, outer: f64) -> Self {
        ProfileSpec::Ring {
            inner,
            outer,
            amplitude: 1.0,
        }
    }

    pub fn bump(radius: f64) -> Self {
        ProfileSpec::Bump {
            radius,
            amplitude: 1.0,
        }
    }

    fn amplitude(&self) -> f64 {
        match *self {
            ProfileSpec::Gaussian { amplitude, .. }
            | ProfileSpec::Ring { amplitude, .. }
            | ProfileSpec::Bump { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(self, a: f64) -> Self {
        match self {
            ProfileSpec::Gaussian { width, center, .. } => ProfileSpec::Gaussian {
                width,
                amplitude: a,
                center,
            },
            ProfileSpec::Ring { inner, outer, .. } => ProfileSpec::Ring {
                inner,
                outer,
                amplitude: a,
            },
            ProfileSpec::Bump { radius, .. } => ProfileSpec::Bump {
                radius,
                amplitude: a,
            },
        }
    }

    /// Same shape rescaled to unit continuum L2 norm.
    pub fn normalized(self) -> Self {
        let norm = self.l2_norm();
        self.with_amplitude(self.amplitude() / norm)
    }

    /// Radial shape without amplitude, for the compact families.
    fn radial_shape(&self, r: f64) -> f64 {
        match *self {
            ProfileSpec::Gaussian { width, .. } => (-r * r / (2.0 * width)).exp(),
            ProfileSpec::Ring { inner, outer, .. } => {
                bump((2.0 * r - inner - outer) / (outer - inner))
            }
            ProfileSpec::Bump { radius, .. } => bump(r / radius),
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            ProfileSpec::Gaussian { .. } => (0.0, f64::INFINITY),
            ProfileSpec::Ring { inner, outer, .. } => (inner, outer),
            ProfileSpec::Bump { radius, .. } => (0.0, radius),
        }
    }

    fn radial_mass(&self, from: f64, to: f64) -> f64 {
        let quad = RadialQuadrature::default();
        quad.integrate(|r| 4.0 * PI * r * r * self.radial_shape(r).powi(2), from, to)
            .value
    }

    /// Continuum L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let a = self.amplitude().abs();
        match *self {
            ProfileSpec::Gaussian { width, .. } => a * (PI * width).powf(0.75),
            _ => {
                let (lo, hi) = self.support();
                a * self.radial_mass(lo, hi).sqrt()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ProfileSpec::Gaussian { width, amplitude, center } => {
                width > 0.0 && amplitude.is_finite() && center.iter().all(|c| c.is_finite())
            }
            ProfileSpec::Ring { inner, outer, amplitude } => {
                inner >= 0.0 && outer > inner && amplitude.is_finite()
            }
            ProfileSpec::Bump { radius, amplitude } => radius > 0.0 && amplitude.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad profile {self}")))
        }
    }
}

impl Profile for ProfileSpec {
    fn value(&self, x: [f64; 3]) -> Complex64 {
        let v = match *self {
            ProfileSpec::Gaussian {
                width,
                amplitude,
                center,
            } => {
                let d2: f64 = (0..3).map(|i| (x[i] - center[i]).powi(2)).sum();
                amplitude * (-d2 / (2.0 * width)).exp()
            }
            _ => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                self.amplitude() * self.radial_shape(r)
            }
        };
        Complex64::new(v, 0.0)
    }

    fn tail_mass_fraction(&self, radius: f64) -> f64 {
        match *self {
            ProfileSpec::Gaussian { width, center, .. } => {
                let offset = center.iter().map(|c| c * c).sum::<f64>().sqrt();
                let rho = (radius - offset).max(0.0);
                let s = rho / width.sqrt();
                (erfc(s) + 2.0 * s / PI.sqrt() * (-s * s).exp()).min(1.0)
            }
            _ => {
                let (lo, hi) = self.support();
                if radius >= hi {
                    return 0.0;
                }
                let total = self.radial_mass(lo, hi);
                self.radial_mass(radius.max(lo), hi) / total
            }
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProfileSpec::Gaussian {
                width,
                amplitude,
                center,
            } => write!(
                f,
                "gaussian:width={width},amp={amplitude},cx={},cy={},cz={}",
                center[0], center[1], center[2]
            ),
            ProfileSpec::Ring {
                inner,
                outer,
                amplitude,
            } => write!(f, "ring:inner={inner},outer={outer},amp={amplitude}"),
            ProfileSpec::Bump { radius, amplitude } => {
                write!(f, "bump:radius={radius},amp={amplitude}")
            }
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = Error;

    /// `gaussian[:width=..,amp=..,cx=..,cy=..,cz=..]`, `ring:inner=..,outer=..`,
    /// `bump:radius=..`; add `unit` to normalize to unit L2 norm.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::HashMap::new();
        let mut unit = false;
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "unit" {
                unit = true;
                continue;
            }
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("profile argument `{part}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("profile value `{v}` is not a number")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
        let amp = get("amp", 1.0);
        let p = match kind.trim() {
            "gaussian" => ProfileSpec::Gaussian {
                width: get("width", 1.0),
                amplitude: amp,
                center: [get("cx", 0.0), get("cy", 0.0), get("cz", 0.0)],
            },
            "ring" => ProfileSpec::Ring {
                inner: get("inner", 1.0),
                outer: get("outer", 3.0),
                amplitude: amp,
            },
            "bump" => ProfileSpec::Bump {
                radius: get("radius", 3.0),
                amplitude: amp,
            },
            other => return Err(Error::Config(format!("unknown profile `{other}`"))),
        };
        p.validate()?;
        Ok(if unit { p.normalized() } else { p })
    }
}

/// Samples `phi(x / lambda)` on `grid`, refusing when the dilated profile
/// leaks more than the default tail budget outside the box.
pub fn dilate(profile: &dyn Profile, lambda: f64, grid: Grid3) -> Result<ComplexField> {
    dilate_with_tolerance(profile, lambda, grid, DEFAULT_TAIL_TOLERANCE)
}

pub fn dilate_with_tolerance(
    profile: &dyn Profile,
    lambda: f64,
    grid: Grid3,
    tolerance: f64,
) -> Result<ComplexField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    let half = 0.5 * grid.box_length();
    let tail = profile.tail_mass_fraction(half / lambda);
    if tail > tolerance {
        // smallest radius (in profile units) that meets the budget, by doubling
        let mut r = half / lambda;
        while profile.tail_mass_fraction(r) > tolerance && r < 1e6 {
            r *= 1.25;
        }
        return Err(Error::TailMass {
            mass: tail,
            budget: tolerance,
            suggested_box: 2.0 * lambda * r,
        });
    }
    let inv = 1.0 / lambda;
    Ok(ComplexField::from_fn(grid, |x| {
        profile.value([x[0] * inv, x[1] * inv, x[2] * inv])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let p: ProfileSpec = "ring:inner=1,outer=3".parse().unwrap();
        assert_eq!(p, ProfileSpec::ring(1.0, 3.0));
        let g: ProfileSpec = "gaussian:width=2,unit".parse().unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-12);
        assert!("cube".parse::<ProfileSpec>().is_err());
        assert!("ring:inner=3,outer=1".parse::<ProfileSpec>().is_err());
    }

    #[test]
    fn ring_vanishes_near_origin() {
        let p = ProfileSpec::ring(1.0, 3.0);
        assert_eq!(p.value([0.5, 0.0, 0.0]).re, 0.0);
        assert!((p.value([2.0, 0.0, 0.0]).re - 1.0).abs() < 1e-15);
        assert_eq!(p.tail_mass_fraction(3.0), 0.0);
        let half = p.tail_mass_fraction(2.0);
        assert!(half > 0.3 && half < 0.8);
    }

    #[test]
    fn gaussian_tail_formula() {
        let p = ProfileSpec::gaussian(1.0);
        assert!((p.tail_mass_fraction(0.0) - 1.0).abs() < 1e-15);
        let numeric = {
            let q = RadialQuadrature::default();
            let f = |r: f64| 4.0 * PI * r * r * (-r * r).exp();
            q.integrate(f, 1.5, f64::INFINITY).value / PI.powf(1.5)
        };
        assert!((p.tail_mass_fraction(1.5) - numeric).abs() < 1e-10);
    }

    #[test]
    fn unit_dilation_is_plain_sampling() {
        let g = Grid3::new(16, 16.0).unwrap();
        let p = ProfileSpec::gaussian(1.5);
        let a = dilate(&p, 1.0, g).unwrap();
        let b = ComplexField::from_fn(g, |x| p.value(x));
        assert_eq!(a, b);
    }

    #[test]
    fn refuses_oversized_dilation() {
        let g = Grid3::new(16, 40.0).unwrap();
        match dilate(&ProfileSpec::bump(3.0), 8.0, g) {
            Err(Error::TailMass { suggested_box, .. }) => assert!(suggested_box >= 48.0),
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}
