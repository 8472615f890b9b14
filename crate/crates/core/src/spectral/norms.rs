use num_complex::Complex64;

use super::field::{ComplexField, Space};
use crate::error::{Error, Result};

/// Which spatial norm to take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn check(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidArgument(
                format!("norm exponent must be >= 1, got {p}"),
            )),
            e => Ok(e),
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

/// Riemann-sum `L^p` norm on the physical samples.
pub fn norm(f: &ComplexField, p: impl Into<Exponent>) -> Result<f64> {
    let p = p.into().check()?;
    if p == Exponent::Finite(2.0) {
        return Ok(f.norm());
    }
    let phys;
    let field = if f.space() == Space::Physical {
        f
    } else {
        phys = f.to_physical();
        &phys
    };
    Ok(norm_of_samples(field.values(), field.grid().cell_volume(), p))
}

pub(crate) fn norm_of_samples(values: &[Complex64], cell: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let sum: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
            (cell * sum).powf(1.0 / p)
        }
    }
}

/// `<f, g> = h^3 sum f conj(g)`: linear in the first argument.
pub fn inner(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    f.same_grid(g)?;
    let g = if g.space() == f.space() {
        g.clone()
    } else if f.space() == Space::Physical {
        g.to_physical()
    } else {
        g.to_frequency()
    };
    let s: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * f.grid().cell_volume())
}

/// Trapezoid weights for `m` uniformly spaced samples with step `dt`.
pub fn trapezoid_weights(m: usize, dt: f64) -> Vec<f64> {
    match m {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..m)
            .map(|i| if i == 0 || i == m - 1 { 0.5 * dt } else { dt })
            .collect(),
    }
}

/// `(int ||f(t)||_q^p dt)^{1/p}` from per-sample spatial norms, trapezoid rule.
pub fn spacetime_norm_from_spatial(spatial: &[f64], p: f64, dt: f64) -> Result<f64> {
    Exponent::Finite(p).check()?;
    let w = trapezoid_weights(spatial.len(), dt);
    let s: f64 = spatial.iter().zip(&w).map(|(v, w)| w * v.powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// Mixed `L^p_t L^q_x` norm of a uniformly sampled series.
pub fn spacetime_norm(series: &[ComplexField], p: f64, q: impl Into<Exponent>, dt: f64) -> Result<f64> {
    let q = q.into();
    let spatial = series
        .iter()
        .map(|f| norm(f, q))
        .collect::<Result<Vec<_>>>()?;
    spacetime_norm_from_spatial(&spatial, p, dt)
}
