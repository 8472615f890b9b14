//! Crank-Nicolson stepper for the linear kinds, independent of the splitting.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagate::HamiltonianSpec;
use crate::spectral::{ComplexField, Fft3, Grid3, Space};

/// Residual tolerance of the inner fixed-point solve.
pub const SOLVER_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 200;

/// `|xi|^2` recomputed from the lattice, not from the production tables.
fn wavenumbers_squared(g: &Grid3) -> Vec<f64> {
    let n = g.n();
    let dk = 2.0 * PI / g.box_length();
    let w = |i: usize| {
        let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
        (k * dk).powi(2)
    };
    let mut out = Vec::with_capacity(g.len());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(w(i) + w(j) + w(k));
            }
        }
    }
    out
}

fn kinetic_symbol(spec: &HamiltonianSpec, k2: f64) -> f64 {
    match *spec {
        HamiltonianSpec::Semirel { mass } => (mass * mass + k2).sqrt(),
        HamiltonianSpec::SemirelScaled { lambda } if lambda.is_infinite() => 0.5 * k2,
        HamiltonianSpec::SemirelScaled { lambda } => {
            lambda * (lambda * lambda + k2).sqrt() - lambda * lambda
        }
        _ => k2,
    }
}

/// Potential samples with the half-spacing cap, recomputed here.
fn potential(spec: &HamiltonianSpec, g: &Grid3) -> Vec<f64> {
    let HamiltonianSpec::YukawaSchrodinger { v0, lambda, shift } = *spec else {
        return vec![0.0; g.len()];
    };
    let n = g.n();
    let h = g.spacing();
    let half = 0.5 * g.box_length();
    let mut out = Vec::with_capacity(g.len());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [i, j, k].map(|a| a as f64 * h - half);
                let d: f64 = (0..3).map(|a| (x[a] - shift[a] / lambda).powi(2)).sum::<f64>().sqrt();
                let r = d.max(0.5 * h);
                out.push(-lambda * v0.q * (-lambda * v0.mu * r).exp() / r);
            }
        }
    }
    out
}

/// `u(t)` from `(1 + i dt H/2) u_{n+1} = (1 - i dt H/2) u_n`, each solve by
/// fixed-point iteration preconditioned with `(1 + i dt K/2)^{-1}`.
pub fn implicit_stepper(spec: &HamiltonianSpec, phi: &ComplexField, t: f64, dt: f64) -> Result<ComplexField> {
    if spec.is_nonlinear() {
        return Err(Error::InvalidArgument("the implicit oracle handles linear kinds only".into()));
    }
    if !(dt > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need dt > 0 and finite t (dt={dt}, t={t})")));
    }
    let g = *phi.grid();
    let steps = (t.abs() / dt).round().max(1.0) as usize;
    let h = t / steps as f64;
    let k2 = wavenumbers_squared(&g);
    let kin: Vec<f64> = k2.iter().map(|&k| kinetic_symbol(spec, k)).collect();
    let v = potential(spec, &g);
    let mut fft = Fft3::new(g.n());
    let half = Complex64::new(0.0, 0.5 * h);
    let apply_k = |fft: &mut Fft3, u: &[Complex64], f: &dyn Fn(f64) -> Complex64| -> Vec<Complex64> {
        let mut w = u.to_vec();
        fft.forward(&mut w);
        w.iter_mut().zip(&kin).for_each(|(w, &k)| *w *= f(k));
        fft.inverse(&mut w);
        w
    };
    let mut u = phi.to_physical().into_values();
    if t == 0.0 {
        return ComplexField::from_values(g, u, Space::Physical);
    }
    for _ in 0..steps {
        // rhs = (1 - i h H/2) u
        let ku = apply_k(&mut fft, &u, &|k| Complex64::new(k, 0.0));
        let rhs: Vec<Complex64> = u
            .iter()
            .zip(&ku)
            .zip(&v)
            .map(|((u, ku), &v)| u - half * (ku + v * u))
            .collect();
        let mut next = u.clone();
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            // next = (1 + i h K/2)^{-1} (rhs - i h V next / 2)
            let src: Vec<Complex64> = rhs.iter().zip(&next).zip(&v).map(|((r, x), &v)| r - half * v * x).collect();
            let cand = apply_k(&mut fft, &src, &|k| 1.0 / (1.0 + half * k));
            let diff: f64 = cand.iter().zip(&next).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let size: f64 = cand.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            next = cand;
            residual = diff / size;
            if residual < SOLVER_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SolverNonConvergence { residual });
        }
        u = next;
    }
    ComplexField::from_values(g, u, Space::Physical)
}

/// Richardson combination `(4 u_{dt/2} - u_dt)/3` of two implicit runs.
pub fn implicit_richardson(spec: &HamiltonianSpec, phi: &ComplexField, t: f64, dt: f64) -> Result<ComplexField> {
    let coarse = implicit_stepper(spec, phi, t, dt)?;
    let fine = implicit_stepper(spec, phi, t, 0.5 * dt)?;
    fine.scale_real(4.0 / 3.0).sub(&coarse.scale_real(1.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagate::free_propagator;
    use crate::spectral::apply_multiplier;

    fn gaussian(g: Grid3) -> ComplexField {
        ComplexField::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0))
    }

    #[test]
    fn free_flow_second_order() {
        let g = Grid3::new(16, 16.0).unwrap();
        let phi = gaussian(g);
        let exact = apply_multiplier(&phi, &free_propagator(0.5)).unwrap().to_physical();
        let e1 = implicit_stepper(&HamiltonianSpec::FreeSchrodinger, &phi, 0.5, 0.02).unwrap().distance(&exact).unwrap();
        let e2 = implicit_stepper(&HamiltonianSpec::FreeSchrodinger, &phi, 0.5, 0.01).unwrap().distance(&exact).unwrap();
        assert!((e1 / e2 - 4.0).abs() < 0.2, "{e1} {e2}");
    }

    #[test]
    fn rejects_nonlinear() {
        let g = Grid3::new(8, 8.0).unwrap();
        let spec = HamiltonianSpec::NlsFull(crate::ModelParams::default_nls());
        assert!(implicit_stepper(&spec, &ComplexField::zeros(g), 1.0, 0.1).is_err());
    }
}
