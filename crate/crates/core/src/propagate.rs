//! Time evolution: exact multiplier flows, Strang split-step for the Yukawa
//! Hamiltonians, and the Hartree NLS / semi-relativistic flows.
//!
//! Conventions: `e^{-itH}` solves `i u_t = H u`; the free flow `e^{it Delta}`
//! has symbol `e^{-it|xi|^2}`; `U2(t) = e^{-it sqrt(1 - Delta)}`. The Hartree
//! term always enters as `+(Q e^{-mu r}/r * |u|^2) u`.
//!
//! A Strang step applies half of the pointwise phase, the exact kinetic
//! multiplier, then the other half of the phase. The phase keeps `|u|`, so the
//! Hartree potential computed after the kinetic substep serves both the
//! trailing half-step and the next leading half-step. A step with `-dt` is the
//! exact inverse of a step with `dt`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};
use crate::spectral::{norm, ComplexField, Fft3, Grid3, Multiplier, Space};
use crate::yukawa::YukawaParams;

/// Largest step accepted for kinds with a potential term.
pub const MAX_DT: f64 = 0.02;

/// Finite-ness is checked every this many steps.
const BLOWUP_CHECK_STRIDE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianSpec {
    /// `-Delta`
    FreeSchrodinger,
    /// `H(lambda, y) = -Delta + lambda^2 V0(lambda x - y)` with `V0 = -Q0 e^{-mu0 r}/r`.
    YukawaSchrodinger {
        v0: YukawaParams,
        lambda: f64,
        shift: [f64; 3],
    },
    /// `sqrt(m^2 - Delta)`
    Semirel { mass: f64 },
    /// Generator of `U^lambda(t) = e^{it lambda^2 - it lambda sqrt(lambda^2 - Delta)}`;
    /// `lambda = inf` gives `-Delta/2`.
    SemirelScaled { lambda: f64 },
    NlsFull(ModelParams),
    SrhFull(ModelParams),
    /// `sqrt(m^2 - Delta)` plus the Hartree term of `model`.
    SrhFramed { model: ModelParams, mass: f64 },
}

impl HamiltonianSpec {
    pub fn yukawa(v0: YukawaParams) -> Self {
        HamiltonianSpec::YukawaSchrodinger {
            v0,
            lambda: 1.0,
            shift: [0.0; 3],
        }
    }

    /// `H(lambda)`; identical to `-Delta - lambda Q0 e^{-lambda mu0 r}/r`.
    pub fn yukawa_scaled(v0: YukawaParams, lambda: f64) -> Self {
        HamiltonianSpec::YukawaSchrodinger {
            v0,
            lambda,
            shift: [0.0; 3],
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(
            self,
            HamiltonianSpec::NlsFull(_) | HamiltonianSpec::SrhFull(_) | HamiltonianSpec::SrhFramed { .. }
        )
    }

    /// True when the flow is a single Fourier multiplier.
    pub fn is_multiplier(&self) -> bool {
        match self {
            HamiltonianSpec::FreeSchrodinger
            | HamiltonianSpec::Semirel { .. }
            | HamiltonianSpec::SemirelScaled { .. } => true,
            HamiltonianSpec::YukawaSchrodinger { v0, .. } => v0.q == 0.0,
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            HamiltonianSpec::YukawaSchrodinger { v0, lambda, shift } => {
                v0.validate()?;
                if !(lambda.is_finite() && lambda > 0.0) || shift.iter().any(|s| !s.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "scale must be positive and shift finite (lambda={lambda})"
                    )));
                }
            }
            HamiltonianSpec::Semirel { mass } if !(mass.is_finite() && mass > 0.0) => {
                return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
            }
            HamiltonianSpec::SemirelScaled { lambda } if !(lambda > 0.0) => {
                return Err(Error::InvalidArgument(format!("scale must be positive, got {lambda}")));
            }
            HamiltonianSpec::NlsFull(m) | HamiltonianSpec::SrhFull(m) => m.validate()?,
            HamiltonianSpec::SrhFramed { model, mass } => {
                model.validate()?;
                if !(mass.is_finite() && mass > 0.0) {
                    return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Kinetic dispersion relation `omega(|xi|^2)`; the multiplier is `e^{-it omega}`.
    pub fn dispersion(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let kind = *self;
        move |k2: f64| match kind {
            HamiltonianSpec::Semirel { mass } | HamiltonianSpec::SrhFramed { mass, .. } => {
                (mass * mass + k2).sqrt()
            }
            HamiltonianSpec::SemirelScaled { lambda } => semirel_scaled_dispersion(lambda, k2),
            HamiltonianSpec::SrhFull(_) => (1.0 + k2).sqrt(),
            _ => k2,
        }
    }

    /// Real potential samples on `grid`, or `None` for potential-free kinds.
    pub fn potential(&self, grid: &Grid3) -> Option<Vec<f64>> {
        match *self {
            HamiltonianSpec::YukawaSchrodinger { v0, lambda, shift } if v0.q != 0.0 => {
                Some(yukawa_potential(grid, v0, lambda, shift))
            }
            HamiltonianSpec::NlsFull(m) if m.v0.q != 0.0 => {
                Some(yukawa_potential(grid, m.v0, 1.0, [0.0; 3]))
            }
            _ => None,
        }
    }

    fn hartree(&self) -> Option<YukawaParams> {
        match *self {
            HamiltonianSpec::NlsFull(m)
            | HamiltonianSpec::SrhFull(m)
            | HamiltonianSpec::SrhFramed { model: m, .. }
                if m.v1.q != 0.0 =>
            {
                Some(m.v1)
            }
            _ => None,
        }
    }
}

/// `lambda^2 - lambda sqrt(lambda^2 + k2)` negated, written without cancellation.
fn semirel_scaled_dispersion(lambda: f64, k2: f64) -> f64 {
    if lambda.is_infinite() {
        0.5 * k2
    } else {
        k2 / (1.0 + (1.0 + k2 / (lambda * lambda)).sqrt())
    }
}

/// `lambda^2 V0(lambda x - y) = -lambda Q0 e^{-lambda mu0 r}/r` with
/// `r = |x - y/lambda|`, capped below at half the grid spacing.
pub fn yukawa_potential(grid: &Grid3, v0: YukawaParams, lambda: f64, shift: [f64; 3]) -> Vec<f64> {
    let cap = 0.5 * grid.spacing();
    let c = [shift[0] / lambda, shift[1] / lambda, shift[2] / lambda];
    (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let r = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2))
                .sqrt()
                .max(cap);
            -lambda * v0.q * (-lambda * v0.mu * r).exp() / r
        })
        .collect()
}

/// `U^lambda(t)`: symbol `e^{it(lambda^2 - lambda sqrt(lambda^2 + |xi|^2))}`;
/// `lambda = f64::INFINITY` gives `e^{i(t/2) Delta}`.
pub fn semirel_family(lambda: f64, t: f64) -> Multiplier {
    let label = if lambda.is_infinite() {
        format!("U^inf({t})")
    } else {
        format!("U^{lambda}({t})")
    };
    Multiplier::radial(label, move |k2| {
        Complex64::from_polar(1.0, -t * semirel_scaled_dispersion(lambda, k2))
    })
}

/// Split-step integrator owning all per-run buffers.
pub struct Stepper {
    grid: Grid3,
    dt: f64,
    fft: Fft3,
    dispersion: Vec<f64>,
    /// `e^{-i dt omega} / n^3` (the raw transform pair is unnormalized)
    kinetic: Vec<Complex64>,
    potential: Option<Vec<f64>>,
    /// `e^{-i dt V / 2}`, for the linear case
    half_phase: Option<Vec<Complex64>>,
    /// Hartree symbol divided by `n^3`
    hartree: Option<Vec<f64>>,
    /// Hartree potential of the current state
    w: Vec<f64>,
    w_valid: bool,
    buf: Vec<Complex64>,
}

impl Stepper {
    pub fn new(spec: &HamiltonianSpec, grid: Grid3, dt: f64) -> Result<Self> {
        spec.validate()?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidArgument(format!("time step must be nonzero, got {dt}")));
        }
        let omega = spec.dispersion();
        let k2 = grid.frequency_squares();
        let inv_n = 1.0 / grid.len() as f64;
        let dispersion: Vec<f64> = k2.iter().map(|&k| omega(k)).collect();
        let kinetic = dispersion
            .iter()
            .map(|&w| Complex64::from_polar(inv_n, -dt * w))
            .collect();
        let potential = spec.potential(&grid);
        let half_phase = potential.as_ref().map(|v| {
            v.iter()
                .map(|&v| Complex64::from_polar(1.0, -0.5 * dt * v))
                .collect()
        });
        let hartree = spec
            .hartree()
            .map(|p| k2.iter().map(|&k| p.symbol(k) * inv_n).collect());
        Ok(Self {
            grid,
            dt,
            fft: Fft3::new(grid.n()),
            dispersion,
            kinetic,
            potential,
            half_phase,
            hartree,
            w: vec![0.0; grid.len()],
            w_valid: false,
            buf: vec![Complex64::default(); grid.len()],
        })
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_nonlinear(&self) -> bool {
        self.hartree.is_some()
    }

    /// Exact kinetic flow over one step, in place on physical samples.
    pub fn kinetic(&mut self, u: &mut [Complex64]) {
        self.fft.forward_raw(u);
        u.iter_mut().zip(&self.kinetic).for_each(|(v, k)| *v *= k);
        self.fft.inverse_raw(u);
    }

    /// Hartree potential `(Q e^{-mu r}/r * |u|^2)` of `u` into `out`; zero when linear.
    pub fn hartree_potential(&mut self, u: &[Complex64], out: &mut [f64]) {
        let Some(symbol) = &self.hartree else {
            out.iter_mut().for_each(|w| *w = 0.0);
            return;
        };
        for (b, v) in self.buf.iter_mut().zip(u) {
            *b = Complex64::new(v.norm_sqr(), 0.0);
        }
        self.fft.forward_raw(&mut self.buf);
        self.buf.iter_mut().zip(symbol).for_each(|(b, s)| *b *= s);
        self.fft.inverse_raw(&mut self.buf);
        out.iter_mut().zip(&self.buf).for_each(|(w, b)| *w = b.re);
    }

    /// Half-step phase `e^{-i dt (V + w)/2}`; `w = None` means no Hartree term.
    pub fn half_phase(&self, u: &mut [Complex64], w: Option<&[f64]>) {
        match (w, &self.potential) {
            (None, None) => {}
            (None, Some(_)) => {
                let ph = self.half_phase.as_ref().unwrap();
                u.iter_mut().zip(ph).for_each(|(v, p)| *v *= p);
            }
            (Some(w), None) => {
                let c = -0.5 * self.dt;
                u.iter_mut()
                    .zip(w)
                    .for_each(|(v, &w)| *v *= Complex64::cis(c * w));
            }
            (Some(w), Some(pot)) => {
                let c = -0.5 * self.dt;
                u.iter_mut()
                    .zip(w.iter().zip(pot))
                    .for_each(|(v, (&w, &p))| *v *= Complex64::cis(c * (w + p)));
            }
        }
    }

    /// One Strang step in place.
    pub fn step(&mut self, u: &mut [Complex64]) {
        if self.hartree.is_none() {
            self.half_phase(u, None);
            self.kinetic(u);
            self.half_phase(u, None);
            return;
        }
        if !self.w_valid {
            let mut w = std::mem::take(&mut self.w);
            self.hartree_potential(u, &mut w);
            self.w = w;
        }
        let w = std::mem::take(&mut self.w);
        self.half_phase(u, Some(&w));
        self.w = w;
        self.kinetic(u);
        let mut w = std::mem::take(&mut self.w);
        self.hartree_potential(u, &mut w);
        self.half_phase(u, Some(&w));
        self.w = w;
        self.w_valid = true;
    }

    /// Forget the cached Hartree potential (call after modifying the state externally).
    pub fn reset(&mut self) {
        self.w_valid = false;
    }

    /// `sum_xi omega |u_hat|^2 h^3 + h^3 sum (V + W/2) |u|^2`.
    pub fn energy(&mut self, u: &[Complex64]) -> f64 {
        let h3 = self.grid.cell_volume();
        let mut spec = u.to_vec();
        self.fft.forward(&mut spec);
        let kin: f64 = spec
            .iter()
            .zip(&self.dispersion)
            .map(|(v, w)| w * v.norm_sqr())
            .sum();
        let pot: f64 = match &self.potential {
            Some(p) => u.iter().zip(p).map(|(v, p)| p * v.norm_sqr()).sum(),
            None => 0.0,
        };
        let hart = if self.hartree.is_some() {
            let mut w = vec![0.0; u.len()];
            self.hartree_potential(u, &mut w);
            0.5 * u.iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>()
        } else {
            0.0
        };
        h3 * (kin + pot + hart)
    }
}

/// What to record during an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    None,
    Fields { stride: usize },
    Norms { stride: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub l2: f64,
    pub l4: f64,
    pub l6: f64,
    pub linf: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub final_state: ComplexField,
    pub fields: Vec<(f64, ComplexField)>,
    pub norms: Vec<NormSample>,
    /// `| ||final|| - ||initial|| | / ||initial||`
    pub mass_drift: f64,
    /// Relative energy change; for multiplier flows it is zero up to roundoff.
    pub energy_drift: f64,
    pub steps: usize,
}

fn norm_sample(t: f64, f: &ComplexField) -> NormSample {
    NormSample {
        t,
        l2: f.norm(),
        l4: norm(f, 4.0).unwrap(),
        l6: norm(f, 6.0).unwrap(),
        linf: f.max_abs(),
    }
}

/// Step count and adjusted step so that `count * step = span` exactly.
pub fn step_plan(span: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if !span.is_finite() {
        return Err(Error::InvalidArgument(format!("time span must be finite, got {span}")));
    }
    if span == 0.0 {
        return Ok((0, dt));
    }
    let steps = (span.abs() / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, span / steps as f64))
}

/// General driver: evolve `u0` from `t0` to `t1` under `spec`.
pub fn evolve(
    spec: &HamiltonianSpec,
    u0: &ComplexField,
    t0: f64,
    t1: f64,
    dt: f64,
    sampling: Sampling,
) -> Result<EvolutionResult> {
    spec.validate()?;
    let grid = *u0.grid();
    let start = u0.to_physical();
    let initial_norm = start.norm();
    let span = t1 - t0;

    // pure multipliers: one exact step, sampling still on the dt lattice
    if spec.is_multiplier() && sampling == Sampling::None {
        let out = apply_flow(spec, &start, span)?;
        return Ok(finish(out, initial_norm, 0.0, Vec::new(), Vec::new(), 1));
    }
    if spec.potential(&grid).is_some() && dt > MAX_DT {
        return Err(Error::InvalidArgument(format!(
            "time step {dt} exceeds the maximum {MAX_DT} for a potential term"
        )));
    }
    let (steps, h) = step_plan(span, dt)?;
    let mut stepper = Stepper::new(spec, grid, if steps == 0 { dt } else { h })?;
    let e0 = stepper.energy(start.values());
    let mut u = start.clone().into_values();
    let mut fields = Vec::new();
    let mut norms = Vec::new();
    let record = |k: usize, u: &[Complex64], fields: &mut Vec<_>, norms: &mut Vec<_>| {
        let t = t0 + k as f64 * h;
        match sampling {
            Sampling::Fields { stride } if k % stride.max(1) == 0 || k == steps => {
                let f = ComplexField::from_values(grid, u.to_vec(), Space::Physical).unwrap();
                fields.push((t, f));
            }
            Sampling::Norms { stride } if k % stride.max(1) == 0 || k == steps => {
                let f = ComplexField::from_values(grid, u.to_vec(), Space::Physical).unwrap();
                norms.push(norm_sample(t, &f));
            }
            _ => {}
        }
    };
    record(0, &u, &mut fields, &mut norms);
    for k in 1..=steps {
        stepper.step(&mut u);
        if k % BLOWUP_CHECK_STRIDE == 0 || k == steps {
            check_finite(&u, t0 + k as f64 * h)?;
        }
        record(k, &u, &mut fields, &mut norms);
    }
    let e1 = stepper.energy(&u);
    let energy_drift = if e0 != 0.0 {
        ((e1 - e0) / e0).abs()
    } else {
        (e1 - e0).abs()
    };
    let out = ComplexField::from_values(grid, u, Space::Physical)?;
    Ok(finish(out, initial_norm, energy_drift, fields, norms, steps))
}

fn finish(
    out: ComplexField,
    initial_norm: f64,
    energy_drift: f64,
    fields: Vec<(f64, ComplexField)>,
    norms: Vec<NormSample>,
    steps: usize,
) -> EvolutionResult {
    let mass_drift = if initial_norm > 0.0 {
        (out.norm() - initial_norm).abs() / initial_norm
    } else {
        out.norm()
    };
    EvolutionResult {
        final_state: out,
        fields,
        norms,
        mass_drift,
        energy_drift,
        steps,
    }
}

pub(crate) fn check_finite(u: &[Complex64], time: f64) -> Result<()> {
    if u.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp { time })
    }
}

/// Exact flow of a multiplier kind over time `t`.
fn apply_flow(spec: &HamiltonianSpec, u: &ComplexField, t: f64) -> Result<ComplexField> {
    let omega = spec.dispersion();
    let mut spec_field = u.to_frequency();
    let k2 = u.grid().frequency_squares();
    spec_field
        .values_mut()
        .iter_mut()
        .zip(&k2)
        .for_each(|(v, &k)| *v *= Complex64::from_polar(1.0, -t * omega(k)));
    check_finite(spec_field.values(), t)?;
    Ok(spec_field.to_physical())
}

/// `e^{-itH} phi` for the linear kinds.
pub fn evolve_linear(spec: &HamiltonianSpec, phi: &ComplexField, t: f64, dt: f64) -> Result<EvolutionResult> {
    evolve_linear_with(spec, phi, t, dt, Sampling::None)
}

pub fn evolve_linear_with(
    spec: &HamiltonianSpec,
    phi: &ComplexField,
    t: f64,
    dt: f64,
    sampling: Sampling,
) -> Result<EvolutionResult> {
    if spec.is_nonlinear() {
        return Err(Error::InvalidArgument(
            "nonlinear kind passed to evolve_linear; use evolve_nls or evolve_srh".into(),
        ));
    }
    evolve(spec, phi, 0.0, t, dt, sampling)
}

/// NLS flow from `t0` to `t1`.
pub fn evolve_nls(model: &ModelParams, u0: &ComplexField, t0: f64, t1: f64, dt: f64) -> Result<EvolutionResult> {
    evolve_nls_with(model, u0, t0, t1, dt, Sampling::None)
}

pub fn evolve_nls_with(
    model: &ModelParams,
    u0: &ComplexField,
    t0: f64,
    t1: f64,
    dt: f64,
    sampling: Sampling,
) -> Result<EvolutionResult> {
    if model.family != Family::Nls {
        return Err(Error::InvalidArgument("evolve_nls needs an nls model".into()));
    }
    evolve(&HamiltonianSpec::NlsFull(*model), u0, t0, t1, dt, sampling)
}

/// Semi-relativistic Hartree flow from `t0` to `t1`.
pub fn evolve_srh(model: &ModelParams, w0: &ComplexField, t0: f64, t1: f64, dt: f64) -> Result<EvolutionResult> {
    evolve_srh_with(model, w0, t0, t1, dt, Sampling::None)
}

pub fn evolve_srh_with(
    model: &ModelParams,
    w0: &ComplexField,
    t0: f64,
    t1: f64,
    dt: f64,
    sampling: Sampling,
) -> Result<EvolutionResult> {
    if model.family != Family::Srh {
        return Err(Error::InvalidArgument("evolve_srh needs an srh model".into()));
    }
    if model.v1.q == 0.0 {
        return evolve(&HamiltonianSpec::Semirel { mass: 1.0 }, w0, t0, t1, dt, sampling);
    }
    evolve(&HamiltonianSpec::SrhFull(*model), w0, t0, t1, dt, sampling)
}

/// Free Schrödinger symbol `e^{-it|xi|^2}`, i.e. `e^{it Delta}`.
pub fn free_propagator(t: f64) -> Multiplier {
    Multiplier::radial(format!("exp(i{t} Delta)"), move |k2| Complex64::from_polar(1.0, -t * k2))
}

/// `<t> = sqrt(1 + t^2)`.
pub fn japanese(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_multiplier, ProfileSpec, Profile};

    fn gaussian(grid: Grid3, a: f64) -> ComplexField {
        let p = ProfileSpec::gaussian(a);
        ComplexField::from_fn(grid, |x| p.value(x))
    }

    #[test]
    fn zero_time_is_identity() {
        let g = Grid3::new(16, 16.0).unwrap();
        let phi = gaussian(g, 1.0);
        let spec = HamiltonianSpec::yukawa(YukawaParams::new(0.5, 1.0).unwrap());
        let r = evolve_linear(&spec, &phi, 0.0, 0.01).unwrap();
        assert!(r.final_state.distance(&phi).unwrap() < 1e-15);
    }

    #[test]
    fn negative_step_inverts() {
        let g = Grid3::new(16, 16.0).unwrap();
        let phi = gaussian(g, 1.0).scale_real(0.3);
        let model = ModelParams::default_nls();
        let fwd = evolve_nls(&model, &phi, 0.0, 0.5, 0.01).unwrap();
        let back = evolve_nls(&model, &fwd.final_state, 0.5, 0.0, 0.01).unwrap();
        assert!(back.final_state.distance(&phi).unwrap() < 1e-12);
    }

    #[test]
    fn free_multiplier_matches_stepping() {
        let g = Grid3::new(16, 16.0).unwrap();
        let phi = gaussian(g, 1.0);
        let exact = apply_multiplier(&phi, &free_propagator(0.3)).unwrap();
        let stepped = evolve(&HamiltonianSpec::FreeSchrodinger, &phi, 0.0, 0.3, 0.01, Sampling::Norms { stride: 10 }).unwrap();
        assert!(stepped.final_state.distance(&exact).unwrap() < 1e-12);
        assert_eq!(stepped.norms.len(), 4);
    }

    #[test]
    fn semirel_family_symbol() {
        let m = semirel_family(3.0, 1.7);
        assert!((m.eval([0.0; 3]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // lambda^2 - lambda sqrt(lambda^2 + k^2) approaches -k^2/2
        let k2 = 4.0;
        let mut last = f64::INFINITY;
        for lambda in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let d = (semirel_scaled_dispersion(lambda, k2) - 0.5 * k2).abs();
            assert!(d < last);
            last = d;
        }
        let d = (semirel_scaled_dispersion(10.0, 4.0) - 2.0).abs();
        assert!((d / 0.02 - 1.0).abs() < 0.2);
    }

    #[test]
    fn step_plan_hits_endpoint() {
        let (n, h) = step_plan(1.0, 0.003).unwrap();
        assert_eq!(n, 334);
        assert!((n as f64 * h - 1.0).abs() < 1e-14);
        let (n, h) = step_plan(-0.5, 0.005).unwrap();
        assert_eq!(n, 100);
        assert!(h < 0.0);
    }
}
