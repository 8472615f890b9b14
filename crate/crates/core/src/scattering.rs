//! Forward scattering maps, wave operators, the Picard iteration of the
//! integral equation and the Born-type functionals.
//!
//! A [`ScatterConfig`] carries a frame scale `lambda`. With `lambda != 1` the
//! field passed in is read as `phi(x/lambda)` on the dilated box `(n, lambda L)`
//! with times scaled by `lambda^2` (by `lambda` for the semi-relativistic
//! flow). That problem is computed on the base box through its exact
//! conjugate: `H(lambda)` and the Hartree pair `(lambda^4 Q, lambda mu)` (or
//! mass `lambda` and `(lambda^3 Q, lambda mu)`). Horizon and step are stated in
//! the base frame; inner products reported in the dilated frame carry the
//! Jacobian `lambda^3`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};
use crate::propagate::{check_finite, step_plan, HamiltonianSpec, Stepper};
use crate::spectral::{inner, trapezoid_weights, ComplexField, Fft3, Grid3, Space};
use crate::yukawa::YukawaParams;

/// Default smallness threshold on `||phi_-||`.
pub const DEFAULT_SMALLNESS: f64 = 0.25;
/// Largest tail fraction of the incoming profile beyond `L/2 - 2`.
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterConfig {
    pub grid: Grid3,
    /// Horizon `T`: the nonlinear solve runs over `[-T, T]`.
    pub horizon: f64,
    pub dt: f64,
    /// Amplitude used by the pairing helpers.
    pub epsilon: f64,
    /// Frame scale, see the module docs.
    pub lambda: f64,
    pub richardson: bool,
    pub smallness: f64,
    pub tail_budget: f64,
}

impl ScatterConfig {
    pub fn new(grid: Grid3, horizon: f64, dt: f64) -> Result<Self> {
        let c = Self {
            grid,
            horizon,
            dt,
            epsilon: 0.1,
            lambda: 1.0,
            richardson: true,
            smallness: DEFAULT_SMALLNESS,
            tail_budget: DEFAULT_TAIL_BUDGET,
        };
        c.validate()?;
        Ok(c)
    }

    /// `L = 40, n = 48, T = 8, dt = 0.005`.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::new(Grid3::new(n, 40.0)?, 8.0, 0.005)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 4.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon T must be >= 4, got {}", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt <= 0.02) {
            return Err(Error::Config(format!("dt must lie in (0, 0.02], got {}", self.dt)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Config(format!("frame scale must be positive, got {}", self.lambda)));
        }
        if !(self.smallness > 0.0) || !(self.tail_budget > 0.0) {
            return Err(Error::Config("smallness and tail budget must be positive".into()));
        }
        Ok(())
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_grid(self, grid: Grid3) -> Self {
        Self { grid, ..self }
    }

    /// Inner-product Jacobian between the dilated and base frames.
    pub fn jacobian(&self) -> f64 {
        self.lambda.powi(3)
    }

    /// Base-frame model conjugate to `model` on the dilated box.
    pub fn frame_model(&self, model: &ModelParams) -> ModelParams {
        let l = self.lambda;
        match model.family {
            Family::Nls => ModelParams {
                v0: model.v0.scaled(l),
                v1: YukawaParams {
                    q: l.powi(4) * model.v1.q,
                    mu: l * model.v1.mu,
                },
                family: Family::Nls,
            },
            Family::Srh => ModelParams {
                v0: model.v0,
                v1: YukawaParams {
                    q: l.powi(3) * model.v1.q,
                    mu: l * model.v1.mu,
                },
                family: Family::Srh,
            },
        }
    }

    /// Linear generator in the base frame.
    pub fn linear_spec(&self, model: &ModelParams) -> HamiltonianSpec {
        match model.family {
            Family::Nls => HamiltonianSpec::yukawa_scaled(model.v0, self.lambda),
            Family::Srh => HamiltonianSpec::Semirel { mass: self.lambda },
        }
    }

    fn nonlinear_spec(&self, model: &ModelParams) -> HamiltonianSpec {
        let m = self.frame_model(model);
        match model.family {
            Family::Nls => HamiltonianSpec::NlsFull(m),
            Family::Srh => HamiltonianSpec::SrhFramed {
                model: m,
                mass: self.lambda,
            },
        }
    }

    /// Norm of the field as seen in the dilated frame.
    fn frame_norm(&self, f: &ComplexField) -> f64 {
        self.lambda.powf(1.5) * f.norm()
    }
}

#[derive(Debug, Clone)]
pub struct ScatterResult {
    pub phi_plus: ComplexField,
    /// `||F(u(-T))|| + ||F(u(T))||`, how far the endpoints are from free motion.
    pub defect: f64,
    /// `||g(-T/2) - g(-T)|| + ||g(T) - g(T/2)||` with `g(t) = e^{itH} u(t)`:
    /// the change of the dressed state over the outer half of each tail.
    pub horizon_sensitivity: f64,
    /// Largest fraction of `|u(+-T)|^2` beyond `L/2 - 2` (diagnostic).
    pub tail_mass: f64,
}

fn check_input(cfg: &ScatterConfig, phi: &ComplexField) -> Result<()> {
    cfg.validate()?;
    if phi.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    let n = cfg.frame_norm(phi);
    if n > cfg.smallness {
        return Err(Error::Smallness {
            norm: n,
            threshold: cfg.smallness,
        });
    }
    let radius = 0.5 * cfg.grid.box_length() - 2.0;
    let tail = phi.tail_mass_fraction(radius);
    if tail > cfg.tail_budget {
        return Err(Error::TailMass {
            mass: tail,
            budget: cfg.tail_budget,
            suggested_box: suggest_box(phi, cfg.tail_budget),
        });
    }
    Ok(())
}

fn suggest_box(phi: &ComplexField, budget: f64) -> f64 {
    let half = 0.5 * phi.grid().box_length();
    let mut r = 0.0;
    while r < half && phi.tail_mass_fraction(r) > budget {
        r += 0.25 * phi.grid().spacing();
    }
    // the profile would need its current extent plus the margin, with room to spare
    2.0 * (r + 2.0) * 1.5
}

/// Propagate a state with the linear generator for `steps` steps of `h`.
fn linear_run(spec: &HamiltonianSpec, grid: Grid3, u: &mut [Complex64], span: f64, dt: f64) -> Result<()> {
    let (steps, h) = step_plan(span, dt)?;
    if steps == 0 {
        return Ok(());
    }
    let mut s = Stepper::new(spec, grid, h)?;
    for _ in 0..steps {
        s.step(u);
    }
    check_finite(u, span)
}

fn field(grid: Grid3, values: Vec<Complex64>) -> ComplexField {
    ComplexField::from_values(grid, values, Space::Physical).expect("length matches grid")
}

/// `||(Y * |u|^2) u||` for the Hartree pair `v1`.
fn hartree_force_norm(grid: Grid3, v1: YukawaParams, u: &[Complex64]) -> f64 {
    if v1.q == 0.0 {
        return 0.0;
    }
    let mut fft = Fft3::new(grid.n());
    let k2 = grid.frequency_squares();
    let mut rho: Vec<Complex64> = u.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
    fft.forward(&mut rho);
    rho.iter_mut().zip(&k2).for_each(|(r, &k)| *r *= v1.symbol(k));
    fft.inverse(&mut rho);
    let s: f64 = rho.iter().zip(u).map(|(w, v)| (w.re * v).norm_sqr()).sum();
    (grid.cell_volume() * s).sqrt()
}

/// Scattering map in the time domain: `u(-T) = e^{iTH} phi_-`, nonlinear flow
/// to `T`, `phi_+ = e^{iTH} u(T)`.
pub fn s_full(model: &ModelParams, cfg: &ScatterConfig, phi_minus: &ComplexField) -> Result<ScatterResult> {
    model.validate()?;
    check_input(cfg, phi_minus)?;
    let grid = cfg.grid;
    let t = cfg.horizon;
    let lin = cfg.linear_spec(model);
    let nl = cfg.nonlinear_spec(model);
    let frame = cfg.frame_model(model);

    let phi = phi_minus.to_physical();
    let mut u = phi.values().to_vec();
    linear_run(&lin, grid, &mut u, -t, cfg.dt)?;
    let radius = 0.5 * grid.box_length() - 2.0;
    let mut tail_mass = field(grid, u.clone()).tail_mass_fraction(radius);
    let mut defect = hartree_force_norm(grid, frame.v1, &u);

    let (steps, h) = step_plan(2.0 * t, cfg.dt)?;
    let mut stepper = Stepper::new(&nl, grid, h)?;
    let quarter = steps / 4;
    let mut g_quarter = None;
    let mut g_three_quarter = None;
    for k in 1..=steps {
        stepper.step(&mut u);
        if k % 64 == 0 {
            check_finite(&u, -t + k as f64 * h)?;
        }
        if steps % 4 == 0 && k == quarter {
            g_quarter = Some(u.clone());
        }
        if steps % 4 == 0 && k == 3 * quarter {
            g_three_quarter = Some(u.clone());
        }
    }
    check_finite(&u, t)?;
    tail_mass = tail_mass.max(field(grid, u.clone()).tail_mass_fraction(radius));
    defect += hartree_force_norm(grid, frame.v1, &u);

    let mut plus = u;
    linear_run(&lin, grid, &mut plus, -t, cfg.dt)?;
    let phi_plus = field(grid, plus);

    // g(-T/2) = e^{-i(T/2)H} u(-T/2), g(T/2) = e^{i(T/2)H} u(T/2)
    let horizon_sensitivity = match (g_quarter, g_three_quarter) {
        (Some(mut a), Some(mut b)) => {
            linear_run(&lin, grid, &mut a, 0.5 * t, cfg.dt)?;
            linear_run(&lin, grid, &mut b, -0.5 * t, cfg.dt)?;
            field(grid, a).distance(&phi)? + phi_plus.distance(&field(grid, b))?
        }
        _ => f64::NAN,
    };
    Ok(ScatterResult {
        phi_plus,
        defect,
        horizon_sensitivity,
        tail_mass,
    })
}

/// Semi-relativistic scattering map with `U2` dressing.
pub fn s_srh(model: &ModelParams, cfg: &ScatterConfig, phi_minus: &ComplexField) -> Result<ScatterResult> {
    if model.family != Family::Srh {
        return Err(Error::InvalidArgument("s_srh needs an srh model".into()));
    }
    s_full(model, cfg, phi_minus)
}

/// `<(S - id)(eps phi), phi>` in the dilated frame, at `eps = cfg.epsilon`.
pub fn pairing(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<(Complex64, ScatterResult)> {
    let data = phi.scale_real(cfg.epsilon);
    let r = s_full(model, cfg, &data)?;
    let diff = r.phi_plus.sub(&data.to_physical())?;
    Ok((inner(&diff, phi)? * cfg.jacobian(), r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveSign {
    Minus,
    Plus,
}

/// Finite-horizon wave operator `Omega_{+-}` or its adjoint.
///
/// `Omega_- phi = e^{-iTH} e^{-iT Delta} phi` (free back to `-T`, then `H`
/// forward), `Omega_+ phi = e^{iTH} e^{iT Delta} phi`; adjoints reverse the
/// composition.
pub fn wave_operator(sign: WaveSign, adjoint: bool, v0: YukawaParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<ComplexField> {
    cfg.validate()?;
    let grid = cfg.grid;
    let t = cfg.horizon;
    let h_spec = HamiltonianSpec::yukawa_scaled(v0, cfg.lambda);
    let free = HamiltonianSpec::FreeSchrodinger;
    let mut u = phi.to_physical().into_values();
    // (free time, interacting time), applied in order
    let (first, second) = match (sign, adjoint) {
        (WaveSign::Minus, false) => ((&free, -t), (&h_spec, t)),
        (WaveSign::Plus, false) => ((&free, t), (&h_spec, -t)),
        (WaveSign::Minus, true) => ((&h_spec, -t), (&free, t)),
        (WaveSign::Plus, true) => ((&h_spec, t), (&free, -t)),
    };
    for (spec, span) in [first, second] {
        linear_run(spec, grid, &mut u, span, cfg.dt)?;
    }
    Ok(field(grid, u))
}

#[derive(Debug, Clone)]
pub struct FreeFrameResult {
    /// `S1 phi = Omega_+^* S_F Omega_- phi`
    pub s1: ComplexField,
    pub inner: ScatterResult,
    /// `||Omega_+ S1 Omega_-^* psi - S_F psi||` when requested.
    pub consistency: Option<f64>,
}

/// `S1 = Omega_+^* S_F Omega_-`; optionally checks `Omega_+ S1 Omega_-^* = S_F`.
pub fn s_free_frame(model: &ModelParams, cfg: &ScatterConfig, phi_minus: &ComplexField, check: bool) -> Result<FreeFrameResult> {
    let v0 = model.v0;
    let w = wave_operator(WaveSign::Minus, false, v0, cfg, phi_minus)?;
    let inner = s_full(model, cfg, &w)?;
    let s1 = wave_operator(WaveSign::Plus, true, v0, cfg, &inner.phi_plus)?;
    let consistency = if check {
        let pre = wave_operator(WaveSign::Minus, true, v0, cfg, phi_minus)?;
        let mid = s1_apply(model, cfg, &pre)?;
        let lhs = wave_operator(WaveSign::Plus, false, v0, cfg, &mid)?;
        let direct = s_full(model, cfg, phi_minus)?;
        Some(lhs.distance(&direct.phi_plus)?)
    } else {
        None
    };
    Ok(FreeFrameResult {
        s1,
        inner,
        consistency,
    })
}

fn s1_apply(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<ComplexField> {
    let w = wave_operator(WaveSign::Minus, false, model.v0, cfg, phi)?;
    let r = s_full(model, cfg, &w)?;
    wave_operator(WaveSign::Plus, true, model.v0, cfg, &r.phi_plus)
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// `u^(j)(T)` for `j = 0..=k`
    pub iterates: Vec<ComplexField>,
    /// `||u^(j+1)(T) - u^(j)(T)||`
    pub increments: Vec<f64>,
}

impl PicardResult {
    pub fn last(&self) -> &ComplexField {
        self.iterates.last().expect("at least the zeroth iterate")
    }
}

/// Picard iterates of the discrete integral equation on `[-T, T]`.
///
/// Iterate `j` is advanced with the Strang scheme whose Hartree phases come
/// from iterate `j - 1` at the same time level; iterate 0 is the linear flow.
/// All iterates march together, so memory is `O(k)` fields. The fixed point is
/// exactly the split-step solution used by [`s_full`].
pub fn duhamel_picard(model: &ModelParams, cfg: &ScatterConfig, phi_minus: &ComplexField, k: usize) -> Result<PicardResult> {
    if k > 5 {
        return Err(Error::InvalidArgument(format!("at most 5 Picard iterations, got {k}")));
    }
    model.validate()?;
    check_input(cfg, phi_minus)?;
    let grid = cfg.grid;
    let t = cfg.horizon;
    let lin = cfg.linear_spec(model);
    let nl = cfg.nonlinear_spec(model);

    let mut start = phi_minus.to_physical().into_values();
    linear_run(&lin, grid, &mut start, -t, cfg.dt)?;
    let (steps, h) = step_plan(2.0 * t, cfg.dt)?;
    let mut stepper = Stepper::new(&nl, grid, h)?;
    let nonlinear = stepper.is_nonlinear();
    let mut states: Vec<Vec<Complex64>> = vec![start; k + 1];
    // w[j] = Hartree potential of iterate j at the current time level
    let mut w: Vec<Vec<f64>> = vec![vec![0.0; grid.len()]; k + 1];
    if nonlinear {
        for j in 0..k {
            let mut out = std::mem::take(&mut w[j]);
            stepper.hartree_potential(&states[j], &mut out);
            w[j] = out;
        }
    }
    let mut w_next = vec![0.0; grid.len()];
    for step in 1..=steps {
        for j in 0..=k {
            let u = &mut states[j];
            if j == 0 || !nonlinear {
                stepper.half_phase(u, None);
                stepper.kinetic(u);
                stepper.half_phase(u, None);
            } else {
                // w[j-1] already advanced to the new level for the trailing half
                stepper.half_phase(u, Some(&w_next));
                stepper.kinetic(u);
                stepper.half_phase(u, Some(&w[j - 1]));
            }
            if nonlinear && j < k {
                // keep the old level of iterate j for iterate j+1's leading half
                std::mem::swap(&mut w_next, &mut w[j]);
                let mut out = std::mem::take(&mut w[j]);
                stepper.hartree_potential(&states[j], &mut out);
                w[j] = out;
            }
        }
        if step % 64 == 0 || step == steps {
            for u in &states {
                check_finite(u, -t + step as f64 * h)?;
            }
        }
    }
    let iterates: Vec<ComplexField> = states.into_iter().map(|u| field(grid, u)).collect();
    let increments: Vec<f64> = iterates
        .windows(2)
        .map(|p| p[1].distance(&p[0]).unwrap())
        .collect();
    for (i, pair) in increments.windows(2).enumerate() {
        if pair[0] > 0.0 && pair[1] > pair[0] {
            return Err(Error::NonContraction {
                iteration: i + 2,
                ratio: pair[1] / pair[0],
            });
        }
    }
    Ok(PicardResult {
        iterates,
        increments,
    })
}

/// Time-integrated, shell-binned power spectrum of the density `|v(t)|^2`
/// of a linear flow over `[-T, T]` (trapezoid weights).
///
/// `shells[s] = int h^3 sum_{|k|^2 = s} |rho_hat(k, t)|^2 dt` with the unitary
/// transform, so every radial pairing `int <K * rho, rho> dt` is the finite sum
/// `sum_s K_hat(s) shells[s]`.
#[derive(Debug, Clone)]
pub struct DensitySpectrum {
    pub grid: Grid3,
    pub shells: Vec<f64>,
    /// Physical-space pairings `int h^3 sum_x (K_alpha * rho) rho dt` for the
    /// requested `alpha`, with kernel `alpha e^{-sqrt|alpha| r}/r`.
    pub physical: Vec<(f64, f64)>,
    pub horizon: f64,
}

impl DensitySpectrum {
    /// Sweep the linear flow `spec` from `phi` over `[-T, T]`.
    pub fn sweep(spec: &HamiltonianSpec, phi: &ComplexField, horizon: f64, dt: f64, alphas: &[f64]) -> Result<Self> {
        let grid = *phi.grid();
        let (steps, h) = step_plan(horizon, dt)?;
        let mut acc = Accumulator::new(grid, alphas);
        let start = phi.to_physical().into_values();
        // real data and a real generator: |v(-t)| = |v(t)|
        let symmetric = phi.to_physical().values().iter().all(|v| v.im == 0.0);
        let w = trapezoid_weights(2 * steps + 1, h);
        let mut u = start.clone();
        acc.add(&u, w[steps]);
        let mut fwd = Stepper::new(spec, grid, h)?;
        for k in 1..=steps {
            fwd.step(&mut u);
            let weight = if symmetric { 2.0 * w[steps + k] } else { w[steps + k] };
            acc.add(&u, weight);
        }
        check_finite(&u, horizon)?;
        if !symmetric {
            let mut u = start;
            let mut back = Stepper::new(spec, grid, -h)?;
            for k in 1..=steps {
                back.step(&mut u);
                acc.add(&u, w[steps - k]);
            }
            check_finite(&u, -horizon)?;
        }
        Ok(Self {
            grid,
            shells: acc.shells,
            physical: alphas.iter().copied().zip(acc.physical).collect(),
            horizon,
        })
    }

    /// `sum_s symbol(|xi_s|^2) shells[s]`.
    pub fn pair(&self, symbol: impl Fn(f64) -> f64) -> f64 {
        let unit = self.grid.shell_unit();
        self.shells
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(s, p)| symbol(unit * s as f64) * p)
            .sum()
    }

    /// `||v||_{(4,4)}^4`.
    pub fn l44(&self) -> f64 {
        self.shells.iter().sum()
    }

    /// `int <(Q e^{-mu r}/r * |v|^2), |v|^2> dt`.
    pub fn yukawa_pairing(&self, kernel: YukawaParams) -> f64 {
        self.pair(|k2| kernel.symbol(k2))
    }

    /// `int <(alpha e^{-sqrt|alpha| r}/r * |v|^2), |v|^2> dt` in Plancherel form.
    pub fn psi(&self, alpha: f64) -> f64 {
        if alpha == 0.0 {
            return 0.0;
        }
        let a = alpha.abs();
        let s = self.pair(|k2| 4.0 * std::f64::consts::PI / (a + k2));
        alpha * s
    }
}

struct Accumulator {
    grid: Grid3,
    fft: Fft3,
    shell_of: Vec<usize>,
    shells: Vec<f64>,
    alphas: Vec<f64>,
    physical: Vec<f64>,
    k2: Vec<f64>,
    rho: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl Accumulator {
    fn new(grid: Grid3, alphas: &[f64]) -> Self {
        Self {
            grid,
            fft: Fft3::new(grid.n()),
            shell_of: grid.shells(),
            shells: vec![0.0; grid.max_shell() + 1],
            alphas: alphas.to_vec(),
            physical: vec![0.0; alphas.len()],
            k2: if alphas.is_empty() { Vec::new() } else { grid.frequency_squares() },
            rho: vec![Complex64::default(); grid.len()],
            buf: Vec::new(),
        }
    }

    fn add(&mut self, u: &[Complex64], weight: f64) {
        let h3 = self.grid.cell_volume();
        for (r, v) in self.rho.iter_mut().zip(u) {
            *r = Complex64::new(v.norm_sqr(), 0.0);
        }
        let density: Vec<f64> = if self.alphas.is_empty() {
            Vec::new()
        } else {
            self.rho.iter().map(|r| r.re).collect()
        };
        self.fft.forward(&mut self.rho);
        let c = weight * h3;
        for (r, &s) in self.rho.iter().zip(&self.shell_of) {
            self.shells[s] += c * r.norm_sqr();
        }
        for (i, &alpha) in self.alphas.iter().enumerate() {
            if alpha == 0.0 {
                continue;
            }
            let a = alpha.abs();
            self.buf.clear();
            self.buf.extend(self.rho.iter().zip(&self.k2).map(|(r, &k)| {
                r * (4.0 * std::f64::consts::PI * alpha / (a + k))
            }));
            self.fft.inverse(&mut self.buf);
            let s: f64 = self.buf.iter().zip(&density).map(|(w, d)| w.re * d).sum();
            self.physical[i] += c * s;
        }
    }
}

/// Linear flow used by the Born functionals in the frame of `cfg`.
pub fn born_spectrum(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<DensitySpectrum> {
    cfg.validate()?;
    DensitySpectrum::sweep(&cfg.linear_spec(model), phi, cfg.horizon, cfg.dt, &[])
}

/// `K[phi] = int <F(v), v> dt`, `v = e^{-itH} phi`, in the dilated frame of `cfg`.
///
/// `K = lim i eps^{-3} <(S_F - id)(eps phi), phi>`; with the trapezoid rule on
/// the same discrete flow the limit is matched by the split-step scheme.
pub fn born_functional(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<f64> {
    if model.v1.q == 0.0 {
        return Ok(0.0);
    }
    let spec = born_spectrum(model, cfg, phi)?;
    Ok(cfg.jacobian() * spec.yukawa_pairing(cfg.frame_model(model).v1))
}

/// Scaled-frame Born functional
/// `B(lambda) = int <(lambda^2 Q e^{-lambda mu r}/r) * |w|^2, |w|^2> dt`,
/// `w = e^{-itH(lambda)} phi`.
///
/// Substituting `z = y/lambda` in `int Q e^{-mu|y|}/|y| Phi(lambda, y) dy` and
/// using the translation identity for `H(lambda, y)` turns the double flow
/// into a single one: `Phi` pairs `|w(x - z)|^2` against `|w(x)|^2`, and the
/// kernel becomes `lambda^3 Q e^{-lambda mu |z|}/(lambda |z|)`.
pub fn scaled_born(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambda: f64) -> Result<f64> {
    if model.v1.q == 0.0 {
        return Ok(0.0);
    }
    let frame = cfg.with_lambda(lambda);
    let spec = born_spectrum(model, &frame, phi)?;
    Ok(scaled_pair(&spec, model.v1, lambda))
}

pub(crate) fn scaled_pair(spec: &DensitySpectrum, v1: YukawaParams, lambda: f64) -> f64 {
    let kernel = YukawaParams {
        q: lambda * lambda * v1.q,
        mu: lambda * v1.mu,
    };
    spec.yukawa_pairing(kernel)
}

/// `Phi(lambda, y) = int |e^{-itH(lambda,y)} tau_{y/lambda} phi|^2 |e^{-itH(lambda)} phi|^2 d(t, x)`.
pub fn phi_capacity(v0: YukawaParams, cfg: &ScatterConfig, phi: &ComplexField, lambda: f64, y: [f64; 3]) -> Result<f64> {
    cfg.validate()?;
    let grid = *phi.grid();
    let shift = [y[0] / lambda, y[1] / lambda, y[2] / lambda];
    let shifted = crate::spectral::translate(phi, shift).to_physical().into_values();
    let plain = phi.to_physical().into_values();
    let spec_y = HamiltonianSpec::YukawaSchrodinger { v0, lambda, shift: y };
    let spec_0 = HamiltonianSpec::yukawa_scaled(v0, lambda);
    let (steps, h) = step_plan(cfg.horizon, cfg.dt)?;
    let w = trapezoid_weights(2 * steps + 1, h);
    let h3 = grid.cell_volume();
    let product = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| x.norm_sqr() * y.norm_sqr()).sum::<f64>() * h3
    };
    let mut total = w[steps] * product(&shifted, &plain);
    for dir in [1.0, -1.0] {
        let mut a = shifted.clone();
        let mut b = plain.clone();
        let mut sa = Stepper::new(&spec_y, grid, dir * h)?;
        let mut sb = Stepper::new(&spec_0, grid, dir * h)?;
        for k in 1..=steps {
            sa.step(&mut a);
            sb.step(&mut b);
            total += w[steps + k] * product(&a, &b);
        }
    }
    Ok(total)
}

/// Semi-relativistic scaled Born functional with `w(t) = U^lambda(t) phi`.
pub fn srh_scaled_born(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambda: f64) -> Result<f64> {
    if model.v1.q == 0.0 {
        return Ok(0.0);
    }
    let spec = DensitySpectrum::sweep(&HamiltonianSpec::SemirelScaled { lambda }, phi, cfg.horizon, cfg.dt, &[])?;
    Ok(scaled_pair(&spec, model.v1, lambda))
}

/// Non-relativistic defect `||U^lambda(t) phi - U^inf(t) phi||_{(4,4)}` over `[-T, T]`,
/// both flows evaluated exactly as multipliers at every sample time.
pub fn nrl_defect(phi: &ComplexField, lambda: f64, horizon: f64, dt: f64) -> Result<f64> {
    let grid = *phi.grid();
    let (steps, h) = step_plan(horizon, dt)?;
    let finite = HamiltonianSpec::SemirelScaled { lambda }.dispersion();
    let limit = HamiltonianSpec::SemirelScaled {
        lambda: f64::INFINITY,
    }
    .dispersion();
    let k2 = grid.frequency_squares();
    let (wl, wi): (Vec<f64>, Vec<f64>) = k2.iter().map(|&k| (finite(k), limit(k))).unzip();
    let spec = phi.to_frequency().into_values();
    let mut fft = Fft3::new(grid.n());
    let weights = trapezoid_weights(2 * steps + 1, h);
    let h3 = grid.cell_volume();
    let mut buf = vec![Complex64::default(); grid.len()];
    let mut total = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let t = (i as f64 - steps as f64) * h;
        for (((b, s), a), c) in buf.iter_mut().zip(&spec).zip(&wl).zip(&wi) {
            *b = s * (Complex64::cis(-t * a) - Complex64::cis(-t * c));
        }
        fft.inverse(&mut buf);
        let l4: f64 = buf.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum::<f64>() * h3;
        total += w * l4;
    }
    Ok(total.powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Profile, ProfileSpec};

    fn setup() -> (ScatterConfig, ComplexField) {
        let grid = Grid3::new(16, 24.0).unwrap();
        let cfg = ScatterConfig::new(grid, 4.0, 0.02).unwrap();
        let p = ProfileSpec::gaussian(1.0).normalized();
        (cfg, ComplexField::from_fn(grid, |x| p.value(x)))
    }

    #[test]
    fn linear_equation_scatters_trivially() {
        let (cfg, phi) = setup();
        let model = ModelParams::default_nls().linear();
        let r = s_full(&model, &cfg, &phi.scale_real(0.1)).unwrap();
        assert!(r.phi_plus.distance(&phi.scale_real(0.1)).unwrap() < 1e-10);
        let zero = ComplexField::zeros(cfg.grid);
        let r = s_full(&ModelParams::default_nls(), &cfg, &zero).unwrap();
        assert_eq!(r.phi_plus.norm(), 0.0);
    }

    #[test]
    fn smallness_is_enforced() {
        let (cfg, phi) = setup();
        assert!(matches!(
            s_full(&ModelParams::default_nls(), &cfg, &phi),
            Err(Error::Smallness { .. })
        ));
    }

    #[test]
    fn born_is_quartic() {
        let (cfg, phi) = setup();
        let m = ModelParams::default_nls();
        let k1 = born_functional(&m, &cfg, &phi).unwrap();
        let k2 = born_functional(&m, &cfg, &phi.scale_real(2.0)).unwrap();
        assert!((k2 / k1 - 16.0).abs() < 1e-10 * 16.0);
        assert_eq!(born_functional(&m.linear(), &cfg, &phi).unwrap(), 0.0);
    }

    #[test]
    fn picard_zeroth_iterate_is_linear() {
        let (cfg, phi) = setup();
        let m = ModelParams::default_nls();
        let data = phi.scale_real(0.1);
        let p = duhamel_picard(&m.linear(), &cfg, &data, 2).unwrap();
        assert!(p.iterates[2].distance(&p.iterates[0]).unwrap() < 1e-14);
    }

    #[test]
    fn symmetric_sweep_matches_two_sided() {
        let (cfg, phi) = setup();
        let spec = HamiltonianSpec::yukawa(ModelParams::default_nls().v0);
        let one = DensitySpectrum::sweep(&spec, &phi, cfg.horizon, cfg.dt, &[]).unwrap();
        // a global phase makes the data complex and forces the two-sided sweep
        let rotated = phi.scale(Complex64::from_polar(1.0, 0.3));
        let two = DensitySpectrum::sweep(&spec, &rotated, cfg.horizon, cfg.dt, &[]).unwrap();
        assert!((one.l44() - two.l44()).abs() < 1e-12 * one.l44());
    }
}
