//! Inverse pipeline: the linear scattering operator from the small-amplitude
//! limit, the ratio `Q/mu^2` from the large-dilation limit, the coupling by
//! binary digit extraction against a monotone functional, and `mu` from both.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harness::{extrapolate, romberg_weights, ExtrapolationModel, ExtrapolationResult};
use crate::model::{Family, ModelParams};
use crate::propagate::HamiltonianSpec;
use crate::scattering::{
    born_functional, pairing, s_free_frame, scaled_born, srh_scaled_born, wave_operator,
    DensitySpectrum, ScatterConfig, WaveSign,
};
use crate::spectral::ComplexField;

/// Default integer scan cap for `m0`.
pub const DEFAULT_CAP: u32 = 64;
/// Default number of binary digits.
pub const DEFAULT_DEPTH: u32 = 8;
/// Smallest admissible `||e^{itDelta} phi||^4_{(4,4)}`.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// `eps -> 0` of a cubic functional
    EpsilonCubed,
    /// `lambda -> inf` of the scaled ratio
    LambdaRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extrapolation {
    LastValue,
    Richardson,
}

/// A sampled limit together with how to take it.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProtocol {
    pub values: Vec<(f64, f64)>,
    pub mode: LimitMode,
    pub extrapolation: Extrapolation,
}

impl LimitProtocol {
    pub fn new(values: Vec<(f64, f64)>, mode: LimitMode, extrapolation: Extrapolation) -> Result<Self> {
        let p = Self {
            values,
            mode,
            extrapolation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("empty limit protocol".into()));
        }
        let up = self.values.windows(2).all(|w| w[1].0 > w[0].0);
        let down = self.values.windows(2).all(|w| w[1].0 < w[0].0);
        if !(up || down) {
            return Err(Error::InvalidArgument("limit parameters must be strictly monotone".into()));
        }
        if self.extrapolation == Extrapolation::Richardson && self.values.len() < 3 {
            return Err(Error::InvalidArgument("Richardson extrapolation needs >= 3 points".into()));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ExtrapolationResult> {
        self.validate()?;
        match self.extrapolation {
            Extrapolation::LastValue => {
                let last = self.limit_side().1;
                let width = if self.values.len() > 1 {
                    let n = self.values.len();
                    let ordered = self.ordered();
                    (ordered[n - 1].1 - ordered[n - 2].1).abs()
                } else {
                    0.0
                };
                Ok(ExtrapolationResult {
                    estimate: last,
                    order: None,
                    residuals: self.values.iter().map(|v| v.1 - last).collect(),
                    confidence_width: width,
                    non_monotone: false,
                })
            }
            Extrapolation::Richardson => {
                let model = match self.mode {
                    LimitMode::EpsilonCubed => ExtrapolationModel::PowerInParamSquared,
                    LimitMode::LambdaRatio => ExtrapolationModel::PowerInInverseParam,
                };
                extrapolate(&self.values, model)
            }
        }
    }

    fn ordered(&self) -> Vec<(f64, f64)> {
        let mut v = self.values.clone();
        match self.mode {
            LimitMode::EpsilonCubed => v.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs())),
            LimitMode::LambdaRatio => v.sort_by(|a, b| a.0.total_cmp(&b.0)),
        }
        v
    }

    fn limit_side(&self) -> (f64, f64) {
        *self.ordered().last().unwrap()
    }
}

/// `eps^{-1} S1(eps phi)` extrapolated fieldwise to `eps = 0` (Romberg in `eps^2`).
pub fn sv0_extract(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, eps: &[f64]) -> Result<ComplexField> {
    if eps.is_empty() || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon list must be strictly decreasing".into()));
    }
    let mut samples = Vec::with_capacity(eps.len());
    for &e in eps {
        let r = s_free_frame(model, cfg, &phi.scale_real(e), false)?;
        samples.push(r.s1.scale_real(1.0 / e));
    }
    if samples.len() >= 3 {
        let d: Vec<f64> = samples
            .windows(2)
            .map(|w| w[1].distance(&w[0]))
            .collect::<Result<_>>()?;
        if d.windows(2).any(|p| p[1] >= p[0] && p[0] > 1e-13) {
            return Err(Error::NonConvergentLimit(format!(
                "successive differences {d:?} do not decrease"
            )));
        }
    }
    if samples.len() == 1 {
        return Ok(samples.pop().unwrap());
    }
    let w = romberg_weights(eps)?;
    let mut out = ComplexField::zeros(*phi.grid());
    for (s, w) in samples.iter().zip(w) {
        out = out.add(&s.scale_real(w))?;
    }
    Ok(out)
}

/// `Omega_+^* Omega_- phi`, the linear scattering operator.
pub fn linear_scattering(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField) -> Result<ComplexField> {
    let w = wave_operator(WaveSign::Minus, false, model.v0, cfg, phi)?;
    wave_operator(WaveSign::Plus, true, model.v0, cfg, &w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    /// Scaled Born functional (one linear solve per scale).
    Production,
    /// Literal pairing `i lambda^4 <(S - id)(lambda^{-3} phi_lambda), phi_lambda>`.
    Validation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioPoint {
    pub lambda: f64,
    pub numerator: f64,
    pub ratio: f64,
    pub horizon_sensitivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub extrapolation: ExtrapolationResult,
    pub points: Vec<RatioPoint>,
    /// `||e^{itDelta} phi||^4_{(4,4)}` (NLS) or `||e^{i(t/2)Delta} phi||^4_{(4,4)}` (SRH).
    pub denominator: f64,
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| w[1] <= w[0]) || lambdas[0] < 1.0 {
        return Err(Error::InvalidArgument(
            "scale list must be increasing and start at >= 1".into(),
        ));
    }
    Ok(())
}

fn resolve_ratio(points: &[RatioPoint]) -> Result<ExtrapolationResult> {
    let values: Vec<(f64, f64)> = points.iter().map(|p| (p.lambda, p.ratio)).collect();
    let mode = if values.len() >= 3 {
        Extrapolation::Richardson
    } else {
        Extrapolation::LastValue
    };
    LimitProtocol::new(values, LimitMode::LambdaRatio, mode)?.resolve()
}

/// Estimate of `Q1/mu1^2` from the large-scale limit of the Born numerator
/// over `4 pi ||e^{itDelta} phi||^4_{(4,4)}`.
pub fn recon_ratio(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambdas: &[f64], mode: RatioMode) -> Result<RatioEstimate> {
    if model.family != Family::Nls {
        return Err(Error::InvalidArgument("recon_ratio needs an nls model".into()));
    }
    check_lambdas(lambdas)?;
    let base = cfg.with_lambda(1.0);
    let free = DensitySpectrum::sweep(&HamiltonianSpec::FreeSchrodinger, phi, cfg.horizon, cfg.dt, &[])?;
    let denominator = free.l44();
    if denominator < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator(denominator));
    }
    let four_pi_d = 4.0 * std::f64::consts::PI * denominator;
    let mut points = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let (numerator, hs) = match mode {
            RatioMode::Production => (scaled_born(model, &base, phi, l)?, None),
            RatioMode::Validation => {
                let frame = base.with_lambda(l).with_epsilon(l.powi(-3));
                let (p, r) = pairing(model, &frame, phi)?;
                ((Complex64::i() * p).re * l.powi(4), Some(r.horizon_sensitivity))
            }
        };
        points.push(RatioPoint {
            lambda: l,
            numerator,
            ratio: numerator / four_pi_d,
            horizon_sensitivity: hs,
        });
    }
    let extrapolation = resolve_ratio(&points)?;
    Ok(RatioEstimate {
        ratio: extrapolation.estimate,
        extrapolation,
        points,
        denominator,
    })
}

/// SRH analogue of [`recon_ratio`] with `w = U^lambda(t) phi` and the
/// half-Laplacian free flow in the denominator.
pub fn recon_ratio_srh(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambdas: &[f64]) -> Result<RatioEstimate> {
    if model.family != Family::Srh {
        return Err(Error::InvalidArgument("recon_ratio_srh needs an srh model".into()));
    }
    check_lambdas(lambdas)?;
    let limit = HamiltonianSpec::SemirelScaled {
        lambda: f64::INFINITY,
    };
    let denominator = DensitySpectrum::sweep(&limit, phi, cfg.horizon, cfg.dt, &[])?.l44();
    if denominator < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator(denominator));
    }
    let four_pi_d = 4.0 * std::f64::consts::PI * denominator;
    let mut points = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let numerator = srh_scaled_born(model, cfg, phi, l)?;
        points.push(RatioPoint {
            lambda: l,
            numerator,
            ratio: numerator / four_pi_d,
            horizon_sensitivity: None,
        });
    }
    let extrapolation = resolve_ratio(&points)?;
    Ok(RatioEstimate {
        ratio: extrapolation.estimate,
        extrapolation,
        points,
        denominator,
    })
}

/// `Psi(alpha) = int <(alpha e^{-sqrt|alpha| r}/r) * |w|^2, |w|^2> dt` on a
/// cached density spectrum of the flow `w`.
#[derive(Debug, Clone)]
pub struct PsiFunctional {
    pub spectrum: DensitySpectrum,
    /// Generator of the flow the spectrum was built on.
    pub flow: HamiltonianSpec,
    phi: ComplexField,
    dt: f64,
    evaluations: std::cell::Cell<usize>,
}

impl PsiFunctional {
    /// `Psi_1` on `e^{-itH(b)}`.
    pub fn nls(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, b: f64) -> Result<Self> {
        Self::build(HamiltonianSpec::yukawa_scaled(model.v0, b), cfg, phi)
    }

    /// `Psi_2` on `e^{-it sqrt(d^2 - Delta)}`.
    pub fn srh(cfg: &ScatterConfig, phi: &ComplexField, d: f64) -> Result<Self> {
        Self::build(HamiltonianSpec::Semirel { mass: d }, cfg, phi)
    }

    pub fn build(flow: HamiltonianSpec, cfg: &ScatterConfig, phi: &ComplexField) -> Result<Self> {
        let spectrum = DensitySpectrum::sweep(&flow, phi, cfg.horizon, cfg.dt, &[])?;
        Ok(Self {
            spectrum,
            flow,
            phi: phi.clone(),
            dt: cfg.dt,
            evaluations: std::cell::Cell::new(0),
        })
    }

    /// Frequency form; odd in `alpha` by construction.
    pub fn eval(&self, alpha: f64) -> f64 {
        self.evaluations.set(self.evaluations.get() + 1);
        self.spectrum.psi(alpha)
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    /// Physical-space pairings at `alphas`, recomputed by a fresh sweep.
    pub fn physical(&self, alphas: &[f64]) -> Result<Vec<f64>> {
        let s = DensitySpectrum::sweep(&self.flow, &self.phi, self.spectrum.horizon, self.dt, alphas)?;
        Ok(s.physical.iter().map(|p| p.1).collect())
    }

    /// Largest relative gap between the physical and frequency forms.
    pub fn form_agreement(&self, alphas: &[f64]) -> Result<f64> {
        let phys = self.physical(alphas)?;
        Ok(alphas
            .iter()
            .zip(phys)
            .filter(|(a, _)| **a != 0.0)
            .map(|(&a, p)| {
                let f = self.spectrum.psi(a);
                (p - f).abs() / f.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max))
    }
}

/// State of the binary inversion of a monotone functional.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitState {
    pub target: f64,
    pub m0: u32,
    pub digits: Vec<u8>,
    pub depth: u32,
    pub psi_evaluations: Vec<(f64, f64)>,
    /// Digits from this index on were decided below the noise floor.
    pub trusted_depth: u32,
}

impl DigitState {
    /// `m0 + sum_j q_j 2^{-j}`.
    pub fn value(&self) -> f64 {
        self.partial(self.digits.len())
    }

    fn partial(&self, upto: usize) -> f64 {
        self.m0 as f64
            + self.digits[..upto]
                .iter()
                .enumerate()
                .map(|(j, &q)| q as f64 * 0.5f64.powi(j as i32 + 1))
                .sum::<f64>()
    }

    pub fn digit_string(&self) -> String {
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DigitOptions {
    pub depth: u32,
    pub cap: u32,
    /// Measurement uncertainty of the target; digits whose decision changes
    /// `Psi` by less than this are marked untrusted.
    pub noise: f64,
}

impl Default for DigitOptions {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            cap: DEFAULT_CAP,
            noise: 0.0,
        }
    }
}

/// Invert a monotone odd `psi` at `target >= 0`: integer scan for
/// `m0 = max{m >= 0 : psi(m) <= target}`, then `depth` binary digits.
pub fn digit_extract(mut psi: impl FnMut(f64) -> Result<f64>, target: f64, opts: DigitOptions) -> Result<DigitState> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::InvalidArgument(format!("target must be finite and >= 0, got {target}")));
    }
    let mut log = Vec::new();
    let mut eval = |a: f64, log: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = psi(a)?;
        log.push((a, v));
        Ok(v)
    };
    // sample check: odd and increasing near the origin
    let probe = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let vals: Vec<f64> = probe.iter().map(|&a| eval(a, &mut log)).collect::<Result<_>>()?;
    if vals.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotone(format!("psi samples {vals:?} are not increasing")));
    }
    let odd_gap = (vals[0] + vals[4]).abs().max((vals[1] + vals[3]).abs());
    if odd_gap > 1e-9 * vals[4].abs() || vals[2] != 0.0 {
        return Err(Error::NonMonotone(format!("psi is not odd (gap {odd_gap:.3e})")));
    }

    let mut m0 = 0u32;
    let mut prev = 0.0;
    loop {
        if m0 == opts.cap {
            let psi_cap = prev;
            if psi_cap < target {
                return Err(Error::CapExceeded {
                    target,
                    cap: opts.cap,
                    psi_cap,
                });
            }
            break;
        }
        let next = eval((m0 + 1) as f64, &mut log)?;
        if next <= prev {
            return Err(Error::NonMonotone(format!("psi({}) <= psi({m0})", m0 + 1)));
        }
        if next > target {
            break;
        }
        m0 += 1;
        prev = next;
    }
    let mut digits = Vec::with_capacity(opts.depth as usize);
    let mut partial = m0 as f64;
    let mut psi_partial = prev;
    let mut trusted_depth = opts.depth;
    for j in 1..=opts.depth {
        let step = 0.5f64.powi(j as i32);
        let cand = partial + step;
        let v = eval(cand, &mut log)?;
        if v < psi_partial {
            return Err(Error::NonMonotone(format!("psi({cand}) < psi({partial})")));
        }
        if trusted_depth == opts.depth && (v - psi_partial).abs() < opts.noise {
            trusted_depth = j - 1;
        }
        if v <= target {
            digits.push(1);
            partial = cand;
            psi_partial = v;
        } else {
            digits.push(0);
        }
    }
    Ok(DigitState {
        target,
        m0,
        digits,
        depth: opts.depth,
        psi_evaluations: log,
        trusted_depth,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsPoint {
    pub epsilon: f64,
    pub value: f64,
    pub imag: f64,
    pub horizon_sensitivity: f64,
    pub defect: f64,
}

/// Full reconstruction report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconReport {
    pub ratio: f64,
    pub ratio_width: f64,
    pub coupling: f64,
    /// Resolution of the digits plus the propagated measurement width.
    pub coupling_width: f64,
    /// `None` when undetermined (zero coupling or ratio).
    pub screening: Option<f64>,
    pub digits: Option<DigitState>,
    /// `b` (NLS) or `d` (SRH).
    pub frame: f64,
    /// Small-amplitude value of `a` (or `h`).
    pub measured: Option<ExtrapolationResult>,
    /// Same quantity through the Born identity.
    pub born: f64,
    pub eps_points: Vec<EpsPoint>,
    pub ratio_points: Vec<RatioPoint>,
    pub denominator: f64,
}

impl ReconReport {
    fn trivial(ratio: &RatioEstimate) -> Self {
        Self {
            ratio: 0.0,
            ratio_width: ratio.extrapolation.confidence_width,
            coupling: 0.0,
            coupling_width: 0.0,
            screening: None,
            digits: None,
            frame: 0.0,
            measured: None,
            born: 0.0,
            eps_points: Vec::new(),
            ratio_points: ratio.points.clone(),
            denominator: ratio.denominator,
        }
    }

    /// `a` as used for the digits: the measured limit when available.
    pub fn target(&self) -> f64 {
        self.measured.as_ref().map_or(self.born, |m| m.estimate)
    }

    /// Relative gap between the measured and Born values.
    pub fn path_agreement(&self) -> Option<f64> {
        self.measured
            .as_ref()
            .map(|m| (m.estimate - self.born).abs() / self.born.abs().max(f64::MIN_POSITIVE))
    }

    pub fn result_line(&self) -> String {
        let mu = self.screening.map_or("undetermined".to_string(), |m| format!("{m:.6}"));
        format!("RESULT Q={:.6} MU={} RATIO={:.6}", self.coupling, mu, self.ratio)
    }
}

/// Ratios this small are treated as zero coupling.
pub const RATIO_FLOOR: f64 = 1e-6;

/// Coupling and screening from a known ratio.
///
/// `frame_weight` is the exponent of `b` in `a = i eps^{-3} b^{-w} <(S - id)(eps phi_b), phi_b>`:
/// 7 for NLS, 6 for SRH.
fn recon_coupling(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, ratio: &RatioEstimate, eps: &[f64], opts: DigitOptions) -> Result<ReconReport> {
    if ratio.ratio.abs() < RATIO_FLOOR {
        return Ok(ReconReport::trivial(ratio));
    }
    let b = ratio.ratio.abs().sqrt();
    let (weight, psi) = match model.family {
        Family::Nls => (7, PsiFunctional::nls(model, cfg, phi, b)?),
        Family::Srh => (6, PsiFunctional::srh(cfg, phi, b)?),
    };
    let frame = cfg.with_lambda(b);
    let bw = b.powi(weight);
    // Born path on the already-swept flow
    let born = frame.jacobian() * psi.spectrum.yukawa_pairing(frame.frame_model(model).v1) / bw;

    let mut eps_points = Vec::new();
    for &e in eps {
        let (p, r) = pairing(model, &frame.with_epsilon(e), phi)?;
        let v = Complex64::i() * p / (e.powi(3) * bw);
        eps_points.push(EpsPoint {
            epsilon: e,
            value: v.re,
            imag: v.im,
            horizon_sensitivity: r.horizon_sensitivity,
            defect: r.defect,
        });
    }
    let measured = if eps_points.is_empty() {
        None
    } else {
        let values = eps_points.iter().map(|p| (p.epsilon, p.value)).collect();
        let mode = if eps_points.len() >= 3 {
            Extrapolation::Richardson
        } else {
            Extrapolation::LastValue
        };
        Some(LimitProtocol::new(values, LimitMode::EpsilonCubed, mode)?.resolve()?)
    };

    let mut report = ReconReport {
        ratio: ratio.ratio,
        ratio_width: ratio.extrapolation.confidence_width,
        coupling: 0.0,
        coupling_width: 0.0,
        screening: None,
        digits: None,
        frame: b,
        measured,
        born,
        eps_points,
        ratio_points: ratio.points.clone(),
        denominator: ratio.denominator,
    };
    let target = report.target();
    let noise = report.measured.as_ref().map_or(0.0, |m| m.confidence_width);
    let opts = DigitOptions {
        noise: opts.noise.max(noise),
        ..opts
    };
    let digits = digit_extract(|a| Ok(psi.eval(a)), target.abs(), opts)?;
    let value = digits.value();
    // propagate the measurement width through the local slope of psi
    let slope = (psi.eval(value + 0.5f64.powi(opts.depth as i32)) - psi.eval(value))
        / 0.5f64.powi(opts.depth as i32);
    let propagated = if slope > 0.0 { opts.noise / slope } else { f64::INFINITY };
    let sign = ratio.ratio.signum();
    report.coupling = sign * value;
    report.coupling_width = 0.5f64.powi(opts.depth as i32) + propagated;
    report.screening = if value > 0.0 {
        Some((value / ratio.ratio.abs()).sqrt())
    } else {
        None
    };
    report.digits = Some(digits);
    Ok(report)
}

/// Coupling `Q1` (and `mu1`) for NLS given the ratio estimate.
pub fn recon_q1(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, ratio: &RatioEstimate, eps: &[f64], opts: DigitOptions) -> Result<ReconReport> {
    if model.family != Family::Nls {
        return Err(Error::InvalidArgument("recon_q1 needs an nls model".into()));
    }
    recon_coupling(model, cfg, phi, ratio, eps, opts)
}

/// Ratio, coupling and screening for the semi-relativistic equation.
pub fn recon_srh(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambdas: &[f64], eps: &[f64], opts: DigitOptions) -> Result<ReconReport> {
    let ratio = recon_ratio_srh(model, cfg, phi, lambdas)?;
    recon_coupling(model, cfg, phi, &ratio, eps, opts)
}

/// Ratio then coupling for NLS.
pub fn recon_full(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, lambdas: &[f64], eps: &[f64], opts: DigitOptions) -> Result<ReconReport> {
    let ratio = recon_ratio(model, cfg, phi, lambdas, RatioMode::Production)?;
    recon_q1(model, cfg, phi, &ratio, eps, opts)
}

/// `b^{-7} K[phi_b]` on a fresh sweep (cross-check of the cached path).
pub fn born_target(model: &ModelParams, cfg: &ScatterConfig, phi: &ComplexField, b: f64) -> Result<f64> {
    let weight = match model.family {
        Family::Nls => 7,
        Family::Srh => 6,
    };
    Ok(born_functional(model, &cfg.with_lambda(b), phi)? / b.powi(weight))
}
