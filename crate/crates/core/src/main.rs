use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hartree_core::harness::{run_experiment, Experiment, ExperimentConfig, RawConfig, KEYS};

#[derive(Parser, Debug)]
#[command(
    name = "hartree",
    version,
    about = "Yukawa-Hartree scattering simulator and parameter reconstruction",
    after_long_help = config_help()
)]
struct Cli {
    /// Config file (`key = value` lines, `[section]` headers).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Output directory for CSV and field files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel constants against quadrature.
    KernelCheck(Overrides),
    /// Fast internal consistency battery (exit 3 on failure).
    SelfTest(Overrides),
    /// Time evolution; CSV of norms or a binary field dump.
    Evolve(Overrides),
    /// Forward scattering pairing for each amplitude.
    Scatter(Overrides),
    /// Ratio Q/mu^2 from the large-scale limit.
    ReconRatio(Overrides),
    /// Coupling digits given the planted ratio.
    ReconDigits(Overrides),
    /// Ratio, coupling and screening for the semi-relativistic model.
    ReconSrh(Overrides),
    /// Non-relativistic limit defect over the scale sweep.
    Nrl(Overrides),
    /// Dispersive decay slopes of the linear flow.
    Decay(Overrides),
    /// Ratio, coupling and screening for the NLS model.
    ReconFull(Overrides),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Planted model: `q0,mu0,q,mu` (nls) or `q,mu` (srh).
    #[arg(long, value_name = "LIST")]
    model: Option<String>,
    /// nls | srh
    #[arg(long)]
    family: Option<String>,
    /// Amplitudes, comma separated.
    #[arg(long, value_name = "LIST")]
    eps: Option<String>,
    /// Frame scale for `scatter`.
    #[arg(long)]
    lambda: Option<f64>,
    /// Scales, comma separated.
    #[arg(long, value_name = "LIST")]
    lambdas: Option<String>,
    /// Psi sample points, comma separated.
    #[arg(long, value_name = "LIST")]
    alphas: Option<String>,
    /// Scattering horizon.
    #[arg(long = "T", value_name = "T")]
    horizon: Option<f64>,
    /// Binary digits.
    #[arg(long)]
    depth: Option<u32>,
    /// Integer scan cap.
    #[arg(long)]
    cap: Option<u32>,
    /// free | yukawa | semirel | nls | srh
    #[arg(long)]
    kind: Option<String>,
    /// Final time for `evolve`.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// `n,L`
    #[arg(long, value_name = "N,L")]
    grid: Option<String>,
    /// fields | norms
    #[arg(long)]
    dump: Option<String>,
    /// Test profile, e.g. `gaussian:width=2,cx=5,unit`.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

fn config_help() -> String {
    let mut s = String::from("Config keys:\n");
    for (k, v) in KEYS {
        s.push_str(&format!("  {k:<18} {v}\n"));
    }
    s.push_str("\nExit codes: 0 ok, 1 usage, 2 guard violation, 3 gate failure.");
    s
}

fn usage(msg: String) -> hartree_core::Error {
    hartree_core::Error::Config(msg)
}

impl Overrides {
    fn apply(&self, raw: &mut RawConfig) -> hartree_core::Result<()> {
        let mut set = |k: &str, v: String| {
            raw.entries.insert(k.to_string(), v);
        };
        if let Some(f) = &self.family {
            set("model.family", f.clone());
        }
        if let Some(m) = &self.model {
            let v: Vec<&str> = m.split(',').map(str::trim).collect();
            match v.len() {
                4 => {
                    set("model.q0", v[0].into());
                    set("model.mu0", v[1].into());
                    set("model.q", v[2].into());
                    set("model.mu", v[3].into());
                }
                2 => {
                    set("model.q", v[0].into());
                    set("model.mu", v[1].into());
                }
                _ => return Err(usage(format!("--model takes 2 or 4 values, got `{m}`"))),
            }
        }
        if let Some(g) = &self.grid {
            let (n, l) = g
                .split_once(',')
                .ok_or_else(|| usage(format!("--grid takes `n,L`, got `{g}`")))?;
            set("grid.n", n.trim().into());
            set("grid.length", l.trim().into());
        }
        let pairs: [(&str, Option<String>); 14] = [
            ("sweep.eps", self.eps.clone()),
            ("scatter.lambda", self.lambda.map(|v| v.to_string())),
            ("sweep.lambdas", self.lambdas.clone()),
            ("sweep.alphas", self.alphas.clone()),
            ("time.horizon", self.horizon.map(|v| v.to_string())),
            ("recon.depth", self.depth.map(|v| v.to_string())),
            ("recon.cap", self.cap.map(|v| v.to_string())),
            ("evolve.kind", self.kind.clone()),
            ("time.t", self.t.map(|v| v.to_string())),
            ("time.dt", self.dt.map(|v| v.to_string())),
            ("evolve.dump", self.dump.clone()),
            ("profile.spec", self.profile.clone()),
            ("output.seed", self.seed.map(|v| v.to_string())),
            // single-amplitude scatter shares the list
            ("scatter.epsilon", self.eps.as_ref().and_then(|e| e.split(',').next().map(|s| s.trim().to_string()))),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                set(k, v);
            }
        }
        Ok(())
    }
}

fn split(command: &Command) -> (Experiment, &Overrides) {
    match command {
        Command::KernelCheck(o) => (Experiment::KernelCheck, o),
        Command::SelfTest(o) => (Experiment::SelfTest, o),
        Command::Evolve(o) => (Experiment::Evolve, o),
        Command::Scatter(o) => (Experiment::Scatter, o),
        Command::ReconRatio(o) => (Experiment::ReconRatio, o),
        Command::ReconDigits(o) => (Experiment::ReconDigits, o),
        Command::ReconSrh(o) => (Experiment::ReconSrh, o),
        Command::Nrl(o) => (Experiment::Nrl, o),
        Command::Decay(o) => (Experiment::Decay, o),
        Command::ReconFull(o) => (Experiment::ReconFull, o),
    }
}

fn build(cli: &Cli) -> hartree_core::Result<ExperimentConfig> {
    let mut raw = match &cli.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    let (experiment, overrides) = split(&cli.command);
    // a config written for another experiment may still carry its id
    raw.entries.remove("experiment.id");
    if let Some(out) = &cli.out {
        raw.entries.insert("output.dir".into(), out.display().to_string());
    }
    if let Some(t) = cli.threads {
        raw.entries.insert("run.threads".into(), t.to_string());
    }
    if experiment == Experiment::ReconSrh && overrides.family.is_none() && !raw.entries.contains_key("model.family") {
        raw.entries.insert("model.family".into(), "srh".into());
    }
    overrides.apply(&mut raw)?;
    ExperimentConfig::from_raw(Some(experiment), &raw)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    match run_experiment(&cfg) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
