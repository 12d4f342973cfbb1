//! Command-line front end: single-point experiment dispatch, TOML-driven
//! parameter sweeps with a deterministic parallel pool, and tabular output.

mod config;
mod experiments;
mod output;

use std::f64::consts::PI;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{config_hash, load_config, Kind, Params, SweepConfig};
use experiments::{run_point, RunOptions};
use output::{emit_to, sig12, write_sidecar, Cell, Format, Record};

const EXIT_CONFIG: u8 = 1;
const EXIT_ALL_FAILED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mwlink",
    version,
    about = "Two-node microwave-link protocols: transfer, scattering, gates",
    disable_help_subcommand = true
)]
struct Cli {
    /// Integrator relative tolerance (absolute = 1e-2 x this)
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Worker threads for sweeps (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Output format
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<String>,

    /// Skip the mode-comb dressing retune
    #[arg(long, global = true)]
    no_lamb_compensation: bool,

    /// Place resonators mid-gap between comb modes instead of on a mode
    #[arg(long, global = true)]
    off_resonant: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct PointArgs {
    /// Waveguide length, m
    #[arg(long, default_value_t = 30.0)]
    length: f64,
    /// Emitter linewidth kappa/2pi, MHz
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Receiver linewidth kappa_2/2pi, MHz (defaults to kappa or eta*kappa
    /// for the gate)
    #[arg(long)]
    kappa2: Option<f64>,
    /// Bandwidth reduction kappa/kt
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Resonator offset from the probe/carrier mode, MHz
    #[arg(long, default_value_t = 0.0)]
    detuning: f64,
    /// Dispersive shift chi/2pi, MHz (default kappa_2/2)
    #[arg(long)]
    chi: Option<f64>,
    /// Adiabatic plateau coupling g_0/2pi, MHz (default kappa/2)
    #[arg(long)]
    g0: Option<f64>,
    /// Protocol duration 2T, us (defaults to the schedule's own window)
    #[arg(long)]
    duration: Option<f64>,
    /// Qubit coherence time, us
    #[arg(long, default_value_t = 100.0)]
    t1: f64,
    /// Fixed fidelity of the node-2 <-> node-3 gate leg
    #[arg(long, default_value_t = 1.0)]
    f23: f64,
    /// Purcell ratio g_2/Delta (0 disables the decoherence fold)
    #[arg(long, default_value_t = 0.0)]
    g2_over_delta: f64,
    /// Purcell filter ratio g_p/Delta
    #[arg(long)]
    gp_over_delta: Option<f64>,
}

impl PointArgs {
    fn params(&self) -> Params {
        let mhz = 2.0 * PI * 1e6;
        Params {
            length: self.length,
            kappa: self.kappa * mhz,
            kappa_2: self.kappa2.map(|k| k * mhz),
            eta: self.eta,
            detuning: self.detuning * mhz,
            chi: self.chi.map(|c| c * mhz),
            g_0: self.g0.map(|g| g * mhz),
            duration: self.duration.map(|d| d * 1e-6),
            t_1: self.t1 * 1e-6,
            f_23: self.f23,
            g2_over_delta: self.g2_over_delta,
            gp_over_delta: self.gp_over_delta,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the mode comb around the carrier
    Modes {
        #[arg(long, default_value_t = 30.0)]
        length: f64,
        /// Modes on each side of the central one
        #[arg(long, default_value_t = 10)]
        half_count: usize,
    },
    /// Mode-comb dressing shift of a resonant node
    Lamb(PointArgs),
    /// Shaped-pulse qubit-to-qubit state transfer
    Transfer(PointArgs),
    /// Shaped pulse vs adiabatic dark-state transfer
    StirapCompare(PointArgs),
    /// Monochromatic scattering phase of the passive node
    PhaseProbe(PointArgs),
    /// Sech wavepacket scattering off the passive node
    Scatter(PointArgs),
    /// Controlled-phase gate via conditional scattering
    Cphase(PointArgs),
    /// Duration-optimized transfer leg of a remote gate
    GateTransfer(PointArgs),
    /// Principal dressed triplet of the coupled comb
    Dressed(PointArgs),
    /// Run a parameter sweep described by a TOML file
    Sweep {
        /// Path to the sweep configuration
        config: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let format = match Format::parse(&cli.format) {
        Some(f) => f,
        None => {
            eprintln!("config error: unknown format `{}` (csv|jsonl)", cli.format);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        eprintln!("config error: tolerance must be positive and finite");
        return ExitCode::from(EXIT_CONFIG);
    }
    let opts = RunOptions {
        tolerance: cli.tolerance,
        compensate_lamb: !cli.no_lamb_compensation,
        resonant: !cli.off_resonant,
    };

    let single = |kind: Kind, args: &PointArgs| -> ExitCode {
        let (rec, ok) = run_point(kind, &args.params(), &opts);
        if !ok {
            if let Some((_, Cell::S(msg))) = rec.iter().find(|(k, _)| *k == "error") {
                eprintln!("point failed: {msg}");
            }
            return ExitCode::from(EXIT_ALL_FAILED);
        }
        match emit_to(&[rec], format, cli.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("i/o error: {e}");
                ExitCode::from(EXIT_IO)
            }
        }
    };

    match &cli.command {
        Command::Modes { length, half_count } => run_modes(*length, *half_count, format, &cli),
        Command::Lamb(a) => single(Kind::Lamb, a),
        Command::Transfer(a) => single(Kind::Transfer, a),
        Command::StirapCompare(a) => single(Kind::StirapCompare, a),
        Command::PhaseProbe(a) => single(Kind::PhaseProbe, a),
        Command::Scatter(a) => single(Kind::Scatter, a),
        Command::Cphase(a) => single(Kind::CPhase, a),
        Command::GateTransfer(a) => single(Kind::GateTransfer, a),
        Command::Dressed(a) => single(Kind::Dressed, a),
        Command::Sweep { config } => run_sweep_cmd(config, format, &cli, &opts),
    }
}

fn run_modes(length: f64, half_count: usize, format: Format, cli: &Cli) -> ExitCode {
    use mwlink::waveguide::{dispersion_at, mode_frequency, WaveguideSpec};
    let spec = WaveguideSpec::standard(length);
    if let Err(e) = spec.validate() {
        eprintln!("config error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let mc = spec.central_mode_index();
    let lo = mc.saturating_sub(half_count).max(1);
    let hi = mc + half_count;
    let mut records: Vec<Record> = Vec::new();
    for m in lo..=hi {
        let w = mode_frequency(&spec, m);
        let d = match dispersion_at(&spec, w) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        };
        records.push(vec![
            ("index", Cell::I(m as u64)),
            ("frequency_ghz", Cell::F(w / (2.0 * PI * 1e9))),
            ("wavenumber_rad_m", Cell::F(d.k)),
            ("group_velocity_m_s", Cell::F(d.v_g)),
            ("curvature_m2_s", Cell::F(d.d)),
            ("central", Cell::B(m == mc)),
        ]);
    }
    match emit_to(&records, format, cli.out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn run_sweep_cmd(path: &str, cli_format: Format, cli: &Cli, opts: &RunOptions) -> ExitCode {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let format = match cfg.format.as_deref() {
        Some(s) => match Format::parse(s) {
            Some(f) => f,
            None => {
                eprintln!("config error: unknown format `{s}` (csv|jsonl)");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => cli_format,
    };
    let out = cfg.out.clone().or_else(|| cli.out.clone());
    let opts = RunOptions {
        tolerance: cfg.tolerance.unwrap_or(opts.tolerance),
        ..*opts
    };
    let workers = cfg.workers.unwrap_or(cli.workers);

    let started = std::time::Instant::now();
    let (records, any_ok) = match run_sweep(&cfg, &opts, workers) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if !any_ok {
        // still write the dataset so the error columns are inspectable
        let _ = emit_to(&records, format, out.as_deref());
        eprintln!("all {} sweep points failed", records.len());
        return ExitCode::from(EXIT_ALL_FAILED);
    }
    if let Err(e) = emit_to(&records, format, out.as_deref()) {
        eprintln!("i/o error: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if let Some(path) = out.as_deref() {
        let body = sidecar_body(&cfg, &opts, started.elapsed().as_secs_f64());
        if let Err(e) = write_sidecar(path, &body) {
            eprintln!("i/o error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    ExitCode::SUCCESS
}

/// Cartesian-product sweep. Results are ordered by point index regardless of
/// completion order, so the emitted bytes are independent of the worker
/// count.
fn run_sweep(
    cfg: &SweepConfig,
    opts: &RunOptions,
    workers: usize,
) -> Result<(Vec<Record>, bool), config::ConfigError> {
    let n = cfg.points();
    let hash = config_hash(cfg);
    let version = env!("CARGO_PKG_VERSION");
    let run = |i: usize| -> (Record, bool) {
        let p = cfg.point(i);
        let (mut rec, ok) = run_point(cfg.kind, &p, opts);
        rec.insert(0, ("point", Cell::I(i as u64)));
        rec.push(("kind", Cell::S(cfg.kind.name().into())));
        rec.push(("version", Cell::S(version.into())));
        rec.push(("config_hash", Cell::S(format!("{hash:016x}"))));
        (rec, ok)
    };
    let results: Vec<(Record, bool)> = if workers == 1 {
        (0..n).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| config::ConfigError(format!("thread pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(run).collect())
    };
    let any_ok = results.iter().any(|(_, ok)| *ok);
    Ok((results.into_iter().map(|(r, _)| r).collect(), any_ok))
}

fn sidecar_body(cfg: &SweepConfig, opts: &RunOptions, elapsed_s: f64) -> String {
    let mut s = String::new();
    s.push_str(&format!("kind = \"{}\"\n", cfg.kind.name()));
    s.push_str(&format!("version = \"{}\"\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("config_hash = \"{:016x}\"\n", config_hash(cfg)));
    s.push_str(&format!("points = {}\n", cfg.points()));
    s.push_str(&format!("tolerance = {}\n", sig12(opts.tolerance)));
    s.push_str(&format!("lamb_compensation = {}\n", opts.compensate_lamb));
    s.push_str(&format!("resonant = {}\n", opts.resonant));
    s.push_str(&format!("wall_clock_s = {}\n", sig12(elapsed_s)));
    s.push_str("\n[fixed]\n");
    for (k, v) in &cfg.fixed_raw {
        s.push_str(&format!("{k} = {} # rad/s or SI\n", sig12(*v)));
    }
    for axis in &cfg.axes {
        s.push_str("\n[[axis]]\n");
        s.push_str(&format!("name = \"{}\"\n", axis.name));
        let vals: Vec<String> = axis.values.iter().map(|v| sig12(*v)).collect();
        s.push_str(&format!("values = [{}] # resolved internal units\n", vals.join(", ")));
    }
    s
}
