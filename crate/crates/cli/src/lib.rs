#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] drkernel::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// A verification ran to completion and reported failure.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) | CliError::Csv(_) => "io",
            CliError::Failed(_) => "verification",
        }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        json!({ "schema_version": SCHEMA_VERSION, "error": self.kind(), "message": self.to_string() })
    }
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "drkernel",
    version,
    about = "Complex-time heat and Schrödinger kernels on Damek-Ricci spaces",
    after_help = "Settings come from defaults, then --config, then flags. The default thread \
                  budget is read from DRKERNEL_THREADS. Numeric failures exit 1 with a JSON \
                  diagnostic on stderr; usage errors exit 2."
)]
pub struct Cli {
    /// Sectioned TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Write the CSV or JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SpaceArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Named space: `hyperbolic`, `heisenberg:d`, `quaternionic:d` or `m,k`.
    #[arg(long, conflicts_with_all = ["m", "k"])]
    pub space: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kernel h_τ(r) at one point.
    #[command(after_help = "Columns: r, tau_re, tau_im, re, im, abs, method, quad_err, ln_abs")]
    Kernel {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        tau_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau_im: f64,
        #[arg(long)]
        r: f64,
    },
    /// Kernel on r_min..r_max (r_steps intervals) for each τ of a list.
    #[command(after_help = "The τ list holds one `re im` or `re,im` pair per line; `#` starts a comment.\n\
                            Columns: r, tau_re, tau_im, re, im, abs, method, quad_err, ln_abs")]
    KernelGrid {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        r_steps: Option<usize>,
        #[arg(long)]
        tau_list: Option<PathBuf>,
    },
    /// Spherical function φ_s on [0, r_max].
    #[command(after_help = "Columns: r, phi, dphi")]
    Phi {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        r_steps: Option<usize>,
    },
    /// Plancherel density |c(s)|^{-2} from the asymptotic fit.
    #[command(after_help = "Columns: s, density, residual, reliable, c_plus_re, c_plus_im")]
    Plancherel {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Pointwise kernel bounds; writes a JSON report, exits 1 if the bound fails.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Log-log fit of a kernel norm of s_t; writes the samples and prints the fit to stderr.
    #[command(after_help = "Columns: t, norm")]
    Decay {
        #[command(flatten)]
        space: SpaceArgs,
        /// Exponent; `inf` is accepted.
        #[arg(long)]
        q: f64,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
        #[arg(long, value_enum, default_value_t = NormArg::Lq)]
        norm: NormArg,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        per_decade: Option<usize>,
    },
    /// |σ_t(0, 0, a)| for a = e^{-ρ}; writes the samples and prints the fit to stderr.
    #[command(after_help = "Columns: a, ln_ln_inv_a, ln_abs_sigma")]
    WeightedGrowth {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 10.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 400.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 12)]
        count: usize,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Schrödinger evolution of radial data.
    #[command(after_help = "Columns: t, r, re, im. With --distinguished the evolution is under the \
                            distinguished Laplacian of δ^{1/2} f, sampled at (0, 0, e^{-r}), whose \
                            distance from the identity is r.")]
    Propagate {
        #[command(flatten)]
        space: SpaceArgs,
        /// `gaussian:σ` for exp(-r²/4σ), or `heat:τ` for the heat kernel h_τ.
        #[arg(long, default_value = "gaussian:1")]
        data: String,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_steps: Option<usize>,
        /// Largest radius written.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        distinguished: bool,
    },
    /// Mixed L^p_t L^q_x norm of e^{itΔ} f over a time window, as a JSON report.
    Strichartz {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// `a,b` with 0 <= a < b.
        #[arg(long, default_value = "0,4")]
        window: String,
        #[arg(long, default_value = "gaussian:1")]
        data: String,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Also evaluate pairs outside the admissible triangle.
        #[arg(long)]
        unchecked: bool,
    },
    /// Runs the acceptance suite; exits 1 on any failure.
    Acceptance {
        #[command(flatten)]
        space: SpaceArgs,
        /// All four reference spaces instead of the selected one.
        #[arg(long, conflicts_with_all = ["m", "k", "space"])]
        all: bool,
        /// One JSON array of outcomes instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Prints the effective configuration as TOML.
    Config,
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// sup |h_τ(r)| / envelope over a (|τ|, arg τ, r) grid and its refinement.
    Upper {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1e-2)]
        tau_min: f64,
        #[arg(long, default_value_t = 1e2)]
        tau_max: f64,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long, default_value_t = 30.0)]
        r_max: f64,
        /// Grid density; the refinement uses the next level.
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
    /// inf |s_t(r)| / envelope on r > 1 + c t.
    Lower {
        #[command(flatten)]
        space: SpaceArgs,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        t: Vec<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 30.0)]
        r_max: f64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Other values of c to report.
        #[arg(long, value_delimiter = ',')]
        c_scan: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RegimeArg {
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    Lq,
    Weak,
    Aq,
}

/// Where artifacts go, plus the stderr channel for summaries.
pub struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn open(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { out })
    }

    pub fn csv(&mut self) -> csv::Writer<&mut dyn Write> {
        csv::Writer::from_writer(self.out.as_mut())
    }

    pub fn json(&mut self, value: &impl serde::Serialize) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut self.out, value).map_err(io::Error::from)?;
        writeln!(self.out)?;
        Ok(())
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.out, "{text}")?;
        self.out.flush()?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

/// Full double precision: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.run.threads = Some(t);
    }
    cfg.run.sequential |= cli.sequential;
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.clone());
    }
    commands::apply_flags(&mut cfg, &cli.command);
    cfg.validate()?;
    if let Some(threads) = cfg.threads() {
        drkernel::exec::set_thread_budget(threads);
    }
    let mut sink = Sink::open(cfg.output.path.as_ref())?;
    let result = commands::dispatch(&cfg, &cli.command, &mut sink);
    sink.finish()?;
    result
}
