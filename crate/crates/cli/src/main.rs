mod commands;
mod measures;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit status plus a one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// Invalid input: bad flags, malformed or inadmissible measure files.
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<carleson_core::Error> for Failure {
    fn from(e: carleson_core::Error) -> Self {
        Failure::input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "carleson-lab", version, about = "Weighted Bergman/Hardy norm experiments on the disk and half-plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Measure file (JSON) or built-in name: lebesgue-disk, lebesgue-halfplane,
    /// atom:r=0.5, power:p=1, truncated:p=-0.5,eps=0.01
    #[arg(long, global = true, default_value = "lebesgue-disk")]
    pub measure: String,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "n-max", global = true, default_value_t = 128)]
    pub n_max: usize,
    /// Number of boundary grid nodes M.
    #[arg(long, global = true, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub tol: f64,
    /// Corpus size.
    #[arg(long, global = true, default_value_t = 100)]
    pub count: usize,
    #[arg(long = "max-iters", global = true)]
    pub max_iters: Option<usize>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Two-column plot data file (fejer, wsigma, halfplane).
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Moments σ_n for n <= n-max.
    Moments,
    /// Box test for the radial measure.
    Carleson,
    /// Certified ‖u‖_{H_μ+L¹} for corpus elements or a coefficient file.
    Sumnorm {
        /// Coefficient file `{"n_max", "re", "im"}`; replaces the corpus.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// ‖u‖₂ / (‖𝒜u‖ + ‖ℋ𝒜u‖) over the corpus.
    Bbb,
    /// Adapted-pair ratio over the corpus, with b(n) = b-scale·sgn(n).
    Adapted {
        #[arg(long = "b-scale", default_value_t = 1.0)]
        b_scale: f64,
    },
    /// ‖f‖_{A²} / ‖f‖_{B²+h¹} over analytic projections of the corpus.
    Embedding,
    /// Fejér kernel rows at each N of n-list.
    Fejer {
        #[arg(long = "n-list", value_delimiter = ',', default_value = "2,8,32,128,512,1024")]
        n_list: Vec<usize>,
    },
    /// Samples of w_σ and the error of its Fourier identity.
    Wsigma,
    /// W^Π sup, C(b, Π), the stability bound and the truncated Fourier check.
    Halfplane {
        /// Truncation height R.
        #[arg(long, default_value_t = 10.0)]
        r: f64,
        /// Lower truncation ε of the W^Π check.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "c-b", default_value_t = 1.0)]
        c_b: f64,
    },
    /// Both sides of Garnett's criterion for a measure on the line.
    Garnett,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    validate(&cli.common)?;
    let out = commands::dispatch(&cli.command, &cli.common)?;
    let body = match cli.common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json).map_err(|e| Failure::io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => out.csv,
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::io(format!("writing {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::io(e.to_string()))?,
    }
    if let Some(path) = &cli.common.plot {
        let plot = out
            .plot
            .ok_or_else(|| Failure::input("this command has no plot output"))?;
        std::fs::write(path, plot).map_err(|e| Failure::io(format!("writing {}: {e}", path.display())))?;
    }
    if !out.converged {
        eprintln!("error: solver did not reach the requested tolerance within the iteration budget");
        return Ok(3);
    }
    Ok(0)
}

fn validate(c: &Common) -> Result<(), Failure> {
    if c.n_max == 0 {
        return Err(Failure::input("--n-max must be at least 1"));
    }
    if c.grid < 2 * c.n_max + 1 {
        return Err(Failure::input(format!(
            "--grid {} cannot represent degree {} (need at least {})",
            c.grid,
            c.n_max,
            2 * c.n_max + 1
        )));
    }
    if !(c.tol > 0.0 && c.tol < 1.0) {
        return Err(Failure::input(format!("--tol must lie in (0, 1), got {}", c.tol)));
    }
    if c.count == 0 {
        return Err(Failure::input("--count must be at least 1"));
    }
    if c.max_iters == Some(0) {
        return Err(Failure::input("--max-iters must be at least 1"));
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CARLESON_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("CARLESON_LAB_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::io(e.to_string()))
}
