//! Command-line front end: argument parsing, configuration merging and exit
//! codes. The binary only forwards `std::env::args_os()` to [`run`].
//!
//! Exit codes: 0 success, 1 invalid input or violated hypothesis, 2 a
//! numerical tolerance was not met.

mod commands;
pub mod report;

use crate::error::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use report::RunConfig;
use serde::Deserialize;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "drwave", version, about = "Spherical analysis, wave kernels and Strichartz exponents on Damek–Ricci spaces")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. A JSON config file may set the same
/// keys; flags win.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// dim 𝔳 (even, ≥ 2)
    #[arg(long, global = true)]
    pub m: Option<i64>,
    /// dim 𝔷 (≥ 1)
    #[arg(long, global = true)]
    pub k: Option<i64>,
    /// Q̃ > Q (default Q + 1)
    #[arg(long, global = true)]
    pub qtilde: Option<f64>,
    /// Outer radius of the radial grid
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Radial Gauss panel width
    #[arg(long, global = true)]
    pub dr: Option<f64>,
    /// Spectral cutoff Λmax
    #[arg(long, global = true)]
    pub lmax: Option<f64>,
    /// Spectral Gauss panel width
    #[arg(long, global = true)]
    pub dlam: Option<f64>,
    /// Output directory for artifacts
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for ensemble runs
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with any of: m, k, qtilde, rmax, dr, lmax, dlam, out, seed
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    m: Option<i64>,
    k: Option<i64>,
    qtilde: Option<f64>,
    rmax: Option<f64>,
    dr: Option<f64>,
    lmax: Option<f64>,
    dlam: Option<f64>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Space parameters
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Spherical functions
    #[command(subcommand)]
    Spherical(SphericalCmd),
    /// Spherical Fourier transform checks
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Wave-propagator kernels
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Dispersive decay slopes
    #[command(subcommand)]
    Dispersive(DispersiveCmd),
    /// Regularity region of the semilinear problem
    #[command(subcommand)]
    Region(RegionCmd),
    /// Exponent quadruples
    #[command(subcommand)]
    Exponents(ExponentsCmd),
    /// Linear and semilinear wave solver
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Symbol-decay lemma checks
    #[command(subcommand)]
    Appendixa(AppendixCmd),
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    /// n, Q, Q̃, Plancherel constant and Γ_ℓ bound
    Info {
        /// Also calibrate c_S numerically (builds a transform)
        #[arg(long)]
        calibrate: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum SphericalCmd {
    /// φ_λ(r) on a λ × r grid
    Eval {
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Branch::Auto)]
        branch: Branch,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Auto,
    Ode,
    Series,
}

#[derive(Subcommand, Debug)]
pub enum TransformCmd {
    /// inverse∘forward error and Plancherel ratios on the test family
    Roundtrip {
        /// Roundtrip tolerance (relative L²)
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Also check H^{−1} = A^{−1}∘F^{−1} on r ∈ [0.5, 6]
        #[arg(long)]
        abel: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Low,
    High,
    Full,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeArg {
    All,
    LowSmallTime,
    LowInside,
    LowOutside,
    HighSmallTimeNear,
    HighSmallTimeFar,
    HighLargeTime,
}

#[derive(Subcommand, Debug)]
pub enum KernelCmd {
    /// Kernel values on a (t, r) grid
    Table {
        #[arg(long, value_enum, default_value_t = Part::Low)]
        part: Part,
        /// Re σ
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Im σ
        #[arg(long, default_value_t = 0.0)]
        sigma_im: f64,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        r_min: f64,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        nr: usize,
    },
    /// Envelope scans per regime; a diverging ratio is a tolerance failure
    Verify {
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = RegimeArg::All)]
        regime: RegimeArg,
        /// Replace each envelope by a deliberately too strong one
        #[arg(long)]
        control: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum DispersiveCmd {
    /// Small- and large-time slopes of the dispersive bound
    Fit {
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 1.25)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.5,32,64,128,256")]
        t: Vec<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum RegionCmd {
    /// CSV gamma,sigma_min,case of the regularity curve
    Curve {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExponentsCmd {
    /// Exponent quadruple and constraint report for (n, γ, σ)
    Find {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Gaussian,
    Sech,
    Bump,
    Zero,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinArg {
    /// |u|^{γ−1}u
    Odd,
    /// |u|^γ
    Abs,
}

#[derive(Subcommand, Debug)]
pub enum SolveCmd {
    /// Exact linear flow: trajectory, energy drift, optional Strichartz ensemble
    Linear {
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Time steps (default 10·T)
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long, value_enum, default_value_t = Profile::Gaussian)]
        f: Profile,
        #[arg(long, value_enum, default_value_t = Profile::Zero)]
        g: Profile,
        #[arg(long, default_value_t = 1.0)]
        amp: f64,
        /// Write every stride-th time node
        #[arg(long, default_value_t = 10)]
        stride: usize,
        /// Number of random Gaussians for a Strichartz-ratio ensemble
        #[arg(long, default_value_t = 0)]
        ensemble: usize,
        /// Monitoring pair (1/p, 1/q) and σ of the ensemble
        #[arg(long, default_value_t = 0.5)]
        inv_p: f64,
        #[arg(long, default_value_t = 0.375)]
        inv_q: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
    },
    /// Semilinear problem by Picard iteration
    Nlw {
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long, value_enum, default_value_t = Profile::Gaussian)]
        f: Profile,
        #[arg(long, value_enum, default_value_t = Profile::Zero)]
        g: Profile,
        #[arg(long, default_value_t = 1e-3)]
        amp: f64,
        #[arg(long, value_enum, default_value_t = NonlinArg::Odd)]
        nonlin: NonlinArg,
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value_t = 30)]
        picard_max: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum AppendixCmd {
    /// Decay slope, logarithmic growth and boundary-symbol scans
    Verify {
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        zeta: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        m_order: u32,
    },
}

/// Result of a command that ran to completion.
pub enum Outcome {
    Pass,
    /// A tolerance was not met; the message names what failed.
    Fail(String),
}

fn resolve(common: &Common, command: &str, options: serde_json::Value) -> Result<RunConfig> {
    let file: FileConfig = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("config {}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let options = match options {
        serde_json::Value::Object(m) => m.into_iter().collect(),
        _ => Default::default(),
    };
    Ok(RunConfig {
        command: command.to_string(),
        m: common.m.or(file.m).unwrap_or(2),
        k: common.k.or(file.k).unwrap_or(1),
        qtilde: common.qtilde.or(file.qtilde),
        rmax: common.rmax.or(file.rmax),
        dr: common.dr.or(file.dr),
        lmax: common.lmax.or(file.lmax),
        dlam: common.dlam.or(file.dlam),
        out: common.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        seed: common.seed.or(file.seed).unwrap_or(0),
        options,
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("tolerance failure: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
