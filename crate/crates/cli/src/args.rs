use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "magnomech",
    version,
    about = "Output-field squeezing of a two-tone driven cavity magnomechanical system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SidebandArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureArg {
    Fig2b,
    Fig2c,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig5c,
    #[value(name = "figA", alias = "figa")]
    FigA,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Parameter file (JSON). Defaults to the built-in baseline.
    #[arg(long, short)]
    pub config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GPlusChoice {
    /// Set G+ to this fraction of G− before computing.
    #[arg(long, conflicts_with = "optimize_g_plus")]
    pub g_plus_ratio: Option<f64>,

    /// Replace G+ by the value minimizing the rotating-wave spectrum at ω = 0.
    #[arg(long)]
    pub optimize_g_plus: bool,
}

#[derive(Debug, Args)]
pub struct Grid {
    /// Quadrature angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    pub phi: f64,

    #[arg(long, default_value_t = -5e6, allow_negative_numbers = true)]
    pub omega_min_hz: f64,

    #[arg(long, default_value_t = 5e6, allow_negative_numbers = true)]
    pub omega_max_hz: f64,

    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotating-wave output noise spectrum versus frequency.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        g_plus: GPlusChoice,
    },
    /// Output noise spectrum with counter-rotating terms (Floquet expansion).
    Floquet {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        g_plus: GPlusChoice,
        /// Truncation order.
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// Add the rotating-wave columns for comparison.
        #[arg(long)]
        compare_rwa: bool,
    },
    /// Stationary quadrature variances, optionally along one swept axis.
    Steadystate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        g_plus: GPlusChoice,
        /// Config-style key of the swept quantity, e.g. `g_plus_ratio` or `temperature_k`.
        #[arg(long, requires_all = ["lo", "hi"])]
        axis: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 101)]
        n: usize,
        /// Space the axis logarithmically.
        #[arg(long)]
        log: bool,
    },
    /// Optimal G+ for an objective.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// rwa-nsd, floquet-nsd[:l], mech-variance or cavity-variance.
        #[arg(long, default_value = "rwa-nsd")]
        objective: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        omega_hz: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
        phi: f64,
        /// Also report the loss for a relative error of this size in G+/G−.
        #[arg(long)]
        delta_ratio: Option<f64>,
    },
    /// Parameter sweep described by a config with an `axes` section.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Drive Rabi frequency producing a target effective coupling.
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g_target_hz: f64,
        /// Bare magnomechanical coupling G0/2π.
        #[arg(long)]
        g0_hz: f64,
        #[arg(long, value_enum)]
        sideband: SidebandArg,
    },
    /// Regenerate the tables behind one figure.
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
        /// Directory receiving one file per panel.
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}
