use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reproducible FTN communication and sensing runs. Every run writes a CSV
/// and, with `--out`, a JSON manifest next to it.
///
/// Delays are given in units of T and frequencies or Doppler shifts in
/// units of 1/T.
#[derive(Debug, Parser)]
#[command(name = "ftn", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Shaping pulse family.
    #[arg(long, global = true, value_enum)]
    pub pulse: Option<PulseArg>,

    /// Roll-off factor.
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Nyquist period in seconds.
    #[arg(long = "T", global = true)]
    pub period: Option<f64>,

    /// Compression factor; repeat or comma-separate for several columns.
    #[arg(long, global = true, value_delimiter = ',')]
    pub xi: Vec<f64>,

    /// Symbol count at the Nyquist rate.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,

    /// SNR grid in dB, `a:b:step`, single values or a comma list; `-inf` is allowed.
    #[arg(long = "snr-db", global = true, allow_hyphen_values = true)]
    pub snr_db: Option<String>,

    /// Multipath channel `h1@tau1,h2@tau2,...` with gains like `0.5+0.1j`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub channel: Option<String>,

    /// qpsk, 8psk, 16qam, 64qam or gaussian.
    #[arg(long, global = true)]
    pub constellation: Option<String>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Sample grid `a:b:step` along the command's axis.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// CSV destination; the manifest goes to the same path with a `.json` extension.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// INI file merged under the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseArg {
    Rrc,
    Sinc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Delay,
    Doppler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    /// Accumulated ISI X(τ).
    X,
    /// Doppler-shifted accumulated ISI X'(ν).
    Xprime,
    /// Periodic Doppler variation Y(ν).
    Y,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pulse spectrum with folded and twisted folded spectra per ξ.
    Spectrum,
    /// Spectral efficiency and its bounds over SNR.
    Se(SeArgs),
    /// Normalized expected squared AF along a delay or Doppler slice.
    Af(AfArgs),
    /// X(τ), X'(ν) or Y(ν).
    Xfun(XfunArgs),
    /// Doppler estimation MSE of the weak target in a two-target scene.
    DopplerMse,
    /// Re-run the configuration stored in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SeArgs {
    /// Average over random channels instead of the fixed `--channel`.
    #[arg(long)]
    pub ergodic: bool,

    /// Paths per random channel.
    #[arg(long)]
    pub paths: Option<usize>,

    /// Largest random delay, in units of T.
    #[arg(long = "tau-max")]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AfArgs {
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
}

#[derive(Debug, Clone, Args)]
pub struct XfunArgs {
    #[arg(long, value_enum)]
    pub function: Option<FunctionArg>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
