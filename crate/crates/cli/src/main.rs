//! `bhwave`: traveling waves, constants, spectra and simulations for the
//! periodic Burgers–Hilbert equation.

mod commands;
mod output;
mod params;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand as ClapSubcommand};

use bhwave::report::{parse_config, RunSpec, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bhwave", version, about = "Burgers-Hilbert traveling waves and their perturbations")]
struct Cli {
    /// Plain `key = value` file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Existing directory that receives every output file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Solve for one traveling wave.
    Wave(WaveArgs),
    /// Operator norms, the C_n table and x*.
    Constants(ConstantsArgs),
    /// Eigenvalues of the linearized operator.
    Spectrum(SpectrumArgs),
    /// Evolve a perturbed wave and track the frame decomposition.
    Simulate(SimulateArgs),
    /// Growth times over a list of amplitudes.
    Lifespan(LifespanArgs),
    /// Fit (eps, a) to a given field.
    Frame(FrameArgs),
}

#[derive(Args, Debug)]
struct WaveArgs {
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    /// newton | taylor
    #[arg(long)]
    method: Option<String>,
    /// Taylor order for the `taylor` method.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Also dump the exact Taylor table up to this order.
    #[arg(long = "table-order")]
    table_order: Option<String>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Run every check (the default).
    #[arg(long, action = ArgAction::SetTrue)]
    all: bool,
    /// all | norms | cn | xstar
    #[arg(long)]
    part: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Matrix truncation.
    #[arg(long)]
    modes: Option<String>,
    /// Wave truncation; defaults to modes / 4.
    #[arg(long = "wave-modes")]
    wave_modes: Option<String>,
    /// Match eigenvalues for 1 ≤ |n| ≤ window.
    #[arg(long)]
    window: Option<String>,
    /// Non-resonance scan over 1 ≤ |m|, |n|, |l| ≤ M.
    #[arg(long = "scan-M")]
    scan_m: Option<String>,
    /// Check that the kernel pair annihilates the zero modes.
    #[arg(long, action = ArgAction::SetTrue)]
    kernel: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    /// Time step, or `auto` for 0.9 of the CFL limit.
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<String>,
    /// lab | comoving
    #[arg(long)]
    frame: Option<String>,
    #[arg(long = "record-every")]
    record_every: Option<String>,
}

#[derive(Args, Debug)]
struct LifespanArgs {
    /// Comma-separated amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// linear (delta = c eps) | quadratic (delta = c eps^2)
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-max")]
    t_max: Option<String>,
    #[arg(long = "record-every")]
    record_every: Option<String>,
    #[arg(long)]
    frame: Option<String>,
    /// Continue past 2 delta until 8 delta.
    #[arg(long, action = ArgAction::SetTrue)]
    follow: bool,
}

#[derive(Args, Debug)]
struct FrameArgs {
    /// Field JSON to decompose; when absent a shifted, perturbed wave is used.
    #[arg(long, value_name = "FILE")]
    input: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    /// Amplitude of a cos 2x perturbation added to the synthetic field.
    #[arg(long, allow_hyphen_values = true)]
    pert: Option<String>,
    #[arg(long = "eps-guess", allow_hyphen_values = true)]
    eps_guess: Option<String>,
    #[arg(long = "a-guess", allow_hyphen_values = true)]
    a_guess: Option<String>,
    #[arg(long)]
    modes: Option<String>,
}

/// Exit status 1 for bad input, 2 for a numerical failure.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(bhwave::Error),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }
}

impl From<bhwave::Error> for Failure {
    fn from(e: bhwave::Error) -> Self {
        use bhwave::Error as E;
        match e {
            E::InvalidArgument { .. } | E::NotInX | E::NotRealPreserving(_) | E::Parse(_) | E::Json(_) | E::Io(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Numeric(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Numeric(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

/// Flags that were given on the command line, keyed by their long name.
fn given_flags(cmd: &clap::Command, m: &clap::ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if matches!(id, "config" | "out" | "seed" | "help" | "version") {
            continue;
        }
        if m.value_source(id) != Some(clap::parser::ValueSource::CommandLine) {
            continue;
        }
        let Some(long) = arg.get_long() else { continue };
        let val = match arg.get_action() {
            ArgAction::SetTrue => "true".to_string(),
            _ => m.get_one::<String>(id).cloned().unwrap_or_default(),
        };
        out.insert(long.to_string(), val);
    }
    out
}

fn run(argv: Vec<String>) -> Result<(), Failure> {
    let mut cmd = Cli::command();
    let matches = match cmd.try_get_matches_from_mut(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(Failure::usage(e.render().to_string().trim_end()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::usage(e.to_string()))?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let sub_cmd = cmd.find_subcommand(name).expect("known subcommand");
    let flags = given_flags(sub_cmd, sub);

    let mut file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| Failure::usage(format!("config {}: {e}", p.display())))?
        }
        None => BTreeMap::new(),
    };
    let out = match (cli.out, file.remove("out")) {
        (Some(p), _) => p,
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => return Err(Failure::usage("missing output directory (--out)")),
    };
    if !out.is_dir() {
        return Err(Failure::usage(format!("output directory {} does not exist", out.display())));
    }
    let seed = match (cli.seed, file.remove("seed")) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(|e| Failure::usage(format!("bad seed {s:?}: {e}")))?,
        (None, None) => 0,
    };
    let subcommand = match cli.command {
        Command::Wave(_) => Subcommand::Wave,
        Command::Constants(_) => Subcommand::Constants,
        Command::Spectrum(_) => Subcommand::Spectrum,
        Command::Simulate(_) => Subcommand::Simulate,
        Command::Lifespan(_) => Subcommand::Lifespan,
        Command::Frame(_) => Subcommand::Frame,
    };
    let params = params::Params::merge(commands::defaults(subcommand), &file, &flags)?;
    let spec = RunSpec {
        subcommand,
        parameters: params.map().clone(),
        output_dir: out.display().to_string(),
        seed,
    };
    let mut bundle = output::Bundle::new(out, spec);
    match commands::dispatch(subcommand, &params, seed, &mut bundle) {
        Ok(value) => bundle.finish(value).map_err(Failure::from),
        Err(f) => {
            if let Failure::Numeric(e) = &f {
                // best effort: the failure itself is what gets reported
                let _ = bundle.write_failure(e);
            }
            Err(f)
        }
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bhwave: {f}");
            ExitCode::from(f.code())
        }
    }
}
