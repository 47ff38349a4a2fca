use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use twistosc::{CoherentAmplitudes, Complex64, Fault, OscillatorParams, RadialGrid, TwistFunction};
use twistosc_cli::{
    cmd_coherent, cmd_radial, cmd_spectrum, cmd_sweep, cmd_verify, parse_times, radial_profile,
    write_output, OutputFormat, Report, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "twistosc",
    version,
    about = "Twist-deformed 2D quantum oscillator: spectra, sweeps, coherent states, radial solves"
)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    #[arg(long, global = true, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,
    /// Twist function, e.g. `family=sin,kappa=2.0,tau=1.0`.
    #[arg(long, global = true, default_value = "family=constant,kappa=0")]
    twist: String,
    /// Comma list `0,0.5,1` or inclusive `start:stop:steps`.
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    times: String,
    /// Fock basis cutoff (occupations 0..=cutoff per mode).
    #[arg(long, global = true, default_value_t = 12)]
    cutoff: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels with (n, l) and (n+, n-) labels.
    Spectrum {
        #[arg(long, default_value_t = 4)]
        n_max: u32,
    },
    /// Effective mass and frequencies along the time points.
    Sweep,
    /// Moments of the coherent state |c+, c->.
    Coherent {
        /// `re,im`
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        c_plus: String,
        /// `re,im`
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        c_minus: String,
    },
    /// Finite-difference radial eigenvalues for one azimuthal number.
    Radial {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 12.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 2400)]
        points: usize,
        /// Also write (rho, R) of the lowest level to this CSV file.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Full invariant suite; exits nonzero on any failure.
    Verify {
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipSplit,
}

fn parse_complex(name: &str, s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im] = parts[..] else {
        bail!("--{name} expects `re,im`, got {s:?}");
    };
    let re: f64 = re
        .parse()
        .with_context(|| format!("--{name}: bad real part {re:?}"))?;
    let im: f64 = im
        .parse()
        .with_context(|| format!("--{name}: bad imaginary part {im:?}"))?;
    Ok(Complex64::new(re, im))
}

fn config(shared: Shared) -> Result<RunConfig> {
    let params = OscillatorParams::new(shared.mass, shared.omega, shared.hbar)?;
    let twist: TwistFunction = shared.twist.parse().context("--twist")?;
    let times = parse_times(&shared.times).context("--times")?;
    RunConfig::new(
        params,
        twist,
        times,
        shared.cutoff,
        shared.format,
        shared.out,
    )
}

fn run(cli: Cli) -> Result<Report> {
    let cfg = config(cli.shared)?;
    let report = match cli.command {
        Command::Spectrum { n_max } => cmd_spectrum(&cfg, n_max)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Coherent { c_plus, c_minus } => {
            let c = CoherentAmplitudes::new(
                parse_complex("c-plus", &c_plus)?,
                parse_complex("c-minus", &c_minus)?,
            )?;
            cmd_coherent(&cfg, c)?
        }
        Command::Radial {
            l,
            count,
            rho_max,
            points,
            profile_out,
        } => {
            let grid = RadialGrid::new(rho_max, points)?;
            let report = cmd_radial(&cfg, l, count, grid)?;
            if let Some(path) = profile_out {
                let table = radial_profile(l.unsigned_abs(), l, grid)?;
                write_output(Some(&path), &table.to_csv())?;
            }
            report
        }
        Command::Verify { inject_fault } => {
            let fault = inject_fault.map(|FaultArg::FlipSplit| Fault::FlipSplitSign);
            let report = cmd_verify(&cfg, fault)?;
            eprint!("{}", report.summary());
            report
        }
    };
    write_output(cfg.out.as_deref(), &report.render(&cfg))?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => match report.failures().next() {
            None => ExitCode::SUCCESS,
            Some(c) => {
                eprintln!(
                    "check failed: [{}] {}: observed {:e} > tolerance {:e}",
                    c.module, c.invariant, c.observed, c.tolerance
                );
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
