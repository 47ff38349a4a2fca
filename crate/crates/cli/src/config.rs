use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use serde_json::{json, Value};
use twistosc::{OscillatorParams, TwistFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Everything shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: OscillatorParams,
    pub twist: TwistFunction,
    pub times: Vec<f64>,
    pub cutoff: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

pub const MIN_CUTOFF: usize = 4;

impl RunConfig {
    pub fn new(
        params: OscillatorParams,
        twist: TwistFunction,
        times: Vec<f64>,
        cutoff: usize,
        format: OutputFormat,
        out: Option<PathBuf>,
    ) -> Result<Self> {
        let cfg = RunConfig {
            params,
            twist,
            times,
            cutoff,
            format,
            out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.times.is_empty(), "time list is empty");
        if let Some(t) = self.times.iter().find(|t| !t.is_finite()) {
            bail!("time point {t} is not finite");
        }
        ensure!(
            self.cutoff >= MIN_CUTOFF,
            "cutoff must be at least {MIN_CUTOFF}, got {}",
            self.cutoff
        );
        Ok(())
    }

    /// `(t, f(t))` for every configured time, in order.
    pub fn snapshots(&self) -> Result<Vec<(f64, f64)>> {
        self.times
            .iter()
            .map(|&t| {
                self.twist
                    .eval(t)
                    .map(|f| (t, f))
                    .with_context(|| format!("evaluating twist {} at t = {t}", self.twist))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mass": self.params.mass,
            "omega": self.params.omega,
            "hbar": self.params.hbar,
            "twist": self.twist.to_string(),
            "times": self.times,
            "cutoff": self.cutoff,
            "format": self.format.name(),
        })
    }
}

/// Parses either a comma list `0,0.5,1` or an inclusive `start:stop:steps`
/// triple, where `steps` is the number of points.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        ensure!(
            parts.len() == 3,
            "time triple must be start:stop:steps, got {s:?}"
        );
        let start: f64 = parts[0]
            .parse()
            .with_context(|| format!("bad start {:?}", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .with_context(|| format!("bad stop {:?}", parts[1]))?;
        let steps: usize = parts[2]
            .parse()
            .with_context(|| format!("bad step count {:?}", parts[2]))?;
        return Ok(match steps {
            0 => Vec::new(),
            1 => vec![start],
            _ => {
                let dt = (stop - start) / (steps - 1) as f64;
                (0..steps)
                    .map(|k| {
                        if k == steps - 1 {
                            stop
                        } else {
                            start + k as f64 * dt
                        }
                    })
                    .collect()
            }
        });
    }
    s.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .with_context(|| format!("bad time point {item:?}"))
        })
        .collect()
}
