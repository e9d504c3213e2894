use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use czbypass::AngleRule;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "czbypass", version, about = "Bypass-enhanced controlled-Z gate analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spin protocol: effective gate, optimal couplings and P_S(phi) samples.
    Spin(SpinArgs),
    /// Ideal optical scheme: no-bypass amplitudes, optimum and CZ couplings.
    Optical(OpticalArgs),
    /// Imperfection-model sweep over the bypass wave-plate angle.
    Sweep(SweepArgs),
    /// Simulated process tomography with maximum-likelihood reconstruction.
    Tomography(TomographyArgs),
    /// Cross-check the Fock simulation, the model and the ideal scheme.
    OracleCheck(OracleArgs),
}

/// Grid in degrees, `start:stop:points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> czbypass::Result<Vec<f64>> {
        czbypass::model::linear_grid(self.start, self.stop, self.points)
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, points] = parts[..] else {
        return Err(format!("expected start:stop:points, got `{s}`"));
    };
    let points: usize = points.trim().parse().map_err(|e| format!("points: {e}"))?;
    if points == 0 {
        return Err("grid needs at least one point".into());
    }
    Ok(GridSpec {
        start: parse_number(start)?,
        stop: parse_number(stop)?,
        points,
    })
}

/// Plain float or a fraction such as `1/3`.
fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim().parse().map_err(|e| format!("`{s}`: {e}"))?,
                b.trim().parse().map_err(|e| format!("`{s}`: {e}"))?,
            );
            a / b
        }
        None => s.parse().map_err(|e| format!("`{s}`: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Nominal,
    Measured,
}

impl From<RuleArg> for AngleRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Nominal => AngleRule::NominalR,
            RuleArg::Measured => AngleRule::MeasuredR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Setup imperfections; defaults are the characterized components.
#[derive(Args, Debug, Clone, Copy)]
pub struct SetupArgs {
    /// Central beam-splitter reflectance for vertical polarization.
    #[arg(long = "R", default_value = "0.313", value_parser = parse_number)]
    pub reflectance: f64,
    /// Parasitic reflectance for horizontal polarization.
    #[arg(long = "RH", default_value = "0.019", value_parser = parse_number)]
    pub reflectance_h: f64,
    /// Two-photon interference visibility.
    #[arg(long, default_value = "0.94", value_parser = parse_number)]
    pub visibility: f64,
    #[arg(long, value_enum, default_value_t = RuleArg::Nominal)]
    pub angle_rule: RuleArg,
}

#[derive(Args, Debug)]
pub struct SpinArgs {
    /// Interaction phase in degrees, in (0, 180].
    #[arg(long, value_parser = parse_number)]
    pub phi_deg: f64,
    /// Phases (degrees) at which to sample the optimal success probability.
    #[arg(long, default_value = "0:180:19", value_parser = parse_grid)]
    pub grid: GridSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OpticalArgs {
    #[arg(long = "R", default_value = "1/3", value_parser = parse_number)]
    pub reflectance: f64,
    /// Bypass wave-plate angle at which to solve the CZ conditions.
    #[arg(long, value_parser = parse_number)]
    pub phi_x_deg: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[arg(long, default_value = "0:45:17", value_parser = parse_grid)]
    pub grid: GridSpec,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TomographyArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Bypass wave-plate angle; 0 switches the bypass off.
    #[arg(long, default_value = "20", value_parser = parse_number)]
    pub phi_x_deg: f64,
    /// Expected counts per unit rate. Without it noiseless rates are used.
    #[arg(long, value_parser = parse_number)]
    pub counts_scale: Option<f64>,
    /// Seed for the Poisson count simulation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read counts from a CSV file instead of simulating them.
    #[arg(long, requires = "counts_scale", conflicts_with = "seed")]
    pub counts_in: Option<PathBuf>,
    /// Write the simulated counts as CSV.
    #[arg(long, conflicts_with = "counts_in")]
    pub counts_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Number of random parameter draws.
    #[arg(long, default_value_t = 10)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Offset added to one model coefficient (negative control).
    #[arg(long, hide = true)]
    pub corrupt: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("0:45:17").unwrap(),
            GridSpec {
                start: 0.0,
                stop: 45.0,
                points: 17
            }
        );
        assert!(parse_grid("0:45:0").is_err());
        assert!(parse_grid("0:45").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_number(" 0.313 ").unwrap(), 0.313);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("nan").is_err());
    }
}
