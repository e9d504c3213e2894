mod args;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use czbypass::consistency::{run_oracle_check, Corruption};
use czbypass::metrics::{chi_cz_reference, choi_state_fidelity, cz_unitary, dominant_overlap, process_fidelity};
use czbypass::model::{cz_parameter_solution, evaluate, process_matrix, sweep_phi_x};
use czbypass::optical::{
    bypass_amplitudes, coincidence_amplitudes_no_bypass, cz_success_probability, optimal_bypass, solve_cz_conditions,
    Coupling, OpticalSchemeParams,
};
use czbypass::report::{read_counts_csv, sweep_csv, write_counts_csv, Document, MatrixJson};
use czbypass::spin::{effective_gate, optimal_couplings, optimal_success_probability, solve_cz_condition};
use czbypass::tomography::{
    expected_rates, mle_reconstruct, reconstruct_from_frequencies, simulate_counts, TomographySettings,
};
use czbypass::{AngleRule, ComplexMatrix, ProcessMatrix, SetupParams};
use serde::Serialize;

use args::*;

/// Expected counts per unit rate for noiseless reconstructions.
const NOISELESS_SCALE: f64 = 1e6;

enum Failure {
    Usage(String),
    Infeasible(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<czbypass::Error> for Failure {
    fn from(e: czbypass::Error) -> Self {
        use czbypass::Error::*;
        match e {
            Infeasible(_) | ZeroTrace | ZeroProbability(_) | NoCounts | Eigen(_) => Failure::Infeasible(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<C: Serialize, R: Serialize>(out: Option<&Path>, config: C, results: R) -> Outcome {
    emit(out, &Document::new(config, results).to_json()?)
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<czbypass::C64> for Complex {
    fn from(c: czbypass::C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Serialize)]
struct SetupConfig {
    #[serde(rename = "R")]
    reflectance: f64,
    #[serde(rename = "R_H")]
    reflectance_h: f64,
    visibility: f64,
    angle_rule: AngleRule,
}

impl SetupArgs {
    fn params(&self) -> Outcome<SetupParams> {
        Ok(SetupParams::new(self.reflectance, self.reflectance_h, self.visibility)?)
    }

    fn config(&self) -> SetupConfig {
        SetupConfig {
            reflectance: self.reflectance,
            reflectance_h: self.reflectance_h,
            visibility: self.visibility,
            angle_rule: self.angle_rule.into(),
        }
    }
}

#[derive(Serialize)]
struct SpinSample {
    phi_deg: f64,
    p_success: Option<f64>,
}

fn cmd_spin(a: &SpinArgs) -> Outcome {
    let phi = a.phi_deg.to_radians();
    let opt = optimal_couplings(phi)?;
    let cond = solve_cz_condition(phi, opt.t)?;
    let gate = effective_gate(&cond.params(phi)?);
    let samples: Vec<SpinSample> = a
        .grid
        .values()?
        .into_iter()
        .map(|deg| SpinSample {
            phi_deg: deg,
            p_success: optimal_success_probability(deg.to_radians()).ok(),
        })
        .collect();

    #[derive(Serialize)]
    struct Config {
        phi_deg: f64,
        grid: GridSpec,
    }
    #[derive(Serialize)]
    struct Results {
        t: f64,
        t_tilde: f64,
        t_squared: f64,
        phase_correction_deg: f64,
        eta_a: Complex,
        p_success: f64,
        gate: MatrixJson,
        samples: Vec<SpinSample>,
    }
    emit_json(
        a.out.as_deref(),
        Config {
            phi_deg: a.phi_deg,
            grid: a.grid,
        },
        Results {
            t: opt.t,
            t_tilde: cond.t_tilde,
            t_squared: opt.t * opt.t,
            phase_correction_deg: cond.phase_correction.to_degrees(),
            eta_a: gate.eta_a.into(),
            p_success: opt.p_success,
            gate: MatrixJson::from(&gate.matrix),
            samples,
        },
    )
}

#[derive(Serialize)]
struct SchemeReport {
    t_x: f64,
    r_x: f64,
    t_y: f64,
    r_y: f64,
    t_a: f64,
    t_b: f64,
    phi_x_deg: f64,
    phi_y_deg: f64,
    phi_a_deg: f64,
    amplitudes: [f64; 4],
    p_success: f64,
}

impl SchemeReport {
    fn new(s: &OpticalSchemeParams) -> Self {
        let w = bypass_amplitudes(s);
        Self {
            t_x: s.bypass_in.t,
            r_x: s.bypass_in.r,
            t_y: s.bypass_out.t,
            r_y: s.bypass_out.r,
            t_a: s.filter_a,
            t_b: s.filter_b,
            phi_x_deg: s.bypass_in.waveplate_angle().to_degrees(),
            phi_y_deg: s.bypass_out.waveplate_angle().to_degrees(),
            phi_a_deg: (0.5 * s.filter_a.clamp(-1.0, 1.0).acos()).to_degrees(),
            amplitudes: w,
            p_success: w[0] * w[0],
        }
    }
}

fn cmd_optical(a: &OpticalArgs) -> Outcome {
    let r = a.reflectance;
    let no_bypass = coincidence_amplitudes_no_bypass(r)?;
    let optimum = optimal_bypass(r)?;
    let at_phi_x = match a.phi_x_deg {
        Some(deg) => {
            let x = Coupling::from_waveplate(deg.to_radians());
            let sol = solve_cz_conditions(r, x.t)?;
            let report = SchemeReport::new(&sol.scheme(r)?);
            debug_assert!((report.p_success - cz_success_probability(r, &sol)).abs() < 1e-12);
            Some(report)
        }
        None => None,
    };

    #[derive(Serialize)]
    struct Config {
        #[serde(rename = "R")]
        reflectance: f64,
        phi_x_deg: Option<f64>,
    }
    #[derive(Serialize)]
    struct NoBypass {
        bare: [f64; 4],
        filtered: [f64; 4],
    }
    #[derive(Serialize)]
    struct Results {
        no_bypass: NoBypass,
        optimum: SchemeReport,
        at_phi_x: Option<SchemeReport>,
    }
    emit_json(
        a.out.as_deref(),
        Config {
            reflectance: r,
            phi_x_deg: a.phi_x_deg,
        },
        Results {
            no_bypass: NoBypass {
                bare: no_bypass.bare,
                filtered: no_bypass.filtered,
            },
            optimum: SchemeReport::new(&optimum.scheme(r)?),
            at_phi_x,
        },
    )
}

fn cmd_sweep(a: &SweepArgs) -> Outcome {
    let base = a.setup.params()?;
    let records = sweep_phi_x(&base, &a.grid.values()?, a.setup.angle_rule.into())?;
    match a.format {
        Format::Csv => emit(a.out.as_deref(), &sweep_csv(&records)?),
        Format::Json => {
            #[derive(Serialize)]
            struct Config {
                #[serde(flatten)]
                setup: SetupConfig,
                grid: GridSpec,
            }
            let config = Config {
                setup: a.setup.config(),
                grid: a.grid,
            };
            emit_json(a.out.as_deref(), config, records)
        }
    }
}

#[derive(Serialize)]
struct Estimate {
    f_chi: f64,
    f_model: f64,
    p_success: f64,
    overlap_identity: f64,
    overlap_cz: f64,
    character: &'static str,
    iterations: usize,
    converged: bool,
    log_likelihood: f64,
    chi: MatrixJson,
    chi_normalized: MatrixJson,
}

fn cmd_tomography(a: &TomographyArgs) -> Outcome {
    let rule: AngleRule = a.setup.angle_rule.into();
    let setup = cz_parameter_solution(&a.setup.params()?.with_angles_deg(a.phi_x_deg, 0.0, 0.0), rule)?;
    let chi = process_matrix(&setup);
    let (model_f_h, model_f_chi, model_p_s) = evaluate(&setup)?;
    let rates = expected_rates(&chi);

    let rec = match (a.counts_scale, &a.counts_in) {
        (Some(scale), Some(path)) => {
            let counts = read_counts_csv(File::open(path)?)?;
            mle_reconstruct(&counts, &TomographySettings::new(scale, 0))?
        }
        (Some(scale), None) => {
            let seed = a
                .seed
                .ok_or_else(|| Failure::Usage("--counts-scale requires --seed".into()))?;
            let counts = simulate_counts(&rates, scale, seed)?;
            if let Some(path) = &a.counts_out {
                write_counts_csv(&counts, File::create(path)?)?;
            }
            mle_reconstruct(&counts, &TomographySettings::new(scale, seed))?
        }
        (None, _) => {
            if a.seed.is_some() || a.counts_out.is_some() {
                return Err(Failure::Usage("--seed and --counts-out need --counts-scale".into()));
            }
            let n: Vec<f64> = rates.iter().map(|r| r * NOISELESS_SCALE).collect();
            reconstruct_from_frequencies(&n, &TomographySettings::new(NOISELESS_SCALE, 0))?
        }
    };

    let overlap =
        |u: &ComplexMatrix| -> Outcome<f64> { Ok(dominant_overlap(&rec.chi, &ProcessMatrix::choi_vector(u)?)?) };
    let (overlap_identity, overlap_cz) = (overlap(&ComplexMatrix::identity(4))?, overlap(&cz_unitary())?);
    let estimate = Estimate {
        f_chi: process_fidelity(&rec.chi, &chi_cz_reference())?,
        f_model: choi_state_fidelity(&rec.chi, &chi)?,
        p_success: rec.chi.trace() / 4.0,
        overlap_identity,
        overlap_cz,
        character: if overlap_identity > overlap_cz {
            "identity-like"
        } else {
            "cz-like"
        },
        iterations: rec.iterations,
        converged: rec.converged,
        log_likelihood: rec.log_likelihood.last().copied().unwrap_or(f64::NAN),
        chi: MatrixJson::from(rec.chi.matrix()),
        chi_normalized: MatrixJson::from(rec.normalized()?.matrix()),
    };

    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        setup: SetupConfig,
        phi_x_deg: f64,
        counts_scale: Option<f64>,
        seed: Option<u64>,
        counts_in: Option<String>,
    }
    #[derive(Serialize)]
    struct Model {
        phi_y_deg: f64,
        phi_a_deg: f64,
        f_h: f64,
        f_chi: f64,
        p_success: f64,
    }
    #[derive(Serialize)]
    struct Results {
        model: Model,
        estimate: Estimate,
    }
    emit_json(
        a.out.as_deref(),
        Config {
            setup: a.setup.config(),
            phi_x_deg: a.phi_x_deg,
            counts_scale: a.counts_scale,
            seed: a.seed,
            counts_in: a.counts_in.as_ref().map(|p| p.display().to_string()),
        },
        Results {
            model: Model {
                phi_y_deg: setup.phi_y.to_degrees(),
                phi_a_deg: setup.phi_a.to_degrees(),
                f_h: model_f_h,
                f_chi: model_f_chi,
                p_success: model_p_s,
            },
            estimate,
        },
    )
}

fn cmd_oracle_check(a: &OracleArgs) -> Outcome {
    let corruption = a.corrupt.map(|gamma_10_offset| Corruption { gamma_10_offset });
    let report = run_oracle_check(a.draws, a.seed, corruption)?;
    #[derive(Serialize)]
    struct Config {
        draws: usize,
        seed: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        corrupt: Option<f64>,
    }
    let config = Config {
        draws: a.draws,
        seed: a.seed,
        corrupt: a.corrupt,
    };
    emit_json(a.out.as_deref(), config, &report)?;
    if report.passed() {
        return Ok(());
    }
    for m in &report.mismatches {
        eprintln!(
            "mismatch ({:?}) at draw {}: deviation {:.3e} for {}",
            m.check,
            m.draw,
            m.deviation,
            serde_json::to_string(&m.params).unwrap_or_default()
        );
    }
    Err(Failure::Mismatch(format!(
        "{} of {} checks exceeded tolerance {:e}",
        report.mismatches.len(),
        3 * report.draws,
        report.tolerance
    )))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Spin(a) => cmd_spin(a),
        Command::Optical(a) => cmd_optical(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Tomography(a) => cmd_tomography(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
