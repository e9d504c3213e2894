//! Cross-checks between the analytic model, the ideal optical scheme and the
//! brute-force Fock simulation on seeded random parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{conditional_gate, ideal_scheme_network, oracle_process_matrix};
use crate::model::{
    coefficients_indistinguishable, coefficients_reflected, coefficients_transmitted, ChiComponents, SetupParams,
};
use crate::optical::{bypass_amplitudes, central_coupling, OpticalSchemeParams};
use crate::qmath::{real, ComplexMatrix};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Negative control: perturbs one printed coefficient before comparing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Corruption {
    pub gamma_10_offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Fock simulation of the setup versus the analytic process matrix.
    FockVsModel,
    /// Analytic coefficients without the horizontal leak versus the ideal scheme.
    ModelVsScheme,
    /// Fock simulation of the ideal scheme versus its closed-form amplitudes.
    FockVsScheme,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub check: Check,
    pub draw: usize,
    pub params: SetupParams,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub draws: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Uniform `R`, `R_H`, `V` in `[0, 1]` and angles in `[-π, π)`.
pub fn random_setup(rng: &mut impl Rng) -> SetupParams {
    use std::f64::consts::PI;
    SetupParams {
        reflectance: rng.random_range(0.0..=1.0),
        reflectance_h: rng.random_range(0.0..=1.0),
        visibility: rng.random_range(0.0..=1.0),
        phi_x: rng.random_range(-PI..PI),
        phi_y: rng.random_range(-PI..PI),
        phi_a: rng.random_range(-PI..PI),
    }
}

fn model_chi(p: &SetupParams, corruption: Option<Corruption>) -> crate::process::ProcessMatrix {
    let mut ind = coefficients_indistinguishable(p);
    if let Some(c) = corruption {
        ind.gamma_10 += c.gamma_10_offset;
    }
    ChiComponents::from_coefficients(&ind, &coefficients_transmitted(p), &coefficients_reflected(p)).mix(p.q())
}

/// The ideal scheme with the same couplings as `p` (leak ignored).
fn matching_scheme(p: &SetupParams) -> OpticalSchemeParams {
    let a = p.amplitudes();
    OpticalSchemeParams {
        reflectance: p.reflectance,
        bypass_in: a.x,
        bypass_out: a.y,
        filter_a: a.a.t,
        filter_b: central_coupling(p.reflectance).t,
    }
}

fn check_draw(p: &SetupParams, corruption: Option<Corruption>) -> Result<[(Check, f64); 3]> {
    let fock_model = oracle_process_matrix(p)?
        .matrix()
        .max_abs_diff(model_chi(p, corruption).matrix());

    let leak_free = SetupParams {
        reflectance_h: 0.0,
        ..*p
    };
    let scheme = matching_scheme(&leak_free);
    let w = bypass_amplitudes(&scheme);
    let c = coefficients_indistinguishable(&leak_free);
    let model_scheme = [c.beta_00, c.beta_01, c.beta_10, c.beta_11]
        .iter()
        .zip(w)
        .map(|(a, b)| (a - b).abs())
        .chain([c.gamma_11.abs(), c.gamma_10.abs()])
        .fold(0.0, f64::max);

    let (net, rails) = ideal_scheme_network(&scheme);
    let fock_scheme = conditional_gate(&net, rails, rails)?.max_abs_diff(&ComplexMatrix::from_diag(&w.map(real)));

    Ok([
        (Check::FockVsModel, fock_model),
        (Check::ModelVsScheme, model_scheme),
        (Check::FockVsScheme, fock_scheme),
    ])
}

pub fn run_oracle_check(draws: usize, seed: u64, corruption: Option<Corruption>) -> Result<OracleReport> {
    if draws == 0 {
        return Err(Error::InvalidParameter("oracle check needs at least one draw".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        draws,
        seed,
        tolerance: DEFAULT_TOLERANCE,
        max_deviation: 0.0,
        mismatches: Vec::new(),
    };
    for draw in 0..draws {
        let p = random_setup(&mut rng);
        for (check, deviation) in check_draw(&p, corruption)? {
            report.max_deviation = report.max_deviation.max(deviation);
            if deviation.is_nan() || deviation > DEFAULT_TOLERANCE {
                report.mismatches.push(Mismatch {
                    check,
                    draw,
                    params: p,
                    deviation,
                });
            }
        }
    }
    Ok(report)
}
