//! Analytic model of the experimental gate.
//!
//! The central and `B`-side couplers reflect vertical polarization with
//! amplitude `r` and leak horizontal polarization with amplitude `r_H`.
//! Imperfect two-photon interference (visibility `V`) is modelled as a
//! mixture: with weight `q = 2V/(1+V)` the photons interfere, otherwise they
//! are distinguishable and either both cross (`χ_R`) or both stay (`χ_T`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{average_success_probability, chi_cz_reference, hofmann_bound, process_fidelity};
use crate::optical::{solve_cz_conditions, Coupling};
use crate::process::ProcessMatrix;
use crate::qmath::{real, ComplexMatrix, C64};

pub const NOMINAL_REFLECTANCE: f64 = 1.0 / 3.0;

/// Which reflectance the bypass angles `φ_Y`, `φ_A` are solved for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleRule {
    /// The design value `R = 1/3`.
    #[default]
    NominalR,
    /// The reflectance of the setup itself.
    MeasuredR,
}

impl AngleRule {
    pub fn design_reflectance(self, setup: &SetupParams) -> f64 {
        match self {
            AngleRule::NominalR => NOMINAL_REFLECTANCE,
            AngleRule::MeasuredR => setup.reflectance,
        }
    }
}

/// Physical parameters of the setup. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupParams {
    pub reflectance: f64,
    pub reflectance_h: f64,
    pub visibility: f64,
    pub phi_x: f64,
    pub phi_y: f64,
    pub phi_a: f64,
}

impl SetupParams {
    pub fn new(reflectance: f64, reflectance_h: f64, visibility: f64) -> Result<Self> {
        let p = Self {
            reflectance,
            reflectance_h,
            visibility,
            phi_x: 0.0,
            phi_y: 0.0,
            phi_a: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Characterized components: `R = 0.313`, `R_H = 0.019`, `V = 0.94`.
    pub fn fixture() -> Self {
        Self::new(0.313, 0.019, 0.94).unwrap()
    }

    /// Design components with perfect interference.
    pub fn ideal() -> Self {
        Self::new(NOMINAL_REFLECTANCE, 0.0, 1.0).unwrap()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("R", self.reflectance),
            ("R_H", self.reflectance_h),
            ("visibility", self.visibility),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in [("phi_X", self.phi_x), ("phi_Y", self.phi_y), ("phi_A", self.phi_a)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    pub fn with_angles(self, phi_x: f64, phi_y: f64, phi_a: f64) -> Self {
        Self {
            phi_x,
            phi_y,
            phi_a,
            ..self
        }
    }

    pub fn with_angles_deg(self, phi_x: f64, phi_y: f64, phi_a: f64) -> Self {
        self.with_angles(phi_x.to_radians(), phi_y.to_radians(), phi_a.to_radians())
    }

    /// Weight of the interfering branch, `2V / (1 + V)`.
    pub fn q(&self) -> f64 {
        2.0 * self.visibility / (1.0 + self.visibility)
    }

    pub fn amplitudes(&self) -> SetupAmplitudes {
        let r = self.reflectance.sqrt();
        let r_h = self.reflectance_h.sqrt();
        SetupAmplitudes {
            t: (1.0 - self.reflectance).sqrt(),
            r,
            t_h: (1.0 - self.reflectance_h).sqrt(),
            r_h,
            x: Coupling::from_waveplate(self.phi_x),
            y: Coupling::from_waveplate(self.phi_y),
            a: Coupling::from_waveplate(self.phi_a),
        }
    }
}

/// Amplitude transmittances and reflectances derived from [`SetupParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetupAmplitudes {
    pub t: f64,
    pub r: f64,
    pub t_h: f64,
    pub r_h: f64,
    pub x: Coupling,
    pub y: Coupling,
    pub a: Coupling,
}

/// Interfering photons: `|00> -> β00|00>`, `|01> -> β01|01>`,
/// `|10> -> β10|10> + γ11|11>`, `|11> -> β11|11> + γ10|10>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndistinguishableCoefficients {
    pub beta_00: f64,
    pub beta_01: f64,
    pub beta_10: f64,
    pub beta_11: f64,
    pub gamma_11: f64,
    pub gamma_10: f64,
}

/// Distinguishable photons, both staying on their side: diagonal map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmittedCoefficients {
    pub beta_00: f64,
    pub beta_01: f64,
    pub beta_10: f64,
    pub beta_11: f64,
}

/// Distinguishable photons, both crossing: no output for `|0k>` inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectedCoefficients {
    pub beta_10: f64,
    pub beta_11: f64,
    pub gamma_11: f64,
    pub gamma_10: f64,
}

pub fn coefficients_indistinguishable(p: &SetupParams) -> IndistinguishableCoefficients {
    let SetupAmplitudes {
        t,
        r,
        t_h,
        r_h,
        x,
        y,
        a,
    } = p.amplitudes();
    let b0 = t * a.t * t_h * t_h;
    IndistinguishableCoefficients {
        beta_00: b0,
        beta_01: b0,
        beta_10: x.t * y.t * t_h * t * t + x.r * y.r * (t_h * t_h - r_h * r_h) * t,
        beta_11: x.t * y.t * t_h * (2.0 * t * t - 1.0) + x.r * y.r * t_h * t_h * t,
        gamma_11: -r_h * x.t * y.r * r * t_h,
        gamma_10: -t * r * x.r * y.t * r_h,
    }
}

pub fn coefficients_transmitted(p: &SetupParams) -> TransmittedCoefficients {
    let SetupAmplitudes { t, t_h, x, y, a, .. } = p.amplitudes();
    let b0 = t_h * t_h * t * a.t;
    let b1 = t_h * t * (x.t * y.t * t + x.r * y.r * t_h);
    TransmittedCoefficients {
        beta_00: b0,
        beta_01: b0,
        beta_10: b1,
        beta_11: b1,
    }
}

pub fn coefficients_reflected(p: &SetupParams) -> ReflectedCoefficients {
    let SetupAmplitudes {
        t, r, t_h, r_h, x, y, ..
    } = p.amplitudes();
    ReflectedCoefficients {
        beta_10: -r_h * r_h * x.r * y.r * t,
        beta_11: -r * r * x.t * y.t * t_h,
        gamma_11: -r_h * x.t * y.r * r * t_h,
        gamma_10: -r * x.r * y.t * r_h * t,
    }
}

/// `(input, output, amplitude)` triples of a conditional map.
fn choi_vector(entries: &[(usize, usize, f64)]) -> [C64; 16] {
    let mut v = [real(0.0); 16];
    for &(input, output, c) in entries {
        v[4 * input + output] += c;
    }
    v
}

impl IndistinguishableCoefficients {
    pub fn choi_vector(&self) -> [C64; 16] {
        choi_vector(&[
            (0, 0, self.beta_00),
            (1, 1, self.beta_01),
            (2, 2, self.beta_10),
            (3, 3, self.beta_11),
            (2, 3, self.gamma_11),
            (3, 2, self.gamma_10),
        ])
    }
}

impl TransmittedCoefficients {
    pub fn choi_vector(&self) -> [C64; 16] {
        choi_vector(&[
            (0, 0, self.beta_00),
            (1, 1, self.beta_01),
            (2, 2, self.beta_10),
            (3, 3, self.beta_11),
        ])
    }
}

impl ReflectedCoefficients {
    pub fn choi_vector(&self) -> [C64; 16] {
        choi_vector(&[
            (2, 2, self.beta_10),
            (3, 3, self.beta_11),
            (2, 3, self.gamma_11),
            (3, 2, self.gamma_10),
        ])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiComponents {
    pub indistinguishable: ProcessMatrix,
    pub transmitted: ProcessMatrix,
    pub reflected: ProcessMatrix,
}

impl ChiComponents {
    /// `q χ_I + (1 − q)(χ_R + χ_T)`.
    pub fn mix(&self, q: f64) -> ProcessMatrix {
        self.indistinguishable
            .scaled(q)
            .add(&self.reflected.add(&self.transmitted).scaled(1.0 - q))
    }
}

impl ChiComponents {
    pub fn from_coefficients(
        i: &IndistinguishableCoefficients,
        t: &TransmittedCoefficients,
        r: &ReflectedCoefficients,
    ) -> Self {
        Self {
            indistinguishable: ProcessMatrix::from_choi_vector(&i.choi_vector()),
            transmitted: ProcessMatrix::from_choi_vector(&t.choi_vector()),
            reflected: ProcessMatrix::from_choi_vector(&r.choi_vector()),
        }
    }
}

pub fn chi_components(p: &SetupParams) -> ChiComponents {
    ChiComponents::from_coefficients(
        &coefficients_indistinguishable(p),
        &coefficients_transmitted(p),
        &coefficients_reflected(p),
    )
}

pub fn process_matrix(p: &SetupParams) -> ProcessMatrix {
    chi_components(p).mix(p.q())
}

/// `ρ_out = Tr_in[(ρ_in^T ⊗ I) χ]` and its trace, the success probability.
pub fn apply_process(chi: &ProcessMatrix, rho_in: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    chi.apply(rho_in)
}

/// Angles `φ_Y`, `φ_A` that make the ideal scheme at the rule's design
/// reflectance a CZ gate for the given `φ_X ∈ (0°, 45°)`.
fn solve_angles(p: &SetupParams, rule: AngleRule) -> Result<(f64, f64)> {
    let deg = p.phi_x.to_degrees();
    if !(p.phi_x > 0.0 && p.phi_x < std::f64::consts::FRAC_PI_4) {
        return Err(Error::Infeasible(format!(
            "phi_X = {deg}° has no CZ setting; need 0° < phi_X < 45°"
        )));
    }
    let x = Coupling::from_waveplate(p.phi_x);
    let solution = solve_cz_conditions(rule.design_reflectance(p), x.t)?;
    let phi_y = solution.bypass_out.waveplate_angle();
    let phi_a = 0.5 * solution.filter_a.clamp(-1.0, 1.0).acos();
    Ok((phi_y, phi_a))
}

/// Fills `φ_Y` and `φ_A` from `φ_X`. At `φ_X = 0` the bypass is off and the
/// filter is left open (`φ_Y = φ_A = 0`).
pub fn cz_parameter_solution(p: &SetupParams, rule: AngleRule) -> Result<SetupParams> {
    p.validate()?;
    if p.phi_x == 0.0 {
        return Ok(p.with_angles(0.0, 0.0, 0.0));
    }
    let (phi_y, phi_a) = solve_angles(p, rule)?;
    Ok(p.with_angles(p.phi_x, phi_y, phi_a))
}

/// Figures of merit at one `φ_X` grid point. Metric fields are `None`
/// exactly when `feasible` is false.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "phi_X_deg")]
    pub phi_x_deg: f64,
    #[serde(rename = "phi_Y_deg")]
    pub phi_y_deg: Option<f64>,
    #[serde(rename = "phi_A_deg")]
    pub phi_a_deg: Option<f64>,
    #[serde(rename = "F_H")]
    pub f_h: Option<f64>,
    #[serde(rename = "F_chi")]
    pub f_chi: Option<f64>,
    #[serde(rename = "P_S")]
    pub p_s: Option<f64>,
    pub feasible: bool,
}

impl SweepRecord {
    fn infeasible(phi_x_deg: f64) -> Self {
        Self {
            phi_x_deg,
            phi_y_deg: None,
            phi_a_deg: None,
            f_h: None,
            f_chi: None,
            p_s: None,
            feasible: false,
        }
    }
}

/// Gate metrics for fully specified angles.
pub fn evaluate(p: &SetupParams) -> Result<(f64, f64, f64)> {
    let chi = process_matrix(p);
    let f_h = hofmann_bound(&chi)?.f_h;
    let f_chi = process_fidelity(&chi, &chi_cz_reference())?;
    Ok((f_h, f_chi, average_success_probability(&chi)))
}

fn sweep_point(base: &SetupParams, phi_x_deg: f64, rule: AngleRule) -> Result<SweepRecord> {
    let mut p = *base;
    p.phi_x = phi_x_deg.to_radians();
    let (phi_y, phi_a) = match solve_angles(&p, rule) {
        Ok(a) => a,
        Err(Error::Infeasible(_)) => return Ok(SweepRecord::infeasible(phi_x_deg)),
        Err(e) => return Err(e),
    };
    let p = p.with_angles(p.phi_x, phi_y, phi_a);
    match evaluate(&p) {
        Ok((f_h, f_chi, p_s)) => Ok(SweepRecord {
            phi_x_deg,
            phi_y_deg: Some(phi_y.to_degrees()),
            phi_a_deg: Some(phi_a.to_degrees()),
            f_h: Some(f_h),
            f_chi: Some(f_chi),
            p_s: Some(p_s),
            feasible: true,
        }),
        Err(Error::ZeroProbability(_) | Error::ZeroTrace) => Ok(SweepRecord::infeasible(phi_x_deg)),
        Err(e) => Err(e),
    }
}

/// One record per grid angle (degrees), in grid order. Points without a CZ
/// setting are flagged rather than failing the sweep.
pub fn sweep_phi_x(base: &SetupParams, grid_deg: &[f64], rule: AngleRule) -> Result<Vec<SweepRecord>> {
    base.validate()?;
    if grid_deg.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    grid_deg.par_iter().map(|&deg| sweep_point(base, deg, rule)).collect()
}

/// `points` evenly spaced angles from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(Error::InvalidParameter("grid needs at least one point".into())),
        1 => Ok(vec![start]),
        n => Ok((0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect()),
    }
}
