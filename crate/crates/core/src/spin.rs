//! Controlled-Z synthesis from a weak controlled-phase interaction.
//!
//! Particle A carries levels `|0>, |1>, |2>, |3>`; `|0>, |1>` encode the qubit
//! and `|2>` is the bypass level. The protocol couples `|1>_A` to `|2>_A`,
//! lets the weak interaction `U_φ` act, couples again with different strength,
//! projects A back onto its qubit subspace and attenuates `|0>_A`. Conditioned
//! on success the two qubits have undergone a diagonal gate `V`; with the
//! couplings chosen by [`solve_cz_condition`] that gate is `η_A · U_CZ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmath::{real, tensor, ComplexMatrix, PureState, C64, DEFAULT_TOL};

/// Levels of particle A kept in the simulation.
const A_LEVELS: usize = 4;

/// `U_φ = exp(iφ|11><11|)`
pub fn controlled_phase(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[real(1.0), real(1.0), real(1.0), C64::from_polar(1.0, phi)])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinProtocolParams {
    pub phi: f64,
    /// First `|1> <-> |2>` coupling.
    pub t: C64,
    pub r: C64,
    /// Second coupling.
    pub t_tilde: C64,
    pub r_tilde: C64,
}

impl SpinProtocolParams {
    /// Reflection amplitudes are taken as the positive roots of `1 - |t|²`.
    pub fn new(phi: f64, t: C64, t_tilde: C64) -> Result<Self> {
        let r = reflection_for(t)?;
        let r_tilde = reflection_for(t_tilde)?;
        Self::with_reflections(phi, t, r, t_tilde, r_tilde)
    }

    pub fn with_reflections(phi: f64, t: C64, r: C64, t_tilde: C64, r_tilde: C64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phi = {phi}")));
        }
        for (name, a, b) in [("t, r", t, r), ("t~, r~", t_tilde, r_tilde)] {
            let s = a.norm_sqr() + b.norm_sqr();
            if (s - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::InvalidParameter(format!(
                    "coupling ({name}) violates |t|^2 + |r|^2 = 1 (got {s})"
                )));
            }
        }
        Ok(Self {
            phi,
            t,
            r,
            t_tilde,
            r_tilde,
        })
    }

    /// Filter amplitude `η_A = t t̃ − r r̃*`.
    pub fn eta_a(&self) -> C64 {
        self.t * self.t_tilde - self.r * self.r_tilde.conj()
    }
}

fn reflection_for(t: C64) -> Result<C64> {
    let rr = 1.0 - t.norm_sqr();
    if rr < -DEFAULT_TOL {
        return Err(Error::InvalidParameter(format!("|t| = {} exceeds 1", t.norm())));
    }
    Ok(real(rr.max(0.0).sqrt()))
}

/// Two-level coupling on A: `|1> -> t|1> + r|2>`, `|2> -> t*|2> − r*|1>`,
/// identity on `|0>` and `|3>`.
fn level_coupling(t: C64, r: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(A_LEVELS);
    m[(1, 1)] = t;
    m[(2, 1)] = r;
    m[(1, 2)] = -r.conj();
    m[(2, 2)] = t.conj();
    m
}

/// `U_φ` acting on the qubit subspace of A; levels `|2>`, `|3>` do not
/// interact with B.
fn interaction(phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(A_LEVELS * 2);
    m[(3, 3)] = C64::from_polar(1.0, phi);
    m
}

fn embed(input: &PureState) -> Vec<C64> {
    let mut v = vec![real(0.0); A_LEVELS * 2];
    v[..4].copy_from_slice(input.amplitudes());
    v
}

/// Projection of particle A onto `span{|0>, |1>}`.
fn project_qubit(v: &[C64]) -> Vec<C64> {
    v[..4].to_vec()
}

fn propagate(input: &PureState, p: &SpinProtocolParams) -> Result<Vec<C64>> {
    input.ensure_normalized(DEFAULT_TOL)?;
    if input.dim() != 4 {
        return Err(Error::dims("two-qubit state (dim 4)", input.dim()));
    }
    let id_b = ComplexMatrix::identity(2);
    let first = tensor(&level_coupling(p.t, p.r), &id_b);
    let second = tensor(&level_coupling(p.t_tilde, p.r_tilde), &id_b);
    let mut v = embed(input);
    v = first.mat_vec(&v)?;
    v = interaction(p.phi).mat_vec(&v)?;
    second.mat_vec(&v)
}

/// Runs the full protocol on a normalized input and returns the unnormalized
/// post-selected output; its squared norm is the success probability.
pub fn run_protocol(input: &PureState, p: &SpinProtocolParams) -> Result<PureState> {
    let mut out = project_qubit(&propagate(input, p)?);
    let eta = p.eta_a();
    out[0] *= eta;
    out[1] *= eta;
    PureState::new(out)
}

/// Same as [`run_protocol`] but with the attenuation of `|0>_A` done the
/// physical way: couple `|0>_A` to `|2>_A` with transmission `t' = η_A`,
/// then project onto the qubit subspace again.
pub fn run_protocol_with_coupled_filter(input: &PureState, p: &SpinProtocolParams) -> Result<PureState> {
    let projected = project_qubit(&propagate(input, p)?);
    let eta = p.eta_a();
    let r_prime = real((1.0 - eta.norm_sqr()).max(0.0).sqrt());
    let mut filter = ComplexMatrix::identity(A_LEVELS);
    filter[(0, 0)] = eta;
    filter[(2, 0)] = r_prime;
    filter[(0, 2)] = -r_prime;
    filter[(2, 2)] = eta.conj();
    let filter = tensor(&filter, &ComplexMatrix::identity(2));
    let mut v = vec![real(0.0); A_LEVELS * 2];
    v[..4].copy_from_slice(&projected);
    let v = filter.mat_vec(&v)?;
    PureState::new(project_qubit(&v))
}

#[derive(Clone, Debug)]
pub struct EffectiveGate {
    /// Diagonal 4x4 conditional gate.
    pub matrix: ComplexMatrix,
    pub eta_a: C64,
}

pub fn effective_gate(p: &SpinProtocolParams) -> EffectiveGate {
    let eta = p.eta_a();
    let v11 = C64::from_polar(1.0, p.phi) * p.t * p.t_tilde - p.r * p.r_tilde.conj();
    EffectiveGate {
        matrix: ComplexMatrix::from_diag(&[eta, eta, eta, v11]),
        eta_a: eta,
    }
}

/// Real-coupling solution of the CZ condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzCondition {
    pub t: f64,
    /// Modulus of the second transmission.
    pub t_tilde: f64,
    /// Phase shift on level `|1>_A` applied just before the second coupling.
    /// Equivalent to using `t̃ e^{iα}` as the second transmission.
    pub phase_correction: f64,
}

impl CzCondition {
    pub fn params(&self, phi: f64) -> Result<SpinProtocolParams> {
        SpinProtocolParams::new(phi, real(self.t), C64::from_polar(self.t_tilde, self.phase_correction))
    }
}

fn check_phase(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi <= PI + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "interaction phase must lie in (0, π], got {phi}"
        )));
    }
    Ok(())
}

/// Solves `r r̃ / (t t̃) = cos(φ/2)` for `t̃` given a real first coupling `t`.
/// The remaining phase `e^{iφ/2}` of the complex condition is returned as
/// [`CzCondition::phase_correction`] `= −φ/2`.
pub fn solve_cz_condition(phi: f64, t: f64) -> Result<CzCondition> {
    check_phase(phi)?;
    let c = (phi / 2.0).cos().max(0.0);
    let weak = c > 1e-12;
    let range = if weak { "(0, 1)" } else { "(0, 1]" };
    if !(t > 0.0 && t <= 1.0) || (weak && t >= 1.0) {
        return Err(Error::Infeasible(format!(
            "no second coupling satisfies the CZ condition for t = {t} at phi = {phi}; feasible t range is {range}"
        )));
    }
    let r = (1.0 - t * t).sqrt();
    // r̃/t̃ = c t / r
    let ratio = if weak { c * t / r } else { 0.0 };
    let t_tilde = 1.0 / (1.0 + ratio * ratio).sqrt();
    Ok(CzCondition {
        t,
        t_tilde,
        phase_correction: -phi / 2.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalCouplings {
    pub t: f64,
    pub t_tilde: f64,
    pub p_success: f64,
}

/// Success probability of the optimal scheme,
/// `(sin(φ/2) / (1 + |cos(φ/2)|))²`.
pub fn optimal_success_probability(phi: f64) -> Result<f64> {
    check_phase(phi)?;
    let (s, c) = ((phi / 2.0).sin(), (phi / 2.0).cos().abs());
    Ok((s / (1.0 + c)).powi(2))
}

/// `|t|² = |t̃|² = 1 / (1 + |cos(φ/2)|)`.
pub fn optimal_couplings(phi: f64) -> Result<OptimalCouplings> {
    let p_success = optimal_success_probability(phi)?;
    let t = (1.0 / (1.0 + (phi / 2.0).cos().abs())).sqrt();
    Ok(OptimalCouplings {
        t,
        t_tilde: t,
        p_success,
    })
}
