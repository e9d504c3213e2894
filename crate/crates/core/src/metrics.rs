//! Gate figures of merit: process fidelity, the Hofmann bound built from two
//! mutually unbiased probe bases, and success probabilities.

use crate::error::{Error, Result};
use crate::process::ProcessMatrix;
use crate::qmath::{eigendecompose_hermitian, qubit, real, ComplexMatrix, PureState, C64, DEFAULT_TOL};

/// Four orthonormal two-qubit probe states.
#[derive(Clone, Debug)]
pub struct ProbeBasis {
    label: String,
    states: [PureState; 4],
}

impl ProbeBasis {
    pub fn new(label: impl Into<String>, states: [PureState; 4]) -> Result<Self> {
        let label = label.into();
        for (i, a) in states.iter().enumerate() {
            if a.dim() != 4 {
                return Err(Error::dims(4, a.dim()));
            }
            for (j, b) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (a.inner(b) - want).norm() > DEFAULT_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "probe basis `{label}` is not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { label, states })
    }

    /// `{a_j ⊗ b_k}` for single-qubit bases `a`, `b`.
    pub fn product(label: impl Into<String>, a: [PureState; 2], b: [PureState; 2]) -> Result<Self> {
        let states = [a[0].kron(&b[0]), a[0].kron(&b[1]), a[1].kron(&b[0]), a[1].kron(&b[1])];
        Self::new(label, states)
    }

    /// `{|0+>, |0−>, |1+>, |1−>}`.
    pub fn z_x() -> Self {
        Self::product("ZX", [qubit::zero(), qubit::one()], [qubit::plus(), qubit::minus()]).unwrap()
    }

    /// `{|+0>, |+1>, |−0>, |−1>}`.
    pub fn x_z() -> Self {
        Self::product("XZ", [qubit::plus(), qubit::minus()], [qubit::zero(), qubit::one()]).unwrap()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn states(&self) -> &[PureState; 4] {
        &self.states
    }
}

pub fn cz_unitary() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[real(1.0), real(1.0), real(1.0), real(-1.0)])
}

/// `|0000> + |0101> + |1010> − |1111>`, trace 4.
pub fn chi_cz_reference() -> ProcessMatrix {
    ProcessMatrix::from_unitary(&cz_unitary()).unwrap()
}

/// `Tr[χ ref] / (Tr[χ] Tr[ref])`.
pub fn process_fidelity(chi: &ProcessMatrix, reference: &ProcessMatrix) -> Result<f64> {
    let (a, b) = (chi.trace(), reference.trace());
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let overlap = chi.matrix().matmul(reference.matrix())?.trace().re;
    Ok(overlap / (a * b))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between the trace-normalized Choi
/// states. Agrees with [`process_fidelity`] when `reference` has rank one and
/// equals 1 for `chi ∝ reference` whatever the rank.
pub fn choi_state_fidelity(chi: &ProcessMatrix, reference: &ProcessMatrix) -> Result<f64> {
    let (a, b) = (chi.trace(), reference.trace());
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let rho = chi.matrix().scale_real(1.0 / a);
    let sigma = reference.matrix().scale_real(1.0 / b);
    let sqrt_rho = eigendecompose_hermitian(&rho.hermitian_part())?.map(|x| x.max(0.0).sqrt());
    let inner = sqrt_rho.matmul(&sigma)?.matmul(&sqrt_rho)?.hermitian_part();
    let values = eigendecompose_hermitian(&inner)?.values;
    // Round-off eigenvalues would otherwise contribute ~1e-8 each through the root.
    let floor = 1e-13 * values.last().copied().unwrap_or(0.0).max(0.0);
    let root_trace: f64 = values.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok((root_trace * root_trace).min(1.0))
}

/// Success probability `p` for one pure input and, when `p > 0`, the
/// fidelity `f` of the heralded output with the ideal CZ output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateOutcome {
    pub p: f64,
    pub f: Option<f64>,
}

pub fn state_fidelity_and_probability(chi: &ProcessMatrix, psi: &PureState) -> Result<StateOutcome> {
    psi.ensure_normalized(DEFAULT_TOL)?;
    if psi.dim() != 4 {
        return Err(Error::dims(4, psi.dim()));
    }
    let p = chi.expectation(psi, &ComplexMatrix::identity(4))?;
    if p <= 0.0 {
        return Ok(StateOutcome { p: 0.0, f: None });
    }
    let ideal = psi.apply(&cz_unitary())?;
    let overlap = chi.expectation(psi, &ideal.density())?;
    Ok(StateOutcome {
        p,
        f: Some((overlap / p).clamp(0.0, 1.0)),
    })
}

/// `Σ p_k f_k / Σ p_k` over one probe basis.
pub fn average_state_fidelity(chi: &ProcessMatrix, basis: &ProbeBasis) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for psi in basis.states() {
        let o = state_fidelity_and_probability(chi, psi)?;
        num += o.p * o.f.unwrap_or(0.0);
        den += o.p;
    }
    if den <= 0.0 {
        return Err(Error::ZeroProbability(basis.label().to_string()));
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HofmannBound {
    /// `F_1 + F_2 − 1`, deliberately not clamped.
    pub f_h: f64,
    pub f_1: f64,
    pub f_2: f64,
}

pub fn hofmann_bound(chi: &ProcessMatrix) -> Result<HofmannBound> {
    hofmann_bound_with(chi, &ProbeBasis::z_x(), &ProbeBasis::x_z())
}

pub fn hofmann_bound_with(chi: &ProcessMatrix, first: &ProbeBasis, second: &ProbeBasis) -> Result<HofmannBound> {
    let f_1 = average_state_fidelity(chi, first)?;
    let f_2 = average_state_fidelity(chi, second)?;
    Ok(HofmannBound {
        f_h: f_1 + f_2 - 1.0,
        f_1,
        f_2,
    })
}

/// `Tr[χ] / 4`.
pub fn average_success_probability(chi: &ProcessMatrix) -> f64 {
    chi.trace() / 4.0
}

/// `¼ Σ_k p_k` over a probe basis; equal to [`average_success_probability`]
/// for every orthonormal basis.
pub fn basis_success_probability(chi: &ProcessMatrix, basis: &ProbeBasis) -> Result<f64> {
    let mut sum = 0.0;
    for psi in basis.states() {
        sum += state_fidelity_and_probability(chi, psi)?.p;
    }
    Ok(sum / 4.0)
}

/// `|<v|u>|² / <u|u>` for the eigenvector `v` of the largest eigenvalue of
/// `chi` and a Choi vector `u`.
pub fn dominant_overlap(chi: &ProcessMatrix, u: &[C64; 16]) -> Result<f64> {
    let eig = eigendecompose_hermitian(chi.matrix())?;
    let v = eig.vector(15);
    let inner: C64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
    let norm: f64 = u.iter().map(|x| x.norm_sqr()).sum();
    Ok(inner.norm_sqr() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cz_reference() {
        let cz = chi_cz_reference();
        assert!((cz.trace() - 4.0).abs() < 1e-15);
        assert!((process_fidelity(&cz, &cz).unwrap() - 1.0).abs() < 1e-15);
        let one_one = PureState::basis(4, 3);
        let (out, p) = cz.apply(&one_one.density()).unwrap();
        assert!(out.max_abs_diff(&one_one.density()) < 1e-15);
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(cz.matrix()[(15, 0)], real(-1.0));
        assert_eq!(cz.matrix()[(5, 10)], real(1.0));
    }

    #[test]
    fn identity_versus_cz() {
        let id = ProcessMatrix::identity_process();
        let cz = chi_cz_reference();
        assert!((process_fidelity(&id, &cz).unwrap() - 0.25).abs() < 1e-15);
        assert!((process_fidelity(&id.scaled(0.01), &cz).unwrap() - 0.25).abs() < 1e-15);
        let psi = qubit::one().kron(&qubit::plus());
        let o = state_fidelity_and_probability(&id, &psi).unwrap();
        assert!(o.f.unwrap() < 1e-15);
        assert!((o.p - 1.0).abs() < 1e-15);
        // The average over both bases gives F_1 = F_2 = 1/2.
        let h = hofmann_bound(&id).unwrap();
        assert!((h.f_1 - 0.5).abs() < 1e-15 && (h.f_2 - 0.5).abs() < 1e-15);
        assert!(h.f_h.abs() < 1e-15);
    }

    #[test]
    fn perfect_gate_bound() {
        let h = hofmann_bound(&chi_cz_reference().scaled(0.3)).unwrap();
        assert!((h.f_h - 1.0).abs() < 1e-14);
        assert!((h.f_1 - 1.0).abs() < 1e-14 && (h.f_2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_probability_is_flagged() {
        // Only |00> succeeds.
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = real(1.0);
        let chi = ProcessMatrix::from_transfer(&m).unwrap();
        let o = state_fidelity_and_probability(&chi, &PureState::basis(4, 3)).unwrap();
        assert_eq!(o, StateOutcome { p: 0.0, f: None });
        let zero = ProcessMatrix::zero();
        assert!(matches!(hofmann_bound(&zero), Err(Error::ZeroProbability(_))));
        assert!(matches!(process_fidelity(&zero, &chi), Err(Error::ZeroTrace)));
    }

    #[test]
    fn bases_validate() {
        assert!(ProbeBasis::product("bad", [qubit::zero(), qubit::plus()], [qubit::zero(), qubit::one()]).is_err());
        for b in [ProbeBasis::z_x(), ProbeBasis::x_z()] {
            let sum = b
                .states()
                .iter()
                .fold(ComplexMatrix::zeros(4, 4), |acc, s| &acc + &s.density());
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
        // Every state of one probe basis has overlap 1/4 with every state of the other.
        for a in ProbeBasis::z_x().states() {
            for b in ProbeBasis::x_z().states() {
                assert!((a.inner(b).norm_sqr() - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uhlmann_cases() {
        let cz = chi_cz_reference();
        let id = ProcessMatrix::identity_process();
        let f = choi_state_fidelity(&id, &cz).unwrap();
        assert!((f - 0.25).abs() < 1e-12);
        let mixed = id.add(&cz.scaled(2.0));
        assert!((choi_state_fidelity(&mixed.scaled(7.0), &mixed).unwrap() - 1.0).abs() < 1e-9);
        assert!((choi_state_fidelity(&mixed, &cz).unwrap() - process_fidelity(&mixed, &cz).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn dominant_overlap_picks_largest_component() {
        let id = ProcessMatrix::identity_process();
        let cz = chi_cz_reference();
        let chi = id.scaled(0.9).add(&cz.scaled(0.1));
        let vid = ProcessMatrix::choi_vector(&ComplexMatrix::identity(4)).unwrap();
        let vcz = ProcessMatrix::choi_vector(&cz_unitary()).unwrap();
        assert!(dominant_overlap(&chi, &vid).unwrap() > dominant_overlap(&chi, &vcz).unwrap());
    }
}
