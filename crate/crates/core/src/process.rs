//! Choi matrices of (possibly probabilistic) two-qubit operations.

use crate::error::{Error, Result};
use crate::qmath::{partial_trace_in, real, tensor, ComplexMatrix, PureState, C64, DEFAULT_TOL};

/// 16x16 positive operator on `input ⊗ output`. Not trace-normalized:
/// `Tr[χ]/4` is the average success probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix(ComplexMatrix);

impl ProcessMatrix {
    /// Checks shape and Hermiticity; positivity is the caller's contract
    /// (see [`ProcessMatrix::is_psd`]).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 16 || m.cols() != 16 {
            return Err(Error::dims("16x16", format!("{}x{}", m.rows(), m.cols())));
        }
        let dev = m.hermitian_deviation();
        if dev > DEFAULT_TOL * m.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(m))
    }

    /// Rank-one `|v><v|` from a Choi vector indexed `4*in + out`.
    pub fn from_choi_vector(v: &[C64; 16]) -> Self {
        Self(ComplexMatrix::outer(v, v))
    }

    /// Choi vector `Σ_in |in> ⊗ M|in>` of a 4x4 conditional transformation.
    pub fn choi_vector(transfer: &ComplexMatrix) -> Result<[C64; 16]> {
        if transfer.rows() != 4 || transfer.cols() != 4 {
            return Err(Error::dims("4x4", format!("{}x{}", transfer.rows(), transfer.cols())));
        }
        let mut v = [real(0.0); 16];
        for input in 0..4 {
            for output in 0..4 {
                v[4 * input + output] = transfer[(output, input)];
            }
        }
        Ok(v)
    }

    pub fn from_transfer(transfer: &ComplexMatrix) -> Result<Self> {
        Ok(Self::from_choi_vector(&Self::choi_vector(transfer)?))
    }

    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_transfer(u)
    }

    pub fn identity_process() -> Self {
        Self::from_transfer(&ComplexMatrix::identity(4)).unwrap()
    }

    pub fn zero() -> Self {
        Self(ComplexMatrix::zeros(16, 16))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    /// Rescaled so that `Tr[χ] = target`.
    pub fn normalized_to(&self, target: f64) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        Ok(self.scaled(target / tr))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.0.is_psd(tol)
    }

    /// `Tr_in[(ρ_in^T ⊗ I) χ]`; the returned output is unnormalized and its
    /// trace is the success probability.
    pub fn apply(&self, rho_in: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        validate_density(rho_in)?;
        let lifted = tensor(&rho_in.transpose(), &ComplexMatrix::identity(4));
        let out = partial_trace_in(&lifted.matmul(&self.0)?)?;
        let p = out.trace().re;
        Ok((out, p))
    }

    /// `Tr[(ψ^T ⊗ Π) χ]` for a pure input and an output operator `Π`.
    pub fn expectation(&self, input: &PureState, output_op: &ComplexMatrix) -> Result<f64> {
        let op = tensor(&input.density().transpose(), output_op);
        Ok(op.matmul(&self.0)?.trace().re)
    }
}

fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::dims(
            "4x4 density matrix",
            format!("{}x{}", rho.rows(), rho.cols()),
        ));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    if !rho.is_psd(DEFAULT_TOL) {
        return Err(Error::InvalidDensityMatrix("not positive semidefinite".into()));
    }
    Ok(())
}
