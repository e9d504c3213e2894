//! Small dense complex linear algebra.
//!
//! Index conventions used across the crate:
//!
//! * Two-qubit computational basis is ordered `|00>, |01>, |10>, |11>`; qubit A
//!   is the slow (most significant) index, so `|jk>` sits at `2*j + k`.
//! * Kronecker products put the row index of the left factor on the slow axis:
//!   `(A ⊗ B)[2i+k][2j+l] = A[i][j] * B[k][l]` for 2x2 factors.
//! * Choi (process) matrices live on `input ⊗ output`; the vector index of
//!   `|in>|out>` is `4*in + out`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for structural checks (Hermiticity, unitarity, PSD) on
/// matrices of dimension at most 16.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = real(1.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::dims("rows of equal length", "ragged rows"));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().map(|&x| real(x))).collect())
    }

    /// `|a><b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(real(s))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mat_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::dims(self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                format!("{} rows", self.cols),
                format!("{} rows", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `<u| self |v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        let mv = self.mat_vec(v)?;
        if u.len() != self.rows {
            return Err(Error::dims(self.rows, u.len()));
        }
        Ok(u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        match self.adjoint().matmul(self) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.rows)) <= tol,
            Err(_) => false,
        }
    }

    /// All eigenvalues `>= -tol`. Non-Hermitian input is reported as not PSD.
    pub fn is_psd(&self, tol: f64) -> bool {
        match eigendecompose_hermitian_with_tol(self, tol) {
            Ok(eig) => eig.values.iter().all(|&l| l >= -tol),
            Err(_) => false,
        }
    }

    /// Averages `self` with its adjoint, removing rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on inner-dimension mismatch; use [`ComplexMatrix::matmul`] for a
/// fallible product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{:>9.5}{:+.5}i ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; the row index of `a` is the slow index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Traces out the first (input) two-qubit factor of a 16x16 operator on
/// `input ⊗ output`.
pub fn partial_trace_in(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows != 16 || m.cols != 16 {
        return Err(Error::dims("16x16", format!("{}x{}", m.rows, m.cols)));
    }
    Ok(ComplexMatrix::from_fn(4, 4, |o1, o2| {
        (0..4).map(|i| m[(4 * i + o1, 4 * i + o2)]).sum()
    }))
}

/// Plain transpose in the computational basis (no conjugation).
pub fn transpose_in_computational_basis(m: &ComplexMatrix) -> ComplexMatrix {
    m.transpose()
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `Q f(Λ) Q†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * q[(j, k)].conj() * fv[k]).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }
}

pub fn eigendecompose_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    eigendecompose_hermitian_with_tol(m, DEFAULT_TOL)
}

/// Hermiticity is checked relative to `max(1, ‖m‖_F)`.
pub fn eigendecompose_hermitian_with_tol(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.rows, m.cols)));
    }
    let dev = m.hermitian_deviation();
    if dev > tol * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let q = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let vectors = ComplexMatrix::from_fn(m.rows, m.cols, |i, j| q[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Pure state vector. Post-selected outputs are deliberately left
/// unnormalized; their squared norm is the event probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::new(amplitudes)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amplitudes: s.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); dim];
        a[k] = real(1.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            amplitudes: m.mat_vec(&self.amplitudes)?,
        })
    }
}

/// Single-qubit states used by the probe bases and tomography.
pub mod qubit {
    use super::{c64, real, PureState};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn zero() -> PureState {
        PureState::basis(2, 0)
    }

    pub fn one() -> PureState {
        PureState::basis(2, 1)
    }

    pub fn plus() -> PureState {
        PureState::new(vec![real(FRAC_1_SQRT_2), real(FRAC_1_SQRT_2)]).unwrap()
    }

    pub fn minus() -> PureState {
        PureState::new(vec![real(FRAC_1_SQRT_2), real(-FRAC_1_SQRT_2)]).unwrap()
    }

    /// `(|0> + i|1>)/√2`
    pub fn right() -> PureState {
        PureState::new(vec![real(FRAC_1_SQRT_2), c64(0.0, FRAC_1_SQRT_2)]).unwrap()
    }

    /// `(|0> - i|1>)/√2`
    pub fn left() -> PureState {
        PureState::new(vec![real(FRAC_1_SQRT_2), c64(0.0, -FRAC_1_SQRT_2)]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        (&a + &a.adjoint()).scale_real(0.5)
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[real(1.0), real(-1.0)])
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(ComplexMatrix::new(2, 2, vec![real(1.0); 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let zi = tensor(&pauli_z(), &i2);
        let expected = ComplexMatrix::from_diag(&[real(1.0), real(1.0), real(-1.0), real(-1.0)]);
        assert_eq!(zi, expected);
    }

    #[test]
    fn tensor_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let t = tensor(&a, &b);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            assert_eq!(t[(2 * i + k, 2 * j + l)], a[(i, j)] * b[(k, l)]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_order_convention() {
        // |10> = |1>_A ⊗ |0>_B sits at index 2.
        let s = qubit::one().kron(&qubit::zero());
        assert_eq!(s, PureState::basis(4, 2));
        // Choi vector |in>|out> = |01>|11> sits at 4*1 + 3.
        let v = PureState::basis(4, 1).kron(&PureState::basis(4, 3));
        assert_eq!(v, PureState::basis(16, 7));
    }

    #[test]
    fn partial_trace_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_hermitian(&mut rng, 4);
        let sigma = random_hermitian(&mut rng, 4);
        let pt = partial_trace_in(&tensor(&rho, &sigma)).unwrap();
        assert!(pt.max_abs_diff(&sigma.scale(rho.trace())) < 1e-12);

        let pt = partial_trace_in(&ComplexMatrix::identity(16)).unwrap();
        assert_eq!(pt, ComplexMatrix::identity(4).scale_real(4.0));
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let m = random_hermitian(&mut rng, 16);
            let pt = partial_trace_in(&m).unwrap();
            assert!((pt.trace() - m.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_wrong_shape() {
        assert!(matches!(
            partial_trace_in(&ComplexMatrix::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_cases() {
        let d = ComplexMatrix::from_diag(&[real(1.0), c64(0.0, 2.0)]);
        assert_eq!(transpose_in_computational_basis(&d), d);
        let ket0 = qubit::zero();
        let ket1 = qubit::one();
        let m = ComplexMatrix::outer(ket0.amplitudes(), ket1.amplitudes());
        let mt = ComplexMatrix::outer(ket1.amplitudes(), ket0.amplitudes());
        assert_eq!(transpose_in_computational_basis(&m), mt);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_matrix(&mut rng, 4, 3);
        assert_eq!(r.transpose().transpose(), r);
        // no conjugation
        assert_eq!(r.transpose()[(1, 2)], r[(2, 1)]);
    }

    #[test]
    fn eigen_simple_spectra() {
        let d = ComplexMatrix::from_diag(&[real(3.0), real(1.0), real(4.0), real(2.0)]);
        let e = eigendecompose_hermitian(&d).unwrap();
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((v - want).abs() < 1e-12);
        }
        let e = eigendecompose_hermitian(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let m = random_hermitian(&mut rng, 16);
            let e = eigendecompose_hermitian(&m).unwrap();
            let err = (&e.reconstruct() - &m).frobenius_norm();
            assert!(err <= 1e-10 * m.frobenius_norm(), "reconstruction error {err}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(e.vectors.is_unitary(1e-10));
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eigendecompose_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn structural_predicates() {
        assert!(pauli_x().is_unitary(1e-12));
        assert!(!ComplexMatrix::identity(2).scale_real(2.0).is_unitary(1e-12));
        assert!(qubit::plus().density().is_psd(1e-12));
        assert!(!pauli_z().is_psd(1e-12));
        let nh = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(!nh.is_hermitian(1e-12));
        assert!(!nh.is_psd(1e-12));
    }

    #[test]
    fn qubit_states_orthonormal() {
        let pairs = [
            (qubit::zero(), qubit::one()),
            (qubit::plus(), qubit::minus()),
            (qubit::right(), qubit::left()),
        ];
        for (a, b) in pairs {
            assert!(a.is_normalized(1e-15) && b.is_normalized(1e-15));
            assert!(a.inner(&b).norm() < 1e-15);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat(n: usize) -> impl Strategy<Value = ComplexMatrix> {
            proptest::collection::vec((-3i32..4, -3i32..4), n * n).prop_map(move |v| {
                ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c64(a as f64, b as f64)).collect()).unwrap()
            })
        }

        proptest! {
            // Small integer entries keep the products exact in f64.
            #[test]
            fn tensor_is_associative(a in mat(2), b in mat(2), c in mat(2)) {
                prop_assert_eq!(tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
            }

            #[test]
            fn hermitian_eigenvalues_are_real(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = random_hermitian(&mut rng, 8);
                let e = eigendecompose_hermitian(&m).unwrap();
                // Residual ‖Mv − λv‖ confirms the real spectrum.
                for k in 0..8 {
                    let v = e.vector(k);
                    let mv = m.mat_vec(&v).unwrap();
                    let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - b * e.values[k]).norm_sqr()).sum();
                    prop_assert!(res.sqrt() < 1e-10);
                }
            }
        }
    }
}
