//! Simulated process tomography.
//!
//! Each qubit is prepared in the six eigenstates of Z, X and Y and measured
//! in the same three bases, giving 36 inputs × 9 bases × 4 outcomes = 1296
//! cells. Cell indices are `input = 6 a + b`, `basis = 3 a + b`,
//! `outcome = 2 a + b` with qubit A slow. The expected count of a cell is
//! `scale · Tr[(ψ^T ⊗ Π) χ] = scale · <v|χ|v>` with `v = ψ* ⊗ π`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::ProcessMatrix;
use crate::qmath::{eigendecompose_hermitian, qubit, real, tensor_vec, ComplexMatrix, PureState, C64};

pub const N_INPUTS: usize = 36;
pub const N_BASES: usize = 9;
pub const N_OUTCOMES: usize = 4;
pub const N_CELLS: usize = N_INPUTS * N_BASES * N_OUTCOMES;

/// `Σ_cells |v><v| = FRAME_WEIGHT · I`: each of the four qubit factors
/// contributes 3.
const FRAME_WEIGHT: f64 = 81.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographySettings {
    /// Expected counts per unit rate.
    pub counts_scale: f64,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the log-likelihood per count improves by less than this.
    pub tolerance: f64,
}

impl TomographySettings {
    pub fn new(counts_scale: f64, seed: u64) -> Self {
        Self {
            counts_scale,
            seed,
            max_iterations: 100_000,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub input_idx: usize,
    pub basis_idx: usize,
    pub outcome_idx: usize,
    pub count: u64,
}

impl CountRecord {
    pub fn cell(&self) -> Result<usize> {
        if self.input_idx >= N_INPUTS || self.basis_idx >= N_BASES || self.outcome_idx >= N_OUTCOMES {
            return Err(Error::Format(format!(
                "cell ({}, {}, {}) out of range",
                self.input_idx, self.basis_idx, self.outcome_idx
            )));
        }
        Ok(cell_index(self.input_idx, self.basis_idx, self.outcome_idx))
    }
}

pub fn cell_index(input: usize, basis: usize, outcome: usize) -> usize {
    (input * N_BASES + basis) * N_OUTCOMES + outcome
}

/// `|0>, |1>, |+>, |−>, |r>, |l>`.
pub fn probe_states() -> [PureState; 6] {
    [
        qubit::zero(),
        qubit::one(),
        qubit::plus(),
        qubit::minus(),
        qubit::right(),
        qubit::left(),
    ]
}

/// Z, X and Y bases.
pub fn measurement_bases() -> [[PureState; 2]; 3] {
    [
        [qubit::zero(), qubit::one()],
        [qubit::plus(), qubit::minus()],
        [qubit::right(), qubit::left()],
    ]
}

pub fn input_state(input_idx: usize) -> PureState {
    let s = probe_states();
    s[input_idx / 6].kron(&s[input_idx % 6])
}

pub fn outcome_state(basis_idx: usize, outcome_idx: usize) -> PureState {
    let b = measurement_bases();
    b[basis_idx / 3][outcome_idx / 2].kron(&b[basis_idx % 3][outcome_idx % 2])
}

fn measurement_vectors() -> Vec<[C64; 16]> {
    let mut out = Vec::with_capacity(N_CELLS);
    for input in 0..N_INPUTS {
        let psi = input_state(input).conj();
        for basis in 0..N_BASES {
            for outcome in 0..N_OUTCOMES {
                let v = tensor_vec(psi.amplitudes(), outcome_state(basis, outcome).amplitudes());
                out.push(v.try_into().unwrap());
            }
        }
    }
    out
}

fn quadratic_form(m: &ComplexMatrix, v: &[C64; 16]) -> f64 {
    let data = m.as_slice();
    let mut acc = real(0.0);
    for i in 0..16 {
        let row = &data[16 * i..16 * i + 16];
        let mv: C64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        acc += v[i].conj() * mv;
    }
    acc.re
}

fn rates_for(m: &ComplexMatrix, vectors: &[[C64; 16]]) -> Vec<f64> {
    vectors.iter().map(|v| quadratic_form(m, v).max(0.0)).collect()
}

/// `Σ_i w_i |v_i><v_i|`.
fn weighted_frame(weights: &[f64], vectors: &[[C64; 16]]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(16, 16);
    for (w, v) in weights.iter().zip(vectors) {
        if *w == 0.0 {
            continue;
        }
        for i in 0..16 {
            let wi = v[i] * *w;
            for j in 0..16 {
                m[(i, j)] += wi * v[j].conj();
            }
        }
    }
    m
}

/// Outcome rates in cell order; each block of four outcomes sums to the
/// success probability of its input.
pub fn expected_rates(chi: &ProcessMatrix) -> Vec<f64> {
    rates_for(chi.matrix(), &measurement_vectors())
}

/// Independent Poisson draws with means `rate × scale`, reproducible per seed.
pub fn simulate_counts(rates: &[f64], scale: f64, seed: u64) -> Result<Vec<CountRecord>> {
    check_rates(rates, scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(N_CELLS);
    for (cell, &rate) in rates.iter().enumerate() {
        let mean = rate * scale;
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(&mut rng) as u64
        } else {
            0
        };
        out.push(record(cell, count));
    }
    Ok(out)
}

/// Expected counts rounded to integers.
pub fn noiseless_counts(rates: &[f64], scale: f64) -> Result<Vec<CountRecord>> {
    check_rates(rates, scale)?;
    Ok(rates
        .iter()
        .enumerate()
        .map(|(cell, r)| record(cell, (r * scale).round() as u64))
        .collect())
}

fn check_rates(rates: &[f64], scale: f64) -> Result<()> {
    if rates.len() != N_CELLS {
        return Err(Error::dims(N_CELLS, rates.len()));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "counts scale {scale} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn record(cell: usize, count: u64) -> CountRecord {
    CountRecord {
        input_idx: cell / (N_BASES * N_OUTCOMES),
        basis_idx: (cell / N_OUTCOMES) % N_BASES,
        outcome_idx: cell % N_OUTCOMES,
        count,
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Estimate in the units of the model χ (counts divided by the scale).
    pub chi: ProcessMatrix,
    pub iterations: usize,
    /// Per-count log-likelihood after initialization and after each step.
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
}

impl Reconstruction {
    /// Normalized to `Tr[χ] = 4`.
    pub fn normalized(&self) -> Result<ProcessMatrix> {
        self.chi.normalized_to(4.0)
    }
}

/// Maximum-likelihood Choi matrix for the given count records.
pub fn mle_reconstruct(counts: &[CountRecord], settings: &TomographySettings) -> Result<Reconstruction> {
    let mut n = vec![0.0; N_CELLS];
    for c in counts {
        n[c.cell()?] += c.count as f64;
    }
    reconstruct_from_frequencies(&n, settings)
}

/// Maximum-likelihood estimate from (possibly non-integer) cell counts.
///
/// Diluted `RρR` iteration `χ -> A χ A†`, `A = I + ε (R − I)` with
/// `R = Σ (n_i/μ_i) |v_i><v_i| / 81`; `ε` is halved until the likelihood
/// does not decrease, so the likelihood is monotone and `χ` stays positive.
pub fn reconstruct_from_frequencies(n: &[f64], settings: &TomographySettings) -> Result<Reconstruction> {
    if n.len() != N_CELLS {
        return Err(Error::dims(N_CELLS, n.len()));
    }
    let total: f64 = n.iter().sum();
    if total <= 0.0 {
        return Err(Error::NoCounts);
    }
    if settings.counts_scale.is_nan() || settings.counts_scale <= 0.0 {
        return Err(Error::InvalidParameter("counts scale must be positive".into()));
    }
    let vectors = measurement_vectors();
    let log_likelihood = |mu: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (ni, mi) in n.iter().zip(mu) {
            if *ni > 0.0 {
                acc += ni * mi.max(f64::MIN_POSITIVE).ln();
            }
            acc -= mi;
        }
        acc / total
    };

    let mut chi = initial_estimate(n, &vectors, total)?;
    let mut mu = rates_for(&chi, &vectors);
    let mut ll = log_likelihood(&mu);
    let mut history = vec![ll];
    let identity = ComplexMatrix::identity(16);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iterations {
        iterations += 1;
        let w: Vec<f64> = n
            .iter()
            .zip(&mu)
            .map(|(ni, mi)| if *ni > 0.0 { ni / mi.max(f64::MIN_POSITIVE) } else { 0.0 })
            .collect();
        let step = &weighted_frame(&w, &vectors).scale_real(1.0 / FRAME_WEIGHT) - &identity;
        let mut eps = 1.0;
        let accepted = loop {
            let a = &identity + &step.scale_real(eps);
            let candidate = a.matmul(&chi)?.matmul(&a.adjoint())?.hermitian_part();
            let cand_mu = rates_for(&candidate, &vectors);
            let cand_ll = log_likelihood(&cand_mu);
            if cand_ll >= ll {
                break Some((candidate, cand_mu, cand_ll));
            }
            eps *= 0.5;
            if eps < 1e-12 {
                break None;
            }
        };
        let Some((candidate, cand_mu, cand_ll)) = accepted else {
            converged = true;
            break;
        };
        let gain = cand_ll - ll;
        chi = candidate;
        mu = cand_mu;
        ll = cand_ll;
        history.push(ll);
        if gain < settings.tolerance {
            converged = true;
            break;
        }
    }
    Ok(Reconstruction {
        chi: ProcessMatrix::new(chi.scale_real(1.0 / settings.counts_scale))?,
        iterations,
        log_likelihood: history,
        converged,
    })
}

/// Linear inversion projected onto positive operators, lightly mixed with
/// the identity so every rate starts positive, and scaled to the total count.
fn initial_estimate(n: &[f64], vectors: &[[C64; 16]], total: f64) -> Result<ComplexMatrix> {
    let mut m = weighted_frame(n, vectors);
    for k in 0..4 {
        m = remove_qubit_trace(&m, k);
    }
    let eig = eigendecompose_hermitian(&m.hermitian_part())?;
    let mut x = eig.map(|v| v.max(0.0));
    let tr = x.trace().re;
    x = if tr > 0.0 {
        let mix = 1e-6;
        &x.scale_real(1.0 - mix) + &ComplexMatrix::identity(16).scale_real(mix * tr / 16.0)
    } else {
        ComplexMatrix::identity(16)
    };
    let scale = total / (FRAME_WEIGHT * x.trace().re);
    Ok(x.scale_real(scale))
}

/// Inverts the single-qubit frame map `Y -> Y + Tr[Y] I` on qubit `k` of
/// four: `Y - Tr_k[Y] ⊗ I / 3`.
fn remove_qubit_trace(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let bit = 1 << (3 - k);
    ComplexMatrix::from_fn(16, 16, |i, j| {
        if (i & bit) != (j & bit) {
            return m[(i, j)];
        }
        let (i0, j0) = (i & !bit, j & !bit);
        let partial = m[(i0, j0)] + m[(i0 | bit, j0 | bit)];
        m[(i, j)] - partial / 3.0
    })
}
