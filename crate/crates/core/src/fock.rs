//! Brute-force two-photon simulation of the bypass networks.
//!
//! A network is a unitary `U` on mode creation operators: a photon entering
//! mode `p` leaves in `Σ_m U[m][p] |m>`. Polarization rails are separate
//! modes, absorbing elements couple into dedicated loss modes, so every
//! setup is a single linear network followed by coincidence post-selection.

use crate::error::{Error, Result};
use crate::model::{ChiComponents, SetupParams};
use crate::optical::{central_coupling, Coupling, OpticalSchemeParams};
use crate::process::ProcessMatrix;
use crate::qmath::{real, ComplexMatrix, C64, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct ModeNetwork {
    labels: Vec<&'static str>,
    unitary: ComplexMatrix,
}

impl ModeNetwork {
    pub fn builder(labels: &[&'static str]) -> NetworkBuilder {
        NetworkBuilder {
            labels: labels.to_vec(),
            unitary: ComplexMatrix::identity(labels.len()),
        }
    }

    pub fn from_unitary(labels: &[&'static str], unitary: ComplexMatrix) -> Result<Self> {
        if unitary.rows() != labels.len() || unitary.cols() != labels.len() {
            return Err(Error::dims(labels.len(), unitary.rows()));
        }
        if !unitary.is_unitary(DEFAULT_TOL) {
            return Err(Error::InvalidParameter("mode transformation is not unitary".into()));
        }
        Ok(Self {
            labels: labels.to_vec(),
            unitary,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn labels(&self) -> &[&'static str] {
        &self.labels
    }

    pub fn mode(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }
}

pub struct NetworkBuilder {
    labels: Vec<&'static str>,
    unitary: ComplexMatrix,
}

impl NetworkBuilder {
    fn index(&self, label: &str) -> usize {
        self.labels
            .iter()
            .position(|l| *l == label)
            .unwrap_or_else(|| panic!("unknown mode `{label}`"))
    }

    /// Appends a real coupler: a photon in `a` goes to `t a + r b`, one in
    /// `b` to `t b − r a`.
    pub fn coupler(mut self, a: &str, b: &str, c: Coupling) -> Self {
        let (ia, ib) = (self.index(a), self.index(b));
        let mut m = ComplexMatrix::identity(self.labels.len());
        m[(ia, ia)] = real(c.t);
        m[(ib, ia)] = real(c.r);
        m[(ia, ib)] = real(-c.r);
        m[(ib, ib)] = real(c.t);
        self.unitary = m.matmul(&self.unitary).unwrap();
        self
    }

    /// Partial absorption of mode `a`: amplitude transmittance `t ∈ [-1, 1]`,
    /// the rest goes to the loss mode.
    pub fn attenuate(self, a: &str, loss: &str, t: f64) -> Self {
        let r = (1.0 - t * t).max(0.0).sqrt();
        self.coupler(a, loss, Coupling { t, r })
    }

    pub fn swap(mut self, a: &str, b: &str) -> Self {
        let (ia, ib) = (self.index(a), self.index(b));
        let n = self.labels.len();
        let p = ComplexMatrix::from_fn(n, n, |i, j| {
            let src = if i == ia {
                ib
            } else if i == ib {
                ia
            } else {
                i
            };
            real(if j == src { 1.0 } else { 0.0 })
        });
        self.unitary = p.matmul(&self.unitary).unwrap();
        self
    }

    pub fn build(self) -> ModeNetwork {
        ModeNetwork {
            labels: self.labels,
            unitary: self.unitary,
        }
    }
}

/// Symmetric two-photon state: amplitudes on Fock states `|1_m 1_n>` (m < n)
/// and `|2_m>`, stored for `m ≤ n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState {
    n_modes: usize,
    amplitudes: Vec<C64>,
}

fn pair_index(n_modes: usize, m: usize, n: usize) -> usize {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    m * n_modes - m * (m + 1) / 2 + n
}

impl TwoPhotonState {
    pub fn vacuum_like(n_modes: usize) -> Self {
        Self {
            n_modes,
            amplitudes: vec![real(0.0); n_modes * (n_modes + 1) / 2],
        }
    }

    /// One photon in `m` and one in `n` (both in `m` if equal).
    pub fn pair(n_modes: usize, m: usize, n: usize) -> Self {
        let mut s = Self::vacuum_like(n_modes);
        s.amplitudes[pair_index(n_modes, m, n)] = real(1.0);
        s
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitude(&self, m: usize, n: usize) -> C64 {
        self.amplitudes[pair_index(self.n_modes, m, n)]
    }

    pub fn set_amplitude(&mut self, m: usize, n: usize, c: C64) {
        self.amplitudes[pair_index(self.n_modes, m, n)] = c;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Exact bosonic evolution. With `|pq> = a†_p a†_q |0> / s_pq`
/// (`s = √2` for `p = q`), `a†_p a†_q -> Σ_mn U_mp U_nq a†_m a†_n`.
pub fn evolve_two_photons(net: &ModeNetwork, input: &TwoPhotonState) -> Result<TwoPhotonState> {
    let n = net.n_modes();
    if input.n_modes != n {
        return Err(Error::dims(n, input.n_modes));
    }
    let norm = input.norm_sqr();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let u = &net.unitary;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut out = TwoPhotonState::vacuum_like(n);
    for p in 0..n {
        for q in p..n {
            let c = input.amplitude(p, q);
            if c == real(0.0) {
                continue;
            }
            let c = if p == q { c / sqrt2 } else { c };
            for m in 0..n {
                let idx = pair_index(n, m, m);
                out.amplitudes[idx] += c * u[(m, p)] * u[(m, q)] * sqrt2;
                for k in m + 1..n {
                    let idx = pair_index(n, m, k);
                    out.amplitudes[idx] += c * (u[(m, p)] * u[(k, q)] + u[(k, p)] * u[(m, q)]);
                }
            }
        }
    }
    Ok(out)
}

/// Joint amplitudes `J[m][n]` of two labelled photons evolving independently;
/// `first` and `second` are their single-photon mode amplitudes.
pub fn distinguishable_evolve(net: &ModeNetwork, first: &[C64], second: &[C64]) -> Result<ComplexMatrix> {
    let a = net.unitary.mat_vec(first)?;
    let b = net.unitary.mat_vec(second)?;
    Ok(ComplexMatrix::outer(
        &a,
        &b.iter().map(|x| x.conj()).collect::<Vec<_>>(),
    ))
}

/// Dual-rail encoding of the two qubits: `a[j]`, `b[k]` are the modes of
/// logical `|j>`, `|k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rails {
    pub a: [usize; 2],
    pub b: [usize; 2],
}

/// Conditional 4x4 map (column = input `2j+k`, row = output) from the
/// bosonic outputs for the four logical inputs, keeping one photon per qubit.
pub fn postselect_coincidence(outputs: &[TwoPhotonState; 4], out: Rails) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |row, col| outputs[col].amplitude(out.a[row / 2], out.b[row % 2]))
}

/// The two distinguishable-photon branches of a coincidence: photon A ends in
/// qubit A's rails and B in B's (`transmitted`), or the two swap sides
/// (`reflected`).
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledCoincidence {
    pub transmitted: ComplexMatrix,
    pub reflected: ComplexMatrix,
}

pub fn postselect_labelled(joints: &[ComplexMatrix; 4], out: Rails) -> LabelledCoincidence {
    let (a, b) = (out.a, out.b);
    LabelledCoincidence {
        transmitted: ComplexMatrix::from_fn(4, 4, |row, col| joints[col][(a[row / 2], b[row % 2])]),
        reflected: ComplexMatrix::from_fn(4, 4, |row, col| joints[col][(b[row % 2], a[row / 2])]),
    }
}

fn unit(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![real(0.0); n];
    v[k] = real(1.0);
    v
}

/// Bosonic coincidence map of a network for the given input/output rails.
pub fn conditional_gate(net: &ModeNetwork, input: Rails, output: Rails) -> Result<ComplexMatrix> {
    let n = net.n_modes();
    let mut outs = Vec::with_capacity(4);
    for j in 0..2 {
        for k in 0..2 {
            let state = TwoPhotonState::pair(n, input.a[j], input.b[k]);
            outs.push(evolve_two_photons(net, &state)?);
        }
    }
    let outs: [TwoPhotonState; 4] = outs.try_into().unwrap();
    Ok(postselect_coincidence(&outs, output))
}

/// Labelled-photon coincidence maps of a network.
pub fn labelled_gate(net: &ModeNetwork, input: Rails, output: Rails) -> Result<LabelledCoincidence> {
    let n = net.n_modes();
    let mut joints = Vec::with_capacity(4);
    for j in 0..2 {
        for k in 0..2 {
            joints.push(distinguishable_evolve(net, &unit(n, input.a[j]), &unit(n, input.b[k]))?);
        }
    }
    let joints: [ComplexMatrix; 4] = joints.try_into().unwrap();
    Ok(postselect_labelled(&joints, output))
}

const IDEAL_MODES: [&str; 7] = ["A0", "A1", "B0", "B1", "C", "lossA", "lossB"];

/// Single-PPBS bypass network: coupling X diverts `A1` into `C`, the central
/// coupling mixes `A1` with `B1`, coupling Y recombines `C` into `A1`, and
/// `A0`, `B0` are attenuated.
pub fn ideal_scheme_network(p: &OpticalSchemeParams) -> (ModeNetwork, Rails) {
    let net = ModeNetwork::builder(&IDEAL_MODES)
        .coupler("A1", "C", p.bypass_in)
        .coupler("A1", "B1", p.central())
        .coupler("C", "A1", p.bypass_out)
        .attenuate("A0", "lossA", p.filter_a)
        .attenuate("B0", "lossB", p.filter_b)
        .build();
    let rails = Rails { a: [0, 1], b: [2, 3] };
    (net, rails)
}

const SETUP_MODES: [&str; 9] = [
    "A0",
    "A1",
    "C",
    "B0",
    "B1",
    "lossA_pp",
    "lossA_hwp",
    "lossB_v",
    "lossB_h",
];

/// Polarization-resolved network of the experimental setup. Qubit A's `|0>`
/// rail and the bypass `C` are horizontally polarized, so both see the
/// parasitic reflectance `R_H` of the central coupler; `C` leaks into `B0`.
/// Qubit B's rails are exchanged by a half-wave plate before the `B`-side
/// coupler, which attenuates `|0>` by `t` and `|1>` by `t_H`.
pub fn setup_network(p: &SetupParams) -> (ModeNetwork, Rails, Rails) {
    let a = p.amplitudes();
    let v = central_coupling(p.reflectance);
    let h = Coupling { t: a.t_h, r: a.r_h };
    let net = ModeNetwork::builder(&SETUP_MODES)
        .coupler("A1", "C", a.x)
        .coupler("A1", "B1", v)
        .coupler("C", "B0", h)
        .coupler("A0", "lossA_pp", h)
        .coupler("C", "A1", a.y)
        .coupler("A0", "lossA_hwp", a.a)
        .swap("B0", "B1")
        .coupler("B1", "lossB_v", v)
        .coupler("B0", "lossB_h", h)
        .build();
    let input = Rails { a: [0, 1], b: [3, 4] };
    let output = Rails { a: [0, 1], b: [4, 3] };
    (net, input, output)
}

/// Independent reconstruction of the three Choi components of the setup.
pub fn oracle_components(p: &SetupParams) -> Result<ChiComponents> {
    let (net, input, output) = setup_network(p);
    let bosonic = conditional_gate(&net, input, output)?;
    let labelled = labelled_gate(&net, input, output)?;
    Ok(ChiComponents {
        indistinguishable: ProcessMatrix::from_transfer(&bosonic)?,
        transmitted: ProcessMatrix::from_transfer(&labelled.transmitted)?,
        reflected: ProcessMatrix::from_transfer(&labelled.reflected)?,
    })
}

pub fn oracle_process_matrix(p: &SetupParams) -> Result<ProcessMatrix> {
    Ok(oracle_components(p)?.mix(p.q()))
}
