//! Ideal interferometric bypass scheme.
//!
//! Qubits are dual-rail photons in modes `A0/A1` and `B0/B1`. The central
//! coupling mixes `A1` and `B1`. Mode `A1` is partly diverted into the bypass
//! mode `C` before the central coupling (coupling X) and recombined after it
//! (coupling Y); `A0` and `B0` are attenuated by filters `t_A`, `t_B`.
//! Post-selecting one photon per qubit gives a diagonal gate with amplitudes
//! `w_jk` (see [`bypass_amplitudes`]).

use crate::error::{Error, Result};
use crate::qmath::{real, ComplexMatrix, DEFAULT_TOL};

/// A real two-mode coupling `a -> t a + r b`, `b -> t b − r a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub t: f64,
    pub r: f64,
}

impl Coupling {
    pub const IDENTITY: Coupling = Coupling { t: 1.0, r: 0.0 };

    /// Non-negative reflection amplitude.
    pub fn from_transmittance(t: f64) -> Self {
        Self {
            t,
            r: (1.0 - t * t).max(0.0).sqrt(),
        }
    }

    /// Half-wave plate rotated by `angle` radians: `t = cos 2φ`, `r = sin 2φ`.
    pub fn from_waveplate(angle: f64) -> Self {
        Self {
            t: (2.0 * angle).cos(),
            r: (2.0 * angle).sin(),
        }
    }

    pub fn waveplate_angle(&self) -> f64 {
        0.5 * self.r.atan2(self.t)
    }
}

/// Coupling of the central beam splitter with intensity reflectance `R`.
pub fn central_coupling(reflectance: f64) -> Coupling {
    Coupling {
        t: (1.0 - reflectance).max(0.0).sqrt(),
        r: reflectance.max(0.0).sqrt(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpticalSchemeParams {
    /// Intensity reflectance `R` of the central coupling.
    pub reflectance: f64,
    /// `A1 -> C` diversion (t_X, r_X).
    pub bypass_in: Coupling,
    /// Recombination (t_Y, r_Y).
    pub bypass_out: Coupling,
    pub filter_a: f64,
    pub filter_b: f64,
}

impl OpticalSchemeParams {
    pub fn new(
        reflectance: f64,
        bypass_in: Coupling,
        bypass_out: Coupling,
        filter_a: f64,
        filter_b: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectance) {
            return Err(Error::InvalidParameter(format!(
                "reflectance {reflectance} outside [0, 1]"
            )));
        }
        for (name, c) in [("X", bypass_in), ("Y", bypass_out)] {
            if (c.t * c.t + c.r * c.r - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::InvalidParameter(format!("coupling {name} is not normalized")));
            }
        }
        for (name, f) in [("A", filter_a), ("B", filter_b)] {
            if !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&f) {
                return Err(Error::InvalidParameter(format!(
                    "filter {name} transmittance {f} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            reflectance,
            bypass_in,
            bypass_out,
            filter_a,
            filter_b,
        })
    }

    /// Bypass off, both filters matched to the central transmission.
    pub fn without_bypass(reflectance: f64) -> Result<Self> {
        let t = central_coupling(reflectance).t;
        Self::new(reflectance, Coupling::IDENTITY, Coupling::IDENTITY, t, t)
    }

    pub fn central(&self) -> Coupling {
        central_coupling(self.reflectance)
    }
}

/// Heisenberg-picture coupling matrix acting on `(a, b)`:
/// `a_out = t a − r b`, `b_out = t b + r a`.
pub fn beam_splitter_heisenberg(t: f64) -> ComplexMatrix {
    let r = (1.0 - t * t).max(0.0).sqrt();
    ComplexMatrix::new(2, 2, vec![real(t), real(-r), real(r), real(t)]).unwrap()
}

/// Amplitudes in basis order `|00>, |01>, |10>, |11>`.
pub type Amplitudes = [f64; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoBypassAmplitudes {
    /// Bare central coupling: `(1, t, t, t² − r²)`.
    pub bare: Amplitudes,
    /// With matched filters: `(T, T, T, 1 − 2R)`.
    pub filtered: Amplitudes,
}

pub fn coincidence_amplitudes_no_bypass(reflectance: f64) -> Result<NoBypassAmplitudes> {
    if !(0.0..=1.0).contains(&reflectance) {
        return Err(Error::InvalidParameter(format!(
            "reflectance {reflectance} outside [0, 1]"
        )));
    }
    let Coupling { t, r } = central_coupling(reflectance);
    let tt = t * t;
    Ok(NoBypassAmplitudes {
        bare: [1.0, t, t, tt - r * r],
        filtered: [tt, tt, tt, 1.0 - 2.0 * reflectance],
    })
}

/// Conditional amplitudes `w_jk` of the bypass scheme.
pub fn bypass_amplitudes(p: &OpticalSchemeParams) -> Amplitudes {
    let t = p.central().t;
    let (tx, rx) = (p.bypass_in.t, p.bypass_in.r);
    let (ty, ry) = (p.bypass_out.t, p.bypass_out.r);
    [
        p.filter_a * p.filter_b,
        p.filter_a * t,
        (t * tx * ty + rx * ry) * p.filter_b,
        (2.0 * t * t - 1.0) * tx * ty + t * rx * ry,
    ]
}

/// Couplings that turn the scheme into a CZ gate for a given `t_X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzSolution {
    pub bypass_in: Coupling,
    pub bypass_out: Coupling,
    pub filter_a: f64,
    pub filter_b: f64,
}

impl CzSolution {
    pub fn scheme(&self, reflectance: f64) -> Result<OpticalSchemeParams> {
        OpticalSchemeParams::new(
            reflectance,
            self.bypass_in,
            self.bypass_out,
            self.filter_a,
            self.filter_b,
        )
    }
}

fn check_reflectance_open(reflectance: f64) -> Result<()> {
    if !(reflectance > 0.0 && reflectance < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "central reflectance must lie in (0, 1), got {reflectance}"
        )));
    }
    Ok(())
}

/// `t_X` intervals in `(0, 1)` for which the CZ conditions are solvable.
/// Outside them the filter `t_A` would have to exceed 1.
pub fn feasible_bypass_range(reflectance: f64) -> Result<Vec<(f64, f64)>> {
    check_reflectance_open(reflectance)?;
    let t = central_coupling(reflectance).t;
    let k = (3.0 * reflectance - 2.0) / (2.0 * t);
    if k.abs() < 1e-12 {
        return Ok(vec![(0.0, 1.0)]);
    }
    // t_A = R t_X t_Y / (2t) ≤ 1 with t_Y² = r_X² / (r_X² + k² t_X²); in
    // u = t_X²: u² − u(1 + s − s k²) + s ≥ 0 with s = (2t/R)².
    let s = (2.0 * t / reflectance).powi(2);
    let b = 1.0 + s - s * k * k;
    let disc = b * b - 4.0 * s;
    if disc <= 0.0 {
        return Ok(vec![(0.0, 1.0)]);
    }
    let (u1, u2) = ((b - disc.sqrt()) / 2.0, (b + disc.sqrt()) / 2.0);
    let (lo, hi) = (u1.clamp(0.0, 1.0).sqrt(), u2.clamp(0.0, 1.0).sqrt());
    Ok([(0.0, lo), (hi, 1.0)].into_iter().filter(|(a, b)| b > a).collect())
}

fn describe_ranges(ranges: &[(f64, f64)]) -> String {
    if ranges.is_empty() {
        return "none".into();
    }
    ranges
        .iter()
        .map(|(a, b)| format!("({a:.6}, {b:.6})"))
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

/// Solves `w_00 = w_01 = w_10 = −w_11` for `t_Y, t_A, t_B` at fixed `t_X`.
///
/// Sign convention: `t_X, t_Y, r_X ≥ 0`; `r_Y` carries the sign of `3R − 2`.
/// At `R = 2/3` any `t_Y` works and `t_Y = 1` is returned.
pub fn solve_cz_conditions(reflectance: f64, t_x: f64) -> Result<CzSolution> {
    check_reflectance_open(reflectance)?;
    let t = central_coupling(reflectance).t;
    let k = (3.0 * reflectance - 2.0) / (2.0 * t);
    let infeasible = |why: String| -> Error {
        let ranges = feasible_bypass_range(reflectance).unwrap_or_default();
        Error::Infeasible(format!(
            "{why}; feasible t_X range for R = {reflectance}: {}",
            describe_ranges(&ranges)
        ))
    };
    if !(t_x > DEFAULT_TOL && t_x <= 1.0) {
        return Err(infeasible(format!("t_X = {t_x} outside (0, 1]")));
    }
    let bypass_in = Coupling::from_transmittance(t_x);
    let bypass_out = if k.abs() < 1e-12 {
        Coupling::IDENTITY
    } else {
        if bypass_in.r <= 1e-12 {
            return Err(infeasible(format!("t_X = {t_x} leaves no bypass but R ≠ 2/3")));
        }
        // r_Y / t_Y = k t_X / r_X
        let ratio = k * t_x / bypass_in.r;
        let ty = 1.0 / (1.0 + ratio * ratio).sqrt();
        Coupling { t: ty, r: ratio * ty }
    };
    let filter_a = t * bypass_in.t * bypass_out.t + bypass_in.r * bypass_out.r;
    if filter_a > 1.0 + DEFAULT_TOL {
        return Err(infeasible(format!(
            "required filter transmittance t_A = {filter_a} exceeds 1"
        )));
    }
    Ok(CzSolution {
        bypass_in,
        bypass_out,
        filter_a: filter_a.min(1.0),
        filter_b: t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalBypass {
    pub t_x: f64,
    pub t_y: f64,
    pub p_success: f64,
}

impl OptimalBypass {
    /// Full scheme at the optimum, with couplings from [`solve_cz_conditions`].
    pub fn scheme(&self, reflectance: f64) -> Result<OpticalSchemeParams> {
        solve_cz_conditions(reflectance, self.t_x)?.scheme(reflectance)
    }
}

/// `t_X² = t_Y² = 2t / (2t + |3R − 2|)`, `P_S = R² t_X² t_Y² / 4`.
pub fn optimal_bypass(reflectance: f64) -> Result<OptimalBypass> {
    check_reflectance_open(reflectance)?;
    let t = central_coupling(reflectance).t;
    let tx2 = 2.0 * t / (2.0 * t + (3.0 * reflectance - 2.0).abs());
    Ok(OptimalBypass {
        t_x: tx2.sqrt(),
        t_y: tx2.sqrt(),
        p_success: reflectance * reflectance * tx2 * tx2 / 4.0,
    })
}

/// Ideal success probability `R² t_X² t_Y² / 4` of a CZ solution.
pub fn cz_success_probability(reflectance: f64, solution: &CzSolution) -> f64 {
    (reflectance * solution.bypass_in.t * solution.bypass_out.t).powi(2) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_amps(got: Amplitudes, want: Amplitudes, tol: f64) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "got {got:?}, want {want:?}");
        }
    }

    fn is_cz(w: Amplitudes, tol: f64) -> bool {
        (w[0] - w[1]).abs() < tol && (w[0] - w[2]).abs() < tol && (w[0] + w[3]).abs() < tol
    }

    #[test]
    fn beam_splitter_cases() {
        assert_eq!(beam_splitter_heisenberg(1.0), ComplexMatrix::identity(2));
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(beam_splitter_heisenberg(0.0), swap);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let m = beam_splitter_heisenberg(rng.random_range(0.0..1.0));
            let mtm = m.transpose().matmul(&m).unwrap();
            assert!(mtm.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn no_bypass_amplitudes() {
        let a = coincidence_amplitudes_no_bypass(2.0 / 3.0).unwrap();
        assert_amps(a.filtered, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0], 1e-15);
        let a = coincidence_amplitudes_no_bypass(0.0).unwrap();
        assert_eq!(a.bare, [1.0; 4]);
        let a = coincidence_amplitudes_no_bypass(0.5).unwrap();
        assert_eq!(a.filtered[3], 0.0);
        assert!(coincidence_amplitudes_no_bypass(1.5).is_err());
    }

    #[test]
    fn bypass_off_reduces_to_filtered_scheme() {
        let p = OpticalSchemeParams::without_bypass(1.0 / 3.0).unwrap();
        assert_amps(
            bypass_amplitudes(&p),
            [2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0],
            1e-15,
        );
        for k in 0..=20 {
            let r = k as f64 / 20.0;
            let p = OpticalSchemeParams::without_bypass(r).unwrap();
            assert_amps(
                bypass_amplitudes(&p),
                coincidence_amplitudes_no_bypass(r).unwrap().filtered,
                1e-14,
            );
        }
    }

    #[test]
    fn full_bypass_literal() {
        let p = OpticalSchemeParams::new(
            0.3,
            Coupling { t: 0.0, r: 1.0 },
            Coupling::from_waveplate(0.3),
            0.5,
            0.7,
        )
        .unwrap();
        let w = bypass_amplitudes(&p);
        let t = p.central().t;
        let ry = p.bypass_out.r;
        assert!((w[2] - ry * 0.7).abs() < 1e-15);
        assert!((w[3] - t * ry).abs() < 1e-15);
    }

    #[test]
    fn degenerate_reflectance_keeps_full_recombination() {
        let s = solve_cz_conditions(2.0 / 3.0, 0.8).unwrap();
        let t = central_coupling(2.0 / 3.0).t;
        assert_eq!(s.bypass_out, Coupling::IDENTITY);
        assert!((s.filter_a - t * 0.8).abs() < 1e-15);
        assert_eq!(s.filter_b, t);
        assert!(is_cz(bypass_amplitudes(&s.scheme(2.0 / 3.0).unwrap()), 1e-12));
    }

    #[test]
    fn solutions_are_cz() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut checked = 0;
        while checked < 200 {
            let r = rng.random_range(0.01..0.99);
            let tx = rng.random_range(0.01..0.999);
            match solve_cz_conditions(r, tx) {
                Ok(s) => {
                    let w = bypass_amplitudes(&s.scheme(r).unwrap());
                    assert!(is_cz(w, 1e-9), "R={r} tX={tx}: {w:?}");
                    assert!(w[0] > 0.0);
                    if r < 2.0 / 3.0 {
                        assert!(s.bypass_out.r < 0.0);
                    }
                    checked += 1;
                }
                Err(Error::Infeasible(_)) => {
                    let ranges = feasible_bypass_range(r).unwrap();
                    assert!(!ranges.iter().any(|&(a, b)| tx > a + 1e-9 && tx < b - 1e-9));
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn optimum_at_weak_coupling() {
        let o = optimal_bypass(1.0 / 3.0).unwrap();
        let t = (2.0f64 / 3.0).sqrt();
        assert!((o.t_x * o.t_x - 2.0 * t / (2.0 * t + 1.0)).abs() < 1e-15);
        assert!((o.t_x * o.t_x - 0.6202041028867288).abs() < 1e-12);
        assert!((o.p_success - 0.010684809145487001).abs() < 1e-15);
        let w = bypass_amplitudes(&o.scheme(1.0 / 3.0).unwrap());
        assert!(is_cz(w, 1e-12));
        assert!((w[0].abs() - w[3].abs()).abs() < 1e-12 && w[3] < 0.0);
    }

    #[test]
    fn optimum_at_standard_reflectance() {
        let o = optimal_bypass(2.0 / 3.0).unwrap();
        assert!((o.t_x - 1.0).abs() < 1e-15 && (o.t_y - 1.0).abs() < 1e-15);
        assert!((o.p_success - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn optimum_probability_is_filtered_weight() {
        for k in 1..100 {
            let r = k as f64 / 100.0;
            let o = optimal_bypass(r).unwrap();
            let w = bypass_amplitudes(&o.scheme(r).unwrap());
            assert!((o.p_success - w[0] * w[0]).abs() < DEFAULT_TOL, "R={r}");
        }
        assert!(optimal_bypass(1e-9).unwrap().p_success < 1e-16);
    }

    #[test]
    fn infeasible_without_bypass_off_standard_point() {
        let err = solve_cz_conditions(1.0 / 3.0, 1.0).unwrap_err();
        match err {
            Error::Infeasible(msg) => assert!(msg.contains("feasible t_X range")),
            e => panic!("unexpected {e}"),
        }
        assert!(solve_cz_conditions(1.0 / 3.0, 0.0).is_err());
        assert!(solve_cz_conditions(0.0, 0.5).is_err());
    }

    #[test]
    fn filter_never_needs_gain() {
        // The required attenuation stays below 1 over the whole (R, t_X) square.
        for i in 1..200 {
            let r = i as f64 / 200.0;
            assert_eq!(feasible_bypass_range(r).unwrap(), vec![(0.0, 1.0)], "R={r}");
            for j in 1..100 {
                let s = solve_cz_conditions(r, j as f64 / 100.0).unwrap();
                assert!(s.filter_a < 0.99, "R={r}");
            }
        }
    }

    #[test]
    fn waveplate_mapping_round_trip() {
        for deg in [-40.0f64, -18.0, 0.0, 20.0, 44.0] {
            let a = deg.to_radians();
            let c = Coupling::from_waveplate(a);
            assert!((c.waveplate_angle() - a).abs() < 1e-14);
        }
    }
}
