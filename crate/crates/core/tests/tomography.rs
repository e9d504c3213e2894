use czbypass::fock::oracle_process_matrix;
use czbypass::metrics::{chi_cz_reference, choi_state_fidelity, dominant_overlap, process_fidelity};
use czbypass::model::{cz_parameter_solution, process_matrix};
use czbypass::tomography::*;
use czbypass::{AngleRule, ComplexMatrix, ProcessMatrix, SetupParams};

fn operating_point() -> ProcessMatrix {
    let p = SetupParams::fixture().with_angles_deg(20.0, 0.0, 0.0);
    process_matrix(&cz_parameter_solution(&p, AngleRule::NominalR).unwrap())
}

#[test]
fn rates_marginalize_to_success_probabilities() {
    let chi = oracle_process_matrix(&SetupParams::fixture().with_angles_deg(11.0, -30.0, 17.0)).unwrap();
    let rates = expected_rates(&chi);
    for input in 0..N_INPUTS {
        let p = chi
            .expectation(&input_state(input), &ComplexMatrix::identity(4))
            .unwrap();
        for basis in 0..N_BASES {
            let sum: f64 = (0..N_OUTCOMES).map(|o| rates[cell_index(input, basis, o)]).sum();
            assert!((sum - p).abs() < 1e-14);
        }
    }
}

#[test]
fn poisson_means_match_rates() {
    let rates = expected_rates(&operating_point());
    let scale = 2e4;
    let replicates = 1000;
    let mut sums = vec![0.0; N_CELLS];
    for seed in 0..replicates {
        for c in simulate_counts(&rates, scale, seed).unwrap() {
            sums[c.cell().unwrap()] += c.count as f64;
        }
    }
    // With 1296 cells about 3.5 are expected outside 3σ by chance.
    let mut outside = 0;
    for (sum, rate) in sums.iter().zip(&rates) {
        let mean = rate * scale;
        let sigma_of_mean = (mean / replicates as f64).sqrt();
        let dev = (sum / replicates as f64 - mean).abs();
        assert!(dev <= 5.0 * sigma_of_mean + 1e-12);
        if dev > 3.0 * sigma_of_mean {
            outside += 1;
        }
    }
    assert!(outside <= 12, "{outside} cells outside 3σ");
}

#[test]
fn noiseless_cz_is_recovered() {
    let rates = expected_rates(&chi_cz_reference());
    let n: Vec<f64> = rates.iter().map(|r| r * 1e6).collect();
    let rec = reconstruct_from_frequencies(&n, &TomographySettings::new(1e6, 0)).unwrap();
    let f = process_fidelity(&rec.chi, &chi_cz_reference()).unwrap();
    assert!(f > 0.9999, "F = {f}");
    assert!(rec.chi.is_psd(1e-9));
    assert!((rec.normalized().unwrap().trace() - 4.0).abs() < 1e-12);
}

#[test]
fn likelihood_never_decreases() {
    let rates = expected_rates(&operating_point());
    let counts = simulate_counts(&rates, 1e4, 7).unwrap();
    let rec = mle_reconstruct(&counts, &TomographySettings::new(1e4, 7)).unwrap();
    assert!(rec.converged);
    for w in rec.log_likelihood.windows(2) {
        assert!(w[1] >= w[0]);
    }
    assert!(rec.chi.is_psd(1e-9));
}

#[test]
fn reconstruction_is_reproducible() {
    let rates = expected_rates(&operating_point());
    let counts = simulate_counts(&rates, 1e3, 11).unwrap();
    let s = TomographySettings::new(1e3, 11);
    let a = mle_reconstruct(&counts, &s).unwrap();
    let b = mle_reconstruct(&counts, &s).unwrap();
    assert_eq!(a.chi, b.chi);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn bypass_off_looks_like_attenuated_identity() {
    let chi = process_matrix(&SetupParams::fixture());
    let rates = expected_rates(&chi);
    let counts = simulate_counts(&rates, 1e5, 3).unwrap();
    let rec = mle_reconstruct(&counts, &TomographySettings::new(1e5, 3)).unwrap();
    let id = ProcessMatrix::choi_vector(&ComplexMatrix::identity(4)).unwrap();
    let cz = ProcessMatrix::choi_vector(&czbypass::metrics::cz_unitary()).unwrap();
    let (o_id, o_cz) = (
        dominant_overlap(&rec.chi, &id).unwrap(),
        dominant_overlap(&rec.chi, &cz).unwrap(),
    );
    assert!(o_id > o_cz, "{o_id} vs {o_cz}");
}

#[test]
fn noiseless_mixed_process_is_a_fixed_point() {
    let chi = operating_point();
    let n: Vec<f64> = expected_rates(&chi).iter().map(|r| r * 1e9).collect();
    let rec = reconstruct_from_frequencies(&n, &TomographySettings::new(1e9, 0)).unwrap();
    let f = choi_state_fidelity(&rec.chi, &chi).unwrap();
    assert!(f > 0.9999, "F = {f}");
    assert!(rec.chi.matrix().max_abs_diff(chi.matrix()) < 1e-4);
}
