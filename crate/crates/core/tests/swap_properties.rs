//! Swap-test contract over random state pairs, plus the qualitative
//! structure of the 3-qubit swap-test unitary.

use num_complex::Complex64;
use qknn_core::sim::{circuit_unitary, Backend, QuantumState};
use qknn_core::swap_test::{
    build_swap_test, quantum_euclidean_distance, swap_test_p0, SwapTestLayout,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let entries: Vec<(u64, Complex64)> = (0..1u64 << n)
        .map(|k| {
            (
                k,
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0),
            )
        })
        .collect();
    QuantumState::from_amplitudes(n, &entries, Backend::Sparse).unwrap()
}

#[test]
fn p0_matches_the_overlap_identity_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let x = random_state(n, &mut rng);
        let y = random_state(n, &mut rng);
        let p0 = swap_test_p0(&x, &y).unwrap();
        let overlap = x.inner_product(&y).unwrap().norm();
        worst = worst.max((p0 - (0.5 + 0.5 * overlap * overlap)).abs());
        assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p0), "p0 out of range: {p0}");
    }
    assert!(worst < 1e-10, "worst deviation {worst}");
}

#[test]
fn p0_is_symmetric_in_its_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(516);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let x = random_state(n, &mut rng);
        let y = random_state(n, &mut rng);
        let forward = swap_test_p0(&x, &y).unwrap();
        let backward = swap_test_p0(&y, &x).unwrap();
        assert!((forward - backward).abs() < 1e-12);
    }
}

#[test]
fn distance_is_monotonically_decreasing_in_fidelity() {
    let mut previous = f64::INFINITY;
    for step in 0..=1000 {
        let fidelity = step as f64 / 1000.0;
        let d = quantum_euclidean_distance(fidelity);
        assert!(d <= previous);
        assert!((0.0..=2f64.sqrt() + 1e-15).contains(&d));
        previous = d;
    }
}

#[test]
fn swap_test_unitary_has_half_amplitude_columns() {
    // For unequal register contents the 3-qubit swap-test unitary column
    // splits into four entries of magnitude 0.5 and four zeros.
    let circuit = build_swap_test(&SwapTestLayout::packed(1));
    let u = circuit_unitary(&circuit).unwrap();
    // Input |q0=0, q1=1, q2=0⟩ = basis 2: registers differ.
    let col = 2usize;
    let mut halves = 0;
    let mut zeros = 0;
    for row in 0..u.dim() {
        let magnitude = u.entry(row, col).norm();
        if (magnitude - 0.5).abs() < 1e-12 {
            halves += 1;
        } else if magnitude < 1e-12 {
            zeros += 1;
        }
    }
    assert_eq!((halves, zeros), (4, 4));

    // Equal register contents pass through: |000⟩ maps to itself.
    let mut input = QuantumState::zero(3, Backend::Sparse).unwrap();
    input.apply_circuit(&circuit).unwrap();
    assert!((input.amplitude(0).re - 1.0).abs() < 1e-12);
}
