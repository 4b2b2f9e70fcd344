use num_complex::Complex;
use proptest::prelude::*;

use photon_gates::circuit::element_transfer_matrix;
use photon_gates::{
    beamsplitter_matrix, compose_transfer_matrix, condition, enumerate_basis, evolve, inner_product, make_state,
    BeamsplitterElement, Circuit, DetectionPattern, FockStateVector, OccupationVector, Port,
};

type C = Complex<f64>;

fn port() -> impl Strategy<Value = Port> {
    prop_oneof![Just(Port::A), Just(Port::B)]
}

fn element(n_modes: usize) -> impl Strategy<Value = BeamsplitterElement<f64>> {
    (0..n_modes, 1..n_modes, 0.0..=1.0f64, port())
        .prop_map(move |(a, shift, eta, grey)| BeamsplitterElement::new(a, (a + shift) % n_modes, eta, grey))
}

fn circuit_on(n_modes: usize, max_elements: usize) -> impl Strategy<Value = Circuit<f64>> {
    prop::collection::vec(element(n_modes), 0..=max_elements).prop_map(move |elements| {
        let labels: Vec<String> = (0..n_modes).map(|i| format!("m{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let mut c = Circuit::new(&refs);
        elements.into_iter().for_each(|e| {
            c.push(e);
        });
        c
    })
}

fn circuit() -> impl Strategy<Value = Circuit<f64>> {
    (2usize..=6).prop_flat_map(|n| circuit_on(n, 8))
}

/// Random normalized state spanning the whole `photons` sector.
fn state_on(n_modes: usize, photons: u32) -> impl Strategy<Value = FockStateVector<f64>> {
    let basis = enumerate_basis(n_modes, photons);
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), basis.len()).prop_filter_map("zero vector", move |coeffs| {
        let entries = basis.iter().cloned().zip(coeffs.into_iter().map(|(re, im)| C::new(re, im)));
        make_state(n_modes, entries).ok()?.normalized()
    })
}

fn circuit_and_states() -> impl Strategy<Value = (Circuit<f64>, FockStateVector<f64>, FockStateVector<f64>)> {
    (2usize..=5, 1u32..=3).prop_flat_map(|(n, k)| (circuit_on(n, 6), state_on(n, k), state_on(n, k)))
}

fn max_diff(a: &FockStateVector<f64>, b: &FockStateVector<f64>) -> f64 {
    a.add_scaled(b, C::new(-1.0, 0.0)).unwrap().iter().map(|(_, x)| x.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn beamsplitter_is_orthogonal_symmetric_involutory(eta in 0.0..=1.0f64, grey in port()) {
        let m = beamsplitter_matrix(eta, grey).unwrap();
        prop_assert_eq!(m[0][1], m[1][0]);
        for i in 0..2 {
            for j in 0..2 {
                let mtm: f64 = (0..2).map(|k| m[k][i] * m[k][j]).sum();
                let mm: f64 = (0..2).map(|k| m[i][k] * m[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                prop_assert!((mtm - id).abs() < 1e-15);
                prop_assert!((mm - id).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_element_matrix_is_symmetric(n in 2usize..=6, e in element(6)) {
        let e = BeamsplitterElement::new(e.mode_a % n, e.mode_b % n, e.reflectivity, e.grey);
        prop_assume!(e.mode_a != e.mode_b);
        let u = element_transfer_matrix(&e, n).unwrap();
        prop_assert_eq!(u.max_abs_diff(&u.transpose()), 0.0);
    }

    #[test]
    fn transfer_matrix_is_unitary(c in circuit()) {
        prop_assert!(compose_transfer_matrix(&c).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn composition_respects_concatenation(
        (c1, c2) in (2usize..=6).prop_flat_map(|n| (circuit_on(n, 6), circuit_on(n, 6)))
    ) {
        let mut joined = c1.clone();
        c2.elements.iter().cloned().for_each(|e| { joined.push(e); });
        let u1 = compose_transfer_matrix(&c1).unwrap();
        let u2 = compose_transfer_matrix(&c2).unwrap();
        let product = &u2 * &u1;
        prop_assert!(compose_transfer_matrix(&joined).unwrap().max_abs_diff(&product) < 1e-12);
    }

    #[test]
    fn evolution_conserves_norm_and_photon_number((c, s, _) in circuit_and_states()) {
        let out = evolve(&s, &c).unwrap();
        prop_assert_eq!(out.total_photons(), s.total_photons());
        prop_assert!(out.iter().all(|(k, _)| k.total() == s.total_photons()));
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_linear((c, s1, s2) in circuit_and_states(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let (a, b) = (C::new(a, 0.3), C::new(0.5, b));
        let mixed = s1.scaled(a).add_scaled(&s2, b).unwrap();
        let lhs = evolve(&mixed, &c).unwrap();
        let rhs = evolve(&s1, &c).unwrap().scaled(a).add_scaled(&evolve(&s2, &c).unwrap(), b).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn evolution_preserves_inner_products((c, s1, s2) in circuit_and_states()) {
        let before = inner_product(&s1, &s2).unwrap();
        let after = inner_product(&evolve(&s1, &c).unwrap(), &evolve(&s2, &c).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
        // conjugate symmetry
        prop_assert!((before - inner_product(&s2, &s1).unwrap().conj()).norm() < 1e-15);
    }

    #[test]
    fn element_applied_twice_is_identity((c, s, _) in circuit_and_states()) {
        prop_assume!(!c.elements.is_empty());
        let mut twice = c.prefix(0);
        twice.push(c.elements[0].clone());
        twice.push(c.elements[0].clone());
        prop_assert!(max_diff(&evolve(&s, &twice).unwrap(), &s) < 1e-12);
    }

    #[test]
    fn conditioning_is_complete(
        (c, s, _) in circuit_and_states(),
        picks in prop::collection::vec(any::<bool>(), 5),
    ) {
        let out = evolve(&s, &c).unwrap();
        let n = out.n_modes();
        let measured: Vec<usize> = (0..n).filter(|&m| picks[m]).collect();
        prop_assume!(!measured.is_empty());
        // every count assignment on the measured modes, up to the photon number
        let mut total = 0.0;
        for k in 0..=out.total_photons() {
            for pattern in enumerate_basis(measured.len(), k) {
                let p = measured
                    .iter()
                    .zip(pattern.counts())
                    .fold(DetectionPattern::new(), |d, (&m, &cnt)| d.exact(m, cnt));
                total += condition(&out, &p).unwrap().success_probability;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_projections_commute((c, s, _) in circuit_and_states(), k0 in 0u8..=2, k1 in 0u8..=2) {
        let out = evolve(&s, &c).unwrap();
        let n = out.n_modes();
        let first = DetectionPattern::new().exact(0, k0);
        let second = DetectionPattern::new().exact(n - 1, k1);
        let both = condition(&out, &first.merged(&second)).unwrap().success_probability;
        // after removing mode 0 the last mode sits at n - 2, and vice versa
        let a = condition(&out, &first).unwrap();
        let ab = condition(&a.reduced_state, &DetectionPattern::new().exact(n - 2, k1)).unwrap();
        let b = condition(&out, &second).unwrap();
        let ba = condition(&b.reduced_state, &DetectionPattern::new().exact(0, k0)).unwrap();
        prop_assert!((ab.success_probability - both).abs() < 1e-12);
        prop_assert!((ba.success_probability - both).abs() < 1e-12);
        prop_assert!(max_diff(&ab.reduced_state, &ba.reduced_state) < 1e-12);
    }

    #[test]
    fn basis_enumeration_is_sorted_and_complete(n in 1usize..=5, k in 0u32..=4) {
        let basis = enumerate_basis(n, k);
        prop_assert!(basis.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(basis.iter().all(|b: &OccupationVector| b.total() == k && b.n_modes() == n));
        // C(n + k - 1, k)
        let expected = (1..=k as usize).fold(1usize, |acc, i| acc * (n - 1 + i) / i);
        prop_assert_eq!(basis.len(), expected);
    }
}
