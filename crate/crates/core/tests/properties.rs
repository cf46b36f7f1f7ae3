use num_complex::Complex64 as C64;
use proptest::prelude::*;

use stimclone::atoms::{build_hamiltonian, initial_ensemble, photon_distribution};
use stimclone::hilbert::{enumerate_sector, Propagator, StateVector};
use stimclone::metrics::{f_clones, f_opt, mean_photon_numbers};
use stimclone::pdc::{anticlone_fidelity_pdc, clone_fidelity_pdc, optimal_unot_fidelity};
use stimclone::symmetry::{fock_rotation_matrix, Su2Rotation};

fn random_state(dim: usize, seed: &[f64]) -> StateVector {
    let amps: Vec<C64> = (0..dim)
        .map(|i| C64::new(seed[(2 * i) % seed.len()], seed[(2 * i + 1) % seed.len()]))
        .collect();
    let s = StateVector::from_vec(amps);
    let n = s.norm();
    StateVector::from_vec(s.amplitudes().iter().map(|a| a / n).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_norm_and_composes(
        n_atoms in 1usize..=4,
        n1 in 0usize..=4,
        n2 in 0usize..=4,
        t1 in 0.0f64..3.0,
        t2 in 0.0f64..3.0,
        seed in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let sector = enumerate_sector(n_atoms, n1, n2);
        prop_assume!(sector.dim() > 0 && seed.iter().any(|x| x.abs() > 1e-3));
        let prop = Propagator::new(&build_hamiltonian(&sector)).unwrap();
        let psi = random_state(sector.dim(), &seed);
        let a = prop.evolve(&prop.evolve(&psi, t1).unwrap(), t2).unwrap();
        let b = prop.evolve(&psi, t1 + t2).unwrap();
        prop_assert!((a.norm() - 1.0).abs() < 1e-10);
        let diff = (a.amplitudes() - b.amplitudes()).norm();
        prop_assert!(diff < 1e-9, "composition error {}", diff);
    }

    #[test]
    fn distribution_invariants(n_atoms in 1usize..=4, t in 0.0f64..2.0) {
        let p = photon_distribution(&initial_ensemble(n_atoms).unwrap(), t).unwrap();
        prop_assert!((p.total() - 1.0).abs() < 1e-10);
        prop_assert!(p.get(0, 0).abs() < 1e-12);
        for ((k, l), w) in p.iter() {
            prop_assert!(k + l >= 1 && k + l <= n_atoms + 1);
            prop_assert!(w >= 0.0);
        }
        let (all, right) = mean_photon_numbers(&p);
        prop_assert!(right <= all + 1e-12 && all >= 1.0 - 1e-12);
        if t > 0.05 {
            let fc = f_clones(&p).unwrap();
            prop_assert!(fc <= f_opt(&p).unwrap() + 1e-9);
        }
    }

    #[test]
    fn fock_rotation_is_unitary(n in 0usize..=6, theta in 0.0f64..6.3, phi in 0.0f64..6.3, chi in 0.0f64..6.3) {
        let a = C64::from_polar(theta.cos(), phi);
        let b = C64::from_polar(theta.sin(), chi);
        let rot = Su2Rotation::new(a, b).unwrap();
        let u = fock_rotation_matrix(&rot, n);
        let eye = nalgebra::DMatrix::<C64>::identity(n + 1, n + 1);
        prop_assert!((u.adjoint() * &u - eye).norm() < 1e-10);
        let back = fock_rotation_matrix(&rot.inverse(), n) * &u;
        prop_assert!((back - nalgebra::DMatrix::<C64>::identity(n + 1, n + 1)).norm() < 1e-10);
    }

    #[test]
    fn pdc_fidelities_closed_form(n in 1u64..=25, extra in 0u64..=25) {
        let m = n + extra;
        let clone = clone_fidelity_pdc(n, m).unwrap();
        let expected = num_rational::BigRational::new(
            (n * m + n + m).into(),
            (m * (n + 2)).into(),
        );
        prop_assert_eq!(clone, expected);
        if extra > 0 {
            prop_assert_eq!(anticlone_fidelity_pdc(n, m).unwrap(), optimal_unot_fidelity(n));
        } else {
            prop_assert!(anticlone_fidelity_pdc(n, m).is_err());
        }
    }
}
