use ptframe::algebra::*;
use ptframe::models::{build_h1, build_h2, H1Params, H2Params};
use ptframe::symmetry::*;

fn basis(l: &SpaceLayout, levels: &[usize]) -> CVector {
    let mut v = CVector::zeros(l.dim());
    v[l.index(levels)] = ONE;
    v
}

#[test]
fn qubit_parity() {
    let p = parity_qubit();
    let m = p.matrix();
    assert_eq!((m * m).distance(&CMatrix::identity(2)), 0.0);
    // (e, g) ordering: |e⟩ is the first basis vector
    let e = CVector::from_vec(vec![ONE, ZERO]);
    let g = CVector::from_vec(vec![ZERO, ONE]);
    assert_eq!(m.apply(&e), g);

    let (_, d) = build_h1(&H1Params::new(1.0, 1.0).unwrap()).unwrap();
    assert!(p.pt_image(&d.h_pt).distance(&d.h_pt) <= 1e-15);
}

#[test]
fn two_mode_parity_on_fock_states() {
    let l = SpaceLayout::two_modes(1).unwrap();
    let p = parity_two_mode(&l).unwrap();
    assert_eq!(p.matrix().apply(&basis(&l, &[0, 0])), basis(&l, &[0, 0]));
    assert_eq!(p.matrix().apply(&basis(&l, &[1, 0])), -basis(&l, &[0, 1]));
}

#[test]
fn ladder_table_at_several_cutoffs() {
    for n_max in [1, 3, 6] {
        let l = SpaceLayout::two_modes(n_max).unwrap();
        let p = parity_two_mode(&l).unwrap();
        let (a, b) = (annihilation(&l, 0).unwrap(), annihilation(&l, 1).unwrap());
        let (ad, bd) = (creation(&l, 0).unwrap(), creation(&l, 1).unwrap());
        assert_eq!(p.pt_image(&a).distance(&-&b), 0.0);
        assert_eq!(p.pt_image(&ad).distance(&-&bd), 0.0);
        assert_eq!(p.pt_image(&b).distance(&-&a), 0.0);
        assert_eq!(p.pt_image(&bd).distance(&-&ad), 0.0);
    }
}

#[test]
fn parity_rejects_unequal_modes() {
    let l = SpaceLayout::new(vec![
        Subsystem::Boson { cutoff: 2 },
        Subsystem::Boson { cutoff: 3 },
    ])
    .unwrap();
    assert!(parity_two_mode(&l).is_err());
    assert!(parity_two_mode(&SpaceLayout::single_mode(2).unwrap()).is_err());
}

#[test]
fn residual_examples() {
    let p2 = H2Params::from_kappa(1.0, 0.5, 0.0, 3).unwrap();
    let (_, d) = build_h2(&p2).unwrap();
    let parity = parity_two_mode(&p2.layout()).unwrap();
    assert!(pt_residual(&d.h_pt, &parity).unwrap().is_symmetric);

    let lossy = H2Params::new(1.0, 1.0, 0.0, 3).unwrap();
    let (h, _) = build_h2(&lossy).unwrap();
    assert!(!pt_residual(&h, &parity).unwrap().is_symmetric);

    // real symmetric operator commuting with σ_x
    let h = CMatrix::from_real(&[&[0.3, 1.2], &[1.2, 0.3]]);
    assert_eq!(pt_residual(&h, &parity_qubit()).unwrap().residual, 0.0);
}

#[test]
fn pseudo_hermiticity_examples() {
    let herm = CMatrix::from_real(&[&[1.0, 2.0], &[2.0, -1.0]]);
    assert_eq!(
        pseudo_hermiticity_residual(&herm, &CMatrix::identity(2))
            .unwrap()
            .residual,
        0.0
    );

    let (h, d) = build_h1(&H1Params::new(1.0, 1.0).unwrap()).unwrap();
    let eta = parity_qubit().matrix().clone();
    assert!(
        pseudo_hermiticity_residual(&d.h_pt, &eta)
            .unwrap()
            .is_symmetric
    );
    assert!(
        !pseudo_hermiticity_residual(&h, &CMatrix::identity(2))
            .unwrap()
            .is_symmetric
    );

    let singular = CMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
    assert!(pseudo_hermiticity_residual(&herm, &singular).is_err());
}
