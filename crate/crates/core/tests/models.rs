use ptframe::algebra::*;
use ptframe::models::*;
use ptframe::Error;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn has_eigenvalue(m: &CMatrix, z: C64, tol: f64) -> bool {
    eig(m)
        .unwrap()
        .eigenvalues
        .iter()
        .any(|e| (e - z).norm() <= tol)
}

#[test]
fn two_level_examples() {
    let (h, _) = build_h1(&H1Params::new(1.0, 0.0).unwrap()).unwrap();
    assert_eq!(
        h.distance(&CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])),
        0.0
    );

    let (h, _) = build_h1(&H1Params::new(1.0, 2.0).unwrap()).unwrap();
    for e in eig(&h).unwrap().eigenvalues {
        assert!((e - c(0.0, -1.0)).norm() < 1e-7);
    }

    let (_, d) = build_h1(&H1Params::new(1.0, 1.0).unwrap()).unwrap();
    let r3 = 3f64.sqrt() / 2.0;
    assert!(has_eigenvalue(&d.h_pt, c(r3, 0.0), 1e-14));
    assert!(has_eigenvalue(&d.h_pt, c(-r3, 0.0), 1e-14));
}

#[test]
fn coupled_mode_examples() {
    let p = H2Params::new(1.0, 0.0, 0.0, 4).unwrap();
    let (h, _) = build_h2(&p).unwrap();
    assert_eq!(h.distance(&h.adjoint()), 0.0);

    let p = H2Params::new(1.0, 1.1, 0.1, 4).unwrap();
    assert!((p.kappa() - 0.5).abs() < 1e-15 && (p.gamma() - 0.6).abs() < 1e-15);
    let (_, d) = build_h2(&p).unwrap();
    assert!(d.is_certified());
    assert!(d.sum_residual.max(d.commutator_residual).max(d.pt_residual) <= 1e-13);

    let p = H2Params::new(1.0, 2.0, 0.0, 4).unwrap();
    assert_eq!(p.kappa(), p.g);
    assert!(matches!(supermodes(&p), Err(Error::SingularSupermodes)));

    assert!(H2Params::new(1.0, 0.1, 0.1, 1).is_err());
}

#[test]
fn driven_mode_examples() {
    let p = H3Params::from_kappa(1.0, 0.6, 0.1, 0.1, 12).unwrap();
    assert!((p.lambda() - 0.8).abs() < 1e-15);
    assert!((p.lambda0() + 0.03125).abs() < 1e-15);
    assert!((p.chi() - 0.003125).abs() < 1e-15);
    assert!((p.theta() - c(0.1, -0.06) / 0.64).norm() < 1e-15);

    let (_, d) = build_h3(&p).unwrap();
    assert!(d.commutator_residual <= 1e-10);
    assert!(d.is_certified());

    // no drive: same matrices as the passive model
    let q = H3Params::from_kappa(1.0, 0.6, 0.1, 0.0, 6).unwrap();
    let (h3, d3) = build_h3(&q).unwrap();
    let (h2, d2) = build_h2(&q.undriven()).unwrap();
    assert!(h3.distance(&h2) < 1e-15 && d3.h0.distance(&d2.h0) < 1e-15);

    for kappa in [1.0, 1.5, -1.0] {
        let err = H3Params::from_kappa(1.0, kappa, 0.1, 0.1, 6).unwrap_err();
        assert!(matches!(err, Error::SpectralSingularity(_)), "{err}");
        assert!(err.to_string().contains("spectral singularity"));
    }
}

#[test]
fn supermode_examples() {
    let m = supermodes(&H2Params::from_kappa(1.0, 0.0, 0.3, 3).unwrap()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((m.alpha_half_sin - c(h, 0.0)).norm() < 1e-15);
    assert!((m.alpha_half_cos - c(h, 0.0)).norm() < 1e-15);
    assert!((m.lambda - c(1.0, 0.0)).norm() < 1e-15);

    let p = H2Params::from_kappa(1.0, 0.6, 0.3, 4).unwrap();
    let m = supermodes(&p).unwrap();
    assert!((m.lambda - c(0.8, 0.0)).norm() < 1e-15);
    assert!((m.alpha_half_sin - (c(0.8, 0.6) / 1.6).sqrt()).norm() < 1e-15);
    assert!((m.alpha_half_cos - (c(0.8, -0.6) / 1.6).sqrt()).norm() < 1e-15);

    for n_max in [2, 4, 8] {
        let p = H2Params::from_kappa(1.0, 0.6, 0.3, n_max).unwrap();
        let m = supermodes(&p).unwrap();
        let (h, d) = build_h2(&p).unwrap();
        assert!((&m.nc() - &m.nd()).scale(m.lambda).distance(&d.h_pt) <= 1e-13);
        let lossy = &m.nc().scale(m.lambda - c(0.0, 0.3)) - &m.nd().scale(m.lambda + c(0.0, 0.3));
        assert!(lossy.distance(&h) <= 1e-13);
        assert!((&m.nc() + &m.nd()).distance(&total_number(&p.layout())) <= 1e-13);
    }
}

#[test]
fn driven_diagonal_form_on_interior() {
    let p = H3Params::from_kappa(1.0, 0.6, 0.1, 0.1, 12).unwrap();
    let (h, d) = build_h3(&p).unwrap();
    let m = driven_supermodes(&p).unwrap();
    let dm = m.displaced.as_ref().unwrap();
    let lam = c(p.lambda(), 0.0);
    let g = c(0.0, p.gamma());
    let diag =
        &(&(&dm.c_eps_plus * &dm.c_eps) * (lam - g)) - &(&(&dm.d_eps_plus * &dm.d_eps) * (lam + g));
    let diag = &diag + &CMatrix::identity(h.dim()).scale(c(p.lambda0(), 0.0));
    let inside = p.interior();
    assert!((&h - &diag).restrict(&inside).frobenius_norm() <= 1e-10);
    let comm = commutator(&d.h_pt, &dm.number()).unwrap();
    assert!(comm.restrict(&inside).frobenius_norm() <= 1e-10);
}

#[test]
fn analytic_examples() {
    let p = H2Params::from_kappa(1.0, 0.6, 0.5, 4).unwrap();
    let (e_if, e_ef) = analytic_eigs_h2(&p, 1, 0).unwrap();
    assert!((e_if - c(0.8, -0.5)).norm() < 1e-15 && (e_ef - c(0.8, 0.0)).norm() < 1e-15);
    let (h, _) = build_h2(&p).unwrap();
    assert!(has_eigenvalue(&h, e_if, 1e-12));

    let (e_if, _) = analytic_eigs_h2(&p, 0, 2).unwrap();
    assert!((e_if - c(-1.6, -1.0)).norm() < 1e-15);
    assert_eq!(
        analytic_eigs_h2(&p, 0, 0).unwrap(),
        (c(0.0, 0.0), c(0.0, 0.0))
    );
    assert!(analytic_eigs_h2(&p, 3, 2).is_err());

    // at κ = g every equilibrium-frame value vanishes; initial-frame values
    // only coincide within a photon-number sector
    let ep = H2Params::from_kappa(1.0, 1.0, 0.3, 4).unwrap();
    let vals: Vec<(C64, C64)> = TRACKED_STATES
        .iter()
        .map(|&(a, b)| analytic_eigs_h2(&ep, a, b).unwrap())
        .collect();
    assert!(vals.iter().all(|(_, ef)| ef.norm() < 1e-15));
    assert!((vals[0].0 - vals[1].0).norm() < 1e-15 && (vals[2].0 - vals[3].0).norm() < 1e-15);
    assert!((vals[0].0 - vals[2].0).norm() > 0.1);

    let q = H3Params::from_kappa(1.0, 0.6, 0.1, 0.1, 12).unwrap();
    let (e_if, e_ef) = analytic_eigs_h3(&q, 1, 0).unwrap();
    assert!((e_if - c(0.76875, -0.1)).norm() < 1e-14);
    assert!((e_ef - c(0.8 - 0.03125, 0.0)).norm() < 1e-14);
    let (h3, _) = build_h3(&q).unwrap();
    assert!(has_eigenvalue(&h3, e_if, 1e-6));

    let q0 = H3Params::from_kappa(1.0, 0.6, 0.1, 0.0, 12).unwrap();
    for (a, b) in TRACKED_STATES {
        assert_eq!(
            analytic_eigs_h3(&q0, a, b).unwrap(),
            analytic_eigs_h2(&q0.undriven(), a, b).unwrap()
        );
    }
}

#[test]
fn imaginary_parts_near_the_singularity() {
    let q = H3Params::from_kappa(1.0, 0.999999, 0.1, 0.1, 12).unwrap();
    let im: Vec<f64> = TRACKED_STATES
        .iter()
        .map(|&(a, b)| analytic_eigs_h3(&q, a, b).unwrap().0.im)
        .collect();
    for (x, want) in im.iter().zip([-0.1, -0.1, -0.2, -0.2]) {
        assert!((x - want).abs() < 1e-12, "{x} vs {want}");
    }
}

#[test]
fn scalar_generator_fits() {
    let p = H2Params::from_kappa(1.0, 0.4, 0.6, 4).unwrap();
    let (h, _) = build_h2(&p).unwrap();
    let parity = Model::H2(p).parity().unwrap();
    let (beta, res) = fit_scalar_generator(&h, &total_number(&p.layout()), &parity).unwrap();
    assert!((beta - c(0.0, -0.6)).norm() < 1e-12 && res <= 1e-12);

    let q = H1Params::new(1.0, 0.8).unwrap();
    let (h, d) = build_h1(&q).unwrap();
    let parity = Model::H1(q).parity().unwrap();
    let (beta, _) = fit_scalar_generator(&h, &CMatrix::identity(2), &parity).unwrap();
    assert!((beta - c(0.0, -0.4)).norm() < 1e-14);

    let g = CMatrix::diag(&[ONE, ZERO]);
    let (beta, _) = fit_scalar_generator(&d.h_pt, &g, &parity).unwrap();
    assert!(beta.norm() < 1e-14);
}
