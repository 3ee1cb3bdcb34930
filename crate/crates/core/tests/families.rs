mod common;

use gqe_core::builder::CorollaryKind;
use gqe_core::{
    build_corollary_family, build_difference_family, build_pdde_family, build_psi,
    check_constraints, verify_pair, CoefficientSet, Coefficients, FamilyKind, FreeParams, Pt,
    RootChoice, SignBranch, VerifyOptions, C64,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn opts(pair: &gqe_core::Pair, seed: u64) -> VerifyOptions<f64> {
    VerifyOptions::new(300, pair.safe_radius(40.0).unwrap().min(1.0), seed)
}

#[test]
fn symmetric_difference_pairs_verify() {
    // a = b and β = γ make the difference constraints consistent
    let mut rng = common::rng(11);
    let mut checked = 0;
    while checked < 20 {
        let a = common::real(&mut rng, 0.5, 3.0);
        let alpha = common::real(&mut rng, 0.2, 2.0);
        let beta = common::real(&mut rng, -1.5, 1.5);
        let coeffs = Coefficients::real(a, a, alpha, beta, beta, common::real(&mut rng, -3.0, 3.0));
        if !common::usable(&coeffs) {
            continue;
        }
        let shift = Pt::new((0..3).map(|_| common::complex(&mut rng, 2.0)).collect());
        let psi = build_psi(&shift, 4, 2, checked).unwrap();
        let free = FreeParams::new(vec![
            common::complex(&mut rng, 0.5),
            common::complex(&mut rng, 0.5),
        ])
        .with_b2(common::complex(&mut rng, 0.5));
        for kind in [FamilyKind::I, FamilyKind::Ii] {
            for branch in SignBranch::BOTH {
                let (pair, report) =
                    build_difference_family(&coeffs, branch, &shift, kind, &psi, &free).unwrap();
                assert!(report.pass, "{:?}", report.failures());
                let r = verify_pair(&pair, &opts(&pair, checked)).unwrap();
                assert!(r.pass, "{kind:?} {branch:?}: {:e}", r.max_scaled_residual);
            }
        }
        checked += 1;
    }
}

#[test]
fn difference_residual_tracks_the_consistency_row() {
    // for a != b the verifier and the constraint report agree the pair fails
    let mut rng = common::rng(12);
    for i in 0..10 {
        let coeffs = common::with_equal_shifts(&mut rng);
        let shift = Pt::real(&[1.0, 2.0, -1.0]);
        let psi = build_psi(&shift, 3, 1, i).unwrap();
        let free = FreeParams::new(vec![c(0.1, 0.0), c(0.2, 0.0)]);
        let (pair, report) = build_difference_family(
            &coeffs,
            SignBranch::Plus,
            &shift,
            FamilyKind::I,
            &psi,
            &free,
        )
        .unwrap();
        let consistent = report.row("R11 R12 = R13").unwrap().pass;
        let r = verify_pair(&pair, &opts(&pair, i)).unwrap();
        assert_eq!(consistent, r.pass, "{:e}", r.max_scaled_residual);
    }
}

#[test]
fn pdde_pairs_verify_on_both_roots_and_branches() {
    let mut rng = common::rng(13);
    for i in 0..15 {
        let coeffs = common::with_zero_t2(&mut rng);
        let shift = Pt::new((0..2).map(|_| common::complex(&mut rng, 2.0)).collect());
        for root in [RootChoice::Principal, RootChoice::Negated] {
            for branch in SignBranch::BOTH {
                for kind in [FamilyKind::I, FamilyKind::Ii] {
                    let free = FreeParams::new(vec![common::complex(&mut rng, 0.5)])
                        .with_root(root)
                        .with_branches(1, -1);
                    let (pair, report) =
                        build_pdde_family(&coeffs, branch, &shift, kind, &free).unwrap();
                    assert!(report.pass, "{:?}", report.failures());
                    let r = verify_pair(&pair, &opts(&pair, i).with_fd_check(true)).unwrap();
                    assert!(
                        r.pass,
                        "{:e} fd {:?}",
                        r.max_scaled_residual, r.fd_max_deviation
                    );
                }
            }
        }
    }
}

#[test]
fn corollary_pdde_pairs_verify() {
    let coeffs = CoefficientSet::real(2.0, 3.0, 2.0, 0.0, 0.0, -1.0);
    let shift = Pt::real(&[1.0, -0.5]);
    let psi = build_psi(&shift, 2, 1, 0).unwrap();
    for kind in [FamilyKind::I, FamilyKind::Ii] {
        let free = FreeParams::new(vec![c(0.3, 0.0)]);
        let (pair, report) = build_corollary_family(
            &coeffs,
            SignBranch::Plus,
            &shift,
            kind,
            CorollaryKind::Pdde,
            &psi,
            &free,
        )
        .unwrap();
        assert!(report.pass, "{:?}", report.failures());
        assert!(verify_pair(&pair, &opts(&pair, 3)).unwrap().pass);
        assert_eq!(check_constraints(&pair).rows, report.rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbed_pdde_pairs_fail(seed in 0u64..1000, d in 0.1f64..1.0) {
        let mut rng = common::rng(seed);
        let coeffs = common::with_zero_t2(&mut rng);
        let shift = Pt::real(&[1.0, 0.7, -0.4]);
        let free = FreeParams::new(vec![c(0.2, 0.1), c(-0.1, 0.0)]);
        let (pair, _) = build_pdde_family(&coeffs, SignBranch::Minus, &shift, FamilyKind::I, &free).unwrap();
        let bad = pair.perturb_b1(c(d, 0.0));
        prop_assert!(!check_constraints(&bad).pass);
        prop_assert!(verify_pair(&bad, &opts(&pair, seed)).unwrap().max_scaled_residual > 1e-3);
    }

    #[test]
    fn builds_are_deterministic(seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let coeffs = common::with_zero_t2(&mut rng);
        let shift = Pt::real(&[0.5, 1.0]);
        let free = FreeParams::new(vec![c(0.2, 0.0)]);
        let a = build_pdde_family(&coeffs, SignBranch::Plus, &shift, FamilyKind::Ii, &free).unwrap();
        let b = build_pdde_family(&coeffs, SignBranch::Plus, &shift, FamilyKind::Ii, &free).unwrap();
        prop_assert_eq!(a, b);
    }
}
