//! Cross-checks of the core solvers against independent oracle
//! implementations: gradient descent for OLS, exact-arithmetic exhaustive
//! enumeration for tree splits, Gauss-Jordan for SPD solves, and a lattice
//! search over the SVR dual.

mod common;

use common::{
    exact_best_split, full_beta, gauss_jordan, gd_ols, int_dataset, int_in, svr_dual_objective,
};
use reef_core::dataset::{generate_synthetic, ReefDataset};
use reef_core::linalg::{solve_spd, Matrix, Vector};
use reef_core::models::svr::{fit_svr, kernel_eval, KernelSettings, KernelSpec, SvrConfig};
use reef_core::models::tree::{best_split, TreeConfig};
use reef_core::models::LinearModel;
use reef_core::rng::Rng;

#[test]
fn ols_matches_gradient_descent() {
    let mut rng = Rng::new(0x6F15);
    for round in 0..5 {
        let p = 1 + rng.below(5);
        let n = p + 5 + rng.below(50 - p - 4);
        let weights: Vec<f64> = (0..p).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let intercept = rng.uniform(-3.0, 3.0);
        let data =
            generate_synthetic(n, p, &weights, intercept, 0.3, 7000 + round).unwrap();

        let exact = reef_core::models::linear::fit_ols(&data).unwrap();
        let (gd_w, gd_b) = gd_ols(&data, 0.1, 300_000);

        let mut worst: f64 = (exact.intercept - gd_b).abs();
        for (w_exact, w_gd) in exact.weights.iter().zip(&gd_w) {
            worst = worst.max((w_exact - w_gd).abs());
        }
        assert!(
            worst <= 1e-4,
            "round {round} (n={n}, p={p}): max coefficient gap {worst}"
        );
    }
}

#[test]
fn best_split_matches_exact_enumeration() {
    let mut rng = Rng::new(0x5B1D);
    let cfg = TreeConfig::default();
    let mut kept = 0;
    let mut skipped_ties = 0;
    while kept < 200 {
        let n = 2 + rng.below(19);
        let p = 1 + rng.below(4);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..p).map(|_| int_in(&mut rng, 0, 7)).collect())
            .collect();
        let targets: Vec<i64> = (0..n).map(|_| int_in(&mut rng, -8, 8)).collect();

        let oracle = exact_best_split(&rows, &targets);
        if oracle.as_ref().is_some_and(|o| o.tied) {
            // Exactly tied optima leave the float argmax order undefined.
            skipped_ties += 1;
            assert!(skipped_ties < 200, "tie skipping dominates the instance mix");
            continue;
        }
        kept += 1;

        let data = int_dataset(&rows, &targets);
        let all: Vec<usize> = (0..n).collect();
        let got = best_split(&data, &all, &cfg);
        match (&got, &oracle) {
            (None, None) => {}
            (Some(g), Some(o)) => {
                assert_eq!(
                    (g.feature, g.threshold),
                    (o.feature, o.threshold),
                    "instance {kept}: rows {rows:?} targets {targets:?}"
                );
                let scale = 1.0 + o.reduction.abs();
                assert!(
                    (g.sse_reduction - o.reduction).abs() <= 1e-9 * scale,
                    "instance {kept}: reduction {} vs oracle {}",
                    g.sse_reduction,
                    o.reduction
                );
            }
            other => panic!("instance {kept}: {other:?} on rows {rows:?} y {targets:?}"),
        }
    }
}

#[test]
fn solve_spd_matches_gauss_jordan() {
    let mut rng = Rng::new(0x50D0);
    for round in 0..50 {
        let n = 1 + rng.below(20);
        let b_mat: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect();
        // A = BᵀB + I is symmetric positive definite by construction.
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for row in &b_mat {
                    s += row[i] * row[j];
                }
                a[i][j] = s;
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();

        let solved = solve_spd(
            &Matrix::from_rows(a.clone()).unwrap(),
            &Vector::new(rhs.clone()).unwrap(),
        )
        .unwrap();
        let oracle = gauss_jordan(&a, &rhs);
        for i in 0..n {
            assert!(
                (solved[i] - oracle[i]).abs() <= 1e-8,
                "round {round}, entry {i}: {} vs {}",
                solved[i],
                oracle[i]
            );
        }
    }
}

/// The SMO solution must score at least as well as every point of a coarse
/// global lattice and a fine local lattice over the feasible dual region.
#[test]
fn smo_dual_beats_lattice_search() {
    let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
    let targets: Vec<f64> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| 0.5 * r[0] + if i % 2 == 0 { 0.05 } else { -0.05 })
        .collect();
    let data = ReefDataset::new(vec!["x".into()], "y".into(), rows, targets.clone()).unwrap();

    let cfg = SvrConfig {
        c: 1.0,
        epsilon: 0.1,
        kernel: KernelSettings::Linear,
        tol: 1e-4,
        max_passes: 500,
    };
    let model = fit_svr(&data, &cfg).unwrap();
    assert!(model.converged);

    let n = data.n_rows();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| kernel_eval(&KernelSpec::Linear, data.row(i), data.row(j)).unwrap())
                .collect()
        })
        .collect();
    let beta = full_beta(&model, &data);
    let w_smo = svr_dual_objective(&beta, &gram, &targets, cfg.epsilon);
    assert!(w_smo >= -1e-12, "dual value must not fall below W(0) = 0");

    let mut best_candidate = f64::NEG_INFINITY;
    let mut consider = |candidate: &[f64]| {
        if candidate.iter().any(|b| b.abs() > cfg.c + 1e-12) {
            return;
        }
        let w = svr_dual_objective(candidate, &gram, &targets, cfg.epsilon);
        if w > best_candidate {
            best_candidate = w;
        }
    };

    // Coarse global lattice: five free coefficients over {-c, -c/2, 0, c/2,
    // c}, the last one balancing the equality constraint.
    let levels = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut candidate = vec![0.0; n];
    for a in levels {
        for b in levels {
            for c in levels {
                for d in levels {
                    for e in levels {
                        candidate[..5].copy_from_slice(&[a, b, c, d, e]);
                        candidate[5] = -(a + b + c + d + e);
                        consider(&candidate);
                    }
                }
            }
        }
    }

    // Fine local lattice around the SMO point, re-balanced the same way.
    let deltas = [-0.05, -0.025, 0.0, 0.025, 0.05];
    for a in deltas {
        for b in deltas {
            for c in deltas {
                for d in deltas {
                    for e in deltas {
                        let shift = [a, b, c, d, e];
                        for j in 0..5 {
                            candidate[j] = beta[j] + shift[j];
                        }
                        candidate[5] = -candidate[..5].iter().sum::<f64>();
                        consider(&candidate);
                    }
                }
            }
        }
    }

    assert!(
        w_smo >= best_candidate - 1e-2,
        "SMO dual {w_smo} trails lattice best {best_candidate}"
    );
}

/// Sanity anchor for the oracle itself: on a noiseless line the true
/// coefficients are recovered by both paths.
#[test]
fn oracle_and_solver_agree_on_a_noiseless_line() {
    let data = generate_synthetic(25, 1, &[2.0], 1.0, 0.0, 99).unwrap();
    let exact = reef_core::models::linear::fit_ols(&data).unwrap();
    let (gd_w, gd_b) = gd_ols(&data, 0.1, 200_000);
    let reference = LinearModel {
        intercept: 1.0,
        weights: vec![2.0],
    };
    assert!((exact.intercept - reference.intercept).abs() < 1e-8);
    assert!((exact.weights[0] - reference.weights[0]).abs() < 1e-8);
    assert!((gd_b - reference.intercept).abs() < 1e-6);
    assert!((gd_w[0] - reference.weights[0]).abs() < 1e-6);
}
