use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpfem::krylov::{fgmres, fgmres_with_basis, gmres, SolveStatus};
use tpfem::Result;

/// Random well-conditioned nonsymmetric matrix `I * n + noise`.
fn matrix(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| (0..n).map(|j| rng.random_range(-1.0..1.0) + if i == j { n as f64 } else { 0.0 }).collect())
        .collect()
}

fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn jacobi(a: &[Vec<f64>]) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
    move |r: &[f64]| Ok(r.iter().enumerate().map(|(i, v)| v / a[i][i]).collect())
}

#[test]
fn arnoldi_relation_holds() {
    let n = 30;
    let a = matrix(n, 1);
    let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
    let (_, report, basis) = fgmres_with_basis(|x: &[f64]| Ok(matvec(&a, x)), jacobi(&a), &b, 1e-12, 40).unwrap();
    let m = report.iterations;
    assert_eq!(basis.z.len(), m);
    for j in 0..m {
        let az = matvec(&a, &basis.z[j]);
        for i in 0..n {
            let vh: f64 = (0..basis.h[j].len()).map(|r| basis.v[r][i] * basis.h[j][r]).sum();
            assert!((az[i] - vh).abs() < 1e-10, "column {j} row {i}");
        }
    }
    for p in 0..basis.v.len() {
        for q in 0..basis.v.len() {
            let d: f64 = basis.v[p].iter().zip(&basis.v[q]).map(|(x, y)| x * y).sum();
            assert!((d - if p == q { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn flexible_variant_tolerates_a_changing_preconditioner() {
    let n = 40;
    let a = matrix(n, 2);
    let b = vec![1.0; n];
    let mut call = 0usize;
    let varying = |r: &[f64]| {
        call += 1;
        let damp = 0.5 + 0.4 * ((call as f64).sin());
        Ok(r.iter().enumerate().map(|(i, v)| damp * v / a[i][i]).collect())
    };
    let (x, report) = fgmres(|x: &[f64]| Ok(matvec(&a, x)), varying, &b, 1e-10, 60).unwrap();
    assert!(report.converged());
    let r: Vec<f64> = matvec(&a, &x).iter().zip(&b).map(|(p, q)| p - q).collect();
    let rn: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(rn <= 1e-9 * (n as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gmres_and_fgmres_agree_for_a_fixed_preconditioner(seed in any::<u64>(), n in 5usize..25) {
        let a = matrix(n, seed);
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.1).collect();
        let (x1, r1) = fgmres(|x: &[f64]| Ok(matvec(&a, x)), jacobi(&a), &b, 1e-10, 50).unwrap();
        let (x2, r2) = gmres(|x: &[f64]| Ok(matvec(&a, x)), jacobi(&a), &b, 1e-10, 50).unwrap();
        prop_assert_eq!(r1.iterations, r2.iterations);
        prop_assert_eq!(r1.status, SolveStatus::Converged);
        for (p, q) in x1.iter().zip(&x2) {
            prop_assert!((p - q).abs() < 1e-9);
        }
        for w in r1.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert_eq!(r1.residual_history.len(), r1.iterations + 1);
    }
}
