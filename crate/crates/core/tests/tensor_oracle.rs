use proptest::prelude::*;
use tpfem::precision::{contract_dir_prec, PrecisionMode};
use tpfem::tensor::{
    apply_separable, contract_dir, count_flops, dense_kronecker_oracle, Evaluation, FlopVariant, Matrix1D,
    SeparableOperator, TensorField,
};

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 { num } else { num / den }
}

/// Random operator with per-axis shapes `(rows, cols)` shared by all terms, plus an input.
fn case() -> impl Strategy<Value = (SeparableOperator, TensorField)> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(dim, terms)| (Just(dim), Just(terms), prop::collection::vec((1usize..=5, 1usize..=5), dim)))
        .prop_flat_map(|(dim, terms, shapes)| {
            let n_entries: usize = shapes.iter().map(|(r, c)| r * c).sum::<usize>() * terms;
            let n_in: usize = shapes.iter().map(|s| s.1).product();
            (
                Just(dim),
                Just(terms),
                Just(shapes),
                prop::collection::vec(-1.0f64..1.0, n_entries),
                prop::collection::vec(-1.0f64..1.0, n_in),
            )
        })
        .prop_map(|(dim, terms, shapes, entries, input)| {
            let mut it = entries.into_iter();
            let factors = (0..terms)
                .map(|_| {
                    shapes
                        .iter()
                        .map(|&(r, c)| Matrix1D::new(r, c, it.by_ref().take(r * c).collect()).unwrap())
                        .collect()
                })
                .collect();
            let op = SeparableOperator::new(dim, factors).unwrap();
            let u = TensorField::new(op.input_extents(), input).unwrap();
            (op, u)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sum_factorization_matches_dense_kronecker((op, u) in case()) {
        let fast = apply_separable(&op, &u).unwrap();
        let dense = dense_kronecker_oracle(&op).unwrap().matvec(u.values());
        prop_assert!(rel_l2(fast.values(), &dense) <= 1e-13);
    }

    #[test]
    fn application_is_linear((op, u) in case(), alpha in -3.0f64..3.0) {
        let v = TensorField::from_fn(u.extents(), |i| i.iter().map(|&x| x as f64 + 0.5).product::<f64>().sin()).unwrap();
        let combo = TensorField::new(
            u.extents().to_vec(),
            u.values().iter().zip(v.values()).map(|(a, b)| alpha * a + b).collect(),
        ).unwrap();
        let lhs = apply_separable(&op, &combo).unwrap();
        let au = apply_separable(&op, &u).unwrap();
        let av = apply_separable(&op, &v).unwrap();
        let rhs: Vec<f64> = au.values().iter().zip(av.values()).map(|(a, b)| alpha * a + b).collect();
        let scale = rhs.iter().chain(au.values()).fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in lhs.values().iter().zip(&rhs) {
            prop_assert!((a - b).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn transpose_is_adjoint((op, u) in case()) {
        let w = TensorField::from_fn(&op.output_extents(), |i| i.iter().sum::<usize>() as f64 - 1.5).unwrap();
        let au = apply_separable(&op, &u).unwrap();
        let atw = apply_separable(&op.transposed(), &w).unwrap();
        let lhs: f64 = au.values().iter().zip(w.values()).map(|(a, b)| a * b).sum();
        let rhs: f64 = u.values().iter().zip(atw.values()).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn fp64_precision_path_is_the_reference_contraction((op, u) in case(), axis_pick in 0usize..3) {
        let axis = axis_pick % op.dim();
        let m = &op.terms()[0][axis];
        let a = contract_dir(m, &u, axis).unwrap();
        let b = contract_dir_prec(m, &u, axis, PrecisionMode::Fp64).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn flop_report_is_consistent((op, _u) in case()) {
        let base = count_flops(&op, FlopVariant::Base, Evaluation::Cell);
        let ec = count_flops(&op, FlopVariant::ErrorCorrected, Evaluation::Cell);
        let (num, den) = base.flops_per_dof_exact;
        prop_assert_eq!(num * base.dofs, base.total_flops * den);
        prop_assert!(ec.total_flops >= 3 * base.total_flops);
        let b = &ec.breakdown;
        prop_assert_eq!(b.contractions + b.ec_conversions + b.ec_scaling + b.term_accumulation, ec.total_flops);
    }
}

#[test]
fn oracle_refuses_large_operators() {
    let m = Matrix1D::identity(30);
    let op = SeparableOperator::new(3, vec![vec![m.clone(), m.clone(), m]]).unwrap();
    assert!(dense_kronecker_oracle(&op).is_err());
}
