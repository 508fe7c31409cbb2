use alike_core::exactlinalg::{
    kron, nullspace, rank, ratio, span_equal, ExactMatrix, SubspaceBasis,
};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
    proptest::collection::vec((-4i64..=4, 1i64..=3), rows * cols).prop_map(move |vals| {
        ExactMatrix::from_dense(
            vals.chunks(cols)
                .map(|row| row.iter().map(|&(n, d)| ratio(n, d)).collect())
                .collect(),
        )
        .unwrap()
    })
}

fn sparse_int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
    proptest::collection::vec(prop_oneof![3 => Just(0i64), 1 => -3i64..=3], rows * cols).prop_map(
        move |vals| {
            ExactMatrix::from_dense(
                vals.chunks(cols)
                    .map(|row| row.iter().map(|&v| ratio(v, 1)).collect())
                    .collect(),
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(
        a in matrix(2, 3), c in matrix(3, 2),
        b in matrix(2, 2), d in matrix(2, 3),
    ) {
        let left = kron(&a, &b).matmul(&kron(&c, &d)).unwrap();
        let right = kron(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kron_transpose(a in matrix(2, 3), b in matrix(3, 2)) {
        prop_assert_eq!(kron(&a, &b).transpose(), kron(&a.transpose(), &b.transpose()));
    }

    #[test]
    fn rank_nullity(m in sparse_int_matrix(4, 6)) {
        let ns = nullspace(&m);
        prop_assert_eq!(rank(&m) + ns.dim(), 6);
        for v in ns.vectors() {
            prop_assert!(m.mul_vec(v).unwrap().is_zero());
        }
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn span_is_invariant_under_row_operations(
        m in sparse_int_matrix(4, 5),
        k in 1i64..5,
        swap in 0usize..4,
    ) {
        let rows: Vec<_> = (0..4).map(|r| m.to_dense()[r].clone()).collect();
        let base = SubspaceBasis::from_matrices(1, 5, &rows_as_matrices(&rows)).unwrap();
        let mut mixed = rows.clone();
        mixed.swap(0, swap);
        let scaled: Vec<_> = mixed[1].iter().map(|q| q * ratio(k, 1)).collect();
        mixed[1] = scaled;
        let add: Vec<_> = mixed[2].iter().zip(&mixed[3]).map(|(a, b)| a + b * ratio(-k, 2)).collect();
        mixed[2] = add;
        let other = SubspaceBasis::from_matrices(1, 5, &rows_as_matrices(&mixed)).unwrap();
        prop_assert!(span_equal(&base, &other).unwrap());
        prop_assert_eq!(base.dim(), rank(&m));
    }
}

fn rows_as_matrices(rows: &[Vec<alike_core::Rational>]) -> Vec<ExactMatrix> {
    rows.iter()
        .map(|r| ExactMatrix::from_dense(vec![r.clone()]).unwrap())
        .collect()
}
