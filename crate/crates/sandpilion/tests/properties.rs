//! Randomized invariants of the exact linear algebra and the sandpile
//! pipeline: Smith-form divisibility and unimodular invariance, determinant
//! consistency, lattice membership, and independence of the Laplacian
//! reduction from presentation choices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sandpilion::graph::{build_bicoconut, cone, cone_plus, FamilyParams};
use sandpilion::linalg::{in_image, IntMatrix};
use sandpilion::oracle::brute_force_tau;
use sandpilion::sandpile::{reduced_laplacian, sandpile_group, tau};

fn matrix_with_dim(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(proptest::collection::vec(-6i64..=6, cols), rows)
        .prop_map(|data| IntMatrix::from_rows(&data).unwrap())
}

fn square_matrix(max_n: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_n).prop_flat_map(|n| matrix_with_dim(n, n))
}

type ElementaryOp = (u8, usize, usize, i64);

fn ops_strategy() -> impl Strategy<Value = Vec<ElementaryOp>> {
    proptest::collection::vec((0u8..3, 0usize..8, 0usize..8, -3i64..=3), 0..12)
}

fn apply_row_op(m: &mut IntMatrix, op: ElementaryOp) {
    let n = m.rows();
    let (kind, a, b, c) = (op.0, op.1 % n, op.2 % n, op.3);
    match kind {
        0 if a != b => {
            for j in 0..m.cols() {
                let tmp = m[(a, j)].clone();
                m.set(a, j, m[(b, j)].clone());
                m.set(b, j, tmp);
            }
        }
        1 => {
            for j in 0..m.cols() {
                let v = -m[(a, j)].clone();
                m.set(a, j, v);
            }
        }
        2 if a != b => {
            for j in 0..m.cols() {
                let v = m[(b, j)].clone() + BigInt::from(c) * &m[(a, j)];
                m.set(b, j, v);
            }
        }
        _ => {}
    }
}

fn apply_col_op(m: &mut IntMatrix, op: ElementaryOp) {
    let n = m.cols();
    let (kind, a, b, c) = (op.0, op.1 % n, op.2 % n, op.3);
    match kind {
        0 if a != b => {
            for i in 0..m.rows() {
                let tmp = m[(i, a)].clone();
                m.set(i, a, m[(i, b)].clone());
                m.set(i, b, tmp);
            }
        }
        1 => {
            for i in 0..m.rows() {
                let v = -m[(i, a)].clone();
                m.set(i, a, v);
            }
        }
        2 if a != b => {
            for i in 0..m.rows() {
                let v = m[(i, b)].clone() + BigInt::from(c) * &m[(i, a)];
                m.set(i, b, v);
            }
        }
        _ => {}
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn submatrix_det(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    let mut s = IntMatrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            s.set(i, j, m[(r, c)].clone());
        }
    }
    s.determinant().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_diag_forms_divisibility_chain(m in square_matrix(4)) {
        let snf = m.smith_normal_form();
        for w in snf.diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]), "{} does not divide {}", w[0], w[1]);
        }
        for d in &snf.diag {
            prop_assert!(d.is_positive());
        }
    }

    #[test]
    fn snf_product_matches_determinant(m in square_matrix(4)) {
        let n = m.rows();
        let det = m.determinant().unwrap();
        let snf = m.smith_normal_form();
        if snf.rank < n {
            prop_assert!(det.is_zero());
        } else {
            let product: BigInt = snf.diag.iter().product();
            prop_assert_eq!(det.abs(), product);
        }
    }

    #[test]
    fn snf_invariant_under_unimodular_ops(
        m in square_matrix(4),
        row_ops in ops_strategy(),
        col_ops in ops_strategy(),
    ) {
        let baseline = m.smith_normal_form();
        let mut transformed = m.clone();
        for op in row_ops {
            apply_row_op(&mut transformed, op);
        }
        for op in col_ops {
            apply_col_op(&mut transformed, op);
        }
        let after = transformed.smith_normal_form();
        prop_assert_eq!(baseline.diag, after.diag);
        prop_assert_eq!(baseline.rank, after.rank);
    }

    #[test]
    fn in_image_accepts_column_combinations(
        m in square_matrix(4),
        coeffs in proptest::collection::vec(-4i64..=4, 4),
    ) {
        let n = m.cols();
        let image_vector: Vec<BigInt> = (0..m.rows())
            .map(|r| {
                (0..n)
                    .map(|c| &m[(r, c)] * BigInt::from(coeffs[c % coeffs.len()]))
                    .sum()
            })
            .collect();
        prop_assert!(in_image(&m, &image_vector).unwrap());
    }

    #[test]
    fn minor_gcds_match_invariant_factor_products(m in square_matrix(3)) {
        let n = m.rows();
        let snf = m.smith_normal_form();
        for j in 1..=n {
            let mut gcd = BigInt::zero();
            for rows in combinations(n, j) {
                for cols in combinations(n, j) {
                    gcd = gcd.gcd(&submatrix_det(&m, &rows, &cols));
                }
            }
            if j <= snf.rank {
                let product: BigInt = snf.diag[..j].iter().product();
                prop_assert_eq!(gcd, product, "rank {} minors of size {}", snf.rank, j);
            } else {
                prop_assert!(gcd.is_zero(), "minors of size {} beyond rank {}", j, snf.rank);
            }
        }
    }

    #[test]
    fn block_triangular_determinant_multiplies(
        a in matrix_with_dim(2, 2),
        d in matrix_with_dim(2, 2),
        b in matrix_with_dim(2, 2),
    ) {
        let mut big = IntMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                big.set(i, j, a[(i, j)].clone());
                big.set(i, 2 + j, b[(i, j)].clone());
                big.set(2 + i, 2 + j, d[(i, j)].clone());
            }
        }
        prop_assert_eq!(
            big.determinant().unwrap(),
            a.determinant().unwrap() * d.determinant().unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinant_count_matches_brute_force_on_family_cones(
        p in 1u32..=3,
        s1 in 1u32..=2,
        s2 in 1u32..=2,
        doubled_at in 0usize..16,
    ) {
        let t = build_bicoconut(FamilyParams::new(p, s1, s2)).unwrap();
        let plain = cone(&t).unwrap();
        prop_assert_eq!(tau(&plain).unwrap(), brute_force_tau(&plain).unwrap());
        let v = t.label(doubled_at % t.vertex_count());
        let doubled = cone_plus(&t, v).unwrap();
        prop_assert_eq!(tau(&doubled).unwrap(), brute_force_tau(&doubled).unwrap());
    }

    #[test]
    fn group_is_invariant_under_relabeling(
        (p, s1, s2, perm) in (1u32..=3, 1u32..=2, 1u32..=2).prop_flat_map(|(p, s1, s2)| {
            let n = (p + s1 + s2 + 1) as usize;
            (
                Just(p),
                Just(s1),
                Just(s2),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        }),
    ) {
        let c = cone(&build_bicoconut(FamilyParams::new(p, s1, s2)).unwrap()).unwrap();
        let relabeled = c.permuted(&perm).unwrap();
        prop_assert_eq!(
            sandpile_group(&relabeled).unwrap(),
            sandpile_group(&c).unwrap()
        );
    }

    #[test]
    fn reduction_vertex_does_not_change_tau(
        p in 1u32..=3,
        s1 in 1u32..=2,
        s2 in 1u32..=2,
        pick in 0usize..16,
    ) {
        let c = cone(&build_bicoconut(FamilyParams::new(p, s1, s2)).unwrap()).unwrap();
        let reference = tau(&c).unwrap();
        let v = c.label(pick % c.vertex_count());
        let det = reduced_laplacian(&c, v).unwrap().determinant().unwrap();
        prop_assert_eq!(det, reference);
    }
}

#[test]
fn in_image_rejects_vectors_outside_the_lattice() {
    let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
    assert!(!in_image(&m, &[BigInt::one(), BigInt::zero()]).unwrap());
    assert!(in_image(&m, &[BigInt::from(2), BigInt::from(-4)]).unwrap());
}
