//! Graph Laplacians, spanning-tree counts via determinants, and sandpile
//! groups as cokernels of reduced Laplacians.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::graph::{build_left_comb, cone, Multigraph, VertexLabel};
use crate::linalg::IntMatrix;
use crate::{Error, Result};

/// Finite abelian group in invariant-factor form: factors f_1 | f_2 | … with
/// every factor at least 2 (trivial factors are dropped on construction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            factors: Vec::new(),
        }
    }

    /// Builds the group from a Smith normal form diagonal, dropping unit
    /// entries.
    pub fn from_snf_diagonal(diag: &[BigInt]) -> Self {
        AbelianGroup {
            factors: diag
                .iter()
                .filter(|d| !d.is_one())
                .map(|d| d.abs())
                .collect(),
        }
    }

    /// Builds the group from claimed invariant factors; each must be positive
    /// and divide the next (after dropping 1s).
    pub fn from_factors(factors: Vec<BigInt>) -> Result<Self> {
        let kept: Vec<BigInt> = factors.into_iter().filter(|f| !f.is_one()).collect();
        for f in &kept {
            if f.sign() != num_bigint::Sign::Plus {
                return Err(Error::InvalidParameter(format!(
                    "invariant factor {f} is not positive"
                )));
            }
        }
        for w in kept.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "invariant factors violate divisibility: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(AbelianGroup { factors: kept })
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product::<BigInt>().max(BigInt::one())
    }

    /// Minimal number of generators.
    pub fn mu(&self) -> usize {
        self.factors.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    /// Factors joined with `+`, or `1` for the trivial group; the compact
    /// form used in CSV reports.
    pub fn factor_string(&self) -> String {
        if self.factors.is_empty() {
            "1".into()
        } else {
            self.factors
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join("+")
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "invariant_factors": self
                .factors
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<String>>(),
            "order": self.order().to_string(),
            "mu": self.mu(),
        })
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| format!("Z_{x}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Full combinatorial Laplacian: degree on the diagonal, minus multiplicity
/// off it.
pub fn laplacian(g: &Multigraph) -> IntMatrix {
    let n = g.vertex_count();
    let mut m = IntMatrix::zeros(n, n);
    for v in 0..n {
        m.set(v, v, BigInt::from(g.degree(v)));
    }
    for (u, v, mult) in g.edges() {
        m.set(u, v, -BigInt::from(mult));
        m.set(v, u, -BigInt::from(mult));
    }
    m
}

/// Laplacian with the row and column of `v0` removed.
pub fn reduced_laplacian(g: &Multigraph, v0: VertexLabel) -> Result<IntMatrix> {
    let skip = g.index_of(v0).ok_or(Error::VertexNotFound(v0))?;
    let n = g.vertex_count();
    let keep: Vec<usize> = (0..n).filter(|&v| v != skip).collect();
    let full = laplacian(g);
    let mut m = IntMatrix::zeros(keep.len(), keep.len());
    for (i, &a) in keep.iter().enumerate() {
        for (j, &b) in keep.iter().enumerate() {
            m.set(i, j, full[(a, b)].clone());
        }
    }
    Ok(m)
}

/// Canonical vertex to reduce at: the apex if present, else the last vertex.
fn reduction_vertex(g: &Multigraph) -> VertexLabel {
    match g.apex() {
        Some(v) => g.label(v),
        None => g.label(g.vertex_count() - 1),
    }
}

/// Spanning-tree count via the reduced-Laplacian determinant.
pub fn tau(g: &Multigraph) -> Result<BigInt> {
    if g.vertex_count() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.vertex_count() == 1 {
        return Ok(BigInt::one());
    }
    reduced_laplacian(g, reduction_vertex(g))?.determinant()
}

/// Sandpile group: cokernel of the reduced Laplacian at the canonical
/// reduction vertex.
pub fn sandpile_group(g: &Multigraph) -> Result<AbelianGroup> {
    if g.vertex_count() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.vertex_count() == 1 {
        return Ok(AbelianGroup::trivial());
    }
    let snf = reduced_laplacian(g, reduction_vertex(g))?.smith_normal_form();
    Ok(AbelianGroup::from_snf_diagonal(&snf.diag))
}

/// Minimal generator count of the sandpile group.
pub fn mu(g: &Multigraph) -> Result<usize> {
    sandpile_group(g).map(|k| k.mu())
}

/// For a tree `t`, tests whether the images of the leaves of `t` other than
/// `omit` generate the sandpile group of `cone(t)`: the reduced Laplacian at
/// the apex is augmented with a unit column per remaining leaf, and the
/// quotient is trivial exactly when the augmented Smith form is all ones at
/// full row rank.
pub fn check_leaf_generators(t: &Multigraph, omit: VertexLabel) -> Result<bool> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    if t.index_of(omit).is_none() {
        return Err(Error::VertexNotFound(omit));
    }
    let c = cone(t)?;
    let n = t.vertex_count();
    let reduced = reduced_laplacian(&c, VertexLabel::Apex)?;
    let kept: Vec<usize> = t
        .leaves()
        .into_iter()
        .filter(|&v| t.label(v) != omit)
        .collect();
    let mut units = IntMatrix::zeros(n, kept.len());
    for (j, &v) in kept.iter().enumerate() {
        units.set(v, j, BigInt::one());
    }
    let augmented = reduced.hstack(&units)?;
    let snf = augmented.smith_normal_form();
    Ok(snf.rank == n && snf.nontrivial().is_empty())
}

/// Minor evidence for the cyclicity of comb-cone sandpile groups: returns
/// whether the leading principal minor of the reduced Laplacian is odd, and
/// the corner minor that equals a power of two.
pub fn comb_claims(p: u32) -> Result<(bool, BigInt)> {
    let c = cone(&build_left_comb(p)?)?;
    let reduced = reduced_laplacian(&c, VertexLabel::Apex)?;
    let principal = reduced.minor_delete(0, 0)?;
    let corner = reduced.minor_delete(0, reduced.cols() - 1)?;
    let two = BigInt::from(2);
    Ok((!principal.is_multiple_of(&two), corner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        build_bicoconut, build_coconut, cone_plus, delete_leaf, FamilyParams,
    };
    use num_traits::Zero;

    fn bi(p: u32, s1: u32, s2: u32) -> Multigraph {
        build_bicoconut(FamilyParams::new(p, s1, s2)).unwrap()
    }

    #[test]
    fn laplacian_of_an_edge() {
        let mut g = Multigraph::new(vec![VertexLabel::Path(1), VertexLabel::Path(2)]).unwrap();
        g.add_edge(0, 1, 1).unwrap();
        let l = laplacian(&g);
        assert_eq!(l[(0, 0)], BigInt::one());
        assert_eq!(l[(0, 1)], BigInt::from(-1));
        assert_eq!(
            reduced_laplacian(&g, VertexLabel::Path(2)).unwrap()[(0, 0)],
            BigInt::one()
        );
    }

    #[test]
    fn reduced_laplacian_block_pattern() {
        let c = cone(&bi(2, 2, 2)).unwrap();
        let m = reduced_laplacian(&c, VertexLabel::Apex).unwrap();
        let expected = IntMatrix::from_rows(&[
            vec![4, -1, -1, -1, 0, 0],
            vec![-1, 4, 0, 0, -1, -1],
            vec![-1, 0, 2, 0, 0, 0],
            vec![-1, 0, 0, 2, 0, 0],
            vec![0, -1, 0, 0, 2, 0],
            vec![0, -1, 0, 0, 0, 2],
        ])
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let c = cone(&bi(3, 2, 1)).unwrap();
        let l = laplacian(&c);
        for r in 0..c.vertex_count() {
            let sum: BigInt = (0..c.vertex_count()).map(|j| l[(r, j)].clone()).sum();
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn tau_matches_frozen_values() {
        assert_eq!(tau(&cone(&bi(2, 1, 1)).unwrap()).unwrap(), BigInt::from(21));
        assert_eq!(tau(&cone(&bi(2, 2, 2)).unwrap()).unwrap(), BigInt::from(128));
        assert_eq!(tau(&cone(&bi(4, 1, 1)).unwrap()).unwrap(), BigInt::from(144));
        let coco = build_coconut(2, 1).unwrap();
        assert_eq!(tau(&cone(&coco).unwrap()).unwrap(), BigInt::from(8));
        assert_eq!(
            tau(&cone_plus(&coco, VertexLabel::Path(1)).unwrap()).unwrap(),
            BigInt::from(13)
        );
    }

    #[test]
    fn tau_of_trivial_cones() {
        let k1 = Multigraph::new(vec![VertexLabel::Path(1)]).unwrap();
        assert_eq!(tau(&cone(&k1).unwrap()).unwrap(), BigInt::one());
        assert_eq!(
            tau(&cone_plus(&k1, VertexLabel::Path(1)).unwrap()).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(tau(&k1).unwrap(), BigInt::one());
    }

    #[test]
    fn tau_rejects_disconnected() {
        let g = Multigraph::new(vec![VertexLabel::Path(1), VertexLabel::Path(2)]).unwrap();
        assert!(matches!(tau(&g), Err(Error::Disconnected)));
        assert!(matches!(sandpile_group(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn tau_is_independent_of_reduction_vertex() {
        let c = cone(&bi(2, 1, 1)).unwrap();
        for v in 0..c.vertex_count() {
            let det = reduced_laplacian(&c, c.label(v)).unwrap().determinant().unwrap();
            assert_eq!(det, BigInt::from(21), "reduced at {}", c.label(v));
        }
    }

    #[test]
    fn group_matches_frozen_values() {
        let k = sandpile_group(&cone(&bi(1, 1, 1)).unwrap()).unwrap();
        assert_eq!(k.factors(), &[BigInt::from(8)]);
        assert!(k.is_cyclic());

        let k = sandpile_group(&cone(&bi(2, 1, 1)).unwrap()).unwrap();
        assert_eq!(k.factors(), &[BigInt::from(21)]);

        let k = sandpile_group(&cone(&bi(2, 2, 2)).unwrap()).unwrap();
        assert_eq!(k.factors(), &[BigInt::from(4), BigInt::from(32)]);
        assert_eq!(k.mu(), 2);
        assert_eq!(k.order(), BigInt::from(128));

        let k = sandpile_group(&cone(&bi(3, 2, 1)).unwrap()).unwrap();
        assert_eq!(k.factors(), &[BigInt::from(136)]);

        let k = sandpile_group(&cone(&bi(5, 3, 2)).unwrap()).unwrap();
        assert_eq!(
            k.factors(),
            &[BigInt::from(2), BigInt::from(2), BigInt::from(1372)]
        );
        assert_eq!(mu(&cone(&bi(5, 3, 2)).unwrap()).unwrap(), 3);
    }

    #[test]
    fn group_order_equals_tau() {
        for (p, s1, s2) in [(1, 1, 1), (2, 1, 2), (3, 2, 2), (4, 1, 3)] {
            let c = cone(&bi(p, s1, s2)).unwrap();
            assert_eq!(sandpile_group(&c).unwrap().order(), tau(&c).unwrap());
        }
    }

    #[test]
    fn group_is_invariant_under_relabeling() {
        let c = cone(&bi(3, 2, 1)).unwrap();
        let n = c.vertex_count();
        let reversed: Vec<usize> = (0..n).rev().collect();
        let permuted = c.permuted(&reversed).unwrap();
        assert_eq!(
            sandpile_group(&permuted).unwrap(),
            sandpile_group(&c).unwrap()
        );
        assert_eq!(tau(&permuted).unwrap(), tau(&c).unwrap());
    }

    #[test]
    fn trivial_group_for_single_vertex() {
        let k1 = Multigraph::new(vec![VertexLabel::Path(1)]).unwrap();
        let k = sandpile_group(&k1).unwrap();
        assert_eq!(k.mu(), 0);
        assert_eq!(k.order(), BigInt::one());
        assert_eq!(k.factor_string(), "1");
        assert_eq!(k.to_string(), "trivial");
    }

    #[test]
    fn from_factors_validates_chain() {
        assert!(AbelianGroup::from_factors(vec![BigInt::from(2), BigInt::from(6)]).is_ok());
        assert!(AbelianGroup::from_factors(vec![BigInt::from(4), BigInt::from(6)]).is_err());
        assert!(AbelianGroup::from_factors(vec![BigInt::from(-2)]).is_err());
        let with_units =
            AbelianGroup::from_factors(vec![BigInt::one(), BigInt::from(3)]).unwrap();
        assert_eq!(with_units.factors(), &[BigInt::from(3)]);
    }

    #[test]
    fn group_json_shape() {
        let k = sandpile_group(&cone(&bi(2, 2, 2)).unwrap()).unwrap();
        let v = k.to_json();
        assert_eq!(v["invariant_factors"][0], "4");
        assert_eq!(v["invariant_factors"][1], "32");
        assert_eq!(v["order"], "128");
        assert_eq!(v["mu"], 2);
        assert_eq!(k.factor_string(), "4+32");
        assert_eq!(k.to_string(), "Z_4 x Z_32");
    }

    #[test]
    fn leaf_generators_for_small_family_trees() {
        let t = bi(2, 2, 2);
        for leaf in t.leaves() {
            assert!(check_leaf_generators(&t, t.label(leaf)).unwrap());
        }
        let comb = build_left_comb(3).unwrap();
        for leaf in comb.leaves() {
            assert!(check_leaf_generators(&comb, comb.label(leaf)).unwrap());
        }
        let coco = build_coconut(3, 2).unwrap();
        for leaf in coco.leaves() {
            assert!(check_leaf_generators(&coco, coco.label(leaf)).unwrap());
        }
    }

    #[test]
    fn leaf_generators_rejects_bad_inputs() {
        let t = bi(2, 1, 1);
        assert!(matches!(
            check_leaf_generators(&t, VertexLabel::CombLeaf(1)),
            Err(Error::VertexNotFound(_))
        ));
        let mut doubled = t.clone();
        doubled.add_edge(0, 1, 1).unwrap();
        assert!(matches!(
            check_leaf_generators(&doubled, VertexLabel::Path(1)),
            Err(Error::NotATree)
        ));
    }

    #[test]
    fn comb_groups_are_cyclic_with_frozen_orders() {
        let expected = [8u64, 52, 332, 2116, 13484];
        for (i, want) in expected.iter().enumerate() {
            let p = i as u32 + 2;
            let c = cone(&build_left_comb(p).unwrap()).unwrap();
            let k = sandpile_group(&c).unwrap();
            assert!(k.is_cyclic(), "p={p}");
            assert_eq!(k.order(), BigInt::from(*want), "p={p}");
            assert_eq!(mu(&c).unwrap(), 1, "p={p}");
        }
    }

    #[test]
    fn comb_claims_match_power_of_two_corner() {
        let (odd, corner) = comb_claims(2).unwrap();
        assert!(odd);
        assert_eq!(corner, BigInt::one());
        let (odd, corner) = comb_claims(5).unwrap();
        assert!(odd);
        assert_eq!(corner, BigInt::from(8));
        for p in 2..=8u32 {
            let (odd, corner) = comb_claims(p).unwrap();
            assert!(odd, "p={p}");
            assert_eq!(corner.abs(), BigInt::from(2).pow(p - 2), "p={p}");
        }
    }

    #[test]
    fn deleting_a_leaf_then_coning_still_matches_determinant() {
        let t = bi(3, 2, 2);
        let (smaller, _) = delete_leaf(&t, VertexLabel::LeftLeaf(2)).unwrap();
        let c = cone(&smaller).unwrap();
        let det = tau(&c).unwrap();
        let brute = crate::oracle::brute_force_tau(&c).unwrap();
        assert_eq!(det, brute);
    }
}
