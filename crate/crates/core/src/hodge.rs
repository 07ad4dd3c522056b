//! Lefschetz traces on `H²(X)`, invariant dimensions, and Hodge
//! diamonds of free quotients `Y/G`.
//!
//! For a rational surface `S`, an automorphism with finite fixed locus
//! has trace `χ(Fix) − 2` on `H²(S)`; a factor swapped with another
//! contributes zero; the identity contributes the Picard rank.  For a
//! product of four lines, each block fixed by the permutation
//! contributes one.

use crate::error::{Error, Result};
use crate::fixed::{fixed_points_surface_in, restrict_to_factor, FactorFixed};
use crate::group::{Automorphism, FiniteGroup};
use crate::linalg::Matrix;
use crate::product::ProductModel;
use crate::scalar::Ring;
use crate::surface::SurfaceKind;

/// Hodge numbers of a quotient threefold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeDiamond {
    pub h11: i64,
    pub h12: i64,
    pub chi: i64,
    pub height: i64,
}

impl HodgeDiamond {
    /// The seven rows of the diamond, as printed.
    pub fn rows(&self) -> Vec<String> {
        vec![
            "1".to_string(),
            "0 0".to_string(),
            format!("0 {} 0", self.h11),
            format!("1 {} {} 1", self.h12, self.h12),
            format!("0 {} 0", self.h11),
            "0 0".to_string(),
            "1".to_string(),
        ]
    }
}

/// Trace of one element on `H²(X)`.
pub fn trace_h2_element(a: &Automorphism, x: &ProductModel, ring: &Ring) -> Result<i64> {
    let all_lines = x
        .factors()
        .iter()
        .all(|f| matches!(f.kind, SurfaceKind::P1));
    let nf = x.factors().len();
    // which factor each factor reads from
    let mut fmap = vec![usize::MAX; nf];
    for (b, &p) in a.perm().iter().enumerate() {
        fmap[x.factor_of_block(b)] = x.factor_of_block(p);
    }
    let mut total = 0i64;
    for f in 0..nf {
        if fmap[f] != f {
            continue; // moved factor: off-diagonal block, trace zero
        }
        let r = restrict_to_factor(a, x, f, f)
            .ok_or_else(|| Error::InvalidAction("blocks do not align with factors".into()))?;
        if all_lines {
            total += 1; // the action on H²(ℙ¹) is trivial
            continue;
        }
        if r.is_projective_identity() {
            total += x.factors()[f].picard() as i64;
            continue;
        }
        match fixed_points_surface_in(&x.factors()[f], &r, ring)? {
            FactorFixed::Finite(pts) => total += pts.len() as i64 - 2,
            FactorFixed::PositiveDimensional(w) => return Err(Error::NotFinite(w)),
        }
    }
    Ok(total)
}

/// Traces of every group element, in element order.
pub fn trace_table(g: &FiniteGroup, x: &ProductModel, ring: &Ring) -> Result<Vec<i64>> {
    g.elements
        .iter()
        .map(|a| trace_h2_element(a, x, ring))
        .collect()
}

/// `h¹¹(Y/G)` as the character average of the `H²` traces.
pub fn h11_quotient(g: &FiniteGroup, x: &ProductModel, ring: &Ring) -> Result<i64> {
    let traces = trace_table(g, x, ring)?;
    let sum: i64 = traces.iter().sum();
    let order = g.order() as i64;
    if sum % order != 0 {
        return Err(Error::Inconsistency(format!(
            "trace sum {sum} is not divisible by the group order {order}"
        )));
    }
    Ok(sum / order)
}

/// Invariant dimension from explicit `H²`-matrices for the generators:
/// the kernel of the stacked `(M − I)` system.  The matrices must
/// generate a finite group whose order divides `order`.
pub fn h11_from_matrices(mats: &[Matrix], order: usize) -> Result<usize> {
    if mats.is_empty() {
        return Err(Error::Structure("no matrices given".into()));
    }
    let ring = mats[0].ring().clone();
    let n = mats[0].rows();
    // closure under multiplication certifies the relations
    let mut closure = vec![Matrix::identity(&ring, n)];
    let mut frontier = closure.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in mats {
                let p = m.mul(g);
                if !closure.iter().any(|q| q.sub(&p).is_zero()) {
                    closure.push(p.clone());
                    next.push(p);
                }
            }
        }
        if closure.len() > 4 * order {
            return Err(Error::InvalidAction(
                "matrices do not satisfy the group relations".into(),
            ));
        }
        frontier = next;
    }
    if order % closure.len() != 0 {
        return Err(Error::InvalidAction(format!(
            "matrix group has order {} which does not divide {order}",
            closure.len()
        )));
    }
    let stacked = Matrix::from_fn(&ring, n * mats.len(), n, |i, j| {
        let m = &mats[i / n];
        let r = i % n;
        let mut v = m.at(r, j).clone();
        if r == j {
            v = v.sub(&ring.one());
        }
        v
    });
    Ok(stacked.kernel_basis()?.len())
}

/// Full diamond of the free quotient.
pub fn hodge_diamond(g: &FiniteGroup, x: &ProductModel, ring: &Ring) -> Result<HodgeDiamond> {
    let chi_y = x.chi_cy();
    let order = g.order() as i64;
    if chi_y % (2 * order) != 0 {
        return Err(Error::NecessaryCondition(format!(
            "|G| = {order} does not divide χ(Y)/2 = {}",
            chi_y / 2
        )));
    }
    let chi = chi_y / order;
    let h11 = h11_quotient(g, x, ring)?;
    let h12 = h11 - chi / 2;
    if h11 < 1 || h12 < 0 {
        return Err(Error::Inconsistency(format!(
            "implausible diamond h11 = {h11}, h12 = {h12}"
        )));
    }
    Ok(HodgeDiamond {
        h11,
        h12,
        chi,
        height: h11 + h12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GROUP_CAP;
    use crate::poly::{parse_poly, Blocks};
    use crate::surface::SurfaceModel;

    fn dp6_square(ring: &Ring) -> ProductModel {
        let make = |pre: usize| -> SurfaceModel {
            let b1 = format!("x{pre}");
            let b2 = format!("x{}", pre + 1);
            let v1: Vec<String> = (0..3).map(|i| format!("{b1}{i}")).collect();
            let v2: Vec<String> = (0..3).map(|i| format!("{b2}{i}")).collect();
            let v1r: Vec<&str> = v1.iter().map(|s| s.as_str()).collect();
            let v2r: Vec<&str> = v2.iter().map(|s| s.as_str()).collect();
            let blocks = Blocks::new(&[(&b1, &v1r), (&b2, &v2r)]);
            let f = parse_poly(ring, &blocks, &format!("1 * {b1}0 * {b2}0 + -1 * {b1}1 * {b2}1"))
                .unwrap();
            let g = parse_poly(ring, &blocks, &format!("1 * {b1}0 * {b2}0 + -1 * {b1}2 * {b2}2"))
                .unwrap();
            SurfaceModel::embedded(ring, "dP6", blocks, vec![f, g], vec![1, 1], 6).unwrap()
        };
        ProductModel::new("dP6xdP6", vec![make(1), make(3)]).unwrap()
    }

    fn dic3(ring: &Ring) -> FiniteGroup {
        let cyc_back = Matrix::from_int_rows(ring, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let cyc_fwd = Matrix::from_int_rows(ring, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let i3 = Matrix::identity(ring, 3);
        let g3 = Automorphism::new(
            ring,
            vec![0, 1, 2, 3],
            vec![cyc_back.clone(), cyc_back, cyc_fwd.clone(), cyc_fwd],
        )
        .unwrap();
        let g4 = Automorphism::new(
            ring,
            vec![3, 2, 0, 1],
            vec![i3.clone(), i3.clone(), i3.clone(), i3],
        )
        .unwrap();
        FiniteGroup::generate(&[g3, g4], GROUP_CAP).unwrap()
    }

    fn a3_matrix(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(
            ring,
            &[
                &[0, 1, 0, 0, 0, 0, 0, 0],
                &[0, 0, 1, 0, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 0, 0, 0, 1],
            ],
        )
    }

    fn a4_matrix(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(
            ring,
            &[
                &[0, 0, 0, 0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0, 0, 0, 1],
                &[0, -1, -1, -1, 0, 0, 0, 0],
                &[-1, 0, -1, -1, 0, 0, 0, 0],
                &[-1, -1, 0, -1, 0, 0, 0, 0],
                &[1, 1, 1, 2, 0, 0, 0, 0],
            ],
        )
    }

    #[test]
    fn traces_on_dp6_square() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let x = dp6_square(&r3);
        let g = dic3(&r3);
        let traces = trace_table(&g, &x, &r3).unwrap();
        // identity has the full Picard rank
        assert_eq!(traces[0], 8);
        // multiset: identity 8, two order-3 traces 2, one order-2
        // trace 4, two order-6 traces -2, six swap-type zeros
        let mut sorted = traces.clone();
        sorted.sort();
        assert_eq!(sorted, vec![-2, -2, 0, 0, 0, 0, 0, 0, 2, 2, 4, 8]);
        assert_eq!(h11_quotient(&g, &x, &r3).unwrap(), 1);
    }

    #[test]
    fn matrix_path_agrees_on_dp6_square() {
        let q = Ring::rationals();
        let a3 = a3_matrix(&q);
        let a4 = a4_matrix(&q);
        // the explicit trace of the order-3 matrix matches the
        // fixed-point count path: (3-2)+(3-2) = 2
        assert!(a3.trace().sub(&q.int(2)).is_zero());
        assert_eq!(h11_from_matrices(&[a3, a4], 12).unwrap(), 1);
    }

    #[test]
    fn matrix_path_on_fermat_cubic_pair() {
        let q = Ring::rationals();
        let a1 = Matrix::from_int_rows(
            &q,
            &[
                &[0, 0, 0, 1, 0, 0, 0],
                &[-1, -1, -1, 0, -1, -1, -2],
                &[0, 0, 0, 0, -1, -1, -1],
                &[0, -1, 0, 0, 0, -1, -1],
                &[0, 0, -1, 0, 0, -1, -1],
                &[-1, 0, 0, 0, 0, -1, -1],
                &[1, 1, 1, 0, 1, 2, 3],
            ],
        );
        let a2 = Matrix::from_int_rows(
            &q,
            &[
                &[0, 0, 0, -1, -1, 0, -1],
                &[0, 0, 0, 0, 0, 1, 0],
                &[-1, -1, -1, -1, -1, 0, -2],
                &[-1, 0, 0, 0, -1, 0, -1],
                &[0, -1, 0, 0, -1, 0, -1],
                &[0, 0, -1, 0, -1, 0, -1],
                &[1, 1, 1, 1, 2, 0, 3],
            ],
        );
        let m = Matrix::from_fn(&q, 14, 14, |i, j| {
            if i < 7 && j < 7 {
                a1.at(i, j).clone()
            } else if i >= 7 && j >= 7 {
                a2.at(i - 7, j - 7).clone()
            } else {
                q.zero()
            }
        });
        assert_eq!(h11_from_matrices(&[m], 3).unwrap(), 6);
        // wrong order claim is rejected
        let bad = Matrix::from_int_rows(&q, &[&[0, 1], &[1, 1]]);
        assert!(h11_from_matrices(&[bad], 3).is_err());
    }

    #[test]
    fn diamonds() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let x = dp6_square(&r3);
        let g = dic3(&r3);
        let d = hodge_diamond(&g, &x, &r3).unwrap();
        assert_eq!(
            d,
            HodgeDiamond {
                h11: 1,
                h12: 4,
                chi: -6,
                height: 5
            }
        );
        assert_eq!(d.chi, 2 * (d.h11 - d.h12));
        assert_eq!(d.rows()[3], "1 4 4 1");
        // trivial group: the diamond of Y itself
        let id = Automorphism::identity(&r3, &[3, 3, 3, 3]);
        let trivial = FiniteGroup::generate(&[id], GROUP_CAP).unwrap();
        let dy = hodge_diamond(&trivial, &x, &r3).unwrap();
        assert_eq!(dy.h11, 8);
        assert_eq!(dy.chi, -72);
        assert_eq!(dy.h12, 8 + 36);
        // order that fails the divisibility requirement: 72/2 = 36,
        // and a group of order 5 cannot divide it — build a fake test
        // via the P1 quadruple below instead (order constraints there)
    }

    #[test]
    fn line_quadruple_trace_rule() {
        let q = Ring::rationals();
        let p1s: Vec<SurfaceModel> = (0..4)
            .map(|i| {
                let b = format!("t{i}");
                let v0 = format!("t{i}0");
                let v1 = format!("t{i}1");
                SurfaceModel::p1(&q, &b, [&v0, &v1])
            })
            .collect();
        let x = ProductModel::new("(P1)^4", p1s).unwrap();
        let id2 = Matrix::identity(&q, 2);
        let id = Automorphism::identity(&q, &[2, 2, 2, 2]);
        assert_eq!(trace_h2_element(&id, &x, &q).unwrap(), 4);
        // a double swap fixes no block
        let sw = Automorphism::new(
            &q,
            vec![1, 0, 3, 2],
            vec![id2.clone(), id2.clone(), id2.clone(), id2.clone()],
        )
        .unwrap();
        assert_eq!(trace_h2_element(&sw, &x, &q).unwrap(), 0);
        // a single transposition fixes two blocks
        let sw2 = Automorphism::new(
            &q,
            vec![1, 0, 2, 3],
            vec![id2.clone(), id2.clone(), id2.clone(), id2],
        )
        .unwrap();
        assert_eq!(trace_h2_element(&sw2, &x, &q).unwrap(), 2);
    }
}
