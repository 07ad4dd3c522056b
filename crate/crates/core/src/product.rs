//! Products of del Pezzo surfaces: the section space of −K via
//! Künneth, Euler characteristics and Riemann–Roch values, the
//! divisibility bound M and its table, the automorphism-structure
//! descriptor, the quotient height, and evaluation of sections at
//! points with exceptional factors.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::{Blocks, Point, Poly};
use crate::scalar::{Rat, Ring, Scalar};
use crate::surface::{
    DivisorClass, IdealReducer, SurfaceKind, SurfaceModel, SurfacePoint,
};

// ---------------------------------------------------------------------------
// Numeric formulas
// ---------------------------------------------------------------------------

/// Euler characteristic of a smooth anticanonical threefold in S₁×S₂.
pub fn chi_cy(s1: &SurfaceModel, s2: &SurfaceModel) -> i64 {
    -2 * s1.degree() * s2.degree()
}

/// Riemann–Roch value of the divisor `D₁ ⊞ D₂` on the anticanonical
/// threefold, divided by the order of a freely acting group.
pub fn chi_divisor(
    s1: &SurfaceModel,
    s2: &SurfaceModel,
    d1: &DivisorClass,
    d2: &DivisorClass,
    group_order: i64,
) -> Rat {
    assert!(group_order > 0);
    let f1 = s1.intersection_form();
    let f2 = s2.intersection_form();
    let k1 = DivisorClass(s1.antican_class().0.iter().map(|c| -c).collect());
    let k2 = DivisorClass(s2.antican_class().0.iter().map(|c| -c).collect());
    let d1d1 = f1.intersect(d1, d1);
    let d2d2 = f2.intersect(d2, d2);
    let k1d1 = f1.intersect(&k1, d1);
    let k2d2 = f2.intersect(&k2, d2);
    let main = Rat::new((-(d1d1 * k2d2 + d2d2 * k1d1)).into(), (2 * group_order).into());
    let tail = Rat::new((-(k2d2 + k1d1)).into(), group_order.into());
    main + tail
}

/// `gcd(d₁d₂, d₁d₂ + d₁ + d₂)`: every freely acting group order
/// divides this.
pub fn divisibility_bound(s1: &SurfaceModel, s2: &SurfaceModel) -> i64 {
    let (a, b) = (s1.degree(), s2.degree());
    (a * b).gcd(&(a * b + a + b))
}

/// Labels and degrees of the divisibility-bound table, in its
/// canonical order.
pub fn m_table_labels() -> Vec<(&'static str, i64)> {
    vec![
        ("P2", 9),
        ("P1xP1", 8),
        ("dP8", 8),
        ("dP7", 7),
        ("dP6", 6),
        ("dP5", 5),
        ("dP4", 4),
        ("dP3", 3),
        ("dP2", 2),
        ("dP1", 1),
    ]
}

/// The full 10×10 table of divisibility bounds.
pub fn m_table() -> Vec<Vec<i64>> {
    let labels = m_table_labels();
    labels
        .iter()
        .map(|&(_, a)| {
            labels
                .iter()
                .map(|&(_, b)| (a * b).gcd(&(a * b + a + b)))
                .collect()
        })
        .collect()
}

/// `2·h¹¹ + |χ|/(2·|G|)`, defined when the group order divides
/// `|χ|/2`.
pub fn quotient_height(h11: i64, chi_y: i64, group_order: i64) -> Result<i64> {
    if chi_y >= 0 || group_order <= 0 {
        return Err(Error::Structure("height needs χ < 0 and a positive order".into()));
    }
    let half = chi_y.abs() / 2;
    if chi_y.abs() % 2 != 0 || half % group_order != 0 {
        return Err(Error::NecessaryCondition(format!(
            "group order {group_order} does not divide |χ|/2 = {half}"
        )));
    }
    Ok(2 * h11 + half / group_order)
}

// ---------------------------------------------------------------------------
// Automorphism structure
// ---------------------------------------------------------------------------

/// Which permutations of the ambient blocks the automorphism group of
/// the product allows, depending on the factor models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutStructure {
    /// Distinct factors: no block may move between factors.
    Product,
    /// Two equal factors: the factor swap is the only extra symmetry.
    SquareWithSwap,
    /// Four ℙ¹ blocks: the full symmetric group on the blocks.
    P1FourthPower,
}

// ---------------------------------------------------------------------------
// The product model
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct SectionSpace {
    pub blocks: Blocks,
    pub basis: Vec<Poly>,
    pub degree: Vec<u32>,
}

impl SectionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

pub struct ProductModel {
    pub name: String,
    factors: Vec<SurfaceModel>,
    ring: Ring,
    blocks: Blocks,
    /// Defining equations of the factors, lifted to the product blocks.
    lifted_equations: Vec<Poly>,
    /// Half-open block ranges, one per factor.
    block_ranges: Vec<(usize, usize)>,
}

impl ProductModel {
    pub fn new(name: &str, factors: Vec<SurfaceModel>) -> Result<ProductModel> {
        if factors.len() != 2 && !(factors.len() == 4 && factors.iter().all(|f| f.kind == SurfaceKind::P1)) {
            return Err(Error::Structure(
                "a product model has two surface factors or four P1 blocks".into(),
            ));
        }
        let mut ring = factors[0].ring().clone();
        for f in &factors[1..] {
            if f.ring().extends(&ring) {
                ring = f.ring().clone();
            } else if !ring.extends(f.ring()) {
                return Err(Error::RingMismatch("factor rings are unrelated".into()));
            }
        }
        let mut blocks = factors[0].blocks().clone();
        let mut block_ranges = vec![(0, factors[0].blocks().n_blocks())];
        for f in &factors[1..] {
            let start = blocks.n_blocks();
            blocks = blocks.concat(f.blocks())?;
            block_ranges.push((start, blocks.n_blocks()));
        }
        let mut lifted_equations = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for e in f.equations() {
                lifted_equations.push(lift_to_product(&ring, &factors, i, e)?);
            }
        }
        Ok(ProductModel {
            name: name.into(),
            factors,
            ring,
            blocks,
            lifted_equations,
            block_ranges,
        })
    }

    pub fn factors(&self) -> &[SurfaceModel] {
        &self.factors
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }
    pub fn lifted_equations(&self) -> &[Poly] {
        &self.lifted_equations
    }
    pub fn block_ranges(&self) -> &[(usize, usize)] {
        &self.block_ranges
    }

    /// Which factor a block belongs to.
    pub fn factor_of_block(&self, b: usize) -> usize {
        self.block_ranges
            .iter()
            .position(|&(lo, hi)| lo <= b && b < hi)
            .expect("block index out of range")
    }

    /// The degrees of the two surfaces whose product this is; the four
    /// ℙ¹ blocks pair up into two quadric surfaces.
    pub fn pair_degrees(&self) -> (i64, i64) {
        if self.factors.len() == 4 {
            (8, 8)
        } else {
            (self.factors[0].degree(), self.factors[1].degree())
        }
    }

    pub fn chi_cy(&self) -> i64 {
        let (a, b) = self.pair_degrees();
        -2 * a * b
    }

    pub fn divisibility_bound(&self) -> i64 {
        let (a, b) = self.pair_degrees();
        (a * b).gcd(&(a * b + a + b))
    }

    pub fn aut_structure(&self) -> AutStructure {
        if self.factors.len() == 4
            || self
                .factors
                .iter()
                .all(|f| f.kind == SurfaceKind::P1xP1)
        {
            AutStructure::P1FourthPower
        } else if self.factors[0].name == self.factors[1].name
            && self.factors[0].kind == self.factors[1].kind
            && self.factors[0].degree() == self.factors[1].degree()
        {
            AutStructure::SquareWithSwap
        } else {
            AutStructure::Product
        }
    }

    /// Whether a permutation of the ambient blocks is allowed by the
    /// automorphism structure; moved blocks must keep their size.
    pub fn permutation_allowed(&self, perm: &[usize]) -> bool {
        if perm.len() != self.blocks.n_blocks() {
            return false;
        }
        let mut seen = vec![false; perm.len()];
        for (b, &p) in perm.iter().enumerate() {
            if p >= perm.len() || seen[p] {
                return false;
            }
            seen[p] = true;
            if self.blocks.block_size(b) != self.blocks.block_size(p) {
                return false;
            }
        }
        if self.aut_structure() == AutStructure::P1FourthPower {
            return true;
        }
        // induced map on factors: every block of a factor must read from
        // one and the same source factor
        let nf = self.factors.len();
        let mut fmap = vec![usize::MAX; nf];
        for (b, &p) in perm.iter().enumerate() {
            let tf = self.factor_of_block(b);
            let sf = self.factor_of_block(p);
            if fmap[tf] == usize::MAX {
                fmap[tf] = sf;
            } else if fmap[tf] != sf {
                return false;
            }
        }
        // factors without ambient blocks impose no constraint
        let factor_identity = fmap
            .iter()
            .enumerate()
            .all(|(i, &p)| p == usize::MAX || i == p);
        match self.aut_structure() {
            AutStructure::P1FourthPower => unreachable!(),
            AutStructure::Product => factor_identity,
            AutStructure::SquareWithSwap => factor_identity || fmap == vec![1, 0],
        }
    }

    /// Multidegree of −K on the product.
    pub fn antican_degree(&self) -> Vec<u32> {
        self.factors
            .iter()
            .flat_map(|f| f.antican_degree().iter().copied())
            .collect()
    }

    /// Künneth basis of the anticanonical section space.
    pub fn section_space(&self) -> Result<SectionSpace> {
        for f in &self.factors {
            if f.antican_basis().is_empty() {
                return Err(Error::UnsupportedModel(format!(
                    "{} carries no section basis",
                    f.name
                )));
            }
        }
        let mut basis: Vec<Poly> = vec![];
        for f in &self.factors {
            let fb: Vec<Poly> = f
                .antican_basis()
                .iter()
                .map(|p| p.promote(&self.ring))
                .collect::<Result<Vec<Poly>>>()?;
            basis = if basis.is_empty() {
                fb
            } else {
                let mut next = Vec::with_capacity(basis.len() * fb.len());
                for a in &basis {
                    for b in &fb {
                        next.push(a.kunneth_product(b)?);
                    }
                }
                next
            };
        }
        Ok(SectionSpace {
            blocks: self.blocks.clone(),
            basis,
            degree: self.antican_degree(),
        })
    }

    /// Reduction modulo the lifted factor ideals at the anticanonical
    /// multidegree; identity when no factor has equations.
    pub fn reducer(&self) -> Result<IdealReducer> {
        IdealReducer::new(
            &self.ring,
            &self.blocks,
            &self.lifted_equations,
            &self.antican_degree(),
        )
    }

    /// Membership test: each factor contains its component.
    pub fn contains(&self, pt: &[SurfacePoint]) -> bool {
        if pt.len() != self.factors.len() {
            return false;
        }
        self.factors.iter().zip(pt).all(|(f, q)| match q {
            SurfacePoint::Ambient(p) => f.contains_ambient(p),
            SurfacePoint::Exceptional { center, .. } => {
                f.kind == SurfaceKind::Blowup && *center < f.charts().len()
            }
        })
    }
}

/// A factor polynomial viewed on the product blocks: Künneth product
/// with the constant 1 on every other factor.
fn lift_to_product(
    ring: &Ring,
    factors: &[SurfaceModel],
    which: usize,
    p: &Poly,
) -> Result<Poly> {
    let mut acc: Option<Poly> = None;
    for (i, f) in factors.iter().enumerate() {
        let piece = if i == which {
            p.promote(ring)?
        } else {
            Poly::constant(ring, f.blocks(), &ring.one())
        };
        acc = Some(match acc {
            None => piece,
            Some(a) => a.kunneth_product(&piece)?,
        });
    }
    Ok(acc.unwrap())
}

/// Evaluate a section of the product at a point with possibly
/// exceptional factors.  Ambient coordinates are substituted directly;
/// an exceptional factor contributes its blow-up chart in an auxiliary
/// variable, and the result is the strict-transform value: divide by
/// each auxiliary variable once, then set them all to zero.  The value
/// is well defined up to the nonzero chart scaling, so zero tests are
/// meaningful.
pub fn evaluate_section(x: &ProductModel, s: &Poly, pt: &[SurfacePoint]) -> Result<Scalar> {
    assert_eq!(pt.len(), x.factors().len(), "one point per factor");
    let ring = s.ring().clone();
    // auxiliary blocks, one variable per exceptional factor
    let mut aux_specs: Vec<(String, String)> = Vec::new();
    for (i, q) in pt.iter().enumerate() {
        if matches!(q, SurfacePoint::Exceptional { .. }) {
            aux_specs.push((format!("_ch{i}"), format!("_v{i}")));
        }
    }
    if aux_specs.is_empty() {
        // purely ambient: a single product point
        let mut coords = Vec::new();
        for q in pt {
            if let SurfacePoint::Ambient(p) = q {
                for b in 0..p.blocks().n_blocks() {
                    coords.push(p.block_coords(b).to_vec());
                }
            }
        }
        let point = Point::new(&ring, x.blocks(), coords)?;
        return Ok(s.evaluate(&point));
    }
    let spec_refs: Vec<(&str, Vec<&str>)> = aux_specs
        .iter()
        .map(|(b, v)| (b.as_str(), vec![v.as_str()]))
        .collect();
    let spec_slices: Vec<(&str, &[&str])> = spec_refs
        .iter()
        .map(|(b, v)| (*b, v.as_slice()))
        .collect();
    let aux = Blocks::new(&spec_slices);
    // substitution images for every product variable
    let mut subs: Vec<Poly> = Vec::with_capacity(x.blocks().n_vars());
    let mut aux_idx = 0usize;
    for (i, q) in pt.iter().enumerate() {
        let f = &x.factors()[i];
        match q {
            SurfacePoint::Ambient(p) => {
                for b in 0..p.blocks().n_blocks() {
                    for c in p.block_coords(b) {
                        subs.push(Poly::constant(&ring, &aux, &c.promote(&ring)?));
                    }
                }
            }
            SurfacePoint::Exceptional { center, direction } => {
                let vname = &aux_specs[aux_idx].1;
                aux_idx += 1;
                let v = Poly::var(&ring, &aux, vname);
                let (w0, w2) = if let Ok(minv) = direction[1].inv() {
                    let l = direction[0].mul(&minv).promote(&ring)?;
                    (v.scale(&l), v.clone())
                } else {
                    let linv = direction[0]
                        .inv()
                        .map_err(|_| Error::Structure("exceptional direction is (0:0)".into()))?;
                    let m = direction[1].mul(&linv).promote(&ring)?;
                    (v.clone(), v.scale(&m))
                };
                for img in f.chart_substitution(*center, &aux, &w0, &w2) {
                    subs.push(img);
                }
            }
        }
    }
    let mut chart_poly = s.substitute(&aux, &subs);
    for (_, vname) in &aux_specs {
        chart_poly = chart_poly.divide_by_var(vname).ok_or_else(|| {
            Error::NotInSystem("section does not vanish at a blown-up center".into())
        })?;
    }
    Ok(chart_poly.coefficient(&vec![0u16; aux_specs.len()]))
}

pub fn rat_is_integer(r: &Rat) -> bool {
    use num_traits::One;
    r.denom().is_one()
}

/// Integrality filter behind the divisibility bound: the order must
/// divide |χ(Y)|/2 and leave the Riemann–Roch value at −K integral.
pub fn order_passes_rr_filter(s1: &SurfaceModel, s2: &SurfaceModel, order: i64) -> bool {
    let v = chi_divisor(s1, s2, &s1.antican_class(), &s2.antican_class(), order);
    let half = chi_cy(s1, s2).abs() / 2;
    rat_is_integer(&v) && half > 0 && half % order == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::poly::parse_poly;
    use crate::scalar::rat_int;

    fn dp6(ring: &Ring, suffix: &str) -> SurfaceModel {
        let b1 = format!("x{suffix}1");
        let b2 = format!("x{suffix}2");
        let v1: Vec<String> = (0..3).map(|i| format!("{b1}{i}")).collect();
        let v2: Vec<String> = (0..3).map(|i| format!("{b2}{i}")).collect();
        let v1r: Vec<&str> = v1.iter().map(|s| s.as_str()).collect();
        let v2r: Vec<&str> = v2.iter().map(|s| s.as_str()).collect();
        let blocks = Blocks::new(&[(&b1, &v1r), (&b2, &v2r)]);
        let f = parse_poly(
            ring,
            &blocks,
            &format!("1 * {b1}0 * {b2}0 + -1 * {b1}1 * {b2}1"),
        )
        .unwrap();
        let g = parse_poly(
            ring,
            &blocks,
            &format!("1 * {b1}0 * {b2}0 + -1 * {b1}2 * {b2}2"),
        )
        .unwrap();
        SurfaceModel::embedded(ring, "dP6", blocks, vec![f, g], vec![1, 1], 6).unwrap()
    }

    #[test]
    fn euler_and_divisibility() {
        let q = Ring::rationals();
        let d6 = SurfaceModel::numeric(&q, 6);
        let d3 = SurfaceModel::numeric(&q, 3);
        let d5 = SurfaceModel::numeric(&q, 5);
        let d1 = SurfaceModel::numeric(&q, 1);
        let d7 = SurfaceModel::numeric(&q, 7);
        assert_eq!(chi_cy(&d6, &d6), -72);
        assert_eq!(chi_cy(&d1, &d1), -2);
        assert_eq!(divisibility_bound(&d6, &d3), 9);
        assert_eq!(divisibility_bound(&d5, &d5), 5);
        assert_eq!(divisibility_bound(&d1, &d7), 1);
    }

    #[test]
    fn m_table_matches() {
        let t = m_table();
        // first row: P2 against everything
        assert_eq!(t[0], vec![9, 1, 1, 1, 3, 1, 1, 3, 1, 1]);
        assert_eq!(t[4], vec![3, 2, 2, 1, 12, 1, 2, 9, 4, 1]);
        assert_eq!(t[8], vec![1, 2, 2, 1, 4, 1, 2, 1, 4, 1]);
        // quadric row
        assert_eq!(t[1], vec![1, 16, 16, 1, 2, 1, 4, 1, 2, 1]);
        assert_eq!(t[0][0], 9);
        // symmetry
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(t[i][j], t[j][i]);
            }
        }
    }

    #[test]
    fn riemann_roch_specialization() {
        let q = Ring::rationals();
        for a in 1..=9 {
            for b in 1..=9 {
                let s1 = SurfaceModel::numeric(&q, a);
                let s2 = SurfaceModel::numeric(&q, b);
                let v = chi_divisor(&s1, &s2, &s1.antican_class(), &s2.antican_class(), 1);
                assert_eq!(v, rat_int(a * b + a + b));
            }
        }
        let d6 = SurfaceModel::numeric(&q, 6);
        let v = chi_divisor(&d6, &d6, &d6.antican_class(), &d6.antican_class(), 12);
        assert_eq!(v, rat_int(4));
        // multiples of -K stay divisible by the bound
        for n in -3i64..=3 {
            let d5 = SurfaceModel::numeric(&q, 5);
            let cls = DivisorClass(d5.antican_class().0.iter().map(|c| n * c).collect());
            let v = chi_divisor(&d5, &d5, &cls, &cls, 1);
            assert!(rat_is_integer(&v));
            let m = divisibility_bound(&d5, &d5);
            let num = v.numer().clone();
            assert!((num % num_bigint::BigInt::from(m)).is_zero());
        }
    }

    #[test]
    fn section_space_dimensions() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let a = dp6(&r3, "a");
        let b = dp6(&r3, "b");
        let x = ProductModel::new("dP6xdP6", vec![a, b]).unwrap();
        assert_eq!(x.section_space().unwrap().dimension(), 49);
        assert_eq!(x.chi_cy(), -72);
        assert_eq!(x.aut_structure(), AutStructure::SquareWithSwap);

        let q = Ring::rationals();
        let p1s: Vec<SurfaceModel> = (0..4)
            .map(|i| {
                let b = format!("t{i}");
                let v0 = format!("t{i}0");
                let v1 = format!("t{i}1");
                SurfaceModel::p1(&q, &b, [&v0, &v1])
            })
            .collect();
        let p14 = ProductModel::new("(P1)^4", p1s).unwrap();
        assert_eq!(p14.section_space().unwrap().dimension(), 81);
        assert_eq!(p14.chi_cy(), -128);
        assert_eq!(p14.aut_structure(), AutStructure::P1FourthPower);

        let blocks3 = Blocks::new(&[("x", &["x0", "x1", "x2", "x3"])]);
        let eq = parse_poly(&r3, &blocks3, "1 * x0^3 + 1 * x1^3 + 1 * x2^3 + 1 * x3^3").unwrap();
        let dp3 = SurfaceModel::embedded(&r3, "dP3", blocks3, vec![eq], vec![1], 3).unwrap();
        let p2 = SurfaceModel::p2(&r3, "y");
        let x2 = ProductModel::new("P2xdP3", vec![p2, dp3]).unwrap();
        assert_eq!(x2.section_space().unwrap().dimension(), 40);
        assert_eq!(x2.aut_structure(), AutStructure::Product);
    }

    #[test]
    fn quotient_heights() {
        assert_eq!(quotient_height(1, -72, 12).unwrap(), 5);
        assert_eq!(quotient_height(6, -18, 3).unwrap(), 15);
        assert!(quotient_height(1, -72, 7).is_err());
        // strictly decreasing in the order
        let mut prev = None;
        for order in [1i64, 2, 3, 4, 6, 9, 12, 18, 36] {
            let h = quotient_height(2, -72, order).unwrap();
            if let Some(p) = prev {
                assert!(h < p);
            }
            prev = Some(h);
        }
    }

    #[test]
    fn permutation_policy() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let x = ProductModel::new("dP6xdP6", vec![dp6(&r3, "a"), dp6(&r3, "b")]).unwrap();
        assert!(x.permutation_allowed(&[0, 1, 2, 3]));
        assert!(x.permutation_allowed(&[2, 3, 0, 1])); // factor swap
        assert!(x.permutation_allowed(&[3, 2, 0, 1])); // swap with inner reorder
        assert!(x.permutation_allowed(&[1, 0, 2, 3])); // inner reorder
        assert!(!x.permutation_allowed(&[2, 1, 0, 3])); // splits a factor
        let q = Ring::rationals();
        let p2 = SurfaceModel::p2(&q, "y");
        let d6n = SurfaceModel::numeric(&q, 6);
        let y = ProductModel::new("P2xdP6", vec![p2, d6n]).unwrap();
        assert!(y.permutation_allowed(&[0]));
    }

    #[test]
    fn evaluate_at_exceptional_product_point() {
        let q = Ring::rationals();
        let dp7 = SurfaceModel::blowup(
            &q,
            "x",
            vec![
                vec![q.one(), q.zero(), q.zero()],
                vec![q.zero(), q.one(), q.zero()],
            ],
            None,
        )
        .unwrap();
        let p2 = SurfaceModel::p2(&q, "y");
        let x = ProductModel::new("dP7xP2", vec![dp7, p2.clone()]).unwrap();
        let s = parse_poly(&q, x.blocks(), "1 * x0^2 * x1 * y0^3").unwrap();
        let e_pt = SurfacePoint::Exceptional {
            center: 0,
            direction: [q.one(), q.zero()],
        };
        let amb = SurfacePoint::Ambient(
            Point::new(&q, p2.blocks(), vec![vec![q.one(), q.zero(), q.zero()]]).unwrap(),
        );
        let v = evaluate_section(&x, &s, &[e_pt.clone(), amb.clone()]).unwrap();
        assert!(v.is_one());
        let e_other = SurfacePoint::Exceptional {
            center: 0,
            direction: [q.zero(), q.one()],
        };
        let v2 = evaluate_section(&x, &s, &[e_other, amb.clone()]).unwrap();
        assert!(v2.is_zero());
        // section that misses the center entirely
        let bad = parse_poly(&q, x.blocks(), "1 * x0^3 * y0^3").unwrap();
        assert!(evaluate_section(&x, &bad, &[e_pt, amb]).is_err());
    }
}
