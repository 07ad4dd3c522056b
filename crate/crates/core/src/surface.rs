//! The del Pezzo catalog: models of ℙ², ℙ¹×ℙ¹, blow-ups of the plane,
//! and embedded anticanonical models, with numeric invariants,
//! anticanonical bases, blow-up charts and strict transforms, and
//! intersection forms.
//!
//! A single ℙ¹ also appears as a factor kind so that `(ℙ¹)⁴` can be
//! treated block-by-block; it is not itself a del Pezzo surface and
//! only participates in product-level bookkeeping.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{monomials_of_multidegree, proportional, Blocks, Point, Poly};
use crate::scalar::{Ring, Scalar};

// ---------------------------------------------------------------------------
// Divisor arithmetic
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct DivisorClass(pub Vec<i64>);

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionForm {
    pub labels: Vec<String>,
    gram: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn diagonal(labels: Vec<String>, entries: Vec<i64>) -> IntersectionForm {
        let n = labels.len();
        let mut gram = vec![vec![0; n]; n];
        for i in 0..n {
            gram[i][i] = entries[i];
        }
        IntersectionForm { labels, gram }
    }

    pub fn hyperbolic_p1p1() -> IntersectionForm {
        IntersectionForm {
            labels: vec!["H1".into(), "H2".into()],
            gram: vec![vec![0, 1], vec![1, 0]],
        }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn intersect(&self, d: &DivisorClass, e: &DivisorClass) -> i64 {
        assert_eq!(d.0.len(), self.rank(), "divisor basis mismatch");
        assert_eq!(e.0.len(), self.rank(), "divisor basis mismatch");
        let mut acc = 0;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                acc += d.0[i] * self.gram[i][j] * e.0[j];
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    /// A single ℙ¹ block (only as a factor of `(ℙ¹)⁴`-style products).
    P1,
    P2,
    P1xP1,
    /// Blow-up of ℙ² in the listed centers.
    Blowup,
    /// Anticanonical model cut out by equations in its ambient.
    Embedded,
    /// Numeric invariants only (no section basis); used for d ≤ 2 and
    /// for table-level computations.
    Numeric,
}

/// Chart data for one blow-up center: the matrix `T` with `T·(0,1,0) =
/// P`, so that `x = T·(w₀, w₁, w₂)` puts the center at `w = (0:1:0)`;
/// the affine chart is `w₁ = 1` with blow-up coordinates `(u, v) =
/// (w₀, w₂)` and exceptional direction `(l : m) = (u : v)`.
#[derive(Clone)]
pub struct BlowupChart {
    pub center: Vec<Scalar>,
    pub t: Matrix,
}

#[derive(Clone)]
pub struct SurfaceModel {
    pub name: String,
    pub kind: SurfaceKind,
    ring: Ring,
    blocks: Blocks,
    degree: i64,
    euler: i64,
    picard: i64,
    antican_basis: Vec<Poly>,
    antican_degree: Vec<u32>,
    equations: Vec<Poly>,
    charts: Vec<BlowupChart>,
}

impl SurfaceModel {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn euler(&self) -> i64 {
        self.euler
    }
    pub fn picard(&self) -> i64 {
        self.picard
    }
    pub fn antican_basis(&self) -> &[Poly] {
        &self.antican_basis
    }
    pub fn antican_degree(&self) -> &[u32] {
        &self.antican_degree
    }
    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }
    pub fn charts(&self) -> &[BlowupChart] {
        &self.charts
    }

    /// `(degree, euler, picard, h⁰(−K))`.
    pub fn numeric_invariants(&self) -> (i64, i64, i64, i64) {
        (self.degree, self.euler, self.picard, self.degree + 1)
    }

    /// `(K² + χ)/12 = χ(O) = 1` for every del Pezzo model.
    pub fn noether_holds(&self) -> bool {
        self.degree + self.euler == 12
    }

    pub fn p1(ring: &Ring, block: &str, vars: [&str; 2]) -> SurfaceModel {
        let blocks = Blocks::new(&[(block, &vars)]);
        let basis = monomial_basis(ring, &blocks, &[2]);
        SurfaceModel {
            name: format!("P1({block})"),
            kind: SurfaceKind::P1,
            ring: ring.clone(),
            blocks,
            degree: 0,
            euler: 2,
            picard: 1,
            antican_basis: basis,
            antican_degree: vec![2],
            equations: Vec::new(),
            charts: Vec::new(),
        }
    }

    pub fn p2(ring: &Ring, prefix: &str) -> SurfaceModel {
        let vars = Blocks::projective(prefix, 2);
        let vref: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let blocks = Blocks::new(&[(prefix, &vref)]);
        let basis = monomial_basis(ring, &blocks, &[3]);
        SurfaceModel {
            name: "P2".into(),
            kind: SurfaceKind::P2,
            ring: ring.clone(),
            blocks,
            degree: 9,
            euler: 3,
            picard: 1,
            antican_basis: basis,
            antican_degree: vec![3],
            equations: Vec::new(),
            charts: Vec::new(),
        }
    }

    pub fn p1xp1(ring: &Ring, block1: &str, vars1: [&str; 2], block2: &str, vars2: [&str; 2]) -> SurfaceModel {
        let blocks = Blocks::new(&[(block1, &vars1), (block2, &vars2)]);
        let basis = monomial_basis(ring, &blocks, &[2, 2]);
        SurfaceModel {
            name: "P1xP1".into(),
            kind: SurfaceKind::P1xP1,
            ring: ring.clone(),
            blocks,
            degree: 8,
            euler: 4,
            picard: 2,
            antican_basis: basis,
            antican_degree: vec![2, 2],
            equations: Vec::new(),
            charts: Vec::new(),
        }
    }

    /// Blow-up of ℙ² in `centers` (pairwise distinct, no 3 collinear).
    /// The anticanonical basis is the space of cubics through the
    /// centers, either computed by elimination or supplied (`pinned`)
    /// and validated.
    pub fn blowup(
        ring: &Ring,
        prefix: &str,
        centers: Vec<Vec<Scalar>>,
        pinned: Option<Vec<Poly>>,
    ) -> Result<SurfaceModel> {
        let vars = Blocks::projective(prefix, 2);
        let vref: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let blocks = Blocks::new(&[(prefix, &vref)]);
        let k = centers.len() as i64;
        if k > 8 {
            return Err(Error::Degeneracy("at most 8 centers".into()));
        }
        let d = 9 - k;
        validate_general_position(ring, &centers)?;
        let charts: Vec<BlowupChart> = centers
            .iter()
            .map(|c| BlowupChart {
                center: c.clone(),
                t: default_chart_matrix(ring, c),
            })
            .collect();
        let cubics = monomials_of_multidegree(&blocks, &[3]);
        let basis = match pinned {
            Some(b) => {
                if b.len() as i64 != d + 1 {
                    return Err(Error::Degeneracy(format!(
                        "pinned basis has {} elements, expected {}",
                        b.len(),
                        d + 1
                    )));
                }
                let mut vecs = Vec::new();
                for p in &b {
                    if p.block_degrees() != Some(vec![3]) {
                        return Err(Error::Degeneracy("pinned element is not a cubic".into()));
                    }
                    for c in &centers {
                        let pt = Point::new(ring, &blocks, vec![c.clone()])?;
                        if !p.evaluate(&pt).is_zero() {
                            return Err(Error::Degeneracy(
                                "pinned element does not vanish on a center".into(),
                            ));
                        }
                    }
                    vecs.push(p.coords_in(&cubics).unwrap());
                }
                if crate::linalg::span_rank(ring, &vecs)? != b.len() {
                    return Err(Error::Degeneracy("pinned basis is dependent".into()));
                }
                b
            }
            None => {
                // kernel of evaluation at the centers
                let rows: Vec<Vec<Scalar>> = centers
                    .iter()
                    .map(|c| {
                        let pt = Point::new(ring, &blocks, vec![c.clone()]).unwrap();
                        cubics
                            .iter()
                            .map(|m| {
                                Poly::from_terms(ring, &blocks, vec![(m.clone(), ring.one())])
                                    .evaluate(&pt)
                            })
                            .collect()
                    })
                    .collect();
                let kernel = if rows.is_empty() {
                    (0..cubics.len())
                        .map(|i| {
                            let mut v = vec![ring.zero(); cubics.len()];
                            v[i] = ring.one();
                            v
                        })
                        .collect::<Vec<_>>()
                } else {
                    Matrix::from_rows(ring, rows).kernel_basis()?
                };
                if kernel.len() as i64 != d + 1 {
                    return Err(Error::Degeneracy(format!(
                        "cubics through the centers form a {}-dimensional space, expected {}",
                        kernel.len(),
                        d + 1
                    )));
                }
                kernel
                    .into_iter()
                    .map(|v| {
                        Poly::from_terms(
                            ring,
                            &blocks,
                            cubics.iter().cloned().zip(v.into_iter()),
                        )
                    })
                    .collect()
            }
        };
        Ok(SurfaceModel {
            name: format!("dP{d}"),
            kind: SurfaceKind::Blowup,
            ring: ring.clone(),
            blocks,
            degree: d,
            euler: 12 - d,
            picard: 10 - d,
            antican_basis: basis,
            antican_degree: vec![3],
            equations: Vec::new(),
            charts,
        })
    }

    /// Anticanonical model in a product of projective spaces.
    pub fn embedded(
        ring: &Ring,
        name: &str,
        blocks: Blocks,
        equations: Vec<Poly>,
        antican_degree: Vec<u32>,
        degree: i64,
    ) -> Result<SurfaceModel> {
        for e in &equations {
            if e.block_degrees().is_none() {
                return Err(Error::Degeneracy("inhomogeneous defining equation".into()));
            }
        }
        let reducer = IdealReducer::new(ring, &blocks, &equations, &antican_degree)?;
        let basis = reducer.image_basis();
        if basis.len() as i64 != degree + 1 {
            return Err(Error::Degeneracy(format!(
                "section space of {name} has dimension {}, expected {}",
                basis.len(),
                degree + 1
            )));
        }
        Ok(SurfaceModel {
            name: name.into(),
            kind: SurfaceKind::Embedded,
            ring: ring.clone(),
            blocks,
            degree,
            euler: 12 - degree,
            picard: 10 - degree,
            antican_basis: basis,
            antican_degree,
            equations,
            charts: Vec::new(),
        })
    }

    /// Numeric invariants only; no ambient, no basis.
    pub fn numeric(ring: &Ring, degree: i64) -> SurfaceModel {
        assert!((1..=9).contains(&degree));
        let blocks = Blocks::new(&[]);
        SurfaceModel {
            name: format!("dP{degree}"),
            kind: SurfaceKind::Numeric,
            ring: ring.clone(),
            blocks,
            degree,
            euler: 12 - degree,
            picard: 10 - degree,
            antican_basis: Vec::new(),
            antican_degree: Vec::new(),
            equations: Vec::new(),
            charts: Vec::new(),
        }
    }

    pub fn intersection_form(&self) -> IntersectionForm {
        match self.kind {
            SurfaceKind::P1xP1 => IntersectionForm::hyperbolic_p1p1(),
            SurfaceKind::P2 => IntersectionForm::diagonal(vec!["H".into()], vec![1]),
            SurfaceKind::P1 => IntersectionForm::diagonal(vec!["H".into()], vec![0]),
            _ => {
                let k = (9 - self.degree) as usize;
                let mut labels = vec!["H".to_string()];
                let mut entries = vec![1i64];
                for i in 1..=k {
                    labels.push(format!("E{i}"));
                    entries.push(-1);
                }
                IntersectionForm::diagonal(labels, entries)
            }
        }
    }

    /// −K in the intersection-form basis.
    pub fn antican_class(&self) -> DivisorClass {
        match self.kind {
            SurfaceKind::P1xP1 => DivisorClass(vec![2, 2]),
            SurfaceKind::P2 => DivisorClass(vec![3]),
            SurfaceKind::P1 => DivisorClass(vec![2]),
            _ => {
                let k = (9 - self.degree) as usize;
                let mut v = vec![3i64];
                v.extend(std::iter::repeat(-1).take(k));
                DivisorClass(v)
            }
        }
    }

    /// Membership test for an ambient point: equations vanish and, for
    /// blow-up models, the point is none of the centers (those are
    /// replaced by exceptional curves).
    pub fn contains_ambient(&self, pt: &Point) -> bool {
        for e in &self.equations {
            if !e.evaluate(pt).is_zero() {
                return false;
            }
        }
        if self.kind == SurfaceKind::Blowup {
            for ch in &self.charts {
                if proportional(&self.ring, pt.block_coords(0), &ch.center) {
                    return false;
                }
            }
        }
        true
    }

    /// Ambient coordinate formulas of the blow-up chart at a center:
    /// `x = T·(w₀, 1, w₂)` with `w₀, w₂` supplied as polynomials over
    /// `target`.
    pub fn chart_substitution(
        &self,
        center_idx: usize,
        target: &Blocks,
        w0: &Poly,
        w2: &Poly,
    ) -> Vec<Poly> {
        let ch = &self.charts[center_idx];
        let ring = w0.ring().clone();
        let one = Poly::constant(&ring, target, &ring.one());
        (0..3)
            .map(|t| {
                let mut acc = Poly::zero(&ring, target);
                for (j, w) in [(0usize, w0), (1, &one), (2, w2)] {
                    let c = ch.t.at(t, j);
                    if !c.is_zero() {
                        acc = acc.add(&w.scale(c));
                    }
                }
                acc
            })
            .collect()
    }

    /// Value at an exceptional point of the strict transform of a
    /// cubic `p` vanishing at the center: substitute the chart, divide
    /// by `v` once, and evaluate at `v = 0` in the chart determined by
    /// the invertible direction coordinate.
    pub fn strict_transform_eval(
        &self,
        p: &Poly,
        center_idx: usize,
        dir: &[Scalar; 2],
    ) -> Result<Scalar> {
        assert_eq!(self.kind, SurfaceKind::Blowup, "strict transforms need a blow-up model");
        let ring = dir[0].ring().clone();
        let aux = Blocks::new(&[("_chart", &["_v"])]);
        let v = Poly::var(&ring, &aux, "_v");
        // (u, v) = (w0, w2); on the chart where m is a unit, u = v·(l/m);
        // otherwise v = u·(m/l).
        let (w0, w2) = if let Ok(minv) = dir[1].inv() {
            let lval = dir[0].mul(&minv);
            (v.scale(&lval), v.clone())
        } else {
            let linv = dir[0]
                .inv()
                .map_err(|_| Error::Structure("exceptional direction is (0:0)".into()))?;
            let mval = dir[1].mul(&linv);
            (v.clone(), v.scale(&mval))
        };
        let images = self.chart_substitution(center_idx, &aux, &w0, &w2);
        let subs: Vec<Poly> = (0..self.blocks.n_vars()).map(|i| images[i].clone()).collect();
        let chart_poly = p.substitute(&aux, &subs);
        let divided = chart_poly
            .divide_by_var("_v")
            .ok_or_else(|| Error::NotInSystem("section does not vanish at the center".into()))?;
        // constant term = value at v = 0
        Ok(divided.coefficient(&[0]))
    }
}

fn monomial_basis(ring: &Ring, blocks: &Blocks, degs: &[u32]) -> Vec<Poly> {
    monomials_of_multidegree(blocks, degs)
        .into_iter()
        .map(|m| Poly::from_terms(ring, blocks, vec![(m, ring.one())]))
        .collect()
}

fn validate_general_position(ring: &Ring, centers: &[Vec<Scalar>]) -> Result<()> {
    for (i, a) in centers.iter().enumerate() {
        for b in centers.iter().skip(i + 1) {
            if proportional(ring, a, b) {
                return Err(Error::Degeneracy("repeated blow-up center".into()));
            }
        }
    }
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            for k in (j + 1)..centers.len() {
                let m = Matrix::from_rows(
                    ring,
                    vec![centers[i].clone(), centers[j].clone(), centers[k].clone()],
                );
                if m.det().is_zero() {
                    return Err(Error::Degeneracy("three collinear blow-up centers".into()));
                }
            }
        }
    }
    Ok(())
}

/// `T` columns `(c₁, P, c₂)`: prefer `(e₀, P, e₂)` when `P₁ ≠ 0`, else
/// `(e₁, P, e₂)`, else `(e₀, P, e₁)`.  The exceptional direction reads
/// `(l : m) = (w₀ : w₂)` in the resulting chart.
fn default_chart_matrix(ring: &Ring, center: &[Scalar]) -> Matrix {
    let e = |i: usize| {
        let mut v = vec![ring.zero(); 3];
        v[i] = ring.one();
        v
    };
    let cols: [Vec<Scalar>; 3] = if !center[1].is_zero() {
        [e(0), center.to_vec(), e(2)]
    } else if !center[0].is_zero() {
        [e(1), center.to_vec(), e(2)]
    } else {
        [e(0), center.to_vec(), e(1)]
    };
    Matrix::from_fn(ring, 3, 3, |i, j| cols[j][i].clone())
}

// ---------------------------------------------------------------------------
// Points on a surface
// ---------------------------------------------------------------------------

/// A point of a surface model: either an ambient point satisfying the
/// defining equations, or a point of an exceptional ℙ¹ over a blown-up
/// center.
#[derive(Clone)]
pub enum SurfacePoint {
    Ambient(Point),
    Exceptional {
        center: usize,
        direction: [Scalar; 2],
    },
}

impl SurfacePoint {
    pub fn same_point(&self, other: &SurfacePoint, ring: &Ring) -> bool {
        match (self, other) {
            (SurfacePoint::Ambient(a), SurfacePoint::Ambient(b)) => a.projectively_equal(b),
            (
                SurfacePoint::Exceptional {
                    center: c1,
                    direction: d1,
                },
                SurfacePoint::Exceptional {
                    center: c2,
                    direction: d2,
                },
            ) => c1 == c2 && proportional(ring, d1, d2),
            _ => false,
        }
    }
}

impl std::fmt::Debug for SurfacePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfacePoint::Ambient(p) => write!(f, "{p:?}"),
            SurfacePoint::Exceptional { center, direction } => {
                write!(f, "E{}@({} : {})", center, direction[0], direction[1])
            }
        }
    }
}

/// Evaluate a section at a surface point: ambient evaluation, or the
/// strict transform at an exceptional point.
pub fn eval_at_surface_point(s: &SurfaceModel, p: &Poly, q: &SurfacePoint) -> Result<Scalar> {
    match q {
        SurfacePoint::Ambient(pt) => Ok(p.evaluate(pt)),
        SurfacePoint::Exceptional { center, direction } => {
            s.strict_transform_eval(p, *center, direction)
        }
    }
}

// ---------------------------------------------------------------------------
// Linear reduction modulo the degree-matched ideal span
// ---------------------------------------------------------------------------

/// Reduction of forms of a fixed multidegree modulo the linear span of
/// (defining equations × complementary monomials).  The reduction is
/// linear and idempotent, and works for polynomials whose coefficients
/// live in any extension of the equations' ring.
pub struct IdealReducer {
    blocks: Blocks,
    degree: Vec<u32>,
    /// Echelonized span: for each row, its pivot monomial and the
    /// row polynomial (pivot coefficient 1).
    rows: Vec<(Vec<u16>, Poly)>,
    monomials: Vec<Vec<u16>>,
}

impl IdealReducer {
    pub fn new(ring: &Ring, blocks: &Blocks, equations: &[Poly], degree: &[u32]) -> Result<IdealReducer> {
        let monomials = monomials_of_multidegree(blocks, degree);
        let mut span: Vec<Vec<Scalar>> = Vec::new();
        for e in equations {
            let ed = e
                .block_degrees()
                .ok_or_else(|| Error::Degeneracy("inhomogeneous equation".into()))?;
            if ed.len() != degree.len() {
                return Err(Error::Structure("equation blocks mismatch".into()));
            }
            let comp: Vec<u32> = match degree
                .iter()
                .zip(&ed)
                .map(|(&d, &de)| d.checked_sub(de))
                .collect::<Option<Vec<u32>>>()
            {
                Some(c) => c,
                None => continue, // equation degree exceeds the target degree
            };
            for m in monomials_of_multidegree(blocks, &comp) {
                let mono = Poly::from_terms(ring, blocks, vec![(m, ring.one())]);
                let prod = e.mul(&mono);
                span.push(prod.coords_in(&monomials).unwrap());
            }
        }
        let ech = crate::linalg::echelon_basis(ring, &span)?;
        let mut rows = Vec::new();
        for r in ech {
            let pivot = r.iter().position(|c| !c.is_zero()).unwrap();
            let poly = Poly::from_terms(
                ring,
                blocks,
                monomials.iter().cloned().zip(r.into_iter()),
            );
            rows.push((monomials[pivot].clone(), poly));
        }
        Ok(IdealReducer {
            blocks: blocks.clone(),
            degree: degree.to_vec(),
            rows,
            monomials,
        })
    }

    /// Canonical representative modulo the span.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut out = p.clone();
        for (pivot, row) in &self.rows {
            let c = out.coefficient(pivot);
            if !c.is_zero() {
                out = out.sub(&row.scale(&c));
            }
        }
        out
    }

    /// Monomials that survive reduction: a basis of the image.
    pub fn image_basis(&self) -> Vec<Poly> {
        let ring = self
            .rows
            .first()
            .map(|(_, p)| p.ring().clone())
            .unwrap_or_else(Ring::rationals);
        self.monomials
            .iter()
            .filter(|m| !self.rows.iter().any(|(piv, _)| piv == *m))
            .map(|m| {
                self.reduce(&Poly::from_terms(
                    &ring,
                    &self.blocks,
                    vec![(m.clone(), ring.one())],
                ))
            })
            .collect()
    }

    pub fn image_dimension(&self) -> usize {
        self.monomials.len() - self.rows.len()
    }

    pub fn degree(&self) -> &[u32] {
        &self.degree
    }

    /// Coordinates of a (already reduced or not) form in the surviving
    /// monomial basis, after reduction.
    pub fn reduced_coords(&self, p: &Poly) -> Vec<Scalar> {
        let red = self.reduce(p);
        let surviving: Vec<&Vec<u16>> = self
            .monomials
            .iter()
            .filter(|m| !self.rows.iter().any(|(piv, _)| piv == *m))
            .collect();
        surviving.iter().map(|m| red.coefficient(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn plane_and_quadric_invariants() {
        let q = Ring::rationals();
        let p2 = SurfaceModel::p2(&q, "x");
        assert_eq!(p2.numeric_invariants(), (9, 3, 1, 10));
        assert_eq!(p2.antican_basis().len(), 10);
        let quad = SurfaceModel::p1xp1(&q, "a", ["a0", "a1"], "b", ["b0", "b1"]);
        assert_eq!(quad.numeric_invariants(), (8, 4, 2, 9));
        assert_eq!(quad.antican_basis().len(), 9);
        for d in 1..=8 {
            let m = SurfaceModel::numeric(&q, d);
            assert!(m.noether_holds());
        }
        assert!(p2.noether_holds() && quad.noether_holds());
    }

    #[test]
    fn dp7_and_dp8_bases_are_monomial() {
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
        assert_eq!(dp7.numeric_invariants(), (7, 5, 3, 8));
        // x0^3 and x1^3 are exactly the missing monomials
        let b = dp7.blocks().clone();
        let x0cubed = parse_poly(&q, &b, "1 * x0^3").unwrap();
        for s in dp7.antican_basis() {
            assert!(s.coefficient(&[3, 0, 0]).is_zero());
            assert!(s.coefficient(&[0, 3, 0]).is_zero());
        }
        assert!(!x0cubed.is_zero());
        let dp8 = SurfaceModel::blowup(&q, "y", vec![vec![q.one(), q.zero(), q.zero()]], None).unwrap();
        assert_eq!(dp8.antican_basis().len(), 9);
    }

    #[test]
    fn degenerate_centers_are_rejected() {
        let q = Ring::rationals();
        let collinear = SurfaceModel::blowup(
            &q,
            "x",
            vec![
                vec![q.one(), q.zero(), q.zero()],
                vec![q.zero(), q.one(), q.zero()],
                vec![q.one(), q.one(), q.zero()],
            ],
            None,
        );
        assert!(collinear.is_err());
        let repeated = SurfaceModel::blowup(
            &q,
            "x",
            vec![
                vec![q.one(), q.zero(), q.zero()],
                vec![q.int(2), q.zero(), q.zero()],
            ],
            None,
        );
        assert!(repeated.is_err());
    }

    #[test]
    fn intersection_forms() {
        let q = Ring::rationals();
        let dp6 = SurfaceModel::numeric(&q, 6);
        let form = dp6.intersection_form();
        let k = dp6.antican_class();
        assert_eq!(form.intersect(&k, &k), 6);
        // H·E1 = 0, E1·E1 = -1
        let h = DivisorClass(vec![1, 0, 0, 0]);
        let e1 = DivisorClass(vec![0, 1, 0, 0]);
        assert_eq!(form.intersect(&h, &e1), 0);
        assert_eq!(form.intersect(&e1, &e1), -1);
        let quad = SurfaceModel::p1xp1(&q, "a", ["a0", "a1"], "b", ["b0", "b1"]);
        let kq = quad.antican_class();
        assert_eq!(quad.intersection_form().intersect(&kq, &kq), 8);
    }

    #[test]
    fn strict_transform_values() {
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
        let b = dp7.blocks().clone();
        let s = parse_poly(&q, &b, "1 * x0^2 * x1").unwrap();
        // at the exceptional point over (1:0:0) in direction (1:0)
        let v = dp7
            .strict_transform_eval(&s, 0, &[q.one(), q.zero()])
            .unwrap();
        assert!(v.is_one());
        // direction (0:1): x0^2*x1 vanishes on the strict transform there
        let v2 = dp7
            .strict_transform_eval(&s, 0, &[q.zero(), q.one()])
            .unwrap();
        assert!(v2.is_zero());
        // a cubic not vanishing at the center is rejected
        let bad = parse_poly(&q, &b, "1 * x0^3").unwrap();
        assert!(dp7.strict_transform_eval(&bad, 0, &[q.one(), q.one()]).is_err());
    }

    #[test]
    fn ideal_reduction_is_idempotent_and_linear() {
        // dP6 in P2 x P2
        let q = Ring::rationals();
        let blocks = Blocks::new(&[("x1", &["x10", "x11", "x12"]), ("x2", &["x20", "x21", "x22"])]);
        let f = parse_poly(&q, &blocks, "1 * x10 * x20 + -1 * x11 * x21").unwrap();
        let g = parse_poly(&q, &blocks, "1 * x10 * x20 + -1 * x12 * x22").unwrap();
        let dp6 = SurfaceModel::embedded(&q, "dP6", blocks.clone(), vec![f.clone(), g.clone()], vec![1, 1], 6)
            .unwrap();
        assert_eq!(dp6.antican_basis().len(), 7);
        let red = IdealReducer::new(&q, &blocks, dp6.equations(), &[1, 1]).unwrap();
        assert!(red.reduce(&f).is_zero());
        assert_eq!(red.image_dimension(), 7);
        let p = parse_poly(&q, &blocks, "1 * x11 * x21 + 2 * x12 * x20").unwrap();
        let r1 = red.reduce(&p);
        assert!(red.reduce(&r1).sub(&r1).is_zero());
        // linearity
        let p2 = parse_poly(&q, &blocks, "5 * x10 * x22").unwrap();
        let lhs = red.reduce(&p.add(&p2));
        let rhs = red.reduce(&p).add(&red.reduce(&p2));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn fermat_cubic_surface() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let blocks = Blocks::new(&[("x", &["x0", "x1", "x2", "x3"])]);
        let eq = parse_poly(&r3, &blocks, "1 * x0^3 + 1 * x1^3 + 1 * x2^3 + 1 * x3^3").unwrap();
        let dp3 = SurfaceModel::embedded(&r3, "dP3", blocks, vec![eq], vec![1], 3).unwrap();
        assert_eq!(dp3.numeric_invariants(), (3, 9, 7, 4));
        assert_eq!(dp3.antican_basis().len(), 4);
    }
}
