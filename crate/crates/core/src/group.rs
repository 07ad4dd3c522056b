//! Finite automorphism groups of a product of surfaces: block-linear
//! maps composed with a block permutation, closure generation under
//! projective equality, isomorphism-type labels, the representation on
//! the section space, invariant and semi-invariant subspaces, and
//! subgroup enumeration.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::linalg::{echelon_basis, Matrix};
use crate::poly::{monomials_of_multidegree, proportional, PolyMap};
use crate::product::ProductModel;
use crate::product::SectionSpace;
use crate::scalar::{Rat, Ring, Scalar};

pub const GROUP_CAP: usize = 64;

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// An automorphism of the ambient of a product model: target block `b`
/// is `maps[b] · x_{perm[b]}`.
#[derive(Clone)]
pub struct Automorphism {
    ring: Ring,
    perm: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Automorphism {
    pub fn new(ring: &Ring, perm: Vec<usize>, maps: Vec<Matrix>) -> Result<Automorphism> {
        if perm.len() != maps.len() {
            return Err(Error::Structure("one matrix per block".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::Structure("not a block permutation".into()));
            }
            seen[p] = true;
        }
        for m in &maps {
            if m.rows() != m.cols() || m.det().is_zero() {
                return Err(Error::Structure("block map is not invertible".into()));
            }
        }
        Ok(Automorphism {
            ring: ring.clone(),
            perm,
            maps,
        })
    }

    pub fn identity(ring: &Ring, block_sizes: &[usize]) -> Automorphism {
        Automorphism {
            ring: ring.clone(),
            perm: (0..block_sizes.len()).collect(),
            maps: block_sizes
                .iter()
                .map(|&n| Matrix::identity(ring, n))
                .collect(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let ring = if self.ring.extends(&other.ring) {
            self.ring.clone()
        } else {
            other.ring.clone()
        };
        let perm: Vec<usize> = (0..self.perm.len())
            .map(|b| other.perm[self.perm[b]])
            .collect();
        let maps: Vec<Matrix> = (0..self.perm.len())
            .map(|b| self.maps[b].mul(&other.maps[self.perm[b]]))
            .collect();
        Automorphism { ring, perm, maps }
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        let n = self.perm.len();
        let mut inv_perm = vec![0usize; n];
        for (b, &p) in self.perm.iter().enumerate() {
            inv_perm[p] = b;
        }
        let mut maps = Vec::with_capacity(n);
        for c in 0..n {
            maps.push(self.maps[inv_perm[c]].inverse()?);
        }
        Ok(Automorphism {
            ring: self.ring.clone(),
            perm: inv_perm,
            maps,
        })
    }

    /// Equality as projective transformations: same permutation,
    /// matrices equal up to one scalar per block.
    pub fn projectively_equal(&self, other: &Automorphism) -> bool {
        if self.perm != other.perm {
            return false;
        }
        self.maps.iter().zip(&other.maps).all(|(a, b)| {
            let ring = if a.ring().extends(b.ring()) {
                a.ring().clone()
            } else {
                b.ring().clone()
            };
            let av: Vec<Scalar> = (0..a.rows())
                .flat_map(|i| (0..a.cols()).map(move |j| a.at(i, j).clone()))
                .collect();
            let bv: Vec<Scalar> = (0..b.rows())
                .flat_map(|i| (0..b.cols()).map(move |j| b.at(i, j).clone()))
                .collect();
            proportional(&ring, &av, &bv)
        })
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self
                .maps
                .iter()
                .all(|m| m.is_scalar_multiple_of_identity())
    }

    /// Projective order, up to the cap.
    pub fn order(&self, cap: usize) -> Result<usize> {
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_identity() {
                return Ok(k);
            }
            acc = acc.compose(self);
        }
        Err(Error::NotFiniteWithinCap(cap))
    }

    /// The point action as a polynomial map on the model's blocks.
    pub fn to_map(&self, x: &ProductModel) -> Result<PolyMap> {
        let ring = if self.ring.extends(x.ring()) {
            self.ring.clone()
        } else {
            x.ring().clone()
        };
        let maps: Vec<Matrix> = self
            .maps
            .iter()
            .map(|m| m.promote(&ring))
            .collect::<Result<_>>()?;
        PolyMap::linear(&ring, x.blocks(), &self.perm, &maps)
    }

    /// Scale every block map so its first nonzero entry is 1.
    pub fn canonical(&self) -> Result<Automorphism> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for m in &self.maps {
            let lead = (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !m.at(i, j).is_zero())
                .expect("invertible matrix has a nonzero entry");
            let s = m.at(lead.0, lead.1).inv()?;
            maps.push(m.scale(&s));
        }
        Ok(Automorphism {
            ring: self.ring.clone(),
            perm: self.perm.clone(),
            maps,
        })
    }

    /// Check the automorphism preserves the product model: the
    /// permutation is allowed by its structure and the pullback of
    /// every defining equation stays in the equation span of matching
    /// multidegree.
    pub fn preserves(&self, x: &ProductModel) -> Result<()> {
        if !x.permutation_allowed(&self.perm) {
            return Err(Error::InvalidAction(
                "block permutation not allowed by the automorphism structure".into(),
            ));
        }
        let map = self.to_map(x)?;
        let ring = map.ring().clone();
        for e in x.lifted_equations() {
            let pe = map.pullback(&e.promote(&ring)?);
            let deg = pe
                .block_degrees()
                .ok_or_else(|| Error::InvalidAction("inhomogeneous pullback".into()))?;
            let monos = monomials_of_multidegree(x.blocks(), &deg);
            let span: Vec<Vec<Scalar>> = x
                .lifted_equations()
                .iter()
                .filter(|q| q.block_degrees() == Some(deg.clone()))
                .map(|q| q.promote(&ring).and_then(|qq| {
                    qq.coords_in(&monos)
                        .ok_or_else(|| Error::Structure("degree mismatch".into()))
                }))
                .collect::<Result<_>>()?;
            let v = pe
                .coords_in(&monos)
                .ok_or_else(|| Error::InvalidAction("pullback degree mismatch".into()))?;
            if !crate::linalg::in_span(&ring, &span, &v)? {
                return Err(Error::InvalidAction(
                    "pullback of a defining equation leaves the ideal".into(),
                ));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Finite groups
// ---------------------------------------------------------------------------

pub struct FiniteGroup {
    pub elements: Vec<Automorphism>,
    /// `table[i][j]` = index of `elements[i] ∘ elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub generator_indices: Vec<usize>,
}

impl FiniteGroup {
    /// Breadth-first closure of the generators under composition,
    /// deduplicated by projective equality.  `elements[0]` is the
    /// identity.
    pub fn generate(gens: &[Automorphism], cap: usize) -> Result<FiniteGroup> {
        assert!(cap >= 1);
        if gens.is_empty() {
            return Err(Error::Structure("need at least one generator".into()));
        }
        let ring = gens[0].ring().clone();
        let sizes: Vec<usize> = gens[0].maps().iter().map(|m| m.rows()).collect();
        let id = Automorphism::identity(&ring, &sizes);
        let mut elements = vec![id];
        let mut frontier = vec![0usize];
        let mut generator_indices = Vec::new();
        let find = |els: &[Automorphism], a: &Automorphism| {
            els.iter().position(|e| e.projectively_equal(a))
        };
        // seed generators first so their indices are stable
        for g in gens {
            if find(&elements, g).is_none() {
                elements.push(g.clone());
                frontier.push(elements.len() - 1);
            }
            generator_indices.push(find(&elements, g).unwrap());
        }
        while let Some(i) = frontier.pop() {
            for g in gens {
                let prod = elements[i].compose(g);
                if find(&elements, &prod).is_none() {
                    if elements.len() >= cap {
                        return Err(Error::NotFiniteWithinCap(cap));
                    }
                    elements.push(prod);
                    frontier.push(elements.len() - 1);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = elements[i].compose(&elements[j]);
                table[i][j] = find(&elements, &prod)
                    .ok_or_else(|| Error::Inconsistency("closure is not closed".into()))?;
            }
        }
        Ok(FiniteGroup {
            elements,
            table,
            generator_indices,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        (0..self.order())
            .find(|&j| self.table[i][j] == 0)
            .expect("group has inverses")
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut acc = i;
        let mut k = 1;
        while acc != 0 {
            acc = self.table[acc][i];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// Multiset of element orders, as sorted pairs (order, count).
    pub fn order_profile(&self) -> Vec<(usize, usize)> {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for i in 0..self.order() {
            *counts.entry(self.element_order(i)).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn isomorphism_type(&self) -> String {
        isomorphism_type_of(self.order(), self.is_abelian(), &self.order_profile())
    }

    /// All subgroups, as sorted element-index sets, found by closing
    /// every extension of known subgroups by one more element.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let close = |seed: &BTreeSet<usize>| -> BTreeSet<usize> {
            let mut set = seed.clone();
            set.insert(0);
            loop {
                let mut grew = false;
                let cur: Vec<usize> = set.iter().copied().collect();
                for &a in &cur {
                    for &b in &cur {
                        if set.insert(self.table[a][b]) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            set
        };
        let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        found.insert(close(&BTreeSet::new()));
        loop {
            let mut next = found.clone();
            for h in &found {
                for g in 0..n {
                    if !h.contains(&g) {
                        let mut seed = h.clone();
                        seed.insert(g);
                        next.insert(close(&seed));
                    }
                }
            }
            if next.len() == found.len() {
                break;
            }
            found = next;
        }
        found
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// The subgroup on the given element indices as a standalone group.
    pub fn subgroup(&self, indices: &[usize]) -> FiniteGroup {
        let lookup: std::collections::BTreeMap<usize, usize> = indices
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let elements: Vec<Automorphism> =
            indices.iter().map(|&i| self.elements[i].clone()).collect();
        let table: Vec<Vec<usize>> = indices
            .iter()
            .map(|&i| {
                indices
                    .iter()
                    .map(|&j| lookup[&self.table[i][j]])
                    .collect()
            })
            .collect();
        FiniteGroup {
            elements,
            table,
            generator_indices: (0..indices.len()).collect(),
        }
    }
}

/// Label a group by (order, abelianness, element-order multiset).
/// These invariants separate every pair compared in the catalog.
pub fn isomorphism_type_of(
    order: usize,
    abelian: bool,
    profile: &[(usize, usize)],
) -> String {
    if order == 1 {
        return "Z1".into();
    }
    if profile.iter().any(|&(o, _)| o == order) {
        return format!("Z{order}");
    }
    if abelian {
        // match against every abelian group of this order
        for factors in abelian_factorizations(order) {
            if product_order_profile(&factors) == profile {
                let names: Vec<String> = factors.iter().map(|d| format!("Z{d}")).collect();
                return names.join("x");
            }
        }
        return format!("abelian-{order}?");
    }
    // the nonabelian groups the catalog meets
    let dic3 = vec![(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)];
    if order == 12 && profile == dic3.as_slice() {
        return "Dic3".into();
    }
    let q8 = vec![(1, 1), (2, 1), (4, 6)];
    if order == 8 && profile == q8.as_slice() {
        return "Q8".into();
    }
    let s3 = vec![(1, 1), (2, 3), (3, 2)];
    if order == 6 && profile == s3.as_slice() {
        return "S3".into();
    }
    format!("nonabelian-{order}?")
}

/// All multisets of cyclic orders (each > 1) with the given product,
/// in invariant-factor form d₁ | d₂ | …
fn abelian_factorizations(order: usize) -> Vec<Vec<usize>> {
    fn go(order: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if order == 1 {
            let mut v = acc.clone();
            v.sort_unstable();
            // invariant-factor form requires divisibility up the chain
            if v.windows(2).all(|w| w[1] % w[0] == 0) {
                out.push(v);
            }
            return;
        }
        for d in 2..=max.min(order) {
            if order % d == 0 {
                acc.push(d);
                go(order / d, d, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(order, order, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Element-order multiset of ∏ Z_{dᵢ}.
fn product_order_profile(factors: &[usize]) -> Vec<(usize, usize)> {
    let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut tuple = vec![0usize; factors.len()];
    loop {
        let order = tuple
            .iter()
            .zip(factors)
            .map(|(&x, &d)| d / num_integer::gcd(x, d).max(1))
            .fold(1usize, num_integer::lcm);
        *counts.entry(order.max(1)).or_insert(0) += 1;
        // odometer
        let mut i = 0;
        loop {
            if i == factors.len() {
                return counts.into_iter().collect();
            }
            tuple[i] += 1;
            if tuple[i] < factors[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Representation on sections
// ---------------------------------------------------------------------------

/// Matrices of the action on the section space, one per group element,
/// under the convention `g ↦ (g⁻¹)*` so that composition is covariant.
pub struct SectionRepresentation {
    pub ring: Ring,
    pub dim: usize,
    pub matrices: Vec<Matrix>,
}

impl SectionRepresentation {
    /// Build the representation: pull each basis element back along
    /// the inverse element's point map, reduce modulo the product
    /// ideal, and express in the basis.
    pub fn build(
        group: &FiniteGroup,
        space: &SectionSpace,
        x: &ProductModel,
    ) -> Result<SectionRepresentation> {
        let mut ring = x.ring().clone();
        for e in &group.elements {
            if e.ring().extends(&ring) {
                ring = e.ring().clone();
            } else if !ring.extends(e.ring()) {
                return Err(Error::RingMismatch("group ring unrelated to model ring".into()));
            }
        }
        for e in &group.elements {
            e.preserves(x)?;
        }
        let reducer = x.reducer()?;
        let dim = space.basis.len();
        // coordinates of the basis in the surviving monomials
        let basis_coords: Vec<Vec<Scalar>> = space
            .basis
            .iter()
            .map(|p| -> Result<Vec<Scalar>> {
                Ok(reducer.reduced_coords(&p.promote(&ring)?))
            })
            .collect::<Result<_>>()?;
        let ncols = basis_coords[0].len();
        // B^T has the basis coordinate vectors as columns; precompute a
        // left inverse (and consistency rows) once via one rref of the
        // augmented system, then every image solve is a matrix-vector
        // product.
        let bt = Matrix::from_fn(&ring, ncols, dim, |i, j| basis_coords[j][i].clone());
        let aug = Matrix::from_fn(&ring, ncols, dim + ncols, |i, j| {
            if j < dim {
                bt.at(i, j).clone()
            } else if j - dim == i {
                ring.one()
            } else {
                ring.zero()
            }
        });
        let (r, pivots) = aug.rref()?;
        if pivots.len() < dim || pivots[..dim] != (0..dim).collect::<Vec<_>>()[..] {
            return Err(Error::Inconsistency("section basis is dependent".into()));
        }
        // rows 0..dim of the right block: left inverse; rows dim..: any
        // nonzero product flags a vector outside the span
        let solve_vec = |v: &[Scalar]| -> Result<Vec<Scalar>> {
            let mut out = vec![ring.zero(); dim];
            for row in 0..ncols {
                let mut acc = ring.zero();
                for k in 0..ncols {
                    let c = r.at(row, dim + k);
                    if !c.is_zero() && !v[k].is_zero() {
                        acc = acc.add(&c.mul(&v[k]));
                    }
                }
                if row < dim {
                    out[row] = acc;
                } else if !acc.is_zero() {
                    return Err(Error::InvalidAction(
                        "pullback leaves the section space".into(),
                    ));
                }
            }
            Ok(out)
        };
        let mut matrices = Vec::with_capacity(group.order());
        for i in 0..group.order() {
            let inv = &group.elements[group.inverse_index(i)];
            let map = inv.to_map(x)?;
            let mut m = Matrix::zeros(&ring, dim, dim);
            for (col, b) in space.basis.iter().enumerate() {
                let image = map.pullback(&b.promote(&ring)?);
                let v = reducer.reduced_coords(&image);
                let sol = solve_vec(&v)?;
                for (row, s) in sol.into_iter().enumerate() {
                    m.set(row, col, s);
                }
            }
            matrices.push(m);
        }
        Ok(SectionRepresentation { ring, dim, matrices })
    }

    /// `M(ab) = M(a) M(b)` across the whole composition table.
    pub fn verify_homomorphism(&self, group: &FiniteGroup) -> bool {
        let n = group.order();
        for i in 0..n {
            for j in 0..n {
                let prod = self.matrices[i].mul(&self.matrices[j]);
                if !prod.sub(&self.matrices[group.table[i][j]]).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Trace sum / |G| as an exact rational.
    pub fn average_trace(&self) -> Rat {
        let mut acc = Rat::from(BigInt::from(0));
        for m in &self.matrices {
            let t = m
                .trace()
                .to_rat()
                .expect("catalog representations have rational traces");
            acc += t;
        }
        acc / Rat::from(BigInt::from(self.matrices.len() as i64))
    }

    /// Basis of the invariant subspace via the Reynolds average.
    pub fn invariant_subspace(&self) -> Result<Vec<Vec<Scalar>>> {
        let n = self.matrices.len() as i64;
        let mut avg = Matrix::zeros(&self.ring, self.dim, self.dim);
        for m in &self.matrices {
            avg = avg.add(m);
        }
        let scale = self.ring.int(n).inv()?;
        avg = avg.scale(&scale);
        let shifted = avg.sub(&Matrix::identity(&self.ring, self.dim));
        let basis = shifted.kernel_basis()?;
        // every vector must be honestly fixed
        for v in &basis {
            for m in &self.matrices {
                let img = m.mul_vec(v);
                for (a, b) in img.iter().zip(v) {
                    if !a.sub(b).is_zero() {
                        return Err(Error::Inconsistency(
                            "Reynolds fixed vector moved by an element".into(),
                        ));
                    }
                }
            }
        }
        Ok(basis)
    }

    /// All maximal subspaces on which every generator acts by a
    /// scalar: intersect generator eigenspaces over all candidate
    /// eigenvalue combinations.  Returns (scalar per generator, basis).
    pub fn semi_invariant_spaces(
        &self,
        generator_indices: &[usize],
    ) -> Result<Vec<(Vec<Scalar>, Vec<Vec<Scalar>>)>> {
        let mut spaces: Vec<(Vec<Scalar>, Vec<Vec<Scalar>>)> = vec![(
            Vec::new(),
            (0..self.dim)
                .map(|i| {
                    let mut v = vec![self.ring.zero(); self.dim];
                    v[i] = self.ring.one();
                    v
                })
                .collect(),
        )];
        for &gi in generator_indices {
            let m = &self.matrices[gi];
            let candidates = eigenvalue_candidates(m)?;
            let mut next = Vec::new();
            for (chars, basis) in &spaces {
                for lam in &candidates {
                    let shifted = m.sub(&Matrix::identity(&self.ring, self.dim).scale(lam));
                    let eig = shifted.kernel_basis()?;
                    if eig.is_empty() {
                        continue;
                    }
                    let inter = intersect_spans(&self.ring, basis, &eig)?;
                    if !inter.is_empty() {
                        let mut c = chars.clone();
                        c.push(lam.clone());
                        next.push((c, inter));
                    }
                }
            }
            spaces = next;
        }
        Ok(spaces)
    }
}

/// Candidate eigenvalues of a finite-order matrix: find the least `k`
/// with `M^k = s·I`, an explicit `k`-th root `r` of `s` in the ring,
/// and return `{r·ζ_k^j}`.
pub fn eigenvalue_candidates(m: &Matrix) -> Result<Vec<Scalar>> {
    let ring = m.ring().clone();
    let mut acc = m.clone();
    let cap = 64;
    for k in 1..=cap {
        if let Some(s) = scalar_multiple_of_identity(&acc) {
            let r = nth_root_in_ring(&s, k as u32).ok_or_else(|| {
                Error::NeedsExtension(format!("no order-{k} root of {s} in {}", ring.describe()))
            })?;
            let mut out = Vec::new();
            for j in 0..k {
                let z = ring.root_of_unity(k as u32, j as i64).map_err(|_| {
                    Error::NeedsExtension(format!(
                        "ring lacks {k}-th roots of unity for eigenvalue candidates"
                    ))
                })?;
                out.push(r.mul(&z));
            }
            return Ok(out);
        }
        acc = acc.mul(m);
    }
    Err(Error::NotFiniteWithinCap(cap))
}

fn scalar_multiple_of_identity(m: &Matrix) -> Option<Scalar> {
    if !m.is_scalar_multiple_of_identity() {
        return None;
    }
    Some(m.at(0, 0).clone())
}

/// Search for `t` with `t^n = s` among monomials in ζ and the ring
/// generators with a rational coefficient.  Exact and bounded; returns
/// `None` when no such monomial root exists.
pub fn nth_root_in_ring(s: &Scalar, n: u32) -> Option<Scalar> {
    let ring = s.ring().clone();
    if s.is_zero() {
        return Some(ring.zero());
    }
    if s.is_one() {
        return Some(ring.one());
    }
    let sinv = s.inv().ok()?;
    let bounds = ring.gen_bounds();
    // transcendental exponent ranges are guided by the target's terms
    let views = s.term_views();
    let mut ranges: Vec<Vec<i64>> = Vec::new();
    for (gi, (_, bound)) in bounds.iter().enumerate() {
        match bound {
            Some(p) => ranges.push((0..*p as i64).collect()),
            None => {
                let mut opts: BTreeSet<i64> = BTreeSet::new();
                opts.insert(0);
                for (_, gexp, _) in &views {
                    if let Some(&e) = gexp.get(gi) {
                        let lo = 0.min(e);
                        let hi = 0.max(e);
                        for v in lo..=hi {
                            opts.insert(v);
                        }
                    }
                }
                ranges.push(opts.into_iter().collect());
            }
        }
    }
    let gens: Vec<Scalar> = bounds
        .iter()
        .map(|(name, _)| ring.generator(name).unwrap())
        .collect();
    let mut idx = vec![0usize; ranges.len()];
    loop {
        for zexp in 0..ring.order() {
            // candidate monomial with coefficient 1
            let mut mono = ring
                .zeta()
                .pow(zexp as i64)
                .unwrap_or_else(|_| ring.one());
            let mut ok = true;
            for (gi, g) in gens.iter().enumerate() {
                let e = ranges[gi][idx[gi]];
                match g.pow(e) {
                    Ok(p) => mono = mono.mul(&p),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if let Ok(pw) = mono.pow(n as i64) {
                    let quot = s.mul(&pw.inv().ok().unwrap_or_else(|| ring.one()));
                    // need q rational with q^n = quot
                    if let Some(q) = quot.to_rat() {
                        if let Some(c) = rational_nth_root(&q, n) {
                            let cand = mono.scale(&c);
                            if cand
                                .pow(n as i64)
                                .map(|p| p.mul(&sinv).is_one())
                                .unwrap_or(false)
                            {
                                return Some(cand);
                            }
                        }
                    }
                }
            }
        }
        // odometer over generator exponents
        let mut i = 0;
        loop {
            if i == ranges.len() {
                return None;
            }
            idx[i] += 1;
            if idx[i] < ranges[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn rational_nth_root(q: &Rat, n: u32) -> Option<Rat> {
    if q.is_negative() && n % 2 == 0 {
        return None;
    }
    let (num, den) = (q.numer(), q.denom());
    let nn: BigInt = num.abs().nth_root(n);
    let dd: BigInt = den.nth_root(n);
    if nn.pow(n) != num.abs() || dd.pow(n) != *den {
        return None;
    }
    let signed = if q.is_negative() { -nn } else { nn };
    Some(Rat::new(signed, dd))
}

/// Basis of the intersection of two spans.
pub fn intersect_spans(
    ring: &Ring,
    a: &[Vec<Scalar>],
    b: &[Vec<Scalar>],
) -> Result<Vec<Vec<Scalar>>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let dim = a[0].len();
    let cols = a.len() + b.len();
    let m = Matrix::from_fn(ring, dim, cols, |i, j| {
        if j < a.len() {
            a[j][i].clone()
        } else {
            b[j - a.len()][i].neg()
        }
    });
    let kernel = m.kernel_basis()?;
    let mut out = Vec::new();
    for k in kernel {
        let mut v = vec![ring.zero(); dim];
        for (j, coef) in k.iter().take(a.len()).enumerate() {
            for i in 0..dim {
                v[i] = v[i].add(&a[j][i].mul(coef));
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            out.push(v);
        }
    }
    echelon_basis(ring, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Blocks};
    use crate::surface::SurfaceModel;

    fn perm_matrix(ring: &Ring, images: &[usize]) -> Matrix {
        // column j has a 1 in row images[j]: e_j ↦ e_{images[j]}
        let n = images.len();
        Matrix::from_fn(ring, n, n, |i, j| {
            if images[j] == i {
                ring.one()
            } else {
                ring.zero()
            }
        })
    }

    fn dp6_square(ring: &Ring) -> ProductModel {
        let make = |pre: usize| -> SurfaceModel {
            let b1 = format!("x{pre}");
            let b2 = format!("x{}", pre + 1);
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
        };
        ProductModel::new("dP6xdP6", vec![make(1), make(3)]).unwrap()
    }

    /// x ↦ (x2 : x0 : x1), i.e. coordinates cycle backwards.
    fn cyc_back(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(ring, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])
    }
    /// x ↦ (x1 : x2 : x0).
    fn cyc_fwd(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(ring, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])
    }

    fn dic3_generators(ring: &Ring) -> (Automorphism, Automorphism) {
        let i3 = Matrix::identity(ring, 3);
        let g3 = Automorphism::new(
            ring,
            vec![0, 1, 2, 3],
            vec![
                cyc_back(ring),
                cyc_back(ring),
                cyc_fwd(ring),
                cyc_fwd(ring),
            ],
        )
        .unwrap();
        let g4 = Automorphism::new(
            ring,
            vec![3, 2, 0, 1],
            vec![i3.clone(), i3.clone(), i3.clone(), i3],
        )
        .unwrap();
        (g3, g4)
    }

    #[test]
    fn dicyclic_group_closure_and_type() {
        let q = Ring::rationals();
        let (g3, g4) = dic3_generators(&q);
        assert_eq!(g3.order(16).unwrap(), 3);
        assert_eq!(g4.order(16).unwrap(), 4);
        // conjugating the order-3 part by the order-4 part inverts it
        let lhs = g4.compose(&g3);
        let rhs = g3.compose(&g3).compose(&g4);
        assert!(lhs.projectively_equal(&rhs));
        let group = FiniteGroup::generate(&[g3.clone(), g4.clone()], GROUP_CAP).unwrap();
        assert_eq!(group.order(), 12);
        assert!(!group.is_abelian());
        assert_eq!(group.isomorphism_type(), "Dic3");
        // a ∘ a⁻¹ = id
        let inv = g4.inverse().unwrap();
        assert!(g4.compose(&inv).is_identity());
        // the cyclic variant: g3' cycles all four blocks backwards
        let g3p = Automorphism::new(
            &q,
            vec![0, 1, 2, 3],
            vec![cyc_back(&q), cyc_back(&q), cyc_back(&q), cyc_back(&q)],
        )
        .unwrap();
        let g12 = g3p.compose(&g4);
        let cyclic = FiniteGroup::generate(&[g12], GROUP_CAP).unwrap();
        assert_eq!(cyclic.order(), 12);
        assert_eq!(cyclic.isomorphism_type(), "Z12");
    }

    #[test]
    fn generators_preserve_dp6_square() {
        let q = Ring::rationals();
        let x = dp6_square(&q);
        let (g3, g4) = dic3_generators(&q);
        g3.preserves(&x).unwrap();
        g4.preserves(&x).unwrap();
        // an element that maps f off the ideal must be rejected
        let bad = Automorphism::new(
            &q,
            vec![0, 1, 2, 3],
            vec![
                Matrix::from_int_rows(&q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
                Matrix::identity(&q, 3),
                Matrix::identity(&q, 3),
                Matrix::identity(&q, 3),
            ],
        )
        .unwrap();
        assert!(bad.preserves(&x).is_err());
    }

    #[test]
    fn abelian_type_labels() {
        // Z4 x Z2 vs Z8 vs Z2^3 are separated by order profiles
        assert_eq!(
            isomorphism_type_of(8, true, &product_order_profile(&[2, 4])),
            "Z2xZ4"
        );
        assert_eq!(
            isomorphism_type_of(8, true, &product_order_profile(&[2, 2, 2])),
            "Z2xZ2xZ2"
        );
        assert_eq!(
            isomorphism_type_of(9, true, &product_order_profile(&[3, 3])),
            "Z3xZ3"
        );
        assert_eq!(
            isomorphism_type_of(16, true, &product_order_profile(&[2, 8])),
            "Z2xZ8"
        );
    }

    #[test]
    fn subgroup_lattices() {
        // Z3 x Z3 via two commuting diagonal order-3 maps on P2 x P2
        let r3 = Ring::cyclotomic(3).unwrap();
        let w = r3.zeta();
        let d = |a: &Scalar, b: &Scalar, c: &Scalar| {
            Matrix::from_fn(&r3, 3, 3, |i, j| {
                if i != j {
                    r3.zero()
                } else if i == 0 {
                    a.clone()
                } else if i == 1 {
                    b.clone()
                } else {
                    c.clone()
                }
            })
        };
        let one = r3.one();
        let g = Automorphism::new(
            &r3,
            vec![0, 1],
            vec![d(&one, &w, &w.mul(&w)), Matrix::identity(&r3, 3)],
        )
        .unwrap();
        let h = Automorphism::new(
            &r3,
            vec![0, 1],
            vec![Matrix::identity(&r3, 3), d(&one, &w, &w.mul(&w))],
        )
        .unwrap();
        let grp = FiniteGroup::generate(&[g, h], GROUP_CAP).unwrap();
        assert_eq!(grp.order(), 9);
        assert_eq!(grp.isomorphism_type(), "Z3xZ3");
        let subs = grp.subgroups();
        // trivial + four Z3 + whole
        assert_eq!(subs.len(), 6);
        let order3 = subs.iter().filter(|s| s.len() == 3).count();
        assert_eq!(order3, 4);
    }

    #[test]
    fn representation_invariants_on_dp6_square() {
        let q = Ring::rationals();
        let x = dp6_square(&q);
        let (g3, g4) = dic3_generators(&q);
        let group = FiniteGroup::generate(&[g3, g4], GROUP_CAP).unwrap();
        let space = x.section_space().unwrap();
        assert_eq!(space.dimension(), 49);
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        assert!(rep.verify_homomorphism(&group));
        let inv = rep.invariant_subspace().unwrap();
        assert_eq!(inv.len(), 5);
        assert_eq!(rep.average_trace(), crate::scalar::rat_int(5));
    }

    #[test]
    fn nth_roots() {
        let q = Ring::rationals();
        assert_eq!(nth_root_in_ring(&q.int(8), 3), Some(q.int(2)));
        assert_eq!(nth_root_in_ring(&q.int(-8), 3), Some(q.int(-2)));
        assert_eq!(nth_root_in_ring(&q.int(2), 2), None);
        let ring = Ring::cyclotomic(3)
            .unwrap()
            .extend_transcendental("b")
            .unwrap()
            .extend_transcendental("c")
            .unwrap();
        let b = ring.generator("b").unwrap();
        let c = ring.generator("c").unwrap();
        let bc = b.mul(&c);
        let ring_d = ring.extend_algebraic("d", 3, &[bc.clone()]).unwrap();
        let bc2 = bc.promote(&ring_d).unwrap();
        let root = nth_root_in_ring(&bc2, 3).unwrap();
        assert!(root.pow(3).unwrap().sub(&bc2).is_zero());
    }

    #[test]
    fn semi_invariant_decomposition_is_complete() {
        // diagonal order-7 action on dP7 sections, as in the
        // eigenvalue obstruction: the whole space is a direct sum of
        // eigenlines
        let r7 = Ring::cyclotomic(7).unwrap();
        let lam = r7.zeta();
        let dp7 = SurfaceModel::blowup(
            &r7,
            "x",
            vec![
                vec![r7.one(), r7.zero(), r7.zero()],
                vec![r7.zero(), r7.one(), r7.zero()],
            ],
            None,
        )
        .unwrap();
        let dp7b = SurfaceModel::blowup(
            &r7,
            "y",
            vec![
                vec![r7.one(), r7.zero(), r7.zero()],
                vec![r7.zero(), r7.one(), r7.zero()],
            ],
            None,
        )
        .unwrap();
        let x = ProductModel::new("dP7xdP7", vec![dp7, dp7b]).unwrap();
        let diag = |a: &Scalar, b: &Scalar, c: &Scalar| {
            Matrix::from_fn(&r7, 3, 3, |i, j| {
                if i != j {
                    r7.zero()
                } else {
                    [a, b, c][i].clone()
                }
            })
        };
        let one = r7.one();
        let l2 = lam.mul(&lam);
        let g = Automorphism::new(
            &r7,
            vec![0, 1],
            vec![diag(&one, &lam, &l2), diag(&one, &lam, &l2)],
        )
        .unwrap();
        let group = FiniteGroup::generate(&[g], GROUP_CAP).unwrap();
        assert_eq!(group.order(), 7);
        let space = x.section_space().unwrap();
        assert_eq!(space.dimension(), 64);
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        let semi = rep
            .semi_invariant_spaces(&group.generator_indices)
            .unwrap();
        let total: usize = semi.iter().map(|(_, b)| b.len()).sum();
        assert_eq!(total, 64); // abelian: eigenspaces fill the space
        for (chars, basis) in &semi {
            let m = &rep.matrices[group.generator_indices[0]];
            for v in basis {
                let img = m.mul_vec(v);
                for (a, b) in img.iter().zip(v) {
                    assert!(a.sub(&b.mul(&chars[0])).is_zero());
                }
            }
        }
    }

    #[test]
    fn permutation_matrix_helper_behaves() {
        let q = Ring::rationals();
        let m = perm_matrix(&q, &[1, 2, 0]);
        assert!(m.sub(&cyc_fwd(&q).transpose()).is_zero());
    }
}
