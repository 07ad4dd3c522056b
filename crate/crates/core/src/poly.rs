//! Block-graded multivariate polynomials over [`Scalar`] coefficients.
//!
//! Variables are organized into named blocks, one per projective
//! factor of the ambient (e.g. `x1 = (x10:x11:x12)` for the first ℙ²).
//! Maps between ambients substitute whole coordinate formulas per
//! block, which covers both linear automorphisms and the quadratic
//! Cremona-type maps, and block permutations fall out of the same
//! substitution mechanism.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Rat, Ring, Scalar};

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

#[derive(Debug, PartialEq)]
struct BlockData {
    names: Vec<String>,
    /// Variable names per block.
    vars: Vec<Vec<String>>,
    /// Flat variable list with (block, position) lookup.
    flat: Vec<(usize, usize, String)>,
}

/// Shared, immutable block structure.
#[derive(Clone, Debug)]
pub struct Blocks {
    data: Arc<BlockData>,
}

impl PartialEq for Blocks {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}
impl Eq for Blocks {}

impl Blocks {
    pub fn new(blocks: &[(&str, &[&str])]) -> Blocks {
        let mut names = Vec::new();
        let mut vars = Vec::new();
        let mut flat = Vec::new();
        for (b, (name, vs)) in blocks.iter().enumerate() {
            assert!(!names.contains(&name.to_string()), "duplicate block {name}");
            names.push(name.to_string());
            let mut row = Vec::new();
            for (k, v) in vs.iter().enumerate() {
                assert!(
                    !flat.iter().any(|(_, _, w)| w == v),
                    "duplicate variable {v}"
                );
                row.push(v.to_string());
                flat.push((b, k, v.to_string()));
            }
            vars.push(row);
        }
        Blocks {
            data: Arc::new(BlockData { names, vars, flat }),
        }
    }

    /// Standard block of projective coordinates `{prefix}0..{prefix}{dim}`.
    pub fn projective(prefix: &str, dim: usize) -> Vec<String> {
        (0..=dim).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn n_blocks(&self) -> usize {
        self.data.names.len()
    }

    pub fn n_vars(&self) -> usize {
        self.data.flat.len()
    }

    pub fn block_name(&self, b: usize) -> &str {
        &self.data.names[b]
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.data.names.iter().position(|n| n == name)
    }

    pub fn block_size(&self, b: usize) -> usize {
        self.data.vars[b].len()
    }

    pub fn block_vars(&self, b: usize) -> &[String] {
        &self.data.vars[b]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.data.flat.iter().position(|(_, _, v)| v == name)
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.data.flat[i].2
    }

    /// (block, position-within-block) of a flat variable index.
    pub fn var_home(&self, i: usize) -> (usize, usize) {
        let (b, k, _) = self.data.flat[i];
        (b, k)
    }

    /// Flat index of position `k` in block `b`.
    pub fn flat_index(&self, b: usize, k: usize) -> usize {
        self.data
            .flat
            .iter()
            .position(|&(bb, kk, _)| bb == b && kk == k)
            .unwrap()
    }

    /// Concatenation with disjoint names: the Künneth ambient.
    pub fn concat(&self, other: &Blocks) -> Result<Blocks> {
        for n in &other.data.names {
            if self.data.names.contains(n) {
                return Err(Error::Structure(format!("overlapping block {n}")));
            }
        }
        for (_, _, v) in &other.data.flat {
            if self.data.flat.iter().any(|(_, _, w)| w == v) {
                return Err(Error::Structure(format!("overlapping variable {v}")));
            }
        }
        let spec: Vec<(String, Vec<String>)> = self
            .data
            .names
            .iter()
            .cloned()
            .zip(self.data.vars.iter().cloned())
            .chain(
                other
                    .data
                    .names
                    .iter()
                    .cloned()
                    .zip(other.data.vars.iter().cloned()),
            )
            .collect();
        let borrowed: Vec<(&str, Vec<&str>)> = spec
            .iter()
            .map(|(n, vs)| (n.as_str(), vs.iter().map(|v| v.as_str()).collect()))
            .collect();
        let slices: Vec<(&str, &[&str])> = borrowed
            .iter()
            .map(|(n, vs)| (*n, vs.as_slice()))
            .collect();
        Ok(Blocks::new(&slices))
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// A multivariate polynomial with exact coefficients; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Poly {
    ring: Ring,
    blocks: Blocks,
    terms: BTreeMap<Vec<u16>, Scalar>,
}

impl Poly {
    pub fn zero(ring: &Ring, blocks: &Blocks) -> Poly {
        Poly {
            ring: ring.clone(),
            blocks: blocks.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, blocks: &Blocks, c: &Scalar) -> Poly {
        let mut p = Poly::zero(ring, blocks);
        if !c.is_zero() {
            p.terms.insert(
                vec![0; blocks.n_vars()],
                c.promote(ring).expect("constant outside the ring"),
            );
        }
        p
    }

    pub fn var(ring: &Ring, blocks: &Blocks, name: &str) -> Poly {
        let i = blocks
            .var_index(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut expo = vec![0u16; blocks.n_vars()];
        expo[i] = 1;
        let mut p = Poly::zero(ring, blocks);
        p.terms.insert(expo, ring.one());
        p
    }

    pub fn monomial(ring: &Ring, blocks: &Blocks, c: &Scalar, exps: &[(&str, u16)]) -> Poly {
        let mut expo = vec![0u16; blocks.n_vars()];
        for (name, e) in exps {
            let i = blocks
                .var_index(name)
                .unwrap_or_else(|| panic!("unknown variable {name}"));
            expo[i] += e;
        }
        let mut p = Poly::zero(ring, blocks);
        if !c.is_zero() {
            p.terms
                .insert(expo, c.promote(ring).expect("coefficient outside the ring"));
        }
        p
    }

    pub fn from_terms(
        ring: &Ring,
        blocks: &Blocks,
        terms: impl IntoIterator<Item = (Vec<u16>, Scalar)>,
    ) -> Poly {
        let mut p = Poly::zero(ring, blocks);
        for (e, c) in terms {
            assert_eq!(e.len(), blocks.n_vars());
            if c.is_zero() {
                continue;
            }
            let c = c.promote(ring).expect("coefficient outside the ring");
            let entry = p.terms.entry(e).or_insert_with(|| ring.zero());
            *entry = entry.add(&c);
        }
        p.terms.retain(|_, c| !c.is_zero());
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, expo: &[u16]) -> Scalar {
        self.terms
            .get(expo)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    fn assert_compatible(&self, o: &Poly) {
        assert!(self.blocks == o.blocks, "polynomial block mismatch");
    }

    /// Re-tag with a larger coefficient ring.
    pub fn promote(&self, ring: &Ring) -> Result<Poly> {
        if &self.ring == ring {
            return Ok(self.clone());
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.promote(ring)?);
        }
        Ok(Poly {
            ring: ring.clone(),
            blocks: self.blocks.clone(),
            terms,
        })
    }

    fn unified(&self, o: &Poly) -> (Poly, Poly) {
        self.assert_compatible(o);
        if self.ring == o.ring {
            (self.clone(), o.clone())
        } else if self.ring.extends(&o.ring) {
            (self.clone(), o.promote(&self.ring).unwrap())
        } else {
            (self.promote(&o.ring).unwrap(), o.clone())
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (mut a, b) = self.unified(o);
        for (e, c) in b.terms {
            let entry = a.terms.entry(e).or_insert_with(|| a.ring.zero());
            *entry = entry.add(&c);
        }
        a.terms.retain(|_, c| !c.is_zero());
        a
    }

    pub fn neg(&self) -> Poly {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = c.neg();
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(&self.ring, &self.blocks);
        }
        let (s, ring) = if self.ring.extends(s.ring()) {
            (s.promote(&self.ring).unwrap(), self.ring.clone())
        } else {
            (s.clone(), s.ring().clone())
        };
        let mut out = Poly::zero(&ring, &self.blocks);
        for (e, c) in &self.terms {
            let v = c.promote(&ring).unwrap().mul(&s);
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    pub fn scale_rat(&self, q: &Rat) -> Poly {
        self.scale(&self.ring.rat(q.clone()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let (a, b) = self.unified(o);
        let mut out = Poly::zero(&a.ring, &a.blocks);
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let entry = out.terms.entry(e).or_insert_with(|| a.ring.zero());
                *entry = entry.add(&c);
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(&self.ring, &self.blocks, &self.ring.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative.
    pub fn differentiate(&self, var: &str) -> Poly {
        let i = self
            .blocks
            .var_index(var)
            .unwrap_or_else(|| panic!("unknown variable {var}"));
        let mut out = Poly::zero(&self.ring, &self.blocks);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let v = c.scale(&Rat::from_integer(e[i].into()));
            let entry = out.terms.entry(e2).or_insert_with(|| self.ring.zero());
            *entry = entry.add(&v);
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Exact evaluation at per-block coordinates; scale-dependent on
    /// representatives, which is fine for all vanishing checks.
    pub fn evaluate(&self, p: &Point) -> Scalar {
        assert!(self.blocks == p.blocks, "point/polynomial block mismatch");
        let flat: Vec<&Scalar> = (0..self.blocks.n_vars())
            .map(|i| {
                let (b, k) = self.blocks.var_home(i);
                &p.coords[b][k]
            })
            .collect();
        let ring = if p.ring.extends(&self.ring) {
            p.ring.clone()
        } else {
            self.ring.clone()
        };
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let mut v = c.promote(&ring).expect("incompatible rings in evaluate");
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    v = v.mul(
                        &flat[i]
                            .promote(&ring)
                            .expect("incompatible rings in evaluate")
                            .pow(ei as i64)
                            .unwrap(),
                    );
                }
            }
            acc = acc.add(&v);
        }
        acc
    }

    /// Substitute each variable `i` by `subs[i]` when given (all
    /// substitutes over the same target blocks).
    pub fn substitute(&self, target: &Blocks, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.blocks.n_vars());
        let ring = subs
            .iter()
            .map(|s| s.ring().clone())
            .fold(self.ring.clone(), |a, b| {
                if b.extends(&a) {
                    b
                } else {
                    a
                }
            });
        let mut out = Poly::zero(&ring, target);
        let mut pow_cache: BTreeMap<(usize, u16), Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(&ring, target, &c.promote(&ring).unwrap());
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                let p = pow_cache
                    .entry((i, ei))
                    .or_insert_with(|| subs[i].pow(ei as u32))
                    .clone();
                term = term.mul(&p);
            }
            out = out.add(&term);
        }
        out
    }

    /// Per-block multidegree when the polynomial is homogeneous in
    /// every block.
    pub fn block_degrees(&self) -> Option<Vec<u32>> {
        let nb = self.blocks.n_blocks();
        let mut degs: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            let mut d = vec![0u32; nb];
            for (i, &ei) in e.iter().enumerate() {
                let (b, _) = self.blocks.var_home(i);
                d[b] += ei as u32;
            }
            match &degs {
                None => degs = Some(d),
                Some(prev) => {
                    if *prev != d {
                        return None;
                    }
                }
            }
        }
        degs.or_else(|| Some(vec![0; nb]))
    }

    /// Exact division by a variable; `None` if some term lacks it.
    pub fn divide_by_var(&self, var: &str) -> Option<Poly> {
        let i = self.blocks.var_index(var)?;
        let mut out = Poly::zero(&self.ring, &self.blocks);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return None;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c.clone());
        }
        Some(out)
    }

    /// Coordinates in an explicit monomial basis; `None` if a term
    /// falls outside the basis.
    pub fn coords_in(&self, basis_monomials: &[Vec<u16>]) -> Option<Vec<Scalar>> {
        let mut out = vec![self.ring.zero(); basis_monomials.len()];
        let pos: BTreeMap<&Vec<u16>, usize> = basis_monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        for (e, c) in &self.terms {
            let i = *pos.get(e)?;
            out[i] = c.clone();
        }
        Some(out)
    }

    /// Künneth product: merge disjoint ambients.
    pub fn kunneth_product(&self, o: &Poly) -> Result<Poly> {
        let blocks = self.blocks.concat(&o.blocks)?;
        let ring = if o.ring.extends(&self.ring) {
            o.ring.clone()
        } else {
            self.ring.clone()
        };
        let mut out = Poly::zero(&ring, &blocks);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = e1.clone();
                e.extend_from_slice(e2);
                let c = c1.promote(&ring).unwrap().mul(&c2.promote(&ring).unwrap());
                out.terms.insert(e, c);
            }
        }
        Ok(out)
    }
}

/// All exponent tuples of the given per-block multidegrees: the
/// monomial basis of `O(d₁,…,d_k)` on the ambient.
pub fn monomials_of_multidegree(blocks: &Blocks, degs: &[u32]) -> Vec<Vec<u16>> {
    assert_eq!(degs.len(), blocks.n_blocks());
    let mut per_block: Vec<Vec<Vec<u16>>> = Vec::new();
    for b in 0..blocks.n_blocks() {
        per_block.push(compositions(degs[b], blocks.block_size(b)));
    }
    let mut out: Vec<Vec<u16>> = vec![Vec::new()];
    for opts in &per_block {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut e = prefix.clone();
                e.extend_from_slice(o);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u16>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total as u16]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for rest in compositions(total - first, parts - 1) {
            let mut e = vec![first as u16];
            e.extend(rest);
            out.push(e);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of the ambient: one projective coordinate tuple per block.
#[derive(Clone, PartialEq)]
pub struct Point {
    ring: Ring,
    blocks: Blocks,
    coords: Vec<Vec<Scalar>>,
}

impl Point {
    pub fn new(ring: &Ring, blocks: &Blocks, coords: Vec<Vec<Scalar>>) -> Result<Point> {
        if coords.len() != blocks.n_blocks() {
            return Err(Error::Structure("wrong number of blocks in point".into()));
        }
        let mut promoted = Vec::new();
        for (b, c) in coords.iter().enumerate() {
            if c.len() != blocks.block_size(b) {
                return Err(Error::Structure(format!(
                    "block {} expects {} coordinates",
                    blocks.block_name(b),
                    blocks.block_size(b)
                )));
            }
            if c.iter().all(|v| v.is_zero()) {
                return Err(Error::Structure(format!(
                    "all coordinates vanish in block {}",
                    blocks.block_name(b)
                )));
            }
            promoted.push(
                c.iter()
                    .map(|v| v.promote(ring).expect("coordinate outside the ring"))
                    .collect(),
            );
        }
        Ok(Point {
            ring: ring.clone(),
            blocks: blocks.clone(),
            coords: promoted,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }
    pub fn block_coords(&self, b: usize) -> &[Scalar] {
        &self.coords[b]
    }

    pub fn promote(&self, ring: &Ring) -> Result<Point> {
        let mut coords = Vec::new();
        for c in &self.coords {
            coords.push(c.iter().map(|v| v.promote(ring)).collect::<Result<Vec<_>>>()?);
        }
        Point::new(ring, &self.blocks, coords)
    }

    /// Projective equality: all 2×2 cross products vanish per block.
    pub fn projectively_equal(&self, other: &Point) -> bool {
        if self.blocks != other.blocks {
            return false;
        }
        let ring = if self.ring.extends(&other.ring) {
            self.ring.clone()
        } else {
            other.ring.clone()
        };
        for b in 0..self.blocks.n_blocks() {
            if !proportional(&ring, &self.coords[b], &other.coords[b]) {
                return false;
            }
        }
        true
    }
}

pub(crate) fn proportional(ring: &Ring, a: &[Scalar], b: &[Scalar]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let ai = a[i].promote(ring).unwrap();
            let aj = a[j].promote(ring).unwrap();
            let bi = b[i].promote(ring).unwrap();
            let bj = b[j].promote(ring).unwrap();
            if !ai.mul(&bj).sub(&aj.mul(&bi)).is_zero() {
                return false;
            }
        }
    }
    true
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .coords
            .iter()
            .map(|c| {
                let cs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                format!("({})", cs.join(" : "))
            })
            .collect();
        write!(f, "{}", blocks.join(" x "))
    }
}

// ---------------------------------------------------------------------------
// Polynomial maps of the ambient
// ---------------------------------------------------------------------------

/// A self-map of the ambient given by per-block output formulas.  The
/// output in block `b` is the tuple `out[b]` of polynomials in the
/// source coordinates; block permutations are just formulas that read
/// from another block.
#[derive(Clone)]
pub struct PolyMap {
    ring: Ring,
    blocks: Blocks,
    out: Vec<Vec<Poly>>,
}

impl PolyMap {
    pub fn new(ring: &Ring, blocks: &Blocks, out: Vec<Vec<Poly>>) -> Result<PolyMap> {
        if out.len() != blocks.n_blocks() {
            return Err(Error::Structure("one output tuple per block required".into()));
        }
        for (b, tuple) in out.iter().enumerate() {
            if tuple.len() != blocks.block_size(b) {
                return Err(Error::Structure(format!(
                    "output tuple for block {} has the wrong arity",
                    blocks.block_name(b)
                )));
            }
            let mut deg: Option<Vec<u32>> = None;
            for p in tuple {
                if p.is_zero() {
                    continue;
                }
                let d = p.block_degrees().ok_or_else(|| {
                    Error::Structure(format!(
                        "inhomogeneous image in block {}",
                        blocks.block_name(b)
                    ))
                })?;
                match &deg {
                    None => deg = Some(d),
                    Some(prev) => {
                        if *prev != d {
                            return Err(Error::Structure(format!(
                                "images in block {} differ in multidegree",
                                blocks.block_name(b)
                            )));
                        }
                    }
                }
            }
            if out[b].iter().all(|p| p.is_zero()) {
                return Err(Error::Structure(format!(
                    "identically zero image tuple in block {}",
                    blocks.block_name(b)
                )));
            }
        }
        Ok(PolyMap {
            ring: ring.clone(),
            blocks: blocks.clone(),
            out,
        })
    }

    /// The linear map given per block by `mats[b] · x_{src(b)}` where
    /// `src` is a permutation of blocks (target block `b` reads from
    /// block `src[b]`).
    pub fn linear(
        ring: &Ring,
        blocks: &Blocks,
        src: &[usize],
        mats: &[Matrix],
    ) -> Result<PolyMap> {
        let nb = blocks.n_blocks();
        if src.len() != nb || mats.len() != nb {
            return Err(Error::Structure("need one matrix and source per block".into()));
        }
        let mut out = Vec::new();
        for b in 0..nb {
            let s = src[b];
            let n = blocks.block_size(b);
            if blocks.block_size(s) != n {
                return Err(Error::Structure("permuted blocks differ in size".into()));
            }
            let m = &mats[b];
            if m.rows() != n || m.cols() != n {
                return Err(Error::Structure("matrix arity mismatch".into()));
            }
            let mut tuple = Vec::new();
            for k in 0..n {
                let mut p = Poly::zero(ring, blocks);
                for j in 0..n {
                    let coef = m.at(k, j);
                    if coef.is_zero() {
                        continue;
                    }
                    let v = Poly::var(ring, blocks, &blocks.block_vars(s)[j].clone());
                    p = p.add(&v.scale(coef));
                }
                tuple.push(p);
            }
            out.push(tuple);
        }
        PolyMap::new(ring, blocks, out)
    }

    pub fn identity(ring: &Ring, blocks: &Blocks) -> PolyMap {
        let out = (0..blocks.n_blocks())
            .map(|b| {
                blocks
                    .block_vars(b)
                    .iter()
                    .map(|v| Poly::var(ring, blocks, v))
                    .collect()
            })
            .collect();
        PolyMap::new(ring, blocks, out).unwrap()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }
    pub fn output(&self, b: usize) -> &[Poly] {
        &self.out[b]
    }

    /// Pullback: substitute each variable of `p` by the matching
    /// coordinate formula, i.e. `p ∘ self`.
    pub fn pullback(&self, p: &Poly) -> Poly {
        assert!(self.blocks == *p.blocks(), "pullback block mismatch");
        let subs: Vec<Poly> = (0..self.blocks.n_vars())
            .map(|i| {
                let (b, k) = self.blocks.var_home(i);
                self.out[b][k].clone()
            })
            .collect();
        p.substitute(&self.blocks, &subs)
    }

    /// Image of a point.
    pub fn apply_point(&self, p: &Point) -> Result<Point> {
        let ring = if p.ring().extends(&self.ring) {
            p.ring().clone()
        } else {
            self.ring.clone()
        };
        let coords: Vec<Vec<Scalar>> = self
            .out
            .iter()
            .map(|tuple| tuple.iter().map(|f| f.evaluate(p)).collect())
            .collect();
        Point::new(&ring, &self.blocks, coords)
    }

    /// `self ∘ other` as maps, so that `pullback(other, pullback(self,
    /// p)) = pullback(self ∘ other, p)`.
    pub fn compose(&self, other: &PolyMap) -> Result<PolyMap> {
        assert!(self.blocks == other.blocks);
        let subs: Vec<Poly> = (0..self.blocks.n_vars())
            .map(|i| {
                let (b, k) = self.blocks.var_home(i);
                other.out[b][k].clone()
            })
            .collect();
        let out: Vec<Vec<Poly>> = self
            .out
            .iter()
            .map(|tuple| {
                tuple
                    .iter()
                    .map(|f| f.substitute(&self.blocks, &subs))
                    .collect()
            })
            .collect();
        PolyMap::new(&self.ring, &self.blocks, out)
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            // expand the scalar's own terms so every printed factor is
            // a plain monomial
            for (ze, gexp, q) in c.term_views() {
                let mut factors = Vec::new();
                factors.push(if q.denom() == &num_bigint::BigInt::from(1) {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                });
                if ze != 0 {
                    factors.push(if ze == 1 {
                        "zeta".into()
                    } else {
                        format!("zeta^{ze}")
                    });
                }
                for (j, &ge) in gexp.iter().enumerate() {
                    if ge != 0 {
                        let name = self.ring.gen_names()[j].to_string();
                        factors.push(if ge == 1 { name } else { format!("{name}^{ge}") });
                    }
                }
                for (i, &ei) in e.iter().enumerate() {
                    if ei != 0 {
                        let name = self.blocks.var_name(i).to_string();
                        factors.push(if ei == 1 { name } else { format!("{name}^{ei}") });
                    }
                }
                parts.push(factors.join(" * "));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parse the textual polynomial format: `+`-joined terms of
/// `*`-joined factors; a factor is a signed rational, `zeta[^e]`, an
/// adjoined ring symbol, or an ambient variable, each with an optional
/// integer exponent.
pub fn parse_poly(ring: &Ring, blocks: &Blocks, input: &str) -> Result<Poly> {
    let input = input.trim();
    if input.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    if input == "0" {
        return Ok(Poly::zero(ring, blocks));
    }
    let mut acc = Poly::zero(ring, blocks);
    for term in input.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {input:?}")));
        }
        let mut scalar_factors: Vec<String> = Vec::new();
        let mut expo = vec![0u16; blocks.n_vars()];
        for factor in term.split('*') {
            let f = factor.trim();
            if f.is_empty() {
                return Err(Error::Parse(format!("empty factor in {term:?}")));
            }
            let (base, exp) = match f.split_once('^') {
                Some((b, e)) => {
                    let e: i64 = e
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {f:?}")))?;
                    (b.trim(), e)
                }
                None => (f, 1),
            };
            if let Some(i) = blocks.var_index(base) {
                if exp < 0 {
                    return Err(Error::Parse(format!("negative power of variable {base}")));
                }
                expo[i] += exp as u16;
            } else {
                scalar_factors.push(f.to_string());
            }
        }
        let coef = if scalar_factors.is_empty() {
            ring.one()
        } else {
            ring.parse(&scalar_factors.join(" * "))?
        };
        acc = acc.add(&Poly::from_terms(ring, blocks, vec![(expo, coef)]));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn xy_blocks() -> Blocks {
        Blocks::new(&[("x", &["x0", "x1", "x2"]), ("y", &["y0", "y1", "y2"])])
    }

    #[test]
    fn arithmetic_and_degrees() {
        let q = Ring::rationals();
        let b = xy_blocks();
        let p = parse_poly(&q, &b, "1 * x0 * y0 + 1 * x1 * y1").unwrap();
        assert_eq!(p.n_terms(), 2);
        assert_eq!(p.block_degrees(), Some(vec![1, 1]));
        let sq = p.mul(&p);
        assert_eq!(sq.block_degrees(), Some(vec![2, 2]));
        assert_eq!(sq.n_terms(), 3);
        assert!(p.sub(&p).is_zero());
        assert!(p.scale(&q.zero()).is_zero());
    }

    #[test]
    fn derivative_product_rule() {
        let q = Ring::rationals();
        let b = xy_blocks();
        let p = parse_poly(&q, &b, "1 * x0^2 * x1 + 3 * y2").unwrap();
        let r = parse_poly(&q, &b, "2 * x0 + 1 * x2").unwrap();
        let lhs = p.mul(&r).differentiate("x0");
        let rhs = p
            .differentiate("x0")
            .mul(&r)
            .add(&p.mul(&r.differentiate("x0")));
        assert!(lhs.sub(&rhs).is_zero());
        assert_eq!(
            parse_poly(&q, &b, "1 * x0^2 * x1").unwrap().differentiate("x0"),
            parse_poly(&q, &b, "2 * x0 * x1").unwrap()
        );
        assert!(Poly::constant(&q, &b, &q.int(5)).differentiate("x0").is_zero());
    }

    #[test]
    fn evaluation() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let b = xy_blocks();
        let p = parse_poly(&r3, &b, "1 * x0 * y0 + 1 * x1 * y1 + 1 * x2 * y2").unwrap();
        let w = r3.zeta();
        let pt = Point::new(
            &r3,
            &b,
            vec![
                vec![r3.one(), w.clone(), w.mul(&w)],
                vec![r3.one(), w.mul(&w), w.clone()],
            ],
        )
        .unwrap();
        // 1 + w*w^2 + w^2*w = 1 + 1 + 1 = 3
        assert_eq!(p.evaluate(&pt), r3.int(3));
    }

    #[test]
    fn kunneth_dimensions() {
        let q = Ring::rationals();
        let bx = Blocks::new(&[("x", &["x0", "x1", "x2"])]);
        let by = Blocks::new(&[("y", &["y0", "y1", "y2"])]);
        let p = parse_poly(&q, &bx, "1 * x0^3").unwrap();
        let r = parse_poly(&q, &by, "1 * y0^3").unwrap();
        let k = p.kunneth_product(&r).unwrap();
        assert_eq!(k.block_degrees(), Some(vec![3, 3]));
        assert!(k.kunneth_product(&k).is_err()); // overlapping blocks
    }

    #[test]
    fn pullback_composition_and_contravariance() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let b = xy_blocks();
        // m1: cycle x, scale y by omega; m2: swap blocks
        let w = r3.zeta();
        let cyc = Matrix::from_rows(
            &r3,
            vec![
                vec![r3.zero(), r3.one(), r3.zero()],
                vec![r3.zero(), r3.zero(), r3.one()],
                vec![r3.one(), r3.zero(), r3.zero()],
            ],
        );
        let diag = Matrix::from_rows(
            &r3,
            vec![
                vec![r3.one(), r3.zero(), r3.zero()],
                vec![r3.zero(), w.clone(), r3.zero()],
                vec![r3.zero(), r3.zero(), w.mul(&w)],
            ],
        );
        let m1 = PolyMap::linear(&r3, &b, &[0, 1], &[cyc, diag]).unwrap();
        let id3 = Matrix::identity(&r3, 3);
        let m2 = PolyMap::linear(&r3, &b, &[1, 0], &[id3.clone(), id3]).unwrap();
        let p = parse_poly(&r3, &b, "1 * x0 * y1 + 2 * x2 * y2").unwrap();
        let lhs = m2.pullback(&m1.pullback(&p));
        let rhs = m1.compose(&m2).unwrap().pullback(&p);
        assert!(lhs.sub(&rhs).is_zero());
        // contravariance at a point
        let pt = Point::new(
            &r3,
            &b,
            vec![
                vec![r3.int(1), r3.int(2), r3.int(-1)],
                vec![r3.int(3), r3.int(1), r3.int(5)],
            ],
        )
        .unwrap();
        let lhs_v = m1.pullback(&p).evaluate(&pt);
        let rhs_v = p.evaluate(&m1.apply_point(&pt).unwrap());
        assert!(lhs_v.sub(&rhs_v).is_zero());
    }

    #[test]
    fn poly_parser_round_trips() {
        let ring = Ring::cyclotomic(4).unwrap();
        let b = xy_blocks();
        for src in [
            "1 * x0 * y0 + -1 * x1 * y1",
            "1/2 * zeta * x0^2 * x1 + 3 * y2^3",
            "0",
        ] {
            let p = parse_poly(&ring, &b, src).unwrap();
            let printed = p.to_string();
            let again = parse_poly(&ring, &b, &printed).unwrap();
            assert!(p.sub(&again).is_zero(), "round trip failed for {src}");
        }
        assert!(parse_poly(&ring, &b, "1 * bogus").is_err());
    }

    #[test]
    fn monomial_bases() {
        let b = Blocks::new(&[("x", &["x0", "x1"]), ("y", &["y0", "y1"])]);
        let ms = monomials_of_multidegree(&b, &[2, 2]);
        assert_eq!(ms.len(), 9);
        let b4 = Blocks::new(&[("x", &["x0", "x1", "x2"])]);
        assert_eq!(monomials_of_multidegree(&b4, &[3]).len(), 10);
        let _ = rat_int(0);
    }
}
