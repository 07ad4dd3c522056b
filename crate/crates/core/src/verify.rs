//! Freeness and smoothness certification: avoidance of a finite fixed
//! locus by generic or explicit sections, eigenspace obstruction
//! certificates for non-existence, base-point verification and search
//! over structured candidate pools, Jacobian smoothness at points
//! (including blow-up charts), genericity of smoothness at base
//! points, and an exhaustive finite-field smoothness probe.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::group::SectionRepresentation;
use crate::linalg::Matrix;
use crate::poly::{Blocks, Poly};
use crate::product::{evaluate_section, ProductModel, SectionSpace};
use crate::scalar::{Ring, Scalar};
use crate::surface::{SurfaceKind, SurfaceModel, SurfacePoint};

// ---------------------------------------------------------------------------
// Ring plumbing
// ---------------------------------------------------------------------------

fn unified_ring(a: &Ring, b: &Ring) -> Result<Ring> {
    if a.extends(b) {
        Ok(a.clone())
    } else if b.extends(a) {
        Ok(b.clone())
    } else {
        Err(Error::RingMismatch("rings are unrelated".into()))
    }
}

fn promote_surface_point(q: &SurfacePoint, ring: &Ring) -> Result<SurfacePoint> {
    Ok(match q {
        SurfacePoint::Ambient(p) => SurfacePoint::Ambient(p.promote(ring)?),
        SurfacePoint::Exceptional { center, direction } => SurfacePoint::Exceptional {
            center: *center,
            direction: [direction[0].promote(ring)?, direction[1].promote(ring)?],
        },
    })
}

/// Promote every coordinate of a product point into a larger ring.
pub fn promote_product_point(pt: &[SurfacePoint], ring: &Ring) -> Result<Vec<SurfacePoint>> {
    pt.iter().map(|q| promote_surface_point(q, ring)).collect()
}

/// Linear combinations of the section-space basis as polynomials.
pub fn sections_from_coords(
    ring: &Ring,
    space: &SectionSpace,
    coords: &[Vec<Scalar>],
) -> Result<Vec<Poly>> {
    let basis: Vec<Poly> = space
        .basis
        .iter()
        .map(|b| b.promote(ring))
        .collect::<Result<_>>()?;
    coords
        .iter()
        .map(|v| {
            let mut acc = Poly::zero(ring, &space.blocks);
            for (b, c) in basis.iter().zip(v) {
                let c = c.promote(ring)?;
                if !c.is_zero() {
                    acc = acc.add(&b.scale(&c));
                }
            }
            Ok(acc)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Avoidance of a finite fixed locus
// ---------------------------------------------------------------------------

/// One nonvanishing witness: basis element `section` is nonzero at
/// fixed point `point`.
#[derive(Clone, Debug)]
pub struct AvoidanceWitness {
    pub point: usize,
    pub section: usize,
    pub value: Scalar,
}

/// Outcome of the generic-avoidance check on a subspace of sections.
pub enum Avoidance {
    /// Every fixed point admits a witness: the sections vanishing at
    /// each point form a proper subspace, and a finite union of proper
    /// subspaces cannot exhaust the space over an infinite field, so
    /// the generic member misses the whole locus.
    Certified(Vec<AvoidanceWitness>),
    /// Every basis element vanishes at this point; the point lies on
    /// every member of the system.
    Blocked { point: usize },
}

/// Check that the generic member of the span of `basis` is nonzero on
/// every listed point.
pub fn generic_avoids_fixed(
    x: &ProductModel,
    basis: &[Poly],
    points: &[Vec<SurfacePoint>],
    ring: &Ring,
) -> Result<Avoidance> {
    let lifted: Vec<Poly> = basis
        .iter()
        .map(|b| b.promote(ring))
        .collect::<Result<_>>()?;
    let mut witnesses = Vec::new();
    for (pi, pt) in points.iter().enumerate() {
        let pt = promote_product_point(pt, ring)?;
        let mut found = None;
        for (si, s) in lifted.iter().enumerate() {
            let v = evaluate_section(x, s, &pt)?;
            if !v.is_zero() {
                found = Some(AvoidanceWitness {
                    point: pi,
                    section: si,
                    value: v,
                });
                break;
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => return Ok(Avoidance::Blocked { point: pi }),
        }
    }
    Ok(Avoidance::Certified(witnesses))
}

/// Evaluate one explicit section on every listed point; the section
/// misses the locus iff every value is nonzero.
pub fn explicit_section_avoids(
    x: &ProductModel,
    s: &Poly,
    points: &[Vec<SurfacePoint>],
    ring: &Ring,
) -> Result<(bool, Vec<Scalar>)> {
    let s = s.promote(ring)?;
    let mut values = Vec::with_capacity(points.len());
    let mut ok = true;
    for pt in points {
        let pt = promote_product_point(pt, ring)?;
        let v = evaluate_section(x, &s, &pt)?;
        if v.is_zero() {
            ok = false;
        }
        values.push(v);
    }
    Ok((ok, values))
}

// ---------------------------------------------------------------------------
// Eigenspace obstruction certificates
// ---------------------------------------------------------------------------

/// One semi-invariant space together with the fixed point at which the
/// whole space vanishes.
pub struct ObstructionItem {
    /// Scalar by which each generator acts on the space.
    pub characters: Vec<Scalar>,
    pub dimension: usize,
    pub blocking_point: usize,
}

/// Either every semi-invariant space of sections is killed by a fixed
/// point (so no group-stable anticanonical hypersurface can miss the
/// locus), or some space survives and refutes the obstruction.
pub enum Obstruction {
    Certified(Vec<ObstructionItem>),
    Refuted {
        characters: Vec<Scalar>,
        basis: Vec<Poly>,
    },
}

/// Run the avoidance check on every maximal semi-invariant subspace of
/// the section space.
pub fn obstruction_certificate(
    x: &ProductModel,
    rep: &SectionRepresentation,
    space: &SectionSpace,
    generator_indices: &[usize],
    points: &[Vec<SurfacePoint>],
    ring: &Ring,
) -> Result<Obstruction> {
    let semi = rep.semi_invariant_spaces(generator_indices)?;
    let mut items = Vec::new();
    for (chars, coords) in &semi {
        let basis = sections_from_coords(ring, space, coords)?;
        match generic_avoids_fixed(x, &basis, points, ring)? {
            Avoidance::Certified(_) => {
                return Ok(Obstruction::Refuted {
                    characters: chars.clone(),
                    basis,
                });
            }
            Avoidance::Blocked { point } => items.push(ObstructionItem {
                characters: chars.clone(),
                dimension: coords.len(),
                blocking_point: point,
            }),
        }
    }
    Ok(Obstruction::Certified(items))
}

// ---------------------------------------------------------------------------
// Base points
// ---------------------------------------------------------------------------

/// Indices of the candidates at which every basis element vanishes.
pub fn base_point_verify(
    x: &ProductModel,
    basis: &[Poly],
    candidates: &[Vec<SurfacePoint>],
    ring: &Ring,
) -> Result<Vec<usize>> {
    let lifted: Vec<Poly> = basis
        .iter()
        .map(|b| b.promote(ring))
        .collect::<Result<_>>()?;
    let mut kept = Vec::new();
    'cand: for (ci, pt) in candidates.iter().enumerate() {
        let pt = promote_product_point(pt, ring)?;
        for s in &lifted {
            if !evaluate_section(x, s, &pt)?.is_zero() {
                continue 'cand;
            }
        }
        kept.push(ci);
    }
    Ok(kept)
}

/// All pool members where the system has a base point.  The pool is a
/// declared finite set; this is a search aid, not a completeness
/// proof for the base locus.
pub fn base_point_search(
    x: &ProductModel,
    basis: &[Poly],
    pool: &[Vec<SurfacePoint>],
    ring: &Ring,
) -> Result<Vec<Vec<SurfacePoint>>> {
    let kept = base_point_verify(x, basis, pool, ring)?;
    Ok(kept.into_iter().map(|i| pool[i].clone()).collect())
}

/// Ambient points of a surface with every coordinate in `{0} ∪ values`
/// (projectively normalized: the first nonzero coordinate is 1),
/// filtered by the defining equations and, for blow-up models, the
/// centers.
pub fn ambient_pool(
    f: &SurfaceModel,
    ring: &Ring,
    values: &[Scalar],
) -> Result<Vec<SurfacePoint>> {
    let blocks = f.blocks();
    let mut per_block: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for b in 0..blocks.n_blocks() {
        per_block.push(projective_tuples(ring, blocks.block_size(b), values)?);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_block.len()];
    if per_block.iter().any(|v| v.is_empty()) {
        return Ok(out);
    }
    loop {
        let coords: Vec<Vec<Scalar>> = idx
            .iter()
            .enumerate()
            .map(|(b, &i)| per_block[b][i].clone())
            .collect();
        let pt = crate::poly::Point::new(ring, blocks, coords)?;
        if f.contains_ambient(&pt) {
            out.push(SurfacePoint::Ambient(pt));
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < per_block[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn projective_tuples(ring: &Ring, n: usize, values: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    // leading zeros, then 1, then arbitrary entries from {0} ∪ values
    let mut tail_choices: Vec<Scalar> = vec![ring.zero()];
    for v in values {
        let v = v.promote(ring)?;
        if !v.is_zero() {
            tail_choices.push(v);
        }
    }
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let mut idx = vec![0usize; free];
        loop {
            let mut tuple = vec![ring.zero(); lead];
            tuple.push(ring.one());
            for &i in &idx {
                tuple.push(tail_choices[i].clone());
            }
            out.push(tuple);
            let mut i = 0;
            loop {
                if i == free {
                    break;
                }
                idx[i] += 1;
                if idx[i] < tail_choices.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if free == 0 || idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// Exceptional directions over every center of a blow-up model:
/// `(1 : v)` for each pool value (including 0) and `(0 : 1)`.
pub fn exceptional_pool(f: &SurfaceModel, ring: &Ring, values: &[Scalar]) -> Result<Vec<SurfacePoint>> {
    let mut out = Vec::new();
    for (ci, _) in f.charts().iter().enumerate() {
        let mut dirs: Vec<[Scalar; 2]> = vec![[ring.one(), ring.zero()], [ring.zero(), ring.one()]];
        for v in values {
            let v = v.promote(ring)?;
            if !v.is_zero() {
                dirs.push([ring.one(), v]);
            }
        }
        for d in dirs {
            out.push(SurfacePoint::Exceptional {
                center: ci,
                direction: d,
            });
        }
    }
    Ok(out)
}

/// Cartesian product of per-factor pools.
pub fn product_pool(factor_pools: &[Vec<SurfacePoint>]) -> Vec<Vec<SurfacePoint>> {
    let mut out: Vec<Vec<SurfacePoint>> = vec![Vec::new()];
    for pool in factor_pools {
        let mut next = Vec::with_capacity(out.len() * pool.len());
        for partial in &out {
            for q in pool {
                let mut v = partial.clone();
                v.push(q.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// Jacobian smoothness at a point
// ---------------------------------------------------------------------------

/// Local coordinates around a product point: one parameter per ambient
/// degree of freedom, or the blow-up chart pair `(v, l)` over an
/// exceptional point.  Every ambient variable of the product gets a
/// substitution polynomial in the parameters; `strict_vars` are the
/// chart variables a section must be divided by once.
struct LocalChart {
    params: Blocks,
    subs: Vec<Poly>,
    strict_vars: Vec<String>,
}

fn local_chart(x: &ProductModel, pt: &[SurfacePoint], ring: &Ring) -> Result<LocalChart> {
    if pt.len() != x.factors().len() {
        return Err(Error::Structure("one point per factor".into()));
    }
    // collect parameter names first
    let mut names: Vec<String> = Vec::new();
    let mut strict_vars = Vec::new();
    for (i, q) in pt.iter().enumerate() {
        match q {
            SurfacePoint::Ambient(p) => {
                for b in 0..p.blocks().n_blocks() {
                    for k in 1..p.blocks().block_size(b) {
                        names.push(format!("_t{i}_{b}_{k}"));
                    }
                }
            }
            SurfacePoint::Exceptional { .. } => {
                names.push(format!("_v{i}"));
                names.push(format!("_l{i}"));
                strict_vars.push(format!("_v{i}"));
            }
        }
    }
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let params = Blocks::new(&[("_loc", &name_refs)]);
    let mut subs: Vec<Poly> = Vec::with_capacity(x.blocks().n_vars());
    for (i, q) in pt.iter().enumerate() {
        let f = &x.factors()[i];
        match q {
            SurfacePoint::Ambient(p) => {
                let p = p.promote(ring)?;
                for b in 0..p.blocks().n_blocks() {
                    let coords = p.block_coords(b);
                    let pivot = coords
                        .iter()
                        .position(|c| !c.is_zero())
                        .ok_or_else(|| Error::Structure("zero block in a point".into()))?;
                    let mut slot = 1usize;
                    for (k, c) in coords.iter().enumerate() {
                        let constant = Poly::constant(ring, &params, c);
                        if k == pivot {
                            subs.push(constant);
                        } else {
                            let t = Poly::var(ring, &params, &format!("_t{i}_{b}_{slot}"));
                            slot += 1;
                            subs.push(constant.add(&t));
                        }
                    }
                }
            }
            SurfacePoint::Exceptional { center, direction } => {
                if f.kind != SurfaceKind::Blowup {
                    return Err(Error::UnsupportedModel(
                        "exceptional point on a factor without blow-up charts".into(),
                    ));
                }
                let v = Poly::var(ring, &params, &format!("_v{i}"));
                let l = Poly::var(ring, &params, &format!("_l{i}"));
                let d0 = direction[0].promote(ring)?;
                let d1 = direction[1].promote(ring)?;
                // (u, w) = (w₀, w₂): on the chart where the second
                // direction coordinate is a unit, w₀ = (λ₀ + l)·v and
                // w₂ = v; otherwise the roles swap.
                let (w0, w2) = if let Ok(d1inv) = d1.inv() {
                    let lam0 = d0.mul(&d1inv);
                    (v.scale(&lam0).add(&v.mul(&l)), v.clone())
                } else {
                    let d0inv = d0
                        .inv()
                        .map_err(|_| Error::Structure("exceptional direction is (0:0)".into()))?;
                    let mu0 = d1.mul(&d0inv);
                    (v.clone(), v.scale(&mu0).add(&v.mul(&l)))
                };
                for img in f.chart_substitution(*center, &params, &w0, &w2) {
                    subs.push(img);
                }
            }
        }
    }
    Ok(LocalChart {
        params,
        subs,
        strict_vars,
    })
}

/// Constant term and gradient (coefficients of the degree-one
/// parameter monomials) of a composed polynomial.
fn chart_value_and_gradient(
    chart: &LocalChart,
    composed: &Poly,
) -> (Scalar, Vec<Scalar>) {
    let n = chart.params.n_vars();
    let value = composed.coefficient(&vec![0u16; n]);
    let mut grad = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0u16; n];
        e[j] = 1;
        grad.push(composed.coefficient(&e));
    }
    (value, grad)
}

fn compose_in_chart(
    chart: &LocalChart,
    p: &Poly,
    ring: &Ring,
    strict: bool,
) -> Result<Poly> {
    let mut q = p.promote(ring)?.substitute(&chart.params, &chart.subs);
    if strict {
        for v in &chart.strict_vars {
            q = q.divide_by_var(v).ok_or_else(|| {
                Error::NotInSystem("section does not vanish at a blown-up center".into())
            })?;
        }
    }
    Ok(q)
}

/// Jacobian ranks at a point on the zero locus of a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVerdict {
    /// Rank of the Jacobian of the ambient defining equations alone.
    pub rank_equations: usize,
    /// Rank with the section's gradient row added.
    pub rank_with_section: usize,
    pub smooth: bool,
}

/// Check smoothness of `V(s) ∩ X` at a product point: in local
/// coordinates (affine, or blow-up chart with the strict transform)
/// the section's gradient must add one to the rank of the equations'
/// Jacobian.
pub fn smoothness_at_point(
    x: &ProductModel,
    s: &Poly,
    pt: &[SurfacePoint],
    ring: &Ring,
) -> Result<RankVerdict> {
    let pt = promote_product_point(pt, ring)?;
    let chart = local_chart(x, &pt, ring)?;
    let mut eq_rows = Vec::new();
    for e in x.lifted_equations() {
        let c = compose_in_chart(&chart, e, ring, false)?;
        let (val, grad) = chart_value_and_gradient(&chart, &c);
        if !val.is_zero() {
            return Err(Error::Structure("point is not on the product model".into()));
        }
        eq_rows.push(grad);
    }
    let c = compose_in_chart(&chart, s, ring, true)?;
    let (val, grad) = chart_value_and_gradient(&chart, &c);
    if !val.is_zero() {
        return Err(Error::NotInSystem(
            "section does not vanish at the point".into(),
        ));
    }
    let rank_equations = if eq_rows.is_empty() {
        0
    } else {
        Matrix::from_rows(ring, eq_rows.clone()).rank()?
    };
    let mut all = eq_rows;
    all.push(grad);
    let rank_with_section = Matrix::from_rows(ring, all).rank()?;
    Ok(RankVerdict {
        rank_equations,
        rank_with_section,
        smooth: rank_with_section == rank_equations + 1,
    })
}

/// Genericity of smoothness at a common base point of a system: some
/// member of the span has a gradient outside the row span of the
/// equations' Jacobian iff the singular members form a proper closed
/// subset of coefficient space (the gradient of `Σ Aᵢ wᵢ` is linear in
/// the `Aᵢ`).  Returns `false` when every member is singular there.
pub fn generic_smoothness_at_base_point(
    x: &ProductModel,
    basis: &[Poly],
    pt: &[SurfacePoint],
    ring: &Ring,
) -> Result<bool> {
    let pt = promote_product_point(pt, ring)?;
    let chart = local_chart(x, &pt, ring)?;
    let mut eq_rows = Vec::new();
    for e in x.lifted_equations() {
        let c = compose_in_chart(&chart, e, ring, false)?;
        let (val, grad) = chart_value_and_gradient(&chart, &c);
        if !val.is_zero() {
            return Err(Error::Structure("point is not on the product model".into()));
        }
        eq_rows.push(grad);
    }
    let rank_eq = if eq_rows.is_empty() {
        0
    } else {
        Matrix::from_rows(ring, eq_rows.clone()).rank()?
    };
    let mut all = eq_rows;
    for b in basis {
        let c = compose_in_chart(&chart, b, ring, true)?;
        let (val, grad) = chart_value_and_gradient(&chart, &c);
        if !val.is_zero() {
            return Err(Error::NotInSystem(
                "basis element does not vanish at the claimed base point".into(),
            ));
        }
        all.push(grad);
    }
    let rank_all = Matrix::from_rows(ring, all).rank()?;
    Ok(rank_all > rank_eq)
}

// ---------------------------------------------------------------------------
// Finite-field smoothness probe
// ---------------------------------------------------------------------------

/// Outcome of an exhaustive scan of the surface-point pairs over F_p.
pub struct SmoothnessReport {
    pub prime: u64,
    /// Number of product points scanned.
    pub scanned: usize,
    /// Points where the section and its full Jacobian system vanish.
    pub singular: Vec<String>,
    pub evidence: String,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_good_prime(after: u64, order: u64) -> u64 {
    let mut q = after + 1;
    loop {
        if is_prime(q) && (q - 1) % order == 0 {
            return q;
        }
        q += 1;
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().unwrap()
}

/// Reduction of ring scalars to F_p: a primitive root of unity of the
/// cyclotomic order and one residue per adjoined generator, chosen so
/// that every rewrite rule splits.
pub struct FpAssignment {
    pub p: u64,
    order: u64,
    zeta: u64,
    gen_values: Vec<u64>,
}

impl FpAssignment {
    pub fn build(ring: &Ring, p: u64) -> Result<FpAssignment> {
        if !is_prime(p) || p == 2 {
            return Err(Error::Structure(format!("{p} is not an odd prime")));
        }
        let order = ring.order() as u64;
        if (p - 1) % order != 0 {
            return Err(Error::BadPrime {
                prime: p,
                reason: format!("p - 1 is not divisible by the cyclotomic order {order}"),
                suggestion: next_good_prime(p, order),
            });
        }
        // element of multiplicative order exactly `order`
        let mut zeta = 1u64;
        if order > 1 {
            let mut found = false;
            for g in 2..p {
                let z = pow_mod(g, (p - 1) / order, p);
                let exact = (1..order).all(|k| pow_mod(z, k, p) != 1);
                if exact {
                    zeta = z;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::BadPrime {
                    prime: p,
                    reason: format!("no element of order {order} mod {p}"),
                    suggestion: next_good_prime(p, order),
                });
            }
        }
        let mut assignment = FpAssignment {
            p,
            order,
            zeta,
            gen_values: Vec::new(),
        };
        // triangular: each rule's right-hand side only involves earlier
        // generators, so its residue is already computable
        let mut transcendental_seed = 2u64;
        for (name, bound) in ring.gen_bounds() {
            match bound {
                Some(k) => {
                    let g = ring
                        .generator(&name)
                        .ok_or_else(|| Error::Structure(format!("unknown generator {name}")))?;
                    let rhs = g.pow(k as i64)?;
                    let target = assignment.scalar(&rhs)?;
                    let root = (0..p).find(|&r| pow_mod(r, k as u64, p) == target % p);
                    match root {
                        Some(r) => assignment.gen_values.push(r),
                        None => {
                            return Err(Error::BadPrime {
                                prime: p,
                                reason: format!(
                                    "the rule {name}^{k} = … has no root mod {p}"
                                ),
                                suggestion: next_good_prime(p, order.max(1)),
                            })
                        }
                    }
                }
                None => {
                    assignment.gen_values.push(transcendental_seed % p);
                    transcendental_seed += 1;
                }
            }
        }
        Ok(assignment)
    }

    /// Residue of a scalar under the chosen assignment.
    pub fn scalar(&self, s: &Scalar) -> Result<u64> {
        let p = self.p;
        let mut acc = 0u64;
        for (zexp, gexp, coeff) in s.term_views() {
            if bigint_mod(coeff.denom(), p) == 0 {
                return Err(Error::BadPrime {
                    prime: p,
                    reason: "a denominator vanishes mod p".into(),
                    suggestion: next_good_prime(p, self.order.max(1)),
                });
            }
            let mut term = bigint_mod(coeff.numer(), p) * inv_mod(bigint_mod(coeff.denom(), p), p) % p;
            term = term * pow_mod(self.zeta, zexp as u64, p) % p;
            for (gi, &e) in gexp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = self.gen_values[gi];
                let f = if e >= 0 {
                    pow_mod(base, e as u64, p)
                } else {
                    if base == 0 {
                        return Err(Error::BadPrime {
                            prime: p,
                            reason: "negative power of a generator assigned 0".into(),
                            suggestion: next_good_prime(p, self.order.max(1)),
                        });
                    }
                    pow_mod(inv_mod(base, p), (-e) as u64, p)
                };
                term = term * f % p;
            }
            acc = (acc + term) % p;
        }
        Ok(acc)
    }

    fn poly(&self, q: &Poly) -> Result<Vec<(Vec<u16>, u64)>> {
        let mut out = Vec::new();
        for (exps, c) in q.terms() {
            let r = self.scalar(c)?;
            if r != 0 {
                out.push((exps.clone(), r));
            }
        }
        Ok(out)
    }
}

fn eval_fp(terms: &[(Vec<u16>, u64)], point: &[u64], p: u64) -> u64 {
    let mut acc = 0u64;
    'term: for (exps, c) in terms {
        let mut v = *c;
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                v = v * point[i] % p;
                if v == 0 {
                    continue 'term;
                }
            }
        }
        acc = (acc + v) % p;
    }
    acc
}

fn rank_fp(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..m.len()).find(|&r| m[r][col] != 0);
        let Some(pr) = pivot else { continue };
        m.swap(rank, pr);
        let inv = inv_mod(m[rank][col], p);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col] * inv % p;
                for cc in col..ncols {
                    let sub = f * m[rank][cc] % p;
                    m[r][cc] = (m[r][cc] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// All F_p-points of a surface factor, as flattened coordinate tuples
/// normalized so each block's first nonzero coordinate is 1.
fn factor_points_fp(
    f: &SurfaceModel,
    assignment: &FpAssignment,
) -> Result<Vec<Vec<u64>>> {
    match f.kind {
        SurfaceKind::Blowup | SurfaceKind::Numeric => {
            return Err(Error::UnsupportedModel(format!(
                "{} has no finite-field point enumeration",
                f.name
            )))
        }
        _ => {}
    }
    let p = assignment.p;
    let blocks = f.blocks();
    let eqs: Vec<Vec<(Vec<u16>, u64)>> = f
        .equations()
        .iter()
        .map(|e| assignment.poly(e))
        .collect::<Result<_>>()?;
    let mut per_block: Vec<Vec<Vec<u64>>> = Vec::new();
    for b in 0..blocks.n_blocks() {
        per_block.push(projective_points_fp(p, blocks.block_size(b)));
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_block.len()];
    loop {
        let mut coords = Vec::with_capacity(blocks.n_vars());
        for (b, &i) in idx.iter().enumerate() {
            coords.extend_from_slice(&per_block[b][i]);
        }
        if eqs.iter().all(|e| eval_fp(e, &coords, p) == 0) {
            out.push(coords);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < per_block[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn projective_points_fp(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let mut idx = vec![0u64; free];
        loop {
            let mut tuple = vec![0u64; lead];
            tuple.push(1);
            tuple.extend_from_slice(&idx);
            out.push(tuple);
            let mut i = 0;
            loop {
                if i == free {
                    break;
                }
                idx[i] += 1;
                if idx[i] < p {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if free == 0 || idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    out
}

fn format_point_fp(blocks: &Blocks, coords: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut pos = 0;
    for b in 0..blocks.n_blocks() {
        let n = blocks.block_size(b);
        let body: Vec<String> = coords[pos..pos + n].iter().map(|c| c.to_string()).collect();
        parts.push(format!("({})", body.join(":")));
        pos += n;
    }
    parts.join("x")
}

/// Exhaustively scan S₁(F_p) × S₂(F_p) (or all four ℙ¹ blocks) for
/// points where the section and its whole Jacobian system vanish.  An
/// empty report is finite-field evidence of smoothness, not a proof
/// over the rationals.
pub fn smoothness_probe_modp(
    x: &ProductModel,
    s: &Poly,
    p: u64,
) -> Result<SmoothnessReport> {
    let ring = unified_ring(s.ring(), x.ring())?;
    let assignment = FpAssignment::build(&ring, p)?;
    let s = s.promote(&ring)?;
    let s_fp = assignment.poly(&s)?;
    let nvars = x.blocks().n_vars();
    let var_names: Vec<String> = (0..nvars)
        .map(|i| x.blocks().var_name(i).to_string())
        .collect();
    let s_grad: Vec<Vec<(Vec<u16>, u64)>> = var_names
        .iter()
        .map(|v| assignment.poly(&s.differentiate(v)))
        .collect::<Result<_>>()?;
    let mut eq_grads: Vec<Vec<Vec<(Vec<u16>, u64)>>> = Vec::new();
    for e in x.lifted_equations() {
        let e = e.promote(&ring)?;
        eq_grads.push(
            var_names
                .iter()
                .map(|v| assignment.poly(&e.differentiate(v)))
                .collect::<Result<_>>()?,
        );
    }
    let factor_sets: Vec<Vec<Vec<u64>>> = x
        .factors()
        .iter()
        .map(|f| factor_points_fp(f, &assignment))
        .collect::<Result<_>>()?;
    let mut scanned = 0usize;
    let mut singular = Vec::new();
    let mut idx = vec![0usize; factor_sets.len()];
    if factor_sets.iter().any(|s| s.is_empty()) {
        return Ok(SmoothnessReport {
            prime: p,
            scanned: 0,
            singular,
            evidence: "exhaustive scan over an empty point set".into(),
        });
    }
    loop {
        let mut coords = Vec::with_capacity(nvars);
        for (fi, &i) in idx.iter().enumerate() {
            coords.extend_from_slice(&factor_sets[fi][i]);
        }
        scanned += 1;
        if eval_fp(&s_fp, &coords, p) == 0 {
            let mut eq_rows: Vec<Vec<u64>> = Vec::with_capacity(eq_grads.len());
            for g in &eq_grads {
                eq_rows.push(g.iter().map(|t| eval_fp(t, &coords, p)).collect());
            }
            let rank_eq = rank_fp(&eq_rows, p);
            let mut all = eq_rows;
            all.push(s_grad.iter().map(|t| eval_fp(t, &coords, p)).collect());
            if rank_fp(&all, p) == rank_eq {
                singular.push(format_point_fp(x.blocks(), &coords));
            }
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(SmoothnessReport {
                    prime: p,
                    scanned,
                    singular,
                    evidence: format!(
                        "exhaustive scan of all {scanned} F_{p}-point pairs; \
                         finite-field evidence, not a proof over the rationals"
                    ),
                });
            }
            idx[i] += 1;
            if idx[i] < factor_sets[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::{fixed_locus_group_in, fixed_points_product_in, FixedLocus};
    use crate::group::{Automorphism, FiniteGroup, GROUP_CAP};
    use crate::poly::{parse_poly, Point};

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

    fn cyc_back(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(ring, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])
    }
    fn cyc_fwd(ring: &Ring) -> Matrix {
        Matrix::from_int_rows(ring, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])
    }

    fn dic3(ring: &Ring) -> FiniteGroup {
        let g3 = Automorphism::new(
            ring,
            vec![0, 1, 2, 3],
            vec![cyc_back(ring), cyc_back(ring), cyc_fwd(ring), cyc_fwd(ring)],
        )
        .unwrap();
        let i3 = Matrix::identity(ring, 3);
        let g4 = Automorphism::new(
            ring,
            vec![3, 2, 0, 1],
            vec![i3.clone(), i3.clone(), i3.clone(), i3],
        )
        .unwrap();
        FiniteGroup::generate(&[g3, g4], GROUP_CAP).unwrap()
    }

    #[test]
    fn dicyclic_invariants_avoid_their_fixed_locus() {
        let q = Ring::rationals();
        let r3 = Ring::cyclotomic(3).unwrap();
        let x = dp6_square(&q);
        let group = dic3(&q);
        let locus = fixed_locus_group_in(&group, &x, &r3).unwrap();
        let FixedLocus::Finite(points) = locus else {
            panic!("expected a finite locus");
        };
        assert_eq!(points.len(), 24);
        let space = x.section_space().unwrap();
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        let inv = rep.invariant_subspace().unwrap();
        assert_eq!(inv.len(), 5);
        let basis = sections_from_coords(&q, &space, &inv).unwrap();
        match generic_avoids_fixed(&x, &basis, &points, &r3).unwrap() {
            Avoidance::Certified(witnesses) => {
                assert_eq!(witnesses.len(), points.len());
                // witnesses re-verify
                for w in &witnesses {
                    let s = basis[w.section].promote(&r3).unwrap();
                    let pt = promote_product_point(&points[w.point], &r3).unwrap();
                    let v = evaluate_section(&x, &s, &pt).unwrap();
                    assert!(!v.is_zero());
                    assert!(v.sub(&w.value).is_zero());
                }
            }
            Avoidance::Blocked { point } => panic!("blocked at fixed point {point}"),
        }
        // an explicit invariant section also misses every fixed point
        let g2 = parse_poly(
            &q,
            x.blocks(),
            "1 * x10 * x21 * x30 * x41 + 1 * x11 * x20 * x30 * x41 \
             + 1 * x11 * x20 * x31 * x40 + 1 * x10 * x21 * x31 * x40 \
             + 1 * x12 * x20 * x31 * x42 + 1 * x10 * x22 * x31 * x42 \
             + 1 * x10 * x22 * x32 * x41 + 1 * x12 * x20 * x32 * x41 \
             + 1 * x11 * x22 * x32 * x40 + 1 * x12 * x21 * x32 * x40 \
             + 1 * x12 * x21 * x30 * x42 + 1 * x11 * x22 * x30 * x42",
        )
        .unwrap();
        let g5 = parse_poly(&q, x.blocks(), "1 * x10 * x20 * x30 * x40").unwrap();
        let s = g2.add(&g5);
        let (ok, values) = explicit_section_avoids(&x, &s, &points, &r3).unwrap();
        assert!(ok);
        assert_eq!(values.len(), 24);
        // the zero section is blocked everywhere
        let zero = Poly::zero(&q, x.blocks());
        let (ok0, _) = explicit_section_avoids(&x, &zero, &points, &r3).unwrap();
        assert!(!ok0);
        match generic_avoids_fixed(&x, &[zero], &points, &r3).unwrap() {
            Avoidance::Blocked { point } => assert_eq!(point, 0),
            _ => panic!("the zero space cannot avoid anything"),
        }
    }

    fn fermat_pair(ring: &Ring) -> (ProductModel, Automorphism) {
        let bx = Blocks::new(&[("x", &["x0", "x1", "x2", "x3"])]);
        let by = Blocks::new(&[("y", &["y0", "y1", "y2", "y3"])]);
        let f1 = parse_poly(ring, &bx, "1 * x0^3 + 1 * x1^3 + 1 * x2^3 + 1 * x3^3").unwrap();
        let f2 = parse_poly(ring, &by, "1 * y0^3 + 1 * y1^3 + 1 * y2^3 + 1 * y3^3").unwrap();
        let s1 = SurfaceModel::embedded(ring, "dP3a", bx, vec![f1], vec![1], 3).unwrap();
        let s2 = SurfaceModel::embedded(ring, "dP3b", by, vec![f2], vec![1], 3).unwrap();
        let x = ProductModel::new("dP3xdP3", vec![s1, s2]).unwrap();
        let w = ring.zeta();
        let w2 = w.mul(&w);
        // (x0:x1:x2:x3) ↦ (x1:x2:x0:ωx3) and ω² on the second factor
        let cyc = |top: &Scalar| {
            Matrix::from_fn(ring, 4, 4, |i, j| match (i, j) {
                (0, 1) | (1, 2) | (2, 0) => ring.one(),
                (3, 3) => top.clone(),
                _ => ring.zero(),
            })
        };
        let phi = Automorphism::new(ring, vec![0, 1], vec![cyc(&w), cyc(&w2)]).unwrap();
        (x, phi)
    }

    #[test]
    fn fermat_cubic_pair_explicit_section() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let ring = r3
            .extend_algebraic("c", 3, &[r3.int(-3)])
            .unwrap();
        let ring = ring
            .extend_algebraic("d", 3, &[ring.int(-3)])
            .unwrap();
        let (x, phi) = fermat_pair(&r3);
        let locus = fixed_points_product_in(&phi, &x, &ring).unwrap();
        let FixedLocus::Finite(points) = locus else {
            panic!("expected nine fixed points");
        };
        assert_eq!(points.len(), 9);
        // each coordinate tuple has last entry a cube root of -3
        for pt in &points {
            let SurfacePoint::Ambient(p) = &pt[0] else {
                panic!()
            };
            let last = &p.block_coords(0)[3];
            let lead = &p.block_coords(0)[0];
            let t = last.mul(&lead.inv().unwrap());
            assert!(t.pow(3).unwrap().add(&ring.int(3)).is_zero());
        }
        let group = FiniteGroup::generate(&[phi], GROUP_CAP).unwrap();
        assert_eq!(group.order(), 3);
        let space = x.section_space().unwrap();
        assert_eq!(space.dimension(), 16);
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        let inv = rep.invariant_subspace().unwrap();
        assert_eq!(inv.len(), 6);
        let basis = sections_from_coords(&r3, &space, &inv).unwrap();
        assert!(matches!(
            generic_avoids_fixed(&x, &basis, &points, &ring).unwrap(),
            Avoidance::Certified(_)
        ));
        let s = parse_poly(
            &r3,
            x.blocks(),
            "1 * x0 * y0 + 1 * x1 * y1 + 1 * x2 * y2 + 1 * x3 * y3",
        )
        .unwrap();
        let (ok, values) = explicit_section_avoids(&x, &s, &points, &ring).unwrap();
        assert!(ok, "values were {values:?}");
    }

    fn dp7_pair_order7(r7: &Ring) -> (ProductModel, FiniteGroup) {
        let mk = |pre: &str| {
            SurfaceModel::blowup(
                r7,
                pre,
                vec![
                    vec![r7.one(), r7.zero(), r7.zero()],
                    vec![r7.zero(), r7.one(), r7.zero()],
                ],
                None,
            )
            .unwrap()
        };
        let x = ProductModel::new("dP7xdP7", vec![mk("x"), mk("y")]).unwrap();
        let lam = r7.zeta();
        let diag = |a: &Scalar, b: &Scalar, c: &Scalar| {
            Matrix::from_fn(r7, 3, 3, |i, j| {
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
            r7,
            vec![0, 1],
            vec![diag(&one, &lam, &l2), diag(&one, &lam, &l2)],
        )
        .unwrap();
        let group = FiniteGroup::generate(&[g], GROUP_CAP).unwrap();
        (x, group)
    }

    #[test]
    fn diagonal_blowup_pair_is_obstructed() {
        let r7 = Ring::cyclotomic(7).unwrap();
        let (x, group) = dp7_pair_order7(&r7);
        let locus = fixed_locus_group_in(&group, &x, &r7).unwrap();
        let FixedLocus::Finite(points) = locus else {
            panic!("expected a finite locus");
        };
        assert_eq!(points.len(), 25);
        let space = x.section_space().unwrap();
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        match obstruction_certificate(&x, &rep, &space, &group.generator_indices, &points, &r7)
            .unwrap()
        {
            Obstruction::Certified(items) => {
                // the eigenspaces exhaust the 64-dimensional space
                let total: usize = items.iter().map(|i| i.dimension).sum();
                assert_eq!(total, 64);
                for item in &items {
                    assert!(item.blocking_point < points.len());
                }
            }
            Obstruction::Refuted { .. } => panic!("no eigenspace should survive"),
        }
    }

    #[test]
    fn free_case_refutes_the_obstruction() {
        let r12 = Ring::cyclotomic(12).unwrap();
        let x = dp6_square(&r12);
        let group = dic3(&r12);
        let locus = fixed_locus_group_in(&group, &x, &r12).unwrap();
        let FixedLocus::Finite(points) = locus else {
            panic!("expected a finite locus");
        };
        let space = x.section_space().unwrap();
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        let out = obstruction_certificate(
            &x,
            &rep,
            &space,
            &group.generator_indices,
            &points,
            &r12,
        )
        .unwrap();
        assert!(matches!(out, Obstruction::Refuted { .. }));
    }

    #[test]
    fn base_point_checks_and_pools() {
        // the plane pair with two commuting order-3 diagonal/cyclic maps
        let r3 = Ring::cyclotomic(3).unwrap();
        let w = r3.zeta();
        let p2a = SurfaceModel::p2(&r3, "x");
        let p2b = SurfaceModel::p2(&r3, "y");
        let x = ProductModel::new("P2xP2", vec![p2a.clone(), p2b.clone()]).unwrap();
        let diag = |r: &Ring, a: &Scalar, b: &Scalar, c: &Scalar| {
            Matrix::from_fn(r, 3, 3, |i, j| {
                if i != j {
                    r.zero()
                } else {
                    [a, b, c][i].clone()
                }
            })
        };
        let one = r3.one();
        let w2 = w.mul(&w);
        let g = Automorphism::new(
            &r3,
            vec![0, 1],
            vec![diag(&r3, &one, &w, &w2), diag(&r3, &one, &w, &w2)],
        )
        .unwrap();
        let h = Automorphism::new(&r3, vec![0, 1], vec![cyc_fwd(&r3), cyc_fwd(&r3)]).unwrap();
        let group = FiniteGroup::generate(&[g, h], GROUP_CAP).unwrap();
        assert_eq!(group.order(), 9);
        let space = x.section_space().unwrap();
        assert_eq!(space.dimension(), 100);
        let rep = SectionRepresentation::build(&group, &space, &x).unwrap();
        let inv = rep.invariant_subspace().unwrap();
        assert_eq!(inv.len(), 12);
        let basis = sections_from_coords(&r3, &space, &inv).unwrap();
        // structured pool: coordinates among 0, ±1 and the cube roots
        let values = vec![
            r3.one(),
            r3.int(-1),
            w.clone(),
            w2.clone(),
            w.neg(),
            w2.neg(),
        ];
        let pa = ambient_pool(&p2a, &r3, &values).unwrap();
        let pb = ambient_pool(&p2b, &r3, &values).unwrap();
        let pool = product_pool(&[pa, pb]);
        let found = base_point_search(&x, &basis, &pool, &r3).unwrap();
        assert!(found.is_empty(), "the invariant system is base-point free");
        // verification keeps exactly the honest base points of a system
        let cube = parse_poly(&r3, x.blocks(), "1 * x0^3 * y0^3").unwrap();
        let e2 = |pre: &str| {
            SurfacePoint::Ambient(
                Point::new(
                    &r3,
                    &Blocks::new(&[(pre, &[&format!("{pre}0"), &format!("{pre}1"), &format!("{pre}2")])]),
                    vec![vec![r3.zero(), r3.zero(), r3.one()]],
                )
                .unwrap(),
            )
        };
        let e0 = |pre: &str| {
            SurfacePoint::Ambient(
                Point::new(
                    &r3,
                    &Blocks::new(&[(pre, &[&format!("{pre}0"), &format!("{pre}1"), &format!("{pre}2")])]),
                    vec![vec![r3.one(), r3.zero(), r3.zero()]],
                )
                .unwrap(),
            )
        };
        let candidates = vec![
            vec![e2("x"), e2("y")],
            vec![e0("x"), e0("y")],
        ];
        let kept = base_point_verify(&x, &[cube], &candidates, &r3).unwrap();
        assert_eq!(kept, vec![0]);
        assert!(base_point_verify(&x, &basis, &[], &r3).unwrap().is_empty());
    }

    #[test]
    fn jacobian_smoothness_at_points() {
        let q = Ring::rationals();
        let p2a = SurfaceModel::p2(&q, "x");
        let p2b = SurfaceModel::p2(&q, "y");
        let x = ProductModel::new("P2xP2", vec![p2a, p2b]).unwrap();
        let pt = |a: [i64; 3], b: [i64; 3]| {
            vec![
                SurfacePoint::Ambient(
                    Point::new(
                        &q,
                        &Blocks::new(&[("x", &["x0", "x1", "x2"])]),
                        vec![a.iter().map(|&v| q.int(v)).collect()],
                    )
                    .unwrap(),
                ),
                SurfacePoint::Ambient(
                    Point::new(
                        &q,
                        &Blocks::new(&[("y", &["y0", "y1", "y2"])]),
                        vec![b.iter().map(|&v| q.int(v)).collect()],
                    )
                    .unwrap(),
                ),
            ]
        };
        // a cone-like section: singular where all coordinates of both
        // vanishing groups meet
        let cone = parse_poly(
            &q,
            x.blocks(),
            "1 * x0^3 * y0^3 + 1 * x1^3 * y1^3 + 1 * x2^3 * y2^3",
        )
        .unwrap();
        let bad = smoothness_at_point(&x, &cone, &pt([0, 0, 1], [0, 1, 0]), &q).unwrap();
        assert!(!bad.smooth);
        assert_eq!(bad.rank_with_section, bad.rank_equations);
        // a section with an honest linear term in the chart
        let nice = parse_poly(&q, x.blocks(), "1 * x2^3 * y1 * y2^2").unwrap();
        let good = smoothness_at_point(&x, &nice, &pt([0, 0, 1], [0, 0, 1]), &q).unwrap();
        assert!(good.smooth);
        // a point off the zero locus is a precondition error
        assert!(smoothness_at_point(&x, &nice, &pt([0, 0, 1], [0, 1, 1]), &q).is_err());
        // genericity: a system whose members are all singular at the
        // point fails, and one transverse member rescues it
        let m1 = parse_poly(&q, x.blocks(), "1 * x0^3 * y0^3").unwrap();
        let m2 = parse_poly(&q, x.blocks(), "1 * x1^3 * y1^3").unwrap();
        let p0 = pt([0, 0, 1], [0, 0, 1]);
        assert!(!generic_smoothness_at_base_point(&x, &[m1.clone(), m2.clone()], &p0, &q).unwrap());
        assert!(generic_smoothness_at_base_point(&x, &[m1, m2, nice], &p0, &q).unwrap());
    }

    #[test]
    fn smoothness_in_a_blowup_chart() {
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
        let x = ProductModel::new("dP7xP2", vec![dp7, p2]).unwrap();
        let s = parse_poly(&q, x.blocks(), "1 * x0^2 * x1 * y0^3").unwrap();
        // on the strict transform over (1:0:0) the section vanishes in
        // direction (0:1) and the chart gradient is nonzero
        let pt = vec![
            SurfacePoint::Exceptional {
                center: 0,
                direction: [q.zero(), q.one()],
            },
            SurfacePoint::Ambient(
                Point::new(
                    &q,
                    &Blocks::new(&[("y", &["y0", "y1", "y2"])]),
                    vec![vec![q.one(), q.zero(), q.zero()]],
                )
                .unwrap(),
            ),
        ];
        let verdict = smoothness_at_point(&x, &s, &pt, &q).unwrap();
        assert!(verdict.smooth);
        assert_eq!(verdict.rank_equations, 0);
        // in direction (1:0) the strict transform is nonzero: rejected
        let off = vec![
            SurfacePoint::Exceptional {
                center: 0,
                direction: [q.one(), q.zero()],
            },
            pt[1].clone(),
        ];
        assert!(smoothness_at_point(&x, &s, &off, &q).is_err());
    }

    #[test]
    fn finite_field_probe_finds_and_clears_singularities() {
        let q = Ring::rationals();
        let p2a = SurfaceModel::p2(&q, "x");
        let p2b = SurfaceModel::p2(&q, "y");
        let x = ProductModel::new("P2xP2", vec![p2a, p2b]).unwrap();
        let cone = parse_poly(
            &q,
            x.blocks(),
            "1 * x0^3 * y0^3 + 1 * x1^3 * y1^3 + 1 * x2^3 * y2^3",
        )
        .unwrap();
        let report = smoothness_probe_modp(&x, &cone, 7).unwrap();
        assert_eq!(report.scanned, 57 * 57);
        assert!(!report.singular.is_empty());
        assert!(report.singular.contains(&"(0:0:1)x(0:1:0)".to_string()));

        // the diagonal hyperplane pairing on the Fermat pair is clean
        let r3 = Ring::cyclotomic(3).unwrap();
        let (fx, _) = fermat_pair(&r3);
        let s = parse_poly(
            &r3,
            fx.blocks(),
            "1 * x0 * y0 + 1 * x1 * y1 + 1 * x2 * y2 + 1 * x3 * y3",
        )
        .unwrap();
        let report = smoothness_probe_modp(&fx, &s, 7).unwrap();
        assert!(report.singular.is_empty(), "found {:?}", report.singular);
        assert!(report.scanned > 0);
        // a prime where the cyclotomic order does not split is rejected
        match smoothness_probe_modp(&fx, &s, 5) {
            Err(Error::BadPrime { prime, suggestion, .. }) => {
                assert_eq!(prime, 5);
                assert_eq!(suggestion, 7);
            }
            other => panic!("expected a bad-prime error, got {:?}", other.map(|r| r.singular)),
        }
    }

    #[test]
    fn residue_assignment_respects_the_rules() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let ring = r3.extend_algebraic("c", 3, &[r3.int(-3)]).unwrap();
        // −3 is a cube mod 61 (3⁵ ≡ −1, so 3²⁰ ≡ 1) but not mod 7
        let a = FpAssignment::build(&ring, 61).unwrap();
        let z = a.scalar(&ring.zeta()).unwrap();
        assert_ne!(z, 1);
        assert_eq!(pow_mod(z, 3, 61), 1);
        let c = a.scalar(&ring.generator("c").unwrap()).unwrap();
        assert_eq!(pow_mod(c, 3, 61), 61 - 3);
        assert!(matches!(
            FpAssignment::build(&ring, 7),
            Err(Error::BadPrime { prime: 7, .. })
        ));
    }
}
