//! Exact fixed loci of automorphisms on surfaces and products:
//! eigen-directions of block maps, solving the induced equations on
//! eigenspace families, exceptional directions over blown-up centers,
//! the cycle reduction for factor-swapping elements, and detection of
//! positive-dimensional fixed loci.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::group::{eigenvalue_candidates, nth_root_in_ring, Automorphism, FiniteGroup};
use crate::linalg::Matrix;
use crate::poly::{proportional, Blocks, Point, Poly};
use crate::product::ProductModel;
use crate::scalar::{Ring, Scalar};
use crate::surface::{SurfaceKind, SurfaceModel, SurfacePoint};

// ---------------------------------------------------------------------------
// Loci
// ---------------------------------------------------------------------------

/// Fixed locus of a map on a single surface factor.
pub enum FactorFixed {
    Finite(Vec<SurfacePoint>),
    PositiveDimensional(String),
}

/// Fixed locus on a product: one surface point per factor.
pub enum FixedLocus {
    Finite(Vec<Vec<SurfacePoint>>),
    PositiveDimensional(String),
}

impl FixedLocus {
    pub fn count(&self) -> Result<usize> {
        match self {
            FixedLocus::Finite(v) => Ok(v.len()),
            FixedLocus::PositiveDimensional(w) => Err(Error::NotFinite(w.clone())),
        }
    }
}

/// Point count of a finite locus.
pub fn euler_fixed(l: &FixedLocus) -> Result<i64> {
    Ok(l.count()? as i64)
}

// ---------------------------------------------------------------------------
// A map restricted to one factor
// ---------------------------------------------------------------------------

/// Blocks of one factor mapped into blocks of another (or the same)
/// factor: local permutation plus per-target-block matrices.
#[derive(Clone)]
pub struct FactorMap {
    pub perm: Vec<usize>,
    pub mats: Vec<Matrix>,
}

impl FactorMap {
    pub fn compose(&self, other: &FactorMap) -> FactorMap {
        let perm = (0..self.perm.len())
            .map(|b| other.perm[self.perm[b]])
            .collect();
        let mats = (0..self.perm.len())
            .map(|b| self.mats[b].mul(&other.mats[self.perm[b]]))
            .collect();
        FactorMap { perm, mats }
    }

    pub fn is_projective_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.mats.iter().all(|m| m.is_scalar_multiple_of_identity())
    }

    /// Image of an ambient point (block coords), in the target factor.
    pub fn apply_coords(&self, coords: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        (0..self.perm.len())
            .map(|b| self.mats[b].mul_vec(&coords[self.perm[b]]))
            .collect()
    }

    /// Image of a surface point; `from` and `to` are the source and
    /// target factor models (equal for a self-map).
    pub fn apply_point(
        &self,
        from: &SurfaceModel,
        to: &SurfaceModel,
        p: &SurfacePoint,
        ring: &Ring,
    ) -> Result<SurfacePoint> {
        match p {
            SurfacePoint::Ambient(pt) => {
                let pt = pt.promote(ring)?;
                let coords: Vec<Vec<Scalar>> = (0..from.blocks().n_blocks())
                    .map(|b| pt.block_coords(b).to_vec())
                    .collect();
                let img = self.apply_coords(&coords);
                Ok(SurfacePoint::Ambient(Point::new(ring, to.blocks(), img)?))
            }
            SurfacePoint::Exceptional { center, direction } => {
                let m = self.mats[0].promote(ring)?;
                let src = &from.charts()[*center];
                let img_center = m.mul_vec(&promote_vec(&src.center, ring)?);
                let tgt = to
                    .charts()
                    .iter()
                    .position(|c| proportional(ring, &promote_vec(&c.center, ring).unwrap(), &img_center))
                    .ok_or_else(|| {
                        Error::InvalidAction("map does not permute the blown-up centers".into())
                    })?;
                let b = induced_chart_map(from, *center, to, tgt, &m, ring)?;
                let d = [
                    direction[0].promote(ring)?,
                    direction[1].promote(ring)?,
                ];
                let nd = b.mul_vec(&d);
                Ok(SurfacePoint::Exceptional {
                    center: tgt,
                    direction: [nd[0].clone(), nd[1].clone()],
                })
            }
        }
    }
}

fn promote_vec(v: &[Scalar], ring: &Ring) -> Result<Vec<Scalar>> {
    v.iter().map(|s| s.promote(ring)).collect()
}

/// The 2×2 map between exceptional ℙ¹ directions induced by an
/// ambient matrix taking one center to another: rows/columns 0 and 2
/// of `T_to⁻¹ · M · T_from`.
pub fn induced_chart_map(
    from: &SurfaceModel,
    c_from: usize,
    to: &SurfaceModel,
    c_to: usize,
    m: &Matrix,
    ring: &Ring,
) -> Result<Matrix> {
    let t_from = from.charts()[c_from].t.promote(ring)?;
    let t_to = to.charts()[c_to].t.promote(ring)?;
    let a = t_to.inverse()?.mul(m).mul(&t_from);
    Ok(Matrix::from_fn(ring, 2, 2, |i, j| {
        a.at([0, 2][i], [0, 2][j]).clone()
    }))
}

/// Restriction of an automorphism to the blocks of one factor
/// (mapping factor `src` into factor `dst`); `None` when the blocks do
/// not line up that way.
pub fn restrict_to_factor(
    a: &Automorphism,
    x: &ProductModel,
    dst: usize,
    src: usize,
) -> Option<FactorMap> {
    let (dlo, dhi) = x.block_ranges()[dst];
    let (slo, shi) = x.block_ranges()[src];
    let mut perm = Vec::new();
    let mut mats = Vec::new();
    for b in dlo..dhi {
        let s = a.perm()[b];
        if s < slo || s >= shi {
            return None;
        }
        perm.push(s - slo);
        mats.push(a.maps()[b].clone());
    }
    let _ = dhi;
    Some(FactorMap { perm, mats })
}

// ---------------------------------------------------------------------------
// Eigen-directions
// ---------------------------------------------------------------------------

/// One eigenvalue's worth of fixed directions.
pub enum EigenPart {
    Dir(Vec<Scalar>),
    /// Eigenspace of dimension ≥ 2 with an explicit basis.
    Space(Vec<Vec<Scalar>>),
}

/// Eigen-directions of a finite-order matrix over the ring, grouped by
/// eigenvalue.  Errors with needs-extension when the eigenvalues do
/// not all lie in the ring.
pub fn fixed_points_linear(m: &Matrix) -> Result<Vec<(Scalar, EigenPart)>> {
    let ring = m.ring().clone();
    if m.is_scalar_multiple_of_identity() {
        let n = m.rows();
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![ring.zero(); n];
                v[i] = ring.one();
                v
            })
            .collect();
        return Ok(vec![(m.at(0, 0).clone(), EigenPart::Space(basis))]);
    }
    let candidates = eigenvalue_candidates(m)?;
    let mut out = Vec::new();
    for lam in candidates {
        let shifted = m.sub(&Matrix::identity(&ring, m.rows()).scale(&lam));
        match shifted.kernel_basis() {
            Ok(kern) => {
                if kern.len() == 1 {
                    out.push((lam, EigenPart::Dir(kern.into_iter().next().unwrap())));
                } else if kern.len() >= 2 {
                    out.push((lam, EigenPart::Space(kern)));
                }
            }
            Err(_) => {
                // entries outside the field part: fall back to the
                // division-free adjugate
                if !shifted.det().is_zero() {
                    continue;
                }
                let adj = shifted.adjugate();
                let mut dir = None;
                'cols: for j in 0..adj.cols() {
                    let col = adj.col(j);
                    if col.iter().any(|c| !c.is_zero()) {
                        dir = Some(col);
                        break 'cols;
                    }
                }
                match dir {
                    Some(d) => out.push((lam, EigenPart::Dir(d))),
                    None => {
                        return Err(Error::NeedsExtension(
                            "eigenspace of dimension ≥ 2 over a non-field ring".into(),
                        ))
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Univariate roots in the ring
// ---------------------------------------------------------------------------

/// Torsion units available for adjusting roots: ±ζ^j.
fn unit_pool(ring: &Ring) -> Vec<Scalar> {
    let mut out = Vec::new();
    for j in 0..ring.order().max(1) {
        let z = ring.zeta().pow(j as i64).unwrap_or_else(|_| ring.one());
        out.push(z.clone());
        out.push(z.neg());
    }
    out
}

/// Trial values for root hunting: small rational multiples of
/// monomials in ζ and the generators.
fn trial_pool(ring: &Ring) -> Vec<Scalar> {
    let mut monos = vec![ring.one()];
    for (name, bound) in ring.gen_bounds() {
        let g = match ring.generator(&name) {
            Some(g) => g,
            None => continue,
        };
        let hi = bound.unwrap_or(2).max(2);
        let mut next = Vec::new();
        for m in &monos {
            for e in 0..hi as i64 {
                if let Ok(p) = g.pow(e) {
                    next.push(m.mul(&p));
                }
            }
        }
        monos = next;
    }
    let mut out = vec![ring.zero()];
    let coefs = [
        crate::scalar::rat(1, 1),
        crate::scalar::rat(-1, 1),
        crate::scalar::rat(2, 1),
        crate::scalar::rat(-2, 1),
        crate::scalar::rat(1, 2),
        crate::scalar::rat(-1, 2),
        crate::scalar::rat(3, 1),
        crate::scalar::rat(-3, 1),
    ];
    // Torsion units plus two-term combinations like ζ + ζ^k, which
    // cover square roots such as √2 = ζ₈ + ζ₈⁻¹ in even-order rings.
    let mut units = unit_pool(ring);
    let n = ring.order().max(1);
    for j in 0..n {
        for k in (j + 1)..n {
            let zj = ring.zeta().pow(j as i64).unwrap_or_else(|_| ring.one());
            let zk = ring.zeta().pow(k as i64).unwrap_or_else(|_| ring.one());
            units.push(zj.add(&zk));
            units.push(zj.sub(&zk));
        }
    }
    for u in units {
        for m in &monos {
            for c in &coefs {
                out.push(u.mul(m).scale(c));
            }
        }
    }
    out
}

fn eval_poly_scalar(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let ring = x.ring().clone();
    let mut acc = ring.zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Divide `p(t)` by `(t − r)`, assuming `p(r) = 0`.
fn deflate(coeffs: &[Scalar], r: &Scalar) -> Vec<Scalar> {
    let n = coeffs.len();
    let ring = r.ring().clone();
    let mut out = vec![ring.zero(); n - 1];
    let mut carry = ring.zero();
    for k in (1..n).rev() {
        let q = coeffs[k].add(&carry);
        out[k - 1] = q.clone();
        carry = q.mul(r);
    }
    out
}

/// All roots of a univariate polynomial that lie in the ring, or a
/// needs-extension error when roots may be missing.  `coeffs` are
/// ascending.
pub fn univariate_roots(coeffs: &[Scalar]) -> Result<Vec<Scalar>> {
    let ring = coeffs
        .first()
        .map(|c| c.ring().clone())
        .unwrap_or_else(Ring::rationals);
    let mut c: Vec<Scalar> = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::Structure("zero polynomial has every root".into()));
    }
    let mut roots: Vec<Scalar> = Vec::new();
    let push = |roots: &mut Vec<Scalar>, r: Scalar| {
        if !roots.iter().any(|x| x.sub(&r).is_zero()) {
            roots.push(r);
        }
    };
    // factor out t^v
    let mut low = 0;
    while c[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        push(&mut roots, ring.zero());
        c.drain(0..low);
    }
    loop {
        let deg = c.len() - 1;
        if deg == 0 {
            return Ok(roots);
        }
        if deg == 1 {
            let r = c[0].neg().mul(&c[1].inv()?);
            push(&mut roots, r);
            return Ok(roots);
        }
        // binomial a t^k + b
        if c[1..deg].iter().all(|x| x.is_zero()) {
            let target = c[0].neg().mul(&c[deg].inv()?);
            let base = nth_root_in_ring(&target, deg as u32).or_else(|| {
                // The monomial search misses roots that are sums, such
                // as √2·b; scan the trial pool before giving up.
                trial_pool(&ring).into_iter().find(|t| {
                    t.pow(deg as i64)
                        .map(|p| p.sub(&target).is_zero())
                        .unwrap_or(false)
                })
            });
            match base {
                Some(r) => {
                    for u in unit_pool(&ring) {
                        let cand = r.mul(&u);
                        match cand.pow(deg as i64) {
                            Ok(p) if p.sub(&target).is_zero() => push(&mut roots, cand),
                            _ => {}
                        }
                    }
                    return Ok(roots);
                }
                None => {
                    return Err(Error::NeedsExtension(format!(
                        "no {deg}-th root of {target} in {}",
                        ring.describe()
                    )))
                }
            }
        }
        if deg == 2 {
            // quadratic formula with an in-ring square root
            let (a, b, c0) = (&c[2], &c[1], &c[0]);
            let disc = b.mul(b).sub(&ring.int(4).mul(a).mul(c0));
            if disc.is_zero() {
                let r = b.neg().mul(&ring.int(2).mul(a).inv()?);
                push(&mut roots, r);
                return Ok(roots);
            }
            let mut sq = nth_root_in_ring(&disc, 2);
            if sq.is_none() {
                // trial values may still square to the discriminant
                sq = trial_pool(&ring)
                    .into_iter()
                    .find(|t| t.mul(t).sub(&disc).is_zero());
            }
            match sq {
                Some(s) => {
                    let half = ring.int(2).mul(a).inv()?;
                    push(&mut roots, b.neg().add(&s).mul(&half));
                    push(&mut roots, b.neg().sub(&s).mul(&half));
                    return Ok(roots);
                }
                None => {
                    return Err(Error::NeedsExtension(format!(
                        "discriminant {disc} has no square root in {}",
                        ring.describe()
                    )))
                }
            }
        }
        // general: hunt a trial root and deflate
        let mut found = None;
        for t in trial_pool(&ring) {
            if eval_poly_scalar(&c, &t).is_zero() {
                found = Some(t);
                break;
            }
        }
        match found {
            Some(r) => {
                c = deflate(&c, &r);
                push(&mut roots, r);
            }
            None => {
                return Err(Error::NeedsExtension(format!(
                    "irreducible degree-{deg} factor over {}",
                    ring.describe()
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Solving equations on eigenspace families
// ---------------------------------------------------------------------------

enum SystemOutcome {
    Finite(Vec<Vec<Scalar>>),
    PositiveDimensional,
}

/// Solutions of a multihomogeneous system on a product of projective
/// parameter blocks, by chart enumeration plus triangular univariate
/// solving with monomial-content branching.
fn solve_projective_system(
    ring: &Ring,
    blocks: &Blocks,
    equations: &[Poly],
) -> Result<SystemOutcome> {
    let nb = blocks.n_blocks();
    let mut charts: Vec<Vec<usize>> = vec![vec![]];
    for b in 0..nb {
        let mut next = Vec::new();
        for c in &charts {
            for lead in 0..blocks.block_size(b) {
                let mut cc = c.clone();
                cc.push(lead);
                next.push(cc);
            }
        }
        charts = next;
    }
    let mut solutions: Vec<Vec<Scalar>> = Vec::new();
    for chart in charts {
        // assignment per flat variable: None = unknown
        let mut assign: Vec<Option<Scalar>> = vec![None; blocks.n_vars()];
        for b in 0..nb {
            for j in 0..blocks.block_size(b) {
                let fi = blocks.flat_index(b, j);
                if j < chart[b] {
                    assign[fi] = Some(ring.zero());
                } else if j == chart[b] {
                    assign[fi] = Some(ring.one());
                }
            }
        }
        match solve_affine(ring, blocks, equations, assign)? {
            SystemOutcome::PositiveDimensional => return Ok(SystemOutcome::PositiveDimensional),
            SystemOutcome::Finite(sols) => {
                for s in sols {
                    if !solutions
                        .iter()
                        .any(|t| t.iter().zip(&s).all(|(a, b)| a.sub(b).is_zero()))
                    {
                        solutions.push(s);
                    }
                }
            }
        }
    }
    Ok(SystemOutcome::Finite(solutions))
}

fn substitute_assignment(
    ring: &Ring,
    blocks: &Blocks,
    p: &Poly,
    assign: &[Option<Scalar>],
) -> Poly {
    let subs: Vec<Poly> = (0..blocks.n_vars())
        .map(|i| match &assign[i] {
            Some(v) => Poly::constant(ring, blocks, v),
            None => {
                let (b, k) = blocks.var_home(i);
                Poly::var(ring, blocks, &blocks.block_vars(b)[k].clone())
            }
        })
        .collect();
    p.substitute(blocks, &subs)
}

fn vars_present(p: &Poly) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (expo, _) in p.terms() {
        for (i, &e) in expo.iter().enumerate() {
            if e > 0 {
                out.insert(i);
            }
        }
    }
    out
}

/// Extract ascending coefficients when the polynomial involves only
/// variable `v`.
fn univariate_coeffs(p: &Poly, v: usize) -> Vec<Scalar> {
    let ring = p.ring().clone();
    let deg = p
        .terms()
        .map(|(e, _)| e[v] as usize)
        .max()
        .unwrap_or(0);
    let mut out = vec![ring.zero(); deg + 1];
    for (e, c) in p.terms() {
        out[e[v] as usize] = out[e[v] as usize].add(c);
    }
    out
}

fn solve_affine(
    ring: &Ring,
    blocks: &Blocks,
    equations: &[Poly],
    assign: Vec<Option<Scalar>>,
) -> Result<SystemOutcome> {
    // substitute knowns and drop identically-zero equations
    let eqs: Vec<Poly> = equations
        .iter()
        .map(|e| substitute_assignment(ring, blocks, e, &assign))
        .filter(|e| !e.is_zero())
        .collect();
    // any equation with no unknowns left and a nonzero value kills the branch
    for e in &eqs {
        if vars_present(e).is_empty() {
            return Ok(SystemOutcome::Finite(Vec::new()));
        }
    }
    let unknowns: Vec<usize> = (0..assign.len()).filter(|&i| assign[i].is_none()).collect();
    if unknowns.is_empty() {
        let sol: Vec<Scalar> = assign.into_iter().map(|v| v.unwrap()).collect();
        return Ok(SystemOutcome::Finite(vec![sol]));
    }
    if eqs.is_empty() {
        return Ok(SystemOutcome::PositiveDimensional);
    }
    // a univariate equation pins one unknown
    for e in &eqs {
        let vars = vars_present(e);
        if vars.len() == 1 {
            let v = *vars.iter().next().unwrap();
            let coeffs = univariate_coeffs(e, v);
            let roots = univariate_roots(&coeffs)?;
            let mut all = Vec::new();
            for r in roots {
                let mut a2 = assign.clone();
                a2[v] = Some(r);
                match solve_affine(ring, blocks, equations, a2)? {
                    SystemOutcome::PositiveDimensional => {
                        return Ok(SystemOutcome::PositiveDimensional)
                    }
                    SystemOutcome::Finite(s) => all.extend(s),
                }
            }
            return Ok(SystemOutcome::Finite(all));
        }
    }
    // a single nonconstant equation in two or more unknowns cuts a
    // hypersurface, never a finite set
    if eqs.len() == 1 && vars_present(&eqs[0]).len() >= 2 {
        return Ok(SystemOutcome::PositiveDimensional);
    }
    // monomial-content branching: v · q = 0 splits into v = 0 and q = 0
    for e in &eqs {
        for &v in &vars_present(e) {
            if e.terms().all(|(expo, _)| expo[v] > 0) {
                let mut all = Vec::new();
                let mut a2 = assign.clone();
                a2[v] = Some(ring.zero());
                match solve_affine(ring, blocks, equations, a2)? {
                    SystemOutcome::PositiveDimensional => {
                        return Ok(SystemOutcome::PositiveDimensional)
                    }
                    SystemOutcome::Finite(s) => all.extend(s),
                }
                // cofactor branch: divide the equation by v and solve
                // the modified system
                let var_name = {
                    let (b, k) = blocks.var_home(v);
                    blocks.block_vars(b)[k].clone()
                };
                let cof = e.divide_by_var(&var_name).expect("divisible by content");
                let mut eqs2: Vec<Poly> = equations.to_vec();
                eqs2.push(cof);
                match solve_affine(ring, blocks, &eqs2, assign.clone())? {
                    SystemOutcome::PositiveDimensional => {
                        return Ok(SystemOutcome::PositiveDimensional)
                    }
                    SystemOutcome::Finite(s) => {
                        for sol in s {
                            if !all
                                .iter()
                                .any(|t: &Vec<Scalar>| t.iter().zip(&sol).all(|(a, b)| a.sub(b).is_zero()))
                            {
                                all.push(sol);
                            }
                        }
                    }
                }
                return Ok(SystemOutcome::Finite(all));
            }
        }
    }
    // linearize over the monomial support and row-reduce: independent
    // linear combinations of the equations can decouple the system
    // (e.g. two quadrics sharing square monomials)
    if let Some(reduced) = monomial_elimination(ring, blocks, &eqs)? {
        return solve_affine(ring, blocks, &reduced, assign);
    }
    Err(Error::NeedsExtension(
        "coupled multivariate system beyond the triangular solver".into(),
    ))
}

/// Treat each distinct monomial as a formal unknown, row-reduce the
/// coefficient matrix, and read the reduced rows back as equations.
/// Returns `None` when reduction does not change the system.
fn monomial_elimination(
    ring: &Ring,
    blocks: &Blocks,
    eqs: &[Poly],
) -> Result<Option<Vec<Poly>>> {
    let mut support: Vec<Vec<u16>> = Vec::new();
    for e in eqs {
        for (expo, _) in e.terms() {
            if !support.contains(expo) {
                support.push(expo.clone());
            }
        }
    }
    support.sort();
    if support.is_empty() || eqs.len() < 2 {
        return Ok(None);
    }
    let rows: Vec<Vec<Scalar>> = eqs
        .iter()
        .map(|e| {
            support
                .iter()
                .map(|m| e.coefficient(m))
                .collect()
        })
        .collect();
    let m = Matrix::from_rows(ring, rows);
    let (r, _) = m.rref()?;
    let mut out = Vec::new();
    for i in 0..r.rows() {
        let mut p = Poly::zero(ring, blocks);
        for (j, expo) in support.iter().enumerate() {
            let c = r.at(i, j);
            if !c.is_zero() {
                let names: Vec<(String, u16)> = expo
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| (blocks.var_name(v).to_string(), e))
                    .collect();
                let refs: Vec<(&str, u16)> =
                    names.iter().map(|(n, e)| (n.as_str(), *e)).collect();
                p = p.add(&Poly::monomial(ring, blocks, &c, &refs));
            }
        }
        if !p.is_zero() {
            out.push(p);
        }
    }
    if out.len() == eqs.len()
        && out
            .iter()
            .zip(eqs)
            .all(|(a, b)| a.sub(b).is_zero())
    {
        return Ok(None);
    }
    Ok(Some(out))
}

// ---------------------------------------------------------------------------
// Fixed points on a surface factor
// ---------------------------------------------------------------------------

/// Fixed points of a self-map of one surface factor.
pub fn fixed_points_surface(s: &SurfaceModel, fm: &FactorMap) -> Result<FactorFixed> {
    fixed_points_surface_in(s, fm, s.ring())
}

/// Same, with results in an explicitly chosen extension ring.
pub fn fixed_points_surface_in(
    s: &SurfaceModel,
    fm: &FactorMap,
    ring: &Ring,
) -> Result<FactorFixed> {
    if fm.is_projective_identity() {
        return Ok(FactorFixed::PositiveDimensional(format!(
            "identity fixes all of {}",
            s.name
        )));
    }
    let mats: Vec<Matrix> = fm
        .mats
        .iter()
        .map(|m| m.promote(ring))
        .collect::<Result<_>>()?;
    let fm = FactorMap {
        perm: fm.perm.clone(),
        mats,
    };
    match s.kind {
        SurfaceKind::P1 | SurfaceKind::P2 => {
            let eig = fixed_points_linear(&fm.mats[0])?;
            let mut pts = Vec::new();
            for (_, part) in eig {
                match part {
                    EigenPart::Dir(d) => pts.push(SurfacePoint::Ambient(Point::new(
                        ring,
                        s.blocks(),
                        vec![d],
                    )?)),
                    EigenPart::Space(_) => {
                        return Ok(FactorFixed::PositiveDimensional(format!(
                            "eigenspace of dimension ≥ 2 on {}",
                            s.name
                        )))
                    }
                }
            }
            Ok(FactorFixed::Finite(dedup_points(ring, pts)))
        }
        SurfaceKind::Blowup => {
            let m = &fm.mats[0];
            // the map must permute the centers
            let centers: Vec<Vec<Scalar>> = s
                .charts()
                .iter()
                .map(|c| promote_vec(&c.center, ring))
                .collect::<Result<_>>()?;
            for c in &centers {
                let img = m.mul_vec(c);
                if !centers.iter().any(|d| proportional(ring, d, &img)) {
                    return Err(Error::InvalidAction(
                        "map does not permute the blown-up centers".into(),
                    ));
                }
            }
            let eig = fixed_points_linear(m)?;
            let mut pts = Vec::new();
            for (_, part) in eig {
                match part {
                    EigenPart::Space(_) => {
                        return Ok(FactorFixed::PositiveDimensional(format!(
                            "a line of fixed points on the plane under {}",
                            s.name
                        )))
                    }
                    EigenPart::Dir(d) => {
                        let fixed_center = centers.iter().position(|c| proportional(ring, c, &d));
                        match fixed_center {
                            None => pts.push(SurfacePoint::Ambient(Point::new(
                                ring,
                                s.blocks(),
                                vec![d],
                            )?)),
                            Some(ci) => {
                                let b = induced_chart_map(s, ci, s, ci, m, ring)?;
                                if b.is_scalar_multiple_of_identity() {
                                    return Ok(FactorFixed::PositiveDimensional(format!(
                                        "exceptional curve over center {ci} is pointwise fixed"
                                    )));
                                }
                                for (_, part) in fixed_points_linear(&b)? {
                                    match part {
                                        EigenPart::Dir(d2) => pts.push(SurfacePoint::Exceptional {
                                            center: ci,
                                            direction: [d2[0].clone(), d2[1].clone()],
                                        }),
                                        EigenPart::Space(_) => {
                                            return Ok(FactorFixed::PositiveDimensional(
                                                format!("exceptional curve over center {ci} is pointwise fixed"),
                                            ))
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(FactorFixed::Finite(dedup_points(ring, pts)))
        }
        SurfaceKind::P1xP1 | SurfaceKind::Embedded => {
            fixed_points_blockwise(s, &fm, ring)
        }
        SurfaceKind::Numeric => Err(Error::UnsupportedModel(format!(
            "{} has no ambient for fixed-point computation",
            s.name
        ))),
    }
}

/// Fixed points of a block-permuting map on a multi-block model:
/// per-cycle eigen families, intersected with the defining equations.
fn fixed_points_blockwise(
    s: &SurfaceModel,
    fm: &FactorMap,
    ring: &Ring,
) -> Result<FactorFixed> {
    let nb = s.blocks().n_blocks();
    // cycles of the block permutation
    let mut seen = vec![false; nb];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for b0 in 0..nb {
        if seen[b0] {
            continue;
        }
        let mut cyc = vec![b0];
        seen[b0] = true;
        let mut b = fm.perm[b0];
        while b != b0 {
            seen[b] = true;
            cyc.push(b);
            b = fm.perm[b];
        }
        cycles.push(cyc);
    }
    // per cycle: eigen parts of the composite on the leader
    let mut cycle_parts: Vec<(Vec<usize>, Vec<EigenPart>)> = Vec::new();
    for cyc in &cycles {
        let mut comp = fm.mats[cyc[0]].clone();
        for &b in &cyc[1..] {
            comp = comp.mul(&fm.mats[b]);
        }
        let parts: Vec<EigenPart> = if comp.is_scalar_multiple_of_identity() {
            let n = comp.rows();
            vec![EigenPart::Space(
                (0..n)
                    .map(|i| {
                        let mut v = vec![ring.zero(); n];
                        v[i] = ring.one();
                        v
                    })
                    .collect(),
            )]
        } else {
            fixed_points_linear(&comp)?
                .into_iter()
                .map(|(_, p)| p)
                .collect()
        };
        if parts.is_empty() {
            return Ok(FactorFixed::Finite(Vec::new()));
        }
        cycle_parts.push((cyc.clone(), parts));
    }
    // enumerate combinations of eigen parts
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for (_, parts) in &cycle_parts {
        let mut next = Vec::new();
        for c in &combos {
            for i in 0..parts.len() {
                let mut cc = c.clone();
                cc.push(i);
                next.push(cc);
            }
        }
        combos = next;
    }
    let mut pts: Vec<SurfacePoint> = Vec::new();
    for combo in combos {
        // parameter blocks: one per cycle; eigen-lines get a single
        // variable (scale), larger spaces get their dimension
        let dims: Vec<usize> = combo
            .iter()
            .enumerate()
            .map(|(ci, &pi)| match &cycle_parts[ci].1[pi] {
                EigenPart::Dir(_) => 1,
                EigenPart::Space(b) => b.len(),
            })
            .collect();
        let specs: Vec<(String, Vec<String>)> = dims
            .iter()
            .enumerate()
            .map(|(ci, &d)| {
                (
                    format!("_s{ci}"),
                    (0..d).map(|j| format!("_s{ci}_{j}")).collect(),
                )
            })
            .collect();
        let spec_refs: Vec<(&str, Vec<&str>)> = specs
            .iter()
            .map(|(b, v)| (b.as_str(), v.iter().map(|x| x.as_str()).collect()))
            .collect();
        let spec_slices: Vec<(&str, &[&str])> = spec_refs
            .iter()
            .map(|(b, v)| (*b, v.as_slice()))
            .collect();
        let pblocks = Blocks::new(&spec_slices);
        // block coordinate expressions over the parameters
        let mut coords: Vec<Option<Vec<Poly>>> = vec![None; nb];
        for (ci, &pi) in combo.iter().enumerate() {
            let (cyc, parts) = &cycle_parts[ci];
            let leader_exprs: Vec<Poly> = match &parts[pi] {
                EigenPart::Dir(d) => d
                    .iter()
                    .map(|c| {
                        Poly::var(ring, &pblocks, &format!("_s{ci}_0")).scale(c)
                    })
                    .collect(),
                EigenPart::Space(basis) => {
                    let dim = basis[0].len();
                    (0..dim)
                        .map(|row| {
                            let mut acc = Poly::zero(ring, &pblocks);
                            for (j, v) in basis.iter().enumerate() {
                                acc = acc.add(
                                    &Poly::var(ring, &pblocks, &format!("_s{ci}_{j}"))
                                        .scale(&v[row]),
                                );
                            }
                            acc
                        })
                        .collect()
                }
            };
            coords[cyc[0]] = Some(leader_exprs);
            // propagate backwards around the cycle: x_{last} ~ M_{last} x_{leader}
            for k in (1..cyc.len()).rev() {
                let b = cyc[k];
                let next = if k == cyc.len() - 1 { cyc[0] } else { cyc[k + 1] };
                let src = coords[next].clone().expect("propagation order");
                let m = &fm.mats[b];
                let exprs: Vec<Poly> = (0..m.rows())
                    .map(|i| {
                        let mut acc = Poly::zero(ring, &pblocks);
                        for j in 0..m.cols() {
                            let c = m.at(i, j);
                            if !c.is_zero() {
                                acc = acc.add(&src[j].scale(c));
                            }
                        }
                        acc
                    })
                    .collect();
                coords[b] = Some(exprs);
            }
        }
        let coord_exprs: Vec<Poly> = (0..nb)
            .flat_map(|b| coords[b].clone().unwrap())
            .collect();
        // restrict the surface equations to the family
        let eqs: Vec<Poly> = s
            .equations()
            .iter()
            .map(|e| -> Result<Poly> {
                Ok(e.promote(ring)?.substitute(&pblocks, &coord_exprs))
            })
            .collect::<Result<_>>()?;
        let eqs: Vec<Poly> = eqs.into_iter().filter(|e| !e.is_zero()).collect();
        let has_params = dims.iter().any(|&d| d > 1);
        if eqs.is_empty() {
            if has_params {
                return Ok(FactorFixed::PositiveDimensional(format!(
                    "a positive-dimensional eigen family on {}",
                    s.name
                )));
            }
            // single point (each cycle a line through one direction)
            let sol: Vec<Scalar> = vec![ring.one(); pblocks.n_vars()];
            let pt = family_point(ring, s, &pblocks, &coord_exprs, &sol)?;
            if let Some(p) = pt {
                pts.push(p);
            }
            continue;
        }
        match solve_projective_system(ring, &pblocks, &eqs)? {
            SystemOutcome::PositiveDimensional => {
                return Ok(FactorFixed::PositiveDimensional(format!(
                    "equations vanish on a positive-dimensional family on {}",
                    s.name
                )))
            }
            SystemOutcome::Finite(sols) => {
                for sol in sols {
                    if let Some(p) = family_point(ring, s, &pblocks, &coord_exprs, &sol)? {
                        pts.push(p);
                    }
                }
            }
        }
    }
    Ok(FactorFixed::Finite(dedup_points(ring, pts)))
}

/// Evaluate the family's coordinate expressions at a parameter value
/// and assemble the surface point; `None` when some block vanishes
/// entirely (not a projective point).
fn family_point(
    ring: &Ring,
    s: &SurfaceModel,
    pblocks: &Blocks,
    coord_exprs: &[Poly],
    sol: &[Scalar],
) -> Result<Option<SurfacePoint>> {
    let pt = Point::new(ring, pblocks, split_by_blocks(pblocks, sol));
    let pt = match pt {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    let values: Vec<Scalar> = coord_exprs.iter().map(|e| e.evaluate(&pt)).collect();
    let mut by_block = Vec::new();
    let mut idx = 0;
    for b in 0..s.blocks().n_blocks() {
        let n = s.blocks().block_size(b);
        let chunk = values[idx..idx + n].to_vec();
        idx += n;
        if chunk.iter().all(|c| c.is_zero()) {
            return Ok(None);
        }
        by_block.push(chunk);
    }
    Ok(Some(SurfacePoint::Ambient(Point::new(
        ring,
        s.blocks(),
        by_block,
    )?)))
}

fn split_by_blocks(blocks: &Blocks, flat: &[Scalar]) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    let mut i = 0;
    for b in 0..blocks.n_blocks() {
        let n = blocks.block_size(b);
        out.push(flat[i..i + n].to_vec());
        i += n;
    }
    out
}

fn dedup_points(ring: &Ring, pts: Vec<SurfacePoint>) -> Vec<SurfacePoint> {
    let mut out: Vec<SurfacePoint> = Vec::new();
    for p in pts {
        if !out.iter().any(|q| q.same_point(&p, ring)) {
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Fixed points on a product
// ---------------------------------------------------------------------------

/// Factor-level cycle structure of an automorphism: which factor each
/// factor reads from.
fn factor_map_indices(a: &Automorphism, x: &ProductModel) -> Result<Vec<usize>> {
    let nf = x.factors().len();
    let mut fmap = vec![usize::MAX; nf];
    for (b, &p) in a.perm().iter().enumerate() {
        let tf = x.factor_of_block(b);
        let sf = x.factor_of_block(p);
        if fmap[tf] == usize::MAX {
            fmap[tf] = sf;
        } else if fmap[tf] != sf {
            return Err(Error::InvalidAction("permutation splits a factor".into()));
        }
    }
    Ok(fmap)
}

pub fn fixed_points_product(a: &Automorphism, x: &ProductModel) -> Result<FixedLocus> {
    fixed_points_product_in(a, x, a.ring())
}

pub fn fixed_points_product_in(
    a: &Automorphism,
    x: &ProductModel,
    ring: &Ring,
) -> Result<FixedLocus> {
    let ring = if ring.extends(x.ring()) {
        ring.clone()
    } else {
        x.ring().clone()
    };
    let fmap = factor_map_indices(a, x)?;
    let nf = x.factors().len();
    let mut seen = vec![false; nf];
    // per factor-cycle: leader fixed points plus the propagated
    // components on the other factors of the cycle
    let mut per_cycle: Vec<Vec<Vec<(usize, SurfacePoint)>>> = Vec::new();
    for f0 in 0..nf {
        if seen[f0] {
            continue;
        }
        let mut cyc = vec![f0];
        seen[f0] = true;
        let mut f = fmap[f0];
        while f != f0 {
            seen[f] = true;
            cyc.push(f);
            f = fmap[f];
        }
        // composite self-map of the leader: R_{f0} ∘ R_{f1} ∘ …
        let mut comp = restrict_to_factor(a, x, f0, cyc.get(1).copied().unwrap_or(f0))
            .ok_or_else(|| Error::InvalidAction("blocks do not align with factors".into()))?;
        for k in 1..cyc.len() {
            let next = restrict_to_factor(a, x, cyc[k], cyc[(k + 1) % cyc.len()])
                .ok_or_else(|| Error::InvalidAction("blocks do not align with factors".into()))?;
            comp = comp.compose(&next);
        }
        let leader_fixed = fixed_points_surface_in(&x.factors()[f0], &comp, &ring)?;
        let leader_pts = match leader_fixed {
            FactorFixed::PositiveDimensional(w) => {
                return Ok(FixedLocus::PositiveDimensional(w))
            }
            FactorFixed::Finite(pts) => pts,
        };
        // propagate: x_{f_{k}} = R_{f_k}(x_{f_{k+1}}), walking backwards
        let mut options: Vec<Vec<(usize, SurfacePoint)>> = Vec::new();
        for p0 in leader_pts {
            let mut comp_pts = vec![(f0, p0.clone())];
            let mut cur = p0;
            for k in (1..cyc.len()).rev() {
                let fk = cyc[k];
                let src = cyc[(k + 1) % cyc.len()];
                let r = restrict_to_factor(a, x, fk, src).unwrap();
                cur = r.apply_point(&x.factors()[src], &x.factors()[fk], &cur, &ring)?;
                comp_pts.push((fk, cur.clone()));
            }
            options.push(comp_pts);
        }
        per_cycle.push(options);
    }
    // cartesian product over cycles
    let mut combos: Vec<Vec<(usize, SurfacePoint)>> = vec![vec![]];
    for options in per_cycle {
        let mut next = Vec::new();
        for c in &combos {
            for opt in &options {
                let mut cc = c.clone();
                cc.extend(opt.iter().cloned());
                next.push(cc);
            }
        }
        combos = next;
    }
    let mut points = Vec::new();
    for combo in combos {
        let mut by_factor: Vec<Option<SurfacePoint>> = vec![None; nf];
        for (f, p) in combo {
            by_factor[f] = Some(p);
        }
        points.push(
            by_factor
                .into_iter()
                .map(|p| p.expect("every factor covered"))
                .collect::<Vec<_>>(),
        );
    }
    Ok(FixedLocus::Finite(dedup_product_points(&ring, points)))
}

fn dedup_product_points(
    ring: &Ring,
    pts: Vec<Vec<SurfacePoint>>,
) -> Vec<Vec<SurfacePoint>> {
    let mut out: Vec<Vec<SurfacePoint>> = Vec::new();
    for p in pts {
        if !out.iter().any(|q| {
            q.len() == p.len() && q.iter().zip(&p).all(|(a, b)| a.same_point(b, ring))
        }) {
            out.push(p);
        }
    }
    out
}

/// Union of the fixed loci of every nontrivial element.
pub fn fixed_locus_group(g: &FiniteGroup, x: &ProductModel) -> Result<FixedLocus> {
    fixed_locus_group_in(g, x, x.ring())
}

pub fn fixed_locus_group_in(
    g: &FiniteGroup,
    x: &ProductModel,
    ring: &Ring,
) -> Result<FixedLocus> {
    let mut all: Vec<Vec<SurfacePoint>> = Vec::new();
    for (i, e) in g.elements.iter().enumerate() {
        if i == 0 {
            continue;
        }
        match fixed_points_product_in(e, x, ring)? {
            FixedLocus::PositiveDimensional(w) => {
                return Ok(FixedLocus::PositiveDimensional(format!(
                    "element {i}: {w}"
                )))
            }
            FixedLocus::Finite(pts) => all.extend(pts),
        }
    }
    Ok(FixedLocus::Finite(dedup_product_points(ring, all)))
}

/// Fixed locus of one element, per factor, when it preserves every
/// factor — used by the Lefschetz trace.
pub fn fixed_points_per_factor(
    a: &Automorphism,
    x: &ProductModel,
    ring: &Ring,
) -> Result<Vec<Option<FactorFixed>>> {
    let fmap = factor_map_indices(a, x)?;
    let mut out = Vec::new();
    for f in 0..x.factors().len() {
        if fmap[f] != f && fmap[f] != usize::MAX {
            out.push(None); // factor moved
            continue;
        }
        let r = restrict_to_factor(a, x, f, f)
            .ok_or_else(|| Error::InvalidAction("blocks do not align".into()))?;
        out.push(Some(fixed_points_surface_in(&x.factors()[f], &r, ring)?));
    }
    Ok(out)
}
