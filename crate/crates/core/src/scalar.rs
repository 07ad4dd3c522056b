//! Exact scalars: rationals, cyclotomic fields ℚ(ζ_n), and triangular
//! quotient rings adjoining algebraic or transcendental symbols.
//!
//! Every coordinate, coefficient and eigenvalue in the crate is a
//! [`Scalar`]: a normal-form sum of terms `q · ζ^e · g₁^{e₁} ···` with
//! rational `q`, the ζ-exponent below deg Φ_n, and each algebraic
//! generator exponent below its rewrite bound.  Transcendental
//! generators are Laurent: negative exponents are allowed.  Normal
//! forms are canonical, so zero-testing is a structural check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Largest cyclotomic order supported by the Φ_n table.
pub const MAX_CYCLOTOMIC_ORDER: u32 = 24;

// ---------------------------------------------------------------------------
// Cyclotomic polynomials
// ---------------------------------------------------------------------------

/// Coefficients of Φ_n, ascending degree, monic.  Built by exact
/// division of x^n − 1 by the Φ_d for proper divisors d of n.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    assert!(n >= 1 && n <= MAX_CYCLOTOMIC_ORDER);
    // x^n - 1
    let mut num = vec![BigInt::from(0); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::from(1);
    for d in 1..n {
        if n % d == 0 {
            num = divide_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact division of integer polynomials (ascending coefficients),
/// panicking on a nonzero remainder.  The divisor is monic here.
fn divide_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let qd = num.len() - 1 - dd;
    let mut quot = vec![BigInt::from(0); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact poly division");
    quot
}

// ---------------------------------------------------------------------------
// Rings
// ---------------------------------------------------------------------------

/// A raw (pre-normalization) term: ζ-basis exponent, generator
/// exponents over a prefix of the ring's generators, and a coefficient.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RawTerm {
    pub zeta: u32,
    pub gexp: Vec<i64>,
    pub coef: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum GenRule {
    /// `symbol^power → rhs`, rhs over strictly earlier generators.
    Algebraic { power: u32, rhs: Vec<RawTerm> },
    /// Free invertible symbol (Laurent exponents).
    Transcendental,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Generator {
    pub name: String,
    pub rule: GenRule,
}

#[derive(Debug, PartialEq)]
pub(crate) struct RingData {
    pub order: u32,
    pub phi_degree: usize,
    /// Expansion of ζ^e, e ∈ [0, order), in the power basis 1..ζ^{d−1}.
    pub zeta_pow: Vec<Vec<Rat>>,
    pub gens: Vec<Generator>,
}

/// A shared, immutable scalar ring: ℚ(ζ_n) with a triangular tower of
/// adjoined symbols.  Cheap to clone; compared structurally.
#[derive(Clone, Debug)]
pub struct Ring {
    data: Arc<RingData>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}
impl Eq for Ring {}

impl Ring {
    /// ℚ, as the order-1 cyclotomic field.
    pub fn rationals() -> Ring {
        Ring::cyclotomic(1).unwrap()
    }

    /// ℚ(ζ_n), reduced modulo Φ_n.
    pub fn cyclotomic(n: u32) -> Result<Ring> {
        if n == 0 || n > MAX_CYCLOTOMIC_ORDER {
            return Err(Error::IncompatibleField(format!(
                "cyclotomic order {n} outside the supported table (1..={MAX_CYCLOTOMIC_ORDER})"
            )));
        }
        let phi = cyclotomic_poly(n);
        let d = phi.len() - 1;
        let phi_rat: Vec<Rat> = phi.iter().map(|c| Rat::from_integer(c.clone())).collect();
        // ζ^e mod Φ_n for e in 0..n, by iterated multiplication by ζ.
        let mut zeta_pow: Vec<Vec<Rat>> = Vec::with_capacity(n as usize);
        let mut cur = vec![Rat::zero(); d];
        cur[0] = Rat::one();
        for _ in 0..n {
            zeta_pow.push(cur.clone());
            // multiply by x, reduce the overflow via x^d = -(phi minus lead)
            let top = cur[d - 1].clone();
            for i in (1..d).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = Rat::zero();
            if !top.is_zero() {
                for i in 0..d {
                    cur[i] -= &top * &phi_rat[i];
                }
            }
        }
        Ok(Ring {
            data: Arc::new(RingData {
                order: n,
                phi_degree: d,
                zeta_pow,
                gens: Vec::new(),
            }),
        })
    }

    /// Adjoin `name` with the monic rule `name^power → Σ rhs[i]·name^i`;
    /// the coefficients `rhs[i]` live in this ring (earlier symbols
    /// only) and `rhs.len() ≤ power`, so rewriting strictly lowers the
    /// degree in the new symbol and terminates.
    pub fn extend_algebraic(&self, name: &str, power: u32, rhs: &[Scalar]) -> Result<Ring> {
        if power < 2 {
            return Err(Error::IllFormedRule(format!(
                "exponent bound for {name} must be at least 2"
            )));
        }
        if self.generator(name).is_some() || name == "zeta" {
            return Err(Error::IllFormedRule(format!("symbol {name} already in use")));
        }
        if rhs.len() > power as usize {
            return Err(Error::IllFormedRule(format!(
                "rule for {name} does not lower the degree"
            )));
        }
        let slot = self.data.gens.len();
        let mut raw: Vec<RawTerm> = Vec::new();
        for (i, c) in rhs.iter().enumerate() {
            let c = c.promote(self)?;
            for (m, q) in &c.terms {
                let mut gexp = pad(&m.gexp, slot + 1);
                gexp[slot] += i as i64;
                raw.push(RawTerm {
                    zeta: m.zeta,
                    gexp,
                    coef: q.clone(),
                });
            }
        }
        let mut gens = self.data.gens.clone();
        gens.push(Generator {
            name: name.to_string(),
            rule: GenRule::Algebraic { power, rhs: raw },
        });
        Ok(self.with_gens(gens))
    }

    /// Adjoin a free invertible symbol.
    pub fn extend_transcendental(&self, name: &str) -> Result<Ring> {
        if self.generator(name).is_some() || name == "zeta" {
            return Err(Error::IllFormedRule(format!("symbol {name} already in use")));
        }
        let mut gens = self.data.gens.clone();
        gens.push(Generator {
            name: name.to_string(),
            rule: GenRule::Transcendental,
        });
        Ok(self.with_gens(gens))
    }

    fn with_gens(&self, gens: Vec<Generator>) -> Ring {
        Ring {
            data: Arc::new(RingData {
                order: self.data.order,
                phi_degree: self.data.phi_degree,
                zeta_pow: self.data.zeta_pow.clone(),
                gens,
            }),
        }
    }

    pub fn order(&self) -> u32 {
        self.data.order
    }

    pub fn gen_names(&self) -> Vec<&str> {
        self.data.gens.iter().map(|g| g.name.as_str()).collect()
    }

    /// Generator names with their rewrite exponent bound; `None` marks
    /// a transcendental symbol.
    pub fn gen_bounds(&self) -> Vec<(String, Option<u32>)> {
        self.data
            .gens
            .iter()
            .map(|g| {
                let bound = match &g.rule {
                    GenRule::Algebraic { power, .. } => Some(*power),
                    GenRule::Transcendental => None,
                };
                (g.name.clone(), bound)
            })
            .collect()
    }

    fn gen_index(&self, name: &str) -> Option<usize> {
        self.data.gens.iter().position(|g| g.name == name)
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.rat(rat_int(n))
    }

    pub fn rat(&self, q: Rat) -> Scalar {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Mono::unit(self.data.gens.len()), q);
        }
        Scalar {
            ring: self.clone(),
            terms,
        }
    }

    /// The primitive root ζ of the ring's full order.
    pub fn zeta(&self) -> Scalar {
        self.root_of_unity(self.data.order, 1).unwrap()
    }

    /// ζ_n^k as an element of this ring; requires n | order.
    pub fn root_of_unity(&self, n: u32, k: i64) -> Result<Scalar> {
        if n == 0 || self.data.order % n != 0 {
            return Err(Error::IncompatibleField(format!(
                "{n} does not divide the ring order {}",
                self.data.order
            )));
        }
        let step = (self.data.order / n) as i64;
        let raw = vec![(k * step, vec![0; self.data.gens.len()], Rat::one())];
        Ok(Scalar::from_raw(self.clone(), raw, ReduceOrder::First))
    }

    /// The adjoined symbol `name`, if present.
    pub fn generator(&self, name: &str) -> Option<Scalar> {
        let i = self.gen_index(name)?;
        let mut gexp = vec![0i64; self.data.gens.len()];
        gexp[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Mono { zeta: 0, gexp }, Rat::one());
        Some(Scalar {
            ring: self.clone(),
            terms,
        })
    }

    /// True iff `self` is an extension of `sub`: the cyclotomic order
    /// of `sub` divides ours and `sub`'s generator tower is a prefix of
    /// ours with identical rules (after re-embedding ζ).
    pub fn extends(&self, sub: &Ring) -> bool {
        if self == sub {
            return true;
        }
        if self.data.order % sub.data.order != 0 {
            return false;
        }
        if sub.data.gens.len() > self.data.gens.len() {
            return false;
        }
        for (i, g) in sub.data.gens.iter().enumerate() {
            let mine = &self.data.gens[i];
            if mine.name != g.name {
                return false;
            }
            match (&mine.rule, &g.rule) {
                (GenRule::Transcendental, GenRule::Transcendental) => {}
                (
                    GenRule::Algebraic { power: p1, rhs: r1 },
                    GenRule::Algebraic { power: p2, rhs: r2 },
                ) => {
                    if p1 != p2 {
                        return false;
                    }
                    let promoted = promote_raw(r2, sub, self);
                    let a = Scalar::from_raw(self.clone(), promoted, ReduceOrder::First);
                    let b = Scalar::from_raw(
                        self.clone(),
                        r1.iter()
                            .map(|t| {
                                (
                                    t.zeta as i64,
                                    pad(&t.gexp, self.data.gens.len()),
                                    t.coef.clone(),
                                )
                            })
                            .collect(),
                        ReduceOrder::First,
                    );
                    if a != b {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }
}

fn pad(gexp: &[i64], len: usize) -> Vec<i64> {
    let mut v = gexp.to_vec();
    v.resize(len, 0);
    v
}

/// Re-express raw terms of `from` in `to` (to must extend from): pad
/// generator exponents and rescale ζ-basis exponents to raw powers of
/// the larger root.
fn promote_raw(raw: &[RawTerm], from: &Ring, to: &Ring) -> Vec<(i64, Vec<i64>, Rat)> {
    let ratio = (to.data.order / from.data.order) as i64;
    raw.iter()
        .map(|t| {
            (
                t.zeta as i64 * ratio,
                pad(&t.gexp, to.data.gens.len()),
                t.coef.clone(),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// Monomial key: ζ-basis exponent plus one exponent per generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Mono {
    pub zeta: u32,
    pub gexp: Vec<i64>,
}

impl Mono {
    fn unit(ngens: usize) -> Mono {
        Mono {
            zeta: 0,
            gexp: vec![0; ngens],
        }
    }
}

/// Reduction strategy; both must agree (confluence), and tests check
/// that they do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceOrder {
    /// Rewrite the earliest out-of-bound generator first.
    First,
    /// Rewrite the latest out-of-bound generator first.
    Last,
}

/// An exact ring element in canonical normal form.  Zero iff the term
/// map is empty.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    ring: Ring,
    terms: BTreeMap<Mono, Rat>,
}

impl Scalar {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::unit(self.ring.data.gens.len()))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// The element as a plain rational, when it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if *m == Mono::unit(self.ring.data.gens.len()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Build from raw terms `(ζ-exponent, generator exponents, coef)`
    /// with arbitrary ζ exponents and out-of-bound generator powers,
    /// reducing to normal form.
    #[doc(hidden)]
    pub(crate) fn from_raw(ring: Ring, raw: Vec<(i64, Vec<i64>, Rat)>, order: ReduceOrder) -> Scalar {
        let mut acc: BTreeMap<Mono, Rat> = BTreeMap::new();
        let mut work: Vec<(i64, Vec<i64>, Rat)> = raw;
        while let Some((ze, gexp, coef)) = work.pop() {
            if coef.is_zero() {
                continue;
            }
            // ζ reduction: mod order, then power-basis expansion.
            let e = ze.rem_euclid(ring.data.order as i64) as usize;
            let expansion = &ring.data.zeta_pow[e];
            let single = e < ring.data.phi_degree && {
                // already a basis power: expansion is the unit vector
                expansion
                    .iter()
                    .enumerate()
                    .all(|(i, c)| (i == e) == c.is_one() && (i == e || c.is_zero()))
            };
            if !single {
                for (i, c) in expansion.iter().enumerate() {
                    if !c.is_zero() {
                        work.push((i as i64, gexp.clone(), &coef * c));
                    }
                }
                continue;
            }
            // generator reduction
            let viol = {
                let idxs = ring.data.gens.iter().enumerate().filter_map(|(j, g)| {
                    if let GenRule::Algebraic { power, .. } = &g.rule {
                        if gexp[j] >= *power as i64 || gexp[j] < 0 {
                            return Some(j);
                        }
                    }
                    None
                });
                match order {
                    ReduceOrder::First => idxs.min(),
                    ReduceOrder::Last => idxs.max(),
                }
            };
            if let Some(j) = viol {
                let (power, rhs) = match &ring.data.gens[j].rule {
                    GenRule::Algebraic { power, rhs } => (*power as i64, rhs.clone()),
                    _ => unreachable!(),
                };
                assert!(gexp[j] >= 0, "negative power of algebraic symbol");
                let mut base = gexp.clone();
                base[j] -= power;
                for t in rhs {
                    let mut g2 = base.clone();
                    for (k, e2) in t.gexp.iter().enumerate() {
                        g2[k] += e2;
                    }
                    work.push((e as i64 + t.zeta as i64, g2, &coef * &t.coef));
                }
                continue;
            }
            let key = Mono {
                zeta: e as u32,
                gexp,
            };
            let entry = acc.entry(key).or_insert_with(Rat::zero);
            *entry += coef;
            // defer zero-cleanup to the end
        }
        acc.retain(|_, c| !c.is_zero());
        Scalar { ring, terms: acc }
    }

    /// Re-express in an extension ring (identity when rings match).
    pub fn promote(&self, target: &Ring) -> Result<Scalar> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        if !target.extends(&self.ring) {
            return Err(Error::RingMismatch(format!(
                "cannot embed a {} element into {}",
                self.ring.describe(),
                target.describe()
            )));
        }
        let ratio = (target.data.order / self.ring.data.order) as i64;
        let raw = self
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    m.zeta as i64 * ratio,
                    pad(&m.gexp, target.data.gens.len()),
                    c.clone(),
                )
            })
            .collect();
        Ok(Scalar::from_raw(target.clone(), raw, ReduceOrder::First))
    }

    fn unified(&self, other: &Scalar) -> (Scalar, Scalar) {
        if self.ring == other.ring {
            return (self.clone(), other.clone());
        }
        if self.ring.extends(&other.ring) {
            (self.clone(), other.promote(&self.ring).unwrap())
        } else if other.ring.extends(&self.ring) {
            (self.promote(&other.ring).unwrap(), other.clone())
        } else {
            panic!(
                "scalar rings are incompatible: {} vs {}",
                self.ring.describe(),
                other.ring.describe()
            );
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let (mut a, b) = self.unified(other);
        for (m, c) in b.terms {
            let entry = a.terms.entry(m).or_insert_with(Rat::zero);
            *entry += c;
        }
        a.terms.retain(|_, c| !c.is_zero());
        a
    }

    pub fn neg(&self) -> Scalar {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let (a, b) = self.unified(other);
        let mut raw = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                let mut gexp = m1.gexp.clone();
                for (k, e) in m2.gexp.iter().enumerate() {
                    gexp[k] += e;
                }
                raw.push((m1.zeta as i64 + m2.zeta as i64, gexp, c1 * c2));
            }
        }
        Scalar::from_raw(a.ring, raw, ReduceOrder::First)
    }

    pub fn scale(&self, q: &Rat) -> Scalar {
        if q.is_zero() {
            return self.ring.zero();
        }
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c *= q;
        }
        s
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Exact inverse.  Handles (a) unit monomials, including negative
    /// transcendental powers and algebraic symbols via `g⁻¹ =
    /// g^{k−1}·rhs⁻¹`, (b) arbitrary elements of the finite-dimensional
    /// field part by a linear solve, and (c) products of a field-part
    /// element with a transcendental unit monomial.  Anything else is
    /// not invertible in the ring.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Factor out the common transcendental monomial.
        let ngens = self.ring.data.gens.len();
        let mut tmin = vec![i64::MAX; ngens];
        for m in self.terms.keys() {
            for (j, e) in m.gexp.iter().enumerate() {
                if matches!(self.ring.data.gens[j].rule, GenRule::Transcendental) {
                    tmin[j] = tmin[j].min(*e);
                } else {
                    tmin[j] = 0;
                }
            }
        }
        let has_factor = tmin.iter().any(|&e| e != 0);
        if has_factor {
            let mut fact_exp = vec![0i64; ngens];
            let mut rest_raw = Vec::new();
            for (m, c) in &self.terms {
                let mut g = m.gexp.clone();
                for j in 0..ngens {
                    g[j] -= tmin[j];
                }
                rest_raw.push((m.zeta as i64, g, c.clone()));
            }
            for j in 0..ngens {
                fact_exp[j] = tmin[j];
            }
            let rest = Scalar::from_raw(self.ring.clone(), rest_raw, ReduceOrder::First);
            let inv_rest = rest.inv()?;
            let inv_fact = Scalar::from_raw(
                self.ring.clone(),
                vec![(0, fact_exp.iter().map(|e| -e).collect(), Rat::one())],
                ReduceOrder::First,
            );
            return Ok(inv_rest.mul(&inv_fact));
        }
        // Single monomial: invert factor by factor.
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let mut out = self.ring.rat(c.recip());
            if m.zeta != 0 {
                let z = self
                    .ring
                    .root_of_unity(self.ring.data.order, -(m.zeta as i64))?;
                out = out.mul(&z);
            }
            for (j, &e) in m.gexp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &self.ring.data.gens[j].rule.clone() {
                    GenRule::Transcendental => {
                        let t = Scalar::from_raw(
                            self.ring.clone(),
                            vec![(0, {
                                let mut g = vec![0; ngens];
                                g[j] = -e;
                                g
                            }, Rat::one())],
                            ReduceOrder::First,
                        );
                        out = out.mul(&t);
                    }
                    GenRule::Algebraic { power, rhs } => {
                        // g·g^{k−1} = rhs  ⇒  g⁻¹ = g^{k−1}·rhs⁻¹
                        let rhs_s = Scalar::from_raw(
                            self.ring.clone(),
                            rhs.iter()
                                .map(|t| (t.zeta as i64, pad(&t.gexp, ngens), t.coef.clone()))
                                .collect(),
                            ReduceOrder::First,
                        );
                        let gk = Scalar::from_raw(
                            self.ring.clone(),
                            vec![(0, {
                                let mut g = vec![0; ngens];
                                g[j] = *power as i64 - 1;
                                g
                            }, Rat::one())],
                            ReduceOrder::First,
                        );
                        let ginv = gk.mul(&rhs_s.inv()?);
                        out = out.mul(&ginv.pow(e)?);
                    }
                }
            }
            return Ok(out);
        }
        // Field part: linear solve in the monomial basis.
        self.inv_field_part()
    }

    fn inv_field_part(&self) -> Result<Scalar> {
        let ring = &self.ring;
        let ngens = ring.data.gens.len();
        // basis = ζ^i · Π g_j^{e_j} over algebraic generators only
        let mut bounds: Vec<i64> = Vec::new();
        for g in &ring.data.gens {
            match &g.rule {
                GenRule::Algebraic { power, .. } => bounds.push(*power as i64),
                GenRule::Transcendental => bounds.push(1), // exponent must be 0
            }
        }
        for m in self.terms.keys() {
            for (j, &e) in m.gexp.iter().enumerate() {
                if matches!(ring.data.gens[j].rule, GenRule::Transcendental) && e != 0 {
                    return Err(Error::NotInvertible(
                        "transcendental symbols appear non-trivially".into(),
                    ));
                }
            }
        }
        let mut basis: Vec<Mono> = Vec::new();
        let mut idx = vec![0i64; ngens];
        loop {
            for z in 0..ring.data.phi_degree as u32 {
                basis.push(Mono {
                    zeta: z,
                    gexp: idx.clone(),
                });
            }
            // odometer over generator exponents
            let mut j = 0;
            loop {
                if j == ngens {
                    break;
                }
                idx[j] += 1;
                if idx[j] < bounds[j] {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == ngens {
                break;
            }
        }
        let dim = basis.len();
        let pos: BTreeMap<Mono, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        // columns of multiplication-by-self
        let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); dim + 1]; dim];
        for (col, bm) in basis.iter().enumerate() {
            let b = Scalar {
                ring: ring.clone(),
                terms: {
                    let mut t = BTreeMap::new();
                    t.insert(bm.clone(), Rat::one());
                    t
                },
            };
            let prod = self.mul(&b);
            for (m, c) in &prod.terms {
                let row = *pos.get(m).ok_or_else(|| {
                    Error::NotInvertible("product leaves the field part".into())
                })?;
                mat[row][col] = c.clone();
            }
        }
        // augment with e_unit = representation of 1
        let unit_row = *pos.get(&Mono::unit(ngens)).unwrap();
        mat[unit_row][dim] = Rat::one();
        // Gaussian elimination over ℚ
        let mut r = 0usize;
        let mut pivots = Vec::new();
        for c in 0..dim {
            if let Some(p) = (r..dim).find(|&i| !mat[i][c].is_zero()) {
                mat.swap(r, p);
                let inv = mat[r][c].recip();
                for v in mat[r].iter_mut() {
                    *v *= &inv;
                }
                for i in 0..dim {
                    if i != r && !mat[i][c].is_zero() {
                        let f = mat[i][c].clone();
                        for j in 0..=dim {
                            let sub = &f * &mat[r][j];
                            mat[i][j] -= sub;
                        }
                    }
                }
                pivots.push(c);
                r += 1;
            }
        }
        // read off the solution; inconsistent system ⇒ zero divisor
        let mut x = vec![Rat::zero(); dim];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = mat[row][dim].clone();
        }
        for i in r..dim {
            if !mat[i][dim].is_zero() {
                return Err(Error::NotInvertible("zero divisor in the quotient ring".into()));
            }
        }
        let sol_raw: Vec<(i64, Vec<i64>, Rat)> = basis
            .iter()
            .zip(&x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.zeta as i64, m.gexp.clone(), c.clone()))
            .collect();
        let sol = Scalar::from_raw(ring.clone(), sol_raw, ReduceOrder::First);
        if !sol.mul(self).is_one() {
            return Err(Error::NotInvertible("no inverse in the quotient ring".into()));
        }
        Ok(sol)
    }

    /// Numeric embedding into ℂ for cross-checks: ζ ↦ e^{2πi/order},
    /// each generator to the supplied value.
    pub fn embed(&self, assign: &dyn Fn(&str) -> Cx) -> Cx {
        let mut acc = Cx::zero();
        for (m, c) in &self.terms {
            let mut v = Cx::real(rat_f64(c));
            if m.zeta != 0 {
                v = v * Cx::unit_root(self.ring.data.order, m.zeta as i64);
            }
            for (j, &e) in m.gexp.iter().enumerate() {
                if e != 0 {
                    v = v * assign(&self.ring.data.gens[j].name).powi(e);
                }
            }
            acc = acc + v;
        }
        acc
    }

    /// Terms as `(ζ exponent, generator exponents, coefficient)`.
    pub fn term_views(&self) -> Vec<(u32, Vec<i64>, Rat)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.zeta, m.gexp.clone(), c.clone()))
            .collect()
    }
}

pub fn rat_f64(q: &Rat) -> f64 {
    let n = q.numer();
    let d = q.denom();
    // good enough for 1e-9 cross-checks on small values
    str_f64(n) / str_f64(d)
}

fn str_f64(n: &BigInt) -> f64 {
    n.to_string().parse::<f64>().unwrap()
}

// ---------------------------------------------------------------------------
// A minimal complex type for the numeric embedding
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub fn zero() -> Cx {
        Cx { re: 0.0, im: 0.0 }
    }
    pub fn real(x: f64) -> Cx {
        Cx { re: x, im: 0.0 }
    }
    pub fn new(re: f64, im: f64) -> Cx {
        Cx { re, im }
    }
    pub fn unit_root(order: u32, k: i64) -> Cx {
        let t = 2.0 * std::f64::consts::PI * (k as f64) / (order as f64);
        Cx {
            re: t.cos(),
            im: t.sin(),
        }
    }
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
    pub fn powi(self, e: i64) -> Cx {
        let mut acc = Cx::real(1.0);
        let b = if e < 0 { self.inv() } else { self };
        for _ in 0..e.unsigned_abs() {
            acc = acc * b;
        }
        acc
    }
    pub fn inv(self) -> Cx {
        let n = self.re * self.re + self.im * self.im;
        Cx {
            re: self.re / n,
            im: -self.im / n,
        }
    }
}

impl std::ops::Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        Cx {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}
impl std::ops::Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        Cx {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}
impl std::ops::Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

impl Ring {
    pub fn describe(&self) -> String {
        let mut s = if self.data.order == 1 {
            "Q".to_string()
        } else {
            format!("Q(zeta_{})", self.data.order)
        };
        for g in &self.data.gens {
            match &g.rule {
                GenRule::Transcendental => s.push_str(&format!("[{}]", g.name)),
                GenRule::Algebraic { power, .. } => {
                    s.push_str(&format!("[{}; {}^{} -> ...]", g.name, g.name, power))
                }
            }
        }
        s
    }

    /// Parse the textual scalar format: terms `q * zeta^e * sym^e * ...`
    /// joined by `+`, with `q` a signed `num` or `num/den`.
    pub fn parse(&self, input: &str) -> Result<Scalar> {
        let mut raw: Vec<(i64, Vec<i64>, Rat)> = Vec::new();
        let input = input.trim();
        if input.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if input == "0" {
            return Ok(self.zero());
        }
        for term in split_terms(input) {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {input:?}")));
            }
            let mut coef = Rat::one();
            let mut ze: i64 = 0;
            let mut gexp = vec![0i64; self.data.gens.len()];
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
                if base == "zeta" {
                    ze += exp;
                } else if let Some(i) = self.gen_index(base) {
                    if matches!(self.data.gens[i].rule, GenRule::Algebraic { .. }) && exp < 0 {
                        return Err(Error::Parse(format!(
                            "negative power of algebraic symbol {base}"
                        )));
                    }
                    gexp[i] += exp;
                } else if base
                    .chars()
                    .next()
                    .map(|c| c.is_ascii_digit() || c == '-')
                    .unwrap_or(false)
                {
                    let q = parse_rat(base)?;
                    coef *= q.pow(exp as i32);
                } else {
                    return Err(Error::Parse(format!("unknown symbol {base:?}")));
                }
            }
            raw.push((ze, gexp, coef));
        }
        Ok(Scalar::from_raw(self.clone(), raw, ReduceOrder::First))
    }
}

fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rat::new(parse_int(n)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Split on top-level `+`, keeping a leading `-` attached to the first
/// factor of each term (the printer only emits `+`-joined terms).
fn split_terms(s: &str) -> Vec<String> {
    s.split('+').map(|t| t.to_string()).collect()
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = vec![format_rat(c)];
            if m.zeta != 0 {
                factors.push(if m.zeta == 1 {
                    "zeta".to_string()
                } else {
                    format!("zeta^{}", m.zeta)
                });
            }
            for (j, &e) in m.gexp.iter().enumerate() {
                if e != 0 {
                    let name = &self.ring.data.gens[j].name;
                    factors.push(if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    });
                }
            }
            parts.push(factors.join(" * "));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

// ---------------------------------------------------------------------------

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}
impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}
impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}
impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

// ---------------------------------------------------------------------------
// Test hooks
// ---------------------------------------------------------------------------

/// Normalize raw term data under a chosen reduction order; used by the
/// confluence property tests.
#[doc(hidden)]
pub fn normalize_raw(ring: &Ring, raw: Vec<(i64, Vec<i64>, Rat)>, order: ReduceOrder) -> Scalar {
    Scalar::from_raw(ring.clone(), raw, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bigint_vec(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        assert_eq!(cyclotomic_poly(1), bigint_vec(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), bigint_vec(&[1, 1]));
        assert_eq!(cyclotomic_poly(3), bigint_vec(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), bigint_vec(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(5), bigint_vec(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(7), bigint_vec(&[1, 1, 1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(8), bigint_vec(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(9), bigint_vec(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(12), bigint_vec(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_poly(24), bigint_vec(&[1, 0, 0, 0, -1, 0, 0, 0, 1]));
    }

    #[test]
    fn primitive_cube_roots_sum_to_minus_one() {
        // in Q(zeta_3) directly
        let r3 = Ring::cyclotomic(3).unwrap();
        let w = r3.root_of_unity(3, 1).unwrap();
        let w2 = r3.root_of_unity(3, 2).unwrap();
        assert_eq!(w.add(&w2), r3.int(-1));
        assert!(w.pow(3).unwrap().is_one());
        // and through Q(zeta_12)
        let r12 = Ring::cyclotomic(12).unwrap();
        let a = r12.root_of_unity(3, 1).unwrap();
        let b = r12.root_of_unity(3, 2).unwrap();
        assert_eq!(a.add(&b), r12.int(-1));
        // numeric cross-check
        let e = a.add(&b).sub(&r12.int(-1));
        assert!(e.embed(&|_| Cx::zero()).abs() < 1e-12);
    }

    #[test]
    fn one_plus_omega_plus_omega_squared_is_zero() {
        let r = Ring::cyclotomic(3).unwrap();
        let w = r.zeta();
        let s = r.one().add(&w).add(&w.mul(&w));
        assert!(s.is_zero());
    }

    #[test]
    fn quadratic_rule_reduces_square() {
        // a^2 -> -(1+i)/2 over Q(zeta_4)
        let r4 = Ring::cyclotomic(4).unwrap();
        let i = r4.zeta();
        let rhs = r4.one().add(&i).scale(&rat(-1, 2));
        let ring = r4.extend_algebraic("a", 2, &[rhs.clone()]).unwrap();
        let a = ring.generator("a").unwrap();
        let sq = a.mul(&a);
        assert_eq!(sq, rhs.promote(&ring).unwrap());
        // 2a^2 + 1 + i = 0
        let expr = sq.scale(&rat_int(2)).add(&ring.one()).add(&ring.zeta());
        assert!(expr.is_zero());
    }

    #[test]
    fn golden_ring_relation() {
        // rho^2 -> 1 - rho: the rule mentions the new symbol in degree 1
        let q = Ring::rationals();
        let ring = q.extend_algebraic("rho", 2, &[q.one(), q.int(-1)]).unwrap();
        let rho = ring.generator("rho").unwrap();
        let expr = rho.mul(&rho).add(&rho).sub(&ring.one());
        assert!(expr.is_zero());
        let rho_inv = rho.inv().unwrap();
        assert!(rho.mul(&rho_inv).is_one());
        // 1/rho = 1 + rho since rho(1+rho) = rho + rho^2 = 1
        assert_eq!(rho_inv, ring.one().add(&rho));
    }

    #[test]
    fn transcendental_unit_inverse() {
        let ring = Ring::cyclotomic(3)
            .unwrap()
            .extend_transcendental("b")
            .unwrap()
            .extend_transcendental("c")
            .unwrap();
        let b = ring.generator("b").unwrap();
        let c = ring.generator("c").unwrap();
        let m = b.mul(&c).scale(&rat(3, 7));
        let inv = m.inv().unwrap();
        assert!(m.mul(&inv).is_one());
        // cube root of bc on top
        let ring2 = ring.extend_algebraic("d", 3, &[b.mul(&c)]).unwrap();
        let d = ring2.generator("d").unwrap();
        let dinv = d.inv().unwrap();
        assert!(d.mul(&dinv).is_one());
        // a sum with transcendentals is not invertible
        let s = ring2.one().add(&ring2.generator("b").unwrap());
        assert!(s.inv().is_err());
    }

    #[test]
    fn field_inverse_via_linear_solve() {
        let r12 = Ring::cyclotomic(12).unwrap();
        let x = r12.one().add(&r12.zeta()).add(&r12.zeta().pow(5).unwrap());
        let xi = x.inv().unwrap();
        assert!(x.mul(&xi).is_one());
        assert!(r12.zero().inv().is_err());
    }

    #[test]
    fn distinct_roots_are_distinct() {
        // a, b roots of 2z^2+1+i and 2z^2+1-i; a != b
        let r4 = Ring::cyclotomic(4).unwrap();
        let i = r4.zeta();
        let ra = r4.one().add(&i).scale(&rat(-1, 2));
        let rb = r4.one().sub(&i).scale(&rat(-1, 2));
        let ring = r4
            .extend_algebraic("a", 2, &[ra])
            .unwrap()
            .extend_algebraic("b", 2, &[rb])
            .unwrap();
        let a = ring.generator("a").unwrap();
        let b = ring.generator("b").unwrap();
        assert!(!a.sub(&b).is_zero());
        // numeric embedding: pick matching numeric roots
        let av = Cx::new(0.3217971264527914, -0.7768869870150186); // sqrt(-(1+i)/2)
        let bv = Cx::new(0.3217971264527914, 0.7768869870150186);
        let rel_a = a.mul(&a).mul(&ring.int(2)).add(&ring.one()).add(&ring.root_of_unity(4, 1).unwrap());
        let assign = |n: &str| if n == "a" { av } else { bv };
        assert!(rel_a.embed(&assign).abs() < 1e-9);
    }

    #[test]
    fn parser_round_trips() {
        let ring = Ring::cyclotomic(8)
            .unwrap()
            .extend_transcendental("b")
            .unwrap();
        for src in [
            "1",
            "-2/3",
            "1/2 * zeta^3 + -1 * b^-2",
            "3 * zeta * b + 7",
        ] {
            let s = ring.parse(src).unwrap();
            let printed = s.to_string();
            let again = ring.parse(&printed).unwrap();
            assert_eq!(s, again, "round trip failed for {src}");
        }
        assert!(ring.parse("nope * 2").is_err());
    }

    #[test]
    fn promotion_is_a_ring_map() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let r12 = Ring::cyclotomic(12).unwrap();
        let w = r3.zeta();
        let w12 = w.promote(&r12).unwrap();
        assert_eq!(w12, r12.root_of_unity(3, 1).unwrap());
        assert!(w12.pow(3).unwrap().is_one());
        assert!(!w12.is_one());
        let s = w.add(&w.mul(&w));
        assert_eq!(s.promote(&r12).unwrap(), r12.int(-1));
    }

    #[test]
    fn mixed_order_arithmetic_unifies() {
        let r3 = Ring::cyclotomic(3).unwrap();
        let r12 = Ring::cyclotomic(12).unwrap();
        let sum = r3.zeta().add(&r12.root_of_unity(3, 2).unwrap());
        assert_eq!(sum, r12.int(-1));
    }
}
