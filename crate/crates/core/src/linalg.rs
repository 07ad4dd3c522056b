//! Exact dense linear algebra over a [`Ring`]: elimination, kernels,
//! characteristic polynomials, and division-free adjugates.
//!
//! Elimination needs invertible pivots and therefore works over the
//! field part of a ring; the adjugate and the characteristic
//! polynomial are division-free (Laplace / Faddeev-LeVerrier) and work
//! over any ring, which is what the fixed-point machinery relies on
//! when entries involve transcendental symbols.

use crate::error::{Error, Result};
use crate::scalar::{rat, Ring, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for v in row {
                data.push(v.promote(ring).expect("matrix entry outside the ring"));
            }
        }
        Matrix {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Matrix {
        let mut m = Matrix::zeros(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Integer matrix over ℚ, handy for the H² cross-check data.
    pub fn from_int_rows(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&v| ring.int(v)).collect())
                .collect(),
        )
    }

    /// The same matrix over an extension ring.
    pub fn promote(&self, ring: &Ring) -> Result<Matrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for v in &self.data {
            data.push(v.promote(ring)?);
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v.promote(&self.ring).expect("entry outside the ring");
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| {
            self.at(i, j).add(o.at(i, j))
        })
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| {
            self.at(i, j).sub(o.at(i, j))
        })
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).mul(s))
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        Matrix::from_fn(&self.ring, self.rows, o.cols, |i, j| {
            let mut acc = self.ring.zero();
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(o.at(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut acc = self.ring.zero();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Whether the matrix is a scalar multiple of the identity.
    pub fn is_scalar_multiple_of_identity(&self) -> bool {
        if self.rows != self.cols || self.rows == 0 {
            return false;
        }
        let d = self.at(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { d.clone() } else { self.ring.zero() };
                if !self.at(i, j).sub(&want).is_zero() {
                    return false;
                }
            }
        }
        !d.is_zero()
    }

    /// Reduced row echelon form.  Every pivot must be invertible in the
    /// ring; over the field part this always holds for nonzero pivots.
    pub fn rref(&self) -> Result<(Matrix, Vec<usize>)> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // prefer a pivot whose inverse exists
            let mut chosen = None;
            for i in r..m.rows {
                if m.at(i, c).is_zero() {
                    continue;
                }
                if let Ok(inv) = m.at(i, c).inv() {
                    chosen = Some((i, inv));
                    break;
                }
            }
            let (pi, pinv) = match chosen {
                Some(x) => x,
                None => {
                    if (r..m.rows).all(|i| m.at(i, c).is_zero()) {
                        continue;
                    }
                    return Err(Error::NotInvertible(format!(
                        "no invertible pivot in column {c}"
                    )));
                }
            };
            for j in 0..m.cols {
                let a = m.at(pi, j).clone();
                let b = m.at(r, j).clone();
                m.set(pi, j, b);
                m.set(r, j, a.mul(&pinv));
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, c).is_zero() {
                    let f = m.at(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.at(i, j).sub(&f.mul(m.at(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((m, pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<Scalar>>> {
        let (m, pivots) = self.rref()?;
        let mut basis = Vec::new();
        let piv_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = Some(i);
            }
            v
        };
        for free in 0..self.cols {
            if piv_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![self.ring.zero(); self.cols];
            vec[free] = self.ring.one();
            for (i, &c) in pivots.iter().enumerate() {
                vec[c] = m.at(i, free).neg();
            }
            basis.push(vec);
        }
        Ok(basis)
    }

    /// Solve `self · x = rhs`; `None` when inconsistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        assert_eq!(self.rows, rhs.len());
        let mut aug = Matrix::zeros(&self.ring, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, rhs[i].clone());
        }
        let (m, pivots) = aug.rref()?;
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.ring.zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = m.at(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Inverse via elimination; requires invertible pivots.
    pub fn inverse(&self) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.ring, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, self.ring.one());
        }
        let (m, pivots) = aug.rref()?;
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        Ok(Matrix::from_fn(&self.ring, n, n, |i, j| m.at(i, n + j).clone()))
    }

    /// Determinant by cofactor expansion: division-free, fine for the
    /// small ambient dimensions used here.
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return self.ring.one();
        }
        if n == 1 {
            return self.at(0, 0).clone();
        }
        let mut acc = self.ring.zero();
        for j in 0..n {
            if self.at(0, j).is_zero() {
                continue;
            }
            let minor = self.minor(0, j);
            let mut term = self.at(0, j).mul(&minor.det());
            if j % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term);
        }
        acc
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Matrix {
        let n = self.rows;
        Matrix::from_fn(&self.ring, n - 1, n - 1, |i, j| {
            let r = if i < skip_r { i } else { i + 1 };
            let c = if j < skip_c { j } else { j + 1 };
            self.at(r, c).clone()
        })
    }

    /// Adjugate matrix: `adj(M)·M = det(M)·I`, division-free.
    pub fn adjugate(&self) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        Matrix::from_fn(&self.ring, n, n, |i, j| {
            // cofactor C_{ji}
            let mut v = self.minor(j, i).det();
            if (i + j) % 2 == 1 {
                v = v.neg();
            }
            v
        })
    }

    /// Characteristic polynomial coefficients `c_0 .. c_n` (ascending,
    /// `c_n = 1`), via Faddeev-LeVerrier: only divisions by integers.
    pub fn charpoly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![self.ring.zero(); n + 1];
        coeffs[n] = self.ring.one();
        let mut mk = Matrix::identity(&self.ring, n);
        for k in 1..=n {
            mk = self.mul(&mk);
            let ck = mk.trace().scale(&rat(-1, k as i64));
            coeffs[n - k] = ck.clone();
            for i in 0..n {
                let v = mk.at(i, i).add(&ck);
                mk.set(i, i, v);
            }
        }
        coeffs
    }
}

/// Evaluate an ascending coefficient list at a scalar.
pub fn poly_eval(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let ring = x.ring().clone();
    let mut acc = ring.zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&c.promote(&ring).expect("coefficient outside the ring"));
    }
    acc
}

/// Span dimension of a set of coordinate vectors (rows).
pub fn span_rank(ring: &Ring, vecs: &[Vec<Scalar>]) -> Result<usize> {
    if vecs.is_empty() {
        return Ok(0);
    }
    Matrix::from_rows(ring, vecs.to_vec()).rank()
}

/// Row-reduce a spanning set to an echelonized basis.
pub fn echelon_basis(ring: &Ring, vecs: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    if vecs.is_empty() {
        return Ok(Vec::new());
    }
    let (m, pivots) = Matrix::from_rows(ring, vecs.to_vec()).rref()?;
    Ok((0..pivots.len()).map(|i| m.row(i)).collect())
}

/// Whether `v` lies in the span of `basis` (over the field part).
pub fn in_span(ring: &Ring, basis: &[Vec<Scalar>], v: &[Scalar]) -> Result<bool> {
    let r0 = span_rank(ring, basis)?;
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    Ok(span_rank(ring, &all)? == r0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    #[test]
    fn rref_and_kernel() {
        let q = Ring::rationals();
        let m = Matrix::from_int_rows(&Ring::rationals(), &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank().unwrap(), 2);
        let k = m.kernel_basis().unwrap();
        assert_eq!(k.len(), 1);
        for i in 0..3 {
            let mut acc = q.zero();
            for j in 0..3 {
                acc = acc.add(&m.at(i, j).mul(&k[0][j]));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn charpoly_of_companion() {
        // [[0, -1], [1, 0]] has x^2 + 1
        let m = Matrix::from_int_rows(&Ring::rationals(), &[&[0, -1], &[1, 0]]);
        let cp = m.charpoly();
        let q = Ring::rationals();
        assert_eq!(cp, vec![q.one(), q.zero(), q.one()]);
    }

    #[test]
    fn adjugate_identity_law() {
        let m = Matrix::from_int_rows(&Ring::rationals(), &[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let adj = m.adjugate();
        let d = m.det();
        let prod = adj.mul(&m);
        let q = Ring::rationals();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { q.zero() };
                assert!(prod.at(i, j).sub(&want).is_zero());
            }
        }
    }

    #[test]
    fn solve_small_system() {
        let m = Matrix::from_int_rows(&Ring::rationals(), &[&[1, 1], &[1, -1]]);
        let q = Ring::rationals();
        let x = m.solve(&[q.int(3), q.int(1)]).unwrap().unwrap();
        assert_eq!(x[0], q.int(2));
        assert_eq!(x[1], q.one());
        let sing = Matrix::from_int_rows(&Ring::rationals(), &[&[1, 1], &[1, 1]]);
        assert!(sing.solve(&[q.int(0), q.int(1)]).unwrap().is_none());
    }

    #[test]
    fn charpoly_eval_on_eigenvalue() {
        let r3 = Ring::cyclotomic(3).unwrap();
        // permutation matrix of a 3-cycle: eigenvalues are cube roots
        let mut m = Matrix::zeros(&r3, 3, 3);
        m.set(0, 2, r3.one());
        m.set(1, 0, r3.one());
        m.set(2, 1, r3.one());
        let cp = m.charpoly();
        for k in 0..3 {
            let w = r3.root_of_unity(3, k).unwrap();
            assert!(poly_eval(&cp, &w).is_zero());
        }
        assert!(!poly_eval(&cp, &r3.int(2)).is_zero());
        let _ = rat_int(0);
    }
}
