//! Dense linear algebra over the field of [`Scalar`]s.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Univariate polynomial with `Scalar` coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn one() -> UniPoly {
        UniPoly { coeffs: vec![Scalar::one()] }
    }

    /// `Π (X - r)`.
    pub fn from_roots(roots: &[Scalar]) -> UniPoly {
        let mut out = UniPoly::one();
        for r in roots {
            out = out.mul(&UniPoly::new(vec![-r, Scalar::one()]));
        }
        out
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UniPoly::new(vec![]);
        }
        let mut c = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in o.coeffs.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        UniPoly::new(c)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*X"),
                _ => format!("({c})*X^{k}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// A square or rectangular matrix of `Scalar`s, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(n: usize, m: usize) -> Matrix {
        Matrix { rows: vec![vec![Scalar::zero(); m]; n] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out.rows[i][i] = Scalar::one();
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let (n, k, m) = (self.nrows(), self.ncols(), o.ncols());
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            for l in 0..k {
                let a = &self.rows[i][l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    if !o.rows[l][j].is_zero() {
                        out.rows[i][j] += a * &o.rows[l][j];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix { rows: self.rows.iter().zip(&o.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix { rows: self.rows.iter().zip(&o.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.nrows()).map(|i| self.rows[i][i].clone()).sum()
    }

    /// Characteristic polynomial `det(X - M)` by Faddeev–LeVerrier.
    pub fn charpoly(&self) -> UniPoly {
        let n = self.nrows();
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&mk);
            for i in 0..n {
                next.rows[i][i] += &coeffs[n - k + 1];
            }
            mk = next;
            let c = self.mul(&mk).trace().scale(&Rational::new((-1).into(), (k as i64).into()));
            coeffs[n - k] = c;
        }
        UniPoly::new(coeffs)
    }

    /// Row echelon form by fraction-free (Bareiss) elimination. Returns the
    /// reduced matrix and the pivot columns.
    fn bareiss(&self) -> (Matrix, Vec<usize>) {
        let mut a = self.clone();
        let (n, m) = (a.nrows(), a.ncols());
        let mut pivots = Vec::new();
        let mut prev = Scalar::one();
        let mut r = 0;
        for c in 0..m {
            if r == n {
                break;
            }
            let Some(pr) = (r..n).find(|&i| !a.rows[i][c].is_zero()) else { continue };
            a.rows.swap(r, pr);
            for i in r + 1..n {
                for j in c + 1..m {
                    let v = &(&a.rows[r][c] * &a.rows[i][j]) - &(&a.rows[i][c] * &a.rows[r][j]);
                    a.rows[i][j] = v.checked_div(&prev).expect("Bareiss pivot is nonzero");
                }
                a.rows[i][c] = Scalar::zero();
            }
            prev = a.rows[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (e, pivots) = self.bareiss();
        let m = self.ncols();
        let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
        let mut out = Vec::new();
        for &f in &free {
            let mut x = vec![Scalar::zero(); m];
            x[f] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let s: Scalar = (pc + 1..m).filter(|&j| !e.rows[r][j].is_zero()).map(|j| &e.rows[r][j] * &x[j]).sum();
                x[pc] = (-s).checked_div(&e.rows[r][pc]).expect("pivot");
            }
            out.push(x);
        }
        out
    }

    /// Solve `M x = b` for square invertible `M`.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        let n = self.nrows();
        let mut aug = self.clone();
        for (row, v) in aug.rows.iter_mut().zip(b) {
            row.push(-v);
        }
        let (e, pivots) = aug.bareiss();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Degenerate("singular system".into()));
        }
        let mut x = vec![Scalar::zero(); n];
        for r in (0..n).rev() {
            let s: Scalar = (r + 1..n).map(|j| &e.rows[r][j] * &x[j]).sum::<Scalar>() + e.rows[r][n].clone();
            x[r] = (-s).checked_div(&e.rows[r][r])?;
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.nrows();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[j] = Scalar::one();
            cols.push(self.solve(&e)?);
        }
        let mut out = Matrix::zeros(n, n);
        for (j, c) in cols.into_iter().enumerate() {
            for (i, x) in c.into_iter().enumerate() {
                out.rows[i][j] = x;
            }
        }
        Ok(out)
    }

    /// Basis vector of the one-dimensional `λ`-eigenspace.
    pub fn eigenvector(&self, lambda: &Scalar) -> Result<Vec<Scalar>> {
        let n = self.nrows();
        let shifted = self.sub(&Matrix::identity(n).scale(lambda));
        let k = shifted.kernel();
        match k.len() {
            1 => Ok(k.into_iter().next().unwrap()),
            0 => Err(Error::Degenerate(format!("{lambda} is not an eigenvalue"))),
            d => Err(Error::Degenerate(format!("eigenspace of {lambda} has dimension {d}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Var;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix { rows: rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect() }
    }

    #[test]
    fn charpoly_of_companion() {
        let a = Scalar::var(Var::A);
        let b = Scalar::var(Var::B);
        let mut mat = Matrix::zeros(2, 2);
        mat.rows[0][0] = a.clone();
        mat.rows[0][1] = Scalar::one();
        mat.rows[1][1] = b.clone();
        assert_eq!(mat.charpoly(), UniPoly::from_roots(&[a.clone(), b.clone()]));
        let v = mat.eigenvector(&b).unwrap();
        assert_eq!(mat.apply(&v), v.iter().map(|x| x * &b).collect::<Vec<_>>());
    }

    #[test]
    fn solve_and_inverse() {
        let mat = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = mat.inverse().unwrap();
        assert_eq!(mat.mul(&inv), Matrix::identity(3));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert!(m(&[&[1, 2], &[2, 4]]).solve(&[Scalar::one(), Scalar::one()]).is_err());
    }

    #[test]
    fn degenerate_eigenspace() {
        let mat = Matrix::identity(2);
        assert!(matches!(mat.eigenvector(&Scalar::one()), Err(Error::Degenerate(_))));
    }
}
