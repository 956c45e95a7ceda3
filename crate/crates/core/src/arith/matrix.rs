use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::field::{format_rational, Field, FieldElem};
use super::univariate::UniPoly;

/// Largest dimension accepted by [`RatMatrix::charpoly`].
pub const MAX_CHARPOLY_DIM: usize = 8;

/// Dense matrix of canonical rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &BigRational) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("ragged rows")
    }

    /// Companion matrix of a monic polynomial given by its low-order
    /// coefficients `c_0..c_{n-1}` (the polynomial is `t^n + Σ c_i t^i`).
    pub fn companion(low_coeffs: &[BigRational]) -> Self {
        let n = low_coeffs.len();
        let mut m = RatMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = BigRational::one();
        }
        for (i, c) in low_coeffs.iter().enumerate() {
            m[(i, n - 1)] = -c;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn from_cols(cols: &[Vec<BigRational>]) -> Result<Self> {
        let m = RatMatrix::from_rows(cols.to_vec())?;
        Ok(m.transpose())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Returns `Some(c)` if this is `c·I`.
    pub fn as_scalar(&self) -> Option<BigRational> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 {
            BigRational::zero()
        } else {
            self[(0, 0)].clone()
        };
        (*self == RatMatrix::scalar(self.rows, &c)).then_some(c)
    }

    pub fn transpose(&self) -> Self {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(BigRational::zero(), |acc, j| acc + &self[(i, j)] * &v[j])
            })
            .collect()
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &RatMatrix, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<RatMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RatMatrix {
        let mut b = RatMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        b
    }

    /// Writes `b` into this matrix at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &RatMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn hcat(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hcat row count".into()));
        }
        let mut m = RatMatrix::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        Ok(m)
    }

    pub fn vcat(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vcat column count".into()));
        }
        let mut m = RatMatrix::zeros(self.rows + other.rows, self.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, 0, other);
        Ok(m)
    }

    /// Fraction-free (Bareiss) row echelon form of the integer-scaled rows.
    /// Returns the echelon matrix and its pivot columns.
    fn bareiss_echelon(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let piv = a[r][c].clone();
            for i in r + 1..self.rows {
                let factor = a[i][c].clone();
                #[allow(clippy::needless_range_loop)]
                for j in c + 1..self.cols {
                    let num = &piv * &a[i][j] - &factor * &a[r][j];
                    debug_assert!((&num % &prev).is_zero());
                    a[i][j] = num / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            // entries left of the pivot in earlier columns stay zero; rows
            // below now carry the next leading minors
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss_echelon().1.len()
    }

    /// Exact basis of the right nullspace `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (ech, pivots) = self.bareiss_echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![BigRational::zero(); self.cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut s = BigRational::zero();
                for j in pc + 1..self.cols {
                    if !ech[r][j].is_zero() {
                        s += BigRational::from_integer(ech[r][j].clone()) * &v[j];
                    }
                }
                v[pc] = -s / BigRational::from_integer(ech[r][pc].clone());
            }
            basis.push(v);
        }
        basis
    }

    pub fn det(&self) -> Result<BigRational> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c].clone();
            det *= &piv;
            for i in c + 1..n {
                let f = &a[i * n + c] / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let t = &f * &a[c * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Result<Option<RatMatrix>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.hcat(&RatMatrix::identity(n))?;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return Ok(None);
            };
            if p != c {
                for j in 0..2 * n {
                    let t = a[(c, j)].clone();
                    a[(c, j)] = a[(p, j)].clone();
                    a[(p, j)] = t;
                }
            }
            let inv = a[(c, c)].recip();
            for j in 0..2 * n {
                a[(c, j)] = &a[(c, j)] * &inv;
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..2 * n {
                    let t = &f * &a[(c, j)];
                    a[(i, j)] -= t;
                }
            }
        }
        Ok(Some(a.block(0, n, n, n)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// `det(tI - M)` via the Faddeev-LeVerrier recurrence.
    pub fn charpoly(&self) -> Result<UniPoly> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n > MAX_CHARPOLY_DIM {
            return Err(Error::DegreeTooLarge(n, MAX_CHARPOLY_DIM));
        }
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = RatMatrix::zeros(n, n);
        for k in 1..=n {
            m = self.mul(&m)?.add(&RatMatrix::scalar(n, &coeffs[n - k + 1]))?;
            let am = self.mul(&m)?;
            let tr = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[(i, i)]);
            coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        Ok(UniPoly::new(coeffs))
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Square or rectangular matrix over a [`Field`], used for evaluating
/// polynomials at matrix substitutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        FieldMatrix::scalar(field, n, &field.one())
    }

    pub fn scalar(field: Field, n: usize, c: &FieldElem) -> Self {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        if rows.iter().flatten().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch(field.to_string(), "entry".into()));
        }
        Ok(FieldMatrix {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        FieldMatrix::from_rows(
            field,
            rows.iter().map(|row| row.iter().map(|&v| field.from_i64(v)).collect()).collect(),
        )
        .expect("ragged rows")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = FieldMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &FieldElem) -> FieldMatrix {
        FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FieldMatrix {
        let mut b = FieldMatrix::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &FieldMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }
}

impl Index<(usize, usize)> for FieldMatrix {
    type Output = FieldElem;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElem {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FieldMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn charpoly_examples() {
        assert_eq!(
            RatMatrix::identity(3).charpoly().unwrap(),
            UniPoly::from_roots(&[q(1), q(1), q(1)])
        );
        let comp = RatMatrix::companion(&[q(-2), q(0), q(0)]);
        assert_eq!(comp.charpoly().unwrap(), UniPoly::from_i64(&[-2, 0, 0, 1]));
        let diag = RatMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        assert_eq!(diag.charpoly().unwrap(), UniPoly::from_i64(&[2, -3, 1]));
        assert!(RatMatrix::zeros(2, 3).charpoly().is_err());
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(RatMatrix::zeros(2, 2).nullspace().len(), 2);
        assert!(RatMatrix::identity(3).nullspace().is_empty());
        let ns = RatMatrix::from_i64(&[&[1, 1], &[1, 1]]).nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(&ns[0][0] + &ns[0][1], q(0));
        assert!(!ns[0][0].is_zero());
    }

    #[test]
    fn inverse_and_det() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det().unwrap(), q(1));
        let inv = m.inverse().unwrap().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().unwrap().is_none());
    }

    /// Rank by plain rational Gaussian elimination, independent of Bareiss.
    fn naive_rank(m: &RatMatrix) -> usize {
        let mut rows: Vec<Vec<BigRational>> = (0..m.rows()).map(|i| m.row(i)).collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            for i in 0..rows.len() {
                if i != rank && !rows[i][c].is_zero() {
                    let f = &rows[i][c] / &rows[rank][c];
                    #[allow(clippy::needless_range_loop)]
                    for j in 0..m.cols() {
                        let t = &f * &rows[rank][j];
                        rows[i][j] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn small_matrix(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |v| {
                RatMatrix::from_rows(
                    v.chunks(c)
                        .map(|ch| ch.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect())
                        .collect(),
                )
                .unwrap()
            })
        })
    }

    fn square_matrix(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max_dim).prop_flat_map(|n| {
            proptest::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
                RatMatrix::from_rows(v.chunks(n).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cayley_hamilton(m in square_matrix(5)) {
            let p = m.charpoly().unwrap();
            let n = m.rows();
            prop_assert_eq!(p.degree(), Some(n));
            prop_assert!(p.leading().unwrap().is_one());
            // Horner evaluation at M
            let mut acc = RatMatrix::zeros(n, n);
            for c in p.coeffs().iter().rev() {
                acc = m.mul(&acc).unwrap().add(&RatMatrix::scalar(n, c)).unwrap();
            }
            prop_assert!(acc.is_zero());
        }

        #[test]
        fn nullspace_is_exact(m in small_matrix(5)) {
            let ns = m.nullspace();
            for v in &ns {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            prop_assert_eq!(ns.len(), m.cols() - naive_rank(&m));
            if !ns.is_empty() {
                let basis = RatMatrix::from_rows(ns.clone()).unwrap();
                prop_assert_eq!(naive_rank(&basis), ns.len());
            }
        }

        #[test]
        fn det_matches_charpoly_constant(m in square_matrix(4)) {
            let p = m.charpoly().unwrap();
            let sign = if m.rows() % 2 == 0 { q(1) } else { q(-1) };
            prop_assert_eq!(m.det().unwrap() * sign, p.coeffs().first().cloned().unwrap_or_else(|| q(0)));
        }
    }
}
