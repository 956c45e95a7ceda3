use num_traits::{One, Zero};

use crate::arith::{is_rational_square, rational_roots, BigRational, RatMatrix, UniPoly};
use crate::error::{Error, Result};

use super::{embed_block, unipotent, FactorizationCert, LinearMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Row vector `w` with `w · A = λ w`.
    Left,
    /// Column vector `w` with `A · w = λ w`.
    Right,
}

/// A vector that is an eigenvector of every matrix, with the eigenvalues.
pub fn common_eigenvector(mats: &[RatMatrix], side: Side) -> Result<Option<(Vec<BigRational>, Vec<BigRational>)>> {
    let Some(first) = mats.first() else {
        return Err(Error::Precondition("no matrices".into()));
    };
    let d = first.rows();
    if d > 3 {
        return Err(Error::DegreeTooLarge(d, 3));
    }
    let mats: Vec<RatMatrix> = match side {
        Side::Right => mats.to_vec(),
        Side::Left => mats.iter().map(RatMatrix::transpose).collect(),
    };
    let basis: Vec<Vec<BigRational>> = (0..d).map(|j| RatMatrix::identity(d).col(j)).collect();
    let Some(w) = search(&mats, 0, basis, side)? else {
        return Ok(None);
    };
    let pivot = w.iter().position(|x| !x.is_zero()).expect("eigenvector is nonzero");
    let lambdas = mats.iter().map(|m| &m.mul_vec(&w)[pivot] / &w[pivot]).collect();
    Ok(Some((w, lambdas)))
}

fn search(mats: &[RatMatrix], i: usize, span: Vec<Vec<BigRational>>, side: Side) -> Result<Option<Vec<BigRational>>> {
    if span.is_empty() {
        return Ok(None);
    }
    let Some(a) = mats.get(i) else {
        let pick = match side {
            Side::Right => span.last(),
            Side::Left => span.first(),
        };
        return Ok(pick.cloned());
    };
    if a.as_scalar().is_some() {
        return search(mats, i + 1, span, side);
    }
    let d = a.rows();
    for root in rational_roots(&a.charpoly()?)? {
        let shifted = a.sub(&RatMatrix::scalar(d, &root.value))?;
        let kernel = shifted.nullspace();
        let next = intersect(&span, &kernel)?;
        if let Some(w) = search(mats, i + 1, next, side)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Basis of `span(s) ∩ span(k)`.
fn intersect(s: &[Vec<BigRational>], k: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    if s.is_empty() || k.is_empty() {
        return Ok(Vec::new());
    }
    let sm = RatMatrix::from_cols(s)?;
    let km = RatMatrix::from_cols(k)?.scale(&-BigRational::one());
    let joint = sm.hcat(&km)?;
    Ok(joint
        .nullspace()
        .into_iter()
        .map(|v| sm.mul_vec(&v[..s.len()]))
        .collect())
}

/// Invertible matrix whose last column is `u`.
fn complete_with_last_column(u: &[BigRational]) -> RatMatrix {
    let d = u.len();
    let j = u.iter().position(|x| !x.is_zero()).expect("nonzero vector");
    let id = RatMatrix::identity(d);
    let mut cols: Vec<Vec<BigRational>> = (0..d).filter(|&k| k != j).map(|k| id.col(k)).collect();
    cols.push(u.to_vec());
    RatMatrix::from_cols(&cols).expect("square")
}

/// Invertible matrix whose first row is `v`.
fn complete_with_first_row(v: &[BigRational]) -> RatMatrix {
    complete_with_last_column(v).transpose().rows_rotated_down()
}

trait Rotate {
    fn rows_rotated_down(&self) -> RatMatrix;
}

impl Rotate for RatMatrix {
    /// Moves the last row to the top.
    fn rows_rotated_down(&self) -> RatMatrix {
        let n = self.rows();
        let mut rows = vec![self.row(n - 1)];
        rows.extend((0..n - 1).map(|i| self.row(i)));
        RatMatrix::from_rows(rows).expect("rectangular")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrreducibleReason {
    /// The characteristic polynomial of `A0^-1 · A_index` has no rational
    /// root, so no 1x1 block can split off.
    CharPoly { index: usize, charpoly: UniPoly },
    /// No common left or right eigenvector exists.
    NoCommonEigenvector,
}

impl std::fmt::Display for IrreducibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IrreducibleReason::CharPoly { index, charpoly } => {
                write!(f, "charpoly of A{index} has no rational root: {charpoly}")
            }
            IrreducibleReason::NoCommonEigenvector => f.write_str("no common eigenvector"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor3x3 {
    Factored(FactorizationCert),
    Irreducible(IrreducibleReason),
}

/// Factorization of a 2x2 block with constant term `I`: `P·X·Q` equals the
/// product of `factors`.
struct Block2 {
    p: RatMatrix,
    q: RatMatrix,
    factors: Vec<(Vec<RatMatrix>, bool)>,
}

fn is_identity_block(b: &[RatMatrix]) -> bool {
    b[0] == RatMatrix::identity(b[0].rows()) && b[1..].iter().all(RatMatrix::is_zero)
}

fn diag_factor(n_mats: usize, lambdas: &[BigRational], pos: usize, d: usize) -> Vec<RatMatrix> {
    (0..n_mats)
        .map(|i| {
            if i == 0 {
                RatMatrix::identity(d)
            } else {
                let mut m = RatMatrix::zeros(d, d);
                m[(pos, pos)] = lambdas[i].clone();
                m
            }
        })
        .collect()
}

fn split_2x2(x: &[RatMatrix], s_p: RatMatrix, s_q: RatMatrix) -> Result<Block2> {
    let t: Vec<RatMatrix> = x
        .iter()
        .map(|m| s_p.mul(m)?.mul(&s_q))
        .collect::<Result<_>>()?;
    let a: Vec<RatMatrix> = t.iter().map(|m| m.block(0, 0, 1, 1)).collect();
    let dd: Vec<RatMatrix> = t.iter().map(|m| m.block(1, 0, 1, 1)).collect();
    let b: Vec<RatMatrix> = t.iter().map(|m| m.block(1, 1, 1, 1)).collect();
    debug_assert!(t.iter().all(|m| m[(0, 1)].is_zero()));
    let mut factors = Vec::new();
    factors.push((embed_block(&a, 2, 0).coeffs().to_vec(), false));
    if let Some(u) = unipotent(2, 1, 0, &dd) {
        factors.push((u.coeffs().to_vec(), true));
    }
    factors.push((embed_block(&b, 2, 1).coeffs().to_vec(), false));
    factors.retain(|(f, _)| !is_identity_block(f));
    Ok(Block2 { p: s_p, q: s_q, factors })
}

fn factor_2x2(x: &[RatMatrix]) -> Result<Block2> {
    let id = RatMatrix::identity(2);
    let scalars: Option<Vec<BigRational>> = x[1..].iter().map(RatMatrix::as_scalar).collect();
    if let Some(lams) = scalars {
        let mut lambdas = vec![BigRational::one()];
        lambdas.extend(lams);
        let mut factors = vec![(diag_factor(x.len(), &lambdas, 0, 2), false), (diag_factor(x.len(), &lambdas, 1, 2), false)];
        factors.retain(|(f, _)| !is_identity_block(f));
        return Ok(Block2 { p: id.clone(), q: id, factors });
    }
    let whole = Block2 {
        p: id.clone(),
        q: id,
        factors: vec![(x.to_vec(), false)],
    };
    let nonscalar = x[1..].iter().find(|m| m.as_scalar().is_none()).unwrap();
    let tr = &nonscalar[(0, 0)] + &nonscalar[(1, 1)];
    let det = nonscalar.det()?;
    let disc = &tr * &tr - BigRational::from_integer(4.into()) * det;
    if !is_rational_square(&disc) {
        return Ok(whole);
    }
    if let Some((u, _)) = common_eigenvector(&x[1..], Side::Right)? {
        let s = complete_with_last_column(&u);
        let s_inv = s.inverse()?.expect("completion is invertible");
        return split_2x2(x, s_inv, s);
    }
    if let Some((v, _)) = common_eigenvector(&x[1..], Side::Left)? {
        let t = complete_with_first_row(&v);
        let t_inv = t.inverse()?.expect("completion is invertible");
        return split_2x2(x, t, t_inv);
    }
    Ok(whole)
}

/// Factors a 3x3 linear matrix with invertible constant term.
pub fn factor_3x3(l: &LinearMatrix) -> Result<Factor3x3> {
    if l.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3x3, got {0}x{0}", l.dim())));
    }
    let a0_inv = l
        .coeff(0)
        .inverse()?
        .ok_or_else(|| Error::Precondition("constant term is singular".into()))?;
    let id3 = RatMatrix::identity(3);
    let normalized = l.transform(&a0_inv, &id3)?;
    let coeffs = &normalized.coeffs()[1..];
    for (i, a) in coeffs.iter().enumerate() {
        let cp = a.charpoly()?;
        if rational_roots(&cp)?.is_empty() {
            return Ok(Factor3x3::Irreducible(IrreducibleReason::CharPoly {
                index: i + 1,
                charpoly: cp,
            }));
        }
    }
    let n = coeffs.len();
    if n == 0 {
        return Ok(Factor3x3::Factored(FactorizationCert {
            p: a0_inv,
            q: id3,
            factors: Vec::new(),
            units: Vec::new(),
        }));
    }

    let mut factors: Vec<(LinearMatrix, bool)> = Vec::new();
    let (p, q);
    if let Some((u, _)) = common_eigenvector(coeffs, Side::Right)? {
        // S^-1 L S = [[X, 0], [D, l]] with X 2x2
        let s = complete_with_last_column(&u);
        let s_inv = s.inverse()?.expect("completion is invertible");
        let m = normalized.transform(&s_inv, &s)?;
        let x = m.block(0, 0, 2, 2);
        let dblk = m.block(2, 0, 1, 2);
        let ell = m.block(2, 2, 1, 1);
        let blk = factor_2x2(&x)?;
        for (f, unit) in &blk.factors {
            factors.push((embed_block(f, 3, 0), *unit));
        }
        let dq: Vec<RatMatrix> = dblk
            .iter()
            .map(|b| b.mul(&blk.q))
            .collect::<Result<_>>()?;
        let dq_padded: Vec<RatMatrix> = dq
            .iter()
            .enumerate()
            .map(|(i, b)| if i == 0 { RatMatrix::zeros(1, 2) } else { b.clone() })
            .collect();
        if let Some(u) = unipotent(3, 2, 0, &dq_padded) {
            factors.push((u, true));
        }
        factors.push((embed_block(&ell, 3, 2), false));
        p = embed_matrix(&blk.p, 0).mul(&s_inv)?.mul(&a0_inv)?;
        q = s.mul(&embed_matrix(&blk.q, 0))?;
    } else if let Some((v, _)) = common_eigenvector(coeffs, Side::Left)? {
        // T L T^-1 = [[l, 0], [D, Y]] with Y 2x2
        let t = complete_with_first_row(&v);
        let t_inv = t.inverse()?.expect("completion is invertible");
        let m = normalized.transform(&t, &t_inv)?;
        let ell = m.block(0, 0, 1, 1);
        let dblk = m.block(1, 0, 2, 1);
        let y = m.block(1, 1, 2, 2);
        let blk = factor_2x2(&y)?;
        factors.push((embed_block(&ell, 3, 0), false));
        let pd: Vec<RatMatrix> = dblk
            .iter()
            .enumerate()
            .map(|(i, b)| if i == 0 { Ok(RatMatrix::zeros(2, 1)) } else { blk.p.mul(b) })
            .collect::<Result<_>>()?;
        if let Some(u) = unipotent(3, 1, 0, &pd) {
            factors.push((u, true));
        }
        for (f, unit) in &blk.factors {
            factors.push((embed_block(f, 3, 1), *unit));
        }
        p = embed_matrix(&blk.p, 1).mul(&t)?.mul(&a0_inv)?;
        q = t_inv.mul(&embed_matrix(&blk.q, 1))?;
    } else {
        return Ok(Factor3x3::Irreducible(IrreducibleReason::NoCommonEigenvector));
    }
    factors.retain(|(f, _)| !f.is_identity());
    let (factors, units) = factors.into_iter().unzip();
    Ok(Factor3x3::Factored(FactorizationCert { p, q, factors, units }))
}

/// A 2x2 matrix placed into the 3x3 identity at `(at, at)`.
fn embed_matrix(m: &RatMatrix, at: usize) -> RatMatrix {
    let mut out = RatMatrix::identity(3);
    out.set_block(at, at, m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn is_zero_vec(v: &[BigRational]) -> bool {
        v.iter().all(Zero::is_zero)
    }
    use crate::linmat::verify_cert;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn eigenvector_examples() {
        let id = RatMatrix::identity(2);
        let (w, l) = common_eigenvector(&[id.clone(), id], Side::Right).unwrap().unwrap();
        assert!(!is_zero_vec(&w));
        assert_eq!(l, vec![rat(1), rat(1)]);
        let (w, l) = common_eigenvector(&[m(&[&[1, 0], &[0, 2]]), m(&[&[3, 0], &[0, 4]])], Side::Right)
            .unwrap()
            .unwrap();
        assert!(
            (w == vec![rat(1), rat(0)] && l == vec![rat(1), rat(3)])
                || (w == vec![rat(0), rat(1)] && l == vec![rat(2), rat(4)])
        );
        let comp = RatMatrix::companion(&[rat(1), rat(0)]);
        assert_eq!(common_eigenvector(&[comp], Side::Right).unwrap(), None);
        assert!(common_eigenvector(&[RatMatrix::identity(4)], Side::Right).is_err());
    }

    #[test]
    fn left_versus_right() {
        // upper triangular: e1 is a right eigenvector, e2^T a left one
        let a = m(&[&[1, 1], &[0, 2]]);
        let b = m(&[&[3, 5], &[0, 3]]);
        let (w, _) = common_eigenvector(&[a.clone(), b.clone()], Side::Right).unwrap().unwrap();
        assert_eq!(w, vec![rat(1), rat(0)]);
        let (v, l) = common_eigenvector(&[a.clone(), b.clone()], Side::Left).unwrap().unwrap();
        let vm = RatMatrix::from_rows(vec![v.clone()]).unwrap();
        assert_eq!(vm.mul(&a).unwrap(), vm.scale(&l[0]));
        assert_eq!(vm.mul(&b).unwrap(), vm.scale(&l[1]));
    }

    fn linmat(mats: Vec<RatMatrix>) -> LinearMatrix {
        LinearMatrix::new(mats).unwrap()
    }

    #[test]
    fn scalar_family_gives_three_diagonal_factors() {
        let l = linmat(vec![
            RatMatrix::identity(3),
            RatMatrix::scalar(3, &rat(2)),
            RatMatrix::scalar(3, &ratio(-1, 3)),
        ]);
        let Factor3x3::Factored(cert) = factor_3x3(&l).unwrap() else {
            panic!("scalar family factors");
        };
        assert!(verify_cert(&cert, &l).unwrap());
        assert_eq!(cert.factors.len(), 3);
        for (k, f) in cert.factors.iter().enumerate() {
            for i in 1..=2 {
                let c = f.coeff(i);
                for r in 0..3 {
                    for s in 0..3 {
                        assert_eq!(c[(r, s)].is_zero(), !(r == k && s == k));
                    }
                }
            }
        }
    }

    #[test]
    fn companion_cubic_is_irreducible() {
        // t^3 - 2
        let comp = RatMatrix::companion(&[rat(-2), rat(0), rat(0)]);
        let l = linmat(vec![RatMatrix::identity(3), comp]);
        match factor_3x3(&l).unwrap() {
            Factor3x3::Irreducible(IrreducibleReason::CharPoly { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_constant_is_rejected() {
        let l = linmat(vec![RatMatrix::zeros(3, 3), RatMatrix::identity(3)]);
        assert!(matches!(factor_3x3(&l), Err(Error::Precondition(_))));
    }

    #[test]
    fn irreducible_2x2_block_is_kept() {
        // 1 ⊕ (I + companion(t^2 + 1) x) ⊕ ... : right eigenvector e1 exists
        let mut a = RatMatrix::zeros(3, 3);
        a[(0, 0)] = rat(5);
        a.set_block(1, 1, &RatMatrix::companion(&[rat(1), rat(0)]));
        let b = RatMatrix::scalar(3, &rat(1));
        let l = linmat(vec![RatMatrix::identity(3), a, b]);
        let Factor3x3::Factored(cert) = factor_3x3(&l).unwrap() else {
            panic!("splits a 1x1 block");
        };
        assert!(verify_cert(&cert, &l).unwrap());
        assert_eq!(cert.proper_factor_count(), 2);
    }

    fn random_rat<R: Rng>(rng: &mut R) -> BigRational {
        ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
    }

    fn random_invertible<R: Rng>(rng: &mut R) -> RatMatrix {
        loop {
            let rows = (0..3).map(|_| (0..3).map(|_| random_rat(rng)).collect()).collect();
            let p = RatMatrix::from_rows(rows).unwrap();
            if p.is_invertible() {
                return p;
            }
        }
    }

    #[test]
    fn conjugated_triangular_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let p = random_invertible(&mut rng);
            let p_inv = p.inverse().unwrap().unwrap();
            let mut mats = vec![RatMatrix::identity(3)];
            for _ in 0..2 {
                // lower triangular seed with rational spectrum
                let mut t = RatMatrix::zeros(3, 3);
                for r in 0..3 {
                    for c in 0..=r {
                        t[(r, c)] = random_rat(&mut rng);
                    }
                }
                mats.push(p_inv.mul(&t).unwrap().mul(&p).unwrap());
            }
            let l = linmat(mats);
            let Factor3x3::Factored(cert) = factor_3x3(&l).unwrap() else {
                panic!("triangular seeds are reducible");
            };
            assert!(verify_cert(&cert, &l).unwrap());
        }
    }
}
