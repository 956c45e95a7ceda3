//! Quaternion algebras `H(α, β)` over Q: `u² = α`, `v² = β`, `uv = -vu`.
//!
//! Elements are stored in the basis `1, u, v, uv`. The left regular
//! representation is conjugated by `diag(1, α, β, αβ)` so that `u` and `v`
//! map to `m_u` and `m_v`.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{format_rational, parse_rational, rat, BigRational, RatMatrix};
use crate::error::{Error, Result};

use super::{unipotent, embed_block, FactorizationCert, LinearMatrix};

pub const MAX_SEARCH_BOUND: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quaternion {
    alpha: BigRational,
    beta: BigRational,
    coords: [BigRational; 4],
}

impl Quaternion {
    pub fn new(alpha: BigRational, beta: BigRational, coords: [BigRational; 4]) -> Result<Self> {
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::Precondition("quaternion parameters must be nonzero".into()));
        }
        Ok(Quaternion { alpha, beta, coords })
    }

    pub fn from_i64(alpha: i64, beta: i64, coords: [i64; 4]) -> Result<Self> {
        Quaternion::new(rat(alpha), rat(beta), coords.map(rat))
    }

    /// Basis element `1, u, v, uv` for `k = 0..4`.
    pub fn basis(alpha: &BigRational, beta: &BigRational, k: usize) -> Result<Self> {
        let mut coords: [BigRational; 4] = Default::default();
        coords[k] = BigRational::one();
        Quaternion::new(alpha.clone(), beta.clone(), coords)
    }

    /// Parses `a0,a1,a2,a3`.
    pub fn parse(alpha: &BigRational, beta: &BigRational, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::parse(1, format!("expected four comma-separated coordinates, got {s:?}")));
        }
        let mut coords: [BigRational; 4] = Default::default();
        for (c, p) in coords.iter_mut().zip(parts) {
            *c = parse_rational(p).map_err(|_| Error::parse(1, format!("bad rational {p:?}")))?;
        }
        Quaternion::new(alpha.clone(), beta.clone(), coords)
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_algebra(&self, other: &Quaternion) -> Result<()> {
        if self.alpha != other.alpha || self.beta != other.beta {
            return Err(Error::Precondition("quaternions from different algebras".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Quaternion) -> Result<Quaternion> {
        self.same_algebra(other)?;
        let (a, b) = (&self.alpha, &self.beta);
        let ab = a * b;
        let one = BigRational::one();
        // e_i e_j = c · e_k
        let table = |i: usize, j: usize| -> (BigRational, usize) {
            match (i, j) {
                (0, k) | (k, 0) => (one.clone(), k),
                (1, 1) => (a.clone(), 0),
                (1, 2) => (one.clone(), 3),
                (1, 3) => (a.clone(), 2),
                (2, 1) => (-&one, 3),
                (2, 2) => (b.clone(), 0),
                (2, 3) => (-b, 1),
                (3, 1) => (-a, 2),
                (3, 2) => (b.clone(), 1),
                (3, 3) => (-&ab, 0),
                _ => unreachable!(),
            }
        };
        let mut out: [BigRational; 4] = Default::default();
        for i in 0..4 {
            if self.coords[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if other.coords[j].is_zero() {
                    continue;
                }
                let (c, k) = table(i, j);
                out[k] += &self.coords[i] * &other.coords[j] * c;
            }
        }
        Quaternion::new(a.clone(), b.clone(), out)
    }

    fn scaling(&self) -> [BigRational; 4] {
        [BigRational::one(), self.alpha.clone(), self.beta.clone(), &self.alpha * &self.beta]
    }

    /// `diag(1, α, β, αβ) · coords`.
    pub fn column(&self) -> Vec<BigRational> {
        self.scaling().iter().zip(&self.coords).map(|(d, c)| d * c).collect()
    }

    pub fn from_column(alpha: &BigRational, beta: &BigRational, col: &[BigRational]) -> Result<Self> {
        if col.len() != 4 {
            return Err(Error::DimensionMismatch("quaternion column has four entries".into()));
        }
        let mut q = Quaternion::new(alpha.clone(), beta.clone(), Default::default())?;
        let d = q.scaling();
        for k in 0..4 {
            q.coords[k] = &col[k] / &d[k];
        }
        Ok(q)
    }

    /// 4x4 matrix with `rep(z) · w.column() = (z w).column()`.
    pub fn rep(&self) -> RatMatrix {
        let cols: Vec<Vec<BigRational>> = (0..4)
            .map(|k| {
                let e = Quaternion::basis(&self.alpha, &self.beta, k).expect("valid algebra");
                let img = self.mul(&e).expect("same algebra").column();
                let dk = &e.scaling()[k];
                img.into_iter().map(|x| x / dk).collect()
            })
            .collect();
        RatMatrix::from_cols(&cols).expect("four columns")
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn hmul(a: &Quaternion, b: &Quaternion) -> Result<Quaternion> {
    a.mul(b)
}

pub fn m_u(alpha: &BigRational) -> RatMatrix {
    let mut m = RatMatrix::zeros(4, 4);
    m[(0, 1)] = BigRational::one();
    m[(1, 0)] = alpha.clone();
    m[(2, 3)] = BigRational::one();
    m[(3, 2)] = alpha.clone();
    m
}

pub fn m_v(beta: &BigRational) -> RatMatrix {
    let mut m = RatMatrix::zeros(4, 4);
    m[(0, 2)] = BigRational::one();
    m[(1, 3)] = -BigRational::one();
    m[(2, 0)] = beta.clone();
    m[(3, 1)] = -beta;
    m
}

/// `I + m_u · x1 + m_v · x2`.
pub fn quaternion_linmat(alpha: &BigRational, beta: &BigRational) -> Result<LinearMatrix> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::Precondition("quaternion parameters must be nonzero".into()));
    }
    LinearMatrix::new(vec![RatMatrix::identity(4), m_u(alpha), m_v(beta)])
}

pub fn is_zero_divisor(z: &Quaternion) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::Precondition("zero is excluded".into()));
    }
    Ok(z.rep().det()?.is_zero())
}

/// Certificate for `quaternion_linmat` built from the left ideal `H z`.
pub fn zdiv_to_factorization(z: &Quaternion) -> Result<FactorizationCert> {
    if !is_zero_divisor(z)? {
        return Err(Error::Precondition(format!("{z} is not a zero divisor")));
    }
    let (alpha, beta) = (z.alpha(), z.beta());
    let l = quaternion_linmat(alpha, beta)?;
    let mut w: Vec<Vec<BigRational>> = Vec::new();
    for k in 0..4 {
        let col = Quaternion::basis(alpha, beta, k)?.mul(z)?.column();
        if rank_of(&w, Some(&col)) > w.len() {
            w.push(col);
        }
    }
    let mut cols: Vec<Vec<BigRational>> = Vec::new();
    let id = RatMatrix::identity(4);
    for j in 0..4 {
        if cols.len() + w.len() == 4 {
            break;
        }
        let e = id.col(j);
        let mut trial = cols.clone();
        trial.extend(w.iter().cloned());
        if rank_of(&trial, Some(&e)) > trial.len() {
            cols.push(e);
        }
    }
    let k = cols.len();
    cols.extend(w);
    let s = RatMatrix::from_cols(&cols)?;
    let s_inv = s.inverse()?.expect("completed basis");
    let m = l.transform(&s_inv, &s)?;
    debug_assert!(m.coeffs().iter().all(|c| c.block(0, k, k, 4 - k).is_zero()));
    let a = m.block(0, 0, k, k);
    let d = m.block(k, 0, 4 - k, k);
    let b = m.block(k, k, 4 - k, 4 - k);
    let mut factors = vec![(embed_block(&a, 4, 0), false)];
    if let Some(u) = unipotent(4, k, 0, &zero_constant(d)) {
        factors.push((u, true));
    }
    factors.push((embed_block(&b, 4, k), false));
    let (factors, units) = factors.into_iter().unzip();
    Ok(FactorizationCert {
        p: s_inv,
        q: s,
        factors,
        units,
    })
}

fn zero_constant(mut d: Vec<RatMatrix>) -> Vec<RatMatrix> {
    d[0] = RatMatrix::zeros(d[0].rows(), d[0].cols());
    d
}

fn rank_of(cols: &[Vec<BigRational>], extra: Option<&Vec<BigRational>>) -> usize {
    let mut all: Vec<Vec<BigRational>> = cols.to_vec();
    all.extend(extra.cloned());
    if all.is_empty() {
        return 0;
    }
    RatMatrix::from_cols(&all).expect("equal lengths").rank()
}

/// Recovers `(z1, z2)` with `z1 z2 = 0` from a nontrivial factorization
/// `F · G = quaternion_linmat(α, β)`.
pub fn factorization_to_zdiv(
    alpha: &BigRational,
    beta: &BigRational,
    f: &LinearMatrix,
    g: &LinearMatrix,
) -> Result<(Quaternion, Quaternion)> {
    let l = quaternion_linmat(alpha, beta)?;
    if f.dim() != 4 || g.dim() != 4 || f.nvars() != 2 || g.nvars() != 2 {
        return Err(Error::DimensionMismatch("factors must be 4x4 in two variables".into()));
    }
    let fg = f
        .mul_linear(g)
        .map_err(|_| Error::ProductMismatch("F·G is not linear".into()))?;
    if fg != l {
        return Err(Error::ProductMismatch("F·G differs from the quaternion matrix".into()));
    }
    let g0_inv = g.coeff(0).inverse()?.expect("F0·G0 = I");
    let g = g.transform(&g0_inv, &RatMatrix::identity(4))?;
    let span = g.coeff(1).hcat(g.coeff(2))?;
    let basis: Vec<Vec<BigRational>> = (0..span.cols())
        .scan(Vec::<Vec<BigRational>>::new(), |acc, j| {
            let c = span.col(j);
            if rank_of(acc, Some(&c)) > acc.len() {
                acc.push(c.clone());
                Some(Some(c))
            } else {
                Some(None)
            }
        })
        .flatten()
        .collect();
    if basis.is_empty() || basis.len() == 4 {
        return Err(Error::UnitFactor(format!("invariant subspace has dimension {}", basis.len())));
    }
    let e1 = RatMatrix::identity(4).col(0);
    let w1 = basis
        .iter()
        .find(|w| rank_of(std::slice::from_ref(&e1), Some(w)) == 2)
        .expect("a proper left ideal does not contain 1");
    let z2 = Quaternion::from_column(alpha, beta, w1)?;
    let images: Vec<Vec<BigRational>> = (0..4)
        .map(|k| Ok(Quaternion::basis(alpha, beta, k)?.mul(&z2)?.coords().to_vec()))
        .collect::<Result<_>>()?;
    let gamma = RatMatrix::from_cols(&images)?
        .nullspace()
        .into_iter()
        .next()
        .ok_or_else(|| Error::Precondition("invariant vector is not a zero divisor".into()))?;
    let z1 = Quaternion::new(alpha.clone(), beta.clone(), [gamma[0].clone(), gamma[1].clone(), gamma[2].clone(), gamma[3].clone()])?;
    Ok((z1, z2))
}

/// `0, -1, 1, -2, 2, ...` up to `bound`.
fn signed_order(bound: i64, positive_first: bool) -> Vec<i64> {
    let mut out = vec![0];
    for k in 1..=bound {
        if positive_first {
            out.extend([k, -k]);
        } else {
            out.extend([-k, k]);
        }
    }
    out
}

/// First zero divisor with integer coordinates in `[-bound, bound]`.
pub fn search_zero_divisor(alpha: &BigRational, beta: &BigRational, bound: i64) -> Result<Option<Quaternion>> {
    if !(0..=MAX_SEARCH_BOUND).contains(&bound) {
        return Err(Error::Precondition(format!("search bound must be in 0..={MAX_SEARCH_BOUND}")));
    }
    let outer = signed_order(bound, false);
    let inner = signed_order(bound, true);
    for a3 in &outer {
        for a2 in &outer {
            for a1 in &outer {
                for a0 in &inner {
                    let z = Quaternion::new(
                        alpha.clone(),
                        beta.clone(),
                        [rat(*a0), rat(*a1), rat(*a2), rat(*a3)],
                    )?;
                    if !z.is_zero() && is_zero_divisor(&z)? {
                        return Ok(Some(z));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmat::verify_cert;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, c: [i64; 4]) -> Quaternion {
        Quaternion::from_i64(a, b, c).unwrap()
    }

    #[test]
    fn multiplication_table() {
        let (a, b) = (3, 5);
        let one = q(a, b, [1, 0, 0, 0]);
        let u = q(a, b, [0, 1, 0, 0]);
        let v = q(a, b, [0, 0, 1, 0]);
        let uv = q(a, b, [0, 0, 0, 1]);
        assert_eq!(u.mul(&u).unwrap(), q(a, b, [3, 0, 0, 0]));
        assert_eq!(v.mul(&v).unwrap(), q(a, b, [5, 0, 0, 0]));
        assert_eq!(u.mul(&v).unwrap(), uv);
        assert_eq!(v.mul(&u).unwrap(), q(a, b, [0, 0, 0, -1]));
        assert_eq!(uv.mul(&uv).unwrap(), q(a, b, [-15, 0, 0, 0]));
        assert_eq!(u.mul(&uv).unwrap(), q(a, b, [0, 0, 3, 0]));
        assert_eq!(uv.mul(&v).unwrap(), q(a, b, [0, 5, 0, 0]));
        assert_eq!(one.mul(&uv).unwrap(), uv);
    }

    #[test]
    fn split_algebra_zero_divisor() {
        let z = q(1, 1, [1, -1, 0, 0]);
        let w = q(1, 1, [1, 1, 0, 0]);
        assert!(z.mul(&w).unwrap().is_zero());
        assert!(is_zero_divisor(&z).unwrap());
        assert!(!is_zero_divisor(&q(-1, -1, [1, 1, 1, 1])).unwrap());
        assert!(is_zero_divisor(&q(1, 1, [0, 0, 0, 0])).is_err());
    }

    #[test]
    fn rep_matches_generators() {
        for (a, b) in [(1, 1), (-1, -1), (4, 3), (2, -7)] {
            assert_eq!(q(a, b, [0, 1, 0, 0]).rep(), m_u(&rat(a)));
            assert_eq!(q(a, b, [0, 0, 1, 0]).rep(), m_v(&rat(b)));
            assert_eq!(q(a, b, [1, 0, 0, 0]).rep(), RatMatrix::identity(4));
        }
    }

    fn arb_q(a: i64, b: i64) -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-4i64..=4).prop_map(move |c| q(a, b, c))
    }

    proptest! {
        #[test]
        fn rep_is_multiplicative((a, b) in (-3i64..=3, -3i64..=3).prop_filter("nonzero", |(a, b)| *a != 0 && *b != 0),
                                 seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pick = || q(a, b, [(); 4].map(|_| rng.gen_range(-4..=4)));
            let (x, y) = (pick(), pick());
            prop_assert_eq!(x.mul(&y).unwrap().rep(), x.rep().mul(&y.rep()).unwrap());
        }

        #[test]
        fn quaternion_associative(x in arb_q(2, -3), y in arb_q(2, -3), z in arb_q(2, -3)) {
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        }
    }

    #[test]
    fn search_examples() {
        assert_eq!(search_zero_divisor(&rat(1), &rat(1), 1).unwrap(), Some(q(1, 1, [1, -1, 0, 0])));
        assert_eq!(search_zero_divisor(&rat(4), &rat(3), 2).unwrap(), Some(q(4, 3, [2, -1, 0, 0])));
        assert_eq!(search_zero_divisor(&rat(-1), &rat(-1), 3).unwrap(), None);
        assert!(search_zero_divisor(&rat(1), &rat(1), 6).is_err());
    }

    #[test]
    fn zero_divisor_round_trip() {
        for (a, b) in [(1, 1), (1, 2), (1, 3), (4, 3), (9, 5), (2, 2)] {
            let (alpha, beta) = (rat(a), rat(b));
            let z = search_zero_divisor(&alpha, &beta, 5).unwrap().expect("split algebra");
            let l = quaternion_linmat(&alpha, &beta).unwrap();
            let cert = zdiv_to_factorization(&z).unwrap();
            assert!(verify_cert(&cert, &l).unwrap(), "({a},{b})");
            assert_eq!(cert.proper_factor_count(), 2);
            // the last two columns of Q span an invariant subspace
            let w = cert.q.block(0, 2, 4, 2);
            for m in [m_u(&alpha), m_v(&beta)] {
                let img = m.mul(&w).unwrap();
                assert_eq!(w.hcat(&img).unwrap().rank(), 2);
            }
            let (f, g) = cert.two_factor_split().unwrap();
            assert_eq!(f.mul_linear(&g).unwrap(), l);
            let (z1, z2) = factorization_to_zdiv(&alpha, &beta, &f, &g).unwrap();
            assert!(!z1.is_zero() && !z2.is_zero());
            assert!(z1.mul(&z2).unwrap().is_zero());
        }
    }

    #[test]
    fn left_ideal_of_one_minus_u() {
        let z = q(1, 1, [1, -1, 0, 0]);
        let ideal: Vec<Vec<BigRational>> = (0..4)
            .map(|k| Quaternion::basis(&rat(1), &rat(1), k).unwrap().mul(&z).unwrap().coords().to_vec())
            .collect();
        let span = RatMatrix::from_cols(&ideal).unwrap();
        assert_eq!(span.rank(), 2);
        // v + uv lies in H(1 - u); v - uv does not
        let with = |c: [i64; 4]| span.hcat(&RatMatrix::from_i64(&[&[c[0]], &[c[1]], &[c[2]], &[c[3]]])).unwrap().rank();
        assert_eq!(with([0, 0, 1, 1]), 2);
        assert_eq!(with([0, 0, 1, -1]), 3);
    }

    #[test]
    fn trivial_factorizations_are_rejected() {
        let (alpha, beta) = (rat(1), rat(1));
        let l = quaternion_linmat(&alpha, &beta).unwrap();
        let id = LinearMatrix::new(vec![RatMatrix::identity(4), RatMatrix::zeros(4, 4), RatMatrix::zeros(4, 4)]).unwrap();
        assert!(matches!(factorization_to_zdiv(&alpha, &beta, &id, &l), Err(Error::UnitFactor(_))));
        assert!(matches!(factorization_to_zdiv(&alpha, &beta, &l, &id), Err(Error::UnitFactor(_))));
        assert!(matches!(factorization_to_zdiv(&alpha, &beta, &l, &l), Err(Error::ProductMismatch(_))));
    }
}
