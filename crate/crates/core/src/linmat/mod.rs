//! Linear matrices `L = A0 + Σ Ai·xi` over Q, factorization certificates,
//! the 3x3 factorization algorithm and the quaternion gadget.

mod eigen;
mod quaternion;

pub use eigen::{common_eigenvector, factor_3x3, Factor3x3, IrreducibleReason, Side};
pub use quaternion::{
    factorization_to_zdiv, hmul, is_zero_divisor, m_u, m_v, quaternion_linmat, search_zero_divisor,
    zdiv_to_factorization, Quaternion, MAX_SEARCH_BOUND,
};

use std::fmt::Write as _;

use crate::arith::{format_rational, parse_rational, Field, RatMatrix};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, NcPoly, Word};

/// `A0 + A1·x1 + ... + An·xn` with square `d x d` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatrix {
    mats: Vec<RatMatrix>,
}

impl LinearMatrix {
    pub fn new(mats: Vec<RatMatrix>) -> Result<Self> {
        let Some(a0) = mats.first() else {
            return Err(Error::Precondition("a linear matrix needs a constant term".into()));
        };
        if !a0.is_square() {
            return Err(Error::NotSquare {
                rows: a0.rows(),
                cols: a0.cols(),
            });
        }
        let d = a0.rows();
        if let Some(m) = mats.iter().find(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "expected {d}x{d}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(LinearMatrix { mats })
    }

    pub fn from_i64(blocks: &[&[&[i64]]]) -> Result<Self> {
        LinearMatrix::new(blocks.iter().map(|b| RatMatrix::from_i64(b)).collect())
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn nvars(&self) -> usize {
        self.mats.len() - 1
    }

    /// `A0` for `i = 0`, otherwise the coefficient of `xi`.
    pub fn coeff(&self, i: usize) -> &RatMatrix {
        &self.mats[i]
    }

    pub fn coeffs(&self) -> &[RatMatrix] {
        &self.mats
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::Indexed(self.nvars().max(1))
    }

    /// `P · L · Q`, coefficientwise.
    pub fn transform(&self, p: &RatMatrix, q: &RatMatrix) -> Result<LinearMatrix> {
        let mats = self
            .mats
            .iter()
            .map(|a| p.mul(a)?.mul(q))
            .collect::<Result<Vec<_>>>()?;
        LinearMatrix::new(mats)
    }

    /// Product of two linear matrices whose quadratic part cancels.
    pub fn mul_linear(&self, other: &LinearMatrix) -> Result<LinearMatrix> {
        if self.nvars() != other.nvars() {
            return Err(Error::DimensionMismatch("variable counts differ".into()));
        }
        for i in 1..=self.nvars() {
            for j in 1..=other.nvars() {
                let prod = self.mats[i].mul(&other.mats[j])?;
                if !prod.is_zero() {
                    return Err(Error::ProductMismatch("product is not linear".into()));
                }
            }
        }
        let a0 = &self.mats[0];
        let b0 = &other.mats[0];
        let mut mats = vec![a0.mul(b0)?];
        for i in 1..=self.nvars() {
            mats.push(self.mats[i].mul(b0)?.add(&a0.mul(&other.mats[i])?)?);
        }
        LinearMatrix::new(mats)
    }

    /// Entrywise polynomials over Q in `x1..xn`.
    pub fn to_poly_matrix(&self) -> Vec<Vec<NcPoly>> {
        let d = self.dim();
        let alphabet = self.alphabet();
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        let mut p = NcPoly::zero(Field::Rational, alphabet);
                        for (i, m) in self.mats.iter().enumerate() {
                            let w = if i == 0 { Word::empty() } else { Word::letter(i as u8 - 1) };
                            p.add_term(w, Field::Rational.from_rational(&m[(r, c)]).unwrap());
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.mats[0] == RatMatrix::identity(self.dim()) && self.mats[1..].iter().all(RatMatrix::is_zero)
    }

    /// Full row rank of `[A1 | ... | An]` and full column rank of the
    /// vertical stack of `A1, ..., An`.
    pub fn is_monic(&self) -> bool {
        let d = self.dim();
        if self.nvars() == 0 {
            return false;
        }
        let mut h = self.mats[1].clone();
        let mut v = self.mats[1].clone();
        for m in &self.mats[2..] {
            h = h.hcat(m).expect("square blocks");
            v = v.vcat(m).expect("square blocks");
        }
        h.rank() == d && v.rank() == d
    }

    /// A principal block as a linear matrix.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Vec<RatMatrix> {
        self.mats.iter().map(|m| m.block(r0, c0, rows, cols)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("linmat d={} n={} field=Q\n", self.dim(), self.nvars());
        write_blocks(&mut s, &self.mats);
        s
    }

    pub fn from_text(text: &str) -> Result<LinearMatrix> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (d, n) = parse_dims(header, "linmat", ln)?;
        let mats = read_blocks(&mut lines, d, n + 1, ln)?;
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content"));
        }
        LinearMatrix::new(mats)
    }
}

impl std::fmt::Display for LinearMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Invertible `P`, `Q` and linear factors with `F1 · ... · Fr = P · L · Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationCert {
    pub p: RatMatrix,
    pub q: RatMatrix,
    pub factors: Vec<LinearMatrix>,
    /// Marks factors that are invertible over the free algebra (unipotent
    /// block-triangular ones).
    pub units: Vec<bool>,
}

impl FactorizationCert {
    pub fn trivial(l: &LinearMatrix) -> Self {
        let d = l.dim();
        FactorizationCert {
            p: RatMatrix::identity(d),
            q: RatMatrix::identity(d),
            factors: vec![l.clone()],
            units: vec![false],
        }
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// Number of factors that are not units.
    pub fn proper_factor_count(&self) -> usize {
        self.units.iter().filter(|u| !**u).count()
    }

    /// `(F, G)` with `F · G = L`: the last factor times `Q^-1` on the right,
    /// `P^-1` times the others on the left.
    pub fn two_factor_split(&self) -> Result<(LinearMatrix, LinearMatrix)> {
        let Some((last, init)) = self.factors.split_last() else {
            return Err(Error::Precondition("certificate has no factors".into()));
        };
        if init.is_empty() {
            return Err(Error::Precondition("certificate has a single factor".into()));
        }
        let p_inv = self.p.inverse()?.ok_or(Error::Precondition("P is singular".into()))?;
        let q_inv = self.q.inverse()?.ok_or(Error::Precondition("Q is singular".into()))?;
        let d = self.dim();
        let mut f = init[0].transform(&p_inv, &RatMatrix::identity(d))?;
        for g in &init[1..] {
            f = f.mul_linear(g)?;
        }
        let g = last.transform(&RatMatrix::identity(d), &q_inv)?;
        Ok((f, g))
    }

    pub fn to_text(&self) -> String {
        let n = self.factors.first().map_or(0, LinearMatrix::nvars);
        let mut s = format!("cert d={} n={} field=Q\n", self.dim(), n);
        s.push_str("P\n");
        write_matrix(&mut s, &self.p);
        s.push_str("Q\n");
        write_matrix(&mut s, &self.q);
        for (f, u) in self.factors.iter().zip(&self.units) {
            let _ = writeln!(s, "factor\nunit {u}");
            write_blocks(&mut s, f.coeffs());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<FactorizationCert> {
        let mut lines = content_lines(text).peekable();
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (d, n) = parse_dims(header, "cert", ln)?;
        let expect = |lines: &mut std::iter::Peekable<_>, word: &str| -> Result<usize> {
            match Iterator::next(lines) {
                Some((ln, l)) if l == word => Ok(ln),
                Some((ln, l)) => Err(Error::parse(ln, format!("expected `{word}`, found {l:?}"))),
                None => Err(Error::parse(0, format!("missing `{word}`"))),
            }
        };
        let ln = expect(&mut lines, "P")?;
        let p = read_blocks(&mut lines, d, 1, ln)?.remove(0);
        let ln = expect(&mut lines, "Q")?;
        let q = read_blocks(&mut lines, d, 1, ln)?.remove(0);
        let mut factors = Vec::new();
        let mut units = Vec::new();
        while lines.peek().is_some() {
            let ln = expect(&mut lines, "factor")?;
            let unit = match lines.next() {
                Some((_, "unit true")) => true,
                Some((_, "unit false")) => false,
                Some((ln, l)) => return Err(Error::parse(ln, format!("expected `unit true|false`, found {l:?}"))),
                None => return Err(Error::parse(ln, "missing unit flag")),
            };
            factors.push(LinearMatrix::new(read_blocks(&mut lines, d, n + 1, ln)?)?);
            units.push(unit);
        }
        Ok(FactorizationCert { p, q, factors, units })
    }
}

/// Exact check of a certificate against `L`.
pub fn verify_cert(cert: &FactorizationCert, l: &LinearMatrix) -> Result<bool> {
    let d = l.dim();
    if cert.p.rows() != d || cert.p.cols() != d || cert.q.rows() != d || cert.q.cols() != d {
        return Err(Error::DimensionMismatch("P or Q does not match L".into()));
    }
    if cert.units.len() != cert.factors.len() {
        return Err(Error::DimensionMismatch("one unit flag per factor".into()));
    }
    for f in &cert.factors {
        if f.dim() != d || f.nvars() != l.nvars() {
            return Err(Error::DimensionMismatch("factor shape does not match L".into()));
        }
    }
    if !cert.p.is_invertible() || !cert.q.is_invertible() {
        return Ok(false);
    }
    let target = l.transform(&cert.p, &cert.q)?.to_poly_matrix();
    let mut prod = LinearMatrix::new(
        std::iter::once(RatMatrix::identity(d))
            .chain((0..l.nvars()).map(|_| RatMatrix::zeros(d, d)))
            .collect(),
    )?
    .to_poly_matrix();
    for f in &cert.factors {
        prod = poly_matrix_mul(&prod, &f.to_poly_matrix())?;
    }
    Ok(prod == target)
}

pub fn poly_matrix_mul(a: &[Vec<NcPoly>], b: &[Vec<NcPoly>]) -> Result<Vec<Vec<NcPoly>>> {
    let inner = b.len();
    if a.iter().any(|r| r.len() != inner) {
        return Err(Error::DimensionMismatch("inner dimensions differ".into()));
    }
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = NcPoly::zero(row[0].field(), row[0].alphabet());
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&x.mul(&b[k][j])?)?;
                        }
                    }
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_dims(header: &str, kind: &str, ln: usize) -> Result<(usize, usize)> {
    let mut it = header.split_whitespace();
    if it.next() != Some(kind) {
        return Err(Error::parse(ln, format!("expected `{kind}` header")));
    }
    let (mut d, mut n, mut field) = (None, None, None);
    for kv in it {
        match kv.split_once('=') {
            Some(("d", v)) => d = v.parse::<usize>().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("field", v)) => field = Some(v),
            _ => return Err(Error::parse(ln, format!("unknown header field {kv:?}"))),
        }
    }
    match (d, n, field) {
        (Some(d), Some(n), Some("Q")) if d > 0 => Ok((d, n)),
        (_, _, Some(f)) if f != "Q" => Err(Error::parse(ln, "linear matrices are over Q only")),
        _ => Err(Error::parse(ln, "header needs d=<d> n=<n> field=Q")),
    }
}

fn read_blocks<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    d: usize,
    count: usize,
    header_ln: usize,
) -> Result<Vec<RatMatrix>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(header_ln, "truncated matrix block"))?;
            let row = line
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|_| Error::parse(ln, format!("bad rational {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != d {
                return Err(Error::parse(ln, format!("expected {d} entries, found {}", row.len())));
            }
            rows.push(row);
        }
        out.push(RatMatrix::from_rows(rows)?);
    }
    Ok(out)
}

fn write_matrix(s: &mut String, m: &RatMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
}

fn write_blocks(s: &mut String, mats: &[RatMatrix]) {
    for (i, m) in mats.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        write_matrix(s, m);
    }
}

/// Embeds a `k x k` linear matrix into the `d x d` identity at offset `at`.
pub(crate) fn embed_block(block: &[RatMatrix], d: usize, at: usize) -> LinearMatrix {
    let mats = block
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut m = if i == 0 { RatMatrix::identity(d) } else { RatMatrix::zeros(d, d) };
            m.set_block(at, at, b);
            m
        })
        .collect();
    LinearMatrix { mats }
}

/// `[[I, 0], [D, I]]` with `D` placed at `(r0, c0)`; `None` when `D = 0`.
pub(crate) fn unipotent(d: usize, r0: usize, c0: usize, dblock: &[RatMatrix]) -> Option<LinearMatrix> {
    if dblock.iter().all(RatMatrix::is_zero) {
        return None;
    }
    let mats = dblock
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut m = if i == 0 { RatMatrix::identity(d) } else { RatMatrix::zeros(d, d) };
            if i > 0 {
                m.set_block(r0, c0, b);
            }
            m
        })
        .collect();
    Some(LinearMatrix { mats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(blocks: &[&[&[i64]]]) -> LinearMatrix {
        LinearMatrix::from_i64(blocks).unwrap()
    }

    #[test]
    fn identity_cert_verifies() {
        let l = lm(&[&[&[1, 0], &[0, 1]], &[&[1, 2], &[0, 1]]]);
        assert!(verify_cert(&FactorizationCert::trivial(&l), &l).unwrap());
    }

    #[test]
    fn swapped_factors_fail() {
        // (1 + x)(1 + y) vs (1 + y)(1 + x) as 1x1 linear matrices do not match
        let fx = lm(&[&[&[1]], &[&[1]], &[&[0]]]);
        let fy = lm(&[&[&[1]], &[&[0]], &[&[1]]]);
        let l = lm(&[&[&[1]], &[&[1]], &[&[1]]]);
        let cert = FactorizationCert {
            p: RatMatrix::identity(1),
            q: RatMatrix::identity(1),
            factors: vec![fx.clone(), fy.clone()],
            units: vec![false, false],
        };
        // product has an xy term, L does not
        assert!(!verify_cert(&cert, &l).unwrap());
        let sw = FactorizationCert {
            factors: vec![fy, fx],
            ..cert
        };
        assert!(!verify_cert(&sw, &l).unwrap());
    }

    #[test]
    fn monicity() {
        assert!(!lm(&[&[&[1, 0], &[0, 1]], &[&[0, 0], &[0, 0]]]).is_monic());
        assert!(!lm(&[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]]]).is_monic());
        assert!(lm(&[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]]).is_monic());
    }

    #[test]
    fn text_round_trips() {
        let l = lm(&[&[&[1, 0], &[0, 1]], &[&[1, -2], &[0, 3]], &[&[0, 0], &[5, 0]]]);
        let text = l.to_text();
        assert_eq!(text, "linmat d=2 n=2 field=Q\n1 0\n0 1\n\n1 -2\n0 3\n\n0 0\n5 0\n");
        assert_eq!(LinearMatrix::from_text(&text).unwrap(), l);
        let cert = FactorizationCert::trivial(&l);
        assert_eq!(FactorizationCert::from_text(&cert.to_text()).unwrap(), cert);
        assert!(LinearMatrix::from_text("linmat d=2 n=1 field=Q\n1 0\n0 1\n1 0\n").is_err());
        assert!(LinearMatrix::from_text("linmat d=1 n=0 field=F2\n1\n").is_err());
    }

    #[test]
    fn linear_products() {
        let a = lm(&[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]]]);
        let b = lm(&[&[&[1, 0], &[0, 1]], &[&[0, 0], &[0, 1]]]);
        let ab = a.mul_linear(&b).unwrap();
        assert_eq!(ab, lm(&[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]]));
        assert!(a.mul_linear(&a).is_err());
    }
}
