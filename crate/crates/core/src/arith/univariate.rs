use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::field::format_rational;

/// Dense univariate polynomial over the rationals, coefficients stored from
/// the constant term upwards with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// The monic polynomial with the given roots, listed with multiplicity.
    pub fn from_roots(roots: &[BigRational]) -> Self {
        let mut p = UniPoly::from_i64(&[1]);
        for r in roots {
            p = p.mul(&UniPoly::new(vec![-r.clone(), BigRational::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Quotient by `t - r`, assuming `r` is a root.
    fn deflate(&self, r: &BigRational) -> UniPoly {
        let n = self.coeffs.len();
        let mut q = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for i in (1..n).rev() {
            carry = &carry * r + &self.coeffs[i];
            q[i - 1] = carry.clone();
        }
        UniPoly::new(q)
    }

    /// Integer coefficients with content 1 and positive leading coefficient.
    pub fn primitive_integer_form(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("{}*t", format_rational(c)),
                _ => format!("{}*t^{i}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A rational root together with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub value: BigRational,
    pub multiplicity: usize,
}

/// Maximum degree handled by [`rational_roots`].
pub const MAX_ROOT_DEGREE: usize = 4;

/// All rational roots of `p` with multiplicity, in increasing order.
///
/// Candidates come from the rational-root theorem applied to the primitive
/// integer form; each is confirmed by exact substitution before deflating.
pub fn rational_roots(p: &UniPoly) -> Result<Vec<Root>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg > MAX_ROOT_DEGREE {
        return Err(Error::DegreeTooLarge(deg, MAX_ROOT_DEGREE));
    }
    let mut cur = p.clone();
    let mut roots = Vec::new();

    let zero_mult = cur.coeffs.iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        roots.push(Root {
            value: BigRational::zero(),
            multiplicity: zero_mult,
        });
        cur = UniPoly::new(cur.coeffs[zero_mult..].to_vec());
    }
    if cur.degree().unwrap_or(0) == 0 {
        return Ok(roots);
    }

    let ints = cur.primitive_integer_form();
    let constant = ints[0].abs();
    let leading = ints.last().unwrap().abs();
    let nums = divisors(&constant);
    let dens = divisors(&leading);
    let mut candidates: Vec<BigRational> = Vec::new();
    for a in &nums {
        for b in &dens {
            for s in [BigInt::one(), -BigInt::one()] {
                let c = BigRational::new(a * &s, b.clone());
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    candidates.sort();
    for c in candidates {
        let mut mult = 0;
        while cur.degree().unwrap_or(0) > 0 && cur.eval(&c).is_zero() {
            cur = cur.deflate(&c);
            mult += 1;
        }
        if mult > 0 {
            roots.push(Root {
                value: c,
                multiplicity: mult,
            });
        }
    }
    roots.sort_by(|a, b| a.value.cmp(&b.value));
    Ok(roots)
}

/// Positive divisors of a nonzero integer by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.abs();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            primes.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}
