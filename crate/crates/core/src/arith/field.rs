use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus accepted for prime fields.
pub const MAX_PRIME: u32 = (1 << 31) - 1;

/// The coefficient field: the rationals or a word-size prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::UnsupportedField(format!("Fp:{p}")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Rat(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => FieldElem::Mod(v.rem_euclid(p as i64) as u32, p),
        }
    }

    /// Embeds a rational; fails over `F_p` when the denominator vanishes mod p.
    pub fn from_rational(self, r: &BigRational) -> Result<FieldElem> {
        match self {
            Field::Rational => Ok(FieldElem::Rat(r.clone())),
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let num = r.numer().mod_floor(&m).to_u32().unwrap();
                let den = r.denom().mod_floor(&m).to_u32().unwrap();
                if den == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(FieldElem::Mod(mul_mod(num, inv_mod(den, p), p), p))
            }
        }
    }

    /// Parses a coefficient literal `p/q` or `p` into this field.
    pub fn parse_elem(self, s: &str) -> Result<FieldElem> {
        let r = parse_rational(s)?;
        self.from_rational(&r)
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(2) => write!(f, "F2"),
            Field::Prime(3) => write!(f, "F3"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        match s {
            "Q" => Ok(Field::Rational),
            "F2" => Ok(Field::Prime(2)),
            "F3" => Ok(Field::Prime(3)),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse::<u32>().ok())
                    .ok_or_else(|| Error::UnsupportedField(s.to_string()))?;
                Field::prime(p)
            }
        }
    }
}

/// Parses `p/q` or `p` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::parse(0, format!("bad rational literal {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `p/q` or `p`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A field element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rat(BigRational),
    /// Residue `value` modulo prime `p`, with `value < p`.
    Mod(u32, u32),
}

impl FieldElem {
    pub fn field(&self) -> Field {
        match self {
            FieldElem::Rat(_) => Field::Rational,
            FieldElem::Mod(_, p) => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rat(r) => r.is_zero(),
            FieldElem::Mod(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rat(r) => r.is_one(),
            FieldElem::Mod(v, _) => *v == 1,
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rat(r) => FieldElem::Rat(r.recip()),
            FieldElem::Mod(v, p) => FieldElem::Mod(inv_mod(*v, *p), *p),
        })
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self * &other.inv()?)
    }

    /// The rational value, if this is a rational element.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rat(r) => Some(r),
            FieldElem::Mod(..) => None,
        }
    }

    fn check(&self, other: &FieldElem) {
        if self.field() != other.field() {
            panic!("field mismatch: {} vs {}", self.field(), other.field());
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rat(r) => f.write_str(&format_rational(r)),
            FieldElem::Mod(v, _) => write!(f, "{v}"),
        }
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check(rhs);
        match (self, rhs) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a + b),
            (FieldElem::Mod(a, p), FieldElem::Mod(b, _)) => {
                FieldElem::Mod(((*a as u64 + *b as u64) % *p as u64) as u32, *p)
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check(rhs);
        match (self, rhs) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a * b),
            (FieldElem::Mod(a, p), FieldElem::Mod(b, _)) => FieldElem::Mod(mul_mod(*a, *b, *p), *p),
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rat(a) => FieldElem::Rat(-a),
            FieldElem::Mod(0, p) => FieldElem::Mod(0, *p),
            FieldElem::Mod(a, p) => FieldElem::Mod(p - a, *p),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
        impl $atr<&FieldElem> for FieldElem {
            fn $am(&mut self, rhs: &FieldElem) {
                *self = (&*self).$m(rhs);
            }
        }
        impl $atr for FieldElem {
            fn $am(&mut self, rhs: FieldElem) {
                *self = (&*self).$m(&rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);

fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u32().unwrap()
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// True iff `r` is the square of a rational (numerator and denominator
/// both perfect squares in canonical form).
pub fn is_rational_square(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    let sq = |n: &BigInt| {
        let s = n.sqrt();
        &s * &s == *n
    };
    sq(r.numer()) && sq(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::Rat(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn parse_and_render() {
        let f = Field::Rational;
        assert_eq!(f.parse_elem("6/-4").unwrap().to_string(), "-3/2");
        assert_eq!(f.parse_elem("7").unwrap().to_string(), "7");
        assert!(f.parse_elem("1/0").is_err());
        let f3 = Field::Prime(3);
        assert_eq!(f3.parse_elem("-1").unwrap().to_string(), "2");
        assert_eq!(f3.parse_elem("1/2").unwrap().to_string(), "2");
        assert!(f3.parse_elem("1/3").is_err());
    }

    #[test]
    fn field_names_round_trip() {
        for s in ["Q", "F2", "F3", "Fp:5", "Fp:2147483647"] {
            assert_eq!(s.parse::<Field>().unwrap().to_string(), s);
        }
        assert!("Fp:4".parse::<Field>().is_err());
        assert!("Fp:2147483648".parse::<Field>().is_err());
    }

    #[test]
    fn squares() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert!(is_rational_square(&r(9, 4)));
        assert!(is_rational_square(&r(0, 1)));
        assert!(!is_rational_square(&r(2, 1)));
        assert!(!is_rational_square(&r(-1, 1)));
        assert!(!is_rational_square(&r(4, 3)));
    }

    #[test]
    fn inverses() {
        assert_eq!(q(3, 7).inv().unwrap(), q(7, 3));
        assert!(q(0, 1).inv().is_err());
        let a = Field::Prime(5).from_i64(3);
        assert_eq!((&a * &a.inv().unwrap()).to_string(), "1");
    }

    fn elem(field: Field) -> impl Strategy<Value = FieldElem> {
        (-50i64..50, 1i64..20).prop_map(move |(n, d)| {
            field
                .from_rational(&BigRational::new(n.into(), d.into()))
                .unwrap_or_else(|_| field.from_i64(n))
        })
    }

    fn axioms(a: FieldElem, b: FieldElem, c: FieldElem) {
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&a + &(-&a), a.field().zero());
        if !a.is_zero() {
            assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in elem(Field::Rational), b in elem(Field::Rational), c in elem(Field::Rational)) {
            axioms(a, b, c);
        }

        #[test]
        fn prime_field_axioms(a in elem(Field::Prime(7)), b in elem(Field::Prime(7)), c in elem(Field::Prime(7))) {
            axioms(a, b, c);
        }
    }
}
