use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{Field, FieldElem, FieldMatrix};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, NcPoly};

use super::{Abp, Circuit};

/// Number of random matrix points used by [`equal_whp`].
pub const IDENTITY_TEST_TRIALS: usize = 10;

/// One square matrix per variable, all of the same size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixAssignment {
    field: Field,
    dim: usize,
    mats: Vec<FieldMatrix>,
}

impl MatrixAssignment {
    pub fn new(field: Field, mats: Vec<FieldMatrix>) -> Result<Self> {
        let dim = mats.first().map_or(1, FieldMatrix::rows);
        for m in &mats {
            if m.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), m.field().to_string()));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "expected {dim}x{dim}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(MatrixAssignment { field, dim, mats })
    }

    /// Independent uniform entries: over Q from `{-3, ..., 3}`, over F_p from the whole field.
    pub fn random<R: Rng>(field: Field, nvars: usize, dim: usize, rng: &mut R) -> Self {
        let mats = (0..nvars)
            .map(|_| {
                let rows = (0..dim)
                    .map(|_| (0..dim).map(|_| random_elem(field, rng)).collect())
                    .collect();
                FieldMatrix::from_rows(field, rows).expect("rows are uniform")
            })
            .collect();
        MatrixAssignment { field, dim, mats }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrix(&self, v: u8) -> &FieldMatrix {
        &self.mats[v as usize]
    }

    pub fn matrices(&self) -> &[FieldMatrix] {
        &self.mats
    }

    pub fn check_covers(&self, field: Field, alphabet: Alphabet) -> Result<()> {
        if self.field != field {
            return Err(Error::FieldMismatch(field.to_string(), self.field.to_string()));
        }
        if self.mats.len() < alphabet.size() {
            return Err(Error::VariableOutOfRange(format!(
                "assignment has {} matrices, alphabet {alphabet} needs {}",
                self.mats.len(),
                alphabet.size()
            )));
        }
        Ok(())
    }
}

fn random_elem<R: Rng>(field: Field, rng: &mut R) -> FieldElem {
    match field {
        Field::Rational => field.from_i64(rng.gen_range(-3..=3)),
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
    }
}

/// Anything that can be evaluated at matrix points.
pub trait BlackBox {
    fn field(&self) -> Field;
    fn alphabet(&self) -> Alphabet;
    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix>;
}

impl BlackBox for Circuit {
    fn field(&self) -> Field {
        Circuit::field(self)
    }
    fn alphabet(&self) -> Alphabet {
        Circuit::alphabet(self)
    }
    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        self.evaluate(a)
    }
}

impl BlackBox for Abp {
    fn field(&self) -> Field {
        Abp::field(self)
    }
    fn alphabet(&self) -> Alphabet {
        Abp::alphabet(self)
    }
    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        self.evaluate(a)
    }
}

impl BlackBox for NcPoly {
    fn field(&self) -> Field {
        NcPoly::field(self)
    }
    fn alphabet(&self) -> Alphabet {
        NcPoly::alphabet(self)
    }
    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        a.check_covers(NcPoly::field(self), NcPoly::alphabet(self))?;
        let f = NcPoly::field(self);
        let mut acc = FieldMatrix::zeros(f, a.dim(), a.dim());
        for (w, c) in self.terms() {
            let mut m = FieldMatrix::scalar(f, a.dim(), c);
            for &v in w.letters() {
                m = m.mul(a.matrix(v))?;
            }
            acc = acc.add(&m)?;
        }
        Ok(acc)
    }
}

/// A black box backed by a closure.
pub struct FnBlackBox<F> {
    field: Field,
    alphabet: Alphabet,
    f: F,
}

impl<F> FnBlackBox<F>
where
    F: Fn(&MatrixAssignment) -> Result<FieldMatrix>,
{
    pub fn new(field: Field, alphabet: Alphabet, f: F) -> Self {
        FnBlackBox { field, alphabet, f }
    }
}

impl<F> BlackBox for FnBlackBox<F>
where
    F: Fn(&MatrixAssignment) -> Result<FieldMatrix>,
{
    fn field(&self) -> Field {
        self.field
    }
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }
    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        (self.f)(a)
    }
}

/// Randomized identity test for polynomials of degree at most
/// `degree_bound`: compares both sides at [`IDENTITY_TEST_TRIALS`] random
/// matrix points of size `⌊d/2⌋ + 1`. A `false` answer is always correct.
pub fn equal_whp(a: &dyn BlackBox, b: &dyn BlackBox, degree_bound: usize, seed: u64) -> Result<bool> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().to_string(), b.field().to_string()));
    }
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(a.alphabet().to_string(), b.alphabet().to_string()));
    }
    let dim = degree_bound / 2 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..IDENTITY_TEST_TRIALS {
        let asg = MatrixAssignment::random(a.field(), a.alphabet().size(), dim, &mut rng);
        if a.eval(&asg)? != b.eval(&asg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn p(s: &str) -> NcPoly {
        NcPoly::parse_inline(Q, Alphabet::Bivariate, s).unwrap()
    }

    #[test]
    fn distinguishes_noncommuting_words() {
        // xy and yx agree on every commutative point
        assert!(!equal_whp(&p("xy"), &p("yx"), 2, 1).unwrap());
        assert!(equal_whp(&p("xy + yx"), &p("yx + xy"), 2, 1).unwrap());
    }

    #[test]
    fn circuit_matches_its_expansion() {
        let f = p("xxy - 2*yx + 3");
        let c = Circuit::from_poly(&f);
        assert!(equal_whp(&c, &f, 3, 7).unwrap());
        assert!(!equal_whp(&c, &p("xxy - 2*yx + 4"), 3, 7).unwrap());
    }

    #[test]
    fn closure_black_box() {
        let f = p("xy");
        let bb = FnBlackBox::new(Q, Alphabet::Bivariate, |a: &MatrixAssignment| {
            a.matrix(0).mul(a.matrix(1))
        });
        assert!(equal_whp(&bb, &f, 2, 3).unwrap());
    }

    #[test]
    fn mismatches_are_errors() {
        let g = NcPoly::parse_inline(Field::prime(5).unwrap(), Alphabet::Bivariate, "x").unwrap();
        assert!(equal_whp(&p("x"), &g, 1, 0).is_err());
        let bad = MatrixAssignment::new(
            Q,
            vec![FieldMatrix::identity(Q, 2), FieldMatrix::identity(Q, 3)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn random_points_are_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let f = Field::prime(7).unwrap();
        assert_eq!(
            MatrixAssignment::random(f, 2, 3, &mut r1),
            MatrixAssignment::random(f, 2, 3, &mut r2)
        );
    }
}
