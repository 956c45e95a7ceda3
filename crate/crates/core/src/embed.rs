//! The embedding `φ(x_i) = v_i + bar(v_i)` of `F<x1..xn>` into `F<x, y>`,
//! applied to dense polynomials, circuits, ABPs and black boxes, plus its
//! dense inverse.

use crate::arith::{Field, FieldMatrix};
use crate::circuit::{Abp, AbpEdge, AffineForm, BlackBox, Circuit, CircuitBuilder, MatrixAssignment};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, NcPoly, Word};
use crate::words::{enumerate_words, is_dyck, WordMode, WordSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    words: WordSet,
    bars: Vec<Word>,
}

impl Embedding {
    pub fn new(words: WordSet) -> Self {
        let bars = words.words().iter().map(Word::bar).collect();
        Embedding { words, bars }
    }

    pub fn from_mode(n: usize, mode: WordMode) -> Result<Self> {
        Ok(Embedding::new(enumerate_words(n, mode)?))
    }

    /// Number of source variables.
    pub fn nvars(&self) -> usize {
        self.words.len()
    }

    pub fn source_alphabet(&self) -> Alphabet {
        Alphabet::Indexed(self.nvars())
    }

    pub fn words(&self) -> &WordSet {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        self.words.get(i)
    }

    pub fn bar(&self, i: usize) -> &Word {
        &self.bars[i]
    }

    /// `φ(x_i)` as a dense polynomial.
    pub fn image_of_var(&self, field: Field, i: usize) -> NcPoly {
        let mut p = NcPoly::zero(field, Alphabet::Bivariate);
        p.add_term(self.word(i).clone(), field.one());
        p.add_term(self.bar(i).clone(), field.one());
        p
    }

    /// The formula `F_i` computing `v_i + bar(v_i)`.
    pub fn formula(&self, field: Field, i: usize) -> Circuit {
        let mut b = CircuitBuilder::new(field, Alphabet::Bivariate);
        let v = b.word(self.word(i));
        let w = b.word(self.bar(i));
        let out = b.add(v, w);
        b.finish(out)
    }

    fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        match alphabet {
            Alphabet::Indexed(m) if m <= self.nvars() => Ok(()),
            Alphabet::Indexed(m) => Err(Error::VariableOutOfRange(format!(
                "x{m} with only {} embedding words",
                self.nvars()
            ))),
            Alphabet::Bivariate => Err(Error::AlphabetMismatch(
                self.source_alphabet().to_string(),
                alphabet.to_string(),
            )),
        }
    }

    pub fn phi_poly(&self, f: &NcPoly) -> Result<NcPoly> {
        self.check_alphabet(f.alphabet())?;
        let field = f.field();
        let mut out = NcPoly::zero(field, Alphabet::Bivariate);
        for (m, c) in f.terms() {
            // monomials of φ(m) are all distinct and disjoint from other φ(m')
            let mut words = vec![Word::empty()];
            for &v in m.letters() {
                let (a, b) = (self.word(v as usize), self.bar(v as usize));
                words = words
                    .iter()
                    .flat_map(|w| [w.concat(a), w.concat(b)])
                    .collect();
            }
            for w in words {
                out.add_term(w, c.clone());
            }
        }
        Ok(out)
    }

    pub fn phi_circuit(&self, c: &Circuit) -> Result<Circuit> {
        self.check_alphabet(c.alphabet())?;
        let map: Vec<Circuit> = (0..self.nvars()).map(|i| self.formula(c.field(), i)).collect();
        c.substitute(&map)
    }

    /// Replaces every edge layer by `L` layers, `L` the longest word length.
    /// Each label term becomes its own chain; shorter words are padded with
    /// unit edges.
    pub fn phi_abp(&self, p: &Abp) -> Result<Abp> {
        self.check_alphabet(p.alphabet())?;
        let field = p.field();
        let depth = self.words.max_len();
        let mut widths = vec![1usize];
        let mut layers: Vec<Vec<AbpEdge>> = Vec::new();
        for (k, layer) in p.layers().iter().enumerate() {
            let base = layers.len();
            layers.extend((0..depth).map(|_| Vec::new()));
            let inner_start = widths.len();
            widths.extend(std::iter::repeat_n(0, depth - 1));
            widths.push(p.widths()[k + 1]);
            let mut chain = |from: usize, to: usize, first: AffineForm, rest: &[AffineForm]| {
                let mut prev = from;
                let labels = std::iter::once(first).chain(rest.iter().cloned());
                for (j, label) in labels.enumerate() {
                    let next = if j + 1 == depth {
                        to
                    } else {
                        let w = &mut widths[inner_start + j];
                        *w += 1;
                        *w - 1
                    };
                    layers[base + j].push(AbpEdge { from: prev, to: next, label });
                    prev = next;
                }
            };
            let one = AffineForm::constant(field.one());
            for e in layer {
                let c0 = e.label.constant_term();
                if !c0.is_zero() {
                    chain(e.from, e.to, AffineForm::constant(c0.clone()), &vec![one.clone(); depth - 1]);
                }
                for (v, c) in e.label.coeffs() {
                    for w in [self.word(v as usize), self.bar(v as usize)] {
                        let first = AffineForm::var(field, w.letters()[0], c.clone());
                        let rest: Vec<AffineForm> = w.letters()[1..]
                            .iter()
                            .map(|&l| AffineForm::var(field, l, field.one()))
                            .chain(std::iter::repeat_n(one.clone(), depth - w.len()))
                            .collect();
                        chain(e.from, e.to, first, &rest);
                    }
                }
            }
        }
        Abp::new(field, Alphabet::Bivariate, widths, layers)
    }

    /// Black box for `φ(f)` given one for `f`.
    pub fn phi_blackbox<'a>(&'a self, bb: &'a dyn BlackBox) -> Result<PhiBlackBox<'a>> {
        self.check_alphabet(bb.alphabet())?;
        Ok(PhiBlackBox { emb: self, inner: bb })
    }

    /// The preimage of `g` under `φ`, if there is one.
    pub fn phi_inverse_poly(&self, g: &NcPoly) -> Result<Option<NcPoly>> {
        if g.alphabet() != Alphabet::Bivariate {
            return Err(Error::AlphabetMismatch(Alphabet::Bivariate.to_string(), g.alphabet().to_string()));
        }
        let mut f = NcPoly::zero(g.field(), self.source_alphabet());
        for (w, c) in g.terms() {
            if let Some(m) = self.parse(w) {
                f.add_term(m, c.clone());
            }
        }
        Ok((self.phi_poly(&f)? == *g).then_some(f))
    }

    /// Splits `w` as `v_{i1} ... v_{it}`; the words are prefix-free so the
    /// greedy parse is the only one.
    pub fn parse(&self, w: &Word) -> Option<Word> {
        let letters = w.letters();
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < letters.len() {
            let i = self
                .words
                .words()
                .iter()
                .position(|v| letters[pos..].starts_with(v.letters()))?;
            out.push(i as u8);
            pos += self.word(i).len();
        }
        Some(Word(out))
    }
}

pub struct PhiBlackBox<'a> {
    emb: &'a Embedding,
    inner: &'a dyn BlackBox,
}

fn word_matrix(w: &Word, a: &MatrixAssignment) -> Result<FieldMatrix> {
    let mut m = FieldMatrix::identity(a.field(), a.dim());
    for &l in w.letters() {
        m = m.mul(a.matrix(l))?;
    }
    Ok(m)
}

impl BlackBox for PhiBlackBox<'_> {
    fn field(&self) -> Field {
        self.inner.field()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Bivariate
    }

    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        a.check_covers(self.field(), Alphabet::Bivariate)?;
        let mats = (0..self.emb.nvars())
            .map(|i| word_matrix(self.emb.word(i), a)?.add(&word_matrix(self.emb.bar(i), a)?))
            .collect::<Result<Vec<_>>>()?;
        self.inner.eval(&MatrixAssignment::new(self.field(), mats)?)
    }
}

/// The substitution `x_i -> x y^i`, which is not factorization-preserving.
pub fn naive_substitution(f: &NcPoly) -> NcPoly {
    let mut out = NcPoly::zero(f.field(), Alphabet::Bivariate);
    for (m, c) in f.terms() {
        let mut w = Vec::new();
        for &v in m.letters() {
            w.push(Alphabet::X);
            w.extend(std::iter::repeat_n(Alphabet::Y, v as usize + 1));
        }
        out.add_term(Word(w), c.clone());
    }
    out
}

/// Writes a balanced `f` as `g + h` with `g` in the image of the embedding
/// over all minimally balanced words and `h` zero or with a leading monomial
/// that is not a product of minimally balanced words.
pub fn decompose_balanced(f: &NcPoly) -> Result<(NcPoly, NcPoly)> {
    if f.alphabet() != Alphabet::Bivariate {
        return Err(Error::AlphabetMismatch(Alphabet::Bivariate.to_string(), f.alphabet().to_string()));
    }
    if let Some(w) = f.support().find(|w| w.imbalance() != 0) {
        return Err(Error::Precondition(format!("monomial {} is not balanced", w.to_xy_string())));
    }
    let field = f.field();
    let mut cur = f.clone();
    while let Ok(lm) = cur.leading_monomial() {
        // products of minimally balanced words are exactly the Dyck words
        if !is_dyck(lm) {
            break;
        }
        let alpha = cur.leading_coeff()?.clone();
        let mut term = NcPoly::constant(field, Alphabet::Bivariate, alpha);
        for u in split_prime(lm) {
            let mut s = NcPoly::zero(field, Alphabet::Bivariate);
            s.add_term(u.bar(), field.one());
            s.add_term(u, field.one());
            term = term.mul(&s)?;
        }
        cur = cur.sub(&term)?;
    }
    let g = f.sub(&cur)?;
    Ok((g, cur))
}

/// Splits a Dyck word into its minimally balanced factors.
fn split_prime(w: &Word) -> Vec<Word> {
    let mut out = Vec::new();
    let (mut start, mut level) = (0usize, 0i64);
    for (i, &c) in w.letters().iter().enumerate() {
        level += if c == Alphabet::X { 1 } else { -1 };
        if level == 0 {
            out.push(w.slice(start, i + 1));
            start = i + 1;
        }
    }
    out
}
