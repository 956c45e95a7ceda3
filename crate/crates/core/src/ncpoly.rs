//! Sparse polynomials in the free algebra over a finite alphabet.
//!
//! Words are ordered by degree first; at equal degree the word with the
//! smaller variable index at the leftmost differing position is larger. On
//! the bivariate alphabet `{x, y}` (indices 0 and 1) this is the order in
//! which `x` beats `y`, so `xy ≻ yx` and `yy ≻ x`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::arith::{Field, FieldElem};
use crate::error::{Error, Result};

/// Variable alphabet of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `{x, y}`, with `x = 0` and `y = 1`.
    Bivariate,
    /// `{x1, .., xn}`, with `xk = k - 1`.
    Indexed(usize),
}

impl Alphabet {
    pub const X: u8 = 0;
    pub const Y: u8 = 1;

    pub fn size(self) -> usize {
        match self {
            Alphabet::Bivariate => 2,
            Alphabet::Indexed(n) => n,
        }
    }

    pub fn var_name(self, v: u8) -> String {
        match self {
            Alphabet::Bivariate => if v == 0 { "x" } else { "y" }.to_string(),
            Alphabet::Indexed(_) => format!("x{}", v as usize + 1),
        }
    }

    pub fn parse_var(self, s: &str) -> Result<u8> {
        let idx = match self {
            Alphabet::Bivariate => match s {
                "x" => Some(0),
                "y" => Some(1),
                _ => None,
            },
            Alphabet::Indexed(n) => s
                .strip_prefix('x')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1 && k <= n)
                .map(|k| k - 1),
        };
        idx.map(|i| i as u8)
            .ok_or_else(|| Error::VariableOutOfRange(s.to_string()))
    }

    pub fn parse_word(self, s: &str) -> Result<Word> {
        if s == "1" {
            return Ok(Word::empty());
        }
        match self {
            Alphabet::Bivariate => s
                .chars()
                .map(|c| self.parse_var(&c.to_string()))
                .collect::<Result<Vec<u8>>>()
                .map(Word),
            Alphabet::Indexed(_) => s
                .split('.')
                .map(|t| self.parse_var(t))
                .collect::<Result<Vec<u8>>>()
                .map(Word),
        }
    }

    pub fn format_word(self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let names: Vec<String> = w.0.iter().map(|&v| self.var_name(v)).collect();
        match self {
            Alphabet::Bivariate => names.concat(),
            Alphabet::Indexed(_) => names.join("."),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Bivariate => write!(f, "xy"),
            Alphabet::Indexed(n) => write!(f, "x1..x{n}"),
        }
    }
}

impl FromStr for Alphabet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Alphabet> {
        if s == "xy" {
            return Ok(Alphabet::Bivariate);
        }
        s.strip_prefix("x1..x")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| (1..=255).contains(&n))
            .map(Alphabet::Indexed)
            .ok_or_else(|| Error::parse(0, format!("bad alphabet {s:?}")))
    }
}

/// A monomial: a sequence of variable indices. The empty word is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(v: u8) -> Self {
        Word(vec![v])
    }

    /// Parses a bivariate word such as `xxyy` (or `1`).
    pub fn xy(s: &str) -> Self {
        Alphabet::Bivariate.parse_word(s).expect("bivariate word")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn contains_subword(&self, sub: &Word) -> bool {
        sub.is_empty() || self.0.windows(sub.len()).any(|w| w == sub.0.as_slice())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// `#x - #y` of a bivariate word.
    pub fn imbalance(&self) -> i64 {
        self.0
            .iter()
            .map(|&c| if c == Alphabet::X { 1 } else { -1 })
            .sum()
    }

    /// Swaps `x` and `y` letterwise.
    pub fn bar(&self) -> Word {
        Word(self.0.iter().map(|&c| 1 - c).collect())
    }

    pub fn to_xy_string(&self) -> String {
        Alphabet::Bivariate.format_word(self)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial `Σ c_w w` with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    field: Field,
    alphabet: Alphabet,
    terms: BTreeMap<Word, FieldElem>,
}

impl NcPoly {
    pub fn zero(field: Field, alphabet: Alphabet) -> Self {
        NcPoly {
            field,
            alphabet,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, alphabet: Alphabet, c: FieldElem) -> Self {
        NcPoly::monomial(field, alphabet, Word::empty(), c)
    }

    pub fn one(field: Field, alphabet: Alphabet) -> Self {
        NcPoly::constant(field, alphabet, field.one())
    }

    pub fn var(field: Field, alphabet: Alphabet, v: u8) -> Self {
        NcPoly::monomial(field, alphabet, Word::letter(v), field.one())
    }

    pub fn monomial(field: Field, alphabet: Alphabet, w: Word, c: FieldElem) -> Self {
        let mut p = NcPoly::zero(field, alphabet);
        p.add_term(w, c);
        p
    }

    /// Builds a polynomial from `(coefficient, word)` pairs; repeated words are summed.
    pub fn from_terms(
        field: Field,
        alphabet: Alphabet,
        terms: impl IntoIterator<Item = (FieldElem, Word)>,
    ) -> Self {
        let mut p = NcPoly::zero(field, alphabet);
        for (c, w) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Parses an inline bivariate expression such as `1 + xy - 2*yx` over `field`.
    pub fn parse_inline(field: Field, alphabet: Alphabet, s: &str) -> Result<Self> {
        let mut p = NcPoly::zero(field, alphabet);
        let normalized = s.replace('-', "+-");
        for tok in normalized.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (coeff, word) = match tok.split_once('*') {
                Some((c, w)) => (field.parse_elem(&c.replace(char::is_whitespace, ""))?, alphabet.parse_word(w.trim())?),
                None => {
                    let (neg, body) = match tok.strip_prefix('-') {
                        Some(b) => (true, b.trim()),
                        None => (false, tok),
                    };
                    let (c, w) = if body.chars().next().is_some_and(|c| c.is_ascii_digit())
                        && body != "1"
                    {
                        (field.parse_elem(body)?, Word::empty())
                    } else {
                        (field.one(), alphabet.parse_word(body)?)
                    };
                    (if neg { -c } else { c }, w)
                }
            };
            p.add_term(word, coeff);
        }
        Ok(p)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &FieldElem)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl DoubleEndedIterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &Word) -> FieldElem {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree, or `None` (standing for −∞) for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    /// True if every monomial has degree 0.
    pub fn is_constant(&self) -> bool {
        self.degree().unwrap_or(0) == 0
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Word::empty())
    }

    pub fn add_term(&mut self, w: Word, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(old) => {
                *old += &c;
                if old.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    fn check_compatible(&self, other: &NcPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.to_string(),
                other.alphabet.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(&-self.field.one())
    }

    pub fn scale(&self, c: &FieldElem) -> NcPoly {
        let mut out = NcPoly::zero(self.field, self.alphabet);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect();
        out
    }

    /// Convolution product `fg(m) = Σ_{m1 m2 = m} f(m1) g(m2)`.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_compatible(other)?;
        let mut out = NcPoly::zero(self.field, self.alphabet);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// `self · (c w)`.
    pub fn mul_monomial_right(&self, w: &Word, c: &FieldElem) -> NcPoly {
        let mut out = NcPoly::zero(self.field, self.alphabet);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(u, a)| (u.concat(w), a * c)).collect();
        out
    }

    pub fn pow(&self, k: usize) -> Result<NcPoly> {
        let mut out = NcPoly::one(self.field, self.alphabet);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// The largest monomial of the support.
    pub fn leading_monomial(&self) -> Result<&Word> {
        self.terms.keys().next_back().ok_or(Error::ZeroPolynomial)
    }

    pub fn leading_coeff(&self) -> Result<&FieldElem> {
        self.terms.values().next_back().ok_or(Error::ZeroPolynomial)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_ok_and(FieldElem::is_one)
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Result<NcPoly> {
        let lc = self.leading_coeff()?.inv()?;
        Ok(self.scale(&lc))
    }

    /// The degree-`d` homogeneous part.
    pub fn homogeneous_part(&self, d: usize) -> NcPoly {
        let mut out = NcPoly::zero(self.field, self.alphabet);
        out.terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() == d)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        out
    }

    /// Drops all terms of degree greater than `d`.
    pub fn truncate(&self, d: usize) -> NcPoly {
        let mut out = NcPoly::zero(self.field, self.alphabet);
        out.terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() <= d)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        out
    }

    /// Exact left division: the unique `h` with `self = g · h`, if any.
    pub fn left_divide(&self, g: &NcPoly) -> Result<Option<NcPoly>> {
        self.check_compatible(g)?;
        let lm_g = g.leading_monomial()?.clone();
        let lc_g_inv = g.leading_coeff()?.inv()?;
        let mut cur = self.clone();
        let mut h = NcPoly::zero(self.field, self.alphabet);
        while let Some((lm, lc)) = cur.terms.iter().next_back() {
            if !lm_g.is_prefix_of(lm) {
                return Ok(None);
            }
            let suffix = lm.slice(lm_g.len(), lm.len());
            let c = lc * &lc_g_inv;
            cur = cur.sub(&g.mul_monomial_right(&suffix, &c))?;
            h.add_term(suffix, c);
        }
        Ok(Some(h))
    }

    /// Same polynomial viewed over another alphabet (checked for range).
    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<NcPoly> {
        for w in self.terms.keys() {
            if let Some(&v) = w.0.iter().find(|&&v| v as usize >= alphabet.size()) {
                return Err(Error::VariableOutOfRange(self.alphabet.var_name(v)));
            }
        }
        Ok(NcPoly {
            field: self.field,
            alphabet,
            terms: self.terms.clone(),
        })
    }

    /// Canonical text form: header line, then one `<coeff> <word>` line per
    /// term in increasing word order.
    pub fn to_text(&self) -> String {
        let mut s = format!("ncpoly field={} alphabet={}\n", self.field, self.alphabet);
        for (w, c) in &self.terms {
            s.push_str(&format!("{} {}\n", c, self.alphabet.format_word(w)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<NcPoly> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (field, alphabet) = parse_header(header, "ncpoly", ln)?;
        let mut p = NcPoly::zero(field, alphabet);
        for (ln, line) in lines {
            let (c, w) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(ln, "expected `<coeff> <word>`"))?;
            let c = field.parse_elem(c).map_err(|e| relocate(e, ln))?;
            let w = alphabet.parse_word(w.trim()).map_err(|e| relocate(e, ln))?;
            p.add_term(w, c);
        }
        Ok(p)
    }
}

/// Parses `<kind> field=<F> alphabet=<A>`.
pub(crate) fn parse_header(line: &str, kind: &str, ln: usize) -> Result<(Field, Alphabet)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(kind) {
        return Err(Error::parse(ln, format!("expected `{kind}` header")));
    }
    let mut field = None;
    let mut alphabet = None;
    for kv in parts {
        match kv.split_once('=') {
            Some(("field", v)) => field = Some(v.parse::<Field>().map_err(|e| relocate(e, ln))?),
            Some(("alphabet", v)) => alphabet = Some(v.parse::<Alphabet>().map_err(|e| relocate(e, ln))?),
            _ => return Err(Error::parse(ln, format!("unexpected header entry {kv:?}"))),
        }
    }
    match (field, alphabet) {
        (Some(f), Some(a)) => Ok((f, a)),
        _ => Err(Error::parse(ln, "header needs field= and alphabet=")),
    }
}

/// Turns any error raised while reading line `ln` into a parse error there.
pub(crate) fn relocate(e: Error, ln: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::parse(ln, msg),
        other => Error::parse(ln, other.to_string()),
    }
}

impl fmt::Display for NcPoly {
    /// Inline rendering, leading term first, e.g. `xyx + x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(w, c)| {
                let word = self.alphabet.format_word(w);
                if w.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    word
                } else {
                    format!("{c}*{word}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;
    const F2: Field = Field::Prime(2);

    fn xy(field: Field, s: &str) -> NcPoly {
        NcPoly::parse_inline(field, Alphabet::Bivariate, s).unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(
            xy(Q, "x + y").mul(&xy(Q, "x - y")).unwrap(),
            xy(Q, "xx - xy + yx - yy")
        );
        let f = xy(Q, "2*xy + 3");
        assert_eq!(f.mul(&NcPoly::one(Q, Alphabet::Bivariate)).unwrap(), f);
        assert_eq!(xy(Q, "x").mul(&xy(Q, "1 + yx")).unwrap(), xy(Q, "x + xyx"));
        assert!(xy(Q, "x").mul(&xy(F2, "x")).is_err());
    }

    #[test]
    fn leading_monomial_examples() {
        assert_eq!(xy(Q, "xy + yx").leading_monomial().unwrap(), &Word::xy("xy"));
        assert_eq!(xy(Q, "x + yy").leading_monomial().unwrap(), &Word::xy("yy"));
        assert_eq!(xy(Q, "xxyy + xyxy").leading_monomial().unwrap(), &Word::xy("xxyy"));
        assert_eq!(NcPoly::zero(Q, Alphabet::Bivariate).leading_monomial(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn imbalance_and_bar() {
        assert_eq!(Word::xy("xxy").imbalance(), 1);
        assert_eq!(Word::empty().imbalance(), 0);
        assert_eq!(Word::xy("xyxy").imbalance(), 0);
        assert_eq!(Word::xy("xy").bar(), Word::xy("yx"));
        assert_eq!(Word::xy("xxyy").bar(), Word::xy("yyxx"));
        assert_eq!(Word::empty().bar(), Word::empty());
    }

    #[test]
    fn left_divide_examples() {
        let f = xy(Q, "x + xyx");
        assert_eq!(f.left_divide(&xy(Q, "x")).unwrap(), Some(xy(Q, "1 + yx")));
        assert_eq!(f.left_divide(&xy(Q, "1 + xy")).unwrap(), Some(xy(Q, "x")));
        assert_eq!(xy(Q, "xy").left_divide(&xy(Q, "yx")).unwrap(), None);
        assert_eq!(
            f.left_divide(&NcPoly::zero(Q, Alphabet::Bivariate)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn zero_degree_marker() {
        assert_eq!(NcPoly::zero(Q, Alphabet::Bivariate).degree(), None);
        assert_eq!(NcPoly::one(Q, Alphabet::Bivariate).degree(), Some(0));
    }

    #[test]
    fn text_format_is_canonical() {
        let f = xy(Q, "xyx + 1/2*x - 3 + yy");
        let text = f.to_text();
        assert_eq!(text, "ncpoly field=Q alphabet=xy\n-3 1\n1/2 x\n1 yy\n1 xyx\n");
        assert_eq!(NcPoly::from_text(&text).unwrap(), f);

        let a = Alphabet::Indexed(5);
        let g = NcPoly::from_terms(
            F2,
            a,
            [
                (F2.one(), Word(vec![2, 0])),
                (F2.one(), Word(vec![3, 1])),
            ],
        );
        let text = g.to_text();
        assert_eq!(text, "ncpoly field=F2 alphabet=x1..x5\n1 x4.x2\n1 x3.x1\n");
        assert_eq!(NcPoly::from_text(&text).unwrap(), g);
    }

    #[test]
    fn text_format_errors() {
        assert!(NcPoly::from_text("").is_err());
        assert!(NcPoly::from_text("ncpoly field=Q\n").is_err());
        let e = NcPoly::from_text("ncpoly field=Q alphabet=xy\n1 xz\n").unwrap_err();
        assert_eq!(e, Error::parse(2, "variable z is outside the alphabet"));
        assert!(NcPoly::from_text("ncpoly field=Q alphabet=x1..x2\n1 x3\n").is_err());
    }

    pub(crate) fn arb_poly(field: Field, alphabet: Alphabet, max_deg: usize, max_terms: usize) -> impl Strategy<Value = NcPoly> {
        let n = alphabet.size() as u8;
        proptest::collection::vec(
            (proptest::collection::vec(0..n, 0..=max_deg), -3i64..=3),
            0..=max_terms,
        )
        .prop_map(move |terms| {
            NcPoly::from_terms(field, alphabet, terms.into_iter().map(|(w, c)| (field.from_i64(c), Word(w))))
        })
    }

    proptest! {
        #[test]
        fn degree_is_additive(f in arb_poly(Q, Alphabet::Bivariate, 4, 5), g in arb_poly(Q, Alphabet::Bivariate, 4, 5)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let fg = f.mul(&g).unwrap();
            prop_assert_eq!(fg.degree(), Some(f.degree().unwrap() + g.degree().unwrap()));
        }

        #[test]
        fn leading_monomial_is_multiplicative(f in arb_poly(F2, Alphabet::Bivariate, 4, 5), g in arb_poly(F2, Alphabet::Bivariate, 4, 5)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let fg = f.mul(&g).unwrap();
            prop_assert_eq!(
                fg.leading_monomial().unwrap(),
                &f.leading_monomial().unwrap().concat(g.leading_monomial().unwrap())
            );
        }

        #[test]
        fn division_round_trip(g in arb_poly(Q, Alphabet::Indexed(3), 3, 4), h in arb_poly(Q, Alphabet::Indexed(3), 3, 4)) {
            prop_assume!(!g.is_zero());
            let gh = g.mul(&h).unwrap();
            prop_assert_eq!(gh.left_divide(&g).unwrap(), Some(h));
        }

        #[test]
        fn bar_is_order_reversing_involution(a in proptest::collection::vec(0u8..2, 0..8), b in proptest::collection::vec(0u8..2, 0..8)) {
            let (a, b) = (Word(a), Word(b));
            prop_assert_eq!(a.bar().bar(), a.clone());
            if a.len() == b.len() {
                prop_assert_eq!(a.cmp(&b), b.bar().cmp(&a.bar()));
            }
        }

        #[test]
        fn text_round_trip(f in arb_poly(Q, Alphabet::Indexed(4), 4, 6)) {
            prop_assert_eq!(NcPoly::from_text(&f.to_text()).unwrap(), f);
        }
    }
}
