//! Complete factorization of dense noncommutative polynomials over prime
//! fields.
//!
//! A monic left factor `g` of degree `k` of `f` (with `f = g·h`) is found
//! degree by degree. The top parts satisfy `f_D = g_k · h_{D-k}`, which pins
//! `g_k` down up to a scalar (the prefix/suffix coefficient matrix of `f_D`
//! must have rank 1). At each lower degree the two new homogeneous parts
//! enter linearly and every coefficient equation involves at most two
//! unknowns, so the level is solved exactly by a weighted union-find; free
//! directions are enumerated over the field.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::arith::{Field, FieldElem};
use crate::error::{Error, Result};
use crate::ncpoly::{Alphabet, NcPoly, Word};

/// Default cap on search nodes per left-factor query.
pub const DEFAULT_BUDGET: usize = 1 << 22;

type Hom = BTreeMap<Word, FieldElem>;

/// `scalar · factors[0] · factors[1] · ...` with every factor monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub scalar: FieldElem,
    pub factors: Vec<NcPoly>,
}

impl Factorization {
    pub fn product(&self, field: Field, alphabet: Alphabet) -> Result<NcPoly> {
        let mut p = NcPoly::constant(field, alphabet, self.scalar.clone());
        for f in &self.factors {
            p = p.mul(f)?;
        }
        Ok(p)
    }

    /// The factors with the scalar folded into the first one.
    pub fn into_scaled_factors(self) -> Vec<NcPoly> {
        let mut fs = self.factors;
        match fs.first_mut() {
            Some(f) => *f = f.scale(&self.scalar),
            None => return Vec::new(),
        }
        fs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationTree {
    pub input: NcPoly,
    pub factorizations: Vec<Factorization>,
}

fn check_field(f: &NcPoly) -> Result<u32> {
    match f.field() {
        Field::Prime(p) => Ok(p),
        Field::Rational => Err(Error::UnsupportedField(
            "dense factorization needs a prime field".into(),
        )),
    }
}

/// All monic `g` of degree `k` with `f = g·h` for some `h`.
pub fn left_factors(f: &NcPoly, k: usize, budget: usize) -> Result<Vec<NcPoly>> {
    let p = check_field(f)?;
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if k > d {
        return Ok(Vec::new());
    }
    let parts: Vec<Hom> = (0..=d).map(|m| hom_of(&f.homogeneous_part(m))).collect();
    // top: prefix/suffix matrix of f_D must be rank one
    let mut rows: BTreeMap<Word, Hom> = BTreeMap::new();
    for (w, c) in &parts[d] {
        rows.entry(w.slice(0, k)).or_default().insert(w.slice(k, d), c.clone());
    }
    let (_, h_top) = rows.iter().next_back().expect("top part is nonzero");
    let h_top = h_top.clone();
    let (pivot, pivot_c) = h_top.iter().next().map(|(w, c)| (w.clone(), c.clone())).unwrap();
    let mut g_top = Hom::new();
    for (u, row) in &rows {
        let Some(c) = row.get(&pivot) else {
            return Ok(Vec::new());
        };
        let lambda = c.div(&pivot_c)?;
        if row.len() != h_top.len() || h_top.iter().any(|(v, hv)| row.get(v) != Some(&(hv * &lambda))) {
            return Ok(Vec::new());
        }
        g_top.insert(u.clone(), lambda);
    }
    let mut search = Search {
        field: f.field(),
        alphabet: f.alphabet(),
        p,
        parts,
        k,
        d,
        budget,
        nodes: 0,
        found: Vec::new(),
    };
    let mut g = vec![Hom::new(); k + 1];
    let mut h = vec![Hom::new(); d - k + 1];
    g[k] = g_top;
    h[d - k] = h_top;
    search.dfs(1, &mut g, &mut h)?;
    let mut found = search.found;
    found.sort_by_cached_key(NcPoly::to_text);
    found.dedup();
    Ok(found)
}

struct Search {
    field: Field,
    alphabet: Alphabet,
    p: u32,
    parts: Vec<Hom>,
    k: usize,
    d: usize,
    budget: usize,
    nodes: usize,
    found: Vec<NcPoly>,
}

impl Search {
    fn poly(&self, parts: &[Hom]) -> NcPoly {
        NcPoly::from_terms(
            self.field,
            self.alphabet,
            parts.iter().flat_map(|h| h.iter().map(|(w, c)| (c.clone(), w.clone()))),
        )
    }

    fn dfs(&mut self, t: usize, g: &mut Vec<Hom>, h: &mut Vec<Hom>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let (k, d) = (self.k, self.d);
        if t > d {
            let (gp, hp) = (self.poly(g), self.poly(h));
            let f = self.poly(&self.parts);
            if gp.mul(&hp)? == f {
                self.found.push(gp);
            }
            return Ok(());
        }
        let m = d - t;
        let mut rhs = self.parts[m].clone();
        let lo = (k + 1).saturating_sub(t);
        if k >= 1 {
            for i in lo..=(k - 1).min(m) {
                hom_mul_sub(&g[i], &h[m - i], &mut rhs);
            }
        }
        let has_a = t <= k;
        let has_b = t <= d - k;
        let a_deg = k.wrapping_sub(t);
        let b_deg = (d - k).wrapping_sub(t);

        let mut cand_a = BTreeSet::new();
        let mut cand_b = BTreeSet::new();
        if has_a {
            cand_a.extend(rhs.keys().chain(g[k].keys()).map(|w| w.slice(0, a_deg)));
        }
        if has_b {
            cand_b.extend(rhs.keys().map(|w| w.slice(w.len() - b_deg, w.len())));
            cand_b.extend(h[d - k].keys().map(|w| w.slice(w.len() - b_deg, w.len())));
        }
        let a_vars: Vec<Word> = cand_a.into_iter().collect();
        let b_vars: Vec<Word> = cand_b.into_iter().collect();
        let na = a_vars.len();

        let mut eqs: BTreeMap<Word, (Vec<(usize, FieldElem)>, FieldElem)> = BTreeMap::new();
        for (w, c) in &rhs {
            eqs.insert(w.clone(), (Vec::new(), c.clone()));
        }
        let zero = self.field.zero();
        for (s, gs) in &g[k] {
            for (j, v) in b_vars.iter().enumerate() {
                let e = eqs.entry(s.concat(v)).or_insert_with(|| (Vec::new(), zero.clone()));
                e.0.push((na + j, gs.clone()));
            }
        }
        for (i, u) in a_vars.iter().enumerate() {
            for (r, hr) in &h[d - k] {
                let e = eqs.entry(u.concat(r)).or_insert_with(|| (Vec::new(), zero.clone()));
                e.0.push((i, hr.clone()));
            }
        }
        let mut uf = WeightedUf::new(self.field, na + b_vars.len());
        for (terms, r) in eqs.values() {
            if !uf.add_equation(terms, r)? {
                return Ok(());
            }
        }
        let free = uf.free_roots();
        let combos = (self.p as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
        if combos > (self.budget - self.nodes.min(self.budget)) as u128 {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let mut choice = vec![0u32; free.len()];
        loop {
            let assign: HashMap<usize, FieldElem> = free
                .iter()
                .zip(&choice)
                .map(|(&r, &c)| (r, self.field.from_i64(c as i64)))
                .collect();
            let values = uf.values(&assign);
            let collect = |vars: &[Word], off: usize| -> Hom {
                vars.iter()
                    .enumerate()
                    .filter(|(j, _)| !values[off + j].is_zero())
                    .map(|(j, w)| (w.clone(), values[off + j].clone()))
                    .collect()
            };
            if has_a {
                g[a_deg] = collect(&a_vars, 0);
            }
            if has_b {
                h[b_deg] = collect(&b_vars, na);
            }
            self.dfs(t + 1, g, h)?;
            // next combination
            let mut pos = 0;
            while pos < choice.len() {
                choice[pos] += 1;
                if choice[pos] < self.p {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
        if has_a {
            g[a_deg].clear();
        }
        if has_b {
            h[b_deg].clear();
        }
        Ok(())
    }
}

fn hom_of(p: &NcPoly) -> Hom {
    p.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
}

/// `out -= a·b`
fn hom_mul_sub(a: &Hom, b: &Hom, out: &mut Hom) {
    for (u, cu) in a {
        for (v, cv) in b {
            let w = u.concat(v);
            let e = out.entry(w.clone()).or_insert_with(|| cu.field().zero());
            *e -= &(cu * cv);
            if e.is_zero() {
                out.remove(&w);
            }
        }
    }
}

/// Union-find over unknowns with affine edge weights:
/// `x_i = alpha_i · x_parent + beta_i`.
struct WeightedUf {
    field: Field,
    parent: Vec<usize>,
    alpha: Vec<FieldElem>,
    beta: Vec<FieldElem>,
    value: Vec<Option<FieldElem>>,
}

impl WeightedUf {
    fn new(field: Field, n: usize) -> Self {
        WeightedUf {
            field,
            parent: (0..n).collect(),
            alpha: vec![field.one(); n],
            beta: vec![field.zero(); n],
            value: vec![None; n],
        }
    }

    /// `(root, A, B)` with `x_i = A · x_root + B`.
    fn find(&mut self, i: usize) -> (usize, FieldElem, FieldElem) {
        let mut path = vec![i];
        while self.parent[*path.last().unwrap()] != *path.last().unwrap() {
            let next = self.parent[*path.last().unwrap()];
            path.push(next);
        }
        let root = path.pop().unwrap();
        let (mut a, mut b) = (self.field.one(), self.field.zero());
        // compose from the node nearest the root outwards
        for &node in path.iter().rev() {
            // x_node = alpha·x_parent + beta, x_parent = a·root + b
            let na = &self.alpha[node] * &a;
            let nb = &(&self.alpha[node] * &b) + &self.beta[node];
            self.parent[node] = root;
            self.alpha[node] = na.clone();
            self.beta[node] = nb.clone();
            a = na;
            b = nb;
        }
        if path.is_empty() {
            (root, self.field.one(), self.field.zero())
        } else {
            (root, self.alpha[i].clone(), self.beta[i].clone())
        }
    }

    fn fix(&mut self, root: usize, v: FieldElem) -> bool {
        match &self.value[root] {
            Some(old) => *old == v,
            None => {
                self.value[root] = Some(v);
                true
            }
        }
    }

    /// Adds `Σ c·x = r`; returns false on inconsistency.
    fn add_equation(&mut self, terms: &[(usize, FieldElem)], r: &FieldElem) -> Result<bool> {
        match terms {
            [] => Ok(r.is_zero()),
            [(x, c)] => {
                let (root, a, b) = self.find(*x);
                let v = (r - &(c * &b)).div(&(c * &a))?;
                Ok(self.fix(root, v))
            }
            [(x, c1), (y, c2)] => {
                let (r1, a1, b1) = self.find(*x);
                let (r2, a2, b2) = self.find(*y);
                let rest = &(r - &(c1 * &b1)) - &(c2 * &b2);
                let k1 = c1 * &a1;
                let k2 = c2 * &a2;
                if r1 == r2 {
                    let coef = &k1 + &k2;
                    if coef.is_zero() {
                        return Ok(rest.is_zero());
                    }
                    return Ok(self.fix(r1, rest.div(&coef)?));
                }
                // x_r1 = -(k2/k1)·x_r2 + rest/k1
                let alpha = -(k2.div(&k1)?);
                let beta = rest.div(&k1)?;
                self.parent[r1] = r2;
                self.alpha[r1] = alpha.clone();
                self.beta[r1] = beta.clone();
                if let Some(v1) = self.value[r1].take() {
                    let v2 = (&v1 - &beta).div(&alpha)?;
                    return Ok(self.fix(r2, v2));
                }
                Ok(true)
            }
            _ => unreachable!("at most two unknowns per equation"),
        }
    }

    fn free_roots(&mut self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&i| self.parent[i] == i && self.value[i].is_none())
            .collect()
    }

    fn values(&mut self, free: &HashMap<usize, FieldElem>) -> Vec<FieldElem> {
        (0..self.parent.len())
            .map(|i| {
                let (root, a, b) = self.find(i);
                let rv = self.value[root].clone().unwrap_or_else(|| free[&root].clone());
                &(&a * &rv) + &b
            })
            .collect()
    }
}

/// One complete factorization, peeling off a minimal-degree left factor at
/// each step.
pub fn factorize(f: &NcPoly, budget: usize) -> Result<Factorization> {
    check_field(f)?;
    let scalar = f.leading_coeff()?.clone();
    let mut cur = f.monic()?;
    let mut factors = Vec::new();
    while cur.degree().unwrap() > 0 {
        let d = cur.degree().unwrap();
        let mut split = None;
        for k in 1..d {
            if let Some(g) = left_factors(&cur, k, budget)?.into_iter().next() {
                split = Some(g);
                break;
            }
        }
        match split {
            Some(g) => {
                let h = cur.left_divide(&g)?.expect("left factor divides");
                factors.push(g);
                cur = h;
            }
            None => {
                factors.push(cur);
                break;
            }
        }
    }
    Ok(Factorization { scalar, factors })
}

/// True iff `f` has degree at least 1 and no left factor of intermediate degree.
pub fn is_irreducible(f: &NcPoly, budget: usize) -> Result<bool> {
    check_field(f)?;
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Ok(false);
    }
    for k in 1..d {
        if !left_factors(f, k, budget)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every complete factorization of `f` into monic irreducibles.
pub fn complete_factorizations(f: &NcPoly, budget: usize) -> Result<FactorizationTree> {
    check_field(f)?;
    let scalar = f.leading_coeff()?.clone();
    let monic = f.monic()?;
    let mut memo = Memo {
        budget,
        all: HashMap::new(),
        irreducible: HashMap::new(),
    };
    let lists = memo.all(&monic)?;
    let mut factorizations: Vec<Factorization> = lists
        .iter()
        .map(|fs| Factorization {
            scalar: scalar.clone(),
            factors: fs.clone(),
        })
        .collect();
    factorizations.sort_by_cached_key(|fz| fz.factors.iter().map(|g| (g.degree(), g.to_text())).collect::<Vec<_>>());
    factorizations.dedup();
    Ok(FactorizationTree {
        input: f.clone(),
        factorizations,
    })
}

struct Memo {
    budget: usize,
    all: HashMap<NcPoly, Rc<Vec<Vec<NcPoly>>>>,
    irreducible: HashMap<NcPoly, bool>,
}

impl Memo {
    fn all(&mut self, f: &NcPoly) -> Result<Rc<Vec<Vec<NcPoly>>>> {
        if let Some(r) = self.all.get(f) {
            return Ok(r.clone());
        }
        let d = f.degree().unwrap();
        let mut out = Vec::new();
        let mut reducible = false;
        if d == 0 {
            out.push(Vec::new());
        }
        for k in 1..d.max(1) {
            for g in left_factors(f, k, self.budget)? {
                reducible = true;
                if !self.irreducible(&g)? {
                    continue;
                }
                let h = f.left_divide(&g)?.expect("left factor divides");
                for tail in self.all(&h)?.iter() {
                    let mut fs = vec![g.clone()];
                    fs.extend(tail.iter().cloned());
                    out.push(fs);
                }
            }
        }
        if d > 0 && !reducible {
            out.push(vec![f.clone()]);
        }
        self.irreducible.insert(f.clone(), d > 0 && !reducible);
        let r = Rc::new(out);
        self.all.insert(f.clone(), r.clone());
        Ok(r)
    }

    fn irreducible(&mut self, f: &NcPoly) -> Result<bool> {
        if let Some(&b) = self.irreducible.get(f) {
            return Ok(b);
        }
        let b = is_irreducible(f, self.budget)?;
        self.irreducible.insert(f.clone(), b);
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RatMatrix;
    use crate::ncpoly::tests::arb_poly;
    use proptest::prelude::*;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn xy(field: Field, s: &str) -> NcPoly {
        NcPoly::parse_inline(field, Alphabet::Bivariate, s).unwrap()
    }

    #[test]
    fn left_factor_examples() {
        let f = xy(f2(), "x + xyx");
        assert_eq!(left_factors(&f, 1, DEFAULT_BUDGET).unwrap(), vec![xy(f2(), "x")]);
        assert_eq!(left_factors(&f, 2, DEFAULT_BUDGET).unwrap(), vec![xy(f2(), "1 + xy")]);
        assert_eq!(left_factors(&xy(f2(), "xx"), 1, DEFAULT_BUDGET).unwrap(), vec![xy(f2(), "x")]);
    }

    #[test]
    fn the_two_factorizations_of_x_plus_xyx() {
        let f = xy(f2(), "x + xyx");
        let tree = complete_factorizations(&f, DEFAULT_BUDGET).unwrap();
        let got: Vec<Vec<NcPoly>> = tree.factorizations.iter().map(|z| z.factors.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![xy(f2(), "x"), xy(f2(), "1 + yx")],
                vec![xy(f2(), "1 + xy"), xy(f2(), "x")],
            ]
        );
    }

    #[test]
    fn square_and_irreducibles() {
        let tree = complete_factorizations(&xy(f2(), "xx"), DEFAULT_BUDGET).unwrap();
        assert_eq!(tree.factorizations.len(), 1);
        assert_eq!(tree.factorizations[0].factors, vec![xy(f2(), "x"), xy(f2(), "x")]);
        assert!(is_irreducible(&xy(f2(), "x + y + 1"), DEFAULT_BUDGET).unwrap());
        assert!(!is_irreducible(&xy(f2(), "xx"), DEFAULT_BUDGET).unwrap());
        assert!(is_irreducible(&xy(f2(), "1 + yx"), DEFAULT_BUDGET).unwrap());
        assert!(!is_irreducible(&xy(f2(), "1"), DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn rejects_rationals() {
        let f = xy(Field::Rational, "xx");
        assert!(matches!(left_factors(&f, 1, 10), Err(Error::UnsupportedField(_))));
    }

    /// Rank of the quadratic coefficient matrix, computed over Q from the
    /// 0/1 coefficients; a product of two affine forms forces rank <= 1.
    fn quadratic_rank(f: &NcPoly, n: usize) -> usize {
        let mut m = vec![vec![0i64; n]; n];
        for (w, c) in f.terms() {
            if w.len() == 2 && !c.is_zero() {
                m[w.letters()[0] as usize][w.letters()[1] as usize] = 1;
            }
        }
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        RatMatrix::from_i64(&rows).rank()
    }

    #[test]
    fn four_term_example_is_irreducible() {
        let f = NcPoly::parse_inline(f2(), Alphabet::Indexed(5), "x3.x1 + x4.x2 + x4.x1 + x5.x2").unwrap();
        assert_eq!(quadratic_rank(&f, 5), 2);
        let tree = complete_factorizations(&f, DEFAULT_BUDGET).unwrap();
        assert_eq!(tree.factorizations.len(), 1);
        assert_eq!(tree.factorizations[0].factors, vec![f]);
    }

    #[test]
    fn budget_is_enforced() {
        let f = xy(f2(), "xxyyxxyy + xyxy");
        assert!(matches!(left_factors(&f, 4, 1), Err(Error::BudgetExceeded(1))));
    }

    #[test]
    fn kernel_branches_are_enumerated() {
        // (x + a)(x + b) = xx + (a+b)x + ab over F3 for all a, b with a + b = 0, ab = -1
        let f3 = Field::prime(3).unwrap();
        let f = xy(f3, "xx - 1");
        let got = left_factors(&f, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(got, vec![xy(f3, "x + 1"), xy(f3, "x + 2")]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn refines_known_product(
            g in arb_poly(Field::Prime(2), Alphabet::Indexed(3), 2, 4),
            h in arb_poly(Field::Prime(2), Alphabet::Indexed(3), 2, 4),
        ) {
            let f = g.mul(&h).unwrap();
            prop_assume!(!g.is_zero() && !h.is_zero());
            let tree = complete_factorizations(&f, DEFAULT_BUDGET).unwrap();
            prop_assert!(!tree.factorizations.is_empty());
            let gm = g.monic().unwrap();
            let mut refined = false;
            for fz in &tree.factorizations {
                prop_assert_eq!(fz.product(f.field(), f.alphabet()).unwrap(), f.clone());
                for fac in &fz.factors {
                    prop_assert!(fac.is_monic());
                }
                let mut prefix = NcPoly::one(f.field(), f.alphabet());
                for s in 0..=fz.factors.len() {
                    if prefix == gm {
                        refined = true;
                    }
                    if s < fz.factors.len() {
                        prefix = prefix.mul(&fz.factors[s]).unwrap();
                    }
                }
            }
            prop_assert!(refined);
        }

        #[test]
        fn left_factors_divide(f in arb_poly(Field::Prime(3), Alphabet::Bivariate, 4, 5), k in 1usize..4) {
            prop_assume!(!f.is_zero());
            for g in left_factors(&f, k, DEFAULT_BUDGET).unwrap() {
                prop_assert!(g.is_monic());
                prop_assert_eq!(g.degree(), Some(k));
                prop_assert!(f.left_divide(&g).unwrap().is_some());
            }
        }
    }

    #[test]
    fn exhaustive_left_factors_agree() {
        // oracle: enumerate every monic degree-1 polynomial over F2 in x, y
        let f2 = f2();
        let samples = ["xy + x + y + 1", "xx + xy + x", "xyx + yxx + x", "xy + yx", "yxy + yy + xy + y"];
        for s in samples {
            let f = xy(f2, s);
            let mut want = Vec::new();
            for lead in ["x", "y"] {
                for bits in 0..8u32 {
                    let mut g = xy(f2, lead);
                    if lead == "x" && bits & 1 == 1 {
                        g.add_term(Word::xy("y"), f2.one());
                    }
                    if lead == "y" && bits & 1 == 1 {
                        continue;
                    }
                    if bits & 2 == 2 {
                        g.add_term(Word::empty(), f2.one());
                    }
                    if bits & 4 == 4 {
                        continue;
                    }
                    if f.left_divide(&g).unwrap().is_some() {
                        want.push(g);
                    }
                }
            }
            want.sort_by_cached_key(NcPoly::to_text);
            want.dedup();
            assert_eq!(left_factors(&f, 1, DEFAULT_BUDGET).unwrap(), want, "{s}");
        }
    }
}
