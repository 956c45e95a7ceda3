//! The substitution automaton that reads a bivariate monomial, splits it
//! into embedding words `v_i` and emits the corresponding `x_i`, and the
//! recovery of `g` from any representation of `φ(g)`.

use std::collections::BTreeMap;

use crate::arith::{Field, FieldMatrix};
use crate::circuit::{Abp, AbpEdge, AffineForm, BlackBox, Circuit, CircuitBuilder, Gate, MatrixAssignment};
use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::ncpoly::Alphabet;
use crate::oracle;
use crate::words::WordSet;

/// What a transition writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Zero,
    One,
    Var(u8),
}

/// States are numbered `q0 = 0`, then the trie nodes (root first), then
/// `qf`, then `qr`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstAutomaton {
    words: WordSet,
    /// `delta[letter][state] = (next, output)`
    delta: [Vec<(usize, Output)>; 2],
    trie_depth: usize,
}

impl SubstAutomaton {
    pub fn new(words: &WordSet) -> Result<Self> {
        // trie over the words with first and last letters removed
        let mut children: Vec<[Option<usize>; 2]> = vec![[None, None]];
        let mut depth = vec![0usize];
        let mut accept: Vec<Option<u8>> = vec![None];
        for (i, w) in words.words().iter().enumerate() {
            let inner = &w.letters()[1..w.len() - 1];
            let mut node = 0;
            for &c in inner {
                node = match children[node][c as usize] {
                    Some(n) => n,
                    None => {
                        children.push([None, None]);
                        depth.push(depth[node] + 1);
                        accept.push(None);
                        let n = children.len() - 1;
                        children[node][c as usize] = Some(n);
                        n
                    }
                };
            }
            if accept[node].is_some() {
                return Err(Error::Precondition(format!("duplicate word {}", w.to_xy_string())));
            }
            accept[node] = Some(i as u8);
        }
        let t = children.len();
        let (q0, qf, qr) = (0, t + 1, t + 2);
        let root = 1;
        let size = t + 3;
        let mut delta = [vec![(qr, Output::Zero); size], vec![(qr, Output::Zero); size]];
        delta[0][q0] = (root, Output::One);
        delta[0][qf] = (root, Output::One);
        for node in 0..t {
            let s = node + 1;
            if let Some(i) = accept[node] {
                if children[node][1].is_some() {
                    return Err(Error::Precondition("word set is not prefix-free".into()));
                }
                delta[1][s] = (qf, Output::Var(i));
            }
            for c in 0..2 {
                if let Some(ch) = children[node][c] {
                    delta[c][s] = (ch + 1, Output::One);
                }
            }
        }
        Ok(SubstAutomaton {
            words: words.clone(),
            delta,
            trie_depth: depth.into_iter().max().unwrap_or(0),
        })
    }

    pub fn from_embedding(e: &Embedding) -> Result<Self> {
        SubstAutomaton::new(e.words())
    }

    pub fn words(&self) -> &WordSet {
        &self.words
    }

    pub fn nvars(&self) -> usize {
        self.words.len()
    }

    pub fn target_alphabet(&self) -> Alphabet {
        Alphabet::Indexed(self.nvars())
    }

    pub fn state_count(&self) -> usize {
        self.delta[0].len()
    }

    pub fn q0(&self) -> usize {
        0
    }

    pub fn qf(&self) -> usize {
        self.state_count() - 2
    }

    pub fn qr(&self) -> usize {
        self.state_count() - 1
    }

    /// Longest root-to-leaf path in the trie.
    pub fn trie_depth(&self) -> usize {
        self.trie_depth
    }

    pub fn step(&self, state: usize, letter: u8) -> (usize, Output) {
        self.delta[letter as usize][state]
    }

    /// Runs the automaton on a word; returns the final state and the emitted
    /// monomial, or `None` if some output was 0.
    pub fn run(&self, w: &[u8]) -> (usize, Option<Vec<u8>>) {
        let mut state = self.q0();
        let mut out = Some(Vec::new());
        for &c in w {
            let (next, o) = self.step(state, c);
            state = next;
            match o {
                Output::Zero => out = None,
                Output::One => {}
                Output::Var(i) => {
                    if let Some(v) = out.as_mut() {
                        v.push(i);
                    }
                }
            }
        }
        (state, out)
    }

    pub fn transition_matrices(&self) -> TransitionMatrices {
        let n = self.state_count();
        let mk = |l: usize| {
            let mut m = vec![vec![Output::Zero; n]; n];
            for (i, &(j, o)) in self.delta[l].iter().enumerate() {
                m[i][j] = o;
            }
            m
        };
        TransitionMatrices { mx: mk(0), my: mk(1) }
    }

    /// Nonzero transitions of `letter` as `(from, to, output)`.
    fn live_transitions(&self, letter: u8) -> impl Iterator<Item = (usize, usize, Output)> + '_ {
        self.delta[letter as usize]
            .iter()
            .enumerate()
            .filter(|(_, (_, o))| *o != Output::Zero)
            .map(|(i, &(j, o))| (i, j, o))
    }

    /// Symbolic evaluation of `c` at `(M_x, M_y)`; the result is the sum of
    /// entries `(q0, qf)` and `(q0, q0)`.
    pub fn recover_circuit(&self, c: &Circuit) -> Result<Circuit> {
        check_bivariate(c.alphabet())?;
        let q = self.state_count();
        let mut b = CircuitBuilder::new(c.field(), self.target_alphabet());
        let one = b.constant(c.field().one());
        let letter_grid = |b: &mut CircuitBuilder, l: u8| -> Grid {
            let mut g = Grid::default();
            for (i, j, o) in self.live_transitions(l) {
                g.set(i, j, match o {
                    Output::One => one,
                    Output::Var(v) => b.var(v),
                    Output::Zero => unreachable!(),
                });
            }
            g
        };
        let live = c.live_gates();
        let mut grids: Vec<Option<Grid>> = vec![None; c.gates().len()];
        for (idx, g) in c.gates().iter().enumerate() {
            if !live[idx] {
                continue;
            }
            let grid = match g {
                Gate::Var(l) => letter_grid(&mut b, *l),
                Gate::Const(k) => {
                    let mut grid = Grid::default();
                    if !k.is_zero() {
                        let id = b.constant(k.clone());
                        for s in 0..q {
                            grid.set(s, s, id);
                        }
                    }
                    grid
                }
                Gate::Add(l, r) => {
                    let (l, r) = (grids[*l].as_ref().unwrap(), grids[*r].as_ref().unwrap());
                    let mut grid = l.clone();
                    for (&(i, j), &id) in &r.entries {
                        let v = match grid.get(i, j) {
                            Some(x) => b.add(x, id),
                            None => id,
                        };
                        grid.set(i, j, v);
                    }
                    grid
                }
                Gate::Mul(l, r) => {
                    let (l, r) = (grids[*l].as_ref().unwrap(), grids[*r].as_ref().unwrap());
                    let rows = r.by_row();
                    let mut acc: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
                    for (&(i, k), &a) in &l.entries {
                        for &(j, bb) in rows.get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                            let t = if a == one {
                                bb
                            } else if bb == one {
                                a
                            } else {
                                b.mul(a, bb)
                            };
                            acc.entry((i, j)).or_default().push(t);
                        }
                    }
                    let mut grid = Grid::default();
                    for ((i, j), terms) in acc {
                        let s = b.sum(&terms);
                        grid.set(i, j, s);
                    }
                    grid
                }
            };
            grids[idx] = Some(grid);
        }
        let out = grids[c.output()].take().unwrap();
        let parts: Vec<usize> = [out.get(self.q0(), self.qf()), out.get(self.q0(), self.q0())]
            .into_iter()
            .flatten()
            .collect();
        let root = if parts.is_empty() {
            b.constant(c.field().zero())
        } else {
            b.sum(&parts)
        };
        Ok(b.finish(root))
    }

    /// Blows each node up into `|Q|` copies and relabels edges by the
    /// entries of `α0·I + α1·M_x + α2·M_y`.
    pub fn recover_abp(&self, p: &Abp) -> Result<Abp> {
        check_bivariate(p.alphabet())?;
        let field = p.field();
        let q = self.state_count();
        let depth = p.depth();
        // layer 0 keeps only (source, q0)
        let node = |k: usize, u: usize, s: usize| if k == 0 { 0 } else { u * q + s };
        let mut widths = vec![1usize];
        widths.extend(p.widths()[1..].iter().map(|w| w * q));
        widths.push(1);
        let mut layers: Vec<Vec<AbpEdge>> = Vec::with_capacity(depth + 1);
        for (k, layer) in p.layers().iter().enumerate() {
            let mut out = Vec::new();
            let states: Vec<usize> = if k == 0 { vec![self.q0()] } else { (0..q).collect() };
            for e in layer {
                let mut labels: BTreeMap<(usize, usize), AffineForm> = BTreeMap::new();
                let c0 = e.label.constant_term();
                if !c0.is_zero() {
                    for &s in &states {
                        labels.insert((s, s), AffineForm::constant(c0.clone()));
                    }
                }
                for (letter, coeff) in e.label.coeffs() {
                    for (i, j, o) in self.live_transitions(letter) {
                        if !states.contains(&i) {
                            continue;
                        }
                        let l = labels.entry((i, j)).or_insert_with(|| AffineForm::constant(field.zero()));
                        match o {
                            Output::One => l.add_constant(coeff),
                            Output::Var(v) => l.add_var(v, coeff.clone()),
                            Output::Zero => {}
                        }
                    }
                }
                for ((i, j), label) in labels {
                    if !label.is_zero() {
                        out.push(AbpEdge {
                            from: node(k, e.from, i),
                            to: node(k + 1, e.to, j),
                            label,
                        });
                    }
                }
            }
            layers.push(out);
        }
        // the last layer of a depth-0 program is the source, which only has q0
        let finals = if depth == 0 { vec![self.q0()] } else { vec![self.qf(), self.q0()] };
        let sink_edges: Vec<AbpEdge> = finals
            .into_iter()
            .map(|s| AbpEdge {
                from: node(depth, 0, s),
                to: 0,
                label: AffineForm::constant(field.one()),
            })
            .collect();
        layers.push(sink_edges);
        Ok(Abp::new(field, self.target_alphabet(), widths, layers)?.pruned())
    }

    pub fn recover_blackbox<'a>(&'a self, bb: &'a dyn BlackBox) -> Result<RecoveredBlackBox<'a>> {
        check_bivariate(bb.alphabet())?;
        Ok(RecoveredBlackBox { aut: self, inner: bb })
    }

    fn block_matrix(&self, letter: u8, a: &MatrixAssignment) -> FieldMatrix {
        let n = a.dim();
        let q = self.state_count();
        let field = a.field();
        let mut m = FieldMatrix::zeros(field, q * n, q * n);
        for (i, j, o) in self.live_transitions(letter) {
            let blk = match o {
                Output::One => FieldMatrix::identity(field, n),
                Output::Var(v) => a.matrix(v).clone(),
                Output::Zero => continue,
            };
            m.set_block(i * n, j * n, &blk);
        }
        m
    }
}

/// `M_x` and `M_y` as dense tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrices {
    pub mx: Vec<Vec<Output>>,
    pub my: Vec<Vec<Output>>,
}

impl TransitionMatrices {
    pub fn get(&self, letter: u8) -> &[Vec<Output>] {
        if letter == Alphabet::X {
            &self.mx
        } else {
            &self.my
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Grid {
    entries: BTreeMap<(usize, usize), usize>,
}

impl Grid {
    fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.entries.get(&(i, j)).copied()
    }

    fn set(&mut self, i: usize, j: usize, id: usize) {
        self.entries.insert((i, j), id);
    }

    fn by_row(&self) -> BTreeMap<usize, Vec<(usize, usize)>> {
        let mut rows: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (&(i, j), &id) in &self.entries {
            rows.entry(i).or_default().push((j, id));
        }
        rows
    }
}

fn check_bivariate(a: Alphabet) -> Result<()> {
    if a == Alphabet::Bivariate {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(Alphabet::Bivariate.to_string(), a.to_string()))
    }
}

pub struct RecoveredBlackBox<'a> {
    aut: &'a SubstAutomaton,
    inner: &'a dyn BlackBox,
}

impl BlackBox for RecoveredBlackBox<'_> {
    fn field(&self) -> Field {
        self.inner.field()
    }

    fn alphabet(&self) -> Alphabet {
        self.aut.target_alphabet()
    }

    fn eval(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        a.check_covers(self.field(), self.alphabet())?;
        let big = MatrixAssignment::new(
            self.field(),
            vec![self.aut.block_matrix(Alphabet::X, a), self.aut.block_matrix(Alphabet::Y, a)],
        )?;
        let r = self.inner.eval(&big)?;
        let n = a.dim();
        let q0 = self.aut.q0() * n;
        r.block(q0, self.aut.qf() * n, n, n).add(&r.block(q0, q0, n, n))
    }
}

/// A complete-factorization oracle for bivariate circuits. The product of
/// the returned factors, in order, must equal the input.
pub trait FactorOracle {
    fn factor(&self, c: &Circuit) -> Result<Vec<Circuit>>;
}

/// Expands the circuit and factors it densely over a small prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseOracle {
    pub budget: usize,
}

impl Default for DenseOracle {
    fn default() -> Self {
        DenseOracle {
            budget: oracle::DEFAULT_BUDGET,
        }
    }
}

impl FactorOracle for DenseOracle {
    fn factor(&self, c: &Circuit) -> Result<Vec<Circuit>> {
        let f = c.expand(c.formal_degree())?;
        let fac = oracle::factorize(&f, self.budget)?;
        Ok(fac.into_scaled_factors().iter().map(Circuit::from_poly).collect())
    }
}

/// Factors a circuit over `x1..xn` by factoring its bivariate image and
/// recovering each factor.
pub fn reduce_and_recover(c: &Circuit, e: &Embedding, oracle: &dyn FactorOracle) -> Result<Vec<Circuit>> {
    let image = e.phi_circuit(c)?;
    let aut = SubstAutomaton::from_embedding(e)?;
    let out = oracle
        .factor(&image)?
        .iter()
        .map(|g| aut.recover_circuit(g))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(Error::Precondition("oracle returned no factors".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::tests::arb_poly;
    use crate::ncpoly::{NcPoly, Word};
    use crate::words::{enumerate_words, WordMode};
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn compact(n: usize) -> WordSet {
        enumerate_words(n, WordMode::Compact).unwrap()
    }

    fn xy(s: &str) -> NcPoly {
        NcPoly::parse_inline(Q, Alphabet::Bivariate, s).unwrap()
    }

    #[test]
    fn single_word_automaton() {
        let a = SubstAutomaton::new(&compact(1)).unwrap();
        assert_eq!(a.state_count(), 4);
        assert_eq!((a.qf(), a.qr()), (2, 3));
        assert_eq!(a.step(0, 0), (1, Output::One));
        assert_eq!(a.step(1, 1), (2, Output::Var(0)));
        assert_eq!(a.step(2, 0), (1, Output::One));
        for (s, l) in [(0, 1), (1, 0), (2, 1), (3, 0), (3, 1)] {
            assert_eq!(a.step(s, l), (3, Output::Zero));
        }
        let m = a.transition_matrices();
        assert_eq!(m.mx[0][1], Output::One);
        assert_eq!(m.mx[2][1], Output::One);
        assert_eq!(m.my[1][2], Output::Var(0));
        assert!(m.my[0][..3].iter().all(|o| *o == Output::Zero));
        for l in [0, 1] {
            for row in m.get(l) {
                assert!(row.iter().filter(|o| **o != Output::Zero).count() <= 1);
            }
        }
    }

    #[test]
    fn nested_words_share_a_state() {
        let ws = WordSet::new(vec![Word::xy("xy"), Word::xy("xxyy")]).unwrap();
        let a = SubstAutomaton::new(&ws).unwrap();
        // q0, root, "x", qf are live; qr rejects
        assert_eq!(a.state_count() - 1, 5);
        let (after_x, _) = a.step(0, 0);
        assert_eq!(a.step(after_x, 1), (a.qf(), Output::Var(0)));
        let (deeper, o) = a.step(after_x, 0);
        assert_eq!(o, Output::One);
        let (st, _) = a.step(deeper, 1);
        assert_eq!(a.step(st, 1), (a.qf(), Output::Var(1)));
    }

    #[test]
    fn paper_mode_trie_depth() {
        let a = SubstAutomaton::new(&enumerate_words(1, WordMode::Paper).unwrap()).unwrap();
        assert_eq!(a.trie_depth(), 12);
    }

    /// All words over {x, y} of length at most `len`.
    fn all_words(len: usize) -> Vec<Vec<u8>> {
        (0..=len)
            .flat_map(|l| (0..1u32 << l).map(move |b| (0..l).map(|i| ((b >> i) & 1) as u8).collect()))
            .collect()
    }

    #[test]
    fn kill_and_parse_properties() {
        for n in [1, 2] {
            let ws = compact(n);
            let e = Embedding::new(ws.clone());
            let a = SubstAutomaton::new(&ws).unwrap();
            for w in all_words(8) {
                let word = Word(w.clone());
                let (state, out) = a.run(&w);
                let has_bar = (0..n).any(|i| word.contains_subword(e.bar(i)));
                let accepted = state == a.qf() && out.is_some();
                // a mirrored word kills the path unless the word still splits into v's
                if has_bar && e.parse(&word).is_none() {
                    assert!(!accepted, "{}", word.to_xy_string());
                }
                match e.parse(&word) {
                    Some(m) if !w.is_empty() => {
                        assert!(accepted);
                        assert_eq!(out.unwrap(), m.0);
                    }
                    _ => assert!(!accepted || w.is_empty()),
                }
            }
        }
    }

    #[test]
    fn recover_circuit_examples() {
        let a = SubstAutomaton::new(&compact(1)).unwrap();
        let x1 = NcPoly::parse_inline(Q, Alphabet::Indexed(1), "x1").unwrap();
        let c = Circuit::from_poly(&xy("xy + yx"));
        assert_eq!(a.recover_circuit(&c).unwrap().expand(2).unwrap(), x1);
        let c = Circuit::from_poly(&xy("1 + xy + yx"));
        let want = NcPoly::parse_inline(Q, Alphabet::Indexed(1), "1 + x1").unwrap();
        assert_eq!(a.recover_circuit(&c).unwrap().expand(2).unwrap(), want);
    }

    #[test]
    fn recover_abp_examples() {
        let a = SubstAutomaton::new(&compact(1)).unwrap();
        let single = Abp::from_affine(Q, Alphabet::Bivariate, AffineForm::var(Q, 0, Q.one())).unwrap();
        assert!(a.recover_abp(&single).unwrap().path_sum(100).unwrap().is_zero());
        let aff = |s: &str| AffineForm::parse(Q, Alphabet::Bivariate, s).unwrap();
        let p = Abp::new(
            Q,
            Alphabet::Bivariate,
            vec![1, 2, 1],
            vec![
                vec![
                    AbpEdge { from: 0, to: 0, label: aff("x") },
                    AbpEdge { from: 0, to: 1, label: aff("y") },
                ],
                vec![
                    AbpEdge { from: 0, to: 0, label: aff("y") },
                    AbpEdge { from: 1, to: 0, label: aff("x") },
                ],
            ],
        )
        .unwrap();
        let r = a.recover_abp(&p).unwrap();
        let x1 = NcPoly::parse_inline(Q, Alphabet::Indexed(1), "x1").unwrap();
        assert_eq!(r.path_sum(1000).unwrap(), x1);
    }

    #[test]
    fn recover_blackbox_examples() {
        let ws = compact(1);
        let e = Embedding::new(ws.clone());
        let a = SubstAutomaton::new(&ws).unwrap();
        let g = NcPoly::parse_inline(Q, Alphabet::Indexed(1), "x1").unwrap();
        let img = e.phi_poly(&g).unwrap();
        let bb = a.recover_blackbox(&img).unwrap();
        let t = MatrixAssignment::new(Q, vec![FieldMatrix::from_i64(Q, &[&[5]])]).unwrap();
        assert_eq!(bb.eval(&t).unwrap(), FieldMatrix::from_i64(Q, &[&[5]]));
        let g = NcPoly::parse_inline(Q, Alphabet::Indexed(1), "7 + x1.x1").unwrap();
        let img = e.phi_poly(&g).unwrap();
        let bb = a.recover_blackbox(&img).unwrap();
        let zero = MatrixAssignment::new(Q, vec![FieldMatrix::zeros(Q, 2, 2)]).unwrap();
        assert_eq!(bb.eval(&zero).unwrap(), FieldMatrix::scalar(Q, 2, &Q.from_i64(7)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn circuit_round_trip(f in arb_poly(Q, Alphabet::Indexed(3), 3, 5)) {
            let ws = compact(3);
            let e = Embedding::new(ws.clone());
            let a = SubstAutomaton::new(&ws).unwrap();
            let c = Circuit::from_poly(&f);
            let img = e.phi_circuit(&c).unwrap();
            let r = a.recover_circuit(&img).unwrap();
            prop_assert_eq!(r.expand(3).unwrap(), f.clone());
            // grid size bound
            let q = a.state_count();
            prop_assert!(r.size() <= 4 * img.size() * q * q * q);
        }

        #[test]
        fn abp_round_trip(f in arb_poly(Q, Alphabet::Indexed(2), 2, 3)) {
            let ws = compact(2);
            let e = Embedding::new(ws.clone());
            let a = SubstAutomaton::new(&ws).unwrap();
            let p = Abp::from_poly(&f);
            let r = a.recover_abp(&e.phi_abp(&p).unwrap()).unwrap();
            prop_assert_eq!(r.expand(2).unwrap(), f);
        }

        #[test]
        fn blackbox_round_trip(f in arb_poly(Q, Alphabet::Indexed(2), 3, 4), seed in 0u64..1000) {
            let ws = compact(2);
            let e = Embedding::new(ws.clone());
            let a = SubstAutomaton::new(&ws).unwrap();
            let phi = e.phi_blackbox(&f).unwrap();
            let rec = a.recover_blackbox(&phi).unwrap();
            prop_assert!(crate::circuit::equal_whp(&rec, &f, 3, seed).unwrap());
        }
    }
}
