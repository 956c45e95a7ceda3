//! Noncommutative arithmetic circuits and algebraic branching programs.
//!
//! Both representations can be evaluated at matrix substitutions, expanded
//! into a dense [`NcPoly`], and serialized to a line-oriented text format.

mod abp;
mod blackbox;

pub use abp::{Abp, AbpEdge, AffineForm};
pub use blackbox::{equal_whp, BlackBox, FnBlackBox, MatrixAssignment, IDENTITY_TEST_TRIALS};

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::arith::{Field, FieldElem, FieldMatrix};
use crate::error::{Error, Result};
use crate::ncpoly::{parse_header, relocate, Alphabet, NcPoly, Word};

/// Per-gate support budget used by [`Circuit::expand`].
pub const DEFAULT_SUPPORT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Var(u8),
    Const(FieldElem),
    Add(usize, usize),
    /// Ordered product: left operand times right operand.
    Mul(usize, usize),
}

/// A circuit as a topologically ordered gate list; gates only reference
/// earlier gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    field: Field,
    alphabet: Alphabet,
    gates: Vec<Gate>,
    output: usize,
}

/// Incremental circuit construction with constant and variable sharing.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    field: Field,
    alphabet: Alphabet,
    gates: Vec<Gate>,
    vars: HashMap<u8, usize>,
    consts: HashMap<FieldElem, usize>,
}

impl CircuitBuilder {
    pub fn new(field: Field, alphabet: Alphabet) -> Self {
        CircuitBuilder {
            field,
            alphabet,
            gates: Vec::new(),
            vars: HashMap::new(),
            consts: HashMap::new(),
        }
    }

    pub fn var(&mut self, v: u8) -> usize {
        if let Some(&g) = self.vars.get(&v) {
            return g;
        }
        let g = self.push(Gate::Var(v));
        self.vars.insert(v, g);
        g
    }

    pub fn constant(&mut self, c: FieldElem) -> usize {
        if let Some(&g) = self.consts.get(&c) {
            return g;
        }
        let g = self.push(Gate::Const(c.clone()));
        self.consts.insert(c, g);
        g
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Mul(a, b))
    }

    /// Sum of a list of gates as a balanced tree; the zero constant if empty.
    pub fn sum(&mut self, items: &[usize]) -> usize {
        match items {
            [] => {
                let z = self.field.zero();
                self.constant(z)
            }
            [g] => *g,
            _ => {
                let (l, r) = items.split_at(items.len() / 2);
                let a = self.sum(l);
                let b = self.sum(r);
                self.add(a, b)
            }
        }
    }

    /// Ordered product of a list of gates as a balanced tree; 1 if empty.
    pub fn product(&mut self, items: &[usize]) -> usize {
        match items {
            [] => {
                let one = self.field.one();
                self.constant(one)
            }
            [g] => *g,
            _ => {
                let (l, r) = items.split_at(items.len() / 2);
                let a = self.product(l);
                let b = self.product(r);
                self.mul(a, b)
            }
        }
    }

    /// Gate computing a word as a balanced product of its letters.
    pub fn word(&mut self, w: &Word) -> usize {
        let letters: Vec<usize> = w.letters().iter().map(|&v| self.var(v)).collect();
        self.product(&letters)
    }

    /// Copies `c` into this builder, mapping its variables through `vars`.
    pub fn embed(&mut self, c: &Circuit, vars: &dyn Fn(&mut Self, u8) -> usize) -> usize {
        let mut map = Vec::with_capacity(c.gates.len());
        for g in &c.gates {
            let id = match g {
                Gate::Var(v) => vars(self, *v),
                Gate::Const(k) => self.constant(k.clone()),
                Gate::Add(a, b) => self.add(map[*a], map[*b]),
                Gate::Mul(a, b) => self.mul(map[*a], map[*b]),
            };
            map.push(id);
        }
        map[c.output]
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn finish(self, output: usize) -> Circuit {
        Circuit {
            field: self.field,
            alphabet: self.alphabet,
            gates: self.gates,
            output,
        }
        .pruned()
    }
}

impl Circuit {
    pub fn new(field: Field, alphabet: Alphabet, gates: Vec<Gate>, output: usize) -> Result<Self> {
        for (i, g) in gates.iter().enumerate() {
            let ok = match g {
                Gate::Var(v) => (*v as usize) < alphabet.size(),
                Gate::Const(c) => c.field() == field,
                Gate::Add(a, b) | Gate::Mul(a, b) => *a < i && *b < i,
            };
            if !ok {
                return Err(Error::Precondition(format!("invalid gate g{i}")));
            }
        }
        if output >= gates.len() {
            return Err(Error::Precondition("output gate out of range".into()));
        }
        Ok(Circuit {
            field,
            alphabet,
            gates,
            output,
        })
    }

    /// Sum-of-monomials circuit for a polynomial.
    pub fn from_poly(f: &NcPoly) -> Circuit {
        let mut b = CircuitBuilder::new(f.field(), f.alphabet());
        let mut terms = Vec::with_capacity(f.len());
        for (w, c) in f.terms() {
            let m = b.word(w);
            let t = if c.is_one() {
                m
            } else {
                let k = b.constant(c.clone());
                b.mul(k, m)
            };
            terms.push(t);
        }
        let out = b.sum(&terms);
        b.finish(out)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn var_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Var(_))).count()
    }

    /// Drops gates not reachable from the output and renumbers.
    pub fn pruned(&self) -> Circuit {
        let live = self.live_gates();
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let ng = match g {
                Gate::Add(a, b) => Gate::Add(map[*a], map[*b]),
                Gate::Mul(a, b) => Gate::Mul(map[*a], map[*b]),
                other => other.clone(),
            };
            map[i] = gates.len();
            gates.push(ng);
        }
        Circuit {
            field: self.field,
            alphabet: self.alphabet,
            gates,
            output: map[self.output],
        }
    }

    pub(crate) fn live_gates(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for i in (0..self.gates.len()).rev() {
            if !live[i] {
                continue;
            }
            if let Gate::Add(a, b) | Gate::Mul(a, b) = self.gates[i] {
                live[a] = true;
                live[b] = true;
            }
        }
        live
    }

    /// Gate-by-gate evaluation at a matrix substitution; constants become
    /// scalar matrices.
    pub fn evaluate(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        a.check_covers(self.field, self.alphabet)?;
        let live = self.live_gates();
        let n = a.dim();
        let mut vals: Vec<Option<FieldMatrix>> = vec![None; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let v = match g {
                Gate::Var(v) => a.matrix(*v).clone(),
                Gate::Const(c) => FieldMatrix::scalar(self.field, n, c),
                Gate::Add(l, r) => vals[*l].as_ref().unwrap().add(vals[*r].as_ref().unwrap())?,
                Gate::Mul(l, r) => vals[*l].as_ref().unwrap().mul(vals[*r].as_ref().unwrap())?,
            };
            vals[i] = Some(v);
        }
        Ok(vals[self.output].take().unwrap())
    }

    /// Dense expansion with the default support budget.
    pub fn expand(&self, degree_bound: usize) -> Result<NcPoly> {
        self.expand_with_budget(degree_bound, DEFAULT_SUPPORT_BUDGET)
    }

    /// Bottom-up sparse expansion. Terms above degree `degree_bound + 1` are
    /// discarded (truncation is a ring homomorphism); a surviving term of
    /// degree `degree_bound + 1` at the output means the bound was wrong.
    pub fn expand_with_budget(&self, degree_bound: usize, budget: usize) -> Result<NcPoly> {
        let live = self.live_gates();
        let cap = degree_bound + 1;
        let mut vals: Vec<Option<NcPoly>> = vec![None; self.gates.len()];
        let mut remaining: Vec<usize> = vec![0; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if live[i] {
                if let Gate::Add(a, b) | Gate::Mul(a, b) = g {
                    remaining[*a] += 1;
                    remaining[*b] += 1;
                }
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let v = match g {
                Gate::Var(v) => NcPoly::var(self.field, self.alphabet, *v),
                Gate::Const(c) => NcPoly::constant(self.field, self.alphabet, c.clone()),
                Gate::Add(l, r) => vals[*l].as_ref().unwrap().add(vals[*r].as_ref().unwrap())?,
                Gate::Mul(l, r) => {
                    let (lp, rp) = (vals[*l].as_ref().unwrap(), vals[*r].as_ref().unwrap());
                    mul_truncated(lp, rp, cap)?
                }
            };
            if v.len() > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            if let Gate::Add(a, b) | Gate::Mul(a, b) = g {
                for x in [*a, *b] {
                    remaining[x] -= 1;
                    if remaining[x] == 0 && x != self.output {
                        vals[x] = None;
                    }
                }
            }
            vals[i] = Some(v);
        }
        let out = vals[self.output].take().unwrap();
        if out.degree().is_some_and(|d| d > degree_bound) {
            return Err(Error::DegreeBoundExceeded(degree_bound));
        }
        Ok(out)
    }

    /// Replaces every `VAR x_i` gate by a fresh copy of `map[i]`.
    pub fn substitute(&self, map: &[Circuit]) -> Result<Circuit> {
        let Some(first) = map.first() else {
            return Err(Error::Precondition("empty substitution map".into()));
        };
        if map.len() < self.alphabet.size() {
            return Err(Error::Precondition(format!(
                "substitution map covers {} of {} variables",
                map.len(),
                self.alphabet.size()
            )));
        }
        for c in map {
            if c.field != self.field || first.field != c.field {
                return Err(Error::FieldMismatch(self.field.to_string(), c.field.to_string()));
            }
            if c.alphabet != first.alphabet {
                return Err(Error::AlphabetMismatch(
                    first.alphabet.to_string(),
                    c.alphabet.to_string(),
                ));
            }
        }
        let mut gates: Vec<Gate> = Vec::new();
        let mut idx = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let id = match g {
                Gate::Var(v) => {
                    let sub = &map[*v as usize];
                    let off = gates.len();
                    for sg in &sub.gates {
                        gates.push(match sg {
                            Gate::Add(a, b) => Gate::Add(a + off, b + off),
                            Gate::Mul(a, b) => Gate::Mul(a + off, b + off),
                            other => other.clone(),
                        });
                    }
                    off + sub.output
                }
                Gate::Const(c) => {
                    gates.push(Gate::Const(c.clone()));
                    gates.len() - 1
                }
                Gate::Add(a, b) => {
                    gates.push(Gate::Add(idx[*a], idx[*b]));
                    gates.len() - 1
                }
                Gate::Mul(a, b) => {
                    gates.push(Gate::Mul(idx[*a], idx[*b]));
                    gates.len() - 1
                }
            };
            idx.push(id);
        }
        Ok(Circuit {
            field: self.field,
            alphabet: first.alphabet,
            gates,
            output: idx[self.output],
        }
        .pruned())
    }

    /// An upper bound on the degree computed without expanding.
    pub fn formal_degree(&self) -> usize {
        let mut deg = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            deg[i] = match g {
                Gate::Var(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(a, b) => deg[*a].max(deg[*b]),
                Gate::Mul(a, b) => deg[*a] + deg[*b],
            };
        }
        deg[self.output]
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ncc field={} alphabet={}\n", self.field, self.alphabet);
        for (i, g) in self.gates.iter().enumerate() {
            let _ = match g {
                Gate::Var(v) => writeln!(s, "g{i} = VAR {}", self.alphabet.var_name(*v)),
                Gate::Const(c) => writeln!(s, "g{i} = CONST {c}"),
                Gate::Add(a, b) => writeln!(s, "g{i} = ADD g{a} g{b}"),
                Gate::Mul(a, b) => writeln!(s, "g{i} = MUL g{a} g{b}"),
            };
        }
        let _ = writeln!(s, "output g{}", self.output);
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (field, alphabet) = parse_header(header, "ncc", ln)?;
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut gates = Vec::new();
        let mut output = None;
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let lookup = |name: &str| {
                names
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::parse(ln, format!("unknown gate {name}")))
            };
            match toks.as_slice() {
                ["output", g] => output = Some(lookup(g)?),
                [name, "=", rest @ ..] => {
                    if output.is_some() {
                        return Err(Error::parse(ln, "gate after output line"));
                    }
                    let gate = match rest {
                        ["VAR", v] => Gate::Var(alphabet.parse_var(v).map_err(|e| relocate(e, ln))?),
                        ["CONST", c] => Gate::Const(field.parse_elem(c).map_err(|e| relocate(e, ln))?),
                        ["ADD", a, b] => Gate::Add(lookup(a)?, lookup(b)?),
                        ["MUL", a, b] => Gate::Mul(lookup(a)?, lookup(b)?),
                        _ => return Err(Error::parse(ln, format!("bad gate definition {line:?}"))),
                    };
                    if names.insert(name.to_string(), gates.len()).is_some() {
                        return Err(Error::parse(ln, format!("gate {name} redefined")));
                    }
                    gates.push(gate);
                }
                _ => return Err(Error::parse(ln, format!("unrecognized line {line:?}"))),
            }
        }
        let output = output.ok_or_else(|| Error::parse(0, "missing output line"))?;
        Circuit::new(field, alphabet, gates, output)
    }
}

/// Product with all terms above degree `cap` dropped.
pub(crate) fn mul_truncated(a: &NcPoly, b: &NcPoly, cap: usize) -> Result<NcPoly> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().to_string(), b.field().to_string()));
    }
    let mut out = NcPoly::zero(a.field(), a.alphabet());
    for (u, x) in a.terms() {
        for (v, y) in b.terms() {
            if u.len() + v.len() <= cap {
                out.add_term(u.concat(v), x * y);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn xy(s: &str) -> NcPoly {
        NcPoly::parse_inline(Q, Alphabet::Bivariate, s).unwrap()
    }

    #[test]
    fn evaluate_product_of_nilpotents() {
        let a = Alphabet::Indexed(2);
        let mut b = CircuitBuilder::new(Q, a);
        let (x1, x2) = (b.var(0), b.var(1));
        let m = b.mul(x1, x2);
        let c = b.finish(m);
        let asg = MatrixAssignment::new(
            Q,
            vec![
                FieldMatrix::from_i64(Q, &[&[0, 1], &[0, 0]]),
                FieldMatrix::from_i64(Q, &[&[0, 0], &[1, 0]]),
            ],
        )
        .unwrap();
        assert_eq!(c.evaluate(&asg).unwrap(), FieldMatrix::from_i64(Q, &[&[1, 0], &[0, 0]]));
    }

    #[test]
    fn identity_assignment_sums_coefficients() {
        let f = xy("3*xy - yx + 1/2 + 2*yyy");
        let c = Circuit::from_poly(&f);
        let asg = MatrixAssignment::new(Q, vec![FieldMatrix::identity(Q, 3); 2]).unwrap();
        let total = Q.parse_elem("9/2").unwrap();
        assert_eq!(c.evaluate(&asg).unwrap(), FieldMatrix::scalar(Q, 3, &total));
    }

    #[test]
    fn expand_examples() {
        let mut b = CircuitBuilder::new(Q, Alphabet::Bivariate);
        let (x, y) = (b.var(0), b.var(1));
        let s = b.add(x, y);
        let p = b.mul(s, s);
        let c = b.finish(p);
        assert_eq!(c.expand(2).unwrap(), xy("xx + xy + yx + yy"));
        assert_eq!(c.expand(1), Err(Error::DegreeBoundExceeded(1)));
        assert_eq!(c.expand_with_budget(2, 3), Err(Error::BudgetExceeded(3)));

        let mut b = CircuitBuilder::new(Q, Alphabet::Bivariate);
        let z = b.constant(Q.zero());
        assert!(b.finish(z).expand(0).unwrap().is_zero());
    }

    #[test]
    fn substitution_examples() {
        let target = Alphabet::Bivariate;
        let f1 = Circuit::from_poly(&xy("xy + yx"));
        let x1 = Circuit::from_poly(&NcPoly::var(Q, Alphabet::Indexed(1), 0));
        let s = x1.substitute(std::slice::from_ref(&f1)).unwrap();
        assert_eq!(s.expand(2).unwrap(), xy("xy + yx"));

        // identity map leaves the polynomial unchanged
        let g = xy("xyx - 2*yy + 3");
        let idmap = [
            Circuit::from_poly(&NcPoly::var(Q, target, 0)),
            Circuit::from_poly(&NcPoly::var(Q, target, 1)),
        ];
        assert_eq!(Circuit::from_poly(&g).substitute(&idmap).unwrap().expand(3).unwrap(), g);
    }

    #[test]
    fn naive_substitution_counterexample_via_circuits() {
        let a = Alphabet::Indexed(5);
        let f = NcPoly::from_text(
            "ncpoly field=Q alphabet=x1..x5\n1 x3.x1\n1 x4.x2\n1 x4.x1\n1 x5.x2\n",
        )
        .unwrap();
        assert_eq!(f.alphabet(), a);
        let map: Vec<Circuit> = (1..=5)
            .map(|i| Circuit::from_poly(&xy(&format!("x{}", "y".repeat(i)))))
            .collect();
        let got = Circuit::from_poly(&f).substitute(&map).unwrap().expand(12).unwrap();
        let want = xy("xyy + xyyy").mul(&xy("yxy + yyxyy")).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn substitution_size_bound() {
        let f = Circuit::from_poly(&NcPoly::parse_inline(Q, Alphabet::Indexed(2), "x1.x2 + x2.x2.x1").unwrap());
        let map = [Circuit::from_poly(&xy("xy + yx")), Circuit::from_poly(&xy("xxyy + yyxx"))];
        let s = f.substitute(&map).unwrap();
        let bound = f.size() + map.iter().map(Circuit::size).max().unwrap() * f.var_gate_count();
        assert!(s.size() <= bound);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let c = Circuit::from_poly(&xy("2*xy - 1/3*y + 1"));
        let text = c.to_text();
        assert!(text.starts_with("ncc field=Q alphabet=xy\n"));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);

        let bad = "ncc field=Q alphabet=xy\ng0 = VAR x\ng1 = MUL g0 g7\noutput g1\n";
        assert!(matches!(Circuit::from_text(bad), Err(Error::Parse { line: 3, .. })));
        assert!(Circuit::from_text("ncc field=Q alphabet=xy\ng0 = VAR x\n").is_err());
        assert!(Circuit::from_text("ncc field=Q alphabet=xy\ng0 = VAR z\noutput g0\n").is_err());
    }

    #[test]
    fn pruning_drops_dead_gates() {
        let mut b = CircuitBuilder::new(Q, Alphabet::Bivariate);
        let x = b.var(0);
        let y = b.var(1);
        let _dead = b.mul(y, y);
        let out = b.add(x, x);
        let c = b.finish(out);
        assert_eq!(c.size(), 2);
        assert_eq!(c.expand(1).unwrap(), xy("2*x"));
    }
}
