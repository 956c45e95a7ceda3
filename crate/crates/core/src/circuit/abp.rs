use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::arith::{Field, FieldElem, FieldMatrix};
use crate::error::{Error, Result};
use crate::ncpoly::{parse_header, relocate, Alphabet, NcPoly, Word};

use super::{mul_truncated, MatrixAssignment};

/// Edge label `c0 + Σ c_v · v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    constant: FieldElem,
    coeffs: BTreeMap<u8, FieldElem>,
}

impl AffineForm {
    pub fn constant(c: FieldElem) -> Self {
        AffineForm {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(field: Field, v: u8, c: FieldElem) -> Self {
        let mut a = AffineForm::constant(field.zero());
        a.add_var(v, c);
        a
    }

    pub fn add_constant(&mut self, c: &FieldElem) {
        self.constant += c;
    }

    pub fn add_var(&mut self, v: u8, c: FieldElem) {
        let e = self.coeffs.entry(v).or_insert_with(|| c.field().zero());
        *e += &c;
        if e.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn constant_term(&self) -> &FieldElem {
        &self.constant
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u8, &FieldElem)> {
        self.coeffs.iter().map(|(v, c)| (*v, c))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn to_poly(&self, alphabet: Alphabet) -> NcPoly {
        let field = self.constant.field();
        let mut p = NcPoly::constant(field, alphabet, self.constant.clone());
        for (v, c) in &self.coeffs {
            p.add_term(Word::letter(*v), c.clone());
        }
        p
    }

    pub fn evaluate(&self, a: &MatrixAssignment) -> FieldMatrix {
        let mut m = FieldMatrix::scalar(a.field(), a.dim(), &self.constant);
        for (v, c) in &self.coeffs {
            m = m.add(&a.matrix(*v).scale(c)).expect("assignment dimensions are uniform");
        }
        m
    }

    pub fn render(&self, alphabet: Alphabet) -> String {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (v, c) in &self.coeffs {
            if c.is_one() {
                parts.push(alphabet.var_name(*v));
            } else {
                parts.push(format!("{}*{}", c, alphabet.var_name(*v)));
            }
        }
        parts.join(" + ")
    }

    pub fn parse(field: Field, alphabet: Alphabet, s: &str) -> Result<Self> {
        let mut a = AffineForm::constant(field.zero());
        for tok in s.split('+').map(str::trim) {
            if tok.is_empty() {
                return Err(Error::parse(0, format!("bad affine form {s:?}")));
            }
            match tok.split_once('*') {
                Some((c, v)) => a.add_var(alphabet.parse_var(v.trim())?, field.parse_elem(c.trim())?),
                None => match field.parse_elem(tok) {
                    Ok(c) => a.add_constant(&c),
                    Err(_) => a.add_var(alphabet.parse_var(tok)?, field.one()),
                },
            }
        }
        Ok(a)
    }
}

/// An edge from node `from` of layer `k` to node `to` of layer `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub label: AffineForm,
}

/// Layered algebraic branching program. Layer 0 holds the single source and
/// the last layer the single sink; the computed polynomial is the sum over
/// source-to-sink paths of the ordered product of edge labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abp {
    field: Field,
    alphabet: Alphabet,
    widths: Vec<usize>,
    edges: Vec<Vec<AbpEdge>>,
}

impl Abp {
    pub fn new(field: Field, alphabet: Alphabet, widths: Vec<usize>, edges: Vec<Vec<AbpEdge>>) -> Result<Self> {
        if widths.is_empty() || widths[0] != 1 || *widths.last().unwrap() != 1 {
            return Err(Error::Precondition("source and sink layers must have width 1".into()));
        }
        if edges.len() + 1 != widths.len() {
            return Err(Error::Precondition("edge layers must number one less than node layers".into()));
        }
        for (k, layer) in edges.iter().enumerate() {
            for e in layer {
                if e.from >= widths[k] || e.to >= widths[k + 1] {
                    return Err(Error::Precondition(format!("edge out of range in layer {k}")));
                }
                if e.label.constant.field() != field {
                    return Err(Error::FieldMismatch(field.to_string(), e.label.constant.field().to_string()));
                }
                if e.label.coeffs.keys().any(|&v| v as usize >= alphabet.size()) {
                    return Err(Error::VariableOutOfRange(format!("edge label in layer {k}")));
                }
            }
        }
        Ok(Abp {
            field,
            alphabet,
            widths,
            edges,
        })
    }

    /// Single-edge program computing an affine form.
    pub fn from_affine(field: Field, alphabet: Alphabet, label: AffineForm) -> Result<Self> {
        Abp::new(
            field,
            alphabet,
            vec![1, 1],
            vec![vec![AbpEdge { from: 0, to: 0, label }]],
        )
    }

    /// One parallel path per monomial, padded with unit edges to a common
    /// depth.
    pub fn from_poly(f: &NcPoly) -> Abp {
        let field = f.field();
        let depth = f.degree().unwrap_or(0).max(1);
        let mut widths = vec![1usize];
        widths.extend(std::iter::repeat_n(0, depth - 1));
        widths.push(1);
        let mut edges: Vec<Vec<AbpEdge>> = vec![Vec::new(); depth];
        for (w, c) in f.terms() {
            let mut labels: Vec<AffineForm> = w
                .letters()
                .iter()
                .map(|&v| AffineForm::var(field, v, field.one()))
                .collect();
            labels.resize(depth, AffineForm::constant(field.one()));
            // the coefficient goes on the first edge
            let lead = labels[0].coeffs().next().map(|(v, _)| v);
            labels[0] = match lead {
                Some(v) => AffineForm::var(field, v, c.clone()),
                None => AffineForm::constant(c.clone()),
            };
            let mut prev = 0;
            for (k, label) in labels.into_iter().enumerate() {
                let next = if k + 1 == depth {
                    0
                } else {
                    widths[k + 1] += 1;
                    widths[k + 1] - 1
                };
                edges[k].push(AbpEdge { from: prev, to: next, label });
                prev = next;
            }
        }
        Abp {
            field,
            alphabet: f.alphabet(),
            widths,
            edges,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn layers(&self) -> &[Vec<AbpEdge>] {
        &self.edges
    }

    /// Number of edge layers (the path length).
    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    pub fn node_count(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Layer-by-layer transfer evaluation.
    pub fn evaluate(&self, a: &MatrixAssignment) -> Result<FieldMatrix> {
        a.check_covers(self.field, self.alphabet)?;
        let n = a.dim();
        let mut cur = vec![FieldMatrix::identity(self.field, n)];
        for (k, layer) in self.edges.iter().enumerate() {
            let mut next = vec![FieldMatrix::zeros(self.field, n, n); self.widths[k + 1]];
            for e in layer {
                let t = cur[e.from].mul(&e.label.evaluate(a))?;
                next[e.to] = next[e.to].add(&t)?;
            }
            cur = next;
        }
        Ok(cur.swap_remove(0))
    }

    pub fn expand(&self, degree_bound: usize) -> Result<NcPoly> {
        self.expand_with_budget(degree_bound, super::DEFAULT_SUPPORT_BUDGET)
    }

    pub fn expand_with_budget(&self, degree_bound: usize, budget: usize) -> Result<NcPoly> {
        let cap = degree_bound + 1;
        let mut cur = vec![NcPoly::one(self.field, self.alphabet)];
        for (k, layer) in self.edges.iter().enumerate() {
            let mut next = vec![NcPoly::zero(self.field, self.alphabet); self.widths[k + 1]];
            for e in layer {
                let t = mul_truncated(&cur[e.from], &e.label.to_poly(self.alphabet), cap)?;
                next[e.to] = next[e.to].add(&t)?;
                if next[e.to].len() > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
            }
            cur = next;
        }
        let out = cur.swap_remove(0);
        if out.degree().is_some_and(|d| d > degree_bound) {
            return Err(Error::DegreeBoundExceeded(degree_bound));
        }
        Ok(out)
    }

    /// Brute-force sum over all source-to-sink paths; fails if there are
    /// more than `max_paths` of them.
    pub fn path_sum(&self, max_paths: usize) -> Result<NcPoly> {
        let mut acc = NcPoly::zero(self.field, self.alphabet);
        let mut count = 0usize;
        let mut stack: Vec<(usize, usize, NcPoly)> = vec![(0, 0, NcPoly::one(self.field, self.alphabet))];
        while let Some((layer, node, prod)) = stack.pop() {
            if layer == self.edges.len() {
                count += 1;
                if count > max_paths {
                    return Err(Error::BudgetExceeded(max_paths));
                }
                acc = acc.add(&prod)?;
                continue;
            }
            for e in self.edges[layer].iter().filter(|e| e.from == node) {
                stack.push((layer + 1, e.to, prod.mul(&e.label.to_poly(self.alphabet))?));
            }
        }
        Ok(acc)
    }

    /// Removes nodes that are not on any source-to-sink path.
    pub fn pruned(&self) -> Abp {
        let depth = self.edges.len();
        let mut fwd: Vec<Vec<bool>> = self.widths.iter().map(|&w| vec![false; w]).collect();
        fwd[0][0] = true;
        for k in 0..depth {
            for e in &self.edges[k] {
                if fwd[k][e.from] && !e.label.is_zero() {
                    fwd[k + 1][e.to] = true;
                }
            }
        }
        let mut bwd: Vec<Vec<bool>> = self.widths.iter().map(|&w| vec![false; w]).collect();
        bwd[depth][0] = true;
        for k in (0..depth).rev() {
            for e in &self.edges[k] {
                if bwd[k + 1][e.to] && !e.label.is_zero() {
                    bwd[k][e.from] = true;
                }
            }
        }
        if !fwd[depth][0] {
            return Abp {
                field: self.field,
                alphabet: self.alphabet,
                widths: vec![1; depth + 1],
                edges: vec![Vec::new(); depth],
            };
        }
        let mut remap: Vec<Vec<Option<usize>>> = Vec::with_capacity(depth + 1);
        let mut widths = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            let mut next = 0;
            let m: Vec<Option<usize>> = (0..self.widths[k])
                .map(|i| {
                    (fwd[k][i] && bwd[k][i]).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect();
            widths.push(next);
            remap.push(m);
        }
        let edges = (0..depth)
            .map(|k| {
                self.edges[k]
                    .iter()
                    .filter(|e| !e.label.is_zero())
                    .filter_map(|e| {
                        Some(AbpEdge {
                            from: remap[k][e.from]?,
                            to: remap[k + 1][e.to]?,
                            label: e.label.clone(),
                        })
                    })
                    .collect()
            })
            .collect();
        Abp {
            field: self.field,
            alphabet: self.alphabet,
            widths,
            edges,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ncabp field={} alphabet={}\n", self.field, self.alphabet);
        let widths: Vec<String> = self.widths.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "layers {}", widths.join(" "));
        for (k, layer) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "layer {k}");
            for e in layer {
                let _ = writeln!(s, "edge {} {} {}", e.from, e.to, e.label.render(self.alphabet));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Abp> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let (field, alphabet) = parse_header(header, "ncabp", ln)?;
        let (ln, wl) = lines.next().ok_or_else(|| Error::parse(ln + 1, "missing layers line"))?;
        let widths: Vec<usize> = wl
            .strip_prefix("layers")
            .ok_or_else(|| Error::parse(ln, "expected `layers <w0> <w1> ...`"))?
            .split_whitespace()
            .map(|w| w.parse::<usize>().map_err(|_| Error::parse(ln, "bad layer width")))
            .collect::<Result<_>>()?;
        let mut edges: Vec<Vec<AbpEdge>> = vec![Vec::new(); widths.len().saturating_sub(1)];
        let mut current: Option<usize> = None;
        for (ln, line) in lines {
            if let Some(k) = line.strip_prefix("layer ") {
                let k: usize = k.trim().parse().map_err(|_| Error::parse(ln, "bad layer index"))?;
                if k >= edges.len() {
                    return Err(Error::parse(ln, "layer index out of range"));
                }
                current = Some(k);
            } else if let Some(rest) = line.strip_prefix("edge ") {
                let k = current.ok_or_else(|| Error::parse(ln, "edge before any layer line"))?;
                let mut it = rest.splitn(3, char::is_whitespace);
                let (Some(u), Some(v), Some(label)) = (it.next(), it.next(), it.next()) else {
                    return Err(Error::parse(ln, "expected `edge <u> <v> <affine form>`"));
                };
                let from = u.parse().map_err(|_| Error::parse(ln, "bad node index"))?;
                let to = v.parse().map_err(|_| Error::parse(ln, "bad node index"))?;
                let label = AffineForm::parse(field, alphabet, label).map_err(|e| relocate(e, ln))?;
                edges[k].push(AbpEdge { from, to, label });
            } else {
                return Err(Error::parse(ln, format!("unrecognized line {line:?}")));
            }
        }
        Abp::new(field, alphabet, widths, edges).map_err(|e| relocate(e, 0))
    }
}
