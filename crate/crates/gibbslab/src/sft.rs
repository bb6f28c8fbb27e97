//! Zero-one transition matrices, admissible words and the block-triangular
//! decomposition into irreducible components.
//!
//! States are indexed from 0 inside the library; files and reports use 1-based
//! labels.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    d: usize,
    bits: Vec<bool>,
}

impl TransitionMatrix {
    pub fn new(d: usize, bits: Vec<bool>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("alphabet size must be positive".into()));
        }
        if bits.len() != d * d {
            return Err(Error::Dimension(format!("expected {} entries, got {}", d * d, bits.len())));
        }
        Ok(TransitionMatrix { d, bits })
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..d * d).map(|k| f(k / d, k % d)).collect();
        TransitionMatrix { d, bits }
    }

    /// Rows given as strings of `0`/`1`.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let d = rows.len();
        let mut bits = Vec::with_capacity(d * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.trim();
            if r.len() != d {
                return Err(Error::Dimension(format!("row {} has length {}, expected {d}", i + 1, r.len())));
            }
            for c in r.chars() {
                match c {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    _ => return Err(Error::Syntax { pos: i + 1, msg: format!("bad matrix digit `{c}`") }),
                }
            }
        }
        Self::new(d, bits)
    }

    pub fn full(d: usize) -> Self {
        Self::from_fn(d, |_, _| true)
    }

    pub fn zero(d: usize) -> Self {
        Self::from_fn(d, |_, _| false)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.d + j] = v;
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(move |&j| self.get(i, j))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.d * self.d).filter(|&k| self.bits[k]).map(|k| (k / self.d, k % self.d))
    }

    /// Restriction to `states` (in the given order).
    pub fn restrict(&self, states: &[usize]) -> Self {
        Self::from_fn(states.len(), |a, b| self.get(states[a], states[b]))
    }

    /// Entrywise `self ≤ other`.
    pub fn is_contained_in(&self, other: &Self) -> bool {
        self.d == other.d && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn is_irreducible(&self) -> bool {
        is_irreducible(self)
    }

    pub fn rows_string(&self) -> Vec<String> {
        (0..self.d).map(|i| (0..self.d).map(|j| if self.get(i, j) { '1' } else { '0' }).collect()).collect()
    }
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransitionMatrix[{}]", self.rows_string().join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// A is irreducible.
    pub sigma1: bool,
    /// B ≤ A entrywise.
    pub sigma2: bool,
    /// B has a cycle, so its subshift is nonempty.
    pub sigma3: bool,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.sigma1 && self.sigma2 && self.sigma3
    }
}

pub fn check_conditions(a: &TransitionMatrix, b: &TransitionMatrix) -> Result<ConditionReport> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("A is {0}x{0} but B is {1}x{1}", a.dim(), b.dim())));
    }
    Ok(ConditionReport {
        sigma1: is_irreducible(a),
        sigma2: b.is_contained_in(a),
        sigma3: scc_decompose(b).blocks.iter().any(|c| c.nonempty_subshift),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted state ids.
    pub states: Vec<usize>,
    pub nonempty_subshift: bool,
}

impl Component {
    pub fn label(&self) -> String {
        let s: Vec<String> = self.states.iter().map(|x| (x + 1).to_string()).collect();
        format!("{{{}}}", s.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// `permutation[p]` is the state placed at position `p`.
    pub permutation: Vec<usize>,
    pub blocks: Vec<Component>,
    /// `block_index[state]` is the block containing `state`.
    pub block_index: Vec<usize>,
}

impl ComponentDecomposition {
    /// The permuted matrix P⁻¹MP.
    pub fn permuted(&self, m: &TransitionMatrix) -> TransitionMatrix {
        m.restrict(&self.permutation)
    }
}

/// Strongly connected components of the graph `i → j` iff `adj(i, j)`, in
/// Tarjan order (reverse topological).
pub(crate) fn tarjan(n: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    struct St {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(v: usize, n: usize, adj: &dyn Fn(usize, usize) -> bool, s: &mut St) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on[v] = true;
        for w in 0..n {
            if !adj(v, w) {
                continue;
            }
            match s.index[w] {
                None => {
                    visit(w, n, adj, s);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let mut s = St { index: vec![None; n], low: vec![0; n], on: vec![false; n], stack: vec![], next: 0, out: vec![] };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(v, n, &adj, &mut s);
        }
    }
    s.out
}

/// Components ordered so that edges only go forward; incomparable components
/// are ordered by their smallest state.
pub(crate) fn ordered_components(n: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let comps = tarjan(n, &adj);
    let m = comps.len();
    let mut of = vec![0; n];
    for (c, states) in comps.iter().enumerate() {
        for &s in states {
            of[s] = c;
        }
    }
    let mut succ = vec![vec![false; m]; m];
    let mut indeg = vec![0usize; m];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (of[i], of[j]);
            if a != b && adj(i, j) && !succ[a][b] {
                succ[a][b] = true;
                indeg[b] += 1;
            }
        }
    }
    let mut done = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let next = (0..m)
            .filter(|&c| !done[c] && indeg[c] == 0)
            .min_by_key(|&c| comps[c][0])
            .expect("condensation is acyclic");
        done[next] = true;
        for b in 0..m {
            if succ[next][b] {
                indeg[b] -= 1;
            }
        }
        order.push(comps[next].clone());
    }
    order
}

pub fn scc_decompose(b: &TransitionMatrix) -> ComponentDecomposition {
    let d = b.dim();
    let order = ordered_components(d, |i, j| b.get(i, j));
    let mut block_index = vec![0; d];
    let mut permutation = Vec::with_capacity(d);
    let mut blocks = Vec::with_capacity(order.len());
    for (k, states) in order.into_iter().enumerate() {
        for &s in &states {
            block_index[s] = k;
            permutation.push(s);
        }
        let nonempty = states.len() > 1 || b.get(states[0], states[0]);
        blocks.push(Component { states, nonempty_subshift: nonempty });
    }
    ComponentDecomposition { permutation, blocks, block_index }
}

pub fn is_irreducible(m: &TransitionMatrix) -> bool {
    tarjan(m.dim(), |i, j| m.get(i, j)).len() == 1
}

/// Streaming enumeration of the admissible words of length `n` in
/// lexicographic order. Length 0 yields nothing.
pub struct AdmissibleWords<'a> {
    m: &'a TransitionMatrix,
    n: usize,
    cur: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn admissible_words(m: &TransitionMatrix, n: usize) -> AdmissibleWords<'_> {
    AdmissibleWords { m, n, cur: Vec::new(), started: false, done: n == 0 }
}

impl AdmissibleWords<'_> {
    fn next_successor(&self, prev: usize, from: usize) -> Option<usize> {
        (from..self.m.dim()).find(|&j| self.m.get(prev, j))
    }

    /// Extend `cur` to full length with smallest choices; false if stuck.
    fn fill(&mut self) -> bool {
        while self.cur.len() < self.n {
            let prev = *self.cur.last().unwrap();
            match self.next_successor(prev, 0) {
                Some(j) => self.cur.push(j),
                None => return false,
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        loop {
            let Some(last) = self.cur.pop() else { return false };
            let next = if let Some(&prev) = self.cur.last() {
                self.next_successor(prev, last + 1)
            } else if last + 1 < self.m.dim() {
                Some(last + 1)
            } else {
                None
            };
            if let Some(j) = next {
                self.cur.push(j);
                if self.fill() {
                    return true;
                }
            }
        }
    }
}

impl Iterator for AdmissibleWords<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.cur.push(0);
            self.fill() || self.advance()
        } else {
            self.advance()
        };
        if ok {
            Some(self.cur.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Number of admissible words of length `n`: the entry sum of `M^{n-1}`.
pub fn count_admissible_words(m: &TransitionMatrix, n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let d = m.dim();
    let mut v = vec![1u128; d];
    for _ in 1..n {
        let mut w = vec![0u128; d];
        for (i, vi) in v.iter().enumerate() {
            for j in m.successors(i) {
                w[j] += vi;
            }
        }
        v = w;
    }
    v.iter().sum()
}

pub fn is_admissible(m: &TransitionMatrix, w: &[usize]) -> bool {
    w.iter().all(|&s| s < m.dim()) && w.windows(2).all(|p| m.get(p[0], p[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j2() -> [&'static str; 6] {
        ["110000", "110000", "001100", "001100", "000011", "000011"]
    }

    pub(crate) fn a52() -> TransitionMatrix {
        TransitionMatrix::from_rows(&["111100", "111100", "001111", "001111", "111111", "111111"]).unwrap()
    }

    #[test]
    fn conditions_three_component_example() {
        let b = TransitionMatrix::from_rows(&j2()).unwrap();
        let r = check_conditions(&a52(), &b).unwrap();
        assert_eq!(r, ConditionReport { sigma1: true, sigma2: true, sigma3: true });
    }

    #[test]
    fn conditions_single_loop() {
        let one = TransitionMatrix::from_rows(&["1"]).unwrap();
        assert!(check_conditions(&one, &one).unwrap().all());
    }

    #[test]
    fn conditions_acyclic_b() {
        let a = TransitionMatrix::full(3);
        let b = TransitionMatrix::from_rows(&["011", "001", "000"]).unwrap();
        let r = check_conditions(&a, &b).unwrap();
        assert_eq!(r, ConditionReport { sigma1: true, sigma2: true, sigma3: false });
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(check_conditions(&TransitionMatrix::full(2), &TransitionMatrix::full(3)).is_err());
    }

    #[test]
    fn decompose_block_diagonal() {
        let dec = scc_decompose(&TransitionMatrix::from_rows(&j2()).unwrap());
        let states: Vec<_> = dec.blocks.iter().map(|c| c.states.clone()).collect();
        assert_eq!(states, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert!(dec.blocks.iter().all(|c| c.nonempty_subshift));
        assert_eq!(dec.block_index, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn decompose_full_and_nilpotent() {
        assert_eq!(scc_decompose(&TransitionMatrix::full(4)).blocks.len(), 1);
        let dec = scc_decompose(&TransitionMatrix::from_rows(&["01", "00"]).unwrap());
        assert_eq!(dec.blocks.len(), 2);
        assert_eq!(dec.blocks[0].states, vec![0]);
        assert!(dec.blocks.iter().all(|c| !c.nonempty_subshift));
    }

    #[test]
    fn decomposition_is_upper_triangular() {
        let b = TransitionMatrix::from_rows(&["100", "110", "011"]).unwrap();
        let dec = scc_decompose(&b);
        assert_eq!(dec.permutation, vec![2, 1, 0]);
        let p = dec.permuted(&b);
        for i in 0..3 {
            for j in 0..i {
                assert!(!p.get(i, j));
            }
        }
    }

    #[test]
    fn word_counts() {
        assert_eq!(admissible_words(&TransitionMatrix::full(2), 3).count(), 8);
        let fib = TransitionMatrix::from_rows(&["11", "10"]).unwrap();
        assert_eq!(admissible_words(&fib, 4).count(), 8);
        assert_eq!(count_admissible_words(&fib, 4), 8);
        assert_eq!(admissible_words(&a52(), 2).count(), 28);
        assert_eq!(admissible_words(&fib, 0).count(), 0);
    }

    #[test]
    fn words_skip_dead_ends() {
        let m = TransitionMatrix::from_rows(&["01", "00"]).unwrap();
        let w: Vec<_> = admissible_words(&m, 2).collect();
        assert_eq!(w, vec![vec![0, 1]]);
        assert_eq!(admissible_words(&m, 3).count(), 0);
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&TransitionMatrix::full(3)));
        assert!(!is_irreducible(&TransitionMatrix::from_rows(&["11", "01"]).unwrap()));
        let a53 = TransitionMatrix::from_rows(&[
            "11111111", "11111111", "11110000", "11111100", "11001111", "11111111", "11111111", "11111111",
        ])
        .unwrap();
        assert!(is_irreducible(&a53));
    }
}
