//! Block potentials and the perturbed family Φ(ε,·) = φ(ε,·) + χ_N ψ(ε,·).

pub mod expr;

use std::collections::BTreeMap;

pub use expr::{parse_weight_expr, parse_with_params, EpsExpr, Params};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::real::Real;
use crate::sft::{admissible_words, TransitionMatrix};

/// One table entry: the ε-expression and, for φ, its ε→0 limit.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialEntry {
    pub expr: EpsExpr,
    /// Explicit limit; when absent the expression is evaluated at ε = 0.
    pub limit: Option<EpsExpr>,
}

impl PotentialEntry {
    pub fn new(expr: EpsExpr) -> Self {
        PotentialEntry { expr, limit: None }
    }

    pub fn with_limit(expr: EpsExpr, limit: EpsExpr) -> Self {
        PotentialEntry { expr, limit: Some(limit) }
    }

    pub fn limit_value<T: Real>(&self, params: &Params) -> Result<T> {
        match &self.limit {
            Some(l) => l.eval(&T::zero(), params),
            None => self.expr.eval(&T::zero(), params),
        }
    }
}

/// A 2-block potential: a value for every pair ij in its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPotential {
    d: usize,
    entries: Vec<Option<PotentialEntry>>,
}

impl BlockPotential {
    pub fn new(d: usize) -> Self {
        BlockPotential { d, entries: vec![None; d * d] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn set(&mut self, i: usize, j: usize, e: PotentialEntry) {
        self.entries[i * self.d + j] = Some(e);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&PotentialEntry> {
        self.entries[i * self.d + j].as_ref()
    }

    pub fn defined(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.d * self.d).filter(|&k| self.entries[k].is_some()).map(|k| (k / self.d, k % self.d))
    }

    pub fn mentions_sin(&self) -> bool {
        self.entries.iter().flatten().any(|e| e.expr.mentions_sin())
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationFamily {
    a: TransitionMatrix,
    b: TransitionMatrix,
    n: TransitionMatrix,
    phi: BlockPotential,
    psi: BlockPotential,
    params: Params,
    eps0: f64,
}

impl PerturbationFamily {
    /// Assemble the family. B ≤ A is required, φ must cover exactly the
    /// A-edges and ψ exactly N = {A = 1, B = 0}.
    pub fn new(
        a: TransitionMatrix,
        b: TransitionMatrix,
        phi: BlockPotential,
        psi: BlockPotential,
        params: Params,
        eps0: f64,
    ) -> Result<Self> {
        let d = a.dim();
        if b.dim() != d || phi.dim() != d || psi.dim() != d {
            return Err(Error::Dimension("A, B, phi and psi must share the alphabet".into()));
        }
        if !b.is_contained_in(&a) {
            let (i, j) = b.edges().find(|&(i, j)| !a.get(i, j)).unwrap();
            return Err(Error::Condition(format!("B({},{})=1 but A({},{})=0", i + 1, j + 1, i + 1, j + 1)));
        }
        let n = TransitionMatrix::from_fn(d, |i, j| a.get(i, j) && !b.get(i, j));
        for (i, j) in phi.defined() {
            if !a.get(i, j) {
                return Err(Error::Domain(format!("phi entry ({},{}) is not an A-edge", i + 1, j + 1)));
            }
        }
        for (i, j) in a.edges() {
            let Some(e) = phi.get(i, j) else {
                return Err(Error::Coverage(format!("phi has no entry for the A-edge ({},{})", i + 1, j + 1)));
            };
            let lim: Result<f64> = e.limit_value(&params);
            if lim.is_err() {
                return Err(Error::Coverage(format!(
                    "phi entry ({},{}) = {} has no finite value at eps = 0; give an explicit limit",
                    i + 1,
                    j + 1,
                    e.expr
                )));
            }
        }
        for (i, j) in psi.defined() {
            if !n.get(i, j) {
                return Err(Error::Domain(format!("psi entry ({},{}) lies outside N", i + 1, j + 1)));
            }
        }
        if let Some((i, j)) = n.edges().find(|&(i, j)| psi.get(i, j).is_none()) {
            return Err(Error::Coverage(format!("psi has no entry for the N-pair ({},{})", i + 1, j + 1)));
        }
        Ok(PerturbationFamily { a, b, n, phi, psi, params, eps0 })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &TransitionMatrix {
        &self.a
    }

    pub fn b(&self) -> &TransitionMatrix {
        &self.b
    }

    /// The pair set N as a 0-1 matrix.
    pub fn n_set(&self) -> &TransitionMatrix {
        &self.n
    }

    pub fn phi(&self) -> &BlockPotential {
        &self.phi
    }

    pub fn psi(&self) -> &BlockPotential {
        &self.psi
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Replace a parameter value (expression without `eps`).
    pub fn set_param(&mut self, name: &str, value: EpsExpr) -> Result<()> {
        if !self.params.contains_key(name) {
            return Err(Error::UnknownIdentifier(name.into()));
        }
        if value.mentions_eps() {
            return Err(Error::Domain(format!("parameter {name} may not depend on eps")));
        }
        self.params.insert(name.into(), value);
        Ok(())
    }

    pub fn mentions_sin(&self) -> bool {
        self.phi.mentions_sin() || self.psi.mentions_sin()
    }

    /// Φ(ε, ij) for an A-edge.
    pub fn potential<T: Real>(&self, i: usize, j: usize, eps: &T) -> Result<T> {
        let e = self.phi.get(i, j).ok_or_else(|| Error::Domain(format!("({},{}) is not an A-edge", i + 1, j + 1)))?;
        let mut v = e.expr.eval(eps, &self.params)?;
        if self.n.get(i, j) {
            v += self.psi.get(i, j).unwrap().expr.eval(eps, &self.params)?;
        }
        Ok(v)
    }

    pub fn phi_limit<T: Real>(&self, i: usize, j: usize) -> Result<T> {
        self.phi
            .get(i, j)
            .ok_or_else(|| Error::Domain(format!("({},{}) is not an A-edge", i + 1, j + 1)))?
            .limit_value(&self.params)
    }

    /// W(ij) = A(ij) e^{Φ(ε,ij)}, zero outside `restrict` when given.
    pub fn weighted_matrix<T: Real>(&self, eps: &T, restrict: Option<&[usize]>) -> Result<Mat<T>> {
        let d = self.dim();
        let mut inside = vec![restrict.is_none(); d];
        if let Some(r) = restrict {
            for &s in r {
                inside[s] = true;
            }
        }
        let mut w = Mat::zeros(d, d);
        for (i, j) in self.a.edges() {
            if inside[i] && inside[j] {
                w[(i, j)] = self.potential(i, j, eps)?.exp();
            }
        }
        Ok(w)
    }

    /// The unperturbed weights e^{φ(ij)} on B-edges.
    pub fn limit_matrix<T: Real>(&self) -> Result<Mat<T>> {
        let d = self.dim();
        let mut w = Mat::zeros(d, d);
        for (i, j) in self.b.edges() {
            w[(i, j)] = self.phi_limit::<T>(i, j)?.exp();
        }
        Ok(w)
    }
}

/// Numeric proxies for the potential conditions along a decreasing grid.
#[derive(Clone, Debug)]
pub struct PotentialReport {
    pub grid: Vec<f64>,
    /// sup over A-edges of |φ(ε,·) − φ|.
    pub phi_sup_diff: Vec<f64>,
    /// max over N of ψ(ε,·); empty when N is empty.
    pub psi_max: Vec<f64>,
    pub phi1: bool,
    pub phi2: bool,
    /// Always true for 2-block potentials with bounded tables.
    pub phi3: bool,
}

impl PotentialReport {
    pub fn all(&self) -> bool {
        self.phi1 && self.phi2 && self.phi3
    }
}

/// ψ must fall below this at the smallest grid point.
pub const PSI_DIVERGENCE_THRESHOLD: f64 = -5.0;

pub fn verify_potential_conditions(f: &PerturbationFamily, eps_grid: &[f64]) -> PotentialReport {
    let mut phi_sup_diff = Vec::new();
    let mut psi_max = Vec::new();
    let mut ok = true;
    for &eps in eps_grid {
        let mut sup = 0.0f64;
        for (i, j) in f.a.edges() {
            let e = f.phi.get(i, j).unwrap();
            match (e.expr.eval::<f64>(&eps, &f.params), e.limit_value::<f64>(&f.params)) {
                (Ok(v), Ok(l)) => sup = sup.max((v - l).abs()),
                _ => ok = false,
            }
        }
        phi_sup_diff.push(sup);
        if f.n.ones() > 0 {
            let mut m = f64::NEG_INFINITY;
            for (i, j) in f.n.edges() {
                match f.psi.get(i, j).unwrap().expr.eval::<f64>(&eps, &f.params) {
                    Ok(v) => m = m.max(v),
                    Err(_) => ok = false,
                }
            }
            psi_max.push(m);
        }
    }
    let phi1 = ok
        && match (phi_sup_diff.first(), phi_sup_diff.last()) {
            (Some(&a), Some(&b)) => b <= 1e-6 || b <= a / 10.0,
            _ => true,
        };
    let phi2 = ok
        && match (psi_max.first(), psi_max.last()) {
            (Some(&a), Some(&b)) => b <= PSI_DIVERGENCE_THRESHOLD && b < a,
            _ => true,
        };
    PotentialReport { grid: eps_grid.to_vec(), phi_sup_diff, psi_max, phi1, phi2, phi3: true }
}

/// A family whose potential depends on the first `k` coordinates.
#[derive(Clone, Debug)]
pub struct KBlockFamily {
    pub a: TransitionMatrix,
    pub b: TransitionMatrix,
    pub k: usize,
    /// φ on every admissible k-word.
    pub phi: BTreeMap<Vec<usize>, PotentialEntry>,
    /// ψ on every admissible k-word whose first pair lies in N.
    pub psi: BTreeMap<Vec<usize>, EpsExpr>,
    pub params: Params,
    pub eps0: f64,
}

impl KBlockFamily {
    /// View a 2-block family as a k-block one that ignores the extra coordinates.
    pub fn from_two_block(f: &PerturbationFamily, k: usize) -> Self {
        assert!(k >= 2);
        let mut phi = BTreeMap::new();
        let mut psi = BTreeMap::new();
        for w in admissible_words(&f.a, k) {
            phi.insert(w.clone(), f.phi.get(w[0], w[1]).unwrap().clone());
            if f.n.get(w[0], w[1]) {
                psi.insert(w.clone(), f.psi.get(w[0], w[1]).unwrap().expr.clone());
            }
        }
        KBlockFamily { a: f.a.clone(), b: f.b.clone(), k, phi, psi, params: f.params.clone(), eps0: f.eps0 }
    }
}

pub struct Recoded {
    pub family: PerturbationFamily,
    /// New state s stands for the (k−1)-word `words[s]`.
    pub words: Vec<Vec<usize>>,
}

impl Recoded {
    /// Translate an original word of length ≥ k−1 into the recoded alphabet.
    pub fn encode(&self, w: &[usize]) -> Option<Vec<usize>> {
        let m = self.words.first()?.len();
        if w.len() < m {
            return None;
        }
        w.windows(m).map(|u| self.words.iter().position(|x| x == u)).collect()
    }
}

/// Higher-block recoding: the alphabet becomes the admissible (k−1)-words and
/// the k-block potential becomes a 2-block one.
pub fn recode_higher_block(f: &KBlockFamily) -> Result<Recoded> {
    if f.k < 2 {
        return Err(Error::Domain("block order must be at least 2".into()));
    }
    let words: Vec<Vec<usize>> = admissible_words(&f.a, f.k - 1).collect();
    let m = words.len();
    let joined = |u: &[usize], v: &[usize]| -> Option<Vec<usize>> {
        if u[1..] != v[..v.len() - 1] || !f.a.get(*u.last().unwrap(), *v.last().unwrap()) {
            return None;
        }
        let mut w = u.to_vec();
        w.push(*v.last().unwrap());
        Some(w)
    };
    let a = TransitionMatrix::from_fn(m, |s, t| joined(&words[s], &words[t]).is_some());
    let b = TransitionMatrix::from_fn(m, |s, t| joined(&words[s], &words[t]).is_some_and(|w| f.b.get(w[0], w[1])));
    let mut phi = BlockPotential::new(m);
    let mut psi = BlockPotential::new(m);
    for s in 0..m {
        for t in 0..m {
            let Some(w) = joined(&words[s], &words[t]) else { continue };
            let e = f.phi.get(&w).ok_or_else(|| Error::Coverage(format!("phi has no entry for the word {w:?}")))?;
            phi.set(s, t, e.clone());
            if !f.b.get(w[0], w[1]) {
                let e = f.psi.get(&w).ok_or_else(|| Error::Coverage(format!("psi has no entry for the word {w:?}")))?;
                psi.set(s, t, PotentialEntry::new(e.clone()));
            }
        }
    }
    let family = PerturbationFamily::new(a, b, phi, psi, f.params.clone(), f.eps0)?;
    Ok(Recoded { family, words })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn entry(s: &str) -> PotentialEntry {
        PotentialEntry::new(parse_with_params(s, &|n| n == "s").unwrap())
    }

    /// The 6-state three-component family with parameter s.
    pub(crate) fn family_5_2(s: &str) -> PerturbationFamily {
        let a = TransitionMatrix::from_rows(&["111100", "111100", "001111", "001111", "111111", "111111"]).unwrap();
        let b = TransitionMatrix::from_rows(&["110000", "110000", "001100", "001100", "000011", "000011"]).unwrap();
        let mut phi = BlockPotential::new(6);
        let mut psi = BlockPotential::new(6);
        for (i, j) in a.edges() {
            phi.set(i, j, entry("0"));
            let (bi, bj) = (i / 2, j / 2);
            let w = match (bi, bj) {
                (0, 1) | (1, 2) => "log(eps)",
                (2, 1) => "s*log(eps)",
                (2, 0) => "(sin(1/eps)/3+1)*log(eps)",
                _ => continue,
            };
            psi.set(i, j, entry(w));
        }
        let mut params = Params::new();
        params.insert("s".into(), parse_weight_expr(s).unwrap());
        PerturbationFamily::new(a, b, phi, psi, params, 0.5).unwrap()
    }

    #[test]
    fn n_of_three_component_example() {
        let f = family_5_2("1");
        assert_eq!(f.n_set().ones(), 16);
    }

    #[test]
    fn b_equal_a_has_empty_n() {
        let a = TransitionMatrix::full(2);
        let mut phi = BlockPotential::new(2);
        for (i, j) in a.edges() {
            phi.set(i, j, entry("eps"));
        }
        let f = PerturbationFamily::new(a.clone(), a, phi, BlockPotential::new(2), Params::new(), 1.0).unwrap();
        assert_eq!(f.n_set().ones(), 0);
        let w: Mat<f64> = f.weighted_matrix(&0.5, None).unwrap();
        assert!((w[(0, 1)] - 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn family_errors() {
        let a = TransitionMatrix::full(2);
        let b = TransitionMatrix::from_rows(&["10", "01"]).unwrap();
        let mut phi = BlockPotential::new(2);
        for (i, j) in a.edges() {
            phi.set(i, j, entry("0"));
        }
        let mut psi = BlockPotential::new(2);
        psi.set(0, 0, entry("log(eps)"));
        let err = PerturbationFamily::new(a.clone(), b.clone(), phi.clone(), psi, Params::new(), 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err:?}");
        let err =
            PerturbationFamily::new(a.clone(), b.clone(), phi.clone(), BlockPotential::new(2), Params::new(), 1.0)
                .unwrap_err();
        assert!(matches!(err, Error::Coverage(_)), "{err:?}");
        let err = PerturbationFamily::new(a, b, BlockPotential::new(2), BlockPotential::new(2), Params::new(), 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::Coverage(_)), "{err:?}");
    }

    #[test]
    fn restricted_weights_of_three_component_example() {
        let f = family_5_2("1");
        let w: Mat<f64> = f.weighted_matrix(&0.01, Some(&[2, 3, 4, 5])).unwrap();
        let sub = w.principal(&[2, 3, 4, 5]);
        let want = [[1.0, 1.0, 0.01, 0.01], [1.0, 1.0, 0.01, 0.01], [0.01, 0.01, 1.0, 1.0], [0.01, 0.01, 1.0, 1.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert!((sub[(i, j)] - want[i][j]).abs() < 1e-15, "{i}{j}");
            }
        }
        assert_eq!(w[(0, 0)], 0.0);
    }

    #[test]
    fn potential_conditions_of_three_component_example() {
        let f = family_5_2("0.5");
        let grid: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
        let r = verify_potential_conditions(&f, &grid);
        assert!(r.all(), "{r:?}");
        assert!((r.psi_max[7] - 0.5 * 1e-8f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_psi_violates_divergence() {
        let a = TransitionMatrix::full(2);
        let b = TransitionMatrix::from_rows(&["10", "01"]).unwrap();
        let mut phi = BlockPotential::new(2);
        for (i, j) in a.edges() {
            phi.set(i, j, entry("0"));
        }
        let mut psi = BlockPotential::new(2);
        psi.set(0, 1, entry("0"));
        psi.set(1, 0, entry("0"));
        let f = PerturbationFamily::new(a, b, phi, psi, Params::new(), 1.0).unwrap();
        let r = verify_potential_conditions(&f, &[0.1, 0.01, 0.001]);
        assert!(!r.phi2 && r.phi1);
    }

    #[test]
    fn k2_recoding_is_identity() {
        let f = family_5_2("1");
        let r = recode_higher_block(&KBlockFamily::from_two_block(&f, 2)).unwrap();
        assert_eq!(r.family.a(), f.a());
        assert_eq!(r.family.b(), f.b());
        assert_eq!(r.words, (0..6).map(|i| vec![i]).collect::<Vec<_>>());
    }
}
