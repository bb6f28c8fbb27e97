//! Pressure, Gibbs measures, entropy and the variational principle for
//! 2-block potentials, all through the weighted matrix W(ij) = A(ij)e^{Φ(ij)}.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::perron::{perron_irreducible, spectral_radius, support_classes};
use crate::real::Real;
use crate::sft::TransitionMatrix;

/// log of the spectral radius; −∞ when the radius is 0.
pub fn pressure<T: Real>(w: &Mat<T>) -> Result<T> {
    let r = spectral_radius(w)?;
    Ok(if r.is_zero() { T::neg_infinity() } else { r.ln() })
}

/// (1/n) log Σ_{w ∈ W_n(M)} exp(sup over the cylinder of S_n φ). For a 2-block
/// potential the sup only involves the symbol after the word. −∞ when no word
/// of length n exists.
pub fn pressure_by_words(m: &TransitionMatrix, phi: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    let d = m.dim();
    assert!(n >= 1, "word length must be positive");
    // v(i): scaled sum over words ending in i of exp of the pair sums so far
    let mut v = vec![1.0; d];
    let mut log_scale = 0.0;
    for _ in 1..n {
        let mut next = vec![0.0; d];
        for (i, j) in m.edges() {
            next[j] += v[i] * phi(i, j).exp();
        }
        let s: f64 = next.iter().sum();
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        log_scale += s.ln();
        v = next.into_iter().map(|x| x / s).collect();
    }
    let mut total = 0.0;
    for (i, vi) in v.iter().enumerate() {
        let best = m.successors(i).map(|j| phi(i, j)).fold(f64::NEG_INFINITY, f64::max);
        if best > f64::NEG_INFINITY {
            total += vi * best.exp();
        }
    }
    if total == 0.0 {
        return f64::NEG_INFINITY;
    }
    (log_scale + total.ln()) / n as f64
}

/// The Markov measure built from the Perron triplet (λ, h, ν) of W.
#[derive(Clone, Debug)]
pub struct MarkovGibbsMeasure<T: Real> {
    pub states: Vec<usize>,
    pub lambda: T,
    /// π(i) = h(i)ν(i), zero off `states`.
    pub pi: Vec<T>,
    /// P(i→j) = W(ij)ν(j)/(λν(i)).
    pub kernel: Mat<T>,
    /// Left eigenvector of W.
    pub h: Vec<T>,
    /// Right eigenvector of W, Σν = 1.
    pub nu: Vec<T>,
}

/// States touched by a nonzero entry.
pub fn active_states<T: Real>(w: &Mat<T>) -> Vec<usize> {
    (0..w.rows()).filter(|&i| (0..w.cols()).any(|j| !w[(i, j)].is_zero() || !w[(j, i)].is_zero())).collect()
}

fn label(states: &[usize]) -> String {
    let v: Vec<String> = states.iter().map(|s| (s + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// The Gibbs measure of the potential log W on the subshift of its support.
pub fn gibbs_measure<T: Real>(w: &Mat<T>) -> Result<MarkovGibbsMeasure<T>> {
    let d = w.rows();
    let states = active_states(w);
    if states.is_empty() {
        return Err(Error::Reducible("the weighted matrix is zero".into()));
    }
    let sub = w.principal(&states);
    let classes = support_classes(&sub);
    if classes.len() > 1 || (states.len() == 1 && sub[(0, 0)].is_zero()) {
        let parts: Vec<String> =
            classes.iter().map(|c| label(&c.iter().map(|&k| states[k]).collect::<Vec<_>>())).collect();
        return Err(Error::Reducible(format!(
            "support splits into classes {}; restrict to one class",
            parts.join(" ")
        )));
    }
    let (lambda, nu_s) = perron_irreducible(&sub)?;
    let (_, h_s) = perron_irreducible(&sub.transpose())?;
    let mut nu = vec![T::zero(); d];
    let mut h = vec![T::zero(); d];
    let mut hn = T::zero();
    for (k, &s) in states.iter().enumerate() {
        nu[s] = nu_s[k].clone();
        h[s] = h_s[k].clone();
        hn += h_s[k].clone() * &nu_s[k];
    }
    for x in h.iter_mut() {
        *x /= &hn;
    }
    let pi: Vec<T> = (0..d).map(|i| h[i].clone() * &nu[i]).collect();
    let mut kernel = Mat::zeros(d, d);
    for &i in &states {
        let den = lambda.clone() * &nu[i];
        for &j in &states {
            if !w[(i, j)].is_zero() {
                kernel[(i, j)] = w[(i, j)].clone() * &nu[j] / &den;
            }
        }
    }
    Ok(MarkovGibbsMeasure { states, lambda, pi, kernel, h, nu })
}

/// π(w₀)∏P(wₖ→wₖ₊₁); 0 for words leaving the support.
pub fn cylinder_measure<T: Real>(mu: &MarkovGibbsMeasure<T>, w: &[usize]) -> T {
    let Some(&first) = w.first() else {
        return T::one();
    };
    if first >= mu.pi.len() {
        return T::zero();
    }
    let mut m = mu.pi[first].clone();
    for e in w.windows(2) {
        if e[1] >= mu.pi.len() {
            return T::zero();
        }
        m *= &mu.kernel[(e[0], e[1])];
    }
    m
}

/// Largest Gibbs ratio (or reciprocal) over cylinders of each length.
#[derive(Clone, Debug)]
pub struct GibbsConstant {
    /// Entry n−1 is the constant over all cylinders of length exactly n.
    pub per_length: Vec<f64>,
    /// Maximum over all lengths.
    pub c: f64,
}

/// Compare μ([w]) with exp(−nP + sup S_nΦ) over every admissible word of
/// length ≤ `n_max`, with Φ = log W.
pub fn gibbs_constant_check<T: Real>(mu: &MarkovGibbsMeasure<T>, w: &Mat<T>, n_max: usize) -> Result<GibbsConstant> {
    if n_max == 0 || n_max > 10 {
        return Err(Error::Domain("gibbs_constant_check needs 1 ≤ n_max ≤ 10".into()));
    }
    let d = w.rows();
    let phi: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d).map(|j| if w[(i, j)].is_zero() { f64::NEG_INFINITY } else { w[(i, j)].to_f64().ln() }).collect()
        })
        .collect();
    let logp: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| mu.kernel[(i, j)].to_f64().ln()).collect()).collect();
    let sup_next: Vec<f64> = (0..d).map(|i| phi[i].iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
    let p = mu.lambda.to_f64().ln();
    let mut per_length = vec![0.0f64; n_max];
    struct Walk<'a> {
        phi: &'a [Vec<f64>],
        logp: &'a [Vec<f64>],
        sup_next: &'a [f64],
        p: f64,
        states: &'a [usize],
    }
    // log μ − (−nP + pair sum so far), extended one symbol at a time
    fn dfs(last: usize, len: usize, acc: f64, w: &Walk<'_>, out: &mut [f64]) {
        let r = acc - w.sup_next[last];
        out[len - 1] = out[len - 1].max(r.abs());
        if len == out.len() {
            return;
        }
        for &j in w.states {
            if w.phi[last][j] > f64::NEG_INFINITY {
                dfs(j, len + 1, acc + w.logp[last][j] + w.p - w.phi[last][j], w, out);
            }
        }
    }
    let walk = Walk { phi: &phi, logp: &logp, sup_next: &sup_next, p, states: &mu.states };
    for &i in &mu.states {
        dfs(i, 1, mu.pi[i].to_f64().ln() + p, &walk, &mut per_length);
    }
    let per_length: Vec<f64> = per_length.into_iter().map(f64::exp).collect();
    let c = per_length.iter().cloned().fold(1.0, f64::max);
    Ok(GibbsConstant { per_length, c })
}

/// −Σ π(i) Σ P(ij) log P(ij).
pub fn entropy<T: Real>(mu: &MarkovGibbsMeasure<T>) -> T {
    kernel_entropy(&mu.pi, &mu.kernel)
}

pub fn kernel_entropy<T: Real>(pi: &[T], kernel: &Mat<T>) -> T {
    let mut h = T::zero();
    for i in 0..pi.len() {
        if pi[i].is_zero() {
            continue;
        }
        for j in 0..kernel.cols() {
            let p = &kernel[(i, j)];
            if !p.is_zero() {
                h -= pi[i].clone() * p * p.clone().ln();
            }
        }
    }
    h
}

/// Σ_{ij} μ([ij]) log W(ij); −∞ if the measure charges a pair with W = 0.
pub fn integral_of_potential<T: Real>(pi: &[T], kernel: &Mat<T>, w: &Mat<T>) -> T {
    let mut s = T::zero();
    for i in 0..pi.len() {
        for j in 0..kernel.cols() {
            let m = pi[i].clone() * &kernel[(i, j)];
            if m.is_zero() {
                continue;
            }
            if w[(i, j)].is_zero() {
                return T::neg_infinity();
            }
            s += m * w[(i, j)].clone().ln();
        }
    }
    s
}

/// An invariant Markov measure offered to the variational principle.
#[derive(Clone, Debug)]
pub struct MarkovMeasure<T: Real> {
    pub pi: Vec<T>,
    pub kernel: Mat<T>,
}

#[derive(Clone, Debug)]
pub struct VariationalReport {
    pub pressure: f64,
    pub gibbs_value: f64,
    pub gibbs_equality: bool,
    /// h(m) + ∫Φ dm for each trial.
    pub trial_values: Vec<f64>,
    pub all_below: bool,
}

pub const VARIATIONAL_TOL: f64 = 1e-10;

/// Check h(m) + ∫Φ dm ≤ P for the trials and equality at the Gibbs measure.
pub fn variational_check<T: Real>(w: &Mat<T>, trials: &[MarkovMeasure<T>]) -> Result<VariationalReport> {
    let mu = gibbs_measure(w)?;
    let p = mu.lambda.clone().ln();
    let g = entropy(&mu) + integral_of_potential(&mu.pi, &mu.kernel, w);
    let pressure = p.to_f64();
    let gibbs_value = g.to_f64();
    let mut trial_values = Vec::with_capacity(trials.len());
    for (k, m) in trials.iter().enumerate() {
        let d = m.pi.len();
        let pp = m.kernel.vec_mul(&m.pi);
        let drift = (0..d).map(|i| (pp[i].clone() - &m.pi[i]).abs().to_f64()).fold(0.0, f64::max);
        let mass: f64 = m.pi.iter().map(|x| x.to_f64()).sum();
        if drift > 1e-10 || (mass - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("trial measure {} is not an invariant probability", k + 1)));
        }
        let v = kernel_entropy(&m.pi, &m.kernel) + integral_of_potential(&m.pi, &m.kernel, w);
        trial_values.push(v.to_f64());
    }
    let all_below = trial_values.iter().all(|&v| v <= pressure + VARIATIONAL_TOL);
    Ok(VariationalReport {
        pressure,
        gibbs_value,
        gibbs_equality: (gibbs_value - pressure).abs() <= VARIATIONAL_TOL,
        trial_values,
        all_below,
    })
}

/// Stationary distribution of an irreducible stochastic kernel.
pub fn stationary<T: Real>(kernel: &Mat<T>) -> Result<Vec<T>> {
    let (_, v) = perron_irreducible(&kernel.transpose())?;
    Ok(v)
}
