//! The perturbation engine: eigenvalues of sub-collections of components, the
//! T₀/T₁ split, the mV matrix representation, δ classifiers and Gibbs limits.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::perron::{perron_data, spectral_radius, tail_decades};
use crate::real::Real;
use crate::sft::{check_conditions, scc_decompose, ComponentDecomposition};
use crate::thermo::{entropy, gibbs_measure};
use crate::weights::PerturbationFamily;

/// Log-weights closer than this count as equal when sorting components into T₀.
pub const T0_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ComponentClassification<T: Real> {
    pub decomposition: ComponentDecomposition,
    /// Components (block ids) with a nonempty subshift.
    pub t: Vec<usize>,
    /// λ(M) of the unperturbed weights per block, 0 for empty blocks.
    pub lambda: Vec<T>,
    pub lambda_max: T,
    pub t0: Vec<usize>,
    pub t1: Vec<usize>,
}

impl<T: Real> ComponentClassification<T> {
    /// False when B has no cycle, the branch where the pressure tends to −∞.
    pub fn sigma3(&self) -> bool {
        !self.t.is_empty()
    }

    pub fn states(&self, comps: &[usize]) -> Vec<usize> {
        let mut s: Vec<usize> =
            comps.iter().flat_map(|&c| self.decomposition.blocks[c].states.iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// The collection `comps` ∪ T₁.
    pub fn with_t1(&self, comps: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = comps.iter().chain(self.t1.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn label(&self, c: usize) -> String {
        (c + 1).to_string()
    }
}

/// Split the components of B by their unperturbed Perron roots.
pub fn classify_components<T: Real>(f: &PerturbationFamily) -> Result<ComponentClassification<T>> {
    let decomposition = scc_decompose(f.b());
    let lim = f.limit_matrix::<T>()?;
    let mut lambda = Vec::with_capacity(decomposition.blocks.len());
    let mut t = Vec::new();
    for (k, c) in decomposition.blocks.iter().enumerate() {
        if c.nonempty_subshift {
            t.push(k);
            lambda.push(spectral_radius(&lim.principal(&c.states))?);
        } else {
            lambda.push(T::zero());
        }
    }
    let lambda_max = t.iter().map(|&k| lambda[k].clone()).fold(T::zero(), T::max_of);
    let (mut t0, mut t1) = (Vec::new(), Vec::new());
    if !t.is_empty() {
        let lmax = lambda_max.clone().ln();
        for &k in &t {
            if (lambda[k].clone().ln() - &lmax).abs().to_f64() <= T0_TOL {
                t0.push(k);
            } else {
                t1.push(k);
            }
        }
    }
    Ok(ComponentClassification { decomposition, t, lambda, lambda_max, t0, t1 })
}

/// The weighted matrix at one ε with memoized sub-collection eigenvalues.
pub struct Snapshot<'a, T: Real> {
    pub family: &'a PerturbationFamily,
    pub cls: &'a ComponentClassification<T>,
    pub eps: T,
    pub w: Mat<T>,
    cache: RefCell<HashMap<Vec<usize>, T>>,
}

impl<'a, T: Real> Snapshot<'a, T> {
    pub fn new(family: &'a PerturbationFamily, cls: &'a ComponentClassification<T>, eps: T) -> Result<Self> {
        let w = family.weighted_matrix(&eps, None)?;
        Ok(Snapshot { family, cls, eps, w, cache: RefCell::new(HashMap::new()) })
    }

    /// λ(𝐌, ε) for a collection of block ids; 0 for an empty subshift.
    pub fn lambda_sub(&self, comps: &[usize]) -> Result<T> {
        let mut key = comps.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let states = self.cls.states(&key);
        let v = if states.is_empty() { T::zero() } else { spectral_radius(&self.w.principal(&states))? };
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// λ(J ∪ T₁, ε).
    pub fn lambda_t1(&self, comps: &[usize]) -> Result<T> {
        self.lambda_sub(&self.cls.with_t1(comps))
    }

    pub fn lambda_full(&self) -> Result<T> {
        let key = vec![usize::MAX];
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = spectral_radius(&self.w)?;
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

pub fn lambda_sub<T: Real>(f: &PerturbationFamily, comps: &[usize], eps: &T) -> Result<T> {
    let cls = classify_components::<T>(f)?;
    if let Some(&bad) = comps.iter().find(|&&c| c >= cls.decomposition.blocks.len()) {
        return Err(Error::Domain(format!("no component {}", bad + 1)));
    }
    Snapshot::new(f, &cls, eps.clone())?.lambda_sub(comps)
}

pub fn lambda_full<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<T> {
    spectral_radius(&f.weighted_matrix(eps, None)?)
}

/// max e^{Φ(ε,ij)} over A-edges from S_M to S_M'; 0 when there is none.
pub fn coupling_scale<T: Real>(f: &PerturbationFamily, eps: &T, m: usize, m2: usize) -> Result<T> {
    let dec = scc_decompose(f.b());
    let (Some(a), Some(b)) = (dec.blocks.get(m), dec.blocks.get(m2)) else {
        return Err(Error::Domain("component index out of range".into()));
    };
    let mut best = T::zero();
    for &i in &a.states {
        for &j in &b.states {
            if f.a().get(i, j) {
                best = T::max_of(best, f.potential(i, j, eps)?.exp());
            }
        }
    }
    Ok(best)
}

/// The #T₀×#T₀ matrix whose Perron root is λ(ε).
#[derive(Clone, Debug)]
pub struct MvMatrix<T: Real> {
    pub t0: Vec<usize>,
    pub m: Mat<T>,
    pub lambda_full: T,
    pub perron_root: T,
    /// Eigendata of some 𝐌_M was degenerate or tied.
    pub flagged: bool,
}

pub fn mv_matrix<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<MvMatrix<T>> {
    let cls = classify_components::<T>(f)?;
    let snap = Snapshot::new(f, &cls, eps.clone())?;
    mv_from_snapshot(&snap)
}

pub fn mv_from_snapshot<T: Real>(snap: &Snapshot<'_, T>) -> Result<MvMatrix<T>> {
    let cls = snap.cls;
    let m0 = cls.t0.len();
    if m0 < 2 {
        return Err(Error::Unsupported(format!("the mV matrix needs at least two maximal components, found {m0}")));
    }
    let w = &snap.w;
    let full = perron_data(w)?;
    let nu = &full.b;
    let mut flagged = !full.ties.is_empty();
    // h(𝐌_M, ε, ·) on the states of 𝐌_M, zero elsewhere
    let mut hs = Vec::with_capacity(m0);
    let mut diag = Vec::with_capacity(m0);
    for &mk in &cls.t0 {
        let coll = cls.with_t1(&[mk]);
        let states = cls.states(&coll);
        let pd = perron_data(&w.principal(&states))?;
        flagged |= pd.degenerate || !pd.ties.is_empty();
        let mut h = vec![T::zero(); w.rows()];
        for (k, &s) in states.iter().enumerate() {
            h[s] = pd.c[k].clone();
        }
        hs.push((states, h));
        diag.push(snap.lambda_sub(&coll)?);
    }
    let mut m = Mat::zeros(m0, m0);
    for a in 0..m0 {
        for b in 0..m0 {
            if a == b {
                m[(a, a)] = diag[a].clone();
                continue;
            }
            let (sa, ha) = &hs[a];
            let target = &cls.decomposition.blocks[cls.t0[b]].states;
            let mut num = T::zero();
            for &j in target {
                let mut inner = T::zero();
                for &i in sa {
                    if !w[(i, j)].is_zero() {
                        inner += w[(i, j)].clone() * &ha[i];
                    }
                }
                num += inner * &nu[j];
            }
            let (sb, hb) = &hs[b];
            let mut den = T::zero();
            for &j in sb {
                den += nu[j].clone() * &hb[j];
            }
            if den.is_zero() {
                return Err(Error::Numeric("vanishing pairing in the mV matrix".into()));
            }
            m[(a, b)] = num / den;
        }
    }
    let perron_root = spectral_radius(&m)?;
    Ok(MvMatrix { t0: cls.t0.clone(), m, lambda_full: full.eta, perron_root, flagged })
}

/// δ values at one ε.
#[derive(Clone, Debug)]
pub struct DeltaPoint<T: Real> {
    pub eps: T,
    pub lambda: T,
    /// λ(J ∪ T₁, ε) for the collections J ⊆ T₀ the formula uses.
    pub subs: Vec<(Vec<usize>, T)>,
    pub delta0: Vec<T>,
    pub delta: Vec<T>,
    pub denominator: T,
    pub degenerate: bool,
}

fn finish<T: Real>(
    snap: &Snapshot<'_, T>,
    lambda: T,
    subs: Vec<(Vec<usize>, T)>,
    delta0: Vec<T>,
    order: i32,
) -> DeltaPoint<T> {
    let denominator = delta0.iter().cloned().fold(T::zero(), |a, b| a + b);
    let floor = T::from_f64(1e3 * T::unit_roundoff()) * lambda.clone().powi(order);
    let floor = T::max_of(floor, T::from_f64(1e-300));
    let degenerate = denominator.clone().abs() <= floor;
    let delta = if degenerate {
        vec![T::zero(); delta0.len()]
    } else {
        delta0.iter().map(|d| d.clone() / &denominator).collect()
    };
    DeltaPoint { eps: snap.eps.clone(), lambda, subs, delta0, delta, denominator, degenerate }
}

fn need_t0<T: Real>(cls: &ComponentClassification<T>, n: usize) -> Result<()> {
    if cls.t0.len() != n {
        return Err(Error::Unsupported(format!(
            "this classifier needs {n} maximal components, the model has {}",
            cls.t0.len()
        )));
    }
    Ok(())
}

/// δ_ε(k) = (λ(ε) − λ(𝐌(k′),ε)) / Σ_l (λ(ε) − λ(𝐌(l),ε)) for #T₀ = 2.
pub fn delta2_at<T: Real>(snap: &Snapshot<'_, T>) -> Result<DeltaPoint<T>> {
    need_t0(snap.cls, 2)?;
    let t0 = &snap.cls.t0;
    let lam = snap.lambda_full()?;
    let l: Vec<T> = t0.iter().map(|&m| snap.lambda_t1(&[m])).collect::<Result<_>>()?;
    let delta0 = vec![lam.clone() - &l[1], lam.clone() - &l[0]];
    let subs = vec![(vec![t0[0]], l[0].clone()), (vec![t0[1]], l[1].clone())];
    Ok(finish(snap, lam, subs, delta0, 1))
}

/// The three-component δ of products of eigenvalue differences.
pub fn delta3_at<T: Real>(snap: &Snapshot<'_, T>) -> Result<DeltaPoint<T>> {
    need_t0(snap.cls, 3)?;
    let t0 = &snap.cls.t0;
    let lam = snap.lambda_full()?;
    let mut subs = Vec::new();
    let mut delta0 = Vec::new();
    for k in 0..3 {
        let (a, b) = (t0[(k + 1) % 3], t0[(k + 2) % 3]);
        let lab = snap.lambda_t1(&[a, b])?;
        let la = snap.lambda_t1(&[a])?;
        let lb = snap.lambda_t1(&[b])?;
        delta0.push((lam.clone() - &lab) * (lam.clone() + &lab - &la - &lb));
        subs.push((vec![a.min(b), a.max(b)], lab));
    }
    for &m in t0.iter() {
        subs.push((vec![m], snap.lambda_t1(&[m])?));
    }
    Ok(finish(snap, lam, subs, delta0, 2))
}

/// Candidate weights for #T₀ = 4 with the eigenvalue-difference diagnostics.
#[derive(Clone, Debug)]
pub struct Delta4<T: Real> {
    pub point: DeltaPoint<T>,
    /// (J, J′, (λ(J)−λ(J′))/(λᵛ(J)−λᵛ(J′))) for J′ ⊊ J ⊆ T₀, |J′| ≥ 1.
    pub ratios: Vec<(Vec<usize>, Vec<usize>, T)>,
    pub mv: MvMatrix<T>,
    pub warning: &'static str,
}

pub const DELTA4_WARNING: &str =
    "candidate weights only: for four maximal components the eigenvalue differences of the model and of the mV matrix need not be comparable, so these weights are not a convergence criterion";

pub fn delta4_at<T: Real>(snap: &Snapshot<'_, T>) -> Result<Delta4<T>> {
    need_t0(snap.cls, 4)?;
    let t0 = snap.cls.t0.clone();
    let lam = snap.lambda_full()?;
    let l = |js: &[usize]| snap.lambda_t1(js);
    let mut delta0 = Vec::new();
    for k in 0..4 {
        let (i2, i3, i4) = (t0[(k + 1) % 4], t0[(k + 2) % 4], t0[(k + 3) % 4]);
        let l234 = l(&[i2, i3, i4])?;
        let l34 = l(&[i3, i4])?;
        let l24 = l(&[i2, i4])?;
        let l23 = l(&[i2, i3])?;
        let (l2, l3, l4) = (l(&[i2])?, l(&[i3])?, l(&[i4])?);
        let inner = (lam.clone() - &l34) * (lam.clone() - &l3 + &l34 - &l4)
            + (l234.clone() - &l24) * (lam.clone() - &l4)
            + (lam.clone() - &l24) * (l24.clone() - &l2)
            + (l234.clone() - &l23) * (l234.clone() - &l2 + &l23 - &l3);
        delta0.push((lam.clone() - &l234) * inner);
    }
    let mv = mv_from_snapshot(snap)?;
    let mut lv_cache: HashMap<Vec<usize>, T> = HashMap::new();
    let mut lam_v = |js: &[usize]| -> Result<T> {
        if let Some(v) = lv_cache.get(js) {
            return Ok(v.clone());
        }
        let pos: Vec<usize> = js.iter().map(|j| t0.iter().position(|x| x == j).unwrap()).collect();
        let v = spectral_radius(&mv.m.principal(&pos))?;
        lv_cache.insert(js.to_vec(), v.clone());
        Ok(v)
    };
    let mut ratios = Vec::new();
    let mut subs = Vec::new();
    for mask in 1u32..16 {
        let j: Vec<usize> = (0..4).filter(|b| mask >> b & 1 == 1).map(|b| t0[b]).collect();
        subs.push((j.clone(), l(&j)?));
        if j.len() < 2 {
            continue;
        }
        for sub in 1u32..16 {
            if sub & !mask != 0 || sub == mask {
                continue;
            }
            let jp: Vec<usize> = (0..4).filter(|b| sub >> b & 1 == 1).map(|b| t0[b]).collect();
            let num = l(&j)? - l(&jp)?;
            let den = lam_v(&j)? - lam_v(&jp)?;
            ratios.push((j.clone(), jp, num / den));
        }
    }
    Ok(Delta4 { point: finish(snap, lam, subs, delta0, 3), ratios, mv, warning: DELTA4_WARNING })
}

pub fn delta2<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<DeltaPoint<T>> {
    let cls = classify_components::<T>(f)?;
    delta2_at(&Snapshot::new(f, &cls, eps.clone())?)
}

pub fn delta3<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<DeltaPoint<T>> {
    let cls = classify_components::<T>(f)?;
    delta3_at(&Snapshot::new(f, &cls, eps.clone())?)
}

pub fn delta4<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<Delta4<T>> {
    let cls = classify_components::<T>(f)?;
    delta4_at(&Snapshot::new(f, &cls, eps.clone())?)
}

/// c₁ = (λ−λ(𝐌(1)))/(λ−λ(𝐌(2))) and c₂ = |Δ|Δ/(mV₁₂mV₂₁) with
/// Δ = λ(𝐌(1)) − λ(𝐌(2)).
#[derive(Clone, Debug)]
pub struct C1C2<T: Real> {
    pub c1: T,
    pub c2: T,
    /// |(|1−c₁|(1−c₁)/c₁ − c₂)| relative to max(1,|c₂|).
    pub relation_residual: f64,
    pub decoupled: bool,
}

pub fn c1_c2<T: Real>(f: &PerturbationFamily, eps: &T) -> Result<C1C2<T>> {
    let cls = classify_components::<T>(f)?;
    c1_c2_at(&Snapshot::new(f, &cls, eps.clone())?)
}

pub fn c1_c2_at<T: Real>(snap: &Snapshot<'_, T>) -> Result<C1C2<T>> {
    need_t0(snap.cls, 2)?;
    let t0 = &snap.cls.t0;
    let lam = snap.lambda_full()?;
    let l1 = snap.lambda_t1(&[t0[0]])?;
    let l2 = snap.lambda_t1(&[t0[1]])?;
    let mv = mv_from_snapshot(snap)?;
    let prod = mv.m[(0, 1)].clone() * &mv.m[(1, 0)];
    if prod.is_zero() {
        return Err(Error::Condition("the two maximal components are decoupled (mV off-diagonal product is 0)".into()));
    }
    let c1 = (lam.clone() - &l1) / (lam - &l2);
    let delta = l1 - l2;
    let c2 = delta.clone().abs() * delta / prod;
    let one_minus = T::one() - &c1;
    let lhs = one_minus.clone().abs() * one_minus / &c1;
    let relation_residual = ((lhs - &c2).abs() / T::max_of(T::one(), c2.clone().abs())).to_f64();
    Ok(C1C2 { c1, c2, relation_residual, decoupled: false })
}

/// Limit weights on (M₁, M₂) for a limit value of c₂; ±∞ allowed.
pub fn limit_from_c2(c2: f64) -> (f64, f64) {
    if c2.is_infinite() {
        return if c2 > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let a = c2.abs();
    let r = c2.signum() * (a / (a + 4.0)).sqrt();
    let r = if c2 == 0.0 { 0.0 } else { r };
    ((1.0 + r) / 2.0, (1.0 - r) / 2.0)
}

/// Decreasing geometric grid from `hi` to `lo` with `per_decade` points per decade.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && per_decade >= 1) {
        return Err(Error::Domain("grid needs 0 < lo ≤ hi and at least one point per decade".into()));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    Ok((0..=steps)
        .map(|k| {
            let e = hi.log10() - k as f64 / per_decade as f64;
            10f64.powf(e)
        })
        .collect())
}

pub const DEFAULT_GRID: (f64, f64, usize) = (1e-9, 1e-1, 4);

/// ε_n = 1/(2πn + sign·π/2) with n = round(1/(2πε)) for each grid point, so
/// sin(1/ε_n) = sign exactly.
pub fn sin_sequence<T: Real>(grid: &[f64], sign: i32) -> Vec<T> {
    let two_pi = T::pi() * T::from_f64(2.0);
    let half_pi = T::pi() / T::from_f64(2.0);
    grid.iter()
        .map(|&g| {
            let n = (1.0 / (2.0 * std::f64::consts::PI * g)).round().max(1.0);
            let x = two_pi.clone() * T::from_f64(n) + half_pi.clone() * T::from_f64(sign as f64);
            T::one() / x
        })
        .collect()
}

/// Numeric convergence verdict: over the last three decades of the grid the
/// total variation stays below 1e-3 and the decade-to-decade increments at
/// least halve.
pub fn converges(grid: &[f64], values: &[f64]) -> bool {
    let tail: Vec<usize> = tail_decades(grid, 3).collect();
    if tail.len() < 2 || values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let tv: f64 = tail.windows(2).map(|w| (values[w[1]] - values[w[0]]).abs()).sum();
    if tv >= 1e-3 {
        return false;
    }
    let min = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let at = |d: i32| {
        let target = (min * 10f64.powi(d)).log10();
        let k = (0..grid.len())
            .min_by(|&a, &b| (grid[a].log10() - target).abs().total_cmp(&(grid[b].log10() - target).abs()))
            .unwrap();
        values[k]
    };
    let inc: Vec<f64> = (0..3).map(|d| (at(d) - at(d + 1)).abs()).collect();
    // inc[0] is the finest decade
    (0..2).all(|d| inc[d] <= inc[d + 1] / 2.0 || inc[d] <= 1e-9)
}

/// Marginals and entropy along one sequence of ε values.
#[derive(Clone, Debug)]
pub struct Trace {
    pub name: String,
    pub eps: Vec<f64>,
    pub log_lambda: Vec<f64>,
    /// Per point, per component of T: μ(ε, Σ_M).
    pub marginals: Vec<Vec<f64>>,
    pub entropy: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub t: Vec<usize>,
    pub t0: Vec<usize>,
    /// B has no cycle and the pressure tends to −∞.
    pub pressure_to_minus_infinity: bool,
    pub limit_pressure: f64,
    /// |log λ(ε) − log λ(B,φ)| along the grid.
    pub pressure_gap: Vec<f64>,
    pub pressure_converges: bool,
    pub grid: Trace,
    pub sequences: Vec<Trace>,
    /// Marginal limits (final grid values) per M ∈ T₀.
    pub weights: Vec<f64>,
    /// [min, max] of the final marginals across grid and sequences per M ∈ T₀.
    pub accumulation: Vec<(f64, f64)>,
    pub converged: bool,
    /// h(σ_M, μ(M,·)) per M ∈ T₀.
    pub component_entropy: Vec<f64>,
    pub entropy_limit: f64,
}

/// Largest spread of final marginals between the grid and the special
/// sequences still counted as one limit.
pub const SEQUENCE_SPREAD: f64 = 1e-2;

pub fn trace<T: Real>(
    f: &PerturbationFamily,
    cls: &ComponentClassification<T>,
    name: &str,
    eps: &[T],
) -> Result<Trace> {
    let mut tr = Trace { name: name.into(), eps: vec![], log_lambda: vec![], marginals: vec![], entropy: vec![] };
    for e in eps {
        let w = f.weighted_matrix(e, None)?;
        let mu = gibbs_measure(&w)?;
        tr.eps.push(e.to_f64());
        tr.log_lambda.push(mu.lambda.clone().ln().to_f64());
        tr.marginals.push(
            cls.t
                .iter()
                .map(|&m| {
                    let s = cls.decomposition.blocks[m].states.iter().fold(T::zero(), |a, &i| a + &mu.pi[i]);
                    s.to_f64()
                })
                .collect(),
        );
        tr.entropy.push(entropy(&mu).to_f64());
    }
    Ok(tr)
}

/// Gibbs measures of the full weighted matrix along the grid and the special
/// sequences, with the limit measure and entropy limit assembled from T₀.
pub fn gibbs_limit_analysis<T: Real>(
    f: &PerturbationFamily,
    grid: &[f64],
    sequences: &[(String, Vec<T>)],
) -> Result<ConvergenceReport> {
    let cls = classify_components::<T>(f)?;
    if !check_conditions(f.a(), f.b())?.sigma1 {
        return Err(Error::Condition("A is reducible, the Gibbs measure is not unique".into()));
    }
    let eps: Vec<T> = grid.iter().map(|&g| T::from_f64(g)).collect();
    let gt = trace(f, &cls, "grid", &eps)?;
    let seqs: Vec<Trace> = sequences.iter().map(|(n, e)| trace(f, &cls, n, e)).collect::<Result<_>>()?;
    let last = grid.len() - 1;
    if !cls.sigma3() {
        let pressure_gap = gt.log_lambda.clone();
        return Ok(ConvergenceReport {
            t: vec![],
            t0: vec![],
            pressure_to_minus_infinity: true,
            limit_pressure: f64::NEG_INFINITY,
            pressure_converges: false,
            pressure_gap,
            grid: gt,
            sequences: seqs,
            weights: vec![],
            accumulation: vec![],
            converged: false,
            component_entropy: vec![],
            entropy_limit: f64::NAN,
        });
    }
    let limit_pressure = cls.lambda_max.clone().ln().to_f64();
    let pressure_gap: Vec<f64> = gt.log_lambda.iter().map(|l| (l - limit_pressure).abs()).collect();
    let pressure_converges = pressure_gap.windows(2).all(|w| w[1] <= w[0] + 1e-12) && pressure_gap[last] <= 1e-3;
    let lim = f.limit_matrix::<T>()?;
    let mut weights = Vec::new();
    let mut accumulation = Vec::new();
    let mut component_entropy = Vec::new();
    let mut converged = true;
    for &m in &cls.t0 {
        let pos = cls.t.iter().position(|&x| x == m).unwrap();
        let series: Vec<f64> = gt.marginals.iter().map(|r| r[pos]).collect();
        converged &= converges(grid, &series);
        let mut lo = series[last];
        let mut hi = series[last];
        for s in &seqs {
            if let Some(r) = s.marginals.last() {
                lo = lo.min(r[pos]);
                hi = hi.max(r[pos]);
            }
        }
        converged &= hi - lo <= SEQUENCE_SPREAD;
        weights.push(series[last]);
        accumulation.push((lo, hi));
        let states = &cls.decomposition.blocks[m].states;
        let mu = gibbs_measure(&lim.principal(states))?;
        component_entropy.push(entropy(&mu).to_f64());
    }
    let entropy_limit = weights.iter().zip(&component_entropy).map(|(w, h)| w * h).sum();
    Ok(ConvergenceReport {
        t: cls.t.clone(),
        t0: cls.t0.clone(),
        pressure_to_minus_infinity: false,
        limit_pressure,
        pressure_gap,
        pressure_converges,
        grid: gt,
        sequences: seqs,
        weights,
        accumulation,
        converged,
        component_entropy,
        entropy_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp;
    use crate::weights::tests::family_5_2;

    #[test]
    fn three_component_classification() {
        let f = family_5_2("1");
        let cls = classify_components::<f64>(&f).unwrap();
        assert_eq!(cls.t0, vec![0, 1, 2]);
        assert!(cls.t1.is_empty());
        assert!((cls.lambda_max - 2.0).abs() < 1e-15);
    }

    #[test]
    fn three_component_sub_eigenvalues() {
        let f = family_5_2("1");
        let e = Mp::parse_decimal("1e-4").unwrap();
        let l23 = lambda_sub(&f, &[1, 2], &e).unwrap().to_f64();
        assert!((l23 - 2.0002).abs() < 1e-12, "{l23}");
        assert_eq!(lambda_sub(&f, &[0, 1], &e).unwrap().to_f64(), 2.0);
        let t = coupling_scale(&f, &e, 0, 1).unwrap().to_f64();
        assert!((t - 1e-4).abs() < 1e-18);
        assert_eq!(coupling_scale(&f, &e, 1, 0).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn three_component_delta_shapes() {
        let f = family_5_2("1");
        let e = Mp::parse_decimal("1e-3").unwrap();
        let d = delta3(&f, &e).unwrap();
        let two = Mp::from_f64(2.0);
        let x = (d.lambda.clone() - &two).powi(2);
        let e2 = e.clone().powi(2);
        let want1 = x.clone() - e2 * Mp::from_f64(4.0);
        assert!(((d.delta0[0].clone() - want1) / &x).abs().to_f64() < 1e-60);
        assert!(((d.delta0[1].clone() - &x) / &x).abs().to_f64() < 1e-60);
        let s: f64 = d.delta.iter().map(|v| v.to_f64()).sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mv_root_is_lambda() {
        let f = family_5_2("1.5");
        let e = Mp::parse_decimal("1e-3").unwrap();
        let mv = mv_matrix(&f, &e).unwrap();
        let gap = (mv.perron_root.clone() - &mv.lambda_full).abs().to_f64();
        assert!(gap < 1e-60, "{gap:e}");
    }

    #[test]
    fn c2_limits() {
        assert_eq!(limit_from_c2(0.0), (0.5, 0.5));
        assert_eq!(limit_from_c2(f64::INFINITY), (1.0, 0.0));
        assert_eq!(limit_from_c2(f64::NEG_INFINITY), (0.0, 1.0));
        let (a, b) = limit_from_c2(12.0);
        let r = 3f64.sqrt() / 2.0;
        assert!((a - (1.0 + r) / 2.0).abs() < 1e-15 && (b - (1.0 - r) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn grids_and_sequences() {
        let g = geometric_grid(1e-9, 1e-1, 4).unwrap();
        assert_eq!(g.len(), 33);
        assert!((g[32] - 1e-9).abs() < 1e-22);
        let s: Vec<Mp> = sin_sequence(&[1e-3], -1);
        assert!((s[0].clone().powi(-1).sin().to_f64() + 1.0).abs() < 1e-60);
    }

    #[test]
    fn policy_examples() {
        let g = geometric_grid(1e-8, 1e-1, 2).unwrap();
        let conv: Vec<f64> = g.iter().map(|e| 0.5 + 10.0 * e).collect();
        assert!(converges(&g, &conv));
        let osc: Vec<f64> = g.iter().map(|e| 0.5 + 0.1 * (1.0 / e).sin()).collect();
        assert!(!converges(&g, &osc));
    }
}
