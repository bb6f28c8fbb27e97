//! Power-series expansions of component eigenvalues in ε and the resulting
//! classification of the limit of c₂(ε) for two maximal components.

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};
use crate::matrep::classify_components;
use crate::perron::perron_irreducible;
use crate::real::Real;
use crate::sft::TransitionMatrix;
use crate::weights::PerturbationFamily;

/// Highest supported expansion order.
pub const MAX_ORDER: usize = 3;

/// Coefficient tables of φ(ε) = φ + Σφ_jε^j and e^{ψ(ε)}χ_N = Σψ_jε^j.
#[derive(Clone, Debug)]
pub struct ExpansionInput<T: Real> {
    pub a: TransitionMatrix,
    pub b: TransitionMatrix,
    /// State lists of the two components.
    pub components: Vec<Vec<usize>>,
    /// phi[0] is the limit φ, phi[j] the order-j coefficient, on A-edges.
    pub phi: Vec<Mat<T>>,
    /// psi[0] is the indicator of A-edges outside N, psi[j] the order-j
    /// coefficient of e^ψ on N.
    pub psi: Vec<Mat<T>>,
}

impl<T: Real> ExpansionInput<T> {
    pub fn n1(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn n2(&self) -> usize {
        self.psi.len() - 1
    }

    /// Check the table shapes and the standing assumption that each component
    /// block of A equals the one of B.
    pub fn new(
        a: TransitionMatrix,
        b: TransitionMatrix,
        components: Vec<Vec<usize>>,
        phi: Vec<Mat<T>>,
        mut psi: Vec<Mat<T>>,
    ) -> Result<Self> {
        let d = a.dim();
        if phi.is_empty() || phi.len() > MAX_ORDER + 1 || psi.len() > MAX_ORDER + 1 {
            return Err(Error::Unsupported(format!("expansion orders are limited to {MAX_ORDER}")));
        }
        if phi.iter().chain(psi.iter()).any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Dimension("coefficient tables must match the alphabet".into()));
        }
        for c in &components {
            for &i in c {
                for &j in c {
                    if a.get(i, j) != b.get(i, j) {
                        return Err(Error::Condition(format!(
                            "A and B differ at ({},{}) inside a component; the expansion needs A = B on each component block",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        let ind = Mat::from_fn(d, d, |i, j| if a.get(i, j) && b.get(i, j) { T::one() } else { T::zero() });
        if psi.is_empty() {
            psi.push(ind);
        } else {
            psi[0] = ind;
        }
        Ok(ExpansionInput { a, b, components, phi, psi })
    }

    /// Tables from a family by fitting Taylor polynomials in high precision:
    /// the fit at step 1e-15 must agree with the one at step 1e-12.
    pub fn from_family(f: &PerturbationFamily, n1: usize, n2: usize) -> Result<Self> {
        if n1 > MAX_ORDER || n2 > MAX_ORDER {
            return Err(Error::Unsupported(format!("expansion orders are limited to {MAX_ORDER}")));
        }
        let cls = classify_components::<T>(f)?;
        if cls.t0.len() != 2 || !cls.t1.is_empty() {
            return Err(Error::Condition(format!(
                "the expansion needs exactly two components, both maximal (found {} maximal, {} others)",
                cls.t0.len(),
                cls.t1.len()
            )));
        }
        let components: Vec<Vec<usize>> = cls.t0.iter().map(|&m| cls.decomposition.blocks[m].states.clone()).collect();
        let d = f.dim();
        let mut phi = vec![Mat::zeros(d, d); n1 + 1];
        let mut psi = vec![Mat::zeros(d, d); n2 + 1];
        for (i, j) in f.a().edges() {
            let p0: T = f.phi_limit(i, j)?;
            let e = &f.phi().get(i, j).unwrap().expr;
            let c = taylor(|x: &T| e.eval(x, f.params()), p0.clone(), n1)
                .map_err(|m| Error::Domain(format!("phi({},{}): {m}", i + 1, j + 1)))?;
            phi[0][(i, j)] = p0;
            for k in 1..=n1 {
                phi[k][(i, j)] = c[k - 1].clone();
            }
            if f.n_set().get(i, j) {
                let ps = &f.psi().get(i, j).unwrap().expr;
                let c = taylor(|x: &T| Ok(ps.eval(x, f.params())?.exp()), T::zero(), n2)
                    .map_err(|m| Error::Domain(format!("exp(psi({},{})): {m}", i + 1, j + 1)))?;
                for k in 1..=n2 {
                    psi[k][(i, j)] = c[k - 1].clone();
                }
            }
        }
        Self::new(f.a().clone(), f.b().clone(), components, phi, psi)
    }
}

/// Coefficients c₁..c_n of g(ε) − g(0) by polynomial interpolation at steps
/// of h, checked against a second step size.
fn taylor<T: Real>(g: impl Fn(&T) -> Result<T>, g0: T, n: usize) -> std::result::Result<Vec<T>, String> {
    if n == 0 {
        return Ok(vec![]);
    }
    let fit = |h: f64| -> std::result::Result<Vec<T>, String> {
        let m = n + 2;
        let h = T::parse_decimal(&format!("{h:e}")).ok_or("bad step size")?;
        let mut v = Mat::zeros(m, m);
        let mut rhs = Vec::with_capacity(m);
        for k in 0..m {
            let x = h.clone() * T::from_f64((k + 1) as f64);
            for p in 0..m {
                v[(k, p)] = x.clone().powi(p as i32 + 1);
            }
            rhs.push(g(&x).map_err(|e| e.to_string())? - &g0);
        }
        let c = v.solve(&rhs).ok_or("singular interpolation system")?;
        Ok(c[..n].to_vec())
    };
    let a = fit(1e-15)?;
    let b = fit(1e-12)?;
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        let scale = T::max_of(T::one(), x.clone().abs());
        if ((x.clone() - y).abs() / scale).to_f64() > 1e-6 {
            return Err(format!("no order-{} Taylor coefficient at eps = 0", k + 1));
        }
    }
    Ok(a)
}

/// F_j = Σ over i₁+2i₂+⋯+j·i_j = j of φ₁^{i₁}⋯φ_j^{i_j}/(i₁!⋯i_j!), entrywise.
pub fn partition_factor<T: Real>(phi: &[Mat<T>], j: usize) -> Mat<T> {
    let d = phi[0].rows();
    if j == 0 {
        return Mat::from_fn(d, d, |_, _| T::one());
    }
    let mut out = Mat::zeros(d, d);
    let mut counts = vec![0usize; j + 1];
    fn rec<T: Real>(m: usize, left: usize, counts: &mut Vec<usize>, phi: &[Mat<T>], out: &mut Mat<T>) {
        if left == 0 {
            let d = out.rows();
            for r in 0..d {
                for c in 0..d {
                    let mut t = T::one();
                    for (p, &i) in counts.iter().enumerate().skip(1) {
                        if i > 0 {
                            let base = phi.get(p).map(|x| x[(r, c)].clone()).unwrap_or_else(T::zero);
                            let fact: f64 = (1..=i).map(|x| x as f64).product();
                            t *= base.powi(i as i32) / T::from_f64(fact);
                        }
                    }
                    out[(r, c)] += t;
                }
            }
            return;
        }
        if m == 0 {
            return;
        }
        for i in (0..=left / m).rev() {
            counts[m] = i;
            rec(m - 1, left - i * m, counts, phi, out);
        }
        counts[m] = 0;
    }
    rec(j, j, &mut counts, phi, &mut out);
    out
}

/// Eigenvalue series λ_{k,0..n} of one component with diagnostics of the
/// eigenprojection identities.
#[derive(Clone, Debug)]
pub struct SeriesCoefficients<T: Real> {
    pub lambda: Vec<T>,
    /// Left (h) and right (ν) Perron vectors of the unperturbed block, Σν = 1, ν·h = 1.
    pub h: Vec<T>,
    pub nu: Vec<T>,
    /// max |S(L − P − λI) − (I − P)|.
    pub resolvent_residual: f64,
    /// max |P² − P|.
    pub projection_residual: f64,
    /// max |PL − LP|.
    pub commutation_residual: f64,
}

/// Series of the Perron root of e^{φ(ε)} on component `k` up to order `n`.
pub fn lambda_series<T: Real>(x: &ExpansionInput<T>, k: usize, n: usize) -> Result<SeriesCoefficients<T>> {
    if n > MAX_ORDER {
        return Err(Error::Unsupported(format!("series order is limited to {MAX_ORDER}")));
    }
    let states = x.components.get(k).ok_or_else(|| Error::Domain(format!("no component {}", k + 1)))?;
    let q = states.len();
    let w0 = Mat::from_fn(q, q, |a, b| {
        let (i, j) = (states[a], states[b]);
        if x.b.get(i, j) {
            x.phi[0][(i, j)].clone().exp()
        } else {
            T::zero()
        }
    });
    let (lam, nu) = perron_irreducible(&w0)?;
    let (_, h) = perron_irreducible(&w0.transpose())?;
    let nh = dot(&nu, &h);
    let h: Vec<T> = h.into_iter().map(|v| v / &nh).collect();
    let l0 = w0.transpose();
    let p0 = Mat::from_fn(q, q, |a, b| h[a].clone() * &nu[b]);
    let id: Mat<T> = Mat::identity(q);
    let shifted = l0.sub(&p0).sub(&id.scale(&lam));
    let inv = shifted
        .inverse()
        .ok_or_else(|| Error::Numeric("the reduced resolvent is singular; the root is not simple".into()))?;
    let ip = id.sub(&p0);
    let s = inv.matmul(&ip);
    let resolvent_residual = s.matmul(&shifted).sub(&ip).max_abs().to_f64();
    let projection_residual = p0.matmul(&p0).sub(&p0).max_abs().to_f64();
    let commutation_residual = p0.matmul(&l0).sub(&l0.matmul(&p0)).max_abs().to_f64();
    let sub_phi: Vec<Mat<T>> = x.phi.iter().map(|m| m.principal(states)).collect();
    // L_j = (W₀ ∘ F_j)ᵀ
    let lj: Vec<Mat<T>> = (0..=n)
        .map(|j| {
            let f = partition_factor(&sub_phi, j);
            Mat::from_fn(q, q, |a, b| w0[(b, a)].clone() * &f[(b, a)])
        })
        .collect();
    let mut lambda = vec![lam];
    // mu[m] = ν P_m as a row vector
    let mut mu: Vec<Vec<T>> = vec![nu.clone()];
    for m in 1..=n {
        let mut l = T::zero();
        for j in 1..=m {
            l += dot(&lj[j].vec_mul(&mu[m - j]), &h);
        }
        lambda.push(l);
        let mut acc = vec![T::zero(); q];
        for i in 1..=m {
            let op = id.scale(&lambda[i]).sub(&lj[i]).matmul(&s);
            let row = op.vec_mul(&mu[m - i]);
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        mu.push(acc);
    }
    Ok(SeriesCoefficients { lambda, h, nu, resolvent_residual, projection_residual, commutation_residual })
}

/// The orders s, s(12), s(21) (None for ∞) and amounts d(12), d(21).
#[derive(Clone, Debug)]
pub struct ExpansionOrders<T: Real> {
    pub s: Option<usize>,
    pub s12: Option<usize>,
    pub s21: Option<usize>,
    pub d12: T,
    pub d21: T,
    pub series: [SeriesCoefficients<T>; 2],
    pub n1: usize,
    pub n2: usize,
}

pub fn expansion_orders<T: Real>(x: &ExpansionInput<T>, k: usize, k2: usize) -> Result<ExpansionOrders<T>> {
    if x.components.len() != 2 || k == k2 || k > 1 || k2 > 1 {
        return Err(Error::Domain("expansion orders compare the two components 1 and 2".into()));
    }
    let n1 = x.n1();
    let s1 = lambda_series(x, k, n1)?;
    let s2 = lambda_series(x, k2, n1)?;
    let s = (1..=n1).find(|&l| {
        let scale = T::max_of(T::one(), s1.lambda[l].clone().abs());
        ((s1.lambda[l].clone() - &s2.lambda[l]).abs() / scale).to_f64() > 1e-9
    });
    let cross = |from: usize, to: usize| -> Option<usize> {
        (0..=x.n2()).find(|&l| {
            x.components[from]
                .iter()
                .any(|&i| x.components[to].iter().any(|&j| x.a.get(i, j) && x.psi[l][(i, j)].to_f64().abs() > 1e-12))
        })
    };
    let amount = |from: usize, to: usize, sf: &SeriesCoefficients<T>, st: &SeriesCoefficients<T>, l: Option<usize>| {
        let Some(l) = l else {
            return T::zero();
        };
        let mut tot = T::zero();
        for (b, &j) in x.components[to].iter().enumerate() {
            let mut inner = T::zero();
            for (a, &i) in x.components[from].iter().enumerate() {
                if x.a.get(i, j) {
                    inner += x.phi[0][(i, j)].clone().exp() * &x.psi[l][(i, j)] * &sf.h[a];
                }
            }
            tot += inner * &st.nu[b];
        }
        tot
    };
    let (a, b) = (k, k2);
    let s12 = cross(a, b);
    let s21 = cross(b, a);
    let d12 = amount(a, b, &s1, &s2, s12);
    let d21 = amount(b, a, &s2, &s1, s21);
    Ok(ExpansionOrders { s, s12, s21, d12, d21, series: [s1, s2], n1, n2: x.n2() })
}

/// Limit of c₂(ε) predicted by the expansion.
#[derive(Clone, Debug, PartialEq)]
pub enum C2Limit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Inconclusive(String),
}

impl C2Limit {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            C2Limit::Finite(v) => Some(*v),
            C2Limit::PlusInfinity => Some(f64::INFINITY),
            C2Limit::MinusInfinity => Some(f64::NEG_INFINITY),
            C2Limit::Inconclusive(_) => None,
        }
    }
}

pub fn c2_limit_classify<T: Real>(o: &ExpansionOrders<T>) -> C2Limit {
    let n2 = o.n2;
    let diff = |s: usize| (o.series[0].lambda[s].clone() - &o.series[1].lambda[s]).to_f64();
    if let (Some(s12), Some(s21)) = (o.s12, o.s21) {
        match o.s {
            Some(s) if 2 * s == s12 + s21 => {
                let dl = diff(s);
                let den = (o.d12.clone() * &o.d21).to_f64();
                return C2Limit::Finite(dl.abs() * dl / den);
            }
            Some(s) if 2 * s > s12 + s21 => return C2Limit::Finite(0.0),
            None if 2 * (o.n1 + 1) > s12 + s21 => return C2Limit::Finite(0.0),
            _ => {}
        }
    }
    if let Some(s) = o.s {
        let cap = |v: Option<usize>| v.map_or(n2 + 1, |v| v.min(n2 + 1));
        if 2 * s < cap(o.s12) + cap(o.s21) {
            return if diff(s) > 0.0 { C2Limit::PlusInfinity } else { C2Limit::MinusInfinity };
        }
    }
    C2Limit::Inconclusive(format!(
        "orders s={} s(12)={} s(21)={} with n(2)={} fall outside the covered cases",
        fmt_order(o.s),
        fmt_order(o.s12),
        fmt_order(o.s21),
        n2
    ))
}

pub fn fmt_order(v: Option<usize>) -> String {
    v.map_or("inf".into(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(phi1: [[f64; 4]; 4], psi1: f64) -> ExpansionInput<f64> {
        let a = TransitionMatrix::full(4);
        let b = TransitionMatrix::from_rows(&["1100", "1100", "0011", "0011"]).unwrap();
        let phi0 = Mat::zeros(4, 4);
        let p1 = Mat::from_fn(4, 4, |i, j| if b.get(i, j) { phi1[i][j] } else { 0.0 });
        let ps1 = Mat::from_fn(4, 4, |i, j| if b.get(i, j) { 0.0 } else { psi1 });
        ExpansionInput::new(a, b, vec![vec![0, 1], vec![2, 3]], vec![phi0, p1], vec![Mat::zeros(4, 4), ps1]).unwrap()
    }

    #[test]
    fn zero_perturbation_has_zero_coefficients() {
        let x = toy([[0.0; 4]; 4], 1.0);
        let s = lambda_series(&x, 0, 1).unwrap();
        assert!((s.lambda[0] - 2.0).abs() < 1e-14);
        assert!(s.lambda[1].abs() < 1e-14);
        assert!(s.resolvent_residual < 1e-12 && s.projection_residual < 1e-12 && s.commutation_residual < 1e-12);
    }

    #[test]
    fn constant_shift_scales_lambda() {
        let x = toy([[0.3; 4]; 4], 1.0);
        let s = lambda_series(&x, 0, 3).unwrap();
        // λe^{0.3ε}: 2, 0.6, 0.09, 0.009
        for (k, want) in [2.0, 0.6, 0.09, 0.009].iter().enumerate() {
            assert!((s.lambda[k] - want).abs() < 1e-13, "{k}: {}", s.lambda[k]);
        }
    }

    #[test]
    fn symmetric_toy_orders() {
        let x = toy([[0.0; 4]; 4], 1.0);
        let o = expansion_orders(&x, 0, 1).unwrap();
        assert_eq!((o.s, o.s12, o.s21), (None, Some(1), Some(1)));
        assert!((o.d12 - o.d21).abs() < 1e-12);
        assert_eq!(c2_limit_classify(&o), C2Limit::Finite(0.0));
    }

    #[test]
    fn partitions_of_three() {
        let p: Vec<Mat<f64>> = (0..4).map(|k| Mat::from_fn(1, 1, |_, _| [0.0, 2.0, 3.0, 5.0][k])).collect();
        // F_3 = φ₁³/6 + φ₁φ₂ + φ₃
        let f3 = partition_factor(&p, 3)[(0, 0)];
        assert!((f3 - (8.0 / 6.0 + 6.0 + 5.0)).abs() < 1e-14);
        let f2 = partition_factor(&p, 2)[(0, 0)];
        assert!((f2 - (2.0 + 3.0)).abs() < 1e-14);
    }
}
