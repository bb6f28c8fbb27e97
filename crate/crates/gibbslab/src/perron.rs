//! Perron data of nonnegative matrices, adjugate identities and the behaviour
//! of Perron vectors of perturbed matrices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_shifted_m_matrix, sum, Mat};
use crate::real::Real;
use crate::sft::ordered_components;

/// Relative gap below which two class Perron roots count as tied.
pub const TIE_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[derive(Clone, Debug)]
pub struct PerronData<T> {
    pub eta: T,
    /// Right eigenvector, Σ b = 1.
    pub b: Vec<T>,
    /// Left eigenvector, Σ b c = 1.
    pub c: Vec<T>,
    pub irreducible: bool,
    /// The matrix is zero (η = 0, c = 0).
    pub degenerate: bool,
    /// Classes (state lists) whose roots tie with η when more than one does.
    pub ties: Vec<Vec<usize>>,
}

/// Perron root and right vector (Σ = 1) of an irreducible nonnegative matrix by
/// Noda iteration: inverse iteration shifted to the Collatz–Wielandt upper bound.
pub fn perron_irreducible<T: Real>(w: &Mat<T>) -> Result<(T, Vec<T>)> {
    let n = w.rows();
    if n == 1 {
        return Ok((w[(0, 0)].clone(), vec![T::one()]));
    }
    let tol = T::from_f64(64.0 * n as f64 * T::unit_roundoff());
    let mut x = vec![T::one() / T::from_f64(n as f64); n];
    let mut hi = T::zero();
    for _ in 0..MAX_ITER {
        let (h, lo) = collatz_bracket(w, &x);
        hi = h;
        if hi.clone() - &lo <= tol.clone() * &hi {
            return Ok((hi, x));
        }
        let z = match solve_shifted_m_matrix(w, &hi, &x) {
            Some(z) if z.iter().all(|v| *v > T::zero() && v.is_finite()) => z,
            // the shift has reached the root to working precision
            _ => break,
        };
        let s = sum(&z);
        x = z.into_iter().map(|v| v / &s).collect();
    }
    // Weakly coupled states converge slowly; pin the largest entry and solve
    // the remaining rows of (ηI − W)x = 0 directly.
    let k = (0..n).fold(0, |a, i| if x[i] > x[a] { i } else { a });
    let rest: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let rhs: Vec<T> = rest.iter().map(|&i| w[(i, k)].clone()).collect();
    if let Some(xr) = solve_shifted_m_matrix(&w.principal(&rest), &hi, &rhs) {
        if xr.iter().all(|v| *v > T::zero() && v.is_finite()) {
            let mut y = vec![T::one(); n];
            for (t, &i) in rest.iter().enumerate() {
                y[i] = xr[t].clone();
            }
            let s = sum(&y);
            y = y.into_iter().map(|v| v / &s).collect();
            let (h2, lo2) = collatz_bracket(w, &y);
            if h2.clone() - &lo2 <= T::from_f64(T::unit_roundoff().sqrt()) * &h2 {
                return Ok((h2, y));
            }
        }
    }
    let (h, lo) = collatz_bracket(w, &x);
    let width = h.clone() - &lo;
    if width <= T::from_f64(T::unit_roundoff().sqrt()) * &h {
        Ok((h, x))
    } else {
        Err(Error::Numeric(format!("Perron iteration stalled with bracket width {:e}", width.to_f64())))
    }
}

/// max and min of (Wx)ᵢ/xᵢ.
fn collatz_bracket<T: Real>(w: &Mat<T>, x: &[T]) -> (T, T) {
    let y = w.mul_vec(x);
    let mut hi = y[0].clone() / &x[0];
    let mut lo = hi.clone();
    for i in 1..x.len() {
        let r = y[i].clone() / &x[i];
        if r > hi {
            hi = r;
        } else if r < lo {
            lo = r;
        }
    }
    (hi, lo)
}

/// Classes of the support graph in block-triangular order.
pub fn support_classes<T: Real>(w: &Mat<T>) -> Vec<Vec<usize>> {
    ordered_components(w.rows(), |i, j| !w[(i, j)].is_zero())
}

fn class_root<T: Real>(w: &Mat<T>, class: &[usize]) -> Result<T> {
    if class.len() == 1 {
        return Ok(w[(class[0], class[0])].clone());
    }
    Ok(perron_irreducible(&w.principal(class))?.0)
}

/// Spectral radius: the largest class Perron root, 0 for nilpotent input.
pub fn spectral_radius<T: Real>(w: &Mat<T>) -> Result<T> {
    let mut r = T::zero();
    for class in support_classes(w) {
        r = T::max_of(r, class_root(w, &class)?);
    }
    Ok(r)
}

/// Perron data for any nonnegative square matrix. For reducible input the
/// vectors are built from the dominant class and extended by solving the
/// resolvent equations off it.
pub fn perron_data<T: Real>(w: &Mat<T>) -> Result<PerronData<T>> {
    let n = w.rows();
    if !w.is_square() || n == 0 {
        return Err(Error::Dimension("Perron data needs a nonempty square matrix".into()));
    }
    let classes = support_classes(w);
    let irreducible = classes.len() == 1;
    if w.max_abs().is_zero() {
        return Ok(PerronData {
            eta: T::zero(),
            b: vec![T::one() / T::from_f64(n as f64); n],
            c: vec![T::zero(); n],
            irreducible,
            degenerate: true,
            ties: vec![],
        });
    }
    if irreducible {
        let (eta, b) = perron_irreducible(w)?;
        let (_, c) = perron_irreducible(&w.transpose())?;
        return Ok(normalized(eta, b, c, true, vec![]));
    }
    let roots: Vec<T> = classes.iter().map(|c| class_root(w, c)).collect::<Result<_>>()?;
    let top = roots.iter().cloned().fold(T::zero(), T::max_of);
    let tie_tol = top.clone() * T::from_f64(TIE_TOL);
    let tied: Vec<usize> = (0..classes.len()).filter(|&k| (top.clone() - &roots[k]).abs() <= tie_tol).collect();
    let dom = &classes[tied[0]];
    let rest: Vec<usize> = (0..n).filter(|s| !dom.contains(s)).collect();
    let eta = roots[tied[0]].clone();
    let (bd, cd) = if dom.len() == 1 {
        (vec![T::one()], vec![T::one()])
    } else {
        let sub = w.principal(dom);
        (perron_irreducible(&sub)?.1, perron_irreducible(&sub.transpose())?.1)
    };
    let extend = |m: &Mat<T>, xd: &[T]| -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (k, &s) in dom.iter().enumerate() {
            x[s] = xd[k].clone();
        }
        if rest.is_empty() {
            return x;
        }
        let rhs = m.submatrix(&rest, dom).mul_vec(xd);
        let wrr = m.principal(&rest);
        let sol = solve_shifted_m_matrix(&wrr, &eta, &rhs)
            .or_else(|| {
                let shifted = Mat::from_fn(rest.len(), rest.len(), |i, j| {
                    let d = if i == j { eta.clone() } else { T::zero() };
                    d - &wrr[(i, j)]
                });
                shifted.solve(&rhs)
            })
            .unwrap_or_else(|| vec![T::zero(); rest.len()]);
        for (k, &s) in rest.iter().enumerate() {
            x[s] = T::max_of(sol[k].clone(), T::zero());
        }
        x
    };
    let b = extend(w, &bd);
    let c = extend(&w.transpose(), &cd);
    let ties = if tied.len() > 1 { tied.iter().map(|&k| classes[k].clone()).collect() } else { vec![] };
    Ok(normalized(eta, b, c, false, ties))
}

fn normalized<T: Real>(eta: T, b: Vec<T>, c: Vec<T>, irreducible: bool, ties: Vec<Vec<usize>>) -> PerronData<T> {
    let s = sum(&b);
    let b: Vec<T> = b.into_iter().map(|x| x / &s).collect();
    let bc = dot(&b, &c);
    let c: Vec<T> = c.into_iter().map(|x| x / &bc).collect();
    PerronData { eta, b, c, irreducible, degenerate: false, ties }
}

/// Signed adjugate entry: (−1)^{j+i} times the minor of ηI − W with row
/// `j` and column `i` struck out. For a simple root it equals
/// c(j) b(i) Σ_k adj(kk).
pub fn adjugate_entry<T: Real>(w: &Mat<T>, eta: &T, j: usize, i: usize) -> T {
    let n = w.rows();
    let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
    let d = Mat::from_fn(n - 1, n - 1, |a, b| {
        let (r, c) = (rows[a], cols[b]);
        let diag = if r == c { eta.clone() } else { T::zero() };
        diag - &w[(r, c)]
    });
    let det = d.det();
    if (i + j) % 2 == 0 {
        det
    } else {
        -det
    }
}

pub type SimplePath = Vec<usize>;

/// All simple paths from `i` to `j` whose interior lies in `through`.
pub fn simple_paths(i: usize, j: usize, through: &[usize]) -> Vec<SimplePath> {
    if i == j {
        return vec![vec![i]];
    }
    let mut pool: Vec<usize> = through.iter().copied().filter(|&s| s != i && s != j).collect();
    pool.sort_unstable();
    pool.dedup();
    let mut out = Vec::new();
    let mut cur = vec![i];
    let mut used = vec![false; pool.len()];
    fn rec(pool: &[usize], used: &mut [bool], cur: &mut Vec<usize>, j: usize, out: &mut Vec<SimplePath>) {
        let mut p = cur.clone();
        p.push(j);
        out.push(p);
        for k in 0..pool.len() {
            if !used[k] {
                used[k] = true;
                cur.push(pool[k]);
                rec(pool, used, cur, j, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    rec(&pool, &mut used, &mut cur, j, &mut out);
    out
}

/// Product of entries along a path.
pub fn path_weight<T: Real>(w: &Mat<T>, path: &[usize]) -> T {
    let mut p = T::one();
    for e in path.windows(2) {
        p *= &w[(e[0], e[1])];
    }
    p
}

/// One factor η(M(sup)) − η(M(sub)) with sub ⊊ sup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub sup: Vec<usize>,
    pub sub: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AdjugateDecomposition<T> {
    pub k: usize,
    /// Each term is a product of factors.
    pub terms: Vec<Vec<Factor>>,
    pub term_values: Vec<T>,
    /// Sum of the terms; equals the adjugate diagonal entry.
    pub value: T,
    /// The closed 3×3 form (η−η(i₂i₃))(η−η(i₂)+η(i₂i₃)−η(i₃)) when d = 3.
    pub closed_form_3x3: Option<T>,
}

pub const MAX_DECOMPOSITION_DIM: usize = 6;

/// Expand adj(kk) of ηI − W as a sum of products of differences of Perron
/// roots of nested principal submatrices.
pub fn adjugate_diag_decomposition<T: Real>(w: &Mat<T>, k: usize) -> Result<AdjugateDecomposition<T>> {
    let n = w.rows();
    if n > MAX_DECOMPOSITION_DIM {
        return Err(Error::Unsupported(format!("decomposition limited to dimension {MAX_DECOMPOSITION_DIM}, got {n}")));
    }
    let all: Vec<usize> = (0..n).collect();
    let s: Vec<usize> = all.iter().copied().filter(|&x| x != k).collect();
    let xi = vec![all.clone(); s.len()];
    let terms = expand(&s, &xi);
    let mut cache: HashMap<Vec<usize>, T> = HashMap::new();
    let mut eta_of = |set: &[usize]| -> Result<T> {
        if let Some(v) = cache.get(set) {
            return Ok(v.clone());
        }
        let v = spectral_radius(&w.principal(set))?;
        cache.insert(set.to_vec(), v.clone());
        Ok(v)
    };
    let mut term_values = Vec::with_capacity(terms.len());
    let mut value = T::zero();
    for t in &terms {
        let mut p = T::one();
        for f in t {
            p *= eta_of(&f.sup)? - eta_of(&f.sub)?;
        }
        value += &p;
        term_values.push(p);
    }
    let closed_form_3x3 = if n == 3 {
        let (i2, i3) = (s[0], s[1]);
        let eta = eta_of(&all)?;
        let e23 = eta_of(&[i2, i3])?;
        Some((eta.clone() - &e23) * (eta - eta_of(&[i2])? + e23 - eta_of(&[i3])?))
    } else {
        None
    };
    Ok(AdjugateDecomposition { k, terms, term_values, value, closed_form_3x3 })
}

/// det(diag(ξ) − D_S) as a sum of products, where ξ holds the sets whose
/// Perron roots sit on the diagonal.
fn expand(s: &[usize], xi: &[Vec<usize>]) -> Vec<Vec<Factor>> {
    match s.len() {
        0 => vec![vec![]],
        1 => vec![vec![Factor { sup: xi[0].clone(), sub: s.to_vec() }]],
        q => {
            let mut out = Vec::new();
            for i in 0..q {
                let head = Factor { sup: xi[i].clone(), sub: s.to_vec() };
                let s2: Vec<usize> = s.iter().enumerate().filter(|&(t, _)| t != i).map(|(_, &x)| x).collect();
                let mut xi2: Vec<Vec<usize>> = vec![s.to_vec(); i];
                xi2.extend_from_slice(&xi[i + 1..]);
                for mut rest in expand(&s2, &xi2) {
                    rest.insert(0, head.clone());
                    out.push(rest);
                }
            }
            out
        }
    }
}

/// Outcome of the (M.1)–(M.4) checks on an ε-grid.
#[derive(Clone, Debug)]
pub struct PerturbedMatrixReport {
    pub grid: Vec<f64>,
    pub m1_support_constant: bool,
    pub m2_upper_bounded: bool,
    pub m3_lower_vanishing: bool,
    pub m4_diagonal_converges: bool,
    /// Diagonal values at the smallest ε.
    pub eta_limits: Vec<f64>,
    pub t0: Vec<usize>,
    pub t1: Vec<usize>,
    /// Per grid point, per i ∈ T₁: b_ε(i) over its simple-path sum.
    pub b_ratios: Vec<Vec<f64>>,
    /// Same for the left vector.
    pub c_ratios: Vec<Vec<f64>>,
    pub ratios_bounded: bool,
}

impl PerturbedMatrixReport {
    pub fn conditions_hold(&self) -> bool {
        self.m1_support_constant && self.m2_upper_bounded && self.m3_lower_vanishing && self.m4_diagonal_converges
    }
}

/// Largest allowed max/min spread of a ratio over the grid before it is
/// reported unbounded.
pub const RATIO_SPREAD_LIMIT: f64 = 100.0;

/// Evaluate `family` on a decreasing grid and test (M.1)–(M.4) together with
/// the simple-path comparison for the Perron vectors on T₁.
pub fn check_perturbed_matrix_family<T: Real>(
    family: &dyn Fn(&T) -> Result<Mat<T>>,
    grid: &[f64],
) -> Result<PerturbedMatrixReport> {
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let mats: Vec<Mat<T>> = grid.iter().map(|&e| family(&T::from_f64(e))).collect::<Result<_>>()?;
    let n = mats[0].rows();
    let at = |g: usize, i: usize, j: usize| mats[g][(i, j)].to_f64();
    let last = grid.len() - 1;
    let m1 = (0..n).all(|i| (0..n).all(|j| mats.iter().all(|m| m[(i, j)].is_zero() == mats[0][(i, j)].is_zero())));
    let half = grid.len() / 2;
    let mut m2 = true;
    let mut m3 = true;
    let mut m4 = true;
    for i in 0..n {
        for j in 0..n {
            let series: Vec<f64> = (0..grid.len()).map(|g| at(g, i, j)).collect();
            if i < j {
                let early = series[..=half].iter().cloned().fold(0.0, f64::max);
                let late = series[half..].iter().cloned().fold(0.0, f64::max);
                m2 &= series.iter().all(|v| v.is_finite()) && late <= 10.0 * early.max(1e-300);
            } else if i > j {
                m3 &= series[last] <= 1e-6 || series[last] <= series[0] / 10.0;
            } else {
                let tail: Vec<f64> = tail_decades(grid, 3).map(|g| series[g]).collect();
                let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
                m4 &= hi - lo <= 1e-3 * series[last].abs().max(1.0);
            }
        }
    }
    let eta_limits: Vec<f64> = (0..n).map(|i| at(last, i, i)).collect();
    let top = eta_limits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let t0: Vec<usize> = (0..n).filter(|&i| (top - eta_limits[i]).abs() <= 1e-9 * top.abs().max(1.0)).collect();
    let t1: Vec<usize> = (0..n).filter(|i| !t0.contains(i)).collect();
    let mut b_ratios = Vec::new();
    let mut c_ratios = Vec::new();
    for m in &mats {
        let pd = perron_data(m)?;
        let mut br = Vec::new();
        let mut cr = Vec::new();
        for &i in &t1 {
            let mut sb = T::zero();
            let mut sc = T::zero();
            for &j in &t0 {
                for p in simple_paths(i, j, &t1) {
                    sb += path_weight(m, &p) * &pd.b[j];
                }
                for p in simple_paths(j, i, &t1) {
                    sc += path_weight(m, &p) * &pd.c[j];
                }
            }
            br.push((pd.b[i].clone() / sb).to_f64());
            cr.push((pd.c[i].clone() / sc).to_f64());
        }
        b_ratios.push(br);
        c_ratios.push(cr);
    }
    let spread_ok = |rs: &[Vec<f64>]| {
        (0..t1.len()).all(|k| {
            let col: Vec<f64> = rs.iter().map(|r| r[k]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(0.0, f64::max);
            lo > 0.0 && hi.is_finite() && hi / lo <= RATIO_SPREAD_LIMIT
        })
    };
    let ratios_bounded = spread_ok(&b_ratios) && spread_ok(&c_ratios);
    Ok(PerturbedMatrixReport {
        grid: grid.to_vec(),
        m1_support_constant: m1,
        m2_upper_bounded: m2,
        m3_lower_vanishing: m3,
        m4_diagonal_converges: m4,
        eta_limits,
        t0,
        t1,
        b_ratios,
        c_ratios,
        ratios_bounded,
    })
}

/// Indices of grid points within `decades` decades of the smallest one.
pub(crate) fn tail_decades(grid: &[f64], decades: u32) -> impl Iterator<Item = usize> + '_ {
    let min = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let cut = min * 10f64.powi(decades as i32) * (1.0 + 1e-9);
    (0..grid.len()).filter(move |&g| grid[g] <= cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp;

    fn m(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows_f64(rows)
    }

    #[test]
    fn ones_matrix() {
        let pd = perron_data(&m(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!((pd.eta - 2.0).abs() < 1e-15);
        assert!((pd.b[0] - 0.5).abs() < 1e-15 && (pd.b[1] - 0.5).abs() < 1e-15);
        assert!((pd.c[0] - 1.0).abs() < 1e-14 && (pd.c[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn four_component_block() {
        let pd = perron_data(&m(&[&[2.0, 1.0], &[1.11, 2.11]])).unwrap();
        assert!((pd.eta - 3.11).abs() < 1e-14);
    }

    #[test]
    fn radius_conventions() {
        assert_eq!(spectral_radius(&m(&[&[0.0]])).unwrap(), 0.0);
        assert!((spectral_radius(&m(&[&[2.0, 1.0], &[0.0, 3.0]])).unwrap() - 3.0).abs() < 1e-15);
        let pd = perron_data(&m(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert!(pd.degenerate && pd.eta == 0.0);
    }

    #[test]
    fn reducible_vectors_are_eigenvectors() {
        let w = m(&[&[2.0, 1.0, 0.0], &[0.0, 3.0, 0.5], &[0.0, 0.0, 1.0]]);
        let pd = perron_data(&w).unwrap();
        assert!(!pd.irreducible && pd.ties.is_empty());
        let r = w.mul_vec(&pd.b);
        let l = w.vec_mul(&pd.c);
        for i in 0..3 {
            assert!((r[i] - pd.eta * pd.b[i]).abs() < 1e-14);
            assert!((l[i] - pd.eta * pd.c[i]).abs() < 1e-14);
        }
        assert!(pd.b[0] > 0.0 && pd.b[2] == 0.0);
        assert!(pd.c[2] > 0.0 && pd.c[0] == 0.0);
    }

    #[test]
    fn ties_are_flagged() {
        let pd = perron_data(&m(&[&[2.0, 0.0], &[0.0, 2.0]])).unwrap();
        assert_eq!(pd.ties.len(), 2);
    }

    #[test]
    fn tiny_gap_in_high_precision() {
        let e = Mp::parse_decimal("1e-30").unwrap();
        let one = Mp::one();
        let w = Mat::from_fn(2, 2, |i, j| if i == j { one.clone() } else { e.clone() });
        let (eta, _) = perron_irreducible(&w).unwrap();
        let gap = (eta - one - &e).abs().to_f64();
        assert!(gap < 1e-70, "{gap:e}");
    }

    #[test]
    fn two_by_two_adjugate() {
        let w = m(&[&[1.0, 2.0], &[3.0, 0.5]]);
        let eta = spectral_radius(&w).unwrap();
        assert!((adjugate_entry(&w, &eta, 0, 0) - (eta - 0.5)).abs() < 1e-14);
        let id: Mat<f64> = Mat::identity(3);
        for k in 0..3 {
            assert_eq!(adjugate_entry(&id, &1.0, k, k), 0.0);
        }
    }

    #[test]
    fn simple_path_examples() {
        assert_eq!(simple_paths(0, 2, &[1]), vec![vec![0, 2], vec![0, 1, 2]]);
        assert_eq!(simple_paths(0, 0, &[]), vec![vec![0]]);
        assert_eq!(simple_paths(0, 3, &[1, 2]).len(), 5);
    }

    #[test]
    fn decomposition_closed_forms() {
        let w = m(&[&[1.0, 2.0], &[3.0, 0.5]]);
        let d = adjugate_diag_decomposition(&w, 0).unwrap();
        let eta = spectral_radius(&w).unwrap();
        assert!((d.value - (eta - 0.5)).abs() < 1e-14);
        let w = m(&[&[1.0, 2.0, 0.5], &[3.0, 0.5, 1.0], &[0.2, 0.7, 2.0]]);
        for k in 0..3 {
            let d = adjugate_diag_decomposition(&w, k).unwrap();
            let eta = spectral_radius(&w).unwrap();
            let adj = adjugate_entry(&w, &eta, k, k);
            assert!((d.value - adj).abs() < 1e-12 * adj.abs().max(1.0));
            if k == 0 {
                assert!((d.closed_form_3x3.unwrap() - adj).abs() < 1e-12);
            }
        }
        let big: Mat<f64> = Mat::identity(7);
        assert!(matches!(adjugate_diag_decomposition(&big, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn diagonal_dominant_family() {
        let fam = |e: &f64| -> Result<Mat<f64>> { Ok(Mat::from_rows_f64(&[&[2.0, *e], &[e * e, 1.0]])) };
        let grid: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
        let r = check_perturbed_matrix_family(&fam, &grid).unwrap();
        assert!(r.conditions_hold(), "{r:?}");
        assert_eq!((r.t0.clone(), r.t1.clone()), (vec![0], vec![1]));
        for row in &r.b_ratios {
            assert!((0.5..=2.0).contains(&row[0]), "{row:?}");
        }
        assert!(r.ratios_bounded);
    }

    #[test]
    fn constant_family_passes_trivially() {
        let fam = |_: &f64| -> Result<Mat<f64>> { Ok(Mat::from_rows_f64(&[&[1.0, 1.0], &[1.0, 1.0]])) };
        let r = check_perturbed_matrix_family(&fam, &[0.1, 0.01]).unwrap();
        assert!(r.t1.is_empty() && r.ratios_bounded && r.m1_support_constant);
    }
}
