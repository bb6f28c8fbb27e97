//! Seeded generators shared by the integration tests and the acceptance run.
#![allow(dead_code, clippy::needless_range_loop)]

use gibbslab::model::parse_model;
use gibbslab::weights::PerturbationFamily;
use gibbslab::{Mat, Real};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A three-decimal number in [lo, hi].
pub fn dec(rng: &mut TestRng, lo: f64, hi: f64) -> String {
    format!("{:.3}", rng.random_range(lo..=hi))
}

/// Random irreducible pattern on `d` states: a random Hamiltonian cycle plus
/// extra edges with probability `p`.
pub fn irreducible_pattern(rng: &mut TestRng, d: usize, p: f64) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; d]; d];
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(rng);
    for k in 0..d {
        m[order[k]][order[(k + 1) % d]] = true;
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if rng.random_bool(p) {
                *x = true;
            }
        }
    }
    m
}

/// Random irreducible nonnegative matrix with entries in [0.1, 2].
pub fn irreducible_matrix<T: Real>(rng: &mut TestRng, d: usize, p: f64) -> Mat<T> {
    let pat = irreducible_pattern(rng, d, p);
    Mat::from_fn(d, d, |i, j| if pat[i][j] { T::from_f64(rng.random_range(0.1..2.0)) } else { T::zero() })
}

/// Strictly positive matrix with entries in [0.1, 2].
pub fn positive_matrix<T: Real>(rng: &mut TestRng, d: usize) -> Mat<T> {
    Mat::from_fn(d, d, |_, _| T::from_f64(rng.random_range(0.1..2.0)))
}

fn rows(m: &[Vec<bool>]) -> String {
    m.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>() + "\n").collect()
}

/// Model text from patterns and per-pair expressions (0-based pairs).
pub fn model_text(
    a: &[Vec<bool>],
    b: &[Vec<bool>],
    phi: &[(usize, usize, String)],
    psi: &[(usize, usize, String)],
) -> String {
    let mut t = String::from("[meta]\nname = random\n[A]\n");
    t += &rows(a);
    t += "[B]\n";
    t += &rows(b);
    t += "[phi]\nall : 0\n";
    for (i, j, e) in phi {
        t += &format!("{} {} : {e}\n", i + 1, j + 1);
    }
    t += "[psi]\n";
    for (i, j, e) in psi {
        t += &format!("{} {} : {e}\n", i + 1, j + 1);
    }
    t
}

pub struct RandomModel {
    pub text: String,
    pub family: PerturbationFamily,
}

fn finish(
    a: Vec<Vec<bool>>,
    b: Vec<Vec<bool>>,
    phi: Vec<(usize, usize, String)>,
    psi: Vec<(usize, usize, String)>,
) -> RandomModel {
    let text = model_text(&a, &b, &phi, &psi);
    let family = parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}")).family;
    RandomModel { text, family }
}

/// ψ = a log ε + c with a ∈ {1, 1.5, 2}.
fn psi_expr(rng: &mut TestRng) -> String {
    let a = [1.0, 1.5, 2.0][rng.random_range(0..3)];
    format!("{a}*log(eps) + {}", dec(rng, -1.0, 1.0))
}

/// A model satisfying Σ.1–Σ.3 (or violating only Σ.3 when `acyclic_b`) with
/// entries of e^Φ nondecreasing in ε.
pub fn sigma_model(rng: &mut TestRng, acyclic_b: bool) -> RandomModel {
    let d = rng.random_range(2..=6);
    let k = rng.random_range(1..=d.min(3));
    let mut cuts: Vec<usize> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(d);
    let mut b = vec![vec![false; d]; d];
    if !acyclic_b {
        for (c, w) in bounds.windows(2).enumerate() {
            let states: Vec<usize> = (w[0]..w[1]).collect();
            if states.len() == 1 {
                if c == 0 || rng.random_bool(0.8) {
                    b[states[0]][states[0]] = true;
                }
                continue;
            }
            let pat = irreducible_pattern(rng, states.len(), 0.4);
            for (x, &i) in states.iter().enumerate() {
                for (y, &j) in states.iter().enumerate() {
                    b[i][j] = pat[x][y];
                }
            }
        }
    }
    let mut a = b.clone();
    for i in 0..d {
        a[i][(i + 1) % d] = true;
        for j in 0..d {
            if rng.random_bool(0.3) {
                a[i][j] = true;
            }
        }
    }
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if !a[i][j] {
                continue;
            }
            if b[i][j] {
                phi.push((i, j, format!("{} + {}*eps", dec(rng, -1.0, 1.0), dec(rng, 0.0, 1.0))));
            } else {
                phi.push((i, j, dec(rng, -1.0, 1.0)));
                psi.push((i, j, psi_expr(rng)));
            }
        }
    }
    finish(a, b, phi, psi)
}

/// A model with two maximal components carrying the same limit weights and
/// optionally a third, strictly weaker component.
pub fn two_max_model(rng: &mut TestRng) -> RandomModel {
    let m = rng.random_range(1..=2);
    let with_t1 = rng.random_bool(0.5);
    let d = 2 * m + usize::from(with_t1);
    let pat = if m == 1 { vec![vec![true]] } else { irreducible_pattern(rng, m, 0.5) };
    let vals: Vec<Vec<String>> = (0..m).map(|_| (0..m).map(|_| dec(rng, -0.5, 0.5)).collect()).collect();
    let mut b = vec![vec![false; d]; d];
    let mut phi = Vec::new();
    // first-order drifts differ between the copies, so c₂ has a nontrivial limit
    let drift = [dec(rng, 0.0, 2.0), dec(rng, 0.0, 2.0)];
    for c in 0..2 {
        for x in 0..m {
            for y in 0..m {
                if pat[x][y] {
                    b[c * m + x][c * m + y] = true;
                    phi.push((c * m + x, c * m + y, format!("{} + {}*eps", vals[x][y], drift[c])));
                }
            }
        }
    }
    if with_t1 {
        // λ of the copies is at least e^{-0.5}; this loop sits well below
        b[d - 1][d - 1] = true;
        phi.push((d - 1, d - 1, "-2".into()));
    }
    let mut a = b.clone();
    for i in 0..d {
        for j in 0..d {
            if !b[i][j] && (rng.random_bool(0.5) || j == (i + m) % d) {
                a[i][j] = true;
            }
        }
    }
    if with_t1 {
        a[0][d - 1] = true;
        a[d - 1][m] = true;
    }
    let mut psi = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if a[i][j] && !b[i][j] {
                phi.push((i, j, dec(rng, -0.5, 0.5)));
                psi.push((i, j, format!("log(eps) + {}", dec(rng, -1.0, 1.0))));
            }
        }
    }
    finish(a, b, phi, psi)
}

/// Largest relative residual of the three adjugate identities
/// c(j)b(i)Σadj(kk) = adj(ji), b(i)/b(k) = adj(ji)/adj(jk), c(j)/c(k) = adj(ji)/adj(ki).
pub fn adjugate_identity_residual<T: Real>(w: &Mat<T>) -> f64 {
    use gibbslab::perron::{adjugate_entry, perron_data};
    let d = w.rows();
    let pd = perron_data(w).expect("perron data");
    let adj = Mat::from_fn(d, d, |j, i| adjugate_entry(w, &pd.eta, j, i));
    let trace = (0..d).fold(T::zero(), |s, k| s + &adj[(k, k)]);
    let scale = adj.max_abs();
    let mut worst = 0f64;
    for j in 0..d {
        for i in 0..d {
            let lhs = pd.c[j].clone() * &pd.b[i] * &trace;
            worst = worst.max(((lhs - &adj[(j, i)]).abs() / &scale).to_f64());
            for k in 0..d {
                let r2 = pd.b[i].clone() / &pd.b[k] - adj[(j, i)].clone() / &adj[(j, k)];
                let r3 = pd.c[j].clone() / &pd.c[k] - adj[(j, i)].clone() / &adj[(k, i)];
                let s2 = T::max_of(T::one(), (pd.b[i].clone() / &pd.b[k]).abs());
                let s3 = T::max_of(T::one(), (pd.c[j].clone() / &pd.c[k]).abs());
                worst = worst.max((r2.abs() / s2).to_f64()).max((r3.abs() / s3).to_f64());
            }
        }
    }
    worst
}

/// Largest relative gap between the path decomposition of each adjugate
/// diagonal entry and the determinant.
pub fn decomposition_residual<T: Real>(w: &Mat<T>) -> f64 {
    use gibbslab::perron::{adjugate_diag_decomposition, adjugate_entry, spectral_radius};
    let eta = spectral_radius(w).expect("radius");
    let mut worst = 0f64;
    for k in 0..w.rows() {
        let dec = adjugate_diag_decomposition(w, k).expect("decomposition");
        let det = adjugate_entry(w, &eta, k, k);
        let scale = T::max_of(det.clone().abs(), T::from_f64(1e-300));
        worst = worst.max(((dec.value - det) / scale).abs().to_f64());
    }
    worst
}

/// Residuals of a Gibbs measure: stationarity, entropy identity.
pub fn gibbs_residuals(w: &Mat<f64>) -> (f64, f64) {
    use gibbslab::thermo::{entropy, gibbs_measure, integral_of_potential};
    let mu = gibbs_measure(w).expect("gibbs");
    let pp = mu.kernel.vec_mul(&mu.pi);
    let stat = pp.iter().zip(&mu.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let h = entropy(&mu);
    let ident = (h - (mu.lambda.ln() - integral_of_potential(&mu.pi, &mu.kernel, w))).abs();
    (stat, ident)
}

/// Random Markov measure whose kernel lives on the support of `w`.
pub fn random_markov(rng: &mut TestRng, w: &Mat<f64>) -> gibbslab::thermo::MarkovMeasure<f64> {
    let d = w.rows();
    let mut k = Mat::from_fn(d, d, |i, j| if w[(i, j)] > 0.0 { rng.random_range(0.01..1.0) } else { 0.0 });
    for i in 0..d {
        let s: f64 = (0..d).map(|j| k[(i, j)]).sum();
        for j in 0..d {
            k[(i, j)] /= s;
        }
    }
    let pi = gibbslab::thermo::stationary(&k).expect("stationary");
    let s: f64 = pi.iter().sum();
    let pi = pi.into_iter().map(|x| x / s).collect();
    gibbslab::thermo::MarkovMeasure { pi, kernel: k }
}

/// |pressure − pressure_by_words(n)| for n = 4, 8, 16, 32.
pub fn word_pressure_gaps(w: &Mat<f64>) -> Vec<f64> {
    use gibbslab::sft::TransitionMatrix;
    let d = w.rows();
    let m = TransitionMatrix::from_fn(d, |i, j| w[(i, j)] > 0.0);
    let p = gibbslab::thermo::pressure(w).expect("pressure");
    let phi = |i: usize, j: usize| w[(i, j)].ln();
    [4, 8, 16, 32].iter().map(|&n| (gibbslab::thermo::pressure_by_words(&m, &phi, n) - p).abs()).collect()
}

/// Per-length Gibbs constants up to n = 8.
pub fn gibbs_constants(w: &Mat<f64>) -> Vec<f64> {
    let mu = gibbslab::thermo::gibbs_measure(w).expect("gibbs");
    gibbslab::thermo::gibbs_constant_check(&mu, w, 8).expect("constant").per_length
}

/// λ(ε) of a single irreducible block with e^{φ₀ + φ₁ε + φ₂ε²} weights.
pub fn series_block<T: Real>(w0: &Mat<T>, phi1: &Mat<T>, phi2: &Mat<T>, eps: &T) -> T {
    let d = w0.rows();
    let w = Mat::from_fn(d, d, |i, j| {
        if w0[(i, j)].is_zero() {
            T::zero()
        } else {
            w0[(i, j)].clone() * (phi1[(i, j)].clone() * eps + phi2[(i, j)].clone() * eps.clone() * eps).exp()
        }
    });
    gibbslab::perron::spectral_radius(&w).expect("radius")
}

/// Relative errors of λ₁, λ₂ from the eigenprojection recursion against
/// central differences of the exact root.
pub fn series_vs_differences(rng: &mut TestRng) -> (f64, f64) {
    use gibbslab::asymptotics::{lambda_series, ExpansionInput};
    use gibbslab::sft::TransitionMatrix;
    use gibbslab::Mp;
    let d = rng.random_range(2..=4);
    let w0: Mat<Mp> = irreducible_matrix(rng, d, 0.5);
    let pat = TransitionMatrix::from_fn(d, |i, j| !w0[(i, j)].is_zero());
    let phi1 = Mat::from_fn(d, d, |_, _| Mp::from_f64(rng.random_range(-1.0..1.0)));
    let phi2 = Mat::from_fn(d, d, |_, _| Mp::from_f64(rng.random_range(-1.0..1.0)));
    let phi0 = Mat::from_fn(d, d, |i, j| if w0[(i, j)].is_zero() { Mp::zero() } else { w0[(i, j)].clone().ln() });
    let x =
        ExpansionInput::new(pat.clone(), pat, vec![(0..d).collect()], vec![phi0, phi1.clone(), phi2.clone()], vec![])
            .expect("input");
    let s = lambda_series(&x, 0, 2).expect("series");
    let h = Mp::parse_decimal("1e-20").unwrap();
    let lp = series_block(&w0, &phi1, &phi2, &h);
    let lm = series_block(&w0, &phi1, &phi2, &(-h.clone()));
    let l0 = series_block(&w0, &phi1, &phi2, &Mp::zero());
    let d1 = (lp.clone() - &lm) / (h.clone() * Mp::from_f64(2.0));
    let d2 = (lp + lm - l0.clone() * Mp::from_f64(2.0)) / (h.clone() * &h * Mp::from_f64(2.0));
    let rel = |a: &Mp, b: &Mp| ((a.clone() - b).abs() / Mp::max_of(b.clone().abs(), Mp::from_f64(1e-30))).to_f64();
    (rel(&s.lambda[1], &d1), rel(&s.lambda[2], &d2))
}

/// The six two-component models covering the three limit cases of c₂:
/// (name, text, expected kind) with kind 0 finite, 1 zero, 2 infinite.
pub fn c2_case_models() -> Vec<(&'static str, String, u8)> {
    let model = |a: [&str; 2], b: [&str; 2], p: [u32; 2], w: [&str; 2]| -> String {
        let mut t = String::from(
            "[meta]\nname = two\n[A]\n1111\n1111\n1111\n1111\n[B]\n1100\n1100\n0011\n0011\n[phi]\nall : 0\n",
        );
        let base = [["0.2", "-0.1"], ["0.3", "0"]];
        for c in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    t += &format!(
                        "{} {} : {} + {}*eps + {}*eps^2\n",
                        2 * c + x + 1,
                        2 * c + y + 1,
                        base[x][y],
                        a[c],
                        b[c]
                    );
                }
            }
        }
        t += "[psi]\n";
        t += &format!("block 1 2 : {}*log(eps) + log({})\n", p[0], w[0]);
        t += &format!("block 2 1 : {}*log(eps) + log({})\n", p[1], w[1]);
        t
    };
    vec![
        ("finite, positive", model(["1", "0.5"], ["0", "0"], [1, 1], ["1", "2"]), 0),
        ("finite, negative", model(["0.2", "1.3"], ["0.1", "0"], [1, 1], ["0.5", "1.5"]), 0),
        ("zero, second order", model(["0.7", "0.7"], ["1", "0.3"], [1, 1], ["1", "1"]), 1),
        ("zero, identical", model(["0", "0"], ["0", "0"], [1, 1], ["2", "0.5"]), 1),
        ("+inf", model(["1", "0.4"], ["0", "0"], [2, 2], ["1", "1"]), 2),
        ("-inf", model(["0.3", "1.2"], ["0", "0"], [2, 3], ["1", "3"]), 2),
    ]
}
