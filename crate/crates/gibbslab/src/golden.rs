//! Pinned scenarios for the two bundled example models: closed forms,
//! independent oracles and the checks `reproduce` prints.

use rug::Complex;

use crate::error::Result;
use crate::linalg::Mat;
use crate::matrep::{classify_components, delta4_at, geometric_grid, mv_from_snapshot, sin_sequence, Snapshot};
use crate::model::{parse_model_with, EXAMPLE_5_2, EXAMPLE_5_3};
use crate::real::{precision, Mp, Real};
use crate::thermo::gibbs_measure;
use crate::weights::PerturbationFamily;

/// One pinned comparison.
#[derive(Clone, Debug)]
pub struct Check {
    /// Scenario group, e.g. `closed-forms`.
    pub group: &'static str,
    pub detail: String,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
    /// The reference claim is known not to hold; a failure is expected.
    pub known_discrepancy: bool,
}

impl Check {
    fn new(group: &'static str, detail: String, measured: f64, tol: f64) -> Self {
        let pass = measured.is_finite() && measured <= tol;
        Check { group, detail, measured, tol, pass, known_discrepancy: false }
    }

    pub fn line(&self) -> String {
        let verdict = match (self.pass, self.known_discrepancy) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known discrepancy)",
            (false, false) => "FAIL",
        };
        format!("{verdict:<4} {:<14} {}  [{:.3e} <= {:.1e}]", self.group, self.detail, self.measured, self.tol)
    }
}

fn mp(x: &str) -> Mp {
    Mp::parse_decimal(x).expect("literal")
}

/// The three-component model with coupling exponent `s`.
pub fn family_5_2(s: &str) -> Result<PerturbationFamily> {
    parse_model_with(EXAMPLE_5_2, &[("s".into(), s.into())]).map(|m| m.family).map_err(|e| e.error)
}

pub fn family_5_3() -> Result<PerturbationFamily> {
    parse_model_with(EXAMPLE_5_3, &[]).map(|m| m.family).map_err(|e| e.error)
}

/// λ({2,3},ε) = 2 + 2ε^{(1+s)/2}.
pub fn lambda23_closed(eps: &Mp, s: &Mp) -> Mp {
    let e = (Mp::one() + s) / Mp::from_f64(2.0);
    Mp::from_f64(2.0) + eps.powf(&e) * Mp::from_f64(2.0)
}

/// λ(ε) = K^{1/3}/3 + 4ε^{s+1}/K^{1/3} + 2 with
/// K = 108ε²ε^{sin(1/ε)/3+1} + 12√(−12ε^{3(s+1)} + 81ε⁴ε^{2sin(1/ε)/3+2}),
/// evaluated in complex arithmetic on the principal branch.
pub fn cardano_lambda(eps: &Mp, s: &Mp) -> Mp {
    let p = precision();
    let one = Mp::one();
    let sn = (one.clone() / eps).sin();
    let e31 = sn.clone() / Mp::from_f64(3.0) + &one;
    let a = Mp::from_f64(108.0) * eps.powi(2) * eps.powf(&e31);
    let s1 = s.clone() + &one;
    let rad = Mp::from_f64(-12.0) * eps.powf(&(s1.clone() * Mp::from_f64(3.0)))
        + Mp::from_f64(81.0)
            * eps.powi(4)
            * eps.powf(&(sn * Mp::from_f64(2.0) / Mp::from_f64(3.0) + Mp::from_f64(2.0)));
    let root = Complex::with_val(p, (rad, 0)).sqrt();
    let k = Complex::with_val(p, (a, 0)) + root * 12u32;
    let k13 = (k.ln() / 3u32).exp();
    let c4 = Mp::from_f64(4.0) * eps.powf(&s1);
    let lam = k13.clone() / 3u32 + Complex::with_val(p, (c4, 0)) / k13 + 2u32;
    lam.real().clone()
}

/// The mV matrix of the four-component model as a closed form in ε and the
/// full right eigenvector g (0-based states).
pub fn mv_display(eps: &Mp, g: &[Mp]) -> Mat<Mp> {
    let e = eps.clone();
    let two_e = e.clone() * Mp::from_f64(2.0);
    let three = Mp::from_f64(3.0);
    let fifth = e.clone() / Mp::from_f64(5.0);
    let ten = Mp::from_f64(10.0);
    let m34 = fifth.clone() * (g[6].clone() + ten.clone() * &g[7]) / (g[6].clone() + &g[7]);
    let m43 = fifth * (ten * &g[4] + &g[5]) / (g[4].clone() + &g[5]);
    let z = Mp::zero();
    let rows = [
        [three.clone(), two_e.clone(), two_e.clone(), two_e.clone()],
        [two_e.clone(), e.clone() * Mp::from_ratio(11, 10) + &three, e.clone().powi(4), z],
        [two_e.clone(), e.clone(), three.clone(), m34],
        [two_e.clone(), two_e, m43, three],
    ];
    Mat::from_fn(4, 4, |i, j| rows[i][j].clone())
}

/// 3 + 1.1ε + (√6/2)ε^{5/2}.
pub fn lambda234_expansion(eps: &Mp) -> Mp {
    let six = Mp::from_f64(6.0);
    Mp::from_f64(3.0)
        + eps.clone() * Mp::from_ratio(11, 10)
        + six.sqrt() / Mp::from_f64(2.0) * eps.powf(&Mp::from_ratio(5, 2))
}

/// Leading ε³ coefficient of λᵛ({2,3,4},ε) − λᵛ(2,ε).
pub fn lambda_v_constant() -> Mp {
    let arg = Mp::from_f64(180.0) * Mp::from_f64(1273610.0).sqrt() / Mp::from_f64(101269.0);
    let c = (arg.atan() / Mp::from_f64(3.0)).cos();
    let c2 = c.clone() * &c;
    let num = Mp::from_f64(14884.0) * &c2 + Mp::from_f64(9028.0) * &c + Mp::from_f64(2035.0);
    let den = Mp::from_f64(14884.0) * &c2 + Mp::from_f64(5368.0) * &c - Mp::from_f64(605.0);
    Mp::from_ratio(20, 3) * num / den
}

/// Marginals μ(ε,Σ_k) of the three components at ε.
pub fn marginals_5_2(f: &PerturbationFamily, eps: &Mp) -> Result<[f64; 3]> {
    let mu = gibbs_measure(&f.weighted_matrix(eps, None)?)?;
    let m = |a: usize| (mu.pi[2 * a].clone() + &mu.pi[2 * a + 1]).to_f64();
    Ok([m(0), m(1), m(2)])
}

fn seq_point(eps: f64, sign: i32) -> Mp {
    sin_sequence::<Mp>(&[eps], sign).remove(0)
}

/// Twelve points spread over the default grid.
pub fn cardano_points() -> Vec<f64> {
    let g = geometric_grid(1e-9, 1e-1, 4).expect("grid");
    (0..12).map(|k| g[(k * (g.len() - 1) + 5) / 11]).collect()
}

pub fn closed_form_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in ["0.5", "1", "1.5"] {
        let f = family_5_2(s)?;
        let cls = classify_components::<Mp>(&f)?;
        let mut flat = 0f64;
        let mut l23 = 0f64;
        for e in ["1e-2", "1e-4", "1e-6"] {
            let snap = Snapshot::new(&f, &cls, mp(e))?;
            let two = Mp::from_f64(2.0);
            for js in [&[0][..], &[1], &[2], &[0, 1], &[0, 2]] {
                flat = flat.max((snap.lambda_sub(js)? - &two).abs().to_f64());
            }
            l23 = l23.max((snap.lambda_sub(&[1, 2])? - lambda23_closed(&snap.eps, &mp(s))).abs().to_f64());
        }
        out.push(Check::new(
            "closed-forms",
            format!("s={s}: lambda(k), lambda({{1,2}}), lambda({{1,3}}) = 2"),
            flat,
            1e-10,
        ));
        out.push(Check::new("closed-forms", format!("s={s}: lambda({{2,3}}) = 2 + 2 eps^((1+s)/2)"), l23, 1e-9));
    }
    Ok(out)
}

pub fn cardano_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in ["0.5", "1", "1.5", "7/9"] {
        let f = family_5_2(s)?;
        let sv = if s == "7/9" { Mp::from_ratio(7, 9) } else { mp(s) };
        let mut worst = 0f64;
        for e in cardano_points() {
            let eps = Mp::from_f64(e);
            let lam = crate::matrep::lambda_full(&f, &eps)?;
            worst = worst.max((lam - cardano_lambda(&eps, &sv)).abs().to_f64());
        }
        out.push(Check::new("cardano", format!("s={s}: eigensolver vs cubic root at 12 points"), worst, 1e-9));
    }
    Ok(out)
}

pub fn limit_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f = family_5_2("0.5")?;
    for sign in [1, -1] {
        let m = marginals_5_2(&f, &seq_point(1e-6, sign))?;
        let tag = if sign > 0 { "sin=+1" } else { "sin=-1" };
        out.push(Check::new("limits", format!("s=0.5 {tag} eps~1e-6: mu(Sigma_1) = {:.6} <= 0.02", m[0]), m[0], 0.02));
        out.push(Check::new(
            "limits",
            format!("s=0.5 {tag} eps~1e-6: mu(Sigma_2) = {:.6} ~ 1/2", m[1]),
            (m[1] - 0.5).abs(),
            0.02,
        ));
    }
    let f = family_5_2("1.5")?;
    let mut points = vec![("grid", Mp::from_f64(1e-8))];
    points.push(("sin=+1", seq_point(1e-8, 1)));
    points.push(("sin=-1", seq_point(1e-8, -1)));
    for (tag, e) in points {
        let m = marginals_5_2(&f, &e)?;
        let dev = m.iter().map(|v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);
        out.push(Check::new(
            "limits",
            format!("s=1.5 {tag} eps~1e-8: marginals ({:.6}, {:.6}, {:.6}) ~ 1/3", m[0], m[1], m[2]),
            dev,
            0.02,
        ));
    }
    let f = family_5_2("7/9")?;
    for (sign, target, tname) in [(1, 1.0 / 9.0, "1/9"), (-1, 1.0 / 3.0, "1/3")] {
        let tag = if sign > 0 { "sin=+1" } else { "sin=-1" };
        for e in [1e-6, 1e-8] {
            let m = marginals_5_2(&f, &seq_point(e, sign))?;
            let mut c = Check::new(
                "limits",
                format!("s=7/9 {tag} eps~{e:.0e}: mu(Sigma_1) = {:.6} vs claimed {tname}", m[0]),
                (m[0] - target).abs(),
                0.02,
            );
            c.known_discrepancy = true;
            out.push(c);
        }
    }
    Ok(out)
}

/// All pinned checks for the three-component model.
pub fn reproduce_5_2() -> Result<Vec<Check>> {
    let mut v = closed_form_checks()?;
    v.extend(cardano_checks()?);
    v.extend(limit_checks()?);
    Ok(v)
}

/// One row of the diagnostic ratio table.
#[derive(Clone, Debug)]
pub struct RatioRow {
    pub eps: f64,
    /// λ({2,3,4},ε) − λ(2,ε).
    pub gap: f64,
    /// λᵛ({2,3,4},ε) − λᵛ(2,ε).
    pub gap_v: f64,
    pub ratio: f64,
    /// The ratios with λ({2,3}), λ({2,4}), λ({3,4}) subtracted instead.
    pub side: [f64; 3],
}

pub fn ratio_table(f: &PerturbationFamily, eps: &[&str]) -> Result<Vec<RatioRow>> {
    let cls = classify_components::<Mp>(f)?;
    let mut rows = Vec::new();
    for e in eps {
        let snap = Snapshot::new(f, &cls, mp(e))?;
        let d4 = delta4_at(&snap)?;
        let find = |j: &[usize], jp: &[usize]| {
            d4.ratios.iter().find(|(a, b, _)| a == j && b == jp).map(|r| r.2.clone()).expect("subset pair")
        };
        let l234 = snap.lambda_sub(&[1, 2, 3])?;
        let lv = |pos: &[usize]| crate::perron::spectral_radius(&d4.mv.m.principal(pos));
        let lv234 = lv(&[1, 2, 3])?;
        let side = [[1, 2], [1, 3], [2, 3]].map(|js| -> f64 {
            let l = snap.lambda_sub(&js).expect("eigenvalue");
            ((l234.clone() - &l) / (lv234.clone() - &l)).to_f64()
        });
        rows.push(RatioRow {
            eps: snap.eps.to_f64(),
            gap: (l234.clone() - snap.lambda_sub(&[1])?).to_f64(),
            gap_v: (lv234.clone() - lv(&[1])?).to_f64(),
            ratio: find(&[1, 2, 3], &[1]).to_f64(),
            side,
        });
    }
    Ok(rows)
}

pub const RATIO_EPS: [&str; 5] = ["1e-4", "1e-5", "1e-6", "1e-7", "1e-8"];

pub fn reproduce_5_3_checks() -> Result<(Vec<Check>, Vec<RatioRow>)> {
    let f = family_5_3()?;
    let cls = classify_components::<Mp>(&f)?;
    let mut out = Vec::new();
    let grid = geometric_grid(1e-9, 1e-1, 4)?;
    let mut worst = 0f64;
    for &e in &grid {
        let snap = Snapshot::new(&f, &cls, Mp::from_f64(e))?;
        let want = snap.eps.clone() * Mp::from_ratio(11, 10) + Mp::from_f64(3.0);
        worst = worst.max((snap.lambda_sub(&[1])? - want).abs().to_f64());
    }
    out.push(Check::new("lambda(2)", "lambda(2,eps) = 3 + 1.1 eps on the grid".into(), worst, 1e-10));
    for e in ["1e-2", "1e-3"] {
        let snap = Snapshot::new(&f, &cls, mp(e))?;
        let mv = mv_from_snapshot(&snap)?;
        let nu = crate::perron::perron_data(&snap.w)?.b;
        let want = mv_display(&snap.eps, &nu);
        let diff = mv.m.sub(&want).max_abs().to_f64();
        out.push(Check::new("mv-matrix", format!("eps={e}: computed mV vs closed form"), diff, 1e-10));
    }
    let e = mp("1e-4");
    let snap = Snapshot::new(&f, &cls, e.clone())?;
    let res = (snap.lambda_sub(&[1, 2, 3])? - lambda234_expansion(&e)).abs().to_f64();
    out.push(Check::new(
        "expansion",
        "eps=1e-4: |lambda({2,3,4}) - 3 - 1.1eps - (sqrt6/2)eps^2.5| / eps^2.5".into(),
        res / 1e-10,
        0.05,
    ));
    let rows = ratio_table(&f, &RATIO_EPS)?;
    for k in 0..rows.len() - 2 {
        let q = rows[k + 2].ratio / rows[k].ratio;
        let mut c = Check::new(
            "ratio",
            format!("R({:.0e})/R({:.0e}) = {q:.4} in [8,12]", rows[k + 2].eps, rows[k].eps),
            (q - 10.0).abs(),
            2.0,
        );
        c.pass &= q >= 8.0;
        out.push(c);
    }
    let (first, last) = (&rows[0], rows.last().expect("rows"));
    for (k, name) in [(0, "{2,3}"), (1, "{2,4}")] {
        let g = last.side[k] / first.side[k];
        out.push(Check::new(
            "side-ratio",
            format!("ratio against lambda({name}) grows by {g:.1} from 1e-4 to 1e-8 (claimed -> inf)"),
            1.0 / g,
            0.02,
        ));
    }
    let mut c = Check::new(
        "side-ratio",
        format!("ratio against lambda({{3,4}}) = {:.4e} at 1e-8 (claimed -> 0)", last.side[2]),
        last.side[2],
        1e-2,
    );
    c.known_discrepancy = true;
    out.push(c);
    let lvc = lambda_v_constant().to_f64();
    let coef = last.gap_v / last.eps.powi(3);
    out.push(Check::new(
        "lambda-v",
        format!("(lambda_v({{2,3,4}}) - lambda_v(2))/eps^3 = {coef:.6} vs {lvc:.6} at eps=1e-8"),
        (coef / lvc - 1.0).abs(),
        1e-3,
    ));
    Ok((out, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardano_matches_eigensolver() {
        let f = family_5_2("1").unwrap();
        for e in ["1e-2", "3e-5", "1e-7"] {
            let eps = mp(e);
            let lam = crate::matrep::lambda_full(&f, &eps).unwrap();
            let gap = (lam - cardano_lambda(&eps, &Mp::one())).abs().to_f64();
            assert!(gap < 1e-40, "{e}: {gap:e}");
        }
    }

    #[test]
    fn lambda_v_constant_value() {
        assert!((lambda_v_constant().to_f64() - 8.99332221258).abs() < 1e-10);
    }

    #[test]
    fn cardano_points_span_grid() {
        let p = cardano_points();
        assert_eq!(p.len(), 12);
        assert!((p[0] - 1e-1).abs() < 1e-15 && (p[11] - 1e-9).abs() < 1e-22);
    }
}
