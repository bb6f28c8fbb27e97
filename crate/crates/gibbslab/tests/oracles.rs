//! Frozen reference values computed independently of this crate.

use gibbslab::golden::{family_5_2, family_5_3};
use gibbslab::matrep::{lambda_full, mv_matrix};
use gibbslab::sft::{count_admissible_words, TransitionMatrix};
use gibbslab::thermo::pressure_by_words;
use gibbslab::{Mp, Real};

fn mp(s: &str) -> Mp {
    Mp::parse_decimal(s).unwrap()
}

fn rel(a: &Mp, b: &str) -> f64 {
    let b = mp(b);
    ((a.clone() - &b) / b).abs().to_f64()
}

#[test]
fn golden_mean_word_count() {
    let m = TransitionMatrix::from_rows(&["11", "10"]).unwrap();
    assert_eq!(count_admissible_words(&m, 12), 377);
    let p = pressure_by_words(&m, &|_, _| 0.0, 12);
    assert!((p - 377f64.ln() / 12.0).abs() < 1e-15);
    // log 377 / 12 = 0.4943538 (0.49413 is sometimes quoted, a rounding slip)
    assert!((p - 0.494_353_765_620_667_6).abs() < 1e-15);
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!(p > golden && p - golden < 0.014);
}

/// Entries of the four-component representation, from a 60-digit mpmath run.
#[test]
fn four_component_representation_entries() {
    let f = family_5_3().unwrap();
    let cases = [("1e-2", "0.010967375416706072337"), ("1e-3", "0.0010996671675644747178")];
    for (e, want) in cases {
        let mv = mv_matrix(&f, &mp(e)).unwrap();
        assert!(rel(&mv.m[(3, 2)], want) < 1e-19, "eps {e}: {}", mv.m[(3, 2)]);
    }
}

#[test]
fn four_component_full_eigenvalue() {
    let f = family_5_3().unwrap();
    let cases = [("1e-2", "3.0452504329145894479138262028"), ("1e-3", "3.00452555724562156956824707435")];
    for (e, want) in cases {
        let l = lambda_full(&f, &mp(e)).unwrap();
        assert!(rel(&l, want) < 1e-27, "eps {e}: {l}");
    }
}

/// λ({2,3}) for the three-component model equals 2 + 2ε^{(1+s)/2}.
#[test]
fn three_component_pair_eigenvalue() {
    for s in ["0.5", "1", "1.5"] {
        let f = family_5_2(s).unwrap();
        let eps = mp("1e-4");
        let l = gibbslab::matrep::lambda_sub(&f, &[1, 2], &eps).unwrap();
        let want = Mp::from_f64(2.0) + eps.clone().powf(&((Mp::one() + mp(s)) / Mp::from_f64(2.0))) * Mp::from_f64(2.0);
        assert!((l - want).abs().to_f64() < 1e-60);
    }
}

/// The oscillating two-component model accumulates at (1 ± 1/√5)/2, the
/// weights for c₂ = ±1.
#[test]
fn oscillating_model_does_not_converge() {
    use gibbslab::matrep::{geometric_grid, gibbs_limit_analysis, limit_from_c2, sin_sequence};
    let f = gibbslab::model::parse_model(gibbslab::model::EXAMPLE_5_1).unwrap().family;
    let grid = geometric_grid(1e-8, 1e-1, 4).unwrap();
    let seqs: Vec<(String, Vec<Mp>)> =
        vec![("sin+1".into(), sin_sequence(&grid, 1)), ("sin-1".into(), sin_sequence(&grid, -1))];
    let rep = gibbs_limit_analysis::<Mp>(&f, &grid, &seqs).unwrap();
    assert!(!rep.converged);
    let (hi, lo) = limit_from_c2(1.0);
    assert!((hi - (1.0 + 1.0 / 5f64.sqrt()) / 2.0).abs() < 1e-15);
    let plus = rep.sequences[0].marginals.last().unwrap();
    let minus = rep.sequences[1].marginals.last().unwrap();
    assert!((plus[0] - hi).abs() < 1e-6 && (minus[0] - lo).abs() < 1e-6, "{plus:?} {minus:?}");
}
