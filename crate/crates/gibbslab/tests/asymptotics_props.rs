mod common;

use common::*;
use gibbslab::asymptotics::{lambda_series, ExpansionInput};
use gibbslab::sft::TransitionMatrix;
use gibbslab::{Mat, Mp, Real};
use proptest::prelude::*;

fn random_input(seed: u64, order: usize) -> (ExpansionInput<Mp>, Vec<Mat<Mp>>) {
    let mut r = rng(seed);
    let d = 2 + (seed % 3) as usize;
    let w0: Mat<Mp> = irreducible_matrix(&mut r, d, 0.5);
    let pat = TransitionMatrix::from_fn(d, |i, j| !w0[(i, j)].is_zero());
    let mut phi = vec![w0.map(|x| if x.is_zero() { Mp::zero() } else { x.ln() })];
    for _ in 0..order {
        phi.push(Mat::from_fn(d, d, |_, _| Mp::from_f64(rng_f64(&mut r))));
    }
    let x = ExpansionInput::new(pat.clone(), pat, vec![(0..d).collect()], phi.clone(), vec![]).unwrap();
    (x, phi)
}

fn rng_f64(r: &mut TestRng) -> f64 {
    use rand::Rng;
    r.random_range(-1.0..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_identities_hold(seed in any::<u64>()) {
        let (x, _) = random_input(seed, 3);
        let s = lambda_series(&x, 0, 3).unwrap();
        prop_assert!(s.resolvent_residual < 1e-50);
        prop_assert!(s.projection_residual < 1e-50);
        prop_assert!(s.commutation_residual < 1e-50);
    }

    #[test]
    fn truncated_series_tracks_the_root(seed in any::<u64>()) {
        let (x, phi) = random_input(seed, 3);
        let s = lambda_series(&x, 0, 3).unwrap();
        let d = phi[0].rows();
        for e in ["1e-3", "1e-4"] {
            let eps = Mp::parse_decimal(e).unwrap();
            let w = Mat::from_fn(d, d, |i, j| {
                if x.a.get(i, j) {
                    let mut v = Mp::zero();
                    let mut p = Mp::one();
                    for c in &phi {
                        v += p.clone() * &c[(i, j)];
                        p *= &eps;
                    }
                    v.exp()
                } else {
                    Mp::zero()
                }
            });
            let exact = gibbslab::perron::spectral_radius(&w).unwrap();
            let mut approx = Mp::zero();
            let mut p = Mp::one();
            for l in &s.lambda {
                approx += p.clone() * l;
                p *= &eps;
            }
            let err = (exact - approx).abs().to_f64();
            // remainder is O(ε⁴)
            prop_assert!(err <= 1e3 * eps.to_f64().powi(4), "eps {e}: error {err:e}");
        }
    }

    #[test]
    fn first_two_coefficients_match_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e1, e2) = series_vs_differences(&mut r);
        prop_assert!(e1 < 1e-20 && e2 < 1e-20);
    }
}
