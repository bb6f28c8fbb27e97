mod common;

use common::*;
use gibbslab::matrep::{classify_components, delta2_at, lambda_full, lambda_sub, mv_matrix, Snapshot};
use gibbslab::perron::spectral_radius;
use gibbslab::sft::scc_decompose;
use gibbslab::{Mp, Real};
use proptest::prelude::*;

fn mp(s: &str) -> Mp {
    Mp::parse_decimal(s).unwrap()
}

fn rel(a: &Mp, b: &Mp) -> f64 {
    ((a.clone() - b).abs() / b.clone().abs()).to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representation_root_is_the_full_eigenvalue(seed in any::<u64>(), e in prop::sample::select(vec!["1e-2", "1e-4", "1e-7"])) {
        let mut r = rng(seed);
        let m = two_max_model(&mut r);
        let eps = mp(e);
        let mv = mv_matrix(&m.family, &eps).unwrap();
        let root = spectral_radius(&mv.m).unwrap();
        let full = lambda_full(&m.family, &eps).unwrap();
        prop_assert!(rel(&root, &full) < 1e-40);
    }

    #[test]
    fn delta_weights_sum_to_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = two_max_model(&mut r);
        let cls = classify_components::<Mp>(&m.family).unwrap();
        let snap = Snapshot::new(&m.family, &cls, mp("1e-5")).unwrap();
        let d = delta2_at(&snap).unwrap();
        let s = d.delta.iter().fold(Mp::zero(), |a, x| a + x);
        prop_assert!((s - Mp::one()).abs().to_f64() < 1e-40);
        prop_assert!(d.delta.iter().all(|x| x.to_f64() >= 0.0));
    }

    #[test]
    fn eigenvalues_grow_with_the_collection(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = sigma_model(&mut r, false);
        let f = &m.family;
        let n = scc_decompose(f.b()).blocks.len();
        let eps = mp("1e-3");
        let all: Vec<usize> = (0..n).collect();
        let top = lambda_sub(f, &all, &eps).unwrap();
        for k in 0..n {
            let one = lambda_sub(f, &[k], &eps).unwrap();
            prop_assert!(one.to_f64() <= top.to_f64() * (1.0 + 1e-15));
        }
        prop_assert!(top.to_f64() <= lambda_full(f, &eps).unwrap().to_f64() * (1.0 + 1e-15));
    }

    #[test]
    fn full_eigenvalue_decreases_to_the_limit(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = sigma_model(&mut r, false);
        let f = &m.family;
        let cls = classify_components::<Mp>(f).unwrap();
        let mut prev = f64::INFINITY;
        for e in ["1e-1", "1e-3", "1e-5", "1e-7"] {
            let l = lambda_full(f, &mp(e)).unwrap().to_f64();
            prop_assert!(l <= prev && l >= cls.lambda_max.to_f64() * (1.0 - 1e-15));
            prev = l;
        }
    }
}
