use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidkit::dictlearn::{
    learn_fitted, learn_random, planted_fitted, size_bound, uniform_dataset, verify, Chart,
    Dataset, Dictionary, LearnError, SparseCode,
};
use rigidkit::realize::SolveConfig;

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn random_learning_meets_the_size_bound() {
    for (d, s, m) in [(3, 2, 10), (3, 2, 11), (3, 2, 30), (4, 2, 6), (4, 2, 12)] {
        let x = uniform_dataset(d, m, 40 + m as u64);
        let out = learn_random(&x, s, &SolveConfig::default()).unwrap();
        let n = out.dictionary.vectors.len();
        let used = out.trace.pins_used;
        assert_eq!((d - s) * used, (d - 1) * n, "d={d} s={s} m={m}");
        assert!(n <= size_bound(m, d, s));
        assert_eq!(out.unused.len(), m - used);
        assert!(
            out.report.pass,
            "d={d} s={s} m={m}: {:?}",
            out.report.max_error()
        );
        for (k, &i) in out.assignment.iter().enumerate() {
            let code = out.dictionary.codes.iter().find(|c| c.point == i).unwrap();
            assert_eq!(code.support, out.hypergraph.edges()[k].vertices);
            assert!(code.nonzeros() <= s);
        }
    }
}

#[test]
fn random_learning_rejects_bad_inputs() {
    let x = uniform_dataset(3, 20, 1);
    assert!(matches!(
        learn_random(&x, 3, &SolveConfig::default()),
        Err(LearnError::Shape { .. })
    ));
    let few = uniform_dataset(3, 9, 1);
    assert!(matches!(
        learn_random(&few, 2, &SolveConfig::default()),
        Err(LearnError::Construction(_))
    ));
    let mut zero = uniform_dataset(3, 12, 1);
    zero.points[4] = vec![0.0; 3];
    assert!(learn_random(&zero, 2, &SolveConfig::default()).is_err());
}

#[test]
fn fitted_realizes_planted_supports() {
    let (x, _) = planted_fitted(3, 2, 12, 3).unwrap();
    let out = learn_fitted(&x, &SolveConfig::default()).unwrap();
    assert!(out.report.pass);
    assert!(out.validation.is_empty() && !out.validation_breach);
    assert_eq!(out.core.total_copies(), 24);
    assert!(out.core_residuals.iter().all(|r| *r <= 1e-9));
}

fn with_extra_points(
    x: &Dataset,
    hidden: &[Vec<f64>],
    extra: usize,
    noise: f64,
    seed: u64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = x.clone();
    let supports = x.supports.clone().unwrap();
    for k in 0..extra {
        let sup = supports[k % supports.len()].clone();
        let mut p = vec![0.0; x.d];
        for &v in &sup {
            let c: f64 = rng.random_range(0.5..1.5);
            for (pk, hk) in p.iter_mut().zip(&hidden[v]) {
                *pk += c * hk;
            }
        }
        for pk in p.iter_mut() {
            *pk += noise * rng.random_range(-1.0..1.0);
        }
        y.points.push(p);
        y.supports.as_mut().unwrap().push(sup);
    }
    y
}

#[test]
fn consistent_surplus_points_validate() {
    // the core has many real roots; the surplus pins single out the planted one
    let (x, hidden) = planted_fitted(3, 2, 12, 3).unwrap();
    let y = with_extra_points(&x, &hidden, 5, 0.0, 9);
    let cfg = SolveConfig {
        restarts: 256,
        ..SolveConfig::default()
    };
    let out = learn_fitted(&y, &cfg).unwrap();
    assert_eq!(out.validation.len(), 5);
    assert!(out.guided);
    assert!(out.validation.iter().all(|v| v.error <= 1e-6));
    assert!(!out.validation_breach);
    for (v, h) in out.dictionary.vectors.iter().zip(&hidden) {
        assert!((cosine(v, h).abs() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn noisy_surplus_points_breach() {
    let (x, hidden) = planted_fitted(3, 2, 12, 3).unwrap();
    let y = with_extra_points(&x, &hidden, 3, 1e-2, 9);
    let out = learn_fitted(&y, &SolveConfig::default()).unwrap();
    assert!(out.report.pass);
    assert!(!out.guided);
    assert!(out.validation_breach);
}

#[test]
fn fitted_needs_supports() {
    let x = uniform_dataset(3, 12, 0);
    assert!(matches!(
        learn_fitted(&x, &SolveConfig::default()),
        Err(LearnError::Dataset(_))
    ));
}

#[test]
fn fitted_rejects_underdetermined_supports() {
    let (mut x, _) = planted_fitted(3, 2, 12, 3).unwrap();
    x.points.truncate(20);
    x.supports.as_mut().unwrap().truncate(20);
    assert!(matches!(
        learn_fitted(&x, &SolveConfig::default()),
        Err(LearnError::NotRigid { .. })
    ));
}

#[test]
fn verify_flags_missing_and_wrong_codes() {
    let x = Dataset::new(
        3,
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ],
    );
    let dict = Dictionary {
        d: 3,
        vectors: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]],
        codes: vec![
            SparseCode {
                point: 0,
                support: vec![0],
                values: vec![1.0],
            },
            SparseCode {
                point: 1,
                support: vec![1],
                values: vec![2.0],
            },
        ],
    };
    let report = verify(&x, &dict, 1, 1e-6);
    assert!(!report.pass);
    assert_eq!(report.failures(), 2);
    assert!(report.points[0].pass);
    assert!((report.points[1].error - 1.0).abs() < 1e-12);
    assert!(report.points[2].error.is_infinite());
}

#[test]
fn verify_counts_nonzeros_against_s() {
    let x = Dataset::new(3, vec![vec![1.0, 1.0, 0.0]]);
    let dict = Dictionary::with_codes(
        3,
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        &x.points,
        &[(0, vec![0, 1])],
    );
    assert!(verify(&x, &dict, 2, 1e-9).pass);
    assert!(!verify(&x, &dict, 1, 1e-9).pass);
}

#[test]
fn dataset_formats() {
    let x = Dataset::from_delimited("# header\n1, 2, 3\n4 5 6\n\n").unwrap();
    assert_eq!(x.points, vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
    let back = Dataset::from_json(&x.to_json()).unwrap();
    assert_eq!(back, x);
    assert!(Dataset::from_json(r#"{"d": 3, "points": [[1, 2, 3]], "extra": 1}"#).is_err());
    assert!(Dataset::from_delimited("1 2 3\n4 5\n").is_err());
    assert!(Dataset::from_json(r#"{"d": 3, "points": [[1, 2]]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lift_is_parallel_to_the_data(seed in any::<u64>(), d in 3usize..=5, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let x = uniform_dataset(d, 16, seed);
        let chart = Chart::for_data(&x.points, d, seed);
        let p: Vec<f64> = raw[..d].to_vec();
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let y = chart.to_chart(&p);
        prop_assume!(y.iter().all(|v| v.is_finite() && v.abs() < 1e6));
        let v = chart.lift(&y);
        prop_assert!((cosine(&v, &p).abs() - 1.0).abs() < 1e-9);
        let first = v.iter().find(|c| **c != 0.0).copied().unwrap();
        prop_assert!(first > 0.0);
    }

    #[test]
    fn learn_random_is_deterministic(seed in 0u64..50) {
        let x = uniform_dataset(3, 12, seed);
        let cfg = SolveConfig { seed, ..SolveConfig::default() };
        let a = learn_random(&x, 2, &cfg).unwrap();
        let b = learn_random(&x, 2, &cfg).unwrap();
        prop_assert_eq!(a.dictionary, b.dictionary);
    }
}
