mod common;

use std::f64::consts::FRAC_PI_2;

use monorep::convex::{biconjugate, GridSpec};
use monorep::operators::{monotonicity_check, sample_graph, AnalyticOperator, GraphPoint, OperatorGraph};
use monorep::representations::{
    fitzpatrick_eval, fitzpatrick_linear_closed_form, j_transform, j_transform_grid, membership_check, sampling_tolerance,
    ClosedSpec, Representative,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_fitzpatrick, max_abs_diff};

fn closed(spec: ClosedSpec) -> Representative {
    Representative::closed(&spec).unwrap()
}

fn catalog() -> Vec<AnalyticOperator> {
    vec![
        AnalyticOperator::linear(vec![vec![1.0]]).unwrap(),
        AnalyticOperator::linear(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap(),
        AnalyticOperator::subdiff_quadratic(vec![vec![3.0]], vec![0.0]).unwrap(),
        AnalyticOperator::rotation(FRAC_PI_2).unwrap(),
        AnalyticOperator::normal_cone_box(vec![0.0], vec![1.0]).unwrap(),
    ]
}

fn random_monotone_graph(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> OperatorGraph {
    // samples of x ↦ Ax with A = B Bᵀ + skew
    let b: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let s = rng.gen_range(-1.0..1.0);
    let a: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let psd: f64 = (0..dim).map(|k| b[i][k] * b[j][k]).sum();
                    let skew = if i < j { s } else if i > j { -s } else { 0.0 };
                    psd + skew
                })
                .collect()
        })
        .collect();
    let points = (0..len)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v = (0..dim).map(|i| (0..dim).map(|j| a[i][j] * x[j]).sum()).collect();
            GraphPoint { x, v }
        })
        .collect();
    OperatorGraph::new(dim, points).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fitzpatrick_matches_defining_form(seed in any::<u64>(), dim in 1usize..=3, len in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_monotone_graph(&mut rng, dim, len);
        for _ in 0..10 {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let got = fitzpatrick_eval(&g, &x, &v).unwrap();
            let oracle = brute_fitzpatrick(&g, &x, &v);
            prop_assert!((got - oracle).abs() <= 1e-10 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn fitzpatrick_equals_pairing_on_monotone_graph(seed in any::<u64>(), dim in 1usize..=3, len in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_monotone_graph(&mut rng, dim, len);
        prop_assert!(monotonicity_check(&g).monotone);
        for p in g.points() {
            let pair: f64 = p.x.iter().zip(&p.v).map(|(a, b)| a * b).sum();
            prop_assert!((fitzpatrick_eval(&g, &p.x, &p.v).unwrap() - pair).abs() <= 1e-10);
        }
    }

    #[test]
    fn monotonicity_ignores_order(seed in any::<u64>(), len in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<GraphPoint> = (0..len)
            .map(|_| GraphPoint { x: vec![rng.gen_range(-1.0..1.0)], v: vec![rng.gen_range(-1.0..1.0)] })
            .collect();
        let mut rev = pts.clone();
        rev.reverse();
        let a = monotonicity_check(&OperatorGraph::new(1, pts).unwrap()).monotone;
        let b = monotonicity_check(&OperatorGraph::new(1, rev).unwrap()).monotone;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn catalog_samples_are_monotone() {
    for op in catalog() {
        let grid = GridSpec::uniform(op.dim(), -1.5, 1.5, if op.dim() == 1 { 31 } else { 7 }).unwrap();
        let g = sample_graph(&op, &grid).unwrap();
        assert!(monotonicity_check(&g).monotone, "{op:?}");
        for p in g.points() {
            assert!(op.contains(&p.x, &p.v, 1e-9).unwrap());
        }
    }
}

#[test]
fn closed_phi_matches_sampled_fitzpatrick() {
    // dense samples approach the closed form at rate O(Δ²)
    for op in catalog() {
        let n = op.dim();
        let h = closed(ClosedSpec::OperatorPhi { operator: op.clone() });
        let count = if n == 1 { 161 } else { 41 };
        let samples = GridSpec::uniform(n, -4.0, 4.0, count).unwrap();
        let g = sample_graph(&op, &samples).unwrap();
        let d = samples.spacing(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let exact = h.eval(&x, &v).unwrap();
            if !exact.is_finite() {
                continue;
            }
            let approx = fitzpatrick_eval(&g, &x, &v).unwrap();
            assert!(approx <= exact + 1e-9, "{op:?}: sampled {approx} above {exact}");
            assert!(exact - approx <= 10.0 * d * d, "{op:?}: {exact} vs {approx}");
        }
    }
}

#[test]
fn linear_closed_form_agrees_with_operator_phi() {
    let a = vec![vec![1.0, 1.0], vec![-1.0, 1.0]];
    let h = closed(ClosedSpec::OperatorPhi {
        operator: AnalyticOperator::linear(a.clone()).unwrap(),
    });
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let e = fitzpatrick_linear_closed_form(&a, &x, &v).unwrap();
        assert!((h.eval(&x, &v).unwrap() - e).abs() <= 1e-10 * (1.0 + e.abs()));
    }
}

#[test]
fn graph_equality_holds_on_catalog() {
    for op in catalog() {
        let n = op.dim();
        let h = closed(ClosedSpec::OperatorPhi { operator: op.clone() });
        let grid = GridSpec::uniform(n, -1.0, 1.0, if n == 1 { 21 } else { 5 }).unwrap();
        let g = sample_graph(&op, &grid).unwrap();
        let bx = GridSpec::uniform(2 * n, -1.0, 1.0, if n == 1 { 21 } else { 5 }).unwrap();
        let verdict = membership_check(&h, &g, &bx, 1e-10).unwrap();
        assert!(verdict.pass, "{op:?}: {verdict:?}");
    }
}

#[test]
fn j_twice_is_the_biconjugate() {
    let spec = GridSpec::uniform(2, -1.0, 1.0, 21).unwrap();
    let h = monorep::convex::GridFn::from_fn(spec, |p| (p[0] - 0.3).abs() * p[1].powi(2) - p[0]).unwrap();
    let jj = j_transform_grid(&j_transform_grid(&h).unwrap()).unwrap();
    let bi = biconjugate(&h).unwrap();
    assert!(max_abs_diff(jj.values(), bi.values()) <= 1e-12);
}

#[test]
fn transform_of_mix_is_a_representative() {
    let spec = GridSpec::uniform(2, -1.0, 1.0, 21).unwrap();
    let mix = Representative::mix(vec![
        (0.3, closed(ClosedSpec::IdentityPhi { dim: 1 })),
        (0.7, closed(ClosedSpec::IdentityIndicator { dim: 1 })),
    ])
    .unwrap();
    let jh = j_transform(&mix, &spec).unwrap();
    let tol = sampling_tolerance(&spec, 1.0);
    for p in spec.points() {
        let val = jh.eval(&p[..1], &p[1..]).unwrap();
        assert!(val >= p[0] * p[1] - 1e-12);
        if p[0] == p[1] {
            assert!(val - p[0] * p[1] <= tol, "{p:?}: {val}");
        }
    }
}
