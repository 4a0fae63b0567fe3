use std::f64::consts::FRAC_PI_2;

use monorep::convex::GridSpec;
use monorep::duality::DualityMap;
use monorep::operators::{analytic_resolvent, sample_graph, AnalyticOperator};
use monorep::representations::{ClosedSpec, Representative};
use monorep::witness::{
    extract_operator, phi_objective, residuals, solve_resolvent, solve_resolvent_with, SolverOptions, StepRule,
};
use proptest::prelude::*;

fn closed(spec: ClosedSpec) -> Representative {
    Representative::closed(&spec).unwrap()
}

fn phi(op: &AnalyticOperator) -> Representative {
    closed(ClosedSpec::OperatorPhi { operator: op.clone() })
}

fn vec_in(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0..2.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn objective_is_coupling_gap_plus_residual(x in vec_in(2), v in vec_in(2), v0 in vec_in(2)) {
        // Euclidean: Φ = h − ⟨x,v⟩ + ½‖x + v − v0‖²
        let h = closed(ClosedSpec::IdentityPhi { dim: 2 });
        let a = phi_objective(&h, &DualityMap::Euclidean, &v0, &x, &v).unwrap();
        let hx = h.eval(&x, &v).unwrap();
        let xv: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        let r: f64 = (0..2).map(|i| (x[i] + v[i] - v0[i]).powi(2)).sum();
        prop_assert!((a - (hx - xv + 0.5 * r)).abs() <= 1e-9);
    }

    #[test]
    fn c_splits_into_halves(x in vec_in(3), v in vec_in(3), v0 in vec_in(3), w in proptest::collection::vec(0.2..5.0f64, 3)) {
        let dm = DualityMap::weighted(w).unwrap();
        let r = residuals(&dm, &x, &v, &v0).unwrap();
        prop_assert!(r.c >= -1e-12);
        prop_assert!((r.c - r.primal_half - r.dual_half).abs() <= 1e-12 * (1.0 + r.c.abs()));
        let pairing: f64 = r.r.iter().zip(&r.rho).map(|(a, b)| a * b).sum();
        prop_assert!((r.c - pairing).abs() <= 1e-12 * (1.0 + r.c.abs()));
    }
}

#[test]
fn accepted_certificates_are_mutually_monotone() {
    let op = AnalyticOperator::linear(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap();
    let h = phi(&op);
    let probes = GridSpec::uniform(2, -2.0, 2.0, 4).unwrap();
    let certs: Vec<_> = probes
        .points()
        .map(|v0| solve_resolvent(&h, &DualityMap::Euclidean, &v0, 1e-6, 200_000).unwrap())
        .collect();
    assert!(certs.iter().all(|c| c.accepted));
    for a in &certs {
        for b in &certs {
            let p: f64 = (0..2).map(|i| (a.x[i] - b.x[i]) * (a.v[i] - b.v[i])).sum();
            assert!(p >= -1e-5, "{p}");
        }
    }
}

#[test]
fn both_step_rules_match_closed_forms() {
    let ops = [
        AnalyticOperator::linear(vec![vec![1.0]]).unwrap(),
        AnalyticOperator::subdiff_quadratic(vec![vec![3.0]], vec![0.0]).unwrap(),
        AnalyticOperator::rotation(FRAC_PI_2).unwrap(),
        AnalyticOperator::normal_cone_box(vec![0.0], vec![1.0]).unwrap(),
    ];
    for step in [StepRule::Averaged, StepRule::Polyak] {
        let opts = SolverOptions {
            step,
            ..SolverOptions::default()
        };
        for op in &ops {
            let n = op.dim();
            for t in [-1.7, -0.4, 0.3, 1.9] {
                let v0: Vec<f64> = (0..n).map(|i| t + 0.5 * i as f64).collect();
                let c = solve_resolvent_with(&phi(op), &DualityMap::Euclidean, &v0, &opts).unwrap();
                let xa = analytic_resolvent(op, &DualityMap::Euclidean, &v0).unwrap();
                assert!(c.accepted, "{step:?} {op:?} {v0:?}: {c:?}");
                for i in 0..n {
                    assert!((c.x[i] - xa[i]).abs() <= 1e-4, "{step:?} {op:?} {v0:?}: {:?} vs {xa:?}", c.x);
                }
            }
        }
        // identity under J = diag(w): x = v0 / (1 + w)
        let dm = DualityMap::weighted(vec![3.0, 0.5]).unwrap();
        let h = closed(ClosedSpec::IdentityPhi { dim: 2 });
        let c = solve_resolvent_with(&h, &dm, &[1.2, -0.9], &opts).unwrap();
        assert!(c.accepted);
        assert!((c.x[0] - 0.3).abs() <= 1e-4 && (c.x[1] + 0.6).abs() <= 1e-4, "{:?}", c.x);
    }
}

#[test]
fn budget_exhaustion_is_reported_not_accepted() {
    let op = AnalyticOperator::normal_cone_box(vec![-0.5, 0.0], vec![0.5, 2.0]).unwrap();
    let c = solve_resolvent(&phi(&op), &DualityMap::Euclidean, &[-2.0, 0.4], 1e-4, 10).unwrap();
    assert!(!c.accepted);
    assert!(c.iterations <= 10);
}

#[test]
fn closed_and_sampled_phi_extract_the_same_graph() {
    let op = AnalyticOperator::linear(vec![vec![1.0]]).unwrap();
    let bx = GridSpec::uniform(2, -1.0, 1.0, 21).unwrap();
    let d = bx.spacing(0);
    let exact = extract_operator(&phi(&op), &bx, d * d / 8.0).unwrap();
    // samples at half spacing so the midpoints (x+v)/2 are graph points
    let g = sample_graph(&op, &GridSpec::uniform(1, -1.0, 1.0, 41).unwrap()).unwrap();
    let sampled = extract_operator(&Representative::fitzpatrick(g).unwrap(), &bx, d * d / 8.0).unwrap();
    assert_eq!(exact, sampled);
    assert_eq!(exact.len(), 21);
}
