//! Operator catalog run by `monorep demo`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::convex::GridSpec;
use crate::duality::DualityMap;
use crate::operators::AnalyticOperator;
use crate::representations::{ClosedSpec, RepresentativeSpec};

/// One demo case: a representative, the grids it is checked on and,
/// optionally, the operator it should represent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub representative: RepresentativeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<AnalyticOperator>,
    #[serde(default)]
    pub duality: DualityMap,
    /// Grid over `ℝⁿ × ℝⁿ` for verification and extraction.
    #[serde(rename = "box")]
    pub bx: GridSpec,
    /// Grid of `v0` over `ℝⁿ` for the resolvent probe.
    pub probes: GridSpec,
}

fn phi(op: &AnalyticOperator) -> RepresentativeSpec {
    RepresentativeSpec::Closed(ClosedSpec::OperatorPhi { operator: op.clone() })
}

fn grid(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>) -> GridSpec {
    GridSpec::new(lower, upper, counts).expect("catalog grids are well formed")
}

/// The bundled catalog. Each box contains `T(x)` for its primal nodes so
/// that the grid conjugate sees the graph.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let identity = AnalyticOperator::linear(vec![vec![1.0]]).unwrap();
    let quadratic = AnalyticOperator::subdiff_quadratic(vec![vec![3.0]], vec![0.0]).unwrap();
    let rotation = AnalyticOperator::rotation(FRAC_PI_2).unwrap();
    let cone = AnalyticOperator::normal_cone_box(vec![0.0], vec![1.0]).unwrap();
    let linear2 = AnalyticOperator::linear(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap();

    let unit2 = grid(vec![-1.0; 2], vec![1.0; 2], vec![21; 2]);
    let probes1 = grid(vec![-2.0], vec![2.0], vec![11]);
    let probes2 = grid(vec![-2.0; 2], vec![2.0; 2], vec![5; 2]);
    vec![
        CatalogEntry {
            name: "identity-phi".into(),
            representative: RepresentativeSpec::Closed(ClosedSpec::IdentityPhi { dim: 1 }),
            operator: Some(identity.clone()),
            duality: DualityMap::Euclidean,
            bx: unit2.clone(),
            probes: probes1.clone(),
        },
        CatalogEntry {
            name: "identity-indicator".into(),
            representative: RepresentativeSpec::Closed(ClosedSpec::IdentityIndicator { dim: 1 }),
            operator: Some(identity),
            duality: DualityMap::Euclidean,
            bx: unit2.clone(),
            probes: probes1.clone(),
        },
        CatalogEntry {
            name: "subdiff-quadratic-phi".into(),
            representative: phi(&quadratic),
            operator: Some(quadratic),
            duality: DualityMap::Euclidean,
            bx: grid(vec![-1.0, -3.0], vec![1.0, 3.0], vec![21, 21]),
            probes: probes1.clone(),
        },
        CatalogEntry {
            name: "normal-cone-phi".into(),
            representative: phi(&cone),
            operator: Some(cone),
            duality: DualityMap::Euclidean,
            bx: unit2,
            probes: probes1,
        },
        CatalogEntry {
            name: "rotation-phi".into(),
            representative: phi(&rotation),
            operator: Some(rotation),
            duality: DualityMap::Euclidean,
            bx: grid(vec![-1.0; 4], vec![1.0; 4], vec![9; 4]),
            probes: probes2.clone(),
        },
        CatalogEntry {
            name: "linear-2d-phi".into(),
            representative: phi(&linear2),
            operator: Some(linear2),
            duality: DualityMap::Euclidean,
            bx: grid(vec![-1.0, -1.0, -2.0, -2.0], vec![1.0, 1.0, 2.0, 2.0], vec![9, 9, 17, 17]),
            probes: probes2,
        },
    ]
}
