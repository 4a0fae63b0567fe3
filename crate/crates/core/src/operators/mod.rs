//! Operator graphs, a catalog of maximal monotone operators with closed-form
//! resolvents, and a numerical surjectivity probe.

mod analytic;
mod graph;
mod probe;

pub use analytic::{analytic_resolvent, sample_graph, sample_graph_with_fan, AnalyticOperator, NormalFan};
pub use graph::{monotonicity_check, GraphPoint, MonotonicityVerdict, OperatorGraph};
pub use probe::{maximality_probe, ProbeReport};
