use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("origin `{0}` is also a target")]
    OriginInTargets(String),
    #[error("malformed graph file: {0}")]
    Malformed(String),
    #[error("negative or non-finite weight {weight} on edge ({u}, {v})")]
    BadWeight { u: String, v: String, weight: f64 },
    #[error("edge ({u}, {v}) listed with conflicting weights {first} and {second}")]
    AsymmetricDuplicate {
        u: String,
        v: String,
        first: f64,
        second: f64,
    },
    #[error("vertex `{0}` has zero weight")]
    ZeroVertexWeight(String),
    #[error("{0}")]
    Domain(String),
    #[error("expected hitting time is infinite: {0}")]
    InfiniteExpectation(String),
    #[error("no bound: dist(o, z) = {0} leaves no admissible n >= 1")]
    DegenerateDistance(usize),
    #[error("path is infeasible: theta[{index}] = {theta} >= beta = {beta}")]
    InfeasiblePath { index: usize, theta: f64, beta: f64 },
    #[error("flow decomposition did not terminate within {0} peeling steps")]
    DecompositionStalled(usize),
    #[error("graph has {targets} target vertices; contract targets first")]
    NotContracted { targets: usize },
    #[error("resource cap exceeded: {needed} > {cap}; raise {flag}")]
    ResourceCap {
        needed: usize,
        cap: usize,
        flag: &'static str,
    },
    #[error(
        "iterative solve did not converge: residual {residual:e} after {iterations} iterations"
    )]
    NoConvergence { residual: f64, iterations: usize },
    #[error("could not generate graph: {0}")]
    Generator(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
