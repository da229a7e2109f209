//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate segment: endpoints coincide at ({0}, {1})")]
    DegenerateSegment(f64, f64),

    #[error("coincident points: {0}")]
    CoincidentPoints(String),

    #[error("non-finite coordinate: ({0}, {1})")]
    NonFiniteCoordinate(f64, f64),

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),

    #[error("radius {radius} too large at vertex {vertex}: limit {limit}")]
    RadiusTooLarge {
        vertex: u64,
        radius: f64,
        limit: f64,
    },

    #[error("empty point cloud")]
    EmptyPointCloud,

    #[error("empty graph")]
    EmptyGraph,

    #[error("infeasible input: F_M = {energy} exceeds r = {r} (eta = {eta})")]
    Infeasible { energy: f64, r: f64, eta: f64 },

    #[error("terminal count {0} out of supported range 2..=6")]
    TerminalCountOutOfRange(usize),

    #[error("duplicate terminals at ({0}, {1})")]
    DuplicateTerminals(f64, f64),

    #[error("proposition hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid rose of winds: {0}")]
    InvalidRose(String),

    #[error("edge into terminal {terminal} not aligned with any rose ray (best deviation {deviation} rad)")]
    EdgeNotAligned { terminal: usize, deviation: f64 },

    #[error("forest component {0} is contained in the line")]
    ComponentOnLine(usize),

    #[error("too many points for exact Steiner solve: {0} > 6")]
    TooManyPoints(usize),

    #[error("trim undefined: {0}")]
    TrimUndefined(String),

    #[error("horseshoe parameters out of validity domain: R = {r_big} must exceed {threshold} * r = {bound}")]
    HorseshoeDomain {
        r_big: f64,
        threshold: f64,
        bound: f64,
    },

    #[error("covering equation unsolvable: {0}")]
    CoveringUnsolvable(String),

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("insufficient samples for curvature estimation on edge {0}")]
    InsufficientSamples(u64),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
