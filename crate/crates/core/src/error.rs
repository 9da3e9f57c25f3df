use std::fmt;

use crate::graph::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("graph has {0} connected components; split it and work componentwise")]
    Disconnected(usize),
    #[error("chains belong to different graphs ({0} vs {1} edges)")]
    MismatchedChains(usize, usize),
    #[error("the trivial homology class has no minimal orbit")]
    TrivialClass,
    #[error("class has {got} coordinates, homology rank is {expected}")]
    WrongRank { expected: usize, got: usize },
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("no closed walk represents class {0}")]
    NoClosedWalk(String),
    #[error("cycles do not span the first homology")]
    NonSpanningBasis,
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),
    #[error("refused: {0}")]
    Refused(String),
    #[error("orbit enumeration exceeded the cap of {0} orbits")]
    OrbitCap(usize),
    #[error("ill-conditioned recovery: {0}")]
    IllConditioned(String),
    #[error("integer relation not found: {0}")]
    IntegerRelation(String),
    #[error("inconsistent component partition: {0}")]
    InconsistentPartition(String),
    #[error("frequency table incomplete: length {needed} requested, table covers up to {covered}")]
    Incomplete { needed: String, covered: String },
    #[error("inconsistent length data: {0}")]
    Inconsistent(String),
    #[error("distance matrix is not an additive tree metric: {0}")]
    NonAdditive(String),
    #[error("graph admits no planar embedding")]
    NotEmbeddable,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
