use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid {what}: {reason}")]
    InvalidParameter { what: &'static str, reason: String },

    #[error("edges {0}, {1}, {2} violate the triangle inequality")]
    TriangleInequality(f64, f64, f64),

    #[error("direction vector has zero length")]
    ZeroDirection,

    #[error("at least one site is required")]
    NoSites,

    #[error("site {index} at ({x}, {y}) is not strictly inside the region of interest")]
    SiteOutsideRoi { index: usize, x: f64, y: f64 },

    #[error("sites {first} and {second} coincide")]
    DuplicateSites { first: usize, second: usize },

    #[error("sensor ids must be unique, {0} appears twice")]
    DuplicateSensorId(usize),

    #[error("sensor {sensor} violates half-plane {constraint} by {violation}")]
    InfeasibleNominal {
        sensor: usize,
        constraint: usize,
        violation: f64,
    },

    #[error("cannot take the minimum RRF of an empty report list")]
    EmptyReports,

    #[error("could not place {placed} of {requested} distinct sites after {attempts} attempts")]
    DeploymentExhausted {
        placed: usize,
        requested: usize,
        attempts: usize,
    },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            reason: reason.into(),
        }
    }

    /// True for errors that describe an unusable deployment rather than a bad
    /// parameter value.
    pub fn is_infeasible_input(&self) -> bool {
        matches!(
            self,
            Error::NoSites
                | Error::SiteOutsideRoi { .. }
                | Error::DuplicateSites { .. }
                | Error::DuplicateSensorId(_)
                | Error::InfeasibleNominal { .. }
                | Error::DeploymentExhausted { .. }
        )
    }
}
