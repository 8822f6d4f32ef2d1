use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("distance must be positive, got {0} km")]
    NonPositiveDistance(f64),

    #[error("transmitter {tx} and receiver {rx} share a position")]
    CoincidentNodes { tx: usize, rx: usize },

    #[error("could not place {role} after {attempts} attempts; the scenario is likely infeasible")]
    PlacementFailed { role: &'static str, attempts: usize },

    #[error("subband {subband} has neither noise nor interference at receiver {receiver}")]
    DegenerateSinr { subband: u8, receiver: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("infeasible assignment: {0}")]
    InfeasibleAssignment(String),

    #[error("receiver {0} has no available transmitter")]
    NoOption(usize),

    #[error("sum utility became non-finite at iteration {0}")]
    NonFiniteUtility(usize),

    #[error("instance has {assignments} assignments, above the enumeration cap of {cap}")]
    InstanceTooLarge { assignments: u128, cap: u128 },

    #[error("expected {expected} prices, got {found}")]
    MissingPrices { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}
