use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("degree {degree} exceeds the state width {width}")]
    DegreeAboveWidth { degree: usize, width: usize },
    #[error("inverse degree must be at least 1")]
    ZeroInverseDegree,
    #[error("round count {rounds} outside 1..={max}")]
    RoundCount { rounds: usize, max: usize },
}
