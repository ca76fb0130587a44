use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(&'static str),

    #[error("cube at level {level} is not part of the tree")]
    CubeOutsideTree { level: usize },

    #[error("test cube does not fit the leaf grid")]
    CubeOutsideGrid,

    #[error("point lies outside the base cube")]
    PointOutsideBase,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter `{name}` = {value}")]
    Parameter { name: &'static str, value: f64 },

    #[error("exponent `{name}` = {value} is out of range")]
    Exponent { name: &'static str, value: f64 },

    #[error("inconsistent exponents: {0}")]
    ExponentRelation(&'static str),

    #[error("region does not meet the data domain in positive measure")]
    EmptyRegion,

    #[error("arguments live on different trees")]
    TreeMismatch,

    #[error("grid functions have different subdivisions")]
    GridMismatch,

    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("value {0} is negative or not finite")]
    InvalidValue(f64),

    #[error("unknown field spec `{0}`")]
    UnknownSpec(String),

    #[error("oracle is limited to {max} cubes, tree has {got}")]
    OracleTooLarge { max: usize, got: usize },

    #[error("optimizer failed: {0}")]
    Solver(&'static str),
}
