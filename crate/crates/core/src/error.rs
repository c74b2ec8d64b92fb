use thiserror::Error;

/// Errors raised by the laboratory's numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {re}+{im}i lies on the principal square-root cut; switch chart")]
    BranchCut { re: f64, im: f64 },

    #[error("solved coordinate |w_solved| = {modulus:e} is below the chart threshold {threshold:e}")]
    DegenerateChart { modulus: f64, threshold: f64 },

    #[error("analytic-radial Hessian requested for a potential without a radial profile")]
    UnregisteredRadial,

    #[error("finite-difference step {step:e} underflows")]
    StepUnderflow { step: f64 },

    #[error("form is not positive definite (min eigenvalue {min_eigenvalue:e}) at |w| = {modulus}")]
    NotPositive { min_eigenvalue: f64, modulus: f64 },

    #[error("apex of the cone is excluded (|z| = {modulus:e})")]
    ApexExcluded { modulus: f64 },

    #[error("point lies on the collapsed locus: {0}")]
    CollapsedLocus(String),

    #[error("empty sample")]
    EmptySample,

    #[error("no sample pairs satisfy the Holder distance restriction")]
    NoValidPairs,

    #[error("annulus exponent alpha = {0} outside [0, 2]")]
    InvalidAlpha(f64),

    #[error("degenerate regression data: {0}")]
    DegenerateData(String),

    #[error("metric degenerate at node {node} (r = {radius:e})")]
    MetricDegenerate { node: usize, radius: f64 },

    #[error("weighted operator is singular (smallest singular value {0:e})")]
    SingularOperator(f64),

    #[error("Newton iteration did not converge within {0} iterations")]
    MaxIterations(usize),

    #[error("line search stalled at residual {0:e}")]
    LineSearchStall(f64),

    #[error("radius {value} outside the admissible range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("empty correspondence")]
    EmptyCorrespondence,

    #[error("degree {0} outside 1..=9")]
    DegreeOutOfRange(u32),
}

pub type Result<T> = std::result::Result<T, LabError>;
