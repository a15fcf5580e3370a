use thiserror::Error;

use crate::cpoly::Order;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root finding requested for the zero polynomial")]
    ZeroPolynomial,
    #[error("root residual {residual:e} above tolerance")]
    RootResidual { residual: f64 },

    #[error("all four derivatives vanish identically")]
    EmptyData,
    #[error("ConformalityViolation: residual {residual:e} exceeds {tol:e}")]
    ConformalityViolation { residual: f64, tol: f64 },
    #[error("OrderMismatch: n1+n2 = {left} but n3+n4 = {right} (orders {orders:?})")]
    OrderMismatch {
        left: usize,
        right: usize,
        orders: [Order; 4],
    },
    #[error("NotNormalForm: leading term of f1 does not dominate (orders {orders:?})")]
    NotNormalForm { orders: [Order; 4] },
    #[error("DegeneratePlane: tangent vectors vanish at z = {re} + {im}i")]
    DegeneratePlane { re: f64, im: f64 },
    #[error("IndeterminateGauss: numerator and denominator both vanish")]
    IndeterminateGauss,

    #[error("OrderViolation: {0}")]
    OrderViolation(String),
    #[error("ParameterShape: {0}")]
    ParameterShape(String),
    #[error("SamplingExhausted: no generic parameters after {attempts} draws at scale {t}")]
    SamplingExhausted { attempts: usize, t: f64 },

    #[error("BranchPointInRegion: branch point at {re} + {im}i")]
    BranchPointInRegion { re: f64, im: f64 },
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("TraceFailure: {0}")]
    TraceFailure(String),
    #[error("OpenCurve: slice did not close within {steps} steps")]
    OpenCurve { steps: usize },
    #[error("BranchOnSlice: gradient vanishes on the slice")]
    BranchOnSlice,
    #[error("NonMonotoneFiberAngle: fiber angle decreases at sample {index}")]
    NonMonotoneFiberAngle { index: usize },
    #[error("WindingMismatch: fiber angle winds {winding} times, expected {expected}")]
    WindingMismatch { winding: i64, expected: usize },
    #[error("StrandCollision: two strands meet at fiber angle {theta}")]
    StrandCollision { theta: f64 },
    #[error("PushoffCollision: pushoff comes within {distance:e} of the knot")]
    PushoffCollision { distance: f64 },
    #[error("ProjectionPoleOnCurve: no projection pole away from the curves")]
    ProjectionPoleOnCurve,
    #[error("EtaSelection: {0}")]
    EtaSelection(String),

    #[error("FormulaViolation: {0}")]
    FormulaViolation(String),
}
