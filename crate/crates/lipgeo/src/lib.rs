//! Bi-Lipschitz invariants of semialgebraic surface germs.
//!
//! Four subsystems:
//!
//! - [`exponents`]: exact rational/Puiseux arithmetic, arcs, tangency orders,
//!   admissible function expressions.
//! - [`complexes`]: Hölder complexes as labeled multigraphs, the canonical
//!   form deciding inner Lipschitz equivalence, horn exponents, and
//!   realization as concrete germ models.
//! - [`pizza`]: abstract pizzas (the complete invariant of contact Lipschitz
//!   equivalence), validation, minimalization, equivalence, and exact
//!   extraction of the minimal pizza of an admissible function.
//! - [`metriclab`]: a numerical laboratory over sampled germ models — inner /
//!   outer / pancake distances, exponent fits, LNE reports, projection and
//!   tangent-cone experiments — the brute-force oracle for the symbolic side.
//!
//! All values are immutable after construction and all operations are pure;
//! concurrent use needs no synchronization.

pub mod complexes;
pub mod exponents;
pub mod json;
pub mod metriclab;
pub mod pizza;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    // ---- rationals, series, arcs ----
    #[error("malformed rational literal {0:?} (expected p, p/q or inf)")]
    BadRational(String),
    #[error("arcs need at least two coordinates, got {0}")]
    ArcDimension(usize),
    #[error("arc series exponents must be >= 1")]
    ArcExponentBelowOne,
    #[error("arc coordinate series must be exact (no truncated expansions)")]
    ArcInexactSeries,
    #[error("coordinate-parameterized arc needs one coordinate exactly t")]
    ArcMissingScaleCoordinate,
    #[error("distance-parameterized arc: exponent-1 coefficients must have norm^2 = 1")]
    ArcNotUnitSpeed,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cannot mix distance- and coordinate-parameterized arcs")]
    MixedParameterization,
    #[error("arc family must be nonempty")]
    EmptyArcFamily,
    #[error("arc has no exponent-1 component (degenerate tangent)")]
    DegenerateTangent,

    // ---- expressions ----
    #[error("monomial exponents must be non-negative rationals")]
    NegativeMonomialExponent,
    #[error("fractional power has no exact rational value (irrational cancellation locus)")]
    FractionalPowerIrrational,
    #[error("exponent exceeds supported magnitude")]
    ExponentTooLarge,
    #[error("boundary swap requires integer w-exponents")]
    SwapNeedsIntegerPowers,
    #[error("expected a 2-d coordinate-parameterized arc (u = t)")]
    TriangleArcExpected,
    #[error("symbolic sample kept colliding with special values")]
    SymbolicSampleCollision,

    // ---- complexes ----
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("edge {0:?} is a self-loop; loops are modeled as parallel edges")]
    SelfLoopEdge(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("vertex {0:?} is isolated")]
    IsolatedVertex(String),
    #[error("edge exponent must be a finite rational >= 1")]
    BetaBelowOne,
    #[error("operation requires the underlying graph to be a single cycle")]
    NotACycle,

    // ---- pizza ----
    #[error("pizza is invalid: {0}")]
    InvalidPizza(String),
    #[error("pizza extraction failed: {0}")]
    Extraction(String),
    #[error("order resolution bound {0} exceeded; rerun with a larger bound")]
    ResolutionExceeded(String),
    #[error("arc lies outside the triangle")]
    ArcOutsideTriangle,

    // ---- metric lab ----
    #[error("scale t={0} outside the sampled range")]
    TOutOfRange(f64),
    #[error("mesh is disconnected between the query points")]
    DisconnectedMesh,
    #[error("pancake groups do not partition the model's patches")]
    NotAPartition,
    #[error("pancake mode requires a decomposition")]
    MissingDecomposition,
    #[error("need at least {0} arcs")]
    InsufficientArcs(usize),
    #[error("order estimation needs positive values")]
    NonPositiveSamples,
    #[error("order estimation needs at least {0} samples at distinct scales")]
    TooFewSamples(usize),
    #[error("arc does not lie on the model (distance {0} at t={1})")]
    ArcOffModel(f64, f64),
    #[error("sampled link is not a single closed chain")]
    LinkNotClosed,
    #[error("experiment requires ambient dimension >= {0}")]
    DimensionTooLow(usize),
    #[error("germ model is malformed: {0}")]
    BadModel(String),

    // ---- i/o ----
    #[error("json: {0}")]
    Json(String),
}

pub use exponents::{
    min_max_cmp, ord_on_arc, series_order, Arc, ArcFamily, ExtendedExponent, FunctionExpr,
    OrderBound, Parameterization, PuiseuxSeries,
};
