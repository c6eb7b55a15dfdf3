//! Numerical laboratory over sampled germ models: the brute-force oracle for
//! the symbolic modules.

pub mod estimate;
pub mod experiments;
pub mod mesh;
pub mod model;

pub use estimate::{estimate_order, estimate_order_or_floor, NumericOrder, OrderEstimate};
pub use experiments::{
    horn_exponent_numeric, link_diameter_exponent, lne_report, pancake_check,
    projection_experiment, sample_arcs, sample_link, submodel, tangency_numeric, tangent_cone_sample,
    LneMode, LneReport, PancakeReport, ProjectionReport, TangencyMode, TangentConeReport,
};
pub use mesh::{distance, DistanceMode, LinkMesh, ModelPoint};
pub use model::{
    cusp_branch_decomposition, cusp_pair_model, horn_model, rational_circle_points,
    split_horn_decomposition, triangle_model, GermModel, Gluing, PancakeDecomposition,
    PancakeGroup, Patch, PatchTerm, PiecewiseLinear, ScaleSamplePlan, Side,
};
