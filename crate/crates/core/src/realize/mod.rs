//! Numeric realization: residuals and solving, the staged construction, and
//! DR-plans.

mod construction;
mod drplan;
mod solve;

pub use construction::{
    build_construction, incremental_solve, stage1_size, Block, BlockTemplate, ConstructionError,
    ConstructionTrace, IncrementalError, IncrementalStats, Stage1Size,
};
pub use drplan::{
    drplan, max_rigid_subsystem, max_rigid_subsystem_ordered, maximal_rigid_proper_subsets,
    solve_with_plan, solve_with_plan_checked, DrNode, DrPlan, DrPlanError, NodeKind, RigidCore,
    CHECK_TOL,
};
pub use solve::{
    edge_residuals, residual, solve, solve_accepting, SolveConfig, SolveError, SolveReport,
    DEGENERATE_SPAN, NEWTON_MAX_CONDITION,
};
