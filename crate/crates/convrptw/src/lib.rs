//! Consistent vehicle routing with time windows.
//!
//! Customers place orders on several days of a short planning horizon and
//! must be served by the same driver on every one of them.  The solver
//! builds an initial plan with a multi-period insertion heuristic, then
//! squeezes the vehicle count with an ejection-pool route-elimination
//! heuristic, and finally shortens the surviving routes.  An exhaustive
//! branch-and-bound oracle and a MILP exporter provide ground truth on
//! small instances.
//!
//! The `convrptw` binary wraps all of it: instance generation from Solomon
//! benchmark files, solving, rolling-horizon updates, daily replanning and
//! report tables.

pub mod construct;
pub mod eliminate;
pub mod generate;
pub mod io;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod report;
pub mod rolling;
pub mod search;
pub mod solomon;
pub mod units;

#[cfg(test)]
pub(crate) mod testutil;

pub use construct::{
    best_customer, best_position, construct, seed_customer, ConstructError, ConstructionParams,
    SeedRule,
};
pub use eliminate::{
    eliminate_routes, eliminate_routes_traced, select_victim, stage1_insert, stage2_insert,
    stage3_eject, Ejection, EjectionPool, EliminateError, EliminationParams, EliminationStats,
    TraceEvent,
};
pub use generate::{generate_convrptw, GenerateError, GeneratorConfig};
pub use io::{
    read_instance, read_solution, write_instance, write_solution, IoError, SolutionDoc,
};
pub use milp::{export_milp, milp_to_string};
pub use model::{
    check_insertion, evaluate_route, evaluate_solution, route_cost, Instance, InstanceData,
    InsertionCheck, ModelError, RouteCost, Schedule, Solution, SolutionMetrics, Vehicle, Visit,
    DEPOT,
};
pub use oracle::{exact_min_vehicles, OracleError, OracleLimits, OracleResult};
pub use report::{
    aggregate, read_report, render_text, report_from_str, report_to_string, table_from_csv,
    to_csv, write_report, ReportError, ReportTable, RunReport, TableRow,
};
pub use rolling::{
    daily, restrict_to_day, update, DailyOutcome, DrainStats, RollingError, UpdateOutcome,
};
pub use search::{
    adapt_alpha, penalty, relocate_inter, reoptimize, restore_feasibility, two_opt_intra,
    Objective, PenaltyBreakdown, PenaltyParams,
};
pub use solomon::{parse_solomon, read_solomon, SolomonInstance, SolomonNode};
pub use units::{Distance, Time};
