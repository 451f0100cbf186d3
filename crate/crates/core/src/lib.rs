//! Energy-aware coverage planning for patrol UAVs over a farm.
//!
//! The pipeline runs map → waypoint grid → pruned route graph → tour. Tours
//! are costed with a distance-plus-turning energy model and planned either
//! by a back-and-forth sweep or by Ant System / Max-Min Ant System.
//!
//! ```no_run
//! use farmcover::{aco, world, RouteGraph, EnergyModel, AcoParams};
//!
//! let map = world::reference_farm();
//! let waypoints = world::generate_waypoints(&map);
//! let graph = RouteGraph::build(&map, &waypoints, 0).unwrap();
//! let run = aco::solve(&graph, &EnergyModel::default(), &AcoParams::ant_system(7)).unwrap();
//! println!("{:.2} kJ, valid = {}", run.best_tour.cost_kj, run.valid);
//! ```

pub mod aco;
pub mod baseline;
pub mod energy;
pub mod error;
pub mod fleet;
pub mod geometry;
pub mod harness;
pub mod render;
pub mod routegraph;
pub mod world;

pub use aco::{AcoParams, SolverRun, Variant};
pub use energy::{EnergyModel, Tour};
pub use error::{Error, Result};
pub use fleet::{FleetPlan, Planner};
pub use geometry::{Obstacle, Point2D, Segment2D};
pub use harness::{BenchConfig, BenchSummary, Problem, Solver, TrialReport};
pub use routegraph::{NodeId, NodeKind, RouteGraph};
pub use world::{FarmMap, WaypointSet};
