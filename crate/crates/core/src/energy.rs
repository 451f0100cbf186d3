//! Turn-aware energy model.
//!
//! A path costs `lambda * distance + gamma * turning`, with turning summed
//! in unsigned degrees over interior vertices only. Takeoff heading and the
//! final arrival are free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, turn_angle_unchecked, Point2D};
use crate::routegraph::{NodeId, NodeKind, RouteGraph};

/// Straight-line flight cost, kJ per meter.
pub const DEFAULT_LAMBDA_KJ_PER_M: f64 = 0.1164;
/// Heading-change cost, kJ per degree.
pub const DEFAULT_GAMMA_KJ_PER_DEG: f64 = 0.0173;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    lambda_kj_per_m: f64,
    gamma_kj_per_deg: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            lambda_kj_per_m: DEFAULT_LAMBDA_KJ_PER_M,
            gamma_kj_per_deg: DEFAULT_GAMMA_KJ_PER_DEG,
        }
    }
}

impl EnergyModel {
    pub fn new(lambda_kj_per_m: f64, gamma_kj_per_deg: f64) -> Result<Self> {
        if !(lambda_kj_per_m.is_finite() && lambda_kj_per_m > 0.0) {
            return Err(Error::param("lambda", "must be finite and > 0"));
        }
        if !(gamma_kj_per_deg.is_finite() && gamma_kj_per_deg > 0.0) {
            return Err(Error::param("gamma", "must be finite and > 0"));
        }
        Ok(Self {
            lambda_kj_per_m,
            gamma_kj_per_deg,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_kj_per_m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_kj_per_deg
    }

    pub fn cost(&self, distance_m: f64, turn_deg: f64) -> f64 {
        self.lambda_kj_per_m * distance_m + self.gamma_kj_per_deg * turn_deg
    }
}

/// Distance and turning totals of a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTotals {
    pub distance_m: f64,
    pub turn_deg: f64,
}

/// Totals for a polyline given by its vertices. Consecutive duplicates
/// contribute no distance and no turn.
pub fn path_totals(points: &[Point2D]) -> PathTotals {
    let distance_m = points.windows(2).map(|w| distance(w[0], w[1])).sum();
    let turn_deg = points
        .windows(3)
        .map(|w| turn_angle_unchecked(w[0], w[1], w[2]))
        .sum();
    PathTotals {
        distance_m,
        turn_deg,
    }
}

pub fn path_cost(points: &[Point2D], model: &EnergyModel) -> f64 {
    let t = path_totals(points);
    model.cost(t.distance_m, t.turn_deg)
}

/// One drone's flight: node order plus its energy accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub nodes: Vec<NodeId>,
    pub total_distance_m: f64,
    pub total_turn_deg: f64,
    pub cost_kj: f64,
    pub is_valid: bool,
}

impl Tour {
    pub fn points(&self, g: &RouteGraph) -> Vec<Point2D> {
        self.nodes.iter().map(|n| g.pos(n.index)).collect()
    }

    /// Number of distinct waypoints visited.
    pub fn waypoints_covered(&self) -> usize {
        let mut seen: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Waypoint)
            .map(|n| n.index)
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Home-to-home and every waypoint exactly once.
pub fn is_valid_tour(g: &RouteGraph, nodes: &[NodeId]) -> bool {
    let home = g.home();
    if nodes.len() < 2 || nodes[0] != home || nodes[nodes.len() - 1] != home {
        return false;
    }
    let interior = &nodes[1..nodes.len() - 1];
    if interior.len() != g.waypoint_count() {
        return false;
    }
    let mut seen = vec![false; g.len()];
    for n in interior {
        if n.kind != NodeKind::Waypoint || n.index >= g.len() || seen[n.index] {
            return false;
        }
        seen[n.index] = true;
    }
    true
}

/// Cost a node sequence over the graph's legs.
pub fn tour_cost(g: &RouteGraph, model: &EnergyModel, nodes: &[NodeId]) -> Result<Tour> {
    if nodes.len() < 2 {
        return Err(Error::param("nodes", "a tour needs at least two nodes"));
    }
    for n in nodes {
        if g.node(n.index).map(|gn| gn.id) != Some(*n) {
            return Err(Error::UnknownNode(n.index));
        }
    }
    let mut total_distance_m = 0.0;
    for w in nodes.windows(2) {
        total_distance_m += g.leg(w[0].index, w[1].index).ok_or(Error::NotAdjacent {
            from: w[0].index,
            to: w[1].index,
        })?;
    }
    let total_turn_deg: f64 = nodes
        .windows(3)
        .map(|w| turn_angle_unchecked(g.pos(w[0].index), g.pos(w[1].index), g.pos(w[2].index)))
        .sum();
    Ok(Tour {
        nodes: nodes.to_vec(),
        total_distance_m,
        total_turn_deg,
        cost_kj: model.cost(total_distance_m, total_turn_deg),
        is_valid: is_valid_tour(g, nodes),
    })
}

/// Desirability of flying i -> j having arrived at i from `prev`:
/// the inverse of the leg's estimated energy.
pub fn heuristic(
    model: &EnergyModel,
    prev: Option<Point2D>,
    i: Point2D,
    j: Point2D,
    d_ij: f64,
) -> f64 {
    let theta = match prev {
        Some(h) if h != i && i != j => turn_angle_unchecked(h, i, j),
        _ => 0.0,
    };
    1.0 / model.cost(d_ij, theta)
}
