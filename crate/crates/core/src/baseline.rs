//! Back-and-forth (boustrophedon) coverage baseline.
//!
//! Sweep lines run along the grid's long axis and alternate direction. A
//! serpentine neighbor without a direct leg is reached through the shortest
//! detour, which may pass over already-covered waypoints.

use crate::energy::{tour_cost, EnergyModel, Tour};
use crate::error::Result;
use crate::geometry::distance;
use crate::routegraph::{NodeId, NodeKind, RouteGraph};
use crate::world::{GridIndex, WaypointSet};

/// Graph node indices in serpentine order, first line starting at the end
/// nearest to home.
pub fn serpentine_order(g: &RouteGraph, waypoints: &WaypointSet) -> Vec<usize> {
    let mut by_source = vec![None; waypoints.len()];
    for node in g.nodes().iter().filter(|n| n.id.kind == NodeKind::Waypoint) {
        by_source[node.source] = Some(node.id.index);
    }
    let along_x = waypoints.cols() >= waypoints.rows();
    let (n_lines, line_len) = if along_x {
        (waypoints.rows(), waypoints.cols())
    } else {
        (waypoints.cols(), waypoints.rows())
    };
    let lines: Vec<Vec<usize>> = (0..n_lines)
        .map(|line| {
            (0..line_len)
                .filter_map(|pos| {
                    let at = if along_x {
                        GridIndex { row: line, col: pos }
                    } else {
                        GridIndex { row: pos, col: line }
                    };
                    waypoints.index_of(at).and_then(|k| by_source[k])
                })
                .collect::<Vec<_>>()
        })
        .filter(|l: &Vec<usize>| !l.is_empty())
        .collect();

    let build = |first_forward: bool| {
        let mut order = Vec::new();
        for (k, line) in lines.iter().enumerate() {
            if (k % 2 == 0) == first_forward {
                order.extend(line.iter().copied());
            } else {
                order.extend(line.iter().rev().copied());
            }
        }
        order
    };
    let forward = build(true);
    let backward = build(false);
    let home = g.pos(g.home().index);
    let lead = |o: &[usize]| o.first().map_or(f64::INFINITY, |&i| distance(home, g.pos(i)));
    if lead(&backward) < lead(&forward) {
        backward
    } else {
        forward
    }
}

/// Serpentine sweep from home and back. Validity here means closed at home
/// and every waypoint covered at least once; detour pass-throughs may
/// revisit waypoints.
pub fn plan_back_and_forth(
    g: &RouteGraph,
    model: &EnergyModel,
    waypoints: &WaypointSet,
) -> Result<Tour> {
    let home = g.home().index;
    let mut targets = serpentine_order(g, waypoints);
    targets.push(home);

    let mut seq = vec![home];
    let mut cur = home;
    for target in targets {
        if g.has_edge(cur, target) {
            seq.push(target);
        } else {
            seq.extend(g.shortest_detour(cur, target)?.into_iter().skip(1));
        }
        cur = target;
    }
    let nodes: Vec<NodeId> = seq.iter().map(|&i| g.id(i)).collect();
    let mut tour = tour_cost(g, model, &nodes)?;
    tour.is_valid = tour.nodes.first() == Some(&g.home())
        && tour.nodes.last() == Some(&g.home())
        && tour.waypoints_covered() == g.waypoint_count();
    Ok(tour)
}
