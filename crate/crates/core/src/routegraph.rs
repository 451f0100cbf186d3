//! Solution space: every collision-free straight leg between valid waypoints
//! and the drone's home station.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, min_clearance, Point2D, Segment2D};
use crate::world::{FarmMap, WaypointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Waypoint,
    Station,
}

/// Dense node index. Waypoint nodes come first, the home station is last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeId {
    pub index: usize,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphNode {
    pub id: NodeId,
    pub pos: Point2D,
    /// Index into the `WaypointSet` for waypoints, into the map's stations
    /// for the home node.
    pub source: usize,
}

#[derive(Debug, Clone)]
pub struct RouteGraph {
    nodes: Vec<GraphNode>,
    /// Row-major n x n leg lengths; `None` where the leg was pruned.
    legs: Vec<Option<f64>>,
    neighbors: Vec<Vec<usize>>,
    home: NodeId,
}

impl RouteGraph {
    /// Graph over all valid waypoints plus station `home`.
    pub fn build(map: &FarmMap, waypoints: &WaypointSet, home: usize) -> Result<Self> {
        Self::build_subset(map, waypoints, &waypoints.valid_indices(), home)
    }

    /// Graph over the given waypoint indices (invalid ones are skipped) plus
    /// station `home`.
    pub fn build_subset(
        map: &FarmMap,
        waypoints: &WaypointSet,
        subset: &[usize],
        home: usize,
    ) -> Result<Self> {
        let station = *map.stations().get(home).ok_or(Error::UnknownStation {
            index: home,
            count: map.stations().len(),
        })?;
        let mut chosen: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&k| k < waypoints.len() && waypoints.is_valid(k))
            .collect();
        chosen.sort_unstable();
        chosen.dedup();
        if chosen.is_empty() {
            return Err(Error::NoValidWaypoints);
        }

        let mut nodes: Vec<GraphNode> = chosen
            .iter()
            .enumerate()
            .map(|(index, &k)| GraphNode {
                id: NodeId {
                    index,
                    kind: NodeKind::Waypoint,
                },
                pos: waypoints.point(k),
                source: k,
            })
            .collect();
        let home_id = NodeId {
            index: nodes.len(),
            kind: NodeKind::Station,
        };
        nodes.push(GraphNode {
            id: home_id,
            pos: station,
            source: home,
        });

        let n = nodes.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        // Each pair is judged independently, so the parallel map is order-free.
        let kept: Vec<Option<f64>> = pairs
            .par_iter()
            .map(|&(i, j)| leg_if_clear(map, nodes[i].pos, nodes[j].pos))
            .collect();

        let mut legs = vec![None; n * n];
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), d) in pairs.iter().zip(kept) {
            if let Some(d) = d {
                legs[i * n + j] = Some(d);
                legs[j * n + i] = Some(d);
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        let graph = Self {
            nodes,
            legs,
            neighbors,
            home: home_id,
        };
        let unreachable = graph.unreachable_from_home();
        if !unreachable.is_empty() {
            return Err(Error::Disconnected {
                unreachable: unreachable.iter().map(|&i| graph.nodes[i].pos).collect(),
            });
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn waypoint_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn home(&self) -> NodeId {
        self.home
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> Option<&GraphNode> {
        self.nodes.get(index)
    }

    pub fn id(&self, index: usize) -> NodeId {
        self.nodes[index].id
    }

    pub fn pos(&self, index: usize) -> Point2D {
        self.nodes[index].pos
    }

    /// Length of the leg i-j, `None` if absent or out of range.
    pub fn leg(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.nodes.len();
        if i >= n || j >= n {
            return None;
        }
        self.legs[i * n + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.leg(i, j).is_some()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as (i, j) with i < j, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.neighbors.iter().enumerate().flat_map(move |(i, list)| {
            list.iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j, self.legs[i * self.nodes.len() + j].unwrap()))
        })
    }

    fn unreachable_from_home(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([self.home.index]);
        seen[self.home.index] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| !seen[i]).collect()
    }

    /// Minimum-distance node sequence from `from` to `to`, both included.
    /// Dijkstra on the dense graph; ties resolve toward lower node indices.
    pub fn shortest_detour(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        if from >= n {
            return Err(Error::UnknownNode(from));
        }
        if to >= n {
            return Err(Error::UnknownNode(to));
        }
        if from == to {
            return Ok(vec![from]);
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[from] = 0.0;
        loop {
            let mut u = usize::MAX;
            for i in 0..n {
                if !done[i] && dist[i].is_finite() && (u == usize::MAX || dist[i] < dist[u]) {
                    u = i;
                }
            }
            if u == usize::MAX {
                return Err(Error::NoPath { from, to });
            }
            if u == to {
                break;
            }
            done[u] = true;
            for &v in &self.neighbors[u] {
                let alt = dist[u] + self.legs[u * n + v].unwrap();
                if alt < dist[v] {
                    dist[v] = alt;
                    prev[v] = u;
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }
}

/// Leg length when the straight segment keeps the clearance from every
/// obstacle.
fn leg_if_clear(map: &FarmMap, a: Point2D, b: Point2D) -> Option<f64> {
    let seg = Segment2D::new(a, b).ok()?;
    let clear = map.obstacles().iter().all(|o| {
        let c = min_clearance(&seg, o);
        c >= map.clearance_m() && c > 0.0
    });
    clear.then(|| distance(a, b))
}
