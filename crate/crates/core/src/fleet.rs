//! One- and two-drone planning: sub-area partition, per-drone tours and
//! altitude separation.

use rayon::prelude::*;

use crate::aco::{self, AcoParams, InvalidReason};
use crate::baseline::plan_back_and_forth;
use crate::energy::{EnergyModel, Tour};
use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, Segment2D};
use crate::routegraph::RouteGraph;
use crate::world::{FarmMap, WaypointSet};

pub const BASE_ALTITUDE_M: f64 = 20.0;
pub const SEPARATED_ALTITUDE_M: f64 = 30.0;

/// Seed offset between drones so each sub-problem gets its own stream.
const DRONE_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Planner {
    BackAndForth,
    Aco(AcoParams),
}

/// Split the valid waypoints between drones. Drone `k` flies from station
/// `k`. With two drones the grid is cut perpendicular to the long axis; the
/// drone whose station lies further toward the low end takes the low half,
/// and an odd middle column joins the half facing the stations' centroid.
pub fn partition(map: &FarmMap, waypoints: &WaypointSet, n_drones: usize) -> Result<Vec<Vec<usize>>> {
    if !(1..=2).contains(&n_drones) {
        return Err(Error::DroneCount(n_drones));
    }
    if n_drones > map.stations().len() {
        return Err(Error::TooManyDrones {
            drones: n_drones,
            stations: map.stations().len(),
        });
    }
    let valid = waypoints.valid_indices();
    if n_drones == 1 {
        return Ok(vec![valid]);
    }

    let along_x = map.perimeter().x_is_long_axis();
    let axis = |p: crate::geometry::Point2D| if along_x { p.x } else { p.y };
    let line_of = |k: usize| {
        let g = waypoints.grid_index(k);
        if along_x {
            g.col
        } else {
            g.row
        }
    };
    let n_lines = if along_x { waypoints.cols() } else { waypoints.rows() };
    let s0 = axis(map.stations()[0]);
    let s1 = axis(map.stations()[1]);
    let low_drone = if s1 < s0 { 1 } else { 0 };

    let half = n_lines / 2;
    // Lines [0, cut) go low.
    let cut = if n_lines % 2 == 0 {
        half
    } else {
        let origin = axis(map.perimeter().min);
        let middle = origin + half as f64 * map.grid_spacing_m();
        let centroid = 0.5 * (s0 + s1);
        let to_low = if centroid != middle {
            centroid < middle
        } else {
            // Stations straddle the middle: nearer station wins, drone 0 on ties.
            let (d0, d1) = ((s0 - middle).abs(), (s1 - middle).abs());
            let nearer = if d1 < d0 { 1 } else { 0 };
            nearer == low_drone
        };
        if to_low {
            half + 1
        } else {
            half
        }
    };

    let mut subsets = vec![Vec::new(), Vec::new()];
    for k in valid {
        let low = line_of(k) < cut;
        let drone = if low { low_drone } else { 1 - low_drone };
        subsets[drone].push(k);
    }
    if let Some(d) = subsets.iter().position(Vec::is_empty) {
        return Err(Error::EmptySubArea(d));
    }
    Ok(subsets)
}

#[derive(Debug, Clone)]
pub struct DronePlan {
    pub station: usize,
    pub waypoints: Vec<usize>,
    pub altitude_m: f64,
    pub graph: RouteGraph,
    pub tour: Tour,
    pub failure: Option<InvalidReason>,
}

#[derive(Debug, Clone)]
pub struct FleetPlan {
    pub drones: Vec<DronePlan>,
}

impl FleetPlan {
    pub fn total_cost_kj(&self) -> f64 {
        self.drones.iter().map(|d| d.tour.cost_kj).sum()
    }

    pub fn total_distance_m(&self) -> f64 {
        self.drones.iter().map(|d| d.tour.total_distance_m).sum()
    }

    pub fn total_turn_deg(&self) -> f64 {
        self.drones.iter().map(|d| d.tour.total_turn_deg).sum()
    }

    pub fn is_valid(&self) -> bool {
        self.drones.iter().all(|d| d.tour.is_valid)
    }

    /// First invalid drone's failure cause.
    pub fn failure(&self) -> Option<InvalidReason> {
        self.drones.iter().find_map(|d| d.failure)
    }

    fn segments(d: &DronePlan) -> Vec<Segment2D> {
        d.tour
            .points(&d.graph)
            .windows(2)
            .filter_map(|w| Segment2D::new(w[0], w[1]).ok())
            .collect()
    }

    /// True when any leg of one drone crosses or touches a leg of another.
    pub fn has_crossing(&self) -> bool {
        let segs: Vec<Vec<Segment2D>> = self.drones.iter().map(Self::segments).collect();
        for a in 0..segs.len() {
            for b in (a + 1)..segs.len() {
                if segs[a]
                    .iter()
                    .any(|s| segs[b].iter().any(|t| segments_intersect(s, t)))
                {
                    return true;
                }
            }
        }
        false
    }
}

fn plan_drone(
    map: &FarmMap,
    waypoints: &WaypointSet,
    model: &EnergyModel,
    planner: &Planner,
    drone: usize,
    subset: &[usize],
) -> Result<DronePlan> {
    let graph = RouteGraph::build_subset(map, waypoints, subset, drone)?;
    let (tour, failure) = match planner {
        Planner::BackAndForth => (plan_back_and_forth(&graph, model, waypoints)?, None),
        Planner::Aco(params) => {
            let mut p = *params;
            p.seed = params
                .seed
                .wrapping_add((drone as u64).wrapping_mul(DRONE_SEED_STRIDE));
            let run = aco::solve(&graph, model, &p)?;
            (run.best_tour, run.failure)
        }
    };
    Ok(DronePlan {
        station: drone,
        waypoints: subset.to_vec(),
        altitude_m: BASE_ALTITUDE_M,
        graph,
        tour,
        failure,
    })
}

/// Partition, plan every drone independently, then separate altitudes if
/// any two drones' ground tracks cross.
pub fn plan_fleet(
    map: &FarmMap,
    waypoints: &WaypointSet,
    model: &EnergyModel,
    planner: &Planner,
    n_drones: usize,
) -> Result<FleetPlan> {
    let subsets = partition(map, waypoints, n_drones)?;
    let drones = subsets
        .par_iter()
        .enumerate()
        .map(|(d, subset)| plan_drone(map, waypoints, model, planner, d, subset))
        .collect::<Result<Vec<_>>>()?;
    let mut plan = FleetPlan { drones };
    if plan.has_crossing() {
        for (k, d) in plan.drones.iter_mut().enumerate() {
            d.altitude_m = if k == 0 {
                BASE_ALTITUDE_M
            } else {
                SEPARATED_ALTITUDE_M
            };
        }
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{generate_waypoints, load_map};

    fn map(max_x: f64, stations: &str) -> FarmMap {
        load_map(&format!(
            r#"{{"perimeter": {{"min": [0, 0], "max": [{max_x}, 40]}},
                "obstacles": [], "stations": [{stations}],
                "clearance_m": 10, "grid_spacing_m": 38}}"#
        ))
        .unwrap()
    }

    fn cols(w: &WaypointSet, subset: &[usize]) -> Vec<usize> {
        let mut c: Vec<usize> = subset.iter().map(|&k| w.grid_index(k).col).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    #[test]
    fn single_drone_takes_everything() {
        let m = map(120.0, "[0, 20]");
        let w = generate_waypoints(&m);
        let parts = partition(&m, &w, 1).unwrap();
        assert_eq!(parts, vec![w.valid_indices()]);
    }

    #[test]
    fn even_columns_split_in_half() {
        let m = map(120.0, "[0, 20], [120, 20]");
        let w = generate_waypoints(&m);
        assert_eq!(w.cols(), 4);
        let parts = partition(&m, &w, 2).unwrap();
        assert_eq!(cols(&w, &parts[0]), vec![0, 1]);
        assert_eq!(cols(&w, &parts[1]), vec![2, 3]);
    }

    #[test]
    fn odd_middle_column_goes_toward_stations() {
        let m = map(160.0, "[0, 20], [10, 20]");
        let w = generate_waypoints(&m);
        assert_eq!(w.cols(), 5);
        let parts = partition(&m, &w, 2).unwrap();
        assert_eq!(cols(&w, &parts[0]).len(), 3);
        assert_eq!(cols(&w, &parts[1]).len(), 2);
        assert_eq!(cols(&w, &parts[0]), vec![0, 1, 2]);

        let m = map(160.0, "[160, 20], [150, 0]");
        let w = generate_waypoints(&m);
        let parts = partition(&m, &w, 2).unwrap();
        // drone 1's station is further west, so it takes the low side
        assert_eq!(cols(&w, &parts[1]), vec![0, 1]);
        assert_eq!(cols(&w, &parts[0]), vec![2, 3, 4]);
    }

    #[test]
    fn drone_count_errors() {
        let m = map(120.0, "[0, 20]");
        let w = generate_waypoints(&m);
        assert!(matches!(
            partition(&m, &w, 2),
            Err(Error::TooManyDrones { drones: 2, stations: 1 })
        ));
        assert!(matches!(partition(&m, &w, 3), Err(Error::DroneCount(3))));
    }

    #[test]
    fn separated_halves_share_altitude() {
        let m = map(120.0, "[0, 20], [120, 20]");
        let w = generate_waypoints(&m);
        let plan = plan_fleet(&m, &w, &EnergyModel::default(), &Planner::BackAndForth, 2).unwrap();
        assert!(!plan.has_crossing());
        assert!(plan.drones.iter().all(|d| d.altitude_m == BASE_ALTITUDE_M));
        assert!(plan.is_valid());
    }

    #[test]
    fn crossing_tracks_get_separate_altitudes() {
        // Both stations on the far east edge: the west drone's legs cross the east drone's.
        let m = map(120.0, "[120, 20], [110, 40]");
        let w = generate_waypoints(&m);
        let plan = plan_fleet(&m, &w, &EnergyModel::default(), &Planner::BackAndForth, 2).unwrap();
        assert!(plan.has_crossing());
        let alts: Vec<f64> = plan.drones.iter().map(|d| d.altitude_m).collect();
        assert_eq!(alts, vec![BASE_ALTITUDE_M, SEPARATED_ALTITUDE_M]);
    }

    #[test]
    fn single_drone_altitude() {
        let m = map(120.0, "[0, 20]");
        let w = generate_waypoints(&m);
        let plan = plan_fleet(&m, &w, &EnergyModel::default(), &Planner::BackAndForth, 1).unwrap();
        assert_eq!(plan.drones.len(), 1);
        assert_eq!(plan.drones[0].altitude_m, BASE_ALTITUDE_M);
    }
}
