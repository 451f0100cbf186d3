//! SVG map/tour rendering and flight-path export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::energy::{path_totals, EnergyModel, Tour};
use crate::error::{Error, Result};
use crate::fleet::FleetPlan;
use crate::geometry::{Obstacle, Point2D};
use crate::harness::SCHEMA_VERSION;
use crate::routegraph::RouteGraph;
use crate::world::{FarmMap, WaypointSet};

struct Style {
    margin: f64,
    perimeter: &'static str,
    obstacle_fill: &'static str,
    obstacle_stroke: &'static str,
    station: &'static str,
    waypoint: &'static str,
    invalid_waypoint: &'static str,
    waypoint_radius: f64,
    station_radius: f64,
    tour_width: f64,
    tours: [(&'static str, &'static str); 4],
}

const STYLE: Style = Style {
    margin: 10.0,
    perimeter: "#f28c28",
    obstacle_fill: "#4a78c2",
    obstacle_stroke: "#2b4f8a",
    station: "#f28c28",
    waypoint: "#222222",
    invalid_waypoint: "#bbbbbb",
    waypoint_radius: 1.6,
    station_radius: 5.0,
    tour_width: 1.2,
    // (stroke color, dash pattern)
    tours: [
        ("#c0392b", "none"),
        ("#27ae60", "6 3"),
        ("#8e44ad", "2 2"),
        ("#16a085", "8 2 2 2"),
    ],
};

fn star_points(c: Point2D, r: f64) -> String {
    (0..10)
        .map(|k| {
            let radius = if k % 2 == 0 { r } else { r * 0.45 };
            let a = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 5.0;
            format!("{:.3},{:.3}", c.x + radius * a.cos(), c.y + radius * a.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One polyline per path. Coordinates are meters; the drawing group flips y
/// so north is up.
pub fn render_svg(map: &FarmMap, waypoints: &WaypointSet, paths: &[Vec<Point2D>]) -> String {
    let per = map.perimeter();
    let m = STYLE.margin;
    let (x0, y0) = (per.min.x - m, per.min.y - m);
    let (w, h) = (per.width() + 2.0 * m, per.height() + 2.0 * m);
    let flip = per.min.y + per.max.y;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x0} {y0} {w} {h}" width="{w}" height="{h}">"#
    );
    let _ = writeln!(s, "<defs>");
    for (k, (color, _)) in STYLE.tours.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<marker id="arrow{k}" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{color}"/></marker>"#
        );
    }
    let _ = writeln!(s, "</defs>");
    let _ = writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {flip})">"#);
    let _ = writeln!(
        s,
        r#"<rect class="perimeter" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
        per.min.x,
        per.min.y,
        per.width(),
        per.height(),
        STYLE.perimeter
    );
    for obs in map.obstacles() {
        match *obs {
            Obstacle::Circle { center, radius } => {
                let _ = writeln!(
                    s,
                    r#"<circle class="obstacle" cx="{}" cy="{}" r="{radius}" fill="{}" stroke="{}"/>"#,
                    center.x, center.y, STYLE.obstacle_fill, STYLE.obstacle_stroke
                );
            }
            Obstacle::Rect { min, max } => {
                let _ = writeln!(
                    s,
                    r#"<rect class="obstacle" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}"/>"#,
                    min.x,
                    min.y,
                    max.x - min.x,
                    max.y - min.y,
                    STYLE.obstacle_fill,
                    STYLE.obstacle_stroke
                );
            }
        }
    }
    for (p, valid) in waypoints.points().iter().zip(waypoints.valid_mask()) {
        let (class, fill) = if *valid {
            ("waypoint", STYLE.waypoint)
        } else {
            ("waypoint invalid", STYLE.invalid_waypoint)
        };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            p.x, p.y, STYLE.waypoint_radius
        );
    }
    for (k, path) in paths.iter().enumerate() {
        let (color, dash) = STYLE.tours[k % STYLE.tours.len()];
        let marker = k % STYLE.tours.len();
        let pts = path
            .iter()
            .map(|p| format!("{},{}", p.x, p.y))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            s,
            r#"<polyline class="tour" data-drone="{k}" points="{pts}" fill="none" stroke="{color}" stroke-width="{}" stroke-dasharray="{dash}" marker-mid="url(#arrow{marker})" marker-end="url(#arrow{marker})"/>"#,
            STYLE.tour_width
        );
    }
    for st in map.stations() {
        let _ = writeln!(
            s,
            r#"<polygon class="station" points="{}" fill="{}" stroke="black" stroke-width="0.4"/>"#,
            star_points(*st, STYLE.station_radius),
            STYLE.station
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

/// Render every drone of a fleet plan.
pub fn render_fleet(map: &FarmMap, waypoints: &WaypointSet, plan: &FleetPlan) -> String {
    let paths: Vec<Vec<Point2D>> = plan
        .drones
        .iter()
        .map(|d| d.tour.points(&d.graph))
        .collect();
    render_svg(map, waypoints, &paths)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathPoint {
    pub x: f64,
    pub y: f64,
    pub altitude_m: f64,
}

/// Flight-controller hand-off for one drone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDocument {
    pub schema: u32,
    pub altitude_m: f64,
    pub cost_kj: f64,
    pub distance_m: f64,
    pub turn_deg: f64,
    pub is_valid: bool,
    pub waypoints: Vec<PathPoint>,
}

impl PathDocument {
    pub fn points(&self) -> Vec<Point2D> {
        self.waypoints.iter().map(|p| Point2D::new(p.x, p.y)).collect()
    }

    /// Cost of the stored waypoint sequence under `model`.
    pub fn recompute_cost(&self, model: &EnergyModel) -> f64 {
        let t = path_totals(&self.points());
        model.cost(t.distance_m, t.turn_deg)
    }
}

/// A whole plan: one path document per drone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightPlanDocument {
    pub schema: u32,
    pub drones: Vec<PathDocument>,
}

impl FlightPlanDocument {
    pub fn from_fleet(plan: &FleetPlan) -> Result<Self> {
        Ok(Self {
            schema: SCHEMA_VERSION,
            drones: plan
                .drones
                .iter()
                .map(|d| export_path(&d.tour, &d.graph, d.altitude_m))
                .collect::<Result<_>>()?,
        })
    }

    pub fn paths(&self) -> Vec<Vec<Point2D>> {
        self.drones.iter().map(PathDocument::points).collect()
    }
}

pub fn export_path(tour: &Tour, g: &RouteGraph, altitude_m: f64) -> Result<PathDocument> {
    let waypoints = tour
        .nodes
        .iter()
        .map(|n| match g.node(n.index) {
            Some(node) if node.id == *n => Ok(PathPoint {
                x: node.pos.x,
                y: node.pos.y,
                altitude_m,
            }),
            _ => Err(Error::UnknownNode(n.index)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathDocument {
        schema: SCHEMA_VERSION,
        altitude_m,
        cost_kj: tour.cost_kj,
        distance_m: tour.total_distance_m,
        turn_deg: tour.total_turn_deg,
        is_valid: tour.is_valid,
        waypoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::plan_back_and_forth;
    use crate::routegraph::{NodeId, NodeKind};
    use crate::world::{generate_waypoints, load_map};

    fn small() -> (FarmMap, WaypointSet, RouteGraph) {
        let m = load_map(
            r#"{"perimeter": {"min": [0, 0], "max": [30, 30]},
                "obstacles": [], "stations": [[20, 20]],
                "clearance_m": 10, "grid_spacing_m": 38}"#,
        )
        .unwrap();
        let w = generate_waypoints(&m);
        let g = RouteGraph::build(&m, &w, 0).unwrap();
        (m, w, g)
    }

    #[test]
    fn perimeter_only_when_nothing_planned() {
        let (m, w, _) = small();
        let svg = render_svg(&m, &w, &[]);
        assert!(svg.contains(r#"class="perimeter""#));
        assert!(!svg.contains("<polyline"));
        assert!(!svg.contains(r#"class="obstacle""#));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn export_out_and_back() {
        let (_, w, g) = small();
        let t = plan_back_and_forth(&g, &EnergyModel::default(), &w).unwrap();
        let doc = export_path(&t, &g, 30.0).unwrap();
        assert_eq!(doc.waypoints.len(), 3);
        assert!(doc.waypoints.iter().all(|p| p.altitude_m == 30.0));
        assert_eq!(doc.cost_kj, t.cost_kj);
        assert_eq!(doc.schema, 1);
        let text = serde_json::to_string(&doc).unwrap();
        let back: PathDocument = serde_json::from_str(&text).unwrap();
        let again = back.recompute_cost(&EnergyModel::default());
        assert!((again - t.cost_kj).abs() <= 1e-9 * t.cost_kj);
    }

    #[test]
    fn export_rejects_foreign_nodes() {
        let (_, w, g) = small();
        let mut t = plan_back_and_forth(&g, &EnergyModel::default(), &w).unwrap();
        t.nodes.push(NodeId {
            index: 7,
            kind: NodeKind::Waypoint,
        });
        assert!(matches!(export_path(&t, &g, 20.0), Err(Error::UnknownNode(7))));
    }
}
