use thiserror::Error;

use crate::geometry::Point2D;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A map or config document does not match its schema. `path` names the
    /// offending field (`obstacles[1].radius`, `grid_spacing_m`, ...).
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("station violates clearance: stations[{index}] at ({x}, {y}) {reason}")]
    StationClearance {
        index: usize,
        x: f64,
        y: f64,
        reason: String,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("no valid waypoints to cover")]
    NoValidWaypoints,

    #[error("station index {index} out of range ({count} stations)")]
    UnknownStation { index: usize, count: usize },

    #[error("graph disconnected from home: {} unreachable waypoint(s): {}", .unreachable.len(), format_points(.unreachable))]
    Disconnected { unreachable: Vec<Point2D> },

    #[error("no path between nodes {from} and {to}")]
    NoPath { from: usize, to: usize },

    #[error("nodes {from} and {to} are not adjacent")]
    NotAdjacent { from: usize, to: usize },

    #[error("node {0} is not part of the route graph")]
    UnknownNode(usize),

    #[error("more drones than stations ({drones} drones, {stations} stations)")]
    TooManyDrones { drones: usize, stations: usize },

    #[error("unsupported drone count {0} (1 or 2)")]
    DroneCount(usize),

    #[error("partition leaves drone {0} without waypoints")]
    EmptySubArea(usize),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

fn format_points(points: &[Point2D]) -> String {
    points
        .iter()
        .map(|p| format!("({}, {})", p.x, p.y))
        .collect::<Vec<_>>()
        .join(", ")
}
