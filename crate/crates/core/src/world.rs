//! Farm map model, map-file loading, and the waypoint grid.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_clearance, Obstacle, Point2D};

pub const DEFAULT_CLEARANCE_M: f64 = 10.0;
pub const DEFAULT_GRID_SPACING_M: f64 = 38.0;

const REFERENCE_FARM: &str = include_str!("../data/reference_farm.json");

/// Grid fitting tolerance, so 76/38 counts as exactly two steps.
const FIT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perimeter {
    pub min: Point2D,
    pub max: Point2D,
}

impl Perimeter {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Point2D) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// True when the x axis is the long axis (ties count as x).
    pub fn x_is_long_axis(&self) -> bool {
        self.width() >= self.height()
    }
}

/// The planning world: perimeter, obstacles, charging stations and the two
/// tunables that shape the solution space.
#[derive(Debug, Clone, PartialEq)]
pub struct FarmMap {
    perimeter: Perimeter,
    obstacles: Vec<Obstacle>,
    stations: Vec<Point2D>,
    clearance_m: f64,
    grid_spacing_m: f64,
}

impl FarmMap {
    pub fn new(
        perimeter: Perimeter,
        obstacles: Vec<Obstacle>,
        stations: Vec<Point2D>,
        clearance_m: f64,
        grid_spacing_m: f64,
    ) -> Result<Self> {
        if !perimeter.min.is_finite() || !perimeter.max.is_finite() {
            return Err(Error::schema("perimeter", "coordinates must be finite"));
        }
        if perimeter.width() <= 0.0 || perimeter.height() <= 0.0 {
            return Err(Error::schema(
                "perimeter",
                "max must exceed min in both axes (positive area)",
            ));
        }
        if !(clearance_m.is_finite() && clearance_m >= 0.0) {
            return Err(Error::schema("clearance_m", "must be a finite number >= 0"));
        }
        if !(grid_spacing_m.is_finite() && grid_spacing_m > 0.0) {
            return Err(Error::schema("grid_spacing_m", "must be a finite number > 0"));
        }
        if stations.is_empty() {
            return Err(Error::schema("stations", "at least one station is required"));
        }
        for (index, s) in stations.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::schema(format!("stations[{index}]"), "must be finite"));
            }
            if !perimeter.contains(*s) {
                return Err(Error::StationClearance {
                    index,
                    x: s.x,
                    y: s.y,
                    reason: "lies outside the perimeter".into(),
                });
            }
            for (k, obs) in obstacles.iter().enumerate() {
                let c = point_clearance(*s, obs);
                if c < clearance_m || c == 0.0 {
                    return Err(Error::StationClearance {
                        index,
                        x: s.x,
                        y: s.y,
                        reason: format!(
                            "is {c} m from obstacles[{k}], below clearance {clearance_m} m"
                        ),
                    });
                }
            }
        }
        Ok(Self {
            perimeter,
            obstacles,
            stations,
            clearance_m,
            grid_spacing_m,
        })
    }

    pub fn perimeter(&self) -> &Perimeter {
        &self.perimeter
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn stations(&self) -> &[Point2D] {
        &self.stations
    }

    pub fn clearance_m(&self) -> f64 {
        self.clearance_m
    }

    pub fn grid_spacing_m(&self) -> f64 {
        self.grid_spacing_m
    }

    /// Copy with a different clearance, re-validated.
    pub fn with_clearance(&self, clearance_m: f64) -> Result<Self> {
        Self::new(
            self.perimeter,
            self.obstacles.clone(),
            self.stations.clone(),
            clearance_m,
            self.grid_spacing_m,
        )
    }

    /// Copy with a different grid spacing, re-validated.
    pub fn with_spacing(&self, grid_spacing_m: f64) -> Result<Self> {
        Self::new(
            self.perimeter,
            self.obstacles.clone(),
            self.stations.clone(),
            self.clearance_m,
            grid_spacing_m,
        )
    }

    /// Smallest distance from `p` to any obstacle (infinite with no obstacles).
    pub fn clearance_at(&self, p: Point2D) -> f64 {
        self.obstacles
            .iter()
            .map(|o| point_clearance(p, o))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument {
            perimeter: self.perimeter,
            obstacles: self.obstacles.iter().map(ObstacleDoc::from).collect(),
            stations: self.stations.clone(),
            clearance_m: self.clearance_m,
            grid_spacing_m: self.grid_spacing_m,
        }
    }
}

/// On-disk map schema. Unknown fields are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub perimeter: Perimeter,
    pub obstacles: Vec<ObstacleDoc>,
    pub stations: Vec<Point2D>,
    pub clearance_m: f64,
    pub grid_spacing_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ObstacleDoc {
    #[serde(rename = "circle")]
    Circle { center: Point2D, radius: f64 },
    #[serde(rename = "rect")]
    Rect { min: Point2D, max: Point2D },
}

impl From<&Obstacle> for ObstacleDoc {
    fn from(o: &Obstacle) -> Self {
        match *o {
            Obstacle::Circle { center, radius } => ObstacleDoc::Circle { center, radius },
            Obstacle::Rect { min, max } => ObstacleDoc::Rect { min, max },
        }
    }
}

impl MapDocument {
    pub fn into_map(self) -> Result<FarmMap> {
        let obstacles = self
            .obstacles
            .into_iter()
            .enumerate()
            .map(|(k, doc)| {
                match doc {
                    ObstacleDoc::Circle { center, radius } => Obstacle::circle(center, radius),
                    ObstacleDoc::Rect { min, max } => Obstacle::rect(min, max),
                }
                .map_err(|e| Error::schema(format!("obstacles[{k}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        FarmMap::new(
            self.perimeter,
            obstacles,
            self.stations,
            self.clearance_m,
            self.grid_spacing_m,
        )
    }
}

/// Parse and validate a JSON map document.
pub fn load_map(document: &str) -> Result<FarmMap> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: MapDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner().to_string())
    })?;
    doc.into_map()
}

pub fn load_map_file(path: impl AsRef<Path>) -> Result<FarmMap> {
    load_map(&std::fs::read_to_string(path)?)
}

/// The shipped reference farm: a 300 m x 175 m field with three trees, a
/// house, a greenhouse and two charging stations beside the house.
pub fn reference_farm() -> FarmMap {
    load_map(REFERENCE_FARM).expect("bundled reference farm is valid")
}

pub fn reference_farm_json() -> &'static str {
    REFERENCE_FARM
}

/// Grid coordinates of a waypoint: `row` counts along y, `col` along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub row: usize,
    pub col: usize,
}

/// Row-major grid of candidate waypoints with their validity.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointSet {
    points: Vec<Point2D>,
    valid: Vec<bool>,
    grid: Vec<GridIndex>,
    rows: usize,
    cols: usize,
}

impl WaypointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn grid_index(&self, k: usize) -> GridIndex {
        self.grid[k]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn point(&self, k: usize) -> Point2D {
        self.points[k]
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.valid[k]
    }

    /// Index of the waypoint at (row, col).
    pub fn index_of(&self, at: GridIndex) -> Option<usize> {
        (at.row < self.rows && at.col < self.cols).then(|| at.row * self.cols + at.col)
    }

    pub fn valid_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.valid[k]).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

fn steps_that_fit(extent: f64, spacing: f64) -> usize {
    (extent / spacing + FIT_EPS).floor() as usize + 1
}

/// Lay the waypoint grid over the perimeter and mark which points keep the
/// required clearance from every obstacle.
pub fn generate_waypoints(map: &FarmMap) -> WaypointSet {
    let per = map.perimeter();
    let s = map.grid_spacing_m();
    let cols = steps_that_fit(per.width(), s);
    let rows = steps_that_fit(per.height(), s);
    let mut points = Vec::with_capacity(rows * cols);
    let mut valid = Vec::with_capacity(rows * cols);
    let mut grid = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            let p = Point2D::new(per.min.x + col as f64 * s, per.min.y + row as f64 * s);
            let c = map.clearance_at(p);
            points.push(p);
            valid.push(c >= map.clearance_m() && c > 0.0);
            grid.push(GridIndex { row, col });
        }
    }
    WaypointSet {
        points,
        valid,
        grid,
        rows,
        cols,
    }
}
