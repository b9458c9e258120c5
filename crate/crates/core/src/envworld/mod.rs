//! Synthetic environments: occupancy grids, geodesic distances, clearance
//! geometry, floorplan generation and navigable viewpoint sampling.

mod clearance;
mod floorplan;
pub(crate) mod geodesic;
pub(crate) mod grid;
mod raster;
mod sampling;

use thiserror::Error;

pub use clearance::{line_traversable, point_has_clearance, ClearanceMap};
pub use floorplan::{generate_floorplan, FloorplanSpec, AREA_TOLERANCE, MAX_ATTEMPTS};
pub use geodesic::{geodesic_distance, DistanceField};
pub use grid::{Cell, OccupancyGrid, Point2D};
pub use raster::{parse_raster, to_raster, GRID_FORMAT_VERSION};
pub use sampling::{sample_navigable_points, SampleOutcome, DRAWS_PER_SLOT};

/// Default grid resolution, meters per cell.
pub const DEFAULT_RESOLUTION: f64 = 0.1;
/// Default agent clearance radius, meters.
pub const DEFAULT_CLEARANCE: f64 = 0.2;
/// Minimum geodesic separation between sampled viewpoints, meters.
pub const DEFAULT_MIN_GEO_SEP: f64 = 0.4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("boundary cell ({col}, {row}) is free; the world must be closed")]
    OpenBoundary { col: usize, row: usize },
    #[error("point ({x}, {y}) is outside the grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("point ({x}, {y}) is not on a free cell")]
    OnObstacle { x: f64, y: f64 },
    #[error("invalid floorplan spec: {0}")]
    InvalidSpec(String),
    #[error("floorplan constraints unsatisfied after {retries} retries: {reason}")]
    Unsatisfiable { retries: usize, reason: String },
    #[error("raster line {line}: {message}")]
    Raster { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
