//! Plain-text raster format for occupancy grids.
//!
//! ```text
//! VLNGRID 1
//! scene_id <id>
//! width <cols>
//! height <rows>
//! resolution <meters per cell>
//! <height lines of width characters: '#' obstacle, '.' free; row 0 first>
//! ```

use std::fmt::Write as _;

use super::grid::{Cell, OccupancyGrid};
use super::EnvError;

pub const GRID_MAGIC: &str = "VLNGRID";
pub const GRID_FORMAT_VERSION: u32 = 1;

pub fn to_raster(grid: &OccupancyGrid) -> String {
    let mut out = String::with_capacity(grid.len() + grid.height() + 96);
    let _ = writeln!(out, "{GRID_MAGIC} {GRID_FORMAT_VERSION}");
    let _ = writeln!(out, "scene_id {}", grid.scene_id());
    let _ = writeln!(out, "width {}", grid.width());
    let _ = writeln!(out, "height {}", grid.height());
    let _ = writeln!(out, "resolution {}", grid.resolution());
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            out.push(match grid.cell(col, row) {
                Cell::Free => '.',
                Cell::Obstacle => '#',
            });
        }
        out.push('\n');
    }
    out
}

pub fn parse_raster(text: &str) -> Result<OccupancyGrid, EnvError> {
    let err = |line: usize, message: String| EnvError::Raster { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut field = |name: &str| -> Result<(usize, String), EnvError> {
        let (n, line) = lines.next().ok_or_else(|| err(0, format!("missing `{name}` line")))?;
        let mut parts = line.splitn(2, ' ');
        let key = parts.next().unwrap_or_default();
        if key != name {
            return Err(err(n, format!("expected `{name}`, found `{key}`")));
        }
        Ok((n, parts.next().unwrap_or_default().to_string()))
    };

    let (n, version) = field(GRID_MAGIC)?;
    if version.trim() != GRID_FORMAT_VERSION.to_string() {
        return Err(err(n, format!("unsupported grid format version `{version}`")));
    }
    let (_, scene_id) = field("scene_id")?;
    let (n, width) = field("width")?;
    let width: usize = width.parse().map_err(|e| err(n, format!("width: {e}")))?;
    let (n, height) = field("height")?;
    let height: usize = height.parse().map_err(|e| err(n, format!("height: {e}")))?;
    let (n, resolution) = field("resolution")?;
    let resolution: f64 = resolution.parse().map_err(|e| err(n, format!("resolution: {e}")))?;

    let mut cells = Vec::with_capacity(width * height);
    for _ in 0..height {
        let (n, line) = lines.next().ok_or_else(|| err(0, "raster body is truncated".into()))?;
        if line.chars().count() != width {
            return Err(err(n, format!("expected {width} cells, found {}", line.chars().count())));
        }
        for ch in line.chars() {
            cells.push(match ch {
                '.' => Cell::Free,
                '#' => Cell::Obstacle,
                other => return Err(err(n, format!("unknown cell character {other:?}"))),
            });
        }
    }
    if let Some((n, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(err(n, format!("trailing content `{extra}`")));
    }
    OccupancyGrid::new(scene_id, width, height, resolution, cells)
}
