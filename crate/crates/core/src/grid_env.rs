//! Environment geometry: continuous world bounds, the cell grid laid over
//! them, and the camera footprint that sizes the cells.
//!
//! The world frame has its origin at the lower-left corner, `x` growing to
//! the right (columns) and `y` growing upwards (rows). When an extent is not
//! an integral multiple of the cell size the last column/row is ragged: its
//! center is pulled inward so that the cell still lies inside the world, and
//! the boundary between it and its neighbour sits halfway between the two
//! centers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({x}, {y}) lies outside the {width} x {height} m environment")]
    PointOutOfBounds { x: f64, y: f64, width: f64, height: f64 },
    #[error("cell ({col}, {row}) lies outside the {cols} x {rows} grid")]
    CellOutOfBounds { col: usize, row: usize, cols: usize, rows: usize },
}

/// A point in the continuous world frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Column/row address of a grid cell. Column follows `x`, row follows `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub col: usize,
    pub row: usize,
}

impl GridIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }

    /// Number of outward rings separating two cells (king-move distance).
    pub fn chebyshev(&self, other: &GridIndex) -> usize {
        self.col.abs_diff(other.col).max(self.row.abs_diff(other.row))
    }

    pub fn is_four_neighbor(&self, other: &GridIndex) -> bool {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row) == 1
    }
}

impl std::fmt::Display for GridIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

/// Flat rectangular search area discretized into square cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    width: f64,
    height: f64,
    cell_size: f64,
    cols: usize,
    rows: usize,
}

impl Environment {
    pub fn new(width: f64, height: f64, cell_size: f64) -> Result<Self, GeometryError> {
        for (name, v) in [("width", width), ("height", height), ("cell_size", cell_size)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(GeometryError::InvalidDimension(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if cell_size > width.min(height) {
            return Err(GeometryError::InvalidDimension(format!(
                "cell_size {cell_size} exceeds the smaller extent {}",
                width.min(height)
            )));
        }
        Ok(Self {
            width,
            height,
            cell_size,
            cols: cells_along(width, cell_size),
            rows: cells_along(height, cell_size),
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn contains(&self, p: &WorldPoint) -> bool {
        p.is_finite() && (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn is_valid(&self, idx: GridIndex) -> bool {
        idx.col < self.cols && idx.row < self.rows
    }

    /// Row-major position of a cell (row 0 first).
    pub fn linear_index(&self, idx: GridIndex) -> usize {
        idx.row * self.cols + idx.col
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = GridIndex> + '_ {
        (0..self.rows).flat_map(move |row| (0..self.cols).map(move |col| GridIndex::new(col, row)))
    }

    /// The four corner cells: lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self) -> [GridIndex; 4] {
        let (c, r) = (self.cols - 1, self.rows - 1);
        [
            GridIndex::new(0, 0),
            GridIndex::new(c, 0),
            GridIndex::new(0, r),
            GridIndex::new(c, r),
        ]
    }

    pub fn world_to_cell(&self, p: WorldPoint) -> Result<GridIndex, GeometryError> {
        if !self.contains(&p) {
            return Err(GeometryError::PointOutOfBounds {
                x: p.x,
                y: p.y,
                width: self.width,
                height: self.height,
            });
        }
        Ok(GridIndex::new(
            axis_cell(p.x, self.cell_size, self.width, self.cols),
            axis_cell(p.y, self.cell_size, self.height, self.rows),
        ))
    }

    pub fn cell_center(&self, idx: GridIndex) -> Result<WorldPoint, GeometryError> {
        if !self.is_valid(idx) {
            return Err(GeometryError::CellOutOfBounds {
                col: idx.col,
                row: idx.row,
                cols: self.cols,
                rows: self.rows,
            });
        }
        Ok(WorldPoint::new(
            axis_center(idx.col, self.cell_size, self.width),
            axis_center(idx.row, self.cell_size, self.height),
        ))
    }

    /// Clamp a point into the closed world rectangle.
    pub fn clamp(&self, p: WorldPoint) -> WorldPoint {
        WorldPoint::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }
}

/// Grid with `cell_size`-sized cells covering `width` x `height`.
pub fn make_environment(width: f64, height: f64, cell_size: f64) -> Result<Environment, GeometryError> {
    Environment::new(width, height, cell_size)
}

fn cells_along(extent: f64, cell: f64) -> usize {
    let n = (extent / cell).ceil() as usize;
    // extent/cell can land a hair above an integer (e.g. 0.3/0.1, or a
    // footprint of 2 tan 45 deg that rounds just below 2)
    let n = if n > 1 && ((n - 1) as f64 * cell) >= extent * (1.0 - 1e-9) { n - 1 } else { n };
    n.max(1)
}

fn axis_center(i: usize, cell: f64, extent: f64) -> f64 {
    ((i as f64 + 0.5) * cell).min(extent - cell / 2.0)
}

fn axis_cell(v: f64, cell: f64, extent: f64, n: usize) -> usize {
    let mut i = ((v / cell).floor() as usize).min(n - 1);
    // Only the ragged final cell has a center closer than one cell pitch;
    // its lower boundary is the midpoint between the two centers.
    if i + 1 < n {
        let mid = 0.5 * (axis_center(i, cell, extent) + axis_center(i + 1, cell, extent));
        if v >= mid {
            i += 1;
        }
    }
    i
}

/// Side of the square ground footprint seen by a nadir camera.
pub fn footprint_width(altitude: f64, fov_half_angle_deg: f64) -> Result<f64, GeometryError> {
    if !altitude.is_finite() || altitude <= 0.0 {
        return Err(GeometryError::InvalidParameter(format!(
            "altitude must be positive, got {altitude}"
        )));
    }
    if !fov_half_angle_deg.is_finite() || fov_half_angle_deg <= 0.0 || fov_half_angle_deg >= 90.0 {
        return Err(GeometryError::InvalidParameter(format!(
            "FOV half-angle must lie in (0, 90) degrees, got {fov_half_angle_deg}"
        )));
    }
    Ok(2.0 * altitude * fov_half_angle_deg.to_radians().tan())
}
