//! Patterns on the integer lattice, the planar d* distance and nested grid
//! tilings.

pub mod geometry;
pub mod metric2d;
pub mod pattern;
pub mod tiling;

pub use geometry::{core, invariance_defect, modification_distance, Point, Rect, Shape};
pub use metric2d::{
    barycenter_2d, concatenation_correction_2d, d_star_2d, d_star_2d_exact, profile2d, profile2d_window, rect_shape,
    tail_bound_2d, MeasureSpec2D, Profile2D,
};
pub use pattern::{frequency2d, Pattern};
pub use tiling::{
    audit_tiles, decompose_tiles, tiles_in_window, GridTilingSystem, Region2D, Tile, TileAudit, TileSelection,
};
