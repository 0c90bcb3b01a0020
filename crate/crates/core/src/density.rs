//! Finite-window estimates of upper and lower Banach density in one and two
//! dimensions.
//!
//! The estimates fix one horizon and one observation window: the upper
//! estimate is the largest fraction of any length-`N` window inside the
//! observation window that lies in the set, the lower estimate the smallest.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid2d::Rect;
use crate::rational::{self, ratio, Rational};

/// Strictly increasing list of coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateSet {
    points: Vec<usize>,
}

impl CoordinateSet {
    pub fn new() -> Self {
        CoordinateSet::default()
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        CoordinateSet { points }
    }

    pub fn from_ranges<I: IntoIterator<Item = Range<usize>>>(ranges: I) -> Self {
        CoordinateSet::from_unsorted(ranges.into_iter().flatten().collect())
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &CoordinateSet) -> CoordinateSet {
        let mut all = self.points.clone();
        all.extend_from_slice(&other.points);
        CoordinateSet::from_unsorted(all)
    }

    /// Coordinates of `window` not in the set.
    pub fn complement(&self, window: Range<usize>) -> CoordinateSet {
        CoordinateSet {
            points: window.filter(|p| !self.contains(*p)).collect(),
        }
    }

    /// Maximal runs of consecutive coordinates as `[start, end)` pairs.
    pub fn spans(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.points {
            match out.last_mut() {
                Some(last) if last.1 == p => last.1 += 1,
                _ => out.push((p, p + 1)),
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    #[serde(with = "rational::as_string")]
    pub value: Rational,
    pub horizon: usize,
    /// `[lo, hi)` in 1D; `[x0, y0, width, height]` in 2D.
    pub window: Vec<usize>,
    pub mode: DensityMode,
}

impl DensityEstimate {
    pub fn as_f64(&self) -> f64 {
        rational::to_f64(&self.value)
    }
}

/// Counts of the set in every length-`horizon` window of `window`, in order.
fn window_counts(a: &CoordinateSet, horizon: usize, window: &Range<usize>) -> Result<Vec<u64>> {
    let size = window.len();
    if horizon == 0 {
        return Err(Error::InvalidParams("horizon must be at least 1".into()));
    }
    if horizon > size {
        return Err(Error::HorizonExceedsWindow {
            horizon,
            window: size,
        });
    }
    let mut inside = vec![false; size];
    for &p in a.points() {
        if window.contains(&p) {
            inside[p - window.start] = true;
        }
    }
    let mut count = inside[..horizon].iter().filter(|&&b| b).count() as u64;
    let mut out = Vec::with_capacity(size - horizon + 1);
    out.push(count);
    for i in horizon..size {
        count += u64::from(inside[i]);
        count -= u64::from(inside[i - horizon]);
        out.push(count);
    }
    Ok(out)
}

fn estimate(
    a: &CoordinateSet,
    horizon: usize,
    window: Range<usize>,
    mode: DensityMode,
) -> Result<DensityEstimate> {
    let counts = window_counts(a, horizon, &window)?;
    let best = match mode {
        DensityMode::Upper => counts.iter().max(),
        DensityMode::Lower => counts.iter().min(),
    };
    Ok(DensityEstimate {
        value: ratio(*best.unwrap(), horizon as u64),
        horizon,
        window: vec![window.start, window.end],
        mode,
    })
}

pub fn upper_estimate(a: &CoordinateSet, horizon: usize, window: Range<usize>) -> Result<DensityEstimate> {
    estimate(a, horizon, window, DensityMode::Upper)
}

pub fn lower_estimate(a: &CoordinateSet, horizon: usize, window: Range<usize>) -> Result<DensityEstimate> {
    estimate(a, horizon, window, DensityMode::Lower)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub horizon: usize,
    pub upper: f64,
    pub lower: f64,
}

/// Upper and lower estimates for each horizon.
pub fn density_curve(a: &CoordinateSet, horizons: &[usize], window: Range<usize>) -> Result<Vec<CurveRow>> {
    horizons
        .iter()
        .map(|&h| {
            let counts = window_counts(a, h, &window)?;
            Ok(CurveRow {
                horizon: h,
                upper: *counts.iter().max().unwrap() as f64 / h as f64,
                lower: *counts.iter().min().unwrap() as f64 / h as f64,
            })
        })
        .collect()
}

/// A set of lattice points, stored as a mask over a bounding rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet2D {
    bounds: Rect,
    mask: Vec<bool>,
}

impl PointSet2D {
    pub fn empty(bounds: Rect) -> Self {
        PointSet2D {
            bounds,
            mask: vec![false; bounds.area()],
        }
    }

    pub fn full(bounds: Rect) -> Self {
        PointSet2D {
            bounds,
            mask: vec![true; bounds.area()],
        }
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    fn offset(&self, x: i64, y: i64) -> Option<usize> {
        let b = self.bounds;
        if x < b.x || y < b.y || x >= b.x + b.width as i64 || y >= b.y + b.height as i64 {
            return None;
        }
        Some((y - b.y) as usize * b.width + (x - b.x) as usize)
    }

    /// Points outside the bounds are ignored.
    pub fn insert(&mut self, x: i64, y: i64) {
        if let Some(o) = self.offset(x, y) {
            self.mask[o] = true;
        }
    }

    pub fn insert_rect(&mut self, r: Rect) {
        for y in r.y..r.y + r.height as i64 {
            for x in r.x..r.x + r.width as i64 {
                self.insert(x, y);
            }
        }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.offset(x, y).is_some_and(|o| self.mask[o])
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn complement(&self) -> PointSet2D {
        PointSet2D {
            bounds: self.bounds,
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }
}

/// Counts of the set in every `side x side` square inside `window`.
fn square_counts(a: &PointSet2D, side: usize, window: Rect) -> Result<Vec<u64>> {
    if side == 0 {
        return Err(Error::InvalidParams("side must be at least 1".into()));
    }
    if side > window.width || side > window.height {
        return Err(Error::HorizonExceedsWindow {
            horizon: side,
            window: window.width.min(window.height),
        });
    }
    let (w, h) = (window.width, window.height);
    // Summed-area table with a zero border.
    let mut sat = vec![0u64; (w + 1) * (h + 1)];
    for yy in 0..h {
        let mut row = 0u64;
        for xx in 0..w {
            row += u64::from(a.contains(window.x + xx as i64, window.y + yy as i64));
            sat[(yy + 1) * (w + 1) + xx + 1] = sat[yy * (w + 1) + xx + 1] + row;
        }
    }
    let at = |x: usize, y: usize| sat[y * (w + 1) + x];
    let mut out = Vec::with_capacity((w - side + 1) * (h - side + 1));
    for y in 0..=h - side {
        for x in 0..=w - side {
            out.push(at(x + side, y + side) + at(x, y) - at(x + side, y) - at(x, y + side));
        }
    }
    Ok(out)
}

fn estimate_2d(a: &PointSet2D, side: usize, window: Rect, mode: DensityMode) -> Result<DensityEstimate> {
    let counts = square_counts(a, side, window)?;
    let best = match mode {
        DensityMode::Upper => counts.iter().max(),
        DensityMode::Lower => counts.iter().min(),
    };
    Ok(DensityEstimate {
        value: ratio(*best.unwrap(), (side * side) as u64),
        horizon: side,
        window: vec![window.x as usize, window.y as usize, window.width, window.height],
        mode,
    })
}

pub fn upper_estimate_2d(a: &PointSet2D, side: usize, window: Rect) -> Result<DensityEstimate> {
    estimate_2d(a, side, window, DensityMode::Upper)
}

pub fn lower_estimate_2d(a: &PointSet2D, side: usize, window: Rect) -> Result<DensityEstimate> {
    estimate_2d(a, side, window, DensityMode::Lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn one_dimensional_examples() {
        let evens = CoordinateSet::from_unsorted((0..100).step_by(2).collect());
        assert_eq!(upper_estimate(&evens, 10, 0..100).unwrap().value, ratio(1, 2));
        assert_eq!(lower_estimate(&evens, 10, 0..100).unwrap().value, ratio(1, 2));
        let block = CoordinateSet::from_ranges(std::iter::once(0..10));
        assert_eq!(upper_estimate(&block, 10, 0..100).unwrap().value, int(1));
        let all = CoordinateSet::from_ranges(std::iter::once(0..100));
        assert_eq!(lower_estimate(&all, 7, 0..100).unwrap().value, int(1));
        assert!(matches!(
            upper_estimate(&all, 101, 0..100),
            Err(Error::HorizonExceedsWindow { .. })
        ));
    }

    #[test]
    fn window_restricts_set() {
        let a = CoordinateSet::from_ranges(std::iter::once(0..50));
        let e = upper_estimate(&a, 10, 60..100).unwrap();
        assert_eq!(e.value, int(0));
        assert_eq!(e.window, vec![60, 100]);
    }

    #[test]
    fn spans_and_complement() {
        let a = CoordinateSet::from_unsorted(vec![5, 1, 2, 3, 9, 2]);
        assert_eq!(a.spans(), vec![(1, 4), (5, 6), (9, 10)]);
        assert_eq!(a.complement(0..6).points(), &[0, 4]);
    }

    #[test]
    fn two_dimensional_examples() {
        let window = Rect::new(0, 0, 100, 100);
        assert_eq!(
            upper_estimate_2d(&PointSet2D::full(window), 10, window).unwrap().value,
            int(1)
        );
        let mut line = PointSet2D::empty(window);
        line.insert_rect(Rect::new(0, 37, 100, 1));
        assert_eq!(upper_estimate_2d(&line, 10, window).unwrap().value, ratio(1, 10));
        assert_eq!(lower_estimate_2d(&line, 10, window).unwrap().value, int(0));
    }

    #[test]
    fn curve_rows() {
        let evens = CoordinateSet::from_unsorted((0..20).step_by(2).collect());
        let rows = density_curve(&evens, &[1, 2, 3], 0..20).unwrap();
        assert_eq!(rows[0].upper, 1.0);
        assert_eq!(rows[0].lower, 0.0);
        assert_eq!(rows[1].upper, 0.5);
        assert!((rows[2].upper - 2.0 / 3.0).abs() < 1e-12);
    }
}
