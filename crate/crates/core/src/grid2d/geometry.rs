//! Finite subsets of the integer lattice, cores and invariance defects.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

impl std::ops::Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

/// Axis-aligned rectangle `[x, x+width) x [y, y+height)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: i64, y: i64, width: usize, height: usize) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn square(x: i64, y: i64, side: usize) -> Self {
        Rect::new(x, y, side, side)
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn x_end(&self) -> i64 {
        self.x + self.width as i64
    }

    pub fn y_end(&self) -> i64 {
        self.y + self.height as i64
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.y >= self.y && p.x < self.x_end() && p.y < self.y_end()
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        r.x >= self.x && r.y >= self.y && r.x_end() <= self.x_end() && r.y_end() <= self.y_end()
    }

    /// Points in canonical (lexicographic) order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.x..self.x_end()).flat_map(move |x| (self.y..self.y_end()).map(move |y| Point::new(x, y)))
    }

    pub fn to_shape(&self) -> Shape {
        Shape {
            points: self.points().collect(),
        }
    }
}

/// A finite set of lattice points, kept sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    points: Vec<Point>,
}

impl Shape {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Self {
        let mut points: Vec<Point> = points.into_iter().collect();
        points.sort_unstable();
        points.dedup();
        Shape { points }
    }

    /// `[0, width) x [0, height)`.
    pub fn rect(width: usize, height: usize) -> Self {
        Rect::new(0, 0, width, height).to_shape()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn translate(&self, by: Point) -> Shape {
        Shape {
            points: self.points.iter().map(|&p| p + by).collect(),
        }
    }

    /// Smallest rectangle containing the shape; `None` when empty.
    pub fn bounding_rect(&self) -> Option<Rect> {
        let first = self.points.first()?;
        let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
        for p in &self.points {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        Some(Rect::new(x0, y0, (x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize))
    }

    /// `{k + f : k in K, f in F}`.
    pub fn sum(&self, other: &Shape) -> Shape {
        Shape::new(
            self.points
                .iter()
                .flat_map(|&a| other.points.iter().map(move |&b| a + b)),
        )
    }

    pub fn union(&self, other: &Shape) -> Shape {
        Shape::new(self.points.iter().chain(&other.points).copied())
    }

    pub fn difference(&self, other: &Shape) -> Shape {
        Shape {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| !other.contains(*p))
                .collect(),
        }
    }

    pub fn symmetric_difference_len(&self, other: &Shape) -> usize {
        self.difference(other).len() + other.difference(self).len()
    }
}

/// `{g in F : K + g is contained in F}`.
pub fn core(f: &Shape, k: &Shape) -> Shape {
    let lookup: HashSet<Point> = f.points.iter().copied().collect();
    Shape {
        points: f
            .points
            .iter()
            .copied()
            .filter(|&g| k.points.iter().all(|&kp| lookup.contains(&(kp + g))))
            .collect(),
    }
}

/// `|F △ (K + F)| / |F|`.
pub fn invariance_defect(f: &Shape, k: &Shape) -> Result<Rational> {
    if f.is_empty() {
        return Err(Error::InvalidParams("empty set has no invariance defect".into()));
    }
    let kf = k.sum(f);
    Ok(ratio(f.symmetric_difference_len(&kf) as u64, f.len() as u64))
}

/// `|A △ B| / |B|`; `A` is an ε-modification of `B` when this is below ε.
pub fn modification_distance(a: &Shape, b: &Shape) -> Result<Rational> {
    if b.is_empty() {
        return Err(Error::InvalidParams("reference set is empty".into()));
    }
    Ok(ratio(a.symmetric_difference_len(b) as u64, b.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn domino() -> Shape {
        Shape::new([Point::ORIGIN, Point::new(1, 0)])
    }

    #[test]
    fn core_examples() {
        let f = Shape::rect(10, 10);
        assert_eq!(core(&f, &Shape::new([Point::ORIGIN])), f);
        let c = core(&f, &domino());
        assert_eq!(c.len(), 90);
        assert_eq!(c, Shape::rect(9, 10));
        assert!(core(&f, &Shape::rect(11, 1)).is_empty());
    }

    #[test]
    fn defect_examples() {
        let f = Shape::rect(10, 10);
        assert_eq!(invariance_defect(&f, &Shape::new([Point::ORIGIN])).unwrap(), int(0));
        assert_eq!(invariance_defect(&f, &domino()).unwrap(), ratio(1, 10));
    }

    #[test]
    fn modification_examples() {
        let b = Shape::rect(10, 10);
        assert_eq!(modification_distance(&b, &b).unwrap(), int(0));
        let a = Shape::new(b.points()[5..].iter().copied());
        assert_eq!(modification_distance(&a, &b).unwrap(), ratio(5, 100));
        // The reverse direction is within ε/(1-ε).
        let back = modification_distance(&b, &a).unwrap();
        let eps = ratio(5, 100);
        assert!(back <= &eps / (int(1) - &eps));
    }
}
