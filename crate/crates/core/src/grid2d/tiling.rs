//! Nested aligned grid tilings of the plane, region tests for planar
//! patterns, maximal-tile selection and tile audits.
//!
//! Level `k` of a system with base `b` tiles the plane by the squares
//! `[0, b^k)^2` translated to multiples of `b^k`. Every level-`(k+1)` square
//! is the disjoint union of `b^2` level-`k` squares.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::PointSet2D;
use crate::error::{Error, Result};
use crate::grid2d::geometry::{Point, Rect};
use crate::grid2d::metric2d::{d_star_2d, profile2d_window, tail_bound_2d, MeasureSpec2D};
use crate::grid2d::pattern::Pattern;
use crate::metric::CylinderTable;
use crate::rational::{self, ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTilingSystem {
    pub base: usize,
}

impl Default for GridTilingSystem {
    fn default() -> Self {
        GridTilingSystem { base: 2 }
    }
}

impl GridTilingSystem {
    pub fn new(base: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParams("tiling base must be at least 2".into()));
        }
        Ok(GridTilingSystem { base })
    }

    pub fn side(&self, level: u32) -> usize {
        self.base.pow(level)
    }

    /// The level-`level` tile containing `p`.
    pub fn tile_of(&self, level: u32, p: Point) -> Tile {
        let s = self.side(level) as i64;
        Tile {
            level,
            anchor: Point::new(p.x.div_euclid(s) * s, p.y.div_euclid(s) * s),
        }
    }

    /// The `b^2` level-`(k-1)` tiles making up a level-`k` tile.
    pub fn children(&self, t: &Tile) -> Vec<Tile> {
        assert!(t.level > 0, "level-0 tiles have no children");
        let s = self.side(t.level - 1) as i64;
        let b = self.base as i64;
        let mut out = Vec::with_capacity(self.base * self.base);
        for dx in 0..b {
            for dy in 0..b {
                out.push(Tile {
                    level: t.level - 1,
                    anchor: Point::new(t.anchor.x + dx * s, t.anchor.y + dy * s),
                });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub level: u32,
    pub anchor: Point,
}

impl Tile {
    pub fn rect(&self, sys: &GridTilingSystem) -> Rect {
        Rect::square(self.anchor.x, self.anchor.y, sys.side(self.level))
    }
}

/// Level-`level` tiles lying entirely inside `window`, sorted by anchor.
pub fn tiles_in_window(sys: &GridTilingSystem, level: u32, window: Rect) -> Vec<Tile> {
    let s = sys.side(level) as i64;
    let first = |lo: i64| lo.div_euclid(s) * s + if lo.rem_euclid(s) == 0 { 0 } else { s };
    let mut out = Vec::new();
    let mut x = first(window.x);
    while x + s <= window.x_end() {
        let mut y = first(window.y);
        while y + s <= window.y_end() {
            out.push(Tile {
                level,
                anchor: Point::new(x, y),
            });
            y += s;
        }
        x += s;
    }
    out
}

/// Membership test for planar patterns.
#[derive(Clone, Debug)]
pub enum Region2D {
    MetricBall {
        specs: Vec<MeasureSpec2D>,
        radius: f64,
        depth: usize,
    },
    /// Patterns whose frequency of `symbol` is outside `[low, high]`.
    FrequencyWindow {
        symbol: String,
        low: Rational,
        high: Rational,
    },
    Union(Vec<Region2D>),
    /// `always` or `never`.
    Predicate {
        tag: String,
    },
}

impl Region2D {
    pub fn metric_ball(specs: Vec<MeasureSpec2D>, radius: f64, depth: usize) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::EmptySpecList);
        }
        let tail = tail_bound_2d(depth);
        if radius.is_nan() || radius <= tail {
            return Err(Error::RadiusBelowTail { radius, tail });
        }
        if let Some(s) = specs.iter().find(|s| s.depth() < depth) {
            return Err(Error::DepthShortfall {
                needed: depth,
                available: s.depth(),
            });
        }
        Ok(Region2D::MetricBall {
            specs,
            radius,
            depth,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Region2D::MetricBall {
                specs,
                radius,
                depth,
            } => format!("ball2d(specs={},radius={radius},depth={depth})", specs.len()),
            Region2D::FrequencyWindow { symbol, low, high } => format!(
                "freq2d({symbol}∉[{},{}])",
                rational::format(low),
                rational::format(high)
            ),
            Region2D::Union(rs) => format!(
                "union({})",
                rs.iter().map(Region2D::describe).collect::<Vec<_>>().join(",")
            ),
            Region2D::Predicate { tag } => format!("predicate({tag})"),
        }
    }

    /// Membership of the part of `field` inside `window`.
    pub fn contains_window(&self, field: &Pattern, window: Rect) -> Result<bool> {
        match self {
            Region2D::MetricBall {
                specs,
                radius,
                depth,
            } => {
                let prof = profile2d_window(field, window, *depth)?;
                for spec in specs {
                    if d_star_2d(&prof, spec, *depth)?.upper() < *radius {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Region2D::FrequencyWindow { symbol, low, high } => {
                let s = field.alphabet().index(symbol)?;
                let mut hits = 0u64;
                let mut size = 0u64;
                for p in window.points() {
                    if let Some(v) = field.get(p) {
                        size += 1;
                        hits += u64::from(v == s);
                    }
                }
                if size == 0 {
                    return Err(Error::EmptyBlock);
                }
                let fr = ratio(hits, size);
                Ok(fr < *low || fr > *high)
            }
            Region2D::Union(rs) => {
                for r in rs {
                    if r.contains_window(field, window)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Region2D::Predicate { tag } => match tag.as_str() {
                "always" => Ok(true),
                "never" => Ok(false),
                _ => Err(Error::UnboundPredicate(tag.clone())),
            },
        }
    }

    pub fn contains(&self, p: &Pattern) -> Result<bool> {
        self.contains_window(p, p.bounds())
    }

    pub fn to_json(&self) -> Region2DJson {
        match self {
            Region2D::MetricBall {
                specs,
                radius,
                depth,
            } => Region2DJson::MetricBall {
                specs: specs.clone(),
                radius: *radius,
                depth: *depth,
            },
            Region2D::FrequencyWindow { symbol, low, high } => Region2DJson::FrequencyWindow {
                symbol: symbol.clone(),
                low: low.clone(),
                high: high.clone(),
            },
            Region2D::Union(rs) => Region2DJson::Union {
                members: rs.iter().map(Region2D::to_json).collect(),
            },
            Region2D::Predicate { tag } => Region2DJson::Predicate { tag: tag.clone() },
        }
    }

    pub fn from_json(json: Region2DJson) -> Result<Self> {
        match json {
            Region2DJson::MetricBall {
                specs,
                radius,
                depth,
            } => Region2D::metric_ball(specs, radius, depth),
            Region2DJson::FrequencyWindow { symbol, low, high } => {
                if low < rational::int(0) || low > high || high > rational::int(1) {
                    return Err(Error::InvalidInterval(
                        rational::format(&low),
                        rational::format(&high),
                    ));
                }
                Ok(Region2D::FrequencyWindow { symbol, low, high })
            }
            Region2DJson::Union { members } => Ok(Region2D::Union(
                members
                    .into_iter()
                    .map(Region2D::from_json)
                    .collect::<Result<_>>()?,
            )),
            Region2DJson::Predicate { tag } => Ok(Region2D::Predicate { tag }),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Region2D::from_json(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region2DJson {
    MetricBall {
        specs: Vec<MeasureSpec2D>,
        radius: f64,
        depth: usize,
    },
    FrequencyWindow {
        symbol: String,
        #[serde(with = "rational::as_string")]
        low: Rational,
        #[serde(with = "rational::as_string")]
        high: Rational,
    },
    Union {
        members: Vec<Region2DJson>,
    },
    Predicate {
        tag: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileCoverage {
    pub anchor: Point,
    pub covered: f64,
}

/// Pairwise disjoint selected tiles, in the order of the top-level tiles that
/// contain them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileSelection {
    pub tiles: Vec<Tile>,
    pub region: String,
    /// Covered fraction of each top-level tile.
    pub coverage: Vec<TileCoverage>,
}

impl TileSelection {
    pub fn to_point_set(&self, sys: &GridTilingSystem, bounds: Rect) -> PointSet2D {
        let mut set = PointSet2D::empty(bounds);
        for t in &self.tiles {
            set.insert_rect(t.rect(sys));
        }
        set
    }
}

fn select(field: &Pattern, sys: &GridTilingSystem, tile: Tile, min_level: u32, r: &Region2D, out: &mut Vec<Tile>) -> Result<()> {
    if r.contains_window(field, tile.rect(sys))? {
        out.push(tile);
    } else if tile.level > min_level {
        for child in sys.children(&tile) {
            select(field, sys, child, min_level, r, out)?;
        }
    }
    Ok(())
}

/// For every point of every level-`max_level` tile in the field, picks the
/// largest level in `[min_level, max_level]` whose tile containing the point
/// passes the region test. Nested tiles are either disjoint or one contains
/// the other, so the chosen tiles are disjoint.
pub fn decompose_tiles(
    field: &Pattern,
    sys: &GridTilingSystem,
    min_level: u32,
    max_level: u32,
    r: &Region2D,
) -> Result<TileSelection> {
    if min_level > max_level {
        return Err(Error::InvalidParams(format!(
            "level range {min_level}..{max_level} is empty"
        )));
    }
    let top = tiles_in_window(sys, max_level, field.bounds());
    if top.is_empty() {
        return Err(Error::WindowTooSmall(format!(
            "no level-{max_level} tile fits in the field"
        )));
    }
    let per_top: Vec<Vec<Tile>> = top
        .par_iter()
        .map(|&t| {
            let mut out = Vec::new();
            select(field, sys, t, min_level, r, &mut out).map(|_| out)
        })
        .collect::<Result<_>>()?;
    let top_area = sys.side(max_level).pow(2) as f64;
    let coverage = top
        .iter()
        .zip(&per_top)
        .map(|(t, chosen)| TileCoverage {
            anchor: t.anchor,
            covered: chosen.iter().map(|c| sys.side(c.level).pow(2)).sum::<usize>() as f64 / top_area,
        })
        .collect();
    Ok(TileSelection {
        tiles: per_top.into_iter().flatten().collect(),
        region: r.describe(),
        coverage,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileVerdict {
    pub tile: Tile,
    pub ergodic: bool,
}

#[derive(Clone, Debug)]
pub struct TileAudit {
    pub verdicts: Vec<TileVerdict>,
    /// Union of the failing tiles.
    pub nonergodic: PointSet2D,
}

/// Classifies every level-`level` tile of the field.
pub fn audit_tiles(field: &Pattern, sys: &GridTilingSystem, level: u32, r: &Region2D) -> Result<TileAudit> {
    let tiles = tiles_in_window(sys, level, field.bounds());
    if tiles.is_empty() {
        return Err(Error::WindowTooSmall(format!("no level-{level} tile fits in the field")));
    }
    let verdicts: Vec<TileVerdict> = tiles
        .par_iter()
        .map(|&tile| {
            r.contains_window(field, tile.rect(sys))
                .map(|ergodic| TileVerdict { tile, ergodic })
        })
        .collect::<Result<_>>()?;
    let mut nonergodic = PointSet2D::empty(field.bounds());
    for v in verdicts.iter().filter(|v| !v.ergodic) {
        nonergodic.insert_rect(v.tile.rect(sys));
    }
    Ok(TileAudit {
        verdicts,
        nonergodic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::Alphabet;
    use crate::grid2d::geometry::Shape;
    use crate::rational::int;

    fn zeros(side: usize) -> Pattern {
        Pattern::from_rect(Alphabet::binary(), Rect::square(0, 0, side), vec![0; side * side]).unwrap()
    }

    fn ball_around_zero(depth: usize) -> Region2D {
        let spec = MeasureSpec2D::product(Alphabet::binary(), &[int(1), int(0)], depth).unwrap();
        Region2D::metric_ball(vec![spec], 0.2, depth).unwrap()
    }

    #[test]
    fn tiles_in_windows() {
        let sys = GridTilingSystem::default();
        assert_eq!(tiles_in_window(&sys, 1, Rect::square(0, 0, 8)).len(), 16);
        let t = tiles_in_window(&sys, 1, Rect::new(1, 0, 6, 3));
        let anchors: Vec<_> = t.iter().map(|t| (t.anchor.x, t.anchor.y)).collect();
        assert_eq!(anchors, vec![(2, 0), (4, 0)]);
        let big = tiles_in_window(&sys, 2, Rect::square(0, 0, 8));
        for tile in &big {
            let union = sys
                .children(tile)
                .iter()
                .map(|c| c.rect(&sys).to_shape())
                .fold(Shape::default(), |acc, s| acc.union(&s));
            assert_eq!(union, tile.rect(&sys).to_shape());
        }
        assert_eq!(sys.tile_of(2, Point::new(-1, 5)).anchor, Point::new(-4, 4));
    }

    #[test]
    fn uniform_field_is_selected_whole() {
        let sys = GridTilingSystem::default();
        let sel = decompose_tiles(&zeros(32), &sys, 2, 4, &ball_around_zero(2)).unwrap();
        assert_eq!(sel.tiles.len(), 4);
        assert!(sel.tiles.iter().all(|t| t.level == 4));
        assert!(sel.coverage.iter().all(|c| c.covered == 1.0));

        let none = decompose_tiles(&zeros(32), &sys, 2, 4, &Region2D::Predicate { tag: "never".into() }).unwrap();
        assert!(none.tiles.is_empty());
        assert!(none.coverage.iter().all(|c| c.covered == 0.0));
        assert!(matches!(
            decompose_tiles(&zeros(8), &sys, 2, 4, &ball_around_zero(2)),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn audit_examples() {
        let sys = GridTilingSystem::default();
        let a = audit_tiles(&zeros(16), &sys, 2, &ball_around_zero(2)).unwrap();
        assert!(a.nonergodic.is_empty());
        assert_eq!(a.verdicts.len(), 16);
        let a = audit_tiles(&zeros(16), &sys, 2, &Region2D::Predicate { tag: "never".into() }).unwrap();
        assert_eq!(a.nonergodic.len(), 256);
    }

    #[test]
    fn region_json() {
        let text = r#"{"type":"union","members":[
            {"type":"metric_ball","radius":0.2,"depth":2,
             "specs":[{"alphabet":["0","1"],"depth":2,"product":["19/20","1/20"]}]},
            {"type":"frequency_window","symbol":"1","low":"0","high":"0.9"}]}"#;
        let r = Region2D::from_json_str(text).unwrap();
        let back = Region2D::from_json(serde_json::from_str(&serde_json::to_string(&r.to_json()).unwrap()).unwrap()).unwrap();
        assert_eq!(r.describe(), back.describe());
        assert!(r.contains(&zeros(8)).unwrap());
    }
}
