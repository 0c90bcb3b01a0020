//! Rectangle cylinders, pattern profiles and the planar d* distance.
//!
//! The `l`-th test shape is the `l`-th rectangle `[0,a) x [0,b)` when
//! rectangles are ordered by area and then by `(a, b)`:
//! `1x1, 1x2, 2x1, 1x3, 3x1, 1x4, 2x2, 4x1, ...`. Level `l` carries weight
//! `2^-l / (|K_l| + 1)`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::core1d::Alphabet;
use crate::error::{Error, Result};
use crate::grid2d::geometry::{core, Point, Rect, Shape};
use crate::grid2d::pattern::{offset, Pattern};
use crate::metric::{CylinderTable, DistanceBound};
use crate::rational::{self, pow2_inv, ratio, to_f64, Rational};

/// Width and height of the `l`-th test rectangle, `l >= 1`.
pub fn rect_shape(l: usize) -> (usize, usize) {
    assert!(l >= 1, "shapes are numbered from 1");
    let mut seen = 0;
    for area in 1.. {
        for a in 1..=area {
            if area % a == 0 {
                seen += 1;
                if seen == l {
                    return (a, area / a);
                }
            }
        }
    }
    unreachable!()
}

pub fn shape(l: usize) -> Shape {
    let (a, b) = rect_shape(l);
    Shape::rect(a, b)
}

/// `2^-l / (|K_l| + 1)`.
pub fn level_weight(l: usize) -> Rational {
    let (a, b) = rect_shape(l);
    pow2_inv(l) / Rational::from_integer(((a * b + 1) as u64).into())
}

/// Bound on the levels beyond `depth`: each level contributes at most twice
/// its weight.
pub fn tail_bound_2d(depth: usize) -> f64 {
    const EXTRA: usize = 64;
    let mut tail = 0.0;
    for l in depth + 1..=depth + EXTRA {
        let (a, b) = rect_shape(l);
        tail += 2.0 * 0.5f64.powi(l as i32) / (a * b + 1) as f64;
    }
    tail + 2.0 * 0.5f64.powi((depth + EXTRA) as i32)
}

fn table_len(alphabet: &Alphabet, l: usize) -> Result<usize> {
    let (a, b) = rect_shape(l);
    alphabet.word_count(a * b)
}

/// Occurrence counts of every rectangle pattern up to `depth`, over the
/// domain size of the source pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile2D {
    alphabet: Alphabet,
    size: usize,
    counts: Vec<Vec<u64>>,
}

impl Profile2D {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn counts(&self, l: usize) -> &[u64] {
        &self.counts[l - 1]
    }
}

impl CylinderTable for Profile2D {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn depth(&self) -> usize {
        self.counts.len()
    }

    fn exact(&self, len: usize, idx: usize) -> Rational {
        ratio(self.counts[len - 1][idx], self.size as u64)
    }

    fn approx(&self, len: usize, idx: usize) -> f64 {
        self.counts[len - 1][idx] as f64 / self.size as f64
    }
}

pub fn profile2d(p: &Pattern, depth: usize) -> Result<Profile2D> {
    profile2d_window(p, p.bounds(), depth)
}

/// Profile of the part of `p` inside `window`.
pub fn profile2d_window(p: &Pattern, window: Rect, depth: usize) -> Result<Profile2D> {
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let bounds = p.bounds();
    if !bounds.contains_rect(&window) {
        return Err(Error::InvalidParams("window outside the pattern bounds".into()));
    }
    let q = p.alphabet().size();
    let cells = p.cells();
    let absent = u16::MAX;
    let at = |x: i64, y: i64| cells[offset(&bounds, Point::new(x, y))];
    let size = if p.is_full_rect() {
        window.area()
    } else {
        window.points().filter(|pt| p.get(*pt).is_some()).count()
    };
    if size == 0 {
        return Err(Error::EmptyBlock);
    }
    let mut counts = Vec::with_capacity(depth);
    for l in 1..=depth {
        let (a, b) = rect_shape(l);
        let mut table = vec![0u64; table_len(p.alphabet(), l)?];
        if a <= window.width && b <= window.height {
            for gy in window.y..=window.y_end() - b as i64 {
                'place: for gx in window.x..=window.x_end() - a as i64 {
                    let mut idx = 0usize;
                    for dx in 0..a as i64 {
                        for dy in 0..b as i64 {
                            let v = at(gx + dx, gy + dy);
                            if v == absent {
                                continue 'place;
                            }
                            idx = idx * q + v as usize;
                        }
                    }
                    table[idx] += 1;
                }
            }
        }
        counts.push(table);
    }
    Ok(Profile2D {
        alphabet: p.alphabet().clone(),
        size,
        counts,
    })
}

/// Cylinder values of a measure on planar configurations, for the test
/// rectangles up to a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec2D {
    alphabet: Alphabet,
    tables: Vec<Vec<Rational>>,
    approx: Vec<Vec<f64>>,
}

impl CylinderTable for MeasureSpec2D {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn depth(&self) -> usize {
        self.tables.len()
    }

    fn exact(&self, len: usize, idx: usize) -> Rational {
        self.tables[len - 1][idx].clone()
    }

    fn approx(&self, len: usize, idx: usize) -> f64 {
        self.approx[len - 1][idx]
    }
}

impl MeasureSpec2D {
    fn build(alphabet: Alphabet, tables: Vec<Vec<Rational>>) -> Self {
        let approx = tables.iter().map(|t| t.iter().map(to_f64).collect()).collect();
        MeasureSpec2D {
            alphabet,
            tables,
            approx,
        }
    }

    /// Checks table sizes, the range of values and that each level sums to 1.
    pub fn from_tables(alphabet: Alphabet, tables: Vec<Vec<Rational>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::InvalidMeasure("depth must be at least 1".into()));
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != table_len(&alphabet, i + 1)? {
                return Err(Error::InvalidMeasure(format!("level {} has the wrong size", i + 1)));
            }
            if t.iter().any(|v| !rational::in_unit_interval(v)) {
                return Err(Error::InvalidMeasure("value outside [0,1]".into()));
            }
            if !t.iter().sum::<Rational>().is_one() {
                return Err(Error::InvalidMeasure(format!("level {} does not sum to 1", i + 1)));
            }
        }
        Ok(MeasureSpec2D::build(alphabet, tables))
    }

    /// I.i.d. symbols with the given probabilities.
    pub fn product(alphabet: Alphabet, probs: &[Rational], depth: usize) -> Result<Self> {
        if probs.len() != alphabet.size()
            || probs.iter().any(|p| !rational::in_unit_interval(p))
            || !probs.iter().sum::<Rational>().is_one()
        {
            return Err(Error::InvalidMeasure(
                "one probability per symbol, in [0,1], summing to 1".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::InvalidMeasure("depth must be at least 1".into()));
        }
        let q = alphabet.size();
        let mut tables = Vec::with_capacity(depth);
        for l in 1..=depth {
            let (a, b) = rect_shape(l);
            let n = table_len(&alphabet, l)?;
            let cells = a * b;
            let table = (0..n)
                .map(|mut idx| {
                    let mut v = Rational::one();
                    for _ in 0..cells {
                        v *= &probs[idx % q];
                        idx /= q;
                    }
                    v
                })
                .collect();
            tables.push(table);
        }
        Ok(MeasureSpec2D::build(alphabet, tables))
    }

    pub fn table(&self, l: usize) -> &[Rational] {
        &self.tables[l - 1]
    }

    pub fn from_json(json: &MeasureSpec2DJson) -> Result<Self> {
        match json {
            MeasureSpec2DJson::Product {
                alphabet,
                depth,
                product,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                let probs = product
                    .iter()
                    .map(|p| rational::parse(p))
                    .collect::<Result<Vec<_>>>()?;
                MeasureSpec2D::product(alphabet, &probs, *depth)
            }
            MeasureSpec2DJson::Tables {
                alphabet,
                depth,
                tables,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                let q = alphabet.size();
                let mut out = Vec::with_capacity(*depth);
                for l in 1..=*depth {
                    let row = tables
                        .get(&l.to_string())
                        .ok_or_else(|| Error::InvalidMeasure(format!("missing level {l}")))?;
                    let (a, b) = rect_shape(l);
                    let mut values = vec![Rational::zero(); table_len(&alphabet, l)?];
                    for (word, value) in row {
                        let symbols = alphabet.parse_word(word)?;
                        if symbols.len() != a * b {
                            return Err(Error::InvalidMeasure(format!(
                                "pattern `{word}` does not fit a {a}x{b} rectangle"
                            )));
                        }
                        values[crate::core1d::word_index(&symbols, q)] = rational::parse(value)?;
                    }
                    out.push(values);
                }
                MeasureSpec2D::from_tables(alphabet, out)
            }
        }
    }

    /// Tables form; cells of each rectangle are listed column by column.
    pub fn to_json(&self) -> MeasureSpec2DJson {
        let q = self.alphabet.size();
        let tables = self
            .tables
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (a, b) = rect_shape(i + 1);
                let row = t
                    .iter()
                    .enumerate()
                    .map(|(idx, v)| {
                        let word = crate::core1d::word_from_index(idx, a * b, q);
                        (self.alphabet.format_word(&word), rational::format(v))
                    })
                    .collect();
                ((i + 1).to_string(), row)
            })
            .collect();
        MeasureSpec2DJson::Tables {
            alphabet: self.alphabet.symbols().to_vec(),
            depth: self.tables.len(),
            tables,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec2DJson {
    Tables {
        alphabet: Vec<String>,
        depth: usize,
        tables: BTreeMap<String, BTreeMap<String, String>>,
    },
    Product {
        alphabet: Vec<String>,
        depth: usize,
        product: Vec<String>,
    },
}

impl Serialize for MeasureSpec2D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasureSpec2D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MeasureSpec2DJson::deserialize(d)?;
        MeasureSpec2D::from_json(&json).map_err(serde::de::Error::custom)
    }
}

pub fn barycenter_2d(weights: &[Rational], specs: &[MeasureSpec2D]) -> Result<MeasureSpec2D> {
    let first = specs.first().ok_or(Error::EmptySpecList)?;
    if weights.len() != specs.len()
        || weights.iter().any(Signed::is_negative)
        || !weights.iter().sum::<Rational>().is_one()
    {
        return Err(Error::WeightSum);
    }
    if specs
        .iter()
        .any(|s| s.tables.len() != first.tables.len() || s.alphabet != first.alphabet)
    {
        return Err(Error::MixedDepths);
    }
    let tables = (0..first.tables.len())
        .map(|l| {
            (0..first.tables[l].len())
                .map(|idx| weights.iter().zip(specs).map(|(w, s)| w * &s.tables[l][idx]).sum())
                .collect()
        })
        .collect();
    Ok(MeasureSpec2D::build(first.alphabet.clone(), tables))
}

fn check_pair(u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize) -> Result<()> {
    if u.alphabet() != v.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let available = u.depth().min(v.depth());
    if available < depth {
        return Err(Error::DepthShortfall {
            needed: depth,
            available,
        });
    }
    Ok(())
}

pub fn d_star_2d(u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize) -> Result<DistanceBound> {
    check_pair(u, v, depth)?;
    let mut partial = 0.0;
    for l in 1..=depth {
        let (a, b) = rect_shape(l);
        let n = table_len(u.alphabet(), l)?;
        let sum: f64 = (0..n).map(|idx| (u.approx(l, idx) - v.approx(l, idx)).abs()).sum();
        partial += sum * 0.5f64.powi(l as i32) / (a * b + 1) as f64;
    }
    Ok(DistanceBound {
        partial,
        tail: tail_bound_2d(depth),
        depth,
    })
}

pub fn d_star_2d_exact(u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize) -> Result<Rational> {
    check_pair(u, v, depth)?;
    let mut partial = Rational::zero();
    for l in 1..=depth {
        let n = table_len(u.alphabet(), l)?;
        let sum: Rational = (0..n).map(|idx| (u.exact(l, idx) - v.exact(l, idx)).abs()).sum();
        partial += sum * level_weight(l);
    }
    Ok(partial)
}

/// Slack in the planar concatenation bound for patterns on the disjoint
/// domains `parts`: placements of a test rectangle that straddle two parts are
/// counted in no part, and there are at most `|F_j| - |core(F_j)|` of them per
/// part.
pub fn concatenation_correction_2d(parts: &[Shape], depth: usize) -> Result<Rational> {
    let total: usize = parts.iter().map(Shape::len).sum();
    if total == 0 {
        return Err(Error::EmptyBlock);
    }
    let mut out = Rational::zero();
    for l in 1..=depth {
        let k = shape(l);
        let lost: usize = parts.iter().map(|f| f.len() - core(f, &k).len()).sum();
        out += level_weight(l) * ratio(lost as u64, total as u64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn uniform(v: u16, side: usize) -> Pattern {
        Pattern::from_rect(Alphabet::binary(), Rect::square(0, 0, side), vec![v; side * side]).unwrap()
    }

    #[test]
    fn enumeration_order() {
        let first: Vec<_> = (1..=10).map(rect_shape).collect();
        assert_eq!(first, vec![
            (1, 1),
            (1, 2),
            (2, 1),
            (1, 3),
            (3, 1),
            (1, 4),
            (2, 2),
            (4, 1),
            (1, 5),
            (5, 1)
        ]);
    }

    #[test]
    fn tail_is_certified() {
        for depth in 1..8 {
            let t = tail_bound_2d(depth);
            assert!(t <= 2f64.powi(1 - depth as i32));
            let next = tail_bound_2d(depth + 1);
            let (a, b) = rect_shape(depth + 1);
            let term = 2.0 * 0.5f64.powi(depth as i32 + 1) / (a * b + 1) as f64;
            assert!((t - next - term).abs() < 1e-15);
        }
        assert!(tail_bound_2d(2) < 0.2);
    }

    #[test]
    fn uniform_patterns() {
        let zeros = profile2d(&uniform(0, 8), 3).unwrap();
        let ones = profile2d(&uniform(1, 8), 3).unwrap();
        assert_eq!(d_star_2d(&zeros, &zeros, 3).unwrap().partial, 0.0);
        let d = d_star_2d_exact(&zeros, &ones, 1).unwrap();
        assert_eq!(d, ratio(1, 2));
        let deeper = d_star_2d_exact(&zeros, &ones, 3).unwrap();
        assert!(deeper > d);
    }

    #[test]
    fn product_measure() {
        let spec = MeasureSpec2D::product(Alphabet::binary(), &[ratio(3, 4), ratio(1, 4)], 4).unwrap();
        assert_eq!(spec.table(2)[0], ratio(9, 16));
        assert_eq!(spec.table(4).len(), 8);
        let json = serde_json::to_string(&spec).unwrap();
        let back: MeasureSpec2D = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let short: MeasureSpec2D =
            serde_json::from_str(r#"{"alphabet":["0","1"],"depth":4,"product":["3/4","1/4"]}"#).unwrap();
        assert_eq!(short, spec);
        let bary = barycenter_2d(&[int(1), int(0)], &[spec.clone(), spec.clone()]).unwrap();
        assert_eq!(bary, spec);
    }

    #[test]
    fn profile_on_irregular_domain() {
        let p = uniform(0, 4);
        let l_shape = Shape::new(p.domain().points().iter().copied().filter(|pt| !(pt.x >= 2 && pt.y >= 2)));
        let sub = p.restrict(&l_shape).unwrap();
        let prof = profile2d(&sub, 2).unwrap();
        assert_eq!(prof.size(), 12);
        assert_eq!(prof.counts(1)[0], 12);
        // Vertical dominoes: three in each full column, one in each short one.
        assert_eq!(prof.counts(2)[0], 3 + 3 + 1 + 1);
    }
}
