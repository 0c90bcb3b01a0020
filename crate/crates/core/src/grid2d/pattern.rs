//! Symbol assignments on finite lattice domains.

use crate::core1d::Alphabet;
use crate::error::{Error, Result};
use crate::grid2d::geometry::{core, Point, Rect, Shape};
use crate::rational::{ratio, Rational};

const ABSENT: u16 = u16::MAX;

/// A pattern stored densely over its bounding rectangle; cells outside the
/// domain hold a sentinel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    alphabet: Alphabet,
    bounds: Rect,
    cells: Vec<u16>,
    size: usize,
}

impl Pattern {
    /// A full rectangle; `values` are row-major (`y` outer, `x` inner).
    pub fn from_rect(alphabet: Alphabet, bounds: Rect, values: Vec<u16>) -> Result<Self> {
        if values.len() != bounds.area() {
            return Err(Error::InvalidParams(format!(
                "{} values for a {}x{} rectangle",
                values.len(),
                bounds.width,
                bounds.height
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v as usize >= alphabet.size()) {
            return Err(Error::SymbolOutOfRange {
                index: bad as usize,
                size: alphabet.size(),
            });
        }
        Ok(Pattern {
            alphabet,
            bounds,
            size: values.len(),
            cells: values,
        })
    }

    /// Assigns `values[i]` to the `i`-th point of `domain` in canonical order.
    pub fn from_shape(alphabet: Alphabet, domain: &Shape, values: &[u16]) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidParams("one value per domain point required".into()));
        }
        let bounds = domain.bounding_rect().unwrap_or(Rect::new(0, 0, 0, 0));
        let mut cells = vec![ABSENT; bounds.area()];
        for (p, &v) in domain.points().iter().zip(values) {
            if v as usize >= alphabet.size() {
                return Err(Error::SymbolOutOfRange {
                    index: v as usize,
                    size: alphabet.size(),
                });
            }
            cells[offset(&bounds, *p)] = v;
        }
        Ok(Pattern {
            alphabet,
            bounds,
            cells,
            size: domain.len(),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    /// Number of points in the domain.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_full_rect(&self) -> bool {
        self.size == self.bounds.area()
    }

    pub fn get(&self, p: Point) -> Option<u16> {
        if !self.bounds.contains(p) {
            return None;
        }
        match self.cells[offset(&self.bounds, p)] {
            ABSENT => None,
            v => Some(v),
        }
    }

    pub fn domain(&self) -> Shape {
        Shape::new(self.bounds.points().filter(|&p| self.get(p).is_some()))
    }

    /// Restriction to `domain`, which must lie inside this pattern's domain.
    pub fn restrict(&self, domain: &Shape) -> Result<Pattern> {
        let values = domain
            .points()
            .iter()
            .map(|&p| {
                self.get(p).ok_or_else(|| {
                    Error::InvalidParams(format!("point ({}, {}) outside the pattern", p.x, p.y))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::from_shape(self.alphabet.clone(), domain, &values)
    }

    pub fn restrict_rect(&self, r: Rect) -> Result<Pattern> {
        if self.is_full_rect() && self.bounds.contains_rect(&r) {
            let mut values = Vec::with_capacity(r.area());
            for y in r.y..r.y_end() {
                let start = offset(&self.bounds, Point::new(r.x, y));
                values.extend_from_slice(&self.cells[start..start + r.width]);
            }
            return Pattern::from_rect(self.alphabet.clone(), r, values);
        }
        self.restrict(&r.to_shape())
    }

    /// Raw cell storage over `bounds`, row-major.
    pub(crate) fn cells(&self) -> &[u16] {
        &self.cells
    }

    /// Reads `rows cols label...` followed by `rows` lines of symbols.
    pub fn parse(text: &str) -> Result<Pattern> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty pattern file".into()))?;
        let mut fields = header.split_whitespace();
        let mut dim = |name: &str| -> Result<usize> {
            fields
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("missing {name} in pattern header")))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let alphabet = Alphabet::new(fields)?;
        let mut values = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {rows} rows")))?;
            let row = alphabet.parse_word(line)?;
            if row.len() != cols {
                return Err(Error::Parse(format!("row of {} symbols, expected {cols}", row.len())));
            }
            values.extend(row);
        }
        Pattern::from_rect(alphabet, Rect::new(0, 0, cols, rows), values)
    }

    /// Inverse of [`Pattern::parse`] for full rectangles.
    pub fn write(&self) -> Result<String> {
        if !self.is_full_rect() {
            return Err(Error::InvalidParams("only rectangular patterns can be written".into()));
        }
        let b = self.bounds;
        let mut out = format!("{} {} {}\n", b.height, b.width, self.alphabet.symbols().join(" "));
        for row in self.cells.chunks(b.width.max(1)) {
            out.push_str(&self.alphabet.format_word(row));
            out.push('\n');
        }
        Ok(out)
    }
}

pub(crate) fn offset(bounds: &Rect, p: Point) -> usize {
    (p.y - bounds.y) as usize * bounds.width + (p.x - bounds.x) as usize
}

/// Number of placements `g` in the `K`-core of `B`'s domain where `B`
/// restricted to `K + g` matches `C`, over `|domain(B)|`.
pub fn frequency2d(b: &Pattern, c: &Pattern) -> Result<Rational> {
    if b.alphabet != c.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    if b.size == 0 {
        return Err(Error::EmptyBlock);
    }
    let k = c.domain();
    let hits = core(&b.domain(), &k)
        .points()
        .iter()
        .filter(|&&g| k.points().iter().all(|&kp| b.get(kp + g) == c.get(kp)))
        .count();
    Ok(ratio(hits as u64, b.size as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(w: usize, h: usize) -> Pattern {
        Pattern::from_rect(Alphabet::binary(), Rect::new(0, 0, w, h), vec![0; w * h]).unwrap()
    }

    #[test]
    fn frequency_examples() {
        let b = zeros(4, 4);
        assert_eq!(frequency2d(&b, &zeros(1, 1)).unwrap(), ratio(1, 1));
        assert_eq!(frequency2d(&b, &zeros(2, 1)).unwrap(), ratio(12, 16));
        assert_eq!(frequency2d(&b, &zeros(5, 1)).unwrap(), ratio(0, 1));
    }

    #[test]
    fn file_roundtrip() {
        let text = "2 3 0 1\n010\n110\n";
        let p = Pattern::parse(text).unwrap();
        assert_eq!(p.get(Point::new(1, 0)), Some(1));
        assert_eq!(p.get(Point::new(0, 1)), Some(1));
        assert_eq!(p.write().unwrap(), text);
        assert!(Pattern::parse("2 3 0 1\n010\n").is_err());
    }

    #[test]
    fn restriction() {
        let p = Pattern::parse("3 3 0 1\n010\n111\n000\n").unwrap();
        let sub = p.restrict_rect(Rect::new(1, 0, 2, 2)).unwrap();
        assert_eq!(sub.write().unwrap(), "2 2 0 1\n10\n11\n");
        let l = Shape::new([Point::new(0, 0), Point::new(0, 1), Point::new(1, 1)]);
        let q = p.restrict(&l).unwrap();
        assert_eq!(q.size(), 3);
        assert_eq!(q.get(Point::new(1, 0)), None);
        assert_eq!(q.domain(), l);
    }
}
