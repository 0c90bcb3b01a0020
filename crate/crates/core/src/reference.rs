//! Slow, direct re-implementations used as test oracles. Nothing here shares
//! code with the optimized paths beyond the plain data types.

use std::collections::BTreeSet;

use crate::core1d::{Alphabet, Block};
use crate::decompose::{Segment, SegmentKind};
use crate::error::Result;
use crate::grid2d::{rect_shape, GridTilingSystem, Pattern, Point, Region2D, Tile};
use crate::rational::{ratio, Rational};
use crate::region::Region;

/// Occurrences of `word` in `data` by comparing every alignment.
pub fn naive_count(data: &[u16], word: &[u16]) -> u64 {
    if word.is_empty() || word.len() > data.len() {
        return 0;
    }
    (0..=data.len() - word.len())
        .filter(|&i| data[i..i + word.len()] == *word)
        .count() as u64
}

pub fn naive_frequency(data: &[u16], word: &[u16]) -> Rational {
    ratio(naive_count(data, word), data.len() as u64)
}

/// Region membership with frequency windows counted symbol by symbol; other
/// variants defer to [`Region::contains`].
pub fn naive_contains(r: &Region, alphabet: &Alphabet, data: &[u16]) -> Result<bool> {
    match r {
        Region::FrequencyWindow {
            symbol,
            low,
            high,
            min_length,
        } => {
            if data.len() < *min_length {
                return Ok(false);
            }
            let s = alphabet.index(symbol)?;
            let hits = data.iter().filter(|&&v| v == s).count() as u64;
            let fr = ratio(hits, data.len() as u64);
            Ok(fr < *low || fr > *high)
        }
        Region::Union(rs) => {
            for m in rs {
                if naive_contains(m, alphabet, data)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Region::Intersection(rs) => {
            for m in rs {
                if !naive_contains(m, alphabet, data)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => r.contains(&Block::new(alphabet.clone(), data.to_vec())?),
    }
}

/// Greedy decomposition by trying every candidate length at every position.
pub fn naive_greedy(x: &Block, m: usize, n: Option<usize>, r: &Region) -> Result<Vec<Segment>> {
    let data = x.symbols();
    let mut out = Vec::new();
    let mut filler = 0;
    let mut i = 0;
    while i + m <= data.len() {
        let top = n.map_or(data.len() - i, |n| n.min(data.len() - i));
        let mut found = None;
        for k in m..=top {
            if naive_contains(r, x.alphabet(), &data[i..i + k])? {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                out.push(Segment {
                    start: filler,
                    len: i - filler,
                    kind: SegmentKind::Filler,
                });
                out.push(Segment {
                    start: i,
                    len: k,
                    kind: SegmentKind::Ergodic,
                });
                i += k;
                filler = i;
            }
            None => i += 1,
        }
    }
    out.push(Segment {
        start: filler,
        len: data.len() - filler,
        kind: SegmentKind::Filler,
    });
    Ok(out)
}

/// Largest (or smallest) count of `points` over all length-`horizon` windows
/// inside `[lo, hi)`, recounted from scratch for each window.
pub fn naive_density(points: &[usize], horizon: usize, lo: usize, hi: usize, upper: bool) -> Rational {
    let set: BTreeSet<usize> = points.iter().copied().collect();
    let counts = (lo..=hi - horizon).map(|s| (s..s + horizon).filter(|p| set.contains(p)).count() as u64);
    let best = if upper { counts.max() } else { counts.min() };
    ratio(best.unwrap(), horizon as u64)
}

/// Tiles chosen point by point: each point of a complete top-level tile
/// takes the largest passing level in `[min_level, max_level]`.
pub fn naive_tile_selection(
    field: &Pattern,
    sys: &GridTilingSystem,
    min_level: u32,
    max_level: u32,
    r: &Region2D,
) -> Result<BTreeSet<Tile>> {
    let b = field.bounds();
    let top = sys.side(max_level) as i64;
    let mut chosen = BTreeSet::new();
    for p in b.points() {
        let t = sys.tile_of(max_level, p);
        let inside = t.anchor.x >= b.x && t.anchor.y >= b.y && t.anchor.x + top <= b.x_end() && t.anchor.y + top <= b.y_end();
        if !inside {
            continue;
        }
        for level in (min_level..=max_level).rev() {
            let t = sys.tile_of(level, p);
            if r.contains_window(field, t.rect(sys))? {
                chosen.insert(t);
                break;
            }
        }
    }
    Ok(chosen)
}

/// Occurrence counts of every pattern on the `l`-th test rectangle, cells
/// indexed column by column.
pub fn naive_profile2d_counts(p: &Pattern, l: usize) -> Vec<u64> {
    let (w, h) = rect_shape(l);
    let q = p.alphabet().size();
    let mut counts = vec![0u64; q.pow((w * h) as u32)];
    let b = p.bounds();
    for g in b.points() {
        let mut word = Vec::with_capacity(w * h);
        for dx in 0..w as i64 {
            for dy in 0..h as i64 {
                if let Some(v) = p.get(Point::new(g.x + dx, g.y + dy)) {
                    word.push(v as usize);
                }
            }
        }
        if word.len() == w * h {
            counts[word.iter().fold(0, |acc, &v| acc * q + v)] += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::profile;
    use crate::decompose::decompose_unbounded;
    use crate::grid2d::{decompose_tiles, profile2d, Rect};

    #[test]
    fn naive_count_overlaps() {
        assert_eq!(naive_count(&[0, 0, 0], &[0, 0]), 2);
        assert_eq!(naive_frequency(&[0, 1, 0, 1], &[0, 1]), ratio(1, 2));
    }

    #[test]
    fn agrees_on_small_inputs() {
        let x = Block::binary("0001011100010111101000000111");
        let r = Region::frequency_window("0", ratio(1, 3), ratio(2, 3), 3).unwrap();
        let fast = decompose_unbounded(&x, 3, &r).unwrap();
        assert_eq!(fast.segments, naive_greedy(&x, 3, None, &r).unwrap());
        let prof = profile(&x, 3).unwrap();
        assert_eq!(prof.counts(2)[1], naive_count(x.symbols(), &[0, 1]));
    }

    #[test]
    fn tile_oracle_on_checkerboard_blocks() {
        let side = 16;
        let values: Vec<u16> = (0..side * side).map(|i| u16::from((i % side) >= 8)).collect();
        let field = Pattern::from_rect(Alphabet::binary(), Rect::square(0, 0, side), values).unwrap();
        let sys = GridTilingSystem::default();
        let r = Region2D::FrequencyWindow {
            symbol: "0".into(),
            low: ratio(1, 4),
            high: ratio(3, 4),
        };
        let fast: BTreeSet<Tile> = decompose_tiles(&field, &sys, 1, 4, &r).unwrap().tiles.into_iter().collect();
        assert_eq!(fast, naive_tile_selection(&field, &sys, 1, 4, &r).unwrap());
        assert!(fast.iter().all(|t| t.level == 3));
        let prof = profile2d(&field, 3).unwrap();
        for l in 1..=3 {
            assert_eq!(prof.counts(l), naive_profile2d_counts(&field, l).as_slice());
        }
    }
}
