//! Greedy decomposition of a sequence into ergodic blocks separated by
//! filler, and audits of arbitrary partitions.
//!
//! The greedy scan stands at a cursor and asks for the smallest length `k` in
//! `[m, n]` such that the block starting at the cursor lies in the region. If
//! there is one, it becomes an ergodic segment and the cursor jumps past it;
//! otherwise the coordinate becomes filler and the cursor moves on by one.
//! A final stub shorter than `m` is filler.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::core1d::Block;
use crate::density::{upper_estimate, CoordinateSet};
use crate::error::{Error, Result};
use crate::region::Region;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Ergodic,
    Filler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeParams {
    pub m: usize,
    /// Absent for the unbounded decomposition.
    pub n: Option<usize>,
    pub region: String,
}

/// Segments tile the window in order. Ergodic segments are always separated
/// by exactly one filler, which may be empty, and the list starts and ends
/// with a filler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub window: [usize; 2],
    pub params: DecomposeParams,
    pub segments: Vec<Segment>,
}

impl Decomposition {
    pub fn ergodic(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Ergodic)
    }

    /// Checks contiguity and the filler/ergodic alternation.
    pub fn validate(&self) -> Result<()> {
        let mut cursor = self.window[0];
        for (i, s) in self.segments.iter().enumerate() {
            let expected = if i % 2 == 0 {
                SegmentKind::Filler
            } else {
                SegmentKind::Ergodic
            };
            if s.start != cursor || s.kind != expected {
                return Err(Error::InvalidParams(format!("segment {i} out of place")));
            }
            cursor += s.len;
        }
        if cursor != self.window[1] || self.segments.len().is_multiple_of(2) {
            return Err(Error::InvalidParams("segments do not cover the window".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("start,len,kind\n");
        for s in &self.segments {
            let kind = match s.kind {
                SegmentKind::Ergodic => "ergodic",
                SegmentKind::Filler => "filler",
            };
            out.push_str(&format!("{},{},{}\n", s.start, s.len, kind));
        }
        out
    }
}

fn check_lengths(m: usize, n: Option<usize>) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if let Some(n) = n {
        if n < m {
            return Err(Error::InvalidParams(format!("n = {n} is below m = {m}")));
        }
    }
    Ok(())
}

/// Smallest `k` in `[m, min(n, |x| - i)]` such that `x[i..i+k)` lies in the
/// region.
pub fn good_position(x: &Block, i: usize, m: usize, n: usize, r: &Region) -> Result<Option<usize>> {
    check_lengths(m, Some(n))?;
    let available = x.len().saturating_sub(i);
    if available < m {
        return Err(Error::WindowExhausted {
            position: i,
            needed: m,
            available,
        });
    }
    let prepared = r.prepare(x.alphabet(), x.symbols())?;
    Ok(prepared.first_accept(i, m, n))
}

/// Greedy scan over `x[window]`.
fn greedy(x: &Block, window: Range<usize>, m: usize, n: Option<usize>, r: &Region) -> Result<Decomposition> {
    check_lengths(m, n)?;
    let data = &x.symbols()[window.clone()];
    let prepared = r.prepare(x.alphabet(), data)?;
    let len = data.len();
    let mut segments = Vec::new();
    let mut filler_start = 0;
    let mut cursor = 0;
    while cursor + m <= len {
        let kmax = n.unwrap_or(usize::MAX).min(len - cursor);
        match prepared.first_accept(cursor, m, kmax) {
            Some(k) => {
                segments.push(Segment {
                    start: window.start + filler_start,
                    len: cursor - filler_start,
                    kind: SegmentKind::Filler,
                });
                segments.push(Segment {
                    start: window.start + cursor,
                    len: k,
                    kind: SegmentKind::Ergodic,
                });
                cursor += k;
                filler_start = cursor;
            }
            None => cursor += 1,
        }
    }
    segments.push(Segment {
        start: window.start + filler_start,
        len: len - filler_start,
        kind: SegmentKind::Filler,
    });
    Ok(Decomposition {
        window: [window.start, window.end],
        params: DecomposeParams {
            m,
            n,
            region: r.describe(),
        },
        segments,
    })
}

pub fn decompose_bounded(x: &Block, m: usize, n: usize, r: &Region) -> Result<Decomposition> {
    if x.len() < m {
        return Err(Error::WindowTooSmall(format!("|x| = {} < m = {m}", x.len())));
    }
    greedy(x, 0..x.len(), m, Some(n), r)
}

/// As [`decompose_bounded`] with no upper limit on segment length.
pub fn decompose_unbounded(x: &Block, m: usize, r: &Region) -> Result<Decomposition> {
    if x.len() < m {
        return Err(Error::WindowTooSmall(format!("|x| = {} < m = {m}", x.len())));
    }
    greedy(x, 0..x.len(), m, None, r)
}

/// Decomposes a finite block; a block shorter than `m` is a single filler.
pub fn decompose_block(b: &Block, m: usize, n: usize, r: &Region) -> Result<Decomposition> {
    greedy(b, 0..b.len(), m, Some(n), r)
}

/// Decomposes `x[lo..hi)` only.
pub fn decompose_window(
    x: &Block,
    window: Range<usize>,
    m: usize,
    n: Option<usize>,
    r: &Region,
) -> Result<Decomposition> {
    if window.end > x.len() || window.start > window.end {
        return Err(Error::InvalidParams(format!(
            "window {window:?} outside [0, {})",
            x.len()
        )));
    }
    greedy(x, window, m, n, r)
}

/// Two-sided variant: coordinates from `origin` rightwards are scanned as
/// usual, and coordinates left of `origin` are scanned leftwards starting at
/// `origin`, so a left segment ends where the previous one began.
pub fn decompose_two_sided(
    x: &Block,
    origin: usize,
    m: usize,
    n: Option<usize>,
    r: &Region,
) -> Result<Decomposition> {
    check_lengths(m, n)?;
    if origin > x.len() {
        return Err(Error::InvalidParams(format!("origin {origin} beyond |x| = {}", x.len())));
    }
    let right = greedy(x, origin..x.len(), m, n, r)?;
    let prepared = r.prepare(x.alphabet(), x.symbols())?;

    // Leftward scan: `end` is the cursor, candidate blocks are x[end-k..end).
    let mut left = Vec::new();
    let mut filler_end = origin;
    let mut end = origin;
    while end >= m {
        let kmax = n.unwrap_or(usize::MAX).min(end);
        match (m..=kmax).find(|&k| prepared.contains_range(end - k, end)) {
            Some(k) => {
                left.push(Segment {
                    start: end,
                    len: filler_end - end,
                    kind: SegmentKind::Filler,
                });
                left.push(Segment {
                    start: end - k,
                    len: k,
                    kind: SegmentKind::Ergodic,
                });
                end -= k;
                filler_end = end;
            }
            None => end -= 1,
        }
    }
    left.push(Segment {
        start: 0,
        len: filler_end,
        kind: SegmentKind::Filler,
    });
    left.reverse();

    // The filler touching the origin from the left merges with the right
    // half's first filler.
    let mut segments = left;
    let mut right_segments = right.segments.into_iter();
    let first = right_segments.next().unwrap();
    let joint = segments.last_mut().unwrap();
    joint.len += first.len;
    segments.extend(right_segments);
    Ok(Decomposition {
        window: [0, x.len()],
        params: right.params,
        segments,
    })
}

/// Coordinates covered by filler segments.
pub fn nonergodic_set(d: &Decomposition) -> CoordinateSet {
    CoordinateSet::from_ranges(
        d.segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Filler)
            .map(Segment::range),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockVerdict {
    pub start: usize,
    pub len: usize,
    pub ergodic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionAudit {
    pub verdicts: Vec<BlockVerdict>,
    pub nonergodic: CoordinateSet,
}

/// Classifies the blocks `x[cuts[j]..cuts[j+1])` of a given partition.
pub fn audit_partition(x: &Block, cuts: &[usize], r: &Region) -> Result<PartitionAudit> {
    if cuts.len() < 2 {
        return Err(Error::MalformedCuts("need at least two cut points".into()));
    }
    if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::MalformedCuts(format!(
            "cuts must increase strictly ({} then {})",
            w[0], w[1]
        )));
    }
    if *cuts.last().unwrap() > x.len() {
        return Err(Error::MalformedCuts(format!(
            "cut {} beyond |x| = {}",
            cuts.last().unwrap(),
            x.len()
        )));
    }
    let prepared = r.prepare(x.alphabet(), x.symbols())?;
    let verdicts: Vec<BlockVerdict> = cuts
        .windows(2)
        .map(|w| BlockVerdict {
            start: w[0],
            len: w[1] - w[0],
            ergodic: prepared.contains_range(w[0], w[1]),
        })
        .collect();
    let nonergodic = CoordinateSet::from_ranges(
        verdicts
            .iter()
            .filter(|v| !v.ergodic)
            .map(|v| v.start..v.start + v.len),
    );
    Ok(PartitionAudit { verdicts, nonergodic })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub n: usize,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub steps: Vec<SweepStep>,
    /// First `n` meeting the target, if any.
    pub achieved: Option<usize>,
    pub horizon: usize,
    pub window: [usize; 2],
    pub target: f64,
    pub cap: usize,
    pub decomposition: Decomposition,
}

/// Doubles `n` from `m` until the upper density estimate of the filler set
/// over `window` at `horizon` drops below `target`, or `n` would exceed `cap`.
/// The returned decomposition is the one for the last `n` tried.
pub fn sweep_n(
    x: &Block,
    m: usize,
    r: &Region,
    target: f64,
    horizon: usize,
    window: Range<usize>,
    cap: usize,
) -> Result<SweepReport> {
    if cap < m {
        return Err(Error::InvalidParams(format!("cap {cap} is below m = {m}")));
    }
    let mut steps = Vec::new();
    let mut n = m;
    loop {
        let d = decompose_bounded(x, m, n, r)?;
        let density = upper_estimate(&nonergodic_set(&d), horizon, window.clone())?.as_f64();
        steps.push(SweepStep { n, density });
        let done = density < target;
        if done || n.saturating_mul(2) > cap {
            return Ok(SweepReport {
                steps,
                achieved: done.then_some(n),
                horizon,
                window: [window.start, window.end],
                target,
                cap,
                decomposition: d,
            });
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn band() -> Region {
        Region::frequency_window("0", ratio(1, 5), ratio(4, 5), 2).unwrap()
    }

    #[test]
    fn good_position_examples() {
        let zeros = Block::binary(&"0".repeat(100));
        assert_eq!(good_position(&zeros, 0, 5, 10, &band()).unwrap(), Some(5));
        let alt = Block::binary(&"01".repeat(50));
        assert_eq!(good_position(&alt, 0, 5, 10, &band()).unwrap(), None);
        assert!(matches!(
            good_position(&zeros, 97, 5, 10, &band()),
            Err(Error::WindowExhausted { .. })
        ));
    }

    #[test]
    fn good_position_mixed_matches_scan() {
        let x = Block::binary("0000011111000001111100000");
        let k = good_position(&x, 3, 4, 6, &band()).unwrap();
        let expected = (4..=6).find(|&k| band().contains(&x.slice(3..3 + k)).unwrap());
        assert_eq!(k, expected);
        assert_eq!(k, None);
        assert_eq!(good_position(&x, 5, 4, 6, &band()).unwrap(), Some(4));
    }

    #[test]
    fn bounded_examples() {
        let zeros = Block::binary(&"0".repeat(100));
        let d = decompose_bounded(&zeros, 5, 10, &band()).unwrap();
        d.validate().unwrap();
        assert_eq!(d.ergodic().count(), 20);
        assert!(d.ergodic().all(|s| s.len == 5));
        assert!(nonergodic_set(&d).is_empty());

        let alt = Block::binary(&"01".repeat(50));
        let d = decompose_bounded(&alt, 5, 10, &band()).unwrap();
        assert_eq!(d.segments, vec![Segment {
            start: 0,
            len: 100,
            kind: SegmentKind::Filler
        }]);
        assert_eq!(nonergodic_set(&d).len(), 100);
    }

    #[test]
    fn junction_layout() {
        let x = Block::binary(&format!("{}{}", "0".repeat(50), "1".repeat(50)));
        let d = decompose_bounded(&x, 5, 10, &band()).unwrap();
        d.validate().unwrap();
        for s in d.ergodic() {
            assert!(band().contains(&x.slice(s.range())).unwrap());
        }
        assert!(nonergodic_set(&d).is_empty());
        assert_eq!(d.ergodic().count(), 20);
    }

    #[test]
    fn block_examples() {
        let short = Block::binary("0000");
        let d = decompose_block(&short, 5, 10, &band()).unwrap();
        assert_eq!(d.segments.len(), 1);
        let b = Block::binary(&"0".repeat(15));
        let d = decompose_block(&b, 5, 5, &Region::always()).unwrap();
        assert_eq!(d.ergodic().map(|s| s.len).sum::<usize>(), 15);
        assert_eq!(d.ergodic().count(), 3);
    }

    #[test]
    fn unbounded_takes_smallest_length() {
        let zeros = Block::binary(&"0".repeat(100));
        let d = decompose_unbounded(&zeros, 5, &band()).unwrap();
        assert_eq!(d.segments[1].len, 5);
        let alt = Block::binary(&"01".repeat(50));
        assert_eq!(decompose_unbounded(&alt, 5, &band()).unwrap().segments.len(), 1);
    }

    #[test]
    fn two_sided_scans_away_from_origin() {
        let x = Block::binary(&format!("{}{}", "1".repeat(23), "0".repeat(21)));
        let d = decompose_two_sided(&x, 23, 5, Some(5), &band()).unwrap();
        d.validate().unwrap();
        let ergodic: Vec<_> = d.ergodic().map(|s| (s.start, s.len)).collect();
        assert_eq!(ergodic, vec![
            (3, 5),
            (8, 5),
            (13, 5),
            (18, 5),
            (23, 5),
            (28, 5),
            (33, 5),
            (38, 5)
        ]);
        assert_eq!(nonergodic_set(&d).points(), &[0, 1, 2, 43]);
    }

    #[test]
    fn audit_examples() {
        let zeros = Block::binary(&"0".repeat(100));
        let cuts: Vec<usize> = (0..=100).step_by(10).collect();
        let a = audit_partition(&zeros, &cuts, &band()).unwrap();
        assert!(a.nonergodic.is_empty());
        assert_eq!(a.verdicts.len(), 10);

        let x = Block::binary("0101");
        let a = audit_partition(&x, &[0, 4], &band()).unwrap();
        assert_eq!(a.verdicts[0].ergodic, band().contains(&x).unwrap());

        assert!(matches!(
            audit_partition(&x, &[0, 2, 2, 4], &band()),
            Err(Error::MalformedCuts(_))
        ));
        assert!(matches!(
            audit_partition(&x, &[0, 5], &band()),
            Err(Error::MalformedCuts(_))
        ));
    }

    #[test]
    fn csv_rows() {
        let d = decompose_block(&Block::binary("000000"), 3, 3, &band()).unwrap();
        assert_eq!(
            d.to_csv(),
            "start,len,kind\n0,0,filler\n0,3,ergodic\n3,0,filler\n3,3,ergodic\n6,0,filler\n"
        );
    }
}
