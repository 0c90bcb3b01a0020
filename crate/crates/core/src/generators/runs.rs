//! `B_k = 1^(3k) 0^(3k)`; super-group `K` is `K` copies of each of
//! `B_1, ..., B_K` in order.

use std::collections::BTreeMap;

use crate::core1d::{Alphabet, Block};
use crate::error::{Error, Result};
use crate::generators::{AnnotatedSequence, Annotation};
use crate::rational::ratio;
use crate::region::Region;

/// One maximal run of copies of a single `B_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Series {
    pub group: usize,
    pub k: usize,
    /// Half-open span.
    pub start: usize,
    pub end: usize,
}

fn series_layout(length: usize) -> Vec<Series> {
    let mut out = Vec::new();
    let mut pos = 0;
    let mut group = 1;
    while pos < length {
        for k in 1..=group {
            let len = group * 6 * k;
            out.push(Series {
                group,
                k,
                start: pos,
                end: pos + len,
            });
            pos += len;
            if pos >= length {
                break;
            }
        }
        group += 1;
    }
    out
}

/// Prefix of the given length. Annotation `series` holds the span of every
/// repetition series (truncated at the end); meta `series_index` lists the
/// matching `[group, k]` pairs.
pub fn gen_runs(length: usize) -> Result<AnnotatedSequence> {
    if length < 6 {
        return Err(Error::InvalidParams("length must be at least 6".into()));
    }
    let layout = series_layout(length);
    let mut data = Vec::with_capacity(length);
    for s in &layout {
        for _ in 0..s.group {
            data.extend(std::iter::repeat_n(1, 3 * s.k));
            data.extend(std::iter::repeat_n(0, 3 * s.k));
        }
    }
    data.truncate(length);
    let spans = layout.iter().map(|s| [s.start, s.end.min(length)]).collect();
    let index: Vec<[usize; 2]> = layout.iter().map(|s| [s.group, s.k]).collect();
    let mut annotations = BTreeMap::new();
    annotations.insert("series".to_string(), Annotation::Spans(spans));
    let mut meta = BTreeMap::new();
    meta.insert("example".to_string(), "runs".into());
    meta.insert("length".to_string(), length.into());
    meta.insert("series_index".to_string(), serde_json::to_value(index).expect("pairs serialize"));
    Ok(AnnotatedSequence {
        block: Block::new(Alphabet::binary(), data)?,
        annotations,
        meta,
    })
}

/// Splits `len >= (m-1) m` into parts of length `m` and `m + 1`.
fn split_gap(len: usize, m: usize, start: usize, cuts: &mut Vec<usize>) {
    let (q, r) = (len / m, len % m);
    debug_assert!(r <= q);
    let mut pos = start;
    for i in 0..q {
        pos += if i < r { m + 1 } else { m };
        cuts.push(pos);
    }
}

/// Cut positions for the partition built around the series of `B_k`: every
/// complete series of `B_k` far enough from the previous one has its interior
/// cut into blocks of length `3k`, each with one third or two thirds zeros,
/// and the stretch before it is cut into blocks of length `3k` or `3k + 1`.
/// The cuts start at 0 and end after the last interior block.
pub fn runs_cuts(seq: &AnnotatedSequence, k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let series = seq
        .annotation("series")
        .ok_or_else(|| Error::InvalidParams("sequence has no series annotation".into()))?
        .spans();
    let index: Vec<[usize; 2]> = seq
        .meta
        .get("series_index")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or_else(|| Error::InvalidParams("sequence has no series index".into()))?;
    let m = 3 * k;
    let min_gap = (m - 1) * m;
    let mut cuts = vec![0];
    let mut cursor = 0;
    for (span, id) in series.iter().zip(&index) {
        if id[1] != k || span[1] - span[0] != id[0] * 2 * m {
            continue;
        }
        let interior_start = span[0] + k;
        // Inclusive end m_s - 2k, with m_s = span[1] - 1.
        let interior_end = span[1] - 2 * k;
        if interior_start < cursor + min_gap {
            continue;
        }
        split_gap(interior_start - cursor, m, cursor, &mut cuts);
        let mut pos = interior_start;
        while pos < interior_end {
            pos += m;
            cuts.push(pos);
        }
        cursor = interior_end;
    }
    if cuts.len() < 2 {
        return Err(Error::WindowTooSmall(format!("no usable series of B_{k} in the sequence")));
    }
    Ok(cuts)
}

/// Blocks whose frequency of `0` avoids `[1/5, 2/5]` and `[3/5, 4/5]`.
pub fn runs_region() -> Region {
    Region::Intersection(vec![
        Region::frequency_window("0", ratio(1, 5), ratio(2, 5), 1).expect("valid window"),
        Region::frequency_window("0", ratio(3, 5), ratio(4, 5), 1).expect("valid window"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::frequency;
    use crate::decompose::audit_partition;

    #[test]
    fn prefix() {
        let s = gen_runs(60).unwrap();
        let text = "111000111000111000111111000000111111000000111000111000111000";
        assert_eq!(s.block, Block::binary(text));
    }

    #[test]
    fn series_structure() {
        let s = gen_runs(200_000).unwrap();
        let spans = s.annotation("series").unwrap().spans();
        let index: Vec<[usize; 2]> = serde_json::from_value(s.meta["series_index"].clone()).unwrap();
        for w in spans.windows(2) {
            assert_eq!(w[0][1], w[1][0]);
        }
        for (span, [group, k]) in spans.iter().zip(&index).take(spans.len() - 1) {
            assert_eq!(span[1] - span[0], group * 6 * k);
        }
        // Through super-group 20.
        let end = spans[index.iter().position(|&[g, k]| g == 20 && k == 20).unwrap()][1];
        assert_eq!(end, 140_910);
    }

    #[test]
    fn interior_blocks_are_thirds() {
        let s = gen_runs(40_000).unwrap();
        let one_third = ratio(1, 3);
        let two_thirds = ratio(2, 3);
        let zero = Block::binary("0");
        for k in 1..=4 {
            let cuts = runs_cuts(&s, k).unwrap();
            let audit = audit_partition(&s.block, &cuts, &runs_region()).unwrap();
            let mut interior = 0;
            for v in &audit.verdicts {
                assert!(v.len == 3 * k || v.len == 3 * k + 1);
                let f = frequency(&s.block.slice(v.start..v.start + v.len), &zero).unwrap();
                if f == one_third || f == two_thirds {
                    assert!(!v.ergodic);
                    interior += 1;
                }
            }
            assert!(interior > 0);
        }
    }
}
