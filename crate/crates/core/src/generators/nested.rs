//! `B_k = 0^(k+1) 1^(k+1)` arranged in palindromic groups
//! `B_0 | B_1 B_0 B_1 | B_2 B_1 B_0 B_1 B_2 | ...`.

use std::collections::BTreeMap;

use crate::core1d::{Alphabet, Block};
use crate::error::{Error, Result};
use crate::generators::{AnnotatedSequence, Annotation};

fn push_block(out: &mut Vec<u16>, k: usize) {
    out.extend(std::iter::repeat_n(0, k + 1));
    out.extend(std::iter::repeat_n(1, k + 1));
}

/// Prefix of the given length. The `explicit_b0` annotation lists the span of
/// the `B_0` at the center of every group; the `B_0` hidden in the middle of
/// each `B_k` is not marked.
pub fn gen_nested(length: usize) -> Result<AnnotatedSequence> {
    if length < 2 {
        return Err(Error::InvalidParams("length must be at least 2".into()));
    }
    let mut data = Vec::with_capacity(length + 64);
    let mut explicit = Vec::new();
    let mut groups = 0usize;
    while data.len() < length {
        for k in (1..=groups).rev() {
            push_block(&mut data, k);
        }
        if data.len() < length {
            explicit.push([data.len(), (data.len() + 2).min(length)]);
        }
        push_block(&mut data, 0);
        for k in 1..=groups {
            push_block(&mut data, k);
        }
        groups += 1;
    }
    data.truncate(length);
    let mut annotations = BTreeMap::new();
    annotations.insert("explicit_b0".to_string(), Annotation::Spans(explicit));
    let mut meta = BTreeMap::new();
    meta.insert("example".to_string(), "nested".into());
    meta.insert("length".to_string(), length.into());
    meta.insert("groups_started".to_string(), groups.into());
    Ok(AnnotatedSequence {
        block: Block::new(Alphabet::binary(), data)?,
        annotations,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_groups() {
        let s = gen_nested(20).unwrap();
        assert_eq!(s.block, Block::binary("01001101001100011100"));
        let explicit = s.annotation("explicit_b0").unwrap().spans();
        assert_eq!(explicit, vec![[0, 2], [6, 8]]);
    }

    #[test]
    fn group_lengths() {
        // Group g has length 2g^2 + 6g + 2.
        let s = gen_nested(10_000).unwrap();
        let starts: Vec<usize> = s.annotation("explicit_b0").unwrap().spans().iter().map(|s| s[0]).collect();
        let mut offset = 0;
        for (g, &center) in starts.iter().enumerate() {
            let left: usize = (1..=g).map(|k| 2 * k + 2).sum();
            assert_eq!(center, offset + left);
            offset += 2 * g * g + 6 * g + 2;
        }
    }

    #[test]
    fn zeros_balance_out() {
        let s = gen_nested(50_000).unwrap();
        let zeros = s.block.symbols().iter().filter(|&&v| v == 0).count();
        let imbalance = (2 * zeros as i64 - 50_000).unsigned_abs() as usize;
        // At most one unfinished B_k, of length at most 2 * (group count).
        assert!(imbalance <= 2 * s.meta["groups_started"].as_u64().unwrap() as usize + 2);
        assert_eq!(s.block.symbols()[0], 0);
    }
}
