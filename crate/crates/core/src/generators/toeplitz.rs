//! Binary Toeplitz sequence built by periodic filling steps; unfilled cells
//! are the symbol `*`.
//!
//! Notation used below, for step `j >= 1`:
//!
//! * `F_j` is the maximal fully filled block after step `j` and `S_j` the
//!   partly empty block between consecutive copies of `F_j`; the sequence is
//!   periodic with period `P_j = |F_j| + |S_j|`.
//! * `F_1 = 01`, `S_1 = ****`, `P_1 = 6`.
//! * With `r_j = 2 + 2^(j+1)`: `P_j = r_j P_(j-1)`,
//!   `F_j = F S' F S' F` with `F = F_(j-1)`, and
//!   `S_j = S_(j-1) (F_(j-1) S_(j-1))^(r_j - 3)`.
//! * `S'` is `S_(j-1)` with its empty slots filled in order by alternating
//!   runs of `2^(j-1)` zeros and `2^(j-1)` ones.
//!
//! The central `01` of every `F_j` sits at coordinates `0, 1`. The block
//! written `B̄_i` in the usual presentation of this example is `F_(i+1)`.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::core1d::{Alphabet, Block};
use crate::error::{Error, Result};
use crate::generators::{AnnotatedSequence, Annotation};

/// Largest supported number of steps; `P_9` overflows `i64`.
pub const MAX_STEPS: usize = 8;

pub const ZERO: u16 = 0;
pub const ONE: u16 = 1;
pub const STAR: u16 = 2;

pub fn alphabet() -> Alphabet {
    Alphabet::new(["0", "1", "*"]).expect("static alphabet")
}

/// Periods, block lengths and anchors of every step.
#[derive(Clone, Debug)]
pub struct ToeplitzLayout {
    /// Index `j - 1` holds the value for step `j`.
    pub period: Vec<i64>,
    pub filled_len: Vec<i64>,
    pub gap_len: Vec<i64>,
    /// Empty cells of one `S_j`.
    pub gap_slots: Vec<i64>,
    /// Start of the copy of `F_j` centred on the origin.
    pub start: Vec<i64>,
}

impl ToeplitzLayout {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 || steps > MAX_STEPS {
            return Err(Error::InvalidParams(format!("steps must be in 1..={MAX_STEPS}")));
        }
        let mut l = ToeplitzLayout {
            period: vec![6],
            filled_len: vec![2],
            gap_len: vec![4],
            gap_slots: vec![4],
            start: vec![0],
        };
        for j in 2..=steps {
            let r = 2 + (1i64 << (j + 1));
            let (p, b, s, u, st) = (
                l.period[j - 2],
                l.filled_len[j - 2],
                l.gap_len[j - 2],
                l.gap_slots[j - 2],
                l.start[j - 2],
            );
            l.period.push(r * p);
            l.filled_len.push(3 * b + 2 * s);
            l.gap_len.push(r * p - 3 * b - 2 * s);
            l.gap_slots.push((r - 2) * u);
            l.start.push(st - p);
        }
        Ok(l)
    }

    pub fn steps(&self) -> usize {
        self.period.len()
    }

    /// Rank of slot `p` of `S_j` among its empty cells, or `None` if filled.
    fn slot_rank(&self, p: i64, j: usize) -> Option<i64> {
        if j == 1 {
            return Some(p);
        }
        let per = self.period[j - 2];
        let (chunk, rem) = (p / per, p % per);
        if rem < self.gap_len[j - 2] {
            self.slot_rank(rem, j - 1).map(|r| chunk * self.gap_slots[j - 2] + r)
        } else {
            None
        }
    }

    /// Symbol at coordinate `i` after `j` steps and the step that filled it.
    pub fn cell_at_step(&self, i: i64, j: usize) -> (u16, Option<usize>) {
        if j == 1 {
            return match i.rem_euclid(6) {
                0 => (ZERO, Some(1)),
                1 => (ONE, Some(1)),
                _ => (STAR, None),
            };
        }
        let o = (i - self.start[j - 1]).rem_euclid(self.period[j - 1]);
        if o >= self.filled_len[j - 1] {
            return self.cell_at_step(i, j - 1);
        }
        let inner = (i - self.start[j - 2]).rem_euclid(self.period[j - 2]);
        if inner < self.filled_len[j - 2] {
            return self.cell_at_step(i, j - 1);
        }
        match self.slot_rank(inner - self.filled_len[j - 2], j - 1) {
            Some(t) => (((t >> (j - 1)) & 1) as u16, Some(j)),
            None => self.cell_at_step(i, j - 1),
        }
    }

    pub fn cell(&self, i: i64) -> (u16, Option<usize>) {
        self.cell_at_step(i, self.steps())
    }

    /// Number of cells in `range` first filled at each step (index `j - 1`),
    /// and the number left empty.
    pub fn fill_histogram(&self, range: Range<i64>) -> (Vec<u64>, u64) {
        let mut filled = vec![0u64; self.steps()];
        let mut empty = 0;
        for i in range {
            match self.cell(i).1 {
                Some(j) => filled[j - 1] += 1,
                None => empty += 1,
            }
        }
        (filled, empty)
    }

    /// Starts of the copies of `F_j` lying inside `range`.
    pub fn filled_block_starts(&self, j: usize, range: Range<i64>) -> Vec<i64> {
        let p = self.period[j - 1];
        let b = self.filled_len[j - 1];
        let st = self.start[j - 1];
        let mut t = (range.start - st).div_euclid(p);
        let mut out = Vec::new();
        loop {
            let s = st + t * p;
            if s + b > range.end {
                break;
            }
            if s >= range.start {
                out.push(s);
            }
            t += 1;
        }
        out
    }

    /// Offset of the central `01` inside `F_j`.
    pub fn center_offset(&self, j: usize) -> i64 {
        (self.filled_len[j - 1] - 2) / 2
    }

    /// Empty cells per repetition of the fill pattern at step `j >= 2`
    /// divided into the empty cells of one `S_(j-1)`.
    pub fn fill_repetitions(&self, j: usize) -> i64 {
        self.gap_slots[j - 2] / (1i64 << j)
    }
}

/// Coordinates `[-half_width, half_width]` after `steps` steps; coordinate
/// `c` is stored at block index `c + half_width`.
pub fn gen_toeplitz(steps: usize, half_width: usize) -> Result<AnnotatedSequence> {
    let layout = ToeplitzLayout::new(steps)?;
    let w = half_width as i64;
    let k = steps;
    if layout.start[k - 1] < -w || layout.start[k - 1] + layout.filled_len[k - 1] - 1 > w {
        return Err(Error::WindowTooSmall(format!(
            "half width {half_width} cannot hold the central filled block of length {} after {steps} steps",
            layout.filled_len[k - 1]
        )));
    }
    let range = -w..w + 1;
    let mut data = Vec::with_capacity(range.clone().count());
    let mut fills: Vec<Vec<[usize; 2]>> = vec![Vec::new(); k];
    for (idx, i) in range.clone().enumerate() {
        let (symbol, step) = layout.cell(i);
        data.push(symbol);
        if let Some(j) = step {
            let spans = &mut fills[j - 1];
            match spans.last_mut() {
                Some(last) if last[1] == idx => last[1] += 1,
                _ => spans.push([idx, idx + 1]),
            }
        }
    }

    let mut annotations = BTreeMap::new();
    let to_index = |c: i64| (c + w) as usize;
    for (j, spans) in fills.into_iter().enumerate() {
        annotations.insert(format!("fill_step_{}", j + 1), Annotation::Spans(spans));
    }
    for j in 1..=k {
        let b = layout.filled_len[j - 1];
        let spans = layout
            .filled_block_starts(j, range.clone())
            .into_iter()
            .map(|s| [to_index(s), to_index(s + b)])
            .collect();
        annotations.insert(format!("full_block_{}", j - 1), Annotation::Spans(spans));
    }
    annotations.insert("central_b0".to_string(), Annotation::Spans(vec![[to_index(0), to_index(2)]]));

    let unfilled = data.iter().filter(|&&v| v == STAR).count();
    let product: f64 = (2..=k)
        .map(|i| {
            let r = (1u64 << (i + 1)) as f64;
            r / (2.0 + r)
        })
        .product();
    let mut meta = BTreeMap::new();
    meta.insert("example".to_string(), "toeplitz".into());
    meta.insert("steps".to_string(), steps.into());
    meta.insert("half_width".to_string(), half_width.into());
    meta.insert("origin_index".to_string(), half_width.into());
    meta.insert("periods".to_string(), layout.period.clone().into());
    meta.insert("full_block_lengths".to_string(), layout.filled_len.clone().into());
    meta.insert(
        "fill_run_length".to_string(),
        (1..=k).map(|j| if j == 1 { 1 } else { 1u64 << (j - 1) }).collect::<Vec<_>>().into(),
    );
    meta.insert(
        "fill_repetitions".to_string(),
        (2..=k).map(|j| layout.fill_repetitions(j)).collect::<Vec<_>>().into(),
    );
    meta.insert(
        "unfilled_fraction_in_window".to_string(),
        (unfilled as f64 / data.len() as f64).into(),
    );
    meta.insert(
        "unfilled_fraction_exact".to_string(),
        (layout.gap_slots[k - 1] as f64 / layout.period[k - 1] as f64).into(),
    );
    meta.insert("survival_product".to_string(), product.into());
    Ok(AnnotatedSequence {
        block: Block::new(alphabet(), data)?,
        annotations,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_values() {
        let l = ToeplitzLayout::new(5).unwrap();
        assert_eq!(l.period, vec![6, 60, 1080, 36720, 2_423_520]);
        assert_eq!(l.filled_len, vec![2, 14, 134, 2294, 75734]);
        assert_eq!(l.start, vec![0, -6, -66, -1146, -37866]);
        assert_eq!(l.gap_slots[1], 32);
        assert_eq!(l.fill_repetitions(3), 4);
        for j in 1..=5 {
            assert_eq!(l.start[j - 1] + l.center_offset(j), 0);
        }
    }

    #[test]
    fn step_one_pattern() {
        let s = gen_toeplitz(1, 12).unwrap();
        assert_eq!(s.block.to_string(), "01****01****01****01****0");
    }

    #[test]
    fn step_two_blocks() {
        let s = gen_toeplitz(2, 40).unwrap();
        let spans = s.annotation("full_block_1").unwrap().spans();
        let central = spans.iter().find(|sp| sp[0] <= 40 && 40 < sp[1]).unwrap();
        assert_eq!(s.block.slice(central[0]..central[1]).to_string(), "01001101001101");
    }

    #[test]
    fn step_three_gap_fill() {
        let l = ToeplitzLayout::new(3).unwrap();
        // The filled S_2 right after the central F_2.
        let from = l.start[1] + l.filled_len[1];
        let text: String = (from..from + l.gap_len[1])
            .map(|i| ["0", "1", "*"][l.cell(i).0 as usize])
            .collect();
        let expected = "0000 01 1111 01 0000 01 1111 01 0000 01 1111 01 0000 01 1111".replace(' ', "");
        assert_eq!(text, expected);
    }

    #[test]
    fn steps_never_overwrite() {
        let small = ToeplitzLayout::new(2).unwrap();
        let big = ToeplitzLayout::new(4).unwrap();
        for i in -5000..5000 {
            let (v, step) = small.cell(i);
            if step.is_some() {
                assert_eq!(big.cell(i), (v, step));
            }
        }
    }

    #[test]
    fn fills_are_periodic() {
        let s = gen_toeplitz(3, 3000).unwrap();
        let l = ToeplitzLayout::new(3).unwrap();
        for step in 1..=3 {
            let p = l.period[step - 1] as usize;
            let cells: std::collections::BTreeSet<usize> =
                s.annotation(&format!("fill_step_{step}")).unwrap().coordinates().into_iter().collect();
            for &c in &cells {
                if c + p < s.block.len() {
                    assert!(cells.contains(&(c + p)));
                    assert_eq!(s.block.symbols()[c], s.block.symbols()[c + p]);
                }
            }
        }
    }

    #[test]
    fn too_small_window() {
        assert!(matches!(gen_toeplitz(3, 50), Err(Error::WindowTooSmall(_))));
    }
}
