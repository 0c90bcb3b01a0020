//! The depth-truncated d* distance between block profiles and shift-invariant
//! measures, measure tables, and barycenters.
//!
//! ```text
//! d*(u, v) = sum_l 2^-l * sum_{|C| = l} |u(C) - v(C)|
//! ```
//!
//! Summation stops at depth `L`. Each per-length term is at most 2, so the
//! discarded remainder is at most `2^(1-L)`; [`DistanceBound`] carries both.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::core1d::{profile_of_symbols, word_from_index, Alphabet, Block, FrequencyProfile};
use crate::error::{Error, Result};
use crate::rational::{self, int, pow2_inv, ratio, to_f64, Rational};

/// Anything that assigns a value to every word of length `1..=depth`.
pub trait CylinderTable {
    fn alphabet(&self) -> &Alphabet;
    fn depth(&self) -> usize;
    /// Value of the word with index `idx` among words of length `len`.
    fn exact(&self, len: usize, idx: usize) -> Rational;
    fn approx(&self, len: usize, idx: usize) -> f64;
}

impl CylinderTable for FrequencyProfile {
    fn alphabet(&self) -> &Alphabet {
        FrequencyProfile::alphabet(self)
    }

    fn depth(&self) -> usize {
        FrequencyProfile::depth(self)
    }

    fn exact(&self, len: usize, idx: usize) -> Rational {
        ratio(self.counts(len)[idx], self.source_length() as u64)
    }

    fn approx(&self, len: usize, idx: usize) -> f64 {
        self.counts(len)[idx] as f64 / self.source_length() as f64
    }
}

/// Truncated distance with a certified bound on the discarded remainder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceBound {
    pub partial: f64,
    pub tail: f64,
    pub depth: usize,
}

impl DistanceBound {
    /// Largest value the untruncated distance can take.
    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }
}

/// `2^(1-L)`.
pub fn tail_bound(depth: usize) -> f64 {
    2f64.powi(1 - depth as i32)
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

pub fn d_star(u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize) -> Result<DistanceBound> {
    check_pair(u, v, depth)?;
    let q = u.alphabet().size();
    let mut partial = 0.0;
    let mut words = 1usize;
    for l in 1..=depth {
        words *= q;
        let mut sum = 0.0;
        for idx in 0..words {
            sum += (u.approx(l, idx) - v.approx(l, idx)).abs();
        }
        partial += sum * 0.5f64.powi(l as i32);
    }
    Ok(DistanceBound {
        partial,
        tail: tail_bound(depth),
        depth,
    })
}

/// The truncated sum in exact arithmetic.
pub fn d_star_exact(u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize) -> Result<Rational> {
    check_pair(u, v, depth)?;
    let q = u.alphabet().size();
    let mut partial = Rational::zero();
    let mut words = 1usize;
    for l in 1..=depth {
        words *= q;
        let mut sum = Rational::zero();
        for idx in 0..words {
            sum += (u.exact(l, idx) - v.exact(l, idx)).abs();
        }
        partial += sum * pow2_inv(l);
    }
    Ok(partial)
}

/// Cylinder values of a shift-invariant measure up to a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    alphabet: Alphabet,
    tables: Vec<Vec<Rational>>,
    approx: Vec<Vec<f64>>,
}

impl CylinderTable for MeasureSpec {
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

impl MeasureSpec {
    fn build(alphabet: Alphabet, tables: Vec<Vec<Rational>>) -> Self {
        let approx = tables
            .iter()
            .map(|t| t.iter().map(to_f64).collect())
            .collect();
        MeasureSpec {
            alphabet,
            tables,
            approx,
        }
    }

    /// Validates and wraps per-length tables (`tables[l-1]` holds words of
    /// length `l` in word-index order).
    pub fn from_tables(alphabet: Alphabet, tables: Vec<Vec<Rational>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::InvalidMeasure("depth must be at least 1".into()));
        }
        let q = alphabet.size();
        for (i, t) in tables.iter().enumerate() {
            let l = i + 1;
            if t.len() != alphabet.word_count(l)? {
                return Err(Error::InvalidMeasure(format!(
                    "length-{l} table has {} entries, expected {}",
                    t.len(),
                    q.pow(l as u32)
                )));
            }
            if let Some(bad) = t.iter().find(|v| !rational::in_unit_interval(v)) {
                return Err(Error::InvalidMeasure(format!(
                    "value {} outside [0,1]",
                    rational::format(bad)
                )));
            }
            let sum: Rational = t.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidMeasure(format!(
                    "length-{l} values sum to {}",
                    rational::format(&sum)
                )));
            }
        }
        for l in 1..tables.len() {
            let short = &tables[l - 1];
            let long = &tables[l];
            let shift = q.pow(l as u32);
            for (idx, value) in short.iter().enumerate() {
                let right: Rational = (0..q).map(|a| &long[idx * q + a]).sum();
                let left: Rational = (0..q).map(|a| &long[a * shift + idx]).sum();
                if &right != value || &left != value {
                    let word = alphabet.format_word(&word_from_index(idx, l, q));
                    return Err(Error::InvalidMeasure(format!(
                        "word `{word}` is not consistent with its extensions"
                    )));
                }
            }
        }
        Ok(MeasureSpec::build(alphabet, tables))
    }

    /// Product measure with the given per-symbol probabilities.
    pub fn bernoulli(alphabet: Alphabet, probs: &[Rational], depth: usize) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::InvalidMeasure(format!(
                "{} probabilities for an alphabet of {} symbols",
                probs.len(),
                alphabet.size()
            )));
        }
        if probs.iter().any(|p| !rational::in_unit_interval(p))
            || !probs.iter().sum::<Rational>().is_one()
        {
            return Err(Error::InvalidMeasure(
                "probabilities must lie in [0,1] and sum to 1".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::InvalidMeasure("depth must be at least 1".into()));
        }
        let q = alphabet.size();
        let mut tables: Vec<Vec<Rational>> = vec![probs.to_vec()];
        for _ in 1..depth {
            let prev = tables.last().unwrap();
            alphabet.word_count(tables.len() + 1)?;
            let mut next = Vec::with_capacity(prev.len() * q);
            for v in prev {
                for p in probs {
                    next.push(v * p);
                }
            }
            tables.push(next);
        }
        Ok(MeasureSpec::build(alphabet, tables))
    }

    /// Binary product measure where `p` is the probability of symbol `1`.
    pub fn bernoulli_binary(p: Rational, depth: usize) -> Result<Self> {
        let probs = [int(1) - &p, p];
        MeasureSpec::bernoulli(Alphabet::binary(), &probs, depth)
    }

    /// Point mass on the constant sequence `s s s ...`.
    pub fn dirac(alphabet: Alphabet, symbol: u16, depth: usize) -> Result<Self> {
        let q = alphabet.size();
        if symbol as usize >= q {
            return Err(Error::SymbolOutOfRange {
                index: symbol as usize,
                size: q,
            });
        }
        let mut probs = vec![Rational::zero(); q];
        probs[symbol as usize] = Rational::one();
        MeasureSpec::bernoulli(alphabet, &probs, depth)
    }

    /// Uniform measure on the orbit of the periodic sequence `B B B ...`.
    pub fn periodic(block: &Block, depth: usize) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::EmptyBlock);
        }
        let alphabet = block.alphabet().clone();
        let q = alphabet.size();
        let data = block.symbols();
        let p = data.len();
        let mut tables = Vec::with_capacity(depth);
        for l in 1..=depth {
            let mut counts = vec![0u64; alphabet.word_count(l)?];
            for start in 0..p {
                let idx = (0..l).fold(0usize, |acc, s| acc * q + data[(start + s) % p] as usize);
                counts[idx] += 1;
            }
            tables.push(counts.into_iter().map(|c| ratio(c, p as u64)).collect());
        }
        Ok(MeasureSpec::build(alphabet, tables))
    }

    pub fn value(&self, word: &[u16]) -> Rational {
        if word.is_empty() {
            return Rational::one();
        }
        if word.len() > self.depth() {
            return Rational::zero();
        }
        let idx = crate::core1d::word_index(word, self.alphabet.size());
        self.tables[word.len() - 1][idx].clone()
    }

    pub fn table(&self, len: usize) -> &[Rational] {
        &self.tables[len - 1]
    }

    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::DepthShortfall {
                needed: depth,
                available: self.depth(),
            });
        }
        Ok(MeasureSpec::build(
            self.alphabet.clone(),
            self.tables[..depth].to_vec(),
        ))
    }

    pub fn to_json(&self) -> MeasureSpecJson {
        let q = self.alphabet.size();
        let mut tables = BTreeMap::new();
        for (i, t) in self.tables.iter().enumerate() {
            let row = t
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let word = self.alphabet.format_word(&word_from_index(idx, i + 1, q));
                    (word, rational::format(v))
                })
                .collect();
            tables.insert((i + 1).to_string(), row);
        }
        MeasureSpecJson::Tables {
            alphabet: self.alphabet.symbols().to_vec(),
            depth: self.depth(),
            tables,
        }
    }

    pub fn from_json(json: &MeasureSpecJson) -> Result<Self> {
        match json {
            MeasureSpecJson::Tables {
                alphabet,
                depth,
                tables,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                let q = alphabet.size();
                let mut out = Vec::with_capacity(*depth);
                for l in 1..=*depth {
                    let row = tables.get(&l.to_string()).ok_or_else(|| {
                        Error::InvalidMeasure(format!("missing table for length {l}"))
                    })?;
                    let mut values = vec![None; alphabet.word_count(l)?];
                    for (word, value) in row {
                        let symbols = alphabet.parse_word(word)?;
                        if symbols.len() != l {
                            return Err(Error::InvalidMeasure(format!(
                                "word `{word}` listed under length {l}"
                            )));
                        }
                        let idx = crate::core1d::word_index(&symbols, q);
                        values[idx] = Some(rational::parse(value)?);
                    }
                    // Omitted words have value zero.
                    out.push(values.into_iter().map(Option::unwrap_or_default).collect());
                }
                MeasureSpec::from_tables(alphabet, out)
            }
            MeasureSpecJson::Bernoulli {
                alphabet,
                depth,
                bernoulli,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                let probs = bernoulli
                    .iter()
                    .map(|p| rational::parse(p))
                    .collect::<Result<Vec<_>>>()?;
                MeasureSpec::bernoulli(alphabet, &probs, *depth)
            }
            MeasureSpecJson::Periodic {
                alphabet,
                depth,
                periodic,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                MeasureSpec::periodic(&Block::parse(&alphabet, periodic)?, *depth)
            }
        }
    }
}

/// Serialized form of a [`MeasureSpec`]. Besides explicit tables, product
/// and periodic measures may be given by their parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpecJson {
    Tables {
        alphabet: Vec<String>,
        depth: usize,
        tables: BTreeMap<String, BTreeMap<String, String>>,
    },
    Bernoulli {
        alphabet: Vec<String>,
        depth: usize,
        bernoulli: Vec<String>,
    },
    Periodic {
        alphabet: Vec<String>,
        depth: usize,
        periodic: String,
    },
}

impl Serialize for MeasureSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasureSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MeasureSpecJson::deserialize(d)?;
        MeasureSpec::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// Convex combination of measure tables.
pub fn barycenter(weights: &[Rational], specs: &[MeasureSpec]) -> Result<MeasureSpec> {
    let first = specs.first().ok_or(Error::EmptySpecList)?;
    if weights.len() != specs.len()
        || weights.iter().any(Signed::is_negative)
        || !weights.iter().sum::<Rational>().is_one()
    {
        return Err(Error::WeightSum);
    }
    if specs
        .iter()
        .any(|s| s.depth() != first.depth() || s.alphabet != first.alphabet)
    {
        return Err(Error::MixedDepths);
    }
    let tables = (0..first.depth())
        .map(|l| {
            (0..first.tables[l].len())
                .map(|idx| {
                    weights
                        .iter()
                        .zip(specs)
                        .map(|(w, s)| w * &s.tables[l][idx])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(MeasureSpec::build(first.alphabet.clone(), tables))
}

/// Distance from a block to the nearest of several measures; ties go to the
/// lowest index.
pub fn distance_to_set(
    b: &Block,
    specs: &[MeasureSpec],
    depth: usize,
) -> Result<(DistanceBound, usize)> {
    if specs.is_empty() {
        return Err(Error::EmptySpecList);
    }
    let prof = crate::core1d::profile(b, depth)?;
    let mut best: Option<(DistanceBound, usize)> = None;
    for (i, spec) in specs.iter().enumerate() {
        let d = d_star(&prof, spec, depth)?;
        if best.is_none_or(|(b, _)| d.partial < b.partial) {
            best = Some((d, i));
        }
    }
    Ok(best.unwrap())
}

/// Distance from each prefix `x[0..n)` to `spec`.
pub fn genericity_curve(
    x: &Block,
    spec: &MeasureSpec,
    checkpoints: &[usize],
) -> Result<Vec<DistanceBound>> {
    let depth = spec.depth();
    checkpoints
        .iter()
        .map(|&n| {
            if n > x.len() {
                return Err(Error::CheckpointExceedsLength {
                    checkpoint: n,
                    len: x.len(),
                });
            }
            let prof = profile_of_symbols(x.alphabet(), &x.symbols()[..n], depth)?;
            d_star(&prof, spec, depth)
        })
        .collect()
}

/// Additive slack in the concatenation bound: the distance from a
/// concatenation to the length-weighted barycenter exceeds the weighted sum of
/// the parts' distances by at most this much, at every depth.
pub fn concatenation_correction(lengths: &[usize]) -> Result<Rational> {
    let min = lengths
        .iter()
        .copied()
        .min()
        .ok_or_else(|| Error::InvalidParams("no blocks".into()))?;
    if min == 0 {
        return Err(Error::EmptyBlock);
    }
    Ok(ratio(6, min as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::profile;

    fn prof(s: &str, depth: usize) -> FrequencyProfile {
        profile(&Block::binary(s), depth).unwrap()
    }

    #[test]
    fn d_star_examples() {
        let a = prof("0011010", 4);
        assert_eq!(d_star(&a, &a, 4).unwrap().partial, 0.0);
        for l in 1..5 {
            let d = d_star(&prof("0", l), &prof("1", l), l).unwrap();
            assert_eq!(d.partial, 1.0);
            assert_eq!(d.tail, tail_bound(l));
        }
        let d = d_star_exact(&prof("01", 3), &prof("10", 3), 3).unwrap();
        assert_eq!(d, ratio(1, 4));
    }

    #[test]
    fn d_star_errors() {
        assert!(matches!(
            d_star(&prof("01", 2), &prof("01", 3), 3),
            Err(Error::DepthShortfall { .. })
        ));
        let abc = Alphabet::new(["a", "b"]).unwrap();
        let other = profile(&Block::parse(&abc, "ab").unwrap(), 1).unwrap();
        assert!(matches!(
            d_star(&prof("01", 1), &other, 1),
            Err(Error::AlphabetMismatch)
        ));
    }

    #[test]
    fn barycenter_examples() {
        let zero = MeasureSpec::dirac(Alphabet::binary(), 0, 3).unwrap();
        let one = MeasureSpec::dirac(Alphabet::binary(), 1, 3).unwrap();
        let b = barycenter(&[int(1), int(0)], &[zero.clone(), one.clone()]).unwrap();
        assert_eq!(b, zero);
        let b = barycenter(&[ratio(1, 2), ratio(1, 2)], &[zero.clone(), one.clone()]).unwrap();
        assert_eq!(b.value(&[0]), ratio(1, 2));
        assert_eq!(b.value(&[1]), ratio(1, 2));

        let p0 = MeasureSpec::bernoulli_binary(int(0), 3).unwrap();
        let p1 = MeasureSpec::bernoulli_binary(int(1), 3).unwrap();
        let b = barycenter(&[ratio(1, 3), ratio(2, 3)], &[p0, p1]).unwrap();
        assert_eq!(b.value(&[0]), ratio(1, 3));
        MeasureSpec::from_tables(Alphabet::binary(), b.tables.clone()).unwrap();

        assert!(matches!(
            barycenter(&[ratio(1, 2), ratio(1, 3)], &[zero.clone(), one]),
            Err(Error::WeightSum)
        ));
        let shallow = zero.truncate(2).unwrap();
        assert!(matches!(
            barycenter(&[ratio(1, 2), ratio(1, 2)], &[zero.clone(), shallow]),
            Err(Error::MixedDepths)
        ));
        let same = barycenter(&[ratio(1, 4), ratio(3, 4)], &[zero.clone(), zero.clone()]).unwrap();
        assert_eq!(same, zero);
    }

    #[test]
    fn distance_to_set_examples() {
        let specs = [
            MeasureSpec::dirac(Alphabet::binary(), 0, 6).unwrap(),
            MeasureSpec::dirac(Alphabet::binary(), 1, 6).unwrap(),
        ];
        let (d, i) = distance_to_set(&Block::binary(&"0".repeat(100)), &specs, 6).unwrap();
        assert_eq!(i, 0);
        assert!(d.partial < 0.01);

        let (d, i) = distance_to_set(&Block::binary(&"01".repeat(50)), &specs, 6).unwrap();
        assert_eq!(i, 0);
        assert!(d.partial >= 0.5);

        let single = distance_to_set(&Block::binary("0110"), &specs[1..], 4).unwrap();
        let direct = d_star(&prof("0110", 4), &specs[1], 4).unwrap();
        assert_eq!(single, (direct, 0));
        assert!(matches!(
            distance_to_set(&Block::binary("0"), &[], 2),
            Err(Error::EmptySpecList)
        ));
    }

    #[test]
    fn genericity_on_constant_sequence() {
        let spec = MeasureSpec::dirac(Alphabet::binary(), 0, 5).unwrap();
        let x = Block::binary(&"0".repeat(1000));
        let curve = genericity_curve(&x, &spec, &[10, 100, 1000]).unwrap();
        // Only the l-1 windows missing at the right end differ.
        for (d, n) in curve.iter().zip([10.0, 100.0, 1000.0]) {
            let expected: f64 = (1..=5).map(|l| (l - 1) as f64 / n / 2f64.powi(l)).sum();
            assert!((d.partial - expected).abs() < 1e-12);
        }
        assert!(genericity_curve(&x, &spec, &[]).unwrap().is_empty());
        assert!(matches!(
            genericity_curve(&x, &spec, &[1001]),
            Err(Error::CheckpointExceedsLength { .. })
        ));
    }

    #[test]
    fn measure_validation() {
        let bad = vec![vec![ratio(1, 2), ratio(1, 2)], vec![
            ratio(1, 2),
            int(0),
            int(0),
            ratio(1, 2),
        ]];
        MeasureSpec::from_tables(Alphabet::binary(), bad).unwrap();
        let inconsistent = vec![vec![ratio(1, 2), ratio(1, 2)], vec![
            ratio(1, 2),
            int(0),
            ratio(1, 2),
            int(0),
        ]];
        assert!(matches!(
            MeasureSpec::from_tables(Alphabet::binary(), inconsistent),
            Err(Error::InvalidMeasure(_))
        ));
        let unnormalized = vec![vec![ratio(1, 2), ratio(1, 3)]];
        assert!(MeasureSpec::from_tables(Alphabet::binary(), unnormalized).is_err());
    }

    #[test]
    fn periodic_measure_is_valid() {
        let spec = MeasureSpec::periodic(&Block::binary("0010111"), 4).unwrap();
        MeasureSpec::from_tables(Alphabet::binary(), spec.tables.clone()).unwrap();
        assert_eq!(spec.value(&[0, 0]), ratio(1, 7));
    }

    #[test]
    fn json_roundtrip() {
        let spec = MeasureSpec::bernoulli_binary(ratio(1, 3), 3).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"2/9\""));
        let back: MeasureSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);

        let short: MeasureSpec = serde_json::from_str(
            r#"{"alphabet":["0","1"],"depth":3,"bernoulli":["2/3","1/3"]}"#,
        )
        .unwrap();
        assert_eq!(short, spec);
        let per: MeasureSpec =
            serde_json::from_str(r#"{"alphabet":["0","1"],"depth":2,"periodic":"01"}"#).unwrap();
        assert_eq!(per.value(&[0, 1]), ratio(1, 2));
    }
}
