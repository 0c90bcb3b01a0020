//! Finite words over a finite alphabet, occurrence counting and frequency
//! profiles.
//!
//! `Fr_B(C)` is the number of positions `i` in `[0, |B| - |C|]` at which `C`
//! occurs in `B`, divided by `|B|`. It is zero when `|C| > |B|` and undefined
//! for the empty block. All frequencies here are exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

/// Largest number of entries allowed in a single per-length table.
pub const MAX_TABLE_ENTRIES: u128 = 1 << 26;

#[derive(Debug)]
struct AlphabetInner {
    symbols: Vec<String>,
    index: HashMap<String, u16>,
}

/// An ordered list of distinct symbol labels.
#[derive(Clone, Debug)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.symbols == other.inner.symbols
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = labels.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if symbols.len() > u16::MAX as usize {
            return Err(Error::InvalidParams("alphabet exceeds 65535 symbols".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Parse(format!("invalid symbol label `{s}`")));
            }
            if index.insert(s.clone(), i as u16).is_some() {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { symbols, index }),
        })
    }

    /// The alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet::new(["0", "1"]).expect("static alphabet")
    }

    pub fn size(&self) -> usize {
        self.inner.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.inner.symbols
    }

    pub fn label(&self, index: u16) -> &str {
        &self.inner.symbols[index as usize]
    }

    pub fn index(&self, label: &str) -> Result<u16> {
        self.inner
            .index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// True when every label is a single character, so words can be written
    /// without separators.
    pub fn is_compact(&self) -> bool {
        self.inner.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word: one character per symbol for compact alphabets, else
    /// whitespace-separated labels.
    pub fn parse_word(&self, text: &str) -> Result<Vec<u16>> {
        if self.is_compact() {
            let mut buf = [0u8; 4];
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| self.index(c.encode_utf8(&mut buf)))
                .collect()
        } else {
            text.split_whitespace().map(|t| self.index(t)).collect()
        }
    }

    pub fn format_word(&self, word: &[u16]) -> String {
        let sep = if self.is_compact() { "" } else { " " };
        word.iter()
            .map(|&s| self.label(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Number of words of length `len`, guarded against overflow.
    pub fn word_count(&self, len: usize) -> Result<usize> {
        let n = (self.size() as u128).checked_pow(len as u32);
        match n {
            Some(n) if n <= MAX_TABLE_ENTRIES => Ok(n as usize),
            Some(n) => Err(Error::TableTooLarge(n)),
            None => Err(Error::TableTooLarge(u128::MAX)),
        }
    }
}

/// Index of a word in base `q`, first symbol most significant.
pub fn word_index(word: &[u16], q: usize) -> usize {
    word.iter().fold(0usize, |acc, &s| acc * q + s as usize)
}

pub fn word_from_index(mut index: usize, len: usize, q: usize) -> Vec<u16> {
    let mut out = vec![0u16; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as u16;
        index /= q;
    }
    out
}

/// A finite word over an alphabet. The empty block is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    alphabet: Alphabet,
    data: Vec<u16>,
}

impl Block {
    pub fn new(alphabet: Alphabet, data: Vec<u16>) -> Result<Self> {
        let size = alphabet.size();
        if let Some(&bad) = data.iter().find(|&&s| s as usize >= size) {
            return Err(Error::SymbolOutOfRange {
                index: bad as usize,
                size,
            });
        }
        Ok(Block { alphabet, data })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Block {
            alphabet,
            data: Vec::new(),
        }
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let data = alphabet.parse_word(text)?;
        Ok(Block {
            alphabet: alphabet.clone(),
            data,
        })
    }

    /// Shorthand for binary words in tests and examples.
    pub fn binary(text: &str) -> Self {
        Block::parse(&Alphabet::binary(), text).expect("binary word")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[u16] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn slice(&self, range: Range<usize>) -> Block {
        Block {
            alphabet: self.alphabet.clone(),
            data: self.data[range].to_vec(),
        }
    }

    pub fn into_symbols(self) -> Vec<u16> {
        self.data
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.format_word(&self.data))
    }
}

/// Counts (possibly overlapping) occurrences of `needle` in `hay` with the
/// Knuth-Morris-Pratt automaton.
pub fn count_occurrences(hay: &[u16], needle: &[u16]) -> usize {
    if needle.is_empty() {
        return hay.len() + 1;
    }
    if needle.len() > hay.len() {
        return 0;
    }
    let mut fail = vec![0usize; needle.len()];
    let mut k = 0;
    for i in 1..needle.len() {
        while k > 0 && needle[i] != needle[k] {
            k = fail[k - 1];
        }
        if needle[i] == needle[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut count = 0;
    let mut k = 0;
    for &s in hay {
        while k > 0 && s != needle[k] {
            k = fail[k - 1];
        }
        if s == needle[k] {
            k += 1;
        }
        if k == needle.len() {
            count += 1;
            k = fail[k - 1];
        }
    }
    count
}

/// `Fr_B(C)`.
pub fn frequency(b: &Block, c: &Block) -> Result<Rational> {
    if b.alphabet != c.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    if b.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let count = if c.len() > b.len() {
        0
    } else {
        count_occurrences(&b.data, &c.data)
    };
    Ok(ratio(count as u64, b.len() as u64))
}

/// Occurrence counts of every word of length `1..=depth` in a block; the
/// frequency of a word is its count over `source_length`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyProfile {
    alphabet: Alphabet,
    depth: usize,
    source_length: usize,
    counts: Vec<Vec<u64>>,
}

impl FrequencyProfile {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `|B|` of the originating block.
    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Raw occurrence counts for words of length `len`, indexed by
    /// [`word_index`].
    pub fn counts(&self, len: usize) -> &[u64] {
        &self.counts[len - 1]
    }

    pub fn value(&self, word: &[u16]) -> Rational {
        if word.is_empty() || word.len() > self.depth {
            return ratio(0, 1);
        }
        let idx = word_index(word, self.alphabet.size());
        ratio(self.counts[word.len() - 1][idx], self.source_length as u64)
    }
}

/// Frequencies of all words up to length `depth` in `b`.
pub fn profile(b: &Block, depth: usize) -> Result<FrequencyProfile> {
    profile_of_symbols(b.alphabet(), b.symbols(), depth)
}

pub(crate) fn profile_of_symbols(
    alphabet: &Alphabet,
    data: &[u16],
    depth: usize,
) -> Result<FrequencyProfile> {
    if data.is_empty() {
        return Err(Error::EmptyBlock);
    }
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let q = alphabet.size();
    let mut counts = Vec::with_capacity(depth);
    for l in 1..=depth {
        counts.push(vec![0u64; alphabet.word_count(l)?]);
    }
    for start in 0..data.len() {
        let mut idx = 0usize;
        for (l, &s) in data[start..].iter().take(depth).enumerate() {
            idx = idx * q + s as usize;
            counts[l][idx] += 1;
        }
    }
    Ok(FrequencyProfile {
        alphabet: alphabet.clone(),
        depth,
        source_length: data.len(),
        counts,
    })
}

/// Juxtaposes blocks in order.
pub fn concat(blocks: &[Block]) -> Result<Block> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidParams("concat needs at least one block".into()));
    };
    let alphabet = first.alphabet.clone();
    let mut data = Vec::with_capacity(blocks.iter().map(Block::len).sum());
    for b in blocks {
        if b.alphabet != alphabet {
            return Err(Error::AlphabetMismatch);
        }
        data.extend_from_slice(&b.data);
    }
    Ok(Block { alphabet, data })
}

/// Reads the sequence file format: a header line `alphabet: a b c` followed
/// by the data, one character per symbol for single-character alphabets and
/// whitespace-separated labels otherwise.
pub fn read_sequence(text: &str) -> Result<Block> {
    let mut lines = text.splitn(2, '\n');
    let header = lines.next().unwrap_or_default().trim();
    let labels = header
        .strip_prefix("alphabet:")
        .ok_or_else(|| Error::Parse("missing `alphabet:` header".into()))?;
    let alphabet = Alphabet::new(labels.split_whitespace())?;
    Block::parse(&alphabet, lines.next().unwrap_or_default())
}

pub fn write_sequence(b: &Block) -> String {
    let mut out = format!("alphabet: {}\n", b.alphabet.symbols().join(" "));
    out.push_str(&b.to_string());
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn frequency_examples() {
        assert_eq!(
            frequency(&Block::binary("0011"), &Block::binary("01")).unwrap(),
            ratio(1, 4)
        );
        assert_eq!(
            frequency(&Block::binary("0000000"), &Block::binary("0")).unwrap(),
            int(1)
        );
        assert_eq!(
            frequency(&Block::binary("01"), &Block::binary("010")).unwrap(),
            int(0)
        );
    }

    #[test]
    fn frequency_errors() {
        let other = Alphabet::new(["a", "b"]).unwrap();
        let c = Block::parse(&other, "ab").unwrap();
        assert!(matches!(
            frequency(&Block::binary("01"), &c),
            Err(Error::AlphabetMismatch)
        ));
        assert!(matches!(
            frequency(&Block::binary(""), &Block::binary("0")),
            Err(Error::EmptyBlock)
        ));
    }

    #[test]
    fn profile_examples() {
        let p = profile(&Block::binary("01"), 1).unwrap();
        assert_eq!(p.value(&[0]), ratio(1, 2));
        assert_eq!(p.value(&[1]), ratio(1, 2));

        let p = profile(&Block::binary("0"), 2).unwrap();
        assert_eq!(p.value(&[0]), int(1));
        assert!(p.counts(2).iter().all(|&c| c == 0));

        let p = profile(&Block::binary("0101"), 2).unwrap();
        assert_eq!(p.value(&[0, 1]), ratio(1, 2));
        assert_eq!(p.value(&[1, 0]), ratio(1, 4));
        assert_eq!(p.value(&[0, 0]), int(0));
        assert_eq!(p.value(&[1, 1]), int(0));
    }

    #[test]
    fn profile_rejects_empty() {
        assert!(matches!(
            profile(&Block::binary(""), 3),
            Err(Error::EmptyBlock)
        ));
    }

    #[test]
    fn concat_examples() {
        let b = concat(&[Block::binary("01"), Block::binary("0011")]).unwrap();
        assert_eq!(b, Block::binary("010011"));
        let b = concat(&[Block::binary(""), Block::binary("101")]).unwrap();
        assert_eq!(b, Block::binary("101"));
        let b = concat(&[
            Block::binary("01"),
            Block::binary("011"),
            Block::binary("0110"),
        ])
        .unwrap();
        assert_eq!(b.len(), 9);
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(matches!(
            Alphabet::new(["a", "a"]),
            Err(Error::DuplicateSymbol(_))
        ));
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn sequence_file_roundtrip() {
        let b = Block::binary("0011010");
        let text = write_sequence(&b);
        assert_eq!(text, "alphabet: 0 1\n0011010\n");
        assert_eq!(read_sequence(&text).unwrap(), b);

        let abc = Alphabet::new(["aa", "b", "cc"]).unwrap();
        let b = Block::new(abc, vec![0, 2, 1, 0]).unwrap();
        let text = write_sequence(&b);
        assert_eq!(text, "alphabet: aa b cc\naa cc b aa\n");
        assert_eq!(read_sequence(&text).unwrap(), b);
    }

    #[test]
    fn word_index_roundtrip() {
        for idx in 0..27 {
            assert_eq!(word_index(&word_from_index(idx, 3, 3), 3), idx);
        }
    }
}
