//! Finitely described neighbourhoods of the ergodic measures, used to decide
//! whether a block counts as ergodic.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::core1d::{frequency, Alphabet, Block};
use crate::error::{Error, Result};
use crate::metric::{tail_bound, CylinderTable, MeasureSpec};
use crate::rational::{self, int, Rational};

/// A pure membership test on raw symbol data.
pub type PredicateFn = Arc<dyn Fn(&Alphabet, &[u16]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Region {
    /// Blocks certified to lie within `radius` of one of the measures.
    MetricBall {
        specs: Vec<MeasureSpec>,
        radius: f64,
        depth: usize,
    },
    /// Blocks of length at least `min_length` whose frequency of `symbol`
    /// falls outside `[low, high]`.
    FrequencyWindow {
        symbol: String,
        low: Rational,
        high: Rational,
        min_length: usize,
    },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    /// `always` and `never` are built in; other tags need a callback.
    Predicate {
        tag: String,
        callback: Option<PredicateFn>,
    },
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Region {
    pub fn metric_ball(specs: Vec<MeasureSpec>, radius: f64, depth: usize) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::EmptySpecList);
        }
        let tail = tail_bound(depth);
        if radius.is_nan() || radius <= tail {
            return Err(Error::RadiusBelowTail { radius, tail });
        }
        if let Some(s) = specs.iter().find(|s| s.depth() < depth) {
            return Err(Error::DepthShortfall {
                needed: depth,
                available: s.depth(),
            });
        }
        if specs.iter().any(|s| s.alphabet() != specs[0].alphabet()) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(Region::MetricBall {
            specs,
            radius,
            depth,
        })
    }

    pub fn frequency_window(
        symbol: impl Into<String>,
        low: Rational,
        high: Rational,
        min_length: usize,
    ) -> Result<Self> {
        if low.is_negative() || low > high || high > int(1) {
            return Err(Error::InvalidInterval(
                rational::format(&low),
                rational::format(&high),
            ));
        }
        Ok(Region::FrequencyWindow {
            symbol: symbol.into(),
            low,
            high,
            min_length: min_length.max(1),
        })
    }

    pub fn always() -> Self {
        Region::Predicate {
            tag: "always".into(),
            callback: None,
        }
    }

    pub fn never() -> Self {
        Region::Predicate {
            tag: "never".into(),
            callback: None,
        }
    }

    pub fn predicate(tag: impl Into<String>, callback: PredicateFn) -> Self {
        Region::Predicate {
            tag: tag.into(),
            callback: Some(callback),
        }
    }

    /// Short identifier used in reports.
    pub fn describe(&self) -> String {
        match self {
            Region::MetricBall {
                specs,
                radius,
                depth,
            } => format!("ball(specs={},radius={radius},depth={depth})", specs.len()),
            Region::FrequencyWindow {
                symbol,
                low,
                high,
                min_length,
            } => format!(
                "freq({symbol}∉[{},{}],min={min_length})",
                rational::format(low),
                rational::format(high)
            ),
            Region::Union(rs) => format!(
                "union({})",
                rs.iter().map(Region::describe).collect::<Vec<_>>().join(",")
            ),
            Region::Intersection(rs) => format!(
                "intersection({})",
                rs.iter().map(Region::describe).collect::<Vec<_>>().join(",")
            ),
            Region::Predicate { tag, .. } => format!("predicate({tag})"),
        }
    }

    pub fn contains(&self, b: &Block) -> Result<bool> {
        if b.is_empty() {
            return Err(Error::EmptyBlock);
        }
        match self {
            Region::MetricBall {
                specs,
                radius,
                depth,
            } => {
                let prof = crate::core1d::profile(b, *depth)?;
                for spec in specs {
                    if crate::metric::d_star(&prof, spec, *depth)?.upper() < *radius {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Region::FrequencyWindow {
                symbol,
                low,
                high,
                min_length,
            } => {
                let s = b.alphabet().index(symbol)?;
                if b.len() < *min_length {
                    return Ok(false);
                }
                let c = Block::new(b.alphabet().clone(), vec![s])?;
                let fr = frequency(b, &c)?;
                Ok(fr < *low || fr > *high)
            }
            Region::Union(rs) => {
                for r in rs {
                    if r.contains(b)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Region::Intersection(rs) => {
                for r in rs {
                    if !r.contains(b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Region::Predicate { tag, callback } => match (tag.as_str(), callback) {
                (_, Some(f)) => Ok(f(b.alphabet(), b.symbols())),
                ("always", None) => Ok(true),
                ("never", None) => Ok(false),
                _ => Err(Error::UnboundPredicate(tag.clone())),
            },
        }
    }

    /// Binds the region to a fixed sequence so that membership of its
    /// subwords can be tested without copying.
    pub fn prepare<'a>(&'a self, alphabet: &Alphabet, data: &'a [u16]) -> Result<PreparedRegion<'a>> {
        let node = match self {
            Region::MetricBall {
                specs,
                radius,
                depth,
            } => {
                if specs[0].alphabet() != alphabet {
                    return Err(Error::AlphabetMismatch);
                }
                Node::Ball {
                    specs,
                    radius: *radius,
                    depth: *depth,
                    q: alphabet.size(),
                }
            }
            Region::FrequencyWindow {
                symbol,
                low,
                high,
                min_length,
            } => {
                let s = alphabet.index(symbol)?;
                let mut prefix = Vec::with_capacity(data.len() + 1);
                prefix.push(0u32);
                let mut count = 0u32;
                for &x in data {
                    count += u32::from(x == s);
                    prefix.push(count);
                }
                Node::Window(Box::new(WindowNode {
                    prefix,
                    low: low.clone(),
                    high: high.clone(),
                    min_length: *min_length,
                    below: OnceLock::new(),
                    above: OnceLock::new(),
                }))
            }
            Region::Union(rs) => Node::Union(
                rs.iter()
                    .map(|r| r.prepare(alphabet, data).map(|p| p.node))
                    .collect::<Result<_>>()?,
            ),
            Region::Intersection(rs) => Node::Intersection(
                rs.iter()
                    .map(|r| r.prepare(alphabet, data).map(|p| p.node))
                    .collect::<Result<_>>()?,
            ),
            Region::Predicate { tag, callback } => match (tag.as_str(), callback) {
                (_, Some(f)) => Node::Callback(f.clone()),
                ("always", None) => Node::Const(true),
                ("never", None) => Node::Const(false),
                _ => return Err(Error::UnboundPredicate(tag.clone())),
            },
        };
        Ok(PreparedRegion {
            node,
            alphabet: alphabet.clone(),
            data,
        })
    }

    pub fn to_json(&self) -> Result<RegionJson> {
        Ok(match self {
            Region::MetricBall {
                specs,
                radius,
                depth,
            } => RegionJson::MetricBall {
                specs: specs.clone(),
                radius: *radius,
                depth: *depth,
            },
            Region::FrequencyWindow {
                symbol,
                low,
                high,
                min_length,
            } => RegionJson::FrequencyWindow {
                symbol: symbol.clone(),
                low: low.clone(),
                high: high.clone(),
                min_length: *min_length,
            },
            Region::Union(rs) => RegionJson::Union {
                members: rs.iter().map(Region::to_json).collect::<Result<_>>()?,
            },
            Region::Intersection(rs) => RegionJson::Intersection {
                members: rs.iter().map(Region::to_json).collect::<Result<_>>()?,
            },
            Region::Predicate { tag, .. } => RegionJson::Predicate { tag: tag.clone() },
        })
    }

    pub fn from_json(json: RegionJson) -> Result<Self> {
        match json {
            RegionJson::MetricBall {
                specs,
                radius,
                depth,
            } => Region::metric_ball(specs, radius, depth),
            RegionJson::FrequencyWindow {
                symbol,
                low,
                high,
                min_length,
            } => Region::frequency_window(symbol, low, high, min_length),
            RegionJson::Union { members } => Ok(Region::Union(
                members
                    .into_iter()
                    .map(Region::from_json)
                    .collect::<Result<_>>()?,
            )),
            RegionJson::Intersection { members } => Ok(Region::Intersection(
                members
                    .into_iter()
                    .map(Region::from_json)
                    .collect::<Result<_>>()?,
            )),
            RegionJson::Predicate { tag } => Ok(Region::Predicate {
                tag,
                callback: None,
            }),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Region::from_json(serde_json::from_str(text)?)
    }
}

/// Serialized form of a [`Region`], tagged by `type`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegionJson {
    MetricBall {
        specs: Vec<MeasureSpec>,
        radius: f64,
        depth: usize,
    },
    FrequencyWindow {
        symbol: String,
        #[serde(with = "rational::as_string")]
        low: Rational,
        #[serde(with = "rational::as_string")]
        high: Rational,
        #[serde(default = "default_min_length")]
        min_length: usize,
    },
    Union {
        members: Vec<RegionJson>,
    },
    Intersection {
        members: Vec<RegionJson>,
    },
    Predicate {
        tag: String,
    },
}

fn default_min_length() -> usize {
    1
}

/// Min segment tree answering "first index at or after `lo` whose value is
/// below `t`".
struct MinTree {
    size: usize,
    tree: Vec<i64>,
}

impl MinTree {
    fn new(values: impl ExactSizeIterator<Item = i64>) -> Self {
        let n = values.len();
        let size = n.next_power_of_two().max(1);
        let mut tree = vec![i64::MAX; 2 * size];
        for (i, v) in values.enumerate() {
            tree[size + i] = v;
        }
        for i in (1..size).rev() {
            tree[i] = tree[2 * i].min(tree[2 * i + 1]);
        }
        MinTree { size, tree }
    }

    fn first_below(&self, lo: usize, hi: usize, t: i64) -> Option<usize> {
        if lo > hi {
            return None;
        }
        self.descend(1, 0, self.size - 1, lo, hi, t)
    }

    fn descend(&self, node: usize, nl: usize, nr: usize, lo: usize, hi: usize, t: i64) -> Option<usize> {
        if nr < lo || nl > hi || self.tree[node] >= t {
            return None;
        }
        if nl == nr {
            return Some(nl);
        }
        let mid = (nl + nr) / 2;
        self.descend(2 * node, nl, mid, lo, hi, t)
            .or_else(|| self.descend(2 * node + 1, mid + 1, nr, lo, hi, t))
    }
}

struct WindowNode {
    /// `prefix[j]` counts the tracked symbol in `data[0..j)`.
    prefix: Vec<u32>,
    low: Rational,
    high: Rational,
    min_length: usize,
    below: OnceLock<Option<MinTree>>,
    above: OnceLock<Option<MinTree>>,
}

impl WindowNode {
    fn accepts(&self, i: usize, j: usize) -> bool {
        let k = j - i;
        if k < self.min_length {
            return false;
        }
        let fr = Rational::new(
            ((self.prefix[j] - self.prefix[i]) as i64).into(),
            (k as i64).into(),
        );
        fr < self.low || fr > self.high
    }

    fn coefficients(r: &Rational, len: usize) -> Option<(i64, i64)> {
        let p = r.numer().to_i64()?;
        let q = r.denom().to_i64()?;
        // Keep q*count and p*index comfortably inside i64.
        let bound = (len as i64 + 1).checked_mul(q.max(p).max(1))?;
        bound.checked_mul(4)?;
        Some((p, q))
    }

    /// `score(j) = q*prefix[j] - p*j`; the window `[i, j)` has frequency
    /// below `p/q` exactly when `score(j) < score(i)`.
    fn below_tree(&self) -> Option<&MinTree> {
        self.below
            .get_or_init(|| {
                let (p, q) = Self::coefficients(&self.low, self.prefix.len())?;
                Some(MinTree::new(
                    self.prefix
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| q * c as i64 - p * j as i64),
                ))
            })
            .as_ref()
    }

    /// Negated score for the upper bound, so "above" also becomes a minimum
    /// query.
    fn above_tree(&self) -> Option<&MinTree> {
        self.above
            .get_or_init(|| {
                let (p, q) = Self::coefficients(&self.high, self.prefix.len())?;
                Some(MinTree::new(
                    self.prefix
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| p * j as i64 - q * c as i64),
                ))
            })
            .as_ref()
    }

    fn first_accept(&self, i: usize, kmin: usize, kmax: usize) -> Option<usize> {
        let kmin = kmin.max(self.min_length);
        if kmin > kmax {
            return None;
        }
        let (Some(below), Some(above)) = (self.below_tree(), self.above_tree()) else {
            return (kmin..=kmax).find(|&k| self.accepts(i, i + k));
        };
        let lo = i + kmin;
        let hi = i + kmax;
        let a = below.first_below(lo, hi, below.tree[below.size + i]);
        let b = above.first_below(lo, hi, above.tree[above.size + i]);
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b) - i),
            (Some(a), None) => Some(a - i),
            (None, Some(b)) => Some(b - i),
            (None, None) => None,
        }
    }
}

enum Node<'a> {
    Ball {
        specs: &'a [MeasureSpec],
        radius: f64,
        depth: usize,
        q: usize,
    },
    Window(Box<WindowNode>),
    Union(Vec<Node<'a>>),
    Intersection(Vec<Node<'a>>),
    Callback(PredicateFn),
    Const(bool),
}

/// Distance from raw counts over a window of length `len` to the nearest spec.
fn ball_accepts(
    counts: &[Vec<u64>],
    len: usize,
    specs: &[MeasureSpec],
    radius: f64,
    depth: usize,
) -> bool {
    let tail = tail_bound(depth);
    let n = len as f64;
    specs.iter().any(|spec| {
        let mut partial = 0.0;
        for l in 1..=depth {
            let sum: f64 = counts[l - 1]
                .iter()
                .enumerate()
                .map(|(idx, &c)| (c as f64 / n - spec.approx(l, idx)).abs())
                .sum();
            partial += sum * 0.5f64.powi(l as i32);
        }
        partial + tail < radius
    })
}

impl Node<'_> {
    fn accepts(&self, alphabet: &Alphabet, data: &[u16], i: usize, j: usize) -> bool {
        match self {
            Node::Ball {
                specs,
                radius,
                depth,
                q,
            } => {
                let mut counts = Vec::with_capacity(*depth);
                let mut words = 1;
                for _ in 0..*depth {
                    words *= q;
                    counts.push(vec![0u64; words]);
                }
                for start in i..j {
                    let mut idx = 0;
                    for (l, &s) in data[start..j].iter().take(*depth).enumerate() {
                        idx = idx * q + s as usize;
                        counts[l][idx] += 1;
                    }
                }
                ball_accepts(&counts, j - i, specs, *radius, *depth)
            }
            Node::Window(w) => w.accepts(i, j),
            Node::Union(ns) => ns.iter().any(|n| n.accepts(alphabet, data, i, j)),
            Node::Intersection(ns) => ns.iter().all(|n| n.accepts(alphabet, data, i, j)),
            Node::Callback(f) => f(alphabet, &data[i..j]),
            Node::Const(c) => *c,
        }
    }

    fn first_accept(
        &self,
        alphabet: &Alphabet,
        data: &[u16],
        i: usize,
        kmin: usize,
        kmax: usize,
    ) -> Option<usize> {
        match self {
            Node::Window(w) => w.first_accept(i, kmin, kmax),
            Node::Union(ns) => ns
                .iter()
                .filter_map(|n| n.first_accept(alphabet, data, i, kmin, kmax))
                .min(),
            Node::Const(true) => Some(kmin),
            Node::Const(false) => None,
            Node::Ball {
                specs,
                radius,
                depth,
                q,
            } => {
                // Grow the window one symbol at a time, updating the counts of
                // the words that end at the new symbol.
                let mut counts: Vec<Vec<u64>> = Vec::with_capacity(*depth);
                let mut words = 1;
                for _ in 0..*depth {
                    words *= q;
                    counts.push(vec![0u64; words]);
                }
                for k in 1..=kmax {
                    let end = i + k;
                    let mut idx = 0;
                    let mut scale = 1;
                    for l in 1..=(*depth).min(k) {
                        idx += data[end - l] as usize * scale;
                        scale *= q;
                        counts[l - 1][idx] += 1;
                    }
                    if k >= kmin && ball_accepts(&counts, k, specs, *radius, *depth) {
                        return Some(k);
                    }
                }
                None
            }
            Node::Intersection(_) | Node::Callback(_) => {
                (kmin..=kmax).find(|&k| self.accepts(alphabet, data, i, i + k))
            }
        }
    }
}

/// A region bound to one sequence.
pub struct PreparedRegion<'a> {
    node: Node<'a>,
    alphabet: Alphabet,
    data: &'a [u16],
}

impl PreparedRegion<'_> {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Membership of `data[i..j)`.
    pub fn contains_range(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < j && j <= self.data.len());
        self.node.accepts(&self.alphabet, self.data, i, j)
    }

    /// Smallest `k` in `[kmin, kmax]` with `data[i..i+k)` in the region.
    pub fn first_accept(&self, i: usize, kmin: usize, kmax: usize) -> Option<usize> {
        let kmin = kmin.max(1);
        let kmax = kmax.min(self.data.len().saturating_sub(i));
        if kmin > kmax {
            return None;
        }
        self.node.first_accept(&self.alphabet, self.data, i, kmin, kmax)
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
    fn frequency_window_examples() {
        assert!(!band().contains(&Block::binary("0100")).unwrap());
        assert!(band().contains(&Block::binary("0000000000")).unwrap());
        assert!(!band().contains(&Block::binary("0")).unwrap());
    }

    #[test]
    fn metric_ball_example() {
        let spec = MeasureSpec::dirac(Alphabet::binary(), 0, 6).unwrap();
        let ball = Region::metric_ball(vec![spec.clone()], 0.3, 6).unwrap();
        assert!(ball.contains(&Block::binary(&"0".repeat(1000))).unwrap());
        assert!(!ball.contains(&Block::binary(&"01".repeat(100))).unwrap());
        assert!(matches!(
            Region::metric_ball(vec![spec], 0.25, 3),
            Err(Error::RadiusBelowTail { .. })
        ));
    }

    #[test]
    fn invalid_interval_rejected() {
        assert!(matches!(
            Region::frequency_window("0", ratio(4, 5), ratio(1, 5), 2),
            Err(Error::InvalidInterval(..))
        ));
    }

    #[test]
    fn union_and_intersection() {
        let low = Region::frequency_window("0", int(0), ratio(1, 2), 1).unwrap();
        let high = Region::frequency_window("0", ratio(1, 2), int(1), 1).unwrap();
        let u = Region::Union(vec![low.clone(), high.clone()]);
        let i = Region::Intersection(vec![low, high]);
        for w in ["0", "01", "0011", "1", "011"] {
            let b = Block::binary(w);
            assert_eq!(u.contains(&b).unwrap(), w != "01" && w != "0011");
            assert!(!i.contains(&b).unwrap());
        }
    }

    #[test]
    fn predicates() {
        let b = Block::binary("01");
        assert!(Region::always().contains(&b).unwrap());
        assert!(!Region::never().contains(&b).unwrap());
        let unbound = Region::Predicate {
            tag: "custom".into(),
            callback: None,
        };
        assert!(matches!(unbound.contains(&b), Err(Error::UnboundPredicate(_))));
        let even = Region::predicate("even", Arc::new(|_, d: &[u16]| d.len().is_multiple_of(2)));
        assert!(even.contains(&b).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"type":"union","members":[
            {"type":"frequency_window","symbol":"0","low":"0.2","high":"4/5","min_length":2},
            {"type":"metric_ball","radius":0.3,"depth":4,
             "specs":[{"alphabet":["0","1"],"depth":4,"bernoulli":["1","0"]}]},
            {"type":"predicate","tag":"never"}]}"#;
        let r = Region::from_json_str(text).unwrap();
        let again = serde_json::to_string(&r.to_json().unwrap()).unwrap();
        let r2 = Region::from_json_str(&again).unwrap();
        assert_eq!(r.describe(), r2.describe());
        assert!(r2.contains(&Block::binary("00000")).unwrap());
        assert!(matches!(
            Region::from_json_str(r#"{"type":"frequency_window","symbol":"0","low":"1","high":"0"}"#),
            Err(Error::InvalidInterval(..))
        ));
    }

    #[test]
    fn prepared_matches_contains() {
        let spec = MeasureSpec::dirac(Alphabet::binary(), 1, 3).unwrap();
        let regions = [
            band(),
            Region::Union(vec![
                band(),
                Region::frequency_window("1", int(0), ratio(2, 3), 3).unwrap(),
            ]),
            Region::Intersection(vec![band(), Region::always()]),
            Region::metric_ball(vec![spec], 0.4, 3).unwrap(),
        ];
        let x = Block::binary("0001011111101000010110111111110");
        for r in &regions {
            let p = r.prepare(x.alphabet(), x.symbols()).unwrap();
            for i in 0..x.len() {
                for j in i + 1..=x.len() {
                    assert_eq!(
                        p.contains_range(i, j),
                        r.contains(&x.slice(i..j)).unwrap(),
                        "{r:?} on [{i},{j})"
                    );
                }
                for kmin in 1..4 {
                    let expected = (kmin..=x.len() - i).find(|&k| p.contains_range(i, i + k));
                    assert_eq!(p.first_accept(i, kmin, x.len()), expected);
                }
            }
        }
    }
}
