//! The acceptance suite: sixteen fixed, seed-pinned checks of the library
//! against the concrete figures and inequalities it is built around.
//!
//! Each criterion returns an [`Outcome`] with a one-line summary of what was
//! measured. `quick` shrinks sample counts and input sizes for a fast smoke
//! run; thresholds never change.

use std::collections::BTreeSet;
use std::time::Instant;

use num::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core1d::{profile, Alphabet, Block};
use crate::decompose::{audit_partition, decompose_unbounded, decompose_window, nonergodic_set, sweep_n};
use crate::density::{lower_estimate, lower_estimate_2d, upper_estimate, upper_estimate_2d, CoordinateSet};
use crate::error::Result;
use crate::generators::toeplitz::{ToeplitzLayout, STAR};
use crate::generators::{gen_bernoulli, gen_nested, gen_runs, gen_toeplitz, runs_cuts, runs_region, striped_field};
use crate::grid2d::{
    audit_tiles, core, d_star_2d_exact, decompose_tiles, invariance_defect, modification_distance, profile2d,
    GridTilingSystem, MeasureSpec2D, Pattern, Point, Rect, Region2D, Shape,
};
use crate::metric::{barycenter, concatenation_correction, d_star_exact, genericity_curve, MeasureSpec};
use crate::rational::{self, int, ratio, Rational};
use crate::reference::{naive_density, naive_greedy};
use crate::region::Region;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub quick: bool,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            quick: false,
            seed: DEFAULT_SEED,
        }
    }
}

impl Settings {
    fn rng(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(id) << 32))
    }

    fn samples(&self, full: usize) -> usize {
        if self.quick {
            (full / 10).max(10)
        } else {
            full
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Outcome {
            passed,
            summary: summary.into(),
        }
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn(&Settings) -> Result<Outcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub seconds: f64,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.summary
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "nested: zero frequency around explicit centers", run: nested_extremes },
        Criterion { id: 2, name: "nested: bounded greedy sweep", run: nested_sweep },
        Criterion { id: 3, name: "nested: unbounded greedy density", run: nested_unbounded },
        Criterion { id: 4, name: "toeplitz: per-step survival ratio", run: toeplitz_ratio },
        Criterion { id: 5, name: "toeplitz: zero frequency around the center", run: toeplitz_extremes },
        Criterion { id: 6, name: "toeplitz: unavoidable nonergodic blocks", run: toeplitz_inevitable },
        Criterion { id: 7, name: "runs: density-one nonergodic partition", run: runs_density_one },
        Criterion { id: 8, name: "d*: symmetry and triangle inequality", run: metric_axioms },
        Criterion { id: 9, name: "d*: concatenation bound", run: concatenation_bound },
        Criterion { id: 10, name: "d*: Bernoulli genericity trend", run: genericity_trend },
        Criterion { id: 11, name: "core size under invariance", run: core_size },
        Criterion { id: 12, name: "planar d* under small modifications", run: modification_bound },
        Criterion { id: 13, name: "tiles: selected union density", run: tile_selection_density },
        Criterion { id: 14, name: "tiles: fixed-level audit density", run: tile_audit_density },
        Criterion { id: 15, name: "greedy matches brute force", run: oracle_equivalence },
        Criterion { id: 16, name: "density estimator identities", run: density_identities },
    ]
}

pub fn run_one(c: &Criterion, settings: &Settings) -> Report {
    let start = Instant::now();
    let outcome = (c.run)(settings).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
    Report {
        id: c.id,
        name: c.name.to_string(),
        passed: outcome.passed,
        summary: outcome.summary,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(settings: &Settings) -> Vec<Report> {
    criteria().iter().map(|c| run_one(c, settings)).collect()
}

fn zero_prefix(data: &[u16]) -> Vec<u64> {
    let mut out = Vec::with_capacity(data.len() + 1);
    out.push(0);
    let mut acc = 0;
    for &v in data {
        acc += u64::from(v == 0);
        out.push(acc);
    }
    out
}

/// Tracks whether zero frequencies stay in `[1/4, 3/4]` and hit both ends.
#[derive(Default)]
struct QuarterBand {
    checked: u64,
    violations: u64,
    low_hit: bool,
    high_hit: bool,
}

impl QuarterBand {
    fn record(&mut self, zeros: u64, len: u64) {
        self.checked += 1;
        if 4 * zeros < len || 4 * zeros > 3 * len {
            self.violations += 1;
        }
        self.low_hit |= 4 * zeros == len;
        self.high_hit |= 4 * zeros == 3 * len;
    }

    fn passed(&self) -> bool {
        self.violations == 0 && self.low_hit && self.high_hit && self.checked > 0
    }

    fn summary(&self) -> String {
        format!(
            "{} blocks, {} outside [1/4,3/4], 1/4 attained: {}, 3/4 attained: {}",
            self.checked, self.violations, self.low_hit, self.high_hit
        )
    }
}

fn nested_extremes(s: &Settings) -> Result<Outcome> {
    let n = if s.quick { 20_000 } else { 100_000 };
    let seq = gen_nested(n)?;
    let prefix = zero_prefix(seq.block.symbols());
    let mut band = QuarterBand::default();
    let mut seen = BTreeSet::new();
    for [c, _] in seq.annotation("explicit_b0").expect("annotated").spans() {
        for len in 2..=200usize {
            let lo = (c + 1).saturating_sub(len - 1);
            for a in lo..=c + 1 {
                if a + len > n || !seen.insert((a, len)) {
                    continue;
                }
                band.record(prefix[a + len] - prefix[a], len as u64);
            }
        }
    }
    Ok(Outcome::new(band.passed(), band.summary()))
}

fn nested_input(s: &Settings) -> Result<(Block, usize)> {
    let (n, horizon) = if s.quick { (200_000, 10_000) } else { (1_000_000, 10_000) };
    Ok((gen_nested(n)?.block, horizon))
}

fn band_region() -> Region {
    Region::frequency_window("0", ratio(1, 5), ratio(4, 5), 2).expect("valid window")
}

fn nested_sweep(s: &Settings) -> Result<Outcome> {
    let (x, horizon) = nested_input(s)?;
    let len = x.len();
    let window = 3 * len / 4..len;
    let r = band_region();
    let report = sweep_n(&x, 10, &r, 0.05, horizon, window.clone(), horizon)?;
    let full = upper_estimate(&nonergodic_set(&report.decomposition), horizon, 0..len)?;
    let trail: Vec<String> = report.steps.iter().map(|st| format!("n={}:{:.4}", st.n, st.density)).collect();
    let summary = format!(
        "last-quarter upper density at N={horizon}: [{}]; achieved n = {:?}; full-window value {:.4}",
        trail.join(", "),
        report.achieved,
        full.as_f64()
    );
    Ok(Outcome::new(report.achieved.is_some_and(|n| n <= horizon), summary))
}

fn nested_unbounded(s: &Settings) -> Result<Outcome> {
    let (x, horizon) = nested_input(s)?;
    let len = x.len();
    let d = decompose_unbounded(&x, 10, &band_region())?;
    let filler = nonergodic_set(&d);
    let est = upper_estimate(&filler, horizon, 3 * len / 4..len)?;
    let v = est.as_f64();
    Ok(Outcome::new(
        v < 0.01,
        format!(
            "last-quarter upper density at N={horizon}: {} = {v:.4} (threshold 0.01)",
            rational::format(&est.value)
        ),
    ))
}

fn toeplitz_ratio(s: &Settings) -> Result<Outcome> {
    let steps = if s.quick { 5 } else { 6 };
    let layout = ToeplitzLayout::new(steps)?;
    let period = layout.period[steps - 1];
    let (filled, mut empty) = layout.fill_histogram(0..period);
    // Unfilled after step i, for i = steps down to 1, over the same window.
    let mut unfilled = vec![0u64; steps + 1];
    unfilled[steps] = empty;
    for i in (1..steps).rev() {
        empty += filled[i];
        unfilled[i] = empty;
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for i in 2..=steps {
        let got = ratio(unfilled[i], unfilled[i - 1]);
        let r = 1u64 << (i + 1);
        let want = ratio(r, 2 + r);
        ok &= got == want;
        parts.push(format!("i={i}: {}", rational::format(&got)));
    }
    let absolute = unfilled[steps] as f64 / period as f64;
    let product: f64 = (2..=steps).map(|i| (1u64 << (i + 1)) as f64 / (2.0 + (1u64 << (i + 1)) as f64)).product();
    Ok(Outcome::new(
        ok,
        format!(
            "{} over one period of {period}; absolute unfilled fraction {absolute:.4}, product of ratios {product:.4}, stated d ~ 0.63",
            parts.join(", ")
        ),
    ))
}

fn central_toeplitz() -> Result<(crate::generators::AnnotatedSequence, usize)> {
    let layout = ToeplitzLayout::new(4)?;
    let w = (layout.filled_len[3] + 8) as usize;
    Ok((gen_toeplitz(4, w)?, w))
}

fn toeplitz_extremes(_: &Settings) -> Result<Outcome> {
    let (seq, origin) = central_toeplitz()?;
    let data = seq.block.symbols();
    let prefix = zero_prefix(data);
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [2usize, 3] {
        let span = seq
            .annotation(&format!("full_block_{k}"))
            .expect("annotated")
            .spans()
            .into_iter()
            .find(|sp| sp[0] <= origin && origin + 2 <= sp[1])
            .expect("central block materialized");
        ok &= data[span[0]..span[1]].iter().all(|&v| v != STAR);
        let mut band = QuarterBand::default();
        for a in span[0]..=origin + 1 {
            for b in (a + 2).max(origin + 1)..=span[1] {
                band.record(prefix[b] - prefix[a], (b - a) as u64);
            }
        }
        ok &= band.passed();
        lines.push(format!("k={k} (length {}): {}", span[1] - span[0], band.summary()));
    }
    Ok(Outcome::new(ok, lines.join("; ")))
}

fn toeplitz_inevitable(_: &Settings) -> Result<Outcome> {
    let (seq, origin) = central_toeplitz()?;
    let layout = ToeplitzLayout::new(4)?;
    let w = origin as i64;
    let stretch = seq
        .annotation("full_block_3")
        .expect("annotated")
        .spans()
        .into_iter()
        .find(|sp| sp[0] <= origin && origin < sp[1])
        .expect("central block materialized");
    let r = band_region();
    let prepared = r.prepare(seq.block.alphabet(), seq.block.symbols())?;
    let mut occurrences = Vec::new();
    for k in 1..=3usize {
        let b = layout.filled_len[k] as usize;
        for s0 in layout.filled_block_starts(k + 1, stretch[0] as i64 - w..stretch[1] as i64 - w) {
            occurrences.push((k, (s0 + w) as usize, b));
        }
    }
    let mut checked = 0u64;
    let mut misses = Vec::new();
    for ell in 2..=40usize {
        for phase in 0..40usize {
            for &(k, start, len) in occurrences.iter().filter(|o| o.2 > 2 * ell) {
                checked += 1;
                // Cut points are stretch start + phase + t * ell for every integer t.
                let base = stretch[0] + phase % ell;
                let first = base + start.saturating_sub(base).div_ceil(ell) * ell;
                let mut a = first;
                let mut hit = false;
                while a + ell <= start + len {
                    if a >= start && !prepared.contains_range(a, a + ell) {
                        hit = true;
                        break;
                    }
                    a += ell;
                }
                if !hit {
                    misses.push(format!("l={ell},phase={phase},k={k},start={start}"));
                }
            }
        }
    }
    let summary = format!(
        "{checked} (length, phase, occurrence) cases over a filled stretch of length {}, {} without a nonergodic block{}",
        stretch[1] - stretch[0],
        misses.len(),
        misses.first().map(|m| format!(" (first: {m})")).unwrap_or_default()
    );
    Ok(Outcome::new(misses.is_empty() && checked > 0, summary))
}

fn runs_density_one(_: &Settings) -> Result<Outcome> {
    let k = 20;
    let seq = gen_runs(140_910)?;
    let cuts = runs_cuts(&seq, k)?;
    let audit = audit_partition(&seq.block, &cuts, &runs_region())?;
    let zero = ratio(1, 3);
    let two = ratio(2, 3);
    let data = seq.block.symbols();
    let mut thirds = 0;
    let mut bad_thirds = 0;
    for v in audit.verdicts.iter().filter(|v| v.len == 3 * k) {
        let zeros = data[v.start..v.start + v.len].iter().filter(|&&s| s == 0).count() as u64;
        let fr = ratio(zeros, v.len as u64);
        if fr == zero || fr == two {
            thirds += 1;
            bad_thirds += u64::from(v.ergodic);
        }
    }
    let spans = seq.annotation("series").expect("annotated").spans();
    let last = spans.last().expect("series");
    let interior = last[0] + k..last[1] - 2 * k;
    let horizon = 2048;
    let end = *cuts.last().expect("cuts");
    let upper = upper_estimate(&audit.nonergodic, horizon, 0..end)?;
    let lower = lower_estimate(&audit.nonergodic, horizon, interior.clone())?;
    let v = upper.as_f64();
    Ok(Outcome::new(
        v >= 0.9 && bad_thirds == 0,
        format!(
            "{} blocks, {thirds} with Fr(0) in {{1/3,2/3}} ({bad_thirds} judged ergodic); upper density at N={horizon}: {v:.4}; lower density inside the B_{k} interior [{}, {}): {:.4}",
            audit.verdicts.len(),
            interior.start,
            interior.end,
            lower.as_f64()
        ),
    ))
}

fn random_block(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_len: usize) -> Result<Block> {
    let len = rng.gen_range(1..=max_len);
    let q = alphabet.size() as u16;
    // Mix i.i.d. noise with runs so that long words actually repeat.
    let run = rng.gen_range(1..=8);
    let mut data = Vec::with_capacity(len);
    while data.len() < len {
        let v = rng.gen_range(0..q);
        let reps = rng.gen_range(1..=run);
        data.extend(std::iter::repeat_n(v, reps));
    }
    data.truncate(len);
    Block::new(alphabet.clone(), data)
}

fn metric_axioms(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(8);
    let depth = 6;
    let n = s.samples(1000);
    let binary = Alphabet::binary();
    let mut failures = 0;
    for _ in 0..n {
        let p: Vec<_> = (0..3)
            .map(|_| random_block(&mut rng, &binary, 500).and_then(|b| profile(&b, depth)))
            .collect::<Result<_>>()?;
        let ab = d_star_exact(&p[0], &p[1], depth)?;
        let ba = d_star_exact(&p[1], &p[0], depth)?;
        let bc = d_star_exact(&p[1], &p[2], depth)?;
        let ac = d_star_exact(&p[0], &p[2], depth)?;
        if ab != ba || ac > &ab + &bc {
            failures += 1;
        }
    }
    Ok(Outcome::new(failures == 0, format!("{n} triples, {failures} violations")))
}

fn concatenation_bound(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(9);
    let depth = 4;
    let n = s.samples(500);
    let mut failures = 0;
    let mut tightest = f64::INFINITY;
    for t in 0..n {
        let p = rng.gen_range(1..10) as f64 / 10.0;
        let len = rng.gen_range(100..=2000);
        let x = gen_bernoulli(p, s.seed.wrapping_add(t as u64), len)?;
        let parts = rng.gen_range(2..=6);
        let mut cuts: BTreeSet<usize> = BTreeSet::new();
        while cuts.len() < parts - 1 {
            cuts.insert(rng.gen_range(20..len - 20));
        }
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(len);
        if bounds.windows(2).any(|w| w[1] - w[0] < 5) {
            bounds = vec![0, len / 2, len];
        }
        let mut weights = Vec::new();
        let mut specs = Vec::new();
        let mut weighted = Rational::zero();
        let mut lengths = Vec::new();
        for w in bounds.windows(2) {
            let part = x.slice(w[0]..w[1]);
            let spec = MeasureSpec::bernoulli_binary(ratio(rng.gen_range(0..=10), 10), depth)?;
            let weight = ratio((w[1] - w[0]) as u64, len as u64);
            weighted += &weight * d_star_exact(&profile(&part, depth)?, &spec, depth)?;
            weights.push(weight);
            specs.push(spec);
            lengths.push(w[1] - w[0]);
        }
        let mix = barycenter(&weights, &specs)?;
        let lhs = d_star_exact(&profile(&x, depth)?, &mix, depth)?;
        let rhs = weighted + concatenation_correction(&lengths)?;
        if lhs > rhs {
            failures += 1;
        }
        tightest = tightest.min((rhs - lhs).to_f64().unwrap_or(f64::INFINITY));
    }
    Ok(Outcome::new(
        failures == 0,
        format!("{n} splits, {failures} violations, smallest slack {tightest:.5}"),
    ))
}

fn genericity_trend(s: &Settings) -> Result<Outcome> {
    let x = gen_bernoulli(0.3, s.seed, 100_000)?;
    let spec = MeasureSpec::bernoulli_binary(ratio(3, 10), 6)?;
    let curve = genericity_curve(&x, &spec, &[1_000, 10_000, 100_000])?;
    let v: Vec<f64> = curve.iter().map(|d| d.partial).collect();
    let ok = v[0] > v[1] && v[1] > v[2] && v[2] < 0.05;
    Ok(Outcome::new(ok, format!("partial distances {:.5}, {:.5}, {:.5}", v[0], v[1], v[2])))
}

fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let w = rng.gen_range(6..=30);
    let h = rng.gen_range(6..=30);
    let bites = rng.gen_range(0..=w.min(h));
    let mut pts: BTreeSet<Point> = Rect::new(0, 0, w, h).points().collect();
    for _ in 0..bites {
        let x = rng.gen_range(0..w as i64);
        let y = if rng.gen_bool(0.5) { 0 } else { h as i64 - 1 };
        pts.remove(&Point::new(x, y));
    }
    Shape::new(pts)
}

fn core_size(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(11);
    let n = s.samples(500);
    let mut found = 0;
    let mut failures = 0;
    let mut tries = 0;
    while found < n && tries < 100 * n {
        tries += 1;
        let f = random_shape(&mut rng);
        let size = rng.gen_range(2..=4);
        let mut k = BTreeSet::new();
        while k.len() < size {
            k.insert(Point::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2)));
        }
        let k = Shape::new(k);
        let defect = invariance_defect(&f, &k)?;
        let budget = &defect * int(k.len() as i64);
        if budget >= Rational::one() {
            continue;
        }
        found += 1;
        let kept = ratio(core(&f, &k).len() as u64, f.len() as u64);
        if kept <= Rational::one() - budget {
            failures += 1;
        }
    }
    Ok(Outcome::new(
        failures == 0 && found == n,
        format!("{found} pairs with defect * |K| < 1, {failures} without strict inequality"),
    ))
}

fn modification_bound(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(12);
    let n = s.samples(200);
    let depth = 6;
    let side = 64;
    let mut failures = 0;
    let mut worst = 0f64;
    for t in 0..n {
        let eps = ratio(*[1u64, 5, 10].choose(&mut rng).expect("nonempty"), 100);
        let field = crate::generators::bernoulli_field(side, side, rng.gen_range(0.1..0.9), s.seed + t as u64)?;
        let w = rng.gen_range(16..=48);
        let h = rng.gen_range(16..=48);
        let f_rect = Rect::new(rng.gen_range(0..=(side - w) as i64), rng.gen_range(0..=(side - h) as i64), w, h);
        let f = f_rect.to_shape();
        let budget = (&eps * int(f.len() as i64)).ceil().to_usize().expect("small") - 1;
        let changes = rng.gen_range(0..=budget);
        let mut pts: BTreeSet<Point> = f.points().iter().copied().collect();
        for _ in 0..changes {
            if rng.gen_bool(0.5) {
                let x = rng.gen_range(f_rect.x..f_rect.x_end());
                let y = rng.gen_range(f_rect.y..f_rect.y_end());
                pts.remove(&Point::new(x, y));
            } else {
                let x = rng.gen_range((f_rect.x - 2).max(0)..(f_rect.x_end() + 2).min(side as i64));
                let y = rng.gen_range((f_rect.y - 2).max(0)..(f_rect.y_end() + 2).min(side as i64));
                pts.insert(Point::new(x, y));
            }
        }
        let h_shape = Shape::new(pts);
        if modification_distance(&h_shape, &f)? >= eps {
            failures += 1;
            continue;
        }
        let pf = profile2d(&field.restrict_rect(f_rect)?, depth)?;
        let ph = profile2d(&field.restrict(&h_shape)?, depth)?;
        let d = d_star_2d_exact(&pf, &ph, depth)?;
        if d >= eps {
            failures += 1;
        }
        worst = worst.max((d / eps).to_f64().unwrap_or(f64::INFINITY));
    }
    Ok(Outcome::new(
        failures == 0,
        format!("{n} modifications, {failures} violations, largest distance/epsilon {worst:.4}"),
    ))
}

struct StripedSetup {
    field: Pattern,
    region: Region2D,
    sys: GridTilingSystem,
    side: usize,
}

fn striped_setup(s: &Settings) -> Result<StripedSetup> {
    let side = if s.quick { 1024 } else { 4096 };
    let field = striped_field(side, 128, 0.05, 0.95, s.seed)?;
    let binary = Alphabet::binary();
    let specs = vec![
        MeasureSpec2D::product(binary.clone(), &[ratio(95, 100), ratio(5, 100)], 2)?,
        MeasureSpec2D::product(binary, &[ratio(5, 100), ratio(95, 100)], 2)?,
    ];
    Ok(StripedSetup {
        field,
        region: Region2D::metric_ball(specs, 0.2, 2)?,
        sys: GridTilingSystem::default(),
        side,
    })
}

fn tile_selection_density(s: &Settings) -> Result<Outcome> {
    let st = striped_setup(s)?;
    let sel = decompose_tiles(&st.field, &st.sys, 3, 5, &st.region)?;
    let bounds = Rect::square(0, 0, st.side);
    let set = sel.to_point_set(&st.sys, bounds);
    let lower = lower_estimate_2d(&set, 128, bounds)?;
    let v = lower.as_f64();
    Ok(Outcome::new(
        v >= 0.8,
        format!(
            "{} tiles selected, covered fraction {:.4}, lower density at side 128: {v:.4}",
            sel.tiles.len(),
            set.len() as f64 / bounds.area() as f64
        ),
    ))
}

fn tile_audit_density(s: &Settings) -> Result<Outcome> {
    let st = striped_setup(s)?;
    let audit = audit_tiles(&st.field, &st.sys, 4, &st.region)?;
    let bounds = Rect::square(0, 0, st.side);
    let upper = upper_estimate_2d(&audit.nonergodic, 128, bounds)?;
    let failing = audit.verdicts.iter().filter(|v| !v.ergodic).count();
    let v = upper.as_f64();
    Ok(Outcome::new(
        v <= 0.15,
        format!("{failing} of {} level-4 tiles fail, upper density at side 128: {v:.4}", audit.verdicts.len()),
    ))
}

fn random_region(rng: &mut ChaCha8Rng, binary: bool) -> Result<Region> {
    let window = |rng: &mut ChaCha8Rng| -> Result<Region> {
        let a = rng.gen_range(0..=10u64);
        let b = rng.gen_range(a..=10u64);
        Region::frequency_window("0", ratio(a, 10), ratio(b, 10), rng.gen_range(1..=6))
    };
    Ok(match rng.gen_range(0..10) {
        0..=4 => window(rng)?,
        5 => Region::Union(vec![window(rng)?, window(rng)?]),
        6 => Region::Intersection(vec![window(rng)?, window(rng)?]),
        7 if binary => {
            let specs = vec![MeasureSpec::bernoulli_binary(ratio(rng.gen_range(0..=10), 10), 3)?];
            Region::metric_ball(specs, 0.25 + rng.gen_range(0.05..0.6), 3)?
        }
        8 => Region::Union(vec![window(rng)?, Region::never()]),
        _ => Region::Intersection(vec![window(rng)?, Region::always()]),
    })
}

fn oracle_equivalence(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(15);
    let n = s.samples(500);
    let alphabets = [Alphabet::binary(), Alphabet::new(["0", "1", "2"])?];
    let mut mismatches = 0;
    for _ in 0..n {
        let which = rng.gen_range(0..2);
        let alphabet = &alphabets[which];
        let x = random_block(&mut rng, alphabet, 200)?;
        let r = random_region(&mut rng, which == 0)?;
        let m = rng.gen_range(1..=12);
        let bound = if rng.gen_bool(0.3) { None } else { Some(m + rng.gen_range(0..=30)) };
        let fast = decompose_window(&x, 0..x.len(), m, bound, &r)?;
        if fast.segments != naive_greedy(&x, m, bound, &r)? || fast.validate().is_err() {
            mismatches += 1;
        }
    }
    Ok(Outcome::new(mismatches == 0, format!("{n} inputs, {mismatches} mismatches")))
}

fn density_identities(s: &Settings) -> Result<Outcome> {
    let mut rng = s.rng(16);
    let n = s.samples(1000);
    let mut failures = 0;
    for _ in 0..n {
        let lo = rng.gen_range(0..50);
        let size = rng.gen_range(1..=300);
        let window = lo..lo + size;
        let pick = |rng: &mut ChaCha8Rng| {
            let p = rng.gen_range(0.0..1.0);
            CoordinateSet::from_unsorted((0..lo + size + 20).filter(|_| rng.gen_bool(p)).collect())
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let ab = a.union(&b);
        let h = rng.gen_range(1..=size);
        let up = |set: &CoordinateSet| upper_estimate(set, h, window.clone()).map(|e| e.value);
        let low = |set: &CoordinateSet| lower_estimate(set, h, window.clone()).map(|e| e.value);
        let dual = up(&a)? + low(&a.complement(window.clone()))? == Rational::one();
        let sub = up(&ab)? <= up(&a)? + up(&b)?;
        let mono = up(&a)? <= up(&ab)? && low(&a)? <= low(&ab)?;
        let naive = up(&a)? == naive_density(a.points(), h, window.start, window.end, true)
            && low(&a)? == naive_density(a.points(), h, window.start, window.end, false);
        if !(dual && sub && mono && naive) {
            failures += 1;
        }
    }
    Ok(Outcome::new(failures == 0, format!("{n} random sets, {failures} violations")))
}
