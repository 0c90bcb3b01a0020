use std::collections::BTreeMap;

use ergoblock::acceptance::{run_all, Settings};
use ergoblock::core1d::{profile, write_sequence};
use ergoblock::decompose::{
    audit_partition, decompose_two_sided, decompose_window, nonergodic_set, sweep_n, Decomposition,
};
use ergoblock::density::{
    density_curve, lower_estimate, lower_estimate_2d, upper_estimate, upper_estimate_2d, CoordinateSet,
    DensityEstimate, PointSet2D,
};
use ergoblock::generators::{
    bernoulli_field, gen_bernoulli, gen_nested, gen_periodic, gen_runs, gen_toeplitz, runs_cuts, striped_field,
    AnnotatedSequence, Annotation,
};
use ergoblock::grid2d::{
    audit_tiles, d_star_2d, d_star_2d_exact, decompose_tiles, profile2d, rect_shape, GridTilingSystem,
    MeasureSpec2D, Pattern, Rect, Region2D, Tile,
};
use ergoblock::metric::{d_star_exact, CylinderTable};
use ergoblock::rational;
use ergoblock::{d_star, Alphabet, Block, MeasureSpec, Region, VERSION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::io::*;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a Value,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(config: &Value, body: T) -> CliResult<String> {
    to_json(&Envelope {
        version: VERSION,
        config,
        body,
    })
}

#[derive(Serialize)]
struct Estimate {
    horizon: usize,
    window: Vec<usize>,
    value: String,
    approx: f64,
}

impl From<DensityEstimate> for Estimate {
    fn from(e: DensityEstimate) -> Self {
        Estimate {
            approx: e.as_f64(),
            value: rational::format(&e.value),
            horizon: e.horizon,
            window: e.window,
        }
    }
}

#[derive(Serialize)]
struct DensityPair {
    upper: Estimate,
    lower: Estimate,
}

fn density_pair(set: &CoordinateSet, horizon: usize, window: std::ops::Range<usize>) -> CliResult<DensityPair> {
    Ok(DensityPair {
        upper: upper_estimate(set, horizon, window.clone())?.into(),
        lower: lower_estimate(set, horizon, window)?.into(),
    })
}

fn density_pair_2d(set: &PointSet2D, side: usize, window: Rect) -> CliResult<DensityPair> {
    Ok(DensityPair {
        upper: upper_estimate_2d(set, side, window)?.into(),
        lower: lower_estimate_2d(set, side, window)?.into(),
    })
}

fn spans_of(set: &CoordinateSet) -> Vec<[usize; 2]> {
    set.spans().into_iter().map(|(a, b)| [a, b]).collect()
}

pub fn generate(args: &GenerateArgs, config: &Value) -> CliResult<()> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::bad_input(format!("--{flag} is required")));
    let sequence: AnnotatedSequence = match (args.example, args.bernoulli, &args.periodic) {
        (Some(Example::Striped), ..) => {
            let side = need(args.side, "side")?;
            let [p_even, p_odd] = args.stripe_probs[..] else {
                return Err(CliError::bad_input("--stripe-probs takes two values"));
            };
            let field = striped_field(side, args.stripe_width, p_even, p_odd, args.seed)?;
            return write_output(&args.output, "pattern.txt", &field.write()?);
        }
        (Some(Example::Field), ..) => {
            let side = need(args.side, "side")?;
            let p = args.bernoulli.unwrap_or(0.5);
            let field = bernoulli_field(side, side, p, args.seed)?;
            return write_output(&args.output, "pattern.txt", &field.write()?);
        }
        (Some(Example::Nested), ..) => gen_nested(need(args.length, "length")?)?,
        (Some(Example::Runs), ..) => gen_runs(need(args.length, "length")?)?,
        (Some(Example::Toeplitz), ..) => {
            gen_toeplitz(need(args.steps, "steps")?, need(args.half_width, "half-width")?)?
        }
        (None, Some(p), None) => plain(gen_bernoulli(p, args.seed, need(args.length, "length")?)?),
        (None, None, Some(word)) => {
            let alphabet = match &args.alphabet {
                Some(labels) => Alphabet::new(labels.split_whitespace())?,
                None => Alphabet::binary(),
            };
            let b = Block::parse(&alphabet, word)?;
            plain(gen_periodic(&b, need(args.length, "length")?)?)
        }
        _ => {
            return Err(CliError::bad_input(
                "give exactly one of --example, --bernoulli or --periodic",
            ))
        }
    };
    let text = write_sequence(&sequence.block);
    if args.output.out.is_none() {
        return write_output(&args.output, "sequence.txt", &text);
    }
    write_output(&args.output, "sequence.txt", &text)?;
    let dump = envelope(config, sequence.annotations_json())?;
    write_output(&args.output, "annotations.json", &dump)
}

fn plain(block: Block) -> AnnotatedSequence {
    AnnotatedSequence {
        block,
        annotations: BTreeMap::new(),
        meta: BTreeMap::new(),
    }
}

#[derive(Serialize)]
struct DistanceRow {
    target: String,
    partial: f64,
    partial_exact: String,
    tail: f64,
    upper: f64,
}

fn distance_row(target: String, u: &dyn CylinderTable, v: &dyn CylinderTable, depth: usize, planar: bool) -> CliResult<DistanceRow> {
    let (bound, exact) = if planar {
        (d_star_2d(u, v, depth)?, d_star_2d_exact(u, v, depth)?)
    } else {
        (d_star(u, v, depth)?, d_star_exact(u, v, depth)?)
    };
    Ok(DistanceRow {
        target,
        partial: bound.partial,
        partial_exact: rational::format(&exact),
        tail: bound.tail,
        upper: bound.upper(),
    })
}

fn test_rectangles(depth: usize) -> Vec<[usize; 2]> {
    (1..=depth).map(|l| {
        let (w, h) = rect_shape(l);
        [w, h]
    }).collect()
}

pub fn distance(args: &DistanceArgs, config: &Value) -> CliResult<()> {
    let depth = args.depth;
    if args.against.is_none() && args.spec.is_empty() {
        return Err(CliError::bad_input("give --against or at least one --spec"));
    }
    let mut rows = Vec::new();
    if args.planar {
        let p = profile2d(&read_pattern(&args.source.input)?, depth)?;
        if let Some(other) = &args.against {
            let q = profile2d(&read_pattern(other)?, depth)?;
            rows.push(distance_row(other.display().to_string(), &p, &q, depth, true)?);
        }
        for (i, s) in args.spec.iter().enumerate() {
            let spec: MeasureSpec2D = serde_json::from_str(&json_or_path(s)?)?;
            rows.push(distance_row(format!("spec[{i}]"), &p, &spec, depth, true)?);
        }
    } else {
        let alphabet = args.source.alphabet.as_deref();
        let p = profile(&read_block(&args.source.input, alphabet)?, depth)?;
        if let Some(other) = &args.against {
            let q = profile(&read_block(other, alphabet)?, depth)?;
            rows.push(distance_row(other.display().to_string(), &p, &q, depth, false)?);
        }
        for (i, s) in args.spec.iter().enumerate() {
            let spec: MeasureSpec = serde_json::from_str(&json_or_path(s)?)?;
            rows.push(distance_row(format!("spec[{i}]"), &p, &spec, depth, false)?);
        }
    }
    // Ties go to the earliest target.
    let nearest = rows
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, r)| match best {
            Some((_, d)) if d <= r.partial => best,
            _ => Some((i, r.partial)),
        })
        .map(|(i, _)| i);
    match args.output.emit {
        Emit::Csv => write_output(&args.output, "distance.csv", &to_csv(&rows)?),
        Emit::Json => {
            let mut body = json!({ "depth": depth, "distances": rows, "nearest": nearest });
            if args.planar {
                body["test_rectangles"] = json!(test_rectangles(depth));
            }
            write_output(&args.output, "distance.json", &envelope(config, body)?)
        }
    }
}

pub fn decompose(args: &DecomposeArgs, config: &Value) -> CliResult<()> {
    let x = read_block(&args.source.input, args.source.alphabet.as_deref())?;
    let region = Region::from_json_str(&json_or_path(&args.region)?)?;
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => 0..x.len(),
    };
    let mut body = serde_json::Map::new();
    let d: Decomposition = if args.sweep_n {
        let horizon = args
            .horizon
            .ok_or_else(|| CliError::bad_input("--sweep-n needs --horizon"))?;
        let cap = args.cap.unwrap_or(horizon);
        let report = sweep_n(&x, args.m, &region, args.target, horizon, window.clone(), cap)?;
        body.insert(
            "sweep".into(),
            json!({
                "steps": report.steps,
                "achieved_n": report.achieved,
                "target": report.target,
                "cap": report.cap,
                "horizon": report.horizon,
                "window": report.window,
            }),
        );
        report.decomposition
    } else if let Some(origin) = args.origin {
        decompose_two_sided(&x, origin, args.m, args.n, &region)?
    } else {
        decompose_window(&x, window.clone(), args.m, args.n, &region)?
    };
    if let Some(h) = args.horizon {
        body.insert("filler_density".into(), serde_json::to_value(density_pair(&nonergodic_set(&d), h, window)?)?);
    }
    match args.output.emit {
        Emit::Csv => write_output(&args.output, "decomposition.csv", &d.to_csv()),
        Emit::Json => {
            body.insert("decomposition".into(), serde_json::to_value(&d)?);
            write_output(&args.output, "decomposition.json", &envelope(config, body)?)
        }
    }
}

fn parse_cuts(arg: &str) -> CliResult<Vec<usize>> {
    let text = if arg.contains(',') || arg.trim().parse::<usize>().is_ok() {
        arg.to_string()
    } else {
        read_text(std::path::Path::new(arg))?
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::bad_input(format!("bad cut `{t}`"))))
        .collect()
}

#[derive(Deserialize)]
struct AnnotationFile {
    annotations: BTreeMap<String, Annotation>,
    #[serde(default)]
    meta: BTreeMap<String, Value>,
}

pub fn audit(args: &AuditArgs, config: &Value) -> CliResult<()> {
    let x = read_block(&args.source.input, args.source.alphabet.as_deref())?;
    let region = Region::from_json_str(&json_or_path(&args.region)?)?;
    let cuts = match (&args.cuts, args.runs_k) {
        (Some(c), None) => parse_cuts(c)?,
        (None, Some(k)) => {
            let path = args
                .annotations
                .as_ref()
                .ok_or_else(|| CliError::bad_input("--runs-k needs --annotations"))?;
            let file: AnnotationFile = serde_json::from_str(&read_text(path)?)?;
            let seq = AnnotatedSequence {
                block: x.clone(),
                annotations: file.annotations,
                meta: file.meta,
            };
            runs_cuts(&seq, k)?
        }
        _ => return Err(CliError::bad_input("give exactly one of --cuts or --runs-k")),
    };
    let audit = audit_partition(&x, &cuts, &region)?;
    let covered = cuts[0]..*cuts.last().expect("at least two cuts");
    match args.output.emit {
        Emit::Csv => write_output(&args.output, "audit.csv", &to_csv(&audit.verdicts)?),
        Emit::Json => {
            let mut body = json!({
                "region": region.describe(),
                "blocks": audit.verdicts.len(),
                "nonergodic_blocks": audit.verdicts.iter().filter(|v| !v.ergodic).count(),
                "verdicts": audit.verdicts,
                "nonergodic_spans": spans_of(&audit.nonergodic),
            });
            if let Some(h) = args.horizon {
                body["nonergodic_density"] = serde_json::to_value(density_pair(&audit.nonergodic, h, covered)?)?;
            }
            write_output(&args.output, "audit.json", &envelope(config, body)?)
        }
    }
}

/// The coordinate set held by a file, and its natural window if it has one.
fn read_set(args: &DensityArgs) -> CliResult<(CoordinateSet, Option<std::ops::Range<usize>>)> {
    let value: Value = serde_json::from_str(&read_text(&args.set)?)?;
    let decomposition = value.get("decomposition").or_else(|| value.get("segments").map(|_| &value));
    if let Some(d) = decomposition {
        let d: Decomposition = serde_json::from_value(d.clone())?;
        return Ok((nonergodic_set(&d), Some(d.window[0]..d.window[1])));
    }
    if let Some(spans) = value.get("nonergodic_spans") {
        let spans: Vec<[usize; 2]> = serde_json::from_value(spans.clone())?;
        return Ok((CoordinateSet::from_ranges(spans.into_iter().map(|[a, b]| a..b)), None));
    }
    let annotation: Annotation = match value.get("annotations") {
        Some(all) => {
            let name = args
                .annotation
                .as_ref()
                .ok_or_else(|| CliError::bad_input("annotation file given; pass --annotation NAME"))?;
            let a = all
                .get(name)
                .ok_or_else(|| CliError::bad_input(format!("no annotation named `{name}`")))?;
            serde_json::from_value(a.clone())?
        }
        None => serde_json::from_value(value)?,
    };
    Ok((CoordinateSet::from_unsorted(annotation.coordinates()), None))
}

pub fn density(args: &DensityArgs, config: &Value) -> CliResult<()> {
    let (set, natural) = read_set(args)?;
    let window = match (&args.window, natural) {
        (Some(w), _) => parse_window(w)?,
        (None, Some(w)) => w,
        (None, None) => 0..set.points().last().map_or(1, |&p| p + 1),
    };
    let rows = density_curve(&set, &args.horizon, window.clone())?;
    match args.output.emit {
        Emit::Csv => {
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "N")]
                horizon: usize,
                upper: f64,
                lower: f64,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    horizon: r.horizon,
                    upper: r.upper,
                    lower: r.lower,
                })
                .collect();
            write_output(&args.output, "density.csv", &to_csv(&rows)?)
        }
        Emit::Json => {
            let body = json!({ "window": [window.start, window.end], "points": set.len(), "curve": rows });
            write_output(&args.output, "density.json", &envelope(config, body)?)
        }
    }
}

fn tile_json(t: &Tile) -> Value {
    json!({ "level": t.level, "anchor": [t.anchor.x, t.anchor.y] })
}

fn ball_depth(r: &Region2D) -> Option<usize> {
    match r {
        Region2D::MetricBall { depth, .. } => Some(*depth),
        Region2D::Union(rs) => rs.iter().filter_map(ball_depth).max(),
        _ => None,
    }
}

pub fn tiles(args: &TilesArgs, config: &Value) -> CliResult<()> {
    let field: Pattern = read_pattern(&args.source.input)?;
    let region = Region2D::from_json_str(&json_or_path(&args.region)?)?;
    let sys = GridTilingSystem::new(args.base)?;
    let bounds = field.bounds();
    let mut body = json!({ "region": region.describe(), "base": args.base });
    if let Some(depth) = ball_depth(&region) {
        body["test_rectangles"] = json!(test_rectangles(depth));
    }
    let (rows, set): (Vec<(Tile, bool)>, PointSet2D) = match args.audit_level {
        Some(level) => {
            let audit = audit_tiles(&field, &sys, level, &region)?;
            body["level"] = json!(level);
            body["nonergodic_tiles"] = json!(audit.verdicts.iter().filter(|v| !v.ergodic).count());
            let rows = audit.verdicts.iter().map(|v| (v.tile, v.ergodic)).collect();
            body["verdicts"] = Value::Array(
                audit
                    .verdicts
                    .iter()
                    .map(|v| {
                        let mut t = tile_json(&v.tile);
                        t["ergodic"] = json!(v.ergodic);
                        t
                    })
                    .collect(),
            );
            (rows, audit.nonergodic)
        }
        None => {
            let sel = decompose_tiles(&field, &sys, args.level_min, args.level_max, &region)?;
            body["levels"] = json!([args.level_min, args.level_max]);
            body["selection"] = Value::Array(sel.tiles.iter().map(tile_json).collect());
            body["coverage"] = serde_json::to_value(&sel.coverage)?;
            let set = sel.to_point_set(&sys, bounds);
            (sel.tiles.iter().map(|t| (*t, true)).collect(), set)
        }
    };
    if let Some(side) = args.horizon {
        body["density"] = serde_json::to_value(density_pair_2d(&set, side, bounds)?)?;
    }
    match args.output.emit {
        Emit::Csv => {
            #[derive(Serialize)]
            struct Row {
                level: u32,
                x: i64,
                y: i64,
                ergodic: bool,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|(t, e)| Row {
                    level: t.level,
                    x: t.anchor.x,
                    y: t.anchor.y,
                    ergodic: *e,
                })
                .collect();
            write_output(&args.output, "tiles.csv", &to_csv(&rows)?)
        }
        Emit::Json => write_output(&args.output, "tiles.json", &envelope(config, body)?),
    }
}

/// Returns whether every criterion passed.
pub fn verify(args: &VerifyArgs, config: &Value) -> CliResult<bool> {
    let mut settings = Settings {
        quick: args.quick,
        ..Settings::default()
    };
    if let Some(seed) = args.seed {
        settings.seed = seed;
    }
    let reports = run_all(&settings);
    let passed = reports.iter().all(|r| r.passed);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut table: String = reports.iter().map(|r| r.line() + "\n").collect();
    table += &format!("{} of {} criteria passed\n", reports.len() - failed, reports.len());
    match (&args.output.out, args.output.emit) {
        (None, _) => write_output(&args.output, "", &table)?,
        (Some(_), Emit::Json) => {
            eprint!("{table}");
            let body = json!({ "passed": passed, "criteria": reports });
            write_output(&args.output, "verify.json", &envelope(config, body)?)?;
        }
        (Some(_), Emit::Csv) => {
            eprint!("{table}");
            write_output(&args.output, "verify.csv", &to_csv(&reports)?)?;
        }
    }
    Ok(passed)
}
