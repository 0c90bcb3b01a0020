use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use ergoblock::core1d::read_sequence;
use ergoblock::grid2d::Pattern;
use ergoblock::{Alphabet, Block};
use serde::Serialize;

use crate::args::OutputArgs;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn bad_input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ergoblock::Error> for CliError {
    fn from(e: ergoblock::Error) -> Self {
        if e.is_bad_input() {
            CliError::bad_input(e.to_string())
        } else {
            CliError::precondition(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::bad_input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::bad_input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
}

/// Inline JSON if the argument starts with `{` or `[`, otherwise a path.
pub fn json_or_path(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        read_text(Path::new(arg))
    }
}

pub fn read_block(path: &Path, alphabet: Option<&str>) -> CliResult<Block> {
    let text = read_text(path)?;
    if text.starts_with("alphabet:") {
        return Ok(read_sequence(&text)?);
    }
    let labels = alphabet.ok_or_else(|| {
        CliError::bad_input(format!("{} has no `alphabet:` header; pass --alphabet", path.display()))
    })?;
    let alphabet = Alphabet::new(labels.split_whitespace())?;
    Ok(Block::parse(&alphabet, &text)?)
}

pub fn read_pattern(path: &Path) -> CliResult<Pattern> {
    Ok(Pattern::parse(&read_text(path)?)?)
}

/// `lo:hi` as a half-open range.
pub fn parse_window(text: &str) -> CliResult<std::ops::Range<usize>> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::bad_input(format!("window `{text}` is not of the form lo:hi")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::bad_input(format!("bad window bound `{s}`")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo >= hi {
        return Err(CliError::bad_input(format!("window `{text}` is empty")));
    }
    Ok(lo..hi)
}

/// Writes `content` to `<out>/<name>`, or to standard output.
pub fn write_output(output: &OutputArgs, name: &str, content: &str) -> CliResult<()> {
    match &output.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::bad_input(format!("{}: {e}", dir.display())))?;
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(content.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::bad_input(format!("standard output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::bad_input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::bad_input(e.to_string()))
}
