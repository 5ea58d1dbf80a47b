//! LIBSVM text format: `<label> <index>:<value> ...` with 1-based indices on
//! disk and 0-based indices in memory.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{Label, LabeledInstance, SparseVector};

/// Parses one line, reporting errors against line 1.
pub fn parse_line(line: &str) -> Result<LabeledInstance> {
    parse_line_at(line, 1)
}

/// Parses one line; `line_no` (1-based) is used in error messages.
pub fn parse_line_at(line: &str, line_no: usize) -> Result<LabeledInstance> {
    let err = |column: usize, message: String| Error::Parse {
        line: line_no,
        column,
        message,
    };

    let mut tokens = tokens_with_columns(line);
    let (col, label_tok) = tokens.next().ok_or_else(|| err(1, "missing label".to_string()))?;
    let label = parse_label(label_tok).ok_or_else(|| err(col, format!("bad label {label_tok:?}")))?;

    let mut features = SparseVector::new();
    let mut last: Option<usize> = None;
    for (col, tok) in tokens {
        let (idx_s, val_s) = tok
            .split_once(':')
            .ok_or_else(|| err(col, format!("expected index:value, got {tok:?}")))?;
        let idx: usize = idx_s.parse().map_err(|_| err(col, format!("bad index {idx_s:?}")))?;
        if idx == 0 {
            return Err(err(col, "indices are 1-based; got 0".to_string()));
        }
        let value: f64 = val_s
            .parse()
            .map_err(|_| err(col + idx_s.len() + 1, format!("bad value {val_s:?}")))?;
        if !value.is_finite() {
            return Err(err(col + idx_s.len() + 1, format!("non-finite value {val_s:?}")));
        }
        let index = idx - 1;
        if last.is_some_and(|l| index <= l) {
            return Err(err(col, format!("index {idx} is not increasing")));
        }
        last = Some(index);
        features.push_unchecked(index, value);
    }
    Ok(LabeledInstance::new(features, label))
}

fn parse_label(tok: &str) -> Option<Label> {
    let v: f64 = tok.parse().ok()?;
    if v == 1.0 {
        Some(Label::Positive)
    } else if v == -1.0 || v == 0.0 {
        Some(Label::Negative)
    } else {
        None
    }
}

/// Whitespace-separated tokens with their 1-based byte column.
fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_ascii_whitespace()
        .map(move |t| (t.as_ptr() as usize - base + 1, t))
}

/// Formats an instance as a LIBSVM line (no trailing newline).
pub fn format_line(inst: &LabeledInstance) -> String {
    let mut s = inst.label.to_string();
    for (j, x) in inst.features.iter() {
        // `{}` on f64 prints the shortest representation that round-trips.
        write!(s, " {}:{}", j + 1, x).unwrap();
    }
    s
}

/// Iterator over mini-batches read from a LIBSVM stream. Memory use is bounded
/// by one batch; blank lines are skipped.
pub struct MiniBatches<R> {
    reader: R,
    batch_size: usize,
    line_no: usize,
    offset: u64,
    buf: String,
    done: bool,
}

/// Splits a LIBSVM byte stream into batches of `batch_size` instances.
pub fn stream_minibatches<R: BufRead>(reader: R, batch_size: usize) -> Result<MiniBatches<R>> {
    if batch_size == 0 {
        return Err(Error::config("batch_size must be at least 1"));
    }
    Ok(MiniBatches {
        reader,
        batch_size,
        line_no: 0,
        offset: 0,
        buf: String::new(),
        done: false,
    })
}

impl<R: BufRead> MiniBatches<R> {
    fn next_instance(&mut self) -> Option<Result<LabeledInstance>> {
        loop {
            self.buf.clear();
            let start = self.offset;
            let n = match self.reader.read_line(&mut self.buf) {
                Ok(n) => n,
                Err(e) => return Some(Err(e.into())),
            };
            if n == 0 {
                return None;
            }
            self.offset += n as u64;
            self.line_no += 1;
            if self.buf.trim().is_empty() {
                continue;
            }
            return Some(parse_line_at(&self.buf, self.line_no).map_err(|e| Error::Stream {
                offset: start,
                source: Box::new(e),
            }));
        }
    }
}

impl<R: BufRead> Iterator for MiniBatches<R> {
    type Item = Result<Vec<LabeledInstance>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut batch = Vec::with_capacity(self.batch_size);
        while batch.len() < self.batch_size {
            match self.next_instance() {
                Some(Ok(inst)) => batch.push(inst),
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                None => {
                    self.done = true;
                    break;
                }
            }
        }
        if batch.is_empty() {
            None
        } else {
            Some(Ok(batch))
        }
    }
}

/// Reads an entire LIBSVM stream into memory.
pub fn read_all<R: BufRead>(reader: R) -> Result<Vec<LabeledInstance>> {
    let mut rows = Vec::new();
    for batch in stream_minibatches(reader, 1024)? {
        rows.extend(batch?);
    }
    Ok(rows)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<LabeledInstance>> {
    read_all(BufReader::new(File::open(path)?))
}

pub fn write_all<W: Write>(mut out: W, rows: &[LabeledInstance]) -> Result<()> {
    for r in rows {
        writeln!(out, "{}", format_line(r))?;
    }
    Ok(())
}
