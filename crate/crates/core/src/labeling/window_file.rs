//! Tab-separated token/label window file.
//!
//! ```text
//! # doc: d1 window: 0
//! Past	0	4	I-title
//! Medical	5	12	I-title
//!
//! # doc: d1 window: 1
//! ...
//! ```

#![allow(clippy::tabs_in_doc_comments)]

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{LabeledToken, Window};
use crate::docmodel::{Label, Token};

const HEADER_PREFIX: &str = "# doc: ";
const WINDOW_MARKER: &str = " window: ";

#[derive(Debug, Error)]
pub enum WindowFileError {
    #[error("window file line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("window file i/o: {0}")]
    Io(#[from] io::Error),
}

/// Streams windows to a writer, separating them with blank lines.
pub struct WindowWriter<W: Write> {
    out: W,
    written: usize,
}

impl<W: Write> WindowWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out, written: 0 }
    }

    pub fn write(&mut self, window: &Window) -> io::Result<()> {
        if self.written > 0 {
            writeln!(self.out)?;
        }
        writeln!(self.out, "{HEADER_PREFIX}{}{WINDOW_MARKER}{}", window.doc_id, window.index)?;
        for lt in &window.tokens {
            let text = &lt.token.text;
            if text.is_empty() || text.contains(['\t', '\n', '\r']) {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("token {text:?} at {} cannot be written as a field", lt.token.start),
                ));
            }
            writeln!(self.out, "{text}\t{}\t{}\t{}", lt.token.start, lt.token.end, lt.label)?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn windows_written(&self) -> usize {
        self.written
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Parses a whole window file.
pub fn read_windows<R: BufRead>(reader: R) -> Result<Vec<Window>, WindowFileError> {
    let mut windows = Vec::new();
    let mut current: Option<Window> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let malformed = |reason: String| WindowFileError::Malformed {
            line: line_no,
            reason,
        };
        if line.trim().is_empty() {
            windows.extend(current.take());
            continue;
        }
        if let Some(rest) = line.strip_prefix(HEADER_PREFIX) {
            windows.extend(current.take());
            let (doc_id, index) = rest
                .rsplit_once(WINDOW_MARKER)
                .ok_or_else(|| malformed("header lacks ` window: <index>`".into()))?;
            let index = index
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad window index `{index}`")))?;
            if doc_id.is_empty() {
                return Err(malformed("empty doc id".into()));
            }
            current = Some(Window {
                doc_id: doc_id.to_string(),
                index,
                tokens: Vec::new(),
            });
            continue;
        }
        let window = current
            .as_mut()
            .ok_or_else(|| malformed("token line before any window header".into()))?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [text, start, end, label] = fields[..] else {
            return Err(malformed(format!("expected 4 tab-separated fields, found {}", fields.len())));
        };
        let start: usize = start.parse().map_err(|_| malformed(format!("bad start `{start}`")))?;
        let end: usize = end.parse().map_err(|_| malformed(format!("bad end `{end}`")))?;
        if start >= end {
            return Err(malformed(format!("empty token range [{start}, {end})")));
        }
        let label: Label = label.parse().map_err(|e| malformed(format!("{e}")))?;
        window
            .tokens
            .push(LabeledToken::new(Token::new(text, start, end), label));
    }
    windows.extend(current);
    Ok(windows)
}
