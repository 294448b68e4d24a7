use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::docmodel::normalize_title;

#[derive(Debug, Error)]
pub enum DenylistError {
    #[error("denylist line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("denylist i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Normalized heading strings that match a pattern but are not headings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Denylist {
    entries: BTreeSet<String>,
}

impl Denylist {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `raw` after normalization. Empty results are ignored.
    pub fn insert(&mut self, raw: &str) -> bool {
        let normalized = normalize_title(raw);
        !normalized.is_empty() && self.entries.insert(normalized)
    }

    /// Membership test on an already-normalized title.
    pub fn contains(&self, normalized: &str) -> bool {
        self.entries.contains(normalized)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// Parses the one-entry-per-line format. `#` lines and blank lines are
    /// skipped, trailing whitespace is stripped, and lines holding control
    /// characters or invalid UTF-8 are rejected with their line number.
    pub fn read<R: BufRead>(mut reader: R) -> Result<Self, DenylistError> {
        let mut list = Denylist::new();
        let mut buf = Vec::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            if reader.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            line_no += 1;
            let line = std::str::from_utf8(&buf).map_err(|_| DenylistError::Malformed {
                line: line_no,
                reason: "invalid UTF-8".into(),
            })?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(c) = line.chars().find(|c| c.is_control()) {
                return Err(DenylistError::Malformed {
                    line: line_no,
                    reason: format!("control character {c:?}"),
                });
            }
            list.insert(line);
        }
        Ok(list)
    }

    pub fn parse(text: &str) -> Result<Self, DenylistError> {
        Self::read(text.as_bytes())
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for entry in &self.entries {
            writeln!(out, "{entry}")?;
        }
        Ok(())
    }

    /// Set union; output stays sorted and normalized.
    pub fn merge(&mut self, other: &Denylist) {
        self.entries.extend(other.entries.iter().cloned());
    }
}

impl<S: AsRef<str>> FromIterator<S> for Denylist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut list = Denylist::new();
        for s in iter {
            list.insert(s.as_ref());
        }
        list
    }
}

/// Reads `additions` in the denylist file format and unions it into `existing`.
pub fn merge_denylist<R: BufRead>(existing: &Denylist, additions: R) -> Result<Denylist, DenylistError> {
    let mut merged = existing.clone();
    merged.merge(&Denylist::read(additions)?);
    Ok(merged)
}
