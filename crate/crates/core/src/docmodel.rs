//! Documents, spans, tokens and labels shared by every stage of the pipeline.
//!
//! All offsets are byte offsets into the document's UTF-8 text, always on a
//! character boundary, with exclusive ends.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocError {
    #[error("document id must not be empty")]
    EmptyId,
    #[error("unknown label `{0}` (expected O, I-title or I-Stitle)")]
    UnknownLabel(String),
    #[error("unknown heading level `{0}` (expected title or subtitle)")]
    UnknownLevel(String),
}

/// An identified plain-text document with LF line endings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
}

impl Document {
    /// Builds a document, normalizing CRLF (and lone CR) line endings to LF.
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Result<Self, DocError> {
        let doc_id = doc_id.into();
        if doc_id.is_empty() {
            return Err(DocError::EmptyId);
        }
        let text = text.into();
        let text = if text.contains('\r') {
            text.replace("\r\n", "\n").replace('\r', "\n")
        } else {
            text
        };
        Ok(Self { doc_id, text })
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Text covered by `span`, or `None` if the span is out of bounds or
    /// does not fall on character boundaries.
    pub fn slice(&self, span: &Span) -> Option<&str> {
        self.text.get(span.start..span.end)
    }
}

/// Heading level of an annotated span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Title,
    Subtitle,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Title, Level::Subtitle];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Title => "title",
            Level::Subtitle => "subtitle",
        }
    }

    /// The IOB label carried by tokens inside a span of this level.
    pub fn label(self) -> Label {
        match self {
            Level::Title => Label::ITitle,
            Level::Subtitle => Label::IStitle,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = DocError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "title" => Ok(Level::Title),
            "subtitle" => Ok(Level::Subtitle),
            other => Err(DocError::UnknownLevel(other.to_string())),
        }
    }
}

/// A half-open `[start, end)` heading annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub level: Level,
}

impl Span {
    pub fn new(start: usize, end: usize, level: Level) -> Self {
        Self { start, end, level }
    }

    pub fn title(start: usize, end: usize) -> Self {
        Self::new(start, end, Level::Title)
    }

    pub fn subtitle(start: usize, end: usize) -> Self {
        Self::new(start, end, Level::Subtitle)
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains_range(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }
}

/// A pre-tokenized word with its offsets in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            text: text.into(),
            start,
            end,
        }
    }

    /// True if the token starts with a letter or digit.
    pub fn is_word(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_alphanumeric)
    }
}

/// Per-token tag: outside, inside a title, or inside a subtitle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Label {
    #[default]
    #[serde(rename = "O")]
    O,
    #[serde(rename = "I-title")]
    ITitle,
    #[serde(rename = "I-Stitle")]
    IStitle,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::O, Label::ITitle, Label::IStitle];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::O => "O",
            Label::ITitle => "I-title",
            Label::IStitle => "I-Stitle",
        }
    }

    pub fn level(self) -> Option<Level> {
        match self {
            Label::O => None,
            Label::ITitle => Some(Level::Title),
            Label::IStitle => Some(Level::Subtitle),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = DocError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O" => Ok(Label::O),
            "I-title" => Ok(Label::ITitle),
            "I-Stitle" => Ok(Label::IStitle),
            other => Err(DocError::UnknownLabel(other.to_string())),
        }
    }
}

/// Splits text into maximal alphanumeric runs; every other non-whitespace
/// character becomes a token of its own. Whitespace yields nothing.
pub fn pretokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run_start: Option<usize> = None;

    for (idx, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if run_start.is_none() {
                run_start = Some(idx);
            }
            continue;
        }
        if let Some(start) = run_start.take() {
            tokens.push(Token::new(&text[start..idx], start, idx));
        }
        if !ch.is_whitespace() {
            let end = idx + ch.len_utf8();
            tokens.push(Token::new(&text[idx..end], idx, end));
        }
    }
    if let Some(start) = run_start {
        tokens.push(Token::new(&text[start..], start, text.len()));
    }
    tokens
}

/// Canonical form of a heading used for counting, lookup and denylisting:
/// lowercased, trimmed, whitespace runs collapsed, trailing colon removed.
pub fn normalize_title(raw: &str) -> String {
    let mut out = raw
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase();
    // Stripping repeats until stable so that the function is idempotent
    // ("a : :" and "a::" both reduce to "a").
    loop {
        let trimmed = out.trim_end_matches(':').trim_end();
        if trimmed.len() == out.len() {
            break;
        }
        out.truncate(trimmed.len());
    }
    out
}

/// A single broken span invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroLength { index: usize, span: Span },
    OutOfBounds { index: usize, span: Span, text_len: usize },
    NotCharBoundary { index: usize, span: Span },
    Overlap { first: usize, second: usize, a: Span, b: Span },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroLength { index, span } => {
                write!(f, "span #{index} [{}, {}) is empty", span.start, span.end)
            }
            Violation::OutOfBounds {
                index,
                span,
                text_len,
            } => write!(
                f,
                "span #{index} [{}, {}) exceeds text length {text_len}",
                span.start, span.end
            ),
            Violation::NotCharBoundary { index, span } => write!(
                f,
                "span #{index} [{}, {}) does not fall on character boundaries",
                span.start, span.end
            ),
            Violation::Overlap {
                first,
                second,
                a,
                b,
            } => write!(
                f,
                "spans #{first} [{}, {}) and #{second} [{}, {}) overlap",
                a.start, a.end, b.start, b.end
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every span invariant against `doc` and reports all violations.
pub fn validate_annotation(doc: &Document, spans: &[Span]) -> ValidationReport {
    let mut violations = Vec::new();
    let text_len = doc.text.len();

    for (index, span) in spans.iter().enumerate() {
        if span.start >= span.end {
            violations.push(Violation::ZeroLength { index, span: *span });
        } else if span.end > text_len {
            violations.push(Violation::OutOfBounds {
                index,
                span: *span,
                text_len,
            });
        } else if !doc.text.is_char_boundary(span.start) || !doc.text.is_char_boundary(span.end) {
            violations.push(Violation::NotCharBoundary { index, span: *span });
        }
    }

    let mut order: Vec<usize> = (0..spans.len()).filter(|&i| !spans[i].is_empty()).collect();
    order.sort_by_key(|&i| (spans[i].start, spans[i].end));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if spans[j].start >= spans[i].end {
                break;
            }
            let (first, second) = if i < j { (i, j) } else { (j, i) };
            violations.push(Violation::Overlap {
                first,
                second,
                a: spans[first],
                b: spans[second],
            });
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tok(text: &str, start: usize, end: usize) -> Token {
        Token::new(text, start, end)
    }

    #[test]
    fn pretokenize_splits_punctuation() {
        assert_eq!(
            pretokenize("Family History:"),
            vec![tok("Family", 0, 6), tok("History", 7, 14), tok(":", 14, 15)]
        );
        assert_eq!(
            pretokenize("HEENT: NC/AT"),
            vec![
                tok("HEENT", 0, 5),
                tok(":", 5, 6),
                tok("NC", 7, 9),
                tok("/", 9, 10),
                tok("AT", 10, 12)
            ]
        );
        assert!(pretokenize("").is_empty());
        assert!(pretokenize(" \n\t ").is_empty());
    }

    #[test]
    fn pretokenize_handles_multibyte() {
        let toks = pretokenize("café→ok");
        assert_eq!(toks, vec![tok("café", 0, 5), tok("→", 5, 8), tok("ok", 8, 10)]);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_title("History of  Present Illness:"), "history of present illness");
        assert_eq!(normalize_title("HEENT"), "heent");
        assert_eq!(normalize_title("  "), "");
        assert_eq!(normalize_title("Tablet(s)*Refills :"), "tablet(s)*refills");
    }

    #[test]
    fn document_normalizes_crlf() {
        let doc = Document::new("a", "x\r\ny\rz").unwrap();
        assert_eq!(doc.text, "x\ny\nz");
        assert_eq!(Document::new("", "x"), Err(DocError::EmptyId));
    }

    #[test]
    fn label_and_level_strings() {
        for label in Label::ALL {
            assert_eq!(label.as_str().parse::<Label>().unwrap(), label);
        }
        assert_eq!(serde_json::to_string(&Label::IStitle).unwrap(), "\"I-Stitle\"");
        assert_eq!(serde_json::to_string(&Level::Subtitle).unwrap(), "\"subtitle\"");
        assert!("B-title".parse::<Label>().is_err());
    }

    #[test]
    fn validate_examples() {
        let doc = Document::new("d", "x".repeat(100)).unwrap();
        assert!(validate_annotation(&doc, &[Span::title(0, 5)]).is_valid());

        let report = validate_annotation(&doc, &[Span::title(0, 5), Span::subtitle(3, 8)]);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::Overlap { first: 0, second: 1, .. }));

        let short = Document::new("d", "x".repeat(10)).unwrap();
        let report = validate_annotation(&short, &[Span::title(5, 20)]);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::OutOfBounds { text_len: 10, .. }));

        let report = validate_annotation(&short, &[Span::title(4, 4)]);
        assert!(matches!(report.violations[0], Violation::ZeroLength { .. }));
    }

    #[test]
    fn validate_reports_every_overlapping_pair() {
        let doc = Document::new("d", "x".repeat(50)).unwrap();
        let spans = [Span::title(0, 30), Span::title(5, 10), Span::subtitle(20, 25)];
        assert_eq!(validate_annotation(&doc, &spans).violations.len(), 2);
    }

    proptest! {
        #[test]
        fn pretokenize_is_lossless(text in any::<String>()) {
            let toks = pretokenize(&text);
            let joined: String = toks.iter().map(|t| t.text.as_str()).collect();
            let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, stripped);
        }

        #[test]
        fn pretokenize_offsets_are_sorted_and_exact(text in any::<String>()) {
            let toks = pretokenize(&text);
            for t in &toks {
                prop_assert!(t.start < t.end);
                prop_assert_eq!(&text[t.start..t.end], t.text.as_str());
            }
            for pair in toks.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
        }

        #[test]
        fn normalize_is_idempotent(raw in "[ a-zA-Z:\t\n]{0,20}") {
            let once = normalize_title(&raw);
            prop_assert_eq!(normalize_title(&once), once);
        }
    }
}
