//! Span ↔ IOB conversion, word → subword label projection and
//! fixed-size training windows.
//!
//! Only `I-` tags are used. Runs of equal labels merge into one span when
//! nothing but whitespace separates consecutive tokens; any other separator,
//! or a label change, starts a new span.

mod window_file;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use window_file::{read_windows, WindowFileError, WindowWriter};

use crate::docmodel::{pretokenize, Document, Label, Span, Token};

pub const DEFAULT_WINDOW_SIZE: usize = 384;
pub const DEFAULT_WORDS_PER_TOKEN: f64 = 0.75;

#[derive(Debug, Error, PartialEq)]
pub enum LabelError {
    #[error(
        "token #{index} `{text}` [{start}, {end}) partially overlaps {level} span [{span_start}, {span_end})",
        level = span.level, span_start = span.start, span_end = span.end
    )]
    Alignment {
        index: usize,
        text: String,
        start: usize,
        end: usize,
        span: Span,
    },
    #[error("{tokens} tokens but {labels} labels")]
    LengthMismatch { tokens: usize, labels: usize },
    #[error("subword #{index} [{start}, {end}) straddles word tokens #{first} and #{second}")]
    Straddle {
        index: usize,
        start: usize,
        end: usize,
        first: usize,
        second: usize,
    },
    #[error("words-per-token ratio must be positive and finite, got {0}")]
    InvalidRatio(f64),
    #[error("window size must be at least 1")]
    InvalidWindowSize,
    #[error("token `{text}` [{start}, {end}) does not match document `{doc_id}`")]
    TokenMismatch {
        doc_id: String,
        text: String,
        start: usize,
        end: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledToken {
    pub token: Token,
    pub label: Label,
}

impl LabeledToken {
    pub fn new(token: Token, label: Label) -> Self {
        Self { token, label }
    }
}

/// A word-piece style token with its offsets in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub is_continuation: bool,
}

impl SubwordToken {
    pub fn new(text: impl Into<String>, start: usize, end: usize, is_continuation: bool) -> Self {
        Self {
            text: text.into(),
            start,
            end,
            is_continuation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub doc_id: String,
    pub index: usize,
    pub tokens: Vec<LabeledToken>,
}

impl Window {
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.tokens.iter().map(|t| t.label)
    }
}

/// Labels each token by the span that fully contains it.
pub fn spans_to_iob(tokens: &[Token], spans: &[Span]) -> Result<Vec<Label>, LabelError> {
    let mut sorted = spans.to_vec();
    sorted.sort_by_key(|s| (s.start, s.end));

    tokens
        .iter()
        .enumerate()
        .map(|(index, tok)| {
            // Only the last span starting before the token's end can overlap it.
            let candidate = sorted.partition_point(|s| s.start < tok.end);
            let Some(span) = candidate.checked_sub(1).map(|i| sorted[i]) else {
                return Ok(Label::O);
            };
            if span.end <= tok.start {
                Ok(Label::O)
            } else if span.contains_range(tok.start, tok.end) {
                Ok(span.level.label())
            } else {
                Err(LabelError::Alignment {
                    index,
                    text: tok.text.clone(),
                    start: tok.start,
                    end: tok.end,
                    span,
                })
            }
        })
        .collect()
}

/// Merges runs of equal non-`O` labels into spans. `text` is the source the
/// token offsets point into.
pub fn iob_to_spans(text: &str, tokens: &[Token], labels: &[Label]) -> Result<Vec<Span>, LabelError> {
    if tokens.len() != labels.len() {
        return Err(LabelError::LengthMismatch {
            tokens: tokens.len(),
            labels: labels.len(),
        });
    }
    let mut spans: Vec<Span> = Vec::new();
    let mut open: Option<(Span, usize)> = None;

    for (idx, (tok, &label)) in tokens.iter().zip(labels).enumerate() {
        let Some(level) = label.level() else {
            spans.extend(open.take().map(|(s, _)| s));
            continue;
        };
        match open.as_mut() {
            Some((span, last)) if span.level == level && whitespace_between(text, &tokens[*last], tok) => {
                span.end = tok.end;
                *last = idx;
            }
            _ => {
                spans.extend(open.take().map(|(s, _)| s));
                open = Some((Span::new(tok.start, tok.end, level), idx));
            }
        }
    }
    spans.extend(open.map(|(s, _)| s));
    Ok(spans)
}

fn whitespace_between(text: &str, prev: &Token, next: &Token) -> bool {
    text.get(prev.end..next.start)
        .is_some_and(|gap| gap.chars().all(char::is_whitespace))
}

/// Gives each subword the label of the word it falls in; subwords touching
/// no word get `O`.
pub fn project_labels(words: &[LabeledToken], subwords: &[SubwordToken]) -> Result<Vec<Label>, LabelError> {
    subwords
        .iter()
        .enumerate()
        .map(|(index, sw)| {
            let first = words.partition_point(|w| w.token.end <= sw.start);
            let overlapping = words[first..]
                .iter()
                .take_while(|w| w.token.start < sw.end || (sw.start == sw.end && w.token.start <= sw.start))
                .count();
            match overlapping {
                0 => Ok(Label::O),
                1 => Ok(words[first].label),
                _ => Err(LabelError::Straddle {
                    index,
                    start: sw.start,
                    end: sw.end,
                    first,
                    second: first + 1,
                }),
            }
        })
        .collect()
}

/// Cuts a labeled token sequence into consecutive, non-overlapping windows.
pub fn make_windows(
    doc_id: &str,
    tokens: Vec<LabeledToken>,
    window_size: usize,
) -> Result<Vec<Window>, LabelError> {
    if window_size == 0 {
        return Err(LabelError::InvalidWindowSize);
    }
    let mut windows = Vec::with_capacity(tokens.len().div_ceil(window_size));
    let mut iter = tokens.into_iter().peekable();
    while iter.peek().is_some() {
        windows.push(Window {
            doc_id: doc_id.to_string(),
            index: windows.len(),
            tokens: iter.by_ref().take(window_size).collect(),
        });
    }
    Ok(windows)
}

/// Estimated number of subword tokens needed for `word_count` words.
pub fn subword_budget(word_count: usize, words_per_token: f64) -> Result<usize, LabelError> {
    if !(words_per_token.is_finite() && words_per_token > 0.0) {
        return Err(LabelError::InvalidRatio(words_per_token));
    }
    Ok((word_count as f64 / words_per_token).ceil() as usize)
}

/// Pre-tokenizes `doc` and labels the tokens from its gold spans.
pub fn label_document(doc: &Document, spans: &[Span]) -> Result<Vec<LabeledToken>, LabelError> {
    let tokens = pretokenize(&doc.text);
    let labels = spans_to_iob(&tokens, spans)?;
    Ok(tokens.into_iter().zip(labels).map(|(t, l)| LabeledToken::new(t, l)).collect())
}

/// Reassembles one document's windows (any order) and decodes their labels
/// into spans, checking every token against the document text.
pub fn windows_to_spans(doc: &Document, windows: &[&Window]) -> Result<Vec<Span>, LabelError> {
    let mut ordered = windows.to_vec();
    ordered.sort_by_key(|w| w.index);
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for lt in ordered.iter().flat_map(|w| &w.tokens) {
        if doc.text.get(lt.token.start..lt.token.end) != Some(lt.token.text.as_str()) {
            return Err(LabelError::TokenMismatch {
                doc_id: doc.doc_id.clone(),
                text: lt.token.text.clone(),
                start: lt.token.start,
                end: lt.token.end,
            });
        }
        tokens.push(lt.token.clone());
        labels.push(lt.label);
    }
    iob_to_spans(&doc.text, &tokens, &labels)
}
