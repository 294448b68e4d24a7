//! Hierarchical segmentation of unformatted plain-text documents.
//!
//! The pipeline detects titles and subtitles with a configurable rule
//! engine ([`tocregex`]), converts between span annotations and IOB token
//! labels for sequence-labeling models ([`labeling`]), builds a
//! table-of-contents tree used to extract or remove sections ([`tocbuild`]),
//! and scores segmenters with linear and hierarchical span metrics
//! ([`evalmetrics`]). [`corpus`] handles ingestion, annotation files,
//! frequency analysis and synthetic corpora.

pub mod corpus;
pub mod docmodel;
pub mod evalmetrics;
pub mod labeling;
pub mod tocbuild;
pub mod tocregex;

pub use docmodel::{normalize_title, pretokenize, validate_annotation, Document, Label, Level, Span, Token};
pub use evalmetrics::{Aggregation, MatchCounts, MetricsReport, Mode};
pub use tocbuild::{TocNode, TocTree};
pub use tocregex::{compile, Denylist, Detection, Engine, PatternSet};
