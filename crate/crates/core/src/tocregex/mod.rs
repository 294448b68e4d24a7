//! Rule-based title and subtitle detection.
//!
//! A [`PatternSet`] is compiled into an immutable [`Engine`]. Every line
//! start is an anchor; each spec checks its prefix class there, matches its
//! content class, and then requires a colon followed either by the end of the
//! line or by more text on the same line. Competing candidates are resolved by
//! earliest start, then longest content, then spec order. Denylisted titles
//! are dropped last.

mod config;
mod denylist;

use std::collections::HashSet;
use std::ops::Range;

use regex::Regex;
use thiserror::Error;

pub use config::{ContentClass, PatternSet, PatternSpec, PrefixClass, TerminatorClass};
pub use denylist::{merge_denylist, Denylist, DenylistError};

use crate::docmodel::{normalize_title, Document, Level, Span};

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("pattern config: {0}")]
    Syntax(String),
    #[error("pattern `{spec_id}`: unknown {field} `{value}`")]
    UnknownValue {
        spec_id: String,
        field: &'static str,
        value: String,
    },
    #[error("pattern `{0}` is defined more than once")]
    DuplicateId(String),
    #[error("pattern `{spec_id}`: unknown content class `{class}`")]
    UnknownContentClass { spec_id: String, class: String },
    #[error("pattern `{spec_id}`: content class `{class}` is malformed: {reason}")]
    MalformedContent {
        spec_id: String,
        class: String,
        reason: String,
    },
    #[error("offset {offset} is outside the document (length {len})")]
    OffsetOutOfBounds { offset: usize, len: usize },
}

/// A heading found by the engine. The span covers the heading text only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub span: Span,
    pub pattern_id: String,
    pub matched_text: String,
}

/// The three sub-regions of a match, as returned by [`Engine::explain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchTrace {
    pub pattern_id: String,
    pub prefix: Range<usize>,
    pub content: Range<usize>,
    pub terminator: Range<usize>,
    pub content_text: String,
}

/// Trimmed content range and colon offset, if the class matched.
type ContentMatch = Option<(Range<usize>, usize)>;

#[derive(Clone)]
struct CompiledClass {
    regex: Regex,
    max_chars: Option<usize>,
    max_words: Option<usize>,
    require_letter: bool,
}

#[derive(Clone)]
struct CompiledSpec {
    id: String,
    prefix: PrefixClass,
    class: usize,
    terminator: TerminatorClass,
    level: Level,
}

#[derive(Debug, Clone)]
struct Candidate {
    spec: usize,
    prefix_start: usize,
    content: Range<usize>,
    terminator_end: usize,
}

/// Compiled, immutable detector. Cheap to share across threads.
#[derive(Clone)]
pub struct Engine {
    specs: Vec<CompiledSpec>,
    classes: Vec<CompiledClass>,
    denylist: Denylist,
}

/// Compiles a pattern set; failures name the offending spec.
pub fn compile(set: &PatternSet) -> Result<Engine, PatternError> {
    Engine::new(set)
}

impl Engine {
    pub fn new(set: &PatternSet) -> Result<Self, PatternError> {
        let mut seen = HashSet::new();
        let mut class_index: Vec<(String, usize)> = Vec::new();
        let mut classes = Vec::new();
        let mut specs = Vec::with_capacity(set.specs.len());

        for spec in &set.specs {
            if !seen.insert(spec.id.as_str()) {
                return Err(PatternError::DuplicateId(spec.id.clone()));
            }
            let class = match class_index.iter().find(|(name, _)| *name == spec.content) {
                Some((_, idx)) => *idx,
                None => {
                    let def = set.content_classes.get(&spec.content).ok_or_else(|| {
                        PatternError::UnknownContentClass {
                            spec_id: spec.id.clone(),
                            class: spec.content.clone(),
                        }
                    })?;
                    classes.push(compile_class(&spec.id, &spec.content, def)?);
                    class_index.push((spec.content.clone(), classes.len() - 1));
                    classes.len() - 1
                }
            };
            specs.push(CompiledSpec {
                id: spec.id.clone(),
                prefix: spec.prefix,
                class,
                terminator: spec.terminator,
                level: spec.level,
            });
        }

        Ok(Self {
            specs,
            classes,
            denylist: set.denylist.clone(),
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.specs.len()
    }

    pub fn denylist(&self) -> &Denylist {
        &self.denylist
    }

    /// Same engine with a different denylist.
    pub fn with_denylist(mut self, denylist: Denylist) -> Self {
        self.denylist = denylist;
        self
    }

    /// Detected headings, sorted and disjoint, with denylisted titles removed.
    pub fn detect(&self, doc: &Document) -> Vec<Detection> {
        self.detect_text(&doc.text)
    }

    pub fn detect_text(&self, text: &str) -> Vec<Detection> {
        self.resolved(text)
            .into_iter()
            .map(|c| self.to_detection(text, &c))
            .filter(|d| !self.denylist.contains(&normalize_title(&d.matched_text)))
            .collect()
    }

    /// Detections before denylist filtering, for frequency counting and
    /// curation.
    pub fn detect_unfiltered(&self, doc: &Document) -> Vec<Detection> {
        self.resolved(&doc.text)
            .into_iter()
            .map(|c| self.to_detection(&doc.text, &c))
            .collect()
    }

    /// Spans of [`Engine::detect`], for evaluation.
    pub fn segment(&self, doc: &Document) -> Vec<Span> {
        self.detect(doc).into_iter().map(|d| d.span).collect()
    }

    /// Reports which pattern produced the detection whose matched region
    /// (prefix, content and terminator) covers `offset`.
    pub fn explain(&self, doc: &Document, offset: usize) -> Result<Option<MatchTrace>, PatternError> {
        let text = &doc.text;
        if offset > text.len() {
            return Err(PatternError::OffsetOutOfBounds {
                offset,
                len: text.len(),
            });
        }
        let trace = self
            .resolved(text)
            .into_iter()
            .filter(|c| !self.denylist.contains(&normalize_title(&text[c.content.clone()])))
            .find(|c| c.prefix_start <= offset && offset < c.terminator_end)
            .map(|c| MatchTrace {
                pattern_id: self.specs[c.spec].id.clone(),
                prefix: c.prefix_start..c.content.start,
                terminator: c.content.end..c.terminator_end,
                content_text: text[c.content.clone()].to_string(),
                content: c.content,
            });
        Ok(trace)
    }

    fn to_detection(&self, text: &str, c: &Candidate) -> Detection {
        let spec = &self.specs[c.spec];
        Detection {
            span: Span::new(c.content.start, c.content.end, spec.level),
            pattern_id: spec.id.clone(),
            matched_text: text[c.content.clone()].to_string(),
        }
    }

    fn resolved(&self, text: &str) -> Vec<Candidate> {
        let mut candidates = self.candidates(text);
        candidates.sort_by(|a, b| {
            a.content
                .start
                .cmp(&b.content.start)
                .then_with(|| b.content.end.cmp(&a.content.end))
                .then_with(|| a.spec.cmp(&b.spec))
        });
        let mut kept: Vec<Candidate> = Vec::new();
        for c in candidates {
            if kept.last().is_none_or(|last| c.content.start >= last.content.end) {
                kept.push(c);
            }
        }
        kept
    }

    fn candidates(&self, text: &str) -> Vec<Candidate> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        if self.specs.is_empty() {
            return out;
        }
        let anchors = std::iter::once(0).chain(
            bytes
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        let mut class_cache: Vec<Option<ContentMatch>> = vec![None; self.classes.len()];

        for anchor in anchors {
            if anchor >= text.len() {
                continue;
            }
            let content_start = anchor
                + bytes[anchor..]
                    .iter()
                    .take_while(|&&b| b == b' ' || b == b'\t')
                    .count();
            class_cache.iter_mut().for_each(|slot| *slot = None);

            for (idx, spec) in self.specs.iter().enumerate() {
                let prefix_start = match spec.prefix {
                    PrefixClass::DocStart if anchor == 0 => 0,
                    PrefixClass::LineStart if anchor >= 1 => anchor - 1,
                    PrefixClass::BlankLine if anchor >= 2 && bytes[anchor - 2] == b'\n' => anchor - 2,
                    _ => continue,
                };
                let found = class_cache[spec.class]
                    .get_or_insert_with(|| self.match_content(text, content_start, spec.class))
                    .clone();
                let Some((content, colon)) = found else {
                    continue;
                };
                if let Some(terminator_end) = match_terminator(bytes, colon, spec.terminator) {
                    out.push(Candidate {
                        spec: idx,
                        prefix_start,
                        content,
                        terminator_end,
                    });
                }
            }
        }
        out
    }

    /// Content range (trailing blanks trimmed) and the colon position.
    fn match_content(&self, text: &str, start: usize, class: usize) -> ContentMatch {
        let class = &self.classes[class];
        let caps = class.regex.captures(&text[start..])?;
        let raw = caps.name("content")?;
        let whole = caps.get(0)?;
        let content_text = raw.as_str().trim_end();
        if content_text.is_empty() || content_text.contains(['\n', ':']) {
            return None;
        }
        if let Some(max) = class.max_chars {
            if content_text.chars().count() > max {
                return None;
            }
        }
        if let Some(max) = class.max_words {
            if content_text.split_whitespace().count() > max {
                return None;
            }
        }
        if class.require_letter && !content_text.chars().any(char::is_alphabetic) {
            return None;
        }
        let content = start..start + content_text.len();
        Some((content, start + whole.end() - 1))
    }
}

/// End of the terminator region if the text after `colon` satisfies `class`.
fn match_terminator(bytes: &[u8], colon: usize, class: TerminatorClass) -> Option<usize> {
    let mut pos = colon + 1;
    while pos < bytes.len() && (bytes[pos] == b' ' || bytes[pos] == b'\t') {
        pos += 1;
    }
    let at_line_end = pos == bytes.len() || bytes[pos] == b'\n';
    match class {
        TerminatorClass::ColonNewline if at_line_end => Some((pos + 1).min(bytes.len())),
        TerminatorClass::ColonInline if !at_line_end => Some(pos),
        _ => None,
    }
}

fn compile_class(spec_id: &str, name: &str, def: &ContentClass) -> Result<CompiledClass, PatternError> {
    let malformed = |reason: String| PatternError::MalformedContent {
        spec_id: spec_id.to_string(),
        class: name.to_string(),
        reason,
    };
    if def.pattern.is_empty() {
        return Err(malformed("empty pattern".into()));
    }
    if def.max_chars == Some(0) || def.max_words == Some(0) {
        return Err(malformed("limits must be at least 1".into()));
    }
    let regex = Regex::new(&format!(r"\A(?P<content>(?:{}))[ \t]*:", def.pattern))
        .map_err(|e| malformed(e.to_string()))?;
    Ok(CompiledClass {
        regex,
        max_chars: def.max_chars,
        max_words: def.max_words,
        require_letter: def.require_letter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> Engine {
        compile(&PatternSet::builtin()).unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::new("t", text).unwrap()
    }

    #[test]
    fn builtin_compiles_to_twelve_matchers() {
        assert_eq!(engine().pattern_count(), 12);
    }

    #[test]
    fn empty_set_detects_nothing() {
        let e = compile(&PatternSet::default()).unwrap();
        assert!(e.detect(&doc("Chief Complaint:\nfever\n")).is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut set = PatternSet::builtin();
        let first = set.specs[0].clone();
        set.specs.push(first);
        assert!(matches!(compile(&set), Err(PatternError::DuplicateId(id)) if id == "P1a"));
    }

    #[test]
    fn malformed_content_names_spec() {
        let mut set = PatternSet::builtin();
        set.content_classes.get_mut("numbered").unwrap().pattern = "[unclosed".into();
        match compile(&set) {
            Err(PatternError::MalformedContent { spec_id, .. }) => assert_eq!(spec_id, "P2a"),
            other => panic!("unexpected {:?}", other.err()),
        }
        let mut set = PatternSet::builtin();
        set.specs[5].content = "nope".into();
        assert!(matches!(
            compile(&set),
            Err(PatternError::UnknownContentClass { spec_id, .. }) if spec_id == "P2c"
        ));
    }

    #[test]
    fn title_at_document_start() {
        let d = doc("Past Medical History:\nHTN\n");
        let found = engine().detect(&d);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].span, Span::title(0, 20));
        assert_eq!(found[0].matched_text, "Past Medical History");
        assert_eq!(found[0].pattern_id, "P1c");
    }

    #[test]
    fn inline_heading_is_subtitle() {
        let d = doc("Physical Exam:\nGeneral appearance is good\nNeck: supple\nLungs: clear\n");
        let found = engine().detect(&d);
        let got: Vec<_> = found.iter().map(|d| (d.matched_text.as_str(), d.span.level)).collect();
        assert_eq!(
            got,
            vec![
                ("Physical Exam", Level::Title),
                ("Neck", Level::Subtitle),
                ("Lungs", Level::Subtitle)
            ]
        );
        assert_eq!(found[1].pattern_id, "P4a");
    }

    #[test]
    fn denylist_suppresses_false_positive() {
        let text = "Medications:\nAspirin 81 mg daily\ntablet(s)*refills:\n0\n";
        let unfiltered = engine().detect_text(text);
        assert!(unfiltered.iter().any(|d| d.matched_text == "tablet(s)*refills"));

        let e = engine().with_denylist(["tablet(s)*refills"].into_iter().collect());
        let found = e.detect_text(text);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].matched_text, "Medications");
        assert_eq!(e.detect_unfiltered(&doc(text)).len(), 2);
    }

    #[test]
    fn blank_line_prefix_ties_go_to_earlier_spec() {
        let found = engine().detect_text("intro text\n\nSocial History:\nlives alone\n");
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].pattern_id, "P1a");
    }

    #[test]
    fn colon_lines_outside_the_content_class_are_ignored() {
        let e = engine();
        // twelve words
        let long = "x\nblood pressure 120 over 80 and heart rate 72 and temperature normal: ok\n";
        assert!(e.detect_text(long).is_empty());
        // no letter
        assert!(e.detect_text("x\n12:30\n").is_empty());
        // ';' is not a title character
        assert!(e.detect_text("x\nseen today; plan: rest\n").is_empty());
        assert!(e.detect_text("x\nNo colon here\n").is_empty());
        // colon followed by nothing on a blank-prefixed line is still a title
        assert_eq!(e.detect_text("x\n\nPlan:").len(), 1);
    }

    #[test]
    fn indentation_is_part_of_prefix() {
        let found = engine().detect_text("Exam:\n  HEENT: NC/AT\n");
        assert_eq!(found[1].matched_text, "HEENT");
        assert_eq!(found[1].span.start, 8);
    }

    #[test]
    fn numbered_heading() {
        let found = engine().detect_text("x\n2. Plan:\nrest\n");
        assert_eq!(found[0].matched_text, "2. Plan");
    }

    #[test]
    fn explain_examples() {
        let e = engine();
        let d = doc("Chief Complaint:\nfever");
        let trace = e.explain(&d, 3).unwrap().unwrap();
        assert_eq!(trace.pattern_id, "P1c");
        assert_eq!(trace.content_text, "Chief Complaint");
        assert_eq!(trace.prefix, 0..0);
        assert_eq!(trace.content, 0..15);
        assert_eq!(trace.terminator, 15..17);
        assert_eq!(e.explain(&d, 20).unwrap(), None);
        assert!(e.explain(&doc(""), 5).is_err());
        assert_eq!(e.explain(&doc(""), 0).unwrap(), None);
    }
}
