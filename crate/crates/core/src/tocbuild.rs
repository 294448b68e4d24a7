//! Two-level table-of-contents trees, section extraction and cleaning.
//!
//! A title's section runs from the end of its heading to the start of the
//! next title (or the end of the text). A subtitle's section runs to the next
//! heading of either level, clipped to its parent. Subtitles that appear
//! before the first title hang off the preamble `[0, preamble_end)`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docmodel::{normalize_title, validate_annotation, Document, Level, Span};

#[derive(Debug, Error)]
pub enum TocError {
    #[error("document `{doc_id}`: {reason}")]
    InvalidSpans { doc_id: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TocNode {
    pub heading: Span,
    pub heading_text: String,
    pub section_start: usize,
    pub section_end: usize,
    pub children: Vec<TocNode>,
}

impl TocNode {
    /// Heading plus body.
    pub fn extent(&self) -> Range<usize> {
        self.heading.start..self.section_end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TocTree {
    pub doc_id: String,
    pub preamble_end: usize,
    /// Subtitles that precede every title.
    pub preamble_children: Vec<TocNode>,
    pub roots: Vec<TocNode>,
}

impl TocTree {
    /// Nodes in document order with their depth (1 for titles, 2 for
    /// subtitles).
    pub fn walk(&self) -> Vec<(usize, &TocNode)> {
        let mut out: Vec<(usize, &TocNode)> = self.preamble_children.iter().map(|c| (2, c)).collect();
        for root in &self.roots {
            out.push((1, root));
            out.extend(root.children.iter().map(|c| (2, c)));
        }
        out
    }
}

/// Builds the tree for `doc` from sorted, disjoint, valid spans.
pub fn build_toc(doc: &Document, spans: &[Span]) -> Result<TocTree, TocError> {
    let invalid = |reason: String| TocError::InvalidSpans {
        doc_id: doc.doc_id.clone(),
        reason,
    };
    if let Some(v) = validate_annotation(doc, spans).violations.first() {
        return Err(invalid(v.to_string()));
    }
    if let Some(pair) = spans.windows(2).find(|p| p[0].start > p[1].start) {
        return Err(invalid(format!(
            "spans not sorted: [{}, {}) precedes [{}, {})",
            pair[0].start, pair[0].end, pair[1].start, pair[1].end
        )));
    }

    let len = doc.text.len();
    let next_title_after = |i: usize| {
        spans[i + 1..]
            .iter()
            .find(|s| s.level == Level::Title)
            .map_or(len, |s| s.start)
    };
    let node = |i: usize, section_end: usize| TocNode {
        heading: spans[i],
        heading_text: doc.text[spans[i].start..spans[i].end].to_string(),
        section_start: spans[i].end,
        section_end,
        children: Vec::new(),
    };

    let preamble_end = spans
        .iter()
        .find(|s| s.level == Level::Title)
        .map_or(len, |s| s.start);
    let mut tree = TocTree {
        doc_id: doc.doc_id.clone(),
        preamble_end,
        preamble_children: Vec::new(),
        roots: Vec::new(),
    };

    for (i, span) in spans.iter().enumerate() {
        match span.level {
            Level::Title => tree.roots.push(node(i, next_title_after(i))),
            Level::Subtitle => {
                let parent_end = tree.roots.last().map_or(preamble_end, |r| r.section_end);
                let end = spans.get(i + 1).map_or(len, |s| s.start).min(parent_end);
                let child = node(i, end);
                match tree.roots.last_mut() {
                    Some(root) => root.children.push(child),
                    None => tree.preamble_children.push(child),
                }
            }
        }
    }
    Ok(tree)
}

/// Bodies of every node whose normalized heading equals `query`, in
/// document order.
pub fn extract_sections<'a>(doc: &'a Document, tree: &TocTree, query: &str) -> Vec<&'a str> {
    let query = normalize_title(query);
    tree.walk()
        .into_iter()
        .filter(|(_, n)| normalize_title(&n.heading_text) == query)
        .map(|(_, n)| &doc.text[n.section_start..n.section_end])
        .collect()
}

/// Byte ranges (heading plus body) that [`clean_document`] removes, sorted
/// and disjoint. A removed title takes its subtitles with it.
pub fn removal_ranges(tree: &TocTree, removal: &HashSet<String>) -> Vec<Range<usize>> {
    let hit = |n: &TocNode| removal.contains(&normalize_title(&n.heading_text));
    let mut ranges = Vec::new();
    ranges.extend(tree.preamble_children.iter().filter(|c| hit(c)).map(TocNode::extent));
    for root in &tree.roots {
        if hit(root) {
            ranges.push(root.extent());
        } else {
            ranges.extend(root.children.iter().filter(|c| hit(c)).map(TocNode::extent));
        }
    }
    ranges
}

/// Copy of `doc` with every section whose heading is in `removal` cut out.
pub fn clean_document(doc: &Document, tree: &TocTree, removal: &HashSet<String>) -> Document {
    let ranges = removal_ranges(tree, removal);
    if ranges.is_empty() {
        return doc.clone();
    }
    let mut text = String::with_capacity(doc.text.len());
    let mut cursor = 0;
    for r in ranges {
        text.push_str(&doc.text[cursor..r.start]);
        cursor = r.end;
    }
    text.push_str(&doc.text[cursor..]);
    Document {
        doc_id: doc.doc_id.clone(),
        text,
    }
}

/// Human-readable TOC: a `# doc:` line, a preamble line, then one
/// tab-separated line per node — depth marker, heading offsets, section
/// offsets and heading text.
pub fn render_toc(tree: &TocTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# doc: {}", tree.doc_id);
    let _ = writeln!(out, "preamble\t0\t{}", tree.preamble_end);
    for (depth, node) in tree.walk() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            "*".repeat(depth),
            node.heading.start,
            node.heading.end,
            node.section_start,
            node.section_end,
            node.heading_text.escape_default()
        );
    }
    out
}

/// Machine-readable TOC record: the annotation record extended with section
/// extents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocRecord {
    pub doc_id: String,
    pub preamble_end: usize,
    pub spans: Vec<TocSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocSpan {
    pub start: usize,
    pub end: usize,
    pub level: Level,
    pub section_start: usize,
    pub section_end: usize,
}

impl From<&TocTree> for TocRecord {
    fn from(tree: &TocTree) -> Self {
        Self {
            doc_id: tree.doc_id.clone(),
            preamble_end: tree.preamble_end,
            spans: tree
                .walk()
                .into_iter()
                .map(|(_, n)| TocSpan {
                    start: n.heading.start,
                    end: n.heading.end,
                    level: n.heading.level,
                    section_start: n.section_start,
                    section_end: n.section_end,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAM: &str = "Physical exam:\nHEENT: NC/AT\nNeck: supple\nLungs: clear\nExtremities: no edema\n";

    fn exam() -> (Document, Vec<Span>) {
        let doc = Document::new("fig4", EXAM).unwrap();
        let mut spans = vec![Span::title(0, 13)];
        for name in ["HEENT", "Neck", "Lungs", "Extremities"] {
            let start = EXAM.find(&format!("\n{name}:")).unwrap() + 1;
            spans.push(Span::subtitle(start, start + name.len()));
        }
        (doc, spans)
    }

    #[test]
    fn one_title_four_subtitles() {
        let (doc, spans) = exam();
        let tree = build_toc(&doc, &spans).unwrap();
        assert_eq!(tree.roots.len(), 1);
        assert_eq!(tree.preamble_end, 0);
        let root = &tree.roots[0];
        assert_eq!(root.heading_text, "Physical exam");
        assert_eq!((root.section_start, root.section_end), (13, EXAM.len()));
        let names: Vec<_> = root.children.iter().map(|c| c.heading_text.as_str()).collect();
        assert_eq!(names, ["HEENT", "Neck", "Lungs", "Extremities"]);
        assert_eq!(&EXAM[root.children[1].section_start..root.children[1].section_end], ": supple\n");
    }

    #[test]
    fn no_spans_gives_preamble_only() {
        let doc = Document::new("d", "just text").unwrap();
        let tree = build_toc(&doc, &[]).unwrap();
        assert!(tree.roots.is_empty() && tree.preamble_children.is_empty());
        assert_eq!(tree.preamble_end, 9);
    }

    #[test]
    fn unsorted_or_overlapping_spans_rejected() {
        let doc = Document::new("d", "x".repeat(30)).unwrap();
        assert!(build_toc(&doc, &[Span::title(10, 12), Span::title(0, 2)]).is_err());
        assert!(build_toc(&doc, &[Span::title(0, 5), Span::title(3, 8)]).is_err());
        assert!(build_toc(&doc, &[Span::title(0, 50)]).is_err());
    }

    #[test]
    fn extract_examples() {
        let (doc, spans) = exam();
        let tree = build_toc(&doc, &spans).unwrap();
        assert_eq!(extract_sections(&doc, &tree, "physical exam"), vec![&EXAM[13..]]);
        assert!(extract_sections(&doc, &tree, "nonexistent").is_empty());

        let text = "Labs:\nNa 140\nPlan:\nrest\nLabs:\nK 4.0\n";
        let doc = Document::new("d", text).unwrap();
        let spans = [Span::title(0, 4), Span::title(13, 17), Span::title(24, 28)];
        let tree = build_toc(&doc, &spans).unwrap();
        assert_eq!(extract_sections(&doc, &tree, "Labs:"), vec![&text[4..13], &text[28..]]);
    }

    #[test]
    fn clean_examples() {
        let text = "Chief Complaint:\nfever\nDischarge Medications:\naspirin\nFollowup:\nclinic\n";
        let doc = Document::new("d", text).unwrap();
        let dm = text.find("Discharge").unwrap();
        let fu = text.find("Followup").unwrap();
        let spans = [Span::title(0, 15), Span::title(dm, dm + 21), Span::title(fu, fu + 8)];
        let tree = build_toc(&doc, &spans).unwrap();

        let removal: HashSet<String> = ["discharge medications".to_string()].into();
        let cleaned = clean_document(&doc, &tree, &removal);
        assert_eq!(cleaned.text, "Chief Complaint:\nfever\nFollowup:\nclinic\n");
        assert_eq!(cleaned.text.len(), text.len() - (fu - dm));

        assert_eq!(clean_document(&doc, &tree, &HashSet::new()), doc);
    }

    #[test]
    fn removing_a_subtitle_keeps_parent() {
        let (doc, spans) = exam();
        let tree = build_toc(&doc, &spans).unwrap();
        let neck = &tree.roots[0].children[1];
        let removed = neck.section_end - neck.heading.start;
        let cleaned = clean_document(&doc, &tree, &["neck".to_string()].into());
        assert_eq!(cleaned.text.len(), EXAM.len() - removed);
        assert_eq!(
            cleaned.text,
            "Physical exam:\nHEENT: NC/AT\nLungs: clear\nExtremities: no edema\n"
        );
    }

    #[test]
    fn render_and_record() {
        let (doc, spans) = exam();
        let tree = build_toc(&doc, &spans).unwrap();
        let text = render_toc(&tree);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# doc: fig4");
        assert_eq!(lines[1], "preamble\t0\t0");
        assert_eq!(lines[2], format!("*\t0\t13\t13\t{}\tPhysical exam", EXAM.len()));
        assert!(lines[3].starts_with("**\t15\t20\t20\t"));
        let record = TocRecord::from(&tree);
        assert_eq!(record.spans.len(), 5);
        let json = serde_json::to_string(&record.spans[0]).unwrap();
        assert_eq!(
            json,
            format!(r#"{{"start":0,"end":13,"level":"title","section_start":13,"section_end":{}}}"#, EXAM.len())
        );
    }
}
