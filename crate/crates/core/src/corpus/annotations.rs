use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::docmodel::Span;

#[derive(Debug, Serialize, Deserialize)]
struct Record<'a> {
    #[serde(borrow)]
    doc_id: std::borrow::Cow<'a, str>,
    spans: Vec<Span>,
}

/// Per-document span lists in insertion order, shared by gold annotations and
/// predictions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    records: Vec<(String, Vec<Span>)>,
    index: HashMap<String, usize>,
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc_id: impl Into<String>, spans: Vec<Span>) -> Result<(), CorpusError> {
        let doc_id = doc_id.into();
        if self.index.contains_key(&doc_id) {
            return Err(CorpusError::DuplicateId {
                doc_id,
                location: "annotation set".into(),
            });
        }
        self.index.insert(doc_id.clone(), self.records.len());
        self.records.push((doc_id, spans));
        Ok(())
    }

    pub fn get(&self, doc_id: &str) -> Option<&[Span]> {
        self.index.get(doc_id).map(|&i| self.records[i].1.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Span])> {
        self.records.iter().map(|(id, spans)| (id.as_str(), spans.as_slice()))
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|(id, _)| id.as_str())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn span_count(&self) -> usize {
        self.records.iter().map(|(_, s)| s.len()).sum()
    }

    /// Reads the JSON-lines annotation format. Blank lines are skipped.
    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self, CorpusError> {
        let mut set = AnnotationSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let location = format!("{source}:{}", idx + 1);
            let line = line.map_err(|e| CorpusError::io(&location, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                location: location.clone(),
                reason: e.to_string(),
            })?;
            if record.doc_id.is_empty() {
                return Err(CorpusError::Malformed {
                    location,
                    reason: "empty doc_id".into(),
                });
            }
            if set.index.contains_key(record.doc_id.as_ref()) {
                return Err(CorpusError::DuplicateId {
                    doc_id: record.doc_id.into_owned(),
                    location,
                });
            }
            set.insert(record.doc_id.into_owned(), record.spans)?;
        }
        Ok(set)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (doc_id, spans) in &self.records {
            let record = Record {
                doc_id: doc_id.as_str().into(),
                spans: spans.clone(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_format() {
        let mut set = AnnotationSet::new();
        set.insert("d1", vec![Span::title(0, 5), Span::subtitle(10, 14)]).unwrap();
        set.insert("d2", vec![]).unwrap();
        let mut out = Vec::new();
        set.write(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "{\"doc_id\":\"d1\",\"spans\":[{\"start\":0,\"end\":5,\"level\":\"title\"},{\"start\":10,\"end\":14,\"level\":\"subtitle\"}]}\n{\"doc_id\":\"d2\",\"spans\":[]}\n"
        );
        assert_eq!(AnnotationSet::read(text.as_bytes(), "mem").unwrap(), set);
    }

    #[test]
    fn read_errors_carry_line() {
        let dup = "{\"doc_id\":\"a\",\"spans\":[]}\n\n{\"doc_id\":\"a\",\"spans\":[]}\n";
        match AnnotationSet::read(dup.as_bytes(), "gold.jsonl") {
            Err(CorpusError::DuplicateId { doc_id, location }) => {
                assert_eq!(doc_id, "a");
                assert_eq!(location, "gold.jsonl:3");
            }
            other => panic!("{other:?}"),
        }
        let bad = "{\"doc_id\":\"a\",\"spans\":[{\"start\":0,\"end\":1,\"level\":\"chapter\"}]}\n";
        assert!(matches!(
            AnnotationSet::read(bad.as_bytes(), "p"),
            Err(CorpusError::Malformed { .. })
        ));
    }
}
