//! Corpus ingestion and output, annotation files, title statistics and the
//! synthetic discharge-summary generator.

mod annotations;
mod stats;
mod synth;

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Lines, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use annotations::AnnotationSet;
pub use stats::{corpus_stats, title_frequencies, CorpusStats, FrequencyCounter, FrequencyTable, StatsAccumulator};
pub use synth::{generate_synthetic, GeneratorConfig, NoiseProfile, SyntheticCorpus, NOISE_TITLES, SUBTITLE_LEXICON, TITLE_LEXICON};

use crate::docmodel::{DocError, Document};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{location}: {source}")]
    Io {
        location: String,
        #[source]
        source: io::Error,
    },
    #[error("{location}: {reason}")]
    Malformed { location: String, reason: String },
    #[error("{location}: duplicate doc_id `{doc_id}`")]
    DuplicateId { doc_id: String, location: String },
    #[error("{location}: {source}")]
    Document {
        location: String,
        #[source]
        source: DocError,
    },
}

impl CorpusError {
    pub(crate) fn io(location: impl Into<String>, source: io::Error) -> Self {
        CorpusError::Io {
            location: location.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorpusFormat {
    /// A directory of `*.txt` files; the file stem is the doc id.
    TextDir,
    /// One `{"doc_id": ..., "text": ...}` object per line.
    JsonLines,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "textdir" => Ok(CorpusFormat::TextDir),
            "jsonl" => Ok(CorpusFormat::JsonLines),
            other => Err(format!("unknown corpus format `{other}` (expected textdir or jsonl)")),
        }
    }
}

/// Streaming document source. Holds at most one document in memory plus the
/// set of ids seen so far.
pub struct CorpusReader {
    source: Source,
    seen: HashSet<String>,
}

enum Source {
    Files(vec::IntoIter<PathBuf>),
    Lines {
        path: String,
        lines: Lines<BufReader<File>>,
        line_no: usize,
    },
}

#[derive(Deserialize)]
struct JsonDoc {
    doc_id: String,
    text: String,
}

/// Opens `path` as a document stream.
pub fn ingest(path: &Path, format: CorpusFormat) -> Result<CorpusReader, CorpusError> {
    let location = path.display().to_string();
    let source = match format {
        CorpusFormat::TextDir => {
            let mut files = Vec::new();
            for entry in fs::read_dir(path).map_err(|e| CorpusError::io(&location, e))? {
                let entry = entry.map_err(|e| CorpusError::io(&location, e))?;
                let p = entry.path();
                if p.extension().is_some_and(|ext| ext == "txt") && p.is_file() {
                    files.push(p);
                }
            }
            files.sort();
            if files.is_empty() {
                log::warn!("{location}: no .txt documents found");
            }
            Source::Files(files.into_iter())
        }
        CorpusFormat::JsonLines => {
            let file = File::open(path).map_err(|e| CorpusError::io(&location, e))?;
            Source::Lines {
                path: location,
                lines: BufReader::new(file).lines(),
                line_no: 0,
            }
        }
    };
    Ok(CorpusReader {
        source,
        seen: HashSet::new(),
    })
}

impl CorpusReader {
    fn next_document(&mut self) -> Option<Result<(Document, String), CorpusError>> {
        match &mut self.source {
            Source::Files(files) => {
                let path = files.next()?;
                let location = path.display().to_string();
                let read = || -> Result<(Document, String), CorpusError> {
                    let bytes = fs::read(&path).map_err(|e| CorpusError::io(&location, e))?;
                    let text = String::from_utf8(bytes).map_err(|e| CorpusError::Malformed {
                        location: location.clone(),
                        reason: format!("not valid UTF-8 ({e})"),
                    })?;
                    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let doc = Document::new(stem, text).map_err(|source| CorpusError::Document {
                        location: location.clone(),
                        source,
                    })?;
                    Ok((doc, location.clone()))
                };
                Some(read())
            }
            Source::Lines { path, lines, line_no } => loop {
                let line = lines.next()?;
                *line_no += 1;
                let location = format!("{path}:{line_no}");
                let line = match line {
                    Ok(l) => l,
                    Err(e) => return Some(Err(CorpusError::io(location, e))),
                };
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<JsonDoc>(&line)
                    .map_err(|e| CorpusError::Malformed {
                        location: location.clone(),
                        reason: e.to_string(),
                    })
                    .and_then(|rec| {
                        Document::new(rec.doc_id, rec.text).map_err(|source| CorpusError::Document {
                            location: location.clone(),
                            source,
                        })
                    });
                return Some(parsed.map(|d| (d, location)));
            },
        }
    }
}

impl Iterator for CorpusReader {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        let item = self.next_document()?;
        Some(item.and_then(|(doc, location)| {
            if self.seen.insert(doc.doc_id.clone()) {
                Ok(doc)
            } else {
                Err(CorpusError::DuplicateId {
                    doc_id: doc.doc_id,
                    location,
                })
            }
        }))
    }
}

/// An in-memory corpus with unique doc ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (i, doc) in documents.iter().enumerate() {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    doc_id: doc.doc_id.clone(),
                    location: format!("document #{i}"),
                });
            }
        }
        Ok(Self { documents })
    }

    pub fn load(path: &Path, format: CorpusFormat) -> Result<Self, CorpusError> {
        Ok(Self {
            documents: ingest(path, format)?.collect::<Result<_, _>>()?,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

/// Writes documents as JSON lines.
pub fn write_jsonl<'a, W: Write>(mut out: W, docs: impl IntoIterator<Item = &'a Document>) -> io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes each document to `<dir>/<doc_id>.txt`. The directory must exist.
pub fn write_text_dir<'a>(dir: &Path, docs: impl IntoIterator<Item = &'a Document>) -> Result<(), CorpusError> {
    for doc in docs {
        if doc.doc_id.contains(['/', '\\']) || doc.doc_id.starts_with('.') {
            return Err(CorpusError::Malformed {
                location: dir.display().to_string(),
                reason: format!("doc_id `{}` cannot be used as a file name", doc.doc_id),
            });
        }
        let path = dir.join(format!("{}.txt", doc.doc_id));
        fs::write(&path, &doc.text).map_err(|e| CorpusError::io(path.display().to_string(), e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_dir_ingest_sorted_and_normalized() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), "second\r\nline").unwrap();
        fs::write(dir.path().join("a.txt"), "first").unwrap();
        fs::write(dir.path().join("c.txt"), "third").unwrap();
        fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let docs: Vec<_> = ingest(dir.path(), CorpusFormat::TextDir)
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap();
        let ids: Vec<_> = docs.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(docs[1].text, "second\nline");
    }

    #[test]
    fn empty_dir_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(ingest(dir.path(), CorpusFormat::TextDir).unwrap().count(), 0);
    }

    #[test]
    fn jsonl_duplicate_names_id_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            "{\"doc_id\":\"x\",\"text\":\"a\"}\n{\"doc_id\":\"y\",\"text\":\"b\"}\n{\"doc_id\":\"x\",\"text\":\"c\"}\n",
        )
        .unwrap();
        let results: Vec<_> = ingest(&path, CorpusFormat::JsonLines).unwrap().collect();
        match &results[2] {
            Err(CorpusError::DuplicateId { doc_id, location }) => {
                assert_eq!(doc_id, "x");
                assert!(location.ends_with(":3"), "{location}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jsonl_malformed_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(&path, "{\"doc_id\":\"x\"}\n").unwrap();
        assert!(matches!(
            ingest(&path, CorpusFormat::JsonLines).unwrap().next(),
            Some(Err(CorpusError::Malformed { .. }))
        ));
        assert!(ingest(&dir.path().join("missing"), CorpusFormat::JsonLines).is_err());
    }

    #[test]
    fn jsonl_round_trip_preserves_bytes() {
        let docs = vec![
            Document::new("a", "Chief Complaint:\n\"quoted\" — ünïcode\ttab\n").unwrap(),
            Document::new("b", "").unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &docs).unwrap();
        fs::write(&path, &buf).unwrap();
        let back = Corpus::load(&path, CorpusFormat::JsonLines).unwrap();
        assert_eq!(back.documents(), docs.as_slice());
    }
}
