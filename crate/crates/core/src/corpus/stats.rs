use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::docmodel::{normalize_title, pretokenize, Document};
use crate::tocregex::Engine;

/// Candidate-title counts, most frequent first (ties by title).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    pub rows: Vec<(String, usize)>,
}

impl FrequencyTable {
    pub fn total(&self) -> usize {
        self.rows.iter().map(|(_, c)| c).sum()
    }

    pub fn count(&self, title: &str) -> Option<usize> {
        self.rows.iter().find(|(t, _)| t == title).map(|&(_, c)| c)
    }

    pub fn top(&self, n: usize) -> &[(String, usize)] {
        &self.rows[..n.min(self.rows.len())]
    }

    /// Tab-separated `count<TAB>title` lines.
    pub fn to_tsv(&self) -> String {
        self.rows.iter().map(|(t, c)| format!("{c}\t{t}\n")).collect()
    }
}

/// Mergeable counter behind [`title_frequencies`]. Counts detections before
/// denylist filtering so false positives stay visible for curation.
#[derive(Debug, Clone, Default)]
pub struct FrequencyCounter {
    counts: HashMap<String, usize>,
}

impl FrequencyCounter {
    pub fn add(&mut self, engine: &Engine, doc: &Document) {
        for det in engine.detect_unfiltered(doc) {
            *self.counts.entry(normalize_title(&det.matched_text)).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: FrequencyCounter) {
        for (title, n) in other.counts {
            *self.counts.entry(title).or_insert(0) += n;
        }
    }

    pub fn finish(self) -> FrequencyTable {
        let mut rows: Vec<_> = self.counts.into_iter().collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        FrequencyTable { rows }
    }
}

pub fn title_frequencies<'a>(docs: impl IntoIterator<Item = &'a Document>, engine: &Engine) -> FrequencyTable {
    let mut counter = FrequencyCounter::default();
    for doc in docs {
        counter.add(engine, doc);
    }
    counter.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub document_count: usize,
    /// Word tokens (pre-tokens that start with a letter or digit).
    pub mean_length: f64,
    pub median_length: f64,
    pub mean_headings_per_doc: f64,
    pub unique_titles: usize,
    pub total_headings: usize,
}

/// Mergeable accumulator behind [`corpus_stats`]. Headings are counted after
/// denylist filtering.
#[derive(Debug, Clone, Default)]
pub struct StatsAccumulator {
    lengths: Vec<usize>,
    headings: usize,
    titles: HashSet<String>,
}

impl StatsAccumulator {
    pub fn add(&mut self, engine: &Engine, doc: &Document) {
        self.lengths
            .push(pretokenize(&doc.text).iter().filter(|t| t.is_word()).count());
        for det in engine.detect(doc) {
            self.headings += 1;
            self.titles.insert(normalize_title(&det.matched_text));
        }
    }

    pub fn merge(&mut self, other: StatsAccumulator) {
        self.lengths.extend(other.lengths);
        self.headings += other.headings;
        self.titles.extend(other.titles);
    }

    pub fn finish(mut self) -> CorpusStats {
        let n = self.lengths.len();
        if n == 0 {
            return CorpusStats {
                document_count: 0,
                mean_length: 0.0,
                median_length: 0.0,
                mean_headings_per_doc: 0.0,
                unique_titles: 0,
                total_headings: 0,
            };
        }
        self.lengths.sort_unstable();
        let median = if n % 2 == 1 {
            self.lengths[n / 2] as f64
        } else {
            (self.lengths[n / 2 - 1] + self.lengths[n / 2]) as f64 / 2.0
        };
        CorpusStats {
            document_count: n,
            mean_length: self.lengths.iter().sum::<usize>() as f64 / n as f64,
            median_length: median,
            mean_headings_per_doc: self.headings as f64 / n as f64,
            unique_titles: self.titles.len(),
            total_headings: self.headings,
        }
    }
}

pub fn corpus_stats<'a>(docs: impl IntoIterator<Item = &'a Document>, engine: &Engine) -> CorpusStats {
    let mut acc = StatsAccumulator::default();
    for doc in docs {
        acc.add(engine, doc);
    }
    acc.finish()
}
