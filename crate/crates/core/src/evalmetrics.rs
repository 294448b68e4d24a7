//! Span-level precision, recall and F1.
//!
//! Linear mode ignores heading levels; hierarchical mode also requires the
//! level to agree. Matching is on exact boundaries unless a character slack
//! is configured.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::AnnotationSet;
use crate::docmodel::{Document, Level, Span};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{side} spans #{first} and #{second} overlap")]
    Overlap {
        side: &'static str,
        first: usize,
        second: usize,
    },
    #[error("prediction for unknown document `{0}`")]
    UnknownDocument(String),
    #[error("cannot time a segmenter on an empty corpus")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Hierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Micro,
    Macro,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Hierarchical => "hierarchical",
        })
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Micro => "micro",
            Aggregation::Macro => "macro",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl Counts {
    pub fn add(&mut self, other: &Counts) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
    }

    pub fn is_empty(&self) -> bool {
        self.true_positives + self.false_positives + self.false_negatives == 0
    }

    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }

    pub fn f1(&self) -> f64 {
        harmonic(self.precision(), self.recall())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Match counts split by heading level. True positives and false negatives
/// are attributed to the gold span's level, false positives to the
/// predicted span's level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub mode: Mode,
    pub title: Counts,
    pub subtitle: Counts,
    pub overall: Counts,
}

impl MatchCounts {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            title: Counts::default(),
            subtitle: Counts::default(),
            overall: Counts::default(),
        }
    }

    pub fn class(&self, level: Level) -> &Counts {
        match level {
            Level::Title => &self.title,
            Level::Subtitle => &self.subtitle,
        }
    }

    fn class_mut(&mut self, level: Level) -> &mut Counts {
        match level {
            Level::Title => &mut self.title,
            Level::Subtitle => &mut self.subtitle,
        }
    }

    /// Pools another document's counts into these.
    pub fn merge(&mut self, other: &MatchCounts) {
        self.title.add(&other.title);
        self.subtitle.add(&other.subtitle);
        self.overall.add(&other.overall);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub level: Level,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: Mode,
    pub aggregation: Aggregation,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassReport>,
    pub counts: MatchCounts,
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}  aggregation: {}", self.mode, self.aggregation)?;
        writeln!(
            f,
            "{:<10} {:>9} {:>9} {:>9} {:>6} {:>6} {:>6}",
            "class", "precision", "recall", "f1", "tp", "fp", "fn"
        )?;
        for c in &self.per_class {
            writeln!(
                f,
                "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>6} {:>6} {:>6}",
                c.level.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.counts.true_positives,
                c.counts.false_positives,
                c.counts.false_negatives
            )?;
        }
        let o = &self.counts.overall;
        write!(
            f,
            "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>6} {:>6} {:>6}",
            "overall", self.precision, self.recall, self.f1, o.true_positives, o.false_positives, o.false_negatives
        )
    }
}

fn check_disjoint(side: &'static str, spans: &[Span]) -> Result<(), EvalError> {
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by_key(|&i| (spans[i].start, spans[i].end));
    for pair in order.windows(2) {
        if spans[pair[0]].overlaps(&spans[pair[1]]) {
            let (first, second) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Err(EvalError::Overlap { side, first, second });
        }
    }
    Ok(())
}

/// Exact-boundary matching.
pub fn match_spans(gold: &[Span], pred: &[Span], mode: Mode) -> Result<MatchCounts, EvalError> {
    match_spans_with_slack(gold, pred, mode, 0)
}

/// Matching where both boundaries may differ by at most `slack` bytes. With
/// `slack == 0` this is exact matching; each gold span is used at most once.
pub fn match_spans_with_slack(
    gold: &[Span],
    pred: &[Span],
    mode: Mode,
    slack: usize,
) -> Result<MatchCounts, EvalError> {
    let pairs = match_pairs_with_slack(gold, pred, mode, slack)?;
    let mut gold_matched = vec![false; gold.len()];
    let mut pred_matched = vec![false; pred.len()];
    for &(gi, pi) in &pairs {
        gold_matched[gi] = true;
        pred_matched[pi] = true;
    }

    let mut counts = MatchCounts::new(mode);
    for (g, matched) in gold.iter().zip(&gold_matched) {
        let c = counts.class_mut(g.level);
        if *matched {
            c.true_positives += 1;
        } else {
            c.false_negatives += 1;
        }
    }
    for (p, matched) in pred.iter().zip(&pred_matched) {
        if !matched {
            counts.class_mut(p.level).false_positives += 1;
        }
    }
    let (title, subtitle) = (counts.title, counts.subtitle);
    counts.overall.add(&title);
    counts.overall.add(&subtitle);
    Ok(counts)
}

/// The true-positive set of exact matching as `(gold index, predicted
/// index)` pairs, ordered by gold index.
pub fn match_pairs(gold: &[Span], pred: &[Span], mode: Mode) -> Result<Vec<(usize, usize)>, EvalError> {
    match_pairs_with_slack(gold, pred, mode, 0)
}

pub fn match_pairs_with_slack(
    gold: &[Span],
    pred: &[Span],
    mode: Mode,
    slack: usize,
) -> Result<Vec<(usize, usize)>, EvalError> {
    check_disjoint("gold", gold)?;
    check_disjoint("predicted", pred)?;

    let compatible = |g: &Span, p: &Span| {
        g.start.abs_diff(p.start) <= slack
            && g.end.abs_diff(p.end) <= slack
            && (mode == Mode::Linear || g.level == p.level)
    };

    let mut gold_matched = vec![false; gold.len()];
    let mut pairs = Vec::new();
    if slack == 0 {
        let index: HashMap<(usize, usize), usize> =
            gold.iter().enumerate().map(|(i, g)| ((g.start, g.end), i)).collect();
        for (pi, p) in pred.iter().enumerate() {
            if let Some(&gi) = index.get(&(p.start, p.end)) {
                if !gold_matched[gi] && compatible(&gold[gi], p) {
                    gold_matched[gi] = true;
                    pairs.push((gi, pi));
                }
            }
        }
    } else {
        // Greedy: predictions in order, each takes the earliest free
        // compatible gold span.
        let mut gold_order: Vec<usize> = (0..gold.len()).collect();
        gold_order.sort_by_key(|&i| gold[i].start);
        let mut pred_order: Vec<usize> = (0..pred.len()).collect();
        pred_order.sort_by_key(|&i| pred[i].start);
        for pi in pred_order {
            if let Some(&gi) = gold_order
                .iter()
                .find(|&&gi| !gold_matched[gi] && compatible(&gold[gi], &pred[pi]))
            {
                gold_matched[gi] = true;
                pairs.push((gi, pi));
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Turns counts into ratios. Macro averages the per-class scores over the
/// classes that occur in gold or predictions; linear mode has a single class
/// so macro equals micro there.
pub fn compute_metrics(counts: &MatchCounts, aggregation: Aggregation) -> MetricsReport {
    let per_class: Vec<ClassReport> = Level::ALL
        .iter()
        .map(|&level| {
            let c = *counts.class(level);
            ClassReport {
                level,
                precision: c.precision(),
                recall: c.recall(),
                f1: c.f1(),
                counts: c,
            }
        })
        .collect();

    let o = &counts.overall;
    let (precision, recall, f1) = match (aggregation, counts.mode) {
        (Aggregation::Micro, _) | (Aggregation::Macro, Mode::Linear) => (o.precision(), o.recall(), o.f1()),
        (Aggregation::Macro, Mode::Hierarchical) => {
            let present: Vec<&ClassReport> = per_class.iter().filter(|c| !c.counts.is_empty()).collect();
            if present.is_empty() {
                (0.0, 0.0, 0.0)
            } else {
                let n = present.len() as f64;
                (
                    present.iter().map(|c| c.precision).sum::<f64>() / n,
                    present.iter().map(|c| c.recall).sum::<f64>() / n,
                    present.iter().map(|c| c.f1).sum::<f64>() / n,
                )
            }
        }
    };

    MetricsReport {
        mode: counts.mode,
        aggregation,
        precision,
        recall,
        f1,
        per_class,
        counts: *counts,
    }
}

/// Pools counts over every gold document; a gold document without a
/// prediction counts as an empty prediction.
pub fn evaluate_corpus(
    gold: &AnnotationSet,
    pred: &AnnotationSet,
    mode: Mode,
    aggregation: Aggregation,
) -> Result<MetricsReport, EvalError> {
    evaluate_corpus_with_slack(gold, pred, mode, aggregation, 0)
}

pub fn evaluate_corpus_with_slack(
    gold: &AnnotationSet,
    pred: &AnnotationSet,
    mode: Mode,
    aggregation: Aggregation,
    slack: usize,
) -> Result<MetricsReport, EvalError> {
    let gold_ids: HashSet<&str> = gold.doc_ids().collect();
    if let Some(unknown) = pred.doc_ids().find(|id| !gold_ids.contains(id)) {
        return Err(EvalError::UnknownDocument(unknown.to_string()));
    }
    let mut pooled = MatchCounts::new(mode);
    for (doc_id, gold_spans) in gold.iter() {
        let pred_spans = pred.get(doc_id).unwrap_or(&[]);
        pooled.merge(&match_spans_with_slack(gold_spans, pred_spans, mode, slack)?);
    }
    Ok(compute_metrics(&pooled, aggregation))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyStats {
    pub documents: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub max_ms: f64,
}

/// Per-document wall time of `segment` over `corpus`, after one discarded
/// warm-up pass.
pub fn time_segmenter<F, R>(corpus: &[Document], mut segment: F) -> Result<LatencyStats, EvalError>
where
    F: FnMut(&Document) -> R,
{
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    for doc in corpus {
        std::hint::black_box(segment(doc));
    }
    let mut times: Vec<Duration> = corpus
        .iter()
        .map(|doc| {
            let start = Instant::now();
            std::hint::black_box(segment(doc));
            start.elapsed()
        })
        .collect();
    times.sort();
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let n = times.len();
    let median = if n % 2 == 1 {
        ms(times[n / 2])
    } else {
        (ms(times[n / 2 - 1]) + ms(times[n / 2])) / 2.0
    };
    Ok(LatencyStats {
        documents: n,
        mean_ms: times.iter().map(|&d| ms(d)).sum::<f64>() / n as f64,
        median_ms: median,
        max_ms: ms(times[n - 1]),
    })
}
