//! Seeded generator of discharge-summary-like documents with exact gold
//! heading spans.
//!
//! Titles sit alone on their line and end with a colon; subtitles start a
//! line and are followed by text after the colon. Body text never contains a
//! colon, so the only pattern-conforming lines are the planted headings and,
//! when noise is enabled, medication-list fragments that should be denylisted.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AnnotationSet;
use crate::docmodel::{Document, Span};

pub const TITLE_LEXICON: &[&str] = &[
    "Chief Complaint",
    "History of Present Illness",
    "Past Medical History",
    "Past Surgical History",
    "Family History",
    "Social History",
    "Allergies",
    "Physical Exam",
    "Pertinent Results",
    "Admission Labs",
    "Brief Hospital Course",
    "Medications on Admission",
    "Discharge Medications",
    "Discharge Disposition",
    "Discharge Diagnosis",
    "Discharge Condition",
    "Discharge Instructions",
    "Followup Instructions",
    "Major Surgical or Invasive Procedure",
];

pub const SUBTITLE_LEXICON: &[&str] = &[
    "HEENT",
    "Neck",
    "Lungs",
    "Extremities",
    "General",
    "Cardiac",
    "Abdomen",
    "Neuro",
    "Skin",
    "Vitals",
    "Pulses",
    "Primary diagnosis",
    "Secondary diagnosis",
    "Mental status",
];

/// Medication-list fragments that match heading patterns but are not
/// headings. Each is planted as a line of its own.
pub const NOISE_TITLES: &[&str] = &["tablet(s)*refills", "disp", "sig"];

const NOISE_LINES: &[&str] = &[
    "Tablet(s)*Refills:\n0\n",
    "Disp: thirty tablets\n",
    "Sig: one tablet by mouth daily\n",
];

const BODY_WORDS: &[&str] = &[
    "patient", "was", "admitted", "with", "chest", "pain", "and", "shortness", "of", "breath", "the",
    "noted", "to", "have", "a", "history", "hypertension", "diabetes", "mellitus", "presented", "after",
    "fall", "at", "home", "no", "acute", "distress", "denies", "fever", "chills", "nausea", "vomiting",
    "blood", "pressure", "stable", "on", "room", "air", "started", "treated", "for", "pneumonia",
    "improved", "over", "course", "discharged", "in", "good", "condition", "follow", "up", "clinic",
    "weeks", "echo", "showed", "normal", "function", "renal", "labs", "were", "unremarkable", "continue",
    "current", "regimen", "per", "team", "outpatient", "monitoring", "recommended", "mild", "edema",
];

/// Controls planting of denylist-worthy false positives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NoiseProfile {
    /// Noise lines inserted into each document's bodies.
    pub lines_per_doc: usize,
}

impl NoiseProfile {
    pub fn off() -> Self {
        Self { lines_per_doc: 0 }
    }

    pub fn on() -> Self {
        Self { lines_per_doc: 3 }
    }

    pub fn is_on(&self) -> bool {
        self.lines_per_doc > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub doc_count: usize,
    pub headings_per_doc: usize,
    pub noise: NoiseProfile,
    /// Body words following each heading.
    pub body_words: Range<usize>,
    /// Probability that a heading after the first is a subtitle.
    pub subtitle_ratio: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            doc_count: 10,
            headings_per_doc: 5,
            noise: NoiseProfile::off(),
            body_words: 8..40,
            subtitle_ratio: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    pub gold: AnnotationSet,
    /// Total noise lines planted across all documents.
    pub planted_noise: usize,
}

pub fn generate_synthetic(seed: u64, doc_count: usize, headings_per_doc: usize, noise: NoiseProfile) -> SyntheticCorpus {
    GeneratorConfig {
        seed,
        doc_count,
        headings_per_doc,
        noise,
        ..GeneratorConfig::default()
    }
    .generate()
}

impl GeneratorConfig {
    pub fn generate(&self) -> SyntheticCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut documents = Vec::with_capacity(self.doc_count);
        let mut gold = AnnotationSet::new();
        let mut planted_noise = 0;

        for i in 0..self.doc_count {
            let doc_id = format!("synth-{}-{i:05}", self.seed);
            let (text, spans, noise) = self.document(&mut rng);
            planted_noise += noise;
            gold.insert(doc_id.clone(), spans).expect("generated ids are unique");
            documents.push(Document { doc_id, text });
        }
        SyntheticCorpus {
            documents,
            gold,
            planted_noise,
        }
    }

    fn document(&self, rng: &mut ChaCha8Rng) -> (String, Vec<Span>, usize) {
        let mut text = String::new();
        let mut spans = Vec::with_capacity(self.headings_per_doc);

        if self.headings_per_doc == 0 || rng.gen_bool(0.5) {
            push_body_lines(&mut text, rng, self.body_range());
        }

        for h in 0..self.headings_per_doc {
            let subtitle = h > 0 && rng.gen_bool(self.subtitle_ratio);
            if subtitle {
                let name = *SUBTITLE_LEXICON.choose(rng).unwrap();
                let start = text.len();
                text.push_str(name);
                spans.push(Span::subtitle(start, start + name.len()));
                text.push_str(": ");
                let words = rng.gen_range(self.body_range()).max(1);
                push_words(&mut text, rng, words);
                text.push('\n');
                if rng.gen_bool(0.3) {
                    push_body_lines(&mut text, rng, self.body_range());
                }
            } else {
                if !text.is_empty() && rng.gen_bool(0.5) {
                    text.push('\n');
                }
                let name = *TITLE_LEXICON.choose(rng).unwrap();
                let name = if rng.gen_bool(0.2) {
                    name.to_uppercase()
                } else {
                    name.to_string()
                };
                let start = text.len();
                text.push_str(&name);
                spans.push(Span::title(start, start + name.len()));
                text.push_str(":\n");
                push_body_lines(&mut text, rng, self.body_range());
            }
        }

        let noise = self.noise.lines_per_doc;
        for _ in 0..noise {
            insert_noise_line(&mut text, &mut spans, rng);
        }
        (text, spans, noise)
    }

    fn body_range(&self) -> Range<usize> {
        if self.body_words.is_empty() {
            self.body_words.start..self.body_words.start + 1
        } else {
            self.body_words.clone()
        }
    }
}

fn push_words(text: &mut String, rng: &mut ChaCha8Rng, count: usize) {
    for i in 0..count {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(BODY_WORDS.choose(rng).unwrap());
        if i + 1 == count || rng.gen_bool(0.1) {
            text.push('.');
        }
    }
}

/// Wraps `range`-many words into lines of at most twelve words.
fn push_body_lines(text: &mut String, rng: &mut ChaCha8Rng, range: Range<usize>) {
    let mut remaining = rng.gen_range(range);
    while remaining > 0 {
        let n = remaining.min(rng.gen_range(6..=12));
        push_words(text, rng, n);
        text.push('\n');
        remaining -= n;
    }
}

/// Inserts a noise line at a random line start, shifting later gold spans.
fn insert_noise_line(text: &mut String, spans: &mut [Span], rng: &mut ChaCha8Rng) {
    let line = *NOISE_LINES.choose(rng).unwrap();
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    let line_starts: Vec<usize> = std::iter::once(0)
        .chain(text.match_indices('\n').map(|(i, _)| i + 1))
        .collect();
    let pos = *line_starts.choose(rng).unwrap();
    text.insert_str(pos, line);
    for span in spans.iter_mut().filter(|s| s.start >= pos) {
        span.start += line.len();
        span.end += line.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::validate_annotation;

    #[test]
    fn counts_follow_parameters() {
        let corpus = generate_synthetic(1, 10, 5, NoiseProfile::off());
        assert_eq!(corpus.documents.len(), 10);
        assert_eq!(corpus.gold.span_count(), 50);
        assert_eq!(corpus.planted_noise, 0);
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_synthetic(7, 5, 6, NoiseProfile::on());
        let b = generate_synthetic(7, 5, 6, NoiseProfile::on());
        assert_eq!(a, b);
        let c = generate_synthetic(8, 5, 6, NoiseProfile::on());
        assert_ne!(a.documents, c.documents);
    }

    #[test]
    fn gold_always_validates() {
        for seed in 0..20 {
            let corpus = generate_synthetic(seed, 5, 8, NoiseProfile::on());
            for doc in &corpus.documents {
                let spans = corpus.gold.get(&doc.doc_id).unwrap();
                assert!(validate_annotation(doc, spans).is_valid());
                assert!(spans.windows(2).all(|w| w[0].end <= w[1].start));
            }
        }
    }

    #[test]
    fn noise_present_but_not_gold() {
        let corpus = generate_synthetic(3, 4, 5, NoiseProfile::on());
        assert_eq!(corpus.planted_noise, 12);
        for doc in &corpus.documents {
            let hits = NOISE_LINES.iter().map(|l| doc.text.matches(l).count()).sum::<usize>();
            assert_eq!(hits, 3, "{}", doc.text);
            for span in corpus.gold.get(&doc.doc_id).unwrap() {
                let text = crate::normalize_title(&doc.text[span.start..span.end]);
                assert!(!NOISE_TITLES.contains(&text.as_str()));
            }
        }
    }

    #[test]
    fn zero_headings_and_zero_docs() {
        let corpus = generate_synthetic(1, 0, 5, NoiseProfile::off());
        assert!(corpus.documents.is_empty());
        let corpus = generate_synthetic(1, 3, 0, NoiseProfile::off());
        assert_eq!(corpus.gold.span_count(), 0);
        assert!(corpus.documents.iter().all(|d| !d.text.is_empty()));
    }
}
