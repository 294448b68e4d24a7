//! Generators and reference implementations shared by the integration
//! tests. Oracles here are written directly from the definitions and do not
//! call the library code they are compared against.

#![allow(dead_code)]

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use tocseg::{Level, Span, Token};

pub fn random_level<R: Rng>(rng: &mut R) -> Level {
    if rng.gen_bool(0.5) {
        Level::Title
    } else {
        Level::Subtitle
    }
}

/// Up to `max` disjoint spans inside `[0, limit)`, sorted by start.
pub fn disjoint_spans<R: Rng>(rng: &mut R, max: usize, limit: usize) -> Vec<Span> {
    let n = rng.gen_range(0..=max);
    let mut spans: Vec<Span> = Vec::with_capacity(n);
    for _ in 0..n * 4 {
        if spans.len() == n {
            break;
        }
        let start = rng.gen_range(0..limit - 1);
        let end = rng.gen_range(start + 1..=(start + 8).min(limit));
        let s = Span::new(start, end, random_level(rng));
        if spans.iter().all(|o| s.end <= o.start || o.end <= s.start) {
            spans.push(s);
        }
    }
    spans.sort_by_key(|s| s.start);
    spans
}

/// Gold and predicted span lists (each internally disjoint, at most `max`
/// spans) where predictions are frequently exact or level-flipped copies of
/// gold, so that every kind of match outcome occurs.
pub fn metric_instance<R: Rng>(rng: &mut R, max: usize) -> (Vec<Span>, Vec<Span>) {
    let gold = disjoint_spans(rng, max, 80);
    let mut pred: Vec<Span> = Vec::new();
    for g in &gold {
        match rng.gen_range(0..5) {
            0 | 1 => pred.push(*g),
            2 => pred.push(Span::new(g.start, g.end, flip(g.level))),
            3 => pred.push(Span::new(g.start, g.end + 1, g.level)),
            _ => {}
        }
    }
    for s in disjoint_spans(rng, 3, 80) {
        pred.push(s);
    }
    let mut kept: Vec<Span> = Vec::new();
    for s in pred {
        if kept.len() < max && kept.iter().all(|o| s.end <= o.start || o.end <= s.start) {
            kept.push(s);
        }
    }
    kept.shuffle(rng);
    (gold, kept)
}

pub fn flip(level: Level) -> Level {
    match level {
        Level::Title => Level::Subtitle,
        Level::Subtitle => Level::Title,
    }
}

/// All-pairs exact matcher: every (gold, pred) pair with identical
/// boundaries, and identical level unless `ignore_level`.
pub fn brute_force_pairs(gold: &[Span], pred: &[Span], ignore_level: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (gi, g) in gold.iter().enumerate() {
        for (pi, p) in pred.iter().enumerate() {
            if g.start == p.start && g.end == p.end && (ignore_level || g.level == p.level) {
                pairs.push((gi, pi));
            }
        }
    }
    pairs
}

/// `(tp, fp, fn)` per level from a pair list: true positives and misses
/// follow the gold level, false positives the predicted level.
pub fn tally(gold: &[Span], pred: &[Span], pairs: &[(usize, usize)], level: Level) -> (usize, usize, usize) {
    let gold_hit = |i: usize| pairs.iter().any(|&(g, _)| g == i);
    let pred_hit = |i: usize| pairs.iter().any(|&(_, p)| p == i);
    let tp = (0..gold.len()).filter(|&i| gold[i].level == level && gold_hit(i)).count();
    let missed = (0..gold.len()).filter(|&i| gold[i].level == level && !gold_hit(i)).count();
    let fp = (0..pred.len()).filter(|&i| pred[i].level == level && !pred_hit(i)).count();
    (tp, fp, missed)
}

const WORDS: &[&str] = &["exam", "HEENT", "neck", "a1c", "déjà", "x", "BP", "120", "naïve", "Ωmega"];
const PUNCT: &[&str] = &[":", ",", ".", "(", ")", "/", "*", "-"];
const SPACES: &[&str] = &[" ", " ", "  ", "\n", "\t", " \n "];

/// A text assembled from known tokens, with the token list recorded during
/// assembly rather than recovered by a tokenizer.
pub struct TokenFixture {
    pub text: String,
    pub tokens: Vec<Token>,
}

pub fn token_fixture<R: Rng>(rng: &mut R, max_tokens: usize) -> TokenFixture {
    let mut text = String::new();
    let mut tokens = Vec::new();
    if rng.gen_bool(0.3) {
        text.push_str(SPACES.choose(rng).unwrap());
    }
    let n = rng.gen_range(0..=max_tokens);
    let mut prev_word = false;
    for _ in 0..n {
        let word = rng.gen_bool(0.7);
        // Two word runs must be separated, or they would form a single token.
        if word && prev_word || rng.gen_bool(0.5) {
            text.push_str(SPACES.choose(rng).unwrap());
        }
        let piece = if word { WORDS.choose(rng) } else { PUNCT.choose(rng) }.unwrap();
        let start = text.len();
        text.push_str(piece);
        tokens.push(Token {
            text: piece.to_string(),
            start,
            end: text.len(),
        });
        prev_word = word;
    }
    if rng.gen_bool(0.3) {
        text.push_str(SPACES.choose(rng).unwrap());
    }
    TokenFixture { text, tokens }
}

/// Spans over whole token runs such that no two same-level spans are
/// adjacent (separated by whitespace only).
pub fn token_aligned_spans<R: Rng>(rng: &mut R, tokens: &[Token]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    let mut last: Option<(usize, Level)> = None;
    while i < tokens.len() {
        if rng.gen_bool(0.4) {
            let len = rng.gen_range(1..=4).min(tokens.len() - i);
            let mut level = random_level(rng);
            if let Some((end_idx, prev)) = last {
                if end_idx + 1 == i && prev == level {
                    level = flip(level);
                }
            }
            spans.push(Span::new(tokens[i].start, tokens[i + len - 1].end, level));
            last = Some((i + len - 1, level));
            i += len;
        } else {
            i += 1;
        }
    }
    spans
}

/// A heading-bearing document built line by line, with its gold spans.
pub struct TreeFixture {
    pub text: String,
    pub spans: Vec<Span>,
}

const TITLES: &[&str] = &["Allergies", "Physical Exam", "Plan", "Discharge Medications"];
const SUBTITLES: &[&str] = &["Neck", "Lungs", "HEENT", "Skin"];

pub fn tree_fixture<R: Rng>(rng: &mut R, max_headings: usize) -> TreeFixture {
    let mut text = String::new();
    let mut spans = Vec::new();
    let body = |rng: &mut R, text: &mut String| {
        for _ in 0..rng.gen_range(0..3) {
            text.push_str(["fever", "no distress", "stable.", "déjà vu"].choose(rng).unwrap());
            text.push('\n');
        }
    };
    body(rng, &mut text);
    for _ in 0..rng.gen_range(0..=max_headings) {
        let subtitle = rng.gen_bool(0.5);
        let name = if subtitle { SUBTITLES } else { TITLES }.choose(rng).unwrap();
        let start = text.len();
        text.push_str(name);
        if subtitle {
            spans.push(Span::subtitle(start, text.len()));
            text.push_str(": ok\n");
        } else {
            spans.push(Span::title(start, text.len()));
            text.push_str(":\n");
        }
        body(rng, &mut text);
    }
    TreeFixture { text, spans }
}

/// Section extent of each span, from the definition: a title runs to the
/// next title or the end; a subtitle runs to the next heading of any level,
/// but never past the end of its enclosing title section (or the preamble).
pub fn expected_sections(spans: &[Span], len: usize) -> Vec<Range<usize>> {
    let next_title = |i: usize| {
        spans[i + 1..]
            .iter()
            .find(|s| s.level == Level::Title)
            .map_or(len, |s| s.start)
    };
    (0..spans.len())
        .map(|i| {
            let end = match spans[i].level {
                Level::Title => next_title(i),
                Level::Subtitle => {
                    let next = spans.get(i + 1).map_or(len, |s| s.start);
                    next.min(next_title(i))
                }
            };
            spans[i].end..end
        })
        .collect()
}

/// Length of the union of `ranges`.
pub fn union_len(ranges: &[Range<usize>]) -> usize {
    let mut sorted = ranges.to_vec();
    sorted.sort_by_key(|r| r.start);
    let mut total = 0;
    let mut reach = 0;
    for r in sorted {
        let start = r.start.max(reach);
        if r.end > start {
            total += r.end - start;
            reach = r.end;
        }
    }
    total
}

/// `text` with every byte covered by `ranges` removed.
pub fn without(text: &str, ranges: &[Range<usize>]) -> String {
    text.char_indices()
        .filter(|(i, _)| !ranges.iter().any(|r| r.contains(i)))
        .map(|(_, c)| c)
        .collect()
}

/// Whether `needle` can be obtained from `hay` by deleting characters.
pub fn is_subsequence(needle: &str, hay: &str) -> bool {
    let mut it = hay.chars();
    needle.chars().all(|c| it.any(|h| h == c))
}
