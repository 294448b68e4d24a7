use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::info;

use tocseg::corpus::{corpus_stats, title_frequencies, AnnotationSet, CorpusFormat, GeneratorConfig, NoiseProfile, NOISE_TITLES};
use tocseg::evalmetrics::{evaluate_corpus_with_slack, Aggregation, Mode};
use tocseg::labeling::{label_document, make_windows, read_windows, windows_to_spans, Window, WindowWriter};
use tocseg::tocbuild::{build_toc, clean_document, render_toc, TocRecord};
use tocseg::tocregex::merge_denylist;
use tocseg::{normalize_title, validate_annotation, Denylist, Document, PatternSet, Span};

use crate::output::{load_annotations, load_denylist, load_documents, load_engine, open_corpus, require, write_corpus, write_output};
use crate::{CliError, EngineArgs};

fn json_line(out: &mut dyn Write, value: &TocRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Pairs each document with its annotation record. Documents without a
/// record get no spans; records naming no document are a data error.
fn align<'a>(docs: &'a [Document], annotations: &'a AnnotationSet, what: &str) -> Result<Vec<(&'a Document, &'a [Span])>, CliError> {
    let ids: HashSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
    if let Some(unknown) = annotations.doc_ids().find(|id| !ids.contains(id)) {
        return Err(CliError::Data(format!("{what} names unknown document `{unknown}`")));
    }
    docs.iter()
        .map(|doc| {
            let spans = annotations.get(&doc.doc_id).unwrap_or(&[]);
            let report = validate_annotation(doc, spans);
            match report.violations.first() {
                Some(v) => Err(CliError::Data(format!("{what}, document `{}`: {v}", doc.doc_id))),
                None => Ok((doc, spans)),
            }
        })
        .collect()
}

pub fn detect(input: &Path, format: CorpusFormat, engine: &EngineArgs, out: Option<&Path>) -> Result<(), CliError> {
    let engine = load_engine(engine.patterns.as_deref(), engine.denylist.as_deref())?;
    let mut predictions = AnnotationSet::new();
    for doc in open_corpus(input, format)? {
        let doc = doc?;
        let spans = engine.segment(&doc);
        predictions.insert(doc.doc_id, spans)?;
    }
    info!("detected {} headings in {} documents", predictions.span_count(), predictions.len());
    write_output(out, |w| predictions.write(w))
}

pub fn label(input: &Path, format: CorpusFormat, gold: &Path, window_size: usize, out: Option<&Path>) -> Result<(), CliError> {
    if window_size == 0 {
        return Err(CliError::Usage("--window-size must be at least 1".into()));
    }
    let gold = load_annotations(gold, "gold file")?;
    let docs = load_documents(input, format)?;
    let mut windows = Vec::new();
    for (doc, spans) in align(&docs, &gold, "gold")? {
        let tokens = label_document(doc, spans).map_err(|e| CliError::Data(format!("document `{}`: {e}", doc.doc_id)))?;
        windows.extend(make_windows(&doc.doc_id, tokens, window_size)?);
    }
    info!("wrote {} windows", windows.len());
    write_output(out, |w| {
        let mut writer = WindowWriter::new(w);
        windows.iter().try_for_each(|win| writer.write(win))
    })
}

pub fn decode(input: &Path, format: CorpusFormat, windows: &Path, out: Option<&Path>) -> Result<(), CliError> {
    require(windows, "window file")?;
    let file = fs::File::open(windows).map_err(|e| CliError::Data(format!("{}: {e}", windows.display())))?;
    let windows = read_windows(BufReader::new(file)).map_err(|e| CliError::Data(e.to_string()))?;
    let docs = load_documents(input, format)?;

    let mut by_doc: HashMap<&str, Vec<&Window>> = HashMap::new();
    for w in &windows {
        by_doc.entry(w.doc_id.as_str()).or_default().push(w);
    }
    let ids: HashSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
    if let Some(unknown) = by_doc.keys().find(|id| !ids.contains(*id)) {
        return Err(CliError::Data(format!("window file names unknown document `{unknown}`")));
    }
    let mut predictions = AnnotationSet::new();
    for doc in &docs {
        let spans = match by_doc.get(doc.doc_id.as_str()) {
            Some(ws) => windows_to_spans(doc, ws)?,
            None => Vec::new(),
        };
        predictions.insert(doc.doc_id.clone(), spans)?;
    }
    write_output(out, |w| predictions.write(w))
}

pub fn eval(gold: &Path, pred: &Path, mode: Mode, agg: Aggregation, slack: usize, out: Option<&Path>) -> Result<(), CliError> {
    let gold = load_annotations(gold, "gold file")?;
    let pred = load_annotations(pred, "prediction file")?;
    let pred_ids: HashSet<&str> = pred.doc_ids().collect();
    if let Some(missing) = gold.doc_ids().find(|id| !pred_ids.contains(id)) {
        return Err(CliError::Data(format!("no prediction record for gold document `{missing}`")));
    }
    let report = evaluate_corpus_with_slack(&gold, &pred, mode, agg, slack)?;
    write_output(None, |w| writeln!(w, "{report}"))?;
    if let Some(path) = out {
        write_output(Some(path), |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            w.write_all(b"\n")
        })?;
    }
    Ok(())
}

pub fn toc(input: &Path, format: CorpusFormat, annotations: &Path, json: bool, out: Option<&Path>) -> Result<(), CliError> {
    let annotations = load_annotations(annotations, "annotation file")?;
    let docs = load_documents(input, format)?;
    let mut trees = Vec::with_capacity(docs.len());
    for (doc, spans) in align(&docs, &annotations, "annotations")? {
        trees.push(build_toc(doc, spans)?);
    }
    write_output(out, |w| {
        for tree in &trees {
            if json {
                json_line(w, &TocRecord::from(tree))?;
            } else {
                w.write_all(render_toc(tree).as_bytes())?;
            }
        }
        Ok(())
    })
}

pub fn clean(
    input: &Path,
    format: CorpusFormat,
    annotations: &Path,
    remove: Option<&Path>,
    remove_titles: &[String],
    out: &Path,
) -> Result<(), CliError> {
    let annotations = load_annotations(annotations, "annotation file")?;
    let mut removal: HashSet<String> = remove_titles.iter().map(|t| normalize_title(t)).collect();
    if let Some(path) = remove {
        require(path, "removal list")?;
        let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let title = normalize_title(&line);
            if !title.is_empty() && !line.trim_start().starts_with('#') {
                removal.insert(title);
            }
        }
    }
    let docs = load_documents(input, format)?;
    let mut cleaned = Vec::with_capacity(docs.len());
    for (doc, spans) in align(&docs, &annotations, "annotations")? {
        let tree = build_toc(doc, spans)?;
        cleaned.push(clean_document(doc, &tree, &removal));
    }
    write_corpus(out, format, &cleaned)
}

pub fn stats(input: &Path, format: CorpusFormat, engine: &EngineArgs, out: Option<&Path>) -> Result<(), CliError> {
    let engine = load_engine(engine.patterns.as_deref(), engine.denylist.as_deref())?;
    let docs = load_documents(input, format)?;
    let stats = corpus_stats(&docs, &engine);
    write_output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, &stats)?;
        w.write_all(b"\n")
    })
}

pub fn freq(input: &Path, format: CorpusFormat, patterns: Option<&Path>, top: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    let engine = load_engine(patterns, None)?;
    let docs = load_documents(input, format)?;
    let mut table = title_frequencies(&docs, &engine);
    if let Some(n) = top {
        table.rows.truncate(n);
    }
    write_output(out, |w| w.write_all(table.to_tsv().as_bytes()))
}

#[allow(clippy::too_many_arguments)]
pub fn generate(
    seed: u64,
    docs: usize,
    headings: usize,
    noise: usize,
    format: CorpusFormat,
    out: &Path,
    gold: &Path,
    denylist_out: Option<&Path>,
) -> Result<(), CliError> {
    let corpus = GeneratorConfig {
        seed,
        doc_count: docs,
        headings_per_doc: headings,
        noise: NoiseProfile { lines_per_doc: noise },
        ..GeneratorConfig::default()
    }
    .generate();
    write_corpus(out, format, &corpus.documents)?;
    write_output(Some(gold), |w| corpus.gold.write(w))?;
    if let Some(path) = denylist_out {
        let denylist: Denylist = NOISE_TITLES.iter().collect();
        write_output(Some(path), |w| denylist.write(w))?;
    }
    Ok(())
}

pub fn merge(existing: &Path, additions: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let existing = load_denylist(existing)?;
    require(additions, "denylist")?;
    let file = fs::File::open(additions).map_err(|e| CliError::Data(format!("{}: {e}", additions.display())))?;
    let merged = merge_denylist(&existing, BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", additions.display())))?;
    write_output(out, |w| merged.write(w))
}

pub fn explain(input: &Path, format: CorpusFormat, engine: &EngineArgs, doc_id: &str, offset: usize) -> Result<(), CliError> {
    let engine = load_engine(engine.patterns.as_deref(), engine.denylist.as_deref())?;
    let doc = load_documents(input, format)?
        .into_iter()
        .find(|d| d.doc_id == doc_id)
        .ok_or_else(|| CliError::Data(format!("no document `{doc_id}` in corpus")))?;
    match engine.explain(&doc, offset).map_err(|e| CliError::Data(e.to_string()))? {
        None => println!("no pattern matches at offset {offset}"),
        Some(t) => {
            println!("pattern\t{}", t.pattern_id);
            println!("prefix\t{}\t{}", t.prefix.start, t.prefix.end);
            println!("content\t{}\t{}\t{}", t.content.start, t.content.end, t.content_text);
            println!("terminator\t{}\t{}", t.terminator.start, t.terminator.end);
        }
    }
    Ok(())
}

pub fn patterns(out: Option<&Path>) -> Result<(), CliError> {
    let toml = PatternSet::builtin().to_toml();
    write_output(out, |w| w.write_all(toml.as_bytes()))
}
