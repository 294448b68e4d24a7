//! Input loading and atomic output helpers shared by the subcommands.

use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use tocseg::corpus::{self, AnnotationSet, CorpusFormat, CorpusReader};
use tocseg::tocregex::{Denylist, Engine, PatternSet};
use tocseg::Document;

use crate::CliError;

/// Fails with a usage error when a path named on the command line is absent.
pub fn require(path: &Path, what: &str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} `{}` does not exist", path.display())))
    }
}

pub fn open_corpus(path: &Path, format: CorpusFormat) -> Result<CorpusReader, CliError> {
    require(path, "input")?;
    Ok(corpus::ingest(path, format)?)
}

pub fn load_documents(path: &Path, format: CorpusFormat) -> Result<Vec<Document>, CliError> {
    Ok(open_corpus(path, format)?.collect::<Result<_, _>>()?)
}

pub fn load_annotations(path: &Path, what: &str) -> Result<AnnotationSet, CliError> {
    require(path, what)?;
    let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(AnnotationSet::read(BufReader::new(file), &path.display().to_string())?)
}

pub fn load_denylist(path: &Path) -> Result<Denylist, CliError> {
    require(path, "denylist")?;
    let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Denylist::read(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Built-in patterns unless a config is given; a denylist file is merged
/// into whatever the config already lists.
pub fn load_engine(patterns: Option<&Path>, denylist: Option<&Path>) -> Result<Engine, CliError> {
    let mut set = match patterns {
        Some(path) => {
            require(path, "pattern file")?;
            let source = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            PatternSet::from_toml(&source).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        }
        None => PatternSet::builtin(),
    };
    if let Some(path) = denylist {
        set.denylist.merge(&load_denylist(path)?);
    }
    tocseg::compile(&set).map_err(|e| CliError::Data(e.to_string()))
}

/// Writes to `path` through a temporary file in the same directory that is
/// renamed into place on success, or to stdout when no path is given.
pub fn write_output<F>(path: Option<&Path>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match body(&mut lock).and_then(|_| lock.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(internal),
            }
        }
        Some(path) => {
            let dir = parent_dir(path);
            let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(internal)?;
            {
                let mut writer = BufWriter::new(tmp.as_file_mut());
                body(&mut writer).and_then(|_| writer.flush()).map_err(internal)?;
            }
            tmp.persist(path).map_err(|e| internal(e.error))?;
            Ok(())
        }
    }
}

/// Writes a corpus in `format`. Text directories are assembled in a sibling
/// temporary directory and renamed into place; an existing target must be
/// an empty directory.
pub fn write_corpus(path: &Path, format: CorpusFormat, docs: &[Document]) -> Result<(), CliError> {
    match format {
        CorpusFormat::JsonLines => write_output(Some(path), |out| corpus::write_jsonl(out, docs)),
        CorpusFormat::TextDir => {
            if path.exists() {
                let empty = fs::read_dir(path).map_err(internal)?.next().is_none();
                if !path.is_dir() || !empty {
                    return Err(CliError::Usage(format!(
                        "output `{}` exists and is not an empty directory",
                        path.display()
                    )));
                }
            }
            let tmp = tempfile::Builder::new()
                .prefix(".tocseg-out")
                .tempdir_in(parent_dir(path))
                .map_err(internal)?;
            corpus::write_text_dir(tmp.path(), docs)?;
            if path.exists() {
                fs::remove_dir(path).map_err(internal)?;
            }
            fs::rename(tmp.keep(), path).map_err(internal)?;
            Ok(())
        }
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn internal(e: io::Error) -> CliError {
    CliError::Internal(e.to_string())
}
