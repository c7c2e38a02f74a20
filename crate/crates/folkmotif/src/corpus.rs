//! Corpus loading from kern files, directories of kern files and JSONL.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use folkmotif_core::kern::parse_kern;
use folkmotif_core::Melody;

use crate::config::Source;
use crate::error::{Error, Result, Stage};
use crate::jsonl::read_jsonl;

/// A file that was passed over, and why.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub melodies: Vec<Melody>,
    pub diagnostics: Diagnostics,
}

fn is_jsonl(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

fn is_corpus_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "krn" || e == "kern" || e == "jsonl")
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            walk(&path, out)?;
        } else if is_corpus_file(&path) {
            out.push(path);
        }
    }
    Ok(())
}

/// Expands directories (recursively) into their `.krn`, `.kern` and `.jsonl`
/// files, each paired with its source's label.
pub fn expand_sources(sources: &[Source]) -> Result<Vec<(PathBuf, String)>> {
    let mut out = Vec::new();
    for s in sources {
        if s.path.is_dir() {
            let mut files = Vec::new();
            walk(&s.path, &mut files)?;
            out.extend(files.into_iter().map(|p| (p, s.label.clone())));
        } else if s.path.exists() {
            out.push((s.path.clone(), s.label.clone()));
        } else {
            return Err(Error::data(Stage::Ingest, format!("{} does not exist", s.path.display())));
        }
    }
    Ok(out)
}

fn load_file(path: &Path, label: &str) -> std::result::Result<Vec<Melody>, String> {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    if is_jsonl(path) {
        let mut songs = read_jsonl(&bytes).map_err(|e| e.to_string())?;
        if !label.is_empty() {
            songs.iter_mut().for_each(|m| m.label = label.to_string());
        }
        return Ok(songs);
    }
    // Essen-derived files sometimes carry Latin-1 comments; only comment
    // lines can contain non-ASCII, so a lossy decode is safe.
    let text = String::from_utf8_lossy(&bytes);
    let mut m = parse_kern(&text).map_err(|e| e.to_string())?;
    m.validate().map_err(|e| e.to_string())?;
    m.id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    m.label = label.to_string();
    Ok(vec![m])
}

/// Loads every file in sorted path order. Unreadable or invalid files are
/// skipped and listed in the diagnostics. Kern melodies take their id from
/// the file stem.
pub fn load_corpus(files: &[(PathBuf, String)]) -> Result<LabeledCorpus> {
    let mut files = files.to_vec();
    files.sort();
    let mut melodies = Vec::new();
    let mut diagnostics = Diagnostics::default();
    for (path, label) in &files {
        match load_file(path, label) {
            Ok(songs) => melodies.extend(songs),
            Err(reason) => diagnostics.skipped.push(Skipped { path: path.clone(), reason }),
        }
    }
    if melodies.is_empty() {
        return Err(Error::data(Stage::Ingest, "empty corpus"));
    }
    let mut seen = HashSet::new();
    for m in &melodies {
        if !seen.insert(m.id.as_str()) {
            return Err(Error::data(Stage::Ingest, format!("duplicate melody id {:?}", m.id)));
        }
    }
    Ok(LabeledCorpus { melodies, diagnostics })
}

/// Convenience wrapper: expand and load in one step.
pub fn load_sources(sources: &[Source]) -> Result<LabeledCorpus> {
    load_corpus(&expand_sources(sources)?)
}
