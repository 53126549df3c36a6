//! Reading corpora and writing artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ucca_convert::conllulex::{parse_str, Sentence};
use ucca_convert::ucca::{parse_json, parse_xml_all, UccaPassage};

/// Parses one CoNLL-U-Lex file. Sentences without a `sent_id` line get
/// `<doc_id>-<index>`, with the file stem standing in for a missing doc id.
pub fn read_conllulex(path: &Path, strict: bool) -> Result<Vec<Sentence>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc = parse_str(&text, strict).with_context(|| format!("cannot parse {}", path.display()))?;
    for w in &doc.warnings {
        log::warn!("{}: {w}", path.display());
    }
    let doc_id = if doc.doc_id.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    } else {
        doc.doc_id.clone()
    };
    let mut sentences = doc.sentences;
    for (i, s) in sentences.iter_mut().enumerate() {
        if !s.comments.iter().any(|c| c.trim_start().starts_with("sent_id")) {
            s.sent_id = format!("{doc_id}-{}", i + 1);
        }
    }
    Ok(sentences)
}

fn passage_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.exists() {
        bail!("{} does not exist", path.display());
    }
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("cannot list {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "xml" || x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads passages from an XML or JSON file, or from every such file in a directory.
pub fn read_passages(path: &Path) -> Result<Vec<UccaPassage>> {
    let mut out = Vec::new();
    for f in passage_files(path)? {
        let text = fs::read_to_string(&f).with_context(|| format!("cannot read {}", f.display()))?;
        if f.extension().is_some_and(|x| x == "json") {
            if text.trim_start().starts_with('[') {
                let many: Vec<UccaPassage> =
                    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", f.display()))?;
                out.extend(many);
            } else {
                out.push(parse_json(&text).with_context(|| format!("cannot parse {}", f.display()))?);
            }
        } else {
            for parsed in parse_xml_all(&text).with_context(|| format!("cannot parse {}", f.display()))? {
                for w in &parsed.warnings {
                    log::warn!("{}: {w}", f.display());
                }
                out.push(parsed.passage);
            }
        }
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Writes to `out` when given, else to stdout.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}
