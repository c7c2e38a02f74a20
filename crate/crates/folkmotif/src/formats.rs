//! Plain-text artifact formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! file here reads back bit-exactly.

use std::fmt::Write as _;

use folkmotif_core::linalg::Matrix;
use folkmotif_core::network::{ModelParams, NetConfig};
use folkmotif_core::Vocabulary;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, message: message.into() })
}

fn parse_floats(fields: &[&str], line: usize) -> Result<Vec<f64>, FormatError> {
    fields
        .iter()
        .map(|f| f.parse::<f64>().map_err(|_| FormatError { line, message: format!("bad number {f:?}") }))
        .collect()
}

fn push_row(out: &mut String, row: &[f64]) {
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{x}").unwrap();
    }
}

/// One song of a tokenized corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSong {
    pub id: String,
    pub label: String,
    pub tokens: Vec<String>,
}

/// `id<TAB>label<TAB>token token ...`, one song per line.
pub fn write_tokens(songs: &[TokenizedSong]) -> String {
    let mut out = String::new();
    for s in songs {
        writeln!(out, "{}\t{}\t{}", s.id, s.label, s.tokens.join(" ")).unwrap();
    }
    out
}

pub fn read_tokens(text: &str) -> Result<Vec<TokenizedSong>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let (Some(id), Some(label), Some(tokens)) = (parts.next(), parts.next(), parts.next()) else {
            return err(i + 1, "expected id, label and tokens separated by tabs");
        };
        out.push(TokenizedSong {
            id: id.to_string(),
            label: label.to_string(),
            tokens: tokens.split_whitespace().map(str::to_string).collect(),
        });
    }
    Ok(out)
}

/// Keyed vectors: a `rows dim` header, then `key v1 v2 ...` per row. Used
/// for token embeddings and for song vectors.
pub fn write_vectors<S: AsRef<str>>(keys: &[S], m: &Matrix) -> String {
    assert_eq!(keys.len(), m.rows(), "one key per row");
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for (r, k) in keys.iter().enumerate() {
        out.push_str(k.as_ref());
        out.push(' ');
        push_row(&mut out, m.row(r));
        out.push('\n');
    }
    out
}

pub fn read_vectors(text: &str) -> Result<(Vec<String>, Matrix), FormatError> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    let (rows, dim) = match header.as_slice() {
        [r, d] => match (r.parse::<usize>(), d.parse::<usize>()) {
            (Ok(r), Ok(d)) => (r, d),
            _ => return err(1, "header must be \"rows dim\""),
        },
        _ => return err(1, "header must be \"rows dim\""),
    };
    let mut keys = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows * dim);
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != dim + 1 {
            return err(n, format!("expected a key and {dim} values"));
        }
        keys.push(fields[0].to_string());
        data.extend(parse_floats(&fields[1..], n)?);
    }
    if keys.len() != rows {
        return err(text.lines().count(), format!("header promises {rows} rows, found {}", keys.len()));
    }
    Ok((keys, Matrix::from_vec(rows, dim, data)))
}

/// `token<TAB>count<TAB>index`, in index order.
pub fn write_vocab(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    for (i, (t, c)) in vocab.tokens().iter().zip(vocab.counts()).enumerate() {
        writeln!(out, "{t}\t{c}\t{i}").unwrap();
    }
    out
}

pub fn read_vocab(text: &str) -> Result<Vocabulary, FormatError> {
    let mut tokens = Vec::new();
    let mut counts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [t, c, idx] = fields.as_slice() else {
            return err(i + 1, "expected token, count and index");
        };
        let (Ok(c), Ok(idx)) = (c.parse::<u64>(), idx.parse::<usize>()) else {
            return err(i + 1, "count and index must be integers");
        };
        if idx != tokens.len() {
            return err(i + 1, "indices must be consecutive from 0");
        }
        tokens.push(t.to_string());
        counts.push(c);
    }
    let min = counts.iter().copied().min().unwrap_or(1);
    Vocabulary::from_parts(tokens, counts, min).map_err(|e| FormatError { line: 0, message: e.to_string() })
}

/// SHA-256 of the vocabulary's TSV rendering, hex encoded.
pub fn vocab_hash(vocab: &Vocabulary) -> String {
    let digest = Sha256::digest(write_vocab(vocab).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

const CHECKPOINT_MAGIC: &str = "folkmotif-checkpoint 1";

/// A trained classifier together with what is needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub labels: Vec<String>,
    pub vocab_hash: String,
}

pub fn write_checkpoint(c: &Checkpoint) -> String {
    let cfg = c.params.config();
    let mut out = String::new();
    writeln!(out, "{CHECKPOINT_MAGIC}").unwrap();
    writeln!(
        out,
        "config input_dim={} hidden={} attention_dim={} classes={}",
        cfg.input_dim, cfg.hidden, cfg.attention_dim, cfg.classes
    )
    .unwrap();
    writeln!(out, "vocab_sha256 {}", c.vocab_hash).unwrap();
    writeln!(out, "labels {}", c.labels.join(" ")).unwrap();
    for (name, m) in c.params.tensors() {
        writeln!(out, "tensor {name} {} {}", m.rows(), m.cols()).unwrap();
        for r in 0..m.rows() {
            push_row(&mut out, m.row(r));
            out.push('\n');
        }
    }
    out
}

pub fn read_checkpoint(text: &str) -> Result<Checkpoint, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| lines.next().ok_or_else(|| FormatError { line: 0, message: format!("missing {what}") });

    let (n, magic) = next("header")?;
    if magic != CHECKPOINT_MAGIC {
        return err(n, "not a folkmotif checkpoint");
    }
    let (n, config) = next("config")?;
    let mut dims = [0usize; 4];
    let keys = ["input_dim", "hidden", "attention_dim", "classes"];
    let fields: Vec<&str> = config.split(' ').collect();
    if fields.len() != 5 || fields[0] != "config" {
        return err(n, "malformed config line");
    }
    for ((slot, key), field) in dims.iter_mut().zip(keys).zip(&fields[1..]) {
        match field.split_once('=') {
            Some((k, v)) if k == key => *slot = v.parse().map_err(|_| FormatError { line: n, message: format!("bad {key}") })?,
            _ => return err(n, format!("expected {key}")),
        }
    }
    let cfg = NetConfig { input_dim: dims[0], hidden: dims[1], attention_dim: dims[2], classes: dims[3] };
    cfg.validate().map_err(|e| FormatError { line: n, message: e.to_string() })?;

    let (n, hash) = next("vocabulary hash")?;
    let Some(vocab_hash) = hash.strip_prefix("vocab_sha256 ") else {
        return err(n, "expected vocab_sha256");
    };
    let (n, labels) = next("labels")?;
    let Some(labels) = labels.strip_prefix("labels ") else {
        return err(n, "expected labels");
    };
    let labels: Vec<String> = labels.split(' ').map(str::to_string).collect();
    if labels.len() != cfg.classes {
        return err(n, "label count does not match classes");
    }

    let mut params = ModelParams::zeros(&cfg);
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    for (name, m) in names.iter().zip(params.tensors_mut()) {
        let (n, head) = next("tensor")?;
        let expect = format!("tensor {name} {} {}", m.rows(), m.cols());
        if head != expect {
            return err(n, format!("expected {expect:?}"));
        }
        for r in 0..m.rows() {
            let (n, line) = next("tensor row")?;
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() != m.cols() {
                return err(n, format!("expected {} values", m.cols()));
            }
            m.row_mut(r).copy_from_slice(&parse_floats(&fields, n)?);
        }
    }
    if !params.is_finite() {
        return err(0, "non-finite parameter");
    }
    Ok(Checkpoint { params, labels, vocab_hash: vocab_hash.to_string() })
}

/// One attention weight of one song.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub song: String,
    pub position: usize,
    pub motif: String,
    pub weight: f64,
}

pub fn write_alpha_csv(rows: &[AlphaRow]) -> String {
    let mut out = String::from("song,position,motif,weight\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.song, r.position, r.motif, r.weight).unwrap();
    }
    out
}
