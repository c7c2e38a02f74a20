#![allow(dead_code)]

use std::path::PathBuf;

use folkmotif::config::Source;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/kern")
}

pub fn fixture_sources() -> Vec<Source> {
    vec![
        Source { path: fixtures().join("german"), label: "german".into() },
        Source { path: fixtures().join("chinese"), label: "chinese".into() },
    ]
}
