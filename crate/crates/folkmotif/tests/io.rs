mod common;

use std::fs;

use folkmotif::corpus::{expand_sources, load_corpus, load_sources};
use folkmotif::error::Error;
use folkmotif::jsonl::{read_jsonl, write_jsonl};
use folkmotif_core::melody::{Melody, Meter, MeterChange, NoteEvent, Rational};
use proptest::prelude::*;

#[test]
fn two_valid_files() {
    let g = common::fixtures().join("german");
    let files = vec![(g.join("g02.krn"), "german".to_string()), (g.join("g01.krn"), "german".to_string())];
    let c = load_corpus(&files).unwrap();
    assert_eq!(c.melodies.len(), 2);
    assert!(c.diagnostics.skipped.is_empty());
    assert_eq!(c.melodies[0].id, "g01");
    assert!(c.melodies.iter().all(|m| m.label == "german"));
}

#[test]
fn corrupt_file_is_skipped_and_reported() {
    let f = common::fixtures();
    let files = vec![(f.join("bad/tie.krn"), "x".to_string()), (f.join("chinese/c01.krn"), "chinese".to_string())];
    let c = load_corpus(&files).unwrap();
    assert_eq!(c.melodies.len(), 1);
    assert_eq!(c.diagnostics.skipped.len(), 1);
    assert!(c.diagnostics.skipped[0].reason.contains("line 3"));
}

#[test]
fn empty_and_duplicate_corpora_fail() {
    assert!(matches!(load_corpus(&[]), Err(Error::Data { message, .. }) if message == "empty corpus"));
    let dir = tempfile::tempdir().unwrap();
    fs::copy(common::fixtures().join("german/g01.krn"), dir.path().join("g01.krn")).unwrap();
    let files = vec![
        (dir.path().join("g01.krn"), "a".to_string()),
        (common::fixtures().join("german/g01.krn"), "b".to_string()),
    ];
    let e = load_corpus(&files).unwrap_err();
    assert!(e.to_string().contains("duplicate melody id"), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn directories_expand_in_sorted_order() {
    let c = load_sources(&common::fixture_sources()).unwrap();
    let ids: Vec<&str> = c.melodies.iter().map(|m| m.id.as_str()).collect();
    assert_eq!(ids[..4], ["c01", "c02", "c03", "c04"]);
    assert_eq!(ids.len(), 26);
    let files = expand_sources(&common::fixture_sources()).unwrap();
    assert_eq!(files.len(), 26);
}

#[test]
fn fixture_corpus_survives_a_jsonl_file() {
    let c = load_sources(&common::fixture_sources()).unwrap();
    let bytes = write_jsonl(&c.melodies);
    assert_eq!(bytes.iter().filter(|&&b| b == b'\n').count(), 26);
    assert_eq!(read_jsonl(&bytes).unwrap(), c.melodies);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    fs::write(&path, &bytes).unwrap();
    let again = load_corpus(&[(path, String::new())]).unwrap();
    assert_eq!(again.melodies, c.melodies);
}

const METERS: [(u32, u32); 5] = [(2, 4), (3, 4), (4, 4), (6, 8), (5, 8)];
const DURATIONS: [(i64, i64); 7] = [(1, 4), (1, 3), (1, 2), (1, 1), (3, 2), (2, 1), (1, 6)];

fn melody_strategy() -> impl Strategy<Value = Melody> {
    (
        "[a-z0-9]{1,8}",
        "[a-z]{3,8}",
        proptest::collection::vec((0usize..METERS.len(), proptest::collection::vec((0usize..DURATIONS.len(), proptest::option::weighted(0.8, 0u8..=127)), 1..8)), 1..6),
    )
        .prop_map(|(id, label, measures)| {
            let mut meters = Vec::new();
            let mut events = Vec::new();
            for (i, (mi, notes)) in measures.into_iter().enumerate() {
                let (n, d) = METERS[mi];
                let meter = Meter::new(n, d).unwrap();
                if meters.last().map_or(true, |m: &MeterChange| m.meter != meter) {
                    meters.push(MeterChange { measure: i as u32, meter });
                }
                let mut filled = Rational::from_integer(0);
                for (di, pitch) in notes {
                    let dur = Rational::new(DURATIONS[di].0, DURATIONS[di].1);
                    if filled + dur > meter.capacity() {
                        break;
                    }
                    events.push(NoteEvent { pitch, duration: dur, onset_in_measure: filled, measure_index: i as u32 });
                    filled += dur;
                }
            }
            let mut pitched = 0;
            for e in events.iter_mut() {
                if pitched < 2 {
                    e.pitch.get_or_insert(60);
                }
                pitched += e.pitch.is_some() as usize;
            }
            if pitched < 2 {
                let m = events.last().map_or(0, |e| e.measure_index + 1);
                for k in 0..2 {
                    events.push(NoteEvent {
                        pitch: Some(64),
                        duration: Rational::new(1, 4),
                        onset_in_measure: Rational::new(k, 4),
                        measure_index: m,
                    });
                }
            }
            Melody { id, label, meters, events }
        })
}

proptest! {
    #[test]
    fn jsonl_round_trip(corpus in proptest::collection::vec(melody_strategy(), 0..6)) {
        for m in &corpus {
            prop_assert!(m.validate().is_ok(), "{:?}", m.validate());
        }
        prop_assert_eq!(read_jsonl(&write_jsonl(&corpus)).unwrap(), corpus);
    }
}
