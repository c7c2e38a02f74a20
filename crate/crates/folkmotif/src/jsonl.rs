//! Canonical JSON-lines interchange format, one melody per line:
//!
//! ```json
//! {"id":"deut0001","label":"german","meter":[{"measure":0,"numerator":4,"denominator":4}],
//!  "events":[{"pitch":60,"duration":[1,2],"onset":[0,1],"measure":0}]}
//! ```
//!
//! Rationals are `[numerator, denominator]` pairs in lowest terms and rests
//! have `"pitch": null`.

use folkmotif_core::melody::{MelodyError, Meter, MeterChange, NoteEvent, Rational};
use folkmotif_core::Melody;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: serde_json::Error },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MelodyRecord {
    id: String,
    label: String,
    meter: Vec<MeterRecord>,
    events: Vec<EventRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeterRecord {
    measure: u32,
    numerator: u32,
    denominator: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    pitch: Option<u8>,
    duration: [i64; 2],
    onset: [i64; 2],
    measure: u32,
}

fn pair(r: Rational) -> [i64; 2] {
    [*r.numer(), *r.denom()]
}

fn rational(p: [i64; 2]) -> Option<Rational> {
    (p[1] > 0).then(|| Rational::new(p[0], p[1]))
}

impl From<&Melody> for MelodyRecord {
    fn from(m: &Melody) -> Self {
        MelodyRecord {
            id: m.id.clone(),
            label: m.label.clone(),
            meter: m
                .meters
                .iter()
                .map(|c| MeterRecord { measure: c.measure, numerator: c.meter.numerator, denominator: c.meter.denominator })
                .collect(),
            events: m
                .events
                .iter()
                .map(|e| EventRecord {
                    pitch: e.pitch,
                    duration: pair(e.duration),
                    onset: pair(e.onset_in_measure),
                    measure: e.measure_index,
                })
                .collect(),
        }
    }
}

impl MelodyRecord {
    fn into_melody(self) -> Result<Melody, String> {
        let meters = self
            .meter
            .into_iter()
            .map(|m| {
                Meter::new(m.numerator, m.denominator)
                    .map(|meter| MeterChange { measure: m.measure, meter })
                    .ok_or_else(|| format!("invalid meter {}/{}", m.numerator, m.denominator))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let events = self
            .events
            .into_iter()
            .map(|e| {
                let duration = rational(e.duration).ok_or("zero denominator in duration")?;
                let onset = rational(e.onset).ok_or("zero denominator in onset")?;
                Ok(NoteEvent { pitch: e.pitch, duration, onset_in_measure: onset, measure_index: e.measure })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let m = Melody { id: self.id, label: self.label, meters, events };
        m.validate().map_err(|e: MelodyError| e.to_string())?;
        Ok(m)
    }
}

/// Serializes melodies, one JSON object per line, each line newline-terminated.
pub fn write_jsonl(corpus: &[Melody]) -> Vec<u8> {
    let mut out = Vec::new();
    for m in corpus {
        serde_json::to_writer(&mut out, &MelodyRecord::from(m)).expect("melody records always serialize");
        out.push(b'\n');
    }
    out
}

/// Parses and validates a JSON-lines corpus. Blank lines are ignored.
pub fn read_jsonl(bytes: &[u8]) -> Result<Vec<Melody>, JsonlError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| JsonlError::Invalid { line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(), message: e.to_string() })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: MelodyRecord = serde_json::from_str(line).map_err(|source| JsonlError::Syntax { line: i + 1, source })?;
        out.push(record.into_melody().map_err(|message| JsonlError::Invalid { line: i + 1, message })?);
    }
    Ok(out)
}
