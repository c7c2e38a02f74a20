//! Synthetic labelled corpora for data-free testing.
//!
//! Each class owns a disjoint set of interval sizes and note durations. A
//! song strings together short motifs built from its class's intervals,
//! interleaved with filler steps (unisons and semitones) shared by every
//! class. Any multi-word containing a class-specific interval therefore
//! identifies its class, while filler-only multi-words carry no label
//! information.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::melody::{Melody, Meter, MeterChange, NoteEvent, Rational};
use crate::token::IntervalToken;

/// Interval sizes (semitones) used only by filler steps.
pub const FILLER_SIZES: [u32; 2] = [0, 1];

const CLASS_SIZES: [[u32; 2]; 4] = [[2, 4], [3, 5], [7, 9], [6, 8]];
const CLASS_DURATIONS: [[(i64, i64); 2]; 4] = [[(1, 2), (1, 4)], [(1, 1), (3, 2)], [(2, 1), (1, 3)], [(3, 4), (1, 1)]];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Between 2 and 4.
    pub classes: usize,
    pub songs_per_class: usize,
    pub min_notes: usize,
    pub max_notes: usize,
    /// Probability that a step is a filler step rather than a motif.
    pub noise: f64,
    pub motifs_per_class: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { classes: 2, songs_per_class: 200, min_notes: 24, max_notes: 48, noise: 0.3, motifs_per_class: 6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("synthetic corpora support 2 to 4 classes")]
    Classes,
    #[error("invalid song length range")]
    Length,
}

pub fn class_label(class: usize) -> String {
    format!("class_{}", (b'a' + class as u8) as char)
}

/// Interval sizes owned by `class`.
pub fn class_interval_sizes(class: usize) -> &'static [u32] {
    &CLASS_SIZES[class]
}

/// Class owning an interval-multiword token, if any of its parts uses a
/// class-specific interval size.
pub fn interval_motif_class(token: &str) -> Option<usize> {
    token.split('_').find_map(|part| {
        let t: IntervalToken = part.parse().ok()?;
        CLASS_SIZES.iter().position(|s| s.contains(&t.size))
    })
}

/// Generates `classes × songs_per_class` valid melodies in 4/4.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<Melody>, SynthError> {
    if !(2..=CLASS_SIZES.len()).contains(&cfg.classes) {
        return Err(SynthError::Classes);
    }
    if cfg.min_notes < 3 || cfg.max_notes < cfg.min_notes {
        return Err(SynthError::Length);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inventories: Vec<Vec<Vec<u32>>> = (0..cfg.classes)
        .map(|c| {
            (0..cfg.motifs_per_class.max(1))
                .map(|_| {
                    let len = rng.gen_range(2..=3);
                    (0..len).map(|_| *CLASS_SIZES[c].choose(&mut rng).unwrap()).collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(cfg.classes * cfg.songs_per_class);
    for c in 0..cfg.classes {
        for i in 0..cfg.songs_per_class {
            let n_notes = rng.gen_range(cfg.min_notes..=cfg.max_notes);
            let steps = song_steps(&inventories[c], n_notes - 1, cfg.noise, &mut rng);
            let pitches = walk(&steps, &mut rng);
            let events = rhythm(&pitches, c, &mut rng);
            out.push(Melody {
                id: format!("synth-{}-{:04}", class_label(c), i),
                label: class_label(c),
                meters: vec![MeterChange { measure: 0, meter: Meter::COMMON }],
                events,
            });
        }
    }
    Ok(out)
}

fn song_steps(inventory: &[Vec<u32>], n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut steps = Vec::with_capacity(n + 3);
    while steps.len() < n {
        if rng.gen::<f64>() < noise {
            steps.push(*FILLER_SIZES.choose(rng).unwrap());
        } else {
            steps.extend_from_slice(inventory.choose(rng).unwrap());
        }
    }
    steps.truncate(n);
    steps
}

/// Random-direction walk from a random start, reflecting to stay in 48..=84.
fn walk(steps: &[u32], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut p: i32 = rng.gen_range(58..=74);
    let mut out = vec![p as u8];
    for &s in steps {
        let s = s as i32;
        let up = if p + s > 84 {
            false
        } else if p - s < 48 {
            true
        } else {
            rng.gen_bool(0.5)
        };
        p += if up { s } else { -s };
        out.push(p as u8);
    }
    out
}

fn rhythm(pitches: &[u8], class: usize, rng: &mut ChaCha8Rng) -> Vec<NoteEvent> {
    let capacity = Meter::COMMON.capacity();
    let mut events = Vec::with_capacity(pitches.len());
    let mut measure = 0u32;
    let mut onset = Rational::from_integer(0);
    for &p in pitches {
        let (n, d) = *CLASS_DURATIONS[class].choose(rng).unwrap();
        let mut dur = Rational::new(n, d);
        let left = capacity - onset;
        if dur > left {
            dur = left;
        }
        events.push(NoteEvent { pitch: Some(p), duration: dur, onset_in_measure: onset, measure_index: measure });
        onset += dur;
        if onset == capacity {
            measure += 1;
            onset = Rational::from_integer(0);
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiword::sliding_multiwords;
    use crate::token::{tokenize_melody, Representation};

    #[test]
    fn songs_are_valid_and_classes_disjoint() {
        let cfg = SynthConfig { songs_per_class: 20, ..SynthConfig::default() };
        let songs = generate(&cfg).unwrap();
        assert_eq!(songs.len(), 40);
        for s in &songs {
            s.validate().unwrap();
            let class = if s.label == "class_a" { 0 } else { 1 };
            let toks = tokenize_melody(s, Representation::Intervallic).unwrap();
            for mw in sliding_multiwords(&toks, 2) {
                if let Some(c) = interval_motif_class(&mw) {
                    assert_eq!(c, class, "{mw} in {}", s.id);
                }
            }
            assert!(tokenize_melody(s, Representation::Rhythmic).is_ok());
        }
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig { songs_per_class: 5, ..SynthConfig::default() };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }

    #[test]
    fn motif_class_lookup() {
        assert_eq!(interval_motif_class("21_00"), Some(0));
        assert_eq!(interval_motif_class("00_31"), Some(1));
        assert_eq!(interval_motif_class("00_11"), None);
    }
}
