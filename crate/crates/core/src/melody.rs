//! Canonical in-memory melody representation.

use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Zero;

/// Exact duration or position in quarter-note units.
pub type Rational = Ratio<i64>;

/// A time signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Meter {
    pub numerator: u32,
    pub denominator: u32,
}

impl Meter {
    pub const COMMON: Meter = Meter { numerator: 4, denominator: 4 };

    pub fn new(numerator: u32, denominator: u32) -> Option<Self> {
        (numerator > 0 && denominator > 0 && denominator.is_power_of_two())
            .then_some(Meter { numerator, denominator })
    }

    /// Measure length in quarter notes, `4·num/den`.
    pub fn capacity(&self) -> Rational {
        Rational::new(4 * self.numerator as i64, self.denominator as i64)
    }

    /// The metric unit used to decide downbeats: a dotted quarter in
    /// compound meters (6/8, 9/8, 12/8), a quarter note otherwise.
    pub fn beat_unit(&self) -> Rational {
        if self.denominator == 8 && matches!(self.numerator, 6 | 9 | 12) {
            Rational::new(3, 2)
        } else {
            Rational::from_integer(1)
        }
    }
}

/// Meter in force from `measure` onward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeterChange {
    pub measure: u32,
    pub meter: Meter,
}

/// A note (`pitch` is a MIDI number) or a rest (`pitch == None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteEvent {
    pub pitch: Option<u8>,
    pub duration: Rational,
    pub onset_in_measure: Rational,
    pub measure_index: u32,
}

impl NoteEvent {
    pub fn is_rest(&self) -> bool {
        self.pitch.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Melody {
    pub id: String,
    pub label: String,
    /// Meter changes sorted by measure; the first one starts at measure 0.
    pub meters: Vec<MeterChange>,
    pub events: Vec<NoteEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MelodyError {
    #[error("melody has no meter starting at measure 0")]
    MissingMeter,
    #[error("meter changes are not strictly increasing by measure")]
    UnorderedMeters,
    #[error("event {0}: duration must be positive")]
    NonPositiveDuration(usize),
    #[error("event {0}: pitch outside 0..=127")]
    PitchOutOfRange(usize),
    #[error("event {0}: onset outside the measure")]
    OnsetOutOfRange(usize),
    #[error("event {0}: events overlap or are out of order")]
    Overlap(usize),
    #[error("measure {0} is overfull")]
    Overfull(u32),
    #[error("melody has fewer than two pitched events")]
    TooFewNotes,
}

impl Melody {
    /// Meter in force at `measure`.
    pub fn meter_at(&self, measure: u32) -> Meter {
        self.meters
            .iter()
            .take_while(|m| m.measure <= measure)
            .last()
            .map(|m| m.meter)
            .unwrap_or(Meter::COMMON)
    }

    pub fn pitched(&self) -> impl Iterator<Item = &NoteEvent> + '_ {
        self.events.iter().filter(|e| e.pitch.is_some())
    }

    /// Checks every structural invariant of a melody.
    pub fn validate(&self) -> Result<(), MelodyError> {
        match self.meters.first() {
            Some(m) if m.measure == 0 => {}
            _ => return Err(MelodyError::MissingMeter),
        }
        if self.meters.windows(2).any(|w| w[0].measure >= w[1].measure) {
            return Err(MelodyError::UnorderedMeters);
        }
        let mut prev: Option<&NoteEvent> = None;
        let mut filled = Rational::zero();
        for (i, e) in self.events.iter().enumerate() {
            if e.duration <= Rational::zero() {
                return Err(MelodyError::NonPositiveDuration(i));
            }
            if e.pitch.is_some_and(|p| p > 127) {
                return Err(MelodyError::PitchOutOfRange(i));
            }
            let capacity = self.meter_at(e.measure_index).capacity();
            if e.onset_in_measure < Rational::zero() || e.onset_in_measure >= capacity {
                return Err(MelodyError::OnsetOutOfRange(i));
            }
            match prev {
                Some(p) if p.measure_index == e.measure_index => {
                    if e.onset_in_measure < p.onset_in_measure + p.duration {
                        return Err(MelodyError::Overlap(i));
                    }
                }
                Some(p) if p.measure_index > e.measure_index => {
                    return Err(MelodyError::Overlap(i));
                }
                _ => filled = Rational::zero(),
            }
            filled += e.duration;
            if e.onset_in_measure + e.duration > capacity || filled > capacity {
                return Err(MelodyError::Overfull(e.measure_index));
            }
            prev = Some(e);
        }
        if self.pitched().count() < 2 {
            return Err(MelodyError::TooFewNotes);
        }
        Ok(())
    }

    /// Shifts every pitch by `semitones`; `None` if any pitch leaves 0..=127.
    pub fn transpose(&self, semitones: i32) -> Option<Melody> {
        let mut out = self.clone();
        for e in &mut out.events {
            if let Some(p) = e.pitch {
                let q = p as i32 + semitones;
                if !(0..=127).contains(&q) {
                    return None;
                }
                e.pitch = Some(q as u8);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(pitch: Option<u8>, dur: (i64, i64), onset: (i64, i64), m: u32) -> NoteEvent {
        NoteEvent {
            pitch,
            duration: Rational::new(dur.0, dur.1),
            onset_in_measure: Rational::new(onset.0, onset.1),
            measure_index: m,
        }
    }

    fn melody(events: Vec<NoteEvent>) -> Melody {
        Melody {
            id: "t".into(),
            label: "x".into(),
            meters: vec![MeterChange { measure: 0, meter: Meter::new(2, 4).unwrap() }],
            events,
        }
    }

    #[test]
    fn capacity_and_beat_unit() {
        assert_eq!(Meter::new(6, 8).unwrap().capacity(), Rational::from_integer(3));
        assert_eq!(Meter::new(6, 8).unwrap().beat_unit(), Rational::new(3, 2));
        assert_eq!(Meter::new(3, 8).unwrap().beat_unit(), Rational::from_integer(1));
        assert!(Meter::new(3, 6).is_none());
    }

    #[test]
    fn validate_catches_overfull_and_overlap() {
        let ok = melody(vec![ev(Some(60), (1, 1), (0, 1), 0), ev(Some(62), (1, 1), (1, 1), 0)]);
        assert_eq!(ok.validate(), Ok(()));
        let overlap =
            melody(vec![ev(Some(60), (1, 1), (0, 1), 0), ev(Some(62), (1, 1), (1, 2), 0)]);
        assert_eq!(overlap.validate(), Err(MelodyError::Overlap(1)));
        let overfull =
            melody(vec![ev(Some(60), (1, 1), (0, 1), 0), ev(Some(62), (2, 1), (1, 1), 0)]);
        assert_eq!(overfull.validate(), Err(MelodyError::Overfull(0)));
        let lonely = melody(vec![ev(Some(60), (1, 1), (0, 1), 0), ev(None, (1, 1), (1, 1), 0)]);
        assert_eq!(lonely.validate(), Err(MelodyError::TooFewNotes));
    }

    #[test]
    fn transpose_rejects_out_of_range() {
        let m = melody(vec![ev(Some(120), (1, 1), (0, 1), 0), ev(Some(62), (1, 1), (1, 1), 0)]);
        assert!(m.transpose(8).is_none());
        assert_eq!(m.transpose(-2).unwrap().events[1].pitch, Some(60));
    }
}
