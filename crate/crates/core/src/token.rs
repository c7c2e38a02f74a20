//! Atomic motif tokens: chromatic intervals and metric rhythm units.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Signed;

use crate::melody::{Melody, Meter, NoteEvent, Rational};

/// Which token family a corpus is encoded with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Intervallic,
    Rhythmic,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Intervallic => "intervallic",
            Representation::Rhythmic => "rhythmic",
        })
    }
}

impl FromStr for Representation {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intervallic" | "interval" => Ok(Representation::Intervallic),
            "rhythmic" | "rhythm" => Ok(Representation::Rhythmic),
            _ => Err(TokenError::Malformed(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("interval requested for a rest")]
    Rest,
    #[error("melody has fewer than two pitched notes")]
    TooFewNotes,
    #[error("malformed token `{0}`")]
    Malformed(String),
}

/// Chromatic interval between consecutive pitched notes. Renders as the
/// semitone count followed by a direction digit, `1` ascending and `0`
/// descending; a repeated note is `00`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalToken {
    pub size: u32,
    pub ascending: bool,
}

impl IntervalToken {
    pub const REPEAT: IntervalToken = IntervalToken { size: 0, ascending: false };

    pub fn between(prev: &NoteEvent, next: &NoteEvent) -> Result<Self, TokenError> {
        let (a, b) = match (prev.pitch, next.pitch) {
            (Some(a), Some(b)) => (a as i32, b as i32),
            _ => return Err(TokenError::Rest),
        };
        Ok(Self::from_semitones(b - a))
    }

    pub fn from_semitones(delta: i32) -> Self {
        IntervalToken { size: delta.unsigned_abs(), ascending: delta > 0 }
    }
}

impl fmt::Display for IntervalToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size == 0 {
            f.write_str("00")
        } else {
            write!(f, "{}{}", self.size, u8::from(self.ascending))
        }
    }
}

impl FromStr for IntervalToken {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TokenError::Malformed(s.to_string());
        if s == "00" {
            return Ok(IntervalToken::REPEAT);
        }
        if s.len() < 2 || !s.bytes().all(|b| b.is_ascii_digit()) || s.starts_with('0') {
            return Err(bad());
        }
        let (size, dir) = s.split_at(s.len() - 1);
        let ascending = match dir {
            "1" => true,
            "0" => false,
            _ => return Err(bad()),
        };
        let size: u32 = size.parse().map_err(|_| bad())?;
        Ok(IntervalToken { size, ascending })
    }
}

/// Interval token between two pitched events.
pub fn interval_token(prev: &NoteEvent, next: &NoteEvent) -> Result<IntervalToken, TokenError> {
    IntervalToken::between(prev, next)
}

/// Note/rest flag, downbeat flag and duration in quarters, rendered
/// `<note>-<downbeat>-<duration>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RhythmToken {
    pub is_note: bool,
    pub is_downbeat: bool,
    pub duration: Rational,
}

impl RhythmToken {
    pub fn of_event(event: &NoteEvent, meter: Meter) -> Self {
        let beats = event.onset_in_measure / meter.beat_unit();
        RhythmToken {
            is_note: event.pitch.is_some(),
            is_downbeat: beats.is_integer(),
            duration: event.duration,
        }
    }
}

/// Rhythm token of one event under `meter`.
pub fn rhythm_token(event: &NoteEvent, meter: Meter) -> RhythmToken {
    RhythmToken::of_event(event, meter)
}

impl fmt::Display for RhythmToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}-{}",
            u8::from(self.is_note),
            u8::from(self.is_downbeat),
            format_quarters(self.duration)
        )
    }
}

impl FromStr for RhythmToken {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TokenError::Malformed(s.to_string());
        let mut parts = s.split('-');
        let (Some(n), Some(d), Some(q), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let flag = |x: &str| match x {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(bad()),
        };
        Ok(RhythmToken {
            is_note: flag(n)?,
            is_downbeat: flag(d)?,
            duration: parse_quarters(q).ok_or_else(bad)?,
        })
    }
}

const DECIMAL_PLACES: u32 = 4;

/// Shortest decimal for a non-negative rational, truncated (not rounded)
/// to four places: `1/2 → "0.5"`, `1 → "1"`, `1/3 → "0.3333"`.
pub fn format_quarters(r: Rational) -> String {
    debug_assert!(!r.is_negative());
    let (n, d) = (*r.numer(), *r.denom());
    let int = n / d;
    let mut rem = n % d;
    let mut frac = String::new();
    for _ in 0..DECIMAL_PLACES {
        rem *= 10;
        frac.push(char::from(b'0' + (rem / d) as u8));
        rem %= d;
    }
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{int}")
    } else {
        format!("{int}.{frac}")
    }
}

/// Inverse of [`format_quarters`]: the smallest-denominator rational
/// (denominator below 100) whose rendering is `s`, otherwise the literal
/// decimal value. Rationals with denominators below 100 are at least
/// 1/9801 apart, so the match is unique.
pub fn parse_quarters(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty()
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > DECIMAL_PLACES as usize
        || (s.contains('.') && (frac.is_empty() || frac.ends_with('0')))
    {
        return None;
    }
    let scale = 10i64.pow(frac.len() as u32);
    let int: i64 = int.parse().ok()?;
    let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let exact = Rational::new(int.checked_mul(scale)? + frac_v, scale);
    for q in 1..100i64 {
        let p = (exact * q).ceil().to_integer();
        let cand = Rational::new(p, q);
        if format_quarters(cand) == s {
            return Some(cand);
        }
    }
    (format_quarters(exact) == s).then_some(exact)
}

/// Encodes a melody as atomic token renderings, in temporal order.
///
/// Intervallic mode emits one token per pair of consecutive pitched notes;
/// rests in between are skipped. Rhythmic mode emits one token per event,
/// rests included.
pub fn tokenize_melody(m: &Melody, mode: Representation) -> Result<Vec<String>, TokenError> {
    match mode {
        Representation::Intervallic => {
            let pitched: Vec<&NoteEvent> = m.pitched().collect();
            if pitched.len() < 2 {
                return Err(TokenError::TooFewNotes);
            }
            pitched
                .windows(2)
                .map(|w| interval_token(w[0], w[1]).map(|t| t.to_string()))
                .collect()
        }
        Representation::Rhythmic => Ok(m
            .events
            .iter()
            .map(|e| rhythm_token(e, m.meter_at(e.measure_index)).to_string())
            .collect()),
    }
}
