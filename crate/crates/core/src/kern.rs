//! Parser for a single-spine subset of Humdrum `**kern`.
//!
//! Supported: the `**kern` header, meter records `*M<n>/<d>`, notes
//! `<dur><pitch>` with dots and `#`/`-`/`n` accidentals, rests `<dur>r`,
//! barlines, comments, null records and the `*-` terminator. Other tandem
//! interpretations (clef, key, tempo) are accepted and ignored, as are beam,
//! stem, slur and phrase signifiers. Ties, grace notes, chords and multiple
//! spines are rejected.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::melody::{Melody, Meter, MeterChange, NoteEvent, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("missing **kern header")]
    MissingHeader,
    #[error("more than one spine or a chord; only monophonic single-spine input is supported")]
    Polyphonic,
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("unknown pitch token `{0}`")]
    UnknownPitch(String),
    #[error("ties are not supported (`{0}`)")]
    Tie(String),
    #[error("note `{0}` has no duration (grace notes are not supported)")]
    MissingDuration(String),
    #[error("invalid meter `{0}`")]
    InvalidMeter(String),
    #[error("note before any meter record")]
    MissingMeter,
    #[error("pitch outside the MIDI range")]
    PitchOutOfRange,
    #[error("measure {measure} overfull: {filled} quarters exceed capacity {capacity}")]
    Overfull { measure: u32, filled: Rational, capacity: Rational },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Characters with no rhythmic or pitch meaning for this parser.
fn is_ignored_signifier(c: char) -> bool {
    matches!(c, '{' | '}' | '(' | ')' | 'L' | 'J' | 'K' | 'k' | '/' | '\\' | ';' | '\'' | '^' | '~' | '`' | '>' | '<' | 'x' | 'X' | 'y' | 'i' | 'm' | 'M' | 'W' | 'w' | 'T' | 't' | 'u' | 'v' | 'U' | 'V' | 'O' | 'S' | '$' | 'R' | '?' | '!' | '|')
}

struct Token {
    pitch: Option<u8>,
    duration: Rational,
}

fn parse_note(full: &str, line: usize) -> Result<Token, ParseError> {
    // Phrase and slur openings precede the duration.
    let tok = full.trim_start_matches(['{', '(', '&']);
    if tok.starts_with('[') {
        return Err(err(line, ParseErrorKind::Tie(full.to_string())));
    }
    let digits_end = tok.find(|c: char| !c.is_ascii_digit()).unwrap_or(tok.len());
    if digits_end == 0 {
        return Err(err(line, ParseErrorKind::MissingDuration(tok.to_string())));
    }
    let recip: i64 = tok[..digits_end]
        .parse()
        .map_err(|_| err(line, ParseErrorKind::UnknownToken(tok.to_string())))?;
    let base = if recip == 0 { Rational::from_integer(8) } else { Rational::new(4, recip) };

    let mut dots = 0u32;
    let mut letter: Option<char> = None;
    let mut repeats = 0i32;
    let mut alter = 0i32;
    let mut rest = false;
    for c in tok[digits_end..].chars() {
        match c {
            '.' => dots += 1,
            'a'..='g' | 'A'..='G' => match letter {
                None => {
                    letter = Some(c);
                    repeats = 1;
                }
                Some(l) if l == c => repeats += 1,
                Some(_) => return Err(err(line, ParseErrorKind::UnknownPitch(tok.to_string()))),
            },
            'r' => rest = true,
            '#' => alter += 1,
            '-' => alter -= 1,
            'n' => {}
            '[' | ']' | '_' => return Err(err(line, ParseErrorKind::Tie(tok.to_string()))),
            c if is_ignored_signifier(c) => {}
            _ => return Err(err(line, ParseErrorKind::UnknownPitch(tok.to_string()))),
        }
    }
    if rest == letter.is_some() {
        // Either nothing at all, or a rest carrying a pitch letter.
        return Err(err(line, ParseErrorKind::UnknownPitch(tok.to_string())));
    }
    if dots > 8 {
        return Err(err(line, ParseErrorKind::UnknownToken(tok.to_string())));
    }
    let duration = base * (Rational::from_integer(2) - Rational::new(1, 1i64 << dots));

    let pitch = match letter {
        None => None,
        Some(l) => {
            let pc = match l.to_ascii_lowercase() {
                'c' => 0,
                'd' => 2,
                'e' => 4,
                'f' => 5,
                'g' => 7,
                'a' => 9,
                _ => 11,
            };
            let octave = if l.is_ascii_lowercase() { 3 + repeats } else { 4 - repeats };
            let midi = 12 * (octave + 1) + pc + alter;
            if !(0..=127).contains(&midi) {
                return Err(err(line, ParseErrorKind::PitchOutOfRange));
            }
            Some(midi as u8)
        }
    };
    Ok(Token { pitch, duration })
}

fn parse_meter(tok: &str, line: usize) -> Result<Meter, ParseError> {
    let body = &tok[2..];
    let bad = || err(line, ParseErrorKind::InvalidMeter(tok.to_string()));
    let (n, d) = body.split_once('/').ok_or_else(bad)?;
    let n: u32 = n.parse().map_err(|_| bad())?;
    let d: u32 = d.parse().map_err(|_| bad())?;
    Meter::new(n, d).ok_or_else(bad)
}

/// An incomplete first measure followed by further measures is a pickup:
/// its notes are moved to the end of the measure.
fn align_anacrusis(meters: &[MeterChange], events: &mut [NoteEvent]) {
    if !events.iter().any(|e| e.measure_index > 0) {
        return;
    }
    let Some(first) = meters.first().filter(|m| m.measure == 0) else {
        return;
    };
    let filled: Rational = events.iter().filter(|e| e.measure_index == 0).map(|e| e.duration).sum();
    let gap = first.meter.capacity() - filled;
    for e in events.iter_mut().filter(|e| e.measure_index == 0) {
        e.onset_in_measure += gap;
    }
}

/// Parses a `**kern` document into a [`Melody`] with empty id and label.
///
/// Only the grammar is checked here. A melody with fewer than two pitched
/// notes parses fine; [`Melody::validate`] rejects it.
pub fn parse_kern(text: &str) -> Result<Melody, ParseError> {
    let mut header_seen = false;
    let mut meters: Vec<MeterChange> = Vec::new();
    let mut pending_meter: Option<Meter> = None;
    let mut events: Vec<NoteEvent> = Vec::new();
    let mut measure: u32 = 0;
    let mut filled = Rational::zero();
    let mut measure_has_events = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('!') {
            continue;
        }
        if trimmed.contains('\t') {
            return Err(err(line, ParseErrorKind::Polyphonic));
        }
        let tok = trimmed.trim();
        if !header_seen {
            if tok == "**kern" {
                header_seen = true;
                continue;
            }
            return Err(err(line, ParseErrorKind::MissingHeader));
        }
        if tok.contains(' ') {
            return Err(err(line, ParseErrorKind::Polyphonic));
        }
        if tok == "*-" {
            break;
        }
        if let Some(interp) = tok.strip_prefix('*') {
            match interp {
                "^" | "v" | "+" | "x" => return Err(err(line, ParseErrorKind::Polyphonic)),
                _ if interp.starts_with('*') => return Err(err(line, ParseErrorKind::Polyphonic)),
                _ if interp.starts_with('M') && interp[1..].starts_with(|c: char| c.is_ascii_digit()) => {
                    let meter = parse_meter(tok, line)?;
                    if measure_has_events {
                        pending_meter = Some(meter);
                    } else {
                        match meters.last_mut() {
                            Some(m) if m.measure == measure => m.meter = meter,
                            _ => meters.push(MeterChange { measure, meter }),
                        }
                    }
                }
                _ => {}
            }
            continue;
        }
        if tok.starts_with('=') {
            if measure_has_events {
                measure += 1;
                filled = Rational::zero();
                measure_has_events = false;
                if let Some(meter) = pending_meter.take() {
                    meters.push(MeterChange { measure, meter });
                }
            }
            continue;
        }
        if tok == "." {
            continue;
        }

        let note = parse_note(tok, line)?;
        let meter = meters
            .iter()
            .rev()
            .find(|m| m.measure <= measure)
            .map(|m| m.meter)
            .ok_or_else(|| err(line, ParseErrorKind::MissingMeter))?;
        let capacity = meter.capacity();
        if filled + note.duration > capacity {
            return Err(err(
                line,
                ParseErrorKind::Overfull { measure, filled: filled + note.duration, capacity },
            ));
        }
        events.push(NoteEvent {
            pitch: note.pitch,
            duration: note.duration,
            onset_in_measure: filled,
            measure_index: measure,
        });
        filled += note.duration;
        measure_has_events = true;
    }

    if !header_seen {
        return Err(err(last_line.max(1), ParseErrorKind::MissingHeader));
    }
    align_anacrusis(&meters, &mut events);
    Ok(Melody { id: String::new(), label: String::new(), meters, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn parses_notes_in_one_measure() {
        let m = parse_kern("**kern\n*M4/4\n4c\n8d\n=\n*-").unwrap();
        assert_eq!(m.events.len(), 2);
        assert_eq!(m.events[0].pitch, Some(60));
        assert_eq!(m.events[0].duration, r(1, 1));
        assert_eq!(m.events[1].pitch, Some(62));
        assert_eq!(m.events[1].duration, r(1, 2));
        assert_eq!(m.events[1].onset_in_measure, r(1, 1));
        assert!(m.events.iter().all(|e| e.measure_index == 0));
        assert_eq!(m.meters[0].meter, Meter::new(4, 4).unwrap());
    }

    #[test]
    fn rest_then_note() {
        let m = parse_kern("**kern\n*M2/4\n4r\n4c\n=\n*-").unwrap();
        assert_eq!(m.events.len(), 2);
        assert_eq!(m.validate(), Err(crate::melody::MelodyError::TooFewNotes));
        let m = parse_kern("**kern\n*M2/4\n4r\n4c\n=\n4d\n*-").unwrap();
        assert_eq!(m.events[0].pitch, None);
        assert_eq!(m.events[0].duration, r(1, 1));
        assert_eq!(m.events[0].onset_in_measure, r(0, 1));
        assert_eq!(m.events[1].pitch, Some(60));
        assert_eq!(m.events[1].onset_in_measure, r(1, 1));
        assert_eq!(m.events[2].measure_index, 1);
    }

    #[test]
    fn unknown_pitch_reports_line() {
        let e = parse_kern("**kern\n*M4/4\n4q\n*-").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::UnknownPitch(_)));
    }

    #[test]
    fn octaves_accidentals_and_dots() {
        let m = parse_kern("**kern\n*M4/4\n4.cc#\n8C\n4BB-\n4ee\n*-").unwrap();
        let p: Vec<_> = m.events.iter().map(|e| e.pitch.unwrap()).collect();
        assert_eq!(p, [73, 48, 46, 76]);
        assert_eq!(m.events[0].duration, r(3, 2));
        let m = parse_kern("**kern\n*M4/4\n2..c\n8d\n*-").unwrap();
        assert_eq!(m.events[0].duration, r(7, 2));
    }

    #[test]
    fn pickup_measure_is_right_aligned() {
        let m = parse_kern("**kern\n*M3/4\n8g\n=1\n4c\n4d\n4e\n=2\n2.f\n*-").unwrap();
        assert_eq!(m.events[0].onset_in_measure, r(5, 2));
        assert_eq!(m.events[1].onset_in_measure, r(0, 1));
        assert!(m.validate().is_ok());
        let single = parse_kern("**kern\n*M3/4\n8g\n4c\n*-").unwrap();
        assert_eq!(single.events[0].onset_in_measure, r(0, 1));
    }

    #[test]
    fn triplets_are_exact() {
        let m = parse_kern("**kern\n*M2/4\n12c\n12d\n12e\n4f\n*-").unwrap();
        assert_eq!(m.events[2].onset_in_measure, r(2, 3));
        assert_eq!(m.events[3].onset_in_measure, r(1, 1));
    }

    #[test]
    fn error_cases() {
        assert_eq!(parse_kern("*M4/4\n4c\n").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert_eq!(parse_kern("").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert_eq!(
            parse_kern("**kern\t**kern\n*-").unwrap_err().kind,
            ParseErrorKind::Polyphonic
        );
        assert_eq!(parse_kern("**kern\n*M4/4\n4c 4e\n*-").unwrap_err().kind, ParseErrorKind::Polyphonic);
        assert_eq!(parse_kern("**kern\n*^\n*-").unwrap_err().kind, ParseErrorKind::Polyphonic);
        assert!(matches!(
            parse_kern("**kern\n*M4/4\n4c[\n4c]\n*-").unwrap_err().kind,
            ParseErrorKind::Tie(_)
        ));
        let over = parse_kern("**kern\n*M2/4\n4c\n4d\n4e\n*-").unwrap_err();
        assert_eq!(over.line, 5);
        assert!(matches!(over.kind, ParseErrorKind::Overfull { .. }));
        assert_eq!(parse_kern("**kern\n4c\n*-").unwrap_err().kind, ParseErrorKind::MissingMeter);
        assert!(matches!(
            parse_kern("**kern\n*M4/4\ncc\n*-").unwrap_err().kind,
            ParseErrorKind::MissingDuration(_)
        ));
    }

    #[test]
    fn meter_change_applies_from_next_measure() {
        let text = "**kern\n*M2/4\n4c\n4d\n*M3/4\n=\n4e\n4f\n4g\n=\n*-";
        let m = parse_kern(text).unwrap();
        assert_eq!(m.meters.len(), 2);
        assert_eq!(m.meters[1], MeterChange { measure: 1, meter: Meter::new(3, 4).unwrap() });
        let text = "**kern\n*M2/4\n4c\n4d\n=\n*M3/4\n4e\n4f\n4g\n*-";
        let m = parse_kern(text).unwrap();
        assert_eq!(m.meters[1].measure, 1);
        assert_eq!(m.validate(), Ok(()));
    }

    #[test]
    fn essen_style_decorations_are_ignored() {
        let text = "!!!OTL: Test\n**kern\n*ICvox\n*clefG2\n*k[f#]\n*G:\n*M3/4\n*MM100\n=1-\n{8gL\n8aJ\n=1\n4b\n4a\n4g}\n==\n*-\n!!!END";
        let m = parse_kern(text).unwrap();
        assert_eq!(m.events.len(), 5);
        assert_eq!(m.events[0].measure_index, 0);
        assert_eq!(m.events[2].measure_index, 1);
        assert_eq!(m.validate(), Ok(()));
    }
}
