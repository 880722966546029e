//! JSON automaton files.
//!
//! ```text
//! {
//!   "type": "dpa",
//!   "aps": ["a", "b"],
//!   "states": 2,
//!   "initial": 0,
//!   "colors": [1, 2],
//!   "transitions": [
//!     [0, 0, 1],
//!     ...
//!   ]
//! }
//! ```
//!
//! Letters are bitsets over `aps` (bit i set iff `aps[i]` holds). A DPA
//! lists exactly one `[source, letter, target]` per state and letter. An
//! NBA has `"type": "nba"`, an `"accepting"` list of state indices instead
//! of `"colors"`, and `[source, letter, [targets...]]` transitions; missing
//! pairs have no successors.

use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::Value;

use super::dpa::Dpa;
use super::nba::Nba;
use crate::error::{Error, Result};
use crate::logic::{Alphabet, Letter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Automaton {
    Nba(Nba),
    Dpa(Dpa),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    #[serde(rename = "type")]
    kind: String,
    aps: Vec<String>,
    states: usize,
    initial: usize,
    colors: Option<Vec<u32>>,
    accepting: Option<Vec<usize>>,
    transitions: Vec<Value>,
}

fn format_err(location: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Format {
        location: location.into(),
        msg: msg.into(),
    }
}

fn index(v: &Value, location: &str, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format_err(location, format!("{what} must be a non-negative integer")))
}

pub fn read_automaton(text: &str) -> Result<Automaton> {
    let raw: Raw = serde_json::from_str(text)
        .map_err(|e| format_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let alphabet = Alphabet::new(raw.aps.iter().cloned()).map_err(|e| format_err("aps", e.to_string()))?;
    let letters = alphabet.letter_count() as usize;
    let n = raw.states;
    if n == 0 {
        return Err(format_err("states", "an automaton needs at least one state"));
    }
    if raw.initial >= n {
        return Err(format_err("initial", format!("state {} out of range", raw.initial)));
    }
    let check_state = |q: usize, loc: &str| {
        if q < n {
            Ok(q)
        } else {
            Err(format_err(loc, format!("state {q} out of range")))
        }
    };
    let check_letter = |l: usize, loc: &str| {
        if l < letters {
            Ok(Letter(l as u32))
        } else {
            Err(format_err(loc, format!("letter {l} out of range for {} propositions", alphabet.len())))
        }
    };
    match raw.kind.as_str() {
        "dpa" => {
            if raw.accepting.is_some() {
                return Err(format_err("accepting", "not allowed for a dpa"));
            }
            let colors = raw.colors.ok_or_else(|| format_err("colors", "missing"))?;
            if colors.len() != n {
                return Err(format_err("colors", format!("expected {n} entries, found {}", colors.len())));
            }
            let mut trans = vec![vec![usize::MAX; letters]; n];
            for (i, t) in raw.transitions.iter().enumerate() {
                let loc = format!("transitions[{i}]");
                let arr = t
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| format_err(&loc, "expected [source, letter, target]"))?;
                let src = check_state(index(&arr[0], &loc, "source")?, &loc)?;
                let letter = check_letter(index(&arr[1], &loc, "letter")?, &loc)?;
                let tgt = check_state(index(&arr[2], &loc, "target")?, &loc)?;
                let slot = &mut trans[src][letter.0 as usize];
                if *slot != usize::MAX {
                    return Err(format_err(&loc, "duplicate transition"));
                }
                *slot = tgt;
            }
            for (q, row) in trans.iter().enumerate() {
                if let Some(l) = row.iter().position(|&t| t == usize::MAX) {
                    return Err(format_err("transitions", format!("no transition from state {q} on letter {l}")));
                }
            }
            Ok(Automaton::Dpa(Dpa::new(alphabet, raw.initial, colors, trans)?))
        }
        "nba" => {
            if raw.colors.is_some() {
                return Err(format_err("colors", "not allowed for an nba"));
            }
            let mut nba = Nba::new(alphabet.clone(), n, raw.initial)?;
            for (i, &q) in raw.accepting.ok_or_else(|| format_err("accepting", "missing"))?.iter().enumerate() {
                nba.set_accepting(check_state(q, &format!("accepting[{i}]"))?, true);
            }
            for (i, t) in raw.transitions.iter().enumerate() {
                let loc = format!("transitions[{i}]");
                let arr = t
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| format_err(&loc, "expected [source, letter, [targets]]"))?;
                let src = check_state(index(&arr[0], &loc, "source")?, &loc)?;
                let letter = check_letter(index(&arr[1], &loc, "letter")?, &loc)?;
                let targets = arr[2].as_array().ok_or_else(|| format_err(&loc, "targets must be a list"))?;
                for v in targets {
                    let tgt = check_state(index(v, &loc, "target")?, &loc)?;
                    nba.add_transition(src, letter, tgt);
                }
            }
            Ok(Automaton::Nba(nba))
        }
        other => Err(format_err("type", format!("unknown automaton type `{other}`"))),
    }
}

fn header(out: &mut String, kind: &str, alphabet: &Alphabet, states: usize, initial: usize) {
    let aps = serde_json::to_string(alphabet.aps()).expect("strings serialize");
    let _ = write!(
        out,
        "{{\n  \"type\": \"{kind}\",\n  \"aps\": {aps},\n  \"states\": {states},\n  \"initial\": {initial},\n"
    );
}

fn transitions(out: &mut String, lines: Vec<String>) {
    out.push_str("  \"transitions\": [");
    if lines.is_empty() {
        out.push_str("]\n}\n");
        return;
    }
    out.push('\n');
    let last = lines.len() - 1;
    for (i, line) in lines.into_iter().enumerate() {
        let _ = writeln!(out, "    {line}{}", if i < last { "," } else { "" });
    }
    out.push_str("  ]\n}\n");
}

/// Canonical text: fixed field order, one transition per line, sorted by
/// source then letter.
pub fn write_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    match a {
        Automaton::Dpa(d) => {
            header(&mut out, "dpa", d.alphabet(), d.states(), d.initial());
            let colors: Vec<String> = d.colors().iter().map(u32::to_string).collect();
            let _ = writeln!(out, "  \"colors\": [{}],", colors.join(", "));
            let mut lines = Vec::new();
            for q in 0..d.states() {
                for l in d.alphabet().letters() {
                    lines.push(format!("[{q}, {}, {}]", l.0, d.step(q, l)));
                }
            }
            transitions(&mut out, lines);
        }
        Automaton::Nba(b) => {
            header(&mut out, "nba", b.alphabet(), b.states(), b.initial());
            let acc: Vec<String> = (0..b.states()).filter(|&q| b.is_accepting(q)).map(|q| q.to_string()).collect();
            let _ = writeln!(out, "  \"accepting\": [{}],", acc.join(", "));
            let mut lines = Vec::new();
            for q in 0..b.states() {
                for l in b.alphabet().letters() {
                    let ts = b.successors(q, l);
                    if !ts.is_empty() {
                        let ts: Vec<String> = ts.iter().map(usize::to_string).collect();
                        lines.push(format!("[{q}, {}, [{}]]", l.0, ts.join(", ")));
                    }
                }
            }
            transitions(&mut out, lines);
        }
    }
    out
}
