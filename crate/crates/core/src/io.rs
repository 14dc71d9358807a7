//! Text interfaces: the word grammar, datum files, recursion export, and
//! portrait rendering.
//!
//! Word grammar (UTF-8, whitespace-separated terms):
//!
//! ```text
//! word  := "1" | term (SP term)*
//! term  := base ("^" int)?
//! base  := "a" | "b[" l "," i "]"
//! int   := optional "-" then digits
//! ```
//!
//! Exponents are reduced mod p; terms whose exponent vanishes are elided
//! with a warning. When the datum has the EGS shape, `b` and `c` are sugar
//! for `b[p,1]` and `b[1,1]`. Words over the extension additionally accept
//! the stable letter `t` with an arbitrary integer exponent.
//!
//! Datum files are JSON objects `{"p": <int>, "E": [<p arrays of vectors>]}`
//! with vectors of length p-1 over `0..p`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{Datum, DatumError};
use crate::hnn::{HnnLetter, HnnVertex};
use crate::words::{Base, GroupWord, Letter};
use crate::wreath::{GenRecursion, Perm, Portrait, WreathTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator `{name}` at byte {position}")]
    UnknownGenerator { position: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// A term's exponent reduced to zero mod p and the term was dropped.
    ExponentZeroElided { position: usize, term: String },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::ExponentZeroElided { position, term } => write!(
                f,
                "term `{term}` at byte {position} has exponent 0 mod p and was elided"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum DatumParseError {
    #[error("malformed datum document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Datum(#[from] DatumError),
}

fn tokens(input: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in input.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &input[s..idx]));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push((s, &input[s..]));
    }
    out
}

struct Term {
    base: TermBase,
    exp: i64,
}

enum TermBase {
    Gen(Base),
    Stable,
}

fn parse_exponent(position: usize, text: &str) -> Result<i64, ParseError> {
    let body = text.strip_prefix('-').unwrap_or(text);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Syntax {
            position,
            message: format!("invalid exponent `{text}`"),
        });
    }
    text.parse().map_err(|_| ParseError::Syntax {
        position,
        message: format!("exponent `{text}` out of range"),
    })
}

fn parse_term(
    position: usize,
    token: &str,
    datum: &Datum,
    allow_stable: bool,
) -> Result<Term, ParseError> {
    let (head, exp) = match token.find('^') {
        Some(caret) => (
            &token[..caret],
            parse_exponent(position + caret + 1, &token[caret + 1..])?,
        ),
        None => (token, 1),
    };

    let base = match head {
        "a" => TermBase::Gen(Base::A),
        "t" if allow_stable => TermBase::Stable,
        "b" | "c" => {
            if !datum.is_egs() {
                return Err(ParseError::UnknownGenerator {
                    position,
                    name: format!("{head} (shorthand requires an EGS datum)"),
                });
            }
            let l = if head == "b" { datum.p() } else { 1 };
            TermBase::Gen(Base::B { l, i: 1 })
        }
        _ => {
            let inner = head
                .strip_prefix("b[")
                .and_then(|rest| rest.strip_suffix(']'))
                .ok_or_else(|| ParseError::Syntax {
                    position,
                    message: format!("expected a generator, found `{head}`"),
                })?;
            let (l_text, i_text) = inner.split_once(',').ok_or_else(|| ParseError::Syntax {
                position,
                message: format!("expected `b[l,i]`, found `{head}`"),
            })?;
            let l: u32 = l_text.trim().parse().map_err(|_| ParseError::Syntax {
                position,
                message: format!("invalid spine index `{l_text}`"),
            })?;
            let i: u32 = i_text.trim().parse().map_err(|_| ParseError::Syntax {
                position,
                message: format!("invalid vector index `{i_text}`"),
            })?;
            if l < 1 || l > datum.p() || i < 1 || i as usize > datum.rank(l) {
                return Err(ParseError::UnknownGenerator {
                    position,
                    name: head.to_string(),
                });
            }
            TermBase::Gen(Base::B { l, i })
        }
    };
    Ok(Term { base, exp })
}

/// Parses a word over the group generators; returns the reduced word plus
/// any elision warnings.
pub fn parse_word(
    input: &str,
    datum: &Datum,
) -> Result<(GroupWord, Vec<ParseWarning>), ParseError> {
    let p = datum.p();
    let toks = tokens(input);
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            message: "empty word; write `1` for the identity".into(),
        });
    }
    if toks.len() == 1 && toks[0].1 == "1" {
        return Ok((GroupWord::identity(p), Vec::new()));
    }

    let mut word = GroupWord::identity(p);
    let mut warnings = Vec::new();
    for (position, token) in toks {
        if token == "1" {
            return Err(ParseError::Syntax {
                position,
                message: "`1` denotes the identity and must stand alone".into(),
            });
        }
        let term = parse_term(position, token, datum, false)?;
        let TermBase::Gen(base) = term.base else {
            unreachable!("stable letter disabled")
        };
        if term.exp.rem_euclid(p as i64) == 0 {
            warnings.push(ParseWarning::ExponentZeroElided {
                position,
                term: token.to_string(),
            });
            continue;
        }
        word.push(base, term.exp);
    }
    Ok((word, warnings))
}

/// Parses a word over the extension alphabet: group terms plus `t^int`.
pub fn parse_hnn_word(
    input: &str,
    datum: &Datum,
) -> Result<(Vec<HnnLetter>, Vec<ParseWarning>), ParseError> {
    let p = datum.p();
    let toks = tokens(input);
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            message: "empty word; write `1` for the identity".into(),
        });
    }
    if toks.len() == 1 && toks[0].1 == "1" {
        return Ok((Vec::new(), Vec::new()));
    }

    let mut letters = Vec::new();
    let mut warnings = Vec::new();
    for (position, token) in toks {
        if token == "1" {
            return Err(ParseError::Syntax {
                position,
                message: "`1` denotes the identity and must stand alone".into(),
            });
        }
        let term = parse_term(position, token, datum, true)?;
        match term.base {
            TermBase::Stable => {
                if term.exp == 0 {
                    warnings.push(ParseWarning::ExponentZeroElided {
                        position,
                        term: token.to_string(),
                    });
                }
                let letter = if term.exp > 0 {
                    HnnLetter::T
                } else {
                    HnnLetter::TInv
                };
                for _ in 0..term.exp.unsigned_abs() {
                    letters.push(letter);
                }
            }
            TermBase::Gen(base) => {
                let exp = term.exp.rem_euclid(p as i64) as u32;
                if exp == 0 {
                    warnings.push(ParseWarning::ExponentZeroElided {
                        position,
                        term: token.to_string(),
                    });
                    continue;
                }
                letters.push(HnnLetter::Gen(Letter { base, exp }));
            }
        }
    }
    Ok((letters, warnings))
}

/// Parses a rooted-tree vertex: a digit string over `0..p`; `-` or the empty
/// string denote the root.
pub fn parse_vertex(input: &str, p: u32) -> Result<Vec<u8>, ParseError> {
    if input.is_empty() || input == "-" {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(input.len());
    for (position, ch) in input.char_indices() {
        let digit = ch.to_digit(10).ok_or_else(|| ParseError::Syntax {
            position,
            message: format!("vertex letters must be digits, found `{ch}`"),
        })?;
        if digit >= p {
            return Err(ParseError::Syntax {
                position,
                message: format!("vertex letter {digit} out of range for p={p}"),
            });
        }
        out.push(digit as u8);
    }
    Ok(out)
}

/// Parses an unrooted-tree vertex in `k:w` form, `w` a digit string or `-`.
pub fn parse_hnn_vertex(input: &str, p: u32) -> Result<HnnVertex, ParseError> {
    let (k_text, w_text) = input.split_once(':').ok_or_else(|| ParseError::Syntax {
        position: 0,
        message: "expected `k:w` with k a copy index and w a digit string".into(),
    })?;
    let k: u32 = k_text.trim().parse().map_err(|_| ParseError::Syntax {
        position: 0,
        message: format!("invalid copy index `{k_text}`"),
    })?;
    let word = parse_vertex(w_text, p)?;
    Ok(HnnVertex::new(k, &word))
}

pub fn format_vertex(v: &[u8]) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.iter().map(|x| x.to_string()).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawDatum {
    p: u32,
    #[serde(rename = "E")]
    e: Vec<Vec<Vec<i64>>>,
}

/// Parses and validates a datum document.
pub fn parse_datum(text: &str) -> Result<Datum, DatumParseError> {
    let raw: RawDatum = serde_json::from_str(text)?;
    Ok(Datum::validate(raw.p, &raw.e)?)
}

/// Canonical single-line JSON rendering; `parse_datum(format_datum(d)) == d`
/// bit-exactly for canonical documents.
pub fn format_datum(d: &Datum) -> String {
    let raw = RawDatum {
        p: d.p(),
        e: d.collections()
            .iter()
            .map(|vectors| {
                vectors
                    .iter()
                    .map(|v| v.entries().iter().map(|&x| x as i64).collect())
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("datum serialization cannot fail")
}

fn gap_name(base: Base) -> String {
    match base {
        Base::A => "a".to_string(),
        Base::B { l, i } => format!("b{l}_{i}"),
    }
}

fn gap_word(w: &GroupWord) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.letters()
        .iter()
        .map(|letter| {
            if letter.exp == 1 {
                gap_name(letter.base)
            } else {
                format!("{}^{}", gap_name(letter.base), letter.exp)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn gap_perm(perm: &Perm) -> String {
    perm.cycles()
        .iter()
        .map(|cycle| {
            let points: Vec<String> = cycle.iter().map(|&x| (x as u32 + 1).to_string()).collect();
            format!("({})", points.join(","))
        })
        .collect()
}

/// Renders the wreath recursion as one declaration per generator, sections
/// first and the root permutation in 1-based cycle notation:
///
/// ```text
/// a = (1, 1, 1)(1,2,3)
/// b1_1 = (b1_1, a, 1)
/// b3_1 = (a, 1, b3_1)
/// ```
pub fn export_gap(d: &Datum) -> String {
    let table = d.build_recursion();
    let mut out = String::new();
    for base in table.generators() {
        let rec = table.recursion(base).expect("listed generator");
        let sections: Vec<String> = rec.sections.iter().map(gap_word).collect();
        out.push_str(&format!(
            "{} = ({}){}\n",
            gap_name(base),
            sections.join(", "),
            gap_perm(&rec.root),
        ));
    }
    out
}

fn parse_gap_name(position: usize, name: &str) -> Result<Base, ParseError> {
    if name == "a" {
        return Ok(Base::A);
    }
    let rest = name.strip_prefix('b').ok_or_else(|| ParseError::Syntax {
        position,
        message: format!("unknown declaration name `{name}`"),
    })?;
    let (l_text, i_text) = rest.split_once('_').ok_or_else(|| ParseError::Syntax {
        position,
        message: format!("expected `b<l>_<i>`, found `{name}`"),
    })?;
    let l = l_text.parse().map_err(|_| ParseError::Syntax {
        position,
        message: format!("invalid spine index in `{name}`"),
    })?;
    let i = i_text.parse().map_err(|_| ParseError::Syntax {
        position,
        message: format!("invalid vector index in `{name}`"),
    })?;
    Ok(Base::B { l, i })
}

fn parse_gap_word(position: usize, text: &str, p: u32) -> Result<GroupWord, ParseError> {
    let text = text.trim();
    if text == "1" {
        return Ok(GroupWord::identity(p));
    }
    let mut word = GroupWord::identity(p);
    for factor in text.split('*') {
        let factor = factor.trim();
        let (name, exp) = match factor.split_once('^') {
            Some((name, exp_text)) => (name, parse_exponent(position, exp_text)?),
            None => (factor, 1),
        };
        word.push(parse_gap_name(position, name)?, exp);
    }
    Ok(word)
}

/// Re-parses [`export_gap`] output into a wreath table, for round-trip
/// checking against `Datum::build_recursion`.
pub fn parse_gap(text: &str) -> Result<WreathTable, ParseError> {
    let mut declarations = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rhs) = line.split_once('=').ok_or_else(|| ParseError::Syntax {
            position: line_idx,
            message: "expected `name = (sections)(cycles)`".into(),
        })?;
        let rhs = rhs.trim();
        if !rhs.starts_with('(') {
            return Err(ParseError::Syntax {
                position: line_idx,
                message: "sections must be parenthesized".into(),
            });
        }
        let close = rhs.find(')').ok_or_else(|| ParseError::Syntax {
            position: line_idx,
            message: "unterminated section list".into(),
        })?;
        let sections_text = &rhs[1..close];
        let perm_text = rhs[close + 1..].trim();
        declarations.push((
            line_idx,
            name.trim().to_string(),
            sections_text.to_string(),
            perm_text.to_string(),
        ));
    }
    if declarations.is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            message: "no generator declarations found".into(),
        });
    }
    let p = declarations[0].2.split(',').count() as u32;

    let mut table = WreathTable::new(p);
    for (line_idx, name, sections_text, perm_text) in declarations {
        let base = parse_gap_name(line_idx, &name)?;
        let parts: Vec<&str> = sections_text.split(',').collect();
        if parts.len() != p as usize {
            return Err(ParseError::Syntax {
                position: line_idx,
                message: format!("expected {p} sections, found {}", parts.len()),
            });
        }
        let mut sections = Vec::with_capacity(p as usize);
        for part in parts {
            sections.push(parse_gap_word(line_idx, part, p)?);
        }

        let mut images: Vec<u8> = (0..p as u8).collect();
        for cycle_text in perm_text.split(')').filter(|s| !s.trim().is_empty()) {
            let cycle_text = cycle_text.trim().trim_start_matches('(');
            let points: Result<Vec<u8>, _> = cycle_text
                .split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect();
            let points = points.map_err(|_| ParseError::Syntax {
                position: line_idx,
                message: format!("invalid cycle `{cycle_text}`"),
            })?;
            for window in 0..points.len() {
                let from = points[window] - 1;
                let to = points[(window + 1) % points.len()] - 1;
                images[from as usize] = to;
            }
        }
        let root = Perm::new(images).ok_or_else(|| ParseError::Syntax {
            position: line_idx,
            message: "cycle notation does not describe a permutation".into(),
        })?;
        table.insert(base, GenRecursion { root, sections });
    }
    Ok(table)
}

fn portrait_text_into(portrait: &Portrait, indent: usize, out: &mut String) {
    match portrait {
        Portrait::Leaf(word) => {
            out.push_str(&word.to_string());
            out.push('\n');
        }
        Portrait::Node(perm, children) => {
            out.push_str(&format!("{perm}\n"));
            for (x, child) in children.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&format!("{x}: "));
                portrait_text_into(child, indent + 1, out);
            }
        }
    }
}

/// Indented textual rendering: internal nodes show their permutation in
/// cycle notation, leaves show their word.
pub fn portrait_text(portrait: &Portrait) -> String {
    let mut out = String::new();
    portrait_text_into(portrait, 0, &mut out);
    out
}

fn portrait_dot_into(portrait: &Portrait, next_id: &mut usize, out: &mut String) -> usize {
    let id = *next_id;
    *next_id += 1;
    match portrait {
        Portrait::Leaf(word) => {
            out.push_str(&format!("  n{id} [shape=box, label=\"{word}\"];\n"));
        }
        Portrait::Node(perm, children) => {
            out.push_str(&format!("  n{id} [label=\"{perm}\"];\n"));
            for (x, child) in children.iter().enumerate() {
                let child_id = portrait_dot_into(child, next_id, out);
                out.push_str(&format!("  n{id} -> n{child_id} [label=\"{x}\"];\n"));
            }
        }
    }
    id
}

pub fn portrait_dot(portrait: &Portrait) -> String {
    let mut out = String::from("digraph portrait {\n");
    let mut next_id = 0;
    portrait_dot_into(portrait, &mut next_id, &mut out);
    out.push_str("}\n");
    out
}
