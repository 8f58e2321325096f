//! Plain-text word-set format.
//!
//! ```text
//! # comment
//! q=2 n=3
//! 010
//! 110
//! ```
//!
//! Words are `n` base-`q` digits without separators when `q <= 10`, and
//! comma-separated integers otherwise. Blank lines and lines starting with
//! `#` are skipped.

use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::wordspace::{Word, WordSet};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(u32, u32)> {
    let mut q = None;
    let mut n = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed header field `{field}`")))?;
        let value: u32 = value
            .parse()
            .map_err(|_| parse_err(line_no, format!("header value `{value}` is not an integer")))?;
        match key {
            "q" => q = Some(value),
            "n" => n = Some(value),
            other => return Err(parse_err(line_no, format!("unknown header key `{other}`"))),
        }
    }
    match (q, n) {
        (Some(q), Some(n)) => Ok((q, n)),
        _ => Err(parse_err(line_no, "header must be `q=<int> n=<int>`")),
    }
}

fn parse_word(line_no: usize, line: &str, q: u32, n: u32) -> Result<Word> {
    let symbols: Vec<u32> = if q <= 10 {
        line.chars()
            .map(|c| {
                c.to_digit(10).filter(|&d| d < q).ok_or_else(|| {
                    parse_err(line_no, format!("invalid base-{q} digit `{c}` in `{line}`"))
                })
            })
            .collect::<Result<_>>()?
    } else {
        line.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|&d| d < q)
                    .ok_or_else(|| {
                        parse_err(
                            line_no,
                            format!("invalid symbol `{}` in `{line}`", tok.trim()),
                        )
                    })
            })
            .collect::<Result<_>>()?
    };
    if symbols.len() != n as usize {
        return Err(parse_err(
            line_no,
            format!("word `{line}` has length {}, expected {n}", symbols.len()),
        ));
    }
    Word::new(q, symbols).map_err(|e| parse_err(line_no, e.to_string()))
}

/// Parses the text format. Line numbers in errors are 1-based.
pub fn parse_word_set(text: &str) -> Result<WordSet> {
    let mut header: Option<(u32, u32)> = None;
    let mut set: Option<WordSet> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match header {
            None => {
                let (q, n) = parse_header(line_no, line)?;
                set = Some(WordSet::empty(q, n)?);
                header = Some((q, n));
            }
            Some((q, n)) => {
                let word = parse_word(line_no, line, q, n)?;
                if let Some(s) = set.as_mut() {
                    s.insert(word.encode());
                }
            }
        }
    }
    set.ok_or_else(|| parse_err(1, "missing `q=<int> n=<int>` header"))
}

pub fn format_word(word: &Word) -> String {
    if word.q() <= 10 {
        word.symbols()
            .iter()
            .map(|s| char::from_digit(*s, 10).unwrap())
            .collect()
    } else {
        word.symbols()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Serialized as `{"q", "n", "count", "words": [...]}` with words in text form.
impl Serialize for WordSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("WordSet", 4)?;
        st.serialize_field("q", &self.q())?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("count", &self.count())?;
        let words: Vec<String> = self.words().map(|w| format_word(&w)).collect();
        st.serialize_field("words", &words)?;
        st.end()
    }
}

/// Renders a set in the text format, members in increasing index order.
pub fn format_word_set(set: &WordSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "q={} n={}", set.q(), set.n());
    for word in set.words() {
        out.push_str(&format_word(&word));
        out.push('\n');
    }
    out
}
