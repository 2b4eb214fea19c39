//! Extraction of the numeric answer from a model reply.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::ParseFailure;

static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[0-9]+").unwrap());

/// First standalone integer in `raw`, checked against the inclusive `range`.
///
/// Digits glued to letters (`7th`) or forming part of a decimal (`7.5`) are
/// not standalone. A leading minus sign makes the value negative.
pub fn parse_response(raw: &str, range: (i64, i64)) -> Result<i64, ParseFailure> {
    let bytes = raw.as_bytes();
    let word = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    for m in NUMBER.find_iter(raw) {
        let before = m.start().checked_sub(1).map(|i| bytes[i]);
        let after = bytes.get(m.end()).copied();
        let after2 = bytes.get(m.end() + 1).copied();
        if before.is_some_and(|b| word(b) || b == b'.') || after.is_some_and(word) {
            continue;
        }
        if after == Some(b'.') && after2.is_some_and(|b| b.is_ascii_digit()) {
            continue;
        }
        let Ok(mut value) = m.as_str().parse::<i64>() else {
            return Err(ParseFailure::OutOfRange(m.as_str().to_string()));
        };
        if before == Some(b'-') {
            value = -value;
        }
        if value < range.0 || value > range.1 {
            return Err(ParseFailure::OutOfRange(value.to_string()));
        }
        return Ok(value);
    }
    Err(ParseFailure::NoInteger)
}
