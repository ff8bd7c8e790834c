//! Plain-text exchange formats: plain PBM (`P1`) for matrices and JSON for
//! rectangle covers.
//!
//! PBM bits are written verbatim, so a `1` in the file is a one-entry of the
//! matrix. Dimensions follow the PBM convention of width (columns) first.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boolmat::{BoolMatrix, Rectangle};
use crate::error::{Error, Result};

/// Serialize as plain PBM, one matrix row per line.
pub fn to_pbm(matrix: &BoolMatrix) -> String {
    let mut out = String::with_capacity(matrix.rows() * (2 * matrix.cols() + 1) + 16);
    let _ = writeln!(out, "P1");
    let _ = writeln!(out, "{} {}", matrix.cols(), matrix.rows());
    for r in 0..matrix.rows() {
        for c in 0..matrix.cols() {
            if c > 0 {
                out.push(' ');
            }
            out.push(if matrix.get(r, c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Parse plain PBM. Accepts `#` comments and raster digits with or without
/// separating whitespace.
pub fn from_pbm(text: &str) -> Result<BoolMatrix> {
    let mut tokens = Tokens::new(text);
    match tokens.word() {
        Some("P1") => {}
        Some(other) => return Err(Error::Parse(format!("expected P1 magic, found {other:?}"))),
        None => return Err(Error::Parse("empty input".into())),
    }
    let mut dim = |name: &str| -> Result<usize> {
        let word = tokens
            .word()
            .ok_or_else(|| Error::Parse(format!("missing {name}")))?;
        word.parse()
            .map_err(|_| Error::Parse(format!("bad {name} {word:?}")))
    };
    let cols = dim("width")?;
    let rows = dim("height")?;
    let mut matrix = BoolMatrix::zeros(rows, cols)?;
    let mut placed = 0usize;
    let total = rows * cols;
    for ch in tokens.raster() {
        let bit = match ch {
            '0' => false,
            '1' => true,
            other => return Err(Error::Parse(format!("unexpected raster character {other:?}"))),
        };
        if placed == total {
            return Err(Error::Parse("raster longer than declared size".into()));
        }
        if bit {
            matrix.set(placed / cols, placed % cols, true)?;
        }
        placed += 1;
    }
    if placed != total {
        return Err(Error::Parse(format!("raster has {placed} bits, expected {total}")));
    }
    Ok(matrix)
}

struct Tokens<'a> {
    rest: &'a str,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self { rest: text }
    }

    fn skip_space_and_comments(&mut self) {
        loop {
            self.rest = self.rest.trim_start();
            if self.rest.starts_with('#') {
                self.rest = self.rest.find('\n').map_or("", |i| &self.rest[i..]);
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        self.skip_space_and_comments();
        if self.rest.is_empty() {
            return None;
        }
        let end = self
            .rest
            .find(|ch: char| ch.is_whitespace() || ch == '#')
            .unwrap_or(self.rest.len());
        let (word, rest) = self.rest.split_at(end);
        self.rest = rest;
        Some(word)
    }

    fn raster(self) -> impl Iterator<Item = char> + 'a {
        let mut in_comment = false;
        self.rest.chars().filter(move |&ch| {
            if in_comment {
                if ch == '\n' {
                    in_comment = false;
                }
                return false;
            }
            if ch == '#' {
                in_comment = true;
                return false;
            }
            !ch.is_whitespace()
        })
    }
}

/// `{"rects":[{"rows":[...],"cols":[...]}]}`
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub rects: Vec<Rectangle>,
}

pub fn cover_to_json(rects: &[Rectangle]) -> Result<String> {
    #[derive(Serialize)]
    struct Borrowed<'a> {
        rects: &'a [Rectangle],
    }
    Ok(serde_json::to_string(&Borrowed { rects })?)
}

pub fn cover_from_json(text: &str) -> Result<Vec<Rectangle>> {
    Ok(serde_json::from_str::<CoverFile>(text)?.rects)
}
