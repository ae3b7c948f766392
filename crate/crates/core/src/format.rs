//! Canonical design text format.
//!
//! ```text
//! DESIGN <v> <b>
//! <sorted point indices of block 0, single-space separated>
//! ...
//! ```
//!
//! Lines are newline-terminated ASCII without trailing whitespace and blocks
//! appear in canonical order. The parser accepts blocks in any order and
//! canonicalizes them.

use std::fmt::Write as _;

use thiserror::Error;

use crate::design::{Design, DesignError};
use crate::gf2::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected header `DESIGN <v> <b>`")]
    BadHeader,
    #[error("expected a nonnegative integer, found {0:?}")]
    BadInteger(String),
    #[error("point {index} is out of range for v = {v}")]
    IndexOutOfRange { index: usize, v: usize },
    #[error("point {0} repeated within a block")]
    DuplicatePoint(usize),
    #[error("duplicate block")]
    DuplicateBlock,
    #[error("header declares {declared} blocks, found {found}")]
    BlockCountMismatch { declared: usize, found: usize },
    #[error("invalid design: {0}")]
    Design(DesignError),
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// Splits on single spaces, returning each token with its 1-based column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut col = 1;
    line.split(' ').map(move |t| {
        let start = col;
        col += t.len() + 1;
        (start, t)
    })
}

fn parse_usize(line: usize, column: usize, tok: &str) -> Result<usize, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|c| c.is_ascii_digit()) {
        return Err(err(line, column, ParseErrorKind::BadInteger(tok.to_string())));
    }
    tok.parse()
        .map_err(|_| err(line, column, ParseErrorKind::BadInteger(tok.to_string())))
}

pub fn parse_design(text: &str) -> Result<Design, ParseError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let mut head = tokens(header);
    match head.next() {
        Some((_, "DESIGN")) => {}
        _ => return Err(err(1, 1, ParseErrorKind::BadHeader)),
    }
    let (vc, vt) = head.next().ok_or(err(1, header.len() + 1, ParseErrorKind::BadHeader))?;
    let v = parse_usize(1, vc, vt)?;
    let (bc, bt) = head.next().ok_or(err(1, header.len() + 1, ParseErrorKind::BadHeader))?;
    let b = parse_usize(1, bc, bt)?;
    if let Some((c, _)) = head.next() {
        return Err(err(1, c, ParseErrorKind::BadHeader));
    }
    if v == 0 {
        return Err(err(1, vc, ParseErrorKind::Design(DesignError::NoPoints)));
    }

    let mut blocks = Vec::with_capacity(b);
    let mut line_no = 1;
    // An empty body after the header means zero blocks.
    let block_lines: Vec<&str> = if body.contains('\n') { lines.collect() } else { Vec::new() };
    for text in block_lines {
        line_no += 1;
        let mut block = BitVector::zeros(v);
        for (col, tok) in tokens(text) {
            let p = parse_usize(line_no, col, tok)?;
            if p >= v {
                return Err(err(line_no, col, ParseErrorKind::IndexOutOfRange { index: p, v }));
            }
            if block.get(p) {
                return Err(err(line_no, col, ParseErrorKind::DuplicatePoint(p)));
            }
            block.set(p, true);
        }
        if block.weight() == v {
            return Err(err(
                line_no,
                1,
                ParseErrorKind::Design(DesignError::FullBlock {
                    block: line_no - 2,
                }),
            ));
        }
        if blocks.contains(&block) {
            return Err(err(line_no, 1, ParseErrorKind::DuplicateBlock));
        }
        blocks.push(block);
    }
    if blocks.len() != b {
        return Err(err(
            line_no,
            1,
            ParseErrorKind::BlockCountMismatch {
                declared: b,
                found: blocks.len(),
            },
        ));
    }
    Design::new(v, blocks).map_err(|e| err(1, 1, ParseErrorKind::Design(e)))
}

pub fn write_design(d: &Design) -> String {
    let mut out = format!("DESIGN {} {}\n", d.v(), d.b());
    for block in d.blocks() {
        let line = block.ones_iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{line}");
    }
    out
}
