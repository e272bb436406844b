//! Sparse sign check matrices. The kernel of such a matrix is the subspace
//! under study; row scaling does not change the kernel, so entries are kept
//! in {+1, -1}.
//!
//! Text format (bit-exact, LF endings):
//!
//! ```text
//! CHECK <rows> <cols> <nnz>
//! # <block note>
//! <row> <col> <+1|-1>
//! ...
//! ```
//!
//! Triplets are sorted by (row, col); a comment line precedes the first
//! triplet of each annotated row block.

use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckMatError {
    #[error("entry ({row}, {col}) outside {rows} x {cols} matrix")]
    EntryOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("duplicate column {col} in row {row}")]
    DuplicateColumn { row: usize, col: usize },
    #[error("row {0} is empty")]
    EmptyRow(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Provenance note for a contiguous block of rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockNote {
    pub first_row: usize,
    pub note: String,
}

/// Sparse matrix with entries in {+1, -1}, stored as sorted triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCheckMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, i8)>,
    blocks: Vec<BlockNote>,
}

impl SignCheckMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        mut entries: Vec<(u32, u32, i8)>,
    ) -> Result<Self, CheckMatError> {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let m = SignCheckMatrix { rows, cols, entries, blocks: Vec::new() };
        m.validate()?;
        Ok(m)
    }

    /// Dense row-major constructor for small fixtures and tests.
    pub fn from_dense_signs(signs: &[Vec<i8>], cols: usize) -> Result<Self, CheckMatError> {
        let mut entries = Vec::new();
        for (r, row) in signs.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &s) in row.iter().enumerate() {
                if s != 0 {
                    entries.push((r as u32, c as u32, s));
                }
            }
        }
        SignCheckMatrix::new(signs.len(), cols, entries)
    }

    fn validate(&self) -> Result<(), CheckMatError> {
        let mut seen_rows = vec![false; self.rows];
        let mut prev: Option<(u32, u32)> = None;
        for &(r, c, s) in &self.entries {
            debug_assert!(s == 1 || s == -1);
            if r as usize >= self.rows || c as usize >= self.cols {
                return Err(CheckMatError::EntryOutOfRange {
                    row: r as usize,
                    col: c as usize,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
            if prev == Some((r, c)) {
                return Err(CheckMatError::DuplicateColumn { row: r as usize, col: c as usize });
            }
            prev = Some((r, c));
            seen_rows[r as usize] = true;
        }
        if let Some(empty) = seen_rows.iter().position(|&b| !b) {
            return Err(CheckMatError::EmptyRow(empty));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, i8)] {
        &self.entries
    }

    pub fn blocks(&self) -> &[BlockNote] {
        &self.blocks
    }

    pub fn push_block_note(&mut self, first_row: usize, note: impl Into<String>) {
        self.blocks.push(BlockNote { first_row, note: note.into() });
        self.blocks.sort_by_key(|b| b.first_row);
    }

    /// Stack `other` below `self`; the kernel of the result is the
    /// intersection of the two kernels.
    pub fn stack(&self, other: &SignCheckMatrix) -> SignCheckMatrix {
        assert_eq!(self.cols, other.cols, "stack requires equal column counts");
        let offset = self.rows as u32;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|&(r, c, s)| (r + offset, c, s)));
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().map(|b| BlockNote {
            first_row: b.first_row + self.rows,
            note: b.note.clone(),
        }));
        SignCheckMatrix { rows: self.rows + other.rows, cols: self.cols, entries, blocks }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for &(r, c, s) in &self.entries {
            m[(r as usize, c as usize)] = s as f64;
        }
        m
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for &(r, c, s) in &self.entries {
            y[r as usize] += s as f64 * x[c as usize];
        }
        y
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "CHECK {} {} {}", self.rows, self.cols, self.entries.len()).unwrap();
        let mut block_iter = self.blocks.iter().peekable();
        for &(r, c, s) in &self.entries {
            while let Some(b) = block_iter.peek() {
                if b.first_row as u32 <= r {
                    writeln!(out, "# {}", b.note).unwrap();
                    block_iter.next();
                } else {
                    break;
                }
            }
            writeln!(out, "{} {} {}", r, c, if s > 0 { "+1" } else { "-1" }).unwrap();
        }
        // trailing notes on an all-zero tail cannot occur (no empty rows)
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, CheckMatError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| CheckMatError::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "CHECK" {
            return Err(CheckMatError::Parse {
                line: 1,
                msg: format!("expected `CHECK rows cols nnz` header, got `{header}`"),
            });
        }
        let parse_usize = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| CheckMatError::Parse {
                line: 1,
                msg: format!("bad {what} field `{s}` in header"),
            })
        };
        let rows = parse_usize(fields[1], "rows")?;
        let cols = parse_usize(fields[2], "cols")?;
        let nnz = parse_usize(fields[3], "nnz")?;
        let mut entries = Vec::with_capacity(nnz);
        let mut pending_notes: Vec<String> = Vec::new();
        let mut blocks = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(note) = line.strip_prefix('#') {
                pending_notes.push(note.trim_start().to_string());
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(CheckMatError::Parse {
                    line: lineno,
                    msg: format!("expected `row col sign`, got `{line}`"),
                });
            }
            let r: u32 = f[0].parse().map_err(|_| CheckMatError::Parse {
                line: lineno,
                msg: format!("bad row index `{}`", f[0]),
            })?;
            let c: u32 = f[1].parse().map_err(|_| CheckMatError::Parse {
                line: lineno,
                msg: format!("bad column index `{}`", f[1]),
            })?;
            let s: i8 = match f[2] {
                "+1" | "1" => 1,
                "-1" => -1,
                other => {
                    return Err(CheckMatError::Parse {
                        line: lineno,
                        msg: format!("sign must be +1 or -1, got `{other}`"),
                    })
                }
            };
            for note in pending_notes.drain(..) {
                blocks.push(BlockNote { first_row: r as usize, note });
            }
            entries.push((r, c, s));
        }
        if entries.len() != nnz {
            return Err(CheckMatError::Parse {
                line: 1,
                msg: format!("header claims nnz={nnz} but found {}", entries.len()),
            });
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let m = SignCheckMatrix { rows, cols, entries, blocks };
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SignCheckMatrix {
        SignCheckMatrix::new(2, 3, vec![(0, 0, 1), (0, 2, -1), (1, 1, 1)]).unwrap()
    }

    #[test]
    fn rejects_invalid_structure() {
        assert!(matches!(
            SignCheckMatrix::new(1, 2, vec![(0, 0, 1), (0, 0, -1)]),
            Err(CheckMatError::DuplicateColumn { .. })
        ));
        assert!(matches!(
            SignCheckMatrix::new(2, 2, vec![(0, 0, 1)]),
            Err(CheckMatError::EmptyRow(1))
        ));
        assert!(matches!(
            SignCheckMatrix::new(1, 2, vec![(0, 5, 1)]),
            Err(CheckMatError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn text_roundtrip_with_blocks() {
        let mut m = small();
        m.push_block_note(0, "level 0: demo");
        m.push_block_note(1, "level 1: other");
        let text = m.write_text();
        assert!(text.starts_with("CHECK 2 3 3\n"));
        let back = SignCheckMatrix::parse_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.write_text(), text);
    }

    #[test]
    fn parse_errors_name_the_field() {
        let err = SignCheckMatrix::parse_text("CHECK x 3 1\n0 0 +1\n").unwrap_err();
        match err {
            CheckMatError::Parse { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("rows"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = SignCheckMatrix::parse_text("CHECK 1 3 1\n0 0 2\n").unwrap_err();
        match err {
            CheckMatError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("sign"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stack_offsets_rows_and_blocks() {
        let mut a = small();
        a.push_block_note(0, "a");
        let mut b = small();
        b.push_block_note(0, "b");
        let s = a.stack(&b);
        assert_eq!(s.rows(), 4);
        assert_eq!(s.nnz(), 6);
        assert_eq!(s.blocks()[1].first_row, 2);
        let x = vec![1.0, 2.0, 3.0];
        let y = s.apply(&x);
        assert_eq!(y, vec![-2.0, 2.0, -2.0, 2.0]);
    }
}
