//! Block-diagonal SDP standard form.
//!
//! A problem holds PSD blocks `X_1..X_k`, sparse affine equality rows
//! `sum_b <C_i^b, X_b> = b_i` and an objective
//! `minimize sum_b <C^b, X_b> - logdet(X_des)` for an optional designated
//! block. Symmetric coefficient matrices are stored as upper triangles and
//! `<C, X> = sum_i C_ii X_ii + 2 sum_{i<j} C_ij X_ij`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Regular PSD matrix variable.
    Psd,
    /// 1x1 slack introduced for a single inequality row.
    Slack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    pub dim: usize,
    pub kind: BlockKind,
}

/// One upper-triangle entry (`row <= col`) of a symmetric coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Entry {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        debug_assert!(row <= col);
        Entry { block, row, col, value }
    }
}

/// Sparse equality row: `sum <C^b, X_b> = rhs`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub entries: Vec<Entry>,
}

impl SparseRow {
    pub fn value(&self, blocks: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let x = blocks[e.block][(e.row, e.col)];
                if e.row == e.col {
                    e.value * x
                } else {
                    2.0 * e.value * x
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub linear: Vec<Entry>,
    pub logdet_block: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<Block>,
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<f64>,
    pub objective: Objective,
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem {
            blocks: Vec::new(),
            rows: Vec::new(),
            rhs: Vec::new(),
            objective: Objective::default(),
        }
    }

    pub fn add_block(&mut self, label: impl Into<String>, dim: usize, kind: BlockKind) -> usize {
        self.blocks.push(Block { label: label.into(), dim, kind });
        self.blocks.len() - 1
    }

    pub fn add_row(&mut self, entries: Vec<Entry>, rhs: f64) -> usize {
        self.rows.push(SparseRow { entries });
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Total barrier parameter: the sum of block dimensions.
    pub fn barrier_nu(&self) -> f64 {
        self.blocks.iter().map(|b| b.dim as f64).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Solver("problem has no blocks".into()));
        }
        if self.rows.len() != self.rhs.len() {
            return Err(Error::ShapeMismatch("row/rhs length mismatch".into()));
        }
        let check = |e: &Entry| -> Result<()> {
            let b = self
                .blocks
                .get(e.block)
                .ok_or_else(|| Error::ShapeMismatch(format!("entry references block {}", e.block)))?;
            if e.row > e.col || e.col >= b.dim {
                return Err(Error::ShapeMismatch(format!(
                    "entry ({},{}) outside upper triangle of {}x{} block",
                    e.row, e.col, b.dim, b.dim
                )));
            }
            if !e.value.is_finite() {
                return Err(Error::Solver("non-finite coefficient".into()));
            }
            Ok(())
        };
        for row in &self.rows {
            for e in &row.entries {
                check(e)?;
            }
        }
        for e in &self.objective.linear {
            check(e)?;
        }
        if let Some(d) = self.objective.logdet_block {
            if d >= self.blocks.len() {
                return Err(Error::ShapeMismatch(format!("designated block {d} out of range")));
            }
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("non-finite right-hand side".into()));
        }
        Ok(())
    }

    /// `<C_lin, X>` for the linear objective part.
    pub fn linear_objective(&self, blocks: &[DMatrix<f64>]) -> f64 {
        self.objective
            .linear
            .iter()
            .map(|e| {
                let x = blocks[e.block][(e.row, e.col)];
                if e.row == e.col {
                    e.value * x
                } else {
                    2.0 * e.value * x
                }
            })
            .sum()
    }

    /// Row indices grouped by the block they touch.
    pub fn rows_by_block(&self) -> Vec<Vec<usize>> {
        let mut by_block = vec![Vec::new(); self.blocks.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let mut last = usize::MAX;
            for e in &row.entries {
                if e.block != last {
                    by_block[e.block].push(i);
                    last = e.block;
                }
            }
        }
        for list in &mut by_block {
            list.dedup();
        }
        by_block
    }
}

impl Default for SdpProblem {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_value_doubles_off_diagonal() {
        let mut p = SdpProblem::new();
        let b = p.add_block("a", 2, BlockKind::Psd);
        p.add_row(vec![Entry::new(b, 0, 1, 1.0), Entry::new(b, 0, 0, 3.0)], 0.0);
        let x = DMatrix::from_row_slice(2, 2, &[2.0, 5.0, 5.0, 1.0]);
        // 3*2 + 2*1*5 = 16
        assert_eq!(p.rows[0].value(&[x]), 16.0);
    }

    #[test]
    fn validation_catches_bad_entries() {
        let mut p = SdpProblem::new();
        let b = p.add_block("a", 2, BlockKind::Psd);
        p.add_row(vec![Entry { block: b, row: 1, col: 0, value: 1.0 }], 0.0);
        assert!(p.validate().is_err());
    }
}
