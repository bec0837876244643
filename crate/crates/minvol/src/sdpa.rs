//! SDPA-sparse interchange text for compiled problems.
//!
//! Layout: comment header, then `m`, `nblock`, block dimensions (runs of
//! 1x1 slack blocks emitted as one negative/diagonal block), the right-hand
//! side, and `matno blkno i j value` entries with 1-based indices where
//! `matno 0` is the objective matrix. Numbers are printed with 17
//! significant digits so re-import reproduces every `f64` bit-exactly.
//!
//! A `-log det` objective cannot be expressed in the linear format, so the
//! designated block is recorded in a comment and the objective matrix is the
//! problem linearized at unit barrier weight (identity subtracted on that
//! block); import reverses the subtraction.

use crate::error::{Error, Result};
use crate::sdp::{BlockKind, Entry, Objective, SdpProblem, SparseRow};

const MAGIC: &str = "* minvol maxdet sdp v1";

/// Map each problem block to its SDPA block number (1-based) and the index
/// offset inside that block. Consecutive slack blocks share one group.
fn block_layout(prob: &SdpProblem) -> (Vec<i64>, Vec<(usize, usize)>) {
    let mut dims: Vec<i64> = Vec::new();
    let mut map: Vec<(usize, usize)> = Vec::with_capacity(prob.blocks.len());
    let mut open_slack: Option<usize> = None;
    for b in &prob.blocks {
        match b.kind {
            BlockKind::Slack if b.dim == 1 => {
                match open_slack {
                    Some(group) => {
                        let offset = (-dims[group]) as usize;
                        dims[group] -= 1;
                        map.push((group, offset));
                    }
                    None => {
                        dims.push(-1);
                        open_slack = Some(dims.len() - 1);
                        map.push((dims.len() - 1, 0));
                    }
                }
            }
            _ => {
                open_slack = None;
                dims.push(b.dim as i64);
                map.push((dims.len() - 1, 0));
            }
        }
    }
    (dims, map)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize a problem to interchange text.
pub fn export_interchange(prob: &SdpProblem) -> String {
    let (dims, map) = block_layout(prob);
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    if let Some(d) = prob.objective.logdet_block {
        out.push_str(&format!(
            "* logdet-block {} (objective matrix includes the unit-weight linearization)\n",
            d + 1
        ));
    }
    out.push_str(&format!("{}\n", prob.rows.len()));
    out.push_str(&format!("{}\n", dims.len()));
    let dim_line: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    out.push_str(&dim_line.join(" "));
    out.push('\n');
    let rhs_line: Vec<String> = prob.rhs.iter().map(|v| fmt(*v)).collect();
    out.push_str(&rhs_line.join(" "));
    out.push('\n');

    let emit = |out: &mut String, matno: usize, entries: &[Entry]| {
        let mut sorted: Vec<&Entry> = entries.iter().collect();
        sorted.sort_by_key(|e| (e.block, e.row, e.col));
        for e in sorted {
            let (blk, off) = map[e.block];
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                matno,
                blk + 1,
                e.row + off + 1,
                e.col + off + 1,
                fmt(e.value)
            ));
        }
    };

    // Objective: linear part, with -I on the designated block.
    let mut obj_entries = prob.objective.linear.clone();
    if let Some(d) = prob.objective.logdet_block {
        let dim = prob.blocks[d].dim;
        for i in 0..dim {
            let existing = obj_entries
                .iter_mut()
                .find(|e| e.block == d && e.row == i && e.col == i);
            match existing {
                Some(e) => e.value -= 1.0,
                None => obj_entries.push(Entry::new(d, i, i, -1.0)),
            }
        }
    }
    obj_entries.retain(|e| e.value != 0.0);
    emit(&mut out, 0, &obj_entries);
    for (k, row) in prob.rows.iter().enumerate() {
        emit(&mut out, k + 1, &row.entries);
    }
    out
}

/// Parse interchange text back into a problem. Labels are regenerated;
/// numeric data round-trips bit-exactly.
pub fn import_interchange(text: &str) -> Result<SdpProblem> {
    let mut logdet_block: Option<usize> = None;
    let mut data_lines = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('*') || trimmed.starts_with('"') {
            if let Some(rest) = trimmed.strip_prefix("* logdet-block ") {
                let idx: usize = rest
                    .split_whitespace()
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse("bad logdet-block comment".into()))?;
                if idx == 0 {
                    return Err(Error::Parse("logdet-block index is 1-based".into()));
                }
                logdet_block = Some(idx - 1);
            }
            continue;
        }
        data_lines.push(trimmed);
    }
    if data_lines.len() < 4 {
        return Err(Error::Parse("interchange text truncated".into()));
    }
    let m: usize = data_lines[0]
        .parse()
        .map_err(|_| Error::Parse("bad constraint count".into()))?;
    let nblock: usize = data_lines[1]
        .parse()
        .map_err(|_| Error::Parse("bad block count".into()))?;
    let dims: Vec<i64> = data_lines[2]
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad block dimension `{s}`"))))
        .collect::<Result<_>>()?;
    if dims.len() != nblock {
        return Err(Error::Parse(format!(
            "block count {nblock} does not match {} dimensions",
            dims.len()
        )));
    }
    let rhs: Vec<f64> = data_lines[3]
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad rhs value `{s}`"))))
        .collect::<Result<_>>()?;
    if rhs.len() != m {
        return Err(Error::Parse(format!("{} rhs values for {m} constraints", rhs.len())));
    }

    let mut prob = SdpProblem::new();
    // sdpa block -> (first problem block index, is_slack_group)
    let mut first_block: Vec<(usize, bool)> = Vec::with_capacity(nblock);
    for (k, &d) in dims.iter().enumerate() {
        if d > 0 {
            let idx = prob.add_block(format!("psd{k}"), d as usize, BlockKind::Psd);
            first_block.push((idx, false));
        } else if d < 0 {
            let count = (-d) as usize;
            let mut start = None;
            for j in 0..count {
                let idx = prob.add_block(format!("slack{k}_{j}"), 1, BlockKind::Slack);
                if start.is_none() {
                    start = Some(idx);
                }
            }
            first_block.push((start.unwrap(), true));
        } else {
            return Err(Error::Parse("zero block dimension".into()));
        }
    }
    let mut rows: Vec<SparseRow> = vec![SparseRow::default(); m];
    let mut objective = Objective { linear: Vec::new(), logdet_block };
    for line in &data_lines[4..] {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!("bad entry line `{line}`")));
        }
        let matno: usize = parts[0].parse().map_err(|_| Error::Parse("bad matno".into()))?;
        let blkno: usize = parts[1].parse().map_err(|_| Error::Parse("bad blkno".into()))?;
        let i: usize = parts[2].parse().map_err(|_| Error::Parse("bad row index".into()))?;
        let j: usize = parts[3].parse().map_err(|_| Error::Parse("bad col index".into()))?;
        let value: f64 = parts[4].parse().map_err(|_| Error::Parse("bad value".into()))?;
        if matno > m || blkno == 0 || blkno > nblock || i == 0 || j == 0 || i > j {
            return Err(Error::Parse(format!("entry out of range: `{line}`")));
        }
        let (start, is_slack) = first_block[blkno - 1];
        let entry = if is_slack {
            if i != j {
                return Err(Error::Parse("off-diagonal entry in a diagonal block".into()));
            }
            Entry::new(start + i - 1, 0, 0, value)
        } else {
            Entry::new(start, i - 1, j - 1, value)
        };
        if matno == 0 {
            objective.linear.push(entry);
        } else {
            rows[matno - 1].entries.push(entry);
        }
    }
    // Undo the unit-weight linearization on the designated block.
    if let Some(d) = objective.logdet_block {
        if d >= prob.blocks.len() {
            return Err(Error::Parse("logdet-block out of range".into()));
        }
        let dim = prob.blocks[d].dim;
        for i in 0..dim {
            match objective
                .linear
                .iter_mut()
                .find(|e| e.block == d && e.row == i && e.col == i)
            {
                Some(e) => e.value += 1.0,
                None => objective.linear.push(Entry::new(d, i, i, 1.0)),
            }
        }
        objective.linear.retain(|e| e.value != 0.0);
    }
    prob.rows = rows;
    prob.rhs = rhs;
    prob.objective = objective;
    prob.validate()?;
    Ok(prob)
}
