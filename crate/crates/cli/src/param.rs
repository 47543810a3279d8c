//! Parameter paths on the command line use 1-based indices (`K[2]`,
//! `alpha[2][1]`); this is the only place where the 1-based/0-based
//! boundary is crossed.

use anyhow::{bail, Result};
use lvniche_core::ParamPath;

pub fn parse_param(text: &str) -> Result<ParamPath> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("K[") {
        let Some(idx) = rest.strip_suffix(']') else {
            bail!("malformed parameter {text:?}: expected K[i]");
        };
        return Ok(ParamPath::Capacity(parse_index(idx)?));
    }
    if let Some(rest) = text.strip_prefix("alpha[") {
        let Some(body) = rest.strip_suffix(']') else {
            bail!("malformed parameter {text:?}: expected alpha[i][j]");
        };
        let Some((row, col)) = body.split_once("][") else {
            bail!("malformed parameter {text:?}: expected alpha[i][j]");
        };
        return Ok(ParamPath::Alpha {
            row: parse_index(row)?,
            col: parse_index(col)?,
        });
    }
    bail!("unknown parameter {text:?}: expected K[i] or alpha[i][j] (1-based indices)");
}

fn parse_index(text: &str) -> Result<usize> {
    let value: usize = text
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("invalid index {text:?}"))?;
    if value == 0 {
        bail!("indices are 1-based; 0 is not a valid index");
    }
    Ok(value - 1)
}

/// Renders a path back in the 1-based command-line notation.
pub fn format_param(path: ParamPath) -> String {
    match path {
        ParamPath::Capacity(i) => format!("K[{}]", i + 1),
        ParamPath::Alpha { row, col } => format!("alpha[{}][{}]", row + 1, col + 1),
    }
}
