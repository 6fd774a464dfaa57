//! Textual sequence presentations used in CLI arguments.

use infsemi_core::limits::PeriodicSeq;
use infsemi_core::ordinal::Ordinal;
use infsemi_core::pseq::PiecewiseSeq;

/// Splits on top-level commas, respecting brackets inside element ids.
pub fn split_top_commas(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '{' | '[' | '<' => {
                depth += 1;
                cur.push(c);
            }
            ')' | '}' | ']' | '>' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses `LEN:ELEM,LEN:ELEM,...` into a piecewise-constant sequence.
pub fn parse_runs_seq(s: &str) -> Result<PiecewiseSeq<String>, String> {
    let mut runs = Vec::new();
    for part in split_top_commas(s) {
        let (len, elem) = part
            .split_once(':')
            .ok_or_else(|| format!("run '{}' is not LEN:ELEM", part))?;
        let len: Ordinal = len.parse().map_err(|e| format!("{}", e))?;
        runs.push((len, elem.trim().to_string()));
    }
    PiecewiseSeq::new(runs).map_err(|e| e.to_string())
}

/// Parses `a,b|c,d` into the ultimately periodic sequence with prefix
/// `a,b` and repeating period `c,d`. An empty period means a finite
/// sequence.
pub fn parse_periodic_seq(s: &str) -> Result<PeriodicSeq<String>, String> {
    let (prefix, period) = s
        .split_once('|')
        .ok_or_else(|| "periodic sequences are written prefix|period".to_string())?;
    let seq = PeriodicSeq {
        prefix: split_top_commas(prefix),
        period: split_top_commas(period),
    };
    if seq.prefix.is_empty() && seq.period.is_empty() {
        return Err("the sequence must be nonempty".to_string());
    }
    Ok(seq)
}
