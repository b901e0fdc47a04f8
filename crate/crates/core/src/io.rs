//! Plain-text formats for graphs and permutations.
//!
//! * Binary graph: first line `n`, then one `i j` pair per line (1-based, `i < j`).
//! * Weighted graph: first line `n`, then `n` lines of `n` comma-separated reals.
//! * Permutation: one line of `n` space-separated 1-based images. Cycle
//!   notation such as `(1 2)(3 4 5)` is accepted on input as well.

use crate::error::{Error, Result};
use crate::graph::{BinaryGraph, Permutation, WeightedGraph};
use crate::scalar::Scalar;
use std::fmt::Write as _;
use std::path::Path;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<usize> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing node count".into()))?;
    line.parse()
        .map_err(|_| Error::Parse(format!("line {no}: bad node count {line:?}")))
}

pub fn parse_binary_graph(text: &str) -> Result<BinaryGraph> {
    let mut lines = content_lines(text);
    let n = parse_header(&mut lines)?;
    let mut g = BinaryGraph::empty(n);
    for (no, line) in lines {
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {no}: bad edge {line:?}")))?;
        match nums[..] {
            [i, j] if 1 <= i && i < j && j <= n => g.insert(i - 1, j - 1),
            _ => return Err(Error::Parse(format!("line {no}: expected `i j` with 1 <= i < j <= {n}"))),
        }
    }
    Ok(g)
}

pub fn format_binary_graph(g: &BinaryGraph) -> String {
    let mut out = format!("{}\n", g.node_count());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

pub fn parse_weighted_graph<T: Scalar>(text: &str) -> Result<WeightedGraph<T>> {
    let mut lines = content_lines(text);
    let n = parse_header(&mut lines)?;
    let mut rows = Vec::with_capacity(n);
    for (no, line) in lines {
        let row: Vec<T> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map(T::lit))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {no}: bad weight row")))?;
        if row.len() != n {
            return Err(Error::Parse(format!("line {no}: expected {n} columns, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    WeightedGraph::from_matrix(&rows)
}

pub fn format_weighted_graph<T: Scalar>(g: &WeightedGraph<T>) -> String {
    let n = g.node_count();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:?}", g.get(i, j).to_f64_lossy())).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let line = content_lines(text)
        .map(|(_, l)| l)
        .next()
        .ok_or_else(|| Error::Parse("empty permutation".into()))?;
    if line.starts_with('(') {
        return Permutation::parse_cycles(line, None);
    }
    let images: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad permutation line {line:?}")))?;
    Permutation::from_one_based(&images)
}

pub fn format_permutation(p: &Permutation) -> String {
    format!("{}\n", p.to_one_based_string())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let g = BinaryGraph::from_edges(5, [(0, 4), (1, 2)]).unwrap();
        let text = format_binary_graph(&g);
        assert_eq!(text, "5\n1 5\n2 3\n");
        assert_eq!(parse_binary_graph(&text).unwrap(), g);
        assert!(parse_binary_graph("3\n2 1\n").is_err());
    }

    #[test]
    fn weighted_round_trip() {
        let g = WeightedGraph::<f64>::from_fn(3, |i, j| (i + 2 * j) as f64 * 0.25 - 0.1);
        let back: WeightedGraph<f64> = parse_weighted_graph(&format_weighted_graph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn permutation_formats() {
        let p = parse_permutation("2 1 4 3 6 7 8 5\n").unwrap();
        assert_eq!(p, parse_permutation("(12)(34)(5678)").unwrap());
        assert_eq!(format_permutation(&p), "2 1 4 3 6 7 8 5\n");
    }
}
