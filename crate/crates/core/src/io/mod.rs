//! Text formats: graph files and tab-separated tables.
//!
//! A graph file has one declaration per line:
//!
//! ```text
//! # comment
//! vertex a
//! edge e1 a b 3/2
//! ```
//!
//! Lengths are integers, decimals or `p/q`.

pub mod fixtures;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::real::Real;

/// Parses graph text. Decimal lengths become exact rationals when
/// `exact_decimals` is set.
pub fn parse_graph_str(text: &str, exact_decimals: bool) -> Result<MetricGraph> {
    let mut g = MetricGraph::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["vertex", id] => {
                if g.vertex_index(id).is_some() {
                    return Err(err(format!("duplicate vertex {id}")));
                }
                g.add_vertex(*id);
            }
            ["edge", id, u, v, length] => {
                if g.edges().iter().any(|e| e.label == *id) {
                    return Err(err(format!("duplicate edge {id}")));
                }
                let tail = g
                    .vertex_index(u)
                    .ok_or_else(|| err(format!("unknown vertex {u}")))?;
                let head = g
                    .vertex_index(v)
                    .ok_or_else(|| err(format!("unknown vertex {v}")))?;
                let length = Real::parse(length, exact_decimals).map_err(|e| err(e.to_string()))?;
                g.add_labeled_edge(*id, tail, head, length);
            }
            _ => {
                return Err(err(format!(
                    "expected `vertex <id>` or `edge <id> <u> <v> <length>`, got {line:?}"
                )))
            }
        }
    }
    Ok(g)
}

pub fn parse_graph(path: &Path, exact_decimals: bool) -> Result<MetricGraph> {
    parse_graph_str(&fs::read_to_string(path)?, exact_decimals)
}

/// Graph text in declaration order. Float lengths are written so that
/// they parse back to the same value.
pub fn serialize_graph(g: &MetricGraph) -> String {
    let mut s = String::new();
    for v in g.vertex_labels() {
        writeln!(s, "vertex {v}").expect("writing to a String");
    }
    for e in g.edges() {
        writeln!(
            s,
            "edge {} {} {} {}",
            e.label,
            g.vertex_label(e.tail),
            g.vertex_label(e.head),
            format_real(&e.length)
        )
        .expect("writing to a String");
    }
    s
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.16e}")
}

/// Exact values as `p/q`, floats with 17 significant digits.
pub fn format_real(x: &Real) -> String {
    match x {
        Real::Exact(_) => x.to_string(),
        Real::Float(f) => format_f64(*f),
    }
}

/// Tab-separated text with a one-line header.
pub fn table_text<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut s = header.join("\t");
    s.push('\n');
    for row in rows {
        s.push_str(&row.as_ref().join("\t"));
        s.push('\n');
    }
    s
}

pub fn emit_table<R: AsRef<[String]>>(header: &[&str], rows: &[R], path: &Path) -> Result<()> {
    fs::write(path, table_text(header, rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_k4_file() {
        let text = "# K4\nvertex a\nvertex b\nvertex c\nvertex d\n\
                    edge 1 a b 1\nedge 2 a c 1\nedge 3 a d 1\nedge 4 b c 1\nedge 5 b d 1\nedge 6 c d 1\n";
        let g = parse_graph_str(text, false).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 6));
        assert!(g.validate(false).is_valid());
    }

    #[test]
    fn negative_length_fails_validation() {
        let g = parse_graph_str("vertex a\nvertex b\nedge 1 a b -1\n", false).unwrap();
        assert!(g.validate(true).into_result().is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse_graph_str("vertex a\n\nedge 1 a z 1\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_graph_str("vertex a\nedge 1 a a x\n", false),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rational_lengths_preserved() {
        let g = parse_graph_str(
            "vertex a\nvertex b\nedge x a b 1/3\nedge y a b 2/3\nedge z a b 1\n",
            false,
        )
        .unwrap();
        assert_eq!(g.length(0), &Real::ratio(1, 3));
        assert!(g.is_exact());
    }

    #[test]
    fn round_trip_fixtures() {
        for (name, g) in fixtures::catalogue() {
            let back = parse_graph_str(&serialize_graph(&g), false).unwrap();
            assert_eq!(back, g, "{name}");
        }
        let g = fixtures::with_random_float_lengths(&fixtures::k4_unit(), 3);
        assert_eq!(parse_graph_str(&serialize_graph(&g), false).unwrap(), g);
    }

    #[test]
    fn empty_table_is_header_only() {
        let rows: Vec<Vec<String>> = Vec::new();
        assert_eq!(
            table_text(&["k", "multiplicity"], &rows),
            "k\tmultiplicity\n"
        );
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
