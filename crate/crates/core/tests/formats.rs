mod common;

use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use qgraph::frequency::{FrequencyTable, Method};
use qgraph::io::{fixtures, parse_graph, parse_graph_str, serialize_graph};
use qgraph::trace::FluxRay;
use qgraph::{MetricGraph, Real};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn qgraph(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn shipped_files_match_catalogue() {
    for (name, g) in fixtures::catalogue() {
        let path = fixture_dir().join(format!("{name}.qg"));
        let parsed = parse_graph(&path, false).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed, g, "{name}");
        let allow = fixtures::DEGREE_TWO.contains(&name) || name == "interval";
        assert!(parsed.validate(allow).is_valid(), "{name}");
    }
}

#[test]
fn oracle_and_spectral_tables_survive_text() {
    let g = fixtures::theta(&[1, 2, 3]);
    let oracle = FrequencyTable::oracle_for(&g, &Real::int(8)).unwrap();
    let spectral = FrequencyTable::from_signals(&g, &FluxRay::sqrt_primes(2), &Real::int(8), Method::Recurrence).unwrap();
    for t in [oracle, spectral] {
        let text = t.to_text();
        let back = FrequencyTable::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.rows().len(), t.rows().len());
        for (a, b) in back.rows().iter().zip(t.rows()) {
            assert_eq!(a.coords, b.coords);
            assert_eq!(a.frequency.to_bits(), b.frequency.to_bits());
            assert_eq!(a.length, b.length);
        }
    }
}

fn arb_graph() -> impl Strategy<Value = MetricGraph> {
    (1usize..6, proptest::collection::vec((0usize..6, 0usize..6, 1i64..50, 1i64..9, any::<bool>()), 0..10)).prop_map(
        |(n, edges)| {
            let mut g = MetricGraph::with_vertices(n);
            for (a, b, p, q, exact) in edges {
                let len = if exact { Real::ratio(p, q) } else { Real::float(p as f64 / q as f64 + 1e-3) };
                g.add_edge(a % n, b % n, len);
            }
            g
        },
    )
}

proptest! {
    #![proptest_config(common::proptest_config(64))]

    #[test]
    fn graph_text_round_trip(g in arb_graph()) {
        let text = serialize_graph(&g);
        let back = parse_graph_str(&text, false).unwrap();
        prop_assert_eq!(serialize_graph(&back), text);
        prop_assert_eq!(back, g);
    }
}

#[test]
fn cli_exit_codes() {
    let k4 = fixture_dir().join("k4.qg");
    let k4 = k4.to_str().unwrap();
    assert_eq!(qgraph(&["validate", k4]).0, 0);
    assert_eq!(qgraph(&["no-such-command"]).0, 2);
    assert_eq!(qgraph(&["spectrum", k4, "--kmax", "2", "--bogus"]).0, 2);
    assert_eq!(qgraph(&["spectrum", "/nonexistent.qg", "--kmax", "2"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qg");
    std::fs::write(&bad, "vertex a\nvertex b\nedge 1 a b -1\n").unwrap();
    assert_eq!(qgraph(&["validate", bad.to_str().unwrap()]).0, 1);
}

#[test]
fn cli_interval_spectrum_has_ten_rows() {
    let path = fixture_dir().join("interval.qg");
    let (code, out) = qgraph(&["--allow-degree-two", "spectrum", path.to_str().unwrap(), "--kmax", "10.5"]);
    assert_eq!(code, 0);
    let ks: Vec<f64> = out.lines().skip(1).map(|l| l.split('\t').next().unwrap().parse().unwrap()).collect();
    // k = 0 plus 1..=10
    assert_eq!(ks.len(), 11);
    for (n, k) in ks.iter().enumerate() {
        assert!((k - n as f64).abs() < 1e-8);
    }
}

#[test]
fn cli_roundtrip_is_deterministic_and_exact() {
    let path = fixture_dir().join("k4.qg");
    let args = ["--rational", "roundtrip", path.to_str().unwrap(), "--seed", "7"];
    let (code, first) = qgraph(&args);
    assert_eq!(code, 0);
    assert!(first.contains("isomorphic, max error 0"), "{first}");
    assert_eq!(qgraph(&args).1, first);
}

#[test]
fn cli_reconstructs_theta_from_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("theta.freq");
    let theta = fixture_dir().join("theta.qg");
    let (code, _) = qgraph(&[
        "--rational", "recover", theta.to_str().unwrap(), "--in", "oracle", "--lmax", "12", "-o", table.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, out) = qgraph(&["reconstruct", "--table", table.to_str().unwrap()]);
    assert_eq!(code, 0);
    let g = parse_graph_str(&out, false).unwrap();
    let iso = qgraph::graph::find_isomorphism(&fixtures::theta(&[1, 2, 3]), &g, Some(0.0));
    assert!(iso.is_some(), "{out}");
}
