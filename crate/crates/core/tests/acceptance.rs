mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num::BigRational;
use qgraph::frequency::{recover_by_recurrence, recover_cosine_params, split_components, FrequencyTable, Method, RecurrenceOptions};
use qgraph::graph::{biconnected_blocks, fundamental_cycle_basis, is_planar, spanning_tree_count, Cycle};
use qgraph::homology::{albanese_gram_direct, LengthTable};
use qgraph::io::fixtures;
use qgraph::reconstruct::{albanese_gram, complexity, cycle_generator_sets, full_pipeline, prepare_table, reconstruct_graph};
use qgraph::spectrum::{circle_closed_form, eigen_wavenumbers, zero_multiplicity, FluxForm};
use qgraph::trace::{coefficient_signal, enumerate_orbits, trace_check, FluxRay, ORBIT_CAP};
use qgraph::{HomologyClass, MetricGraph, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPECTRUM_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-2;
const COSINE_TOL: f64 = 1e-8;
const FREQUENCY_TOL: f64 = 1e-8;
const FLOAT_LENGTH_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Outcome {
    if ok {
        Ok(msg.into())
    } else {
        Err(msg.into())
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn first_wavenumbers(g: &MetricGraph, flux: &FluxForm, k_max: f64, count: usize) -> Vec<f64> {
    let mut ks = eigen_wavenumbers(g, flux, k_max, None, 1e-12).unwrap().expanded();
    ks.truncate(count);
    ks
}

fn spectral_solver_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let t0 = Instant::now();
    let interval = fixtures::interval(Real::float(PI));
    let ks = first_wavenumbers(&interval, &FluxForm::zero(&interval), 20.5, 20);
    let expected: Vec<f64> = (0..20).map(|n| n as f64).collect();
    worst = worst.max(max_gap(&ks, &expected));
    slowest = slowest.max(t0.elapsed().as_secs_f64());
    let circle = fixtures::circle(Real::float(2.0 * PI));
    for t in [0.0, 0.25, 1.0 / 2f64.sqrt()] {
        let t0 = Instant::now();
        let flux = FluxForm::from_phases(vec![2.0 * PI * t]);
        let ks = first_wavenumbers(&circle, &flux, 12.0, 20);
        worst = worst.max(max_gap(&ks, &circle_closed_form(2.0 * PI, t, 20)));
        slowest = slowest.max(t0.elapsed().as_secs_f64());
    }
    check(
        worst < SPECTRUM_TOL && slowest < 5.0,
        format!("max error {worst:.2e} (tol {SPECTRUM_TOL:e}), slowest case {slowest:.2}s (limit 5s)"),
    )
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let k_max = 4.3;
    for g in [fixtures::interval(Real::float(PI)), fixtures::star(&[1, 1, 1])] {
        let base = eigen_wavenumbers(&g, &FluxForm::zero(&g), k_max, None, 1e-12).unwrap().expanded();
        for _ in 0..5 {
            let values: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ks = eigen_wavenumbers(&g, &FluxForm::from_edge_values(&g, &values), k_max, None, 1e-12).unwrap().expanded();
            worst = worst.max(max_gap(&ks, &base));
        }
    }
    let mut shifted = 0;
    for (_, g) in fixtures::catalogue() {
        let phases: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let moved: Vec<f64> = phases.iter().map(|p| p + 2.0 * PI * rng.gen_range(-3..=3) as f64).collect();
        let a = eigen_wavenumbers(&g, &FluxForm::from_phases(phases), k_max, None, 1e-12).unwrap().expanded();
        let b = eigen_wavenumbers(&g, &FluxForm::from_phases(moved), k_max, None, 1e-12).unwrap().expanded();
        worst = worst.max(max_gap(&a, &b));
        shifted += 1;
    }
    check(
        worst < SPECTRUM_TOL,
        format!("trees x 5 fluxes and {shifted} fixtures under integer shifts, max deviation {worst:.2e} (tol {SPECTRUM_TOL:e})"),
    )
}

fn trace_identity() -> Outcome {
    let probes: Vec<f64> = (0..=16).map(|i| 2.0 + 0.5 * i as f64).collect();
    let interval = fixtures::interval(Real::float(PI));
    let circle = fixtures::circle(Real::float(2.0 * PI));
    let k4 = fixtures::k4_unit().to_float();
    let cases = [
        ("interval", FluxForm::zero(&interval), &interval),
        ("circle", FluxForm::from_phases(vec![2.0 * PI * 0.25]), &circle),
        ("k4", FluxForm::zero(&k4), &k4),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, flux, g) in cases {
        let t0 = Instant::now();
        let c = trace_check(g, &flux, 0.5, &probes).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        ok &= c.max_deviation < TRACE_TOL && secs < 60.0;
        parts.push(format!("{name} {:.1e} in {secs:.2}s", c.max_deviation));
    }
    check(ok, format!("{} (tol {TRACE_TOL:e}, limit 60s)", parts.join(", ")))
}

fn length_oracle() -> Outcome {
    let mut graphs = vec![
        fixtures::theta(&[1, 2, 3]),
        fixtures::figure_eight(2, 3),
        fixtures::k4_unit(),
        fixtures::k4_with_lengths(&[1, 2, 3, 3, 2, 1]),
    ];
    graphs.extend(common::small_graphs(60, 6, 4, 4));
    let mut checked = 0;
    let mut bad = Vec::new();
    for g in &graphs {
        let (n, b) = common::compare_length_oracle(g, 2);
        checked += n;
        bad.extend(b);
    }
    let first = bad.first().map_or(String::new(), |b| format!(", first: {b}"));
    check(bad.is_empty(), format!("{} graphs with at most 6 edges, {checked} classes with |h_i| <= 2, {} mismatches{first}", graphs.len(), bad.len()))
}

fn cosine_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for seed in 0..100 {
        let s = common::random_cosine_sum(seed);
        match recover_by_recurrence(&s, &RecurrenceOptions::default()) {
            Ok(p) => match common::cosine_error(&s, &p) {
                Some(e) => worst = worst.max(e),
                None => failed += 1,
            },
            Err(_) => failed += 1,
        }
    }
    // exact mode on forward signals along a rational ray
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut exact_terms = 0;
    let mut exact_ok = true;
    for (g, ray, l_max) in [
        (fixtures::k4_unit(), FluxRay::from_rationals(vec![q(7, 10), q(11, 10), q(13, 10)]), 5),
        (fixtures::figure_eight(2, 3), FluxRay::from_rationals(vec![q(1, 1), q(17, 12)]), 7),
    ] {
        let basis = qgraph::graph::forest_cycle_basis(&g);
        let orbits = enumerate_orbits(&g, &Real::int(l_max), ORBIT_CAP).unwrap();
        for group in &orbits.groups {
            let signal = coefficient_signal(&g, &basis, group, &ray);
            let got = recover_cosine_params(&signal, Method::Derivative).unwrap();
            let mut want: Vec<(BigRational, BigRational)> = Vec::new();
            for t in &signal.terms {
                let m = t.mu_exact.clone().unwrap();
                let nu = t.nu.as_exact().unwrap().clone();
                match want.iter_mut().find(|(x, _)| *x == m) {
                    Some(w) => w.1 += nu,
                    None => want.push((m, nu)),
                }
            }
            want.retain(|(m, nu)| *m != q(0, 1) && *nu != q(0, 1));
            want.sort();
            let mut have: Vec<(BigRational, BigRational)> = got
                .terms
                .iter()
                .map(|t| (t.mu_squared.clone().unwrap(), t.nu_exact.clone().unwrap()))
                .collect();
            have.sort();
            let want_sq: Vec<(BigRational, BigRational)> = want.iter().map(|(m, n)| (m * m, n.clone())).collect();
            exact_ok &= have == want_sq;
            exact_terms += have.len();
        }
    }
    check(
        failed == 0 && worst < COSINE_TOL && exact_ok,
        format!(
            "recurrence: 100 trials, {failed} failed, max error {worst:.2e} (tol {COSINE_TOL:e}); derivative: {exact_terms} terms exact: {exact_ok}"
        ),
    )
}

fn frequency_pipeline() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g) in [
        ("theta", fixtures::theta(&[1, 2, 3])),
        ("figure8", fixtures::figure_eight(2, 3)),
        ("k4", fixtures::k4_unit()),
    ] {
        let l = Real::int(8);
        let ray = FluxRay::sqrt_primes(g.homology_rank());
        let oracle = FrequencyTable::from_oracle(Arc::new(LengthTable::new(g.clone())), &ray, &l).unwrap();
        let spectral = FrequencyTable::from_signals(&g, &ray, &l, Method::Recurrence).unwrap();
        let mut same = oracle.rows().len() == spectral.rows().len() && spectral.rank() == oracle.rank();
        for r in oracle.rows() {
            let hit = spectral.rows().iter().find(|s| (s.frequency - r.frequency).abs() < FREQUENCY_TOL);
            same &= hit.is_some_and(|s| s.length == r.length && s.length.is_exact());
        }
        ok &= same;
        parts.push(format!("{name} {} rows {}", oracle.rows().len(), if same { "equal" } else { "differ" }));
    }
    check(ok, format!("{} (frequency tol {FREQUENCY_TOL:e}, lengths exact)", parts.join(", ")))
}

fn albanese() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in [
        ("theta", fixtures::theta(&[1, 2, 3])),
        ("figure8", fixtures::figure_eight(2, 3)),
        ("k4", fixtures::k4_unit()),
        ("k4-random", fixtures::with_random_rational_lengths(&fixtures::k4_unit(), 3)),
    ] {
        let lengths = LengthTable::new(g.clone());
        let start = FrequencyTable::oracle_for(&g, &g.total_length()).unwrap();
        let (table, cap) = prepare_table(&start).unwrap();
        let sets = cycle_generator_sets(&table, &cap, usize::MAX).unwrap();
        let mut dets = Vec::new();
        let mut matches = true;
        for set in &sets {
            let gram = albanese_gram(&table, set).unwrap();
            let cycles: Vec<Cycle> = set
                .iter()
                .map(|c| {
                    let mut h = vec![0i64; lengths.rank()];
                    for (k, b) in c.coords().iter().zip(table.basis_classes()) {
                        for (x, y) in h.iter_mut().zip(b.coords()) {
                            *x += k * y;
                        }
                    }
                    let orbit = lengths.minimal_orbit(&HomologyClass(h)).unwrap();
                    Cycle::new(&g, orbit.witnesses[0].clone()).unwrap()
                })
                .collect();
            matches &= albanese_gram_direct(&g, &cycles).unwrap() == gram.matrix;
            dets.push(gram.determinant());
        }
        let invariant = dets.windows(2).all(|w| w[0] == w[1]);
        ok &= matches && invariant && !sets.is_empty();
        parts.push(format!("{name} {} bases det {}", sets.len(), dets.first().map_or("-".into(), |d| d.to_string())));
    }
    check(ok, format!("{} (exact)", parts.join(", ")))
}

fn complexity_counts() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g, expected) in [
        ("k4", fixtures::k4_unit(), 16),
        ("theta", fixtures::theta(&[1, 1, 1]), 3),
        ("cube", fixtures::cube_unit(), 384),
    ] {
        let start = FrequencyTable::oracle_for(&g, &Real::int(3)).unwrap();
        let (table, cap) = prepare_table(&start).unwrap();
        let set = cycle_generator_sets(&table, &cap, 1).unwrap().remove(0);
        let det = complexity(&albanese_gram(&table, &set).unwrap()).determinant;
        let trees = spanning_tree_count(&g);
        ok &= det == Real::int(expected) && trees == expected.into();
        parts.push(format!("{name} det {det} trees {trees}"));
    }
    check(ok, format!("{} (exact)", parts.join(", ")))
}

fn block_structure() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in [
        ("two-block", fixtures::two_block_chain()),
        ("three-block", fixtures::three_block_chain()),
        ("figure8", fixtures::figure_eight(2, 3)),
    ] {
        let report = full_pipeline(&qgraph::reconstruct::oracle_table(&g).unwrap()).unwrap();
        let expected = biconnected_blocks(&g);
        let sorted = |t: &qgraph::graph::BlockTree| {
            let mut l: Vec<Real> = t.links.iter().map(|x| x.2.clone()).collect();
            l.sort_by(|a, b| a.total_cmp(b));
            l
        };
        let exact = report.blocks.tree.links.iter().all(|l| l.2.is_exact());
        let same = report.blocks.tree.is_isomorphic(&expected) && exact && sorted(&report.blocks.tree) == sorted(&expected);
        ok &= same;
        parts.push(format!("{name} {}", report.blocks.tree.canonical_form()));
    }
    check(ok, format!("{} (exact distances)", parts.join(", ")))
}

fn planarity() -> Outcome {
    let mut ok = true;
    let mut slowest: (f64, &str) = (0.0, "");
    let mut verdicts = Vec::new();
    for (name, g) in fixtures::catalogue() {
        let t0 = Instant::now();
        let report = reconstruct_graph(&g).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        let recovered = report.reports.iter().all(|r| r.report.planarity.planar);
        let truth = is_planar(&g).unwrap();
        ok &= recovered == truth && secs < 30.0;
        if secs > slowest.0 {
            slowest = (secs, name);
        }
        if !truth {
            verdicts.push(format!("{name} nonplanar"));
        }
    }
    check(
        ok,
        format!(
            "{} fixtures agree, {}; slowest {} {:.2}s (limit 30s)",
            fixtures::catalogue().len(),
            verdicts.join(", "),
            slowest.1,
            slowest.0
        ),
    )
}

fn full_roundtrip() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in [("k4", fixtures::k4_unit()), ("prism", fixtures::prism_unit()), ("cube", fixtures::cube_unit())] {
        for seed in [1u64, 2, 3] {
            let exact = fixtures::with_random_rational_lengths(&g, seed);
            let r = reconstruct_graph(&exact).unwrap();
            let hit = r.reports.len() == 1 && r.reports[0].matched == Some((true, Some(Real::zero())));
            let float = fixtures::with_random_float_lengths(&g, seed);
            let r = reconstruct_graph(&float).unwrap();
            let err = match r.reports.first().and_then(|c| c.matched.clone()) {
                Some((true, Some(e))) => e.to_f64(),
                _ => f64::INFINITY,
            };
            ok &= hit && err < FLOAT_LENGTH_TOL;
            if seed == 1 {
                parts.push(format!("{name} exact {hit} float {err:.1e}"));
            }
        }
    }
    let theta = reconstruct_graph(&fixtures::theta(&[1, 2, 3])).unwrap();
    let tri = theta.reports.first().is_some_and(|c| {
        c.matched == Some((true, Some(Real::zero()))) && c.report.duals.first().is_some_and(|d| d.vertex_count() == 3)
    });
    ok &= tri;
    parts.push(format!("theta via triangle {tri}"));
    check(ok, format!("{} over seeds 1-3 (float tol {FLOAT_LENGTH_TOL:e})", parts.join(", ")))
}

fn disconnected() -> Outcome {
    let f8 = fixtures::figure_eight(2, 3);
    let theta = fixtures::theta(&[1, 2, 3]);
    let g = f8.disjoint_union(&theta);
    let zm = zero_multiplicity(&g, &FluxForm::zero(&g));
    let table = qgraph::reconstruct::oracle_table(&g).unwrap();
    let split = split_components(&table, zm).unwrap();
    let mut f8_ok = false;
    let mut theta_ok = false;
    for t in &split.tables {
        let report = full_pipeline(t).unwrap();
        match &report.reconstructed {
            Some(rec) => theta_ok = qgraph::graph::find_isomorphism(&theta, rec, Some(0.0)).is_some(),
            None => {
                // two loops: the graph is fixed by its block tree and Gram matrix
                let basis = fundamental_cycle_basis(&f8).unwrap();
                let direct = albanese_gram_direct(&f8, basis.cycles()).unwrap();
                let det = qgraph::real::determinant(&direct);
                f8_ok = report.blocks.tree.is_isomorphic(&biconnected_blocks(&f8)) && report.complexity.determinant == det;
            }
        }
    }
    check(
        zm == 2 && split.tables.len() == 2 && f8_ok && theta_ok,
        format!(
            "zero multiplicity {zm}, {} tables; figure-8 block tree and Gram match: {f8_ok}; theta isomorphic: {theta_ok}",
            split.tables.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("spectral solver vs closed forms", spectral_solver_closed_forms),
        ("gauge and flux invariance", gauge_invariance),
        ("smoothed trace identity", trace_identity),
        ("length oracle vs exhaustive walks", length_oracle),
        ("cosine recovery", cosine_recovery),
        ("frequency table fidelity", frequency_pipeline),
        ("Albanese Gram matrix", albanese),
        ("complexity", complexity_counts),
        ("block structure", block_structure),
        ("planarity", planarity),
        ("dual and full roundtrip", full_roundtrip),
        ("disconnected graphs", disconnected),
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL {name}: {msg} [{secs:.2}s]", i + 1);
                failures.push(i + 1);
            }
        }
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if !failures.is_empty() {
        println!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
