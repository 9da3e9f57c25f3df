use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qgraph::frequency::{FrequencyTable, Method};
use qgraph::graph::forest_cycle_basis;
use qgraph::io::{format_f64, format_real, parse_graph, serialize_graph, table_text};
use qgraph::reconstruct::{full_pipeline, reconstruct_graph};
use qgraph::spectrum::{eigen_wavenumbers, FluxForm};
use qgraph::trace::{coefficient_signals, enumerate_orbits, trace_check, FluxRay, ORBIT_CAP};
use qgraph::{Error, MetricGraph, Real, Result};

#[derive(Parser)]
#[command(name = "qgraph", version, about = "Magnetic quantum graphs and reconstruction from orbit lengths")]
struct Cli {
    /// Exact rational arithmetic: decimal lengths parse exactly, random
    /// lengths are rational and rays may be rational.
    #[arg(long, global = true)]
    rational: bool,
    /// Accept vertices of degree two.
    #[arg(long, global = true)]
    allow_degree_two: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and print its summary.
    Validate { graph: PathBuf },
    /// Wavenumbers up to `kmax` with multiplicities.
    Spectrum {
        graph: PathBuf,
        /// Comma-separated flux values per edge; zero when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        flux: Vec<f64>,
        #[arg(long)]
        kmax: f64,
    },
    /// Periodic orbits up to length `lmax`.
    Orbits {
        graph: PathBuf,
        #[arg(long)]
        lmax: String,
        #[arg(long, default_value_t = ORBIT_CAP)]
        cap: usize,
    },
    /// Both sides of the smoothed trace identity.
    TraceCheck {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        flux: Vec<f64>,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 2.0)]
        from: f64,
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 17)]
        probes: usize,
    },
    /// Samples of the coefficient signals along a flux ray.
    Signals {
        graph: PathBuf,
        /// Comma-separated basis-cycle fluxes; square roots of primes when
        /// omitted.
        #[arg(long, value_delimiter = ',')]
        ray: Vec<String>,
        #[arg(long)]
        lmax: String,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Frequency table from signals or from the length oracle.
    Recover {
        graph: PathBuf,
        #[arg(long = "in", value_enum, default_value_t = Source::Signals)]
        source: Source,
        #[arg(long)]
        lmax: String,
        #[arg(long, value_delimiter = ',')]
        ray: Vec<String>,
        /// Defaults to derivatives for exact rays, the recurrence otherwise.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Inverse pipeline on a frequency table file.
    Reconstruct {
        #[arg(long)]
        table: PathBuf,
    },
    /// Random lengths, forward table, reconstruction and comparison.
    Roundtrip {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Signals,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Derivative,
    Recurrence,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(cli: &Cli, path: &Path) -> Result<MetricGraph> {
    let g = parse_graph(path, cli.rational)?;
    g.validate(cli.allow_degree_two).into_result()?;
    Ok(if cli.rational { g } else { g.to_float() })
}

fn real_arg(cli: &Cli, s: &str) -> Result<Real> {
    Real::parse(s, cli.rational).map_err(|e| Error::Parse { line: 0, message: e.to_string() })
}

fn flux_form(g: &MetricGraph, values: &[f64]) -> Result<FluxForm> {
    if values.is_empty() {
        return Ok(FluxForm::zero(g));
    }
    if values.len() != g.edge_count() {
        return Err(Error::WrongRank { expected: g.edge_count(), got: values.len() });
    }
    Ok(FluxForm::from_edge_values(g, values))
}

fn ray_arg(cli: &Cli, values: &[String], rank: usize) -> Result<FluxRay> {
    if values.is_empty() {
        return Ok(FluxRay::sqrt_primes(rank));
    }
    if values.len() != rank {
        return Err(Error::WrongRank { expected: rank, got: values.len() });
    }
    let parsed: Vec<Real> = values.iter().map(|v| real_arg(cli, v)).collect::<Result<_>>()?;
    if parsed.iter().all(Real::is_exact) {
        Ok(FluxRay::from_rationals(parsed.iter().filter_map(|r| r.as_exact().cloned()).collect()))
    } else {
        Ok(FluxRay::from_f64(parsed.iter().map(Real::to_f64).collect()))
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Validate { graph } => {
            let g = parse_graph(graph, cli.rational)?;
            let report = g.validate(cli.allow_degree_two);
            let ok = report.is_valid();
            let mut s = format!(
                "vertices {}\nedges {}\ncomponents {}\nhomology rank {}\ntotal length {}\n",
                g.vertex_count(),
                g.edge_count(),
                g.components().1,
                g.homology_rank(),
                format_real(&g.total_length())
            );
            match report.into_result() {
                Ok(_) => s.push_str("valid\n"),
                Err(e) => s.push_str(&format!("invalid: {e}\n")),
            }
            emit(cli, &s)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Spectrum { graph, flux, kmax } => {
            let g = load(cli, graph)?;
            let slice = eigen_wavenumbers(&g, &flux_form(&g, flux)?, *kmax, None, 1e-12)?;
            if let Some(w) = &slice.weyl_warning {
                eprintln!("warning: {w}");
            }
            let rows: Vec<Vec<String>> =
                slice.wavenumbers.iter().map(|(k, m)| vec![format_f64(*k), m.to_string()]).collect();
            emit(cli, &table_text(&["k", "multiplicity"], &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Orbits { graph, lmax, cap } => {
            let g = load(cli, graph)?;
            let set = enumerate_orbits(&g, &real_arg(cli, lmax)?, *cap)?;
            let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
            let rows: Vec<Vec<String>> = set
                .iter()
                .map(|p| {
                    vec![
                        format_real(&p.length),
                        format_real(&p.primitive_length),
                        p.repetitions.to_string(),
                        join(&mut p.chain.iter().map(|c| c.to_string())),
                        join(&mut p.bonds.iter().map(|b| b.to_string())),
                        format_real(&p.weight(&g)),
                    ]
                })
                .collect();
            emit(cli, &table_text(&["length", "primitive", "repetitions", "chain", "bonds", "weight"], &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TraceCheck { graph, flux, sigma, from, to, probes } => {
            let g = load(cli, graph)?.to_float();
            let n = (*probes).max(2);
            let points: Vec<f64> = (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect();
            let check = trace_check(&g, &flux_form(&g, flux)?, *sigma, &points)?;
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| vec![format_f64(check.probes[i]), format_f64(check.spectral[i]), format_f64(check.geometric[i])])
                .collect();
            emit(cli, &table_text(&["lambda0", "spectral", "geometric"], &rows))?;
            eprintln!("max deviation {:e}", check.max_deviation);
            Ok(ExitCode::SUCCESS)
        }
        Command::Signals { graph, ray, lmax, step, samples } => {
            let g = load(cli, graph)?;
            let basis = forest_cycle_basis(&g);
            let ray = ray_arg(cli, ray, basis.rank())?;
            let orbits = enumerate_orbits(&g, &real_arg(cli, lmax)?, ORBIT_CAP)?;
            let mut rows = Vec::new();
            for s in coefficient_signals(&g, &basis, &orbits, &ray) {
                for (i, v) in s.samples(*step, *samples).into_iter().enumerate() {
                    rows.push(vec![format_real(&s.length), format_f64(i as f64 * step), format_f64(v)]);
                }
            }
            emit(cli, &table_text(&["length", "t", "value"], &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Recover { graph, source, lmax, ray, method } => {
            let g = load(cli, graph)?;
            let l = real_arg(cli, lmax)?;
            let ray = ray_arg(cli, ray, g.homology_rank())?;
            let table = match source {
                Source::Oracle => FrequencyTable::from_oracle(
                    std::sync::Arc::new(qgraph::homology::LengthTable::new(g.clone())),
                    &ray,
                    &l,
                )?,
                Source::Signals => {
                    let method = match method {
                        Some(MethodArg::Derivative) => Method::Derivative,
                        Some(MethodArg::Recurrence) => Method::Recurrence,
                        None if ray.exact.is_some() => Method::Derivative,
                        None => Method::Recurrence,
                    };
                    FrequencyTable::from_signals(&g, &ray, &l, method)?
                }
            };
            emit(cli, &table.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reconstruct { table } => {
            let t = FrequencyTable::read(table)?;
            let report = full_pipeline(&t)?;
            let mut s: String = report.to_string().lines().map(|l| format!("# {l}\n")).collect();
            match &report.reconstructed {
                Some(g) => s.push_str(&serialize_graph(g)),
                None => s.push_str("# no graph reconstructed\n"),
            }
            emit(cli, &s)?;
            Ok(if report.reconstructed.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Roundtrip { graph, seed } => {
            let g = load(cli, graph)?;
            let g = if cli.rational {
                qgraph::io::fixtures::with_random_rational_lengths(&g, *seed)
            } else {
                qgraph::io::fixtures::with_random_float_lengths(&g, *seed)
            };
            let report = reconstruct_graph(&g)?;
            let mut s = format!("# input\n{}{report}", serialize_graph(&g));
            let mut failed = false;
            for (i, c) in report.reports.iter().enumerate() {
                let line = match &c.matched {
                    Some((true, err)) => {
                        format!("isomorphic, max error {}", err.as_ref().map_or("?".into(), format_real))
                    }
                    Some((false, _)) => {
                        failed = true;
                        "not isomorphic".into()
                    }
                    None => "not reconstructed".into(),
                };
                s.push_str(&format!("component {i}: {line}\n"));
            }
            emit(cli, &s)?;
            Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
    }
}
