//! Spectrum of the magnetic Kirchhoff Laplacian through the bond
//! scattering matrix.
//!
//! A wavenumber `k > 0` is an eigenvalue (as `k^2`) exactly when
//! `I - U(k)` is singular, with
//! `U(k)[b', b] = [o(b') = t(b)] (2 / deg t(b) - [b' = b̄]) exp(i(k L_b + θ_b))`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::graph::{forest_cycle_basis, CycleBasis, MetricGraph};
use crate::homology::HomologyClass;

/// Singular values below this count towards the multiplicity of a root.
pub const MULTIPLICITY_THRESHOLD: f64 = 1e-6;

/// A refined local minimum of the gap is a root when it is below this.
pub const ROOT_THRESHOLD: f64 = 1e-7;

/// A constant 1-form on each edge, stored as the phase it accumulates
/// along the edge, `2π a_e L_e`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxForm {
    phases: Vec<f64>,
}

impl FluxForm {
    pub fn zero(g: &MetricGraph) -> FluxForm {
        FluxForm {
            phases: vec![0.0; g.edge_count()],
        }
    }

    /// From the per-edge values `a_e`.
    pub fn from_edge_values(g: &MetricGraph, values: &[f64]) -> FluxForm {
        FluxForm {
            phases: values
                .iter()
                .zip(g.edges())
                .map(|(a, e)| 2.0 * PI * a * e.length.to_f64())
                .collect(),
        }
    }

    pub fn from_phases(phases: Vec<f64>) -> FluxForm {
        FluxForm { phases }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Per-edge values `a_e`.
    pub fn edge_values(&self, g: &MetricGraph) -> Vec<f64> {
        self.phases
            .iter()
            .zip(g.edges())
            .map(|(p, e)| p / (2.0 * PI * e.length.to_f64()))
            .collect()
    }

    /// Phase of a bond: the edge phase, negated against the orientation.
    pub fn bond_phase(&self, b: usize) -> f64 {
        if b.is_multiple_of(2) {
            self.phases[b / 2]
        } else {
            -self.phases[b / 2]
        }
    }

    /// Flux through an integer edge chain.
    pub fn psi_chain(&self, chain: &[i64]) -> f64 {
        chain
            .iter()
            .zip(&self.phases)
            .map(|(&c, p)| c as f64 * p)
            .sum()
    }

    pub fn psi(&self, basis: &CycleBasis, h: &HomologyClass) -> f64 {
        self.psi_chain(&basis.chain_of(h.coords()))
    }

    pub fn scaled(&self, t: f64) -> FluxForm {
        FluxForm {
            phases: self.phases.iter().map(|p| p * t).collect(),
        }
    }
}

/// The gauge with zero phase on tree edges and phase `basis_fluxes[i]` on
/// the non-tree edge of basis cycle `i`, so that `Ψ(e_i) = basis_fluxes[i]`.
pub fn flux_representative(
    g: &MetricGraph,
    basis: &CycleBasis,
    basis_fluxes: &[f64],
) -> Result<FluxForm> {
    if basis_fluxes.len() != basis.rank() {
        return Err(Error::WrongRank {
            expected: basis.rank(),
            got: basis_fluxes.len(),
        });
    }
    let mut phases = vec![0.0; g.edge_count()];
    for (&e, &psi) in basis.non_tree_edges().iter().zip(basis_fluxes) {
        phases[e] = psi;
    }
    Ok(FluxForm { phases })
}

/// The unitary bond scattering matrix at wavenumber `k`.
pub fn bond_matrix(g: &MetricGraph, flux: &FluxForm, k: f64) -> Result<DMatrix<Complex<f64>>> {
    if k <= 0.0 {
        return Err(Error::NonPositiveWavenumber(k));
    }
    Ok(bond_matrix_unchecked(
        g,
        flux,
        k,
        &g.degrees(),
        &g.outgoing(),
        &g.lengths_f64(),
    ))
}

fn bond_matrix_unchecked(
    g: &MetricGraph,
    flux: &FluxForm,
    k: f64,
    degrees: &[usize],
    outgoing: &[Vec<usize>],
    lengths: &[f64],
) -> DMatrix<Complex<f64>> {
    let m = g.bond_count();
    let mut u = DMatrix::from_element(m, m, Complex::new(0.0, 0.0));
    for b in 0..m {
        let t = g.terminal(b);
        let phase = Complex::from_polar(1.0, k * lengths[b / 2] + flux.bond_phase(b));
        let d = degrees[t] as f64;
        for &next in &outgoing[t] {
            let sigma = 2.0 / d - if next == b ^ 1 { 1.0 } else { 0.0 };
            u[(next, b)] = phase * sigma;
        }
    }
    u
}

fn singular_values(g: &MetricGraph, flux: &FluxForm, k: f64, cache: &GraphCache) -> Vec<f64> {
    let u = bond_matrix_unchecked(g, flux, k, &cache.degrees, &cache.outgoing, &cache.lengths);
    let a = DMatrix::<Complex<f64>>::identity(u.nrows(), u.ncols()) - u;
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

struct GraphCache {
    degrees: Vec<usize>,
    outgoing: Vec<Vec<usize>>,
    lengths: Vec<f64>,
}

impl GraphCache {
    fn new(g: &MetricGraph) -> Self {
        GraphCache {
            degrees: g.degrees(),
            outgoing: g.outgoing(),
            lengths: g.lengths_f64(),
        }
    }
}

/// Smallest singular value of `I - U(k)`.
pub fn secular_gap(g: &MetricGraph, flux: &FluxForm, k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Err(Error::NonPositiveWavenumber(k));
    }
    Ok(singular_values(g, flux, k, &GraphCache::new(g))[0])
}

#[derive(Clone, Debug)]
pub struct SpectrumSlice {
    /// Edge phases of the flux.
    pub flux: Vec<f64>,
    /// Distinct wavenumbers in increasing order with multiplicities,
    /// starting with `k = 0` when it is an eigenvalue.
    pub wavenumbers: Vec<(f64, usize)>,
    pub k_max: f64,
    pub grid_step: f64,
    pub tolerance: f64,
    /// Set when the Weyl count check still failed after refining the grid.
    pub weyl_warning: Option<String>,
}

impl SpectrumSlice {
    /// Wavenumbers repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.wavenumbers
            .iter()
            .flat_map(|&(k, m)| std::iter::repeat_n(k, m))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.wavenumbers.iter().map(|w| w.1).sum()
    }

    pub fn zero_multiplicity(&self) -> usize {
        match self.wavenumbers.first() {
            Some(&(k, m)) if k == 0.0 => m,
            _ => 0,
        }
    }
}

/// Multiplicity of `k = 0`: one per component on which every cycle has
/// flux in `2πZ`.
pub fn zero_multiplicity(g: &MetricGraph, flux: &FluxForm) -> usize {
    let (label, count) = g.components();
    let basis = forest_cycle_basis(g);
    let mut trivial = vec![true; count];
    for (cycle, chain) in basis.cycles().iter().zip(basis.basis_chains()) {
        let psi = flux.psi_chain(chain);
        let wrapped = psi - 2.0 * PI * (psi / (2.0 * PI)).round();
        if wrapped.abs() > 1e-9 {
            trivial[label[g.origin(cycle.bonds()[0])]] = false;
        }
    }
    trivial.iter().filter(|&&t| t).count()
}

pub(crate) fn worker_count() -> usize {
    std::env::var("QGRAPH_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn scan_gaps(g: &MetricGraph, flux: &FluxForm, ks: &[f64], cache: &GraphCache) -> Vec<f64> {
    let workers = worker_count().min(ks.len().max(1));
    let chunk = ks.len().div_ceil(workers).max(1);
    let mut out = vec![0.0; ks.len()];
    std::thread::scope(|scope| {
        for (ks_part, out_part) in ks.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (k, o) in ks_part.iter().zip(out_part.iter_mut()) {
                    *o = singular_values(g, flux, *k, cache)[0];
                }
            });
        }
    });
    out
}

fn golden_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

fn scan(
    g: &MetricGraph,
    flux: &FluxForm,
    k_max: f64,
    step: f64,
    tol: f64,
    cache: &GraphCache,
) -> Vec<(f64, usize)> {
    let n = (k_max / step).ceil() as usize + 2;
    let ks: Vec<f64> = (1..=n).map(|j| j as f64 * step).collect();
    let mut gaps = vec![f64::INFINITY];
    gaps.extend(scan_gaps(g, flux, &ks, cache));
    // gaps[j] is the gap at j * step; index 0 stands for k = 0, excluded
    let mut roots: Vec<(f64, usize)> = Vec::new();
    for j in 1..gaps.len() - 1 {
        if !(gaps[j] <= gaps[j - 1] && gaps[j] < gaps[j + 1]) {
            continue;
        }
        let lo = ((j - 1) as f64 * step).max(tol);
        let hi = (j + 1) as f64 * step;
        let k = golden_minimum(|k| singular_values(g, flux, k, cache)[0], lo, hi, tol);
        let s = singular_values(g, flux, k, cache);
        if s[0] > ROOT_THRESHOLD || k > k_max || k <= tol * 10.0 {
            continue;
        }
        let mult = s.iter().filter(|&&x| x < MULTIPLICITY_THRESHOLD).count();
        if roots.last().is_some_and(|&(r, _)| (r - k).abs() < 1e-8) {
            continue;
        }
        roots.push((k, mult));
    }
    roots
}

/// All wavenumbers in `[0, k_max]`. The grid step defaults to
/// `π / (8 L_total)`; when the Weyl count check fails the step is halved
/// and the scan repeated, up to four times.
pub fn eigen_wavenumbers(
    g: &MetricGraph,
    flux: &FluxForm,
    k_max: f64,
    grid_step: Option<f64>,
    refine_tol: f64,
) -> Result<SpectrumSlice> {
    if k_max <= 0.0 {
        return Err(Error::NonPositiveWavenumber(k_max));
    }
    let total = g.total_length().to_f64();
    let mut step = grid_step.unwrap_or(PI / (8.0 * total));
    let cache = GraphCache::new(g);
    let zero = zero_multiplicity(g, flux);
    let slack = 2.0 * g.edge_count() as f64 + 2.0;
    let mut attempt = 0;
    loop {
        let mut wavenumbers = Vec::new();
        if zero > 0 {
            wavenumbers.push((0.0, zero));
        }
        wavenumbers.extend(scan(g, flux, k_max, step, refine_tol, &cache));
        let count: usize = wavenumbers.iter().map(|w| w.1).sum();
        let weyl = total * k_max / PI;
        let off = (count as f64 - weyl).abs();
        if off <= slack || attempt == 4 {
            let weyl_warning = (off > slack).then(|| {
                format!("counted {count} wavenumbers below {k_max}, Weyl predicts {weyl:.1}")
            });
            return Ok(SpectrumSlice {
                flux: flux.phases().to_vec(),
                wavenumbers,
                k_max,
                grid_step: step,
                tolerance: refine_tol,
                weyl_warning,
            });
        }
        step /= 2.0;
        attempt += 1;
    }
}

/// The first `count` values of `2π|n + t| / L`, sorted.
pub fn circle_closed_form(length: f64, t: f64, count: usize) -> Vec<f64> {
    let reach = count as i64 + t.abs().ceil() as i64 + 1;
    let mut ks: Vec<f64> = (-reach..=reach)
        .map(|n| 2.0 * PI * (n as f64 + t).abs() / length)
        .collect();
    ks.sort_by(f64::total_cmp);
    ks.truncate(count);
    ks
}
