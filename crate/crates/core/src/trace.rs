//! Periodic orbits, their trace-formula amplitudes, coefficient signals
//! along a flux ray, and a Gaussian-smoothed check of the trace identity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Complex;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{BondId, CycleBasis, MetricGraph};
use crate::homology::{canonical_rotation, HomologyClass};
use crate::real::{Real, TOLERANCE};
use crate::spectrum::{eigen_wavenumbers, FluxForm, SpectrumSlice};

/// Default limit on the number of enumerated orbits.
pub const ORBIT_CAP: usize = 2_000_000;

/// An oriented closed walk up to rotation, stored as its smallest
/// rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub bonds: Vec<BondId>,
    pub length: Real,
    pub primitive_length: Real,
    pub repetitions: usize,
    /// Signed edge usage.
    pub chain: Vec<i64>,
    /// Per passage `bonds[i] -> bonds[i + 1]` (cyclically), whether it
    /// turns back along the same edge.
    pub backtracks: Vec<bool>,
}

impl PeriodicOrbit {
    pub fn from_bonds(g: &MetricGraph, bonds: &[BondId]) -> Result<PeriodicOrbit> {
        let n = bonds.len();
        if n == 0 {
            return Err(Error::NotACycle("empty orbit".into()));
        }
        for i in 0..n {
            if g.terminal(bonds[i]) != g.origin(bonds[(i + 1) % n]) {
                return Err(Error::NotACycle(format!(
                    "bonds {} and {} are not incident",
                    bonds[i],
                    bonds[(i + 1) % n]
                )));
            }
        }
        let bonds = canonical_rotation(bonds);
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| bonds[i] == bonds[(i + d) % n]))
            .expect("n is a period");
        let length: Real = bonds.iter().map(|&b| g.bond_length(b)).sum();
        let primitive_length: Real = bonds[..period].iter().map(|&b| g.bond_length(b)).sum();
        let chain = crate::graph::bond_chain(&bonds, g.edge_count());
        let backtracks = (0..n).map(|i| bonds[(i + 1) % n] == bonds[i] ^ 1).collect();
        Ok(PeriodicOrbit {
            bonds,
            length,
            primitive_length,
            repetitions: n / period,
            chain,
            backtracks,
        })
    }

    pub fn has_backtrack(&self) -> bool {
        self.backtracks.iter().any(|&b| b)
    }

    pub fn is_contractible(&self) -> bool {
        self.chain.iter().all(|&c| c == 0)
    }

    pub fn reversed(&self, g: &MetricGraph) -> PeriodicOrbit {
        let rev: Vec<BondId> = self.bonds.iter().rev().map(|b| b ^ 1).collect();
        PeriodicOrbit::from_bonds(g, &rev).expect("reversal of an orbit is an orbit")
    }

    /// Product of the vertex scattering coefficients over all passages.
    pub fn scattering_product(&self, g: &MetricGraph) -> BigRational {
        let degrees = g.degrees();
        let n = self.bonds.len();
        let mut prod = BigRational::one();
        for i in 0..n {
            let d = degrees[g.terminal(self.bonds[i])] as i64;
            let mut sigma = BigRational::new(BigInt::from(2), BigInt::from(d));
            if self.backtracks[i] {
                sigma -= BigRational::one();
            }
            prod *= sigma;
        }
        prod
    }

    /// `l̃_p ∏σ`, the amplitude without its phase.
    pub fn weight(&self, g: &MetricGraph) -> Real {
        &self.primitive_length * &Real::Exact(self.scattering_product(g))
    }
}

/// Amplitude `l̃_p e^{iΨ} ∏σ` under a flux.
pub fn orbit_amplitude(g: &MetricGraph, p: &PeriodicOrbit, flux: &FluxForm) -> Complex<f64> {
    Complex::from_polar(p.weight(g).to_f64(), flux.psi_chain(&p.chain))
}

/// Orbits sharing one total length.
#[derive(Clone, Debug)]
pub struct OrbitGroup {
    pub length: Real,
    pub orbits: Vec<PeriodicOrbit>,
}

#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub l_max: Real,
    /// Groups in increasing length.
    pub groups: Vec<OrbitGroup>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.orbits.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, length: &Real) -> Option<&OrbitGroup> {
        self.groups.iter().find(|g| g.length.approx_eq(length))
    }

    pub fn iter(&self) -> impl Iterator<Item = &PeriodicOrbit> {
        self.groups.iter().flat_map(|g| g.orbits.iter())
    }
}

/// Every periodic orbit with length at most `l_max`, both orientations,
/// repetitions included. Fails once more than `cap` orbits are found.
pub fn enumerate_orbits(g: &MetricGraph, l_max: &Real, cap: usize) -> Result<OrbitSet> {
    let out = g.outgoing();
    let mut found: Vec<PeriodicOrbit> = Vec::new();
    let mut path: Vec<BondId> = Vec::new();
    for b0 in 0..g.bond_count() {
        path.clear();
        path.push(b0);
        extend_orbits(
            g,
            &out,
            l_max,
            g.bond_length(b0).clone(),
            &mut path,
            &mut found,
            cap,
        )?;
    }
    let exact = g.is_exact();
    let mut groups: Vec<OrbitGroup> = Vec::new();
    if exact {
        let mut map: BTreeMap<BigRational, Vec<PeriodicOrbit>> = BTreeMap::new();
        for p in found {
            map.entry(p.length.as_exact().expect("exact").clone())
                .or_default()
                .push(p);
        }
        groups = map
            .into_iter()
            .map(|(l, orbits)| OrbitGroup {
                length: Real::Exact(l),
                orbits,
            })
            .collect();
    } else {
        found.sort_by(|a, b| a.length.total_cmp(&b.length));
        for p in found {
            match groups.last_mut() {
                Some(last) if last.length.approx_eq(&p.length) => last.orbits.push(p),
                _ => groups.push(OrbitGroup {
                    length: p.length.clone(),
                    orbits: vec![p],
                }),
            }
        }
    }
    for group in &mut groups {
        group.orbits.sort_by(|a, b| a.bonds.cmp(&b.bonds));
    }
    Ok(OrbitSet {
        l_max: l_max.clone(),
        groups,
    })
}

fn extend_orbits(
    g: &MetricGraph,
    out: &[Vec<BondId>],
    l_max: &Real,
    length: Real,
    path: &mut Vec<BondId>,
    found: &mut Vec<PeriodicOrbit>,
    cap: usize,
) -> Result<()> {
    let b0 = path[0];
    let last = *path.last().expect("nonempty path");
    if g.terminal(last) == g.origin(b0) && canonical_rotation(path) == *path {
        if found.len() >= cap {
            return Err(Error::OrbitCap(cap));
        }
        found.push(PeriodicOrbit::from_bonds(g, path)?);
    }
    for &b in &out[g.terminal(last)] {
        if b < b0 {
            continue;
        }
        let next = &length + g.bond_length(b);
        if next.cmp_tol(l_max) == std::cmp::Ordering::Greater {
            continue;
        }
        path.push(b);
        extend_orbits(g, out, l_max, next, path, found, cap)?;
        path.pop();
    }
    Ok(())
}

/// A flux ray given by the fluxes of the basis cycles, optionally exact.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxRay {
    pub fluxes: Vec<f64>,
    pub exact: Option<Vec<BigRational>>,
}

impl FluxRay {
    pub fn from_f64(fluxes: Vec<f64>) -> FluxRay {
        FluxRay {
            fluxes,
            exact: None,
        }
    }

    pub fn from_rationals(fluxes: Vec<BigRational>) -> FluxRay {
        FluxRay {
            fluxes: fluxes.iter().map(crate::real::rational_to_f64).collect(),
            exact: Some(fluxes),
        }
    }

    /// Square roots of the first `n` primes: rationally independent.
    pub fn sqrt_primes(n: usize) -> FluxRay {
        FluxRay::from_f64(
            first_primes(n)
                .into_iter()
                .map(|p| (p as f64).sqrt())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.fluxes.len()
    }

    pub fn psi(&self, h: &HomologyClass) -> f64 {
        h.coords()
            .iter()
            .zip(&self.fluxes)
            .map(|(&c, f)| c as f64 * f)
            .sum()
    }

    pub fn psi_exact(&self, h: &HomologyClass) -> Option<BigRational> {
        self.exact.as_ref().map(|ex| {
            h.coords()
                .iter()
                .zip(ex)
                .map(|(&c, f)| f * BigRational::from_integer(c.into()))
                .sum()
        })
    }

    pub fn flux_form(&self, g: &MetricGraph, basis: &CycleBasis) -> Result<FluxForm> {
        crate::spectrum::flux_representative(g, basis, &self.fluxes)
    }
}

pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalTerm {
    /// Class with its first nonzero coordinate positive.
    pub class: HomologyClass,
    /// Amplitude `ν`: the summed weights of the orbits in `±class`.
    pub nu: Real,
    /// Frequency `|Ψ(class)|`.
    pub mu: f64,
    pub mu_exact: Option<BigRational>,
}

/// `A^l(t) = ν_0 + Σ_j ν_j cos(μ_j t)`: the total amplitude at one orbit
/// length along the ray `t α`.
#[derive(Clone, Debug)]
pub struct CoefficientSignal {
    pub length: Real,
    /// Sum over homologically trivial orbits.
    pub constant: Real,
    pub terms: Vec<SignalTerm>,
}

impl CoefficientSignal {
    pub fn eval(&self, t: f64) -> f64 {
        self.constant.to_f64()
            + self
                .terms
                .iter()
                .map(|s| s.nu.to_f64() * (s.mu * t).cos())
                .sum::<f64>()
    }

    pub fn samples(&self, step: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| self.eval(i as f64 * step)).collect()
    }

    /// `order`-th derivative at `t = 0`.
    pub fn derivative(&self, order: u32) -> f64 {
        if order % 2 == 1 {
            return 0.0;
        }
        let n = (order / 2) as i32;
        let base = if order == 0 {
            self.constant.to_f64()
        } else {
            0.0
        };
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        base + self
            .terms
            .iter()
            .map(|s| sign * s.nu.to_f64() * s.mu.powi(2 * n))
            .sum::<f64>()
    }

    /// Exact derivative at `t = 0`, available when the amplitudes and the
    /// squared frequencies are rational.
    pub fn derivative_exact(&self, order: u32) -> Option<BigRational> {
        if order % 2 == 1 {
            return Some(BigRational::zero());
        }
        let n = order / 2;
        let mut sum = if order == 0 {
            self.constant.as_exact()?.clone()
        } else {
            BigRational::zero()
        };
        for s in &self.terms {
            let mu = s.mu_exact.as_ref()?;
            let nu = s.nu.as_exact()?;
            sum += nu * num::pow(mu * mu, n as usize);
        }
        if n % 2 == 1 {
            sum = -sum;
        }
        Some(sum)
    }

    /// Largest frequency present.
    pub fn frequency_bound(&self) -> f64 {
        self.terms.iter().map(|s| s.mu).fold(0.0, f64::max)
    }

    /// Frequencies with nonzero amplitude.
    pub fn frequencies(&self) -> Vec<f64> {
        self.terms
            .iter()
            .filter(|s| !s.nu.is_zero())
            .map(|s| s.mu)
            .collect()
    }
}

/// The signal at one orbit length, with orbits classified in `basis`.
pub fn coefficient_signal(
    g: &MetricGraph,
    basis: &CycleBasis,
    group: &OrbitGroup,
    ray: &FluxRay,
) -> CoefficientSignal {
    let mut constant = Real::zero();
    let mut by_class: BTreeMap<HomologyClass, Real> = BTreeMap::new();
    for p in &group.orbits {
        let w = p.weight(g);
        let class = HomologyClass(basis.walk_coordinates(&p.bonds));
        if class.is_zero() {
            constant = constant + w;
        } else {
            let key = class.canonical_sign();
            let entry = by_class.entry(key).or_insert_with(Real::zero);
            *entry = &*entry + &w;
        }
    }
    let terms = by_class
        .into_iter()
        .filter(|(_, nu)| !nu.is_zero())
        .map(|(class, nu)| SignalTerm {
            mu: ray.psi(&class).abs(),
            mu_exact: ray.psi_exact(&class).map(|m| m.abs()),
            class,
            nu,
        })
        .collect();
    CoefficientSignal {
        length: group.length.clone(),
        constant,
        terms,
    }
}

/// Signals for every orbit length up to the set's bound.
pub fn coefficient_signals(
    g: &MetricGraph,
    basis: &CycleBasis,
    orbits: &OrbitSet,
    ray: &FluxRay,
) -> Vec<CoefficientSignal> {
    orbits
        .groups
        .iter()
        .map(|grp| coefficient_signal(g, basis, grp, ray))
        .collect()
}

#[derive(Clone, Debug)]
pub struct TraceCheck {
    pub probes: Vec<f64>,
    pub spectral: Vec<f64>,
    pub geometric: Vec<f64>,
    pub max_deviation: f64,
    pub k_max: f64,
    pub l_max: f64,
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Orbit length beyond which the smoothing factor `exp(-σ² l² / 2)` is
/// below `1e-12`.
pub fn orbit_cutoff(sigma: f64) -> f64 {
    (2.0 * 12.0 * 10f64.ln()).sqrt() / sigma
}

/// Spectral side at `λ`, symmetrised in `λ`:
/// `Σ_{k>0} [G(λ-k) + G(λ+k)] + 2 m_0 G(λ)`.
fn spectral_side(spectrum: &SpectrumSlice, lambda: f64, sigma: f64) -> f64 {
    spectrum
        .wavenumbers
        .iter()
        .map(|&(k, m)| {
            let w = if k == 0.0 {
                2.0 * gaussian(lambda, sigma)
            } else {
                gaussian(lambda - k, sigma) + gaussian(lambda + k, sigma)
            };
            m as f64 * w
        })
        .sum()
}

/// `Σ_p A_p e^{iλ l_p} e^{-σ² l_p²/2}` summed over rooted closed bond
/// walks `w` with weight `(l_w / n_w) ∏σ e^{iΨ}`: each orbit with `n`
/// bonds and `r` repetitions has `n / r` distinct rootings, which
/// reproduces `l̃_p`.
fn orbit_sum(
    g: &MetricGraph,
    flux: &FluxForm,
    l_max: f64,
    probes: &[f64],
    sigma: f64,
) -> Vec<Complex<f64>> {
    let out = g.outgoing();
    let degrees = g.degrees();
    let lengths = g.lengths_f64();
    let sigma_of = |from: BondId, to: BondId| -> f64 {
        2.0 / degrees[g.terminal(from)] as f64 - if to == from ^ 1 { 1.0 } else { 0.0 }
    };
    // bucket rooted closed walks by (bond count, length) to share the probe loop
    let mut buckets: BTreeMap<(usize, i64), (f64, Complex<f64>)> = BTreeMap::new();
    let quantum = 1e-9;
    for b0 in 0..g.bond_count() {
        // frontier: (current bond, bond count, length, weight)
        let mut frontier: Vec<(BondId, usize, f64, Complex<f64>)> = vec![(
            b0,
            1,
            lengths[b0 / 2],
            Complex::from_polar(1.0, flux.bond_phase(b0)),
        )];
        while !frontier.is_empty() {
            let mut merged: BTreeMap<(BondId, usize, i64), (f64, Complex<f64>)> = BTreeMap::new();
            for (b, n, l, w) in frontier {
                let t = g.terminal(b);
                if t == g.origin(b0) {
                    let closed = w * sigma_of(b, b0);
                    let e = buckets
                        .entry((n, (l / quantum).round() as i64))
                        .or_insert((l, Complex::new(0.0, 0.0)));
                    e.1 += closed;
                }
                for &next in &out[t] {
                    let nl = l + lengths[next / 2];
                    if nl > l_max + TOLERANCE {
                        continue;
                    }
                    let s = sigma_of(b, next);
                    if s == 0.0 {
                        continue;
                    }
                    let nw = w * s * Complex::from_polar(1.0, flux.bond_phase(next));
                    let e = merged
                        .entry((next, n + 1, (nl / quantum).round() as i64))
                        .or_insert((nl, Complex::new(0.0, 0.0)));
                    e.1 += nw;
                }
            }
            frontier = merged
                .into_iter()
                .map(|((b, n, _), (l, w))| (b, n, l, w))
                .collect();
        }
    }
    probes
        .iter()
        .map(|&lambda| {
            buckets
                .values()
                .zip(buckets.keys())
                .map(|(&(l, w), &(n, _))| {
                    w * (l / n as f64)
                        * Complex::from_polar(1.0, lambda * l)
                        * (-sigma * sigma * l * l / 2.0).exp()
                })
                .sum()
        })
        .collect()
}

/// Both sides of the Gaussian-smoothed trace identity at each probe. The
/// spectrum must reach at least `max(probes) + 8σ`.
pub fn smoothed_trace_check(
    g: &MetricGraph,
    flux: &FluxForm,
    spectrum: &SpectrumSlice,
    sigma: f64,
    probes: &[f64],
) -> Result<TraceCheck> {
    let top = probes.iter().copied().fold(0.0, f64::max);
    let needed = top + 8.0 * sigma;
    if spectrum.k_max < needed {
        return Err(Error::Refused(format!(
            "spectrum reaches k = {}, the check needs k_max >= {needed}",
            spectrum.k_max
        )));
    }
    let l_max = orbit_cutoff(sigma);
    let total = g.total_length().to_f64();
    let chi = g.euler_characteristic() as f64;
    let orbit_terms = orbit_sum(g, flux, l_max, probes, sigma);
    let spectral: Vec<f64> = probes
        .iter()
        .map(|&l| spectral_side(spectrum, l, sigma))
        .collect();
    let geometric: Vec<f64> = probes
        .iter()
        .zip(&orbit_terms)
        .map(|(&l, z)| total / PI + chi * gaussian(l, sigma) + z.re / PI)
        .collect();
    let max_deviation = spectral
        .iter()
        .zip(&geometric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(TraceCheck {
        probes: probes.to_vec(),
        spectral,
        geometric,
        max_deviation,
        k_max: spectrum.k_max,
        l_max,
    })
}

/// Computes the spectrum far enough and runs [`smoothed_trace_check`].
pub fn trace_check(
    g: &MetricGraph,
    flux: &FluxForm,
    sigma: f64,
    probes: &[f64],
) -> Result<TraceCheck> {
    let top = probes.iter().copied().fold(0.0, f64::max);
    let spectrum = eigen_wavenumbers(g, flux, top + 10.0 * sigma, None, 1e-12)?;
    smoothed_trace_check(g, flux, &spectrum, sigma, probes)
}

/// Exact integer check used in tests: the weights of an orbit and its
/// reverse agree.
pub fn reversal_symmetric(g: &MetricGraph, p: &PeriodicOrbit) -> bool {
    let q = p.reversed(g);
    p.weight(g) == q.weight(g) && q.chain.iter().zip(&p.chain).all(|(a, b)| *a == -b)
}

/// Whether a weight is strictly positive.
pub fn is_positive(r: &Real) -> bool {
    match r {
        Real::Exact(q) => q.is_positive(),
        Real::Float(x) => *x > 0.0,
    }
}
