//! Recovery of `f(t) = ν_0 + Σ ν_j cos(μ_j t)` from its germ at zero or from
//! uniform samples.

use nalgebra::{DMatrix, DVector};
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::rational_to_f64;
use crate::trace::CoefficientSignal;

/// Something that behaves as a finite cosine sum.
pub trait CosineSignal {
    fn eval(&self, t: f64) -> f64;
    /// An upper bound on the frequencies present.
    fn frequency_bound(&self) -> f64;
    /// Exact `order`-th derivative at zero, if available.
    fn derivative_exact(&self, _order: u32) -> Option<BigRational> {
        None
    }
}

impl CosineSignal for CoefficientSignal {
    fn eval(&self, t: f64) -> f64 {
        CoefficientSignal::eval(self, t)
    }

    fn frequency_bound(&self) -> f64 {
        CoefficientSignal::frequency_bound(self)
    }

    fn derivative_exact(&self, order: u32) -> Option<BigRational> {
        CoefficientSignal::derivative_exact(self, order)
    }
}

/// A cosine sum given explicitly, optionally with rational data.
#[derive(Clone, Debug, PartialEq)]
pub struct CosineSum {
    pub constant: f64,
    /// `(μ, ν)` pairs.
    pub terms: Vec<(f64, f64)>,
    exact: Option<(BigRational, Vec<(BigRational, BigRational)>)>,
}

impl CosineSum {
    pub fn new(constant: f64, terms: Vec<(f64, f64)>) -> CosineSum {
        CosineSum { constant, terms, exact: None }
    }

    pub fn from_rationals(constant: BigRational, terms: Vec<(BigRational, BigRational)>) -> CosineSum {
        CosineSum {
            constant: rational_to_f64(&constant),
            terms: terms.iter().map(|(m, n)| (rational_to_f64(m), rational_to_f64(n))).collect(),
            exact: Some((constant, terms)),
        }
    }
}

impl CosineSignal for CosineSum {
    fn eval(&self, t: f64) -> f64 {
        self.constant + self.terms.iter().map(|(m, n)| n * (m * t).cos()).sum::<f64>()
    }

    fn frequency_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    fn derivative_exact(&self, order: u32) -> Option<BigRational> {
        let (c, terms) = self.exact.as_ref()?;
        if order % 2 == 1 {
            return Some(BigRational::zero());
        }
        let n = (order / 2) as usize;
        let mut s = if n == 0 { c.clone() } else { BigRational::zero() };
        for (m, v) in terms {
            s += v * num::pow(m * m, n);
        }
        Some(if n % 2 == 1 { -s } else { s })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Limits of ratios of exact even derivatives at zero.
    Derivative,
    /// Minimal linear recurrence fitted to uniform samples.
    Recurrence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CosineTerm {
    pub mu: f64,
    pub nu: f64,
    /// `μ²`, exact when recovered by the derivative method.
    pub mu_squared: Option<BigRational>,
    pub nu_exact: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CosineParams {
    pub constant: f64,
    pub constant_exact: Option<BigRational>,
    /// Sorted by increasing frequency.
    pub terms: Vec<CosineTerm>,
}

impl CosineParams {
    pub fn frequencies(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.mu).collect()
    }
}

pub fn recover_cosine_params<S: CosineSignal + ?Sized>(signal: &S, method: Method) -> Result<CosineParams> {
    match method {
        Method::Derivative => recover_by_derivatives(signal),
        Method::Recurrence => recover_by_recurrence(signal, &RecurrenceOptions::default()),
    }
}

/// Number of vanishing residual moments that certify a derivative-method
/// decomposition.
pub const CERTIFY_MOMENTS: usize = 64;
const PROBE_ORDERS: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

/// The simplest rational in the closed interval between `a` and `b`.
pub fn simplest_between(a: &BigRational, b: &BigRational) -> BigRational {
    let (lo, hi) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == lo {
        return lo;
    }
    let next = &fl + BigRational::one();
    if next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Exact recovery from the derivative oracle: the dominant `λ = μ²` is the
/// limit of `-f^(2n+2)(0) / f^(2n)(0)`; its amplitude the limit of
/// `f^(2n)(0) / (-λ)^n`. Each term is peeled off in turn and the final
/// residual certified to vanish.
pub fn recover_by_derivatives<S: CosineSignal + ?Sized>(signal: &S) -> Result<CosineParams> {
    let missing = || Error::Refused("derivative method needs an exact derivative oracle".into());
    let d0 = signal.derivative_exact(0).ok_or_else(missing)?;
    let top = 2 * PROBE_ORDERS[PROBE_ORDERS.len() - 1] + 1;
    // s_n = (-1)^n f^(2n)(0) = Σ ν_j λ_j^n for n >= 1
    let mut moments = vec![BigRational::zero()];
    for probe in PROBE_ORDERS {
        let need = (2 * probe + 1).max(CERTIFY_MOMENTS);
        while moments.len() <= need.min(top) {
            let n = moments.len();
            let d = signal.derivative_exact(2 * n as u32).ok_or_else(missing)?;
            moments.push(if n % 2 == 1 { -d } else { d });
        }
        if let Some(terms) = peel(&moments, probe) {
            let constant = terms.iter().fold(d0.clone(), |c, (_, nu)| c - nu);
            let mut terms: Vec<CosineTerm> = terms
                .into_iter()
                .map(|(lambda, nu)| CosineTerm {
                    mu: rational_to_f64(&lambda).sqrt(),
                    nu: rational_to_f64(&nu),
                    mu_squared: Some(lambda),
                    nu_exact: Some(nu),
                })
                .collect();
            terms.sort_by(|a, b| a.mu_squared.cmp(&b.mu_squared));
            return Ok(CosineParams { constant: rational_to_f64(&constant), constant_exact: Some(constant), terms });
        }
    }
    Err(Error::IllConditioned("derivative limits did not settle on a certified decomposition".into()))
}

fn peel(moments: &[BigRational], probe: usize) -> Option<Vec<(BigRational, BigRational)>> {
    let mut residual = moments.to_vec();
    let mut terms = Vec::new();
    let certify = CERTIFY_MOMENTS.min(residual.len() - 1);
    while terms.len() <= certify / 2 {
        if residual[1..=certify].iter().all(Zero::is_zero) {
            return Some(terms);
        }
        let (a, b) = (probe, 2 * probe);
        if residual[a].is_zero() || residual[b].is_zero() {
            return None;
        }
        let r1 = &residual[a + 1] / &residual[a];
        let r2 = &residual[b + 1] / &residual[b];
        let w = (&r2 - &r1).abs();
        let lambda = simplest_between(&(&r2 - &w), &(&r2 + &w));
        if !lambda.is_positive() {
            return None;
        }
        let t1 = &residual[a] / num::pow(lambda.clone(), a);
        let t2 = &residual[b] / num::pow(lambda.clone(), b);
        let w = (&t2 - &t1).abs();
        let nu = simplest_between(&(&t2 - &w), &(&t2 + &w));
        if nu.is_zero() {
            return None;
        }
        let mut power = BigRational::one();
        for s in residual.iter_mut().skip(1) {
            power *= &lambda;
            *s -= &nu * &power;
        }
        terms.push((lambda, nu));
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceOptions {
    /// Smallest frequency gap to resolve; `None` searches downward.
    pub separation: Option<f64>,
    /// Smallest gap tried by the downward search.
    pub min_separation: f64,
    /// Overrides the signal's frequency bound.
    pub frequency_bound: Option<f64>,
    /// Relative singular value threshold for the recurrence order.
    pub rank_tolerance: f64,
}

impl Default for RecurrenceOptions {
    fn default() -> Self {
        RecurrenceOptions { separation: None, min_separation: 1e-3, frequency_bound: None, rank_tolerance: 1e-9 }
    }
}

/// Window length for a given separation: four beat periods.
pub fn window_for(separation: f64) -> f64 {
    4.0 * std::f64::consts::TAU / separation
}

/// Sample step for a frequency bound, oversampling Nyquist by 1.5.
pub fn step_for(bound: f64) -> f64 {
    std::f64::consts::PI / (1.5 * bound.max(1e-3))
}

/// Recovery from uniform samples: the samples obey a linear recurrence
/// whose characteristic roots are `e^{±iμh}` (and `1` for the constant).
/// The roots come from a shift-invariant subspace of the sample Hankel
/// matrix, amplitudes from least squares, and all parameters are then
/// polished by Gauss-Newton on the whole window.
pub fn recover_by_recurrence<S: CosineSignal + ?Sized>(signal: &S, opts: &RecurrenceOptions) -> Result<CosineParams> {
    let bound = opts.frequency_bound.unwrap_or_else(|| signal.frequency_bound());
    if bound <= 0.0 {
        let c = signal.eval(0.0);
        return Ok(CosineParams { constant: c, constant_exact: None, terms: Vec::new() });
    }
    match opts.separation {
        Some(sep) => recurrence_at(signal, bound, sep, opts.rank_tolerance),
        None => {
            let mut sep = 0.5f64.min(bound);
            loop {
                match recurrence_at(signal, bound, sep, opts.rank_tolerance) {
                    Ok(p) => return Ok(p),
                    Err(e) if sep / 2.0 < opts.min_separation => return Err(e),
                    Err(_) => sep /= 2.0,
                }
            }
        }
    }
}

fn recurrence_at<S: CosineSignal + ?Sized>(signal: &S, bound: f64, sep: f64, rank_tol: f64) -> Result<CosineParams> {
    let h = step_for(bound);
    let window = window_for(sep);
    let count = ((window / h).ceil() as usize + 1).max(16);
    let samples: Vec<f64> = (0..count).map(|i| signal.eval(i as f64 * h)).collect();
    let scale = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Ok(CosineParams { constant: 0.0, constant_exact: None, terms: Vec::new() });
    }
    let cols = (count / 2).min(300);
    let rows = count - cols + 1;
    let hankel = DMatrix::from_fn(rows, cols, |i, j| samples[i + j]);
    let svd = hankel.svd(false, true);
    let sv = &svd.singular_values;
    let order = sv.iter().filter(|&&s| s > rank_tol * sv[0]).count();
    if order >= cols - 1 {
        return Err(Error::IllConditioned(format!("recurrence order {order} fills the {cols}-column window")));
    }
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    // rows of V restricted to the signal subspace, shifted by one sample
    let v = v_t.rows(0, order).transpose();
    let v0 = v.rows(0, cols - 1).into_owned();
    let v1 = v.rows(1, cols - 1).into_owned();
    let pencil = v0
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::IllConditioned(e.to_string()))?
        * v1;
    let roots = pencil.complex_eigenvalues();
    let mut freqs: Vec<f64> = Vec::new();
    let mut has_constant = false;
    for z in roots.iter() {
        let arg = z.arg();
        if arg.abs() < 1e-6 {
            has_constant = true;
        } else if arg > 0.0 {
            freqs.push(arg / h);
        }
    }
    freqs.sort_by(f64::total_cmp);
    let times: Vec<f64> = (0..count).map(|i| i as f64 * h).collect();
    let (constant, amps) = amplitudes(&times, &samples, &freqs, has_constant)?;
    let (constant, terms) = gauss_newton(&times, &samples, constant, has_constant, freqs, amps)?;
    let rms = residual(&times, &samples, constant, &terms).norm() / (count as f64).sqrt();
    if rms > 1e-10 * scale {
        return Err(Error::IllConditioned(format!("fit residual {rms:.3e} at separation {sep}")));
    }
    let resolvable = std::f64::consts::TAU / window;
    if terms.windows(2).any(|w| w[1].0 - w[0].0 < resolvable) {
        return Err(Error::IllConditioned(format!("frequencies closer than {resolvable:.3e}")));
    }
    Ok(CosineParams {
        constant,
        constant_exact: None,
        terms: terms
            .into_iter()
            .map(|(mu, nu)| CosineTerm { mu, nu, mu_squared: None, nu_exact: None })
            .collect(),
    })
}

fn amplitudes(times: &[f64], samples: &[f64], freqs: &[f64], constant: bool) -> Result<(f64, Vec<f64>)> {
    let off = usize::from(constant);
    let a = DMatrix::from_fn(times.len(), freqs.len() + off, |i, j| {
        if j < off {
            1.0
        } else {
            (freqs[j - off] * times[i]).cos()
        }
    });
    let b = DVector::from_column_slice(samples);
    let x = a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::IllConditioned(e.to_string()))?;
    let c = if constant { x[0] } else { 0.0 };
    Ok((c, x.iter().skip(off).copied().collect()))
}

fn residual(times: &[f64], samples: &[f64], constant: f64, terms: &[(f64, f64)]) -> DVector<f64> {
    DVector::from_iterator(
        times.len(),
        times
            .iter()
            .zip(samples)
            .map(|(t, y)| y - constant - terms.iter().map(|(m, n)| n * (m * t).cos()).sum::<f64>()),
    )
}

fn gauss_newton(
    times: &[f64],
    samples: &[f64],
    mut constant: f64,
    has_constant: bool,
    freqs: Vec<f64>,
    amps: Vec<f64>,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut terms: Vec<(f64, f64)> = freqs.into_iter().zip(amps).collect();
    let off = usize::from(has_constant);
    let p = terms.len();
    for _ in 0..20 {
        let r = residual(times, samples, constant, &terms);
        let jac = DMatrix::from_fn(times.len(), off + 2 * p, |i, j| {
            let t = times[i];
            if j < off {
                1.0
            } else if j < off + p {
                (terms[j - off].0 * t).cos()
            } else {
                let (m, n) = terms[j - off - p];
                -n * t * (m * t).sin()
            }
        });
        let step = jac.svd(true, true).solve(&r, 1e-14).map_err(|e| Error::IllConditioned(e.to_string()))?;
        if has_constant {
            constant += step[0];
        }
        let mut largest = 0.0f64;
        for (k, term) in terms.iter_mut().enumerate() {
            term.1 += step[off + k];
            term.0 += step[off + p + k];
            largest = largest.max(step[off + p + k].abs());
        }
        if largest < 1e-15 * terms.iter().map(|t| t.0).fold(1.0, f64::max) {
            break;
        }
    }
    terms.retain(|t| t.1.abs() > 0.0);
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok((constant, terms))
}
