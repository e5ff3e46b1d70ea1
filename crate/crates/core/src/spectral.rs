//! Eigenvalues and gaps of `H(λ)`.
//!
//! Energies are reported as `Ē = E/𝓔`. The clock Hamiltonian of an
//! `M`-qubit circuit has a `2^M`-fold degenerate zero-energy space (one
//! history state per input bitstring), and for a single qubit every level is
//! doubly degenerate. Gaps are therefore measured between distinct levels:
//! `E₁` is the lowest eigenvalue above `E₀ + DEGENERACY_TOL`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{inner, norm, BasisIndex, Lambda, StateVector};
use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_single_gate_term, LambdaPolynomial, OperatorMatrix};
use crate::par::{self, Execution};

/// Eigenvalues closer than this belong to the same level.
pub const DEGENERACY_TOL: f64 = 1e-7;

/// Largest dimension accepted by the dense solver.
pub const DENSE_LIMIT: usize = 8192;

/// Residual target `‖Hv - Ev‖` for returned eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Closed-form single-qubit levels `E_0 = 0`, `E_n = (1-λ)² + 2λ(1 - cos(πn/(N+1)))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumExact {
    pub num_steps: usize,
    pub lambda: f64,
    /// `N + 1` levels, `n = 0..=N`.
    pub levels: Vec<f64>,
}

impl SpectrumExact {
    /// All `2(N+1)` eigenvalues, each level twice (spin doubling), ascending.
    pub fn with_multiplicity(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.levels.iter().flat_map(|&e| [e, e]).collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

pub fn exact_single_qubit_spectrum(num_steps: usize, lambda: Lambda) -> Result<SpectrumExact> {
    if num_steps == 0 {
        return Err(Error::Precondition("single-qubit spectrum needs N >= 1".into()));
    }
    let l = lambda.value();
    let levels = std::iter::once(0.0)
        .chain((1..=num_steps).map(|n| {
            let c = (PI * n as f64 / (num_steps + 1) as f64).cos();
            (1.0 - l) * (1.0 - l) + 2.0 * l * (1.0 - c)
        }))
        .collect();
    Ok(SpectrumExact {
        num_steps,
        lambda: l,
        levels,
    })
}

/// Minimum single-qubit gap `sin²(π/(N+1))`, attained at `λ = cos(π/(N+1))`.
pub fn single_qubit_min_gap(num_steps: usize) -> (f64, f64) {
    let x = PI / (num_steps + 1) as f64;
    (x.sin().powi(2), x.cos())
}

/// `D_{m+1} = (1+λ²-Ē) D_m - λ² D_{m-1}` with `D_0 = 0`, `D_1 = -Ē`;
/// returns `D_{N+1} = det(H - Ē)` of the `N+1`-row gauge chain.
pub fn determinant_recursion(num_steps: usize, lambda: Lambda, ebar: f64) -> f64 {
    -ebar * reduced_determinant(num_steps, lambda.value(), ebar)
}

/// `D_{N+1} / (-Ē)`, same recursion with `Q_0 = 0`, `Q_1 = 1`.
fn reduced_determinant(num_steps: usize, l: f64, ebar: f64) -> f64 {
    let a = 1.0 + l * l - ebar;
    let b = l * l;
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..num_steps {
        let next = a * cur - b * prev;
        prev = cur;
        cur = next;
        // rescale to avoid overflow; the sign pattern is all that matters
        let s = cur.abs().max(prev.abs());
        if s > 1e100 {
            prev /= s;
            cur /= s;
        }
    }
    cur
}

/// The `N + 1` roots of `D_{N+1}(Ē)`, ascending: `Ē = 0` from the explicit
/// factor plus the sign changes of the reduced polynomial, located on a grid
/// that is refined until all `N` remaining roots are bracketed, then bisected.
pub fn determinant_roots(num_steps: usize, lambda: Lambda) -> Result<Vec<f64>> {
    let l = lambda.value();
    let mut roots = vec![0.0];
    if num_steps == 0 {
        return Ok(roots);
    }
    if l == 0.0 {
        roots.extend(std::iter::repeat_n(1.0, num_steps));
        return Ok(roots);
    }
    let hi = (1.0 + l) * (1.0 + l) + 1e-3;
    let f = |e: f64| reduced_determinant(num_steps, l, e);
    let mut points = 64 * (num_steps + 1);
    const MAX_POINTS: usize = 1 << 24;
    while points <= MAX_POINTS {
        let mut found = Vec::new();
        let mut x0 = 0.0;
        let mut f0 = f(x0);
        for k in 1..=points {
            let x1 = hi * k as f64 / points as f64;
            let f1 = f(x1);
            if f1 == 0.0 {
                found.push(x1);
            } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
                found.push(bisect(&f, x0, x1, f0));
            }
            x0 = x1;
            f0 = f1;
        }
        if found.len() == num_steps {
            roots.extend(found);
            return Ok(roots);
        }
        points *= 4;
    }
    Err(Error::NoConvergence {
        iterations: MAX_POINTS,
        residual: f64::NAN,
    })
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Eigensolver backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Dense,
    Lanczos,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dense => "dense",
            Method::Lanczos => "lanczos",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Method::Dense),
            "lanczos" => Ok(Method::Lanczos),
            other => Err(Error::Precondition(format!(
                "unknown method '{other}' (expected dense|lanczos)"
            ))),
        }
    }
}

/// Lowest eigenpairs, ascending.
///
/// The dense path returns the `k` smallest eigenvalues counted with
/// multiplicity. Lanczos sees one vector per eigenspace, so it returns the
/// `k` smallest distinct levels (`distinct == true`).
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub distinct: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 2000,
        }
    }
}

pub fn to_dense(h: &OperatorMatrix) -> Mat<c64> {
    let n = h.dim();
    let mut m = Mat::<c64>::zeros(n, n);
    for (r, c, v) in h.iter() {
        m[(r, c)] = v;
    }
    m
}

fn check_dense(h: &OperatorMatrix) -> Result<()> {
    if h.dim() > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: h.dim(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Every eigenvalue, ascending.
pub fn dense_eigenvalues(h: &OperatorMatrix) -> Result<Vec<f64>> {
    check_dense(h)?;
    to_dense(h)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Precondition(format!("dense eigensolver failed: {e:?}")))
}

fn residual(h: &OperatorMatrix, v: &[Complex64], e: f64) -> f64 {
    let hv = h.apply(v);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn eigensolve(h: &OperatorMatrix, k: usize, method: Method) -> Result<Eigenpairs> {
    eigensolve_with(h, k, method, LanczosOptions::default())
}

pub fn eigensolve_with(
    h: &OperatorMatrix,
    k: usize,
    method: Method,
    opts: LanczosOptions,
) -> Result<Eigenpairs> {
    if k == 0 {
        return Err(Error::Precondition("eigensolve needs k >= 1".into()));
    }
    match method {
        Method::Dense => dense_eigensolve(h, k),
        Method::Lanczos => lanczos(h, k, opts),
    }
}

fn dense_eigensolve(h: &OperatorMatrix, k: usize) -> Result<Eigenpairs> {
    check_dense(h)?;
    let evd = to_dense(h)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Precondition(format!("dense eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let k = k.min(h.dim());
    let values: Vec<f64> = (0..k).map(|i| s[i].re).collect();
    let vectors: Vec<Vec<Complex64>> = (0..k)
        .map(|i| (0..h.dim()).map(|r| u[(r, i)]).collect())
        .collect();
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&e, v)| residual(h, v, e))
        .collect();
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
        distinct: false,
        iterations: 0,
    })
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

/// Removes the components along `basis` (two passes).
fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = inner(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// Groups sorted values into levels; returns the index of the first member
/// of each level.
fn level_starts(values: &[f64]) -> Vec<usize> {
    let mut starts = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if i == 0 || v - values[*starts.last().unwrap()] > DEGENERACY_TOL {
            starts.push(i);
        }
    }
    starts
}

/// Lanczos with full reorthogonalization and block size 1. After an
/// invariant subspace is exhausted it continues from a fresh random vector
/// orthogonal to everything seen so far.
fn lanczos(h: &OperatorMatrix, k: usize, opts: LanczosOptions) -> Result<Eigenpairs> {
    let n = h.dim();
    let cap = opts.max_iter.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = h.gershgorin_bound().max(1.0);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = random_unit(n, &mut rng);
    let mut best_residual = f64::INFINITY;

    loop {
        basis.push(v.clone());
        let i = basis.len() - 1;
        let mut w = h.apply(&v);
        let a = inner(&v, &w).re;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= a * vi;
        }
        if i > 0 && beta[i - 1] != 0.0 {
            let b = beta[i - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[i - 1]) {
                *wi -= b * pi;
            }
        }
        orthogonalize(&mut w, &basis);
        alpha.push(a);
        let b = norm(&w);
        let m = basis.len();
        let exhausted = b <= 1e-10 * scale;

        if m.is_multiple_of(5) || exhausted || m == cap {
            let t = Mat::<f64>::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let evd = t
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Precondition(format!("tridiagonal eigensolver failed: {e:?}")))?;
            let theta: Vec<f64> = (0..m).map(|j| evd.S().column_vector()[j]).collect();
            let s = evd.U();
            let starts = level_starts(&theta);
            if starts.len() >= k || m == n {
                let take = starts.len().min(k);
                // within a level, keep the Ritz pair with the smallest estimate
                let picks: Vec<usize> = (0..take)
                    .map(|l| {
                        let end = starts.get(l + 1).copied().unwrap_or(m);
                        (starts[l]..end)
                            .min_by(|&x, &y| {
                                (b * s[(m - 1, x)]).abs().total_cmp(&(b * s[(m - 1, y)]).abs())
                            })
                            .unwrap()
                    })
                    .collect();
                let estimate = picks
                    .iter()
                    .map(|&j| (b * s[(m - 1, j)]).abs())
                    .fold(0.0, f64::max);
                if estimate <= 0.1 * RESIDUAL_TOL || m == n || m == cap {
                    let vectors: Vec<Vec<Complex64>> = picks
                        .iter()
                        .map(|&j| {
                            let mut y = vec![Complex64::new(0.0, 0.0); n];
                            for (q, col) in basis.iter().enumerate() {
                                let c = s[(q, j)];
                                for (yi, qi) in y.iter_mut().zip(col) {
                                    *yi += c * qi;
                                }
                            }
                            let ny = norm(&y);
                            y.iter_mut().for_each(|z| *z /= ny);
                            y
                        })
                        .collect();
                    let values: Vec<f64> = vectors.iter().map(|y| h.expectation(y)).collect();
                    let residuals: Vec<f64> = values
                        .iter()
                        .zip(&vectors)
                        .map(|(&e, y)| residual(h, y, e))
                        .collect();
                    let worst = residuals.iter().copied().fold(0.0, f64::max);
                    best_residual = best_residual.min(worst);
                    if worst <= RESIDUAL_TOL && take == k.min(n) {
                        return Ok(Eigenpairs {
                            values,
                            vectors,
                            residuals,
                            distinct: true,
                            iterations: m,
                        });
                    }
                }
            }
        }

        if m == cap {
            return Err(Error::NoConvergence {
                iterations: m,
                residual: best_residual,
            });
        }
        if exhausted {
            beta.push(0.0);
            let mut fresh = random_unit(n, &mut rng);
            orthogonalize(&mut fresh, &basis);
            let nf = norm(&fresh);
            fresh.iter_mut().for_each(|z| *z /= nf);
            v = fresh;
        } else {
            beta.push(b);
            v = w.into_iter().map(|z| z / b).collect();
        }
    }
}

/// Ground state of `H(λ)` from dense diagonalization: `initial_state`
/// projected onto the numerical zero-energy eigenspace, then normalized.
/// The zero space is `2^M`-fold degenerate, and the projection picks the
/// history state whose input is `|0...0>`.
pub fn dense_ground_state(circuit: &Circuit, lambda: Lambda) -> Result<StateVector> {
    let basis = BasisIndex::for_circuit(circuit)?;
    let h = crate::hamiltonian::build_hamiltonian(circuit, lambda, &basis)?;
    let pairs = dense_eigensolve(&h, h.dim())?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); h.dim()];
    for (e, v) in pairs.values.iter().zip(&pairs.vectors) {
        if e - pairs.values[0] > DEGENERACY_TOL {
            break;
        }
        // <v|initial> = conj(v[0])
        let c = v[0].conj();
        for (a, x) in amplitudes.iter_mut().zip(v) {
            *a += c * x;
        }
    }
    let mut state = StateVector {
        amplitudes,
        basis,
        normalized: false,
        raw_norm: 0.0,
    };
    state.normalize();
    Ok(state)
}

/// Lowest two distinct levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelGap {
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// Multiplicity of `E₀` (dense path only; 1 for Lanczos).
    pub ground_multiplicity: usize,
}

/// Gap between the two lowest levels of an ascending eigenvalue list.
pub fn level_gap(values: &[f64]) -> Option<LevelGap> {
    let starts = level_starts(values);
    if starts.len() < 2 {
        return None;
    }
    let e0 = values[0];
    let e1 = values[starts[1]];
    Some(LevelGap {
        e0,
        e1,
        gap: e1 - e0,
        ground_multiplicity: starts[1],
    })
}

/// Level gap of `H(λ)`; failures carry the offending λ.
pub fn gap_at(poly: &LambdaPolynomial, lambda: Lambda, method: Method, seed: u64) -> Result<LevelGap> {
    let wrap = |e: Error| Error::Eigensolver {
        lambda: lambda.value(),
        source: Box::new(e),
    };
    let h = poly.evaluate(lambda);
    match method {
        Method::Dense => {
            let values = dense_eigenvalues(&h).map_err(wrap)?;
            level_gap(&values).ok_or_else(|| wrap(Error::Precondition("spectrum has a single level".into())))
        }
        Method::Lanczos => {
            let pairs = lanczos(&h, 2, LanczosOptions { seed, ..Default::default() }).map_err(wrap)?;
            Ok(LevelGap {
                e0: pairs.values[0],
                e1: pairs.values[1],
                gap: pairs.values[1] - pairs.values[0],
                ground_multiplicity: 1,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSample {
    pub s: f64,
    pub lambda: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapProfile {
    pub circuit: String,
    pub circuit_hash: String,
    pub method: Method,
    /// Grid and refinement samples, ascending in λ.
    pub samples: Vec<GapSample>,
    pub min_gap: f64,
    pub lambda_star: f64,
    pub s_star: f64,
    pub refine_requested: bool,
    /// Set when golden-section refinement did not improve on the grid.
    pub refinement_fallback: bool,
}

impl GapProfile {
    /// Interpolated gap at `λ` (linear between samples).
    pub fn gap_at(&self, lambda: f64) -> f64 {
        let s = &self.samples;
        match s.iter().position(|p| p.lambda >= lambda) {
            None => s.last().map_or(0.0, |p| p.gap),
            Some(0) => s[0].gap,
            Some(i) => {
                let (a, b) = (&s[i - 1], &s[i]);
                let t = (lambda - a.lambda) / (b.lambda - a.lambda);
                a.gap + t * (b.gap - a.gap)
            }
        }
    }

    /// Largest `|Δgap/Δλ|` between adjacent samples.
    pub fn max_slope(&self) -> f64 {
        self.samples
            .windows(2)
            .filter(|w| w[1].lambda > w[0].lambda)
            .map(|w| ((w[1].gap - w[0].gap) / (w[1].lambda - w[0].lambda)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,lambda,E0,E1,gap,method,refined\n");
        for p in &self.samples {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{}\n",
                p.s, p.lambda, p.e0, p.e1, p.gap, self.method, p.refined
            ));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "circuit": self.circuit,
            "circuit_hash": self.circuit_hash,
            "method": self.method,
            "num_samples": self.samples.len(),
            "min_gap": self.min_gap,
            "lambda_star": self.lambda_star,
            "s_star": self.s_star,
            "refined": self.refine_requested,
            "refinement_fallback": self.refinement_fallback,
            "max_slope": self.max_slope(),
            "units": "energy / E",
        })
    }
}

/// Uniform grid of `count` points from `start` to `stop`.
pub fn lambda_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::Precondition("lambda grid needs at least 2 points".into()));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop <= start {
        return Err(Error::Precondition(format!(
            "lambda grid {start}:{stop} must satisfy 0 <= start < stop <= 1"
        )));
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

/// Relative λ tolerance of the golden-section refinement.
pub const REFINE_TOL: f64 = 1e-4;

pub fn gap_scan(circuit: &Circuit, grid: &[f64], refine: bool, method: Method) -> Result<GapProfile> {
    gap_scan_with(Execution::default(), circuit, grid, refine, method)
}

pub fn gap_scan_with(
    exec: Execution,
    circuit: &Circuit,
    grid: &[f64],
    refine: bool,
    method: Method,
) -> Result<GapProfile> {
    gap_scan_seeded(exec, circuit, grid, refine, method, circuit.seed())
}

/// [`gap_scan_with`] with an explicit Lanczos start-vector seed.
pub fn gap_scan_seeded(
    exec: Execution,
    circuit: &Circuit,
    grid: &[f64],
    refine: bool,
    method: Method,
    seed: u64,
) -> Result<GapProfile> {
    let min_points = if refine { 3 } else { 2 };
    if grid.len() < min_points {
        return Err(Error::Precondition(format!(
            "lambda grid needs at least {min_points} points"
        )));
    }
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let lambdas: Vec<Lambda> = grid.iter().map(|&l| Lambda::new(l)).collect::<Result<_>>()?;
    let basis = BasisIndex::for_circuit(circuit)?;
    let poly = LambdaPolynomial::new_with(exec, circuit, &basis)?;

    let gaps = par::map(exec, &lambdas, |&l| gap_at(&poly, l, method, seed));
    let mut samples = Vec::with_capacity(grid.len());
    for (l, g) in lambdas.iter().zip(gaps) {
        let g = g?;
        samples.push(sample(l.value(), g, false));
    }

    let coarse = argmin(&samples);
    let mut fallback = false;
    if refine {
        let lo = samples[coarse.saturating_sub(1)].lambda;
        let hi = samples[(coarse + 1).min(samples.len() - 1)].lambda;
        let mut extra = Vec::new();
        golden_section(lo, hi, |l| {
            let g = gap_at(&poly, Lambda::clamped(l), method, seed)?;
            extra.push(sample(l, g, true));
            Ok(g.gap)
        })?;
        let best_refined = extra.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
        if !(best_refined <= samples[coarse].gap) {
            fallback = true;
        }
        samples.extend(extra);
        samples.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    }
    let best = &samples[argmin(&samples)];
    Ok(GapProfile {
        circuit: circuit.name.clone(),
        circuit_hash: circuit.hash_hex(),
        method,
        min_gap: best.gap,
        lambda_star: best.lambda,
        s_star: best.s,
        samples,
        refine_requested: refine,
        refinement_fallback: fallback,
    })
}

fn sample(l: f64, g: LevelGap, refined: bool) -> GapSample {
    GapSample {
        s: l,
        lambda: l,
        e0: g.e0,
        e1: g.e1,
        gap: g.gap,
        refined,
    }
}

fn argmin(samples: &[GapSample]) -> usize {
    samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))
        .map(|(i, _)| i)
        .unwrap()
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when
/// the bracket is below `REFINE_TOL` relative to its midpoint.
fn golden_section(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<()> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > REFINE_TOL * (0.5 * (a + b)).abs().max(1e-3) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(())
}

/// Least-squares line `y = slope·x + intercept` with coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Precondition("linear fit needs >= 2 paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("linear fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub num_steps: usize,
    pub inv_n2: f64,
    pub min_gap: f64,
    pub lambda_star: f64,
}

/// Minimum gap against `1/N²` over a circuit family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySweep {
    pub points: Vec<FamilyPoint>,
    pub fit: LinearFit,
}

impl FamilySweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,inv_N2,min_gap,lambda_star\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e}\n",
                p.num_steps, p.inv_n2, p.min_gap, p.lambda_star
            ));
        }
        out
    }
}

pub fn family_gap_sweep<F>(
    exec: Execution,
    family: F,
    ns: &[usize],
    grid: &[f64],
    method: Method,
) -> Result<FamilySweep>
where
    F: Fn(usize) -> Result<Circuit> + Sync + Send,
{
    let results = par::map(exec, ns, |&n| -> Result<FamilyPoint> {
        let c = family(n)?;
        let p = gap_scan_with(exec, &c, grid, true, method)?;
        Ok(FamilyPoint {
            num_steps: n,
            inv_n2: 1.0 / (n * n) as f64,
            min_gap: p.min_gap,
            lambda_star: p.lambda_star,
        })
    });
    let points: Vec<FamilyPoint> = results.into_iter().collect::<Result<_>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.inv_n2).collect();
    let y: Vec<f64> = points.iter().map(|p| p.min_gap).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(FamilySweep { points, fit })
}

/// Variational gap estimates from the product space `Z` of per-qubit
/// zero-energy states of the non-interacting part `H₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEstimate {
    /// Lowest nonzero level of `H` restricted to `Z`: an upper bound on the gap.
    pub upper_estimate: f64,
    /// `ε_Z sin²(π/(N+1)) / (ε_Z + ‖H‖)`, a lower bound on the gap.
    pub lower_bound: f64,
    pub z_dim: usize,
    /// Zero modes found inside `Z`.
    pub zero_modes: usize,
    /// Gershgorin bound used for `‖H‖`.
    pub norm_bound: f64,
}

/// Null space of qubit `q`'s single-qubit terms on its own `2(N+1)` chain.
fn per_qubit_zero_space(circuit: &Circuit, qubit: usize, lambda: Lambda) -> Result<Vec<Vec<Complex64>>> {
    let n = circuit.num_steps();
    let b1 = BasisIndex::new(1, n)?;
    let mut h0 = OperatorMatrix::zeros(b1.dim());
    for (j0, step) in circuit.steps.iter().enumerate() {
        for op in &step.ops {
            if let Operation::Single { qubit: q, gate } = op {
                if *q == qubit {
                    h0 = h0.add(&build_single_gate_term(0, j0 + 1, gate, lambda, &b1)?);
                }
            }
        }
    }
    let pairs = dense_eigensolve(&h0, b1.dim())?;
    Ok(pairs
        .values
        .iter()
        .zip(pairs.vectors)
        .filter(|(&e, _)| e.abs() < 1e-9)
        .map(|(_, v)| v)
        .collect())
}

pub fn z_subspace_bound(circuit: &Circuit, lambda: Lambda) -> Result<BoundEstimate> {
    if !circuit.has_cnot() {
        return Err(Error::Precondition(
            "z-subspace bound needs a circuit with at least one CNOT".into(),
        ));
    }
    let m = circuit.num_qubits;
    let basis = BasisIndex::for_circuit(circuit)?;
    let spaces: Vec<Vec<Vec<Complex64>>> = (0..m)
        .map(|q| per_qubit_zero_space(circuit, q, lambda))
        .collect::<Result<_>>()?;

    // Kronecker products, qubit 0 most significant
    let mut zs: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for space in &spaces {
        let mut next = Vec::with_capacity(zs.len() * space.len());
        for z in &zs {
            for u in space {
                next.push(z.iter().flat_map(|&a| u.iter().map(move |&b| a * b)).collect());
            }
        }
        zs = next;
    }
    let z_dim = zs.len();
    let h = crate::hamiltonian::build_hamiltonian(circuit, lambda, &basis)?;
    let hz: Vec<Vec<Complex64>> = zs.iter().map(|z| h.apply(z)).collect();
    let g = Mat::<c64>::from_fn(z_dim, z_dim, |a, b| inner(&zs[a], &hz[b]));
    let restricted = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Precondition(format!("restricted eigensolver failed: {e:?}")))?;
    let zero_modes = restricted.iter().filter(|&&e| e.abs() < 1e-9).count();
    let expected = 1usize << m;
    if zero_modes != expected || z_dim <= expected {
        return Err(Error::Precondition(format!(
            "z-subspace construction failed: dim {z_dim}, {zero_modes} zero modes (expected {expected}), per-qubit null dims {:?}",
            spaces.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let upper = restricted[expected];
    let norm_bound = h.gershgorin_bound();
    let (sin2, _) = single_qubit_min_gap(circuit.num_steps());
    Ok(BoundEstimate {
        upper_estimate: upper,
        lower_bound: upper * sin2 / (upper + norm_bound),
        z_dim,
        zero_modes,
        norm_bound,
    })
}
