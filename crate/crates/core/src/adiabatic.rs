//! Time evolution under `H(λ(t/T))` from the λ = 0 ground state.
//!
//! Times are in units of ℏ/𝓔. The integrator is the fourth-order
//! commutator-free Magnus scheme with two exponentials per step, each
//! applied by a truncated Taylor series on the sparse operator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{ground_state, initial_state, inner, norm, BasisIndex, Lambda};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::hamiltonian::{LambdaPolynomial, MAX_LAMBDA_POWER};
use crate::par::{self, Execution};
use crate::spectral::{self, GapProfile, Method};

/// Intervals in every trace; traces carry `TRACE_INTERVALS + 1` samples.
pub const TRACE_INTERVALS: usize = 200;

/// Largest accepted `dt · ‖H‖`.
pub const DT_NORM_PRODUCT: f64 = 0.1;

/// Runs abort once `|‖ψ‖ - 1|` exceeds this.
pub const NORM_DRIFT_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Linear,
    GapAdapted,
    UserTable,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::GapAdapted => "gap-adapted",
            ScheduleKind::UserTable => "user-table",
        })
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ScheduleKind::Linear),
            "gap-adapted" | "gap_adapted" => Ok(ScheduleKind::GapAdapted),
            "user-table" | "user_table" => Ok(ScheduleKind::UserTable),
            other => Err(Error::InvalidSchedule(format!(
                "unknown schedule '{other}' (expected linear|gap-adapted)"
            ))),
        }
    }
}

/// `λ(s)` on `s ∈ [0, 1]`, piecewise linear through `knots`, run over total
/// time `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub total_time: f64,
    knots: Vec<(f64, f64)>,
}

/// Resolution of the tabulated gap-adapted map.
const GAP_TABLE_POINTS: usize = 4001;

impl Schedule {
    pub fn linear(total_time: f64) -> Result<Self> {
        check_time(total_time)?;
        Ok(Self {
            kind: ScheduleKind::Linear,
            total_time,
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        })
    }

    /// `dλ/ds ∝ gap(λ)²`, with the gap interpolated from `profile`.
    pub fn gap_adapted(total_time: f64, profile: &GapProfile) -> Result<Self> {
        check_time(total_time)?;
        let first = profile.samples.first().map(|p| p.lambda);
        let last = profile.samples.last().map(|p| p.lambda);
        if first != Some(0.0) || last != Some(1.0) {
            return Err(Error::InvalidSchedule(
                "gap-adapted schedule needs a gap profile covering lambda in [0, 1]".into(),
            ));
        }
        Self::from_gap_fn(total_time, |l| profile.gap_at(l))
    }

    /// Same pacing with an explicit gap function.
    pub fn from_gap_fn(total_time: f64, gap: impl Fn(f64) -> f64) -> Result<Self> {
        check_time(total_time)?;
        let n = GAP_TABLE_POINTS;
        let lambdas: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let mut weight = Vec::with_capacity(n);
        for &l in &lambdas {
            let g = gap(l);
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "gap {g} at lambda {l} is not positive"
                )));
            }
            weight.push(1.0 / (g * g));
        }
        let mut s = vec![0.0; n];
        for i in 1..n {
            s[i] = s[i - 1] + 0.5 * (weight[i] + weight[i - 1]) * (lambdas[i] - lambdas[i - 1]);
        }
        let total = s[n - 1];
        let knots = s
            .into_iter()
            .zip(lambdas)
            .map(|(si, l)| (si / total, l))
            .collect();
        Ok(Self {
            kind: ScheduleKind::GapAdapted,
            total_time,
            knots,
        })
    }

    /// Piecewise-linear `(s, λ)` table; must start at `(0, 0)`, end at
    /// `(1, 1)`, with `s` increasing and `λ` nondecreasing.
    pub fn user_table(total_time: f64, table: &[(f64, f64)]) -> Result<Self> {
        check_time(total_time)?;
        if table.len() < 2 || table[0] != (0.0, 0.0) || *table.last().unwrap() != (1.0, 1.0) {
            return Err(Error::InvalidSchedule(
                "table must start at (0, 0) and end at (1, 1)".into(),
            ));
        }
        for w in table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidSchedule(format!(
                    "s values must increase ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidSchedule(format!(
                    "lambda decreases from {} to {} at s = {}",
                    w[0].1, w[1].1, w[1].0
                )));
            }
        }
        Ok(Self {
            kind: ScheduleKind::UserTable,
            total_time,
            knots: table.to_vec(),
        })
    }

    fn segment(&self, s: f64) -> usize {
        let s = s.clamp(0.0, 1.0);
        match self.knots.partition_point(|k| k.0 <= s) {
            0 => 0,
            i if i >= self.knots.len() => self.knots.len() - 2,
            i => i - 1,
        }
    }

    pub fn lambda_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let i = self.segment(s);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let t = (s - a.0) / (b.0 - a.0);
        (a.1 + t * (b.1 - a.1)).clamp(0.0, 1.0)
    }

    /// `dλ/ds` on the segment containing `s`.
    pub fn slope_at(&self, s: f64) -> f64 {
        let i = self.segment(s);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        (b.1 - a.1) / (b.0 - a.0)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidSchedule(format!(
            "total time {t} must be finite and >= 0"
        )));
    }
    Ok(())
}

pub fn make_schedule(kind: ScheduleKind, total_time: f64, profile: Option<&GapProfile>) -> Result<Schedule> {
    match kind {
        ScheduleKind::Linear => Schedule::linear(total_time),
        ScheduleKind::GapAdapted => {
            let p = profile.ok_or_else(|| {
                Error::InvalidSchedule("gap-adapted schedule needs a gap profile".into())
            })?;
            Schedule::gap_adapted(total_time, p)
        }
        ScheduleKind::UserTable => Err(Error::InvalidSchedule(
            "user-table schedules are built with Schedule::user_table".into(),
        )),
    }
}

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // √3/6
const NODE1: f64 = 0.5 - SQRT3_6;
const NODE2: f64 = 0.5 + SQRT3_6;
const ALPHA1: f64 = 0.25 + SQRT3_6;
const ALPHA2: f64 = 0.25 - SQRT3_6;

/// Fourth-order commutator-free Magnus stepper for `H(λ) = Σ_p λ^p H_p`.
pub struct Propagator<'a> {
    poly: &'a LambdaPolynomial,
    exec: Execution,
    work: Vec<Complex64>,
    term: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(poly: &'a LambdaPolynomial, exec: Execution) -> Self {
        let n = poly.dim();
        Self {
            poly,
            exec,
            work: vec![Complex64::new(0.0, 0.0); n],
            term: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// `ψ ← exp(-i dt Σ_p w_p H_p) ψ` by Taylor series.
    fn exp_apply(&mut self, weights: &[f64; MAX_LAMBDA_POWER + 1], dt: f64, psi: &mut [Complex64]) {
        self.term.copy_from_slice(psi);
        let minus_i_dt = Complex64::new(0.0, -dt);
        for k in 1..=60 {
            self.poly
                .apply_combination(self.exec, weights, &self.term, &mut self.work);
            let f = minus_i_dt / k as f64;
            let mut size = 0.0;
            for ((t, w), p) in self.term.iter_mut().zip(&self.work).zip(psi.iter_mut()) {
                *t = w * f;
                *p += *t;
                size += t.norm_sqr();
            }
            if size.sqrt() <= 1e-17 {
                break;
            }
        }
    }

    /// One step from `λ(t)` to `λ(t + dt)` given the couplings at the two
    /// Gauss nodes.
    pub fn step(&mut self, psi: &mut [Complex64], lambda1: f64, lambda2: f64, dt: f64) {
        let p1 = LambdaPolynomial::powers(lambda1);
        let p2 = LambdaPolynomial::powers(lambda2);
        let mut first = [0.0; MAX_LAMBDA_POWER + 1];
        let mut second = [0.0; MAX_LAMBDA_POWER + 1];
        for k in 0..=MAX_LAMBDA_POWER {
            first[k] = ALPHA1 * p1[k] + ALPHA2 * p2[k];
            second[k] = ALPHA2 * p1[k] + ALPHA1 * p2[k];
        }
        self.exp_apply(&first, dt, psi);
        self.exp_apply(&second, dt, psi);
    }

    /// Evolution at fixed `λ` for `steps` steps.
    pub fn evolve_frozen(&mut self, psi: &mut [Complex64], lambda: f64, dt: f64, steps: usize) {
        for _ in 0..steps {
            self.step(psi, lambda, lambda, dt);
        }
    }

    pub fn energy(&mut self, psi: &[Complex64], lambda: f64) -> f64 {
        self.poly
            .apply_combination(self.exec, &LambdaPolynomial::powers(lambda), psi, &mut self.work);
        inner(psi, &self.work).re
    }
}

/// Largest admissible time step for `circuit`.
pub fn max_dt(circuit: &Circuit) -> Result<f64> {
    let basis = BasisIndex::for_circuit(circuit)?;
    let poly = LambdaPolynomial::new(circuit, &basis)?;
    Ok(DT_NORM_PRODUCT / poly.norm_bound())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    pub s: f64,
    pub lambda: f64,
    pub fidelity: f64,
    pub energy: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub circuit: String,
    pub schedule: ScheduleKind,
    pub total_time: f64,
    /// Step size actually used (`T / steps`, never above the requested dt).
    pub dt: f64,
    pub steps: usize,
    pub samples: Vec<TraceSample>,
    pub final_fidelity: f64,
    pub max_norm_drift: f64,
    pub final_state: Vec<Complex64>,
}

impl EvolutionTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,s,lambda,fidelity,energy,norm\n");
        for p in &self.samples {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.15e}\n",
                p.t, p.s, p.lambda, p.fidelity, p.energy, p.norm
            ));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "circuit": self.circuit,
            "T": self.total_time,
            "final_fidelity": self.final_fidelity,
            "schedule": self.schedule.to_string(),
            "dt": self.dt,
            "steps": self.steps,
            "max_norm_drift": self.max_norm_drift,
            "time_units": "hbar / E",
        })
    }
}

pub fn evolve(circuit: &Circuit, schedule: &Schedule, dt: f64) -> Result<EvolutionTrace> {
    evolve_with(Execution::default(), circuit, schedule, dt)
}

pub fn evolve_with(exec: Execution, circuit: &Circuit, schedule: &Schedule, dt: f64) -> Result<EvolutionTrace> {
    let basis = BasisIndex::for_circuit(circuit)?;
    let poly = LambdaPolynomial::new_with(exec, circuit, &basis)?;
    let bound = poly.norm_bound();
    let limit = DT_NORM_PRODUCT / bound;
    if !(dt > 0.0) || dt > limit {
        return Err(Error::DtTooLarge {
            dt,
            norm_bound: bound,
            suggested: limit,
        });
    }
    let total = schedule.total_time;
    let steps = if total == 0.0 {
        0
    } else {
        let raw = (total / dt).ceil() as usize;
        raw.div_ceil(TRACE_INTERVALS).max(1) * TRACE_INTERVALS
    };
    let h = if steps == 0 { 0.0 } else { total / steps as f64 };

    let target = |l: f64| ground_state(circuit, Lambda::clamped(l), &basis);
    let mut psi = initial_state(&basis).amplitudes;
    let mut prop = Propagator::new(&poly, exec);
    let mut samples = Vec::with_capacity(TRACE_INTERVALS + 1);
    let mut max_drift: f64 = 0.0;

    let mut record = |psi: &[Complex64], k: usize, prop: &mut Propagator| -> Result<()> {
        let s = k as f64 / TRACE_INTERVALS as f64;
        let lambda = schedule.lambda_at(s);
        let gs = target(lambda)?;
        samples.push(TraceSample {
            t: s * total,
            s,
            lambda,
            fidelity: inner(&gs.amplitudes, psi).norm_sqr(),
            energy: prop.energy(psi, lambda),
            norm: norm(psi),
        });
        Ok(())
    };

    record(&psi, 0, &mut prop)?;
    let per_sample = steps / TRACE_INTERVALS;
    for k in 1..=TRACE_INTERVALS {
        for i in 0..per_sample {
            let n = (k - 1) * per_sample + i;
            let t0 = n as f64 * h;
            let l1 = schedule.lambda_at((t0 + NODE1 * h) / total);
            let l2 = schedule.lambda_at((t0 + NODE2 * h) / total);
            prop.step(&mut psi, l1, l2, h);
            let drift = (norm(&psi) - 1.0).abs();
            max_drift = max_drift.max(drift);
            if drift > NORM_DRIFT_ABORT {
                return Err(Error::NormDrift {
                    drift,
                    time: t0 + h,
                    dt: h,
                });
            }
        }
        record(&psi, k, &mut prop)?;
    }
    let final_fidelity = samples.last().unwrap().fidelity;
    Ok(EvolutionTrace {
        circuit: circuit.name.clone(),
        schedule: schedule.kind,
        total_time: total,
        dt: if steps == 0 { dt } else { h },
        steps,
        samples,
        final_fidelity,
        max_norm_drift: max_drift,
        final_state: psi,
    })
}

/// Smallest `T` reaching a target fidelity, per family member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunningTimeRow {
    pub num_steps: usize,
    pub time_required: f64,
    pub min_gap: f64,
    pub final_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunningTimeTable {
    pub target_fidelity: f64,
    pub rows: Vec<RunningTimeRow>,
    /// Fitted `T ∝ N^exponent`.
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

impl RunningTimeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,T_required,min_gap,final_fidelity\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e}\n",
                r.num_steps, r.time_required, r.min_gap, r.final_fidelity
            ));
        }
        out
    }
}

/// Relative width at which the T bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-3;
/// Upper limit on T during bracketing.
pub const MAX_BRACKET_TIME: f64 = 1e6;

/// Gap-adapted schedule for `circuit` from a refined dense gap scan.
pub fn gap_adapted_for(circuit: &Circuit, total_time: f64) -> Result<Schedule> {
    let grid = spectral::lambda_grid(0.0, 1.0, 101)?;
    let profile = spectral::gap_scan_with(Execution::Sequential, circuit, &grid, true, Method::Dense)?;
    Schedule::gap_adapted(total_time, &profile)
}

/// Smallest `T` (to `BISECTION_REL_TOL`) with `final_fidelity >= target`
/// under the gap-adapted schedule.
pub fn time_required(circuit: &Circuit, profile: &GapProfile, target: f64) -> Result<(f64, f64)> {
    let dt = max_dt(circuit)?;
    let fid = |t: f64| -> Result<f64> {
        let sched = Schedule::gap_adapted(t, profile)?;
        Ok(evolve_with(Execution::Sequential, circuit, &sched, dt)?.final_fidelity)
    };
    let mut hi = 1.0;
    let mut f_hi = fid(hi)?;
    while f_hi < target {
        if hi >= MAX_BRACKET_TIME {
            return Err(Error::BisectionCap { lo: hi / 2.0, hi });
        }
        hi *= 2.0;
        f_hi = fid(hi)?;
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    while (hi - lo) / hi >= BISECTION_REL_TOL {
        let mid = 0.5 * (lo + hi);
        let f = fid(mid)?;
        if f >= target {
            hi = mid;
            f_hi = f;
        } else {
            lo = mid;
        }
    }
    Ok((hi, f_hi))
}

pub fn running_time_scaling<F>(
    exec: Execution,
    family: F,
    ns: &[usize],
    target_fidelity: f64,
) -> Result<RunningTimeTable>
where
    F: Fn(usize) -> Result<Circuit> + Sync + Send,
{
    if !(target_fidelity > 0.0 && target_fidelity < 1.0) {
        return Err(Error::Precondition(format!(
            "target fidelity {target_fidelity} must lie in (0, 1)"
        )));
    }
    let rows = par::map(exec, ns, |&n| -> Result<RunningTimeRow> {
        let c = family(n)?;
        let grid = spectral::lambda_grid(0.0, 1.0, 101)?;
        let profile = spectral::gap_scan_with(Execution::Sequential, &c, &grid, true, Method::Dense)?;
        let (t, f) = time_required(&c, &profile, target_fidelity)?;
        Ok(RunningTimeRow {
            num_steps: n,
            time_required: t,
            min_gap: profile.min_gap,
            final_fidelity: f,
        })
    });
    let rows: Vec<RunningTimeRow> = rows.into_iter().collect::<Result<_>>()?;
    let (exponent, prefactor, r_squared) = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| (r.num_steps as f64).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.time_required.ln()).collect();
        let fit = spectral::linear_fit(&x, &y)?;
        (fit.slope, fit.intercept.exp(), fit.r_squared)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(RunningTimeTable {
        target_fidelity,
        rows,
        exponent,
        prefactor,
        r_squared,
    })
}
