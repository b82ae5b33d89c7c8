//! Adaptive one-dimensional quadrature, iterated multi-dimensional
//! quadrature over boxes, and a seeded Monte-Carlo integrator used as an
//! independent cross-check.
//!
//! The 1-D kernel is the 15-point Kronrod extension of 7-point
//! Gauss-Legendre with the QUADPACK error rescaling. Adaptive refinement
//! splits the worst panel first with a deterministic tie-break, so results
//! are bit-reproducible across runs on the same platform. Every routine
//! reports an error estimate next to the value and counts integrand
//! evaluations against a hard budget; exhausting the budget is an error
//! that still carries the best value obtained so far.

use std::cell::{Cell, RefCell};
use std::collections::BinaryHeap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Highest box dimension accepted by [`integrate_nd`].
pub const MAX_DIM: usize = 7;

/// Smallest sample count accepted by [`monte_carlo`].
pub const MIN_MC_SAMPLES: u64 = 1_000;

/// Value, error estimate, and evaluation count of one integration call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error; an estimate, not a strict bound.
    pub error_estimate: f64,
    /// Quadrature node visits spent on this call (all nesting levels).
    pub evaluations: u64,
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("evaluation budget exhausted after {} evaluations; best value {:e} \u{b1} {:e}",
            best.evaluations, best.value, best.error_estimate)]
    BudgetExhausted { best: QuadratureResult },
    #[error("invalid integration bounds [{a}, {b}]; need finite a < b")]
    InvalidBounds { a: f64, b: f64 },
    #[error("tolerances must be positive and finite; got rel={rel:e}, abs={abs:e}")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("{dim}-dimensional box exceeds the supported maximum of 7")]
    DimensionTooHigh { dim: usize },
    #[error("integration box must have at least one dimension")]
    EmptyBox,
    #[error("monte_carlo needs at least 1000 samples, got {got}")]
    TooFewSamples { got: u64 },
}

/// Tolerances and evaluation budget for one top-level integration call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_evals: 10_000_000,
        }
    }
}

impl QuadConfig {
    fn validate(&self) -> Result<(), QuadratureError> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(QuadratureError::InvalidTolerance {
                rel: self.rel_tol,
                abs: self.abs_tol,
            });
        }
        Ok(())
    }
}

// 15-point Kronrod extension of 7-point Gauss-Legendre (QUADPACK dqk15).
// Odd-indexed abscissae are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct PanelEval {
    value: f64,
    err: f64,
    resabs: f64,
}

/// QUADPACK-style error rescaling from the raw Kronrod/Gauss difference.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err.abs();
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

#[allow(clippy::needless_range_loop)]
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> PanelEval {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_gauss = fc * WG[3];
    let mut res_kronrod = fc * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for j in 0..3 {
        let idx = 2 * j + 1;
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        let fsum = f1 + f2;
        res_gauss += WG[j] * fsum;
        res_kronrod += WGK[idx] * fsum;
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let idx = 2 * j;
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for idx in 0..7 {
        res_asc += WGK[idx] * ((fv1[idx] - mean).abs() + (fv2[idx] - mean).abs());
    }
    res_abs *= abs_half;
    res_asc *= abs_half;

    let value = res_kronrod * half;
    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    PanelEval {
        value,
        err: rescale_error(raw_err, res_abs, res_asc),
        resabs: res_abs,
    }
}

/// Composite fixed-panel Kronrod rule without adaptivity or error
/// estimation. Used for building spectral caches where the panel count is
/// chosen from the known oscillation scale.
pub(crate) fn fixed_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let width = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let pa = a + width * i as f64;
        let pb = if i + 1 == n { b } else { a + width * (i + 1) as f64 };
        total += gk15(f, pa, pb).value;
    }
    total
}

#[derive(Debug)]
struct Panel {
    err: f64,
    seq: u64,
    a: f64,
    b: f64,
    value: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Worst error pops first; older panel wins ties for determinism.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive Gauss-Kronrod core over a shared evaluation counter.
///
/// `presplit` panels are evaluated up front regardless of budget so the
/// caller always gets full interval coverage; the budget gates refinement.
#[allow(clippy::too_many_arguments)]
pub(crate) fn adaptive_1d<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    presplit: usize,
    counter: &Cell<u64>,
    max_evals: u64,
) -> Result<QuadratureResult, QuadratureError> {
    let start = counter.get();
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    debug_assert!(a < b);

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut frozen: Vec<(f64, f64)> = Vec::new();
    let mut active_val = 0.0;
    let mut active_err = 0.0;

    let n0 = presplit.max(1);
    let width = b - a;
    for i in 0..n0 {
        let pa = a + width * i as f64 / n0 as f64;
        let pb = if i + 1 == n0 {
            b
        } else {
            a + width * (i + 1) as f64 / n0 as f64
        };
        counter.set(counter.get() + 15);
        let ev = gk15(f, pa, pb);
        active_val += ev.value;
        active_err += ev.err;
        heap.push(Panel {
            err: ev.err,
            seq,
            a: pa,
            b: pb,
            value: ev.value,
            resabs: ev.resabs,
        });
        seq += 1;
    }

    let mut frozen_val = 0.0;
    let mut frozen_err = 0.0;
    loop {
        let total_val = frozen_val + active_val;
        let total_err = frozen_err + active_err;
        let target = abs_tol.max(rel_tol * total_val.abs());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        active_val -= worst.value;
        active_err -= worst.err;

        let panel_width = worst.b - worst.a;
        let too_narrow = panel_width < 1e-13 * (worst.a.abs() + worst.b.abs() + 1e-30);
        let at_noise_floor = worst.err <= 55.0 * f64::EPSILON * worst.resabs;
        if too_narrow || at_noise_floor || worst.err == 0.0 {
            frozen_val += worst.value;
            frozen_err += worst.err;
            frozen.push((worst.value, worst.err));
            continue;
        }

        if counter.get() + 30 > max_evals {
            let mut value = worst.value;
            let mut err = worst.err;
            for (v, e) in &frozen {
                value += v;
                err += e;
            }
            for p in heap.iter() {
                value += p.value;
                err += p.err;
            }
            return Err(QuadratureError::BudgetExhausted {
                best: QuadratureResult {
                    value,
                    error_estimate: err,
                    evaluations: counter.get() - start,
                },
            });
        }
        counter.set(counter.get() + 30);
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        active_val += left.value + right.value;
        active_err += left.err + right.err;
        heap.push(Panel {
            err: left.err,
            seq,
            a: worst.a,
            b: mid,
            value: left.value,
            resabs: left.resabs,
        });
        seq += 1;
        heap.push(Panel {
            err: right.err,
            seq,
            a: mid,
            b: worst.b,
            value: right.value,
            resabs: right.resabs,
        });
        seq += 1;
    }

    // Precise final summation independent of the incremental loop sums.
    let mut value = 0.0;
    let mut err = 0.0;
    for (v, e) in &frozen {
        value += v;
        err += e;
    }
    for p in heap.iter() {
        value += p.value;
        err += p.err;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: err,
        evaluations: counter.get() - start,
    })
}

fn validate_bounds(a: f64, b: f64) -> Result<(), QuadratureError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidBounds { a, b });
    }
    Ok(())
}

/// Adaptive integration of `f` over `[a, b]` until the estimated error
/// drops below `max(rel_tol * |value|, abs_tol)` or the budget runs out.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadratureResult, QuadratureError> {
    validate_bounds(a, b)?;
    cfg.validate()?;
    let counter = Cell::new(0u64);
    adaptive_1d(&f, a, b, cfg.rel_tol, cfg.abs_tol, 1, &counter, cfg.max_evals)
}

struct NdState<'a, F> {
    f: &'a F,
    bounds: &'a [(f64, f64)],
    coords: RefCell<Vec<f64>>,
    counter: &'a Cell<u64>,
    max_evals: u64,
    rel_tol: f64,
    abs_tol: f64,
    exhausted: Cell<bool>,
}

impl<F: Fn(&[f64]) -> f64> NdState<'_, F> {
    fn level_tol(&self, level: usize) -> (f64, f64) {
        if level == 0 {
            (self.rel_tol, self.abs_tol)
        } else {
            let outer: f64 = self.bounds[..level].iter().map(|(a, b)| b - a).product();
            (
                self.rel_tol,
                (self.abs_tol * 0.25 / outer.max(1.0)).max(1e-290),
            )
        }
    }

    /// Returns (value, error incl. child errors) for the integral over
    /// dimensions `level..`.
    fn integrate_level(&self, level: usize) -> (f64, f64) {
        let (a, b) = self.bounds[level];
        let last = level + 1 == self.bounds.len();
        let (rel, abs) = self.level_tol(level);
        let child_err = Cell::new(0.0f64);
        let integrand = |x: f64| -> f64 {
            self.coords.borrow_mut()[level] = x;
            if last {
                (self.f)(&self.coords.borrow())
            } else {
                let (v, e) = self.integrate_level(level + 1);
                child_err.set(child_err.get().max(e));
                v
            }
        };
        match adaptive_1d(&integrand, a, b, rel, abs, 1, self.counter, self.max_evals) {
            Ok(r) => (r.value, r.error_estimate + (b - a) * child_err.get()),
            Err(QuadratureError::BudgetExhausted { best }) => {
                self.exhausted.set(true);
                (best.value, best.error_estimate + (b - a) * child_err.get())
            }
            Err(_) => unreachable!("bounds validated before recursion"),
        }
    }
}

/// Iterated adaptive integration over a rectangular box of dimension <= 7.
///
/// Inner dimensions run with tightened tolerances; their worst observed
/// error propagates into the reported estimate.
pub fn integrate_nd<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    cfg: &QuadConfig,
) -> Result<QuadratureResult, QuadratureError> {
    if bounds.is_empty() {
        return Err(QuadratureError::EmptyBox);
    }
    if bounds.len() > MAX_DIM {
        return Err(QuadratureError::DimensionTooHigh { dim: bounds.len() });
    }
    for &(a, b) in bounds {
        validate_bounds(a, b)?;
    }
    cfg.validate()?;

    let counter = Cell::new(0u64);
    let state = NdState {
        f: &f,
        bounds,
        coords: RefCell::new(vec![0.0; bounds.len()]),
        counter: &counter,
        max_evals: cfg.max_evals,
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        exhausted: Cell::new(false),
    };
    let (value, err) = state.integrate_level(0);
    let result = QuadratureResult {
        value,
        error_estimate: err,
        evaluations: counter.get(),
    };
    if state.exhausted.get() {
        Err(QuadratureError::BudgetExhausted { best: result })
    } else {
        Ok(result)
    }
}

/// Plain Monte-Carlo estimate `volume * mean` with the standard error of
/// the mean as the error estimate. Deterministic for a fixed seed.
pub fn monte_carlo<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    samples: u64,
    seed: u64,
) -> Result<QuadratureResult, QuadratureError> {
    if bounds.is_empty() {
        return Err(QuadratureError::EmptyBox);
    }
    for &(a, b) in bounds {
        validate_bounds(a, b)?;
    }
    if samples < MIN_MC_SAMPLES {
        return Err(QuadratureError::TooFewSamples { got: samples });
    }

    let volume: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0f64; bounds.len()];
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    const INV_2_53: f64 = 1.0 / 9_007_199_254_740_992.0;
    for i in 1..=samples {
        for (c, &(a, b)) in point.iter_mut().zip(bounds) {
            let u = (rng.next_u64() >> 11) as f64 * INV_2_53;
            *c = a + (b - a) * u;
        }
        let v = f(&point);
        let delta = v - mean;
        mean += delta / i as f64;
        m2 += delta * (v - mean);
    }
    let variance = if samples > 1 {
        m2 / (samples - 1) as f64
    } else {
        0.0
    };
    Ok(QuadratureResult {
        value: volume * mean,
        error_estimate: volume.abs() * (variance / samples as f64).sqrt(),
        evaluations: samples,
    })
}
