//! Smeared field pairings for the massless scalar vacuum: the commutator
//! pairing Delta(f_A, f_B), the Wightman norm W(f_B, f_B), and the Weyl
//! factor nu_B = exp(-2 W).
//!
//! Two independent computational routes exist for Delta:
//!
//! * momentum space — on-shell radial integral over the profile spectra,
//!   reduced to 1-D for at-rest spherically symmetric profiles:
//!   Delta = -(1/(2 pi^2)) int_0^kmax dk k G(k) sinc(k d) sin(k dt),
//!   with G the product of the four spectral factors of the pair;
//! * position space — f_A integrated against the advanced-minus-retarded
//!   wave response of f_B, reduced by spherical symmetry to a 3-deep
//!   nested quadrature over (t, rho, r).
//!
//! The routes agree within quadrature tolerances on causally connected
//! pairs and both vanish for strictly spacelike supports; keeping both
//! alive makes each one an oracle for the other.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Event;
use crate::profiles::{distance, TestFunction, SPECTRAL_CUTOFF};
use crate::quadrature::{adaptive_1d, QuadConfig, QuadratureError, QuadratureResult};

const PI: f64 = std::f64::consts::PI;

/// Sign aligning the position-space route (built from the literal
/// advanced-minus-retarded kernel) with the momentum-space commutator
/// convention. Fixed once against the momentum route on a reference
/// configuration; the capacity depends on Delta only through |cos 2 Delta|,
/// so this constant cannot affect downstream physics.
const POSITION_SIGN: f64 = -1.0;

/// Which computational route produced a pairing value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    MomentumSpace,
    PositionSpace,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::MomentumSpace => "momentum-space",
            Route::PositionSpace => "position-space",
        })
    }
}

/// Field-theoretic inputs to the capacity formula for one detector pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldPairing {
    /// Smeared commutator phase Delta(f_A, f_B); dimensionless.
    pub delta_ab: f64,
    pub delta_error: f64,
    /// Vacuum Wightman norm W(f_B, f_B) >= 0.
    pub wightman_bb: f64,
    pub wightman_error: f64,
    /// nu_B = exp(-2 W) in (0, 1].
    pub nu_b: f64,
    /// Propagated first-order error: 2 nu_B * wightman_error.
    pub nu_error: f64,
    pub route: Route,
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("Wightman norm must be non-negative, got {0}")]
    NegativeNorm(f64),
}

fn min_scale(f: &TestFunction) -> f64 {
    f.spec().switch_timescale.min(f.spec().spatial_width)
}

/// Advanced-minus-retarded response of the wave equation sourced by `f`,
/// evaluated at one event:
///
/// (Ef)(t, x) = (1/4 pi) int d3y [f(t + r, y) - f(t - r, y)] / r,
/// r = |x - y|.
///
/// The massless kernel lives on the light cone, so the value vanishes both
/// outside the causal shells of the support and deep inside them.
pub fn propagate(f: &TestFunction, at: Event, cfg: &QuadConfig) -> Result<QuadratureResult, FieldError> {
    let spec = f.spec();
    let counter = Cell::new(0u64);
    let radius = distance(at.x, spec.position);
    let sigma_reach = f.support().spatial_radius;
    let concentric = radius <= 1e-9 * spec.spatial_width;

    let geo = if concentric {
        (0.0, sigma_reach)
    } else {
        ((radius - sigma_reach).max(0.0), radius + sigma_reach)
    };

    let t0 = spec.switch_center;
    let t_half = f.support().temporal_halfwidth;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut exhausted = false;
    for branch in [Branch::Advanced, Branch::Retarded] {
        let time_window = match branch {
            Branch::Advanced => (t0 - t_half - at.t, t0 + t_half - at.t),
            Branch::Retarded => (at.t - t0 - t_half, at.t - t0 + t_half),
        };
        let Some((lo, hi)) = interval_intersection(time_window, geo) else {
            continue;
        };
        let integrand = |r: f64| {
            let chi = match branch {
                Branch::Advanced => f.temporal(at.t + r),
                Branch::Retarded => f.temporal(at.t - r),
            };
            if concentric {
                chi * r * f.radial(r)
            } else {
                chi * (f.radial_cumulative(r + radius) - f.radial_cumulative((r - radius).abs()))
            }
        };
        match adaptive_1d(
            &integrand,
            lo,
            hi,
            cfg.rel_tol,
            cfg.abs_tol,
            4,
            &counter,
            cfg.max_evals,
        ) {
            Ok(part) => {
                value += branch.sign() * part.value;
                err += part.error_estimate;
            }
            Err(QuadratureError::BudgetExhausted { best }) => {
                value += branch.sign() * best.value;
                err += best.error_estimate;
                exhausted = true;
            }
            Err(e) => return Err(e.into()),
        }
    }

    let prefactor = if concentric {
        spec.coupling
    } else {
        spec.coupling / (2.0 * radius)
    };
    let result = QuadratureResult {
        value: prefactor * value,
        error_estimate: prefactor.abs() * err,
        evaluations: counter.get().max(1),
    };
    if exhausted {
        Err(QuadratureError::BudgetExhausted { best: result }.into())
    } else {
        Ok(result)
    }
}

#[derive(Clone, Copy)]
enum Branch {
    Advanced,
    Retarded,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Advanced => 1.0,
            Branch::Retarded => -1.0,
        }
    }
}

fn interval_intersection(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if hi > lo {
        Some((lo, hi))
    } else {
        None
    }
}

/// Momentum-space pairing
/// Delta = -2 Im int d3k / ((2 pi)^3 2 |k|) conj(fhat_A) fhat_B
/// on shell (k0 = |k|), reduced to a radial integral for at-rest
/// spherically symmetric profiles.
pub fn pairing_momentum(
    fa: &TestFunction,
    fb: &TestFunction,
    cfg: &QuadConfig,
) -> Result<QuadratureResult, FieldError> {
    let sa = fa.spec();
    let sb = fb.spec();
    let dt = sb.switch_center - sa.switch_center;
    let d = distance(sa.position, sb.position);
    let amplitude = sa.coupling * sb.coupling;
    let kmax = SPECTRAL_CUTOFF / min_scale(fa).min(min_scale(fb));

    // One presplit panel per couple of phase oscillations so narrow
    // features cannot be aliased away by the first coarse pass.
    let periods = kmax * (dt.abs() + d) / (2.0 * PI);
    let presplit = (periods / 2.0).ceil().clamp(16.0, 4096.0) as usize;

    let counter = Cell::new(0u64);
    let raw = adaptive_1d(
        &|k: f64| {
            let spectral = fa.ft_temporal(k) * fb.ft_temporal(k) * fa.ft_spatial(k) * fb.ft_spatial(k);
            k * spectral * sinc(k * d) * (k * dt).sin()
        },
        0.0,
        kmax,
        cfg.rel_tol,
        cfg.abs_tol * 2.0 * PI * PI / amplitude.abs().max(1e-300),
        presplit,
        &counter,
        cfg.max_evals,
    );
    let scale = -amplitude / (2.0 * PI * PI);
    match raw {
        Ok(r) => Ok(QuadratureResult {
            value: scale * r.value,
            error_estimate: scale.abs() * r.error_estimate,
            evaluations: r.evaluations,
        }),
        Err(QuadratureError::BudgetExhausted { best }) => {
            Err(QuadratureError::BudgetExhausted {
                best: QuadratureResult {
                    value: scale * best.value,
                    error_estimate: scale.abs() * best.error_estimate,
                    evaluations: best.evaluations,
                },
            }
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

/// Vacuum Wightman norm
/// W = int d3k / ((2 pi)^3 2 |k|) |fhat_B|^2
///   = (1/(4 pi^2)) int_0^kmax dk k |fhat_B(k)|^2, non-negative.
pub fn wightman_norm(fb: &TestFunction, cfg: &QuadConfig) -> Result<QuadratureResult, FieldError> {
    let lambda = fb.spec().coupling;
    let kmax = SPECTRAL_CUTOFF / min_scale(fb);
    let counter = Cell::new(0u64);
    let raw = adaptive_1d(
        &|k: f64| {
            let amp = fb.ft_temporal(k) * fb.ft_spatial(k);
            k * amp * amp
        },
        0.0,
        kmax,
        cfg.rel_tol,
        cfg.abs_tol * 4.0 * PI * PI / (lambda * lambda).max(1e-300),
        16,
        &counter,
        cfg.max_evals,
    );
    let scale = lambda * lambda / (4.0 * PI * PI);
    match raw {
        Ok(r) => Ok(QuadratureResult {
            value: scale * r.value,
            error_estimate: scale * r.error_estimate,
            evaluations: r.evaluations,
        }),
        Err(QuadratureError::BudgetExhausted { best }) => {
            Err(QuadratureError::BudgetExhausted {
                best: QuadratureResult {
                    value: scale * best.value,
                    error_estimate: scale * best.error_estimate,
                    evaluations: best.evaluations,
                },
            }
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

/// Weyl factor nu_B = exp(-2 W) of the vacuum quasi-free state.
///
/// Stays in (0, 1]: for enormous norms, where exp(-2W) underflows, the
/// smallest positive float is returned so the downstream capacity degrades
/// smoothly to zero instead of erroring.
pub fn nu_from_norm(w: f64) -> Result<f64, FieldError> {
    if w < 0.0 || w.is_nan() {
        return Err(FieldError::NegativeNorm(w));
    }
    Ok((-2.0 * w).exp().max(f64::MIN_POSITIVE))
}

/// Position-space pairing: f_A integrated against the advanced-minus-
/// retarded response of f_B, spherically reduced to nested quadrature over
/// (t, rho, r) with the radial shell average done in closed form through
/// the cumulative moments H and H2 of f_B's spatial profile.
pub fn pairing_position(
    fa: &TestFunction,
    fb: &TestFunction,
    cfg: &QuadConfig,
) -> Result<QuadratureResult, FieldError> {
    let sa = fa.spec();
    let sb = fb.spec();
    let d = distance(sa.position, sb.position);
    let amplitude = sa.coupling * sb.coupling;

    let concentric = d <= 1e-6 * sa.spatial_width.max(sb.spatial_width);
    let prefactor = POSITION_SIGN * amplitude * if concentric { 2.0 * PI } else { PI / d };

    let t_center = sa.switch_center;
    let t_half = fa.support().temporal_halfwidth;
    let rho_max = fa.support().spatial_radius;
    let sigma_reach_b = fb.support().spatial_radius;
    let tb0 = sb.switch_center;
    let tb_half = fb.support().temporal_halfwidth;

    // Raw-integral tolerances: undo the prefactor so the final scaled
    // result meets the caller's request; inner levels run tighter.
    let raw_abs = cfg.abs_tol / prefactor.abs().max(1e-300);
    let rel = cfg.rel_tol * 0.25;
    let abs_t = raw_abs;
    let abs_rho = raw_abs * 0.25 / (2.0 * t_half);
    let abs_r = abs_rho * 0.25 / rho_max;

    let counter = Cell::new(0u64);
    let exhausted = Cell::new(false);
    let err_rho_max = Cell::new(0.0f64);
    let err_r_max = Cell::new(0.0f64);

    let run = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, abs: f64, presplit: usize| -> (f64, f64) {
        match adaptive_1d(&f, lo, hi, rel, abs, presplit, &counter, cfg.max_evals) {
            Ok(r) => (r.value, r.error_estimate),
            Err(QuadratureError::BudgetExhausted { best }) => {
                exhausted.set(true);
                (best.value, best.error_estimate)
            }
            Err(_) => unreachable!("bounds are finite and ordered"),
        }
    };

    let t_integrand = |t: f64| -> f64 {
        let chi_a = fa.temporal(t);
        if chi_a == 0.0 {
            return 0.0;
        }
        let rho_integrand = |rho: f64| -> f64 {
            let weight = rho * fa.radial(rho);
            if weight == 0.0 {
                return 0.0;
            }
            let (r1, r2) = if concentric {
                (rho, rho)
            } else {
                ((rho - d).abs(), rho + d)
            };
            let geo = ((r1 - sigma_reach_b).max(0.0), r2 + sigma_reach_b);
            let shell = |r: f64| -> f64 {
                if concentric {
                    // Psi collapses to 2 rho Phi(r, rho); the 2 rho is in
                    // the prefactor (2 pi vs pi/d).
                    fb.radial_cumulative(r + rho) - fb.radial_cumulative((r - rho).abs())
                } else {
                    shell_average(fb, r, r1, r2)
                }
            };
            let mut acc = 0.0;
            let mut errs = 0.0;
            for branch in [Branch::Advanced, Branch::Retarded] {
                let time_window = match branch {
                    Branch::Advanced => (tb0 - tb_half - t, tb0 + tb_half - t),
                    Branch::Retarded => (t - tb0 - tb_half, t - tb0 + tb_half),
                };
                let Some((lo, hi)) = interval_intersection(time_window, geo) else {
                    continue;
                };
                let integrand = |r: f64| {
                    let chi = match branch {
                        Branch::Advanced => fb.temporal(t + r),
                        Branch::Retarded => fb.temporal(t - r),
                    };
                    chi * shell(r)
                };
                let (v, e) = run(&integrand, lo, hi, abs_r, 4);
                acc += branch.sign() * v;
                errs += e;
            }
            err_r_max.set(err_r_max.get().max(errs));
            weight * acc
        };
        let (v, e) = run(&rho_integrand, 0.0, rho_max, abs_rho, 8);
        err_rho_max.set(err_rho_max.get().max(e));
        chi_a * v
    };

    let (t_val, t_err) = run(&t_integrand, t_center - t_half, t_center + t_half, abs_t, 8);

    let raw_err = t_err + 2.0 * t_half * (err_rho_max.get() + rho_max * err_r_max.get());
    let result = QuadratureResult {
        value: prefactor * t_val,
        error_estimate: prefactor.abs() * raw_err,
        evaluations: counter.get().max(1),
    };
    if exhausted.get() {
        Err(QuadratureError::BudgetExhausted { best: result }.into())
    } else {
        Ok(result)
    }
}

/// Closed-form radial shell average
/// Psi(r; R1, R2) = int_{R1}^{R2} [H(r + R) - H(|r - R|)] dR
/// expressed through the double cumulative H2.
fn shell_average(fb: &TestFunction, r: f64, r1: f64, r2: f64) -> f64 {
    let h2 = |z: f64| fb.radial_cumulative2(z);
    (h2(r + r2) - h2(r + r1)) + (h2((r - r2).max(0.0)) - h2((r - r1).max(0.0)))
        - (h2((r2 - r).max(0.0)) - h2((r1 - r).max(0.0)))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Compute Delta along the requested route together with Bob's Wightman
/// norm and nu_B.
pub fn compute_pairing(
    fa: &TestFunction,
    fb: &TestFunction,
    route: Route,
    cfg: &QuadConfig,
) -> Result<FieldPairing, FieldError> {
    let delta = match route {
        Route::MomentumSpace => pairing_momentum(fa, fb, cfg)?,
        Route::PositionSpace => pairing_position(fa, fb, cfg)?,
    };
    let w = wightman_norm(fb, cfg)?;
    let nu_b = nu_from_norm(w.value)?;
    Ok(FieldPairing {
        delta_ab: delta.value,
        delta_error: delta.error_estimate,
        wightman_bb: w.value,
        wightman_error: w.error_estimate,
        nu_b,
        nu_error: 2.0 * nu_b * w.error_estimate,
        route,
    })
}
