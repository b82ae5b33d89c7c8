//! Built-in invariant checks runnable from the CLI (`lightcone selftest`).
//!
//! Fast spot checks of the load-bearing identities on fixed
//! configurations; the full acceptance suite lives in the test tree.

use std::f64::consts::{FRAC_PI_4, LN_2};

use crate::channel::{binary_entropy, capacity};
use crate::field::{pairing_momentum, pairing_position, wightman_norm};
use crate::geometry::{classify_supports, CausalClass};
use crate::profiles::{build_test_function, DetectorLabel, DetectorSpec, ProfileKind};
use crate::quadrature::{integrate_1d, QuadConfig};
use crate::scenario::{run_scenario, scenario_hash, Scenario};
use crate::thermo::{
    carnot_efficiency, coupling_bound, extracted_work, heat_reservoir, landauer_heat,
    ReservoirSpec,
};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn detector(
    label: DetectorLabel,
    position: [f64; 3],
    t0: f64,
    kind: ProfileKind,
) -> DetectorSpec {
    DetectorSpec {
        label,
        position,
        switch_center: t0,
        switch_timescale: 0.5,
        coupling: 1.0,
        spatial_width: 0.5,
        profile_kind: kind,
    }
}

/// Run the invariant suite on built-in configurations.
pub fn run_selftest() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let cfg = QuadConfig::default();

    // Quadrature exactness.
    let q = integrate_1d(|u| u * u, 0.0, 1.0, &cfg);
    results.push(match q {
        Ok(r) => check(
            "quadrature polynomial exactness",
            (r.value - 1.0 / 3.0).abs() <= 1e-13,
            format!("integral of u^2 over [0,1] = {}", r.value),
        ),
        Err(e) => check("quadrature polynomial exactness", false, e.to_string()),
    });

    // Capacity extremes.
    let c1 = capacity(FRAC_PI_4, 1.0).unwrap_or(f64::NAN);
    results.push(check(
        "capacity peak",
        (c1 - 1.0).abs() <= 1e-9,
        format!("capacity(pi/4, 1) = {c1}"),
    ));
    let c0 = capacity(0.0, 0.7).unwrap_or(f64::NAN);
    results.push(check(
        "capacity vanishes at zero pairing",
        c0 == 0.0,
        format!("capacity(0, 0.7) = {c0}"),
    ));
    let s34 = binary_entropy(0.75).unwrap_or(f64::NAN);
    results.push(check(
        "binary entropy",
        (s34 - (2.0 - 0.75 * 3.0f64.log2())).abs() <= 1e-14,
        format!("S(3/4) = {s34}"),
    ));

    // Thermodynamic identity: closed-form bound equals the chained engine.
    let reservoir = ReservoirSpec {
        t_cold: 1.3,
        heat_capacity: 2.1,
    };
    let bits = 0.37;
    let tau = 0.8;
    let identity = (|| -> Result<(f64, f64), crate::thermo::ThermoError> {
        let q = landauer_heat(bits, reservoir.t_cold)?;
        let t_h = heat_reservoir(&reservoir, q)?;
        let eta = carnot_efficiency(reservoir.t_cold, t_h)?;
        Ok((
            tau * extracted_work(eta, q),
            coupling_bound(bits, reservoir.t_cold, reservoir.heat_capacity, tau),
        ))
    })();
    results.push(match identity {
        Ok((piped, closed)) => check(
            "coupling bound identity",
            (piped - closed).abs() <= 1e-12 * closed.abs(),
            format!("pipeline {piped} vs closed form {closed}"),
        ),
        Err(e) => check("coupling bound identity", false, e.to_string()),
    });

    // Landauer equality at one bit.
    let q1 = landauer_heat(1.0, 1.0).unwrap_or(f64::NAN);
    results.push(check(
        "Landauer equality",
        (q1 - LN_2).abs() <= 1e-15,
        format!("Q(1 bit, T_c=1) = {q1}"),
    ));

    // Microcausality: strictly spacelike bump pair.
    let fa = build_test_function(detector(
        DetectorLabel::A,
        [0.0; 3],
        0.0,
        ProfileKind::SmoothBump,
    ));
    let fb = build_test_function(detector(
        DetectorLabel::B,
        [8.0, 0.0, 0.0],
        0.0,
        ProfileKind::SmoothBump,
    ));
    match (fa, fb) {
        (Ok(fa), Ok(fb)) => {
            let verdict = classify_supports(fa.support(), fb.support());
            let pos = pairing_position(&fa, &fb, &cfg);
            let mom = pairing_momentum(&fa, &fb, &cfg);
            let ok = verdict == CausalClass::StrictlySpacelike
                && pos.as_ref().map(|r| r.value == 0.0).unwrap_or(false)
                && mom.as_ref().map(|r| r.value.abs() <= 1e-6).unwrap_or(false);
            results.push(check(
                "microcausality",
                ok,
                format!(
                    "verdict {verdict}, position {:?}, momentum {:?}",
                    pos.map(|r| r.value),
                    mom.map(|r| r.value)
                ),
            ));
        }
        _ => results.push(check("microcausality", false, "detector build failed".into())),
    }

    // Dual-route agreement on the reference configuration.
    let fa = build_test_function(detector(
        DetectorLabel::A,
        [0.0; 3],
        0.0,
        ProfileKind::TruncatedGaussian,
    ))
    .expect("reference detector A");
    let fb = build_test_function(detector(
        DetectorLabel::B,
        [1.0, 0.0, 0.0],
        1.5,
        ProfileKind::TruncatedGaussian,
    ))
    .expect("reference detector B");
    let dual = (
        pairing_momentum(&fa, &fb, &cfg),
        pairing_position(&fa, &fb, &cfg),
    );
    results.push(match dual {
        (Ok(m), Ok(p)) => {
            let scale = m.value.abs().max(p.value.abs());
            let tol = (1e-3 * scale).max(3.0 * (m.error_estimate + p.error_estimate));
            check(
                "dual-route pairing",
                (m.value - p.value).abs() <= tol && scale > 1e-4,
                format!("momentum {} vs position {}", m.value, p.value),
            )
        }
        (m, p) => check("dual-route pairing", false, format!("{m:?} / {p:?}")),
    });

    // Wightman positivity on the reference receiver.
    results.push(match wightman_norm(&fb, &cfg) {
        Ok(w) => check(
            "Wightman positivity",
            w.value >= 0.0,
            format!("W_BB = {}", w.value),
        ),
        Err(e) => check("Wightman positivity", false, e.to_string()),
    });

    // Deterministic pipeline: identical scenario, identical report bytes.
    let scenario = Scenario::default();
    let run = (run_scenario(&scenario), run_scenario(&scenario));
    results.push(match run {
        (Ok(a), Ok(b)) => check(
            "deterministic report",
            a.to_toml() == b.to_toml(),
            format!("config hash {}", scenario_hash(&scenario)),
        ),
        (a, b) => check("deterministic report", false, format!("{a:?} / {b:?}")),
    });

    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let results = run_selftest();
        for r in &results {
            assert!(r.passed, "selftest '{}' failed: {}", r.name, r.detail);
        }
        assert!(results.len() >= 8);
    }
}
