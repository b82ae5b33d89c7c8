//! Scenario loading, pipeline orchestration, parameter sweeps, and report
//! emission.
//!
//! A scenario is a strict TOML file: unknown keys are rejected with a
//! nearest-match suggestion, constraint violations name the offending
//! field. Every run produces a [`RunReport`] that serializes to TOML
//! byte-identically for identical inputs, and sweeps emit fixed-column CSV
//! rows suitable for plotting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelReport};
use crate::field::{
    nu_from_norm, pairing_momentum, pairing_position, wightman_norm, FieldError, FieldPairing,
    Route,
};
use crate::geometry::{causal_margin, classify_supports, CausalClass};
use crate::profiles::{build_test_function, DetectorLabel, DetectorSpec, ProfileError, ProfileKind};
use crate::quadrature::{QuadConfig, QuadratureError};
use crate::thermo::{
    energy_ledger, second_law_audit, switching_energy, EnergyLedger, EngineReport, ReservoirSpec,
    ThermoError,
};

/// Which pairing routes a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteSelection {
    Momentum,
    Position,
    Both,
}

impl std::fmt::Display for RouteSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RouteSelection::Momentum => "momentum",
            RouteSelection::Position => "position",
            RouteSelection::Both => "both",
        })
    }
}

impl std::str::FromStr for RouteSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "momentum" => Ok(RouteSelection::Momentum),
            "position" => Ok(RouteSelection::Position),
            "both" => Ok(RouteSelection::Both),
            other => Err(format!(
                "unknown route '{other}'; expected momentum, position, or both"
            )),
        }
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub detector_a: DetectorSpec,
    pub detector_b: DetectorSpec,
    pub reservoir: ReservoirSpec,
    pub quadrature: QuadConfig,
    pub route: RouteSelection,
    pub profile: ProfileKind,
    /// Fraction of the channel capacity Bob actually banks into erasure;
    /// 1 is the ideal limit.
    pub information_efficiency: f64,
    pub seed: u64,
}

impl Default for Scenario {
    /// The reference timelike configuration: equal Gaussian detectors with
    /// unit coupling, Bob displaced by d = 1 and switched 1.5 later.
    fn default() -> Self {
        Scenario {
            detector_a: DetectorSpec {
                label: DetectorLabel::A,
                position: [0.0; 3],
                switch_center: 0.0,
                switch_timescale: 0.5,
                coupling: 1.0,
                spatial_width: 0.5,
                profile_kind: ProfileKind::TruncatedGaussian,
            },
            detector_b: DetectorSpec {
                label: DetectorLabel::B,
                position: [1.0, 0.0, 0.0],
                switch_center: 1.5,
                switch_timescale: 0.5,
                coupling: 1.0,
                spatial_width: 0.5,
                profile_kind: ProfileKind::TruncatedGaussian,
            },
            reservoir: ReservoirSpec {
                t_cold: 1.0,
                heat_capacity: 10.0,
            },
            quadrature: QuadConfig::default(),
            route: RouteSelection::Momentum,
            profile: ProfileKind::TruncatedGaussian,
            information_efficiency: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("unknown key `{path}`{suggestion}")]
    UnknownKey { path: String, suggestion: String },
    #[error("invalid value for `{field}`: must be {constraint}, got {got}")]
    Validation {
        field: String,
        constraint: String,
        got: String,
    },
    #[error("unknown sweep axis `{axis}`; known axes: {known}")]
    UnknownAxis { axis: String, known: String },
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: FieldError,
    },
    #[error("channel stage failed: {0}")]
    Channel(#[from] ChannelError),
    #[error("engine stage failed: {0}")]
    Thermo(#[from] ThermoError),
    #[error("report field `{field}` is not finite; quadrature or inputs are out of range")]
    NonFinite { field: &'static str },
}

impl ScenarioError {
    /// True when the underlying cause is an exhausted quadrature budget.
    pub fn is_budget_exhaustion(&self) -> bool {
        matches!(
            self,
            ScenarioError::Stage {
                source: FieldError::Quadrature(QuadratureError::BudgetExhausted { .. }),
                ..
            }
        )
    }
}

// ---------------------------------------------------------------------------
// TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    profile: Option<String>,
    route: Option<String>,
    seed: Option<u64>,
    detector_a: Option<DetectorTable>,
    detector_b: Option<DetectorTable>,
    reservoir: Option<ReservoirTable>,
    quadrature: Option<QuadratureTable>,
    engine: Option<EngineTable>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorTable {
    position: Option<[f64; 3]>,
    switch_center: Option<f64>,
    switch_timescale: Option<f64>,
    coupling: Option<f64>,
    spatial_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReservoirTable {
    t_cold: Option<f64>,
    heat_capacity: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureTable {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_evals: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineTable {
    information_efficiency: Option<f64>,
}

const ROOT_KEYS: &[&str] = &[
    "profile",
    "route",
    "seed",
    "detector_a",
    "detector_b",
    "reservoir",
    "quadrature",
    "engine",
];
const DETECTOR_KEYS: &[&str] = &[
    "position",
    "switch_center",
    "switch_timescale",
    "coupling",
    "spatial_width",
];
const RESERVOIR_KEYS: &[&str] = &["t_cold", "heat_capacity"];
const QUADRATURE_KEYS: &[&str] = &["rel_tol", "abs_tol", "max_evals"];
const ENGINE_KEYS: &[&str] = &["information_efficiency"];

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(key: &str, candidates: &[&str]) -> String {
    let best = candidates
        .iter()
        .map(|c| (levenshtein(key, c), *c))
        .min_by_key(|(d, _)| *d);
    match best {
        Some((d, c)) if d <= key.len().max(3) => format!("; did you mean `{c}`?"),
        _ => format!("; allowed keys: {}", candidates.join(", ")),
    }
}

/// Strict-mode key check: every table key must be in the schema.
fn check_keys(value: &toml::Value) -> Result<(), ScenarioError> {
    let root = value
        .as_table()
        .ok_or_else(|| ScenarioError::Parse("scenario must be a TOML table".into()))?;
    let sections: BTreeMap<&str, &[&str]> = [
        ("detector_a", DETECTOR_KEYS),
        ("detector_b", DETECTOR_KEYS),
        ("reservoir", RESERVOIR_KEYS),
        ("quadrature", QUADRATURE_KEYS),
        ("engine", ENGINE_KEYS),
    ]
    .into_iter()
    .collect();

    for (key, sub) in root {
        if !ROOT_KEYS.contains(&key.as_str()) {
            return Err(ScenarioError::UnknownKey {
                path: key.clone(),
                suggestion: suggest(key, ROOT_KEYS),
            });
        }
        if let Some(allowed) = sections.get(key.as_str()) {
            let table = sub.as_table().ok_or_else(|| {
                ScenarioError::Parse(format!("`{key}` must be a table of settings"))
            })?;
            for inner in table.keys() {
                if !allowed.contains(&inner.as_str()) {
                    return Err(ScenarioError::UnknownKey {
                        path: format!("{key}.{inner}"),
                        suggestion: suggest(inner, allowed),
                    });
                }
            }
        }
    }
    Ok(())
}

fn validation(field: &str, constraint: &str, got: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        constraint: constraint.into(),
        got: got.to_string(),
    }
}

fn merge_detector(base: DetectorSpec, t: &Option<DetectorTable>, kind: ProfileKind) -> DetectorSpec {
    let mut spec = base;
    spec.profile_kind = kind;
    if let Some(t) = t {
        if let Some(p) = t.position {
            spec.position = p;
        }
        if let Some(v) = t.switch_center {
            spec.switch_center = v;
        }
        if let Some(v) = t.switch_timescale {
            spec.switch_timescale = v;
        }
        if let Some(v) = t.coupling {
            spec.coupling = v;
        }
        if let Some(v) = t.spatial_width {
            spec.spatial_width = v;
        }
    }
    spec
}

fn validate_detector(spec: &DetectorSpec, section: &str) -> Result<(), ScenarioError> {
    spec.validate().map_err(|e| match e {
        ProfileError::InvalidField {
            field,
            constraint,
            value,
            ..
        } => validation(&format!("{section}.{field}"), constraint, value),
    })
}

/// Parse and validate a scenario from TOML text. Missing keys fall back to
/// the documented defaults; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let value: toml::Value = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
    check_keys(&value)?;
    let file: ScenarioFile = value
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;

    let defaults = Scenario::default();

    let profile = match file.profile.as_deref() {
        None => defaults.profile,
        Some("truncated-gaussian") => ProfileKind::TruncatedGaussian,
        Some("smooth-bump") => ProfileKind::SmoothBump,
        Some(other) => {
            return Err(validation(
                "profile",
                "one of truncated-gaussian, smooth-bump",
                other,
            ))
        }
    };
    let route = match file.route.as_deref() {
        None => defaults.route,
        Some(s) => s
            .parse()
            .map_err(|_| validation("route", "one of momentum, position, both", s))?,
    };

    let detector_a = merge_detector(defaults.detector_a, &file.detector_a, profile);
    let detector_b = merge_detector(defaults.detector_b, &file.detector_b, profile);
    validate_detector(&detector_a, "detector_a")?;
    validate_detector(&detector_b, "detector_b")?;

    let r = file.reservoir.unwrap_or_default();
    let t_cold = r.t_cold.unwrap_or(defaults.reservoir.t_cold);
    let heat_capacity = r.heat_capacity.unwrap_or(defaults.reservoir.heat_capacity);
    let reservoir = ReservoirSpec::new(t_cold, heat_capacity).map_err(|e| match e {
        ThermoError::InvalidInput {
            what,
            constraint,
            value,
        } => validation(&format!("reservoir.{what}"), constraint, value),
    })?;

    let q = file.quadrature.unwrap_or_default();
    let quadrature = QuadConfig {
        rel_tol: q.rel_tol.unwrap_or(defaults.quadrature.rel_tol),
        abs_tol: q.abs_tol.unwrap_or(defaults.quadrature.abs_tol),
        max_evals: q.max_evals.unwrap_or(defaults.quadrature.max_evals),
    };
    if !(quadrature.rel_tol > 0.0 && quadrature.rel_tol.is_finite()) {
        return Err(validation(
            "quadrature.rel_tol",
            "positive and finite",
            quadrature.rel_tol,
        ));
    }
    if !(quadrature.abs_tol > 0.0 && quadrature.abs_tol.is_finite()) {
        return Err(validation(
            "quadrature.abs_tol",
            "positive and finite",
            quadrature.abs_tol,
        ));
    }
    if quadrature.max_evals < 1_000 {
        return Err(validation(
            "quadrature.max_evals",
            "at least 1000",
            quadrature.max_evals,
        ));
    }

    let e = file.engine.unwrap_or_default();
    let information_efficiency = e
        .information_efficiency
        .unwrap_or(defaults.information_efficiency);
    if !(0.0..=1.0).contains(&information_efficiency) {
        return Err(validation(
            "engine.information_efficiency",
            "in [0, 1]",
            information_efficiency,
        ));
    }

    Ok(Scenario {
        detector_a,
        detector_b,
        reservoir,
        quadrature,
        route,
        profile,
        information_efficiency,
        seed: file.seed.unwrap_or(defaults.seed),
    })
}

/// Load, parse, and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometrySection {
    pub verdict: CausalClass,
    /// Signed spacelike margin between the bounding boxes.
    pub causal_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondaryPairing {
    pub route: Route,
    pub delta: f64,
    pub delta_error: f64,
    /// |primary delta - secondary delta|.
    pub discrepancy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingSection {
    pub route: Route,
    pub delta: f64,
    pub delta_error: f64,
    pub wightman_bb: f64,
    pub wightman_error: f64,
    pub nu_b: f64,
    pub nu_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<SecondaryPairing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSection {
    pub capacity_bits: f64,
    /// Capacity scaled by the configured information efficiency; this is
    /// what drives the engine.
    pub erased_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
}

/// Full machine-readable record of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub geometry: GeometrySection,
    pub pairing: PairingSection,
    pub channel: ChannelSection,
    pub engine: EngineReport,
    pub ledger: EnergyLedger,
    pub provenance: Provenance,
}

impl RunReport {
    /// Every numeric field of a report must be finite; TOML cannot even
    /// represent the alternative.
    fn check_finite(&self) -> Result<(), ScenarioError> {
        let fields: [(&'static str, f64); 16] = [
            ("geometry.causal_margin", self.geometry.causal_margin),
            ("pairing.delta", self.pairing.delta),
            ("pairing.delta_error", self.pairing.delta_error),
            ("pairing.wightman_bb", self.pairing.wightman_bb),
            ("pairing.wightman_error", self.pairing.wightman_error),
            ("pairing.nu_b", self.pairing.nu_b),
            ("pairing.nu_error", self.pairing.nu_error),
            ("channel.capacity_bits", self.channel.capacity_bits),
            ("channel.erased_bits", self.channel.erased_bits),
            ("engine.q_heat", self.engine.q_heat),
            ("engine.t_hot", self.engine.t_hot),
            ("engine.efficiency", self.engine.efficiency),
            ("engine.work", self.engine.work),
            ("engine.switching_energy_b", self.engine.switching_energy_b),
            ("engine.bound_rhs", self.engine.bound_rhs),
            ("engine.margin", self.engine.margin),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(ScenarioError::NonFinite { field });
            }
        }
        if let Some(sec) = &self.pairing.secondary {
            if !(sec.delta.is_finite() && sec.delta_error.is_finite()) {
                return Err(ScenarioError::NonFinite {
                    field: "pairing.secondary.delta",
                });
            }
        }
        Ok(())
    }

    /// Serialize to TOML. Identical scenarios and seeds produce
    /// byte-identical output.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serialization cannot fail")
    }

    /// Fixed CSV header for sweep tables.
    pub const CSV_HEADER: &'static str = "axis_value,delta_AB,delta_err,nu_B,capacity_bits,Q,T_h,eta,W,E_B,bound_rhs,margin,verdict";

    /// One CSV row, in the fixed column order of [`Self::CSV_HEADER`].
    pub fn csv_row(&self, axis_value: f64) -> String {
        let verdict = if self.engine.satisfied {
            "satisfied"
        } else {
            "violated"
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            axis_value,
            self.pairing.delta,
            self.pairing.delta_error,
            self.pairing.nu_b,
            self.channel.capacity_bits,
            self.engine.q_heat,
            self.engine.t_hot,
            self.engine.efficiency,
            self.engine.work,
            self.engine.switching_energy_b,
            self.engine.bound_rhs,
            self.engine.margin,
            verdict
        )
    }

    /// Aligned human-readable summary.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "  {k:<22} {v}");
        };
        line("causal verdict", self.geometry.verdict.to_string());
        line("causal margin", format!("{:+.6e}", self.geometry.causal_margin));
        line(
            &format!("delta_AB ({})", self.pairing.route),
            format!("{:+.9e} \u{b1} {:.3e}", self.pairing.delta, self.pairing.delta_error),
        );
        if let Some(s) = &self.pairing.secondary {
            line(
                &format!("delta_AB ({})", s.route),
                format!("{:+.9e} \u{b1} {:.3e}", s.delta, s.delta_error),
            );
            line("route discrepancy", format!("{:.3e}", s.discrepancy));
        }
        line(
            "W_BB",
            format!("{:.9e} \u{b1} {:.3e}", self.pairing.wightman_bb, self.pairing.wightman_error),
        );
        line(
            "nu_B",
            format!("{:.9} \u{b1} {:.3e}", self.pairing.nu_b, self.pairing.nu_error),
        );
        line("capacity", format!("{:.9e} bits", self.channel.capacity_bits));
        line("erased bits", format!("{:.9e}", self.channel.erased_bits));
        line("Landauer heat Q", format!("{:.9e}", self.engine.q_heat));
        line("T_hot", format!("{:.9}", self.engine.t_hot));
        line("Carnot efficiency", format!("{:.9e}", self.engine.efficiency));
        line("extracted work W", format!("{:.9e}", self.engine.work));
        line("switching energy E_B", format!("{:.9e}", self.engine.switching_energy_b));
        line("coupling bound rhs", format!("{:.9e}", self.engine.bound_rhs));
        line("audit margin", format!("{:+.9e}", self.engine.margin));
        line(
            "second law",
            if self.engine.satisfied {
                "satisfied".into()
            } else {
                "VIOLATED".into()
            },
        );
        line(
            "energy ledger",
            format!(
                "E_phi={} E_A={:.6e} E_B={:.6e} E_AB={} total={:.6e}",
                self.ledger.e_phi, self.ledger.e_a, self.ledger.e_b, self.ledger.e_ab, self.ledger.total
            ),
        );
        out
    }
}

// ---------------------------------------------------------------------------
// Provenance hashing
// ---------------------------------------------------------------------------

/// Canonical TOML rendering of the effective scenario (defaults filled).
#[derive(Serialize)]
struct CanonicalScenario<'a> {
    profile: String,
    route: String,
    seed: u64,
    information_efficiency: f64,
    detector_a: &'a DetectorSpec,
    detector_b: &'a DetectorSpec,
    reservoir: &'a ReservoirSpec,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: u64,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Stable hash of the effective (defaults-filled) scenario.
pub fn scenario_hash(s: &Scenario) -> String {
    let canonical = CanonicalScenario {
        profile: s.profile.to_string(),
        route: s.route.to_string(),
        seed: s.seed,
        information_efficiency: s.information_efficiency,
        detector_a: &s.detector_a,
        detector_b: &s.detector_b,
        reservoir: &s.reservoir,
        rel_tol: s.quadrature.rel_tol,
        abs_tol: s.quadrature.abs_tol,
        max_evals: s.quadrature.max_evals,
    };
    let text = toml::to_string(&canonical).expect("canonical scenario serializes");
    format!("fnv1a:{:016x}", fnv1a64(text.as_bytes()))
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

fn stage(stage: &'static str) -> impl FnOnce(FieldError) -> ScenarioError {
    move |source| ScenarioError::Stage { stage, source }
}

/// Run the full pipeline: geometry verdict, field pairing(s), capacity,
/// engine audit, energy ledger, provenance.
pub fn run_scenario(s: &Scenario) -> Result<RunReport, ScenarioError> {
    if s.detector_a.label == s.detector_b.label {
        return Err(validation(
            "detector_b.label",
            "distinct from detector_a.label",
            s.detector_b.label,
        ));
    }
    let fa = build_test_function(s.detector_a).map_err(|e| match e {
        ProfileError::InvalidField {
            field,
            constraint,
            value,
            ..
        } => validation(&format!("detector_a.{field}"), constraint, value),
    })?;
    let fb = build_test_function(s.detector_b).map_err(|e| match e {
        ProfileError::InvalidField {
            field,
            constraint,
            value,
            ..
        } => validation(&format!("detector_b.{field}"), constraint, value),
    })?;

    let verdict = classify_supports(fa.support(), fb.support());
    let margin = causal_margin(fa.support(), fb.support());

    let primary_route = match s.route {
        RouteSelection::Momentum | RouteSelection::Both => Route::MomentumSpace,
        RouteSelection::Position => Route::PositionSpace,
    };
    let delta = match primary_route {
        Route::MomentumSpace => {
            pairing_momentum(&fa, &fb, &s.quadrature).map_err(stage("pairing-momentum"))?
        }
        Route::PositionSpace => {
            pairing_position(&fa, &fb, &s.quadrature).map_err(stage("pairing-position"))?
        }
    };
    let wightman = wightman_norm(&fb, &s.quadrature).map_err(stage("wightman-norm"))?;
    let nu_b = nu_from_norm(wightman.value).map_err(stage("wightman-norm"))?;
    let primary = FieldPairing {
        delta_ab: delta.value,
        delta_error: delta.error_estimate,
        wightman_bb: wightman.value,
        wightman_error: wightman.error_estimate,
        nu_b,
        nu_error: 2.0 * nu_b * wightman.error_estimate,
        route: primary_route,
    };

    let secondary = if s.route == RouteSelection::Both {
        let pos = pairing_position(&fa, &fb, &s.quadrature).map_err(stage("pairing-position"))?;
        Some(SecondaryPairing {
            route: Route::PositionSpace,
            delta: pos.value,
            delta_error: pos.error_estimate,
            discrepancy: (primary.delta_ab - pos.value).abs(),
        })
    } else {
        None
    };

    let channel_report = ChannelReport::new(primary.delta_ab, primary.nu_b, verdict)?;
    let capacity_bits = channel_report.capacity_bits;
    let erased_bits = s.information_efficiency * capacity_bits;

    let engine = second_law_audit(
        s.detector_b.coupling,
        s.detector_b.switch_timescale,
        erased_bits,
        &s.reservoir,
    )?;

    let e_a = switching_energy(s.detector_a.coupling, s.detector_a.switch_timescale)?;
    let e_b = engine.switching_energy_b;
    let ledger = energy_ledger(e_a, e_b)?;

    let report = RunReport {
        geometry: GeometrySection {
            verdict,
            causal_margin: margin,
        },
        pairing: PairingSection {
            route: primary.route,
            delta: primary.delta_ab,
            delta_error: primary.delta_error,
            wightman_bb: primary.wightman_bb,
            wightman_error: primary.wightman_error,
            nu_b: primary.nu_b,
            nu_error: primary.nu_error,
            secondary,
        },
        channel: ChannelSection {
            capacity_bits,
            erased_bits,
        },
        engine,
        ledger,
        provenance: Provenance {
            config_hash: scenario_hash(s),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: s.seed,
        },
    };
    report.check_finite()?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Numeric parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DetectorA(DetectorField),
    DetectorB(DetectorField),
    ReservoirTCold,
    ReservoirHeatCapacity,
    InformationEfficiency,
    /// Places detector B at detector A's position shifted by the axis
    /// value along x.
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorField {
    SwitchCenter,
    SwitchTimescale,
    Coupling,
    SpatialWidth,
    PositionX,
    PositionY,
    PositionZ,
}

pub const SWEEP_AXES: &[&str] = &[
    "detector_a.switch_center",
    "detector_a.switch_timescale",
    "detector_a.coupling",
    "detector_a.spatial_width",
    "detector_a.position_x",
    "detector_a.position_y",
    "detector_a.position_z",
    "detector_b.switch_center",
    "detector_b.switch_timescale",
    "detector_b.coupling",
    "detector_b.spatial_width",
    "detector_b.position_x",
    "detector_b.position_y",
    "detector_b.position_z",
    "reservoir.t_cold",
    "reservoir.heat_capacity",
    "engine.information_efficiency",
    "separation",
];

/// Resolve an axis name; unknown names are rejected before any
/// computation.
pub fn parse_axis(name: &str) -> Result<SweepAxis, ScenarioError> {
    let detector_field = |f: &str| -> Option<DetectorField> {
        match f {
            "switch_center" => Some(DetectorField::SwitchCenter),
            "switch_timescale" => Some(DetectorField::SwitchTimescale),
            "coupling" => Some(DetectorField::Coupling),
            "spatial_width" => Some(DetectorField::SpatialWidth),
            "position_x" => Some(DetectorField::PositionX),
            "position_y" => Some(DetectorField::PositionY),
            "position_z" => Some(DetectorField::PositionZ),
            _ => None,
        }
    };
    let axis = match name {
        "reservoir.t_cold" => Some(SweepAxis::ReservoirTCold),
        "reservoir.heat_capacity" => Some(SweepAxis::ReservoirHeatCapacity),
        "engine.information_efficiency" => Some(SweepAxis::InformationEfficiency),
        "separation" => Some(SweepAxis::Separation),
        _ => name
            .strip_prefix("detector_a.")
            .and_then(&detector_field)
            .map(SweepAxis::DetectorA)
            .or_else(|| {
                name.strip_prefix("detector_b.")
                    .and_then(&detector_field)
                    .map(SweepAxis::DetectorB)
            }),
    };
    axis.ok_or_else(|| ScenarioError::UnknownAxis {
        axis: name.into(),
        known: SWEEP_AXES.join(", "),
    })
}

impl SweepAxis {
    /// Produce the scenario at one sweep point, re-validating the result.
    pub fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario, ScenarioError> {
        let mut s = base.clone();
        let set_detector = |spec: &mut DetectorSpec, field: DetectorField| {
            match field {
                DetectorField::SwitchCenter => spec.switch_center = value,
                DetectorField::SwitchTimescale => spec.switch_timescale = value,
                DetectorField::Coupling => spec.coupling = value,
                DetectorField::SpatialWidth => spec.spatial_width = value,
                DetectorField::PositionX => spec.position[0] = value,
                DetectorField::PositionY => spec.position[1] = value,
                DetectorField::PositionZ => spec.position[2] = value,
            };
        };
        match self {
            SweepAxis::DetectorA(f) => set_detector(&mut s.detector_a, *f),
            SweepAxis::DetectorB(f) => set_detector(&mut s.detector_b, *f),
            SweepAxis::ReservoirTCold => s.reservoir.t_cold = value,
            SweepAxis::ReservoirHeatCapacity => s.reservoir.heat_capacity = value,
            SweepAxis::InformationEfficiency => s.information_efficiency = value,
            SweepAxis::Separation => {
                s.detector_b.position = [
                    s.detector_a.position[0] + value,
                    s.detector_a.position[1],
                    s.detector_a.position[2],
                ];
            }
        }
        validate_detector(&s.detector_a, "detector_a")?;
        validate_detector(&s.detector_b, "detector_b")?;
        ReservoirSpec::new(s.reservoir.t_cold, s.reservoir.heat_capacity).map_err(|e| match e {
            ThermoError::InvalidInput {
                what,
                constraint,
                value,
            } => validation(&format!("reservoir.{what}"), constraint, value),
        })?;
        if !(0.0..=1.0).contains(&s.information_efficiency) {
            return Err(validation(
                "engine.information_efficiency",
                "in [0, 1]",
                s.information_efficiency,
            ));
        }
        Ok(s)
    }
}

/// Run one report per axis value, in the given (deterministic) order.
/// The axis and every value are validated before any computation starts.
pub fn sweep(
    base: &Scenario,
    axis_name: &str,
    values: &[f64],
) -> Result<Vec<(f64, RunReport)>, ScenarioError> {
    let axis = parse_axis(axis_name)?;
    let scenarios: Vec<(f64, Scenario)> = values
        .iter()
        .map(|&v| axis.apply(base, v).map(|s| (v, s)))
        .collect::<Result<_, _>>()?;
    scenarios
        .into_iter()
        .map(|(v, s)| run_scenario(&s).map(|r| (v, r)))
        .collect()
}
