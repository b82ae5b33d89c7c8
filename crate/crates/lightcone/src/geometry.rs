//! Events, Minkowski intervals, and conservative causal classification of
//! detector support regions.
//!
//! Signature is (-,+,+,+) in natural units (c = 1): a negative interval
//! means timelike separation, zero lightlike, positive spacelike.
//! Classification works on the bounding 4-boxes of the supports, which
//! over-approximates the true (ball-shaped) supports. That makes a
//! `StrictlySpacelike` verdict sound: it can never be issued for a pair of
//! supports that are actually in causal contact.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A spacetime point: time coordinate plus spatial 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: [f64; 3],
}

impl Event {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        Self { t, x }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|c| c.is_finite())
    }
}

/// Minkowski interval `-(t_a - t_b)^2 + |x_a - x_b|^2`.
///
/// Negative: timelike. Zero: lightlike. Positive: spacelike.
pub fn interval(a: Event, b: Event) -> f64 {
    let dt = a.t - b.t;
    let mut r2 = 0.0;
    for i in 0..3 {
        let d = a.x[i] - b.x[i];
        r2 += d * d;
    }
    -dt * dt + r2
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("support region {field} must be positive and finite, got {value}")]
    InvalidExtent { field: &'static str, value: f64 },
    #[error("support region center must be finite")]
    NonFiniteCenter,
}

/// Bounding region of a detector smearing: a time interval around the
/// switching center times a spatial ball around the detector position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportRegion {
    pub center: Event,
    pub temporal_halfwidth: f64,
    pub spatial_radius: f64,
}

impl SupportRegion {
    pub fn new(
        center: Event,
        temporal_halfwidth: f64,
        spatial_radius: f64,
    ) -> Result<Self, GeometryError> {
        if !center.is_finite() {
            return Err(GeometryError::NonFiniteCenter);
        }
        if !(temporal_halfwidth > 0.0 && temporal_halfwidth.is_finite()) {
            return Err(GeometryError::InvalidExtent {
                field: "temporal_halfwidth",
                value: temporal_halfwidth,
            });
        }
        if !(spatial_radius > 0.0 && spatial_radius.is_finite()) {
            return Err(GeometryError::InvalidExtent {
                field: "spatial_radius",
                value: spatial_radius,
            });
        }
        Ok(Self {
            center,
            temporal_halfwidth,
            spatial_radius,
        })
    }
}

/// Verdict of the conservative causal check between two support regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalClass {
    /// Every point of one bounding box is spacelike to every point of the
    /// other, with margin.
    StrictlySpacelike,
    /// Some pair of box points is timelike or lightlike related, with margin.
    CausallyConnected,
    /// The causal boundary lies within the classification band.
    IndeterminateMargin,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::StrictlySpacelike => "strictly-spacelike",
            CausalClass::CausallyConnected => "causally-connected",
            CausalClass::IndeterminateMargin => "indeterminate-margin",
        };
        f.write_str(s)
    }
}

/// Half-width of the band around the causal boundary that is reported as
/// [`CausalClass::IndeterminateMargin`] instead of being silently rounded
/// to one side.
pub const DEFAULT_MARGIN_BAND: f64 = 1e-9;

/// Signed causal margin between the bounding 4-boxes of two regions.
///
/// Interval arithmetic over the boxes: the margin is the smallest spatial
/// distance between the boxes minus the largest possible time difference.
/// Positive means every box point pair is spacelike separated; negative
/// means some pair is lightlike or timelike related.
pub fn causal_margin(ra: &SupportRegion, rb: &SupportRegion) -> f64 {
    let dt_max = (ra.center.t - rb.center.t).abs() + ra.temporal_halfwidth + rb.temporal_halfwidth;
    let reach = ra.spatial_radius + rb.spatial_radius;
    let mut r2_min = 0.0;
    for i in 0..3 {
        let gap = (ra.center.x[i] - rb.center.x[i]).abs() - reach;
        if gap > 0.0 {
            r2_min += gap * gap;
        }
    }
    r2_min.sqrt() - dt_max
}

/// Conservative causal classification with the default margin band.
pub fn classify_supports(ra: &SupportRegion, rb: &SupportRegion) -> CausalClass {
    classify_supports_with_band(ra, rb, DEFAULT_MARGIN_BAND)
}

/// Conservative causal classification with an explicit margin band.
pub fn classify_supports_with_band(
    ra: &SupportRegion,
    rb: &SupportRegion,
    band: f64,
) -> CausalClass {
    let m = causal_margin(ra, rb);
    if m > band {
        CausalClass::StrictlySpacelike
    } else if m < -band {
        CausalClass::CausallyConnected
    } else {
        CausalClass::IndeterminateMargin
    }
}
