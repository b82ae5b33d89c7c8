//! Binary Shannon entropy and the classical capacity of the
//! detector-to-detector channel.
//!
//! C = S(1/2 + nu_B/2 |cos 2 Delta|) - S(1/2 + nu_B/2), in bits.
//!
//! The capacity lies in [0, 1] bits, vanishes exactly when |cos 2 Delta|
//! = 1 (in particular for Delta = 0, i.e. causally disconnected
//! detectors), and reaches 1 bit only at Delta = pi/4 mod pi/2 with
//! nu_B = 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::CausalClass;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("nu_B must lie in (0, 1], got {0}")]
    InvalidNu(f64),
    #[error("pairing phase must be finite, got {0}")]
    InvalidDelta(f64),
}

/// Binary Shannon entropy in bits, with 0 log 0 = 0.
pub fn binary_entropy(p: f64) -> Result<f64, ChannelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::InvalidProbability(p));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Classical channel capacity in bits from the pairing phase Delta and the
/// Weyl factor nu_B.
pub fn capacity(delta_ab: f64, nu_b: f64) -> Result<f64, ChannelError> {
    if !delta_ab.is_finite() {
        return Err(ChannelError::InvalidDelta(delta_ab));
    }
    if !(nu_b > 0.0 && nu_b <= 1.0) {
        return Err(ChannelError::InvalidNu(nu_b));
    }
    let visibility = (2.0 * delta_ab).cos().abs();
    let p_signal = 0.5 + 0.5 * nu_b * visibility;
    let p_floor = 0.5 + 0.5 * nu_b;
    // S is decreasing on [1/2, 1] and p_signal <= p_floor, so the exact
    // difference is non-negative; the clamp only absorbs last-ulp noise.
    Ok((binary_entropy(p_signal)? - binary_entropy(p_floor)?).max(0.0))
}

/// Capacity of one detector pair, bundled with the quantities it was
/// computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub delta_ab: f64,
    pub nu_b: f64,
    pub capacity_bits: f64,
    pub causal_class: CausalClass,
}

impl ChannelReport {
    pub fn new(delta_ab: f64, nu_b: f64, causal_class: CausalClass) -> Result<Self, ChannelError> {
        Ok(Self {
            delta_ab,
            nu_b,
            capacity_bits: capacity(delta_ab, nu_b)?,
            causal_class,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn entropy_extremes() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
    }

    #[test]
    fn entropy_of_three_quarters() {
        // S(3/4) = 2 - (3/4) log2(3), evaluated independently.
        let expected = 2.0 - 0.75 * 3.0f64.log2();
        assert!((binary_entropy(0.75).unwrap() - expected).abs() <= 1e-15);
        assert!((binary_entropy(0.75).unwrap() - 0.811_278_124_459_133).abs() <= 1e-12);
    }

    #[test]
    fn entropy_rejects_out_of_range() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn capacity_vanishes_without_pairing() {
        for nu in [0.01, 0.3, 0.77, 1.0] {
            assert_eq!(capacity(0.0, nu).unwrap(), 0.0);
        }
    }

    #[test]
    fn capacity_extremes() {
        // Delta = pi/4, nu = 1: S(1/2) - S(1) = 1 bit.
        assert!((capacity(FRAC_PI_4, 1.0).unwrap() - 1.0).abs() <= 1e-9);
        // Delta = pi/4, nu = 1/2: 1 - S(3/4).
        let expected = 1.0 - binary_entropy(0.75).unwrap();
        assert!((capacity(FRAC_PI_4, 0.5).unwrap() - expected).abs() <= 1e-12);
        assert!((expected - 0.188_721_875_540_867).abs() <= 1e-12);
    }

    #[test]
    fn capacity_rejects_bad_nu() {
        assert!(capacity(0.1, 0.0).is_err());
        assert!(capacity(0.1, -0.5).is_err());
        assert!(capacity(0.1, 1.5).is_err());
        assert!(capacity(0.1, f64::NAN).is_err());
        assert!(capacity(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn capacity_monotone_in_nu_on_grid() {
        let visibility_fix = 0.3f64; // |cos 2 Delta| < 1
        let delta = 0.5 * visibility_fix.acos();
        let mut prev = -1.0;
        for i in 1..=50 {
            let nu = i as f64 / 50.0;
            let c = capacity(delta, nu).unwrap();
            assert!(c > prev, "capacity not strictly increasing at nu={nu}");
            prev = c;
        }
    }

    #[test]
    fn capacity_monotone_decreasing_in_visibility() {
        let nu = 0.8;
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            // |cos 2 Delta| sweeps 0 -> 1 as Delta sweeps pi/4 -> 0.
            let delta = FRAC_PI_4 * (1.0 - i as f64 / 50.0);
            let c = capacity(delta, nu).unwrap();
            assert!(c < prev || (i == 0 && c <= prev));
            prev = c;
        }
        // Maximal at Delta = pi/4 mod pi/2.
        let peak = capacity(FRAC_PI_4, nu).unwrap();
        assert!(peak >= capacity(0.7, nu).unwrap());
        assert!((peak - capacity(FRAC_PI_4 + std::f64::consts::PI / 2.0, nu).unwrap()).abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn capacity_in_unit_range(delta in -10.0f64..10.0, nu in 1e-6f64..1.0) {
            let c = capacity(delta, nu).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }

        #[test]
        fn capacity_symmetries(delta in -3.0f64..3.0, nu in 1e-3f64..1.0) {
            let c = capacity(delta, nu).unwrap();
            let reflected = capacity(-delta, nu).unwrap();
            let complement = capacity(std::f64::consts::FRAC_PI_2 - delta, nu).unwrap();
            let shifted = capacity(delta + std::f64::consts::PI, nu).unwrap();
            prop_assert!((c - reflected).abs() <= 1e-12);
            prop_assert!((c - complement).abs() <= 1e-9);
            prop_assert!((c - shifted).abs() <= 1e-9);
        }
    }
}
