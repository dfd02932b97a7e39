//! Floating-point comparison by units in the last place.
//!
//! Bit patterns are sign-magnitude; they are mapped onto a monotone unsigned
//! line (negatives below positives, both zeros on the same point) and the
//! distance is the gap between the two points. Infinities are ordinary
//! points on that line; NaN has no position.

use std::fmt;

use super::AssertionOutcome;

/// A float width with a biased integer mapping.
pub trait UlpFloat: Copy + fmt::Debug {
    const LABEL: &'static str;

    /// Position on the monotone line; `None` for NaN.
    fn biased(self) -> Option<u64>;
}

impl UlpFloat for f32 {
    const LABEL: &'static str = "FLOAT_EQ";

    fn biased(self) -> Option<u64> {
        if self.is_nan() {
            return None;
        }
        const SIGN: u32 = 1 << 31;
        let bits = self.to_bits();
        let biased = if bits & SIGN != 0 {
            (!bits).wrapping_add(1)
        } else {
            bits | SIGN
        };
        Some(u64::from(biased))
    }
}

impl UlpFloat for f64 {
    const LABEL: &'static str = "DOUBLE_EQ";

    fn biased(self) -> Option<u64> {
        if self.is_nan() {
            return None;
        }
        const SIGN: u64 = 1 << 63;
        let bits = self.to_bits();
        Some(if bits & SIGN != 0 {
            (!bits).wrapping_add(1)
        } else {
            bits | SIGN
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlpDistance {
    Finite(u64),
    /// At least one operand is NaN.
    Infinite,
}

impl fmt::Display for UlpDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UlpDistance::Finite(d) => write!(f, "{d}"),
            UlpDistance::Infinite => f.write_str("infinite"),
        }
    }
}

pub fn ulp_distance<F: UlpFloat>(a: F, b: F) -> UlpDistance {
    match (a.biased(), b.biased()) {
        (Some(x), Some(y)) => UlpDistance::Finite(x.abs_diff(y)),
        _ => UlpDistance::Infinite,
    }
}

/// Maximum ULP distance accepted by [`almost_equal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UlpPolicy {
    max_ulps: u32,
}

impl UlpPolicy {
    pub const DEFAULT_MAX_ULPS: u32 = 4;

    /// `None` when `max_ulps` is zero.
    pub fn new(max_ulps: u32) -> Option<Self> {
        (max_ulps >= 1).then_some(UlpPolicy { max_ulps })
    }

    pub fn max_ulps(&self) -> u32 {
        self.max_ulps
    }
}

impl Default for UlpPolicy {
    fn default() -> Self {
        UlpPolicy {
            max_ulps: Self::DEFAULT_MAX_ULPS,
        }
    }
}

pub fn almost_equal<F: UlpFloat>(a: F, b: F, policy: UlpPolicy) -> AssertionOutcome {
    let distance = ulp_distance(a, b);
    match distance {
        UlpDistance::Finite(d) if d <= u64::from(policy.max_ulps) => AssertionOutcome::success(),
        _ => AssertionOutcome::failure(format!(
            "expected {} of {a:?} and {b:?} (ulp distance {distance}, allowed {})",
            F::LABEL,
            policy.max_ulps
        )),
    }
}

/// Single-precision values within 4 ULPs.
pub fn float_eq(a: f32, b: f32) -> AssertionOutcome {
    almost_equal(a, b, UlpPolicy::default())
}

/// Double-precision values within 4 ULPs.
pub fn double_eq(a: f64, b: f64) -> AssertionOutcome {
    almost_equal(a, b, UlpPolicy::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Oracle: walk next_up/next_down one representable value at a time.
    fn steps_up_f32(x: f32, k: u32) -> f32 {
        (0..k).fold(x, |v, _| v.next_up())
    }

    fn steps_up_f64(x: f64, k: u32) -> f64 {
        (0..k).fold(x, |v, _| v.next_up())
    }

    #[test]
    fn identity_is_zero() {
        assert_eq!(ulp_distance(1.0f64, 1.0), UlpDistance::Finite(0));
    }

    #[test]
    fn signed_zeros_coincide() {
        assert_eq!(ulp_distance(0.0f32, -0.0), UlpDistance::Finite(0));
        assert_eq!(ulp_distance(0.0f64, -0.0), UlpDistance::Finite(0));
        assert!(double_eq(0.0, -0.0).passed);
    }

    #[test]
    fn crossing_zero_counts_every_subnormal() {
        let tiny = f32::from_bits(1);
        assert_eq!(ulp_distance(-tiny, tiny), UlpDistance::Finite(2));
    }

    #[test]
    fn four_steps_from_one() {
        let b = steps_up_f32(1.0, 4);
        assert_eq!(ulp_distance(1.0f32, b), UlpDistance::Finite(4));
        assert!(float_eq(1.0, b).passed);
        assert!(!float_eq(1.0, steps_up_f32(1.0, 5)).passed);
    }

    #[test]
    fn nan_is_infinitely_far() {
        assert_eq!(ulp_distance(f64::NAN, f64::NAN), UlpDistance::Infinite);
        assert!(!double_eq(f64::NAN, f64::NAN).passed);
        assert!(!float_eq(f32::NAN, 1.0).passed);
    }

    #[test]
    fn infinity_is_a_point() {
        assert_eq!(
            ulp_distance(f32::MAX, f32::INFINITY),
            UlpDistance::Finite(1)
        );
        assert!(double_eq(f64::INFINITY, f64::INFINITY).passed);
    }

    #[test]
    fn not_transitive() {
        let x = 1.5f64;
        let y = steps_up_f64(x, 3);
        let z = steps_up_f64(x, 6);
        assert!(double_eq(x, y).passed);
        assert!(double_eq(y, z).passed);
        assert!(!double_eq(x, z).passed);
    }

    #[test]
    fn zero_policy_rejected() {
        assert!(UlpPolicy::new(0).is_none());
        assert_eq!(UlpPolicy::new(7).unwrap().max_ulps(), 7);
    }

    fn finite_f64() -> impl Strategy<Value = f64> {
        any::<f64>().prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn symmetric(a in finite_f64(), b in finite_f64()) {
            prop_assert_eq!(ulp_distance(a, b), ulp_distance(b, a));
        }

        #[test]
        fn reflexive(a in finite_f64()) {
            prop_assert_eq!(ulp_distance(a, a), UlpDistance::Finite(0));
            prop_assert!(double_eq(a, a).passed);
        }

        #[test]
        fn monotone_along_next_up(a in any::<f32>().prop_filter("finite", |x| x.is_finite()), k in 0u32..=64) {
            let b = steps_up_f32(a, k);
            prop_assume!(b.is_finite());
            prop_assert_eq!(ulp_distance(a, b), UlpDistance::Finite(u64::from(k)));
        }
    }
}
