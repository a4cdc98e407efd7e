//! Score functions for the block M-estimator.
//!
//! Only Huber's loss is provided. The scale of the estimator lives in the
//! `delta` parameter of [`RobustMeanConfig`](crate::robust_mean::RobustMeanConfig),
//! so `rho` itself is parameter free and saturates at `|x| = 1`.

use serde::{Deserialize, Serialize};

/// Convex, even score `rho` together with its first two derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RhoFunction {
    /// `x^2 / 2` for `|x| <= 1`, `|x| - 1/2` otherwise.
    #[default]
    Huber,
}

impl RhoFunction {
    pub fn value(self, x: f64) -> f64 {
        match self {
            RhoFunction::Huber => {
                let a = x.abs();
                if a <= 1.0 {
                    0.5 * x * x
                } else {
                    a - 0.5
                }
            }
        }
    }

    /// Influence function `rho'`; for Huber this is `clamp(x, -1, 1)`.
    pub fn prime(self, x: f64) -> f64 {
        match self {
            RhoFunction::Huber => x.clamp(-1.0, 1.0),
        }
    }

    /// `rho''`, using the closed indicator `1{|x| <= 1}` at the kinks.
    pub fn second(self, x: f64) -> f64 {
        match self {
            RhoFunction::Huber => {
                if x.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// IRLS weight `rho'(x) / x`, equal to 1 at the origin.
    ///
    /// Strictly positive for Huber, so a weighted average of block means is
    /// always well defined.
    pub fn weight(self, x: f64) -> f64 {
        match self {
            RhoFunction::Huber => {
                let a = x.abs();
                if a <= 1.0 {
                    1.0
                } else {
                    1.0 / a
                }
            }
        }
    }

    /// Supremum of `|rho'|`.
    pub fn prime_bound(self) -> f64 {
        match self {
            RhoFunction::Huber => 1.0,
        }
    }
}

pub fn rho_value(x: f64) -> f64 {
    RhoFunction::Huber.value(x)
}

pub fn rho_prime(x: f64) -> f64 {
    RhoFunction::Huber.prime(x)
}

pub fn rho_second(x: f64) -> f64 {
    RhoFunction::Huber.second(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn huber_values() {
        assert_eq!(rho_value(0.0), 0.0);
        assert_eq!(rho_value(0.5), 0.125);
        assert_eq!(rho_value(2.0), 1.5);
        assert_eq!(rho_value(-2.0), 1.5);
        assert_eq!(rho_value(1.0), 0.5);
    }

    #[test]
    fn huber_derivatives() {
        assert_eq!(rho_prime(0.3), 0.3);
        assert_eq!(rho_prime(5.0), 1.0);
        assert_eq!(rho_prime(-5.0), -1.0);
        assert_eq!(rho_second(0.5), 1.0);
        assert_eq!(rho_second(2.0), 0.0);
        assert_eq!(rho_second(1.0), 1.0);
        assert_eq!(rho_second(-1.0), 1.0);
    }

    #[test]
    fn weight_is_positive_and_one_at_origin() {
        let rho = RhoFunction::Huber;
        assert_eq!(rho.weight(0.0), 1.0);
        assert_eq!(rho.weight(4.0), 0.25);
        assert!(rho.weight(1e300) > 0.0);
    }

    #[test]
    fn prime_matches_central_difference() {
        // deterministic sweep standing in for random draws
        let h = 1e-6;
        let mut checked = 0;
        for i in 0..10_000 {
            let x = -5.0 + 10.0 * (i as f64 + 0.5) / 10_000.0;
            if (x.abs() - 1.0).abs() < 1e-3 {
                continue;
            }
            let fd = (rho_value(x + h) - rho_value(x - h)) / (2.0 * h);
            assert!((fd - rho_prime(x)).abs() < 1e-6, "x = {x}: {fd}");
            checked += 1;
        }
        assert!(checked > 9_900);
    }

    proptest! {
        #[test]
        fn even_nonnegative(x in -1e6f64..1e6) {
            prop_assert_eq!(rho_value(x), rho_value(-x));
            prop_assert!(rho_value(x) >= 0.0);
        }

        #[test]
        fn subgradient_inequality(x in -50f64..50.0, y in -50f64..50.0) {
            prop_assert!(rho_value(x) - rho_value(y) >= rho_prime(y) * (x - y) - 1e-12);
        }

        #[test]
        fn prime_odd_bounded_lipschitz(x in -50f64..50.0, y in -50f64..50.0) {
            prop_assert_eq!(rho_prime(-x), -rho_prime(x));
            prop_assert!(rho_prime(x).abs() <= 2.0);
            prop_assert!((rho_prime(x) - rho_prime(y)).abs() <= (x - y).abs() + 1e-15);
        }

        #[test]
        fn identity_on_unit_interval(x in -1f64..=1.0) {
            prop_assert_eq!(rho_prime(x), x);
        }
    }
}
