//! Venue maintenance rules, the liquidation barrier, and the closed-form
//! first-passage probability of a GBM spot price through that barrier.

use crate::error::{invalid, Result};
use crate::special::erfc;

/// How a venue sets maintenance margin relative to the maximum initial margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaintenanceRule {
    /// Maintenance is half of `1 / L_max`.
    HalfOfInitial,
    /// Maintenance equals `1 / L_max`.
    FullInitial,
    /// Maintenance is `c / L_max` with `c` in (0, 1].
    CustomFraction(f64),
}

impl MaintenanceRule {
    pub fn fraction(&self) -> f64 {
        match *self {
            MaintenanceRule::HalfOfInitial => 0.5,
            MaintenanceRule::FullInitial => 1.0,
            MaintenanceRule::CustomFraction(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VenueSpec {
    pub name: String,
    pub max_leverage: u32,
    pub rule: MaintenanceRule,
}

impl VenueSpec {
    pub fn new(name: impl Into<String>, max_leverage: u32, rule: MaintenanceRule) -> Self {
        Self {
            name: name.into(),
            max_leverage,
            rule,
        }
    }

    pub fn theta_f(&self) -> Result<f64> {
        maintenance_fraction(self)
    }
}

pub fn maintenance_fraction(venue: &VenueSpec) -> Result<f64> {
    if venue.max_leverage < 1 {
        return Err(invalid(format!(
            "max leverage must be at least 1, got {}",
            venue.max_leverage
        )));
    }
    let c = venue.rule.fraction();
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid(format!("maintenance fraction c must lie in (0,1], got {c}")));
    }
    let theta = c / venue.max_leverage as f64;
    if theta >= 1.0 {
        return Err(invalid(format!("maintenance fraction {theta} must be below 1")));
    }
    Ok(theta)
}

/// Spot-price ratio at which the margin account hits maintenance.
pub fn barrier_z(alpha: f64, theta_f: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in [0,1), got {alpha}")));
    }
    if !(theta_f >= 0.0) {
        return Err(invalid(format!("theta_F must be nonnegative, got {theta_f}")));
    }
    Ok(1.0 / ((1.0 + theta_f) * (1.0 - alpha)))
}

/// Collateral share at which the venue liquidates, `theta / (1 + theta)`.
pub fn liquidation_alpha(theta_f: f64) -> f64 {
    theta_f / (1.0 + theta_f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierProblem {
    pub alpha: f64,
    pub theta_f: f64,
    /// Volatility per sqrt-year.
    pub sigma: f64,
    /// Drift per year.
    pub mu: f64,
    /// Horizon in years.
    pub h: f64,
}

impl BarrierProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {}", self.h)));
        }
        if !(self.sigma > 0.0) {
            return Err(invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.theta_f > 0.0 && self.theta_f < 1.0) {
            return Err(invalid(format!("theta_F must lie in (0,1), got {}", self.theta_f)));
        }
        Ok(())
    }

    /// `nu = mu / sigma^2 - 1/2`
    pub fn nu(&self) -> f64 {
        self.mu / (self.sigma * self.sigma) - 0.5
    }
}

/// Probability that the spot ratio reaches the liquidation barrier within the
/// horizon. Returns exactly 1 when the barrier is already at or below the
/// current price.
pub fn liq_probability(problem: &BarrierProblem) -> Result<f64> {
    problem.validate()?;
    Ok(first_passage_unchecked(
        problem.alpha,
        problem.theta_f,
        problem.sigma,
        problem.mu,
        problem.h,
    ))
}

/// Same as [`liq_probability`] without validation; used in solver inner loops
/// whose inputs are checked once up front.
pub(crate) fn first_passage_unchecked(alpha: f64, theta_f: f64, sigma: f64, mu: f64, h: f64) -> f64 {
    let z = 1.0 / ((1.0 + theta_f) * (1.0 - alpha));
    if z <= 1.0 {
        return 1.0;
    }
    let lz = z.ln();
    let nu = mu / (sigma * sigma) - 0.5;
    let sqrt_h = h.sqrt();
    let a = lz / (sigma * (2.0 * h).sqrt());
    let b = nu * sigma * sqrt_h / std::f64::consts::SQRT_2;
    let first = 0.5 * erfc(a - b);
    let tail = erfc(a + b);
    let second = if tail == 0.0 {
        0.0
    } else {
        0.5 * (2.0 * nu * lz + tail.ln()).exp()
    };
    (first + second).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hl(l: u32) -> VenueSpec {
        VenueSpec::new("hyperliquid", l, MaintenanceRule::HalfOfInitial)
    }
    fn bn(l: u32) -> VenueSpec {
        VenueSpec::new("binance", l, MaintenanceRule::FullInitial)
    }

    #[test]
    fn maintenance_fraction_examples() {
        assert_eq!(maintenance_fraction(&hl(40)).unwrap(), 0.0125);
        assert_eq!(maintenance_fraction(&bn(125)).unwrap(), 0.008);
        assert_eq!(maintenance_fraction(&hl(10)).unwrap(), 0.05);
        let custom = VenueSpec::new("x", 20, MaintenanceRule::CustomFraction(0.6));
        assert!((maintenance_fraction(&custom).unwrap() - 0.03).abs() < 1e-15);
    }

    #[test]
    fn maintenance_fraction_rejects_bad_rules() {
        assert!(maintenance_fraction(&VenueSpec::new("x", 10, MaintenanceRule::CustomFraction(0.0))).is_err());
        assert!(maintenance_fraction(&VenueSpec::new("x", 10, MaintenanceRule::CustomFraction(1.5))).is_err());
        assert!(maintenance_fraction(&bn(0)).is_err());
        // L_max = 1 with full maintenance would put theta at 1
        assert!(maintenance_fraction(&bn(1)).is_err());
    }

    #[test]
    fn barrier_examples() {
        assert_eq!(barrier_z(0.0, 0.0).unwrap(), 1.0);
        assert!((barrier_z(0.123, 0.008).unwrap() - 1.131_201_245_226_33).abs() < 1e-12);
        assert!(barrier_z(1.0, 0.01).is_err());
        for theta in [0.008, 0.0125, 0.05] {
            let edge = liquidation_alpha(theta);
            assert!(barrier_z(edge - 1e-9, theta).unwrap() < 1.0);
            assert!(barrier_z(edge + 1e-9, theta).unwrap() > 1.0);
        }
    }

    #[test]
    fn liquidation_alpha_examples() {
        assert_eq!(liquidation_alpha(0.0), 0.0);
        assert!((liquidation_alpha(0.05) - 0.047_619_047_619).abs() < 1e-12);
        assert_eq!(liquidation_alpha(1.0), 0.5);
    }

    fn problem(alpha: f64, theta_f: f64, sigma: f64, mu: f64, h: f64) -> BarrierProblem {
        BarrierProblem { alpha, theta_f, sigma, mu, h }
    }

    #[test]
    fn breached_barrier_is_certain() {
        let p = problem(0.01, 0.0125, 0.6, 0.0, 1.0 / 365.0);
        assert_eq!(liq_probability(&p).unwrap(), 1.0);
    }

    #[test]
    fn vanishes_as_share_approaches_one() {
        let p = problem(0.999, 0.0125, 0.6, 0.0, 1.0 / 365.0);
        assert!(liq_probability(&p).unwrap() < 1e-300);
    }

    // Reference values from a 40-digit evaluation of the same expression.
    #[test]
    fn matches_high_precision_reference() {
        let day = 1.0 / 365.0;
        let cases = [
            (0.05, 0.008, 0.3, 0.0, day, 0.005_671_995_869_89),
            (0.1, 0.0125, 0.6, 0.0, day, 0.002_943_109_999_35),
            (0.25, 0.05, 1.5, 0.0, day, 0.002_079_434_983_053_84),
            (0.1, 0.0125, 0.6, 0.5, day, 0.003_347_862_090_049_77),
            (0.1, 0.0125, 0.6, -0.5, day, 0.002_583_129_113_814_46),
        ];
        for (a, th, s, mu, h, want) in cases {
            let got = liq_probability(&problem(a, th, s, mu, h)).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "{a} {th} {s} {mu}: {got} vs {want}");
        }
    }

    #[test]
    fn decreasing_in_share() {
        for theta in [0.008, 0.0125, 0.05] {
            for sigma in [0.3, 0.8, 1.5] {
                let start = liquidation_alpha(theta) + 1e-4;
                let mut prev = f64::INFINITY;
                for i in 0..300 {
                    let a = start + i as f64 * 0.002;
                    let p = liq_probability(&problem(a, theta, sigma, 0.0, 3.0 / 8760.0)).unwrap();
                    assert!(p <= prev + 1e-12);
                    if prev > 1e-250 && p > 0.0 {
                        assert!(p < prev, "not strictly decreasing at {a}");
                    }
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn nondecreasing_in_sigma_and_theta() {
        let h = 1.0 / 365.0;
        for a in [0.05, 0.1, 0.2] {
            let mut prev = 0.0;
            for i in 1..=30 {
                let p = liq_probability(&problem(a, 0.0125, 0.1 * i as f64, 0.0, h)).unwrap();
                assert!(p >= prev);
                prev = p;
            }
            let mut prev = 0.0;
            for i in 1..=30 {
                let p = liq_probability(&problem(a, 0.002 * i as f64, 0.8, 0.0, h)).unwrap();
                assert!(p >= prev);
                prev = p;
            }
        }
    }

    #[test]
    fn rejects_invalid_problem() {
        assert!(liq_probability(&problem(0.1, 0.01, 0.0, 0.0, 1.0)).is_err());
        assert!(liq_probability(&problem(0.1, 0.01, 0.5, 0.0, 0.0)).is_err());
        assert!(liq_probability(&problem(1.0, 0.01, 0.5, 0.0, 1.0)).is_err());
    }
}
