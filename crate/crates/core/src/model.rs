//! Market and portfolio primitives for a long-spot / short-perpetual position.
//!
//! All shares are plain fractions of capital and all times are in years.

use crate::error::{invalid, Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;
pub const DAYS_PER_YEAR: f64 = 365.0;
pub const SECONDS_PER_HOUR: i64 = 3600;
pub const SECONDS_PER_DAY: i64 = 86_400;

pub fn hours_to_years(hours: f64) -> f64 {
    hours / HOURS_PER_YEAR
}

pub fn days_to_years(days: f64) -> f64 {
    days / DAYS_PER_YEAR
}

/// Perpetual-to-spot tether inputs.
///
/// `zeta` is stored rather than always derived so that callers can pin it
/// directly; [`TetherParams::from_components`] derives it from the premium
/// sensitivity, interest component and financing terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherParams {
    pub kappa_prem: f64,
    pub iota: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub zeta: f64,
}

impl Default for TetherParams {
    fn default() -> Self {
        Self {
            kappa_prem: 0.0,
            iota: 0.0,
            r_x: 0.0,
            r_y: 0.0,
            zeta: 1.0,
        }
    }
}

impl TetherParams {
    /// `zeta = (kappa - iota) / (kappa + r_y - r_x)`, falling back to 1 when
    /// the denominator vanishes.
    pub fn from_components(kappa_prem: f64, iota: f64, r_x: f64, r_y: f64) -> Self {
        let denom = kappa_prem + r_y - r_x;
        let zeta = if denom != 0.0 {
            (kappa_prem - iota) / denom
        } else {
            1.0
        };
        Self {
            kappa_prem,
            iota,
            r_x,
            r_y,
            zeta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Drift per year.
    pub mu: f64,
    /// Volatility per sqrt-year.
    pub sigma: f64,
    pub tether: TetherParams,
}

impl MarketParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        if !mu.is_finite() {
            return Err(invalid("mu must be finite"));
        }
        Ok(Self {
            mu,
            sigma,
            tether: TetherParams::default(),
        })
    }

    /// Stress scales volatility only.
    pub fn stressed(&self, multiplier: f64) -> Result<Self> {
        if !(multiplier > 0.0) {
            return Err(invalid(format!("stress must be positive, got {multiplier}")));
        }
        Ok(Self {
            sigma: self.sigma * multiplier,
            ..*self
        })
    }
}

/// State of a delta-neutral basis position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioState {
    /// Capital in numeraire units.
    pub capital: f64,
    pub alpha0: f64,
    pub p0: f64,
    /// Perpetual price at inception, `zeta * p0`.
    pub f0: f64,
    pub zeta: f64,
    /// Spot units held.
    pub spot_units: f64,
    /// Perpetual position; negative is short.
    pub hedge: f64,
    /// Margin balance at inception.
    pub margin: f64,
    pub funding_accrued: f64,
    pub t: f64,
}

impl PortfolioState {
    pub fn initial_margin(&self) -> f64 {
        self.margin
    }

    /// Marked derivative account `M0 + H (f - f0) - H * funding_integral`.
    pub fn futures_value(&self, f: f64, funding_integral: f64) -> f64 {
        self.margin + self.hedge * (f - self.f0) - self.hedge * funding_integral
    }

    /// Total portfolio value `Q p + V^F`.
    pub fn value(&self, p: f64, f: f64, funding_integral: f64) -> f64 {
        self.spot_units * p + self.futures_value(f, funding_integral)
    }

    /// Residual spot delta `Q + zeta H`.
    pub fn delta(&self) -> f64 {
        self.spot_units + self.zeta * self.hedge
    }
}

pub fn build_portfolio(
    capital: f64,
    alpha0: f64,
    p0: f64,
    tether: &TetherParams,
) -> Result<PortfolioState> {
    if !(capital > 0.0) {
        return Err(invalid(format!("capital must be positive, got {capital}")));
    }
    if !(p0 > 0.0) {
        return Err(invalid(format!("initial price must be positive, got {p0}")));
    }
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(invalid(format!("alpha0 must lie in (0,1), got {alpha0}")));
    }
    let zeta = tether.zeta;
    if zeta == 0.0 || !zeta.is_finite() {
        return Err(invalid("tether coefficient must be finite and nonzero"));
    }
    let spot_units = (1.0 - alpha0) * capital / p0;
    Ok(PortfolioState {
        capital,
        alpha0,
        p0,
        f0: zeta * p0,
        zeta,
        spot_units,
        hedge: -spot_units / zeta,
        margin: alpha0 * capital,
        funding_accrued: 0.0,
        t: 0.0,
    })
}

/// Collateral share under the mark-to-market approximation. The result may be
/// non-positive once the price has moved past the liquidation-free region.
pub fn alpha_marked(alpha0: f64, price_ratio: f64) -> f64 {
    1.0 - (1.0 - alpha0) * price_ratio
}

/// Collateral share from the full state equation, including the supplied
/// funding integral.
pub fn alpha_full(state: &PortfolioState, p: f64, f: f64, funding_integral: f64) -> Result<f64> {
    let vf = state.futures_value(f, funding_integral);
    let denom = state.spot_units * p + vf;
    if !(denom > 0.0) {
        return Err(Error::DegenerateEquity(denom));
    }
    Ok(vf / denom)
}

pub fn leverage(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1], got {alpha}")));
    }
    Ok((1.0 - alpha) / alpha)
}

/// Hedge-leg leverage along a price path under the marked approximation.
pub fn leverage_path(alpha0: f64, price_ratio: f64) -> Result<f64> {
    let a = alpha_marked(alpha0, price_ratio);
    if !(a > 0.0) {
        return Err(Error::LiquidatedRegion(a));
    }
    Ok((1.0 - alpha0) * price_ratio / a)
}

/// `dL/dp = (1 - alpha0) / (p0 * alpha_t^2)`.
pub fn leverage_sensitivity(alpha0: f64, p0: f64, price_ratio: f64) -> Result<f64> {
    let a = alpha_marked(alpha0, price_ratio);
    if !(a > 0.0) {
        return Err(Error::LiquidatedRegion(a));
    }
    Ok((1.0 - alpha0) / (p0 * a * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_reference_portfolio() {
        let s = build_portfolio(100.0, 0.2, 10.0, &TetherParams::default()).unwrap();
        assert!((s.spot_units - 8.0).abs() < 1e-12);
        assert!((s.hedge + 8.0).abs() < 1e-12);
        assert!((s.margin - 20.0).abs() < 1e-12);
        assert!((s.value(10.0, 10.0, 0.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn nearly_all_margin() {
        let s = build_portfolio(50.0, 1.0 - 1e-12, 3.0, &TetherParams::default()).unwrap();
        assert!(s.spot_units.abs() < 1e-9);
        assert!(s.hedge.abs() < 1e-9);
        assert!((s.margin - 50.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = TetherParams::default();
        assert!(build_portfolio(100.0, 0.0, 10.0, &t).is_err());
        assert!(build_portfolio(100.0, 1.0, 10.0, &t).is_err());
        assert!(build_portfolio(0.0, 0.2, 10.0, &t).is_err());
        assert!(build_portfolio(100.0, 0.2, -1.0, &t).is_err());
        assert!(MarketParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn tether_derivation() {
        let t = TetherParams::from_components(0.5, 0.1, 0.02, 0.03);
        assert!((t.zeta - 0.4 / 0.51).abs() < 1e-15);
        assert_eq!(TetherParams::from_components(0.1, 0.0, 0.1, 0.0).zeta, 1.0);
    }

    #[test]
    fn stress_touches_sigma_only() {
        let m = MarketParams::new(0.05, 0.4).unwrap();
        let s = m.stressed(1.5).unwrap();
        assert!((s.sigma - 0.6).abs() < 1e-15);
        assert_eq!(s.mu, 0.05);
    }

    #[test]
    fn marked_share_examples() {
        assert!((alpha_marked(0.2, 1.0) - 0.2).abs() < 1e-15);
        assert!((alpha_marked(0.2, 1.1) - 0.12).abs() < 1e-12);
        assert!(alpha_marked(0.2, 1.25).abs() < 1e-12);
    }

    #[test]
    fn full_share_matches_marked_share() {
        for zeta in [1.0, 0.97, 1.3] {
            let tether = TetherParams {
                zeta,
                ..Default::default()
            };
            let s = build_portfolio(250.0, 0.15, 40.0, &tether).unwrap();
            assert!((alpha_full(&s, 40.0, zeta * 40.0, 0.0).unwrap() - 0.15).abs() < 1e-15);
            let upper = 1.0 / (1.0 - 0.15);
            for i in 1..200 {
                let ratio = upper * i as f64 / 200.0;
                let p = 40.0 * ratio;
                let full = alpha_full(&s, p, zeta * p, 0.0).unwrap();
                assert!((full - alpha_marked(0.15, ratio)).abs() < 1e-12, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn full_share_without_hedge() {
        let mut s = build_portfolio(100.0, 0.3, 5.0, &TetherParams::default()).unwrap();
        s.hedge = 0.0;
        let a = alpha_full(&s, 6.0, 6.0, 0.0).unwrap();
        assert!((a - s.margin / (s.spot_units * 6.0 + s.margin)).abs() < 1e-15);
    }

    #[test]
    fn full_share_signals_degenerate_equity() {
        let s = build_portfolio(100.0, 0.2, 10.0, &TetherParams::default()).unwrap();
        let mut broken = s;
        broken.spot_units = 0.0;
        broken.margin = -1.0;
        broken.hedge = 0.0;
        assert!(matches!(
            alpha_full(&broken, 10.0, 10.0, 0.0),
            Err(Error::DegenerateEquity(_))
        ));
    }

    #[test]
    fn funding_raises_share() {
        let s = build_portfolio(100.0, 0.2, 10.0, &TetherParams::default()).unwrap();
        let a = alpha_full(&s, 10.0, 10.0, 0.5).unwrap();
        // short hedge receives 8 * 0.5 = 4 of funding
        assert!((a - 24.0 / 104.0).abs() < 1e-15);
    }

    #[test]
    fn leverage_examples() {
        assert_eq!(leverage(0.5).unwrap(), 1.0);
        assert_eq!(leverage(1.0).unwrap(), 0.0);
        assert!((leverage(0.123).unwrap() - 7.130_081_300_813).abs() < 1e-9);
        assert!(leverage(0.0).is_err());
    }

    #[test]
    fn leverage_path_consistent_at_inception() {
        assert!((leverage_path(0.2, 1.0).unwrap() - leverage(0.2).unwrap()).abs() < 1e-15);
        assert!(matches!(leverage_path(0.2, 1.3), Err(Error::LiquidatedRegion(_))));
    }

    #[test]
    fn sensitivity_matches_finite_difference() {
        let (a0, p0) = (0.18, 25.0);
        for ratio in [0.5, 0.8, 1.0, 1.1, 1.15] {
            let h = 1e-6;
            let up = leverage_path(a0, ratio + h / p0).unwrap();
            let dn = leverage_path(a0, ratio - h / p0).unwrap();
            let fd = (up - dn) / (2.0 * h);
            let exact = leverage_sensitivity(a0, p0, ratio).unwrap();
            assert!(((fd - exact) / exact).abs() < 1e-4, "ratio {ratio}: {fd} vs {exact}");
        }
    }

    #[test]
    fn leverage_path_increasing_and_convex() {
        let a0 = 0.2;
        let top = 1.0 / (1.0 - a0);
        let grid: Vec<f64> = (1..400).map(|i| top * i as f64 / 400.0).collect();
        let l: Vec<f64> = grid.iter().map(|&r| leverage_path(a0, r).unwrap()).collect();
        for w in l.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] > 0.0);
        }
    }

    #[test]
    fn leverage_decreasing_in_share() {
        let mut prev = f64::INFINITY;
        for i in 1..=1000 {
            let l = leverage(i as f64 / 1000.0).unwrap();
            assert!(l < prev);
            prev = l;
        }
    }
}
