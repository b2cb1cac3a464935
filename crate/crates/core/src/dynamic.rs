//! Asymmetric no-action band around the target collateral share and the
//! operational policy step that decides whether, and how much, to trade.

use crate::error::{invalid, Result};
use crate::model::{hours_to_years, MarketParams};
use crate::static_control::{solve_variant2, StaticProblem, ALPHA_MAX};

/// Default saturation point of the upper boundary.
pub const DEFAULT_CLIP: f64 = ALPHA_MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBand {
    pub target: f64,
    pub lower: f64,
    pub upper: f64,
    pub clip: f64,
}

impl AlphaBand {
    /// The upper edge may coincide with the target: that is the band a
    /// nonpositive rebalancing cost produces.
    pub fn new(lower: f64, target: f64, upper: f64, clip: f64) -> Result<Self> {
        let band = Self {
            target,
            lower,
            upper,
            clip,
        };
        band.validate()?;
        Ok(band)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lower > 0.0
            && self.lower < self.target
            && self.target <= self.upper
            && self.upper <= self.clip
            && self.clip < 1.0;
        if ok {
            Ok(())
        } else {
            Err(invalid(format!(
                "band must satisfy 0 < lower < target <= upper <= clip < 1, got {} / {} / {} / {}",
                self.lower, self.target, self.upper, self.clip
            )))
        }
    }

    pub fn region(&self, alpha: f64) -> Region {
        if alpha < self.lower {
            Region::Below
        } else if alpha > self.upper {
            Region::Above
        } else {
            Region::Inside
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Below,
    Inside,
    Above,
}

/// Components of the one-shot cost of a downward rebalance, all as
/// fractions of capital.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RebalanceCost {
    pub fee: f64,
    pub impact: f64,
    pub gas: f64,
    pub exec: f64,
    /// Basis captured by the unwind; offsets the other terms.
    pub basis_credit: f64,
}

impl RebalanceCost {
    pub fn total(&self) -> f64 {
        self.fee + self.impact + self.gas + self.exec - self.basis_credit
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub h_liq_hours: f64,
    pub eps_liq: f64,
    /// Expected cumulative funding over the decision horizon.
    pub kappa_h: f64,
    /// Fixed cost of a downward rebalance, fraction of capital.
    pub k_fix: f64,
    /// Smallest tradable notional.
    pub q_min: f64,
    pub decision_horizon_days: u32,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            h_liq_hours: 3.0,
            eps_liq: 1e-4,
            kappa_h: 0.0,
            k_fix: 0.001,
            q_min: 10_000.0,
            decision_horizon_days: 14,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_liq_hours > 0.0) {
            return Err(invalid(format!("h_liq must be positive, got {}", self.h_liq_hours)));
        }
        if !(self.eps_liq > 0.0 && self.eps_liq <= 1.0) {
            return Err(invalid(format!("eps_liq must lie in (0,1], got {}", self.eps_liq)));
        }
        if !(self.q_min >= 0.0) {
            return Err(invalid(format!("q_min must be nonnegative, got {}", self.q_min)));
        }
        if self.decision_horizon_days == 0 {
            return Err(invalid("decision horizon must be at least one day"));
        }
        Ok(())
    }
}

/// Per-side ceilings on what can be executed right now.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecCaps {
    pub buy: f64,
    pub sell: f64,
}

impl ExecCaps {
    pub const UNBOUNDED: ExecCaps = ExecCaps {
        buy: f64::INFINITY,
        sell: f64::INFINITY,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Hold,
    /// Intervention on a breach of the lower edge.
    BuyBasis,
    /// Intervention on a breach of the upper edge.
    SellBasis,
    /// Lower edge breached but the executable size is below the minimum.
    Emergency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyAction {
    pub kind: ActionKind,
    pub notional: f64,
    pub resulting_alpha: f64,
}

/// Liquidation-safe floor of the band over the short operational horizon.
pub fn lower_bound(market: &MarketParams, theta_f: f64, cfg: &PolicyConfig) -> Result<f64> {
    cfg.validate()?;
    let problem = StaticProblem {
        market: *market,
        theta_f,
        capital: 1.0,
        kappa_h: cfg.kappa_h,
        h: hours_to_years(cfg.h_liq_hours),
        lgd: 0.0,
        epsilon: cfg.eps_liq,
    };
    Ok(solve_variant2(&problem)?.alpha_star)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    pub alpha: f64,
    /// Set when the boundary sits at the clip rather than at the break-even.
    pub saturated: bool,
}

/// Share at which the carry forgone on excess collateral pays for one
/// rebalance.
pub fn upper_bound(target: f64, capital: f64, kappa_h: f64, k_reb: f64, clip: f64) -> UpperBound {
    if k_reb <= 0.0 {
        return UpperBound {
            alpha: target.min(clip),
            saturated: target >= clip,
        };
    }
    if kappa_h <= 0.0 || capital <= 0.0 {
        return UpperBound {
            alpha: clip,
            saturated: true,
        };
    }
    let raw = target + k_reb / (capital * kappa_h);
    if raw >= clip {
        UpperBound {
            alpha: clip,
            saturated: true,
        }
    } else {
        UpperBound {
            alpha: raw,
            saturated: false,
        }
    }
}

/// Whether excess collateral earns enough carry to cover the fixed cost.
pub fn carry_test(alpha_t: f64, target: f64, capital: f64, kappa_h: f64, k_fix: f64) -> bool {
    (alpha_t - target) * capital * kappa_h >= k_fix
}

pub fn target_rebalance_size(alpha_t: f64, target: f64, equity: f64) -> f64 {
    (alpha_t - target).abs() * equity
}

/// One decision of the band policy. Total: every input yields an action.
/// `cfg.k_fix` is a fraction of capital, so the carry comparison is done on
/// unit capital.
pub fn policy_step(
    alpha_t: f64,
    band: &AlphaBand,
    equity: f64,
    cfg: &PolicyConfig,
    caps: ExecCaps,
) -> PolicyAction {
    let hold = PolicyAction {
        kind: ActionKind::Hold,
        notional: 0.0,
        resulting_alpha: alpha_t,
    };
    let target_size = target_rebalance_size(alpha_t, band.target, equity.max(0.0));
    match band.region(alpha_t) {
        Region::Inside => hold,
        Region::Below => {
            let q = target_size.min(caps.buy.max(0.0));
            if q >= cfg.q_min && q > 0.0 {
                PolicyAction {
                    kind: ActionKind::BuyBasis,
                    notional: q,
                    resulting_alpha: partial_reset(alpha_t, band.target, q, target_size),
                }
            } else {
                PolicyAction {
                    kind: ActionKind::Emergency,
                    notional: 0.0,
                    resulting_alpha: alpha_t,
                }
            }
        }
        Region::Above => {
            if !carry_test(alpha_t, band.target, 1.0, cfg.kappa_h, cfg.k_fix) {
                return hold;
            }
            let q = target_size.min(caps.sell.max(0.0));
            if q >= cfg.q_min && q > 0.0 {
                PolicyAction {
                    kind: ActionKind::SellBasis,
                    notional: q,
                    resulting_alpha: partial_reset(alpha_t, band.target, q, target_size),
                }
            } else {
                hold
            }
        }
    }
}

fn partial_reset(alpha_t: f64, target: f64, executed: f64, full: f64) -> f64 {
    if executed >= full {
        target
    } else {
        alpha_t + (target - alpha_t) * (executed / full)
    }
}
