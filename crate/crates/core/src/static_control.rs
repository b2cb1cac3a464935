//! Static collateral-share problems: the economic optimum (carry minus
//! expected liquidation loss) and the liquidation-budget infimum.

use crate::error::{invalid, Error, Result};
use crate::liquidation::{first_passage_unchecked, maintenance_fraction, VenueSpec};
use crate::model::{leverage, MarketParams};

/// Lower end of the admissible share domain.
pub const ALPHA_MIN: f64 = 1e-4;
/// Upper end of the admissible share domain; matches the band clip.
pub const ALPHA_MAX: f64 = 0.99;

const V1_GRID_STEP: f64 = 1e-4;
const V1_REFINE_STEP: f64 = 1e-6;
const V1_REFINE_HALF_WIDTH: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticProblem {
    pub market: MarketParams,
    pub theta_f: f64,
    /// Capital; normalized to 1 in all shipped configurations.
    pub capital: f64,
    /// Expected cumulative funding over the horizon, as a fraction.
    pub kappa_h: f64,
    /// Horizon in years.
    pub h: f64,
    /// Loss given liquidation, as a fraction of capital.
    pub lgd: f64,
    /// Admissible liquidation probability.
    pub epsilon: f64,
}

impl StaticProblem {
    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {}", self.h)));
        }
        if !(self.market.sigma > 0.0) {
            return Err(invalid("sigma must be positive"));
        }
        if !(self.theta_f > 0.0 && self.theta_f < 1.0) {
            return Err(invalid(format!("theta_F must lie in (0,1), got {}", self.theta_f)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(invalid(format!("epsilon must lie in (0,1], got {}", self.epsilon)));
        }
        if !(self.lgd >= 0.0) {
            return Err(invalid(format!("lgd must be nonnegative, got {}", self.lgd)));
        }
        if !(self.capital > 0.0) {
            return Err(invalid("capital must be positive"));
        }
        Ok(())
    }

    pub fn probability(&self, alpha: f64) -> f64 {
        first_passage_unchecked(alpha, self.theta_f, self.market.sigma, self.market.mu, self.h)
    }

    /// Economic objective `(1 - alpha) D kappa_h - LGD * P_liq(alpha)`.
    pub fn objective(&self, alpha: f64) -> f64 {
        (1.0 - alpha) * self.capital * self.kappa_h - self.lgd * self.probability(alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    /// Liquidation budget holds with equality.
    ConstraintActive,
    Interior,
    LowerBoundary,
    UpperBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticSolution {
    pub alpha_star: f64,
    pub objective_value: f64,
    pub binding: Binding,
}

/// Smallest share on `[ALPHA_MIN, ALPHA_MAX]` whose liquidation probability
/// is within budget, by bisection on the monotone probability map.
pub fn solve_variant2(problem: &StaticProblem) -> Result<StaticSolution> {
    problem.validate()?;
    let eps = problem.epsilon;
    let p_min = problem.probability(ALPHA_MIN);
    if p_min <= eps {
        return Ok(StaticSolution {
            alpha_star: ALPHA_MIN,
            objective_value: p_min,
            binding: Binding::LowerBoundary,
        });
    }
    let p_max = problem.probability(ALPHA_MAX);
    if p_max > eps {
        return Err(Error::Infeasible(format!(
            "liquidation probability {p_max:.3e} at alpha={ALPHA_MAX} exceeds budget {eps:.3e}"
        )));
    }
    // invariant: P(lo) > eps >= P(hi)
    let (mut lo, mut hi) = (ALPHA_MIN, ALPHA_MAX);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if problem.probability(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(StaticSolution {
        alpha_star: hi,
        objective_value: problem.probability(hi),
        binding: Binding::ConstraintActive,
    })
}

/// Maximizer of the economic objective by dense grid plus a local fine grid.
/// Exact ties resolve toward the larger share.
pub fn solve_variant1(problem: &StaticProblem) -> Result<StaticSolution> {
    problem.validate()?;
    let n = ((ALPHA_MAX - ALPHA_MIN) / V1_GRID_STEP).round() as usize;
    let grid = (0..=n).map(|i| (ALPHA_MIN + i as f64 * V1_GRID_STEP).min(ALPHA_MAX));
    let (coarse, _) = argmax(grid, |a| problem.objective(a));

    let lo = (coarse - V1_REFINE_HALF_WIDTH).max(ALPHA_MIN);
    let hi = (coarse + V1_REFINE_HALF_WIDTH).min(ALPHA_MAX);
    let m = ((hi - lo) / V1_REFINE_STEP).round() as usize;
    let fine = (0..=m).map(|i| (lo + i as f64 * V1_REFINE_STEP).min(hi));
    let (alpha_star, objective_value) = argmax(fine, |a| problem.objective(a));

    let binding = if alpha_star <= ALPHA_MIN {
        Binding::LowerBoundary
    } else if alpha_star >= ALPHA_MAX {
        Binding::UpperBoundary
    } else {
        Binding::Interior
    };
    Ok(StaticSolution {
        alpha_star,
        objective_value,
        binding,
    })
}

fn argmax(points: impl Iterator<Item = f64>, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for a in points {
        let v = f(a);
        if v >= best.1 {
            best = (a, v);
        }
    }
    best
}

/// One calibrated (venue, asset) input to the benchmark slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceInput {
    pub venue: VenueSpec,
    pub asset: String,
    /// Unstressed annualized volatility.
    pub sigma: f64,
    /// Expected funding over the horizon, as a fraction.
    pub kappa_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    pub epsilon: f64,
    pub stress: f64,
    pub h: f64,
    pub mu: f64,
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.001,
            stress: 1.5,
            h: 1.0 / 365.0,
            mu: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub venue: String,
    pub asset: String,
    pub alpha_star: f64,
    pub leverage: f64,
    pub kappa_h_bps: f64,
    pub theta_f: f64,
}

pub fn benchmark_slice(inputs: &[SliceInput], cfg: &SliceConfig) -> Result<Vec<BenchmarkRow>> {
    inputs
        .iter()
        .map(|input| {
            let theta_f = maintenance_fraction(&input.venue)?;
            let market = MarketParams::new(cfg.mu, input.sigma)?.stressed(cfg.stress)?;
            let problem = StaticProblem {
                market,
                theta_f,
                capital: 1.0,
                kappa_h: input.kappa_h,
                h: cfg.h,
                lgd: 0.0,
                epsilon: cfg.epsilon,
            };
            let sol = solve_variant2(&problem)?;
            Ok(BenchmarkRow {
                venue: input.venue.name.clone(),
                asset: input.asset.clone(),
                alpha_star: sol.alpha_star,
                leverage: leverage(sol.alpha_star)?,
                kappa_h_bps: input.kappa_h * 1e4,
                theta_f,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liquidation::MaintenanceRule;

    fn problem(sigma: f64, theta_f: f64, h: f64, eps: f64) -> StaticProblem {
        StaticProblem {
            market: MarketParams::new(0.0, sigma).unwrap(),
            theta_f,
            capital: 1.0,
            kappa_h: 0.82e-4,
            h,
            lgd: 0.1,
            epsilon: eps,
        }
    }

    /// Brute-force infimum on a 1e-5 grid.
    fn grid_infimum(p: &StaticProblem) -> f64 {
        let mut a = ALPHA_MIN;
        while a <= ALPHA_MAX {
            if p.probability(a) <= p.epsilon {
                return a;
            }
            a += 1e-5;
        }
        f64::NAN
    }

    #[test]
    fn vacuous_budget_returns_domain_minimum() {
        let sol = solve_variant2(&problem(0.9, 0.0125, 1.0 / 365.0, 1.0)).unwrap();
        assert_eq!(sol.alpha_star, ALPHA_MIN);
        assert_eq!(sol.binding, Binding::LowerBoundary);
    }

    #[test]
    fn variant2_matches_grid_and_hits_budget() {
        let p = problem(0.6 * 1.5, 0.0125, 1.0 / 365.0, 0.001);
        let sol = solve_variant2(&p).unwrap();
        assert!((sol.alpha_star - grid_infimum(&p)).abs() <= 2e-5);
        let pr = p.probability(sol.alpha_star);
        assert!(pr <= 0.001 && pr >= 0.001 - 1e-9, "{pr}");
    }

    #[test]
    fn variant2_infeasible() {
        let p = problem(50.0, 0.05, 1.0, 1e-6);
        assert!(matches!(solve_variant2(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn variant2_monotone_in_sigma_and_theta() {
        let mut prev = 0.0;
        for i in 1..=15 {
            let a = solve_variant2(&problem(0.15 * i as f64, 0.0125, 1.0 / 365.0, 0.001))
                .unwrap()
                .alpha_star;
            assert!(a >= prev);
            prev = a;
        }
        let mut prev = 0.0;
        for i in 1..=15 {
            let a = solve_variant2(&problem(0.9, 0.004 * i as f64, 1.0 / 365.0, 0.001))
                .unwrap()
                .alpha_star;
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn variant1_pure_carry_goes_to_minimum() {
        let mut p = problem(0.9, 0.0125, 1.0 / 365.0, 0.001);
        p.lgd = 0.0;
        let sol = solve_variant1(&p).unwrap();
        assert_eq!(sol.alpha_star, ALPHA_MIN);
        assert_eq!(sol.binding, Binding::LowerBoundary);
    }

    #[test]
    fn variant1_pure_risk_goes_to_maximum() {
        let mut p = problem(0.9, 0.0125, 1.0 / 365.0, 0.001);
        p.kappa_h = 0.0;
        let sol = solve_variant1(&p).unwrap();
        assert_eq!(sol.alpha_star, ALPHA_MAX);
        assert_eq!(sol.binding, Binding::UpperBoundary);
    }

    #[test]
    fn variant1_interior_first_order_condition() {
        let p = problem(0.6 * 1.5, 0.008, 1.0 / 365.0, 0.001);
        let sol = solve_variant1(&p).unwrap();
        assert_eq!(sol.binding, Binding::Interior);
        let a = sol.alpha_star;
        let h = 1e-6;
        let d1 = (p.objective(a + h) - p.objective(a - h)) / (2.0 * h);
        let d2 = (p.objective(a + h) - 2.0 * p.objective(a) + p.objective(a - h)) / (h * h);
        assert!(d2 < 0.0);
        assert!(d1.abs() <= d2.abs() * V1_REFINE_STEP, "J'={d1} J''={d2}");
        // also optimal on the coarse grid
        let mut g = ALPHA_MIN;
        while g <= ALPHA_MAX {
            assert!(sol.objective_value >= p.objective(g));
            g += V1_GRID_STEP;
        }
    }

    #[test]
    fn slice_rows_follow_inputs() {
        let inputs = vec![
            SliceInput {
                venue: VenueSpec::new("binance", 125, MaintenanceRule::FullInitial),
                asset: "BTC".into(),
                sigma: 0.5,
                kappa_h: 0.82e-4,
            },
            SliceInput {
                venue: VenueSpec::new("hyperliquid", 10, MaintenanceRule::HalfOfInitial),
                asset: "LINK".into(),
                sigma: 0.8,
                kappa_h: 2.65e-4,
            },
        ];
        let rows = benchmark_slice(&inputs, &SliceConfig::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].theta_f, 0.008);
        assert_eq!(rows[1].theta_f, 0.05);
        for r in &rows {
            assert!((r.leverage - (1.0 - r.alpha_star) / r.alpha_star).abs() < 1e-12);
        }
        assert!((rows[0].kappa_h_bps - 0.82).abs() < 1e-12);
        assert!(benchmark_slice(&[], &SliceConfig::default()).unwrap().is_empty());
    }
}
