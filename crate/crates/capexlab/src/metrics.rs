//! Characteristic ratios, system-cost decomposition, and the inter-model
//! deviation measure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::SystemResult;
use crate::model::{annuity_factor, FeatureConfig, ScenarioModel, TimeSeries};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("demand is zero at hour {0}; the hourly ratio is undefined there")]
    ZeroDemandHour(usize),
    #[error("demand is zero everywhere; seasonal shares are undefined")]
    AllZeroDemand,
    #[error("deviation needs at least 2 entries, got {0}")]
    TooFewEntries(usize),
    #[error("deviation entries must be >= 0, got {0}")]
    NegativeEntry(f64),
}

/// Cost decomposition of one model run, currency per year.
///
/// `expansion_cost` and `system_cost` are derived sums, so the identity
/// `K_system = K_exp + K_OPEX,variable` holds by construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Annualized investment into endogenous expansion.
    pub invest_annuity: f64,
    /// Fixed O&M of endogenous expansion.
    pub opex_fix: f64,
    /// Variable operation: fuel-type costs, storage discharge costs,
    /// load-change costs, and unserved energy priced at the slack penalty.
    pub opex_variable: f64,
}

impl CostBreakdown {
    pub fn expansion_cost(&self) -> f64 {
        self.invest_annuity + self.opex_fix
    }

    pub fn system_cost(&self) -> f64 {
        self.expansion_cost() + self.opex_variable
    }
}

/// Season tag for one hour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Season {
    Summer,
    Winter,
}

/// Maps hours to seasons.
///
/// `CalendarYear` expects an 8760-hour horizon starting January 1 and
/// uses the March 21 .. September 20 summer window. Synthetic horizons
/// are not calendar years; `SyntheticQuarters` tags the first and last
/// quarter of the horizon as winter and the middle half as summer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeasonCalendar {
    CalendarYear,
    SyntheticQuarters,
}

impl SeasonCalendar {
    pub fn season(&self, hour: usize, horizon: usize) -> Season {
        match self {
            // Mar 21 starts after 79 full days, Sep 20 ends after 263.
            SeasonCalendar::CalendarYear => {
                if (79 * 24..263 * 24).contains(&hour) {
                    Season::Summer
                } else {
                    Season::Winter
                }
            }
            SeasonCalendar::SyntheticQuarters => {
                if hour < horizon / 4 || hour >= horizon - horizon / 4 {
                    Season::Winter
                } else {
                    Season::Summer
                }
            }
        }
    }
}

/// Mean over hours of `capacity * profile_t / demand_t`.
///
/// This is the mean of hourly instantaneous ratios, not an annual-energy
/// ratio; hours with zero demand are rejected because the hourly ratio is
/// undefined there.
pub fn vre_demand_ratio(
    capacity: f64,
    profile: &TimeSeries,
    demand: &TimeSeries,
) -> Result<f64, MetricsError> {
    if profile.len() != demand.len() {
        return Err(MetricsError::LengthMismatch(profile.len(), demand.len()));
    }
    let mut sum = 0.0;
    for t in 0..demand.len() {
        if demand[t] == 0.0 {
            return Err(MetricsError::ZeroDemandHour(t));
        }
        sum += capacity * profile[t] / demand[t];
    }
    Ok(sum / demand.len() as f64)
}

/// Demand-weighted seasonal shares `(rho_summer, rho_winter)`.
///
/// The winter share is defined as `1 - rho_summer`, so the two always sum
/// to exactly one.
pub fn seasonal_shares(
    demand: &TimeSeries,
    calendar: SeasonCalendar,
) -> Result<(f64, f64), MetricsError> {
    let total = demand.sum();
    if total == 0.0 {
        return Err(MetricsError::AllZeroDemand);
    }
    let horizon = demand.len();
    let summer: f64 = (0..horizon)
        .filter(|&t| calendar.season(t, horizon) == Season::Summer)
        .map(|t| demand[t])
        .sum();
    let rho_summer = summer / total;
    Ok((rho_summer, 1.0 - rho_summer))
}

/// Regional characteristic ratios.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionCharacteristics {
    pub pv_demand_ratio: f64,
    pub wind_demand_ratio: f64,
    pub summer_share: f64,
    pub winter_share: f64,
}

/// Computes the characteristic ratios of one region. VRE technologies are
/// classified by id prefix: `pv*` counts as PV, `wind*` as wind.
pub fn region_characteristics(
    scenario: &ScenarioModel,
    region_id: &crate::model::RegionId,
    calendar: SeasonCalendar,
) -> Result<RegionCharacteristics, MetricsError> {
    let region = scenario
        .region(region_id)
        .unwrap_or_else(|| panic!("unknown region {region_id}"));
    let mut pv = 0.0;
    let mut wind = 0.0;
    for (tech, &cap) in &region.vre_capacity {
        let profile = &region.vre_profile[tech];
        let ratio = vre_demand_ratio(cap, profile, &region.demand)?;
        if tech.as_str().starts_with("pv") {
            pv += ratio;
        } else if tech.as_str().starts_with("wind") {
            wind += ratio;
        }
    }
    let (summer, winter) = seasonal_shares(&region.demand, calendar)?;
    Ok(RegionCharacteristics {
        pv_demand_ratio: pv,
        wind_demand_ratio: wind,
        summer_share: summer,
        winter_share: winter,
    })
}

/// Relative spread `(max - min) / max` of expansion outcomes across
/// models. Returns 0 when every entry is zero (the formula is 0/0 there;
/// identical outcomes mean no deviation).
pub fn deviation(expansions: &[f64]) -> Result<f64, MetricsError> {
    if expansions.len() < 2 {
        return Err(MetricsError::TooFewEntries(expansions.len()));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in expansions {
        if v < 0.0 {
            return Err(MetricsError::NegativeEntry(v));
        }
        min = min.min(v);
        max = max.max(v);
    }
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / max)
}

/// Herfindahl concentration index over nonnegative shares of `values`;
/// `None` when the total is zero. 1/n for an even split, 1.0 for full
/// concentration on a single entry.
pub fn herfindahl(values: &[f64]) -> Option<f64> {
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(values.iter().map(|v| (v / total) * (v / total)).sum())
}

/// Recomputes the cost decomposition of a result from its primal
/// quantities and the scenario's cost data.
///
/// For LP results this is an independent arithmetic path that must agree
/// with the solver objective; for heuristic results it defines the
/// fitness.
pub fn cost_breakdown(
    result: &SystemResult,
    scenario: &ScenarioModel,
    features: &FeatureConfig,
) -> CostBreakdown {
    let mut invest = 0.0;
    let mut fix = 0.0;
    let mut variable = 0.0;

    for ((_, tech_id), &cap) in &result.gen_expansion {
        let tech = scenario.dispatchable(tech_id).expect("known tech");
        let annuity = annuity_factor(tech.interest_rate, tech.lifetime).expect("valid tech");
        invest += annuity * tech.invest_cost * cap;
        fix += tech.fixed_om * cap;
    }
    for ((_, tech_id), caps) in &result.storage_expansion {
        let tech = scenario.storage_tech(tech_id).expect("known tech");
        let annuity = annuity_factor(tech.interest_rate, tech.lifetime).expect("valid tech");
        invest += annuity
            * (tech.energy_invest_cost * caps.energy_mwh
                + tech.charge_invest_cost * caps.charge_mw
                + tech.discharge_invest_cost * caps.discharge_mw);
        fix += tech.fixed_om_energy * caps.energy_mwh
            + tech.fixed_om_charge * caps.charge_mw
            + tech.fixed_om_discharge * caps.discharge_mw;
    }
    for (line_id, &cap) in &result.line_expansion {
        let line = scenario.line(line_id).expect("known line");
        invest += line.expansion_cost * cap;
    }

    for ((_, tech_id), series) in &result.generation {
        if let Some(tech) = scenario.dispatchable(tech_id) {
            let energy: f64 = series.iter().sum();
            variable += tech.var_cost * energy;
            if features.load_change_costs_enabled && tech.load_change_cost > 0.0 {
                let ramp: f64 = series.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
                variable += tech.load_change_cost * ramp;
            }
        }
        // VRE generation is free.
    }
    for ((_, tech_id), series) in &result.discharge {
        let tech = scenario.storage_tech(tech_id).expect("known tech");
        let energy: f64 = series.iter().sum();
        variable += tech.var_cost_discharge * energy;
    }
    for series in result.unserved.values() {
        let energy: f64 = series.iter().sum();
        variable += scenario.slack_penalty * energy;
    }

    CostBreakdown {
        invest_annuity: invest,
        opex_fix: fix,
        opex_variable: variable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vre_ratio_constant_case() {
        let profile = TimeSeries::constant(0.2, 4);
        let demand = TimeSeries::constant(4.0, 4);
        assert_eq!(vre_demand_ratio(10.0, &profile, &demand).unwrap(), 0.5);
    }

    #[test]
    fn vre_ratio_two_term_mean() {
        let profile = TimeSeries(vec![0.0, 0.5]);
        let demand = TimeSeries(vec![5.0, 5.0]);
        assert_eq!(vre_demand_ratio(10.0, &profile, &demand).unwrap(), 0.5);
    }

    #[test]
    fn vre_ratio_zero_profile() {
        let profile = TimeSeries::constant(0.0, 6);
        let demand = TimeSeries::constant(3.0, 6);
        assert_eq!(vre_demand_ratio(10.0, &profile, &demand).unwrap(), 0.0);
    }

    #[test]
    fn vre_ratio_rejects_zero_demand() {
        let profile = TimeSeries::constant(0.5, 3);
        let demand = TimeSeries(vec![2.0, 0.0, 2.0]);
        assert!(matches!(
            vre_demand_ratio(1.0, &profile, &demand),
            Err(MetricsError::ZeroDemandHour(1))
        ));
    }

    #[test]
    fn seasonal_shares_uniform_demand() {
        let demand = TimeSeries::constant(7.0, 48);
        let (s, w) = seasonal_shares(&demand, SeasonCalendar::SyntheticQuarters).unwrap();
        assert_eq!(s, 0.5);
        assert_eq!(w, 0.5);
    }

    #[test]
    fn seasonal_shares_winter_only_demand() {
        let mut values = vec![0.0; 48];
        for (t, v) in values.iter_mut().enumerate() {
            if t < 12 || t >= 36 {
                *v = 5.0;
            }
        }
        let (s, w) = seasonal_shares(&TimeSeries(values), SeasonCalendar::SyntheticQuarters).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(w, 1.0);
    }

    #[test]
    fn seasonal_share_matches_13_percent_winter_surplus() {
        // Equal-length seasons, winter demand 13% above summer:
        // rho_summer = 1 / 2.13.
        let mut values = vec![1.0; 48];
        for (t, v) in values.iter_mut().enumerate() {
            if t < 12 || t >= 36 {
                *v = 1.13;
            }
        }
        let (s, _) = seasonal_shares(&TimeSeries(values), SeasonCalendar::SyntheticQuarters).unwrap();
        assert!((s - 1.0 / 2.13).abs() < 1e-12);
        assert!((s - 0.46948356807511737).abs() < 1e-12);
    }

    #[test]
    fn deviation_spec_cases() {
        assert_eq!(deviation(&[2.0, 4.0, 8.0]).unwrap(), 0.75);
        assert_eq!(deviation(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(deviation(&[0.0, 5.0]).unwrap(), 1.0);
        assert_eq!(deviation(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            deviation(&[1.0]),
            Err(MetricsError::TooFewEntries(1))
        ));
        assert!(deviation(&[-1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn deviation_is_scale_invariant(
            values in proptest::collection::vec(0.0f64..1e6, 2..8),
            lambda in 1e-3f64..1e3,
        ) {
            let base = deviation(&values).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| v * lambda).collect();
            let dev = deviation(&scaled).unwrap();
            prop_assert!((base - dev).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&dev));
        }

        #[test]
        fn seasonal_shares_sum_to_one(
            values in proptest::collection::vec(0.0f64..1e5, 24..96),
        ) {
            prop_assume!(values.iter().sum::<f64>() > 0.0);
            let (s, w) =
                seasonal_shares(&TimeSeries(values), SeasonCalendar::SyntheticQuarters).unwrap();
            prop_assert_eq!(s + w, 1.0);
        }
    }

    #[test]
    fn herfindahl_even_vs_concentrated() {
        assert_eq!(herfindahl(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.25);
        assert_eq!(herfindahl(&[5.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(herfindahl(&[0.0, 0.0]), None);
    }

    #[test]
    fn calendar_year_summer_window() {
        let cal = SeasonCalendar::CalendarYear;
        assert_eq!(cal.season(79 * 24 - 1, 8760), Season::Winter);
        assert_eq!(cal.season(79 * 24, 8760), Season::Summer);
        assert_eq!(cal.season(263 * 24 - 1, 8760), Season::Summer);
        assert_eq!(cal.season(263 * 24, 8760), Season::Winter);
    }
}
