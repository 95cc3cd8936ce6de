//! Harmonized domain model: regions, technologies, time series, transmission,
//! use cases, and the feature toggles that distinguish model profiles.
//!
//! Every backend consumes the same [`ScenarioModel`]; a [`ModelProfile`]
//! selects which modeling features are active and which backend runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! id_newtype {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(
            Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_newtype!(TechId, "Identifier of a generation or storage technology.");
id_newtype!(RegionId, "Identifier of a model region.");
id_newtype!(LineId, "Identifier of a transmission line.");

/// An hourly series covering the scenario horizon.
///
/// Units are MW for demand and dimensionless capacity factors in `[0, 1]`
/// for VRE availability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeSeries(pub Vec<f64>);

impl TimeSeries {
    pub fn constant(value: f64, len: usize) -> Self {
        Self(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Index<usize> for TimeSeries {
    type Output = f64;
    fn index(&self, t: usize) -> &f64 {
        &self.0[t]
    }
}

/// A dispatchable (thermal) generation technology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispatchableTech {
    pub id: TechId,
    /// Overnight investment cost, currency per MW.
    pub invest_cost: f64,
    /// Fixed O&M, currency per MW per year.
    pub fixed_om: f64,
    /// Variable cost (fuel + emissions + other), currency per MWh.
    pub var_cost: f64,
    /// Constant availability derating in `(0, 1]`.
    pub availability: f64,
    /// Economic lifetime in years.
    pub lifetime: f64,
    pub interest_rate: f64,
    /// Cost per MW of hour-to-hour output change; 0 disables ramping cost.
    #[serde(default)]
    pub load_change_cost: f64,
}

/// An electric energy storage technology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StorageTech {
    pub id: TechId,
    /// Currency per MWh of energy capacity.
    pub energy_invest_cost: f64,
    /// Currency per MW of charging capacity.
    pub charge_invest_cost: f64,
    /// Currency per MW of discharging capacity.
    pub discharge_invest_cost: f64,
    /// Fixed O&M, currency per MWh of energy capacity per year.
    #[serde(default)]
    pub fixed_om_energy: f64,
    /// Fixed O&M, currency per MW of charge capacity per year.
    #[serde(default)]
    pub fixed_om_charge: f64,
    /// Fixed O&M, currency per MW of discharge capacity per year.
    #[serde(default)]
    pub fixed_om_discharge: f64,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    pub availability: f64,
    /// Currency per MWh discharged.
    #[serde(default)]
    pub var_cost_discharge: f64,
    pub lifetime: f64,
    pub interest_rate: f64,
}

/// Pre-installed storage capacity in a region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StorageCapacity {
    pub energy_mwh: f64,
    pub charge_mw: f64,
    pub discharge_mw: f64,
}

/// A model region with its demand, exogenous VRE endowment, and
/// pre-installed capacities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    pub demand: TimeSeries,
    /// Exogenous, fixed VRE capacity per VRE technology, MW.
    #[serde(default)]
    pub vre_capacity: BTreeMap<TechId, f64>,
    /// Hourly capacity factors per VRE technology; keys must mirror
    /// `vre_capacity`.
    #[serde(default)]
    pub vre_profile: BTreeMap<TechId, TimeSeries>,
    /// Pre-installed dispatchable capacity, MW.
    #[serde(default)]
    pub preinstalled_gen: BTreeMap<TechId, f64>,
    /// Pre-installed storage capacity.
    #[serde(default)]
    pub preinstalled_storage: BTreeMap<TechId, StorageCapacity>,
}

/// A transmission corridor with one symmetric NTC rating.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmissionLine {
    pub id: LineId,
    pub from_region: RegionId,
    pub to_region: RegionId,
    /// Existing symmetric transfer capacity, MW.
    pub existing_capacity: f64,
    /// Annualized expansion cost, currency per MW per year.
    pub expansion_cost: f64,
    /// Per-unit susceptance; required (and > 0) only under DCLF.
    #[serde(default)]
    pub susceptance: Option<f64>,
    #[serde(default)]
    pub expandable: bool,
}

/// The harmonized scenario all backends consume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioModel {
    pub name: String,
    /// Horizon length T, hours.
    pub horizon: usize,
    /// Value of lost load, currency per MWh unserved.
    pub slack_penalty: f64,
    pub dispatchable: Vec<DispatchableTech>,
    pub storage: Vec<StorageTech>,
    pub regions: Vec<Region>,
    #[serde(default)]
    pub lines: Vec<TransmissionLine>,
}

/// Default value-of-lost-load: large enough to dominate every variable
/// cost, finite to keep the program bounded.
pub const DEFAULT_SLACK_PENALTY: f64 = 10_000.0;

impl ScenarioModel {
    pub fn dispatchable(&self, id: &TechId) -> Option<&DispatchableTech> {
        self.dispatchable.iter().find(|t| &t.id == id)
    }

    pub fn storage_tech(&self, id: &TechId) -> Option<&StorageTech> {
        self.storage.iter().find(|t| &t.id == id)
    }

    pub fn region(&self, id: &RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| &r.id == id)
    }

    pub fn line(&self, id: &LineId) -> Option<&TransmissionLine> {
        self.lines.iter().find(|l| &l.id == id)
    }

    /// Residual load (demand minus total VRE potential) of a region.
    pub fn residual_load(&self, region: &Region) -> Vec<f64> {
        let mut residual = region.demand.0.clone();
        for (tech, cap) in &region.vre_capacity {
            if let Some(profile) = region.vre_profile.get(tech) {
                for (t, r) in residual.iter_mut().enumerate() {
                    *r -= cap * profile[t];
                }
            }
        }
        residual
    }
}

/// How storage boundary levels are pinned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StorageBoundary {
    /// Initial and final level fixed to the given fraction of the
    /// (optimized) energy capacity.
    FixedFraction(f64),
    /// Initial equals final level, both optimized.
    FreeEqual,
    /// Start empty, final level optimized.
    ZeroStartFreeEnd,
}

/// Energy-to-power coupling of storage sizing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum E2pPolicy {
    /// Energy and discharge capacity are independent variables.
    Free,
    /// Energy capacity = hours x discharge capacity, per storage tech.
    Fixed(BTreeMap<TechId, f64>),
}

/// Coupling between charging and discharging capacity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChargeDischargeRatio {
    Free,
    /// Charge capacity = ratio x discharge capacity.
    Fixed(f64),
}

/// Grid representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransmissionModel {
    None,
    Ntc,
    Dclf,
}

/// Temporal foresight of the dispatch decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Foresight {
    FullHorizon,
    Myopic,
}

/// Which solver runs a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Lp,
    Heuristic,
}

/// The toggle set that distinguishes model profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// When off, every availability factor is treated as 1.0.
    pub availability_enabled: bool,
    pub load_change_costs_enabled: bool,
    pub storage_boundary: StorageBoundary,
    pub e2p_policy: E2pPolicy,
    pub charge_discharge_ratio: ChargeDischargeRatio,
    pub transmission_model: TransmissionModel,
    pub transmission_expansion: bool,
    pub foresight: Foresight,
    /// When set, the storage level limit is divided by the discharging
    /// efficiency (level accounted in stored energy form rather than
    /// electrical energy).
    #[serde(default)]
    pub level_cap_includes_discharge_eff: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            availability_enabled: true,
            load_change_costs_enabled: false,
            storage_boundary: StorageBoundary::FreeEqual,
            e2p_policy: E2pPolicy::Free,
            charge_discharge_ratio: ChargeDischargeRatio::Free,
            transmission_model: TransmissionModel::None,
            transmission_expansion: false,
            foresight: Foresight::FullHorizon,
            level_cap_includes_discharge_eff: false,
        }
    }
}

/// The four stylized use cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UseCaseId {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for UseCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UseCaseId::I => "I",
            UseCaseId::II => "II",
            UseCaseId::III => "III",
            UseCaseId::IV => "IV",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for UseCaseId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(UseCaseId::I),
            "II" | "2" => Ok(UseCaseId::II),
            "III" | "3" => Ok(UseCaseId::III),
            "IV" | "4" => Ok(UseCaseId::IV),
            other => Err(ModelError::UnknownUseCase(other.to_owned())),
        }
    }
}

/// Which technologies a use case expands endogenously and which it fixes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UseCase {
    pub id: UseCaseId,
    /// Technologies whose capacity is optimized, in every region.
    pub expandable: BTreeSet<TechId>,
    /// Technologies with exogenously given capacity per region, MW.
    /// These override any pre-installed value for the same technology.
    pub fixed: BTreeMap<TechId, BTreeMap<RegionId, f64>>,
}

/// A named feature configuration bound to a backend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelProfile {
    pub name: String,
    pub feature_config: FeatureConfig,
    pub backend: Backend,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("lifetime must be >= 1 year, got {0}")]
    InvalidLifetime(f64),
    #[error("interest rate must be >= 0, got {0}")]
    InvalidInterestRate(f64),
    #[error("unknown profile preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown use case `{0}` (expected I, II, III or IV)")]
    UnknownUseCase(String),
}

/// One violated invariant found by [`validate_scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// What the rule applies to, e.g. `region north / demand`.
    pub entity: String,
    /// The rule that failed.
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

fn check(violations: &mut Vec<Violation>, ok: bool, entity: &str, rule: &str) {
    if !ok {
        violations.push(Violation {
            entity: entity.to_owned(),
            rule: rule.to_owned(),
        });
    }
}

/// Checks every type invariant of the scenario and returns the full list
/// of violations. An empty list means the scenario is well-formed.
/// Deterministic and side-effect free.
pub fn validate_scenario(scenario: &ScenarioModel) -> Vec<Violation> {
    let mut v = Vec::new();
    let t_len = scenario.horizon;

    check(
        &mut v,
        t_len > 0,
        "scenario",
        "horizon must be at least 1 hour",
    );
    check(
        &mut v,
        scenario.slack_penalty > 0.0,
        "scenario",
        "slack penalty must be positive",
    );

    for tech in &scenario.dispatchable {
        let entity = format!("dispatchable {}", tech.id);
        check(&mut v, tech.invest_cost >= 0.0, &entity, "invest_cost >= 0");
        check(
            &mut v,
            tech.availability > 0.0 && tech.availability <= 1.0,
            &entity,
            "availability in (0, 1]",
        );
        check(&mut v, tech.lifetime >= 1.0, &entity, "lifetime >= 1");
        check(&mut v, tech.interest_rate >= 0.0, &entity, "interest_rate >= 0");
        check(
            &mut v,
            tech.load_change_cost >= 0.0,
            &entity,
            "load_change_cost >= 0",
        );
    }

    for tech in &scenario.storage {
        let entity = format!("storage {}", tech.id);
        for (name, eff) in [("charge_eff", tech.charge_eff), ("discharge_eff", tech.discharge_eff)]
        {
            check(
                &mut v,
                eff > 0.0 && eff <= 1.0,
                &entity,
                &format!("{name} in (0, 1]"),
            );
        }
        check(
            &mut v,
            tech.availability > 0.0 && tech.availability <= 1.0,
            &entity,
            "availability in (0, 1]",
        );
        for (name, cost) in [
            ("energy_invest_cost", tech.energy_invest_cost),
            ("charge_invest_cost", tech.charge_invest_cost),
            ("discharge_invest_cost", tech.discharge_invest_cost),
            ("fixed_om_energy", tech.fixed_om_energy),
            ("fixed_om_charge", tech.fixed_om_charge),
            ("fixed_om_discharge", tech.fixed_om_discharge),
            ("var_cost_discharge", tech.var_cost_discharge),
        ] {
            check(&mut v, cost >= 0.0, &entity, &format!("{name} >= 0"));
        }
        check(&mut v, tech.lifetime >= 1.0, &entity, "lifetime >= 1");
    }

    for region in &scenario.regions {
        let entity = format!("region {} / demand", region.id);
        check(
            &mut v,
            region.demand.len() == t_len,
            &entity,
            &format!("length {} != horizon {}", region.demand.len(), t_len),
        );
        check(
            &mut v,
            region.demand.values().iter().all(|&d| d >= 0.0),
            &entity,
            "demand values >= 0",
        );
        for (tech, profile) in &region.vre_profile {
            let entity = format!("region {} / vre profile {}", region.id, tech);
            check(
                &mut v,
                profile.len() == t_len,
                &entity,
                &format!("length {} != horizon {}", profile.len(), t_len),
            );
            check(
                &mut v,
                profile.values().iter().all(|&c| (0.0..=1.0).contains(&c)),
                &entity,
                "capacity factors in [0, 1]",
            );
        }
        for (tech, cap) in &region.vre_capacity {
            let entity = format!("region {} / vre capacity {}", region.id, tech);
            check(&mut v, *cap >= 0.0, &entity, "capacity >= 0");
            check(
                &mut v,
                region.vre_profile.contains_key(tech),
                &entity,
                "no matching vre profile",
            );
        }
    }

    let region_ids: BTreeSet<&RegionId> = scenario.regions.iter().map(|r| &r.id).collect();
    for line in &scenario.lines {
        let entity = format!("line {}", line.id);
        check(
            &mut v,
            line.from_region != line.to_region,
            &entity,
            "from_region must differ from to_region",
        );
        check(
            &mut v,
            line.existing_capacity >= 0.0,
            &entity,
            "existing_capacity >= 0",
        );
        check(
            &mut v,
            line.expansion_cost >= 0.0,
            &entity,
            "expansion_cost >= 0",
        );
        if let Some(b) = line.susceptance {
            check(&mut v, b > 0.0, &entity, "susceptance must be > 0");
        }
        for end in [&line.from_region, &line.to_region] {
            check(
                &mut v,
                region_ids.contains(end),
                &entity,
                &format!("unknown region {end}"),
            );
        }
    }

    v
}

/// Annuity factor converting an overnight investment into an equivalent
/// annual payment: `i(1+i)^L / ((1+i)^L - 1)`, or `1/L` at zero interest.
pub fn annuity_factor(interest_rate: f64, lifetime: f64) -> Result<f64, ModelError> {
    if !(lifetime >= 1.0) {
        return Err(ModelError::InvalidLifetime(lifetime));
    }
    if !(interest_rate >= 0.0) {
        return Err(ModelError::InvalidInterestRate(interest_rate));
    }
    if interest_rate == 0.0 {
        return Ok(1.0 / lifetime);
    }
    // expm1/ln_1p keep the denominator accurate for tiny interest rates,
    // where (1+i)^L - 1 would cancel catastrophically.
    let growth_m1 = (lifetime * interest_rate.ln_1p()).exp_m1();
    Ok(interest_rate * (growth_m1 + 1.0) / growth_m1)
}

/// Names of the six bundled profile presets.
pub const PRESET_NAMES: [&str; 6] = [
    "dieter-like",
    "e2m2-like",
    "genesys2-like",
    "isaar-like",
    "oemof-like",
    "remix-like",
];

/// Returns the bundled profile preset with the given name.
///
/// Each preset enables exactly the feature set of one of the six
/// model variants the comparison covers. The fixed E2P hours of the
/// `e2m2-like` preset default to 4 h for `battery` and 400 h for
/// `cavern`; the fixed charge-to-discharge ratio defaults to 1.
pub fn profile_preset(name: &str) -> Result<ModelProfile, ModelError> {
    let base = FeatureConfig {
        availability_enabled: true,
        load_change_costs_enabled: false,
        storage_boundary: StorageBoundary::FreeEqual,
        e2p_policy: E2pPolicy::Free,
        charge_discharge_ratio: ChargeDischargeRatio::Free,
        transmission_model: TransmissionModel::None,
        transmission_expansion: false,
        foresight: Foresight::FullHorizon,
        level_cap_includes_discharge_eff: false,
    };
    let profile = match name {
        "dieter-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: true,
                load_change_costs_enabled: true,
                storage_boundary: StorageBoundary::FixedFraction(0.5),
                transmission_model: TransmissionModel::Ntc,
                transmission_expansion: true,
                ..base
            },
            backend: Backend::Lp,
        },
        "e2m2-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: true,
                storage_boundary: StorageBoundary::FreeEqual,
                e2p_policy: E2pPolicy::Fixed(
                    [(TechId::from("battery"), 4.0), (TechId::from("cavern"), 400.0)]
                        .into_iter()
                        .collect(),
                ),
                charge_discharge_ratio: ChargeDischargeRatio::Fixed(1.0),
                ..base
            },
            backend: Backend::Lp,
        },
        "genesys2-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: false,
                storage_boundary: StorageBoundary::ZeroStartFreeEnd,
                transmission_model: TransmissionModel::Ntc,
                transmission_expansion: true,
                foresight: Foresight::Myopic,
                ..base
            },
            backend: Backend::Heuristic,
        },
        "isaar-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: false,
                storage_boundary: StorageBoundary::ZeroStartFreeEnd,
                ..base
            },
            backend: Backend::Lp,
        },
        "oemof-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: false,
                storage_boundary: StorageBoundary::FreeEqual,
                transmission_model: TransmissionModel::Ntc,
                transmission_expansion: false,
                ..base
            },
            backend: Backend::Lp,
        },
        "remix-like" => ModelProfile {
            name: name.to_owned(),
            feature_config: FeatureConfig {
                availability_enabled: true,
                load_change_costs_enabled: true,
                storage_boundary: StorageBoundary::FreeEqual,
                transmission_model: TransmissionModel::Dclf,
                transmission_expansion: true,
                level_cap_includes_discharge_eff: true,
                ..base
            },
            backend: Backend::Lp,
        },
        other => return Err(ModelError::UnknownPreset(other.to_owned())),
    };
    Ok(profile)
}

/// All six bundled presets, in `PRESET_NAMES` order.
pub fn all_presets() -> Vec<ModelProfile> {
    PRESET_NAMES
        .iter()
        .map(|n| profile_preset(n).expect("bundled preset"))
        .collect()
}

/// Restricts a feature configuration to what a use case permits:
/// power exchange exists only in use case IV.
pub fn effective_features(features: &FeatureConfig, use_case: UseCaseId) -> FeatureConfig {
    let mut f = features.clone();
    if use_case != UseCaseId::IV {
        f.transmission_model = TransmissionModel::None;
        f.transmission_expansion = false;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_region_scenario() -> ScenarioModel {
        let t = 4;
        let mk_region = |name: &str| Region {
            id: RegionId::from(name),
            demand: TimeSeries::constant(10.0, t),
            vre_capacity: [(TechId::from("pv"), 5.0)].into_iter().collect(),
            vre_profile: [(TechId::from("pv"), TimeSeries::constant(0.5, t))]
                .into_iter()
                .collect(),
            preinstalled_gen: BTreeMap::new(),
            preinstalled_storage: BTreeMap::new(),
        };
        ScenarioModel {
            name: "test".into(),
            horizon: t,
            slack_penalty: DEFAULT_SLACK_PENALTY,
            dispatchable: vec![DispatchableTech {
                id: TechId::from("peak"),
                invest_cost: 400.0,
                fixed_om: 10.0,
                var_cost: 60.0,
                availability: 0.948,
                lifetime: 25.0,
                interest_rate: 0.07,
                load_change_cost: 0.0,
            }],
            storage: vec![],
            regions: vec![mk_region("north"), mk_region("south")],
            lines: vec![TransmissionLine {
                id: LineId::from("north-south"),
                from_region: RegionId::from("north"),
                to_region: RegionId::from("south"),
                existing_capacity: 3.0,
                expansion_cost: 50.0,
                susceptance: Some(1.0),
                expandable: true,
            }],
        }
    }

    #[test]
    fn well_formed_scenario_has_no_violations() {
        assert_eq!(validate_scenario(&two_region_scenario()), vec![]);
    }

    #[test]
    fn capacity_factor_out_of_bounds_is_reported() {
        let mut s = two_region_scenario();
        s.regions[0]
            .vre_profile
            .insert(TechId::from("pv"), TimeSeries(vec![0.2, 1.2, 0.3, 0.4]));
        let violations = validate_scenario(&s);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].entity.contains("region north"));
        assert!(violations[0].entity.contains("pv"));
        assert!(violations[0].rule.contains("[0, 1]"));
    }

    #[test]
    fn self_loop_line_is_reported() {
        let mut s = two_region_scenario();
        s.lines[0].to_region = RegionId::from("north");
        let violations = validate_scenario(&s);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].entity.contains("line north-south"));
    }

    #[test]
    fn validation_is_deterministic() {
        let mut s = two_region_scenario();
        s.regions[1].demand = TimeSeries(vec![-1.0, 2.0, 3.0, 4.0]);
        assert_eq!(validate_scenario(&s), validate_scenario(&s));
    }

    #[test]
    fn annuity_zero_interest_is_straight_line() {
        assert_eq!(annuity_factor(0.0, 20.0).unwrap(), 0.05);
    }

    #[test]
    fn annuity_closed_form_cases() {
        // Independent evaluation of i(1+i)^L/((1+i)^L - 1).
        let a = annuity_factor(0.07, 20.0).unwrap();
        assert!((a - 0.0943929257432557).abs() < 1e-12, "got {a}");
        let single_year = annuity_factor(0.05, 1.0).unwrap();
        assert!((single_year - 1.05).abs() < 1e-12);
    }

    #[test]
    fn annuity_rejects_short_lifetime() {
        assert!(annuity_factor(0.05, 0.5).is_err());
    }

    #[test]
    fn annuity_continuous_at_zero_interest() {
        let limit = annuity_factor(0.0, 20.0).unwrap();
        let near = annuity_factor(1e-12, 20.0).unwrap();
        assert!((limit - near).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn annuity_increases_with_interest(
            lifetime in 1.0f64..60.0,
            i0 in 0.0f64..0.2,
            step in 1e-4f64..0.1,
        ) {
            let lo = annuity_factor(i0, lifetime).unwrap();
            let hi = annuity_factor(i0 + step, lifetime).unwrap();
            prop_assert!(hi > lo);
        }
    }

    #[test]
    fn presets_match_feature_matrix() {
        let e2m2 = profile_preset("e2m2-like").unwrap();
        assert!(matches!(e2m2.feature_config.e2p_policy, E2pPolicy::Fixed(_)));
        assert!(matches!(
            e2m2.feature_config.charge_discharge_ratio,
            ChargeDischargeRatio::Fixed(_)
        ));
        assert_eq!(e2m2.feature_config.storage_boundary, StorageBoundary::FreeEqual);
        assert_eq!(e2m2.feature_config.transmission_model, TransmissionModel::None);

        let genesys = profile_preset("genesys2-like").unwrap();
        assert_eq!(genesys.feature_config.foresight, Foresight::Myopic);
        assert_eq!(
            genesys.feature_config.storage_boundary,
            StorageBoundary::ZeroStartFreeEnd
        );
        assert!(!genesys.feature_config.availability_enabled);
        assert_eq!(genesys.backend, Backend::Heuristic);

        let dieter = profile_preset("dieter-like").unwrap();
        assert_eq!(
            dieter.feature_config.storage_boundary,
            StorageBoundary::FixedFraction(0.5)
        );
        assert!(dieter.feature_config.availability_enabled);
        assert_eq!(dieter.feature_config.transmission_model, TransmissionModel::Ntc);

        let remix = profile_preset("remix-like").unwrap();
        assert_eq!(remix.feature_config.transmission_model, TransmissionModel::Dclf);
        assert!(remix.feature_config.level_cap_includes_discharge_eff);

        assert!(profile_preset("plexos-like").is_err());
    }

    #[test]
    fn presets_round_trip_through_serialization() {
        for preset in all_presets() {
            let text = toml::to_string(&preset).unwrap();
            let back: ModelProfile = toml::from_str(&text).unwrap();
            assert_eq!(back, preset);
        }
    }

    #[test]
    fn effective_features_disable_grid_outside_use_case_iv() {
        let dieter = profile_preset("dieter-like").unwrap();
        let f = effective_features(&dieter.feature_config, UseCaseId::I);
        assert_eq!(f.transmission_model, TransmissionModel::None);
        let f4 = effective_features(&dieter.feature_config, UseCaseId::IV);
        assert_eq!(f4.transmission_model, TransmissionModel::Ntc);
    }
}
