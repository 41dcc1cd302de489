use serde::{Deserialize, Serialize};
use strata_core::RngHandle;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    #[default]
    Cooperative,
    Directive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regulation {
    #[default]
    Lenient,
    Strict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BargainRule {
    #[default]
    EqualSplit,
    Proportional,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    #[default]
    Energy,
    Tech,
}

/// Price scale and cost constants of a sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorConstants {
    pub scale: f64,
    pub cost_base: f64,
    pub fine_base: f64,
    pub atr_base: f64,
}

impl Sector {
    pub fn constants(self) -> SectorConstants {
        match self {
            Sector::Energy => SectorConstants {
                scale: 1.0,
                cost_base: 40.0,
                fine_base: 30.0,
                atr_base: 25.0,
            },
            Sector::Tech => SectorConstants {
                scale: 1.6,
                cost_base: 30.0,
                fine_base: 30.0,
                atr_base: 25.0,
            },
        }
    }
}

/// `(subsidy_t, penalty_rate_t)`: the directive regime halves subsidies and
/// doubles the audit-driven penalty rate.
pub fn government_step(regime: Regime, subsidy: f64, audit_intensity: f64) -> (f64, f64) {
    match regime {
        Regime::Cooperative => (subsidy, 0.5 * audit_intensity),
        Regime::Directive => (0.5 * subsidy, audit_intensity),
    }
}

/// `(compliance_thr, audit_prob)`.
pub fn industry_step(regulation: Regulation) -> (f64, f64) {
    match regulation {
        Regulation::Lenient => (0.3, 0.1),
        Regulation::Strict => (0.7, 0.4),
    }
}

pub const DEMAND_PERSISTENCE: f64 = 0.8;

/// AR(1) demand around `base` with uniform shocks, floored at zero.
/// Returns `(demand_t, price_signal)`.
pub fn market_step(base: f64, shock_amp: f64, prev: f64, rng: &mut RngHandle) -> (f64, f64) {
    let eps = rng.uniform_range(-1.0, 1.0);
    let demand = (base + DEMAND_PERSISTENCE * (prev - base) + shock_amp * eps).max(0.0);
    (demand, demand / base)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AllianceState {
    pub allied: bool,
    /// Signed, positive from A to B.
    pub transfers: f64,
    pub stability_counter: u64,
}

pub const ALLIANCE_THRESHOLD: f64 = 0.25;

pub fn alliance_step(coop_a: f64, coop_b: f64, rule: BargainRule, side_payment: f64, prev: AllianceState) -> AllianceState {
    let allied = coop_a * coop_b >= ALLIANCE_THRESHOLD;
    if !allied {
        return AllianceState::default();
    }
    let gap = coop_a - coop_b;
    let transfers = match rule {
        BargainRule::EqualSplit => side_payment * gap / 2.0,
        BargainRule::Proportional => side_payment * gap,
    };
    AllianceState {
        allied,
        transfers,
        stability_counter: prev.stability_counter + 1,
    }
}

/// Everything the payoff of one firm depends on besides its own and its
/// rival's investment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffEnv {
    pub price_signal: f64,
    pub demand: f64,
    pub tax: f64,
    pub subsidy: f64,
    pub penalty_rate: f64,
    pub compliance_thr: f64,
    pub audit_prob: f64,
    pub std_compat: f64,
    pub atr: f64,
    pub allied: bool,
    pub sector: SectorConstants,
}

/// Profit of a firm before transfers, and whether it complied.
pub fn firm_profit(invest: f64, rival_invest: f64, env: &PayoffEnv) -> (f64, bool) {
    let s = env.sector;
    let revenue = env.price_signal * env.demand * s.scale * (0.5 + invest);
    let cost = s.cost_base * invest * invest;
    let spillover = if env.allied { env.std_compat * 0.2 * rival_invest } else { 0.0 };
    let compliant = invest >= env.compliance_thr;
    let fine = if compliant { 0.0 } else { env.penalty_rate * env.audit_prob * s.fine_base };
    let antitrust = if env.allied { env.atr * s.atr_base } else { 0.0 };
    (revenue - cost - env.tax * revenue + env.subsidy + spillover - fine - antitrust, compliant)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payoffs {
    pub profit_a: f64,
    pub profit_b: f64,
    pub compliant_a: bool,
    pub compliant_b: bool,
    pub welfare: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareWeights {
    pub w_profit: f64,
    pub w_consumer: f64,
}

pub fn payoff_step(
    invest_a: f64,
    invest_b: f64,
    transfers: f64,
    env: &PayoffEnv,
    weights: WelfareWeights,
    risk_penalty: f64,
) -> Payoffs {
    let (base_a, compliant_a) = firm_profit(invest_a, invest_b, env);
    let (base_b, compliant_b) = firm_profit(invest_b, invest_a, env);
    let profit_a = base_a - transfers;
    let profit_b = base_b + transfers;
    let welfare =
        weights.w_profit * (profit_a + profit_b) + weights.w_consumer * env.demand - risk_penalty * (profit_a - profit_b).abs();
    Payoffs {
        profit_a,
        profit_b,
        compliant_a,
        compliant_b,
        welfare,
    }
}
