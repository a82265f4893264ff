//! Success rates, adversary advantage, risk and equilibrium sensitivities.
//!
//! Throughout, `p_star` is read as the adversary's attack probability and
//! `q_star` as the defender's hide probability.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{equilibrium_p, equilibrium_q};
use crate::error::{check_probability, GameError};
use crate::model::GameParams;

/// Default central-difference step, in currency units.
pub const DEFAULT_DELTA: f64 = 1000.0;

/// `p_star * (1 - beta)`.
pub fn adversary_success_rate(p_star: f64, beta: f64) -> Result<f64, GameError> {
    check_probability("p_star", p_star)?;
    check_probability("beta", beta)?;
    Ok(p_star * (1.0 - beta))
}

/// `q_star * (1 - p_star) + (1 - q_star) * beta`.
pub fn defender_success_rate(p_star: f64, q_star: f64, beta: f64) -> Result<f64, GameError> {
    check_probability("p_star", p_star)?;
    check_probability("q_star", q_star)?;
    check_probability("beta", beta)?;
    Ok(q_star * (1.0 - p_star) + (1.0 - q_star) * beta)
}

/// Success rates with the range each player can reach by varying only its
/// own mixing probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessRates {
    pub adversary: f64,
    pub defender: f64,
    pub adversary_max: f64,
    pub adversary_min: f64,
    pub defender_max: f64,
    pub defender_min: f64,
}

pub fn success_rates(p_star: f64, q_star: f64, beta: f64) -> Result<SuccessRates, GameError> {
    let adversary = adversary_success_rate(p_star, beta)?;
    let defender = defender_success_rate(p_star, q_star, beta)?;
    // the adversary's rate is increasing in p, the defender's is affine in q
    let always_look = adversary_success_rate(1.0, beta)?;
    let never_look = adversary_success_rate(0.0, beta)?;
    let always_hide = defender_success_rate(p_star, 1.0, beta)?;
    let never_hide = defender_success_rate(p_star, 0.0, beta)?;
    Ok(SuccessRates {
        adversary,
        defender,
        adversary_max: always_look,
        adversary_min: never_look,
        defender_max: always_hide.max(never_hide),
        defender_min: always_hide.min(never_hide),
    })
}

/// Adversary success probabilities conditioned on the defender's choice:
/// `(p(1 - beta), p[1 - (1 - q) beta])`.
pub fn conditional_success_probabilities(
    p_star: f64,
    q_star: f64,
    beta: f64,
) -> Result<(f64, f64), GameError> {
    check_probability("p_star", p_star)?;
    check_probability("q_star", q_star)?;
    check_probability("beta", beta)?;
    Ok(conditional_unchecked(p_star, q_star, beta))
}

#[inline]
pub(crate) fn conditional_unchecked(p_star: f64, q_star: f64, beta: f64) -> (f64, f64) {
    let given_hide = p_star * (1.0 - beta);
    let given_not_hide = p_star * (1.0 - (1.0 - q_star) * beta);
    (given_hide, given_not_hide)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageResult {
    pub p_succ_hide: f64,
    pub p_succ_not_hide: f64,
    /// `p_succ_hide - p_succ_not_hide`; algebraically `-p* q* beta`, never positive.
    pub signed: f64,
    pub absolute: f64,
}

pub fn adversary_advantage(
    p_star: f64,
    q_star: f64,
    beta: f64,
) -> Result<AdvantageResult, GameError> {
    let (p_succ_hide, p_succ_not_hide) = conditional_success_probabilities(p_star, q_star, beta)?;
    let signed = p_succ_hide - p_succ_not_hide;
    Ok(AdvantageResult {
        p_succ_hide,
        p_succ_not_hide,
        signed,
        absolute: signed.abs(),
    })
}

/// Risk as advantage times impact. The sign follows the advantage.
pub fn risk_from_advantage(advantage: f64, impact: f64) -> f64 {
    advantage * impact
}

/// Partial derivatives of the equilibrium probabilities, per currency unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SensitivityVector {
    pub dp_dBleak: f64,
    pub dp_dClook: f64,
    pub dq_dBharmony: f64,
    pub dq_dBhide: f64,
    pub dq_dChide: f64,
    pub dq_dCleak: f64,
}

/// The six (probability, parameter) pairs reported by sensitivity analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Partial {
    PBLeak,
    PCLook,
    QBHarmony,
    QBHide,
    QCHide,
    QCLeak,
}

impl Partial {
    pub const ALL: [Partial; 6] = [
        Partial::PBLeak,
        Partial::PCLook,
        Partial::QBHarmony,
        Partial::QBHide,
        Partial::QCHide,
        Partial::QCLeak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Partial::PBLeak => "dp_dBleak",
            Partial::PCLook => "dp_dClook",
            Partial::QBHarmony => "dq_dBharmony",
            Partial::QBHide => "dq_dBhide",
            Partial::QCHide => "dq_dChide",
            Partial::QCLeak => "dq_dCleak",
        }
    }

    /// Whether the equilibrium probability is affine in the parameter, in
    /// which case central differences are exact up to rounding.
    pub fn is_affine(self) -> bool {
        matches!(self, Partial::PCLook | Partial::QBHide | Partial::QCHide)
    }

    fn parameter(self, params: &mut GameParams) -> &mut f64 {
        match self {
            Partial::PBLeak => &mut params.b_leak,
            Partial::PCLook => &mut params.c_look,
            Partial::QBHarmony => &mut params.b_harmony,
            Partial::QBHide => &mut params.b_hide,
            Partial::QCHide => &mut params.c_hide,
            Partial::QCLeak => &mut params.c_leak,
        }
    }

    fn probability(self, params: &GameParams) -> Result<f64, GameError> {
        match self {
            Partial::PBLeak | Partial::PCLook => equilibrium_p(params),
            _ => equilibrium_q(params),
        }
    }
}

impl SensitivityVector {
    pub fn get(&self, partial: Partial) -> f64 {
        match partial {
            Partial::PBLeak => self.dp_dBleak,
            Partial::PCLook => self.dp_dClook,
            Partial::QBHarmony => self.dq_dBharmony,
            Partial::QBHide => self.dq_dBhide,
            Partial::QCHide => self.dq_dChide,
            Partial::QCLeak => self.dq_dCleak,
        }
    }

    fn from_fn(mut f: impl FnMut(Partial) -> Result<f64, GameError>) -> Result<Self, GameError> {
        Ok(SensitivityVector {
            dp_dBleak: f(Partial::PBLeak)?,
            dp_dClook: f(Partial::PCLook)?,
            dq_dBharmony: f(Partial::QBHarmony)?,
            dq_dBhide: f(Partial::QBHide)?,
            dq_dChide: f(Partial::QCHide)?,
            dq_dCleak: f(Partial::QCLeak)?,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (Partial, f64)> + '_ {
        Partial::ALL.into_iter().map(move |k| (k, self.get(k)))
    }
}

/// Closed-form derivatives of `p*` and `q*`.
pub fn analytic_sensitivities(params: &GameParams) -> Result<SensitivityVector, GameError> {
    params.ensure_finite()?;
    let b_leak = params.b_leak;
    if b_leak == 0.0 {
        return Err(GameError::DegenerateGame("b_leak"));
    }
    let denom = params.c_leak + params.b_harmony;
    if denom == 0.0 {
        return Err(GameError::DegenerateGame("c_leak + b_harmony"));
    }
    let denom_sq = denom * denom;
    Ok(SensitivityVector {
        dp_dBleak: params.c_look / (b_leak * b_leak),
        dp_dClook: -1.0 / b_leak,
        dq_dBharmony: (params.c_leak + params.b_hide - params.c_hide) / denom_sq,
        dq_dBhide: -1.0 / denom,
        dq_dChide: 1.0 / denom,
        dq_dCleak: -(params.b_harmony - params.b_hide + params.c_hide) / denom_sq,
    })
}

/// Central-difference estimate of a single partial with step `delta`.
pub fn central_difference(
    params: &GameParams,
    partial: Partial,
    delta: f64,
) -> Result<f64, GameError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(GameError::InvalidStep(delta));
    }
    let mut plus = *params;
    *partial.parameter(&mut plus) += delta;
    let mut minus = *params;
    *partial.parameter(&mut minus) -= delta;
    let hi = partial.probability(&plus)?;
    let lo = partial.probability(&minus)?;
    Ok((hi - lo) / (2.0 * delta))
}

/// Central-difference sensitivities: each parameter is moved by `±delta` and
/// the equilibrium recomputed.
pub fn numeric_sensitivities(
    params: &GameParams,
    delta: f64,
) -> Result<SensitivityVector, GameError> {
    params.ensure_finite()?;
    SensitivityVector::from_fn(|k| central_difference(params, k, delta))
}
