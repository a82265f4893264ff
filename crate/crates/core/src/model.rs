//! The two-player steganography game.
//!
//! A defender chooses whether to hide its communications (`Hide`) or not
//! (`NotHide`); an adversary chooses whether to surveil them (`Look`) or not
//! (`NotLook`). Payoffs are linear in six monetary parameters, and the
//! steganography effectiveness `beta` is carried alongside them for the
//! downstream success-rate and risk analysis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Defender strategies (rows of the payoff matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefenderMove {
    Hide,
    NotHide,
}

/// Adversary strategies (columns of the payoff matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdversaryMove {
    Look,
    NotLook,
}

impl DefenderMove {
    pub const ALL: [DefenderMove; 2] = [DefenderMove::Hide, DefenderMove::NotHide];

    pub fn other(self) -> Self {
        match self {
            DefenderMove::Hide => DefenderMove::NotHide,
            DefenderMove::NotHide => DefenderMove::Hide,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl AdversaryMove {
    pub const ALL: [AdversaryMove; 2] = [AdversaryMove::Look, AdversaryMove::NotLook];

    pub fn other(self) -> Self {
        match self {
            AdversaryMove::Look => AdversaryMove::NotLook,
            AdversaryMove::NotLook => AdversaryMove::Look,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DefenderMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefenderMove::Hide => "Hide",
            DefenderMove::NotHide => "NotHide",
        })
    }
}

impl fmt::Display for AdversaryMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryMove::Look => "Look",
            AdversaryMove::NotLook => "NotLook",
        })
    }
}

/// Monetary payoff parameters of the game plus steganography effectiveness.
///
/// Money is in abstract currency units. `beta` is the probability that hidden
/// content evades detection (1 = never detected, 0 = always detected).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParams {
    /// Defender's benefit from successful hiding.
    pub b_hide: f64,
    /// Defender's cost of running steganography.
    pub c_hide: f64,
    /// Defender's benefit of an unattacked environment.
    pub b_harmony: f64,
    /// Defender's loss when a leak occurs.
    pub c_leak: f64,
    /// Adversary's benefit from a successful leak.
    pub b_leak: f64,
    /// Adversary's cost of surveillance.
    pub c_look: f64,
    /// Steganography effectiveness in `[0, 1]`.
    #[serde(default)]
    pub beta: f64,
}

impl GameParams {
    /// The worked case-study values: steganography costs 50k a year, avoided
    /// breaches are worth 150k, harmony 200k, a leak costs the defender 300k
    /// and earns the adversary 250k, surveillance costs 30k.
    pub const CASE_STUDY: GameParams = GameParams {
        b_hide: 150_000.0,
        c_hide: 50_000.0,
        b_harmony: 200_000.0,
        c_leak: 300_000.0,
        b_leak: 250_000.0,
        c_look: 30_000.0,
        beta: 0.5,
    };

    pub const ZERO: GameParams = GameParams {
        b_hide: 0.0,
        c_hide: 0.0,
        b_harmony: 0.0,
        c_leak: 0.0,
        b_leak: 0.0,
        c_look: 0.0,
        beta: 0.0,
    };

    /// Named monetary fields in a fixed order.
    pub fn money_fields(&self) -> [(&'static str, f64); 6] {
        [
            ("b_hide", self.b_hide),
            ("c_hide", self.c_hide),
            ("b_harmony", self.b_harmony),
            ("c_leak", self.c_leak),
            ("b_leak", self.b_leak),
            ("c_look", self.c_look),
        ]
    }

    /// Rejects NaN or infinite fields, naming the first offender.
    pub fn ensure_finite(&self) -> Result<(), ModelError> {
        let beta = [("beta", self.beta)];
        match self
            .money_fields()
            .iter()
            .chain(beta.iter())
            .find(|(_, v)| !v.is_finite())
        {
            Some(&(field, value)) => Err(ModelError::NonFinite { field, value }),
            None => Ok(()),
        }
    }

    /// Range checks on top of finiteness: money non-negative, `beta` in `[0, 1]`.
    pub fn ensure_in_domain(&self) -> Result<(), ModelError> {
        self.ensure_finite()?;
        if let Some(&(field, value)) = self.money_fields().iter().find(|(_, v)| *v < 0.0) {
            return Err(ModelError::Negative { field, value });
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(ModelError::BetaOutOfRange(self.beta));
        }
        Ok(())
    }

    /// Multiplies every monetary field by `k`, leaving `beta` untouched.
    pub fn scaled(&self, k: f64) -> GameParams {
        GameParams {
            b_hide: self.b_hide * k,
            c_hide: self.c_hide * k,
            b_harmony: self.b_harmony * k,
            c_leak: self.c_leak * k,
            b_leak: self.b_leak * k,
            c_look: self.c_look * k,
            beta: self.beta,
        }
    }

    /// Net gain of hiding, independent of what the adversary does.
    pub fn hiding_net_gain(&self) -> f64 {
        self.b_hide - self.c_hide
    }
}

/// The nine modelling assumptions a parameter set must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// Hiding costs less than a leak.
    AdequateProtection,
    /// Surveillance costs less than what a leak earns.
    EasiestAttack,
    /// A successful attack has positive net value.
    PositiveAttackGain,
    /// Harmony is worth more than the generic hiding net gain.
    InherentHarmonyBenefit,
    /// Harmony has positive value.
    PositiveHarmony,
    /// Hiding beats suffering a leak.
    HidingBeatsLeak,
    /// Looking always costs something.
    CostlyLook,
    /// Harmony outweighs the net gain of the security measure.
    PositiveSecurityIncentive,
    /// Leaks are worth something to the adversary.
    RationalAttackMotivation,
}

impl Assumption {
    pub const ALL: [Assumption; 9] = [
        Assumption::AdequateProtection,
        Assumption::EasiestAttack,
        Assumption::PositiveAttackGain,
        Assumption::InherentHarmonyBenefit,
        Assumption::PositiveHarmony,
        Assumption::HidingBeatsLeak,
        Assumption::CostlyLook,
        Assumption::PositiveSecurityIncentive,
        Assumption::RationalAttackMotivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Assumption::AdequateProtection => "adequate protection",
            Assumption::EasiestAttack => "easiest attack",
            Assumption::PositiveAttackGain => "positive attack gain",
            Assumption::InherentHarmonyBenefit => "inherent harmony benefit",
            Assumption::PositiveHarmony => "positive harmony",
            Assumption::HidingBeatsLeak => "hiding beats leak",
            Assumption::CostlyLook => "costly look",
            Assumption::PositiveSecurityIncentive => "positive security incentive",
            Assumption::RationalAttackMotivation => "rational attack motivation",
        }
    }

    /// The inequality in terms of parameter names.
    pub fn formula(self) -> &'static str {
        match self {
            Assumption::AdequateProtection => "c_hide < c_leak",
            Assumption::EasiestAttack => "c_look < b_leak",
            Assumption::PositiveAttackGain => "b_leak - c_look > 0",
            Assumption::InherentHarmonyBenefit => "b_harmony > b_hide - c_hide",
            Assumption::PositiveHarmony => "0 < b_harmony",
            Assumption::HidingBeatsLeak => "-c_leak < b_hide - c_hide",
            Assumption::CostlyLook => "-c_look < 0",
            Assumption::PositiveSecurityIncentive => "b_harmony > b_hide - c_hide",
            Assumption::RationalAttackMotivation => "b_leak > 0",
        }
    }

    fn evaluate(self, p: &GameParams) -> AssumptionCheck {
        use Relation::{Greater, Less};
        let (lhs, relation, rhs) = match self {
            Assumption::AdequateProtection => (p.c_hide, Less, p.c_leak),
            Assumption::EasiestAttack => (p.c_look, Less, p.b_leak),
            Assumption::PositiveAttackGain => (p.b_leak - p.c_look, Greater, 0.0),
            Assumption::InherentHarmonyBenefit => (p.b_harmony, Greater, p.hiding_net_gain()),
            Assumption::PositiveHarmony => (0.0, Less, p.b_harmony),
            Assumption::HidingBeatsLeak => (-p.c_leak, Less, p.hiding_net_gain()),
            Assumption::CostlyLook => (-p.c_look, Less, 0.0),
            Assumption::PositiveSecurityIncentive => (p.b_harmony, Greater, p.hiding_net_gain()),
            Assumption::RationalAttackMotivation => (p.b_leak, Greater, 0.0),
        };
        let holds = match relation {
            Less => lhs < rhs,
            Greater => lhs > rhs,
        };
        AssumptionCheck {
            id: self,
            holds,
            lhs,
            relation,
            rhs,
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Strict comparison used by an assumption; equality never holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    Greater,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Greater => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub id: Assumption,
    pub holds: bool,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
}

/// Outcome of checking all nine assumptions, in their canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub checks: [AssumptionCheck; 9],
}

impl AssumptionReport {
    pub fn valid(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn check(&self, id: Assumption) -> &AssumptionCheck {
        self.checks
            .iter()
            .find(|c| c.id == id)
            .expect("report holds every assumption")
    }
}

/// Evaluates the nine assumptions. All inequalities are strict.
pub fn validate_assumptions(params: &GameParams) -> Result<AssumptionReport, ModelError> {
    params.ensure_finite()?;
    Ok(AssumptionReport {
        checks: Assumption::ALL.map(|a| a.evaluate(params)),
    })
}

/// One cell of the bimatrix: (defender payoff, adversary payoff).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCell {
    pub defender: f64,
    pub adversary: f64,
}

impl PayoffCell {
    pub const fn new(defender: f64, adversary: f64) -> Self {
        PayoffCell {
            defender,
            adversary,
        }
    }
}

/// 2x2 bimatrix indexed by `(DefenderMove, AdversaryMove)`.
///
/// Rows are `[Hide, NotHide]`, columns `[Look, NotLook]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    cells: [[PayoffCell; 2]; 2],
}

impl PayoffMatrix {
    /// Builds an arbitrary 2x2 game; `cells[row][col]`.
    pub fn from_cells(cells: [[PayoffCell; 2]; 2]) -> Self {
        PayoffMatrix { cells }
    }

    pub fn cell(&self, d: DefenderMove, a: AdversaryMove) -> PayoffCell {
        self.cells[d.index()][a.index()]
    }

    pub fn cells(&self) -> &[[PayoffCell; 2]; 2] {
        &self.cells
    }

    pub fn is_finite(&self) -> bool {
        self.cells
            .iter()
            .flatten()
            .all(|c| c.defender.is_finite() && c.adversary.is_finite())
    }
}

/// Payoff table of the steganography game.
pub fn build_payoff_matrix(params: &GameParams) -> PayoffMatrix {
    let hide = params.hiding_net_gain();
    PayoffMatrix::from_cells([
        [
            PayoffCell::new(hide, -params.c_look),
            PayoffCell::new(hide, 0.0),
        ],
        [
            PayoffCell::new(-params.c_leak, params.b_leak - params.c_look),
            PayoffCell::new(params.b_harmony, 0.0),
        ],
    ])
}

/// Monetary scale of a successful attack on the defender: `c_leak + b_harmony`.
pub fn impact_factor(params: &GameParams) -> f64 {
    params.c_leak + params.b_harmony
}
