//! Pure and mixed Nash equilibria of the steganography game.
//!
//! Label convention: `p_star = (b_leak - c_look) / b_leak` comes from the
//! adversary's indifference condition, so mathematically it is the weight the
//! *defender's* mix puts on `Hide` that leaves the adversary indifferent.
//! Likewise `q_star` is the `Look` weight that leaves the defender indifferent.
//! Downstream (success rates, advantage, the Monte Carlo engine) `p_star` is
//! read as the attack probability and `q_star` as the hide probability. This
//! module keeps the formulas and checks them through indifference residuals,
//! which do not depend on how the two numbers are labelled.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, GameError};
use crate::model::{build_payoff_matrix, AdversaryMove, DefenderMove, GameParams, PayoffMatrix};

/// Absolute tolerance for probabilities when comparing equilibria.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance, in currency units, for indifference residuals.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Defender,
    Adversary,
}

pub type Profile = (DefenderMove, AdversaryMove);

/// A strictly profitable unilateral deviation away from `profile`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub profile: Profile,
    pub player: Player,
    pub to: Profile,
    pub payoff_before: f64,
    pub payoff_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureScanResult {
    pub equilibria: Vec<Profile>,
    pub deviations: Vec<Deviation>,
}

impl PureScanResult {
    pub fn has_pure_equilibrium(&self) -> bool {
        !self.equilibria.is_empty()
    }
}

/// Checks all four pure profiles for profitable unilateral deviations.
///
/// A profile is an equilibrium iff neither player strictly gains by switching.
/// For every other profile one deviation is recorded, the defender's if it
/// has one, otherwise the adversary's.
pub fn find_pure_equilibria(matrix: &PayoffMatrix) -> PureScanResult {
    let mut equilibria = Vec::new();
    let mut deviations = Vec::new();

    for d in DefenderMove::ALL {
        for a in AdversaryMove::ALL {
            let here = matrix.cell(d, a);
            let defender_alt = matrix.cell(d.other(), a).defender;
            let adversary_alt = matrix.cell(d, a.other()).adversary;

            if defender_alt > here.defender {
                deviations.push(Deviation {
                    profile: (d, a),
                    player: Player::Defender,
                    to: (d.other(), a),
                    payoff_before: here.defender,
                    payoff_after: defender_alt,
                });
            } else if adversary_alt > here.adversary {
                deviations.push(Deviation {
                    profile: (d, a),
                    player: Player::Adversary,
                    to: (d, a.other()),
                    payoff_before: here.adversary,
                    payoff_after: adversary_alt,
                });
            } else {
                equilibria.push((d, a));
            }
        }
    }

    PureScanResult {
        equilibria,
        deviations,
    }
}

/// A mixed strategy pair with its indifference gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedEquilibrium {
    pub p_star: f64,
    pub q_star: f64,
    /// `|E[Look] - E[NotLook]|` for the adversary at mixing weight `p_star`.
    pub residual_adversary: f64,
    /// `|E[Hide] - E[NotHide]|` for the defender at mixing weight `q_star`.
    pub residual_defender: f64,
}

/// Unclamped `(b_leak - c_look) / b_leak`.
pub fn equilibrium_p(params: &GameParams) -> Result<f64, GameError> {
    if params.b_leak == 0.0 {
        return Err(GameError::DegenerateGame("b_leak"));
    }
    Ok((params.b_leak - params.c_look) / params.b_leak)
}

/// Unclamped `(b_harmony - b_hide + c_hide) / (c_leak + b_harmony)`.
pub fn equilibrium_q(params: &GameParams) -> Result<f64, GameError> {
    let denom = params.c_leak + params.b_harmony;
    if denom == 0.0 {
        return Err(GameError::DegenerateGame("c_leak + b_harmony"));
    }
    Ok((params.b_harmony - params.b_hide + params.c_hide) / denom)
}

/// Closed-form interior mixed equilibrium.
///
/// Out-of-range probabilities are reported as [`GameError::NoInteriorEquilibrium`];
/// they only occur when the modelling assumptions are violated.
pub fn solve_mixed_closed_form(params: &GameParams) -> Result<MixedEquilibrium, GameError> {
    params.ensure_finite()?;
    let p_star = equilibrium_p(params)?;
    let q_star = equilibrium_q(params)?;
    let unit = 0.0..=1.0;
    if !unit.contains(&p_star) || !unit.contains(&q_star) {
        return Err(GameError::NoInteriorEquilibrium { p_star, q_star });
    }
    let res = indifference_residuals(params, p_star, q_star)?;
    Ok(MixedEquilibrium {
        p_star,
        q_star,
        residual_adversary: res.adversary,
        residual_defender: res.defender,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefenderPayoffs {
    pub hide: f64,
    pub not_hide: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryPayoffs {
    pub look: f64,
    pub not_look: f64,
}

/// Defender's expected payoff from each pure strategy when the opposing mix
/// puts weight `q` on `Look`.
pub fn expected_defender_payoffs(
    params: &GameParams,
    q: f64,
) -> Result<DefenderPayoffs, GameError> {
    check_probability("q", q)?;
    Ok(DefenderPayoffs {
        hide: params.hiding_net_gain(),
        not_hide: -params.c_leak * q + params.b_harmony * (1.0 - q),
    })
}

/// Adversary's expected payoff from each pure strategy when the opposing mix
/// puts weight `p` on `Hide`.
pub fn expected_adversary_payoffs(
    params: &GameParams,
    p: f64,
) -> Result<AdversaryPayoffs, GameError> {
    check_probability("p", p)?;
    Ok(AdversaryPayoffs {
        look: -params.c_look * p + (params.b_leak - params.c_look) * (1.0 - p),
        not_look: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub adversary: f64,
    pub defender: f64,
}

pub fn indifference_residuals(
    params: &GameParams,
    p_star: f64,
    q_star: f64,
) -> Result<Residuals, GameError> {
    let a = expected_adversary_payoffs(params, p_star)?;
    let u = expected_defender_payoffs(params, q_star)?;
    Ok(Residuals {
        adversary: (a.look - a.not_look).abs(),
        defender: (u.hide - u.not_hide).abs(),
    })
}

/// Every equilibrium of a 2x2 bimatrix game found by support enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEnumeration {
    /// Pure equilibria first (row-major), then the full-support one if any.
    /// `p_star` is the row (`Hide`) weight and `q_star` the column (`Look`)
    /// weight, matching the closed-form labels.
    pub equilibria: Vec<MixedEquilibrium>,
    /// Set when a player is indifferent over a whole segment of mixes, in
    /// which case the game has a continuum of equilibria that is not listed.
    pub continuum: bool,
}

impl SupportEnumeration {
    pub fn interior(&self) -> impl Iterator<Item = &MixedEquilibrium> {
        self.equilibria
            .iter()
            .filter(|e| e.p_star > 0.0 && e.p_star < 1.0 && e.q_star > 0.0 && e.q_star < 1.0)
    }
}

/// Support enumeration over a generic 2x2 bimatrix.
///
/// Works only from the matrix entries, so it is independent of the closed
/// form it is used to check.
pub fn solve_2x2_support_enumeration(matrix: &PayoffMatrix) -> SupportEnumeration {
    let c = matrix.cells();
    let a = |r: usize, k: usize| c[r][k].defender;
    let b = |r: usize, k: usize| c[r][k].adversary;

    let weights_residuals = |x: f64, y: f64| {
        // column player's gap under row mix x, row player's gap under column mix y
        let col0 = x * b(0, 0) + (1.0 - x) * b(1, 0);
        let col1 = x * b(0, 1) + (1.0 - x) * b(1, 1);
        let row0 = y * a(0, 0) + (1.0 - y) * a(0, 1);
        let row1 = y * a(1, 0) + (1.0 - y) * a(1, 1);
        ((col0 - col1).abs(), (row0 - row1).abs())
    };
    let make = |x: f64, y: f64| {
        let (res_a, res_u) = weights_residuals(x, y);
        MixedEquilibrium {
            p_star: x,
            q_star: y,
            residual_adversary: res_a,
            residual_defender: res_u,
        }
    };

    let mut equilibria = Vec::new();
    let mut continuum = false;

    // singleton supports
    for r in 0..2 {
        for k in 0..2 {
            let row_ok = a(r, k) >= a(1 - r, k);
            let col_ok = b(r, k) >= b(r, 1 - k);
            if row_ok && col_ok {
                let x = if r == 0 { 1.0 } else { 0.0 };
                let y = if k == 0 { 1.0 } else { 0.0 };
                equilibria.push(make(x, y));
            }
        }
    }

    // full support: x makes the column player indifferent, y the row player
    let col_den = b(0, 0) - b(1, 0) - b(0, 1) + b(1, 1);
    let col_num = b(1, 1) - b(1, 0);
    let row_den = a(0, 0) - a(0, 1) - a(1, 0) + a(1, 1);
    let row_num = a(1, 1) - a(0, 1);

    match (
        solve_weight(col_num, col_den),
        solve_weight(row_num, row_den),
    ) {
        (Weight::Always, _) | (_, Weight::Always) => continuum = true,
        (Weight::Unique(x), Weight::Unique(y)) => {
            let open = |w: f64| w > 0.0 && w < 1.0;
            let closed = |w: f64| (0.0..=1.0).contains(&w);
            if open(x) && open(y) {
                equilibria.push(make(x, y));
            } else if closed(x) && closed(y) && (!open(x) || !open(y)) {
                // indifference at a pure strategy: mixed supports degenerate
                continuum = true;
            }
        }
        _ => {}
    }

    SupportEnumeration {
        equilibria,
        continuum,
    }
}

enum Weight {
    Unique(f64),
    Always,
    Never,
}

fn solve_weight(num: f64, den: f64) -> Weight {
    if den == 0.0 {
        if num == 0.0 {
            Weight::Always
        } else {
            Weight::Never
        }
    } else {
        Weight::Unique(num / den)
    }
}

/// Convenience: support enumeration on the game's own payoff matrix.
pub fn oracle_for(params: &GameParams) -> SupportEnumeration {
    solve_2x2_support_enumeration(&build_payoff_matrix(params))
}
