//! Monte Carlo risk engine.
//!
//! Each iteration samples the six monetary parameters uniformly from their
//! configured ranges and the steganography effectiveness from a Beta
//! distribution, evaluates the clamped equilibrium, derives the adversary's
//! advantage for the chosen scenario and multiplies it by the impact factor.
//!
//! Iteration `i` draws from its own ChaCha8 stream keyed by `(seed, i)`, and
//! statistics are accumulated in index order, so results are bit-identical
//! whatever the number of worker threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{conditional_unchecked, risk_from_advantage};
use crate::equilibrium::{equilibrium_p, equilibrium_q};
use crate::error::SimulationError;
use crate::model::{impact_factor, GameParams};

pub const DEFAULT_ITERATIONS: u64 = 10_000;
pub const DEFAULT_ADV_MIN: f64 = 0.01;
/// Relative half-width of the default sampling ranges around the case study.
pub const DEFAULT_SPREAD: f64 = 0.5;
pub const P_CELLS: usize = 21;
pub const Q_CELLS: usize = 31;

/// Iterations evaluated per parallel batch before results are folded in.
const BATCH: u64 = 4096;

pub const RECORD_CSV_HEADER: &str =
    "iter,b_leak,c_look,b_harmony,b_hide,c_hide,c_leak,beta,p_star,q_star,advantage,risk";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Absolute advantage, floored at `adv_min`.
    Positive,
    /// Signed advantage, never positive.
    Negative,
    /// Effectiveness forced to zero, so advantage and risk vanish.
    Zero,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Positive => "positive",
            Scenario::Negative => "negative",
            Scenario::Zero => "zero",
        }
    }

    /// Default Beta shapes: low effectiveness for the positive case, high
    /// for the negative one.
    pub fn default_beta_shape(self) -> (f64, f64) {
        match self {
            Scenario::Positive | Scenario::Zero => (2.0, 5.0),
            Scenario::Negative => (5.0, 2.0),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Scenario::Positive),
            "negative" => Ok(Scenario::Negative),
            "zero" => Ok(Scenario::Zero),
            other => Err(format!(
                "unknown scenario `{other}` (expected positive, negative or zero)"
            )),
        }
    }
}

/// Closed interval `[lo, hi]`; written as a two-element array in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Range { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let x = self.lo + (self.hi - self.lo) * u;
        x.min(self.hi)
    }
}

impl From<[f64; 2]> for Range {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Range { lo, hi }
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRanges {
    pub b_leak: Range,
    pub c_look: Range,
    pub b_harmony: Range,
    pub b_hide: Range,
    pub c_hide: Range,
    pub c_leak: Range,
}

impl ParamRanges {
    /// `value * (1 ± spread)` around every monetary field of `params`.
    pub fn around(params: &GameParams, spread: f64) -> Self {
        let r = |v: f64| Range::new(v * (1.0 - spread), v * (1.0 + spread));
        ParamRanges {
            b_leak: r(params.b_leak),
            c_look: r(params.c_look),
            b_harmony: r(params.b_harmony),
            b_hide: r(params.b_hide),
            c_hide: r(params.c_hide),
            c_leak: r(params.c_leak),
        }
    }

    /// Point masses at `params`.
    pub fn fixed(params: &GameParams) -> Self {
        Self::around(params, 0.0)
    }

    /// In sampling order.
    fn named(&self) -> [(&'static str, Range); 6] {
        [
            ("b_leak", self.b_leak),
            ("c_look", self.c_look),
            ("b_harmony", self.b_harmony),
            ("b_hide", self.b_hide),
            ("c_hide", self.c_hide),
            ("c_leak", self.c_leak),
        ]
    }
}

impl Default for ParamRanges {
    fn default() -> Self {
        Self::around(&GameParams::CASE_STUDY, DEFAULT_SPREAD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub iterations: u64,
    pub seed: u64,
    pub ranges: ParamRanges,
    pub beta_a: f64,
    pub beta_b: f64,
    pub adv_min: f64,
    /// Replaces the Beta draw with a constant effectiveness when set.
    pub beta_fixed: Option<f64>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        let (beta_a, beta_b) = scenario.default_beta_shape();
        ScenarioConfig {
            scenario,
            iterations: DEFAULT_ITERATIONS,
            seed,
            ranges: ParamRanges::default(),
            beta_a,
            beta_b,
            adv_min: DEFAULT_ADV_MIN,
            beta_fixed: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.iterations == 0 {
            return Err(SimulationError::NoIterations);
        }
        for (field, r) in self.ranges.named() {
            if !(r.lo.is_finite() && r.hi.is_finite() && 0.0 <= r.lo && r.lo <= r.hi) {
                return Err(SimulationError::InvalidRange {
                    field,
                    lo: r.lo,
                    hi: r.hi,
                });
            }
        }
        if self.ranges.b_leak.lo <= 0.0 {
            return Err(SimulationError::DegenerateRange("b_leak"));
        }
        if self.ranges.c_leak.lo + self.ranges.b_harmony.lo <= 0.0 {
            return Err(SimulationError::DegenerateRange("c_leak + b_harmony"));
        }
        if !valid_shape(self.beta_a, self.beta_b) {
            return Err(SimulationError::InvalidBetaShape {
                a: self.beta_a,
                b: self.beta_b,
            });
        }
        if !(0.0..=1.0).contains(&self.adv_min) {
            return Err(SimulationError::InvalidAdvantageFloor(self.adv_min));
        }
        if let Some(b) = self.beta_fixed {
            if !(0.0..=1.0).contains(&b) {
                return Err(SimulationError::InvalidFixedBeta(b));
            }
        }
        Ok(())
    }
}

fn valid_shape(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0
}

/// The random stream of iteration `index` under `seed`.
pub fn iteration_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Beta(a, b) variate as `X / (X + Y)` with `X ~ Gamma(a, 1)`, `Y ~ Gamma(b, 1)`.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64, SimulationError> {
    if !valid_shape(a, b) {
        return Err(SimulationError::InvalidBetaShape { a, b });
    }
    let ga = Gamma::new(a, 1.0).map_err(|_| SimulationError::InvalidBetaShape { a, b })?;
    let gb = Gamma::new(b, 1.0).map_err(|_| SimulationError::InvalidBetaShape { a, b })?;
    let x = ga.sample(rng);
    let y = gb.sample(rng);
    let sum = x + y;
    if sum > 0.0 {
        Ok((x / sum).clamp(0.0, 1.0))
    } else {
        // both gammas underflowed (tiny shapes): Beta tends to Bernoulli(a / (a + b))
        Ok(if rng.random::<f64>() < a / (a + b) {
            1.0
        } else {
            0.0
        })
    }
}

/// Draws one parameter set, in the order b_leak, c_look, b_harmony, b_hide,
/// c_hide, c_leak, beta.
pub fn sample_scenario_params<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ScenarioConfig,
) -> Result<GameParams, SimulationError> {
    let r = &config.ranges;
    let b_leak = r.b_leak.sample(rng);
    let c_look = r.c_look.sample(rng);
    let b_harmony = r.b_harmony.sample(rng);
    let b_hide = r.b_hide.sample(rng);
    let c_hide = r.c_hide.sample(rng);
    let c_leak = r.c_leak.sample(rng);
    let beta = match config.beta_fixed {
        Some(b) => b,
        None => sample_beta(rng, config.beta_a, config.beta_b)?,
    };
    Ok(GameParams {
        b_hide,
        c_hide,
        b_harmony,
        c_leak,
        b_leak,
        c_look,
        beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub index: u64,
    pub params: GameParams,
    pub p_star: f64,
    pub q_star: f64,
    pub advantage: f64,
    pub risk: f64,
}

impl SimulationRecord {
    pub fn write_csv_row<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let p = &self.params;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            p.b_leak,
            p.c_look,
            p.b_harmony,
            p.b_hide,
            p.c_hide,
            p.c_leak,
            p.beta,
            self.p_star,
            self.q_star,
            self.advantage,
            self.risk
        )
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// One simulation step. Equilibrium probabilities are clamped into `[0, 1]`.
pub fn run_iteration<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ScenarioConfig,
    index: u64,
) -> Result<SimulationRecord, SimulationError> {
    let mut params = sample_scenario_params(rng, config)?;
    if config.scenario == Scenario::Zero {
        params.beta = 0.0;
    }
    let p_star = clamp_unit(equilibrium_p(&params).unwrap_or(f64::NAN));
    let q_star = clamp_unit(equilibrium_q(&params).unwrap_or(f64::NAN));
    let (given_hide, given_not_hide) = conditional_unchecked(p_star, q_star, params.beta);
    let diff = given_hide - given_not_hide;

    let advantage = match config.scenario {
        Scenario::Positive => {
            let adv = diff.abs();
            if adv < config.adv_min {
                config.adv_min
            } else {
                adv
            }
        }
        Scenario::Negative | Scenario::Zero => diff,
    };

    Ok(SimulationRecord {
        index,
        params,
        p_star,
        q_star,
        advantage,
        risk: risk_from_advantage(advantage, impact_factor(&params)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Counts of `(p*, q*)` pairs on a 21 x 31 grid of equal cells over the unit
/// square. The last cell on each axis is closed on the right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub p_cells: usize,
    pub q_cells: usize,
    /// `counts[p_cell][q_cell]`.
    pub counts: Vec<Vec<u64>>,
}

impl Default for Histogram2D {
    fn default() -> Self {
        Histogram2D {
            p_cells: P_CELLS,
            q_cells: Q_CELLS,
            counts: vec![vec![0; Q_CELLS]; P_CELLS],
        }
    }
}

impl Histogram2D {
    pub fn cell_index(value: f64, cells: usize) -> usize {
        ((value * cells as f64).floor().max(0.0) as usize).min(cells - 1)
    }

    pub fn add(&mut self, p: f64, q: f64) {
        let i = Self::cell_index(p, self.p_cells);
        let j = Self::cell_index(q, self.q_cells);
        self.counts[i][j] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn nonzero_cells(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(move |(j, &c)| ((i, j), c))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub scenario: Scenario,
    pub iterations: u64,
    pub seed: u64,
    pub advantage: Stats,
    pub risk: Stats,
    pub histogram: Histogram2D,
}

#[derive(Debug, Clone, Copy)]
struct RunningStats {
    sum: f64,
    min: f64,
    max: f64,
}

impl RunningStats {
    fn new() -> Self {
        RunningStats {
            sum: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, x: f64) {
        self.sum += x;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn finish(&self, n: u64) -> Stats {
        // keep min <= mean <= max under rounding
        let mean = (self.sum / n as f64).clamp(self.min, self.max);
        Stats {
            mean,
            min: self.min,
            max: self.max,
        }
    }
}

/// Folds records, in order, into a [`SimulationSummary`].
#[derive(Debug, Clone)]
pub struct SummaryAccumulator {
    count: u64,
    advantage: RunningStats,
    risk: RunningStats,
    histogram: Histogram2D,
}

impl Default for SummaryAccumulator {
    fn default() -> Self {
        SummaryAccumulator {
            count: 0,
            advantage: RunningStats::new(),
            risk: RunningStats::new(),
            histogram: Histogram2D::default(),
        }
    }
}

impl SummaryAccumulator {
    pub fn push(&mut self, record: &SimulationRecord) {
        self.count += 1;
        self.advantage.push(record.advantage);
        self.risk.push(record.risk);
        self.histogram.add(record.p_star, record.q_star);
    }

    pub fn finish(
        self,
        scenario: Scenario,
        seed: u64,
    ) -> Result<SimulationSummary, SimulationError> {
        if self.count == 0 {
            return Err(SimulationError::EmptyRecords);
        }
        Ok(SimulationSummary {
            scenario,
            iterations: self.count,
            seed,
            advantage: self.advantage.finish(self.count),
            risk: self.risk.finish(self.count),
            histogram: self.histogram,
        })
    }
}

pub fn summarize(
    records: &[SimulationRecord],
    scenario: Scenario,
    seed: u64,
) -> Result<SimulationSummary, SimulationError> {
    let mut acc = SummaryAccumulator::default();
    records.iter().for_each(|r| acc.push(r));
    acc.finish(scenario, seed)
}

pub fn histogram2d(records: &[SimulationRecord]) -> Result<Histogram2D, SimulationError> {
    if records.is_empty() {
        return Err(SimulationError::EmptyRecords);
    }
    let mut h = Histogram2D::default();
    for r in records {
        h.add(r.p_star, r.q_star);
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub records: Vec<SimulationRecord>,
    pub summary: SimulationSummary,
}

impl SimulationRun {
    pub fn write_records_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{RECORD_CSV_HEADER}")?;
        for r in &self.records {
            r.write_csv_row(out)?;
        }
        Ok(())
    }
}

/// Runs every iteration of `config` on the global rayon pool.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimulationRun, SimulationError> {
    run_scenario_with_workers(config, None)
}

/// Like [`run_scenario`], on a dedicated pool of `workers` threads when given.
pub fn run_scenario_with_workers(
    config: &ScenarioConfig,
    workers: Option<usize>,
) -> Result<SimulationRun, SimulationError> {
    let mut records = Vec::with_capacity(config.iterations.min(1 << 24) as usize);
    let summary = drive(config, workers, |batch| {
        records.extend_from_slice(batch);
        Ok(())
    })?;
    Ok(SimulationRun { records, summary })
}

/// Runs `config` without retaining records, writing each one as a CSV row to
/// `out` (header first). Memory use is bounded by the batch size.
pub fn stream_scenario<W: Write>(
    config: &ScenarioConfig,
    workers: Option<usize>,
    out: &mut W,
) -> Result<SimulationSummary, SimulationError> {
    config.validate()?;
    writeln!(out, "{RECORD_CSV_HEADER}")?;
    drive(config, workers, |batch| {
        for r in batch {
            r.write_csv_row(out)?;
        }
        Ok(())
    })
}

fn drive(
    config: &ScenarioConfig,
    workers: Option<usize>,
    mut sink: impl FnMut(&[SimulationRecord]) -> Result<(), SimulationError>,
) -> Result<SimulationSummary, SimulationError> {
    config.validate()?;
    let pool = match workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SimulationError::ThreadPool(e.to_string()))?,
        ),
        None => None,
    };

    let mut acc = SummaryAccumulator::default();
    let mut start = 0;
    while start < config.iterations {
        let end = (start + BATCH).min(config.iterations);
        let compute = || -> Result<Vec<SimulationRecord>, SimulationError> {
            (start..end)
                .into_par_iter()
                .map(|i| run_iteration(&mut iteration_rng(config.seed, i), config, i))
                .collect()
        };
        let batch = match &pool {
            Some(p) => p.install(compute)?,
            None => compute()?,
        };
        batch.iter().for_each(|r| acc.push(r));
        sink(&batch)?;
        start = end;
    }
    acc.finish(config.scenario, config.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mass(scenario: Scenario, beta: f64) -> ScenarioConfig {
        ScenarioConfig {
            ranges: ParamRanges::fixed(&GameParams::CASE_STUDY),
            beta_fixed: Some(beta),
            iterations: 1,
            ..ScenarioConfig::new(scenario, 7)
        }
    }

    #[test]
    fn beta_rejects_bad_shapes() {
        let mut rng = iteration_rng(1, 0);
        assert!(sample_beta(&mut rng, 0.0, 1.0).is_err());
        assert!(sample_beta(&mut rng, 1.0, -2.0).is_err());
        assert!(sample_beta(&mut rng, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn beta_draws_are_in_unit_interval() {
        let mut rng = iteration_rng(3, 0);
        for (a, b) in [(0.01, 0.01), (0.5, 0.5), (2.0, 5.0), (50.0, 1.0)] {
            for _ in 0..2000 {
                let x = sample_beta(&mut rng, a, b).unwrap();
                assert!((0.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn point_mass_ranges_reproduce_params() {
        let config = point_mass(Scenario::Positive, 0.5);
        let mut rng = iteration_rng(11, 4);
        for _ in 0..10 {
            let p = sample_scenario_params(&mut rng, &config).unwrap();
            assert_eq!(p, GameParams::CASE_STUDY);
        }
    }

    #[test]
    fn same_stream_same_params() {
        let config = ScenarioConfig::new(Scenario::Positive, 99);
        let a = sample_scenario_params(&mut iteration_rng(99, 17), &config).unwrap();
        let b = sample_scenario_params(&mut iteration_rng(99, 17), &config).unwrap();
        assert_eq!(a, b);
        let c = sample_scenario_params(&mut iteration_rng(99, 18), &config).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn default_draws_stay_in_range() {
        let config = ScenarioConfig::new(Scenario::Negative, 5);
        let r = config.ranges;
        for i in 0..10_000 {
            let p = sample_scenario_params(&mut iteration_rng(5, i), &config).unwrap();
            assert!(r.b_leak.contains(p.b_leak));
            assert!(r.c_look.contains(p.c_look));
            assert!(r.b_harmony.contains(p.b_harmony));
            assert!(r.b_hide.contains(p.b_hide));
            assert!(r.c_hide.contains(p.c_hide));
            assert!(r.c_leak.contains(p.c_leak));
            assert!((0.0..=1.0).contains(&p.beta));
        }
    }

    #[test]
    fn positive_point_mass_iteration() {
        let config = point_mass(Scenario::Positive, 0.5);
        let rec = run_iteration(&mut iteration_rng(7, 0), &config, 0).unwrap();
        assert!((rec.p_star - 0.88).abs() < 1e-12);
        assert!((rec.q_star - 0.20).abs() < 1e-12);
        assert!((rec.advantage - 0.088).abs() < 1e-12);
        assert!((rec.risk - 44_000.0).abs() < 1e-6);
    }

    #[test]
    fn zero_scenario_iteration_is_zero() {
        let config = ScenarioConfig::new(Scenario::Zero, 3);
        for i in 0..100 {
            let rec = run_iteration(&mut iteration_rng(3, i), &config, i).unwrap();
            assert_eq!(rec.params.beta, 0.0);
            assert_eq!(rec.advantage, 0.0);
            assert_eq!(rec.risk, 0.0);
        }
    }

    #[test]
    fn positive_floor_applies() {
        // perfect concealment with almost no hiding: |diff| = p q beta is tiny
        let params = GameParams {
            b_harmony: 100_001.0,
            ..GameParams::CASE_STUDY
        };
        let config = ScenarioConfig {
            ranges: ParamRanges::fixed(&params),
            beta_fixed: Some(1.0),
            ..ScenarioConfig::new(Scenario::Positive, 0)
        };
        let rec = run_iteration(&mut iteration_rng(0, 0), &config, 0).unwrap();
        assert!(rec.q_star < 1e-5);
        assert_eq!(rec.advantage, DEFAULT_ADV_MIN);
        assert_eq!(rec.risk, DEFAULT_ADV_MIN * impact_factor(&params));
    }

    #[test]
    fn out_of_range_equilibria_are_clamped() {
        let params = GameParams {
            c_look: 500_000.0,
            b_hide: 10.0,
            c_hide: 10_000.0,
            ..GameParams::CASE_STUDY
        };
        let config = ScenarioConfig {
            ranges: ParamRanges::fixed(&params),
            ..ScenarioConfig::new(Scenario::Negative, 0)
        };
        let rec = run_iteration(&mut iteration_rng(0, 0), &config, 0).unwrap();
        assert_eq!(rec.p_star, 0.0);
        assert!(rec.q_star <= 1.0);
        assert_eq!(rec.advantage, 0.0);
    }

    #[test]
    fn config_validation() {
        let ok = ScenarioConfig::new(Scenario::Positive, 1);
        assert!(ok.validate().is_ok());
        let mut bad = ok;
        bad.iterations = 0;
        assert!(matches!(bad.validate(), Err(SimulationError::NoIterations)));
        let mut bad = ok;
        bad.ranges.c_look = Range::new(5.0, 1.0);
        assert!(matches!(
            bad.validate(),
            Err(SimulationError::InvalidRange {
                field: "c_look",
                ..
            })
        ));
        let mut bad = ok;
        bad.ranges.b_leak = Range::new(0.0, 1.0);
        assert!(matches!(
            bad.validate(),
            Err(SimulationError::DegenerateRange(_))
        ));
        let mut bad = ok;
        bad.beta_b = 0.0;
        assert!(matches!(
            bad.validate(),
            Err(SimulationError::InvalidBetaShape { .. })
        ));
        let mut bad = ok;
        bad.adv_min = 1.5;
        assert!(matches!(
            bad.validate(),
            Err(SimulationError::InvalidAdvantageFloor(_))
        ));
    }

    #[test]
    fn single_iteration_summary() {
        let config = point_mass(Scenario::Positive, 0.5);
        let run = run_scenario(&config).unwrap();
        let rec = run.records[0];
        let s = &run.summary;
        assert_eq!(s.iterations, 1);
        for (stats, v) in [(s.advantage, rec.advantage), (s.risk, rec.risk)] {
            assert_eq!(stats.mean, v);
            assert_eq!(stats.min, v);
            assert_eq!(stats.max, v);
        }
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(Histogram2D::cell_index(0.88, P_CELLS), 18);
        assert_eq!(Histogram2D::cell_index(0.20, Q_CELLS), 6);
        assert_eq!(Histogram2D::cell_index(1.0, P_CELLS), 20);
        assert_eq!(Histogram2D::cell_index(1.0, Q_CELLS), 30);
        assert_eq!(Histogram2D::cell_index(0.0, P_CELLS), 0);

        let config = ScenarioConfig {
            iterations: 500,
            ..point_mass(Scenario::Positive, 0.5)
        };
        let run = run_scenario(&config).unwrap();
        let cells: Vec<_> = run.summary.histogram.nonzero_cells().collect();
        assert_eq!(cells, vec![((18, 6), 500)]);
    }

    #[test]
    fn histogram_conserves_counts_at_edges() {
        let mk = |p, q| SimulationRecord {
            index: 0,
            params: GameParams::ZERO,
            p_star: p,
            q_star: q,
            advantage: 0.0,
            risk: 0.0,
        };
        let recs = [mk(0.0, 0.0), mk(1.0, 1.0), mk(1.0, 0.0), mk(0.5, 0.5)];
        let h = histogram2d(&recs).unwrap();
        assert_eq!(h.total(), 4);
        assert_eq!(h.counts[20][30], 1);
        assert_eq!(h.counts[0][0], 1);
        assert!(histogram2d(&[]).is_err());
        assert!(matches!(
            summarize(&[], Scenario::Zero, 0),
            Err(SimulationError::EmptyRecords)
        ));
    }

    #[test]
    fn streaming_matches_in_memory() {
        let config = ScenarioConfig {
            iterations: 5000,
            ..ScenarioConfig::new(Scenario::Positive, 42)
        };
        let run = run_scenario(&config).unwrap();
        let mut mem = Vec::new();
        run.write_records_csv(&mut mem).unwrap();
        let mut streamed = Vec::new();
        let summary = stream_scenario(&config, Some(2), &mut streamed).unwrap();
        assert_eq!(mem, streamed);
        assert_eq!(summary, run.summary);
    }
}
