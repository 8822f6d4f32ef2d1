//! Max-Utility association by dual decomposition.
//!
//! The load-coupling constraints `y_ns = Σ_k x_nsk` of every priced pair
//! (subband 1 of each BS, subband 2 of each PBS) are relaxed with prices `μ`.
//! Users then pick the option with the best `c_nsk - μ_ns` (D2D RXs compare
//! against `c` of their own TX), base stations set `y = exp(μ - 1)` and move
//! the price against the supply/demand residual. The dual function
//!
//! ```text
//! I(μ) = Σ_k max_options(score) + Σ_priced exp(μ_ns - 1)
//! ```
//!
//! upper-bounds the primal optimum for every `μ`, and `y(μ) - demand(μ)` is a
//! subgradient of it.

use alloc::vec;
use alloc::vec::Vec;

use crate::phy::{RateTable, Subband};
use crate::roster::{Link, Roster};
use crate::{Error, Result};

/// One chosen link per receiver, indexed by receiver.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Assignment(pub Vec<Link>);

impl Assignment {
    pub fn links(&self) -> &[Link] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Receivers on each priced pair.
    pub fn demand(&self, roster: &Roster) -> Vec<u32> {
        let mut demand = vec![0u32; roster.n_priced()];
        for link in &self.0 {
            if let Some(slot) = roster.priced_slot(link.tx, link.subband) {
                demand[slot] += 1;
            }
        }
        demand
    }

    /// Checks the one-association constraint and the availability mask.
    pub fn check_feasible(&self, rates: &RateTable) -> Result<()> {
        if self.0.len() != rates.n_rx() {
            return Err(Error::InfeasibleAssignment(alloc::format!(
                "{} links for {} receivers",
                self.0.len(),
                rates.n_rx()
            )));
        }
        for (k, link) in self.0.iter().enumerate() {
            if link.tx >= rates.roster().n_tx() || !rates.is_available(*link, k) {
                return Err(Error::InfeasibleAssignment(alloc::format!(
                    "receiver {k} is on unavailable option ({}, {})",
                    link.tx,
                    link.subband
                )));
            }
        }
        Ok(())
    }
}

/// Prices `μ` over the priced pairs, slot order as in [`Roster::priced_slot`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prices(pub Vec<f64>);

impl Prices {
    pub fn uniform(roster: &Roster, value: f64) -> Self {
        Prices(vec![value; roster.n_priced()])
    }

    pub fn get(&self, roster: &Roster, link: Link) -> Option<f64> {
        roster.priced_slot(link.tx, link.subband).map(|s| self.0[s])
    }

    pub fn check(&self, roster: &Roster) -> Result<()> {
        if self.0.len() == roster.n_priced() {
            Ok(())
        } else {
            Err(Error::MissingPrices {
                expected: roster.n_priced(),
                found: self.0.len(),
            })
        }
    }
}

/// The receiver-side selection skeleton shared by every association scheme.
///
/// Base-station options are scanned lowest transmitter first, then lowest
/// subband, keeping the first strict maximum; `bs_score` returning `None`
/// skips an option. A D2D RX then switches to its own TX iff the best BS
/// score is strictly below `d2d_score`. Returns the link and its score.
pub(crate) fn select_link<B, D>(rates: &RateTable, rx: usize, mut bs_score: B, d2d_score: D) -> Result<(Link, f64)>
where
    B: FnMut(Link) -> Option<f64>,
    D: FnOnce(Link) -> f64,
{
    let mut best: Option<(Link, f64)> = None;
    for link in rates.roster().bs_options() {
        if !rates.is_available(link, rx) {
            continue;
        }
        let Some(score) = bs_score(link) else { continue };
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((link, score));
        }
    }
    if let Some(d2d) = rates.d2d_link(rx) {
        let score = d2d_score(d2d);
        if best.is_none_or(|(_, b)| b < score) {
            best = Some((d2d, score));
        }
    }
    best.ok_or(Error::NoOption(rx))
}

fn user_choice_scored(rx: usize, rates: &RateTable, mu: &Prices) -> Result<(Link, f64)> {
    let roster = rates.roster();
    select_link(
        rates,
        rx,
        |l| {
            let slot = roster.priced_slot(l.tx, l.subband)?;
            Some(rates.log_rate(l, rx) - mu.0[slot])
        },
        |l| rates.log_rate(l, rx),
    )
}

/// Receiver `rx`'s best response to prices `mu`.
pub fn user_choice(rx: usize, rates: &RateTable, mu: &Prices) -> Result<Link> {
    mu.check(rates.roster())?;
    user_choice_scored(rx, rates, mu).map(|(l, _)| l)
}

/// Load that maximises `y (μ - ln y)`.
pub fn bs_load_update(mu: f64) -> f64 {
    libm::exp(mu - 1.0)
}

/// One subgradient step: the price rises when demand exceeds supply.
pub fn bs_price_update(mu: f64, load: f64, demand: f64, stepsize: f64) -> f64 {
    mu - stepsize * (load - demand)
}

/// `t ln t` with the continuous extension `0 ln 0 = 0`.
fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * libm::log(t)
    }
}

/// Sum utility `G(x)`: per BS-served receiver `c_nsk - ln(load_ns)`, per
/// D2D-mode receiver `c_{n_k 3 k}`.
pub fn primal_utility(x: &Assignment, rates: &RateTable) -> Result<f64> {
    x.check_feasible(rates)?;
    let roster = rates.roster();
    let demand = x.demand(roster);
    let mut total = 0.0;
    for (k, &link) in x.links().iter().enumerate() {
        total += rates.log_rate(link, k);
    }
    // Σ_k x_nsk ln(load_ns) over a pair is load ln load.
    let penalty: f64 = demand.iter().map(|&d| xlogx(d as f64)).sum();
    Ok(total - penalty)
}

/// Everything the dual function exposes at one price vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    /// `I(μ)`.
    pub value: f64,
    /// Best responses `x(μ)`.
    pub choices: Assignment,
    /// `Σ_k x_nsk(μ)` per priced pair.
    pub demand: Vec<u32>,
    /// `y(μ) = exp(μ - 1)` per priced pair.
    pub load: Vec<f64>,
}

impl DualEvaluation {
    /// Subgradient `y(μ) - demand(μ)` of the dual function.
    pub fn subgradient(&self) -> Vec<f64> {
        self.load
            .iter()
            .zip(&self.demand)
            .map(|(y, &d)| y - d as f64)
            .collect()
    }
}

pub fn dual_evaluation(mu: &Prices, rates: &RateTable) -> Result<DualEvaluation> {
    let roster = rates.roster();
    mu.check(roster)?;
    let mut links = Vec::with_capacity(rates.n_rx());
    let mut value = 0.0;
    for k in 0..rates.n_rx() {
        let (link, score) = user_choice_scored(k, rates, mu)?;
        value += score;
        links.push(link);
    }
    let load: Vec<f64> = mu.0.iter().map(|&m| bs_load_update(m)).collect();
    value += load.iter().sum::<f64>();
    let choices = Assignment(links);
    let demand = choices.demand(roster);
    Ok(DualEvaluation {
        value,
        choices,
        demand,
        load,
    })
}

/// `I(μ)`.
pub fn dual_value(mu: &Prices, rates: &RateTable) -> Result<f64> {
    dual_evaluation(mu, rates).map(|e| e.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    pub stepsize: f64,
    pub max_iterations: usize,
    /// Relative change of the sum utility over [`SolverConfig::window`] rounds
    /// below which the run stops.
    pub convergence_tol: f64,
    pub window: usize,
    pub mu_init: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            stepsize: 0.01,
            max_iterations: 500,
            convergence_tol: 1e-3,
            window: 10,
            mu_init: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stepsize > 0.0 && self.stepsize.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "stepsize must be positive, got {}",
                self.stepsize
            )));
        }
        if self.max_iterations == 0 || self.window == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations and window must be at least 1".into(),
            ));
        }
        if !(self.convergence_tol >= 0.0) || !self.mu_init.is_finite() {
            return Err(Error::InvalidConfig(alloc::format!(
                "convergence_tol {} must be >= 0 and mu_init {} finite",
                self.convergence_tol,
                self.mu_init
            )));
        }
        Ok(())
    }
}

/// One synchronous round of the distributed algorithm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub iteration: usize,
    /// `G(x^t)` of the users' responses in this round.
    pub sum_utility: f64,
    /// `I(μ^t)`.
    pub dual_value: f64,
    /// Prices broadcast at the start of the round.
    pub mu: Vec<f64>,
    pub demand: Vec<u32>,
    /// `max |y - demand|` over priced pairs.
    pub max_price_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Best-primal iterate.
    pub final_x: Assignment,
    /// `G(final_x)`.
    pub sum_utility: f64,
    /// Prices that `final_x` is the best response to.
    pub mu_star: Prices,
    /// Round at which `final_x` was produced.
    pub best_iteration: usize,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Runs users' best responses and base-station price updates in synchronous
/// rounds until the sum utility stops moving or the budget runs out.
///
/// Stops after round `t` when `|G_t - G_{t-w}| <= tol·|G_{t-w}|` with
/// `w = cfg.window`. Returns the round with the highest `G` seen (earliest on ties).
pub fn solve_max_utility(rates: &RateTable, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let roster = rates.roster();
    let mut mu = Prices::uniform(roster, cfg.mu_init);
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut best: Option<(f64, usize, Assignment, Prices)> = None;
    let mut converged = false;

    for t in 0..cfg.max_iterations {
        let eval = dual_evaluation(&mu, rates)?;
        let g = primal_utility(&eval.choices, rates)?;
        if !g.is_finite() || !eval.value.is_finite() {
            return Err(Error::NonFiniteUtility(t));
        }
        let residual = eval.subgradient();
        let max_price_residual = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));

        if best.as_ref().is_none_or(|(bg, ..)| g > *bg) {
            best = Some((g, t, eval.choices.clone(), mu.clone()));
        }

        let next: Vec<f64> = mu
            .0
            .iter()
            .zip(&eval.load)
            .zip(&eval.demand)
            .map(|((&m, &y), &d)| bs_price_update(m, y, d as f64, cfg.stepsize))
            .collect();

        trace.push(IterationRecord {
            iteration: t,
            sum_utility: g,
            dual_value: eval.value,
            mu: core::mem::replace(&mut mu.0, next),
            demand: eval.demand,
            max_price_residual,
        });

        if t >= cfg.window {
            let past = trace[t - cfg.window].sum_utility;
            if (g - past).abs() <= cfg.convergence_tol * past.abs() {
                converged = true;
                break;
            }
        }
    }

    let (sum_utility, best_iteration, final_x, mu_star) =
        best.expect("max_iterations >= 1 guarantees one round");
    let iterations_used = trace.len();
    Ok(SolveResult {
        final_x,
        sum_utility,
        mu_star,
        best_iteration,
        trace,
        converged,
        iterations_used,
    })
}

/// Default cap on the number of assignments [`brute_force_oracle`] enumerates.
pub const ORACLE_CAP: u128 = 10_000_000;

struct Enumeration<'a> {
    rates: &'a RateTable,
    options: Vec<Vec<(Link, Option<usize>, f64)>>,
    /// `xlogx(L+1) - xlogx(L)` for L = 0..K.
    penalty_step: Vec<f64>,
    loads: Vec<usize>,
    current: Vec<usize>,
    best_value: f64,
    best: Vec<usize>,
}

impl Enumeration<'_> {
    fn descend(&mut self, k: usize, value: f64) {
        if k == self.options.len() {
            if value > self.best_value {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return;
        }
        for i in 0..self.options[k].len() {
            let (_, slot, c) = self.options[k][i];
            let mut v = value + c;
            if let Some(s) = slot {
                v -= self.penalty_step[self.loads[s]];
                self.loads[s] += 1;
            }
            self.current[k] = i;
            self.descend(k + 1, v);
            if let Some(s) = slot {
                self.loads[s] -= 1;
            }
        }
    }
}

/// Exhaustive maximiser of [`primal_utility`] for small instances.
///
/// Receivers pick independently among their available options; every
/// combination is scored incrementally in lexicographic order (receiver 0 is
/// the most significant digit, options in tie-break order) and the first
/// strict maximum is kept. The returned value is re-evaluated with
/// [`primal_utility`].
pub fn brute_force_oracle(rates: &RateTable, cap: u128) -> Result<(Assignment, f64)> {
    let roster = rates.roster();
    let options: Vec<Vec<(Link, Option<usize>, f64)>> = (0..rates.n_rx())
        .map(|k| {
            rates
                .options(k)
                .map(|l| (l, roster.priced_slot(l.tx, l.subband), rates.log_rate(l, k)))
                .collect()
        })
        .collect();
    let mut count: u128 = 1;
    for (k, opts) in options.iter().enumerate() {
        if opts.is_empty() {
            return Err(Error::NoOption(k));
        }
        count = count.saturating_mul(opts.len() as u128);
    }
    if count > cap {
        return Err(Error::InstanceTooLarge {
            assignments: count,
            cap,
        });
    }
    let n_rx = rates.n_rx();
    let penalty_step = (0..=n_rx)
        .map(|l| xlogx(l as f64 + 1.0) - xlogx(l as f64))
        .collect();
    let mut search = Enumeration {
        rates,
        options,
        penalty_step,
        loads: vec![0; roster.n_priced()],
        current: vec![0; n_rx],
        best_value: f64::NEG_INFINITY,
        best: vec![0; n_rx],
    };
    search.descend(0, 0.0);
    let x = Assignment(
        search
            .best
            .iter()
            .enumerate()
            .map(|(k, &i)| search.options[k][i].0)
            .collect(),
    );
    let g = primal_utility(&x, search.rates)?;
    Ok((x, g))
}

/// Whether `link` is the D2D option.
pub fn is_d2d(link: Link) -> bool {
    link.subband == Subband::Three
}
