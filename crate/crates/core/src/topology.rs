//! Random network drops.
//!
//! MBSs sit at the centres of square macrocells laid out on a rectangular grid
//! (side = inter-site distance, first MBS at the origin). PBSs, cellular users
//! and D2D TXs are scattered uniformly and independently inside each cell; a
//! D2D RX is placed around its TX at a uniform angle and a uniform distance in
//! `[d2d_min_distance, d2d_max_distance]`. Users closer than
//! `min_user_bs_distance` to any base station are redrawn.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::roster::Roster;
use crate::{Error, Result};

/// Rejection-sampling budget per node before the config is declared infeasible.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub macro_rows: usize,
    pub macro_cols: usize,
    /// Meters between neighbouring MBSs; also the side of a macrocell.
    pub inter_site_distance: f64,
    pub pbs_per_macrocell: usize,
    pub cellular_users_per_macrocell: usize,
    pub d2d_pairs_per_macrocell: usize,
    pub d2d_min_distance: f64,
    pub d2d_max_distance: f64,
    pub min_user_bs_distance: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            macro_rows: 2,
            macro_cols: 2,
            inter_site_distance: 1000.0,
            pbs_per_macrocell: 4,
            cellular_users_per_macrocell: 30,
            d2d_pairs_per_macrocell: 15,
            d2d_min_distance: 10.0,
            d2d_max_distance: 50.0,
            min_user_bs_distance: 10.0,
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.macro_rows == 0 || self.macro_cols == 0 {
            return Err(Error::InvalidConfig(
                "the macro grid needs at least one row and one column".into(),
            ));
        }
        if !(self.inter_site_distance > 0.0 && self.inter_site_distance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "inter_site_distance must be positive, got {}",
                self.inter_site_distance
            )));
        }
        if !(self.d2d_min_distance > 0.0 && self.d2d_min_distance < self.d2d_max_distance)
            || !self.d2d_max_distance.is_finite()
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 < d2d_min_distance < d2d_max_distance, got [{}, {}]",
                self.d2d_min_distance, self.d2d_max_distance
            )));
        }
        if !(self.min_user_bs_distance >= 0.0 && self.min_user_bs_distance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "min_user_bs_distance must be non-negative, got {}",
                self.min_user_bs_distance
            )));
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.macro_rows * self.macro_cols
    }

    pub fn roster(&self) -> Roster {
        let cells = self.n_cells();
        Roster::new(
            cells,
            cells * self.pbs_per_macrocell,
            cells * self.cellular_users_per_macrocell,
            cells * self.d2d_pairs_per_macrocell,
        )
    }

    /// MBS position of cell `cell` (row-major).
    pub fn cell_center(&self, cell: usize) -> Point {
        let row = cell / self.macro_cols;
        let col = cell % self.macro_cols;
        Point::new(
            col as f64 * self.inter_site_distance,
            row as f64 * self.inter_site_distance,
        )
    }

    /// Lower-left and upper-right corners of cell `cell`.
    pub fn cell_bounds(&self, cell: usize) -> (Point, Point) {
        let c = self.cell_center(cell);
        let h = self.inter_site_distance / 2.0;
        (Point::new(c.x - h, c.y - h), Point::new(c.x + h, c.y + h))
    }

    pub fn cell_contains(&self, cell: usize, p: &Point) -> bool {
        let (lo, hi) = self.cell_bounds(cell);
        p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkLayout {
    pub mbs_positions: Vec<Point>,
    pub pbs_positions: Vec<Point>,
    pub cellular_user_positions: Vec<Point>,
    pub d2d_tx_positions: Vec<Point>,
    pub d2d_rx_positions: Vec<Point>,
    /// `pair_map[i]` is the D2D TX ordinal that D2D RX `i` is paired with.
    pub pair_map: Vec<usize>,
}

impl NetworkLayout {
    pub fn roster(&self) -> Roster {
        Roster::new(
            self.mbs_positions.len(),
            self.pbs_positions.len(),
            self.cellular_user_positions.len(),
            self.d2d_tx_positions.len(),
        )
    }

    /// Position of transmitter `n` in the transmitter index space.
    pub fn tx_position(&self, n: usize) -> Point {
        let r = self.roster();
        if n < r.mbs {
            self.mbs_positions[n]
        } else if n < r.n_bs() {
            self.pbs_positions[n - r.mbs]
        } else {
            self.d2d_tx_positions[n - r.n_bs()]
        }
    }

    /// Position of receiver `k` in the receiver index space.
    pub fn rx_position(&self, k: usize) -> Point {
        let r = self.roster();
        if k < r.cellular {
            self.cellular_user_positions[k]
        } else if k < r.cellular + r.pairs {
            self.d2d_tx_positions[k - r.cellular]
        } else {
            self.d2d_rx_positions[k - r.cellular - r.pairs]
        }
    }

    /// Checks shape and pairing consistency: equal TX/RX counts and `pair_map`
    /// being a bijection onto the D2D TXs.
    pub fn validate(&self) -> Result<()> {
        let pairs = self.d2d_tx_positions.len();
        if self.d2d_rx_positions.len() != pairs || self.pair_map.len() != pairs {
            return Err(Error::DimensionMismatch(format!(
                "{} D2D TXs, {} D2D RXs, {} pair entries",
                pairs,
                self.d2d_rx_positions.len(),
                self.pair_map.len()
            )));
        }
        validate_pair_map(&self.pair_map)
    }

    /// Inverse of `pair_map`: D2D RX ordinal served by each D2D TX ordinal.
    pub fn inverse_pair_map(&self) -> Vec<usize> {
        invert_pair_map(&self.pair_map)
    }
}

pub(crate) fn validate_pair_map(pair_map: &[usize]) -> Result<()> {
    let mut seen = alloc::vec![false; pair_map.len()];
    for (rx, &tx) in pair_map.iter().enumerate() {
        if tx >= pair_map.len() || core::mem::replace(&mut seen[tx], true) {
            return Err(Error::DimensionMismatch(format!(
                "pair map is not a bijection (entry {rx} -> {tx})"
            )));
        }
    }
    Ok(())
}

pub(crate) fn invert_pair_map(pair_map: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; pair_map.len()];
    for (rx, &tx) in pair_map.iter().enumerate() {
        inv[tx] = rx;
    }
    inv
}

struct Sampler<'a> {
    config: &'a ScenarioConfig,
    rng: ChaCha8Rng,
}

impl Sampler<'_> {
    fn uniform_in_cell(&mut self, cell: usize) -> Point {
        let (lo, hi) = self.config.cell_bounds(cell);
        Point::new(
            self.rng.random_range(lo.x..hi.x),
            self.rng.random_range(lo.y..hi.y),
        )
    }

    fn clear_of(&self, p: &Point, base_stations: &[Point]) -> bool {
        let min = self.config.min_user_bs_distance;
        base_stations.iter().all(|bs| p.distance(bs) >= min)
    }

    fn user(&mut self, cell: usize, base_stations: &[Point]) -> Result<Point> {
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = self.uniform_in_cell(cell);
            if self.clear_of(&p, base_stations) {
                return Ok(p);
            }
        }
        Err(Error::PlacementFailed {
            role: "cellular user",
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })
    }

    fn pair(&mut self, cell: usize, base_stations: &[Point]) -> Result<(Point, Point)> {
        let (dmin, dmax) = (self.config.d2d_min_distance, self.config.d2d_max_distance);
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let tx = self.uniform_in_cell(cell);
            if !self.clear_of(&tx, base_stations) {
                continue;
            }
            let angle = self.rng.random_range(0.0..2.0 * PI);
            let dist = self.rng.random_range(dmin..=dmax);
            let rx = Point::new(tx.x + dist * libm::cos(angle), tx.y + dist * libm::sin(angle));
            // Rounding in cos/sin can push the distance a hair outside the interval.
            let d = tx.distance(&rx);
            if d < dmin || d > dmax {
                continue;
            }
            if self.config.cell_contains(cell, &rx) && self.clear_of(&rx, base_stations) {
                return Ok((tx, rx));
            }
        }
        Err(Error::PlacementFailed {
            role: "D2D pair",
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })
    }
}

/// Draws one network realisation. Deterministic in `config.rng_seed`.
///
/// Nodes are generated role by role (all PBSs, then all cellular users, then
/// all D2D pairs), cell by cell in row-major order, so node `i` of a role lies
/// in cell `i / per_cell`.
pub fn generate_layout(config: &ScenarioConfig) -> Result<NetworkLayout> {
    config.validate()?;
    let cells = config.n_cells();
    let mut sampler = Sampler {
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
    };

    let mbs_positions: Vec<Point> = (0..cells).map(|c| config.cell_center(c)).collect();

    let mut pbs_positions = Vec::with_capacity(cells * config.pbs_per_macrocell);
    for cell in 0..cells {
        for _ in 0..config.pbs_per_macrocell {
            pbs_positions.push(sampler.uniform_in_cell(cell));
        }
    }

    let base_stations: Vec<Point> = mbs_positions
        .iter()
        .chain(pbs_positions.iter())
        .copied()
        .collect();

    let mut cellular_user_positions = Vec::with_capacity(cells * config.cellular_users_per_macrocell);
    for cell in 0..cells {
        for _ in 0..config.cellular_users_per_macrocell {
            cellular_user_positions.push(sampler.user(cell, &base_stations)?);
        }
    }

    let pairs = cells * config.d2d_pairs_per_macrocell;
    let mut d2d_tx_positions = Vec::with_capacity(pairs);
    let mut d2d_rx_positions = Vec::with_capacity(pairs);
    for cell in 0..cells {
        for _ in 0..config.d2d_pairs_per_macrocell {
            let (tx, rx) = sampler.pair(cell, &base_stations)?;
            d2d_tx_positions.push(tx);
            d2d_rx_positions.push(rx);
        }
    }

    Ok(NetworkLayout {
        mbs_positions,
        pbs_positions,
        cellular_user_positions,
        d2d_tx_positions,
        d2d_rx_positions,
        pair_map: (0..pairs).collect(),
    })
}
