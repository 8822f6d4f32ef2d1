//! Comparison schemes. Each one reuses the receiver-side selection skeleton of
//! the Max-Utility solver and changes only the score:
//!
//! | scheme     | BS option score         | D2D option score      |
//! |------------|-------------------------|-----------------------|
//! | Max-Rate   | `r_nsk`                 | `r_{n_k 3 k}`         |
//! | Max-SINR   | `SINR_nsk`              | `SINR_{n_k 3 k}`      |
//! | Rate Bias  | `r_nsk · exp(-μ*_ns)`   | `r_{n_k 3 k}`         |
//! | SINR Bias  | `SINR_nsk / p_ns`       | `SINR / p_{n_k 3}`    |

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::assoc::{select_link, Assignment, Prices};
use crate::phy::{PowerAllocation, RateTable};
use crate::roster::Link;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum SchemeId {
    MaxUtility,
    MaxRate,
    MaxSinr,
    RateBias,
    SinrBias,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::MaxUtility,
        SchemeId::MaxRate,
        SchemeId::MaxSinr,
        SchemeId::RateBias,
        SchemeId::SinrBias,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::MaxUtility => "MAX_UTILITY",
            SchemeId::MaxRate => "MAX_RATE",
            SchemeId::MaxSinr => "MAX_SINR",
            SchemeId::RateBias => "RATE_BIAS",
            SchemeId::SinrBias => "SINR_BIAS",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    /// Accepts `MAX_UTILITY`, `max_utility` and `max-utility` spellings.
    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| {
                let name = id.as_str();
                name.len() == s.len()
                    && name.bytes().zip(s.bytes()).all(|(a, b)| {
                        a.eq_ignore_ascii_case(&b) || (a == b'_' && b == b'-')
                    })
            })
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown scheme {s:?}")))
    }
}

fn assign_each<F>(rates: &RateTable, mut choose: F) -> Result<Assignment>
where
    F: FnMut(usize) -> Result<(Link, f64)>,
{
    (0..rates.n_rx())
        .map(|k| choose(k).map(|(l, _)| l))
        .collect::<Result<Vec<_>>>()
        .map(Assignment)
}

pub fn assoc_max_rate(rates: &RateTable) -> Result<Assignment> {
    assign_each(rates, |k| {
        select_link(rates, k, |l| Some(rates.rate(l, k)), |l| rates.rate(l, k))
    })
}

/// Bandwidth-blind: compares SINRs across subbands of different widths.
pub fn assoc_max_sinr(rates: &RateTable) -> Result<Assignment> {
    assign_each(rates, |k| {
        select_link(rates, k, |l| Some(rates.sinr(l, k)), |l| rates.sinr(l, k))
    })
}

/// Max-Rate with every BS rate discounted by `exp(-μ*)` of its priced pair.
pub fn assoc_rate_bias(rates: &RateTable, mu_star: &Prices) -> Result<Assignment> {
    let roster = rates.roster();
    mu_star.check(roster)?;
    assign_each(rates, |k| {
        select_link(
            rates,
            k,
            |l| {
                let mu = mu_star.get(roster, l)?;
                Some(rates.rate(l, k) * libm::exp(-mu))
            },
            |l| rates.rate(l, k),
        )
    })
}

/// SINR per milliwatt of transmit power; options with zero power are skipped.
pub fn assoc_sinr_bias(rates: &RateTable, power: &PowerAllocation) -> Result<Assignment> {
    if power.roster() != rates.roster() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "power roster {:?} vs rate roster {:?}",
            power.roster(),
            rates.roster()
        )));
    }
    let per_mw = |l: Link, k: usize| {
        let p = power.power(l.tx, l.subband);
        (p > 0.0).then(|| rates.sinr(l, k) / p)
    };
    assign_each(rates, |k| {
        select_link(rates, k, |l| per_mw(l, k), |l| per_mw(l, k).unwrap_or(f64::NEG_INFINITY))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::user_choice;
    use crate::phy::{allocate_power, RadioConfig, Subband};
    use crate::roster::Roster;
    use alloc::vec;

    /// Table whose rates and SINRs come from per-link closures.
    fn table(roster: Roster, f: impl FnMut(Link, usize) -> (f64, f64)) -> RateTable {
        RateTable::from_fn(roster, (0..roster.pairs).collect(), 1e-20, f).unwrap()
    }

    #[test]
    fn scheme_names_parse() {
        for id in SchemeId::ALL {
            assert_eq!(id.as_str().parse::<SchemeId>().unwrap(), id);
        }
        assert_eq!("max-sinr".parse::<SchemeId>().unwrap(), SchemeId::MaxSinr);
        assert_eq!("rate_bias".parse::<SchemeId>().unwrap(), SchemeId::RateBias);
        assert!("max rate".parse::<SchemeId>().is_err());
    }

    #[test]
    fn single_option_everywhere() {
        let roster = Roster::new(1, 0, 1, 0);
        let t = table(roster, |_, _| (3.0, 2e6));
        let only = vec![Link::new(0, Subband::One)];
        let power = allocate_power(&roster, &RadioConfig::default());
        assert_eq!(assoc_max_rate(&t).unwrap().0, only);
        assert_eq!(assoc_max_sinr(&t).unwrap().0, only);
        assert_eq!(assoc_sinr_bias(&t, &power).unwrap().0, only);
        assert_eq!(assoc_rate_bias(&t, &Prices::uniform(&roster, 0.0)).unwrap().0, only);
    }

    #[test]
    fn max_rate_prefers_higher_rate() {
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |l, _| match (l.tx, l.subband) {
            (0, _) => (10.0, 10e6),
            (1, Subband::Two) => (50.0, 2e6),
            _ => (1.0, 1e6),
        });
        assert_eq!(assoc_max_rate(&t).unwrap().0, [Link::new(0, Subband::One)]);
    }

    #[test]
    fn max_rate_d2d_mode_when_link_wins() {
        let roster = Roster::new(1, 0, 0, 1);
        let t = table(roster, |l, _| if l.subband == Subband::Three { (5.0, 1.5e6) } else { (2.0, 1e6) });
        let x = assoc_max_rate(&t).unwrap();
        assert_eq!(x.0[roster.d2d_rx(0)], Link::new(roster.d2d_tx(0), Subband::Three));
        assert_eq!(x.0[roster.d2d_tx_as_rx(0)], Link::new(0, Subband::One));
    }

    #[test]
    fn max_sinr_ties_pick_subband_one() {
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |l, _| if l.tx == 1 { (8.0, 1e6) } else { (2.0, 1e6) });
        assert_eq!(assoc_max_sinr(&t).unwrap().0, [Link::new(1, Subband::One)]);
    }

    #[test]
    fn max_sinr_is_bandwidth_blind() {
        // 20 dB from the MBS on a wide subband, 23 dB from the PBS on a narrow one.
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |l, _| match (l.tx, l.subband) {
            (0, _) => (100.0, 8e6 * libm::log2(101.0)),
            (1, Subband::Two) => (199.5, 1e6 * libm::log2(200.5)),
            _ => (0.5, 1e5),
        });
        assert_eq!(assoc_max_sinr(&t).unwrap().0, [Link::new(1, Subband::Two)]);
        assert_eq!(assoc_max_rate(&t).unwrap().0, [Link::new(0, Subband::One)]);
    }

    #[test]
    fn zero_prices_make_rate_bias_max_rate() {
        let roster = Roster::new(2, 3, 6, 3);
        let mut v = 1.0;
        let t = table(roster, |_, _| {
            v = (v * 7.31) % 97.0 + 1.0;
            (v, v * 1e5)
        });
        let mu = Prices::uniform(&roster, 0.0);
        assert_eq!(assoc_rate_bias(&t, &mu).unwrap(), assoc_max_rate(&t).unwrap());
    }

    #[test]
    fn rate_bias_matches_user_choice() {
        let roster = Roster::new(2, 3, 6, 3);
        let mut v = 3.0;
        let t = table(roster, |_, _| {
            v = (v * 13.7) % 89.0 + 1.0;
            (v, v * 3e4)
        });
        let mu = Prices((0..roster.n_priced()).map(|i| 0.3 * i as f64 - 0.5).collect());
        let x = assoc_rate_bias(&t, &mu).unwrap();
        for k in 0..roster.n_rx() {
            assert_eq!(x.0[k], user_choice(k, &t, &mu).unwrap());
        }
    }

    #[test]
    fn heavy_price_pushes_users_off_the_mbs() {
        let roster = Roster::new(1, 1, 4, 0);
        let t = table(roster, |l, _| if l.tx == 0 { (50.0, 20e6) } else { (2.0, 1e6) });
        let mut mu = Prices::uniform(&roster, 0.0);
        assert!(assoc_rate_bias(&t, &mu).unwrap().0.iter().all(|l| l.tx == 0));
        mu.0[0] = 10.0;
        assert!(assoc_rate_bias(&t, &mu).unwrap().0.iter().all(|l| l.tx == 1));
    }

    #[test]
    fn rate_bias_needs_every_price() {
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |_, _| (1.0, 1e6));
        assert_eq!(
            assoc_rate_bias(&t, &Prices(vec![0.0])),
            Err(Error::MissingPrices { expected: 3, found: 1 })
        );
    }

    #[test]
    fn sinr_bias_favours_low_power_nodes() {
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |_, _| (10.0, 1e6));
        let power = allocate_power(&roster, &RadioConfig::default());
        assert_eq!(assoc_sinr_bias(&t, &power).unwrap().0, [Link::new(1, Subband::One)]);
    }

    #[test]
    fn sinr_bias_skips_unpowered_options() {
        let roster = Roster::new(1, 1, 1, 0);
        let t = table(roster, |l, _| if l.subband == Subband::Two { (1e9, 1e6) } else { (1.0, 1e6) });
        let power = PowerAllocation::from_values(roster, vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        let x = assoc_sinr_bias(&t, &power).unwrap();
        assert_ne!(x.0[0].subband, Subband::Two);
    }
}
