//! Index spaces for transmitters, receivers and priced (BS, subband) pairs.
//!
//! Transmitters are numbered MBSs first, then PBSs, then D2D TXs. Receivers
//! are numbered cellular users first, then D2D TXs (as receivers of base
//! stations), then D2D RXs. A D2D TX therefore owns one index in each space.
//!
//! Priced pairs are the (BS, subband) combinations that carry a multiplier:
//! subband 1 of every MBS and PBS, followed by subband 2 of every PBS.

use core::fmt;

use crate::phy::Subband;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Roster {
    pub mbs: usize,
    pub pbs: usize,
    pub cellular: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TxRole {
    Mbs,
    Pbs,
    D2dTx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RxRole {
    Cellular,
    D2dTx,
    D2dRx,
}

impl RxRole {
    pub fn as_str(self) -> &'static str {
        match self {
            RxRole::Cellular => "cellular",
            RxRole::D2dTx => "d2d_tx",
            RxRole::D2dRx => "d2d_rx",
        }
    }
}

impl fmt::Display for RxRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A transmitter resolved to its role and its position inside that role's list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxNode {
    pub role: TxRole,
    pub ordinal: usize,
}

/// A receiver resolved to its role and its position inside that role's list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RxNode {
    pub role: RxRole,
    pub ordinal: usize,
}

/// One association option: subband `subband` of transmitter `tx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Link {
    pub tx: usize,
    pub subband: Subband,
}

impl Link {
    pub fn new(tx: usize, subband: Subband) -> Self {
        Link { tx, subband }
    }
}

impl Roster {
    pub fn new(mbs: usize, pbs: usize, cellular: usize, pairs: usize) -> Self {
        Roster {
            mbs,
            pbs,
            cellular,
            pairs,
        }
    }

    pub fn n_bs(&self) -> usize {
        self.mbs + self.pbs
    }

    pub fn n_tx(&self) -> usize {
        self.mbs + self.pbs + self.pairs
    }

    pub fn n_rx(&self) -> usize {
        self.cellular + 2 * self.pairs
    }

    /// Number of multipliers: one per MBS/PBS on subband 1, one per PBS on subband 2.
    pub fn n_priced(&self) -> usize {
        self.n_bs() + self.pbs
    }

    pub fn transmitter(&self, n: usize) -> TxNode {
        debug_assert!(n < self.n_tx());
        if n < self.mbs {
            TxNode {
                role: TxRole::Mbs,
                ordinal: n,
            }
        } else if n < self.n_bs() {
            TxNode {
                role: TxRole::Pbs,
                ordinal: n - self.mbs,
            }
        } else {
            TxNode {
                role: TxRole::D2dTx,
                ordinal: n - self.n_bs(),
            }
        }
    }

    pub fn receiver(&self, k: usize) -> RxNode {
        debug_assert!(k < self.n_rx());
        if k < self.cellular {
            RxNode {
                role: RxRole::Cellular,
                ordinal: k,
            }
        } else if k < self.cellular + self.pairs {
            RxNode {
                role: RxRole::D2dTx,
                ordinal: k - self.cellular,
            }
        } else {
            RxNode {
                role: RxRole::D2dRx,
                ordinal: k - self.cellular - self.pairs,
            }
        }
    }

    pub fn tx_role(&self, n: usize) -> TxRole {
        self.transmitter(n).role
    }

    pub fn rx_role(&self, k: usize) -> RxRole {
        self.receiver(k).role
    }

    pub fn is_bs(&self, n: usize) -> bool {
        n < self.n_bs()
    }

    pub fn is_pbs(&self, n: usize) -> bool {
        n >= self.mbs && n < self.n_bs()
    }

    /// Transmitter index of D2D TX number `ordinal`.
    pub fn d2d_tx(&self, ordinal: usize) -> usize {
        self.n_bs() + ordinal
    }

    /// Receiver index of D2D TX number `ordinal` acting as a receiver of base stations.
    pub fn d2d_tx_as_rx(&self, ordinal: usize) -> usize {
        self.cellular + ordinal
    }

    /// Receiver index of D2D RX number `ordinal`.
    pub fn d2d_rx(&self, ordinal: usize) -> usize {
        self.cellular + self.pairs + ordinal
    }

    /// Multiplier slot of (`n`, `subband`), if that pair is priced.
    pub fn priced_slot(&self, n: usize, subband: Subband) -> Option<usize> {
        match subband {
            Subband::One if self.is_bs(n) => Some(n),
            Subband::Two if self.is_pbs(n) => Some(self.n_bs() + n - self.mbs),
            _ => None,
        }
    }

    /// Inverse of [`Roster::priced_slot`].
    pub fn priced_link(&self, slot: usize) -> Link {
        debug_assert!(slot < self.n_priced());
        if slot < self.n_bs() {
            Link::new(slot, Subband::One)
        } else {
            Link::new(slot - self.n_bs() + self.mbs, Subband::Two)
        }
    }

    /// Base-station options in tie-break order: lowest transmitter first, then lowest subband.
    pub fn bs_options(&self) -> impl Iterator<Item = Link> + '_ {
        (0..self.n_bs()).flat_map(move |n| {
            let second = self.is_pbs(n).then_some(Link::new(n, Subband::Two));
            core::iter::once(Link::new(n, Subband::One)).chain(second)
        })
    }
}
