//! Occupation-number bases for fixed particle-number sectors.
//!
//! Modes are numbered globally in Jordan-Wigner order. For spinful bases the
//! spin-up modes on sites `0..L` come first, followed by the spin-down modes on
//! sites `0..L`, so mode `j` is `(j, up)` and mode `L + j` is `(j, down)`.
//! A basis state is stored as a bit word with bit `j` set when site `j` is
//! occupied.

use crate::error::{Error, Result};

/// Largest spinful site count accepted by [`SectorBasis::new`].
pub const MAX_SITES: usize = 12;
/// Largest mode count accepted by [`SpinlessBasis::new`].
pub const MAX_MODES: usize = 24;
/// Largest Hilbert-space dimension handed to the dense builders.
pub const MAX_DIMENSION: usize = 5000;

/// Common view of a number-conserving Fock basis used by the operator
/// builders and the partial trace.
pub trait FockBasis {
    fn n_sites(&self) -> usize;
    fn n_modes(&self) -> usize;
    fn dimension(&self) -> usize;
    /// Occupation word of state `i` over all modes in Jordan-Wigner order.
    fn mode_word(&self, i: usize) -> u64;
    /// Inverse of [`FockBasis::mode_word`].
    fn index_of_mode_word(&self, word: u64) -> Option<usize>;
    /// Mode indices living on `site`.
    fn site_modes(&self, site: usize) -> Vec<usize>;
    fn n_particles(&self) -> usize;
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// All `bits`-wide words with exactly `count` set bits, ascending.
fn words_with_popcount(bits: usize, count: usize) -> Vec<u32> {
    (0u32..(1u32 << bits))
        .filter(|w| w.count_ones() as usize == count)
        .collect()
}

/// Spinful basis of the `(n_up, n_down)` sector on `L` sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    n_down: usize,
    states: Vec<(u32, u32)>,
}

impl SectorBasis {
    pub fn new(sites: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::domain(format!(
                "site count {sites} outside 1..={MAX_SITES}"
            )));
        }
        if n_up > sites || n_down > sites {
            return Err(Error::domain(format!(
                "particle counts ({n_up}, {n_down}) exceed {sites} sites"
            )));
        }
        let dim = binomial(sites, n_up)
            .and_then(|a| binomial(sites, n_down).and_then(|b| a.checked_mul(b)))
            .ok_or_else(|| Error::Capacity("sector dimension overflows".into()))?;
        if dim > MAX_DIMENSION {
            return Err(Error::Capacity(format!(
                "sector dimension {dim} exceeds {MAX_DIMENSION}"
            )));
        }
        let ups = words_with_popcount(sites, n_up);
        let downs = words_with_popcount(sites, n_down);
        let mut states = Vec::with_capacity(dim);
        for &u in &ups {
            for &d in &downs {
                states.push((u, d));
            }
        }
        Ok(SectorBasis {
            sites,
            n_up,
            n_down,
            states,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    pub fn index_of(&self, up: u32, down: u32) -> Option<usize> {
        self.states.binary_search(&(up, down)).ok()
    }
}

impl FockBasis for SectorBasis {
    fn n_sites(&self) -> usize {
        self.sites
    }

    fn n_modes(&self) -> usize {
        2 * self.sites
    }

    fn dimension(&self) -> usize {
        self.states.len()
    }

    fn mode_word(&self, i: usize) -> u64 {
        let (u, d) = self.states[i];
        u as u64 | ((d as u64) << self.sites)
    }

    fn index_of_mode_word(&self, word: u64) -> Option<usize> {
        let mask = (1u64 << self.sites) - 1;
        if word >> (2 * self.sites) != 0 {
            return None;
        }
        self.index_of((word & mask) as u32, (word >> self.sites) as u32)
    }

    fn site_modes(&self, site: usize) -> Vec<usize> {
        vec![site, self.sites + site]
    }

    fn n_particles(&self) -> usize {
        self.n_up + self.n_down
    }
}

/// Basis of `n` spinless fermions on `M` modes; one mode per site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinlessBasis {
    modes: usize,
    n: usize,
    states: Vec<u32>,
}

impl SpinlessBasis {
    pub fn new(modes: usize, n: usize) -> Result<Self> {
        if modes > MAX_MODES || n > modes {
            return Err(Error::domain(format!(
                "need 0 <= n <= M <= {MAX_MODES}, got n = {n}, M = {modes}"
            )));
        }
        let dim = binomial(modes, n).unwrap_or(usize::MAX);
        if dim > MAX_DIMENSION {
            return Err(Error::Capacity(format!(
                "dimension {dim} exceeds {MAX_DIMENSION}"
            )));
        }
        Ok(SpinlessBasis {
            modes,
            n,
            states: words_with_popcount(modes, n),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn index_of(&self, word: u32) -> Option<usize> {
        self.states.binary_search(&word).ok()
    }
}

impl FockBasis for SpinlessBasis {
    fn n_sites(&self) -> usize {
        self.modes
    }

    fn n_modes(&self) -> usize {
        self.modes
    }

    fn dimension(&self) -> usize {
        self.states.len()
    }

    fn mode_word(&self, i: usize) -> u64 {
        self.states[i] as u64
    }

    fn index_of_mode_word(&self, word: u64) -> Option<usize> {
        u32::try_from(word).ok().and_then(|w| self.index_of(w))
    }

    fn site_modes(&self, site: usize) -> Vec<usize> {
        vec![site]
    }

    fn n_particles(&self) -> usize {
        self.n
    }
}

/// Applies `c†_to c_from` to an occupation word.
///
/// Returns the new word and the Jordan-Wigner sign, or `None` when the
/// result vanishes.
pub fn hop(word: u64, from: usize, to: usize) -> Option<(u64, f64)> {
    if word & (1 << from) == 0 {
        return None;
    }
    if from == to {
        return Some((word, 1.0));
    }
    if word & (1 << to) != 0 {
        return None;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    // modes strictly between lo and hi
    let between = word & (((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1));
    let sign = if between.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some(((word & !(1 << from)) | (1 << to), sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimer_half_filling_has_four_states() {
        let b = SectorBasis::new(2, 1, 1).unwrap();
        assert_eq!(b.dimension(), 4);
        // |ud,0>, |u,d>, |d,u>, |0,ud> as (up word, down word)
        let mut want = vec![(0b01, 0b01), (0b01, 0b10), (0b10, 0b01), (0b10, 0b10)];
        want.sort();
        assert_eq!(b.states(), want.as_slice());
    }

    #[test]
    fn empty_sector_is_vacuum() {
        let b = SectorBasis::new(2, 0, 0).unwrap();
        assert_eq!(b.dimension(), 1);
        assert_eq!(b.states(), &[(0, 0)]);
    }

    #[test]
    fn four_site_half_filling_dimension() {
        let b = SectorBasis::new(4, 2, 2).unwrap();
        // enumerate every pair of 4-bit words independently
        let mut count = 0;
        for u in 0u32..16 {
            for d in 0u32..16 {
                if u.count_ones() == 2 && d.count_ones() == 2 {
                    count += 1;
                }
            }
        }
        assert_eq!(b.dimension(), count);
        assert_eq!(count, 36);
    }

    #[test]
    fn spinless_dimensions() {
        assert_eq!(SpinlessBasis::new(4, 2).unwrap().dimension(), 6);
        assert_eq!(SpinlessBasis::new(2, 0).unwrap().dimension(), 1);
        let full = SpinlessBasis::new(3, 3).unwrap();
        assert_eq!(full.states(), &[0b111]);
    }

    #[test]
    fn out_of_range_counts_are_rejected() {
        assert!(matches!(SectorBasis::new(2, 3, 0), Err(Error::Domain(_))));
        assert!(matches!(SectorBasis::new(13, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(SectorBasis::new(0, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(SpinlessBasis::new(3, 4), Err(Error::Domain(_))));
        assert!(matches!(SpinlessBasis::new(25, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn oversized_sector_is_a_capacity_error() {
        assert!(matches!(
            SectorBasis::new(12, 6, 6),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn hop_sign_counts_modes_in_between() {
        // modes 0 and 3 occupied, move 0 -> 2: mode 1 empty, no sign
        assert_eq!(hop(0b1001, 0, 2), Some((0b1100, 1.0)));
        // modes 0,1 occupied, move 0 -> 2 crosses mode 1
        assert_eq!(hop(0b0011, 0, 2), Some((0b0110, -1.0)));
        assert_eq!(hop(0b0011, 0, 1), None);
        assert_eq!(hop(0b0010, 0, 1), None);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(12, 6), Some(924));
        assert_eq!(binomial(3, 5), Some(0));
    }
}
