//! Dependence neighbourhoods of equilibrium indicators.
//!
//! Whether profile `j` is an equilibrium is independent of whether profile
//! `0` is unless some player sees the same neighbour configuration in both,
//! i.e. all of its neighbours play 0 in `j`. The set of such `j` is `B_0`,
//! and the neighbourhood of any other profile `i` is the translate `i ^ B_0`.

use super::ENUMERATION_MAX_VERTICES;
use crate::error::{Error, Result};
use crate::game::Profile;
use crate::graph::Graph;

/// A set of profiles on `n <= 30` players, stored as a `2^n`-bit bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSet {
    n: usize,
    words: Vec<u64>,
}

impl ProfileSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n > ENUMERATION_MAX_VERTICES {
            return Err(Error::size_limit("profile set players", ENUMERATION_MAX_VERTICES, n));
        }
        Ok(ProfileSet { n, words: vec![0; (1usize << n).div_ceil(64)] })
    }

    pub fn from_profiles(n: usize, profiles: impl IntoIterator<Item = Profile>) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for p in profiles {
            set.insert(p);
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, p: Profile) {
        let i = p.0 as usize;
        assert!(i < 1 << self.n, "profile outside 2^n");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, p: Profile) -> bool {
        let i = p.0 as usize;
        i < 1 << self.n && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(Profile(wi as u64 * 64 + b))
            })
        })
    }
}

/// `j` is in `B_0` iff some player has every neighbour playing 0 in `j`.
/// `masks[k]` is player `k`'s neighbour bitmask. A player without
/// neighbours satisfies this vacuously.
#[inline]
pub fn in_b0(masks: &[u64], j: Profile) -> bool {
    masks.iter().any(|&m| j.0 & m == 0)
}

pub fn dependence_neighborhood_b0(g: &Graph) -> Result<ProfileSet> {
    let n = g.n();
    let mut set = ProfileSet::empty(n)?;
    let masks: Vec<u64> = (0..n).map(|v| g.neighbor_mask(v)).collect();
    for j in 0..1u64 << n {
        if in_b0(&masks, Profile(j)) {
            set.insert(Profile(j));
        }
    }
    Ok(set)
}

/// `{ i ^ j : j in b0 }`.
pub fn translate_b(i: Profile, b0: &ProfileSet) -> ProfileSet {
    assert!(i.0 < 1 << b0.n, "translation outside 2^n");
    let mut out = ProfileSet { n: b0.n, words: vec![0; b0.words.len()] };
    for j in b0.iter() {
        out.insert(i.xor(j));
    }
    out
}
