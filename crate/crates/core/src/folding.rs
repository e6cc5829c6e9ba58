//! Folding of exchange matrices along admissible automorphisms, and
//! bounded verification of stability along orbit sequences.

use crate::error::{Error, Result};
use crate::exchange::{ExchangeMatrix, MutationSequence};
use crate::matrix::IntMat;
use num_traits::Zero;

/// A permutation of the indices together with its orbit partition.
/// Orbits are sorted internally and listed by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldingAutomorphism {
    perm: Vec<usize>,
    orbits: Vec<Vec<usize>>,
}

impl FoldingAutomorphism {
    /// `perm[i]` is the 0-based image of index i.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Parse("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let mut orbit = vec![start];
            orbit_of[start] = orbits.len();
            let mut cur = perm[start];
            while cur != start {
                orbit_of[cur] = orbits.len();
                orbit.push(cur);
                cur = perm[cur];
            }
            orbit.sort();
            orbits.push(orbit);
        }
        orbits.sort_by_key(|o| o[0]);
        Ok(FoldingAutomorphism { perm, orbits })
    }

    /// From 1-based images, e.g. "3 2 1" for the transposition (1 3).
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let perm: Vec<usize> = images
            .iter()
            .map(|&x| x.checked_sub(1).ok_or(Error::Parse("1-based index 0".into())))
            .collect::<Result<_>>()?;
        FoldingAutomorphism::new(perm)
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbits
            .iter()
            .position(|o| o.contains(&i))
            .expect("index in range")
    }

    /// Admissibility on B: b_ij = 0 within orbits; the weak sign of b_ij
    /// depends only on the orbit pair. Returns the violating pair if any.
    pub fn check_admissible(&self, b: &ExchangeMatrix) -> Result<()> {
        let n = self.n();
        if b.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.n(),
            });
        }
        for orbit in &self.orbits {
            for &i in orbit {
                for &j in orbit {
                    if !b.entry(i, j).is_zero() {
                        return Err(Error::NotAdmissible { i: i + 1, j: j + 1 });
                    }
                }
            }
        }
        for oi in &self.orbits {
            for oj in &self.orbits {
                if oi == oj {
                    continue;
                }
                let mut sign: Option<i32> = None;
                for &i in oi {
                    for &j in oj {
                        let s = b.mat().entry_sign(i, j);
                        if s == 0 {
                            continue;
                        }
                        match sign {
                            None => sign = Some(s),
                            Some(old) if old != s => {
                                return Err(Error::NotAdmissible { i: i + 1, j: j + 1 })
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, b: &ExchangeMatrix) -> bool {
        self.check_admissible(b).is_ok()
    }
}

/// Folded exchange matrix π_σ(B), indexed by orbits in smallest-member
/// order: entry (ī, j̄) is Σ_{i′∈ī} b_{i′ j′} for any fixed j′ ∈ j̄.
pub fn fold(b: &ExchangeMatrix, sigma: &FoldingAutomorphism) -> Result<ExchangeMatrix> {
    sigma.check_admissible(b)?;
    let orbits = sigma.orbits();
    let m = orbits.len();
    let mut out = IntMat::zeros(m, m);
    for (a, oi) in orbits.iter().enumerate() {
        for (c, oj) in orbits.iter().enumerate() {
            if a == c {
                continue;
            }
            let j = oj[0];
            out[(a, c)] = oi.iter().map(|&i| b.entry(i, j).clone()).sum();
        }
    }
    ExchangeMatrix::new(out).map_err(|_| Error::Internal("fold produced invalid matrix".into()))
}

/// Expands an orbit-index sequence into the underlying index sequence
/// (members of each orbit in ascending order; they commute under
/// admissibility, so the order within an orbit is immaterial).
pub fn expand_orbit_sequence(
    sigma: &FoldingAutomorphism,
    orbit_seq: &[usize],
) -> MutationSequence {
    let mut out = Vec::new();
    for &o in orbit_seq {
        out.extend(sigma.orbits()[o].iter().copied());
    }
    MutationSequence::from_zero_based(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityCheck {
    /// Admissibility verified along every orbit sequence of expanded
    /// length at most `depth`.
    Verified { depth: usize },
    /// An orbit sequence (as orbit indices) leading to a violation.
    CounterexamplePath { orbit_seq: Vec<usize> },
}

/// Bounded stability verification: explores all orbit sequences whose
/// expanded length stays within `depth`, checking admissibility of σ for
/// every matrix reached.
pub fn check_stable(
    b: &ExchangeMatrix,
    sigma: &FoldingAutomorphism,
    depth: usize,
) -> Result<StabilityCheck> {
    sigma.check_admissible(b)?;
    let mut stack: Vec<(ExchangeMatrix, Vec<usize>, usize)> = vec![(b.clone(), vec![], 0)];
    let mut seen = std::collections::HashSet::new();
    seen.insert(b.mat().clone());
    while let Some((cur, orbit_seq, used)) = stack.pop() {
        for (o, orbit) in sigma.orbits().iter().enumerate() {
            let cost = orbit.len();
            if used + cost > depth {
                continue;
            }
            let mut next = cur.clone();
            for &k in orbit {
                next = next.mutate(k)?;
            }
            let mut seq = orbit_seq.clone();
            seq.push(o);
            if !sigma.is_admissible(&next) {
                return Ok(StabilityCheck::CounterexamplePath { orbit_seq: seq });
            }
            if seen.insert(next.mat().clone()) {
                stack.push((next, seq, used + cost));
            }
        }
    }
    Ok(StabilityCheck::Verified { depth })
}
