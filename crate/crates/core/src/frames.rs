//! C- and G-matrices along mutation sequences, sign-coherence checks,
//! g-vector cones, and search for maximal green / red sequences.
//!
//! C-matrices are computed by extended mutation of B stacked over the
//! identity; G-matrices come from the inverse-transpose relation with the
//! companion C-matrices for −Bᵀ.

use crate::error::{Error, Result};
use crate::exchange::{mutate_raw, ExchangeMatrix, MutationSequence};
use crate::matrix::IntMat;
use crate::num::Q;
use crate::polyhedra::PointedCone;
use num_traits::{Signed, Zero};
use std::collections::HashSet;
use std::collections::VecDeque;

pub const DEFAULT_SEARCH_CAP: usize = 100_000;

/// Snapshot after applying a prefix of a mutation sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub seq: MutationSequence,
    pub c: IntMat,
    pub g: IntMat,
    pub b_t: ExchangeMatrix,
}

/// Internal state: B stacked over C, for B and for the companion −Bᵀ.
#[derive(Clone, PartialEq, Eq, Hash)]
struct FrameState {
    stack: IntMat,     // 2n×n: [B_t; C_t]
    costack: IntMat,   // 2n×n: [(−Bᵀ)_t; C'_t]
}

impl FrameState {
    fn initial(b: &ExchangeMatrix) -> Self {
        let ident = IntMat::identity(b.n());
        FrameState {
            stack: b.mat().stack(&ident),
            costack: b.neg_transpose().mat().stack(&ident),
        }
    }

    fn n(&self) -> usize {
        self.stack.cols()
    }

    fn mutate(&self, k: usize) -> FrameState {
        FrameState {
            stack: mutate_raw(&self.stack, k),
            costack: mutate_raw(&self.costack, k),
        }
    }

    fn b_t(&self) -> ExchangeMatrix {
        let n = self.n();
        let idx: Vec<usize> = (0..n).collect();
        ExchangeMatrix::new(self.stack.submatrix(&idx, &idx)).expect("mutation preserves validity")
    }

    fn c(&self) -> IntMat {
        let n = self.n();
        self.stack
            .submatrix(&(n..2 * n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
    }

    fn c_companion(&self) -> IntMat {
        let n = self.n();
        self.costack
            .submatrix(&(n..2 * n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
    }

    fn g(&self) -> IntMat {
        self.c_companion()
            .transpose()
            .unimodular_inverse()
            .expect("C-matrices are unimodular")
    }

    fn frame(&self, seq: MutationSequence) -> Frame {
        Frame {
            seq,
            c: self.c(),
            g: self.g(),
            b_t: self.b_t(),
        }
    }
}

/// Sign of a sign-coherent column: +1 if the nonzero entries are positive,
/// −1 if negative, None if mixed or zero.
fn column_sign(m: &IntMat, j: usize) -> Option<i32> {
    let mut sign = 0;
    for i in 0..m.rows() {
        let s = m.entry_sign(i, j);
        if s == 0 {
            continue;
        }
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return None;
        }
    }
    if sign == 0 {
        None
    } else {
        Some(sign)
    }
}

pub fn c_column_sign(c: &IntMat, j: usize) -> Option<i32> {
    column_sign(c, j)
}

pub fn g_row_sign(g: &IntMat, i: usize) -> Option<i32> {
    column_sign(&g.transpose(), i)
}

/// Frames after each prefix of `seq`, starting with the identity frame.
pub fn frame_along(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<Vec<Frame>> {
    let mut state = FrameState::initial(b);
    let mut out = vec![state.frame(MutationSequence::empty())];
    let mut prefix = Vec::new();
    for k in seq.iter() {
        if k >= b.n() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                n: b.n(),
            });
        }
        state = state.mutate(k);
        prefix.push(k);
        out.push(state.frame(MutationSequence::from_zero_based(prefix.iter().copied())));
    }
    Ok(out)
}

/// Green: at every step the mutated column of the C-matrix is positive.
pub fn is_green(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<bool> {
    let mut state = FrameState::initial(b);
    for k in seq.iter() {
        if k >= b.n() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                n: b.n(),
            });
        }
        if column_sign(&state.c(), k) != Some(1) {
            return Ok(false);
        }
        state = state.mutate(k);
    }
    Ok(true)
}

/// Red: green for −B.
pub fn is_red(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<bool> {
    is_green(&b.neg(), seq)
}

fn all_columns_negative(c: &IntMat) -> bool {
    (0..c.cols()).all(|j| column_sign(c, j) == Some(-1))
}

pub fn is_maximal_green(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<bool> {
    if !is_green(b, seq)? {
        return Ok(false);
    }
    let frames = frame_along(b, seq)?;
    Ok(all_columns_negative(&frames.last().unwrap().c))
}

pub fn is_maximal_red(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<bool> {
    is_maximal_green(&b.neg(), seq)
}

/// Breadth-first search for a maximal green sequence over green-admissible
/// moves, expanding indices in increasing order: returns the
/// lexicographically least sequence of minimal length. Complete for any
/// pattern admitting one (depth-first would not be: affine patterns have
/// infinite green rays). Returns `None` when the budget is exhausted.
pub fn find_maximal_green(b: &ExchangeMatrix, cap: usize) -> Result<Option<MutationSequence>> {
    let mut visited: HashSet<IntMat> = HashSet::new();
    let mut queue: VecDeque<(FrameState, Vec<usize>)> = VecDeque::new();
    let init = FrameState::initial(b);
    visited.insert(init.stack.clone());
    queue.push_back((init, vec![]));
    let mut budget = cap;
    while let Some((state, path)) = queue.pop_front() {
        if budget == 0 {
            return Ok(None);
        }
        budget -= 1;
        let c = state.c();
        if all_columns_negative(&c) {
            return Ok(Some(MutationSequence::from_zero_based(path)));
        }
        for k in 0..state.n() {
            if column_sign(&c, k) == Some(1) {
                let next = state.mutate(k);
                if visited.insert(next.stack.clone()) {
                    let mut p = path.clone();
                    p.push(k);
                    queue.push_back((next, p));
                }
            }
        }
    }
    Ok(None)
}

pub fn find_maximal_red(b: &ExchangeMatrix, cap: usize) -> Result<Option<MutationSequence>> {
    find_maximal_green(&b.neg(), cap)
}

/// The g-vector cone at the end of `seq`: nonnegative span of G's columns.
pub fn gvector_cone(b: &ExchangeMatrix, seq: &MutationSequence) -> Result<PointedCone> {
    let frames = frame_along(b, seq)?;
    let g = &frames.last().unwrap().g;
    let n = b.n();
    Ok(PointedCone::new(
        vec![Q::zero(); n],
        (0..n).map(|j| crate::num::qvec_of_ints(&g.col(j))).collect(),
    ))
}

/// All distinct frames reachable from the initial seed, BFS order, up to
/// `cap` states. Complete for finite-type patterns.
pub fn enumerate_frames(b: &ExchangeMatrix, cap: usize) -> Result<(Vec<Frame>, bool)> {
    let mut visited: HashSet<FrameState> = HashSet::new();
    let mut queue: VecDeque<(FrameState, Vec<usize>)> = VecDeque::new();
    let init = FrameState::initial(b);
    visited.insert(init.clone());
    queue.push_back((init, vec![]));
    let mut out = Vec::new();
    let mut complete = true;
    while let Some((state, path)) = queue.pop_front() {
        out.push(state.frame(MutationSequence::from_zero_based(path.iter().copied())));
        if visited.len() >= cap {
            complete = queue.is_empty();
            continue;
        }
        for k in 0..state.n() {
            let next = state.mutate(k);
            if visited.insert(next.clone()) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((next, p));
            }
        }
    }
    Ok((out, complete))
}

/// Locating a vector in the g-vector fan by BFS over frames.
#[derive(Clone, Debug)]
pub enum Locate {
    /// A frame whose cone contains the vector (coefficients included).
    Found(Frame, Vec<Q>),
    /// Budget exhausted; for complete fans this cannot happen.
    Exhausted { explored: usize },
    /// The whole (finite) pattern was enumerated and no cone contains it.
    NotInFan { explored: usize },
}

pub fn locate_in_g_fan(b: &ExchangeMatrix, x: &[Q], cap: usize) -> Result<Locate> {
    if x.len() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            got: x.len(),
        });
    }
    let mut visited: HashSet<FrameState> = HashSet::new();
    let mut queue: VecDeque<(FrameState, Vec<usize>)> = VecDeque::new();
    let init = FrameState::initial(b);
    visited.insert(init.clone());
    queue.push_back((init, vec![]));
    let mut explored = 0;
    while let Some((state, path)) = queue.pop_front() {
        explored += 1;
        let g = state.g();
        let ginv = g.unimodular_inverse()?;
        let coeffs = ginv.mul_vec_q(x);
        if coeffs.iter().all(|c| !c.is_negative()) {
            let frame = state.frame(MutationSequence::from_zero_based(path.iter().copied()));
            return Ok(Locate::Found(frame, coeffs));
        }
        if visited.len() >= cap {
            if queue.is_empty() {
                return Ok(Locate::Exhausted { explored });
            }
            continue;
        }
        for k in 0..state.n() {
            let next = state.mutate(k);
            if visited.insert(next.clone()) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((next, p));
            }
        }
    }
    if explored < cap {
        Ok(Locate::NotInFan { explored })
    } else {
        Ok(Locate::Exhausted { explored })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{ivec, qvec};

    fn ex(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_i64(rows).unwrap()
    }

    fn seq(b: &ExchangeMatrix, s: &[usize]) -> MutationSequence {
        MutationSequence::new(s.to_vec(), b.n()).unwrap()
    }

    #[test]
    fn empty_sequence_gives_identity_frames() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        let frames = frame_along(&b, &MutationSequence::empty()).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].c, IntMat::identity(2));
        assert_eq!(frames[0].g, IntMat::identity(2));
    }

    #[test]
    fn one_step_frame_values() {
        // Derived by one extended mutation of [B; I] and the NZ inverse
        // identity: C columns (−1,0), (1,1); G columns (−1,1), (0,1).
        let b = ex(&[&[0, 1], &[-1, 0]]);
        let frames = frame_along(&b, &seq(&b, &[1])).unwrap();
        let f = &frames[1];
        assert_eq!(f.c, IntMat::from_i64(&[&[-1, 1], &[0, 1]]));
        assert_eq!(f.g, IntMat::from_i64(&[&[-1, 0], &[1, 1]]));
        // G·(C')ᵀ = I against the companion frame for −Bᵀ.
        let comp = frame_along(&b.neg_transpose(), &seq(&b, &[1])).unwrap();
        assert_eq!(
            f.g.mul(&comp[1].c.transpose()),
            IntMat::identity(2)
        );
    }

    #[test]
    fn gbbc_identity_on_samples() {
        let cases: Vec<(ExchangeMatrix, Vec<usize>)> = vec![
            (ex(&[&[0, 1], &[-1, 0]]), vec![1, 2, 1]),
            (ex(&[&[0, 2], &[-2, 0]]), vec![1, 2, 1, 2]),
            (ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]), vec![3, 1, 2]),
        ];
        for (b, s) in cases {
            let s = seq(&b, &s);
            for f in frame_along(&b, &s).unwrap() {
                assert_eq!(f.g.mul(f.b_t.mat()), b.mat().mul(&f.c), "G_t·B_t = B_0·C_t");
            }
        }
    }

    #[test]
    fn sign_coherence_along_sample_paths() {
        let b = ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]);
        let s = seq(&b, &[1, 2, 3, 1, 2, 3]);
        for f in frame_along(&b, &s).unwrap() {
            for j in 0..3 {
                assert!(c_column_sign(&f.c, j).is_some(), "C column sign-coherent");
                assert!(g_row_sign(&f.g, j).is_some(), "G row sign-coherent");
            }
        }
    }

    #[test]
    fn green_red_examples() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        assert!(is_green(&b, &seq(&b, &[1])).unwrap());
        assert!(is_green(&b, &seq(&b, &[2])).unwrap());
        assert!(is_maximal_green(&b, &seq(&b, &[1, 2, 1])).unwrap());
        assert!(!is_green(&b, &seq(&b, &[1, 1])).unwrap());
    }

    #[test]
    fn find_maximal_green_a2_and_affine() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        let g = find_maximal_green(&b, 1000).unwrap().unwrap();
        assert!(is_maximal_green(&b, &g).unwrap());
        assert!(g.len() == 2 || g.len() == 3);

        let b = ex(&[&[0, 2], &[-2, 0]]);
        let g = find_maximal_green(&b, 10_000).unwrap().unwrap();
        assert!(is_maximal_green(&b, &g).unwrap());

        let r = find_maximal_red(&b, 10_000).unwrap().unwrap();
        assert!(is_maximal_red(&b, &r).unwrap());
    }

    #[test]
    fn max_green_reverses_to_max_red() {
        for b in [ex(&[&[0, 1], &[-1, 0]]), ex(&[&[0, 2], &[-2, 0]])] {
            let g = find_maximal_green(&b, 10_000).unwrap().unwrap();
            let end = b.mutate_seq(&g).unwrap();
            assert!(is_maximal_red(&end, &g.reversed()).unwrap());
        }
    }

    #[test]
    fn gvector_cone_and_initial_seed_mutation() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        let cone = gvector_cone(&b, &MutationSequence::empty()).unwrap();
        assert_eq!(cone.generators, vec![ivec(&[0, 1]), ivec(&[1, 0])]);

        // Cone_t^{B_r;t_r} = η_seq(Cone_t^{B;t_0}), generator to generator.
        let path = seq(&b, &[1]); // initial-seed change
        let to_t = seq(&b, &[2, 1]); // defines the seed t from t_0
        let cone_t = gvector_cone(&b, &to_t).unwrap();
        let br = b.mutate_seq(&path).unwrap();
        let from_tr = path.reversed().concat(&to_t);
        let cone_t_new = gvector_cone(&br, &from_tr).unwrap();
        let mapped: Vec<Vec<Q>> = cone_t
            .generators_q()
            .iter()
            .map(|g| crate::mutmap::eta(&b, &path, g).unwrap().0)
            .collect();
        let mapped_cone = PointedCone::new(vec![Q::zero(); 2], mapped);
        assert_eq!(mapped_cone.generators, cone_t_new.generators);
    }

    #[test]
    fn a2_five_cones_tile_plane() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        let (frames, complete) = enumerate_frames(&b, 10_000).unwrap();
        assert!(complete);
        let mut cones: Vec<Vec<Vec<crate::num::Int>>> = frames
            .iter()
            .map(|f| {
                let mut gens: Vec<Vec<crate::num::Int>> = (0..2).map(|j| f.g.col(j)).collect();
                gens.sort();
                gens
            })
            .collect();
        cones.sort();
        cones.dedup();
        assert_eq!(cones.len(), 5, "A_2 has five maximal g-vector cones");

        // Sample directions around the circle: each lies in some cone.
        let dirs = [
            (1i64, 0i64), (1, 1), (0, 1), (-1, 2), (-1, 1), (-2, 1), (-1, 0),
            (-1, -1), (0, -1), (1, -2), (1, -1), (2, -1), (3, 1), (-3, -2),
        ];
        for (x, y) in dirs {
            let v = qvec(&[x, y]);
            let hit = cones.iter().any(|gens| {
                PointedCone::new(qvec(&[0, 0]), gens.iter().map(|g| crate::num::qvec_of_ints(g)).collect())
                    .contains(&v)
            });
            assert!(hit, "direction ({x},{y}) not covered");
        }
    }

    #[test]
    fn locate_in_fan_basics() {
        let b = ex(&[&[0, 1], &[-1, 0]]);
        match locate_in_g_fan(&b, &qvec(&[3, 2]), 1000).unwrap() {
            Locate::Found(f, coeffs) => {
                assert!(f.seq.is_empty());
                assert!(coeffs.iter().all(|c| !c.is_negative()));
            }
            other => panic!("expected Found, got {other:?}"),
        }
        match locate_in_g_fan(&b, &qvec(&[-1, -1]), 1000).unwrap() {
            Locate::Found(..) => {}
            other => panic!("negative cone must be reachable, got {other:?}"),
        }
    }
}
