//! Piecewise-linear mutation maps η on rational vectors, their sign
//! traces and linearizations, and exact / over-approximated images of
//! translated cones under η.
//!
//! A single step of η at index k applies the matrix E_{ε,k} of the
//! current exchange matrix, where ε is the sign of coordinate k of the
//! argument; the exchange matrix is then mutated at k. Ties (coordinate
//! zero) are resolved to ε = +1, where both pieces agree.

use crate::error::{Error, Result};
use crate::exchange::{
    e_matrix_raw, mutate_raw, square_extension, ExchangeMatrix, ExtendedExchangeMatrix,
    MutationSequence,
};
use crate::matrix::IntMat;
use crate::num::{self, Q};
use crate::polyhedra::{HPolyhedron, PointedCone, Polyhedron, RegionUnion};
use num_traits::{One, Signed, Zero};

/// Which linear piece applied at each step: +1, −1, or 0 when the
/// coordinate vanished and both pieces agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTrace(pub Vec<i8>);

impl SignTrace {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_square_index(mat: &IntMat, n_mutable: usize, k: usize) -> Result<()> {
    if k >= n_mutable || k >= mat.rows() {
        return Err(Error::IndexOutOfRange {
            index: k + 1,
            n: n_mutable,
        });
    }
    Ok(())
}

/// Shared engine: η over a square skew-symmetrizable matrix, with
/// mutations restricted to the first `n_mutable` indices.
pub fn eta_square(
    mat: &IntMat,
    n_mutable: usize,
    seq: &MutationSequence,
    x: &[Q],
) -> Result<(Vec<Q>, SignTrace)> {
    if x.len() != mat.rows() {
        return Err(Error::DimensionMismatch {
            expected: mat.rows(),
            got: x.len(),
        });
    }
    let mut cur = mat.clone();
    let mut y = x.to_vec();
    let mut trace = Vec::with_capacity(seq.len());
    for k in seq.iter() {
        check_square_index(&cur, n_mutable, k)?;
        let s = if y[k].is_positive() {
            1i8
        } else if y[k].is_negative() {
            -1i8
        } else {
            0i8
        };
        let eps = if s == 0 { 1 } else { s as i32 };
        let e = e_matrix_raw(&cur, k, eps);
        y = e.mul_vec_q(&y);
        cur = mutate_raw(&cur, k);
        trace.push(s);
    }
    Ok((y, SignTrace(trace)))
}

/// η_seq^{Bᵀ}(x) together with its sign trace.
pub fn eta(b: &ExchangeMatrix, seq: &MutationSequence, x: &[Q]) -> Result<(Vec<Q>, SignTrace)> {
    eta_square(b.mat(), b.n(), seq, x)
}

/// The inverse map: η of the mutated matrix along the reversed sequence.
pub fn eta_inverse(b: &ExchangeMatrix, seq: &MutationSequence, y: &[Q]) -> Result<Vec<Q>> {
    let end = b.mutate_seq(seq)?;
    Ok(eta(&end, &seq.reversed(), y)?.0)
}

/// η_seq^{𝐁ᵀ}(x) on ℝᵐ, via the square extension of B̃; indices ≤ n only.
pub fn eta_extended(
    bt: &ExtendedExchangeMatrix,
    seq: &MutationSequence,
    x: &[Q],
) -> Result<Vec<Q>> {
    let bb = square_extension(bt);
    Ok(eta_square(bb.mat(), bt.n(), seq, x)?.0)
}

/// Product of the E-matrices along the sign trace of x: the matrix of the
/// linear piece of η_seq^{Bᵀ} at x.
pub fn linearization(b: &ExchangeMatrix, seq: &MutationSequence, x: &[Q]) -> Result<IntMat> {
    linearization_square(b.mat(), b.n(), seq, x)
}

pub fn linearization_square(
    mat: &IntMat,
    n_mutable: usize,
    seq: &MutationSequence,
    x: &[Q],
) -> Result<IntMat> {
    if x.len() != mat.rows() {
        return Err(Error::DimensionMismatch {
            expected: mat.rows(),
            got: x.len(),
        });
    }
    let mut cur = mat.clone();
    let mut y = x.to_vec();
    let mut l = IntMat::identity(mat.rows());
    for k in seq.iter() {
        check_square_index(&cur, n_mutable, k)?;
        let eps = if y[k].is_negative() { -1 } else { 1 };
        let e = e_matrix_raw(&cur, k, eps);
        y = e.mul_vec_q(&y);
        l = e.mul(&l);
        cur = mutate_raw(&cur, k);
    }
    Ok(l)
}

fn apply_linear(e: &IntMat, p: &Polyhedron) -> Polyhedron {
    let mut out = Polyhedron {
        vertices: p.vertices.iter().map(|v| e.mul_vec_q(v)).collect(),
        rays: p
            .rays
            .iter()
            .map(|r| num::primitive(&e.mul_vec_q(&num::qvec_of_ints(r))))
            .collect(),
        lineality: p
            .lineality
            .iter()
            .map(|l| num::primitive(&e.mul_vec_q(&num::qvec_of_ints(l))))
            .collect(),
    };
    out.canonicalize();
    out
}

fn halfspace(dim: usize, k: usize, sign: i32) -> HPolyhedron {
    let mut a = vec![Q::zero(); dim];
    a[k] = if sign >= 0 { Q::one() } else { -Q::one() };
    HPolyhedron::new(vec![(a, Q::zero())], vec![])
}

pub const DEFAULT_PIECE_CAP: usize = 4096;

/// Exact image of a region under η_seq, as a union of polyhedra: at each
/// step every piece is split by the hyperplane x_k = 0 (both closed
/// halves kept), the matching E-matrix is applied to each part, and
/// empty parts are dropped. Errs with `BudgetExhausted` if the number of
/// pieces ever exceeds `cap`.
pub fn map_region_exact_square(
    mat: &IntMat,
    n_mutable: usize,
    seq: &MutationSequence,
    pieces: Vec<Polyhedron>,
    cap: usize,
) -> Result<Vec<Polyhedron>> {
    let dim = mat.rows();
    let mut cur = mat.clone();
    let mut pieces = pieces;
    for k in seq.iter() {
        check_square_index(&cur, n_mutable, k)?;
        let e_plus = e_matrix_raw(&cur, k, 1);
        let e_minus = e_matrix_raw(&cur, k, -1);
        let h_plus = halfspace(dim, k, 1);
        let h_minus = halfspace(dim, k, -1);
        let mut next = Vec::new();
        for p in &pieces {
            let hp = p.to_hrep();
            for (half, e) in [(&h_plus, &e_plus), (&h_minus, &e_minus)] {
                let part = crate::polyhedra::vrep_of_hrep(&hp.intersection(half), dim);
                if !part.is_empty() {
                    next.push(apply_linear(e, &part));
                }
            }
        }
        let mut union = RegionUnion::new(next);
        if union.pieces.len() > cap {
            return Err(Error::BudgetExhausted { cap });
        }
        pieces = std::mem::take(&mut union.pieces);
        cur = mutate_raw(&cur, k);
    }
    Ok(pieces)
}

/// Exact image of a translated cone under η_seq^{Bᵀ}.
pub fn map_polyhedron_exact(
    b: &ExchangeMatrix,
    seq: &MutationSequence,
    p: &PointedCone,
    cap: usize,
) -> Result<Vec<Polyhedron>> {
    map_region_exact_square(b.mat(), b.n(), seq, vec![p.to_polyhedron()], cap)
}

/// Sound over-approximation of the image of a translated cone: the apex
/// moves by η; at each step the generators are replaced by their
/// ε-branch images for every branch that some point of the current cone
/// can take (both branches when the cone meets both halfspaces).
/// Contains the exact image; equals it when the cone never crosses a
/// separating hyperplane.
pub fn map_polyhedron_hull_square(
    mat: &IntMat,
    n_mutable: usize,
    seq: &MutationSequence,
    p: &PointedCone,
) -> Result<PointedCone> {
    let mut cur = mat.clone();
    let mut apex = p.apex.clone();
    if apex.len() != mat.rows() {
        return Err(Error::DimensionMismatch {
            expected: mat.rows(),
            got: apex.len(),
        });
    }
    let mut gens = p.generators_q();
    for k in seq.iter() {
        check_square_index(&cur, n_mutable, k)?;
        let plus = apex[k].is_positive() || gens.iter().any(|g| g[k].is_positive());
        let minus = apex[k].is_negative() || gens.iter().any(|g| g[k].is_negative());
        let mut branches = Vec::new();
        if plus || !minus {
            branches.push(1);
        }
        if minus {
            branches.push(-1);
        }
        let apex_eps = if apex[k].is_negative() { -1 } else { 1 };
        let mut new_gens = Vec::new();
        for eps in branches {
            let e = e_matrix_raw(&cur, k, eps);
            for g in &gens {
                new_gens.push(e.mul_vec_q(g));
            }
        }
        apex = e_matrix_raw(&cur, k, apex_eps).mul_vec_q(&apex);
        // normalize and dedupe between steps to keep the set small
        let tmp = PointedCone::new(apex.clone(), new_gens);
        gens = tmp.generators_q();
        apex = tmp.apex;
        cur = mutate_raw(&cur, k);
    }
    Ok(PointedCone::new(apex, gens))
}

pub fn map_polyhedron_hull(
    b: &ExchangeMatrix,
    seq: &MutationSequence,
    p: &PointedCone,
) -> Result<PointedCone> {
    map_polyhedron_hull_square(b.mat(), b.n(), seq, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{ivec, q, qvec};

    fn ex(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_i64(rows).unwrap()
    }

    fn seq(b: &ExchangeMatrix, s: &[usize]) -> MutationSequence {
        MutationSequence::new(s.to_vec(), b.n()).unwrap()
    }

    /// Oracle: append x as an extra column and run matrix mutation.
    fn eta_oracle(b: &ExchangeMatrix, s: &MutationSequence, x: &[i64]) -> Vec<num::Int> {
        let n = b.n();
        let mut m = IntMat::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = b.entry(i, j).clone();
            }
            m[(i, n)] = num::int(x[i]);
        }
        for k in s.iter() {
            m = mutate_raw(&m, k);
        }
        m.col(n)
    }

    #[test]
    fn eta_examples_rank2() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let s = seq(&b, &[1]);
        let (y, tr) = eta(&b, &s, &qvec(&[1, 3])).unwrap();
        assert_eq!(y, qvec(&[-1, 3]));
        assert_eq!(tr.0, vec![1]);
        assert_eq!(eta_oracle(&b, &s, &[1, 3]), ivec(&[-1, 3]));

        let (y, tr) = eta(&b, &s, &qvec(&[-1, 1])).unwrap();
        assert_eq!(y, qvec(&[1, -1]));
        assert_eq!(tr.0, vec![-1]);
        assert_eq!(eta_oracle(&b, &s, &[-1, 1]), ivec(&[1, -1]));

        // On the separating hyperplane both pieces agree and fix x.
        let (y, tr) = eta(&b, &s, &qvec(&[0, 5])).unwrap();
        assert_eq!(y, qvec(&[0, 5]));
        assert_eq!(tr.0, vec![0]);
    }

    #[test]
    fn eta_agrees_with_matrix_oracle() {
        let b = ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]);
        let cases: &[(&[usize], &[i64])] = &[
            (&[1, 2, 3], &[1, -2, 3]),
            (&[3, 1, 2, 1], &[-1, 0, 2]),
            (&[2, 2], &[5, 1, -4]),
        ];
        for (s, x) in cases {
            let s = seq(&b, s);
            let (y, _) = eta(&b, &s, &qvec(x)).unwrap();
            let oracle = eta_oracle(&b, &s, x);
            assert_eq!(y, num::qvec_of_ints(&oracle));
        }
    }

    #[test]
    fn eta_bijection_round_trip() {
        let b = ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]);
        let s = seq(&b, &[1, 3, 2, 1]);
        for x in [qvec(&[1, 2, 3]), qvec(&[-1, 5, 0]), qvec(&[2, -7, 3])] {
            let (y, _) = eta(&b, &s, &x).unwrap();
            assert_eq!(eta_inverse(&b, &s, &y).unwrap(), x);
        }
    }

    #[test]
    fn eta_extended_example_and_projection() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let bt = ExtendedExchangeMatrix::principal(&b);
        let s = seq(&b, &[1]);
        let y = eta_extended(&bt, &s, &qvec(&[1, 3, 0, 0])).unwrap();
        assert_eq!(y, qvec(&[-1, 3, 1, 0]));

        // x with x_1 = 0 is fixed.
        let y = eta_extended(&bt, &s, &qvec(&[0, 3, 2, 1])).unwrap();
        assert_eq!(y, qvec(&[0, 3, 2, 1]));

        // Proj_n ∘ η_ext = η ∘ Proj_n
        let s = seq(&b, &[1, 2, 1]);
        for x in [qvec(&[1, 3, -2, 5]), qvec(&[-4, 1, 0, 2])] {
            let full = eta_extended(&bt, &s, &x).unwrap();
            let (proj, _) = eta(&b, &s, &x[..2]).unwrap();
            assert_eq!(&full[..2], &proj[..]);
        }
    }

    #[test]
    fn linearization_examples() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        assert_eq!(
            linearization(&b, &MutationSequence::empty(), &qvec(&[1, 1])).unwrap(),
            IntMat::identity(2)
        );
        let l = linearization(&b, &seq(&b, &[1]), &qvec(&[1, 3])).unwrap();
        assert_eq!(l, IntMat::from_i64(&[&[-1, 0], &[0, 1]]));

        // L·x = eta(x) on assorted inputs
        let b = ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]);
        let s = seq(&b, &[2, 1, 3]);
        for x in [qvec(&[1, 1, 1]), qvec(&[-2, 0, 5])] {
            let l = linearization(&b, &s, &x).unwrap();
            let (y, _) = eta(&b, &s, &x).unwrap();
            assert_eq!(l.mul_vec_q(&x), y);
        }
    }

    #[test]
    fn exact_image_one_domain_is_linear() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let s = seq(&b, &[1]);
        // Entirely inside x_1 ≥ 0.
        let p = PointedCone::new(qvec(&[1, 0]), vec![qvec(&[1, 0]), qvec(&[1, 1])]);
        let pieces = map_polyhedron_exact(&b, &s, &p, 64).unwrap();
        assert_eq!(pieces.len(), 1);
        let l = linearization(&b, &s, &p.apex).unwrap();
        let expected = PointedCone::new(
            l.mul_vec_q(&p.apex),
            p.generators_q().iter().map(|g| l.mul_vec_q(g)).collect(),
        );
        assert!(pieces[0].set_eq(&expected.to_polyhedron()));
    }

    #[test]
    fn exact_image_splits_across_hyperplane() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let s = seq(&b, &[1]);
        let p = PointedCone::new(qvec(&[0, 0]), vec![qvec(&[1, 0]), qvec(&[-1, 1])]);
        let pieces = map_polyhedron_exact(&b, &s, &p, 64).unwrap();
        assert_eq!(pieces.len(), 2);

        // Sampling oracle: images of points of P lie in the union, and
        // points of the union pull back into P.
        let hp = p.to_hrep();
        let union = RegionUnion::new(pieces.clone());
        let samples = [
            qvec(&[1, 0]),
            qvec(&[-1, 1]),
            qvec(&[0, 1]),
            qvec(&[3, 2]),
            qvec(&[-2, 5]),
            vec![q(1) / q(2), q(7) / q(3)],
        ];
        for x in &samples {
            assert!(hp.contains(x));
            let (y, _) = eta(&b, &s, x).unwrap();
            assert!(union.contains_point(&y), "image point escaped the union");
        }
        for piece in &pieces {
            for v in &piece.vertices {
                let back = eta_inverse(&b, &s, v).unwrap();
                assert!(hp.contains(&back));
            }
            for r in &piece.rays {
                // apex + ray stays in the union; pull back a point on it
                let pt = num::add(&piece.vertices[0], &num::qvec_of_ints(r));
                let back = eta_inverse(&b, &s, &pt).unwrap();
                assert!(hp.contains(&back));
            }
        }
    }

    #[test]
    fn exact_image_single_ray_no_crossing() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let s = seq(&b, &[1]);
        let p = PointedCone::new(qvec(&[2, 1]), vec![qvec(&[1, 2])]);
        let pieces = map_polyhedron_exact(&b, &s, &p, 64).unwrap();
        assert_eq!(pieces.len(), 1);
        let expect_apex = eta(&b, &s, &p.apex).unwrap().0;
        assert_eq!(pieces[0].vertices, vec![expect_apex]);
        assert_eq!(pieces[0].rays.len(), 1);
    }

    #[test]
    fn hull_contains_exact_pieces() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let cases = [
            (vec![1], PointedCone::new(qvec(&[0, 0]), vec![qvec(&[1, 0]), qvec(&[-1, 1])])),
            (
                vec![1, 2],
                PointedCone::new(qvec(&[-2, 2]), vec![qvec(&[0, -1]), qvec(&[1, 0])]),
            ),
            (
                vec![2, 1, 2],
                PointedCone::new(qvec(&[1, -1]), vec![qvec(&[-1, 3]), qvec(&[2, 1])]),
            ),
        ];
        for (s, p) in &cases {
            let s = seq(&b, s);
            let hull = map_polyhedron_hull(&b, &s, p).unwrap().to_polyhedron();
            let exact = map_polyhedron_exact(&b, &s, p, 256).unwrap();
            for piece in &exact {
                assert!(piece.is_subset_of(&hull), "hull must contain exact piece");
            }
        }
    }

    #[test]
    fn hull_equals_exact_when_no_crossing() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let s = seq(&b, &[1]);
        let p = PointedCone::new(qvec(&[1, 0]), vec![qvec(&[1, 0]), qvec(&[1, 1])]);
        let hull = map_polyhedron_hull(&b, &s, &p).unwrap();
        let exact = map_polyhedron_exact(&b, &s, &p, 64).unwrap();
        assert_eq!(exact.len(), 1);
        assert!(hull.to_polyhedron().set_eq(&exact[0]));
    }
}
