//! Mutation-class type classification (finite / affine / wild), bipartite
//! structure, block decomposition, and exact salience testing.

use crate::error::Result;
use crate::exchange::{ExchangeMatrix, MutationSequence};
use crate::matrix::IntMat;
use crate::num::{self, det, q_of, Q};
use crate::polyhedra::{vrep_of_hrep, HPolyhedron};
use num_traits::{One, Signed, Zero};
use std::collections::{HashSet, VecDeque};

pub const DEFAULT_CLASSIFY_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeTag {
    Finite,
    Affine,
    Wild,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WildCertificate {
    /// A matrix in the explored class with b_ij·b_ji < −4.
    PairProduct {
        matrix: IntMat,
        path: MutationSequence,
        i: usize,
        j: usize,
    },
    /// Non-acyclic 3×3 principal submatrix with all three products −4;
    /// such a submatrix forces exponential growth.
    GrowthTriple {
        matrix: IntMat,
        path: MutationSequence,
        indices: [usize; 3],
    },
    /// Acyclic member whose symmetrized Cartan companion is indefinite;
    /// by the acyclic mutation-finiteness criterion this forces wildness.
    IndefiniteAcyclic {
        matrix: IntMat,
        path: MutationSequence,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeClass {
    pub tag: TypeTag,
    /// For Finite/Affine: an acyclic member and the mutation path to it.
    pub witness: Option<(ExchangeMatrix, MutationSequence)>,
    pub wild: Option<WildCertificate>,
    pub explored: usize,
    pub cap: usize,
}

impl TypeClass {
    pub fn is_finite(&self) -> bool {
        self.tag == TypeTag::Finite
    }
    pub fn is_affine(&self) -> bool {
        self.tag == TypeTag::Affine
    }
    pub fn tag_str(&self) -> &'static str {
        match self.tag {
            TypeTag::Finite => "finite",
            TypeTag::Affine => "affine",
            TypeTag::Wild => "wild",
            TypeTag::Unresolved => "unresolved",
        }
    }
}

/// Symmetrized Cartan companion D·A, a symmetric integer matrix.
fn symmetrized_companion(b: &ExchangeMatrix) -> IntMat {
    let a = b.cartan_companion();
    let d = b.symmetrizer();
    let n = b.n();
    let mut m = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = &d[i] * &a[(i, j)];
        }
    }
    m
}

fn leading_minors(m: &IntMat) -> Vec<Q> {
    let n = m.rows();
    (1..=n)
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            det(&m.submatrix(&idx, &idx).to_q_rows())
        })
        .collect()
}

/// Positive definite ⟺ all leading principal minors positive (Sylvester).
fn is_positive_definite(m: &IntMat) -> bool {
    leading_minors(m).iter().all(|x| x.is_positive())
}

/// For an indecomposable symmetric matrix: positive semidefinite with
/// one-dimensional kernel ⟺ proper leading minors positive and det zero.
fn is_affine_block(m: &IntMat) -> bool {
    let minors = leading_minors(m);
    let n = minors.len();
    minors[..n - 1].iter().all(|x| x.is_positive()) && minors[n - 1].is_zero()
}

enum CompanionVerdict {
    Finite,
    Affine,
    Indefinite,
}

fn companion_verdict(b: &ExchangeMatrix) -> CompanionVerdict {
    let blocks = block_decompose(b.mat());
    let mut any_affine = false;
    for block in &blocks {
        let sub = ExchangeMatrix::new(b.mat().submatrix(block, block))
            .expect("principal submatrix of exchange matrix");
        let m = symmetrized_companion(&sub);
        if is_positive_definite(&m) {
            continue;
        }
        if is_affine_block(&m) {
            any_affine = true;
        } else {
            return CompanionVerdict::Indefinite;
        }
    }
    if any_affine {
        CompanionVerdict::Affine
    } else {
        CompanionVerdict::Finite
    }
}

fn wild_scan(b: &IntMat, path: &MutationSequence) -> Option<WildCertificate> {
    let n = b.rows();
    for i in 0..n {
        for j in i + 1..n {
            if &b[(i, j)] * &b[(j, i)] < num::int(-4) {
                return Some(WildCertificate::PairProduct {
                    matrix: b.clone(),
                    path: path.clone(),
                    i: i + 1,
                    j: j + 1,
                });
            }
        }
    }
    let minus4 = num::int(-4);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let prods = [
                    &b[(i, j)] * &b[(j, i)],
                    &b[(i, k)] * &b[(k, i)],
                    &b[(j, k)] * &b[(k, j)],
                ];
                if prods.iter().all(|p| *p == minus4) {
                    let sub = ExchangeMatrix::new(b.submatrix(&[i, j, k], &[i, j, k]))
                        .expect("principal submatrix");
                    if !sub.is_acyclic() {
                        return Some(WildCertificate::GrowthTriple {
                            matrix: b.clone(),
                            path: path.clone(),
                            indices: [i + 1, j + 1, k + 1],
                        });
                    }
                }
            }
        }
    }
    None
}

/// BFS over the mutation class, canonicalizing visited matrices by their
/// raw entry tuple, until a verdict or the cap is reached.
pub fn classify(b: &ExchangeMatrix, cap: usize) -> TypeClass {
    let mut visited: HashSet<IntMat> = HashSet::new();
    let mut queue: VecDeque<(ExchangeMatrix, Vec<usize>)> = VecDeque::new();
    visited.insert(b.mat().clone());
    queue.push_back((b.clone(), vec![]));
    let mut explored = 0usize;
    while let Some((cur, path)) = queue.pop_front() {
        explored += 1;
        let seq = MutationSequence::from_zero_based(path.iter().copied());
        if let Some(cert) = wild_scan(cur.mat(), &seq) {
            return TypeClass {
                tag: TypeTag::Wild,
                witness: None,
                wild: Some(cert),
                explored,
                cap,
            };
        }
        if cur.is_acyclic() {
            let tag = match companion_verdict(&cur) {
                CompanionVerdict::Finite => TypeTag::Finite,
                CompanionVerdict::Affine => TypeTag::Affine,
                CompanionVerdict::Indefinite => {
                    return TypeClass {
                        tag: TypeTag::Wild,
                        witness: None,
                        wild: Some(WildCertificate::IndefiniteAcyclic {
                            matrix: cur.mat().clone(),
                            path: seq,
                        }),
                        explored,
                        cap,
                    };
                }
            };
            return TypeClass {
                tag,
                witness: Some((cur, seq)),
                wild: None,
                explored,
                cap,
            };
        }
        if visited.len() >= cap {
            continue;
        }
        for k in 0..cur.n() {
            let next = cur.mutate(k).expect("in-range index");
            if visited.insert(next.mat().clone()) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((next, p));
            }
        }
    }
    TypeClass {
        tag: TypeTag::Unresolved,
        witness: None,
        wild: None,
        explored,
        cap,
    }
}

/// Full mutation class by BFS (no relabeling quotient), with the path to
/// each member. The flag reports whether the class was fully enumerated
/// within the cap.
pub fn mutation_class(
    b: &ExchangeMatrix,
    cap: usize,
) -> (Vec<(ExchangeMatrix, MutationSequence)>, bool) {
    let mut visited: HashSet<IntMat> = HashSet::new();
    let mut queue: VecDeque<(ExchangeMatrix, Vec<usize>)> = VecDeque::new();
    visited.insert(b.mat().clone());
    queue.push_back((b.clone(), vec![]));
    let mut out = Vec::new();
    let mut complete = true;
    while let Some((cur, path)) = queue.pop_front() {
        out.push((
            cur.clone(),
            MutationSequence::from_zero_based(path.iter().copied()),
        ));
        if visited.len() >= cap {
            complete = complete && queue.is_empty();
            continue;
        }
        for k in 0..cur.n() {
            let next = cur.mutate(k).expect("in-range index");
            if visited.insert(next.mat().clone()) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((next, p));
            }
        }
    }
    (out, complete)
}

/// Bipartition P ∪ N with b_ij > 0 ⟹ i ∈ P, j ∈ N, when one exists.
/// Vertices incident to no arrow are placed in P.
pub fn is_bipartite(b: &ExchangeMatrix) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = b.n();
    let mut p = Vec::new();
    let mut neg = Vec::new();
    for i in 0..n {
        let has_out = (0..n).any(|j| b.entry(i, j).is_positive());
        let has_in = (0..n).any(|j| b.entry(i, j).is_negative());
        match (has_out, has_in) {
            (true, true) => return None,
            (false, true) => neg.push(i),
            _ => p.push(i),
        }
    }
    Some((p, neg))
}

/// Connected components of the nonzero pattern, each sorted, sorted by
/// (size, first element).
pub fn block_decompose(m: &IntMat) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut comp = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && (!m[(i, j)].is_zero() || !m[(j, i)].is_zero()) {
                    comp[j] = id;
                    members.push(j);
                    stack.push(j);
                }
            }
        }
        members.sort();
        blocks.push(members);
    }
    blocks.sort_by_key(|b| (b.len(), b[0]));
    blocks
}

/// Exact salience decision for the nonnegative column span of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Salience {
    /// x has strictly positive dot product with every nonzero column.
    Salient { witness: Vec<Q> },
    /// α ≥ 0, nonzero on a nonzero column, with M·α = 0: the span contains a line.
    NotSalient { alpha: Vec<Q> },
}

impl Salience {
    pub fn is_salient(&self) -> bool {
        matches!(self, Salience::Salient { .. })
    }
}

pub fn is_salient(m: &IntMat) -> Salience {
    let rows = m.rows();
    let cols = m.cols();
    let nonzero: Vec<usize> = (0..cols)
        .filter(|&j| (0..rows).any(|i| !m[(i, j)].is_zero()))
        .collect();
    if nonzero.is_empty() {
        return Salience::Salient {
            witness: vec![Q::zero(); rows],
        };
    }
    // Feasibility of {α ≥ 0, Σα = 1, M α = 0} over the nonzero columns.
    let k = nonzero.len();
    let mut ineqs: Vec<(Vec<Q>, Q)> = Vec::new();
    for j in 0..k {
        let mut a = vec![Q::zero(); k];
        a[j] = Q::one();
        ineqs.push((a, Q::zero()));
    }
    let mut eqs: Vec<(Vec<Q>, Q)> = vec![(vec![Q::one(); k], Q::one())];
    for i in 0..rows {
        let a: Vec<Q> = nonzero.iter().map(|&j| q_of(&m[(i, j)])).collect();
        eqs.push((a, Q::zero()));
    }
    let h = HPolyhedron::new(ineqs, eqs);
    let v = vrep_of_hrep(&h, k);
    if let Some(vertex) = v.vertices.first() {
        let mut alpha = vec![Q::zero(); cols];
        for (slot, &j) in nonzero.iter().enumerate() {
            alpha[j] = vertex[slot].clone();
        }
        return Salience::NotSalient { alpha };
    }
    // Salient: sum of the facet normals of cone(columns) is a strict witness.
    let cone = crate::polyhedra::PointedCone::new(
        vec![Q::zero(); rows],
        nonzero.iter().map(|&j| num::qvec_of_ints(&m.col(j))).collect(),
    );
    let h = cone.to_hrep();
    let mut witness = vec![Q::zero(); rows];
    for (a, _) in h.ineqs.iter() {
        witness = num::add(&witness, &num::qvec_of_ints(a));
    }
    for &j in &nonzero {
        let c = num::qvec_of_ints(&m.col(j));
        assert!(
            num::dot(&witness, &c).is_positive(),
            "salience witness must be strict"
        );
    }
    Salience::Salient { witness }
}

/// True when the block is of finite type A: finite classification whose
/// acyclic witness has a simply-laced path diagram.
pub fn finite_type_a(b: &ExchangeMatrix) -> Result<bool> {
    if b.n() == 1 {
        return Ok(true);
    }
    let t = classify(b, DEFAULT_CLASSIFY_CAP);
    if t.tag != TypeTag::Finite {
        return Ok(false);
    }
    let (witness, _) = t.witness.expect("finite verdict has witness");
    Ok(diagram_is_simply_laced_path(&witness))
}

fn degrees(b: &ExchangeMatrix) -> Vec<usize> {
    let n = b.n();
    (0..n)
        .map(|i| (0..n).filter(|&j| !b.entry(i, j).is_zero()).count())
        .collect()
}

fn diagram_is_connected_path(b: &ExchangeMatrix) -> bool {
    let n = b.n();
    let deg = degrees(b);
    block_decompose(b.mat()).len() == 1
        && deg.iter().all(|&d| d <= 2)
        && deg.iter().filter(|&&d| d == 1).count() == if n == 1 { 0 } else { 2 }
}

fn diagram_is_simply_laced_path(b: &ExchangeMatrix) -> bool {
    let n = b.n();
    let simply_laced = (0..n).all(|i| (0..n).all(|j| b.entry(i, j).abs() <= num::int(1)));
    simply_laced && diagram_is_connected_path(b)
}

/// True when the block is of finite type C (or A₁ when 1×1): finite
/// classification with a path diagram carrying exactly one double bond,
/// located at an end of the path.
pub fn finite_type_c_or_a1(b: &ExchangeMatrix) -> Result<bool> {
    let n = b.n();
    if n == 1 {
        return Ok(b.entry(0, 0).is_zero());
    }
    let t = classify(b, DEFAULT_CLASSIFY_CAP);
    if t.tag != TypeTag::Finite {
        return Ok(false);
    }
    let (w, _) = t.witness.expect("finite verdict has witness");
    if !diagram_is_connected_path(&w) {
        return Ok(false);
    }
    let mut heavy = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let prod = (w.entry(i, j) * w.entry(j, i)).abs();
            if prod > num::int(2) {
                return Ok(false);
            }
            if prod == num::int(2) {
                heavy.push((i, j));
            }
        }
    }
    if heavy.len() != 1 {
        return Ok(false);
    }
    let (i, j) = heavy[0];
    let deg = degrees(&w);
    Ok(deg[i] == 1 || deg[j] == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn classify_a2_finite() {
        let t = classify(&ex(&[&[0, 1], &[-1, 0]]), 100);
        assert_eq!(t.tag, TypeTag::Finite);
        let (w, path) = t.witness.unwrap();
        assert!(path.is_empty(), "already acyclic");
        assert!(w.is_acyclic());
    }

    #[test]
    fn classify_affine_cycle() {
        // Oriented triangle with a double arrow: affine A_2^(1) pattern.
        let t = classify(&ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]), 1000);
        assert_eq!(t.tag, TypeTag::Affine);
        let (w, path) = t.witness.unwrap();
        assert!(w.is_acyclic());
        assert!(!path.is_empty());
        // Companion of the witness is positive semidefinite of corank 1.
        let m = symmetrized_companion(&w);
        assert!(is_affine_block(&m));
    }

    #[test]
    fn classify_markov_wild() {
        let t = classify(&ex(&[&[0, 2, -2], &[-2, 0, 2], &[2, -2, 0]]), 1000);
        assert_eq!(t.tag, TypeTag::Wild);
        assert!(matches!(
            t.wild,
            Some(WildCertificate::GrowthTriple { .. })
        ));
    }

    #[test]
    fn classify_rank2_wild_pair() {
        let t = classify(&ex(&[&[0, 5], &[-1, 0]]), 100);
        assert_eq!(t.tag, TypeTag::Wild);
        assert!(matches!(t.wild, Some(WildCertificate::PairProduct { .. })));
    }

    #[test]
    fn classify_is_mutation_invariant_on_samples() {
        let cases = [
            ex(&[&[0, 1], &[-1, 0]]),
            ex(&[&[0, 2], &[-2, 0]]),
            ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]]),
        ];
        for b in &cases {
            let t0 = classify(b, 2000).tag;
            for k in 0..b.n() {
                assert_eq!(classify(&b.mutate(k).unwrap(), 2000).tag, t0);
            }
        }
    }

    #[test]
    fn bipartite_examples() {
        let (p, n) = is_bipartite(&ex(&[&[0, -1, 0], &[1, 0, 1], &[0, -1, 0]])).unwrap();
        assert_eq!(p, vec![1]);
        assert_eq!(n, vec![0, 2]);
        assert!(is_bipartite(&ex(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]])).is_none());
    }

    #[test]
    fn block_decompose_examples() {
        let m = IntMat::from_i64(&[&[0, 0, 0], &[0, 0, 2], &[0, -2, 0]]);
        assert_eq!(block_decompose(&m), vec![vec![0], vec![1, 2]]);
        let m = IntMat::from_i64(&[&[0, 1], &[-1, 0]]);
        assert_eq!(block_decompose(&m), vec![vec![0, 1]]);
    }

    #[test]
    fn salience_examples() {
        // Bipartite exchange matrices are salient, with a sign-split witness.
        let b = ex(&[&[0, -1, 0], &[1, 0, 1], &[0, -1, 0]]);
        match is_salient(b.mat()) {
            Salience::Salient { witness } => {
                for j in 0..3 {
                    let c = num::qvec_of_ints(&b.mat().col(j));
                    assert!(num::dot(&witness, &c).is_positive());
                }
            }
            other => panic!("expected salient, got {other:?}"),
        }

        // Columns c and −c span a line.
        let m = IntMat::from_i64(&[&[1, -1], &[2, -2]]);
        match is_salient(&m) {
            Salience::NotSalient { alpha } => {
                assert!(alpha.iter().any(|x| x.is_positive()));
                let combo = m.mul_vec_q(&alpha);
                assert!(num::is_zero_vec(&combo));
            }
            other => panic!("expected not salient, got {other:?}"),
        }

        // Zero matrix is vacuously salient.
        assert!(is_salient(&IntMat::zeros(2, 2)).is_salient());
    }

    #[test]
    fn salient_cycle_representative() {
        // Acyclic-cycle representative for n = 4, k = 2: digraph
        // 1→2←4 and 1→3←4 after mutating the single sink.
        let b = ex(&[&[0, 1, 1, 0], &[-1, 0, 0, -1], &[-1, 0, 0, -1], &[0, 1, 1, 0]]);
        assert!(is_salient(b.mat()).is_salient());
    }

    #[test]
    fn type_detectors() {
        assert!(finite_type_a(&ex(&[&[0, -1, 0], &[1, 0, 1], &[0, -1, 0]])).unwrap());
        // Oriented 3-cycle of type A_3.
        assert!(finite_type_a(&ex(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]])).unwrap());
        assert!(!finite_type_a(&ex(&[&[0, 2], &[-1, 0]])).unwrap());
        assert!(finite_type_c_or_a1(&ex(&[&[0]])).unwrap());
        assert!(finite_type_c_or_a1(&ex(&[&[0, 2], &[-1, 0]])).unwrap());
        assert!(!finite_type_c_or_a1(&ex(&[&[0, 1], &[-1, 0]])).unwrap());
    }
}
