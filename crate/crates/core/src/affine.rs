//! Affine-type structure: δ vectors, the imaginary ray and wall,
//! neighboring exchange matrices and their block decomposition, type-C
//! companions, and expanded mutation sequences.

use crate::classify::{self, classify, TypeTag, DEFAULT_CLASSIFY_CAP};
use crate::error::{Error, Result};
use crate::exchange::{ExchangeMatrix, MutationSequence};
use crate::matrix::IntMat;
use crate::mutmap::{eta, map_region_exact_square};
use crate::num::{self, is_nonneg_multiple, primitive, primitive_signed, q_of, Q};
use crate::polyhedra::Polyhedron;
use num_traits::{One, Signed, Zero};

/// The seven possible couplings of a special index with the affine pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableType {
    A2x1,
    C2x1,
    D3x2,
    G2x1,
    D4x3,
    A4x2a,
    A4x2b,
}

impl TableType {
    pub fn name(self) -> &'static str {
        match self {
            TableType::A2x1 => "A2^(1)",
            TableType::C2x1 => "C2^(1)",
            TableType::D3x2 => "D3^(2)",
            TableType::G2x1 => "G2^(1)",
            TableType::D4x3 => "D4^(3)",
            TableType::A4x2a => "A4^(2)a",
            TableType::A4x2b => "A4^(2)b",
        }
    }
}

/// The possible 3×3 submatrices on (special, affine, affine) indices,
/// in the row/column order (k, n−1, n).
pub const TABLE_1: &[(TableType, [[i64; 3]; 3])] = &[
    (TableType::A2x1, [[0, 1, -1], [-1, 0, 2], [1, -2, 0]]),
    (TableType::C2x1, [[0, 2, -2], [-1, 0, 2], [1, -2, 0]]),
    (TableType::D3x2, [[0, 1, -1], [-2, 0, 2], [2, -2, 0]]),
    (TableType::G2x1, [[0, 3, -3], [-1, 0, 2], [1, -2, 0]]),
    (TableType::D4x3, [[0, 1, -1], [-3, 0, 2], [3, -2, 0]]),
    (TableType::A4x2a, [[0, 1, -2], [-2, 0, 4], [1, -1, 0]]),
    (TableType::A4x2b, [[0, 2, -1], [-1, 0, 1], [2, -4, 0]]),
];

fn table_lookup(m: &IntMat) -> Option<TableType> {
    for (t, rows) in TABLE_1 {
        if *m == IntMat::from_i64(&[&rows[0], &rows[1], &rows[2]]) {
            return Some(*t);
        }
    }
    None
}

/// Block data of a neighboring exchange matrix per the structure theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighboringStructure {
    /// (p, n) with b_pn > 0 and b_pn·b_np = −4, 0-based original indices.
    pub affine_pair: (usize, usize),
    /// One special index per block, aligned with `blocks`.
    pub special_indices: Vec<usize>,
    /// Non-affine diagonal blocks, sorted by increasing size; inside a
    /// block the special index is listed last.
    pub blocks: Vec<Vec<usize>>,
    /// Coupling type per block.
    pub table_types: Vec<TableType>,
    /// Canonical position → original index (blocks, then the affine pair).
    pub relabeling: Vec<usize>,
}

impl NeighboringStructure {
    pub fn is_special(&self, k: usize) -> bool {
        self.special_indices.contains(&k)
    }

    pub fn is_affine_index(&self, k: usize) -> bool {
        k == self.affine_pair.0 || k == self.affine_pair.1
    }

    pub fn non_affine_indices(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&k| !self.is_affine_index(k)).collect()
    }

    pub fn table_type_of(&self, special: usize) -> Option<TableType> {
        self.special_indices
            .iter()
            .position(|&s| s == special)
            .map(|i| self.table_types[i])
    }
}

/// Condition (ii): some pair with b_ij·b_ji = −4. Pre: B of affine type.
pub fn is_neighboring(b: &ExchangeMatrix) -> Result<bool> {
    let t = classify(b, DEFAULT_CLASSIFY_CAP);
    if t.tag != TypeTag::Affine {
        return Err(Error::NotAffine {
            got: t.tag_str().into(),
        });
    }
    Ok(has_affine_pair(b))
}

pub(crate) fn has_affine_pair(b: &ExchangeMatrix) -> bool {
    affine_pair_candidates(b).next().is_some()
}

fn affine_pair_candidates(b: &ExchangeMatrix) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = b.n();
    (0..n).flat_map(move |i| {
        (0..n).filter_map(move |j| {
            if i != j && b.entry(i, j).is_positive() && b.entry(i, j) * b.entry(j, i) == num::int(-4)
            {
                Some((i, j))
            } else {
                None
            }
        })
    })
}

fn violation(clause: &str) -> Error {
    Error::StructureViolation {
        clause: clause.into(),
    }
}

/// Quasi-leaf test for column `col` of the block submatrix `m`: at most
/// two nonzero entries, the two-entry case forming the 3×3 cyclic pattern.
fn is_quasi_leaf(m: &IntMat, col: usize) -> bool {
    let nz: Vec<usize> = (0..m.rows())
        .filter(|&i| i != col && !m[(i, col)].is_zero())
        .collect();
    match nz.len() {
        0 | 1 => true,
        2 => {
            let pattern = IntMat::from_i64(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]);
            for (a, c) in [(nz[0], nz[1]), (nz[1], nz[0])] {
                let sub = m.submatrix(&[col, a, c], &[col, a, c]);
                if sub == pattern || sub == pattern.neg() {
                    return true;
                }
            }
            false
        }
        _ => false,
    }
}

fn try_structure(b: &ExchangeMatrix, p: usize, nn: usize) -> Result<NeighboringStructure> {
    let n = b.n();
    let non_affine: Vec<usize> = (0..n).filter(|&k| k != p && k != nn).collect();
    let sub = b.mat().submatrix(&non_affine, &non_affine);
    let comp_blocks = classify::block_decompose(&sub);
    let mut blocks: Vec<Vec<usize>> = comp_blocks
        .iter()
        .map(|blk| blk.iter().map(|&i| non_affine[i]).collect())
        .collect();
    if blocks.len() > 3 {
        return Err(violation("more than three diagonal blocks"));
    }
    let mut special_indices = Vec::new();
    let mut table_types = Vec::new();
    for block in blocks.iter_mut() {
        let coupled: Vec<usize> = block
            .iter()
            .copied()
            .filter(|&k| !b.entry(k, p).is_zero() || !b.entry(k, nn).is_zero())
            .collect();
        if coupled.len() != 1 {
            return Err(violation("block must couple to the affine pair in exactly one index"));
        }
        let k = coupled[0];
        // Coupling rows/columns must match Table 1 on (k, p, n) exactly.
        let sub3 = b.mat().submatrix(&[k, p, nn], &[k, p, nn]);
        let Some(t) = table_lookup(&sub3) else {
            return Err(violation("coupling submatrix not in Table 1"));
        };
        // Block is of finite type A with the special column a quasi-leaf.
        let block_mat = b.mat().submatrix(block, block);
        let block_ex = ExchangeMatrix::new(block_mat.clone())
            .map_err(|_| violation("diagonal block not skew-symmetrizable"))?;
        if !classify::finite_type_a(&block_ex)? {
            return Err(violation("diagonal block not of finite type A"));
        }
        let pos_in_block = block.iter().position(|&i| i == k).unwrap();
        if !is_quasi_leaf(&block_mat, pos_in_block) {
            return Err(violation("special column is not a quasi-leaf of its block"));
        }
        // Reorder the block: non-special ascending, special last.
        block.retain(|&i| i != k);
        block.push(k);
        special_indices.push(k);
        table_types.push(t);
    }
    // Rescaled and exceptional couplings force a single block.
    let exceptional = table_types
        .iter()
        .any(|t| matches!(t, TableType::G2x1 | TableType::D4x3 | TableType::A4x2a | TableType::A4x2b));
    if exceptional && blocks.len() != 1 {
        return Err(violation("exceptional coupling with more than one block"));
    }
    if table_types
        .iter()
        .any(|t| matches!(t, TableType::G2x1 | TableType::D4x3))
        && n != 3
    {
        return Err(violation("G2/D4 coupling forces n = 3"));
    }
    // Sort blocks by increasing size (stable on first member).
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&i| (blocks[i].len(), blocks[i][0]));
    let blocks: Vec<Vec<usize>> = order.iter().map(|&i| blocks[i].clone()).collect();
    let special_indices: Vec<usize> = order.iter().map(|&i| special_indices[i]).collect();
    let table_types: Vec<TableType> = order.iter().map(|&i| table_types[i]).collect();
    let mut relabeling: Vec<usize> = blocks.iter().flatten().copied().collect();
    relabeling.push(p);
    relabeling.push(nn);
    Ok(NeighboringStructure {
        affine_pair: (p, nn),
        special_indices,
        blocks,
        table_types,
        relabeling,
    })
}

/// Full decomposition per the neighboring structure theorem. Validation
/// failures are internal consistency errors for genuinely affine input.
pub fn neighboring_structure(b: &ExchangeMatrix) -> Result<NeighboringStructure> {
    let mut last_err = Error::NotNeighboring;
    for (p, nn) in affine_pair_candidates(b) {
        match try_structure(b, p, nn) {
            Ok(s) => return Ok(s),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// δ for an acyclic affine exchange matrix: the primitive positive kernel
/// vector of the symmetrized Cartan companion.
pub fn delta_acyclic(b: &ExchangeMatrix) -> Result<Vec<num::Int>> {
    if !b.is_acyclic() {
        return Err(Error::NotAcyclicAffine);
    }
    let a = b.cartan_companion();
    let d = b.symmetrizer();
    let n = b.n();
    let mut sym = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = &d[i] * &a[(i, j)];
        }
    }
    let kernel = num::kernel(&sym.to_q_rows(), n);
    if kernel.len() != 1 {
        return Err(Error::NotAcyclicAffine);
    }
    let delta = primitive_signed(&kernel[0]);
    if delta.iter().any(|x| x.is_negative()) {
        return Err(Error::NotAcyclicAffine);
    }
    Ok(delta)
}

/// δ and imaginary-ray data for a general affine exchange matrix, with
/// the transport path to a neighboring representative.
#[derive(Clone, Debug)]
pub struct DeltaData {
    pub delta: Vec<num::Int>,
    /// −½·B·δ, the shortest integer vector spanning the imaginary ray.
    pub ray: Vec<num::Int>,
    /// Path from B to the neighboring representative (application order).
    pub transport_path: MutationSequence,
    pub neighboring: ExchangeMatrix,
    pub structure: NeighboringStructure,
    /// δ and ray at the neighboring representative.
    pub delta_at_neighbor: Vec<num::Int>,
    pub ray_at_neighbor: Vec<num::Int>,
}

/// Closed form of δ at a neighboring matrix: zero off the affine pair,
/// affine entries (1,1), (2,1) or (1,2) by the affine submatrix.
fn delta_neighboring(b: &ExchangeMatrix, s: &NeighboringStructure) -> Result<Vec<num::Int>> {
    let (p, nn) = s.affine_pair;
    let bpn = b.entry(p, nn);
    let bnp = b.entry(nn, p);
    let (dp, dn) = if (bpn, bnp) == (&num::int(2), &num::int(-2)) {
        (1, 1)
    } else if (bpn, bnp) == (&num::int(4), &num::int(-1)) {
        (2, 1)
    } else if (bpn, bnp) == (&num::int(1), &num::int(-4)) {
        (1, 2)
    } else {
        return Err(Error::Internal("affine submatrix not of a known shape".into()));
    };
    let mut delta = vec![num::int(0); b.n()];
    delta[p] = num::int(dp);
    delta[nn] = num::int(dn);
    Ok(delta)
}

fn half_neg_b_delta(b: &ExchangeMatrix, delta: &[num::Int]) -> Result<Vec<num::Int>> {
    let bd = b.mat().mul_vec_int(delta);
    let two = num::int(2);
    bd.iter()
        .map(|x| {
            let neg = -x;
            if (&neg % &two).is_zero() {
                Ok(neg / &two)
            } else {
                Err(Error::Internal("B·δ is not even".into()))
            }
        })
        .collect()
}

pub fn delta_general(b: &ExchangeMatrix) -> Result<DeltaData> {
    let t = classify(b, DEFAULT_CLASSIFY_CAP);
    if t.tag != TypeTag::Affine {
        return Err(Error::NotAffine {
            got: t.tag_str().into(),
        });
    }
    // BFS to the first neighboring member of the (affine, hence
    // mutation-finite) class; neighboring seeds always exist.
    let (class, complete) = classify::mutation_class(b, DEFAULT_CLASSIFY_CAP);
    let mut found = None;
    for (m, path) in &class {
        if has_affine_pair(m) {
            found = Some((m.clone(), path.clone()));
            break;
        }
    }
    let Some((bn, path)) = found else {
        return Err(if complete {
            Error::Internal("affine class without neighboring member".into())
        } else {
            Error::BudgetExhausted {
                cap: DEFAULT_CLASSIFY_CAP,
            }
        });
    };
    let structure = neighboring_structure(&bn)?;
    let delta_n = delta_neighboring(&bn, &structure)?;
    let ray_n = half_neg_b_delta(&bn, &delta_n)?;
    if path.is_empty() {
        return Ok(DeltaData {
            delta: delta_n.clone(),
            ray: ray_n.clone(),
            transport_path: path,
            neighboring: bn,
            structure,
            delta_at_neighbor: delta_n,
            ray_at_neighbor: ray_n,
        });
    }
    // Transport wall-spanning vectors back from the neighboring seed and
    // read off the wall normal, then δ via the co-root correction D⁻¹ν.
    let back = path.reversed();
    let transport = |x: &[Q]| -> Result<Vec<Q>> { Ok(eta(&bn, &back, x)?.0) };
    let n = b.n();
    let (p, nn) = structure.affine_pair;
    let ray_q = num::qvec_of_ints(&ray_n);
    let mut candidates: Vec<Vec<Q>> = vec![ray_q.clone()];
    for i in (0..n).filter(|&i| i != p && i != nn) {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        candidates.push(e.clone());
        candidates.push(num::add(&e, &ray_q));
    }
    let mut spanning: Vec<Vec<Q>> = Vec::new();
    let transported_ray = transport(&ray_q)?;
    for cand in &candidates {
        if spanning.len() == n - 1 {
            break;
        }
        let v = transport(cand)?;
        let mut trial = spanning.clone();
        trial.push(v);
        if num::rank(&trial) == trial.len() {
            spanning = trial;
        }
    }
    if spanning.len() != n - 1 {
        return Err(Error::Internal("transported wall vectors do not span".into()));
    }
    let kernel = num::kernel(&spanning, n);
    if kernel.len() != 1 {
        return Err(Error::Internal("wall normal is not unique".into()));
    }
    let nu = &kernel[0];
    let d = b.symmetrizer();
    let delta_dir: Vec<Q> = (0..n).map(|i| &nu[i] / q_of(&d[i])).collect();
    let delta = primitive_signed(&delta_dir);
    if delta.iter().any(|x| x.is_negative()) {
        // primitive_signed normalizes the first nonzero entry positive;
        // mixed signs mean the normal computation went wrong.
        return Err(Error::Internal("δ is not sign-definite".into()));
    }
    let ray = half_neg_b_delta(b, &delta)?;
    let transported_ray_int = primitive(&transported_ray);
    if ray != transported_ray_int
        || num::qvec_of_ints(&ray) != transported_ray
    {
        return Err(Error::Internal(
            "transported imaginary ray disagrees with −½Bδ".into(),
        ));
    }
    Ok(DeltaData {
        delta,
        ray,
        transport_path: path,
        neighboring: bn,
        structure,
        delta_at_neighbor: delta_n,
        ray_at_neighbor: ray_n,
    })
}

impl DeltaData {
    /// Coefficient of x along the imaginary ray after transport to the
    /// neighboring seed: Some(c) with c ≥ 0 exactly when x lies on the
    /// imaginary wall (c > 0: relative interior; c = 0: relative boundary).
    pub fn wall_coefficient(&self, b: &ExchangeMatrix, x: &[Q]) -> Result<Option<Q>> {
        let y = eta(b, &self.transport_path, x)?.0;
        let (p, nn) = self.structure.affine_pair;
        let aff = vec![y[p].clone(), y[nn].clone()];
        let ray_aff = vec![
            q_of(&self.ray_at_neighbor[p]),
            q_of(&self.ray_at_neighbor[nn]),
        ];
        Ok(is_nonneg_multiple(&aff, &ray_aff))
    }

    /// The imaginary wall of B as an exact region (a union of polyhedral
    /// cones; a single half-hyperplane at a neighboring seed).
    pub fn wall_region(&self, b: &ExchangeMatrix) -> Result<Vec<Polyhedron>> {
        let n = b.n();
        let (p, nn) = self.structure.affine_pair;
        let mut wall = Polyhedron {
            vertices: vec![vec![Q::zero(); n]],
            rays: vec![self.ray_at_neighbor.clone()],
            lineality: (0..n)
                .filter(|&i| i != p && i != nn)
                .map(|i| {
                    let mut e = vec![num::int(0); n];
                    e[i] = num::int(1);
                    e
                })
                .collect(),
        };
        wall.canonicalize();
        if self.transport_path.is_empty() {
            return Ok(vec![wall]);
        }
        map_region_exact_square(
            self.neighboring.mat(),
            n,
            &self.transport_path.reversed(),
            vec![wall],
            crate::mutmap::DEFAULT_PIECE_CAP,
        )
    }
}

/// Type-C companion data of a neighboring exchange matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionC {
    /// (n−2)×(n−2) companion: non-affine rows and columns, special columns doubled.
    pub mat: ExchangeMatrix,
    /// n×(n−2): all rows of the non-affine columns, special columns doubled.
    pub bar: IntMat,
    /// Companion position → original index (non-affine indices, ascending).
    pub index_map: Vec<usize>,
}

pub fn companion_c(b: &ExchangeMatrix, s: &NeighboringStructure) -> Result<CompanionC> {
    let n = b.n();
    let non_affine = s.non_affine_indices(n);
    let mut comp = IntMat::zeros(non_affine.len(), non_affine.len());
    let mut bar = IntMat::zeros(n, non_affine.len());
    for (cj, &j) in non_affine.iter().enumerate() {
        let double = s.is_special(j);
        for i in 0..n {
            let mut v = b.entry(i, j).clone();
            if double {
                v = &v * num::int(2);
            }
            bar[(i, cj)] = v;
        }
        for (ci, &i) in non_affine.iter().enumerate() {
            comp[(ci, cj)] = bar[(i, cj)].clone();
        }
    }
    let mat = ExchangeMatrix::new(comp)
        .map_err(|_| Error::Internal("type-C companion not skew-symmetrizable".into()))?;
    Ok(CompanionC {
        mat,
        bar,
        index_map: non_affine,
    })
}

/// Comp_C(B): requires B neighboring.
pub fn comp_c(b: &ExchangeMatrix) -> Result<ExchangeMatrix> {
    let s = neighboring_structure(b)?;
    Ok(companion_c(b, &s)?.mat)
}

/// The n×(n−2) matrix of non-affine columns with special columns doubled.
pub fn comp_c_bar(b: &ExchangeMatrix) -> Result<IntMat> {
    let s = neighboring_structure(b)?;
    Ok(companion_c(b, &s)?.bar)
}

/// Per-case expanded word replacing a mutation at a special index `k`,
/// in application order, with (p, n) the affine pair.
fn special_word(t: TableType, k: usize, p: usize, nn: usize) -> Vec<usize> {
    match t {
        TableType::G2x1 | TableType::D4x3 => vec![k, nn, p, nn, k, nn, k],
        _ => vec![k, nn, k, p, k],
    }
}

/// Expands a sequence of non-affine indices: special indices are replaced
/// by the case-specific word; non-special indices are kept.
pub fn expand_sequence(
    s: &NeighboringStructure,
    seq: &MutationSequence,
) -> Result<MutationSequence> {
    let (p, nn) = s.affine_pair;
    let mut out = Vec::new();
    for k in seq.iter() {
        if s.is_affine_index(k) {
            return Err(Error::AffineIndexInSequence { index: k + 1 });
        }
        if let Some(t) = s.table_type_of(k) {
            out.extend(special_word(t, k, p, nn));
        } else {
            out.push(k);
        }
    }
    Ok(MutationSequence::from_zero_based(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{ivec, qvec};

    fn ex(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_i64(rows).unwrap()
    }

    fn a2_affine() -> ExchangeMatrix {
        ex(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]])
    }

    fn rank4_example() -> ExchangeMatrix {
        ex(&[&[0, 1, 0, 0], &[-1, 0, 1, -1], &[0, -1, 0, 2], &[0, 1, -2, 0]])
    }

    #[test]
    fn delta_acyclic_examples() {
        assert_eq!(delta_acyclic(&ex(&[&[0, 2], &[-2, 0]])).unwrap(), ivec(&[1, 1]));
        assert_eq!(
            delta_acyclic(&ex(&[&[0, 1, 1], &[-1, 0, 1], &[-1, -1, 0]])).unwrap(),
            ivec(&[1, 1, 1])
        );
        assert_eq!(delta_acyclic(&ex(&[&[0, 4], &[-1, 0]])).unwrap(), ivec(&[2, 1]));
        assert!(delta_acyclic(&a2_affine()).is_err(), "cyclic input rejected");
    }

    #[test]
    fn neighboring_detection() {
        assert!(is_neighboring(&a2_affine()).unwrap());
        assert!(!is_neighboring(&ex(&[&[0, 1, 1], &[-1, 0, 1], &[-1, -1, 0]])).unwrap());
        assert!(is_neighboring(&ex(&[&[0, 2], &[-2, 0]])).unwrap());
        assert!(matches!(
            is_neighboring(&ex(&[&[0
, 1], &[-1, 0]])),
            Err(Error::NotAffine { .. })
        ));
    }

    #[test]
    fn structure_of_table_a2() {
        let s = neighboring_structure(&a2_affine()).unwrap();
        assert_eq!(s.affine_pair, (1, 2));
        assert_eq!(s.special_indices, vec![0]);
        assert_eq!(s.blocks, vec![vec![0]]);
        assert_eq!(s.table_types, vec![TableType::A2x1]);
    }

    #[test]
    fn structure_of_rank4() {
        let s = neighboring_structure(&rank4_example()).unwrap();
        assert_eq!(s.affine_pair, (2, 3));
        assert_eq!(s.special_indices, vec![1]);
        assert_eq!(s.blocks, vec![vec![0, 1]]);
        assert_eq!(s.table_types, vec![TableType::A2x1]);
        assert_eq!(s.relabeling, vec![0, 1, 2, 3]);
    }

    #[test]
    fn structure_of_g2() {
        let b = ex(&[&[0, 3, -3], &[-1, 0, 2], &[1, -2, 0]]);
        let s = neighboring_structure(&b).unwrap();
        assert_eq!(s.table_types, vec![TableType::G2x1]);
        assert_eq!(s.blocks, vec![vec![0]]);
    }

    #[test]
    fn delta_general_neighboring_cases() {
        let dd = delta_general(&ex(&[&[0, 2], &[-2, 0]])).unwrap();
        assert_eq!(dd.delta, ivec(&[1, 1]));
        assert_eq!(dd.ray, ivec(&[-1, 1]));
        assert!(dd.transport_path.is_empty());

        let dd = delta_general(&a2_affine()).unwrap();
        assert_eq!(dd.delta, ivec(&[0, 1, 1]));
        assert_eq!(dd.ray, ivec(&[0, -1, 1]));

        let dd = delta_general(&rank4_example()).unwrap();
        assert_eq!(dd.delta, ivec(&[0, 0, 1, 1]));
        assert_eq!(dd.ray, ivec(&[0, 0, -1, 1]));
    }

    #[test]
    fn delta_general_with_transport() {
        // Mutate away from the neighboring representative and recompute.
        let b0 = a2_affine();
        for k in 0..3 {
            let b = b0.mutate(k).unwrap();
            let dd = delta_general(&b).unwrap();
            // δ is primitive, nonnegative, and −½Bδ is integral.
            assert!(dd.delta.iter().all(|x| !x.is_negative()));
            assert_eq!(half_neg_b_delta(&b, &dd.delta).unwrap(), dd.ray);
            // Transport invariance: η along the path takes −½Bδ to the
            // neighboring ray.
            let (y, _) = eta(&b, &dd.transport_path, &num::qvec_of_ints(&dd.ray)).unwrap();
            assert_eq!(y, num::qvec_of_ints(&dd.ray_at_neighbor));
        }

        // An acyclic (non-neighboring) affine matrix agrees with the
        // kernel-based δ.
        let acyclic = ex(&[&[0, 1, 1], &[-1, 0, 1], &[-1, -1, 0]]);
        let dd = delta_general(&acyclic).unwrap();
        assert_eq!(dd.delta, delta_acyclic(&acyclic).unwrap());
    }

    #[test]
    fn wall_membership_rank2() {
        let b = ex(&[&[0, 2], &[-2, 0]]);
        let dd = delta_general(&b).unwrap();
        assert_eq!(
            dd.wall_coefficient(&b, &qvec(&[-2, 2])).unwrap(),
            Some(num::q(2))
        );
        assert_eq!(
            dd.wall_coefficient(&b, &qvec(&[0, 0])).unwrap(),
            Some(num::q(0))
        );
        assert_eq!(dd.wall_coefficient(&b, &qvec(&[1, 1])).unwrap(), None);
    }

    #[test]
    fn wall_region_a2_affine() {
        let b = a2_affine();
        let dd = delta_general(&b).unwrap();
        let wall = dd.wall_region(&b).unwrap();
        assert_eq!(wall.len(), 1);
        // (1, −2, 2) is on the wall; (1, 1, 1) is not.
        assert!(wall[0].contains_point(&qvec(&[1, -2, 2])));
        assert!(wall[0].contains_point(&qvec(&[5, 0, 0])));
        assert!(!wall[0].contains_point(&qvec(&[1, 1, 1])));
        assert!(!wall[0].contains_point(&qvec(&[0, 1, -1])), "wrong side of the ray");
    }

    #[test]
    fn companion_examples() {
        let c = comp_c(&a2_affine()).unwrap();
        assert_eq!(c.mat(), &IntMat::from_i64(&[&[0]]));
        assert_eq!(
            comp_c_bar(&a2_affine()).unwrap(),
            IntMat::from_i64(&[&[0], &[-2], &[2]])
        );

        let c = comp_c(&rank4_example()).unwrap();
        assert_eq!(c.mat(), &IntMat::from_i64(&[&[0, 2], &[-1, 0]]));
        assert!(classify::finite_type_c_or_a1(&c).unwrap());

        let c2_table = ex(&[&[0, 2, -2], &[-1, 0, 2], &[1, -2, 0]]);
        assert_eq!(
            comp_c_bar(&c2_table).unwrap(),
            IntMat::from_i64(&[&[0], &[-2], &[2]])
        );
    }

    #[test]
    fn expand_sequence_cases() {
        let b = a2_affine();
        let s = neighboring_structure(&b).unwrap();
        let seq = MutationSequence::new(vec![1], 3).unwrap();
        let expanded = expand_sequence(&s, &seq).unwrap();
        assert_eq!(expanded.one_based(), &[1, 3, 1, 2, 1]);

        // Affine index rejected.
        let bad = MutationSequence::new(vec![2], 3).unwrap();
        assert!(expand_sequence(&s, &bad).is_err());

        // Non-special indices pass through (no non-special exists here,
        // so check on the rank-4 example: index 1 is non-special).
        let b4 = rank4_example();
        let s4 = neighboring_structure(&b4).unwrap();
        let seq = MutationSequence::new(vec![1, 2], 4).unwrap();
        let expanded = expand_sequence(&s4, &seq).unwrap();
        assert_eq!(expanded.one_based(), &[1, 2, 4, 2, 3, 2]);
    }

    #[test]
    fn case1_chain_replay() {
        // The displayed five-step chain for the A_2^(1) coupling returns
        // to the start and passes through the displayed matrices.
        let b = a2_affine();
        let expected = [
            ex(&[&[0, -1, 1], &[1, 0, 1], &[-1, -1, 0]]),
            ex(&[&[0, -1, -1], &[1, 0, -1], &[1, 1, 0]]),
            ex(&[&[0, 1, 1], &[-1, 0, -1], &[-1, 1, 0]]),
            ex(&[&[0, -1, 1], &[1, 0, 1], &[-1, -1, 0]]),
            b.clone(),
        ];
        let word = [0usize, 2, 0, 1, 0];
        let mut cur = b;
        for (k, exp) in word.iter().zip(&expected) {
            cur = cur.mutate(*k).unwrap();
            assert_eq!(&cur, exp);
        }
    }

    #[test]
    fn affine_mut_double_mutation_identity() {
        for b in [a2_affine(), rank4_example(), ex(&[&[0, 2], &[-2, 0]])] {
            let s = neighboring_structure(&b).unwrap();
            let (p, nn) = s.affine_pair;
            let m = b.mutate(p).unwrap().mutate(nn).unwrap();
            assert_eq!(m, b, "mutating both affine indices restores B");
            let m = b.mutate(nn).unwrap().mutate(p).unwrap();
            assert_eq!(m, b);
        }
    }

    #[test]
    fn nonspecial_and_special_mut_properties() {
        let b = rank4_example();
        let s = neighboring_structure(&b).unwrap();
        let comp = companion_c(&b, &s).unwrap();

        // Non-special index 0: companion commutes with mutation.
        let b1 = b.mutate(0).unwrap();
        let s1 = neighboring_structure(&b1).unwrap();
        assert_eq!(s1.affine_pair, s.affine_pair);
        assert_eq!(s1.special_indices, s.special_indices);
        let comp1 = companion_c(&b1, &s1).unwrap();
        assert_eq!(comp1.mat, comp.mat.mutate(0).unwrap());

        // Special index 1: expanded word, companion mutates at 1.
        let seq = MutationSequence::new(vec![2], 4).unwrap();
        let expanded = expand_sequence(&s, &seq).unwrap();
        let bw = b.mutate_seq(&expanded).unwrap();
        let sw = neighboring_structure(&bw).unwrap();
        assert_eq!(sw.affine_pair, s.affine_pair);
        assert_eq!(sw.special_indices, s.special_indices);
        let compw = companion_c(&bw, &sw).unwrap();
        assert_eq!(compw.mat, comp.mat.mutate(1).unwrap());
        // Affine rows of the bar matrix are preserved.
        for cj in 0..2 {
            for &i in &[2usize, 3] {
                assert_eq!(compw.bar[(i, cj)], comp.bar[(i, cj)]);
            }
        }

        // η along the expanded word fixes the imaginary ray.
        let dd = delta_general(&b).unwrap();
        let ray = num::qvec_of_ints(&dd.ray);
        let (y, _) = eta(&b, &expanded, &ray).unwrap();
        assert_eq!(y, ray);

        // Factorization: on vectors with zero affine entries, η along the
        // expanded word equals the companion's η at the special index.
        let x = qvec(&[3, -1, 0, 0]);
        let (y, _) = eta(&b, &expanded, &x).unwrap();
        assert_eq!(&y[2..], &qvec(&[0, 0])[..]);
        let x0 = qvec(&[3, -1]);
        let comp_seq = MutationSequence::new(vec![2], 2).unwrap();
        let (y0, _) = eta(&comp.mat, &comp_seq, &x0).unwrap();
        assert_eq!(&y[..2], &y0[..]);
    }
}
