//! Exchange matrices, mutation, the auxiliary E/F matrices, and square
//! extensions of tall extended exchange matrices.
//!
//! Sequences of mutation indices are stored in application order: the
//! first element of a `MutationSequence` is the first mutation applied.

use crate::error::{Error, Result};
use crate::matrix::IntMat;
use crate::num::{Int, Q};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn pos_part(x: &Int) -> Int {
    if x.is_positive() {
        x.clone()
    } else {
        Int::zero()
    }
}

/// Matrix mutation at column/row `k` (0-based), applied to any matrix whose
/// row `k` and column `k` both exist. Covers square and tall matrices alike.
pub fn mutate_raw(m: &IntMat, k: usize) -> IntMat {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i == k || j == k {
                out[(i, j)] = -&m[(i, j)];
            } else {
                let add = pos_part(&m[(i, k)]) * pos_part(&m[(k, j)])
                    - pos_part(&-&m[(i, k)]) * pos_part(&-&m[(k, j)]);
                out[(i, j)] = &m[(i, j)] + add;
            }
        }
    }
    out
}

/// Minimal positive integral diagonal `D` with `D·M·D⁻¹ = −Mᵀ`,
/// normalized so the entries of each connected component have gcd 1.
pub fn symmetrizer(m: &IntMat) -> Result<Vec<Int>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.cols(),
        });
    }
    for i in 0..n {
        if !m[(i, i)].is_zero() {
            return Err(Error::NotSkewSymmetrizable { i: i + 1, j: i + 1 });
        }
        for j in 0..n {
            if m.entry_sign(i, j) != -m.entry_sign(j, i) {
                return Err(Error::NotSkewSymmetrizable { i: i + 1, j: j + 1 });
            }
        }
    }
    // Propagate the ratio d_j/d_i = |m_ij|/|m_ji| over each connected
    // component of the nonzero pattern, then clear denominators minimally.
    let mut d: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Q::one());
        let mut component = vec![start];
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            let di = d[i].clone().unwrap();
            for j in 0..n {
                if m[(i, j)].is_zero() {
                    continue;
                }
                let ratio = Q::new(m[(i, j)].abs(), m[(j, i)].abs());
                let dj = &di * ratio;
                match &d[j] {
                    Some(old) => {
                        if *old != dj {
                            return Err(Error::NotSkewSymmetrizable { i: i + 1, j: j + 1 });
                        }
                    }
                    None => {
                        d[j] = Some(dj);
                        component.push(j);
                        queue.push(j);
                    }
                }
            }
        }
        let mut l = Int::one();
        for &i in &component {
            l = l.lcm(d[i].as_ref().unwrap().denom());
        }
        let mut g = Int::zero();
        let mut ints = Vec::new();
        for &i in &component {
            let r = d[i].as_ref().unwrap();
            let v = r.numer() * (&l / r.denom());
            g = g.gcd(&v);
            ints.push(v);
        }
        for (&i, v) in component.iter().zip(ints) {
            d[i] = Some(Q::from_integer(v / &g));
        }
    }
    let d: Vec<Int> = d.into_iter().map(|x| x.unwrap().to_integer()).collect();
    for i in 0..n {
        for j in 0..n {
            if &d[i] * &m[(i, j)] != -(&d[j] * &m[(j, i)]) {
                return Err(Error::NotSkewSymmetrizable { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(d)
}

/// A skew-symmetrizable exchange matrix with its cached minimal symmetrizer.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExchangeMatrix {
    b: IntMat,
    d: Vec<Int>,
}

impl ExchangeMatrix {
    pub fn new(b: IntMat) -> Result<Self> {
        let d = symmetrizer(&b)?;
        Ok(ExchangeMatrix { b, d })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        ExchangeMatrix::new(IntMat::from_i64(rows))
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn mat(&self) -> &IntMat {
        &self.b
    }

    pub fn symmetrizer(&self) -> &[Int] {
        &self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &Int {
        &self.b[(i, j)]
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// μ_k, 0-based index. The symmetrizer is unchanged by mutation.
    pub fn mutate(&self, k: usize) -> Result<ExchangeMatrix> {
        self.check_index(k)?;
        Ok(ExchangeMatrix {
            b: mutate_raw(&self.b, k),
            d: self.d.clone(),
        })
    }

    pub fn mutate_seq(&self, seq: &MutationSequence) -> Result<ExchangeMatrix> {
        let mut cur = self.clone();
        for k in seq.iter() {
            cur = cur.mutate(k)?;
        }
        Ok(cur)
    }

    pub fn neg(&self) -> ExchangeMatrix {
        ExchangeMatrix {
            b: self.b.neg(),
            d: self.d.clone(),
        }
    }

    pub fn transpose(&self) -> ExchangeMatrix {
        ExchangeMatrix::new(self.b.transpose()).expect("transpose stays skew-symmetrizable")
    }

    /// −Bᵀ, the rescaling companion used for G-matrices.
    pub fn neg_transpose(&self) -> ExchangeMatrix {
        ExchangeMatrix::new(self.b.transpose().neg()).expect("-B^T stays skew-symmetrizable")
    }

    /// Cartan companion: 2 on the diagonal, −|b_ij| off it.
    pub fn cartan_companion(&self) -> IntMat {
        let n = self.n();
        let mut a = IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = if i == j {
                    Int::from(2)
                } else {
                    -self.b[(i, j)].abs()
                };
            }
        }
        a
    }

    /// Digraph acyclicity of the sign pattern (edge i→j when b_ij > 0).
    pub fn is_acyclic(&self) -> bool {
        let n = self.n();
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        fn dfs(v: usize, b: &IntMat, state: &mut [u8]) -> bool {
            state[v] = 1;
            for w in 0..b.cols() {
                if b[(v, w)].is_positive() {
                    match state[w] {
                        0 => {
                            if !dfs(w, b, state) {
                                return false;
                            }
                        }
                        1 => return false,
                        _ => {}
                    }
                }
            }
            state[v] = 2;
            true
        }
        (0..n).all(|v| state[v] != 0 || dfs(v, &self.b, &mut state))
    }
}

/// E and F matrices at index `k` (0-based) and sign `eps`:
/// `E = J_k + [εB]₊^{•k}`, `F = J_k + [−εB]₊^{k•}`.
/// Both are involutions and `μ_k(B) = E·B·F` for either sign.
pub fn ef_matrices(b: &ExchangeMatrix, k: usize, eps: i32) -> Result<(IntMat, IntMat)> {
    assert!(eps == 1 || eps == -1);
    if k >= b.n() {
        return Err(Error::IndexOutOfRange {
            index: k + 1,
            n: b.n(),
        });
    }
    Ok((e_matrix_raw(b.mat(), k, eps), f_matrix_raw(b.mat(), k, eps)))
}

pub(crate) fn e_matrix_raw(b: &IntMat, k: usize, eps: i32) -> IntMat {
    let m = b.rows();
    let mut e = IntMat::identity(m);
    e[(k, k)] = Int::from(-1);
    for i in 0..m {
        if i != k {
            let x = if eps == 1 { b[(i, k)].clone() } else { -&b[(i, k)] };
            e[(i, k)] = pos_part(&x);
        }
    }
    e
}

pub(crate) fn f_matrix_raw(b: &IntMat, k: usize, eps: i32) -> IntMat {
    let n = b.cols();
    let mut f = IntMat::identity(n);
    f[(k, k)] = Int::from(-1);
    for j in 0..n {
        if j != k {
            let x = if eps == 1 { -&b[(k, j)] } else { b[(k, j)].clone() };
            f[(k, j)] = pos_part(&x);
        }
    }
    f
}

/// Tall m×n extended exchange matrix; the top n×n block is an exchange matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtendedExchangeMatrix {
    mat: IntMat,
    top: ExchangeMatrix,
}

impl ExtendedExchangeMatrix {
    pub fn new(mat: IntMat) -> Result<Self> {
        let n = mat.cols();
        if mat.rows() < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mat.rows(),
            });
        }
        let top = ExchangeMatrix::new(mat.submatrix(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>()))?;
        Ok(ExtendedExchangeMatrix { mat, top })
    }

    /// Principal coefficients: B stacked over the identity.
    pub fn principal(b: &ExchangeMatrix) -> Self {
        let mat = b.mat().stack(&IntMat::identity(b.n()));
        ExtendedExchangeMatrix {
            mat,
            top: b.clone(),
        }
    }

    /// Coefficient-free: m = n.
    pub fn square(b: &ExchangeMatrix) -> Self {
        ExtendedExchangeMatrix {
            mat: b.mat().clone(),
            top: b.clone(),
        }
    }

    pub fn m(&self) -> usize {
        self.mat.rows()
    }

    pub fn n(&self) -> usize {
        self.mat.cols()
    }

    pub fn mat(&self) -> &IntMat {
        &self.mat
    }

    pub fn top(&self) -> &ExchangeMatrix {
        &self.top
    }

    pub fn bottom(&self) -> IntMat {
        self.mat.submatrix(&(self.n()..self.m()).collect::<Vec<_>>(), &(0..self.n()).collect::<Vec<_>>())
    }

    pub fn mutate(&self, k: usize) -> Result<ExtendedExchangeMatrix> {
        if k >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                n: self.n(),
            });
        }
        Ok(ExtendedExchangeMatrix {
            mat: mutate_raw(&self.mat, k),
            top: self.top.mutate(k)?,
        })
    }

    pub fn mutate_seq(&self, seq: &MutationSequence) -> Result<ExtendedExchangeMatrix> {
        let mut cur = self.clone();
        for k in seq.iter() {
            cur = cur.mutate(k)?;
        }
        Ok(cur)
    }

    /// Columns are linearly independent over the rationals.
    pub fn has_independent_columns(&self) -> bool {
        crate::num::rank(&self.mat.to_q_rows()) == self.n()
    }
}

/// The m×m skew-symmetrizable completion 𝐁 = [[B, −R′ᵀ], [R, 0]].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareExtension {
    mat: IntMat,
    aux_symmetrizer: Vec<Int>,
}

impl SquareExtension {
    pub fn mat(&self) -> &IntMat {
        &self.mat
    }

    pub fn aux_symmetrizer(&self) -> &[Int] {
        &self.aux_symmetrizer
    }

    pub fn m(&self) -> usize {
        self.mat.rows()
    }

    /// Mutation in position k ≤ n is ordinary square mutation of 𝐁.
    pub fn mutate(&self, k: usize) -> SquareExtension {
        SquareExtension {
            mat: mutate_raw(&self.mat, k),
            aux_symmetrizer: self.aux_symmetrizer.clone(),
        }
    }
}

/// Builds 𝐁 from B̃ with the minimal integral D′ making R′ = D′·R·D⁻¹ integral.
pub fn square_extension(bt: &ExtendedExchangeMatrix) -> SquareExtension {
    let n = bt.n();
    let m = bt.m();
    let d = bt.top().symmetrizer().to_vec();
    let r = bt.bottom();
    let mut d_prime = Vec::with_capacity(m - n);
    for i in 0..m - n {
        // minimal positive d'_i with d_j | d'_i·r_ij for every j
        let mut need = Int::one();
        for j in 0..n {
            let g = d[j].gcd(&r[(i, j)]);
            need = need.lcm(&(&d[j] / g));
        }
        d_prime.push(need);
    }
    let mut mat = IntMat::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            mat[(i, j)] = bt.top().entry(i, j).clone();
        }
    }
    for i in 0..m - n {
        for j in 0..n {
            let r_prime = &d_prime[i] * &r[(i, j)] / &d[j];
            mat[(n + i, j)] = r[(i, j)].clone();
            mat[(j, n + i)] = -r_prime;
        }
    }
    let mut aux = d;
    aux.extend(d_prime);
    SquareExtension {
        mat,
        aux_symmetrizer: aux,
    }
}

/// Ordered list of 1-based mutation indices, first-applied first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MutationSequence {
    indices: Vec<usize>,
}

impl MutationSequence {
    /// From 1-based indices, checked against the ambient size `n`.
    pub fn new(one_based: Vec<usize>, n: usize) -> Result<Self> {
        for &k in &one_based {
            if k == 0 || k > n {
                return Err(Error::IndexOutOfRange { index: k, n });
            }
        }
        Ok(MutationSequence { indices: one_based })
    }

    pub fn from_zero_based(zero_based: impl IntoIterator<Item = usize>) -> Self {
        MutationSequence {
            indices: zero_based.into_iter().map(|k| k + 1).collect(),
        }
    }

    pub fn empty() -> Self {
        MutationSequence::default()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Application-order iteration of 0-based indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|&k| k - 1)
    }

    pub fn one_based(&self) -> &[usize] {
        &self.indices
    }

    pub fn reversed(&self) -> MutationSequence {
        MutationSequence {
            indices: self.indices.iter().rev().copied().collect(),
        }
    }

    pub fn concat(&self, other: &MutationSequence) -> MutationSequence {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        MutationSequence { indices }
    }

    pub fn repeat(&self, times: usize) -> MutationSequence {
        let mut indices = Vec::with_capacity(self.len() * times);
        for _ in 0..times {
            indices.extend_from_slice(&self.indices);
        }
        MutationSequence { indices }
    }

    pub fn push(&mut self, zero_based: usize) {
        self.indices.push(zero_based + 1);
    }

    /// The paper reads sequences right to left; this renders that form.
    pub fn display_paper_order(&self) -> String {
        self.indices
            .iter()
            .rev()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
