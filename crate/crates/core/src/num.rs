//! Exact arithmetic helpers: big integers, rationals, and small dense
//! linear algebra over the rationals. No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Q = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn q(v: i64) -> Q {
    Q::from_integer(Int::from(v))
}

pub fn q_of(v: &Int) -> Q {
    Q::from_integer(v.clone())
}

pub fn qvec_of_ints(v: &[Int]) -> Vec<Q> {
    v.iter().map(q_of).collect()
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: &Q, a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| s * x).collect()
}

pub fn neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Clears denominators and divides by the content, preserving direction.
/// The zero vector is returned unchanged.
pub fn primitive(v: &[Q]) -> Vec<Int> {
    if v.iter().all(|x| x.is_zero()) {
        return vec![Int::zero(); v.len()];
    }
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.iter().map(|x| x / &g).collect()
}

/// Primitive integer vector, sign-normalized so the first nonzero entry is positive.
pub fn primitive_signed(v: &[Q]) -> Vec<Int> {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.iter().map(|y| -y).collect(),
        _ => p,
    }
}

/// True when `b` is a nonnegative rational multiple of `a` (componentwise).
/// Zero `b` counts as a multiple of anything.
pub fn is_nonneg_multiple(b: &[Q], a: &[Q]) -> Option<Q> {
    if is_zero_vec(b) {
        return Some(Q::zero());
    }
    if is_zero_vec(a) {
        return None;
    }
    let i = a.iter().position(|x| !x.is_zero())?;
    if b[i].is_zero() {
        return None;
    }
    let c = &b[i] / &a[i];
    if c.is_negative() {
        return None;
    }
    for (x, y) in a.iter().zip(b) {
        if &(&c * x) != y {
            return None;
        }
    }
    Some(c)
}

/// Reduced row echelon form in place. Returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let nr = rows.len();
    if nr == 0 {
        return vec![];
    }
    let nc = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nr {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..nc {
                    let t = &rows[r][j] * &f;
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nr {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right kernel of the matrix given by `rows`.
pub fn kernel(rows: &[Vec<Q>], nc: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    let free: Vec<usize> = (0..nc).filter(|c| !pivots.contains(c)).collect();
    for &f in &free {
        let mut v = vec![Q::zero(); nc];
        v[f] = Q::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -m[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `A x = b` over the rationals; `None` when inconsistent.
/// Free variables are set to zero.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let nr = a.len();
    let nc = if nr == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&nc) {
        return None;
    }
    let mut x = vec![Q::zero(); nc];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][nc].clone();
    }
    Some(x)
}

/// Inverse of a square rational matrix; `None` when singular.
pub fn invert(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Q::one() } else { Q::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for j in c..n {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..n {
                    let t = &m[c][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
    }
    d
}

/// Parses "p/q" or "p" into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: Int = p.trim().parse().ok()?;
        let den: Int = q.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Q::new(num, den))
    } else {
        let num: Int = s.parse().ok()?;
        Some(Q::from_integer(num))
    }
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_clears_denominators() {
        let v = vec![Q::new(int(2), int(4)), q(3), q(-1)];
        assert_eq!(primitive(&v), ivec(&[1, 6, -2]));
        assert_eq!(primitive(&qvec(&[0, 0])), ivec(&[0, 0]));
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let a = vec![qvec(&[2, -2]), qvec(&[-2, 2])];
        let k = kernel(&a, 2);
        assert_eq!(k.len(), 1);
        assert_eq!(primitive_signed(&k[0]), ivec(&[1, 1]));
    }

    #[test]
    fn invert_round_trip() {
        let a = vec![qvec(&[1, 2]), qvec(&[3, 5])];
        let inv = invert(&a).unwrap();
        assert_eq!(inv[0], qvec(&[-5, 2]));
        assert_eq!(inv[1], qvec(&[3, -1]));
        assert!(invert(&[qvec(&[1, 2]), qvec(&[2, 4])]).is_none());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/2").unwrap(), Q::new(int(3), int(2)));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert_eq!(format_q(&Q::new(int(3), int(2))), "3/2");
        assert_eq!(format_q(&q(-4)), "-4");
        assert!(parse_q("1/0").is_none());
    }
}
