//! Dense integer matrices over arbitrary-precision integers, with the
//! text and JSON formats accepted everywhere a matrix is read.

use crate::error::{Error, Result};
use crate::num::{q_of, Int, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        IntMat {
            rows: nr,
            cols: nc,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn neg(&self) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec_q(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| q_of(&self[(i, j)]) * &v[j]).sum())
            .collect()
    }

    pub fn mul_vec_int(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMat {
        let mut m = IntMat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Vertically stacks `self` on top of `other`.
    pub fn stack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn to_q_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(q_of).collect())
            .collect()
    }

    /// Exact inverse; requires the inverse to be integral (unimodular input).
    pub fn unimodular_inverse(&self) -> Result<IntMat> {
        let inv = crate::num::invert(&self.to_q_rows())
            .ok_or_else(|| Error::Internal("singular matrix where unimodular expected".into()))?;
        let mut out = IntMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !inv[i][j].is_integer() {
                    return Err(Error::Internal(
                        "non-integral inverse where unimodular expected".into(),
                    ));
                }
                out[(i, j)] = inv[i][j].to_integer();
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entry_sign(&self, i: usize, j: usize) -> i32 {
        let x = &self[(i, j)];
        if x.is_zero() {
            0
        } else if x.is_positive() {
            1
        } else {
            -1
        }
    }

    /// One row per line, integers separated by single spaces.
    pub fn parse_text(s: &str) -> Result<IntMat> {
        let mut rows = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<Int>, _> =
                line.split_whitespace().map(|t| t.parse::<Int>()).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("bad integer: {e}")))?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let nc = rows[0].len();
        if rows.iter().any(|r| r.len() != nc) {
            return Err(Error::Parse("rows of unequal length".into()));
        }
        Ok(IntMat::from_rows(rows))
    }

    pub fn parse_json(s: &str) -> Result<IntMat> {
        let j: MatrixJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad matrix JSON: {e}")))?;
        let rows: Vec<Vec<Int>> = j
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect();
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let m = IntMat::from_rows(rows);
        if let Some(n) = j.n {
            if m.cols() != n {
                return Err(Error::Parse("declared n disagrees with rows".into()));
            }
        }
        if let Some(mm) = j.m {
            if m.rows() != mm {
                return Err(Error::Parse("declared m disagrees with rows".into()));
            }
        }
        Ok(m)
    }

    /// Accepts either the text or the JSON format.
    pub fn parse(s: &str) -> Result<IntMat> {
        let t = s.trim_start();
        if t.starts_with('{') {
            IntMat::parse_json(s)
        } else {
            IntMat::parse_text(s)
        }
    }

    pub fn to_text(&self) -> String {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.rows,
            "n": self.cols,
            "rows": (0..self.rows)
                .map(|i| self.row(i).iter().map(|x| x.to_string().parse::<serde_json::Value>()
                    .unwrap_or_else(|_| serde_json::Value::String(x.to_string())))
                    .collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    m: Option<usize>,
    rows: Vec<Vec<i64>>,
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMat[{}x{}]\n{}", self.rows, self.cols, self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_both_formats() {
        let a = IntMat::parse("0 2\n-2 0").unwrap();
        let b = IntMat::parse(r#"{"n":2,"m":2,"rows":[[0,2],[-2,0]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), "0 2\n-2 0");
        assert!(IntMat::parse("1 2\n3").is_err());
    }

    #[test]
    fn product_and_inverse() {
        let a = IntMat::from_i64(&[&[-1, 1], &[0, 1]]);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(a.mul(&inv), IntMat::identity(2));
    }
}
