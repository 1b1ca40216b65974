//! Dense linear algebra over the residue field.

use crate::residue::{Fq, ResidueField};

/// Row-major matrix over k_E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fq>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> FqMatrix {
        FqMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Build from columns (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Fq>]) -> FqMatrix {
        let mut m = FqMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fq) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut t = FqMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, k: &ResidueField, v: &[Fq]) -> Vec<Fq> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| k.add(acc, k.mul(a, b)))
            })
            .collect()
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(k: &ResidueField, m: &mut FqMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    let w = m.cols;
    for c in 0..ncols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| m.data[i * w + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..w {
                m.data.swap(pr * w + j, r * w + j);
            }
        }
        let inv = k.inv(m.data[r * w + c]).expect("nonzero pivot");
        for j in c..w {
            m.data[r * w + j] = k.mul(m.data[r * w + j], inv);
        }
        for i in 0..m.rows {
            let f = m.data[i * w + c];
            if i == r || f == 0 {
                continue;
            }
            for j in c..w {
                let v = k.mul(f, m.data[r * w + j]);
                m.data[i * w + j] = k.sub(m.data[i * w + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solution set of A x = b: a particular solution and a kernel basis,
/// or None when the system is inconsistent.
pub fn solve(k: &ResidueField, a: &FqMatrix, b: &[Fq]) -> Option<(Vec<Fq>, Vec<Vec<Fq>>)> {
    assert_eq!(b.len(), a.rows, "right-hand side length");
    let n = a.cols;
    let mut m = FqMatrix::zeros(a.rows, n + 1);
    for i in 0..a.rows {
        m.data[i * (n + 1)..i * (n + 1) + n].copy_from_slice(&a.data[i * n..(i + 1) * n]);
        m.data[i * (n + 1) + n] = b[i];
    }
    let piv = rref(k, &mut m, n);
    for i in piv.len()..a.rows {
        if m.data[i * (n + 1) + n] != 0 {
            return None;
        }
    }
    let mut x = vec![0; n];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = m.data[i * (n + 1) + n];
    }
    let mut is_piv = vec![false; n];
    for &c in &piv {
        is_piv[c] = true;
    }
    let mut ker = Vec::new();
    for fc in (0..n).filter(|&c| !is_piv[c]) {
        let mut v = vec![0; n];
        v[fc] = 1;
        for (i, &c) in piv.iter().enumerate() {
            v[c] = k.neg(m.data[i * (n + 1) + fc]);
        }
        ker.push(v);
    }
    Some((x, ker))
}

pub fn kernel(k: &ResidueField, a: &FqMatrix) -> Vec<Vec<Fq>> {
    solve(k, a, &vec![0; a.rows])
        .map(|(_, ker)| ker)
        .unwrap_or_default()
}

/// Basis of { y : y A = 0 }.
pub fn left_kernel(k: &ResidueField, a: &FqMatrix) -> Vec<Vec<Fq>> {
    kernel(k, &a.transpose())
}

pub fn rank(k: &ResidueField, a: &FqMatrix) -> usize {
    let mut m = a.clone();
    rref(k, &mut m, a.cols).len()
}
