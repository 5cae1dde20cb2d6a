//! Dense matrices over F_q and Gaussian elimination.

use super::poly::Coeffs;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    /// Matrix whose j-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<u32>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec<F: Coeffs>(&self, f: &F, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(f, self.row(i), v))
            .collect()
    }

    pub fn mul<F: Coeffs>(&self, f: &F, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = f.add(out[(i, j)], f.mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn row_reduce<F: Coeffs>(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self[(r, c)]);
            for j in 0..self.cols {
                self[(r, j)] = f.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i != r && self[(i, c)] != 0 {
                    let factor = self[(i, c)];
                    for j in 0..self.cols {
                        let t = f.mul(factor, self[(r, j)]);
                        self[(i, j)] = f.sub(self[(i, j)], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank<F: Coeffs>(&self, f: &F) -> usize {
        self.clone().row_reduce(f).len()
    }

    pub fn inverse<F: Coeffs>(&self, f: &F) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = 1;
        }
        let pivots = aug.row_reduce(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = u32;
    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<F: Coeffs>(f: &F, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Solution set of `A x = b`: a particular solution and a kernel basis, or
/// `None` when inconsistent.
pub fn solve_affine<F: Coeffs>(f: &F, a: &Matrix, b: &[u32]) -> Option<(Vec<u32>, Vec<Vec<u32>>)> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)];
        }
        aug[(i, n)] = b[i];
    }
    let pivots = aug.row_reduce(f);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut particular = vec![0u32; n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[(r, n)];
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(aug[(r, fc)]);
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::poly::PrimeModulus;

    #[test]
    fn inverse_round_trip_f5() {
        let f = PrimeModulus(5);
        let m = Matrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 3], vec![4, 0, 2]]);
        let inv = m.inverse(&f).unwrap();
        assert_eq!(m.mul(&f, &inv), Matrix::identity(3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let f = PrimeModulus(3);
        let m = Matrix::from_rows(&[vec![1, 2], vec![2, 1]]);
        assert_eq!(m.rank(&f), 1);
        assert!(m.inverse(&f).is_none());
    }

    #[test]
    fn solve_affine_line() {
        let f = PrimeModulus(3);
        let a = Matrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]]);
        let (x, ker) = solve_affine(&f, &a, &[1, 2]).unwrap();
        assert_eq!(x, vec![1, 2, 0]);
        assert_eq!(ker, vec![vec![0, 0, 1]]);
        let inconsistent = Matrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert!(solve_affine(&f, &inconsistent, &[0, 1]).is_none());
    }
}
