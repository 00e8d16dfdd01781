//! Dense linear algebra over the prime field F_p.
//!
//! Vectors are `Vec<u32>` with entries in `[0, p)`. Coordinate `i` of a
//! vector is the coefficient of `x^i` when the vector encodes a field
//! element, so "least key" means comparing the highest coordinate first.

#[inline]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo the prime `p`; `a` must be nonzero.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, (p - 2) as u64, p)
}

/// Row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = FpMatrix::zeros(p, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % p);
            }
        }
        m
    }

    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = FpMatrix::zeros(p, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row length mismatch");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % p);
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

    pub fn prime(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64 % p)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form in place, scanning columns in `order`.
    /// Returns the pivot columns, one per nonzero row.
    fn rref_in_order(&mut self, order: &[usize]) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = inv_mod(self.get(r, c), p);
            for j in 0..self.cols {
                let v = mul_mod(self.get(r, j), inv, p);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = sub_mod(self.get(i, j), mul_mod(f, self.get(r, j), p), p);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_in_order(&order)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : A v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = sub_mod(0, m.get(r, free), p);
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `A v = rhs` (free variables set to zero), or `None`.
    pub fn solve(&self, rhs: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(rhs.len(), self.rows);
        let p = self.p;
        let mut aug = FpMatrix::zeros(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i] % p);
        }
        let order: Vec<usize> = (0..self.cols).collect();
        let pivots = aug.rref_in_order(&order);
        // rows past the pivots must have a zero right-hand side
        for i in pivots.len()..self.rows {
            if aug.get(i, self.cols) != 0 {
                return None;
            }
        }
        let mut v = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.get(r, self.cols);
        }
        Some(v)
    }
}

/// An F_p-subspace of F_p^n kept in reduced echelon form with pivots chosen
/// from the highest coordinate downwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, n: usize) -> Self {
        Subspace {
            p,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u32, n: usize) -> Self {
        let vecs: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        Subspace::span(p, n, &vecs)
    }

    pub fn span(p: u32, n: usize, vectors: &[Vec<u32>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(p, n);
        }
        let mut m = FpMatrix::from_rows(p, n, vectors);
        let order: Vec<usize> = (0..n).rev().collect();
        let pivots = m.rref_in_order(&order);
        let rows = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Subspace {
            p,
            n,
            rows,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Reduces `v` against the basis; the result is the least-key element of
    /// the coset `v + W`.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = out[pc];
            if f != 0 {
                for (o, &r) in out.iter_mut().zip(row) {
                    *o = sub_mod(*o, mul_mod(f, r, p), p);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// The combination `sum coeffs[i] * basis[i]`.
    pub fn combine(&self, coeffs: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut out = vec![0u32; self.n];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(row) {
                *o = add_mod(*o, mul_mod(c, r, p), p);
            }
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vecs = self.rows.clone();
        vecs.extend(other.rows.iter().cloned());
        Subspace::span(self.p, self.n, &vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank_add_up() {
        let m = FpMatrix::from_rows(3, 4, &[vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 0, 1, 1]]);
        let k = m.kernel();
        assert_eq!(m.rank() + k.len(), 4);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = FpMatrix::from_rows(5, 2, &[vec![1, 1], vec![2, 2]]);
        assert!(m.solve(&[1, 3]).is_none());
        let v = m.solve(&[1, 2]).unwrap();
        assert_eq!(m.mul_vec(&v), vec![1, 2]);
    }

    #[test]
    fn coset_minimum_is_least_key() {
        // W = span{(1,1,0)} in F_3^3, coset (2,0,1) + W
        let w = Subspace::span(3, 3, &[vec![1, 1, 0]]);
        let r = w.reduce(&[2, 0, 1]);
        let key = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * 3 + d);
        let best = (0..3)
            .map(|t| vec![(2 + t) % 3, t % 3, 1])
            .min_by_key(|v| key(v))
            .unwrap();
        assert_eq!(r, best);
    }
}
