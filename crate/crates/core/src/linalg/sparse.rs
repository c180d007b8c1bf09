//! Square matrices stored as sorted rows of nonzero entries.
//!
//! Most matrices in this crate are basis projectors, diagonal states or
//! tensor powers of small blocks, so storing only nonzeros keeps exact
//! arithmetic on 2^8 to 2^12 dimensional spaces affordable.

use super::scalar::{Complex64, Scalar};

pub(crate) type SparseVec<S> = Vec<(usize, S)>;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Mat<S> {
    pub dim: usize,
    /// `rows[i]` holds `(j, a_ij)` for nonzero `a_ij`, sorted by `j`.
    pub rows: Vec<SparseVec<S>>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, rows: (0..dim).map(|i| vec![(i, S::one())]).collect() }
    }

    pub fn from_diagonal(diag: Vec<S>) -> Self {
        let dim = diag.len();
        let rows = diag
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { Vec::new() } else { vec![(i, v)] })
            .collect();
        Self { dim, rows }
    }

    /// Builds from a row-major dense slice of length `dim * dim`.
    pub fn from_dense(dim: usize, dense: Vec<S>) -> Self {
        debug_assert_eq!(dense.len(), dim * dim);
        let mut rows = vec![Vec::new(); dim];
        for (idx, v) in dense.into_iter().enumerate() {
            if !v.is_zero() {
                rows[idx / dim].push((idx % dim, v));
            }
        }
        Self { dim, rows }
    }

    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, S)>) -> Self {
        entries.sort_by_key(|(i, j, _)| (*i, *j));
        let mut rows: Vec<SparseVec<S>> = vec![Vec::new(); dim];
        for (i, j, v) in entries {
            let row = &mut rows[i];
            match row.last_mut() {
                Some((lj, lv)) if *lj == j => lv.add_in_place(&v),
                _ => row.push((j, v)),
            }
        }
        for row in &mut rows {
            row.retain(|(_, v)| !v.is_zero());
        }
        Self { dim, rows }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        let row = &self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => row[pos].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| row.iter().all(|(j, _)| *j == i))
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter_map(|(j, v)| {
                        let w = f(v);
                        (!w.is_zero()).then_some((*j, w))
                    })
                    .collect()
            })
            .collect();
        Mat { dim: self.dim, rows }
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<SparseVec<S>> = vec![Vec::new(); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                rows[*j].push((i, v.conj()));
            }
        }
        Self { dim: self.dim, rows }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.times(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.plus(b),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => S::zero(),
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.minus(b),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.negate(),
            (None, None) => S::zero(),
        })
    }

    fn merge(&self, other: &Self, f: impl Fn(Option<&S>, Option<&S>) -> S) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(ra, rb)| merge_sparse(ra, rb, &f))
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut scratch: Vec<Option<S>> = vec![None; other.dim];
        let mut touched: Vec<usize> = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for (k, a) in row {
                    for (j, b) in &other.rows[*k] {
                        let term = a.times(b);
                        match &mut scratch[*j] {
                            Some(acc) => acc.add_in_place(&term),
                            slot @ None => {
                                *slot = Some(term);
                                touched.push(*j);
                            }
                        }
                    }
                }
                touched.sort_unstable();
                let out: SparseVec<S> = touched
                    .drain(..)
                    .filter_map(|j| scratch[j].take().filter(|v| !v.is_zero()).map(|v| (j, v)))
                    .collect();
                out
            })
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn trace(&self) -> S {
        let mut acc = S::zero();
        for i in 0..self.dim {
            acc.add_in_place(&self.get(i, i));
        }
        acc
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                let b = other.get(*k, i);
                if !b.is_zero() {
                    acc.add_in_place(&a.times(&b));
                }
            }
        }
        acc
    }

    /// Kronecker product with `self` on the low-order index bits:
    /// entry `(ia + da·ib, ja + da·jb) = a[ia,ja] · b[ib,jb]`.
    pub fn tensor(&self, other: &Self) -> Self {
        let da = self.dim;
        let dim = da * other.dim;
        let mut rows = Vec::with_capacity(dim);
        for rb in &other.rows {
            for ra in &self.rows {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (jb, b) in rb {
                    for (ja, a) in ra {
                        let v = a.times(b);
                        if !v.is_zero() {
                            row.push((ja + da * jb, v));
                        }
                    }
                }
                rows.push(row);
            }
        }
        Self { dim, rows }
    }

    /// Traces out the highest-order index bit: `b[i,j] = a[i,j] + a[i+h, j+h]`.
    pub fn trace_out_last(&self) -> Self {
        let half = self.dim / 2;
        let rows = (0..half)
            .map(|i| {
                let low: SparseVec<S> =
                    self.rows[i].iter().filter(|(j, _)| *j < half).cloned().collect();
                let high: SparseVec<S> = self.rows[i + half]
                    .iter()
                    .filter(|(j, _)| *j >= half)
                    .map(|(j, v)| (j - half, v.clone()))
                    .collect();
                merge_sparse(&low, &high, &|a, b| match (a, b) {
                    (Some(a), Some(b)) => a.plus(b),
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => S::zero(),
                })
            })
            .collect();
        Self { dim: half, rows }
    }

    /// Top-left `d × d` block.
    pub fn leading_block(&self, d: usize) -> Self {
        let rows = self.rows[..d]
            .iter()
            .map(|row| row.iter().filter(|(j, _)| *j < d).cloned().collect())
            .collect();
        Self { dim: d, rows }
    }

    pub fn to_dense_c64(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                out[i * self.dim + j] = v.to_c64();
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .rows
            .iter()
            .flat_map(|row| row.iter().map(|(_, v)| v.to_c64().norm()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn merge_sparse<S: Scalar>(
    a: &[(usize, S)],
    b: &[(usize, S)],
    f: &impl Fn(Option<&S>, Option<&S>) -> S,
) -> SparseVec<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        let (j, v) = match (a.get(x), b.get(y)) {
            (Some((ja, va)), Some((jb, vb))) if ja == jb => {
                x += 1;
                y += 1;
                (*ja, f(Some(va), Some(vb)))
            }
            (Some((ja, va)), Some((jb, _))) if ja < jb => {
                x += 1;
                (*ja, f(Some(va), None))
            }
            (Some((ja, va)), None) => {
                x += 1;
                (*ja, f(Some(va), None))
            }
            (_, Some((jb, vb))) => {
                y += 1;
                (*jb, f(None, Some(vb)))
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((j, v));
        }
    }
    out
}

/// `⟨u|v⟩`, antilinear in `u`.
pub(crate) fn inner<S: Scalar>(u: &[(usize, S)], v: &[(usize, S)]) -> S {
    let mut acc = S::zero();
    let (mut x, mut y) = (0, 0);
    while x < u.len() && y < v.len() {
        match u[x].0.cmp(&v[y].0) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                acc.add_in_place(&u[x].1.conj().times(&v[y].1));
                x += 1;
                y += 1;
            }
        }
    }
    acc
}

/// `u + c·v`.
pub(crate) fn axpy<S: Scalar>(u: &[(usize, S)], c: &S, v: &[(usize, S)]) -> SparseVec<S> {
    merge_sparse(u, v, &|a, b| match (a, b) {
        (Some(a), Some(b)) => a.plus(&c.times(b)),
        (Some(a), None) => a.clone(),
        (None, Some(b)) => c.times(b),
        (None, None) => S::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::GaussianRational as G;

    fn g(re: i64) -> G {
        G::from_ints(re, 0)
    }

    #[test]
    fn multiply_matches_dense_definition() {
        let a = Mat::from_dense(2, vec![g(1), g(2), g(0), g(3)]);
        let b = Mat::from_dense(2, vec![g(4), g(0), g(5), g(6)]);
        let c = a.mul(&b);
        assert_eq!(c, Mat::from_dense(2, vec![g(14), g(12), g(15), g(18)]));
        assert_eq!(a.trace_product(&b), c.trace());
    }

    #[test]
    fn zeros_are_not_stored() {
        let a = Mat::from_dense(2, vec![g(1), g(-1), g(0), g(1)]);
        let s = a.sub(&a);
        assert_eq!(s.nnz(), 0);
        let t = Mat::from_triplets(2, vec![(0, 1, g(2)), (0, 1, g(-2)), (1, 0, g(1))]);
        assert_eq!(t.nnz(), 1);
    }

    #[test]
    fn tensor_then_trace_out_recovers_factor() {
        let a = Mat::from_dense(2, vec![g(1), g(2), g(3), g(4)]);
        let b = Mat::from_dense(2, vec![g(5), g(0), g(0), g(7)]);
        assert_eq!(a.tensor(&b).trace_out_last(), a.scale(&g(12)));
    }
}
