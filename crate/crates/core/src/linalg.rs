//! Small exact linear algebra over `RatQ`: sparse matrices for module
//! actions and dense elimination for weight-space computations.

use std::collections::BTreeMap;

use crate::qnum::RatQ;

pub type Vector = Vec<RatQ>;

/// Row-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BTreeMap<usize, RatQ>>,
}

impl SMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SMat { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![RatQ::one(); n])
    }

    pub fn diag(d: &[RatQ]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn from_dense(d: &[Vec<RatQ>], cols: usize) -> Self {
        let mut m = Self::zeros(d.len(), cols);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> RatQ {
        self.data[i].get(&j).cloned().unwrap_or_else(RatQ::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: RatQ) {
        if x.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, x);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &RatQ) {
        if x.is_zero() {
            return;
        }
        let v = &self.get(i, j) + x;
        self.set(i, j, v);
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &RatQ)> {
        self.data[i].iter().map(|(j, x)| (*j, x))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &RatQ)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn apply(&self, v: &[RatQ]) -> Vector {
        self.data
            .iter()
            .map(|r| r.iter().filter(|(j, _)| !v[**j].is_zero()).map(|(j, x)| x * &v[*j]).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, l: &[RatQ]) -> Vector {
        let mut out = vec![RatQ::zero(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            if l[i].is_zero() {
                continue;
            }
            for (j, x) in r {
                out[*j] += &(&l[i] * x);
            }
        }
        out
    }

    pub fn mul(&self, b: &SMat) -> SMat {
        assert_eq!(self.cols, b.rows, "matrix shape");
        let mut out = SMat::zeros(self.rows, b.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, RatQ> = BTreeMap::new();
            for (k, x) in r {
                for (j, y) in &b.data[*k] {
                    let p = x * y;
                    let e = acc.entry(*j).or_insert_with(RatQ::zero);
                    *e += &p;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }

    pub fn add(&self, b: &SMat) -> SMat {
        let mut out = self.clone();
        for (i, j, x) in b.entries() {
            out.add_at(i, j, x);
        }
        out
    }

    pub fn sub(&self, b: &SMat) -> SMat {
        self.add(&b.scale(&RatQ::from(-1)))
    }

    pub fn scale(&self, c: &RatQ) -> SMat {
        let mut out = SMat::zeros(self.rows, self.cols);
        if c.is_zero() {
            return out;
        }
        for (i, j, x) in self.entries() {
            out.set(i, j, x * c);
        }
        out
    }

    pub fn transpose(&self) -> SMat {
        let mut out = SMat::zeros(self.cols, self.rows);
        for (i, j, x) in self.entries() {
            out.set(j, i, x.clone());
        }
        out
    }

    pub fn map(&self, f: impl Fn(&RatQ) -> RatQ) -> SMat {
        let mut out = SMat::zeros(self.rows, self.cols);
        for (i, j, x) in self.entries() {
            out.set(i, j, f(x));
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, b: &SMat) -> SMat {
        let mut out = SMat::zeros(self.rows * b.rows, self.cols * b.cols);
        for (i, j, x) in self.entries() {
            for (k, l, y) in b.entries() {
                out.set(i * b.rows + k, j * b.cols + l, x * y);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<RatQ>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Inverse of a block-structured invertible matrix; `None` if singular.
    pub fn inverse(&self) -> Option<SMat> {
        assert_eq!(self.rows, self.cols);
        let inv = inverse_dense(&self.to_dense())?;
        Some(SMat::from_dense(&inv, self.cols))
    }
}

pub fn dot(a: &[RatQ], b: &[RatQ]) -> RatQ {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

pub fn scale_vec(v: &[RatQ], c: &RatQ) -> Vector {
    v.iter().map(|x| x * c).collect()
}

pub fn add_vec(a: &[RatQ], b: &[RatQ]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn is_zero_vec(v: &[RatQ]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = vec![RatQ::zero(); n];
    v[i] = RatQ::one();
    v
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<RatQ>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<RatQ>], cols: usize) -> Vec<Vector> {
    let mut a: Vec<Vec<RatQ>> = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![RatQ::zero(); cols];
            x[fc] = RatQ::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -&a[r][fc];
            }
            x
        })
        .collect()
}

pub fn rank(vectors: &[Vector]) -> usize {
    let mut a = vectors.to_vec();
    rref(&mut a).len()
}

pub fn inverse_dense(m: &[Vec<RatQ>]) -> Option<Vec<Vec<RatQ>>> {
    let n = m.len();
    let mut a: Vec<Vec<RatQ>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { RatQ::one() } else { RatQ::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally maintained basis of a subspace supporting membership and
/// coordinate queries.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    /// basis vectors in insertion order
    pub vectors: Vec<Vector>,
    // echelon rows: (pivot, row, coordinates of row in terms of `vectors`)
    echelon: Vec<(usize, Vector, Vector)>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn reduce(&self, v: &[RatQ]) -> (Vector, Vector) {
        let k = self.vectors.len();
        let mut r = v.to_vec();
        let mut coords = vec![RatQ::zero(); k];
        for (p, row, rc) in &self.echelon {
            if r[*p].is_zero() {
                continue;
            }
            let f = r[*p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
            for (x, y) in coords.iter_mut().zip(rc) {
                if !y.is_zero() {
                    *x = &*x + &(&f * y);
                }
            }
        }
        (r, coords)
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: Vector) -> bool {
        let (r, coords) = self.reduce(&v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero");
        let k = self.vectors.len();
        // r = v - sum coords_j vectors_j, normalized
        let row: Vector = r.iter().map(|x| x * &inv).collect();
        let mut rc: Vector = coords.iter().map(|c| -(c * &inv)).collect();
        rc.push(inv.clone());
        for (_, _, c) in self.echelon.iter_mut() {
            c.push(RatQ::zero());
        }
        // keep other rows reduced at the new pivot
        for (_, orow, oc) in self.echelon.iter_mut() {
            if !orow[p].is_zero() {
                let f = orow[p].clone();
                for (x, y) in orow.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
                for (x, y) in oc.iter_mut().zip(&rc) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        self.echelon.push((p, row, rc));
        self.vectors.push(v);
        debug_assert_eq!(self.vectors.len(), k + 1);
        true
    }

    /// Coordinates of `v` in the inserted basis, if `v` lies in the span.
    pub fn coords(&self, v: &[RatQ]) -> Option<Vector> {
        let (r, coords) = self.reduce(v);
        is_zero_vec(&r).then_some(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{rq, RatQ};

    #[test]
    fn span_coordinates() {
        let mut s = SpanBasis::new();
        assert!(s.insert(vec![rq(1), rq(1), rq(0)]));
        assert!(s.insert(vec![rq(0), rq(1), RatQ::q_pow(1)]));
        assert!(!s.insert(vec![rq(2), rq(3), RatQ::q_pow(1)]));
        let c = s.coords(&[rq(3), rq(5), RatQ::q_pow(1).scale_q(1).clone()]);
        assert!(c.is_none());
        let c = s.coords(&[rq(3), rq(5), RatQ::q_pow(1) * rq(2)]).unwrap();
        assert_eq!(c, vec![rq(3), rq(2)]);
    }

    #[test]
    fn nullspace_and_inverse() {
        let m = vec![vec![rq(1), rq(2), rq(3)], vec![rq(2), rq(4), rq(6)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.iter().all(|r| dot(r, v).is_zero()));
        }
        let a = vec![vec![RatQ::q_pow(1), rq(1)], vec![rq(1), rq(1)]];
        let inv = inverse_dense(&a).unwrap();
        let p = SMat::from_dense(&a, 2).mul(&SMat::from_dense(&inv, 2));
        assert_eq!(p, SMat::identity(2));
    }
}
