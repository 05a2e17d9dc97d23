use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::Cgen;

/// Truncated float operator on `l^2(N)`: an `n x n` corner stored by
/// diagonals. `diags[s][k]` is the entry at `(k + s, k)`.
///
/// Columns `< exact` agree with the untruncated operator. `bound` is an
/// upper bound for the operator norm of the untruncated operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BandOp {
    pub n: usize,
    pub diags: BTreeMap<i64, Vec<C64>>,
    pub exact: usize,
    pub bound: f64,
}

impl BandOp {
    pub fn zeros(n: usize) -> Self {
        BandOp { n, diags: BTreeMap::new(), exact: n, bound: 0.0 }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![C64::new(1.0, 0.0); n], 1.0)
    }

    pub fn diagonal(v: Vec<C64>, bound: f64) -> Self {
        let n = v.len();
        let mut diags = BTreeMap::new();
        diags.insert(0, v);
        BandOp { n, diags, exact: n, bound }
    }

    /// The image of a generator, with parameter `q0^d`.
    pub fn generator(g: Cgen, d: i64, q0: f64, n: usize) -> Self {
        let qd = q0.powi(d as i32);
        let edge = |j: usize| (1.0 - qd.powi(-2 * j as i32)).max(0.0).sqrt();
        let (shift, v, exact): (i64, Vec<f64>, usize) = match g {
            Cgen::C12 => (0, (0..n).map(|k| qd.powi(-(k as i32) - 1)).collect(), n),
            Cgen::C21 => (0, (0..n).map(|k| -qd.powi(-(k as i32))).collect(), n),
            Cgen::C11 => (-1, (0..n).map(edge).collect(), n),
            Cgen::C22 => (1, (0..n).map(|k| edge(k + 1)).collect(), n.saturating_sub(1)),
        };
        let mut diags = BTreeMap::new();
        diags.insert(shift, mask(shift, v.into_iter().map(|x| C64::new(x, 0.0)).collect()));
        BandOp { n, diags, exact, bound: 1.0 }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let s = row as i64 - col as i64;
        self.diags.get(&s).map(|v| v[col]).unwrap_or_default()
    }

    fn max_shift(&self) -> i64 {
        self.diags.keys().copied().max().unwrap_or(0).max(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut diags = self.diags.clone();
        for (s, v) in &o.diags {
            let e = diags.entry(*s).or_insert_with(|| vec![C64::default(); self.n]);
            for (x, y) in e.iter_mut().zip(v) {
                *x += y;
            }
        }
        BandOp { n: self.n, diags, exact: self.exact.min(o.exact), bound: self.bound + o.bound }
    }

    pub fn scale(&self, c: C64) -> Self {
        let diags = self.diags.iter().map(|(s, v)| (*s, v.iter().map(|x| x * c).collect())).collect();
        BandOp { n: self.n, diags, exact: self.exact, bound: self.bound * c.norm() }
    }

    /// `self . other`.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut diags: BTreeMap<i64, Vec<C64>> = BTreeMap::new();
        for (sb, vb) in &o.diags {
            for (sa, va) in &self.diags {
                let e = diags.entry(sa + sb).or_insert_with(|| vec![C64::default(); n]);
                for k in 0..n {
                    let mid = k as i64 + sb;
                    if mid < 0 || mid >= n as i64 || vb[k] == C64::default() {
                        continue;
                    }
                    e[k] += va[mid as usize] * vb[k];
                }
            }
        }
        let diags = diags.into_iter().map(|(s, v)| (s, mask(s, v))).collect();
        let exact = o.exact.min((self.exact as i64 - o.max_shift()).max(0) as usize);
        BandOp { n, diags, exact, bound: self.bound * o.bound }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut diags = BTreeMap::new();
        for (s, v) in &self.diags {
            let mut w = vec![C64::default(); n];
            for k in 0..n {
                let r = k as i64 + s;
                if r >= 0 && r < n as i64 {
                    w[r as usize] = v[k].conj();
                }
            }
            diags.insert(-s, w);
        }
        // exactness of rows is not tracked; be conservative
        let exact = (self.exact as i64 - self.max_shift()).max(0) as usize;
        BandOp { n, diags, exact, bound: self.bound }
    }

    /// Sum of the first `k` diagonal entries.
    pub fn trace_corner(&self, k: usize) -> C64 {
        assert!(k <= self.exact, "trace corner {k} exceeds exact region {}", self.exact);
        self.diags.get(&0).map(|v| v[..k].iter().sum()).unwrap_or_default()
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        self.diags.get(&0).cloned().unwrap_or_else(|| vec![C64::default(); self.n])
    }

    pub fn is_diagonal(&self) -> bool {
        self.diags.iter().all(|(s, v)| *s == 0 || v.iter().all(|x| *x == C64::default()))
    }
}

/// Zero the entries whose row leaves the corner.
fn mask(s: i64, mut v: Vec<C64>) -> Vec<C64> {
    let n = v.len() as i64;
    for (k, x) in v.iter_mut().enumerate() {
        let r = k as i64 + s;
        if r < 0 || r >= n {
            *x = C64::default();
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_is_tracked() {
        let a = BandOp::generator(Cgen::C11, 1, 2.0, 6);
        let d = BandOp::generator(Cgen::C22, 1, 2.0, 6);
        let p = a.mul(&d);
        assert_eq!(p.exact, 5);
        for k in 0..5 {
            let want = 1.0 - 2f64.powi(-2 * k as i32 - 2);
            assert!((p.get(k, k).re - want).abs() < 1e-15);
        }
        // the last column lost its image under c22
        assert_eq!(p.get(5, 5).re, 0.0);
    }

    #[test]
    fn adjoint_of_lowering() {
        let a = BandOp::generator(Cgen::C11, 1, 3.0, 5);
        let d = BandOp::generator(Cgen::C22, 1, 3.0, 5);
        let ad = a.adjoint();
        for r in 0..4 {
            for c in 0..4 {
                assert!((ad.get(r, c) - d.get(r, c)).norm() < 1e-15);
            }
        }
    }
}
