//! Root data and Weyl group combinatorics.
//!
//! Weights are integer vectors in the fundamental-weight basis, roots are
//! integer vectors in the simple-root basis. `cartan[i][j] = <alpha_j, alpha_i^vee>`,
//! so column `j` holds the weight coordinates of `alpha_j`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported root system {0}")]
    Unsupported(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("simple reflection index {0} out of range")]
    BadIndex(usize),
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanDatum {
    #[serde(skip)]
    pub series: char,
    #[serde(skip)]
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    /// Positive roots in simple-root coordinates, ordered by height.
    pub pos_roots: Vec<Vec<i64>>,
    /// `rho` in fundamental-weight coordinates (all ones).
    pub rho: Vec<i64>,
    #[serde(skip)]
    pub rho_vee: Vec<i64>,
    /// `(omega_i, omega_j)`.
    #[serde(skip)]
    pub omega_pairing: Vec<Vec<Rational64>>,
}

fn cartan_matrix(series: char, n: usize) -> Result<Vec<Vec<i64>>, RootError> {
    let label = format!("{series}{n}");
    let bad = || RootError::Unsupported(label.clone());
    let valid = match series {
        'A' => n >= 1,
        'B' | 'C' => n >= 2,
        'D' => n >= 4,
        'E' => (6..=8).contains(&n),
        'F' => n == 4,
        'G' => n == 2,
        _ => false,
    };
    if !valid {
        return Err(bad());
    }
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match series {
        'A' | 'B' | 'C' => (0..n - 1).for_each(|i| link(i, i + 1)),
        'D' => {
            (0..n - 2).for_each(|i| link(i, i + 1));
            link(n - 3, n - 1);
        }
        'E' => {
            link(0, 2);
            link(1, 3);
            (2..n - 1).for_each(|i| link(i, i + 1));
        }
        'F' => (0..3).for_each(|i| link(i, i + 1)),
        'G' => link(0, 1),
        _ => unreachable!(),
    }
    match series {
        'B' => a[n - 1][n - 2] = -2,
        'C' => a[n - 2][n - 1] = -2,
        'F' => a[2][1] = -2,
        'G' => a[0][1] = -3,
        _ => {}
    }
    Ok(a)
}

fn symmetrizers(series: char, n: usize) -> Vec<i64> {
    match series {
        'B' => (0..n).map(|i| if i + 1 < n { 2 } else { 1 }).collect(),
        'C' => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
        'F' => vec![2, 2, 1, 1],
        'G' => vec![1, 3],
        _ => vec![1; n],
    }
}

fn invert(a: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational64> = row.iter().map(|&x| Rational64::from_integer(x)).collect();
            r.extend((0..n).map(|j| Rational64::from_integer((i == j) as i64)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("Cartan matrix is invertible");
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Builds the root datum for a series letter and rank.
pub fn build_cartan(series: char, rank: usize) -> Result<CartanDatum, RootError> {
    let series = series.to_ascii_uppercase();
    let cartan = cartan_matrix(series, rank)?;
    let d = symmetrizers(series, rank);
    let inv = invert(&cartan);
    let omega_pairing = (0..rank)
        .map(|i| (0..rank).map(|j| inv[i][j] * d[i]).collect())
        .collect();
    let mut cd = CartanDatum {
        series,
        rank,
        cartan,
        d,
        pos_roots: Vec::new(),
        rho: vec![1; rank],
        rho_vee: vec![1; rank],
        omega_pairing,
    };
    cd.pos_roots = cd.root_closure();
    Ok(cd)
}

/// Parses labels such as `"A2"` or `"b2"`.
pub fn parse_group(label: &str) -> Result<CartanDatum, RootError> {
    let label = label.trim();
    let mut chars = label.chars();
    let series = chars.next().ok_or_else(|| RootError::Unsupported(label.into()))?;
    let rank: usize = chars.as_str().parse().map_err(|_| RootError::Unsupported(label.into()))?;
    build_cartan(series, rank)
}

impl CartanDatum {
    pub fn label(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    fn root_closure(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut all: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i)).collect();
        let mut k = 0;
        while k < all.len() {
            for i in 0..n {
                let r = self.reflect_root(i, &all[k]);
                if !all.contains(&r) {
                    all.push(r);
                }
            }
            k += 1;
        }
        let mut pos: Vec<Vec<i64>> = all.into_iter().filter(|r| r.iter().all(|&c| c >= 0)).collect();
        pos.sort_by_key(|r| (r.iter().sum::<i64>(), std::cmp::Reverse(r.clone())));
        pos
    }

    pub fn check_rank(&self, v: &[impl Sized]) -> Result<(), RootError> {
        if v.len() != self.rank {
            return Err(RootError::RankMismatch { expected: self.rank, got: v.len() });
        }
        Ok(())
    }

    /// Weight coordinates of a root given in simple-root coordinates.
    pub fn root_to_weight(&self, beta: &[i64]) -> Vec<i64> {
        (0..self.rank).map(|i| (0..self.rank).map(|j| self.cartan[i][j] * beta[j]).sum()).collect()
    }

    pub fn simple_root(&self, i: usize) -> Vec<i64> {
        (0..self.rank).map(|k| self.cartan[k][i]).collect()
    }

    /// `s_i` on root coordinates (0-based `i`).
    pub fn reflect_root(&self, i: usize, beta: &[i64]) -> Vec<i64> {
        let c: i64 = (0..self.rank).map(|j| self.cartan[i][j] * beta[j]).sum();
        let mut out = beta.to_vec();
        out[i] -= c;
        out
    }

    /// `s_i` on weight coordinates (0-based `i`).
    pub fn reflect_weight(&self, i: usize, lambda: &[i64]) -> Vec<i64> {
        let li = lambda[i];
        (0..self.rank).map(|j| lambda[j] - li * self.cartan[j][i]).collect()
    }

    /// `(lambda, mu)` for weights in fundamental-weight coordinates.
    pub fn pairing(&self, lambda: &[i64], mu: &[i64]) -> Result<Rational64, RootError> {
        self.check_rank(lambda)?;
        self.check_rank(mu)?;
        let mut s = Rational64::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += self.omega_pairing[i][j] * (lambda[i] * mu[j]);
            }
        }
        Ok(s)
    }

    /// `(lambda, beta)` for a weight and a root-lattice element; always an integer.
    pub fn pair_root(&self, lambda: &[i64], beta: &[i64]) -> i64 {
        (0..self.rank).map(|j| lambda[j] * beta[j] * self.d[j]).sum()
    }

    /// `(lambda, beta)` for a complex weight and a root-lattice element.
    pub fn pair_root_complex(&self, lambda: &[Complex64], beta: &[i64]) -> Complex64 {
        (0..self.rank).map(|j| lambda[j] * (beta[j] * self.d[j]) as f64).sum()
    }

    /// `(mu, nu)` for two root-lattice elements.
    pub fn pair_roots(&self, a: &[i64], b: &[i64]) -> i64 {
        self.pair_root(&self.root_to_weight(a), b)
    }

    pub fn is_dominant(&self, lambda: &[i64]) -> bool {
        lambda.iter().all(|&x| x >= 0)
    }

    /// `lambda - mu` as a root-lattice element, if it is one.
    pub fn weight_to_root(&self, lambda: &[i64]) -> Option<Vec<i64>> {
        let inv = invert(&self.cartan);
        let coords: Vec<Rational64> = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| inv[i][j] * lambda[j]).sum())
            .collect();
        coords.iter().all(|c| c.is_integer()).then(|| coords.iter().map(|c| c.to_integer()).collect())
    }

    pub fn word(&self, letters: &[usize]) -> Result<WeylWord, RootError> {
        for &i in letters {
            if i == 0 || i > self.rank {
                return Err(RootError::BadIndex(i));
            }
        }
        Ok(WeylWord(letters.to_vec()))
    }

    /// `w . lambda` where `w = s_{i_1} ... s_{i_n}` acts right to left.
    pub fn weyl_apply(&self, w: &WeylWord, lambda: &[i64]) -> Vec<i64> {
        w.0.iter().rev().fold(lambda.to_vec(), |acc, &i| self.reflect_weight(i - 1, &acc))
    }

    pub fn weyl_apply_root(&self, w: &WeylWord, beta: &[i64]) -> Vec<i64> {
        w.0.iter().rev().fold(beta.to_vec(), |acc, &i| self.reflect_root(i - 1, &acc))
    }

    /// Lexicographically least reduced word of the element whose
    /// image of `rho` is `v`.
    fn word_from_rho_image(&self, mut v: Vec<i64>) -> WeylWord {
        let mut letters = Vec::new();
        while let Some(i) = v.iter().position(|&x| x < 0) {
            letters.push(i + 1);
            v = self.reflect_weight(i, &v);
        }
        WeylWord(letters)
    }

    /// Canonical reduced representative (lexicographically least reduced word).
    pub fn reduce_word(&self, w: &WeylWord) -> WeylWord {
        self.word_from_rho_image(self.weyl_apply(w, &self.rho))
    }

    pub fn length(&self, w: &WeylWord) -> usize {
        self.reduce_word(w).len()
    }

    pub fn is_reduced(&self, w: &WeylWord) -> bool {
        self.length(w) == w.len()
    }

    pub fn same_element(&self, a: &WeylWord, b: &WeylWord) -> bool {
        self.weyl_apply(a, &self.rho) == self.weyl_apply(b, &self.rho)
    }

    pub fn longest_element(&self) -> WeylWord {
        let neg: Vec<i64> = self.rho.iter().map(|x| -x).collect();
        self.word_from_rho_image(neg)
    }

    pub fn inverse(&self, w: &WeylWord) -> WeylWord {
        WeylWord(w.0.iter().rev().copied().collect())
    }

    /// All elements of the Weyl group as canonical words.
    pub fn weyl_group(&self) -> Vec<WeylWord> {
        let mut seen = vec![self.rho.clone()];
        let mut k = 0;
        while k < seen.len() {
            for i in 0..self.rank {
                let v = self.reflect_weight(i, &seen[k]);
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
            k += 1;
        }
        let mut words: Vec<WeylWord> = seen.into_iter().map(|v| self.word_from_rho_image(v)).collect();
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
        words
    }

    /// `beta_j = w_j^{-1} alpha_{i_j}` with `w_j = s_{i_{j+1}} ... s_{i_n}`.
    pub fn inversion_set(&self, w: &WeylWord) -> Result<Vec<Vec<i64>>, RootError> {
        if !self.is_reduced(w) {
            return Err(RootError::NotReduced(w.0.clone()));
        }
        let n = w.len();
        Ok((0..n)
            .map(|j| {
                let i = w.0[j] - 1;
                w.0[j + 1..].iter().fold(unit(self.rank, i), |acc, &k| self.reflect_root(k - 1, &acc))
            })
            .collect())
    }

    /// The suffix `w_j = s_{i_{j+1}} ... s_{i_n}` for `j = 0..=n`.
    pub fn suffix(&self, w: &WeylWord, j: usize) -> WeylWord {
        WeylWord(w.0[j..].to_vec())
    }

    /// Matrix `m` with `w^{-1} alpha_j^vee = sum_i m[i][j] alpha_i^vee`.
    pub fn weyl_torus_exponents(&self, w: &WeylWord) -> Vec<Vec<i64>> {
        let n = self.rank;
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                w.0.iter().fold(unit(n, j), |acc, &k| {
                    let i = k - 1;
                    // s_i on coroot coordinates uses the transposed Cartan matrix
                    let c: i64 = (0..n).map(|l| self.cartan[l][i] * acc[l]).sum();
                    let mut out = acc;
                    out[i] -= c;
                    out
                })
            })
            .collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }

    /// Coroot coordinates of a root-lattice element viewed in `h`:
    /// `alpha_i = d_i alpha_i^vee`.
    pub fn root_to_coroot(&self, beta: &[i64]) -> Vec<i64> {
        beta.iter().zip(&self.d).map(|(b, d)| b * d).collect()
    }

    /// `2(w rho - rho)` in root coordinates.
    pub fn two_rho_shift(&self, w: &WeylWord) -> Vec<i64> {
        let wr = self.weyl_apply(w, &self.rho);
        let diff: Vec<i64> = wr.iter().zip(&self.rho).map(|(a, b)| 2 * (a - b)).collect();
        self.weight_to_root(&diff).expect("w rho - rho lies in the root lattice")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

pub fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// A word in the simple reflections, 1-based letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct WeylWord(pub Vec<usize>);

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &WeylWord) -> WeylWord {
        WeylWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Reads `"1,2,1"`; the empty string is the identity.
    pub fn parse(s: &str) -> Result<WeylWord, RootError> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.trim().is_empty() {
            return Ok(WeylWord::identity());
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| RootError::BadIndex(0)))
            .collect::<Result<Vec<_>, _>>()
            .map(WeylWord)
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> CartanDatum {
        build_cartan('A', 2).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        for (s, n, count) in [('A', 1, 1), ('A', 2, 3), ('B', 2, 4), ('A', 3, 6), ('G', 2, 6), ('D', 4, 12), ('F', 4, 24), ('E', 6, 36)] {
            let cd = build_cartan(s, n).unwrap();
            assert_eq!(cd.pos_roots.len(), count, "{s}{n}");
            assert_eq!(cd.longest_element().len(), count, "{s}{n}");
        }
        assert!(build_cartan('D', 3).is_err());
        assert!(build_cartan('X', 2).is_err());
    }

    #[test]
    fn b2_lengths() {
        let cd = build_cartan('B', 2).unwrap();
        assert_eq!(cd.d, vec![2, 1]);
        assert_eq!(cd.pair_roots(&[1, 0], &[1, 0]), 4);
        assert_eq!(cd.pair_roots(&[0, 1], &[0, 1]), 2);
        assert!(cd.pos_roots.contains(&vec![1, 2]));
    }

    #[test]
    fn symmetrizable() {
        for (s, n) in [('B', 3), ('C', 3), ('F', 4), ('G', 2)] {
            let cd = build_cartan(s, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(cd.d[i] * cd.cartan[i][j], cd.d[j] * cd.cartan[j][i]);
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let cd = a2();
        let a1 = cd.simple_root(0);
        let a2 = cd.simple_root(1);
        assert_eq!(cd.pairing(&a1, &a1).unwrap(), Rational64::from_integer(2));
        assert_eq!(cd.pairing(&[1, 0], &a2).unwrap(), Rational64::zero());
        assert_eq!(cd.pair_root(&cd.rho, &[1, 1]), 2);
        assert!(cd.pairing(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn reflections() {
        let cd = a2();
        let s1 = cd.word(&[1]).unwrap();
        assert_eq!(cd.weyl_apply_root(&s1, &[1, 0]), vec![-1, 0]);
        assert_eq!(cd.weyl_apply_root(&s1, &[0, 1]), vec![1, 1]);
        assert_eq!(cd.weyl_apply(&WeylWord::identity(), &[3, 4]), vec![3, 4]);
    }

    #[test]
    fn reduction() {
        let cd = a2();
        assert!(cd.reduce_word(&WeylWord(vec![1, 1])).is_empty());
        let r = cd.reduce_word(&WeylWord(vec![1, 2, 1, 2]));
        assert_eq!(r, WeylWord(vec![2, 1]));
        assert_eq!(cd.reduce_word(&WeylWord(vec![1, 2, 1])), WeylWord(vec![1, 2, 1]));
        assert_eq!(cd.longest_element(), WeylWord(vec![1, 2, 1]));
        assert_eq!(cd.weyl_group().len(), 6);
        assert_eq!(build_cartan('B', 2).unwrap().weyl_group().len(), 8);
    }

    #[test]
    fn inversion_sets() {
        let cd = a2();
        let inv = cd.inversion_set(&WeylWord(vec![1, 2, 1])).unwrap();
        assert_eq!(inv, vec![vec![0, 1], vec![1, 1], vec![1, 0]]);
        let inv = cd.inversion_set(&WeylWord(vec![1, 2])).unwrap();
        assert_eq!(inv, vec![vec![1, 1], vec![0, 1]]);
        assert!(cd.inversion_set(&WeylWord(vec![1, 1])).is_err());
    }

    #[test]
    fn torus_exponents() {
        let cd = a2();
        assert_eq!(cd.weyl_torus_exponents(&WeylWord::identity()), vec![vec![1, 0], vec![0, 1]]);
        let m = cd.weyl_torus_exponents(&WeylWord(vec![1]));
        assert_eq!(m, vec![vec![-1, 1], vec![0, 1]]);
        let a1 = build_cartan('A', 1).unwrap();
        assert_eq!(a1.weyl_torus_exponents(&WeylWord(vec![1])), vec![vec![-1]]);
    }

    #[test]
    fn json_dump_fields() {
        let v = a2().to_json();
        for k in ["cartan", "d", "pos_roots", "rho"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
