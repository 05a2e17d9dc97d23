//! Finite-dimensional type-1 modules over the quantized enveloping algebra:
//! explicit generator matrices, invariant Hermitian forms, braid operators,
//! rank-one decompositions, duals and matrix coefficients.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dot, is_zero_vec, nullspace, unit_vec, SMat, SpanBasis, Vector};
use crate::qnum::{parse_ratq, q_binomial, q_int, RatQ};
use crate::rootdata::{CartanDatum, RootError, WeylWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuleError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("no singular vector of weight {0:?}")]
    NoSingularVector(Vec<i64>),
    #[error("unsupported module {0}")]
    Unsupported(String),
    #[error("modules over different root data")]
    DatumMismatch,
    #[error("relation check failed: {0}")]
    Relation(String),
    #[error("vector is not weight-homogeneous")]
    NotHomogeneous,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// One generator of the quantized enveloping algebra, 0-based node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    E(usize),
    F(usize),
    K(usize),
    KInv(usize),
}

#[derive(Debug, Clone)]
pub struct UqModule {
    pub cd: Arc<CartanDatum>,
    pub label: String,
    /// Weight of each basis vector, fundamental-weight coordinates.
    pub weights: Vec<Vec<i64>>,
    pub e: Vec<SMat>,
    pub f: Vec<SMat>,
    /// Invariant form: `<x, y> = x^T gram y`.
    pub gram: SMat,
    pub highest: Vec<i64>,
    pub hw_index: usize,
}

impl UqModule {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Exponent of `q` by which `K_i` acts on basis vector `a`.
    pub fn k_exp(&self, i: usize, a: usize) -> i64 {
        self.cd.d[i] * self.weights[a][i]
    }

    pub fn k_matrix(&self, i: usize, power: i64) -> SMat {
        let d: Vec<RatQ> = (0..self.dim()).map(|a| RatQ::q_pow(power * self.k_exp(i, a))).collect();
        SMat::diag(&d)
    }

    pub fn gen_matrix(&self, g: Gen) -> SMat {
        match g {
            Gen::E(i) => self.e[i].clone(),
            Gen::F(i) => self.f[i].clone(),
            Gen::K(i) => self.k_matrix(i, 1),
            Gen::KInv(i) => self.k_matrix(i, -1),
        }
    }

    pub fn apply_gen(&self, g: Gen, v: &[RatQ]) -> Vector {
        match g {
            Gen::E(i) => self.e[i].apply(v),
            Gen::F(i) => self.f[i].apply(v),
            Gen::K(i) => v.iter().enumerate().map(|(a, x)| x.scale_q(self.k_exp(i, a))).collect(),
            Gen::KInv(i) => v.iter().enumerate().map(|(a, x)| x.scale_q(-self.k_exp(i, a))).collect(),
        }
    }

    /// Action of the word `g_1 g_2 ... g_k` (rightmost acts first).
    pub fn act_word(&self, word: &[Gen], v: &[RatQ]) -> Vector {
        word.iter().rev().fold(v.to_vec(), |acc, g| self.apply_gen(*g, &acc))
    }

    /// Basis indices grouped by weight.
    pub fn weight_spaces(&self) -> BTreeMap<Vec<i64>, Vec<usize>> {
        let mut m: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (a, w) in self.weights.iter().enumerate() {
            m.entry(w.clone()).or_default().push(a);
        }
        m
    }

    pub fn weight_multiplicity(&self, mu: &[i64]) -> usize {
        self.weights.iter().filter(|w| w.as_slice() == mu).count()
    }

    /// Common weight of a nonzero homogeneous vector.
    pub fn weight_of(&self, v: &[RatQ]) -> Result<Vec<i64>, ModuleError> {
        let mut wt: Option<&Vec<i64>> = None;
        for (a, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match wt {
                None => wt = Some(&self.weights[a]),
                Some(w) if w == &self.weights[a] => {}
                Some(_) => return Err(ModuleError::NotHomogeneous),
            }
        }
        wt.cloned().ok_or(ModuleError::NotHomogeneous)
    }

    fn divided_power(&self, g: Gen, n: usize, v: &[RatQ]) -> Vector {
        let i = match g {
            Gen::E(i) | Gen::F(i) => i,
            _ => unreachable!(),
        };
        let di = self.cd.d[i];
        let mut acc = v.to_vec();
        for k in 1..=n {
            if is_zero_vec(&acc) {
                return acc;
            }
            let step = self.apply_gen(g, &acc);
            let inv = RatQ::from(q_int(k as i64, di)).inv().expect("nonzero q-integer");
            acc = linalg::scale_vec(&step, &inv);
        }
        acc
    }

    /// Lusztig's braid operator `T_i` as a matrix.
    ///
    /// On a vector of weight `lambda` it is the sum over `a - b + c = -<lambda, alpha_i^vee>`
    /// of `(-1)^b q_i^{b - ac} E^(a) F^(b) E^(c)`.
    pub fn braid_generator(&self, i: usize) -> SMat {
        let n = self.dim();
        let di = self.cd.d[i];
        let mut t = SMat::zeros(n, n);
        for col in 0..n {
            let li = self.weights[col][i];
            let v = unit_vec(n, col);
            let mut c = 0usize;
            loop {
                let ec = self.divided_power(Gen::E(i), c, &v);
                if is_zero_vec(&ec) {
                    break;
                }
                let mut b = 0usize;
                loop {
                    let fb = self.divided_power(Gen::F(i), b, &ec);
                    if is_zero_vec(&fb) {
                        break;
                    }
                    let a = b as i64 - c as i64 - li;
                    if a >= 0 {
                        let ea = self.divided_power(Gen::E(i), a as usize, &fb);
                        let sign = if b % 2 == 0 { 1 } else { -1 };
                        let coef = RatQ::q_pow(di * (b as i64 - a * c as i64)) * RatQ::from(sign);
                        for (r, x) in ea.iter().enumerate() {
                            if !x.is_zero() {
                                t.add_at(r, col, &(x * &coef));
                            }
                        }
                    }
                    b += 1;
                }
                c += 1;
            }
        }
        t
    }

    /// `T_w = T_{i_1} ... T_{i_n}` for the given word.
    pub fn braid_apply(&self, w: &WeylWord) -> SMat {
        w.letters()
            .iter()
            .fold(SMat::identity(self.dim()), |acc, &i| acc.mul(&self.braid_generator(i - 1)))
    }

    /// Verifies the defining relations as matrix identities.
    pub fn check_relations(&self) -> Result<(), ModuleError> {
        let cd = &self.cd;
        let n = self.dim();
        let l = cd.rank;
        for i in 0..l {
            // weight grading of E_i, F_i encodes the K-commutation relations
            let ai = cd.simple_root(i);
            for (r, c, _) in self.e[i].entries() {
                let expect: Vec<i64> = self.weights[c].iter().zip(&ai).map(|(a, b)| a + b).collect();
                if self.weights[r] != expect {
                    return Err(ModuleError::Relation(format!("E{} not of weight alpha_{}", i + 1, i + 1)));
                }
            }
            for (r, c, _) in self.f[i].entries() {
                let expect: Vec<i64> = self.weights[c].iter().zip(&ai).map(|(a, b)| a - b).collect();
                if self.weights[r] != expect {
                    return Err(ModuleError::Relation(format!("F{} not of weight -alpha_{}", i + 1, i + 1)));
                }
            }
            for j in 0..l {
                let comm = self.e[i].mul(&self.f[j]).sub(&self.f[j].mul(&self.e[i]));
                let expect = if i == j {
                    let d: Vec<RatQ> =
                        (0..n).map(|a| RatQ::from(q_int(self.weights[a][i], cd.d[i]))).collect();
                    SMat::diag(&d)
                } else {
                    SMat::zeros(n, n)
                };
                if comm != expect {
                    return Err(ModuleError::Relation(format!("[E{}, F{}]", i + 1, j + 1)));
                }
                if i != j {
                    for (x, name) in [(&self.e, "E"), (&self.f, "F")] {
                        if !serre(&x[i], &x[j], cd.cartan[i][j], cd.d[i]).is_zero() {
                            return Err(ModuleError::Relation(format!(
                                "q-Serre {name}{} {name}{}",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Verifies `E_i^* = q_i^{-1} F_i K_i` and `F_i^* = q_i K_i^{-1} E_i` for the Gram form.
    pub fn check_star(&self) -> Result<(), ModuleError> {
        let g = &self.gram;
        if g.transpose() != *g {
            return Err(ModuleError::Relation("Gram matrix not symmetric".into()));
        }
        for i in 0..self.cd.rank {
            let k = self.k_matrix(i, 1);
            let kinv = self.k_matrix(i, -1);
            let qd = RatQ::q_pow(self.cd.d[i]);
            let qdinv = RatQ::q_pow(-self.cd.d[i]);
            if self.e[i].transpose().mul(g) != g.mul(&self.f[i]).mul(&k).scale(&qdinv) {
                return Err(ModuleError::Relation(format!("star of E{}", i + 1)));
            }
            if self.f[i].transpose().mul(g) != g.mul(&kinv).mul(&self.e[i]).scale(&qd) {
                return Err(ModuleError::Relation(format!("star of F{}", i + 1)));
            }
        }
        Ok(())
    }

    /// Decomposition under the rank-one subalgebra of node `i` (0-based).
    pub fn sl2_decompose(&self, i: usize) -> Vec<Sl2Chain> {
        let n = self.dim();
        let mut spaces: Vec<(Vec<i64>, Vec<usize>)> = self.weight_spaces().into_iter().collect();
        spaces.sort_by(|a, b| b.0[i].cmp(&a.0[i]).then_with(|| a.0.cmp(&b.0)));
        let mut chains = Vec::new();
        for (mu, idx) in &spaces {
            if mu[i] < 0 {
                continue;
            }
            // E_i restricted to this weight space
            let target: Vec<i64> = mu.iter().zip(self.cd.simple_root(i)).map(|(a, b)| a + b).collect();
            let rows: Vec<usize> = (0..n).filter(|&r| self.weights[r] == target).collect();
            let m: Vec<Vec<RatQ>> =
                rows.iter().map(|&r| idx.iter().map(|&c| self.e[i].get(r, c)).collect()).collect();
            let kernel = if rows.is_empty() {
                (0..idx.len()).map(|k| unit_vec(idx.len(), k)).collect()
            } else {
                nullspace(&m, idx.len())
            };
            for kv in kernel {
                let mut top = vec![RatQ::zero(); n];
                for (k, &a) in idx.iter().enumerate() {
                    top[a] = kv[k].clone();
                }
                let len = mu[i] as usize;
                let mut vectors = vec![top.clone()];
                for y in 1..=len {
                    vectors.push(self.divided_power(Gen::F(i), y, &top));
                }
                chains.push(Sl2Chain { node: i, len, vectors, dual: Vec::new() });
            }
        }
        // dual rows: inverse of the change of basis, block by weight
        let cols: Vec<(usize, usize)> =
            chains.iter().enumerate().flat_map(|(c, ch)| (0..=ch.len).map(move |y| (c, y))).collect();
        assert_eq!(cols.len(), n, "chains must partition a basis");
        let mut duals: Vec<Vec<Vector>> = chains.iter().map(|c| vec![Vec::new(); c.len + 1]).collect();
        for (_, idx) in self.weight_spaces() {
            let members: Vec<(usize, usize)> = cols
                .iter()
                .copied()
                .filter(|&(c, y)| !chains[c].vectors[y].iter().enumerate().all(|(a, x)| x.is_zero() || !idx.contains(&a)))
                .collect();
            let block: Vec<Vec<RatQ>> = idx
                .iter()
                .map(|&a| members.iter().map(|&(c, y)| chains[c].vectors[y][a].clone()).collect())
                .collect();
            let inv = linalg::inverse_dense(&block).expect("chain vectors form a basis");
            for (r, &(c, y)) in members.iter().enumerate() {
                let mut row = vec![RatQ::zero(); n];
                for (k, &a) in idx.iter().enumerate() {
                    row[a] = inv[r][k].clone();
                }
                duals[c][y] = row;
            }
        }
        for (ch, d) in chains.iter_mut().zip(duals) {
            ch.dual = d;
        }
        chains
    }

    /// Adjoint of a matrix for the invariant form: `G^{-1} A^T G`.
    pub fn adjoint(&self, a: &SMat) -> SMat {
        let ginv = self.gram.inverse().expect("nondegenerate form");
        ginv.mul(&a.transpose()).mul(&self.gram)
    }
}

fn serre(xi: &SMat, xj: &SMat, aij: i64, di: i64) -> SMat {
    let n = (1 - aij) as usize;
    let mut acc = SMat::zeros(xi.rows, xi.cols);
    let pow = |k: usize| (0..k).fold(SMat::identity(xi.rows), |m, _| m.mul(xi));
    for r in 0..=n {
        let coef = RatQ::from(q_binomial(n as i64, r as i64, di).expect("in range"));
        let coef = if r % 2 == 0 { coef } else { -coef };
        let term = pow(n - r).mul(xj).mul(&pow(r));
        acc = acc.add(&term.scale(&coef));
    }
    acc
}

/// An irreducible rank-one constituent: `vectors[y] = F_i^(y) vectors[0]`,
/// with `dual` the matching rows of the inverse change of basis.
#[derive(Debug, Clone)]
pub struct Sl2Chain {
    pub node: usize,
    pub len: usize,
    pub vectors: Vec<Vector>,
    pub dual: Vec<Vector>,
}

// ---------------------------------------------------------------------------
// construction

pub fn trivial_module(cd: &Arc<CartanDatum>) -> UqModule {
    let l = cd.rank;
    UqModule {
        cd: cd.clone(),
        label: format!("{}:L({})", cd.label(), fmt_weight(&vec![0; l])),
        weights: vec![vec![0; l]],
        e: vec![SMat::zeros(1, 1); l],
        f: vec![SMat::zeros(1, 1); l],
        gram: SMat::identity(1),
        highest: vec![0; l],
        hw_index: 0,
    }
}

fn fmt_weight(w: &[i64]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Weyl orbit of a dominant weight if every orbit element pairs with every
/// simple coroot in `{-1, 0, 1}`.
fn minuscule_orbit(cd: &CartanDatum, lambda: &[i64]) -> Option<Vec<Vec<i64>>> {
    let mut orbit = vec![lambda.to_vec()];
    let mut k = 0;
    while k < orbit.len() {
        if orbit[k].iter().any(|x| x.abs() > 1) {
            return None;
        }
        for i in 0..cd.rank {
            if orbit[k][i] == 1 {
                let mu = cd.reflect_weight(i, &orbit[k]);
                if !orbit.contains(&mu) {
                    orbit.push(mu);
                }
            }
        }
        k += 1;
    }
    Some(orbit)
}

fn minuscule_module(cd: &Arc<CartanDatum>, lambda: &[i64], orbit: Vec<Vec<i64>>) -> UqModule {
    let n = orbit.len();
    let l = cd.rank;
    let index: HashMap<Vec<i64>, usize> = orbit.iter().cloned().enumerate().map(|(a, w)| (w, a)).collect();
    let mut e = vec![SMat::zeros(n, n); l];
    let mut f = vec![SMat::zeros(n, n); l];
    for (a, mu) in orbit.iter().enumerate() {
        for i in 0..l {
            let ai = cd.simple_root(i);
            if mu[i] == 1 {
                let nu: Vec<i64> = mu.iter().zip(&ai).map(|(x, y)| x - y).collect();
                f[i].set(index[&nu], a, RatQ::one());
            }
            if mu[i] == -1 {
                let nu: Vec<i64> = mu.iter().zip(&ai).map(|(x, y)| x + y).collect();
                e[i].set(index[&nu], a, RatQ::one());
            }
        }
    }
    // the weight basis is orthonormal
    let gram = vec![RatQ::one(); orbit.len()];
    UqModule {
        cd: cd.clone(),
        label: format!("{}:L({})", cd.label(), fmt_weight(lambda)),
        weights: orbit,
        e,
        f,
        gram: SMat::diag(&gram),
        highest: lambda.to_vec(),
        hw_index: 0,
    }
}

/// Tensor product with the coproduct `E -> E (x) K + 1 (x) E`,
/// `F -> F (x) 1 + K^{-1} (x) F`.
pub fn tensor_module(m1: &UqModule, m2: &UqModule) -> Result<UqModule, ModuleError> {
    if m1.cd != m2.cd {
        return Err(ModuleError::DatumMismatch);
    }
    let cd = m1.cd.clone();
    let (n1, n2) = (m1.dim(), m2.dim());
    let weights: Vec<Vec<i64>> = (0..n1 * n2)
        .map(|ab| m1.weights[ab / n2].iter().zip(&m2.weights[ab % n2]).map(|(x, y)| x + y).collect())
        .collect();
    let mut e = Vec::new();
    let mut f = Vec::new();
    for i in 0..cd.rank {
        e.push(m1.e[i].kron(&m2.k_matrix(i, 1)).add(&SMat::identity(n1).kron(&m2.e[i])));
        f.push(m1.f[i].kron(&SMat::identity(n2)).add(&m1.k_matrix(i, -1).kron(&m2.f[i])));
    }
    let highest: Vec<i64> = m1.highest.iter().zip(&m2.highest).map(|(a, b)| a + b).collect();
    Ok(UqModule {
        label: format!("{}(x){}", m1.label, m2.label.split(':').next_back().unwrap_or("")),
        cd,
        weights,
        e,
        f,
        gram: m1.gram.kron(&m2.gram),
        highest,
        hw_index: m1.hw_index * n2 + m2.hw_index,
    })
}

/// Singular vectors (killed by every `E_i`) of weight `lambda`.
pub fn singular_vectors(m: &UqModule, lambda: &[i64]) -> Vec<Vector> {
    let n = m.dim();
    let idx: Vec<usize> = (0..n).filter(|&a| m.weights[a] == lambda).collect();
    if idx.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<Vec<RatQ>> = Vec::new();
    for i in 0..m.cd.rank {
        let target: Vec<i64> = lambda.iter().zip(m.cd.simple_root(i)).map(|(a, b)| a + b).collect();
        for r in (0..n).filter(|&r| m.weights[r] == target) {
            rows.push(idx.iter().map(|&c| m.e[i].get(r, c)).collect());
        }
    }
    let kernel = if rows.is_empty() {
        (0..idx.len()).map(|k| unit_vec(idx.len(), k)).collect()
    } else {
        nullspace(&rows, idx.len())
    };
    // orthogonalize against the invariant form in basis order
    let mut out: Vec<Vector> = Vec::new();
    for kv in kernel {
        let mut v = vec![RatQ::zero(); n];
        for (k, &a) in idx.iter().enumerate() {
            v[a] = kv[k].clone();
        }
        for u in &out {
            let gu = m.gram.apply(u);
            let c = &dot(&v, &gu) / &dot(u, &gu);
            v = linalg::add_vec(&v, &linalg::scale_vec(u, &(-c)));
        }
        out.push(v);
    }
    out
}

/// Submodule generated by the first singular vector of weight `lambda`,
/// with the induced invariant form normalized at the highest weight.
pub fn highest_weight_submodule(m: &UqModule, lambda: &[i64]) -> Result<UqModule, ModuleError> {
    let sing = singular_vectors(m, lambda);
    let Some(top) = sing.into_iter().next() else {
        return Err(ModuleError::NoSingularVector(lambda.to_vec()));
    };
    let cd = m.cd.clone();
    let n = m.dim();
    let spaces = m.weight_spaces();
    let restrict = |v: &[RatQ], w: &[i64]| -> Vector { spaces[w].iter().map(|&a| v[a].clone()).collect() };

    let mut span: BTreeMap<Vec<i64>, SpanBasis> = BTreeMap::new();
    // global index of (weight, position within weight)
    let mut basis: Vec<(Vec<i64>, usize)> = Vec::new();
    let mut vectors: Vec<Vector> = Vec::new();
    let mut pos: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    let mut queue: VecDeque<(Vec<i64>, Vector)> = VecDeque::new();
    queue.push_back((lambda.to_vec(), top));
    while let Some((w, full)) = queue.pop_front() {
        let sb = span.entry(w.clone()).or_default();
        if !sb.insert(restrict(&full, &w)) {
            continue;
        }
        let g = vectors.len();
        pos.entry(w.clone()).or_default().push(g);
        basis.push((w.clone(), sb.len() - 1));
        for i in 0..cd.rank {
            let nw: Vec<i64> = w.iter().zip(cd.simple_root(i)).map(|(a, b)| a - b).collect();
            if !spaces.contains_key(&nw) {
                continue;
            }
            let fv = m.f[i].apply(&full);
            if !is_zero_vec(&fv) {
                queue.push_back((nw, fv));
            }
        }
        vectors.push(full);
    }

    let dim = vectors.len();
    let express = |full: &Vector, w: &Vec<i64>| -> Result<Vec<(usize, RatQ)>, ModuleError> {
        if is_zero_vec(full) {
            return Ok(Vec::new());
        }
        let sb = span.get(w).ok_or_else(|| ModuleError::Relation("not a submodule".into()))?;
        let c = sb
            .coords(&restrict(full, w))
            .ok_or_else(|| ModuleError::Relation("not a submodule".into()))?;
        Ok(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (pos[w][k], x)).collect())
    };
    let mut e = vec![SMat::zeros(dim, dim); cd.rank];
    let mut f = vec![SMat::zeros(dim, dim); cd.rank];
    for g in 0..dim {
        let w = &basis[g].0;
        for i in 0..cd.rank {
            let ai = cd.simple_root(i);
            let up: Vec<i64> = w.iter().zip(&ai).map(|(a, b)| a + b).collect();
            let down: Vec<i64> = w.iter().zip(&ai).map(|(a, b)| a - b).collect();
            for (r, x) in express(&m.e[i].apply(&vectors[g]), &up)? {
                e[i].set(r, g, x);
            }
            for (r, x) in express(&m.f[i].apply(&vectors[g]), &down)? {
                f[i].set(r, g, x);
            }
        }
    }
    let mut gram = SMat::zeros(dim, dim);
    let gv: Vec<Vector> = vectors.iter().map(|v| m.gram.apply(v)).collect();
    for a in 0..dim {
        for b in 0..dim {
            if basis[a].0 == basis[b].0 {
                gram.set(a, b, dot(&vectors[a], &gv[b]));
            }
        }
    }
    let norm = gram.get(0, 0);
    let gram = gram.scale(&norm.inv().map_err(|_| ModuleError::Relation("null highest vector".into()))?);
    let _ = n;
    Ok(UqModule {
        label: format!("{}:L({})", cd.label(), fmt_weight(lambda)),
        cd,
        weights: basis.into_iter().map(|(w, _)| w).collect(),
        e,
        f,
        gram,
        highest: lambda.to_vec(),
        hw_index: 0,
    })
}

/// Weyl dimension formula.
pub fn weyl_dimension(cd: &CartanDatum, lambda: &[i64]) -> u64 {
    let lr: Vec<i64> = lambda.iter().zip(&cd.rho).map(|(a, b)| a + b).collect();
    let mut num = num_rational::Ratio::<i64>::from_integer(1);
    for beta in &cd.pos_roots {
        num *= num_rational::Ratio::new(cd.pair_root(&lr, beta), cd.pair_root(&cd.rho, beta));
    }
    assert!(num.is_integer());
    num.to_integer() as u64
}

type CacheKey = (String, Vec<i64>);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<UqModule>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<UqModule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Inserts a module built elsewhere (e.g. read from disk) into the cache.
pub fn cache_insert(m: UqModule) -> Arc<UqModule> {
    let key = (m.cd.label(), m.highest.clone());
    let arc = Arc::new(m);
    cache().lock().expect("module cache").entry(key).or_insert(arc).clone()
}

pub fn cached_modules() -> Vec<Arc<UqModule>> {
    cache().lock().expect("module cache").values().cloned().collect()
}

/// The irreducible module `L(lambda)`, built once per process.
pub fn irrep(cd: &Arc<CartanDatum>, lambda: &[i64]) -> Result<Arc<UqModule>, ModuleError> {
    cd.check_rank(lambda)?;
    if !cd.is_dominant(lambda) {
        return Err(RootError::NotDominant(lambda.to_vec()).into());
    }
    let key = (cd.label(), lambda.to_vec());
    if let Some(m) = cache().lock().expect("module cache").get(&key) {
        return Ok(m.clone());
    }
    let built = build_irrep(cd, lambda)?;
    let expected = weyl_dimension(cd, lambda) as usize;
    if built.dim() != expected {
        return Err(ModuleError::Dimension(format!(
            "L({}) has dimension {} but the Weyl formula gives {expected}",
            fmt_weight(lambda),
            built.dim()
        )));
    }
    Ok(cache_insert(built))
}

fn build_irrep(cd: &Arc<CartanDatum>, lambda: &[i64]) -> Result<UqModule, ModuleError> {
    let l = cd.rank;
    if lambda.iter().all(|&x| x == 0) {
        return Ok(trivial_module(cd));
    }
    if let Some(orbit) = minuscule_orbit(cd, lambda) {
        return Ok(minuscule_module(cd, lambda, orbit));
    }
    let minuscule: Vec<usize> =
        (0..l).filter(|&i| minuscule_orbit(cd, &crate::rootdata::unit(l, i)).is_some()).collect();
    let total: i64 = lambda.iter().sum();
    if total == 1 {
        // a non-minuscule fundamental weight: find it inside a product of minuscule ones
        for (x, &a) in minuscule.iter().enumerate() {
            for &b in &minuscule[x..] {
                let ma = irrep(cd, &crate::rootdata::unit(l, a))?;
                let mb = irrep(cd, &crate::rootdata::unit(l, b))?;
                let t = tensor_module(&ma, &mb)?;
                if !singular_vectors(&t, lambda).is_empty() {
                    return highest_weight_submodule(&t, lambda);
                }
            }
        }
        return Err(ModuleError::Unsupported(format!("{}:L({})", cd.label(), fmt_weight(lambda))));
    }
    let i = minuscule
        .iter()
        .copied()
        .find(|&i| lambda[i] > 0)
        .or_else(|| (0..l).find(|&i| lambda[i] > 0))
        .expect("nonzero weight");
    let mut rest = lambda.to_vec();
    rest[i] -= 1;
    let a = irrep(cd, &rest)?;
    let b = irrep(cd, &crate::rootdata::unit(l, i))?;
    highest_weight_submodule(&tensor_module(&a, &b)?, lambda)
}

/// The fundamental module `L(omega_i)`, `i` 1-based.
pub fn build_fundamental(cd: &Arc<CartanDatum>, i: usize) -> Result<Arc<UqModule>, ModuleError> {
    if i == 0 || i > cd.rank {
        return Err(RootError::BadIndex(i).into());
    }
    irrep(cd, &crate::rootdata::unit(cd.rank, i - 1))
}

// ---------------------------------------------------------------------------
// persisted form

/// Tag stored with persisted modules; bump when bases or forms change.
pub const MODULE_FORMAT: &str = "qmeasure-module-2";

type Triplets = Vec<(usize, usize, String)>;

/// Serializable snapshot of a module, exact entries as `RatQ` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleRecord {
    pub format: String,
    pub group: String,
    pub label: String,
    pub weights: Vec<Vec<i64>>,
    pub highest: Vec<i64>,
    pub hw_index: usize,
    pub e: Vec<Triplets>,
    pub f: Vec<Triplets>,
    pub gram: Triplets,
}

fn to_triplets(m: &SMat) -> Triplets {
    m.entries().map(|(i, j, x)| (i, j, x.to_string())).collect()
}

fn from_triplets(t: &Triplets, n: usize) -> Result<SMat, ModuleError> {
    let mut m = SMat::zeros(n, n);
    for (i, j, x) in t {
        if *i >= n || *j >= n {
            return Err(ModuleError::Dimension("record entry out of range".into()));
        }
        let v = parse_ratq(x).map_err(|e| ModuleError::Unsupported(format!("record entry {x:?}: {e}")))?;
        m.set(*i, *j, v);
    }
    Ok(m)
}

impl UqModule {
    pub fn to_record(&self) -> ModuleRecord {
        ModuleRecord {
            format: MODULE_FORMAT.into(),
            group: self.cd.label(),
            label: self.label.clone(),
            weights: self.weights.clone(),
            highest: self.highest.clone(),
            hw_index: self.hw_index,
            e: self.e.iter().map(to_triplets).collect(),
            f: self.f.iter().map(to_triplets).collect(),
            gram: to_triplets(&self.gram),
        }
    }

    /// Rebuilds a module from a record, re-checking the relations and the
    /// form so a stale or corrupted record is rejected.
    pub fn from_record(cd: &Arc<CartanDatum>, r: &ModuleRecord) -> Result<UqModule, ModuleError> {
        if r.format != MODULE_FORMAT {
            return Err(ModuleError::Unsupported(format!("record format {}", r.format)));
        }
        if r.group != cd.label() {
            return Err(ModuleError::DatumMismatch);
        }
        let n = r.weights.len();
        if r.e.len() != cd.rank || r.f.len() != cd.rank || r.hw_index >= n || r.weights.iter().any(|w| w.len() != cd.rank) {
            return Err(ModuleError::Dimension("record shape".into()));
        }
        let m = UqModule {
            cd: cd.clone(),
            label: r.label.clone(),
            weights: r.weights.clone(),
            e: r.e.iter().map(|t| from_triplets(t, n)).collect::<Result<_, _>>()?,
            f: r.f.iter().map(|t| from_triplets(t, n)).collect::<Result<_, _>>()?,
            gram: from_triplets(&r.gram, n)?,
            highest: r.highest.clone(),
            hw_index: r.hw_index,
        };
        if m.weights[m.hw_index] != m.highest || n as u64 != weyl_dimension(cd, &m.highest) {
            return Err(ModuleError::Dimension("record is not the irreducible module".into()));
        }
        m.check_relations()?;
        m.check_star()?;
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// duals

/// `2(mu, rho)` for a weight.
pub fn two_rho_pairing(cd: &CartanDatum, mu: &[i64]) -> i64 {
    let two_rho: Vec<i64> = (0..cd.rank).map(|j| cd.pos_roots.iter().map(|b| b[j]).sum()).collect();
    cd.pair_root(mu, &two_rho)
}

/// The dual module with action through the antipode:
/// `E -> -(E K^{-1})^T`, `F -> -(K F)^T`, weights negated.
pub fn dual_module(m: &UqModule) -> UqModule {
    let cd = m.cd.clone();
    let n = m.dim();
    let mut e = Vec::new();
    let mut f = Vec::new();
    let minus = RatQ::from(-1);
    for i in 0..cd.rank {
        e.push(m.e[i].mul(&m.k_matrix(i, -1)).transpose().scale(&minus));
        f.push(m.k_matrix(i, 1).mul(&m.f[i]).transpose().scale(&minus));
    }
    let weights: Vec<Vec<i64>> = m.weights.iter().map(|w| w.iter().map(|x| -x).collect()).collect();
    // the lowest weight of M becomes the highest weight of M*
    let hw_index = (0..n)
        .max_by_key(|&a| two_rho_pairing(&cd, &weights[a]))
        .expect("nonempty module");
    let ginv = m.gram.inverse().expect("nondegenerate form");
    let x: Vec<RatQ> = (0..n).map(|a| RatQ::q_pow(two_rho_pairing(&cd, &m.weights[a]))).collect();
    let mut gram = SMat::diag(&x).mul(&ginv);
    let norm = gram.get(hw_index, hw_index);
    gram = gram.scale(&norm.inv().expect("nonzero"));
    UqModule {
        label: format!("{}*", m.label),
        highest: weights[hw_index].clone(),
        cd,
        weights,
        e,
        f,
        gram,
        hw_index,
    }
}

/// `-w_0 lambda`.
pub fn dual_highest_weight(cd: &CartanDatum, lambda: &[i64]) -> Vec<i64> {
    let w0 = cd.longest_element();
    cd.weyl_apply(&w0, lambda).into_iter().map(|x| -x).collect()
}

/// The dual of an irreducible module together with an intertwiner
/// `phi : M* -> L(-w_0 Lambda)` fixing the highest weight vectors.
pub fn dual_module_iso(m: &UqModule) -> Result<(Arc<UqModule>, UqModule, SMat), ModuleError> {
    if m.dim() != weyl_dimension(&m.cd, &m.highest) as usize {
        return Err(ModuleError::Unsupported(format!("{} is not irreducible", m.label)));
    }
    let dual = dual_module(m);
    let target = irrep(&m.cd, &dual_highest_weight(&m.cd, &m.highest))?;
    let phi = intertwiner(&dual, &target)?;
    Ok((target, dual, phi))
}

/// Module map `a -> b` between irreducibles sending the highest weight
/// vector to the highest weight vector.
pub fn intertwiner(a: &UqModule, b: &UqModule) -> Result<SMat, ModuleError> {
    if a.highest != b.highest || a.dim() != b.dim() {
        return Err(ModuleError::Dimension(format!("{} vs {}", a.label, b.label)));
    }
    let cd = &a.cd;
    let n = a.dim();
    let aspaces = a.weight_spaces();
    let mut span: BTreeMap<Vec<i64>, SpanBasis> = BTreeMap::new();
    let mut images: BTreeMap<Vec<i64>, Vec<Vector>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let start = (a.highest.clone(), unit_vec(n, a.hw_index), unit_vec(n, b.hw_index));
    queue.push_back(start);
    while let Some((w, x, y)) = queue.pop_front() {
        let local: Vector = aspaces[&w].iter().map(|&k| x[k].clone()).collect();
        if !span.entry(w.clone()).or_default().insert(local) {
            continue;
        }
        images.entry(w.clone()).or_default().push(y.clone());
        for i in 0..cd.rank {
            let fx = a.f[i].apply(&x);
            if is_zero_vec(&fx) {
                continue;
            }
            let nw: Vec<i64> = w.iter().zip(cd.simple_root(i)).map(|(p, r)| p - r).collect();
            queue.push_back((nw, fx, b.f[i].apply(&y)));
        }
    }
    let mut phi = SMat::zeros(n, n);
    for (w, idx) in &aspaces {
        let sb = span.get(w).ok_or_else(|| ModuleError::Relation("weight space not reached".into()))?;
        for (k, &col) in idx.iter().enumerate() {
            let c = sb.coords(&unit_vec(idx.len(), k)).ok_or_else(|| ModuleError::Relation("incomplete span".into()))?;
            for (t, ct) in c.iter().enumerate() {
                if ct.is_zero() {
                    continue;
                }
                for (r, y) in images[w][t].iter().enumerate() {
                    if !y.is_zero() {
                        phi.add_at(r, col, &(ct * y));
                    }
                }
            }
        }
    }
    for i in 0..cd.rank {
        if phi.mul(&a.e[i]) != b.e[i].mul(&phi) || phi.mul(&a.f[i]) != b.f[i].mul(&phi) {
            return Err(ModuleError::Relation("intertwiner check".into()));
        }
    }
    Ok(phi)
}

// ---------------------------------------------------------------------------
// matrix coefficients

/// The functional `x -> <l, x . v>` on the enveloping algebra.
#[derive(Debug, Clone)]
pub struct MatrixCoefficient {
    pub module: Arc<UqModule>,
    pub l: Vector,
    pub v: Vector,
}

impl MatrixCoefficient {
    pub fn new(module: Arc<UqModule>, l: Vector, v: Vector) -> Result<Self, ModuleError> {
        if l.len() != module.dim() || v.len() != module.dim() {
            return Err(ModuleError::Dimension("coefficient vectors".into()));
        }
        if !is_zero_vec(&l) {
            module.weight_of(&l)?;
        }
        if !is_zero_vec(&v) {
            module.weight_of(&v)?;
        }
        Ok(MatrixCoefficient { module, l, v })
    }

    /// `c_{e_a^*, e_b}` for 0-based basis indices.
    pub fn basis(module: Arc<UqModule>, a: usize, b: usize) -> Result<Self, ModuleError> {
        let n = module.dim();
        if a >= n || b >= n {
            return Err(ModuleError::Dimension(format!("basis index out of range 0..{n}")));
        }
        Ok(MatrixCoefficient { l: unit_vec(n, a), v: unit_vec(n, b), module })
    }

    pub fn unit(cd: &Arc<CartanDatum>) -> Self {
        let m = irrep(cd, &vec![0; cd.rank]).expect("trivial module");
        MatrixCoefficient::basis(m, 0, 0).expect("1-dim")
    }

    /// Pairing with a word in the generators.
    pub fn eval_word(&self, word: &[Gen]) -> RatQ {
        dot(&self.l, &self.module.act_word(word, &self.v))
    }

    pub fn pairing(&self) -> RatQ {
        dot(&self.l, &self.v)
    }

    /// `c^*` as a coefficient of the dual module: `(l G^{-1}, G v)`.
    pub fn star(&self) -> MatrixCoefficient {
        let m = &self.module;
        let ginv = m.gram.inverse().expect("nondegenerate form");
        let dual = Arc::new(dual_module(m));
        MatrixCoefficient { l: ginv.apply_left(&self.l), v: m.gram.apply(&self.v), module: dual }
    }

    /// `S(c_{l,v}) = c^{M*}_{v,l}`.
    pub fn antipode(&self) -> MatrixCoefficient {
        MatrixCoefficient { module: Arc::new(dual_module(&self.module)), l: self.v.clone(), v: self.l.clone() }
    }

    /// Weight `lambda` of `v` (zero vector gives the highest weight).
    pub fn v_weight(&self) -> Vec<i64> {
        self.module.weight_of(&self.v).unwrap_or_else(|_| self.module.highest.clone())
    }

    /// Weight `mu` with `l` of weight `-mu`.
    pub fn l_weight(&self) -> Vec<i64> {
        self.module.weight_of(&self.l).unwrap_or_else(|_| self.module.highest.clone())
    }
}

/// `a_{Lambda, w} = c_{l, v_Lambda}` with `l` supported on weight `w Lambda`
/// and `<l, T_w v_Lambda> = 1`.
pub fn a_coefficient(module: &Arc<UqModule>, w: &WeylWord) -> Result<MatrixCoefficient, ModuleError> {
    let cd = &module.cd;
    if !cd.is_reduced(w) {
        return Err(RootError::NotReduced(w.letters().to_vec()).into());
    }
    let n = module.dim();
    let top = unit_vec(n, module.hw_index);
    let tv = module.braid_apply(w).apply(&top);
    let target = cd.weyl_apply(w, &module.highest);
    let idx: Vec<usize> = (0..n).filter(|&a| module.weights[a] == target).collect();
    if idx.len() != 1 {
        return Err(ModuleError::Dimension("extremal weight space is not a line".into()));
    }
    let j = idx[0];
    let inv = tv[j].inv().map_err(|_| ModuleError::Relation("T_w v vanishes".into()))?;
    let mut l = vec![RatQ::zero(); n];
    l[j] = inv;
    MatrixCoefficient::new(module.clone(), l, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::build_cartan;

    fn datum(s: char, n: usize) -> Arc<CartanDatum> {
        Arc::new(build_cartan(s, n).unwrap())
    }

    #[test]
    fn a1_fundamental_matches_matrix_display() {
        let cd = datum('A', 1);
        let m = build_fundamental(&cd, 1).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.e[0].get(0, 1), RatQ::one());
        assert_eq!(m.f[0].get(1, 0), RatQ::one());
        assert_eq!(m.k_exp(0, 0), 1);
        assert_eq!(m.k_exp(0, 1), -1);
    }

    #[test]
    fn a2_fundamental_weights() {
        let cd = datum('A', 2);
        let m = build_fundamental(&cd, 1).unwrap();
        assert_eq!(m.weights, vec![vec![1, 0], vec![-1, 1], vec![0, -1]]);
        let m2 = build_fundamental(&cd, 2).unwrap();
        assert_eq!(m2.weights, vec![vec![0, 1], vec![1, -1], vec![-1, 0]]);
        m.check_relations().unwrap();
        m.check_star().unwrap();
    }

    #[test]
    fn a1_tensor_square_splits() {
        let cd = datum('A', 1);
        let v = build_fundamental(&cd, 1).unwrap();
        let t = tensor_module(&v, &v).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.weight_multiplicity(&[0]), 2);
        t.check_relations().unwrap();
        t.check_star().unwrap();
        let l2 = highest_weight_submodule(&t, &[2]).unwrap();
        assert_eq!(l2.dim(), 3);
        assert_eq!(singular_vectors(&t, &[0]).len(), 1);
    }

    #[test]
    fn a2_adjoint_from_product() {
        let cd = datum('A', 2);
        let t = tensor_module(&build_fundamental(&cd, 1).unwrap(), &build_fundamental(&cd, 2).unwrap()).unwrap();
        assert_eq!(singular_vectors(&t, &[0, 0]).len(), 1);
        assert_eq!(singular_vectors(&t, &[1, 1]).len(), 1);
        let adj = highest_weight_submodule(&t, &[1, 1]).unwrap();
        assert_eq!(adj.dim(), 8);
        assert_eq!(adj.weight_multiplicity(&[0, 0]), 2);
        adj.check_relations().unwrap();
        adj.check_star().unwrap();
    }

    #[test]
    fn missing_singular_vector_is_an_error() {
        let cd = datum('A', 1);
        let v = build_fundamental(&cd, 1).unwrap();
        assert!(matches!(highest_weight_submodule(&v, &[3]), Err(ModuleError::NoSingularVector(_))));
    }

    #[test]
    fn b2_vector_module() {
        let cd = datum('B', 2);
        let m = build_fundamental(&cd, 1).unwrap();
        assert_eq!(m.dim(), 5);
        m.check_relations().unwrap();
        m.check_star().unwrap();
    }

    #[test]
    fn a1_braid_generator() {
        let cd = datum('A', 1);
        let m = build_fundamental(&cd, 1).unwrap();
        let t = m.braid_generator(0);
        assert_eq!(t.get(1, 0), -RatQ::q_pow(1));
        assert_eq!(t.get(0, 1), RatQ::one());
        assert!(t.get(0, 0).is_zero() && t.get(1, 1).is_zero());
    }

    #[test]
    fn a1_a_coefficient_is_scaled_c21() {
        let cd = datum('A', 1);
        let m = build_fundamental(&cd, 1).unwrap();
        let a = a_coefficient(&m, &WeylWord(vec![1])).unwrap();
        assert_eq!(a.v, unit_vec(2, 0));
        assert_eq!(a.l, vec![RatQ::zero(), -RatQ::q_pow(-1)]);
        let id = a_coefficient(&m, &WeylWord::identity()).unwrap();
        assert!(id.pairing().is_one());
    }

    #[test]
    fn sl2_chains_of_a2_vector() {
        let cd = datum('A', 2);
        let m = build_fundamental(&cd, 1).unwrap();
        let ch = m.sl2_decompose(0);
        let mut lens: Vec<usize> = ch.iter().map(|c| c.len).collect();
        lens.sort();
        assert_eq!(lens, vec![0, 1]);
        let singlet = ch.iter().find(|c| c.len == 0).unwrap();
        assert_eq!(m.weight_of(&singlet.vectors[0]).unwrap(), vec![0, -1]);
    }

    #[test]
    fn dual_of_a2_vector_is_other_fundamental() {
        let cd = datum('A', 2);
        let m = build_fundamental(&cd, 1).unwrap();
        let (target, dual, _phi) = dual_module_iso(&m).unwrap();
        assert_eq!(target.highest, vec![0, 1]);
        dual.check_relations().unwrap();
        dual.check_star().unwrap();
    }

    #[test]
    fn record_survives_json_and_rejects_tampering() {
        let cd = Arc::new(crate::rootdata::build_cartan('B', 2).unwrap());
        let m = irrep(&cd, &[1, 0]).unwrap();
        let text = serde_json::to_string(&m.to_record()).unwrap();
        let back: ModuleRecord = serde_json::from_str(&text).unwrap();
        let m2 = UqModule::from_record(&cd, &back).unwrap();
        assert_eq!(m2.e, m.e);
        assert_eq!(m2.gram, m.gram);
        let mut bad = back.clone();
        bad.e[0][0].2 = "q".into();
        assert!(UqModule::from_record(&cd, &bad).is_err());
        bad = back;
        bad.format = "old".into();
        assert!(UqModule::from_record(&cd, &bad).is_err());
    }
}
