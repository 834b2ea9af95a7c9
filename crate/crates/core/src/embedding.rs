//! Highest-weight representations `Λ_λ` of SL(n), the projective embedding
//! `P ↦ L_P^λ`, and the eigenbasis chart of the `τ` action.
//!
//! Every module is realized inside a tensor product of exterior powers
//! `⊗_i Λ^i(ℝⁿ)^{⊗c_i}` (the *ambient* space). For a single fundamental
//! weight `ω_k` the module is all of `Λ^k(ℝⁿ)` with its lexicographic wedge
//! basis; otherwise it is the span of all lowering monomials applied to the
//! tensor product of highest weight vectors, with a basis of weight vectors
//! extracted by exact elimination.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::SymmetricEigen;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chevalley::{Factor, Pinning};
use crate::error::{Error, Result};
use crate::matrix::{compound, norm, subsets, Matrix};
use crate::scalar::{fmt_decimal, fmt_q, parse_decimal, qi, Scalar, Q};

/// Smallest admissible gap `μ₀ − μ₁` of the top eigenvalue.
pub const TOP_GAP_MIN: f64 = 1e-8;

/// Dominant weight `λ = Σ c_i ω_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    coeffs: Vec<u32>,
}

impl Weight {
    pub fn new(coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::RankTooSmall(coeffs.len() + 1));
        }
        Ok(Self { coeffs })
    }

    pub fn fundamental(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::RankTooSmall(n));
        }
        if k == 0 || k >= n {
            return Err(Error::IndexOutOfRange { index: k, max: n - 1 });
        }
        let mut c = vec![0; n - 1];
        c[k - 1] = 1;
        Ok(Self { coeffs: c })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `⟨α_i^∨, λ⟩`, 1-based.
    pub fn pairing(&self, i: usize) -> u32 {
        self.coeffs[i - 1]
    }

    pub fn support(&self) -> BTreeSet<usize> {
        (1..self.n()).filter(|&i| self.pairing(i) > 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Wedge degrees of the tensor factors, ascending.
    pub fn tensor_factors(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c as usize))
            .collect()
    }

    /// `Some(k)` when `λ = ω_k`.
    pub fn as_fundamental(&self) -> Option<usize> {
        match self.tensor_factors().as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }
}

/// `c_i = 1` off `J`, zero on `J`.
pub fn lambda_for(n: usize, j: &BTreeSet<usize>) -> Result<Weight> {
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    crate::totpos::check_j(n, j)?;
    Weight::new((1..n).map(|i| u32::from(!j.contains(&i))).collect())
}

/// Action of a Lie algebra element on `Λ^k(ℝⁿ)` in the lexicographic wedge
/// basis.
pub fn wedge_derivation<T: Scalar>(x: &Matrix<T>, k: usize) -> Matrix<T> {
    let n = x.rows();
    let idx = subsets(n, k);
    let pos = |s: &[usize]| idx.binary_search_by(|p| p.as_slice().cmp(s)).ok();
    let mut out = Matrix::<T>::zeros(idx.len(), idx.len());
    for (col, set) in idx.iter().enumerate() {
        for m in 0..k {
            for r in 0..n {
                let a = &x[(r, set[m])];
                if a.is_zero() || (set.contains(&r) && r != set[m]) {
                    continue;
                }
                let mut s = set.clone();
                s[m] = r;
                // sort, tracking the sign of the permutation
                let mut sign = true;
                for i in 0..k {
                    for j in i + 1..k {
                        if s[i] > s[j] {
                            sign = !sign;
                        }
                    }
                }
                s.sort_unstable();
                let row = pos(&s).expect("subset present");
                let v = if sign { a.clone() } else { -a.clone() };
                out[(row, col)] = out[(row, col)].clone() + v;
            }
        }
    }
    out
}

fn wedge_label(set: &[usize]) -> String {
    if set.is_empty() {
        return "1".into();
    }
    set.iter()
        .map(|i| format!("e{}", i + 1))
        .collect::<Vec<_>>()
        .join("^")
}

/// A highest-weight module with a basis of weight vectors and exact action
/// matrices of the Chevalley generators.
#[derive(Clone, Debug)]
pub struct RepModule {
    pinning: Pinning,
    weight: Weight,
    factors: Vec<usize>,
    labels: Vec<String>,
    /// ambient coordinates of the basis vectors, one per column
    basis: Matrix<Q>,
    e: Vec<Matrix<Q>>,
    f: Vec<Matrix<Q>>,
    h: Vec<Matrix<Q>>,
    highest_index: usize,
    pivot_rows: Vec<usize>,
    pivot_inv: Matrix<Q>,
    ortho_q: Matrix<f64>,
    ortho_r: Matrix<f64>,
    ortho_r_inv: Matrix<f64>,
}

/// `Λ^k(ℝⁿ)` with its lexicographic wedge basis.
pub fn fundamental_rep(n: usize, k: usize) -> Result<RepModule> {
    let weight = Weight::fundamental(n, k)?;
    let pinning = Pinning::new(n)?;
    let idx = subsets(n, k);
    let basis = Matrix::identity(idx.len());
    let labels = idx.iter().map(|s| wedge_label(s)).collect();
    RepModule::assemble(pinning, weight, vec![k], basis, labels)
}

/// Irreducible module of highest weight `λ`, cut out of the tensor product of
/// fundamental representations by lowering closure.
pub fn build_rep(weight: &Weight) -> Result<RepModule> {
    if weight.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let n = weight.n();
    if let Some(k) = weight.as_fundamental() {
        return fundamental_rep(n, k);
    }
    let pinning = Pinning::new(n)?;
    let factors = weight.tensor_factors();
    let lower: Vec<Matrix<Q>> = (1..n)
        .map(|i| ambient_operator(pinning.f(i), &factors))
        .collect();
    let ambient_dim = lower[0].rows();

    // the tensor product of lex-first wedges sits at ambient index 0
    let mut hw = vec![qi(0); ambient_dim];
    hw[0] = qi(1);

    let mut echelon = Echelon::default();
    echelon.insert(&hw);
    let mut vectors = vec![hw];
    let mut labels = vec!["v".to_string()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(b) = queue.pop_front() {
        for (i, op) in lower.iter().enumerate() {
            let w = op.mul_vec(&vectors[b]);
            if w.iter().all(Zero::is_zero) || !echelon.insert(&w) {
                continue;
            }
            labels.push(format!("f{} {}", i + 1, labels[b]));
            vectors.push(w);
            queue.push_back(vectors.len() - 1);
        }
    }
    let basis = Matrix::from_columns(&vectors);
    RepModule::assemble(pinning, weight.clone(), factors, basis, labels)
}

/// Incremental exact row echelon form used for independence tests.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Q>)>,
}

impl Echelon {
    /// Adds `v` if it is independent of the stored vectors.
    fn insert(&mut self, v: &[Q]) -> bool {
        let mut v = v.to_vec();
        for (p, r) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(r) {
                *x = x.clone() - y.clone() * f.clone();
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let piv = v[p].clone();
        for x in &mut v {
            *x = x.clone() / piv.clone();
        }
        self.rows.push((p, v));
        true
    }
}

/// `Σ_j 1 ⊗ ⋯ ⊗ X^{(k_j)} ⊗ ⋯ ⊗ 1` on the ambient tensor product.
fn ambient_operator<T: Scalar>(x: &Matrix<T>, factors: &[usize]) -> Matrix<T> {
    let parts: Vec<Matrix<T>> = factors.iter().map(|&k| wedge_derivation(x, k)).collect();
    let dims: Vec<usize> = parts.iter().map(Matrix::rows).collect();
    let total: usize = dims.iter().product();
    let mut out = Matrix::<T>::zeros(total, total);
    for (j, part) in parts.iter().enumerate() {
        let term = dims.iter().enumerate().fold(Matrix::identity(1), |acc, (m, &d)| {
            if m == j {
                acc.kron(part)
            } else {
                acc.kron(&Matrix::identity(d))
            }
        });
        out = &out + &term;
    }
    out
}

/// `⊗_j Λ^{k_j}(g)` on the ambient space.
fn ambient_group_action<T: Scalar>(g: &Matrix<T>, factors: &[usize]) -> Matrix<T> {
    factors
        .iter()
        .fold(Matrix::identity(1), |acc, &k| acc.kron(&compound(g, k)))
}

/// `⊗_j (g e_1 ∧ ⋯ ∧ g e_{k_j})`: the image of the ambient highest weight
/// vector under `g`.
fn ambient_highest_image<T: Scalar>(g: &Matrix<T>, factors: &[usize]) -> Vec<T> {
    let n = g.rows();
    factors.iter().fold(vec![T::one()], |acc, &k| {
        let first: Vec<usize> = (0..k).collect();
        let plucker: Vec<T> = subsets(n, k).iter().map(|s| g.minor(s, &first)).collect();
        acc.iter()
            .flat_map(|a| plucker.iter().map(move |p| a.clone() * p.clone()))
            .collect()
    })
}

impl RepModule {
    fn assemble(
        pinning: Pinning,
        weight: Weight,
        factors: Vec<usize>,
        basis: Matrix<Q>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let pivot_rows = basis.independent_rows();
        let dim = basis.cols();
        if pivot_rows.len() != dim {
            return Err(Error::Invalid("module basis is not independent".into()));
        }
        let all_cols: Vec<usize> = (0..dim).collect();
        let pivot_inv = basis
            .submatrix(&pivot_rows, &all_cols)
            .inverse()
            .expect("pivot block is invertible");
        let qr = basis.to_f64().to_nalgebra().qr();
        let ortho_q = Matrix::from_nalgebra(&qr.q());
        let ortho_r = Matrix::from_nalgebra(&qr.r());
        let ortho_r_inv = ortho_r
            .inverse()
            .ok_or_else(|| Error::Invalid("singular orthonormalization".into()))?;
        let mut rep = Self {
            pinning,
            weight,
            factors,
            labels,
            basis,
            e: Vec::new(),
            f: Vec::new(),
            h: Vec::new(),
            highest_index: 0,
            pivot_rows,
            pivot_inv,
            ortho_q,
            ortho_r,
            ortho_r_inv,
        };
        let n = rep.pinning.n();
        for i in 1..n {
            let e = rep.restrict(rep.pinning.e(i))?;
            let f = rep.restrict(rep.pinning.f(i))?;
            let h = rep.restrict(rep.pinning.h(i))?;
            if !h.is_diagonal() {
                return Err(Error::Invalid(format!("H_{i} is not diagonal")));
            }
            rep.e.push(e);
            rep.f.push(f);
            rep.h.push(h);
        }
        Ok(rep)
    }

    /// Matrix of a Lie algebra element in the module basis.
    fn restrict(&self, x: &Matrix<Q>) -> Result<Matrix<Q>> {
        let amb = ambient_operator(x, &self.factors);
        let image = &amb * &self.basis;
        let cols: Vec<Vec<Q>> = (0..image.cols())
            .map(|c| self.coords_exact(&image.column(c)))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(&cols))
    }

    pub fn n(&self) -> usize {
        self.pinning.n()
    }

    pub fn pinning(&self) -> &Pinning {
        &self.pinning
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn highest_index(&self) -> usize {
        self.highest_index
    }

    /// `E_i`, 1-based.
    pub fn e(&self, i: usize) -> &Matrix<Q> {
        &self.e[i - 1]
    }

    pub fn f(&self, i: usize) -> &Matrix<Q> {
        &self.f[i - 1]
    }

    pub fn h(&self, i: usize) -> &Matrix<Q> {
        &self.h[i - 1]
    }

    /// `true` when the basis is the canonical (wedge) basis of a minuscule
    /// module.
    pub fn is_minuscule(&self) -> bool {
        self.weight.as_fundamental().is_some()
    }

    /// `⟨α_i^∨, wt(b)⟩` for each basis vector `b`.
    pub fn weights(&self) -> Vec<Vec<i64>> {
        (0..self.dim())
            .map(|b| {
                self.h
                    .iter()
                    .map(|h| {
                        let x = &h[(b, b)];
                        debug_assert!(x.denom().is_one());
                        x.to_integer().try_into().expect("small weight")
                    })
                    .collect()
            })
            .collect()
    }

    /// Σ (E_i + F_i) in the module basis.
    pub fn tau(&self) -> Matrix<Q> {
        self.e
            .iter()
            .zip(&self.f)
            .fold(Matrix::zeros(self.dim(), self.dim()), |acc, (e, f)| {
                &(&acc + e) + f
            })
    }

    /// Module coordinates of an ambient vector lying in the module.
    pub fn coords_exact(&self, y: &[Q]) -> Result<Vec<Q>> {
        if y.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "ambient vector of length {} (expected {})",
                y.len(),
                self.ambient_dim()
            )));
        }
        let yp: Vec<Q> = self.pivot_rows.iter().map(|&r| y[r].clone()).collect();
        let x = self.pivot_inv.mul_vec(&yp);
        if self.basis.mul_vec(&x) != y {
            return Err(Error::Invalid("vector is not in the module".into()));
        }
        Ok(x)
    }

    /// Least-squares module coordinates of a float ambient vector.
    pub fn coords_f64(&self, y: &[f64]) -> Vec<f64> {
        let z = self.ortho_q.transpose().mul_vec(y);
        self.ortho_r_inv.mul_vec(&z)
    }

    /// Orthonormal-frame coordinates `z = R x` of module coordinates `x`.
    pub fn to_orthonormal(&self, x: &[f64]) -> Vec<f64> {
        self.ortho_r.mul_vec(x)
    }

    pub fn from_orthonormal(&self, z: &[f64]) -> Vec<f64> {
        self.ortho_r_inv.mul_vec(z)
    }

    /// Matrix of `exp(X)` for a factor, exact.
    pub fn factor_action(&self, factor: &Factor<Q>) -> Result<Matrix<Q>> {
        let check = |i: usize| self.pinning.check_index(i);
        match factor {
            Factor::X(i, t) => {
                check(*i)?;
                Ok(nilpotent_exp(self.e(*i), t))
            }
            Factor::Y(i, t) => {
                check(*i)?;
                Ok(nilpotent_exp(self.f(*i), t))
            }
            Factor::Coweight(i, t) => {
                check(*i)?;
                if t.is_zero() {
                    return Err(Error::ZeroCoweight);
                }
                let w = self.weights();
                Ok(Matrix::from_fn(self.dim(), self.dim(), |a, b| {
                    if a == b {
                        pow_i(t, w[a][*i - 1])
                    } else {
                        Q::zero()
                    }
                }))
            }
            Factor::SDot(i) => {
                check(*i)?;
                let xm = nilpotent_exp(self.e(*i), &-Q::one());
                let y = nilpotent_exp(self.f(*i), &Q::one());
                Ok(&(&xm * &y) * &xm)
            }
            Factor::SDotInv(i) => {
                check(*i)?;
                let xp = nilpotent_exp(self.e(*i), &Q::one());
                let ym = nilpotent_exp(self.f(*i), &-Q::one());
                Ok(&(&xp * &ym) * &xp)
            }
        }
    }

    /// `ρ(g)` of a product of factors, left to right.
    pub fn act_factors(&self, factors: &[Factor<Q>]) -> Result<Matrix<Q>> {
        factors
            .iter()
            .try_fold(Matrix::identity(self.dim()), |acc, f| {
                Ok(&acc * &self.factor_action(f)?)
            })
    }

    /// `ρ(g)` of a raw exact matrix through the ambient tensor action.
    pub fn act_matrix(&self, g: &Matrix<Q>) -> Result<Matrix<Q>> {
        self.check_group(g)?;
        let image = &ambient_group_action(g, &self.factors) * &self.basis;
        let cols: Vec<Vec<Q>> = (0..image.cols())
            .map(|c| self.coords_exact(&image.column(c)))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(&cols))
    }

    fn check_group<T: Scalar>(&self, g: &Matrix<T>) -> Result<()> {
        if !g.is_square() || g.rows() != self.n() {
            return Err(Error::Dimension(format!(
                "expected a {n}x{n} matrix",
                n = self.n()
            )));
        }
        Ok(())
    }

    pub fn highest_line(&self) -> LineCoords<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[self.highest_index] = Q::one();
        LineCoords::new(v).expect("nonzero")
    }

    /// `g · v_λ` for `g` given as factors (exact path).
    pub fn psi_factors(&self, factors: &[Factor<Q>]) -> Result<LineCoords<Q>> {
        let mut v = self.highest_line().vec;
        for f in factors.iter().rev() {
            v = self.factor_action(f)?.mul_vec(&v);
        }
        LineCoords::new(v)
    }

    /// `g · v_λ` for a raw exact matrix.
    pub fn psi_matrix_exact(&self, g: &Matrix<Q>) -> Result<LineCoords<Q>> {
        self.check_group(g)?;
        let y = ambient_highest_image(g, &self.factors);
        LineCoords::new(self.coords_exact(&y)?)
    }

    /// `g · v_λ` for a raw float matrix.
    pub fn psi_matrix_f64(&self, g: &Matrix<f64>) -> Result<LineCoords<f64>> {
        self.check_group(g)?;
        let y = ambient_highest_image(g, &self.factors);
        LineCoords::new(self.coords_f64(&y))
    }

    /// Symmetric matrix of the τ action in the orthonormalized frame.
    pub fn tau_orthonormal(&self) -> Matrix<f64> {
        let t = self.tau().to_f64();
        let a = &(&self.ortho_r * &t) * &self.ortho_r_inv;
        Matrix::from_fn(a.rows(), a.cols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
    }

    /// Largest asymmetry of the τ action in the orthonormalized frame before
    /// symmetrization.
    pub fn tau_asymmetry(&self) -> f64 {
        let t = self.tau().to_f64();
        let a = &(&self.ortho_r * &t) * &self.ortho_r_inv;
        a.max_abs_diff(&a.transpose())
    }

    pub fn to_json(&self) -> RepJson {
        let mats = |v: &[Matrix<Q>]| v.iter().map(Matrix::to_strings).collect();
        RepJson {
            n: self.n(),
            weight: self.weight.coeffs.clone(),
            dim: self.dim(),
            tensor_factors: self.factors.clone(),
            labels: self.labels.clone(),
            highest_index: self.highest_index,
            weights: self.weights(),
            e: mats(&self.e),
            f: mats(&self.f),
            h: mats(&self.h),
        }
    }
}

fn pow_i(t: &Q, k: i64) -> Q {
    let base = if k < 0 { t.recip() } else { t.clone() };
    (0..k.unsigned_abs()).fold(Q::one(), |acc, _| acc * base.clone())
}

/// `Σ_m t^m X^m / m!` for nilpotent `X`.
fn nilpotent_exp(x: &Matrix<Q>, t: &Q) -> Matrix<Q> {
    let n = x.rows();
    let step = x.scale(t);
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for m in 1..=n {
        term = (&term * &step).scale(&Q::new(1.into(), (m as i64).into()));
        if term.is_zero() {
            break;
        }
        sum = &sum + &term;
    }
    sum
}

/// JSON image of a [`RepModule`]; matrices as exact fraction strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepJson {
    pub n: usize,
    pub weight: Vec<u32>,
    pub dim: usize,
    pub tensor_factors: Vec<usize>,
    pub labels: Vec<String>,
    pub highest_index: usize,
    pub weights: Vec<Vec<i64>>,
    pub e: Vec<Vec<Vec<String>>>,
    pub f: Vec<Vec<Vec<String>>>,
    pub h: Vec<Vec<Vec<String>>>,
}

/// A line in `ℙ(Λ_λ)`, given by a nonzero representative in module
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LineCoords<T> {
    vec: Vec<T>,
}

impl<T: Scalar> LineCoords<T> {
    pub fn new(vec: Vec<T>) -> Result<Self> {
        if vec.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("zero vector does not span a line".into()));
        }
        Ok(Self { vec })
    }

    pub fn vec(&self) -> &[T] {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// Representative whose first nonzero coordinate is 1.
    pub fn normalized(&self) -> Vec<T> {
        let first = self
            .vec
            .iter()
            .find(|x| !x.is_zero())
            .cloned()
            .expect("nonzero line");
        self.vec.iter().map(|x| x.clone() / first.clone()).collect()
    }

    pub fn same_line(&self, other: &Self) -> bool
    where
        T: Scalar,
    {
        T::EXACT && self.normalized() == other.normalized()
    }

    /// Whether every coordinate is strictly positive up to one overall sign.
    pub fn is_positive(&self, tol: f64) -> bool {
        let v = self.normalized();
        let scale = v.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let sign = if v.iter().map(Scalar::to_f64).sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        v.iter()
            .all(|x| sign * x.to_f64() > if T::EXACT { 0.0 } else { tol * scale })
    }

    /// Whether every coordinate is nonnegative up to one overall sign.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        let v = self.normalized();
        let scale = v.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let sign = if v.iter().map(Scalar::to_f64).sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        let floor = if T::EXACT { 0.0 } else { -tol * scale };
        v.iter().all(|x| sign * x.to_f64() >= floor)
    }

    pub fn to_f64(&self) -> LineCoords<f64> {
        LineCoords {
            vec: self.vec.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl LineCoords<f64> {
    pub fn unit(&self) -> Vec<f64> {
        let s = norm(&self.vec);
        self.vec.iter().map(|x| x / s).collect()
    }
}

/// `p ∈ ℝ^N` in the eigenbasis chart. Serialized as decimal strings; plain
/// JSON numbers are accepted on input.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint(pub Vec<f64>);

impl Serialize for ChartPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&x| fmt_decimal(x)))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrString {
    Number(f64),
    String(String),
}

impl<'de> Deserialize<'de> for ChartPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<NumberOrString>::deserialize(d)?;
        raw.into_iter()
            .map(|x| match x {
                NumberOrString::Number(v) => Ok(v),
                NumberOrString::String(s) => parse_decimal(&s).map_err(serde::de::Error::custom),
            })
            .collect::<std::result::Result<_, _>>()
            .map(ChartPoint)
    }
}

impl ChartPoint {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dist(&self, other: &Self) -> f64 {
        norm(&self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>())
    }
}

/// Eigenbasis of the τ action with the chart
/// `p ↦ ⟨v₀ + p₁v₁ + ⋯ + p_N v_N⟩`.
#[derive(Clone, Debug)]
pub struct Chart {
    mu: Vec<f64>,
    /// eigenvectors in the orthonormal frame, one per column
    frame_vectors: Matrix<f64>,
    rep: RepModule,
}

/// Symmetric eigendecomposition of the τ action, eigenvalues descending.
pub fn eigenchart(rep: &RepModule) -> Result<Chart> {
    let a = rep.tau_orthonormal();
    let dim = a.rows();
    let eig = SymmetricEigen::new(a.to_nalgebra());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let mu: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if dim > 1 {
        let gap = mu[0] - mu[1];
        if gap < TOP_GAP_MIN {
            return Err(Error::DegenerateTop {
                gap,
                threshold: TOP_GAP_MIN,
            });
        }
    }
    let mut frame_vectors = Matrix::zeros(dim, dim);
    for (c, &k) in order.iter().enumerate() {
        let z: Vec<f64> = (0..dim).map(|i| eig.eigenvectors[(i, k)]).collect();
        let x = rep.from_orthonormal(&z);
        // largest-magnitude module coordinate made positive
        let lead = x
            .iter()
            .copied()
            .reduce(|a, b| if b.abs() > a.abs() { b } else { a })
            .unwrap_or(1.0);
        let s = if lead < 0.0 { -1.0 } else { 1.0 };
        frame_vectors.set_column(c, &z.iter().map(|v| v * s).collect::<Vec<_>>());
    }
    Ok(Chart {
        mu,
        frame_vectors,
        rep: rep.clone(),
    })
}

impl Chart {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    /// Chart dimension `N = dim Λ_λ − 1`.
    pub fn chart_dim(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn rep(&self) -> &RepModule {
        &self.rep
    }

    /// `μ₀ − μ₁`.
    pub fn top_gap(&self) -> f64 {
        self.mu[0] - self.mu.get(1).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Eigenvector `v_k` in module coordinates.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.rep.from_orthonormal(&self.frame_vectors.column(k))
    }

    pub fn top_line(&self) -> LineCoords<f64> {
        LineCoords::new(self.vector(0)).expect("eigenvector is nonzero")
    }

    /// Frame coordinates `c_k = ⟨z, v_k⟩` of a line.
    fn eigen_coords(&self, line: &LineCoords<f64>) -> Result<Vec<f64>> {
        if line.dim() != self.mu.len() {
            return Err(Error::Dimension(format!(
                "line of dimension {} in a chart of dimension {}",
                line.dim(),
                self.mu.len()
            )));
        }
        let z = self.rep.to_orthonormal(line.vec());
        Ok(self.frame_vectors.transpose().mul_vec(&z))
    }

    pub fn chart_coords(&self, line: &LineCoords<f64>) -> Result<ChartPoint> {
        let c = self.eigen_coords(line)?;
        let c0 = c[0];
        if !(c0.abs() > 1e-14 * norm(&c)) {
            return Err(Error::ChartOverflow);
        }
        Ok(ChartPoint(c[1..].iter().map(|x| x / c0).collect()))
    }

    pub fn chart_line(&self, p: &ChartPoint) -> Result<LineCoords<f64>> {
        if p.dim() != self.chart_dim() {
            return Err(Error::Dimension(format!(
                "chart point of dimension {} (expected {})",
                p.dim(),
                self.chart_dim()
            )));
        }
        let c: Vec<f64> = std::iter::once(1.0).chain(p.0.iter().copied()).collect();
        let z = self.frame_vectors.mul_vec(&c);
        LineCoords::new(self.rep.from_orthonormal(&z))
    }

    pub fn to_json(&self) -> ChartJson {
        ChartJson {
            dim: self.mu.len(),
            chart_dim: self.chart_dim(),
            eigenvalues: self.mu.iter().map(|&m| fmt_decimal(m)).collect(),
            log_c: fmt_decimal(self.top_gap()),
            vectors: (0..self.mu.len())
                .map(|k| self.vector(k).iter().map(|&x| fmt_decimal(x)).collect())
                .collect(),
        }
    }
}

/// JSON image of a [`Chart`]; eigenvalues and eigenvectors (module
/// coordinates) as decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub dim: usize,
    pub chart_dim: usize,
    pub eigenvalues: Vec<String>,
    pub log_c: String,
    pub vectors: Vec<Vec<String>>,
}

/// `psi` with the `J` consistency check: the module must come from
/// [`lambda_for`]`(n, J)`.
pub fn psi(
    rep: &RepModule,
    g: &crate::chevalley::GroupElement,
    j: &BTreeSet<usize>,
) -> Result<LineCoords<f64>> {
    let expected: BTreeSet<usize> = (1..rep.n()).filter(|i| !j.contains(i)).collect();
    if rep.weight().support() != expected {
        return Err(Error::Invalid(format!(
            "module support {:?} does not match J = {:?}",
            rep.weight().support(),
            j
        )));
    }
    match g {
        crate::chevalley::GroupElement::Exact(m) => Ok(rep.psi_matrix_exact(m)?.to_f64()),
        crate::chevalley::GroupElement::Float(m) => rep.psi_matrix_f64(m),
    }
}

pub fn fmt_line(line: &LineCoords<Q>) -> Vec<String> {
    line.vec().iter().map(fmt_q).collect()
}
