//! Totally positive and totally nonnegative parts: factorized samples of
//! `U^±`, `T` and `G`, the all-minors criterion, canonical flag
//! representatives, and the SL₃ complete-flag membership test.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chevalley::{Factor, GroupElement, Pinning};
use crate::error::{Error, Result};
use crate::matrix::{subsets, Matrix};
use crate::scalar::{q_dyadic, Scalar, Q};

/// Default absolute tolerance for float-mode constraint checks.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

/// Bits of the dyadic grid sampled parameters are rounded to.
const PARAM_BITS: u32 = 20;

/// Reduced decomposition of the longest Weyl group element of S_n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedWord {
    n: usize,
    letters: Vec<usize>,
}

impl ReducedWord {
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::RankTooSmall(n));
        }
        if letters.len() != n * (n - 1) / 2 {
            return Err(Error::Invalid(format!(
                "word of length {} cannot be reduced for w0 (need {})",
                letters.len(),
                n * (n - 1) / 2
            )));
        }
        if let Some(&bad) = letters.iter().find(|&&i| i == 0 || i >= n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                max: n - 1,
            });
        }
        let word = Self { n, letters };
        if !word.is_longest() {
            return Err(Error::Invalid(format!(
                "{:?} does not multiply to the longest permutation",
                word.letters
            )));
        }
        Ok(word)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Image of `0..n` under `s_{i_1} ⋯ s_{i_ℓ}`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut w: Vec<usize> = (0..self.n).collect();
        // composing on the right permutes positions
        for &i in &self.letters {
            w.swap(i - 1, i);
        }
        w
    }

    fn is_longest(&self) -> bool {
        self.permutation()
            .iter()
            .enumerate()
            .all(|(j, &wj)| wj == self.n - 1 - j)
    }
}

/// The staircase word `(1, 2,1, 3,2,1, …)`.
pub fn standard_word_w0(n: usize) -> Result<ReducedWord> {
    let letters = (1..n).flat_map(|k| (1..=k).rev()).collect();
    ReducedWord::new(n, letters)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationParams<T> {
    word: ReducedWord,
    t: Vec<T>,
    torus: Option<Vec<T>>,
}

impl<T: Scalar> FactorizationParams<T> {
    pub fn new(word: ReducedWord, t: Vec<T>, torus: Option<Vec<T>>) -> Result<Self> {
        if t.len() != word.len() {
            return Err(Error::Dimension(format!(
                "{} parameters for a word of length {}",
                t.len(),
                word.len()
            )));
        }
        if t.iter().any(|x| *x < T::zero()) {
            return Err(Error::Invalid("factorization parameters must be >= 0".into()));
        }
        if let Some(torus) = &torus {
            if torus.len() != word.n() - 1 {
                return Err(Error::Dimension(format!(
                    "{} torus parameters for SL({})",
                    torus.len(),
                    word.n()
                )));
            }
            if torus.iter().any(|x| !x.gt_zero()) {
                return Err(Error::Invalid("torus parameters must be > 0".into()));
            }
        }
        Ok(Self { word, t, torus })
    }

    pub fn word(&self) -> &ReducedWord {
        &self.word
    }

    pub fn t(&self) -> &[T] {
        &self.t
    }

    pub fn torus(&self) -> Option<&[T]> {
        self.torus.as_deref()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.t.iter().all(Scalar::gt_zero)
    }

    pub fn factors(&self, side: Side) -> Vec<Factor<T>> {
        let xs = || {
            self.word
                .letters()
                .iter()
                .zip(&self.t)
                .map(|(&i, t)| Factor::X(i, t.clone()))
        };
        let ys = || {
            self.word
                .letters()
                .iter()
                .zip(&self.t)
                .map(|(&i, t)| Factor::Y(i, t.clone()))
        };
        match side {
            Side::Upper => xs().collect(),
            Side::Lower => ys().collect(),
            Side::Group => {
                let torus = self
                    .torus
                    .iter()
                    .flatten()
                    .enumerate()
                    .map(|(k, c)| Factor::Coweight(k + 1, c.clone()));
                xs().chain(torus).chain(ys()).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `x_{i_1}(t_1) ⋯ x_{i_ℓ}(t_ℓ)`
    Upper,
    /// `y_{i_1}(t_1) ⋯ y_{i_ℓ}(t_ℓ)`
    Lower,
    /// upper · torus · lower
    Group,
}

pub fn sample_positive<T: Scalar>(
    pinning: &Pinning,
    params: &FactorizationParams<T>,
    side: Side,
) -> Result<Matrix<T>> {
    if params.word().n() != pinning.n() {
        return Err(Error::Dimension("word and pinning disagree on n".into()));
    }
    pinning.product(&params.factors(side))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TnnClass {
    TotallyPositive,
    TotallyNonnegative,
    Neither,
}

impl TnnClass {
    pub fn is_nonnegative(self) -> bool {
        self != TnnClass::Neither
    }
}

/// Summary of an exhaustive minor enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorCertificate {
    pub class: TnnClass,
    pub minors: usize,
    pub min_minor: Q,
    pub zero_minors: usize,
}

/// Classifies by every square minor of every size.
pub fn is_tnn_matrix(g: &GroupElement) -> Result<TnnClass> {
    match g {
        GroupElement::Exact(m) => Ok(minor_certificate(m).class),
        GroupElement::Float(_) => Err(Error::FloatInput),
    }
}

pub fn minor_certificate(m: &Matrix<Q>) -> MinorCertificate {
    let mut minors = 0;
    let mut zero_minors = 0;
    let mut negative = false;
    let mut min_minor: Option<Q> = None;
    for k in 1..=m.rows().min(m.cols()) {
        let rows = subsets(m.rows(), k);
        let cols = subsets(m.cols(), k);
        for r in &rows {
            for c in &cols {
                let d = m.minor(r, c);
                minors += 1;
                if d.is_zero() {
                    zero_minors += 1;
                } else if d.is_negative() {
                    negative = true;
                }
                if min_minor.as_ref().is_none_or(|cur| d < *cur) {
                    min_minor = Some(d);
                }
            }
        }
    }
    let class = if negative {
        TnnClass::Neither
    } else if zero_minors == 0 {
        TnnClass::TotallyPositive
    } else {
        TnnClass::TotallyNonnegative
    };
    MinorCertificate {
        class,
        minors,
        min_minor: min_minor.unwrap_or_else(Q::zero),
        zero_minors,
    }
}

/// A point of the partial flag variety `G / P_J^+`, stored as a canonical
/// representative. With `J = ∅` this is a complete flag.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagPoint<T> {
    j: BTreeSet<usize>,
    rep: Matrix<T>,
}

impl<T: Scalar> FlagPoint<T> {
    pub fn n(&self) -> usize {
        self.rep.rows()
    }

    pub fn j(&self) -> &BTreeSet<usize> {
        &self.j
    }

    pub fn rep(&self) -> &Matrix<T> {
        &self.rep
    }

    /// Dimensions `k ∉ J` of the subspaces the partial flag remembers.
    pub fn kept_dims(&self) -> Vec<usize> {
        kept_dims(self.n(), &self.j)
    }

    /// Spanning columns of the `k`-dimensional subspace.
    pub fn subspace(&self, k: usize) -> Vec<Vec<T>> {
        (0..k).map(|c| self.rep.column(c)).collect()
    }
}

impl FlagPoint<f64> {
    /// Orthogonal projector onto the `k`-dimensional subspace.
    pub fn projector(&self, k: usize) -> Matrix<f64> {
        let q = orthonormal_columns(&self.rep, k);
        &q * &q.transpose()
    }

    /// Largest projector discrepancy over the remembered subspaces.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n(), other.n());
        self.kept_dims()
            .into_iter()
            .chain(other.kept_dims())
            .map(|k| self.projector(k).max_abs_diff(&other.projector(k)))
            .fold(0.0, f64::max)
    }
}

/// Orthonormal basis (as columns) of the span of the first `k` columns.
pub fn orthonormal_columns(m: &Matrix<f64>, k: usize) -> Matrix<f64> {
    let a = m.to_nalgebra().columns(0, k).into_owned();
    let q = a.qr().q();
    Matrix::from_nalgebra(&q)
}

pub fn kept_dims(n: usize, j: &BTreeSet<usize>) -> Vec<usize> {
    (1..n).filter(|k| !j.contains(k)).collect()
}

pub fn check_j(n: usize, j: &BTreeSet<usize>) -> Result<()> {
    match j.iter().find(|&&i| i == 0 || i >= n) {
        Some(&bad) => Err(Error::IndexOutOfRange {
            index: bad,
            max: n - 1,
        }),
        None => Ok(()),
    }
}

/// Canonical representative of `g P_J^+`.
///
/// Columns are processed block by block, where the blocks are delimited by
/// the remembered dimensions `k ∉ J`. Each block is cleared at the pivot rows
/// of earlier blocks, then brought to reduced echelon form with pivots at the
/// last nonzero entry, normalized to 1.
pub fn flag_of<T: Scalar>(g: &Matrix<T>, j: &BTreeSet<usize>) -> Result<FlagPoint<T>> {
    let n = g.rows();
    if !g.is_square() {
        return Err(Error::Dimension("flag representative must be square".into()));
    }
    check_j(n, j)?;
    let mut bounds = kept_dims(n, j);
    bounds.push(n);
    let mut out = Matrix::zeros(n, n);
    let mut pivots: Vec<usize> = Vec::new();
    let mut done: Vec<Vec<T>> = Vec::new();
    let mut start = 0;
    for end in bounds {
        let mut block: Vec<Vec<T>> = (start..end).map(|c| g.column(c)).collect();
        for col in &mut block {
            for (p, prev) in pivots.iter().zip(&done) {
                let f = col[*p].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in col.iter_mut().zip(prev) {
                    *x = x.clone() - y.clone() * f.clone();
                }
            }
        }
        let reduced = bottom_pivot_echelon(block, &pivots)
            .ok_or_else(|| Error::Invalid("flag representative is singular".into()))?;
        for (p, col) in reduced {
            out.set_column(done.len(), &col);
            pivots.push(p);
            done.push(col);
        }
        start = end;
    }
    Ok(FlagPoint { j: j.clone(), rep: out })
}

/// Reduced echelon basis of the span of `cols`, using the last nonzero row of
/// each vector as its pivot. Rows in `forbidden` are already zero.
fn bottom_pivot_echelon<T: Scalar>(
    mut cols: Vec<Vec<T>>,
    forbidden: &[usize],
) -> Option<Vec<(usize, Vec<T>)>> {
    let n = cols.first().map_or(0, Vec::len);
    let scale = cols
        .iter()
        .flatten()
        .map(Scalar::magnitude)
        .fold(0.0, f64::max);
    let mut out: Vec<(usize, Vec<T>)> = Vec::new();
    let mut remaining: Vec<usize> = (0..cols.len()).collect();
    for row in (0..n).rev() {
        if remaining.is_empty() {
            break;
        }
        if forbidden.contains(&row) {
            continue;
        }
        let Some(pos) = pivot_choice(&cols, &remaining, row, scale) else {
            continue;
        };
        let c = remaining.remove(pos);
        let piv = cols[c][row].clone();
        let v: Vec<T> = cols[c].iter().map(|x| x.clone() / piv.clone()).collect();
        for &o in &remaining {
            let f = cols[o][row].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in cols[o].iter_mut().zip(&v) {
                *x = x.clone() - y.clone() * f.clone();
            }
        }
        for (_, prev) in &mut out {
            let f = prev[row].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in prev.iter_mut().zip(&v) {
                *x = x.clone() - y.clone() * f.clone();
            }
        }
        out.push((row, v));
    }
    if !remaining.is_empty() {
        return None;
    }
    for (row, v) in &mut out {
        // entries below the pivot are eliminated by construction
        for x in v.iter_mut().skip(*row + 1) {
            *x = T::zero();
        }
    }
    Some(out)
}

fn pivot_choice<T: Scalar>(
    cols: &[Vec<T>],
    remaining: &[usize],
    row: usize,
    scale: f64,
) -> Option<usize> {
    if T::EXACT {
        return remaining.iter().position(|&c| !cols[c][row].is_zero());
    }
    remaining
        .iter()
        .enumerate()
        .filter(|(_, &c)| !cols[c][row].negligible(scale))
        .max_by(|(_, &a), (_, &b)| cols[a][row].magnitude().total_cmp(&cols[b][row].magnitude()))
        .map(|(pos, _)| pos)
}

/// Coordinates `(v, w)` of an SL₃ complete flag: `V₁ = ⟨v⟩` and
/// `V₂ ⊥ (w₁, −w₂, w₃)`, both normalized to coordinate sum 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl3Coords<T> {
    pub v: [T; 3],
    pub w: [T; 3],
}

impl<T: Scalar> Sl3Coords<T> {
    pub fn new(v: [T; 3], w: [T; 3]) -> Self {
        Self { v, w }
    }

    /// Reads the flag spanned by the first two columns of a 3×3
    /// representative.
    pub fn from_matrix(g: &Matrix<T>) -> Result<Self> {
        if g.rows() != 3 || g.cols() != 3 {
            return Err(Error::Dimension("SL3 coordinates need a 3x3 matrix".into()));
        }
        let c1 = g.column(0);
        let c2 = g.column(1);
        let normal = [
            c1[1].clone() * c2[2].clone() - c1[2].clone() * c2[1].clone(),
            c1[2].clone() * c2[0].clone() - c1[0].clone() * c2[2].clone(),
            c1[0].clone() * c2[1].clone() - c1[1].clone() * c2[0].clone(),
        ];
        let w = [normal[0].clone(), -normal[1].clone(), normal[2].clone()];
        Ok(Self {
            v: normalize_sum(c1.try_into().expect("length 3"), "v")?,
            w: normalize_sum(w, "w")?,
        })
    }

    pub fn from_flag(flag: &FlagPoint<T>) -> Result<Self> {
        if flag.n() != 3 || !flag.j().is_empty() {
            return Err(Error::Dimension("SL3 coordinates need a complete flag in R^3".into()));
        }
        Self::from_matrix(flag.rep())
    }

    pub fn sums(&self) -> (T, T) {
        let s = |a: &[T; 3]| a[0].clone() + a[1].clone() + a[2].clone();
        (s(&self.v), s(&self.w))
    }

    /// `v₁w₁ − v₂w₂ + v₃w₃`
    pub fn incidence(&self) -> T {
        self.v[0].clone() * self.w[0].clone() - self.v[1].clone() * self.w[1].clone()
            + self.v[2].clone() * self.w[2].clone()
    }

    pub fn coords(&self) -> [T; 6] {
        let [a, b, c] = self.v.clone();
        let [d, e, f] = self.w.clone();
        [a, b, c, d, e, f]
    }

    pub fn to_f64(&self) -> Sl3Coords<f64> {
        Sl3Coords {
            v: self.v.clone().map(|x| x.to_f64()),
            w: self.w.clone().map(|x| x.to_f64()),
        }
    }
}

fn normalize_sum<T: Scalar>(a: [T; 3], name: &str) -> Result<[T; 3]> {
    let s = a[0].clone() + a[1].clone() + a[2].clone();
    let scale = a.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    if s.negligible(scale) {
        return Err(Error::Outside(format!(
            "coordinates of {name} sum to zero; not a nonnegative line"
        )));
    }
    Ok(a.map(|x| x / s.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    PositivePart,
    NonnegativeBoundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub class: Membership,
    pub diagnostic: Option<String>,
}

fn near_zero<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.magnitude() <= tol
    }
}

/// Membership in the totally nonnegative part of the SL₃ complete flag
/// variety. `tol` is ignored in exact mode.
pub fn sl3_membership<T: Scalar>(c: &Sl3Coords<T>, tol: f64) -> MembershipReport {
    let outside = |msg: String| MembershipReport {
        class: Membership::Outside,
        diagnostic: Some(msg),
    };
    let (sv, sw) = c.sums();
    if !near_zero(&(sv - T::one()), tol) || !near_zero(&(sw - T::one()), tol) {
        return outside("coordinate sums differ from 1".into());
    }
    let inc = c.incidence();
    if !near_zero(&inc, tol) {
        return outside(format!(
            "incidence v1w1 - v2w2 + v3w3 = {:e} != 0",
            inc.to_f64()
        ));
    }
    let coords = c.coords();
    let names = ["v1", "v2", "v3", "w1", "w2", "w3"];
    let mut any_zero = false;
    for (x, name) in coords.iter().zip(names) {
        if near_zero(x, tol) {
            any_zero = true;
        } else if !x.gt_zero() {
            return outside(format!("{name} = {:e} < 0", x.to_f64()));
        }
    }
    MembershipReport {
        class: if any_zero {
            Membership::NonnegativeBoundary
        } else {
            Membership::PositivePart
        },
        diagnostic: None,
    }
}

/// `exp(u)` with `u` uniform on `[−3, 3]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-3.0..=3.0f64).exp()
}

/// Log-uniform parameter rounded onto a dyadic grid, so exact products stay
/// small.
pub fn sample_param<R: Rng + ?Sized>(rng: &mut R) -> Q {
    let q = q_dyadic(log_uniform(rng), PARAM_BITS);
    if q.is_zero() {
        Q::one()
    } else {
        q
    }
}

/// Random parameters along `word`; each one is zeroed independently with
/// probability `zero_prob`.
pub fn random_params<R: Rng + ?Sized>(
    rng: &mut R,
    word: &ReducedWord,
    zero_prob: f64,
    with_torus: bool,
) -> FactorizationParams<Q> {
    let t = (0..word.len())
        .map(|_| {
            let x = sample_param(rng);
            if zero_prob > 0.0 && rng.random_bool(zero_prob) {
                Q::zero()
            } else {
                x
            }
        })
        .collect();
    let torus = with_torus.then(|| (1..word.n()).map(|_| sample_param(rng)).collect());
    FactorizationParams::new(word.clone(), t, torus).expect("sampled parameters are valid")
}

/// Letter choices for the closure sampler, one per position of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    /// identity (parameter 0)
    Skip,
    /// `y_i(t)` with `t > 0`
    Positive,
    /// `ṡ_i`
    Reflect,
    /// `ṡ_i⁻¹`
    ReflectInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [
        Letter::Skip,
        Letter::Positive,
        Letter::Reflect,
        Letter::ReflectInv,
    ];

    pub fn symbol(self) -> char {
        match self {
            Letter::Skip => '0',
            Letter::Positive => '+',
            Letter::Reflect => 's',
            Letter::ReflectInv => 'S',
        }
    }
}

/// Every letter pattern of the given length, in lexicographic order.
pub fn all_patterns(len: usize) -> Vec<Vec<Letter>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|p| {
                Letter::ALL.iter().map(move |&l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect()
    })
}

/// Factors of `ṡ`/`y`-words used to reach every cell of the nonnegative
/// flag variety, including those off the big cell of `U^-`.
pub fn closure_factors(word: &ReducedWord, pattern: &[Letter], t: &[Q]) -> Vec<Factor<Q>> {
    word.letters()
        .iter()
        .zip(pattern)
        .zip(t)
        .filter_map(|((&i, l), t)| match l {
            Letter::Skip => None,
            Letter::Positive => Some(Factor::Y(i, t.clone())),
            Letter::Reflect => Some(Factor::SDot(i)),
            Letter::ReflectInv => Some(Factor::SDotInv(i)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_pinning;
    use crate::scalar::{q, qi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    fn ones(n: usize) -> FactorizationParams<Q> {
        let w = standard_word_w0(n).unwrap();
        let len = w.len();
        FactorizationParams::new(w, vec![qi(1); len], Some(vec![qi(1); n - 1])).unwrap()
    }

    #[test]
    fn staircase_words() {
        assert_eq!(standard_word_w0(2).unwrap().letters(), &[1]);
        assert_eq!(standard_word_w0(3).unwrap().letters(), &[1, 2, 1]);
        assert_eq!(standard_word_w0(3).unwrap().permutation(), vec![2, 1, 0]);
        assert_eq!(standard_word_w0(4).unwrap().len(), 6);
        assert_eq!(standard_word_w0(5).unwrap().len(), 10);
        assert!(ReducedWord::new(3, vec![1, 1, 2]).is_err());
        assert!(ReducedWord::new(4, vec![1, 3, 2, 1, 3, 2]).is_ok());
    }

    #[test]
    fn lower_sample_by_hand() {
        let p = build_pinning(3).unwrap();
        let g = sample_positive(&p, &ones(3), Side::Lower).unwrap();
        assert_eq!(g, qm(&[&[1, 0, 0], &[2, 1, 0], &[1, 1, 1]]));
        let cert = minor_certificate(&g);
        assert_eq!(cert.class, TnnClass::TotallyNonnegative);
    }

    #[test]
    fn group_sample_is_totally_positive() {
        let p = build_pinning(3).unwrap();
        let g = sample_positive(&p, &ones(3), Side::Group).unwrap();
        let cert = minor_certificate(&g);
        assert_eq!(cert.minors, 9 + 9 + 1);
        assert_eq!(cert.class, TnnClass::TotallyPositive);
        assert!(g.det().is_one());
    }

    #[test]
    fn zero_parameters_give_identity() {
        let p = build_pinning(4).unwrap();
        let w = standard_word_w0(4).unwrap();
        let params = FactorizationParams::new(w, vec![qi(0); 6], None).unwrap();
        for side in [Side::Upper, Side::Lower, Side::Group] {
            let g = sample_positive(&p, &params, side).unwrap();
            assert_eq!(g, Matrix::identity(4));
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let w = standard_word_w0(3).unwrap();
        assert!(FactorizationParams::new(w.clone(), vec![qi(1); 2], None).is_err());
        assert!(FactorizationParams::new(w.clone(), vec![qi(1), qi(-1), qi(1)], None).is_err());
        assert!(FactorizationParams::new(w, vec![qi(1); 3], Some(vec![qi(1), qi(0)])).is_err());
    }

    #[test]
    fn identity_is_nonnegative_only() {
        let id = GroupElement::exact(Matrix::identity(3)).unwrap();
        assert_eq!(is_tnn_matrix(&id).unwrap(), TnnClass::TotallyNonnegative);
        let f = GroupElement::Float(Matrix::identity(3));
        assert!(matches!(is_tnn_matrix(&f), Err(Error::FloatInput)));
        let bad = GroupElement::exact(qm(&[&[1, -1], &[0, 1]])).unwrap();
        assert_eq!(is_tnn_matrix(&bad).unwrap(), TnnClass::Neither);
    }

    #[test]
    fn flag_canonical_forms() {
        let id: Matrix<Q> = Matrix::identity(3);
        let f = flag_of(&id, &BTreeSet::new()).unwrap();
        // pivots at the last nonzero entry: e1, e2, e3
        assert_eq!(f.rep(), &id);

        let g = qm(&[&[1, 0, 0], &[2, 1, 0], &[1, 1, 1]]);
        let c = Sl3Coords::from_flag(&flag_of(&g, &BTreeSet::new()).unwrap()).unwrap();
        assert_eq!(c.v, [q(1, 4), q(1, 2), q(1, 4)]);
        assert_eq!(c.w, [q(1, 3), q(1, 3), q(1, 3)]);

        let p = build_pinning(3).unwrap();
        let y1 = p.one_param(crate::chevalley::OneParam::Y, 1, qi(1)).unwrap();
        let c = Sl3Coords::from_matrix(&y1).unwrap();
        assert_eq!(c.v, [q(1, 2), q(1, 2), qi(0)]);
        assert_eq!(c.w, [qi(0), qi(0), qi(1)]);
    }

    #[test]
    fn partial_flag_forgets_columns() {
        let g = qm(&[&[1, 0, 0], &[2, 1, 0], &[1, 1, 1]]);
        let j: BTreeSet<usize> = [2].into();
        let f = flag_of(&g, &j).unwrap();
        let h = &g * &qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 5, 1]]);
        assert_eq!(flag_of(&h, &j).unwrap(), f);
        assert_ne!(flag_of(&h, &BTreeSet::new()).unwrap(), flag_of(&g, &BTreeSet::new()).unwrap());
        let full = flag_of(&g, &BTreeSet::new()).unwrap();
        assert_eq!(flag_of(full.rep(), &j).unwrap(), f);
        assert!(flag_of(&g, &[3].into()).is_err());
    }

    #[test]
    fn membership_examples() {
        let c = Sl3Coords::new([q(1, 4), q(1, 2), q(1, 4)], [q(1, 3), q(1, 3), q(1, 3)]);
        assert_eq!(sl3_membership(&c, 0.0).class, Membership::PositivePart);
        let c = Sl3Coords::new([q(1, 2), q(1, 2), qi(0)], [qi(0), qi(0), qi(1)]);
        assert_eq!(sl3_membership(&c, 0.0).class, Membership::NonnegativeBoundary);
        let c = Sl3Coords::new([qi(1), qi(0), qi(0)], [qi(1), qi(0), qi(0)]);
        let r = sl3_membership(&c, 0.0);
        assert_eq!(r.class, Membership::Outside);
        assert!(r.diagnostic.unwrap().contains("incidence"));
        let c = Sl3Coords::new([1.0, 1e-13, 0.0], [0.0, 0.0, 1.0]);
        assert_eq!(sl3_membership(&c, 1e-10).class, Membership::NonnegativeBoundary);
    }

    #[test]
    fn patterns_enumerate() {
        let p = all_patterns(3);
        assert_eq!(p.len(), 64);
        assert_eq!(p[0], vec![Letter::Skip; 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = sample_param(&mut rng);
        assert!(t.gt_zero());
    }
}
