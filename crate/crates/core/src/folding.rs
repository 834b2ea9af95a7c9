//! The diagram involution `i ↦ n − i` of type `A_{n−1}`, its realization on
//! `SL(n)` by `g ↦ S (gᵀ)⁻¹ S⁻¹`, and checks that fixed nonnegative flags
//! stay fixed under the flow.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::chevalley::{Factor, OneParam, Pinning};
use crate::error::{Error, Result};
use crate::flow::{flow_flag_matrix, ser_decimal};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Q};
use crate::totpos::{check_j, flag_of, sample_param, ReducedWord};

/// Agreement of projectors in the float fixedness check.
pub const FOLD_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Folding {
    n: usize,
    pinning: Pinning,
    s: Matrix<Q>,
}

/// Builds `σ` for `SL(n)` and verifies that it permutes the pinning:
/// `σ(x_i(t)) = x_{n−i}(t)` and `σ(y_i(t)) = y_{n−i}(t)`.
pub fn build_folding(n: usize) -> Result<Folding> {
    let pinning = Pinning::new(n)?;
    let mut folding = Folding {
        n,
        pinning,
        s: Matrix::identity(n),
    };
    folding.s = folding.s_as();
    let one = Q::from_integer(1.into());
    for i in 1..n {
        for kind in [OneParam::X, OneParam::Y] {
            let g = folding.pinning.one_param(kind, i, one.clone())?;
            let want = folding.pinning.one_param(kind, folding.sigma(i), one.clone())?;
            if folding.apply(&g)? != want {
                return Err(Error::FoldingSign(i));
            }
        }
    }
    Ok(folding)
}

impl Folding {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pinning(&self) -> &Pinning {
        &self.pinning
    }

    /// The signed antidiagonal matrix `S`.
    pub fn s(&self) -> &Matrix<Q> {
        &self.s
    }

    pub fn sigma(&self, i: usize) -> usize {
        self.n - i
    }

    /// Orbits of `σ` on `{1, …, n−1}`, smallest element first.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        (1..self.n)
            .filter(|&i| i <= self.sigma(i))
            .map(|i| {
                if i == self.sigma(i) {
                    vec![i]
                } else {
                    vec![i, self.sigma(i)]
                }
            })
            .collect()
    }

    /// `S (gᵀ)⁻¹ S⁻¹`.
    pub fn apply<T: Scalar>(&self, g: &Matrix<T>) -> Result<Matrix<T>> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(Error::Dimension(format!("expected a {0}x{0} matrix", self.n)));
        }
        let inv = g
            .transpose()
            .inverse()
            .ok_or_else(|| Error::Invalid("singular matrix".into()))?;
        let s = self.s_as::<T>();
        Ok(&(&s * &inv) * &s.transpose())
    }

    fn s_as<T: Scalar>(&self) -> Matrix<T> {
        let n = self.n;
        Matrix::from_fn(n, n, |i, j| {
            T::from_i64(if i + j != n - 1 { 0 } else if i % 2 == 0 { 1 } else { -1 })
        })
    }

    /// The induced map on the Lie algebra, `X ↦ −S Xᵀ S⁻¹`.
    pub fn apply_lie(&self, x: &Matrix<Q>) -> Matrix<Q> {
        let m = &(&self.s * &x.transpose()) * &self.s.transpose();
        m.map(|v| -v.clone())
    }

    pub fn is_stable(&self, j: &BTreeSet<usize>) -> bool {
        j.iter().all(|&i| j.contains(&self.sigma(i)))
    }

    fn require_stable(&self, j: &BTreeSet<usize>) -> Result<()> {
        check_j(self.n, j)?;
        if !self.is_stable(j) {
            let bad = j.iter().copied().filter(|&i| !j.contains(&self.sigma(i))).collect();
            return Err(Error::NotSigmaStable(bad));
        }
        Ok(())
    }

    /// Admissible when no orbit contains two adjacent nodes, which for this
    /// involution means `n` even (or `n = 2`).
    pub fn is_admissible(&self) -> bool {
        self.orbits().iter().all(|o| o.len() == 1 || o[1] - o[0] >= 2)
    }

    /// A reduced word for the longest element made of whole orbits: the
    /// orbit sweep repeated `⌈(n−1)/2⌉`… times until it has full length.
    pub fn compatible_word(&self) -> Result<ReducedWord> {
        if !self.is_admissible() {
            return Err(Error::Invalid(format!(
                "sigma on A_{} has an orbit of adjacent nodes",
                self.n - 1
            )));
        }
        let sweep: Vec<usize> = self.orbits().concat();
        let len = self.n * (self.n - 1) / 2;
        let letters: Vec<usize> = sweep.iter().copied().cycle().take(len).collect();
        ReducedWord::new(self.n, letters)
    }

    /// Lower factorization along [`Folding::compatible_word`]; with
    /// `symmetric` the letters of each orbit share one parameter.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, symmetric: bool, zero_prob: f64) -> Result<Matrix<Q>> {
        let word = self.compatible_word()?;
        let orbit_of = |i: usize| i.min(self.sigma(i));
        let mut factors = Vec::with_capacity(word.len());
        let mut shared: Option<(usize, Q)> = None;
        for &i in word.letters() {
            let t = match (&shared, symmetric) {
                (Some((o, t)), true) if *o == orbit_of(i) && i != *o => t.clone(),
                _ => {
                    let t = if zero_prob > 0.0 && rng.random_bool(zero_prob) {
                        Q::from_integer(0.into())
                    } else {
                        sample_param(rng)
                    };
                    shared = Some((orbit_of(i), t.clone()));
                    t
                }
            };
            factors.push(Factor::Y(i, t));
        }
        self.pinning.product(&factors)
    }

    /// Exact comparison of canonical forms of `g` and `σ(g)`.
    pub fn fixes_flag(&self, g: &Matrix<Q>, j: &BTreeSet<usize>) -> Result<bool> {
        self.require_stable(j)?;
        Ok(flag_of(g, j)?.rep() == flag_of(&self.apply(g)?, j)?.rep())
    }

    /// Largest projector difference between `F` and `σF` over the kept
    /// dimensions, using `V_k(σF) = S · V_{n−k}(F)^⊥`.
    pub fn flag_defect(&self, g: &Matrix<f64>, j: &BTreeSet<usize>) -> Result<f64> {
        self.require_stable(j)?;
        let flag = flag_of(g, j)?;
        let s = self.s_as::<f64>();
        let id = Matrix::<f64>::identity(self.n);
        let mut worst: f64 = 0.0;
        for k in flag.kept_dims() {
            let complement = &id - &flag.projector(self.n - k);
            let mirrored = &(&s * &complement) * &s.transpose();
            worst = worst.max(mirrored.max_abs_diff(&flag.projector(k)));
        }
        Ok(worst)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowFixedness {
    #[serde(serialize_with = "ser_decimal")]
    pub t: f64,
    pub fixed: usize,
    #[serde(serialize_with = "ser_decimal")]
    pub worst_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldingReport {
    pub n: usize,
    pub j: Vec<usize>,
    pub symmetric: bool,
    pub samples: usize,
    /// samples whose canonical form is exactly σ-fixed
    pub exactly_fixed: usize,
    pub flowed: Vec<FlowFixedness>,
    /// how σ is realized on the group
    pub realization: String,
}

impl FoldingReport {
    pub fn all_fixed(&self) -> bool {
        self.exactly_fixed == self.samples && self.flowed.iter().all(|f| f.fixed == self.samples)
    }
}

/// Samples nonnegative flags along an orbit-compatible word and checks
/// exact σ-fixedness of each, then fixedness of `exp(tτ)` applied to it.
pub fn fixed_locus_flow_check<R: Rng + ?Sized>(
    folding: &Folding,
    j: &BTreeSet<usize>,
    symmetric: bool,
    times: &[f64],
    count: usize,
    rng: &mut R,
) -> Result<FoldingReport> {
    folding.require_stable(j)?;
    let samples: Vec<Matrix<Q>> = (0..count)
        .map(|_| folding.sample(rng, symmetric, 0.2))
        .collect::<Result<_>>()?;
    let mut exactly_fixed = 0;
    for g in &samples {
        if folding.fixes_flag(g, j)? {
            exactly_fixed += 1;
        }
    }
    let mut flowed = Vec::new();
    for &t in times {
        let mut fixed = 0;
        let mut worst: f64 = 0.0;
        for g in &samples {
            let moved = flow_flag_matrix(&folding.pinning, &g.to_f64(), t);
            let d = folding.flag_defect(&moved, j)?;
            worst = worst.max(d);
            if d <= FOLD_TOL {
                fixed += 1;
            }
        }
        flowed.push(FlowFixedness {
            t,
            fixed,
            worst_defect: worst,
        });
    }
    Ok(FoldingReport {
        n: folding.n,
        j: j.iter().copied().collect(),
        symmetric,
        samples: count,
        exactly_fixed,
        flowed,
        realization: "g -> S (g^T)^-1 S^-1, S antidiagonal with signs +1, -1, +1, ...".into(),
    })
}
