//! Pinning of SL(n): Chevalley generators, one-parameter subgroups, the
//! principal element `τ = Σ (e_i + f_i)` and its exponentials.

use nalgebra::SymmetricEigen;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{qi, Scalar, Q};

/// Chevalley data of SL(n) with index set `I = {1, …, n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pinning {
    n: usize,
    e: Vec<Matrix<Q>>,
    f: Vec<Matrix<Q>>,
    h: Vec<Matrix<Q>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OneParam {
    /// `x_i(t) = exp(t e_i)`
    X,
    /// `y_i(t) = exp(t f_i)`
    Y,
    /// `α_i^∨(t)`
    Coweight,
}

/// One letter of a factored group element.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor<T> {
    X(usize, T),
    Y(usize, T),
    Coweight(usize, T),
    /// `ṡ_i = x_i(−1) y_i(1) x_i(−1)`, a lift of the simple reflection.
    SDot(usize),
    /// Inverse of [`Factor::SDot`].
    SDotInv(usize),
}

pub fn build_pinning(n: usize) -> Result<Pinning> {
    Pinning::new(n)
}

impl Pinning {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::RankTooSmall(n));
        }
        let unit = |r: usize, c: usize| {
            Matrix::from_fn(n, n, |i, j| if (i, j) == (r, c) { qi(1) } else { qi(0) })
        };
        let e: Vec<_> = (0..n - 1).map(|i| unit(i, i + 1)).collect();
        let f: Vec<_> = (0..n - 1).map(|i| unit(i + 1, i)).collect();
        let h = e.iter().zip(&f).map(|(e, f)| e.commutator(f)).collect();
        Ok(Self { n, e, f, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of simple roots, `|I| = n − 1`.
    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n - 1,
            });
        }
        Ok(())
    }

    /// `e_i`, 1-based.
    pub fn e(&self, i: usize) -> &Matrix<Q> {
        &self.e[i - 1]
    }

    pub fn f(&self, i: usize) -> &Matrix<Q> {
        &self.f[i - 1]
    }

    pub fn h(&self, i: usize) -> &Matrix<Q> {
        &self.h[i - 1]
    }

    pub fn tau(&self) -> Matrix<Q> {
        let mut t = Matrix::zeros(self.n, self.n);
        for (e, f) in self.e.iter().zip(&self.f) {
            t = &(&t + e) + f;
        }
        t
    }

    pub fn one_param<T: Scalar>(&self, kind: OneParam, i: usize, t: T) -> Result<Matrix<T>> {
        self.check_index(i)?;
        let n = self.n;
        let k = i - 1;
        let mut m = Matrix::identity(n);
        match kind {
            OneParam::X => m[(k, k + 1)] = t,
            OneParam::Y => m[(k + 1, k)] = t,
            OneParam::Coweight => {
                if t.is_zero() {
                    return Err(Error::ZeroCoweight);
                }
                m[(k + 1, k + 1)] = T::one() / t.clone();
                m[(k, k)] = t;
            }
        }
        Ok(m)
    }

    pub fn sdot<T: Scalar>(&self, i: usize) -> Result<Matrix<T>> {
        let x = self.one_param(OneParam::X, i, -T::one())?;
        let y = self.one_param(OneParam::Y, i, T::one())?;
        Ok(&(&x * &y) * &x)
    }

    pub fn factor_matrix<T: Scalar>(&self, factor: &Factor<T>) -> Result<Matrix<T>> {
        match factor {
            Factor::X(i, t) => self.one_param(OneParam::X, *i, t.clone()),
            Factor::Y(i, t) => self.one_param(OneParam::Y, *i, t.clone()),
            Factor::Coweight(i, t) => self.one_param(OneParam::Coweight, *i, t.clone()),
            Factor::SDot(i) => self.sdot(*i),
            Factor::SDotInv(i) => Ok(self.sdot::<T>(*i)?.inverse().expect("ṡ_i is invertible")),
        }
    }

    /// Ordered product of the factors, left to right.
    pub fn product<T: Scalar>(&self, factors: &[Factor<T>]) -> Result<Matrix<T>> {
        factors.iter().try_fold(Matrix::identity(self.n), |acc, f| {
            Ok(&acc * &self.factor_matrix(f)?)
        })
    }

    /// Eigenvalues (descending) and orthonormal eigenvectors (columns) of τ
    /// in the defining representation.
    pub fn tau_eigen(&self) -> (Vec<f64>, Matrix<f64>) {
        let eig = SymmetricEigen::new(self.tau().to_f64().to_nalgebra());
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Matrix::from_fn(self.n, self.n, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    /// `exp(tτ)` through the spectral decomposition of the symmetric τ.
    pub fn exp_tau(&self, t: f64) -> Matrix<f64> {
        let (mu, v) = self.tau_eigen();
        let scaled = Matrix::from_fn(self.n, self.n, |i, j| v[(i, j)] * (t * mu[j]).exp());
        &scaled * &v.transpose()
    }
}

/// An element of SL(n), exact or binary64.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Exact(Matrix<Q>),
    Float(Matrix<f64>),
}

/// Relative determinant tolerance for float group elements, measured against
/// the Hadamard bound.
pub const FLOAT_DET_TOL: f64 = 1e-12;

impl GroupElement {
    pub fn exact(m: Matrix<Q>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("group element must be square".into()));
        }
        if !m.det().is_one() {
            return Err(Error::Invalid(format!("determinant {} != 1", m.det())));
        }
        Ok(Self::Exact(m))
    }

    pub fn float(m: Matrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("group element must be square".into()));
        }
        let hadamard: f64 = (0..m.cols())
            .map(|j| crate::matrix::norm(&m.column(j)))
            .product();
        let d = m.det();
        if (d - 1.0).abs() > FLOAT_DET_TOL * hadamard.max(1.0) {
            return Err(Error::Invalid(format!("determinant {d} != 1")));
        }
        Ok(Self::Float(m))
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Exact(m) => m.rows(),
            Self::Float(m) => m.rows(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            Self::Exact(m) => m.to_f64(),
            Self::Float(m) => m.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::is_identity;
    use crate::scalar::q;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    #[test]
    fn sl3_generators_match_worked_example() {
        let p = build_pinning(3).unwrap();
        assert_eq!(*p.e(1), qm(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(*p.f(1), qm(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]));
        assert_eq!(*p.e(2), qm(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]));
        assert_eq!(*p.f(2), qm(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]]));
        assert_eq!(p.tau(), qm(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]]));
        let t = q(5, 3);
        assert_eq!(
            p.one_param(OneParam::X, 1, t.clone()).unwrap(),
            Matrix::from_rows(vec![
                vec![qi(1), t.clone(), qi(0)],
                vec![qi(0), qi(1), qi(0)],
                vec![qi(0), qi(0), qi(1)],
            ])
        );
        let a2 = p.one_param(OneParam::Coweight, 2, t.clone()).unwrap();
        assert!(a2.is_diagonal());
        assert_eq!(a2[(0, 0)], qi(1));
        assert_eq!(a2[(1, 1)], t);
        assert_eq!(a2[(2, 2)], q(3, 5));
    }

    #[test]
    fn sl2_is_smallest_case() {
        let p = build_pinning(2).unwrap();
        assert_eq!(*p.e(1), qm(&[&[0, 1], &[0, 0]]));
        assert_eq!(*p.h(1), qm(&[&[1, 0], &[0, -1]]));
        assert!(matches!(build_pinning(1), Err(Error::RankTooSmall(1))));
    }

    #[test]
    fn bracket_relations() {
        for n in 2..=5 {
            let p = build_pinning(n).unwrap();
            for i in 1..n {
                assert_eq!(p.e(i).commutator(p.f(i)), *p.h(i));
                assert!(p.h(i).is_diagonal());
                for j in 1..n {
                    if i != j {
                        assert!(p.e(i).commutator(p.f(j)).is_zero());
                    }
                }
            }
            let tau = p.tau();
            assert!(tau.is_symmetric());
        }
    }

    #[test]
    fn one_parameter_errors() {
        let p = build_pinning(3).unwrap();
        assert!(matches!(
            p.one_param(OneParam::X, 3, qi(1)),
            Err(Error::IndexOutOfRange { index: 3, max: 2 })
        ));
        assert!(p.one_param(OneParam::Y, 0, qi(1)).is_err());
        assert!(matches!(
            p.one_param(OneParam::Coweight, 1, qi(0)),
            Err(Error::ZeroCoweight)
        ));
        assert!(is_identity(&p.one_param(OneParam::X, 2, qi(0)).unwrap()));
    }

    #[test]
    fn one_parameter_subgroups_are_homomorphisms() {
        let p = build_pinning(4).unwrap();
        for i in 1..4 {
            for kind in [OneParam::X, OneParam::Y] {
                let a = p.one_param(kind, i, q(2, 7)).unwrap();
                let b = p.one_param(kind, i, q(-5, 3)).unwrap();
                let ab = p.one_param(kind, i, q(2, 7) + q(-5, 3)).unwrap();
                assert_eq!(&a * &b, ab);
                assert!(a.det().is_one());
            }
            assert!(p.one_param(OneParam::Coweight, i, q(9, 4)).unwrap().det().is_one());
        }
    }

    #[test]
    fn sdot_squares_to_minus_one_on_block() {
        let p = build_pinning(3).unwrap();
        let s: Matrix<Q> = p.sdot(1).unwrap();
        assert_eq!(s, qm(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]));
        let inv = p.factor_matrix(&Factor::SDotInv(1)).unwrap();
        assert!(is_identity(&(&s * &inv)));
    }

    #[test]
    fn exp_tau_basic_properties() {
        let p = build_pinning(3).unwrap();
        assert!(p.exp_tau(0.0).max_abs_diff(&Matrix::identity(3)) < 1e-15);
        let e1 = p.exp_tau(1.0);
        assert!((0..3).all(|i| (0..3).all(|j| e1[(i, j)] > 0.0)));
        assert!(e1.max_abs_diff(&e1.transpose()) < 1e-15);
        let prod = &p.exp_tau(0.7) * &p.exp_tau(-1.9);
        assert!(prod.max_abs_diff(&p.exp_tau(-1.2)) < 1e-12);
        assert!(GroupElement::float(p.exp_tau(5.0)).is_ok());
        assert!(GroupElement::exact(qm(&[&[2, 0], &[0, 1]])).is_err());
    }
}
