//! The φ-functions `φ_0 = exp`, `φ_{j+1}(z) = (φ_j(z) - 1/j!)/z` and their
//! action on vectors through a cached spectral factorization of the
//! symmetrized interior operator.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricEigen};
use crate::scalar::{factorial, Scalar};
use crate::space::{SpaceDiscretization, SpaceKind};

/// Below this magnitude of `-z` (or below `2j + 2`) the positive-term
/// Kummer series is used; above it the upward recursion is stable.
const KUMMER_CROSSOVER: f64 = 50.0;
const SERIES_MAX_TERMS: usize = 2000;

/// `φ_j(z)` for real `z <= 0`.
///
/// Near the origin the upward recursion cancels catastrophically, so for
/// moderate `|z|` the function is evaluated from Kummer's transformation
/// `φ_j(z) = e^z / j! · Σ_m j/(j+m) · (-z)^m / m!`, whose terms are all
/// positive. For large `|z|` the recursion loses nothing and is used instead.
pub fn phi_scalar<T: Scalar>(j: usize, z: T) -> Result<T> {
    if z > T::zero() || z.is_nan() {
        return Err(Error::InvalidArgument(format!("phi functions are only supported for z <= 0, got {z}")));
    }
    Ok(phi_nonpositive(j, z))
}

fn phi_nonpositive<T: Scalar>(j: usize, z: T) -> T {
    if j == 0 {
        return z.exp();
    }
    let x = -z;
    if x == T::zero() {
        return T::one() / factorial::<T>(j);
    }
    let crossover = T::lit(KUMMER_CROSSOVER).max(T::from_count(2 * j + 2));
    if x < crossover {
        kummer_series(j, x)
    } else {
        let mut phi = z.exp();
        let mut inv_fact = T::one();
        for k in 0..j {
            phi = (phi - inv_fact) / z;
            inv_fact = inv_fact / T::from_count(k + 1);
        }
        phi
    }
}

fn kummer_series<T: Scalar>(j: usize, x: T) -> T {
    let jj = T::from_count(j);
    let mut term = T::one(); // x^m / m!
    let mut sum = T::one();
    for m in 1..SERIES_MAX_TERMS {
        term = term * x / T::from_count(m);
        let contrib = term * jj / (jj + T::from_count(m));
        sum = sum + contrib;
        if m as f64 > x.to_f64_lossy() && contrib <= sum * T::epsilon() * T::lit(0.25) {
            break;
        }
    }
    (-x).exp() * sum / factorial::<T>(j)
}

/// Spectral factorization `A = D⁻¹ V diag(λ) Vᵀ D` of a symmetrizable interior
/// operator, used to apply `e^{kA}` and `φ_j(kA)`.
#[derive(Debug)]
pub struct PhiEvaluator<'a, T> {
    disc: &'a SpaceDiscretization<T>,
    values: Vec<T>,
    /// Row `m` is the orthonormal eigenvector belonging to `values[m]`.
    basis: Matrix<T>,
}

impl<'a, T: Scalar> PhiEvaluator<'a, T> {
    pub fn new(disc: &'a SpaceDiscretization<T>) -> Result<Self> {
        let (mut values, basis) = match disc.kind() {
            SpaceKind::FiniteDifference => fd_modes(disc),
            SpaceKind::Lgl => {
                let eig = SymmetricEigen::new(disc.symmetric())?;
                (eig.values, eig.vectors)
            }
        };
        let scale = values.iter().fold(T::zero(), |m, l| m.max(l.abs()));
        let drift = T::lit(1e-10) * scale;
        for l in values.iter_mut() {
            if *l > drift {
                return Err(Error::NotDissipative(l.to_f64_lossy()));
            }
            if *l > T::zero() {
                *l = T::zero();
            }
        }
        Ok(Self { disc, values, basis })
    }

    pub fn discretization(&self) -> &'a SpaceDiscretization<T> {
        self.disc
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues of the interior operator, ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    fn check_dim(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// Modal coordinates `Vᵀ D v`.
    pub fn to_modal(&self, v: &[T]) -> Result<Vec<T>> {
        self.check_dim(v)?;
        let d = self.disc.symmetrizer();
        let scaled: Vec<T> = v.iter().zip(d).map(|(&x, &di)| x * di).collect();
        Ok(self.basis.matvec(&scaled))
    }

    /// Inverse of [`to_modal`](Self::to_modal): `D⁻¹ V w`.
    pub fn from_modal(&self, w: &[T]) -> Result<Vec<T>> {
        self.check_dim(w)?;
        let mut out = self.basis.transpose_matvec(w);
        for (o, &di) in out.iter_mut().zip(self.disc.symmetrizer()) {
            *o = *o / di;
        }
        Ok(out)
    }

    /// `φ_j(kA) v`.
    pub fn phi_apply(&self, j: usize, k: T, v: &[T]) -> Result<Vec<T>> {
        if k.is_nan() || k <= T::zero() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {k}")));
        }
        let mut w = self.to_modal(v)?;
        for (wm, &l) in w.iter_mut().zip(&self.values) {
            *wm = *wm * phi_nonpositive(j, k * l);
        }
        self.from_modal(&w)
    }

    /// `φ_j(k λ_m)` for `j = 0..=max_order` and every eigenvalue.
    pub fn table(&self, k: T, max_order: usize) -> Result<PhiTable<T>> {
        if k.is_nan() || k <= T::zero() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {k}")));
        }
        let rows = (0..=max_order)
            .map(|j| self.values.iter().map(|&l| phi_nonpositive(j, k * l)).collect())
            .collect();
        Ok(PhiTable { step: k, rows })
    }
}

/// Diagonal of `φ_j(kΛ)` for a fixed step size, one row per order.
#[derive(Clone, Debug)]
pub struct PhiTable<T> {
    step: T,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> PhiTable<T> {
    pub fn step(&self) -> T {
        self.step
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn order(&self, j: usize) -> &[T] {
        &self.rows[j]
    }
}

/// Closed-form eigenpairs of the finite-difference Dirichlet Laplacian:
/// `λ_m = -4/h² sin²(mπh/2)`, `v_m(i) = √(2h) sin(imπh)`.
fn fd_modes<T: Scalar>(disc: &SpaceDiscretization<T>) -> (Vec<T>, Matrix<T>) {
    let n = disc.dim();
    let h = T::one() / T::from_count(n + 1);
    let two = T::one() + T::one();
    let norm = (two * h).sqrt();
    let values: Vec<T> = (0..n)
        .rev()
        .map(|m| {
            let s = (T::from_count(m + 1) * T::PI() * h / two).sin();
            -T::lit(4.0) * s * s / (h * h)
        })
        .collect();
    let basis = Matrix::from_fn(n, n, |row, i| {
        let m = n - row;
        norm * (T::from_count((i + 1) * m) * T::PI() * h).sin()
    });
    (values, basis)
}
