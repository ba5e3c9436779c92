use nalgebra::Matrix2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, VemError};
use crate::mesh::Vertex2;

type TensorFn = dyn Fn(Vertex2) -> Matrix2<f64> + Send + Sync;

/// Symmetric positive definite diffusion coefficient.
#[derive(Clone)]
pub enum DiffusionTensor {
    Constant(Matrix2<f64>),
    Variable(Arc<TensorFn>),
}

impl DiffusionTensor {
    pub fn constant(k11: f64, k12: f64, k22: f64) -> Result<Self> {
        let m = Matrix2::new(k11, k12, k12, k22);
        check_spd(&m)?;
        Ok(Self::Constant(m))
    }

    pub fn diagonal(k11: f64, k22: f64) -> Result<Self> {
        Self::constant(k11, 0.0, k22)
    }

    pub fn identity() -> Self {
        Self::Constant(Matrix2::identity())
    }

    /// Position-dependent tensor; symmetry and definiteness are checked where it is evaluated.
    pub fn variable(f: impl Fn(Vertex2) -> Matrix2<f64> + Send + Sync + 'static) -> Self {
        Self::Variable(Arc::new(f))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    pub fn eval(&self, p: Vertex2) -> Matrix2<f64> {
        match self {
            Self::Constant(m) => *m,
            Self::Variable(f) => f(p),
        }
    }

    /// Checked evaluation: errors if `K(p)` is not symmetric positive definite.
    pub fn eval_checked(&self, p: Vertex2) -> Result<Matrix2<f64>> {
        let m = self.eval(p);
        check_spd(&m)?;
        Ok(m)
    }

    /// Scale the tensor by `t > 0`.
    pub fn scaled(&self, t: f64) -> Self {
        match self {
            Self::Constant(m) => Self::Constant(m * t),
            Self::Variable(f) => {
                let f = Arc::clone(f);
                Self::Variable(Arc::new(move |p| f(p) * t))
            }
        }
    }
}

impl fmt::Debug for DiffusionTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(m) => write!(f, "Constant([[{}, {}], [{}, {}]])", m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
            Self::Variable(_) => f.write_str("Variable(..)"),
        }
    }
}

/// Largest eigenvalue of a symmetric 2x2 matrix, i.e. its spectral norm when SPD.
pub fn spectral_norm(m: &Matrix2<f64>) -> f64 {
    let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean + rad).abs().max((mean - rad).abs())
}

fn check_spd(m: &Matrix2<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(VemError::InvalidInput("diffusion tensor has non-finite entries".into()));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-14 * scale {
        return Err(VemError::InvalidInput("diffusion tensor is not symmetric".into()));
    }
    if m[(0, 0)] <= 0.0 || m.determinant() <= 0.0 {
        return Err(VemError::InvalidInput("diffusion tensor is not positive definite".into()));
    }
    Ok(())
}
