use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `x = b + A x` for a nonnegative matrix `A` with an LU factorization
/// (partial pivoting) of `I - A`.
///
/// For `A >= 0`, `ρ(A) < 1` exactly when `(I - A)⁻¹` exists and is entrywise
/// nonnegative, so the inverse doubles as the convergence test for the
/// underlying geometric series.
pub(crate) fn solve_fixed_point(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let lhs = DMatrix::<f64>::identity(n, n) - a;
    let lu = lhs.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("I - A is not invertible ({n} states)")))?;
    let scale = inv.amax().max(1.0);
    if inv.iter().any(|&x| x < -1e-9 * scale) || !inv.iter().all(|x| x.is_finite()) {
        return Err(Error::Divergent);
    }
    let rhs = DVector::from_column_slice(b);
    let mut x = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("LU solve failed".into()))?;
    // One step of iterative refinement.
    let resid = &rhs - (DMatrix::<f64>::identity(n, n) - a) * &x;
    if let Some(dx) = (DMatrix::<f64>::identity(n, n) - a).lu().solve(&resid) {
        x += dx;
    }
    Ok(x.iter().copied().collect())
}

/// `max_s |x(s) - (b(s) + (A x)(s))|`.
pub(crate) fn fixed_point_residual(a: &DMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    let xv = DVector::from_column_slice(x);
    let ax = a * &xv;
    (0..b.len())
        .map(|i| (x[i] - b[i] - ax[i]).abs())
        .fold(0.0, f64::max)
}
