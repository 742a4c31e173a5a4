use nalgebra::DMatrix;

use crate::error::{GapError, Result};
use crate::linalg::{self, Tridiagonal};
use crate::operator::DecomposedOperator;

enum Reduced {
    /// `apm = 0`: `S(lambda) = app`, spectrum precomputed.
    Decoupled { mu: Vec<f64> },
    /// `amm = U diag(alpha) U^T`, `b = apm U`, `bt = b^T`.
    Coupled {
        alpha: Vec<f64>,
        b: DMatrix<f64>,
        bt: DMatrix<f64>,
    },
}

/// Evaluates `S(lambda) = app - apm (amm - lambda)^{-1} apm^T` and
/// `f_k(lambda) = mu_k(S(lambda)) - lambda` for many `lambda`, after a single
/// eigendecomposition of `amm`.
pub struct SchurEvaluator<'a> {
    op: &'a DecomposedOperator,
    a_minus: f64,
    reduced: Reduced,
}

impl<'a> SchurEvaluator<'a> {
    pub fn new(op: &'a DecomposedOperator) -> Result<Self> {
        let (a_minus, reduced) = if op.is_block_diagonal() {
            let a_minus = linalg::symmetric_eigenvalue(op.amm(), op.n_minus() - 1);
            let mu = linalg::symmetric_eigenvalues(op.app())?;
            (a_minus, Reduced::Decoupled { mu })
        } else {
            let (alpha, u) = linalg::symmetric_eigen(op.amm())?;
            let b = op.apm() * u;
            let bt = b.transpose();
            (alpha[alpha.len() - 1], Reduced::Coupled { alpha, b, bt })
        };
        if !a_minus.is_finite() {
            return Err(GapError::Eigen("largest eigenvalue of amm is not finite".into()));
        }
        Ok(Self { op, a_minus, reduced })
    }

    pub fn operator(&self) -> &DecomposedOperator {
        self.op
    }

    /// Largest eigenvalue of `amm`; `S` is defined strictly above it.
    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        if !lambda.is_finite() || lambda <= self.a_minus {
            return Err(GapError::Precondition(format!(
                "lambda={lambda} must exceed a_minus={} for the Schur complement",
                self.a_minus
            )));
        }
        Ok(())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        let max = self.op.n_plus();
        if k == 0 || k > max {
            return Err(GapError::IndexOutOfRange { k, max });
        }
        Ok(())
    }

    pub fn matrix(&self, lambda: f64) -> Result<DMatrix<f64>> {
        self.check_lambda(lambda)?;
        Ok(match &self.reduced {
            Reduced::Decoupled { .. } => self.op.app().clone(),
            Reduced::Coupled { alpha, b, bt } => {
                let mut bd = b.clone();
                for (j, mut col) in bd.column_iter_mut().enumerate() {
                    col *= 1.0 / (lambda - alpha[j]);
                }
                let mut s = self.op.app().clone();
                s.gemm(1.0, &bd, bt, 1.0);
                linalg::symmetrize(&mut s);
                s
            }
        })
    }

    /// `mu_k(S(lambda))`, `k` 1-based.
    pub fn mu(&self, k: usize, lambda: f64) -> Result<f64> {
        self.check_k(k)?;
        match &self.reduced {
            Reduced::Decoupled { mu } => {
                self.check_lambda(lambda)?;
                Ok(mu[k - 1])
            }
            Reduced::Coupled { .. } => {
                let s = self.matrix(lambda)?;
                let mu = Tridiagonal::reduce(&s).eigenvalue(k - 1);
                if !mu.is_finite() {
                    return Err(GapError::Eigen(format!("mu_{k}(S({lambda})) is not finite")));
                }
                Ok(mu)
            }
        }
    }

    /// `f_k(lambda) = mu_k(S(lambda)) - lambda`.
    pub fn objective(&self, k: usize, lambda: f64) -> Result<f64> {
        Ok(self.mu(k, lambda)? - lambda)
    }
}

pub fn schur_complement(op: &DecomposedOperator, lambda: f64) -> Result<DMatrix<f64>> {
    SchurEvaluator::new(op)?.matrix(lambda)
}

pub fn level_objective(op: &DecomposedOperator, k: usize, lambda: f64) -> Result<f64> {
    SchurEvaluator::new(op)?.objective(k, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> DecomposedOperator {
        DecomposedOperator::from_full(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -2.0]), 1).unwrap()
    }

    #[test]
    fn closed_form_two_by_two() {
        let op = two_by_two();
        assert!((schur_complement(&op, 2.0).unwrap()[(0, 0)] - 2.25).abs() < 1e-15);
        assert!((level_objective(&op, 1, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(level_objective(&op, 1, 5f64.sqrt()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_lambda_at_a_minus() {
        let err = schur_complement(&two_by_two(), -2.0).unwrap_err();
        assert!(matches!(err, GapError::Precondition(_)));
        assert!(matches!(level_objective(&two_by_two(), 2, 0.0), Err(GapError::IndexOutOfRange { .. })));
    }

    #[test]
    fn zero_coupling_returns_app() {
        let app = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 3.0]);
        let op = DecomposedOperator::from_blocks(app.clone(), DMatrix::zeros(2, 1), DMatrix::from_element(1, 1, -1.0))
            .unwrap();
        assert_eq!(schur_complement(&op, 0.3).unwrap(), app);
        let mu1 = linalg::symmetric_eigenvalues(&app).unwrap()[0];
        assert!((level_objective(&op, 1, 0.3).unwrap() - (mu1 - 0.3)).abs() < 1e-14);
    }

    #[test]
    fn matches_direct_inverse() {
        let full = DMatrix::from_row_slice(
            4,
            4,
            &[
                3.0, 0.4, 0.2, -0.1, //
                0.4, 2.0, 0.3, 0.5, //
                0.2, 0.3, -1.0, 0.2, //
                -0.1, 0.5, 0.2, -2.0,
            ],
        );
        let op = DecomposedOperator::from_full(&full, 2).unwrap();
        let lambda = 0.7;
        let shifted = op.amm() - DMatrix::identity(2, 2) * lambda;
        let direct = op.app() - op.apm() * shifted.try_inverse().unwrap() * op.apm().transpose();
        assert!((schur_complement(&op, lambda).unwrap() - direct).amax() < 1e-14);
    }
}
