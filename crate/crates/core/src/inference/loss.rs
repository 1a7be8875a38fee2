use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{invalid, shape_err, Result};

/// Values of the individual loss terms of one batch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossTerms {
    /// `‖T̂ − T‖₂`.
    pub data: f64,
    /// `‖Â − Âᵀ‖₂`.
    pub symmetry: f64,
    /// `tr(Â)`.
    pub trace: f64,
    /// `‖Â − A⁰‖₂`, unweighted.
    pub prior: f64,
    /// Weight applied to the prior term.
    pub nu: f64,
    pub total: f64,
}

/// `J = ‖T̂ − T‖₂ + ‖Â − Âᵀ‖₂ + tr(Â) + ν‖Â − A⁰‖₂`. The prior term is
/// skipped when `prior` is `None` or `ν = 0`.
pub fn kuramoto_loss(
    tape: &mut Tape,
    predicted: Var,
    observed: Var,
    a_hat: Var,
    prior: Option<Var>,
    nu: f64,
) -> Result<(Var, LossTerms)> {
    if !(nu >= 0.0) {
        return invalid(format!("nu must be nonnegative, got {nu}"));
    }
    let diff = tape.sub(predicted, observed)?;
    let data = tape.l2_norm(diff)?;
    let at = tape.transpose(a_hat)?;
    let asym = tape.sub(a_hat, at)?;
    let symmetry = tape.l2_norm(asym)?;
    let trace = tape.trace(a_hat)?;
    let mut total = tape.add(data, symmetry)?;
    total = tape.add(total, trace)?;
    let mut terms = LossTerms {
        data: tape.scalar(data)?,
        symmetry: tape.scalar(symmetry)?,
        trace: tape.scalar(trace)?,
        nu,
        ..LossTerms::default()
    };
    if let Some(a0) = prior {
        let gap = tape.sub(a_hat, a0)?;
        let dist = tape.l2_norm(gap)?;
        terms.prior = tape.scalar(dist)?;
        if nu > 0.0 {
            let weighted = tape.scale(dist, nu)?;
            total = tape.add(total, weighted)?;
        }
    }
    terms.total = tape.scalar(total)?;
    Ok((total, terms))
}

/// Data misfit `‖Ŵ − W‖₂` for the Harris-Wilson model.
pub fn hw_loss(tape: &mut Tape, predicted: Var, observed: Var) -> Result<(Var, LossTerms)> {
    let diff = tape.sub(predicted, observed)?;
    let data = tape.l2_norm(diff)?;
    let value = tape.scalar(data)?;
    Ok((
        data,
        LossTerms {
            data: value,
            total: value,
            ..LossTerms::default()
        },
    ))
}

/// Scales each row of `c` to sum to one, differentiably:
/// `c ⊙ (rowsum(c)^{-1} 1ᵀ)`.
pub fn row_normalize(tape: &mut Tape, c: Var) -> Result<Var> {
    let value = tape.value(c)?;
    if !value.is_matrix() {
        return shape_err("row_normalize", format!("needs a matrix, got {:?}", value.shape()));
    }
    let cols = value.cols();
    let sums = tape.row_sum(c)?;
    if let Some(i) = tape.value(sums)?.data().iter().position(|&s| s <= 0.0) {
        return invalid(format!("row {i} of the cost estimate sums to zero and cannot be normalized"));
    }
    let inv = tape.pow(sums, -1.0)?;
    let ones = tape.constant(Tensor::ones(&[1, cols]));
    let spread = tape.matmul(inv, ones)?;
    tape.mul(c, spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(tape: &mut Tape, rows: usize, cols: usize, data: &[f64]) -> Var {
        tape.param(Tensor::matrix(rows, cols, data.to_vec()).unwrap())
    }

    #[test]
    fn perfect_fit_is_zero() {
        let mut tape = Tape::new();
        let t = leaf(&mut tape, 2, 1, &[0.3, 0.4]);
        let a = leaf(&mut tape, 2, 2, &[0.0, 0.7, 0.7, 0.0]);
        let (_, terms) = kuramoto_loss(&mut tape, t, t, a, None, 0.0).unwrap();
        assert_eq!(terms.total, 0.0);
    }

    #[test]
    fn antisymmetric_part_norm() {
        let mut tape = Tape::new();
        let t = leaf(&mut tape, 2, 1, &[0.0, 0.0]);
        let a = leaf(&mut tape, 2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let (_, terms) = kuramoto_loss(&mut tape, t, t, a, Some(a), 10.0).unwrap();
        assert!((terms.symmetry - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(terms.prior, 0.0);
        assert!((terms.total - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn row_normalize_rejects_zero_rows() {
        let mut tape = Tape::new();
        let c = leaf(&mut tape, 2, 2, &[0.0, 0.0, 1.0, 3.0]);
        assert!(row_normalize(&mut tape, c).is_err());
        let c = leaf(&mut tape, 2, 2, &[1.0, 1.0, 1.0, 3.0]);
        let n = row_normalize(&mut tape, c).unwrap();
        assert_eq!(tape.value(n).unwrap().data(), &[0.5, 0.5, 0.25, 0.75]);
    }
}
