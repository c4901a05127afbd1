//! Ready-made torus models used by the checks, the CLI and the tests.

use crate::forms::DifferentialForm;
use crate::lcps::{Model, ModelError};
use crate::ring::{CoordinateRoster, FourierScalar, PiPolynomial, Shape};
use crate::thickening::Splitting;

fn dydy(sh: Shape, i: usize, j: usize) -> DifferentialForm {
    DifferentialForm::from_indices(FourierScalar::one(sh), &[i, j])
}

/// `T²_y × T²_q` with `ω = dy¹∧dy²`, `b = 0` and the flat splitting.
pub fn zambon() -> Model {
    let roster = CoordinateRoster::standard(2, 2, false);
    let sh = roster.shape();
    Model::new(roster, dydy(sh, 0, 1), DifferentialForm::zero(sh, 1), 1)
        .and_then(|m| m.with_splitting(Splitting::flat(sh)))
        .and_then(Model::with_derived_inverse)
        .expect("zambon model is well formed")
}

/// `Γ₁ = sin(2πy¹) dq¹ + sin(2πy²) dq²` on the given base shape.
pub fn zambon_gamma1(sh: Shape) -> DifferentialForm {
    let t = sh.transverse;
    &DifferentialForm::from_indices(FourierScalar::sin_coord(sh, 0), &[t])
        + &DifferentialForm::from_indices(FourierScalar::sin_coord(sh, 1), &[t + 1])
}

/// `T²_y × T¹_q`, `ω = dy¹∧dy²`, with the splitting `R_1 = sin(2πq¹)`, `R_2 = sin(2πy¹)`.
pub fn curved() -> Model {
    let roster = CoordinateRoster::standard(2, 1, false);
    let sh = roster.shape();
    let r = vec![vec![FourierScalar::sin_coord(sh, 2)], vec![FourierScalar::sin_coord(sh, 0)]];
    Model::new(roster, dydy(sh, 0, 1), DifferentialForm::zero(sh, 1), 1)
        .and_then(|m| m.with_splitting(Splitting::new(sh, r)?))
        .and_then(Model::with_derived_inverse)
        .expect("curved model is well formed")
}

/// Curved model on `T²_y × T²_q` with the given splitting and `ω = dy¹∧dy²`.
pub fn with_splitting_rows(leaf: usize, r: Vec<Vec<FourierScalar>>) -> Result<Model, ModelError> {
    let roster = CoordinateRoster::standard(2, leaf, false);
    let sh = roster.shape();
    Model::new(roster, dydy(sh, 0, 1), DifferentialForm::zero(sh, 1), 1)?
        .with_splitting(Splitting::new(sh, r)?)?
        .with_derived_inverse()
}

/// Leaf-torus model `Y = T^m`, `ω = 0`, `b = 2π c dq¹` with `c = num/den`.
pub fn twisted_leaf(m: usize, num: i64, den: i64) -> Model {
    let roster = CoordinateRoster::standard(0, m, false);
    let sh = roster.shape();
    let c = PiPolynomial::ratio(2 * num, den).shift(1);
    let b = if m == 0 || num == 0 {
        DifferentialForm::zero(sh, 1)
    } else {
        DifferentialForm::from_indices(FourierScalar::constant(sh, c), &[0])
    };
    Model::new(roster, DifferentialForm::zero(sh, 2), b, 0)
        .and_then(|m| m.with_splitting(Splitting::flat(sh)))
        .and_then(Model::with_derived_inverse)
        .expect("leaf torus model is well formed")
}

/// `T²_y × T²_q` with `ω = dy¹∧dy²` and transverse Lee form `b = c·dy¹`.
pub fn transverse_lee(c: i64) -> Model {
    let roster = CoordinateRoster::standard(2, 2, false);
    let sh = roster.shape();
    let b = DifferentialForm::from_indices(FourierScalar::int(sh, c), &[0]);
    Model::new(roster, dydy(sh, 0, 1), b, 1)
        .and_then(|m| m.with_splitting(Splitting::flat(sh)))
        .and_then(Model::with_derived_inverse)
        .expect("transverse lee model is well formed")
}

/// `T²_y × T²_q` with `R = [[sin 2πq¹, cos 2πy²], [sin 2πy¹, sin 2πq²]]`, optionally with `b = 3 dy¹`.
pub fn curved_two_leaf(with_b: bool) -> Model {
    let sh = Shape::new(2, 2, 0);
    let r = vec![
        vec![FourierScalar::sin_coord(sh, 2), FourierScalar::cos_coord(sh, 1)],
        vec![FourierScalar::sin_coord(sh, 0), FourierScalar::sin_coord(sh, 3)],
    ];
    let base = with_splitting_rows(2, r.clone()).unwrap();
    if !with_b {
        return base;
    }
    let b = DifferentialForm::from_indices(FourierScalar::int(sh, 3), &[0]);
    Model::new(base.roster().clone(), base.omega().clone(), b, 1)
        .unwrap()
        .with_splitting(Splitting::new(sh, r).unwrap())
        .unwrap()
        .with_derived_inverse()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcps::validate_structure;

    #[test]
    fn standard_models_validate() {
        for m in [zambon(), curved(), twisted_leaf(2, 1, 3), transverse_lee(2)] {
            let r = validate_structure(&m);
            assert!(r.is_lcps_rank_2k, "{:?}", r.failures);
            assert!(r.transverse_invariance_ok);
        }
    }
}
