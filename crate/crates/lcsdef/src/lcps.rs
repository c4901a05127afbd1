//! Models `(Y, ω, b)` and validation of l.c.s. / l.c.p-s. structures.

use thiserror::Error;

use crate::forms::{DifferentialForm, FormError, VectorField};
use crate::linalg::{pfaffian, solve_unit_pivot, unit_inverse};
use crate::ring::{CoordinateRoster, FourierScalar, PiPolynomial, RingError, Shape};
use crate::thickening::Splitting;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("omega must be a 2-form and b a 1-form")]
    Degrees,
    #[error("declared rank 2k = {0} exceeds the dimension")]
    Rank(usize),
    #[error("splitting has the wrong dimensions")]
    SplittingShape,
    #[error("omega_inverse is not the inverse of the transverse block of omega")]
    BadInverse,
    #[error("transverse block of omega has no inverse in the function ring")]
    NoInverse,
    #[error("hamiltonian equation has no solution in the function ring")]
    NoHamiltonianSolution,
}

/// A torus model with its structure forms and optional splitting data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    roster: CoordinateRoster,
    omega: DifferentialForm,
    b: DifferentialForm,
    rank_k: usize,
    splitting: Option<Splitting>,
    omega_inv: Option<Vec<Vec<FourierScalar>>>,
}

impl Model {
    pub fn new(roster: CoordinateRoster, omega: DifferentialForm, b: DifferentialForm, rank_k: usize) -> Result<Self, ModelError> {
        let shape = roster.shape();
        if omega.shape() != shape || b.shape() != shape {
            return Err(RingError::ShapeMismatch { left: omega.shape(), right: shape }.into());
        }
        if (omega.degree() != 2 && !omega.is_zero()) || (b.degree() != 1 && !b.is_zero()) {
            return Err(ModelError::Degrees);
        }
        if 2 * rank_k > shape.total() {
            return Err(ModelError::Rank(2 * rank_k));
        }
        let omega = if omega.is_zero() { DifferentialForm::zero(shape, 2) } else { omega };
        let b = if b.is_zero() { DifferentialForm::zero(shape, 1) } else { b };
        Ok(Model { roster, omega, b, rank_k, splitting: None, omega_inv: None })
    }

    pub fn with_splitting(mut self, s: Splitting) -> Result<Self, ModelError> {
        let sh = self.shape();
        if s.shape() != sh.base() {
            return Err(ModelError::SplittingShape);
        }
        self.splitting = Some(s);
        Ok(self)
    }

    /// Installs `ω^{ij}` after verifying `ω_{ij} ω^{jl} = δ_i^l`.
    pub fn with_omega_inv(mut self, inv: Vec<Vec<FourierScalar>>) -> Result<Self, ModelError> {
        let w = self.transverse_matrix();
        let n = w.len();
        let sh = self.shape();
        if inv.len() != n || inv.iter().any(|r| r.len() != n) {
            return Err(ModelError::BadInverse);
        }
        for i in 0..n {
            for l in 0..n {
                let mut acc = FourierScalar::zero(sh);
                for j in 0..n {
                    acc += &(&w[i][j] * &inv[j][l]);
                }
                let expect = if i == l { FourierScalar::one(sh) } else { FourierScalar::zero(sh) };
                if acc != expect {
                    return Err(ModelError::BadInverse);
                }
            }
        }
        self.omega_inv = Some(inv);
        Ok(self)
    }

    /// Derives `ω^{ij}` by exact elimination when the transverse block allows it.
    pub fn with_derived_inverse(self) -> Result<Self, ModelError> {
        let w = self.transverse_matrix();
        let inv = crate::linalg::invert_unit_pivot(&w, self.shape()).ok_or(ModelError::NoInverse)?;
        self.with_omega_inv(inv)
    }

    pub fn roster(&self) -> &CoordinateRoster {
        &self.roster
    }

    pub fn shape(&self) -> Shape {
        self.roster.shape()
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }

    pub fn b(&self) -> &DifferentialForm {
        &self.b
    }

    pub fn rank_k(&self) -> usize {
        self.rank_k
    }

    pub fn splitting(&self) -> Option<&Splitting> {
        self.splitting.as_ref()
    }

    /// The splitting, or the flat one `R = 0`.
    pub fn splitting_or_flat(&self) -> Splitting {
        self.splitting.clone().unwrap_or_else(|| Splitting::flat(self.shape().base()))
    }

    pub fn omega_inv(&self) -> Option<&Vec<Vec<FourierScalar>>> {
        self.omega_inv.as_ref()
    }

    /// `ω_{ij} = ω(∂_{y^i}, ∂_{y^j})`.
    pub fn transverse_matrix(&self) -> Vec<Vec<FourierScalar>> {
        form_matrix(&self.omega, self.shape().transverse_range().collect::<Vec<_>>().as_slice())
    }

    /// Coefficient matrix `Ω_{ab} = ω(∂_a, ∂_b)` over all coordinates.
    pub fn full_matrix(&self) -> Vec<Vec<FourierScalar>> {
        form_matrix(&self.omega, (0..self.shape().total()).collect::<Vec<_>>().as_slice())
    }

    /// `b̄`, the restriction of `b` to the leaves.
    pub fn leaf_lee_form(&self) -> DifferentialForm {
        self.b.leafwise_restrict()
    }
}

/// Matrix of a 2-form on the given coordinate vectors.
pub fn form_matrix(w: &DifferentialForm, idx: &[usize]) -> Vec<Vec<FourierScalar>> {
    idx.iter().map(|&a| idx.iter().map(|&b| w.component(&[a, b])).collect()).collect()
}

/// Outcome of [`validate_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub is_lcs: bool,
    pub is_lcps_rank_2k: bool,
    pub transverse_invariance_ok: bool,
    pub failures: Vec<(String, String)>,
}

/// Runs the closedness, twisted-closedness, rank and transverse-invariance checks.
pub fn validate_structure(m: &Model) -> StructureReport {
    let r = m.roster();
    let sh = m.shape();
    let mut failures = Vec::new();
    let db = m.b.exterior_derivative();
    let closed = db.is_zero();
    if !closed {
        failures.push(("lee form not closed".to_string(), db.to_text(r)));
    }
    let dbw = m.omega.twisted_unchecked(&m.b);
    let twisted = dbw.is_zero();
    if !twisted {
        failures.push(("omega not twisted-closed".to_string(), dbw.to_text(r)));
    }
    let k = m.rank_k as u32;
    let upper = m.omega.form_power(k + 1).expect("2-form has even degree");
    let upper_ok = upper.is_zero();
    if !upper_ok {
        failures.push((format!("omega^{} does not vanish", k + 1), upper.to_text(r)));
    }
    let lower_ok = !m.omega.form_power(k).expect("even").is_zero();
    if !lower_ok {
        failures.push((format!("omega^{} vanishes", k), "0".to_string()));
    }
    let mut invariance = true;
    for c in sh.leaf_range() {
        let xi = VectorField::coord(sh, c);
        let lie = m.omega.lie_derivative(&xi);
        let bxi = m.b.contract_coord(c).coefficient(0);
        let res = &lie + &m.omega.mul_scalar(&bxi);
        if !res.is_zero() {
            invariance = false;
            failures.push((format!("transverse invariance along d/d{}", r.name(c)), res.to_text(r)));
        }
    }
    let even = sh.total().is_multiple_of(2);
    let pf = if even { pfaffian(&m.full_matrix(), sh) } else { FourierScalar::zero(sh) };
    let nondeg = pf.as_constant().map(|c| !c.is_zero()).unwrap_or(false);
    let is_lcs = closed && twisted && nondeg;
    if !nondeg {
        failures.push(("not l.c.s.: Pfaffian is not a nonzero constant".to_string(), pf.to_text(r)));
    }
    StructureReport { is_lcs, is_lcps_rank_2k: closed && twisted && upper_ok && lower_ok, transverse_invariance_ok: invariance, failures }
}

/// Result of the l.c.p-s. vector field test: `d^b(ι_ξω) = cω` and `u = b(ξ) − c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcpsField {
    pub c: PiPolynomial,
    pub u: FourierScalar,
}

/// Finds the constant `c` with `d^b(ι_ξω) = cω`, if one exists.
pub fn lcps_vector_field_test(xi: &VectorField, m: &Model) -> Option<LcpsField> {
    let sh = m.shape();
    let eta = m.omega.contract(xi).twisted_unchecked(&m.b);
    let c = if eta.is_zero() {
        PiPolynomial::zero()
    } else {
        let (mask, wcoef) = m.omega.terms().iter().next()?;
        let ecoef = eta.coefficient(*mask);
        let (key, wc) = wcoef.terms().iter().find(|(_, c)| c.inv().is_some())?;
        let ec = ecoef.terms().get(key).cloned().unwrap_or_default();
        &ec * &wc.inv()?
    };
    let cf = FourierScalar::constant(sh, c.clone());
    if !(&eta - &m.omega.mul_scalar(&cf)).is_zero() {
        return None;
    }
    let bxi = m.b.contract(xi).coefficient(0);
    Some(LcpsField { c, u: &bxi - &cf })
}

/// Solves `ι_ξω = d^b f` for ξ using constant pivots only.
pub fn hamiltonian_vector_field(f: &FourierScalar, m: &Model) -> Result<VectorField, ModelError> {
    let sh = m.shape();
    let eta = DifferentialForm::scalar(f.clone()).twisted_unchecked(&m.b);
    // (ι_ξω)_b = Σ_a ξ^a Ω_{ab}, so Ωᵀ ξ = η.
    let om = m.full_matrix();
    let n = sh.total();
    let at: Vec<Vec<FourierScalar>> = (0..n).map(|b| (0..n).map(|a| om[a][b].clone()).collect()).collect();
    let rhs: Vec<FourierScalar> = (0..n).map(|b| eta.component(&[b])).collect();
    let sol = solve_unit_pivot(&at, &rhs).ok_or(ModelError::NoHamiltonianSolution)?;
    let mut xi = VectorField::zero(sh);
    for (a, v) in sol.into_iter().enumerate() {
        xi.set(a, v);
    }
    if m.omega.contract(&xi) != eta {
        return Err(ModelError::NoHamiltonianSolution);
    }
    Ok(xi)
}

/// Whether a constant scalar is invertible.
pub fn is_unit(f: &FourierScalar) -> bool {
    unit_inverse(f).is_some()
}
