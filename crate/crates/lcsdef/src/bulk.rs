//! Deformations of the ambient structure and simultaneous (bulk) deformations
//! of a coisotropic section, including the order-`t²` obstruction pipeline.

use thiserror::Error;

use crate::forms::{DifferentialForm, FormError, VectorField};
use crate::lcps::{validate_structure, Model, ModelError};
use crate::linalg::rank_pi;
use crate::linfty::{m2, AlgebroidContext, LinftyError};
use crate::master::{horizontal_lift, linearized_operator, series_mul, MasterError};
use crate::mc::{
    frequency_box, kuranishi, leafwise_solve, mc_rhs, mc_solve, p_omega_contract, verify_certificate, wedge_matrix, CohomologySolveResult,
    FormalSeries, McError, McOutcome, ObstructionCertificate,
};
use crate::models;
use crate::ring::{FourierScalar, PiPolynomial, Shape};
use crate::syntax::parse_form;
use crate::thickening::{thicken, Splitting};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BulkError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error("the 1-form c is not closed")]
    CNotClosed,
    #[error("expected a {0}-form")]
    Degree(usize),
    #[error("unsupported model: {0}")]
    Unsupported(&'static str),
    #[error("bulk series does not start at the model structure")]
    SeriesStart,
    #[error("scenario check failed: {what}: expected {expected}, found {found}")]
    Scenario { what: &'static str, expected: String, found: String },
}

/// A first-order deformation `(κ, c)` of `(ω, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalDeformation {
    kappa: DifferentialForm,
    c: DifferentialForm,
}

impl InfinitesimalDeformation {
    pub fn new(kappa: DifferentialForm, c: DifferentialForm) -> Result<Self, BulkError> {
        if kappa.degree() != 2 {
            return Err(BulkError::Degree(2));
        }
        if c.degree() != 1 {
            return Err(BulkError::Degree(1));
        }
        if !c.exterior_derivative().is_zero() {
            return Err(BulkError::CNotClosed);
        }
        Ok(InfinitesimalDeformation { kappa, c })
    }

    pub fn kappa(&self) -> &DifferentialForm {
        &self.kappa
    }

    pub fn c(&self) -> &DifferentialForm {
        &self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeformationMode {
    Lcs,
    Lcps,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalReport {
    /// `d^b κ + c ∧ ω`.
    pub residual: DifferentialForm,
    /// `κ` restricted to the leaves (lcps mode only).
    pub leaf_restriction: Option<DifferentialForm>,
    /// `ω^k ∧ κ` (lcps mode only).
    pub power_route: Option<DifferentialForm>,
    pub passes: bool,
    /// Whether both routes agree on `κ|_F = 0`.
    pub routes_agree: bool,
}

pub fn infinitesimal_check(d: &InfinitesimalDeformation, m: &Model, mode: DeformationMode) -> Result<InfinitesimalReport, BulkError> {
    let residual = &d.kappa.twisted_derivative(m.b())? + &d.c.wedge(m.omega());
    let mut passes = residual.is_zero();
    let (mut leaf_restriction, mut power_route, mut routes_agree) = (None, None, true);
    if mode == DeformationMode::Lcps {
        let lr = d.kappa.leafwise_restrict();
        let pw = m.omega().form_power(m.rank_k() as u32)?.wedge(&d.kappa);
        routes_agree = lr.is_zero() == pw.is_zero();
        passes &= lr.is_zero() && pw.is_zero();
        leaf_restriction = Some(lr);
        power_route = Some(pw);
    }
    Ok(InfinitesimalReport { residual, leaf_restriction, power_route, passes, routes_agree })
}

/// `S(ξ, c) = d^b(ξ ⌟ ω) − c ω`.
pub fn s_map(xi: &VectorField, c: &PiPolynomial, m: &Model) -> Result<DifferentialForm, BulkError> {
    let a = m.omega().interior_product(xi)?;
    Ok(&a.twisted_derivative(m.b())? - &m.omega().scale(c))
}

/// `(κ′ − (−fω + κ + L_ξω), c′ − (c + L_ξb + df))`.
pub fn equivalence_residual(
    d: &InfinitesimalDeformation,
    d2: &InfinitesimalDeformation,
    xi: &VectorField,
    f: &FourierScalar,
    m: &Model,
) -> (DifferentialForm, DifferentialForm) {
    let fw = m.omega().mul_scalar(f);
    let k = &(&(&d2.kappa + &fw) - &d.kappa) - &m.omega().lie_derivative(xi);
    let df = DifferentialForm::scalar(f.clone()).exterior_derivative();
    let c = &(&(&d2.c - &d.c) - &m.b().lie_derivative(xi)) - &df;
    (k, c)
}

fn masks(n: usize, deg: usize, ideal: Option<u32>) -> Vec<u32> {
    (0u32..(1 << n)).filter(|x| x.count_ones() as usize == deg && ideal.is_none_or(|t| x & t != 0)).collect()
}

/// Matrix of `x ↦ v ∧ x` between the spans of the given masks.
fn restricted_wedge(v: &[PiPolynomial], src: &[u32], dst: &[u32]) -> Vec<Vec<PiPolynomial>> {
    let n = v.len();
    let full = wedge_matrix(v, src.first().map_or(0, |s| s.count_ones() as usize));
    let all_src = masks(n, src.first().map_or(0, |s| s.count_ones() as usize), None);
    let all_dst = masks(n, src.first().map_or(0, |s| s.count_ones() as usize) + 1, None);
    dst.iter()
        .map(|d| {
            let r = all_dst.iter().position(|x| x == d).expect("mask");
            src.iter().map(|s| full[r][all_src.iter().position(|x| x == s).expect("mask")].clone()).collect()
        })
        .collect()
}

/// Twisted cohomology dimensions per degree over a truncated frequency box,
/// optionally restricted to the ideal of forms with at least one transverse leg.
fn twisted_dims(lee: &[PiPolynomial], trunc: i32, ideal: Option<u32>) -> Vec<usize> {
    let n = lee.len();
    let mut dims = vec![0usize; n + 1];
    for k in frequency_box(n, trunc) {
        let v: Vec<PiPolynomial> = k.iter().zip(lee).map(|(&kb, b)| &PiPolynomial::two_pi_i(kb as i64) + b).collect();
        let spaces: Vec<Vec<u32>> = (0..=n).map(|j| masks(n, j, ideal)).collect();
        let ranks: Vec<usize> = (0..n)
            .map(|j| if spaces[j].is_empty() || spaces[j + 1].is_empty() { 0 } else { rank_pi(&restricted_wedge(&v, &spaces[j], &spaces[j + 1])) })
            .collect();
        for j in 0..=n {
            let out = if j < n { ranks[j] } else { 0 };
            let inn = if j > 0 { ranks[j - 1] } else { 0 };
            dims[j] += spaces[j].len() - out - inn;
        }
    }
    dims
}

/// Dimensions of the truncated deformation spaces of a model with constant `ω` and `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationDims {
    pub truncation: i32,
    /// `dim H_b^j(X)`.
    pub twisted: Vec<usize>,
    /// `dim H_b^j` of the complex of forms vanishing on the leaves.
    pub ideal: Vec<usize>,
    /// Whether `[ω]` is nonzero in `H_b²(X)` and in the ideal complex.
    pub omega_class_nonzero: bool,
    pub omega_class_nonzero_ideal: bool,
    /// `dim ker(L: H_b¹ → H_b³, [a] ↦ [a ∧ ω])`.
    pub ker_l: usize,
    /// `H_b²/⟨ω⟩ ⊕ ker L`.
    pub lcs_deformations: usize,
    /// `H_b²(ideal)/⟨ω⟩ ⊕ ker L`.
    pub lcps_deformations: usize,
}

pub fn deformation_space_dims(m: &Model, truncation: i32) -> Result<DeformationDims, BulkError> {
    let sh = m.shape();
    if sh.fiber != 0 {
        return Err(BulkError::Unsupported("fibered base"));
    }
    let n = sh.total();
    let lee: Vec<PiPolynomial> = (0..n)
        .map(|c| {
            let f = m.b().component(&[c]);
            if f.is_zero() { Some(PiPolynomial::zero()) } else { f.as_constant() }
        })
        .collect::<Option<_>>()
        .ok_or(McError::NonConstantLee)?;
    let mut omega = vec![];
    for (mask, f) in m.omega().terms() {
        omega.push((*mask, f.as_constant().ok_or(BulkError::Unsupported("non-constant ω"))?));
    }
    let transverse_mask = (1u32 << sh.transverse) - 1;
    let twisted = twisted_dims(&lee, truncation, None);
    let ideal_dims = twisted_dims(&lee, truncation, Some(transverse_mask));
    // Cohomology of the full complex sits only in modes with v = 0, where the
    // differential vanishes and every constant form is its own class.
    let zero_mode = lee.iter().all(PiPolynomial::is_zero);
    let (omega_nonzero, ker_l) = if zero_mode {
        let one = masks(n, 1, None);
        let three = masks(n, 3, None);
        let mut l = vec![vec![PiPolynomial::zero(); one.len()]; three.len()];
        for (c, &a) in one.iter().enumerate() {
            let x = DifferentialForm::monomial(a, FourierScalar::one(sh));
            let w = DifferentialForm::from_terms(sh, 2, omega.iter().map(|(mk, p)| (*mk, FourierScalar::constant(sh, p.clone()))));
            for (mk, f) in x.wedge(&w).terms() {
                let r = three.iter().position(|t| t == mk).expect("mask");
                l[r][c] = f.as_constant().expect("constant");
            }
        }
        let rank = if three.is_empty() { 0 } else { rank_pi(&l) };
        (!omega.is_empty(), one.len() - rank)
    } else {
        (false, 0)
    };
    // In the ideal complex ω lies in the ideal when it has a transverse leg in every term;
    // its class is zero exactly when the zero mode of the ideal complex is exact at ω.
    let omega_ideal = zero_mode && omega.iter().all(|(mk, _)| mk & transverse_mask != 0) && !omega.is_empty();
    let lcs = twisted[2] - usize::from(omega_nonzero) + ker_l;
    let lcps = ideal_dims[2] - usize::from(omega_ideal) + ker_l;
    Ok(DeformationDims {
        truncation,
        twisted,
        ideal: ideal_dims,
        omega_class_nonzero: omega_nonzero,
        omega_class_nonzero_ideal: omega_ideal,
        ker_l,
        lcs_deformations: lcs,
        lcps_deformations: lcps,
    })
}

/// Simultaneous deformation `ω_t = Σ tⁱ ω̄_i`, `b_t = Σ tⁱ b_i`, `Γ_t = Σ_{i≥1} tⁱ Γ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulkSeries {
    pub omegas: Vec<DifferentialForm>,
    pub lee_forms: Vec<DifferentialForm>,
    pub sections: FormalSeries,
}

impl BulkSeries {
    pub fn new(omegas: Vec<DifferentialForm>, lee_forms: Vec<DifferentialForm>, sections: FormalSeries, m: &Model) -> Result<Self, BulkError> {
        if omegas.first() != Some(m.omega()) || lee_forms.first() != Some(m.b()) {
            return Err(BulkError::SeriesStart);
        }
        Ok(BulkSeries { omegas, lee_forms, sections })
    }

    /// The undeformed series at the model.
    pub fn trivial(m: &Model) -> Self {
        BulkSeries { omegas: vec![m.omega().clone()], lee_forms: vec![m.b().clone()], sections: FormalSeries::new(vec![]) }
    }

    fn omega(&self, i: usize, sh: Shape) -> DifferentialForm {
        self.omegas.get(i).cloned().unwrap_or_else(|| DifferentialForm::zero(sh, 2))
    }

    fn lee(&self, i: usize, sh: Shape) -> DifferentialForm {
        self.lee_forms.get(i).cloned().unwrap_or_else(|| DifferentialForm::zero(sh, 1))
    }
}

/// Residuals at one order `l` of the bulk system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulkOrderResidual {
    pub order: usize,
    /// `Σ_{i₀+…+i_k = l} ω̄_{i₀} ∧ … ∧ ω̄_{i_k}`.
    pub power: DifferentialForm,
    /// `d b_l`.
    pub lee_closed: DifferentialForm,
    /// `d^{b₀} ω̄_l + Σ_{j≥1} b_j ∧ ω̄_{l−j}`.
    pub conformal: DifferentialForm,
    /// `t^l` coefficient of `(ω̄_t − d^{b_t} p_G^* Γ_t)^{k+1}`.
    pub graph: DifferentialForm,
}

impl BulkOrderResidual {
    pub fn vanishes(&self) -> bool {
        self.power.is_zero() && self.lee_closed.is_zero() && self.conformal.is_zero() && self.graph.is_zero()
    }
}

/// Compositions of `n` into `parts` nonnegative parts.
fn weak_compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=n)
        .flat_map(|first| {
            weak_compositions(n - first, parts - 1).into_iter().map(move |mut r| {
                r.insert(0, first);
                r
            })
        })
        .collect()
}

fn graph_series(b: &BulkSeries, m: &Model, up_to: usize) -> Result<Vec<DifferentialForm>, BulkError> {
    let sh = m.shape();
    let lifts: Vec<DifferentialForm> = (0..=up_to)
        .map(|i| if i == 0 { Ok(DifferentialForm::zero(sh, 1)) } else { horizontal_lift(&b.sections.get(i, sh), m) })
        .collect::<Result<_, _>>()?;
    Ok((0..=up_to)
        .map(|l| {
            let mut g = b.omega(l, sh);
            for i in 1..=l {
                let lift = &lifts[i];
                let mut d = if l - i == 0 { lift.exterior_derivative() } else { DifferentialForm::zero(sh, 2) };
                d = &d + &b.lee(l - i, sh).wedge(lift);
                g = &g - &d;
            }
            g
        })
        .collect())
}

/// Per-order residuals of the expanded bulk system, orders `0..=up_to`.
pub fn bulk_order_residuals(b: &BulkSeries, m: &Model, up_to: usize) -> Result<Vec<BulkOrderResidual>, BulkError> {
    let sh = m.shape();
    let k1 = m.rank_k() + 1;
    let g = graph_series(b, m, up_to)?;
    let mut gp = g.clone();
    for _ in 1..k1 {
        gp = series_mul(&gp, &g, up_to);
    }
    (0..=up_to)
        .map(|l| {
            let mut power = DifferentialForm::zero(sh, 2 * k1);
            for c in weak_compositions(l, k1) {
                let term = c.iter().skip(1).fold(b.omega(c[0], sh), |acc, &i| acc.wedge(&b.omega(i, sh)));
                power = &power + &term;
            }
            let lee_closed = b.lee(l, sh).exterior_derivative();
            let mut conformal = b.omega(l, sh).exterior_derivative();
            for j in 0..=l {
                conformal = &conformal + &b.lee(j, sh).wedge(&b.omega(l - j, sh));
            }
            Ok(BulkOrderResidual { order: l, power, lee_closed, conformal, graph: gp[l].clone() })
        })
        .collect()
}

/// Power, conformal and graph conditions evaluated from whole truncated `t`-series products.
pub fn bulk_direct_residuals(b: &BulkSeries, m: &Model, up_to: usize) -> Result<Vec<(DifferentialForm, DifferentialForm, DifferentialForm)>, BulkError> {
    let sh = m.shape();
    let k1 = m.rank_k() + 1;
    let w: Vec<DifferentialForm> = (0..=up_to).map(|i| b.omega(i, sh)).collect();
    let lee: Vec<DifferentialForm> = (0..=up_to).map(|i| b.lee(i, sh)).collect();
    let mut wp = w.clone();
    for _ in 1..k1 {
        wp = series_mul(&wp, &w, up_to);
    }
    let bw = series_mul(&lee, &w, up_to);
    let dw: Vec<DifferentialForm> = (0..=up_to).map(|l| &w[l].exterior_derivative() + &bw[l]).collect();
    let g = graph_series(b, m, up_to)?;
    let mut gp = g.clone();
    for _ in 1..k1 {
        gp = series_mul(&gp, &g, up_to);
    }
    Ok((0..=up_to).map(|l| (wp[l].clone(), dw[l].clone(), gp[l].clone())).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BulkOrder2 {
    Obstructed(ObstructionCertificate),
    Solvable { gamma2: DifferentialForm, f: FourierScalar },
}

impl BulkOrder2 {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, BulkOrder2::Obstructed(_))
    }
}

fn check_zambon_class(m: &Model) -> Result<(), BulkError> {
    let sh = m.shape();
    if sh.fiber != 0 || m.rank_k() == 0 {
        return Err(BulkError::Unsupported("needs a fiberless base with k ≥ 1"));
    }
    if !m.b().is_zero() {
        return Err(BulkError::Unsupported("b₀ must vanish"));
    }
    if m.splitting().is_some_and(|s| *s != Splitting::flat(sh)) {
        return Err(BulkError::Unsupported("splitting must be flat"));
    }
    if m.omega().terms().values().any(|f| !f.is_constant()) {
        return Err(BulkError::Unsupported("ω must have constant coefficients"));
    }
    Ok(())
}

/// The `t²` equation contracted to the leaves, for `b₁ = b₁¹dy¹ + … + df`, `ω̄₁ = ω̄₂ = 0`, `Γ₂ = 0`.
fn order2_contracted(gamma1: &DifferentialForm, b1_const: &[i64], f: &FourierScalar, ctx: &AlgebroidContext) -> Result<DifferentialForm, BulkError> {
    let m = ctx.model();
    let sh = m.shape();
    let mut b1 = DifferentialForm::scalar(f.clone()).exterior_derivative();
    for (i, &c) in b1_const.iter().enumerate() {
        b1 = &b1 + &DifferentialForm::from_indices(FourierScalar::int(sh, c), &[i]);
    }
    let series = BulkSeries {
        omegas: vec![m.omega().clone()],
        lee_forms: vec![m.b().clone(), b1],
        sections: FormalSeries::new(vec![gamma1.clone()]),
    };
    let res = bulk_order_residuals(&series, m, 2)?;
    let k1 = m.rank_k() as i64 + 1;
    Ok(p_omega_contract(&res[2].graph, ctx)?.map_coeffs(|c| c.scale_ratio(-1, k1)))
}

/// Solvability of the order-`t²` bulk equation for a closed `Γ₁`.
///
/// With `Γ₂ = 0` the contracted equation reads `d_F(Γ₂ + fΓ₁) = −rhs`; `rhs` is
/// computed for several constant parts of `b₁` to confirm they drop out.
pub fn bulk_order2_obstruction(gamma1: &DifferentialForm, m: &Model) -> Result<BulkOrder2, BulkError> {
    check_zambon_class(m)?;
    let ctx = AlgebroidContext::new(m)?;
    let sh = m.shape();
    if !gamma1.leafwise_derivative().is_zero() {
        return Err(McError::NotClosed.into());
    }
    let zero_f = FourierScalar::zero(sh);
    let t = sh.transverse;
    let rhs = order2_contracted(gamma1, &vec![0; t], &zero_f, &ctx)?;
    for i in 0..t {
        let mut c = vec![0; t];
        c[i] = 1;
        if order2_contracted(gamma1, &c, &zero_f, &ctx)? != rhs {
            return Err(BulkError::Unsupported("constant part of b₁ enters the t² equation"));
        }
    }
    match leafwise_solve(&-&rhs, ctx.bbar())? {
        CohomologySolveResult::Solved(g) => Ok(BulkOrder2::Solvable { gamma2: g, f: zero_f }),
        CohomologySolveResult::Obstructed(mut c) => {
            c.order = 2;
            c.residual = rhs;
            c.harmonic_witness = -&c.harmonic_witness;
            Ok(BulkOrder2::Obstructed(c))
        }
    }
}

/// Contracted `t²` equation for a given `f`, exposed for the gauge check on `f`.
pub fn bulk_order2_rhs(gamma1: &DifferentialForm, f: &FourierScalar, m: &Model) -> Result<DifferentialForm, BulkError> {
    check_zambon_class(m)?;
    let ctx = AlgebroidContext::new(m)?;
    order2_contracted(gamma1, &vec![0; m.shape().transverse], f, &ctx)
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub steps: Vec<(String, bool, String)>,
    pub kuranishi_rhs: DifferentialForm,
    pub mc_certificate: ObstructionCertificate,
    pub bulk_certificate: ObstructionCertificate,
}

impl ScenarioReport {
    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|s| s.1)
    }
}

fn expect_eq(what: &'static str, found: &DifferentialForm, expected: &DifferentialForm, r: &crate::ring::CoordinateRoster) -> Result<(), BulkError> {
    if found == expected {
        Ok(())
    } else {
        Err(BulkError::Scenario { what, expected: expected.to_pretty(r), found: found.to_pretty(r) })
    }
}

/// The full Zambon pipeline on the standard 4-torus.
pub fn zambon_scenario() -> Result<ScenarioReport, BulkError> {
    let m = models::zambon();
    let r = m.roster().clone();
    let sh = m.shape();
    let mut steps = Vec::new();
    let sv = validate_structure(&m);
    steps.push(("structure".to_string(), sv.is_lcps_rank_2k && sv.transverse_invariance_ok, "l.c.p-s. of rank 2, transverse invariance".to_string()));

    let th = thicken(&m, &m.splitting_or_flat())?;
    let tr = th.roster().clone();
    let expect_u = parse_form("dy1^dy2 + dq1^dp1 + dq2^dp2", &tr).expect("literal");
    expect_eq("thickened ω", th.omega(), &expect_u, &tr)?;
    steps.push(("thickening".to_string(), true, th.omega().to_pretty(&tr)));

    let ctx = AlgebroidContext::new(&m)?;
    let g1 = models::zambon_gamma1(sh);
    let lin = linearized_operator(&g1, &ctx)?;
    steps.push(("linearized".to_string(), lin.reduced.is_zero(), "d_F Γ₁ = 0".to_string()));

    let kr = kuranishi(&g1, &ctx)?;
    let expected = parse_form("-4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)*dq1^dq2", &r).expect("literal");
    expect_eq("½ m₂(Γ₁, Γ₁)", &kr.half_m2, &expected, &r)?;
    expect_eq("m₂(Γ₁, Γ₁)", &m2(&g1, &g1, &ctx)?, &expected.scale_int(2), &r)?;
    steps.push(("kuranishi".to_string(), !kr.class_vanishes(), kr.half_m2.to_pretty(&r)));

    let rhs2 = mc_rhs(2, &FormalSeries::new(vec![g1.clone()]), &ctx)?;
    expect_eq("order-2 right-hand side", &rhs2, &-&expected, &r)?;
    let mc_cert = match mc_solve(&g1, 2, &ctx)? {
        McOutcome::Obstructed { certificate, .. } => certificate,
        McOutcome::Solved { .. } => {
            return Err(BulkError::Scenario { what: "mc_solve", expected: "obstruction".into(), found: "solution".into() });
        }
    };
    let ok = mc_cert.order == 2 && verify_certificate(&mc_cert, ctx.bbar())?;
    steps.push(("mc_solve".to_string(), ok, format!("obstructed at order {}", mc_cert.order)));

    let bulk_cert = match bulk_order2_obstruction(&g1, &m)? {
        BulkOrder2::Obstructed(c) => c,
        BulkOrder2::Solvable { .. } => {
            return Err(BulkError::Scenario { what: "bulk order 2", expected: "obstruction".into(), found: "solvable".into() });
        }
    };
    steps.push(("bulk".to_string(), bulk_cert.order == 2, bulk_cert.harmonic_witness.to_pretty(&r)));
    Ok(ScenarioReport { steps, kuranishi_rhs: kr.half_m2, mc_certificate: mc_cert, bulk_certificate: bulk_cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::CoordinateRoster;

    #[test]
    fn infinitesimal_examples() {
        let m = models::zambon();
        let r = m.roster().clone();
        let f = FourierScalar::sin_coord(m.shape(), 2);
        let d = InfinitesimalDeformation::new(m.omega().mul_scalar(&f.scale_int(-1)), DifferentialForm::scalar(f).exterior_derivative()).unwrap();
        assert!(infinitesimal_check(&d, &m, DeformationMode::Lcs).unwrap().passes);
        let d = InfinitesimalDeformation::new(parse_form("dy1^dq1", &r).unwrap(), DifferentialForm::zero(m.shape(), 1)).unwrap();
        let rep = infinitesimal_check(&d, &m, DeformationMode::Lcps).unwrap();
        assert!(rep.passes && rep.routes_agree);
        let d = InfinitesimalDeformation::new(parse_form("dq1^dq2", &r).unwrap(), DifferentialForm::zero(m.shape(), 1)).unwrap();
        let rep = infinitesimal_check(&d, &m, DeformationMode::Lcps).unwrap();
        assert!(!rep.passes && rep.routes_agree);
        assert!(InfinitesimalDeformation::new(parse_form("dq1^dq2", &r).unwrap(), parse_form("sin(2*pi*y1)*dq1", &r).unwrap()).is_err());
    }

    #[test]
    fn s_map_examples() {
        let m = models::zambon();
        let sh = m.shape();
        let zero = VectorField::zero(sh);
        assert_eq!(s_map(&zero, &PiPolynomial::int(1), &m).unwrap(), -m.omega());
        assert!(s_map(&zero, &PiPolynomial::zero(), &m).unwrap().is_zero());
    }

    #[test]
    fn deformation_dims_on_two_torus() {
        let roster = CoordinateRoster::standard(2, 0, false);
        let sh = roster.shape();
        let w = DifferentialForm::from_indices(FourierScalar::one(sh), &[0, 1]);
        let m = Model::new(roster.clone(), w.clone(), DifferentialForm::zero(sh, 1), 1).unwrap();
        let d = deformation_space_dims(&m, 1).unwrap();
        assert_eq!(d.twisted, vec![1, 2, 1]);
        assert_eq!(d.ker_l, 2);
        assert_eq!(d.lcs_deformations, 2);
        let b = DifferentialForm::from_indices(FourierScalar::int(sh, 3), &[0]);
        let m = Model::new(roster, w, b, 1).unwrap();
        let d = deformation_space_dims(&m, 1).unwrap();
        assert_eq!(d.twisted, vec![0, 0, 0]);
        assert_eq!(d.lcs_deformations, 0);
    }

    #[test]
    fn trivial_bulk_series_has_no_residual() {
        let m = models::zambon();
        let b = BulkSeries::trivial(&m);
        for r in bulk_order_residuals(&b, &m, 3).unwrap() {
            assert!(r.vanishes());
        }
    }

    #[test]
    fn zambon_bulk_obstruction() {
        let m = models::zambon();
        let g1 = models::zambon_gamma1(m.shape());
        assert!(bulk_order2_obstruction(&g1, &m).unwrap().is_obstructed());
        assert!(!bulk_order2_obstruction(&DifferentialForm::zero(m.shape(), 1), &m).unwrap().is_obstructed());
        let rep = zambon_scenario().unwrap();
        assert!(rep.all_pass(), "{:?}", rep.steps);
    }
}
