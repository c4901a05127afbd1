//! The b-deformed strong homotopy Lie algebroid on leafwise forms.
//!
//! `m₁` and `m₂` are evaluated from the covariant derivative. All brackets can
//! also be produced as higher derived brackets of the Poissonized Jacobi
//! bivector of the thickening, which is what [`m_higher`] uses.

mod superfn;

use std::sync::OnceLock;

use thiserror::Error;

pub use superfn::SuperFn;

use crate::forms::{bits, DifferentialForm, FormError};
use crate::lcps::{form_matrix, Model, ModelError};
use crate::linalg::invert_unit_pivot;
use crate::ring::{FourierScalar, Shape};
use crate::thickening::{build_omega_u, transverse_curvature, Splitting, TransverseCurvature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinftyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("the base model must not carry fiber coordinates")]
    FiberedBase,
    #[error("ω^{{ij}} is neither supplied nor derivable")]
    NoInverse,
    #[error("input is not a leafwise form on the base")]
    NotLeafForm,
    #[error("the thickened form has no inverse at the zero section")]
    Degenerate,
    #[error("arity {0} is not supported here")]
    Arity(usize),
    #[error("the longhand evaluator takes degree-1 inputs only")]
    LonghandDegrees,
}

/// Largest arity served by the derived-bracket engine.
pub const MAX_ARITY: usize = 5;

/// Model data needed by the brackets.
#[derive(Debug)]
pub struct AlgebroidContext {
    model: Model,
    splitting: Splitting,
    curvature: TransverseCurvature,
    omega_inv: Vec<Vec<FourierScalar>>,
    bbar: DifferentialForm,
    /// `fsharp[i][β][j] = Σ_k F_{ik}^β ω^{kj}`.
    fsharp: Vec<Vec<Vec<FourierScalar>>>,
    derived: OnceLock<Result<DerivedEngine, LinftyError>>,
}

impl AlgebroidContext {
    pub fn new(model: &Model) -> Result<Self, LinftyError> {
        let sh = model.shape();
        if sh.fiber != 0 {
            return Err(LinftyError::FiberedBase);
        }
        let model = match model.omega_inv() {
            Some(_) => model.clone(),
            None => model.clone().with_derived_inverse().map_err(|_| LinftyError::NoInverse)?,
        };
        let omega_inv = model.omega_inv().cloned().ok_or(LinftyError::NoInverse)?;
        let splitting = model.splitting_or_flat();
        let curvature = transverse_curvature(&splitting);
        let t = sh.transverse;
        let fsharp = (0..t)
            .map(|i| {
                (0..sh.leaf)
                    .map(|beta| {
                        (0..t)
                            .map(|j| {
                                let mut acc = FourierScalar::zero(sh);
                                for (k, row) in omega_inv.iter().enumerate() {
                                    acc += &(&curvature.f(i, k, beta) * &row[j]);
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let bbar = model.leaf_lee_form();
        Ok(AlgebroidContext { model, splitting, curvature, omega_inv, bbar, fsharp, derived: OnceLock::new() })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn shape(&self) -> Shape {
        self.model.shape()
    }

    pub fn splitting(&self) -> &Splitting {
        &self.splitting
    }

    pub fn curvature(&self) -> &TransverseCurvature {
        &self.curvature
    }

    pub fn omega_inv(&self) -> &Vec<Vec<FourierScalar>> {
        &self.omega_inv
    }

    pub fn bbar(&self) -> &DifferentialForm {
        &self.bbar
    }

    /// `F^# = F ω^{-1}` as `fsharp(i, β, j)`.
    pub fn fsharp(&self, i: usize, beta: usize, j: usize) -> &FourierScalar {
        &self.fsharp[i][beta][j]
    }

    fn engine(&self) -> Result<&DerivedEngine, LinftyError> {
        self.derived.get_or_init(|| DerivedEngine::new(&self.model, &self.splitting, MAX_ARITY)).as_ref().map_err(Clone::clone)
    }

    fn check_leaf(&self, xi: &DifferentialForm) -> Result<(), LinftyError> {
        if xi.shape() != self.shape() || !xi.is_leafwise() {
            return Err(LinftyError::NotLeafForm);
        }
        Ok(())
    }

    /// `b(Y_i) = b_i + b_γ R_i^γ`.
    fn b_on_lift(&self, i: usize) -> FourierScalar {
        let sh = self.shape();
        let b = self.model.b();
        let mut acc = b.component(&[i]);
        for g in 0..sh.leaf {
            acc += &(&b.component(&[sh.transverse + g]) * self.splitting.r(i, g));
        }
        acc
    }
}

/// Components `∇_i^b ξ` and `∇_β^b ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovariantDerivativeResult {
    pub transverse: Vec<DifferentialForm>,
    pub leaf: Vec<DifferentialForm>,
}

/// `∇_i^b ξ = (L_{Y_i} ξ)|_F + b(Y_i) ξ` and `∇_β^b ξ = ∂_β ξ + b_β ξ`, coefficientwise.
pub fn covariant_derivative(xi: &DifferentialForm, ctx: &AlgebroidContext) -> Result<CovariantDerivativeResult, LinftyError> {
    ctx.check_leaf(xi)?;
    let sh = ctx.shape();
    let t = sh.transverse;
    let deg = xi.degree();
    let mut transverse = Vec::with_capacity(t);
    for i in 0..t {
        let yi = ctx.splitting.basic_field(i);
        let bi = ctx.b_on_lift(i);
        let mut out = DifferentialForm::zero(sh, deg);
        for (mask, f) in xi.terms() {
            let c = &yi.apply(f) + &(&bi * f);
            out.add_term(*mask, &c);
            let idx: Vec<usize> = bits(*mask).collect();
            for slot in 0..idx.len() {
                let beta = idx[slot] - t;
                for g in 0..sh.leaf {
                    let dr = ctx.splitting.r(i, beta).partial(t + g);
                    if dr.is_zero() {
                        continue;
                    }
                    let mut nidx = idx.clone();
                    nidx[slot] = t + g;
                    out = &out + &DifferentialForm::from_indices(f * &dr, &nidx);
                }
            }
        }
        transverse.push(out);
    }
    let b = ctx.model.b();
    let leaf = (0..sh.leaf)
        .map(|beta| {
            let bb = b.component(&[t + beta]);
            xi.map_coeffs(|f| &f.partial(t + beta) + &(&bb * f))
        })
        .collect();
    Ok(CovariantDerivativeResult { transverse, leaf })
}

fn parity_sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `m₁(ξ) = (−1)^{|ξ|} d_F^{b̄} ξ`.
pub fn m1(xi: &DifferentialForm, ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    ctx.check_leaf(xi)?;
    Ok(xi.leafwise_twisted_derivative(&ctx.bbar)?.scale_int(parity_sign(xi.degree())))
}

/// `m₁` through the skew-symmetrized leaf part of the covariant derivative.
pub fn m1_by_skew(xi: &DifferentialForm, ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    let cd = covariant_derivative(xi, ctx)?;
    let sh = ctx.shape();
    let mut out = DifferentialForm::zero(sh, xi.degree() + 1);
    for (beta, d) in cd.leaf.iter().enumerate() {
        out = &out + &DifferentialForm::covector(sh, sh.transverse + beta).wedge(d);
    }
    Ok(out.scale_int(parity_sign(xi.degree())))
}

/// `m₂(ξ₁, ξ₂) = (−1)^{|ξ₁|(|ξ₂|+1)} Σ_{i,j} ω^{ij} ∇_i^b ξ₁ ∧ ∇_j^b ξ₂`.
pub fn m2(x1: &DifferentialForm, x2: &DifferentialForm, ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    let c1 = covariant_derivative(x1, ctx)?;
    let c2 = covariant_derivative(x2, ctx)?;
    let sh = ctx.shape();
    let mut out = DifferentialForm::zero(sh, x1.degree() + x2.degree());
    for (i, a) in c1.transverse.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in c2.transverse.iter().enumerate() {
            let w = &ctx.omega_inv[i][j];
            if w.is_zero() || b.is_zero() {
                continue;
            }
            out = &out + &a.wedge(b).mul_scalar(w);
        }
    }
    Ok(out.scale_int(parity_sign(x1.degree() * (x2.degree() + 1))))
}

/// Higher brackets `m_ℓ`, ℓ ≥ 3, from the derived-bracket engine.
pub fn m_higher(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    if xs.len() < 3 {
        return Err(LinftyError::Arity(xs.len()));
    }
    m_derived(xs, ctx)
}

/// Any `m_ℓ` by arity.
pub fn m(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    match xs.len() {
        0 => Err(LinftyError::Arity(0)),
        1 => m1(&xs[0], ctx),
        2 => m2(&xs[0], &xs[1], ctx),
        _ => m_higher(xs, ctx),
    }
}

/// Longhand permutation sum
/// `Σ_σ ε(σ) ⟨∇^b ξ_{σ(1)}, (F^#⌟ξ_{σ(2)})⋯(F^#⌟ξ_{σ(ℓ−1)}) ∇^b ξ_{σ(ℓ)}⟩_ω`
/// without normalisation. `F^#⌟ξ` contracts the leaf slot of ξ against the leaf leg of `F^#`.
pub fn contraction_sum(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    let l = xs.len();
    if l < 2 {
        return Err(LinftyError::Arity(l));
    }
    let sh = ctx.shape();
    let t = sh.transverse;
    let out_deg = (xs.iter().map(DifferentialForm::degree).sum::<usize>() + 2).saturating_sub(l);
    let odd: Vec<bool> = xs.iter().map(|x| x.degree() % 2 == 0).collect();
    let cds: Vec<CovariantDerivativeResult> = xs.iter().map(|x| covariant_derivative(x, ctx)).collect::<Result<_, _>>()?;
    let mut acc = DifferentialForm::zero(sh, out_deg);
    for (perm, _) in crate::thickening::permutations(l) {
        let first = &cds[perm[0]].transverse;
        let mut v: Vec<DifferentialForm> = (0..t)
            .map(|j| {
                let mut s = DifferentialForm::zero(sh, xs[perm[0]].degree());
                for (i, fi) in first.iter().enumerate() {
                    let w = &ctx.omega_inv[i][j];
                    if !w.is_zero() {
                        s = &s + &fi.mul_scalar(w);
                    }
                }
                s
            })
            .collect();
        for &mid in &perm[1..l - 1] {
            let x = &xs[mid];
            let deg = v[0].degree() + x.degree().saturating_sub(1);
            let contracted: Vec<DifferentialForm> = (0..sh.leaf).map(|beta| x.contract_coord(t + beta)).collect();
            v = (0..t)
                .map(|k| {
                    let mut s = DifferentialForm::zero(sh, deg);
                    for (j, vj) in v.iter().enumerate() {
                        if vj.is_zero() {
                            continue;
                        }
                        for (beta, cx) in contracted.iter().enumerate() {
                            let f = &ctx.fsharp[j][beta][k];
                            if !f.is_zero() && !cx.is_zero() {
                                s = &s + &vj.wedge(cx).mul_scalar(f);
                            }
                        }
                    }
                    s
                })
                .collect();
        }
        let last = &cds[perm[l - 1]].transverse;
        let mut term = DifferentialForm::zero(sh, out_deg);
        for (m, vm) in v.iter().enumerate() {
            term = &term + &vm.wedge(&last[m]);
        }
        acc = &acc + &term.scale_int(koszul(&perm, &odd));
    }
    Ok(acc)
}

/// Independent evaluation of `m_ℓ` (ℓ ≥ 3) on leafwise 1-forms: `(−1)^ℓ/2` times [`contraction_sum`].
pub fn m_higher_longhand(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    if xs.len() < 3 {
        return Err(LinftyError::Arity(xs.len()));
    }
    if xs.iter().any(|x| x.degree() != 1) {
        return Err(LinftyError::LonghandDegrees);
    }
    let sign = if xs.len().is_multiple_of(2) { 1 } else { -1 };
    Ok(contraction_sum(xs, ctx)?.map_coeffs(|f| f.scale_ratio(sign, 2)))
}

/// Output sign relating the raw derived bracket to the convention of [`m1`] and [`m2`].
///
/// The strict isomorphism `ξ ↦ (−1)^{k(k−1)/2} ξ` on degree-k forms together with the
/// rescaling by −1 carries the raw brackets onto `m₁ = (−1)^{|ξ|} d_F^{b̄}` and the
/// `m₂` of [`m2`].
fn derived_sign(degrees: &[usize]) -> i64 {
    let eps = |k: i64| if (k * (k - 1) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
    let l = degrees.len() as i64;
    let out = 2 + degrees.iter().sum::<usize>() as i64 - l;
    let mut s = eps(out) * if (l - 1) % 2 == 0 { 1 } else { -1 };
    for &d in degrees {
        s *= eps(d as i64);
    }
    s
}

/// `m_ℓ` as a higher derived bracket `pr[…[P̃, ξ₁], …, ξ_ℓ]`, in the convention of [`m1`].
pub fn m_derived(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    for x in xs {
        ctx.check_leaf(x)?;
    }
    if xs.is_empty() || xs.len() > MAX_ARITY {
        return Err(LinftyError::Arity(xs.len()));
    }
    let raw = ctx.engine()?.bracket(xs);
    let degs: Vec<usize> = xs.iter().map(DifferentialForm::degree).collect();
    Ok(raw.scale_int(derived_sign(&degs)))
}

/// Raw derived bracket without sign normalisation.
pub fn m_derived_raw(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    for x in xs {
        ctx.check_leaf(x)?;
    }
    if xs.is_empty() || xs.len() > MAX_ARITY {
        return Err(LinftyError::Arity(xs.len()));
    }
    Ok(ctx.engine()?.bracket(xs))
}

/// Koszul sign of listing `order` (a permutation of positions) given shifted parities.
fn koszul(order: &[usize], shifted_odd: &[bool]) -> i64 {
    let mut s = 1;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] && shifted_odd[order[a]] && shifted_odd[order[b]] {
                s = -s;
            }
        }
    }
    s
}

/// Arity-`N` component of `δ∘δ` with Koszul signs for the shifted degrees `|ξ| − 1`.
///
/// `Σ_{i+j=N+1} Σ_{unshuffles σ} ε(σ) m_j(m_i(ξ_{σ(1)},…,ξ_{σ(i)}), ξ_{σ(i+1)},…)`.
pub fn linfty_relation_residual(xs: &[DifferentialForm], ctx: &AlgebroidContext) -> Result<DifferentialForm, LinftyError> {
    relation_residual_with(xs, ctx, |args| m(args, ctx))
}

/// The same residual for an arbitrary family of brackets.
pub fn relation_residual_with(
    xs: &[DifferentialForm],
    ctx: &AlgebroidContext,
    mut mm: impl FnMut(&[DifferentialForm]) -> Result<DifferentialForm, LinftyError>,
) -> Result<DifferentialForm, LinftyError> {
    let n = xs.len();
    if n == 0 || n > MAX_ARITY {
        return Err(LinftyError::Arity(n));
    }
    let odd: Vec<bool> = xs.iter().map(|x| x.degree() % 2 == 0).collect();
    let total: usize = xs.iter().map(DifferentialForm::degree).sum();
    let mut acc = DifferentialForm::zero(ctx.shape(), (total + 2).saturating_sub(n));
    for i in 1..=n {
        for sel in 0u32..(1 << n) {
            if sel.count_ones() as usize != i {
                continue;
            }
            let first: Vec<usize> = (0..n).filter(|&a| sel & (1 << a) != 0).collect();
            let rest: Vec<usize> = (0..n).filter(|&a| sel & (1 << a) == 0).collect();
            let order: Vec<usize> = first.iter().chain(&rest).copied().collect();
            let sign = koszul(&order, &odd);
            let inner_args: Vec<DifferentialForm> = first.iter().map(|&a| xs[a].clone()).collect();
            let inner = mm(&inner_args)?;
            if inner.is_zero() {
                continue;
            }
            let mut outer_args = vec![inner];
            outer_args.extend(rest.iter().map(|&a| xs[a].clone()));
            let v = mm(&outer_args)?;
            acc = &acc + &v.scale_int(sign);
        }
    }
    Ok(acc)
}

/// Derived-bracket engine: `P̃ = e^{−t}(Λ + ∂_t ∧ E)` on `U × ℝ`.
#[derive(Debug)]
struct DerivedEngine {
    base: Shape,
    thick: Shape,
    /// `components[r]`: terms of `P̃` with (non-fiber odd count) + (fiber degree) = r.
    components: Vec<SuperFn>,
}

/// `Λ^{ab}` coefficient signs relative to `Ω^{-1}` and `E = s_E Λ^♯ b`.
const LAMBDA_SIGN: i64 = 1;
const E_SIGN: i64 = 1;

fn mat_mul(a: &[Vec<FourierScalar>], b: &[Vec<FourierScalar>], sh: Shape, deg: i32) -> Vec<Vec<FourierScalar>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = FourierScalar::zero(sh);
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc += &a[i][k].mul_truncated(&b[k][j], deg);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Inverse of the thickened form matrix as a series in the fiber variables, up to degree `deg`.
pub(crate) fn poisson_matrix(model: &Model, pi: &Splitting, deg: i32) -> Result<Vec<Vec<FourierScalar>>, LinftyError> {
    let w = build_omega_u(model, pi)?;
    let sh = w.shape();
    let n = sh.total();
    let idx: Vec<usize> = (0..n).collect();
    let om = form_matrix(&w, &idx);
    let om0: Vec<Vec<FourierScalar>> = om.iter().map(|r| r.iter().map(FourierScalar::at_zero_fiber).collect()).collect();
    let om1: Vec<Vec<FourierScalar>> = om.iter().zip(&om0).map(|(r, r0)| r.iter().zip(r0).map(|(a, b)| a - b).collect()).collect();
    let m0 = invert_unit_pivot(&om0, sh).ok_or(LinftyError::Degenerate)?;
    let step: Vec<Vec<FourierScalar>> = mat_mul(&m0, &om1, sh, deg).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
    let mut term = m0.clone();
    let mut acc = m0;
    for _ in 0..deg {
        term = mat_mul(&step, &term, sh, deg);
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += &term[i][j];
            }
        }
    }
    Ok(acc)
}

impl DerivedEngine {
    fn new(model: &Model, pi: &Splitting, max_arity: usize) -> Result<Self, LinftyError> {
        let deg = max_arity as i32;
        let lam = poisson_matrix(model, pi, deg)?;
        let thick = model.shape().thickened();
        let n = thick.total();
        let b = model.b().embed(thick);
        let ptilde = build_ptilde(&lam, &b, thick, LAMBDA_SIGN, E_SIGN);
        let mut components = Vec::with_capacity(max_arity + 1);
        for r in 0..=max_arity {
            let mut c = ptilde.clone();
            c.prune(r as u32);
            components.push(c);
        }
        let _ = n;
        Ok(DerivedEngine { base: model.shape(), thick, components })
    }

    fn to_super(&self, xi: &DifferentialForm) -> SuperFn {
        let t = self.base.transverse;
        let ft = self.thick.torus();
        let mut out = SuperFn::zero(self.thick, 1 - xi.degree() as i32);
        for (mask, f) in xi.terms() {
            let m = bits(*mask).fold(0u32, |acc, c| acc | (1 << (ft + c - t)));
            out.add_term(m, &f.embed(self.thick));
        }
        out
    }

    fn form_of(&self, s: &SuperFn, degree: usize) -> DifferentialForm {
        let t = self.base.transverse;
        let ft = self.thick.torus();
        let zero = vec![0; self.thick.fiber];
        let mut out = DifferentialForm::zero(self.base, degree);
        for (mask, f) in &s.terms {
            let m = bits(*mask).fold(0u32, |acc, c| acc | (1 << (c - ft + t)));
            out.add_term(m, &f.fiber_coefficient(&zero));
        }
        out
    }

    fn bracket(&self, xs: &[DifferentialForm]) -> DifferentialForm {
        let l = xs.len();
        let Some(degree) = (2 + xs.iter().map(DifferentialForm::degree).sum::<usize>()).checked_sub(l) else {
            return DifferentialForm::zero(self.base, 0);
        };
        let mut cur = self.components[l].clone();
        for (i, x) in xs.iter().enumerate() {
            cur = cur.bracket(&self.to_super(x));
            cur.prune((l - i - 1) as u32);
        }
        self.form_of(&cur, degree)
    }
}

/// `P̃ = e^{−t}(Λ + ∂_t ∧ E)` with `Λ = s_Λ Σ_{a<c} (Ω^{-1})^{ac} θ_aθ_c` and `E^c = s_E Σ_a b_a Λ^{ac}`.
pub(crate) fn build_ptilde(lam: &[Vec<FourierScalar>], b: &DifferentialForm, sh: Shape, s_lam: i64, s_e: i64) -> SuperFn {
    let n = sh.total();
    let mut p = SuperFn::zero(sh, -1);
    for a in 0..n {
        for c in a + 1..n {
            p.add_term((1 << a) | (1 << c), &lam[a][c].scale_int(s_lam));
        }
    }
    let tbit = 1u32 << n;
    for c in 0..n {
        let mut e = FourierScalar::zero(sh);
        for (a, row) in lam.iter().enumerate() {
            let ba = b.component(&[a]);
            if !ba.is_zero() {
                e += &(&ba * &row[c]);
            }
        }
        // θ_t θ_c = −θ_c θ_t
        p.add_term((1 << c) | tbit, &e.scale_int(-s_e * s_lam));
    }
    p
}

#[cfg(test)]
mod tests;
