//! Coisotropy criteria: the linear Grassmannian chart test, the graph of a
//! section in the thickening, and the coordinate master equation.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::forms::{DifferentialForm, FormError};
use crate::lcps::{Model, ModelError};
use crate::linalg::{invert_q, pfaffian_q, rank_q};
use crate::linfty::{covariant_derivative, AlgebroidContext, LinftyError};
use crate::ring::FourierScalar;
use crate::thickening::{build_omega_u, leaf_coframe, transverse_curvature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MasterError {
    #[error("chart dimensions are inconsistent: {0}")]
    Dimension(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error("order must be at least 1")]
    Order,
    #[error("section components must be fiberless leaf 1-forms on the base")]
    BadSection,
}

/// Graph chart `C_A = {(x, Ax)}` of a linear map `A = (A_H, A_I) : C → ℝ^{n−k}`
/// over the model coisotropic subspace `C = ℝ^{2k} ⊕ ℝ^{n−k}` of `(ℝ^{2n}, ω₀ ⊕ Σ dx_i∧dy^i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoisotropicChart {
    pub n: usize,
    pub k: usize,
    /// `(n−k) × 2k`, the part of `A` on the symplectic block.
    pub a_h: Vec<Vec<BigRational>>,
    /// `(n−k) × (n−k)`, the part of `A` on the null directions.
    pub a_i: Vec<Vec<BigRational>>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn zeros(r: usize, c: usize) -> Vec<Vec<BigRational>> {
    vec![vec![BigRational::zero(); c]; r]
}

/// The standard form on `ℝ^{2k}` in the basis `(u_1..u_k, v_1..v_k)`: `Σ du_a∧dv_a`.
pub fn omega0(k: usize) -> Vec<Vec<BigRational>> {
    let mut m = zeros(2 * k, 2 * k);
    for a in 0..k {
        m[a][k + a] = q(1);
        m[k + a][a] = q(-1);
    }
    m
}

impl CoisotropicChart {
    pub fn new(n: usize, k: usize, a_h: Vec<Vec<BigRational>>, a_i: Vec<Vec<BigRational>>) -> Result<Self, MasterError> {
        let c = CoisotropicChart { n, k, a_h, a_i };
        c.check()?;
        Ok(c)
    }

    pub fn zero(n: usize, k: usize) -> Result<Self, MasterError> {
        if k > n {
            return Err(MasterError::Dimension(format!("k = {k} > n = {n}")));
        }
        Self::new(n, k, zeros(n - k, 2 * k), zeros(n - k, n - k))
    }

    fn check(&self) -> Result<(), MasterError> {
        if self.k > self.n {
            return Err(MasterError::Dimension(format!("k = {} > n = {}", self.k, self.n)));
        }
        let m = self.n - self.k;
        if self.a_h.len() != m || self.a_h.iter().any(|r| r.len() != 2 * self.k) {
            return Err(MasterError::Dimension("A_H must be (n−k) × 2k".into()));
        }
        if self.a_i.len() != m || self.a_i.iter().any(|r| r.len() != m) {
            return Err(MasterError::Dimension("A_I must be (n−k) × (n−k)".into()));
        }
        Ok(())
    }

    /// Matrix of the ambient form restricted to `C_A` in the basis `(e_a ; f_j) ↦ (e_a, A e_a ; f_j, A f_j)`.
    pub fn restricted_form(&self) -> Vec<Vec<BigRational>> {
        let k2 = 2 * self.k;
        let m = self.n - self.k;
        let mut out = zeros(k2 + m, k2 + m);
        let w0 = omega0(self.k);
        for a in 0..k2 {
            for b in 0..k2 {
                out[a][b] = w0[a][b].clone();
            }
        }
        for a in 0..k2 {
            for j in 0..m {
                out[a][k2 + j] = -self.a_h[j][a].clone();
                out[k2 + j][a] = self.a_h[j][a].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                out[k2 + i][k2 + j] = &self.a_i[i][j] - &self.a_i[j][i];
            }
        }
        out
    }

    pub fn restricted_rank(&self) -> usize {
        rank_q(&self.restricted_form())
    }
}

/// `A_I − A_Iᵀ + A_H ω₀^{-1} A_Hᵀ = 0`.
pub fn coisotropic_algebraic(c: &CoisotropicChart) -> Result<bool, MasterError> {
    c.check()?;
    let m = c.n - c.k;
    let k2 = 2 * c.k;
    let inv = invert_q(&omega0(c.k)).expect("standard form is invertible");
    for i in 0..m {
        for j in 0..m {
            let mut v = &c.a_i[i][j] - &c.a_i[j][i];
            for a in 0..k2 {
                for b in 0..k2 {
                    if !inv[a][b].is_zero() {
                        v += &c.a_h[i][a] * &inv[a][b] * &c.a_h[j][b];
                    }
                }
            }
            if !v.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `ω^{k+1}|_{C_A} = 0`, tested through every principal `(2k+2)`-Pfaffian of the restricted form.
pub fn coisotropic_power(c: &CoisotropicChart) -> Result<bool, MasterError> {
    c.check()?;
    let w = c.restricted_form();
    let d = w.len();
    let size = 2 * c.k + 2;
    if size > d {
        return Ok(true);
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !pfaffian_q(&w, &idx).is_zero() {
            return Ok(false);
        }
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            if idx[i] != i + d - size {
                break;
            }
            if i == 0 {
                return Ok(true);
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = rng.gen_range(1..=2);
    BigRational::new(n.into(), d.into())
}

/// Random chart; with probability ½ it is made coisotropic by solving for the skew part of `A_I`.
pub fn random_chart<R: Rng>(rng: &mut R, n: usize, k: usize) -> CoisotropicChart {
    let m = n - k;
    let a_h: Vec<Vec<BigRational>> = (0..m).map(|_| (0..2 * k).map(|_| small_rational(rng)).collect()).collect();
    let mut a_i: Vec<Vec<BigRational>> = (0..m).map(|_| (0..m).map(|_| small_rational(rng)).collect()).collect();
    if rng.gen_bool(0.5) {
        let inv = invert_q(&omega0(k)).expect("invertible");
        let mut kmat = zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut v = BigRational::zero();
                for a in 0..2 * k {
                    for b in 0..2 * k {
                        v += &a_h[i][a] * &inv[a][b] * &a_h[j][b];
                    }
                }
                kmat[i][j] = -v;
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let s = &(&a_i[i][j] + &a_i[j][i]) / q(2);
                a_i[i][j] = &s + &kmat[i][j];
                a_i[j][i] = s;
            }
        }
    }
    CoisotropicChart { n, k, a_h, a_i }
}

/// Every chart with entries in `{−1, 0, 1}` for the given `(n, k)`.
pub fn grid_charts(n: usize, k: usize) -> Vec<CoisotropicChart> {
    let m = n - k;
    let slots = m * 2 * k + m * m;
    let mut out = Vec::new();
    let total = 3usize.pow(slots as u32);
    for code in 0..total {
        let mut c = code;
        let mut vals = Vec::with_capacity(slots);
        for _ in 0..slots {
            vals.push(q((c % 3) as i64 - 1));
            c /= 3;
        }
        let mut it = vals.into_iter();
        let a_h = (0..m).map(|_| (0..2 * k).map(|_| it.next().unwrap_or_else(BigRational::one)).collect()).collect();
        let a_i = (0..m).map(|_| (0..m).map(|_| it.next().unwrap_or_else(BigRational::one)).collect()).collect();
        out.push(CoisotropicChart { n, k, a_h, a_i });
    }
    out
}

/// A section given as an ε-series `s = Σ_{j≥1} ε^j Γ_j` of leafwise 1-forms on the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionJet {
    /// `terms[j − 1] = Γ_j`.
    pub terms: Vec<DifferentialForm>,
}

impl SectionJet {
    pub fn new(terms: Vec<DifferentialForm>) -> Self {
        SectionJet { terms }
    }

    /// A single section, read as `ε¹`.
    pub fn single(s: DifferentialForm) -> Self {
        SectionJet { terms: vec![s] }
    }

    /// `Γ_j` (zero when beyond the stored terms).
    pub fn get(&self, j: usize, model: &Model) -> DifferentialForm {
        if j == 0 {
            return DifferentialForm::zero(model.shape(), 1);
        }
        self.terms.get(j - 1).cloned().unwrap_or_else(|| DifferentialForm::zero(model.shape(), 1))
    }

    /// The sum of all terms, i.e. the section at `ε = 1`.
    pub fn total(&self, model: &Model) -> DifferentialForm {
        self.terms.iter().fold(DifferentialForm::zero(model.shape(), 1), |a, b| &a + b)
    }
}

fn check_section(s: &DifferentialForm, m: &Model) -> Result<(), MasterError> {
    if s.shape() != m.shape() || s.degree() != 1 || !s.is_leafwise() {
        if s.is_zero() && s.shape() == m.shape() {
            return Ok(());
        }
        return Err(MasterError::BadSection);
    }
    Ok(())
}

/// `p_G^* s = s_α (dq^α − R_i^α dy^i)`.
pub fn horizontal_lift(s: &DifferentialForm, m: &Model) -> Result<DifferentialForm, MasterError> {
    check_section(s, m)?;
    let sh = m.shape();
    let pi = m.splitting_or_flat();
    let mut out = DifferentialForm::zero(sh, 1);
    for a in 0..sh.leaf {
        let c = s.component(&[sh.transverse + a]);
        if !c.is_zero() {
            out = &out + &leaf_coframe(&pi, a, sh).mul_scalar(&c);
        }
    }
    Ok(out)
}

/// `ω_G(s) = ω − d^b(p_G^* s)` for a single section.
pub fn graph_form(s: &DifferentialForm, m: &Model) -> Result<DifferentialForm, MasterError> {
    let lift = horizontal_lift(s, m)?;
    Ok(m.omega() - &lift.twisted_derivative(m.b())?)
}

/// The pullback of `ω_U` by the section `p = s`.
pub fn graph_form_by_pullback(s: &DifferentialForm, m: &Model) -> Result<DifferentialForm, MasterError> {
    check_section(s, m)?;
    let sh = m.shape();
    let w = build_omega_u(m, &m.splitting_or_flat())?;
    let vals: Vec<FourierScalar> = (0..sh.leaf).map(|a| s.component(&[sh.transverse + a])).collect();
    Ok(w.pullback_by_section(&vals)?)
}

pub(crate) fn series_mul(a: &[DifferentialForm], b: &[DifferentialForm], order: usize) -> Vec<DifferentialForm> {
    (0..=order)
        .map(|n| {
            let mut acc = a[0].wedge(&b[0]).scale_int(0);
            for i in 0..=n {
                acc = &acc + &a[i].wedge(&b[n - i]);
            }
            acc
        })
        .collect()
}

/// ε-coefficients `G_0 = ω`, `G_j = −d^b(p_G^* Γ_j)` of the graph form.
pub fn graph_form_series(jet: &SectionJet, m: &Model, order: usize) -> Result<Vec<DifferentialForm>, MasterError> {
    let mut out = vec![m.omega().clone()];
    for j in 1..=order {
        let lift = horizontal_lift(&jet.get(j, m), m)?;
        out.push(-&lift.twisted_derivative(m.b())?);
    }
    Ok(out)
}

/// ε-coefficients, orders `0..=order`, of `(ω_G(s))^{k+1}`.
pub fn graph_coisotropy_residual(jet: &SectionJet, m: &Model, order: usize) -> Result<Vec<DifferentialForm>, MasterError> {
    let g = graph_form_series(jet, m, order)?;
    let mut acc = g.clone();
    for _ in 0..m.rank_k() {
        acc = series_mul(&acc, &g, order);
    }
    Ok(acc)
}

/// ε-coefficients, orders `0..=order`, of the coordinate master equation
/// `(∇_β s_α) f_β^*∧f_α^* − ½ (∇_i s_α ω̃^{ij} ∇_j s_β) f_α^*∧f_β^*` with `ω̃_{ij} = ω_{ij} + s_β F_{ij}^β`,
/// the transverse block of `ω_U` along the graph.
///
/// `ω̃^{ij}` is the Neumann series `Σ_r (−ω^{-1}σ)^r ω^{-1}` in `σ_{ij} = s_β F_{ij}^β`.
pub fn coordinate_master_residual(jet: &SectionJet, ctx: &AlgebroidContext, order: usize) -> Result<Vec<DifferentialForm>, MasterError> {
    if order < 1 {
        return Err(MasterError::Order);
    }
    let m = ctx.model();
    let sh = m.shape();
    let t = sh.transverse;
    let curv = transverse_curvature(ctx.splitting());
    let winv = ctx.omega_inv();
    let gammas: Vec<DifferentialForm> = (0..=order).map(|j| jet.get(j, m)).collect();
    for g in &gammas {
        check_section(g, m)?;
    }
    // σ_j per order, as t×t matrices
    let sigma: Vec<Vec<Vec<FourierScalar>>> = gammas
        .iter()
        .map(|g| {
            (0..t)
                .map(|i| {
                    (0..t)
                        .map(|j| {
                            let mut acc = FourierScalar::zero(sh);
                            for b in 0..sh.leaf {
                                let c = g.component(&[t + b]);
                                if !c.is_zero() {
                                    acc += &(&c * &curv.f(i, j, b));
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let zero_mat = vec![vec![FourierScalar::zero(sh); t]; t];
    let matmul = |a: &Vec<Vec<FourierScalar>>, b: &Vec<Vec<FourierScalar>>| -> Vec<Vec<FourierScalar>> {
        (0..t)
            .map(|i| {
                (0..t)
                    .map(|j| {
                        let mut acc = FourierScalar::zero(sh);
                        for l in 0..t {
                            if !a[i][l].is_zero() && !b[l][j].is_zero() {
                                acc += &(&a[i][l] * &b[l][j]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    // X = −ω^{-1}σ as a series; ω̃^{-1} = Σ_r X^r ω^{-1}
    let x: Vec<Vec<Vec<FourierScalar>>> =
        sigma.iter().map(|s| matmul(winv, s).into_iter().map(|row| row.into_iter().map(|f| f.scale_int(-1)).collect()).collect()).collect();
    let mut inv_series: Vec<Vec<Vec<FourierScalar>>> = vec![zero_mat.clone(); order + 1];
    inv_series[0] = winv.clone();
    let mut power: Vec<Vec<Vec<FourierScalar>>> = vec![zero_mat.clone(); order + 1];
    power[0] = winv.clone();
    for _ in 1..=order {
        let mut next = vec![zero_mat.clone(); order + 1];
        for (a, xa) in x.iter().enumerate() {
            for (b, pb) in power.iter().enumerate() {
                if a + b > order {
                    continue;
                }
                let prod = matmul(xa, pb);
                for i in 0..t {
                    for j in 0..t {
                        next[a + b][i][j] += &prod[i][j];
                    }
                }
            }
        }
        power = next;
        for (n, pn) in power.iter().enumerate() {
            for i in 0..t {
                for j in 0..t {
                    inv_series[n][i][j] += &pn[i][j];
                }
            }
        }
    }
    let cds = gammas.iter().map(|g| covariant_derivative(g, ctx)).collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<DifferentialForm> = (0..=order).map(|_| DifferentialForm::zero(sh, 2)).collect();
    for (n, g) in gammas.iter().enumerate() {
        out[n] = g.leafwise_twisted_derivative(ctx.bbar())?;
    }
    for a in 1..=order {
        for b in 1..=order - a {
            for c in 0..=order - a - b {
                for i in 0..t {
                    for j in 0..t {
                        let w = &inv_series[c][i][j];
                        if w.is_zero() {
                            continue;
                        }
                        let term = cds[a].transverse[i].wedge(&cds[b].transverse[j]).mul_scalar(w);
                        out[a + b + c] = &out[a + b + c] - &term.map_coeffs(|f| f.scale_ratio(1, 2));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Index of the first nonzero ε-coefficient, if any.
pub fn first_nonzero_order(series: &[DifferentialForm]) -> Option<usize> {
    series.iter().position(|f| !f.is_zero())
}

/// `d_F^{b̄} α` together with the unreduced `ω^k ∧ d^b(p_G^* α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedOperator {
    pub reduced: DifferentialForm,
    pub unreduced: DifferentialForm,
}

pub fn linearized_operator(alpha: &DifferentialForm, ctx: &AlgebroidContext) -> Result<LinearizedOperator, MasterError> {
    let m = ctx.model();
    let reduced = alpha.leafwise_twisted_derivative(ctx.bbar())?;
    let lift = horizontal_lift(alpha, m)?;
    let wk = m.omega().form_power(m.rank_k() as u32)?;
    let unreduced = wk.wedge(&lift.twisted_derivative(m.b())?);
    Ok(LinearizedOperator { reduced, unreduced })
}
