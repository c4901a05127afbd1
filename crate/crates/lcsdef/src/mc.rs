//! Formal Maurer–Cartan solver: order-by-order recursion, mode-wise leafwise
//! solves, the Kuranishi map and leafwise twisted cohomology counts.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::forms::{bits, DifferentialForm, FormError};
use crate::linalg::{pfaffian, rank_pi};
use crate::linfty::{m, AlgebroidContext, LinftyError};
use crate::master::{graph_coisotropy_residual, MasterError, SectionJet};
use crate::ring::{FourierScalar, Gq, PiPolynomial, Shape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error("Γ₁ is not d_F^b-closed")]
    NotClosed,
    #[error("right-hand side is not d_F^b-closed (upstream inconsistency)")]
    RhsNotClosed,
    #[error("only constant leafwise Lee forms are supported")]
    NonConstantLee,
    #[error("mode operator at leaf frequency {0:?} is not invertible in the coefficient ring")]
    ModeNotInvertible(Vec<i32>),
    #[error("transverse Pfaffian of ω is not a nonzero constant")]
    TransverseOmega,
    #[error("order must be at least 1")]
    Order,
    #[error("expected a leafwise form on the base")]
    NotLeafForm,
}

/// `Γ = Σ_{k≥1} ε^k Γ_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    /// `terms[k − 1] = Γ_k`.
    pub terms: Vec<DifferentialForm>,
}

impl FormalSeries {
    pub fn new(terms: Vec<DifferentialForm>) -> Self {
        FormalSeries { terms }
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn get(&self, k: usize, sh: Shape) -> DifferentialForm {
        if k == 0 {
            return DifferentialForm::zero(sh, 1);
        }
        self.terms.get(k - 1).cloned().unwrap_or_else(|| DifferentialForm::zero(sh, 1))
    }

    pub fn jet(&self) -> SectionJet {
        SectionJet::new(self.terms.clone())
    }
}

/// A failed order together with the part of the equation that cannot be met.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCertificate {
    pub order: usize,
    /// The right-hand side that has to be `d_F^{b̄}`-exact.
    pub residual: DifferentialForm,
    /// Its components in the modes where the leafwise operator vanishes.
    pub harmonic_witness: DifferentialForm,
    /// Leaf frequencies of the offending modes.
    pub modes: Vec<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologySolveResult {
    Solved(DifferentialForm),
    Obstructed(ObstructionCertificate),
}

impl CohomologySolveResult {
    pub fn is_solved(&self) -> bool {
        matches!(self, CohomologySolveResult::Solved(_))
    }
}

/// Constant components `b̄_β` of a leafwise Lee form.
pub fn constant_lee(bbar: &DifferentialForm) -> Result<Vec<PiPolynomial>, McError> {
    let sh = bbar.shape();
    let t = sh.transverse;
    (0..sh.leaf)
        .map(|beta| {
            let c = bbar.component(&[t + beta]);
            if c.is_zero() {
                Ok(PiPolynomial::zero())
            } else {
                c.as_constant().ok_or(McError::NonConstantLee)
            }
        })
        .collect()
}

/// `v_β = 2πi k_β + b̄_β` for a leaf frequency vector.
pub fn mode_covector(k: &[i32], lee: &[PiPolynomial]) -> Vec<PiPolynomial> {
    k.iter().zip(lee).map(|(&kb, b)| &PiPolynomial::two_pi_i(kb as i64) + b).collect()
}

/// Solves `d_F^{b̄} x = rhs` mode by mode; `rhs` must be closed.
pub fn leafwise_solve(rhs: &DifferentialForm, bbar: &DifferentialForm) -> Result<CohomologySolveResult, McError> {
    let sh = rhs.shape();
    if !rhs.is_leafwise() || sh.fiber != 0 {
        return Err(McError::NotLeafForm);
    }
    let lee = constant_lee(bbar)?;
    if !rhs.leafwise_twisted_derivative(bbar)?.is_zero() {
        return Err(McError::RhsNotClosed);
    }
    let t = sh.transverse;
    let lr = sh.leaf_range();
    let deg = rhs.degree();
    let mut sol = DifferentialForm::zero(sh, deg.saturating_sub(1));
    let mut witness = DifferentialForm::zero(sh, deg);
    let mut bad: Vec<Vec<i32>> = Vec::new();
    // mode key → rhs restricted to that full frequency
    let mut by_mode: BTreeMap<Vec<i32>, DifferentialForm> = BTreeMap::new();
    for (mask, f) in rhs.terms() {
        for (key, part) in f.modes() {
            let e = by_mode.entry(key).or_insert_with(|| DifferentialForm::zero(sh, deg));
            e.add_term(*mask, &part);
        }
    }
    for (key, r) in by_mode {
        let kq = key[lr.clone()].to_vec();
        let v = mode_covector(&kq, &lee);
        if v.iter().all(PiPolynomial::is_zero) {
            witness = &witness + &r;
            if !bad.contains(&kq) {
                bad.push(kq);
            }
            continue;
        }
        let Some((beta, inv)) = v.iter().enumerate().find_map(|(b, x)| x.inv().map(|i| (b, i))) else {
            return Err(McError::ModeNotInvertible(kq));
        };
        sol = &sol + &r.contract_coord(t + beta).scale(&inv);
    }
    if !witness.is_zero() {
        return Ok(CohomologySolveResult::Obstructed(ObstructionCertificate { order: 0, residual: rhs.clone(), harmonic_witness: witness, modes: bad }));
    }
    debug_assert_eq!(sol.leafwise_twisted_derivative(bbar)?, *rhs);
    Ok(CohomologySolveResult::Solved(sol))
}

/// Re-checks a certificate: the residual is closed, and in every listed mode the
/// system `v ∧ x = r_k` is inconsistent by a rank comparison.
pub fn verify_certificate(cert: &ObstructionCertificate, bbar: &DifferentialForm) -> Result<bool, McError> {
    if cert.harmonic_witness.is_zero() || !cert.residual.leafwise_twisted_derivative(bbar)?.is_zero() {
        return Ok(false);
    }
    let lee = constant_lee(bbar)?;
    let sh = cert.residual.shape();
    let (t, m) = (sh.transverse, sh.leaf);
    let deg = cert.residual.degree();
    let dst = masks_of_degree(m, deg);
    for kq in &cert.modes {
        let v = mode_covector(kq, &lee);
        let a = if deg == 0 { vec![vec![]; dst.len()] } else { wedge_matrix(&v, deg - 1) };
        // right-hand side in this leaf mode, one column per transverse frequency pattern
        let mut cols: BTreeMap<Vec<i32>, Vec<PiPolynomial>> = BTreeMap::new();
        for (mask, f) in cert.residual.terms() {
            let leaf_mask = mask >> t;
            let r = dst.iter().position(|&x| x == leaf_mask).expect("leafwise mask");
            for (key, c) in f.terms() {
                if key[sh.leaf_range()] != kq[..] {
                    continue;
                }
                let col = cols.entry(key.to_vec()).or_insert_with(|| vec![PiPolynomial::zero(); dst.len()]);
                col[r] = &col[r] + c;
            }
        }
        let base = rank_pi(&a);
        let inconsistent = cols.values().any(|col| {
            let aug: Vec<Vec<PiPolynomial>> = a.iter().zip(col).map(|(row, c)| {
                let mut row = row.clone();
                row.push(c.clone());
                row
            }).collect();
            rank_pi(&aug) > base
        });
        if !inconsistent {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `1/(k!·Pf ω)`, which must be a constant.
fn contraction_factor(ctx: &AlgebroidContext) -> Result<PiPolynomial, McError> {
    let mdl = ctx.model();
    let pf = pfaffian(&mdl.transverse_matrix(), mdl.shape());
    let pf = pf.as_constant().ok_or(McError::TransverseOmega)?;
    let kf = (1..=mdl.rank_k() as i64).product::<i64>();
    pf.scale(&Gq::int(kf)).inv().ok_or(McError::TransverseOmega)
}

/// `P_ω`-contraction: the leaf form φ with `T = dy¹∧…∧dy^{2k}∧φ + (terms missing some dy)`, divided by `k!·Pf ω`.
pub fn p_omega_contract(t_form: &DifferentialForm, ctx: &AlgebroidContext) -> Result<DifferentialForm, McError> {
    let sh = ctx.shape();
    let t = sh.transverse;
    let full: u32 = (1u32 << t) - 1;
    let factor = contraction_factor(ctx)?;
    let deg = t_form.degree().saturating_sub(t);
    let mut out = DifferentialForm::zero(sh, deg);
    for (mask, f) in t_form.terms() {
        if mask & full == full {
            out.add_term(mask & !full, &f.scale(&factor));
        }
    }
    Ok(out)
}

/// Known part of the order-`N` equation, normalised as `−d_F^{b̄} Γ_N = rhs`.
///
/// With `T_N` the `ε^N` coefficient of `(ω − d^b p_G^*Γ_{<N})^{k+1}`, `rhs = −P_ω(T_N)/(k+1)`.
pub fn mc_rhs(order: usize, gammas: &FormalSeries, ctx: &AlgebroidContext) -> Result<DifferentialForm, McError> {
    if order < 1 {
        return Err(McError::Order);
    }
    let sh = ctx.shape();
    let g1 = gammas.get(1, sh);
    if !g1.leafwise_twisted_derivative(ctx.bbar())?.is_zero() {
        return Err(McError::NotClosed);
    }
    let lower: Vec<DifferentialForm> = (1..order).map(|k| gammas.get(k, sh)).collect();
    let res = graph_coisotropy_residual(&SectionJet::new(lower), ctx.model(), order)?;
    let k1 = ctx.model().rank_k() as i64 + 1;
    Ok(p_omega_contract(&res[order], ctx)?.map_coeffs(|f| f.scale_ratio(-1, k1)))
}

/// `ε^n` coefficient of `Σ_ℓ (1/ℓ!) m_ℓ(Γ, …, Γ)`.
pub fn mc_residual_order(n: usize, gammas: &FormalSeries, ctx: &AlgebroidContext) -> Result<DifferentialForm, McError> {
    let sh = ctx.shape();
    let mut acc = DifferentialForm::zero(sh, 2);
    for l in 1..=n {
        let fact: i64 = (1..=l as i64).product();
        for comp in compositions(n, l) {
            let args: Vec<DifferentialForm> = comp.iter().map(|&i| gammas.get(i, sh)).collect();
            if args.iter().any(DifferentialForm::is_zero) {
                continue;
            }
            let v = m(&args, ctx)?;
            acc = &acc + &v.map_coeffs(|f| f.scale_ratio(1, fact));
        }
    }
    Ok(acc)
}

/// Ordered compositions of `n` into `l` positive parts.
pub fn compositions(n: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(l - 1) {
        for mut rest in compositions(n - first, l - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The Kuranishi value `m₂(Γ₁, Γ₁)`, its half, and the class decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuranishiReport {
    pub m2: DifferentialForm,
    pub half_m2: DifferentialForm,
    pub class: CohomologySolveResult,
}

impl KuranishiReport {
    pub fn class_vanishes(&self) -> bool {
        self.class.is_solved()
    }
}

pub fn kuranishi(gamma1: &DifferentialForm, ctx: &AlgebroidContext) -> Result<KuranishiReport, McError> {
    if !gamma1.leafwise_twisted_derivative(ctx.bbar())?.is_zero() {
        return Err(McError::NotClosed);
    }
    let m2v = crate::linfty::m2(gamma1, gamma1, ctx)?;
    let half = m2v.scale(&PiPolynomial::ratio(1, 2));
    let class = leafwise_solve(&half, ctx.bbar())?;
    Ok(KuranishiReport { m2: m2v, half_m2: half, class })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McOutcome {
    /// A series solving every order up to the request, with the independent residual check.
    Solved { series: FormalSeries, residuals_vanish: bool },
    Obstructed { series: FormalSeries, certificate: ObstructionCertificate },
}

/// Iterates [`mc_rhs`] and [`leafwise_solve`] for orders `2..=max_order`.
pub fn mc_solve(gamma1: &DifferentialForm, max_order: usize, ctx: &AlgebroidContext) -> Result<McOutcome, McError> {
    if max_order < 1 {
        return Err(McError::Order);
    }
    if !gamma1.leafwise_twisted_derivative(ctx.bbar())?.is_zero() {
        return Err(McError::NotClosed);
    }
    let mut series = FormalSeries::new(vec![gamma1.clone()]);
    for n in 2..=max_order {
        let rhs = mc_rhs(n, &series, ctx)?;
        match leafwise_solve(&-&rhs, ctx.bbar())? {
            CohomologySolveResult::Solved(g) => series.terms.push(g),
            CohomologySolveResult::Obstructed(mut c) => {
                c.order = n;
                c.residual = rhs;
                c.harmonic_witness = -&c.harmonic_witness;
                return Ok(McOutcome::Obstructed { series, certificate: c });
            }
        }
    }
    let mut ok = true;
    for n in 1..=max_order {
        if !mc_residual_order(n, &series, ctx)?.is_zero() {
            ok = false;
        }
    }
    Ok(McOutcome::Solved { series, residuals_vanish: ok })
}

/// `Γ₁ + d_F^{b̄} f`.
pub fn gauge_shift(gamma1: &DifferentialForm, f: &FourierScalar, bbar: &DifferentialForm) -> Result<DifferentialForm, McError> {
    Ok(gamma1 + &DifferentialForm::scalar(f.clone()).leafwise_twisted_derivative(bbar)?)
}

fn masks_of_degree(m: usize, d: usize) -> Vec<u32> {
    (0u32..(1 << m)).filter(|x| x.count_ones() as usize == d).collect()
}

/// Matrix of `x ↦ v ∧ x` from `Λ^d` to `Λ^{d+1}` of `ℝ^m` (rows: target basis).
pub fn wedge_matrix(v: &[PiPolynomial], d: usize) -> Vec<Vec<PiPolynomial>> {
    let m = v.len();
    let src = masks_of_degree(m, d);
    let dst = masks_of_degree(m, d + 1);
    let mut out = vec![vec![PiPolynomial::zero(); src.len()]; dst.len()];
    for (c, &s) in src.iter().enumerate() {
        for (beta, vb) in v.iter().enumerate() {
            if vb.is_zero() || s & (1 << beta) != 0 {
                continue;
            }
            let sign = crate::forms::wedge_sign(1 << beta, s);
            let r = dst.iter().position(|&x| x == s | (1 << beta)).expect("target mask");
            out[r][c] = &out[r][c] + &vb.scale(&Gq::int(sign));
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Leaf frequency vectors with all entries in `[−trunc, trunc]`.
pub fn frequency_box(m: usize, trunc: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for v in &out {
            for k in -trunc..=trunc {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// `dim H^j` of `(Ω(T^m), d + b̄∧)` over the truncated Fourier space, summed mode by mode.
pub fn leaf_cohomology_dims(lee: &[PiPolynomial], trunc: i32) -> Vec<usize> {
    let m = lee.len();
    let mut dims = vec![0usize; m + 1];
    for k in frequency_box(m, trunc) {
        let v = mode_covector(&k, lee);
        for (j, dim) in dims.iter_mut().enumerate() {
            let rank_out = if j < m { rank_pi(&wedge_matrix(&v, j)) } else { 0 };
            let rank_in = if j > 0 { rank_pi(&wedge_matrix(&v, j - 1)) } else { 0 };
            *dim += binomial(m, j) - rank_out - rank_in;
        }
    }
    dims
}

/// The same dimensions by assembling the full truncated differential from actual form operations.
pub fn leaf_cohomology_dims_brute(lee: &[PiPolynomial], trunc: i32) -> Vec<usize> {
    let m = lee.len();
    let sh = Shape::new(0, m, 0);
    let mut bbar = DifferentialForm::zero(sh, 1);
    for (b, c) in lee.iter().enumerate() {
        bbar = &bbar + &DifferentialForm::covector(sh, b).scale(c);
    }
    let freqs = frequency_box(m, trunc);
    let basis = |d: usize| -> Vec<(Vec<i32>, u32)> {
        let mut v = Vec::new();
        for f in &freqs {
            for mk in masks_of_degree(m, d) {
                v.push((f.clone(), mk));
            }
        }
        v
    };
    let matrix = |d: usize| -> Vec<Vec<PiPolynomial>> {
        let src = basis(d);
        let dst = basis(d + 1);
        let mut out = vec![vec![PiPolynomial::zero(); src.len()]; dst.len()];
        for (c, (f, mk)) in src.iter().enumerate() {
            let e = DifferentialForm::monomial(*mk, FourierScalar::exp_mode(sh, f));
            let de = &e.leafwise_derivative() + &bbar.wedge(&e);
            for (tm, coef) in de.terms() {
                for (key, val) in coef.terms() {
                    if let Some(r) = dst.iter().position(|(f2, m2)| f2.as_slice() == key.as_slice() && m2 == tm) {
                        out[r][c] = val.clone();
                    }
                }
            }
        }
        out
    };
    let ranks: Vec<usize> = (0..m).map(|d| rank_pi(&matrix(d))).collect();
    (0..=m)
        .map(|j| {
            let n = freqs.len() * binomial(m, j);
            let out = if j < m { ranks[j] } else { 0 };
            let inn = if j > 0 { ranks[j - 1] } else { 0 };
            n - out - inn
        })
        .collect()
}

/// Mask list helper for reports.
pub fn leaf_indices(mask: u32) -> Vec<usize> {
    bits(mask).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::ScalarSpec;
    use crate::models;
    use crate::syntax::parse_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zambon_is_obstructed_at_order_two() {
        let mdl = models::zambon();
        let ctx = AlgebroidContext::new(&mdl).unwrap();
        let g = models::zambon_gamma1(mdl.shape());
        let r = mdl.roster().clone();
        let rhs = mc_rhs(2, &FormalSeries::new(vec![g.clone()]), &ctx).unwrap();
        assert_eq!(rhs, parse_form("4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)*dq1^dq2", &r).unwrap());
        match mc_solve(&g, 3, &ctx).unwrap() {
            McOutcome::Obstructed { certificate, .. } => {
                assert_eq!(certificate.order, 2);
                assert_eq!(certificate.harmonic_witness, rhs);
                assert!(verify_certificate(&certificate, ctx.bbar()).unwrap());
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
        let kr = kuranishi(&g, &ctx).unwrap();
        assert!(!kr.class_vanishes());
        assert_eq!(kr.half_m2, -&rhs);
    }

    #[test]
    fn solver_examples() {
        let sh = Shape::new(0, 2, 0);
        let zero = DifferentialForm::zero(sh, 1);
        let r = crate::ring::CoordinateRoster::standard(0, 2, false);
        let exact = parse_form("2*pi*cos(2*pi*q1)*dq1", &r).unwrap();
        match leafwise_solve(&exact, &zero).unwrap() {
            CohomologySolveResult::Solved(x) => assert_eq!(x.leafwise_derivative(), exact),
            _ => panic!(),
        }
        let harmonic = parse_form("dq1", &r).unwrap();
        assert!(!leafwise_solve(&harmonic, &zero).unwrap().is_solved());
        let tw = models::twisted_leaf(2, 1, 2);
        let b = tw.leaf_lee_form();
        let closed = harmonic.leafwise_twisted_derivative(&b).unwrap();
        assert!(leafwise_solve(&closed, &b).unwrap().is_solved());
    }

    #[test]
    fn twisted_leaves_solve_to_order_four() {
        let mdl = models::twisted_leaf(2, 1, 3);
        let ctx = AlgebroidContext::new(&mdl).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = ScalarSpec::new(0b11).terms(2);
        for _ in 0..3 {
            let f = crate::gen::random_scalar(&mut rng, mdl.shape(), spec);
            let g = DifferentialForm::scalar(f).leafwise_twisted_derivative(ctx.bbar()).unwrap();
            match mc_solve(&g, 4, &ctx).unwrap() {
                McOutcome::Solved { residuals_vanish, .. } => assert!(residuals_vanish),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn cohomology_counts() {
        for m in 1..=3usize {
            let zero = vec![PiPolynomial::zero(); m];
            let expect: Vec<usize> = (0..=m).map(|j| binomial(m, j)).collect();
            assert_eq!(leaf_cohomology_dims(&zero, 1), expect);
            let mut lee = zero.clone();
            lee[0] = PiPolynomial::int(2).shift(1);
            assert!(leaf_cohomology_dims(&lee, 1).iter().all(|&d| d == 0));
        }
        assert_eq!(leaf_cohomology_dims_brute(&vec![PiPolynomial::zero(); 2], 1), vec![1, 2, 1]);
    }
}
