//! The canonical thickening `(θ_G, ω_U)` and the splitting calculus on the leaf space.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::forms::{bits, range_mask, wedge_sign, DifferentialForm, VectorField};
use crate::lcps::{Model, ModelError};
use crate::ring::{FourierScalar, PiPolynomial, Shape};

/// Splitting data `R_i^α`: the horizontal lifts are `Y_i = ∂_{y^i} + R_i^α ∂_{q^α}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Splitting {
    shape: Shape,
    r: Vec<Vec<FourierScalar>>,
}

impl Splitting {
    pub fn flat(shape: Shape) -> Self {
        let shape = shape.base();
        Splitting { shape, r: vec![vec![FourierScalar::zero(shape); shape.leaf]; shape.transverse] }
    }

    /// `r[i][α]`; every entry must be a fiberless scalar on the base shape.
    pub fn new(shape: Shape, r: Vec<Vec<FourierScalar>>) -> Result<Self, ModelError> {
        let shape = shape.base();
        if r.len() != shape.transverse || r.iter().any(|row| row.len() != shape.leaf || row.iter().any(|f| f.shape() != shape)) {
            return Err(ModelError::SplittingShape);
        }
        Ok(Splitting { shape, r })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn r(&self, i: usize, alpha: usize) -> &FourierScalar {
        &self.r[i][alpha]
    }

    pub fn entries(&self) -> &Vec<Vec<FourierScalar>> {
        &self.r
    }

    pub fn is_flat(&self) -> bool {
        self.r.iter().flatten().all(FourierScalar::is_zero)
    }

    /// The basic field `Y_i`.
    pub fn basic_field(&self, i: usize) -> VectorField {
        let mut v = VectorField::coord(self.shape, i);
        for (a, f) in self.r[i].iter().enumerate() {
            v.set(self.shape.transverse + a, f.clone());
        }
        v
    }

    /// `B = R − R₀` as a normal-valued 1-form.
    pub fn difference(&self, base: &Splitting) -> NormalValuedForm {
        let mut out = NormalValuedForm::zero(self.shape, 1);
        for i in 0..self.shape.transverse {
            for a in 0..self.shape.leaf {
                out.add_term(1 << i, a, &(&self.r[i][a] - &base.r[i][a]));
            }
        }
        out
    }
}

/// `Σ B_I^β dy^I ⊗ ∂_{q^β}` with `I` increasing over transverse indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalValuedForm {
    shape: Shape,
    degree: usize,
    terms: BTreeMap<(u32, usize), FourierScalar>,
}

impl NormalValuedForm {
    pub fn zero(shape: Shape, degree: usize) -> Self {
        NormalValuedForm { shape, degree, terms: BTreeMap::new() }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(u32, usize), FourierScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: u32, beta: usize, f: &FourierScalar) {
        assert_eq!(mask.count_ones() as usize, self.degree);
        assert!(mask >> self.shape.transverse == 0, "dy index out of range");
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry((mask, beta)).or_insert_with(|| FourierScalar::zero(self.shape));
        *e += f;
        if e.is_zero() {
            self.terms.remove(&(mask, beta));
        }
    }

    pub fn get(&self, mask: u32, beta: usize) -> FourierScalar {
        self.terms.get(&(mask, beta)).cloned().unwrap_or_else(|| FourierScalar::zero(self.shape))
    }

    /// Component `B(∂_{i₁},…,∂_{i_ℓ})^β` for an arbitrary index sequence.
    pub fn eval(&self, idx: &[usize], beta: usize) -> FourierScalar {
        let mut mask = 0u32;
        let mut sign = 1;
        for &c in idx {
            let s = wedge_sign(mask, 1 << c);
            if s == 0 {
                return FourierScalar::zero(self.shape);
            }
            sign *= s;
            mask |= 1 << c;
        }
        self.get(mask, beta).scale_int(sign)
    }

    /// The vertical vector field `B_I`.
    pub fn vector(&self, mask: u32) -> VectorField {
        let mut v = VectorField::zero(self.shape);
        for b in 0..self.shape.leaf {
            v.set(self.shape.transverse + b, self.get(mask, b));
        }
        v
    }

    fn from_vectors(shape: Shape, degree: usize, parts: impl IntoIterator<Item = (u32, i64, VectorField)>) -> Self {
        let mut out = Self::zero(shape, degree);
        for (mask, sign, v) in parts {
            for b in 0..shape.leaf {
                out.add_term(mask, b, &v.component(shape.transverse + b).scale_int(sign));
            }
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let mut out = Self::zero(self.shape, self.degree);
        for ((m, b), f) in &self.terms {
            out.add_term(*m, *b, &f.scale_int(n));
        }
        out
    }

    pub fn scale(&self, c: &PiPolynomial) -> Self {
        let mut out = Self::zero(self.shape, self.degree);
        for ((m, b), f) in &self.terms {
            out.add_term(*m, *b, &f.scale(c));
        }
        out
    }
}

impl Add for &NormalValuedForm {
    type Output = NormalValuedForm;
    fn add(self, o: &NormalValuedForm) -> NormalValuedForm {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "normal-valued form degree mismatch");
        let mut out = self.clone();
        for ((m, b), f) in &o.terms {
            out.add_term(*m, *b, f);
        }
        out
    }
}

impl Neg for &NormalValuedForm {
    type Output = NormalValuedForm;
    fn neg(self) -> NormalValuedForm {
        self.scale_int(-1)
    }
}

impl Sub for &NormalValuedForm {
    type Output = NormalValuedForm;
    fn sub(self, o: &NormalValuedForm) -> NormalValuedForm {
        self + &(-o)
    }
}

/// Transverse curvature `F = Σ_{i<j} F_{ij}^β dy^i∧dy^j ⊗ ∂_{q^β}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransverseCurvature(pub NormalValuedForm);

impl TransverseCurvature {
    /// `F_{ij}^β`, antisymmetric in `(i, j)`.
    pub fn f(&self, i: usize, j: usize, beta: usize) -> FourierScalar {
        self.0.eval(&[i, j], beta)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// `F_{ij}^β = Y_i R_j^β − Y_j R_i^β`.
pub fn transverse_curvature(pi: &Splitting) -> TransverseCurvature {
    let sh = pi.shape;
    let mut out = NormalValuedForm::zero(sh, 2);
    for i in 0..sh.transverse {
        let yi = pi.basic_field(i);
        for j in i + 1..sh.transverse {
            let yj = pi.basic_field(j);
            for b in 0..sh.leaf {
                let v = &yi.apply(&pi.r[j][b]) - &yj.apply(&pi.r[i][b]);
                out.add_term((1 << i) | (1 << j), b, &v);
            }
        }
    }
    TransverseCurvature(out)
}

/// Curvature from the bracket of basic fields, `F(∂_i, ∂_j) = Π([Y_i, Y_j])`.
pub fn curvature_by_bracket(pi: &Splitting) -> TransverseCurvature {
    let sh = pi.shape;
    let mut out = NormalValuedForm::zero(sh, 2);
    for i in 0..sh.transverse {
        for j in i + 1..sh.transverse {
            let br = pi.basic_field(i).bracket(&pi.basic_field(j));
            // horizontal part of [Y_i, Y_j] is zero, so the projection keeps every ∂_q component
            for b in 0..sh.leaf {
                out.add_term((1 << i) | (1 << j), b, &br.component(sh.transverse + b));
            }
        }
    }
    TransverseCurvature(out)
}

/// Curvature of basic lifts rescaled by functions, for the tensoriality check:
/// returns `Π([f·Y_i + (horizontal correction), g·Y_j + …])` evaluated on `(f∂_i, g∂_j)`.
pub fn curvature_rescaled(pi: &Splitting, i: usize, j: usize, f: &FourierScalar, g: &FourierScalar) -> Vec<FourierScalar> {
    let sh = pi.shape;
    let x = pi.basic_field(i).scale(f);
    let y = pi.basic_field(j).scale(g);
    let br = x.bracket(&y);
    // project along G: subtract the horizontal lift of the transverse part
    let mut vert = br.clone();
    for a in 0..sh.transverse {
        let ca = br.component(a);
        if ca.is_zero() {
            continue;
        }
        let lift = pi.basic_field(a).scale(&ca);
        vert = &vert + &lift.scale(&FourierScalar::int(sh, -1));
    }
    (0..sh.leaf).map(|b| vert.component(sh.transverse + b)).collect()
}

/// `(L_X B)^α = X(B^α) − B(X^α)` for each coefficient vector of `B`.
pub fn pi_lie_derivative(b: &NormalValuedForm, x: &VectorField) -> NormalValuedForm {
    let masks: Vec<u32> = b.terms.keys().map(|(m, _)| *m).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    NormalValuedForm::from_vectors(b.shape, b.degree, masks.into_iter().map(|m| (m, 1, x.bracket(&b.vector(m)))))
}

/// `d^Π B = Σ_j dy^j ∧ L_{Y_j} B`.
pub fn pi_differential(b: &NormalValuedForm, pi: &Splitting) -> NormalValuedForm {
    let sh = b.shape;
    let mut out = NormalValuedForm::zero(sh, b.degree + 1);
    for j in 0..sh.transverse {
        let l = pi_lie_derivative(b, &pi.basic_field(j));
        for ((m, beta), f) in &l.terms {
            let s = wedge_sign(1 << j, *m);
            if s != 0 {
                out.add_term(m | (1 << j), *beta, &f.scale_int(s));
            }
        }
    }
    out
}

/// `[B, C]_Π = Σ_{I,J} [B_I, C_J] dy^I ∧ dy^J` with the vertical Lie bracket.
pub fn pi_bracket(b: &NormalValuedForm, c: &NormalValuedForm) -> NormalValuedForm {
    let sh = b.shape;
    let bm: std::collections::BTreeSet<u32> = b.terms.keys().map(|(m, _)| *m).collect();
    let cm: std::collections::BTreeSet<u32> = c.terms.keys().map(|(m, _)| *m).collect();
    let mut parts = Vec::new();
    for &i in &bm {
        for &j in &cm {
            let s = wedge_sign(i, j);
            if s != 0 {
                parts.push((i | j, s, b.vector(i).bracket(&c.vector(j))));
            }
        }
    }
    NormalValuedForm::from_vectors(sh, b.degree + c.degree, parts)
}

/// The bracket evaluated by the permutation definition on `(∂_{a₁},…,∂_{a_n})`:
/// `Σ_{σ∈S_n} sign(σ)/(ℓ₁!ℓ₂!) [B(∂_{a_σ…}), C(∂_{a_σ…})]`.
pub fn pi_bracket_by_permutations(b: &NormalValuedForm, c: &NormalValuedForm, args: &[usize]) -> Vec<FourierScalar> {
    let sh = b.shape;
    let (l1, l2) = (b.degree, c.degree);
    let n = l1 + l2;
    assert_eq!(args.len(), n);
    let mut acc: Vec<FourierScalar> = vec![FourierScalar::zero(sh); sh.leaf];
    for (perm, sign) in permutations(n) {
        let ia: Vec<usize> = perm[..l1].iter().map(|&p| args[p]).collect();
        let ja: Vec<usize> = perm[l1..].iter().map(|&p| args[p]).collect();
        let mut bv = VectorField::zero(sh);
        let mut cv = VectorField::zero(sh);
        for beta in 0..sh.leaf {
            bv.set(sh.transverse + beta, b.eval(&ia, beta));
            cv.set(sh.transverse + beta, c.eval(&ja, beta));
        }
        let br = bv.bracket(&cv);
        for beta in 0..sh.leaf {
            acc[beta] += &br.component(sh.transverse + beta).scale_int(sign);
        }
    }
    let norm = PiPolynomial::ratio(1, (factorial(l1) * factorial(l2)) as i64);
    acc.into_iter().map(|f| f.scale(&norm)).collect()
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if k == p.len() {
            out.push((p.clone(), sign));
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, if i == k { sign } else { -sign }, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, 1, &mut out);
    out
}

/// Thickened shape for a model (identity if the model already carries fibers).
pub fn thickened_shape(m: &Model) -> Shape {
    m.shape().thickened()
}

fn fiber_var(sh: Shape, beta: usize) -> FourierScalar {
    FourierScalar::fiber_var(sh, sh.torus() + beta)
}

/// `f_β^* = dq^β − R_i^β dy^i` on the thickened shape.
pub fn leaf_coframe(pi: &Splitting, beta: usize, sh: Shape) -> DifferentialForm {
    let mut f = DifferentialForm::covector(sh, sh.transverse + beta);
    for i in 0..sh.transverse {
        f = &f - &DifferentialForm::monomial(1 << i, pi.r[i][beta].embed(sh));
    }
    f
}

/// `θ_G = p_β (dq^β − R_i^β dy^i)`.
pub fn build_theta_g(m: &Model, pi: &Splitting) -> Result<DifferentialForm, ModelError> {
    if pi.shape != m.shape().base() {
        return Err(ModelError::SplittingShape);
    }
    let sh = thickened_shape(m);
    let mut theta = DifferentialForm::zero(sh, 1);
    for beta in 0..sh.leaf {
        theta = &theta + &leaf_coframe(pi, beta, sh).mul_scalar(&fiber_var(sh, beta));
    }
    Ok(theta)
}

fn lift(m: &Model, f: &DifferentialForm) -> DifferentialForm {
    let sh = thickened_shape(m);
    if f.shape() == sh {
        f.clone()
    } else {
        f.embed(sh)
    }
}

/// `ω_U = π^*ω − dθ_G − π^*b ∧ θ_G`.
pub fn build_omega_u(m: &Model, pi: &Splitting) -> Result<DifferentialForm, ModelError> {
    let theta = build_theta_g(m, pi)?;
    let w = lift(m, m.omega());
    let b = lift(m, m.b());
    Ok(&(&w - &theta.exterior_derivative()) - &b.wedge(&theta))
}

/// The coordinate expression
/// `½(ω_{ij} − p_β F_{ij}^β) dy^i∧dy^j − (dp_ν + p_ν b + p_β ∂_νR_i^β dy^i) ∧ f_ν^*`.
pub fn omega_u_coordinate(m: &Model, pi: &Splitting) -> Result<DifferentialForm, ModelError> {
    if pi.shape != m.shape().base() {
        return Err(ModelError::SplittingShape);
    }
    let sh = thickened_shape(m);
    let t = sh.transverse;
    let curv = transverse_curvature(pi);
    let wmat = m.transverse_matrix();
    let mut out = DifferentialForm::zero(sh, 2);
    let half = PiPolynomial::ratio(1, 2);
    for i in 0..t {
        for j in 0..t {
            let mut c = wmat[i][j].embed(sh);
            for beta in 0..sh.leaf {
                c = &c - &(&fiber_var(sh, beta) * &curv.f(i, j, beta).embed(sh));
            }
            out = &out + &DifferentialForm::from_indices(c.scale(&half), &[i, j]);
        }
    }
    let b = lift(m, m.b());
    for nu in 0..sh.leaf {
        let mut left = DifferentialForm::covector(sh, sh.torus() + nu);
        left = &left + &b.mul_scalar(&fiber_var(sh, nu));
        for i in 0..t {
            let mut c = FourierScalar::zero(sh);
            for beta in 0..sh.leaf {
                c += &(&fiber_var(sh, beta) * &pi.r[i][beta].partial(t + nu).embed(sh));
            }
            left = &left + &DifferentialForm::monomial(1 << i, c);
        }
        out = &out - &left.wedge(&leaf_coframe(pi, nu, sh));
    }
    Ok(out)
}

/// Difference between the coordinate expression and the invariant formula.
pub fn omega_u_discrepancy(m: &Model, pi: &Splitting) -> Result<DifferentialForm, ModelError> {
    Ok(&omega_u_coordinate(m, pi)? - &build_omega_u(m, pi)?)
}

/// `ω_Π^b − ω_{Π₀}^b − d^{π^*b}(θ_{Π₀} − θ_Π)`.
pub fn splitting_change_residual(m: &Model, pi0: &Splitting, pi: &Splitting) -> Result<DifferentialForm, ModelError> {
    let b = lift(m, m.b());
    let w = build_omega_u(m, pi)?;
    let w0 = build_omega_u(m, pi0)?;
    let dtheta = (&build_theta_g(m, pi0)? - &build_theta_g(m, pi)?).twisted_derivative(&b)?;
    Ok(&(&w - &w0) - &dtheta)
}

/// The lifted frame `e_j = Y_j − (p_ν(b_j + b_γR_j^γ) + p_β ∂_νR_j^β) ∂_{p_ν}`.
pub fn lifted_basis(m: &Model, pi: &Splitting) -> Vec<VectorField> {
    let sh = thickened_shape(m);
    let t = sh.transverse;
    let b = m.b();
    (0..t)
        .map(|j| {
            let mut e = VectorField::coord(sh, j);
            for a in 0..sh.leaf {
                e.set(t + a, pi.r[j][a].embed(sh));
            }
            let mut bj = b.component(&[j]).embed(sh);
            for g in 0..sh.leaf {
                bj += &(&b.component(&[t + g]) * &pi.r[j][g]).embed(sh);
            }
            for nu in 0..sh.leaf {
                let mut c = &fiber_var(sh, nu) * &bj;
                for beta in 0..sh.leaf {
                    c += &(&fiber_var(sh, beta) * &pi.r[j][beta].partial(t + nu).embed(sh));
                }
                e.set(sh.torus() + nu, -c);
            }
            e
        })
        .collect()
}

/// `ω_U(e_j, v)` for every lifted basis vector and every `v ∈ {∂_q, ∂_p}`;
/// all entries vanish exactly when the frame spans the ω_U-orthogonal of `T π^{-1}F`.
pub fn lifted_basis_pairings(m: &Model, pi: &Splitting) -> Result<Vec<FourierScalar>, ModelError> {
    let w = build_omega_u(m, pi)?;
    let sh = thickened_shape(m);
    let mut out = Vec::new();
    for e in lifted_basis(m, pi) {
        let ie = w.contract(&e);
        for v in sh.leaf_range().chain(sh.fiber_range()) {
            out.push(ie.contract_coord(v).coefficient(0));
        }
    }
    Ok(out)
}

/// The thickened model `(U, ω_U, π^*b)` with fiber names appended.
pub fn thicken(m: &Model, pi: &Splitting) -> Result<Model, ModelError> {
    let w = build_omega_u(m, pi)?;
    let b = lift(m, m.b());
    let roster = m.roster().thickened();
    let n = roster.shape().total() / 2;
    Model::new(roster, w, b, n)
}

/// Mask of the transverse covectors.
pub fn transverse_mask(sh: Shape) -> u32 {
    range_mask(sh.transverse_range())
}

/// Index list of a mask.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    bits(mask).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{CoordinateRoster, Gq};

    #[test]
    fn derived_curvature_example() {
        let sh = Shape::new(2, 1, 0);
        let r = vec![vec![FourierScalar::sin_coord(sh, 2)], vec![FourierScalar::sin_coord(sh, 0)]];
        let pi = Splitting::new(sh, r).unwrap();
        let f = transverse_curvature(&pi);
        let two_pi = PiPolynomial::monomial(1, Gq::int(2));
        let expect = &FourierScalar::cos_coord(sh, 0).scale(&two_pi)
            - &(&FourierScalar::sin_coord(sh, 0) * &FourierScalar::cos_coord(sh, 2)).scale(&two_pi);
        assert_eq!(f.f(0, 1, 0), expect);
        assert_eq!(f.f(1, 0, 0), -&expect);
        assert_eq!(curvature_by_bracket(&pi), f);
    }

    #[test]
    fn theta_example() {
        let roster = CoordinateRoster::standard(2, 2, false);
        let sh = roster.shape();
        let w = DifferentialForm::from_indices(FourierScalar::one(sh), &[0, 1]);
        let m = Model::new(roster, w, DifferentialForm::zero(sh, 1), 1).unwrap();
        let mut r = vec![vec![FourierScalar::zero(sh); 2]; 2];
        r[0][0] = FourierScalar::sin_coord(sh, 2);
        let pi = Splitting::new(sh, r).unwrap();
        let th = build_theta_g(&m, &pi).unwrap();
        let ts = th.shape();
        let p1 = FourierScalar::fiber_var(ts, 4);
        let p2 = FourierScalar::fiber_var(ts, 5);
        let expect = &(&DifferentialForm::monomial(1 << 2, p1.clone()) + &DifferentialForm::monomial(1 << 3, p2))
            - &DifferentialForm::monomial(1, &p1 * &FourierScalar::sin_coord(ts, 2));
        assert_eq!(th, expect);
        let zero = vec![FourierScalar::zero(sh); 2];
        assert!(th.pullback_by_section(&zero).unwrap().is_zero());
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i64>(), 0);
    }
}
