use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use smallvec::{smallvec, SmallVec};

use super::gauss::Gq;
use super::pi::PiPolynomial;
use super::roster::{CoordKind, Shape};
use super::RingError;

/// Exponent key of one term: torus frequencies followed by fiber degrees.
pub type Key = SmallVec<[i32; 8]>;

/// Finite sum `Σ c_{k,d} · p^d · e^{2πi k·x}` with `c` in [`PiPolynomial`].
///
/// Real-valued scalars satisfy `c_{−k,d} = conj(c_{k,d})`; every operation here
/// preserves that property.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourierScalar {
    shape: Shape,
    terms: BTreeMap<Key, PiPolynomial>,
}

impl FourierScalar {
    pub fn zero(shape: Shape) -> Self {
        FourierScalar { shape, terms: BTreeMap::new() }
    }

    pub fn constant(shape: Shape, c: PiPolynomial) -> Self {
        Self::term(shape, smallvec![0; shape.total()], c)
    }

    pub fn one(shape: Shape) -> Self {
        Self::constant(shape, PiPolynomial::one())
    }

    pub fn int(shape: Shape, n: i64) -> Self {
        Self::constant(shape, PiPolynomial::int(n))
    }

    pub fn ratio(shape: Shape, n: i64, d: i64) -> Self {
        Self::constant(shape, PiPolynomial::ratio(n, d))
    }

    /// A single term with the given key.
    pub fn term(shape: Shape, key: Key, c: PiPolynomial) -> Self {
        assert_eq!(key.len(), shape.total(), "key length does not match shape");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        FourierScalar { shape, terms }
    }

    /// `e^{2πi k·x}` for a torus frequency vector `k`.
    pub fn exp_mode(shape: Shape, freq: &[i32]) -> Self {
        let mut key = Key::from_slice(freq);
        key.resize(shape.total(), 0);
        Self::term(shape, key, PiPolynomial::one())
    }

    /// `cos(2π k·x)`
    pub fn cos_mode(shape: Shape, freq: &[i32]) -> Self {
        let neg: Vec<i32> = freq.iter().map(|k| -k).collect();
        let half = PiPolynomial::ratio(1, 2);
        (&Self::exp_mode(shape, freq) + &Self::exp_mode(shape, &neg)).scale(&half)
    }

    /// `sin(2π k·x)`
    pub fn sin_mode(shape: Shape, freq: &[i32]) -> Self {
        let neg: Vec<i32> = freq.iter().map(|k| -k).collect();
        let minus_half_i = PiPolynomial::constant(Gq::ratio(-1, 2).mul_i());
        (&Self::exp_mode(shape, freq) - &Self::exp_mode(shape, &neg)).scale(&minus_half_i)
    }

    /// `cos(2π x_c)` for a single torus coordinate.
    pub fn cos_coord(shape: Shape, coord: usize) -> Self {
        let mut f = vec![0; shape.torus()];
        f[coord] = 1;
        Self::cos_mode(shape, &f)
    }

    /// `sin(2π x_c)` for a single torus coordinate.
    pub fn sin_coord(shape: Shape, coord: usize) -> Self {
        let mut f = vec![0; shape.torus()];
        f[coord] = 1;
        Self::sin_mode(shape, &f)
    }

    /// The fiber coordinate `p_j` (global coordinate index `coord`).
    pub fn fiber_var(shape: Shape, coord: usize) -> Self {
        assert_eq!(shape.kind(coord), CoordKind::Fiber);
        let mut key: Key = smallvec![0; shape.total()];
        key[coord] = 1;
        Self::term(shape, key, PiPolynomial::one())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<Key, PiPolynomial> {
        &self.terms
    }

    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = (Key, PiPolynomial)>) -> Self {
        let mut s = Self::zero(shape);
        for (k, c) in terms {
            s.add_term(k, &c);
        }
        s
    }

    pub fn add_term(&mut self, key: Key, c: &PiPolynomial) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(key.len(), self.shape.total());
        match self.terms.get_mut(&key) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the scalar has no Fourier or fiber dependence.
    pub fn as_constant(&self) -> Option<PiPolynomial> {
        match self.terms.len() {
            0 => Some(PiPolynomial::zero()),
            1 => {
                let (k, c) = self.terms.iter().next()?;
                k.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.shape);
        let t = self.shape.torus();
        for (k, c) in &self.terms {
            let mut nk = k.clone();
            for e in nk.iter_mut().take(t) {
                *e = -*e;
            }
            out.add_term(nk, &c.conj());
        }
        out
    }

    /// Checks the reality constraint `c_{−k} = conj(c_k)`.
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Maximum total fiber degree (0 for fiber-free scalars or zero).
    pub fn fiber_degree(&self) -> i32 {
        let t = self.shape.torus();
        self.terms.keys().map(|k| k[t..].iter().sum::<i32>()).max().unwrap_or(0)
    }

    pub fn is_fiber_free(&self) -> bool {
        self.fiber_degree() == 0
    }

    /// Largest absolute torus frequency in any term.
    pub fn max_frequency(&self) -> i32 {
        let t = self.shape.torus();
        self.terms.keys().flat_map(|k| k[..t].iter().map(|e| e.abs())).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &PiPolynomial) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        let mut out = Self::zero(self.shape);
        for (k, v) in &self.terms {
            let p = v * c;
            if !p.is_zero() {
                out.terms.insert(k.clone(), p);
            }
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&PiPolynomial::int(n))
    }

    pub fn scale_ratio(&self, n: i64, d: i64) -> Self {
        self.scale(&PiPolynomial::ratio(n, d))
    }

    fn check(&self, o: &Self) -> Result<(), RingError> {
        if self.shape != o.shape {
            Err(RingError::ShapeMismatch { left: self.shape, right: o.shape })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, RingError> {
        self.check(o)?;
        Ok(self + o)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, RingError> {
        self.check(o)?;
        Ok(self * o)
    }

    /// Product truncated to total fiber degree `max_deg`.
    pub fn mul_truncated(&self, o: &Self, max_deg: i32) -> Self {
        assert_eq!(self.shape, o.shape, "scalar shape mismatch");
        let t = self.shape.torus();
        let mut out = Self::zero(self.shape);
        for (k1, c1) in &self.terms {
            let d1: i32 = k1[t..].iter().sum();
            for (k2, c2) in &o.terms {
                let d2: i32 = k2[t..].iter().sum();
                if d1 + d2 > max_deg {
                    continue;
                }
                let key: Key = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_term(key, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.shape);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative in the global coordinate `coord`.
    pub fn partial(&self, coord: usize) -> Self {
        assert!(coord < self.shape.total(), "coordinate index out of range");
        let mut out = Self::zero(self.shape);
        if coord < self.shape.torus() {
            for (k, c) in &self.terms {
                if k[coord] != 0 {
                    out.terms.insert(k.clone(), c * &PiPolynomial::two_pi_i(k[coord] as i64));
                }
            }
        } else {
            for (k, c) in &self.terms {
                let d = k[coord];
                if d > 0 {
                    let mut nk = k.clone();
                    nk[coord] -= 1;
                    out.add_term(nk, &c.scale(&Gq::int(d as i64)));
                }
            }
        }
        out
    }

    /// Keeps the terms with vanishing leaf frequencies.
    pub fn leaf_harmonic_projection(&self) -> Result<Self, RingError> {
        if !self.is_fiber_free() {
            return Err(RingError::FiberDependent);
        }
        Ok(self.leaf_harmonic_part())
    }

    pub(crate) fn leaf_harmonic_part(&self) -> Self {
        let lr = self.shape.leaf_range();
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            if k[lr.clone()].iter().all(|&e| e == 0) {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Substitutes `p_j ↦ values[j]` (values live on the fiberless shape).
    pub fn substitute_fiber(&self, values: &[FourierScalar]) -> Result<Self, RingError> {
        let base = self.shape.base();
        let t = self.shape.torus();
        if values.len() != self.shape.fiber {
            return Err(RingError::ShapeMismatch { left: self.shape, right: base });
        }
        for v in values {
            if v.shape != base {
                return Err(RingError::ShapeMismatch { left: v.shape, right: base });
            }
            if !v.is_fiber_free() {
                return Err(RingError::FiberDependent);
            }
        }
        let mut powers: Vec<Vec<FourierScalar>> = values.iter().map(|v| vec![FourierScalar::one(base), v.clone()]).collect();
        let mut out = Self::zero(base);
        for (k, c) in &self.terms {
            let mut term = FourierScalar::term(base, Key::from_slice(&k[..t]), c.clone());
            for (j, &d) in k[t..].iter().enumerate() {
                let d = d as usize;
                while powers[j].len() <= d {
                    let next = &powers[j][powers[j].len() - 1] * &values[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][d];
            }
            out += &term;
        }
        Ok(out)
    }

    /// Same function viewed on a shape with more fiber coordinates (all absent).
    pub fn embed(&self, shape: Shape) -> Self {
        assert_eq!(shape.torus(), self.shape.torus());
        assert_eq!(shape.transverse, self.shape.transverse);
        assert!(self.is_fiber_free() || shape.fiber == self.shape.fiber);
        let t = self.shape.torus();
        let mut out = Self::zero(shape);
        for (k, c) in &self.terms {
            let mut nk = Key::from_slice(&k[..t]);
            nk.extend(k[t..].iter().copied());
            nk.resize(shape.total(), 0);
            out.terms.insert(nk, c.clone());
        }
        out
    }

    /// Drops all fiber dependence after checking there is none.
    pub fn restrict_base(&self) -> Result<Self, RingError> {
        if !self.is_fiber_free() {
            return Err(RingError::FiberDependent);
        }
        Ok(self.embed_base_unchecked())
    }

    fn embed_base_unchecked(&self) -> Self {
        let base = self.shape.base();
        let t = self.shape.torus();
        let mut out = Self::zero(base);
        for (k, c) in &self.terms {
            out.terms.insert(Key::from_slice(&k[..t]), c.clone());
        }
        out
    }

    /// The coefficient of the fiber monomial `p^deg`, as a fiberless scalar.
    pub fn fiber_coefficient(&self, deg: &[i32]) -> Self {
        let base = self.shape.base();
        let t = self.shape.torus();
        let mut out = Self::zero(base);
        for (k, c) in &self.terms {
            if k[t..] == *deg {
                out.terms.insert(Key::from_slice(&k[..t]), c.clone());
            }
        }
        out
    }

    /// Value at `p = 0`, on the same shape.
    pub fn at_zero_fiber(&self) -> Self {
        let t = self.shape.torus();
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            if k[t..].iter().all(|&d| d == 0) {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Terms of total fiber degree at most `max_deg`.
    pub fn truncate_fiber(&self, max_deg: i32) -> Self {
        let t = self.shape.torus();
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            if k[t..].iter().sum::<i32>() <= max_deg {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Splits into pieces keyed by full torus frequency.
    pub fn modes(&self) -> BTreeMap<Vec<i32>, FourierScalar> {
        let t = self.shape.torus();
        let mut out: BTreeMap<Vec<i32>, FourierScalar> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(k[..t].to_vec()).or_insert_with(|| Self::zero(self.shape)).terms.insert(k.clone(), c.clone());
        }
        out
    }

    /// Multiplies every coefficient by a [`PiPolynomial`] depending on the key.
    pub fn map_terms(&self, mut f: impl FnMut(&Key, &PiPolynomial) -> PiPolynomial) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            let v = f(k, c);
            if !v.is_zero() {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    /// Floating value at a point, for diagnostics only (`point` covers all coordinates).
    pub fn eval_f64(&self, point: &[f64]) -> (f64, f64) {
        let t = self.shape.torus();
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in &self.terms {
            let (cr, ci) = c.eval_f64();
            let phase: f64 = (0..t).map(|j| 2.0 * std::f64::consts::PI * k[j] as f64 * point[j]).sum();
            let mut mag = 1.0;
            for j in t..self.shape.total() {
                mag *= point[j].powi(k[j]);
            }
            let (s, co) = phase.sin_cos();
            re += mag * (cr * co - ci * s);
            im += mag * (cr * s + ci * co);
        }
        (re, im)
    }
}

impl Add for &FourierScalar {
    type Output = FourierScalar;
    fn add(self, o: &FourierScalar) -> FourierScalar {
        assert_eq!(self.shape, o.shape, "scalar shape mismatch");
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (k, c) in &small.terms {
            out.add_term(k.clone(), c);
        }
        out
    }
}

impl AddAssign<&FourierScalar> for FourierScalar {
    fn add_assign(&mut self, o: &FourierScalar) {
        assert_eq!(self.shape, o.shape, "scalar shape mismatch");
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c);
        }
    }
}

impl Sub for &FourierScalar {
    type Output = FourierScalar;
    fn sub(self, o: &FourierScalar) -> FourierScalar {
        self + &(-o)
    }
}

impl Neg for &FourierScalar {
    type Output = FourierScalar;
    fn neg(self) -> FourierScalar {
        FourierScalar { shape: self.shape, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

impl Neg for FourierScalar {
    type Output = FourierScalar;
    fn neg(self) -> FourierScalar {
        -&self
    }
}

impl Mul for &FourierScalar {
    type Output = FourierScalar;
    fn mul(self, o: &FourierScalar) -> FourierScalar {
        assert_eq!(self.shape, o.shape, "scalar shape mismatch");
        let mut acc: BTreeMap<Key, PiPolynomial> = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let key: Key = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                let p = c1 * c2;
                match acc.get_mut(&key) {
                    Some(v) => v.add_assign_ref(&p),
                    None => {
                        acc.insert(key, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        FourierScalar { shape: self.shape, terms: acc }
    }
}

impl Add for FourierScalar {
    type Output = FourierScalar;
    fn add(self, o: FourierScalar) -> FourierScalar {
        &self + &o
    }
}

impl Sub for FourierScalar {
    type Output = FourierScalar;
    fn sub(self, o: FourierScalar) -> FourierScalar {
        &self - &o
    }
}

impl Mul for FourierScalar {
    type Output = FourierScalar;
    fn mul(self, o: FourierScalar) -> FourierScalar {
        &self * &o
    }
}
