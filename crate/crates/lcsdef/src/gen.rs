//! Seeded random generators for real scalars and forms, used by fuzz checks.

use num_rational::BigRational;
use rand::Rng;

use crate::forms::{bits, DifferentialForm};
use crate::ring::{FourierScalar, Gq, Key, PiPolynomial, Shape};

/// Knobs for random scalar generation.
#[derive(Clone, Copy, Debug)]
pub struct ScalarSpec {
    /// Torus coordinates that may carry frequencies (bitmask over global indices).
    pub coords: u32,
    pub max_freq: i32,
    pub terms: usize,
    /// Largest total fiber degree per term.
    pub fiber_degree: i32,
    pub max_coeff: i64,
}

impl ScalarSpec {
    pub fn new(coords: u32) -> Self {
        ScalarSpec { coords, max_freq: 1, terms: 2, fiber_degree: 0, max_coeff: 3 }
    }

    pub fn terms(mut self, n: usize) -> Self {
        self.terms = n;
        self
    }

    pub fn max_freq(mut self, f: i32) -> Self {
        self.max_freq = f;
        self
    }

    pub fn fiber_degree(mut self, d: i32) -> Self {
        self.fiber_degree = d;
        self
    }
}

fn small<R: Rng>(rng: &mut R, m: i64) -> i64 {
    rng.gen_range(-m..=m)
}

/// Random real scalar: a sum of conjugate-paired modes with small Gaussian-integer coefficients.
pub fn random_scalar<R: Rng>(rng: &mut R, shape: Shape, spec: ScalarSpec) -> FourierScalar {
    let t = shape.torus();
    let mut out = FourierScalar::zero(shape);
    for _ in 0..spec.terms {
        let mut key: Key = Key::from_elem(0, shape.total());
        for (j, k) in key.iter_mut().enumerate().take(t) {
            if spec.coords & (1 << j) != 0 && spec.max_freq > 0 {
                *k = rng.gen_range(-spec.max_freq..=spec.max_freq);
            }
        }
        if shape.fiber > 0 && spec.fiber_degree > 0 {
            let mut budget = rng.gen_range(0..=spec.fiber_degree);
            while budget > 0 {
                let j = rng.gen_range(t..shape.total());
                key[j] += 1;
                budget -= 1;
            }
        }
        let re = small(rng, spec.max_coeff);
        let im = if key[..t].iter().any(|&k| k != 0) { small(rng, spec.max_coeff) } else { 0 };
        let c = PiPolynomial::constant(Gq::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into())));
        let term = FourierScalar::term(shape, key.clone(), c.clone());
        let mut ckey = key.clone();
        for k in ckey.iter_mut().take(t) {
            *k = -*k;
        }
        let conj = FourierScalar::term(shape, ckey, c.conj());
        if key[..t].iter().all(|&k| k == 0) {
            out = &out + &term;
        } else {
            out = &(&out + &term) + &conj;
        }
    }
    out
}

/// Random real form of the given degree with covectors from `covectors`.
pub fn random_form<R: Rng>(rng: &mut R, shape: Shape, degree: usize, covectors: u32, spec: ScalarSpec, monomials: usize) -> DifferentialForm {
    let avail: Vec<usize> = bits(covectors).collect();
    let mut out = DifferentialForm::zero(shape, degree);
    if degree > avail.len() {
        return out;
    }
    for _ in 0..monomials {
        let mut mask = 0u32;
        while (mask.count_ones() as usize) < degree {
            mask |= 1 << avail[rng.gen_range(0..avail.len())];
        }
        out = &out + &DifferentialForm::monomial(mask, random_scalar(rng, shape, spec));
    }
    out
}

/// Random leafwise form (only `dq` covectors) whose coefficients may depend on `coords`.
pub fn random_leaf_form<R: Rng>(rng: &mut R, shape: Shape, degree: usize, spec: ScalarSpec, monomials: usize) -> DifferentialForm {
    let lm = crate::forms::range_mask(shape.leaf_range());
    random_form(rng, shape, degree, lm, spec, monomials)
}
