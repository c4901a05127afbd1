//! Multivector fields on `U × ℝ_t` as polynomials in odd variables `θ_a`.
//!
//! Coefficients are homogeneous in `t`: every term of a [`SuperFn`] carries the
//! common factor `e^{w t}`, so `∂_t` acts as multiplication by `w`.

use std::collections::BTreeMap;

use crate::forms::{bits, wedge_sign};
use crate::ring::{FourierScalar, Shape};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperFn {
    pub(crate) shape: Shape,
    /// Index of the odd variable dual to `t`.
    pub(crate) t: usize,
    pub(crate) weight: i32,
    pub(crate) terms: BTreeMap<u32, FourierScalar>,
}

fn right_sign(mask: u32, a: usize) -> i64 {
    if (mask >> (a + 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn left_sign(mask: u32, a: usize) -> i64 {
    if (mask & ((1u32 << a) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl SuperFn {
    pub fn zero(shape: Shape, weight: i32) -> Self {
        SuperFn { shape, t: shape.total(), weight, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: u32, f: &FourierScalar) {
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(|| FourierScalar::zero(self.shape));
        *e += f;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, o: &SuperFn) -> SuperFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.weight, o.weight, "adding superfunctions of different weights");
        let mut out = self.clone();
        for (m, f) in &o.terms {
            out.add_term(*m, f);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> SuperFn {
        let mut out = SuperFn::zero(self.shape, self.weight);
        for (m, f) in &self.terms {
            out.add_term(*m, &f.scale_int(n));
        }
        out
    }

    fn d_even(&self, f: &FourierScalar, a: usize) -> FourierScalar {
        if a == self.t {
            f.scale_int(self.weight as i64)
        } else {
            f.partial(a)
        }
    }

    /// Schouten bracket `[F, G] = F∂⃖_{θ_a} ∂_{x^a}G − F∂⃖_{x^a} ∂⃗_{θ_a}G`.
    pub fn bracket(&self, g: &SuperFn) -> SuperFn {
        assert_eq!(self.shape, g.shape, "superfunction shape mismatch");
        let mut out = SuperFn::zero(self.shape, self.weight + g.weight);
        for (a_mask, f) in &self.terms {
            for (b_mask, gc) in &g.terms {
                for a in bits(*a_mask) {
                    let dg = g.d_even(gc, a);
                    if dg.is_zero() {
                        continue;
                    }
                    let rest = a_mask & !(1 << a);
                    let s = wedge_sign(rest, *b_mask);
                    if s == 0 {
                        continue;
                    }
                    out.add_term(rest | b_mask, &(f * &dg).scale_int(s * right_sign(*a_mask, a)));
                }
                for b in bits(*b_mask) {
                    let df = self.d_even(f, b);
                    if df.is_zero() {
                        continue;
                    }
                    let rest = b_mask & !(1 << b);
                    let s = wedge_sign(*a_mask, rest);
                    if s == 0 {
                        continue;
                    }
                    out.add_term(a_mask | rest, &(&df * gc).scale_int(-s * left_sign(*b_mask, b)));
                }
            }
        }
        out
    }

    /// Supercommutative product.
    pub fn mul(&self, g: &SuperFn) -> SuperFn {
        let mut out = SuperFn::zero(self.shape, self.weight + g.weight);
        for (a, f) in &self.terms {
            for (b, h) in &g.terms {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    out.add_term(a | b, &(f * h).scale_int(s));
                }
            }
        }
        out
    }

    /// Number of odd variables outside the fiber directions in `mask`.
    pub(crate) fn base_theta_count(&self, mask: u32) -> u32 {
        let fm: u32 = self.shape.fiber_range().fold(0, |m, j| m | (1 << j));
        (mask & !fm).count_ones()
    }

    /// Keeps the terms with (non-fiber odd count) + (fiber degree) = `r`.
    pub(crate) fn prune(&mut self, r: u32) {
        let t = self.shape.torus();
        let mut out = BTreeMap::new();
        for (m, f) in &self.terms {
            let c = self.base_theta_count(*m);
            if c > r {
                continue;
            }
            let need = (r - c) as i32;
            let kept = FourierScalar::from_terms(
                self.shape,
                f.terms().iter().filter(|(k, _)| k[t..].iter().sum::<i32>() == need).map(|(k, v)| (k.clone(), v.clone())),
            );
            if !kept.is_zero() {
                out.insert(*m, kept);
            }
        }
        self.terms = out;
    }
}
