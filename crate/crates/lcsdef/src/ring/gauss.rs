use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;

/// Exact Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gq {
    re: Rat,
    im: Rat,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Gq { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        Gq::int(1)
    }

    pub fn i() -> Self {
        Gq { re: Rat::zero(), im: Rat::int(1) }
    }

    pub fn int(n: i64) -> Self {
        Gq { re: Rat::int(n), im: Rat::zero() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Gq { re: BigRational::new(n.into(), d.into()).into(), im: Rat::zero() }
    }

    pub fn real(r: BigRational) -> Self {
        Gq { re: r.into(), im: Rat::zero() }
    }

    pub fn imag(r: BigRational) -> Self {
        Gq { re: Rat::zero(), im: r.into() }
    }

    pub fn re(&self) -> BigRational {
        self.re.to_big()
    }

    pub fn im(&self) -> BigRational {
        self.im.to_big()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq { re: self.re.clone(), im: self.im.neg() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        Some(Gq { re: self.re.div(&n)?, im: self.im.div(&n)?.neg() })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let r = Rat::from_big(r.clone());
        Gq { re: self.re.mul(&r), im: self.im.mul(&r) }
    }

    pub fn mul_i(&self) -> Self {
        Gq { re: self.im.neg(), im: self.re.clone() }
    }
}

impl Zero for Gq {
    fn zero() -> Self {
        Gq::zero()
    }
    fn is_zero(&self) -> bool {
        Gq::is_zero(self)
    }
}

impl One for Gq {
    fn one() -> Self {
        Gq::one()
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        &self + &o
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re = self.re.add(&o.re);
        if !o.im.is_zero() {
            self.im = self.im.add(&o.im);
        }
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        &self - &o
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        &self * &o
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq { re: self.re.mul(&o.re), im: Rat::zero() };
        }
        Gq {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        -&self
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: self.re.neg(), im: self.im.neg() }
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.re(), self.im());
        match (re.is_zero(), im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&re)),
            (true, false) => write!(f, "{}*I", fmt_rational(&im)),
            (false, false) => {
                let sign = if im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {}*I)", fmt_rational(&re), sign, fmt_rational(&im.abs()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let z = Gq::new(BigRational::new(3.into(), 4.into()), BigRational::new((-2).into(), 5.into()));
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, Gq::one());
        assert!(Gq::zero().inv().is_none());
    }

    #[test]
    fn i_squared() {
        assert_eq!(&Gq::i() * &Gq::i(), Gq::int(-1));
        assert_eq!(Gq::int(2).mul_i(), Gq::imag(BigRational::from_integer(2.into())));
    }
}
