//! Rationals with a machine-word fast path and an arbitrary-precision fallback.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug)]
enum Repr {
    /// `n / d` with `d > 0` and `gcd(n, d) = 1`.
    Small(i64, i64),
    /// Only used when numerator or denominator leaves `i64`.
    Big(BigRational),
}

#[derive(Clone, Debug)]
pub(crate) struct Rat(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a as i64
}

impl Rat {
    pub fn zero() -> Self {
        Rat(Repr::Small(0, 1))
    }

    pub fn int(n: i64) -> Self {
        Rat(Repr::Small(n, 1))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(r)),
        }
    }

    /// Builds `n / d` from a wide numerator and denominator, reducing first.
    fn from_wide(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n == 0,
            Repr::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn add(&self, o: &Rat) -> Rat {
        match (&self.0, &o.0) {
            (Repr::Small(a, 1), Repr::Small(b, 1)) => match a.checked_add(*b) {
                Some(s) => Rat::int(s),
                None => Rat::from_wide(*a as i128 + *b as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_wide(a + c, b)
                } else {
                    Rat::from_wide(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    pub fn neg(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat(Repr::Small(m, *d)),
                None => Rat::from_wide(-(*n as i128), *d as i128),
            },
            Repr::Big(r) => Rat::from_big(-r.clone()),
        }
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        match (&self.0, &o.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rat::zero(),
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_mul(*c) {
                Some(p) => Rat::int(p),
                None => Rat::from_wide(*a as i128 * *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let g1 = gcd_i64(*a, *d);
                let g2 = gcd_i64(*c, *b);
                let n = (*a / g1) as i128 * (*c / g2) as i128;
                let m = (*b / g2) as i128 * (*d / g1) as i128;
                match (i64::try_from(n), i64::try_from(m)) {
                    (Ok(n), Ok(m)) => Rat(Repr::Small(n, m)),
                    _ => Rat(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(m)))),
                }
            }
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    /// `None` for division by zero.
    pub fn div(&self, o: &Rat) -> Option<Rat> {
        if o.is_zero() {
            return None;
        }
        let inv = match &o.0 {
            Repr::Small(n, d) => Rat::from_wide(*d as i128, *n as i128),
            Repr::Big(r) => Rat::from_big(r.recip()),
        };
        Some(self.mul(&inv))
    }
}

impl PartialEq for Rat {
    fn eq(&self, o: &Rat) -> bool {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.to_big().hash(h)
    }
}

impl Ord for Rat {
    fn cmp(&self, o: &Rat) -> Ordering {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Rat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat::from_big(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_and_big_paths_agree() {
        let vals = [(1, 2), (-3, 7), (i64::MAX, 3), (i64::MIN + 1, 5), (0, 1), (5, 1), (i64::MAX, 1)];
        for &(a, b) in &vals {
            for &(c, d) in &vals {
                let (x, y) = (Rat::from_big(big(a, b)), Rat::from_big(big(c, d)));
                assert_eq!(x.add(&y), Rat::from_big(big(a, b) + big(c, d)));
                assert_eq!(x.sub(&y), Rat::from_big(big(a, b) - big(c, d)));
                assert_eq!(x.mul(&y), Rat::from_big(big(a, b) * big(c, d)));
                if c != 0 {
                    assert_eq!(x.div(&y).unwrap(), Rat::from_big(big(a, b) / big(c, d)));
                }
                assert_eq!(x.cmp(&y), big(a, b).cmp(&big(c, d)));
            }
        }
    }

    #[test]
    fn overflow_returns_to_small_form() {
        let huge = Rat::int(i64::MAX).mul(&Rat::int(4));
        assert!(matches!(huge.0, Repr::Big(_)));
        let back = huge.div(&Rat::int(4)).unwrap();
        assert_eq!(back, Rat::int(i64::MAX));
    }
}
