use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gauss::{fmt_rational, Gq};

/// Laurent polynomial in the formal symbol π with Gaussian-rational coefficients.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiPolynomial {
    coeffs: BTreeMap<i32, Gq>,
}

impl PiPolynomial {
    pub fn zero() -> Self {
        PiPolynomial { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gq::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::monomial(0, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Gq::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(Gq::ratio(n, d))
    }

    /// `c · π^e`
    pub fn monomial(e: i32, c: Gq) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        PiPolynomial { coeffs }
    }

    /// The element `2πi·k`.
    pub fn two_pi_i(k: i64) -> Self {
        Self::monomial(1, Gq::int(2 * k).mul_i())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&e| e == 0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(Gq::is_real)
    }

    pub fn coefficient(&self, e: i32) -> Gq {
        self.coeffs.get(&e).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &Gq)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn conj(&self) -> Self {
        PiPolynomial { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.conj())).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PiPolynomial { coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    /// Multiply by `π^k`.
    pub fn shift(&self, k: i32) -> Self {
        PiPolynomial { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Returns `(e, c)` when the value is the single unit `c·π^e`.
    pub fn as_monomial(&self) -> Option<(i32, &Gq)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    /// Inverse in the Laurent ring; exists exactly for nonzero monomials.
    pub fn inv(&self) -> Option<Self> {
        let (e, c) = self.as_monomial()?;
        Some(Self::monomial(-e, c.inv()?))
    }

    pub fn add_assign_ref(&mut self, o: &PiPolynomial) {
        for (e, c) in &o.coeffs {
            let entry = self.coeffs.entry(*e).or_insert_with(Gq::zero);
            *entry += c;
            if entry.is_zero() {
                self.coeffs.remove(e);
            }
        }
    }

    /// Floating evaluation with π ≈ 3.14159…, for diagnostics only.
    pub fn eval_f64(&self) -> (f64, f64) {
        let pi = std::f64::consts::PI;
        self.coeffs.iter().fold((0.0, 0.0), |(re, im), (e, c)| {
            let w = pi.powi(*e);
            (
                re + w * c.re().to_f64().unwrap_or(f64::NAN),
                im + w * c.im().to_f64().unwrap_or(f64::NAN),
            )
        })
    }

    /// Splits into real and imaginary parts, each a real Laurent polynomial.
    pub fn re_im(&self) -> (PiPolynomial, PiPolynomial) {
        let mut re = PiPolynomial::zero();
        let mut im = PiPolynomial::zero();
        for (e, c) in &self.coeffs {
            re.add_assign_ref(&PiPolynomial::monomial(*e, Gq::real(c.re())));
            im.add_assign_ref(&PiPolynomial::monomial(*e, Gq::real(c.im())));
        }
        (re, im)
    }

    /// ASCII rendering of a single `c·π^e` factor; returns the sign separately.
    pub(crate) fn fmt_unit(e: i32, c: &Gq, pretty: bool) -> (bool, String) {
        let (re, im) = (c.re(), c.im());
        let (neg, mag) = if im.is_zero() {
            (re.is_negative(), Gq::real(re.abs()))
        } else if re.is_zero() {
            (im.is_negative(), Gq::imag(im.abs()))
        } else {
            (false, c.clone())
        };
        let (mre, mim) = (mag.re(), mag.im());
        let num = if mim.is_zero() {
            fmt_rational(&mre)
        } else if mre.is_zero() {
            if mim.is_one() {
                "I".to_string()
            } else {
                format!("{}*I", fmt_rational(&mim))
            }
        } else {
            format!("{}", mag)
        };
        let pi = if pretty { "π" } else { "pi" };
        let sep = if pretty { "·" } else { "*" };
        let s = match e {
            0 => num,
            _ => {
                let pw = if e == 1 {
                    pi.to_string()
                } else if pretty && (2..=9).contains(&e) {
                    format!("{}{}", pi, superscript(e))
                } else {
                    format!("{}^{}", pi, if e < 0 { format!("({})", e) } else { e.to_string() })
                };
                if num == "1" {
                    pw
                } else {
                    format!("{}{}{}", num, sep, pw)
                }
            }
        };
        (neg, s)
    }
}

pub(crate) fn superscript(n: i32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap_or(0) as usize]).collect()
}

impl Add for &PiPolynomial {
    type Output = PiPolynomial;
    fn add(self, o: &PiPolynomial) -> PiPolynomial {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }
}

impl Sub for &PiPolynomial {
    type Output = PiPolynomial;
    fn sub(self, o: &PiPolynomial) -> PiPolynomial {
        let mut r = self.clone();
        r.add_assign_ref(&-o);
        r
    }
}

impl Neg for &PiPolynomial {
    type Output = PiPolynomial;
    fn neg(self) -> PiPolynomial {
        PiPolynomial { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &PiPolynomial {
    type Output = PiPolynomial;
    fn mul(self, o: &PiPolynomial) -> PiPolynomial {
        let mut out: BTreeMap<i32, Gq> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &o.coeffs {
                let entry = out.entry(e1 + e2).or_insert_with(Gq::zero);
                *entry += &(c1 * c2);
            }
        }
        out.retain(|_, c| !c.is_zero());
        PiPolynomial { coeffs: out }
    }
}

impl Zero for PiPolynomial {
    fn zero() -> Self {
        PiPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl Add for PiPolynomial {
    type Output = PiPolynomial;
    fn add(self, o: PiPolynomial) -> PiPolynomial {
        &self + &o
    }
}

impl fmt::Display for PiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let (neg, s) = Self::fmt_unit(*e, c, false);
            match (first, neg) {
                (true, true) => write!(f, "-{}", s)?,
                (true, false) => write!(f, "{}", s)?,
                (false, true) => write!(f, " - {}", s)?,
                (false, false) => write!(f, " + {}", s)?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_squared() {
        let t = PiPolynomial::two_pi_i(1);
        let sq = &t * &t;
        assert_eq!(sq, PiPolynomial::monomial(2, Gq::int(-4)));
        assert_eq!(sq.to_string(), "-4*pi^2");
    }

    #[test]
    fn laurent_units_invert() {
        let t = PiPolynomial::two_pi_i(3);
        let inv = t.inv().unwrap();
        assert_eq!(&t * &inv, PiPolynomial::one());
        let sum = &PiPolynomial::one() + &t;
        assert!(sum.inv().is_none());
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = &PiPolynomial::int(3) + &PiPolynomial::monomial(1, Gq::int(2));
        let b = &a - &a;
        assert!(b.is_zero());
        assert_eq!(b, PiPolynomial::zero());
    }
}
