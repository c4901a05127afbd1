use std::collections::BTreeMap;

use super::gauss::Gq;
use super::pi::{superscript, PiPolynomial};
use super::roster::CoordinateRoster;
use super::scalar::FourierScalar;

/// One trigonometric factor per torus coordinate: `cos(2πx)^a · sin(2πx)^b`, `b ≤ 1`.
type TrigMono = Vec<(u32, u32)>;

fn chebyshev_t(n: usize) -> Vec<i64> {
    let mut a = vec![1i64];
    let mut b = vec![0i64, 1];
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let mut c = vec![0i64; b.len() + 1];
        for (i, v) in b.iter().enumerate() {
            c[i + 1] += 2 * v;
        }
        for (i, v) in a.iter().enumerate() {
            c[i] -= v;
        }
        a = b;
        b = c;
    }
    b
}

fn chebyshev_u(n: usize) -> Vec<i64> {
    let mut a = vec![1i64];
    let mut b = vec![0i64, 2];
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let mut c = vec![0i64; b.len() + 1];
        for (i, v) in b.iter().enumerate() {
            c[i + 1] += 2 * v;
        }
        for (i, v) in a.iter().enumerate() {
            c[i] -= v;
        }
        a = b;
        b = c;
    }
    b
}

/// Rewrites the exponential expansion in the product basis of cosines and sines,
/// with each sine appearing at most to the first power.
pub(crate) fn trig_expansion(s: &FourierScalar) -> BTreeMap<(Vec<i32>, TrigMono), PiPolynomial> {
    let shape = s.shape();
    let t = shape.torus();
    let mut out: BTreeMap<(Vec<i32>, TrigMono), PiPolynomial> = BTreeMap::new();
    for (key, coeff) in s.terms() {
        // per coordinate: list of (cos exponent, sin exponent, factor)
        let mut choices: Vec<Vec<(u32, u32, Gq)>> = Vec::with_capacity(t);
        for &k in &key[..t] {
            let n = k.unsigned_abs() as usize;
            let mut opts = Vec::new();
            if n == 0 {
                opts.push((0, 0, Gq::one()));
            } else {
                for (e, c) in chebyshev_t(n).into_iter().enumerate() {
                    if c != 0 {
                        opts.push((e as u32, 0, Gq::int(c)));
                    }
                }
                let sign = if k > 0 { 1 } else { -1 };
                for (e, c) in chebyshev_u(n - 1).into_iter().enumerate() {
                    if c != 0 {
                        opts.push((e as u32, 1, Gq::int(sign * c).mul_i()));
                    }
                }
            }
            choices.push(opts);
        }
        let fdeg = key[t..].to_vec();
        let mut idx = vec![0usize; t];
        loop {
            let mut mono = Vec::with_capacity(t);
            let mut factor = Gq::one();
            for j in 0..t {
                let (a, b, ref c) = choices[j][idx[j]];
                mono.push((a, b));
                factor = &factor * c;
            }
            let entry = out.entry((fdeg.clone(), mono)).or_default();
            entry.add_assign_ref(&coeff.scale(&factor));
            let mut j = 0;
            while j < t {
                idx[j] += 1;
                if idx[j] < choices[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == t {
                break;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Monomials of the canonical printed form, each as `(negative, body)` where
/// `body` is `"1"` for the bare unit.
pub(crate) fn scalar_monomials(s: &FourierScalar, roster: &CoordinateRoster, pretty: bool) -> Vec<(bool, String)> {
    let shape = s.shape();
    let t = shape.torus();
    let exp = trig_expansion(s);
    let mut entries: Vec<(u32, Vec<i32>, TrigMono, i32, Gq)> = Vec::new();
    for ((fdeg, mono), c) in exp {
        let deg: u32 = mono.iter().map(|(a, b)| a + b).sum::<u32>() + fdeg.iter().map(|&d| d as u32).sum::<u32>();
        for (e, g) in c.terms() {
            entries.push((deg, fdeg.clone(), mono.clone(), -*e, g.clone()));
        }
    }
    entries.sort_by(|a, b| (a.0, &a.1, &a.2, a.3).cmp(&(b.0, &b.1, &b.2, b.3)));
    let sep = if pretty { "·" } else { "*" };
    let mut out = Vec::new();
    for (_, fdeg, mono, ne, g) in entries {
        let (neg, coef) = PiPolynomial::fmt_unit(-ne, &g, pretty);
        let mut factors: Vec<String> = Vec::new();
        for (j, &d) in fdeg.iter().enumerate() {
            if d > 0 {
                factors.push(power(roster.name(t + j), d as u32, pretty));
            }
        }
        for (j, &(a, b)) in mono.iter().enumerate() {
            let arg = if pretty { format!("2π·{}", roster.name(j)) } else { format!("2*pi*{}", roster.name(j)) };
            if a > 0 {
                factors.push(power(&format!("cos({})", arg), a, pretty));
            }
            if b > 0 {
                factors.push(power(&format!("sin({})", arg), b, pretty));
            }
        }
        let body = if factors.is_empty() {
            coef
        } else if coef == "1" {
            factors.join(sep)
        } else if pretty && !coef.contains('I') && !coef.contains('/') {
            // numeric-π coefficients juxtapose, e.g. 4π²
            format!("{}{}{}", coef.replace('·', ""), sep, factors.join(sep))
        } else {
            format!("{}{}{}", coef, sep, factors.join(sep))
        };
        out.push((neg, body));
    }
    out
}

fn power(base: &str, e: u32, pretty: bool) -> String {
    match e {
        1 => base.to_string(),
        _ if pretty => format!("{}{}", base, superscript(e as i32)),
        _ => format!("{}^{}", base, e),
    }
}

pub(crate) fn join_signed(parts: &[(bool, String)], pretty: bool) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let minus = if pretty { "−" } else { "-" };
    let mut s = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => {
                s.push_str(minus);
                s.push_str(body);
            }
            (0, false) => s.push_str(body),
            (_, true) => {
                s.push(' ');
                s.push_str(minus);
                s.push(' ');
                s.push_str(body);
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(body);
            }
        }
    }
    s
}

impl FourierScalar {
    /// Canonical parseable rendering, e.g. `-4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)`.
    pub fn to_text(&self, roster: &CoordinateRoster) -> String {
        join_signed(&scalar_monomials(self, roster, false), false)
    }

    /// Unicode rendering, e.g. `−4π²·cos(2π·y1)·cos(2π·y2)`.
    pub fn to_pretty(&self, roster: &CoordinateRoster) -> String {
        join_signed(&scalar_monomials(self, roster, true), true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Shape;

    #[test]
    fn chebyshev() {
        assert_eq!(chebyshev_t(3), vec![0, -3, 0, 4]);
        assert_eq!(chebyshev_u(2), vec![-1, 0, 4]);
    }

    #[test]
    fn prints_product_form() {
        let sh = Shape::new(2, 2, 0);
        let r = CoordinateRoster::standard(2, 2, false);
        let f = &FourierScalar::cos_coord(sh, 0) * &FourierScalar::cos_coord(sh, 1);
        let g = f.scale(&PiPolynomial::monomial(2, Gq::int(-4)));
        assert_eq!(g.to_text(&r), "-4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)");
        assert_eq!(g.to_pretty(&r), "−4π²·cos(2π·y1)·cos(2π·y2)");
    }

    #[test]
    fn sine_square_reduces() {
        let sh = Shape::new(2, 0, 0);
        let r = CoordinateRoster::standard(2, 0, false);
        let s = FourierScalar::sin_coord(sh, 0);
        assert_eq!((&s * &s).to_text(&r), "1 - cos(2*pi*y1)^2");
    }
}
