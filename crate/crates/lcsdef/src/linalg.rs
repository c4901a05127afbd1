//! Small exact matrix routines over scalars, π-polynomials and rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ring::{FourierScalar, PiPolynomial, Shape};

/// Pfaffian of a skew matrix by expansion along the first row.
pub fn pfaffian(m: &[Vec<FourierScalar>], shape: Shape) -> FourierScalar {
    let idx: Vec<usize> = (0..m.len()).collect();
    pf_rec(m, &idx, shape)
}

fn pf_rec(m: &[Vec<FourierScalar>], idx: &[usize], shape: Shape) -> FourierScalar {
    if idx.is_empty() {
        return FourierScalar::one(shape);
    }
    if idx.len() % 2 == 1 {
        return FourierScalar::zero(shape);
    }
    let i = idx[0];
    let mut acc = FourierScalar::zero(shape);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        if m[i][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i && x != j).collect();
        let sub = pf_rec(m, &rest, shape);
        let term = &m[i][j] * &sub;
        if pos % 2 == 1 {
            acc += &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Constant scalar with an inverse in the Laurent coefficient ring.
pub fn unit_inverse(f: &FourierScalar) -> Option<PiPolynomial> {
    f.as_constant()?.inv()
}

/// Solves `A x = rhs` by Gauss–Jordan elimination using only unit pivots.
///
/// Returns `None` when some column has no unit pivot; the solution is unique
/// whenever it is returned for a square system.
pub fn solve_unit_pivot(a: &[Vec<FourierScalar>], rhs: &[FourierScalar]) -> Option<Vec<FourierScalar>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let shape = rhs[0].shape();
    let mut m: Vec<Vec<FourierScalar>> = a.iter().zip(rhs).map(|(row, r)| {
        let mut v = row.clone();
        v.push(r.clone());
        v
    }).collect();
    let cols = a[0].len();
    let mut where_col = vec![usize::MAX; cols];
    let mut row = 0;
    for col in 0..cols {
        let piv = (row..n).find(|&r| unit_inverse(&m[r][col]).is_some());
        let Some(p) = piv else {
            if (row..n).all(|r| m[r][col].is_zero()) {
                continue;
            }
            return None;
        };
        m.swap(row, p);
        let inv = unit_inverse(&m[row][col])?;
        m[row] = m[row].iter().map(|x| x.scale(&inv)).collect();
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (c, pv) in pivot_row.iter().enumerate() {
                    m[r][c] = &m[r][c] - &(&f * pv);
                }
            }
        }
        where_col[col] = row;
        row += 1;
    }
    for r in row..n {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    Some(
        (0..cols)
            .map(|c| if where_col[c] == usize::MAX { FourierScalar::zero(shape) } else { m[where_col[c]][cols].clone() })
            .collect(),
    )
}

/// Inverse of a square matrix via unit pivots.
pub fn invert_unit_pivot(a: &[Vec<FourierScalar>], shape: Shape) -> Option<Vec<Vec<FourierScalar>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<FourierScalar> = (0..n).map(|i| if i == j { FourierScalar::one(shape) } else { FourierScalar::zero(shape) }).collect();
        cols.push(solve_unit_pivot(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Rank over the fraction field of the π-polynomial ring, by division-free elimination.
pub fn rank_pi(rows: &[Vec<PiPolynomial>]) -> usize {
    let mut m: Vec<Vec<PiPolynomial>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for r in rank + 1..nrows {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            let a = pivot_row[col].clone();
            m[r] = m[r].iter().zip(&pivot_row).map(|(x, y)| &(&a * x) - &(&f * y)).collect();
        }
        rank += 1;
    }
    rank
}

/// Rank over ℚ.
pub fn rank_q(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / &m[rank][col];
        let pivot_row: Vec<BigRational> = m[rank].iter().map(|x| x * &inv).collect();
        for r in rank + 1..nrows {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..ncols {
                let d = &f * &pivot_row[c];
                m[r][c] -= d;
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Pfaffian over ℚ.
pub fn pfaffian_q(m: &[Vec<BigRational>], idx: &[usize]) -> BigRational {
    if idx.is_empty() {
        return BigRational::one();
    }
    if idx.len() % 2 == 1 {
        return BigRational::zero();
    }
    let i = idx[0];
    let mut acc = BigRational::zero();
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        if m[i][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i && x != j).collect();
        let term = &m[i][j] * pfaffian_q(m, &rest);
        if pos % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Inverse over ℚ, `None` when singular.
pub fn invert_q(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            v
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = BigRational::one() / &m[col][col];
        m[col] = m[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pr = m[col].clone();
                for c in 0..2 * n {
                    let d = &f * &pr[c];
                    m[r][c] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn pfaffian_of_standard_form() {
        let j = vec![
            vec![q(0), q(1), q(0), q(0)],
            vec![q(-1), q(0), q(0), q(0)],
            vec![q(0), q(0), q(0), q(2)],
            vec![q(0), q(0), q(-2), q(0)],
        ];
        assert_eq!(pfaffian_q(&j, &[0, 1, 2, 3]), q(2));
        assert_eq!(rank_q(&j), 4);
        let inv = invert_q(&j).unwrap();
        assert_eq!(inv[0][1], q(-1));
    }

    #[test]
    fn pi_rank() {
        let a = PiPolynomial::two_pi_i(1);
        let rows = vec![vec![a.clone(), PiPolynomial::one()], vec![&a * &a, a.clone()]];
        assert_eq!(rank_pi(&rows), 1);
    }
}
