//! Dense univariate polynomials over the rationals, plus the Sylvester
//! resultant over `Q[u]` used to eliminate one variable of a planar system.

use std::ops::{Add, Mul, Neg, Sub};

use crate::rational::Q;

/// Coefficients stored low degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Q::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        UPoly::new(vec![c])
    }

    pub fn x() -> Self {
        UPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Q) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Q::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn monic(&self) -> UPoly {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => UPoly::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            // keep coefficients from exploding
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Q::to_f64).collect()
    }
}

impl<'a> Add<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Q::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        self + &(-rhs)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UPoly::new(out)
    }
}

/// Resultant with respect to `v` of two polynomials given by their
/// coefficient lists in `v` (low degree first), each coefficient in `Q[u]`.
///
/// The Sylvester determinant is computed by fraction-free (Bareiss)
/// elimination over `Q[u]`, where every division is exact.
pub fn sylvester_resultant(a: &[UPoly], b: &[UPoly]) -> UPoly {
    let trim = |c: &[UPoly]| {
        let mut v = c.to_vec();
        while v.last().is_some_and(UPoly::is_zero) {
            v.pop();
        }
        v
    };
    let a = trim(a);
    let b = trim(b);
    if a.is_empty() || b.is_empty() {
        return UPoly::zero();
    }
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 && n == 0 {
        return UPoly::constant(Q::one());
    }
    if m == 0 {
        return pow(&a[0], n);
    }
    if n == 0 {
        return pow(&b[0], m);
    }
    let size = m + n;
    let mut mat = vec![vec![UPoly::zero(); size]; size];
    // rows hold coefficients from highest power of v down
    for r in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn pow(p: &UPoly, e: usize) -> UPoly {
    let mut acc = UPoly::constant(Q::one());
    for _ in 0..e {
        acc = &acc * p;
    }
    acc
}

fn bareiss_det(mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    let mut sign = Q::one();
    let mut prev = UPoly::constant(Q::one());
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return UPoly::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = UPoly::zero();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&v| Q::from(v)).collect())
    }

    #[test]
    fn gcd_and_squarefree() {
        // (x-1)^2 (x+2) and (x-1)(x+3)
        let a = &(&up(&[-1, 1]) * &up(&[-1, 1])) * &up(&[2, 1]);
        let b = &up(&[-1, 1]) * &up(&[3, 1]);
        assert_eq!(a.gcd(&b), up(&[-1, 1]));
        assert_eq!(a.squarefree(), &up(&[-1, 1]) * &up(&[2, 1]));
    }

    #[test]
    fn division_identity() {
        let a = up(&[5, -3, 0, 2, 1]);
        let d = up(&[1, 2]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn resultant_of_constants_in_u() {
        // v^2 - 2 and v - 1: the first evaluated at the root of the second
        let a = vec![up(&[-2]), up(&[]), up(&[1])];
        let b = vec![up(&[-1]), up(&[1])];
        let r = sylvester_resultant(&a, &b);
        assert_eq!(r, up(&[-1]));
    }

    #[test]
    fn resultant_eliminates_common_root() {
        // a = v - u, b = v^2 - 1  => Res_v = u^2 - 1
        let a = vec![up(&[0, -1]), up(&[1])];
        let b = vec![up(&[-1]), up(&[]), up(&[1])];
        assert_eq!(sylvester_resultant(&a, &b), up(&[-1, 0, 1]));
    }
}
