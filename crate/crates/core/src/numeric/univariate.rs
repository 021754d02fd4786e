//! Dense complex univariate polynomials: restriction of multivariate
//! polynomials to lines, remainders, and simultaneous root finding.

use num_complex::Complex64;

use super::cpoly::NumPoly;

type C = Complex64;

/// Coefficients low degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly(pub Vec<C>);

impl CPoly {
    pub fn zero() -> Self {
        CPoly(Vec::new())
    }

    pub fn constant(c: C) -> Self {
        CPoly(vec![c])
    }

    /// `a + b·t`.
    pub fn linear(a: C, b: C) -> Self {
        CPoly(vec![a, b])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return CPoly::zero();
        }
        let mut out = vec![C::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly(out)
    }

    pub fn add_assign(&mut self, other: &CPoly) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), C::new(0.0, 0.0));
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn scale(&self, c: C) -> CPoly {
        CPoly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: C) -> C {
        self.0.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> CPoly {
        CPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
    }

    /// Drops leading coefficients below `tol` times the largest one.
    pub fn trimmed(&self, tol: f64) -> CPoly {
        let scale = self.max_abs();
        let mut v = self.0.clone();
        while v.last().is_some_and(|c| c.norm() <= tol * scale) {
            v.pop();
        }
        CPoly(v)
    }

    /// Remainder of division by `d`, whose leading coefficient must be nonzero.
    pub fn rem(&self, d: &CPoly) -> CPoly {
        let dd = d.0.len() - 1;
        let lc = d.0[dd];
        let mut r = self.0.clone();
        if r.len() <= dd {
            return CPoly(r);
        }
        for k in (0..r.len() - dd).rev() {
            let q = r[k + dd] / lc;
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= q * dc;
            }
        }
        r.truncate(dd);
        CPoly(r)
    }
}

/// Univariate image of `p` along `t ↦ base + t·dir`.
pub fn restrict(p: &NumPoly, base: &[C], dir: &[C]) -> CPoly {
    let terms = p.terms();
    let n = base.len();
    let max_e: Vec<usize> = (0..n)
        .map(|i| terms.iter().map(|(e, _)| e[i] as usize).max().unwrap_or(0))
        .collect();
    let pw: Vec<Vec<CPoly>> = (0..n)
        .map(|i| {
            let l = CPoly::linear(base[i], dir[i]);
            let mut v = vec![CPoly::constant(C::new(1.0, 0.0))];
            for k in 0..max_e[i] {
                let next = v[k].mul(&l);
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc = CPoly::zero();
    for (e, c) in terms {
        let mut t = CPoly::constant(*c);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = t.mul(&pw[i][k as usize]);
            }
        }
        acc.add_assign(&t);
    }
    acc
}

/// All complex roots by Durand–Kerner (Weierstrass) iteration followed by
/// a Newton polish. Leading zeros are trimmed first.
pub fn roots(p: &CPoly) -> Vec<C> {
    let p = p.trimmed(0.0);
    let deg = p.degree();
    if p.0.len() < 2 {
        return Vec::new();
    }
    let lc = p.0[deg];
    let monic: Vec<C> = p.0.iter().map(|c| c / lc).collect();
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = bound.min(
        // Fujiwara-type bound, usually much tighter
        2.0 * (0..deg)
            .map(|k| monic[k].norm().powf(1.0 / (deg - k) as f64))
            .fold(0.0, f64::max),
    );
    let seed = C::new(0.4, 0.9);
    let mut z: Vec<C> = (0..deg).map(|k| seed.powu(k as u32) * radius.max(1e-3)).collect();
    let eval = |t: C| monic.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * t + c);
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut den = C::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C::new(1e-300, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let dp = p.derivative();
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = p.eval(*r) / d;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn roots_of_unity() {
        let mut v = vec![c(-1.0)];
        v.extend(std::iter::repeat(c(0.0)).take(6));
        v.push(c(1.0));
        let rs = roots(&CPoly(v));
        assert_eq!(rs.len(), 7);
        for r in &rs {
            assert!((r.powu(7) - c(1.0)).norm() < 1e-13);
        }
        for i in 0..7 {
            for j in i + 1..7 {
                assert!((rs[i] - rs[j]).norm() > 0.1);
            }
        }
    }

    #[test]
    fn remainder_vanishes_for_multiples() {
        let a = CPoly(vec![c(1.0), c(2.0), c(-1.0)]);
        let b = CPoly(vec![C::new(0.5, 1.0), c(3.0)]);
        let prod = a.mul(&b);
        assert!(prod.rem(&b).max_abs() < 1e-14);
        assert!(prod.rem(&a).max_abs() < 1e-14);
    }
}
