//! Polynomials and polynomial maps compiled for repeated complex evaluation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::exterior::VectorField;
use crate::ring::Poly;

/// Neumaier-compensated accumulator for complex sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.cre, z.re);
        neumaier(&mut self.im, &mut self.cim, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.cre, self.im + self.cim)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumPoly {
    nvars: usize,
    max_exp: Vec<u16>,
    terms: Vec<(Vec<u16>, Complex64)>,
}

impl NumPoly {
    pub fn from_poly(p: &Poly) -> Self {
        let n = p.nvars();
        let mut max_exp = vec![0u16; n];
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                for (mx, &e) in max_exp.iter_mut().zip(m.exps()) {
                    *mx = (*mx).max(e);
                }
                (m.exps().to_vec(), Complex64::new(c.to_f64(), 0.0))
            })
            .collect();
        NumPoly { nvars: n, max_exp, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Vec<u16>, Complex64)] {
        &self.terms
    }

    /// Sum of coefficient magnitudes times monomial magnitudes at `x`,
    /// the natural scale for judging whether a value is small.
    pub fn magnitude(&self, x: &[Complex64]) -> f64 {
        let pw = self.powers(x);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.norm();
                for (i, &k) in e.iter().enumerate() {
                    t *= pw[i][k as usize].norm();
                }
                t
            })
            .sum()
    }

    fn powers(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        x.iter()
            .zip(&self.max_exp)
            .map(|(&xi, &mx)| {
                let mut v = Vec::with_capacity(mx as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                v.push(acc);
                for _ in 0..mx {
                    acc *= xi;
                    v.push(acc);
                }
                v
            })
            .collect()
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let pw = self.powers(x);
        let mut s = CompensatedSum::default();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= pw[i][k as usize];
                }
            }
            s.add(t);
        }
        s.value()
    }
}

/// A polynomial map `C^m → C^k` together with its Jacobian.
#[derive(Clone, Debug)]
pub struct NumMap {
    nvars: usize,
    comps: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
}

impl NumMap {
    pub fn new(polys: &[Poly]) -> Self {
        let nvars = polys.first().map(Poly::nvars).unwrap_or(0);
        let comps = polys.iter().map(NumPoly::from_poly).collect();
        let jac = polys
            .iter()
            .map(|p| (0..nvars).map(|j| NumPoly::from_poly(&p.partial(j).expect("index"))).collect())
            .collect();
        NumMap { nvars, comps, jac }
    }

    pub fn from_field(v: &VectorField) -> Self {
        NumMap::new(v.components())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, i: usize) -> &NumPoly {
        &self.comps[i]
    }

    pub fn eval(&self, x: &[Complex64]) -> DVector<Complex64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|p| p.eval(x)))
    }

    pub fn jacobian(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.comps.len(), self.nvars, |i, j| self.jac[i][j].eval(x))
    }

    /// Largest component magnitude scale at `x`.
    pub fn magnitude(&self, x: &[Complex64]) -> f64 {
        self.comps.iter().map(|p| p.magnitude(x)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Q;

    #[test]
    fn evaluation_matches_exact_value() {
        let p = Poly::parse(2, "x0^3 - 2*x0*x1 + 1/3").unwrap();
        let exact = p.eval(&[Q::from(2), Q::from(-1)]).unwrap().to_f64();
        let z = NumPoly::from_poly(&p).eval(&[Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!((z.re - exact).abs() < 1e-14 && z.im == 0.0);
    }

    #[test]
    fn compensated_sum_survives_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(Complex64::new(x, 0.0));
        }
        assert_eq!(s.value().re, 2.0);
    }

    #[test]
    fn jacobian_of_quadratic_map() {
        let m = NumMap::new(&[Poly::parse(2, "x0*x1").unwrap(), Poly::parse(2, "x0^2").unwrap()]);
        let j = m.jacobian(&[Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)]);
        assert_eq!(j[(0, 0)], Complex64::new(2.0, 0.0));
        assert_eq!(j[(0, 1)], Complex64::new(1.0, 1.0));
        assert_eq!(j[(1, 0)], Complex64::new(2.0, 2.0));
        assert_eq!(j[(1, 1)], Complex64::new(0.0, 0.0));
    }
}
