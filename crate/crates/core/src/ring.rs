//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted in descending graded-reverse-lexicographic order with
//! no zero coefficients, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::upoly::UPoly;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn new(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// Weighted degree `<exps, weights>`.
    pub fn weighted_degree(&self, weights: &[u32]) -> i64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as i64 * w as i64)
            .sum()
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic order.
    fn cmp(&self, other: &Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `n` variables, descending grevlex.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, pos: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if pos + 1 == n {
            cur.push(left as u16);
            out.push(Monomial::new(cur));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u16);
            rec(n, pos + 1, left - e, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(n, 0, d, &mut Vec::with_capacity(n), &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Outcome of a homogeneity query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomogeneousDegree {
    /// The zero polynomial is homogeneous of every degree.
    Any,
    Degree(u32),
    NotHomogeneous,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Poly::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::from_terms(nvars, [(Monomial::var(nvars, i), Q::one())])
    }

    pub fn monomial(nvars: usize, exps: &[u16], c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        Poly::from_terms(nvars, [(Monomial::new(exps), c)])
    }

    /// Builds a canonical polynomial from arbitrary terms (duplicates merged).
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "exponent vector length");
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Poly::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: FxHashMap<Monomial, Q>) -> Self {
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { nvars, terms }
    }

    /// Assumes `terms` already sorted descending without duplicates or zeros.
    fn from_sorted(nvars: usize, terms: Vec<(Monomial, Q)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn homogeneous_degree(&self) -> HomogeneousDegree {
        let mut it = self.terms.iter().map(|(m, _)| m.degree());
        let Some(first) = it.next() else {
            return HomogeneousDegree::Any;
        };
        if it.all(|d| d == first) {
            HomogeneousDegree::Degree(first)
        } else {
            HomogeneousDegree::NotHomogeneous
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree() != HomogeneousDegree::NotHomogeneous
    }

    /// Sum of absolute values of the coefficients, as a float.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.to_f64().abs()).sum()
    }

    fn check_vars(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), if negate { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (m.clone(), if negate { -c } else { c.clone() })),
        );
        Poly::from_sorted(self.nvars, out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let mut acc: FxHashMap<Monomial, Q> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * 2, Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(self.nvars, acc)
    }

    /// Multiplication by a single term preserves the order.
    pub fn mul_term(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_sorted(
            self.nvars,
            self.terms.iter().map(|(t, d)| (t.mul(m), d * c)).collect(),
        )
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_sorted(self.nvars, self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, len: self.nvars });
        }
        let terms = self.terms.iter().filter(|(m, _)| m.0[i] > 0).map(|(m, c)| {
            let e = m.0[i];
            let mut n = m.clone();
            n.0[i] -= 1;
            (n, c * &Q::from(e as i64))
        });
        // differentiation can reorder terms across degrees only uniformly; re-sort to be safe
        Ok(Poly::from_terms(self.nvars, terms))
    }

    pub fn eval(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: point.len() });
        }
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exps()) {
                if e > 0 {
                    t = &t * &x.pow(e as u32);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Float evaluation at a complex point with compensated summation.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: point.len() });
        }
        Ok(crate::numeric::cpoly::NumPoly::from_poly(self).eval(point))
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share a variable count.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: subs.len() });
        }
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        if let Some(bad) = subs.iter().find(|p| p.nvars != target) {
            return Err(Error::VarCountMismatch { left: target, right: bad.nvars });
        }
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; self.nvars];
        let mut acc = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Sets variable `j` to `value` and drops it from the ring.
    pub fn specialize_drop(&self, j: usize, value: &Q) -> Result<Poly> {
        if j >= self.nvars {
            return Err(Error::IndexOutOfRange { index: j, len: self.nvars });
        }
        let n = self.nvars - 1;
        let terms = self.terms.iter().map(|(m, c)| {
            let e = m.0[j];
            let mut exps: SmallVec<[u16; 8]> = m.0.clone();
            exps.remove(j);
            (Monomial(exps), c * &value.pow(e as u32))
        });
        Ok(Poly::from_terms(n, terms))
    }

    /// Re-reads the polynomial in `nvars` variables (must not shrink), padding
    /// new trailing variables with exponent zero.
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = m.0.clone();
            exps.resize(nvars, 0);
            (Monomial(exps), c.clone())
        });
        Poly::from_terms(nvars, terms)
    }

    /// Multivariate division by a single divisor in grevlex order.
    pub fn div_rem(&self, h: &Poly) -> Result<(Poly, Poly)> {
        self.check_vars(h)?;
        let Some((lm, lc)) = h.leading().cloned() else {
            return Err(Error::DivisionByZero);
        };
        let mut work: BTreeMap<Monomial, Q> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        let mut rem = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = &c / &lc;
                for (hm, hc) in h.terms.iter().skip(1) {
                    let tm = hm.mul(&qm);
                    let tc = hc * &qc;
                    let vanished = {
                        let entry = work.entry(tm.clone()).or_insert_with(Q::zero);
                        *entry -= &tc;
                        entry.is_zero()
                    };
                    // pop_last must only ever see live terms
                    if vanished {
                        work.remove(&tm);
                    }
                }
                quot.push((qm, qc));
            } else {
                rem.push((m, c));
            }
        }
        Ok((Poly::from_terms(self.nvars, quot), Poly::from_sorted(self.nvars, rem)))
    }

    /// Univariate image `t ↦ self(base + t·dir)`.
    pub fn restrict_to_line(&self, base: &[Q], dir: &[Q]) -> Result<LineRestriction> {
        if base.len() != self.nvars || dir.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: base.len().min(dir.len()) });
        }
        if dir.iter().all(Q::is_zero) {
            return Err(Error::Precondition("line direction is the zero vector".into()));
        }
        let lines: Vec<UPoly> = base
            .iter()
            .zip(dir)
            .map(|(b, d)| UPoly::new(vec![b.clone(), d.clone()]))
            .collect();
        let mut acc = UPoly::zero();
        for (m, c) in &self.terms {
            let mut t = UPoly::constant(c.clone());
            for (l, &e) in lines.iter().zip(m.exps()) {
                for _ in 0..e {
                    t = &t * l;
                }
            }
            acc = &acc + &t;
        }
        Ok(LineRestriction { base: base.to_vec(), direction: dir.to_vec(), image: acc })
    }

    /// Homogeneous polynomial with random small integer coefficients.
    pub fn random_homogeneous<R: Rng>(rng: &mut R, nvars: usize, degree: u32, density: f64, bound: i64) -> Poly {
        let terms = monomials_of_degree(nvars, degree).into_iter().filter_map(|m| {
            if rng.gen::<f64>() < density {
                let c = rng.gen_range(-bound..=bound);
                Some((m, Q::from(c)))
            } else {
                None
            }
        });
        Poly::from_terms(nvars, terms)
    }

    /// Parses expressions such as `x0^2*x1 - 3/2*x2 + 4`. Variables are
    /// `x<i>` or `z<i>`; only `+`, `-`, `*`, `^` and rational literals.
    pub fn parse(nvars: usize, src: &str) -> Result<Poly> {
        let mut acc = Poly::zero(nvars);
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut chunks = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                chunks.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        chunks.push(cur);
        for chunk in chunks {
            let (sign, body) = match chunk.strip_prefix('-') {
                Some(rest) => (Q::from(-1), rest.to_string()),
                None => (Q::one(), chunk.trim_start_matches('+').to_string()),
            };
            let mut coeff = sign;
            let mut exps = vec![0u16; nvars];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in `{src}`")));
                }
                if factor.starts_with('x') || factor.starts_with('z') {
                    let (var, pow) = match factor[1..].split_once('^') {
                        Some((v, p)) => (v, p.parse::<u16>().map_err(|_| Error::Parse(factor.into()))?),
                        None => (&factor[1..], 1),
                    };
                    let i: usize = var.parse().map_err(|_| Error::Parse(factor.into()))?;
                    if i >= nvars {
                        return Err(Error::IndexOutOfRange { index: i, len: nvars });
                    }
                    exps[i] += pow;
                } else {
                    let q: Q = factor.parse().map_err(|_| Error::Parse(factor.into()))?;
                    coeff = &coeff * &q;
                }
            }
            acc = &acc + &Poly::monomial(nvars, &exps, coeff);
        }
        Ok(acc)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

// Operator sugar panics on mismatched rings; fallible callers use try_*.
impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("poly add")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("poly sub")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("poly mul")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Q::from(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// A polynomial restricted to the affine line `base + t·direction`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineRestriction {
    pub base: Vec<Q>,
    pub direction: Vec<Q>,
    pub image: UPoly,
}

/// Verdict of the randomized line-restriction coprimality test.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CoprimalityVerdict {
    pub coprime: bool,
    pub lines_tried: usize,
    pub seed: u64,
    pub note: String,
}

/// Restricts the polynomials to random rational lines and takes univariate
/// gcds. A constant gcd on any line proves there is no common factor; a
/// nonconstant gcd on every line only makes one likely.
pub fn coprimality_check(polys: &[Poly], num_lines: usize, seed: u64) -> Result<CoprimalityVerdict> {
    use rand::SeedableRng;
    if polys.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let n = polys[0].nvars();
    for p in polys {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if p.nvars() != n {
            return Err(Error::VarCountMismatch { left: n, right: p.nvars() });
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for line in 0..num_lines.max(1) {
        let base: Vec<Q> = (0..n).map(|_| Q::from(rng.gen_range(-50i64..=50))).collect();
        let mut dir: Vec<Q> = (0..n).map(|_| Q::from(rng.gen_range(-50i64..=50))).collect();
        if dir.iter().all(Q::is_zero) {
            dir[0] = Q::one();
        }
        let mut g: Option<UPoly> = None;
        for p in polys {
            let img = p.restrict_to_line(&base, &dir)?.image;
            g = Some(match g {
                None => img,
                Some(acc) => acc.gcd(&img),
            });
        }
        if g.map(|g| g.degree().unwrap_or(0) == 0).unwrap_or(true) {
            return Ok(CoprimalityVerdict {
                coprime: true,
                lines_tried: line + 1,
                seed,
                note: "constant gcd on a line certifies no common factor".into(),
            });
        }
    }
    Ok(CoprimalityVerdict {
        coprime: false,
        lines_tried: num_lines.max(1),
        seed,
        note: "nonconstant gcd on every line: common factor likely".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p(2, "x0 + x1");
        let b = p(2, "x0 - x1");
        assert_eq!(&a * &b, p(2, "x0^2 - x1^2"));
        assert!((&a * &Poly::zero(2)).is_zero());
    }

    #[test]
    fn product_matches_naive_convolution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = Poly::random_homogeneous(&mut rng, 3, 3, 0.8, 9);
        let b = Poly::random_homogeneous(&mut rng, 3, 3, 0.8, 9);
        // oracle: dense double loop over the degree-6 monomials
        let mut expected = Vec::new();
        for m in monomials_of_degree(3, 6) {
            let mut c = Q::zero();
            for (ma, ca) in a.terms() {
                if ma.divides(&m) {
                    c += &(ca * &b.coefficient(&ma.quotient_of(&m)));
                }
            }
            expected.push((m, c));
        }
        assert_eq!(&a * &b, Poly::from_terms(3, expected));
    }

    #[test]
    fn mismatched_rings_error() {
        assert!(matches!(
            Poly::var(2, 0).try_mul(&Poly::var(3, 0)),
            Err(Error::VarCountMismatch { .. })
        ));
    }

    #[test]
    fn partial_derivatives() {
        assert_eq!(p(2, "x0^2*x1").partial(0).unwrap(), p(2, "2*x0*x1"));
        assert!(p(2, "x1^3").partial(0).unwrap().is_zero());
        assert!(matches!(p(2, "x0").partial(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn euler_identity_degree_five() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = Poly::random_homogeneous(&mut rng, 4, 5, 0.5, 20);
        let mut lhs = Poly::zero(4);
        for i in 0..4 {
            lhs = &lhs + &(&Poly::var(4, i) * &a.partial(i).unwrap());
        }
        // term-by-term oracle: each term picks up its own total degree
        for (m, c) in lhs.terms() {
            assert_eq!(c, &(&a.coefficient(m) * &Q::from(5)));
        }
        assert_eq!(lhs, a.scale(&Q::from(5)));
    }

    #[test]
    fn evaluation() {
        assert_eq!(p(2, "x0^2 - x1").eval(&[Q::from(2), Q::from(3)]).unwrap(), Q::one());
        let a = p(3, "x0*x1 + 7/3");
        assert_eq!(a.eval(&[Q::zero(), Q::zero(), Q::zero()]).unwrap(), Q::new(7, 3));
        assert!(a.eval(&[Q::zero()]).is_err());
    }

    #[test]
    fn evaluation_matches_naive_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = Poly::random_homogeneous(&mut rng, 3, 4, 0.7, 10);
        let pt = [Q::new(1, 2), Q::new(-3, 5), Q::from(2)];
        let mut oracle = Q::zero();
        for (m, c) in a.terms() {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = &t * &pt[i];
                }
            }
            oracle = &oracle + &t;
        }
        assert_eq!(a.eval(&pt).unwrap(), oracle);
        let z = a.eval_complex(&pt.iter().map(|q| Complex64::new(q.to_f64(), 0.0)).collect::<Vec<_>>()).unwrap();
        assert!((z.re - oracle.to_f64()).abs() < 1e-9);
    }

    #[test]
    fn homogeneity() {
        assert_eq!(p(3, "x0*x1 + x2^2").homogeneous_degree(), HomogeneousDegree::Degree(2));
        assert_eq!(p(3, "x0 + x1^2").homogeneous_degree(), HomogeneousDegree::NotHomogeneous);
        assert_eq!(Poly::zero(3).homogeneous_degree(), HomogeneousDegree::Any);
    }

    #[test]
    fn division() {
        let (q, r) = p(2, "x0^2 - x1^2").div_rem(&p(2, "x0 - x1")).unwrap();
        assert_eq!(q, p(2, "x0 + x1"));
        assert!(r.is_zero());
        let (_, r) = p(2, "x0").div_rem(&p(2, "x1")).unwrap();
        assert_eq!(r, p(2, "x0"));
        assert_eq!(p(2, "x0").div_rem(&Poly::zero(2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn division_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let q = Poly::random_homogeneous(&mut rng, 3, 3, 0.6, 5);
            let h = Poly::random_homogeneous(&mut rng, 3, 2, 0.8, 5);
            if h.is_zero() {
                continue;
            }
            let (quot, rem) = (&q * &h).div_rem(&h).unwrap();
            assert!(rem.is_zero());
            assert_eq!(quot, q);
        }
    }

    #[test]
    fn coprimality() {
        let v = coprimality_check(&[p(2, "x0"), p(2, "x1")], 5, 1).unwrap();
        assert!(v.coprime);
        let shared = coprimality_check(&[p(2, "x0^2 + x0*x1"), p(2, "x1*x0 + x1^2")], 5, 1).unwrap();
        assert!(!shared.coprime);
        let diag: Vec<Poly> = (0..4).map(|i| p(5, &format!("x{i}^2 - x4^2"))).collect();
        assert!(coprimality_check(&diag, 5, 2).unwrap().coprime);
        assert_eq!(coprimality_check(&[p(2, "x0")], 3, 0), Err(Error::EmptyInput));
        assert_eq!(coprimality_check(&[p(2, "x0"), Poly::zero(2)], 3, 0), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn monomial_enumeration() {
        let m = monomials_of_degree(2, 2);
        let e: Vec<&[u16]> = m.iter().map(|m| m.exps()).collect();
        assert_eq!(e, vec![&[2, 0][..], &[1, 1], &[0, 2]]);
        assert_eq!(monomials_of_degree(3, 0), vec![Monomial::one(3)]);
        assert_eq!(monomials_of_degree(4, 3).len(), 20);
    }

    #[test]
    fn terms_are_sorted_grevlex() {
        let a = p(3, "x2^2 + x0*x1 + x0^2 + x1^2 + x0*x2");
        let order: Vec<String> = a.terms().iter().map(|(m, _)| format!("{:?}", m.exps())).collect();
        assert_eq!(order, vec!["[2, 0, 0]", "[1, 1, 0]", "[0, 2, 0]", "[1, 0, 1]", "[0, 0, 2]"]);
    }

    #[test]
    fn display_round_trip() {
        let a = p(3, "x0^2*x1 - 3/2*x2 + 4");
        assert_eq!(Poly::parse(3, &a.to_string()).unwrap(), a);
    }
}
