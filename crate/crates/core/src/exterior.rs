//! Polynomial differential forms, polynomial multivector fields and vector
//! fields on affine space.
//!
//! Sign conventions, used everywhere:
//!
//! * the interior product contracts the first slot,
//!   `i_v(dz_{i1}∧…∧dz_{ik}) = Σ_r (−1)^r v_{ir} dz_{I∖ir}` (r counted from 0);
//! * a multivector contracts as `i_{v1∧…∧vp} = i_{v1}∘…∘i_{vp}`, so that
//!   `i_{R∧X} = i_R i_X`;
//! * the dual of a `p`-vector `P` is the form `i_P dvol`, with
//!   `dvol = dz_0∧…∧dz_{m−1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::ring::{HomogeneousDegree, Poly};

/// Marker for differential forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form;

/// Marker for multivector fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vector;

/// Alternating tensor with polynomial coefficients, indexed by strictly
/// increasing index tuples. Absent tuples are zero.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Alt<K> {
    nvars: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
    _kind: PhantomData<K>,
}

impl<K> Clone for Alt<K> {
    fn clone(&self) -> Self {
        Alt { nvars: self.nvars, degree: self.degree, comps: self.comps.clone(), _kind: PhantomData }
    }
}

pub type KForm = Alt<Form>;
pub type MultiVector = Alt<Vector>;

/// Sign of the permutation sorting the concatenation of two sorted, disjoint tuples.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, inversions % 2 == 1))
}

/// All strictly increasing `k`-subsets of `0..n`, lexicographic.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Complement of a sorted tuple in `0..n`.
pub fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !idx.contains(i)).collect()
}

impl<K> Alt<K> {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        Alt { nvars, degree, comps: BTreeMap::new(), _kind: PhantomData }
    }

    /// Validates and sums the given components; repeated tuples are added.
    pub fn from_components(
        nvars: usize,
        degree: usize,
        comps: impl IntoIterator<Item = (Vec<usize>, Poly)>,
    ) -> Result<Self> {
        if degree > nvars {
            return Err(Error::Precondition(format!("degree {degree} exceeds dimension {nvars}")));
        }
        let mut out = Alt::zero(nvars, degree);
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(Error::LengthMismatch { expected: degree, got: idx.len() });
            }
            if !idx.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Precondition(format!("index tuple {idx:?} is not strictly increasing")));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= nvars) {
                return Err(Error::IndexOutOfRange { index: bad, len: nvars });
            }
            if p.nvars() != nvars {
                return Err(Error::VarCountMismatch { left: nvars, right: p.nvars() });
            }
            out.add_component(idx, p);
        }
        Ok(out)
    }

    /// `dz_I` or `∂_I` with unit coefficient; the tuple may be unsorted.
    pub fn basis(nvars: usize, idx: &[usize]) -> Result<Self> {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(Alt::zero(nvars, idx.len()));
        }
        let sign = permutation_is_odd(idx);
        let c = if sign { Poly::constant(nvars, Q::from(-1)) } else { Poly::one(nvars) };
        Alt::from_components(nvars, idx.len(), [(sorted, c)])
    }

    fn add_component(&mut self, idx: Vec<usize>, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.comps.get_mut(&idx) {
            Some(c) => {
                let s = &*c + &p;
                if s.is_zero() {
                    self.comps.remove(&idx);
                } else {
                    *c = s;
                }
            }
            None => {
                self.comps.insert(idx, p);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, idx: &[usize]) -> Option<&Poly> {
        self.comps.get(idx)
    }

    /// Coefficient on `idx`, zero when absent.
    pub fn coefficient(&self, idx: &[usize]) -> Poly {
        self.comps.get(idx).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        if self.degree != other.degree {
            return Err(Error::WrongDegree { expected: self.degree, got: other.degree });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (i, p) in &other.comps {
            out.add_component(i.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Q::from(-1))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map_coefficients(|p| p.scale(c))
    }

    pub fn mul_poly(&self, f: &Poly) -> Result<Self> {
        if f.nvars() != self.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: f.nvars() });
        }
        Ok(self.map_coefficients(|p| p * f))
    }

    pub fn map_coefficients(&self, mut g: impl FnMut(&Poly) -> Poly) -> Self {
        let mut out = Alt::zero(self.nvars, self.degree);
        for (i, p) in &self.comps {
            out.add_component(i.clone(), g(p));
        }
        out
    }

    /// Exterior product with permutation-parity signs. A result degree above
    /// the dimension yields the zero tensor of that degree.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        let mut out = Alt::zero(self.nvars, self.degree + other.degree);
        if out.degree > self.nvars {
            return Ok(out);
        }
        for (i, p) in &self.comps {
            for (j, q) in &other.comps {
                if let Some((k, odd)) = merge_sign(i, j) {
                    let prod = p * q;
                    out.add_component(k, if odd { -prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Common homogeneous degree of the coefficients (`None` for the zero tensor).
    pub fn coefficient_degree(&self) -> Result<Option<u32>> {
        let mut deg = None;
        for p in self.comps.values() {
            match p.homogeneous_degree() {
                HomogeneousDegree::NotHomogeneous => return Err(Error::NotHomogeneous),
                HomogeneousDegree::Any => {}
                HomogeneousDegree::Degree(d) => match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return Err(Error::MixedDegrees),
                    _ => {}
                },
            }
        }
        Ok(deg)
    }

    /// Contracts `coeffs` (indexed by variable) into the first slot.
    fn contract_first(&self, coeffs: &[Poly]) -> Self {
        let mut out = Alt::zero(self.nvars, self.degree - 1);
        for (idx, p) in &self.comps {
            for (r, &i) in idx.iter().enumerate() {
                if coeffs[i].is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(r);
                let t = p * &coeffs[i];
                out.add_component(rest, if r % 2 == 1 { -t } else { t });
            }
        }
        out
    }

    /// Contraction by the constant tuple `∂_J` (or `dz_J`) in the iterated
    /// first-slot convention `i_{j1}∘…∘i_{jp}`.
    fn contract_constant(&self, j: &[usize]) -> Self {
        let mut out = Alt::zero(self.nvars, self.degree - j.len());
        for (idx, p) in &self.comps {
            if let Some((rest, odd)) = strip_indices(idx, j) {
                out.add_component(rest, if odd { -p.clone() } else { p.clone() });
            }
        }
        out
    }
}

impl<K> fmt::Display for Alt<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, p)) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let name: Vec<String> = idx.iter().map(|i| format!("{i}")).collect();
            write!(f, "({p})·e[{}]", name.join(","))?;
        }
        Ok(())
    }
}

fn permutation_is_odd(idx: &[usize]) -> bool {
    let mut inv = 0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] > idx[b] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// Removes the entries of `j` from `idx` one at a time, last entry of `j`
/// first, accumulating the first-slot contraction sign.
fn strip_indices(idx: &[usize], j: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut rest = idx.to_vec();
    let mut odd = false;
    for &jj in j.iter().rev() {
        let pos = rest.iter().position(|&x| x == jj)?;
        odd ^= pos % 2 == 1;
        rest.remove(pos);
    }
    Some((rest, odd))
}

impl KForm {
    /// The differential `dh` of a polynomial.
    pub fn differential(h: &Poly) -> KForm {
        let n = h.nvars();
        let mut out = KForm::zero(n, 1);
        for i in 0..n {
            out.add_component(vec![i], h.partial(i).expect("index in range"));
        }
        out
    }

    /// 0-form holding a polynomial.
    pub fn function(h: &Poly) -> KForm {
        let mut out = KForm::zero(h.nvars(), 0);
        out.add_component(Vec::new(), h.clone());
        out
    }

    /// `dz_0∧…∧dz_{n−1}`.
    pub fn volume(nvars: usize) -> KForm {
        KForm::basis(nvars, &(0..nvars).collect::<Vec<_>>()).expect("volume form")
    }

    /// Exterior derivative; forms of top degree are rejected.
    pub fn d(&self) -> Result<KForm> {
        if self.degree >= self.nvars {
            return Err(Error::Precondition("exterior derivative of a top-degree form".into()));
        }
        let mut out = KForm::zero(self.nvars, self.degree + 1);
        for (idx, p) in &self.comps {
            for j in 0..self.nvars {
                if idx.contains(&j) {
                    continue;
                }
                let dp = p.partial(j)?;
                if dp.is_zero() {
                    continue;
                }
                let (k, odd) = merge_sign(&[j], idx).expect("disjoint");
                out.add_component(k, if odd { -dp } else { dp });
            }
        }
        Ok(out)
    }

    /// Interior product `i_v`, first slot.
    pub fn interior(&self, v: &VectorField) -> Result<KForm> {
        if v.nvars() != self.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: v.nvars() });
        }
        if self.degree == 0 {
            return Err(Error::Precondition("interior product of a 0-form".into()));
        }
        Ok(self.contract_first(v.components()))
    }

    /// `i_P` for a multivector `P`, in the iterated convention.
    pub fn contract(&self, p: &MultiVector) -> Result<KForm> {
        if p.nvars() != self.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: p.nvars() });
        }
        if p.degree() > self.degree {
            return Ok(KForm::zero(self.nvars, 0));
        }
        let mut out = KForm::zero(self.nvars, self.degree - p.degree());
        for (j, c) in p.components() {
            let part = self.contract_constant(j).mul_poly(c)?;
            out = out.try_add(&part)?;
        }
        Ok(out)
    }

    /// `i_{∂_J}` for a constant multi-index.
    pub fn contract_basis(&self, j: &[usize]) -> Result<KForm> {
        if j.len() > self.degree {
            return Err(Error::Precondition("contraction degree exceeds form degree".into()));
        }
        Ok(self.contract_constant(j))
    }

    /// Cartan formula `L_v a = i_v(da) + d(i_v a)`.
    pub fn lie_derivative(&self, v: &VectorField) -> Result<KForm> {
        let first = if self.degree < self.nvars {
            self.d()?.interior(v)?
        } else {
            KForm::zero(self.nvars, self.degree)
        };
        let second = if self.degree > 0 {
            self.interior(v)?.d()?
        } else {
            KForm::zero(self.nvars, self.degree)
        };
        first.try_add(&second)
    }

    /// The unique multivector `P` with `i_P dvol = self`.
    pub fn dual_multivector(&self) -> MultiVector {
        let n = self.nvars;
        let p = n - self.degree;
        let mut out = MultiVector::zero(n, p);
        let full: Vec<usize> = (0..n).collect();
        for (idx, c) in &self.comps {
            let j = complement(n, idx);
            let (_, odd) = strip_indices(&full, &j).expect("subset");
            out.add_component(j, if odd { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Substitutes `z ↦ F(w)` and `dz_i ↦ dF_i`.
    pub fn pullback(&self, subs: &[Poly]) -> Result<KForm> {
        if subs.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: subs.len() });
        }
        let m = subs.first().map(Poly::nvars).unwrap_or(0);
        let dfs: Vec<KForm> = subs.iter().map(KForm::differential).collect();
        let mut out = KForm::zero(m, self.degree);
        for (idx, c) in &self.comps {
            let mut acc = KForm::function(&c.compose(subs)?);
            for &i in idx {
                acc = acc.wedge(&dfs[i])?;
            }
            out = out.try_add(&acc)?;
        }
        Ok(out)
    }
}

impl MultiVector {
    pub fn from_field(v: &VectorField) -> MultiVector {
        let mut out = MultiVector::zero(v.nvars(), 1);
        for (i, c) in v.components().iter().enumerate() {
            out.add_component(vec![i], c.clone());
        }
        out
    }

    /// Reads a 1-vector back as a vector field.
    pub fn to_field(&self) -> Result<VectorField> {
        if self.degree != 1 {
            return Err(Error::WrongDegree { expected: 1, got: self.degree });
        }
        VectorField::new((0..self.nvars).map(|i| self.coefficient(&[i])).collect())
    }

    /// `i_P dvol`.
    pub fn volume_contraction(&self) -> KForm {
        let n = self.nvars;
        let full: Vec<usize> = (0..n).collect();
        let mut out = KForm::zero(n, n - self.degree);
        for (j, c) in &self.comps {
            let (rest, odd) = strip_indices(&full, j).expect("subset");
            out.add_component(rest, if odd { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Contraction by a 1-form into the first slot.
    pub fn contract_one_form(&self, a: &KForm) -> Result<MultiVector> {
        if a.degree() != 1 || a.nvars() != self.nvars {
            return Err(Error::Precondition("expected a 1-form in the same variables".into()));
        }
        if self.degree == 0 {
            return Err(Error::Precondition("contraction of a 0-vector".into()));
        }
        let coeffs: Vec<Poly> = (0..self.nvars).map(|i| a.coefficient(&[i])).collect();
        Ok(self.contract_first(&coeffs))
    }

    /// Contraction by a constant covector tuple `dz_A`, iterated convention.
    pub fn contract_basis(&self, a: &[usize]) -> Result<MultiVector> {
        if a.len() > self.degree {
            return Err(Error::Precondition("contraction degree exceeds multivector degree".into()));
        }
        Ok(self.contract_constant(a))
    }
}

/// Vector field with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    nvars: usize,
    comps: Vec<Poly>,
}

impl VectorField {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        let n = comps.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = comps.iter().find(|p| p.nvars() != n) {
            return Err(Error::VarCountMismatch { left: n, right: bad.nvars() });
        }
        Ok(VectorField { nvars: n, comps })
    }

    /// Parses one expression per component.
    pub fn parse(exprs: &[&str]) -> Result<Self> {
        let n = exprs.len();
        VectorField::new(exprs.iter().map(|e| Poly::parse(n, e)).collect::<Result<_>>()?)
    }

    pub fn zero(n: usize) -> Self {
        VectorField { nvars: n, comps: vec![Poly::zero(n); n] }
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut v = VectorField::zero(n);
        v.comps[i] = Poly::one(n);
        v
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn homogeneous_degree(&self) -> HomogeneousDegree {
        let mut deg = HomogeneousDegree::Any;
        for p in &self.comps {
            match (p.homogeneous_degree(), deg) {
                (HomogeneousDegree::NotHomogeneous, _) => return HomogeneousDegree::NotHomogeneous,
                (HomogeneousDegree::Any, _) => {}
                (d, HomogeneousDegree::Any) => deg = d,
                (d, e) if d != e => return HomogeneousDegree::NotHomogeneous,
                _ => {}
            }
        }
        deg
    }

    fn check(&self, other: &VectorField) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        self.check(other)?;
        Ok(VectorField { nvars: self.nvars, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &VectorField) -> Result<VectorField> {
        self.check(other)?;
        Ok(VectorField { nvars: self.nvars, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: &Q) -> VectorField {
        VectorField { nvars: self.nvars, comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul_poly(&self, f: &Poly) -> VectorField {
        VectorField { nvars: self.nvars, comps: self.comps.iter().map(|p| p * f).collect() }
    }

    /// Derivative of a polynomial along the field.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if f.nvars() != self.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: f.nvars() });
        }
        let mut acc = Poly::zero(self.nvars);
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(c * &f.partial(i)?);
            }
        }
        Ok(acc)
    }

    /// `[a, b]_i = Σ_j (a_j ∂_j b_i − b_j ∂_j a_i)`.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField> {
        self.check(other)?;
        let comps = (0..self.nvars)
            .map(|i| Ok(&self.apply(&other.comps[i])? - &other.apply(&self.comps[i])?))
            .collect::<Result<_>>()?;
        Ok(VectorField { nvars: self.nvars, comps })
    }

    pub fn divergence(&self) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for (i, c) in self.comps.iter().enumerate() {
            acc = &acc + &c.partial(i).expect("index in range");
        }
        acc
    }

    /// Jacobian matrix `∂_j v_i`, row `i`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.comps
            .iter()
            .map(|c| (0..self.nvars).map(|j| c.partial(j).expect("index in range")).collect())
            .collect()
    }

    /// Re-reads the field in more variables, appending zero components.
    pub fn extend_vars(&self, nvars: usize) -> VectorField {
        let mut comps: Vec<Poly> = self.comps.iter().map(|p| p.extend_vars(nvars)).collect();
        comps.resize(nvars, Poly::zero(nvars));
        VectorField { nvars, comps }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `R = Σ x_i ∂_i`.
pub fn radial_field(n: usize) -> VectorField {
    VectorField { nvars: n, comps: (0..n).map(|i| Poly::var(n, i)).collect() }
}

/// The degree-2 dual `P` of an `(n−2)`-form, `i_P dvol = a`.
pub fn bivector_dual(a: &KForm) -> Result<MultiVector> {
    if a.degree() + 2 != a.nvars() {
        return Err(Error::WrongDegree { expected: a.nvars().saturating_sub(2), got: a.degree() });
    }
    Ok(a.dual_multivector())
}

/// Inverse of [`bivector_dual`].
pub fn bivector_dual_inverse(p: &MultiVector) -> Result<KForm> {
    if p.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, got: p.degree() });
    }
    Ok(p.volume_contraction())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    fn dz(n: usize, idx: &[usize]) -> KForm {
        KForm::basis(n, idx).unwrap()
    }

    #[test]
    fn wedge_signs() {
        let a = dz(2, &[0]).wedge(&dz(2, &[1])).unwrap();
        let b = dz(2, &[1]).wedge(&dz(2, &[0])).unwrap();
        assert_eq!(a, b.neg());
        assert!(dz(2, &[0]).wedge(&dz(2, &[0])).unwrap().is_zero());
        let lhs = dz(2, &[1]).mul_poly(&p(2, "x0")).unwrap();
        let rhs = dz(2, &[0]).mul_poly(&p(2, "x1")).unwrap();
        let w = lhs.wedge(&rhs).unwrap();
        assert_eq!(w, dz(2, &[0, 1]).mul_poly(&p(2, "-x0*x1")).unwrap());
    }

    #[test]
    fn wedge_above_dimension_is_zero() {
        let w = dz(2, &[0, 1]).wedge(&dz(2, &[0])).unwrap();
        assert_eq!(w.degree(), 3);
        assert!(w.is_zero());
    }

    #[test]
    fn exterior_derivative_examples() {
        let a = dz(3, &[1]).mul_poly(&p(3, "x0")).unwrap();
        assert_eq!(a.d().unwrap(), dz(3, &[0, 1]));
        let b = dz(3, &[1, 2]).mul_poly(&p(3, "x0^2")).unwrap();
        assert_eq!(b.d().unwrap(), dz(3, &[0, 1, 2]).mul_poly(&p(3, "2*x0")).unwrap());
        assert!(KForm::volume(3).d().is_err());
    }

    #[test]
    fn interior_examples() {
        let r = radial_field(2);
        assert_eq!(
            dz(2, &[0, 1]).interior(&r).unwrap(),
            dz(2, &[1]).mul_poly(&p(2, "x0")).unwrap().try_sub(&dz(2, &[0]).mul_poly(&p(2, "x1")).unwrap()).unwrap()
        );
        let e0 = VectorField::coordinate(3, 0);
        assert_eq!(KForm::volume(3).interior(&e0).unwrap(), dz(3, &[1, 2]));
        assert!(KForm::function(&p(3, "x0")).interior(&e0).is_err());
    }

    #[test]
    fn omega_small_case_matches_hand_expansion() {
        // n = 3, X = x1 ∂0
        let x = VectorField::new(vec![p(3, "x1"), Poly::zero(3), Poly::zero(3)]).unwrap();
        let om = KForm::volume(3).interior(&x).unwrap().interior(&radial_field(3)).unwrap();
        let want = dz(3, &[2]).mul_poly(&p(3, "x1^2")).unwrap().try_sub(&dz(3, &[1]).mul_poly(&p(3, "x1*x2")).unwrap()).unwrap();
        assert_eq!(om, want);
    }

    #[test]
    fn bracket_examples() {
        let d0 = VectorField::coordinate(2, 0);
        let x0d1 = VectorField::new(vec![Poly::zero(2), p(2, "x0")]).unwrap();
        assert_eq!(d0.lie_bracket(&x0d1).unwrap(), VectorField::coordinate(2, 1));
        for d in 2..5u32 {
            let x = VectorField::new(vec![p(3, &format!("x1^{d}")), Poly::zero(3), Poly::zero(3)]).unwrap();
            let br = radial_field(3).lie_bracket(&x).unwrap();
            assert_eq!(br, x.scale(&Q::from(d as i64 - 1)));
        }
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(radial_field(5).divergence(), Poly::constant(5, Q::from(5)));
        let v = VectorField::new(vec![p(2, "x0^2"), Poly::zero(2)]).unwrap();
        assert_eq!(v.divergence(), p(2, "2*x0"));
    }

    #[test]
    fn lie_derivative_of_differentials() {
        let r = radial_field(3);
        assert_eq!(dz(3, &[0]).lie_derivative(&r).unwrap(), dz(3, &[0]));
        let a = dz(3, &[0, 2]).mul_poly(&p(3, "x0*x1 - x2^2")).unwrap();
        assert_eq!(a.lie_derivative(&r).unwrap(), a.scale(&Q::from(4)));
    }

    #[test]
    fn duality_round_trip_and_convention() {
        let a = KForm::volume(4).contract_basis(&[2, 3]).unwrap();
        let dual = bivector_dual(&a).unwrap();
        assert_eq!(dual, MultiVector::basis(4, &[2, 3]).unwrap());
        assert_eq!(dual, MultiVector::basis(4, &[3, 2]).unwrap().neg());
        assert_eq!(bivector_dual_inverse(&dual).unwrap(), a);
        let b = dz(4, &[0, 3]).mul_poly(&p(4, "x1 - 2*x2^3")).unwrap();
        assert_eq!(bivector_dual_inverse(&bivector_dual(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn dual_of_omega_is_r_wedge_x() {
        let x = VectorField::parse(&["x1^2 - x3*x0", "x2^2", "x3^2 + x0*x1", "x0^2"]).unwrap();
        let r = radial_field(4);
        let om = KForm::volume(4).interior(&x).unwrap().interior(&r).unwrap();
        let rx = MultiVector::from_field(&r).wedge(&MultiVector::from_field(&x)).unwrap();
        assert_eq!(bivector_dual(&om).unwrap(), rx);
    }

    #[test]
    fn iterated_contraction_matches_multivector_contraction() {
        let x = VectorField::parse(&["x1", "x2*x0", "x0^2", "x3"]).unwrap();
        let y = VectorField::parse(&["x3^2", "x0", "x1*x2", "1"]).unwrap();
        let vol = KForm::volume(4);
        let it = vol.interior(&y).unwrap().interior(&x).unwrap();
        let xy = MultiVector::from_field(&x).wedge(&MultiVector::from_field(&y)).unwrap();
        assert_eq!(vol.contract(&xy).unwrap(), it);
        assert_eq!(xy.volume_contraction(), it);
    }

    #[test]
    fn pullback_along_a_constant_coordinate_keeps_the_degree() {
        let w = KForm::basis(3, &[0, 1]).unwrap().try_add(&KForm::basis(3, &[1, 2]).unwrap()).unwrap();
        let subs = vec![Poly::one(2), Poly::var(2, 0), Poly::var(2, 1)];
        let pb = w.pullback(&subs).unwrap();
        assert_eq!(pb.degree(), 2);
        assert_eq!(pb, KForm::basis(2, &[0, 1]).unwrap());
    }

    #[test]
    fn pullback_of_differential_is_differential_of_composite() {
        let h = p(2, "x0^2*x1 + x1^3");
        let subs = vec![p(3, "x0*x2"), p(3, "x1 - x2^2")];
        let lhs = KForm::differential(&h).pullback(&subs).unwrap();
        let rhs = KForm::differential(&h.compose(&subs).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn index_tuple_enumeration() {
        assert_eq!(index_tuples(4, 2).len(), 6);
        assert_eq!(index_tuples(3, 0), vec![Vec::<usize>::new()]);
        assert!(index_tuples(2, 3).is_empty());
    }
}
