//! Graded spaces of polynomial vector fields under the adjoint action of a
//! diagonal linear field `S = Σ k_j x_j ∂_j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::VectorField;
use crate::linalg::QMatrix;
use crate::rational::Q;
use crate::ring::{Monomial, Poly};

/// Positive integer weights `k_0, …, k_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if weights.contains(&0) {
            return Err(Error::Precondition("weights must be positive".into()));
        }
        Ok(WeightVector(weights))
    }

    /// Weights of the radial field.
    pub fn radial(n: usize) -> Self {
        WeightVector(vec![1; n])
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn is_uniform(&self) -> bool {
        self.0.iter().all(|&k| k == self.0[0])
    }

    /// The semisimple field itself.
    pub fn field(&self) -> VectorField {
        let n = self.0.len();
        VectorField::new((0..n).map(|i| Poly::var(n, i).scale(&Q::from(self.0[i]))).collect()).expect("n ≥ 1")
    }
}

/// All exponent vectors with `<σ, k> = target`, descending grevlex.
pub fn monomials_of_weighted_degree(weights: &[u32], target: i64) -> Vec<Monomial> {
    fn rec(w: &[u32], pos: usize, left: i64, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if pos == w.len() {
            if left == 0 {
                out.push(Monomial::new(cur));
            }
            return;
        }
        let k = w[pos] as i64;
        let mut e = 0;
        while e * k <= left {
            cur.push(e as u16);
            rec(w, pos + 1, left - e * k, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    if target >= 0 {
        rec(weights, 0, target, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// A finite basis of vector fields inside `Σ(S, ℓ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradedSubspace {
    pub weights: WeightVector,
    pub level: i64,
    pub basis: Vec<VectorField>,
    /// `(σ, j)` for each basis element when the basis is monomial.
    pub monomial_labels: Option<Vec<(Monomial, usize)>>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in a monomial basis; `None` if `v` leaves the space.
    pub fn coordinates(&self, v: &VectorField) -> Option<Vec<Q>> {
        let labels = self.monomial_labels.as_ref()?;
        let mut out = vec![Q::zero(); labels.len()];
        let mut used = 0;
        for (pos, (m, j)) in labels.iter().enumerate() {
            let c = v.component(*j).coefficient(m);
            if !c.is_zero() {
                used += 1;
                out[pos] = c;
            }
        }
        let total: usize = v.components().iter().map(Poly::len).sum();
        (used == total).then_some(out)
    }

    /// Linear combination of basis elements.
    pub fn combine(&self, coeffs: &[Q]) -> VectorField {
        let n = self.weights.len();
        let mut acc = VectorField::zero(n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.try_add(&b.scale(c)).expect("same dimension");
            }
        }
        acc
    }
}

fn monomial_field(n: usize, m: &Monomial, j: usize) -> VectorField {
    let mut comps = vec![Poly::zero(n); n];
    comps[j] = Poly::from_terms(n, [(m.clone(), Q::one())]);
    VectorField::new(comps).expect("n ≥ 1")
}

/// Monomial basis `x^σ ∂_j` of `Σ(S, ℓ)`, i.e. `<σ, k> − k_j = ℓ`.
///
/// For uniform weights the level fixes the degree and `degree_cap` is
/// ignored; otherwise the analytic bound on `|σ|` must not exceed it.
pub fn sigma_basis(s: &WeightVector, level: i64, degree_cap: usize) -> Result<GradedSubspace> {
    let w = s.weights();
    let n = w.len();
    if !s.is_uniform() {
        let kmin = *w.iter().min().expect("nonempty") as i64;
        let kmax = *w.iter().max().expect("nonempty") as i64;
        let bound = ((level + kmax).max(0) / kmin) as usize;
        if bound > degree_cap {
            return Err(Error::CapExceeded { bound, cap: degree_cap });
        }
    }
    let sf = s.field();
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for j in 0..n {
        for m in monomials_of_weighted_degree(w, level + w[j] as i64) {
            let v = monomial_field(n, &m, j);
            // every basis element is checked against the eigen-equation
            let br = sf.lie_bracket(&v)?;
            if br != v.scale(&Q::from(level)) {
                return Err(Error::NotEigenField(level));
            }
            basis.push(v);
            labels.push((m, j));
        }
    }
    Ok(GradedSubspace { weights: s.clone(), level, basis, monomial_labels: Some(labels) })
}

/// Divergence-free subspace `E(S, ℓ)` of a monomial space.
pub fn divfree_basis(space: &GradedSubspace) -> GradedSubspace {
    let divs: Vec<Poly> = space.basis.iter().map(VectorField::divergence).collect();
    let kernel = kernel_of_polys(&divs);
    let basis = kernel.iter().map(|c| space.combine(c)).collect();
    GradedSubspace { weights: space.weights.clone(), level: space.level, basis, monomial_labels: None }
}

/// Kernel of `c ↦ Σ c_i p_i` over the rationals.
fn kernel_of_polys(polys: &[Poly]) -> Vec<Vec<Q>> {
    let (rows, cols) = coefficient_matrix(polys);
    QMatrix::from_columns(rows, &cols).kernel()
}

/// Columns of coefficients of each polynomial over the union of their supports.
fn coefficient_matrix(polys: &[Poly]) -> (usize, Vec<Vec<Q>>) {
    let mut monos: Vec<Monomial> = polys.iter().flat_map(|p| p.terms().iter().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    let cols = polys.iter().map(|p| monos.iter().map(|m| p.coefficient(m)).collect()).collect();
    (monos.len(), cols)
}

/// Matrix data and kernel of `L⁰_X : Σ(S, 0) → Σ(S, ℓ)`, `W ↦ [X, W]`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub field: VectorField,
    pub level: i64,
    pub rows: usize,
    pub domain_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel_basis: Vec<VectorField>,
    /// `[X, W] = 0` verified exactly for each kernel element.
    pub kernel_verified: Vec<bool>,
}

/// The level `ℓ` with `[S, X] = ℓ X`.
pub fn eigen_level(x: &VectorField, s: &WeightVector) -> Result<i64> {
    if x.nvars() != s.len() {
        return Err(Error::VarCountMismatch { left: s.len(), right: x.nvars() });
    }
    let br = s.field().lie_bracket(x)?;
    let (j, p) = x
        .components()
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_zero())
        .ok_or(Error::Precondition("the zero field has no level".into()))?;
    let (m, c) = &p.terms()[0];
    let level = &br.component(j).coefficient(m) / c;
    if br != x.scale(&level) || !level.is_integer() {
        return Err(Error::NotEigenField(0));
    }
    Ok(level.to_f64() as i64)
}

/// Kernel test with the level read off from `[S, X] = ℓ X`.
pub fn kernel_test(x: &VectorField, s: &WeightVector) -> Result<KernelReport> {
    let level = eigen_level(x, s)?;
    kernel_test_at_level(x, s, level)
}

/// Kernel test at an explicit level (needed for `X = 0`).
pub fn kernel_test_at_level(x: &VectorField, s: &WeightVector, level: i64) -> Result<KernelReport> {
    if x.nvars() != s.len() {
        return Err(Error::VarCountMismatch { left: s.len(), right: x.nvars() });
    }
    if s.field().lie_bracket(x)? != x.scale(&Q::from(level)) {
        return Err(Error::NotEigenField(level));
    }
    let cap = usize::MAX;
    let domain = sigma_basis(s, 0, cap)?;
    let target = sigma_basis(s, level, cap)?;
    let mut cols = Vec::with_capacity(domain.dim());
    for w in &domain.basis {
        let img = x.lie_bracket(w)?;
        let c = target.coordinates(&img).ok_or(Error::NotEigenField(level))?;
        cols.push(c);
    }
    let mat = QMatrix::from_columns(target.dim(), &cols);
    let kernel: Vec<VectorField> = mat.kernel().iter().map(|c| domain.combine(c)).collect();
    let kernel_verified = kernel
        .iter()
        .map(|w| x.lie_bracket(w).map(|b| b.is_zero()).unwrap_or(false))
        .collect();
    let rank = domain.dim() - kernel.len();
    Ok(KernelReport {
        field: x.clone(),
        level,
        rows: target.dim(),
        domain_dim: domain.dim(),
        rank,
        kernel_dim: kernel.len(),
        kernel_basis: kernel,
        kernel_verified,
    })
}

/// One resonance `<σ, k> = k_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resonance {
    pub sigma: Vec<u16>,
    pub j: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub weights: Vec<u32>,
    pub nontrivial: Vec<Resonance>,
    /// Resonances with `|σ| = 1`.
    pub trivial: Vec<Resonance>,
    /// Reading that ignores `|σ| = 1`.
    pub non_resonant_excluding_trivial: bool,
    /// Reading that counts every resonance.
    pub non_resonant_including_trivial: bool,
}

/// Exhaustive list of resonances of `S`.
pub fn resonance_scan(s: &WeightVector) -> ResonanceReport {
    let w = s.weights();
    let mut nontrivial = Vec::new();
    let mut trivial = Vec::new();
    for (j, &kj) in w.iter().enumerate() {
        for m in monomials_of_weighted_degree(w, kj as i64) {
            let r = Resonance { sigma: m.exps().to_vec(), j };
            if m.degree() == 1 {
                trivial.push(r);
            } else if m.degree() >= 2 {
                nontrivial.push(r);
            }
        }
    }
    ResonanceReport {
        weights: w.to_vec(),
        non_resonant_excluding_trivial: nontrivial.is_empty(),
        non_resonant_including_trivial: nontrivial.is_empty() && trivial.is_empty(),
        nontrivial,
        trivial,
    }
}

/// The cyclic Jouanolou field: component `i` is `x_{i+1}^d`, indices mod `n`.
pub fn jouanolou_field(n: usize, d: u32) -> VectorField {
    let comps = (0..n)
        .map(|i| {
            let mut e = vec![0u16; n];
            e[(i + 1) % n] = d as u16;
            Poly::monomial(n, &e, Q::one())
        })
        .collect();
    VectorField::new(comps).expect("n ≥ 1")
}

/// Whether the origin is an isolated zero of a field in `Σ(S, ℓ)`.
///
/// The components are weighted homogeneous of degrees `ℓ + k_j`; the zero is
/// isolated exactly when they form a regular sequence, which happens exactly
/// when the ideal they generate contains every monomial of weighted degree
/// above `nℓ`. Checking the window `nℓ+1 ..= nℓ+max k` suffices.
pub fn origin_is_isolated_zero(x: &VectorField, s: &WeightVector, level: i64) -> bool {
    let n = s.len();
    if x.components().iter().any(Poly::is_zero) || level < 0 {
        return false;
    }
    let w = s.weights();
    let kmax = *w.iter().max().expect("nonempty") as i64;
    let socle = n as i64 * level;
    for t in socle + 1..=socle + kmax {
        let targets = monomials_of_weighted_degree(w, t);
        let mut gens = Vec::new();
        for (j, comp) in x.components().iter().enumerate() {
            for m in monomials_of_weighted_degree(w, t - level - w[j] as i64) {
                gens.push(comp.mul_term(&m, &Q::one()));
            }
        }
        let (rows, cols) = coefficient_matrix(&gens);
        if rows < targets.len() || QMatrix::from_columns(rows, &cols).rank() < targets.len() {
            return false;
        }
    }
    true
}

/// Verdict bundle for membership in `K(S, ℓ)`.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub level: Option<i64>,
    pub divergence_free: bool,
    pub kernel_trivial: bool,
    pub kernel_dim: Option<usize>,
    pub isolated_zero: bool,
    pub member: bool,
}

/// Checks `∇X = 0`, `ker L⁰_X = 0` and that the origin is an isolated zero.
pub fn k_membership_report(x: &VectorField, s: &WeightVector) -> Result<MembershipReport> {
    if x.is_zero() {
        let k = kernel_test_at_level(x, s, 1)?;
        return Ok(MembershipReport {
            level: None,
            divergence_free: false,
            kernel_trivial: false,
            kernel_dim: Some(k.kernel_dim),
            isolated_zero: false,
            member: false,
        });
    }
    let level = eigen_level(x, s)?;
    let divergence_free = x.divergence().is_zero();
    let k = kernel_test_at_level(x, s, level)?;
    let isolated_zero = origin_is_isolated_zero(x, s, level);
    let kernel_trivial = k.kernel_dim == 0;
    Ok(MembershipReport {
        level: Some(level),
        divergence_free,
        kernel_trivial,
        kernel_dim: Some(k.kernel_dim),
        isolated_zero,
        member: divergence_free && kernel_trivial && isolated_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vf(exprs: &[&str]) -> VectorField {
        VectorField::parse(exprs).unwrap()
    }

    #[test]
    fn sigma_dimensions() {
        let r3 = WeightVector::radial(3);
        assert_eq!(sigma_basis(&r3, 0, 0).unwrap().dim(), 9);
        assert_eq!(sigma_basis(&r3, 1, 0).unwrap().dim(), 18);
        assert_eq!(sigma_basis(&r3, -1, 0).unwrap().dim(), 3);
        assert_eq!(sigma_basis(&r3, -2, 0).unwrap().dim(), 0);
    }

    #[test]
    fn weighted_sigma_basis() {
        let s = WeightVector::new(vec![1, 1, 2]).unwrap();
        let sp = sigma_basis(&s, 0, 4).unwrap();
        assert_eq!(sp.dim(), 8);
        for want in [["x0", "0", "0"], ["x1", "0", "0"], ["0", "x0", "0"], ["0", "x1", "0"], ["0", "0", "x2"], ["0", "0", "x0*x1"], ["0", "0", "x0^2"], ["0", "0", "x1^2"]] {
            assert!(sp.basis.contains(&vf(&want)), "{want:?}");
        }
        assert!(matches!(sigma_basis(&s, 40, 4), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn divergence_free_dimensions() {
        let e1 = divfree_basis(&sigma_basis(&WeightVector::radial(3), 1, 0).unwrap());
        assert_eq!(e1.dim(), 15);
        assert!(e1.basis.iter().all(|v| v.divergence().is_zero()));
        let e0 = divfree_basis(&sigma_basis(&WeightVector::radial(2), 0, 0).unwrap());
        assert_eq!(e0.dim(), 3);
    }

    #[test]
    fn jouanolou_properties() {
        let j = jouanolou_field(3, 2);
        assert_eq!(j, vf(&["x1^2", "x2^2", "x0^2"]));
        for (n, d) in [(3, 2), (3, 3), (4, 2), (5, 4)] {
            let j = jouanolou_field(n, d);
            assert!(j.divergence().is_zero());
            assert_eq!(eigen_level(&j, &WeightVector::radial(n)).unwrap(), d as i64 - 1);
        }
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_test(&jouanolou_field(3, 2), &WeightVector::radial(3)).unwrap();
        assert_eq!((k.domain_dim, k.rank, k.kernel_dim), (9, 9, 0));
        let x = vf(&["x0^2", "0"]);
        let k = kernel_test(&x, &WeightVector::radial(2)).unwrap();
        assert!(k.kernel_dim > 0);
        assert!(k.kernel_verified.iter().all(|&b| b));
        // x1∂1 lies in the span of the kernel
        let dom = sigma_basis(&WeightVector::radial(2), 0, 0).unwrap();
        let mut cols: Vec<Vec<Q>> = k.kernel_basis.iter().map(|v| dom.coordinates(v).unwrap()).collect();
        let without = QMatrix::from_columns(dom.dim(), &cols).rank();
        cols.push(dom.coordinates(&vf(&["0", "x1"])).unwrap());
        assert_eq!(QMatrix::from_columns(dom.dim(), &cols).rank(), without);
        let zero = kernel_test_at_level(&VectorField::zero(3), &WeightVector::radial(3), 1).unwrap();
        assert_eq!(zero.kernel_dim, 9);
        assert!(kernel_test(&vf(&["x0^2", "x1"]), &WeightVector::radial(2)).is_err());
    }

    #[test]
    fn resonances() {
        let r = resonance_scan(&WeightVector::new(vec![1, 2, 5]).unwrap());
        assert!(r.nontrivial.contains(&Resonance { sigma: vec![1, 2, 0], j: 2 }));
        assert!(!r.non_resonant_excluding_trivial);
        let r = resonance_scan(&WeightVector::new(vec![1, 1]).unwrap());
        assert!(r.nontrivial.is_empty());
        assert!(r.non_resonant_excluding_trivial);
        assert!(!r.non_resonant_including_trivial);
        for n in 1..6 {
            assert!(resonance_scan(&WeightVector::radial(n)).nontrivial.is_empty());
        }
    }

    #[test]
    fn membership() {
        let rep = k_membership_report(&jouanolou_field(3, 2), &WeightVector::radial(3)).unwrap();
        assert!(rep.divergence_free && rep.kernel_trivial && rep.isolated_zero && rep.member);
        let rep = k_membership_report(&vf(&["x0^2", "0"]), &WeightVector::radial(2)).unwrap();
        assert!(!rep.divergence_free && !rep.kernel_trivial && !rep.member);
        let rep = k_membership_report(&VectorField::zero(3), &WeightVector::radial(3)).unwrap();
        assert!(!rep.divergence_free && !rep.kernel_trivial && !rep.isolated_zero);
    }

    #[test]
    fn isolated_zero_detects_common_zeros() {
        let r3 = WeightVector::radial(3);
        // x0^2, x1^2, x2^2: isolated; x0*x1, x1*x2, x2*x0: zero along axes
        assert!(origin_is_isolated_zero(&vf(&["x0^2", "x1^2", "x2^2"]), &r3, 1));
        assert!(!origin_is_isolated_zero(&vf(&["x0*x1", "x1*x2", "x2*x0"]), &r3, 1));
        let s = WeightVector::new(vec![1, 2]).unwrap();
        // x0^3 ∂0 + x1^2 ∂1... weighted: level 2 means deg(X_0)=3, deg(X_1)=4
        assert!(origin_is_isolated_zero(&vf(&["x0^3 + x0*x1", "x1^2"]), &s, 2));
        assert!(!origin_is_isolated_zero(&vf(&["x0*x1", "x0^2*x1"]), &s, 2));
    }
}
