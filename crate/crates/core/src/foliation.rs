//! Foliation-defining forms: `Ω = i_R i_X dσ` for foliations by curves on
//! `P^{n−1}`, pull-backs `η = f*Ω` on `P^n`, and their global verifiers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{index_tuples, radial_field, KForm, MultiVector, VectorField};
use crate::numeric::cpoly::NumPoly;
use crate::numeric::univariate::{restrict, CPoly};
use crate::rational::Q;
use crate::ring::{coprimality_check, monomials_of_degree, HomogeneousDegree, Monomial, Poly};

/// A foliation by curves on `P^{n−1}` given by a homogeneous field `X` on `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimFoliation {
    field: VectorField,
    form: KForm,
    degree: u32,
}

impl OneDimFoliation {
    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn form(&self) -> &KForm {
        &self.form
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of homogeneous variables `n` (the foliation lives on `P^{n−1}`).
    pub fn nvars(&self) -> usize {
        self.field.nvars()
    }
}

/// Builds `Ω = i_R i_X dσ`.
pub fn omega_from_field(x: &VectorField) -> Result<OneDimFoliation> {
    let degree = match x.homogeneous_degree() {
        HomogeneousDegree::Degree(d) => d,
        HomogeneousDegree::Any => return Err(Error::ZeroPolynomial),
        HomogeneousDegree::NotHomogeneous => return Err(Error::NotHomogeneous),
    };
    let n = x.nvars();
    if n < 2 {
        return Err(Error::Precondition("need at least two homogeneous variables".into()));
    }
    let form = KForm::volume(n).interior(x)?.interior(&radial_field(n))?;
    if form.is_zero() {
        return Err(Error::Degenerate("field is proportional to the radial field".into()));
    }
    Ok(OneDimFoliation { field: x.clone(), form, degree })
}

/// A rational map `P^n ⇢ P^{n−1}` given by `n` coprime forms of degree `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    comps: Vec<Poly>,
    degree: u32,
}

impl RationalMap {
    /// Validates shape and equal degrees, then runs the line-restriction
    /// coprimality test with a fixed seed.
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        let map = RationalMap::new_unchecked(comps)?;
        let verdict = coprimality_check(&map.comps, 16, 0x5eed)?;
        if !verdict.coprime {
            return Err(Error::Degenerate("components share a common factor".into()));
        }
        Ok(map)
    }

    /// Shape and degree validation only.
    pub fn new_unchecked(comps: Vec<Poly>) -> Result<Self> {
        let n = comps.len();
        if n < 2 {
            return Err(Error::Precondition("a map to P^{n−1} needs n ≥ 2 components".into()));
        }
        let mut degree = None;
        for p in &comps {
            if p.nvars() != n + 1 {
                return Err(Error::VarCountMismatch { left: n + 1, right: p.nvars() });
            }
            match p.homogeneous_degree() {
                HomogeneousDegree::Degree(d) if d >= 1 => match degree {
                    None => degree = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::WrongDegree { expected: e as usize, got: d as usize })
                    }
                    _ => {}
                },
                HomogeneousDegree::Any => return Err(Error::ZeroPolynomial),
                HomogeneousDegree::Degree(_) => {
                    return Err(Error::Precondition("components must have positive degree".into()))
                }
                HomogeneousDegree::NotHomogeneous => return Err(Error::NotHomogeneous),
            }
        }
        Ok(RationalMap { comps, degree: degree.expect("nonempty") })
    }

    /// `F_i = z_i^ν − c_i z_n^ν`.
    pub fn diagonal_difference_scaled(n: usize, nu: u32, c: &[Q]) -> Result<Self> {
        if c.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: c.len() });
        }
        let m = n + 1;
        let comps = (0..n)
            .map(|i| {
                let mut a = vec![0u16; m];
                a[i] = nu as u16;
                let mut b = vec![0u16; m];
                b[n] = nu as u16;
                &Poly::monomial(m, &a, Q::one()) - &Poly::monomial(m, &b, c[i].clone())
            })
            .collect();
        RationalMap::new(comps)
    }

    /// `F_i = z_i^ν − z_n^ν`.
    pub fn diagonal_difference(n: usize, nu: u32) -> Result<Self> {
        RationalMap::diagonal_difference_scaled(n, nu, &vec![Q::one(); n])
    }

    /// The linear projection `(z_0 : … : z_{n−1})` from `[0:…:0:1]`.
    pub fn linear_projection(n: usize) -> Result<Self> {
        RationalMap::new((0..n).map(|i| Poly::var(n + 1, i)).collect())
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `n`, for a map `P^n ⇢ P^{n−1}`.
    pub fn source_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn try_add(&self, other: &RationalMap) -> Result<RationalMap> {
        if other.comps.len() != self.comps.len() {
            return Err(Error::LengthMismatch { expected: self.comps.len(), got: other.comps.len() });
        }
        RationalMap::new_unchecked(self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Q) -> RationalMap {
        RationalMap { comps: self.comps.iter().map(|p| p.scale(c)).collect(), degree: self.degree }
    }
}

/// Where a pulled-back foliation came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub map: RationalMap,
    pub foliation: OneDimFoliation,
}

/// A foliation by surfaces on `P^n`, given by an `(n−2)`-form in `n+1` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoDimFoliation {
    form: KForm,
    degree: i64,
    provenance: Option<Provenance>,
}

impl TwoDimFoliation {
    /// Validates `i_R η = 0` and homogeneity, and records the degree.
    pub fn from_form(form: KForm) -> Result<Self> {
        if form.degree() + 3 != form.nvars() {
            return Err(Error::WrongDegree { expected: form.nvars().saturating_sub(3), got: form.degree() });
        }
        let degree = foliation_degree(&form)?;
        Ok(TwoDimFoliation { form, degree, provenance: None })
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn form(&self) -> &KForm {
        &self.form
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn nvars(&self) -> usize {
        self.form.nvars()
    }
}

/// Output of [`pullback_form`].
#[derive(Clone, Debug)]
pub struct Pullback {
    pub foliation: TwoDimFoliation,
    /// Monomial factor divided out of every component (1 when none).
    pub removed_factor: Poly,
    /// Whether the remaining components are certified coprime.
    pub components_coprime: bool,
}

/// `η = Σ_{a<b} (−1)^{a+b+1} (F_b·P_a(F) − F_a·P_b(F)) dF_0∧…∧\hat{dF_a}∧…∧\hat{dF_b}∧…∧dF_{n−1}`.
pub fn pullback_form(f: &RationalMap, g: &OneDimFoliation) -> Result<Pullback> {
    let n = f.source_dim();
    if g.nvars() != n {
        return Err(Error::VarCountMismatch { left: n, right: g.nvars() });
    }
    let m = n + 1;
    let fs = f.components();
    let pf: Vec<Poly> = g.field().components().iter().map(|p| p.compose(fs)).collect::<Result<_>>()?;
    let dfs: Vec<KForm> = fs.iter().map(KForm::differential).collect();
    let mut eta = KForm::zero(m, n - 2);
    for a in 0..n {
        for b in a + 1..n {
            let coeff = &(&fs[b] * &pf[a]) - &(&fs[a] * &pf[b]);
            if coeff.is_zero() {
                continue;
            }
            let mut w = KForm::function(&coeff);
            for (i, df) in dfs.iter().enumerate() {
                if i != a && i != b {
                    w = w.wedge(df)?;
                }
            }
            if (a + b) % 2 == 0 {
                w = w.neg();
            }
            eta = eta.try_add(&w)?;
        }
    }
    if eta.is_zero() {
        return Err(Error::Degenerate("pull-back form vanishes identically".into()));
    }
    let (eta, removed_factor) = strip_monomial_content(&eta);
    let comps: Vec<Poly> = eta.components().map(|(_, p)| p.clone()).collect();
    let components_coprime = comps.len() < 2 || coprimality_check(&comps, 8, 0xc0de)?.coprime;
    let foliation = TwoDimFoliation::from_form(eta)?.with_provenance(Provenance { map: f.clone(), foliation: g.clone() });
    Ok(Pullback { foliation, removed_factor, components_coprime })
}

/// Divides every coefficient by the largest monomial dividing all of them.
fn strip_monomial_content(a: &KForm) -> (KForm, Poly) {
    let m = a.nvars();
    let mut content: Option<Vec<u16>> = None;
    for (_, p) in a.components() {
        for (mono, _) in p.terms() {
            content = Some(match content {
                None => mono.exps().to_vec(),
                Some(c) => c.iter().zip(mono.exps()).map(|(x, y)| *x.min(y)).collect(),
            });
        }
    }
    let content = content.unwrap_or_else(|| vec![0; m]);
    if content.iter().all(|&e| e == 0) {
        return (a.clone(), Poly::one(m));
    }
    let cm = Monomial::new(&content);
    let stripped = a.map_coefficients(|p| {
        Poly::from_terms(m, p.terms().iter().map(|(mono, c)| (cm.quotient_of(mono), c.clone())))
    });
    (stripped, Poly::monomial(m, &content, Q::one()))
}

/// `Θ = (coefficient degree) − 1`, after checking homogeneity and `i_R η = 0`.
pub fn foliation_degree(eta: &KForm) -> Result<i64> {
    let deg = eta.coefficient_degree()?.ok_or(Error::ZeroPolynomial)?;
    if !radial_contraction_check(eta) {
        return Err(Error::Precondition("form does not descend: i_R η ≠ 0".into()));
    }
    Ok(deg as i64 - 1)
}

/// Exact test of `i_R η = 0`.
pub fn radial_contraction_check(eta: &KForm) -> bool {
    if eta.degree() == 0 {
        return eta.is_zero();
    }
    eta.interior(&radial_field(eta.nvars())).map(|c| c.is_zero()).unwrap_or(false)
}

/// Whether the dual multivector of `η` is decomposable. For bivectors this is
/// `P∧P = 0`; in general the Plücker relations are checked.
pub fn decomposability_check(eta: &KForm) -> bool {
    let p = eta.dual_multivector();
    is_decomposable(&p)
}

/// Plücker test on a polynomial multivector.
pub fn is_decomposable(p: &MultiVector) -> bool {
    let (m, k) = (p.nvars(), p.degree());
    if k <= 1 || k + 1 >= m || p.is_zero() {
        return true;
    }
    if k == 2 {
        return p.wedge(p).map(|w| w.is_zero()).unwrap_or(false);
    }
    // Σ_r (−1)^r P_{A ∪ b_r} P_{B ∖ b_r} = 0 for all (k−1)-sets A, (k+1)-sets B
    for a in index_tuples(m, k - 1) {
        for b in index_tuples(m, k + 1) {
            let mut acc = Poly::zero(m);
            for (r, &br) in b.iter().enumerate() {
                if a.contains(&br) {
                    continue;
                }
                let mut left = a.clone();
                left.push(br);
                let odd = left.iter().filter(|&&x| x > br).count() % 2 == 1;
                left.sort_unstable();
                let Some(pa) = p.component(&left) else { continue };
                let mut right = b.clone();
                right.remove(r);
                let Some(pb) = p.component(&right) else { continue };
                let t = pa * pb;
                acc = if odd ^ (r % 2 == 1) { &acc - &t } else { &acc + &t };
            }
            if !acc.is_zero() {
                return false;
            }
        }
    }
    true
}

/// `(i_{∂_I} η) ∧ dη = 0` for every constant `(k−1)`-multi-index `I`.
pub fn integrability_check(eta: &KForm) -> Result<bool> {
    if !decomposability_check(eta) {
        return Err(Error::Precondition("form is not decomposable".into()));
    }
    let k = eta.degree();
    if k == 0 || k >= eta.nvars() {
        return Ok(true);
    }
    let d_eta = eta.d()?;
    if d_eta.is_zero() {
        return Ok(true);
    }
    for idx in index_tuples(eta.nvars(), k - 1) {
        let alpha = eta.contract_basis(&idx)?;
        if alpha.is_zero() {
            continue;
        }
        if !alpha.wedge(&d_eta)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rotational `Z` with `dη = i_Z dvol`.
pub fn rotational(eta: &KForm) -> Result<VectorField> {
    if eta.degree() + 2 != eta.nvars() {
        return Err(Error::WrongDegree { expected: eta.nvars().saturating_sub(2), got: eta.degree() });
    }
    eta.d()?.dual_multivector().to_field()
}

/// Rational `c` with `a = c·b`, if one exists.
pub fn proportionality_constant(a: &VectorField, b: &VectorField) -> Option<Q> {
    let mut c: Option<Q> = None;
    for (pa, pb) in a.components().iter().zip(b.components()) {
        match (pa.is_zero(), pb.is_zero()) {
            (true, true) => continue,
            (false, true) | (true, false) => return None,
            _ => {}
        }
        let (m, cb) = &pb.terms()[0];
        let ratio = &pa.coefficient(m) / cb;
        if pb.scale(&ratio) != *pa {
            return None;
        }
        match &c {
            None => c = Some(ratio),
            Some(c0) if *c0 != ratio => return None,
            _ => {}
        }
    }
    c
}

/// Tangent fields `Y_A = i_{dz_A} P` spanning the distribution of `η`.
pub fn tangent_fields(eta: &KForm) -> Result<Vec<VectorField>> {
    let p = eta.dual_multivector();
    let k = p.degree();
    if k == 0 {
        return Ok(Vec::new());
    }
    index_tuples(p.nvars(), k - 1)
        .into_iter()
        .map(|a| p.contract_basis(&a)?.to_field())
        .filter(|v| !matches!(v, Ok(f) if f.is_zero()))
        .collect()
}

/// Whether `{H = 0}` is invariant: `i_{dH} P ≡ 0 mod H` componentwise.
pub fn invariant_hypersurface_check(eta: &KForm, h: &Poly) -> Result<bool> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !matches!(h.homogeneous_degree(), HomogeneousDegree::Degree(_)) {
        return Err(Error::NotHomogeneous);
    }
    if h.nvars() != eta.nvars() {
        return Err(Error::VarCountMismatch { left: eta.nvars(), right: h.nvars() });
    }
    let p = eta.dual_multivector();
    if p.degree() == 0 {
        return Ok(true);
    }
    let w = p.contract_one_form(&KForm::differential(h))?;
    for (_, c) in w.components() {
        if !c.div_rem(h)?.1.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Settings for [`bounded_invariant_hypersurface_scan`].
#[derive(Clone, Debug, Serialize)]
pub struct ScanConfig {
    pub max_degree: u32,
    /// Newton starts per unknown coefficient.
    pub starts_per_coefficient: usize,
    pub lines: usize,
    pub max_denominator: i64,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { max_degree: 1, starts_per_coefficient: 16, lines: 4, max_denominator: 10_000, seed: 0 }
    }
}

/// Result of a bounded search; an empty list is evidence, not proof.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantScan {
    pub found: Vec<String>,
    #[serde(skip)]
    pub hypersurfaces: Vec<Poly>,
    pub degrees_scanned: Vec<u32>,
    pub starts: usize,
    pub converged_unrecognized: usize,
    pub seed: u64,
    pub note: String,
}

/// Searches for invariant hypersurfaces of degree `1..=max_degree`.
///
/// For each degree, Gauss–Newton runs from random starts on the unknown
/// coefficients of `H`, asking that every tangent field `Y` satisfies
/// `Y(H)|_L ≡ 0 mod H|_L` on a fixed set of random lines `L`. Converged
/// candidates are rounded to rationals and certified with the exact
/// divisibility test. Products of lower-degree finds are skipped.
pub fn bounded_invariant_hypersurface_scan(eta: &KForm, cfg: &ScanConfig) -> Result<InvariantScan> {
    if cfg.max_degree < 1 {
        return Err(Error::Precondition("max_degree must be at least 1".into()));
    }
    let m = eta.nvars();
    let fields = tangent_fields(eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut found: Vec<Poly> = Vec::new();
    let mut starts = 0;
    let mut unrecognized = 0;
    let lines: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..cfg.lines.max(1))
        .map(|_| (random_point(&mut rng, m), random_point(&mut rng, m)))
        .collect();
    // Y_{α,i}|_L, rescaled per field and line
    let field_images: Vec<Vec<Vec<CPoly>>> = lines
        .iter()
        .map(|(base, dir)| {
            fields
                .iter()
                .map(|y| {
                    let parts: Vec<CPoly> =
                        y.components().iter().map(|c| restrict(&NumPoly::from_poly(c), base, dir)).collect();
                    let s = parts.iter().map(CPoly::max_abs).fold(0.0, f64::max).max(1e-300);
                    parts.iter().map(|p| p.scale(Complex64::new(1.0 / s, 0.0))).collect()
                })
                .collect()
        })
        .collect();
    for e in 1..=cfg.max_degree {
        let basis = monomials_of_degree(m, e);
        // ∂_i(monomial)|_L and monomial|_L for every line
        let images: Vec<(Vec<CPoly>, Vec<Vec<CPoly>>)> = lines
            .iter()
            .map(|(base, dir)| {
                let val = basis
                    .iter()
                    .map(|mono| restrict(&NumPoly::from_poly(&Poly::from_terms(m, [(mono.clone(), Q::one())])), base, dir))
                    .collect();
                let der = (0..m)
                    .map(|i| {
                        basis
                            .iter()
                            .map(|mono| {
                                let p = Poly::from_terms(m, [(mono.clone(), Q::one())]).partial(i).expect("index");
                                restrict(&NumPoly::from_poly(&p), base, dir)
                            })
                            .collect()
                    })
                    .collect();
                (val, der)
            })
            .collect();
        let nb = basis.len();
        let tangency = |h: &[Complex64]| -> Vec<Complex64> {
            let mut out = Vec::new();
            for (l, (val, der)) in images.iter().enumerate() {
                let mut hl = CPoly::zero();
                for (k, v) in val.iter().enumerate() {
                    hl.add_assign(&v.scale(h[k]));
                }
                let dh: Vec<CPoly> = der
                    .iter()
                    .map(|row| {
                        let mut acc = CPoly::zero();
                        for (k, v) in row.iter().enumerate() {
                            acc.add_assign(&v.scale(h[k]));
                        }
                        acc
                    })
                    .collect();
                let hl = hl.trimmed(1e-13);
                let usable = hl.degree() == e as usize;
                for y in &field_images[l] {
                    let mut g = CPoly::zero();
                    for (yi, di) in y.iter().zip(&dh) {
                        g.add_assign(&yi.mul(di));
                    }
                    if usable {
                        let r = g.rem(&hl);
                        out.extend(r.0.iter().copied());
                        out.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(e as usize - r.0.len()));
                    } else {
                        out.extend(std::iter::repeat(Complex64::new(1.0, 0.0)).take(e as usize));
                    }
                }
            }
            out
        };
        let mut roots: Vec<Vec<Complex64>> = Vec::new();
        let n_starts = cfg.starts_per_coefficient * nb;
        for _ in 0..n_starts {
            starts += 1;
            let h0: Vec<Complex64> = (0..nb).map(|_| random_unit(&mut rng)).collect();
            // fresh normalization per start, known solutions deflated away
            let normal: Vec<Complex64> = (0..nb).map(|_| random_unit(&mut rng)).collect();
            let dot = |h: &[Complex64]| -> Complex64 { normal.iter().zip(h).map(|(a, b)| a * b).sum() };
            let known: Vec<Vec<Complex64>> = roots
                .iter()
                .filter_map(|r| {
                    let s = dot(r);
                    (s.norm() > 1e-8).then(|| r.iter().map(|c| c / s).collect())
                })
                .collect();
            let residual = |h: &[Complex64]| -> DVector<Complex64> {
                let mut out = tangency(h);
                let mut factor = 1.0;
                for r in &known {
                    let dist: f64 = r.iter().zip(h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                    factor *= 1.0 + 1.0 / dist.max(1e-300);
                }
                for v in out.iter_mut() {
                    *v *= factor;
                }
                out.push(dot(h) - Complex64::new(1.0, 0.0));
                DVector::from_vec(out)
            };
            let Some(h) = gauss_newton(&residual, h0, 100) else { continue };
            match rationalize(&h, cfg.max_denominator) {
                Some(coeffs) => {
                    let cand = Poly::from_terms(m, basis.iter().cloned().zip(coeffs));
                    if cand.is_zero() || !invariant_hypersurface_check(eta, &cand)? {
                        unrecognized += 1;
                        continue;
                    }
                    let redundant = found.iter().any(|g| {
                        g.total_degree() == cand.total_degree() && same_up_to_scalar(g, &cand)
                            || (g.total_degree() < cand.total_degree()
                                && cand.div_rem(g).map(|(_, r)| r.is_zero()).unwrap_or(false))
                    });
                    if !redundant {
                        roots.push(h.clone());
                        found.push(cand);
                    }
                }
                None => unrecognized += 1,
            }
        }
    }
    found.sort_by_key(|p| (p.total_degree(), p.to_string()));
    Ok(InvariantScan {
        found: found.iter().map(|p| p.to_string()).collect(),
        hypersurfaces: found,
        degrees_scanned: (1..=cfg.max_degree).collect(),
        starts,
        converged_unrecognized: unrecognized,
        seed: cfg.seed,
        note: "bounded numeric search with exact certification; an empty list is evidence only".into(),
    })
}

fn same_up_to_scalar(a: &Poly, b: &Poly) -> bool {
    let (Some((_, ca)), Some((_, cb))) = (a.leading(), b.leading()) else { return false };
    a.scale(&(cb / ca)) == *b
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Levenberg–Marquardt with forward-difference Jacobian; returns the point
/// when the residual drops below `1e−11`.
fn gauss_newton(
    f: &impl Fn(&[Complex64]) -> DVector<Complex64>,
    mut x: Vec<Complex64>,
    iters: usize,
) -> Option<Vec<Complex64>> {
    let n = x.len();
    let mut r = f(&x);
    let mut lambda = 1e-3;
    for _ in 0..iters {
        let rn = r.norm();
        if rn < 1e-11 {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for k in 0..n {
            let h = 1e-7 * (1.0 + x[k].norm());
            let mut xp = x.clone();
            xp[k] += h;
            let col = (f(&xp) - &r) / Complex64::new(h, 0.0);
            jac.set_column(k, &col);
        }
        // Levenberg–Marquardt damping on the normal equations
        let jh = jac.adjoint();
        let jtj = &jh * &jac;
        let g = &jh * &r;
        let mut accepted = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += Complex64::new(lambda * (1.0 + jtj[(k, k)].re), 0.0);
            }
            let Some(step) = a.lu().solve(&g) else {
                lambda *= 10.0;
                continue;
            };
            let cand: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
            let rc = f(&cand);
            if rc.norm() < rn {
                x = cand;
                r = rc;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    (r.norm() < 1e-9).then_some(x)
}

/// Scales by the largest coefficient and rounds to small-denominator rationals.
fn rationalize(h: &[Complex64], max_den: i64) -> Option<Vec<Q>> {
    let lead = *h.iter().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let mut out = Vec::with_capacity(h.len());
    for c in h {
        let v = c / lead;
        if v.im.abs() > 1e-7 {
            return None;
        }
        let q = Q::approximate(v.re, max_den);
        if (q.to_f64() - v.re).abs() > 1e-7 {
            return None;
        }
        out.push(q);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::jouanolou_field;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    #[test]
    fn omega_components_and_radial_contraction() {
        let j = jouanolou_field(3, 2);
        let g = omega_from_field(&j).unwrap();
        assert!(radial_contraction_check(g.form()));
        // coefficient on dx_c is ± (x_a P_b − x_b P_a) for {a,b,c} = {0,1,2}
        assert_eq!(g.form().coefficient(&[2]), p(3, "x1*x1^2 - x0*x2^2"));
        assert_eq!(g.form().coefficient(&[1]), p(3, "x0*x0^2 - x2*x1^2"));
        assert_eq!(g.form().coefficient(&[0]), p(3, "x2*x2^2 - x1*x0^2"));
        assert!(omega_from_field(&radial_field(3)).is_err());
    }

    #[test]
    fn linear_pullback_is_omega_in_more_variables() {
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        let f = RationalMap::linear_projection(4).unwrap();
        let pb = pullback_form(&f, &g).unwrap();
        let lifted = KForm::from_components(5, 2, g.form().components().map(|(i, c)| (i.clone(), c.extend_vars(5)))).unwrap();
        assert_eq!(pb.foliation.form(), &lifted);
        assert!(radial_contraction_check(pb.foliation.form()));
        assert_eq!(pb.foliation.degree(), 2);
    }

    #[test]
    fn decomposability_examples() {
        let q = MultiVector::basis(4, &[0, 1]).unwrap().try_add(&MultiVector::basis(4, &[2, 3]).unwrap()).unwrap();
        assert!(!is_decomposable(&q));
        let x = VectorField::parse(&["x1^2", "x2^2", "x3^2", "x0^2"]).unwrap();
        let g = omega_from_field(&x).unwrap();
        assert!(decomposability_check(g.form()));
        assert!(integrability_check(g.form()).unwrap());
    }

    #[test]
    fn non_decomposable_trivector_fails_plucker() {
        // ∂0∧∂1∧∂2 + ∂3∧∂4∧∂5 in six variables
        let a = MultiVector::basis(6, &[0, 1, 2]).unwrap().try_add(&MultiVector::basis(6, &[3, 4, 5]).unwrap()).unwrap();
        assert!(!is_decomposable(&a));
        let v: Vec<MultiVector> = ["x0", "x1 + x2", "x5^2"]
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mut comps = vec![Poly::zero(6); 6];
                comps[k] = p(6, s);
                comps[(k + 3) % 6] = p(6, "x4");
                MultiVector::from_field(&VectorField::new(comps).unwrap())
            })
            .collect();
        let t = v[0].wedge(&v[1]).unwrap().wedge(&v[2]).unwrap();
        assert!(is_decomposable(&t));
    }

    #[test]
    fn rotational_of_omega_is_proportional() {
        let j = jouanolou_field(3, 2);
        let g = omega_from_field(&j).unwrap();
        let z = rotational(g.form()).unwrap();
        assert_eq!(proportionality_constant(&z, &j), Some(Q::from(4)));
        assert!(rotational(&KForm::zero(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn coordinate_hyperplanes_of_a_diagonal_field() {
        let x = VectorField::parse(&["x0", "2*x1", "5*x2"]).unwrap();
        let g = omega_from_field(&x).unwrap();
        let f = RationalMap::linear_projection(3).unwrap();
        let eta = pullback_form(&f, &g).unwrap().foliation;
        assert!(invariant_hypersurface_check(eta.form(), &p(4, "x0")).unwrap());
        assert!(!invariant_hypersurface_check(eta.form(), &p(4, "x0 + x1")).unwrap());
        let scan = bounded_invariant_hypersurface_scan(eta.form(), &ScanConfig::default()).unwrap();
        let want: Vec<Poly> = (0..3).map(|i| Poly::var(4, i)).collect();
        assert_eq!(scan.hypersurfaces.len(), 3, "{:?}", scan.found);
        for w in &want {
            assert!(scan.hypersurfaces.iter().any(|h| same_up_to_scalar(h, w)));
        }
    }
}
