//! Local structure of a foliation by surfaces at a singular point: the Kupka
//! condition and nilpotent generalized Kupka points, read off the rotational
//! of the form in an affine chart.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chart::chart_rotational;
use super::cpoly::NumMap;
use super::maps::transversality;
use super::newton::{dehomogenize, distance, newton, norm, pivot, random_unit_vector};
use super::singular::TypeTag;
use super::NumericConfig;
use crate::error::{Error, Result};
use crate::exterior::{KForm, VectorField};
use crate::foliation::TwoDimFoliation;
use crate::linalg::QMatrix;
use crate::rational::Q;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KupkaVerdict {
    pub kupka: bool,
    pub chart: usize,
    /// Largest coefficient of the form at the point, relative to its scale.
    pub form_residual: f64,
    pub rotational_norm: f64,
    pub rotational_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NgkStatus {
    Ngk,
    /// The rotational does not vanish.
    NonzeroRotational,
    NotNilpotent,
    NotIsolated,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NgkVerdict {
    pub ngk: bool,
    pub status: NgkStatus,
    pub chart: Option<usize>,
    pub rotational_norm: f64,
    /// `‖DZ^m‖ / ‖DZ‖^m` in chart dimension `m`, or `‖DZ‖` relative to its
    /// scale when the linear part vanishes outright.
    pub nilpotency_residual: f64,
    /// Exact verdict when the point has rational coordinates.
    pub exact_nilpotent: Option<bool>,
    /// Zeros of the rotational found on hyperplanes near the point.
    pub shell_zeros: usize,
    pub type_tag: Option<TypeTag>,
}

struct ChartData {
    field: VectorField,
    map: NumMap,
}

/// A foliation by surfaces prepared for repeated local tests: numeric forms
/// of its coefficients and of the rotational in each chart.
pub struct LocalModel {
    foliation: TwoDimFoliation,
    coefficients: NumMap,
    charts: Vec<ChartData>,
}

impl LocalModel {
    pub fn new(f: &TwoDimFoliation) -> Result<Self> {
        let eta: &KForm = f.form();
        let comps: Vec<_> = eta.components().map(|(_, p)| p.clone()).collect();
        let charts = (0..eta.nvars())
            .map(|j| {
                let field = chart_rotational(eta, j)?;
                Ok(ChartData { map: NumMap::from_field(&field), field })
            })
            .collect::<Result<_>>()?;
        Ok(LocalModel { foliation: f.clone(), coefficients: NumMap::new(&comps), charts })
    }

    pub fn foliation(&self) -> &TwoDimFoliation {
        &self.foliation
    }

    /// The rotational of the form restricted to chart `j`.
    pub fn rotational(&self, j: usize) -> &VectorField {
        &self.charts[j].field
    }

    fn unit(p: &[C]) -> Vec<C> {
        let s = norm(p);
        p.iter().map(|c| c / s).collect()
    }

    /// Largest coefficient of the form at the point over the coefficient scale.
    pub fn form_residual(&self, p: &[C]) -> f64 {
        let u = Self::unit(p);
        let v = self.coefficients.eval(&u);
        let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        max / self.coefficients.magnitude(&u).max(f64::MIN_POSITIVE)
    }

    fn require_singular(&self, p: &[C], cfg: &NumericConfig) -> Result<f64> {
        if p.len() != self.charts.len() {
            return Err(Error::LengthMismatch { expected: self.charts.len(), got: p.len() });
        }
        let r = self.form_residual(p);
        if r > cfg.vanishing_tol {
            return Err(Error::Precondition(format!("point is not singular (relative residual {r:.3e})")));
        }
        Ok(r)
    }

    /// Kupka iff the rotational does not vanish at the point.
    pub fn kupka(&self, p: &[C], cfg: &NumericConfig) -> Result<KupkaVerdict> {
        let form_residual = self.require_singular(p, cfg)?;
        let j = pivot(p);
        let u = dehomogenize(p, j);
        let z = &self.charts[j].map;
        let rotational_norm = z.eval(&u).norm();
        let rotational_scale = z.magnitude(&u);
        Ok(KupkaVerdict {
            kupka: rotational_norm > cfg.vanishing_tol * rotational_scale,
            chart: j,
            form_residual,
            rotational_norm,
            rotational_scale,
        })
    }

    /// Nilpotent generalized Kupka test; a type tag is attached at
    /// transversal indeterminacy points of a pull-back.
    pub fn ngk(&self, p: &[C], cfg: &NumericConfig) -> Result<NgkVerdict> {
        self.require_singular(p, cfg)?;
        let j = pivot(p);
        let u = dehomogenize(p, j);
        let mut v = ngk_point_test(&self.charts[j].field, &u, cfg)?;
        v.chart = Some(j);
        if v.ngk {
            if let Some(prov) = self.foliation.provenance() {
                let fmap = NumMap::new(prov.map.components());
                let up = Self::unit(p);
                let on_locus = fmap.eval(&up).norm() <= cfg.vanishing_tol * fmap.magnitude(&up);
                if on_locus && transversality(&prov.map, p, 0.0, cfg.rank_tol).0 {
                    let d = prov.foliation.degree() as i64;
                    v.type_tag = Some(TypeTag { weights: vec![1; u.len()], k: d - 1 });
                }
            }
        }
        Ok(v)
    }
}

pub fn kupka_test(f: &TwoDimFoliation, p: &[C], cfg: &NumericConfig) -> Result<KupkaVerdict> {
    LocalModel::new(f)?.kupka(p, cfg)
}

pub fn ngk_test(f: &TwoDimFoliation, p: &[C], cfg: &NumericConfig) -> Result<NgkVerdict> {
    LocalModel::new(f)?.ngk(p, cfg)
}

fn frobenius(m: &DMatrix<C>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Rational coordinates within `1e−13`, if every coordinate has one with a
/// denominator of at most a thousand.
fn recognize_rational(u: &[C]) -> Option<Vec<Q>> {
    u.iter()
        .map(|c| {
            let q = Q::approximate(c.re, 1000);
            let ok = c.im.abs() <= 1e-13 && (q.to_f64() - c.re).abs() <= 1e-13 * c.re.abs().max(1.0);
            ok.then_some(q)
        })
        .collect()
}

/// Exact `DZ(u)^m = 0` for a rational point in dimension `m`.
pub fn exact_nilpotent(z: &VectorField, u: &[Q]) -> Result<bool> {
    let jac = z.jacobian();
    let rows: Vec<Vec<Q>> = jac.iter().map(|row| row.iter().map(|p| p.eval(u)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let m = QMatrix::from_rows(rows);
    let dim = u.len();
    for j in 0..dim {
        let mut v: Vec<Q> = (0..dim).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
        for _ in 0..dim {
            v = m.mul_vec(&v);
        }
        if v.iter().any(|c| !c.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The chart-level test for a vector field `Z` at an affine point `u`:
/// `Z(u) ≈ 0`, `DZ(u)` nilpotent, and no zero of `Z` on random affine
/// hyperplanes at distance `shell_radius`.
pub fn ngk_point_test(z: &VectorField, u: &[C], cfg: &NumericConfig) -> Result<NgkVerdict> {
    if z.nvars() != u.len() {
        return Err(Error::LengthMismatch { expected: z.nvars(), got: u.len() });
    }
    let map = NumMap::from_field(z);
    let rotational_norm = map.eval(u).norm();
    let mut verdict = NgkVerdict {
        ngk: false,
        status: NgkStatus::NonzeroRotational,
        chart: None,
        rotational_norm,
        nilpotency_residual: f64::NAN,
        exact_nilpotent: None,
        shell_zeros: 0,
        type_tag: None,
    };
    if rotational_norm > cfg.vanishing_tol * map.magnitude(u).max(f64::MIN_POSITIVE) {
        return Ok(verdict);
    }
    let dim = u.len();
    let jac = map.jacobian(u);
    let jac_scale = z.jacobian().iter().flatten().map(|p| p.coefficient_l1()).fold(0.0, f64::max);
    let jn = frobenius(&jac);
    verdict.nilpotency_residual = if jn <= cfg.nilpotency_tol * jac_scale {
        jn / jac_scale.max(f64::MIN_POSITIVE)
    } else {
        let mut pw = jac.clone();
        for _ in 1..dim {
            pw = &pw * &jac;
        }
        frobenius(&pw) / jn.powi(dim as i32)
    };
    if let Some(q) = recognize_rational(u) {
        verdict.exact_nilpotent = Some(exact_nilpotent(z, &q)?);
    }
    let nilpotent = match verdict.exact_nilpotent {
        Some(e) => e,
        None if verdict.nilpotency_residual <= cfg.nilpotency_tol => true,
        None if verdict.nilpotency_residual <= cfg.nilpotency_tol.sqrt() => {
            verdict.status = NgkStatus::Unresolved;
            return Ok(verdict);
        }
        None => false,
    };
    if !nilpotent {
        verdict.status = NgkStatus::NotNilpotent;
        return Ok(verdict);
    }
    // zeros on random affine slices at distance r; an isolated zero leaves
    // these overdetermined systems without solutions
    let seed = cfg.seed ^ u.iter().fold(0u64, |h, c| h.rotate_left(7) ^ c.re.to_bits() ^ c.im.to_bits());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = cfg.shell_radius;
    for _ in 0..cfg.shell_starts {
        let a = random_unit_vector(&mut rng, dim);
        let dir = random_unit_vector(&mut rng, dim);
        let shift: C = a.iter().zip(&dir).map(|(x, y)| x * y).sum();
        if shift.norm() < 0.1 {
            continue;
        }
        let start: Vec<C> = u.iter().zip(&dir).map(|(x, y)| x + y * (r / shift)).collect();
        let sys = |x: &[C]| {
            let mut vals: Vec<C> = map.eval(x).iter().copied().collect();
            vals.push(a.iter().zip(x.iter().zip(u)).map(|(ai, (xi, ui))| ai * (xi - ui)).sum::<C>() - r);
            let mut jac = map.jacobian(x).insert_row(dim, C::new(0.0, 0.0));
            for (k, ak) in a.iter().enumerate() {
                jac[(dim, k)] = *ak;
            }
            (nalgebra::DVector::from_vec(vals), jac)
        };
        let res = newton(sys, start, cfg.max_newton_iter, cfg.residual_tol);
        if res.converged && distance(&res.point, u) < 10.0 * r {
            verdict.shell_zeros += 1;
        }
    }
    if verdict.shell_zeros > 0 {
        verdict.status = NgkStatus::NotIsolated;
        return Ok(verdict);
    }
    verdict.ngk = true;
    verdict.status = NgkStatus::Ngk;
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{omega_from_field, pullback_form, RationalMap};
    use crate::graded::jouanolou_field;
    use crate::numeric::maps::{indeterminacy_locus, sample_fiber};
    use crate::numeric::singular::solve_singularities;

    fn standard() -> TwoDimFoliation {
        let c: Vec<Q> = (1..=4).map(|i| Q::from(i * i)).collect();
        let f = RationalMap::diagonal_difference_scaled(4, 2, &c).unwrap();
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        pullback_form(&f, &g).unwrap().foliation
    }

    #[test]
    fn indeterminacy_points_are_ngk_and_fibers_are_kupka() {
        let fol = standard();
        let model = LocalModel::new(&fol).unwrap();
        let cfg = NumericConfig::default();
        let prov = fol.provenance().unwrap();
        let locus = indeterminacy_locus(&prov.map, &cfg).unwrap();
        assert_eq!(locus.found, 16);
        for p in &locus.points {
            let v = model.ngk(p, &cfg).unwrap();
            assert!(v.ngk, "{v:?}");
            assert_eq!(v.exact_nilpotent, Some(true));
            assert_eq!(v.type_tag, Some(TypeTag { weights: vec![1; 4], k: 1 }));
            assert!(!model.kupka(p, &cfg).unwrap().kupka);
        }
        let sing = solve_singularities(&prov.foliation, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in sing.points.iter().take(2) {
            let pts = sample_fiber(&prov.map, &q.point, 5, &cfg, &mut rng);
            assert_eq!(pts.len(), 5);
            for p in &pts {
                assert!(model.kupka(p, &cfg).unwrap().kupka);
                let v = model.ngk(p, &cfg).unwrap();
                assert_eq!(v.status, NgkStatus::NonzeroRotational);
            }
        }
    }

    #[test]
    fn regular_points_are_rejected() {
        let fol = standard();
        let p = vec![C::new(0.3, 0.1), C::new(-0.7, 0.2), C::new(0.5, 0.0), C::new(0.1, -0.4), C::new(1.0, 0.0)];
        let cfg = NumericConfig::default();
        assert!(matches!(kupka_test(&fol, &p, &cfg), Err(Error::Precondition(_))));
        assert!(ngk_test(&fol, &p, &cfg).is_err());
    }

    #[test]
    fn identity_linear_part_is_not_nilpotent() {
        let z = VectorField::parse(&["x0", "x1"]).unwrap();
        let v = ngk_point_test(&z, &[C::new(0.0, 0.0); 2], &NumericConfig::default()).unwrap();
        assert_eq!(v.status, NgkStatus::NotNilpotent);
        assert_eq!(v.exact_nilpotent, Some(false));
    }

    #[test]
    fn nilpotent_jordan_block_passes() {
        let z = VectorField::parse(&["x1 + x0^2", "x1^2"]).unwrap();
        let v = ngk_point_test(&z, &[C::new(0.0, 0.0); 2], &NumericConfig::default()).unwrap();
        assert!(v.ngk, "{v:?}");
        assert!(v.nilpotency_residual < 1e-12);
    }

    #[test]
    fn a_curve_of_zeros_is_not_isolated() {
        let z = VectorField::parse(&["x0^2", "x0*x1"]).unwrap();
        let v = ngk_point_test(&z, &[C::new(0.0, 0.0); 2], &NumericConfig::default()).unwrap();
        assert_eq!(v.status, NgkStatus::NotIsolated);
    }
}
