//! Singular points of foliations by curves on `P^{n−1}` and their
//! hyperbolicity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chart::{chart_field, ChartField};
use super::cpoly::NumMap;
use super::newton::{dehomogenize, homogenize, newton_map, normalize, pivot, projective_distance, random_point};
use super::univariate::{roots, CPoly};
use super::NumericConfig;
use crate::error::{Error, Result};
use crate::foliation::OneDimFoliation;
use crate::rational::Q;
use crate::ring::Poly;
use crate::upoly::{sylvester_resultant, UPoly};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Hyperbolic,
    NonHyperbolic,
    Kupka,
    Ngk,
    Unresolved,
}

/// Weights `(k_0, …, k_{m−1})` of the semisimple part and the eigenvalue `k`
/// of the nilpotent generalized Kupka normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTag {
    pub weights: Vec<u32>,
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPointRecord {
    pub chart: usize,
    /// Homogeneous coordinates with the chart coordinate equal to one.
    pub point: Vec<C>,
    pub residual: f64,
    pub eigenvalues: Option<Vec<C>>,
    /// Ratios `λ_a/λ_b` over ordered pairs `a ≠ b`.
    pub ratios: Option<Vec<C>>,
    pub classification: Option<Classification>,
    pub type_tag: Option<TypeTag>,
}

impl SingularPointRecord {
    pub fn new(point: &[C], residual: f64) -> Self {
        let point = normalize(point);
        SingularPointRecord {
            chart: pivot(&point),
            point,
            residual,
            eigenvalues: None,
            ratios: None,
            classification: None,
            type_tag: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub points: Vec<SingularPointRecord>,
    pub expected: u64,
    pub found: usize,
    pub method: String,
    pub starts: usize,
    pub failed_starts: usize,
    /// Pairs of solutions closer than a hundred merge radii but not merged.
    pub merge_ambiguities: usize,
    pub seed: u64,
    pub tolerances: NumericConfig,
}

/// `(d^n − 1)/(d − 1)`, the number of singularities of a generic foliation
/// of degree `d` on `P^{n−1}`.
pub fn expected_singularities(n: usize, d: u32) -> u64 {
    if d == 1 {
        return n as u64;
    }
    let d = d as u64;
    (d.pow(n as u32) - 1) / (d - 1)
}

/// Splits a polynomial in two variables into its coefficients in the second
/// variable, each a univariate polynomial in the first.
fn coefficients_in_second(p: &Poly) -> Vec<UPoly> {
    let deg = p.terms().iter().map(|(m, _)| m.exps()[1] as usize).max().unwrap_or(0);
    let mut dense: Vec<Vec<Q>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let (eu, ev) = (m.exps()[0] as usize, m.exps()[1] as usize);
        let row = &mut dense[ev];
        if row.len() <= eu {
            row.resize(eu + 1, Q::zero());
        }
        row[eu] = c.clone();
    }
    dense.into_iter().map(UPoly::new).collect()
}

/// Resultant of the two components of a planar chart field with respect to
/// the second chart variable.
pub fn planar_resultant(cf: &ChartField) -> Result<UPoly> {
    let comps = cf.field.components();
    if comps.len() != 2 {
        return Err(Error::LengthMismatch { expected: 2, got: comps.len() });
    }
    Ok(sylvester_resultant(&coefficients_in_second(&comps[0]), &coefficients_in_second(&comps[1])))
}

fn eval_upoly(p: &UPoly, u: C) -> C {
    p.coeffs().iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * u + c.to_f64())
}

/// Candidate solutions from the resultant: roots in the first variable, then
/// roots of the first component along each fiber.
fn planar_candidates(cf: &ChartField) -> Result<Option<Vec<Vec<C>>>> {
    let res = planar_resultant(cf)?;
    if res.is_zero() {
        return Ok(None);
    }
    let sf = res.squarefree();
    let us = roots(&CPoly(sf.to_f64().into_iter().map(|c| C::new(c, 0.0)).collect()));
    let comps = cf.field.components();
    let a = coefficients_in_second(&comps[0]);
    let b = coefficients_in_second(&comps[1]);
    let mut out = Vec::new();
    for u in us {
        let along = |c: &[UPoly]| CPoly(c.iter().map(|p| eval_upoly(p, u)).collect());
        let (pa, pb) = (along(&a), along(&b));
        let fiber = if pa.trimmed(1e-12).0.len() >= 2 { pa } else { pb };
        let fiber = fiber.trimmed(1e-12);
        if fiber.0.len() < 2 {
            continue;
        }
        for v in roots(&fiber) {
            out.push(vec![u, v]);
        }
    }
    Ok(Some(out))
}

/// Merges a solution into the list under projective normalization; returns
/// whether a near-miss (ambiguous merge) occurred.
fn merge(points: &mut Vec<SingularPointRecord>, p: &[C], residual: f64, radius: f64) -> bool {
    let mut ambiguous = false;
    for q in points.iter_mut() {
        let dist = projective_distance(&q.point, p);
        if dist < radius {
            if residual < q.residual {
                *q = SingularPointRecord::new(p, residual);
            }
            return false;
        }
        if dist < 100.0 * radius {
            ambiguous = true;
        }
    }
    points.push(SingularPointRecord::new(p, residual));
    ambiguous
}

/// Newton polish of a homogeneous point in its pivot chart.
fn polish(maps: &[NumMap], p: &[C], cfg: &NumericConfig) -> Option<(Vec<C>, f64)> {
    let j = pivot(p);
    let r = newton_map(&maps[j], dehomogenize(p, j), cfg.max_newton_iter, cfg.residual_tol);
    r.converged.then(|| (homogenize(&r.point, j), r.residual))
}

/// All singular points of `G` on `P^{n−1}`, merged across the `n` charts.
///
/// Planar foliations go through exact elimination; in higher dimension each
/// chart gets an equal share of `starts_per_expected · N` Newton starts.
pub fn solve_singularities(g: &OneDimFoliation, cfg: &NumericConfig) -> Result<SingularityReport> {
    let n = g.nvars();
    let expected = expected_singularities(n, g.degree());
    let charts: Vec<ChartField> = (0..n).map(|j| chart_field(g, j)).collect::<Result<_>>()?;
    let maps: Vec<NumMap> = charts.iter().map(|c| NumMap::from_field(&c.field)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points: Vec<SingularPointRecord> = Vec::new();
    let (mut starts, mut failed, mut ambiguities) = (0, 0, 0);
    let mut method = String::from("resultant");
    for (j, cf) in charts.iter().enumerate() {
        let candidates = if n == 3 { planar_candidates(cf)? } else { None };
        let candidates = match candidates {
            Some(c) => c,
            None => {
                method = String::from("multistart-newton");
                let share = (cfg.starts_per_expected * expected as usize).div_ceil(n);
                (0..share).map(|_| random_point(&mut rng, n - 1, cfg.start_radius)).collect()
            }
        };
        for u in candidates {
            starts += 1;
            let r = newton_map(&maps[j], u, cfg.max_newton_iter, cfg.residual_tol);
            if !r.converged {
                failed += 1;
                continue;
            }
            let Some((p, res)) = polish(&maps, &homogenize(&r.point, j), cfg) else {
                failed += 1;
                continue;
            };
            if merge(&mut points, &p, res, cfg.dedup_radius) {
                ambiguities += 1;
            }
        }
    }
    points.sort_by(|a, b| {
        let key = |r: &SingularPointRecord| r.point.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<f64>>();
        a.chart.cmp(&b.chart).then_with(|| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(SingularityReport {
        found: points.len(),
        points,
        expected,
        method,
        starts,
        failed_starts: failed,
        merge_ambiguities: ambiguities,
        seed: cfg.seed,
        tolerances: cfg.clone(),
    })
}

fn matrix_norm(m: &DMatrix<C>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of the chart linearization and the hyperbolicity verdict:
/// hyperbolic iff every ratio of eigenvalues is non-real.
pub fn classify_hyperbolic(
    rec: &SingularPointRecord,
    field: &ChartField,
    cfg: &NumericConfig,
) -> Result<SingularPointRecord> {
    if !(rec.residual <= cfg.residual_tol) {
        return Err(Error::Precondition(format!(
            "residual {:.3e} exceeds tolerance {:.3e}",
            rec.residual, cfg.residual_tol
        )));
    }
    let j = field.chart;
    if rec.point[j].norm() < 1e-12 {
        return Err(Error::Precondition(format!("point lies off chart {j}")));
    }
    let u = dehomogenize(&rec.point, j);
    let jac = NumMap::from_field(&field.field).jacobian(&u);
    let scale = matrix_norm(&jac);
    let mut out = rec.clone();
    let Some(eig) = jac.clone().schur().eigenvalues() else {
        out.classification = Some(Classification::Unresolved);
        return Ok(out);
    };
    let eig: Vec<C> = eig.iter().copied().collect();
    let mut ratios = Vec::new();
    for (a, la) in eig.iter().enumerate() {
        for (b, lb) in eig.iter().enumerate() {
            if a != b && lb.norm() > 0.0 {
                ratios.push(la / lb);
            }
        }
    }
    let near_zero = eig.iter().any(|l| l.norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
    let coincident = eig
        .iter()
        .enumerate()
        .any(|(a, la)| eig[a + 1..].iter().any(|lb| (la - lb).norm() <= 1e-7 * scale));
    out.classification = Some(if coincident && !near_zero {
        Classification::Unresolved
    } else if near_zero || ratios.iter().any(|r| r.im.abs() <= cfg.hyperbolic_tol * r.norm()) {
        Classification::NonHyperbolic
    } else {
        Classification::Hyperbolic
    });
    out.eigenvalues = Some(eig);
    out.ratios = Some(ratios);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::VectorField;
    use crate::foliation::omega_from_field;
    use crate::graded::jouanolou_field;

    fn jouanolou(n: usize, d: u32) -> OneDimFoliation {
        omega_from_field(&jouanolou_field(n, d)).unwrap()
    }

    #[test]
    fn expected_counts() {
        assert_eq!(expected_singularities(3, 2), 7);
        assert_eq!(expected_singularities(3, 3), 13);
        assert_eq!(expected_singularities(4, 2), 15);
        assert_eq!(expected_singularities(3, 1), 3);
    }

    #[test]
    fn resultant_of_the_jouanolou_chart_is_x7_minus_1() {
        let cf = chart_field(&jouanolou(3, 2), 2).unwrap();
        let sf = planar_resultant(&cf).unwrap().squarefree();
        let mut want = vec![Q::zero(); 8];
        want[0] = Q::from(-1);
        want[7] = Q::one();
        assert_eq!(sf, UPoly::new(want));
    }

    #[test]
    fn seven_hyperbolic_points_on_the_plane() {
        let g = jouanolou(3, 2);
        let cfg = NumericConfig::default();
        let rep = solve_singularities(&g, &cfg).unwrap();
        assert_eq!(rep.found, 7);
        for rec in &rep.points {
            assert!(rec.residual < 1e-10);
            let cf = chart_field(&g, rec.chart).unwrap();
            let c = classify_hyperbolic(rec, &cf, &cfg).unwrap();
            assert_eq!(c.classification, Some(Classification::Hyperbolic));
        }
    }

    #[test]
    fn generic_counts_in_other_degrees_and_dimensions() {
        let cfg = NumericConfig::default();
        for (n, d) in [(3, 3), (4, 2)] {
            let g = jouanolou(n, d);
            let rep = solve_singularities(&g, &cfg).unwrap();
            assert_eq!(rep.found as u64, expected_singularities(n, d), "n={n} d={d}");
            assert!(rep.points.iter().all(|r| r.residual < 1e-10));
            assert_eq!(rep.merge_ambiguities, 0);
        }
    }

    #[test]
    fn coordinate_points_of_a_diagonal_field() {
        let g = omega_from_field(&VectorField::parse(&["x0", "2*x1", "3*x2"]).unwrap()).unwrap();
        let cfg = NumericConfig::default();
        let rep = solve_singularities(&g, &cfg).unwrap();
        assert_eq!(rep.found, 3);
        for (i, rec) in rep.points.iter().enumerate() {
            assert_eq!(rec.chart, i);
            assert!(rec.point.iter().enumerate().all(|(k, c)| k == i || c.norm() < 1e-12));
            let cf = chart_field(&g, i).unwrap();
            let c = classify_hyperbolic(rec, &cf, &cfg).unwrap();
            assert_eq!(c.classification, Some(Classification::NonHyperbolic));
        }
    }

    #[test]
    fn high_residual_is_rejected() {
        let g = jouanolou(3, 2);
        let cf = chart_field(&g, 2).unwrap();
        let rec = SingularPointRecord::new(&[C::new(0.3, 0.0), C::new(0.1, 0.0), C::new(1.0, 0.0)], 0.5);
        assert!(classify_hyperbolic(&rec, &cf, &NumericConfig::default()).is_err());
    }

    #[test]
    fn ratios_agree_across_charts() {
        let g = jouanolou(3, 2);
        let cfg = NumericConfig::default();
        let rep = solve_singularities(&g, &cfg).unwrap();
        for rec in &rep.points {
            let sets: Vec<Vec<C>> = (0..3)
                .map(|j| {
                    let mut r = rec.clone();
                    r.point = rec.point.iter().map(|c| c / rec.point[j]).collect();
                    classify_hyperbolic(&r, &chart_field(&g, j).unwrap(), &cfg).unwrap().ratios.unwrap()
                })
                .collect();
            for s in &sets[1..] {
                assert_eq!(s.len(), sets[0].len());
                for a in s {
                    let gap = sets[0].iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min);
                    assert!(gap < 1e-8, "{a} missing from {:?}", sets[0]);
                }
            }
        }
    }
}
