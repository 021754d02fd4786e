//! Indeterminacy loci of rational maps `P^n ⇢ P^{n−1}`, their
//! transversality, and the regular-value test behind generic pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cpoly::NumMap;
use super::newton::{
    dehomogenize, homogenize, newton, newton_map, norm, normalize, pivot, projective_distance, random_point,
    random_unit_vector,
};
use super::singular::solve_singularities;
use super::NumericConfig;
use crate::error::Result;
use crate::foliation::{OneDimFoliation, RationalMap};

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndeterminacySet {
    /// Projective points, normalized so the pivot coordinate is one.
    pub points: Vec<Vec<C>>,
    pub expected: u64,
    pub found: usize,
    /// Full rank of the Jacobian of the components at each point.
    pub transversal: Vec<bool>,
    pub residuals: Vec<f64>,
    pub method: String,
    pub starts: usize,
    pub failed_starts: usize,
    pub seed: u64,
    pub tolerances: NumericConfig,
}

impl IndeterminacySet {
    pub fn non_reduced(&self) -> Vec<bool> {
        self.transversal.iter().map(|t| !t).collect()
    }
}

/// The `n × (n+1)` Jacobian of the components at a unit-norm representative.
fn jacobian_at(map: &NumMap, p: &[C]) -> DMatrix<C> {
    let s = norm(p);
    let unit: Vec<C> = p.iter().map(|c| c / s).collect();
    map.jacobian(&unit)
}

/// Smallest singular value of the Jacobian at a unit representative, over the
/// largest gradient the components can reach on the unit sphere. The point
/// counts as transversal when this exceeds `tol` and also the size a double
/// root would show at the given residual.
pub(crate) fn transversality(f: &RationalMap, p: &[C], residual: f64, tol: f64) -> (bool, f64) {
    let map = NumMap::new(f.components());
    let scale = f.components().iter().map(|c| c.coefficient_l1()).fold(0.0, f64::max) * f.degree() as f64;
    let sv = jacobian_at(&map, p).svd(false, false).singular_values;
    let ratio = sv.iter().copied().fold(f64::INFINITY, f64::min) / scale;
    (ratio > tol.max(1e3 * (residual / scale).sqrt()), ratio)
}

/// Closed-form roots for maps whose components are `a_i z_i^ν + b_i z_n^ν`.
/// When every `b_i` vanishes the locus is the single point `[0:…:0:1]`.
fn diagonal_shape(f: &RationalMap) -> Option<Vec<Vec<C>>> {
    let n = f.source_dim();
    let nu = f.degree();
    let mut ratios = Vec::with_capacity(n);
    for (i, p) in f.components().iter().enumerate() {
        let mut a = None;
        let mut b = None;
        for (m, c) in p.terms() {
            let e = m.exps();
            if e[i] as u32 == nu {
                a = Some(c.to_f64());
            } else if e[n] as u32 == nu {
                b = Some(c.to_f64());
            } else {
                return None;
            }
        }
        ratios.push(-b.unwrap_or(0.0) / a?);
    }
    if ratios.iter().all(|&r| r == 0.0) {
        let mut p = vec![C::new(0.0, 0.0); n + 1];
        p[n] = C::new(1.0, 0.0);
        return Some(vec![p]);
    }
    if ratios.iter().any(|&r| r == 0.0) {
        return None;
    }
    let roots: Vec<Vec<C>> = ratios
        .iter()
        .map(|&r| {
            let base = C::new(r, 0.0).powf(1.0 / nu as f64);
            (0..nu).map(|k| base * C::from_polar(1.0, std::f64::consts::TAU * k as f64 / nu as f64)).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for rs in &roots {
        out = out.into_iter().flat_map(|p: Vec<C>| rs.iter().map(move |r| [p.clone(), vec![*r]].concat())).collect();
    }
    for p in out.iter_mut() {
        p.push(C::new(1.0, 0.0));
    }
    Some(out)
}

/// Solves `F_0 = … = F_{n−1} = 0` on `P^n` and deduplicates projectively.
pub fn indeterminacy_locus(f: &RationalMap, cfg: &NumericConfig) -> Result<IndeterminacySet> {
    let n = f.source_dim();
    let expected = (f.degree() as u64).pow(n as u32);
    let map = NumMap::new(f.components());
    let chart_maps: Vec<NumMap> = (0..=n)
        .map(|j| {
            let emb = super::chart::chart_embedding(n + 1, j)?;
            let comps: Vec<_> = f.components().iter().map(|p| p.compose(&emb)).collect::<Result<_>>()?;
            Ok(NumMap::new(&comps))
        })
        .collect::<Result<_>>()?;
    let mut points: Vec<(Vec<C>, f64)> = Vec::new();
    let (mut starts, mut failed) = (0, 0);
    // roots of higher multiplicity converge only linearly, so they merge
    // within the square root of the residual tolerance
    let loose = cfg.dedup_radius.max(10.0 * cfg.residual_tol.sqrt());
    let push = |p: Vec<C>, res: f64, pts: &mut Vec<(Vec<C>, f64)>| {
        let radius = if transversality(f, &p, res, cfg.rank_tol).0 { cfg.dedup_radius } else { loose };
        if let Some(q) = pts.iter_mut().find(|(q, _)| projective_distance(q, &p) < radius) {
            if res < q.1 {
                *q = (p, res);
            }
        } else {
            pts.push((p, res));
        }
    };
    let shape = if cfg.exact_shapes { diagonal_shape(f) } else { None };
    let method = if let Some(exact) = shape {
        for p in exact {
            starts += 1;
            let j = pivot(&p);
            let r = newton_map(&chart_maps[j], dehomogenize(&p, j), cfg.max_newton_iter, cfg.residual_tol);
            let (q, res) = if r.converged && projective_distance(&homogenize(&r.point, j), &p) < cfg.dedup_radius {
                (homogenize(&r.point, j), r.residual)
            } else {
                let res = map.eval(&p).norm();
                (p, res)
            };
            push(normalize(&q), res, &mut points);
        }
        "closed-form"
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let share = (cfg.starts_per_expected * expected as usize).div_ceil(n + 1);
        for (cj, cm) in chart_maps.iter().enumerate() {
            for _ in 0..share {
                starts += 1;
                let r = newton_map(cm, random_point(&mut rng, n, cfg.start_radius), cfg.max_newton_iter, cfg.residual_tol);
                if !r.converged {
                    failed += 1;
                    continue;
                }
                let p = homogenize(&r.point, cj);
                let j = pivot(&p);
                let pol = newton_map(&chart_maps[j], dehomogenize(&p, j), cfg.max_newton_iter, cfg.residual_tol);
                let (q, res) = if pol.converged { (homogenize(&pol.point, j), pol.residual) } else { (p, r.residual) };
                push(normalize(&q), res, &mut points);
            }
        }
        "multistart-newton"
    };
    points.sort_by(|a, b| {
        let key = |p: &Vec<C>| p.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<f64>>();
        key(&a.0).partial_cmp(&key(&b.0)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let transversal = points.iter().map(|(p, r)| transversality(f, p, *r, cfg.rank_tol).0).collect();
    let residuals = points.iter().map(|(_, r)| *r).collect();
    Ok(IndeterminacySet {
        found: points.len(),
        points: points.into_iter().map(|(p, _)| p).collect(),
        expected,
        transversal,
        residuals,
        method: method.into(),
        starts,
        failed_starts: failed,
        seed: cfg.seed,
        tolerances: cfg.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub generic: bool,
    pub count_matches: bool,
    pub per_point: Vec<bool>,
    /// Smallest singular value of the Jacobian at each point, relative to the
    /// coefficient bound of the gradients.
    pub singular_value_ratios: Vec<f64>,
}

/// `dF_0 ∧ … ∧ dF_{n−1} ≠ 0` at every indeterminacy point, and the Bézout
/// count is reached.
pub fn genericity_check(f: &RationalMap, set: &IndeterminacySet, cfg: &NumericConfig) -> GenericityReport {
    let (per_point, ratios): (Vec<bool>, Vec<f64>) = set
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| transversality(f, p, set.residuals.get(i).copied().unwrap_or(0.0), cfg.rank_tol))
        .unzip();
    let count_matches = set.found as u64 == set.expected;
    GenericityReport { generic: count_matches && per_point.iter().all(|&b| b), count_matches, per_point, singular_value_ratios: ratios }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberCheck {
    /// The singular point of the foliation on the target.
    pub q: Vec<C>,
    /// Preimage points found on random slices of the fiber, each with full rank.
    pub sampled_preimages: usize,
    pub sampled_full_rank: bool,
    /// Critical point of the map over `q`, when the search finds one.
    pub critical_point: Option<Vec<C>>,
    /// Least residual of the critical-point system over all starts.
    pub min_critical_residual: f64,
    pub starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericPairReport {
    pub verdict: Verdict,
    pub singularities_expected: u64,
    pub singularities_found: usize,
    pub fibers: Vec<FiberCheck>,
    pub seed: u64,
    pub tolerances: NumericConfig,
}

/// Cross-product system `F_i(z)·q_p − F_p(z)·q_i = 0` (`i ≠ p`) whose zeros
/// are the points mapped to `q` together with `I(f)`.
pub(crate) fn cross_rows(f_val: &DVector<C>, f_jac: &DMatrix<C>, q: &[C]) -> (Vec<C>, Vec<Vec<C>>) {
    let p = pivot(q);
    let mut vals = Vec::new();
    let mut rows = Vec::new();
    for i in 0..q.len() {
        if i == p {
            continue;
        }
        vals.push(f_val[i] * q[p] - f_val[p] * q[i]);
        rows.push((0..f_jac.ncols()).map(|k| f_jac[(i, k)] * q[p] - f_jac[(p, k)] * q[i]).collect());
    }
    (vals, rows)
}

/// Points `z` off `I(f)` with `f(z) = q` projectively, one per random pair of
/// affine slices.
pub fn sample_fiber(f: &RationalMap, q: &[C], count: usize, cfg: &NumericConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<C>> {
    let map = NumMap::new(f.components());
    let m = f.source_dim() + 1;
    let mut out: Vec<Vec<C>> = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count.max(1) {
        attempts += 1;
        let a = random_unit_vector(rng, m);
        let b = random_unit_vector(rng, m);
        let c = random_point(rng, 1, 1.0)[0];
        let sys = |z: &[C]| {
            let (v, j) = (map.eval(z), map.jacobian(z));
            let (mut vals, mut rows) = cross_rows(&v, &j, q);
            vals.push(a.iter().zip(z).map(|(x, y)| x * y).sum::<C>() - 1.0);
            rows.push(a.clone());
            vals.push(b.iter().zip(z).map(|(x, y)| x * y).sum::<C>() - c);
            rows.push(b.clone());
            let jm = DMatrix::from_fn(rows.len(), m, |r, k| rows[r][k]);
            (DVector::from_vec(vals), jm)
        };
        let r = newton(sys, random_point(rng, m, cfg.start_radius), cfg.max_newton_iter, cfg.residual_tol);
        if !r.converged {
            continue;
        }
        let z = normalize(&r.point);
        let fz = map.eval(&z);
        if fz.norm() <= 1e-6 * map.magnitude(&z) {
            continue;
        }
        if out.iter().all(|w| projective_distance(w, &z) > cfg.dedup_radius) {
            out.push(z);
        }
    }
    out
}

/// Multistart search for `z` with `f(z) = q` projectively and a covector `w`
/// killing the Jacobian. The system is overdetermined by one equation, so
/// it is solvable only when `q` is a critical value.
fn critical_search(f: &RationalMap, q: &[C], starts: usize, cfg: &NumericConfig, rng: &mut ChaCha8Rng) -> Result<(Option<Vec<C>>, f64)> {
    let map = NumMap::new(f.components());
    let n = q.len();
    let m = n + 1;
    let grads: Vec<NumMap> = f
        .components()
        .iter()
        .map(|p| Ok(NumMap::new(&(0..m).map(|k| p.partial(k)).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<_>>()?;
    let a = random_unit_vector(rng, m);
    let b = random_unit_vector(rng, n);
    let sys = |x: &[C]| {
        let (z, w) = x.split_at(m);
        let (v, j) = (map.eval(z), map.jacobian(z));
        let (mut vals, rows) = cross_rows(&v, &j, q);
        let mut jac_rows: Vec<Vec<C>> = rows.into_iter().map(|mut r| {
            r.resize(m + n, C::new(0.0, 0.0));
            r
        }).collect();
        // w^T DF(z) = 0
        let hess: Vec<DMatrix<C>> = grads.iter().map(|g| g.jacobian(z)).collect();
        for k in 0..m {
            vals.push((0..n).map(|i| w[i] * j[(i, k)]).sum());
            let mut row = vec![C::new(0.0, 0.0); m + n];
            for (l, slot) in row.iter_mut().enumerate().take(m) {
                *slot = (0..n).map(|i| w[i] * hess[i][(k, l)]).sum();
            }
            for i in 0..n {
                row[m + i] = j[(i, k)];
            }
            jac_rows.push(row);
        }
        vals.push(a.iter().zip(z).map(|(x, y)| x * y).sum::<C>() - 1.0);
        let mut row = a.clone();
        row.resize(m + n, C::new(0.0, 0.0));
        jac_rows.push(row);
        vals.push(b.iter().zip(w).map(|(x, y)| x * y).sum::<C>() - 1.0);
        let mut row = vec![C::new(0.0, 0.0); m];
        row.extend(b.iter().copied());
        jac_rows.push(row);
        let jm = DMatrix::from_fn(jac_rows.len(), m + n, |r, k| jac_rows[r][k]);
        (DVector::from_vec(vals), jm)
    };
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let x0 = random_point(rng, m + n, cfg.start_radius);
        let r = newton(&sys, x0, cfg.max_newton_iter, cfg.residual_tol);
        best = best.min(r.residual);
        if r.converged {
            return Ok((Some(normalize(&r.point[..m])), r.residual));
        }
    }
    Ok((None, best))
}

/// Whether no singular point of `G` is a critical value of `f`.
///
/// For each singularity `q` a multistart search looks for a critical point
/// over `q`, and a few sampled preimages are checked for full rank. A search
/// whose best residual lands within a factor `10^4` of the tolerance is
/// reported inconclusive.
pub fn generic_pair_check(f: &RationalMap, g: &OneDimFoliation, cfg: &NumericConfig) -> Result<GenericPairReport> {
    let sing = solve_singularities(g, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9a1f);
    let starts = cfg.starts_per_expected.max(1);
    let mut verdict = if sing.found as u64 == sing.expected { Verdict::Pass } else { Verdict::Inconclusive };
    let mut fibers = Vec::new();
    for rec in &sing.points {
        let q = &rec.point;
        let samples = sample_fiber(f, q, 4, cfg, &mut rng);
        let sampled_full_rank = samples.iter().all(|z| transversality(f, z, 0.0, cfg.rank_tol).0);
        let (critical_point, min_res) = critical_search(f, q, starts, cfg, &mut rng)?;
        if critical_point.is_some() || !sampled_full_rank {
            verdict = Verdict::Fail;
        } else if min_res < 1e4 * cfg.residual_tol && verdict == Verdict::Pass {
            verdict = Verdict::Inconclusive;
        }
        fibers.push(FiberCheck {
            q: q.clone(),
            sampled_preimages: samples.len(),
            sampled_full_rank,
            critical_point,
            min_critical_residual: min_res,
            starts,
        });
    }
    Ok(GenericPairReport {
        verdict,
        singularities_expected: sing.expected,
        singularities_found: sing.found,
        fibers,
        seed: cfg.seed,
        tolerances: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::omega_from_field;
    use crate::graded::jouanolou_field;
    use crate::rational::Q;
    use crate::ring::Poly;

    fn sign_points(n: usize) -> Vec<Vec<C>> {
        (0..1usize << n)
            .map(|mask| {
                let mut p: Vec<C> = (0..n).map(|i| C::new(if mask >> i & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect();
                p.push(C::new(1.0, 0.0));
                p
            })
            .collect()
    }

    fn matches_closed_form(set: &IndeterminacySet, want: &[Vec<C>], tol: f64) {
        assert_eq!(set.found, want.len());
        for w in want {
            let w = &normalize(w);
            let best = set.points.iter().map(|p| super::super::newton::distance(p, w)).fold(f64::INFINITY, f64::min);
            assert!(best < tol, "{w:?} off by {best:e}");
        }
    }

    #[test]
    fn sixteen_sign_points_both_routes() {
        let f = RationalMap::diagonal_difference(4, 2).unwrap();
        let want = sign_points(4);
        let exact = indeterminacy_locus(&f, &NumericConfig::default()).unwrap();
        assert_eq!(exact.method, "closed-form");
        matches_closed_form(&exact, &want, 1e-12);
        let cfg = NumericConfig { exact_shapes: false, ..NumericConfig::default() };
        let searched = indeterminacy_locus(&f, &cfg).unwrap();
        assert_eq!(searched.method, "multistart-newton");
        matches_closed_form(&searched, &want, 1e-10);
        let gen = genericity_check(&f, &searched, &cfg);
        assert!(gen.generic && gen.per_point.len() == 16);
    }

    #[test]
    fn linear_projection_has_one_point() {
        let f = RationalMap::linear_projection(4).unwrap();
        let cfg = NumericConfig::default();
        let set = indeterminacy_locus(&f, &cfg).unwrap();
        assert_eq!((set.found, set.expected), (1, 1));
        assert!(set.points[0][..4].iter().all(|c| c.norm() < 1e-12));
        assert!(genericity_check(&f, &set, &cfg).generic);
    }

    #[test]
    fn pure_squares_are_not_reduced() {
        let f = RationalMap::new_unchecked((0..4).map(|i| Poly::var(5, i).pow(2)).collect()).unwrap();
        for exact_shapes in [true, false] {
            let cfg = NumericConfig { exact_shapes, ..NumericConfig::default() };
            let set = indeterminacy_locus(&f, &cfg).unwrap();
            assert_eq!(set.found, 1);
            assert_eq!(set.non_reduced(), vec![true]);
            let gen = genericity_check(&f, &set, &cfg);
            assert!(!gen.generic && !gen.count_matches);
        }
    }

    fn scaled_map() -> RationalMap {
        let c: Vec<Q> = (1..=4).map(|i| Q::from(i * i)).collect();
        RationalMap::diagonal_difference_scaled(4, 2, &c).unwrap()
    }

    #[test]
    fn scaled_diagonal_map_and_jouanolou_form_a_generic_pair() {
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        let rep = generic_pair_check(&scaled_map(), &g, &NumericConfig::default()).unwrap();
        assert_eq!(rep.singularities_found, 15);
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.fibers.iter().map(|f| f.min_critical_residual).collect::<Vec<_>>());
        assert!(rep.fibers.iter().all(|f| f.sampled_preimages > 0 && f.sampled_full_rank));
    }

    #[test]
    fn equal_weights_make_a_singularity_a_critical_value() {
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        let f = RationalMap::diagonal_difference(4, 2).unwrap();
        let rep = generic_pair_check(&f, &g, &NumericConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        let bad = rep.fibers.iter().find(|c| c.critical_point.is_some()).unwrap();
        assert!(!transversality(&f, bad.critical_point.as_ref().unwrap(), 0.0, 1e-6).0);
    }

    #[test]
    fn linear_maps_have_no_critical_values() {
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        let f = RationalMap::linear_projection(4).unwrap();
        let rep = generic_pair_check(&f, &g, &NumericConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }
}
