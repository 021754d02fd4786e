//! Continuation of nilpotent generalized Kupka points along a one-parameter
//! deformation of a pull-back foliation.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chart::chart_rotational;
use super::cpoly::NumMap;
use super::local::{ngk_point_test, LocalModel, NgkStatus};
use super::maps::indeterminacy_locus;
use super::newton::{dehomogenize, distance, homogenize, newton_map, norm, normalize, pivot, projective_distance};
use super::NumericConfig;
use crate::error::{Error, Result};
use crate::exterior::VectorField;
use crate::foliation::{omega_from_field, pullback_form, RationalMap, TwoDimFoliation};
use crate::rational::Q;
use crate::ring::Poly;

type C = Complex64;

/// Direction of the deformation: `f + t·g` or `X + t·H`.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    Map(RationalMap),
    Field(VectorField),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub t: f64,
    pub point: Vec<C>,
    /// Jet residual relative to the term magnitudes at the point.
    pub residual: f64,
    pub nilpotency_residual: f64,
    /// No other zero of the rotational near the point.
    pub unique: bool,
    pub displacement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPath {
    pub start: Vec<C>,
    pub steps: Vec<PathStep>,
    /// Parameter at which the corrector failed, if it did.
    pub lost_at: Option<f64>,
    pub type_change: bool,
    /// Largest displacement per unit parameter along the path.
    pub lipschitz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub paths: Vec<PointPath>,
    pub t_grid: Vec<f64>,
    /// Order of the first non-vanishing derivative of the rotational at the
    /// starting points; the corrector solves for all lower jets.
    pub jet_order: usize,
    pub lost: usize,
    pub type_changes: usize,
    pub seed: u64,
    pub tolerances: NumericConfig,
}

/// Every partial derivative of every component of orders `0..order`.
fn jet_polys(z: &VectorField, order: usize) -> Result<Vec<Poly>> {
    let m = z.nvars();
    let mut layer: Vec<(Vec<usize>, Poly)> = z.components().iter().map(|p| (Vec::new(), p.clone())).collect();
    let mut out: Vec<Poly> = layer.iter().map(|(_, p)| p.clone()).collect();
    for _ in 1..order {
        let mut next = Vec::new();
        for (idx, p) in &layer {
            let from = idx.last().copied().unwrap_or(0);
            for k in from..m {
                let mut i = idx.clone();
                i.push(k);
                next.push((i, p.partial(k)?));
            }
        }
        out.extend(next.iter().map(|(_, p)| p.clone()));
        layer = next;
    }
    Ok(out)
}

/// Order of the first derivative of `Z` that does not vanish at `u`, capped at four.
fn vanishing_order(z: &VectorField, u: &[C], tol: f64) -> Result<usize> {
    let mut order = 1;
    while order < 4 {
        let next = jet_polys(z, order + 1)?;
        let top = &next[jet_polys(z, order)?.len()..];
        let map = NumMap::new(top);
        if map.eval(u).norm() > tol * map.magnitude(u).max(1.0) {
            break;
        }
        order += 1;
    }
    Ok(order)
}

fn exact_parameter(t: f64) -> Q {
    Q::approximate(t, 1_000_000_000)
}

struct Deformed {
    foliation: TwoDimFoliation,
    charts: HashMap<usize, (VectorField, NumMap)>,
}

impl Deformed {
    fn chart(&mut self, j: usize, order: usize) -> Result<&(VectorField, NumMap)> {
        if !self.charts.contains_key(&j) {
            let z = chart_rotational(self.foliation.form(), j)?;
            let jets = NumMap::new(&jet_polys(&z, order)?);
            self.charts.insert(j, (z, jets));
        }
        Ok(&self.charts[&j])
    }
}

fn deformed(f0: &TwoDimFoliation, dir: &Perturbation, t: f64) -> Result<Deformed> {
    let prov = f0.provenance().ok_or_else(|| Error::Precondition("foliation has no pull-back provenance".into()))?;
    let foliation = if t == 0.0 {
        f0.clone()
    } else {
        let tq = exact_parameter(t);
        let (map, g) = match dir {
            Perturbation::Map(g) => (prov.map.try_add(&g.scale(&tq))?, prov.foliation.clone()),
            Perturbation::Field(h) => {
                let x = prov.foliation.field().try_add(&h.scale(&tq))?;
                (prov.map.clone(), omega_from_field(&x)?)
            }
        };
        pullback_form(&map, &g)?.foliation
    };
    Ok(Deformed { foliation, charts: HashMap::new() })
}

/// Secant extrapolation in chart `j` from two earlier positions.
fn predict(earlier: &(f64, Vec<C>), last: &(f64, Vec<C>), j: usize, t: f64) -> Vec<C> {
    let (u0, u1) = (dehomogenize(&earlier.1, j), dehomogenize(&last.1, j));
    if last.0 == earlier.0 {
        return u1;
    }
    let h = (t - last.0) / (last.0 - earlier.0);
    u1.iter().zip(&u0).map(|(a, b)| a + (a - b) * h).collect()
}

/// `g + i·w·(g − u)`, falling back to a fixed direction when the step is
/// negligible.
fn offset(u: &[C], g: &[C], w: f64) -> Vec<C> {
    let step: Vec<C> = g.iter().zip(u).map(|(a, b)| a - b).collect();
    let len = norm(&step);
    let m = u.len() as f64;
    g.iter()
        .zip(&step)
        .enumerate()
        .map(|(k, (a, s))| {
            let dir = if len > 1e-8 { *s } else { C::new(1e-3 * (k as f64 + 1.0) / m, 0.0) };
            a + C::new(0.0, w) * dir
        })
        .collect()
}

struct Corrector<'a> {
    f0: &'a TwoDimFoliation,
    dir: &'a Perturbation,
    cfg: &'a NumericConfig,
    jet_order: usize,
    max_jump: f64,
    cache: HashMap<u64, Deformed>,
}

impl Corrector<'_> {
    fn at(&mut self, t: f64) -> Result<&mut Deformed> {
        if !self.cache.contains_key(&t.to_bits()) {
            let def = deformed(self.f0, self.dir, t)?;
            self.cache.insert(t.to_bits(), def);
        }
        Ok(self.cache.get_mut(&t.to_bits()).expect("inserted"))
    }

    /// One corrector step from `last` to parameter `t`; returns the relative
    /// residual and the new point.
    fn step(
        &mut self,
        earlier: &(f64, Vec<C>),
        last: &(f64, Vec<C>),
        t: f64,
        avoid: &[Vec<C>],
    ) -> Result<Option<(f64, Vec<C>)>> {
        let (cfg, jet_order, max_jump) = (self.cfg, self.jet_order, self.max_jump);
        let j = pivot(&last.1);
        let jets = &self.at(t)?.chart(j, jet_order)?.1;
        let base = dehomogenize(&last.1, j);
        let scale = jets.magnitude(&base).max(1.0);
        let tol = cfg.residual_tol * scale;
        let guess = predict(earlier, last, j, t);
        // real data keeps Newton on the real locus, where colliding real
        // points cannot continue as a conjugate pair
        let mut starts = vec![guess.clone(), base.clone()];
        for w in [1.0, 3.0, 10.0] {
            for sign in [1.0, -1.0] {
                starts.push(offset(&base, &guess, sign * w));
            }
        }
        for x0 in starts {
            let r = newton_map(jets, x0, cfg.max_newton_iter, tol);
            let point = normalize(&homogenize(&r.point, j));
            let collided = avoid.iter().any(|q| projective_distance(q, &point) < cfg.dedup_radius);
            if r.converged && projective_distance(&point, &last.1) <= max_jump && !collided {
                return Ok(Some((r.residual / scale, point)));
            }
        }
        Ok(None)
    }

    /// Steps from `last` to `t`, halving the step up to three times on failure.
    fn advance(
        &mut self,
        earlier: &(f64, Vec<C>),
        last: &(f64, Vec<C>),
        t: f64,
        avoid: &[Vec<C>],
    ) -> Result<Option<(f64, Vec<C>)>> {
        if let Some(hit) = self.step(earlier, last, t, avoid)? {
            return Ok(Some(hit));
        }
        'parts: for parts in [2, 4, 8] {
            let (mut e, mut l) = (earlier.clone(), last.clone());
            for k in 1..=parts {
                let tk = if k == parts { t } else { last.0 + (t - last.0) * k as f64 / parts as f64 };
                let guard: &[Vec<C>] = if k == parts { avoid } else { &[] };
                let Some((res, p)) = self.step(&e, &l, tk, guard)? else { continue 'parts };
                if k == parts {
                    return Ok(Some((res, p)));
                }
                e = std::mem::replace(&mut l, (tk, p));
            }
        }
        Ok(None)
    }
}

/// Continues every n.g.k indeterminacy point of `f0` over the grid. At each
/// parameter the corrector solves the jet system of the deformed rotational
/// from the previous position, then re-checks nilpotency and isolation.
pub fn track_deformation(
    f0: &TwoDimFoliation,
    dir: &Perturbation,
    t_grid: &[f64],
    cfg: &NumericConfig,
) -> Result<DeformationReport> {
    let prov = f0.provenance().ok_or_else(|| Error::Precondition("foliation has no pull-back provenance".into()))?;
    let model = LocalModel::new(f0)?;
    let locus = indeterminacy_locus(&prov.map, cfg)?;
    let mut starts = Vec::new();
    for p in &locus.points {
        if model.ngk(p, cfg)?.ngk {
            starts.push(p.clone());
        }
    }
    let mut jet_order = 1;
    for p in &starts {
        let j = pivot(p);
        jet_order = jet_order.max(vanishing_order(model.rotational(j), &dehomogenize(p, j), cfg.vanishing_tol)?);
    }
    // a step may not move a point by more than half the initial separation
    let mut separation = f64::INFINITY;
    for (a, p) in starts.iter().enumerate() {
        for q in &starts[a + 1..] {
            separation = separation.min(projective_distance(p, q));
        }
    }
    let max_jump = if separation.is_finite() { 0.5 * separation } else { 1.0 };
    let mut paths: Vec<PointPath> = starts
        .iter()
        .map(|p| PointPath { start: p.clone(), steps: Vec::new(), lost_at: None, type_change: false, lipschitz: 0.0 })
        .collect();
    let mut corrector = Corrector { f0, dir, cfg, jet_order, max_jump, cache: HashMap::new() };
    let mut prev_t = 0.0;
    for &t in t_grid {
        let dt = (t - prev_t).abs();
        let mut placed: Vec<Vec<C>> = Vec::new();
        for path in paths.iter_mut() {
            if path.lost_at.is_some() {
                continue;
            }
            let n = path.steps.len();
            let at = |k: usize| (path.steps[k].t, path.steps[k].point.clone());
            let last = if n > 0 { at(n - 1) } else { (0.0, path.start.clone()) };
            let earlier = if n > 1 { at(n - 2) } else if n == 1 { (0.0, path.start.clone()) } else { last.clone() };
            let Some((residual, point)) = corrector.advance(&earlier, &last, t, &placed)? else {
                path.lost_at = Some(t);
                continue;
            };
            let displacement = projective_distance(&point, &last.1);
            let jp = pivot(&point);
            let zp = &corrector.at(t)?.chart(jp, jet_order)?.0;
            let check = ngk_point_test(zp, &dehomogenize(&point, jp), cfg)?;
            if !matches!(check.status, NgkStatus::Ngk | NgkStatus::NotIsolated) {
                path.type_change = true;
            }
            if dt > 0.0 {
                path.lipschitz = path.lipschitz.max(displacement / dt);
            }
            placed.push(point.clone());
            path.steps.push(PathStep {
                t,
                residual,
                nilpotency_residual: check.nilpotency_residual,
                unique: check.shell_zeros == 0,
                displacement,
                point,
            });
        }
        corrector.cache.retain(|&k, _| f64::from_bits(k) == t);
        prev_t = t;
    }
    Ok(DeformationReport {
        lost: paths.iter().filter(|p| p.lost_at.is_some()).count(),
        type_changes: paths.iter().filter(|p| p.type_change).count(),
        paths,
        t_grid: t_grid.to_vec(),
        jet_order,
        seed: cfg.seed,
        tolerances: cfg.clone(),
    })
}

/// Distance between normalized representatives, the positional error used
/// when comparing continued points with a fresh solve.
pub fn positional_error(a: &[C], b: &[C]) -> f64 {
    distance(&normalize(a), &normalize(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::jouanolou_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn standard() -> TwoDimFoliation {
        let c: Vec<Q> = (1..=4).map(|i| Q::from(i * i)).collect();
        let f = RationalMap::diagonal_difference_scaled(4, 2, &c).unwrap();
        let g = omega_from_field(&jouanolou_field(4, 2)).unwrap();
        pullback_form(&f, &g).unwrap().foliation
    }

    fn random_map(seed: u64) -> RationalMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RationalMap::new_unchecked((0..4).map(|_| Poly::random_homogeneous(&mut rng, 5, 2, 0.6, 3)).collect()).unwrap()
    }

    #[test]
    fn jets_list_every_lower_derivative() {
        let z = VectorField::parse(&["x0^2", "x0*x1"]).unwrap();
        assert_eq!(jet_polys(&z, 1).unwrap().len(), 2);
        assert_eq!(jet_polys(&z, 2).unwrap().len(), 6);
        assert_eq!(jet_polys(&z, 3).unwrap().len(), 12);
        assert_eq!(vanishing_order(&z, &[C::new(0.0, 0.0); 2], 1e-12).unwrap(), 2);
    }

    #[test]
    fn zero_parameter_reproduces_the_start() {
        let fol = standard();
        let cfg = NumericConfig::default();
        let rep = track_deformation(&fol, &Perturbation::Map(random_map(1)), &[0.0], &cfg).unwrap();
        assert_eq!(rep.paths.len(), 16);
        assert_eq!(rep.jet_order, 2);
        for p in &rep.paths {
            assert!(positional_error(&p.steps[0].point, &p.start) < 1e-14);
        }
    }

    #[test]
    fn paths_follow_the_deformed_indeterminacy_locus() {
        let fol = standard();
        let cfg = NumericConfig::default();
        let g = random_map(7);
        let grid = [0.01, 0.02, 0.03, 0.04, 0.05];
        let rep = track_deformation(&fol, &Perturbation::Map(g.clone()), &grid, &cfg).unwrap();
        assert_eq!((rep.lost, rep.type_changes), (0, 0));
        let ft = fol.provenance().unwrap().map.try_add(&g.scale(&exact_parameter(0.05))).unwrap();
        let fresh = indeterminacy_locus(&ft, &cfg).unwrap();
        assert_eq!(fresh.found, 16);
        for p in &rep.paths {
            let end = &p.steps.last().unwrap().point;
            let err = fresh.points.iter().map(|q| positional_error(q, end)).fold(f64::INFINITY, f64::min);
            assert!(err < 1e-8, "{err:e}");
            assert!(p.steps.iter().all(|s| s.unique));
        }
    }

    #[test]
    fn large_parameter_loses_paths() {
        let fol = standard();
        let rep = track_deformation(&fol, &Perturbation::Map(random_map(2)), &[10.0], &NumericConfig::default()).unwrap();
        assert!(rep.lost > 0);
    }

    #[test]
    fn empty_grid_is_an_empty_report() {
        let rep = track_deformation(&standard(), &Perturbation::Map(random_map(1)), &[], &NumericConfig::default()).unwrap();
        assert!(rep.paths.iter().all(|p| p.steps.is_empty()) && rep.lost == 0);
    }
}
