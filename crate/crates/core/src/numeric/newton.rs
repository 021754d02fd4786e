//! Newton iteration for square and overdetermined complex systems, and the
//! projective bookkeeping shared by the point solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::cpoly::NumMap;

type C = Complex64;

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub point: Vec<C>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Newton (Gauss–Newton for tall systems) with least-squares steps and
/// backtracking. `system` returns the residual vector and its Jacobian.
pub fn newton(
    system: impl Fn(&[C]) -> (DVector<C>, DMatrix<C>),
    x0: Vec<C>,
    max_iter: usize,
    tol: f64,
) -> NewtonResult {
    let mut x = x0;
    let (mut r, mut jac) = system(&x);
    let mut rn = r.norm();
    let mut it = 0;
    let mut polish = 0;
    while it < max_iter {
        if rn <= tol {
            // two extra steps push the residual to the rounding floor
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        it += 1;
        let Ok(step) = jac.clone().svd(true, true).solve(&r, 1e-14) else { break };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let cand: Vec<C> = x.iter().zip(step.iter()).map(|(a, s)| a - s * t).collect();
            let (rc, jc) = system(&cand);
            let rcn = rc.norm();
            if rcn.is_finite() && (rcn < rn || (rn <= tol && rcn <= tol)) {
                x = cand;
                r = rc;
                jac = jc;
                rn = rcn;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved || x.iter().any(|c| !c.is_finite() || c.norm() > 1e12) {
            break;
        }
    }
    NewtonResult { converged: rn <= tol, point: x, residual: rn, iterations: it }
}

/// Newton on the zero set of a polynomial map.
pub fn newton_map(map: &NumMap, x0: Vec<C>, max_iter: usize, tol: f64) -> NewtonResult {
    newton(|x| (map.eval(x), map.jacobian(x)), x0, max_iter, tol)
}

/// A complex point drawn uniformly from the polydisc of the given radius.
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<C> {
    (0..dim)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
    let v = random_point(rng, dim, 1.0);
    let n = norm(&v);
    v.into_iter().map(|c| c / n).collect()
}

pub fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn distance(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Index of the coordinate of largest modulus, preferring the first among
/// near-ties so that equivalent representatives pick the same chart.
pub fn pivot(p: &[C]) -> usize {
    let max = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    p.iter().position(|c| c.norm() >= max * (1.0 - 1e-9)).unwrap_or(0)
}

/// Representative with the pivot coordinate equal to one.
pub fn normalize(p: &[C]) -> Vec<C> {
    let s = p[pivot(p)];
    p.iter().map(|c| c / s).collect()
}

/// Affine coordinates in chart `j` (coordinate `j` dropped after scaling it to one).
pub fn dehomogenize(p: &[C], j: usize) -> Vec<C> {
    let s = p[j];
    p.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, c)| c / s).collect()
}

/// Inverse of [`dehomogenize`].
pub fn homogenize(u: &[C], j: usize) -> Vec<C> {
    let mut p = u.to_vec();
    p.insert(j, C::new(1.0, 0.0));
    p
}

/// Chordal distance between the lines spanned by `a` and `b`.
pub fn projective_distance(a: &[C], b: &[C]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let inner: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let c = inner.norm() / (na * nb);
    (1.0 - c * c).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Poly;
    use rand::SeedableRng;

    #[test]
    fn newton_finds_a_simple_root() {
        let map = NumMap::new(&[Poly::parse(2, "x0^2 + x1^2 - 5").unwrap(), Poly::parse(2, "x0 - x1 + 1").unwrap()]);
        let r = newton_map(&map, vec![C::new(0.9, 0.1), C::new(2.2, 0.0)], 50, 1e-12);
        assert!(r.converged);
        assert!((r.point[0] - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r.point[1] - C::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projective_distance_ignores_scaling() {
        let a = vec![C::new(1.0, 0.0), C::new(2.0, -1.0), C::new(0.0, 3.0)];
        let s = C::new(-0.3, 2.0);
        let b: Vec<C> = a.iter().map(|c| c * s).collect();
        assert!(projective_distance(&a, &b) < 1e-7);
        assert!(projective_distance(&a, &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]) > 0.5);
        assert_eq!(normalize(&b)[pivot(&b)], C::new(1.0, 0.0));
    }

    #[test]
    fn random_points_stay_in_the_polydisc() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert!(random_point(&mut rng, 3, 2.0).iter().all(|c| c.norm() <= 2.0));
        }
        assert!((norm(&random_unit_vector(&mut rng, 4)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chart_coordinates_round_trip() {
        let p = vec![C::new(2.0, 0.0), C::new(0.0, 1.0), C::new(4.0, 0.0)];
        let u = dehomogenize(&p, 2);
        assert_eq!(u, vec![C::new(0.5, 0.0), C::new(0.0, 0.25)]);
        assert!(projective_distance(&homogenize(&u, 2), &p) < 1e-15);
    }
}
