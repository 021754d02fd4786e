#![allow(dead_code)]

use foliakit::exterior::index_tuples;
use foliakit::{KForm, Poly, VectorField, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn poly(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Poly {
    Poly::random_homogeneous(rng, n, deg, 0.5, 3)
}

/// A `k`-form on `C^n` whose coefficients are homogeneous of degree `m`.
pub fn form(rng: &mut ChaCha8Rng, n: usize, k: usize, m: u32) -> KForm {
    let mut comps: Vec<(Vec<usize>, Poly)> = Vec::new();
    for idx in index_tuples(n, k) {
        if rng.gen_bool(0.6) {
            comps.push((idx, poly(rng, n, m)));
        }
    }
    KForm::from_components(n, k, comps).unwrap()
}

pub fn field(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> VectorField {
    VectorField::new((0..n).map(|_| poly(rng, n, deg)).collect()).unwrap()
}

/// `L_X` from its action on generators: `X(f)` on functions and `dX_i` on `dx_i`,
/// extended as a derivation of the wedge product.
pub fn lie_derivative_by_generators(a: &KForm, x: &VectorField) -> KForm {
    let n = a.nvars();
    let mut out = KForm::zero(n, a.degree());
    for (idx, f) in a.components() {
        let mut basis = KForm::function(&Poly::one(n));
        for &i in idx {
            basis = basis.wedge(&KForm::basis(n, &[i]).unwrap()).unwrap();
        }
        out = out.try_add(&basis.mul_poly(&x.apply(f).unwrap()).unwrap()).unwrap();
        for r in 0..idx.len() {
            let mut term = KForm::function(f);
            for (s, &i) in idx.iter().enumerate() {
                let factor = if s == r {
                    KForm::differential(&x.components()[i])
                } else {
                    KForm::basis(n, &[i]).unwrap()
                };
                term = term.wedge(&factor).unwrap();
            }
            out = out.try_add(&term).unwrap();
        }
    }
    out
}

pub fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        Q::from(-1)
    }
}
