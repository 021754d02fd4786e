//! Affine charts of projective space: dehomogenized vector fields and forms.

use crate::error::{Error, Result};
use crate::exterior::{KForm, VectorField};
use crate::foliation::{rotational, OneDimFoliation};
use crate::rational::Q;
use crate::ring::Poly;

/// The local vector field of a foliation by curves in the chart `x_j = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartField {
    pub chart: usize,
    pub field: VectorField,
}

/// `z ↦ (u_0, …, 1, …, u_{m−2})` with the one in slot `j`, as polynomials
/// in the `m − 1` chart variables.
pub fn chart_embedding(m: usize, j: usize) -> Result<Vec<Poly>> {
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, len: m });
    }
    Ok((0..m)
        .map(|i| match i.cmp(&j) {
            std::cmp::Ordering::Less => Poly::var(m - 1, i),
            std::cmp::Ordering::Equal => Poly::one(m - 1),
            std::cmp::Ordering::Greater => Poly::var(m - 1, i - 1),
        })
        .collect())
}

/// Components `(P_i − x_i P_j)|_{x_j = 1}` for `i ≠ j`.
pub fn chart_field(g: &OneDimFoliation, j: usize) -> Result<ChartField> {
    chart_field_of(g.field(), j)
}

/// [`chart_field`] for a bare homogeneous field.
pub fn chart_field_of(x: &VectorField, j: usize) -> Result<ChartField> {
    let n = x.nvars();
    let emb = chart_embedding(n, j)?;
    let ps = x.components();
    let pj = ps[j].compose(&emb)?;
    let mut comps = Vec::with_capacity(n - 1);
    for (i, p) in ps.iter().enumerate() {
        if i == j {
            continue;
        }
        comps.push(p.compose(&emb)?.try_sub(&emb[i].try_mul(&pj)?)?);
    }
    Ok(ChartField { chart: j, field: VectorField::new(comps)? })
}

/// Restriction of a form on `C^m` to the chart `z_j = 1`.
pub fn chart_form(eta: &KForm, j: usize) -> Result<KForm> {
    eta.pullback(&chart_embedding(eta.nvars(), j)?)
}

/// The rotational of the chart restriction: `d(η|) = i_Z dvol` on `C^{m−1}`.
pub fn chart_rotational(eta: &KForm, j: usize) -> Result<VectorField> {
    rotational(&chart_form(eta, j)?)
}

/// Exact chart coordinates of a rational projective point.
pub fn dehomogenize_exact(p: &[Q], j: usize) -> Option<Vec<Q>> {
    let s = p.get(j)?;
    if s.is_zero() {
        return None;
    }
    Some(p.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, c)| c / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::omega_from_field;
    use crate::graded::jouanolou_field;

    fn field(src: &[&str]) -> OneDimFoliation {
        omega_from_field(&VectorField::parse(src).unwrap()).unwrap()
    }

    #[test]
    fn jouanolou_in_the_last_chart() {
        let g = omega_from_field(&jouanolou_field(3, 2)).unwrap();
        let c = chart_field(&g, 2).unwrap();
        assert_eq!(c.field, VectorField::parse(&["x1^2 - x0^3", "1 - x1*x0^2"]).unwrap());
    }

    #[test]
    fn diagonal_field_in_charts() {
        let g = field(&["x0", "2*x1", "5*x2"]);
        let c = chart_field(&g, 1).unwrap();
        assert_eq!(c.field, VectorField::parse(&["-x0", "3*x1"]).unwrap());
        let c = chart_field(&g, 0).unwrap();
        assert_eq!(c.field, VectorField::parse(&["x0", "4*x1"]).unwrap());
        assert!(chart_field(&g, 3).is_err());
    }

    #[test]
    fn radial_multiple_projects_to_zero() {
        let x = VectorField::parse(&["x0^2 + x0*x1", "x0*x1 + x1^2", "x0*x2 + x1*x2"]).unwrap();
        for j in 0..3 {
            assert!(chart_field_of(&x, j).unwrap().field.is_zero());
        }
    }

    #[test]
    fn chart_form_drops_the_chart_differential() {
        let eta = KForm::basis(3, &[2]).unwrap().mul_poly(&Poly::var(3, 0)).unwrap();
        assert!(chart_form(&eta, 2).unwrap().is_zero());
        let c = chart_form(&eta, 0).unwrap();
        assert_eq!(c, KForm::basis(2, &[1]).unwrap());
    }
}
