//! JSON encodings shared by every front end.
//!
//! * `Poly`: `{"nvars": n, "terms": [{"c": "p/q", "e": [e0, …]}]}` in canonical order.
//! * forms and multivectors: `{"nvars", "degree", "components": [{"idx", "poly"}]}`.
//! * vector fields and rational maps: `{"nvars", "components": [<Poly>]}`.
//! * foliations by curves: `{"field": <VectorField>, "degree": d}`.
//! * foliations by surfaces: `{"form", "degree", "provenance": {"map", "field", "d", "nu"} | null}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exterior::{Alt, VectorField};
use crate::foliation::{omega_from_field, OneDimFoliation, Provenance, RationalMap, TwoDimFoliation};
use crate::rational::Q;
use crate::ring::{Monomial, Poly};

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: String,
    e: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            nvars: self.nvars(),
            terms: self.terms().iter().map(|(m, c)| TermJson { c: c.to_string(), e: m.exps().to_vec() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            if t.e.len() != j.nvars {
                return Err(D::Error::custom(format!("exponent vector of length {} in {} variables", t.e.len(), j.nvars)));
            }
            let c: Q = t.c.parse().map_err(|e| D::Error::custom(format!("coefficient {:?}: {e}", t.c)))?;
            terms.push((Monomial::new(&t.e), c));
        }
        Ok(Poly::from_terms(j.nvars, terms))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.exps().serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    idx: Vec<usize>,
    poly: Poly,
}

#[derive(Serialize, Deserialize)]
struct AltJson {
    nvars: usize,
    degree: usize,
    components: Vec<ComponentJson>,
}

impl<K> Serialize for Alt<K> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AltJson {
            nvars: self.nvars(),
            degree: self.degree(),
            components: self.components().map(|(i, p)| ComponentJson { idx: i.clone(), poly: p.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de, K> Deserialize<'de> for Alt<K> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = AltJson::deserialize(d)?;
        Alt::from_components(j.nvars, j.degree, j.components.into_iter().map(|c| (c.idx, c.poly)))
            .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentsJson {
    nvars: usize,
    components: Vec<Poly>,
}

impl Serialize for VectorField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ComponentsJson { nvars: self.nvars(), components: self.components().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ComponentsJson::deserialize(d)?;
        if j.components.len() != j.nvars {
            return Err(D::Error::custom(format!("{} components in {} variables", j.components.len(), j.nvars)));
        }
        VectorField::new(j.components).map_err(D::Error::custom)
    }
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ComponentsJson { nvars: self.source_dim() + 1, components: self.components().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ComponentsJson::deserialize(d)?;
        if j.components.len() + 1 != j.nvars {
            return Err(D::Error::custom(format!("{} components in {} variables", j.components.len(), j.nvars)));
        }
        RationalMap::new(j.components).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct OneDimJson {
    field: VectorField,
    #[serde(default)]
    degree: Option<u32>,
}

impl Serialize for OneDimFoliation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OneDimJson { field: self.field().clone(), degree: Some(self.degree()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OneDimFoliation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = OneDimJson::deserialize(d)?;
        omega_from_field(&j.field).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ProvenanceJson {
    map: RationalMap,
    field: VectorField,
    d: u32,
    nu: u32,
}

#[derive(Serialize, Deserialize)]
struct BundleJson {
    form: Alt<crate::exterior::Form>,
    #[serde(default)]
    degree: Option<i64>,
    #[serde(default)]
    provenance: Option<ProvenanceJson>,
}

impl Serialize for TwoDimFoliation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BundleJson {
            form: self.form().clone(),
            degree: Some(self.degree()),
            provenance: self.provenance().map(|p| ProvenanceJson {
                map: p.map.clone(),
                field: p.foliation.field().clone(),
                d: p.foliation.degree(),
                nu: p.map.degree(),
            }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwoDimFoliation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = BundleJson::deserialize(d)?;
        let mut f = TwoDimFoliation::from_form(j.form).map_err(D::Error::custom)?;
        if let Some(deg) = j.degree {
            if deg != f.degree() {
                return Err(D::Error::custom(format!("recorded degree {deg} but the form has degree {}", f.degree())));
            }
        }
        if let Some(p) = j.provenance {
            let foliation = omega_from_field(&p.field).map_err(D::Error::custom)?;
            if foliation.degree() != p.d || p.map.degree() != p.nu {
                return Err(D::Error::custom("provenance degrees do not match the map and field"));
            }
            f = f.with_provenance(Provenance { map: p.map, foliation });
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::KForm;
    use crate::foliation::pullback_form;
    use crate::graded::jouanolou_field;

    fn round_trip<T: Serialize + for<'de> Deserialize<'de> + PartialEq + std::fmt::Debug>(v: &T) {
        let s = serde_json::to_string(v).unwrap();
        let back: T = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, v);
    }

    #[test]
    fn poly_encoding_is_exact() {
        let p = Poly::parse(3, "x0^2 - 1/3*x1*x2 + 7").unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["nvars"], 3);
        assert_eq!(v["terms"][0]["c"], "1");
        assert_eq!(v["terms"][0]["e"], serde_json::json!([2, 0, 0]));
        assert_eq!(v["terms"][1]["c"], "-1/3");
        round_trip(&p);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(serde_json::from_str::<Poly>(r#"{"nvars":2,"terms":[{"c":"1","e":[1]}]}"#).is_err());
        assert!(serde_json::from_str::<Poly>(r#"{"nvars":1,"terms":[{"c":"0.5","e":[1]}]}"#).is_err());
        assert!(serde_json::from_str::<KForm>(
            r#"{"nvars":2,"degree":2,"components":[{"idx":[1,0],"poly":{"nvars":2,"terms":[]}}]}"#
        )
        .is_err());
    }

    #[test]
    fn objects_round_trip() {
        let x = jouanolou_field(4, 2);
        round_trip(&x);
        let g = omega_from_field(&x).unwrap();
        round_trip(&g);
        round_trip(g.form());
        let f = RationalMap::diagonal_difference(4, 2).unwrap();
        round_trip(&f);
        let bundle = pullback_form(&f, &g).unwrap().foliation;
        round_trip(&bundle);
        let v = serde_json::to_value(&bundle).unwrap();
        assert_eq!(v["degree"], 7);
        assert_eq!(v["provenance"]["nu"], 2);
    }
}
