use std::fs;
use std::path::Path;

use foliakit::foliation::{
    bounded_invariant_hypersurface_scan, decomposability_check, foliation_degree, integrability_check, omega_from_field,
    pullback_form, radial_contraction_check, OneDimFoliation, RationalMap, ScanConfig, TwoDimFoliation,
};
use foliakit::graded::{divfree_basis, eigen_level, jouanolou_field, kernel_test_at_level, resonance_scan, sigma_basis, WeightVector};
use foliakit::numeric::{
    chart_field, classify_hyperbolic, generic_pair_check, genericity_check, indeterminacy_locus, sample_fiber,
    solve_singularities, track_deformation, Classification, LocalModel, NgkStatus, NumericConfig, Perturbation, Verdict,
};
use foliakit::ring::coprimality_check;
use foliakit::{Error as CoreError, KForm, VectorField, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Build, DeformArgs, SigmaArgs, Solve, Verify};
use crate::report::{digest_of, Check, CheckVerdict, InputDigest, PipelineReport};

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// A check or construction failed (exit 1).
    Failed(String),
    /// Bad parameters or unreadable input (exit 2).
    Usage(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Failed(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Failed(m) | Failure::Usage(m) => m,
        }
    }
}

/// Invalid shapes and degrees are usage errors; everything else is a failed construction.
fn core(e: CoreError) -> Failure {
    match e {
        CoreError::Degenerate(_) | CoreError::ZeroPolynomial | CoreError::DivisionByZero => Failure::Failed(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

/// A JSON document plus the exit code it should produce.
pub struct Outcome {
    pub document: Value,
    pub code: i32,
}

fn ok<T: Serialize>(v: &T) -> Result<Outcome, Failure> {
    Ok(Outcome { document: serde_json::to_value(v).expect("serializable"), code: 0 })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A one-dimensional foliation given either as a bundle or as a bare field.
fn read_one_dim(path: &Path) -> Result<OneDimFoliation, Failure> {
    let v: Value = read_json(path)?;
    let field: VectorField = if v.get("field").is_some() {
        serde_json::from_value(v["field"].clone())
    } else {
        serde_json::from_value(v)
    }
    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    omega_from_field(&field).map_err(core)
}

fn read_bundle(path: &Path) -> Result<TwoDimFoliation, Failure> {
    read_json(path)
}

pub fn build(cmd: &Build) -> Result<Outcome, Failure> {
    match cmd {
        Build::Jouanolou { n, d } => {
            if *n < 2 || *d < 1 {
                return Err(Failure::Usage("jouanolou needs n >= 2 and d >= 1".into()));
            }
            ok(&jouanolou_field(*n, *d))
        }
        Build::Omega { field } => {
            let x: VectorField = read_json(field)?;
            ok(&omega_from_field(&x).map_err(core)?)
        }
        Build::Pullback { map, fol } => {
            let f: RationalMap = read_json(map)?;
            let g = read_one_dim(fol)?;
            ok(&pullback_form(&f, &g).map_err(core)?.foliation)
        }
        Build::Map { diagonal_difference, linear_projection, n, nu, coefficients } => {
            if *n < 1 {
                return Err(Failure::Usage("n must be positive".into()));
            }
            if *linear_projection {
                return ok(&RationalMap::linear_projection(*n).map_err(core)?);
            }
            if !diagonal_difference {
                return Err(Failure::Usage("choose --diagonal-difference or --linear-projection".into()));
            }
            if *nu < 1 {
                return Err(Failure::Usage("nu must be positive".into()));
            }
            let c: Vec<Q> = match coefficients {
                Some(cs) => cs
                    .iter()
                    .map(|s| s.trim().parse::<Q>().map_err(|_| Failure::Usage(format!("bad coefficient {s:?}"))))
                    .collect::<Result<_, _>>()?,
                None => vec![Q::one(); *n],
            };
            ok(&RationalMap::diagonal_difference_scaled(*n, *nu, &c).map_err(core)?)
        }
    }
}

fn map_checks(f: &RationalMap, cfg: &NumericConfig) -> Result<Vec<Check>, Failure> {
    let cop = coprimality_check(f.components(), 8, cfg.seed).map_err(core)?;
    let set = indeterminacy_locus(f, cfg).map_err(core)?;
    let gen = genericity_check(f, &set, cfg);
    Ok(vec![
        Check::pass_fail(
            "coprimality",
            "the components share no common factor",
            cop.coprime,
            serde_json::to_value(&cop).expect("serializable"),
        ),
        Check::pass_fail(
            "indeterminacy-count",
            "the indeterminacy locus consists of nu^n distinct points",
            gen.count_matches,
            json!({ "expected": set.expected, "found": set.found, "method": set.method, "points": set.points }),
        ),
        Check::pass_fail(
            "transversality",
            "dF_0 ^ ... ^ dF_{n-1} does not vanish at any indeterminacy point",
            gen.generic,
            json!({ "per_point": gen.per_point, "singular_value_ratios": gen.singular_value_ratios }),
        ),
    ])
}

pub fn verify(cmd: &Verify, cfg: &NumericConfig) -> Result<Outcome, Failure> {
    let report = match cmd {
        Verify::Foliation { input } => {
            let v: Value = read_json(input)?;
            let form_value = if v.get("form").is_some() { v["form"].clone() } else { v };
            let eta: KForm =
                serde_json::from_value(form_value).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            PipelineReport::new("foliation", vec![digest_of("form", &eta)], foliation_checks(&eta), cfg)
        }
        Verify::GenericMap { map } => {
            let f: RationalMap = read_json(map)?;
            PipelineReport::new("generic-map", vec![digest_of("map", &f)], map_checks(&f, cfg)?, cfg)
        }
        Verify::GenericPair { map, fol } => {
            let f: RationalMap = read_json(map)?;
            let g = read_one_dim(fol)?;
            let mut checks = map_checks(&f, cfg)?;
            let pair = generic_pair_check(&f, &g, cfg).map_err(core)?;
            let verdict = match pair.verdict {
                Verdict::Pass => CheckVerdict::Pass,
                Verdict::Fail => CheckVerdict::Fail,
                Verdict::Inconclusive => CheckVerdict::Inconclusive,
            };
            checks.push(Check::new(
                "critical-values",
                "no singularity of the target foliation is a critical value of the map",
                verdict,
                serde_json::to_value(&pair).expect("serializable"),
            ));
            PipelineReport::new("generic-pair", vec![digest_of("map", &f), digest_of("foliation", &g)], checks, cfg)
        }
        Verify::StabilityHypotheses { input, p4_degree, fiber_points } => {
            let fol = read_bundle(input)?;
            let checks = stability_checks(&fol, *p4_degree, *fiber_points, cfg)?;
            PipelineReport::new("stability-hypotheses", vec![digest_of("foliation", &fol)], checks, cfg)
        }
    };
    let code = match report.body.verdict {
        CheckVerdict::Pass | CheckVerdict::Evidence => 0,
        CheckVerdict::Fail => 1,
        CheckVerdict::Inconclusive => 3,
    };
    Ok(Outcome { document: serde_json::to_value(&report).expect("serializable"), code })
}

fn foliation_checks(eta: &KForm) -> Vec<Check> {
    let radial = radial_contraction_check(eta);
    let coeff = eta.coefficient_degree();
    let homogeneous = matches!(coeff, Ok(Some(_)));
    let decomposable = decomposability_check(eta);
    let integrable = integrability_check(eta);
    let degree = foliation_degree(eta);
    vec![
        Check::pass_fail("radial-contraction", "i_R eta = 0, so the form descends to projective space", radial, json!(null)),
        Check::pass_fail(
            "homogeneity",
            "all coefficients are homogeneous of one degree",
            homogeneous,
            json!({ "coefficient_degree": coeff.ok().flatten() }),
        ),
        Check::pass_fail(
            "decomposability",
            "the dual multivector is decomposable (P ^ P = 0, Pluecker relations)",
            decomposable,
            json!(null),
        ),
        Check::pass_fail(
            "integrability",
            "(i_{d_I} eta) ^ d eta = 0 for every constant multi-index I",
            matches!(integrable, Ok(true)),
            json!({ "error": integrable.err().map(|e| e.to_string()) }),
        ),
        Check::pass_fail(
            "degree",
            "the foliation degree is the coefficient degree minus one",
            degree.is_ok(),
            json!({ "degree": degree.as_ref().ok(), "error": degree.as_ref().err().map(|e| e.to_string()) }),
        ),
    ]
}

fn stability_checks(fol: &TwoDimFoliation, p4_degree: u32, fiber_points: usize, cfg: &NumericConfig) -> Result<Vec<Check>, Failure> {
    let prov = fol.provenance().ok_or_else(|| Failure::Usage("the bundle has no pull-back provenance".into()))?;
    let model = LocalModel::new(fol).map_err(core)?;

    let locus = indeterminacy_locus(&prov.map, cfg).map_err(core)?;
    let mut ngk = Vec::new();
    for p in &locus.points {
        ngk.push(model.ngk(p, cfg).map_err(core)?);
    }
    let all_ngk = locus.found as u64 == locus.expected && ngk.iter().all(|v| v.ngk && v.type_tag.is_some());
    let unresolved = ngk.iter().any(|v| v.status == NgkStatus::Unresolved);
    let p1 = if all_ngk {
        CheckVerdict::Pass
    } else if unresolved {
        CheckVerdict::Inconclusive
    } else {
        CheckVerdict::Fail
    };

    let sing = solve_singularities(&prov.foliation, cfg).map_err(core)?;
    let mut classified = Vec::new();
    for rec in &sing.points {
        let cf = chart_field(&prov.foliation, rec.chart).map_err(core)?;
        classified.push(classify_hyperbolic(rec, &cf, cfg).map_err(core)?);
    }
    let (p2, fiber_detail) = match sing.points.first() {
        None => (CheckVerdict::Inconclusive, json!({ "reason": "no singularity of the target foliation found" })),
        Some(q) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pts = sample_fiber(&prov.map, &q.point, fiber_points, cfg, &mut rng);
            let mut verdicts = Vec::new();
            for p in &pts {
                verdicts.push(model.kupka(p, cfg).map_err(core)?);
            }
            let pass = pts.len() == fiber_points && verdicts.iter().all(|v| v.kupka);
            let v = if pass {
                CheckVerdict::Pass
            } else if pts.len() < fiber_points {
                CheckVerdict::Inconclusive
            } else {
                CheckVerdict::Fail
            };
            (v, json!({ "singularity": q.point, "points": pts, "verdicts": verdicts }))
        }
    };
    let classes: Vec<_> = classified.iter().map(|r| r.classification).collect();
    let p3 = if classes.iter().all(|c| *c == Some(Classification::Hyperbolic)) && !classes.is_empty() {
        CheckVerdict::Pass
    } else if classes.iter().any(|c| matches!(c, Some(Classification::Unresolved) | None)) {
        CheckVerdict::Inconclusive
    } else {
        CheckVerdict::Fail
    };

    let scan_cfg = ScanConfig { max_degree: p4_degree.max(1), seed: cfg.seed, ..ScanConfig::default() };
    let scan = bounded_invariant_hypersurface_scan(fol.form(), &scan_cfg).map_err(core)?;
    let summary = if scan.found.is_empty() {
        format!("no invariant hypersurface up to degree {}", scan_cfg.max_degree)
    } else {
        format!("{} invariant hypersurface(s) found", scan.found.len())
    };

    Ok(vec![
        Check::new(
            "ngk-indeterminacy",
            "every indeterminacy point is an isolated zero of the rotational with nilpotent linear part, with a type",
            p1,
            json!({ "expected": locus.expected, "found": locus.found, "verdicts": ngk }),
        ),
        Check::new("kupka-fiber", "the rotational does not vanish along a fiber over a target singularity", p2, fiber_detail),
        Check::new(
            "nonreal-index",
            "every ratio of eigenvalues at each target singularity is non-real",
            p3,
            json!({ "points": classified }),
        ),
        Check::new(
            "invariant-hypersurfaces",
            "no invariant hypersurface up to the scanned degree (evidence only)",
            CheckVerdict::Evidence,
            json!({ "summary": summary, "scan": scan }),
        ),
    ])
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Failure::Usage(format!("bad t-grid {spec:?}"));
    if spec.contains(':') {
        let parts: Vec<f64> = spec.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let [a, b, h] = parts[..] else { return Err(bad()) };
        if !(h > 0.0) || b < a {
            return Err(bad());
        }
        let steps = ((b - a) / h + 1e-9).floor() as usize;
        return Ok((0..=steps).map(|k| a + h * k as f64).collect());
    }
    spec.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect()
}

pub fn deform(args: &DeformArgs, cfg: &NumericConfig) -> Result<Outcome, Failure> {
    let fol = read_bundle(&args.foliation)?;
    let prov = fol.provenance().ok_or_else(|| Failure::Usage("the bundle has no pull-back provenance".into()))?;
    let v: Value = read_json(&args.perturb)?;
    let comps = v.get("components").and_then(Value::as_array).map_or(0, Vec::len);
    let nvars = v.get("nvars").and_then(Value::as_u64).unwrap_or(0) as usize;
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", args.perturb.display()));
    let (dir, digest) = if nvars == prov.map.source_dim() + 1 && comps == prov.map.source_dim() {
        let g: RationalMap = serde_json::from_value(v).map_err(bad)?;
        (Perturbation::Map(g.clone()), digest_of("perturbation", &g))
    } else if nvars == prov.foliation.nvars() && comps == nvars {
        let h: VectorField = serde_json::from_value(v).map_err(bad)?;
        (Perturbation::Field(h.clone()), digest_of("perturbation", &h))
    } else {
        return Err(Failure::Usage("perturbation matches neither the map nor the field".into()));
    };
    let grid = parse_grid(&args.t_grid)?;
    let report = track_deformation(&fol, &dir, &grid, cfg).map_err(core)?;
    let code = if report.lost > 0 {
        3
    } else if report.type_changes > 0 {
        1
    } else {
        0
    };
    let document = json!({
        "pipeline": "deform",
        "inputs": [digest_of("foliation", &fol), digest],
        "report": report,
        "version": env!("CARGO_PKG_VERSION"),
    });
    Ok(Outcome { document, code })
}

pub fn sigma(args: &SigmaArgs) -> Result<Outcome, Failure> {
    let s = WeightVector::new(args.weights.clone()).map_err(core)?;
    let field: Option<VectorField> = args.field.as_deref().map(read_json).transpose()?;
    let level = match (args.level, &field) {
        (Some(l), _) => Some(l),
        (None, Some(x)) => Some(eigen_level(x, &s).map_err(|e| Failure::Usage(e.to_string()))?),
        (None, None) => None,
    };
    let mut doc = json!({ "weights": args.weights, "level": level, "resonances": resonance_scan(&s) });
    if let Some(l) = level {
        let space = sigma_basis(&s, l, args.degree_cap).map_err(core)?;
        let divfree = divfree_basis(&space);
        doc["dim"] = json!(space.dim());
        doc["divergence_free_dim"] = json!(divfree.dim());
        doc["basis"] = json!(space.basis);
    }
    if let (Some(x), Some(l)) = (&field, level) {
        let k = kernel_test_at_level(x, &s, l).map_err(|e| Failure::Usage(e.to_string()))?;
        doc["kernel"] = serde_json::to_value(&k).expect("serializable");
        doc["input"] = serde_json::to_value(digest_of("field", x)).expect("serializable");
    }
    Ok(Outcome { document: doc, code: 0 })
}

pub fn solve(cmd: &Solve, cfg: &NumericConfig) -> Result<Outcome, Failure> {
    match cmd {
        Solve::Singularities { fol } => {
            let g = read_one_dim(fol)?;
            let mut rep = solve_singularities(&g, cfg).map_err(core)?;
            for rec in rep.points.iter_mut() {
                let cf = chart_field(&g, rec.chart).map_err(core)?;
                *rec = classify_hyperbolic(rec, &cf, cfg).map_err(core)?;
            }
            let code = if rep.found as u64 == rep.expected { 0 } else { 3 };
            let inputs: Vec<InputDigest> = vec![digest_of("foliation", &g)];
            Ok(Outcome { document: json!({ "inputs": inputs, "report": rep }), code })
        }
        Solve::Indeterminacy { map } => {
            let f: RationalMap = read_json(map)?;
            let set = indeterminacy_locus(&f, cfg).map_err(core)?;
            let gen = genericity_check(&f, &set, cfg);
            let code = if set.found as u64 == set.expected { 0 } else { 3 };
            Ok(Outcome { document: json!({ "inputs": [digest_of("map", &f)], "locus": set, "genericity": gen }), code })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_grid("0:0.05:0.01").unwrap().len(), 6);
        assert_eq!(parse_grid("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn shape_errors_are_usage_errors() {
        assert_eq!(core(CoreError::NotHomogeneous).code(), 2);
        assert_eq!(core(CoreError::Degenerate("x".into())).code(), 1);
    }
}
