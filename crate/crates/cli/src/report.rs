use foliakit::numeric::NumericConfig;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    Inconclusive,
    /// Reported for information; never affects the overall verdict.
    Evidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The condition being checked, stated in words.
    pub anchor: String,
    pub mandatory: bool,
    pub verdict: CheckVerdict,
    pub details: Value,
}

impl Check {
    pub fn new(name: &str, anchor: &str, verdict: CheckVerdict, details: Value) -> Self {
        Check { name: name.into(), anchor: anchor.into(), mandatory: verdict != CheckVerdict::Evidence, verdict, details }
    }

    pub fn pass_fail(name: &str, anchor: &str, pass: bool, details: Value) -> Self {
        Check::new(name, anchor, if pass { CheckVerdict::Pass } else { CheckVerdict::Fail }, details)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportBody {
    pub pipeline: String,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
    pub verdict: CheckVerdict,
    pub seed: u64,
    pub tolerances: NumericConfig,
    pub version: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    #[serde(flatten)]
    pub body: ReportBody,
    /// SHA-256 of the canonical JSON of every other field.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Digest of the canonical serialization, so formatting of the source file
/// does not matter.
pub fn digest_of<T: Serialize>(name: &str, value: &T) -> InputDigest {
    let canonical = serde_json::to_vec(value).expect("serializable");
    InputDigest { name: name.into(), sha256: sha256_hex(&canonical) }
}

/// Conjunction over mandatory checks; any inconclusive check without a
/// failure makes the whole report inconclusive.
pub fn overall(checks: &[Check]) -> CheckVerdict {
    let mandatory = checks.iter().filter(|c| c.mandatory);
    let mut out = CheckVerdict::Pass;
    for c in mandatory {
        match c.verdict {
            CheckVerdict::Fail => return CheckVerdict::Fail,
            CheckVerdict::Inconclusive => out = CheckVerdict::Inconclusive,
            _ => {}
        }
    }
    out
}

impl PipelineReport {
    pub fn new(pipeline: &str, inputs: Vec<InputDigest>, checks: Vec<Check>, cfg: &NumericConfig) -> Self {
        let body = ReportBody {
            pipeline: pipeline.into(),
            inputs,
            verdict: overall(&checks),
            checks,
            seed: cfg.seed,
            tolerances: cfg.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
        };
        let digest = sha256_hex(&serde_json::to_vec(&body).expect("serializable"));
        PipelineReport { body, digest }
    }
}
