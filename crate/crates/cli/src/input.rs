use std::path::Path;
use std::sync::Arc;

use isotropy_core::cocycle::TwoCocycle;
use isotropy_core::iyb::OneCocycle;
use isotropy_core::spec::{build_cocycle, build_group, build_one_cocycle, cocycle_shorthand, group_shorthand};
use isotropy_core::{FiniteGroup, Limits};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    File,
    Shorthand,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub role: String,
    pub source: String,
    pub kind: SourceKind,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of an input as it currently stands on disk (or of the shorthand text).
pub fn current_digest(rec: &InputRecord) -> Result<String, CliError> {
    match rec.kind {
        SourceKind::Shorthand => Ok(sha256_hex(rec.source.as_bytes())),
        SourceKind::File => {
            let bytes = std::fs::read(&rec.source).map_err(|e| CliError::io(&rec.source, e))?;
            Ok(sha256_hex(&bytes))
        }
    }
}

/// Absolute path when `s` names an existing file; otherwise unchanged.
pub fn absolutize(s: &mut String) {
    let p = Path::new(s.as_str());
    if p.is_file() {
        if let Ok(abs) = p.canonicalize() {
            *s = abs.to_string_lossy().into_owned();
        }
    }
}

/// Loads inputs, remembering their digests and the last group/cocycle built.
pub struct Ctx {
    pub limits: Limits,
    pub seed: u64,
    pub inputs: Vec<InputRecord>,
    pub group: Option<Arc<FiniteGroup>>,
    pub cocycle: Option<TwoCocycle>,
}

impl Ctx {
    pub fn new(limits: Limits, seed: u64) -> Self {
        Ctx { limits, seed, inputs: Vec::new(), group: None, cocycle: None }
    }

    fn document(&mut self, role: &str, src: &str, shorthand: fn(&str) -> Option<Value>) -> Result<Value, CliError> {
        let p = Path::new(src);
        let (doc, kind, digest) = if p.is_file() {
            let bytes = std::fs::read(p).map_err(|e| CliError::io(src, e))?;
            let doc: Value = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Input(format!("{role} file {src}: invalid JSON: {e}")))?;
            (doc, SourceKind::File, sha256_hex(&bytes))
        } else if let Some(doc) = shorthand(src) {
            (doc, SourceKind::Shorthand, sha256_hex(src.as_bytes()))
        } else {
            return Err(CliError::Input(format!("{role} '{src}' is neither a readable file nor a known shorthand")));
        };
        self.inputs.push(InputRecord { role: role.into(), source: src.into(), kind, sha256: digest });
        Ok(doc)
    }

    pub fn group(&mut self, src: &str) -> Result<Arc<FiniteGroup>, CliError> {
        let doc = self.document("group", src, group_shorthand)?;
        let g = build_group(&doc, &self.limits)?;
        self.group = Some(g.clone());
        Ok(g)
    }

    pub fn instance(&mut self, group: &str, cocycle: &str) -> Result<(Arc<FiniteGroup>, TwoCocycle), CliError> {
        let g = self.group(group)?;
        let doc = self.document("cocycle", cocycle, cocycle_shorthand)?;
        let c = build_cocycle(&g, &doc, &self.limits)?;
        self.cocycle = Some(c.clone());
        Ok((g, c))
    }

    pub fn one_cocycle(&mut self, src: &str) -> Result<OneCocycle, CliError> {
        let doc = self.document("one_cocycle", src, |_| None)?;
        Ok(build_one_cocycle(&doc, &self.limits)?)
    }

    pub fn raw(&mut self, role: &str, src: &str) -> Result<Value, CliError> {
        self.document(role, src, |_| None)
    }
}
