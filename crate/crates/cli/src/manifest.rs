use serde::{Deserialize, Serialize};

use superint_core::laurent::Metric;
use superint_core::model::{Family, Form, ModelParams, VerifyOptions};
use superint_core::Rational;

use crate::CliError;

pub const DEFAULT_MANIFEST: &str = include_str!("../manifests/default.json");

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum HbarSetting {
    #[default]
    Formal,
    Value(Rational),
}

impl HbarSetting {
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "formal" {
            return Ok(HbarSetting::Formal);
        }
        s.parse::<Rational>()
            .map(HbarSetting::Value)
            .map_err(|e| format!("hbar must be \"formal\" or a rational: {e}"))
    }
}

impl Serialize for HbarSetting {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            HbarSetting::Formal => ser.serialize_str("formal"),
            HbarSetting::Value(v) => v.serialize(ser),
        }
    }
}

fn de_hbar<'de, D: serde::Deserializer<'de>>(de: D) -> Result<HbarSetting, D::Error> {
    let s = String::deserialize(de)?;
    HbarSetting::from_str(&s).map_err(serde::de::Error::custom)
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifestOptions {
    #[serde(default = "yes")]
    pub reduce_mod_constraint: bool,
    #[serde(default, deserialize_with = "de_hbar")]
    pub hbar: HbarSetting,
    #[serde(default)]
    pub form: Form,
}

impl Default for ManifestOptions {
    fn default() -> Self {
        ManifestOptions {
            reduce_mod_constraint: true,
            hbar: HbarSetting::Formal,
            form: Form::Verified,
        }
    }
}

impl ManifestOptions {
    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            reduce_mod_constraint: self.reduce_mod_constraint,
            hbar: match &self.hbar {
                HbarSetting::Formal => None,
                HbarSetting::Value(v) => Some(v.clone()),
            },
            form: self.form,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub dim: usize,
    /// Labels like `"+,+,-"`, or `"all"` for every diagonal pattern.
    pub signatures: Vec<String>,
    pub params: Vec<ModelParams>,
    pub relations: Vec<Family>,
    #[serde(default)]
    pub options: ManifestOptions,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Manifest, CliError> {
        match path {
            None => Manifest::parse(DEFAULT_MANIFEST),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                Manifest::parse(&text)
            }
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(format!("manifest: {msg}")));
        if self.dim < 2 {
            return bad(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.signatures.is_empty() || self.params.is_empty() || self.relations.is_empty() {
            return bad("signatures, params and relations must be non-empty".into());
        }
        self.metrics()?;
        for p in &self.params {
            if p.dim() != self.dim {
                return bad(format!("params {} have dimension {}, expected {}", p.label(), p.dim(), self.dim));
            }
        }
        for f in &self.relations {
            if f.arity() > self.dim {
                return bad(format!("relation family {f} needs dimension at least {}", f.arity()));
            }
        }
        Ok(())
    }

    pub fn metrics(&self) -> Result<Vec<Metric>, CliError> {
        let mut out = Vec::new();
        for s in &self.signatures {
            if s == "all" {
                out.extend(Metric::all_patterns(self.dim));
                continue;
            }
            let m = Metric::parse_label(s).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
            if m.dim() != self.dim {
                return Err(CliError::Usage(format!(
                    "manifest: signature {s} has dimension {}, expected {}",
                    m.dim(),
                    self.dim
                )));
            }
            out.push(m);
        }
        out.dedup();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_manifest_parses() {
        let m = Manifest::parse(DEFAULT_MANIFEST).unwrap();
        assert_eq!(m.dim, 3);
        assert_eq!(m.options.hbar, HbarSetting::Formal);
        assert_eq!(m.metrics().unwrap().len(), 3);
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let text = r#"{"dim":3,"signatures":["+,+"],"params":[{"a":["1","2","3"]}],"relations":["qq"]}"#;
        assert!(Manifest::parse(text).is_err());
        let text = r#"{"dim":3,"signatures":["all"],"params":[{"a":["1","2"]}],"relations":["qq"]}"#;
        assert!(Manifest::parse(text).is_err());
        let text = r#"{"dim":3,"signatures":["all"],"params":[{"a":["1","2","3"]}],"relations":["cc-disjoint"]}"#;
        assert!(Manifest::parse(text).is_err());
    }

    #[test]
    fn specialized_hbar() {
        let text = r#"{"dim":3,"signatures":["all"],"params":[{"a":["1","2","3"]}],"relations":["qq"],
            "options":{"hbar":"1/3"}}"#;
        let m = Manifest::parse(text).unwrap();
        assert_eq!(m.options.verify_options().hbar, Some(Rational::new(1, 3)));
        assert!(m.options.reduce_mod_constraint);
    }
}
