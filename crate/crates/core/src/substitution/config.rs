//! JSON system configuration.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A number written either as a JSON string (`"1/2"`, `"t+1"`) or a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lit {
    Str(String),
    Int(i64),
    Float(f64),
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Str(s) => write!(f, "{s}"),
            Lit::Int(i) => write!(f, "{i}"),
            Lit::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<&str> for Lit {
    fn from(s: &str) -> Self {
        Lit::Str(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaConfig {
    pub minpoly: Vec<Lit>,
    pub root_interval: [Lit; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub dimension: usize,
    pub colors: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub color_names: Vec<String>,
    /// Omitted for rational systems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaConfig>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<Lit>>,
    /// `digits[i][j]` lists the translation vectors of `D_ij`.
    pub digits: Vec<Vec<Vec<Vec<Lit>>>>,
}

impl SystemConfig {
    pub fn from_json(src: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(src)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Canonical compact JSON, the input of the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_numbers_and_strings() {
        let cfg = SystemConfig::from_json(
            r#"{"name":"x","dimension":1,"colors":1,"Q":[[2]],"digits":[[[["0"],[1]]]]}"#,
        )
        .unwrap();
        assert_eq!(cfg.q[0][0], Lit::Int(2));
        assert_eq!(cfg.digits[0][0][1][0].to_string(), "1");
        assert_eq!(cfg.hash_hex().len(), 64);
    }
}
