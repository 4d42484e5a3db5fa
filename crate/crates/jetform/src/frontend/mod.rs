//! Parsing, printing, JSON output and the named-identity checks behind
//! `jetform verify`.

pub mod json;
pub mod parser;
pub mod print;
pub mod verify;

/// Display names for fiber coordinates, indexed by `σ - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    pub fields: Vec<String>,
}

impl Names {
    /// `u` for one field, `u, v` for two, `y1..ym` beyond.
    pub fn default_for(m: u8) -> Self {
        let fields = match m {
            1 => vec!["u".to_string()],
            2 => vec!["u".to_string(), "v".to_string()],
            _ => (1..=m).map(|s| format!("y{}", s)).collect(),
        };
        Names { fields }
    }

    pub fn custom(fields: &[&str]) -> Self {
        Names {
            fields: fields.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn field(&self, sigma: u8) -> String {
        self.fields
            .get(sigma as usize - 1)
            .cloned()
            .unwrap_or_else(|| format!("y{}", sigma))
    }

    pub fn lookup(&self, name: &str) -> Option<u8> {
        self.fields.iter().position(|f| f == name).map(|p| p as u8 + 1)
    }
}
