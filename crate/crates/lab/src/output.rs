//! Emitted file formats. Every file starts with one `#` comment line
//! holding the SHA-256 of the effective configuration and the seed.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Hex SHA-256 of the canonical TOML of `config`.
pub fn config_hash(config: &RunConfig) -> String {
    Sha256::digest(config.to_toml().as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub fn header(config: &RunConfig) -> String {
    format!("# config_sha256={} seed={}\n", config_hash(config), config.seed)
}

/// Removes a leading `#` comment line, if any.
pub fn strip_header(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => text,
    }
}

/// 17 significant digits, `.` decimal point, round-trip exact.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a header row; floats go through [`float`].
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        let mut text = columns.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[Field]) {
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match *field {
                Field::Int(n) => {
                    let _ = write!(self.text, "{n}");
                }
                Field::Float(x) => self.text.push_str(&float(x)),
            }
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Field {
    Int(u64),
    Float(f64),
}

impl From<usize> for Field {
    fn from(n: usize) -> Self {
        Self::Int(n as u64)
    }
}

impl From<u64> for Field {
    fn from(n: u64) -> Self {
        Self::Int(n)
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

/// Pretty JSON with a trailing newline.
pub fn json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable record");
    text.push('\n');
    text
}
