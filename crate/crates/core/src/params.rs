//! Flat `key=value` parameter files.
//!
//! ```text
//! # SiV(0)
//! hbar_omega_mev=75.9
//! lambda_mev=78.3
//! xi_mev=45
//! f_g_mev=95
//! f_u_mev=103
//! ```
//!
//! The couplings may instead be given as `e_jt1_mev` and `e_jt2_mev`; they
//! are then converted with `F_u ≥ F_g`. Giving both forms is an error.
//! Everything after `#` on a line is ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::hamiltonian::{couplings_from_ejt, CouplingOrder, PjtParams};

pub const KEYS: [&str; 7] = [
    "hbar_omega_mev",
    "lambda_mev",
    "xi_mev",
    "f_g_mev",
    "f_u_mev",
    "e_jt1_mev",
    "e_jt2_mev",
];

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("line {line}: expected key=value, found '{text}'")]
    Malformed { line: usize, text: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key '{key}' (first set on line {first})")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },

    #[error("line {line}: value of '{key}' is not a finite number: '{value}'")]
    NonNumeric {
        line: usize,
        key: String,
        value: String,
    },

    #[error("line {line}: '{key}' must not be negative, got {value}")]
    Negative {
        line: usize,
        key: String,
        value: f64,
    },

    #[error("line {line}: '{key}' must be positive, got {value}")]
    NotPositive {
        line: usize,
        key: String,
        value: f64,
    },

    #[error("missing key '{0}'")]
    MissingKey(&'static str),

    #[error("missing coupling: give f_g_mev and f_u_mev, or e_jt1_mev and e_jt2_mev")]
    MissingCoupling,

    #[error(
        "conflicting coupling specification: both f_g_mev/f_u_mev and e_jt1_mev/e_jt2_mev are set"
    )]
    ConflictingCoupling,

    #[error("e_jt2_mev = {e_jt2} exceeds e_jt1_mev = {e_jt1}")]
    InconsistentJahnTeller { e_jt1: f64, e_jt2: f64 },
}

struct Entry {
    line: usize,
    value: f64,
}

/// Parses and validates a parameter file.
pub fn parse_params(text: &str) -> Result<PjtParams, ParamsError> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParamsError::Malformed {
                line,
                text: content.to_string(),
            })?;
        let (key, value) = (key.trim(), value.trim());
        let key: &'static str =
            KEYS.iter()
                .find(|k| **k == key)
                .ok_or_else(|| ParamsError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
        if let Some(first) = entries.get(key) {
            return Err(ParamsError::DuplicateKey {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        let parsed: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ParamsError::NonNumeric {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })?;
        if parsed < 0.0 {
            return Err(ParamsError::Negative {
                line,
                key: key.to_string(),
                value: parsed,
            });
        }
        if key == "hbar_omega_mev" && parsed == 0.0 {
            return Err(ParamsError::NotPositive {
                line,
                key: key.to_string(),
                value: parsed,
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                value: parsed,
            },
        );
    }

    let get = |key: &'static str| entries.get(key).map(|e| e.value);
    let require = |key: &'static str| get(key).ok_or(ParamsError::MissingKey(key));
    let hbar_omega = require("hbar_omega_mev")?;
    let lambda_corr = require("lambda_mev")?;
    let xi_corr = require("xi_mev")?;

    let direct = get("f_g_mev").is_some() || get("f_u_mev").is_some();
    let via_ejt = get("e_jt1_mev").is_some() || get("e_jt2_mev").is_some();
    let (f_g, f_u) = match (direct, via_ejt) {
        (true, true) => return Err(ParamsError::ConflictingCoupling),
        (false, false) => return Err(ParamsError::MissingCoupling),
        (true, false) => (require("f_g_mev")?, require("f_u_mev")?),
        (false, true) => {
            let (e_jt1, e_jt2) = (require("e_jt1_mev")?, require("e_jt2_mev")?);
            couplings_from_ejt(e_jt1, e_jt2, hbar_omega, CouplingOrder::UDominant)
                .map_err(|_| ParamsError::InconsistentJahnTeller { e_jt1, e_jt2 })?
        }
    };

    Ok(PjtParams {
        hbar_omega,
        lambda_corr,
        xi_corr,
        f_g,
        f_u,
    })
}

/// Writes `params` in the direct-coupling form accepted by [`parse_params`].
/// Values use the shortest representation that parses back exactly.
pub fn format_params(params: &PjtParams) -> String {
    let mut out = String::new();
    for (key, value) in [
        ("hbar_omega_mev", params.hbar_omega),
        ("lambda_mev", params.lambda_corr),
        ("xi_mev", params.xi_corr),
        ("f_g_mev", params.f_g),
        ("f_u_mev", params.f_u),
    ] {
        let _ = writeln!(out, "{key}={value}");
    }
    out
}
