//! Instance files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! p = 2
//! n = 3
//! r = 1
//! u = 110        # basis row of U as a digit string; repeat for more rows
//! cap = 4096
//! rank_cap = 3
//! ```
//!
//! Digits above 9 are written `a`, `b`, `c`. When `u` rows are given, `r`
//! may be omitted; if present it must match the number of rows.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf::Row;
use crate::lglu::Instance;

pub const DEFAULT_ENUMERATION_CAP: usize = 4096;
pub const DEFAULT_RANK_CAP: usize = 3;
pub const CAP_ENV: &str = "LGLU_CAP";
pub const RANK_CAP_ENV: &str = "LGLU_RANK_CAP";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceConfig {
    pub p: u32,
    pub n: usize,
    pub r: usize,
    pub u_basis: Option<Vec<Row>>,
    pub cap: Option<usize>,
    pub rank_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub enumeration: usize,
    pub rank: usize,
}

impl InstanceConfig {
    pub fn parse(text: &str) -> Result<InstanceConfig> {
        let mut p = None;
        let mut n = None;
        let mut r = None;
        let mut rows: Vec<String> = Vec::new();
        let mut cap = None;
        let mut rank_cap = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let int = |v: &str| -> Result<usize> {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("line {}: {key} is not an integer", lineno + 1)))
            };
            match key {
                "p" => p = Some(int(value)? as u32),
                "n" => n = Some(int(value)?),
                "r" => r = Some(int(value)?),
                "u" => rows.extend(value.split(',').map(|s| s.trim().to_string())),
                "cap" => cap = Some(int(value)?),
                "rank_cap" => rank_cap = Some(int(value)?),
                other => {
                    return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }
        let p = p.ok_or_else(|| Error::Config("missing key p".into()))?;
        let n = n.ok_or_else(|| Error::Config("missing key n".into()))?;
        let u_basis = if rows.is_empty() {
            None
        } else {
            Some(rows.iter().map(|s| parse_row(s, n)).collect::<Result<Vec<Row>>>()?)
        };
        let r = match (r, &u_basis) {
            (Some(r), Some(b)) if r != b.len() => {
                return Err(Error::Config(format!("r = {r} but {} basis rows given", b.len())))
            }
            (Some(r), _) => r,
            (None, Some(b)) => b.len(),
            (None, None) => return Err(Error::Config("missing key r".into())),
        };
        let cfg = InstanceConfig {
            p,
            n,
            r,
            u_basis,
            cap,
            rank_cap,
        };
        cfg.instance()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<InstanceConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        InstanceConfig::parse(&text)
    }

    pub fn instance(&self) -> Result<Instance> {
        match &self.u_basis {
            Some(rows) => Instance::with_basis(self.p, self.n, rows),
            None => Instance::new(self.p, self.n, self.r),
        }
    }

    /// Flag, then config file, then environment, then the built-in default.
    pub fn caps(&self, cap_flag: Option<usize>, rank_flag: Option<usize>) -> Result<Caps> {
        let env = |name: &str| -> Result<Option<usize>> {
            match std::env::var(name) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("{name}={v:?} is not an integer"))),
                Err(_) => Ok(None),
            }
        };
        Ok(Caps {
            enumeration: cap_flag
                .or(self.cap)
                .or(env(CAP_ENV)?)
                .unwrap_or(DEFAULT_ENUMERATION_CAP),
            rank: rank_flag
                .or(self.rank_cap)
                .or(env(RANK_CAP_ENV)?)
                .unwrap_or(DEFAULT_RANK_CAP),
        })
    }
}

fn parse_row(s: &str, n: usize) -> Result<Row> {
    let row = s
        .chars()
        .map(|c| {
            c.to_digit(16)
                .filter(|&d| d < 13)
                .map(|d| d as u8)
                .ok_or_else(|| Error::Config(format!("bad digit {c:?} in basis row {s:?}")))
        })
        .collect::<Result<Row>>()?;
    if row.len() != n {
        return Err(Error::Config(format!("basis row {s:?} has {} digits, expected {n}", row.len())));
    }
    Ok(row)
}
