//! `key=value` run configuration for `verify`.
//!
//! ```text
//! # two annulus poles and a disc
//! domain=annulus:0.5
//! pole=0.7,0
//! pole=-0.2,0.6
//! domain=disc:0,0,1
//! pole=0,0
//! tolerance.flux=1e-5
//! seed=7
//! ```
//!
//! Each `pole=` belongs to the closest `domain=` line above it. Without any
//! `domain=` line the default sample plan is used.

use std::path::PathBuf;

use num_complex::Complex;
use suita_core::geometry::parse_point;
use suita_core::verify::{default_samples, Sample, Suite, SuiteConfig};
use suita_core::DomainSpec;

use crate::error::{CliError, Result};
use crate::report::Format;

/// Parsed configuration file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub suite: SuiteConfig,
    /// `true` when the file set `seed=`
    pub seed_set: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CliError::Config { line, msg: format!("{key} expects a number, got {v:?}") })
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut samples: Vec<Sample> = Vec::new();
        let mut current: Option<DomainSpec<f64>> = None;
        let mut pending = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| CliError::Config { line, msg: format!("expected key=value, got {body:?}") })?;
            let err = |msg: String| CliError::Config { line, msg };
            match key {
                "domain" => {
                    if pending {
                        return Err(err("previous domain has no pole".into()));
                    }
                    current = Some(value.parse().map_err(|e: suita_core::Error| err(e.to_string()))?);
                    pending = true;
                }
                "pole" => {
                    let domain = current.clone().ok_or_else(|| err("pole before any domain".into()))?;
                    let pole: Complex<f64> = parse_point(value).map_err(|e| err(e.to_string()))?;
                    samples.push(Sample { domain, pole });
                    pending = false;
                }
                "seed" => {
                    cfg.suite.seed = number(line, key, value)?;
                    cfg.seed_set = true;
                }
                "grid" => cfg.suite.grid = number(line, key, value)?,
                "walks" => cfg.suite.walks = number(line, key, value)?,
                "samples" => cfg.suite.mc_samples = number(line, key, value)?,
                "j_max" => cfg.suite.j_max = number(line, key, value)?,
                "blb_steps" => cfg.suite.blb_steps = number(line, key, value)?,
                "suite" => {
                    let mut suites = Vec::new();
                    for s in value.split(',') {
                        suites.extend(Suite::parse(s.trim()).map_err(|e| err(e.to_string()))?);
                    }
                    suites.sort();
                    suites.dedup();
                    cfg.suite.suites = suites;
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = Some(value.parse().map_err(err)?),
                _ => match key.strip_prefix("tolerance.") {
                    Some(name) => {
                        let v: f64 = number(line, key, value)?;
                        cfg.suite.tolerances.set(name, v).map_err(|e| err(e.to_string()))?;
                    }
                    None => return Err(err(format!("unknown key {key:?}"))),
                },
            }
        }
        if pending {
            return Err(CliError::Config { line: text.lines().count(), msg: "last domain has no pole".into() });
        }
        cfg.suite.samples = if samples.is_empty() { default_samples() } else { samples };
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_samples_and_overrides() {
        let cfg = Config::parse(
            "# comment\ndomain=annulus:0.5\npole=0.7,0\npole=-0.2,0.6  # trailing\n\ndomain=disc:0,0,1\npole=0,0\ntolerance.flux=1e-5\nseed=7\ngrid=256\nsuite=thm1,suita\nout=r.csv\nformat=json\n",
        )
        .unwrap();
        assert_eq!(cfg.suite.samples.len(), 3);
        assert_eq!(cfg.suite.samples[1].pole, Complex::new(-0.2, 0.6));
        assert_eq!(cfg.suite.samples[2].domain, DomainSpec::unit_disc());
        assert_eq!(cfg.suite.tolerances.get("flux"), 1e-5);
        assert_eq!((cfg.suite.seed, cfg.seed_set, cfg.suite.grid), (7, true, 256));
        assert_eq!(cfg.suite.suites, vec![Suite::Suita, Suite::Thm1]);
        assert_eq!(cfg.out, Some(PathBuf::from("r.csv")));
        assert_eq!(cfg.format, Some(Format::Json));
    }

    #[test]
    fn empty_file_uses_defaults() {
        let cfg = Config::parse("").unwrap();
        assert_eq!(cfg.suite, SuiteConfig::default());
        assert!(!cfg.seed_set);
    }

    #[test]
    fn rejects_malformed_lines() {
        for (text, line) in [
            ("colour=red", 1),
            ("domain=annulus:0.5\npole=0.7", 2),
            ("pole=0,0", 1),
            ("domain=annulus:2", 1),
            ("domain=disc:0,0,1\ndomain=disc:0,0,2\npole=0,0", 2),
            ("grid=many", 1),
            ("tolerance.bogus=1", 1),
            ("tolerance.all=-1", 1),
            ("just text", 1),
            ("domain=disc:0,0,1", 1),
        ] {
            match Config::parse(text) {
                Err(CliError::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
