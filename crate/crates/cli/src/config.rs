use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tnnflow_core::scalar::fmt_decimal;

/// Values read from `--config`; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    #[serde(rename = "J")]
    pub j: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub t: Option<f64>,
    pub radius: Option<f64>,
    pub tol_float: Option<f64>,
    pub tol_bisect: Option<f64>,
    pub vanish_tol: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag values as given on the command line.
#[derive(Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub j: Option<String>,
    pub seed: Option<u64>,
    pub env_seed: Option<u64>,
    pub count: Option<usize>,
    pub t: Option<f64>,
    pub radius: Option<f64>,
    pub tol_float: Option<f64>,
    pub tol_bisect: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub seed: u64,
    pub count: usize,
    #[serde(serialize_with = "decimal")]
    pub t: f64,
    #[serde(serialize_with = "opt_decimal")]
    pub radius: Option<f64>,
    #[serde(serialize_with = "decimal")]
    pub tol_float: f64,
    #[serde(serialize_with = "decimal")]
    pub tol_bisect: f64,
    #[serde(serialize_with = "decimal")]
    pub vanish_tol: f64,
    pub format: Option<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn decimal<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_decimal(*x))
}

fn opt_decimal<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_decimal(*v)),
        None => s.serialize_none(),
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 3,
            j: Vec::new(),
            seed: 0,
            count: 100,
            t: 0.1,
            radius: None,
            tol_float: 1e-10,
            tol_bisect: 1e-12,
            vanish_tol: 1e-9,
            format: None,
            out: None,
        }
    }
}

/// `""`, `"2"`, `"1,3"` or `"{1, 3}"`.
pub fn parse_j(s: &str) -> Result<Vec<usize>> {
    let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut out = BTreeSet::new();
    for part in inner.split(|c: char| c == ',' || c.is_whitespace()) {
        if part.is_empty() {
            continue;
        }
        out.insert(part.parse::<usize>().with_context(|| format!("bad index {part:?} in J"))?);
    }
    Ok(out.into_iter().collect())
}

impl RunConfig {
    /// Flags win over the config file, which wins over `TNNFLOW_SEED` and
    /// the built-in defaults.
    pub fn resolve(file: Option<ConfigFile>, flags: Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let d = Self::default();
        let j = match flags.j {
            Some(s) => parse_j(&s)?,
            None => file.j.unwrap_or(d.j),
        };
        let config = Self {
            n: flags.n.or(file.n).unwrap_or(d.n),
            j,
            seed: flags.seed.or(file.seed).or(flags.env_seed).unwrap_or(d.seed),
            count: flags.count.or(file.count).unwrap_or(d.count),
            t: flags.t.or(file.t).unwrap_or(d.t),
            radius: flags.radius.or(file.radius),
            tol_float: flags.tol_float.or(file.tol_float).unwrap_or(d.tol_float),
            tol_bisect: flags.tol_bisect.or(file.tol_bisect).unwrap_or(d.tol_bisect),
            vanish_tol: file.vanish_tol.unwrap_or(d.vanish_tol),
            format: flags.format.or(file.format),
            out: flags.out.or(file.out),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("n must be at least 2, got {}", self.n);
        }
        if let Some(&bad) = self.j.iter().find(|&&i| i == 0 || i >= self.n) {
            bail!("J contains {bad}, outside 1..={}", self.n - 1);
        }
        for (name, v) in [
            ("tol-float", self.tol_float),
            ("tol-bisect", self.tol_bisect),
            ("vanish-tol", self.vanish_tol),
        ] {
            if !(v > 0.0) {
                bail!("{name} must be positive");
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                bail!("radius must be positive");
            }
        }
        if !self.t.is_finite() {
            bail!("t must be finite");
        }
        Ok(())
    }

    pub fn j_set(&self) -> BTreeSet<usize> {
        self.j.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_forms() {
        assert_eq!(parse_j("").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_j("2").unwrap(), vec![2]);
        assert_eq!(parse_j("{3, 1}").unwrap(), vec![1, 3]);
        assert!(parse_j("a").is_err());
    }

    #[test]
    fn precedence() {
        let file = ConfigFile {
            n: Some(4),
            seed: Some(5),
            count: Some(9),
            ..ConfigFile::default()
        };
        let flags = Overrides {
            count: Some(2),
            env_seed: Some(11),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(Some(file), flags).unwrap();
        assert_eq!((c.n, c.seed, c.count), (4, 5, 2));

        let c = RunConfig::resolve(None, Overrides { env_seed: Some(11), ..Overrides::default() }).unwrap();
        assert_eq!(c.seed, 11);
    }

    #[test]
    fn rejects_bad_values() {
        let bad_j = Overrides { j: Some("3".into()), ..Overrides::default() };
        assert!(RunConfig::resolve(None, bad_j).is_err());
        let bad_tol = Overrides { tol_float: Some(0.0), ..Overrides::default() };
        assert!(RunConfig::resolve(None, bad_tol).is_err());
    }
}
