//! Flat key=value run configuration.
//!
//! Recognized keys:
//!   s_primes     comma-separated finite places of S (must contain 2)
//!   hecke_m.<p>  Hecke-ball exponent m at the S-prime p (default 0)
//!   profile      named θ-profile: plateau | annulus | zero
//!   x_grid       comma-separated, strictly increasing X grid
//!   precision    decimal digits for exact-value evaluation
//!   out_dir      output directory for sweep artifacts

use anyhow::{bail, Context, Result};
use gl2trace::orbital::{ArchProfile, TestFunctionSpec};
use gl2trace::PlaceSet;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub s_primes: Vec<u64>,
    pub hecke_m: BTreeMap<u64, u32>,
    pub profile: String,
    pub x_grid: Vec<u64>,
    pub precision: u32,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            s_primes: vec![2],
            hecke_m: BTreeMap::new(),
            profile: "plateau".into(),
            x_grid: vec![1_000, 10_000, 100_000, 1_000_000],
            precision: 12,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key=value, got {line:?}", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "s_primes" => {
                    cfg.s_primes = value
                        .split(',')
                        .map(|t| t.trim().parse::<u64>().context("bad prime"))
                        .collect::<Result<_>>()?;
                }
                "profile" => cfg.profile = value.to_string(),
                "x_grid" => {
                    cfg.x_grid = value
                        .split(',')
                        .map(|t| t.trim().parse::<u64>().context("bad grid point"))
                        .collect::<Result<_>>()?;
                }
                "precision" => cfg.precision = value.parse().context("bad precision")?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                _ => {
                    if let Some(p) = key.strip_prefix("hecke_m.") {
                        let p: u64 = p.parse().context("bad hecke_m prime")?;
                        cfg.hecke_m.insert(p, value.parse().context("bad hecke_m value")?);
                    } else {
                        bail!("line {}: unknown key {key:?}", lineno + 1);
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s_primes.contains(&2) {
            bail!("s_primes must contain 2");
        }
        if !self.x_grid.windows(2).all(|w| w[0] < w[1]) {
            bail!("x_grid must be strictly increasing");
        }
        if self.precision == 0 {
            bail!("precision must be at least 1");
        }
        for p in self.hecke_m.keys() {
            if !self.s_primes.contains(p) {
                bail!("hecke_m.{p} given but {p} is not in s_primes");
            }
        }
        if ArchProfile::from_name(&self.profile).is_none() {
            bail!("unknown profile {:?} (built-ins: plateau, annulus, zero)", self.profile);
        }
        Ok(())
    }

    pub fn place_set(&self) -> Result<PlaceSet> {
        PlaceSet::new(self.s_primes.clone()).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn test_function(&self, s: &PlaceSet) -> TestFunctionSpec {
        let profile = ArchProfile::from_name(&self.profile).expect("validated");
        let mut f = TestFunctionSpec::spherical(s, profile);
        for (&p, &m) in &self.hecke_m {
            f = f.with_ball(p, m);
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::parse(
            "s_primes=2,3\nhecke_m.3=1\nprofile=annulus\nx_grid=10,100\nprecision=10\nout_dir=/tmp/x\n",
        )
        .unwrap();
        assert_eq!(cfg.s_primes, vec![2, 3]);
        assert_eq!(cfg.hecke_m[&3], 1);
        assert_eq!(cfg.x_grid, vec![10, 100]);
        assert!(RunConfig::parse("s_primes=3\n").is_err());
        assert!(RunConfig::parse("x_grid=100,10\n").is_err());
        assert!(RunConfig::parse("nonsense=1\n").is_err());
        assert!(RunConfig::parse("profile=wavelet\n").is_err());
    }
}
