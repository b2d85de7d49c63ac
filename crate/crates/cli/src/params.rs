//! Merges command-line flags over the config file section of a subcommand.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use girthlab::config::Config;
use girthlab::group::GroupSpec;
use girthlab::perc::exponents::linear_grid;

use crate::Common;

pub struct Params {
    pub cfg: Config,
    section: &'static str,
    common: Common,
}

impl Params {
    pub fn load(common: &Common, section: &'static str) -> Result<Self> {
        let cfg = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Config::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Config::new(),
        };
        let p = Self { cfg, section, common: common.clone() };
        if let Some(w) = p.workers()? {
            if w == 0 {
                bail!("--workers must be at least 1");
            }
        }
        Ok(p)
    }

    /// Flag value, else the config value under this subcommand's section
    /// (or the top level).
    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => Ok(self.cfg.parsed(self.section, key)?),
        }
    }

    pub fn get_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn raw(&self, flag: Option<&str>, key: &str) -> Option<String> {
        flag.map(String::from).or_else(|| self.cfg.lookup(self.section, key).map(String::from))
    }

    pub fn spec(&self, flag: Option<&str>) -> Result<GroupSpec> {
        let s = self.raw(flag, "spec").ok_or_else(|| anyhow!("no graph given (use --spec)"))?;
        GroupSpec::parse(&s).map_err(|e| anyhow!("bad spec {s:?}: {e}"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.get(self.common.seed, "seed")?
            .ok_or_else(|| anyhow!("no seed given (use --seed or seed = ... in the config)"))
    }

    pub fn workers(&self) -> Result<Option<usize>> {
        self.get(self.common.workers, "workers")
    }

    /// `--out`, then the config, then `$GIRTHLAB_OUT`.
    pub fn out_dir(&self) -> Option<PathBuf> {
        self.common
            .out
            .clone()
            .or_else(|| self.cfg.lookup(self.section, "out").map(PathBuf::from))
            .or_else(|| std::env::var_os("GIRTHLAB_OUT").map(PathBuf::from))
    }
}

/// `a,b,c` or `lo:hi:count`; must be strictly increasing and inside `[lo, hi]`.
pub fn parse_grid(text: &str, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else { bail!("grid {text:?}: expected lo:hi:count") };
        let (a, b): (f64, f64) = (a.parse()?, b.parse()?);
        let n: usize = n.parse()?;
        if n == 0 {
            bail!("grid {text:?}: count must be positive");
        }
        linear_grid(a, b, n)
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("grid {text:?}: {s:?} is not a number")))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() {
        bail!("empty grid");
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        bail!("grid {text:?} is not increasing at {} -> {}", w[0], w[1]);
    }
    if let Some(x) = grid.iter().find(|&&x| !(x >= lo && x <= hi)) {
        bail!("grid value {x} outside [{lo}, {hi}]");
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1, 0.2,0.3", 0.0, 1.0).unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0:1:3", 0.0, 1.0).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0.3,0.2", 0.0, 1.0).is_err());
        assert!(parse_grid("0.5,1.5", 0.0, 1.0).is_err());
        assert!(parse_grid("x", 0.0, 1.0).is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "seed = 3\n[perc]\nR = 7\ntrials = 50\n").unwrap();
        let common = Common { config: Some(path), seed: None, workers: None, out: None };
        let p = Params::load(&common, "perc").unwrap();
        assert_eq!(p.seed().unwrap(), 3);
        assert_eq!(p.get_or(None, "R", 1usize).unwrap(), 7);
        assert_eq!(p.get_or(Some(9usize), "R", 1).unwrap(), 9);
        assert_eq!(p.get_or(None::<u64>, "missing", 5).unwrap(), 5);
    }

    #[test]
    fn zero_workers_rejected() {
        let common = Common { workers: Some(0), ..Common::default() };
        assert!(Params::load(&common, "perc").is_err());
    }
}
