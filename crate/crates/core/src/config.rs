//! Run configuration, read from a single JSON document.

use crate::error::{Error, Result};
use crate::halfplane::{GroupElement, HPoint};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// How the generator `γ₁` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Gamma1Raw", into = "Gamma1Raw")]
pub enum Gamma1Choice {
    Auto,
    Explicit([i64; 4]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Gamma1Raw {
    Name(String),
    Entries([i64; 4]),
}

impl TryFrom<Gamma1Raw> for Gamma1Choice {
    type Error = String;

    fn try_from(raw: Gamma1Raw) -> std::result::Result<Self, String> {
        match raw {
            Gamma1Raw::Name(s) if s == "auto" => Ok(Gamma1Choice::Auto),
            Gamma1Raw::Name(s) => Err(format!("gamma1 must be \"auto\" or [a,b,c,d], got {s:?}")),
            Gamma1Raw::Entries(e) => Ok(Gamma1Choice::Explicit(e)),
        }
    }
}

impl From<Gamma1Choice> for Gamma1Raw {
    fn from(c: Gamma1Choice) -> Self {
        match c {
            Gamma1Choice::Auto => Gamma1Raw::Name("auto".into()),
            Gamma1Choice::Explicit(e) => Gamma1Raw::Entries(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub level: i64,
    pub gamma1: Gamma1Choice,
    pub z_ref: [f64; 2],
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_grid")]
    pub t_grid: Vec<f64>,
    pub digits: u32,
    #[serde(rename = "U")]
    pub u: f64,
    pub output_dir: PathBuf,
    pub coeff_file: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            level: 11,
            gamma1: Gamma1Choice::Auto,
            z_ref: [0.0, 1.0],
            t: 500.0,
            t_grid: vec![250.0, 500.0, 1000.0, 2000.0],
            digits: 10,
            u: 10.0,
            output_dir: PathBuf::from("modsym-out"),
            coeff_file: None,
            threads: None,
        }
    }
}

/// Explicit generators must have a symbol at most this large.
pub const GAMMA1_SYMBOL_TOL: f64 = 1e-8;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn z_ref_point(&self) -> Result<HPoint> {
        HPoint::new(self.z_ref[0], self.z_ref[1]).map_err(|_| Error::Config("z_ref must have positive imaginary part".into()))
    }

    /// Largest `T` any command of this config needs.
    pub fn t_max(&self) -> f64 {
        self.t_grid.iter().copied().fold(self.t, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.level < 1 {
            return bad(format!("level must be positive, got {}", self.level));
        }
        self.z_ref_point()?;
        if !(self.t >= 1.0 && self.t.is_finite()) {
            return bad(format!("T must be a finite number at least 1, got {}", self.t));
        }
        if self.t_grid.iter().any(|t| !(*t > 1.0 && t.is_finite())) {
            return bad("T_grid entries must be finite and above 1".into());
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("T_grid must be strictly increasing".into());
        }
        if !(4..=15).contains(&self.digits) {
            return bad(format!("digits must lie in 4..=15, got {}", self.digits));
        }
        if !(self.u >= 2.0 && self.u.is_finite()) {
            return bad(format!("U must be at least 2, got {}", self.u));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let Gamma1Choice::Explicit(e) = self.gamma1 {
            let g = GroupElement::from_entries(e).map_err(|err| Error::Config(format!("gamma1: {err}")))?;
            if !g.is_hyperbolic() {
                return bad(format!("gamma1 {g} is not hyperbolic"));
            }
            if g.c() % self.level != 0 {
                return bad(format!("gamma1 {g} is not in Gamma0({})", self.level));
            }
        }
        if self.coeff_file.is_none() && self.level != 11 {
            return bad(format!("level {} needs a coefficient file", self.level));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"gamma1\":\"auto\""));
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"T": 50, "gamma1": [12, 1, 11, 1]}"#).unwrap();
        assert_eq!(c.t, 50.0);
        assert_eq!(c.gamma1, Gamma1Choice::Explicit([12, 1, 11, 1]));
        assert_eq!(c.level, 11);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"gamma1": "manual"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"colour": 1}"#).is_err());
        let mut c = RunConfig::default();
        c.gamma1 = Gamma1Choice::Explicit([1, 1, 0, 1]);
        assert!(c.validate().is_err());
        c.gamma1 = Gamma1Choice::Explicit([2, 1, 1, 1]);
        assert!(c.validate().is_err());
        c.gamma1 = Gamma1Choice::Explicit([2, 1, 1, 2]);
        assert!(c.validate().is_err());
        let c = RunConfig { t_grid: vec![500.0, 250.0], ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { z_ref: [0.0, -1.0], ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { level: 37, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn missing_file_is_config_error() {
        assert!(matches!(RunConfig::load(Path::new("/nonexistent/cfg.json")), Err(Error::Config(_))));
    }
}
