//! Cached, configuration-driven access to enumerations, coefficients,
//! symbols and the Petersson norm.

use crate::config::{Gamma1Choice, RunConfig, GAMMA1_SYMBOL_TOL};
use crate::cuspform::{eta_expansion_11, QExpansion};
use crate::error::{Error, Result};
use crate::group_enum::{enumerate_cosets, EnumerationResult};
use crate::halfplane::{analyze_hyperbolic, GroupElement, HPoint, HyperbolicContext};
use crate::modsym::{
    build_gamma1, gamma0_pool, normalize, period_lattice, petersson_norm, symbol, symbol_terms, NormalizedSymbol,
    PeriodLattice, PeterssonNorm, SymbolTable, SymbolValue,
};
use crate::summatory::gamma0_volume;
use std::path::{Path, PathBuf};

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "MODSYM_CACHE_DIR";

/// Digits used for the generator check.
pub const GAMMA1_DIGITS: u32 = 12;

/// Entry bound of the pool searched by the automatic generator.
pub const AUTO_POOL_BOUND: i64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
}

pub struct Session {
    pub config: RunConfig,
    pub context: HyperbolicContext,
    pub z_ref: HPoint,
    cache_dir: PathBuf,
    q: Option<QExpansion>,
}

pub fn default_cache_dir(config: &RunConfig) -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => config.output_dir.join("cache"),
    }
}

/// The generator selected by a configuration.
pub fn select_gamma1(config: &RunConfig) -> Result<HyperbolicContext> {
    match config.gamma1 {
        Gamma1Choice::Auto => build_gamma1(&gamma0_pool(config.level, AUTO_POOL_BOUND)),
        Gamma1Choice::Explicit(e) => analyze_hyperbolic(&GroupElement::from_entries(e)?),
    }
}

impl Session {
    pub fn new(config: RunConfig) -> Result<Self> {
        let cache_dir = default_cache_dir(&config);
        Self::with_cache_dir(config, cache_dir)
    }

    pub fn with_cache_dir(config: RunConfig, cache_dir: PathBuf) -> Result<Self> {
        config.validate()?;
        let context = select_gamma1(&config)?;
        let z_ref = config.z_ref_point()?;
        Ok(Session { config, context, z_ref, cache_dir, q: None })
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    pub fn volume(&self) -> f64 {
        gamma0_volume(self.config.level)
    }

    fn tag(&self) -> String {
        let g = self.context.gamma1.entries();
        format!(
            "N{}-g{}_{}_{}_{}-z{}_{}",
            self.config.level, g[0], g[1], g[2], g[3], self.z_ref.x, self.z_ref.y
        )
    }

    pub fn coset_cache_path(&self) -> PathBuf {
        self.cache_dir.join(format!("cosets-{}.csv", self.tag()))
    }

    pub fn symbol_cache_path(&self) -> PathBuf {
        let g = self.context.gamma1.entries();
        self.cache_dir
            .join(format!("symbols-N{}-g{}_{}_{}_{}-D{}.csv", self.config.level, g[0], g[1], g[2], g[3], self.config.digits))
    }

    /// Enumeration complete to `t`, served from the cache when it reaches
    /// far enough.
    pub fn enumeration(&self, t: f64) -> Result<(EnumerationResult, CacheStatus)> {
        let path = self.coset_cache_path();
        if path.exists() {
            let cached = EnumerationResult::load_cache(&path, self.config.level, Some(&self.context.gamma1))?;
            if cached.z_ref != self.z_ref {
                return Err(Error::ContextMismatch("cached reference point differs".into()));
            }
            if cached.t_max >= t {
                return Ok((cached.restrict(t)?, CacheStatus::Hit));
            }
        }
        let en = enumerate_cosets(self.config.level, &self.context, t, self.z_ref)?;
        en.save_cache(&path)?;
        Ok((en, CacheStatus::Miss))
    }

    /// Coefficients `a_1..a_m` with at least `m` terms.
    pub fn qexpansion(&mut self, m: usize) -> Result<&QExpansion> {
        let stale = self.q.as_ref().is_none_or(|q| q.len() < m);
        if stale {
            let q = match &self.config.coeff_file {
                Some(path) => {
                    let q = QExpansion::load(path, false)?;
                    if q.level() != self.config.level {
                        return Err(Error::Config(format!(
                            "coefficient file is for level {}, config has {}",
                            q.level(),
                            self.config.level
                        )));
                    }
                    if q.len() < m {
                        return Err(Error::InsufficientCoefficients { needed: m, available: q.len() });
                    }
                    q
                }
                None if self.config.level == 11 => eta_expansion_11(m.next_power_of_two().max(1024))?,
                None => return Err(Error::Config("no coefficient source for this level".into())),
            };
            self.q = Some(q);
        }
        Ok(self.q.as_ref().expect("set above"))
    }

    /// Symbol of the generator; must vanish for the coset symbols to be
    /// well defined.
    pub fn check_gamma1(&mut self) -> Result<SymbolValue> {
        let g1 = self.context.gamma1;
        let m = symbol_terms(g1.c(), GAMMA1_DIGITS);
        let q = self.qexpansion(m)?;
        let s = symbol(&g1, q, GAMMA1_DIGITS)?;
        if s.value.norm() > GAMMA1_SYMBOL_TOL {
            return Err(Error::Config(format!(
                "generator {g1} has symbol {} (|.| = {:e}); the coset symbols are not well defined",
                s.value,
                s.value.norm()
            )));
        }
        Ok(s)
    }

    /// Symbols for every coset of `en`, reusing and extending the cache.
    pub fn symbols(&mut self, en: &EnumerationResult) -> Result<(SymbolTable, CacheStatus)> {
        self.check_gamma1()?;
        let path = self.symbol_cache_path();
        let digits = self.config.digits;
        let mut table = if path.exists() {
            let t = SymbolTable::load(&path)?;
            if t.digits != digits {
                return Err(Error::ContextMismatch(format!("symbol cache has D={}, config D={digits}", t.digits)));
            }
            t
        } else {
            SymbolTable::new(digits)
        };
        let missing: Vec<_> = en.reps.iter().filter(|r| table.get(&r.rep).is_none()).collect();
        if missing.is_empty() {
            return Ok((table, CacheStatus::Hit));
        }
        let c_max = missing.iter().map(|r| r.short.c().unsigned_abs()).max().unwrap_or(1) as i64;
        let q = self.qexpansion(symbol_terms(c_max.max(1), digits))?.clone();
        table.fill(en, &q)?;
        std::fs::create_dir_all(&self.cache_dir)?;
        table.save(&path)?;
        Ok((table, CacheStatus::Miss))
    }

    /// Period lattice from the symbols of `en`.
    pub fn lattice(&self, en: &EnumerationResult, table: &SymbolTable) -> Result<PeriodLattice> {
        let syms = table.for_reps(&en.reps)?;
        period_lattice(&syms, 1e-7)
    }

    pub fn petersson(&self, lattice: &PeriodLattice) -> PeterssonNorm {
        petersson_norm(lattice)
    }

    /// Normalized symbols in enumeration order.
    pub fn normalized(&self, en: &EnumerationResult, table: &SymbolTable, pnorm: &PeterssonNorm) -> Result<Vec<NormalizedSymbol>> {
        let vol = self.volume();
        en.reps.iter().map(|r| Ok(normalize(table.require(&r.rep)?, r.norm, vol, pnorm))).collect()
    }
}
