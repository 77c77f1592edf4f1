//! Empirical law of the normalized modular symbols and its comparison with
//! the standard bivariate Gaussian.

use crate::error::{Error, Result};
use crate::group_enum::EnumerationResult;
use crate::halfplane::GroupElement;
use crate::modsym::NormalizedSymbol;
use crate::numerics::CompensatedSum;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub gamma: GroupElement,
    pub norm: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    /// In enumeration order.
    pub samples: Vec<Sample>,
    pub t: f64,
}

impl EmpiricalDistribution {
    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// From raw points, for synthetic checks.
    pub fn from_points(points: &[(f64, f64)], t: f64) -> Self {
        let samples = points
            .iter()
            .map(|&(x, y)| Sample { gamma: GroupElement::IDENTITY, norm: 1.0, x, y })
            .collect();
        EmpiricalDistribution { samples, t }
    }

    /// CSV with columns `a,b,c,d,norm,x,y`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        writeln!(buf, "a,b,c,d,norm,x,y")?;
        for s in &self.samples {
            let e = s.gamma.entries();
            writeln!(buf, "{},{},{},{},{:?},{:?},{:?}", e[0], e[1], e[2], e[3], s.norm, s.x, s.y)?;
        }
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// One sample per coset of norm at most `t`, taken from the bracket.
pub fn build_distribution(en: &EnumerationResult, normalized: &[NormalizedSymbol], t: f64) -> Result<EmpiricalDistribution> {
    if t > en.t_max {
        return Err(Error::IncompleteEnumeration { have: en.t_max, need: t });
    }
    let by_gamma: HashMap<GroupElement, &NormalizedSymbol> = normalized.iter().map(|s| (s.gamma, s)).collect();
    let mut samples = Vec::new();
    for r in en.reps.iter().take_while(|r| r.norm <= t) {
        let s = by_gamma
            .get(&r.rep)
            .ok_or_else(|| Error::Coverage(format!("no normalized symbol for coset {}", r.rep)))?;
        if s.norm.to_bits() != r.norm.to_bits() {
            return Err(Error::Coverage(format!("norm of {} differs from the enumeration", r.rep)));
        }
        let (x, y) = if r.norm <= 1.0 { (0.0, 0.0) } else { (s.bracket.re, s.bracket.im) };
        samples.push(Sample { gamma: r.rep, norm: r.norm, x, y });
    }
    Ok(EmpiricalDistribution { samples, t })
}

/// `(1/count) Σ xⁿ yᵐ`.
pub fn moments(dist: &EmpiricalDistribution, n: u32, m: u32) -> Result<f64> {
    if dist.samples.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    if n + m > MomentTable::MAX_ORDER {
        return Err(Error::Domain(format!("moment order {n}+{m} exceeds {}", MomentTable::MAX_ORDER)));
    }
    let sum: CompensatedSum = dist.samples.iter().map(|s| s.x.powi(n as i32) * s.y.powi(m as i32)).collect();
    Ok(sum.value() / dist.count() as f64)
}

/// `E[Xⁿ]` for a standard normal.
fn normal_moment(n: u32) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        (1..=n / 2).map(|k| (2 * k - 1) as f64).product()
    }
}

pub fn gaussian_moment(n: u32, m: u32) -> f64 {
    normal_moment(n) * normal_moment(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub n: u32,
    pub m: u32,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub entries: Vec<MomentEntry>,
}

impl MomentTable {
    pub const MAX_ORDER: u32 = 6;

    pub fn compute(dist: &EmpiricalDistribution) -> Result<Self> {
        let mut entries = Vec::new();
        for total in 0..=Self::MAX_ORDER {
            for n in (0..=total).rev() {
                let m = total - n;
                entries.push(MomentEntry { n, m, value: moments(dist, n, m)?, limit: gaussian_moment(n, m) });
            }
        }
        Ok(MomentTable { entries })
    }

    pub fn get(&self, n: u32, m: u32) -> Option<&MomentEntry> {
        self.entries.iter().find(|e| e.n == n && e.m == m)
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 <= x1 && y0 <= y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("rectangle must be bounded with ordered sides".into()));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

pub fn rectangle_prob(dist: &EmpiricalDistribution, r: &Rect) -> f64 {
    if dist.samples.is_empty() {
        return 0.0;
    }
    dist.samples.iter().filter(|s| r.contains(s.x, s.y)).count() as f64 / dist.count() as f64
}

/// `P(X ≤ x)` for a standard normal.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `P(a ≤ X ≤ b)` for a standard normal, through whichever tail keeps
/// precision.
fn interval_prob(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// Standard bivariate Gaussian mass of `r`.
pub fn gaussian_rect(r: &Rect) -> f64 {
    interval_prob(r.x0, r.x1) * interval_prob(r.y0, r.y1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// Kolmogorov–Smirnov distance of one coordinate from the standard normal.
pub fn ks_statistic(dist: &EmpiricalDistribution, axis: Axis) -> Result<f64> {
    if dist.count() < 100 {
        return Err(Error::Domain(format!("KS statistic needs at least 100 samples, got {}", dist.count())));
    }
    let mut v: Vec<f64> = dist
        .samples
        .iter()
        .map(|s| match axis {
            Axis::X => s.x,
            Axis::Y => s.y,
        })
        .collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        // ties form a single jump of the empirical CDF
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = normal_cdf(v[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectRow {
    pub rect: Rect,
    pub empirical: f64,
    pub gaussian: f64,
}

/// Summary of one distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    #[serde(rename = "T")]
    pub t: f64,
    pub count: usize,
    pub moments: MomentTable,
    pub ks_x: f64,
    pub ks_y: f64,
    pub rectangles: Vec<RectRow>,
}

pub fn standard_rectangles() -> Vec<Rect> {
    vec![Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 }, Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }]
}

pub fn summarize(dist: &EmpiricalDistribution, rects: &[Rect]) -> Result<DistributionReport> {
    Ok(DistributionReport {
        t: dist.t,
        count: dist.count(),
        moments: MomentTable::compute(dist)?,
        ks_x: ks_statistic(dist, Axis::X)?,
        ks_y: ks_statistic(dist, Axis::Y)?,
        rectangles: rects
            .iter()
            .map(|r| RectRow { rect: *r, empirical: rectangle_prob(dist, r), gaussian: gaussian_rect(r) })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                let y: f64 = StandardNormal.sample(&mut rng);
                (x, y)
            })
            .collect()
    }

    #[test]
    fn limits() {
        assert_eq!(gaussian_moment(2, 0), 1.0);
        assert_eq!(gaussian_moment(4, 0), 3.0);
        assert_eq!(gaussian_moment(2, 2), 1.0);
        assert_eq!(gaussian_moment(1, 1), 0.0);
        assert_eq!(gaussian_moment(6, 0), 15.0);
        assert_eq!(gaussian_moment(4, 2), 3.0);
    }

    #[test]
    fn point_mass() {
        let d = EmpiricalDistribution::from_points(&vec![(0.0, 0.0); 200], 1.0);
        assert_eq!(moments(&d, 0, 0).unwrap(), 1.0);
        assert_eq!(moments(&d, 2, 0).unwrap(), 0.0);
        assert_eq!(moments(&d, 1, 1).unwrap(), 0.0);
        assert!((ks_statistic(&d, Axis::X).unwrap() - 0.5).abs() < 1e-15);
        let empty = EmpiricalDistribution::from_points(&[], 1.0);
        assert!(matches!(moments(&empty, 0, 0), Err(Error::EmptyDistribution)));
        assert!(moments(&d, 4, 3).is_err());
    }

    #[test]
    fn monte_carlo_moments() {
        let d = EmpiricalDistribution::from_points(&gaussian_points(1_000_000, 7), 1.0);
        assert!((moments(&d, 2, 0).unwrap() - 1.0).abs() <= 0.01);
        assert!((moments(&d, 4, 0).unwrap() - 3.0).abs() <= 0.05);
        assert!((moments(&d, 0, 2).unwrap() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn monte_carlo_ks() {
        let d = EmpiricalDistribution::from_points(&gaussian_points(100_000, 11), 1.0);
        assert!(ks_statistic(&d, Axis::X).unwrap() <= 0.01);
        assert!(ks_statistic(&d, Axis::Y).unwrap() <= 0.01);
    }

    #[test]
    fn gaussian_rectangles() {
        let whole = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        assert!(1.0 - gaussian_rect(&whole) <= 1e-20);
        let half = Rect::new(0.0, 40.0, -40.0, 40.0).unwrap();
        assert!((gaussian_rect(&half) - 0.5).abs() < 1e-15);
        let unit = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let one_d = crate::numerics::integrate(
            |x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -1.0,
            1.0,
            1e-16,
            1e-15,
            100,
        )
        .value;
        assert!((gaussian_rect(&unit) - one_d * one_d).abs() < 1e-12);
        assert!((gaussian_rect(&unit) - 0.4660).abs() < 1e-4);
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rectangle_frequencies() {
        let d = EmpiricalDistribution::from_points(&[(0.5, 0.5), (2.0, 0.0), (-0.5, -1.0), (1.0, 1.0)], 1.0);
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(rectangle_prob(&d, &r), 0.75);
    }

    #[test]
    fn table_layout() {
        let d = EmpiricalDistribution::from_points(&gaussian_points(1000, 3), 1.0);
        let t = MomentTable::compute(&d).unwrap();
        assert_eq!(t.entries.len(), 28);
        assert_eq!(t.get(0, 0).unwrap().value, 1.0);
        assert_eq!(t.get(4, 0).unwrap().limit, 3.0);
    }
}
