//! Smooth cutoffs, their Mellin transforms, and least-squares fits of the
//! counting and moment sums against their predicted growth.

use crate::error::{Error, Result};
use crate::group_enum::EnumerationResult;
use crate::modsym::SymbolTable;
use crate::numerics::{integrate_complex, CompensatedSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `B(x)/(B(x)+B(1−x))` with `B(x) = e^{−1/x}` for `x > 0`.
pub fn transition(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        // ratio B(1−x)/B(x) = exp(1/x − 1/(1−x))
        1.0 / (1.0 + (1.0 / x - 1.0 / (1.0 - x)).exp())
    }
}

fn transition_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let e = 1.0 / x - 1.0 / (1.0 - x);
    if e.abs() > 700.0 {
        return 0.0;
    }
    let r = e.exp();
    let de = -1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x));
    -r * de / ((1.0 + r) * (1.0 + r))
}

/// Placement of the transition window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `[1 − 1/U, 1 + 1/U]`.
    Centered,
    /// `[1 − 2/U, 1]`: vanishes from `t = 1` on.
    Lower,
    /// `[1, 1 + 2/U]`: equals one up to `t = 1`.
    Upper,
}

/// Decreasing smooth cutoff with a transition window of width `2/U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    pub u: f64,
    pub variant: Variant,
}

impl SmoothCutoff {
    pub fn new(u: f64, variant: Variant) -> Result<Self> {
        if !(u >= 2.0) {
            return Err(Error::Domain(format!("cutoff parameter U must be at least 2, got {u}")));
        }
        Ok(SmoothCutoff { u, variant })
    }

    /// Transition window `[a, b]`.
    pub fn window(&self) -> (f64, f64) {
        let w = 2.0 / self.u;
        match self.variant {
            Variant::Centered => (1.0 - 1.0 / self.u, 1.0 + 1.0 / self.u),
            Variant::Lower => (1.0 - w, 1.0),
            Variant::Upper => (1.0, 1.0 + w),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        let (a, b) = self.window();
        1.0 - transition((t - a) / (b - a))
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        let (a, b) = self.window();
        -transition_derivative((t - a) / (b - a)) / (b - a)
    }

    /// `R_U(s) = ∫₀^∞ φ(t) t^{s−1} dt`, integrated by parts to
    /// `−(1/s) ∫ φ'(t) tˢ dt` over the window.
    pub fn mellin(&self, s: Complex64) -> Result<Complex64> {
        if !(s.re > 0.0) {
            return Err(Error::Domain(format!("Mellin transform needs Re(s) > 0, got {}", s.re)));
        }
        let (a, b) = self.window();
        let r = integrate_complex(|t| (s * t.ln()).exp() * self.phi_prime(t), a, b, 1e-16, 1e-12, 20_000);
        Ok(-r.value / s)
    }
}

pub fn phi(u: f64, t: f64) -> Result<f64> {
    Ok(SmoothCutoff::new(u, Variant::Centered)?.phi(t))
}

/// Lower and upper sandwich cutoffs.
pub fn phi_variants(u: f64) -> Result<(SmoothCutoff, SmoothCutoff)> {
    Ok((SmoothCutoff::new(u, Variant::Lower)?, SmoothCutoff::new(u, Variant::Upper)?))
}

pub fn mellin_ru(u: f64, s: Complex64) -> Result<Complex64> {
    SmoothCutoff::new(u, Variant::Centered)?.mellin(s)
}

/// `Σ_{f_n ≤ T} a_n`.
pub fn sharp_sum(values: &[f64], norms: &[f64], t: f64) -> f64 {
    values.iter().zip(norms).filter(|(_, &f)| f <= t).map(|(&a, _)| a).collect::<CompensatedSum>().value()
}

/// `Σ a_n φ(f_n/T)`; the data must be complete up to the end of the window.
pub fn smoothed_sum(values: &[f64], norms: &[f64], cutoff: &SmoothCutoff, t: f64, complete_to: f64) -> Result<f64> {
    let need = t * cutoff.window().1;
    if complete_to < need {
        return Err(Error::IncompleteEnumeration { have: complete_to, need });
    }
    Ok(values.iter().zip(norms).map(|(&a, &f)| a * cutoff.phi(f / t)).collect::<CompensatedSum>().value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    LinearT,
    TLogpow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub m: u32,
    pub n: u32,
    #[serde(rename = "U")]
    pub u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub leading_coeff: f64,
    pub paper_coeff: f64,
    /// `| |leading| − |predicted| | / |predicted|`.
    pub rel_dev: f64,
    /// Whether fitted and predicted coefficients have the same sign.
    pub sign_match: bool,
    #[serde(rename = "T_grid")]
    pub t_grid: Vec<f64>,
    /// Observed minus fitted value at each grid point.
    pub residuals: Vec<f64>,
    pub meta: FitMeta,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(Error::Domain(format!("fit grid needs at least 4 points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] <= 1.0 {
        return Err(Error::Domain("fit grid must be strictly increasing and above 1".into()));
    }
    Ok(())
}

/// Least squares through the origin of `observed` against `basis`.
pub fn fit_through_origin(basis: &[f64], observed: &[f64]) -> (f64, Vec<f64>) {
    let num: f64 = basis.iter().zip(observed).map(|(x, y)| x * y).collect::<CompensatedSum>().value();
    let den: f64 = basis.iter().map(|x| x * x).collect::<CompensatedSum>().value();
    let beta = num / den;
    let res = basis.iter().zip(observed).map(|(x, y)| y - beta * x).collect();
    (beta, res)
}

fn report(model: FitModel, basis: &[f64], observed: &[f64], predicted: f64, grid: &[f64], meta: FitMeta) -> FitReport {
    let (beta, residuals) = fit_through_origin(basis, observed);
    FitReport {
        model,
        leading_coeff: beta,
        paper_coeff: predicted,
        rel_dev: (beta.abs() - predicted.abs()).abs() / predicted.abs(),
        sign_match: beta.signum() == predicted.signum(),
        t_grid: grid.to_vec(),
        residuals,
        meta,
    }
}

/// Hyperbolic area of `Γ₀(N)\ℍ`: `(π/3) N ∏_{p | N} (1 + 1/p)`.
pub fn gamma0_volume(n: i64) -> f64 {
    let mut index = n as f64;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            index *= 1.0 + 1.0 / p as f64;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        index *= 1.0 + 1.0 / m as f64;
    }
    index * PI / 3.0
}

/// `2 log μ / (y vol)`.
pub fn counting_constant(en: &EnumerationResult) -> f64 {
    2.0 * en.context.log_mu / (en.z_ref.y * gamma0_volume(en.level))
}

/// Fit of `N(T)` against `β T`.
pub fn fit_counting(en: &EnumerationResult, grid: &[f64]) -> Result<FitReport> {
    check_grid(grid)?;
    if let Some(&last) = grid.last() {
        if last > en.t_max {
            return Err(Error::IncompleteEnumeration { have: en.t_max, need: last });
        }
    }
    let observed: Vec<f64> = grid.iter().map(|&t| en.count_up_to(t) as f64).collect();
    Ok(report(FitModel::LinearT, grid, &observed, counting_constant(en), grid, FitMeta { m: 0, n: 0, u: None }))
}

/// Same fit for explicit counts.
pub fn fit_counts(grid: &[f64], counts: &[f64], predicted: f64) -> Result<FitReport> {
    check_grid(grid)?;
    Ok(report(FitModel::LinearT, grid, counts, predicted, grid, FitMeta { m: 0, n: 0, u: None }))
}

/// `|N(T) − βT| / T^{7/8}` at each grid point.
pub fn residual_decay(rep: &FitReport) -> Vec<f64> {
    rep.t_grid.iter().zip(&rep.residuals).map(|(t, r)| r.abs() / t.powf(0.875)).collect()
}

fn double_factorial_ratio(m: u32) -> f64 {
    // (2m)! / (m! 2^m) = (2m − 1)!!
    (1..=m).map(|k| (2 * k - 1) as f64).product()
}

/// `(−8π²)^{m+n} ‖f‖^{2(m+n)} 2 log μ / (y vol^{m+n+1}) (2m−1)!! (2n−1)!!`.
pub fn moment_constant(m: u32, n: u32, f_norm_sq: f64, log_mu: f64, y: f64, vol: f64) -> f64 {
    let k = (m + n) as i32;
    (-8.0 * PI * PI * f_norm_sq).powi(k) * 2.0 * log_mu / (y * vol.powi(k + 1))
        * double_factorial_ratio(m)
        * double_factorial_ratio(n)
}

/// `Σ_{norm ≤ T} ⟨γ,α⟩^p ⟨γ,β⟩^q` at each grid point.
pub fn twisted_counts(p: u32, q: u32, en: &EnumerationResult, symbols: &SymbolTable, grid: &[f64]) -> Result<Vec<Complex64>> {
    let syms = symbols.for_reps(&en.reps)?;
    let mut out = Vec::with_capacity(grid.len());
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut i = 0;
    for &t in grid {
        while i < en.reps.len() && en.reps[i].norm <= t {
            let v = syms[i].alpha().powu(p) * syms[i].beta().powu(q);
            re.add(v.re);
            im.add(v.im);
            i += 1;
        }
        out.push(Complex64::new(re.value(), im.value()));
    }
    Ok(out)
}

/// Fit of `Σ ⟨γ,α⟩^{2m} ⟨γ,β⟩^{2n}` against `β T (log T)^{m+n}`.
pub fn moment_sum(
    m: u32,
    n: u32,
    en: &EnumerationResult,
    symbols: &SymbolTable,
    grid: &[f64],
    f_norm_sq: f64,
) -> Result<FitReport> {
    check_grid(grid)?;
    if m + n > 4 {
        return Err(Error::Domain(format!("moment order {m}+{n} exceeds 4")));
    }
    if let Some(&last) = grid.last() {
        if last > en.t_max {
            return Err(Error::IncompleteEnumeration { have: en.t_max, need: last });
        }
    }
    let sums = twisted_counts(2 * m, 2 * n, en, symbols, grid)?;
    let observed: Vec<f64> = sums.iter().map(|v| v.re).collect();
    let basis: Vec<f64> = grid.iter().map(|t| t * t.ln().powi((m + n) as i32)).collect();
    let predicted = moment_constant(m, n, f_norm_sq, en.context.log_mu, en.z_ref.y, gamma0_volume(en.level));
    Ok(report(FitModel::TLogpow, &basis, &observed, predicted, grid, FitMeta { m, n, u: None }))
}

/// `|Σ ⟨γ,α⟩^p ⟨γ,β⟩^q| / (T (log T)^{(p+q)/2})` for odd total exponent.
pub fn odd_moment_decay(p: u32, q: u32, en: &EnumerationResult, symbols: &SymbolTable, grid: &[f64]) -> Result<Vec<f64>> {
    let sums = twisted_counts(p, q, en, symbols, grid)?;
    Ok(grid.iter().zip(sums).map(|(t, s)| s.norm() / (t * t.ln().powf((p + q) as f64 / 2.0))).collect())
}

/// Permutations `σ` of `{1..2m}` with `σ(2j−1) < σ(2j)` for every `j`,
/// counted by enumeration.
pub fn pairing_count(m: usize) -> u64 {
    fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, m: usize, count: &mut u64) {
        let k = perm.len();
        if k == 2 * m {
            *count += 1;
            return;
        }
        for v in 0..2 * m {
            if used[v] || (k % 2 == 1 && v < perm[k - 1]) {
                continue;
            }
            used[v] = true;
            perm.push(v);
            rec(perm, used, m, count);
            perm.pop();
            used[v] = false;
        }
    }
    let mut count = 0;
    rec(&mut Vec::with_capacity(2 * m), &mut vec![false; 2 * m], m, &mut count);
    count
}

/// `(2m)!/2^m`.
pub fn pairing_count_formula(m: u32) -> u64 {
    let fact: u64 = (1..=2 * m as u64).product();
    fact >> m
}
