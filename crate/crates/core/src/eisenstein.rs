//! Hyperbolic Eisenstein series `Σ (Im γz/|γz|)^s` over `Γ₁\Γ` and their
//! modular-symbol twists, in the half-plane of absolute convergence.

use crate::error::{Error, Result};
use crate::group_enum::{CosetRep, EnumerationResult};
use crate::halfplane::HPoint;
use crate::modsym::{SymbolTable, SymbolValue};
use crate::numerics::{integrate, ordered_complex_sum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EisensteinValue {
    pub z: HPoint,
    pub s: Complex64,
    pub value: Complex64,
    pub truncation_t: f64,
    /// Heuristic: `ρ̂ y^σ T^{1−σ}/(σ−1)` with `ρ̂` the observed coset density.
    /// Not a certified bound.
    pub tail_estimate: f64,
    pub terms: usize,
}

/// Exponents `(m, n)` on `⟨γ, α⟩` and `⟨γ, β⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistOrder {
    pub m: u32,
    pub n: u32,
}

impl TwistOrder {
    pub const MAX_TOTAL: u32 = 8;

    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m + n > Self::MAX_TOTAL {
            return Err(Error::Domain(format!("twist order {m}+{n} exceeds {}", Self::MAX_TOTAL)));
        }
        Ok(TwistOrder { m, n })
    }

    /// `⟨γ, α⟩^m ⟨γ, β⟩^n`.
    pub fn factor(&self, sym: &SymbolValue) -> Complex64 {
        sym.alpha().powu(self.m) * sym.beta().powu(self.n)
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("Re(s) = {} is outside the region of convergence", s.re)));
    }
    Ok(())
}

fn tail_estimate(en: &EnumerationResult, z: HPoint, sigma: f64) -> f64 {
    let t = en.t_max;
    if t <= 0.0 || en.is_empty() {
        return 0.0;
    }
    let rho = en.len() as f64 / t;
    rho * z.y.powf(sigma) * t.powf(1.0 - sigma) / (sigma - 1.0)
}

fn weighted_sum<F>(reps: &[CosetRep], z: HPoint, s: Complex64, factor: F) -> Result<Complex64>
where
    F: Fn(&CosetRep) -> Result<Complex64> + Sync,
{
    let terms: Vec<Result<Complex64>> = reps
        .par_iter()
        .map(|r| {
            let w = r.weight_at(z);
            Ok(factor(r)? * (s * w.ln()).exp())
        })
        .collect();
    let terms: Vec<Complex64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(ordered_complex_sum(&terms))
}

/// Partial sum over every enumerated coset.
pub fn eval_plain(z: HPoint, s: Complex64, en: &EnumerationResult) -> Result<EisensteinValue> {
    eval_plain_over(z, s, en, &en.reps)
}

/// Partial sum restricted to the given cosets.
pub fn eval_plain_over(z: HPoint, s: Complex64, en: &EnumerationResult, reps: &[CosetRep]) -> Result<EisensteinValue> {
    check_s(s)?;
    let value = weighted_sum(reps, z, s, |_| Ok(Complex64::new(1.0, 0.0)))?;
    Ok(EisensteinValue {
        z,
        s,
        value,
        truncation_t: en.t_max,
        tail_estimate: tail_estimate(en, z, s.re),
        terms: reps.len(),
    })
}

pub fn eval_twisted(
    z: HPoint,
    s: Complex64,
    order: TwistOrder,
    en: &EnumerationResult,
    symbols: &SymbolTable,
) -> Result<EisensteinValue> {
    eval_twisted_over(z, s, order, en, &en.reps, symbols)
}

pub fn eval_twisted_over(
    z: HPoint,
    s: Complex64,
    order: TwistOrder,
    en: &EnumerationResult,
    reps: &[CosetRep],
    symbols: &SymbolTable,
) -> Result<EisensteinValue> {
    check_s(s)?;
    let value = weighted_sum(reps, z, s, |r| Ok(order.factor(symbols.require(&r.rep)?)))?;
    Ok(EisensteinValue {
        z,
        s,
        value,
        truncation_t: en.t_max,
        tail_estimate: tail_estimate(en, z, s.re),
        terms: reps.len(),
    })
}

/// Series with character `exp(ε_α ⟨γ,α⟩ + ε_β ⟨γ,β⟩)`.
pub fn eval_character(
    z: HPoint,
    s: Complex64,
    eps: (f64, f64),
    en: &EnumerationResult,
    symbols: &SymbolTable,
) -> Result<Complex64> {
    check_s(s)?;
    weighted_sum(&en.reps, z, s, |r| {
        let sym = symbols.require(&r.rep)?;
        Ok((sym.alpha() * eps.0 + sym.beta() * eps.1).exp())
    })
}

/// Which symbol the ε-deformation moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsAxis {
    Alpha,
    Beta,
}

impl EpsAxis {
    fn vector(self, eps: f64) -> (f64, f64) {
        match self {
            EpsAxis::Alpha => (eps, 0.0),
            EpsAxis::Beta => (0.0, eps),
        }
    }

    fn order(self, power: u32) -> TwistOrder {
        match self {
            EpsAxis::Alpha => TwistOrder { m: power, n: 0 },
            EpsAxis::Beta => TwistOrder { m: 0, n: power },
        }
    }
}

/// Relative gap between the central ε-difference of the deformed series and
/// the first twisted series.
pub fn eps_consistency(
    z: HPoint,
    s: Complex64,
    axis: EpsAxis,
    eps: f64,
    en: &EnumerationResult,
    symbols: &SymbolTable,
) -> Result<f64> {
    let plus = eval_character(z, s, axis.vector(eps), en, symbols)?;
    let minus = eval_character(z, s, axis.vector(-eps), en, symbols)?;
    let fd = (plus - minus) / (2.0 * eps);
    let tw = eval_twisted(z, s, axis.order(1), en, symbols)?.value;
    Ok((fd - tw).norm() / tw.norm())
}

/// Relative gap between the second ε-difference and the second twisted series.
pub fn eps_second_consistency(
    z: HPoint,
    s: Complex64,
    axis: EpsAxis,
    eps: f64,
    en: &EnumerationResult,
    symbols: &SymbolTable,
) -> Result<f64> {
    let plus = eval_character(z, s, axis.vector(eps), en, symbols)?;
    let zero = eval_character(z, s, (0.0, 0.0), en, symbols)?;
    let minus = eval_character(z, s, axis.vector(-eps), en, symbols)?;
    let fd = (plus - zero * 2.0 + minus) / (eps * eps);
    let tw = eval_twisted(z, s, axis.order(2), en, symbols)?.value;
    Ok((fd - tw).norm() / tw.norm())
}

/// Relative residual of `y²(∂ₓ² + ∂ᵧ²)E + s(1−s)E + s²E(·, s+2)` with the
/// Laplacian from the five-point stencil of step `h`.
pub fn pde_residual<F>(eval: F, z: HPoint, s: Complex64, h: f64) -> Result<f64>
where
    F: Fn(HPoint, Complex64) -> Result<Complex64>,
{
    check_s(s)?;
    if !(h > 0.0 && h < z.y) {
        return Err(Error::Domain(format!("step {h} must be positive and below Im z = {}", z.y)));
    }
    let at = |dx: f64, dy: f64| eval(HPoint { x: z.x + dx, y: z.y + dy }, s);
    let c = at(0.0, 0.0)?;
    let lap = (at(h, 0.0)? + at(-h, 0.0)? + at(0.0, h)? + at(0.0, -h)? - c * 4.0) / (h * h);
    let shifted = eval(z, s + 2.0)? * (s * s);
    let res = lap * (z.y * z.y) + c * (s * (1.0 - s)) + shifted;
    Ok(res.norm() / shifted.norm())
}

pub fn check_pde(z: HPoint, s: Complex64, h: f64, en: &EnumerationResult) -> Result<f64> {
    pde_residual(|p, s| Ok(eval_plain(p, s, en)?.value), z, s, h)
}

/// `∫∫_{1≤|z|≤μ} (y/|z|)³ dμ(z)` in polar coordinates, which is `2 log μ`.
pub fn annulus_integral(mu: f64) -> Result<f64> {
    if !(mu > 1.0) {
        return Err(Error::Domain(format!("annulus needs μ > 1, got {mu}")));
    }
    let angular = |_r: f64| integrate(|t: f64| t.sin(), 0.0, std::f64::consts::PI, 1e-15, 1e-15, 200).value;
    let r = integrate(|r: f64| angular(r) / r, 1.0, mu, 1e-12, 1e-14, 5000);
    Ok(r.value)
}

/// A one-form `f₁ dz + f₂ dz̄` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneForm {
    pub dz: Complex64,
    pub dzbar: Complex64,
}

impl OneForm {
    /// `Re(f dz)`.
    pub fn real_part(f: Complex64) -> Self {
        OneForm { dz: f / 2.0, dzbar: f.conj() / 2.0 }
    }

    /// `Im(f dz)`.
    pub fn imag_part(f: Complex64) -> Self {
        let two_i = Complex64::new(0.0, 2.0);
        OneForm { dz: f / two_i, dzbar: -f.conj() / two_i }
    }
}

/// Pointwise inner product `2y²(f₁ ḡ₁ + f₂ ḡ₂)`.
pub fn pairing(a: &OneForm, b: &OneForm, y: f64) -> Complex64 {
    (a.dz * b.dz.conj() + a.dzbar * b.dzbar.conj()) * (2.0 * y * y)
}
