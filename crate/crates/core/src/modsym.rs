//! Modular symbols `⟨γ, f⟩ = −2πi ∫_{z0}^{γ z0} f(z) dz`, the generator with
//! vanishing symbol, the period lattice and the Petersson norm.

use crate::cuspform::QExpansion;
use crate::error::{Error, Result};
use crate::group_enum::{CosetRep, EnumerationResult};
use crate::halfplane::{act, analyze_hyperbolic, GroupElement, HPoint, HyperbolicContext};
use crate::numerics::{ext_gcd, integrate, integrate_complex, CompensatedSum, ComplexSum};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub gamma: GroupElement,
    pub value: Complex64,
    pub abs_err: f64,
}

impl SymbolValue {
    /// `⟨γ, Re(f dz)⟩`.
    pub fn alpha(&self) -> Complex64 {
        I * self.value.im
    }

    /// `⟨γ, Im(f dz)⟩`.
    pub fn beta(&self) -> Complex64 {
        -I * self.value.re
    }

    /// `∫_{z0}^{γ z0} f(z) dz`.
    pub fn integral(&self) -> Complex64 {
        I * self.value / (2.0 * PI)
    }
}

/// Terms needed at lower-left entry `c` so that `4 x^{M+1}/(1−x) ≤ 10^{−D}`
/// with `x = e^{−2π/c}`.
pub fn symbol_terms(c: i64, digits: u32) -> usize {
    let c = c.unsigned_abs() as f64;
    let lx = -2.0 * PI / c;
    let one_minus = -lx.exp_m1();
    let target = -(digits as f64) * std::f64::consts::LN_10;
    // (M+1) lx + ln(4/(1−x)) ≤ target
    let m = ((target - (4.0 / one_minus).ln()) / lx - 1.0).ceil();
    m.max(1.0) as usize
}

fn symbol_tail(c: i64, m: usize) -> f64 {
    let lx = -2.0 * PI / c as f64;
    4.0 * (lx * (m as f64 + 1.0)).exp() / -lx.exp_m1()
}

/// Symbol of `gamma` from the two-point formula at the base point
/// `(−d+i)/c`, which puts both endpoints at height `1/c`.
pub fn symbol(gamma: &GroupElement, q: &QExpansion, digits: u32) -> Result<SymbolValue> {
    let (a, c, d) = (gamma.a(), gamma.c(), gamma.d());
    if c == 0 {
        return Ok(SymbolValue { gamma: *gamma, value: Complex64::new(0.0, 0.0), abs_err: 0.0 });
    }
    let m = symbol_terms(c, digits);
    if m > q.len() {
        return Err(Error::InsufficientCoefficients { needed: m, available: q.len() });
    }
    let cu = c as usize;
    let table: Vec<Complex64> = (0..cu).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / c as f64)).collect();
    let ra = a.rem_euclid(c) as usize;
    let rd = (-d).rem_euclid(c) as usize;
    let (mut ka, mut kd) = (0usize, 0usize);
    let step = -2.0 * PI / c as f64;
    let mut sum = ComplexSum::new();
    let mut mag = CompensatedSum::new();
    for n in 1..=m {
        ka += ra;
        if ka >= cu {
            ka -= cu;
        }
        kd += rd;
        if kd >= cu {
            kd -= cu;
        }
        let an = q.a(n);
        if an == 0 {
            continue;
        }
        let w = an as f64 / n as f64 * (step * n as f64).exp();
        sum.add((table[kd] - table[ka]) * w);
        mag.add(2.0 * w.abs());
    }
    let rounding = 8.0 * f64::EPSILON * mag.value();
    Ok(SymbolValue { gamma: *gamma, value: sum.value(), abs_err: symbol_tail(c, m) + rounding })
}

/// `−2πi ∫ f dz` along the straight segment from `z_start` to `γ z_start`,
/// by adaptive quadrature on the q-series.
pub fn path_integral_symbol(gamma: &GroupElement, q: &QExpansion, z_start: HPoint, tol: f64) -> Result<Complex64> {
    let z_end = act(gamma, z_start);
    let y_min = z_start.y.min(z_end.y);
    let m = QExpansion::terms_needed(y_min, tol * 1e-3);
    if m > q.len() {
        return Err(Error::InsufficientCoefficients { needed: m, available: q.len() });
    }
    let za = z_start.to_complex();
    let dz = z_end.to_complex() - za;
    let r = integrate_complex(
        |t| {
            let z = za + dz * t;
            q.eval_terms(HPoint { x: z.re, y: z.im }, m).value * dz
        },
        0.0,
        1.0,
        tol * 1e-2,
        1e-13,
        4000,
    );
    Ok(-2.0 * PI * I * r.value)
}

/// All canonical elements of `Γ₀(N)` with every entry at most `bound` in
/// absolute value, ordered by `(a²+b²)(c²+d²)` and then entries.
pub fn gamma0_pool(n: i64, bound: i64) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for b in -bound..=bound {
        out.push(GroupElement::new(1, b, 0, 1).unwrap());
    }
    let mut c = n;
    while c <= bound {
        for d in -bound..=bound {
            let (g, x, _) = ext_gcd(d, c);
            if g != 1 {
                continue;
            }
            let a0 = x.rem_euclid(c);
            let mut a = a0 - ((a0 + bound) / c) * c;
            while a <= bound {
                let num = a as i128 * d as i128 - 1;
                if num % c as i128 == 0 {
                    let b = (num / c as i128) as i64;
                    if b.abs() <= bound {
                        out.push(GroupElement::new(a, b, c, d).unwrap());
                    }
                }
                a += c;
            }
        }
        c += n;
    }
    out.sort_by_key(|m| (m.norm_sq_at_i(), m.entries()));
    out
}

/// First pair `(g, h)` of hyperbolic pool elements, in pool order, whose
/// commutator `g h g⁻¹ h⁻¹` is hyperbolic; the commutator has symbol zero.
pub fn build_gamma1(pool: &[GroupElement]) -> Result<HyperbolicContext> {
    let mut sorted: Vec<GroupElement> = pool.to_vec();
    sorted.sort_by_key(|m| (m.norm_sq_at_i(), m.entries()));
    sorted.dedup();
    let hyp: Vec<GroupElement> = sorted.into_iter().filter(|m| m.is_hyperbolic()).collect();
    for i in 0..hyp.len() {
        for j in (i + 1)..hyp.len() {
            let (g, h) = (hyp[i], hyp[j]);
            let comm = g.mul(&h).and_then(|x| x.mul(&g.inverse())).and_then(|x| x.mul(&h.inverse()));
            if let Ok(k) = comm {
                if k.is_hyperbolic() {
                    return analyze_hyperbolic(&k);
                }
            }
        }
    }
    Err(Error::NoSuitablePair)
}

/// Rank-2 lattice in `ℂ`, Gauss-reduced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodLattice {
    pub w1: Complex64,
    pub w2: Complex64,
    pub covolume: f64,
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    (u.conj() * v).im
}

fn gauss_reduce(mut u: Complex64, mut v: Complex64) -> (Complex64, Complex64) {
    for _ in 0..10_000 {
        if u.norm_sqr() > v.norm_sqr() {
            std::mem::swap(&mut u, &mut v);
        }
        let k = ((u.conj() * v).re / u.norm_sqr()).round();
        if k == 0.0 {
            break;
        }
        v -= u * k;
    }
    if u.norm_sqr() > v.norm_sqr() {
        std::mem::swap(&mut u, &mut v);
    }
    (u, v)
}

/// Shortest representative of `w` modulo the lattice spanned by `u, v`.
fn residual(u: Complex64, v: Complex64, w: Complex64) -> Complex64 {
    let det = cross(u, v);
    let x = cross(w, v) / det;
    let y = cross(u, w) / det;
    let base = w - u * x.round() - v * y.round();
    let mut best = base;
    for i in -1..=1 {
        for j in -1..=1 {
            let cand = base + u * i as f64 + v * j as f64;
            if cand.norm_sqr() < best.norm_sqr() {
                best = cand;
            }
        }
    }
    best
}

impl PeriodLattice {
    fn from_basis(u: Complex64, v: Complex64) -> Self {
        let (w1, w2) = gauss_reduce(u, v);
        PeriodLattice { w1, w2, covolume: cross(w1, w2).abs() }
    }

    /// Distance from `w` to the nearest lattice point.
    pub fn distance(&self, w: Complex64) -> f64 {
        residual(self.w1, self.w2, w).norm()
    }

    /// Real coordinates of `w` in the basis `(w1, w2)`.
    pub fn coordinates(&self, w: Complex64) -> (f64, f64) {
        let det = cross(self.w1, self.w2);
        (cross(w, self.w2) / det, cross(self.w1, w) / det)
    }
}

/// Smallest lattice containing every point up to `tol`.
pub fn lattice_from_points(points: &[Complex64], tol: f64) -> Result<PeriodLattice> {
    let mut pts: Vec<Complex64> = points.iter().copied().filter(|p| p.norm() > tol).collect();
    pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
    let first = *pts.first().ok_or_else(|| Error::DegenerateLattice("no nonzero values".into()))?;
    let second = pts
        .iter()
        .copied()
        .find(|p| cross(first, *p).abs() / first.norm() > tol)
        .ok_or_else(|| Error::DegenerateLattice("values are collinear".into()))?;
    let (mut u, mut v) = gauss_reduce(first, second);
    let mut steps = 0usize;
    for &p in &pts {
        let mut r = residual(u, v, p);
        while r.norm() > tol {
            steps += 1;
            if steps > 10_000 {
                return Err(Error::DegenerateLattice("values do not close up into a lattice".into()));
            }
            let mut three = [u, v, r];
            three.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            let a0 = three[0];
            let (bi, _) = three
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, b)| cross(a0, **b).abs() / a0.norm() > tol)
                .ok_or_else(|| Error::DegenerateLattice("values are collinear".into()))?;
            let ci = if bi == 1 { 2 } else { 1 };
            let (nu, nv) = gauss_reduce(a0, three[bi]);
            u = nu;
            v = nv;
            r = residual(u, v, three[ci]);
        }
    }
    Ok(PeriodLattice::from_basis(u, v))
}

/// Lattice spanned by symbol values that clear ten times their error.
pub fn period_lattice(symbols: &[SymbolValue], tol: f64) -> Result<PeriodLattice> {
    let pts: Vec<Complex64> = symbols.iter().filter(|s| s.value.norm() > 10.0 * s.abs_err).map(|s| s.value).collect();
    if pts.len() < 10 {
        return Err(Error::DegenerateLattice(format!("only {} usable values", pts.len())));
    }
    lattice_from_points(&pts, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeterssonMethod {
    LatticeArea,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeterssonNorm {
    /// `‖f‖²`.
    pub value: f64,
    pub method: PeterssonMethod,
}

/// `‖f‖² = covolume / 4π²`, for a degree-one parametrization.
pub fn petersson_norm(lattice: &PeriodLattice) -> PeterssonNorm {
    PeterssonNorm { value: lattice.covolume / (4.0 * PI * PI), method: PeterssonMethod::LatticeArea }
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// `∫ y²|f|² dμ` over `Γ₀(p)\ℍ` for a newform of prime level `p`.
///
/// Uses the coset representatives `1, S Tʲ` of `Γ₀(p)` in `SL₂(ℤ)` and the
/// Fricke symmetry to fold everything onto the standard fundamental domain:
/// the integrand there is `h(z) + Σ_j h((z+j)/p)` with `h = y²|f|²`. Above
/// height one both pieces integrate in closed form.
pub fn petersson_quadrature(q: &QExpansion, rel_tol: f64) -> Result<PeterssonNorm> {
    let p = q.level();
    if !is_prime(p) {
        return Err(Error::Domain(format!("quadrature norm needs prime level, got {p}")));
    }
    let pf = p as f64;
    let y_low = 3f64.sqrt() / 2.0 / pf;
    let m = QExpansion::terms_needed(y_low, 1e-18);
    if m > q.len() {
        return Err(Error::InsufficientCoefficients { needed: m, available: q.len() });
    }
    let strip: f64 = {
        let mut s = CompensatedSum::new();
        for n in 1..=q.len() {
            let a2 = (q.a(n) * q.a(n)) as f64;
            let nf = n as f64;
            s.add(a2 * (-4.0 * PI * nf).exp() / (4.0 * PI * nf));
            s.add(a2 * (-4.0 * PI * nf / pf).exp() / (4.0 * PI * nf));
        }
        s.value()
    };
    let h = |x: f64, y: f64| -> f64 { q.eval_terms(HPoint { x, y }, m).value.norm_sqr() };
    // The integrand is even in x for real coefficients.
    let integrand = |x: f64, y: f64| -> f64 {
        let mut s = h(x, y);
        for j in 0..p {
            s += h((x + j as f64) / pf, y / pf) / (pf * pf);
        }
        s
    };
    // y²|f|² dμ = |f|² dx dy; the folded pieces carry the Jacobian 1/p².
    let inner = |x: f64| -> f64 {
        let lo = (1.0 - x * x).sqrt();
        integrate(|y| integrand(x, y), lo, 1.0, 1e-16, rel_tol * 1e-2, 200).value
    };
    let outer = integrate(inner, 0.0, 0.5, 1e-16, rel_tol, 200);
    Ok(PeterssonNorm { value: 2.0 * outer.value + strip, method: PeterssonMethod::Quadrature })
}

/// Normalized symbols for one coset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedSymbol {
    pub gamma: GroupElement,
    /// `√(vol/log(norm²)) ∫ f dz / ‖f‖`, zero when `norm ≤ 1`.
    pub bracket: Complex64,
    /// `√(vol/(8π²‖f‖²)) ⟨γ, f⟩`.
    pub tilde: Complex64,
    pub norm: f64,
}

pub fn normalize(sym: &SymbolValue, norm: f64, vol: f64, pnorm: &PeterssonNorm) -> NormalizedSymbol {
    let f_norm = pnorm.value.sqrt();
    let tilde = sym.value * (vol / (8.0 * PI * PI * pnorm.value)).sqrt();
    let bracket = if norm <= 1.0 {
        Complex64::new(0.0, 0.0)
    } else {
        sym.integral() * ((vol / (norm * norm).ln()).sqrt() / f_norm)
    };
    NormalizedSymbol { gamma: sym.gamma, bracket, tilde, norm }
}

/// Symbols keyed by canonical coset representative.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    pub digits: u32,
    map: HashMap<GroupElement, SymbolValue>,
}

impl SymbolTable {
    pub fn new(digits: u32) -> Self {
        SymbolTable { digits, map: HashMap::new() }
    }

    pub fn get(&self, rep: &GroupElement) -> Option<&SymbolValue> {
        self.map.get(rep)
    }

    pub fn require(&self, rep: &GroupElement) -> Result<&SymbolValue> {
        self.map.get(rep).ok_or(Error::MissingSymbols(rep.entries()))
    }

    pub fn insert(&mut self, s: SymbolValue) {
        self.map.insert(s.gamma, s);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Values in the order of the given representatives.
    pub fn for_reps(&self, reps: &[CosetRep]) -> Result<Vec<SymbolValue>> {
        reps.iter().map(|r| self.require(&r.rep).copied()).collect()
    }

    /// Computes the missing symbols of an enumeration, on the short member of
    /// each coset; the symbol is constant on cosets since `⟨γ₁, f⟩ = 0`.
    pub fn fill(&mut self, en: &EnumerationResult, q: &QExpansion) -> Result<usize> {
        let todo: Vec<&CosetRep> = en.reps.iter().filter(|r| !self.map.contains_key(&r.rep)).collect();
        let digits = self.digits;
        let fresh: Vec<Result<SymbolValue>> = todo
            .par_iter()
            .map(|r| symbol(&r.short, q, digits).map(|s| SymbolValue { gamma: r.rep, ..s }))
            .collect();
        let n = fresh.len();
        for s in fresh {
            self.insert(s?);
        }
        Ok(n)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<&SymbolValue> = self.map.values().collect();
        rows.sort_by_key(|s| s.gamma.entries());
        let mut buf = Vec::new();
        writeln!(buf, "# modsym cache v1; D={}", self.digits)?;
        for s in rows {
            let e = s.gamma.entries();
            writeln!(buf, "{},{},{},{},{:e},{:e},{:e}", e[0], e[1], e[2], e[3], s.value.re, s.value.im, s.abs_err)?;
        }
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty symbol cache".into()))?;
        let digits = header
            .strip_prefix("# modsym cache v1; D=")
            .and_then(|d| d.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::Format(format!("bad symbol cache header {header:?}")))?;
        let mut table = SymbolTable::new(digits);
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Format(format!("symbol cache line {}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad());
            }
            let mut e = [0i64; 4];
            for k in 0..4 {
                e[k] = f[k].parse().map_err(|_| bad())?;
            }
            let re: f64 = f[4].parse().map_err(|_| bad())?;
            let im: f64 = f[5].parse().map_err(|_| bad())?;
            let abs_err: f64 = f[6].parse().map_err(|_| bad())?;
            let gamma = GroupElement::from_entries(e).map_err(|_| bad())?;
            if gamma.entries() != e {
                return Err(bad());
            }
            table.insert(SymbolValue { gamma, value: Complex64::new(re, im), abs_err });
        }
        Ok(table)
    }
}

/// The member `g γ₁ᵏ h` (`|k| ≤ 2`) with the smallest lower-left entry; its
/// symbol equals `⟨g⟩ + ⟨h⟩`.
pub fn short_product(g: &GroupElement, h: &GroupElement, gamma1: &GroupElement) -> Result<GroupElement> {
    let mut best: Option<GroupElement> = None;
    for k in -2..=2 {
        if let Ok(m) = gamma1.pow(k).and_then(|p| g.mul(&p)).and_then(|p| p.mul(h)) {
            if best.is_none_or(|b| m.c().unsigned_abs() < b.c().unsigned_abs()) {
                best = Some(m);
            }
        }
    }
    best.ok_or(Error::Overflow("product of coset members"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuspform::eta_expansion_11;

    fn ge(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn translations_have_zero_symbol() {
        let q = eta_expansion_11(100).unwrap();
        for b in [0, 1, 5, -7] {
            let s = symbol(&ge(1, b, 0, 1), &q, 10).unwrap();
            assert_eq!(s.value, Complex64::new(0.0, 0.0));
            assert_eq!(s.abs_err, 0.0);
        }
    }

    #[test]
    fn term_count_meets_digits() {
        for c in [11, 110, 5000] {
            let m = symbol_terms(c, 10);
            assert!(symbol_tail(c, m) <= 1e-10);
            assert!(symbol_tail(c, m - 1) > 1e-10);
        }
    }

    #[test]
    fn inversion_negates() {
        let q = eta_expansion_11(2000).unwrap();
        let g = ge(4, 1, 11, 3);
        let a = symbol(&g, &q, 12).unwrap();
        let b = symbol(&g.inverse(), &q, 12).unwrap();
        assert!((a.value + b.value).norm() <= a.abs_err + b.abs_err);
        assert!(a.value.norm() > 0.1);
    }

    #[test]
    fn two_point_formula_matches_path_quadrature() {
        let q = eta_expansion_11(20000).unwrap();
        for g in [ge(4, 1, 11, 3), ge(2, -1, 11, -5), ge(1, 0, 11, 1)] {
            let s = symbol(&g, &q, 12).unwrap();
            let p = path_integral_symbol(&g, &q, HPoint::new(0.0, 3.0).unwrap(), 1e-9).unwrap();
            assert!((s.value - p).norm() <= 1e-6, "{g}: {} vs {}", s.value, p);
        }
    }

    #[test]
    fn parabolic_pool_has_no_pair() {
        assert!(matches!(build_gamma1(&[ge(1, 1, 0, 1)]), Err(Error::NoSuitablePair)));
    }

    #[test]
    fn lattice_extraction() {
        let w1 = Complex64::new(1.0, 0.0);
        let w2 = Complex64::new(0.3, 1.1);
        assert!(matches!(lattice_from_points(&[w1, w1 * 2.0], 1e-9), Err(Error::DegenerateLattice(_))));
        let l = lattice_from_points(&[w1, w2, w1 + w2, w1 * 3.0 - w2], 1e-9).unwrap();
        assert!((l.covolume - 1.1).abs() < 1e-12);
        assert!(l.w1.norm() <= l.w2.norm() + 1e-12);
        assert!(l.w2.norm() <= (l.w1 + l.w2).norm() + 1e-12);
        assert!(l.w2.norm() <= (l.w1 - l.w2).norm() + 1e-12);
        // half-step refinement
        let l = lattice_from_points(&[w1 * 2.0, w2, w1 * 3.0 + w2 * 2.0], 1e-9).unwrap();
        assert!((l.covolume - 1.1).abs() < 1e-12);
    }

    #[test]
    fn norm_formula_identity() {
        let l = PeriodLattice::from_basis(Complex64::new(2.0 * PI, 0.0), Complex64::new(0.0, 2.0 * PI));
        assert!((petersson_norm(&l).value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_conventions() {
        let pn = PeterssonNorm { value: 1.0, method: PeterssonMethod::LatticeArea };
        let s = SymbolValue { gamma: GroupElement::IDENTITY, value: Complex64::new(0.7, -0.2), abs_err: 0.0 };
        assert_eq!(normalize(&s, 1.0, 4.0 * PI, &pn).bracket, Complex64::new(0.0, 0.0));
        let zero = SymbolValue { value: Complex64::new(0.0, 0.0), ..s };
        assert_eq!(normalize(&zero, 5.0, 4.0 * PI, &pn).bracket.norm(), 0.0);
        let a = normalize(&s, 5.0, 4.0 * PI, &pn);
        let b = normalize(&s, 5.0, 4.0 * PI, &PeterssonNorm { value: 4.0, ..pn });
        assert!((a.bracket.norm() - 2.0 * b.bracket.norm()).abs() < 1e-15);
        let ratio = a.bracket.norm() / (a.tilde.norm() / 5f64.ln().sqrt());
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_beta_split() {
        let s = SymbolValue { gamma: GroupElement::IDENTITY, value: Complex64::new(0.7, -0.2), abs_err: 0.0 };
        let int = s.integral();
        assert!((s.alpha() - (-2.0 * PI * I * int.re)).norm() < 1e-14);
        assert!((s.beta() - (-2.0 * PI * I * int.im)).norm() < 1e-14);
        assert_eq!(s.alpha().re, 0.0);
        assert_eq!(s.beta().re, 0.0);
    }
}
