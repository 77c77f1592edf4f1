//! Matrix algebra on the upper half-plane: exact group elements, their
//! real conjugates, the Möbius action and the coset weight/norm functions.

use crate::error::{Error, Result};
use crate::numerics::Dd;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("point {x}+{y}i is not in the upper half-plane")));
        }
        Ok(HPoint { x, y })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn abs(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.x, self.y)
    }
}

/// Anything that acts on the half-plane through real entries `a, b, c, d`.
pub trait Mobius {
    fn entries_f64(&self) -> [f64; 4];
}

/// Real 2×2 matrix, expected to have determinant one up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMatrix {
    pub const IDENTITY: RealMatrix = RealMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        RealMatrix { a, b, c, d }
    }

    pub fn diag(l: f64) -> Self {
        RealMatrix { a: l, b: 0.0, c: 0.0, d: 1.0 / l }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &RealMatrix) -> RealMatrix {
        RealMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> RealMatrix {
        RealMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn max_abs_diff(&self, o: &RealMatrix) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
            .max((self.d - o.d).abs())
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> f64 {
        let s = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (s * s - 4.0 * det * det).max(0.0);
        (0.5 * (s + disc.sqrt())).sqrt()
    }

    /// Image of a boundary point; `None` for the point at infinity.
    pub fn act_boundary(&self, x: f64) -> Option<f64> {
        let den = self.c * x + self.d;
        if den == 0.0 {
            None
        } else {
            Some((self.a * x + self.b) / den)
        }
    }
}

impl Mobius for RealMatrix {
    fn entries_f64(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Integer matrix of determinant one in projective canonical sign:
/// `c > 0`, or `c == 0` and `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };

    /// Builds the canonical representative of `±(a b; c d)`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::BadDeterminant(det));
        }
        let m = GroupElement { a, b, c, d };
        if m.is_canonical() {
            Ok(m)
        } else {
            let n = |x: i64| x.checked_neg().ok_or(Error::Overflow("sign normalization"));
            Ok(GroupElement { a: n(a)?, b: n(b)?, c: n(c)?, d: n(d)? })
        }
    }

    pub fn from_entries(e: [i64; 4]) -> Result<Self> {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn is_canonical(&self) -> bool {
        self.c > 0 || (self.c == 0 && self.a > 0)
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.d, -self.b, -self.c, self.a).expect("inverse has determinant one")
    }

    /// Checked product `self * o`, returned in canonical sign.
    pub fn mul(&self, o: &GroupElement) -> Result<GroupElement> {
        let ov = || Error::Overflow("matrix product");
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).map_err(|_| ov())
        };
        GroupElement::new(
            dot(self.a, o.a, self.b, o.c)?,
            dot(self.a, o.b, self.b, o.d)?,
            dot(self.c, o.a, self.d, o.c)?,
            dot(self.c, o.b, self.d, o.d)?,
        )
    }

    pub fn pow(&self, k: i64) -> Result<GroupElement> {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut acc = GroupElement::IDENTITY;
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// `(a² + b²)(c² + d²)`, the squared norm at `i`, exactly.
    pub fn norm_sq_at_i(&self) -> u128 {
        let sq = |x: i64| (x as i128 * x as i128) as u128;
        (sq(self.a) + sq(self.b)) * (sq(self.c) + sq(self.d))
    }

    /// Lexicographic order on absolute values of the entries.
    pub fn abs_key(&self) -> [u64; 4] {
        [self.a.unsigned_abs(), self.b.unsigned_abs(), self.c.unsigned_abs(), self.d.unsigned_abs()]
    }

    pub fn max_abs_entry(&self) -> u64 {
        *self.abs_key().iter().max().unwrap()
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

impl Mobius for GroupElement {
    fn entries_f64(&self) -> [f64; 4] {
        [self.a as f64, self.b as f64, self.c as f64, self.d as f64]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Möbius action `z ↦ (az+b)/(cz+d)` of a determinant-one matrix.
/// Same Möbius map, opposite sign.
impl std::ops::Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

pub fn act<M: Mobius + ?Sized>(m: &M, z: HPoint) -> HPoint {
    let [a, b, c, d] = m.entries_f64();
    let zc = z.to_complex();
    let num = zc * a + b;
    let den = zc * c + d;
    let den2 = den.norm_sqr();
    HPoint { x: (num * den.conj()).re / den2, y: z.y / den2 }
}

/// `Im(mz)/|mz|`, evaluated from the image point.
pub fn weight<M: Mobius + ?Sized>(m: &M, z: HPoint) -> f64 {
    let w = act(m, z);
    w.y / w.abs()
}

/// `y/(|az+b||cz+d|)`, the same quantity through the norm.
pub fn weight_via_norm<M: Mobius + ?Sized>(m: &M, z: HPoint) -> f64 {
    z.y / norm_at(m, z)
}

/// `|az+b|·|cz+d|`.
pub fn norm_at<M: Mobius + ?Sized>(m: &M, z: HPoint) -> f64 {
    let [a, b, c, d] = m.entries_f64();
    let zc = z.to_complex();
    (zc * a + b).norm() * (zc * c + d).norm()
}

/// A hyperbolic element together with the real conjugation that turns it
/// into `diag(√μ, 1/√μ)`.
#[derive(Debug, Clone)]
pub struct HyperbolicContext {
    /// Canonical-sign generator with multiplier `mu > 1`.
    pub gamma1: GroupElement,
    /// Trace of `gamma1` as stored (sign follows the canonical representative).
    pub trace: i64,
    pub mu: f64,
    pub log_mu: f64,
    pub sqrt_mu: f64,
    /// Sends `p_plus ↦ ∞` and `p_minus ↦ 0`.
    pub g: RealMatrix,
    pub g_inv: RealMatrix,
    /// `(p_minus, p_plus)`, with `p_minus < p_plus`.
    pub fixed_points: (f64, f64),
    /// `p_plus - p_minus`.
    pub axis_width: f64,
    g_dd: [Dd; 4],
    g_inv_dd: [Dd; 4],
    p_dd: (Dd, Dd),
}

impl PartialEq for HyperbolicContext {
    fn eq(&self, other: &Self) -> bool {
        self.gamma1 == other.gamma1
    }
}

/// Diagonalizes a hyperbolic element, replacing it by its inverse if needed
/// so that the multiplier exceeds one.
pub fn analyze_hyperbolic(g1: &GroupElement) -> Result<HyperbolicContext> {
    if !g1.is_hyperbolic() {
        return Err(Error::NotHyperbolic { trace: g1.trace() });
    }
    let sign = g1.trace().signum();
    let [a, b, c, d] = g1.entries().map(|x| x * sign);
    let _ = b;
    // c != 0 for integral hyperbolic elements: c = 0 forces a = d = ±1.
    let t = (a + d) as i128;
    let disc = Dd::from_i128(t * t - 4);
    let sq = disc.sqrt();
    let amd = Dd::from_i128((a - d) as i128);
    let two_c = Dd::from_i128(2 * c as i128);
    let r1 = amd.sub(sq).div(two_c);
    let r2 = amd.add(sq).div(two_c);
    let (p_minus, p_plus) = if r1.to_f64() < r2.to_f64() { (r1, r2) } else { (r2, r1) };
    // Eigenvalue on the eigenvector (p_plus, 1).
    let lambda = Dd::from_i128(c as i128).mul(p_plus).add(Dd::from_i128(d as i128));
    if lambda.to_f64() < 1.0 {
        return analyze_hyperbolic(&g1.inverse());
    }
    let width = p_plus.sub(p_minus);
    let s = width.sqrt();
    let one = Dd::from_f64(1.0);
    let g_dd = [one.neg().div(s), p_minus.div(s), one.div(s), p_plus.neg().div(s)];
    let g_inv_dd = [p_plus.neg().div(s), p_minus.neg().div(s), one.neg().div(s), one.neg().div(s)];
    let to_m = |e: [Dd; 4]| RealMatrix::new(e[0].to_f64(), e[1].to_f64(), e[2].to_f64(), e[3].to_f64());
    let lam = lambda.to_f64();
    let log_mu = 2.0 * lam.ln();
    Ok(HyperbolicContext {
        gamma1: *g1,
        trace: g1.trace(),
        mu: lam * lam,
        log_mu,
        sqrt_mu: lam,
        g: to_m(g_dd),
        g_inv: to_m(g_inv_dd),
        fixed_points: (p_minus.to_f64(), p_plus.to_f64()),
        axis_width: width.to_f64(),
        g_dd,
        g_inv_dd,
        p_dd: (p_minus, p_plus),
    })
}

impl HyperbolicContext {
    /// `g · m · g⁻¹` evaluated in double-double and rounded.
    pub fn conjugate(&self, m: &GroupElement) -> RealMatrix {
        let e = m.entries().map(|x| Dd::from_i128(x as i128));
        let g = &self.g_dd;
        let gi = &self.g_inv_dd;
        // g * m
        let t = [
            g[0].mul(e[0]).add(g[1].mul(e[2])),
            g[0].mul(e[1]).add(g[1].mul(e[3])),
            g[2].mul(e[0]).add(g[3].mul(e[2])),
            g[2].mul(e[1]).add(g[3].mul(e[3])),
        ];
        RealMatrix::new(
            t[0].mul(gi[0]).add(t[1].mul(gi[2])).to_f64(),
            t[0].mul(gi[1]).add(t[1].mul(gi[3])).to_f64(),
            t[2].mul(gi[0]).add(t[3].mul(gi[2])).to_f64(),
            t[2].mul(gi[1]).add(t[3].mul(gi[3])).to_f64(),
        )
    }

    /// `g · γ₁ · g⁻¹` with `γ₁` taken in positive-trace sign.
    pub fn diagonal_form(&self) -> RealMatrix {
        let m = self.conjugate(&self.gamma1);
        if self.trace < 0 {
            RealMatrix::new(-m.a, -m.b, -m.c, -m.d)
        } else {
            m
        }
    }

    /// Conjugated coordinates to original coordinates.
    pub fn to_original(&self, z: HPoint) -> HPoint {
        act(&self.g_inv, z)
    }

    pub fn to_conjugated(&self, u: HPoint) -> HPoint {
        act(&self.g, u)
    }

    /// `m(z0)` for an integer matrix, in the cancellation-free form
    /// `a/c - 1/(c(c z0 + d))`.
    pub fn image_point(&self, m: &GroupElement, z0: HPoint) -> HPoint {
        let [a, b, c, d] = m.entries_f64();
        if c == 0.0 {
            return HPoint { x: (a * z0.x + b) / d, y: z0.y };
        }
        let den = Complex64::new(c * z0.x + d, c * z0.y);
        let inv = (den * c).inv();
        HPoint { x: a / c - inv.re, y: -inv.im }
    }

    /// Distances `|u - p_minus|`, `|u - p_plus|` with the fixed points in
    /// double-double so that points close to the boundary keep precision.
    fn fixed_point_distances(&self, u: HPoint) -> (f64, f64) {
        let dx = |p: Dd| Dd::from_f64(u.x).sub(p).to_f64();
        (dx(self.p_dd.0).hypot(u.y), dx(self.p_dd.1).hypot(u.y))
    }

    /// `ln |g(u)|`.
    pub fn log_abs_conjugated(&self, u: HPoint) -> f64 {
        let (dm, dp) = self.fixed_point_distances(u);
        dm.ln() - dp.ln()
    }

    /// Norm of a coset at the conjugated reference point `z_ref`, i.e.
    /// `norm_at(g m g⁻¹, z_ref)`, computed in original coordinates:
    /// `y_ref · |u − p₊||u − p₋| / (Im u · (p₊ − p₋))` with `u = m(g⁻¹ z_ref)`.
    pub fn norm_of(&self, m: &GroupElement, z_ref: HPoint) -> f64 {
        let z0 = self.to_original(z_ref);
        self.norm_of_point(self.image_point(m, z0), z_ref.y)
    }

    pub fn norm_of_point(&self, u: HPoint, y_ref: f64) -> f64 {
        let (dm, dp) = self.fixed_point_distances(u);
        y_ref * dm * dp / (u.y * self.axis_width)
    }

    /// Conjugated-coordinate point `g m g⁻¹ (z)` computed through `u`.
    pub fn conjugated_image(&self, m: &GroupElement, z: HPoint) -> HPoint {
        let u = self.image_point(m, self.to_original(z));
        self.to_conjugated(u)
    }
}
