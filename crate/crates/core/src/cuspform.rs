//! Weight-2 cusp forms as truncated q-expansions.

use crate::error::{Error, Result};
use crate::halfplane::HPoint;
use crate::numerics::ComplexSum;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Coefficients `a_1..a_M` of a normalized weight-2 newform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    level: i64,
    coeffs: Vec<i64>,
}

/// Value of the truncated series with its error budget.
#[derive(Debug, Clone, Copy)]
pub struct FormValue {
    pub value: Complex64,
    /// Bound on the discarded tail, from `|a_n| ≤ 2n`.
    pub tail_bound: f64,
    /// Floating-point rounding estimate.
    pub rounding: f64,
    pub terms: usize,
}

impl FormValue {
    pub fn abs_err(&self) -> f64 {
        self.tail_bound + self.rounding
    }
}

fn check_bound(coeffs: &[i64]) -> Result<()> {
    for (i, &a) in coeffs.iter().enumerate() {
        let n = i + 1;
        if a.unsigned_abs() > 2 * n as u64 {
            return Err(Error::BoundViolation { n, value: a });
        }
    }
    Ok(())
}

impl QExpansion {
    /// Validates normalization and the coefficient bound.
    pub fn new(level: i64, coeffs: Vec<i64>) -> Result<Self> {
        Self::with_override(level, coeffs, false)
    }

    /// As [`QExpansion::new`], optionally skipping the coefficient bound.
    pub fn with_override(level: i64, coeffs: Vec<i64>, allow_bound_violation: bool) -> Result<Self> {
        if level < 1 {
            return Err(Error::Format(format!("level must be positive, got {level}")));
        }
        match coeffs.first() {
            Some(1) => {}
            Some(a) => return Err(Error::Format(format!("expansion is not normalized: a_1 = {a}"))),
            None => return Err(Error::Format("empty expansion".into())),
        }
        if !allow_bound_violation {
            check_bound(&coeffs)?;
        }
        Ok(QExpansion { level, coeffs })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        2
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> i64 {
        self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coprime pairs `(m, n)` with `mn ≤ M` where `a_{mn} ≠ a_m a_n`.
    pub fn multiplicativity_defects(&self) -> Vec<(usize, usize)> {
        let m = self.len();
        let mut bad = Vec::new();
        for p in 2..=m {
            for q in (p + 1)..=m {
                if p * q > m {
                    break;
                }
                if crate::numerics::gcd(p as i64, q as i64) == 1 && self.a(p) * self.a(q) != self.a(p * q) {
                    bad.push((p, q));
                }
            }
        }
        bad
    }

    /// Number of terms needed so that the tail at height `y` is at most `err`.
    pub fn terms_needed(y: f64, err: f64) -> usize {
        let x = (-2.0 * PI * y).exp();
        let mut m = ((err.ln().abs() + 1.0) / (2.0 * PI * y)).max(1.0) as usize / 2;
        while series_tail(x, m) > err {
            m += 1 + m / 64;
        }
        while m > 1 && series_tail(x, m - 1) <= err {
            m -= 1;
        }
        m
    }

    /// `f(z)` truncated so that the discarded tail is below `target_abs_err`.
    pub fn eval(&self, z: HPoint, target_abs_err: f64) -> Result<FormValue> {
        let m = Self::terms_needed(z.y, target_abs_err);
        if m > self.len() {
            return Err(Error::InsufficientCoefficients { needed: m, available: self.len() });
        }
        Ok(self.eval_terms(z, m))
    }

    /// `Σ_{n ≤ m} a_n e(nz)` with the tail bound for the given truncation.
    pub fn eval_terms(&self, z: HPoint, m: usize) -> FormValue {
        let m = m.min(self.len());
        let q = Complex64::new(0.0, 2.0 * PI * z.x.rem_euclid(1.0)).exp() * (-2.0 * PI * z.y).exp();
        // Horner from the top.
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs_acc = 0.0;
        let qa = q.norm();
        for n in (1..=m).rev() {
            acc = acc * q + self.a(n) as f64;
            abs_acc = abs_acc * qa + self.a(n).unsigned_abs() as f64;
        }
        let value = acc * q;
        let x = qa;
        FormValue {
            value,
            tail_bound: series_tail(x, m),
            rounding: 4.0 * (m as f64 + 2.0) * f64::EPSILON * abs_acc * qa,
            terms: m,
        }
    }

    /// Reference evaluation with explicit powers and compensated summation.
    pub fn eval_reference(&self, z: HPoint, m: usize) -> Complex64 {
        let m = m.min(self.len());
        let mut s = ComplexSum::new();
        for n in 1..=m {
            let nf = n as f64;
            let phase = (nf * z.x).rem_euclid(1.0);
            let term = Complex64::from_polar((-2.0 * PI * nf * z.y).exp(), 2.0 * PI * phase);
            s.add(term * self.a(n) as f64);
        }
        s.value()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() * 8);
        writeln!(s, "# qexp N={} k=2 M={}", self.level, self.len()).unwrap();
        for (i, a) in self.coeffs.iter().enumerate() {
            writeln!(s, "{} {}", i + 1, a).unwrap();
        }
        s
    }

    pub fn load(path: &Path, allow_bound_violation: bool) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?, allow_bound_violation)
    }

    pub fn from_text(text: &str, allow_bound_violation: bool) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty coefficient file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let level = match fields.as_slice() {
            ["#", "qexp", n, "k=2", m] => {
                let level = n.strip_prefix("N=").and_then(|v| v.parse::<i64>().ok());
                let count = m.strip_prefix("M=").and_then(|v| v.parse::<usize>().ok());
                match (level, count) {
                    (Some(l), Some(c)) => (l, c),
                    _ => return Err(Error::Format(format!("bad header {header:?}"))),
                }
            }
            _ => return Err(Error::Format(format!("bad header {header:?}"))),
        };
        let (level, count) = level;
        let mut coeffs = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let mut parts = line.split(' ');
            let (Some(n), Some(a), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Format(format!("line {}: expected `<n> <a_n>`", i + 2)));
            };
            let n: usize = n.parse().map_err(|_| Error::Format(format!("line {}: bad index", i + 2)))?;
            let a: i64 = a.parse().map_err(|_| Error::Format(format!("line {}: bad coefficient", i + 2)))?;
            if n != i + 1 {
                return Err(Error::Format(format!("line {}: expected index {}, found {n}", i + 2, i + 1)));
            }
            coeffs.push(a);
        }
        if coeffs.len() != count {
            return Err(Error::Format(format!("header announces {count} coefficients, found {}", coeffs.len())));
        }
        Self::with_override(level, coeffs, allow_bound_violation)
    }
}

pub fn eval_f(q: &QExpansion, z: HPoint, target_abs_err: f64) -> Result<FormValue> {
    q.eval(z, target_abs_err)
}

/// `Σ_{n>m} 2n x^n`, the tail majorant under `|a_n| ≤ 2n`.
pub fn series_tail(x: f64, m: usize) -> f64 {
    let mf = m as f64;
    let one = 1.0 - x;
    2.0 * x.powf(mf + 1.0) * ((mf + 1.0) / one + x / (one * one))
}

/// Coefficients of `∏_{n≥1} (1 − q^{step·n})` up to `q^len` (exclusive), as a
/// sparse list from the pentagonal number theorem.
fn euler_sparse(step: usize, len: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut k: usize = 1;
    loop {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let p1 = k * (3 * k - 1) / 2 * step;
        let p2 = k * (3 * k + 1) / 2 * step;
        if p1 >= len {
            break;
        }
        out.push((p1, sign));
        if p2 < len {
            out.push((p2, sign));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

fn mul_sparse(dense: &[i64], sparse: &[(usize, i64)]) -> Result<Vec<i64>> {
    let len = dense.len();
    let mut out = vec![0i64; len];
    for &(e, s) in sparse {
        for i in 0..len.saturating_sub(e) {
            let v = dense[i];
            if v != 0 {
                out[i + e] = out[i + e].checked_add(s * v).ok_or(Error::Overflow("eta product"))?;
            }
        }
    }
    Ok(out)
}

/// `q ∏ (1 − q^n)² (1 − q^{11n})²` up to `q^m`: the newform of level 11.
pub fn eta_expansion_11(m: usize) -> Result<QExpansion> {
    if m < 1 {
        return Err(Error::Domain("need at least one coefficient".into()));
    }
    // Series in q of length m covers exponents 0..m-1, shifted by the leading q.
    let len = m;
    let p = euler_sparse(1, len);
    let p11 = euler_sparse(11, len);
    let mut dense = vec![0i64; len];
    dense[0] = 1;
    let dense = mul_sparse(&dense, &p11)?;
    let dense = mul_sparse(&dense, &p11)?;
    let dense = mul_sparse(&dense, &p)?;
    let dense = mul_sparse(&dense, &p)?;
    QExpansion::new(11, dense)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_coefficients() {
        let q = eta_expansion_11(12).unwrap();
        assert_eq!(&q.coeffs()[..10], &[1, -2, -1, 2, 1, 2, -2, 0, -2, -2]);
        assert_eq!(q.a(6), q.a(2) * q.a(3));
        assert_eq!(q.a(10), q.a(2) * q.a(5));
    }

    #[test]
    fn multiplicative_and_bounded() {
        let q = eta_expansion_11(2000).unwrap();
        assert!(q.multiplicativity_defects().is_empty());
        // Hecke recursion at a good prime: a_{p^2} = a_p^2 - p.
        assert_eq!(q.a(4), q.a(2) * q.a(2) - 2);
        assert_eq!(q.a(9), q.a(3) * q.a(3) - 3);
        assert_eq!(q.a(121), 1);
    }

    #[test]
    fn normalization_is_required() {
        assert!(matches!(QExpansion::new(11, vec![0, 1]), Err(Error::Format(_))));
        assert!(matches!(QExpansion::new(11, vec![1, 5]), Err(Error::BoundViolation { n: 2, value: 5 })));
        assert!(QExpansion::with_override(11, vec![1, 5], true).is_ok());
    }

    #[test]
    fn text_round_trip_is_byte_stable() {
        let q = eta_expansion_11(50).unwrap();
        let text = q.to_text();
        let back = QExpansion::from_text(&text, false).unwrap();
        assert_eq!(back, q);
        assert_eq!(back.to_text(), text);
        let hand = "# qexp N=11 k=2 M=5\n1 1\n2 -2\n3 -1\n4 2\n5 1\n";
        assert_eq!(QExpansion::from_text(hand, false).unwrap(), eta_expansion_11(5).unwrap());
    }

    #[test]
    fn malformed_files() {
        assert!(QExpansion::from_text("", false).is_err());
        assert!(QExpansion::from_text("# qexp N=11 k=2 M=2\n1 1\n", false).is_err());
        assert!(QExpansion::from_text("# qexp N=11 k=2 M=2\n1 1\n3 0\n", false).is_err());
        assert!(QExpansion::from_text("# qexp N=11 k=2 M=1\n1 0\n", false).is_err());
    }

    #[test]
    fn high_point_is_dominated_by_first_term() {
        let q = eta_expansion_11(100).unwrap();
        let z = HPoint::new(0.0, 10.0).unwrap();
        let v = q.eval(z, 1e-300).unwrap();
        let lead = (-20.0 * PI).exp();
        assert!((v.value.re - lead).abs() <= 3.0 * 2.0 * (-40.0 * PI).exp());
    }

    #[test]
    fn periodicity() {
        let q = eta_expansion_11(200).unwrap();
        let z = HPoint::new(0.3, 0.8).unwrap();
        let a = q.eval(z, 1e-14).unwrap().value;
        let b = q.eval(HPoint::new(1.3, 0.8).unwrap(), 1e-14).unwrap().value;
        assert!((a - b).norm() <= 1e-15);
    }

    #[test]
    fn certified_against_long_reference() {
        let q = eta_expansion_11(5000).unwrap();
        let z = HPoint::new(0.3, 0.8).unwrap();
        let v = q.eval(z, 1e-13).unwrap();
        let r = q.eval_reference(z, 5000);
        assert!((v.value - r).norm() <= v.abs_err() + 1e-16);
    }

    #[test]
    fn too_few_coefficients() {
        let q = eta_expansion_11(10).unwrap();
        let err = q.eval(HPoint::new(0.0, 0.01).unwrap(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::InsufficientCoefficients { available: 10, .. }));
    }
}
