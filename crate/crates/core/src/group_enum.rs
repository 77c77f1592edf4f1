//! Coset enumeration for `⟨γ₁⟩ \ Γ₀(N)` ordered by the conjugated norm.

use crate::error::{Error, Result};
use crate::halfplane::{act, GroupElement, HPoint, HyperbolicContext, RealMatrix};
use crate::numerics::ext_gcd;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Band on `ln|w|` inside which the annulus boundary is treated as a tie.
const BOUNDARY_BAND: f64 = 1e-12;

pub fn is_member(m: &GroupElement, n: i64) -> bool {
    m.c() % n == 0
}

/// Canonical representative of a coset together with derived data.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetRep {
    /// Member whose conjugated image of `i` lies in `[1, μ)`.
    pub rep: GroupElement,
    /// `g · rep · g⁻¹`.
    pub conj: RealMatrix,
    /// `|a'z+b'||c'z+d'|` at `z_ref` for the conjugated matrix.
    pub norm: f64,
    pub z_ref: HPoint,
    /// Member of the coset with the smallest lower-left entry; used where
    /// cost grows with `c`.
    pub short: GroupElement,
}

impl CosetRep {
    /// `Im(w)/|w|` with `w = conj(z)`, `z` in conjugated coordinates.
    pub fn weight_at(&self, z: HPoint) -> f64 {
        crate::halfplane::weight_via_norm(&self.conj, z)
    }
}

fn log_ratio(m: &GroupElement, ctx: &HyperbolicContext, z0: HPoint) -> f64 {
    ctx.log_abs_conjugated(ctx.image_point(m, z0)) / ctx.log_mu
}

/// Moves `m` along its coset to the member with `|g m g⁻¹ (i)|` closest to 1
/// on the log scale. Returns the member and `log_μ |g m g⁻¹ (i)|`.
fn balance(m: &GroupElement, ctx: &HyperbolicContext, z0: HPoint) -> Result<(GroupElement, f64)> {
    let mut cur = *m;
    for _ in 0..64 {
        let l = log_ratio(&cur, ctx, z0);
        if !l.is_finite() {
            return Err(Error::Domain(format!("cannot place {cur} relative to the axis")));
        }
        if l.abs() <= 0.5 + 1e-9 {
            return Ok((cur, l));
        }
        let k = l.round().clamp(-1e6, 1e6) as i64;
        cur = ctx.gamma1.pow(-k)?.mul(&cur)?;
    }
    Err(Error::Domain(format!("balancing of {m} did not settle")))
}

fn short_member(bal: &GroupElement, g1: &GroupElement) -> GroupElement {
    let positive = |m: GroupElement| if m.c() < 0 || (m.c() == 0 && m.d() < 0) { -m } else { m };
    let key = |m: &GroupElement| (m.c().unsigned_abs(), m.abs_key(), m.entries());
    let mut best = positive(*bal);
    for k in [-2i64, -1, 1, 2] {
        if let Ok(m) = g1.pow(k).and_then(|p| p.mul(bal)) {
            let m = positive(m);
            if key(&m) < key(&best) {
                best = m;
            }
        }
    }
    best
}

/// Canonical representative with norm taken at `i`.
pub fn coset_canonicalize(m: &GroupElement, ctx: &HyperbolicContext) -> Result<CosetRep> {
    coset_canonicalize_at(m, ctx, HPoint::I)
}

pub fn coset_canonicalize_at(m: &GroupElement, ctx: &HyperbolicContext, z_ref: HPoint) -> Result<CosetRep> {
    let z0 = ctx.to_original(HPoint::I);
    let (bal, l) = balance(m, ctx, z0)?;
    let up = ctx.gamma1.mul(&bal)?;
    let rep = if (l * ctx.log_mu).abs() < BOUNDARY_BAND {
        let key = |m: &GroupElement| (m.abs_key(), m.entries());
        if key(&up) < key(&bal) {
            up
        } else {
            bal
        }
    } else if l >= 0.0 {
        bal
    } else {
        up
    };
    let conj = ctx.conjugate(&rep);
    let norm = crate::halfplane::norm_at(&conj, z_ref);
    Ok(CosetRep { rep, conj, norm, z_ref, short: short_member(&bal, &ctx.gamma1) })
}

/// Outcome of an enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub level: i64,
    pub context: HyperbolicContext,
    pub t_max: f64,
    pub z_ref: HPoint,
    /// Ascending norm, ties broken by integer entries.
    pub reps: Vec<CosetRep>,
    pub complete: bool,
}

fn order(a: &CosetRep, b: &CosetRep) -> Ordering {
    a.norm.total_cmp(&b.norm).then_with(|| a.rep.entries().cmp(&b.rep.entries()))
}

fn check_inputs(n: i64, ctx: &HyperbolicContext, z_ref: HPoint) -> Result<()> {
    if n < 1 {
        return Err(Error::Config(format!("level must be positive, got {n}")));
    }
    if !is_member(&ctx.gamma1, n) {
        return Err(Error::Config(format!("{} is not in Gamma0({n})", ctx.gamma1)));
    }
    if !(z_ref.y > 0.0) {
        return Err(Error::Domain("reference point must lie in the upper half-plane".into()));
    }
    Ok(())
}

/// Effective cutoff on `1/sin(arg w)` at `w = conj(i)` implied by
/// `norm(z_ref) ≤ t`, using `cosh(a + b) ≤ e^b cosh(a)`.
fn effective_cutoff(t: f64, z_ref: HPoint) -> f64 {
    let dx = z_ref.x;
    let dy = z_ref.y - 1.0;
    let dist = (1.0 + (dx * dx + dy * dy) / (2.0 * z_ref.y)).acosh();
    t * dist.exp() / z_ref.y
}

fn finish(
    n: i64,
    ctx: &HyperbolicContext,
    t: f64,
    z_ref: HPoint,
    mut members: Vec<GroupElement>,
) -> Result<EnumerationResult> {
    members.par_sort_unstable();
    members.dedup();
    let reps: Vec<Result<CosetRep>> = members.par_iter().map(|m| coset_canonicalize_at(m, ctx, z_ref)).collect();
    let mut out = Vec::with_capacity(reps.len());
    for r in reps {
        let r = r?;
        if r.norm <= t {
            out.push(r);
        }
    }
    out.par_sort_by(order);
    out.dedup_by(|a, b| a.rep == b.rep);
    Ok(EnumerationResult { level: n, context: ctx.clone(), t_max: t, z_ref, reps: out, complete: true })
}

/// All cosets whose canonical representative has norm at most `t` at `z_ref`.
///
/// Every coset has a member with `|g m g⁻¹(i)|` in `[μ^{-1/2}, μ^{1/2}]`; the
/// scan visits the orbit points `m(z0)`, `z0 = g⁻¹(i)`, row by row in the
/// lower row `(c, d)`, keeping only the horizontal positions that can land in
/// the region cut out by the annulus and the norm bound.
pub fn enumerate_cosets(n: i64, ctx: &HyperbolicContext, t: f64, z_ref: HPoint) -> Result<EnumerationResult> {
    check_inputs(n, ctx, z_ref)?;
    if !(t >= 1.0) {
        return Ok(EnumerationResult { level: n, context: ctx.clone(), t_max: t, z_ref, reps: vec![], complete: true });
    }
    let t_eff = effective_cutoff(t, z_ref);
    let lo = 1.0 / ctx.sqrt_mu;
    let hi = ctx.sqrt_mu;
    let z0 = ctx.to_original(HPoint::I);
    let (x0, y0) = (z0.x, z0.y);
    let gi = ctx.g_inv;
    let (gc, gd) = (gi.c.abs(), gi.d.abs());
    let h_of = |r: f64| (r / t_eff) / (gc * r + gd).powi(2);
    let h_min = 0.5 * h_of(lo).min(h_of(hi));
    let r2 = y0 / h_min;
    let c_max = (r2.sqrt() / y0).floor();
    if c_max > 4e9 || r2 > 1.6e19 {
        return Err(Error::Overflow("enumeration box"));
    }
    let c_max = c_max as i64;
    let (pm, pp) = ctx.fixed_points;
    let mid = 0.5 * (pm + pp);
    let half = 0.5 * ctx.axis_width;
    let width = ctx.axis_width;
    let log_lo = lo.ln() - 1e-9;
    let log_hi = hi.ln() + 1e-9;
    let sin_min = 1.0 / (t_eff * (1.0 + 1e-9));

    let row = |c: i64| -> Result<Vec<GroupElement>> {
        let mut hits = Vec::new();
        let cf = c as f64;
        let rem = r2 - cf * cf * y0 * y0;
        if rem < 0.0 {
            return Ok(hits);
        }
        let rc = rem.sqrt();
        let (d_lo, d_hi) = if c == 0 { (1, 1) } else { ((-cf * x0 - rc).floor() as i64, (-cf * x0 + rc).ceil() as i64) };
        for d in d_lo..=d_hi {
            let (a0, b0) = if c == 0 {
                (1i64, 0i64)
            } else {
                let (gg, x, _) = ext_gcd(d, c);
                if gg != 1 {
                    continue;
                }
                let a0 = x.rem_euclid(c);
                let num = a0 as i128 * d as i128 - 1;
                (a0, i64::try_from(num / c as i128).map_err(|_| Error::Overflow("particular solution"))?)
            };
            let (x_start, y) = if c == 0 {
                (x0, y0)
            } else {
                let den = num_complex::Complex64::new(cf * x0 + d as f64, cf * y0);
                let inv = (den * cf).inv();
                (a0 as f64 / cf - inv.re, -inv.im)
            };
            let k = 2.0 * t_eff * y * width;
            let disc = k * k - 4.0 * half * half * y * y;
            if disc < 0.0 {
                continue;
            }
            let w_hi = half * half - y * y + disc.sqrt();
            if w_hi < 0.0 {
                continue;
            }
            let reach = w_hi.sqrt();
            let t_lo = (mid - reach - x_start).floor() as i64 - 1;
            let t_hi = (mid + reach - x_start).ceil() as i64 + 1;
            for s in t_lo..=t_hi {
                let x = x_start + s as f64;
                let u = HPoint { x, y };
                let l = ctx.log_abs_conjugated(u);
                if l < log_lo || l > log_hi {
                    continue;
                }
                let sin = y * width / ((x - pm).hypot(y) * (x - pp).hypot(y));
                if sin < sin_min {
                    continue;
                }
                let (a, b) = if c == 0 {
                    (1, s)
                } else {
                    let a = a0 as i128 + s as i128 * c as i128;
                    let b = b0 as i128 + s as i128 * d as i128;
                    (
                        i64::try_from(a).map_err(|_| Error::Overflow("row scan"))?,
                        i64::try_from(b).map_err(|_| Error::Overflow("row scan"))?,
                    )
                };
                hits.push(GroupElement::new(a, b, c, d)?);
            }
        }
        Ok(hits)
    };

    let rows: Vec<Result<Vec<GroupElement>>> = (0..=c_max / n).into_par_iter().map(|j| row(j * n)).collect();
    let mut members = Vec::new();
    for r in rows {
        members.extend(r?);
    }
    finish(n, ctx, t, z_ref, members)
}

/// Entry bound for the exhaustive oracle: a balanced member satisfies
/// `a'²+b'²+c'²+d'² ≤ 2 t_eff √μ`, and `m = g⁻¹ m' g`.
pub fn oracle_box(ctx: &HyperbolicContext, t: f64, z_ref: HPoint) -> f64 {
    let t_eff = effective_cutoff(t, z_ref);
    let g = ctx.g.op_norm();
    g * g * (2.0 * t_eff * ctx.sqrt_mu).sqrt()
}

/// Exhaustive search over all matrices of `Γ₀(N)` with entries bounded by
/// [`oracle_box`]; returns sorted canonical representatives with norm ≤ `t`.
pub fn brute_force_cosets(n: i64, ctx: &HyperbolicContext, t: f64, z_ref: HPoint) -> Result<Vec<GroupElement>> {
    check_inputs(n, ctx, z_ref)?;
    if !(t >= 1.0) {
        return Ok(vec![]);
    }
    let bound = oracle_box(ctx, t, z_ref).ceil();
    if bound > 1e7 {
        return Err(Error::Overflow("oracle box"));
    }
    let bound = bound as i64;
    let z_src = ctx.to_original(z_ref);
    let keep = |m: &GroupElement| {
        let u = ctx.image_point(m, z_src);
        ctx.norm_of_point(u, z_ref.y) <= t * (1.0 + 1e-9)
    };
    let rows: Vec<Vec<GroupElement>> = (0..=bound / n)
        .into_par_iter()
        .map(|j| {
            let c = j * n;
            let mut hits = Vec::new();
            if c == 0 {
                for b in -bound..=bound {
                    let m = GroupElement::new(1, b, 0, 1).unwrap();
                    if keep(&m) {
                        hits.push(m);
                    }
                }
                return hits;
            }
            for d in -bound..=bound {
                let (gg, x, _) = ext_gcd(d, c);
                if gg != 1 {
                    continue;
                }
                let a0 = x.rem_euclid(c);
                let mut a = a0 - ((a0 + bound) / c) * c;
                while a <= bound {
                    let num = a as i128 * d as i128 - 1;
                    let b = num / c as i128;
                    if b.abs() <= bound as i128 {
                        let m = GroupElement::new(a, b as i64, c, d).unwrap();
                        if keep(&m) {
                            hits.push(m);
                        }
                    }
                    a += c;
                }
            }
            hits
        })
        .collect();
    let res = finish(n, ctx, t, z_ref, rows.into_iter().flatten().collect())?;
    let mut reps: Vec<GroupElement> = res.reps.into_iter().map(|r| r.rep).collect();
    reps.sort_unstable();
    Ok(reps)
}

impl EnumerationResult {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Number of cosets with norm at most `t`.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.reps.partition_point(|r| r.norm <= t)
    }

    /// The enumeration cut down to `t ≤ t_max`.
    pub fn restrict(&self, t: f64) -> Result<EnumerationResult> {
        if t > self.t_max {
            return Err(Error::IncompleteEnumeration { have: self.t_max, need: t });
        }
        let k = self.count_up_to(t);
        Ok(EnumerationResult { t_max: t, reps: self.reps[..k].to_vec(), ..self.clone() })
    }

    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let g = self.context.gamma1.entries();
        let mut buf = Vec::new();
        writeln!(
            buf,
            "# modsym-lab coset cache v1; N={}; gamma1={},{},{},{}; zref={},{}; T={}",
            self.level, g[0], g[1], g[2], g[3], self.z_ref.x, self.z_ref.y, self.t_max
        )?;
        for r in &self.reps {
            let e = r.rep.entries();
            writeln!(buf, "{},{},{},{}", e[0], e[1], e[2], e[3])?;
        }
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, buf)?;
        Ok(())
    }

    /// Loads a cache and checks it against the requested level and generator.
    pub fn load_cache(path: &Path, n: i64, gamma1: Option<&GroupElement>) -> Result<EnumerationResult> {
        let text = fs::read_to_string(path)?;
        let header = CacheHeader::parse(&text)?;
        if header.level != n {
            return Err(Error::ContextMismatch(format!("cache level {} but requested {n}", header.level)));
        }
        if let Some(g1) = gamma1 {
            if *g1 != header.gamma1 {
                return Err(Error::ContextMismatch(format!("cache generator {} but requested {g1}", header.gamma1)));
            }
        }
        let ctx = crate::halfplane::analyze_hyperbolic(&header.gamma1)?;
        if ctx.gamma1 != header.gamma1 {
            return Err(Error::Format("cached generator has multiplier below one".into()));
        }
        let mut members = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.is_empty() {
                continue;
            }
            let e = parse_ints::<4>(line).ok_or_else(|| Error::Format(format!("line {}: bad row {line:?}", i + 1)))?;
            let m = GroupElement::from_entries(e).map_err(|_| Error::Format(format!("line {}: determinant", i + 1)))?;
            if m.entries() != e || !is_member(&m, n) {
                return Err(Error::Format(format!("line {}: not a canonical member", i + 1)));
            }
            members.push(m);
        }
        let expected = members.len();
        let reps: Vec<Result<CosetRep>> =
            members.par_iter().map(|m| coset_canonicalize_at(m, &ctx, header.z_ref)).collect();
        let mut out = Vec::with_capacity(expected);
        for (m, r) in members.iter().zip(reps) {
            let r = r?;
            if r.rep != *m {
                return Err(Error::Format(format!("row {m} is not the canonical representative")));
            }
            if r.norm > header.t_max {
                return Err(Error::Format(format!("row {m} has norm {} above T={}", r.norm, header.t_max)));
            }
            out.push(r);
        }
        out.sort_by(order);
        if let Some(w) = out.windows(2).find(|w| w[0].rep == w[1].rep) {
            return Err(Error::Format(format!("row {} appears twice", w[0].rep)));
        }
        Ok(EnumerationResult { level: n, context: ctx, t_max: header.t_max, z_ref: header.z_ref, reps: out, complete: true })
    }
}

/// Parsed first line of a coset cache.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheHeader {
    pub level: i64,
    pub gamma1: GroupElement,
    pub z_ref: HPoint,
    pub t_max: f64,
}

impl CacheHeader {
    pub fn parse(text: &str) -> Result<CacheHeader> {
        let first = text.lines().next().ok_or_else(|| Error::Format("empty cache".into()))?;
        let body = first
            .strip_prefix("# modsym-lab coset cache v1;")
            .ok_or_else(|| Error::Format("missing coset cache header".into()))?;
        let mut level = None;
        let mut gamma1 = None;
        let mut z_ref = None;
        let mut t_max = None;
        for field in body.split(';') {
            let (k, v) = field.trim().split_once('=').ok_or_else(|| Error::Format(format!("bad field {field:?}")))?;
            match k {
                "N" => level = v.parse::<i64>().ok(),
                "gamma1" => gamma1 = parse_ints::<4>(v).and_then(|e| GroupElement::from_entries(e).ok()),
                "zref" => {
                    z_ref = parse_floats::<2>(v).and_then(|p| HPoint::new(p[0], p[1]).ok());
                }
                "T" => t_max = v.parse::<f64>().ok(),
                _ => return Err(Error::Format(format!("unknown header field {k:?}"))),
            }
        }
        let miss = |what: &str| Error::Format(format!("header field {what} missing or malformed"));
        Ok(CacheHeader {
            level: level.ok_or_else(|| miss("N"))?,
            gamma1: gamma1.ok_or_else(|| miss("gamma1"))?,
            z_ref: z_ref.ok_or_else(|| miss("zref"))?,
            t_max: t_max.ok_or_else(|| miss("T"))?,
        })
    }
}

fn parse_ints<const K: usize>(s: &str) -> Option<[i64; K]> {
    let mut out = [0i64; K];
    let mut it = s.split(',');
    for slot in out.iter_mut() {
        *slot = it.next()?.trim().parse().ok()?;
    }
    it.next().is_none().then_some(out)
}

fn parse_floats<const K: usize>(s: &str) -> Option<[f64; K]> {
    let mut out = [0f64; K];
    let mut it = s.split(',');
    for slot in out.iter_mut() {
        *slot = it.next()?.trim().parse().ok()?;
    }
    it.next().is_none().then_some(out)
}

/// Whether a representative satisfies the annulus condition, with slack.
pub fn in_canonical_window(r: &CosetRep, ctx: &HyperbolicContext, slack: f64) -> bool {
    let w = act(&r.conj, HPoint::I).abs();
    w >= 1.0 - slack && w < ctx.mu * (1.0 + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::analyze_hyperbolic;

    fn ge(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    fn small_ctx() -> HyperbolicContext {
        // product of two parabolic elements of Γ₀(11)
        analyze_hyperbolic(&ge(12, 1, 11, 1)).unwrap()
    }

    #[test]
    fn membership() {
        assert!(is_member(&GroupElement::IDENTITY, 11));
        assert!(!is_member(&ge(0, -1, 1, 0), 11));
        assert!(is_member(&ge(1, 0, 11, 1), 11));
    }

    #[test]
    fn identity_is_its_own_representative() {
        let ctx = small_ctx();
        let r = coset_canonicalize(&GroupElement::IDENTITY, &ctx).unwrap();
        assert_eq!(r.rep, GroupElement::IDENTITY);
        assert!((r.norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonicalization_is_coset_invariant() {
        let ctx = small_ctx();
        let m = ge(1, 0, 11, 1).mul(&ge(1, 3, 0, 1)).unwrap();
        let base = coset_canonicalize(&m, &ctx).unwrap();
        for k in -3..=3 {
            let shifted = ctx.gamma1.pow(k).unwrap().mul(&m).unwrap();
            let r = coset_canonicalize(&shifted, &ctx).unwrap();
            assert_eq!(r.rep, base.rep);
            assert!((r.norm - base.norm).abs() <= 1e-8 * base.norm);
        }
        assert!(in_canonical_window(&base, &ctx, 1e-9));
    }

    #[test]
    fn short_member_ignores_sign_and_coset_position() {
        let ctx = small_ctx();
        let m = ge(12, 11, 121, 111);
        let base = coset_canonicalize(&m, &ctx).unwrap();
        assert!(base.short.c() > 0);
        for k in -2..=2 {
            let shifted = ctx.gamma1.pow(k).unwrap().mul(&m).unwrap();
            assert_eq!(coset_canonicalize(&shifted, &ctx).unwrap().short, base.short);
            assert_eq!(coset_canonicalize(&-shifted, &ctx).unwrap().short, base.short);
        }
    }

    #[test]
    fn tiny_cutoff_is_empty_and_unit_cutoff_has_identity() {
        let ctx = small_ctx();
        assert!(enumerate_cosets(11, &ctx, 0.5, HPoint::I).unwrap().is_empty());
        let r = enumerate_cosets(11, &ctx, 1.0, HPoint::I).unwrap();
        assert!(r.reps.iter().any(|c| c.rep == GroupElement::IDENTITY));
    }

    #[test]
    fn matches_oracle_for_small_generator() {
        let ctx = small_ctx();
        for t in [3.0, 10.0, 25.0] {
            let fast: Vec<GroupElement> = {
                let mut v: Vec<_> = enumerate_cosets(11, &ctx, t, HPoint::I).unwrap().reps.iter().map(|r| r.rep).collect();
                v.sort_unstable();
                v
            };
            let slow = brute_force_cosets(11, &ctx, t, HPoint::I).unwrap();
            assert_eq!(fast, slow, "T = {t}");
        }
    }

    #[test]
    fn generator_outside_level_is_rejected() {
        let ctx = analyze_hyperbolic(&ge(2, 1, 1, 1)).unwrap();
        assert!(matches!(enumerate_cosets(11, &ctx, 5.0, HPoint::I), Err(Error::Config(_))));
    }

    #[test]
    fn header_round_trip() {
        let text = "# modsym-lab coset cache v1; N=11; gamma1=12,1,11,1; zref=0,1; T=12.5\n1,0,0,1\n";
        let h = CacheHeader::parse(text).unwrap();
        assert_eq!(h.level, 11);
        assert_eq!(h.gamma1, ge(12, 1, 11, 1));
        assert_eq!(h.t_max, 12.5);
        assert!(CacheHeader::parse("# other\n").is_err());
    }
}
