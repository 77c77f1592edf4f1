use modsym_lab::cuspform::{eta_expansion_11, QExpansion};
use modsym_lab::eisenstein::{
    eps_second_consistency, eval_plain, eval_plain_over, eval_twisted, eval_twisted_over, EpsAxis, TwistOrder,
};
use modsym_lab::group_enum::{brute_force_cosets, coset_canonicalize, enumerate_cosets, EnumerationResult};
use modsym_lab::halfplane::{act, weight, GroupElement, HPoint, HyperbolicContext};
use modsym_lab::modsym::{build_gamma1, gamma0_pool, symbol, symbol_terms, SymbolTable};
use modsym_lab::stats::build_distribution;
use modsym_lab::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Fixture {
    ctx: HyperbolicContext,
    en: EnumerationResult,
    table: SymbolTable,
    q: QExpansion,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let ctx = build_gamma1(&gamma0_pool(11, 30)).unwrap();
        let en = enumerate_cosets(11, &ctx, 500.0, HPoint::I).unwrap();
        let c_max = en.reps.iter().map(|r| r.short.c().abs()).max().unwrap();
        let q = eta_expansion_11(symbol_terms(c_max, 10) + 1).unwrap();
        let mut table = SymbolTable::new(10);
        table.fill(&en, &q).unwrap();
        Fixture { ctx, en, table, q }
    })
}

fn pool() -> &'static [GroupElement] {
    static P: OnceLock<Vec<GroupElement>> = OnceLock::new();
    P.get_or_init(|| gamma0_pool(11, 12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn y_abs_f_is_invariant(i in 0usize..500, x in -0.5f64..0.5, y in 0.3f64..1.5) {
        let q = &fixture().q;
        let g = pool()[i % pool().len()];
        let z = HPoint::new(x, y).unwrap();
        let w = act(&g, z);
        prop_assume!(w.y > 0.02);
        let fz = q.eval(z, 1e-14).unwrap();
        let fw = q.eval(w, 1e-14).unwrap();
        let lhs = w.y * fw.value.norm();
        let rhs = z.y * fz.value.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs), "{lhs} vs {rhs}");
    }

    #[test]
    fn symbol_is_additive(i in 0usize..500, j in 0usize..500) {
        let q = &fixture().q;
        let (g, h) = (pool()[i % pool().len()], pool()[j % pool().len()]);
        let gh = g.mul(&h).unwrap();
        let (a, b, ab) = (symbol(&g, q, 10).unwrap(), symbol(&h, q, 10).unwrap(), symbol(&gh, q, 10).unwrap());
        let gap = (ab.value - a.value - b.value).norm();
        prop_assert!(gap <= a.abs_err + b.abs_err + ab.abs_err, "gap {gap:e}");
    }

    #[test]
    fn canonical_form_is_constant_on_cosets(i in 0usize..500, k in -2i64..=2) {
        let ctx = &fixture().ctx;
        let g = pool()[i % pool().len()];
        let moved = ctx.gamma1.pow(k).unwrap().mul(&g).unwrap();
        let a = coset_canonicalize(&g, ctx).unwrap();
        let b = coset_canonicalize(&moved, ctx).unwrap();
        prop_assert_eq!(a.rep, b.rep);
        prop_assert_eq!(a.norm.to_bits(), b.norm.to_bits());
    }
}

#[test]
fn plain_series_matches_exhaustive_oracle() {
    let ctx = &fixture().ctx;
    let en = enumerate_cosets(11, ctx, 50.0, HPoint::I).unwrap();
    let oracle = brute_force_cosets(11, ctx, 50.0, HPoint::I).unwrap();
    let z = HPoint::new(0.2, 1.3).unwrap();
    let s = Complex64::new(3.0, 0.5);
    let direct: Complex64 = oracle
        .iter()
        .map(|m| {
            let w = weight(&ctx.conjugate(m), z);
            (s * w.ln()).exp()
        })
        .sum();
    let fast = eval_plain(z, s, &en).unwrap().value;
    assert!((fast - direct).norm() <= 1e-12, "{fast} vs {direct}");
}

#[test]
fn single_coset_values() {
    let f = fixture();
    let id = &f.en.reps[..1];
    assert_eq!(id[0].rep, GroupElement::IDENTITY);
    let v = eval_plain_over(HPoint::I, Complex64::new(2.0, 0.0), &f.en, id).unwrap();
    assert!((v.value - 1.0).norm() < 1e-15);
    let z = HPoint::new(0.7, 1.9).unwrap();
    let v = eval_plain_over(z, Complex64::new(2.5, 0.0), &f.en, id).unwrap();
    assert!((v.value.re - (z.y / z.abs()).powf(2.5)).abs() < 1e-14);
    let tw = eval_twisted_over(z, Complex64::new(2.5, 0.0), TwistOrder::new(1, 0).unwrap(), &f.en, id, &f.table).unwrap();
    assert_eq!(tw.value, Complex64::new(0.0, 0.0));
}

#[test]
fn untwisted_order_equals_plain() {
    let f = fixture();
    let z = HPoint::new(0.0, 2.0).unwrap();
    let s = Complex64::new(3.0, 0.0);
    let a = eval_plain(z, s, &f.en).unwrap().value;
    let b = eval_twisted(z, s, TwistOrder::new(0, 0).unwrap(), &f.en, &f.table).unwrap().value;
    assert_eq!(a, b);
}

#[test]
fn partial_sums_increase_for_real_s() {
    let f = fixture();
    let z = HPoint::new(0.1, 1.0).unwrap();
    let s = Complex64::new(3.0, 0.0);
    let mut prev = 0.0;
    for k in [1, 10, 100, 500, f.en.len()] {
        let v = eval_plain_over(z, s, &f.en, &f.en.reps[..k]).unwrap().value.re;
        assert!(v >= prev);
        prev = v;
    }
}

fn distance(a: HPoint, b: HPoint) -> f64 {
    (1.0 + ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)) / (2.0 * a.y * b.y)).acosh()
}

// Truncation is by norm at `i`, so the tail seen at `z` is the tail at `i`
// inflated by at most `e^{σ d(z, i)}`.
fn tail_at(z: HPoint, tail_at_i: f64, sigma: f64) -> f64 {
    tail_at_i * (sigma * distance(z, HPoint::I)).exp()
}

#[test]
fn series_is_invariant_within_tails() {
    let f = fixture();
    let s = Complex64::new(3.0, 0.0);
    let tail_i = eval_plain(HPoint::I, s, &f.en).unwrap().tail_estimate;
    let z = HPoint::new(0.15, 1.1).unwrap();
    let e0 = eval_plain(z, s, &f.en).unwrap();
    let mut least_moving: Vec<(f64, GroupElement)> = pool()
        .iter()
        .filter(|g| g.c() > 0 || (g.c() == 0 && g.d() > 0))
        .filter(|g| **g != GroupElement::IDENTITY)
        .map(|g| (distance(HPoint::I, act(&f.ctx.conjugate(g), HPoint::I)), *g))
        .collect();
    least_moving.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, g) in &least_moving[..5] {
        let w = act(&f.ctx.conjugate(&g), z);
        let e1 = eval_plain(w, s, &f.en).unwrap();
        let budget = 2.0 * (tail_at(z, tail_i, s.re) + tail_at(w, tail_i, s.re));
        let gap = (e1.value - e0.value).norm();
        assert!(gap <= budget, "{g}: {gap:e} vs budget {budget:e}");
    }

    let shift = GroupElement::new(1, 1, 0, 1).unwrap();
    let w = act(&f.ctx.conjugate(&shift), z);
    let gap_at = |en: &EnumerationResult| (eval_plain(w, s, en).unwrap().value - eval_plain(z, s, en).unwrap().value).norm();
    let half = f.en.restrict(250.0).unwrap();
    assert!(gap_at(&f.en) < 0.5 * gap_at(&half));
}

#[test]
fn second_eps_difference_matches_second_twist() {
    let f = fixture();
    let en = f.en.restrict(200.0).unwrap();
    let z = HPoint::new(0.0, 2.0).unwrap();
    for axis in [EpsAxis::Alpha, EpsAxis::Beta] {
        let rel = eps_second_consistency(z, Complex64::new(3.0, 0.0), axis, 1e-3, &en, &f.table).unwrap();
        assert!(rel <= 1e-5, "{axis:?}: {rel:e}");
    }
}

#[test]
fn distribution_covers_the_enumeration() {
    let f = fixture();
    let lattice = modsym_lab::modsym::period_lattice(&f.table.for_reps(&f.en.reps).unwrap(), 1e-7).unwrap();
    let pn = modsym_lab::modsym::petersson_norm(&lattice);
    let normalized: Vec<_> = f
        .en
        .reps
        .iter()
        .map(|r| modsym_lab::modsym::normalize(f.table.require(&r.rep).unwrap(), r.norm, 4.0 * std::f64::consts::PI, &pn))
        .collect();
    let d = build_distribution(&f.en, &normalized, 250.0).unwrap();
    assert_eq!(d.count(), f.en.count_up_to(250.0));
    assert_eq!((d.samples[0].x, d.samples[0].y), (0.0, 0.0));
    let mut reversed = normalized.clone();
    reversed.reverse();
    assert_eq!(build_distribution(&f.en, &reversed, 250.0).unwrap(), d);
    let missing = &normalized[1..];
    assert!(matches!(build_distribution(&f.en, missing, 250.0), Err(Error::Coverage(_))));
}

#[test]
fn enumeration_cache_round_trip() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cosets.csv");
    let en = f.en.restrict(200.0).unwrap();
    en.save_cache(&path).unwrap();
    let back = EnumerationResult::load_cache(&path, 11, Some(&f.ctx.gamma1)).unwrap();
    assert_eq!(back.reps, en.reps);
    assert_eq!(back.t_max, en.t_max);
    assert!(matches!(EnumerationResult::load_cache(&path, 13, None), Err(Error::ContextMismatch(_))));
    let other = GroupElement::new(12, 1, 11, 1).unwrap();
    assert!(matches!(EnumerationResult::load_cache(&path, 11, Some(&other)), Err(Error::ContextMismatch(_))));

    let text = std::fs::read_to_string(&path).unwrap();
    let lifted = f.ctx.gamma1.mul(&en.reps[2].rep).unwrap().entries().map(|e| e.to_string()).join(",");
    for row in ["1,0,3,1".to_string(), text.lines().nth(2).unwrap().to_string(), lifted] {
        let mut lines: Vec<&str> = text.lines().collect();
        lines[3] = &row;
        std::fs::write(&path, lines.join("\n")).unwrap();
        let r = EnumerationResult::load_cache(&path, 11, None);
        assert!(matches!(r, Err(Error::Format(_))), "{row}: {r:?}");
    }
}

#[test]
fn symbol_cache_round_trip() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("symbols.csv");
    f.table.save(&path).unwrap();
    let back = SymbolTable::load(&path).unwrap();
    assert_eq!(back.len(), f.table.len());
    assert_eq!(back.digits, 10);
    for r in &f.en.reps {
        let (a, b) = (f.table.require(&r.rep).unwrap(), back.require(&r.rep).unwrap());
        assert_eq!(a.value, b.value);
        assert_eq!(a.abs_err, b.abs_err);
    }
}

#[test]
fn coefficient_file_round_trip_and_tampering() {
    let q = eta_expansion_11(2000).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.txt");
    q.save(&path).unwrap();
    let back = QExpansion::load(&path, false).unwrap();
    assert_eq!(back.coeffs(), q.coeffs());
    let tampered = q.to_text().replace("\n5 1\n", "\n5 11\n");
    assert_ne!(tampered, q.to_text());
    assert!(matches!(QExpansion::from_text(&tampered, false), Err(Error::BoundViolation { n: 5, .. })));
    assert!(QExpansion::from_text(&tampered, true).is_ok());
}
