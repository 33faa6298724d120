//! Invariants checked over randomly generated inputs.
#![allow(clippy::needless_range_loop)]

use mfpce_core::benchmarks::truss_hf;
use mfpce_core::bootstrap::{percentile_interval, Interval, NoiseFamily, NoiseModel};
use mfpce_core::fusion::{estimate_rho, merge_expansions, AnalyticModel, LowFidelity, MfModel, RhoMethod};
use mfpce_core::metrics::{coverage_probability, validation_error};
use mfpce_core::pce::{enumerate_indices, Truncation};
use mfpce_core::{lhs_sample, Marginal, MultiIndex, PceModel, RandomVector};
use proptest::prelude::*;

fn marginal() -> impl Strategy<Value = Marginal> {
    prop_oneof![
        (-5.0..5.0f64, 0.1..10.0f64).prop_map(|(a, w)| Marginal::uniform(a, a + w).unwrap()),
        (-5.0..5.0f64, 0.1..3.0f64).prop_map(|(m, s)| Marginal::gaussian(m, s).unwrap()),
        (-2.0..2.0f64, 0.05..1.0f64).prop_map(|(l, z)| Marginal::lognormal(l, z).unwrap()),
        (-5.0..5.0f64, 0.1..3.0f64).prop_map(|(m, s)| Marginal::gumbel(m, s).unwrap()),
    ]
}

fn rv(dim: usize) -> impl Strategy<Value = RandomVector> {
    prop::collection::vec(marginal(), 1..=dim).prop_map(|m| RandomVector::new(m).unwrap())
}

/// Random sparse PCE on `rv` with at most `terms` coefficients.
fn pce_on(rv: RandomVector, terms: usize, seed: u64) -> PceModel {
    let dim = rv.dim();
    let mut idx: Vec<MultiIndex> = enumerate_indices(dim, &Truncation::total_degree(3));
    let keep = (terms).min(idx.len());
    // deterministic pseudo-random subset
    let mut s = seed | 1;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s
    };
    for i in (1..idx.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx.truncate(keep);
    idx.sort_by(MultiIndex::canonical_cmp);
    let coef: Vec<f64> = (0..keep).map(|_| (next() % 2001) as f64 / 1000.0 - 1.0).collect();
    PceModel::new(rv, idx, coef, 0.01, 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_inverts_cdf(m in marginal(), p in 0.001..0.999f64) {
        let x = m.quantile(p);
        prop_assert!((m.cdf(x) - p).abs() < 1e-9);
    }

    #[test]
    fn standard_map_round_trips(m in marginal(), p in 0.001..0.999f64) {
        let x = m.quantile(p);
        let z = m.to_standard(x).unwrap();
        let back = m.from_standard(z);
        prop_assert!((back - x).abs() <= 1e-8 * (1.0 + x.abs()), "{} vs {}", back, x);
    }

    #[test]
    fn lhs_hits_every_stratum_once(r in rv(4), n in 1usize..60, seed in any::<u64>()) {
        let s = lhs_sample(&r, n, seed).unwrap();
        prop_assert_eq!(s.len(), n);
        for (d, m) in r.marginals().iter().enumerate() {
            let mut seen = vec![false; n];
            for x in &s {
                let k = ((m.cdf(x[d]) * n as f64).floor() as usize).min(n - 1);
                prop_assert!(!seen[k]);
                seen[k] = true;
            }
        }
        prop_assert_eq!(s, lhs_sample(&r, n, seed).unwrap());
    }

    #[test]
    fn enumeration_matches_brute_force(dim in 1usize..=4, p in 0u32..=6, qi in 0usize..3) {
        let q = [0.5, 0.75, 1.0][qi];
        let got = enumerate_indices(dim, &Truncation::new(p, q).unwrap());
        let mut want = Vec::new();
        let total = (p as usize + 1).pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let a: Vec<u32> = (0..dim).map(|_| { let v = (c % (p as usize + 1)) as u32; c /= p as usize + 1; v }).collect();
            let s: f64 = a.iter().map(|&v| (v as f64).powf(q)).sum();
            if s <= (p as f64).powf(q) * (1.0 + 1e-9) {
                want.push(MultiIndex(a));
            }
        }
        prop_assert_eq!(got.len(), want.len());
        for w in &want {
            prop_assert!(got.contains(w));
        }
        prop_assert!(got.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()));
        prop_assert!(got[0].is_zero());
    }

    #[test]
    fn validation_error_is_affine_invariant(
        truth in prop::collection::vec(-10.0..10.0f64, 3..40),
        noise in prop::collection::vec(-1.0..1.0f64, 40),
        a in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        b in -100.0..100.0f64,
    ) {
        prop_assume!(truth.iter().any(|t| (t - truth[0]).abs() > 1e-3));
        let pred: Vec<f64> = truth.iter().zip(&noise).map(|(t, e)| t + e).collect();
        let e1 = validation_error(&pred, &truth).unwrap();
        let tp: Vec<f64> = pred.iter().map(|v| a * v + b).collect();
        let tt: Vec<f64> = truth.iter().map(|v| a * v + b).collect();
        let e2 = validation_error(&tp, &tt).unwrap();
        prop_assert!((e1 - e2).abs() <= 1e-8 * (1.0 + e1));
        prop_assert!(e1 >= 0.0);
        prop_assert_eq!(validation_error(&truth, &truth).unwrap(), 0.0);
    }

    #[test]
    fn coverage_is_bounded_and_order_free(
        pts in prop::collection::vec((-3.0..3.0f64, 0.0..2.0f64, -4.0..4.0f64), 1..50),
        rot in 0usize..50,
    ) {
        let iv: Vec<Interval> = pts.iter().map(|(l, w, _)| Interval::new(*l, l + w, 0.9).unwrap()).collect();
        let truth: Vec<f64> = pts.iter().map(|p| p.2).collect();
        let c = coverage_probability(&iv, &truth).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let k = rot % iv.len();
        let (mut iv2, mut t2) = (iv.clone(), truth.clone());
        iv2.rotate_left(k);
        t2.rotate_left(k);
        iv2.reverse();
        t2.reverse();
        prop_assert_eq!(c, coverage_probability(&iv2, &t2).unwrap());
    }

    #[test]
    fn percentile_intervals_nest_inside_range(
        v in prop::collection::vec(-1e3..1e3f64, 2..200),
        a1 in 0.001..0.499f64,
        a2 in 0.001..0.499f64,
    ) {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
        let (small, big) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let wide = percentile_interval(&v, small).unwrap();
        let narrow = percentile_interval(&v, big).unwrap();
        prop_assert!(wide.lower >= lo && wide.upper <= hi);
        prop_assert!(wide.encloses(&narrow));
        prop_assert!(narrow.lower <= narrow.upper);
    }

    #[test]
    fn rho_ignores_observation_order(
        pairs in prop::collection::vec((-5.0..5.0f64, 0.5..4.0f64), 1..40),
        k in 0usize..40,
    ) {
        let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let l: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let r1 = estimate_rho(&y, &l).unwrap();
        let (mut y2, mut l2) = (y.clone(), l.clone());
        let k = k % y.len();
        y2.rotate_left(k);
        l2.rotate_left(k);
        let r2 = estimate_rho(&y2, &l2).unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-13 * (1.0 + r1.abs()));
    }

    #[test]
    fn merged_expansion_equals_composite(
        r in rv(3), n1 in 1usize..12, n2 in 1usize..12, s1 in any::<u64>(), s2 in any::<u64>(),
        rho in -3.0..3.0f64, seed in any::<u64>(),
    ) {
        let lf = pce_on(r.clone(), n1, s1);
        let delta = pce_on(r.clone(), n2, s2);
        let merged = merge_expansions(rho, &lf, &delta).unwrap();
        prop_assert!(merged.indices().windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()));
        let model = MfModel {
            lf: LowFidelity::Pce(lf.clone()),
            rho,
            rho_method: RhoMethod::MeanRatio,
            delta: delta.clone(),
            merged: Some(merged.clone()),
            diagnostic: None,
        };
        for x in lhs_sample(&r, 20, seed).unwrap() {
            let want = rho * lf.predict(&x).unwrap() + delta.predict(&x).unwrap();
            let a = merged.predict(&x).unwrap();
            let b = model.predict_composite(&x).unwrap();
            prop_assert!((a - want).abs() <= 1e-12 * (1.0 + want.abs()));
            prop_assert!((b - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn truss_is_linear_in_loads(u in prop::collection::vec(0.0..1.0f64, 10), c in 0.1..10.0f64) {
        let x: Vec<f64> = vec![
            1.8e11 + 6e10 * u[0], 1.8e11 + 6e10 * u[1], 1.5e-3 + 1e-3 * u[2], 7e-4 + 6e-4 * u[3],
            3e4 + 4e4 * u[4], 3e4 + 4e4 * u[5], 3e4 + 4e4 * u[6], 3e4 + 4e4 * u[7], 3e4 + 4e4 * u[8], 3e4 + 4e4 * u[9],
        ];
        let w = truss_hf(&x).unwrap();
        let mut scaled = x.clone();
        for v in &mut scaled[4..] { *v *= c; }
        prop_assert!((truss_hf(&scaled).unwrap() - c * w).abs() <= 1e-9 * c * w);
        // stiffer material, proportionally smaller deflection
        let mut stiff = x.clone();
        stiff[0] *= c;
        stiff[1] *= c;
        prop_assert!((truss_hf(&stiff).unwrap() - w / c).abs() <= 1e-9 * w / c);
        // superposition of two load cases
        let mut left = x.clone();
        let mut right = x.clone();
        for k in 0..6 {
            if k < 3 { right[4 + k] = 0.0 } else { left[4 + k] = 0.0 }
        }
        let sum = truss_hf(&left).unwrap() + truss_hf(&right).unwrap();
        prop_assert!((sum - w).abs() <= 1e-9 * w);
    }

    #[test]
    fn models_round_trip_through_json(r in rv(3), n in 1usize..15, s in any::<u64>(), fam in 0usize..3, par in 0.0..5.0f64) {
        let pce = pce_on(r, n, s);
        let back: PceModel = serde_json::from_str(&serde_json::to_string(&pce).unwrap()).unwrap();
        prop_assert_eq!(&back, &pce);

        let mf = MfModel::constant(LowFidelity::Pce(pce.clone()), pce.rv().clone(), 0.5);
        let back: MfModel = serde_json::from_str(&serde_json::to_string(&mf).unwrap()).unwrap();
        prop_assert_eq!(back, mf);

        let an = MfModel::constant(LowFidelity::Analytic(AnalyticModel::builtin("oneD_lf").unwrap()), pce.rv().clone(), 1.0);
        let back: MfModel = serde_json::from_str(&serde_json::to_string(&an).unwrap()).unwrap();
        prop_assert_eq!(back, an);

        let noise = NoiseModel::new(NoiseFamily::ALL[fam], par).unwrap();
        let back: NoiseModel = serde_json::from_str(&serde_json::to_string(&noise).unwrap()).unwrap();
        prop_assert_eq!(back, noise);

        for m in pce.rv().marginals() {
            let back: Marginal = serde_json::from_str(&serde_json::to_string(m).unwrap()).unwrap();
            prop_assert_eq!(&back, m);
        }
    }
}
