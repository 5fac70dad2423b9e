use proptest::prelude::*;

use pslab_core::certreal::{
    floor_pow, frac_pow, gap_eval, gap_inverse, inverse_second_derivative, inverse_third_derivative_ratio, solve_inverse_f64, FloorCursor,
};
use pslab_core::counting::{kap_count, oracle_pair_table, pair_count, triplet_count, ORACLE_LENGTH_CAP};
use pslab_core::oracles::{exact_phase, floor_pow_big, inverse_derivatives_fd, pair_table_brute, triplet_brute};
use pslab_core::{AlphaContext, Exponent, PrecisionPolicy};

fn exponents() -> impl Strategy<Value = Exponent> {
    (2u64..40).prop_flat_map(|q| (q + 1..2 * q).prop_map(move |p| Exponent::new(p, q).unwrap()))
}

fn moderate_exponents() -> impl Strategy<Value = Exponent> {
    exponents().prop_filter("beta <= 6", |e| e.to_f64() >= 7.0 / 6.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn floor_and_frac_agree_with_big_roots(e in exponents(), n in 1u64..5_000_000_000) {
        let ctx = AlphaContext::new(e);
        let f = floor_pow(n, &ctx);
        prop_assert_eq!(num_bigint::BigUint::from(f), floor_pow_big(n, e));
        let fr = frac_pow(n, &ctx);
        prop_assert!(0.0 <= fr.lo && fr.hi < 1.0);
        let want = exact_phase(&ctx, n, 1, 0, 1);
        if want > 1e-15 && want < 1.0 - 1e-15 {
            prop_assert!(fr.lo - 1e-15 <= want && want <= fr.hi + 1e-15, "{:?} vs {}", fr, want);
        }
    }

    #[test]
    fn cursor_matches_pointwise(e in exponents(), start in 1u64..1_000_000_000_000, len in 1u64..300) {
        let ctx = AlphaContext::new(e);
        let got: Vec<u128> = FloorCursor::new(&ctx, start, start + len).take(len as usize).collect();
        prop_assert_eq!(got.len() as u64, len);
        for (i, v) in got.iter().enumerate() {
            prop_assert_eq!(*v, floor_pow(start + i as u64, &ctx));
        }
        prop_assert!(got.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gap_inverse_inverts(e in moderate_exponents(), r in 1u64..50, extra in 0.0f64..1e7) {
        let ctx = AlphaContext::new(e);
        let t = (r as f64).powf(e.to_f64()) + 1.0 + extra;
        prop_assume!(solve_inverse_f64(r as f64, 1.5 * t, e.to_f64()) < 1e15);
        let inv = gap_inverse(r, t, &ctx).unwrap();
        prop_assert!(inv.value.lo >= 0.0);
        prop_assert_eq!(inv.floor as f64, inv.value.lo.floor());
        let lo = gap_eval(r, inv.value.lo, &ctx).unwrap();
        let hi = gap_eval(r, inv.value.hi, &ctx).unwrap();
        prop_assert!(lo.lo <= t && t <= hi.hi);
        // monotone in t
        let inv2 = gap_inverse(r, t * 1.5, &ctx).unwrap();
        prop_assert!(inv2.value.lo >= inv.value.hi);
    }

    #[test]
    fn solutions_sit_right_of_c_r(e in moderate_exponents(), c in 0.1f64..10.0, d in 100u64..10_000_000) {
        let ctx = AlphaContext::new(e);
        let a = e.to_f64();
        prop_assume!(solve_inverse_f64(1.0, d as f64, a) < 1e15);
        let f1c = (c + 1.0).powf(a) - c.powf(a);
        let r_max = ((d as f64).powf(1.0 / a) / f1c.powf(1.0 / a)).floor() as u64;
        for r in [1, r_max / 2, r_max].into_iter().filter(|&r| r >= 1) {
            let y = gap_inverse(r, d as f64, &ctx).unwrap().value.mid();
            prop_assert!(y >= c * r as f64 * (1.0 - 1e-9), "r={} y={} c={}", r, y, c);
        }
    }
}

#[test]
fn unreachable_indices_are_reported() {
    let ctx = AlphaContext::parse("40/39").unwrap();
    assert!(matches!(gap_inverse(1, 1e9, &ctx), Err(pslab_core::Error::ResourceLimit { .. })));
}

#[test]
fn halving_the_inverse_tolerance_keeps_counts() {
    for a in ["1.5", "1.7", "4/3"] {
        let coarse = AlphaContext::parse(a).unwrap();
        let fine = coarse.clone().with_policy(PrecisionPolicy { inverse_rel_tol: 0.5e-12, ..Default::default() });
        for d in [7u64, 100, 999, 12_345] {
            assert_eq!(pair_count(&coarse, d).unwrap(), pair_count(&fine, d).unwrap(), "alpha={a} d={d}");
        }
    }
}

#[test]
fn independent_table_agrees_with_counts() {
    for a in ["1.5", "1.7", "1.2", "9/7"] {
        let ctx = AlphaContext::parse(a).unwrap();
        let dmax = if a == "1.2" { 10 } else { 150 };
        let brute = pair_table_brute(ctx.exponent(), dmax);
        assert_eq!(oracle_pair_table(&ctx, dmax, ORACLE_LENGTH_CAP).unwrap(), brute, "alpha={a}");
        for (&d, &n) in &brute {
            assert_eq!(pair_count(&ctx, d).unwrap().pair_count, n, "alpha={a} d={d}");
        }
    }
}

#[test]
fn triplets_against_brute_force() {
    let ctx = AlphaContext::parse("1.5").unwrap();
    for x in [1u64, 2, 3, 10, 40] {
        assert_eq!(triplet_count(&ctx, x).unwrap(), triplet_brute(ctx.exponent(), x), "x={x}");
    }
}

#[test]
fn kap_counts_against_direct_search() {
    let ctx = AlphaContext::parse("1.5").unwrap();
    let e = ctx.exponent();
    let seq: Vec<u64> = (0..10_000).map(|n| floor_pow_big(n, e).try_into().unwrap()).collect();
    for d in [3u64, 20, 77] {
        for k in [3u32, 4] {
            let mut want = 0;
            // Every gap past n = d^2 exceeds d for alpha = 3/2.
            for r in 1..=d as usize {
                for n in 1..(d * d) as usize {
                    if (1..k as usize).all(|j| seq[n + j * r] - seq[n + (j - 1) * r] == d) {
                        want += 1;
                    }
                }
            }
            assert_eq!(kap_count(&ctx, k, d).unwrap(), want, "k={k} d={d}");
        }
    }
}

#[test]
fn derivative_identities_against_finite_differences() {
    for a in ["1.3", "1.5", "1.7"] {
        let ctx = AlphaContext::parse(a).unwrap();
        for r in [1u64, 5, 20] {
            for d in [1_000u64, 100_000] {
                let (fd2, fd3) = inverse_derivatives_fd(r as f64, d as f64, ctx.alpha(), 1e-3 * r as f64);
                let y2 = inverse_second_derivative(r, d, &ctx).unwrap();
                let y3 = inverse_third_derivative_ratio(r, d, &ctx).unwrap();
                assert!(((y2 - fd2) / fd2).abs() <= 1e-5, "alpha={a} r={r} d={d}: {y2} vs {fd2}");
                assert!(((y3 - fd3) / fd3).abs() <= 1e-4, "alpha={a} r={r} d={d}: {y3} vs {fd3}");
            }
        }
    }
}
