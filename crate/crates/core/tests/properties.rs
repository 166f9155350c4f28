use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use secgame::generator::{generate_with_equilibrium, random_protective, sample_request};
use secgame::model::expected_outcomes;
use secgame::oracle::{solve_zero_sum_matrix, verify_equilibrium, BimatrixView};
use secgame::projection::{nearest_additive, subsets_up_to, SetFunctionTable};
use secgame::rational::{self, ratio, Rational};
use secgame::realize::realize_marginals;
use secgame::solver::{closed_form_outcomes, solve_nash};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// A table of small fractions on all sets of size at most `k`.
fn table() -> impl Strategy<Value = SetFunctionTable> {
    (2usize..=5)
        .prop_flat_map(|m| (Just(m), 1..=m))
        .prop_flat_map(|(m, k)| {
            let n = subsets_up_to(m, k).len();
            (Just(m), Just(k), prop::collection::vec((-30i64..=30, 1i64..=4), n))
        })
        .prop_map(|(m, k, vals)| {
            let entries = subsets_up_to(m, k).into_iter().zip(vals).map(|(s, (p, q))| (s, ratio(p, q)));
            SetFunctionTable::new(m, k, entries).unwrap()
        })
}

/// Marginal vectors built as a convex mix of a few `k`-sets, so they are
/// always feasible.
fn marginals() -> impl Strategy<Value = (Vec<Rational>, usize)> {
    (2usize..=7)
        .prop_flat_map(|m| (Just(m), 1..m))
        .prop_flat_map(|(m, k)| {
            let set = prop::sample::subsequence((0..m).collect::<Vec<_>>(), k);
            (Just(m), Just(k), prop::collection::vec((set, 1i64..=5), 1..=4))
        })
        .prop_map(|(m, k, mix)| {
            let total: i64 = mix.iter().map(|(_, w)| w).sum();
            let mut x = vec![Rational::zero(); m];
            for (set, w) in mix {
                for i in set {
                    x[i] += ratio(w, total);
                }
            }
            (x, k)
        })
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn numerals_round_trip(p in -10_000i64..10_000, q in 1i64..500) {
        let r = ratio(p, q);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn generated_games_solve_to_verified_equilibria(seed in 5_000u64..1_000_000) {
        let req = sample_request(seed);
        let (game, planted) = generate_with_equilibrium(&req).unwrap();
        let eq = solve_nash(&game).unwrap();
        prop_assert_eq!(eq.ty, planted.ty);
        let verdict = verify_equilibrium(&game, &eq.profile).unwrap();
        prop_assert!(verdict.is_equilibrium, "{:?}", verdict.witness);
        prop_assert_eq!(closed_form_outcomes(&game, &eq).unwrap(), expected_outcomes(&game, &eq.profile).unwrap());
    }

    #[test]
    fn zero_sum_value_matches_matrix_game(seed in 0u64..1_000_000) {
        let game = random_protective(seed, true);
        let view = BimatrixView::from_game(&game);
        prop_assume!(view.rows.len() * view.cols.len() <= 400);
        let lp = solve_zero_sum_matrix(&view.a).unwrap();
        let eq = solve_nash(&game).unwrap();
        prop_assert_eq!(&eq.v_a, &lp.value);
        prop_assert_eq!(eq.v_d, -lp.value);
    }

    #[test]
    fn projection_residual_is_orthogonal(f in table()) {
        let p = nearest_additive(&f).unwrap();
        let sets = subsets_up_to(f.m(), f.k());
        let residual = f.residual(&p.x);
        for i in 0..f.m() {
            let dot: Rational = sets.iter().zip(&residual).filter(|(s, _)| s.contains(&i)).map(|(_, r)| r.clone()).sum();
            prop_assert!(dot.is_zero());
        }
        prop_assert_eq!(f.distance_sq(&p.x), p.distance_sq);
    }

    #[test]
    fn realization_reproduces_marginals((x, k) in marginals()) {
        let s = realize_marginals(&x, k).unwrap();
        prop_assert_eq!(s.marginals(x.len()), x.clone());
        prop_assert_eq!(s.total(), Rational::one());
        prop_assert!(s.support.len() <= x.len());
        for (set, p) in &s.support {
            prop_assert_eq!(set.len(), k);
            prop_assert!(p.is_positive());
        }
    }
}
