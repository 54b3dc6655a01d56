mod common;

use common::zero;
use proptest::prelude::*;
use rwval_core::market::{benchmark, discount, nominal, normalize, value_process};
use rwval_core::random::{self, Shape};
use rwval_core::{rat, Rational};

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(rat(0, 1), |acc, (x, y)| acc + x * y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_process_forms_agree(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = random::random_market(&mut rng, &Shape::default());
        let h = random::random_strategy(&mut rng, &m, m.ambient());
        let v = value_process(&h, &m, &zero()).unwrap();
        let p = discount(&m);
        let price = |t: usize, w: usize| -> Vec<Rational> {
            p[t].iter().map(|row| row[w].clone()).collect()
        };
        for w in 0..m.num_states() {
            let mut gains = dot(&h.holding(0, w), &price(0, w));
            prop_assert_eq!(&v.values[0][w], &gains);
            for t in 1..=m.horizon() {
                let diff: Vec<Rational> = price(t, w)
                    .iter()
                    .zip(price(t - 1, w))
                    .map(|(a, b)| a - b)
                    .collect();
                gains += dot(&h.holding(t, w), &diff);
                prop_assert_eq!(&v.values[t][w], &gains);
                prop_assert_eq!(&v.values[t][w], &dot(&h.holding(t, w), &price(t, w)));
            }
        }
    }

    #[test]
    fn numeraire_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = random::random_market(&mut rng, &Shape::default());
        let a = m.numeraire();
        for b in 0..m.num_assets() {
            let back = m.with_numeraire(b).unwrap().with_numeraire(a).unwrap();
            prop_assert_eq!(discount(&back), discount(&m));
        }
        let restored: Vec<Vec<Vec<Rational>>> = discount(&m)
            .iter()
            .enumerate()
            .map(|(t, slice)| {
                slice
                    .iter()
                    .map(|row| row.iter().zip(&m.numeraire_grid()[t]).map(|(x, s)| x * s).collect())
                    .collect()
            })
            .collect();
        prop_assert_eq!(&restored, m.prices());
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = random::random_market(&mut rng, &Shape::default());
        let h = random::random_strategy(&mut rng, &m, m.ambient());
        let once = normalize(&h, &m, &zero()).unwrap();
        let v = value_process(&once.strategy, &m, &zero()).unwrap();
        prop_assert!(v.initial().iter().all(|x| *x == rat(1, 1)));
        prop_assert!(v.min() > rat(0, 1));
        let twice = normalize(&once.strategy, &m, &zero()).unwrap();
        prop_assert_eq!(twice.shift, rat(1, 1));
        prop_assert_eq!(twice.strategy, once.strategy);
    }

    #[test]
    fn benchmark_ignores_units(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = random::random_market(&mut rng, &Shape::default());
        let f = m.ambient();
        let v = value_process(&random::random_strategy(&mut rng, &m, f), &m, &zero()).unwrap();
        let w = value_process(&random::random_strategy(&mut rng, &m, f), &m, &zero()).unwrap();
        let w = normalize_positive(w.values);
        let v = normalize_positive(v.values);
        prop_assert_eq!(
            benchmark(&nominal(&v, &m), &nominal(&w, &m)),
            benchmark(&v, &w)
        );
    }
}

/// Shifts a grid so every entry is at least 1.
fn normalize_positive(grid: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let low = grid.iter().flatten().min().cloned().unwrap();
    let shift = rat(1, 1) - low.clone().min(rat(0, 1));
    grid.into_iter()
        .map(|r| r.into_iter().map(|x| x + shift.clone()).collect())
        .collect()
}
