#![allow(dead_code)]

use rand::Rng;
use rwval_core::market::Market;
use rwval_core::noarb::find_emms;
use rwval_core::probspace::{conditional_expectation, Filtration};
use rwval_core::random::{self, Rng64, Shape, SignalKind};
use rwval_core::{rat, Rational};

pub fn zero() -> Rational {
    rat(0, 1)
}

/// Random terminal variable measurable w.r.t. `part`.
pub fn random_variable(rng: &mut Rng64, f: &Filtration, t: usize) -> Vec<Rational> {
    let part = f.at(t);
    let vals: Vec<Rational> = (0..part.num_blocks())
        .map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
        .collect();
    (0..f.num_atoms())
        .map(|w| vals[part.block_of(w)].clone())
        .collect()
}

/// Backward construction `X_t = E(X_T | E_t)` of a martingale.
pub fn backward_martingale(
    rng: &mut Rng64,
    e: &Filtration,
    weights: &[Rational],
) -> Vec<Vec<Rational>> {
    let terminal = random_variable(rng, e, e.horizon());
    (0..=e.horizon())
        .map(|t| conditional_expectation(weights, &terminal, e.at(t)))
        .collect()
}

/// A random market that admits an equivalent martingale measure.
pub fn viable_market(rng: &mut Rng64) -> Market<Rational> {
    let shape = Shape {
        martingale_bias: 1.0,
        max_states: 24,
        ..Shape::default()
    };
    loop {
        let m = random::random_market(rng, &shape);
        if find_emms(&m, m.evolution(), &zero())
            .unwrap()
            .has_equivalent()
        {
            return m;
        }
    }
}

/// A binomial market enlarged by a signal that leaves it sensitive.
pub fn sensitive_enlargement(rng: &mut Rng64, periods: usize) -> Market<Rational> {
    let m = random::random_binomial(rng, periods);
    let kind = if rng.gen_bool(0.5) {
        SignalKind::Independent
    } else {
        SignalKind::Adapted
    };
    random::enlarge_market(rng, &m, kind).0
}

/// Any of the three enlargement kinds over a small viable market.
pub fn any_enlargement(rng: &mut Rng64) -> Market<Rational> {
    let m = if rng.gen_bool(0.5) {
        random::random_binomial(rng, 2)
    } else {
        let shape = Shape {
            max_periods: 2,
            max_states: 12,
            ..Shape::default()
        };
        random::random_market(rng, &shape)
    };
    let kind = [
        SignalKind::Independent,
        SignalKind::Adapted,
        SignalKind::Informative,
    ][rng.gen_range(0..3)];
    random::enlarge_market(rng, &m, kind).0
}
