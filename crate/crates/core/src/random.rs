//! Seeded generators for random finite markets, information enlargements
//! and strategies. All output is exact; the same seed always yields the same
//! instance.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::market::{strategy_from_risky, Market, Strategy};
use crate::probspace::{Filtration, FiniteProbSpace, Partition};
use crate::scalar::{rat, Rational, Scalar};
use crate::sensitivity::Signal;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for [`random_market`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_periods: usize,
    /// Including the numéraire.
    pub max_assets: usize,
    pub max_children: usize,
    /// Cap on the number of states (leaves).
    pub max_states: usize,
    /// Probability that node prices are drawn around a martingale measure.
    pub martingale_bias: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_periods: 4,
            max_assets: 3,
            max_children: 4,
            max_states: 40,
            martingale_bias: 0.6,
        }
    }
}

const FACTORS: [(i64, i64); 13] = [
    (1, 4),
    (1, 3),
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (1, 1),
    (5, 4),
    (4, 3),
    (3, 2),
    (2, 1),
    (5, 2),
    (3, 1),
];

const RATES: [(i64, i64); 4] = [(0, 1), (1, 20), (1, 10), (1, 4)];

fn factor(rng: &mut Rng64) -> Rational {
    let (n, d) = FACTORS[rng.gen_range(0..FACTORS.len())];
    rat(n, d)
}

/// Random positive weights summing to one.
fn simplex(rng: &mut Rng64, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| rat(x, total)).collect()
}

/// One-step gross returns with `Σ q_c f_c = 1` and every `f_c > 0`.
fn martingale_factors(rng: &mut Rng64, q: &[Rational]) -> Vec<Rational> {
    let k = q.len();
    for _ in 0..32 {
        let mut f: Vec<Rational> = (0..k - 1).map(|_| factor(rng)).collect();
        let used = q[..k - 1]
            .iter()
            .zip(&f)
            .fold(Rational::from_int(0), |acc, (a, b)| acc + a * b);
        let last = (Rational::from_int(1) - used) / q[k - 1].clone();
        if last > Rational::from_int(0) && f.iter().any(|x| *x != last) {
            f.push(last);
            return f;
        }
    }
    vec![Rational::from_int(1); k]
}

/// Merges children whose risky factors coincide so that sibling states stay
/// distinguishable by prices.
fn merge_duplicates(
    (probs, factors): (Vec<Rational>, Vec<Vec<Rational>>),
) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let column = |c: usize| factors.iter().map(|f| f[c].clone()).collect::<Vec<_>>();
    let mut keep: Vec<usize> = Vec::new();
    let mut merged: Vec<Rational> = Vec::new();
    for c in 0..probs.len() {
        match keep.iter().position(|&k| column(k) == column(c)) {
            Some(j) => merged[j] = merged[j].clone() + probs[c].clone(),
            None => {
                keep.push(c);
                merged.push(probs[c].clone());
            }
        }
    }
    let factors = factors
        .iter()
        .map(|f| keep.iter().map(|&c| f[c].clone()).collect())
        .collect();
    (merged, factors)
}

struct Node {
    path_prob: Rational,
    /// Discounted prices of risky assets.
    prices: Vec<Rational>,
    bank: Rational,
    /// `time × asset` history (discounted risky, then bank) per time.
    history: Vec<(Vec<Rational>, Rational)>,
}

/// Builds a random tree market. `children(t)` picks the branching at depth `t`;
/// `step` draws risky factors for a node given its child count.
fn build_tree(
    rng: &mut Rng64,
    periods: usize,
    risky: usize,
    max_states: usize,
    mut children: impl FnMut(&mut Rng64, usize) -> usize,
    mut step: impl FnMut(&mut Rng64, usize) -> (Vec<Rational>, Vec<Vec<Rational>>),
) -> Market<Rational> {
    let mut level = vec![Node {
        path_prob: Rational::from_int(1),
        prices: vec![Rational::from_int(1); risky],
        bank: Rational::from_int(1),
        history: vec![(vec![Rational::from_int(1); risky], Rational::from_int(1))],
    }];
    for t in 0..periods {
        let mut next = Vec::new();
        let remaining = level.len();
        for (idx, node) in level.iter().enumerate() {
            // leave room so the leaf count stays within the cap
            let budget = (max_states.saturating_sub(next.len()))
                .saturating_sub(remaining - idx - 1)
                .max(1);
            let k = children(rng, t).clamp(1, budget.max(1));
            let (probs, factors) = merge_duplicates(step(rng, k));
            let k = probs.len();
            let (rn, rd) = RATES[rng.gen_range(0..RATES.len())];
            let bank = node.bank.clone() * (Rational::from_int(1) + rat(rn, rd));
            for c in 0..k {
                let prices: Vec<Rational> = (0..risky)
                    .map(|i| node.prices[i].clone() * factors[i][c].clone())
                    .collect();
                let mut history = node.history.clone();
                history.push((prices.clone(), bank.clone()));
                next.push(Node {
                    path_prob: node.path_prob.clone() * probs[c].clone(),
                    prices,
                    bank: bank.clone(),
                    history,
                });
            }
        }
        level = next;
    }
    let n = level.len();
    let ids = (0..n).map(|i| format!("w{i}")).collect();
    let space =
        FiniteProbSpace::new(ids, level.iter().map(|l| l.path_prob.clone()).collect()).unwrap();
    let mut names = vec!["bank".to_string()];
    names.extend((0..risky).map(|i| format!("s{}", i + 1)));
    let grid = (0..=periods)
        .map(|t| {
            let mut slice = vec![level.iter().map(|l| l.history[t].1.clone()).collect()];
            for i in 0..risky {
                slice.push(
                    level
                        .iter()
                        .map(|l| l.history[t].0[i].clone() * l.history[t].1.clone())
                        .collect(),
                );
            }
            slice
        })
        .collect();
    Market::new(space, names, grid, 0).expect("generated market is valid")
}

/// A random market within `shape`; roughly `martingale_bias` of the nodes
/// admit a one-step martingale measure by construction, the rest are free.
pub fn random_market(rng: &mut Rng64, shape: &Shape) -> Market<Rational> {
    let periods = rng.gen_range(1..=shape.max_periods);
    let risky = rng.gen_range(1..shape.max_assets.max(2));
    let max_children = shape.max_children;
    let bias = shape.martingale_bias;
    build_tree(
        rng,
        periods,
        risky,
        shape.max_states,
        |rng, _| rng.gen_range(2..=max_children.max(2)),
        |rng, k| {
            let probs = simplex(rng, k);
            let factors = if rng.gen_bool(bias) {
                let q = simplex(rng, k);
                (0..risky).map(|_| martingale_factors(rng, &q)).collect()
            } else {
                (0..risky)
                    .map(|_| (0..k).map(|_| factor(rng)).collect())
                    .collect()
            };
            (probs, factors)
        },
    )
}

/// Two children per node, a bank account and one or two risky assets priced
/// by a common one-step martingale measure: complete and arbitrage-free.
pub fn random_binomial(rng: &mut Rng64, max_periods: usize) -> Market<Rational> {
    let periods = rng.gen_range(1..=max_periods);
    let risky = rng.gen_range(1..=2);
    build_tree(
        rng,
        periods,
        risky,
        usize::MAX,
        |_, _| 2,
        |rng, k| {
            let probs = simplex(rng, k);
            let ups = [rat(5, 4), rat(4, 3), rat(3, 2), rat(2, 1)];
            let downs = [rat(1, 2), rat(2, 3), rat(3, 4), rat(4, 5)];
            let u = ups.choose(rng).unwrap().clone();
            let d = downs.choose(rng).unwrap().clone();
            let one = Rational::from_int(1);
            let q_up = (one.clone() - d.clone()) / (u.clone() - d.clone());
            let q = vec![q_up.clone(), one - q_up];
            let mut factors = vec![vec![u, d]];
            for _ in 1..risky {
                factors.push(martingale_factors(rng, &q));
            }
            (probs, factors)
        },
    )
}

/// A one-period market with one risky asset and two or three outcomes that
/// straddle the bank account.
pub fn random_one_period(rng: &mut Rng64) -> Market<Rational> {
    loop {
        let m = build_tree(
            rng,
            1,
            1,
            usize::MAX,
            |rng, _| rng.gen_range(2..=3),
            |rng, k| {
                let probs = simplex(rng, k);
                let q = simplex(rng, k);
                (probs, vec![martingale_factors(rng, &q)])
            },
        );
        if m.num_states() >= 2 {
            return m;
        }
    }
}

/// How an added signal relates to prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// Independent of everything.
    Independent,
    /// Revealed at a random time with a law depending only on the price
    /// history up to that time.
    Adapted,
    /// Revealed at time 0 with a law depending on the terminal price history.
    Informative,
}

/// Splits every state into signal-labelled copies and returns the market
/// with the enlarged ambient filtration and the signal.
pub fn enlarge_market(
    rng: &mut Rng64,
    market: &Market<Rational>,
    kind: SignalKind,
) -> (Market<Rational>, Signal) {
    let e = market.evolution();
    let h = market.horizon();
    let reveal = match kind {
        SignalKind::Adapted => rng.gen_range(0..=h),
        _ => 0,
    };
    let labels = ["g", "b"];
    // conditional law of "g" per E-block at the relevant time
    let law_time = match kind {
        SignalKind::Independent => 0,
        SignalKind::Adapted => reveal,
        SignalKind::Informative => h,
    };
    let part = e.at(law_time);
    let mut law: Vec<Rational> = (0..part.num_blocks())
        .map(|_| rat(rng.gen_range(1..=4), 5))
        .collect();
    if kind == SignalKind::Informative && law.len() > 1 && law.iter().all(|x| *x == law[0]) {
        law[0] = if law[0] == rat(4, 5) {
            rat(1, 5)
        } else {
            rat(4, 5)
        };
    }
    let n = market.num_states();
    let mut ids = Vec::new();
    let mut probs = Vec::new();
    let mut origin = Vec::new();
    let mut values = Vec::new();
    for w in 0..n {
        let pg = law[part.block_of(w)].clone();
        for (l, weight) in [(0, pg.clone()), (1, Rational::from_int(1) - pg)] {
            ids.push(format!("{}-{}", market.space().ids()[w], labels[l]));
            probs.push(market.probs()[w].clone() * weight);
            origin.push(w);
            values.push(labels[l].to_string());
        }
    }
    let space = FiniteProbSpace::new(ids, probs).expect("split space is valid");
    let grid = market
        .prices()
        .iter()
        .map(|slice| {
            slice
                .iter()
                .zip(market.scales())
                .map(|(row, s)| origin.iter().map(|&w| row[w].clone() * s.clone()).collect())
                .collect()
        })
        .collect();
    let split = Market::new(space, market.assets().to_vec(), grid, market.numeraire())
        .expect("split market is valid");
    let signal = Signal::constant("signal", reveal, values);
    let f = crate::sensitivity::enlarge(split.evolution(), std::slice::from_ref(&signal))
        .expect("enlargement is a filtration");
    (split.with_ambient(f).expect("F contains E"), signal)
}

/// Random coarsening of a partition.
pub fn random_coarsening(rng: &mut Rng64, partition: &Partition) -> Partition {
    let groups = rng.gen_range(1..=partition.num_blocks());
    let label: Vec<usize> = (0..partition.num_blocks())
        .map(|_| rng.gen_range(0..groups))
        .collect();
    let atoms: Vec<usize> = (0..partition.num_atoms())
        .map(|w| label[partition.block_of(w)])
        .collect();
    Partition::from_labels(&atoms)
}

/// A random filtration `I` with `E ⊆ I ⊆ F`.
pub fn random_intermediate(rng: &mut Rng64, e: &Filtration, f: &Filtration) -> Filtration {
    let mut acc: Option<Partition> = None;
    let parts = (0..=f.horizon())
        .map(|t| {
            let j = random_coarsening(rng, f.at(t));
            let joined = match acc.take() {
                Some(prev) => prev.meet(&j),
                None => j,
            };
            acc = Some(joined.clone());
            joined.meet(e.at(t))
        })
        .collect();
    Filtration::new(parts).expect("intermediate filtration refines")
}

/// Random predictable strategy (w.r.t. `filtration`) starting from value 1.
pub fn random_strategy(
    rng: &mut Rng64,
    market: &Market<Rational>,
    filtration: &Filtration,
) -> Strategy<Rational> {
    let k = market.risky().len();
    let n = market.num_states();
    let h = market.horizon();
    let holdings: Vec<Vec<Vec<Rational>>> = (0..h)
        .map(|t| {
            let part = filtration.at(t);
            let draws: Vec<Vec<Rational>> = (0..part.num_blocks())
                .map(|_| (0..k).map(|_| rat(rng.gen_range(-4..=4), 4)).collect())
                .collect();
            (0..k)
                .map(|m| (0..n).map(|w| draws[part.block_of(w)][m].clone()).collect())
                .collect()
        })
        .collect();
    strategy_from_risky(market, &vec![Rational::from_int(1); n], &holdings)
}

/// Random terminal claim that depends on the price history only.
pub fn random_claim(rng: &mut Rng64, market: &Market<Rational>) -> Vec<Rational> {
    let part = market.evolution().terminal();
    let vals: Vec<Rational> = (0..part.num_blocks())
        .map(|_| rat(rng.gen_range(0..=8), rng.gen_range(1..=4)))
        .collect();
    (0..market.num_states())
        .map(|w| vals[part.block_of(w)].clone())
        .collect()
}

/// Converts an exact market to floating point.
pub fn to_float(market: &Market<Rational>) -> Market<f64> {
    let space = FiniteProbSpace::new(
        market.space().ids().to_vec(),
        market.probs().iter().map(Scalar::to_f64).collect(),
    )
    .expect("probabilities convert");
    let grid = market
        .prices()
        .iter()
        .map(|slice| {
            slice
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect()
        })
        .collect();
    Market::new(space, market.assets().to_vec(), grid, market.numeraire())
        .expect("float market is valid")
}
