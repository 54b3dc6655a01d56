//! Growth-optimal portfolio, benchmarked valuation and replication.
//!
//! The GOP is solved one node at a time. At a node with a unique one-step
//! martingale measure `q` the log-optimal wealth ratios are `p_c / q_c`
//! exactly. Elsewhere a damped Newton iteration runs in `f64`, the fractions
//! are rounded to nearby simple rationals and the first-order condition is
//! re-checked in the caller's arithmetic; a node whose rounded optimum fails
//! the exact check is reported as uncertified together with its residual.

use crate::error::{Error, NodeId, Result};
use crate::linalg::{independent_columns, min_norm_solve, rank, solve, transpose, Matrix};
use crate::market::{benchmark, discount, value_process_in, Grid, Market, Strategy, ValueProcess};
use crate::noarb::{
    evolution_system, find_emms, is_complete, rnp_from_measure, EmmStatus, Measure,
};
use crate::probspace::{
    block_mean, classify_process, conditional_expectation, mass, Classification, Filtration,
    Partition, ProcessKind,
};
use crate::scalar::{simplest_rational_near, Rational, Scalar};

const NEWTON_ITERS: usize = 200;
const MAX_DENOMINATOR: i64 = 1_000_000;

/// Optimum at one node.
#[derive(Debug, Clone)]
pub struct NodeGop<S> {
    pub node: NodeId,
    pub children: Vec<usize>,
    /// `ℙ(child | node)`.
    pub probs: Vec<S>,
    /// Wealth ratio `W_child / W_node` per child.
    pub growth: Vec<S>,
    /// Fraction of wealth in each asset at the node.
    pub fractions: Vec<S>,
    /// Unique one-step martingale measure: closed-form optimum.
    pub complete: bool,
    /// More assets than independent payoffs; holdings are the minimum-norm choice.
    pub redundant: bool,
    /// First-order condition verified in the working arithmetic.
    pub certified: bool,
    /// Largest absolute first-order-condition residual.
    pub residual: f64,
    /// `Σ_c p_c log g_c`.
    pub expected_log_growth: f64,
}

#[derive(Debug, Clone)]
pub struct GopResult<S> {
    pub strategy: Strategy<S>,
    /// Discounted wealth, `W_0 = 1`.
    pub wealth: ValueProcess<S>,
    pub nodes: Vec<NodeGop<S>>,
}

impl<S: Scalar> GopResult<S> {
    pub fn certified(&self) -> bool {
        self.nodes.iter().all(|n| n.certified)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeGop<S>> {
        self.nodes.iter().find(|n| n.node == id)
    }
}

fn f64_solve(a: &Matrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    solve(a, b, &1e-14)
}

/// Maximizes `Σ p_c ln(1 + d_c · x)` by damped Newton steps.
fn newton(p: &[f64], d: &[Vec<f64>]) -> Vec<f64> {
    let k = d.first().map_or(0, Vec::len);
    let mut x = vec![0.0; k];
    if k == 0 {
        return x;
    }
    let objective = |x: &[f64]| -> Option<f64> {
        let mut f = 0.0;
        for (pc, dc) in p.iter().zip(d) {
            let g = 1.0 + dc.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            if g <= 0.0 {
                return None;
            }
            f += pc * g.ln();
        }
        Some(f)
    };
    let mut fx = objective(&x).expect("x = 0 is feasible");
    for _ in 0..NEWTON_ITERS {
        let mut grad = vec![0.0; k];
        let mut hess = vec![vec![0.0; k]; k];
        for (pc, dc) in p.iter().zip(d) {
            let g = 1.0 + dc.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..k {
                grad[i] += pc * dc[i] / g;
                for j in 0..k {
                    hess[i][j] += pc * dc[i] * dc[j] / (g * g);
                }
            }
        }
        if grad.iter().all(|v| v.abs() < 1e-15) {
            break;
        }
        let Some(step) = f64_solve(&hess, &grad) else {
            break;
        };
        let mut s = 1.0;
        let mut moved = false;
        while s > 1e-12 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + s * b).collect();
            if let Some(ft) = objective(&trial) {
                if ft >= fx {
                    x = trial;
                    fx = ft;
                    moved = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !moved || step.iter().all(|v| (s * v).abs() < 1e-16) {
            break;
        }
    }
    x
}

struct LocalOptimum<S> {
    growth: Vec<S>,
    certified: bool,
    residual: f64,
}

/// First-order residuals `Σ_c p_c d_c / g_c` for every risky column.
fn foc_residuals<S: Scalar>(p: &[S], d: &[Vec<S>], g: &[S]) -> Vec<S> {
    let k = d.first().map_or(0, Vec::len);
    (0..k)
        .map(|j| {
            p.iter()
                .zip(d)
                .zip(g)
                .fold(S::zero(), |acc, ((pc, dc), gc)| {
                    acc + pc.clone() * dc[j].clone() / gc.clone()
                })
        })
        .collect()
}

fn growth_from<S: Scalar>(d: &[Vec<S>], cols: &[usize], x: &[S]) -> Vec<S> {
    d.iter()
        .map(|dc| {
            cols.iter()
                .zip(x)
                .fold(S::one(), |acc, (&j, xj)| acc + dc[j].clone() * xj.clone())
        })
        .collect()
}

fn incomplete_optimum<S: Scalar>(p: &[S], d: &[Vec<S>], tol: &S) -> LocalOptimum<S> {
    let cols = independent_columns(&d.to_vec(), tol);
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let df: Vec<Vec<f64>> = d
        .iter()
        .map(|row| cols.iter().map(|&j| row[j].to_f64()).collect())
        .collect();
    let xf = newton(&pf, &df);
    let check = |x: &[S]| -> Option<(Vec<S>, Vec<S>)> {
        let g = growth_from(d, &cols, x);
        if g.iter().any(|v| *v <= S::zero()) {
            return None;
        }
        let r = foc_residuals(p, d, &g);
        Some((g, r))
    };
    let rounded: Option<Vec<S>> = xf
        .iter()
        .map(|&v| {
            simplest_rational_near(v, 1e-9 * v.abs().max(1.0), MAX_DENOMINATOR)
                .map(|r| S::from_rational(&r))
        })
        .collect();
    if let Some(x) = rounded {
        if let Some((g, r)) = check(&x) {
            if r.iter().all(|v| v.is_zero_tol(tol)) {
                let residual = r.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
                return LocalOptimum {
                    growth: g,
                    certified: true,
                    residual,
                };
            }
        }
    }
    let x: Vec<S> = xf.iter().map(|&v| S::from_f64(v)).collect();
    let (g, r) = check(&x).unwrap_or_else(|| {
        let zero = vec![S::zero(); cols.len()];
        check(&zero).expect("zero fractions are feasible")
    });
    let residual = r.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    LocalOptimum {
        growth: g,
        certified: r.iter().all(|v| v.is_zero_tol(tol)),
        residual,
    }
}

/// Growth-optimal strategy predictable with respect to `filtration`, which
/// must contain the price filtration.
pub fn compute_gop<S: Scalar>(
    market: &Market<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<GopResult<S>> {
    let emms = find_emms(market, filtration, tol)?;
    if let Some(bad) = emms.nodes.iter().find(|n| !n.status.has_equivalent()) {
        return Err(Error::ArbitrageUnboundedGrowth { node: bad.node });
    }
    let p = discount(market);
    let probs = market.probs();
    let n = market.num_states();
    let na = market.num_assets();
    let horizon = market.horizon();
    let risky = market.risky();
    let mut wealth: Grid<S> = vec![vec![S::one(); n]];
    let mut holdings = vec![vec![vec![S::zero(); n]; na]; horizon + 1];
    let mut nodes = Vec::new();
    for t in 0..horizon {
        let mut next = vec![S::zero(); n];
        for node_emm in emms.nodes.iter().filter(|e| e.node.t == t) {
            let node = node_emm.node;
            let block = filtration.at(t).block(node.block);
            let atom = block[0];
            let w_node = wealth[t][atom].clone();
            let node_mass = mass(probs, block);
            let reps: Vec<usize> = node_emm
                .children
                .iter()
                .map(|&c| filtration.at(t + 1).block(c)[0])
                .collect();
            let pc: Vec<S> = node_emm
                .children
                .iter()
                .map(|&c| mass(probs, filtration.at(t + 1).block(c)) / node_mass.clone())
                .collect();
            let d: Vec<Vec<S>> = reps
                .iter()
                .map(|&w| {
                    risky
                        .iter()
                        .map(|&i| p[t + 1][i][w].clone() / p[t][i][atom].clone() - S::one())
                        .collect()
                })
                .collect();
            let complete = node_emm.status == EmmStatus::Unique;
            let local = if complete {
                let q = node_emm.weights.as_ref().expect("unique node has weights");
                let g: Vec<S> = pc
                    .iter()
                    .zip(q)
                    .map(|(a, b)| a.clone() / b.clone())
                    .collect();
                let r = foc_residuals(&pc, &d, &g);
                LocalOptimum {
                    certified: r.iter().all(|v| v.is_zero_tol(tol)),
                    residual: r.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max),
                    growth: g,
                }
            } else {
                incomplete_optimum(&pc, &d, tol)
            };
            // holdings: minimum-norm H with H · P(child) = W_node g_c
            let m: Matrix<S> = reps
                .iter()
                .map(|&w| (0..na).map(|i| p[t + 1][i][w].clone()).collect())
                .collect();
            let target: Vec<S> = local
                .growth
                .iter()
                .map(|g| w_node.clone() * g.clone())
                .collect();
            let h = min_norm_solve(&m, &target, tol).ok_or_else(|| {
                Error::IdentityViolated(format!("optimal wealth not attainable at {node}"))
            })?;
            for &w in block {
                for i in 0..na {
                    holdings[t + 1][i][w] = h[i].clone();
                }
            }
            for (&c, v) in node_emm.children.iter().zip(&target) {
                for &w in filtration.at(t + 1).block(c) {
                    next[w] = v.clone();
                }
            }
            let fractions = (0..na)
                .map(|i| h[i].clone() * p[t][i][atom].clone() / w_node.clone())
                .collect();
            let expected_log_growth = pc
                .iter()
                .zip(&local.growth)
                .map(|(a, g)| a.to_f64() * g.to_f64().ln())
                .sum();
            nodes.push(NodeGop {
                node,
                children: node_emm.children.clone(),
                probs: pc,
                growth: local.growth,
                fractions,
                complete,
                redundant: rank(&m, tol) < na,
                certified: local.certified,
                residual: local.residual,
                expected_log_growth,
            });
        }
        if t == 0 {
            holdings[0] = holdings[1].clone();
        }
        wealth.push(next);
    }
    let strategy = Strategy { holdings };
    let computed = value_process_in(&strategy, market, filtration, tol)?;
    Ok(GopResult {
        strategy,
        wealth: computed,
        nodes,
    })
}

/// Benchmarked value `P / W` of asset `i`.
pub fn benchmarked_asset<S: Scalar>(market: &Market<S>, wealth: &Grid<S>, i: usize) -> Grid<S> {
    let p = discount(market);
    let grid: Grid<S> = p.iter().map(|slice| slice[i].clone()).collect();
    benchmark(&grid, wealth)
}

#[derive(Debug, Clone)]
pub struct NumerairePortfolioReport<S> {
    /// Classification of `P_i / W` per asset.
    pub assets: Vec<Classification<S>>,
    /// Classification of `V / W` per supplied strategy.
    pub strategies: Vec<Classification<S>>,
}

impl<S: Scalar> NumerairePortfolioReport<S> {
    pub fn is_numeraire_portfolio(&self) -> bool {
        self.assets
            .iter()
            .chain(&self.strategies)
            .all(|c| c.kind.is_supermartingale())
    }
}

/// Checks that benchmarking by `wealth` turns every asset and every supplied
/// strategy into a ℙ-supermartingale with respect to `filtration`.
pub fn verify_numeraire_portfolio<S: Scalar>(
    wealth: &Grid<S>,
    market: &Market<S>,
    filtration: &Filtration,
    strategies: &[Strategy<S>],
    tol: &S,
) -> Result<NumerairePortfolioReport<S>> {
    if let Some(x) = wealth.iter().flatten().find(|x| **x <= S::zero()) {
        return Err(Error::InvalidMarket(format!(
            "benchmark wealth {x} is not positive"
        )));
    }
    let probs = market.probs();
    let assets = (0..market.num_assets())
        .map(|i| {
            classify_process(
                &benchmarked_asset(market, wealth, i),
                filtration,
                probs,
                tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let strategies = strategies
        .iter()
        .map(|s| {
            let v = value_process_in(s, market, filtration, tol)?;
            classify_process(&benchmark(&v.values, wealth), filtration, probs, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NumerairePortfolioReport { assets, strategies })
}

/// Conditional growth statistics of a benchmarked process on one block of
/// the conditioning partition `I_t`.
#[derive(Debug, Clone)]
pub struct GrowthStatistic<S> {
    pub t: usize,
    pub block: usize,
    /// `E_ℙ(Q_T / Q_t - 1 | I_t)`.
    pub excess: S,
    /// `E_ℙ(log(Q_T / Q_t) | I_t)`.
    pub log_growth: f64,
    /// Sign decision for `log_growth <= 0`, exact where affordable.
    pub log_nonpositive: bool,
    /// The sign decision was made exactly rather than from the float value.
    pub log_exact: bool,
}

/// Decides `Σ p_ω log r_ω <= 0` exactly via `Π r_ω^{n_ω} <= 1` when the
/// integer exponents stay small.
fn exact_log_nonpositive(p: &[Rational], r: &[Rational]) -> Option<bool> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed, ToPrimitive};
    let lcm = p.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let exps: Vec<BigInt> = p.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let total: BigInt = exps.iter().sum();
    if total.to_u64()? > 20_000 {
        return None;
    }
    let (mut lhs, mut rhs) = (BigInt::one(), BigInt::one());
    for (e, x) in exps.iter().zip(r) {
        let e = e.to_usize()?;
        lhs *= num_traits::pow(x.numer().abs(), e);
        rhs *= num_traits::pow(x.denom().abs(), e);
    }
    Some(lhs <= rhs)
}

/// Growth statistics of `q` (a positive benchmarked value process) from each
/// `t < T` to the horizon, conditioned on the blocks of `conditioning[t]`.
/// Any `I_t ⊆ F_t` may be supplied; a filtration passes its partitions.
pub fn growth_statistics<S: Scalar>(
    q: &Grid<S>,
    probs: &[S],
    conditioning: &[Partition],
) -> Vec<GrowthStatistic<S>> {
    let horizon = q.len() - 1;
    let mut out = Vec::new();
    for t in 0..horizon {
        let ratio: Vec<S> = q[horizon]
            .iter()
            .zip(&q[t])
            .map(|(a, b)| a.clone() / b.clone())
            .collect();
        let excess_rv: Vec<S> = ratio.iter().map(|r| r.clone() - S::one()).collect();
        for (b, block) in conditioning[t].blocks().iter().enumerate() {
            let excess = block_mean(probs, &excess_rv, block);
            let m = mass(probs, block).to_f64();
            let log_growth = block
                .iter()
                .map(|&w| probs[w].to_f64() * ratio[w].to_f64().ln())
                .sum::<f64>()
                / m;
            let (log_nonpositive, log_exact) = if log_growth.abs() >= 1e-9 {
                (log_growth <= 0.0, false)
            } else if block.iter().all(|&w| ratio[w] == S::one()) {
                (true, true)
            } else if S::EXACT {
                let pr: Vec<Rational> = block.iter().map(|&w| probs[w].to_rational()).collect();
                let rr: Vec<Rational> = block.iter().map(|&w| ratio[w].to_rational()).collect();
                match exact_log_nonpositive(&pr, &rr) {
                    Some(v) => (v, true),
                    None => (log_growth <= 0.0, false),
                }
            } else {
                (log_growth <= 1e-9, false)
            };
            out.push(GrowthStatistic {
                t,
                block: b,
                excess,
                log_growth,
                log_nonpositive,
                log_exact,
            });
        }
    }
    out
}

/// One side-by-side comparison `P_t` versus `E_ℙ(P_T W_t / W_T | F_t)`.
#[derive(Debug, Clone)]
pub struct PriceBound<S> {
    pub asset: usize,
    pub node: NodeId,
    pub price: S,
    pub bound: S,
    /// `price >= bound`.
    pub holds: bool,
    /// `price == bound`.
    pub tight: bool,
}

/// Benchmarked expected payoff bound for every asset and every `F_t` block.
pub fn law_of_minimal_price_bound<S: Scalar>(
    market: &Market<S>,
    wealth: &Grid<S>,
    filtration: &Filtration,
    t: usize,
    horizon: usize,
    tol: &S,
) -> Vec<PriceBound<S>> {
    let p = discount(market);
    let probs = market.probs();
    let mut out = Vec::new();
    for i in 0..market.num_assets() {
        let x: Vec<S> = (0..market.num_states())
            .map(|w| p[horizon][i][w].clone() * wealth[t][w].clone() / wealth[horizon][w].clone())
            .collect();
        for (b, block) in filtration.at(t).blocks().iter().enumerate() {
            let price = p[t][i][block[0]].clone();
            let bound = block_mean(probs, &x, block);
            let diff = price.clone() - bound.clone();
            out.push(PriceBound {
                asset: i,
                node: NodeId { t, block: b },
                holds: !diff.is_zero_tol(tol) && diff > S::zero() || diff.is_zero_tol(tol),
                tight: diff.is_zero_tol(tol),
                price,
                bound,
            });
        }
    }
    out
}

/// Rejects negative payoffs and payoffs that are not functions of the price path.
pub fn check_claim<S: Scalar>(claim: &[S], market: &Market<S>, tol: &S) -> Result<()> {
    if claim.len() != market.num_states() {
        return Err(Error::InvalidMarket(format!(
            "claim has {} values for {} states",
            claim.len(),
            market.num_states()
        )));
    }
    if let Some(state) = claim.iter().position(|c| *c < S::zero()) {
        return Err(Error::NegativeClaim { state });
    }
    if let Some(block) = market.evolution().terminal().non_constant_block(claim, tol) {
        return Err(Error::NotMeasurable { block });
    }
    Ok(())
}

fn discounted_claim<S: Scalar>(claim: &[S], market: &Market<S>) -> Vec<S> {
    let h = market.horizon();
    claim
        .iter()
        .enumerate()
        .map(|(w, c)| c.clone() / market.price(h, market.numeraire(), w).clone())
        .collect()
}

/// Discounted real-world value `E_ℙ(C / S^a_T · W_t / W_T | F_t)` per state.
pub fn real_world_value<S: Scalar>(
    claim: &[S],
    market: &Market<S>,
    wealth: &Grid<S>,
    filtration: &Filtration,
    t: usize,
    tol: &S,
) -> Result<Vec<S>> {
    check_claim(claim, market, tol)?;
    let h = market.horizon();
    let x: Vec<S> = discounted_claim(claim, market)
        .into_iter()
        .enumerate()
        .map(|(w, c)| c * wealth[t][w].clone() / wealth[h][w].clone())
        .collect();
    Ok(conditional_expectation(
        market.probs(),
        &x,
        filtration.at(t),
    ))
}

/// Discounted risk-neutral value `E_ℚ(C / S^a_T | F_t)` per state.
pub fn risk_neutral_value<S: Scalar>(
    claim: &[S],
    market: &Market<S>,
    q: &Measure<S>,
    filtration: &Filtration,
    t: usize,
    tol: &S,
) -> Result<Vec<S>> {
    check_claim(claim, market, tol)?;
    let x = discounted_claim(claim, market);
    Ok(conditional_expectation(&q.weights, &x, filtration.at(t)))
}

#[derive(Debug, Clone)]
pub struct Replication<S> {
    pub strategy: Strategy<S>,
    pub values: ValueProcess<S>,
    /// First `(t, state)` where the value differs from `E_ℚ(C/S^a_T | F_t)`.
    pub mismatch: Option<(usize, usize)>,
}

impl<S: Scalar> Replication<S> {
    pub fn matches_measure(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Replicates `claim` with a price-history-predictable strategy by backward
/// induction over the price tree, then compares the value process with the
/// conditional expectations under `q` given the ambient filtration.
pub fn replicate<S: Scalar>(
    claim: &[S],
    market: &Market<S>,
    q: &Measure<S>,
    tol: &S,
) -> Result<Replication<S>> {
    check_claim(claim, market, tol)?;
    let e = market.evolution();
    let p = discount(market);
    let h = market.horizon();
    let n = market.num_states();
    let na = market.num_assets();
    let mut value = discounted_claim(claim, market);
    let mut holdings = vec![vec![vec![S::zero(); n]; na]; h + 1];
    for t in (0..h).rev() {
        let mut prev = vec![S::zero(); n];
        for b in 0..e.at(t).num_blocks() {
            let node = NodeId { t, block: b };
            let (a, _, children) = evolution_system(market, node);
            let target: Vec<S> = children
                .iter()
                .map(|&c| value[e.at(t + 1).block(c)[0]].clone())
                .collect();
            let x = min_norm_solve(&transpose(&a), &target, tol)
                .ok_or(Error::NotReplicable { node })?;
            let block = e.at(t).block(b);
            let v = (0..na).fold(S::zero(), |acc, i| {
                acc + x[i].clone() * p[t][i][block[0]].clone()
            });
            for &w in block {
                prev[w] = v.clone();
                for i in 0..na {
                    holdings[t + 1][i][w] = x[i].clone();
                }
            }
        }
        value = prev;
    }
    holdings[0] = holdings[1].clone();
    let strategy = Strategy { holdings };
    let values = value_process_in(&strategy, market, e, tol)?;
    let disc = discounted_claim(claim, market);
    let f = market.ambient();
    let mut mismatch = None;
    'outer: for t in 0..=h {
        let target = conditional_expectation(&q.weights, &disc, f.at(t));
        for w in 0..n {
            if !values.values[t][w].near(&target[w], tol) {
                mismatch = Some((t, w));
                break 'outer;
            }
        }
    }
    Ok(Replication {
        strategy,
        values,
        mismatch,
    })
}

/// A benchmarked asset that fails to be a ℙ-martingale given the ambient
/// information: its level and conditional mean on the offending block.
#[derive(Debug, Clone)]
pub struct MartingaleWitness<S> {
    pub asset: usize,
    pub node: NodeId,
    pub level: S,
    pub conditional_mean: S,
}

#[derive(Debug, Clone)]
pub struct HypothesisReport<S> {
    /// Every benchmarked asset is a ℙ-martingale with respect to F.
    pub verdict: bool,
    pub gop: Option<GopResult<S>>,
    /// Classification of `P_i / W` per asset.
    pub kinds: Vec<ProcessKind>,
    pub witnesses: Vec<MartingaleWitness<S>>,
    /// Completeness with respect to F, when an F-EMM exists.
    pub complete: Option<bool>,
    /// `Λ_t = 1 / W_t` for the F-EMM's density process (checked when complete).
    pub density_identity: Option<bool>,
    /// `S_t = E_ℙ(S*_t / S*_T · S_T | F_t)` in currency units for every asset.
    pub state_price_identity: bool,
    /// Why no growth-optimal portfolio exists, if so.
    pub failure: Option<String>,
}

/// Computes the price-history GOP and checks whether benchmarking by it makes
/// ℙ a martingale measure for the ambient filtration.
pub fn martingale_hypothesis_check<S: Scalar>(
    market: &Market<S>,
    tol: &S,
) -> Result<HypothesisReport<S>> {
    let f = market.ambient();
    let gop = match compute_gop(market, market.evolution(), tol) {
        Ok(g) => g,
        Err(err @ Error::ArbitrageUnboundedGrowth { .. }) => {
            return Ok(HypothesisReport {
                verdict: false,
                gop: None,
                kinds: Vec::new(),
                witnesses: Vec::new(),
                complete: None,
                density_identity: None,
                state_price_identity: false,
                failure: Some(err.to_string()),
            })
        }
        Err(err) => return Err(err),
    };
    let w = &gop.wealth.values;
    let probs = market.probs();
    let mut kinds = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..market.num_assets() {
        let x = benchmarked_asset(market, w, i);
        let c = classify_process(&x, f, probs, tol)?;
        kinds.push(c.kind);
        if let Some(node) = c.witness {
            let level = x[node.t][f.at(node.t).block(node.block)[0]].clone();
            witnesses.push(MartingaleWitness {
                asset: i,
                node,
                conditional_mean: level.clone() + c.defect(node).clone(),
                level,
            });
        }
    }
    let verdict = kinds.iter().all(|k| *k == ProcessKind::Martingale);

    // currency-unit state-price identity with S* = W S^a
    let h = market.horizon();
    let sa = market.numeraire_grid();
    let star: Grid<S> = w
        .iter()
        .zip(&sa)
        .map(|(wr, sr)| {
            wr.iter()
                .zip(sr)
                .map(|(a, b)| a.clone() * b.clone())
                .collect()
        })
        .collect();
    let mut state_price_identity = true;
    'assets: for i in 0..market.num_assets() {
        for t in 0..h {
            let x: Vec<S> = (0..market.num_states())
                .map(|s| star[t][s].clone() / star[h][s].clone() * market.price(h, i, s).clone())
                .collect();
            let ce = conditional_expectation(probs, &x, f.at(t));
            if (0..market.num_states()).any(|s| !ce[s].near(market.price(t, i, s), tol)) {
                state_price_identity = false;
                break 'assets;
            }
        }
    }

    let emms = find_emms(market, f, tol)?;
    let usable = emms.has_equivalent();
    let (complete, density_identity) = match emms.measure.filter(|_| usable) {
        Some(q) => {
            let rep = is_complete(market, &q, tol)?;
            let identity = if rep.complete {
                let rnp = rnp_from_measure(&q, f, probs)?;
                Some(rnp.levels.iter().zip(w).all(|(lr, wr)| {
                    lr.iter()
                        .zip(wr)
                        .all(|(l, x)| (l.clone() * x.clone()).near(&S::one(), tol))
                }))
            } else {
                None
            };
            (Some(rep.complete), identity)
        }
        None => (None, None),
    };
    Ok(HypothesisReport {
        verdict,
        gop: Some(gop),
        kinds,
        witnesses,
        complete,
        density_identity,
        state_price_identity,
        failure: None,
    })
}
