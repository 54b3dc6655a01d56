//! Equivalent martingale measures, arbitrage and dominance, density
//! processes and completeness.
//!
//! Everything is decided node by node on the tree of a filtration: at a node
//! with children `c`, a one-step martingale measure is a vector `q >= 0` with
//! `Σ_c q_c P(c) = P(node)`. Because the numéraire's discounted price is 1,
//! the numéraire row forces `Σ_c q_c = 1`.

use std::cmp::Ordering;

use crate::error::{Error, NodeId, Result};
use crate::linalg::{independent_columns, rank, solve, transpose, Matrix};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::{discount, strategy_from_risky, Grid, Market, PriceGrid, Strategy};
use crate::probspace::{
    classify_process, conditional_expectation, is_immersed, mass, Filtration, ImmersionWitness,
    ProcessKind,
};
use crate::scalar::Scalar;

/// Above this many candidate bases the vertex average is replaced by the
/// max-min LP point, which is also strictly positive.
const MAX_BASES: usize = 20_000;

/// A measure on the atoms, not necessarily equivalent to ℙ.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<S> {
    pub weights: Vec<S>,
    pub equivalent: bool,
}

impl<S: Scalar> Measure<S> {
    /// Validates nonnegativity and total mass 1 (within `tol`).
    pub fn new(weights: Vec<S>, tol: &S) -> Result<Self> {
        if let Some(w) = weights.iter().position(|x| *x < -tol.clone()) {
            return Err(Error::NotEquivalent { state: w });
        }
        let total = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !total.near(&S::one(), tol) {
            return Err(Error::InvalidSpace(format!(
                "measure has total mass {total}"
            )));
        }
        let equivalent = weights.iter().all(|x| *x > S::zero());
        Ok(Measure {
            weights,
            equivalent,
        })
    }

    pub fn check_equivalent(&self) -> Result<()> {
        match self.weights.iter().position(|x| *x <= S::zero()) {
            Some(state) => Err(Error::NotEquivalent { state }),
            None => Ok(()),
        }
    }
}

/// Classification of a one-step (or global) martingale-measure set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EmmStatus {
    /// Every solution is strictly positive somewhere and there is exactly one.
    Unique,
    /// A strictly positive solution exists and the solution set is not a point.
    Multiple,
    /// Solutions exist but each puts zero weight on some child.
    AbsolutelyContinuousOnly,
    Empty,
}

impl EmmStatus {
    pub fn has_equivalent(self) -> bool {
        matches!(self, EmmStatus::Unique | EmmStatus::Multiple)
    }

    pub fn label(self) -> &'static str {
        match self {
            EmmStatus::Unique => "unique",
            EmmStatus::Multiple => "multiple",
            EmmStatus::AbsolutelyContinuousOnly => "absolutely-continuous-only",
            EmmStatus::Empty => "empty",
        }
    }
}

/// One-step martingale weights at a single node.
#[derive(Debug, Clone)]
pub struct NodeEmm<S> {
    pub node: NodeId,
    /// Child block indices at `t + 1`.
    pub children: Vec<usize>,
    pub status: EmmStatus,
    /// Representative conditional weights, one per child.
    pub weights: Option<Vec<S>>,
    /// Vertices of the solution polytope (empty when not enumerated).
    pub vertices: Vec<Vec<S>>,
    /// Optimum of the max-min-weight LP.
    pub min_weight: Option<S>,
    /// Rank of the `asset × child` discounted price matrix.
    pub rank: usize,
}

/// Martingale measures for a market and filtration, node by node.
#[derive(Debug, Clone)]
pub struct EmmSet<S> {
    pub nodes: Vec<NodeEmm<S>>,
    pub status: EmmStatus,
    /// Path-product measure when every node has a representative.
    pub measure: Option<Measure<S>>,
}

impl<S: Scalar> EmmSet<S> {
    pub fn has_equivalent(&self) -> bool {
        self.status.has_equivalent()
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeEmm<S>> {
        self.nodes.iter().find(|n| n.node == id)
    }

    /// First node whose status is worst, if not all unique.
    pub fn witness(&self) -> Option<&NodeEmm<S>> {
        self.nodes
            .iter()
            .filter(|n| n.status != EmmStatus::Unique)
            .max_by_key(|n| n.status)
    }
}

/// Discounted price vector (all assets) on the block containing `atom`.
fn price_vector<S: Scalar>(p: &PriceGrid<S>, t: usize, atom: usize) -> Vec<S> {
    p[t].iter().map(|row| row[atom].clone()).collect()
}

/// `asset × child` matrix and node price vector.
fn node_system<S: Scalar>(
    p: &PriceGrid<S>,
    filtration: &Filtration,
    node: NodeId,
) -> (Matrix<S>, Vec<S>, Vec<usize>) {
    let t = node.t;
    let children = filtration.children(t, node.block).to_vec();
    let atom = filtration.at(t).block(node.block)[0];
    let b = price_vector(p, t, atom);
    let cols: Vec<Vec<S>> = children
        .iter()
        .map(|&c| price_vector(p, t + 1, filtration.at(t + 1).block(c)[0]))
        .collect();
    (transpose(&cols), b, children)
}

fn max_min_weight<S: Scalar>(a: &Matrix<S>, b: &[S], tol: &S) -> Option<(Vec<S>, S)> {
    let k = a.first().map_or(0, Vec::len);
    let mut lp = LinearProgram::new(k + 1);
    lp.objective[k] = S::one();
    for (row, rhs) in a.iter().zip(b) {
        let mut c = row.clone();
        c.push(S::zero());
        lp.add(c, Relation::Eq, rhs.clone());
    }
    for j in 0..k {
        let mut c = vec![S::zero(); k + 1];
        c[j] = S::one();
        c[k] = -S::one();
        lp.add(c, Relation::Ge, S::zero());
    }
    match lp.solve(tol) {
        LpOutcome::Optimal { mut x, value } => {
            x.truncate(k);
            Some((x, value))
        }
        _ => None,
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices of `{q >= 0 : a q = b}` by basic-solution enumeration.
fn vertices<S: Scalar>(a: &Matrix<S>, b: &[S], tol: &S) -> Option<Vec<Vec<S>>> {
    // keep an independent set of rows
    let rows = independent_columns(&transpose(a), tol);
    let a: Matrix<S> = rows.iter().map(|&i| a[i].clone()).collect();
    let b: Vec<S> = rows.iter().map(|&i| b[i].clone()).collect();
    let r = a.len();
    let k = a.first().map_or(0, Vec::len);
    if binomial(k, r) > MAX_BASES {
        return None;
    }
    let mut out: Vec<Vec<S>> = Vec::new();
    for basis in combinations(k, r) {
        let sub: Matrix<S> = a
            .iter()
            .map(|row| basis.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if rank(&sub, tol) < r {
            continue;
        }
        let Some(x) = solve(&sub, &b, tol) else {
            continue;
        };
        if x.iter().any(|v| *v < -tol.clone()) {
            continue;
        }
        let mut q = vec![S::zero(); k];
        for (&j, v) in basis.iter().zip(x) {
            q[j] = v;
        }
        if !out
            .iter()
            .any(|o| o.iter().zip(&q).all(|(u, v)| u.near(v, tol)))
        {
            out.push(q);
        }
    }
    Some(out)
}

fn solve_node<S: Scalar>(
    p: &PriceGrid<S>,
    filtration: &Filtration,
    node: NodeId,
    tol: &S,
) -> NodeEmm<S> {
    let (a, b, children) = node_system(p, filtration, node);
    let k = children.len();
    let r = rank(&a, tol);
    let mut out = NodeEmm {
        node,
        children,
        status: EmmStatus::Empty,
        weights: None,
        vertices: Vec::new(),
        min_weight: None,
        rank: r,
    };
    let Some((x, value)) = max_min_weight(&a, &b, tol) else {
        return out;
    };
    out.min_weight = Some(value.clone());
    if value.sign_tol(tol) != Ordering::Greater {
        out.status = EmmStatus::AbsolutelyContinuousOnly;
        out.weights = Some(x);
        return out;
    }
    if r == k {
        out.status = EmmStatus::Unique;
        let q = solve(&a, &b, tol).unwrap_or(x);
        out.vertices = vec![q.clone()];
        out.weights = Some(q);
        return out;
    }
    out.status = EmmStatus::Multiple;
    match vertices(&a, &b, tol) {
        Some(vs) if !vs.is_empty() => {
            let n = S::from_int(vs.len() as i64);
            let mean = (0..k)
                .map(|j| vs.iter().fold(S::zero(), |acc, v| acc + v[j].clone()) / n.clone())
                .collect();
            out.weights = Some(mean);
            out.vertices = vs;
        }
        _ => out.weights = Some(x),
    }
    out
}

/// Martingale measures of `market` with respect to `filtration`, which must
/// contain the market's price filtration.
pub fn find_emms<S: Scalar>(
    market: &Market<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<EmmSet<S>> {
    market.evolution().check_subfiltration_of(filtration)?;
    let p = discount(market);
    let nodes: Vec<NodeEmm<S>> = filtration
        .nodes()
        .map(|node| solve_node(&p, filtration, node, tol))
        .collect();
    let status = nodes
        .iter()
        .map(|n| n.status)
        .max()
        .unwrap_or(EmmStatus::Unique);
    let measure = if status == EmmStatus::Empty {
        None
    } else {
        Some(assemble_measure(market.probs(), filtration, &nodes))
    };
    Ok(EmmSet {
        nodes,
        status,
        measure,
    })
}

/// Path-product measure: ℙ on `F_0`, node weights along each path, and ℙ's
/// conditional law inside terminal blocks.
fn assemble_measure<S: Scalar>(
    probs: &[S],
    filtration: &Filtration,
    nodes: &[NodeEmm<S>],
) -> Measure<S> {
    let horizon = filtration.horizon();
    let lookup = |t: usize, block: usize| -> &NodeEmm<S> {
        nodes
            .iter()
            .find(|n| n.node.t == t && n.node.block == block)
            .expect("every nonterminal node solved")
    };
    let weights: Vec<S> = (0..probs.len())
        .map(|w| {
            let f0 = filtration.at(0);
            let mut q = mass(probs, f0.block(f0.block_of(w)));
            for t in 0..horizon {
                let node = lookup(t, filtration.at(t).block_of(w));
                let child = filtration.at(t + 1).block_of(w);
                let j = node
                    .children
                    .iter()
                    .position(|&c| c == child)
                    .expect("child of its parent");
                q = q * node.weights.as_ref().expect("representative")[j].clone();
            }
            let ft = filtration.terminal();
            let block_mass = mass(probs, ft.block(ft.block_of(w)));
            q * probs[w].clone() / block_mass
        })
        .collect();
    let equivalent = weights.iter().all(|x| *x > S::zero());
    Measure {
        weights,
        equivalent,
    }
}

/// Errors with [`Error::NotEmm`] unless every discounted price is a martingale
/// under `q` with respect to `filtration`.
pub fn check_emm<S: Scalar>(
    market: &Market<S>,
    filtration: &Filtration,
    q: &[S],
    tol: &S,
) -> Result<()> {
    let p = discount(market);
    for i in 0..market.num_assets() {
        let grid: Grid<S> = p.iter().map(|slice| slice[i].clone()).collect();
        let c = classify_process(&grid, filtration, q, tol)?;
        if c.kind != ProcessKind::Martingale {
            return Err(Error::NotEmm {
                numeraire: market.numeraire(),
                asset: i,
                node: c.witness.expect("non-martingale has a witness"),
            });
        }
    }
    Ok(())
}

/// A strategy with zero initial value, nonnegative terminal gain in every
/// state and positive expected gain.
#[derive(Debug, Clone)]
pub struct Arbitrage<S> {
    pub strategy: Strategy<S>,
    /// Terminal discounted gain per state.
    pub gains: Vec<S>,
}

/// A strategy starting at the same value as one unit of `asset` whose
/// terminal value is never smaller and is larger in expectation.
#[derive(Debug, Clone)]
pub struct Dominance<S> {
    pub asset: usize,
    pub strategy: Strategy<S>,
    /// Terminal discounted value minus the asset's terminal discounted price.
    pub excess: Vec<S>,
}

/// Risky holdings as `time × risky × state`.
type Holdings<S> = Vec<Vec<Vec<S>>>;

/// Searches the nodes of `filtration` for a one-period trade whose gain beats
/// one unit of `base` on every child and strictly in expectation. Elsewhere
/// the returned holdings keep one unit of `base`, so the global gain beats
/// the buy-and-hold gain of `base` exactly on that node. Returns the holdings
/// as `time × risky × state` and the gain per state.
fn gain_lp<S: Scalar>(
    market: &Market<S>,
    filtration: &Filtration,
    base: Option<usize>,
    tol: &S,
) -> Option<(Holdings<S>, Vec<S>)> {
    let p = discount(market);
    let risky = market.risky();
    let k = risky.len();
    let horizon = market.horizon();
    let probs = market.probs();
    let n = market.num_states();
    let delta = |t: usize, i: usize, w: usize| p[t + 1][i][w].clone() - p[t][i][w].clone();
    let floor = |t: usize, w: usize| base.map_or(S::zero(), |i| delta(t, i, w));
    let (node, theta) = filtration.nodes().find_map(|node| {
        let (t, b) = (node.t, node.block);
        let mut lp = LinearProgram::new(2 * k);
        lp.objective = vec![-S::one(); 2 * k];
        let mut expected = vec![S::zero(); 2 * k];
        let mut expected_floor = S::zero();
        for &c in filtration.children(t, b) {
            let child = filtration.at(t + 1).block(c);
            let w = child[0];
            let row: Vec<S> = risky
                .iter()
                .flat_map(|&i| [delta(t, i, w), -delta(t, i, w)])
                .collect();
            let m = mass(probs, child);
            for (e, c) in expected.iter_mut().zip(&row) {
                *e = e.clone() + m.clone() * c.clone();
            }
            expected_floor = expected_floor + m * floor(t, w);
            lp.add(row, Relation::Ge, floor(t, w));
        }
        let scale = mass(probs, filtration.at(t).block(b));
        lp.add(expected, Relation::Ge, expected_floor + scale);
        match lp.solve(tol) {
            LpOutcome::Optimal { x, .. } => Some((
                node,
                (0..k)
                    .map(|m| x[2 * m].clone() - x[2 * m + 1].clone())
                    .collect::<Vec<S>>(),
            )),
            _ => None,
        }
    })?;
    let block = filtration.at(node.t).block(node.block);
    let holdings: Holdings<S> = (0..horizon)
        .map(|t| {
            (0..k)
                .map(|m| {
                    (0..n)
                        .map(|w| {
                            if t == node.t && block.contains(&w) {
                                theta[m].clone()
                            } else if base == Some(risky[m]) {
                                S::one()
                            } else {
                                S::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let gains = (0..n)
        .map(|w| {
            (0..horizon).fold(S::zero(), |acc, t| {
                risky.iter().enumerate().fold(acc, |acc, (m, &i)| {
                    acc + holdings[t][m][w].clone() * delta(t, i, w)
                })
            })
        })
        .collect();
    Some((holdings, gains))
}

/// Searches for an arbitrage among `filtration`-predictable strategies.
pub fn find_arbitrage<S: Scalar>(
    market: &Market<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<Option<Arbitrage<S>>> {
    market.evolution().check_subfiltration_of(filtration)?;
    Ok(
        gain_lp(market, filtration, None, tol).map(|(holdings, gains)| {
            let v0 = vec![S::zero(); market.num_states()];
            Arbitrage {
                strategy: strategy_from_risky(market, &v0, &holdings),
                gains,
            }
        }),
    )
}

/// Searches for a strategy dominating buy-and-hold of `asset`. `None` means
/// the asset is maximal.
pub fn find_dominating<S: Scalar>(
    market: &Market<S>,
    asset: usize,
    filtration: &Filtration,
    tol: &S,
) -> Result<Option<Dominance<S>>> {
    market.evolution().check_subfiltration_of(filtration)?;
    if asset >= market.num_assets() {
        return Err(Error::InvalidMarket(format!("no asset with index {asset}")));
    }
    let p = discount(market);
    let horizon = market.horizon();
    let floor: Vec<S> = (0..market.num_states())
        .map(|w| p[horizon][asset][w].clone() - p[0][asset][w].clone())
        .collect();
    Ok(
        gain_lp(market, filtration, Some(asset), tol).map(|(holdings, gains)| {
            let v0: Vec<S> = p[0][asset].clone();
            Dominance {
                asset,
                strategy: strategy_from_risky(market, &v0, &holdings),
                excess: gains
                    .into_iter()
                    .zip(&floor)
                    .map(|(g, f)| g - f.clone())
                    .collect(),
            }
        }),
    )
}

/// Radon-Nikodym process `Λ_t = E_ℙ(Λ_∞ | F_t)` normalized to `Λ_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rnp<S> {
    /// `time × state`, `t = 0..=T`.
    pub levels: Grid<S>,
    /// `Λ_∞ = dℚ/dℙ` per state after normalization.
    pub terminal: Vec<S>,
    /// `ℚ(B)/ℙ(B)` for each `F_0` block before normalization.
    pub scale: Vec<S>,
}

impl<S: Scalar> Rnp<S> {
    /// `Λ_{t,∞} = Λ_∞ / Λ_t`.
    pub fn ratio_to_terminal(&self, t: usize) -> Vec<S> {
        self.terminal
            .iter()
            .zip(&self.levels[t])
            .map(|(a, b)| a.clone() / b.clone())
            .collect()
    }

    /// `Λ_{t,u} = Λ_u / Λ_t`.
    pub fn ratio(&self, t: usize, u: usize) -> Vec<S> {
        self.levels[u]
            .iter()
            .zip(&self.levels[t])
            .map(|(a, b)| a.clone() / b.clone())
            .collect()
    }
}

pub fn rnp_from_measure<S: Scalar>(
    q: &Measure<S>,
    filtration: &Filtration,
    probs: &[S],
) -> Result<Rnp<S>> {
    q.check_equivalent()?;
    let f0 = filtration.at(0);
    let scale: Vec<S> = f0
        .blocks()
        .iter()
        .map(|b| mass(&q.weights, b) / mass(probs, b))
        .collect();
    let terminal: Vec<S> = (0..probs.len())
        .map(|w| q.weights[w].clone() / probs[w].clone() / scale[f0.block_of(w)].clone())
        .collect();
    let levels = (0..=filtration.horizon())
        .map(|t| conditional_expectation(probs, &terminal, filtration.at(t)))
        .collect();
    Ok(Rnp {
        levels,
        terminal,
        scale,
    })
}

/// `ℚ(A) = Σ_{ω∈A} Λ_∞(ω) ℙ(ω)`.
pub fn measure_from_rnp<S: Scalar>(terminal: &[S], probs: &[S], tol: &S) -> Result<Measure<S>> {
    Measure::new(
        terminal
            .iter()
            .zip(probs)
            .map(|(l, p)| l.clone() * p.clone())
            .collect(),
        tol,
    )
}

/// `E_ℚ(X | F_t)`, computed directly and through the density ratio
/// `E_ℙ(Λ_∞ X | F_t) / Λ_t`; the two must agree.
pub fn bayes_conditional<S: Scalar>(
    x: &[S],
    q: &Measure<S>,
    t: usize,
    filtration: &Filtration,
    probs: &[S],
    tol: &S,
) -> Result<Vec<S>> {
    let rnp = rnp_from_measure(q, filtration, probs)?;
    let direct = conditional_expectation(&q.weights, x, filtration.at(t));
    let weighted: Vec<S> = rnp
        .terminal
        .iter()
        .zip(x)
        .map(|(l, v)| l.clone() * v.clone())
        .collect();
    let via_density: Vec<S> = conditional_expectation(probs, &weighted, filtration.at(t))
        .into_iter()
        .zip(&rnp.levels[t])
        .map(|(num, l)| num / l.clone())
        .collect();
    if let Some(w) = (0..x.len()).find(|&w| !direct[w].near(&via_density[w], tol)) {
        return Err(Error::IdentityViolated(format!(
            "conditional expectation at t={t}, state {w}: direct {} vs density {}",
            direct[w], via_density[w]
        )));
    }
    Ok(direct)
}

#[derive(Debug, Clone)]
pub struct DeflatorAsset {
    pub asset: usize,
    /// `Λ_t P_t` is a ℙ-martingale.
    pub deflated_martingale: bool,
    /// `P_t` is a ℚ-martingale.
    pub q_martingale: bool,
}

#[derive(Debug, Clone)]
pub struct DeflatorReport {
    pub assets: Vec<DeflatorAsset>,
}

impl DeflatorReport {
    /// Both sides agree for every asset.
    pub fn consistent(&self) -> bool {
        self.assets
            .iter()
            .all(|a| a.deflated_martingale == a.q_martingale)
    }

    /// `Λ` is a discount-factor process: every asset passes both sides.
    pub fn is_deflator(&self) -> bool {
        self.assets
            .iter()
            .all(|a| a.deflated_martingale && a.q_martingale)
    }
}

/// Checks `{Λ_t P_t}` under ℙ against `{P_t}` under the measure `Λ_∞ dℙ`.
pub fn verify_deflator<S: Scalar>(
    rnp: &Rnp<S>,
    market: &Market<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<DeflatorReport> {
    let probs = market.probs();
    let p = discount(market);
    let q: Vec<S> = rnp
        .terminal
        .iter()
        .zip(probs)
        .map(|(l, w)| l.clone() * w.clone())
        .collect();
    let mut assets = Vec::new();
    for i in 0..market.num_assets() {
        let grid: Grid<S> = p.iter().map(|slice| slice[i].clone()).collect();
        let deflated: Grid<S> = grid
            .iter()
            .zip(&rnp.levels)
            .map(|(row, l)| {
                row.iter()
                    .zip(l)
                    .map(|(x, y)| x.clone() * y.clone())
                    .collect()
            })
            .collect();
        let lhs = classify_process(&deflated, filtration, probs, tol)?.kind;
        let rhs = classify_process(&grid, filtration, &q, tol)?.kind;
        assets.push(DeflatorAsset {
            asset: i,
            deflated_martingale: lhs == ProcessKind::Martingale,
            q_martingale: rhs == ProcessKind::Martingale,
        });
    }
    Ok(DeflatorReport { assets })
}

/// Moves an EMM for the market's numéraire `a` to numéraire `b` by weighting
/// with `Γ_T = S^b_T / S^a_T`.
pub fn change_numeraire_measure<S: Scalar>(
    q: &Measure<S>,
    market: &Market<S>,
    b: usize,
    tol: &S,
) -> Result<Measure<S>> {
    let filtration = market.ambient();
    check_emm(market, filtration, &q.weights, tol)?;
    let p = discount(market);
    let horizon = market.horizon();
    let weights: Vec<S> = q
        .weights
        .iter()
        .enumerate()
        .map(|(w, x)| x.clone() * p[horizon][b][w].clone())
        .collect();
    let moved = Measure::new(weights, tol)?;
    check_emm(&market.with_numeraire(b)?, filtration, &moved.weights, tol)?;
    Ok(moved)
}

#[derive(Debug, Clone)]
pub struct CompletenessReport<S> {
    pub complete: bool,
    /// Every E-node's child price matrix has full row rank.
    pub spanning: bool,
    /// First E-node failing the rank test with its rank and child count.
    pub rank_failure: Option<(NodeId, usize, usize)>,
    /// E is ℚ-immersed in F.
    pub immersed: bool,
    pub immersion_witness: Option<ImmersionWitness<S>>,
}

/// Completeness of the market with respect to its ambient filtration for a
/// fixed F-EMM `q`: every price-history claim is spanned at each E-node, and
/// `E` is ℚ-immersed in `F`.
pub fn is_complete<S: Scalar>(
    market: &Market<S>,
    q: &Measure<S>,
    tol: &S,
) -> Result<CompletenessReport<S>> {
    let p = discount(market);
    let e = market.evolution();
    let rank_failure = e.nodes().find_map(|node| {
        let (a, _, children) = node_system(&p, e, node);
        let r = rank(&a, tol);
        (r < children.len()).then_some((node, r, children.len()))
    });
    let imm = is_immersed(e, market.ambient(), &q.weights, tol)?;
    Ok(CompletenessReport {
        complete: rank_failure.is_none() && imm.immersed,
        spanning: rank_failure.is_none(),
        rank_failure,
        immersed: imm.immersed,
        immersion_witness: imm.witness,
    })
}

/// Rank and child count at an E-node, for reuse in replication.
pub(crate) fn evolution_system<S: Scalar>(
    market: &Market<S>,
    node: NodeId,
) -> (Matrix<S>, Vec<S>, Vec<usize>) {
    node_system(&discount(market), market.evolution(), node)
}
