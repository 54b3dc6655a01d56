//! Price systems, numéraire discounting and self-financing strategies.
//!
//! Holdings follow the discrete-time predictable convention: `H_0` is the
//! initial portfolio and `H_t` (`t >= 1`) is chosen at `t - 1`, held over
//! `(t - 1, t]`, so it must be constant on the blocks of `F_{t-1}`.

use crate::error::{Error, Result};
use crate::probspace::{natural_filtration, Filtration, FiniteProbSpace};
use crate::scalar::Scalar;

/// `time × asset × state` grid.
pub type PriceGrid<S> = Vec<Vec<Vec<S>>>;
/// `time × state` grid.
pub type Grid<S> = Vec<Vec<S>>;

/// A finite market: positive prices, a numéraire, the price filtration `E`
/// and an ambient information filtration `F ⊇ E`.
#[derive(Debug, Clone)]
pub struct Market<S> {
    space: FiniteProbSpace<S>,
    assets: Vec<String>,
    prices: PriceGrid<S>,
    scales: Vec<S>,
    numeraire: usize,
    evolution: Filtration,
    ambient: Filtration,
}

impl<S: Scalar> Market<S> {
    /// Builds a market from nominal prices, rescaling each asset so its time-0
    /// price is 1. The original time-0 prices are kept in [`Market::scales`].
    pub fn new(
        space: FiniteProbSpace<S>,
        assets: Vec<String>,
        prices: PriceGrid<S>,
        numeraire: usize,
    ) -> Result<Self> {
        let n = space.len();
        if prices.len() < 2 {
            return Err(Error::InvalidMarket("need at least one period".into()));
        }
        if assets.is_empty() || numeraire >= assets.len() {
            return Err(Error::InvalidMarket(format!(
                "numeraire index {numeraire} out of range for {} assets",
                assets.len()
            )));
        }
        for (t, slice) in prices.iter().enumerate() {
            if slice.len() != assets.len() || slice.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidMarket(format!("ragged price grid at t={t}")));
            }
            for (i, row) in slice.iter().enumerate() {
                if let Some(w) = row.iter().position(|x| *x <= S::zero()) {
                    return Err(Error::InvalidMarket(format!(
                        "price of {} at t={t} in state {} is not positive",
                        assets[i],
                        space.ids()[w]
                    )));
                }
            }
        }
        for (asset, row) in prices[0].iter().enumerate() {
            if row.iter().any(|p| *p != row[0]) {
                return Err(Error::NonTrivialStart { asset });
            }
        }
        let scales: Vec<S> = prices[0].iter().map(|row| row[0].clone()).collect();
        let prices: PriceGrid<S> = prices
            .into_iter()
            .map(|slice| {
                slice
                    .into_iter()
                    .zip(&scales)
                    .map(|(row, s)| row.into_iter().map(|x| x / s.clone()).collect())
                    .collect()
            })
            .collect();
        let evolution = natural_filtration(&prices)?;
        Ok(Market {
            space,
            assets,
            prices,
            scales,
            numeraire,
            ambient: evolution.clone(),
            evolution,
        })
    }

    /// Replaces the ambient filtration; it must contain the price filtration.
    pub fn with_ambient(mut self, ambient: Filtration) -> Result<Self> {
        self.evolution.check_subfiltration_of(&ambient)?;
        self.ambient = ambient;
        Ok(self)
    }

    pub fn with_numeraire(&self, numeraire: usize) -> Result<Self> {
        if numeraire >= self.assets.len() {
            return Err(Error::InvalidMarket(format!(
                "numeraire index {numeraire} out of range"
            )));
        }
        let mut m = self.clone();
        m.numeraire = numeraire;
        Ok(m)
    }

    pub fn space(&self) -> &FiniteProbSpace<S> {
        &self.space
    }

    pub fn probs(&self) -> &[S] {
        self.space.probs()
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn asset_index(&self, name: &str) -> Option<usize> {
        self.assets.iter().position(|a| a == name)
    }

    pub fn num_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn num_states(&self) -> usize {
        self.space.len()
    }

    pub fn horizon(&self) -> usize {
        self.prices.len() - 1
    }

    /// Rescaled prices (`S_{i0} = 1`).
    pub fn prices(&self) -> &PriceGrid<S> {
        &self.prices
    }

    pub fn price(&self, t: usize, asset: usize, state: usize) -> &S {
        &self.prices[t][asset][state]
    }

    /// Original time-0 prices used for rescaling.
    pub fn scales(&self) -> &[S] {
        &self.scales
    }

    pub fn numeraire(&self) -> usize {
        self.numeraire
    }

    /// Price filtration `E`.
    pub fn evolution(&self) -> &Filtration {
        &self.evolution
    }

    /// Information filtration `F`.
    pub fn ambient(&self) -> &Filtration {
        &self.ambient
    }

    /// Risky (non-numéraire) asset indices.
    pub fn risky(&self) -> Vec<usize> {
        (0..self.num_assets())
            .filter(|&i| i != self.numeraire)
            .collect()
    }

    /// Rescaled numéraire price `S^a` as a `time × state` grid.
    pub fn numeraire_grid(&self) -> Grid<S> {
        self.prices
            .iter()
            .map(|slice| slice[self.numeraire].clone())
            .collect()
    }
}

/// Discounted prices `P_{it} = S_{it} / S_{at}`.
pub fn discount<S: Scalar>(market: &Market<S>) -> PriceGrid<S> {
    let a = market.numeraire();
    market
        .prices()
        .iter()
        .map(|slice| {
            slice
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&slice[a])
                        .map(|(x, n)| x.clone() / n.clone())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Predictable holdings, `time × asset × state`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<S> {
    pub holdings: PriceGrid<S>,
}

impl<S: Scalar> Strategy<S> {
    /// Holds the same number of units of every asset at all times and states.
    pub fn buy_and_hold(units: &[S], horizon: usize, num_states: usize) -> Self {
        let slice: Vec<Vec<S>> = units.iter().map(|u| vec![u.clone(); num_states]).collect();
        Strategy {
            holdings: vec![slice; horizon + 1],
        }
    }

    /// One unit of `asset`, nothing else.
    pub fn unit(asset: usize, num_assets: usize, horizon: usize, num_states: usize) -> Self {
        let mut units = vec![S::zero(); num_assets];
        units[asset] = S::one();
        Strategy::buy_and_hold(&units, horizon, num_states)
    }

    pub fn holding(&self, t: usize, state: usize) -> Vec<S> {
        self.holdings[t]
            .iter()
            .map(|row| row[state].clone())
            .collect()
    }

    /// Checks that `H_t` is constant on blocks of `F_{t-1}` (and `H_0` on `F_0`).
    pub fn check_predictable(&self, filtration: &Filtration, tol: &S) -> Result<()> {
        for (t, slice) in self.holdings.iter().enumerate() {
            let part = filtration.at(t.saturating_sub(1));
            for row in slice {
                if let Some(block) = part.non_constant_block(row, tol) {
                    return Err(Error::NotPredictable { t, block });
                }
            }
        }
        Ok(())
    }
}

/// Discounted value of a self-financing strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueProcess<S> {
    /// `time × state`.
    pub values: Grid<S>,
}

impl<S: Scalar> ValueProcess<S> {
    pub fn initial(&self) -> &[S] {
        &self.values[0]
    }

    pub fn at(&self, t: usize) -> &[S] {
        &self.values[t]
    }

    pub fn terminal(&self) -> &[S] {
        self.values.last().expect("nonempty value grid")
    }

    pub fn min(&self) -> S {
        let mut it = self.values.iter().flatten();
        let first = it.next().expect("nonempty value grid").clone();
        it.fold(first, |m, x| if *x < m { x.clone() } else { m })
    }
}

/// Discounted value process of `strategy` against the market's ambient
/// filtration, verifying predictability and the rebalancing identity
/// `H_t · P_t = H_{t+1} · P_t` at every node.
pub fn value_process<S: Scalar>(
    strategy: &Strategy<S>,
    market: &Market<S>,
    tol: &S,
) -> Result<ValueProcess<S>> {
    value_process_in(strategy, market, market.ambient(), tol)
}

/// As [`value_process`] with an explicit filtration for the predictability check.
pub fn value_process_in<S: Scalar>(
    strategy: &Strategy<S>,
    market: &Market<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<ValueProcess<S>> {
    let horizon = market.horizon();
    if strategy.holdings.len() != horizon + 1
        || strategy.holdings.iter().any(|s| {
            s.len() != market.num_assets() || s.iter().any(|r| r.len() != market.num_states())
        })
    {
        return Err(Error::InvalidMarket(
            "strategy grid has the wrong shape".into(),
        ));
    }
    strategy.check_predictable(filtration, tol)?;
    let p = discount(market);
    let n = market.num_states();
    let inner = |t: usize, h: usize, w: usize| -> S {
        (0..market.num_assets()).fold(S::zero(), |acc, i| {
            acc + strategy.holdings[h][i][w].clone() * p[t][i][w].clone()
        })
    };
    for t in 0..horizon {
        for w in 0..n {
            if !inner(t, t, w).near(&inner(t, t + 1, w), tol) {
                return Err(Error::NotSelfFinancing { t, state: w });
            }
        }
    }
    let mut values = vec![(0..n).map(|w| inner(0, 0, w)).collect::<Vec<S>>()];
    for t in 1..=horizon {
        let row = (0..n)
            .map(|w| {
                let gain = (0..market.num_assets()).fold(S::zero(), |acc, i| {
                    acc + strategy.holdings[t][i][w].clone()
                        * (p[t][i][w].clone() - p[t - 1][i][w].clone())
                });
                values[t - 1][w].clone() + gain
            })
            .collect();
        values.push(row);
    }
    Ok(ValueProcess { values })
}

/// Builds the self-financing strategy with initial value `v0` that holds the
/// risky units `risky[t][k][w]` (asset `market.risky()[k]`) over `(t, t+1]`,
/// financing the remainder in the numéraire.
pub fn strategy_from_risky<S: Scalar>(
    market: &Market<S>,
    v0: &[S],
    risky: &[Vec<Vec<S>>],
) -> Strategy<S> {
    let p = discount(market);
    let a = market.numeraire();
    let ids = market.risky();
    let n = market.num_states();
    let horizon = market.horizon();
    let mut holdings = vec![vec![vec![S::zero(); n]; market.num_assets()]; horizon + 1];
    let mut value: Vec<S> = v0.to_vec();
    for t in 0..horizon {
        for w in 0..n {
            let mut risky_value = S::zero();
            for (k, &i) in ids.iter().enumerate() {
                holdings[t + 1][i][w] = risky[t][k][w].clone();
                risky_value = risky_value + risky[t][k][w].clone() * p[t][i][w].clone();
            }
            holdings[t + 1][a][w] = value[w].clone() - risky_value;
        }
        if t == 0 {
            holdings[0] = holdings[1].clone();
        }
        for w in 0..n {
            let gain = ids.iter().enumerate().fold(S::zero(), |acc, (k, &i)| {
                acc + risky[t][k][w].clone() * (p[t + 1][i][w].clone() - p[t][i][w].clone())
            });
            value[w] = value[w].clone() + gain;
        }
    }
    Strategy { holdings }
}

/// Normalization data: the shift constant and the normalized strategy.
#[derive(Debug, Clone)]
pub struct Normalized<S> {
    pub strategy: Strategy<S>,
    pub shift: S,
}

/// Rescales a strategy so its discounted value starts at 1 and stays positive:
/// add `a - V_0` numéraire units, then divide by `a`, where `a` is the smallest
/// power of two exceeding every drawdown `V_0 - V_t`.
pub fn normalize<S: Scalar>(
    strategy: &Strategy<S>,
    market: &Market<S>,
    tol: &S,
) -> Result<Normalized<S>> {
    let v = value_process(strategy, market, tol)?;
    let mut drawdown = S::zero();
    for row in &v.values {
        for (w, x) in row.iter().enumerate() {
            let d = v.values[0][w].clone() - x.clone();
            if d > drawdown {
                drawdown = d;
            }
        }
    }
    let two = S::from_int(2);
    let mut a = S::one();
    let mut k = 0;
    while a <= drawdown.clone() + tol.clone() {
        a = a * two.clone();
        k += 1;
        if k > 1100 {
            return Err(Error::Degenerate(format!("drawdown {drawdown} too large")));
        }
    }
    let num = market.numeraire();
    let holdings = strategy
        .holdings
        .iter()
        .map(|slice| {
            slice
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(w, h)| {
                            let shifted = if i == num {
                                h.clone() + a.clone() - v.values[0][w].clone()
                            } else {
                                h.clone()
                            };
                            shifted / a.clone()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Normalized {
        strategy: Strategy { holdings },
        shift: a,
    })
}

/// Elementwise ratio `V_t / W_t`.
pub fn benchmark<S: Scalar>(v: &[Vec<S>], w: &[Vec<S>]) -> Grid<S> {
    v.iter()
        .zip(w)
        .map(|(vr, wr)| {
            vr.iter()
                .zip(wr)
                .map(|(x, y)| x.clone() / y.clone())
                .collect()
        })
        .collect()
}

/// Multiplies a discounted grid back into currency units.
pub fn nominal<S: Scalar>(discounted: &[Vec<S>], market: &Market<S>) -> Grid<S> {
    let sa = market.numeraire_grid();
    discounted
        .iter()
        .zip(&sa)
        .map(|(row, s)| {
            row.iter()
                .zip(s)
                .map(|(x, y)| x.clone() * y.clone())
                .collect()
        })
        .collect()
}
