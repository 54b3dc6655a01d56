use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A node of a filtration tree: time index and block index within that time's partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub t: usize,
    pub block: usize,
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(t={}, block={})", self.t, self.block)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid market: {0}")]
    InvalidMarket(String),
    #[error("time-0 prices differ across states for asset {asset}")]
    NonTrivialStart { asset: usize },
    #[error("process is not adapted: value at t={t} varies inside block {block}")]
    NotAdapted { t: usize, block: usize },
    #[error("strategy is not predictable at t={t} (block {block})")]
    NotPredictable { t: usize, block: usize },
    #[error("strategy is not self-financing at t={t}, state {state}")]
    NotSelfFinancing { t: usize, state: usize },
    #[error("filtration is not a subfiltration at t={t}")]
    NotSubfiltration { t: usize },
    #[error("measure is not equivalent to the reference measure (state {state} has weight <= 0)")]
    NotEquivalent { state: usize },
    #[error("measure is not an equivalent martingale measure for numeraire {numeraire}: asset {asset} fails at {node}")]
    NotEmm {
        numeraire: usize,
        asset: usize,
        node: NodeId,
    },
    #[error("no-arbitrage fails at {node}: expected log-growth is unbounded")]
    ArbitrageUnboundedGrowth { node: NodeId },
    #[error("claim is not measurable with respect to the terminal price history (block {block})")]
    NotMeasurable { block: usize },
    #[error("claim payoff is negative in state {state}")]
    NegativeClaim { state: usize },
    #[error("claim is not replicable: child-value system inconsistent at {node}")]
    NotReplicable { node: NodeId },
    #[error("normalization degenerate: {0}")]
    Degenerate(String),
    #[error("identity check failed: {0}")]
    IdentityViolated(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}
