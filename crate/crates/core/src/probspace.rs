//! Finite filtered probability spaces.
//!
//! A filtration is a list of partitions of the atom set, one per time
//! `0..=T`, each refining its predecessor. Random variables are plain slices
//! indexed by atom; processes are `time × atom` grids. Conditional
//! expectation, martingale classification and the immersion test all work
//! against an arbitrary weight vector so the same code serves ℙ and every ℚ.

use std::cmp::Ordering;

use crate::error::{Error, NodeId, Result};
use crate::scalar::Scalar;

/// A partition of `0..n` into disjoint nonempty blocks.
///
/// Blocks are kept in canonical order (by smallest atom) with sorted atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Groups atoms with equal labels.
    pub fn from_labels<K: PartialEq>(labels: &[K]) -> Self {
        let mut reps: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (w, label) in labels.iter().enumerate() {
            match reps.iter().position(|&r| labels[r] == *label) {
                Some(b) => {
                    blocks[b].push(w);
                    block_of.push(b);
                }
                None => {
                    reps.push(w);
                    blocks.push(vec![w]);
                    block_of.push(blocks.len() - 1);
                }
            }
        }
        Partition { blocks, block_of }
    }

    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidFiltration(format!("block {b} is empty")));
            }
            for &w in block {
                if w >= n || label[w] != usize::MAX {
                    return Err(Error::InvalidFiltration(format!(
                        "atom {w} is out of range or appears twice"
                    )));
                }
                label[w] = b;
            }
        }
        if let Some(w) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidFiltration(format!("atom {w} is not covered")));
        }
        Ok(Partition::from_labels(&label))
    }

    pub fn trivial(n: usize) -> Self {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn discrete(n: usize) -> Self {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn num_atoms(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    /// `true` if every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.num_atoms() == coarser.num_atoms()
            && self.blocks.iter().all(|block| {
                let b = coarser.block_of(block[0]);
                block.iter().all(|&w| coarser.block_of(w) == b)
            })
    }

    /// Common refinement (σ-algebra generated by both).
    pub fn meet(&self, other: &Partition) -> Partition {
        let labels: Vec<(usize, usize)> = (0..self.num_atoms())
            .map(|w| (self.block_of(w), other.block_of(w)))
            .collect();
        Partition::from_labels(&labels)
    }

    /// Finest common coarsening (σ-algebra intersection).
    pub fn join(&self, other: &Partition) -> Partition {
        let n = self.num_atoms();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for part in [self, other] {
            for block in part.blocks() {
                for &w in &block[1..] {
                    let (a, b) = (find(&mut parent, block[0]), find(&mut parent, w));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|w| find(&mut parent, w)).collect();
        Partition::from_labels(&roots)
    }

    /// First block on which `x` is not constant, if any.
    pub fn non_constant_block<S: Scalar>(&self, x: &[S], tol: &S) -> Option<usize> {
        self.blocks.iter().position(|block| {
            let v = &x[block[0]];
            block.iter().any(|&w| !x[w].near(v, tol))
        })
    }
}

/// Time-indexed refining partitions with precomputed parent/children links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    partitions: Vec<Partition>,
    children: Vec<Vec<Vec<usize>>>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        let Some(first) = partitions.first() else {
            return Err(Error::InvalidFiltration("no partitions".into()));
        };
        let n = first.num_atoms();
        for (t, pair) in partitions.windows(2).enumerate() {
            if pair[1].num_atoms() != n || !pair[1].refines(&pair[0]) {
                return Err(Error::InvalidFiltration(format!(
                    "partition at t={} does not refine partition at t={t}",
                    t + 1
                )));
            }
        }
        let children = partitions
            .windows(2)
            .map(|pair| {
                let mut kids = vec![Vec::new(); pair[0].num_blocks()];
                for (c, block) in pair[1].blocks().iter().enumerate() {
                    kids[pair[0].block_of(block[0])].push(c);
                }
                kids
            })
            .collect();
        Ok(Filtration {
            partitions,
            children,
        })
    }

    /// The same partition at every time.
    pub fn constant(partition: Partition, horizon: usize) -> Self {
        Filtration::new(vec![partition; horizon + 1]).expect("constant filtration is valid")
    }

    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn num_atoms(&self) -> usize {
        self.partitions[0].num_atoms()
    }

    pub fn at(&self, t: usize) -> &Partition {
        &self.partitions[t]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn terminal(&self) -> &Partition {
        &self.partitions[self.horizon()]
    }

    /// Blocks at `t + 1` contained in block `b` at `t`.
    pub fn children(&self, t: usize, b: usize) -> &[usize] {
        &self.children[t][b]
    }

    /// Block at `t - 1` containing block `b` at `t`.
    pub fn parent(&self, t: usize, b: usize) -> usize {
        let atom = self.partitions[t].block(b)[0];
        self.partitions[t - 1].block_of(atom)
    }

    /// Nonterminal nodes in time-then-block order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.horizon()).flat_map(move |t| {
            (0..self.partitions[t].num_blocks()).map(move |block| NodeId { t, block })
        })
    }

    /// Node containing `atom` at time `t`.
    pub fn node_of(&self, t: usize, atom: usize) -> NodeId {
        NodeId {
            t,
            block: self.partitions[t].block_of(atom),
        }
    }

    /// Checks `self ⊆ finer` blockwise; errors with the first offending time.
    pub fn check_subfiltration_of(&self, finer: &Filtration) -> Result<()> {
        if self.horizon() != finer.horizon() {
            return Err(Error::NotSubfiltration { t: 0 });
        }
        for t in 0..=self.horizon() {
            if !finer.at(t).refines(self.at(t)) {
                return Err(Error::NotSubfiltration { t });
            }
        }
        Ok(())
    }

    pub fn is_subfiltration_of(&self, finer: &Filtration) -> bool {
        self.check_subfiltration_of(finer).is_ok()
    }

    /// Checks that `grid[t]` is constant on every block at time `t`.
    pub fn check_adapted<S: Scalar>(&self, grid: &[Vec<S>], tol: &S) -> Result<()> {
        for (t, row) in grid.iter().enumerate() {
            if let Some(block) = self.partitions[t].non_constant_block(row, tol) {
                return Err(Error::NotAdapted { t, block });
            }
        }
        Ok(())
    }
}

/// Atoms with strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbSpace<S> {
    ids: Vec<String>,
    prob: Vec<S>,
}

impl<S: Scalar> FiniteProbSpace<S> {
    pub fn new(ids: Vec<String>, prob: Vec<S>) -> Result<Self> {
        if ids.is_empty() || ids.len() != prob.len() {
            return Err(Error::InvalidSpace(format!(
                "{} ids for {} weights",
                ids.len(),
                prob.len()
            )));
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(Error::InvalidSpace(format!("duplicate state id {id:?}")));
            }
        }
        if let Some(w) = prob.iter().position(|p| *p <= S::zero()) {
            return Err(Error::InvalidSpace(format!(
                "state {:?} has non-positive probability {}",
                ids[w], prob[w]
            )));
        }
        let total = prob.iter().cloned().fold(S::zero(), |a, b| a + b);
        let tol = if S::EXACT {
            S::zero()
        } else {
            S::from_f64(1e-12)
        };
        if !total.near(&S::one(), &tol) {
            return Err(Error::InvalidSpace(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(FiniteProbSpace { ids, prob })
    }

    pub fn uniform(n: usize) -> Self {
        let ids = (0..n).map(|i| format!("w{i}")).collect();
        let prob = vec![S::from_ratio(1, n as i64); n];
        FiniteProbSpace { ids, prob }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn probs(&self) -> &[S] {
        &self.prob
    }

    pub fn prob(&self, atom: usize) -> &S {
        &self.prob[atom]
    }

    pub fn mass(&self, atoms: &[usize]) -> S {
        mass(&self.prob, atoms)
    }

    pub fn expectation(&self, x: &[S]) -> S {
        expectation(&self.prob, x)
    }

    /// `E_ℙ(X | partition)` as a per-atom vector.
    pub fn conditional_expectation(&self, x: &[S], partition: &Partition) -> Vec<S> {
        conditional_expectation(&self.prob, x, partition)
    }
}

pub fn mass<S: Scalar>(weights: &[S], atoms: &[usize]) -> S {
    atoms
        .iter()
        .fold(S::zero(), |acc, &w| acc + weights[w].clone())
}

pub fn expectation<S: Scalar>(weights: &[S], x: &[S]) -> S {
    weights
        .iter()
        .zip(x)
        .fold(S::zero(), |acc, (p, v)| acc + p.clone() * v.clone())
}

/// Weighted mean of `x` over one block.
pub fn block_mean<S: Scalar>(weights: &[S], x: &[S], block: &[usize]) -> S {
    let (num, den) = block.iter().fold((S::zero(), S::zero()), |(n, d), &w| {
        (
            n + weights[w].clone() * x[w].clone(),
            d + weights[w].clone(),
        )
    });
    num / den
}

/// Conditional expectation of `x` given `partition` under `weights`, per atom.
pub fn conditional_expectation<S: Scalar>(weights: &[S], x: &[S], partition: &Partition) -> Vec<S> {
    let means: Vec<S> = partition
        .blocks()
        .iter()
        .map(|block| block_mean(weights, x, block))
        .collect();
    (0..x.len())
        .map(|w| means[partition.block_of(w)].clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    Martingale,
    Supermartingale,
    Submartingale,
    Neither,
}

impl ProcessKind {
    pub fn is_supermartingale(self) -> bool {
        matches!(self, ProcessKind::Martingale | ProcessKind::Supermartingale)
    }

    pub fn is_submartingale(self) -> bool {
        matches!(self, ProcessKind::Martingale | ProcessKind::Submartingale)
    }

    pub fn label(self) -> &'static str {
        match self {
            ProcessKind::Martingale => "martingale",
            ProcessKind::Supermartingale => "supermartingale",
            ProcessKind::Submartingale => "submartingale",
            ProcessKind::Neither => "neither",
        }
    }
}

/// Result of [`classify_process`].
#[derive(Debug, Clone)]
pub struct Classification<S> {
    pub kind: ProcessKind,
    /// `defects[t][b] = E(X_{t+1} | block b of F_t) − X_t` for `t < T`.
    pub defects: Vec<Vec<S>>,
    /// First node with a nonzero defect.
    pub witness: Option<NodeId>,
}

impl<S: Scalar> Classification<S> {
    pub fn defect(&self, node: NodeId) -> &S {
        &self.defects[node.t][node.block]
    }
}

/// Classifies an adapted process as a (super/sub)martingale under `weights`.
pub fn classify_process<S: Scalar>(
    x: &[Vec<S>],
    filtration: &Filtration,
    weights: &[S],
    tol: &S,
) -> Result<Classification<S>> {
    filtration.check_adapted(x, tol)?;
    let horizon = filtration.horizon().min(x.len().saturating_sub(1));
    let mut defects = Vec::with_capacity(horizon);
    let (mut any_pos, mut any_neg) = (false, false);
    let mut witness = None;
    for t in 0..horizon {
        let part = filtration.at(t);
        let row: Vec<S> = part
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, block)| {
                let d = block_mean(weights, &x[t + 1], block) - x[t][block[0]].clone();
                match d.sign_tol(tol) {
                    Ordering::Greater => any_pos = true,
                    Ordering::Less => any_neg = true,
                    Ordering::Equal => {}
                }
                if witness.is_none() && !d.is_zero_tol(tol) {
                    witness = Some(NodeId { t, block: b });
                }
                d
            })
            .collect();
        defects.push(row);
    }
    let kind = match (any_pos, any_neg) {
        (false, false) => ProcessKind::Martingale,
        (false, true) => ProcessKind::Supermartingale,
        (true, false) => ProcessKind::Submartingale,
        (true, true) => ProcessKind::Neither,
    };
    Ok(Classification {
        kind,
        defects,
        witness,
    })
}

/// Natural filtration of a `time × asset × atom` price grid.
///
/// Atoms share a block at `t` iff their full price histories on `[0, t]` agree.
pub fn natural_filtration<S: Scalar>(prices: &[Vec<Vec<S>>]) -> Result<Filtration> {
    let Some(first) = prices.first() else {
        return Err(Error::InvalidMarket("empty price grid".into()));
    };
    let n = first.first().map_or(0, Vec::len);
    for (asset, row) in first.iter().enumerate() {
        if row.iter().any(|p| *p != row[0]) {
            return Err(Error::NonTrivialStart { asset });
        }
    }
    let mut partitions = vec![Partition::trivial(n)];
    for slice in &prices[1..] {
        let prev = partitions.last().expect("nonempty");
        let key = |w: usize| -> (usize, Vec<&S>) {
            (prev.block_of(w), slice.iter().map(|row| &row[w]).collect())
        };
        let labels: Vec<(usize, Vec<&S>)> = (0..n).map(key).collect();
        partitions.push(Partition::from_labels(&labels));
    }
    Filtration::new(partitions)
}

/// Witness for a failed immersion check: the conditional probability of the
/// terminal E-block `e_block` given F-block `f_block` at time `t` differs from
/// its conditional probability given the enclosing E-block.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionWitness<S> {
    pub t: usize,
    pub e_block: usize,
    pub f_block: usize,
    pub given_f: S,
    pub given_e: S,
}

#[derive(Debug, Clone)]
pub struct ImmersionReport<S> {
    pub immersed: bool,
    pub witness: Option<ImmersionWitness<S>>,
    /// `E_t = F_t ∩ E_T` at every time.
    pub sigma_identity: bool,
    /// First time at which the σ-algebra identity fails.
    pub sigma_witness: Option<usize>,
}

/// Conditional law of the terminal blocks of `target` given one block.
fn conditional_law<S: Scalar>(weights: &[S], target: &Partition, block: &[usize]) -> Vec<S> {
    let mut law = vec![S::zero(); target.num_blocks()];
    let total = mass(weights, block);
    for &w in block {
        let b = target.block_of(w);
        law[b] = law[b].clone() + weights[w].clone();
    }
    law.into_iter().map(|m| m / total.clone()).collect()
}

/// Tests whether `e` is immersed in `f` under `weights`.
///
/// Checks `P(A | F_t) = P(A | E_t)` for every atom `A` of the terminal E
/// partition, which suffices on a finite space by linearity.
pub fn is_immersed<S: Scalar>(
    e: &Filtration,
    f: &Filtration,
    weights: &[S],
    tol: &S,
) -> Result<ImmersionReport<S>> {
    e.check_subfiltration_of(f)?;
    let terminal = e.terminal();
    let mut witness = None;
    'outer: for t in 0..=f.horizon() {
        let e_laws: Vec<Vec<S>> = e
            .at(t)
            .blocks()
            .iter()
            .map(|block| conditional_law(weights, terminal, block))
            .collect();
        for (fb, block) in f.at(t).blocks().iter().enumerate() {
            let law = conditional_law(weights, terminal, block);
            let eb = e.at(t).block_of(block[0]);
            for (a, (pf, pe)) in law.iter().zip(&e_laws[eb]).enumerate() {
                if !pf.near(pe, tol) {
                    witness = Some(ImmersionWitness {
                        t,
                        e_block: a,
                        f_block: fb,
                        given_f: pf.clone(),
                        given_e: pe.clone(),
                    });
                    break 'outer;
                }
            }
        }
    }
    let sigma_witness = sigma_identity_failure(e, f);
    Ok(ImmersionReport {
        immersed: witness.is_none(),
        witness,
        sigma_identity: sigma_witness.is_none(),
        sigma_witness,
    })
}

/// First `t` with `E_t ≠ F_t ∩ E_T`, if any.
pub fn sigma_identity_failure(e: &Filtration, f: &Filtration) -> Option<usize> {
    let terminal = e.terminal();
    (0..=f.horizon()).find(|&t| f.at(t).join(terminal) != *e.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn r(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn partition_ops() {
        let a = Partition::from_labels(&[0, 0, 1, 1]);
        let b = Partition::from_labels(&[0, 1, 0, 1]);
        assert_eq!(a.meet(&b), Partition::discrete(4));
        assert_eq!(a.join(&b), Partition::trivial(4));
        assert!(Partition::discrete(4).refines(&a));
        assert!(!a.refines(&b));
        let c = Partition::from_blocks(4, vec![vec![3, 1], vec![0, 2]]).unwrap();
        assert_eq!(c, b);
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn filtration_rejects_coarsening() {
        let err = Filtration::new(vec![Partition::discrete(2), Partition::trivial(2)]);
        assert!(err.is_err());
    }

    #[test]
    fn space_validation() {
        let ids = vec!["u".to_string(), "d".to_string()];
        assert!(FiniteProbSpace::new(ids.clone(), vec![r(1, 2), r(1, 2)]).is_ok());
        assert!(FiniteProbSpace::new(ids.clone(), vec![r(1, 1), r(0, 1)]).is_err());
        assert!(FiniteProbSpace::new(ids.clone(), vec![r(1, 2), r(2, 5)]).is_err());
        let dup = vec!["u".to_string(), "u".to_string()];
        assert!(FiniteProbSpace::new(dup, vec![r(1, 2), r(1, 2)]).is_err());
        assert!(FiniteProbSpace::new(ids, vec![0.5f64, 0.5 + 1e-14]).is_ok());
    }

    #[test]
    fn conditional_expectation_examples() {
        // constant
        let p = vec![r(1, 4); 4];
        let x = vec![r(7, 3); 4];
        let part = Partition::from_labels(&[0, 0, 1, 1]);
        assert_eq!(conditional_expectation(&p, &x, &part), x);
        // symmetric two-point mean
        let p2 = vec![r(1, 2), r(1, 2)];
        let m = conditional_expectation(&p2, &[r(2, 1), r(4, 1)], &Partition::trivial(2));
        assert_eq!(m, vec![r(3, 1), r(3, 1)]);
        // block sums by hand: (4+1)/2, (1+1/4)/2
        let x = vec![r(4, 1), r(1, 1), r(1, 1), r(1, 4)];
        let m = conditional_expectation(&p, &x, &part);
        assert_eq!(m, vec![r(5, 2), r(5, 2), r(5, 8), r(5, 8)]);
    }

    fn binomial_filtration() -> Filtration {
        Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)]).unwrap()
    }

    #[test]
    fn classify_binomial_stock() {
        let f = binomial_filtration();
        let s = vec![vec![r(1, 1), r(1, 1)], vec![r(2, 1), r(1, 2)]];
        let zero = Rational::from_int(0);
        let under_p = classify_process(&s, &f, &[r(1, 2), r(1, 2)], &zero).unwrap();
        assert_eq!(under_p.kind, ProcessKind::Submartingale);
        assert_eq!(under_p.defects[0][0], r(1, 4));
        let under_q = classify_process(&s, &f, &[r(1, 3), r(2, 3)], &zero).unwrap();
        assert_eq!(under_q.kind, ProcessKind::Martingale);
        let constant = vec![vec![r(5, 1); 2]; 2];
        let c = classify_process(&constant, &f, &[r(1, 2), r(1, 2)], &zero).unwrap();
        assert_eq!(c.kind, ProcessKind::Martingale);
    }

    #[test]
    fn classify_rejects_non_adapted() {
        let f = binomial_filtration();
        let x = vec![vec![r(1, 1), r(2, 1)], vec![r(1, 1), r(1, 1)]];
        let err = classify_process(&x, &f, &[r(1, 2), r(1, 2)], &Rational::from_int(0));
        assert!(matches!(err, Err(Error::NotAdapted { t: 0, .. })));
    }

    #[test]
    fn natural_filtration_examples() {
        // constant prices
        let flat = vec![vec![vec![r(1, 1); 3]]; 3];
        let f = natural_filtration(&flat).unwrap();
        assert!((0..=2).all(|t| f.at(t).num_blocks() == 1));
        // CRR two periods, four paths uu, ud, du, dd
        let s = vec![
            vec![vec![r(1, 1); 4]],
            vec![vec![r(2, 1), r(2, 1), r(1, 2), r(1, 2)]],
            vec![vec![r(4, 1), r(1, 1), r(1, 1), r(1, 4)]],
        ];
        let f = natural_filtration(&s).unwrap();
        assert_eq!(f.at(1).num_blocks(), 2);
        assert_eq!(f.at(2).num_blocks(), 4);
        // ud and du share a price at t=2 but not a history
        assert_ne!(f.at(2).block_of(1), f.at(2).block_of(2));
        // second asset splits what the first does not
        let one = vec![
            vec![vec![r(1, 1); 3]],
            vec![vec![r(2, 1), r(2, 1), r(1, 2)]],
        ];
        let two = vec![
            vec![vec![r(1, 1); 3], vec![r(1, 1); 3]],
            vec![
                vec![r(2, 1), r(2, 1), r(1, 2)],
                vec![r(3, 1), r(1, 1), r(1, 1)],
            ],
        ];
        let f1 = natural_filtration(&one).unwrap();
        let f2 = natural_filtration(&two).unwrap();
        assert!(f2.at(1).refines(f1.at(1)) && f2.at(1) != f1.at(1));
    }

    #[test]
    fn natural_filtration_requires_trivial_start() {
        let s = vec![vec![vec![r(1, 1), r(2, 1)]]];
        assert!(matches!(
            natural_filtration(&s),
            Err(Error::NonTrivialStart { asset: 0 })
        ));
    }

    /// Atoms: (up,g), (up,b), (down,g), (down,b).
    fn insider(acc: Rational) -> (Vec<Rational>, Filtration, Filtration) {
        let half = r(1, 2);
        let one = Rational::from_int(1);
        let p = vec![
            half.clone() * acc.clone() * half.clone(),
            half.clone() * (one.clone() - acc.clone()) * half.clone(),
            half.clone() * (one.clone() - acc.clone()) * half.clone(),
            half.clone() * acc * half,
        ];
        let e = Filtration::new(vec![
            Partition::trivial(4),
            Partition::from_labels(&[0, 0, 1, 1]),
        ])
        .unwrap();
        let signal = Partition::from_labels(&[0, 1, 0, 1]);
        let f = Filtration::new(vec![signal.clone(), signal.meet(e.at(1))]).unwrap();
        (p, e, f)
    }

    #[test]
    fn immersion_examples() {
        let zero = Rational::from_int(0);
        let (p, e, _) = insider(r(4, 5));
        let rep = is_immersed(&e, &e, &p, &zero).unwrap();
        assert!(rep.immersed && rep.sigma_identity);

        let (p, e, f) = insider(r(1, 2));
        let rep = is_immersed(&e, &f, &p, &zero).unwrap();
        assert!(rep.immersed);
        assert!(rep.sigma_identity);

        let (p, e, f) = insider(r(4, 5));
        let rep = is_immersed(&e, &f, &p, &zero).unwrap();
        assert!(!rep.immersed);
        let w = rep.witness.unwrap();
        assert_eq!((w.t, w.e_block, w.f_block), (0, 0, 0));
        assert_eq!(w.given_f, r(4, 5));
        assert_eq!(w.given_e, r(1, 2));
    }

    #[test]
    fn immersion_requires_subfiltration() {
        let zero = Rational::from_int(0);
        let (p, e, f) = insider(r(1, 2));
        assert!(matches!(
            is_immersed(&f, &e, &p, &zero),
            Err(Error::NotSubfiltration { t: 0 })
        ));
    }

    #[test]
    fn sigma_identity_detects_clairvoyance() {
        // F_0 reveals the terminal move exactly
        let e = Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)]).unwrap();
        let f = Filtration::constant(Partition::discrete(2), 1);
        assert_eq!(sigma_identity_failure(&e, &f), Some(0));
    }
}
