//! Dense two-phase primal simplex over [`Scalar`].
//!
//! Exact in rational mode. Entering variables follow Dantzig's rule until a run
//! of degenerate pivots is seen, then Bland's rule, which cannot cycle.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub rel: Relation,
    pub rhs: S,
}

/// `maximize objective · x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, value: S },
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![S::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<S>, rel: Relation, rhs: S) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn solve(&self, tol: &S) -> LpOutcome<S> {
        Tableau::build(self).run(&self.objective, tol)
    }
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    num_vars: usize,
    num_cols: usize,
    artificial_start: usize,
}

const DEGENERATE_RUN: usize = 20;

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let n = lp.num_vars;
        // normalize to nonnegative right-hand sides
        let normalized: Vec<(Vec<S>, Relation, S)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < S::zero() {
                    let rel = match c.rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (
                        c.coeffs.iter().map(|x| -x.clone()).collect(),
                        rel,
                        -c.rhs.clone(),
                    )
                } else {
                    (c.coeffs.clone(), c.rel, c.rhs.clone())
                }
            })
            .collect();
        let num_slack = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
        let num_art = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let artificial_start = n + num_slack;
        let num_cols = artificial_start + num_art;
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut art) = (n, artificial_start);
        for (coeffs, rel, rhs) in normalized {
            let mut row = coeffs;
            row.resize(num_cols + 1, S::zero());
            match rel {
                Relation::Le => {
                    row[slack] = S::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -S::one();
                    slack += 1;
                    row[art] = S::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = S::one();
                    basis.push(art);
                    art += 1;
                }
            }
            row[num_cols] = rhs;
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            num_vars: n,
            num_cols,
            artificial_start,
        }
    }

    /// Objective row for `maximize cost · x`, reduced against the current basis.
    fn objective_row(&self, cost: &[S]) -> Vec<S> {
        let mut z: Vec<S> = (0..=self.num_cols)
            .map(|j| {
                if j < cost.len() {
                    -cost[j].clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let f = z[b].clone();
            if !f.is_zero() {
                for (zj, aij) in z.iter_mut().zip(&self.rows[i]) {
                    *zj = zj.clone() - f.clone() * aij.clone();
                }
            }
        }
        z
    }

    fn pivot(&mut self, z: &mut [S], r: usize, c: usize, tol: &S) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero_tol(tol) {
                if i != r && !row[c].is_zero() {
                    row[c] = S::zero();
                }
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        let f = z[c].clone();
        if !f.is_zero() {
            for (x, p) in z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on columns `< allowed`. Returns false if unbounded.
    fn iterate(&mut self, z: &mut [S], allowed: usize, tol: &S) -> bool {
        let rhs = self.num_cols;
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = S::zero();
            for (j, zj) in z.iter().enumerate().take(allowed) {
                if *zj < -tol.clone() {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if enter.is_none() || *zj < best {
                        enter = Some(j);
                        best = zj.clone();
                    }
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<usize> = None;
            let mut best_ratio = S::zero();
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > *tol {
                    let ratio = row[rhs].clone() / row[c].clone();
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio
                                || (ratio.near(&best_ratio, tol) && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                }
            }
            let Some(r) = leave else { return false };
            if best_ratio.is_zero_tol(tol) {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(z, r, c, tol);
        }
    }

    fn run(mut self, cost: &[S], tol: &S) -> LpOutcome<S> {
        let rhs = self.num_cols;
        if self.artificial_start < self.num_cols {
            let mut phase1 = vec![S::zero(); self.num_cols];
            for c in phase1.iter_mut().skip(self.artificial_start) {
                *c = -S::one();
            }
            let mut z = self.objective_row(&phase1);
            self.iterate(&mut z, self.num_cols, tol);
            if z[rhs] < -tol.clone() {
                return LpOutcome::Infeasible;
            }
            // drive remaining artificials out of the basis
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_start {
                    let col =
                        (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero_tol(tol));
                    match col {
                        Some(j) => self.pivot(&mut z, i, j, tol),
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut z = self.objective_row(cost);
        if !self.iterate(&mut z, self.artificial_start, tol) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![S::zero(); self.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                x[b] = self.rows[i][rhs].clone();
            }
        }
        LpOutcome::Optimal {
            x,
            value: z[rhs].clone(),
        }
    }
}
