//! Information enlargement, sensitivity, efficiency and discount-factor
//! compatibility between the price filtration and a larger one.

use crate::error::{Error, NodeId, Result};
use crate::market::{discount, Market};
use crate::noarb::{check_emm, find_emms, rnp_from_measure, Measure};
use crate::probspace::{
    is_immersed, mass, sigma_identity_failure, Filtration, ImmersionWitness, Partition,
};
use crate::scalar::Scalar;

/// A labelled observation `Y_t` that becomes known from `reveal_time` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub name: String,
    pub reveal_time: usize,
    /// `time × state` labels; a single row is read as constant in time.
    pub values: Vec<Vec<String>>,
}

impl Signal {
    /// A signal whose value never changes after it is revealed.
    pub fn constant(name: impl Into<String>, reveal_time: usize, values: Vec<String>) -> Self {
        Signal {
            name: name.into(),
            reveal_time,
            values: vec![values],
        }
    }

    fn at(&self, t: usize) -> &[String] {
        &self.values[t.min(self.values.len() - 1)]
    }
}

/// `F_t` generated by `E_t` and every signal value observed up to `t`.
pub fn enlarge(e: &Filtration, signals: &[Signal]) -> Result<Filtration> {
    let n = e.num_atoms();
    for s in signals {
        if s.values.is_empty() || s.values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidFiltration(format!(
                "signal {} does not cover all {n} states",
                s.name
            )));
        }
        if s.values.len() > 1 && s.values.len() != e.horizon() + 1 {
            return Err(Error::InvalidFiltration(format!(
                "signal {} has {} rows, expected 1 or {}",
                s.name,
                s.values.len(),
                e.horizon() + 1
            )));
        }
    }
    let parts = (0..=e.horizon())
        .map(|t| {
            let mut part = e.at(t).clone();
            for s in signals.iter().filter(|s| s.reveal_time <= t) {
                for u in s.reveal_time..=t {
                    part = part.meet(&Partition::from_labels(s.at(u)));
                }
            }
            part
        })
        .collect();
    Filtration::new(parts)
}

/// Failure of `P(A | E_∞) = P(A | E_t)` for an `F_t` block `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReverseWitness<S> {
    pub t: usize,
    pub f_block: usize,
    /// Terminal price-history block conditioned on.
    pub e_block: usize,
    pub given_terminal: S,
    pub given_current: S,
}

#[derive(Debug, Clone)]
pub struct SensitivityReport<S> {
    /// Future price events are conditionally independent of extra information.
    pub forward: bool,
    pub forward_witness: Option<ImmersionWitness<S>>,
    /// Extra information is conditionally independent of future prices.
    pub reverse: bool,
    pub reverse_witness: Option<ReverseWitness<S>>,
    /// `E_t = F_t ∩ E_∞` for all `t` (necessary, not sufficient).
    pub sigma_identity: bool,
    pub sigma_failure: Option<usize>,
}

impl<S> SensitivityReport<S> {
    pub fn sensitive(&self) -> bool {
        self.forward && self.reverse
    }

    /// The two conditional-independence tests agree.
    pub fn consistent(&self) -> bool {
        self.forward == self.reverse
    }
}

fn reverse_check<S: Scalar>(
    e: &Filtration,
    f: &Filtration,
    weights: &[S],
    tol: &S,
) -> Option<ReverseWitness<S>> {
    let terminal = e.terminal();
    for t in 0..=f.horizon() {
        for (fb, a) in f.at(t).blocks().iter().enumerate() {
            for (cb, c) in terminal.blocks().iter().enumerate() {
                let e_block = e.at(t).block(e.at(t).block_of(c[0]));
                let in_c: Vec<usize> = a.iter().copied().filter(|w| c.contains(w)).collect();
                let in_b: Vec<usize> = a.iter().copied().filter(|w| e_block.contains(w)).collect();
                let given_terminal = mass(weights, &in_c) / mass(weights, c);
                let given_current = mass(weights, &in_b) / mass(weights, e_block);
                if !given_terminal.near(&given_current, tol) {
                    return Some(ReverseWitness {
                        t,
                        f_block: fb,
                        e_block: cb,
                        given_terminal,
                        given_current,
                    });
                }
            }
        }
    }
    None
}

/// Runs both conditional-independence tests and the σ-algebra identity for
/// the market's price filtration inside `f` under ℙ.
pub fn sensitivity_report<S: Scalar>(
    market: &Market<S>,
    f: &Filtration,
    tol: &S,
) -> Result<SensitivityReport<S>> {
    sensitivity_under(market.evolution(), f, market.probs(), tol)
}

/// As [`sensitivity_report`] for explicit filtrations and weights.
pub fn sensitivity_under<S: Scalar>(
    e: &Filtration,
    f: &Filtration,
    weights: &[S],
    tol: &S,
) -> Result<SensitivityReport<S>> {
    let forward = is_immersed(e, f, weights, tol)?;
    let reverse = reverse_check(e, f, weights, tol);
    let sigma_failure = sigma_identity_failure(e, f);
    Ok(SensitivityReport {
        forward: forward.immersed,
        forward_witness: forward.witness,
        reverse: reverse.is_none(),
        reverse_witness: reverse,
        sigma_identity: sigma_failure.is_none(),
        sigma_failure,
    })
}

#[derive(Debug, Clone)]
pub struct EfficiencyVerdict<S> {
    pub efficient: bool,
    /// An equivalent martingale measure exists for the ambient filtration.
    pub risk_neutral: bool,
    pub sensitivity: SensitivityReport<S>,
}

/// Efficient = an equivalent martingale measure exists with respect to `f`
/// and the market is sensitive to `f`.
pub fn efficiency_check<S: Scalar>(
    market: &Market<S>,
    f: &Filtration,
    tol: &S,
) -> Result<EfficiencyVerdict<S>> {
    let risk_neutral = find_emms(market, f, tol)?.has_equivalent();
    let sensitivity = sensitivity_report(market, f, tol)?;
    Ok(EfficiencyVerdict {
        efficient: risk_neutral && sensitivity.sensitive(),
        risk_neutral,
        sensitivity,
    })
}

/// Where a discount factor fails to price an asset under the other filtration.
#[derive(Debug, Clone)]
pub struct CompatibilityWitness<S> {
    pub asset: usize,
    pub node: NodeId,
    pub price: S,
    pub value: S,
}

#[derive(Debug, Clone)]
pub struct SdfReport<S> {
    /// The F-density prices every asset given `E_t`.
    pub downward: bool,
    pub downward_witness: Option<CompatibilityWitness<S>>,
    /// The E-density prices every asset given `F_t`.
    pub upward: bool,
    pub upward_witness: Option<CompatibilityWitness<S>>,
}

/// First node where `E_ℙ(Λ_T / Λ_t · P_T | G_t) ≠ P_t`.
fn pricing_failure<S: Scalar>(
    market: &Market<S>,
    levels: &[Vec<S>],
    g: &Filtration,
    tol: &S,
) -> Option<CompatibilityWitness<S>> {
    let p = discount(market);
    let probs = market.probs();
    let h = market.horizon();
    for i in 0..market.num_assets() {
        for t in 0..h {
            let x: Vec<S> = (0..market.num_states())
                .map(|w| levels[h][w].clone() / levels[t][w].clone() * p[h][i][w].clone())
                .collect();
            for (b, block) in g.at(t).blocks().iter().enumerate() {
                let value = block
                    .iter()
                    .fold(S::zero(), |acc, &w| acc + probs[w].clone() * x[w].clone())
                    / mass(probs, block);
                let price = p[t][i][block[0]].clone();
                if !value.near(&price, tol) {
                    return Some(CompatibilityWitness {
                        asset: i,
                        node: NodeId { t, block: b },
                        price,
                        value,
                    });
                }
            }
        }
    }
    None
}

/// Checks whether the density process of `q_f` (an EMM for `f`) prices
/// assets given price history, and whether that of `q_e` (an EMM for the
/// price filtration) prices assets given `f`.
pub fn sdf_compatibility<S: Scalar>(
    market: &Market<S>,
    f: &Filtration,
    q_e: &Measure<S>,
    q_f: &Measure<S>,
    tol: &S,
) -> Result<SdfReport<S>> {
    let e = market.evolution();
    e.check_subfiltration_of(f)?;
    check_emm(market, e, &q_e.weights, tol)?;
    check_emm(market, f, &q_f.weights, tol)?;
    let probs = market.probs();
    let lambda_f = rnp_from_measure(q_f, f, probs)?;
    let lambda_e = rnp_from_measure(q_e, e, probs)?;
    let down = pricing_failure(market, &lambda_f.levels, e, tol);
    let up = pricing_failure(market, &lambda_e.levels, f, tol);
    Ok(SdfReport {
        downward: down.is_none(),
        downward_witness: down,
        upward: up.is_none(),
        upward_witness: up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probspace::FiniteProbSpace;
    use crate::scalar::{rat, Rational};

    fn zero() -> Rational {
        rat(0, 1)
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// States (up,g), (up,b), (down,g), (down,b) with P(up|g) = acc.
    fn insider(acc: Rational) -> (Market<Rational>, Filtration) {
        let one = rat(1, 1);
        let half = rat(1, 2);
        let p = vec![
            half.clone() * acc.clone(),
            half.clone() * (one.clone() - acc.clone()),
            half.clone() * (one.clone() - acc.clone()),
            half * acc,
        ];
        let ids = labels(&["up-g", "up-b", "down-g", "down-b"]);
        let space = FiniteProbSpace::new(ids, p).unwrap();
        let prices = vec![
            vec![vec![rat(1, 1); 4], vec![rat(1, 1); 4]],
            vec![
                vec![rat(1, 1); 4],
                vec![rat(2, 1), rat(2, 1), rat(1, 2), rat(1, 2)],
            ],
        ];
        let m = Market::new(space, labels(&["bond", "stock"]), prices, 0).unwrap();
        let sig = Signal::constant("fraud", 0, labels(&["g", "b", "g", "b"]));
        let f = enlarge(m.evolution(), &[sig]).unwrap();
        (m.clone().with_ambient(f.clone()).unwrap(), f)
    }

    #[test]
    fn enlarge_examples() {
        let (m, f) = insider(rat(4, 5));
        let e = m.evolution();
        assert_eq!(enlarge(e, &[]).unwrap(), *e);
        let flat = Signal::constant("c", 0, labels(&["x"; 4]));
        assert_eq!(enlarge(e, &[flat]).unwrap(), *e);
        assert_eq!(f.at(0).blocks(), &[vec![0, 2], vec![1, 3]]);
        // revealed late: only enters at t = 1
        let late = Signal::constant("late", 1, labels(&["g", "b", "g", "b"]));
        let fl = enlarge(e, &[late]).unwrap();
        assert_eq!(fl.at(0).num_blocks(), 1);
        assert_eq!(fl.at(1).num_blocks(), 4);
    }

    #[test]
    fn sensitivity_examples() {
        let (m, _) = insider(rat(4, 5));
        let rep = sensitivity_report(&m, m.evolution(), &zero()).unwrap();
        assert!(rep.sensitive() && rep.sigma_identity);

        let (m, f) = insider(rat(1, 2));
        let rep = sensitivity_report(&m, &f, &zero()).unwrap();
        assert!(rep.sensitive() && rep.consistent());

        let (m, f) = insider(rat(4, 5));
        let rep = sensitivity_report(&m, &f, &zero()).unwrap();
        assert!(!rep.forward && !rep.reverse);
        let w = rep.forward_witness.unwrap();
        assert_eq!((w.given_f, w.given_e), (rat(4, 5), rat(1, 2)));
        let r = rep.reverse_witness.unwrap();
        // P(g | up) = 4/5 against P(g) = 1/2
        assert_eq!((r.given_terminal, r.given_current), (rat(4, 5), rat(1, 2)));
    }

    #[test]
    fn efficiency_examples() {
        let (m, _) = insider(rat(4, 5));
        assert!(
            efficiency_check(&m, m.evolution(), &zero())
                .unwrap()
                .efficient
        );
        let (m, f) = insider(rat(4, 5));
        let v = efficiency_check(&m, &f, &zero()).unwrap();
        assert!(!v.efficient && v.risk_neutral);
        let space = FiniteProbSpace::new(labels(&["u", "d"]), vec![rat(1, 2); 2]).unwrap();
        let prices = vec![
            vec![vec![rat(1, 1); 2], vec![rat(1, 1); 2]],
            vec![vec![rat(1, 1); 2], vec![rat(2, 1), rat(5, 4)]],
        ];
        let dom = Market::new(space, labels(&["bond", "stock"]), prices, 0).unwrap();
        let v = efficiency_check(&dom, dom.evolution(), &zero()).unwrap();
        assert!(!v.efficient && !v.risk_neutral);
    }

    #[test]
    fn sdf_examples() {
        for (acc, upward) in [(rat(1, 2), true), (rat(4, 5), false)] {
            let (m, f) = insider(acc);
            let qe = find_emms(&m, m.evolution(), &zero())
                .unwrap()
                .measure
                .unwrap();
            let qf = find_emms(&m, &f, &zero()).unwrap().measure.unwrap();
            let same = sdf_compatibility(&m, m.evolution(), &qe, &qe, &zero()).unwrap();
            assert!(same.downward && same.upward);
            let rep = sdf_compatibility(&m, &f, &qe, &qf, &zero()).unwrap();
            assert!(rep.downward);
            assert_eq!(rep.upward, upward);
            if !upward {
                let w = rep.upward_witness.unwrap();
                assert_eq!(w.node, NodeId { t: 0, block: 0 });
            }
        }
    }
}
