//! Built-in scenario generators.

use rwval_core::market::Market;
use rwval_core::random::{self, Shape, SignalKind};
use rwval_core::{rat, Rational, Scalar};

use crate::error::{CliError, Result};
use crate::scenario::{AssetSpec, ClaimSpec, Mode, Num, Scenario, SignalSpec, StateSpec, VERSION};

fn one() -> Rational {
    Rational::from_int(1)
}

fn pow(x: &Rational, k: usize) -> Rational {
    (0..k).fold(one(), |acc, _| acc * x.clone())
}

fn call(strike: i64) -> ClaimSpec {
    ClaimSpec {
        name: format!("call{strike}"),
        expr: format!("max(S stock[T] - {strike}, 0)"),
    }
}

/// Cox-Ross-Rubinstein tree with non-recombining states named by their
/// up/down paths, a bond growing at rate `r` and a stock moving by `u` or `d`.
pub fn crr(
    periods: usize,
    u: &Rational,
    d: &Rational,
    r: &Rational,
    p: &Rational,
) -> Result<Scenario> {
    let zero = Rational::from_int(0);
    if periods == 0 || periods > 12 {
        return Err(CliError::BadParams(
            "periods must be between 1 and 12".into(),
        ));
    }
    if *u <= zero || *d <= zero || u == d {
        return Err(CliError::BadParams(
            "u and d must be positive and distinct".into(),
        ));
    }
    if *r <= -one() {
        return Err(CliError::BadParams("r must exceed -1".into()));
    }
    if *p <= zero || *p >= one() {
        return Err(CliError::BadParams(
            "p must lie strictly between 0 and 1".into(),
        ));
    }
    let paths: Vec<Vec<bool>> = (0..1usize << periods)
        .map(|k| {
            (0..periods)
                .map(|j| k >> (periods - 1 - j) & 1 == 0)
                .collect()
        })
        .collect();
    let states = paths
        .iter()
        .map(|path| StateSpec {
            id: path.iter().map(|&up| if up { 'u' } else { 'd' }).collect(),
            prob: Num(path.iter().fold(one(), |acc, &up| {
                acc * if up { p.clone() } else { one() - p.clone() }
            })),
        })
        .collect();
    let growth = one() + r.clone();
    let bond = (0..=periods)
        .map(|t| vec![Num(pow(&growth, t)); paths.len()])
        .collect();
    let stock = (0..=periods)
        .map(|t| {
            paths
                .iter()
                .map(|path| {
                    Num(path[..t].iter().fold(one(), |acc, &up| {
                        acc * if up { u.clone() } else { d.clone() }
                    }))
                })
                .collect()
        })
        .collect();
    Ok(Scenario {
        version: VERSION,
        mode: Mode::Rational,
        states,
        times: periods,
        assets: vec![
            AssetSpec {
                name: "bond".into(),
                prices: bond,
            },
            AssetSpec {
                name: "stock".into(),
                prices: stock,
            },
        ],
        numeraire: "bond".into(),
        signals: vec![],
        claims: vec![call(1)],
    })
}

/// One-period market with a bond and a stock over three equally likely
/// outcomes `u`, `m`, `d`: arbitrage-free but incomplete.
pub fn trinomial(u: &Rational, m: &Rational, d: &Rational) -> Result<Scenario> {
    if !(*d < one() && one() < *u) || *d <= Rational::from_int(0) {
        return Err(CliError::BadParams("need 0 < d < 1 < u".into()));
    }
    let third = Num(rat(1, 3));
    Ok(Scenario {
        version: VERSION,
        mode: Mode::Rational,
        states: ["up", "mid", "down"]
            .iter()
            .map(|id| StateSpec {
                id: id.to_string(),
                prob: third.clone(),
            })
            .collect(),
        times: 1,
        assets: vec![
            AssetSpec {
                name: "bond".into(),
                prices: vec![vec![Num(one()); 3]; 2],
            },
            AssetSpec {
                name: "stock".into(),
                prices: vec![
                    vec![Num(one()); 3],
                    vec![Num(u.clone()), Num(m.clone()), Num(d.clone())],
                ],
            },
        ],
        numeraire: "bond".into(),
        signals: vec![],
        claims: vec![call(1)],
    })
}

/// Canonical binomial plus a time-0 signal `g`/`b` with `P(up | g) = accuracy`.
pub fn insider(accuracy: &Rational) -> Result<Scenario> {
    let zero = Rational::from_int(0);
    if *accuracy <= zero || *accuracy >= one() {
        return Err(CliError::BadParams(
            "accuracy must lie strictly between 0 and 1".into(),
        ));
    }
    let half = rat(1, 2);
    let miss = one() - accuracy.clone();
    let probs = [
        half.clone() * accuracy.clone(),
        half.clone() * miss.clone(),
        half.clone() * miss,
        half * accuracy.clone(),
    ];
    let ids = ["up-g", "up-b", "down-g", "down-b"];
    Ok(Scenario {
        version: VERSION,
        mode: Mode::Rational,
        states: ids
            .iter()
            .zip(probs)
            .map(|(id, p)| StateSpec {
                id: id.to_string(),
                prob: Num(p),
            })
            .collect(),
        times: 1,
        assets: vec![
            AssetSpec {
                name: "bond".into(),
                prices: vec![vec![Num(one()); 4]; 2],
            },
            AssetSpec {
                name: "stock".into(),
                prices: vec![
                    vec![Num(one()); 4],
                    [rat(2, 1), rat(2, 1), rat(1, 2), rat(1, 2)]
                        .into_iter()
                        .map(Num)
                        .collect(),
                ],
            },
        ],
        numeraire: "bond".into(),
        signals: vec![SignalSpec {
            name: "fraud".into(),
            reveal_time: 0,
            values: vec![["g", "b", "g", "b"].iter().map(|s| s.to_string()).collect()],
        }],
        claims: vec![call(1)],
    })
}

/// Scenario carrying the nominal prices of an exact market.
pub fn from_market(market: &Market<Rational>, signals: Vec<SignalSpec>) -> Scenario {
    let n = market.num_states();
    Scenario {
        version: VERSION,
        mode: Mode::Rational,
        states: (0..n)
            .map(|w| StateSpec {
                id: market.space().ids()[w].clone(),
                prob: Num(market.probs()[w].clone()),
            })
            .collect(),
        times: market.horizon(),
        assets: market
            .assets()
            .iter()
            .enumerate()
            .map(|(i, name)| AssetSpec {
                name: name.clone(),
                prices: (0..=market.horizon())
                    .map(|t| {
                        (0..n)
                            .map(
                                |w| Num(market.price(t, i, w).clone() * market.scales()[i].clone()),
                            )
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
        numeraire: market.assets()[market.numeraire()].clone(),
        signals,
        claims: vec![],
    }
}

/// Seeded random market, optionally enlarged by a signal
/// (`independent`, `adapted` or `informative`).
pub fn random_scenario(seed: u64, signal: Option<&str>) -> Result<Scenario> {
    let mut rng = random::rng(seed);
    let market = random::random_market(&mut rng, &Shape::default());
    let kind = match signal {
        None => return Ok(from_market(&market, vec![])),
        Some("independent") => SignalKind::Independent,
        Some("adapted") => SignalKind::Adapted,
        Some("informative") => SignalKind::Informative,
        Some(other) => {
            return Err(CliError::BadParams(format!(
                "unknown signal kind {other:?}"
            )))
        }
    };
    let (big, sig) = random::enlarge_market(&mut rng, &market, kind);
    let signal = SignalSpec {
        name: sig.name,
        reveal_time: sig.reveal_time,
        values: sig.values,
    };
    Ok(from_market(&big, vec![signal]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn crr_one_period_is_canonical_binomial() {
        let s = crr(1, &rat(2, 1), &rat(1, 2), &rat(0, 1), &rat(1, 2)).unwrap();
        assert_eq!(s.states.len(), 2);
        assert_eq!(s.states[0].id, "u");
        assert_eq!(s.assets[1].prices[1][0].0, rat(2, 1));
        assert_eq!(s.assets[1].prices[1][1].0, rat(1, 2));
    }

    #[test]
    fn generated_files_round_trip() {
        let all = [
            crr(3, &rat(3, 2), &rat(2, 3), &rat(1, 20), &rat(2, 5)).unwrap(),
            trinomial(&rat(2, 1), &rat(1, 1), &rat(1, 2)).unwrap(),
            insider(&rat(4, 5)).unwrap(),
            random_scenario(11, Some("adapted")).unwrap(),
            random_scenario(12, None).unwrap(),
        ];
        for s in all {
            let text = s.emit();
            let back = parse_scenario(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.emit(), text);
        }
    }

    #[test]
    fn bad_params_rejected() {
        assert!(crr(0, &rat(2, 1), &rat(1, 2), &rat(0, 1), &rat(1, 2)).is_err());
        assert!(crr(1, &rat(2, 1), &rat(1, 2), &rat(0, 1), &rat(1, 1)).is_err());
        assert!(insider(&rat(1, 1)).is_err());
        assert!(random_scenario(1, Some("loud")).is_err());
    }
}
