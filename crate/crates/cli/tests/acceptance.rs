//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::path::PathBuf;
use std::time::Instant;

use rwval_cli::scenario::{parse_scenario, Loaded};
use rwval_core::gop::{
    compute_gop, growth_statistics, martingale_hypothesis_check, real_world_value, replicate,
    risk_neutral_value,
};
use rwval_core::market::{benchmark, normalize, value_process, Market};
use rwval_core::noarb::{
    find_arbitrage, find_dominating, find_emms, is_complete, rnp_from_measure, EmmSet, EmmStatus,
    Measure,
};
use rwval_core::probspace::{classify_process, conditional_expectation, Partition, ProcessKind};
use rwval_core::random::{self, Rng64, Shape, SignalKind};
use rwval_core::sensitivity::{efficiency_check, sdf_compatibility, sensitivity_report};
use rwval_core::{rat, Rational, Scalar};

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

const FIXTURES: [&str; 7] = [
    "binomial",
    "trinomial",
    "insider",
    "independent-signal",
    "dominated",
    "minimal",
    "crr2",
];

fn zero() -> Rational {
    rat(0, 1)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> Loaded<Rational> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"));
    let text = std::fs::read_to_string(path).unwrap();
    parse_scenario(&text).unwrap().load(None).unwrap()
}

fn equivalent(set: &EmmSet<Rational>) -> Option<Measure<Rational>> {
    set.measure
        .clone()
        .filter(|q| set.has_equivalent() && q.equivalent)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let l = fixture("binomial");
    let m = &l.market;
    let e = m.evolution();
    let set = find_emms(m, e, &zero()).map_err(err)?;
    ensure(set.status == EmmStatus::Unique, || "EMM not unique".into())?;
    let q = equivalent(&set).ok_or("no EMM")?;
    ensure(q.weights == vec![rat(1, 3), rat(2, 3)], || {
        format!("q = {:?}", q.weights)
    })?;
    let g = compute_gop(m, e, &zero()).map_err(err)?;
    ensure(g.nodes[0].fractions[1] == rat(1, 2), || {
        "GOP stock fraction".into()
    })?;
    ensure(g.wealth.values[1] == vec![rat(3, 2), rat(3, 4)], || {
        "W_1".into()
    })?;
    let rnp = rnp_from_measure(&q, e, m.probs()).map_err(err)?;
    ensure(rnp.terminal == vec![rat(2, 3), rat(4, 3)], || "Λ_∞".into())?;
    for (lr, wr) in rnp.levels.iter().zip(&g.wealth.values) {
        for (a, b) in lr.iter().zip(wr) {
            ensure(a.clone() * b.clone() == rat(1, 1), || "Λ W != 1".into())?;
        }
    }
    let call = &l
        .claims
        .iter()
        .find(|(n, _)| n == "call1")
        .ok_or("no call1")?
        .1;
    let rn = risk_neutral_value(call, m, &q, e, 0, &zero()).map_err(err)?;
    let rw = real_world_value(call, m, &g.wealth.values, e, 0, &zero()).map_err(err)?;
    ensure(rn[0] == rat(1, 3) && rw[0] == rat(1, 3), || {
        format!("values {} {}", rn[0], rw[0])
    })
}

fn criterion_2() -> Check {
    for seed in 0..200u64 {
        let mut rng = random::rng(seed);
        let m = random::random_binomial(&mut rng, 3);
        let rep = martingale_hypothesis_check(&m, &zero()).map_err(err)?;
        ensure(rep.verdict, || {
            format!("seed {seed}: benchmarked assets {:?}", rep.kinds)
        })?;
        let (big, _) = random::enlarge_market(&mut rng, &m, SignalKind::Informative);
        let rep = martingale_hypothesis_check(&big, &zero()).map_err(err)?;
        ensure(!rep.verdict && !rep.witnesses.is_empty(), || {
            format!("seed {seed}: informative signal not detected")
        })?;
    }
    Ok(())
}

fn strict_gain(x: &[Rational]) -> bool {
    x.iter().all(|v| *v >= zero()) && x.iter().any(|v| *v > zero())
}

fn criterion_3() -> Check {
    let mut counts = [0usize; 2];
    for seed in 0..500u64 {
        let mut rng = random::rng(10_000 + seed);
        let m = random::random_market(&mut rng, &Shape::default());
        let f = m.ambient();
        let emm = find_emms(&m, f, &zero()).map_err(err)?.has_equivalent();
        let arbitrage = find_arbitrage(&m, f, &zero()).map_err(err)?;
        if let Some(a) = &arbitrage {
            ensure(strict_gain(&a.gains), || {
                format!("seed {seed}: arbitrage witness loses")
            })?;
        }
        let arb = arbitrage.is_some();
        let mut dominated = false;
        for i in 0..m.num_assets() {
            if let Some(d) = find_dominating(&m, i, f, &zero()).map_err(err)? {
                ensure(strict_gain(&d.excess), || {
                    format!("seed {seed}: dominance witness fails")
                })?;
                dominated = true;
            }
        }
        ensure(emm == !arb && emm == !dominated, || {
            format!("seed {seed}: emm {emm}, arbitrage {arb}, dominated {dominated}")
        })?;
        counts[emm as usize] += 1;
    }
    ensure(counts[0] > 0 && counts[1] > 0, || {
        format!("degenerate sample {counts:?}")
    })
}

fn viable(rng: &mut Rng64) -> Market<Rational> {
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

fn enlargement(rng: &mut Rng64, seed: u64) -> Market<Rational> {
    let base = if seed.is_multiple_of(2) {
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
    ][(seed % 3) as usize];
    random::enlarge_market(rng, &base, kind).0
}

fn criterion_4() -> Check {
    let mut complete_sensitive = 0;
    for seed in 0..300u64 {
        let mut rng = random::rng(20_000 + seed);
        let m = if seed.is_multiple_of(2) {
            viable(&mut rng)
        } else {
            enlargement(&mut rng, seed / 2)
        };
        let (e, f) = (m.evolution(), m.ambient());
        let Some(q) = equivalent(&find_emms(&m, f, &zero()).map_err(err)?) else {
            continue;
        };
        let rep = is_complete(&m, &q, &zero()).map_err(err)?;
        let eset = find_emms(&m, e, &zero()).map_err(err)?;
        let unique = eset.nodes.iter().all(|n| n.status == EmmStatus::Unique);
        ensure(rep.spanning == unique, || {
            format!("seed {seed}: rank {} vs unique {unique}", rep.spanning)
        })?;
        let sensitive = sensitivity_report(&m, f, &zero()).map_err(err)?.sensitive();
        if rep.complete && sensitive {
            complete_sensitive += 1;
            let g = compute_gop(&m, e, &zero()).map_err(err)?;
            let claim = random::random_claim(&mut rng, &m);
            let r = replicate(&claim, &m, &q, &zero()).map_err(err)?;
            for t in 0..=m.horizon() {
                let rw =
                    real_world_value(&claim, &m, &g.wealth.values, f, t, &zero()).map_err(err)?;
                ensure(r.values.values[t] == rw, || {
                    format!("seed {seed}: replication differs at t={t}")
                })?;
            }
        }
    }
    ensure(complete_sensitive > 0, || {
        "no complete sensitive instance".into()
    })
}

fn criterion_5() -> Check {
    let mut positives = 0;
    for seed in 0..300u64 {
        let mut rng = random::rng(30_000 + seed);
        let m = enlargement(&mut rng, seed);
        let (e, f, p) = (m.evolution(), m.ambient(), m.probs());
        let rep = sensitivity_report(&m, f, &zero()).map_err(err)?;
        ensure(rep.forward == rep.reverse, || {
            format!("seed {seed}: forward and reverse disagree")
        })?;
        if rep.forward {
            positives += 1;
            ensure(rep.sigma_identity, || {
                format!("seed {seed}: σ-identity fails")
            })?;
            for _ in 0..3 {
                let x = random::random_claim(&mut rng, &m);
                let mart: Vec<Vec<Rational>> = (0..=e.horizon())
                    .map(|t| conditional_expectation(p, &x, e.at(t)))
                    .collect();
                let kind = classify_process(&mart, f, p, &zero()).map_err(err)?.kind;
                ensure(kind == ProcessKind::Martingale, || {
                    format!("seed {seed}: not an F-martingale")
                })?;
            }
        }
    }
    ensure(positives > 0, || "no sensitive instance".into())
}

fn criterion_6() -> Check {
    for seed in 0..100u64 {
        let mut rng = random::rng(40_000 + seed);
        let base = random::random_binomial(&mut rng, 3);
        let kind = if seed.is_multiple_of(2) {
            SignalKind::Independent
        } else {
            SignalKind::Adapted
        };
        let (m, _) = random::enlarge_market(&mut rng, &base, kind);
        let f = m.ambient();
        let g = compute_gop(&m, m.evolution(), &zero()).map_err(err)?;
        let h = random::random_strategy(&mut rng, &m, f);
        let h = normalize(&h, &m, &zero()).map_err(err)?.strategy;
        let v = value_process(&h, &m, &zero()).map_err(err)?;
        let q = benchmark(&v.values, &g.wealth.values);
        let mut choices: Vec<Vec<Partition>> = vec![
            f.partitions().to_vec(),
            vec![Partition::trivial(m.num_states()); m.horizon() + 1],
        ];
        for _ in 0..3 {
            choices.push(
                (0..=m.horizon())
                    .map(|t| random::random_coarsening(&mut rng, f.at(t)))
                    .collect(),
            );
        }
        for parts in &choices {
            for s in growth_statistics(&q, m.probs(), parts) {
                ensure(s.excess <= zero() && s.log_nonpositive, || {
                    format!(
                        "seed {seed}: t={} excess {} log {}",
                        s.t, s.excess, s.log_growth
                    )
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    for name in FIXTURES {
        let l = fixture(name);
        let verdicts = |m: &Market<Rational>| -> std::result::Result<_, String> {
            let f = m.ambient();
            let set = find_emms(m, f, &zero()).map_err(err)?;
            let complete = match equivalent(&set) {
                Some(q) => Some(is_complete(m, &q, &zero()).map_err(err)?.complete),
                None => None,
            };
            let efficient = efficiency_check(m, f, &zero()).map_err(err)?.efficient;
            let holdings = compute_gop(m, f, &zero()).ok().map(|g| g.strategy);
            Ok((set.has_equivalent(), complete, efficient, holdings))
        };
        let base = verdicts(&l.market)?;
        for b in 0..l.market.num_assets() {
            let other = verdicts(&l.market.with_numeraire(b).map_err(err)?)?;
            ensure(other == base, || {
                format!("{name}: numeraire {b} changes a verdict")
            })?;
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    for name in FIXTURES {
        let l = fixture(name);
        let m = &l.market;
        let (e, f) = (m.evolution(), m.ambient());
        let (Some(qe), Some(qf)) = (
            equivalent(&find_emms(m, e, &zero()).map_err(err)?),
            equivalent(&find_emms(m, f, &zero()).map_err(err)?),
        ) else {
            continue;
        };
        let sdf = sdf_compatibility(m, f, &qe, &qf, &zero()).map_err(err)?;
        ensure(sdf.downward, || {
            format!("{name}: downward compatibility fails")
        })?;
        let sensitive = sensitivity_report(m, f, &zero()).map_err(err)?.sensitive();
        if sensitive {
            ensure(sdf.upward, || format!("{name}: upward compatibility fails"))?;
        }
        if name == "insider" {
            ensure(!sensitive, || "insider reported sensitive".into())?;
            ensure(!sdf.upward && sdf.upward_witness.is_some(), || {
                "insider upward compatibility has no witness".into()
            })?;
        }
    }
    Ok(())
}

fn grid_search(p: &[f64], f: &[f64]) -> f64 {
    let lo = f
        .iter()
        .filter(|x| **x > 1.0)
        .map(|x| -1.0 / (x - 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = f
        .iter()
        .filter(|x| **x < 1.0)
        .map(|x| 1.0 / (1.0 - x))
        .fold(f64::INFINITY, f64::min);
    let objective = |pi: f64| -> f64 {
        p.iter()
            .zip(f)
            .map(|(pc, fc)| pc * (1.0 + pi * (fc - 1.0)).ln())
            .sum()
    };
    let steps = ((hi - lo) / 1e-4) as i64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 1..steps {
        let pi = lo + k as f64 * 1e-4;
        let v = objective(pi);
        if v > best.0 {
            best = (v, pi);
        }
    }
    best.1
}

fn criterion_9() -> Check {
    for seed in 0..50u64 {
        let mut rng = random::rng(50_000 + seed);
        let m = random::random_one_period(&mut rng);
        let g = compute_gop(&m, m.evolution(), &zero()).map_err(err)?;
        let node = &g.nodes[0];
        let p: Vec<f64> = node.probs.iter().map(Scalar::to_f64).collect();
        let f: Vec<f64> = node
            .children
            .iter()
            .map(|&c| {
                let w = m.evolution().at(1).block(c)[0];
                m.price(1, 1, w).to_f64() / m.price(1, 0, w).to_f64()
            })
            .collect();
        let best = grid_search(&p, &f);
        let got = node.fractions[1].to_f64();
        ensure((got - best).abs() < 1e-3, || {
            format!("seed {seed}: solver {got}, grid {best}")
        })?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("canonical binomial oracles", criterion_1),
        ("martingale hypothesis on complete markets", criterion_2),
        ("no-arbitrage hierarchy collapse", criterion_3),
        ("completeness equivalence and replication", criterion_4),
        ("immersion test equivalences", criterion_5),
        ("growth statistics nonpositive", criterion_6),
        ("numeraire invariance on fixtures", criterion_7),
        ("discount factor compatibility", criterion_8),
        ("growth-optimal fraction against grid search", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match check() {
            Ok(()) => println!(
                "criterion {} ({name}): PASS [{:.1}s]",
                i + 1,
                t.elapsed().as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
