//! Command implementations over a loaded scenario.

use serde_json::{json, Value};

use rwval_core::gop::{
    compute_gop, growth_statistics, martingale_hypothesis_check, real_world_value, replicate,
    risk_neutral_value, verify_numeraire_portfolio, GopResult,
};
use rwval_core::market::{nominal, Strategy};
use rwval_core::noarb::{
    find_arbitrage, find_dominating, find_emms, is_complete, rnp_from_measure, EmmSet, Measure,
};
use rwval_core::probspace::{Filtration, Partition};
use rwval_core::sensitivity::{efficiency_check, sdf_compatibility, SensitivityReport};
use rwval_core::{parse_rational, Error, Rational, Scalar};

use crate::error::{CliError, Result};
use crate::report::{
    block_ids, block_label, node_json, node_label, num, nums, per_state, per_state_json, yes_no,
    Output, Report, COLLAPSE_NOTE,
};
use crate::scenario::{Loaded, Mode, Scenario};

/// Which partitions condition the growth statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// The full ambient information `F_t`.
    Ambient,
    /// Price history only, `E_t`.
    Prices,
    /// No information.
    Trivial,
}

#[derive(Debug, Clone)]
pub enum Command {
    Check,
    Emm,
    Gop,
    Price {
        claim: String,
        t: Option<usize>,
    },
    Sensitivity,
    Hypothesis {
        strategy: Option<String>,
        conditioning: Conditioning,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Comparison tolerance; zero in rational mode and `1e-9` in float mode
    /// when absent.
    pub tol: Option<String>,
    pub seed: Option<u64>,
    pub numeraire: Option<String>,
}

pub fn run(command: &Command, scenario: &Scenario, opts: &Options) -> Result<Output> {
    match scenario.mode {
        Mode::Rational => run_in::<Rational>(command, scenario, opts),
        Mode::Float => run_in::<f64>(command, scenario, opts),
    }
}

fn run_in<S: Scalar>(command: &Command, scenario: &Scenario, opts: &Options) -> Result<Output> {
    let tol = match &opts.tol {
        Some(t) => S::from_rational(&parse_rational(t)?),
        None => S::default_tol(),
    };
    let loaded = scenario.load::<S>(opts.numeraire.as_deref())?;
    let name = match command {
        Command::Check => "check",
        Command::Emm => "emm",
        Command::Gop => "gop",
        Command::Price { .. } => "price",
        Command::Sensitivity => "sensitivity",
        Command::Hypothesis { .. } => "hypothesis",
    };
    let mut r = Report::new(name);
    header(&mut r, scenario, &loaded, opts);
    let negative = match command {
        Command::Check => check(&mut r, &loaded, &tol)?,
        Command::Emm => emm(&mut r, &loaded, &tol)?,
        Command::Gop => gop(&mut r, &loaded, &tol)?,
        Command::Price { claim, t } => price(&mut r, &loaded, claim, *t, &tol)?,
        Command::Sensitivity => sensitivity(&mut r, &loaded, &tol)?,
        Command::Hypothesis {
            strategy,
            conditioning,
        } => hypothesis(&mut r, &loaded, strategy.as_deref(), *conditioning, &tol)?,
    };
    Ok(r.finish(negative))
}

fn header<S: Scalar>(r: &mut Report, scenario: &Scenario, l: &Loaded<S>, opts: &Options) {
    let m = &l.market;
    let numeraire = &m.assets()[m.numeraire()];
    r.kv(
        "scenario",
        format!(
            "{} states, {} assets, horizon T={}, numeraire {}, {} arithmetic",
            m.num_states(),
            m.num_assets(),
            m.horizon(),
            numeraire,
            scenario.mode.label()
        ),
    );
    let signals: Vec<&str> = l.signals.iter().map(|s| s.name.as_str()).collect();
    r.kv(
        "information",
        if signals.is_empty() {
            "price history only".to_string()
        } else {
            format!("price history + signals {}", signals.join(", "))
        },
    );
    let scales: Vec<String> = m
        .assets()
        .iter()
        .zip(m.scales())
        .map(|(a, s)| format!("{a}={s}"))
        .collect();
    r.kv("initial prices", scales.join(" "));
    r.set("version", json!(scenario.version));
    r.set("mode", json!(scenario.mode.label()));
    r.set("numeraire", json!(numeraire));
    r.set("states", json!(m.space().ids()));
    r.set("assets", json!(m.assets()));
    r.set("horizon", json!(m.horizon()));
    r.set("signals", json!(signals));
    r.set(
        "initial_prices",
        Value::Object(
            m.assets()
                .iter()
                .zip(m.scales())
                .map(|(a, s)| (a.clone(), num(s)))
                .collect(),
        ),
    );
    if let Some(seed) = opts.seed {
        r.set("seed", json!(seed));
    }
}

fn equivalent<S: Scalar>(set: &EmmSet<S>) -> Option<&Measure<S>> {
    set.measure
        .as_ref()
        .filter(|q| set.has_equivalent() && q.equivalent)
}

fn emm_summary<S: Scalar>(set: &EmmSet<S>, f: &Filtration, ids: &[String]) -> (String, Value) {
    let mut text = set.status.label().to_string();
    let mut witness = Value::Null;
    if let Some(w) = set.witness() {
        text.push_str(&format!(
            " (worst node {}: {})",
            node_label(f, ids, w.node),
            w.status.label()
        ));
        witness = json!({ "node": node_json(f, ids, w.node), "status": w.status.label() });
    }
    let value = json!({
        "status": set.status.label(),
        "equivalent": set.has_equivalent(),
        "witness": witness,
        "measure": equivalent(set).map(|q| per_state_json(ids, &q.weights)),
    });
    (text, value)
}

fn sensitivity_lines<S: Scalar>(
    r: &mut Report,
    rep: &SensitivityReport<S>,
    e: &Filtration,
    f: &Filtration,
    ids: &[String],
) -> Value {
    let mut text = yes_no(rep.sensitive()).to_string();
    let mut witness = Value::Null;
    if let Some(w) = &rep.forward_witness {
        let fb = f.at(w.t).block(w.f_block);
        let eb = e.terminal().block(w.e_block);
        text = format!(
            "no (t={}, information block {}: P(price path {} | information) = {} but P(price path | prices) = {})",
            w.t,
            block_label(ids, fb),
            block_label(ids, eb),
            w.given_f,
            w.given_e
        );
        witness = json!({
            "t": w.t,
            "information_block": block_ids(ids, fb),
            "price_path": block_ids(ids, eb),
            "given_information": num(&w.given_f),
            "given_prices": num(&w.given_e),
        });
    }
    r.kv("sensitive", text);
    let mut reverse_witness = Value::Null;
    if let Some(w) = &rep.reverse_witness {
        let fb = f.at(w.t).block(w.f_block);
        let eb = e.terminal().block(w.e_block);
        r.kv(
            "  reverse test",
            format!(
                "fails at t={}: P(information {} | price path {}) = {} but given current prices = {}",
                w.t,
                block_label(ids, fb),
                block_label(ids, eb),
                w.given_terminal,
                w.given_current
            ),
        );
        reverse_witness = json!({
            "t": w.t,
            "information_block": block_ids(ids, fb),
            "price_path": block_ids(ids, eb),
            "given_path": num(&w.given_terminal),
            "given_current": num(&w.given_current),
        });
    } else {
        r.kv("  reverse test", "passes");
    }
    match rep.sigma_failure {
        None => r.kv("  E_t = F_t ∩ E_T", "holds (necessary condition)"),
        Some(t) => r.kv("  E_t = F_t ∩ E_T", format!("fails at t={t}")),
    }
    json!({
        "sensitive": rep.sensitive(),
        "forward": rep.forward,
        "reverse": rep.reverse,
        "witness": witness,
        "reverse_witness": reverse_witness,
        "sigma_identity": rep.sigma_identity,
        "sigma_failure": rep.sigma_failure,
    })
}

fn check<S: Scalar>(r: &mut Report, l: &Loaded<S>, tol: &S) -> Result<bool> {
    let m = &l.market;
    let (e, f) = (m.evolution(), m.ambient());
    let ids = m.space().ids();

    let arb = find_arbitrage(m, f, tol)?;
    match &arb {
        None => r.kv("arbitrage", "none"),
        Some(a) => r.kv(
            "arbitrage",
            format!("found, terminal gains {}", per_state(ids, &a.gains)),
        ),
    }
    r.set(
        "arbitrage",
        json!({
            "found": arb.is_some(),
            "gains": arb.as_ref().map(|a| per_state_json(ids, &a.gains)),
        }),
    );

    let mut dominated = Vec::new();
    for i in 0..m.num_assets() {
        if let Some(d) = find_dominating(m, i, f, tol)? {
            r.kv(
                "dominated",
                format!(
                    "{}: a strategy beats it by {}",
                    m.assets()[i],
                    per_state(ids, &d.excess)
                ),
            );
            dominated
                .push(json!({ "asset": m.assets()[i], "excess": per_state_json(ids, &d.excess) }));
        }
    }
    if dominated.is_empty() {
        r.kv("dominated assets", "none");
    }
    r.set("dominated", Value::Array(dominated));

    let emm_f = find_emms(m, f, tol)?;
    let (text, value) = emm_summary(&emm_f, f, ids);
    r.kv("martingale measures (information)", text);
    if let Some(q) = equivalent(&emm_f) {
        r.kv("  q", per_state(ids, &q.weights));
    }
    r.set("emm", value);
    let emm_e = find_emms(m, e, tol)?;
    let (text, value) = emm_summary(&emm_e, e, ids);
    r.kv("martingale measures (prices)", text);
    r.set("emm_prices", value);

    match equivalent(&emm_f) {
        Some(q) => {
            let rep = is_complete(m, q, tol)?;
            let mut text = yes_no(rep.complete).to_string();
            if let Some((node, rank, children)) = rep.rank_failure {
                text.push_str(&format!(
                    " (node {} has rank {rank} for {children} outcomes)",
                    node_label(e, ids, node)
                ));
            } else if !rep.immersed {
                text.push_str(" (replication values depend on information beyond prices)");
            }
            r.kv("complete", text);
            r.set(
                "complete",
                json!({
                    "complete": rep.complete,
                    "spanning": rep.spanning,
                    "immersed": rep.immersed,
                    "rank_failure": rep.rank_failure.map(|(node, rank, children)| json!({
                        "node": node_json(e, ids, node), "rank": rank, "children": children,
                    })),
                }),
            );
        }
        None => {
            r.kv("complete", "n/a (no equivalent martingale measure)");
            r.set("complete", Value::Null);
        }
    }

    let eff = efficiency_check(m, f, tol)?;
    let sens = sensitivity_lines(r, &eff.sensitivity, e, f, ids);
    r.set("sensitivity", sens);
    r.kv("efficient", yes_no(eff.efficient));
    r.set("efficient", json!(eff.efficient));
    r.kv("note", COLLAPSE_NOTE);
    r.set("note", json!(COLLAPSE_NOTE));
    Ok(!eff.efficient)
}

fn emm<S: Scalar>(r: &mut Report, l: &Loaded<S>, tol: &S) -> Result<bool> {
    let m = &l.market;
    let f = m.ambient();
    let ids = m.space().ids();
    let set = find_emms(m, f, tol)?;
    let (text, mut value) = emm_summary(&set, f, ids);
    r.kv("martingale measures", text);
    let mut nodes = Vec::new();
    for node in &set.nodes {
        let children: Vec<String> = node
            .children
            .iter()
            .map(|&c| block_label(ids, f.at(node.node.t + 1).block(c)))
            .collect();
        let mut line = format!(
            "  node {}: {}, rank {} for {} outcomes",
            node_label(f, ids, node.node),
            node.status.label(),
            node.rank,
            node.children.len()
        );
        if let Some(w) = &node.weights {
            let pairs: Vec<String> = children
                .iter()
                .zip(w)
                .map(|(c, x)| format!("{c}={x}"))
                .collect();
            line.push_str(&format!(", weights {}", pairs.join(" ")));
        }
        if node.vertices.len() > 1 {
            line.push_str(&format!(" (average of {} vertices)", node.vertices.len()));
        }
        r.line(line);
        nodes.push(json!({
            "node": node_json(f, ids, node.node),
            "status": node.status.label(),
            "rank": node.rank,
            "children": node.children.iter().map(|&c| block_ids(ids, f.at(node.node.t + 1).block(c))).collect::<Vec<_>>(),
            "weights": node.weights.as_ref().map(|w| nums(w)),
            "vertices": node.vertices.iter().map(|v| nums(v)).collect::<Vec<_>>(),
        }));
    }
    value["nodes"] = Value::Array(nodes);
    if let Some(q) = equivalent(&set) {
        r.kv("measure", per_state(ids, &q.weights));
        let rnp = rnp_from_measure(q, f, m.probs())?;
        r.kv("density dQ/dP", per_state(ids, &rnp.terminal));
        let levels: Vec<Value> = rnp
            .levels
            .iter()
            .map(|row| per_state_json(ids, row))
            .collect();
        value["density"] = json!({
            "terminal": per_state_json(ids, &rnp.terminal),
            "levels": levels,
            "initial_scale": nums(&rnp.scale),
        });
    }
    r.set("emm", value);
    r.kv("note", COLLAPSE_NOTE);
    r.set("note", json!(COLLAPSE_NOTE));
    Ok(!set.has_equivalent())
}

/// GOP for `filtration`, or the reason it does not exist.
fn gop_or_reason<S: Scalar>(
    l: &Loaded<S>,
    filtration: &Filtration,
    tol: &S,
) -> Result<std::result::Result<GopResult<S>, String>> {
    match compute_gop(&l.market, filtration, tol) {
        Ok(g) => Ok(Ok(g)),
        Err(err @ Error::ArbitrageUnboundedGrowth { .. }) => Ok(Err(err.to_string())),
        Err(err) => Err(err.into()),
    }
}

fn gop<S: Scalar>(r: &mut Report, l: &Loaded<S>, tol: &S) -> Result<bool> {
    let m = &l.market;
    let f = m.ambient();
    let ids = m.space().ids();
    let g = match gop_or_reason(l, f, tol)? {
        Ok(g) => g,
        Err(reason) => {
            r.kv("growth-optimal portfolio", format!("none ({reason})"));
            r.set("gop", json!({ "exists": false, "reason": reason }));
            return Ok(true);
        }
    };
    r.kv(
        "growth-optimal portfolio",
        if g.certified() {
            "certified"
        } else {
            "approximate"
        },
    );
    let mut nodes = Vec::new();
    for node in &g.nodes {
        let fractions: Vec<String> = m
            .assets()
            .iter()
            .zip(&node.fractions)
            .map(|(a, x)| format!("{a}={x}"))
            .collect();
        let mut flags = Vec::new();
        if node.complete {
            flags.push("closed form".to_string());
        }
        if node.redundant {
            flags.push("redundant assets".to_string());
        }
        if !node.certified {
            flags.push(format!("uncertified, residual {:.3e}", node.residual));
        }
        r.line(format!(
            "  node {}: fractions {}, growth {}{}",
            node_label(f, ids, node.node),
            fractions.join(" "),
            node.growth
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            if flags.is_empty() {
                String::new()
            } else {
                format!(" [{}]", flags.join(", "))
            }
        ));
        nodes.push(json!({
            "node": node_json(f, ids, node.node),
            "fractions": nums(&node.fractions),
            "growth": nums(&node.growth),
            "probs": nums(&node.probs),
            "complete": node.complete,
            "redundant": node.redundant,
            "certified": node.certified,
            "residual": node.residual,
            "expected_log_growth": node.expected_log_growth,
        }));
    }
    let wealth = nominal(&g.wealth.values, m);
    for (t, row) in wealth.iter().enumerate() {
        r.kv(&format!("  wealth t={t}"), per_state(ids, row));
    }
    let np = verify_numeraire_portfolio(&g.wealth.values, m, f, &[], tol)?;
    let kinds: Vec<String> = m
        .assets()
        .iter()
        .zip(&np.assets)
        .map(|(a, c)| format!("{a}={}", c.kind.label()))
        .collect();
    r.kv("benchmarked assets", kinds.join(" "));
    r.kv("numeraire portfolio", yes_no(np.is_numeraire_portfolio()));
    r.set(
        "gop",
        json!({
            "exists": true,
            "certified": g.certified(),
            "nodes": nodes,
            "wealth": wealth.iter().map(|row| per_state_json(ids, row)).collect::<Vec<_>>(),
            "benchmarked": m.assets().iter().zip(&np.assets).map(|(a, c)| (a.clone(), json!(c.kind.label()))).collect::<serde_json::Map<_, _>>(),
            "numeraire_portfolio": np.is_numeraire_portfolio(),
        }),
    );
    Ok(!np.is_numeraire_portfolio())
}

fn price<S: Scalar>(
    r: &mut Report,
    l: &Loaded<S>,
    claim: &str,
    t: Option<usize>,
    tol: &S,
) -> Result<bool> {
    let m = &l.market;
    let f = m.ambient();
    let ids = m.space().ids();
    let payoff = l
        .claims
        .iter()
        .find(|(n, _)| n == claim)
        .map(|(_, p)| p.clone())
        .ok_or_else(|| CliError::UnknownClaim(claim.to_string()))?;
    let t = t.unwrap_or(0);
    if t > m.horizon() {
        return Err(CliError::BadParams(format!(
            "--t {t} exceeds the horizon {}",
            m.horizon()
        )));
    }
    r.kv("claim", format!("{claim} at t={t}"));
    let to_nominal = |v: Vec<S>| -> Vec<S> {
        (0..m.num_states())
            .map(|w| v[w].clone() * m.price(t, m.numeraire(), w).clone())
            .collect()
    };
    let set = find_emms(m, f, tol)?;
    let q = equivalent(&set);
    let rn = q
        .map(|q| risk_neutral_value(&payoff, m, q, f, t, tol).map(to_nominal))
        .transpose()?;
    let rw = match gop_or_reason(l, f, tol)? {
        Ok(g) => Some(to_nominal(real_world_value(
            &payoff,
            m,
            &g.wealth.values,
            f,
            t,
            tol,
        )?)),
        Err(_) => None,
    };
    match q {
        Some(_) => r.kv("measure", set.status.label()),
        None => r.kv("measure", "none (no equivalent martingale measure)"),
    }
    let mut blocks = Vec::new();
    let mut all_equal = rn.is_some() && rw.is_some();
    for block in f.at(t).blocks() {
        let w = block[0];
        let a = rn.as_ref().map(|v| v[w].clone());
        let b = rw.as_ref().map(|v| v[w].clone());
        let equal = match (&a, &b) {
            (Some(x), Some(y)) => x.near(y, tol),
            _ => false,
        };
        all_equal &= equal;
        let show = |x: &Option<S>| x.as_ref().map_or("n/a".to_string(), |v| v.to_string());
        r.line(format!(
            "  {}: risk-neutral {}, real-world {}{}",
            block_label(ids, block),
            show(&a),
            show(&b),
            if equal { ", equal" } else { ", differ" }
        ));
        blocks.push(json!({
            "states": block_ids(ids, block),
            "risk_neutral": a.as_ref().map(num),
            "real_world": b.as_ref().map(num),
            "equal": equal,
        }));
    }
    let replicable = match q {
        Some(q) => match replicate(&payoff, m, q, tol) {
            Ok(rep) => Some(rep.matches_measure()),
            Err(Error::NotReplicable { .. }) => Some(false),
            Err(err) => return Err(err.into()),
        },
        None => None,
    };
    r.kv("replicable", replicable.map_or("n/a", yes_no));
    r.set(
        "price",
        json!({
            "claim": claim,
            "t": t,
            "measure": set.status.label(),
            "blocks": blocks,
            "equal": all_equal,
            "replicable": replicable,
        }),
    );
    Ok(!all_equal)
}

fn sensitivity<S: Scalar>(r: &mut Report, l: &Loaded<S>, tol: &S) -> Result<bool> {
    let m = &l.market;
    let (e, f) = (m.evolution(), m.ambient());
    let ids = m.space().ids();
    let eff = efficiency_check(m, f, tol)?;
    let sens = sensitivity_lines(r, &eff.sensitivity, e, f, ids);
    r.set("sensitivity", sens);
    r.kv("efficient", yes_no(eff.efficient));
    r.set("efficient", json!(eff.efficient));
    let q_e = find_emms(m, e, tol)?;
    let q_f = find_emms(m, f, tol)?;
    match (equivalent(&q_e), equivalent(&q_f)) {
        (Some(qe), Some(qf)) => {
            let sdf = sdf_compatibility(m, f, qe, qf, tol)?;
            let show = |ok: bool,
                        w: &Option<rwval_core::sensitivity::CompatibilityWitness<S>>,
                        g: &Filtration|
             -> (String, Value) {
                match w {
                    None => (yes_no(ok).to_string(), Value::Null),
                    Some(w) => (
                        format!(
                            "no ({} at {}: price {} but discount-factor value {})",
                            m.assets()[w.asset],
                            node_label(g, ids, w.node),
                            w.price,
                            w.value
                        ),
                        json!({
                            "asset": m.assets()[w.asset],
                            "node": node_json(g, ids, w.node),
                            "price": num(&w.price),
                            "value": num(&w.value),
                        }),
                    ),
                }
            };
            let (down, down_w) = show(sdf.downward, &sdf.downward_witness, e);
            let (up, up_w) = show(sdf.upward, &sdf.upward_witness, f);
            r.kv("information discount factor given prices", down);
            r.kv("price discount factor given information", up);
            r.set(
                "sdf",
                json!({
                    "downward": sdf.downward,
                    "downward_witness": down_w,
                    "upward": sdf.upward,
                    "upward_witness": up_w,
                }),
            );
        }
        _ => {
            r.kv("discount factors", "n/a (a martingale measure is missing)");
            r.set("sdf", Value::Null);
        }
    }
    Ok(!eff.sensitivity.sensitive())
}

fn hypothesis<S: Scalar>(
    r: &mut Report,
    l: &Loaded<S>,
    strategy: Option<&str>,
    conditioning: Conditioning,
    tol: &S,
) -> Result<bool> {
    let m = &l.market;
    let f = m.ambient();
    let ids = m.space().ids();
    let rep = martingale_hypothesis_check(m, tol)?;
    let Some(g) = &rep.gop else {
        let reason = rep.failure.clone().unwrap_or_default();
        r.kv("martingale hypothesis", format!("rejected ({reason})"));
        r.set("hypothesis", json!({ "verdict": false, "failure": reason }));
        return Ok(true);
    };
    r.kv(
        "martingale hypothesis",
        if rep.verdict { "holds" } else { "rejected" },
    );
    let kinds: Vec<String> = m
        .assets()
        .iter()
        .zip(&rep.kinds)
        .map(|(a, k)| format!("{a}={}", k.label()))
        .collect();
    r.kv("benchmarked assets", kinds.join(" "));
    let mut witnesses = Vec::new();
    for w in &rep.witnesses {
        r.line(format!(
            "  witness {} at {}: level {}, conditional mean {}",
            m.assets()[w.asset],
            node_label(f, ids, w.node),
            w.level,
            w.conditional_mean
        ));
        witnesses.push(json!({
            "asset": m.assets()[w.asset],
            "node": node_json(f, ids, w.node),
            "level": num(&w.level),
            "conditional_mean": num(&w.conditional_mean),
        }));
    }
    r.kv("complete", rep.complete.map_or("n/a", yes_no));
    r.kv(
        "density = 1 / wealth",
        rep.density_identity.map_or("n/a", yes_no),
    );
    r.kv("state-price identity", yes_no(rep.state_price_identity));

    let assets: Vec<usize> = match strategy {
        Some(name) => vec![m
            .asset_index(name)
            .ok_or_else(|| CliError::UnknownAsset(name.to_string()))?],
        None => (0..m.num_assets()).collect(),
    };
    let parts: Vec<Partition> = match conditioning {
        Conditioning::Ambient => f.partitions().to_vec(),
        Conditioning::Prices => m.evolution().partitions().to_vec(),
        Conditioning::Trivial => vec![Partition::trivial(m.num_states()); m.horizon() + 1],
    };
    let label = match conditioning {
        Conditioning::Ambient => "information",
        Conditioning::Prices => "prices",
        Conditioning::Trivial => "trivial",
    };
    r.kv(
        "growth statistics",
        format!("buy-and-hold, conditioned on {label}"),
    );
    let mut stats_json = Vec::new();
    let mut all_nonpositive = true;
    for i in assets {
        let units: Vec<S> = (0..m.num_assets())
            .map(|k| if k == i { S::one() } else { S::zero() })
            .collect();
        let h = Strategy::buy_and_hold(&units, m.horizon(), m.num_states());
        let v = rwval_core::market::value_process(&h, m, tol)?;
        let q = rwval_core::market::benchmark(&v.values, &g.wealth.values);
        for s in growth_statistics(&q, m.probs(), &parts) {
            let ok = s.excess <= tol.clone() && s.log_nonpositive;
            all_nonpositive &= ok;
            let block = parts[s.t].block(s.block);
            r.line(format!(
                "  {} t={} {}: excess {}, log-growth {:.6}{}",
                m.assets()[i],
                s.t,
                block_label(ids, block),
                s.excess,
                s.log_growth,
                if ok { "" } else { " (positive)" }
            ));
            stats_json.push(json!({
                "asset": m.assets()[i],
                "t": s.t,
                "states": block_ids(ids, block),
                "excess": num(&s.excess),
                "log_growth": s.log_growth,
                "log_nonpositive": s.log_nonpositive,
                "log_exact": s.log_exact,
            }));
        }
    }
    r.set(
        "hypothesis",
        json!({
            "verdict": rep.verdict,
            "kinds": m.assets().iter().zip(&rep.kinds).map(|(a, k)| (a.clone(), json!(k.label()))).collect::<serde_json::Map<_, _>>(),
            "witnesses": witnesses,
            "complete": rep.complete,
            "density_identity": rep.density_identity,
            "state_price_identity": rep.state_price_identity,
            "conditioning": label,
            "statistics": stats_json,
            "statistics_nonpositive": all_nonpositive,
        }),
    );
    Ok(!rep.verdict)
}
