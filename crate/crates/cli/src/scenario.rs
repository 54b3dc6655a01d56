//! JSON scenario files: states, price grids, signals and claims.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::de::{self, Deserializer};
use serde::Deserialize;

use rwval_core::market::Market;
use rwval_core::probspace::FiniteProbSpace;
use rwval_core::sensitivity::{enlarge, Signal};
use rwval_core::{parse_rational, Rational, Scalar};

use crate::claim::{parse_claim, Expr};
use crate::error::{CliError, Result};

pub const VERSION: u32 = 1;

/// An exact number read from a JSON string (`"1/3"`, `"0.25"`) or number.
#[derive(Debug, Clone, PartialEq)]
pub struct Num(pub Rational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(serde_json::Number),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Number(n) => n.to_string(),
        };
        parse_rational(&text).map(Num).map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub id: String,
    pub prob: Num,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetSpec {
    pub name: String,
    /// `time × state` nominal prices.
    pub prices: Vec<Vec<Num>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub name: String,
    pub reveal_time: usize,
    /// `time × state` labels, or a single row for a constant signal.
    pub values: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSpec {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub mode: Mode,
    pub states: Vec<StateSpec>,
    pub times: usize,
    pub assets: Vec<AssetSpec>,
    pub numeraire: String,
    #[serde(default)]
    pub signals: Vec<SignalSpec>,
    #[serde(default)]
    pub claims: Vec<ClaimSpec>,
}

/// A scenario turned into core objects in arithmetic `S`.
#[derive(Debug, Clone)]
pub struct Loaded<S> {
    /// Ambient filtration is the price filtration enlarged by the signals.
    pub market: Market<S>,
    pub signals: Vec<Signal>,
    /// Nominal terminal payoffs per state.
    pub claims: Vec<(String, Vec<S>)>,
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(CliError::Validation(msg))
}

impl Scenario {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != VERSION {
            return invalid(format!("unsupported version {}", self.version));
        }
        let n = self.states.len();
        if n == 0 {
            return invalid("states: at least one state is required".into());
        }
        let mut seen = HashSet::new();
        for (w, s) in self.states.iter().enumerate() {
            if !seen.insert(&s.id) {
                return invalid(format!("states[{w}]: duplicate id {:?}", s.id));
            }
            if s.prob.0 <= Rational::from_int(0) {
                return invalid(format!(
                    "states[{w}]: probability {} is not positive",
                    s.prob.0
                ));
            }
        }
        let total = self
            .states
            .iter()
            .fold(Rational::from_int(0), |acc, s| acc + s.prob.0.clone());
        let off = (total.clone() - Rational::from_int(1)).to_f64().abs();
        let ok = match self.mode {
            Mode::Rational => total == Rational::from_int(1),
            Mode::Float => off <= 1e-9,
        };
        if !ok {
            return invalid(format!("states: probabilities sum to {total}, not 1"));
        }
        if self.times == 0 {
            return invalid("times: at least one period is required".into());
        }
        if self.assets.is_empty() {
            return invalid("assets: at least one asset is required".into());
        }
        let mut names = HashSet::new();
        for (i, a) in self.assets.iter().enumerate() {
            if !names.insert(&a.name) {
                return invalid(format!("assets[{i}]: duplicate name {:?}", a.name));
            }
            if a.prices.len() != self.times + 1 {
                return invalid(format!(
                    "assets[{i}] ({}): {} price rows, expected times + 1 = {}",
                    a.name,
                    a.prices.len(),
                    self.times + 1
                ));
            }
            for (t, row) in a.prices.iter().enumerate() {
                if row.len() != n {
                    return invalid(format!(
                        "assets[{i}] ({}): row {t} has {} prices, expected {n}",
                        a.name,
                        row.len()
                    ));
                }
                if let Some(w) = row.iter().position(|x| x.0 <= Rational::from_int(0)) {
                    return invalid(format!(
                        "assets[{i}] ({}): nonpositive price {} at time {t}, state {:?}",
                        a.name, row[w].0, self.states[w].id
                    ));
                }
            }
        }
        if !names.contains(&self.numeraire) {
            return invalid(format!("numeraire: unknown asset {:?}", self.numeraire));
        }
        for (k, s) in self.signals.iter().enumerate() {
            if s.reveal_time > self.times {
                return invalid(format!(
                    "signals[{k}] ({}): reveal_time {} exceeds times {}",
                    s.name, s.reveal_time, self.times
                ));
            }
            if s.values.len() != 1 && s.values.len() != self.times + 1 {
                return invalid(format!(
                    "signals[{k}] ({}): expected 1 or times + 1 rows, got {}",
                    s.name,
                    s.values.len()
                ));
            }
            if let Some(t) = s.values.iter().position(|r| r.len() != n) {
                return invalid(format!(
                    "signals[{k}] ({}): row {t} has {} labels, expected {n}",
                    s.name,
                    s.values[t].len()
                ));
            }
        }
        let mut claim_names = HashSet::new();
        for c in &self.claims {
            if !claim_names.insert(&c.name) {
                return invalid(format!("claims: duplicate name {:?}", c.name));
            }
            self.claim_payoff(c)?;
        }
        Ok(())
    }

    pub fn asset(&self, name: &str) -> Option<usize> {
        self.assets.iter().position(|a| a.name == name)
    }

    /// Nominal terminal payoff of a claim per state; negative payoffs are rejected.
    pub fn claim_payoff(&self, claim: &ClaimSpec) -> Result<Vec<Rational>> {
        let err = |message: String| CliError::Claim {
            name: claim.name.clone(),
            message,
        };
        let expr: Expr = parse_claim(&claim.expr).map_err(err)?;
        (0..self.num_states())
            .map(|w| {
                let lookup = |name: &str| {
                    self.asset(name)
                        .map(|i| self.assets[i].prices[self.times][w].0.clone())
                };
                let v = expr.eval(&lookup).map_err(err)?;
                if v < Rational::from_int(0) {
                    return Err(err(format!(
                        "negative payoff {v} in state {:?}",
                        self.states[w].id
                    )));
                }
                Ok(v)
            })
            .collect()
    }

    /// Builds the market (prices rescaled to start at 1), signals and claims.
    pub fn load<S: Scalar>(&self, numeraire: Option<&str>) -> Result<Loaded<S>> {
        let name = numeraire.unwrap_or(&self.numeraire);
        let num = self
            .asset(name)
            .ok_or_else(|| CliError::UnknownAsset(name.to_string()))?;
        let conv = |x: &Num| S::from_rational(&x.0);
        let space = FiniteProbSpace::new(
            self.states.iter().map(|s| s.id.clone()).collect(),
            self.states.iter().map(|s| conv(&s.prob)).collect(),
        )?;
        let grid = (0..=self.times)
            .map(|t| {
                self.assets
                    .iter()
                    .map(|a| a.prices[t].iter().map(conv).collect())
                    .collect()
            })
            .collect();
        let names = self.assets.iter().map(|a| a.name.clone()).collect();
        let market = Market::new(space, names, grid, num)?;
        let signals: Vec<Signal> = self
            .signals
            .iter()
            .map(|s| Signal {
                name: s.name.clone(),
                reveal_time: s.reveal_time,
                values: s.values.clone(),
            })
            .collect();
        let ambient = enlarge(market.evolution(), &signals)?;
        let market = market.with_ambient(ambient)?;
        let claims = self
            .claims
            .iter()
            .map(|c| {
                let payoff = self.claim_payoff(c)?;
                Ok((
                    c.name.clone(),
                    payoff.iter().map(S::from_rational).collect(),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(Loaded {
            market,
            signals,
            claims,
        })
    }

    /// Canonical text: fixed key order, reduced rationals, one grid row per line.
    pub fn emit(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("string encodes");
        let num = |x: &Num| q(&x.0.to_string());
        let row = |r: Vec<String>| format!("[{}]", r.join(", "));
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"version\": {},", self.version);
        let _ = writeln!(out, "  \"mode\": {},", q(self.mode.label()));
        let _ = writeln!(out, "  \"times\": {},", self.times);
        let _ = writeln!(out, "  \"numeraire\": {},", q(&self.numeraire));
        out.push_str("  \"states\": [\n");
        let states: Vec<String> = self
            .states
            .iter()
            .map(|s| format!("    {{\"id\": {}, \"prob\": {}}}", q(&s.id), num(&s.prob)))
            .collect();
        out.push_str(&states.join(",\n"));
        out.push_str("\n  ],\n  \"assets\": [\n");
        let assets: Vec<String> = self
            .assets
            .iter()
            .map(|a| {
                let rows: Vec<String> = a
                    .prices
                    .iter()
                    .map(|r| format!("        {}", row(r.iter().map(num).collect())))
                    .collect();
                format!(
                    "    {{\n      \"name\": {},\n      \"prices\": [\n{}\n      ]\n    }}",
                    q(&a.name),
                    rows.join(",\n")
                )
            })
            .collect();
        out.push_str(&assets.join(",\n"));
        out.push_str("\n  ],\n  \"signals\": [");
        let signals: Vec<String> = self
            .signals
            .iter()
            .map(|s| {
                let rows: Vec<String> = s
                    .values
                    .iter()
                    .map(|r| format!("        {}", row(r.iter().map(|x| q(x)).collect())))
                    .collect();
                format!(
                    "    {{\n      \"name\": {},\n      \"reveal_time\": {},\n      \"values\": [\n{}\n      ]\n    }}",
                    q(&s.name),
                    s.reveal_time,
                    rows.join(",\n")
                )
            })
            .collect();
        if !signals.is_empty() {
            let _ = write!(out, "\n{}\n  ", signals.join(",\n"));
        }
        out.push_str("],\n  \"claims\": [");
        let claims: Vec<String> = self
            .claims
            .iter()
            .map(|c| format!("    {{\"name\": {}, \"expr\": {}}}", q(&c.name), q(&c.expr)))
            .collect();
        if !claims.is_empty() {
            let _ = write!(out, "\n{}\n  ", claims.join(",\n"));
        }
        out.push_str("]\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rwval_core::rat;

    const MINIMAL: &str = r#"{
        "version": 1, "mode": "rational", "times": 1, "numeraire": "cash",
        "states": [{"id": "only", "prob": 1}],
        "assets": [{"name": "cash", "prices": [["1"], ["1"]]}]
    }"#;

    #[test]
    fn minimal_is_degenerate_market() {
        let s = parse_scenario(MINIMAL).unwrap();
        let l = s.load::<Rational>(None).unwrap();
        assert_eq!(l.market.num_states(), 1);
        assert_eq!(l.market.num_assets(), 1);
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let s = parse_scenario(MINIMAL).unwrap();
        let text = s.emit();
        let again = parse_scenario(&text).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.emit(), text);
    }

    #[test]
    fn probability_sum_is_named() {
        let bad = MINIMAL.replace("\"prob\": 1", "\"prob\": \"0.9\"");
        let err = parse_scenario(&bad).unwrap_err().to_string();
        assert!(err.contains("9/10"), "{err}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_scenario("{\n  \"version\": 1,\n  oops }").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        let bad = MINIMAL.replace("[\"1\"], [\"1\"]", "[\"1\"], [\"x\"]");
        match parse_scenario(&bad).unwrap_err() {
            CliError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn validation_errors() {
        let ragged = MINIMAL.replace("[[\"1\"], [\"1\"]]", "[[\"1\"]]");
        assert!(matches!(
            parse_scenario(&ragged),
            Err(CliError::Validation(_))
        ));
        let neg = MINIMAL.replace("[\"1\"], [\"1\"]", "[\"1\"], [\"-1\"]");
        assert!(matches!(parse_scenario(&neg), Err(CliError::Validation(_))));
    }

    #[test]
    fn decimal_and_fraction_inputs_agree() {
        let a = MINIMAL.replace("[\"1\"], [\"1\"]", "[\"1\"], [\"0.5\"]");
        let b = MINIMAL.replace("[\"1\"], [\"1\"]", "[\"1\"], [\"1/2\"]");
        let (a, b) = (parse_scenario(&a).unwrap(), parse_scenario(&b).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.assets[0].prices[1][0].0, rat(1, 2));
    }
}
