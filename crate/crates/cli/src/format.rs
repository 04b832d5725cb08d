//! JSON instance and assignment files.
//!
//! Numbers may be written as `"p/q"`, integer or decimal strings, or bare
//! JSON numbers; all of them are read exactly.

use std::collections::HashMap;

use fttc_core::market::{HousingMarket, MarketError, Matrix};
use fttc_core::rational::{format_rational, parse_rational, zeros, Rational};
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("unknown house {0:?}")]
    UnknownHouse(String),
    #[error("no preferences for agent {0:?}")]
    MissingPreferences(String),
    #[error("no row for agent {0:?}")]
    MissingRow(String),
    #[error("no entry for agent {agent:?}, house {house:?}")]
    MissingEntry { agent: String, house: String },
    #[error("entry for agent {agent:?}, house {house:?}: {reason}")]
    Literal {
        agent: String,
        house: String,
        reason: String,
    },
    #[error(transparent)]
    Market(#[from] MarketError),
}

impl FormatError {
    /// True when the file is well formed but does not fit the market.
    pub fn is_mismatch(&self) -> bool {
        matches!(
            self,
            FormatError::UnknownAgent(_)
                | FormatError::UnknownHouse(_)
                | FormatError::MissingRow(_)
                | FormatError::MissingEntry { .. }
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    agents: Vec<String>,
    houses: Vec<String>,
    preferences: HashMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    endowment: HashMap<String, HashMap<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentDoc {
    assignment: HashMap<String, HashMap<String, Value>>,
}

fn literal(agent: &str, house: &str, value: &Value) -> Result<Rational, FormatError> {
    let err = |reason: String| FormatError::Literal {
        agent: agent.to_string(),
        house: house.to_string(),
        reason,
    };
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(err(format!("expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| err(e.to_string()))
}

fn index_of(ids: &[String]) -> HashMap<&str, usize> {
    ids.iter().enumerate().map(|(k, id)| (id.as_str(), k)).collect()
}

fn house(houses: &HashMap<&str, usize>, id: &str) -> Result<usize, FormatError> {
    houses.get(id).copied().ok_or_else(|| FormatError::UnknownHouse(id.to_string()))
}

pub fn parse_market(text: &str) -> Result<HousingMarket, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let agents = index_of(&doc.agents);
    let houses = index_of(&doc.houses);
    for id in doc.preferences.keys().chain(doc.endowment.keys()) {
        if !agents.contains_key(id.as_str()) {
            return Err(FormatError::UnknownAgent(id.clone()));
        }
    }
    let mut preferences = Vec::with_capacity(doc.agents.len());
    let mut endowment: Matrix = vec![zeros(doc.houses.len()); doc.agents.len()];
    for (i, agent) in doc.agents.iter().enumerate() {
        let classes = doc
            .preferences
            .get(agent)
            .ok_or_else(|| FormatError::MissingPreferences(agent.clone()))?;
        let classes = classes
            .iter()
            .map(|class| class.iter().map(|h| house(&houses, h)).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        preferences.push(classes);
        if let Some(row) = doc.endowment.get(agent) {
            for (h, value) in row {
                endowment[i][house(&houses, h)?] = literal(agent, h, value)?;
            }
        }
    }
    Ok(HousingMarket::new(doc.agents, doc.houses, preferences, endowment)?)
}

/// Reads an assignment for `market`; every agent and every entry must be
/// present.
pub fn parse_assignment(market: &HousingMarket, text: &str) -> Result<Matrix, FormatError> {
    let doc: AssignmentDoc = serde_json::from_str(text)?;
    for id in doc.assignment.keys() {
        if market.agent_index(id).is_none() {
            return Err(FormatError::UnknownAgent(id.clone()));
        }
    }
    let mut rows = Vec::with_capacity(market.num_agents());
    for agent in market.agents() {
        let entries = doc
            .assignment
            .get(agent)
            .ok_or_else(|| FormatError::MissingRow(agent.clone()))?;
        for h in entries.keys() {
            if market.house_index(h).is_none() {
                return Err(FormatError::UnknownHouse(h.clone()));
            }
        }
        let row = market
            .houses()
            .iter()
            .map(|h| {
                let value = entries.get(h).ok_or_else(|| FormatError::MissingEntry {
                    agent: agent.clone(),
                    house: h.clone(),
                })?;
                literal(agent, h, value)
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn rational_json(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

/// `{agent: {house: "p/q", ...}, ...}` for the given agents and their rows.
pub fn rows_json(market: &HousingMarket, agents: &[usize], rows: &[Vec<Rational>]) -> Value {
    let mut out = Map::new();
    for (&i, row) in agents.iter().zip(rows) {
        out.insert(market.agents()[i].clone(), row_json(market, row));
    }
    Value::Object(out)
}

pub fn row_json(market: &HousingMarket, row: &[Rational]) -> Value {
    let mut out = Map::new();
    for (h, v) in market.houses().iter().zip(row) {
        out.insert(h.clone(), rational_json(v));
    }
    Value::Object(out)
}

pub fn assignment_json(market: &HousingMarket, rows: &[Vec<Rational>]) -> Value {
    let everyone: Vec<usize> = (0..market.num_agents()).collect();
    let mut doc = Map::new();
    doc.insert("assignment".into(), rows_json(market, &everyone, rows));
    Value::Object(doc)
}

pub fn classes_json(market: &HousingMarket, classes: &[Vec<usize>]) -> Value {
    classes
        .iter()
        .map(|c| c.iter().map(|&h| Value::String(market.houses()[h].clone())).collect::<Value>())
        .collect()
}

pub fn market_json(market: &HousingMarket) -> Value {
    let ids = |v: &[String]| Value::Array(v.iter().cloned().map(Value::String).collect());
    let mut preferences = Map::new();
    for (agent, pref) in market.agents().iter().zip(market.preferences()) {
        preferences.insert(agent.clone(), classes_json(market, pref.classes()));
    }
    let everyone: Vec<usize> = (0..market.num_agents()).collect();
    let mut doc = Map::new();
    doc.insert("agents".into(), ids(market.agents()));
    doc.insert("houses".into(), ids(market.houses()));
    doc.insert("preferences".into(), Value::Object(preferences));
    doc.insert("endowment".into(), rows_json(market, &everyone, market.endowment()));
    Value::Object(doc)
}

/// Pretty JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}
