//! Structured reports: witnesses, verdicts and FTTC traces, with ids in
//! place of indices.

use fttc_core::engine::{DeletionPass, TradeCycle};
use fttc_core::verify::{Extension, Mode, Verdict, Witness};
use fttc_core::{FttcRun, HousingMarket, TraceEvent};
use serde_json::{json, Map, Value};

use crate::format::{classes_json, rational_json, row_json, rows_json};

fn agent(market: &HousingMarket, i: usize) -> Value {
    Value::String(market.agents()[i].clone())
}

fn house(market: &HousingMarket, h: usize) -> Value {
    Value::String(market.houses()[h].clone())
}

fn steps_json(market: &HousingMarket, steps: &[(usize, usize)]) -> Value {
    steps
        .iter()
        .map(|&(h, i)| json!({"house": house(market, h), "agent": agent(market, i)}))
        .collect()
}

pub fn witness_json(market: &HousingMarket, witness: &Witness) -> Value {
    match witness {
        Witness::IrViolation { agent: i } => json!({"kind": "ir-violation", "agent": agent(market, *i)}),
        Witness::GoodCycle { steps } => json!({"kind": "good-cycle", "steps": steps_json(market, steps)}),
        Witness::DominatingAssignment { y } => {
            let everyone: Vec<usize> = (0..market.num_agents()).collect();
            json!({"kind": "dominating-assignment", "y": rows_json(market, &everyone, y)})
        }
        Witness::BlockingCoalition { coalition, y, mode } => json!({
            "kind": "blocking-coalition",
            "mode": match mode { Mode::AllStrict => "all-strict", Mode::SomeStrict => "some-strict" },
            "coalition": coalition.iter().map(|&i| agent(market, i)).collect::<Vec<_>>(),
            "y": rows_json(market, coalition, y),
        }),
        Witness::EnvyPair { envious, envied } => json!({
            "kind": "justified-envy",
            "envious": agent(market, *envious),
            "envied": agent(market, *envied),
        }),
        Witness::Misreport {
            agent: i,
            report,
            extension,
            truthful,
            manipulated,
        } => json!({
            "kind": "misreport",
            "agent": agent(market, *i),
            "extension": extension_name(*extension),
            "report": classes_json(market, report.classes()),
            "truthful": row_json(market, truthful),
            "manipulated": row_json(market, manipulated),
        }),
    }
}

pub fn extension_name(extension: Extension) -> &'static str {
    match extension {
        Extension::Sd => "sd",
        Extension::Dl => "dl",
    }
}

fn id_list(ids: impl Iterator<Item = String>) -> String {
    ids.collect::<Vec<_>>().join(",")
}

/// One line for humans.
pub fn witness_summary(market: &HousingMarket, witness: &Witness) -> String {
    let a = |i: usize| market.agents()[i].clone();
    let h = |k: usize| market.houses()[k].clone();
    match witness {
        Witness::IrViolation { agent } => format!("agent {} is not better off than its endowment", a(*agent)),
        Witness::GoodCycle { steps } => format!(
            "good cycle {}",
            steps.iter().map(|&(k, i)| format!("{}:{}", a(i), h(k))).collect::<Vec<_>>().join(" -> ")
        ),
        Witness::DominatingAssignment { .. } => "dominated by another assignment".into(),
        Witness::BlockingCoalition { coalition, .. } => {
            format!("blocking coalition {{{}}}", id_list(coalition.iter().map(|&i| a(i))))
        }
        Witness::EnvyPair { envious, envied } => {
            format!("agent {} has justified envy towards agent {}", a(*envious), a(*envied))
        }
        Witness::Misreport { agent, report, .. } => format!(
            "agent {} gains by reporting {}",
            a(*agent),
            report
                .classes()
                .iter()
                .map(|c| format!("[{}]", id_list(c.iter().map(|&k| h(k)))))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    }
}

pub fn verdict_json(market: &HousingMarket, check: &str, verdict: &Verdict) -> Value {
    let mut out = Map::new();
    out.insert("check".into(), check.into());
    match verdict {
        Verdict::Pass => {
            out.insert("verdict".into(), "pass".into());
        }
        Verdict::Fail(w) => {
            out.insert("verdict".into(), "fail".into());
            out.insert("witness".into(), witness_json(market, w));
        }
    }
    Value::Object(out)
}

fn trade_json(market: &HousingMarket, cycle: &TradeCycle) -> Value {
    json!({"trade": {"cycle": steps_json(market, &cycle.steps), "alpha": rational_json(&cycle.alpha)}})
}

fn deletion_json(market: &HousingMarket, pass: &DeletionPass) -> Value {
    json!({"delete": {
        "houses": pass.houses.iter().map(|&h| house(market, h)).collect::<Vec<_>>(),
        "finalized": pass.finalized.iter().map(|(i, h, amount)| json!({
            "agent": agent(market, *i),
            "house": house(market, *h),
            "amount": rational_json(amount),
        })).collect::<Vec<_>>(),
    }})
}

pub fn trace_json(market: &HousingMarket, run: &FttcRun) -> Value {
    json!({
        "trades": run.trades,
        "rounds": run.rounds,
        "deletion_passes": run.deletion_passes,
        "events": run.trace.iter().map(|e| match e {
            TraceEvent::Trade(c) => trade_json(market, c),
            TraceEvent::Deletion(p) => deletion_json(market, p),
        }).collect::<Vec<_>>(),
    })
}
