//! CSV and JSON renderings of checker reports, witnesses and doubling chains.
//!
//! Output is deterministic: LF line endings, a header row, doubles with 17
//! significant digits, big indices in decimal.

use serde_json::{json, Value};

use crate::criterion::{CheckReport, CriterionWitness, HitReport, IndexChain};
use crate::numeric::fmt_g17;
use crate::operator::OperatorMatrix;
use crate::schedule::{Block, IntervalSchedule};
use crate::vector::SparseVector;

pub const CHECK_HEADER: &str = "check,condition,k,max_norm,bound,pass";
pub const WITNESS_HEADER: &str = "k,n_k,c_k,i_k,j_k,norm_w,norm_qTe0,norm_residual";
pub const CHAIN_HEADER: &str = "step,n,c,gamma,error,budget";
pub const HIT_HEADER: &str = "kind,start,target,first_hit";
pub const MATRIX_HEADER: &str = "column,row,value";

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_g17(x))
    }
}

fn lines(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

pub fn check_report_csv(report: &CheckReport) -> String {
    lines(
        CHECK_HEADER,
        report.rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                report.check,
                r.condition,
                r.k,
                fmt_g17(r.max_norm),
                fmt_g17(r.bound),
                r.pass
            )
        }),
    )
}

pub fn witness_csv(witness: &CriterionWitness) -> String {
    lines(
        WITNESS_HEADER,
        witness.rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.k,
                r.n_k,
                r.c_k,
                r.i_k,
                r.j_k,
                fmt_g17(r.norm_w),
                fmt_g17(r.norm_q_e0),
                fmt_g17(r.norm_residual)
            )
        }),
    )
}

pub fn chain_csv(chain: &IndexChain) -> String {
    lines(
        CHAIN_HEADER,
        chain.steps.iter().enumerate().map(|(m, s)| {
            format!(
                "{},{},{},{},{},{}",
                m + 1,
                s.fan,
                s.c,
                fmt_g17(s.gamma),
                fmt_g17(s.error),
                fmt_g17(s.budget)
            )
        }),
    )
}

pub fn vector_json(v: &SparseVector) -> Value {
    Value::Array(v.iter().map(|(i, c)| json!([i.to_string(), num(c)])).collect())
}

pub fn check_report_json(report: &CheckReport) -> Value {
    json!({
        "check": report.check,
        "verdict": report.verdict.label(),
        "rows": report.rows.iter().map(|r| json!({
            "condition": r.condition,
            "k": r.k,
            "max_norm": num(r.max_norm),
            "bound": num(r.bound),
            "pass": r.pass,
        })).collect::<Vec<_>>(),
    })
}

pub fn witness_json(witness: &CriterionWitness) -> Value {
    json!({
        "space": witness.space.name(),
        "rows": witness.rows.iter().map(|r| json!({
            "k": r.k,
            "n_k": r.n_k,
            "c_k": r.c_k.to_string(),
            "i_k": r.i_k.to_string(),
            "j_k": r.j_k.to_string(),
            "fan_error": num(r.fan_error),
            "norm_w": num(r.norm_w),
            "norm_qTe0": num(r.norm_q_e0),
            "norm_residual": num(r.norm_residual),
            "w": vector_json(&r.w),
        })).collect::<Vec<_>>(),
    })
}

pub fn chain_json(chain: &IndexChain) -> Value {
    json!({
        "target": chain.target.render(),
        "eps": num(chain.eps),
        "j": chain.j,
        "base": chain.base.render(),
        "rounding_error": num(chain.rounding_error),
        "final_error": num(chain.final_error),
        "steps": chain.steps.iter().map(|s| json!({
            "n": s.fan,
            "c": s.c.to_string(),
            "gamma": num(s.gamma),
            "target": s.target.render(),
            "error": num(s.error),
            "budget": num(s.budget),
        })).collect::<Vec<_>>(),
    })
}

pub fn schedule_json(schedule: &IntervalSchedule) -> Value {
    let blocks: Vec<Value> = schedule
        .blocks()
        .iter()
        .map(|b| match b {
            Block::Origin => json!({ "kind": "origin", "start": "0", "end": "0" }),
            Block::Layoff(l) => json!({
                "kind": "layoff",
                "start": l.start.to_string(),
                "end": l.end().to_string(),
            }),
            Block::Fan(f) => json!({
                "kind": "fan",
                "n": f.n,
                "c": f.c.to_string(),
                "nu": f.nu.to_string(),
                "gamma": num(f.gamma),
                "p": f.p.render(),
                "origin": f.origin.label(),
            }),
        })
        .collect();
    json!({ "total_length": schedule.total_length().to_string(), "blocks": blocks })
}

fn hit(n: Option<usize>) -> String {
    n.map_or_else(|| "miss".to_string(), |n| n.to_string())
}

pub fn hit_csv(report: &HitReport) -> String {
    let singles = report
        .singles
        .iter()
        .map(|r| format!("single,{},{},{}", r.start, r.target, hit(r.first_hit)));
    let pairs = report.pairs.iter().map(|r| {
        format!(
            "pair,{}:{},{}:{},{}",
            r.starts.0,
            r.starts.1,
            r.targets.0,
            r.targets.1,
            hit(r.first_hit)
        )
    });
    lines(HIT_HEADER, singles.chain(pairs))
}

pub fn hit_json(report: &HitReport) -> Value {
    json!({
        "singles": report.singles.iter().map(|r| json!({
            "start": r.start, "target": r.target, "first_hit": r.first_hit,
        })).collect::<Vec<_>>(),
        "pairs": report.pairs.iter().map(|r| json!({
            "starts": [r.starts.0, r.starts.1],
            "targets": [r.targets.0, r.targets.1],
            "first_hit": r.first_hit,
        })).collect::<Vec<_>>(),
    })
}

/// Nonzero entries of the truncation, column by column.
pub fn matrix_csv(m: &OperatorMatrix) -> String {
    let rows = m
        .columns()
        .iter()
        .enumerate()
        .flat_map(|(j, col)| col.iter().map(move |(i, c)| format!("{j},{i},{}", fmt_g17(c))));
    lines(MATRIX_HEADER, rows)
}

pub fn matrix_json(m: &OperatorMatrix, norm_l1: f64) -> Value {
    json!({
        "dim": m.dim(),
        "norm_l1": num(norm_l1),
        "columns": m.columns().iter().map(vector_json).collect::<Vec<_>>(),
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
