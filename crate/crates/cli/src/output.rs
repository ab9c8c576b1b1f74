use crate::args::Global;
use crate::CliError;
use fgel_core::census::experiment::GrowthRow;
use fgel_core::rational::format_q;
use std::io::Write;

/// Writes the whole result once, to `--output` or stdout.
pub fn emit(global: &Global, text: &str) -> Result<(), CliError> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &global.output {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Failed(format!("stdout: {e}")))
        }
    }
}

pub fn json(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

/// Floats in JSON; non-finite values become null.
pub fn num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

pub const GROWTH_HEADER: [&str; 12] = [
    "n",
    "k",
    "epsilon",
    "trials",
    "mean_count",
    "ci_low",
    "ci_high",
    "growth_rate",
    "reference_value",
    "reference_kind",
    "sampler",
    "seed",
];

fn fmt_f(x: f64) -> String {
    format!("{x:.10}")
}

pub fn growth_csv(rows: &[GrowthRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(format!("csv: {e}"));
    w.write_record(GROWTH_HEADER).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            format_q(&r.eps),
            r.estimate.trials.to_string(),
            fmt_f(r.estimate.mean),
            fmt_f(r.estimate.ci_low),
            fmt_f(r.estimate.ci_high),
            r.growth_rate.map(fmt_f).unwrap_or_default(),
            fmt_f(r.reference_value),
            r.reference_kind.as_str().to_string(),
            r.sampler.clone(),
            r.seed.to_string(),
        ])
        .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn growth_json(rows: &[GrowthRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "n": r.n,
                    "k": r.k,
                    "epsilon": format_q(&r.eps),
                    "trials": r.estimate.trials,
                    "mean_count": num(r.estimate.mean),
                    "ci_low": num(r.estimate.ci_low),
                    "ci_high": num(r.estimate.ci_high),
                    "growth_rate": r.growth_rate.map(num),
                    "reference_value": num(r.reference_value),
                    "reference_kind": r.reference_kind.as_str(),
                    "sampler": r.sampler,
                    "seed": r.seed,
                    "level": r.level,
                })
            })
            .collect(),
    )
}
