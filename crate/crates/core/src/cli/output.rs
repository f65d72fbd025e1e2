//! CSV and JSON renderings of every command's result. Numbers carry 12
//! significant digits so golden files stay readable and byte-stable.

use serde_json::{json, Value};

use crate::analytics::MetricsReport;
use crate::experiments::{GammaOptimum, SweepRow, SweepSpec, ValidationTable};
use crate::montecarlo::{McEstimate, McReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// JSON number with 12 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// CSV cell for a number, using the same digits as the JSON output.
pub fn cell(x: f64) -> String {
    match num(x) {
        Value::Number(n) => n.to_string(),
        _ => x.to_string(),
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

pub fn analyze(report: &MetricsReport, legit_tier: usize, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "legit_tier": legit_tier + 1,
            "p_av": num(report.p_av(legit_tier)),
            "p_cov": num(report.p_cov),
            "p_suc": num(report.p_suc),
            "p_out": num(report.p_out),
            "p_sec": num(report.p_sec),
            "p_av_per_tier": report.p_av_per_tier.iter().map(|&p| num(p)).collect::<Vec<_>>(),
            "laplace_at_inverse_noise":
                report.laplace_at_inverse_noise.iter().map(|&p| num(p)).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .p_av_per_tier
                .iter()
                .enumerate()
                .map(|(k, &p)| vec![format!("p_av_{}", k + 1), cell(p)])
                .collect();
            for (name, v) in [
                ("p_cov", report.p_cov),
                ("p_suc", report.p_suc),
                ("p_out", report.p_out),
                ("p_sec", report.p_sec),
            ] {
                rows.push(vec![name.to_string(), cell(v)]);
            }
            csv(&["metric", "value"], rows)
        }
    }
}

fn estimate_json(e: &McEstimate) -> Value {
    json!({
        "mean": num(e.mean),
        "stderr": num(e.stderr),
        "n": e.n_trials,
        "seed": e.master_seed,
    })
}

pub fn simulate(report: &McReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "legit_tier": report.legit_tier + 1,
            "p_av": estimate_json(&report.p_av[report.legit_tier]),
            "p_cov": estimate_json(&report.p_cov_joint),
            "p_suc": estimate_json(&report.p_suc),
            "p_out": estimate_json(&report.p_out),
            "p_sec": estimate_json(&report.p_sec),
            "p_av_per_tier": report.p_av.iter().map(estimate_json).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            &["metric", "mean", "stderr", "n", "seed"],
            report.metrics().into_iter().map(|(name, e)| {
                vec![
                    name,
                    cell(e.mean),
                    cell(e.stderr),
                    e.n_trials.to_string(),
                    e.master_seed.to_string(),
                ]
            }),
        ),
    }
}

pub fn validate(table: &ValidationTable, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "n_trials": table.n_trials,
            "seed": table.seed,
            "all_pass": table.all_pass(),
            "rows": table.rows.iter().map(|r| json!({
                "metric": r.metric,
                "analytic": num(r.analytic),
                "mc_mean": num(r.mc_mean),
                "mc_stderr": num(r.mc_stderr),
                "abs_diff": num(r.abs_diff),
                "pass": r.pass,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            &["metric", "analytic", "mc_mean", "mc_stderr", "abs_diff", "pass"],
            table.rows.iter().map(|r| {
                vec![
                    r.metric.clone(),
                    cell(r.analytic),
                    cell(r.mc_mean),
                    cell(r.mc_stderr),
                    cell(r.abs_diff),
                    r.pass.to_string(),
                ]
            }),
        ),
    }
}

pub fn sweep(spec: &SweepSpec, rows: &[SweepRow], format: Format) -> String {
    let opt = |x: Option<f64>| x.map_or(String::new(), cell);
    match format {
        Format::Json => pretty(&json!({
            "axis1": spec.axis1.param.name(),
            "axis2": spec.axis2.as_ref().map(|a| a.param.name()),
            "rows": rows.iter().map(|r| json!({
                "axis1": num(r.axis1),
                "axis2": r.axis2.map(num),
                "metric": r.metric,
                "value": num(r.value),
                "stderr": r.stderr.map(num),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            &["axis1", "axis2", "metric", "value", "stderr"],
            rows.iter().map(|r| {
                vec![
                    cell(r.axis1),
                    opt(r.axis2),
                    r.metric.clone(),
                    cell(r.value),
                    opt(r.stderr),
                ]
            }),
        ),
    }
}

pub fn optimize(opt: &GammaOptimum, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "gamma_star": num(opt.gamma_star),
            "p_sec_star": num(opt.p_sec_star),
            "grid": opt.grid.iter().map(|&(g, p)| json!({"gamma": num(g), "p_sec": num(p)})).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            &["kind", "gamma", "p_sec"],
            opt.grid
                .iter()
                .map(|&(g, p)| vec!["grid".to_string(), cell(g), cell(p)])
                .chain(std::iter::once(vec![
                    "optimum".to_string(),
                    cell(opt.gamma_star),
                    cell(opt.p_sec_star),
                ])),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round12(0.9564049462285963), 0.956404946229);
        assert_eq!(round12(1.0), 1.0);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(round12(123456789012345.0), 123456789012000.0);
        assert_eq!(cell(0.1 + 0.2), "0.3");
        assert_eq!(cell(1e-6), "1e-6");
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], vec![vec!["1".into(), "2".into()]]);
        assert_eq!(s, "a,b\n1,2\n");
    }
}
