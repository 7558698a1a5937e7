//! Deterministic result serialization.
//!
//! Both formats are written by hand because the output contract is
//! byte-level: floats carry exactly 17 significant digits (lossless for
//! f64), fields appear in a fixed order, and identical runs must produce
//! identical bytes, golden-file style.

use pointcontact::{BranchTrace, CheckResult, CheckStatus, ExpansionResult, Fitted};
use std::fmt::Write;

/// `f64` with 17 significant digits, enough to round-trip any double.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                write!(out, "\\u{:04x}", c as u32).unwrap();
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn json_fields(pairs: &[(&str, String)], out: &mut String) {
    out.push('{');
    for (i, (k, v)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        json_string(k, out);
        out.push(':');
        out.push_str(v);
    }
    out.push('}');
}

fn json_str_value(s: &str) -> String {
    let mut out = String::new();
    json_string(s, &mut out);
    out
}

fn diagnostics_json(res: &ExpansionResult) -> String {
    let mut out = String::new();
    json_fields(
        &[
            ("dhat_beta_prime", fmt_float(res.diagnostics.dhat_beta_prime)),
            ("dtilde_alpha", fmt_float(res.diagnostics.dtilde_alpha)),
        ],
        &mut out,
    );
    out
}

fn expansion_fields(res: &ExpansionResult) -> Vec<(&'static str, String)> {
    let mut fields = vec![
        ("lambda0", fmt_float(res.lambda0)),
        ("a", fmt_float(res.a)),
    ];
    if let Some(b) = res.b {
        fields.push(("b", fmt_float(b)));
    }
    fields.push(("order", res.order.to_string()));
    fields.push(("diagnostics", diagnostics_json(res)));
    fields
}

pub fn coeffs_json(res: &ExpansionResult) -> String {
    let mut out = String::new();
    json_fields(&expansion_fields(res), &mut out);
    out.push('\n');
    out
}

pub fn coeffs_csv(res: &ExpansionResult) -> String {
    let b = res.b.map(fmt_float).unwrap_or_default();
    format!(
        "lambda0,a,b,order,dhat_beta_prime,dtilde_alpha\n{},{},{},{},{},{}\n",
        fmt_float(res.lambda0),
        fmt_float(res.a),
        b,
        res.order,
        fmt_float(res.diagnostics.dhat_beta_prime),
        fmt_float(res.diagnostics.dtilde_alpha),
    )
}

pub const BRANCH_CSV_HEADER: &str =
    "x,lambda_numeric,lambda_expansion,abs_diff,residual,newton_iters";

pub fn branch_csv(trace: &BranchTrace, reference: &ExpansionResult) -> String {
    let mut out = String::from(BRANCH_CSV_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let expansion = reference.evaluate(s.x);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(s.x),
            fmt_float(s.lambda),
            fmt_float(expansion),
            fmt_float((s.lambda - expansion).abs()),
            fmt_float(s.residual),
            s.newton_iters,
        )
        .unwrap();
    }
    out
}

fn fitted_json(f: &Fitted) -> String {
    let mut fields = vec![("a_hat", fmt_float(f.a_hat))];
    if let Some(b) = f.b_hat {
        fields.push(("b_hat", fmt_float(b)));
    }
    if let Some(s) = f.remainder_slope {
        fields.push(("remainder_slope", fmt_float(s)));
    }
    let mut out = String::new();
    json_fields(&fields, &mut out);
    out
}

pub fn branch_json(trace: &BranchTrace, reference: &ExpansionResult) -> String {
    let mut samples = String::from("[");
    for (i, s) in trace.samples.iter().enumerate() {
        if i > 0 {
            samples.push(',');
        }
        let expansion = reference.evaluate(s.x);
        json_fields(
            &[
                ("x", fmt_float(s.x)),
                ("lambda_numeric", fmt_float(s.lambda)),
                ("lambda_expansion", fmt_float(expansion)),
                ("abs_diff", fmt_float((s.lambda - expansion).abs())),
                ("residual", fmt_float(s.residual)),
                ("newton_iters", s.newton_iters.to_string()),
            ],
            &mut samples,
        );
    }
    samples.push(']');

    let mut reference_obj = String::new();
    json_fields(&expansion_fields(reference), &mut reference_obj);

    let mut fields = vec![
        ("lambda0", fmt_float(trace.lambda0)),
        ("reference", reference_obj),
        ("samples", samples),
    ];
    if let Some(f) = &trace.fitted {
        fields.push(("fitted", fitted_json(f)));
    }
    let mut out = String::new();
    json_fields(&fields, &mut out);
    out.push('\n');
    out
}

fn status_word(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::Skipped => "skipped",
    }
}

fn csv_quote(s: &str) -> String {
    let mut out = String::from("\"");
    out.push_str(&s.replace('"', "\"\""));
    out.push('"');
    out
}

pub fn report_csv(checks: &[CheckResult]) -> String {
    let mut out = String::from("status,name,detail\n");
    for c in checks {
        writeln!(out, "{},{},{}", status_word(c.status), c.name, csv_quote(&c.detail)).unwrap();
    }
    out
}

pub fn report_json(checks: &[CheckResult]) -> String {
    let mut arr = String::from("[");
    for (i, c) in checks.iter().enumerate() {
        if i > 0 {
            arr.push(',');
        }
        json_fields(
            &[
                ("name", json_str_value(c.name)),
                ("status", json_str_value(status_word(c.status))),
                ("detail", json_str_value(&c.detail)),
            ],
            &mut arr,
        );
    }
    arr.push(']');
    let passed = checks
        .iter()
        .all(|c| c.status != CheckStatus::Fail)
        .to_string();
    let mut out = String::new();
    json_fields(&[("checks", arr), ("passed", passed)], &mut out);
    out.push('\n');
    out
}
