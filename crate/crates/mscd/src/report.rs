//! Sweep report tables: a rounded TSV for reading and a full-precision
//! JSON twin for tools.

use mscd_core::SweepReport;
use serde::Serialize;

/// `x` with six significant digits, trailing zeros dropped, switching to
/// exponent form outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn header(rep: &SweepReport) -> Vec<String> {
    let mut cols: Vec<String> = ["scale", "num_communities", "Q", "nmi_prev", "nmi_w3", "nmi_w5"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(rep.truth_names());
    cols
}

pub fn to_tsv(rep: &SweepReport) -> String {
    let mut out = header(rep).join("\t");
    out.push('\n');
    for (i, r) in rep.records.iter().enumerate() {
        let mut row = vec![
            sig6(r.param),
            r.community_count().to_string(),
            sig6(r.quality),
            sig6(rep.nmi_prev[i]),
            sig6(rep.nmi_w3[i]),
            sig6(rep.nmi_w5[i]),
        ];
        row.extend(rep.nmi_truth.iter().map(|series| sig6(series[i])));
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Row {
    scale: f64,
    num_communities: usize,
    #[serde(rename = "Q")]
    q: f64,
    nmi_prev: f64,
    nmi_w3: f64,
    nmi_w5: f64,
    nmi_truth: Vec<f64>,
    node_moves: Option<usize>,
}

#[derive(Serialize)]
struct Table {
    criterion: &'static str,
    columns: Vec<String>,
    rows: Vec<Row>,
}

pub fn to_json(rep: &SweepReport) -> String {
    let rows = rep
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| Row {
            scale: r.param,
            num_communities: r.community_count(),
            q: r.quality,
            nmi_prev: rep.nmi_prev[i],
            nmi_w3: rep.nmi_w3[i],
            nmi_w5: rep.nmi_w5[i],
            nmi_truth: rep.nmi_truth.iter().map(|s| s[i]).collect(),
            node_moves: r.node_moves,
        })
        .collect();
    let table = Table {
        criterion: rep.kind.name(),
        columns: header(rep),
        rows,
    };
    let mut s = serde_json::to_string_pretty(&table).expect("report serialises");
    s.push('\n');
    s
}
