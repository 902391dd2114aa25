//! Step-by-step record of a query run, printable as a table or as JSON lines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    pub action: String,
    pub u: Vec<String>,
    pub col: Vec<String>,
    pub rol: Vec<String>,
    pub pel: Vec<String>,
}

fn cell(items: &[String]) -> String {
    if items.is_empty() {
        "∅".to_string()
    } else {
        items.join(", ")
    }
}

/// Plain-text table with the columns `Steps | Actions | U | COL | ROL | PEL`.
pub fn format_table(trace: &[TraceEvent]) -> String {
    let header = ["Steps", "Actions", "U", "COL", "ROL", "PEL"].map(String::from);
    let rows: Vec<[String; 6]> = trace
        .iter()
        .map(|e| {
            [
                e.step.to_string(),
                e.action.clone(),
                cell(&e.u),
                cell(&e.col),
                cell(&e.rol),
                cell(&e.pel),
            ]
        })
        .collect();
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String; 6]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join(" | ").trim_end().to_string()
    };
    let mut out = line(&header);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .join("-+-"),
    );
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// One JSON object per line.
pub fn to_json_lines(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in trace {
        out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
        out.push('\n');
    }
    out
}
