//! Text formats: edge lists, CSV exports, and the protocol transcript dump.

use specnet_core::{
    Edge, Graph, GraphError, GraphView, MomentVector, NodeId, Payload, ProtocolPhase, Spectrum,
    StepAction, TraceRow, Transcript,
};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Plain decimal with 17 significant digits — lossless for f64 and free of
/// scientific-notation surprises in diffs.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (16 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Edge-list text: first line `n <count>`, then one `i j` pair per line
/// with the master (larger) index first; `#` starts a comment.
pub fn edge_list_string(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n {}", g.node_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.master(), e.partner());
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        if n.is_none() {
            if tokens.next() != Some("n") {
                return Err(FormatError::Parse {
                    line,
                    msg: "expected header `n <count>`".to_string(),
                });
            }
            let count = tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| FormatError::Parse {
                    line,
                    msg: "expected node count after `n`".to_string(),
                })?;
            n = Some(count);
            continue;
        }
        let mut next_index = || -> Result<usize, FormatError> {
            tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| FormatError::Parse {
                    line,
                    msg: "expected `i j` node pair".to_string(),
                })
        };
        let i = next_index()?;
        let j = next_index()?;
        let e = Edge::try_new(NodeId::new(i), NodeId::new(j)).ok_or(FormatError::Parse {
            line,
            msg: format!("self-loop {i} {i}"),
        })?;
        edges.push(e);
    }
    let n = n.ok_or(FormatError::Parse { line: 0, msg: "missing `n <count>` header".into() })?;
    Ok(Graph::from_edges(n, edges)?)
}

/// One CSV row of moments, full precision.
pub fn moments_csv_row(m: &MomentVector) -> String {
    m.as_slice().iter().map(|&x| fmt_sig17(x)).collect::<Vec<_>>().join(",")
}

/// Whitespace/comma-separated reals, `#` comments allowed.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, FormatError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        for token in body.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
            let v: f64 = token.parse().map_err(|_| FormatError::Parse {
                line: idx + 1,
                msg: format!("not a number: `{token}`"),
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

/// Design trace as CSV: `t,kind,i,j,d_k,m_1..m_K`.
pub fn trace_csv_string(trace: &[TraceRow], order: usize) -> String {
    let mut out = String::from("t,kind,i,j,d_k");
    for k in 1..=order {
        let _ = write!(out, ",m_{k}");
    }
    out.push('\n');
    for row in trace {
        let (kind, edge) = match row.action {
            StepAction::Added(e) => ("add", e),
            StepAction::Deleted(e) => ("delete", e),
            StepAction::Converged => continue,
        };
        let _ = write!(
            out,
            "{},{},{},{},{}",
            row.t,
            kind,
            edge.master(),
            edge.partner(),
            fmt_sig17(row.sd)
        );
        for &m in row.moments.as_slice() {
            let _ = write!(out, ",{}", fmt_sig17(m));
        }
        out.push('\n');
    }
    out
}

/// Sorted eigenvalues with their empirical CDF: `lambda,cdf` rows.
pub fn spectrum_cdf_string(s: &Spectrum) -> String {
    let n = s.len() as f64;
    let mut out = String::new();
    for (idx, &lambda) in s.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_sig17(lambda), (idx + 1) as f64 / n);
    }
    out
}

/// Degree sequence in descending order, one per line.
pub fn degrees_string(g: &Graph) -> String {
    let mut degrees: Vec<usize> = g.node_ids().map(|v| g.degree(v)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = String::new();
    for d in degrees {
        let _ = writeln!(out, "{d}");
    }
    out
}

fn phase_name(phase: ProtocolPhase) -> &'static str {
    match phase {
        ProtocolPhase::AverageConsensus => "average_consensus",
        ProtocolPhase::ConnectivityCheck => "connectivity_check",
        ProtocolPhase::Election => "election",
    }
}

/// Protocol transcripts as JSON lines, one object per (round, node).
pub fn transcript_jsonl_string(transcripts: &[(usize, Transcript)]) -> String {
    let mut out = String::new();
    for (t, transcript) in transcripts {
        for ev in &transcript.events {
            let payload = match &ev.payload {
                Payload::Reals(v) => serde_json::json!({ "values": v }),
                Payload::Marks(v) => serde_json::json!({ "marks": v }),
                Payload::Action(a) => serde_json::json!({
                    "action": {
                        "master": a.master.index(),
                        "partner": a.partner.map(|p| p.index()),
                        "sd": a.sd,
                        "moments": a.moments.as_slice(),
                    }
                }),
            };
            let mut obj = serde_json::json!({
                "t": t,
                "phase": phase_name(ev.phase),
                "round": ev.round,
                "node": ev.node.index(),
            });
            obj.as_object_mut().unwrap().extend(payload.as_object().unwrap().clone());
            let _ = writeln!(out, "{obj}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use specnet_core::{laplacian, ring, star, sym_eig};

    #[test]
    fn fmt_sig17_is_plain_and_lossless() {
        for &x in &[0.0, 1.0, -2.5, 10000.8, 1e18, std::f64::consts::PI, 1.0 / 3.0, -1e-9] {
            let s = fmt_sig17(x);
            assert!(!s.contains('e') && !s.contains('E'), "{s} not plain decimal");
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s} did not round-trip");
        }
    }

    #[test]
    fn edge_list_round_trips() {
        let g = star(10).unwrap();
        let text = edge_list_string(&g);
        assert!(text.starts_with("n 10\n"));
        assert_eq!(text.lines().count(), 10); // header + 9 edges
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn edge_list_round_trips_on_random_graphs() {
        for seed in 0..50u64 {
            let n = 2 + (seed as usize % 30);
            let g = specnet_core::erdos_renyi_connected(n, 0.3, seed).unwrap();
            let back = parse_edge_list(&edge_list_string(&g)).unwrap();
            assert_eq!(back, g, "seed {seed}");
        }
    }

    #[test]
    fn edge_list_accepts_comments_and_any_orientation() {
        let g = parse_edge_list("# a triangle\nn 3\n0 1\n2 1 # last\n\n2 0\n").unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(parse_edge_list("3\n1 0\n").is_err());
        assert!(parse_edge_list("n 3\n1 1\n").is_err());
        assert!(parse_edge_list("n 3\n1 0\n1 0\n").is_err()); // duplicate
        assert!(parse_edge_list("n 3\n5 0\n").is_err()); // out of range
    }

    #[test]
    fn spectrum_cdf_of_k2() {
        let g = parse_edge_list("n 2\n1 0\n").unwrap();
        let s = sym_eig(&laplacian(&g)).unwrap();
        let text = spectrum_cdf_string(&s);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with('0') && rows[0].ends_with("0.5"));
        assert!(rows[1].starts_with("2.") && rows[1].ends_with(",1"));
    }

    #[test]
    fn degrees_of_ring_are_all_two() {
        let text = degrees_string(&ring(5).unwrap());
        assert_eq!(text, "2\n2\n2\n2\n2\n");
    }

    #[test]
    fn reals_parser_handles_rows_and_columns() {
        let v = parse_reals("1.5, 2 3\n# note\n4.25\n").unwrap();
        assert_eq!(v, vec![1.5, 2.0, 3.0, 4.25]);
        assert!(parse_reals("1.5 oops").is_err());
    }
}
