//! File formats: graph edge lists, reward realizations (CSV and binary),
//! bandit traces, versioned CSV tables, JSON-lines reports.
//!
//! Every CSV starts with a `# alloc2mech <schema> v<version>` line. Numbers
//! are written with Rust's shortest round-trip formatting, so a file read back
//! reproduces the exact values.

use crate::checks::CheckReport;
use crate::error::{Error, Result};
use alloc2mech_core::bandit::{ClickRealization, RewardSource, RoundRecord, StackRealization};
use alloc2mech_core::offline::{Edge, Graph};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_VERSION: u32 = 1;

/// A CSV table with a versioned schema comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    schema: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Csv {
            schema: schema.to_owned(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<I, T>(&mut self, cells: I)
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        let r: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(r.len(), self.columns.len());
        self.rows.push(r);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = format!("# alloc2mech {} v{CSV_VERSION}\n", self.schema);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Checks the `# alloc2mech <schema> v<version>` line.
fn expect_header(line: Option<&str>, schema: &str) -> std::result::Result<(), String> {
    let want = format!("# alloc2mech {schema} v{CSV_VERSION}");
    match line {
        Some(l) if l.trim_end() == want => Ok(()),
        Some(l) => Err(format!("expected header {want:?}, found {l:?}")),
        None => Err("empty file".into()),
    }
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Output {
        path: path.to_owned(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Input {
        path: path.to_owned(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Output {
        path: path.to_owned(),
        source,
    })
}

/// Parses an edge list, one `from to agent_id` triple per line. Blank lines
/// and `#` comments are skipped. Returns the edges and the node count, one
/// more than the largest node id.
pub fn parse_edges(text: &str) -> std::result::Result<(Vec<Edge>, usize), String> {
    let mut edges = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(format!("line {}: expected `from to agent_id`", k + 1));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| format!("line {}: {s:?} is not a nonnegative integer", k + 1))
        };
        edges.push(Edge {
            from: num(f[0])?,
            to: num(f[1])?,
            agent: num(f[2])?,
        });
    }
    if edges.is_empty() {
        return Err("no edges".into());
    }
    let nodes = edges.iter().map(|e| e.from.max(e.to)).max().unwrap_or(0) + 1;
    Ok((edges, nodes))
}

pub fn parse_graph(text: &str, source: usize, target: usize) -> std::result::Result<Graph, String> {
    let (edges, nodes) = parse_edges(text)?;
    Graph::new(nodes, edges, source, target).map_err(|e| e.to_string())
}

pub fn read_graph(path: &Path, source: usize, target: usize) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::Graph {
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    parse_graph(&text, source, target).map_err(|reason| Error::Graph {
        path: path.to_owned(),
        reason,
    })
}

pub fn render_graph(g: &Graph) -> String {
    let mut s = format!(
        "# alloc2mech graph: {} nodes, {} edges, source {}, target {}\n# from to agent_id\n",
        g.nodes(),
        g.edges().len(),
        g.source(),
        g.target()
    );
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.from, e.to, e.agent);
    }
    s
}

/// A reward table of either indexing.
#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    Click(ClickRealization),
    Stack(StackRealization),
}

const BINARY_MAGIC: &[u8; 4] = b"A2MR";
const BINARY_VERSION: u8 = 1;

impl Realization {
    fn parts(&self) -> (&'static str, usize, usize, &[f64]) {
        match self {
            Realization::Click(r) => ("click", r.agents(), r.rounds(), r.values()),
            Realization::Stack(r) => ("stack", r.num_agents(), r.depth(), r.values()),
        }
    }

    fn build(
        kind: &str,
        agents: usize,
        cells: usize,
        values: Vec<f64>,
    ) -> std::result::Result<Self, String> {
        match kind {
            "click" => ClickRealization::new(agents, cells, values).map(Realization::Click),
            "stack" => StackRealization::new(agents, cells, values).map(Realization::Stack),
            k => return Err(format!("unknown realization kind {k:?}")),
        }
        .map_err(|e| e.to_string())
    }

    /// One row per agent, one column per round (click) or play (stack).
    pub fn to_csv(&self) -> String {
        let (kind, n, cells, values) = self.parts();
        let mut s = format!(
            "# alloc2mech realization v{CSV_VERSION}\n# kind={kind} agents={n} cells={cells}\n"
        );
        for i in 0..n {
            let row: Vec<String> = values[i * cells..(i + 1) * cells]
                .iter()
                .map(f64::to_string)
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines();
        expect_header(lines.next(), "realization")?;
        let meta = lines.next().ok_or("missing kind line")?;
        let mut kind = None;
        let (mut n, mut cells) = (None, None);
        for kv in meta.trim_start_matches('#').split_whitespace() {
            match kv.split_once('=') {
                Some(("kind", v)) => kind = Some(v.to_owned()),
                Some(("agents", v)) => n = v.parse::<usize>().ok(),
                Some(("cells", v)) => cells = v.parse::<usize>().ok(),
                _ => return Err(format!("bad metadata {kv:?}")),
            }
        }
        let (kind, n, cells) = match (kind, n, cells) {
            (Some(k), Some(n), Some(c)) => (k, n, c),
            _ => return Err("metadata needs kind, agents and cells".into()),
        };
        let mut values = Vec::with_capacity(n * cells);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            for v in line.split(',') {
                values.push(
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad value {v:?}"))?,
                );
            }
        }
        Self::build(&kind, n, cells, values)
    }

    /// `A2MR`, version byte, kind byte (0 click, 1 stack), agents and cells as
    /// little-endian `u32`, then agent-major little-endian `f64` values.
    pub fn to_binary(&self) -> Vec<u8> {
        let (kind, n, cells, values) = self.parts();
        let mut out = Vec::with_capacity(14 + 8 * values.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.push(BINARY_VERSION);
        out.push(u8::from(kind == "stack"));
        out.extend_from_slice(&(n as u32).to_le_bytes());
        out.extend_from_slice(&(cells as u32).to_le_bytes());
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> std::result::Result<Self, String> {
        if bytes.len() < 14 || &bytes[..4] != BINARY_MAGIC {
            return Err("not an alloc2mech realization".into());
        }
        if bytes[4] != BINARY_VERSION {
            return Err(format!("unsupported version {}", bytes[4]));
        }
        let kind = match bytes[5] {
            0 => "click",
            1 => "stack",
            k => return Err(format!("unknown kind byte {k}")),
        };
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let (n, cells) = (word(6), word(10));
        let body = &bytes[14..];
        if body.len() != 8 * n * cells {
            return Err("truncated value table".into());
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::build(kind, n, cells, values)
    }
}

/// Bandit trace with 1-based agent ids; the active set is space-separated.
pub fn trace_csv(trace: &[RoundRecord]) -> Csv {
    let mut csv = Csv::new(
        "trace",
        &["round", "designated", "played", "reward", "active"],
    );
    for r in trace {
        let active: Vec<String> = r.active.iter().map(usize::to_string).collect();
        csv.row([
            r.round.to_string(),
            r.designated.to_string(),
            r.played.to_string(),
            r.reward.to_string(),
            active.join(" "),
        ]);
    }
    csv
}

pub fn parse_trace(text: &str) -> std::result::Result<Vec<RoundRecord>, String> {
    let mut lines = text.lines();
    expect_header(lines.next(), "trace")?;
    lines.next().ok_or("missing column line")?;
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(format!("bad trace row {l:?}"));
            }
            let bad = || format!("bad trace row {l:?}");
            Ok(RoundRecord {
                round: f[0].parse().map_err(|_| bad())?,
                designated: f[1].parse().map_err(|_| bad())?,
                played: f[2].parse().map_err(|_| bad())?,
                reward: f[3].parse().map_err(|_| bad())?,
                active: f[4]
                    .split_whitespace()
                    .map(|a| a.parse().map_err(|_| bad()))
                    .collect::<std::result::Result<_, _>>()?,
            })
        })
        .collect()
}

pub fn reports_jsonl(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&serde_json::to_string(r).expect("reports serialize"));
        s.push('\n');
    }
    s
}

/// Human-readable table, one report per line, plus a verdict.
pub fn summary_table(title: &str, reports: &[CheckReport], extra: &[(String, String)]) -> String {
    let mut s = format!("{title}\n");
    for (k, v) in extra {
        let _ = writeln!(s, "  {k}: {v}");
    }
    let _ = writeln!(s, "{:<13} {:<44} observed", "status", "check");
    for r in reports {
        s.push_str(&r.summary_line());
        s.push('\n');
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(s, "{} checks, {} not passed", reports.len(), failed);
    s
}

/// Writes `name` under `dir` and returns its path.
pub fn emit(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    let p = dir.join(name);
    write_file(&p, contents)?;
    Ok(p)
}
