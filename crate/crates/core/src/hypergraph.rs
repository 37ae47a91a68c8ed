//! Temporal hypergraph data model, ingestion, and preprocessing.
//!
//! Vertices are interned author names (Unicode NFC + lowercase for identity,
//! original spelling kept in a side table). Hyperedges carry a sorted member
//! set, a timestamp, and optional topic labels. An incidence index (vertex →
//! edge ids sorted by time) backs the time-windowed candidate generation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Dense vertex handle, 0..|V|-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense hyperedge index, 0..|E|-1, in input order.
pub type EdgeId = u32;

/// Unit used when rebasing timestamps to elapsed time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Days,
    Seconds,
    Months,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Days => "days",
            TimeUnit::Seconds => "seconds",
            TimeUnit::Months => "months",
        }
    }
}

impl std::str::FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "days" => Ok(TimeUnit::Days),
            "seconds" => Ok(TimeUnit::Seconds),
            "months" => Ok(TimeUnit::Months),
            other => Err(Error::Parameter(format!("unknown time unit {other:?}"))),
        }
    }
}

/// Interpretation of the `time` field on every edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeKind {
    /// Seconds since the Unix epoch (parsed from calendar timestamps).
    EpochSeconds,
    /// Opaque numbers straight from the input; differences are meaningful,
    /// the scale is whatever the producer used.
    Raw,
    /// Elapsed time since the earliest edge, in the given unit.
    Normalized(TimeUnit),
}

/// Mean Gregorian month, in days.
const DAYS_PER_MONTH: f64 = 30.436875;
const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Clone, Debug)]
pub struct Hyperedge {
    /// Member vertices, sorted and deduplicated.
    pub members: Vec<VertexId>,
    /// Canonical time value; see [`TimeKind`].
    pub time: f64,
    /// Topic labels; the first entry is the primary label.
    pub labels: Vec<String>,
    /// Explicit id from the input file, if any.
    pub source_id: Option<String>,
    /// Original time literal, retained until `normalize_times`.
    pub raw_time: Option<serde_json::Value>,
}

impl Hyperedge {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// What `clean_authors` removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CleanReport {
    pub removed_vertices: usize,
    pub removed_edges: usize,
    /// For each surviving edge, its index in the pre-clean edge list; keeps
    /// re-indexed ids joinable to raw records. Not part of the JSON report.
    #[serde(skip)]
    pub kept_edges: Vec<EdgeId>,
}

/// Immutable-after-build temporal hypergraph.
#[derive(Clone, Debug)]
pub struct TemporalHypergraph {
    edges: Vec<Hyperedge>,
    names: Vec<String>,
    time_kind: TimeKind,
    incidence: Vec<Vec<EdgeId>>,
}

/// Vertex-name identity: Unicode NFC, then lowercase.
pub fn normalize_name(name: &str) -> String {
    name.nfc().collect::<String>().to_lowercase()
}

impl TemporalHypergraph {
    fn from_parts(edges: Vec<Hyperedge>, names: Vec<String>, time_kind: TimeKind) -> Self {
        let incidence = build_incidence(&edges, names.len());
        TemporalHypergraph {
            edges,
            names,
            time_kind,
            incidence,
        }
    }

    /// Builds a hypergraph from numeric vertex ids and ready-to-use times.
    ///
    /// Vertices get synthetic names (`"v0"`, `"v1"`, ...); the vertex count is
    /// `max id + 1`. Times are taken as-is ([`TimeKind::Raw`]).
    pub fn from_numeric(
        members: Vec<Vec<u32>>,
        times: Vec<f64>,
        labels: Option<Vec<Vec<String>>>,
    ) -> Result<Self> {
        if members.len() != times.len() {
            return Err(Error::Parameter(format!(
                "members/times length mismatch: {} vs {}",
                members.len(),
                times.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != members.len() {
                return Err(Error::Parameter("labels length mismatch".into()));
            }
        }
        let mut max_vertex = 0u64;
        let mut edges = Vec::with_capacity(members.len());
        for (idx, (m, &t)) in members.iter().zip(&times).enumerate() {
            if m.is_empty() {
                return Err(Error::Schema {
                    line: idx + 1,
                    msg: "empty member set".into(),
                });
            }
            if !t.is_finite() {
                return Err(Error::Time {
                    edge: idx,
                    msg: format!("non-finite time {t}"),
                });
            }
            let mut mm: Vec<VertexId> = m.iter().map(|&v| VertexId(v)).collect();
            mm.sort_unstable();
            mm.dedup();
            max_vertex = max_vertex.max(*m.iter().max().unwrap() as u64 + 1);
            edges.push(Hyperedge {
                members: mm,
                time: t,
                labels: labels
                    .as_ref()
                    .map(|l| l[idx].clone())
                    .unwrap_or_default(),
                source_id: None,
                raw_time: None,
            });
        }
        let names = (0..max_vertex).map(|i| format!("v{i}")).collect();
        Ok(Self::from_parts(edges, names, TimeKind::Raw))
    }

    /// Parses JSON Lines: one object per line with `members` (array of
    /// strings), `time` (ISO-8601 date/datetime or number), optional `id`
    /// and `labels`. Empty member arrays are accepted here and removed by
    /// [`TemporalHypergraph::clean_authors`].
    pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut interner = NameInterner::default();
        let mut edges = Vec::new();
        let mut seen_ids: HashSet<String> = HashSet::new();
        let mut time_kind: Option<TimeKind> = None;

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value =
                serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            let record = parse_record(&value, lineno, &mut interner)?;
            if let Some(id) = &record.source_id {
                if !seen_ids.insert(id.clone()) {
                    return Err(Error::DuplicateId {
                        line: lineno,
                        id: id.clone(),
                    });
                }
            }
            match (time_kind, record.kind) {
                (None, k) => time_kind = Some(k),
                (Some(a), b) if a == b => {}
                (Some(_), _) => {
                    return Err(Error::Schema {
                        line: lineno,
                        msg: "time flavor mismatch: file mixes calendar and numeric times"
                            .into(),
                    });
                }
            }
            edges.push(record.edge);
        }
        let kind = time_kind.unwrap_or(TimeKind::Raw);
        Ok(Self::from_parts(edges, interner.names, kind))
    }

    /// Parses the two-file CSV form: `edges.csv` with header `id,time,labels`
    /// (labels `;`-separated) and `incidence.csv` with header
    /// `edge_id,member`.
    pub fn parse_csv<R1: Read, R2: Read>(edges_csv: R1, incidence_csv: R2) -> Result<Self> {
        let mut interner = NameInterner::default();
        let mut edges: Vec<Hyperedge> = Vec::new();
        let mut id_to_index: HashMap<String, usize> = HashMap::new();
        let mut time_kind: Option<TimeKind> = None;

        let mut rdr = csv::Reader::from_reader(edges_csv);
        for (row, rec) in rdr.records().enumerate() {
            let lineno = row + 2; // header is line 1
            let rec = rec.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let id = rec
                .get(0)
                .ok_or_else(|| schema(lineno, "missing id column"))?
                .to_string();
            let time_cell = rec
                .get(1)
                .ok_or_else(|| schema(lineno, "missing time column"))?;
            let (time, raw, kind) = parse_time_str(time_cell, lineno)?;
            match (time_kind, kind) {
                (None, k) => time_kind = Some(k),
                (Some(a), b) if a == b => {}
                (Some(_), _) => {
                    return Err(schema(lineno, "time flavor mismatch"));
                }
            }
            let labels: Vec<String> = rec
                .get(2)
                .map(|c| {
                    c.split(';')
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                })
                .unwrap_or_default();
            if id_to_index.insert(id.clone(), edges.len()).is_some() {
                return Err(Error::DuplicateId { line: lineno, id });
            }
            edges.push(Hyperedge {
                members: Vec::new(),
                time,
                labels,
                source_id: Some(id),
                raw_time: Some(raw),
            });
        }

        let mut rdr = csv::Reader::from_reader(incidence_csv);
        for (row, rec) in rdr.records().enumerate() {
            let lineno = row + 2;
            let rec = rec.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let edge_id = rec
                .get(0)
                .ok_or_else(|| schema(lineno, "missing edge_id column"))?;
            let member = rec
                .get(1)
                .ok_or_else(|| schema(lineno, "missing member column"))?;
            let &index = id_to_index
                .get(edge_id)
                .ok_or_else(|| schema(lineno, &format!("unknown edge id {edge_id:?}")))?;
            let v = interner.intern(member);
            edges[index].members.push(v);
        }
        for e in &mut edges {
            e.members.sort_unstable();
            e.members.dedup();
        }
        let kind = time_kind.unwrap_or(TimeKind::Raw);
        Ok(Self::from_parts(edges, interner.names, kind))
    }

    /// Re-emits the hypergraph in the JSON Lines input schema.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Record<'a> {
            #[serde(skip_serializing_if = "Option::is_none")]
            id: &'a Option<String>,
            members: Vec<&'a str>,
            time: serde_json::Value,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            labels: &'a Vec<String>,
        }
        for e in &self.edges {
            let time = match &e.raw_time {
                Some(v) => v.clone(),
                None => serde_json::Number::from_f64(e.time)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null),
            };
            let rec = Record {
                id: &e.source_id,
                members: e
                    .members
                    .iter()
                    .map(|&v| self.names[v.index()].as_str())
                    .collect(),
                time,
                labels: &e.labels,
            };
            serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Removes every vertex whose normalized name starts with `prefix`, then
    /// every edge left with no members. Remaining vertices and edges are
    /// re-indexed densely, preserving order.
    pub fn clean_authors(self, prefix: &str) -> Result<(Self, CleanReport)> {
        if prefix.is_empty() {
            return Err(Error::Parameter("clean prefix must be non-empty".into()));
        }
        let prefix = normalize_name(prefix);
        let mut vertex_map: Vec<Option<VertexId>> = vec![None; self.names.len()];
        let mut names = Vec::new();
        let mut removed_vertices = 0usize;
        for (old, name) in self.names.iter().enumerate() {
            if normalize_name(name).starts_with(&prefix) {
                removed_vertices += 1;
            } else {
                vertex_map[old] = Some(VertexId(names.len() as u32));
                names.push(name.clone());
            }
        }
        let mut removed_edges = 0usize;
        let mut kept_edges = Vec::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len());
        for (old_id, mut e) in self.edges.into_iter().enumerate() {
            let members: Vec<VertexId> = e
                .members
                .iter()
                .filter_map(|v| vertex_map[v.index()])
                .collect();
            if members.is_empty() {
                removed_edges += 1;
                continue;
            }
            e.members = members; // remap preserves sortedness
            kept_edges.push(old_id as EdgeId);
            edges.push(e);
        }
        let report = CleanReport {
            removed_vertices,
            removed_edges,
            kept_edges,
        };
        Ok((Self::from_parts(edges, names, self.time_kind), report))
    }

    /// Rebases every timestamp to elapsed time since the earliest edge, in
    /// `unit`. Idempotent for a fixed unit. Numeric inputs are taken to be in
    /// `unit` already and are only shifted.
    pub fn normalize_times(mut self, unit: TimeUnit) -> Result<Self> {
        let scale = match self.time_kind {
            TimeKind::EpochSeconds => match unit {
                TimeUnit::Days => 1.0 / SECONDS_PER_DAY,
                TimeUnit::Seconds => 1.0,
                TimeUnit::Months => 1.0 / (SECONDS_PER_DAY * DAYS_PER_MONTH),
            },
            TimeKind::Raw => 1.0,
            TimeKind::Normalized(u) if u == unit => 1.0,
            TimeKind::Normalized(u) => {
                return Err(Error::Parameter(format!(
                    "times already normalized to {}; cannot renormalize to {}",
                    u.as_str(),
                    unit.as_str()
                )));
            }
        };
        if let Some(min) = self
            .edges
            .iter()
            .map(|e| e.time)
            .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))))
        {
            for e in &mut self.edges {
                e.time = (e.time - min) * scale;
                e.raw_time = None;
            }
        }
        self.time_kind = TimeKind::Normalized(unit);
        self.incidence = build_incidence(&self.edges, self.names.len());
        Ok(self)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Hyperedge {
        &self.edges[id as usize]
    }

    pub fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    pub fn vertex_name(&self, v: VertexId) -> Result<&str> {
        self.names
            .get(v.index())
            .map(String::as_str)
            .ok_or(Error::UnknownVertex(v.0))
    }

    /// Edge ids incident to `v`, sorted by (time, edge id).
    pub fn incidence(&self, v: VertexId) -> Result<&[EdgeId]> {
        self.incidence
            .get(v.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownVertex(v.0))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        Ok(self.incidence(v)?.len())
    }

    pub fn edge_size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for e in &self.edges {
            *hist.entry(e.size()).or_insert(0usize) += 1;
        }
        hist
    }

    /// Counts edges per time bin of `bin_width` (bin k covers
    /// `[k*w, (k+1)*w)`).
    pub fn edge_time_histogram(&self, bin_width: f64) -> Result<BTreeMap<i64, usize>> {
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(Error::Parameter(format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        let mut hist = BTreeMap::new();
        for e in &self.edges {
            *hist.entry((e.time / bin_width).floor() as i64).or_insert(0) += 1;
        }
        Ok(hist)
    }
}

fn build_incidence(edges: &[Hyperedge], vertex_count: usize) -> Vec<Vec<EdgeId>> {
    let mut incidence: Vec<Vec<EdgeId>> = vec![Vec::new(); vertex_count];
    let mut order: Vec<EdgeId> = (0..edges.len() as EdgeId).collect();
    order.sort_by(|&a, &b| {
        edges[a as usize]
            .time
            .total_cmp(&edges[b as usize].time)
            .then(a.cmp(&b))
    });
    for &eid in &order {
        for v in &edges[eid as usize].members {
            incidence[v.index()].push(eid);
        }
    }
    incidence
}

fn schema(line: usize, msg: &str) -> Error {
    Error::Schema {
        line,
        msg: msg.to_string(),
    }
}

#[derive(Default)]
struct NameInterner {
    names: Vec<String>,
    lookup: HashMap<String, VertexId>,
}

impl NameInterner {
    fn intern(&mut self, raw: &str) -> VertexId {
        let key = normalize_name(raw);
        if let Some(&v) = self.lookup.get(&key) {
            return v;
        }
        let v = VertexId(self.names.len() as u32);
        self.names.push(raw.to_string());
        self.lookup.insert(key, v);
        v
    }
}

struct ParsedRecord {
    edge: Hyperedge,
    kind: TimeKind,
    source_id: Option<String>,
}

fn parse_record(
    value: &serde_json::Value,
    lineno: usize,
    interner: &mut NameInterner,
) -> Result<ParsedRecord> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema(lineno, "record is not a JSON object"))?;

    let members_value = obj
        .get("members")
        .ok_or_else(|| schema(lineno, "missing `members` field"))?;
    let members_arr = members_value
        .as_array()
        .ok_or_else(|| schema(lineno, "`members` is not an array"))?;
    let mut members = Vec::with_capacity(members_arr.len());
    for m in members_arr {
        let name = m
            .as_str()
            .ok_or_else(|| schema(lineno, "`members` entries must be strings"))?;
        members.push(interner.intern(name));
    }
    members.sort_unstable();
    members.dedup();

    let time_value = obj
        .get("time")
        .ok_or_else(|| schema(lineno, "missing `time` field"))?;
    let (time, kind) = match time_value {
        serde_json::Value::Number(n) => {
            let t = n
                .as_f64()
                .ok_or_else(|| schema(lineno, "`time` number out of range"))?;
            (t, TimeKind::Raw)
        }
        serde_json::Value::String(s) => {
            let (t, _, kind) = parse_time_str(s, lineno)?;
            (t, kind)
        }
        _ => return Err(schema(lineno, "`time` must be a string or a number")),
    };

    let labels = match obj.get("labels") {
        None | Some(serde_json::Value::Null) => Vec::new(),
        Some(serde_json::Value::Array(arr)) => {
            let mut labels = Vec::with_capacity(arr.len());
            for l in arr {
                labels.push(
                    l.as_str()
                        .ok_or_else(|| schema(lineno, "`labels` entries must be strings"))?
                        .to_string(),
                );
            }
            labels
        }
        Some(_) => return Err(schema(lineno, "`labels` is not an array")),
    };

    let source_id = match obj.get("id") {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema(lineno, "`id` must be a string")),
    };

    Ok(ParsedRecord {
        edge: Hyperedge {
            members,
            time,
            labels,
            source_id: source_id.clone(),
            raw_time: Some(time_value.clone()),
        },
        kind,
        source_id,
    })
}

/// Accepts `YYYY-MM-DD`, RFC 3339, or `YYYY-MM-DD[T ]HH:MM:SS` (taken as
/// UTC), or a plain number.
fn parse_time_str(s: &str, lineno: usize) -> Result<(f64, serde_json::Value, TimeKind)> {
    if let Ok(n) = s.parse::<f64>() {
        if n.is_finite() {
            return Ok((
                n,
                serde_json::Value::String(s.to_string()),
                TimeKind::Raw,
            ));
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        let secs = d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp() as f64;
        return Ok((
            secs,
            serde_json::Value::String(s.to_string()),
            TimeKind::EpochSeconds,
        ));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        let secs = dt.timestamp_millis() as f64 / 1000.0;
        return Ok((
            secs,
            serde_json::Value::String(s.to_string()),
            TimeKind::EpochSeconds,
        ));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            let secs = dt.and_utc().timestamp() as f64;
            return Ok((
                secs,
                serde_json::Value::String(s.to_string()),
                TimeKind::EpochSeconds,
            ));
        }
    }
    Err(schema(lineno, &format!("unparseable time {s:?}")))
}
