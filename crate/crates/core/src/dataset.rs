//! JSON-lines dataset format, query files and committed fixtures.
//!
//! Dataset: one object per line,
//! `{"id": "o1", "x": 3.0, "y": 4.0, "terms": {"t1": 2.0}}`.
//! Query file: the same schema without `id`.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::object::{Point, QueryObject, StObject, TermVector};
use crate::similarity::SimParams;
use crate::tree::{IurTree, Layout};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    id: String,
    x: f64,
    y: f64,
    #[serde(default)]
    terms: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryRecord {
    x: f64,
    y: f64,
    #[serde(default)]
    terms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub k: usize,
    pub alpha: f64,
    pub fanout: usize,
}

fn term_vector(terms: BTreeMap<String, f64>) -> std::result::Result<TermVector, String> {
    let mut v = TermVector::new();
    for (t, w) in terms {
        if !w.is_finite() || w < 0.0 {
            return Err(format!("term `{t}` has invalid weight {w}"));
        }
        v.set(t, w);
    }
    Ok(v)
}

fn terms_map(v: &TermVector) -> BTreeMap<String, f64> {
    v.iter().map(|(t, w)| (t.to_string(), w)).collect()
}

fn check_point(x: f64, y: f64) -> std::result::Result<Point, String> {
    if x.is_finite() && y.is_finite() {
        Ok(Point::new(x, y))
    } else {
        Err("coordinates must be finite".into())
    }
}

/// Parses a JSON-lines dataset. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn parse_dataset(text: &str) -> Result<Vec<StObject>> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let rec: ObjectRecord = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let loc = check_point(rec.x, rec.y).map_err(parse_err)?;
        let vct = term_vector(rec.terms).map_err(parse_err)?;
        if !ids.insert(rec.id.clone()) {
            return Err(parse_err(format!("duplicate id `{}`", rec.id)));
        }
        out.push(StObject::new(rec.id, loc, vct));
    }
    Ok(out)
}

pub fn dataset_to_jsonl(objects: &[StObject]) -> String {
    let mut out = String::new();
    for o in objects {
        let rec = ObjectRecord {
            id: o.id.clone(),
            x: o.loc.x,
            y: o.loc.y,
            terms: terms_map(&o.vct),
        };
        out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        out.push('\n');
    }
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_dataset(path: &Path) -> Result<Vec<StObject>> {
    parse_dataset(&read(path)?)
}

pub fn write_dataset(path: &Path, objects: &[StObject]) -> Result<()> {
    write(path, &dataset_to_jsonl(objects))
}

/// Parses `t1=2,t2=5`. An empty string is the empty vector.
pub fn parse_query_terms(spec: &str) -> Result<TermVector> {
    let mut terms = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (t, w) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("expected term=weight, got `{part}`")))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad weight in `{part}`")))?;
        terms.insert(t.trim().to_string(), w);
    }
    term_vector(terms).map_err(Error::InvalidParams)
}

pub fn parse_query(text: &str) -> Result<QueryObject> {
    let rec: QueryRecord = serde_json::from_str(text.trim()).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let perr = |message: String| Error::Parse { line: 1, message };
    Ok(QueryObject::new(
        check_point(rec.x, rec.y).map_err(perr)?,
        term_vector(rec.terms).map_err(perr)?,
    ))
}

pub fn query_to_json(q: &QueryObject) -> String {
    let rec = QueryRecord {
        x: q.loc.x,
        y: q.loc.y,
        terms: terms_map(&q.vct),
    };
    serde_json::to_string(&rec).expect("query serializes") + "\n"
}

pub fn read_query(path: &Path) -> Result<QueryObject> {
    parse_query(&read(path)?)
}

/// A self-contained query instance: dataset, query and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub objects: Vec<StObject>,
    pub query: QueryObject,
    pub params: SimParams,
    pub fanout: usize,
    /// Explicit tree shape; `None` means bulk loading with `fanout`.
    pub layout: Option<Layout>,
}

impl Fixture {
    pub const DATASET_FILE: &'static str = "dataset.jsonl";
    pub const QUERY_FILE: &'static str = "query.json";
    pub const PARAMS_FILE: &'static str = "params.json";
    pub const LAYOUT_FILE: &'static str = "layout.json";

    pub fn tree(&self) -> Result<IurTree> {
        match &self.layout {
            Some(layout) => IurTree::from_layout(self.objects.clone(), layout),
            None => IurTree::build(self.objects.clone(), self.fanout),
        }
    }

    /// Writes `dataset.jsonl`, `query.json` and `params.json` into `dir`,
    /// creating it if needed.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_dataset(&dir.join(Self::DATASET_FILE), &self.objects)?;
        write(&dir.join(Self::QUERY_FILE), &query_to_json(&self.query))?;
        let params = FixtureParams {
            k: self.params.k,
            alpha: self.params.alpha,
            fanout: self.fanout,
        };
        write(
            &dir.join(Self::PARAMS_FILE),
            &(serde_json::to_string(&params).expect("params serialize") + "\n"),
        )?;
        if let Some(layout) = &self.layout {
            write(
                &dir.join(Self::LAYOUT_FILE),
                &(serde_json::to_string(layout).expect("layout serializes") + "\n"),
            )?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Fixture> {
        let objects = read_dataset(&dir.join(Self::DATASET_FILE))?;
        let query = read_query(&dir.join(Self::QUERY_FILE))?;
        let params_path = dir.join(Self::PARAMS_FILE);
        let p: FixtureParams =
            serde_json::from_str(&read(&params_path)?).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        let layout_path = dir.join(Self::LAYOUT_FILE);
        let layout = if layout_path.exists() {
            Some(
                serde_json::from_str(&read(&layout_path)?).map_err(|e| Error::Parse {
                    line: e.line(),
                    message: e.to_string(),
                })?,
            )
        } else {
            None
        };
        Ok(Fixture {
            objects,
            query,
            params: SimParams::new(p.alpha, p.k)?,
            fanout: p.fanout,
            layout,
        })
    }
}
