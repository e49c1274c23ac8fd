//! File formats: rank and matrix CSVs, reduced-matrix bundles, and
//! friendship graphs as GEXF 1.2 and DOT.
//!
//! Floating-point values are written with 17 significant digits so that a
//! write/read cycle reproduces every bit.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::friends::{Dominance, FriendshipGraph};
use crate::analysis::sensitivity::SensitivityResult;
use crate::analysis::theta::{EditionRankTable, ThetaEntry};
use crate::error::{Error, Result};
use crate::google::RankedNode;
use crate::reduced::{ReduceConfig, ReduceDiagnostics, ReducedMatrixSet};

pub const BUNDLE_COMPONENTS: [&str; 5] = ["GR", "Grr", "Gpr", "Gqrd", "Gqrnd"];

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `K,original_id,title,probability`.
pub fn write_rank_csv<W: Write>(out: W, ranked: &[RankedNode]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["K", "original_id", "title", "probability"])?;
    for r in ranked {
        w.write_record([
            r.k.to_string(),
            r.original_id.to_string(),
            r.label.clone().unwrap_or_default(),
            fmt17(r.probability),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads the `K` and `title` columns of a rank CSV into a rank table. Rows
/// without a title fall back to the original id.
pub fn read_rank_table(path: impl AsRef<Path>, edition_tag: &str) -> Result<EditionRankTable> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |names: &[&str]| headers.iter().position(|h| names.contains(&h));
    let k_col = col(&["K", "rank"]).ok_or_else(|| Error::Parse {
        path: path.into(),
        line: 1,
        msg: "missing K column".into(),
    })?;
    let name_col = col(&["title", "name"]);
    let id_col = col(&["original_id"]);
    let mut table = EditionRankTable {
        edition_tag: edition_tag.to_string(),
        entries: Default::default(),
    };
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |msg: String| Error::Parse {
            path: path.into(),
            line,
            msg,
        };
        let k: u32 = rec
            .get(k_col)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("invalid rank".into()))?;
        let name = name_col
            .and_then(|c| rec.get(c))
            .filter(|s| !s.is_empty())
            .or_else(|| id_col.and_then(|c| rec.get(c)))
            .ok_or_else(|| bad("row has neither title nor id".into()))?;
        if table.entries.insert(name.to_string(), k).is_some() {
            return Err(bad(format!("{name:?} listed twice")));
        }
    }
    Ok(table)
}

pub fn write_labeled_matrix<W: Write>(out: W, row_names: &[String], col_names: &[String], m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(col_names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in row_names.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(m.row(i).iter().map(|&x| fmt17(x)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Returns row names, column names and values.
pub fn read_labeled_matrix(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<String>, DMatrix<f64>)> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new().from_path(path)?;
    let cols: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |msg: String| Error::Parse {
            path: path.into(),
            line: i + 2,
            msg,
        };
        if rec.len() != cols.len() + 1 {
            return Err(bad(format!("expected {} fields, got {}", cols.len() + 1, rec.len())));
        }
        rows.push(rec[0].to_string());
        for field in rec.iter().skip(1) {
            values.push(field.parse::<f64>().map_err(|_| bad(format!("invalid number {field:?}")))?);
        }
    }
    let m = DMatrix::from_row_iterator(rows.len(), cols.len(), values);
    Ok((rows, cols, m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub alpha: f64,
    pub lambda_c: Option<f64>,
    pub tolerances: ReduceConfig,
    pub edition_tag: String,
    pub subset: Vec<String>,
    pub original_ids: Option<Vec<u64>>,
    pub dataset_checksum: Option<String>,
    pub diagnostics: ReduceDiagnostics,
    /// Damping applied when ranking `GR` itself.
    pub reduced_pagerank_damping: String,
    /// Caller-supplied provenance, e.g. the run configuration.
    #[serde(default)]
    pub provenance: serde_json::Value,
}

impl BundleMeta {
    pub fn for_set(rset: &ReducedMatrixSet, dataset_checksum: Option<String>, provenance: serde_json::Value) -> Self {
        BundleMeta {
            alpha: rset.alpha,
            lambda_c: rset.lambda_c,
            tolerances: rset.config,
            edition_tag: rset.edition_tag.clone(),
            subset: rset.names.clone(),
            original_ids: rset.original_ids.clone(),
            dataset_checksum,
            diagnostics: rset.diagnostics,
            reduced_pagerank_damping: "none".into(),
            provenance,
        }
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the five component CSVs and `meta.json` into `dir`.
pub fn write_bundle(dir: impl AsRef<Path>, rset: &ReducedMatrixSet, meta: &BundleMeta) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mats = [&rset.gr, &rset.grr, &rset.gpr, &rset.gqrd, &rset.gqrnd];
    for (name, m) in BUNDLE_COMPONENTS.iter().zip(mats) {
        let path = dir.join(format!("{name}.csv"));
        let mut w = create(&path)?;
        write_labeled_matrix(&mut w, &rset.names, &rset.names, m)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    write_json(dir.join("meta.json"), meta)
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<(ReducedMatrixSet, BundleMeta)> {
    let dir = dir.as_ref();
    let meta_path = dir.join("meta.json");
    let meta: BundleMeta = serde_json::from_reader(BufReader::new(
        File::open(&meta_path).map_err(|e| Error::io(&meta_path, e))?,
    ))?;
    let mut mats = Vec::with_capacity(5);
    for name in BUNDLE_COMPONENTS {
        let path = dir.join(format!("{name}.csv"));
        let (rows, cols, m) = read_labeled_matrix(&path)?;
        if rows != meta.subset || cols != meta.subset {
            return Err(Error::Mismatch(format!(
                "{} labels disagree with meta.json subset",
                path.display()
            )));
        }
        mats.push(m);
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().expect("five components");
    let rset = ReducedMatrixSet {
        names: meta.subset.clone(),
        original_ids: meta.original_ids.clone(),
        gr: next(),
        grr: next(),
        gpr: next(),
        gqrd: next(),
        gqrnd: next(),
        lambda_c: meta.lambda_c,
        alpha: meta.alpha,
        edition_tag: meta.edition_tag.clone(),
        config: meta.tolerances,
        diagnostics: meta.diagnostics,
    };
    Ok((rset, meta))
}

/// `theta_rank,name,theta,<one column per edition>`.
pub fn write_theta_csv<W: Write>(out: W, editions: &[String], scores: &[ThetaEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["theta_rank".into(), "name".into(), "theta".into()];
    header.extend(editions.iter().cloned());
    w.write_record(&header)?;
    for (i, e) in scores.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string(), e.name.clone(), e.theta.to_string()];
        rec.extend(e.ranks.iter().map(|r| r.map(|r| r.to_string()).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `name,D`.
pub fn write_sensitivity_csv<W: Write>(out: W, result: &SensitivityResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "D"])?;
    for (name, d) in result.names.iter().zip(&result.d) {
        w.write_record([name.as_str(), &fmt17(*d)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn color(d: Dominance) -> (&'static str, [u8; 3]) {
    match d {
        Dominance::Indirect => ("red", [255, 0, 0]),
        Dominance::Direct => ("black", [0, 0, 0]),
    }
}

/// GEXF 1.2 with `dominance` and `generation` edge attributes and edge
/// colors red (indirect) / black (direct).
pub fn friendship_to_gexf(g: &FriendshipGraph) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<gexf xmlns=\"http://gexf.net/1.2\" xmlns:viz=\"http://gexf.net/1.2/viz\" version=\"1.2\">\n");
    let _ = writeln!(
        s,
        "  <meta>\n    <description>friendship network from {}</description>\n  </meta>",
        xml_escape(&g.component.to_string())
    );
    s.push_str("  <graph mode=\"static\" defaultedgetype=\"directed\">\n");
    s.push_str("    <attributes class=\"edge\">\n");
    s.push_str("      <attribute id=\"dominance\" title=\"dominance\" type=\"string\"/>\n");
    s.push_str("      <attribute id=\"generation\" title=\"generation\" type=\"string\"/>\n");
    s.push_str("    </attributes>\n    <nodes>\n");
    for (i, n) in g.nodes.iter().enumerate() {
        let _ = writeln!(s, "      <node id=\"{i}\" label=\"{}\"/>", xml_escape(n));
    }
    s.push_str("    </nodes>\n    <edges>\n");
    for (k, e) in g.edges.iter().enumerate() {
        let (_, [r, gg, b]) = color(e.dominance);
        let _ = writeln!(
            s,
            "      <edge id=\"{k}\" source=\"{}\" target=\"{}\" weight=\"{}\">\n        <attvalues>\n          <attvalue for=\"dominance\" value=\"{}\"/>\n          <attvalue for=\"generation\" value=\"{}\"/>\n        </attvalues>\n        <viz:color r=\"{r}\" g=\"{gg}\" b=\"{b}\"/>\n      </edge>",
            e.source,
            e.target,
            fmt17(e.weight),
            e.dominance.as_str(),
            e.generation.as_str(),
        );
    }
    s.push_str("    </edges>\n  </graph>\n</gexf>\n");
    s
}

pub fn friendship_to_dot(g: &FriendshipGraph) -> String {
    let mut s = String::from("digraph friends {\n");
    for (i, n) in g.nodes.iter().enumerate() {
        let _ = writeln!(s, "  n{i} [label=\"{}\"];", dot_escape(n));
    }
    for e in &g.edges {
        let (name, _) = color(e.dominance);
        let _ = writeln!(
            s,
            "  n{} -> n{} [weight=\"{}\", color={name}, dominance={}, generation={}];",
            e.source,
            e.target,
            fmt17(e.weight),
            e.dominance.as_str(),
            e.generation.as_str(),
        );
    }
    s.push_str("}\n");
    s
}

pub fn write_to<W: Write>(mut out: W, text: &str) -> io::Result<()> {
    out.write_all(text.as_bytes())?;
    out.flush()
}
