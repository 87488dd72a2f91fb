//! Model files, analysis reports and grid exports.
//!
//! CSV models hold one unembedding per row under the header
//! `label,dim_0,...,dim_{d-1}`; embeddings live in a second CSV with header
//! `point,dim_0,...,dim_{d-1}`. JSON models are a single object
//! `{"version": "1", "d", "labels", "unembeddings", "embeddings"?, "points"?}`.
//! Floats are written in shortest round-trip form, so saving then loading
//! reproduces every value bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FeasibilityReport, RegionGrid, SimilarityMatrix};
use crate::model::{EmbeddingBatch, SoftmaxModel, UnembeddingSet};
use crate::transforms::{CosineTarget, EquivalenceReport};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    Csv,
    Json,
}

impl ModelFormat {
    /// Guess from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(ModelFormat::Csv),
            "json" => Some(ModelFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ModelFormat::Csv),
            "json" => Ok(ModelFormat::Json),
            other => Err(Error::invalid(format!("unknown format `{other}`"))),
        }
    }
}

/// On-disk JSON layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: String,
    pub d: usize,
    pub labels: Vec<String>,
    pub unembeddings: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
}

impl ModelFile {
    pub fn from_model(m: &SoftmaxModel) -> Self {
        let e = m.embeddings();
        ModelFile {
            version: FORMAT_VERSION.to_string(),
            d: m.dim(),
            labels: m.unembeddings().labels().to_vec(),
            unembeddings: m.unembeddings().rows(),
            embeddings: (!e.is_empty()).then(|| e.points().to_vec()),
            points: e.names().map(<[String]>::to_vec),
        }
    }

    pub fn into_model(self) -> Result<SoftmaxModel> {
        if self.version != FORMAT_VERSION {
            return Err(Error::parse(
                "version",
                format!("unsupported version `{}`, expected `{FORMAT_VERSION}`", self.version),
            ));
        }
        let check_rows = |rows: &[Vec<f64>], what: &str| -> Result<()> {
            for (r, row) in rows.iter().enumerate() {
                if row.len() != self.d {
                    return Err(Error::parse(
                        format!("{what}[{r}]"),
                        format!("row has {} values, expected d = {}", row.len(), self.d),
                    ));
                }
            }
            Ok(())
        };
        check_rows(&self.unembeddings, "unembeddings")?;
        if self.labels.len() != self.unembeddings.len() {
            return Err(Error::parse(
                "labels",
                format!(
                    "{} labels for {} unembedding rows",
                    self.labels.len(),
                    self.unembeddings.len()
                ),
            ));
        }
        let u = UnembeddingSet::from_rows(self.labels, self.unembeddings)?;
        let e = match (self.embeddings, self.points) {
            (Some(rows), names) => {
                check_rows(&rows, "embeddings")?;
                match names {
                    Some(n) => EmbeddingBatch::with_names(self.d, rows, n)?,
                    None => EmbeddingBatch::new(self.d, rows)?,
                }
            }
            (None, Some(_)) => return Err(Error::parse("points", "point names without embeddings")),
            (None, None) => EmbeddingBatch::empty(self.d),
        };
        SoftmaxModel::new(u, e)
    }
}

/// A parsed CSV table: a `name` column followed by `dim_0..dim_{d-1}`.
struct NamedRows {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
    d: usize,
}

fn read_named_rows(reader: impl Read, first_column: &str, source: &str) -> Result<NamedRows> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(Error::parse(format!("{source}:1"), "empty file")),
        Some(r) => r.map_err(|e| Error::parse(format!("{source}:1"), e.to_string()))?,
    };
    let d = header.len().saturating_sub(1);
    let expected: Vec<String> = std::iter::once(first_column.to_string())
        .chain((0..d).map(|i| format!("dim_{i}")))
        .collect();
    if d == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::parse(
            format!("{source}:1"),
            format!(
                "header must be `{first_column},dim_0,...,dim_{{d-1}}`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(format!("{source}:{line}"), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d + 1 {
            return Err(Error::parse(
                format!("{source}:{line}"),
                format!("row has {} fields, header has {}", record.len(), d + 1),
            ));
        }
        names.push(record[0].trim().to_string());
        let row = (1..=d)
            .map(|f| {
                let text = record[f].trim();
                let value: f64 = text.parse().map_err(|_| {
                    Error::parse(
                        format!("{source}:{line}, field {}", f + 1),
                        format!("`{text}` is not a number"),
                    )
                })?;
                if !value.is_finite() {
                    return Err(Error::parse(
                        format!("{source}:{line}, field {}", f + 1),
                        format!("non-finite value `{text}`"),
                    ));
                }
                Ok(value)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(NamedRows { names, rows, d })
}

/// Loads a CSV model from an unembedding table and an optional embedding table.
pub fn load_csv_model(unembeddings: impl Read, embeddings: Option<impl Read>) -> Result<SoftmaxModel> {
    let u_rows = read_named_rows(unembeddings, "label", "unembeddings")?;
    let d = u_rows.d;
    let u = UnembeddingSet::from_rows(u_rows.names, u_rows.rows)?;
    let e = match embeddings {
        None => EmbeddingBatch::empty(d),
        Some(r) => {
            let e_rows = read_named_rows(r, "point", "embeddings")?;
            if e_rows.d != d {
                return Err(Error::parse(
                    "embeddings:1",
                    format!("{} dimensions, unembeddings have {d}", e_rows.d),
                ));
            }
            EmbeddingBatch::with_names(d, e_rows.rows, e_rows.names)?
        }
    };
    SoftmaxModel::new(u, e)
}

pub fn load_json_model(reader: impl Read) -> Result<SoftmaxModel> {
    let file: ModelFile = serde_json::from_reader(reader).map_err(|e| {
        Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    file.into_model()
}

/// Loads `path`; for CSV, `embeddings` names the optional point table.
pub fn load_model(path: &Path, format: ModelFormat, embeddings: Option<&Path>) -> Result<SoftmaxModel> {
    let open = |p: &Path| {
        fs::File::open(p).map_err(|e| Error::parse(p.display().to_string(), e.to_string()))
    };
    match format {
        ModelFormat::Json => {
            if embeddings.is_some() {
                return Err(Error::invalid("JSON models carry their own embeddings"));
            }
            load_json_model(open(path)?)
        }
        ModelFormat::Csv => {
            let e = embeddings.map(open).transpose()?;
            load_csv_model(open(path)?, e)
        }
    }
}

fn csv_number(x: f64) -> String {
    // Debug formatting is the shortest string that parses back to `x`.
    format!("{x:?}")
}

fn write_named_rows(
    mut w: impl Write,
    first_column: &str,
    names: &[String],
    rows: &[Vec<f64>],
    d: usize,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(&mut w);
    let header: Vec<String> = std::iter::once(first_column.to_string())
        .chain((0..d).map(|i| format!("dim_{i}")))
        .collect();
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wtr.write_record(&header).map_err(csv_err)?;
    for (name, row) in names.iter().zip(rows) {
        let fields = std::iter::once(name.clone()).chain(row.iter().map(|&x| csv_number(x)));
        wtr.write_record(fields).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_unembeddings(w: impl Write, u: &UnembeddingSet) -> Result<()> {
    write_named_rows(w, "label", u.labels(), &u.rows(), u.dim())
}

/// Unnamed points are written as `p0`, `p1`, ...
pub fn write_csv_embeddings(w: impl Write, e: &EmbeddingBatch) -> Result<()> {
    let names: Vec<String> = match e.names() {
        Some(n) => n.to_vec(),
        None => (0..e.len()).map(|i| format!("p{i}")).collect(),
    };
    write_named_rows(w, "point", &names, e.points(), e.dim())
}

pub fn write_json_model(mut w: impl Write, m: &SoftmaxModel) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &ModelFile::from_model(m)).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// Companion embeddings path for a CSV model: `model.csv` → `model.embeddings.csv`.
pub fn embeddings_path_for(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.embeddings.csv"))
}

/// Writes `m` to `path`. CSV models with embeddings also write
/// [`embeddings_path_for`]`(path)`; the paths written are returned.
pub fn save_model(m: &SoftmaxModel, path: &Path, format: ModelFormat) -> Result<Vec<PathBuf>> {
    match format {
        ModelFormat::Json => {
            write_json_model(fs::File::create(path)?, m)?;
            Ok(vec![path.to_path_buf()])
        }
        ModelFormat::Csv => {
            write_csv_unembeddings(fs::File::create(path)?, m.unembeddings())?;
            let mut written = vec![path.to_path_buf()];
            if !m.embeddings().is_empty() {
                let e_path = embeddings_path_for(path);
                write_csv_embeddings(fs::File::create(&e_path)?, m.embeddings())?;
                written.push(e_path);
            }
            Ok(written)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescription {
    pub source: String,
    pub k: usize,
    pub d: usize,
    pub num_embeddings: usize,
}

impl InputDescription {
    pub fn of(source: impl Into<String>, m: &SoftmaxModel) -> Self {
        InputDescription {
            source: source.into(),
            k: m.k(),
            d: m.dim(),
            num_embeddings: m.embeddings().len(),
        }
    }
}

/// One applied transform, in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformRecord {
    Translate {
        vector: Vec<f64>,
    },
    Center {
        mean: Vec<f64>,
    },
    Normalize,
    Scale {
        c: f64,
    },
    ForceCosine {
        pair: (usize, usize),
        target: CosineTarget,
        vector: Vec<f64>,
        /// `None` when either vector is zero and the cosine is undefined.
        cosine_before: Option<f64>,
        cosine_after: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: Option<InputDescription>,
    pub transforms: Vec<TransformRecord>,
    pub similarity: Vec<SimilarityMatrix>,
    pub feasibility: Vec<FeasibilityReport>,
    pub equivalence: Vec<EquivalenceReport>,
}

impl AnalysisReport {
    pub fn for_input(input: InputDescription) -> Self {
        AnalysisReport {
            input: Some(input),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.into()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })
    }
}

pub fn save_report(report: &AnalysisReport, path: &Path) -> Result<()> {
    let mut text = report.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Grid as CSV, header `x,y,label_index`, one row per cell centre.
pub fn grid_csv(grid: &RegionGrid) -> String {
    let mut out = String::with_capacity(grid.len() * 24 + 20);
    out.push_str("x,y,label_index\n");
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let (x, y) = grid.cell_center(ix, iy);
            let _ = writeln!(out, "{},{},{}", csv_number(x), csv_number(y), grid.label_at(ix, iy));
        }
    }
    out
}

pub fn export_grid_csv(grid: &RegionGrid, mut w: impl Write) -> Result<()> {
    w.write_all(grid_csv(grid).as_bytes())?;
    w.flush()?;
    Ok(())
}
