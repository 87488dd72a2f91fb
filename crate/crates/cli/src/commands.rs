use std::fs;
use std::io::Write;
use std::path::Path;

use unembed::fixtures;
use unembed::geometry::{
    self, coargmax_feasible_with, coargmax_oracle_2d_margin, decision_regions, similarity_matrix,
    Bounds, FeasibilityReport, Metric, TieOptions, TieRule,
};
use unembed::io::{self, AnalysisReport, InputDescription, ModelFormat, TransformRecord};
use unembed::transforms::{
    self, cosine_forcing_translation, mean_vector, scale_pair, translate, verify_equivalence,
    ScalePair, TranslationVector,
};
use unembed::{EmbeddingBatch, Error, SoftmaxModel, UnembeddingSet};

use crate::{
    ForceCosineArgs, ModelArgs, RegionsArgs, SimilarityArgs, TiesArgs, TransformArgs,
    TransformOp, VerifyArgs,
};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_INCONSISTENT: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    /// Errors raised while reading a model file are all input errors.
    fn load(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_IO,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse { .. } => EXIT_IO,
            Error::Indeterminate(_) | Error::Inconsistency(_) => EXIT_INCONSISTENT,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

pub type CmdResult = std::result::Result<(), Failure>;

pub struct Loaded {
    pub model: SoftmaxModel,
    pub source: String,
}

pub fn resolve_format(path: &Path, explicit: Option<ModelFormat>) -> Result<ModelFormat, Failure> {
    explicit.or_else(|| ModelFormat::from_path(path)).ok_or_else(|| {
        Failure::new(
            EXIT_USAGE,
            format!("cannot tell the format of {}; pass --format", path.display()),
        )
    })
}

pub fn load_from(path: &Path, format: Option<ModelFormat>, embeddings: Option<&Path>) -> Result<SoftmaxModel, Failure> {
    let format = resolve_format(path, format)?;
    io::load_model(path, format, embeddings).map_err(Failure::load)
}

pub fn load(args: &ModelArgs) -> Result<Loaded, Failure> {
    match (&args.input, args.example) {
        (Some(path), _) => Ok(Loaded {
            model: load_from(path, args.format, args.embeddings.as_deref())?,
            source: path.display().to_string(),
        }),
        (None, Some(name)) => Ok(Loaded {
            model: fixtures::example(name).model,
            source: format!("example:{name}"),
        }),
        (None, None) => Err(Failure::new(EXIT_USAGE, "no model given")),
    }
}

/// Writes `text` to `path`, or stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::from(Error::Io(e)))
        }
    }
}

pub fn emit_report(report: &AnalysisReport, path: Option<&Path>) -> CmdResult {
    let mut text = report.to_json()?;
    text.push('\n');
    emit(&text, path)
}

/// Saves a model in the format implied by the output extension, falling back
/// to `fallback`.
pub fn save(m: &SoftmaxModel, path: &Path, fallback: Option<ModelFormat>) -> CmdResult {
    let format = ModelFormat::from_path(path).or(fallback).unwrap_or(ModelFormat::Json);
    io::save_model(m, path, format)?;
    Ok(())
}

fn input_format(args: &ModelArgs) -> Option<ModelFormat> {
    args.format
        .or_else(|| args.input.as_deref().and_then(ModelFormat::from_path))
}

/// The model's own embeddings, or seeded probe points when it has none.
pub fn probe_batch(m: &SoftmaxModel, seed: u64, n: usize) -> Result<EmbeddingBatch, Failure> {
    if m.embeddings().is_empty() {
        Ok(fixtures::probe_points(m.unembeddings(), seed, n)?)
    } else {
        Ok(m.embeddings().clone())
    }
}

fn label_list(u: &UnembeddingSet, ix: &[usize]) -> String {
    ix.iter().map(|&i| u.label(i)).collect::<Vec<_>>().join(", ")
}

pub fn similarity(a: SimilarityArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let mut report = AnalysisReport::for_input(InputDescription::of(loaded.source, &loaded.model));
    report
        .similarity
        .push(similarity_matrix(loaded.model.unembeddings(), a.metric)?);
    emit_report(&report, a.output.as_deref())
}

pub fn force_cosine(a: ForceCosineArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let m = &loaded.model;
    let u = m.unembeddings();
    let (i, j) = (a.pair[0], a.pair[1]);
    u.check_index(i)?;
    u.check_index(j)?;
    if i == j {
        return Err(Failure::new(EXIT_USAGE, "--pair needs two distinct labels"));
    }
    let v = cosine_forcing_translation(u.vector(i), u.vector(j), a.target)?;
    let moved = m.with_unembeddings(translate(u, &v)?)?;
    let before = geometry::cosine(u.vector(i), u.vector(j)).ok();
    let after = geometry::cosine(moved.unembeddings().vector(i), moved.unembeddings().vector(j)).ok();

    let points = probe_batch(m, a.seed, a.points)?;
    let eq = verify_equivalence(m, &moved, &points, a.tol)?;

    let mut report = AnalysisReport::for_input(InputDescription::of(loaded.source, m));
    report.transforms.push(TransformRecord::ForceCosine {
        pair: (i, j),
        target: a.target,
        vector: v.as_slice().to_vec(),
        cosine_before: before,
        cosine_after: after,
    });
    if let Ok(s) = similarity_matrix(moved.unembeddings(), Metric::Cosine) {
        report.similarity.push(s);
    }
    let pass = eq.pass;
    let max_diff = eq.max_prob_diff;
    report.equivalence.push(eq);

    save(&moved, &a.output, input_format(&a.model))?;
    emit_report(&report, a.report.as_deref())?;
    let show = |c: Option<f64>| c.map_or_else(|| "undefined".to_string(), |c| c.to_string());
    eprintln!(
        "cos({}, {}): {} -> {}; max |p - p'| = {max_diff:e} over {} points",
        u.label(i),
        u.label(j),
        show(before),
        show(after),
        points.len()
    );
    if !pass {
        return Err(Failure::new(
            EXIT_INCONSISTENT,
            format!("translated model differs by {max_diff:e}, tolerance {:e}", a.tol),
        ));
    }
    Ok(())
}

pub fn transform(a: TransformArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let m = &loaded.model;
    let u = m.unembeddings();
    let (out, record) = match a.op {
        TransformOp::Center => {
            let mean = mean_vector(u);
            (m.with_unembeddings(transforms::center(u))?, TransformRecord::Center { mean })
        }
        TransformOp::Normalize => (
            m.with_unembeddings(transforms::normalize_rows(u)?)?,
            TransformRecord::Normalize,
        ),
        TransformOp::Translate => {
            let vector = a
                .vector
                .clone()
                .ok_or_else(|| Failure::new(EXIT_USAGE, "--op translate needs --vector"))?;
            let v = TranslationVector::new(vector.clone())?;
            (m.with_unembeddings(translate(u, &v)?)?, TransformRecord::Translate { vector })
        }
        TransformOp::Scale => {
            let c = a
                .scale
                .ok_or_else(|| Failure::new(EXIT_USAGE, "--op scale needs --scale"))?;
            (scale_pair(m, ScalePair::new(c)?)?, TransformRecord::Scale { c })
        }
    };
    let mut report = AnalysisReport::for_input(InputDescription::of(loaded.source, m));
    report.transforms.push(record);
    save(&out, &a.output, input_format(&a.model))?;
    if let Some(path) = a.report.as_deref() {
        emit_report(&report, Some(path))?;
    }
    Ok(())
}

/// LP verdicts checked against the exact planar oracle. Pairs whose LP or
/// oracle margin is within `eps` of zero are too close to call and are
/// returned separately rather than counted as disagreements.
pub struct OracleCheck {
    pub disagreements: Vec<(usize, usize)>,
    pub borderline: Vec<(usize, usize)>,
}

pub fn check_against_oracle(
    u: &UnembeddingSet,
    reports: &[FeasibilityReport],
    eps: f64,
) -> Result<OracleCheck, Failure> {
    let mut check = OracleCheck {
        disagreements: Vec::new(),
        borderline: Vec::new(),
    };
    for r in reports {
        let (i, j) = r.pair;
        let margin = coargmax_oracle_2d_margin(u, i, j)?;
        if r.degenerate || margin.abs() <= eps {
            check.borderline.push(r.pair);
        } else if (margin > 0.0) != r.feasible {
            check.disagreements.push(r.pair);
        }
    }
    Ok(check)
}

pub fn ties(a: TiesArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let u = loaded.model.unembeddings();
    if !(a.eps.is_finite() && a.eps > 0.0) {
        return Err(Failure::new(EXIT_USAGE, "--eps must be positive"));
    }
    let opts = TieOptions {
        eps: a.eps,
        rule: if a.weak { TieRule::Weak } else { TieRule::Strict },
    };
    let reports = match a.label {
        Some(i) => {
            u.check_index(i)?;
            (0..u.k())
                .filter(|&j| j != i)
                .map(|j| coargmax_feasible_with(u, i, j, &opts))
                .collect::<unembed::Result<Vec<_>>>()?
        }
        None => geometry::all_tie_reports(u, &opts)?,
    };
    let oracle = if u.dim() == 2 {
        Some(check_against_oracle(u, &reports, a.eps)?)
    } else {
        None
    };

    if let Some(i) = a.label {
        let partners: Vec<usize> = reports
            .iter()
            .filter(|r| r.feasible)
            .map(|r| if r.pair.0 == i { r.pair.1 } else { r.pair.0 })
            .collect();
        eprintln!("{} can tie with {{{}}}", u.label(i), label_list(u, &partners));
    } else {
        let feasible = reports.iter().filter(|r| r.feasible).count();
        eprintln!("{feasible} of {} pairs can tie", reports.len());
    }
    let mut report = AnalysisReport::for_input(InputDescription::of(loaded.source, &loaded.model));
    report.feasibility = reports;
    emit_report(&report, a.output.as_deref())?;

    if let Some(check) = oracle {
        if !check.borderline.is_empty() {
            eprintln!("{} pair(s) too close to call against the exact oracle", check.borderline.len());
        }
        if !check.disagreements.is_empty() {
            let pairs: Vec<String> = check
                .disagreements
                .iter()
                .map(|&(i, j)| format!("({i}, {j})"))
                .collect();
            return Err(Failure::new(
                EXIT_INCONSISTENT,
                format!("LP and exact oracle disagree on {}", pairs.join(", ")),
            ));
        }
    }
    Ok(())
}

pub fn parse_bounds(values: &[f64]) -> Result<Bounds, Failure> {
    match values {
        &[x0, x1, y0, y1] => Ok(Bounds::new(x0, x1, y0, y1)?),
        _ => Err(Failure::new(
            EXIT_USAGE,
            format!("--bounds takes 4 numbers, got {}", values.len()),
        )),
    }
}

pub fn regions(a: RegionsArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let m = &loaded.model;
    if m.dim() != 2 {
        return Err(Failure::new(
            EXIT_USAGE,
            format!("region grids need d = 2, model has d = {}", m.dim()),
        ));
    }
    let bounds = match a.bounds.as_deref() {
        Some(v) => parse_bounds(v)?,
        None => Bounds::default_for(m)?,
    };
    let grid = decision_regions(m, &bounds, a.resolution, a.resolution)?;
    emit(&io::grid_csv(&grid), a.output.as_deref())
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let loaded = load(&a.model)?;
    let other = load_from(&a.other, a.other_format, None)?;
    let m = &loaded.model;
    let points = if !m.embeddings().is_empty() {
        m.embeddings().clone()
    } else {
        probe_batch(&other, a.seed, a.points)?
    };
    let eq = verify_equivalence(m, &other, &points, a.tol)?;
    let argmax_same = points
        .points()
        .iter()
        .map(|p| Ok(unembed::argmax_label(m, p)? == unembed::argmax_label(&other, p)?))
        .collect::<unembed::Result<Vec<bool>>>()?
        .into_iter()
        .all(|same| same);
    let pass = eq.pass && argmax_same;
    let max_diff = eq.max_prob_diff;
    let n = eq.num_points_checked;
    let mut report = AnalysisReport::for_input(InputDescription::of(loaded.source, m));
    report.equivalence.push(eq);
    emit_report(&report, a.output.as_deref())?;
    let verdict = if pass { "PASS" } else { "FAIL" };
    eprintln!("[{verdict}] max |p - p'| = {max_diff:e} over {n} points, argmax identical: {argmax_same}");
    if pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "models are not equivalent on the probe points"))
    }
}
