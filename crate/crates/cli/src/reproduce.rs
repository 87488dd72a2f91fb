//! `unembed reproduce`: rebuild a built-in example, write its artifacts and
//! compare every computed value with the stated one.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use unembed::fixtures::{self, ExampleName};
use unembed::geometry::{
    all_tie_reports, decision_regions, similarity_matrix, Bounds, Metric, TieOptions,
};
use unembed::io::{self, AnalysisReport, InputDescription, ModelFormat, TransformRecord};
use unembed::transforms::{equivalent_model_pair, verify_equivalence, CosineTarget, TranslationVector};
use unembed::{Error, SoftmaxModel};

use crate::commands::{check_against_oracle, CmdResult, Failure, EXIT_CHECK};
use crate::ReproduceArgs;

#[derive(Default)]
struct Summary {
    text: String,
    failures: usize,
}

impl Summary {
    fn check(&mut self, pass: bool, line: impl AsRef<str>) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let _ = writeln!(self.text, "[{tag}] {}", line.as_ref());
        if !pass {
            self.failures += 1;
        }
    }

    fn note(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.text, "note: {}", line.as_ref());
    }
}

fn write_model(m: &SoftmaxModel, dir: &Path, stem: &str) -> Result<(), Error> {
    io::save_model(m, &dir.join(format!("{stem}.json")), ModelFormat::Json)?;
    io::save_model(m, &dir.join(format!("{stem}.csv")), ModelFormat::Csv)?;
    Ok(())
}

fn write_grid(m: &SoftmaxModel, bounds: &Bounds, n: usize, path: &Path) -> Result<String, Error> {
    let text = io::grid_csv(&decision_regions(m, bounds, n, n)?);
    fs::write(path, &text)?;
    Ok(text)
}

fn fmt_set(ix: impl IntoIterator<Item = usize>) -> String {
    let inner: Vec<String> = ix.into_iter().map(|i| format!("l{i}")).collect();
    format!("{{{}}}", inner.join(", "))
}

pub fn run(a: ReproduceArgs) -> CmdResult {
    if a.points == 0 || a.resolution < 2 {
        return Err(Failure::new(
            crate::commands::EXIT_USAGE,
            "--points must be positive and --resolution at least 2",
        ));
    }
    let dir = a.outdir.as_path();
    fs::create_dir_all(dir).map_err(|e| Failure::from(Error::Io(e)))?;
    let ex = fixtures::example(a.name);
    let model = ex.with_synthetic_cloud(a.seed, a.points)?;
    let u = model.unembeddings();
    let source = format!("example:{}", a.name);
    let mut summary = Summary::default();
    let _ = writeln!(summary.text, "example {} (k = {}, d = {})", a.name, u.k(), u.dim());
    for note in &ex.notes {
        summary.note(note);
    }

    for outcome in ex.check_all()? {
        summary.check(
            outcome.pass,
            format!(
                "{}: expected {}, computed {}",
                outcome.description, outcome.expected, outcome.computed
            ),
        );
    }

    write_model(&model, dir, "model")?;
    let mut sim = AnalysisReport::for_input(InputDescription::of(&source, &model));
    for metric in [Metric::Cosine, Metric::Dot, Metric::Euclidean] {
        sim.similarity.push(similarity_matrix(u, metric)?);
    }
    io::save_report(&sim, &dir.join("similarity.json"))?;

    let opts = TieOptions::default();
    let reports = all_tie_reports(u, &opts)?;
    let check = check_against_oracle(u, &reports, opts.eps)?;
    summary.check(
        check.disagreements.is_empty(),
        format!(
            "LP and exact oracle agree on {} of {} pairs ({} too close to call)",
            reports.len() - check.disagreements.len() - check.borderline.len(),
            reports.len() - check.borderline.len(),
            check.borderline.len()
        ),
    );
    let mut ties = AnalysisReport::for_input(InputDescription::of(&source, &model));
    ties.feasibility = reports;
    io::save_report(&ties, &dir.join("ties.json"))?;

    let bounds = Bounds::default_for(&model)?;
    let n = a.resolution;
    let grid = write_grid(&model, &bounds, n, &dir.join("grid.csv"))?;

    match a.name {
        ExampleName::Unrestricted => {
            let pair = equivalent_model_pair(&model, 0, 1)?;
            let expected_shift = TranslationVector::new(vec![-0.75, -0.75])?;
            summary.check(
                pair.antipodal_shift == expected_shift,
                format!("antipodal translation v = {:?}", pair.antipodal_shift.as_slice()),
            );
            let mut eq = AnalysisReport::for_input(InputDescription::of(&source, &model));
            for (name, moved, shift, target) in [
                ("antipodal", &pair.antipodal, &pair.antipodal_shift, CosineTarget::Antipodal),
                ("collinear", &pair.collinear, &pair.collinear_shift, CosineTarget::Collinear),
            ] {
                write_model(moved, dir, name)?;
                let mu = moved.unembeddings();
                let after = unembed::geometry::cosine(mu.vector(0), mu.vector(1))?;
                eq.transforms.push(TransformRecord::ForceCosine {
                    pair: (0, 1),
                    target,
                    vector: shift.as_slice().to_vec(),
                    cosine_before: unembed::geometry::cosine(u.vector(0), u.vector(1)).ok(),
                    cosine_after: Some(after),
                });
                eq.similarity.push(similarity_matrix(mu, Metric::Cosine)?);
                let report = verify_equivalence(&model, moved, model.embeddings(), a.tol)?;
                summary.check(
                    report.pass,
                    format!(
                        "{name} model equivalent: max |p - p'| = {:.3e} over {} points",
                        report.max_prob_diff, report.num_points_checked
                    ),
                );
                eq.equivalence.push(report);

                let moved_grid =
                    write_grid(moved, &Bounds::default_for(moved)?, n, &dir.join(format!("grid_{name}.csv")))?;
                summary.check(
                    moved_grid == grid,
                    format!("{name} decision-region grid ({n}x{n}) identical to the original"),
                );
            }
            io::save_report(&eq, &dir.join("equivalence.json"))?;
        }
        ExampleName::Centered => {
            let regions = decision_regions(&model, &bounds, n, n)?;
            let width = bounds.x_max - bounds.x_min;
            let adjacent = regions.adjacent_labels(2, 0.05 * width);
            summary.check(
                adjacent.iter().copied().eq([1, 3]),
                format!("grid: region of l2 borders {} (expected {{l1, l3}})", fmt_set(adjacent)),
            );
        }
        ExampleName::CenteredUnit => {
            let printed = SoftmaxModel::from_unembeddings(fixtures::centered_unit_unembeddings_as_printed());
            write_model(&printed, dir, "model_as_printed")?;
            let offset = fixtures::sum_norm(printed.unembeddings());
            summary.note(format!(
                "published vectors sum to a vector of norm {offset:.6}; they are not centered"
            ));
        }
    }

    let verdict = if summary.failures == 0 { "all checks passed" } else { "some checks FAILED" };
    let _ = writeln!(summary.text, "{verdict} ({} failed)", summary.failures);
    fs::write(dir.join("summary.txt"), &summary.text).map_err(|e| Failure::from(Error::Io(e)))?;
    print!("{}", summary.text);
    if summary.failures > 0 {
        return Err(Failure::new(EXIT_CHECK, format!("{} check(s) failed", summary.failures)));
    }
    Ok(())
}
