//! Similarity metrics between unembeddings, neighbour structure, co-argmax
//! feasibility and decision-region grids.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpStatus};
use crate::model::{self, dot_slices, LabelVector, SoftmaxModel, UnembeddingSet};

/// Default margin threshold for a strict tie verdict.
pub const DEFAULT_TIE_EPS: f64 = 1e-7;

/// Margins at or below this are treated as solver noise around zero.
pub const MARGIN_NOISE_FLOOR: f64 = 1e-9;

/// Acceptable gap between the two tied logits at a returned witness.
pub const WITNESS_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cosine,
    Dot,
    Euclidean,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::Dot => "dot",
            Metric::Euclidean => "euclidean",
        }
    }

    /// Similarities rank high-first, distances low-first.
    fn is_distance(self) -> bool {
        matches!(self, Metric::Euclidean)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "dot" => Ok(Metric::Dot),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}

fn check_dims(a: &LabelVector, b: &LabelVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

pub fn dot(a: &LabelVector, b: &LabelVector) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot_slices(a.as_slice(), b.as_slice()))
}

pub fn euclidean(a: &LabelVector, b: &LabelVector) -> Result<f64> {
    check_dims(a, b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `a·b / (‖a‖‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine(a: &LabelVector, b: &LabelVector) -> Result<f64> {
    check_dims(a, b)?;
    let (a, b) = (a.as_slice(), b.as_slice());
    let aa = dot_slices(a, a);
    let bb = dot_slices(b, b);
    if aa == 0.0 || bb == 0.0 {
        return Err(Error::ZeroVector {
            label: if aa == 0.0 { "first argument" } else { "second argument" }.to_string(),
        });
    }
    // One square root of the product keeps equal-norm pairs exact.
    let c = dot_slices(a, b) / (aa * bb).sqrt();
    Ok(c.clamp(-1.0, 1.0))
}

fn pairwise(metric: Metric, a: &LabelVector, b: &LabelVector) -> Result<f64> {
    match metric {
        Metric::Cosine => cosine(a, b),
        Metric::Dot => dot(a, b),
        Metric::Euclidean => euclidean(a, b),
    }
}

fn check_no_zero(u: &UnembeddingSet) -> Result<()> {
    match u.vectors().iter().position(LabelVector::is_zero) {
        Some(i) => Err(Error::ZeroVector {
            label: u.label(i).to_string(),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub metric: Metric,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }
}

pub fn similarity_matrix(u: &UnembeddingSet, metric: Metric) -> Result<SimilarityMatrix> {
    if metric == Metric::Cosine {
        check_no_zero(u)?;
    }
    let k = u.k();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = pairwise(metric, u.vector(i), u.vector(j))?;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    if metric == Metric::Cosine {
        for (i, row) in values.iter_mut().enumerate() {
            row[i] = 1.0;
        }
    }
    Ok(SimilarityMatrix {
        metric,
        labels: u.labels().to_vec(),
        values,
    })
}

/// The `m` labels other than `i`, best first; ties go to the lower index.
pub fn nearest_neighbors(
    u: &UnembeddingSet,
    i: usize,
    metric: Metric,
    m: usize,
) -> Result<Vec<usize>> {
    u.check_index(i)?;
    if m >= u.k() {
        return Err(Error::invalid(format!(
            "asked for {m} neighbours among {} labels",
            u.k()
        )));
    }
    if metric == Metric::Cosine {
        check_no_zero(u)?;
    }
    let mut scored = (0..u.k())
        .filter(|&j| j != i)
        .map(|j| Ok((j, pairwise(metric, u.vector(i), u.vector(j))?)))
        .collect::<Result<Vec<(usize, f64)>>>()?;
    scored.sort_by(|(ja, a), (jb, b)| {
        let by_score = if metric.is_distance() {
            a.partial_cmp(b)
        } else {
            b.partial_cmp(a)
        };
        by_score.unwrap_or(Ordering::Equal).then(ja.cmp(jb))
    });
    Ok(scored.into_iter().take(m).map(|(j, _)| j).collect())
}

/// How a tie between two labels is decided from the LP margin `t*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// `t* > eps`: the pair jointly beats every other label by a margin.
    #[default]
    Strict,
    /// `t* > MARGIN_NOISE_FLOOR`: accepts margins inside the degenerate band.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieOptions {
    pub eps: f64,
    pub rule: TieRule,
}

impl Default for TieOptions {
    fn default() -> Self {
        TieOptions {
            eps: DEFAULT_TIE_EPS,
            rule: TieRule::Strict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub pair: (usize, usize),
    pub labels: (String, String),
    pub feasible: bool,
    /// Embedding point at which the pair ties and dominates; present iff feasible.
    pub witness: Option<Vec<f64>>,
    /// Optimal LP objective `t*`.
    pub margin: f64,
    /// `t*` lies in `(MARGIN_NOISE_FLOOR, eps]`, too small to call either way
    /// with confidence.
    pub degenerate: bool,
    pub rule: TieRule,
    pub eps: f64,
}

pub fn coargmax_feasible(
    u: &UnembeddingSet,
    i: usize,
    j: usize,
    eps: f64,
) -> Result<FeasibilityReport> {
    coargmax_feasible_with(
        u,
        i,
        j,
        &TieOptions {
            eps,
            rule: TieRule::Strict,
        },
    )
}

/// Decides whether some embedding `f` gives `f·g_i = f·g_j > f·g_k` for every
/// other label `k`.
///
/// Solved as: maximise `t` subject to `(g_i - g_j)·f = 0`,
/// `(g_i - g_k)·f >= t` for `k ∉ {i, j}` and `-1 <= f_m <= 1`. The system is
/// homogeneous in `f`, so any witness can be rescaled into the box and
/// restricting to the box loses nothing except the scale of `t*`. `f = 0`
/// with `t = 0` is always feasible, so `t* >= 0` and an infeasible pair
/// returns `t* = 0` up to round-off. The threshold is absolute: unembeddings
/// of very small magnitude yield proportionally small margins.
pub fn coargmax_feasible_with(
    u: &UnembeddingSet,
    i: usize,
    j: usize,
    opts: &TieOptions,
) -> Result<FeasibilityReport> {
    if !(opts.eps.is_finite() && opts.eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {}", opts.eps)));
    }
    let program = lp::coargmax_lp(u, i, j)?;
    let solution = lp::solve(&program)?;
    match solution.status {
        LpStatus::Optimal => {}
        status => {
            return Err(Error::Indeterminate(format!(
                "co-argmax LP for pair ({i}, {j}) ended with status {status:?}"
            )))
        }
    }
    let d = u.dim();
    let margin = solution.objective;
    let threshold = match opts.rule {
        TieRule::Strict => opts.eps,
        TieRule::Weak => MARGIN_NOISE_FLOOR,
    };
    let feasible = margin > threshold;
    let degenerate = margin > MARGIN_NOISE_FLOOR && margin <= opts.eps;
    let witness = feasible.then(|| solution.x[..d].to_vec());
    Ok(FeasibilityReport {
        pair: (i, j),
        labels: (u.label(i).to_string(), u.label(j).to_string()),
        feasible,
        witness,
        margin,
        degenerate,
        rule: opts.rule,
        eps: opts.eps,
    })
}

/// Exact two-dimensional decision for the same question as
/// [`coargmax_feasible`].
///
/// The tie line `{f : (g_i - g_j)·f = 0}` is spanned by one direction `w`, so
/// by homogeneity only `w` and `-w` need checking.
pub fn coargmax_oracle_2d(u: &UnembeddingSet, i: usize, j: usize) -> Result<bool> {
    Ok(coargmax_oracle_2d_margin(u, i, j)? > 0.0)
}

/// Best of `min_k (g_i - g_k)·u` over the two unit directions `u = ±w` on the
/// tie line, `+inf` when there are no competing labels.
pub fn coargmax_oracle_2d_margin(u: &UnembeddingSet, i: usize, j: usize) -> Result<f64> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    u.check_index(i)?;
    u.check_index(j)?;
    if i == j {
        return Err(Error::invalid("tie query needs two distinct labels"));
    }
    let gi = u.vector(i).as_slice();
    let gj = u.vector(j).as_slice();
    let (dx, dy) = (gi[0] - gj[0], gi[1] - gj[1]);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return Err(Error::EqualVectors);
    }
    let w = [-dy / len, dx / len];
    let side = |sign: f64| {
        (0..u.k())
            .filter(|&k| k != i && k != j)
            .map(|k| {
                let gk = u.vector(k).as_slice();
                sign * ((gi[0] - gk[0]) * w[0] + (gi[1] - gk[1]) * w[1])
            })
            .fold(f64::INFINITY, f64::min)
    };
    Ok(side(1.0).max(side(-1.0)))
}

/// Every `j != i` that can tie with `i` for the highest probability.
pub fn tie_partners(u: &UnembeddingSet, i: usize, opts: &TieOptions) -> Result<Vec<usize>> {
    u.check_index(i)?;
    let mut partners = Vec::new();
    for j in (0..u.k()).filter(|&j| j != i) {
        if coargmax_feasible_with(u, i, j, opts)?.feasible {
            partners.push(j);
        }
    }
    Ok(partners)
}

/// All unordered pairs `(i, j)`, `i < j`.
pub fn all_tie_reports(u: &UnembeddingSet, opts: &TieOptions) -> Result<Vec<FeasibilityReport>> {
    let mut out = Vec::new();
    for i in 0..u.k() {
        for j in i + 1..u.k() {
            out.push(coargmax_feasible_with(u, i, j, opts)?);
        }
    }
    Ok(out)
}

/// Axis-aligned rectangle in the embedding plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Growth applied to a bounding box when deriving default bounds.
pub const DEFAULT_INFLATION: f64 = 0.5;

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let all = [x_min, x_max, y_min, y_max];
        if all.iter().any(|v| !v.is_finite()) || x_min >= x_max || y_min >= y_max {
            return Err(Error::invalid(format!(
                "bounds need finite min < max per axis, got x [{x_min}, {x_max}] y [{y_min}, {y_max}]"
            )));
        }
        Ok(Bounds {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Bounding box of `points`, widened about its centre so each side is
    /// `1 + inflation` times as long. Zero-width axes get unit width first.
    pub fn enclosing<'a>(
        points: impl IntoIterator<Item = &'a [f64]>,
        inflation: f64,
    ) -> Result<Self> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut any = false;
        for p in points {
            if p.len() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: p.len(),
                });
            }
            any = true;
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if !any {
            return Err(Error::invalid("cannot bound an empty point set"));
        }
        let mut out = [(0.0, 0.0); 2];
        for a in 0..2 {
            let centre = 0.5 * (lo[a] + hi[a]);
            let width = if hi[a] > lo[a] { hi[a] - lo[a] } else { 1.0 };
            let half = 0.5 * width * (1.0 + inflation);
            out[a] = (centre - half, centre + half);
        }
        Bounds::new(out[0].0, out[0].1, out[1].0, out[1].1)
    }

    pub fn around_unembeddings(u: &UnembeddingSet) -> Result<Self> {
        Bounds::enclosing(u.vectors().iter().map(LabelVector::as_slice), DEFAULT_INFLATION)
    }

    /// Embedding cloud extent when the model has one, else the unembeddings'.
    /// Translating unembeddings leaves the embeddings alone, so equivalent
    /// models obtained that way share default bounds.
    pub fn default_for(m: &SoftmaxModel) -> Result<Self> {
        if m.embeddings().is_empty() {
            Bounds::around_unembeddings(m.unembeddings())
        } else {
            Bounds::enclosing(
                m.embeddings().points().iter().map(Vec::as_slice),
                DEFAULT_INFLATION,
            )
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

pub const DEFAULT_RESOLUTION: usize = 200;

/// Argmax label at the centre of every cell of a regular grid, row-major with
/// `y` as the outer index.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub bounds: Bounds,
    pub nx: usize,
    pub ny: usize,
    cells: Vec<usize>,
}

impl RegionGrid {
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let b = &self.bounds;
        let dx = (b.x_max - b.x_min) / self.nx as f64;
        let dy = (b.y_max - b.y_min) / self.ny as f64;
        (
            b.x_min + (ix as f64 + 0.5) * dx,
            b.y_min + (iy as f64 + 0.5) * dy,
        )
    }

    pub fn label_at(&self, ix: usize, iy: usize) -> usize {
        self.cells[iy * self.nx + ix]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Labels whose cells share an edge with a cell of `label`, counting
    /// only cells whose centres are farther than `min_radius` from the
    /// origin. Every region is a cone at the origin, where all regions meet.
    pub fn adjacent_labels(&self, label: usize, min_radius: f64) -> BTreeSet<usize> {
        let far = |ix: usize, iy: usize| {
            let (x, y) = self.cell_center(ix, iy);
            x.hypot(y) > min_radius
        };
        let mut out = BTreeSet::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.label_at(ix, iy) != label || !far(ix, iy) {
                    continue;
                }
                let mut visit = |jx: usize, jy: usize| {
                    let other = self.label_at(jx, jy);
                    if other != label && far(jx, jy) {
                        out.insert(other);
                    }
                };
                if ix + 1 < self.nx {
                    visit(ix + 1, iy);
                }
                if ix > 0 {
                    visit(ix - 1, iy);
                }
                if iy + 1 < self.ny {
                    visit(ix, iy + 1);
                }
                if iy > 0 {
                    visit(ix, iy - 1);
                }
            }
        }
        out
    }
}

pub fn decision_regions(
    m: &SoftmaxModel,
    bounds: &Bounds,
    nx: usize,
    ny: usize,
) -> Result<RegionGrid> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    if nx < 2 || ny < 2 {
        return Err(Error::invalid(format!(
            "grid resolution must be at least 2 per axis, got {nx}x{ny}"
        )));
    }
    let mut grid = RegionGrid {
        bounds: *bounds,
        nx,
        ny,
        cells: Vec::with_capacity(nx * ny),
    };
    for iy in 0..ny {
        for ix in 0..nx {
            let (x, y) = grid.cell_center(ix, iy);
            grid.cells.push(model::argmax_label(m, &[x, y])?);
        }
    }
    Ok(grid)
}
