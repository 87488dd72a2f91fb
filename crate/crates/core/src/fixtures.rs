//! Golden unembedding sets for the three worked examples and the checks that
//! go with them.
//!
//! * `unrestricted`: five labels, no constraint on the vectors. Labels 0 and 1
//!   have cosine 0.8, and the two cosine-forcing translations turn that into
//!   -1 and +1 without touching any probability.
//! * `centered`: five labels summing to zero. Cosine neighbours of label 2 are
//!   labels 3 and 4, but its tie partners are labels 1 and 3.
//! * `centered_unit`: six centered unit vectors. Labels 0 and 1 have cosine
//!   about -0.8 yet can tie; labels 1 and 3 have cosine about 0.8 yet cannot.
//!
//! The unit-norm set as originally published repeats labels 0 and 1 in slots
//! 4 and 3, which sums to `(0, 4·√(1-0.95²))` rather than zero and makes the
//! 1/3 cosine equal 1. [`centered_unit_unembeddings`] negates the second
//! coordinate of labels 3 and 4, which restores centering, unit norms and
//! both published cosines. The verbatim set is kept as
//! [`centered_unit_unembeddings_as_printed`] for reference.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{self, Bounds, Metric, TieOptions};
use crate::model::{EmbeddingBatch, SoftmaxModel, UnembeddingSet};
use crate::transforms::{self, CosineTarget};

/// Second coordinate of the unit vectors whose first coordinate is ±0.95.
fn unit_sine() -> f64 {
    (1.0 - 0.95f64 * 0.95).sqrt()
}

pub fn unrestricted_unembeddings() -> UnembeddingSet {
    UnembeddingSet::from_unnamed_rows(vec![
        vec![1.0, 0.5],
        vec![0.5, 1.0],
        vec![-1.0, 0.4],
        vec![-0.8, -0.8],
        vec![0.9, -1.2],
    ])
    .expect("valid fixture")
}

pub fn centered_unembeddings() -> UnembeddingSet {
    UnembeddingSet::from_unnamed_rows(vec![
        vec![1.4, -1.0],
        vec![1.4, 1.0],
        vec![-0.9, 0.3],
        vec![-1.0, 0.0],
        vec![-0.9, -0.3],
    ])
    .expect("valid fixture")
}

pub fn centered_unit_unembeddings() -> UnembeddingSet {
    let s = unit_sine();
    UnembeddingSet::from_unnamed_rows(vec![
        vec![0.95, s],
        vec![-0.95, s],
        vec![-1.0, 0.0],
        vec![-0.95, -s],
        vec![0.95, -s],
        vec![1.0, 0.0],
    ])
    .expect("valid fixture")
}

/// The six unit vectors exactly as published, duplicates included.
pub fn centered_unit_unembeddings_as_printed() -> UnembeddingSet {
    let s = unit_sine();
    UnembeddingSet::from_unnamed_rows(vec![
        vec![0.95, s],
        vec![-0.95, s],
        vec![-1.0, 0.0],
        vec![-0.95, s],
        vec![0.95, s],
        vec![1.0, 0.0],
    ])
    .expect("valid fixture")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleName {
    Unrestricted,
    Centered,
    CenteredUnit,
}

impl ExampleName {
    pub const ALL: [ExampleName; 3] = [
        ExampleName::Unrestricted,
        ExampleName::Centered,
        ExampleName::CenteredUnit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Unrestricted => "unrestricted",
            ExampleName::Centered => "centered",
            ExampleName::CenteredUnit => "centered_unit",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Stated in the published example. `approx` holds the rounded figure
    /// when only an approximation was given.
    Stated { approx: Option<f64> },
    /// Closed form evaluated from the published vectors.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    Cosine { i: usize, j: usize, value: f64 },
    /// Cosine reached after applying the cosine-forcing translation for `(i, j)`.
    ForcedCosine { i: usize, j: usize, target: CosineTarget },
    Tie { i: usize, j: usize, feasible: bool },
    TiePartners { i: usize, partners: Vec<usize> },
    CosineNeighbors { i: usize, neighbors: Vec<usize> },
    Centered,
    UnitNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedValue {
    pub expectation: Expectation,
    pub origin: Origin,
    /// Which claim of the worked example this value encodes.
    pub claim: &'static str,
}

/// Tolerance for golden-value comparisons.
pub const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub description: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: expected {}, computed {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.description,
            self.expected,
            self.computed
        )
    }
}

#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: ExampleName,
    pub model: SoftmaxModel,
    pub expected: Vec<ExpectedValue>,
    /// Free-form remarks printed alongside reproduction output.
    pub notes: Vec<&'static str>,
}

fn ev(expectation: Expectation, origin: Origin, claim: &'static str) -> ExpectedValue {
    ExpectedValue {
        expectation,
        origin,
        claim,
    }
}

pub fn example(name: ExampleName) -> NamedExample {
    use Expectation::*;
    let stated = Origin::Stated { approx: None };
    match name {
        ExampleName::Unrestricted => NamedExample {
            name,
            model: SoftmaxModel::from_unembeddings(unrestricted_unembeddings()),
            expected: vec![
                ev(
                    Cosine { i: 0, j: 1, value: 0.8 },
                    stated,
                    "cos(l0, l1) = 1/1.25 = 0.8",
                ),
                ev(
                    ForcedCosine { i: 0, j: 1, target: CosineTarget::Antipodal },
                    stated,
                    "antipodal translation v = (-0.75, -0.75) gives cosine -1",
                ),
                ev(
                    ForcedCosine { i: 0, j: 1, target: CosineTarget::Collinear },
                    stated,
                    "collinear translation gives cosine +1",
                ),
            ],
            notes: vec![],
        },
        ExampleName::Centered => NamedExample {
            name,
            model: SoftmaxModel::from_unembeddings(centered_unembeddings()),
            expected: vec![
                ev(Centered, stated, "unembeddings sum to the zero vector"),
                ev(
                    Cosine { i: 0, j: 1, value: 0.96 / 2.96 },
                    Origin::Stated { approx: Some(0.3) },
                    "cos(l0, l1) is approximately 0.3",
                ),
                ev(
                    Cosine { i: 1, j: 2, value: -0.96 / (2.96f64.sqrt() * 0.9f64.sqrt()) },
                    Origin::Stated { approx: Some(-0.6) },
                    "cos(l1, l2) is approximately -0.6",
                ),
                ev(Cosine { i: 2, j: 4, value: 0.8 }, stated, "cos(l2, l4) is 0.8"),
                ev(Tie { i: 0, j: 1, feasible: true }, stated, "l0 and l1 can tie for highest probability"),
                ev(Tie { i: 1, j: 2, feasible: true }, stated, "l1 and l2 can tie for highest probability"),
                ev(
                    Tie { i: 2, j: 4, feasible: false },
                    stated,
                    "l2 and l4 cannot tie: l3 would score higher between them",
                ),
                ev(
                    CosineNeighbors { i: 2, neighbors: vec![3, 4] },
                    stated,
                    "two cosine nearest neighbours of l2 are l3 and l4",
                ),
                ev(
                    TiePartners { i: 2, partners: vec![1, 3] },
                    stated,
                    "labels that can tie with l2 are l1 and l3",
                ),
            ],
            notes: vec![],
        },
        ExampleName::CenteredUnit => NamedExample {
            name,
            model: SoftmaxModel::from_unembeddings(centered_unit_unembeddings()),
            expected: vec![
                ev(Centered, stated, "unembeddings sum to the zero vector"),
                ev(UnitNorm, stated, "every unembedding has norm 1"),
                ev(
                    Cosine { i: 0, j: 1, value: -(2.0 * 0.95 * 0.95 - 1.0) },
                    Origin::Stated { approx: Some(-0.8) },
                    "cos(l0, l1) is approximately -0.8",
                ),
                ev(
                    Cosine { i: 1, j: 3, value: 2.0 * 0.95 * 0.95 - 1.0 },
                    Origin::Stated { approx: Some(0.8) },
                    "cos(l1, l3) is approximately 0.8",
                ),
                ev(Tie { i: 0, j: 1, feasible: true }, stated, "l0 and l1 can tie for highest probability"),
                ev(Tie { i: 1, j: 3, feasible: false }, stated, "l1 and l3 cannot tie for highest probability"),
            ],
            notes: vec![
                "the published vectors repeat l1 and l0 as l3 and l4; the second \
                 coordinate of l3 and l4 is negated so the set is centered and the \
                 stated cosines hold",
            ],
        },
    }
}

fn fmt_labels(ix: &[usize]) -> String {
    let inner: Vec<String> = ix.iter().map(|i| format!("l{i}")).collect();
    format!("{{{}}}", inner.join(", "))
}

fn verdict(feasible: bool) -> &'static str {
    if feasible {
        "can tie"
    } else {
        "cannot tie"
    }
}

impl ExpectedValue {
    /// Evaluates the expectation against `model`.
    pub fn check(&self, model: &SoftmaxModel) -> Result<CheckOutcome> {
        let u = model.unembeddings();
        let opts = TieOptions::default();
        let (description, expected, computed, pass) = match &self.expectation {
            Expectation::Cosine { i, j, value } => {
                let c = geometry::cosine(u.vector(*i), u.vector(*j))?;
                (
                    format!("cos(l{i}, l{j})"),
                    format!("{value:.15}"),
                    format!("{c:.15}"),
                    (c - value).abs() <= GOLDEN_TOL,
                )
            }
            Expectation::ForcedCosine { i, j, target } => {
                let v = transforms::cosine_forcing_translation(u.vector(*i), u.vector(*j), *target)?;
                let moved = transforms::translate(u, &v)?;
                let c = geometry::cosine(moved.vector(*i), moved.vector(*j))?;
                (
                    format!("cos(l{i}+v, l{j}+v) with v = {:?}", v.as_slice()),
                    format!("{}", target.value()),
                    format!("{c:.15}"),
                    (c - target.value()).abs() <= GOLDEN_TOL,
                )
            }
            Expectation::Tie { i, j, feasible } => {
                let r = geometry::coargmax_feasible_with(u, *i, *j, &opts)?;
                (
                    format!("l{i} and l{j} tied for highest probability"),
                    verdict(*feasible).to_string(),
                    format!("{} (margin {:.3e})", verdict(r.feasible), r.margin),
                    r.feasible == *feasible,
                )
            }
            Expectation::TiePartners { i, partners } => {
                let got = geometry::tie_partners(u, *i, &opts)?;
                (
                    format!("tie partners of l{i}"),
                    fmt_labels(partners),
                    fmt_labels(&got),
                    &got == partners,
                )
            }
            Expectation::CosineNeighbors { i, neighbors } => {
                let got = geometry::nearest_neighbors(u, *i, Metric::Cosine, neighbors.len())?;
                let mut got_sorted = got.clone();
                got_sorted.sort_unstable();
                let mut want = neighbors.clone();
                want.sort_unstable();
                (
                    format!("{} cosine nearest neighbours of l{i}", neighbors.len()),
                    fmt_labels(neighbors),
                    fmt_labels(&got),
                    got_sorted == want,
                )
            }
            Expectation::Centered => {
                let norm = sum_norm(u);
                (
                    "norm of the sum of unembeddings".to_string(),
                    "0".to_string(),
                    format!("{norm:.3e}"),
                    norm <= GOLDEN_TOL,
                )
            }
            Expectation::UnitNorm => {
                let worst = u
                    .vectors()
                    .iter()
                    .map(|v| (v.norm() - 1.0).abs())
                    .fold(0.0, f64::max);
                (
                    "max |norm - 1| over unembeddings".to_string(),
                    "0".to_string(),
                    format!("{worst:.3e}"),
                    worst <= GOLDEN_TOL,
                )
            }
        };
        Ok(CheckOutcome {
            description,
            expected,
            computed,
            pass,
        })
    }
}

/// Euclidean norm of the sum of all unembeddings.
pub fn sum_norm(u: &UnembeddingSet) -> f64 {
    let mut sum = vec![0.0; u.dim()];
    for v in u.vectors() {
        for (s, c) in sum.iter_mut().zip(v.as_slice()) {
            *s += c;
        }
    }
    sum.iter().map(|s| s * s).sum::<f64>().sqrt()
}

impl NamedExample {
    pub fn check_all(&self) -> Result<Vec<CheckOutcome>> {
        self.expected.iter().map(|e| e.check(&self.model)).collect()
    }

    /// The example model with a seeded synthetic embedding cloud attached.
    pub fn with_synthetic_cloud(&self, seed: u64, n: usize) -> Result<SoftmaxModel> {
        let bounds = Bounds::around_unembeddings(self.model.unembeddings())?;
        let cloud = synthetic_embeddings(seed, n, &bounds)?;
        self.model.with_embeddings(cloud)
    }
}

/// Deterministic uniform 2D points inside `bounds`.
pub fn synthetic_embeddings(seed: u64, n: usize, bounds: &Bounds) -> Result<EmbeddingBatch> {
    if n == 0 {
        return Err(Error::invalid("synthetic cloud needs at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            vec![
                rng.gen_range(bounds.x_min..bounds.x_max),
                rng.gen_range(bounds.y_min..bounds.y_max),
            ]
        })
        .collect();
    EmbeddingBatch::new(2, points)
}

/// Seeded probe points for any dimension: the synthetic cloud when `d = 2`,
/// otherwise uniform in the cube `[-r, r]^d` with `r` one and a half times
/// the largest unembedding coordinate (at least 1).
pub fn probe_points(u: &UnembeddingSet, seed: u64, n: usize) -> Result<EmbeddingBatch> {
    if u.dim() == 2 {
        return synthetic_embeddings(seed, n, &Bounds::around_unembeddings(u)?);
    }
    if n == 0 {
        return Err(Error::invalid("probe batch needs at least one point"));
    }
    let r = u
        .vectors()
        .iter()
        .flat_map(|v| v.as_slice().iter().map(|x| x.abs()))
        .fold(1.0_f64 / 1.5, f64::max)
        * 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| (0..u.dim()).map(|_| rng.gen_range(-r..r)).collect())
        .collect();
    EmbeddingBatch::new(u.dim(), points)
}
