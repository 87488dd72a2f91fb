//! Softmax classifiers represented by their unembedding vectors and a batch
//! of embedding points.
//!
//! A model assigns `p(y | x) = exp(f(x)·g(y)) / Σ_y' exp(f(x)·g(y'))`. The
//! encoder `f` is never materialised: an [`EmbeddingBatch`] stands in for
//! the set of embeddings it produces.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

fn check_finite(coords: &[f64], context: impl FnOnce() -> String) -> Result<()> {
    match coords.iter().find(|c| !c.is_finite()) {
        Some(&value) => Err(Error::NonFinite {
            context: context(),
            value,
        }),
        None => Ok(()),
    }
}

pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One unembedding `g(y)`: a finite vector of dimension at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector(Vec<f64>);

impl LabelVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("label vector must have dimension >= 1"));
        }
        check_finite(&coords, || "label vector".to_string())?;
        Ok(LabelVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn norm(&self) -> f64 {
        dot_slices(&self.0, &self.0).sqrt()
    }

    // Arithmetic helpers keep the finiteness invariant only as long as inputs
    // stay well inside f64 range, which holds at logit scale.
    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> LabelVector {
        LabelVector(self.0.iter().map(|&c| f(c)).collect())
    }

    pub(crate) fn zip_with(&self, other: &[f64], f: impl Fn(f64, f64) -> f64) -> LabelVector {
        LabelVector(self.0.iter().zip(other).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl From<LabelVector> for Vec<f64> {
    fn from(v: LabelVector) -> Self {
        v.0
    }
}

/// A labelled `k × d` set of unembeddings. `k >= 2`, names unique, shared `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnembeddingSet {
    labels: Arc<[String]>,
    vectors: Vec<LabelVector>,
}

impl UnembeddingSet {
    pub fn new(labels: Vec<String>, vectors: Vec<LabelVector>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::invalid(format!(
                "{} label names for {} vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if vectors.len() < 2 {
            return Err(Error::TooFewLabels {
                min: 2,
                found: vectors.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &labels {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateLabel(name.clone()));
            }
        }
        let d = vectors[0].dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        Ok(UnembeddingSet {
            labels: labels.into(),
            vectors,
        })
    }

    /// Builds a set from raw rows, validating every invariant.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let vectors = rows
            .into_iter()
            .zip(&labels)
            .map(|(row, name)| {
                check_finite(&row, || format!("unembedding `{name}`"))?;
                LabelVector::new(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, vectors)
    }

    /// Rows named `"0"`, `"1"`, ... in order.
    pub fn from_unnamed_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_rows(labels, rows)
    }

    /// Same labels, new vectors. Callers guarantee the vector count and dimension.
    pub(crate) fn with_vectors(&self, vectors: Vec<LabelVector>) -> Self {
        debug_assert_eq!(vectors.len(), self.vectors.len());
        UnembeddingSet {
            labels: Arc::clone(&self.labels),
            vectors,
        }
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub(crate) fn shared_labels(&self) -> Arc<[String]> {
        Arc::clone(&self.labels)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn vectors(&self) -> &[LabelVector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &LabelVector {
        &self.vectors[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.k() {
            Ok(())
        } else {
            Err(Error::LabelIndex {
                index: i,
                k: self.k(),
            })
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(|v| v.as_slice().to_vec()).collect()
    }
}

/// `n` embedding points of dimension `d`, standing in for `f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    dim: usize,
    points: Vec<Vec<f64>>,
    names: Option<Vec<String>>,
}

impl EmbeddingBatch {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(dim, points, None)
    }

    pub fn with_names(dim: usize, points: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        if names.len() != points.len() {
            return Err(Error::invalid(format!(
                "{} point names for {} points",
                names.len(),
                points.len()
            )));
        }
        Self::build(dim, points, Some(names))
    }

    pub fn empty(dim: usize) -> Self {
        EmbeddingBatch {
            dim,
            points: Vec::new(),
            names: None,
        }
    }

    fn build(dim: usize, points: Vec<Vec<f64>>, names: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            check_finite(p, || format!("embedding point {i}"))?;
        }
        Ok(EmbeddingBatch { dim, points, names })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub(crate) fn map_points(&self, f: impl Fn(f64) -> f64) -> EmbeddingBatch {
        EmbeddingBatch {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|&c| f(c)).collect())
                .collect(),
            names: self.names.clone(),
        }
    }
}

/// Unembeddings plus a (possibly empty) batch of embeddings of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxModel {
    unembeddings: UnembeddingSet,
    embeddings: EmbeddingBatch,
}

impl SoftmaxModel {
    pub fn new(unembeddings: UnembeddingSet, embeddings: EmbeddingBatch) -> Result<Self> {
        if embeddings.dim() != unembeddings.dim() {
            return Err(Error::DimensionMismatch {
                expected: unembeddings.dim(),
                found: embeddings.dim(),
            });
        }
        Ok(SoftmaxModel {
            unembeddings,
            embeddings,
        })
    }

    pub fn from_unembeddings(unembeddings: UnembeddingSet) -> Self {
        let embeddings = EmbeddingBatch::empty(unembeddings.dim());
        SoftmaxModel {
            unembeddings,
            embeddings,
        }
    }

    pub fn unembeddings(&self) -> &UnembeddingSet {
        &self.unembeddings
    }

    pub fn embeddings(&self) -> &EmbeddingBatch {
        &self.embeddings
    }

    pub fn dim(&self) -> usize {
        self.unembeddings.dim()
    }

    pub fn k(&self) -> usize {
        self.unembeddings.k()
    }

    pub fn with_unembeddings(&self, unembeddings: UnembeddingSet) -> Result<Self> {
        SoftmaxModel::new(unembeddings, self.embeddings.clone())
    }

    pub fn with_embeddings(&self, embeddings: EmbeddingBatch) -> Result<Self> {
        SoftmaxModel::new(self.unembeddings.clone(), embeddings)
    }

    pub fn into_parts(self) -> (UnembeddingSet, EmbeddingBatch) {
        (self.unembeddings, self.embeddings)
    }
}

/// Probabilities over the `k` labels, entrywise in `[0, 1]` and summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
    labels: Option<Arc<[String]>>,
}

impl ProbabilityDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Lowest index among the maximal entries.
    pub fn argmax(&self) -> usize {
        argmax_lowest(&self.probs)
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_point(e: &[f64], u: &UnembeddingSet) -> Result<()> {
    if e.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: e.len(),
        });
    }
    Ok(())
}

/// Inner products of `e` with every unembedding.
pub fn logits(e: &[f64], u: &UnembeddingSet) -> Result<Vec<f64>> {
    check_point(e, u)?;
    Ok(u.vectors().iter().map(|g| dot_slices(e, g.as_slice())).collect())
}

/// Max-stabilised softmax.
pub fn softmax(z: &[f64]) -> Result<ProbabilityDistribution> {
    if z.is_empty() {
        return Err(Error::invalid("softmax of an empty vector"));
    }
    check_finite(z, || "logits".to_string())?;
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    // The max entry contributes exp(0) = 1, so the sum is never below 1.
    let sum: f64 = exps.iter().sum();
    Ok(ProbabilityDistribution {
        probs: exps.into_iter().map(|e| e / sum).collect(),
        labels: None,
    })
}

pub fn predict_proba(m: &SoftmaxModel, e: &[f64]) -> Result<ProbabilityDistribution> {
    let z = logits(e, m.unembeddings())?;
    let mut dist = softmax(&z)?;
    dist.labels = Some(m.unembeddings().shared_labels());
    Ok(dist)
}

/// Index of the highest-probability label; exact ties go to the lowest index.
///
/// Decided on logits rather than probabilities: softmax is monotone, and
/// comparing logits avoids ties manufactured by exp underflow.
pub fn argmax_label(m: &SoftmaxModel, e: &[f64]) -> Result<usize> {
    argmax_unembeddings(m.unembeddings(), e)
}

pub fn argmax_unembeddings(u: &UnembeddingSet, e: &[f64]) -> Result<usize> {
    Ok(argmax_lowest(&logits(e, u)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn unrestricted() -> SoftmaxModel {
        SoftmaxModel::from_unembeddings(fixtures::unrestricted_unembeddings())
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn logits_of_zero_point_vanish() {
        let z = logits(&[0.0, 0.0], unrestricted().unembeddings()).unwrap();
        assert_eq!(z, vec![0.0; 5]);
    }

    #[test]
    fn logits_pick_coordinates() {
        let u = fixtures::unrestricted_unembeddings();
        assert_eq!(logits(&[1.0, 0.0], &u).unwrap(), vec![1.0, 0.5, -1.0, -0.8, 0.9]);
        // hand-summed coordinate pairs
        assert_close(
            &logits(&[1.0, 1.0], &u).unwrap(),
            &[1.5, 1.5, -0.6, -1.6, -0.3],
            1e-15,
        );
    }

    #[test]
    fn logits_reject_dimension_mismatch() {
        let err = logits(&[1.0, 2.0, 3.0], &fixtures::unrestricted_unembeddings()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn softmax_uniform_and_shift() {
        assert_close(softmax(&[0.0; 5]).unwrap().probs(), &[0.2; 5], 1e-15);
        for c in [-1e6, -3.5, 0.0, 42.0, 1e6] {
            assert_close(softmax(&[c, c]).unwrap().probs(), &[0.5, 0.5], 1e-15);
        }
    }

    #[test]
    fn softmax_matches_high_precision_reference() {
        // mpmath at 60 digits, see tests/oracles/softmax_reference.py
        let expected = [
            0.355_618_492_226_341_338_19,
            0.215_693_518_696_054_812_63,
            0.048_127_729_369_629_053_792,
            0.058_783_341_396_051_138_159,
            0.321_776_918_311_923_657_23,
        ];
        let p = softmax(&[1.0, 0.5, -1.0, -0.8, 0.9]).unwrap();
        assert_close(p.probs(), &expected, 1e-15);
    }

    #[test]
    fn softmax_rejects_non_finite_and_empty() {
        assert!(matches!(softmax(&[1.0, f64::NAN]), Err(Error::NonFinite { .. })));
        assert!(matches!(softmax(&[f64::INFINITY]), Err(Error::NonFinite { .. })));
        assert!(softmax(&[]).is_err());
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let p = softmax(&[1000.0, 999.0, -1000.0]).unwrap();
        assert!(p.probs().iter().all(|v| v.is_finite()));
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn predict_proba_at_origin_is_uniform() {
        let p = predict_proba(&unrestricted(), &[0.0, 0.0]).unwrap();
        assert_close(p.probs(), &[0.2; 5], 1e-15);
        assert_eq!(p.labels().unwrap()[4], "4");
    }

    #[test]
    fn predict_proba_centered_reference() {
        let m = SoftmaxModel::from_unembeddings(fixtures::centered_unembeddings());
        let expected = [
            0.118_083_942_325_374_201_55,
            0.872_528_874_225_081_391_86,
            0.004_355_309_812_185_146_675,
            0.002_641_628_933_637_562_585_1,
            0.002_390_244_703_721_697_326_2,
        ];
        assert_close(predict_proba(&m, &[2.0, 1.0]).unwrap().probs(), &expected, 1e-15);
    }

    #[test]
    fn argmax_examples() {
        let m = unrestricted();
        assert_eq!(argmax_label(&m, &[1.0, 0.5]).unwrap(), 0);
        assert_eq!(argmax_label(&m, &[0.0, 0.0]).unwrap(), 0);
        // (1,1) ties labels 0 and 1 exactly
        assert_eq!(argmax_label(&m, &[1.0, 1.0]).unwrap(), 0);
        assert_eq!(argmax_label(&m, &[0.0, -1.0]).unwrap(), 4);
    }

    #[test]
    fn set_invariants_enforced() {
        let one = UnembeddingSet::from_unnamed_rows(vec![vec![1.0]]);
        assert!(matches!(one, Err(Error::TooFewLabels { .. })));
        let dup = UnembeddingSet::from_rows(
            vec!["a".into(), "a".into()],
            vec![vec![1.0], vec![2.0]],
        );
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));
        let ragged = UnembeddingSet::from_unnamed_rows(vec![vec![1.0], vec![2.0, 3.0]]);
        assert!(matches!(ragged, Err(Error::DimensionMismatch { .. })));
        let nan = UnembeddingSet::from_unnamed_rows(vec![vec![1.0], vec![f64::NAN]]);
        assert!(matches!(nan, Err(Error::NonFinite { .. })));
        assert!(LabelVector::new(vec![]).is_err());
        let batch = EmbeddingBatch::new(3, vec![vec![0.0; 3]]).unwrap();
        let bad = SoftmaxModel::new(fixtures::unrestricted_unembeddings(), batch);
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn softmax_is_shift_invariant(
            z in prop::collection::vec(-50.0f64..50.0, 1..40),
            s in -100.0f64..100.0,
        ) {
            let p = softmax(&z).unwrap();
            let shifted: Vec<f64> = z.iter().map(|v| v + s).collect();
            let q = softmax(&shifted).unwrap();
            for (a, b) in p.probs().iter().zip(q.probs()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn softmax_is_a_distribution(z in prop::collection::vec(-700.0f64..700.0, 1..60)) {
            let p = softmax(&z).unwrap();
            prop_assert!(p.probs().iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
