//! Transforms of unembedding sets that leave every probability unchanged
//! (translation, paired rescaling) or that only reshape the set (centering,
//! row normalisation), plus the translations that force the cosine of a
//! chosen pair to -1 or +1.
//!
//! Adding the same `v` to every unembedding adds `f·v` to every logit of a
//! given input, and softmax ignores a common shift. Every function returns a
//! new value; inputs are never modified.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::cosine;
use crate::model::{predict_proba, EmbeddingBatch, LabelVector, SoftmaxModel, UnembeddingSet};

/// A vector added to every unembedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationVector(Vec<f64>);

impl TranslationVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if let Some(&value) = v.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "translation vector".to_string(),
                value,
            });
        }
        if v.is_empty() {
            return Err(Error::invalid("translation vector must have dimension >= 1"));
        }
        Ok(TranslationVector(v))
    }

    pub fn zero(dim: usize) -> Self {
        TranslationVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        TranslationVector(self.0.iter().map(|c| -c).collect())
    }
}

/// Factor `c > 0` applied to unembeddings, with `1/c` applied to embeddings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePair(f64);

impl ScalePair {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("scale factor must be a positive finite number, got {c}")));
        }
        Ok(ScalePair(c))
    }

    pub fn factor(self) -> f64 {
        self.0
    }
}

/// Cosine value a forcing translation produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CosineTarget {
    /// Cosine -1: the two translated vectors sum to zero.
    #[serde(rename = "-1")]
    Antipodal,
    /// Cosine +1: the second translated vector is three times the first.
    #[serde(rename = "1")]
    Collinear,
}

impl CosineTarget {
    pub fn value(self) -> f64 {
        match self {
            CosineTarget::Antipodal => -1.0,
            CosineTarget::Collinear => 1.0,
        }
    }
}

impl fmt::Display for CosineTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosineTarget::Antipodal => f.write_str("-1"),
            CosineTarget::Collinear => f.write_str("1"),
        }
    }
}

impl FromStr for CosineTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-1" | "-1.0" => Ok(CosineTarget::Antipodal),
            "1" | "+1" | "1.0" | "+1.0" => Ok(CosineTarget::Collinear),
            other => Err(Error::invalid(format!("cosine target must be -1 or 1, got `{other}`"))),
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `g(y) + v` for every label.
pub fn translate(u: &UnembeddingSet, v: &TranslationVector) -> Result<UnembeddingSet> {
    check_dim(u.dim(), v.dim())?;
    let vectors = u
        .vectors()
        .iter()
        .map(|g| g.zip_with(v.as_slice(), |a, b| a + b))
        .collect();
    Ok(u.with_vectors(vectors))
}

pub fn mean_vector(u: &UnembeddingSet) -> Vec<f64> {
    let k = u.k() as f64;
    let mut mean = vec![0.0; u.dim()];
    for g in u.vectors() {
        for (m, c) in mean.iter_mut().zip(g.as_slice()) {
            *m += c;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k);
    mean
}

/// Subtracts the mean unembedding from every unembedding.
pub fn center(u: &UnembeddingSet) -> UnembeddingSet {
    let mean = mean_vector(u);
    let vectors = u
        .vectors()
        .iter()
        .map(|g| g.zip_with(&mean, |a, m| a - m))
        .collect();
    u.with_vectors(vectors)
}

/// Divides every unembedding by its Euclidean norm.
pub fn normalize_rows(u: &UnembeddingSet) -> Result<UnembeddingSet> {
    let vectors = u
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let n = g.norm();
            if n == 0.0 {
                return Err(Error::ZeroVector {
                    label: u.label(i).to_string(),
                });
            }
            Ok(g.map(|c| c / n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(u.with_vectors(vectors))
}

/// Unembeddings times `c`, embeddings times `1/c`. Every logit is unchanged
/// up to rounding while Euclidean distances between unembeddings scale by `c`.
pub fn scale_pair(m: &SoftmaxModel, s: ScalePair) -> Result<SoftmaxModel> {
    let c = s.factor();
    let u = m.unembeddings();
    let scaled = u.with_vectors(u.vectors().iter().map(|g| g.map(|x| x * c)).collect());
    let embeddings: EmbeddingBatch = m.embeddings().map_points(|x| x / c);
    SoftmaxModel::new(scaled, embeddings)
}

/// A `v` with `cos(a + v, b + v)` equal to `target`.
///
/// * Antipodal: `v = -(a + (b - a)/2)`, so `a + v = -(b + v) = (a - b)/2`.
///   Undefined when `a = b`.
/// * Collinear: `v = -a + (b - a)/2`, so `a + v = (b - a)/2` and
///   `b + v = 3(a + v)`. When `a = b` the cosine is already 1 and the zero
///   vector is returned.
pub fn cosine_forcing_translation(
    a: &LabelVector,
    b: &LabelVector,
    target: CosineTarget,
) -> Result<TranslationVector> {
    check_dim(a.dim(), b.dim())?;
    let (a, b) = (a.as_slice(), b.as_slice());
    let equal = a == b;
    let v = match target {
        CosineTarget::Antipodal => {
            if equal {
                return Err(Error::EqualVectors);
            }
            a.iter().zip(b).map(|(&a, &b)| -(a + 0.5 * (b - a))).collect()
        }
        CosineTarget::Collinear => {
            if equal {
                return Ok(TranslationVector::zero(a.len()));
            }
            a.iter().zip(b).map(|(&a, &b)| -a + 0.5 * (b - a)).collect()
        }
    };
    TranslationVector::new(v)
}

/// Two models equivalent to `m` in which labels `i` and `j` have cosine -1
/// and +1 respectively.
#[derive(Debug, Clone)]
pub struct EquivalentPair {
    pub antipodal: SoftmaxModel,
    pub antipodal_shift: TranslationVector,
    pub collinear: SoftmaxModel,
    pub collinear_shift: TranslationVector,
}

pub fn equivalent_model_pair(m: &SoftmaxModel, i: usize, j: usize) -> Result<EquivalentPair> {
    let u = m.unembeddings();
    u.check_index(i)?;
    u.check_index(j)?;
    let (a, b) = (u.vector(i), u.vector(j));
    if a == b {
        return Err(Error::EqualVectors);
    }
    let build = |target| -> Result<(SoftmaxModel, TranslationVector)> {
        let v = cosine_forcing_translation(a, b, target)?;
        let moved = m.with_unembeddings(translate(u, &v)?)?;
        Ok((moved, v))
    };
    let (antipodal, antipodal_shift) = build(CosineTarget::Antipodal)?;
    let (collinear, collinear_shift) = build(CosineTarget::Collinear)?;
    Ok(EquivalentPair {
        antipodal,
        antipodal_shift,
        collinear,
        collinear_shift,
    })
}

/// Cosine of labels `i`, `j` after a translation.
pub fn translated_cosine(u: &UnembeddingSet, v: &TranslationVector, i: usize, j: usize) -> Result<f64> {
    let t = translate(u, v)?;
    cosine(t.vector(i), t.vector(j))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub max_prob_diff: f64,
    pub num_points_checked: usize,
    /// Per point, the label with the largest probability difference.
    pub worst_label: Vec<usize>,
    /// Per point, that largest difference.
    pub point_max_diff: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// Largest `|p_A(y|x) - p_B(y|x)|` over the given points and all labels.
/// `pass` iff that is below `tol`.
pub fn verify_equivalence(
    a: &SoftmaxModel,
    b: &SoftmaxModel,
    points: &EmbeddingBatch,
    tol: f64,
) -> Result<EquivalenceReport> {
    if a.unembeddings().labels() != b.unembeddings().labels() {
        return Err(Error::LabelMismatch);
    }
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), points.dim())?;
    let mut worst_label = Vec::with_capacity(points.len());
    let mut point_max_diff = Vec::with_capacity(points.len());
    for p in points.points() {
        let pa = predict_proba(a, p)?;
        let pb = predict_proba(b, p)?;
        let (label, diff) = pa
            .probs()
            .iter()
            .zip(pb.probs())
            .map(|(x, y)| (x - y).abs())
            .enumerate()
            .fold((0, 0.0), |best, (l, d)| if d > best.1 { (l, d) } else { best });
        worst_label.push(label);
        point_max_diff.push(diff);
    }
    let max_prob_diff = point_max_diff.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        max_prob_diff,
        num_points_checked: points.len(),
        worst_label,
        point_max_diff,
        tol,
        pass: max_prob_diff < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::{euclidean, similarity_matrix, Metric};
    use crate::model::argmax_label;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lv(c: &[f64]) -> LabelVector {
        LabelVector::new(c.to_vec()).unwrap()
    }

    fn unrestricted_model() -> SoftmaxModel {
        SoftmaxModel::from_unembeddings(fixtures::unrestricted_unembeddings())
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingBatch {
        let pts = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        EmbeddingBatch::new(d, pts).unwrap()
    }

    #[test]
    fn antipodal_shift_on_unrestricted_pair() {
        let u = fixtures::unrestricted_unembeddings();
        let v = TranslationVector::new(vec![-0.75, -0.75]).unwrap();
        let t = translate(&u, &v).unwrap();
        assert_eq!(t.vector(0).as_slice(), &[0.25, -0.25]);
        assert_eq!(t.vector(1).as_slice(), &[-0.25, 0.25]);
        assert_eq!(t.labels(), u.labels());
    }

    #[test]
    fn translate_identity_and_inverse() {
        let u = fixtures::centered_unembeddings();
        assert_eq!(translate(&u, &TranslationVector::zero(2)).unwrap(), u);
        let v = TranslationVector::new(vec![0.5, -0.25]).unwrap();
        let back = translate(&translate(&u, &v).unwrap(), &v.negated()).unwrap();
        for (a, b) in back.vectors().iter().zip(u.vectors()) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        let bad = TranslationVector::new(vec![1.0]).unwrap();
        assert!(matches!(translate(&u, &bad), Err(Error::DimensionMismatch { .. })));
        assert!(TranslationVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn center_examples() {
        let u = fixtures::centered_unembeddings();
        let c = center(&u);
        for (a, b) in u.vectors().iter().zip(c.vectors()) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let two = UnembeddingSet::from_unnamed_rows(vec![vec![1.0, 0.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(center(&two).rows(), vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(center(&center(&two)), center(&two));
    }

    #[test]
    fn normalize_examples() {
        let u = UnembeddingSet::from_unnamed_rows(vec![vec![3.0, 4.0], vec![0.0, -2.0]]).unwrap();
        let n = normalize_rows(&u).unwrap();
        assert_eq!(n.vector(0).as_slice(), &[0.6, 0.8]);
        assert_eq!(n.vector(1).as_slice(), &[0.0, -1.0]);

        let unit = fixtures::centered_unit_unembeddings();
        let again = normalize_rows(&unit).unwrap();
        for (a, b) in unit.vectors().iter().zip(again.vectors()) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() < 1e-12);
            }
        }

        let named = UnembeddingSet::from_rows(
            vec!["cat".into(), "dog".into()],
            vec![vec![1.0, 1.0], vec![0.0, 0.0]],
        )
        .unwrap();
        assert!(matches!(normalize_rows(&named), Err(Error::ZeroVector { label }) if label == "dog"));
    }

    #[test]
    fn scale_pair_examples() {
        let m = unrestricted_model();
        assert_eq!(scale_pair(&m, ScalePair::new(1.0).unwrap()).unwrap(), m);
        assert!(ScalePair::new(0.0).is_err());
        assert!(ScalePair::new(-2.0).is_err());
        assert!(ScalePair::new(f64::INFINITY).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = m.with_embeddings(random_points(&mut rng, 50, 2)).unwrap();
        let s = scale_pair(&m, ScalePair::new(2.0).unwrap()).unwrap();
        let d0 = similarity_matrix(m.unembeddings(), Metric::Euclidean).unwrap();
        let d1 = similarity_matrix(s.unembeddings(), Metric::Euclidean).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(d1.get(i, j), 2.0 * d0.get(i, j));
            }
        }
        for (p, q) in m.embeddings().points().iter().zip(s.embeddings().points()) {
            let a = predict_proba(&m, p).unwrap();
            let b = predict_proba(&s, q).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scale_by_ten_on_random_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rows = (0..7).map(|_| (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let u = UnembeddingSet::from_unnamed_rows(rows).unwrap();
        let m = SoftmaxModel::new(u, random_points(&mut rng, 100, 4)).unwrap();
        let s = scale_pair(&m, ScalePair::new(10.0).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for (p, q) in m.embeddings().points().iter().zip(s.embeddings().points()) {
            let a = predict_proba(&m, p).unwrap();
            let b = predict_proba(&s, q).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                worst = worst.max((x - y).abs());
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn forcing_translations_on_unrestricted_pair() {
        let (a, b) = (lv(&[1.0, 0.5]), lv(&[0.5, 1.0]));
        let v = cosine_forcing_translation(&a, &b, CosineTarget::Antipodal).unwrap();
        assert_eq!(v.as_slice(), &[-0.75, -0.75]);
        let w = cosine_forcing_translation(&a, &b, CosineTarget::Collinear).unwrap();
        assert_eq!(w.as_slice(), &[-1.25, -0.25]);
        // a + w = (-0.25, 0.25), b + w = (-0.75, 0.75)
        let aw = a.zip_with(w.as_slice(), |x, y| x + y);
        let bw = b.zip_with(w.as_slice(), |x, y| x + y);
        for (p, q) in aw.as_slice().iter().zip(bw.as_slice()) {
            assert_eq!(*q, 3.0 * p);
        }
        assert_eq!(cosine(&aw, &bw).unwrap(), 1.0);
    }

    #[test]
    fn forcing_equal_vectors() {
        let a = lv(&[0.3, -0.2]);
        assert!(matches!(
            cosine_forcing_translation(&a, &a, CosineTarget::Antipodal),
            Err(Error::EqualVectors)
        ));
        let v = cosine_forcing_translation(&a, &a, CosineTarget::Collinear).unwrap();
        assert_eq!(v, TranslationVector::zero(2));
        assert_eq!(cosine(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("-1".parse::<CosineTarget>().unwrap(), CosineTarget::Antipodal);
        assert_eq!("1".parse::<CosineTarget>().unwrap(), CosineTarget::Collinear);
        assert_eq!("+1".parse::<CosineTarget>().unwrap(), CosineTarget::Collinear);
        assert!("0.5".parse::<CosineTarget>().is_err());
    }

    #[test]
    fn equivalent_pair_of_unrestricted_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = unrestricted_model().with_embeddings(random_points(&mut rng, 100, 2)).unwrap();
        let pair = equivalent_model_pair(&m, 0, 1).unwrap();
        let cos = |mm: &SoftmaxModel| cosine(mm.unembeddings().vector(0), mm.unembeddings().vector(1)).unwrap();
        assert_eq!(cos(&m), 0.8);
        assert!((cos(&pair.antipodal) + 1.0).abs() < 1e-12);
        assert!((cos(&pair.collinear) - 1.0).abs() < 1e-12);
        assert_eq!(pair.antipodal_shift.as_slice(), &[-0.75, -0.75]);
        for other in [&pair.antipodal, &pair.collinear] {
            let r = verify_equivalence(&m, other, m.embeddings(), 1e-12).unwrap();
            assert!(r.pass, "{}", r.max_prob_diff);
            assert_eq!(r.num_points_checked, 100);
            for p in m.embeddings().points() {
                assert_eq!(argmax_label(&m, p).unwrap(), argmax_label(other, p).unwrap());
            }
        }
        let same = m
            .with_unembeddings(
                UnembeddingSet::from_unnamed_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            )
            .unwrap();
        assert!(matches!(equivalent_model_pair(&same, 0, 1), Err(Error::EqualVectors)));
    }

    #[test]
    fn verify_equivalence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = unrestricted_model();
        let pts = random_points(&mut rng, 100, 2);
        let r = verify_equivalence(&m, &m, &pts, 1e-12).unwrap();
        assert_eq!(r.max_prob_diff, 0.0);
        assert!(r.pass);

        let v = TranslationVector::new(vec![-0.75, -0.75]).unwrap();
        let t = m.with_unembeddings(translate(m.unembeddings(), &v).unwrap()).unwrap();
        assert!(verify_equivalence(&m, &t, &pts, 1e-12).unwrap().pass);

        // nudge l0 by 0.1 along x and probe along x
        let mut rows = m.unembeddings().rows();
        rows[0][0] += 0.1;
        let nudged = SoftmaxModel::from_unembeddings(UnembeddingSet::from_unnamed_rows(rows).unwrap());
        let probe = EmbeddingBatch::new(2, vec![vec![3.0, 0.0]]).unwrap();
        let r = verify_equivalence(&m, &nudged, &probe, 1e-12).unwrap();
        assert!(r.max_prob_diff > 1e-3, "{}", r.max_prob_diff);
        assert!(!r.pass);
        assert_eq!(r.worst_label, vec![0]);

        let renamed = SoftmaxModel::from_unembeddings(
            UnembeddingSet::from_rows(
                vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
                m.unembeddings().rows(),
            )
            .unwrap(),
        );
        assert!(matches!(
            verify_equivalence(&m, &renamed, &pts, 1e-12),
            Err(Error::LabelMismatch)
        ));
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..17).prop_flat_map(|d| {
            (
                prop::collection::vec(-10.0f64..10.0, d),
                prop::collection::vec(-10.0f64..10.0, d),
            )
        })
    }

    proptest! {
        #[test]
        fn antipodal_translated_pair_cancels((a, b) in arb_pair()) {
            prop_assume!(a != b);
            let (a, b) = (lv(&a), lv(&b));
            let v = cosine_forcing_translation(&a, &b, CosineTarget::Antipodal).unwrap();
            let sum: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).zip(v.as_slice())
                .map(|((x, y), w)| (x + w) + (y + w)).collect();
            let norm = sum.iter().map(|s| s * s).sum::<f64>().sqrt();
            prop_assert!(norm < 1e-12 * (a.norm() + b.norm()));
        }

        #[test]
        fn collinear_translated_pair_is_three_to_one((a, b) in arb_pair()) {
            prop_assume!(a != b);
            let (a, b) = (lv(&a), lv(&b));
            let v = cosine_forcing_translation(&a, &b, CosineTarget::Collinear).unwrap();
            let av = a.zip_with(v.as_slice(), |x, y| x + y);
            let bv = b.zip_with(v.as_slice(), |x, y| x + y);
            let err: f64 = bv.as_slice().iter().zip(av.as_slice())
                .map(|(p, q)| (p - 3.0 * q).powi(2)).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-12 * bv.norm().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn center_cancels_translations(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..12),
            v in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let u = UnembeddingSet::from_unnamed_rows(rows).unwrap();
            let c = center(&u);
            prop_assert!(crate::fixtures::sum_norm(&c) < 1e-12);
            let moved = center(&translate(&u, &TranslationVector::new(v).unwrap()).unwrap());
            for (p, q) in c.vectors().iter().zip(moved.vectors()) {
                for (x, y) in p.as_slice().iter().zip(q.as_slice()) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
            for i in 0..u.k() {
                for j in 0..u.k() {
                    if c.vector(i).norm() > 1e-3 && c.vector(j).norm() > 1e-3 {
                        let a = cosine(c.vector(i), c.vector(j)).unwrap();
                        let b = cosine(moved.vector(i), moved.vector(j)).unwrap();
                        prop_assert!((a - b).abs() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn normalize_keeps_cosines(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 2..10),
        ) {
            let u = UnembeddingSet::from_unnamed_rows(rows).unwrap();
            prop_assume!(u.vectors().iter().all(|v| v.norm() > 1e-6));
            let n = normalize_rows(&u).unwrap();
            for v in n.vectors() {
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            for i in 0..u.k() {
                for j in 0..u.k() {
                    let a = cosine(u.vector(i), u.vector(j)).unwrap();
                    let b = cosine(n.vector(i), n.vector(j)).unwrap();
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn scale_pair_scales_distances(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..10),
            c in 0.05f64..20.0,
        ) {
            let m = SoftmaxModel::from_unembeddings(UnembeddingSet::from_unnamed_rows(rows).unwrap());
            let s = scale_pair(&m, ScalePair::new(c).unwrap()).unwrap();
            for i in 0..m.k() {
                for j in 0..m.k() {
                    let before = euclidean(m.unembeddings().vector(i), m.unembeddings().vector(j)).unwrap();
                    let after = euclidean(s.unembeddings().vector(i), s.unembeddings().vector(j)).unwrap();
                    prop_assert!((after - c * before).abs() <= 1e-12 * c * before);
                }
            }
        }
    }
}
