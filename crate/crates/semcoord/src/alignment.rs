//! Alignment of per-slice embeddings into the base embedding space.
//!
//! Anchored on the most frequent shared words, a D×D projection Q is fitted
//! so that W_slice·Q approximates W_base over the anchors — either the
//! unconstrained least-squares minimizer (a pseudoinverse solve) or the
//! orthogonal Procrustes solution with QᵀQ = I.

use nalgebra::DMatrix;

use std::path::Path;

use crate::trainer::{quantize9, EmbeddingMatrix};
use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero
/// when ranking and inverting the anchor matrix.
const RANK_TOLERANCE: f64 = 1e-10;

/// A fitted slice-to-base projection.
///
/// The matrix is quantized to 9 significant digits at construction, so a
/// save/load cycle reproduces it bit for bit and cached projections behave
/// identically to freshly fitted ones. The residual is kept at full
/// precision in memory (it is diagnostic, not an input to anything) and
/// rounds to 9 significant digits in the file.
#[derive(Debug, Clone)]
pub struct ProjectionMap {
    q: DMatrix<f64>,
    /// Anchor words used for the fit (empty on maps loaded from disk, which
    /// only record the count).
    pub anchor_words: Vec<String>,
    pub anchor_count: usize,
    /// Frobenius norm of (W_base − W_slice·Q) over the anchor rows.
    pub residual: f64,
    pub orthogonal: bool,
}

impl ProjectionMap {
    pub fn dimension(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Project a single row vector: v ↦ v·Q.
    pub fn apply_to_vector(&self, v: &[f64]) -> Result<Vec<f64>> {
        let d = self.q.nrows();
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: d,
            });
        }
        Ok((0..d)
            .map(|j| (0..d).map(|k| v[k] * self.q[(k, j)]).sum())
            .collect())
    }

    /// Serialize as text: a header line
    /// `D orthogonal_flag residual anchor_count`, then D rows of D reals.
    pub fn save_text(&self, path: &Path) -> Result<()> {
        let d = self.q.nrows();
        let mut out = String::with_capacity(d * d * 18 + 64);
        out.push_str(&format!(
            "{d} {} {:.8e} {}\n",
            u8::from(self.orthogonal),
            self.residual,
            self.anchor_count
        ));
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{:.8e}", self.q[(i, j)]));
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |msg: String| Error::FileFormat {
            path: path.to_path_buf(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("header must be: D orthogonal residual anchors".into()));
        }
        let d: usize = fields[0].parse().map_err(|_| bad("bad dimension".into()))?;
        let orthogonal = match fields[1] {
            "0" => false,
            "1" => true,
            _ => return Err(bad("orthogonal flag must be 0 or 1".into())),
        };
        let residual: f64 = fields[2].parse().map_err(|_| bad("bad residual".into()))?;
        let anchor_count: usize = fields[3]
            .parse()
            .map_err(|_| bad("bad anchor count".into()))?;

        let mut entries = Vec::with_capacity(d * d);
        for (i, line) in lines.enumerate() {
            if i >= d {
                return Err(bad(format!("more than {d} matrix rows")));
            }
            let mut n = 0;
            for f in line.split_whitespace() {
                let x: f64 = f
                    .parse()
                    .map_err(|_| bad(format!("row {i}: bad real {f:?}")))?;
                entries.push(x);
                n += 1;
            }
            if n != d {
                return Err(bad(format!("row {i}: expected {d} reals, got {n}")));
            }
        }
        if entries.len() != d * d {
            return Err(bad(format!(
                "expected {d} matrix rows, got {}",
                entries.len() / d.max(1)
            )));
        }
        Ok(ProjectionMap {
            q: DMatrix::from_row_slice(d, d, &entries),
            anchor_words: Vec::new(),
            anchor_count,
            residual,
            orthogonal,
        })
    }
}

/// The `v_anchor` most frequent base-corpus words that also appear in the
/// slice vocabulary, in base frequency order. When the shared vocabulary is
/// smaller than `v_anchor`, every shared word is returned (the caller may
/// warn); fewer shared words than the embedding dimension is an error, since
/// the fit would be underdetermined.
pub fn select_anchors(
    slice: &EmbeddingMatrix,
    base: &EmbeddingMatrix,
    v_anchor: usize,
) -> Result<Vec<String>> {
    if slice.dimension() != base.dimension() {
        return Err(Error::DimensionMismatch {
            left: slice.dimension(),
            right: base.dimension(),
        });
    }
    let mut anchors = Vec::new();
    for word in base.vocab().words() {
        if anchors.len() == v_anchor {
            break;
        }
        if slice.vocab().id(word).is_some() {
            anchors.push(word.clone());
        }
    }
    if anchors.len() < base.dimension() {
        return Err(Error::TooFewAnchors {
            found: anchors.len(),
            need: base.dimension(),
        });
    }
    Ok(anchors)
}

/// Gather the anchor rows of both embeddings as (slice matrix, base matrix).
fn anchor_matrices(
    slice: &EmbeddingMatrix,
    base: &EmbeddingMatrix,
    anchors: &[String],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = slice.dimension();
    if base.dimension() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: base.dimension(),
        });
    }
    if anchors.len() < d {
        return Err(Error::TooFewAnchors {
            found: anchors.len(),
            need: d,
        });
    }
    let mut a = DMatrix::zeros(anchors.len(), d);
    let mut b = DMatrix::zeros(anchors.len(), d);
    for (i, word) in anchors.iter().enumerate() {
        let vs = slice
            .vector(word)
            .ok_or_else(|| Error::OutOfVocabulary { word: word.clone() })?;
        let vb = base
            .vector(word)
            .ok_or_else(|| Error::OutOfVocabulary { word: word.clone() })?;
        for j in 0..d {
            a[(i, j)] = vs[j];
            b[(i, j)] = vb[j];
        }
    }
    Ok((a, b))
}

fn quantize_matrix(m: &mut DMatrix<f64>) {
    for x in m.iter_mut() {
        *x = quantize9(*x);
    }
}

fn finish_map(
    mut q: DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    anchors: &[String],
    orthogonal: bool,
) -> ProjectionMap {
    quantize_matrix(&mut q);
    let residual = (b - a * &q).norm();
    ProjectionMap {
        q,
        anchor_words: anchors.to_vec(),
        anchor_count: anchors.len(),
        residual,
        orthogonal,
    }
}

/// Fit the unconstrained least-squares projection Q minimizing
/// ‖W_base − W_slice·Q‖_F over the anchor rows, via the SVD pseudoinverse.
pub fn fit_projection(
    slice: &EmbeddingMatrix,
    base: &EmbeddingMatrix,
    anchors: &[String],
) -> Result<ProjectionMap> {
    let (a, b) = anchor_matrices(slice, base, anchors)?;
    let d = a.ncols();
    let svd = a.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let tol = RANK_TOLERANCE * sigma.max();
    let rank = sigma.iter().filter(|&&s| s > tol).count();
    if rank < d {
        return Err(Error::RankDeficient { rank, need: d });
    }
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");

    // Q = V · Σ⁻¹ · Uᵀ · B  (all singular values retained once rank passed).
    let mut ut_b = u.transpose() * &b;
    for i in 0..d {
        let inv = 1.0 / sigma[i];
        for j in 0..d {
            ut_b[(i, j)] *= inv;
        }
    }
    let q = v_t.transpose() * ut_b;
    Ok(finish_map(q, &a, &b, anchors, false))
}

/// Fit the orthogonal Procrustes projection Q = U·Vᵀ from the SVD of
/// W_sliceᵀ·W_base; the constrained optimum over QᵀQ = I.
pub fn fit_projection_orthogonal(
    slice: &EmbeddingMatrix,
    base: &EmbeddingMatrix,
    anchors: &[String],
) -> Result<ProjectionMap> {
    let (a, b) = anchor_matrices(slice, base, anchors)?;
    let d = a.ncols();
    let sigma_a = a.clone().svd(false, false).singular_values;
    let tol = RANK_TOLERANCE * sigma_a.max();
    let rank = sigma_a.iter().filter(|&&s| s > tol).count();
    if rank < d {
        return Err(Error::RankDeficient { rank, need: d });
    }

    let m = a.transpose() * &b;
    let svd = m.svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let q = u * v_t;
    Ok(finish_map(q, &a, &b, anchors, true))
}

/// Project every row of `emb` into base space: W ↦ W·Q.
pub fn apply_projection(emb: &EmbeddingMatrix, map: &ProjectionMap) -> Result<EmbeddingMatrix> {
    let d = emb.dimension();
    if map.dimension() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: map.dimension(),
        });
    }
    let v = emb.len();
    let w = DMatrix::from_fn(v, d, |i, j| emb.row(i as u32)[j]);
    let projected = w * &map.q;
    let mut data = Vec::with_capacity(v * d);
    for i in 0..v {
        for j in 0..d {
            data.push(projected[(i, j)]);
        }
    }
    EmbeddingMatrix::new(emb.vocab().clone(), d, data, emb.provenance.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;
    use crate::trainer::{cosine, Provenance};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Embedding with rows filled from `data`, words named w0, w1, ... in
    /// frequency order.
    fn embedding(data: &DMatrix<f64>) -> EmbeddingMatrix {
        let words: Vec<String> = (0..data.nrows()).map(|i| format!("w{i}")).collect();
        let vocab = Vocabulary::from_ordered_words(words);
        let mut flat = Vec::with_capacity(data.nrows() * data.ncols());
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                flat.push(data[(i, j)]);
            }
        }
        EmbeddingMatrix::new(vocab, data.ncols(), flat, Provenance::default()).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0))
    }

    /// Random orthogonal matrix via QR of a Gaussian-ish square matrix.
    fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
        let m = random_matrix(rng, d, d);
        let qr = m.qr();
        qr.q()
    }

    fn anchor_names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    #[test]
    fn identity_data_gives_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_matrix(&mut rng, 60, 8);
        let emb = embedding(&w);
        let map = fit_projection(&emb, &emb, &anchor_names(60)).unwrap();
        let eye = DMatrix::<f64>::identity(8, 8);
        assert!((map.matrix() - eye).norm() < 1e-10);
        assert!(map.residual < 1e-9);
        assert!(!map.orthogonal);
    }

    #[test]
    fn recovers_planted_linear_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_matrix(&mut rng, 200, 20);
        let r = random_matrix(&mut rng, 20, 20);
        let base = embedding(&(&w * &r));
        let slice = embedding(&w);
        let map = fit_projection(&slice, &base, &anchor_names(200)).unwrap();
        assert!(
            (map.matrix() - &r).norm() < 1e-6,
            "recovery error {}",
            (map.matrix() - &r).norm()
        );
    }

    #[test]
    fn recovers_planted_rotation_orthogonally() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_matrix(&mut rng, 150, 12);
        let r = random_rotation(&mut rng, 12);
        let base = embedding(&(&w * &r));
        let slice = embedding(&w);
        let map = fit_projection_orthogonal(&slice, &base, &anchor_names(150)).unwrap();
        assert!(
            (map.matrix() - &r).norm() < 1e-6,
            "recovery error {}",
            (map.matrix() - &r).norm()
        );
        assert!(map.orthogonal);
        assert!(map.residual < 1e-6);
    }

    #[test]
    fn orthogonal_maps_satisfy_the_orthogonality_bound() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let slice = embedding(&random_matrix(&mut rng, 80, 10));
            let base = embedding(&random_matrix(&mut rng, 80, 10));
            let map = fit_projection_orthogonal(&slice, &base, &anchor_names(80)).unwrap();
            let qtq = map.matrix().transpose() * map.matrix();
            let eye = DMatrix::<f64>::identity(10, 10);
            let dev = (qtq - eye).norm();
            assert!(dev <= 1e-8, "seed {seed}: ||QtQ - I|| = {dev}");
        }
    }

    #[test]
    fn fitted_residual_beats_identity_and_orthogonal_never_beats_relaxed() {
        for seed in 10..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 50, 6);
            let b = random_matrix(&mut rng, 50, 6);
            let (slice, base) = (embedding(&a), embedding(&b));
            let relaxed = fit_projection(&slice, &base, &anchor_names(50)).unwrap();
            let orthogonal =
                fit_projection_orthogonal(&slice, &base, &anchor_names(50)).unwrap();
            let identity_residual = (&b - &a).norm();
            assert!(relaxed.residual <= identity_residual + 1e-9);
            assert!(
                orthogonal.residual >= relaxed.residual - 1e-9,
                "seed {seed}: constrained {} < unconstrained {}",
                orthogonal.residual,
                relaxed.residual
            );
        }
    }

    #[test]
    fn residual_matches_independent_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 40, 5);
        let b = random_matrix(&mut rng, 40, 5);
        let (slice, base) = (embedding(&a), embedding(&b));
        for map in [
            fit_projection(&slice, &base, &anchor_names(40)).unwrap(),
            fit_projection_orthogonal(&slice, &base, &anchor_names(40)).unwrap(),
        ] {
            // Hand-rolled recomputation over the embedding rows the fit saw.
            let mut acc = 0.0;
            for i in 0..40u32 {
                let (vs, vb) = (slice.row(i), base.row(i));
                for j in 0..5 {
                    let mut proj = 0.0;
                    for k in 0..5 {
                        proj += vs[k] * map.matrix()[(k, j)];
                    }
                    acc += (vb[j] - proj) * (vb[j] - proj);
                }
            }
            assert!((map.residual - acc.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn equivariant_under_right_multiplication_of_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 60, 7);
        let b = random_matrix(&mut rng, 60, 7);
        let m = random_matrix(&mut rng, 7, 7); // invertible w.h.p.
        let plain = fit_projection(&embedding(&a), &embedding(&b), &anchor_names(60)).unwrap();
        let pushed = fit_projection(
            &embedding(&a),
            &embedding(&(&b * &m)),
            &anchor_names(60),
        )
        .unwrap();
        let expected = plain.matrix() * &m;
        let deviation = (pushed.matrix() - expected).norm();
        assert!(deviation < 1e-6, "equivariance error {deviation}");
    }

    #[test]
    fn rank_deficient_anchors_report_effective_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut a = random_matrix(&mut rng, 30, 6);
        for i in 0..30 {
            a[(i, 5)] = a[(i, 0)]; // duplicate column kills full rank
        }
        let b = random_matrix(&mut rng, 30, 6);
        let err = fit_projection(&embedding(&a), &embedding(&b), &anchor_names(30)).unwrap_err();
        match err {
            Error::RankDeficient { rank, need } => {
                assert_eq!(rank, 5);
                assert_eq!(need, 6);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn too_few_anchors_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 4, 6);
        let b = random_matrix(&mut rng, 4, 6);
        assert!(matches!(
            fit_projection(&embedding(&a), &embedding(&b), &anchor_names(4)),
            Err(Error::TooFewAnchors { found: 4, need: 6 })
        ));
    }

    #[test]
    fn anchor_selection_orders_by_base_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let base = embedding(&random_matrix(&mut rng, 6, 2));
        // Slice shares w1, w3, w4, w5 only.
        let slice_words = ["w1", "w3", "w4", "w5"];
        let vocab =
            Vocabulary::from_ordered_words(slice_words.iter().map(|s| s.to_string()).collect());
        let data = vec![0.5; 4 * 2];
        let slice = EmbeddingMatrix::new(vocab, 2, data, Provenance::default()).unwrap();

        let top3 = select_anchors(&slice, &base, 3).unwrap();
        assert_eq!(top3, ["w1", "w3", "w4"]);
        // Requesting more than the shared vocabulary returns all of it.
        let all = select_anchors(&slice, &base, 100).unwrap();
        assert_eq!(all, ["w1", "w3", "w4", "w5"]);
    }

    #[test]
    fn disjoint_vocabularies_underdetermined() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = embedding(&random_matrix(&mut rng, 5, 2));
        let vocab = Vocabulary::from_ordered_words(vec!["zzz".into(), "yyy".into()]);
        let slice =
            EmbeddingMatrix::new(vocab, 2, vec![0.1; 4], Provenance::default()).unwrap();
        assert!(matches!(
            select_anchors(&slice, &base, 5),
            Err(Error::TooFewAnchors { found: 0, .. })
        ));
    }

    #[test]
    fn apply_rotates_rows() {
        // Fit against a 90-degree planted rotation, then check a known row.
        let w = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let slice = embedding(&w);
        let base = embedding(&(&w * &r));
        let map = fit_projection_orthogonal(&slice, &base, &anchor_names(3)).unwrap();
        let out = apply_projection(&slice, &map).unwrap();
        let row = out.vector("w0").unwrap();
        assert!(row[0].abs() < 1e-8);
        assert_relative_eq!(row[1], 1.0, epsilon = 1e-8);

        // Identity map leaves the embedding unchanged.
        let id_map = fit_projection(&slice, &slice, &anchor_names(3)).unwrap();
        let same = apply_projection(&slice, &id_map).unwrap();
        for i in 0..3u32 {
            for (x, y) in slice.row(i).iter().zip(same.row(i)) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn projection_brings_anchors_closer_to_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_matrix(&mut rng, 80, 8);
        let r = random_matrix(&mut rng, 8, 8);
        let noise = random_matrix(&mut rng, 80, 8) * 0.01;
        let b = &a * &r + noise;
        let (slice, base) = (embedding(&a), embedding(&b));
        let map = fit_projection(&slice, &base, &anchor_names(80)).unwrap();
        let projected = apply_projection(&slice, &map).unwrap();
        let mut before = 0.0;
        let mut after = 0.0;
        for i in 0..80u32 {
            for j in 0..8 {
                let target = base.row(i)[j];
                before += (target - slice.row(i)[j]).powi(2);
                after += (target - projected.row(i)[j]).powi(2);
            }
        }
        assert!(after < before);
    }

    #[test]
    fn orthogonal_projection_preserves_cosines() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = random_matrix(&mut rng, 30, 10);
        let r = random_rotation(&mut rng, 10);
        let slice = embedding(&w);
        let base = embedding(&(&w * &r));
        let map = fit_projection_orthogonal(&slice, &base, &anchor_names(30)).unwrap();
        let projected = apply_projection(&slice, &map).unwrap();
        for i in 0..10u32 {
            for j in (i + 1)..10 {
                let before = cosine(slice.row(i), slice.row(j)).unwrap();
                let after = cosine(projected.row(i), projected.row(j)).unwrap();
                assert!(
                    (before - after).abs() <= 1e-8,
                    "cosine drifted {} -> {}",
                    before,
                    after
                );
            }
        }
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 40, 6);
        let b = random_matrix(&mut rng, 40, 6);
        let map =
            fit_projection_orthogonal(&embedding(&a), &embedding(&b), &anchor_names(40)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.txt");
        map.save_text(&path).unwrap();
        let loaded = ProjectionMap::load_text(&path).unwrap();

        assert_eq!(loaded.dimension(), 6);
        assert!(loaded.orthogonal);
        assert_eq!(loaded.anchor_count, 40);
        // The file carries 9 significant digits of the residual.
        assert_eq!(loaded.residual.to_bits(), quantize9(map.residual).to_bits());
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(
                    loaded.matrix()[(i, j)].to_bits(),
                    map.matrix()[(i, j)].to_bits()
                );
            }
        }
        // The loaded (quantized) map still satisfies the orthogonality bound.
        let qtq = loaded.matrix().transpose() * loaded.matrix();
        assert!((qtq - DMatrix::<f64>::identity(6, 6)).norm() <= 1e-8);

        // Saving what was loaded reproduces the file byte for byte.
        let path2 = dir.path().join("map2.txt");
        loaded.save_text(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn load_rejects_malformed_maps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        for bad in [
            "",
            "2 1 0.0\n",
            "2 x 0.0 3\n1.0 0.0\n0.0 1.0\n",
            "2 1 0.0 3\n1.0\n0.0 1.0\n",
            "2 1 0.0 3\n1.0 0.0\n",
        ] {
            std::fs::write(&path, bad).unwrap();
            assert!(ProjectionMap::load_text(&path).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn apply_to_vector_matches_matrix_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_matrix(&mut rng, 20, 4);
        let b = random_matrix(&mut rng, 20, 4);
        let map = fit_projection(&embedding(&a), &embedding(&b), &anchor_names(20)).unwrap();
        let v = [0.3, -0.7, 1.1, 0.05];
        let out = map.apply_to_vector(&v).unwrap();
        for j in 0..4 {
            let expected: f64 = (0..4).map(|k| v[k] * map.matrix()[(k, j)]).sum();
            assert_eq!(out[j], expected);
        }
        assert!(map.apply_to_vector(&[1.0, 2.0]).is_err());
    }
}
