//! Domain Invariance Score: one minus the distance between the sim and real
//! centroids of conditioned embeddings, divided by √d* and clamped at 0.
//!
//! Larger is better: DIS = 1 means the two centroids coincide. Inputs are
//! expected in `[0, 1]^{d*}` (see [`crate::preprocess::condition`]), where
//! the centroid gap can never exceed √d*.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{Domain, DomainLabels};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisResult {
    pub dis: f64,
    pub centroid_sim: Vec<f64>,
    pub centroid_real: Vec<f64>,
    /// ‖μ_real − μ_sim‖₂ before dimension normalization.
    pub raw_gap: f64,
    pub effective_dim: usize,
    pub n_sim: usize,
    pub n_real: usize,
}

impl DisResult {
    /// `1 − raw_gap/√d*` before the clamp at zero.
    pub fn unclamped(&self) -> f64 {
        1.0 - self.raw_gap / libm::sqrt(self.effective_dim as f64)
    }
}

/// Mean of the selected rows.
pub fn centroid(e: &Matrix, rows: &[usize]) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Err(Error::Empty("centroid"));
    }
    let mut sum = vec![0.0; e.cols()];
    for &r in rows {
        if r >= e.rows() {
            return Err(Error::IndexOutOfRange { index: r, rows: e.rows() });
        }
        for (s, v) in sum.iter_mut().zip(e.row(r)) {
            *s += v;
        }
    }
    let n = rows.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Ok(sum)
}

/// Scores conditioned embeddings `e` (n × d*) against their domain flags.
///
/// `effective_dim` is the d* used for normalization; it must equal the
/// number of columns of `e`.
pub fn domain_invariance_score(e: &Matrix, domains: &DomainLabels, effective_dim: usize) -> Result<DisResult> {
    if domains.len() != e.rows() {
        return Err(Error::ShapeMismatch {
            op: "domain_invariance_score",
            left_rows: e.rows(),
            left_cols: e.cols(),
            right_rows: domains.len(),
            right_cols: 1,
        });
    }
    if effective_dim == 0 || effective_dim != e.cols() {
        return Err(Error::InvalidConfig(alloc::format!(
            "effective dimension {effective_dim} does not match {} conditioned columns",
            e.cols()
        )));
    }
    let sim = domains.indices_of(Domain::Sim);
    let real = domains.indices_of(Domain::Real);
    if sim.is_empty() {
        return Err(Error::MissingDomain(Domain::Sim));
    }
    if real.is_empty() {
        return Err(Error::MissingDomain(Domain::Real));
    }

    let centroid_sim = centroid(e, &sim)?;
    let centroid_real = centroid(e, &real)?;
    let raw_gap = libm::sqrt(
        centroid_real
            .iter()
            .zip(&centroid_sim)
            .map(|(r, s)| (r - s) * (r - s))
            .sum(),
    );
    let dis = (1.0 - raw_gap / libm::sqrt(effective_dim as f64)).max(0.0);
    Ok(DisResult {
        dis,
        centroid_sim,
        centroid_real,
        raw_gap,
        effective_dim,
        n_sim: sim.len(),
        n_real: real.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(flags: &[Domain]) -> DomainLabels {
        DomainLabels::new(flags.to_vec()).unwrap()
    }

    #[test]
    fn centroid_examples() {
        let e = Matrix::from_rows(&[[0.0, 0.0], [2.0, 2.0]]).unwrap();
        assert_eq!(centroid(&e, &[0, 1]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(centroid(&e, &[1]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(centroid(&e, &[]), Err(Error::Empty("centroid")));
    }

    #[test]
    fn centroid_matches_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let e = Matrix::new(100, 8, (0..800).map(|_| rng.random::<f64>()).collect()).unwrap();
        let subset: Vec<usize> = (0..100).filter(|i| i % 3 == 1).collect();
        let c = centroid(&e, &subset).unwrap();
        for j in 0..8 {
            let mut s = 0.0;
            for &i in &subset {
                s += e.get(i, j);
            }
            assert!((c[j] - s / subset.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_domains_score_one() {
        let e = Matrix::from_rows(&[[0.1, 0.7], [0.4, 0.2], [0.1, 0.7], [0.4, 0.2]]).unwrap();
        let d = labels(&[Domain::Sim, Domain::Sim, Domain::Real, Domain::Real]);
        let r = domain_invariance_score(&e, &d, 2).unwrap();
        assert_eq!((r.raw_gap, r.dis), (0.0, 1.0));
    }

    #[test]
    fn opposite_corners_score_zero() {
        let e = Matrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let d = labels(&[Domain::Sim, Domain::Sim, Domain::Real]);
        let r = domain_invariance_score(&e, &d, 3).unwrap();
        assert_eq!(r.raw_gap, libm::sqrt(3.0));
        assert_eq!(r.dis, 0.0);
    }

    #[test]
    fn four_point_fixture() {
        let e = Matrix::from_rows(&[[0.0, 0.0], [0.2, 0.0], [1.0, 0.0], [0.8, 0.0]]).unwrap();
        let d = labels(&[Domain::Sim, Domain::Sim, Domain::Real, Domain::Real]);
        let r = domain_invariance_score(&e, &d, 2).unwrap();
        assert!((r.raw_gap - 0.8).abs() < 1e-12);
        assert!((r.dis - (1.0 - 0.8 / libm::sqrt(2.0))).abs() < 1e-12);
        assert_eq!((r.n_sim, r.n_real), (2, 2));
    }

    #[test]
    fn single_domain_is_rejected() {
        let e = Matrix::zeros(2, 1);
        let err = domain_invariance_score(&e, &labels(&[Domain::Sim, Domain::Sim]), 1).unwrap_err();
        assert_eq!(err, Error::MissingDomain(Domain::Real));
        assert_eq!(err.to_string(), "DIS requires both domains (no real rows present)");
    }

    proptest! {
        #[test]
        fn unit_cube_inputs_never_clamp(seed in any::<u64>(), rows in 2usize..40, cols in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.random::<f64>()).collect()).unwrap();
            let mut flags: Vec<Domain> = (0..rows).map(|_| if rng.random() { Domain::Sim } else { Domain::Real }).collect();
            flags[0] = Domain::Sim;
            flags[1] = Domain::Real;
            let r = domain_invariance_score(&e, &labels(&flags), cols).unwrap();
            prop_assert!(r.unclamped() >= 0.0);
            prop_assert!((r.dis - r.unclamped().max(0.0)).abs() < 1e-12);

            let swapped: Vec<Domain> = flags.iter().map(|d| match d { Domain::Sim => Domain::Real, Domain::Real => Domain::Sim }).collect();
            let s = domain_invariance_score(&e, &labels(&swapped), cols).unwrap();
            prop_assert_eq!(r.dis, s.dis);
        }

        #[test]
        fn within_domain_permutation_is_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = Matrix::new(20, 3, (0..60).map(|_| rng.random::<f64>()).collect()).unwrap();
            let flags: Vec<Domain> = (0..20).map(|i| if i < 10 { Domain::Sim } else { Domain::Real }).collect();
            let mut order: Vec<usize> = (0..10).rev().collect();
            order.extend((10..20).rev());
            let a = domain_invariance_score(&e, &labels(&flags), 3).unwrap();
            let b = domain_invariance_score(&e.select_rows(&order).unwrap(), &labels(&flags), 3).unwrap();
            prop_assert!((a.dis - b.dis).abs() < 1e-12);
        }
    }
}
