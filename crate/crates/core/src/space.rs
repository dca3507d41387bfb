//! Symmetrically self-dual spaces on `ℝⁿ`.
//!
//! The bilinear form is `⌊b,c⌋ = bᵀSc` for a symmetric matrix `S`, the
//! quadratic form is `q(b) = ½⌊b,b⌋`, and the norm is Euclidean. When
//! `‖S‖ ≤ 1` the space is a Banach SSD space and `g = ½‖·‖²`, `p = g + q ≥ 0`
//! are available.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Slack allowed on `‖S‖ ≤ 1` before a space stops counting as Banach.
pub const BANACH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsdSpace {
    dim: usize,
    form: DMatrix<f64>,
    norm: NormKind,
    spectral_norm: f64,
    banach: bool,
}

impl SsdSpace {
    /// Validates `form` and builds the space.
    ///
    /// Asymmetric input is rejected outright rather than symmetrized.
    pub fn new(form: DMatrix<f64>, require_banach: bool) -> Result<Self> {
        if form.nrows() != form.ncols() {
            return Err(Error::InvalidParams(format!(
                "form must be square, got {}x{}",
                form.nrows(),
                form.ncols()
            )));
        }
        if form.nrows() == 0 {
            return Err(Error::InvalidParams("form must be nonempty".into()));
        }
        if form.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("form entries must be finite".into()));
        }
        let asymmetry = linalg::max_asymmetry(&form);
        if asymmetry > 0.0 {
            return Err(Error::AsymmetricForm { asymmetry });
        }
        let spectral_norm = linalg::spectral_norm(&form, 1e-10);
        let banach = spectral_norm <= 1.0 + BANACH_SLACK;
        if require_banach && !banach {
            return Err(Error::NotBanach {
                norm: spectral_norm,
            });
        }
        Ok(Self {
            dim: form.nrows(),
            form,
            norm: NormKind::Euclidean,
            spectral_norm,
            banach,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], require_banach: bool) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams("form must be square".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat), require_banach)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form_matrix(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn spectral_norm(&self) -> f64 {
        self.spectral_norm
    }

    pub fn is_banach(&self) -> bool {
        self.banach
    }

    pub fn check_len(&self, v: &[f64]) -> Result<()> {
        check_dim(self.dim, v.len())
    }

    /// `⌊b,c⌋ = bᵀSc`, exactly symmetric in its arguments.
    pub fn form(&self, b: &[f64], c: &[f64]) -> Result<f64> {
        self.check_len(b)?;
        self.check_len(c)?;
        Ok(self.form_unchecked(b, c))
    }

    pub(crate) fn form_unchecked(&self, b: &[f64], c: &[f64]) -> f64 {
        linalg::sym_bilinear(&self.form, b, c)
    }

    pub fn q(&self, b: &[f64]) -> Result<f64> {
        self.check_len(b)?;
        Ok(self.q_unchecked(b))
    }

    pub(crate) fn q_unchecked(&self, b: &[f64]) -> f64 {
        0.5 * linalg::sym_bilinear(&self.form, b, b)
    }

    /// `q(b − c)` without allocating.
    pub(crate) fn q_diff(&self, b: &[f64], c: &[f64]) -> f64 {
        let n = b.len();
        let mut acc = 0.0;
        for i in 0..n {
            let di = b[i] - c[i];
            acc += 0.5 * self.form[(i, i)] * di * di;
            for j in (i + 1)..n {
                acc += self.form[(i, j)] * di * (b[j] - c[j]);
            }
        }
        acc
    }

    /// `g(b) = ½‖b‖²`.
    pub fn g(&self, b: &[f64]) -> Result<f64> {
        self.require_banach()?;
        self.check_len(b)?;
        Ok(0.5 * linalg::dot(b, b))
    }

    /// `p(b) = g(b) + q(b)`, nonnegative on a Banach SSD space.
    pub fn p(&self, b: &[f64]) -> Result<f64> {
        self.require_banach()?;
        self.check_len(b)?;
        Ok(self.p_unchecked(b))
    }

    pub(crate) fn p_unchecked(&self, b: &[f64]) -> f64 {
        0.5 * linalg::dot(b, b) + self.q_unchecked(b)
    }

    pub(crate) fn p_diff(&self, b: &[f64], c: &[f64]) -> f64 {
        let sq: f64 = b.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum();
        0.5 * sq + self.q_diff(b, c)
    }

    pub fn require_banach(&self) -> Result<()> {
        if self.banach {
            Ok(())
        } else {
            Err(Error::NotBanachSpace)
        }
    }

    /// `S b`, the image of `b` under the canonical map into the dual.
    pub fn apply_form(&self, b: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.form, b)
    }

    /// Block-diagonal product `B1 × B2` with the ℓ² product norm.
    pub fn product(&self, other: &SsdSpace) -> Result<SsdSpace> {
        let n = self.dim + other.dim;
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (self.dim, self.dim))
            .copy_from(&self.form);
        m.view_mut((self.dim, self.dim), (other.dim, other.dim))
            .copy_from(&other.form);
        SsdSpace::new(m, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3_swap() -> SsdSpace {
        SsdSpace::from_rows(
            &[vec![0., 1., 0.], vec![1., 0., 0.], vec![0., 0., 1.]],
            true,
        )
        .unwrap()
    }

    #[test]
    fn swap_matrix_is_banach() {
        let s = r3_swap();
        assert!(s.is_banach());
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn doubled_identity_is_not_banach() {
        let err = SsdSpace::new(DMatrix::identity(2, 2) * 2.0, true).unwrap_err();
        assert!(matches!(err, Error::NotBanach { .. }));
        // Accepted when the Banach property is not required.
        let s = SsdSpace::new(DMatrix::identity(2, 2) * 2.0, false).unwrap();
        assert!(!s.is_banach());
        assert_eq!(s.p(&[1.0, 0.0]), Err(Error::NotBanachSpace));
    }

    #[test]
    fn cyclic_form_is_rejected() {
        // b1c2 + b2c3 + b3c1
        let s = SsdSpace::from_rows(
            &[vec![0., 1., 0.], vec![0., 0., 1.], vec![1., 0., 0.]],
            false,
        );
        assert!(matches!(s, Err(Error::AsymmetricForm { .. })));
    }

    #[test]
    fn form_values() {
        let s = r3_swap();
        assert_eq!(s.form(&[1., 0., 0.], &[0., 1., 0.]).unwrap(), 1.0);
        assert_eq!(s.form(&[1., 2., 3.], &[0., 0., 0.]).unwrap(), 0.0);
        let pairing = SsdSpace::from_rows(&[vec![0., 1.], vec![1., 0.]], true).unwrap();
        assert_eq!(pairing.form(&[1., 2.], &[3., 4.]).unwrap(), 10.0);
        assert_eq!(
            s.form(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn q_values() {
        let s = r3_swap();
        assert_eq!(s.q(&[1., -1., 2.]).unwrap(), 1.0);
        assert_eq!(s.q(&[0., 0., 0.]).unwrap(), 0.0);
        let pairing = SsdSpace::from_rows(&[vec![0., 1.], vec![1., 0.]], true).unwrap();
        assert_eq!(pairing.q(&[2., 3.]).unwrap(), 6.0);
    }

    #[test]
    fn p_values() {
        let pairing = SsdSpace::from_rows(&[vec![0., 1.], vec![1., 0.]], true).unwrap();
        assert_eq!(pairing.p(&[0., 0.]).unwrap(), 0.0);
        assert_eq!(pairing.p(&[1., 1.]).unwrap(), 2.0);
        assert_eq!(pairing.p(&[1., -1.]).unwrap(), 0.0);
        assert_eq!(pairing.g(&[3., 4.]).unwrap(), 12.5);
    }

    #[test]
    fn non_square_and_nonfinite_rejected() {
        assert!(matches!(
            SsdSpace::new(DMatrix::zeros(2, 3), false),
            Err(Error::InvalidParams(_))
        ));
        let mut m = DMatrix::identity(2, 2);
        m[(0, 0)] = f64::NAN;
        assert!(matches!(
            SsdSpace::new(m, false),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn product_is_block_diagonal() {
        let pairing = SsdSpace::from_rows(&[vec![0., 1.], vec![1., 0.]], true).unwrap();
        let p = r3_swap().product(&pairing).unwrap();
        assert_eq!(p.dim(), 5);
        assert_eq!(p.form_matrix()[(3, 4)], 1.0);
        assert_eq!(p.form_matrix()[(0, 3)], 0.0);
        assert!(p.is_banach());
    }
}
