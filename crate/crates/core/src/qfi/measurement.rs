use crate::linalg;
use crate::state::DensityMatrix;
use crate::{CMatrix, Complex64, Error, Result};

const COMPLETENESS_TOL: f64 = 1e-12;

/// Probabilities and derivatives below this are treated as a null outcome.
pub const OUTCOME_CUTOFF: f64 = 1e-14;

/// Positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Checks that every element is PSD and that the elements sum to identity.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let d = elements
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidParameter("POVM needs at least one element".into()))?;
        let mut sum = CMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: e.nrows() });
            }
            let eig = linalg::eigh(e).map_err(|_| Error::NonPositiveElement(k))?;
            if eig.values.last().is_some_and(|&v| v < -COMPLETENESS_TOL) {
                return Err(Error::NonPositiveElement(k));
            }
            sum += e;
        }
        let dev = linalg::max_abs_diff(&sum, &CMatrix::identity(d, d));
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Self { elements })
    }

    /// Rank-one projectors onto the columns of a unitary basis matrix.
    pub fn projective(basis: &CMatrix) -> Result<Self> {
        let elements = basis
            .column_iter()
            .map(|col| {
                let v = col.into_owned();
                &v * v.adjoint()
            })
            .collect();
        Self::new(elements)
    }

    /// Computational-basis measurement on a `dim`-dimensional space.
    pub fn computational(dim: usize) -> Result<Self> {
        Self::projective(&CMatrix::identity(dim, dim))
    }

    /// σ_x eigenbasis projectors.
    pub fn pauli_x() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::projective(&CMatrix::from_row_slice(2, 2, &[h, h, h, -h])).expect("σ_x basis is orthonormal")
    }

    /// σ_y eigenbasis projectors.
    pub fn pauli_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)],
        );
        Self::projective(&basis).expect("σ_y basis is orthonormal")
    }

    /// Projective measurement in the eigenbasis of a Hermitian operator.
    pub fn eigenbasis_of(op: &CMatrix) -> Result<Self> {
        Self::projective(&linalg::eigh(op)?.vectors)
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

/// Classical Fisher information Σ_i (∂P_i)²/P_i of a measurement.
pub fn classical_fi(povm: &Povm, rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    let d = rho.dim();
    if povm.elements[0].nrows() != d || drho.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: povm.elements[0].nrows(),
        });
    }
    let mut acc = crate::summation::NeumaierSum::new();
    for e in &povm.elements {
        let p = linalg::trace_product(e, rho.matrix()).re;
        let dp = linalg::trace_product(e, drho).re;
        if p < OUTCOME_CUTOFF && dp.abs() < OUTCOME_CUTOFF {
            continue;
        }
        acc.add(dp * dp / p);
    }
    Ok(acc.value())
}
