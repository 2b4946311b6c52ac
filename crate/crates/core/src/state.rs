//! Probe states and the independent-dephasing channel.
//!
//! Basis convention: for an N-qubit register, qubit `q` is bit `N − 1 − q` of
//! the computational-basis index, i.e. qubit 0 is the most significant bit.
//!
//! Dephasing acts independently on every qubit listed in a [`ProbeLayout`].
//! Its closed form multiplies entry (I, J) of the density matrix by
//! `exp(−h·Γ)`, where `h` is the number of noisy qubits at which the basis
//! strings I and J differ. [`apply_kraus_tensor`] applies the same channel
//! through the explicit tensor-product Kraus sum and serves as its oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, Eigen};
use crate::{CMatrix, Complex64, Error, Result, MAX_QUBITS};

const NORM_TOL: f64 = 1e-12;

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("register needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

/// Normalised state vector of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes after checking length and unit norm.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm² is {norm2}, expected 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Normalises arbitrary nonzero amplitudes.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalise a zero or non-finite vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        let d = self.dim();
        let entries = CMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries,
        }
    }
}

/// cos(θ₀/2)|0⟩ + sin(θ₀/2)e^{iφ₀}|1⟩.
pub fn make_single(theta0: f64, phi0: f64) -> PureState {
    let (s, c) = (0.5 * theta0).sin_cos();
    PureState {
        n_qubits: 1,
        amplitudes: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi0)],
    }
}

/// (|0…0⟩ + |1…1⟩)/√2.
pub fn make_ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("GHZ state needs N >= 2, got {n}")));
    }
    check_qubits(n)?;
    let d = 1usize << n;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); d];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = h;
    amplitudes[d - 1] = h;
    Ok(PureState { n_qubits: n, amplitudes })
}

/// Uniform superposition of the N Hamming-weight-1 basis states.
pub fn make_w(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("W state needs N >= 2, got {n}")));
    }
    check_qubits(n)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for q in 0..n {
        amplitudes[1 << q] = a;
    }
    Ok(PureState { n_qubits: n, amplitudes })
}

/// Haar-random pure state from the ChaCha20 stream `(seed, 0)`.
///
/// See [`random_pure_indexed`] for the sampling algorithm.
pub fn random_pure(n: usize, seed: u64) -> Result<PureState> {
    random_pure_indexed(n, seed, 0)
}

/// Haar-random pure state for sample `index` of a run seeded with `seed`.
///
/// Generator: ChaCha20 (`rand_chacha::ChaCha20Rng`) keyed by
/// `seed_from_u64(seed)`, with the stream id set to `index`. The 2^N
/// coordinates are drawn in basis order, real part then imaginary part, each
/// from `rand_distr::StandardNormal`, and the vector is normalised. Distinct
/// indices give independent streams, so samples can be drawn in any order.
pub fn random_pure_indexed(n: usize, seed: u64, index: u64) -> Result<PureState> {
    check_qubits(n)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let amplitudes: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::normalized(n, amplitudes)
}

/// Hermitian, unit-trace, positive semidefinite matrix on N qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, entries: CMatrix) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        let dev = linalg::hermitian_deviation(&entries);
        if dev > NORM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("trace is {tr}, expected 1")));
        }
        let min = linalg::eigh(&entries)?.values.last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {min}")));
        }
        Ok(Self { n_qubits, entries })
    }

    /// Single-qubit state [[p, q], [q*, 1 − p]].
    pub fn single_qubit(p: f64, q: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("population must lie in [0, 1], got {p}")));
        }
        if q.norm_sqr() > p * (1.0 - p) + NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "|q|² = {} exceeds p(1 − p) = {}",
                q.norm_sqr(),
                p * (1.0 - p)
            )));
        }
        let entries = CMatrix::from_row_slice(2, 2, &[Complex64::new(p, 0.0), q, q.conj(), Complex64::new(1.0 - p, 0.0)]);
        Ok(Self { n_qubits: 1, entries })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            entries: CMatrix::identity(d, d).scale(1.0 / d as f64),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.entries)
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}

impl From<PureState> for DensityMatrix {
    fn from(psi: PureState) -> Self {
        psi.density()
    }
}

/// Register size and the qubits coupled to the bath.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeLayout {
    n_total: usize,
    noisy: Vec<usize>,
}

impl ProbeLayout {
    pub fn new(n_total: usize, mut noisy: Vec<usize>) -> Result<Self> {
        check_qubits(n_total)?;
        noisy.sort_unstable();
        if noisy.is_empty() {
            return Err(Error::InvalidParameter("layout needs at least one noisy qubit".into()));
        }
        if noisy.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("noisy qubit indices must be distinct".into()));
        }
        if let Some(&q) = noisy.iter().find(|&&q| q >= n_total) {
            return Err(Error::InvalidParameter(format!("qubit index {q} out of range for N = {n_total}")));
        }
        Ok(Self { n_total, noisy })
    }

    /// Every qubit passes through the channel.
    pub fn parallel(n_total: usize) -> Result<Self> {
        Self::new(n_total, (0..n_total).collect())
    }

    /// The last `n` qubits are noisy; the first `N − n` are noiseless ancillas.
    pub fn ancilla(n_total: usize, n: usize) -> Result<Self> {
        if n == 0 || n > n_total {
            return Err(Error::InvalidParameter(format!("need 1 <= n <= N, got n = {n}, N = {n_total}")));
        }
        Self::new(n_total, (n_total - n..n_total).collect())
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_noisy(&self) -> usize {
        self.noisy.len()
    }

    pub fn noisy(&self) -> &[usize] {
        &self.noisy
    }

    pub fn is_parallel(&self) -> bool {
        self.noisy.len() == self.n_total
    }

    /// Basis-index bitmask selecting the noisy qubits.
    pub fn mask(&self) -> usize {
        self.noisy.iter().fold(0, |m, &q| m | 1 << (self.n_total - 1 - q))
    }

    /// Every layout on `n_total` qubits (all nonempty noisy subsets).
    pub fn all(n_total: usize) -> Result<Vec<Self>> {
        check_qubits(n_total)?;
        (1usize..1 << n_total)
            .map(|subset| Self::new(n_total, (0..n_total).filter(|q| subset >> q & 1 == 1).collect()))
            .collect()
    }
}

/// Single-qubit dephasing Kraus pair at decay factor Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub k1: CMatrix,
    pub k2: CMatrix,
}

/// Weights √((1 ± e^{−Γ})/2) of the Kraus pair.
pub(crate) fn kraus_weights(gamma: f64) -> (f64, f64) {
    let e = (-gamma).exp();
    // 1 − e^{−Γ} via expm1 keeps small-Γ weights accurate
    (((1.0 + e) / 2.0).sqrt(), (-(-gamma).exp_m1() / 2.0).sqrt())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() && gamma != f64::INFINITY {
        return Err(Error::NonFinite("gamma"));
    }
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    Ok(())
}

/// k₁ = √((1+e^{−Γ})/2)·I, k₂ = √((1−e^{−Γ})/2)·σ_z.
pub fn kraus_pair(gamma: f64) -> Result<KrausPair> {
    check_gamma(gamma)?;
    let (w1, w2) = kraus_weights(gamma);
    let r = |x: f64| Complex64::new(x, 0.0);
    Ok(KrausPair {
        k1: CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r(w1), r(w1)])),
        k2: CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r(w2), r(-w2)])),
    })
}

fn check_layout(rho: &DensityMatrix, layout: &ProbeLayout) -> Result<()> {
    if rho.n_qubits != layout.n_total {
        return Err(Error::DimensionMismatch {
            expected: layout.n_total,
            got: rho.n_qubits,
        });
    }
    Ok(())
}

/// Hamming-damping form of independent dephasing on the noisy qubits.
pub fn apply_dephasing(rho: &DensityMatrix, layout: &ProbeLayout, gamma: f64) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    check_gamma(gamma)?;
    let mask = layout.mask();
    let damping: Vec<f64> = (0..=layout.n_noisy()).map(|h| (-(h as f64) * gamma).exp()).collect();
    let entries = CMatrix::from_fn(rho.dim(), rho.dim(), |i, j| {
        if i == j {
            rho.entries[(i, j)]
        } else {
            rho.entries[(i, j)] * damping[((i ^ j) & mask).count_ones() as usize]
        }
    });
    Ok(DensityMatrix {
        n_qubits: rho.n_qubits,
        entries,
    })
}

/// ∂ρ/∂T of the dephased state, given Γ and ∂Γ/∂T.
pub fn drho_dtemp(rho: &DensityMatrix, layout: &ProbeLayout, gamma: f64, dgamma: f64) -> Result<CMatrix> {
    check_layout(rho, layout)?;
    check_gamma(gamma)?;
    let mask = layout.mask();
    Ok(CMatrix::from_fn(rho.dim(), rho.dim(), |i, j| {
        let h = ((i ^ j) & mask).count_ones() as f64;
        if h == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            rho.entries[(i, j)] * (-dgamma * h * (-h * gamma).exp())
        }
    }))
}

/// Embeds single-qubit operators into the register: `ops[q]` acts on qubit q.
pub fn tensor_product(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .fold(CMatrix::identity(1, 1), |acc, op| acc.kronecker(op))
}

/// Explicit Σ_l K_l ρ K_l† over all 2^n tensor-product Kraus strings.
pub fn apply_kraus_tensor(rho: &DensityMatrix, layout: &ProbeLayout, gamma: f64) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    let pair = kraus_pair(gamma)?;
    let n_noisy = layout.n_noisy();
    let id = CMatrix::identity(2, 2);
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for string in 0..1usize << n_noisy {
        let ops: Vec<CMatrix> = (0..layout.n_total)
            .map(|q| match layout.noisy.iter().position(|&p| p == q) {
                Some(slot) if string >> slot & 1 == 1 => pair.k2.clone(),
                Some(_) => pair.k1.clone(),
                None => id.clone(),
            })
            .collect();
        let k = tensor_product(&ops);
        out += &k * &rho.entries * k.adjoint();
    }
    Ok(DensityMatrix {
        n_qubits: rho.n_qubits,
        entries: out,
    })
}

/// Traces out `qubit`, returning the state of the remaining register.
pub fn partial_trace(rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if n < 2 {
        return Err(Error::InvalidParameter("cannot trace out the only qubit".into()));
    }
    if qubit >= n {
        return Err(Error::InvalidParameter(format!("qubit {qubit} out of range for N = {n}")));
    }
    let bit = n - 1 - qubit;
    // insert a zero at `bit` into a reduced index
    let expand = |r: usize| ((r >> bit) << (bit + 1)) | (r & ((1 << bit) - 1));
    let d = 1usize << (n - 1);
    let entries = CMatrix::from_fn(d, d, |i, j| {
        let (i0, j0) = (expand(i), expand(j));
        rho.entries[(i0, j0)] + rho.entries[(i0 | 1 << bit, j0 | 1 << bit)]
    });
    Ok(DensityMatrix { n_qubits: n - 1, entries })
}

/// Eigendecomposition of a density matrix (descending eigenvalues).
pub fn eigendecompose(rho: &DensityMatrix) -> Result<Eigen> {
    linalg::eigh(&rho.entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_qubit_examples() {
        let s = make_single(0.0, 1.3);
        assert_eq!(s.amplitudes()[0], c(1.0));
        assert!(s.amplitudes()[1].norm() < 1e-16);
        let s = make_single(PI, 0.0);
        assert!(s.amplitudes()[0].norm() < 1e-16);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
        let s = make_single(PI / 2.0, 0.0);
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn ghz_and_w_amplitudes() {
        let g = make_ghz(5).unwrap();
        let nz: Vec<usize> = (0..32).filter(|&i| g.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nz, vec![0, 31]);
        assert_eq!(g.amplitudes()[0], c(FRAC_1_SQRT_2));

        let w = make_w(3).unwrap();
        let nz: Vec<usize> = (0..8).filter(|&i| w.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nz, vec![1, 2, 4]);
        let w4 = make_w(4).unwrap();
        assert_eq!(w4.amplitudes().iter().filter(|a| (a.re - 0.5).abs() < 1e-15).count(), 4);
        let w2 = make_w(2).unwrap();
        assert!((w2.amplitudes()[1] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((w2.amplitudes()[2] - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        assert!(make_ghz(1).is_err());
        assert!(make_w(1).is_err());
        assert!(matches!(make_ghz(13), Err(Error::TooManyQubits(13))));
    }

    #[test]
    fn random_state_is_normalised_and_deterministic() {
        let a = random_pure(3, 42).unwrap();
        let b = random_pure(3, 42).unwrap();
        assert_eq!(a, b);
        let norm: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_ne!(random_pure_indexed(3, 42, 1).unwrap(), a);
    }

    #[test]
    fn kraus_pair_examples() {
        let k = kraus_pair(0.0).unwrap();
        assert_eq!(k.k1, CMatrix::identity(2, 2));
        assert!(linalg::max_abs(&k.k2) == 0.0);
        let k = kraus_pair(2f64.ln()).unwrap();
        assert!((k.k1[(0, 0)].re - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((k.k2[(0, 0)].re - 0.25f64.sqrt()).abs() < 1e-15);
        let k = kraus_pair(800.0).unwrap();
        assert!((k.k1[(0, 0)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((k.k2[(0, 0)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(kraus_pair(-0.1), Err(Error::NegativeGamma(_))));
        for g in [0.0, 1e-9, 0.3, 5.0] {
            let k = kraus_pair(g).unwrap();
            let s = k.k1.adjoint() * &k.k1 + k.k2.adjoint() * &k.k2;
            assert!(max_abs_diff(&s, &CMatrix::identity(2, 2)) < 1e-12);
        }
    }

    #[test]
    fn bell_ancilla_output() {
        let g = 0.37;
        let layout = ProbeLayout::new(2, vec![1]).unwrap();
        let out = apply_dephasing(&make_ghz(2).unwrap().density(), &layout, g).unwrap();
        let m = out.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((m[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!((m[(0, 3)].re - (-g).exp() / 2.0).abs() < 1e-15);
        assert!((m[(3, 0)].re - (-g).exp() / 2.0).abs() < 1e-15);
        assert_eq!(m[(1, 1)], c(0.0));

        let d = drho_dtemp(&make_ghz(2).unwrap().density(), &layout, g, 0.8).unwrap();
        assert!((d[(0, 3)].re + 0.8 * (-g).exp() / 2.0).abs() < 1e-15);
        assert_eq!(d[(0, 0)], c(0.0));
    }

    #[test]
    fn eigen_of_bell_output() {
        let g = 0.6;
        let layout = ProbeLayout::new(2, vec![1]).unwrap();
        let out = apply_dephasing(&make_ghz(2).unwrap().density(), &layout, g).unwrap();
        let e = eigendecompose(&out).unwrap();
        let x = (-g).exp();
        let expect = [(1.0 + x) / 2.0, (1.0 - x) / 2.0, 0.0, 0.0];
        for (v, w) in e.values.iter().zip(expect) {
            assert!((v - w).abs() < 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let rho = make_ghz(3).unwrap().density();
        let layout = ProbeLayout::parallel(2).unwrap();
        assert!(matches!(apply_dephasing(&rho, &layout, 0.1), Err(Error::DimensionMismatch { .. })));
        assert!(drho_dtemp(&rho, &layout, 0.1, 1.0).is_err());
    }

    #[test]
    fn layout_validation() {
        assert!(ProbeLayout::new(3, vec![]).is_err());
        assert!(ProbeLayout::new(3, vec![1, 1]).is_err());
        assert!(ProbeLayout::new(3, vec![3]).is_err());
        assert!(ProbeLayout::ancilla(3, 0).is_err());
        assert_eq!(ProbeLayout::ancilla(3, 1).unwrap().noisy(), &[2]);
        assert_eq!(ProbeLayout::parallel(3).unwrap().mask(), 0b111);
        assert_eq!(ProbeLayout::new(3, vec![0]).unwrap().mask(), 0b100);
        assert_eq!(ProbeLayout::all(3).unwrap().len(), 7);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::single_qubit(0.3, Complex64::new(0.2, 0.1)).is_ok());
        assert!(DensityMatrix::single_qubit(0.5, c(0.6)).is_err());
        assert!(DensityMatrix::single_qubit(1.2, c(0.0)).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.2), c(0.5)]);
        assert!(matches!(DensityMatrix::new(1, bad), Err(Error::NotHermitian(_))));
        let not_psd = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.9), c(0.9), c(0.5)]);
        assert!(DensityMatrix::new(1, not_psd).is_err());
    }

    #[test]
    fn partial_trace_of_ghz() {
        let rho = make_ghz(3).unwrap().density();
        let red = partial_trace(&rho, 0).unwrap();
        assert_eq!(red.n_qubits(), 2);
        assert!((red.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((red.matrix()[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!(red.matrix()[(0, 3)].norm() < 1e-15);
    }
}
