//! Truncated multimode Fock spaces, ladder operators and density matrices.
//!
//! Basis states are ordered lexicographically in the occupations with mode 0
//! varying slowest. For the three-mode optomechanical system the mode order is
//! `(b, a_p, a_s)`, so the basis index of `|n_b n_p n_s⟩` is
//! `(n_b·(c_p+1) + n_p)·(c_s+1) + n_s` with `c_i` the cutoffs.
//!
//! Ladder operators are truncated: `⟨n|[a, a†]|n⟩ = 1` for every `n` below the
//! cutoff but equals `−c` on the top level.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Mode index of the mechanical mode `b`.
pub const MODE_B: usize = 0;
/// Mode index of the optical probe mode `a_p`.
pub const MODE_P: usize = 1;
/// Mode index of the optical signal mode `a_s`.
pub const MODE_S: usize = 2;

/// Tensor product of truncated single-mode Fock spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    /// Builds a space with the given maximum occupation per mode.
    pub fn new(cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidSpace("cutoff list is empty".into()));
        }
        if let Some(i) = cutoffs.iter().position(|&c| c < 1) {
            return Err(Error::InvalidSpace(format!(
                "cutoff of mode {i} must be >= 1"
            )));
        }
        let mut strides = vec![1; cutoffs.len()];
        for i in (0..cutoffs.len() - 1).rev() {
            strides[i] = strides[i + 1] * (cutoffs[i + 1] + 1);
        }
        let dim = strides[0] * (cutoffs[0] + 1);
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            strides,
            dim,
        })
    }

    /// Three-mode `(b, a_p, a_s)` space.
    pub fn three_mode(cutoffs: [usize; 3]) -> Result<Self> {
        Self::new(&cutoffs)
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same space with every cutoff raised by `by`.
    pub fn enlarged(&self, by: usize) -> Self {
        let c: Vec<usize> = self.cutoffs.iter().map(|c| c + by).collect();
        Self::new(&c).expect("enlarging a valid space stays valid")
    }

    /// Basis index of an occupation-number tuple.
    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes()
            || occupations.iter().zip(&self.cutoffs).any(|(n, c)| n > c)
        {
            return Err(Error::OccupationOutOfRange {
                occupation: occupations.to_vec(),
                cutoffs: self.cutoffs.clone(),
            });
        }
        Ok(occupations
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| n * s)
            .sum())
    }

    /// Occupation numbers of basis index `index`.
    pub fn occupations_of(&self, index: usize) -> Vec<usize> {
        assert!(index < self.dim, "basis index {index} out of range");
        self.strides
            .iter()
            .zip(&self.cutoffs)
            .map(|(s, c)| (index / s) % (c + 1))
            .collect()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes(),
            })
        }
    }

    fn same_as(&self, other: &FockSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.cutoffs.clone(),
                right: other.cutoffs.clone(),
            })
        }
    }
}

/// Free-function form of [`FockSpace::new`].
pub fn build_space(cutoffs: &[usize]) -> Result<FockSpace> {
    FockSpace::new(cutoffs)
}

/// Dense operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn from_matrix(space: &FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::InvalidSpace(format!(
                "matrix is {}x{}, space dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(Self {
            space: space.clone(),
            matrix,
        })
    }

    pub fn zeros(space: &FockSpace) -> Self {
        Self {
            space: space.clone(),
            matrix: CMatrix::zeros(space.dim(), space.dim()),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(space.dim(), space.dim()),
        }
    }

    /// `a|n⟩ = √n|n−1⟩` on `mode`, identity on the other factors.
    pub fn annihilation(space: &FockSpace, mode: usize) -> Result<Self> {
        space.check_mode(mode)?;
        let stride = space.strides[mode];
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for ket in 0..space.dim() {
            let n = (ket / stride) % (space.cutoffs[mode] + 1);
            if n > 0 {
                m[(ket - stride, ket)] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    pub fn creation(space: &FockSpace, mode: usize) -> Result<Self> {
        Ok(Self::annihilation(space, mode)?.dagger())
    }

    /// Diagonal number operator of `mode`.
    pub fn number(space: &FockSpace, mode: usize) -> Result<Self> {
        space.check_mode(mode)?;
        let diag = (0..space.dim())
            .map(|i| C64::new(space.occupations_of(i)[mode] as f64, 0.0))
            .collect::<Vec<_>>();
        Ok(Self {
            space: space.clone(),
            matrix: CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        })
    }

    /// Projector onto the subspace where `mode` holds exactly `n` quanta.
    pub fn occupation_projector(space: &FockSpace, mode: usize, n: usize) -> Result<Self> {
        space.check_mode(mode)?;
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for i in 0..space.dim() {
            if space.occupations_of(i)[mode] == n {
                m[(i, i)] = C64::new(1.0, 0.0);
            }
        }
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn multiply(&self, rhs: &Operator) -> Result<Self> {
        self.space.same_as(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        self.space.same_as(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Self> {
        self.space.same_as(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Operator) -> Result<Self> {
        self.multiply(rhs)?.sub(&rhs.multiply(self)?)
    }

    /// Product of several operators, left to right.
    pub fn product(ops: &[&Operator]) -> Result<Self> {
        let (first, rest) = ops
            .split_first()
            .ok_or_else(|| Error::InvalidSpace("empty operator product".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, op| acc.multiply(op))
    }

    /// `⟨bra|self|ket⟩`
    pub fn element(&self, bra: &[usize], ket: &[usize]) -> Result<C64> {
        let i = self.space.index_of(bra)?;
        let j = self.space.index_of(ket)?;
        Ok(self.matrix[(i, j)])
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).norm() <= tol * self.matrix.norm().max(1.0)
    }

    pub(crate) fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_dense(&self.matrix)
    }
}

/// Quantum state as a dense density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Pure projector `|occ⟩⟨occ|`.
    pub fn basis_state(space: &FockSpace, occupations: &[usize]) -> Result<Self> {
        let i = space.index_of(occupations)?;
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        m[(i, i)] = C64::new(1.0, 0.0);
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    /// Wraps a matrix without checking the physical invariants; see
    /// [`DensityMatrix::validate`].
    pub fn from_matrix(space: &FockSpace, matrix: CMatrix) -> Result<Self> {
        let op = Operator::from_matrix(space, matrix)?;
        Ok(Self {
            space: op.space,
            matrix: op.matrix,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr[ρ·op]`
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        self.space.same_as(&op.space)?;
        let d = self.space.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.matrix[(i, k)] * op.matrix[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `⟨bra|ρ|ket⟩`
    pub fn matrix_element(&self, bra: &[usize], ket: &[usize]) -> Result<C64> {
        let i = self.space.index_of(bra)?;
        let j = self.space.index_of(ket)?;
        Ok(self.matrix[(i, j)])
    }

    /// `ρ ← (ρ + ρ†)/2`
    pub fn hermitize(&mut self) {
        let adj = self.matrix.adjoint();
        self.matrix = (&self.matrix + adj) * C64::new(0.5, 0.0);
    }

    /// Relative Frobenius norm of the anti-Hermitian part.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.norm();
        if n == 0.0 {
            return 0.0;
        }
        (&self.matrix - self.matrix.adjoint()).norm() / n
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity (1e-12 relative), real trace in `[0, 1+1e-9]` and
    /// eigenvalues above `−1e-9`.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(format!("hermiticity error {herm:.3e}"));
        }
        let tr = self.trace();
        if tr.im.abs() > 1e-12 || tr.re < 0.0 || tr.re > 1.0 + 1e-9 {
            return Err(format!("trace {tr} outside [0, 1+1e-9]"));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(format!("eigenvalue {min:.3e} below -1e-9"));
        }
        Ok(())
    }
}

/// Coordinate list of the nonzero entries of a dense matrix. Ladder-operator
/// products have at most `dim` nonzeros, so the integrator applies them in
/// this form.
#[derive(Debug, Clone)]
pub(crate) struct SparseMatrix {
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self { entries }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (c, r, v.conj()))
                .collect(),
        }
    }

    /// `out += coeff · self · rho`
    pub fn mul_dense_into(&self, coeff: C64, rho: &CMatrix, out: &mut CMatrix) {
        let d = rho.ncols();
        for &(r, k, v) in &self.entries {
            let w = coeff * v;
            for c in 0..d {
                out[(r, c)] += w * rho[(k, c)];
            }
        }
    }

    /// `out += rate · self · rho · self†`
    pub fn sandwich_into(&self, rate: f64, rho: &CMatrix, out: &mut CMatrix) {
        for &(r, k, a) in &self.entries {
            let ra = a * rate;
            for &(c, l, b) in &self.entries {
                out[(r, c)] += ra * rho[(k, l)] * b.conj();
            }
        }
    }

    /// `Tr[self · rho]`
    pub fn trace_with(&self, rho: &CMatrix) -> C64 {
        self.entries
            .iter()
            .map(|&(r, k, v)| v * rho[(k, r)])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_space(&[2, 2, 2]).unwrap().dim(), 27);
        assert_eq!(build_space(&[1, 1, 1]).unwrap().dim(), 8);
        assert_eq!(build_space(&[3, 2, 2]).unwrap().dim(), 36);
    }

    #[test]
    fn rejects_bad_cutoffs() {
        assert!(matches!(build_space(&[]), Err(Error::InvalidSpace(_))));
        assert!(matches!(build_space(&[2, 0, 2]), Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn basis_ordering_is_lexicographic_with_b_slowest() {
        let s = FockSpace::three_mode([2, 2, 2]).unwrap();
        assert_eq!(s.index_of(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(s.index_of(&[0, 1, 0]).unwrap(), 3);
        assert_eq!(s.index_of(&[1, 0, 0]).unwrap(), 9);
        assert_eq!(s.index_of(&[1, 1, 0]).unwrap(), 12);
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.occupations_of(i)).unwrap(), i);
        }
    }

    #[test]
    fn single_mode_ladder_elements() {
        let s = FockSpace::new(&[2]).unwrap();
        let a = Operator::annihilation(&s, 0).unwrap();
        assert!(close(a.element(&[0], &[1]).unwrap(), C64::new(1.0, 0.0), 0.0));
        assert!(close(
            a.element(&[1], &[2]).unwrap(),
            C64::new(2f64.sqrt(), 0.0),
            1e-15
        ));
    }

    #[test]
    fn truncated_commutator_diagonal() {
        let cutoff = 4;
        let s = FockSpace::new(&[cutoff]).unwrap();
        let a = Operator::annihilation(&s, 0).unwrap();
        let comm = a.commutator(&a.dagger()).unwrap();
        for n in 0..cutoff {
            assert!(close(comm.element(&[n], &[n]).unwrap(), C64::new(1.0, 0.0), 1e-14));
        }
        // top level carries the truncation artifact
        assert!(close(
            comm.element(&[cutoff], &[cutoff]).unwrap(),
            C64::new(-(cutoff as f64), 0.0),
            1e-14
        ));
    }

    #[test]
    fn distinct_modes_commute_exactly() {
        let s = FockSpace::three_mode([2, 2, 2]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let ai = Operator::annihilation(&s, i).unwrap();
                let aj = Operator::annihilation(&s, j).unwrap();
                assert_eq!(ai.commutator(&aj).unwrap().matrix().norm(), 0.0);
                assert_eq!(ai.commutator(&aj.dagger()).unwrap().matrix().norm(), 0.0);
            }
        }
    }

    #[test]
    fn number_is_adag_a() {
        let s = FockSpace::three_mode([3, 2, 1]).unwrap();
        for mode in 0..3 {
            let a = Operator::annihilation(&s, mode).unwrap();
            let n = Operator::number(&s, mode).unwrap();
            assert!((a.dagger().multiply(&a).unwrap().matrix() - n.matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn expectation_and_matrix_elements() {
        let s = FockSpace::three_mode([2, 2, 2]).unwrap();
        let rho = DensityMatrix::basis_state(&s, &[1, 1, 0]).unwrap();
        let nb = Operator::number(&s, MODE_B).unwrap();
        assert_eq!(rho.expectation(&nb).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(
            rho.expectation(&Operator::identity(&s)).unwrap(),
            C64::new(1.0, 0.0)
        );
        let rho = DensityMatrix::basis_state(&s, &[0, 0, 1]).unwrap();
        assert_eq!(
            rho.matrix_element(&[0, 0, 1], &[0, 0, 1]).unwrap(),
            C64::new(1.0, 0.0)
        );
        assert!(rho.validate().is_ok());
    }

    #[test]
    fn errors_on_mismatch_and_range() {
        let s = FockSpace::three_mode([2, 2, 2]).unwrap();
        let t = FockSpace::three_mode([3, 2, 2]).unwrap();
        assert!(matches!(
            Operator::annihilation(&s, 3),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            DensityMatrix::basis_state(&s, &[3, 0, 0]),
            Err(Error::OccupationOutOfRange { .. })
        ));
        let a = Operator::annihilation(&s, 0).unwrap();
        let b = Operator::annihilation(&t, 0).unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::SpaceMismatch { .. })));
        let rho = DensityMatrix::basis_state(&t, &[0, 0, 0]).unwrap();
        assert!(matches!(rho.expectation(&a), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn projectors_idempotent_and_orthogonal() {
        let s = FockSpace::three_mode([1, 1, 2]).unwrap();
        let p = DensityMatrix::basis_state(&s, &[1, 0, 2]).unwrap();
        let q = DensityMatrix::basis_state(&s, &[0, 1, 2]).unwrap();
        assert_eq!(p.matrix() * p.matrix(), *p.matrix());
        assert_eq!((p.matrix() * q.matrix()).norm(), 0.0);
    }

    #[test]
    fn sparse_kernels_match_dense() {
        let s = FockSpace::three_mode([2, 1, 2]).unwrap();
        let a = Operator::annihilation(&s, MODE_S)
            .unwrap()
            .multiply(&Operator::creation(&s, MODE_B).unwrap())
            .unwrap();
        let d = s.dim();
        let rho = CMatrix::from_fn(d, d, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let sp = a.to_sparse();
        let mut out = CMatrix::zeros(d, d);
        sp.mul_dense_into(C64::new(0.0, 2.0), &rho, &mut out);
        assert!((out - a.matrix() * &rho * C64::new(0.0, 2.0)).norm() < 1e-12);
        let mut out = CMatrix::zeros(d, d);
        sp.sandwich_into(3.0, &rho, &mut out);
        assert!((out - a.matrix() * &rho * a.matrix().adjoint() * C64::new(3.0, 0.0)).norm() < 1e-10);
        let tr = (a.matrix() * &rho).trace();
        assert!((sp.trace_with(&rho) - tr).norm() < 1e-12);
    }
}
