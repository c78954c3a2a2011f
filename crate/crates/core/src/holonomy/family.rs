//! Isospectral Hamiltonian families `H(lambda) = V(lambda) H0 V(lambda)^dagger`.

use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianEigen, C64, DEGENERACY_TOL};

use super::HolonomyError;

/// One factor `exp(-i * sign * lambda[param] * G[generator])` of the frame rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameFactor {
    pub param: usize,
    pub generator: usize,
    pub sign: f64,
}

impl FrameFactor {
    pub const fn new(param: usize, generator: usize, sign: f64) -> Self {
        Self { param, generator, sign }
    }
}

/// Geometry of the control manifold, as far as the gate analysis cares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlManifold {
    /// Coordinates `(theta, phi)` on a sphere, north pole at the basepoint.
    Sphere,
    Generic,
}

/// A degenerate `H0` together with the unitary frame rule that moves it.
///
/// `V(lambda)` is the ordered product of the frame-rule factors, left to right.
/// Generators are diagonalized once so that each factor is an exact
/// exponential.
#[derive(Debug, Clone)]
pub struct IsospectralFamily {
    name: String,
    h0: ComplexMatrix,
    generators: Vec<ComplexMatrix>,
    generator_eigen: Vec<HermitianEigen>,
    frame_rule: Vec<FrameFactor>,
    param_dim: usize,
    subspace_energy: f64,
    spectrum: Vec<f64>,
    /// Tracked basis of the selected level, one column per frame vector.
    reference_basis: ComplexMatrix,
    manifold: ControlManifold,
}

impl IsospectralFamily {
    /// Builds a family tracking the full eigenspace of `h0` at `subspace_energy`.
    pub fn new(
        name: impl Into<String>,
        h0: ComplexMatrix,
        generators: Vec<ComplexMatrix>,
        frame_rule: Vec<FrameFactor>,
        subspace_energy: f64,
    ) -> Result<Self, HolonomyError> {
        let eig = eig_hermitian(&h0)?;
        let dim = h0.rows();
        for (k, g) in generators.iter().enumerate() {
            if g.shape() != (dim, dim) {
                return Err(HolonomyError::Domain(format!(
                    "generator {k} has shape {:?}, expected {dim}x{dim}",
                    g.shape()
                )));
            }
        }
        let generator_eigen = generators.iter().map(eig_hermitian).collect::<Result<Vec<_>, _>>()?;
        let param_dim = frame_rule.iter().map(|f| f.param + 1).max().unwrap_or(0);
        if let Some(f) = frame_rule.iter().find(|f| f.generator >= generators.len()) {
            return Err(HolonomyError::Domain(format!(
                "frame factor references missing generator {}",
                f.generator
            )));
        }
        let level = eig
            .clusters(DEGENERACY_TOL)
            .into_iter()
            .find(|(e, _)| (e - subspace_energy).abs() <= DEGENERACY_TOL)
            .ok_or_else(|| {
                HolonomyError::Domain(format!(
                    "energy {subspace_energy} is not in the spectrum {:?}",
                    eig.values
                ))
            })?;
        let cols: Vec<Vec<C64>> = level.1.iter().map(|&k| eig.vectors.column(k)).collect();
        Ok(Self {
            name: name.into(),
            h0,
            generators,
            generator_eigen,
            frame_rule,
            param_dim,
            subspace_energy,
            spectrum: eig.values,
            reference_basis: ComplexMatrix::from_columns(&cols),
            manifold: ControlManifold::Generic,
        })
    }

    /// Replaces the tracked basis. Columns must be orthonormal and lie in the
    /// selected eigenspace; they may span a proper subspace of it.
    pub fn with_reference_basis(mut self, basis: ComplexMatrix) -> Result<Self, HolonomyError> {
        if basis.rows() != self.dim() || basis.cols() == 0 {
            return Err(HolonomyError::Domain(format!(
                "reference basis shape {:?}",
                basis.shape()
            )));
        }
        let gram = basis.dagger() * basis.clone();
        if gram.distance(&ComplexMatrix::identity(basis.cols())) > 1e-9 {
            return Err(HolonomyError::Domain("reference basis is not orthonormal".into()));
        }
        let residual = &(&self.h0 * &basis) - &basis.scale_real(self.subspace_energy);
        if residual.norm_fro() > 1e-9 {
            return Err(HolonomyError::Domain(
                "reference basis leaves the selected eigenspace".into(),
            ));
        }
        self.reference_basis = basis;
        Ok(self)
    }

    pub fn with_manifold(mut self, manifold: ControlManifold) -> Self {
        self.manifold = manifold;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn frame_rule(&self) -> &[FrameFactor] {
        &self.frame_rule
    }

    pub fn dim(&self) -> usize {
        self.h0.rows()
    }

    /// Number of tracked frame vectors.
    pub fn subspace_dim(&self) -> usize {
        self.reference_basis.cols()
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn subspace_energy(&self) -> f64 {
        self.subspace_energy
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn reference_basis(&self) -> &ComplexMatrix {
        &self.reference_basis
    }

    pub fn manifold(&self) -> ControlManifold {
        self.manifold
    }

    pub(crate) fn check_point(&self, lambda: &[f64]) -> Result<(), HolonomyError> {
        if lambda.len() != self.param_dim {
            return Err(HolonomyError::Domain(format!(
                "parameter vector has {} entries, family {} expects {}",
                lambda.len(),
                self.name,
                self.param_dim
            )));
        }
        Ok(())
    }

    fn factor(&self, f: &FrameFactor, lambda: &[f64]) -> ComplexMatrix {
        let eig = &self.generator_eigen[f.generator];
        let angle = f.sign * lambda[f.param];
        let phases: Vec<C64> = eig.values.iter().map(|&g| C64::from_polar(1.0, -angle * g)).collect();
        &eig.vectors * &(&ComplexMatrix::from_diag(&phases) * &eig.vectors.dagger())
    }

    /// The frame unitary `V(lambda)`.
    pub fn frame_unitary(&self, lambda: &[f64]) -> Result<ComplexMatrix, HolonomyError> {
        self.check_point(lambda)?;
        Ok(self
            .frame_rule
            .iter()
            .fold(ComplexMatrix::identity(self.dim()), |acc, f| {
                &acc * &self.factor(f, lambda)
            }))
    }

    /// `V(lambda)` and its directional derivative along `direction`,
    /// differentiated factor by factor.
    pub fn frame_unitary_and_derivative(
        &self,
        lambda: &[f64],
        direction: &[f64],
    ) -> Result<(ComplexMatrix, ComplexMatrix), HolonomyError> {
        self.check_point(lambda)?;
        self.check_point(direction)?;
        let n = self.dim();
        let factors: Vec<ComplexMatrix> = self.frame_rule.iter().map(|f| self.factor(f, lambda)).collect();
        // prefix[j] = F_0 ... F_{j-1}
        let mut prefix = vec![ComplexMatrix::identity(n)];
        for f in &factors {
            let next = prefix.last().unwrap() * f;
            prefix.push(next);
        }
        let mut suffix = ComplexMatrix::identity(n);
        let mut deriv = ComplexMatrix::zeros(n, n);
        for (j, f) in self.frame_rule.iter().enumerate().rev() {
            suffix = &factors[j] * &suffix;
            let rate = direction[f.param] * f.sign;
            if rate != 0.0 {
                let g = self.generators[f.generator].scale(C64::new(0.0, -rate));
                deriv = &deriv + &(&prefix[j] * &(&g * &suffix));
            }
        }
        Ok((prefix.pop().unwrap(), deriv))
    }

    /// `H(lambda) = V H0 V^dagger`.
    pub fn hamiltonian(&self, lambda: &[f64]) -> Result<ComplexMatrix, HolonomyError> {
        let v = self.frame_unitary(lambda)?;
        Ok(&v * &(&self.h0 * &v.dagger()))
    }

    /// Projector onto the instantaneous tracked subspace.
    pub fn subspace_projector(&self, lambda: &[f64]) -> Result<ComplexMatrix, HolonomyError> {
        let frame = &self.frame_unitary(lambda)? * &self.reference_basis;
        Ok(&frame * &frame.dagger())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::catalog;
    use crate::linalg::eig_hermitian;

    #[test]
    fn basepoint_frame_is_identity() {
        for fam in catalog::all_families() {
            let zero = vec![0.0; fam.param_dim()];
            let v = fam.frame_unitary(&zero).unwrap();
            assert!(
                v.distance(&ComplexMatrix::identity(fam.dim())) < 1e-14,
                "{}",
                fam.name()
            );
        }
    }

    #[test]
    fn unitary_and_isospectral() {
        for fam in catalog::all_families() {
            for k in 0..7 {
                let lambda: Vec<f64> = (0..fam.param_dim())
                    .map(|p| 0.37 * (k + 1) as f64 + 1.1 * p as f64)
                    .collect();
                let v = fam.frame_unitary(&lambda).unwrap();
                assert!(v.is_unitary(1e-10));
                let values = eig_hermitian(&fam.hamiltonian(&lambda).unwrap()).unwrap().values;
                for (a, b) in values.iter().zip(fam.spectrum()) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn missing_energy_is_domain_error() {
        let h0 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let err = IsospectralFamily::new("x", h0, vec![], vec![], 0.5).unwrap_err();
        assert!(matches!(err, HolonomyError::Domain(_)));
    }

    #[test]
    fn rejects_wrong_parameter_count() {
        let fam = catalog::spin_half();
        assert!(fam.frame_unitary(&[0.1]).is_err());
    }
}
