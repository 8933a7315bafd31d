use crate::numsub::{conj, identity, CMatrix, CVector};

/// A conjugate-linear operator `ξ ↦ A·conj(ξ)` in a fixed orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjLinear {
    matrix: CMatrix,
}

impl ConjLinear {
    pub fn new(matrix: CMatrix) -> Self {
        ConjLinear { matrix }
    }

    /// Plain complex conjugation of coordinates.
    pub fn conjugation(n: usize) -> Self {
        ConjLinear {
            matrix: identity(n),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v.map(|x| x.conj())
    }

    /// `self ∘ other`, which is linear.
    pub fn compose(&self, other: &ConjLinear) -> CMatrix {
        &self.matrix * conj(&other.matrix)
    }

    /// `self ∘ x` for a linear `x`.
    pub fn after_linear(&self, x: &CMatrix) -> ConjLinear {
        ConjLinear::new(&self.matrix * conj(x))
    }

    /// `x ∘ self` for a linear `x`.
    pub fn before_linear(&self, x: &CMatrix) -> ConjLinear {
        ConjLinear::new(x * &self.matrix)
    }

    /// The adjoint `T*` with `⟨Tξ, η⟩ = ⟨T*η, ξ⟩`.
    pub fn adjoint(&self) -> ConjLinear {
        ConjLinear::new(self.matrix.transpose())
    }

    /// `T·x·T` for a linear `x`; linear again.
    pub fn sandwich(&self, x: &CMatrix) -> CMatrix {
        &self.matrix * conj(x) * conj(&self.matrix)
    }

    /// Residual of `x·T = T·x` for a linear `x`.
    pub fn commutation_residual(&self, x: &CMatrix) -> f64 {
        (x * &self.matrix - &self.matrix * conj(x)).norm()
    }
}

/// Tomita operators of the standard form, in orthonormal coordinates of `H`.
#[derive(Debug, Clone)]
pub struct ModularData {
    /// `S(aξ₀) = a*ξ₀`.
    pub s: ConjLinear,
    /// `F = S*`.
    pub f: ConjLinear,
    /// `Δ = S*S`.
    pub delta: CMatrix,
    /// `S S*`, the inverse of `Δ`.
    pub delta_inv: CMatrix,
    /// Polar unitary of `S`, so that `S = J Δ^{1/2}`.
    pub j: ConjLinear,
    /// `Δ^{1/2}`.
    pub delta_sqrt: CMatrix,
}

impl ModularData {
    /// `‖S − J Δ^{1/2}‖`.
    pub fn polar_residual(&self) -> f64 {
        let jd = self.j.after_linear(&self.delta_sqrt);
        (self.s.matrix() - jd.matrix()).norm()
    }

    /// `‖J² − I‖`.
    pub fn involution_residual(&self) -> f64 {
        let n = self.delta.nrows();
        (self.j.compose(&self.j) - identity(n)).norm()
    }

    /// `‖J*J − I‖`, i.e. `J` is isometric.
    pub fn isometry_residual(&self) -> f64 {
        let n = self.delta.nrows();
        let m = self.j.matrix();
        (m.adjoint() * m - identity(n)).norm()
    }

    /// `‖Δ − I‖`; zero exactly for tracial states.
    pub fn delta_deviation(&self) -> f64 {
        (&self.delta - identity(self.delta.nrows())).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numsub::random::{complex_matrix, complex_vector, rng};
    use crate::numsub::C64;

    #[test]
    fn adjoint_identity() {
        let mut r = rng(31);
        let t = ConjLinear::new(complex_matrix(&mut r, 4, 4));
        let (x, y) = (complex_vector(&mut r, 4), complex_vector(&mut r, 4));
        // ⟨u, v⟩ = v.dotc(u)
        let lhs = y.dotc(&t.apply(&x));
        let rhs = x.dotc(&t.adjoint().apply(&y));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn composition_and_sandwich() {
        let mut r = rng(32);
        let a = ConjLinear::new(complex_matrix(&mut r, 3, 3));
        let b = ConjLinear::new(complex_matrix(&mut r, 3, 3));
        let x = complex_matrix(&mut r, 3, 3);
        let v = complex_vector(&mut r, 3);
        assert!((a.compose(&b) * &v - a.apply(&b.apply(&v))).norm() < 1e-12);
        assert!((a.sandwich(&x) * &v - a.apply(&(&x * a.apply(&v)))).norm() < 1e-12);
        assert!((a.after_linear(&x).apply(&v) - a.apply(&(&x * &v))).norm() < 1e-12);
        assert!((a.before_linear(&x).apply(&v) - &x * a.apply(&v)).norm() < 1e-12);
    }

    #[test]
    fn conjugation_is_antilinear() {
        let j = ConjLinear::conjugation(2);
        let v = CVector::from_vec(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)]);
        let w = j.apply(&(&v * C64::new(0.0, 1.0)));
        assert!((w - j.apply(&v) * C64::new(0.0, -1.0)).norm() < 1e-15);
    }
}
