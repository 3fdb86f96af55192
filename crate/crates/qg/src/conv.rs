//! The two convolution products on trace-class matrices.
//!
//! Both products come from the right fundamental unitaries: ★ through V and
//! • through V̂. With the trace pairing ⟨ω,T⟩ = tr(Tω), the predual of
//! T ↦ V(T⊗1)V* sends ω⊗τ to (id⊗tr)(V*(ω⊗τ)V):
//! tr(T·(ω★τ)) = tr((T⊗1)·V*(ω⊗τ)V) = tr(V(T⊗1)V*·(ω⊗τ)) for every T.
//!
//! Closed-form oracles for group-derived bundles (translation averages and a
//! Schur product against a coefficient-function matrix) live here too; they
//! are cross-checks, never the implementation.

use num_complex::Complex64;

use crate::bundle::{right_regular, QGBundle};
use crate::group::FiniteGroup;
use crate::linalg::{kron, partial_trace, CMatrix, Leg, SparseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum ConvError {
    #[error("operand is {0}x{1}, bundle dimension is {2}")]
    DimensionMismatch(usize, usize, usize),
}

/// Trace-class element of the ambient d-dimensional bundle. In finite
/// dimension this is every d×d matrix; the alias marks intent.
pub type TraceClassElement = CMatrix;

fn check_dim(b: &QGBundle, m: &CMatrix) -> Result<(), ConvError> {
    if m.rows != b.d || m.cols != b.d {
        return Err(ConvError::DimensionMismatch(m.rows, m.cols, b.d));
    }
    Ok(())
}

/// (id⊗tr)(U*·A·U) for a doubled-space A, with U applied sparsely.
fn conjugated_partial_trace(u: &CMatrix, a: &CMatrix, d: usize) -> CMatrix {
    let su = SparseMatrix::from_dense(u);
    partial_trace(&su.conjugate_dense(a), Leg::Second, d).expect("dims checked")
}

/// Bilinear extension of ★ to the doubled trace class: A ↦ (id⊗tr)(V*AV).
pub fn star_lift(b: &QGBundle, a: &CMatrix) -> CMatrix {
    conjugated_partial_trace(&b.v, a, b.d)
}

/// ω★τ = (id⊗tr)(V*(ω⊗τ)V).
pub fn star(b: &QGBundle, omega: &CMatrix, tau: &CMatrix) -> Result<CMatrix, ConvError> {
    check_dim(b, omega)?;
    check_dim(b, tau)?;
    Ok(star_lift(b, &kron(omega, tau).expect("dims checked")))
}

/// ω•τ = (id⊗tr)(V̂*(ω⊗τ)V̂), the ★-product of the dual.
pub fn bullet(b: &QGBundle, omega: &CMatrix, tau: &CMatrix) -> Result<CMatrix, ConvError> {
    check_dim(b, omega)?;
    check_dim(b, tau)?;
    Ok(conjugated_partial_trace(&b.v_hat, &kron(omega, tau).expect("dims checked"), b.d))
}

/// • computed the long way round: m_• = m_★ ∘ Ad(W*) ∘ Σ, i.e.
/// ω•τ = (id⊗tr)(V*·W*(τ⊗ω)W·V). Cross-check for `bullet`.
pub fn bullet_via_star(b: &QGBundle, omega: &CMatrix, tau: &CMatrix) -> Result<CMatrix, ConvError> {
    check_dim(b, omega)?;
    check_dim(b, tau)?;
    let flipped = kron(tau, omega).expect("dims checked");
    let sw = SparseMatrix::from_dense(&b.w);
    Ok(star_lift(b, &sw.conjugate_dense(&flipped)))
}

/// Right-translation average oracle for group bundles:
/// ω★τ = Σ_s ρ(s)*·ω·ρ(s)·τ_{s,s} with ρ(s)δ_t = δ_{ts⁻¹}; entrywise
/// (ω★τ)_{s,t} = Σ_r τ_{r,r}·ω_{sr⁻¹,tr⁻¹}.
pub fn star_oracle_commutative(
    g: &FiniteGroup,
    omega: &CMatrix,
    tau: &CMatrix,
) -> Result<CMatrix, ConvError> {
    let d = g.order;
    if omega.rows != d || omega.cols != d || tau.rows != d || tau.cols != d {
        return Err(ConvError::DimensionMismatch(omega.rows, omega.cols, d));
    }
    let mut out = CMatrix::zeros(d, d);
    for s in 0..d {
        let weight = tau.get(s, s);
        if weight.norm_sqr() == 0.0 {
            continue;
        }
        let rho = right_regular(g, s);
        let term = rho.adjoint().matmul(&omega.matmul(&rho));
        out = &out + &term.scale(weight);
    }
    Ok(out)
}

/// Which translate direction a Schur-product form uses for the coefficient
/// matrix c_{s,t}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslateDirection {
    /// c_{s,t} = Σ_r τ_{sr,tr} = tr(τ·λ(ts⁻¹))
    Right,
    /// c_{s,t} = Σ_r τ_{rs,rt}
    Left,
}

/// Schur-product oracle for the • product on a group bundle:
/// (ω•τ)_{s,t} = ω_{s,t}·c_{s,t} with c from the chosen translate direction.
/// The `Right` direction is the one that matches the V̂ route (fixed by the
/// nonabelian cross-check in `bullet_orientation`).
pub fn bullet_oracle_cocommutative(
    g: &FiniteGroup,
    omega: &CMatrix,
    tau: &CMatrix,
    dir: TranslateDirection,
) -> Result<CMatrix, ConvError> {
    let d = g.order;
    if omega.rows != d || omega.cols != d || tau.rows != d || tau.cols != d {
        return Err(ConvError::DimensionMismatch(omega.rows, omega.cols, d));
    }
    Ok(CMatrix::from_fn(d, d, |s, t| {
        let c: Complex64 = (0..d)
            .map(|r| match dir {
                TranslateDirection::Right => tau.get(g.mul(s, r), g.mul(t, r)),
                TranslateDirection::Left => tau.get(g.mul(r, s), g.mul(r, t)),
            })
            .sum();
        omega.get(s, t) * c
    }))
}

/// Determines which translate direction matches the V̂ route by a
/// deterministic nonabelian probe, returning the direction and the two
/// residuals (matching first). On abelian groups the directions coincide and
/// `Right` is reported.
pub fn bullet_orientation(b: &QGBundle) -> Option<(TranslateDirection, f64, f64)> {
    let g = b.group()?;
    let d = g.order;
    // deterministic non-symmetric probe matrices
    let omega = CMatrix::from_fn(d, d, |i, j| Complex64::new((i * d + j) as f64 + 1.0, 0.3 * i as f64));
    let tau = CMatrix::from_fn(d, d, |i, j| Complex64::new((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
    let truth = bullet(b, &omega, &tau).ok()?;
    let right = bullet_oracle_cocommutative(g, &omega, &tau, TranslateDirection::Right).ok()?;
    let left = bullet_oracle_cocommutative(g, &omega, &tau, TranslateDirection::Left).ok()?;
    let res_right = (&truth - &right).fro_norm();
    let res_left = (&truth - &left).fro_norm();
    if res_right <= res_left {
        Some((TranslateDirection::Right, res_right, res_left))
    } else {
        Some((TranslateDirection::Left, res_left, res_right))
    }
}

// ---------------------------------------------------------------------------
// Quotient maps onto functions on the group
// ---------------------------------------------------------------------------

/// A function on the group, indexed in the group's label order. Carries both
/// convolution-algebra and coefficient-function values depending on context.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Function {
    pub values: Vec<Complex64>,
}

impl L1Function {
    pub fn zeros(d: usize) -> Self {
        L1Function { values: vec![Complex64::new(0.0, 0.0); d] }
    }

    pub fn indicator(d: usize, s: usize) -> Self {
        let mut f = Self::zeros(d);
        f.values[s] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn constant(d: usize, z: Complex64) -> Self {
        L1Function { values: vec![z; d] }
    }

    /// Convolution with counting measure: (f★h)(s) = Σ_r f(sr⁻¹)h(r).
    pub fn convolve(&self, g: &FiniteGroup, other: &L1Function) -> L1Function {
        let d = g.order;
        let mut out = Self::zeros(d);
        for s in 0..d {
            out.values[s] = (0..d)
                .map(|r| self.values[g.mul(s, g.inv(r))] * other.values[r])
                .sum();
        }
        out
    }

    pub fn pointwise(&self, other: &L1Function) -> L1Function {
        L1Function {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> L1Function {
        L1Function { values: self.values.iter().map(|v| v * z).collect() }
    }

    pub fn sub_norm(&self, other: &L1Function) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// π: restriction to the function algebra (the diagonal), π(ω)[s] = ω_{s,s}.
pub fn pi(b: &QGBundle, omega: &CMatrix) -> Result<L1Function, ConvError> {
    check_dim(b, omega)?;
    Ok(L1Function { values: (0..b.d).map(|s| omega.get(s, s)).collect() })
}

/// π̂: coefficient function of the group algebra, π̂(ω)[s] = tr(ω·λ(s)).
pub fn pi_hat(b: &QGBundle, omega: &CMatrix) -> Result<L1Function, ConvError> {
    check_dim(b, omega)?;
    let g = b
        .group()
        .expect("coefficient functions need the group coordinates");
    // tr(ω·λ(s)) = Σ_u ω_{u,su}
    Ok(L1Function {
        values: (0..b.d)
            .map(|s| (0..b.d).map(|u| omega.get(u, g.mul(s, u))).sum())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_commutative, build_dual};
    use crate::group::{build_standard, Family};
    use crate::linalg::random_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z2_bundle() -> QGBundle {
        build_commutative(&build_standard(Family::Cyclic, &[2]).unwrap()).unwrap()
    }

    fn s3_bundle() -> QGBundle {
        build_commutative(&build_standard(Family::Symmetric, &[3]).unwrap()).unwrap()
    }

    fn zmat() -> CMatrix {
        CMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
    }

    #[test]
    fn star_of_matrix_units_on_z2() {
        let b = z2_bundle();
        let e00 = CMatrix::unit(2, 0, 0);
        let e11 = CMatrix::unit(2, 1, 1);
        let r = star(&b, &e00, &e11).unwrap();
        assert!((&r - &e11).fro_norm() <= 1e-14);
    }

    #[test]
    fn star_matches_translation_oracle_on_s3() {
        let b = s3_bundle();
        let g = b.group().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let omega = random_matrix(&mut rng, 6, 6);
            let tau = random_matrix(&mut rng, 6, 6);
            let via_v = star(&b, &omega, &tau).unwrap();
            let via_sum = star_oracle_commutative(&g, &omega, &tau).unwrap();
            let rel = (&via_v - &via_sum).fro_norm() / via_v.fro_norm().max(1.0);
            assert!(rel <= 1e-12, "relative residual {rel}");
        }
    }

    #[test]
    fn z_star_z_is_twice_z() {
        let b = z2_bundle();
        let z = zmat();
        let r = star(&b, &z, &z).unwrap();
        assert!((&r - &z.scale(Complex64::new(2.0, 0.0))).fro_norm() <= 1e-14);
    }

    #[test]
    fn z_bullet_z_vanishes() {
        let b = z2_bundle();
        let z = zmat();
        let r = bullet(&b, &z, &z).unwrap();
        assert!(r.fro_norm() <= 1e-14);
    }

    #[test]
    fn trace_is_multiplicative_for_both_products() {
        let b = s3_bundle();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let omega = random_matrix(&mut rng, 6, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let prod_trace = omega.trace() * tau.trace();
        assert!((star(&b, &omega, &tau).unwrap().trace() - prod_trace).norm() <= 1e-10);
        assert!((bullet(&b, &omega, &tau).unwrap().trace() - prod_trace).norm() <= 1e-10);
    }

    #[test]
    fn star_annihilates_zero_diagonal_right_factor() {
        let g = build_standard(Family::Dihedral, &[4]).unwrap();
        let b = build_commutative(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let omega = random_matrix(&mut rng, 8, 8);
        let mut tau = random_matrix(&mut rng, 8, 8);
        for i in 0..8 {
            tau.set(i, i, Complex64::new(0.0, 0.0));
        }
        assert!(star(&b, &omega, &tau).unwrap().fro_norm() <= 1e-12);
    }

    #[test]
    fn bullet_is_star_of_the_dual() {
        let b = s3_bundle();
        let dual = build_dual(&b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let omega = random_matrix(&mut rng, 6, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let lhs = bullet(&b, &omega, &tau).unwrap();
        let rhs = star(&dual, &omega, &tau).unwrap();
        assert!((&lhs - &rhs).fro_norm() <= 1e-12 * lhs.fro_norm().max(1.0));
    }

    #[test]
    fn bullet_agrees_with_flip_conjugate_route() {
        let g = build_standard(Family::Dihedral, &[4]).unwrap();
        let b = build_commutative(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let omega = random_matrix(&mut rng, 8, 8);
            let tau = random_matrix(&mut rng, 8, 8);
            let direct = bullet(&b, &omega, &tau).unwrap();
            let routed = bullet_via_star(&b, &omega, &tau).unwrap();
            let rel = (&direct - &routed).fro_norm() / direct.fro_norm().max(1.0);
            assert!(rel <= 1e-12, "relative residual {rel}");
        }
    }

    #[test]
    fn bullet_orientation_is_right_translates_on_s3() {
        let b = s3_bundle();
        let (dir, matched, other) = bullet_orientation(&b).unwrap();
        assert_eq!(dir, TranslateDirection::Right);
        assert!(matched <= 1e-10, "matching residual {matched}");
        assert!(other > 1e-3, "directions indistinguishable on S3: {other}");
    }

    #[test]
    fn bullet_haar_projection_is_right_identity() {
        // τ = χχ* gives c_{s,t} = tr(χχ*λ(ts⁻¹)) = ⟨λ(ts⁻¹)χ,χ⟩ = 1 since χ
        // is the unit-norm translation-invariant vector, so ω•τ = ω
        let b = s3_bundle();
        let chi = b.haar_vector.clone();
        let tau = CMatrix::from_fn(6, 6, |i, j| chi.get(i, 0) * chi.get(j, 0).conj());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let omega = random_matrix(&mut rng, 6, 6);
        let r = bullet(&b, &omega, &tau).unwrap();
        assert!((&r - &omega).fro_norm() <= 1e-12);
    }

    #[test]
    fn pi_of_unit_is_indicator() {
        let b = z2_bundle();
        let f = pi(&b, &CMatrix::unit(2, 0, 0)).unwrap();
        assert_eq!(f, L1Function::indicator(2, 0));
    }

    #[test]
    fn pi_intertwines_star_with_group_convolution() {
        let b = s3_bundle();
        let g = b.group().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let omega = random_matrix(&mut rng, 6, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let lhs = pi(&b, &star(&b, &omega, &tau).unwrap()).unwrap();
        let rhs = pi(&b, &omega).unwrap().convolve(&g, &pi(&b, &tau).unwrap());
        assert!(lhs.sub_norm(&rhs) <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn pi_hat_intertwines_bullet_with_pointwise_product() {
        let b = s3_bundle();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let omega = random_matrix(&mut rng, 6, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let lhs = pi_hat(&b, &bullet(&b, &omega, &tau).unwrap()).unwrap();
        let rhs = pi_hat(&b, &omega).unwrap().pointwise(&pi_hat(&b, &tau).unwrap());
        assert!(lhs.sub_norm(&rhs) <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn pi_of_bullet_scales_by_trace() {
        let b = s3_bundle();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let omega = random_matrix(&mut rng, 6, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let lhs = pi(&b, &bullet(&b, &omega, &tau).unwrap()).unwrap();
        let rhs = pi(&b, &omega).unwrap().scale(tau.trace());
        assert!(lhs.sub_norm(&rhs) <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn star_is_left_faithful_over_matrix_units() {
        // for each nonzero matrix unit ρ some unit τ has ρ★τ ≠ 0
        let b = z2_bundle();
        for i in 0..2 {
            for j in 0..2 {
                let rho = CMatrix::unit(2, i, j);
                let found = (0..2).any(|k| {
                    let tau = CMatrix::unit(2, k, k);
                    star(&b, &rho, &tau).unwrap().fro_norm() > 1e-12
                });
                assert!(found, "no witness for E_{i}{j}");
            }
        }
    }

    #[test]
    fn associativity_of_both_products() {
        let b = s3_bundle();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6, 6);
            let c = random_matrix(&mut rng, 6, 6);
            let e = random_matrix(&mut rng, 6, 6);
            let l1 = star(&b, &star(&b, &a, &c).unwrap(), &e).unwrap();
            let r1 = star(&b, &a, &star(&b, &c, &e).unwrap()).unwrap();
            assert!((&l1 - &r1).fro_norm() <= 1e-10 * l1.fro_norm().max(1.0));
            let l2 = bullet(&b, &bullet(&b, &a, &c).unwrap(), &e).unwrap();
            let r2 = bullet(&b, &a, &bullet(&b, &c, &e).unwrap()).unwrap();
            assert!((&l2 - &r2).fro_norm() <= 1e-10 * l2.fro_norm().max(1.0));
        }
    }
}
