//! Multiplier superoperators on trace class.
//!
//! Θ(f) is right convolution by the diagonal lift of f, Θ̂(f̂) is the
//! •-analogue through the group-algebra lift of a coefficient function.
//! Both are module maps for the mixed product (left and right side
//! respectively), and the dimension experiment measures whether these maps
//! together with the rank-one trace functionals exhaust all module maps.
//!
//! The experiment's answer is no: at finite scale the full left module-map
//! space is exactly {θ_A : A ∈ M_d} with θ_A(τ) = τ★A − A•τ + tr(τ)·A,
//! so its dimension is d², while the multiplier span has dimension d + 1.
//! The proof is a direct expansion using associativity of ★ and • plus the
//! absorption identities ρ★(ω•τ) = tr(τ)·ρ★ω, ρ•(ω★τ) = tr(τ)·ρ•ω and the
//! exchange identity (ρ★ω)•τ = (ρ•τ)★ω, all of which this crate verifies
//! independently. The right-side space is the mirror family
//! θ_B(τ) = τ•B − B★τ + tr(τ)·B. The multiplier span corresponds to the
//! sub-family where A is diagonal plus a multiple of the Haar projection.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{left_regular, rank_one, QGBundle};
use crate::conv::{self, ConvError, L1Function};
use crate::lie::{self, trace_zero_basis};
use crate::linalg::{self, random_trace_zero, CMatrix};

#[derive(Debug, thiserror::Error)]
pub enum MultiplierError {
    #[error(transparent)]
    Conv(#[from] ConvError),
    #[error("function has {0} values, bundle dimension is {1}")]
    LengthMismatch(usize, usize),
    #[error("expectation property {0} failed with residual {1:.3e}")]
    ExpectationFailure(&'static str, f64),
    #[error("rank ambiguity: residual {0:.3e} within a decade of cutoff {1:.3e}")]
    RankAmbiguity(f64, f64),
}

/// Linear map on d×d matrices stored as a d²×d² matrix over row-major
/// vectorization.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    pub d: usize,
    pub mat: CMatrix,
}

impl SuperOperator {
    pub fn identity(d: usize) -> Self {
        SuperOperator { d, mat: CMatrix::identity(d * d) }
    }

    /// Columns are the images of the matrix units in row-major order.
    pub fn from_action(d: usize, action: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let mut mat = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let img = action(&CMatrix::unit(d, i, j));
                let col = i * d + j;
                for (row, z) in img.data.iter().enumerate() {
                    mat.set(row, col, *z);
                }
            }
        }
        SuperOperator { d, mat }
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let v = self.mat.matmul(&CMatrix::col_vector(&m.vectorize()));
        CMatrix::unvectorize(&v.data, self.d, self.d)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &SuperOperator) -> SuperOperator {
        SuperOperator { d: self.d, mat: self.mat.matmul(&other.mat) }
    }

    pub fn sub_fro_norm(&self, other: &SuperOperator) -> f64 {
        (&self.mat - &other.mat).fro_norm()
    }
}

fn check_len(b: &QGBundle, f: &L1Function) -> Result<(), MultiplierError> {
    if f.values.len() != b.d {
        return Err(MultiplierError::LengthMismatch(f.values.len(), b.d));
    }
    Ok(())
}

/// Θ(f): ρ ↦ ρ★D_f with D_f = diag(f), the predual of
/// T ↦ (id⊗f)(V(T⊗1)V*). Anti-multiplicative: Θ(f★g) = Θ(g)∘Θ(f),
/// because ★ only sees the diagonal of its right factor and
/// diag(D_f★D_g) = f★g exactly.
pub fn theta(b: &QGBundle, f: &L1Function) -> Result<SuperOperator, MultiplierError> {
    check_len(b, f)?;
    let df = CMatrix::diag(&f.values);
    Ok(SuperOperator::from_action(b.d, |rho| {
        conv::star(b, rho, &df).expect("dims fixed")
    }))
}

/// Group-algebra lift of a coefficient function: λ̂(f̂) = (1/d)Σ_s f̂[s]·λ(s⁻¹),
/// the unique group-algebra element with π̂(λ̂(f̂)) = f̂.
pub fn coefficient_lift(b: &QGBundle, fh: &L1Function) -> Result<CMatrix, MultiplierError> {
    check_len(b, fh)?;
    let g = b.group().expect("lift needs group coordinates");
    let d = b.d;
    let mut out = CMatrix::zeros(d, d);
    for s in 0..d {
        let lam = left_regular(g, g.inv(s));
        out = &out + &lam.scale(fh.values[s] / d as f64);
    }
    Ok(out)
}

/// Θ̂(f̂): ρ ↦ ρ•λ̂(f̂), the dual-side analogue of Θ.
pub fn theta_hat(b: &QGBundle, fh: &L1Function) -> Result<SuperOperator, MultiplierError> {
    let lift = coefficient_lift(b, fh)?;
    Ok(SuperOperator::from_action(b.d, |rho| {
        conv::bullet(b, rho, &lift).expect("dims fixed")
    }))
}

/// Operator-level Haar-mean expectation Φ(T) = (id⊗h)(V(T⊗1)V*) with h the
/// vector state of the Haar vector. Projects onto the group-algebra span of
/// the translations, fixes each λ(s), and is a module map for the action
/// T·ρ = (id⊗tr(·ρᵀ-pairing))(V(T⊗1)V*(1⊗ρ)).
pub fn haar_expectation(b: &QGBundle) -> SuperOperator {
    let d = b.d;
    let v = linalg::SparseMatrix::from_dense(&b.v);
    let xi = &b.haar_vector;
    SuperOperator::from_action(d, |t| {
        let lifted = linalg::kron(t, &CMatrix::identity(d)).expect("dims fixed");
        // V(T⊗1)V*
        let m = v.adjoint().conjugate_dense(&lifted);
        CMatrix::from_fn(d, d, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for tt in 0..d {
                for u in 0..d {
                    acc += xi.get(tt, 0).conj() * m.get(i * d + tt, j * d + u) * xi.get(u, 0);
                }
            }
            acc
        })
    })
}

/// Module action of trace class on operators: T·ρ = (id⊗tr)(V(T⊗1)V*(1⊗ρ)).
pub fn module_action(b: &QGBundle, t: &CMatrix, rho: &CMatrix) -> CMatrix {
    let d = b.d;
    let v = linalg::SparseMatrix::from_dense(&b.v);
    let lifted = linalg::kron(t, &CMatrix::identity(d)).expect("dims fixed");
    let m = v.adjoint().conjugate_dense(&lifted);
    let with_rho = m.matmul(&linalg::kron(&CMatrix::identity(d), rho).expect("dims fixed"));
    linalg::partial_trace(&with_rho, linalg::Leg::Second, d).expect("dims fixed")
}

/// Validates the three conditional-expectation properties of
/// `haar_expectation`: idempotence, fixed translations with group-algebra
/// range, and the right module property.
pub fn verify_haar_expectation(b: &QGBundle, tol: f64) -> Result<(), MultiplierError> {
    let phi = haar_expectation(b);
    let d = b.d;
    let idem = phi.compose(&phi).sub_fro_norm(&phi);
    if idem > tol {
        return Err(MultiplierError::ExpectationFailure("idempotence", idem));
    }
    if let Some(g) = b.group() {
        // fixes each translation operator
        let mut worst = 0.0f64;
        for s in 0..d {
            let lam = left_regular(g, s);
            worst = worst.max((&phi.apply(&lam) - &lam).fro_norm());
        }
        if worst > tol {
            return Err(MultiplierError::ExpectationFailure("fixed-translations", worst));
        }
        // range inside span{λ(s)}: project Φ(E_ij) onto the span and compare
        let lams: Vec<CMatrix> = (0..d).map(|s| left_regular(g, s)).collect();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let img = phi.apply(&CMatrix::unit(d, i, j));
                // translations are HS-orthogonal with ‖λ(s)‖² = d
                let mut proj = CMatrix::zeros(d, d);
                for lam in &lams {
                    let coeff = img.hs_inner(lam) / d as f64;
                    proj = &proj + &lam.scale(coeff);
                }
                worst = worst.max((&img - &proj).fro_norm());
            }
        }
        if worst > tol {
            return Err(MultiplierError::ExpectationFailure("range", worst));
        }
    }
    // right module property over a few deterministic probes
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let t = linalg::random_matrix(&mut rng, d, d);
        let rho = linalg::random_matrix(&mut rng, d, d);
        let lhs = phi.apply(&module_action(b, &t, &rho));
        let rhs = module_action(b, &phi.apply(&t), &rho);
        worst = worst.max((&lhs - &rhs).fro_norm() / (t.fro_norm() * rho.fro_norm()).max(1.0));
    }
    if worst > tol {
        return Err(MultiplierError::ExpectationFailure("module-map", worst));
    }
    Ok(())
}

/// Which side of the mixed product the module-map condition constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleSide {
    /// θ(ρ₀⊛τ) = ρ₀⊛θ(τ) for all trace-zero ρ₀
    Left,
    /// θ(ρ⊛τ₀) = θ(ρ)⊛τ₀ for all trace-zero τ₀
    Right,
}

/// Result of the module-map dimension experiment.
#[derive(Debug)]
pub struct DimReport {
    pub dim: usize,
    pub predicted_dim: usize,
    pub basis: Vec<SuperOperator>,
    /// Direct constraint residual of each candidate eigenvector, ascending.
    pub residuals: Vec<f64>,
    /// Ratio between the first discarded and last kept residual.
    pub gap: f64,
    /// Max constraint residual over the predicted spanning superoperators.
    pub predicted_max_residual: f64,
    /// Max distance of a predicted spanning vector from the computed space.
    pub containment_residual: f64,
    /// Max distance of a computed basis element from its closed-form
    /// reconstruction via `commutant_map` (zero means the measured space is
    /// exactly the one-parameter-matrix family).
    pub closed_form_residual: f64,
}

/// The closed-form module map determined by a single matrix parameter:
/// θ_A(τ) = τ★A − A•τ + tr(τ)·A on the left side, and the mirror
/// θ_B(τ) = τ•B − B★τ + tr(τ)·B on the right side. Every map of this form
/// satisfies the corresponding one-sided module property exactly, and
/// every module map arises this way with A = θ(ηη*) (left) respectively
/// B = θ(ξξ*) (right), where η is the co-unit vector and ξ the Haar vector.
pub fn commutant_map(b: &QGBundle, side: ModuleSide, a: &CMatrix) -> SuperOperator {
    let a = a.clone();
    SuperOperator::from_action(b.d, move |tau| {
        let (fwd, bwd) = match side {
            ModuleSide::Left => (
                conv::star(b, tau, &a).expect("dims fixed"),
                conv::bullet(b, &a, tau).expect("dims fixed"),
            ),
            ModuleSide::Right => (
                conv::bullet(b, tau, &a).expect("dims fixed"),
                conv::star(b, &a, tau).expect("dims fixed"),
            ),
        };
        &(&fwd - &bwd) + &a.scale(tau.trace())
    })
}

/// The parameter matrix recovering a module map through `commutant_map`:
/// θ applied to the co-unit projection (left) or Haar projection (right).
pub fn commutant_parameter(b: &QGBundle, side: ModuleSide, theta: &SuperOperator) -> CMatrix {
    let pivot = match side {
        ModuleSide::Left => rank_one(&b.counit_vector),
        ModuleSide::Right => rank_one(&b.haar_vector),
    };
    theta.apply(&pivot)
}

fn mixed_side_superoperator(b: &QGBundle, fixed: &CMatrix, side: ModuleSide) -> SuperOperator {
    SuperOperator::from_action(b.d, |x| match side {
        ModuleSide::Left => lie::ostar(b, fixed, x).expect("dims fixed"),
        ModuleSide::Right => lie::ostar(b, x, fixed).expect("dims fixed"),
    })
}

fn constraint_residual(theta: &CMatrix, mults: &[CMatrix]) -> f64 {
    mults
        .iter()
        .map(|l| {
            let c = &theta.matmul(l) - &l.matmul(theta);
            c.fro_norm().powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Measures dim{θ : θ is a module map for the chosen side} and compares with
/// the span of the multiplier superoperators plus the rank-one trace
/// functional. The nullspace is found from the Gram matrix of the commutator
/// constraints; every candidate eigenvector is re-scored by its direct
/// constraint residual so the kept/discarded decision does not depend on
/// eigenvalue roundoff.
///
/// The measured dimension is d², the full `commutant_map` family, and the
/// multiplier span accounts for d + 1 of those dimensions, so for d ≥ 2 the
/// multiplier maps do not exhaust the module maps at finite scale. The
/// report carries both numbers plus containment and closed-form residuals so
/// the comparison is documented rather than assumed.
pub fn module_map_space_dim(b: &QGBundle, side: ModuleSide) -> Result<DimReport, MultiplierError> {
    let d = b.d;
    let n = d * d;
    let (tz_basis, _) = trace_zero_basis(d);

    // superoperator matrices of x ↦ ρ₀⊛x (or x ↦ x⊛τ₀)
    let mults: Vec<CMatrix> = tz_basis
        .iter()
        .map(|rho| mixed_side_superoperator(b, rho, side).mat)
        .collect();

    // Gram matrix over sampled constraints for large d, full basis otherwise
    let gram_mults: Vec<CMatrix> = if d <= 6 {
        mults.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..8)
            .map(|_| mixed_side_superoperator(b, &random_trace_zero(&mut rng, d), side).mat)
            .collect()
    };

    // vec(ΘL − LΘ) = (I⊗Lᵀ − L⊗I)·vec(Θ) in row-major convention, so
    // Σ AᴴA expands into four Kronecker blocks per constraint
    let id = CMatrix::identity(n);
    let mut gram = CMatrix::zeros(n * n, n * n);
    for l in &gram_mults {
        let lt = l.transpose();
        let lc = l.conj();
        let lh = l.adjoint();
        let t1 = linalg::kron(&id, &lc.matmul(&lt)).expect("dims");
        let t2 = linalg::kron(l, &lc).expect("dims");
        let t3 = linalg::kron(&lh, &lt).expect("dims");
        let t4 = linalg::kron(&lh.matmul(l), &id).expect("dims");
        gram = &gram + &(&(&t1 - &t2) + &(&t4 - &t3));
    }

    let eig = nalgebra::SymmetricEigen::new(linalg::to_nalgebra(&gram));

    // re-score every eigenvector by the direct residual over the full basis
    let mut scored: Vec<(f64, CMatrix)> = Vec::with_capacity(n * n);
    for k in 0..n * n {
        let col = eig.eigenvectors.column(k);
        let theta_mat = CMatrix::from_fn(n, n, |i, j| col[i * n + j]);
        scored.push((constraint_residual(&theta_mat, &mults), theta_mat));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let residuals: Vec<f64> = scored.iter().map(|(r, _)| *r).collect();
    let scale = residuals.last().copied().unwrap_or(1.0).max(1.0);
    let cutoff = 1e-8 * scale;
    let dim = residuals.iter().filter(|&&r| r <= cutoff).count();
    let gap = if dim == 0 || dim == residuals.len() {
        f64::INFINITY
    } else {
        residuals[dim] / residuals[dim - 1].max(1e-300)
    };
    if dim > 0 && dim < residuals.len() {
        let kept = residuals[dim - 1];
        let discarded = residuals[dim];
        if kept > cutoff / 10.0 || discarded < cutoff * 10.0 {
            return Err(MultiplierError::RankAmbiguity(kept.max(discarded), cutoff));
        }
    }
    let basis: Vec<SuperOperator> = scored[..dim]
        .iter()
        .map(|(_, m)| SuperOperator { d, mat: m.clone() })
        .collect();

    // predicted span: multiplier superoperators for the indicator functions
    // plus the rank-one trace functional of the matching side
    let mut predicted: Vec<SuperOperator> = Vec::new();
    for s in 0..d {
        let f = L1Function::indicator(d, s);
        predicted.push(match side {
            ModuleSide::Left => theta(b, &f)?,
            ModuleSide::Right => theta_hat(b, &f)?,
        });
    }
    let pivot = match side {
        ModuleSide::Left => rank_one(&b.haar_vector),
        ModuleSide::Right => rank_one(&b.counit_vector),
    };
    predicted.push(SuperOperator::from_action(d, |rho| pivot.scale(rho.trace())));

    let predicted_max_residual = predicted
        .iter()
        .map(|p| constraint_residual(&p.mat, &mults))
        .fold(0.0f64, f64::max);

    // dimension of the predicted span by SVD of stacked vectorizations
    let mut span = CMatrix::zeros(n * n, predicted.len());
    for (k, p) in predicted.iter().enumerate() {
        for (row, z) in p.mat.data.iter().enumerate() {
            span.set(row, k, *z);
        }
    }
    let svd = linalg::to_nalgebra(&span).svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let predicted_dim = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1.0)).count();

    // containment: components of predicted vectors outside the computed space
    let mut containment_residual = 0.0f64;
    for p in &predicted {
        let pn = p.mat.fro_norm().max(1e-300);
        let mut residual_vec = p.mat.clone();
        for bvec in &basis {
            let coeff = p.mat.hs_inner(&bvec.mat);
            residual_vec = &residual_vec - &bvec.mat.scale(coeff);
        }
        containment_residual = containment_residual.max(residual_vec.fro_norm() / pn);
    }

    // closed form: each computed basis map must be recovered exactly from its
    // single matrix parameter
    let mut closed_form_residual = 0.0f64;
    for bvec in &basis {
        let param = commutant_parameter(b, side, bvec);
        let rebuilt = commutant_map(b, side, &param);
        let norm = bvec.mat.fro_norm().max(1e-300);
        closed_form_residual = closed_form_residual.max(bvec.sub_fro_norm(&rebuilt) / norm);
    }

    Ok(DimReport {
        dim,
        predicted_dim,
        basis,
        residuals,
        gap,
        predicted_max_residual,
        containment_residual,
        closed_form_residual,
    })
}

/// Θ is injective at finite scale: the linearization f ↦ vec(Θ(f)) has full
/// rank d.
pub fn theta_injective(b: &QGBundle) -> Result<bool, MultiplierError> {
    let d = b.d;
    let n = d * d;
    let mut m = CMatrix::zeros(n * n, d);
    for s in 0..d {
        let t = theta(b, &L1Function::indicator(d, s))?;
        for (row, z) in t.mat.data.iter().enumerate() {
            m.set(row, s, *z);
        }
    }
    let svd = linalg::to_nalgebra(&m).svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1.0)).count();
    Ok(rank == d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::build_commutative;
    use crate::group::{build_standard, Family};
    use crate::linalg::random_matrix;

    fn bundle(f: Family, params: &[usize]) -> QGBundle {
        build_commutative(&build_standard(f, params).unwrap()).unwrap()
    }

    fn random_function(rng: &mut ChaCha8Rng, d: usize) -> L1Function {
        L1Function { values: random_matrix(rng, d, 1).data }
    }

    #[test]
    fn theta_of_identity_indicator_is_identity() {
        let b = bundle(Family::Cyclic, &[3]);
        let t = theta(&b, &L1Function::indicator(3, 0)).unwrap();
        assert!(t.sub_fro_norm(&SuperOperator::identity(3)) <= 1e-13);
    }

    #[test]
    fn theta_hat_of_constant_one_is_identity() {
        let b = bundle(Family::Symmetric, &[3]);
        let t = theta_hat(&b, &L1Function::constant(6, Complex64::new(1.0, 0.0))).unwrap();
        assert!(t.sub_fro_norm(&SuperOperator::identity(6)) <= 1e-12);
    }

    #[test]
    fn coefficient_lift_inverts_pi_hat() {
        let b = bundle(Family::Symmetric, &[3]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fh = random_function(&mut rng, 6);
        let lift = coefficient_lift(&b, &fh).unwrap();
        let back = conv::pi_hat(&b, &lift).unwrap();
        assert!(back.sub_norm(&fh) <= 1e-12);
    }

    #[test]
    fn theta_is_anti_multiplicative() {
        let b = bundle(Family::Cyclic, &[4]);
        let g = b.group().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_function(&mut rng, 4);
        let h = random_function(&mut rng, 4);
        let lhs = theta(&b, &f.convolve(&g, &h)).unwrap();
        let rhs = theta(&b, &h).unwrap().compose(&theta(&b, &f).unwrap());
        assert!(lhs.sub_fro_norm(&rhs) <= 1e-11);
    }

    #[test]
    fn theta_hat_is_anti_multiplicative_pointwise() {
        let b = bundle(Family::Cyclic, &[4]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_function(&mut rng, 4);
        let h = random_function(&mut rng, 4);
        let lhs = theta_hat(&b, &f.pointwise(&h)).unwrap();
        let rhs = theta_hat(&b, &h).unwrap().compose(&theta_hat(&b, &f).unwrap());
        assert!(lhs.sub_fro_norm(&rhs) <= 1e-11);
    }

    #[test]
    fn theta_is_left_module_map_on_s3() {
        let b = bundle(Family::Symmetric, &[3]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_function(&mut rng, 6);
        let t = theta(&b, &f).unwrap();
        let rho0 = random_trace_zero(&mut rng, 6);
        let tau = random_matrix(&mut rng, 6, 6);
        let lhs = t.apply(&lie::ostar(&b, &rho0, &tau).unwrap());
        let rhs = lie::ostar(&b, &rho0, &t.apply(&tau)).unwrap();
        assert!((&lhs - &rhs).fro_norm() <= 1e-10 * lhs.fro_norm().max(1.0));
    }

    #[test]
    fn theta_hat_is_right_module_map_on_s3() {
        let b = bundle(Family::Symmetric, &[3]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let fh = random_function(&mut rng, 6);
        let t = theta_hat(&b, &fh).unwrap();
        let rho = random_matrix(&mut rng, 6, 6);
        let tau0 = random_trace_zero(&mut rng, 6);
        let lhs = t.apply(&lie::ostar(&b, &rho, &tau0).unwrap());
        let rhs = lie::ostar(&b, &t.apply(&rho), &tau0).unwrap();
        assert!((&lhs - &rhs).fro_norm() <= 1e-10 * lhs.fro_norm().max(1.0));
    }

    #[test]
    fn theta_and_theta_hat_commute() {
        let b = bundle(Family::Cyclic, &[4]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = random_function(&mut rng, 4);
        let fh = random_function(&mut rng, 4);
        let a = theta(&b, &f).unwrap();
        let c = theta_hat(&b, &fh).unwrap();
        assert!(a.compose(&c).sub_fro_norm(&c.compose(&a)) <= 1e-11);
    }

    #[test]
    fn haar_expectation_properties_d4() {
        let b = bundle(Family::Dihedral, &[4]);
        verify_haar_expectation(&b, 1e-10).unwrap();
    }

    #[test]
    fn haar_expectation_averages_diagonals() {
        let b = bundle(Family::Cyclic, &[3]);
        let phi = haar_expectation(&b);
        let x = CMatrix::diag(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(6.0, 0.0),
        ]);
        let expect = CMatrix::identity(3).scale(Complex64::new(3.0, 0.0));
        assert!((&phi.apply(&x) - &expect).fro_norm() <= 1e-12);
    }

    #[test]
    fn dimension_experiment_z2_left() {
        let b = bundle(Family::Cyclic, &[2]);
        let r = module_map_space_dim(&b, ModuleSide::Left).unwrap();
        assert_eq!(r.dim, 4, "measured space is the full matrix-parameter family");
        assert_eq!(r.predicted_dim, 3, "multiplier span is d + 1 dimensional");
        assert!(r.gap >= 1e4, "gap {}", r.gap);
        assert!(r.predicted_max_residual <= 1e-10);
        assert!(r.containment_residual <= 1e-8);
        assert!(r.closed_form_residual <= 1e-8);
    }

    #[test]
    fn dimension_experiment_z2_right() {
        let b = bundle(Family::Cyclic, &[2]);
        let r = module_map_space_dim(&b, ModuleSide::Right).unwrap();
        assert_eq!(r.dim, 4);
        assert_eq!(r.predicted_dim, 3);
        assert!(r.gap >= 1e4);
        assert!(r.containment_residual <= 1e-8);
        assert!(r.closed_form_residual <= 1e-8);
    }

    #[test]
    fn dimension_experiment_z3_left() {
        let b = bundle(Family::Cyclic, &[3]);
        let r = module_map_space_dim(&b, ModuleSide::Left).unwrap();
        assert_eq!(r.dim, 9);
        assert_eq!(r.predicted_dim, 4);
        assert!(r.gap >= 1e4);
        assert!(r.closed_form_residual <= 1e-8);
    }

    #[test]
    fn commutant_map_satisfies_module_property_nonabelian() {
        let b = bundle(Family::Symmetric, &[3]);
        let d = b.d;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (tz, _) = trace_zero_basis(d);
        for side in [ModuleSide::Left, ModuleSide::Right] {
            let a = random_matrix(&mut rng, d, d);
            let map = commutant_map(&b, side, &a);
            let mut worst = 0.0f64;
            for rho in &tz {
                let act = mixed_side_superoperator(&b, rho, side);
                worst = worst.max(map.compose(&act).sub_fro_norm(&act.compose(&map)));
            }
            assert!(worst <= 1e-10 * a.fro_norm().max(1.0), "residual {worst}");
            // parameter recovery round-trips
            let back = commutant_parameter(&b, side, &map);
            assert!((&back - &a).fro_norm() <= 1e-10);
        }
    }

    #[test]
    fn theta_injectivity() {
        for b in [bundle(Family::Cyclic, &[2]), bundle(Family::Symmetric, &[3])] {
            assert!(theta_injective(&b).unwrap());
        }
    }
}
