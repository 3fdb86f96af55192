//! Convolution products on nuclear operators over ℓᵖ of a finite group.
//!
//! The fundamental maps act on ℓᵖ(G×G) by V_p: δ_a⊗δ_b ↦ Δ(b)^{1/p}·δ_{ab⁻¹}⊗δ_b
//! and V̂_p: δ_a⊗δ_b ↦ δ_a⊗δ_{ab}. A finite group is unimodular, so Δ ≡ 1 and
//! both matrices are p-independent permutations; the exponent is carried as
//! metadata and the Δ^{1/p} factor stays in the construction as an explicit
//! unit so a nonunimodular extension would touch exactly one function.
//!
//! Nuclear operators on ℓᵖ(G) are all d×d matrices under the trace pairing.
//! Conjugating ω⊗τ by the fundamental maps and tracing the second leg gives
//! two associative products; the mixed products on the trace-zero ideal are
//! built through the abstract commuting-products engine, which admits a pair
//! of products only after checking the interchange and transfer conditions.

use crate::group::FiniteGroup;
use crate::lie::{self, LieError, MixedProduct, MixedSign, ProductPair};
use crate::linalg::{self, CMatrix, Legs, SparseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("exponent {0} is outside (1, ∞)")]
    InvalidExponent(f64),
    #[error("fundamental map is not a permutation matrix")]
    NotPermutation,
    #[error("commutation relation residual {0:.3e} exceeds 1e-12")]
    CommutationFailure(f64),
    #[error("operand is {0}×{1}, pair dimension is {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error(transparent)]
    Engine(#[from] LieError),
}

/// The pair of fundamental isometries on ℓᵖ(G×G), stored densely with the
/// exponent retained as metadata.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub d: usize,
    pub v_p: CMatrix,
    pub v_hat_p: CMatrix,
    pub p: f64,
}

/// Hölder-conjugate exponent p' with 1/p + 1/p' = 1.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Δ(t)^{1/p} for the modular function of a finite group: identically one.
/// Kept as a named factor so the construction mirrors the general formula.
fn modular_factor(_t: usize, p: f64) -> f64 {
    let delta = 1.0f64;
    delta.powf(1.0 / p)
}

/// Builds V_p and V̂_p for a finite group, asserting that both are
/// permutation matrices and that V₁₂V̂₁₃ = V̂₁₃V₁₂V̂₂₃ holds on the triple
/// tensor space to 1e-12.
pub fn build_lp_pair(g: &FiniteGroup, p: f64) -> Result<FundamentalPair, LpError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(LpError::InvalidExponent(p));
    }
    let d = g.order;
    let mut v_p = CMatrix::zeros(d * d, d * d);
    let mut v_hat_p = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let col = a * d + b;
            let f = modular_factor(b, p);
            v_p.set(g.mul(a, g.inv(b)) * d + b, col, f.into());
            v_hat_p.set(a * d + g.mul(a, b), col, 1.0.into());
        }
    }
    let pair = FundamentalPair { d, v_p, v_hat_p, p };
    if !is_permutation(&pair.v_p) || !is_permutation(&pair.v_hat_p) {
        return Err(LpError::NotPermutation);
    }
    let resid = commutation_residual(&pair);
    if resid > 1e-12 {
        return Err(LpError::CommutationFailure(resid));
    }
    Ok(pair)
}

fn is_permutation(m: &CMatrix) -> bool {
    let n = m.rows;
    let mut row_seen = vec![false; n];
    let mut col_seen = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if z.norm_sqr() == 0.0 {
                continue;
            }
            if z != num_complex::Complex64::new(1.0, 0.0) || row_seen[i] || col_seen[j] {
                return false;
            }
            row_seen[i] = true;
            col_seen[j] = true;
        }
    }
    row_seen.iter().all(|&x| x) && col_seen.iter().all(|&x| x)
}

/// Frobenius residual of V₁₂V̂₁₃ − V̂₁₃V₁₂V̂₂₃ on the triple tensor space.
pub fn commutation_residual(pair: &FundamentalPair) -> f64 {
    let d = pair.d;
    let v = SparseMatrix::from_dense(&pair.v_p);
    let vh = SparseMatrix::from_dense(&pair.v_hat_p);
    let v12 = SparseMatrix::leg_embed(&v, Legs::L12, d);
    let vh13 = SparseMatrix::leg_embed(&vh, Legs::L13, d);
    let vh23 = SparseMatrix::leg_embed(&vh, Legs::L23, d);
    let lhs = v12.matmul(&vh13);
    let rhs = vh13.matmul(&v12).matmul(&vh23);
    lhs.sub_fro_norm(&rhs)
}

/// Residual of the conjugate-exponent duality V_p* = V_{p'}⁻¹. For a finite
/// group both sides are the same permutation transpose, so the residual is
/// structural: it vanishes identically and documents the general relation.
pub fn adjoint_duality_residual(g: &FiniteGroup, p: f64) -> Result<f64, LpError> {
    let pair = build_lp_pair(g, p)?;
    let dual = build_lp_pair(g, conjugate_exponent(p))?;
    // V_{p'}⁻¹ = V_{p'}ᵀ for a permutation matrix
    let inv = dual.v_p.transpose();
    Ok((&pair.v_p.adjoint() - &inv).fro_norm())
}

fn check_dims(pair: &FundamentalPair, m: &CMatrix) -> Result<(), LpError> {
    if m.rows != pair.d || m.cols != pair.d {
        return Err(LpError::DimensionMismatch(m.rows, m.cols, pair.d));
    }
    Ok(())
}

fn traced_conjugation(u: &CMatrix, omega: &CMatrix, tau: &CMatrix, d: usize) -> CMatrix {
    let lifted = linalg::kron(omega, tau).expect("dims checked");
    let m = SparseMatrix::from_dense(u).conjugate_dense(&lifted);
    linalg::partial_trace(&m, linalg::Leg::Second, d).expect("dims checked")
}

/// (id⊗tr)(V_p⁻¹ (ω⊗τ) V_p), the first convolution product on nuclear
/// operators. Coincides with the trace-class ★ of the commutative bundle for
/// every p.
pub fn star_p(pair: &FundamentalPair, omega: &CMatrix, tau: &CMatrix) -> Result<CMatrix, LpError> {
    check_dims(pair, omega)?;
    check_dims(pair, tau)?;
    Ok(traced_conjugation(&pair.v_p, omega, tau, pair.d))
}

/// (id⊗tr)(V̂_p⁻¹ (ω⊗τ) V̂_p), the second convolution product, the
/// Schur-type • of the dual side.
pub fn bullet_p(pair: &FundamentalPair, omega: &CMatrix, tau: &CMatrix) -> Result<CMatrix, LpError> {
    check_dims(pair, omega)?;
    check_dims(pair, tau)?;
    Ok(traced_conjugation(&pair.v_hat_p, omega, tau, pair.d))
}

impl FundamentalPair {
    /// The two products packaged for the abstract engine.
    pub fn product_pair(&self) -> ProductPair<'_> {
        ProductPair {
            d: self.d,
            star: Box::new(move |x, y| star_p(self, x, y).expect("dims fixed")),
            bullet: Box::new(move |x, y| bullet_p(self, x, y).expect("dims fixed")),
        }
    }
}

/// Admits the mixed product over (star_p, bullet_p) through the
/// commuting-products engine, which validates the interchange and transfer
/// conditions on sampled trace-zero triples before returning an evaluator.
pub fn mixed_product_p(
    pair: &FundamentalPair,
    sign: MixedSign,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<MixedProduct<'_>, LpError> {
    Ok(lie::mixed_product_general(pair.product_pair(), sign, samples, tol, seed)?)
}

/// ρ⊛ω = ½(ρ★ω − ω•ρ) on trace-zero elements through the admitted engine.
pub fn ostar_p(pair: &FundamentalPair, rho: &CMatrix, omega: &CMatrix) -> Result<CMatrix, LpError> {
    check_dims(pair, rho)?;
    check_dims(pair, omega)?;
    let mixed = mixed_product_p(pair, MixedSign::Minus, 8, 1e-9, 0x9e37)?;
    Ok(mixed.eval(rho, omega))
}

/// ρ⊛⁺ω = ½(ρ★ω + ω•ρ), the plus-sign sibling.
pub fn ostar_plus_p(
    pair: &FundamentalPair,
    rho: &CMatrix,
    omega: &CMatrix,
) -> Result<CMatrix, LpError> {
    check_dims(pair, rho)?;
    check_dims(pair, omega)?;
    let mixed = mixed_product_p(pair, MixedSign::Plus, 8, 1e-9, 0x9e37)?;
    Ok(mixed.eval(rho, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::build_commutative;
    use crate::conv;
    use crate::group::{build_standard, Family};
    use crate::linalg::{random_matrix, random_trace_zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(f: Family, params: &[usize]) -> FiniteGroup {
        build_standard(f, params).unwrap()
    }

    #[test]
    fn rejects_bad_exponents() {
        let g = group(Family::Cyclic, &[2]);
        assert!(matches!(build_lp_pair(&g, 1.0), Err(LpError::InvalidExponent(_))));
        assert!(matches!(build_lp_pair(&g, 0.5), Err(LpError::InvalidExponent(_))));
        assert!(matches!(build_lp_pair(&g, f64::INFINITY), Err(LpError::InvalidExponent(_))));
    }

    #[test]
    fn fundamental_maps_are_permutations_with_exact_commutation() {
        for (f, params) in [(Family::Cyclic, vec![4usize]), (Family::Symmetric, vec![3])] {
            let g = group(f, &params);
            let pair = build_lp_pair(&g, 2.5).unwrap();
            assert!(is_permutation(&pair.v_p));
            assert!(is_permutation(&pair.v_hat_p));
            assert!(commutation_residual(&pair) <= 1e-12);
        }
    }

    #[test]
    fn matches_hilbert_space_maps_on_z2() {
        let g = group(Family::Cyclic, &[2]);
        let b = build_commutative(&g).unwrap();
        let pair = build_lp_pair(&g, 3.0).unwrap();
        assert!((&pair.v_p - &b.v).fro_norm() <= 1e-14);
        assert!((&pair.v_hat_p - &b.w).fro_norm() <= 1e-14);
    }

    #[test]
    fn adjoint_duality_is_exact_for_permutations() {
        let g = group(Family::Symmetric, &[3]);
        for p in [1.5, 2.0, 3.0] {
            assert_eq!(adjoint_duality_residual(&g, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn products_collapse_to_trace_class_products() {
        let g = group(Family::Symmetric, &[3]);
        let b = build_commutative(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for p in [1.5, 2.0, 3.0] {
            let pair = build_lp_pair(&g, p).unwrap();
            for _ in 0..10 {
                let x = random_matrix(&mut rng, 6, 6);
                let y = random_matrix(&mut rng, 6, 6);
                let s = (&star_p(&pair, &x, &y).unwrap() - &conv::star(&b, &x, &y).unwrap())
                    .fro_norm();
                let c = (&bullet_p(&pair, &x, &y).unwrap() - &conv::bullet(&b, &x, &y).unwrap())
                    .fro_norm();
                assert!(s <= 1e-11, "star collapse residual {s}");
                assert!(c <= 1e-11, "bullet collapse residual {c}");
            }
        }
    }

    #[test]
    fn interchange_condition_vanishes_on_trace_zero() {
        let g = group(Family::Symmetric, &[3]);
        let pair = build_lp_pair(&g, 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let rho = random_trace_zero(&mut rng, 6);
            let omega = random_trace_zero(&mut rng, 6);
            let tau = random_trace_zero(&mut rng, 6);
            let prod = star_p(&pair, &rho, &bullet_p(&pair, &omega, &tau).unwrap()).unwrap();
            assert!(prod.fro_norm() <= 1e-10 * rho.fro_norm() * omega.fro_norm() * tau.fro_norm());
        }
    }

    #[test]
    fn transfer_condition_holds_on_arbitrary_triples() {
        let g = group(Family::Symmetric, &[3]);
        let pair = build_lp_pair(&g, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..25 {
            let rho = random_matrix(&mut rng, 6, 6);
            let omega = random_matrix(&mut rng, 6, 6);
            let tau = random_matrix(&mut rng, 6, 6);
            let lhs = bullet_p(&pair, &star_p(&pair, &rho, &omega).unwrap(), &tau).unwrap();
            let rhs = star_p(&pair, &bullet_p(&pair, &rho, &tau).unwrap(), &omega).unwrap();
            let scale = (rho.fro_norm() * omega.fro_norm() * tau.fro_norm()).max(1e-30);
            assert!((&lhs - &rhs).fro_norm() / scale <= 1e-12);
        }
    }

    #[test]
    fn mixed_product_is_associative_on_trace_zero() {
        let g = group(Family::Symmetric, &[3]);
        let pair = build_lp_pair(&g, 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for sign in [MixedSign::Minus, MixedSign::Plus] {
            let mixed = mixed_product_p(&pair, sign, 20, 1e-9, 5).unwrap();
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let a = random_trace_zero(&mut rng, 6);
                let b = random_trace_zero(&mut rng, 6);
                let c = random_trace_zero(&mut rng, 6);
                let l = mixed.eval(&mixed.eval(&a, &b), &c);
                let r = mixed.eval(&a, &mixed.eval(&b, &c));
                let scale = (a.fro_norm() * b.fro_norm() * c.fro_norm()).max(1e-30);
                worst = worst.max((&l - &r).fro_norm() / scale);
            }
            assert!(worst <= 1e-9, "associativity residual {worst}");
        }
    }

    #[test]
    fn ostar_p_agrees_with_trace_class_mixed_product() {
        let g = group(Family::Cyclic, &[4]);
        let b = build_commutative(&g).unwrap();
        let pair = build_lp_pair(&g, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let rho = random_trace_zero(&mut rng, 4);
            let omega = random_trace_zero(&mut rng, 4);
            let lhs = ostar_p(&pair, &rho, &omega).unwrap();
            let rhs = crate::lie::ostar(&b, &rho, &omega).unwrap();
            assert!((&lhs - &rhs).fro_norm() <= 1e-11);
            let lhs = ostar_plus_p(&pair, &rho, &omega).unwrap();
            let rhs = crate::lie::ostar_plus(&b, &rho, &omega).unwrap();
            assert!((&lhs - &rhs).fro_norm() <= 1e-11);
        }
    }

    #[test]
    fn engine_rejects_matrix_multiplication_pair() {
        let pair = ProductPair {
            d: 3,
            star: Box::new(|x: &CMatrix, y: &CMatrix| x.matmul(y)),
            bullet: Box::new(|x: &CMatrix, y: &CMatrix| x.matmul(y)),
        };
        match lie::mixed_product_general(pair, MixedSign::Minus, 32, 1e-3, 7) {
            Err(LieError::PairRejected(_, r)) => assert!(r > 1e-3),
            _ => panic!("matrix multiplication pair must be rejected"),
        }
    }
}
