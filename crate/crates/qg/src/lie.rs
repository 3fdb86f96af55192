//! Mixed products on the trace-zero subspace.
//!
//! ρ⊛τ = ½(ρ★τ − τ•ρ) and ρ⊛⁺τ = ½(ρ★τ + τ•ρ) are associative on
//! Ker(tr) because the two convolution products commute in the sense
//! a★(b•c) = b•(a★c) and (a★b)•c = (a•c)★b; the abstract engine consumes
//! any pair of products with those properties, after testing them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{build_dual, rank_one, QGBundle};
use crate::conv::{self, ConvError};
use crate::group::FiniteGroup;
use crate::linalg::{random_matrix, random_trace_zero, CMatrix};
use crate::report::VerifyReport;

#[derive(Debug, thiserror::Error)]
pub enum LieError {
    #[error(transparent)]
    Conv(#[from] ConvError),
    #[error("trace residual {0:.3e} exceeds the strict bound")]
    NotTraceZero(f64),
    #[error("product pair rejected: {0} residual {1:.3e}")]
    PairRejected(&'static str, f64),
    #[error("identity element failed on basis vector {0}: residual {1:.3e}")]
    IdentityFailure(String, f64),
    #[error("no noncommuting pair found; best relative commutator {0:.3e}")]
    NoWitness(f64),
    #[error("trace-zero space is trivial at dimension {0}")]
    TrivialSpace(usize),
    #[error("group order {0} exceeds the structure-table cap {1}")]
    TableCap(usize, usize),
}

/// How to treat inputs with nonzero trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceZeroMode {
    /// Reject when |tr| > 1e−12.
    Strict,
    /// Subtract tr(m)·ξξ* with ξ the Haar vector (trace-one pivot).
    Project,
}

/// A matrix constrained to the kernel of the trace.
#[derive(Debug, Clone)]
pub struct TraceZeroElement {
    pub mat: CMatrix,
}

impl TraceZeroElement {
    pub fn new(b: &QGBundle, mat: CMatrix, mode: TraceZeroMode) -> Result<Self, LieError> {
        let t = mat.trace();
        match mode {
            TraceZeroMode::Strict => {
                if t.norm() > 1e-12 {
                    return Err(LieError::NotTraceZero(t.norm()));
                }
                Ok(TraceZeroElement { mat })
            }
            TraceZeroMode::Project => {
                let pivot = rank_one(&b.haar_vector);
                Ok(TraceZeroElement { mat: &mat - &pivot.scale(t) })
            }
        }
    }
}

/// ρ⊛τ = ½(ρ★τ − τ•ρ).
pub fn ostar(b: &QGBundle, rho: &CMatrix, tau: &CMatrix) -> Result<CMatrix, ConvError> {
    let s = conv::star(b, rho, tau)?;
    let bl = conv::bullet(b, tau, rho)?;
    Ok((&s - &bl).scale(Complex64::new(0.5, 0.0)))
}

/// ρ⊛⁺τ = ½(ρ★τ + τ•ρ).
pub fn ostar_plus(b: &QGBundle, rho: &CMatrix, tau: &CMatrix) -> Result<CMatrix, ConvError> {
    let s = conv::star(b, rho, tau)?;
    let bl = conv::bullet(b, tau, rho)?;
    Ok((&s + &bl).scale(Complex64::new(0.5, 0.0)))
}

/// Closed form on a group bundle:
/// (ω⊛τ)_{s,t} = ½ Σ_r (τ_{r,r}·ω_{sr⁻¹,tr⁻¹} − τ_{s,t}·ω_{sr,tr}),
/// the •-term using right translates (the direction that matches the V̂
/// route; see `conv::bullet_orientation`).
pub fn entrywise_ostar_commutative(
    g: &FiniteGroup,
    omega: &CMatrix,
    tau: &CMatrix,
) -> Result<CMatrix, ConvError> {
    let d = g.order;
    if omega.rows != d || omega.cols != d || tau.rows != d || tau.cols != d {
        return Err(ConvError::DimensionMismatch(omega.rows, omega.cols, d));
    }
    Ok(CMatrix::from_fn(d, d, |s, t| {
        let total: Complex64 = (0..d)
            .map(|r| {
                let star_term = tau.get(r, r) * omega.get(g.mul(s, g.inv(r)), g.mul(t, g.inv(r)));
                let bullet_term = tau.get(s, t) * omega.get(g.mul(s, r), g.mul(t, r));
                star_term - bullet_term
            })
            .sum();
        total * 0.5
    }))
}

// ---------------------------------------------------------------------------
// Abstract commuting-products engine
// ---------------------------------------------------------------------------

/// Two bilinear products over d×d matrices, consumed abstractly.
pub struct ProductPair<'a> {
    pub d: usize,
    pub star: Box<dyn Fn(&CMatrix, &CMatrix) -> CMatrix + 'a>,
    pub bullet: Box<dyn Fn(&CMatrix, &CMatrix) -> CMatrix + 'a>,
}

impl<'a> ProductPair<'a> {
    pub fn from_bundle(b: &'a QGBundle) -> Self {
        ProductPair {
            d: b.d,
            star: Box::new(move |x, y| conv::star(b, x, y).expect("dims fixed")),
            bullet: Box::new(move |x, y| conv::bullet(b, x, y).expect("dims fixed")),
        }
    }
}

/// Sign of the •-term in the mixed product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedSign {
    /// a⊛b = ½(a★b − b•a)
    Minus,
    /// a⊛⁺b = ½(a★b + b•a)
    Plus,
}

/// A mixed-product evaluator admitted by the engine.
pub struct MixedProduct<'a> {
    pair: ProductPair<'a>,
    sign: MixedSign,
}

impl<'a> MixedProduct<'a> {
    pub fn eval(&self, a: &CMatrix, b: &CMatrix) -> CMatrix {
        let s = (self.pair.star)(a, b);
        let bl = (self.pair.bullet)(b, a);
        let combined = match self.sign {
            MixedSign::Minus => &s - &bl,
            MixedSign::Plus => &s + &bl,
        };
        combined.scale(Complex64::new(0.5, 0.0))
    }
}

/// Tests the two commuting-products conditions on sampled trace-zero triples
/// and returns the mixed evaluator only when both hold:
/// (1) a★(b•c) == b•(a★c) and (2) (a★b)•c == (a•c)★b.
/// Ordinary matrix multiplication paired with itself fails (1) generically
/// and is rejected with the violating residual.
pub fn mixed_product_general<'a>(
    pair: ProductPair<'a>,
    sign: MixedSign,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<MixedProduct<'a>, LieError> {
    let d = pair.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_trace_zero(&mut rng, d);
        let b = random_trace_zero(&mut rng, d);
        let c = random_trace_zero(&mut rng, d);
        let scale = a.fro_norm() * b.fro_norm() * c.fro_norm();
        let lhs1 = (pair.star)(&a, &(pair.bullet)(&b, &c));
        let rhs1 = (pair.bullet)(&b, &(pair.star)(&a, &c));
        let r1 = (&lhs1 - &rhs1).fro_norm() / scale.max(1e-30);
        if r1 > tol {
            return Err(LieError::PairRejected("interchange", r1));
        }
        let lhs2 = (pair.bullet)(&(pair.star)(&a, &b), &c);
        let rhs2 = (pair.star)(&(pair.bullet)(&a, &c), &b);
        let r2 = (&lhs2 - &rhs2).fro_norm() / scale.max(1e-30);
        if r2 > tol {
            return Err(LieError::PairRejected("transfer", r2));
        }
    }
    Ok(MixedProduct { pair, sign })
}

// ---------------------------------------------------------------------------
// Verification sweeps
// ---------------------------------------------------------------------------

/// Associativity of ⊛ and ⊛⁺ over random trace-zero triples, plus the
/// weaker middle-element-only variant with arbitrary-trace outer factors.
pub fn verify_associativity(b: &QGBundle, n_samples: usize, tol: f64, seed: u64) -> VerifyReport {
    let start = std::time::Instant::now();
    let mut report = VerifyReport::new("lie-associativity", b.provenance.label(), seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = b.d;
    if d < 2 {
        report.notes.push("trace-zero space is trivial; vacuous".into());
        report.timing_ms = start.elapsed().as_millis();
        return report;
    }
    let mut worst = [0.0f64; 4];
    for _ in 0..n_samples {
        let rho = random_trace_zero(&mut rng, d);
        let omega = random_trace_zero(&mut rng, d);
        let tau = random_trace_zero(&mut rng, d);
        let scale = (rho.fro_norm() * omega.fro_norm() * tau.fro_norm()).max(1e-30);

        let l = ostar(b, &ostar(b, &rho, &omega).unwrap(), &tau).unwrap();
        let r = ostar(b, &rho, &ostar(b, &omega, &tau).unwrap()).unwrap();
        worst[0] = worst[0].max((&l - &r).fro_norm() / scale);

        let l = ostar_plus(b, &ostar_plus(b, &rho, &omega).unwrap(), &tau).unwrap();
        let r = ostar_plus(b, &rho, &ostar_plus(b, &omega, &tau).unwrap()).unwrap();
        worst[1] = worst[1].max((&l - &r).fro_norm() / scale);

        // arbitrary-trace outer factors, trace-zero middle
        let rho_f = random_matrix(&mut rng, d, d);
        let tau_f = random_matrix(&mut rng, d, d);
        let scale_f = (rho_f.fro_norm() * omega.fro_norm() * tau_f.fro_norm()).max(1e-30);
        let l = ostar(b, &ostar(b, &rho_f, &omega).unwrap(), &tau_f).unwrap();
        let r = ostar(b, &rho_f, &ostar(b, &omega, &tau_f).unwrap()).unwrap();
        worst[2] = worst[2].max((&l - &r).fro_norm() / scale_f);

        // shuffle identity: (ρ★τ)★ω == ρ★(τ•ω + τ★ω)
        let l = conv::star(b, &conv::star(b, &rho, &omega).unwrap(), &tau).unwrap();
        let inner = &conv::bullet(b, &omega, &tau).unwrap() + &conv::star(b, &omega, &tau).unwrap();
        let r = conv::star(b, &rho, &inner).unwrap();
        worst[3] = worst[3].max((&l - &r).fro_norm() / scale);
    }
    report.push("ostar-associative", "mixed product associativity", worst[0], tol);
    report.push("ostar-plus-associative", "plus-variant associativity", worst[1], tol);
    report.push("ostar-middle-only", "associativity with only the middle factor trace-zero", worst[2], tol);
    report.push("shuffle", "shuffle identity for the two products", worst[3], tol);
    report.timing_ms = start.elapsed().as_millis();
    report
}

/// Searches for an associativity violation when the middle factor has
/// nonzero trace; returns the largest relative defect found. A positive
/// result shows the trace-zero restriction is sharp.
pub fn associativity_sharpness(b: &QGBundle, n_samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = b.d;
    let mut best = 0.0f64;
    for _ in 0..n_samples {
        let rho = random_trace_zero(&mut rng, d);
        let omega = random_matrix(&mut rng, d, d); // generically nonzero trace
        let tau = random_trace_zero(&mut rng, d);
        let scale = (rho.fro_norm() * omega.fro_norm() * tau.fro_norm()).max(1e-30);
        let l = ostar(b, &ostar(b, &rho, &omega).unwrap(), &tau).unwrap();
        let r = ostar(b, &rho, &ostar(b, &omega, &tau).unwrap()).unwrap();
        best = best.max((&l - &r).fro_norm() / scale);
    }
    best
}

/// The mixed product of the dual bundle is the negative opposite of ⊛ and
/// the opposite of ⊛⁺: ρ⊛̂τ == −(τ⊛ρ) and ρ⊛̂⁺τ == τ⊛⁺ρ.
pub fn dual_product_relation(b: &QGBundle, n_samples: usize, tol: f64, seed: u64) -> VerifyReport {
    let start = std::time::Instant::now();
    let mut report = VerifyReport::new("lie-dual-relation", b.provenance.label(), seed);
    let dual = build_dual(b).expect("dual of a valid bundle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = b.d;
    let mut worst = [0.0f64; 2];
    for _ in 0..n_samples.max(1) {
        let rho = random_trace_zero(&mut rng, d);
        let tau = random_trace_zero(&mut rng, d);
        let scale = (rho.fro_norm() * tau.fro_norm()).max(1e-30);
        let hat = ostar(&dual, &rho, &tau).unwrap();
        let neg_opp = ostar(b, &tau, &rho).unwrap().scale(Complex64::new(-1.0, 0.0));
        worst[0] = worst[0].max((&hat - &neg_opp).fro_norm() / scale);
        let hat_p = ostar_plus(&dual, &rho, &tau).unwrap();
        let opp_p = ostar_plus(b, &tau, &rho).unwrap();
        worst[1] = worst[1].max((&hat_p - &opp_p).fro_norm() / scale);
    }
    report.push("dual-ostar-negative-opposite", "dual mixed product is the negative opposite", worst[0], tol);
    report.push("dual-ostar-plus-opposite", "dual plus-variant is the opposite", worst[1], tol);
    report.timing_ms = start.elapsed().as_millis();
    report
}

/// Finds trace-zero ρ, τ with a large ⊛-commutator, witnessing that the
/// algebra is noncommutative for every d ≥ 2. Deterministic given the seed.
pub fn nonabelian_witness(
    b: &QGBundle,
    seed: u64,
) -> Result<(CMatrix, CMatrix, f64), LieError> {
    let d = b.d;
    if d < 2 {
        return Err(LieError::TrivialSpace(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<(CMatrix, CMatrix)> = (0..64)
        .map(|_| (random_trace_zero(&mut rng, d), random_trace_zero(&mut rng, d)))
        .collect();
    if d <= 6 {
        let diffs: Vec<CMatrix> = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .map(|(i, j)| &CMatrix::unit(d, i, j) - &CMatrix::unit(d, j, i))
            .collect();
        for a in &diffs {
            for c in &diffs {
                candidates.push((a.clone(), c.clone()));
            }
        }
    }
    let mut best: Option<(CMatrix, CMatrix, f64)> = None;
    for (rho, tau) in candidates {
        let scale = (rho.fro_norm() * tau.fro_norm()).max(1e-30);
        let comm = &ostar(b, &rho, &tau)? - &ostar(b, &tau, &rho)?;
        let rel = comm.fro_norm() / scale;
        if best.as_ref().map_or(true, |(_, _, r)| rel > *r) {
            best = Some((rho, tau, rel));
        }
    }
    let (rho, tau, rel) = best.expect("nonempty candidate set");
    if rel > 0.01 {
        Ok((rho, tau, rel))
    } else {
        Err(LieError::NoWitness(rel))
    }
}

/// Basis of the trace-zero subspace: off-diagonal units E_{ij} then the
/// telescoping diagonal differences Z_i = E_{ii} − E_{i+1,i+1}. Labels
/// "E{i}{j}" and "Z{i}".
pub fn trace_zero_basis(d: usize) -> (Vec<CMatrix>, Vec<String>) {
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                basis.push(CMatrix::unit(d, i, j));
                labels.push(format!("E{i}_{j}"));
            }
        }
    }
    for i in 0..d - 1 {
        basis.push(&CMatrix::unit(d, i, i) - &CMatrix::unit(d, i + 1, i + 1));
        labels.push(format!("Z{i}"));
    }
    (basis, labels)
}

/// Coordinates of a trace-zero matrix in `trace_zero_basis` order; exact
/// because the diagonal part telescopes: the Z_i coefficient is the partial
/// sum of the first i+1 diagonal entries.
pub fn trace_zero_coordinates(m: &CMatrix) -> Vec<Complex64> {
    let d = m.rows;
    let mut coords = Vec::with_capacity(d * d - 1);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                coords.push(m.get(i, j));
            }
        }
    }
    let mut partial = Complex64::new(0.0, 0.0);
    for i in 0..d - 1 {
        partial += m.get(i, i);
        coords.push(partial);
    }
    coords
}

/// E = 2(ηη* − ξξ*): two-sided identity for ⊛ on the trace-zero subspace.
/// Verified against the full trace-zero basis before being returned.
pub fn identity_element(b: &QGBundle) -> Result<CMatrix, LieError> {
    let e = (&rank_one(&b.counit_vector) - &rank_one(&b.haar_vector)).scale(Complex64::new(2.0, 0.0));
    if b.d < 2 {
        return Ok(e); // trace-zero space is {0}; nothing to verify
    }
    let (basis, labels) = trace_zero_basis(b.d);
    for (tau, label) in basis.iter().zip(&labels) {
        let left = ostar(b, &e, tau)?;
        let right = ostar(b, tau, &e)?;
        let res = (&left - tau).fro_norm().max((&right - tau).fro_norm());
        if res > 1e-10 {
            return Err(LieError::IdentityFailure(label.clone(), res));
        }
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Structure constants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Star,
    Bullet,
    Ostar,
    OstarPlus,
}

impl ProductKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "star" => Some(ProductKind::Star),
            "bullet" => Some(ProductKind::Bullet),
            "ostar" => Some(ProductKind::Ostar),
            "ostar_plus" => Some(ProductKind::OstarPlus),
            _ => None,
        }
    }
}

/// c^k_{ij} table: basis_i ∘ basis_j = Σ_k entries[i][j][k]·basis_k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureConstants {
    pub schema_version: u32,
    pub group: String,
    pub product: ProductKind,
    pub basis_labels: Vec<String>,
    /// entries[i][j] = coordinate vector of basis_i ∘ basis_j, stored as
    /// [re, im] pairs.
    pub entries: Vec<Vec<Vec<[f64; 2]>>>,
}

pub const STRUCTURE_TABLE_MAX_ORDER: usize = 12;

/// Structure constants over the matrix-unit basis (★/•) or the trace-zero
/// basis (⊛/⊛⁺).
pub fn structure_constants(b: &QGBundle, product: ProductKind) -> Result<StructureConstants, LieError> {
    let d = b.d;
    if d > STRUCTURE_TABLE_MAX_ORDER {
        return Err(LieError::TableCap(d, STRUCTURE_TABLE_MAX_ORDER));
    }
    let (basis, labels): (Vec<CMatrix>, Vec<String>) = match product {
        ProductKind::Star | ProductKind::Bullet => {
            let mut basis = Vec::new();
            let mut labels = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    basis.push(CMatrix::unit(d, i, j));
                    labels.push(format!("E{i}_{j}"));
                }
            }
            (basis, labels)
        }
        ProductKind::Ostar | ProductKind::OstarPlus => trace_zero_basis(d),
    };
    let coords_of = |m: &CMatrix| -> Vec<[f64; 2]> {
        match product {
            ProductKind::Star | ProductKind::Bullet => {
                m.data.iter().map(|z| [z.re, z.im]).collect()
            }
            ProductKind::Ostar | ProductKind::OstarPlus => {
                trace_zero_coordinates(m).iter().map(|z| [z.re, z.im]).collect()
            }
        }
    };
    let mut entries = Vec::with_capacity(basis.len());
    for x in &basis {
        let mut row = Vec::with_capacity(basis.len());
        for y in &basis {
            let m = match product {
                ProductKind::Star => conv::star(b, x, y)?,
                ProductKind::Bullet => conv::bullet(b, x, y)?,
                ProductKind::Ostar => ostar(b, x, y)?,
                ProductKind::OstarPlus => ostar_plus(b, x, y)?,
            };
            row.push(coords_of(&m));
        }
        entries.push(row);
    }
    Ok(StructureConstants {
        schema_version: crate::report::SCHEMA_VERSION,
        group: b.provenance.label(),
        product,
        basis_labels: labels,
        entries,
    })
}
