//! Spatial-dynamics spectrum of the modulating-front problem.
//!
//! Writing a front as `(U, V)(ξ, p)` with `ξ = x − ct`, `p = x − c_p t` and
//! expanding in Fourier modes `e^{inp}`, each mode obeys a first-order system
//! in `ξ`: a 4×4 companion block `L_n^SH` for the Swift–Hohenberg part and a
//! 2×2 companion block `L_n^con` for the conservation law. Their eigenvalues
//! with (almost) vanishing real part span the center manifold; all others
//! must stay uniformly away from the imaginary axis.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cluster, eigen_residual, eigenvalues_complex, null_vector, poly_eval, poly_roots, polish_root, sort_by_real_desc};
use crate::model::{front_speed, ModelParams, Scenario, ScenarioTag};
use crate::wave::leading_order;

type C64 = Complex64;

/// Default truncation of the Fourier index.
pub const DEFAULT_N_MAX: i64 = 128;
/// Declared lower bound on `|Re λ|` for hyperbolic eigenvalues.
pub const DEFAULT_MIN_GAP: f64 = 0.1;
/// Eigenvalues closer than this are reported as one cluster with multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-7;

/// Which of the two spatial blocks an eigenvalue belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Swift–Hohenberg block (4×4).
    Sh,
    /// Conservation-law block (2×2).
    Con,
}

/// Spatial-dynamics blocks for one Fourier index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialBlock {
    /// Fourier index.
    pub n: i64,
    /// Companion matrix of the Swift–Hohenberg part; last row `(A_n, B_n, C_n, D_n)`.
    pub lsh: DMatrix<C64>,
    /// Companion matrix of the conservation law; last row `(E_n, F_n)`.
    pub lcon: DMatrix<C64>,
    /// Entries `[A_n, B_n, C_n, D_n, E_n, F_n]`.
    pub entries: [C64; 6],
}

/// Assembles the blocks for Fourier index `n`, front speed `c` and phase velocity `cp`.
///
/// ```text
/// A_n = ε²α0 − i c_u n³ + i n c_p − (1−n²)²     B_n = −3c_u n² + c + 4i(n³−n)
/// C_n = 3 i n c_u + 6n² − 2                      D_n = c_u − 4 i n
/// E_n = −i n c_v + n² − i n c_p                  F_n = −(c + c_v + 2 i n)
/// ```
pub fn build_block(params: &ModelParams, c: f64, cp: f64, n: i64) -> SpatialBlock {
    let nf = n as f64;
    let n2 = nf * nf;
    let n3 = n2 * nf;
    let eps2 = params.epsilon * params.epsilon;
    let cu = params.cu;
    let a = C64::new(eps2 * params.alpha0 - (1.0 - n2) * (1.0 - n2), -cu * n3 + nf * cp);
    let b = C64::new(-3.0 * cu * n2 + c, 4.0 * (n3 - nf));
    let cc = C64::new(6.0 * n2 - 2.0, 3.0 * nf * cu);
    let d = C64::new(cu, -4.0 * nf);
    let e = C64::new(n2, -nf * params.cv - nf * cp);
    let f = -C64::new(c + params.cv, 2.0 * nf);
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    #[rustfmt::skip]
    let lsh = DMatrix::from_row_slice(4, 4, &[
        zero, one, zero, zero,
        zero, zero, one, zero,
        zero, zero, zero, one,
        a, b, cc, d,
    ]);
    let lcon = DMatrix::from_row_slice(2, 2, &[zero, one, e, f]);
    SpatialBlock { n, lsh, lcon, entries: [a, b, cc, d, e, f] }
}

impl SpatialBlock {
    /// Ascending coefficients of `det(λ − L^SH) = λ⁴ − Dλ³ − Cλ² − Bλ − A`.
    pub fn sh_char_poly(&self) -> [C64; 5] {
        let [a, b, c, d, _, _] = self.entries;
        [-a, -b, -c, -d, C64::new(1.0, 0.0)]
    }

    /// Ascending coefficients of `det(λ − L^con) = λ² − Fλ − E`.
    pub fn con_char_poly(&self) -> [C64; 3] {
        let [_, _, _, _, e, f] = self.entries;
        [-e, -f, C64::new(1.0, 0.0)]
    }

    /// Matrix of the requested family.
    pub fn matrix(&self, family: Family) -> &DMatrix<C64> {
        match family {
            Family::Sh => &self.lsh,
            Family::Con => &self.lcon,
        }
    }
}

/// Eigenvalues of both blocks of one Fourier index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSpectrum {
    /// Four eigenvalues of `L^SH` (with multiplicity), sorted by descending real part.
    pub sh: Vec<C64>,
    /// Two eigenvalues of `L^con`, sorted by descending real part.
    pub con: Vec<C64>,
}

/// Roots of `λ² − Fλ − E` without cancellation.
fn quadratic_roots(e: C64, f: C64) -> [C64; 2] {
    let disc = (f * f + 4.0 * e).sqrt();
    let q1 = 0.5 * (f + disc);
    let q2 = 0.5 * (f - disc);
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
    if q.norm() == 0.0 {
        return [q, q];
    }
    [q, -e / q]
}

fn max_residual(m: &DMatrix<C64>, values: &[C64]) -> f64 {
    values.iter().map(|&l| eigen_residual(m, l, &null_vector(m, l))).fold(0.0, f64::max)
}

fn sh_eigenvalues(block: &SpatialBlock) -> Result<Vec<C64>> {
    let poly = block.sh_char_poly();
    let bound = 1e-10 * block.lsh.norm();
    let polished = |v: Vec<C64>| -> Vec<C64> { v.into_iter().map(|z| polish_root(&poly, z)).collect() };
    if let Ok(schur) = eigenvalues_complex(&block.lsh) {
        let vals = polished(schur);
        if max_residual(&block.lsh, &vals) <= bound {
            return Ok(vals);
        }
    }
    let vals = polished(poly_roots(&poly)?);
    let res = max_residual(&block.lsh, &vals);
    if res <= bound {
        Ok(vals)
    } else {
        Err(Error::NoConvergence(format!("eigenvalues of the n = {} block (residual {res:e})", block.n)))
    }
}

/// Eigenvalues of `L_n^SH` (companion QR with Newton polish, Aberth fallback)
/// and `L_n^con` (closed-form quadratic), each certified by the eigenpair
/// residual `‖(λI − M)v‖ ≤ 10⁻¹⁰ ‖M‖`.
pub fn block_eigenvalues(block: &SpatialBlock) -> Result<BlockSpectrum> {
    let mut sh = sh_eigenvalues(block)?;
    let [_, _, _, _, e, f] = block.entries;
    let mut con = quadratic_roots(e, f).to_vec();
    let res = max_residual(&block.lcon, &con);
    if res > 1e-10 * block.lcon.norm().max(1.0) {
        return Err(Error::NoConvergence(format!("conservation-law eigenvalues of the n = {} block (residual {res:e})", block.n)));
    }
    sort_by_real_desc(&mut sh);
    sort_by_real_desc(&mut con);
    Ok(BlockSpectrum { sh, con })
}

/// One central eigenvalue (cluster) of the spatial spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralEigenvalue {
    /// Fourier index.
    pub n: i64,
    /// Block the eigenvalue belongs to.
    pub family: Family,
    /// Eigenvalue (cluster mean).
    pub value: C64,
    /// Algebraic multiplicity detected by clustering.
    pub multiplicity: usize,
}

/// Options of [`central_partition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionOptions {
    /// Largest Fourier index `|n|` examined.
    pub n_max: i64,
    /// Eigenvalues with `|Re λ| < gap_tol` are central.
    pub gap_tol: f64,
    /// Declared hyperbolic gap: no eigenvalue may have `gap_tol ≤ |Re λ| < min_gap`.
    pub min_gap: f64,
    /// Scenario whose predicted central count must be matched, if any.
    pub expected: Option<ScenarioTag>,
}

impl PartitionOptions {
    /// Defaults for a scenario at a given `ε`: `gap_tol = 10ε² + 10⁻⁶`
    /// (I, III) or `10ε + 10⁻⁶` (II, IV, V), `N_max = 128`, declared gap 0.1.
    pub fn for_scenario(tag: ScenarioTag, epsilon: f64) -> Self {
        Self { n_max: DEFAULT_N_MAX, gap_tol: default_gap_tol(tag, epsilon), min_gap: DEFAULT_MIN_GAP, expected: Some(tag) }
    }
}

/// Default central threshold: central eigenvalues scale as `ε²` in
/// Scenarios I and III and as `ε` in Scenarios II, IV and V.
pub fn default_gap_tol(tag: ScenarioTag, epsilon: f64) -> f64 {
    match tag {
        ScenarioTag::I | ScenarioTag::III => 10.0 * epsilon * epsilon + 1e-6,
        ScenarioTag::II | ScenarioTag::IV | ScenarioTag::V => 10.0 * epsilon + 1e-6,
    }
}

/// Partition of the truncated spatial spectrum into central and hyperbolic parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Central eigenvalues with their Fourier index and multiplicity.
    pub central: Vec<CentralEigenvalue>,
    /// Minimum `|Re λ|` over the hyperbolic eigenvalues.
    pub hyperbolic_gap: f64,
    /// Fourier truncation.
    pub n_max: i64,
    /// Central threshold used.
    pub gap_tol: f64,
    /// All eigenvalues, per Fourier index.
    pub per_n: BTreeMap<i64, BlockSpectrum>,
}

impl SpectralReport {
    /// Number of central eigenvalues counted with multiplicity.
    pub fn central_count(&self) -> usize {
        self.central.iter().map(|c| c.multiplicity).sum()
    }

    /// Classification of an eigenvalue (`"central"` or `"hyperbolic"`).
    pub fn class_of(&self, value: C64) -> &'static str {
        if value.re.abs() < self.gap_tol {
            "central"
        } else {
            "hyperbolic"
        }
    }
}

/// Largest number of central eigenvalues any scenario predicts.
const MAX_CENTRAL: usize = 6;

/// Computes all block spectra for `|n| ≤ N_max` and splits them into central
/// (`|Re λ| < gap_tol`) and hyperbolic parts.
///
/// Raises `GapViolation` if an eigenvalue falls between `gap_tol` and the
/// declared gap, if the central count differs from the expected scenario's
/// prediction, or (without an expectation) if more central eigenvalues are
/// found than any scenario allows — the signature of `c|_{ε=0} = c_u`.
pub fn central_partition(params: &ModelParams, c: f64, cp: f64, opts: &PartitionOptions) -> Result<SpectralReport> {
    let mut per_n = BTreeMap::new();
    let mut central = Vec::new();
    let mut gap = f64::INFINITY;
    for n in -opts.n_max..=opts.n_max {
        let block = build_block(params, c, cp, n);
        let spec = block_eigenvalues(&block)?;
        for (family, values) in [(Family::Sh, &spec.sh), (Family::Con, &spec.con)] {
            let mut inner = Vec::new();
            for &z in values.iter() {
                let re = z.re.abs();
                if re < opts.gap_tol {
                    inner.push(z);
                } else {
                    if re < opts.min_gap {
                        return Err(Error::GapViolation(format!(
                            "eigenvalue {z} of the n = {n} block has |Re| = {re:.3e} inside ({:.3e}, {:.3e})",
                            opts.gap_tol, opts.min_gap
                        )));
                    }
                    gap = gap.min(re);
                }
            }
            for (value, multiplicity) in cluster(&inner, MULTIPLICITY_TOL) {
                central.push(CentralEigenvalue { n, family, value, multiplicity });
            }
        }
        per_n.insert(n, spec);
    }
    let report = SpectralReport { central, hyperbolic_gap: gap, n_max: opts.n_max, gap_tol: opts.gap_tol, per_n };
    let count = report.central_count();
    match opts.expected {
        Some(tag) if count != tag.central_count() => Err(Error::GapViolation(format!(
            "scenario {tag} predicts {} central eigenvalues, found {count}",
            tag.central_count()
        ))),
        None if count > MAX_CENTRAL => Err(Error::GapViolation(format!(
            "{count} central eigenvalues up to |n| = {}: spectrum accumulates at the imaginary axis",
            opts.n_max
        ))),
        _ => Ok(report),
    }
}

/// Large-`|n|` growth of the real parts compared with the scaling prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSample {
    /// Fourier index.
    pub n: i64,
    /// Predicted `max |Re λ|` of `L^SH`: `cos(π/8) |n|^{1/4} |c − c_u|^{1/4}`.
    pub predicted_sh: f64,
    /// Computed `max |Re λ|` of `L^SH`.
    pub computed_sh: f64,
    /// Predicted `max |Re λ|` of `L^con`: `cos(π/4) |n|^{1/2} |c − c_u|^{1/2}`.
    pub predicted_con: f64,
    /// Computed `max |Re λ|` of `L^con`.
    pub computed_con: f64,
}

impl GrowthSample {
    /// Ratio computed / predicted for the Swift–Hohenberg block.
    pub fn ratio_sh(&self) -> f64 {
        self.computed_sh / self.predicted_sh
    }

    /// Ratio computed / predicted for the conservation-law block.
    pub fn ratio_con(&self) -> f64 {
        self.computed_con / self.predicted_con
    }
}

/// Compares the growth of `max |Re λ|` for large `|n|` (at `ε = 0`, `c_p = c_u`)
/// with the leading-order scaling `|n|^{1/4}` (Swift–Hohenberg block) and
/// `|n|^{1/2}` (conservation law).
pub fn asymptotic_growth_check(params: &ModelParams, c: f64, ns: &[i64]) -> Result<Vec<GrowthSample>> {
    let p0 = ModelParams { epsilon: 0.0, ..*params };
    let dc = (c - params.cu).abs();
    ns.iter()
        .map(|&n| {
            let spec = block_eigenvalues(&build_block(&p0, c, params.cu, n))?;
            let nabs = n.unsigned_abs() as f64;
            let max_re = |v: &[C64]| v.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            Ok(GrowthSample {
                n,
                predicted_sh: (std::f64::consts::PI / 8.0).cos() * nabs.powf(0.25) * dc.powf(0.25),
                computed_sh: max_re(&spec.sh),
                predicted_con: (std::f64::consts::PI / 4.0).cos() * nabs.sqrt() * dc.sqrt(),
                computed_con: max_re(&spec.con),
            })
        })
        .collect()
}

/// Leading-order central eigenvalues of the `n = 1` blocks (those of `n = −1` are conjugates).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralExpansion {
    /// Central eigenvalues of `L_1^SH`.
    pub sh: Vec<C64>,
    /// Eigenvalues of `L_0^con`: `0` and `−(c + c_v)`.
    pub con: Vec<C64>,
}

/// Leading-order expansions of the central eigenvalues.
///
/// Scenarios I, III, IV: `λ = ε²(α0 + iω0*)/(3c_u − c)`.
/// Scenarios II, V: `λ± = ε δ±`, `δ± = (−c0 ± Δ)/(8 + 6ic_u)`,
/// `Δ = √(c0² − 4(3ic_u + 4)(α0 + iω0*))` (principal branch).
pub fn central_eigen_expansion(params: &ModelParams, scenario: &Scenario) -> Result<CentralExpansion> {
    let c = front_speed(params, scenario)?;
    let w = leading_order(params)?;
    let mu = C64::new(params.alpha0, w.omega0_star);
    let eps = params.epsilon;
    let sh = match scenario.tag {
        ScenarioTag::I | ScenarioTag::III | ScenarioTag::IV => {
            let den = 3.0 * params.cu - c;
            if den == 0.0 {
                return Err(Error::DegenerateScenario("3c_u − c vanishes".into()));
            }
            vec![eps * eps * mu / den]
        }
        ScenarioTag::II | ScenarioTag::V => {
            let (dp, dm) = deltas(params.cu, scenario.c0, mu);
            vec![eps * dp, eps * dm]
        }
    };
    Ok(CentralExpansion { sh, con: vec![C64::new(0.0, 0.0), C64::new(-(c + params.cv), 0.0)] })
}

/// `Δ = √(c0² − 4(3ic_u + 4) μ)` on the principal branch.
pub fn delta(cu: f64, c0: f64, mu: C64) -> C64 {
    (C64::new(c0 * c0, 0.0) - 4.0 * C64::new(4.0, 3.0 * cu) * mu).sqrt()
}

/// The pair `δ± = (−c0 ± Δ)/(8 + 6ic_u)`.
pub fn deltas(cu: f64, c0: f64, mu: C64) -> (C64, C64) {
    let d = delta(cu, c0, mu);
    let den = C64::new(8.0, 6.0 * cu);
    ((-c0 + d) / den, (-c0 - d) / den)
}

/// Adjoint pairing `⟨ψ, φ⟩` of the eigenvector `φ = (1, λ, λ², …)` of a
/// companion block with the adjoint eigenvector `ψ` (eigenvalue `λ̄` of `M*`,
/// last component 1). For companion matrices it equals `∂λ det(λ − M)`; it is
/// the normalization denominator of the spectral projection onto `φ`.
///
/// Typical values: `3c_u − c + O(ε²)` for the central eigenvalue of `L_1^SH`
/// in Scenario I, `c + c_v` for `L_0^con` at `λ = 0`, and `∓εΔ + O(ε²)` at
/// `λ = εδ±` in Scenario II.
///
/// Errors with `DegeneratePairing` when `|⟨ψ, φ⟩| < 10⁻¹²` (defective eigenvalue).
pub fn adjoint_pairing(block: &SpatialBlock, family: Family, lambda: C64) -> Result<C64> {
    let pairing = match family {
        Family::Sh => poly_eval(&block.sh_char_poly(), lambda).1,
        Family::Con => poly_eval(&block.con_char_poly(), lambda).1,
    };
    if pairing.norm() < 1e-12 {
        Err(Error::DegeneratePairing(pairing.norm()))
    } else {
        Ok(pairing)
    }
}

/// Central eigenvalues of `L_1^SH` nearest to the given expansions.
pub fn matched_central(params: &ModelParams, c: f64, cp: f64, expansions: &[C64]) -> Result<Vec<C64>> {
    let spec = block_eigenvalues(&build_block(params, c, cp, 1))?;
    Ok(expansions
        .iter()
        .map(|&e| {
            *spec
                .sh
                .iter()
                .min_by(|a, b| (**a - e).norm().total_cmp(&(**b - e).norm()))
                .expect("four eigenvalues")
        })
        .collect())
}
