//! Region verdicts, witness certificates, the MPS injectivity length, family
//! reduction, and the minimal-injective-region search.

use std::collections::HashSet;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::contraction::{
    contract_assignment, provenance_assignments, sweep_span, Assignment, Family, Limits, SweepOptions, SweepStatus,
    TensorFamily,
};
use crate::error::{Error, Result};
use crate::grid::{square_grid, GridSpec};
use crate::linalg::{
    determinant_exact, determinant_float, determinant_mod_p, EngineTag, ExactEngine, FloatEngine, Matrix, RankEngine,
    RankEngineConfig, SpanBasis, MODULUS,
};
use crate::scalar::{format_rational, gauss_to_exact, parse_rational, GaussInt, Scalar, C64};

/// Smallest accepted pivot of the column-normalized LU in a float certificate.
pub const FLOAT_CERTIFICATE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub spec: GridSpec,
    pub span_dim: usize,
    pub full_dim: usize,
    pub injective: bool,
    pub engine: EngineTag,
    pub witness: Option<Vec<Assignment>>,
}

fn full_dim(spec: &GridSpec, bond_dim: usize) -> Result<usize> {
    u32::try_from(spec.num_outgoing())
        .ok()
        .and_then(|e| bond_dim.checked_pow(e))
        .ok_or_else(|| Error::ResourceLimit(format!("D^|E_O| overflows for grid {spec}")))
}

/// Computes `dim Span(S_G(𝒜))` for `G = G(spec)` and compares it with
/// `D^|E_O|`.
pub fn check_region<E: RankEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    limits: &Limits,
) -> Result<InjectivityReport> {
    let full = full_dim(spec, family.bond_dim())?;
    let sub = sweep_span(spec, family, engine, &SweepOptions::with_limits(*limits))?;
    let span_dim = sub.dim();
    Ok(InjectivityReport { spec: spec.clone(), span_dim, full_dim: full, injective: span_dim == full, engine: engine.tag(), witness: None })
}

/// Verdict only; stops as soon as the span provably cannot become full.
pub fn is_injective_region<E: RankEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    limits: &Limits,
) -> Result<bool> {
    let full = full_dim(spec, family.bond_dim())?;
    let opts = SweepOptions { stop_when_deficient: true, limits: *limits, ..Default::default() };
    let sub = sweep_span(spec, family, engine, &opts)?;
    Ok(sub.status() == SweepStatus::Complete && sub.dim() == full)
}

/// Evidence that a square matrix is invertible.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Partial-pivoting LU after scaling columns to unit norm.
    Float { abs_det: f64, log10_abs_det: f64, min_pivot: f64, threshold: f64 },
    /// Exact determinant of the Gaussian-integer matrix.
    Exact { det_re: String, det_im: String },
    /// Determinant modulo a prime; a nonzero residue proves invertibility.
    Modular { modulus: u64, residue: u64 },
}

impl Certificate {
    pub fn is_invertible(&self) -> bool {
        match self {
            Certificate::Float { min_pivot, log10_abs_det, threshold, .. } => {
                min_pivot > threshold && log10_abs_det.is_finite()
            }
            Certificate::Exact { det_re, det_im } => [det_re, det_im]
                .iter()
                .any(|x| parse_rational(x).map(|r| !num_traits::Zero::is_zero(&r)).unwrap_or(false)),
            Certificate::Modular { residue, .. } => *residue != 0,
        }
    }
}

/// Engines that can certify a square matrix of their scalars.
pub trait CertifyingEngine: RankEngine {
    fn certify(&self, m: &Matrix<Self::Elem>) -> Result<Certificate>;
}

impl CertifyingEngine for FloatEngine {
    fn certify(&self, m: &Matrix<C64>) -> Result<Certificate> {
        let d = determinant_float(m)?;
        Ok(Certificate::Float {
            abs_det: d.abs_det,
            log10_abs_det: d.log10_abs_det,
            min_pivot: d.min_pivot,
            threshold: FLOAT_CERTIFICATE_THRESHOLD,
        })
    }
}

/// Largest order for which the exact determinant is computed outright.
const EXACT_DETERMINANT_MAX: usize = 64;

impl CertifyingEngine for ExactEngine {
    fn certify(&self, m: &Matrix<GaussInt>) -> Result<Certificate> {
        if m.rows() > EXACT_DETERMINANT_MAX {
            let residue = determinant_mod_p(m)?;
            if residue != 0 || m.rows() > 4 * EXACT_DETERMINANT_MAX {
                return Ok(Certificate::Modular { modulus: MODULUS, residue });
            }
        }
        let det = determinant_exact(&m.map(gauss_to_exact))?;
        Ok(Certificate::Exact { det_re: format_rational(&det.re), det_im: format_rational(&det.im) })
    }
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    /// Up to this boundary dimension the witness is collected greedily during
    /// an unfactored sweep; above it, distinct assignments are sampled.
    pub greedy_max_dim: usize,
    pub sample_attempts: usize,
    pub seed: u64,
    pub limits: Limits,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { greedy_max_dim: 256, sample_attempts: 4, seed: 0x5eed, limits: Limits::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub assignments: Vec<Assignment>,
    pub certificate: Certificate,
}

/// Finds `D^|E_O|` assignments whose contractions form an invertible matrix.
pub fn witness<E: CertifyingEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    opts: &WitnessOptions,
) -> Result<Witness> {
    let full = full_dim(spec, family.bond_dim())?;
    if full > opts.greedy_max_dim {
        if !is_injective_region(spec, family, engine, &opts.limits)? {
            return Err(Error::NotInjective(format!("grid {spec} is not an injective region")));
        }
        for attempt in 0..opts.sample_attempts {
            let assignments = sample_assignments(spec.num_vertices(), family.d(), full, opts.seed.wrapping_add(attempt as u64))?;
            let certificate = verify_witness(spec, family, engine, &assignments, &opts.limits)?;
            if certificate.is_invertible() {
                return Ok(Witness { assignments, certificate });
            }
        }
    }
    greedy_witness(spec, family, engine, &opts.limits)
}

fn greedy_witness<E: CertifyingEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    limits: &Limits,
) -> Result<Witness> {
    let full = full_dim(spec, family.bond_dim())?;
    let sub = sweep_span(spec, family, engine, &SweepOptions::provenance(*limits))?;
    if sub.dim() != full {
        return Err(Error::NotInjective(format!("grid {spec} spans {} of {full} dimensions", sub.dim())));
    }
    let assignments = provenance_assignments(&sub).expect("complete unfactored sweep");
    let m = Matrix::from_columns(full, sub.explicit_basis().vectors())?;
    let certificate = engine.certify(&m)?;
    Ok(Witness { assignments, certificate })
}

/// `count` distinct assignments in lexicographic order, drawn from a seeded
/// ChaCha20 stream.
fn sample_assignments(vertices: usize, d: usize, count: usize, seed: u64) -> Result<Vec<Assignment>> {
    let total = u32::try_from(vertices).ok().and_then(|e| (d as u128).checked_pow(e)).unwrap_or(u128::MAX);
    if total < count as u128 {
        return Err(Error::NotInjective(format!("only {total} assignments for a {count}-dimensional space")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(count);
    if total <= 2 * count as u128 {
        // partial Fisher–Yates over all assignment indices
        let total = total as usize;
        let mut idx: Vec<usize> = (0..total).collect();
        for k in 0..count {
            let j = k + (rng.next_u64() % (total - k) as u64) as usize;
            idx.swap(k, j);
        }
        for &code in &idx[..count] {
            let mut c = vec![0; vertices];
            let mut x = code;
            for slot in c.iter_mut().rev() {
                *slot = x % d;
                x /= d;
            }
            seen.insert(c);
        }
    } else {
        while seen.len() < count {
            seen.insert((0..vertices).map(|_| (rng.next_u64() % d as u64) as usize).collect());
        }
    }
    let mut out: Vec<Assignment> = seen.into_iter().map(Assignment::new).collect();
    out.sort();
    Ok(out)
}

/// Re-contracts every listed assignment and certifies the resulting square
/// matrix.
pub fn verify_witness<E: CertifyingEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    assignments: &[Assignment],
    limits: &Limits,
) -> Result<Certificate> {
    let full = full_dim(spec, family.bond_dim())?;
    if assignments.len() != full {
        return Err(Error::LengthMismatch { expected: full, got: assignments.len() });
    }
    if full as u64 > limits.max_exposed_entries {
        return Err(Error::ResourceLimit(format!("witness matrix of order {full} exceeds the limit")));
    }
    let grid = square_grid(spec);
    let columns = assignments
        .iter()
        .map(|a| contract_assignment(&grid, family, a).map(|t| t.into_data()))
        .collect::<Result<Vec<_>>>()?;
    engine.certify(&Matrix::from_columns(full, &columns)?)
}

/// `C(D,d) = (D² − d′ + 1)·D²` with `d′ = min(d, D²)`, at least 1.
pub fn wielandt_cap(bond_dim: usize, d: usize) -> usize {
    let dd = bond_dim * bond_dim;
    let eff = d.min(dd);
    ((dd - eff + 1) * dd).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MpsStatus {
    Found,
    /// No length works: proved by the Wielandt cap or by stationarity.
    NoneProven,
    /// No length up to a user cap below the Wielandt cap.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoneProof {
    /// Every length up to `C(D,d′)` was checked.
    WielandtCap,
    /// `W_{N+1} = W_N ≠ M_D`, so every longer span equals `W_N`.
    Stationary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpsLengthReport {
    pub status: MpsStatus,
    pub length: Option<usize>,
    pub cap: usize,
    pub default_cap: usize,
    pub proof: Option<NoneProof>,
    /// `dim W_N` for `N = 1, 2, …` as far as computed.
    pub span_dims: Vec<usize>,
    pub d: usize,
    pub reduced_d: usize,
}

fn require_chain<T: Scalar>(family: &TensorFamily<T>) -> Result<()> {
    if family.n() != 1 {
        return Err(Error::InvalidFamily(format!("the MPS length needs n = 1, family has n = {}", family.n())));
    }
    Ok(())
}

/// `w·Aᵢ` for row-major `D×D` matrices.
fn right_multiply<T: Scalar>(w: &[T], a: &[T], dim: usize) -> Vec<T> {
    let mut out = vec![T::zero(); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = &w[r * dim + k];
            if x.is_zero() {
                continue;
            }
            for c in 0..dim {
                T::mul_add_assign(&mut out[r * dim + c], x, &a[k * dim + c]);
            }
        }
    }
    out
}

fn next_word_space<E: RankEngine>(prev: &E::Basis, family: &TensorFamily<E::Elem>, engine: &E) -> Result<E::Basis> {
    let dim = family.bond_dim();
    let mut next = engine.new_basis(dim * dim);
    'outer: for w in prev.vectors() {
        for a in family.tensors() {
            if next.is_full() {
                break 'outer;
            }
            next.insert(&right_multiply(w, a.data(), dim))?;
        }
    }
    Ok(next)
}

fn first_word_space<E: RankEngine>(family: &TensorFamily<E::Elem>, engine: &E) -> Result<E::Basis> {
    let dim = family.bond_dim();
    let mut b = engine.new_basis(dim * dim);
    for a in family.tensors() {
        b.insert(a.data())?;
    }
    Ok(b)
}

/// Bases of `W_1, …, W_max_len`, where `W_N = span{A_{i₁}⋯A_{i_N}}`.
pub fn mps_span_sequence<E: RankEngine>(
    family: &TensorFamily<E::Elem>,
    engine: &E,
    max_len: usize,
) -> Result<Vec<E::Basis>> {
    require_chain(family)?;
    let mut out: Vec<E::Basis> = Vec::with_capacity(max_len);
    for n in 1..=max_len {
        let b = if n == 1 { first_word_space(family, engine)? } else { next_word_space(&out[n - 2], family, engine)? };
        out.push(b);
    }
    Ok(out)
}

/// Smallest `N ≤ cap` with `W_N = M_D(ℂ)`.
///
/// `cap = None` uses `C(D, d′)`, `d′ = dim W_1`.
pub fn mps_injectivity_length<E: RankEngine>(
    family: &TensorFamily<E::Elem>,
    engine: &E,
    cap: Option<usize>,
) -> Result<MpsLengthReport> {
    require_chain(family)?;
    let mut w = first_word_space(family, engine)?;
    let reduced_d = w.dim();
    let default_cap = wielandt_cap(family.bond_dim(), reduced_d.max(1));
    let cap = cap.unwrap_or(default_cap);
    let mut report = MpsLengthReport {
        status: MpsStatus::Unknown,
        length: None,
        cap,
        default_cap,
        proof: None,
        span_dims: Vec::new(),
        d: family.d(),
        reduced_d,
    };
    if cap == 0 {
        return Err(Error::InvalidFamily("the length cap must be at least 1".into()));
    }
    for n in 1..=cap {
        if n > 1 {
            let next = next_word_space(&w, family, engine)?;
            let same = next.dim() == w.dim() && next.vectors().iter().try_fold(true, |acc, v| Ok::<_, Error>(acc && w.contains(v)?))?;
            w = next;
            if same && !w.is_full() {
                report.span_dims.push(w.dim());
                report.status = MpsStatus::NoneProven;
                report.proof = Some(NoneProof::Stationary);
                return Ok(report);
            }
        }
        report.span_dims.push(w.dim());
        if w.is_full() {
            report.status = MpsStatus::Found;
            report.length = Some(n);
            return Ok(report);
        }
    }
    if cap >= default_cap {
        report.status = MpsStatus::NoneProven;
        report.proof = Some(NoneProof::WielandtCap);
    }
    Ok(report)
}

/// A linearly independent subfamily with the same span, in first-seen
/// order, with the kept indices.
pub fn reduce_family<E: RankEngine>(family: &TensorFamily<E::Elem>, engine: &E) -> Result<(TensorFamily<E::Elem>, Vec<usize>)> {
    let len = family.tensor(0).len();
    let mut basis = engine.new_basis(len);
    let mut kept = Vec::new();
    for (i, a) in family.tensors().iter().enumerate() {
        if basis.insert(a.data())? {
            kept.push(i);
        }
    }
    if kept.is_empty() {
        kept.push(0);
    }
    Ok((family.select(&kept)?, kept))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecStatus {
    Injective,
    NotInjective,
    /// Contains an injective spec, hence injective; not tested.
    ImpliedInjective,
    /// A resource limit stopped the check.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecVerdict {
    pub spec: GridSpec,
    pub status: SpecStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrontierResult {
    /// Minimal injective specs in exploration order.
    pub minimal_injective: Vec<GridSpec>,
    pub explored_cap: GridSpec,
    pub complete_within_cap: bool,
    /// Injective specs whose minimality could not be settled because a
    /// predecessor is undecided.
    pub injective_unconfirmed_minimal: Vec<GridSpec>,
    pub undecided: Vec<GridSpec>,
    /// One entry per spec in the box, in exploration order.
    pub verdicts: Vec<SpecVerdict>,
    pub d: usize,
    pub reduced_d: usize,
}

/// Explores `{spec ≤ cap}` by increasing vertex count, then
/// lexicographically, and returns the minimal injective specs.
///
/// Supergrids of an injective spec are injective and are not tested.
/// Non-injectivity is only ever reported up to the cap.
pub fn minimal_injective_regions<E: RankEngine>(
    family: &TensorFamily<E::Elem>,
    cap: &GridSpec,
    engine: &E,
    limits: &Limits,
) -> Result<FrontierResult> {
    if cap.n() != family.n() {
        return Err(Error::InvalidGrid(format!("cap {cap} has n = {}, family has n = {}", cap.n(), family.n())));
    }
    let (reduced, _) = reduce_family(family, engine)?;
    let mut result = FrontierResult {
        minimal_injective: Vec::new(),
        explored_cap: cap.clone(),
        complete_within_cap: true,
        injective_unconfirmed_minimal: Vec::new(),
        undecided: Vec::new(),
        verdicts: Vec::new(),
        d: family.d(),
        reduced_d: reduced.d(),
    };
    let mut injective: Vec<GridSpec> = Vec::new();
    for spec in cap.sub_box() {
        let implied = injective.iter().any(|m| m.is_subgrid(&spec).unwrap_or(false));
        let status = if implied {
            SpecStatus::ImpliedInjective
        } else {
            match is_injective_region(&spec, &reduced, engine, limits) {
                Ok(true) => SpecStatus::Injective,
                Ok(false) => SpecStatus::NotInjective,
                Err(Error::ResourceLimit(_)) => SpecStatus::Undecided,
                Err(e) => return Err(e),
            }
        };
        match status {
            SpecStatus::Injective => {
                let preds_settled = spec.immediate_predecessors().iter().all(|p| {
                    result.verdicts.iter().any(|v| &v.spec == p && v.status == SpecStatus::NotInjective)
                });
                if preds_settled {
                    result.minimal_injective.push(spec.clone());
                } else {
                    result.injective_unconfirmed_minimal.push(spec.clone());
                }
                injective.push(spec.clone());
            }
            SpecStatus::Undecided => result.undecided.push(spec.clone()),
            _ => {}
        }
        result.verdicts.push(SpecVerdict { spec, status });
    }
    result.complete_within_cap = result.undecided.is_empty();
    Ok(result)
}

/// Runs an engine-generic computation on a [`Family`] under the configured
/// engine.
pub trait EngineTask {
    type Output;
    fn run<E: CertifyingEngine>(self, family: &TensorFamily<E::Elem>, engine: &E) -> Result<Self::Output>;
}

/// Float engine on the float view of any family; rational engine on the
/// Gaussian-integer form of an exact family.
pub fn dispatch<T: EngineTask>(family: &Family, config: &RankEngineConfig, task: T) -> Result<T::Output> {
    config.validate()?;
    match config.mode {
        EngineTag::Float => task.run(&family.to_float(), &FloatEngine::new(config.tolerance)),
        EngineTag::Rational => task.run(&family.to_exact_integers()?, &ExactEngine::new()),
    }
}
