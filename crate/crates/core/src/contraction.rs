//! Tensor families, grid contraction, and the span of all contracted
//! assignments.
//!
//! Two independent routes compute `Span(S_G(𝒜))`:
//!
//! * [`sweep_span`] absorbs vertices one at a time and keeps only a basis of
//!   the span over the currently exposed edges;
//! * [`brute_force_span`] materializes one column per assignment
//!   (`d^|V|` columns) and takes its rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{square_grid, EdgeId, EdgeRef, GeneralGrid, GridSpec, Vertex};
use crate::linalg::{rank, Matrix, RankEngine, SpanBasis};
use crate::scalar::{common_denominator, exact_to_c64, scale_to_gauss, ExactScalar, GaussInt, Scalar, C64};
use crate::tensor::{contract_pair, DenseTensor};

/// `𝒜 = (A₁,…,A_d)`, each `Aᵢ ∈ (ℂ^D)^⊗2n` with axes in port order
/// `(−e₁, +e₁, …, −eₙ, +eₙ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFamily<T> {
    n: usize,
    bond_dim: usize,
    tensors: Vec<DenseTensor<T>>,
}

impl<T: Scalar> TensorFamily<T> {
    pub fn new(n: usize, bond_dim: usize, tensors: Vec<DenseTensor<T>>) -> Result<Self> {
        if n == 0 || bond_dim == 0 {
            return Err(Error::InvalidFamily(format!("need n ≥ 1 and D ≥ 1, got n = {n}, D = {bond_dim}")));
        }
        if tensors.is_empty() {
            return Err(Error::InvalidFamily("a family needs at least one tensor".into()));
        }
        let shape = vec![bond_dim; 2 * n];
        if let Some((i, t)) = tensors.iter().enumerate().find(|(_, t)| t.shape() != shape.as_slice()) {
            return Err(Error::InvalidFamily(format!("tensor {i} has shape {:?}, expected {shape:?}", t.shape())));
        }
        Ok(TensorFamily { n, bond_dim, tensors })
    }

    /// Builds a family from flat row-major entry lists.
    pub fn from_flat(n: usize, bond_dim: usize, flats: Vec<Vec<T>>) -> Result<Self> {
        let shape = vec![bond_dim; 2 * n];
        let tensors = flats.into_iter().map(|f| DenseTensor::new(shape.clone(), f)).collect::<Result<Vec<_>>>()?;
        TensorFamily::new(n, bond_dim, tensors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    /// Physical dimension `d`.
    pub fn d(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[DenseTensor<T>] {
        &self.tensors
    }

    pub fn tensor(&self, i: usize) -> &DenseTensor<T> {
        &self.tensors[i]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TensorFamily<U> {
        TensorFamily { n: self.n, bond_dim: self.bond_dim, tensors: self.tensors.iter().map(|t| t.map(&f)).collect() }
    }

    /// Relabels grid axes: port pair `k` of every new tensor is port pair
    /// `perm[k]` of the old one.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n || (0..self.n).any(|i| !perm.contains(&i)) {
            return Err(Error::InvalidFamily(format!("{perm:?} is not a permutation of the axes")));
        }
        let axis_perm: Vec<usize> = perm.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect();
        let tensors = self.tensors.iter().map(|t| t.permute(&axis_perm)).collect::<Result<Vec<_>>>()?;
        TensorFamily::new(self.n, self.bond_dim, tensors)
    }

    /// `A'ᵢ = Σⱼ B[i][j]·Aⱼ`.
    pub fn recombine(&self, b: &Matrix<T>) -> Result<Self> {
        if b.cols() != self.d() {
            return Err(Error::ShapeMismatch(format!("{}x{} recombination of {} tensors", b.rows(), b.cols(), self.d())));
        }
        let shape = self.tensors[0].shape().to_vec();
        let tensors = (0..b.rows())
            .map(|i| {
                let mut acc = DenseTensor::zeros(shape.clone());
                for j in 0..self.d() {
                    acc = acc.add(&self.tensors[j].scale(b.get(i, j)))?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        TensorFamily::new(self.n, self.bond_dim, tensors)
    }

    /// Keeps the tensors at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let tensors = indices
            .iter()
            .map(|&i| {
                self.tensors.get(i).cloned().ok_or_else(|| Error::InvalidFamily(format!("no tensor {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TensorFamily::new(self.n, self.bond_dim, tensors)
    }
}

impl TensorFamily<ExactScalar> {
    pub fn to_float(&self) -> TensorFamily<C64> {
        self.map(exact_to_c64)
    }

    /// Multiplies every tensor by the common denominator of its entries.
    ///
    /// Nonzero rescaling of family members leaves every span unchanged, so the
    /// integer family answers all span questions about the rational one.
    pub fn to_gaussian_integers(&self) -> TensorFamily<GaussInt> {
        let tensors = self
            .tensors
            .iter()
            .map(|t| {
                let l = common_denominator(t.data());
                t.map(|x| scale_to_gauss(x, &l))
            })
            .collect();
        TensorFamily { n: self.n, bond_dim: self.bond_dim, tensors }
    }
}

/// A family in either scalar representation.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Float(TensorFamily<C64>),
    Rational(TensorFamily<ExactScalar>),
}

impl Family {
    pub fn n(&self) -> usize {
        match self {
            Family::Float(f) => f.n(),
            Family::Rational(f) => f.n(),
        }
    }

    pub fn bond_dim(&self) -> usize {
        match self {
            Family::Float(f) => f.bond_dim(),
            Family::Rational(f) => f.bond_dim(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Family::Float(f) => f.d(),
            Family::Rational(f) => f.d(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Family::Rational(_))
    }

    pub fn to_float(&self) -> TensorFamily<C64> {
        match self {
            Family::Float(f) => f.clone(),
            Family::Rational(f) => f.to_float(),
        }
    }

    pub fn to_exact_integers(&self) -> Result<TensorFamily<GaussInt>> {
        match self {
            Family::Float(_) => Err(Error::NotExact),
            Family::Rational(f) => Ok(f.to_gaussian_integers()),
        }
    }
}

/// Family index placed at each vertex, in the grid's vertex order (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    pub choice: Vec<usize>,
}

impl Assignment {
    pub fn new(choice: Vec<usize>) -> Self {
        Assignment { choice }
    }
}

/// Resource limits for the span computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Upper bound on `d^|V|` for brute-force enumeration.
    pub max_enumeration: u64,
    /// Upper bound on `D^|exposed edges|`, the length of one boundary vector.
    pub max_exposed_entries: u64,
    /// Upper bound on scalars held by one absorption step's candidate set.
    pub max_candidate_entries: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_enumeration: 1_000_000, max_exposed_entries: 1 << 20, max_candidate_entries: 1 << 25 }
    }
}

impl Limits {
    pub const ENV_MAX_ENUMERATION: &'static str = "PEPSINJ_MAX_ENUMERATION";
    pub const ENV_MAX_EXPOSED: &'static str = "PEPSINJ_MAX_EXPOSED";
    pub const ENV_MAX_CANDIDATES: &'static str = "PEPSINJ_MAX_CANDIDATES";

    /// Defaults overridden by the `PEPSINJ_MAX_*` environment variables.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        for (var, slot) in [
            (Self::ENV_MAX_ENUMERATION, &mut l.max_enumeration),
            (Self::ENV_MAX_EXPOSED, &mut l.max_exposed_entries),
            (Self::ENV_MAX_CANDIDATES, &mut l.max_candidate_entries),
        ] {
            if let Ok(v) = std::env::var(var) {
                *slot = v.trim().parse().map_err(|_| Error::Parse(format!("{var}={v:?} is not an integer")))?;
            }
        }
        Ok(l)
    }
}

/// Contracts `𝒞[v ↦ tensors[v]]` over all inner edges of `grid`; result axes
/// follow `grid.outgoing_edges()`.
pub fn contract_grid<T: Scalar>(grid: &GeneralGrid, tensors: &[&DenseTensor<T>]) -> Result<DenseTensor<T>> {
    if tensors.len() != grid.num_vertices() {
        return Err(Error::InvalidAssignment(format!(
            "{} tensors for {} vertices",
            tensors.len(),
            grid.num_vertices()
        )));
    }
    let mut cur = DenseTensor::scalar(T::one());
    let mut labels: Vec<EdgeRef> = Vec::new();
    for (v, t) in tensors.iter().enumerate() {
        let ports = grid.attachments(v);
        if t.rank() != ports.len() {
            return Err(Error::ShapeMismatch(format!(
                "vertex {v} has degree {} but its tensor has {} axes",
                ports.len(),
                t.rank()
            )));
        }
        let mut cur_axes = Vec::new();
        let mut t_axes = Vec::new();
        for (p, e) in ports.iter().enumerate() {
            if let Some(pos) = labels.iter().position(|l| l == e) {
                cur_axes.push(pos);
                t_axes.push(p);
            }
        }
        cur = contract_pair(&cur, &cur_axes, t, &t_axes)?;
        let mut next: Vec<EdgeRef> =
            labels.iter().enumerate().filter(|(i, _)| !cur_axes.contains(i)).map(|(_, l)| *l).collect();
        next.extend(ports.iter().enumerate().filter(|(p, _)| !t_axes.contains(p)).map(|(_, e)| *e));
        labels = next;
    }
    let perm: Vec<usize> = (0..grid.outgoing_edges().len())
        .map(|k| {
            labels
                .iter()
                .position(|l| *l == EdgeRef::Outgoing(k))
                .ok_or_else(|| Error::InvalidGrid("outgoing edge missing after contraction".into()))
        })
        .collect::<Result<_>>()?;
    if perm.len() != labels.len() {
        return Err(Error::InvalidGrid("inner edge left uncontracted".into()));
    }
    cur.permute(&perm)
}

/// `𝒞[v ↦ A_{a(v)}]` over `grid`.
pub fn contract_assignment<T: Scalar>(
    grid: &GeneralGrid,
    family: &TensorFamily<T>,
    a: &Assignment,
) -> Result<DenseTensor<T>> {
    if a.choice.len() != grid.num_vertices() {
        return Err(Error::InvalidAssignment(format!(
            "assignment covers {} of {} vertices",
            a.choice.len(),
            grid.num_vertices()
        )));
    }
    let tensors = a
        .choice
        .iter()
        .map(|&i| {
            family
                .tensors
                .get(i)
                .ok_or_else(|| Error::InvalidAssignment(format!("index {i} out of range for d = {}", family.d())))
        })
        .collect::<Result<Vec<_>>>()?;
    contract_grid(grid, &tensors)
}

/// All `d^count` assignments in lexicographic order, first vertex most
/// significant.
pub fn enumerate_assignments(count: usize, d: usize) -> impl Iterator<Item = Assignment> {
    let total = d.checked_pow(count as u32).unwrap_or(usize::MAX);
    let mut cur = vec![0usize; count];
    (0..total).map(move |k| {
        if k > 0 {
            for pos in (0..count).rev() {
                cur[pos] += 1;
                if cur[pos] < d {
                    break;
                }
                cur[pos] = 0;
            }
        }
        Assignment::new(cur.clone())
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AbsorptionOrder {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub order: AbsorptionOrder,
    /// Once the explicit part spans its whole exposed space, keep it as a
    /// full tensor factor instead of an explicit basis.
    pub factor_full: bool,
    /// Record the assignment behind each accepted vector. Needs `factor_full = false`.
    pub track_provenance: bool,
    /// Stop as soon as the span dimension exceeds this value.
    pub dim_cap: Option<usize>,
    /// Stop as soon as the remaining vertices cannot lift the span to full
    /// dimension (`dim · d^remaining < D^|E_O|`).
    pub stop_when_deficient: bool,
    pub limits: Limits,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            order: AbsorptionOrder::Lexicographic,
            factor_full: true,
            track_provenance: false,
            dim_cap: None,
            stop_when_deficient: false,
            limits: Limits::default(),
        }
    }
}

impl SweepOptions {
    pub fn with_limits(limits: Limits) -> Self {
        SweepOptions { limits, ..Default::default() }
    }

    /// Exact dims and provenance; no factoring.
    pub fn provenance(limits: Limits) -> Self {
        SweepOptions { factor_full: false, track_provenance: true, limits, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepStatus {
    /// Every vertex absorbed; the subspace is `Span(S_G(𝒜))`.
    Complete,
    /// Stopped early because the dimension passed `dim_cap`.
    DimCapExceeded,
    /// Stopped early: the span cannot become full.
    Deficient,
}

/// Basis of the contraction span over the exposed edges.
///
/// The subspace is stored as `ℂ^{D^|full_legs|} ⊗ span(basis)`: on
/// `full_legs` it is the whole space, and `basis` spans the part living on
/// `legs`. Both leg lists are kept in canonical [`EdgeId`] order.
#[derive(Clone, Debug)]
pub struct BoundarySubspace<B: SpanBasis> {
    bond_dim: usize,
    full_legs: Vec<EdgeId>,
    legs: Vec<EdgeId>,
    basis: B,
    provenance: Option<Vec<Vec<usize>>>,
    status: SweepStatus,
    absorbed: usize,
    order: AbsorptionOrder,
}

impl<B: SpanBasis> BoundarySubspace<B> {
    /// `D^|full_legs| · dim(basis)`.
    pub fn dim(&self) -> usize {
        pow_sat(self.bond_dim, self.full_legs.len()).saturating_mul(self.basis.dim())
    }

    /// `D^|exposed edges|`.
    pub fn ambient_dim(&self) -> usize {
        pow_sat(self.bond_dim, self.full_legs.len() + self.legs.len())
    }

    pub fn is_full(&self) -> bool {
        self.basis.is_full()
    }

    pub fn status(&self) -> SweepStatus {
        self.status
    }

    pub fn absorbed(&self) -> usize {
        self.absorbed
    }

    /// All exposed edges in canonical order.
    pub fn edge_order(&self) -> Vec<EdgeId> {
        let mut all: Vec<EdgeId> = self.full_legs.iter().chain(&self.legs).cloned().collect();
        all.sort();
        all
    }

    pub fn full_legs(&self) -> &[EdgeId] {
        &self.full_legs
    }

    pub fn explicit_legs(&self) -> &[EdgeId] {
        &self.legs
    }

    pub fn explicit_basis(&self) -> &B {
        &self.basis
    }

    /// Family indices behind each explicit basis vector, one per absorbed
    /// vertex in absorption order.
    pub fn provenance(&self) -> Option<&[Vec<usize>]> {
        self.provenance.as_deref()
    }

    /// Basis vectors over [`Self::edge_order`], expanding the full factor.
    pub fn basis_vectors(&self) -> Result<Vec<Vec<B::Elem>>> {
        let d = self.bond_dim;
        if self.full_legs.is_empty() {
            return Ok(self.basis.vectors().to_vec());
        }
        let order = self.edge_order();
        let cur: Vec<&EdgeId> = self.full_legs.iter().chain(&self.legs).collect();
        let perm: Vec<usize> = order.iter().map(|e| cur.iter().position(|c| *c == e).expect("edge present")).collect();
        let nf = pow_sat(d, self.full_legs.len());
        let mut out = Vec::with_capacity(nf * self.basis.dim());
        let shape = vec![d; order.len()];
        for f in 0..nf {
            for u in self.basis.vectors() {
                // e_f ⊗ u, then into canonical order
                let mut data = vec![B::Elem::zero(); nf * u.len()];
                data[f * u.len()..(f + 1) * u.len()].clone_from_slice(u);
                let t = DenseTensor::new(shape.clone(), data)?;
                out.push(t.permute(&perm)?.into_data());
            }
        }
        Ok(out)
    }
}

fn pow_sat(base: usize, exp: usize) -> usize {
    u32::try_from(exp).ok().and_then(|e| base.checked_pow(e)).unwrap_or(usize::MAX)
}

/// Computes a basis of `Span(S_G(𝒜))` for `G = G(spec)` by absorbing
/// vertices one at a time.
///
/// After each absorption the candidates `{u ⊗ Aᵢ contracted over shared
/// edges}` are generated in (basis index, family index) order and fed to the
/// engine, which keeps an independent subset.
pub fn sweep_span<E: RankEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    opts: &SweepOptions,
) -> Result<BoundarySubspace<E::Basis>> {
    if family.n() != spec.n() {
        return Err(Error::InvalidFamily(format!(
            "family is for {}-dimensional grids, grid {spec} is {}-dimensional",
            family.n(),
            spec.n()
        )));
    }
    if opts.track_provenance && opts.factor_full {
        return Err(Error::InvalidFamily("provenance tracking needs factor_full = false".into()));
    }
    let bond = family.bond_dim();
    let d = family.d();
    let mut vertices = spec.vertices();
    if opts.order == AbsorptionOrder::ReverseLexicographic {
        vertices.reverse();
    }
    let total = vertices.len();
    let full_target = pow_sat(bond, spec.num_outgoing());

    let mut full_legs: Vec<EdgeId> = Vec::new();
    let mut legs: Vec<EdgeId> = Vec::new();
    let mut basis = engine.new_basis(1);
    basis.insert(&[E::Elem::one()])?;
    let mut provenance = opts.track_provenance.then(|| vec![Vec::new()]);
    let mut status = SweepStatus::Complete;
    let mut absorbed = 0;

    for (step, v) in vertices.iter().enumerate() {
        let (next_basis, next_legs, shared_full, next_prov) =
            absorb_vertex(spec, family, engine, opts, v, &full_legs, &legs, &basis, provenance.as_deref())?;
        full_legs.retain(|e| !shared_full.contains(e));
        legs = next_legs;
        basis = next_basis;
        provenance = next_prov;
        absorbed = step + 1;

        if opts.factor_full && basis.is_full() && !legs.is_empty() {
            full_legs.append(&mut legs);
            full_legs.sort();
            basis = engine.new_basis(1);
            basis.insert(&[E::Elem::one()])?;
        }

        let dim = pow_sat(bond, full_legs.len()).saturating_mul(basis.dim());
        if opts.dim_cap.is_some_and(|cap| dim > cap) {
            status = SweepStatus::DimCapExceeded;
            break;
        }
        if opts.stop_when_deficient && step + 1 < total {
            let bound = dim.saturating_mul(pow_sat(d, total - step - 1));
            if bound < full_target {
                status = SweepStatus::Deficient;
                break;
            }
        }
    }
    Ok(BoundarySubspace { bond_dim: bond, full_legs, legs, basis, provenance, status, absorbed, order: opts.order })
}

/// Candidates offered to the engine per call.
const CANDIDATE_BATCH: usize = 256;

type Absorbed<B> = (B, Vec<EdgeId>, Vec<EdgeId>, Option<Vec<Vec<usize>>>);

#[allow(clippy::too_many_arguments)]
fn absorb_vertex<E: RankEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    opts: &SweepOptions,
    v: &Vertex,
    full_legs: &[EdgeId],
    legs: &[EdgeId],
    basis: &E::Basis,
    provenance: Option<&[Vec<usize>]>,
) -> Result<Absorbed<E::Basis>> {
    let bond = family.bond_dim();
    let ports = spec.port_edges(v);
    let in_full: Vec<usize> = (0..ports.len()).filter(|&p| full_legs.contains(&ports[p])).collect();
    let in_legs: Vec<usize> = (0..ports.len()).filter(|&p| legs.contains(&ports[p])).collect();
    let fresh: Vec<usize> = (0..ports.len()).filter(|p| !in_full.contains(p) && !in_legs.contains(p)).collect();

    let kept: Vec<EdgeId> = legs.iter().filter(|e| !in_legs.iter().any(|&p| ports[p] == **e)).cloned().collect();
    let mut next_legs: Vec<EdgeId> = kept.iter().cloned().chain(fresh.iter().map(|&p| ports[p].clone())).collect();
    next_legs.sort();

    let ambient = pow_sat(bond, next_legs.len());
    if ambient as u64 > opts.limits.max_exposed_entries {
        return Err(Error::ResourceLimit(format!(
            "{} exposed edges need vectors of length {}^{}, above the limit {}",
            next_legs.len(),
            bond,
            next_legs.len(),
            opts.limits.max_exposed_entries
        )));
    }
    let k = basis.dim();
    let slices = pow_sat(bond, in_full.len());
    let candidate_entries = (k as u64).saturating_mul((family.d() * slices) as u64).saturating_mul(ambient as u64);
    if candidate_entries > opts.limits.max_candidate_entries {
        return Err(Error::ResourceLimit(format!(
            "absorbing a vertex would hold {candidate_entries} candidate entries, above the limit {}",
            opts.limits.max_candidate_entries
        )));
    }

    let mut u_shape = vec![k];
    u_shape.extend(std::iter::repeat_n(bond, legs.len()));
    let u = DenseTensor::new(u_shape, basis.vectors().concat())?;
    let u_axes: Vec<usize> =
        in_legs.iter().map(|&p| 1 + legs.iter().position(|e| *e == ports[p]).expect("shared leg")).collect();
    let unfixed: Vec<usize> = (0..ports.len()).filter(|p| !in_full.contains(p)).collect();
    let t_axes: Vec<usize> =
        in_legs.iter().map(|p| unfixed.iter().position(|q| q == p).expect("shared port")).collect();
    let produced: Vec<&EdgeId> = kept.iter().chain(fresh.iter().map(|&p| &ports[p])).collect();
    let mut perm = vec![0usize];
    perm.extend(next_legs.iter().map(|e| 1 + produced.iter().position(|c| *c == e).expect("produced leg")));

    let mut blocks: Vec<Vec<E::Elem>> = Vec::with_capacity(family.d() * slices);
    for a in family.tensors() {
        for s in 0..slices {
            let fixed: Vec<(usize, usize)> = in_full
                .iter()
                .enumerate()
                .map(|(q, &p)| (p, s / pow_sat(bond, in_full.len() - 1 - q) % bond))
                .collect();
            let slice = if fixed.is_empty() { a.clone() } else { a.fix_axes(&fixed)? };
            let r = contract_pair(&u, &u_axes, &slice, &t_axes)?;
            blocks.push(r.permute(&perm)?.into_data());
        }
    }

    let mut next = engine.new_basis(ambient);
    let mut next_prov = provenance.map(|_| Vec::new());
    let order: Vec<(usize, usize, usize)> =
        (0..k).flat_map(|j| (0..family.d()).flat_map(move |i| (0..slices).map(move |s| (j, i, s)))).collect();
    for batch in order.chunks(CANDIDATE_BATCH) {
        if next.is_full() {
            break;
        }
        let cands: Vec<&[E::Elem]> =
            batch.iter().map(|&(j, i, s)| &blocks[i * slices + s][j * ambient..(j + 1) * ambient]).collect();
        let accepted = next.insert_many(&cands)?;
        if let (Some(out), Some(prev)) = (next_prov.as_mut(), provenance) {
            for (&(j, i, _), ok) in batch.iter().zip(accepted) {
                if ok {
                    let mut word = prev[j].clone();
                    word.push(i);
                    out.push(word);
                }
            }
        }
    }
    let shared_full = in_full.iter().map(|&p| ports[p].clone()).collect();
    Ok((next, next_legs, shared_full, next_prov))
}

/// Assignments behind the explicit basis, re-indexed to lexicographic
/// vertex order. Only available for complete, unfactored sweeps.
pub fn provenance_assignments<B: SpanBasis>(sub: &BoundarySubspace<B>) -> Option<Vec<Assignment>> {
    if sub.status != SweepStatus::Complete || !sub.full_legs.is_empty() {
        return None;
    }
    let words = sub.provenance.as_ref()?;
    Some(
        words
            .iter()
            .map(|w| {
                let mut c = w.clone();
                if sub.order == AbsorptionOrder::ReverseLexicographic {
                    c.reverse();
                }
                Assignment::new(c)
            })
            .collect(),
    )
}

/// The matrix `M_𝒜`, one column per assignment in lexicographic order, and
/// its rank under `engine`.
pub fn brute_force_span<E: RankEngine>(
    spec: &GridSpec,
    family: &TensorFamily<E::Elem>,
    engine: &E,
    limits: &Limits,
) -> Result<(Matrix<E::Elem>, usize)> {
    if family.n() != spec.n() {
        return Err(Error::InvalidFamily(format!("family is for n = {}, grid {spec} has n = {}", family.n(), spec.n())));
    }
    let v = spec.num_vertices();
    let count = u32::try_from(v).ok().and_then(|e| (family.d() as u64).checked_pow(e));
    if count.is_none_or(|c| c > limits.max_enumeration) {
        return Err(Error::ResourceLimit(format!(
            "{}^{} assignments exceed the enumeration limit {}",
            family.d(),
            v,
            limits.max_enumeration
        )));
    }
    let rows = pow_sat(family.bond_dim(), spec.num_outgoing());
    if rows as u64 > limits.max_exposed_entries {
        return Err(Error::ResourceLimit(format!("boundary space of dimension {rows} exceeds the limit")));
    }
    let grid = square_grid(spec);
    let columns = enumerate_assignments(v, family.d())
        .map(|a| contract_assignment(&grid, family, &a).map(DenseTensor::into_data))
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_columns(rows, &columns)?;
    let r = rank(engine, &m)?;
    Ok((m, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ExactEngine, FloatEngine, DEFAULT_TOLERANCE};
    use num_bigint::BigInt;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn gi(re: i64, im: i64) -> GaussInt {
        GaussInt::new(BigInt::from(re), BigInt::from(im))
    }

    fn mat(entries: [[f64; 2]; 2]) -> Vec<C64> {
        entries.iter().flatten().map(|&x| c(x, 0.0)).collect()
    }

    fn lcg_family(n: usize, bond: usize, d: usize, seed: u64) -> TensorFamily<GaussInt> {
        let mut s = seed.wrapping_add(0x9e3779b97f4a7c15);
        let len = bond.pow(2 * n as u32);
        let flats = (0..d)
            .map(|_| {
                (0..len)
                    .map(|_| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let re = ((s >> 33) % 5) as i64 - 2;
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let im = ((s >> 33) % 5) as i64 - 2;
                        gi(re, im)
                    })
                    .collect()
            })
            .collect();
        TensorFamily::from_flat(n, bond, flats).unwrap()
    }

    #[test]
    fn two_site_chain_is_matrix_product() {
        let a1 = mat([[1.0, 2.0], [0.5, -1.0]]);
        let a2 = mat([[0.0, 3.0], [1.0, 1.0]]);
        let fam = TensorFamily::from_flat(1, 2, vec![a1.clone(), a2.clone()]).unwrap();
        let g = square_grid(&"2".parse().unwrap());
        let t = contract_assignment(&g, &fam, &Assignment::new(vec![0, 1])).unwrap();
        let expected = [
            a1[0] * a2[0] + a1[1] * a2[2],
            a1[0] * a2[1] + a1[1] * a2[3],
            a1[2] * a2[0] + a1[3] * a2[2],
            a1[2] * a2[1] + a1[3] * a2[3],
        ];
        assert_eq!(t.shape(), &[2, 2]);
        assert_eq!(t.data(), &expected);
    }

    #[test]
    fn identity_chain_contracts_to_identity() {
        let fam = TensorFamily::from_flat(1, 3, vec![(0..9).map(|k| c(if k % 4 == 0 { 1.0 } else { 0.0 }, 0.0)).collect()])
            .unwrap();
        for n in 1..=5 {
            let g = square_grid(&GridSpec::new(vec![n]).unwrap());
            let t = contract_assignment(&g, &fam, &Assignment::new(vec![0; n])).unwrap();
            assert_eq!(t.data(), fam.tensor(0).data());
        }
    }

    #[test]
    fn plaquette_matches_nested_sum() {
        // G(2,2): vertices (1,1),(1,2),(2,1),(2,2); each tensor indexed (−e1,+e1,−e2,+e2)
        let fam = lcg_family(2, 2, 3, 5).map(crate::scalar::gauss_to_c64);
        let a = Assignment::new(vec![2, 0, 1, 2]);
        let g = square_grid(&"2x2".parse().unwrap());
        let t = contract_assignment(&g, &fam, &a).unwrap();
        let at = |v: usize, idx: [usize; 4]| *fam.tensor(a.choice[v]).get(&idx).unwrap();
        // inner edges: h1 = (1,1)-(2,1) on axis 1, h2 = (1,2)-(2,2) on axis 1,
        //              w1 = (1,1)-(1,2) on axis 2, w2 = (2,1)-(2,2) on axis 2
        // outgoing order: −e1 at (1,1),(1,2); +e1 at (2,1),(2,2); −e2 at (1,1),(2,1); +e2 at (1,2),(2,2)
        let mut max_err: f64 = 0.0;
        for o in 0..256usize {
            let b: Vec<usize> = (0..8).map(|k| (o >> (7 - k)) & 1).collect();
            let mut s = c(0.0, 0.0);
            for h1 in 0..2 {
                for h2 in 0..2 {
                    for w1 in 0..2 {
                        for w2 in 0..2 {
                            s += at(0, [b[0], h1, b[4], w1])
                                * at(1, [b[1], h2, w1, b[6]])
                                * at(2, [h1, b[2], b[5], w2])
                                * at(3, [h2, b[3], w2, b[7]]);
                        }
                    }
                }
            }
            max_err = max_err.max((t.data()[o] - s).norm() / (1.0 + s.norm()));
        }
        assert!(max_err < 1e-12, "{max_err}");
    }

    #[test]
    fn assignment_errors() {
        let fam = lcg_family(1, 2, 2, 1);
        let g = square_grid(&"3".parse().unwrap());
        assert!(contract_assignment(&g, &fam, &Assignment::new(vec![0, 1])).is_err());
        assert!(contract_assignment(&g, &fam, &Assignment::new(vec![0, 1, 2])).is_err());
        let g2 = square_grid(&"2x2".parse().unwrap());
        assert!(matches!(
            contract_assignment(&g2, &fam, &Assignment::new(vec![0; 4])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn enumeration_order() {
        let all: Vec<Vec<usize>> = enumerate_assignments(2, 3).map(|a| a.choice).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], [0, 0]);
        assert_eq!(all[1], [0, 1]);
        assert_eq!(all[3], [1, 0]);
        assert_eq!(all[8], [2, 2]);
    }

    #[test]
    fn identity_family_spans_one_dimension() {
        let fam = TensorFamily::from_flat(1, 2, vec![vec![gi(1, 0), gi(0, 0), gi(0, 0), gi(1, 0)]]).unwrap();
        for n in 1..=6 {
            let spec = GridSpec::new(vec![n]).unwrap();
            let s = sweep_span(&spec, &fam, &ExactEngine::new(), &SweepOptions::default()).unwrap();
            assert_eq!(s.dim(), 1);
            assert_eq!(s.status(), SweepStatus::Complete);
        }
    }

    #[test]
    fn matrix_units_fill_single_site() {
        let units: Vec<Vec<GaussInt>> =
            (0..4).map(|k| (0..4).map(|j| if j == k { gi(1, 0) } else { gi(0, 0) }).collect()).collect();
        let fam = TensorFamily::from_flat(1, 2, units).unwrap();
        let s = sweep_span(&"1".parse().unwrap(), &fam, &ExactEngine::new(), &SweepOptions::default()).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.is_full());
        assert_eq!(s.ambient_dim(), 4);
    }

    #[test]
    fn sweep_equals_brute_force_small() {
        let ee = ExactEngine::new();
        let fe = FloatEngine::new(DEFAULT_TOLERANCE);
        for (spec, n) in [("2x2", 2), ("1x2", 2), ("3", 1), ("4", 1)] {
            let spec: GridSpec = spec.parse().unwrap();
            for d in 1..=3 {
                for seed in 0..3 {
                    let fam = lcg_family(n, 2, d, seed * 31 + d as u64);
                    let s = sweep_span(&spec, &fam, &ee, &SweepOptions::default()).unwrap();
                    let (_, r) = brute_force_span(&spec, &fam, &ee, &Limits::default()).unwrap();
                    assert_eq!(s.dim(), r, "{spec} d={d} seed={seed}");
                    let ff = fam.map(crate::scalar::gauss_to_c64);
                    let sf = sweep_span(&spec, &ff, &fe, &SweepOptions::default()).unwrap();
                    assert_eq!(sf.dim(), r);
                }
            }
        }
    }

    #[test]
    fn basis_vectors_expand_full_factor() {
        // matrix units: the single-site span is everything, so the chain stays full
        let units: Vec<Vec<GaussInt>> =
            (0..4).map(|k| (0..4).map(|j| if j == k { gi(1, 0) } else { gi(0, 0) }).collect()).collect();
        let fam = TensorFamily::from_flat(1, 2, units).unwrap();
        let s = sweep_span(&"3".parse().unwrap(), &fam, &ExactEngine::new(), &SweepOptions::default()).unwrap();
        assert_eq!(s.full_legs().len(), 2);
        let vs = s.basis_vectors().unwrap();
        assert_eq!(vs.len(), 4);
        let mut b = ExactEngine::new().new_basis(4);
        for v in &vs {
            assert!(b.insert(v).unwrap());
        }
    }

    #[test]
    fn provenance_reproduces_basis() {
        let fam = lcg_family(2, 2, 2, 77);
        let spec: GridSpec = "1x2".parse().unwrap();
        let sub = sweep_span(&spec, &fam, &ExactEngine::new(), &SweepOptions::provenance(Limits::default())).unwrap();
        let assignments = provenance_assignments(&sub).unwrap();
        assert_eq!(assignments.len(), sub.dim());
        let g = square_grid(&spec);
        for (a, v) in assignments.iter().zip(sub.explicit_basis().vectors()) {
            assert_eq!(&contract_assignment(&g, &fam, a).unwrap().into_data(), v);
        }
    }

    #[test]
    fn limits_are_enforced() {
        let fam = lcg_family(2, 2, 2, 3);
        let tight = Limits { max_enumeration: 10, max_exposed_entries: 64, max_candidate_entries: 1 << 20 };
        let spec: GridSpec = "2x2".parse().unwrap();
        assert!(matches!(brute_force_span(&spec, &fam, &ExactEngine::new(), &tight), Err(Error::ResourceLimit(_))));
        assert!(matches!(
            sweep_span(&spec, &fam, &ExactEngine::new(), &SweepOptions::with_limits(tight)),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn dim_cap_and_deficiency_stop_early() {
        let fam = lcg_family(2, 2, 2, 9);
        let spec: GridSpec = "2x2".parse().unwrap();
        let opts = SweepOptions { dim_cap: Some(3), ..Default::default() };
        let s = sweep_span(&spec, &fam, &ExactEngine::new(), &opts).unwrap();
        assert_eq!(s.status(), SweepStatus::DimCapExceeded);
        let opts = SweepOptions { stop_when_deficient: true, ..Default::default() };
        let s = sweep_span(&spec, &fam, &ExactEngine::new(), &opts).unwrap();
        // 2^4 assignments can never fill a 2^8-dimensional boundary space
        assert_eq!(s.status(), SweepStatus::Deficient);
        assert_eq!(s.absorbed(), 1);
    }
}
