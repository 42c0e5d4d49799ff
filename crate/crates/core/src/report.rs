//! Report documents for each command, built from a family and settings.
//!
//! Every report is a pure function of its inputs; wall-clock timing is only
//! attached by the caller on request.

use serde::Serialize;

use crate::contraction::{brute_force_span, sweep_span, Family, Limits, SweepOptions, TensorFamily};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::injectivity::{
    check_region, dispatch, minimal_injective_regions, mps_injectivity_length, witness, Certificate, CertifyingEngine,
    EngineTask, FrontierResult, MpsLengthReport, MpsStatus, WitnessOptions,
};
use crate::io::{family_hash, REPORT_FORMAT_VERSION};
use crate::linalg::{EngineTag, RankEngineConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub engine: EngineTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<bool>,
}

impl CommandEcho {
    fn new(name: &'static str, cfg: &RankEngineConfig) -> Self {
        CommandEcho {
            name,
            engine: cfg.mode,
            tolerance: (cfg.mode == EngineTag::Float).then_some(cfg.tolerance),
            grid: None,
            cap: None,
            witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    /// One list per assignment; entry `k` is the family index (1-based) at
    /// the `k`-th vertex in lexicographic order.
    pub assignments: Vec<Vec<usize>>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub version: u64,
    pub command: CommandEcho,
    pub family_hash: String,
    pub grid: GridSpec,
    pub n: usize,
    #[serde(rename = "D")]
    pub bond_dim: usize,
    pub d: usize,
    pub span_dim: usize,
    pub full_dim: usize,
    pub injective: bool,
    pub engine: EngineTag,
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

struct CheckTask<'a> {
    spec: &'a GridSpec,
    limits: &'a Limits,
    want_witness: bool,
}

impl EngineTask for CheckTask<'_> {
    type Output = (usize, usize, bool, Option<WitnessReport>);

    fn run<E: CertifyingEngine>(self, family: &TensorFamily<E::Elem>, engine: &E) -> Result<Self::Output> {
        let r = check_region(self.spec, family, engine, self.limits)?;
        let w = if self.want_witness && r.injective {
            let opts = WitnessOptions { limits: *self.limits, ..Default::default() };
            let w = witness(self.spec, family, engine, &opts)?;
            Some(WitnessReport {
                assignments: w.assignments.iter().map(|a| a.choice.iter().map(|i| i + 1).collect()).collect(),
                certificate: w.certificate,
            })
        } else {
            None
        };
        Ok((r.span_dim, r.full_dim, r.injective, w))
    }
}

pub fn check_report(
    family: &Family,
    spec: &GridSpec,
    cfg: &RankEngineConfig,
    limits: &Limits,
    want_witness: bool,
) -> Result<CheckReport> {
    let (span_dim, full_dim, injective, witness) =
        dispatch(family, cfg, CheckTask { spec, limits, want_witness })?;
    let mut command = CommandEcho::new("check", cfg);
    command.grid = Some(spec.to_string());
    command.witness = Some(want_witness);
    Ok(CheckReport {
        version: REPORT_FORMAT_VERSION,
        command,
        family_hash: family_hash(family),
        grid: spec.clone(),
        n: family.n(),
        bond_dim: family.bond_dim(),
        d: family.d(),
        span_dim,
        full_dim,
        injective,
        engine: cfg.mode,
        witness,
        timing_seconds: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpsReport {
    pub version: u64,
    pub command: CommandEcho,
    pub family_hash: String,
    pub engine: EngineTag,
    /// `"<N>"`, `"none (proven)"`, or `"unknown"`.
    pub result: String,
    #[serde(flatten)]
    pub detail: MpsLengthReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

struct MpsTask {
    cap: Option<usize>,
}

impl EngineTask for MpsTask {
    type Output = MpsLengthReport;

    fn run<E: CertifyingEngine>(self, family: &TensorFamily<E::Elem>, engine: &E) -> Result<MpsLengthReport> {
        mps_injectivity_length(family, engine, self.cap)
    }
}

pub fn mps_report(family: &Family, cfg: &RankEngineConfig, cap: Option<usize>) -> Result<MpsReport> {
    let detail = dispatch(family, cfg, MpsTask { cap })?;
    let result = match (detail.status, detail.length) {
        (MpsStatus::Found, Some(n)) => n.to_string(),
        (MpsStatus::NoneProven, _) => "none (proven)".to_string(),
        _ => "unknown".to_string(),
    };
    let mut command = CommandEcho::new("mps-length", cfg);
    command.cap = cap.map(|c| c.to_string());
    Ok(MpsReport {
        version: REPORT_FORMAT_VERSION,
        command,
        family_hash: family_hash(family),
        engine: cfg.mode,
        result,
        detail,
        timing_seconds: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub version: u64,
    pub command: CommandEcho,
    pub family_hash: String,
    pub engine: EngineTag,
    #[serde(flatten)]
    pub frontier: FrontierResult,
    /// Non-injective verdicts hold for the explored box only.
    pub scope: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

struct SearchTask<'a> {
    cap: &'a GridSpec,
    limits: &'a Limits,
}

impl EngineTask for SearchTask<'_> {
    type Output = FrontierResult;

    fn run<E: CertifyingEngine>(self, family: &TensorFamily<E::Elem>, engine: &E) -> Result<FrontierResult> {
        minimal_injective_regions(family, self.cap, engine, self.limits)
    }
}

pub fn search_report(family: &Family, cap: &GridSpec, cfg: &RankEngineConfig, limits: &Limits) -> Result<SearchReport> {
    let frontier = dispatch(family, cfg, SearchTask { cap, limits })?;
    let mut command = CommandEcho::new("search", cfg);
    command.cap = Some(cap.to_string());
    Ok(SearchReport {
        version: REPORT_FORMAT_VERSION,
        command,
        family_hash: family_hash(family),
        engine: cfg.mode,
        frontier,
        scope: "not injective up to cap (inconclusive globally)",
        timing_seconds: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub version: u64,
    pub command: CommandEcho,
    pub family_hash: String,
    pub grid: GridSpec,
    pub engine: EngineTag,
    pub sweep_dim: usize,
    pub brute_force_rank: usize,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

struct OracleTask<'a> {
    spec: &'a GridSpec,
    limits: &'a Limits,
}

impl EngineTask for OracleTask<'_> {
    type Output = (usize, usize, usize, usize);

    fn run<E: CertifyingEngine>(self, family: &TensorFamily<E::Elem>, engine: &E) -> Result<Self::Output> {
        let (m, rank) = brute_force_span(self.spec, family, engine, self.limits)?;
        let sweep = sweep_span(self.spec, family, engine, &SweepOptions::with_limits(*self.limits))?;
        Ok((sweep.dim(), rank, m.rows(), m.cols()))
    }
}

pub fn oracle_report(family: &Family, spec: &GridSpec, cfg: &RankEngineConfig, limits: &Limits) -> Result<OracleReport> {
    let (sweep_dim, brute_force_rank, matrix_rows, matrix_cols) = dispatch(family, cfg, OracleTask { spec, limits })?;
    let mut command = CommandEcho::new("oracle-check", cfg);
    command.grid = Some(spec.to_string());
    Ok(OracleReport {
        version: REPORT_FORMAT_VERSION,
        command,
        family_hash: family_hash(family),
        grid: spec.clone(),
        engine: cfg.mode,
        sweep_dim,
        brute_force_rank,
        matrix_rows,
        matrix_cols,
        agree: sweep_dim == brute_force_rank,
        timing_seconds: None,
    })
}
