//! Randomized verification campaigns.
//!
//! A campaign runs a set of checks over `trials` random instances per
//! (dimension, order, map-family) cell. Every instance is drawn from a
//! substream keyed by (check, dim, order, family, trial), so reports are
//! byte-identical across runs and thread counts; results are reduced in
//! enumeration order, never in completion order.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel_div::{channel_divergence, regularized_sequence, ChannelDivOpts};
use crate::divergence::{
    classical_renyi, geometric, measured, sandwiched, DivKind, Distribution, MeasuredOpts,
    RenyiOrder,
};
use crate::numkernel::{loewner_geq, ComplexMatrix};
use crate::quantum::random::{
    random_channel_rng, random_mixed_unitary_channel, random_state_gapped, random_state_rng,
    random_unitary_rng, substream_rng, substream_seed,
};
use crate::quantum::{pinch, spectrum, DensityOperator, PositiveMapRep, DEFAULT_CLUSTER_TOL};
use crate::reverse_test::{build_reverse_test, verify_reverse_test};

use super::checks::{
    check_meta_chain, check_pinching_bound, check_preprocessing_chain, check_regularized_chain,
    check_sandwiched_chain, check_unital_entropy,
};
use super::result::CheckResult;
use super::VerifyError;

pub const ORDERING_TOL: f64 = 1e-9;
pub const DPI_TOL: f64 = 1e-8;
pub const PINCHING_INEQ_TOL: f64 = 1e-9;
pub const MATSUMOTO_GAP_TOL: f64 = 1e-7;
pub const MATSUMOTO_RESIDUAL_TOL: f64 = 1e-8;
pub const CLASSICAL_REDUCTION_TOL: f64 = 1e-9;
pub const REGULARIZED_SEQ_TOL: f64 = 1e-8;
pub const SPOT_TOL: f64 = 1e-9;
pub const SPOT_CHANNEL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamily {
    Cptp,
    TransposePositive,
}

impl MapFamily {
    fn label(&self) -> &'static str {
        match self {
            MapFamily::Cptp => "cptp",
            MapFamily::TransposePositive => "transpose_positive",
        }
    }
}

/// The checks a campaign can run, by wire name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    PinchingInequality,
    PinchingBound,
    Matsumoto,
    MetaChainSandwiched,
    GeometricChain,
    SandwichedChain,
    PreprocessingChain,
    UnitalEntropy,
    RegularizedChain,
    Ordering,
    Dpi,
    ClassicalReduction,
    SpotValues,
    RegularizedSequence,
}

impl CheckName {
    pub const ALL: [CheckName; 14] = [
        CheckName::PinchingInequality,
        CheckName::PinchingBound,
        CheckName::Matsumoto,
        CheckName::MetaChainSandwiched,
        CheckName::GeometricChain,
        CheckName::SandwichedChain,
        CheckName::PreprocessingChain,
        CheckName::UnitalEntropy,
        CheckName::RegularizedChain,
        CheckName::Ordering,
        CheckName::Dpi,
        CheckName::ClassicalReduction,
        CheckName::SpotValues,
        CheckName::RegularizedSequence,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CheckName::PinchingInequality => "pinching-inequality",
            CheckName::PinchingBound => "pinching-bound",
            CheckName::Matsumoto => "matsumoto",
            CheckName::MetaChainSandwiched => "meta-chain-sandwiched",
            CheckName::GeometricChain => "geometric-chain",
            CheckName::SandwichedChain => "sandwiched-chain",
            CheckName::PreprocessingChain => "preprocessing-chain",
            CheckName::UnitalEntropy => "unital-entropy",
            CheckName::RegularizedChain => "regularized-chain",
            CheckName::Ordering => "ordering",
            CheckName::Dpi => "dpi",
            CheckName::ClassicalReduction => "classical-reduction",
            CheckName::SpotValues => "spot-values",
            CheckName::RegularizedSequence => "regularized-sequence",
        }
    }

    pub fn parse(text: &str) -> Option<CheckName> {
        CheckName::ALL.iter().copied().find(|c| c.label() == text)
    }

    /// Orders this check accepts for gated runs, filtered from a list.
    fn filter_orders(&self, orders: &[RenyiOrder]) -> Vec<Option<RenyiOrder>> {
        let keep = |o: &RenyiOrder| -> bool {
            match self {
                CheckName::PinchingInequality | CheckName::SpotValues => false,
                CheckName::PinchingBound => !matches!(o, RenyiOrder::One),
                CheckName::Matsumoto => match o {
                    RenyiOrder::Finite(a) => *a <= 2.0,
                    RenyiOrder::One => true,
                    RenyiOrder::Infinity => false,
                },
                CheckName::MetaChainSandwiched | CheckName::PreprocessingChain => {
                    DivKind::Sandwiched.order_in_dpi_range(*o)
                }
                CheckName::GeometricChain => DivKind::Geometric.order_in_dpi_range(*o),
                CheckName::SandwichedChain | CheckName::RegularizedChain => match o {
                    RenyiOrder::Finite(a) => *a > 1.0,
                    RenyiOrder::One => false,
                    RenyiOrder::Infinity => true,
                },
                CheckName::UnitalEntropy => match o {
                    RenyiOrder::Finite(a) => *a > 1.0,
                    RenyiOrder::One | RenyiOrder::Infinity => true,
                },
                CheckName::RegularizedSequence => {
                    matches!(o, RenyiOrder::Finite(a) if *a > 1.0)
                        || matches!(o, RenyiOrder::Infinity)
                }
                CheckName::Ordering | CheckName::Dpi | CheckName::ClassicalReduction => true,
            }
        };
        let filtered: Vec<Option<RenyiOrder>> =
            orders.iter().copied().filter(keep).map(Some).collect();
        if matches!(self, CheckName::PinchingInequality | CheckName::SpotValues) {
            vec![None]
        } else {
            filtered
        }
    }

    /// Whether positive-but-not-CP (transpose-composed) map families apply.
    fn supports_transpose_family(&self) -> bool {
        matches!(
            self,
            CheckName::PinchingBound
                | CheckName::MetaChainSandwiched
                | CheckName::GeometricChain
                | CheckName::SandwichedChain
                | CheckName::PreprocessingChain
                | CheckName::RegularizedChain
        )
    }

    /// Dimensions this check runs at, filtered from a list.
    fn filter_dims(&self, dims: &[usize]) -> Vec<usize> {
        match self {
            // tensor-power checks stay at qubits to respect the guards
            CheckName::RegularizedChain | CheckName::RegularizedSequence => {
                dims.iter().copied().filter(|&d| d == 2).collect()
            }
            CheckName::SpotValues => vec![2],
            _ => dims.to_vec(),
        }
    }

    fn default_trials(&self, trials: usize) -> usize {
        match self {
            CheckName::SpotValues => 1,
            CheckName::Ordering | CheckName::Dpi | CheckName::ClassicalReduction => {
                trials.min(100)
            }
            CheckName::RegularizedSequence => trials.min(20),
            _ => trials,
        }
    }
}

/// Campaign configuration; JSON-serializable for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    pub checks: Vec<CheckName>,
    pub trials: usize,
    /// Per-check overrides of the trial count, by wire name.
    pub trial_overrides: BTreeMap<String, usize>,
    pub dims: Vec<usize>,
    pub orders: Vec<RenyiOrder>,
    pub map_families: Vec<MapFamily>,
    pub rng_seed: u64,
    /// Slack tolerance recorded for chain-rule checks (bits).
    pub tol: f64,
    /// Search breadth for statement-form channel-divergence estimates.
    pub restarts: usize,
    pub refine_iters: usize,
    pub measured_restarts: usize,
    pub measured_refine: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            checks: CheckName::ALL.to_vec(),
            trials: 200,
            trial_overrides: BTreeMap::new(),
            dims: vec![2, 3],
            orders: vec![
                RenyiOrder::Finite(0.6),
                RenyiOrder::One,
                RenyiOrder::Finite(1.5),
                RenyiOrder::Finite(2.0),
                RenyiOrder::Finite(4.0),
                RenyiOrder::Infinity,
            ],
            map_families: vec![MapFamily::Cptp, MapFamily::TransposePositive],
            rng_seed: 7_0462_0261,
            tol: 1e-7,
            restarts: 2,
            refine_iters: 20,
            measured_restarts: 2,
            measured_refine: 60,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.dims.iter().any(|&d| !(2..=8).contains(&d)) {
            return Err(VerifyError::BadConfig(
                "campaign dimensions must be in 2..=8".into(),
            ));
        }
        if self.map_families.is_empty() {
            return Err(VerifyError::BadConfig("no map families selected".into()));
        }
        if self.checks.is_empty() {
            return Err(VerifyError::BadConfig("no checks selected".into()));
        }
        Ok(())
    }

    fn trials_for(&self, check: CheckName) -> usize {
        self.trial_overrides
            .get(check.label())
            .copied()
            .unwrap_or_else(|| check.default_trials(self.trials))
    }
}

#[derive(Debug, Clone)]
struct Cell {
    check: CheckName,
    dim: usize,
    order: Option<RenyiOrder>,
    family: MapFamily,
}

/// Per-check aggregate in a campaign report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub rows: usize,
    pub passes: usize,
    pub failures: usize,
    pub exploration_rows: usize,
    pub worst_slack: f64,
    pub failing_digests: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub summaries: Vec<CheckSummary>,
    pub total_rows: usize,
    /// Failures among gated rows; campaigns exit nonzero iff this is > 0.
    pub gated_failures: usize,
    pub runtime_seconds: f64,
    #[serde(skip)]
    pub rows: Vec<CheckResult>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.gated_failures == 0
    }

    /// CSV with one row per check result. Floats carry 12 significant
    /// digits so reports diff cleanly; infinities print as ±inf.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,dim,alpha,trial,lhs_bits,rhs_bits,slack,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.name,
                r.dim,
                r.order_label,
                r.trial,
                fmt_g12(r.lhs_bits),
                fmt_g12(r.rhs_bits),
                fmt_g12(r.slack),
                r.pass
            ));
        }
        out
    }
}

/// 12-significant-digit float formatting shared by every report surface.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let formatted = format!("{x:.11e}");
    // normalize "1.20000000000e0" to a plain decimal when compact
    match formatted.parse::<f64>() {
        Ok(v) => {
            let plain = format!("{v}");
            if plain.parse::<f64>() == Ok(v) && plain.len() <= 18 {
                plain
            } else {
                formatted
            }
        }
        Err(_) => formatted,
    }
}

fn order_tag(order: &Option<RenyiOrder>) -> u64 {
    let label = order.map(|o| o.to_string()).unwrap_or_default();
    // FNV-1a over the label bytes
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn check_tag(check: CheckName) -> u64 {
    CheckName::ALL
        .iter()
        .position(|c| *c == check)
        .expect("known check") as u64
}

/// Run a campaign. `threads` overrides the `QCHAIN_THREADS` environment
/// variable; zero or absent means machine parallelism. Thread count never
/// changes any reported number.
pub fn run_campaign(
    config: &CampaignConfig,
    threads: Option<usize>,
) -> Result<CampaignReport, VerifyError> {
    config.validate()?;
    let started = Instant::now();
    let mut cells = Vec::new();
    for &check in &config.checks {
        let families: Vec<MapFamily> = if check.supports_transpose_family() {
            config.map_families.clone()
        } else {
            vec![MapFamily::Cptp]
        };
        for dim in check.filter_dims(&config.dims) {
            for order in check.filter_orders(&config.orders) {
                for &family in &families {
                    cells.push(Cell {
                        check,
                        dim,
                        order,
                        family,
                    });
                }
            }
        }
    }
    let mut tasks = Vec::new();
    for (cell_idx, cell) in cells.iter().enumerate() {
        for trial in 0..config.trials_for(cell.check) {
            tasks.push((cell_idx, trial));
        }
    }
    let threads = threads
        .or_else(|| {
            std::env::var("QCHAIN_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| VerifyError::BadConfig(format!("thread pool: {e}")))?;
    let nested: Result<Vec<Vec<CheckResult>>, VerifyError> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cell_idx, trial)| run_trial(&cells[cell_idx], trial, config))
            .collect()
    });
    let rows: Vec<CheckResult> = nested?.into_iter().flatten().collect();

    let mut by_name: BTreeMap<String, CheckSummary> = BTreeMap::new();
    let mut gated_failures = 0usize;
    for r in &rows {
        let entry = by_name.entry(r.name.clone()).or_insert_with(|| CheckSummary {
            name: r.name.clone(),
            rows: 0,
            passes: 0,
            failures: 0,
            exploration_rows: 0,
            worst_slack: f64::INFINITY,
            failing_digests: Vec::new(),
        });
        entry.rows += 1;
        if !r.gated {
            entry.exploration_rows += 1;
        }
        if r.pass {
            entry.passes += 1;
        } else {
            entry.failures += 1;
            if r.gated {
                gated_failures += 1;
            }
            if entry.failing_digests.len() < 10 {
                entry.failing_digests.push(r.instance_digest.clone());
            }
        }
        if r.slack < entry.worst_slack {
            entry.worst_slack = r.slack;
        }
    }
    Ok(CampaignReport {
        summaries: by_name.into_values().collect(),
        total_rows: rows.len(),
        gated_failures,
        runtime_seconds: started.elapsed().as_secs_f64(),
        rows,
    })
}

fn run_trial(
    cell: &Cell,
    trial: usize,
    config: &CampaignConfig,
) -> Result<Vec<CheckResult>, VerifyError> {
    let tags = [
        check_tag(cell.check),
        cell.dim as u64,
        order_tag(&cell.order),
        matches!(cell.family, MapFamily::TransposePositive) as u64,
        trial as u64,
    ];
    let seed = substream_seed(config.rng_seed, &tags);
    let mut rng = substream_rng(config.rng_seed, &tags);
    let order_label = cell
        .order
        .map(|o| o.to_string())
        .unwrap_or_default();
    let digest = format!(
        "check={};dim={};alpha={};family={};trial={};seed={:016x}",
        cell.check.label(),
        cell.dim,
        order_label,
        cell.family.label(),
        trial,
        seed
    );
    let d = cell.dim;
    use rand::Rng;
    let mut results = match cell.check {
        CheckName::PinchingInequality => {
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let spec = spectrum(&sigma, DEFAULT_CLUSTER_TOL);
            let pinched = pinch(&sigma, &rho)?;
            let scaled = pinched.matrix().scale_re(spec.count as f64);
            let (_, lmin) = loewner_geq(&scaled, rho.matrix(), PINCHING_INEQ_TOL)?;
            vec![CheckResult::new("pinching-inequality", 0.0, lmin, PINCHING_INEQ_TOL)
                .with_detail("spec_count", spec.count as f64)]
        }
        CheckName::PinchingBound => {
            let order = cell.order.expect("order cell");
            let (e, f) = draw_map_pair(d, cell.family, &mut rng)?;
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            vec![check_pinching_bound(&e, &f, &rho, &sigma, order)?]
        }
        CheckName::Matsumoto => {
            let order = cell.order.expect("order cell");
            let rho = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let rt = build_reverse_test(&rho, &sigma, DEFAULT_CLUSTER_TOL)?;
            let report = verify_reverse_test(&rt, &rho, &sigma, &[order])?;
            let gap = report.order_gaps[0].gap;
            vec![
                CheckResult::equality("matsumoto-gap", gap, MATSUMOTO_GAP_TOL)
                    .with_detail("classical_bits", report.order_gaps[0].classical_bits)
                    .with_detail("geometric_bits", report.order_gaps[0].geometric_bits),
                CheckResult::equality(
                    "matsumoto-gamma",
                    report.gamma_p_residual.max(report.gamma_q_residual),
                    MATSUMOTO_RESIDUAL_TOL,
                )
                .with_detail("gamma_p_residual", report.gamma_p_residual)
                .with_detail("gamma_q_residual", report.gamma_q_residual),
            ]
        }
        CheckName::MetaChainSandwiched | CheckName::GeometricChain => {
            let order = cell.order.expect("order cell");
            let kind = if cell.check == CheckName::MetaChainSandwiched {
                DivKind::Sandwiched
            } else {
                DivKind::Geometric
            };
            let (e, f) = draw_map_pair(d, cell.family, &mut rng)?;
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let opts = ChannelDivOpts::quick(config.restarts, config.refine_iters, rng.gen());
            let out = check_meta_chain(&e, &f, &rho, &sigma, order, kind, &opts)?;
            vec![out.proof, out.statement]
        }
        CheckName::SandwichedChain => {
            let order = cell.order.expect("order cell");
            let (e, f) = draw_map_pair(d, cell.family, &mut rng)?;
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            vec![check_sandwiched_chain(&e, &f, &rho, &sigma, order)?]
        }
        CheckName::PreprocessingChain => {
            let order = cell.order.expect("order cell");
            let (e, f) = draw_map_pair(d, cell.family, &mut rng)?;
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let basis = random_unitary_rng(d, &mut rng);
            vec![check_preprocessing_chain(
                &e,
                &f,
                &rho,
                &sigma,
                order,
                &basis,
                DivKind::Sandwiched,
            )?]
        }
        CheckName::UnitalEntropy => {
            let order = cell.order.expect("order cell");
            let e = random_mixed_unitary_channel(d, d * d, &mut rng);
            let f = random_mixed_unitary_channel(d, d * d, &mut rng);
            let rho = random_state_rng(d, d, &mut rng);
            let paired = check_unital_entropy(&e, &f, &rho, order)?;
            let mut selfref = check_unital_entropy(&e, &e, &rho, order)?;
            selfref.name = "unital-entropy-self".into();
            selfref.tol = ORDERING_TOL;
            selfref.pass = selfref.slack >= -ORDERING_TOL;
            vec![paired, selfref]
        }
        CheckName::RegularizedChain => {
            let order = cell.order.expect("order cell");
            let (e, f) = draw_map_pair(d, cell.family, &mut rng)?;
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            check_regularized_chain(&e, &f, &rho, &sigma, order, 2)?
        }
        CheckName::Ordering => {
            let order = cell.order.expect("order cell");
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let mut rows = Vec::new();
            if DivKind::Sandwiched.order_in_dpi_range(order) {
                let opts = MeasuredOpts {
                    restarts: config.measured_restarts,
                    refine_iters: config.measured_refine,
                    seed: rng.gen(),
                };
                let m = measured(&rho, &sigma, order, &opts)?;
                let s = sandwiched(&rho, &sigma, order)?;
                rows.push(
                    CheckResult::new(
                        "ordering-measured-sandwiched",
                        m.value.bits(),
                        s.bits(),
                        ORDERING_TOL,
                    )
                    .with_detail("measured_lb", m.value.bits()),
                );
            }
            if DivKind::Geometric.order_in_dpi_range(order) {
                let s = sandwiched(&rho, &sigma, order)?;
                let g = geometric(&rho, &sigma, order)?;
                rows.push(CheckResult::new(
                    "ordering-sandwiched-geometric",
                    s.bits(),
                    g.bits(),
                    ORDERING_TOL,
                ));
            }
            rows
        }
        CheckName::Dpi => {
            let order = cell.order.expect("order cell");
            let rho = random_state_rng(d, d, &mut rng);
            let sigma = random_state_gapped(d, &mut rng, 1e4, 1e-3);
            let e = random_channel_rng(d, d, d * d, &mut rng)?;
            let e_rho = e.apply_to_state(&rho)?;
            let e_sigma = e.apply_to_state(&sigma)?;
            let mut rows = Vec::new();
            if DivKind::Sandwiched.order_in_dpi_range(order) {
                let before = sandwiched(&rho, &sigma, order)?;
                let after = sandwiched(&e_rho, &e_sigma, order)?;
                rows.push(CheckResult::new(
                    "dpi-sandwiched",
                    after.bits(),
                    before.bits(),
                    DPI_TOL,
                ));
            }
            if DivKind::Geometric.order_in_dpi_range(order) {
                let before = geometric(&rho, &sigma, order)?;
                let after = geometric(&e_rho, &e_sigma, order)?;
                rows.push(CheckResult::new(
                    "dpi-geometric",
                    after.bits(),
                    before.bits(),
                    DPI_TOL,
                ));
            }
            rows
        }
        CheckName::ClassicalReduction => {
            let order = cell.order.expect("order cell");
            let basis_u = random_unitary_rng(d, &mut rng);
            let draw_spectrum = |rng: &mut rand_chacha::ChaCha12Rng| -> Vec<f64> {
                let raw: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 0.1).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / total).collect()
            };
            let pvals = draw_spectrum(&mut rng);
            let qvals = draw_spectrum(&mut rng);
            let build = |vals: &[f64]| -> Result<DensityOperator, VerifyError> {
                let m = basis_u
                    .matmul(&ComplexMatrix::diag(vals))?
                    .matmul(&basis_u.adjoint())?
                    .hermitize();
                Ok(DensityOperator::new(m)?)
            };
            let rho = build(&pvals)?;
            let sigma = build(&qvals)?;
            let p = Distribution::new(pvals)?;
            let q = Distribution::new(qvals)?;
            let reference = classical_renyi(&p, &q, order)?.bits();
            let s = sandwiched(&rho, &sigma, order)?.bits();
            let g = geometric(&rho, &sigma, order)?.bits();
            let opts = MeasuredOpts {
                restarts: config.measured_restarts,
                refine_iters: config.measured_refine,
                seed: rng.gen(),
            };
            let m = measured(&rho, &sigma, order, &opts)?.value.bits();
            vec![
                CheckResult::equality(
                    "classical-reduction-sandwiched",
                    s - reference,
                    CLASSICAL_REDUCTION_TOL,
                )
                .with_detail("classical_bits", reference),
                CheckResult::equality(
                    "classical-reduction-geometric",
                    g - reference,
                    CLASSICAL_REDUCTION_TOL,
                ),
                CheckResult::equality(
                    "classical-reduction-measured",
                    m - reference,
                    CLASSICAL_REDUCTION_TOL,
                ),
            ]
        }
        CheckName::SpotValues => spot_value_rows()?,
        CheckName::RegularizedSequence => {
            let order = cell.order.expect("order cell");
            let e = random_channel_rng(d, d, d * d, &mut rng)?;
            let f = random_channel_rng(d, d, d * d, &mut rng)?;
            let opts = ChannelDivOpts::quick(config.restarts, config.refine_iters, rng.gen());
            let levels = regularized_sequence(&e, &f, order, DivKind::Sandwiched, 2, &opts)?;
            let f1 = levels[0].f_n;
            let f2 = levels[1].f_n;
            vec![
                CheckResult::new("regularized-sequence-half", 0.5 * f1, f2, REGULARIZED_SEQ_TOL)
                    .with_detail("f1", f1)
                    .with_detail("f2", f2),
                CheckResult::new("regularized-sequence-product", f1, f2, REGULARIZED_SEQ_TOL),
            ]
        }
    };
    for r in results.iter_mut() {
        r.dim = d;
        r.order_label = order_label.clone();
        r.trial = trial;
        r.instance_digest = digest.clone();
    }
    Ok(results)
}

fn draw_map_pair(
    dim: usize,
    family: MapFamily,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(PositiveMapRep, PositiveMapRep), VerifyError> {
    let e = random_channel_rng(dim, dim, dim * dim, rng)?;
    let f = random_channel_rng(dim, dim, dim * dim, rng)?;
    Ok(match family {
        MapFamily::Cptp => (e, f),
        MapFamily::TransposePositive => (e.with_pre_transpose(), f.with_pre_transpose()),
    })
}

/// Closed-form fixtures: values known exactly, checked to tight tolerance.
fn spot_value_rows() -> Result<Vec<CheckResult>, VerifyError> {
    use num_complex::Complex64;
    let plus =
        DensityOperator::pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?;
    let mixed = DensityOperator::maximally_mixed(2);
    let zero = DensityOperator::basis_state(2, 0)?;
    let s2 = sandwiched(&plus, &mixed, RenyiOrder::Finite(2.0))?.bits();
    let g2 = geometric(&plus, &mixed, RenyiOrder::Finite(2.0))?.bits();
    let sinf = sandwiched(&zero, &mixed, RenyiOrder::Infinity)?.bits();
    let id = PositiveMapRep::identity(2);
    let dep = PositiveMapRep::depolarizing(2);
    let est = channel_divergence(
        &id,
        &dep,
        RenyiOrder::Infinity,
        DivKind::Sandwiched,
        &ChannelDivOpts::quick(4, 50, 0),
    )?;
    Ok(vec![
        CheckResult::equality("spot-sandwiched-two", s2 - 1.0, SPOT_TOL),
        CheckResult::equality("spot-geometric-two", g2 - 1.0, SPOT_TOL),
        CheckResult::equality("spot-max-div", sinf - 1.0, SPOT_TOL),
        CheckResult::equality("spot-channel-div", est.value_bits - 1.0, SPOT_CHANNEL_TOL)
            .with_detail("estimate", est.value_bits),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> CampaignConfig {
        CampaignConfig {
            trials: 2,
            dims: vec![2],
            orders: vec![RenyiOrder::Finite(0.6), RenyiOrder::Finite(2.0), RenyiOrder::Infinity],
            restarts: 1,
            refine_iters: 0,
            measured_restarts: 1,
            measured_refine: 20,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn zero_trials_passes_trivially() {
        let config = CampaignConfig {
            trials: 0,
            trial_overrides: CheckName::ALL
                .iter()
                .map(|c| (c.label().to_string(), 0))
                .collect(),
            ..tiny_config()
        };
        let report = run_campaign(&config, Some(1)).unwrap();
        assert_eq!(report.total_rows, 0);
        assert!(report.all_passed());
    }

    #[test]
    fn tiny_campaign_passes_and_is_deterministic() {
        let config = tiny_config();
        let a = run_campaign(&config, Some(1)).unwrap();
        assert!(a.all_passed(), "failures: {:#?}", a.summaries.iter().filter(|s| s.failures > 0).collect::<Vec<_>>());
        let b = run_campaign(&config, Some(4)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "thread count changed the report");
        let c = run_campaign(&config, Some(1)).unwrap();
        assert_eq!(a.to_csv(), c.to_csv(), "rerun changed the report");
    }

    #[test]
    fn csv_has_expected_header_and_row_count() {
        let config = CampaignConfig {
            checks: vec![CheckName::PinchingInequality],
            trials: 3,
            dims: vec![2, 3],
            ..tiny_config()
        };
        let report = run_campaign(&config, Some(1)).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "check,dim,alpha,trial,lhs_bits,rhs_bits,slack,pass"
        );
        assert_eq!(lines.count(), 6);
    }

    #[test]
    fn check_name_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(CheckName::parse(c.label()), Some(c));
        }
        assert_eq!(CheckName::parse("nope"), None);
    }

    #[test]
    fn fmt_g12_is_stable() {
        assert_eq!(fmt_g12(f64::INFINITY), "inf");
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1");
        let x = 0.1 + 0.2;
        let s = fmt_g12(x);
        assert!(s.starts_with("0.3"), "{s}");
    }
}
