//! Traffic cases, parameter sweeps and the drop-versus-misbehavior derivation.
//!
//! Every case sweeps the neighbor generation level over the same axis. Case I
//! keeps own traffic constant while neighbor traffic ramps up over the run;
//! Case II ramps both; Case III ramps neighbor traffic up and own traffic
//! down; Case IV holds neighbor traffic constant and ramps own traffic up.
//!
//! Default rates, capacity, ambient loss and energy budget are the calibrated
//! values recorded in `CALIBRATION.md` and reproduced by the `calibrate`
//! example.

mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::TimeBudget;
use crate::sim::{
    self, classify_misbehavior, ClassTally, Policy, RateFunction, SimConfig, SimError, Trace,
};
use crate::utilization::{utilization_node, PacketCounters};

pub use self::stats::{isotonic_nondecreasing, spearman};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("unknown case `{0}` (expected I, II, III or IV)")]
    UnknownCase(String),
    #[error("invalid case spec: {0}")]
    InvalidSpec(String),
    #[error("no result rows to derive from")]
    EmptyInput,
}

/// Calibrated experiment defaults.
pub mod calibration {
    /// Packets per second; one-second epochs make this the per-epoch capacity.
    pub const DATA_RATE: f64 = 1000.0;
    pub const EPOCHS: u64 = 100;
    pub const WINDOW_EPOCHS: u64 = 10;
    pub const BASE_DROP_PROB: f64 = 0.13;
    pub const ENERGY_BUDGET: u64 = 10_000;
    /// Own packets per epoch at epoch 0 in every case.
    pub const OWN_BASE: f64 = 960.0;
    /// Own-rate change per epoch in the ramped cases.
    pub const OWN_SLOPE: f64 = 2.0;
    pub const SEEDS: u64 = 10;
    pub const SWEEP_START: u32 = 100;
    pub const SWEEP_END: u32 = 1600;
    pub const SWEEP_STEP: u32 = 100;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    I,
    II,
    III,
    IV,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::I, CaseId::II, CaseId::III, CaseId::IV];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::I => "I",
            CaseId::II => "II",
            CaseId::III => "III",
            CaseId::IV => "IV",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(CaseId::I),
            "II" | "2" => Ok(CaseId::II),
            "III" | "3" => Ok(CaseId::III),
            "IV" | "4" => Ok(CaseId::IV),
            _ => Err(ExperimentError::UnknownCase(s.to_string())),
        }
    }
}

/// One experiment: rate shapes, sweep axis, algorithms and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub case_id: CaseId,
    pub self_rate_fn: RateFunction,
    /// Neighbor rate per unit of sweep value; scaled by each sweep value.
    pub neighbor_rate_fn: RateFunction,
    /// Neighbor packets generated per measurement window.
    pub sweep_axis: Vec<u32>,
    pub algorithms: Vec<Policy>,
    pub seeds: Vec<u64>,
    /// Template for every run; rates, policy and seed are overwritten.
    pub base_config: SimConfig,
}

pub fn calibrated_config() -> SimConfig {
    use calibration::*;
    SimConfig {
        data_rate: DATA_RATE,
        epochs: EPOCHS,
        window_epochs: WINDOW_EPOCHS,
        base_drop_prob: BASE_DROP_PROB,
        energy_budget: ENERGY_BUDGET,
        ..SimConfig::default()
    }
}

pub fn case_spec(case_id: CaseId) -> CaseSpec {
    use calibration::*;
    // A sweep value v is v neighbor packets per window on average, i.e.
    // v / W per epoch. A ramp from zero reaches twice that mean at the end.
    let mean_per_unit = 1.0 / WINDOW_EPOCHS as f64;
    let ramp = RateFunction::increasing(0.0, 2.0 * mean_per_unit / EPOCHS as f64);
    let (self_rate_fn, neighbor_rate_fn) = match case_id {
        CaseId::I => (RateFunction::constant(OWN_BASE), ramp),
        CaseId::II => (RateFunction::increasing(OWN_BASE, OWN_SLOPE), ramp),
        CaseId::III => (RateFunction::decreasing(OWN_BASE, OWN_SLOPE), ramp),
        CaseId::IV => (
            RateFunction::increasing(OWN_BASE, OWN_SLOPE),
            RateFunction::constant(mean_per_unit),
        ),
    };
    CaseSpec {
        case_id,
        self_rate_fn,
        neighbor_rate_fn,
        sweep_axis: (SWEEP_START..=SWEEP_END)
            .step_by(SWEEP_STEP as usize)
            .collect(),
        algorithms: vec![Policy::Ctc, Policy::Dsr],
        seeds: (1..=SEEDS).collect(),
        base_config: calibrated_config(),
    }
}

impl CaseSpec {
    /// Replaces the seed list with `count` consecutive seeds from `first`.
    pub fn with_seeds(mut self, first: u64, count: u64) -> Self {
        self.seeds = (0..count).map(|i| first.wrapping_add(i)).collect();
        self
    }

    pub fn with_algorithms(mut self, algorithms: Vec<Policy>) -> Self {
        self.algorithms = algorithms;
        self
    }

    pub fn with_sweep(mut self, sweep_axis: Vec<u32>) -> Self {
        self.sweep_axis = sweep_axis;
        self
    }

    /// Config of a single sweep point.
    pub fn config_for(&self, algorithm: Policy, sweep_value: u32, seed: u64) -> SimConfig {
        SimConfig {
            policy: algorithm,
            seed,
            self_rate_fn: self.self_rate_fn,
            neighbor_rate_fn: self.neighbor_rate_fn.scaled(sweep_value as f64),
            ..self.base_config.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.sweep_axis.is_empty() || self.algorithms.is_empty() || self.seeds.is_empty() {
            return Err(ExperimentError::InvalidSpec(
                "sweep axis, algorithms and seeds must all be non-empty".into(),
            ));
        }
        self.base_config.validate()?;
        Ok(())
    }
}

/// Aggregate of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// `I`..`IV`, or a free label for ad hoc runs.
    pub case_id: String,
    pub algorithm: Policy,
    pub sweep_value: u32,
    pub seed: u64,
    pub epoch_window: u64,
    pub own: ClassTally,
    pub neighbor: ClassTally,
    /// Dropped over offered, both classes together.
    pub drop_ratio: f64,
    pub malicious_fraction: f64,
    /// Forwarded packets per second of simulated time.
    pub throughput: f64,
    /// NaN when the node received no neighbor traffic.
    pub utilization: f64,
}

impl ResultRow {
    fn sort_key(&self) -> (&str, Policy, u32, u64) {
        (&self.case_id, self.algorithm, self.sweep_value, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(mut rows: Vec<ResultRow>) -> Self {
        rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Mean of `metric` over seeds at each sweep value, for one algorithm.
    pub fn mean_by_sweep(
        &self,
        algorithm: Policy,
        metric: impl Fn(&ResultRow) -> f64,
    ) -> Vec<(u32, f64)> {
        let mut acc: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
        for row in self.rows.iter().filter(|r| r.algorithm == algorithm) {
            let e = acc.entry(row.sweep_value).or_default();
            e.0 += metric(row);
            e.1 += 1;
        }
        acc.into_iter()
            .map(|(x, (s, n))| (x, s / n as f64))
            .collect()
    }
}

/// Collapses a trace into one result row.
pub fn summarize(
    case_id: &str,
    sweep_value: u32,
    config: &SimConfig,
    trace: &Trace,
) -> Result<ResultRow, ExperimentError> {
    let (own, neighbor) = trace.final_snapshots().iter().fold(
        (ClassTally::default(), ClassTally::default()),
        |(mut o, mut n), s| {
            o.add(&s.total_own);
            n.add(&s.total_neighbor);
            (o, n)
        },
    );
    let offered = own.offered + neighbor.offered;
    let drop_ratio = if offered == 0 {
        0.0
    } else {
        (own.dropped + neighbor.dropped) as f64 / offered as f64
    };
    let malicious_fraction = if trace.is_empty() {
        0.0
    } else {
        classify_misbehavior(trace, config.misbehavior_threshold, config.window_epochs)?
            .malicious_fraction
    };
    let total_time = trace.len() as f64 * trace.epoch_length;
    let throughput = if total_time > 0.0 {
        (own.forwarded + neighbor.forwarded) as f64 / total_time
    } else {
        0.0
    };
    let (t_pp, t_np) = trace.time_totals(sim::TARGET);
    let utilization = TimeBudget::new(t_pp, t_np)
        .ok()
        .zip(PacketCounters::new(own.forwarded, neighbor.forwarded, neighbor.offered).ok())
        .and_then(|(times, counters)| utilization_node(&counters, &times).ok())
        .unwrap_or(f64::NAN);

    Ok(ResultRow {
        case_id: case_id.to_string(),
        algorithm: config.policy,
        sweep_value,
        seed: config.seed,
        epoch_window: config.window_epochs,
        own,
        neighbor,
        drop_ratio,
        malicious_fraction,
        throughput,
        utilization,
    })
}

pub fn run_case(spec: &CaseSpec) -> Result<ResultTable, ExperimentError> {
    run_case_with(spec, &|_, _| {})
}

/// Like [`run_case`], handing every row and its full trace to `inspect`.
///
/// Sweep points run in parallel; `inspect` sees them in no particular order,
/// the returned table is sorted.
pub fn run_case_with(
    spec: &CaseSpec,
    inspect: &(dyn Fn(&ResultRow, &Trace) + Sync),
) -> Result<ResultTable, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(Policy, u32, u64)> = spec
        .algorithms
        .iter()
        .flat_map(|&a| {
            spec.sweep_axis
                .iter()
                .flat_map(move |&v| spec.seeds.iter().map(move |&s| (a, v, s)))
        })
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(algorithm, sweep_value, seed)| {
            let config = spec.config_for(algorithm, sweep_value, seed);
            let trace = sim::run(&config)?;
            let row = summarize(spec.case_id.as_str(), sweep_value, &config, &trace)?;
            inspect(&row, &trace);
            Ok(row)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(ResultTable::new(rows))
}

/// Width of a drop-ratio bucket, in percentage points.
pub const BUCKET_WIDTH_PCT: u32 = 5;

/// Mean malicious fraction of the rows whose drop ratio falls in one bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketPoint {
    /// Lower edge of the bucket in percent, e.g. 10 for `[10%, 15%)`.
    pub lower_pct: u32,
    pub mean_malicious: f64,
    pub count: usize,
}

/// Drop-bucket curves per algorithm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaseVCurves {
    pub curves: BTreeMap<Policy, Vec<BucketPoint>>,
}

impl CaseVCurves {
    pub fn curve(&self, algorithm: Policy) -> &[BucketPoint] {
        self.curves
            .get(&algorithm)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Curve after weighted isotonic (nondecreasing) regression.
    pub fn smoothed(&self, algorithm: Policy) -> Vec<BucketPoint> {
        let curve = self.curve(algorithm);
        let values: Vec<(f64, f64)> = curve
            .iter()
            .map(|b| (b.mean_malicious, b.count as f64))
            .collect();
        let fitted = isotonic_nondecreasing(&values);
        curve
            .iter()
            .zip(fitted)
            .map(|(b, y)| BucketPoint {
                mean_malicious: y,
                ..*b
            })
            .collect()
    }

    /// Bucket edges present in every algorithm's curve.
    pub fn shared_buckets(&self) -> Vec<u32> {
        let mut iter = self.curves.values();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let mut shared: Vec<u32> = first.iter().map(|b| b.lower_pct).collect();
        for curve in iter {
            shared.retain(|x| curve.iter().any(|b| b.lower_pct == *x));
        }
        shared
    }
}

pub fn bucket_of(drop_ratio: f64) -> u32 {
    let per_bucket = BUCKET_WIDTH_PCT as f64 / 100.0;
    ((drop_ratio / per_bucket + 1e-9).floor().max(0.0) as u32) * BUCKET_WIDTH_PCT
}

/// Pools all rows per algorithm and averages the malicious fraction inside
/// each 5-point drop-ratio bucket. Empty buckets are omitted.
pub fn derive_case_v(tables: &[ResultTable]) -> Result<CaseVCurves, ExperimentError> {
    let rows: Vec<&ResultRow> = tables.iter().flat_map(|t| t.rows.iter()).collect();
    if rows.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let mut acc: BTreeMap<Policy, BTreeMap<u32, (f64, usize)>> = BTreeMap::new();
    for row in rows {
        let e = acc
            .entry(row.algorithm)
            .or_default()
            .entry(bucket_of(row.drop_ratio))
            .or_default();
        e.0 += row.malicious_fraction;
        e.1 += 1;
    }
    let curves = acc
        .into_iter()
        .map(|(algorithm, buckets)| {
            let points = buckets
                .into_iter()
                .map(|(lower_pct, (sum, count))| BucketPoint {
                    lower_pct,
                    mean_malicious: sum / count as f64,
                    count,
                })
                .collect();
            (algorithm, points)
        })
        .collect();
    Ok(CaseVCurves { curves })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(algorithm: Policy, drop_ratio: f64, malicious_fraction: f64) -> ResultRow {
        ResultRow {
            case_id: "I".into(),
            algorithm,
            sweep_value: 100,
            seed: 1,
            epoch_window: 10,
            own: ClassTally::default(),
            neighbor: ClassTally::default(),
            drop_ratio,
            malicious_fraction,
            throughput: 0.0,
            utilization: f64::NAN,
        }
    }

    #[test]
    fn case_shapes() {
        use crate::sim::RateKind::*;
        let kinds = |c| {
            let s = case_spec(c);
            (s.self_rate_fn.kind, s.neighbor_rate_fn.kind)
        };
        assert_eq!(kinds(CaseId::I), (Constant, LinearIncreasing));
        assert_eq!(kinds(CaseId::II), (LinearIncreasing, LinearIncreasing));
        assert_eq!(kinds(CaseId::III), (LinearDecreasing, LinearIncreasing));
        assert_eq!(kinds(CaseId::IV), (LinearIncreasing, Constant));
        let spec = case_spec(CaseId::I);
        assert_eq!(spec.sweep_axis.len(), 16);
        assert_eq!((spec.sweep_axis[0], spec.sweep_axis[15]), (100, 1600));
        assert_eq!(spec.seeds.len(), 10);
    }

    #[test]
    fn case_ids_parse() {
        assert_eq!("iii".parse::<CaseId>().unwrap(), CaseId::III);
        assert_eq!("4".parse::<CaseId>().unwrap(), CaseId::IV);
        assert_eq!(
            "V".parse::<CaseId>(),
            Err(ExperimentError::UnknownCase("V".into()))
        );
    }

    #[test]
    fn neighbor_sweep_scales_to_window_mean() {
        // Over the run the ramp averages v / W per epoch, so v per window.
        let spec = case_spec(CaseId::I);
        let config = spec.config_for(Policy::Ctc, 800, 1);
        let total: f64 = (0..config.epochs)
            .map(|e| config.neighbor_rate_fn.eval(e))
            .sum();
        let per_window = total / (config.epochs / config.window_epochs) as f64;
        assert!((per_window - 800.0).abs() / 800.0 < 0.02, "{per_window}");
    }

    #[test]
    fn cardinality() {
        let spec = case_spec(CaseId::I).with_sweep(vec![300]).with_seeds(5, 1);
        let table = run_case(&spec).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.rows[0].algorithm, Policy::Ctc);
        assert_eq!(table.rows[1].algorithm, Policy::Dsr);
        assert!(table
            .rows
            .iter()
            .all(|r| (0.0..=1.0).contains(&r.drop_ratio)));
    }

    #[test]
    fn empty_spec_is_rejected() {
        let spec = case_spec(CaseId::II).with_sweep(vec![]);
        assert!(matches!(
            run_case(&spec),
            Err(ExperimentError::InvalidSpec(_))
        ));
    }

    #[test]
    fn bucket_edges() {
        assert_eq!(bucket_of(0.0), 0);
        assert_eq!(bucket_of(0.0499), 0);
        assert_eq!(bucket_of(0.05), 5);
        assert_eq!(bucket_of(0.12), 10);
        assert_eq!(bucket_of(0.15), 15);
        assert_eq!(bucket_of(1.0), 100);
    }

    #[test]
    fn case_v_examples() {
        let zeros = ResultTable::new(vec![row(Policy::Ctc, 0.0, 0.0), row(Policy::Ctc, 0.0, 0.0)]);
        let curves = derive_case_v(&[zeros]).unwrap();
        assert_eq!(
            curves.curve(Policy::Ctc),
            &[BucketPoint {
                lower_pct: 0,
                mean_malicious: 0.0,
                count: 2
            }]
        );

        let pair = ResultTable::new(vec![
            row(Policy::Dsr, 0.12, 0.2),
            row(Policy::Dsr, 0.13, 0.4),
        ]);
        let curves = derive_case_v(&[pair]).unwrap();
        let b = curves.curve(Policy::Dsr)[0];
        assert_eq!(b.lower_pct, 10);
        assert!((b.mean_malicious - 0.3).abs() < 1e-12);

        let mirrored = |a| {
            ResultTable::new(vec![
                row(a, 0.12, 0.1),
                row(a, 0.31, 0.6),
                row(a, 0.33, 0.8),
            ])
        };
        let curves = derive_case_v(&[mirrored(Policy::Ctc), mirrored(Policy::Dsr)]).unwrap();
        assert_eq!(curves.curve(Policy::Ctc), curves.curve(Policy::Dsr));
        assert_eq!(curves.shared_buckets(), vec![10, 30]);

        assert_eq!(derive_case_v(&[]), Err(ExperimentError::EmptyInput));
        assert_eq!(
            derive_case_v(&[ResultTable::default()]),
            Err(ExperimentError::EmptyInput)
        );
    }

    #[test]
    fn smoothing_is_count_weighted() {
        let table = ResultTable::new(vec![
            row(Policy::Ctc, 0.12, 0.3),
            row(Policy::Ctc, 0.17, 0.0),
            row(Policy::Ctc, 0.18, 0.0),
        ]);
        let curves = derive_case_v(&[table]).unwrap();
        let smoothed = curves.smoothed(Policy::Ctc);
        assert!((smoothed[0].mean_malicious - 0.1).abs() < 1e-12);
        assert!((smoothed[1].mean_malicious - 0.1).abs() < 1e-12);
    }
}
