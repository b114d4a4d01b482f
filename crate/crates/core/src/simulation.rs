//! Monte Carlo FER/BER estimation over BPSK-AWGN with SC decoding.
//!
//! Trials are numbered `0, 1, 2, ...` within a point. Trial `t` draws its
//! message and noise from [`trial_rng`]`(master_seed, key(ebn0), t)`, and a
//! point's statistics are the counts over the shortest prefix of trials that
//! reaches the frame-error target (or `max_frames`). Workers evaluate trials
//! in batches of [`BATCH_FRAMES`] and may run ahead of the prefix; outcomes
//! past the stopping trial are discarded. The statistics therefore do not
//! depend on the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, demap_in_place, modulate_into, trial_rng, NoiseModel};
use crate::codec::{polar_transform_in_place, ScDecoder};
use crate::construction::{build_mask, CodeSpec, FrozenMask};
use crate::error::{Error, Result};

/// Frames per work unit between stop-rule checks.
pub const BATCH_FRAMES: u64 = 64;

/// Version of the results CSV/JSON layout.
pub const RESULTS_SCHEMA_VERSION: u32 = 1;

/// Header of the results CSV.
pub const RESULTS_CSV_HEADER: &str =
    "ebn0_db,frames,frame_errors,bit_errors,fer,ber,is_upper_bound";

/// Parameters of a simulation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub code: CodeSpec,
    pub ebn0_grid_db: Vec<f64>,
    pub target_frame_errors: u64,
    pub max_frames: u64,
    pub master_seed: u64,
}

impl CampaignSpec {
    pub const DEFAULT_TARGET_FRAME_ERRORS: u64 = 200;
    pub const DEFAULT_MAX_FRAMES: u64 = 100_000_000;

    /// A campaign with the default stop rule.
    pub fn new(code: CodeSpec, ebn0_grid_db: Vec<f64>, master_seed: u64) -> Self {
        CampaignSpec {
            code,
            ebn0_grid_db,
            target_frame_errors: Self::DEFAULT_TARGET_FRAME_ERRORS,
            max_frames: Self::DEFAULT_MAX_FRAMES,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.code.validate()?;
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::InvalidSpec("Eb/N0 grid is empty".into()));
        }
        if self.ebn0_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(
                "Eb/N0 grid has a non-finite value".into(),
            ));
        }
        if self.ebn0_grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec(
                "Eb/N0 grid must be strictly increasing".into(),
            ));
        }
        if self.target_frame_errors == 0 {
            return Err(Error::InvalidSpec(
                "target frame errors must be at least 1".into(),
            ));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidSpec("max frames must be at least 1".into()));
        }
        Ok(())
    }
}

/// Error statistics of one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerStats {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    /// Information bits per frame.
    pub k_bits: usize,
    /// Set when `max_frames` ran out before the error target was reached, so
    /// the FER is only an upper-bound style estimate.
    pub is_upper_bound: bool,
    #[serde(skip)]
    pub wall_clock_s: f64,
}

impl FerStats {
    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.frame_errors as f64 / self.frames as f64
        }
    }

    pub fn ber(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.bit_errors as f64 / (self.frames as f64 * self.k_bits as f64)
        }
    }

    /// Binomial standard error of [`fer`](Self::fer).
    pub fn fer_std_error(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        let p = self.fer();
        (p * (1.0 - p) / self.frames as f64).sqrt()
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.ebn0_db,
            self.frames,
            self.frame_errors,
            self.bit_errors,
            self.fer(),
            self.ber(),
            self.is_upper_bound
        )
    }
}

/// Outcome of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub frame_error: bool,
    pub bit_errors: u32,
}

/// A constructed code: spec plus frozen mask.
#[derive(Debug, Clone)]
pub struct CodeContext {
    pub spec: CodeSpec,
    pub mask: FrozenMask,
}

impl CodeContext {
    pub fn build(spec: &CodeSpec) -> Result<Self> {
        Ok(CodeContext {
            spec: *spec,
            mask: build_mask(spec)?,
        })
    }

    pub fn from_mask(spec: CodeSpec, mask: FrozenMask) -> Result<Self> {
        if mask.n() != spec.n_bits || mask.k() != spec.k_bits {
            return Err(Error::SizeMismatch {
                what: "mask information length",
                expected: spec.k_bits,
                actual: mask.k(),
            });
        }
        Ok(CodeContext { spec, mask })
    }
}

/// Per-worker buffers.
#[derive(Debug, Clone)]
pub struct TrialWorkspace {
    decoder: ScDecoder,
    msg: Vec<u8>,
    u: Vec<u8>,
    signal: Vec<f64>,
}

impl TrialWorkspace {
    pub fn new(ctx: &CodeContext) -> Result<Self> {
        let n = ctx.mask.n();
        Ok(TrialWorkspace {
            decoder: ScDecoder::new(n)?,
            msg: vec![0; ctx.mask.k()],
            u: vec![0; n],
            signal: vec![0.0; n],
        })
    }
}

/// Key under which the noise of an Eb/N0 point is drawn. Equal Eb/N0 values
/// share noise across methods and grids.
pub fn point_stream_key(ebn0_db: f64) -> u64 {
    ebn0_db.to_bits()
}

/// Runs trial `trial_index`: random message, encode, BPSK, AWGN, demap, SC decode.
pub fn run_trial(
    ctx: &CodeContext,
    ws: &mut TrialWorkspace,
    noise: &NoiseModel,
    stream_key: u64,
    trial_index: u64,
    master_seed: u64,
) -> TrialOutcome {
    let mut rng = trial_rng(master_seed, stream_key, trial_index);
    let k = ws.msg.len();
    let mut word = 0u64;
    for (j, bit) in ws.msg.iter_mut().enumerate() {
        if j % 64 == 0 {
            word = rng.random();
        }
        *bit = ((word >> (j % 64)) & 1) as u8;
    }
    ws.u.fill(0);
    for (&i, &b) in ctx.mask.info().iter().zip(&ws.msg) {
        ws.u[i] = b;
    }
    polar_transform_in_place(&mut ws.u);
    modulate_into(&ws.u, &mut ws.signal);
    add_noise(&mut ws.signal, noise, &mut rng);
    demap_in_place(&mut ws.signal, noise);
    let u_hat = ws
        .decoder
        .decode(&ws.signal, &ctx.mask)
        .expect("workspace sized for this code");
    let bit_errors = ctx
        .mask
        .info()
        .iter()
        .zip(&ws.msg)
        .filter(|(&i, &b)| u_hat[i] != b)
        .count() as u32;
    debug_assert!(bit_errors as usize <= k);
    TrialOutcome {
        frame_error: bit_errors > 0,
        bit_errors,
    }
}

struct Merge {
    pending: BTreeMap<u64, Vec<TrialOutcome>>,
    next_batch: u64,
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
}

/// Runs one Eb/N0 point until the frame-error target or the frame cap.
pub fn run_point(
    spec: &CampaignSpec,
    ctx: &CodeContext,
    ebn0_db: f64,
    workers: usize,
) -> Result<FerStats> {
    spec.validate()?;
    let started = Instant::now();
    let noise = NoiseModel::from_ebn0_db(ebn0_db, ctx.spec.rate())?;
    let key = point_stream_key(ebn0_db);
    let target = spec.target_frame_errors;
    let max_frames = spec.max_frames;
    let total_batches = max_frames.div_ceil(BATCH_FRAMES);

    let next = AtomicU64::new(0);
    let done = AtomicBool::new(false);
    let merge = Mutex::new(Merge {
        pending: BTreeMap::new(),
        next_batch: 0,
        frames: 0,
        frame_errors: 0,
        bit_errors: 0,
    });

    let work = || -> Result<()> {
        let mut ws = TrialWorkspace::new(ctx)?;
        loop {
            if done.load(Ordering::Acquire) {
                return Ok(());
            }
            let batch = next.fetch_add(1, Ordering::Relaxed);
            if batch >= total_batches {
                return Ok(());
            }
            let first = batch * BATCH_FRAMES;
            let last = (first + BATCH_FRAMES).min(max_frames);
            let outcomes: Vec<TrialOutcome> = (first..last)
                .map(|t| run_trial(ctx, &mut ws, &noise, key, t, spec.master_seed))
                .collect();

            let mut m = merge.lock().expect("merge lock poisoned");
            if m.frame_errors >= target {
                return Ok(());
            }
            m.pending.insert(batch, outcomes);
            while let Some(batch_outcomes) = {
                let nb = m.next_batch;
                m.pending.remove(&nb)
            } {
                m.next_batch += 1;
                for o in batch_outcomes {
                    m.frames += 1;
                    m.bit_errors += u64::from(o.bit_errors);
                    if o.frame_error {
                        m.frame_errors += 1;
                        if m.frame_errors >= target {
                            done.store(true, Ordering::Release);
                            m.pending.clear();
                            return Ok(());
                        }
                    }
                }
            }
        }
    };

    let workers = workers.max(1);
    if workers == 1 {
        work()?;
    } else {
        std::thread::scope(|scope| -> Result<()> {
            let handles: Vec<_> = (0..workers).map(|_| scope.spawn(&work)).collect();
            for h in handles {
                h.join().expect("simulation worker panicked")?;
            }
            Ok(())
        })?;
    }

    let m = merge.into_inner().expect("merge lock poisoned");
    Ok(FerStats {
        ebn0_db,
        frames: m.frames,
        frame_errors: m.frame_errors,
        bit_errors: m.bit_errors,
        k_bits: ctx.spec.k_bits,
        is_upper_bound: m.frame_errors < target,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

/// Results of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub spec: CampaignSpec,
    pub points: Vec<FerStats>,
}

/// A campaign that stopped early; `completed` holds the finished points.
#[derive(Debug)]
pub struct CampaignFailure {
    pub completed: Vec<FerStats>,
    pub error: Error,
}

impl std::fmt::Display for CampaignFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (after {} completed points)",
            self.error,
            self.completed.len()
        )
    }
}

impl std::error::Error for CampaignFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs every grid point in order. `on_point` sees each point as it
/// completes (e.g. to stream it to disk); its error aborts the campaign.
pub fn run_campaign<F>(
    spec: &CampaignSpec,
    workers: usize,
    mut on_point: F,
) -> std::result::Result<CampaignResult, CampaignFailure>
where
    F: FnMut(&FerStats) -> Result<()>,
{
    let fail = |completed, error| CampaignFailure { completed, error };
    if let Err(e) = spec.validate() {
        return Err(fail(Vec::new(), e));
    }
    let ctx = CodeContext::build(&spec.code).map_err(|e| fail(Vec::new(), e))?;
    run_campaign_with(spec, &ctx, workers, &mut on_point)
}

/// [`run_campaign`] with a prebuilt code (e.g. a frozen set read from a file).
pub fn run_campaign_with<F>(
    spec: &CampaignSpec,
    ctx: &CodeContext,
    workers: usize,
    mut on_point: F,
) -> std::result::Result<CampaignResult, CampaignFailure>
where
    F: FnMut(&FerStats) -> Result<()>,
{
    let mut points = Vec::with_capacity(spec.ebn0_grid_db.len());
    for &ebn0 in &spec.ebn0_grid_db {
        let stats = match run_point(spec, ctx, ebn0, workers) {
            Ok(s) => s,
            Err(error) => {
                return Err(CampaignFailure {
                    completed: points,
                    error,
                })
            }
        };
        let sink = on_point(&stats);
        points.push(stats);
        if let Err(error) = sink {
            return Err(CampaignFailure {
                completed: points,
                error,
            });
        }
    }
    Ok(CampaignResult {
        spec: spec.clone(),
        points,
    })
}

/// Writes the results CSV header.
pub fn write_csv_header<W: Write>(mut out: W) -> Result<()> {
    writeln!(out, "{RESULTS_CSV_HEADER}")?;
    Ok(())
}

/// Writes one results CSV row.
pub fn write_csv_row<W: Write>(mut out: W, stats: &FerStats) -> Result<()> {
    writeln!(out, "{}", stats.csv_row())?;
    Ok(())
}

#[derive(Serialize)]
struct ResultsDocument<'a, C: Serialize> {
    schema_version: u32,
    toolkit: &'static str,
    toolkit_version: &'static str,
    campaign: &'a CampaignSpec,
    config: &'a C,
    points: Vec<PointRecord<'a>>,
}

#[derive(Serialize)]
struct PointRecord<'a> {
    #[serde(flatten)]
    stats: &'a FerStats,
    fer: f64,
    ber: f64,
}

impl CampaignResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write_csv_header(&mut out)?;
        for p in &self.points {
            write_csv_row(&mut out, p)?;
        }
        Ok(())
    }

    /// JSON mirror of the CSV with campaign metadata. `config` is embedded
    /// verbatim (the caller's effective configuration).
    pub fn to_json<C: Serialize>(&self, config: &C) -> Result<String> {
        let doc = ResultsDocument {
            schema_version: RESULTS_SCHEMA_VERSION,
            toolkit: env!("CARGO_PKG_NAME"),
            toolkit_version: env!("CARGO_PKG_VERSION"),
            campaign: &self.spec,
            config,
            points: self
                .points
                .iter()
                .map(|stats| PointRecord {
                    stats,
                    fer: stats.fer(),
                    ber: stats.ber(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
    }
}
