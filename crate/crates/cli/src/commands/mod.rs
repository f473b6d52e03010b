//! Subcommand implementations and the shared manifest-driven pipeline.

use rayon::prelude::*;
use traitfuse::backends::{load_manifest, DatasetManifest, Strictness};
use traitfuse::{AdjustmentTrace, Decision, FusionParams, Mode};

use crate::error::CliError;
use crate::RunConfig;

pub mod classify;
pub mod compare;
pub mod evaluate;
pub mod fit_ensemble;
pub mod synth;

/// Images decided per parallel batch. Results are emitted between batches,
/// in manifest order.
const BATCH: usize = 256;

pub struct ImageOutcome {
    pub image_id: String,
    pub results: Vec<(Mode, Decision, Vec<AdjustmentTrace>)>,
}

/// A loaded manifest with the effective parameters and a worker pool.
pub struct Pipeline {
    pub manifest: DatasetManifest,
    pub params: FusionParams,
    modes: &'static [Mode],
    strictness: Strictness,
    pool: rayon::ThreadPool,
}

impl Pipeline {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let strictness = cfg.strictness();
        let mut manifest = load_manifest(&cfg.manifest_path, strictness).map_err(CliError::data)?;
        let params = cfg.overrides.apply(manifest.params)?;
        manifest.params = params;
        for (id, reason) in &manifest.skipped {
            log::info!("skipping {id}: {reason}");
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.worker_count)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Self {
            manifest,
            params,
            modes: cfg.mode.modes(),
            strictness,
            pool,
        })
    }

    pub fn modes(&self) -> &'static [Mode] {
        self.modes
    }

    /// Decides every entry and hands the outcomes to `sink` in manifest order.
    pub fn run(&self, mut sink: impl FnMut(ImageOutcome) -> Result<(), CliError>) -> Result<(), CliError> {
        let n = self.manifest.entries.len();
        for start in (0..n).step_by(BATCH) {
            let end = (start + BATCH).min(n);
            let batch: Vec<Result<ImageOutcome, CliError>> = self
                .pool
                .install(|| (start..end).into_par_iter().map(|i| self.decide(i)).collect());
            for outcome in batch {
                sink(outcome?)?;
            }
        }
        Ok(())
    }

    fn decide(&self, index: usize) -> Result<ImageOutcome, CliError> {
        let id = &self.manifest.entries[index].image_id;
        let ann = self
            .manifest
            .load_entry(index, self.strictness)
            .map_err(|e| CliError::image(id, e))?;
        let results = self
            .modes
            .iter()
            .map(|&mode| {
                ann.decide(mode, &self.params)
                    .map(|(d, t)| (mode, d, t))
                    .map_err(|e| CliError::image(id, e))
            })
            .collect::<Result<_, _>>()?;
        Ok(ImageOutcome {
            image_id: ann.image_id,
            results,
        })
    }
}
