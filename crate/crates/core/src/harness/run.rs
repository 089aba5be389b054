//! Monte Carlo driver.
//!
//! For each feature length: build the source, then for each replication draw
//! a training set (`t` vectors per label) and `tests_per_label` test vectors
//! per label, classify every test vector with every enabled classifier and
//! count errors. Errors are pooled over replications; NED rows additionally
//! carry the error bounds (the data-dependent one per replication, the other
//! two per source).

use rand::Rng;

use super::config::{ExperimentConfig, Family, Regeneration};
use super::exec::{map_indexed, with_thread_cap};
use super::results::ResultRow;
use super::streams::{substream, Role};
use crate::bounds::{bound_appendix, bound_corollary1, bound_theorem1, epsilon_theorem1};
use crate::classifier::{ClassifierKind, ClassifierSpec};
use crate::datagen::{gen_iid_model, gen_nonoverlapping_model, gen_overlapping_model, sample_training, sample_vector};
use crate::error::{Error, Result};
use crate::model::SourceModel;

#[derive(Debug, Clone, PartialEq)]
struct RepOutcome {
    errors: Vec<u64>,
    thm1: Option<f64>,
    // per-replication source bounds, only with Regeneration::PerRep
    source_bounds: Option<(f64, f64)>,
}

enum Source {
    Fixed(SourceModel),
    PerRep,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    with_thread_cap(cfg.execution, || {
        if cfg.family == Family::FromFile {
            let path = cfg.model_path.as_ref().expect("validated");
            let model = SourceModel::load(path)?;
            if !cfg.n_grid.is_empty() && cfg.n_grid != [model.n()] {
                return Err(Error::InvalidConfig(format!(
                    "n_grid {:?} does not match the model length {}",
                    cfg.n_grid,
                    model.n()
                )));
            }
            return run_model(&model, cfg);
        }
        let mut rows = Vec::new();
        for &n in &cfg.n_grid {
            let source = match (cfg.family, cfg.iid_regeneration) {
                (Family::Overlap, _) => Source::Fixed(gen_overlapping_model(n)?),
                (Family::Nonoverlap, _) => Source::Fixed(gen_nonoverlapping_model(n)?),
                (Family::Iid, Regeneration::Once) => {
                    Source::Fixed(iid_model(cfg, n, &mut substream(cfg.seed, 0, 0, Role::Model))?)
                }
                (Family::Iid, Regeneration::PerN) => {
                    Source::Fixed(iid_model(cfg, n, &mut substream(cfg.seed, n, 0, Role::Model))?)
                }
                (Family::Iid, Regeneration::PerRep) => Source::PerRep,
                (Family::FromFile, _) => unreachable!(),
            };
            rows.extend(run_source(&source, n, cfg)?);
        }
        Ok(rows)
    })
}

/// Runs the configured protocol on a given source (ignores `family`, `n_grid`
/// and the i.i.d. generator settings).
pub fn run_model(model: &SourceModel, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let cfg = ExperimentConfig {
        family: Family::FromFile,
        n_grid: vec![model.n()],
        ..cfg.clone()
    };
    cfg.validate_protocol()?;
    run_source(&Source::Fixed(model.clone()), model.n(), &cfg)
}

fn iid_model<R: Rng + ?Sized>(cfg: &ExperimentConfig, n: usize, rng: &mut R) -> Result<SourceModel> {
    gen_iid_model(cfg.alphabet_size, cfg.num_labels, n, rng)
}

fn source_bounds(model: &SourceModel, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    Ok((
        bound_corollary1(model, cfg.r, model.n())?.bound,
        bound_appendix(model, cfg.r, model.n(), cfg.t)?.bound,
    ))
}

fn run_source(source: &Source, n: usize, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let specs: Vec<ClassifierSpec> = cfg.classifiers.iter().map(|&k| cfg.spec(k)).collect();
    let with_bounds = cfg.classifiers.contains(&ClassifierKind::Ned);

    let outcomes = map_indexed(cfg.reps, cfg.execution, |rep| {
        let generated;
        let model = match source {
            Source::Fixed(m) => m,
            Source::PerRep => {
                generated = iid_model(cfg, n, &mut substream(cfg.seed, n, rep as u64, Role::Model))?;
                &generated
            }
        };
        replicate(
            model,
            &specs,
            cfg,
            n,
            rep as u64,
            with_bounds,
            matches!(source, Source::PerRep),
        )
    })
    .into_iter()
    .collect::<Result<Vec<RepOutcome>>>()?;

    let (cor1, appendix) = match source {
        _ if !with_bounds => (None, None),
        Source::Fixed(m) => {
            let (c, a) = source_bounds(m, cfg)?;
            (Some(c), Some(a))
        }
        Source::PerRep => {
            let k = outcomes.len() as f64;
            let (c, a) = outcomes
                .iter()
                .filter_map(|o| o.source_bounds)
                .fold((0.0, 0.0), |(c, a), (oc, oa)| (c + oc, a + oa));
            (Some(c / k), Some(a / k))
        }
    };

    let num_labels = match source {
        Source::Fixed(m) => m.num_labels(),
        Source::PerRep => cfg.num_labels,
    };
    let trials = (cfg.reps * cfg.tests_per_label * num_labels) as f64;

    Ok(cfg
        .classifiers
        .iter()
        .enumerate()
        .map(|(c, &kind)| {
            let errors: u64 = outcomes.iter().map(|o| o.errors[c]).sum();
            let p = errors as f64 / trials;
            let bounds = kind == ClassifierKind::Ned;
            let thm: Vec<f64> = if bounds {
                outcomes.iter().filter_map(|o| o.thm1).collect()
            } else {
                vec![]
            };
            let mean = (!thm.is_empty()).then(|| thm.iter().sum::<f64>() / thm.len() as f64);
            ResultRow {
                family: cfg.family.as_str().to_string(),
                n,
                t: cfg.t,
                r: cfg.r,
                classifier: kind.as_str().to_string(),
                error_estimate: p,
                stderr: (p * (1.0 - p) / trials).sqrt(),
                bound_thm1_mean: mean,
                bound_thm1_min: (!thm.is_empty()).then(|| thm.iter().copied().fold(f64::INFINITY, f64::min)),
                bound_thm1_max: (!thm.is_empty()).then(|| thm.iter().copied().fold(0.0, f64::max)),
                bound_cor1: cor1.filter(|_| bounds),
                bound_appendix: appendix.filter(|_| bounds),
                reps: cfg.reps,
                tests_per_label: cfg.tests_per_label,
                seed: cfg.seed,
                bound_thm1_clamped: mean.map(|m| m.min(1.0)),
            }
        })
        .collect())
}

fn replicate(
    model: &SourceModel,
    specs: &[ClassifierSpec],
    cfg: &ExperimentConfig,
    n: usize,
    rep: u64,
    with_bounds: bool,
    per_rep_source: bool,
) -> Result<RepOutcome> {
    let ts = sample_training(model, cfg.t, &mut substream(cfg.seed, n, rep, Role::Training))?;
    let trained = specs.iter().map(|s| s.fit(&ts)).collect::<Result<Vec<_>>>()?;
    let mut ties: Vec<_> = specs
        .iter()
        .map(|s| substream(cfg.seed, n, rep, Role::tie_break(s.kind)))
        .collect();
    let mut tests = substream(cfg.seed, n, rep, Role::Tests);

    let mut errors = vec![0u64; specs.len()];
    for x in 0..model.num_labels() {
        for _ in 0..cfg.tests_per_label {
            let v = sample_vector(model, x, &mut tests)?;
            for (c, clf) in trained.iter().enumerate() {
                if clf.classify(&v, &mut ties[c])? != x {
                    errors[c] += 1;
                }
            }
        }
    }

    let thm1 = if with_bounds {
        let eps = epsilon_theorem1(model, &ts, cfg.r)?;
        Some(bound_theorem1(eps, model.n(), cfg.t, model.alphabet_size()))
    } else {
        None
    };
    let source_bounds = if with_bounds && per_rep_source {
        Some(source_bounds(model, cfg)?)
    } else {
        None
    };
    Ok(RepOutcome {
        errors,
        thm1,
        source_bounds,
    })
}
