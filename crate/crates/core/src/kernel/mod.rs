//! Layered stream scheduler.
//!
//! Each tick applies the layers in ascending order. Streams read through a
//! [`ContextView`] restricted to their declared reads and return a [`Writes`]
//! set that the kernel checks (declared, finite, type-stable) and merges
//! under the model's [`WritePolicy`]. Once the last layer has fired the
//! metric hooks are sampled and the tick advances.

mod context;
mod model;
mod trace;

use std::collections::BTreeMap;

use thiserror::Error;

pub use context::{Context, ContextKey, ContextValue};
pub use model::{
    validate_model, ContextView, Diagnostic, DiagnosticKind, EpisodeAggregator, Layer, LayeredModel, MetricHook,
    ReduceOp, StreamSpec, Visibility, WritePolicy, Writes,
};
pub use trace::{EpisodeTrace, StepReduce};

use crate::rng::{rng_substream, RngHandle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("invalid context key {0:?}")]
    InvalidKey(String),
    #[error("stream {stream:?} read {key} which is absent from the context")]
    UnsatisfiedRead { key: ContextKey, stream: String },
    #[error("stream {stream:?} read undeclared key {key}")]
    UndeclaredRead { key: ContextKey, stream: String },
    #[error("stream {stream:?} wrote undeclared key {key}")]
    UndeclaredWrite { key: ContextKey, stream: String },
    #[error("write conflict on {key} between {first:?} and {second:?}")]
    WriteConflict { key: ContextKey, first: String, second: String },
    #[error("stream {stream:?} wrote a non-finite value to {key}")]
    NonFiniteWrite { key: ContextKey, stream: String },
    #[error("metric {key} is not finite")]
    NonFiniteMetric { key: ContextKey },
    #[error("{key}: expected {expected}, found {found}")]
    TypeMismatch {
        key: ContextKey,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{key}: vector length changed from {expected} to {found}")]
    VectorLength { key: ContextKey, expected: usize, found: usize },
    #[error("reduce merge on {key} requires real values")]
    ReduceNonReal { key: ContextKey },
    #[error("initial context is missing {key}")]
    MissingInitialKey { key: ContextKey },
    #[error("model failed validation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Diagnostic>),
    #[error("episode length must be at least 1")]
    ZeroSteps,
    #[error("stream {stream:?} failed: {message}")]
    Step { stream: String, message: String },
    #[error("at tick {tick}: {source}")]
    AtTick {
        tick: u64,
        #[source]
        source: Box<KernelError>,
    },
}

impl KernelError {
    /// Wrap a domain error raised inside a stream step.
    pub fn step(stream: &str, err: impl std::fmt::Display) -> Self {
        KernelError::Step {
            stream: stream.to_string(),
            message: err.to_string(),
        }
    }
}

/// Accumulates the writes of one layer and applies the merge discipline.
struct LayerMerge<'m> {
    policy: WritePolicy,
    pending: BTreeMap<ContextKey, (ContextValue, &'m str)>,
}

impl<'m> LayerMerge<'m> {
    fn new(policy: WritePolicy) -> Self {
        Self {
            policy,
            pending: BTreeMap::new(),
        }
    }

    /// Check and absorb one stream's output. Returns the merged values for
    /// the touched keys.
    fn absorb(&mut self, stream: &'m StreamSpec, writes: Writes) -> Result<Vec<ContextKey>, KernelError> {
        let mut touched = Vec::new();
        for (key, value) in writes.into_inner() {
            if !stream.writes.contains(&key) {
                return Err(KernelError::UndeclaredWrite {
                    key,
                    stream: stream.id.clone(),
                });
            }
            if !value.is_finite() {
                return Err(KernelError::NonFiniteWrite {
                    key,
                    stream: stream.id.clone(),
                });
            }
            match self.pending.get_mut(&key) {
                None => {
                    self.pending.insert(key.clone(), (value, &stream.id));
                }
                Some((current, writer)) => match self.policy {
                    WritePolicy::ErrorOnConflict => {
                        return Err(KernelError::WriteConflict {
                            key,
                            first: writer.to_string(),
                            second: stream.id.clone(),
                        });
                    }
                    WritePolicy::LastWriterWins => {
                        *current = value;
                        *writer = &stream.id;
                    }
                    WritePolicy::Reduce(op) => match (&*current, &value) {
                        (ContextValue::Real(a), ContextValue::Real(b)) => {
                            *current = ContextValue::Real(op.apply(*a, *b));
                            *writer = &stream.id;
                        }
                        _ => return Err(KernelError::ReduceNonReal { key }),
                    },
                },
            }
            touched.push(key);
        }
        Ok(touched)
    }

    fn flush_keys(&self, ctx: &mut Context, keys: &[ContextKey]) -> Result<(), KernelError> {
        for key in keys {
            let (value, _) = &self.pending[key];
            ctx.store(key.clone(), value.clone())?;
        }
        Ok(())
    }

    fn flush_all(self, ctx: &mut Context) -> Result<(), KernelError> {
        for (key, (value, _)) in self.pending {
            ctx.store(key, value)?;
        }
        Ok(())
    }
}

/// Advance the context by one tick.
///
/// `rng` is the episode stream; each stream gets a child derived from its id
/// and the tick, so draws do not depend on registration order.
pub fn run_tick(
    model: &LayeredModel,
    mut ctx: Context,
    rng: &RngHandle,
) -> Result<(Context, BTreeMap<ContextKey, f64>), KernelError> {
    let tick = ctx.tick();
    for layer in &model.layers {
        let mut merge = LayerMerge::new(model.write_policy);
        match layer.visibility {
            Visibility::Snapshot => {
                let mut outputs = Vec::with_capacity(layer.streams.len());
                for stream in &layer.streams {
                    let mut stream_rng = rng.derive(&format!("{}#{tick}", stream.id));
                    let writes = stream.call(&ContextView::new(&ctx, stream), &mut stream_rng)?;
                    outputs.push((stream, writes));
                }
                for (stream, writes) in outputs {
                    merge.absorb(stream, writes)?;
                }
                merge.flush_all(&mut ctx)?;
            }
            Visibility::Sequential => {
                for stream in &layer.streams {
                    let mut stream_rng = rng.derive(&format!("{}#{tick}", stream.id));
                    let writes = stream.call(&ContextView::new(&ctx, stream), &mut stream_rng)?;
                    let touched = merge.absorb(stream, writes)?;
                    merge.flush_keys(&mut ctx, &touched)?;
                }
            }
        }
    }

    let mut metrics = BTreeMap::new();
    for (_, stream) in model.streams() {
        for hook in &stream.metrics {
            let value = hook.emit(&ctx)?;
            if !value.is_finite() {
                return Err(KernelError::NonFiniteMetric { key: hook.key.clone() });
            }
            metrics.insert(hook.key.clone(), value);
        }
    }
    ctx.advance();
    Ok((ctx, metrics))
}

/// Run `steps` ticks from `init` and collect the trace.
pub fn run_episode(model: &LayeredModel, init: &Context, seed: u64, steps: u64) -> Result<EpisodeTrace, KernelError> {
    run_episode_with_state(model, init, seed, steps).map(|(trace, _)| trace)
}

/// As [`run_episode`], also returning the final context.
pub fn run_episode_with_state(
    model: &LayeredModel,
    init: &Context,
    seed: u64,
    steps: u64,
) -> Result<(EpisodeTrace, Context), KernelError> {
    if steps == 0 {
        return Err(KernelError::ZeroSteps);
    }
    let diagnostics = validate_model(model);
    if !diagnostics.is_empty() {
        return Err(KernelError::InvalidModel(diagnostics));
    }
    if let Some(key) = model.provides.iter().find(|k| !init.contains(k)) {
        return Err(KernelError::MissingInitialKey { key: key.clone() });
    }

    let rng = rng_substream(seed, "episode");
    let start_tick = init.tick();
    let mut ctx = init.clone();
    let mut per_step = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let tick = ctx.tick();
        let (next, metrics) = run_tick(model, ctx, &rng).map_err(|e| KernelError::AtTick {
            tick,
            source: Box::new(e),
        })?;
        ctx = next;
        per_step.push(metrics);
    }

    let mut episode_metrics = BTreeMap::new();
    for agg in &model.aggregators {
        let series: Vec<f64> = per_step.iter().map(|row| row[&agg.source]).collect();
        let value = agg.apply(&series);
        if !value.is_finite() {
            return Err(KernelError::NonFiniteMetric {
                key: agg.source.clone(),
            });
        }
        episode_metrics.insert(agg.name.clone(), value);
    }

    let trace = EpisodeTrace {
        seed,
        steps,
        start_tick,
        per_step,
        episode_metrics,
    };
    Ok((trace, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> ContextKey {
        ContextKey::lit(s)
    }

    fn constant(id: &str, key: &str, value: f64) -> StreamSpec {
        let key = k(key);
        let out = key.clone();
        StreamSpec::new(id, move |_, _| Ok(Writes::new().with(&out, value))).writes([&key])
    }

    fn identity_model() -> LayeredModel {
        LayeredModel::new().layer(vec![StreamSpec::new("noop", |_, _| Ok(Writes::new()))])
    }

    #[test]
    fn unsatisfied_read_is_diagnosed() {
        let reader = StreamSpec::new("r", |_, _| Ok(Writes::new())).reads([&k("M.missing")]);
        let diags = validate_model(&LayeredModel::new().layer(vec![reader]));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::UnsatisfiedRead);
        assert_eq!(diags[0].kind.label(), "unsatisfied read");
        assert_eq!(diags[0].stream, "r");
        assert_eq!(diags[0].key, Some(k("M.missing")));
    }

    #[test]
    fn same_layer_write_conflict_is_diagnosed() {
        let model = LayeredModel::new().layer(vec![constant("a", "M.x", 1.0), constant("b", "M.x", 2.0)]);
        let diags = validate_model(&model);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind.label(), "write conflict");
        assert_eq!(diags[0].key, Some(k("M.x")));

        let relaxed = model.write_policy(WritePolicy::LastWriterWins);
        assert!(validate_model(&relaxed).is_empty());
    }

    #[test]
    fn structural_diagnostics() {
        assert_eq!(validate_model(&LayeredModel::new())[0].kind, DiagnosticKind::EmptyModel);
        let empty_layer = LayeredModel::new().layer(vec![]);
        assert_eq!(validate_model(&empty_layer)[0].kind, DiagnosticKind::EmptyLayer);
        let dup = LayeredModel::new()
            .layer(vec![constant("a", "M.x", 1.0)])
            .layer(vec![constant("a", "M.y", 1.0)]);
        assert_eq!(validate_model(&dup)[0].kind, DiagnosticKind::DuplicateStreamId);
        let stateful = LayeredModel::new()
            .layer(vec![StreamSpec::new("s", |_, _| Ok(Writes::new())).stateful_reads([&k("S.prev")])]);
        assert_eq!(validate_model(&stateful)[0].kind, DiagnosticKind::StatefulReadNotProvided);
        assert!(validate_model(&stateful.provides([&k("S.prev")])).is_empty());
    }

    #[test]
    fn sequential_layer_satisfies_same_layer_reads() {
        let reader = StreamSpec::new("r", |_, _| Ok(Writes::new())).reads([&k("M.x")]);
        let snapshot = LayeredModel::new().layer(vec![constant("w", "M.x", 1.0), reader.clone()]);
        assert_eq!(validate_model(&snapshot).len(), 1);
        let sequential = LayeredModel::new().sequential_layer(vec![constant("w", "M.x", 1.0), reader.clone()]);
        assert!(validate_model(&sequential).is_empty());
        // registration order still matters
        let reversed = LayeredModel::new().sequential_layer(vec![reader, constant("w", "M.x", 1.0)]);
        assert_eq!(validate_model(&reversed).len(), 1);
    }

    #[test]
    fn identity_stream_keeps_context_and_advances_tick() {
        let mut ctx = Context::new();
        ctx.insert(k("A.x"), 1.0);
        let (next, metrics) = run_tick(&identity_model(), ctx.clone(), &rng_substream(0, "t")).unwrap();
        assert_eq!(next.real(&k("A.x")), Some(1.0));
        assert_eq!(next.tick(), 1);
        assert!(metrics.is_empty());
    }

    #[test]
    fn reduce_sum_merges_same_layer_writes() {
        let model = LayeredModel::new()
            .layer(vec![constant("a", "S.v", 2.0), constant("b", "S.v", 5.0)])
            .write_policy(WritePolicy::Reduce(ReduceOp::Sum));
        let (ctx, _) = run_tick(&model, Context::new(), &rng_substream(0, "t")).unwrap();
        assert_eq!(ctx.real(&k("S.v")), Some(7.0));
    }

    #[test]
    fn last_writer_wins_takes_highest_registration() {
        let model = LayeredModel::new()
            .layer(vec![constant("a", "S.v", 2.0), constant("b", "S.v", 5.0), constant("c", "S.v", 3.0)])
            .write_policy(WritePolicy::LastWriterWins);
        let (ctx, _) = run_tick(&model, Context::new(), &rng_substream(0, "t")).unwrap();
        assert_eq!(ctx.real(&k("S.v")), Some(3.0));
    }

    #[test]
    fn runtime_conflict_under_error_policy() {
        let model = LayeredModel::new().layer(vec![constant("a", "S.v", 2.0), constant("b", "S.v", 5.0)]);
        let err = run_tick(&model, Context::new(), &rng_substream(0, "t")).unwrap_err();
        assert_eq!(
            err,
            KernelError::WriteConflict {
                key: k("S.v"),
                first: "a".into(),
                second: "b".into()
            }
        );
    }

    #[test]
    fn two_layer_pipeline() {
        // L1 emits SIG.s = 3, L2 doubles it into ACT.a.
        let sig = k("SIG.s");
        let act = k("ACT.a");
        let (s2, a2) = (sig.clone(), act.clone());
        let doubler = StreamSpec::new("act", move |view, _| Ok(Writes::new().with(&a2, 2.0 * view.real(&s2)?)))
            .reads([&sig])
            .writes([&act])
            .metric(MetricHook::written(act.clone()));
        let model = LayeredModel::new().layer(vec![constant("sig", "SIG.s", 3.0)]).layer(vec![doubler]);
        assert!(validate_model(&model).is_empty());
        let (ctx, metrics) = run_tick(&model, Context::new(), &rng_substream(0, "t")).unwrap();
        assert_eq!(ctx.real(&act), Some(6.0));
        assert_eq!(metrics[&act], 6.0);
    }

    #[test]
    fn non_finite_write_is_rejected() {
        for bad in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            let model = LayeredModel::new().layer(vec![constant("faulty", "F.x", bad)]);
            let err = run_tick(&model, Context::new(), &rng_substream(0, "t")).unwrap_err();
            assert_eq!(
                err,
                KernelError::NonFiniteWrite {
                    key: k("F.x"),
                    stream: "faulty".into()
                }
            );
        }
        let vec_key = k("F.v");
        let out = vec_key.clone();
        let model = LayeredModel::new().layer(vec![StreamSpec::new("v", move |_, _| {
            Ok(Writes::new().with(&out, vec![1.0, f64::NAN]))
        })
        .writes([&vec_key])]);
        assert!(matches!(
            run_tick(&model, Context::new(), &rng_substream(0, "t")),
            Err(KernelError::NonFiniteWrite { .. })
        ));
    }

    #[test]
    fn undeclared_access_is_rejected() {
        let key = k("U.x");
        let out = key.clone();
        let writer = StreamSpec::new("w", move |_, _| Ok(Writes::new().with(&out, 1.0)));
        let err = run_tick(&LayeredModel::new().layer(vec![writer]), Context::new(), &rng_substream(0, "t")).unwrap_err();
        assert!(matches!(err, KernelError::UndeclaredWrite { .. }));

        let probe = key.clone();
        let reader = StreamSpec::new("r", move |view, _| view.real(&probe).map(|_| Writes::new()));
        let mut ctx = Context::new();
        ctx.insert(key, 1.0);
        let err = run_tick(&LayeredModel::new().layer(vec![reader]), ctx, &rng_substream(0, "t")).unwrap_err();
        assert!(matches!(err, KernelError::UndeclaredRead { .. }));
    }

    #[test]
    fn episode_basics() {
        let trace = run_episode(&identity_model(), &Context::new(), 3, 1).unwrap();
        assert_eq!(trace.per_step.len(), 1);
        assert_eq!(run_episode(&identity_model(), &Context::new(), 3, 0), Err(KernelError::ZeroSteps));
    }

    #[test]
    fn episode_errors_carry_tick() {
        let key = k("C.n");
        let (r, w) = (key.clone(), key.clone());
        let counter = StreamSpec::new("count", move |view, _| {
            let n = view.real(&r)?;
            let next = if n >= 2.0 { f64::NAN } else { n + 1.0 };
            Ok(Writes::new().with(&w, next))
        })
        .stateful_reads([&key])
        .writes([&key]);
        let model = LayeredModel::new().layer(vec![counter]).provides([&key]);
        let mut init = Context::new();
        init.insert(key.clone(), 0.0);
        match run_episode(&model, &init, 1, 10) {
            Err(KernelError::AtTick { tick, source }) => {
                assert_eq!(tick, 2);
                assert!(matches!(*source, KernelError::NonFiniteWrite { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            run_episode(&model, &Context::new(), 1, 1),
            Err(KernelError::MissingInitialKey { .. })
        ));
    }

    #[test]
    fn episode_aggregators_reduce_series() {
        let key = k("C.n");
        let (r, w) = (key.clone(), key.clone());
        let counter = StreamSpec::new("count", move |view, _| Ok(Writes::new().with(&w, view.real(&r)? + 1.0)))
            .stateful_reads([&key])
            .writes([&key])
            .metric(MetricHook::written(key.clone()));
        let model = LayeredModel::new()
            .layer(vec![counter])
            .provides([&key])
            .aggregator(EpisodeAggregator::new("mean", key.clone(), StepReduce::Mean))
            .aggregator(EpisodeAggregator::new("last", key.clone(), StepReduce::Last))
            .aggregator(EpisodeAggregator::custom("range", key.clone(), |s| s[s.len() - 1] - s[0]));
        let mut init = Context::new();
        init.insert(key, 0.0);
        let trace = run_episode(&model, &init, 0, 4).unwrap();
        assert_eq!(trace.episode_metrics["mean"], 2.5);
        assert_eq!(trace.episode_metrics["last"], 4.0);
        assert_eq!(trace.episode_metrics["range"], 3.0);
    }
}
