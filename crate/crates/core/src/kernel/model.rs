use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::context::{Context, ContextKey, ContextValue};
use super::trace::StepReduce;
use super::KernelError;
use crate::rng::RngHandle;

/// Output of one stream step. Setting a key twice keeps the last value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Writes(Vec<(ContextKey, ContextValue)>);

impl Writes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &ContextKey, value: impl Into<ContextValue>) -> &mut Self {
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key.clone(), value)),
        }
        self
    }

    pub fn with(mut self, key: &ContextKey, value: impl Into<ContextValue>) -> Self {
        self.set(key, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ContextKey, ContextValue)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn into_inner(self) -> Vec<(ContextKey, ContextValue)> {
        self.0
    }
}

/// Read-only window onto the context handed to a stream step. Only keys the
/// stream declared as reads are visible.
pub struct ContextView<'a> {
    ctx: &'a Context,
    stream: &'a StreamSpec,
}

impl<'a> ContextView<'a> {
    pub(crate) fn new(ctx: &'a Context, stream: &'a StreamSpec) -> Self {
        Self { ctx, stream }
    }

    pub fn tick(&self) -> u64 {
        self.ctx.tick()
    }

    pub fn get(&self, key: &ContextKey) -> Result<&'a ContextValue, KernelError> {
        if !self.stream.reads.contains(key) && !self.stream.stateful_reads.contains(key) {
            return Err(KernelError::UndeclaredRead {
                key: key.clone(),
                stream: self.stream.id.clone(),
            });
        }
        self.ctx.get(key).ok_or_else(|| KernelError::UnsatisfiedRead {
            key: key.clone(),
            stream: self.stream.id.clone(),
        })
    }

    fn mismatch(&self, key: &ContextKey, expected: &'static str, found: &ContextValue) -> KernelError {
        KernelError::TypeMismatch {
            key: key.clone(),
            expected,
            found: found.kind(),
        }
    }

    pub fn real(&self, key: &ContextKey) -> Result<f64, KernelError> {
        match self.get(key)? {
            ContextValue::Real(x) => Ok(*x),
            other => Err(self.mismatch(key, "real", other)),
        }
    }

    pub fn int(&self, key: &ContextKey) -> Result<i64, KernelError> {
        match self.get(key)? {
            ContextValue::Int(x) => Ok(*x),
            other => Err(self.mismatch(key, "int", other)),
        }
    }

    pub fn flag(&self, key: &ContextKey) -> Result<bool, KernelError> {
        match self.get(key)? {
            ContextValue::Bool(x) => Ok(*x),
            other => Err(self.mismatch(key, "bool", other)),
        }
    }

    pub fn text(&self, key: &ContextKey) -> Result<&'a str, KernelError> {
        match self.get(key)? {
            ContextValue::Text(x) => Ok(x),
            other => Err(self.mismatch(key, "text", other)),
        }
    }

    pub fn vector(&self, key: &ContextKey) -> Result<&'a [f64], KernelError> {
        match self.get(key)? {
            ContextValue::Vector(x) => Ok(x),
            other => Err(self.mismatch(key, "vector", other)),
        }
    }
}

pub type StepFn = dyn Fn(&ContextView<'_>, &mut RngHandle) -> Result<Writes, KernelError> + Send + Sync;
pub type DerivedMetricFn = dyn Fn(&Context) -> Result<f64, KernelError> + Send + Sync;
pub type SeriesFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Per-step scalar emitted into the episode trace after the last layer fires.
#[derive(Clone)]
pub struct MetricHook {
    pub key: ContextKey,
    source: MetricSource,
}

#[derive(Clone)]
enum MetricSource {
    /// Record the stream's own written value (real, int or bool).
    Written,
    Derived(Arc<DerivedMetricFn>),
}

impl MetricHook {
    /// Record the value the stream wrote under `key`.
    pub fn written(key: ContextKey) -> Self {
        Self {
            key,
            source: MetricSource::Written,
        }
    }

    /// Compute a scalar from the end-of-tick context.
    pub fn derived<F>(key: ContextKey, f: F) -> Self
    where
        F: Fn(&Context) -> Result<f64, KernelError> + Send + Sync + 'static,
    {
        Self {
            key,
            source: MetricSource::Derived(Arc::new(f)),
        }
    }

    pub(crate) fn emit(&self, ctx: &Context) -> Result<f64, KernelError> {
        match &self.source {
            MetricSource::Written => {
                let value = ctx.get(&self.key).ok_or_else(|| KernelError::UnsatisfiedRead {
                    key: self.key.clone(),
                    stream: "<metric>".into(),
                })?;
                value.as_scalar().ok_or_else(|| KernelError::TypeMismatch {
                    key: self.key.clone(),
                    expected: "scalar",
                    found: value.kind(),
                })
            }
            MetricSource::Derived(f) => f(ctx),
        }
    }

    fn is_written(&self) -> bool {
        matches!(self.source, MetricSource::Written)
    }
}

impl fmt::Debug for MetricHook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_written() { "written" } else { "derived" };
        write!(f, "MetricHook({}, {kind})", self.key)
    }
}

/// A minimal process: declared reads and writes plus a step function.
#[derive(Clone)]
pub struct StreamSpec {
    pub id: String,
    pub reads: BTreeSet<ContextKey>,
    /// Keys read from the previous tick's state; they must be seeded in the
    /// initial context.
    pub stateful_reads: BTreeSet<ContextKey>,
    pub writes: BTreeSet<ContextKey>,
    pub metrics: Vec<MetricHook>,
    step: Arc<StepFn>,
}

impl StreamSpec {
    pub fn new<F>(id: impl Into<String>, step: F) -> Self
    where
        F: Fn(&ContextView<'_>, &mut RngHandle) -> Result<Writes, KernelError> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            reads: BTreeSet::new(),
            stateful_reads: BTreeSet::new(),
            writes: BTreeSet::new(),
            metrics: Vec::new(),
            step: Arc::new(step),
        }
    }

    pub fn reads<'k>(mut self, keys: impl IntoIterator<Item = &'k ContextKey>) -> Self {
        self.reads.extend(keys.into_iter().cloned());
        self
    }

    pub fn stateful_reads<'k>(mut self, keys: impl IntoIterator<Item = &'k ContextKey>) -> Self {
        self.stateful_reads.extend(keys.into_iter().cloned());
        self
    }

    pub fn writes<'k>(mut self, keys: impl IntoIterator<Item = &'k ContextKey>) -> Self {
        self.writes.extend(keys.into_iter().cloned());
        self
    }

    pub fn metric(mut self, hook: MetricHook) -> Self {
        self.metrics.push(hook);
        self
    }

    pub(crate) fn call(&self, view: &ContextView<'_>, rng: &mut RngHandle) -> Result<Writes, KernelError> {
        (self.step)(view, rng)
    }
}

impl fmt::Debug for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamSpec")
            .field("id", &self.id)
            .field("reads", &self.reads)
            .field("stateful_reads", &self.stateful_reads)
            .field("writes", &self.writes)
            .field("metrics", &self.metrics)
            .finish()
    }
}

/// How writes from streams in the same layer and tick are merged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WritePolicy {
    #[default]
    ErrorOnConflict,
    LastWriterWins,
    Reduce(ReduceOp),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceOp {
    Sum,
    Min,
    Max,
}

impl ReduceOp {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ReduceOp::Sum => a + b,
            ReduceOp::Min => a.min(b),
            ReduceOp::Max => a.max(b),
        }
    }
}

/// What a stream sees of its own layer.
///
/// `Snapshot` (the default): every stream reads the layer-entry context and
/// all writes are merged after the last stream of the layer. `Sequential`:
/// each stream's writes are merged as soon as it returns, so later streams in
/// the same layer observe them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    #[default]
    Snapshot,
    Sequential,
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub streams: Vec<StreamSpec>,
    pub visibility: Visibility,
}

/// Summary statistic computed over one metric's per-step series.
#[derive(Clone)]
pub struct EpisodeAggregator {
    pub name: String,
    pub source: ContextKey,
    reduce: AggregateFn,
}

#[derive(Clone)]
enum AggregateFn {
    Builtin(StepReduce),
    Custom(Arc<SeriesFn>),
}

impl EpisodeAggregator {
    pub fn new(name: impl Into<String>, source: ContextKey, reduce: StepReduce) -> Self {
        Self {
            name: name.into(),
            source,
            reduce: AggregateFn::Builtin(reduce),
        }
    }

    pub fn custom<F>(name: impl Into<String>, source: ContextKey, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            source,
            reduce: AggregateFn::Custom(Arc::new(f)),
        }
    }

    pub(crate) fn apply(&self, series: &[f64]) -> f64 {
        match &self.reduce {
            AggregateFn::Builtin(r) => r.apply(series),
            AggregateFn::Custom(f) => f(series),
        }
    }
}

impl fmt::Debug for EpisodeAggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reduce = match &self.reduce {
            AggregateFn::Builtin(r) => format!("{r:?}"),
            AggregateFn::Custom(_) => "custom".to_string(),
        };
        write!(f, "EpisodeAggregator({} <- {} {reduce})", self.name, self.source)
    }
}

/// Ordered layers of streams plus the merge discipline and the keys the
/// initial context must provide.
#[derive(Clone, Debug, Default)]
pub struct LayeredModel {
    pub layers: Vec<Layer>,
    pub write_policy: WritePolicy,
    pub provides: BTreeSet<ContextKey>,
    pub aggregators: Vec<EpisodeAggregator>,
}

impl LayeredModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn layer(mut self, streams: Vec<StreamSpec>) -> Self {
        self.layers.push(Layer {
            streams,
            visibility: Visibility::Snapshot,
        });
        self
    }

    pub fn sequential_layer(mut self, streams: Vec<StreamSpec>) -> Self {
        self.layers.push(Layer {
            streams,
            visibility: Visibility::Sequential,
        });
        self
    }

    pub fn write_policy(mut self, policy: WritePolicy) -> Self {
        self.write_policy = policy;
        self
    }

    pub fn provides<'k>(mut self, keys: impl IntoIterator<Item = &'k ContextKey>) -> Self {
        self.provides.extend(keys.into_iter().cloned());
        self
    }

    pub fn aggregator(mut self, agg: EpisodeAggregator) -> Self {
        self.aggregators.push(agg);
        self
    }

    pub fn streams(&self) -> impl Iterator<Item = (usize, &StreamSpec)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(k, layer)| layer.streams.iter().map(move |s| (k + 1, s)))
    }

    pub fn stream_count(&self) -> usize {
        self.layers.iter().map(|l| l.streams.len()).sum()
    }

    pub fn metric_keys(&self) -> Vec<ContextKey> {
        self.streams()
            .flat_map(|(_, s)| s.metrics.iter().map(|m| m.key.clone()))
            .collect()
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_model(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    EmptyModel,
    EmptyLayer,
    DuplicateStreamId,
    WriteConflict,
    UnsatisfiedRead,
    StatefulReadNotProvided,
    DuplicateMetric,
    MetricNotWritten,
    UnknownAggregatorSource,
}

impl DiagnosticKind {
    pub fn label(self) -> &'static str {
        match self {
            DiagnosticKind::EmptyModel => "empty model",
            DiagnosticKind::EmptyLayer => "empty layer",
            DiagnosticKind::DuplicateStreamId => "duplicate stream id",
            DiagnosticKind::WriteConflict => "write conflict",
            DiagnosticKind::UnsatisfiedRead => "unsatisfied read",
            DiagnosticKind::StatefulReadNotProvided => "stateful read not in initial context",
            DiagnosticKind::DuplicateMetric => "duplicate metric key",
            DiagnosticKind::MetricNotWritten => "metric key not written by stream",
            DiagnosticKind::UnknownAggregatorSource => "aggregator source is not a metric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// 1-based layer index, 0 for model-level findings.
    pub layer: usize,
    pub stream: String,
    pub key: Option<ContextKey>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (layer {}, stream {:?}", self.kind.label(), self.layer, self.stream)?;
        if let Some(key) = &self.key {
            write!(f, ", key {key}")?;
        }
        write!(f, ")")
    }
}

/// Static checks on a model. An empty result means the model can run.
pub fn validate_model(model: &LayeredModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let diag = |kind, layer, stream: &str, key: Option<&ContextKey>| Diagnostic {
        kind,
        layer,
        stream: stream.to_string(),
        key: key.cloned(),
    };

    if model.layers.is_empty() {
        out.push(diag(DiagnosticKind::EmptyModel, 0, "", None));
        return out;
    }

    let mut seen_ids = BTreeSet::new();
    let mut seen_metrics = BTreeSet::new();
    // keys written by any layer strictly before the current one
    let mut upstream: BTreeSet<&ContextKey> = BTreeSet::new();

    for (k, layer) in model.layers.iter().enumerate() {
        let k = k + 1;
        if layer.streams.is_empty() {
            out.push(diag(DiagnosticKind::EmptyLayer, k, "", None));
        }
        let mut layer_writers: BTreeMap<&ContextKey, &str> = BTreeMap::new();
        let mut earlier_in_layer: BTreeSet<&ContextKey> = BTreeSet::new();

        for stream in &layer.streams {
            if !seen_ids.insert(stream.id.as_str()) {
                out.push(diag(DiagnosticKind::DuplicateStreamId, k, &stream.id, None));
            }
            for key in &stream.reads {
                let same_layer = layer.visibility == Visibility::Sequential && earlier_in_layer.contains(key);
                if !upstream.contains(key) && !same_layer && !model.provides.contains(key) {
                    out.push(diag(DiagnosticKind::UnsatisfiedRead, k, &stream.id, Some(key)));
                }
            }
            for key in &stream.stateful_reads {
                if !model.provides.contains(key) {
                    out.push(diag(DiagnosticKind::StatefulReadNotProvided, k, &stream.id, Some(key)));
                }
            }
            for key in &stream.writes {
                if let Some(_first) = layer_writers.insert(key, &stream.id) {
                    if model.write_policy == WritePolicy::ErrorOnConflict {
                        out.push(diag(DiagnosticKind::WriteConflict, k, &stream.id, Some(key)));
                    }
                }
            }
            for hook in &stream.metrics {
                if !seen_metrics.insert(hook.key.clone()) {
                    out.push(diag(DiagnosticKind::DuplicateMetric, k, &stream.id, Some(&hook.key)));
                }
                if hook.is_written() && !stream.writes.contains(&hook.key) {
                    out.push(diag(DiagnosticKind::MetricNotWritten, k, &stream.id, Some(&hook.key)));
                }
            }
            earlier_in_layer.extend(stream.writes.iter());
        }
        upstream.extend(layer_writers.into_keys());
    }

    for agg in &model.aggregators {
        if !seen_metrics.contains(&agg.source) {
            out.push(diag(DiagnosticKind::UnknownAggregatorSource, 0, &agg.name, Some(&agg.source)));
        }
    }
    out
}
