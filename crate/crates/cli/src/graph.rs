//! Machine-readable layered DAG of a model and its block diagram.

use serde::{Deserialize, Serialize};
use strata_core::kernel::{ContextKey, LayeredModel, Visibility};

use crate::svg::{esc, Svg};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamNode {
    pub id: String,
    pub layer: usize,
    pub reads: Vec<String>,
    pub stateful_reads: Vec<String>,
    pub writes: Vec<String>,
    pub metrics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerNode {
    pub index: usize,
    pub visibility: String,
    pub streams: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// The reader sees the value written earlier in the same tick.
    SameTick,
    /// The reader sees the value from the previous tick.
    PreviousTick,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub key: String,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelGraph {
    pub layers: Vec<LayerNode>,
    pub streams: Vec<StreamNode>,
    pub edges: Vec<Edge>,
    /// Keys supplied by the initial context.
    pub provides: Vec<String>,
}

fn names<'a>(keys: impl IntoIterator<Item = &'a ContextKey>) -> Vec<String> {
    keys.into_iter().map(|k| k.to_string()).collect()
}

pub fn model_graph(model: &LayeredModel) -> ModelGraph {
    let mut layers = Vec::new();
    let mut streams = Vec::new();
    // (layer, position, stream id, writes)
    let mut writers: Vec<(usize, usize, &str, &std::collections::BTreeSet<ContextKey>)> = Vec::new();
    for (k, layer) in model.layers.iter().enumerate() {
        layers.push(LayerNode {
            index: k + 1,
            visibility: match layer.visibility {
                Visibility::Snapshot => "snapshot",
                Visibility::Sequential => "sequential",
            }
            .to_string(),
            streams: layer.streams.iter().map(|s| s.id.clone()).collect(),
        });
        for (j, s) in layer.streams.iter().enumerate() {
            streams.push(StreamNode {
                id: s.id.clone(),
                layer: k + 1,
                reads: names(&s.reads),
                stateful_reads: names(&s.stateful_reads),
                writes: names(&s.writes),
                metrics: s.metrics.iter().map(|m| m.key.to_string()).collect(),
            });
            writers.push((k, j, &s.id, &s.writes));
        }
    }

    let mut edges = Vec::new();
    for (k, layer) in model.layers.iter().enumerate() {
        let sequential = layer.visibility == Visibility::Sequential;
        for (j, s) in layer.streams.iter().enumerate() {
            for key in &s.reads {
                // latest writer visible to this stream within the tick
                let source = writers
                    .iter()
                    .filter(|(wk, wj, _, w)| w.contains(key) && (*wk < k || (sequential && *wk == k && *wj < j)))
                    .max_by_key(|(wk, wj, _, _)| (*wk, *wj));
                if let Some((_, _, from, _)) = source {
                    edges.push(Edge {
                        from: from.to_string(),
                        to: s.id.clone(),
                        key: key.to_string(),
                        kind: EdgeKind::SameTick,
                    });
                }
            }
            for key in &s.stateful_reads {
                for (_, _, from, _) in writers.iter().filter(|(_, _, _, w)| w.contains(key)) {
                    edges.push(Edge {
                        from: from.to_string(),
                        to: s.id.clone(),
                        key: key.to_string(),
                        kind: EdgeKind::PreviousTick,
                    });
                }
            }
        }
    }
    ModelGraph {
        layers,
        streams,
        edges,
        provides: names(&model.provides),
    }
}

const BOX_W: f64 = 190.0;
const BOX_H: f64 = 54.0;
const COL_GAP: f64 = 110.0;
const ROW_GAP: f64 = 36.0;
const MARGIN: f64 = 40.0;

/// Columns per layer, one box per stream, one arrow per dependency edge.
pub fn graph_svg(graph: &ModelGraph) -> String {
    let rows = graph.layers.iter().map(|l| l.streams.len()).max().unwrap_or(1).max(1) as f64;
    let cols = graph.layers.len().max(1) as f64;
    let width = 2.0 * MARGIN + cols * BOX_W + (cols - 1.0) * COL_GAP;
    let height = 2.0 * MARGIN + 30.0 + rows * BOX_H + (rows - 1.0) * ROW_GAP;
    let mut svg = Svg::new(width, height);
    svg.raw(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>"##,
    );

    let pos = |id: &str| -> Option<(f64, f64)> {
        graph.layers.iter().enumerate().find_map(|(c, l)| {
            l.streams.iter().position(|s| s == id).map(|r| {
                (
                    MARGIN + c as f64 * (BOX_W + COL_GAP),
                    MARGIN + 30.0 + r as f64 * (BOX_H + ROW_GAP),
                )
            })
        })
    };

    for (c, layer) in graph.layers.iter().enumerate() {
        let x = MARGIN + c as f64 * (BOX_W + COL_GAP);
        svg.text(
            x + BOX_W / 2.0,
            MARGIN + 10.0,
            &format!("L{} ({})", layer.index, layer.visibility),
            "middle",
            "layer-label",
        );
    }

    for e in &graph.edges {
        let (Some((x0, y0)), Some((x1, y1))) = (pos(&e.from), pos(&e.to)) else {
            continue;
        };
        let (ax, ay, bx, by) = if x0 < x1 {
            (x0 + BOX_W, y0 + BOX_H / 2.0, x1, y1 + BOX_H / 2.0)
        } else if x0 > x1 {
            (x0, y0 + BOX_H / 2.0, x1 + BOX_W, y1 + BOX_H / 2.0)
        } else if y0 < y1 {
            (x0 + BOX_W / 2.0, y0 + BOX_H, x1 + BOX_W / 2.0, y1)
        } else if y0 > y1 {
            (x0 + BOX_W * 0.75, y0, x1 + BOX_W * 0.75, y1 + BOX_H)
        } else {
            continue;
        };
        let dash = if e.kind == EdgeKind::PreviousTick {
            r#" stroke-dasharray="5,4""#
        } else {
            ""
        };
        svg.raw(&format!(
            r##"<line class="edge" data-key="{}" x1="{ax:.1}" y1="{ay:.1}" x2="{bx:.1}" y2="{by:.1}" stroke="#555" stroke-width="1.2"{dash} marker-end="url(#arrow)"/>"##,
            esc(&e.key)
        ));
    }

    for s in &graph.streams {
        let Some((x, y)) = pos(&s.id) else { continue };
        svg.raw(&format!(
            r##"<rect class="stream" data-id="{}" x="{x:.1}" y="{y:.1}" width="{BOX_W}" height="{BOX_H}" rx="6" fill="#eef3fb" stroke="#33557a"/>"##,
            esc(&s.id)
        ));
        svg.text(x + BOX_W / 2.0, y + 22.0, &s.id, "middle", "stream-id");
        let writes = s.writes.join(", ");
        let short: String = writes.chars().take(34).collect();
        let label = if short.len() < writes.len() { format!("{short}…") } else { short };
        svg.text(x + BOX_W / 2.0, y + 40.0, &label, "middle", "stream-writes");
    }
    svg.finish()
}
