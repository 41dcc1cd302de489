//! Standalone SVG plots of run artifacts.
//!
//! Every plotted value is also embedded as a `data-*` attribute so plots can
//! be compared numerically without rasterizing.

use std::collections::BTreeMap;

use strata_core::evolution::{HallOfFame, Logbook};
use strata_core::game::TournamentResult;

use crate::svg::{esc, min_max, padded, Frame, Svg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VizKind {
    Trace,
    Pareto,
    Logbook,
    Tournament,
}

impl VizKind {
    pub fn name(self) -> &'static str {
        match self {
            VizKind::Trace => "trace",
            VizKind::Pareto => "pareto",
            VizKind::Logbook => "logbook",
            VizKind::Tournament => "tournament",
        }
    }
}

/// Render `artifact` as `kind`; `Err` means the artifact does not match.
pub fn render(kind: VizKind, artifact: &str) -> Result<String, String> {
    match kind {
        VizKind::Trace => trace_svg(artifact),
        VizKind::Pareto => pareto_svg(artifact),
        VizKind::Logbook => logbook_svg(artifact),
        VizKind::Tournament => tournament_svg(artifact),
    }
}

/// Series of a `tick,key,value` trace CSV, keyed by context key.
pub fn parse_trace(csv: &str) -> Result<BTreeMap<String, Vec<(f64, f64)>>, String> {
    let mut lines = csv.lines();
    if lines.next().map(str::trim) != Some("tick,key,value") {
        return Err("trace CSV must start with the header tick,key,value".into());
    }
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || format!("trace line {}: expected tick,key,value", n + 2);
        let mut parts = line.split(',');
        let (Some(t), Some(k), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let tick: u64 = t.parse().map_err(|_| bad())?;
        let value: f64 = v.parse().map_err(|_| bad())?;
        series.entry(k.to_string()).or_default().push((tick as f64, value));
    }
    if series.is_empty() {
        return Err("trace has no rows".into());
    }
    Ok(series)
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 130.0;
const LEFT: f64 = 90.0;
const TOP: f64 = 40.0;
const GAP: f64 = 50.0;

/// One panel per key, each with its own y scale and one point per tick.
pub fn trace_svg(csv: &str) -> Result<String, String> {
    let series = parse_trace(csv)?;
    let n = series.len() as f64;
    let mut svg = Svg::new(LEFT + PANEL_W + 30.0, TOP + n * (PANEL_H + GAP));
    for (i, (key, pts)) in series.iter().enumerate() {
        let (x0, x1) = min_max(pts.iter().map(|p| p.0));
        let (y0, y1) = min_max(pts.iter().map(|p| p.1));
        let frame = Frame {
            x: LEFT,
            y: TOP + i as f64 * (PANEL_H + GAP),
            w: PANEL_W,
            h: PANEL_H,
            x_range: padded(x0, x1),
            y_range: padded(y0, y1),
        };
        frame.draw_axes(&mut svg, key);
        svg.raw(&format!(
            r##"<polyline class="series" data-key="{}" data-min="{y0}" data-max="{y1}" data-last="{}" fill="none" stroke="#1f5fa8" stroke-width="1.3" points="{}"/>"##,
            esc(key),
            pts.last().map_or(f64::NAN, |p| p.1),
            frame.points(pts.iter().copied())
        ));
    }
    Ok(svg.finish())
}

/// Scatter of archive fitness: objectives 0 and 1, or index against the
/// single objective of a scalar archive.
pub fn pareto_svg(json: &str) -> Result<String, String> {
    let entries = HallOfFame::entries_from_json(json).map_err(|e| format!("not a HoF archive: {e}"))?;
    let n_obj = entries.first().map_or(0, |e| e.fitness.len());
    if entries.is_empty() || n_obj == 0 || entries.iter().any(|e| e.fitness.len() != n_obj) {
        return Err("HoF archive is empty or has ragged fitness vectors".into());
    }
    let xy: Vec<(f64, f64)> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| if n_obj >= 2 { (e.fitness[0], e.fitness[1]) } else { (i as f64, e.fitness[0]) })
        .collect();
    let (x0, x1) = min_max(xy.iter().map(|p| p.0));
    let (y0, y1) = min_max(xy.iter().map(|p| p.1));
    let frame = Frame {
        x: LEFT,
        y: TOP,
        w: 460.0,
        h: 380.0,
        x_range: padded(x0, x1),
        y_range: padded(y0, y1),
    };
    let mut svg = Svg::new(LEFT + 460.0 + 40.0, TOP + 380.0 + 60.0);
    let title = if n_obj >= 2 {
        format!("hall of fame ({} entries): objective 0 vs objective 1", entries.len())
    } else {
        format!("hall of fame ({} entries): fitness by rank", entries.len())
    };
    frame.draw_axes(&mut svg, &title);
    for (x, y) in &xy {
        svg.raw(&format!(
            r##"<circle class="marker" data-x="{x}" data-y="{y}" cx="{:.2}" cy="{:.2}" r="4" fill="#c0392b" fill-opacity="0.8"/>"##,
            frame.px(*x),
            frame.py(*y)
        ));
    }
    Ok(svg.finish())
}

/// Min-max band and mean line per objective across generations.
pub fn logbook_svg(jsonl: &str) -> Result<String, String> {
    let log = Logbook::from_jsonl(jsonl).map_err(|e| format!("not a logbook: {e}"))?;
    let n_obj = log.rows.first().map_or(0, |r| r.obj.len());
    if log.is_empty() || n_obj == 0 || log.rows.iter().any(|r| r.obj.len() != n_obj) {
        return Err("logbook is empty or has ragged rows".into());
    }
    let mut svg = Svg::new(LEFT + PANEL_W + 30.0, TOP + n_obj as f64 * (PANEL_H + GAP));
    let gens: Vec<f64> = log.rows.iter().map(|r| r.gen as f64).collect();
    let (g0, g1) = min_max(gens.iter().copied());
    for o in 0..n_obj {
        let stats: Vec<_> = log.rows.iter().map(|r| r.obj[o]).collect();
        let (y0, _) = min_max(stats.iter().map(|s| s.min));
        let (_, y1) = min_max(stats.iter().map(|s| s.max));
        let frame = Frame {
            x: LEFT,
            y: TOP + o as f64 * (PANEL_H + GAP),
            w: PANEL_W,
            h: PANEL_H,
            x_range: padded(g0, g1),
            y_range: padded(y0, y1),
        };
        frame.draw_axes(&mut svg, &format!("objective {o}: min / mean / max by generation"));
        let upper = gens.iter().zip(&stats).map(|(g, s)| (*g, s.max));
        let lower = gens.iter().zip(&stats).rev().map(|(g, s)| (*g, s.min));
        svg.raw(&format!(
            r##"<polygon class="band" data-objective="{o}" fill="#9ecae1" fill-opacity="0.5" stroke="none" points="{}"/>"##,
            frame.points(upper.chain(lower))
        ));
        let means: Vec<String> = stats.iter().map(|s| s.mean.to_string()).collect();
        svg.raw(&format!(
            r##"<polyline class="mean" data-objective="{o}" data-values="{}" fill="none" stroke="#08519c" stroke-width="1.5" points="{}"/>"##,
            means.join(" "),
            frame.points(gens.iter().zip(&stats).map(|(g, s)| (*g, s.mean)))
        ));
    }
    Ok(svg.finish())
}

fn heat(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0))
}

/// Heat grid of mean scores, scenarios as rows and participants as columns.
pub fn tournament_svg(json: &str) -> Result<String, String> {
    let result = TournamentResult::from_json(json).map_err(|e| format!("not a tournament result: {e}"))?;
    let table = result.mean_table();
    if result.scenarios.is_empty() || result.participants.is_empty() {
        return Err("tournament has no scenarios or participants".into());
    }
    let (lo, hi) = min_max(table.values().flat_map(|row| row.values().copied()));
    let cell_w = 120.0;
    let cell_h = 28.0;
    let left = 12.0 + 7.0 * result.scenarios.iter().map(|s| s.chars().count()).max().unwrap_or(8) as f64;
    let top = 70.0;
    let mut svg = Svg::new(
        left + cell_w * result.participants.len() as f64 + 20.0,
        top + cell_h * result.scenarios.len() as f64 + 40.0,
    );
    svg.text(
        12.0,
        22.0,
        &format!("mean {} by scenario; overall winner: {}", result.score.metric, result.overall_winner),
        "start",
        "title",
    );
    for (c, p) in result.participants.iter().enumerate() {
        svg.text(left + (c as f64 + 0.5) * cell_w, top - 8.0, p, "middle", "column");
    }
    for (r, s) in result.scenarios.iter().enumerate() {
        let y = top + r as f64 * cell_h;
        svg.text(left - 6.0, y + cell_h * 0.65, s, "end", "row");
        for (c, p) in result.participants.iter().enumerate() {
            let x = left + c as f64 * cell_w;
            let Some(v) = table.get(s).and_then(|row| row.get(p)).copied() else {
                continue;
            };
            let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            svg.raw(&format!(
                r##"<rect class="cell" data-scenario="{}" data-participant="{}" data-score="{v}" x="{x:.1}" y="{y:.1}" width="{cell_w}" height="{cell_h}" fill="{}" stroke="white"/>"##,
                esc(s),
                esc(p),
                heat(t)
            ));
            let ink = if t > 0.55 { "#ffffff" } else { "#111111" };
            svg.raw(&format!(
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="{ink}">{v:.3}</text>"#,
                x + cell_w / 2.0,
                y + cell_h * 0.65
            ));
        }
    }
    Ok(svg.finish())
}
