//! Static SVG rendering of a scene: obstacles, graph and highlighted routes.
//! One SVG unit is one meter; the y axis points up.

use std::fmt::Write;

use crate::envworld::{Cell, OccupancyGrid};
use crate::graphbuild::{EdgeOrigin, NavGraph};
use crate::trajsample::Trajectory;

const ROUTE_COLOURS: [&str; 6] = ["#d62728", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn edge_colour(origin: EdgeOrigin) -> &'static str {
    match origin {
        EdgeOrigin::Rough => "#1f77b4",
        EdgeOrigin::Refinement => "#2ca02c",
    }
}

pub fn render_svg(grid: &OccupancyGrid, graph: Option<&NavGraph>, trajectories: &[Trajectory]) -> String {
    let (w, h) = grid.extent();
    let res = grid.resolution();
    let y = |v: f64| h - v;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{}" height="{}">"#,
        (w * 50.0).round(),
        (h * 50.0).round()
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, grid.scene_id());
    let _ = writeln!(s, r##"<rect class="floor" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);

    // one rect per horizontal run of obstacle cells
    let _ = writeln!(s, r##"<g class="obstacles" fill="#444444">"##);
    for row in 0..grid.height() {
        let mut col = 0;
        while col < grid.width() {
            if grid.cell(col, row) == Cell::Obstacle {
                let start = col;
                while col < grid.width() && grid.cell(col, row) == Cell::Obstacle {
                    col += 1;
                }
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                    start as f64 * res,
                    y((row + 1) as f64 * res),
                    (col - start) as f64 * res,
                    res
                );
            } else {
                col += 1;
            }
        }
    }
    s.push_str("</g>\n");

    if let Some(g) = graph {
        let _ = writeln!(s, r#"<g class="edges" stroke-width="0.05">"#);
        for e in g.edges() {
            let (a, b) = (g.position(e.a), g.position(e.b));
            let class = match e.origin {
                EdgeOrigin::Rough => "edge rough",
                EdgeOrigin::Refinement => "edge refinement",
            };
            let _ = writeln!(
                s,
                r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}"/>"#,
                a.x,
                y(a.y),
                b.x,
                y(b.y),
                edge_colour(e.origin)
            );
        }
        s.push_str("</g>\n");
    }

    if !trajectories.is_empty() {
        if let Some(g) = graph {
            let _ = writeln!(s, r#"<g class="routes" fill="none" stroke-width="0.12" stroke-linejoin="round">"#);
            for (i, t) in trajectories.iter().enumerate() {
                let pts: Vec<String> = t
                    .node_ids
                    .iter()
                    .filter(|&&id| (id as usize) < g.node_count())
                    .map(|&id| {
                        let p = g.position(id);
                        format!("{:.3},{:.3}", p.x, y(p.y))
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline class="route" points="{}" stroke="{}"/>"#,
                    pts.join(" "),
                    ROUTE_COLOURS[i % ROUTE_COLOURS.len()]
                );
            }
            s.push_str("</g>\n");
        }
    }

    if let Some(g) = graph {
        let _ = writeln!(s, r##"<g class="viewpoints" fill="#ffcc00" stroke="#000000" stroke-width="0.02">"##);
        for v in g.viewpoints() {
            let _ = writeln!(
                s,
                r#"<circle class="viewpoint" data-id="{}" cx="{:.3}" cy="{:.3}" r="0.12"/>"#,
                v.id,
                v.position.x,
                y(v.position.y)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
