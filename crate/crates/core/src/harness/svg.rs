//! SVG rendering of partitions and trajectories.

use std::fmt::Write;

use crate::centers::{circumcenter, incenter_set};
use crate::geometry::{ConvexPolygon, Point2};
use crate::objective::Problem;
use crate::voronoi::VoronoiPartition;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameOptions {
    /// Draw the circumcircle (disk covering) or an incircle (packing) of every cell.
    pub circles: Option<Problem>,
}

/// Maps environment coordinates to the drawing, y up.
struct View {
    lo: Point2,
    scale: f64,
    height: f64,
}

impl View {
    fn new(q: &ConvexPolygon) -> Self {
        let (lo, hi) = q.bounding_box();
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        View {
            lo,
            scale,
            height: (hi.y - lo.y) * scale + 2.0 * MARGIN,
        }
    }

    fn width(&self, q: &ConvexPolygon) -> f64 {
        let (lo, hi) = q.bounding_box();
        (hi.x - lo.x) * self.scale + 2.0 * MARGIN
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.lo.x) * self.scale,
            self.height - MARGIN - (p.y - self.lo.y) * self.scale,
        )
    }

    fn points_attr(&self, pts: &[Point2]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn header(out: &mut String, view: &View, q: &ConvexPolygon, title: &str) {
    let w = view.width(q);
    let h = view.height;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    )
    .unwrap();
    writeln!(out, "<title>{title}</title>").unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
}

fn environment(out: &mut String, view: &View, q: &ConvexPolygon) {
    writeln!(
        out,
        r##"<polygon class="environment" points="{}" fill="none" stroke="#000" stroke-width="2"/>"##,
        view.points_attr(q.vertices())
    )
    .unwrap();
}

fn cells(out: &mut String, view: &View, partition: &VoronoiPartition, opts: &FrameOptions) {
    for (i, cell) in partition.cells().iter().enumerate() {
        writeln!(
            out,
            r##"<polygon class="cell" data-index="{i}" points="{}" fill="#e8eef7" stroke="#4a6fa5" stroke-width="1"/>"##,
            view.points_attr(cell.polygon.vertices())
        )
        .unwrap();
    }
    if let Some(problem) = opts.circles {
        for cell in partition.cells() {
            let (c, r) = match problem {
                Problem::DiskCovering => {
                    let cc = circumcenter(&cell.polygon);
                    (cc.center, cc.radius)
                }
                Problem::SpherePacking => {
                    let ic = incenter_set(&cell.polygon);
                    (ic.segment.midpoint(), ic.inradius)
                }
            };
            let (x, y) = view.map(c);
            writeln!(
                out,
                r##"<circle class="disk" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="none" stroke="#a54a4a" stroke-dasharray="4 3"/>"##,
                r * view.scale
            )
            .unwrap();
        }
    }
}

fn generators(out: &mut String, view: &View, pts: &[Point2], fill: &str) {
    for p in pts {
        let (x, y) = view.map(*p);
        writeln!(
            out,
            r#"<circle class="generator" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{fill}"/>"#
        )
        .unwrap();
    }
}

/// Environment, Voronoi cells and generators of one configuration.
pub fn partition_frame(partition: &VoronoiPartition, title: &str, opts: &FrameOptions) -> String {
    let q = partition.environment();
    let view = View::new(q);
    let mut out = String::new();
    header(&mut out, &view, q, title);
    cells(&mut out, &view, partition, opts);
    environment(&mut out, &view, q);
    generators(&mut out, &view, partition.generators(), "#000");
    out.push_str("</svg>\n");
    out
}

/// Generator paths over the final partition; initial positions hollow, final filled.
pub fn trajectory_frame(
    final_partition: &VoronoiPartition,
    paths: &[Vec<Point2>],
    title: &str,
) -> String {
    let q = final_partition.environment();
    let view = View::new(q);
    let mut out = String::new();
    header(&mut out, &view, q, title);
    cells(&mut out, &view, final_partition, &FrameOptions::default());
    environment(&mut out, &view, q);
    for (i, path) in paths.iter().enumerate() {
        writeln!(
            out,
            r##"<polyline class="path" data-index="{i}" points="{}" fill="none" stroke="#d07020" stroke-width="1.2"/>"##,
            view.points_attr(path)
        )
        .unwrap();
        if let Some(&start) = path.first() {
            let (x, y) = view.map(start);
            writeln!(
                out,
                r##"<circle class="start" cx="{x:.3}" cy="{y:.3}" r="3" fill="white" stroke="#d07020"/>"##
            )
            .unwrap();
        }
    }
    generators(&mut out, &view, final_partition.generators(), "#000");
    out.push_str("</svg>\n");
    out
}
