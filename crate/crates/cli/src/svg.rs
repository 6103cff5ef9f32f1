//! Standalone SVG rendering of alluvial specs: one vertical axis per
//! partition, stacked cluster rectangles sized by address count, and cubic
//! ribbons per flow with width proportional to count. Output bytes are a
//! pure function of the spec.

use std::fmt::Write as _;

use reident_core::alluvial::{AlluvialFlow, AlluvialSpec};

const MARGIN_X: f64 = 40.0;
const MARGIN_Y: f64 = 28.0;
const AXIS_WIDTH: f64 = 16.0;
const AXIS_SPAN: f64 = 240.0;
const HEIGHT: f64 = 640.0;
const LABEL_MIN_HEIGHT: f64 = 10.0;

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

#[derive(Debug, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to draw: the alluvial spec has no flows")]
    EmptyFlows,
}

struct AxisGeometry {
    x: f64,
    /// Top y and height per cluster id.
    tops: Vec<(f64, f64)>,
    /// Pixels per address.
    unit: f64,
    /// Display position per cluster id.
    rank: Vec<usize>,
}

pub fn render_alluvial_svg(spec: &AlluvialSpec) -> Result<String, SvgError> {
    if spec.flows.is_empty() {
        return Err(SvgError::EmptyFlows);
    }
    let axis_count = spec.axes.len();
    let width = 2.0 * MARGIN_X
        + axis_count as f64 * AXIS_WIDTH
        + (axis_count.saturating_sub(1)) as f64 * AXIS_SPAN;

    let geometry: Vec<AxisGeometry> = spec
        .axes
        .iter()
        .enumerate()
        .map(|(k, axis)| {
            let x = MARGIN_X + k as f64 * (AXIS_WIDTH + AXIS_SPAN);
            let clusters = axis.clusters.len();
            let usable = HEIGHT - 2.0 * MARGIN_Y;
            let gap = if clusters > 1 {
                (usable * 0.2 / (clusters - 1) as f64).min(4.0)
            } else {
                0.0
            };
            let unit =
                (usable - gap * (clusters.saturating_sub(1)) as f64) / spec.universe.max(1) as f64;
            let max_id = axis
                .clusters
                .iter()
                .map(|c| c.id.0 as usize + 1)
                .max()
                .unwrap_or(0);
            let mut tops = vec![(0.0, 0.0); max_id];
            let mut rank = vec![0usize; max_id];
            let mut y = MARGIN_Y;
            for (position, cluster) in axis.clusters.iter().enumerate() {
                let h = cluster.size as f64 * unit;
                tops[cluster.id.0 as usize] = (y, h);
                rank[cluster.id.0 as usize] = position;
                y += h + gap;
            }
            AxisGeometry {
                x,
                tops,
                unit,
                rank,
            }
        })
        .collect();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {width:.2} {HEIGHT:.2}\" width=\"{width:.2}\" height=\"{HEIGHT:.2}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{width:.2}\" height=\"{HEIGHT:.2}\" fill=\"#ffffff\"/>"
    );

    // Ribbons first so the axis bars overdraw their ends. Flow offsets
    // stack within each cluster ordered by the opposite endpoint's display
    // position, keeping ribbons untwisted where possible.
    for pair in 0..axis_count - 1 {
        let left = &geometry[pair];
        let right = &geometry[pair + 1];
        let mut flows: Vec<&AlluvialFlow> = spec.flows.iter().filter(|f| f.axis == pair).collect();

        let mut left_used = vec![0.0f64; left.tops.len()];
        let mut right_used = vec![0.0f64; right.tops.len()];
        let mut order_left = flows.clone();
        order_left.sort_by_key(|f| (left.rank[f.left.0 as usize], right.rank[f.right.0 as usize]));
        let mut left_offset = std::collections::HashMap::new();
        for flow in &order_left {
            let id = flow_key(flow);
            let used = &mut left_used[flow.left.0 as usize];
            left_offset.insert(id, *used);
            *used += flow.count as f64 * left.unit;
        }
        flows.sort_by_key(|f| (right.rank[f.right.0 as usize], left.rank[f.left.0 as usize]));
        let mut right_offset = std::collections::HashMap::new();
        for flow in &flows {
            let id = flow_key(flow);
            let used = &mut right_used[flow.right.0 as usize];
            right_offset.insert(id, *used);
            *used += flow.count as f64 * right.unit;
        }

        for flow in &order_left {
            let id = flow_key(flow);
            let x0 = left.x + AXIS_WIDTH;
            let x1 = right.x;
            let xm = (x0 + x1) / 2.0;
            let y0 = left.tops[flow.left.0 as usize].0 + left_offset[&id];
            let y1 = right.tops[flow.right.0 as usize].0 + right_offset[&id];
            let t0 = flow.count as f64 * left.unit;
            let t1 = flow.count as f64 * right.unit;
            let color = PALETTE[left.rank[flow.left.0 as usize] % PALETTE.len()];
            let _ = writeln!(
                svg,
                "<path d=\"M {x0:.2} {y0:.2} C {xm:.2} {y0:.2} {xm:.2} {y1:.2} {x1:.2} {y1:.2} \
                 L {x1:.2} {:.2} C {xm:.2} {:.2} {xm:.2} {:.2} {x0:.2} {:.2} Z\" \
                 fill=\"{color}\" fill-opacity=\"0.45\"/>",
                y1 + t1,
                y1 + t1,
                y0 + t0,
                y0 + t0,
            );
        }
    }

    // Axis bars and labels.
    for (axis, geo) in spec.axes.iter().zip(&geometry) {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            geo.x + AXIS_WIDTH / 2.0,
            MARGIN_Y - 10.0,
            xml_escape(&axis.name)
        );
        for cluster in &axis.clusters {
            let (y, h) = geo.tops[cluster.id.0 as usize];
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{y:.2}\" width=\"{AXIS_WIDTH:.2}\" height=\"{h:.2}\" fill=\"#39424e\"/>",
                geo.x
            );
            if h >= LABEL_MIN_HEIGHT {
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#20262e\">{}</text>",
                    geo.x + AXIS_WIDTH + 3.0,
                    y + h / 2.0 + 3.0,
                    xml_escape(&cluster.label)
                );
            }
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Flow identity within one axis pair.
fn flow_key(flow: &AlluvialFlow) -> (u32, u32) {
    (flow.left.0, flow.right.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use reident_core::alluvial::alluvial;
    use reident_core::ledger::Address;
    use reident_core::partition::Partition;

    fn partition(assignment: &[(&str, u32)]) -> Partition {
        Partition::from_labels(
            assignment
                .iter()
                .map(|(a, c)| (Address::new(*a), *c))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn renders_axes_and_ribbons() {
        let a = partition(&[("a", 0), ("b", 0), ("c", 1)]);
        let b = partition(&[("a", 0), ("b", 1), ("c", 1)]);
        let spec = alluvial(&[("A", &a), ("B", &b)], 10).unwrap();
        let svg = render_alluvial_svg(&spec).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<path").count(), spec.flows.len());
        assert_eq!(svg.matches("<rect").count(), 1 + 2 + 2);
    }

    #[test]
    fn same_spec_renders_identical_bytes() {
        let a = partition(&[("a", 0), ("b", 1), ("c", 1), ("d", 2)]);
        let b = partition(&[("a", 0), ("b", 0), ("c", 1), ("d", 1)]);
        let spec = alluvial(&[("A", &a), ("B", &b)], 10).unwrap();
        assert_eq!(
            render_alluvial_svg(&spec).unwrap(),
            render_alluvial_svg(&spec).unwrap()
        );
    }

    #[test]
    fn empty_flows_are_refused() {
        let spec = AlluvialSpec {
            axes: vec![],
            flows: vec![],
            universe: 0,
        };
        assert!(matches!(
            render_alluvial_svg(&spec),
            Err(SvgError::EmptyFlows)
        ));
    }
}
