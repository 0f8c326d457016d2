//! Jensen-Shannon distances, the intertopic map and deterministic SVG charts.
//! Rendering returns strings; writing them out is the caller's job.

mod map;
mod svg;

pub use map::{classical_mds, intertopic_map, js_divergence, TopicMap};
pub use svg::{render_line_chart, render_topic_map, LineChart, Series};
