use crate::geometry::GridLayer;

/// Proximity metric and cost: `m = min(d / d_thresh, 1)`, `c = 1 - m`.
pub fn risk_metric(d_close: f64, d_thresh: f64) -> (f64, f64) {
    let m = (d_close / d_thresh).min(1.0);
    (m, 1.0 - m)
}

/// Risk cost layer from a distance field in meters.
pub fn risk_layer(distance: &GridLayer, d_thresh: f64) -> GridLayer {
    let values = distance.values.iter().map(|&d| risk_metric(d, d_thresh).1).collect();
    GridLayer { name: "risk".into(), spec: distance.spec, altitude: distance.altitude, values }
}
