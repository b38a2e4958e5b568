//! Satellite-geometry dilution of precision and the GPS reliability metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ObstacleSet;
use crate::world::{SatellitePosition, WorldScene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpsConfig {
    /// GDOP at which the metric reaches zero.
    pub gdop_thresh: f64,
    /// GDOP values above this are clipped before scoring.
    pub gdop_cut: f64,
    pub min_sats: usize,
}

impl Default for GpsConfig {
    fn default() -> Self {
        Self { gdop_thresh: 20.0, gdop_cut: 20.0, min_sats: 4 }
    }
}

impl GpsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gdop_thresh > 1.0) || !(self.gdop_cut >= 1.0) {
            return Err(Error::Precondition(format!(
                "need gdop_thresh > 1 and gdop_cut >= 1, got {} and {}",
                self.gdop_thresh, self.gdop_cut
            )));
        }
        if self.min_sats < 4 {
            return Err(Error::Precondition("min_sats must be at least 4".into()));
        }
        Ok(())
    }
}

/// Diagonal of `(GᵀG)⁻¹` for the linearized pseudorange model, ordered
/// `(x, y, z, clock)`.
pub fn covariance_diagonal(receiver: [f64; 3], sats: &[SatellitePosition]) -> Result<[f64; 4]> {
    if sats.len() < 4 {
        return Err(Error::Precondition(format!("GDOP needs 4 satellites, got {}", sats.len())));
    }
    // normal matrix accumulated from rows (unit line of sight, -1)
    let mut n = [[0.0f64; 4]; 4];
    for (i, s) in sats.iter().enumerate() {
        let d = [receiver[0] - s.x, receiver[1] - s.y, receiver[2] - s.z];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r == 0.0 {
            return Err(Error::Precondition(format!("receiver coincides with satellite {i}")));
        }
        let row = [d[0] / r, d[1] / r, d[2] / r, -1.0];
        for a in 0..4 {
            for b in 0..4 {
                n[a][b] += row[a] * row[b];
            }
        }
    }
    let l = cholesky(&n)?;
    // diag(N⁻¹)_i = ‖L⁻¹ e_i‖² summed over columns of L⁻¹
    let mut diag = [0.0; 4];
    for col in 0..4 {
        let mut y = [0.0; 4];
        for i in col..4 {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in col..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            diag[i] += yi * yi;
        }
    }
    Ok(diag)
}

fn cholesky(a: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    let scale = (0..4).map(|i| a[i][i]).fold(0.0, f64::max);
    let mut l = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-10 * scale {
                    return Err(Error::Geometry("normal matrix is singular".into()));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Geometric dilution of precision, `sqrt(PDOP² + TDOP²)` with
/// `PDOP² = Σ11 + Σ22 + Σ33` and `TDOP² = Σ44`.
pub fn gdop(receiver: [f64; 3], sats: &[SatellitePosition]) -> Result<f64> {
    let d = covariance_diagonal(receiver, sats)?;
    Ok((d[0] + d[1] + d[2] + d[3]).sqrt())
}

/// Maps a GDOP value onto `[0, 1]` (1 = ideal geometry).
pub fn gps_score(gdop: f64, cfg: &GpsConfig) -> f64 {
    ((cfg.gdop_thresh - gdop.min(cfg.gdop_cut)) / (cfg.gdop_thresh - 1.0)).clamp(0.0, 1.0)
}

/// GPS metric for a receiver given pre-indexed obstacles.
pub fn gps_metric_with(
    receiver: [f64; 3],
    sats: &[SatellitePosition],
    obstacles: &ObstacleSet,
    cfg: &GpsConfig,
) -> f64 {
    let visible: Vec<SatellitePosition> =
        sats.iter().filter(|s| s.z > 0.0 && !obstacles.ray_hits(receiver, s.as_array())).copied().collect();
    if visible.len() < cfg.min_sats.max(4) {
        return 0.0;
    }
    match gdop(receiver, &visible) {
        Ok(g) => gps_score(g, cfg),
        Err(e) => {
            log::debug!("gps metric at {receiver:?} set to 0: {e}");
            0.0
        }
    }
}

/// GPS metric for a receiver in a scene: satellites whose line of sight is
/// blocked by a building are dropped; fewer than four visible gives 0.
pub fn gps_metric(receiver: [f64; 3], scene: &WorldScene, cfg: &GpsConfig) -> f64 {
    let obstacles = ObstacleSet::new(&scene.obstacles, scene.bbox);
    gps_metric_with(receiver, &scene.satellites, &obstacles, cfg)
}
