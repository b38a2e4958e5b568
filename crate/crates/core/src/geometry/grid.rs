use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::validate::is_whole_multiple;
use crate::world::BoundingBox;

/// Column/row address of one grid cell. Row 0 is the southmost row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Regular grid over a bounding box at resolution `resolution` meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bbox: BoundingBox,
    pub resolution: f64,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl GridSpec {
    pub fn new(bbox: BoundingBox, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::Grid(format!("resolution {resolution} must be positive")));
        }
        if !(bbox.x_max > bbox.x_min && bbox.y_max > bbox.y_min) {
            return Err(Error::Grid("empty bounding box".into()));
        }
        if !is_whole_multiple(bbox.width(), resolution) || !is_whole_multiple(bbox.height(), resolution) {
            return Err(Error::Grid(format!(
                "resolution {resolution} m does not divide the {} x {} m bounding box",
                bbox.width(),
                bbox.height()
            )));
        }
        Ok(Self {
            bbox,
            resolution,
            n_cols: (bbox.width() / resolution).round() as usize,
            n_rows: (bbox.height() / resolution).round() as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major linear index.
    pub fn linear(&self, cell: Cell) -> usize {
        cell.row * self.n_cols + cell.col
    }

    pub fn cell_of(&self, linear: usize) -> Cell {
        Cell::new(linear % self.n_cols, linear / self.n_cols)
    }

    pub fn cell_center(&self, cell: Cell) -> [f64; 2] {
        [
            self.bbox.x_min + (cell.col as f64 + 0.5) * self.resolution,
            self.bbox.y_min + (cell.row as f64 + 0.5) * self.resolution,
        ]
    }

    /// Maps a world point to its cell. The min edges are inclusive, the max
    /// edges exclusive; points outside are rejected rather than clamped.
    pub fn world_to_index(&self, x: f64, y: f64) -> Result<Cell> {
        let b = &self.bbox;
        if !(x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max) {
            return Err(Error::OutOfBounds { x, y });
        }
        let col = ((x - b.x_min) / self.resolution).floor() as usize;
        let row = ((y - b.y_min) / self.resolution).floor() as usize;
        // float division can round up onto the excluded edge
        Ok(Cell::new(col.min(self.n_cols - 1), row.min(self.n_rows - 1)))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len()).map(|i| self.cell_of(i))
    }

    /// In-grid 8-neighborhood of `cell`.
    pub fn neighbors8(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        const OFFSETS: [(isize, isize); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        OFFSETS.iter().filter_map(move |&(dc, dr)| {
            let c = cell.col as isize + dc;
            let r = cell.row as isize + dr;
            (c >= 0 && r >= 0 && (c as usize) < self.n_cols && (r as usize) < self.n_rows)
                .then(|| Cell::new(c as usize, r as usize))
        })
    }
}

/// One scalar field over a grid at a fixed flight altitude.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLayer {
    pub name: String,
    pub spec: GridSpec,
    pub altitude: f64,
    pub values: Vec<f64>,
}

/// Metadata sidecar stored next to a layer's raw payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerHeader {
    pub name: String,
    pub bbox: BoundingBox,
    pub resolution: f64,
    pub altitude: f64,
    pub n_rows: usize,
    pub n_cols: usize,
    pub dtype: String,
}

const DTYPE: &str = "f32le";

impl GridLayer {
    pub fn filled(name: impl Into<String>, spec: GridSpec, altitude: f64, value: f64) -> Self {
        Self { name: name.into(), spec, altitude, values: vec![value; spec.len()] }
    }

    pub fn from_values(name: impl Into<String>, spec: GridSpec, altitude: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Grid(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite layer value {v}")));
        }
        Ok(Self { name: name.into(), spec, altitude, values })
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.values[self.spec.linear(cell)]
    }

    pub fn set(&mut self, cell: Cell, value: f64) {
        let i = self.spec.linear(cell);
        self.values[i] = value;
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn header(&self) -> LayerHeader {
        LayerHeader {
            name: self.name.clone(),
            bbox: self.spec.bbox,
            resolution: self.spec.resolution,
            altitude: self.altitude,
            n_rows: self.spec.n_rows,
            n_cols: self.spec.n_cols,
            dtype: DTYPE.into(),
        }
    }

    pub fn payload(&self) -> Vec<u8> {
        self.values.iter().flat_map(|&v| (v as f32).to_le_bytes()).collect()
    }

    fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
        (dir.join(format!("{name}.json")), dir.join(format!("{name}.bin")))
    }

    /// Writes `<name>.json` (header) and `<name>.bin` (little-endian f32,
    /// row-major, row 0 south) into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let (meta, bin) = Self::paths(dir, &self.name);
        fs::write(meta, serde_json::to_string_pretty(&self.header())?)?;
        let mut f = fs::File::create(bin)?;
        f.write_all(&self.payload())?;
        Ok(())
    }

    pub fn load(dir: &Path, name: &str) -> Result<Self> {
        let (meta, bin) = Self::paths(dir, name);
        let header: LayerHeader = serde_json::from_str(&fs::read_to_string(&meta)?)?;
        let bad = |message: String| Error::LayerFormat { path: bin.clone(), message };
        if header.dtype != DTYPE {
            return Err(bad(format!("unsupported dtype {}", header.dtype)));
        }
        let spec = GridSpec::new(header.bbox, header.resolution)?;
        if spec.n_rows != header.n_rows || spec.n_cols != header.n_cols {
            return Err(bad("header shape disagrees with bbox/resolution".into()));
        }
        let bytes = fs::read(&bin)?;
        if bytes.len() != spec.len() * 4 {
            return Err(bad(format!("expected {} bytes, found {}", spec.len() * 4, bytes.len())));
        }
        let values = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).collect();
        GridLayer::from_values(header.name, spec, header.altitude, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(res: f64) -> GridSpec {
        GridSpec::new(BoundingBox::new(0.0, 0.0, 100.0, 50.0), res).unwrap()
    }

    #[test]
    fn index_examples() {
        let s = spec(5.0);
        assert_eq!(s.world_to_index(12.4, 0.0).unwrap(), Cell::new(2, 0));
        assert_eq!(s.world_to_index(0.0, 0.0).unwrap(), Cell::new(0, 0));
        assert!(matches!(s.world_to_index(100.0, 3.0), Err(Error::OutOfBounds { .. })));
        assert!(s.world_to_index(-1e-9, 3.0).is_err());
        assert_eq!((s.n_cols, s.n_rows), (20, 10));
    }

    #[test]
    fn non_dividing_resolution_rejected() {
        assert!(GridSpec::new(BoundingBox::new(0.0, 0.0, 100.0, 50.0), 3.0).is_err());
        assert!(GridSpec::new(BoundingBox::new(0.0, 0.0, 100.0, 50.0), 0.0).is_err());
    }

    #[test]
    fn index_of_center_is_identity() {
        for res in [2.0, 5.0, 10.0] {
            let s = spec(res);
            for c in s.cells() {
                let [x, y] = s.cell_center(c);
                assert_eq!(s.world_to_index(x, y).unwrap(), c);
            }
        }
    }

    #[test]
    fn corner_neighbors() {
        let s = spec(10.0);
        assert_eq!(s.neighbors8(Cell::new(0, 0)).count(), 3);
        assert_eq!(s.neighbors8(Cell::new(3, 2)).count(), 8);
    }

    #[test]
    fn layer_file_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(10.0);
        let values = (0..s.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let layer = GridLayer::from_values("gps", s, 60.0, values).unwrap();
        layer.save(dir.path()).unwrap();
        let first = std::fs::read(dir.path().join("gps.bin")).unwrap();
        let back = GridLayer::load(dir.path(), "gps").unwrap();
        assert_eq!(back.spec, s);
        assert_eq!(back.altitude, 60.0);
        back.save(dir.path()).unwrap();
        assert_eq!(std::fs::read(dir.path().join("gps.bin")).unwrap(), first);
        assert_eq!(GridLayer::load(dir.path(), "gps").unwrap(), back);
    }

    #[test]
    fn truncated_payload_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let layer = GridLayer::filled("x", spec(10.0), 20.0, 1.0);
        layer.save(dir.path()).unwrap();
        std::fs::write(dir.path().join("x.bin"), [0u8; 7]).unwrap();
        assert!(matches!(GridLayer::load(dir.path(), "x"), Err(Error::LayerFormat { .. })));
    }

    proptest! {
        #[test]
        fn payload_is_row_major_f32(vals in proptest::collection::vec(-1e6f32..1e6, 50)) {
            let s = GridSpec::new(BoundingBox::new(0.0, 0.0, 100.0, 50.0), 10.0).unwrap();
            let layer = GridLayer::from_values("p", s, 1.0, vals.iter().map(|&v| v as f64).collect()).unwrap();
            let bytes = layer.payload();
            for (i, v) in vals.iter().enumerate() {
                prop_assert_eq!(&bytes[4 * i..4 * i + 4], &v.to_le_bytes());
            }
        }
    }
}
