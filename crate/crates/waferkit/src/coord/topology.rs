//! Wafer topology constants, loaded from a versioned text file.
//!
//! The canonical file lives at `data/wafer_topology.toml` and is compiled
//! into the library; [`Topology::load`] reads the same schema from disk for
//! tooling that wants to inspect or validate alternative grids.

use std::sync::OnceLock;

use serde::Deserialize;

use super::CoordError;

pub const TOPOLOGY_FORMAT_VERSION: u32 = 1;

const DEFAULT_TOPOLOGY: &str = include_str!("../../data/wafer_topology.toml");

#[derive(Debug, Deserialize)]
struct TopologyFile {
    version: u32,
    hicann_row_widths: Vec<u16>,
    reticle_width: u16,
    reticle_height: u16,
    max_wafer_id: u16,
    horizontal_buses: u16,
    vertical_buses_per_side: u16,
    switch_modulus: u16,
    driver_select_modulus: u16,
}

/// One wafer row of the chip grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridRow {
    /// First occupied x column.
    pub offset: u16,
    /// Number of chips in this row.
    pub width: u16,
    /// Enumeration index of the row's first chip.
    pub enum_base: u16,
}

/// Parsed and validated topology tables.
#[derive(Debug, Clone)]
pub struct Topology {
    pub version: u32,
    pub rows: Vec<GridRow>,
    pub grid_columns: u16,
    pub chip_count: u16,
    pub reticle_width: u16,
    pub reticle_height: u16,
    pub fpga_count: u16,
    /// Per row band (pair of rows), the enumeration index of its first reticle.
    pub reticle_base: Vec<u16>,
    pub max_wafer_id: u16,
    pub horizontal_buses: u16,
    pub vertical_buses_per_side: u16,
    pub switch_modulus: u16,
    pub driver_select_modulus: u16,
}

impl Topology {
    pub fn parse(text: &str) -> Result<Self, CoordError> {
        let file: TopologyFile =
            toml::from_str(text).map_err(|e| CoordError::Topology(e.to_string()))?;
        if file.version != TOPOLOGY_FORMAT_VERSION {
            return Err(CoordError::Topology(format!(
                "unsupported topology version {} (expected {})",
                file.version, TOPOLOGY_FORMAT_VERSION
            )));
        }
        if file.hicann_row_widths.is_empty() || file.hicann_row_widths.len() % 2 != 0 {
            return Err(CoordError::Topology(
                "row count must be positive and even".into(),
            ));
        }
        let grid_columns = *file.hicann_row_widths.iter().max().unwrap();
        let mut rows = Vec::with_capacity(file.hicann_row_widths.len());
        let mut enum_base = 0u16;
        for (y, &width) in file.hicann_row_widths.iter().enumerate() {
            if width == 0 || width % file.reticle_width != 0 {
                return Err(CoordError::Topology(format!(
                    "row {y} width {width} is not a multiple of the reticle width"
                )));
            }
            if (grid_columns - width) % 2 != 0 {
                return Err(CoordError::Topology(format!(
                    "row {y} width {width} cannot be centered on {grid_columns} columns"
                )));
            }
            rows.push(GridRow {
                offset: (grid_columns - width) / 2,
                width,
                enum_base,
            });
            enum_base += width;
        }
        for pair in rows.chunks(file.reticle_height as usize) {
            if pair.iter().any(|r| r.width != pair[0].width) {
                return Err(CoordError::Topology(
                    "vertically adjacent rows must have equal width to tile reticles".into(),
                ));
            }
        }
        let mut reticle_base = Vec::new();
        let mut fpga_count = 0u16;
        for band in rows.chunks(file.reticle_height as usize) {
            reticle_base.push(fpga_count);
            fpga_count += band[0].width / file.reticle_width;
        }
        if file.switch_modulus == 0
            || (2 * file.vertical_buses_per_side) % file.switch_modulus != 0
        {
            return Err(CoordError::Topology(
                "switch_modulus must divide the vertical line count".into(),
            ));
        }
        if file.driver_select_modulus == 0 {
            return Err(CoordError::Topology("driver_select_modulus must be > 0".into()));
        }
        Ok(Topology {
            version: file.version,
            chip_count: enum_base,
            grid_columns,
            rows,
            reticle_width: file.reticle_width,
            reticle_height: file.reticle_height,
            fpga_count,
            reticle_base,
            max_wafer_id: file.max_wafer_id,
            horizontal_buses: file.horizontal_buses,
            vertical_buses_per_side: file.vertical_buses_per_side,
            switch_modulus: file.switch_modulus,
            driver_select_modulus: file.driver_select_modulus,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CoordError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoordError::Topology(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Total vertical bus lines per chip (both sides).
    pub fn vertical_buses(&self) -> u16 {
        2 * self.vertical_buses_per_side
    }

    /// Chips per reticle, i.e. per FPGA.
    pub fn chips_per_reticle(&self) -> u16 {
        self.reticle_width * self.reticle_height
    }
}

/// The compiled-in topology every coordinate type refers to.
pub fn topology() -> &'static Topology {
    static TOPOLOGY: OnceLock<Topology> = OnceLock::new();
    TOPOLOGY.get_or_init(|| {
        Topology::parse(DEFAULT_TOPOLOGY).expect("built-in topology file must be valid")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_topology_parses() {
        let t = topology();
        assert_eq!(t.chip_count, 384);
        assert_eq!(t.fpga_count, 48);
        assert_eq!(t.grid_columns, 36);
        assert_eq!(t.rows.len(), 16);
        assert_eq!(t.chips_per_reticle(), 8);
    }

    #[test]
    fn rejects_unknown_version() {
        let text = DEFAULT_TOPOLOGY.replace("version = 1", "version = 99");
        assert!(matches!(
            Topology::parse(&text),
            Err(CoordError::Topology(_))
        ));
    }

    #[test]
    fn rejects_unpairable_rows() {
        let text = DEFAULT_TOPOLOGY.replace(
            "[12, 12, 20, 20, 28, 28, 36, 36, 36, 36, 28, 28, 20, 20, 12, 12]",
            "[12, 20, 20, 20, 28, 28, 36, 36, 36, 36, 28, 28, 20, 20, 12, 12]",
        );
        assert!(Topology::parse(&text).is_err());
    }
}
