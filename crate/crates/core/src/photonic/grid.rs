use log::warn;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Speed of light in nm·GHz (so `λ² Δf / c` comes out in nm).
const C_NM_GHZ: f64 = 299_792_458.0;

/// Time/frequency encoding grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalGrid {
    /// Center-to-center time-bin spacing Δt.
    pub bin_spacing_ns: f64,
    pub bin_width_ns: f64,
    /// Frequency-bin spacing Δf.
    pub freq_spacing_ghz: f64,
    /// Width of one frequency bin δf.
    pub freq_linewidth_ghz: f64,
    pub center_wavelength_nm: f64,
}

impl PhysicalGrid {
    /// 3-bin grid: 6 ns time bins (3 ns wide) and a 380 GHz microring comb
    /// with 250 MHz linewidths around 1553.9 nm.
    pub fn microring() -> Self {
        Self {
            bin_spacing_ns: 6.0,
            bin_width_ns: 3.0,
            freq_spacing_ghz: 380.0,
            freq_linewidth_ghz: 0.25,
            center_wavelength_nm: 1553.9,
        }
    }

    /// 16-bin grid: 1.2 ns time bins (~200 ps wide) and 22 GHz wide
    /// frequency bins on a 75 GHz grid, centered at 1546 nm (degenerate
    /// down-conversion of a 773 nm pump).
    pub fn broadband16() -> Self {
        Self {
            bin_spacing_ns: 1.2,
            bin_width_ns: 0.2,
            freq_spacing_ghz: 75.0,
            freq_linewidth_ghz: 22.0,
            center_wavelength_nm: 1546.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bin_spacing_ns", self.bin_spacing_ns),
            ("bin_width_ns", self.bin_width_ns),
            ("freq_spacing_ghz", self.freq_spacing_ghz),
            ("freq_linewidth_ghz", self.freq_linewidth_ghz),
            ("center_wavelength_nm", self.center_wavelength_nm),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "grid {name} must be positive, got {v}"
                )));
            }
        }
        let tbp = self.time_bandwidth_product();
        if tbp < 10.0 {
            warn!("Δf·Δt = {tbp:.2}; time and frequency bins are not well separated");
        }
        Ok(())
    }

    /// `Δf · Δt` (dimensionless).
    pub fn time_bandwidth_product(&self) -> f64 {
        self.freq_spacing_ghz * self.bin_spacing_ns
    }

    /// Wavelength offset of frequency bin `f` from bin 0, `λ² f Δf / c`.
    pub fn wavelength_offset_nm(&self, f: usize) -> f64 {
        self.center_wavelength_nm.powi(2) * f as f64 * self.freq_spacing_ghz / C_NM_GHZ
    }

    /// Group delay of frequency bin `f` relative to bin 0 behind a grating
    /// with the given dispersion.
    pub fn dispersion_delay_ns(&self, f: usize, dispersion_ns_per_nm: f64) -> f64 {
        dispersion_ns_per_nm.abs() * self.wavelength_offset_nm(f)
    }

    /// Delay of frequency bin `f` in whole time bins. Errors when the
    /// physical delay is further than `tolerance * Δt` from an integer bin.
    pub fn dispersion_delay_bins(&self, f: usize, dispersion_ns_per_nm: f64, tolerance: f64) -> Result<usize> {
        let delay_ns = self.dispersion_delay_ns(f, dispersion_ns_per_nm);
        let bins = (delay_ns / self.bin_spacing_ns).round();
        if (delay_ns - bins * self.bin_spacing_ns).abs() > tolerance * self.bin_spacing_ns {
            return Err(Error::DispersionMismatch {
                bin: f,
                delay_ns,
                bin_spacing_ns: self.bin_spacing_ns,
            });
        }
        Ok(bins as usize)
    }
}

/// Temporal spread of one frequency bin of width δf behind a dispersive
/// element: `|D| λ² δf / c`.
pub fn pulse_spread_ns(grid: &PhysicalGrid, dispersion_ns_per_nm: f64) -> f64 {
    dispersion_ns_per_nm.abs() * grid.center_wavelength_nm.powi(2) * grid.freq_linewidth_ghz / C_NM_GHZ
}
