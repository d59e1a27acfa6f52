//! Configuration files, text rendering and multi-run comparison.

pub mod compare;
pub mod config;
pub mod floodplain;
pub mod render;

pub use compare::{compare_runs, CompareOptions, Comparison, EngineSummary, RunSummary};
pub use config::{parse_config, OutputOptions, RunConfig, RunConfigFile};
pub use floodplain::{floodplain_report, FloodplainReport};
pub use render::{parse_trait_grid, parse_trait_grids, render_trait_grids, RenderOptions};

/// Formats `x` to six significant digits for human-readable reports.
/// Structured outputs (JSON, CSV) keep full precision.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let scale = 10f64.powi(magnitude - 5);
    let rounded = if magnitude > 5 {
        (x / scale).round() * scale
    } else {
        x
    };
    format!("{rounded:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1256.9447962823285), "1256.94");
        assert_eq!(sig6(0.0012017), "0.00120170");
        assert_eq!(sig6(47.99079938038824), "47.9908");
        assert_eq!(sig6(12345678.0), "12345700");
        assert_eq!(sig6(-3.0), "-3.00000");
        assert_eq!(sig6(0.0), "0");
    }
}
