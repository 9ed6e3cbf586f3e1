//! Configuration text, initial data, CSV ingestion and checksummed output.

mod config;
mod csv;
mod output;
mod preset;
mod tables;

pub use self::config::{apply_env_override, config_to_text, load_config, parse_config, OUT_DIR_ENV};
pub use self::csv::{
    fmt_num, load_profile_csv, write_curvature_csv, write_profile_csv, write_table, CURVATURE_HEADER, PROFILE_HEADER,
};
pub use self::output::{
    emit_state, emit_trajectory, grid_hash, load_trajectory, read_manifest, sha256_hex, verify_manifest,
    InventoryEntry, ManifestInventory, OutputDir, RunManifest, RunStatus, CONFIG_FILE, MANIFEST_FILE, TRAJECTORY_INDEX,
};
pub use self::preset::{initial_profile, preset_catalog, Preset, MAX_PERTURBATION};
pub use self::tables::{
    write_comparison_csv, write_mass_csv, write_orders_csv, write_residuals_csv, write_series_csv, COMPARISON_FILE,
    DIAGNOSTICS_FILE, MASS_FILE, ORDERS_FILE, RESIDUALS_FILE, SERIES_FILE,
};
