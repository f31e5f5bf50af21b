//! Matrix-set files, seeded family generators, property campaigns and the
//! spectral radius map.

mod campaign;
mod generators;
mod io;
mod lambda_map;

pub use campaign::{
    run_campaign, CampaignReport, CheckOutcome, CheckStatus, Histogram, ReportHeader, Suite, Summary, TrialReport,
};
pub use generators::{
    generate_family, generate_trial, generate_with, kleinecke_shirokov_instance, stable_pair, CampaignConfig,
    GeneratorKind,
};
pub(crate) use io::write_text as io_write;
pub use io::{
    load_matrix_set, parse_matrix_set, save_matrix_set, MatrixSet, MatrixSetFile, Metadata, NamedMatrix, FORMAT_VERSION,
};
pub use lambda_map::{lambda_map, write_lambda_csv, Grid};
