//! Quality metrics, the spatial 5/3 wavelet, a zero-order entropy size
//! estimate and method comparison reports.

mod dwt53;
mod metrics;
mod report;
mod size;

pub use dwt53::{dwt53_forward, dwt53_forward_1d, dwt53_inverse, dwt53_inverse_1d, subbands, Rect};
pub use metrics::{hp_energy, mse, psnr};
pub use report::{
    evaluate, write_report_csv, write_report_json, write_trace_csv, EvalOptions, EvalReport,
    PairRecord, SizeMeasure,
};
pub use size::{external_size, size_proxy, zero_order_entropy, HEADER_BYTES};
