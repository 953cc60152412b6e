//! Building expected-utility weights from a preference, gluing them across
//! covers, and reporting where that fails.

pub mod calibration;
pub mod complex;
pub mod global;
pub mod local;
pub mod transform;

pub use calibration::{check_monotonicity, solve_calibration, Calibration, CutCell, DedekindState};
pub use complex::{harmonize_complex, Attachment, Chart, Complex, Harmonization, Harmonized, PathCheck, ScalarPlt};
pub use global::{
    classical_representation, constant_prize_representation, glue_representations, ClassicalRep, GlobalRep, Glue,
    GlueObstruction, StrictPiece,
};
pub use local::{check_soundness, local_representation, Calib, LocalOutcome, LocalRep, Soundness};
pub use transform::{uniqueness_transform, Limits, Plt, Transform, TransformObstruction};
