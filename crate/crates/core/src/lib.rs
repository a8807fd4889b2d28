//! Edge-to-edge tilings by convex pentagons: type table and classification,
//! candidate pattern enumeration, backtracking patch search, and periodicity
//! certificates.

pub mod cases;
pub mod certificate;
pub mod dump;
pub mod engine;
pub mod exact;
pub mod geometry;
pub mod labels;
pub mod model;
pub mod periodic;
pub mod render;
pub mod solve;
pub mod spec_file;
pub mod table;
pub mod verify;

pub use geometry::{
    build_pentagon, closure_defect, overlap, AngleVector, Congruence, EdgeVector, GeometryError,
    Overlap, PentagonShape, Tolerance, Vec2,
};
pub use labels::{Relabel, Triple};
pub use model::{
    classify, corollary1_applies, tentative_3valent_profile, ClassificationResult,
    TentativeNodeProfile,
};
pub use table::{load_type_table, parse_type_table, TableError, TypeDefinition, TypeTable};

pub use cases::{
    enumerate_angle_conditions, enumerate_candidate_patterns, first_stage_sort, parse_hypotheses, refine,
    solve_candidate, AngleCondition, CandidatePattern, Disposition, ReductionRules, SortConfig, SortReport,
};
pub use certificate::{certify, Certificate, CertifyError, CertifyOptions, Stage, VerifyError};
pub use dump::PatchDump;
pub use engine::{grow, seed_patch, GrowResult, Limits, Outcome, Patch, Prototile, SearchStats, SeedSpec};
pub use periodic::{
    build_torus, detect_periods, lemma1_check, node_density, DensityReport, Lemma1, PeriodLattice, TorusError,
    TorusTiling,
};
pub use render::{render_svg, Figure};
pub use solve::{solve_constraints, ConstraintSet, Family, SolveError, SolveOptions, SolveOutcome};
pub use spec_file::{load_specs, parse_specs, PentagonSpec, SpecError};
pub use verify::{verify_certificate, VerifyReport};
