//! Piecewise-flat geometry on the boundary complexes of 4-dimensional
//! cyclic polytopes.
//!
//! The crate builds the simplicial 3-sphere `∂C(n,4)` combinatorially,
//! equips it with edge-length metrics (most importantly cyclic length
//! metrics, where a length depends only on the cyclic distance of the edge's
//! endpoints), computes discrete curvatures and the length- and
//! volume-normalized Einstein-Hilbert-Regge functionals, and explores
//! conformal classes: numerical gradients, critical-point search, and a
//! decision procedure for whether a class contains a cyclic length metric.
//!
//! Modules:
//! - [`complex`]: facet enumeration, tetrahedron types, symmetry, and an
//!   independent moment-curve hull oracle.
//! - [`geometry`]: single-tetrahedron metric geometry from edge lengths.
//! - [`curvature`]: curvature assembly, totals, functionals, and the
//!   constant-scalar-curvature checks.
//! - [`conformal`]: conformal classes, finite-difference variation,
//!   optimization, and admissibility.

pub mod complex;
pub mod conformal;
pub mod curvature;
pub mod fmt;
pub mod geometry;

pub use complex::{
    build_complex, cyclic_distance, gale_facets_oracle, Complex, ComplexError, Parity, TetraType,
};
pub use conformal::{
    conformal_lengths, cyclic_admissibility, find_critical_point, grad_lehr_fd, grad_vehr_fd,
    Admissibility, ConformalData, ConformalError, CriticalPointRun, OptimizeOptions, Outcome,
    Target,
};
pub use curvature::{
    check_csc, cyclic_metric, edge_curvature, functionals, report, vertex_curvature, CscCheck,
    CurvatureError, CurvatureReport, CyclicLevels, Functionals, Metric,
};
pub use geometry::{
    circumcenter, face_angle, face_area, EmbeddedTetra, GeometryError, TetraData, TetraLengths,
};
