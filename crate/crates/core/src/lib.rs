//! Comparison-geometry toolkit.
//!
//! The crate measures how triangles in a geodesic space compare against
//! triangles with the same side lengths in the constant-curvature model
//! surfaces, and turns violations of the comparison inequality into
//! machine-checkable certificates:
//!
//! - [`spaceform`]: trigonometry in the model surfaces (law of cosines both
//!   ways, canonical comparison triangles, the gluing comparison).
//! - [`space`]: geodesic-space backends — weighted graphs, meshed spheres,
//!   and analytic plane / sphere / hyperbolic / flat-cone charts — behind one
//!   distance/geodesic/sampling interface.
//! - [`comparison`]: probe-scale angle measurement, the bad-angle predicate,
//!   and ball-local curvature checks.
//! - [`globalize`]: the constructive engine that splits bad triangles at the
//!   negative minimum of the excess function, localizes the defect, and runs
//!   the distance-descent audit that either certifies the comparison
//!   inequality at resolution or walks a trace into the defect region.
//!
//! ```
//! use toposcope::comparison::{badness, default_badness_tol, Triangle};
//! use toposcope::{Curvature, Space, Vertex};
//!
//! // a flat cone with angle surplus concentrates negative curvature at its
//! // apex; a triangle whose base crosses the apex certifies bad for k = 0
//! let cone = Space::build_cone(3.0 * std::f64::consts::PI, 0.02)?;
//! let p = cone.parse_point("1.0:0.0")?;
//! let r1 = cone.parse_point("0.5:2.98")?;
//! let r2 = cone.parse_point("0.5:6.44")?;
//! let tri = Triangle::from_vertices(&cone, p, r1, r2)?;
//! let cert = badness(&cone, Curvature::flat(), &tri, Vertex::Q, default_badness_tol(&cone))?
//!     .expect("the apex defect is detectable");
//! assert!(cert.deficit > 0.1);
//! # Ok::<(), toposcope::GeomError>(())
//! ```

pub mod comparison;
pub mod error;
pub mod globalize;
pub mod space;
pub mod spaceform;

pub use error::{GeomError, Result};
pub use space::{BackendKind, GeodesicPolyline, GraphInput, PointRef, Space, SpaceDescriptor};
pub use spaceform::{
    alexandrov_compare, build_comparison_triangle, comparison_angle, model_distance,
    side_from_angle, AlexandrovComparison, ComparisonTriangle, Curvature, GluedVerdict, ModelPoint,
    SideTriple, Vertex,
};
