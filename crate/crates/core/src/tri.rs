//! Tetrahedron-level triangulation engine: gluing tables and their
//! validators, simplicial first homology, one-vertex torus boundary frames,
//! layering, high-distance gluings, and Dehn filling by layered solid tori.

mod frames;
mod homology;
mod io;
mod ops;
mod table;

pub use frames::{BlockData, BoundaryFrame, Complex};
pub use homology::{homology_h1, H1Descriptor};
pub use io::{parse_manifest, parse_tri_text, render_manifest, render_tri_text};
pub use ops::{
    fill_by_layered_solid_torus, glue_frames, glue_high_distance, DistanceStatus, GlueResult,
    FILL_MIN_DISTANCE,
};
pub use table::{
    validate, BoundaryComponent, Gluing, TriError, TriReport, Triangulation, EDGE_PAIRS,
};
