//! Reading and writing puzzle groups, solutions and fragment metadata.
//!
//! A 2D group directory holds one `<id>.png` per fragment (transparent
//! background), a `ground_truth.txt` with one `id x_px y_px theta_deg` line
//! per fragment, and optional `<id>.json` metadata. A 3D group holds
//! `<id>.obj` meshes (vertex records only) and an optional ground truth file
//! with `id r11 .. r33 tx ty tz` lines; without it the meshes are taken to be
//! in assembled position.

mod group;
mod metadata;
mod obj;
mod scale;
mod solution;

pub use group::{
    detect_dimension, list_groups, load_group, load_group_2d, load_group_3d, save_group_2d,
    LoadOptions, Pivot, GT_FILE, GT_HEADER,
};
pub use metadata::{parse_metadata, parse_metadata_str, FragmentMetadata, GeometricSummary};
pub use obj::{parse_obj_vertices, read_obj};
pub use scale::{mm_to_px, RenderScale};
pub use solution::{
    format_sig, load_solution, load_solution_2d, load_solution_3d, parse_solution, save_solution_2d,
    save_solution_3d, write_atomic, AnySolution,
};
