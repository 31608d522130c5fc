//! Exhaustive enumeration of 2-neighborly polytopes through their
//! facet-vertex incidence matrices, with Gale-diagram enumeration for the
//! few-vertex cases and an exact hull oracle for integer point sets.

pub mod canonical;
pub mod fixtures;
pub mod gale;
pub mod hull;
pub mod incmat;
pub mod lattice;
pub mod search;

pub use canonical::{canonical_form, canonical_key, CanonicalKey, FacetIndex};
pub use gale::{GalePair, ReducedGaleDiagram};
pub use hull::{CatalogEntry, PointList};
pub use incmat::{get_facet, is_two_neighborly, pyramid, validate, IncidenceMatrix, MatrixError};
pub use lattice::FacePoset;
pub use search::{find_matrices, CampaignSpec};
