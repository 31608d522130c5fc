//! Bundled reference data: the catalog point sets and the two printed
//! matrices used as regression fixtures.

use crate::hull::{parse_catalog, CatalogEntry};
use crate::incmat::IncidenceMatrix;

pub const CATALOG: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/catalog.txt"));
pub const FIG6: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/matrices/fig6.txt"));
pub const FIG10: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/matrices/fig10.txt"));

/// The 9×9 matrix of the 2-simplicial, 2-simple 5-polytope.
pub fn fig6() -> IncidenceMatrix {
    FIG6.parse().expect("bundled matrix parses")
}

/// The 17×18 partial matrix of the would-be 8-polytope over `P_{7,14,16}`.
pub fn fig10() -> IncidenceMatrix {
    FIG10.parse().expect("bundled matrix parses")
}

pub fn catalog() -> Vec<CatalogEntry> {
    parse_catalog(CATALOG).expect("bundled catalog parses")
}

/// The catalog entry with the given name, e.g. `P_{4,6,9}`.
pub fn entry(name: &str) -> CatalogEntry {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("no catalog entry {name}"))
}

/// Incidence matrix of a catalog entry, computed from its coordinates.
pub fn matrix(name: &str) -> IncidenceMatrix {
    entry(name).incidence().expect("catalog entry has a valid hull")
}
