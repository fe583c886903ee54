//! Finitely presented modules over Z_p[G] for a cyclic p-group G, with the
//! invariants needed to tell formal spaces apart.

pub mod classifier;
pub mod cyclo;
pub mod group_ring;
pub mod identities;
pub mod invariants;
pub mod linalg;
pub mod presentation;
pub mod spaces;
