//! Closed-form references: Landau damping dominant mode and the Hill envelope.

pub mod dispersion;
pub mod hill;
pub mod plasma_z;

pub use dispersion::{
    dispersion_d, dispersion_d_prime, dispersion_n, dispersion_table, landau_reference_e, residue, solve_dominant_root, DispersionRoot,
};
pub use hill::{hill_envelope, hill_reference_xrms, periodic_omega0, HillCoefficient, HillEnvelope};
pub use plasma_z::{faddeeva, plasma_z, plasma_z_prime};
