//! Finite-truncation models of partial-isometric semigroup representations.
//!
//! The crate builds the concrete operator families that arise when a positive
//! cone `Γ⁺ ⊆ ℝ` acts by shifts (Toeplitz isometries, truncated shifts on
//! intervals, grid shifts) and turns the algebraic identities they satisfy
//! into machine-checkable residuals. Identities between genuinely finite
//! operators are asserted exactly; identities between truncations of
//! infinite-dimensional operators are asserted on a guard band that excludes
//! the labels polluted by the cutoff.

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod ops;
pub mod reps;
pub mod sigma;
pub mod spaces;
pub mod universal;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance};
pub use ops::{Basis, Budget, Operator};
pub use spaces::{IndexSet, SemigroupElement};

/// Keeps glibc from returning large matrix buffers to the kernel after every
/// drop. Verification loops allocate a few megabytes per identity; without
/// this the allocator spends most of its time faulting pages back in. No-op
/// on other C runtimes. Safe to call more than once.
pub fn tune_allocator() {
    #[cfg(target_env = "gnu")]
    {
        extern "C" {
            fn mallopt(param: core::ffi::c_int, value: core::ffi::c_int) -> core::ffi::c_int;
        }
        const M_TRIM_THRESHOLD: core::ffi::c_int = -1;
        const M_MMAP_THRESHOLD: core::ffi::c_int = -3;
        unsafe {
            mallopt(M_TRIM_THRESHOLD, 64 << 20);
            mallopt(M_MMAP_THRESHOLD, 64 << 20);
        }
    }
}
