//! Multiparticle free-entanglement measure.
//!
//! An N-particle state is split into two groups in every way allowed by the
//! bipartite counting rule (all subsets of size 1..=⌊N/2⌋). A bipartite
//! measure is evaluated across each cut and the results are averaged into a
//! single figure `E_bar`. The same per-cut values drive a three-way
//! classification: every cut separable, no cut separable, or something in
//! between.
//!
//! Module map:
//!
//! * [`numeric`] — dense complex matrices, Kronecker products, Hermitian
//!   eigenvalues, trace norm.
//! * [`state`] — subsystem shapes, pure states, density matrices, cuts and the
//!   text file format.
//! * [`regroup`] — cut enumeration and the permutation operators that bring a
//!   cut's particles to the front, plus an index-relabel oracle.
//! * [`measures`] — partial trace/transpose, concurrence, entropy, negativity.
//! * [`aggregate`] — `E_bar`, classification, and the two closed-form families.
//! * [`cli`] — the `multient` command-line front end.

pub mod aggregate;
pub mod cli;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod regroup;
pub mod state;

pub use aggregate::{
    build_three_qubit_state, classify, free_entanglement, free_entanglement_with_mode,
    isotropic_closed_form, isotropic_state, sweep_isotropic, three_qubit_closed_form,
    MeasureReport, SweepRow, Verdict, VerdictClass,
};
pub use error::{Error, Result};
pub use measures::{CutValue, Grouping, MeasureKind, Side};
pub use numeric::{ComplexMatrix, C64};
pub use regroup::{enumerate_bipartitions, enumerate_cuts, CutMode, GroupingPlan};
pub use state::{parse_state, Bipartition, DensityMatrix, PureState, State, SubsystemShape};
