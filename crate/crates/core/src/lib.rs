//! Point counts of squarefree polynomials over finite fields weighted by
//! labeled-cycle-type statistics, and the equivariant Orlik–Solomon
//! cohomology of the orbit configuration space of `C^*` under `Z/dZ`.

pub mod cyclotomic;
pub mod finite_field;
pub mod os_cohomology;
pub mod polyspace;
pub mod stats_engine;
pub mod wreath_char;
