//! Classical Yang-Baxter data, the Drinfeld correspondence, twists killing the
//! associator, and the resulting R-matrices.

mod classical;
mod quantum;

pub use classical::{cybe_residual, drinfeld_subalgebra, symplectic_to_r, DrinfeldPair, ThreeTensor};
pub use quantum::{
    fiber_functor_check, r_matrix, recover_r, solve_twist, twist_bound, verify_qybe, RMatrixSeries, TwistSeries,
    TwistStep,
};
