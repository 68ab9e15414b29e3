//! Analysis of finite metric spaces: metric axioms and the Ptolemy
//! inequality, logarithmic and base-point metric transforms, exact Gromov
//! hyperbolicity and strong-hyperbolicity constants by quadruple
//! enumeration, and distortion of χ-metrics under Möbius maps of the
//! punctured unit ball.
//!
//! ```
//! use hypan_core::{generate, hyperbolicity, metric, transforms};
//!
//! let cloud = generate::gen_random_ball(12, 3, 7);
//! let space = metric::build_metric_from_points(&cloud).unwrap();
//! assert!(metric::ptolemy_defect(&space, 1e-9).is_ptolemy);
//!
//! let log = transforms::log_metric(&space);
//! let eps = hyperbolicity::strong_epsilon(&log, hyperbolicity::Mode::Exhaustive, 1e-12).unwrap();
//! assert!(eps.epsilon_star.admits(2.0 - 1e-6));
//! ```

pub mod error;
pub mod generate;
pub mod hyperbolicity;
pub mod io;
pub mod metric;
pub mod moebius;
mod scan;
pub mod space;
pub mod transforms;

pub use error::{Error, Result};
pub use space::{FiniteMetricSpace, Pairing, PointCloud, QuadrupleWitness};
