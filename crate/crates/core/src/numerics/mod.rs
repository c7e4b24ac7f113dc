//! Numerical kernels shared by every other module.

mod calibrate;
mod linalg;
mod logistic;
mod normal;

pub use calibrate::{calibrate_intercept, calibrate_intercept_within, mean_expit, CALIBRATION_BRACKET};
pub use linalg::{least_squares, Matrix, CONDITION_CAP};
pub use logistic::{expit, logistic_fit, logit, LogisticModel, SolveReport};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, phi, standard_normal_from_uniform};
