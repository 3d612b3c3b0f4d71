//! p-adic numbers with tracked precision, truncated power series over `ℚ`
//! and `ℚ_p`, and the formal-group side of the theta distribution relation.

pub mod formal;
pub mod number;
pub mod series;

pub use formal::{
    doubling_series, dump_series, formal_duplication, formal_group_log, half_period_values,
    log_theta_hat, padic_distribution_report, sigma_series, theta_hat_series, verify_padic_distribution,
    w_series, CMCurveModel, LogThetaHat,
};
pub use number::{padic_log, parse_rational, rational_string, teichmuller, PadicNumber};
pub use series::{Coeff, PadicSeries, PowerSeries, RationalSeries};
