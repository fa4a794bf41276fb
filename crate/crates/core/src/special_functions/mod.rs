//! Bessel, Hankel and spherical Bessel functions at large order, their
//! asymptotic forms, and an arbitrary-precision series oracle.

mod asymptotic;
mod bessel;
mod oracle;
mod order;

pub use asymptotic::{
    debye, large_order, large_order_h, large_order_h_spherical, large_order_j,
    large_order_j_spherical, large_order_y_spherical, DebyeKind, LargeOrderFunction,
    SeriesTruncation,
};
pub use bessel::{
    bessel_j, bessel_y, derivative, evaluate, hankel1, ratio_cprime_c, spherical,
    wronskian_residual, Cylinder, CylinderFunctions, Family, RatioKind, Spherical,
};
pub use oracle::{
    golden_csv_row, series_oracle_j, series_oracle_y, HighPrecision, GOLDEN_CSV_HEADER,
};
pub use order::{Order, OrderKind};
