//! Plane trees and their scaling-limit toolkit: encoding walks, the
//! rotation/co-rotation correspondences, looptrees, exact conditioned
//! Galton-Watson sampling, càdlàg functions with M1 distance bounds, and
//! Gromov-Hausdorff(-Prokhorov) estimators over finite metric clouds.

pub mod rmq;
pub mod tree;
pub mod walk;
pub mod looptree;
pub mod transform;
pub mod sampler;
pub mod cadlag;
pub mod m1;
pub mod metric;
pub mod experiments;
