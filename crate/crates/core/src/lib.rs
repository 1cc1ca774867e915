pub mod acm_curve;
pub mod cohomology;
pub mod exact_algebra;
pub mod pencil;
pub mod rational_curve;
pub mod reality;
pub mod twistor_metric;
