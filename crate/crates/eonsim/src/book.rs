//! Keeps the guide honest: every fenced Rust snippet in `book/src/` is
//! compiled and run as a doc-test of this module.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub struct $name;
    };
}

chapter!(Introduction, "../../../book/src/introduction.md");
chapter!(NetworkModel, "../../../book/src/network-model.md");
chapter!(DegradedRouting, "../../../book/src/degraded-routing.md");
chapter!(ElectricDegradation, "../../../book/src/electric-degradation.md");
chapter!(OpticalDegradation, "../../../book/src/optical-degradation.md");
chapter!(Simulation, "../../../book/src/simulation.md");
chapter!(Experiments, "../../../book/src/experiments.md");
