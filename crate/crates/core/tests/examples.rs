macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(simulate, "simulate_equidistant.rs", simulate_example_runs);
example!(enumerate, "enumerate_graphs.rs", enumerate_example_runs);
example!(lower_bound, "verify_lower_bound.rs", lower_bound_example_runs);
example!(report, "equidistant_report.rs", report_example_runs);
example!(export, "export_milp.rs", export_example_runs);
example!(bounds, "consensus_time_bounds.rs", bounds_example_runs);
