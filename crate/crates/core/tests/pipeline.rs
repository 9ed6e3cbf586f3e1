use warpflow::diagnostics::{diagnose, DiagnosticsOptions};
use warpflow::flow::{evolve, FlowConfig};
use warpflow::io::{emit_trajectory, load_trajectory, parse_config, OutputDir, RunStatus};
use warpflow::par::Execution;
use warpflow::residuals::{
    negative_control, order_study_with, Equation, Form, OrderVerdict, ResidualOptions, ResidualSpec,
};

fn config(text: &str) -> FlowConfig {
    parse_config(text).unwrap()
}

#[test]
fn stored_trajectory_reproduces_diagnostics() {
    let cfg = config("preset=hyperbolic\nM=128\nt_end=0.3\nrecord_every=100");
    let traj = evolve(&cfg).unwrap();
    let opts = DiagnosticsOptions::default();
    let first = diagnose(&traj, &opts).unwrap();

    let tmp = tempfile::tempdir().unwrap();
    let mut out = OutputDir::create(tmp.path()).unwrap();
    emit_trajectory(&mut out, &traj, Execution::Parallel).unwrap();
    out.finish(&cfg, traj.states[0].profile.grid(), traj.steps, RunStatus::Complete)
        .unwrap();

    let again = diagnose(&load_trajectory(tmp.path()).unwrap(), &opts).unwrap();
    assert_eq!(first, again);
    assert!(first.passed());
}

#[test]
fn sequential_and_parallel_diagnostics_agree() {
    let traj = evolve(&config(
        "preset=perturbed_hyperbolic(0.05,2,0.5)\nM=128\nt_end=0.1\nrecord_every=20",
    ))
    .unwrap();
    let par = diagnose(&traj, &DiagnosticsOptions::default()).unwrap();
    let seq = diagnose(
        &traj,
        &DiagnosticsOptions {
            exec: Execution::Sequential,
            ..DiagnosticsOptions::default()
        },
    )
    .unwrap();
    assert_eq!(par, seq);
}

#[test]
fn first_order_control_refines_at_first_order() {
    let cfg = config("preset=hyperbolic\nM=256\nt_end=0.2");
    let specs = [
        negative_control(),
        ResidualSpec::new(Equation::PsiHeat, Form::Printed, true),
    ];
    let study = order_study_with(&cfg, &specs, &ResidualOptions::default()).unwrap();
    let control = &study.orders[0];
    assert!((control.observed_order - 1.0).abs() < 0.2, "{control:?}");
    assert_ne!(control.verdict, OrderVerdict::Pass);
    let heat = &study.orders[1];
    assert_eq!(heat.verdict, OrderVerdict::Pass, "{heat:?}");
}

#[test]
fn printed_identities_are_flagged_off_the_exact_family() {
    let cfg = config("preset=perturbed_hyperbolic(0.1,2,0.5)\nM=256\nt_end=0.2");
    let specs = [
        ResidualSpec::new(Equation::K, Form::Printed, false),
        ResidualSpec::new(Equation::K, Form::Derived, true),
        // indistinguishable from the derived form while K0 = K1
        ResidualSpec::new(Equation::K1s, Form::Printed, false),
    ];
    let study = order_study_with(&cfg, &specs, &ResidualOptions::default()).unwrap();
    assert_eq!(study.orders[0].verdict, OrderVerdict::Discrepancy);
    assert!(study.orders[1].agrees_with_oracle(), "{:?}", study.orders[1]);
    assert_eq!(
        study.orders[2].verdict,
        OrderVerdict::Discrepancy,
        "{:?}",
        study.orders[2]
    );
}
