//! Shipped experiment presets, one per figure-style study.

pub const PRESETS: &[(&str, &str)] = &[
    (
        "fig1a_wind_energy_conservative",
        r#"[[experiment]]
name = "fig1a_wind_energy_conservative"
problem = "wind"
methods = ["lieep", "eavf"]
h = [0.05]
t_end = 1000.0
channels = ["polarized_energy", "discrete_energy"]
seed = 1001

[experiment.params]
r = 20.0
theta = "pi/2"
a = 0.5
"#,
    ),
    (
        "fig1b_wind_energy_dissipative",
        r#"[[experiment]]
name = "fig1b_wind_energy_dissipative"
problem = "wind"
methods = ["lieep", "eavf"]
h = [0.05]
t_end = 1000.0
channels = ["polarized_energy", "discrete_energy"]
seed = 1002

[experiment.params]
r = 20.0
theta = "pi/2 - 1e-4"
a = 0.5
"#,
    ),
    (
        "fig2_wind_order_conservative",
        r#"[[experiment]]
name = "fig2_wind_order_conservative"
problem = "wind"
methods = ["lieep", "eavf"]
h = [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125]
t_end = 1000.0
channels = []
seed = 1003
reference_substeps = 16
trace_stride = 0
timing_reps = 3

[experiment.params]
r = 20.0
theta = "pi/2"
a = 0.5
"#,
    ),
    (
        "fig2_wind_order_dissipative",
        r#"[[experiment]]
name = "fig2_wind_order_dissipative"
problem = "wind"
methods = ["lieep", "eavf"]
h = [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125]
t_end = 1000.0
channels = []
seed = 1004
reference_substeps = 16
trace_stride = 0
timing_reps = 3

[experiment.params]
r = 20.0
theta = "pi/2 - 1e-4"
a = 0.5
"#,
    ),
    (
        "fig3a_fpu_energy_internal_damping",
        r#"[[experiment]]
name = "fig3a_fpu_beta0"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1005
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.0

[[experiment]]
name = "fig3a_fpu_beta05"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1005
trace_stride = 200

[experiment.params]
beta = 0.5
gamma = 0.0

[[experiment]]
name = "fig3a_fpu_beta2"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1005
trace_stride = 200

[experiment.params]
beta = 2.0
gamma = 0.0
"#,
    ),
    (
        "fig3b_fpu_energy_external_damping",
        r#"[[experiment]]
name = "fig3b_fpu_gamma0"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1006
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.0

[[experiment]]
name = "fig3b_fpu_gamma0005"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1006
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.005

[[experiment]]
name = "fig3b_fpu_gamma005"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = ["polarized_energy"]
seed = 1006
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.05
"#,
    ),
    (
        "fig4_fpu_order_external_damping",
        r#"[[experiment]]
name = "fig4_fpu_order_external_damping"
problem = "fpu"
methods = ["lieep", "eavf"]
h = [0.5, 0.25, 0.125, 0.0625, 0.03125]
t_end = 100.0
channels = []
seed = 1007
reference_substeps = 16
trace_stride = 0
timing_reps = 3

[experiment.params]
beta = 0.0
gamma = 0.005
"#,
    ),
    (
        "fig5_fpu_order_internal_damping",
        r#"[[experiment]]
name = "fig5_fpu_order_internal_damping"
problem = "fpu"
methods = ["lieep", "eavf"]
h = [0.5, 0.25, 0.125, 0.0625, 0.03125]
t_end = 100.0
channels = []
seed = 1008
reference_substeps = 16
trace_stride = 0
timing_reps = 3

[experiment.params]
beta = 2.0
gamma = 0.0
"#,
    ),
    (
        "fig6_fpu_solutions",
        r#"[[experiment]]
name = "fig6_fpu_undamped"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = []
seed = 1009
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.0

[[experiment]]
name = "fig6_fpu_external"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = []
seed = 1009
trace_stride = 200

[experiment.params]
beta = 0.0
gamma = 0.005

[[experiment]]
name = "fig6_fpu_internal"
problem = "fpu"
methods = ["lieep"]
h = [0.025]
t_end = 500.0
channels = []
seed = 1009
trace_stride = 200

[experiment.params]
beta = 2.0
gamma = 0.0
"#,
    ),
    (
        "fig7a_pendulum_energy",
        r#"[[experiment]]
name = "fig7a_pendulum_energy"
problem = "pendulum"
methods = ["lieep"]
h = [1.0]
t_end = 1000.0
channels = ["polarized_energy", "discrete_energy", "original_energy"]
seed = 1010
"#,
    ),
    (
        "fig7b_pendulum_solution",
        r#"[[experiment]]
name = "fig7b_pendulum_solution"
problem = "pendulum"
methods = ["lieep"]
h = [0.3]
t_end = 1000.0
channels = ["original_energy"]
seed = 1011
"#,
    ),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}
