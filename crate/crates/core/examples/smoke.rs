use lieep_core::integrators::{integrate, IntegrateOptions, Method};
use lieep_core::problems::{wind_initial, wind_oscillator, WindOscillatorParams};
use std::time::Instant;

fn main() {
    let (sys, pot, _) = wind_oscillator(WindOscillatorParams::<f64>::conservative()).unwrap();
    let y0 = wind_initial::<f64>();
    for h in [0.1, 0.025, 0.003125] {
        let t_end = 100.0;
        let n = (t_end / h) as u32;
        let opts = IntegrateOptions::new(Method::Lieep, h, t_end);
        let t0 = Instant::now();
        let run = integrate(&sys, Some(&pot), &y0, &opts).unwrap();
        assert!(run.failure.is_none());
        let lieep_ns = run.stepping_time.as_nanos() as f64 / n as f64;
        let _ = t0;
        let opts = IntegrateOptions::new(Method::Eavf, h, t_end);
        let run2 = integrate(&sys, Some(&pot), &y0, &opts).unwrap();
        assert!(run2.failure.is_none());
        let eavf_ns = run2.stepping_time.as_nanos() as f64 / n as f64;
        println!("wind h={h}: lieep {lieep_ns:.0}ns/step, eavf {eavf_ns:.0}ns/step (iters {:.1}), ratio {:.2}",
            run2.mean_iterations.unwrap(), lieep_ns / eavf_ns);
    }
}
