//! Trace the double arrowhead in both directions and locate the end of its auxetic
//! interval, where the reflex vertex reaches the diagonal.

use periodica::constructors::double_arrowhead;
use periodica::path::{auxetic_interval, trace_bidirectional, TraceConfig};
use periodica::quotient::to_periodic;

fn main() -> periodica::Result<()> {
    let framework = to_periodic(&double_arrowhead())?;
    let config = TraceConfig {
        max_steps: 80,
        ..TraceConfig::default()
    };
    let path = trace_bidirectional(&framework, &config)?;
    println!("{:>8} {:>10} {:>10} {:>10}  verdict", "tau", "w11", "w22", "|w12|");
    for s in path.samples().iter().step_by(10) {
        println!(
            "{:>8.3} {:>10.5} {:>10.5} {:>10.2e}  {:?}",
            s.tau,
            s.omega.get(0, 0),
            s.omega.get(1, 1),
            s.omega.get(0, 1).abs(),
            s.verdict.kind
        );
    }
    let interval = auxetic_interval(&path)?;
    println!(
        "auxetic on ({:.9}, {:.9}); ends: {:?}, {:?}",
        interval.lo, interval.hi, interval.lo_kind, interval.hi_kind
    );
    println!("max edge-length drift: {:.2e}", path.max_length_drift());
    Ok(())
}
