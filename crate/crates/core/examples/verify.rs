//! The invariant suites that back `verify-weights` and `verify-space`.
use treelip::verify::{verify_space, verify_weights};

fn main() -> treelip::Result<()> {
    let reports = [verify_weights(4, 100_000)?, verify_space(1, 42, 50, 10)?];
    for c in reports.iter().flat_map(|r| &r.checks) {
        println!("{} {:<28} {:.3e}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.worst_violation);
    }
    Ok(())
}
