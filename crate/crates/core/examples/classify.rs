//! Full analysis of a few symbols on a ray.
use treelip::multop::analyze;
use treelip::{parse, TailPolicy, Tree, WeightTable};

fn main() -> treelip::Result<()> {
    let tree = Tree::regular(1, 256)?;
    let table = WeightTable::new(1, 256)?;
    for src in [
        "expr = 1, root = 1",
        "expr = 1/n, tail = monotone-decreasing-modulus",
        "expr = ell(1, n)",
        "expr = exp(i*n), root = 1",
    ] {
        let r = analyze(&parse(src)?, &tree, &table, TailPolicy::default())?;
        println!(
            "{src:<48} bounded {:?}  compact {:?}  below {:?}  ||M|| in [{:?}, {:?}]",
            r.bounded_verdict.verdict,
            r.compact_verdict.verdict,
            r.bounded_below_verdict.verdict,
            r.opnorm_lower,
            r.opnorm_upper,
        );
    }
    Ok(())
}
