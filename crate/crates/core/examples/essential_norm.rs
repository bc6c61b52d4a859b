//! Essential-norm sandwich and its window history.
use treelip::multop::Analyzer;
use treelip::{parse, TailPolicy, Tree, WeightTable};

fn main() -> treelip::Result<()> {
    let tree = Tree::regular(1, 2000)?;
    let table = WeightTable::new(1, 2000)?;
    let spec = parse("expr = 1/2 + 1/n, root = 1, tail = monotone-decreasing-modulus to 0.5")?;
    let psi = spec.evaluate(&tree)?;
    let a = Analyzer::new(&psi, spec.tail_meta, &table, TailPolicy::default())?;
    let e = a.essential_norm_bounds()?;
    println!("A_N = {:.5}, B_N = {:.5}, sandwich [{:.5}, {:.5}]", e.a_n, e.b_n, e.lower, e.upper);
    for h in e.history.iter().step_by(400) {
        println!("  window ending at {:>4}: A {:.5} B {:.5}", h.end, h.a, h.b);
    }
    let w = a.essnorm_lower_witness(0.5)?;
    println!("shell route {:.5}, plateau route {:.5}", w.a_route, w.b_route);
    Ok(())
}
