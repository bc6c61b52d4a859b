//! Parsing, printing and evaluating symbols.
use treelip::{parse, Tree};

fn main() -> treelip::Result<()> {
    let spec = parse("expr = 1/2 + 1/n\nroot = 1\npatch 5 = 2i\ntail = monotone-decreasing-modulus to 0.5")?;
    println!("canonical:\n{}", spec.to_text());

    let tree = Tree::regular(2, 4)?;
    let psi = spec.evaluate(&tree)?;
    for v in [0, 1, 5, 30] {
        println!("psi({v}) = {}", psi.value(v));
    }

    match parse("expr = n +") {
        Err(e) => println!("error: {e}"),
        Ok(_) => unreachable!(),
    }
    if let Err(e) = parse("expr = ln(2 - n)")?.evaluate(&tree) {
        println!("evaluation: {e}");
    }
    Ok(())
}
