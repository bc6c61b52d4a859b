//! Spectra from the range of the symbol plus its declared tail.
use treelip::multop::Analyzer;
use treelip::{parse, TailPolicy, Tree, WeightTable};

fn main() -> treelip::Result<()> {
    let tree = Tree::regular(2, 10)?;
    let table = WeightTable::new(1, 10)?;
    for src in [
        "expr = 1, root = 2, patch 3 = -1",
        "expr = 1/n, root = 1, tail = monotone-decreasing-modulus",
        "expr = 1 + 1/n, root = 2, tail = monotone-decreasing-modulus to 1",
    ] {
        let spec = parse(src)?;
        let psi = spec.evaluate(&tree)?;
        let a = Analyzer::new(&psi, spec.tail_meta, &table, TailPolicy::default())?;
        let s = a.spectrum()?;
        let below = a.bounded_below()?;
        println!(
            "{src}\n  {} eigenvalues, closure adds {:?}, bounded below: {:?}",
            s.point_spectrum.len(),
            s.closure_extras,
            below.classification.verdict
        );
    }
    Ok(())
}
