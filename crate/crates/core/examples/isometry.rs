//! Unimodular constants are isometries; non-constant phases are not.
use treelip::multop::Analyzer;
use treelip::{parse, TailPolicy, Tree, WeightTable};

fn main() -> treelip::Result<()> {
    let tree = Tree::regular(2, 8)?;
    let table = WeightTable::new(1, 8)?;
    for src in ["expr = -1, root = -1", "expr = 0.6+0.8i, root = 0.6+0.8i", "expr = exp(i*n), root = 1"] {
        let spec = parse(src)?;
        let psi = spec.evaluate(&tree)?;
        let r = Analyzer::new(&psi, spec.tail_meta, &table, TailPolicy::default())?.isometry_check()?;
        match r.witness {
            None => println!("{src}: consistent over {} probes", r.probes),
            Some(w) => println!("{src}: {} gives {:.6} vs {:.6}", w.probe, w.psi_f_norm, w.f_norm),
        }
    }
    Ok(())
}
