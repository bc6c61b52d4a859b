//! Norms of catalog functions, with the per-depth sups that show convergence.
use treelip::{CatalogEntry, Tree, WeightTable};

fn main() -> treelip::Result<()> {
    let tree = Tree::regular(2, 10)?;
    let table = WeightTable::new(2, 10)?;
    for e in [
        CatalogEntry::Chi { v: 3 },
        CatalogEntry::Sector { v: 3 },
        CatalogEntry::ScaledSector { w: 3 },
        CatalogEntry::Shell { n: 4 },
        CatalogEntry::EllProfile,
    ] {
        let r = e.build(&tree, &table)?.norm_k(&table)?;
        println!("{:<24} norm {:>10.6}  argmax {:?}", e.label(), r.value, r.argmax);
    }

    // h_n on a long ray: the norm settles near 1 + p
    let ray = Tree::regular(1, 1000)?;
    let table = WeightTable::new(1, 1000)?;
    let h = CatalogEntry::PowerPlateau { m: 1000, p: 0.5 }.build(&ray, &table)?;
    println!("plateau p=0.5 at depth 1000: {:.5}", h.norm(&table)?);
    Ok(())
}
