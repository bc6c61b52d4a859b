//! Generating, inspecting and round-tripping trees.
use treelip::{Tree, TreeSpec};

fn main() -> treelip::Result<()> {
    let binary = Tree::regular(2, 6)?;
    println!("regular q=2 depth 6: {} vertices, level 6 has {}", binary.len(), binary.level(6).len());

    let spec: TreeSpec = "random:seed=7,max=3,depth=5".parse()?;
    let random = spec.build()?;
    println!("{spec}: {} vertices", random.len());

    let s = random.sector(1)?;
    println!("sector of vertex 1 has {} vertices", s.len());
    println!("path 0 -> last vertex: {:?}", random.path_to_root(random.len() - 1)?);

    let text = random.to_text();
    let back = Tree::from_text(&text)?;
    assert_eq!(back.len(), random.len());
    println!("text form starts with: {}", text.lines().next().unwrap());
    Ok(())
}
