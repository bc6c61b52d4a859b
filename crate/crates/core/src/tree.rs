//! Finite truncations of rooted trees without terminal vertices.
//!
//! Vertices live in an arena indexed by dense ids. Ids are assigned so that
//! a parent always precedes its children, which lets every per-vertex
//! computation run as a single forward pass. Both generators number
//! vertices breadth first, so ids are also grouped by depth.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Default vertex capacity for generated trees.
pub const DEFAULT_CAPACITY: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub id: VertexId,
    pub parent: Option<VertexId>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    vertices: Vec<Vertex>,
    children: Vec<Vec<VertexId>>,
    levels: Vec<Vec<VertexId>>,
    depth_bound: usize,
    complete: bool,
}

/// A vertex together with all of its descendants inside the truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub root_vertex: VertexId,
    /// Sorted ascending.
    pub members: Vec<VertexId>,
}

impl Sector {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl Tree {
    /// Builds a tree from a parent list. Entry 0 is the root and must be
    /// `None`; every other entry must name a smaller id.
    pub fn from_parents(parents: &[Option<VertexId>]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::InvalidParameter("a tree needs at least the root".into()));
        }
        let mut vertices = Vec::with_capacity(parents.len());
        let mut children = vec![Vec::new(); parents.len()];
        for (id, parent) in parents.iter().enumerate() {
            match (id, *parent) {
                (0, None) => vertices.push(Vertex {
                    id,
                    parent: None,
                    depth: 0,
                }),
                (0, Some(_)) => {
                    return Err(Error::InvalidParameter("the root has no parent".into()))
                }
                (_, None) => {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {id} has no parent"
                    )))
                }
                (_, Some(p)) if p >= id => {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {id} has parent {p}; parents must precede children"
                    )))
                }
                (_, Some(p)) => {
                    let depth = vertices[p].depth + 1;
                    vertices.push(Vertex {
                        id,
                        parent: Some(p),
                        depth,
                    });
                    children[p].push(id);
                }
            }
        }
        Ok(Self::assemble(vertices, children))
    }

    fn assemble(vertices: Vec<Vertex>, children: Vec<Vec<VertexId>>) -> Self {
        let depth_bound = vertices.iter().map(|v| v.depth).max().unwrap_or(0);
        let mut levels = vec![Vec::new(); depth_bound + 1];
        for v in &vertices {
            levels[v.depth].push(v.id);
        }
        let complete = vertices
            .iter()
            .all(|v| v.depth >= depth_bound || !children[v.id].is_empty());
        Tree {
            vertices,
            children,
            levels,
            depth_bound,
            complete,
        }
    }

    /// Regular tree: every vertex above depth `depth` has exactly `branching` children.
    pub fn regular(branching: usize, depth: usize) -> Result<Self> {
        Self::regular_with_capacity(branching, depth, DEFAULT_CAPACITY)
    }

    pub fn regular_with_capacity(branching: usize, depth: usize, capacity: usize) -> Result<Self> {
        if branching == 0 || depth == 0 {
            return Err(Error::InvalidParameter(
                "regular trees need branching >= 1 and depth >= 1".into(),
            ));
        }
        let mut count: u128 = 0;
        let mut level: u128 = 1;
        for _ in 0..=depth {
            count += level;
            level = level.saturating_mul(branching as u128);
            if count > capacity as u128 {
                return Err(Error::Capacity {
                    requested: count,
                    limit: capacity,
                });
            }
        }
        let mut parents = Vec::with_capacity(count as usize);
        parents.push(None);
        let mut frontier = 0..1;
        for _ in 0..depth {
            let start = parents.len();
            for p in frontier {
                for _ in 0..branching {
                    parents.push(Some(p));
                }
            }
            frontier = start..parents.len();
        }
        Self::from_parents(&parents)
    }

    /// Random tree: every vertex above depth `depth` receives between 1 and
    /// `max_children` children, drawn from a ChaCha8 stream seeded by `seed`.
    pub fn random(seed: u64, max_children: usize, depth: usize) -> Result<Self> {
        Self::random_with_capacity(seed, max_children, depth, DEFAULT_CAPACITY)
    }

    pub fn random_with_capacity(
        seed: u64,
        max_children: usize,
        depth: usize,
        capacity: usize,
    ) -> Result<Self> {
        if max_children == 0 {
            return Err(Error::InvalidParameter("max_children must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut parents: Vec<Option<VertexId>> = vec![None];
        let mut frontier = 0..1;
        for _ in 0..depth {
            let start = parents.len();
            for p in frontier {
                let n = rng.gen_range(1..=max_children);
                if parents.len() + n > capacity {
                    return Err(Error::Capacity {
                        requested: (parents.len() + n) as u128,
                        limit: capacity,
                    });
                }
                parents.extend(std::iter::repeat(Some(p)).take(n));
            }
            frontier = start..parents.len();
        }
        Self::from_parents(&parents)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex> {
        self.vertices.get(v).ok_or(Error::UnknownVertex(v))
    }

    /// Truncation depth N.
    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    /// True when no vertex above the truncation depth is childless.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `|v|`. Panics on an id outside the tree.
    pub fn depth(&self, v: VertexId) -> usize {
        self.vertices[v].depth
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.vertices[v].parent
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    /// Vertices of depth `d`, ascending; empty beyond the truncation.
    pub fn level(&self, d: usize) -> &[VertexId] {
        self.levels.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.vertices.len()
    }

    pub fn sector(&self, v: VertexId) -> Result<Sector> {
        self.vertex(v)?;
        let mut members = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            members.push(u);
            stack.extend_from_slice(&self.children[u]);
        }
        members.sort_unstable();
        Ok(Sector {
            root_vertex: v,
            members,
        })
    }

    /// `[v, v⁻, …, o]`.
    pub fn path_to_root(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let mut cur = self.vertex(v)?;
        let mut path = Vec::with_capacity(cur.depth + 1);
        path.push(v);
        while let Some(p) = cur.parent {
            path.push(p);
            cur = &self.vertices[p];
        }
        Ok(path)
    }

    /// For every vertex, its ancestor at depth `n` (itself when `|v| <= n`).
    pub fn ancestors_at_depth(&self, n: usize) -> Vec<VertexId> {
        let mut anc = Vec::with_capacity(self.len());
        for v in &self.vertices {
            anc.push(match v.parent {
                Some(p) if v.depth > n => anc[p],
                _ => v.id,
            });
        }
        anc
    }

    /// True if `v` lies in the sector of `w`.
    pub fn is_descendant(&self, v: VertexId, w: VertexId) -> bool {
        if !self.contains(v) || !self.contains(w) {
            return false;
        }
        let target = self.depth(w);
        let mut cur = v;
        while self.depth(cur) > target {
            cur = self.vertices[cur].parent.expect("non-root has a parent");
        }
        cur == w
    }

    /// Serializes to the line format: `tree v<count>` then `<id> <parent>`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 12);
        let _ = writeln!(out, "tree v{}", self.len());
        for v in &self.vertices[1..] {
            let _ = writeln!(out, "{} {}", v.id, v.parent.expect("non-root has a parent"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format {
            what: "tree file",
            line,
            msg,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
        let count: usize = header
            .strip_prefix("tree v")
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| err(hline, format!("expected 'tree v<count>', found '{header}'")))?;
        if count == 0 {
            return Err(err(hline, "vertex count must be positive".into()));
        }
        let mut parents: Vec<Option<VertexId>> = vec![None; count];
        let mut seen = vec![false; count];
        seen[0] = true;
        for (lno, line) in lines {
            let mut it = line.split_whitespace();
            let (id, parent) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(err(lno, format!("expected '<id> <parent-id>', found '{line}'"))),
            };
            let id: usize = id
                .parse()
                .map_err(|_| err(lno, format!("bad vertex id '{id}'")))?;
            let parent: usize = parent
                .parse()
                .map_err(|_| err(lno, format!("bad parent id '{parent}'")))?;
            if id == 0 || id >= count {
                return Err(err(lno, format!("vertex id {id} outside 1..{count}")));
            }
            if seen[id] {
                return Err(err(lno, format!("vertex {id} listed twice")));
            }
            seen[id] = true;
            parents[id] = Some(parent);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(err(0, format!("vertex {missing} has no line")));
        }
        Self::from_parents(&parents)
    }
}

/// Where a tree comes from: a generator spec string or an explicit tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeSpec {
    Regular { q: usize, depth: usize },
    Random { seed: u64, max: usize, depth: usize },
}

impl TreeSpec {
    pub fn build(&self) -> Result<Tree> {
        match *self {
            TreeSpec::Regular { q, depth } => Tree::regular(q, depth),
            TreeSpec::Random { seed, max, depth } => Tree::random(seed, max, depth),
        }
    }
}

impl std::fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeSpec::Regular { q, depth } => write!(f, "regular:q={q},depth={depth}"),
            TreeSpec::Random { seed, max, depth } => {
                write!(f, "random:seed={seed},max={max},depth={depth}")
            }
        }
    }
}

impl FromStr for TreeSpec {
    type Err = Error;

    /// Parses `regular:q=<int>,depth=<int>` or `random:seed=<int>,max=<int>,depth=<int>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized tree spec '{s}'"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let mut fields = Vec::new();
        for part in rest.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value: u64 = value.trim().parse().map_err(|_| bad())?;
            fields.push((key.trim(), value));
        }
        let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let get = |i: usize| fields[i].1;
        match kind.trim() {
            "regular" if keys == ["q", "depth"] => Ok(TreeSpec::Regular {
                q: get(0) as usize,
                depth: get(1) as usize,
            }),
            "random" if keys == ["seed", "max", "depth"] => Ok(TreeSpec::Random {
                seed: get(0),
                max: get(1) as usize,
                depth: get(2) as usize,
            }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_counts() {
        let ray = Tree::regular(1, 5).unwrap();
        assert_eq!(ray.len(), 6);
        let depths: Vec<_> = ray.vertices().iter().map(|v| v.depth).collect();
        assert_eq!(depths, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(Tree::regular(2, 3).unwrap().len(), 15);
        let expected: usize = (0..=4).map(|d| 3usize.pow(d)).sum();
        assert_eq!(Tree::regular(3, 4).unwrap().len(), expected);
        assert_eq!(expected, 121);
    }

    #[test]
    fn regular_is_complete_with_exact_branching() {
        let t = Tree::regular(3, 3).unwrap();
        assert!(t.is_complete());
        for v in t.vertices() {
            let c = t.children(v.id).len();
            if v.depth < 3 {
                assert_eq!(c, 3);
            } else {
                assert_eq!(c, 0);
            }
        }
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            Tree::regular_with_capacity(10, 6, 1000),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            Tree::random_with_capacity(1, 5, 10, 50),
            Err(Error::Capacity { .. })
        ));
        assert!(Tree::regular(0, 3).is_err());
        assert!(Tree::regular(2, 0).is_err());
        assert!(Tree::random(1, 0, 3).is_err());
    }

    #[test]
    fn random_unary_is_a_ray() {
        let t = Tree::random(7, 1, 4).unwrap();
        assert_eq!(t, Tree::regular(1, 4).unwrap());
    }

    #[test]
    fn random_is_deterministic_and_seed_sensitive() {
        let a = Tree::random(7, 3, 6).unwrap();
        let b = Tree::random(7, 3, 6).unwrap();
        assert_eq!(a, b);
        assert!(a.is_complete());
        let c = Tree::random(8, 3, 6).unwrap();
        let counts = |t: &Tree| {
            t.vertices()
                .iter()
                .map(|v| t.children(v.id).len())
                .collect::<Vec<_>>()
        };
        assert_ne!(counts(&a), counts(&c));
    }

    #[test]
    fn sectors() {
        let ray = Tree::regular(1, 5).unwrap();
        assert_eq!(ray.sector(0).unwrap().len(), 6);
        assert_eq!(ray.sector(5).unwrap().members, vec![5]);
        let t = Tree::regular(2, 3).unwrap();
        let v = t.level(1)[0];
        let s = t.sector(v).unwrap();
        assert_eq!(s.len(), 7);
        assert!(s.members.iter().all(|&u| t.is_descendant(u, v)));
        assert!(matches!(t.sector(99), Err(Error::UnknownVertex(99))));
    }

    #[test]
    fn paths() {
        let ray = Tree::regular(1, 5).unwrap();
        assert_eq!(ray.path_to_root(0).unwrap(), vec![0]);
        assert_eq!(ray.path_to_root(1).unwrap(), vec![1, 0]);
        let p = ray.path_to_root(4).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.windows(2).all(|w| ray.depth(w[0]) == ray.depth(w[1]) + 1));
        assert!(ray.path_to_root(6).is_err());
    }

    #[test]
    fn ancestors() {
        let t = Tree::regular(2, 3).unwrap();
        let anc = t.ancestors_at_depth(1);
        for v in t.vertices() {
            let a = anc[v.id];
            assert_eq!(t.depth(a), v.depth.min(1));
            assert!(t.is_descendant(v.id, a));
        }
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let t = Tree::random(3, 3, 4).unwrap();
        let text = t.to_text();
        assert!(text.starts_with(&format!("tree v{}\n", t.len())));
        assert_eq!(Tree::from_text(&text).unwrap(), t);
        assert!(Tree::from_text("tree v3\n1 0\n").is_err());
        assert!(Tree::from_text("tree v3\n1 0\n2 5\n").is_err());
        assert!(Tree::from_text("tree v2\n1 0\n1 0\n").is_err());
        assert!(Tree::from_text("graph v2\n1 0\n").is_err());
        let one = Tree::from_text("tree v1\n").unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn incomplete_tree_is_flagged() {
        // 0 -> 1, 0 -> 2, 1 -> 3; vertex 2 is a leaf above the bottom
        let t = Tree::from_parents(&[None, Some(0), Some(0), Some(1)]).unwrap();
        assert_eq!(t.depth_bound(), 2);
        assert!(!t.is_complete());
    }

    #[test]
    fn spec_strings() {
        let r: TreeSpec = "regular:q=2,depth=6".parse().unwrap();
        assert_eq!(r, TreeSpec::Regular { q: 2, depth: 6 });
        assert_eq!(r.build().unwrap().len(), 127);
        let s: TreeSpec = "random:seed=7,max=3,depth=5".parse().unwrap();
        assert_eq!(s.to_string(), "random:seed=7,max=3,depth=5");
        assert!("regular:depth=3,q=2".parse::<TreeSpec>().is_err());
        assert!("ring:q=2".parse::<TreeSpec>().is_err());
    }
}
