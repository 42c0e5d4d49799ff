//! General grids `(V, E_I, E_O)` and n-dimensional square grids.
//!
//! Coordinates are 1-based throughout: a vertex of `G(N₁,…,Nₙ)` has
//! coordinates `(j₁,…,jₙ)` with `1 ≤ jᵢ ≤ Nᵢ`. Vertices are listed in
//! lexicographic coordinate order, and every vertex carries `2n` ports in the
//! order `(−e₁, +e₁, −e₂, +e₂, …, −eₙ, +eₙ)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box dimensions `(N₁,…,Nₙ)` of a square grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    dims: Vec<usize>,
}

impl GridSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one dimension".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("zero extent in {dims:?}")));
        }
        Ok(GridSpec { dims })
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_vertices(&self) -> usize {
        self.dims.iter().product()
    }

    /// `|E_O| = 2 Σᵢ Πⱼ≠ᵢ Nⱼ`
    pub fn num_outgoing(&self) -> usize {
        (0..self.n()).map(|i| 2 * self.cross_section(i)).sum()
    }

    /// `|E_I| = Σᵢ (Nᵢ−1) Πⱼ≠ᵢ Nⱼ`
    pub fn num_inner(&self) -> usize {
        (0..self.n()).map(|i| (self.dims[i] - 1) * self.cross_section(i)).sum()
    }

    fn cross_section(&self, axis: usize) -> usize {
        self.dims.iter().enumerate().filter(|&(j, _)| j != axis).map(|(_, &d)| d).product()
    }

    /// All vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.num_vertices());
        let mut c = vec![1usize; self.n()];
        for _ in 0..self.num_vertices() {
            out.push(Vertex { coords: c.clone() });
            for ax in (0..self.n()).rev() {
                c[ax] += 1;
                if c[ax] <= self.dims[ax] {
                    break;
                }
                c[ax] = 1;
            }
        }
        out
    }

    /// Lexicographic rank of a vertex.
    pub fn vertex_index(&self, v: &Vertex) -> Option<usize> {
        if v.coords.len() != self.n() || v.coords.iter().zip(&self.dims).any(|(&j, &n)| j == 0 || j > n) {
            return None;
        }
        Some(v.coords.iter().zip(&self.dims).fold(0, |acc, (&j, &n)| acc * n + (j - 1)))
    }

    /// Componentwise `self ≤ other`.
    pub fn is_subgrid(&self, other: &GridSpec) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.dims.iter().zip(&other.dims).all(|(a, b)| a <= b))
    }

    /// Specs obtained by shrinking one dimension by one, where possible.
    pub fn immediate_predecessors(&self) -> Vec<GridSpec> {
        (0..self.n())
            .filter(|&i| self.dims[i] > 1)
            .map(|i| {
                let mut d = self.dims.clone();
                d[i] -= 1;
                GridSpec { dims: d }
            })
            .collect()
    }

    /// Every spec `≤ self`, ordered by vertex count and then lexicographically.
    pub fn sub_box(&self) -> Vec<GridSpec> {
        let mut all = Vec::new();
        let mut d = vec![1usize; self.n()];
        loop {
            all.push(GridSpec { dims: d.clone() });
            let mut ax = self.n();
            loop {
                if ax == 0 {
                    all.sort_by(|a, b| a.num_vertices().cmp(&b.num_vertices()).then_with(|| a.dims.cmp(&b.dims)));
                    return all;
                }
                ax -= 1;
                d[ax] += 1;
                if d[ax] <= self.dims[ax] {
                    break;
                }
                d[ax] = 1;
            }
        }
    }

    /// Axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<GridSpec> {
        if perm.len() != self.n() || (0..self.n()).any(|i| !perm.contains(&i)) {
            return Err(Error::InvalidGrid(format!("{perm:?} is not a permutation of the axes")));
        }
        GridSpec::new(perm.iter().map(|&p| self.dims[p]).collect())
    }

    /// Edge behind each port of `v`, in port order.
    pub fn port_edges(&self, v: &Vertex) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(2 * self.n());
        for axis in 0..self.n() {
            for sign in [Sign::Minus, Sign::Plus] {
                out.push(self.edge_at(v, Direction { axis, sign }));
            }
        }
        out
    }

    fn edge_at(&self, v: &Vertex, dir: Direction) -> EdgeId {
        let j = v.coords[dir.axis];
        match dir.sign {
            Sign::Minus if j == 1 => EdgeId::Outgoing(OutgoingEdge { direction: dir, vertex: v.clone() }),
            Sign::Minus => {
                let mut lower = v.coords.clone();
                lower[dir.axis] -= 1;
                EdgeId::Inner { axis: dir.axis, lower: Vertex { coords: lower } }
            }
            Sign::Plus if j == self.dims[dir.axis] => {
                EdgeId::Outgoing(OutgoingEdge { direction: dir, vertex: v.clone() })
            }
            Sign::Plus => EdgeId::Inner { axis: dir.axis, lower: v.clone() },
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Grammar: `N1(xN2)*`, each `Nᵢ ≥ 1`.
    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .trim()
            .split('x')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad grid spec {s:?}; expected e.g. \"3x5\"")))
            })
            .collect::<Result<Vec<_>>>()?;
        GridSpec::new(dims)
    }
}

impl TryFrom<String> for GridSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub coords: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub axis: usize,
    pub sign: Sign,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Minus => '-',
            Sign::Plus => '+',
        };
        write!(f, "{s}e{}", self.axis + 1)
    }
}

/// `(𝐣, ±eᵢ)`. The derived order (axis, then − before +, then vertex
/// coordinates) is the canonical tensor-factor order of the boundary space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutgoingEdge {
    pub direction: Direction,
    pub vertex: Vertex,
}

/// Edge identity inside a square grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeId {
    Outgoing(OutgoingEdge),
    /// Joins `lower` and `lower + e_axis`.
    Inner { axis: usize, lower: Vertex },
}

impl EdgeId {
    pub fn is_outgoing(&self) -> bool {
        matches!(self, EdgeId::Outgoing(_))
    }
}

/// Outgoing edges in canonical order.
pub fn outgoing_order(spec: &GridSpec) -> Vec<OutgoingEdge> {
    let mut out: Vec<OutgoingEdge> = spec
        .vertices()
        .iter()
        .flat_map(|v| spec.port_edges(v))
        .filter_map(|e| match e {
            EdgeId::Outgoing(o) => Some(o),
            EdgeId::Inner { .. } => None,
        })
        .collect();
    out.sort();
    out
}

/// A `(vertex, port)` slot.
pub type PortRef = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRef {
    Inner(usize),
    Outgoing(usize),
}

/// An arbitrary grid `(V, E_I, E_O)`.
///
/// Vertex `v` owns ports `0..ports[v].len()`; its tensor has one axis per
/// port, in port order. Each port is attached to exactly one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralGrid {
    ports: Vec<Vec<String>>,
    inner: Vec<(PortRef, PortRef)>,
    outgoing: Vec<PortRef>,
    attach: Vec<Vec<EdgeRef>>,
}

impl GeneralGrid {
    pub fn new(ports: Vec<Vec<String>>, inner: Vec<(PortRef, PortRef)>, outgoing: Vec<PortRef>) -> Result<Self> {
        for (v, labels) in ports.iter().enumerate() {
            for (i, l) in labels.iter().enumerate() {
                if labels[..i].contains(l) {
                    return Err(Error::InvalidGrid(format!("vertex {v} repeats port label {l:?}")));
                }
            }
        }
        let mut attach: Vec<Vec<Option<EdgeRef>>> = ports.iter().map(|p| vec![None; p.len()]).collect();
        let slot = |(v, p): PortRef, e: EdgeRef, attach: &mut Vec<Vec<Option<EdgeRef>>>| -> Result<()> {
            let cell = attach
                .get_mut(v)
                .ok_or_else(|| Error::InvalidGrid(format!("vertex {v} does not exist")))?
                .get_mut(p)
                .ok_or_else(|| Error::InvalidGrid(format!("vertex {v} has no port {p}")))?;
            if cell.is_some() {
                return Err(Error::InvalidGrid(format!("port {p} of vertex {v} used twice")));
            }
            *cell = Some(e);
            Ok(())
        };
        for (k, &(a, b)) in inner.iter().enumerate() {
            if a.0 == b.0 {
                return Err(Error::InvalidGrid(format!("inner edge {k} is a self-loop")));
            }
            let pair = (a.0.min(b.0), a.0.max(b.0));
            if inner[..k].iter().any(|&(x, y)| (x.0.min(y.0), x.0.max(y.0)) == pair) {
                return Err(Error::InvalidGrid(format!("multi-edge between vertices {} and {}", pair.0, pair.1)));
            }
            slot(a, EdgeRef::Inner(k), &mut attach)?;
            slot(b, EdgeRef::Inner(k), &mut attach)?;
        }
        for (k, &o) in outgoing.iter().enumerate() {
            slot(o, EdgeRef::Outgoing(k), &mut attach)?;
        }
        let attach = attach
            .into_iter()
            .enumerate()
            .map(|(v, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(p, e)| e.ok_or_else(|| Error::InvalidGrid(format!("port {p} of vertex {v} is dangling"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneralGrid { ports, inner, outgoing, attach })
    }

    pub fn num_vertices(&self) -> usize {
        self.ports.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.ports[v].len()
    }

    pub fn port_labels(&self, v: usize) -> &[String] {
        &self.ports[v]
    }

    pub fn inner_edges(&self) -> &[(PortRef, PortRef)] {
        &self.inner
    }

    pub fn outgoing_edges(&self) -> &[PortRef] {
        &self.outgoing
    }

    /// Edge attached to each port of `v`.
    pub fn attachments(&self, v: usize) -> &[EdgeRef] {
        &self.attach[v]
    }
}

/// The general grid underlying `G(N₁,…,Nₙ)`, with outgoing edges in
/// [`outgoing_order`].
pub fn square_grid(spec: &GridSpec) -> GeneralGrid {
    let n = spec.n();
    let labels: Vec<String> = (0..n).flat_map(|i| [format!("-e{}", i + 1), format!("+e{}", i + 1)]).collect();
    let vertices = spec.vertices();
    let ports = vec![labels; vertices.len()];
    let mut inner = Vec::with_capacity(spec.num_inner());
    for (vi, v) in vertices.iter().enumerate() {
        for axis in 0..n {
            if v.coords[axis] < spec.dims()[axis] {
                let mut up = v.coords.clone();
                up[axis] += 1;
                let wi = spec.vertex_index(&Vertex { coords: up }).expect("neighbour inside box");
                inner.push(((vi, 2 * axis + 1), (wi, 2 * axis)));
            }
        }
    }
    let outgoing = outgoing_order(spec)
        .into_iter()
        .map(|o| {
            let vi = spec.vertex_index(&o.vertex).expect("boundary vertex inside box");
            let port = 2 * o.direction.axis + usize::from(o.direction.sign == Sign::Plus);
            (vi, port)
        })
        .collect();
    GeneralGrid::new(ports, inner, outgoing).expect("square grids are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(s: &str) -> GridSpec {
        s.parse().unwrap()
    }

    #[test]
    fn grid_3x5_counts() {
        let g = spec("3x5");
        assert_eq!(g.num_vertices(), 15);
        assert_eq!(g.num_inner(), 22);
        assert_eq!(g.num_outgoing(), 16);
        let sg = square_grid(&g);
        assert_eq!(sg.num_vertices(), 15);
        assert_eq!(sg.inner_edges().len(), 22);
        assert_eq!(sg.outgoing_edges().len(), 16);
    }

    #[test]
    fn small_grid_counts() {
        for n in 1..=6 {
            let g = GridSpec::new(vec![n]).unwrap();
            assert_eq!((g.num_vertices(), g.num_inner(), g.num_outgoing()), (n, n - 1, 2));
        }
        let g = spec("1x1");
        assert_eq!((g.num_vertices(), g.num_inner(), g.num_outgoing()), (1, 0, 4));
    }

    #[test]
    fn outgoing_order_small_cases() {
        let o = outgoing_order(&spec("2"));
        assert_eq!(o.len(), 2);
        assert_eq!((o[0].vertex.coords.clone(), o[0].direction.to_string()), (vec![1], "-e1".to_string()));
        assert_eq!((o[1].vertex.coords.clone(), o[1].direction.to_string()), (vec![2], "+e1".to_string()));

        let o = outgoing_order(&spec("1x1"));
        let dirs: Vec<String> = o.iter().map(|e| e.direction.to_string()).collect();
        assert_eq!(dirs, ["-e1", "+e1", "-e2", "+e2"]);
        assert!(o.iter().all(|e| e.vertex.coords == [1, 1]));
    }

    #[test]
    fn outgoing_order_2x2_against_comparator() {
        // enumerate all boundary (vertex, direction) pairs directly from the box
        let g = spec("2x2");
        let mut expected = Vec::new();
        for axis in 0..2 {
            for sign in [Sign::Minus, Sign::Plus] {
                for j1 in 1..=2 {
                    for j2 in 1..=2 {
                        let c = [j1, j2];
                        let on_face = match sign {
                            Sign::Minus => c[axis] == 1,
                            Sign::Plus => c[axis] == 2,
                        };
                        if on_face {
                            expected.push((axis, sign, c.to_vec()));
                        }
                    }
                }
            }
        }
        let got: Vec<_> =
            outgoing_order(&g).into_iter().map(|e| (e.direction.axis, e.direction.sign, e.vertex.coords)).collect();
        assert_eq!(got.len(), 8);
        assert_eq!(got, expected);
    }

    #[test]
    fn subgrid_examples() {
        assert!(spec("2x3").is_subgrid(&spec("3x3")).unwrap());
        assert!(!spec("3x2").is_subgrid(&spec("2x3")).unwrap());
        assert!(spec("2x2").is_subgrid(&spec("2x2")).unwrap());
        assert!(matches!(spec("2").is_subgrid(&spec("2x2")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(spec("3x5").to_string(), "3x5");
        assert_eq!(spec("4").dims(), &[4]);
        for bad in ["", "0", "3x", "x3", "3x0", "a"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn general_grid_validation() {
        let p = |k: usize| (0..k).map(|i| format!("p{i}")).collect::<Vec<_>>();
        // two vertices joined once, each with one outgoing leg
        assert!(GeneralGrid::new(vec![p(2), p(2)], vec![((0, 1), (1, 0))], vec![(0, 0), (1, 1)]).is_ok());
        // dangling port
        assert!(GeneralGrid::new(vec![p(2), p(2)], vec![((0, 1), (1, 0))], vec![(0, 0)]).is_err());
        // self loop
        assert!(GeneralGrid::new(vec![p(2)], vec![((0, 0), (0, 1))], vec![]).is_err());
        // multi-edge
        assert!(GeneralGrid::new(vec![p(2), p(2)], vec![((0, 0), (1, 0)), ((0, 1), (1, 1))], vec![]).is_err());
        // missing vertex
        assert!(GeneralGrid::new(vec![p(1)], vec![], vec![(3, 0)]).is_err());
        // duplicate labels
        assert!(GeneralGrid::new(vec![vec!["a".into(), "a".into()]], vec![], vec![(0, 0), (0, 1)]).is_err());
    }

    #[test]
    fn sub_box_order() {
        let b: Vec<String> = spec("2x3").sub_box().iter().map(|s| s.to_string()).collect();
        assert_eq!(b, ["1x1", "1x2", "2x1", "1x3", "2x2", "2x3"]);
    }

    fn arb_spec() -> impl Strategy<Value = GridSpec> {
        (1usize..=3).prop_flat_map(|n| prop::collection::vec(1usize..=4, n)).prop_map(|d| GridSpec::new(d).unwrap())
    }

    proptest! {
        #[test]
        fn counts_match_square_grid(s in arb_spec()) {
            prop_assume!(s.num_vertices() <= 64);
            let g = square_grid(&s);
            prop_assert_eq!(g.num_vertices(), s.num_vertices());
            prop_assert_eq!(g.inner_edges().len(), s.num_inner());
            prop_assert_eq!(g.outgoing_edges().len(), s.num_outgoing());
            for v in 0..g.num_vertices() {
                prop_assert_eq!(g.attachments(v).len(), 2 * s.n());
            }
            for v in s.vertices() {
                let edges = s.port_edges(&v);
                prop_assert_eq!(edges.len(), 2 * s.n());
                for (k, e) in edges.iter().enumerate() {
                    if let EdgeId::Outgoing(o) = e {
                        prop_assert_eq!(o.direction.axis, k / 2);
                        let j = v.coords[k / 2];
                        let on_face = match o.direction.sign {
                            Sign::Minus => j == 1,
                            Sign::Plus => j == s.dims()[k / 2],
                        };
                        prop_assert!(on_face);
                    }
                }
            }
        }

        #[test]
        fn subgrid_is_partial_order(n in 1usize..=3, seed in any::<u64>()) {
            let mut x = seed;
            let mut next = || { x = x.wrapping_mul(6364136223846793005).wrapping_add(1); (x >> 40) as usize % 3 + 1 };
            let a = GridSpec::new((0..n).map(|_| next()).collect()).unwrap();
            let b = GridSpec::new((0..n).map(|_| next()).collect()).unwrap();
            let c = GridSpec::new((0..n).map(|_| next()).collect()).unwrap();
            prop_assert!(a.is_subgrid(&a).unwrap());
            if a.is_subgrid(&b).unwrap() && b.is_subgrid(&a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if a.is_subgrid(&b).unwrap() && b.is_subgrid(&c).unwrap() {
                prop_assert!(a.is_subgrid(&c).unwrap());
            }
        }
    }
}
