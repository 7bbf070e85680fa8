//! Graphs on 2-multisets of rows: the weighted graph `K(B)`, the
//! orthogonality graph `L(A)`, coverage of the complete graph, and exact
//! clique and chromatic numbers for small instances.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::Value;

use crate::backend::Scalar;
use crate::error::{Error, Result};
use crate::flatmat::FlatMatrix;
use crate::group::AbelianGroup;
use crate::vector::{ExactVector, Vector};
use crate::welch::multisets;

/// Default vertex cap for the exact solvers.
pub const DEFAULT_SOLVER_CAP: usize = 300;

/// Fixed-size bitset over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Self::new(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

/// Graph whose vertices are the 2-multisets `{i, j}` (`i ≤ j`) of `0..n`,
/// listed lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGraph {
    n: usize,
    vertices: Vec<[usize; 2]>,
    adj: Vec<Bits>,
}

impl PairGraph {
    /// The graph on the 2-multisets of `0..n` with no edges.
    pub fn empty(n: usize) -> Self {
        let vertices: Vec<[usize; 2]> = multisets(n, 2).into_iter().map(|m| [m[0], m[1]]).collect();
        let adj = vec![Bits::new(vertices.len()); vertices.len()];
        Self { n, vertices, adj }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..g.order() {
            for v in u + 1..g.order() {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[[usize; 2]] {
        &self.vertices
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// Index of the multiset `{i, j}` in the lexicographic order.
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // Rows 0..i contribute n, n-1, …, n-i+1 vertices.
        i * self.n - i * (i.saturating_sub(1)) / 2 + (j - i)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].set(v);
            self.adj[v].set(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bits::count).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.order())
            .flat_map(|u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    fn label(&self, u: usize) -> String {
        format!("{},{}", self.vertices[u][0], self.vertices[u][1])
    }

    /// Graphviz rendering with vertices labelled `"i,j"` in lexicographic order.
    pub fn to_dot(&self, name: &str) -> String {
        self.dot_with(name, |_, _| None)
    }

    fn dot_with(&self, name: &str, label: impl Fn(usize, usize) -> Option<String>) -> String {
        let mut out = format!("graph {name} {{\n");
        for u in 0..self.order() {
            let _ = writeln!(out, "  \"{}\";", self.label(u));
        }
        for (u, v) in self.edges() {
            let _ = write!(out, "  \"{}\" -- \"{}\"", self.label(u), self.label(v));
            if let Some(l) = label(u, v) {
                let _ = write!(out, " [label=\"{}\"]", l.replace('"', "\\\""));
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
        out
    }
}

/// `K(B)`: the complete graph on row pairs with weights
/// `⟨w_i∘w_j | w_k∘w_l⟩`, directed from the lexicographically smaller vertex.
/// Edges of the underlying [`PairGraph`] are the non-zero weights.
#[derive(Clone, Debug)]
pub struct WeightedPairGraph<S> {
    pub graph: PairGraph,
    /// Row-major over `u < v`; see [`WeightedPairGraph::weight`].
    weights: Vec<S>,
}

impl<S: Scalar> WeightedPairGraph<S> {
    fn offset(&self, u: usize, v: usize) -> usize {
        let m = self.graph.order();
        u * m - u * (u + 1) / 2 + (v - u - 1)
    }

    /// Weight of the edge between vertices `u` and `v` in the fixed direction;
    /// the reverse direction is its conjugate.
    pub fn weight(&self, u: usize, v: usize) -> S {
        if u < v {
            self.weights[self.offset(u, v)].clone()
        } else {
            self.weights[self.offset(v, u)].conj()
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph.dot_with(name, |u, v| {
            Some(match self.weight(u, v).to_json() {
                Value::String(s) => s,
                other => other.to_string(),
            })
        })
    }
}

fn pair_rows<V: Vector>(cols: &[V], n: usize) -> (Vec<V::Row>, f64) {
    let verts = multisets(n, 2);
    let rows = V::multiset_rows(cols, &verts);
    let scale = rows.first().map_or(1.0, |r| V::row_inner(r, r).to_complex().norm().max(1.0));
    (rows, scale)
}

fn check_rows<V: Vector>(cols: &[V]) -> Result<usize> {
    let n = cols.first().map_or(0, Vector::dim);
    if let Some(bad) = cols.iter().find(|c| c.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    Ok(n)
}

/// `K(B)` for the matrix with the given columns.
pub fn k_graph_columns<V: Vector>(cols: &[V], tol: f64) -> Result<WeightedPairGraph<V::Scalar>> {
    let n = check_rows(cols)?;
    let (rows, scale) = pair_rows(cols, n);
    let m = rows.len();
    let weights: Vec<Vec<V::Scalar>> = (0..m)
        .into_par_iter()
        .map(|u| (u + 1..m).map(|v| V::row_inner(&rows[u], &rows[v])).collect())
        .collect();
    let mut graph = PairGraph::empty(n);
    for (u, row) in weights.iter().enumerate() {
        for (k, w) in row.iter().enumerate() {
            if !w.is_zero_tol(tol * scale) {
                graph.add_edge(u, u + 1 + k);
            }
        }
    }
    Ok(WeightedPairGraph { graph, weights: weights.into_iter().flatten().collect() })
}

/// `L(A)` for the matrix with the given columns: `{i,j}` and `{k,l}` are
/// adjacent iff `w_i∘w_j ⊥ w_k∘w_l`.
pub fn l_graph_columns<V: Vector>(cols: &[V], tol: f64) -> Result<PairGraph> {
    let n = check_rows(cols)?;
    let (rows, scale) = pair_rows(cols, n);
    let m = rows.len();
    let nbrs: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|u| {
            (u + 1..m)
                .filter(|&v| V::row_inner(&rows[u], &rows[v]).is_zero_tol(tol * scale))
                .collect()
        })
        .collect();
    let mut graph = PairGraph::empty(n);
    for (u, vs) in nbrs.into_iter().enumerate() {
        for v in vs {
            graph.add_edge(u, v);
        }
    }
    Ok(graph)
}

fn exact_columns(a: &FlatMatrix) -> Vec<ExactVector> {
    a.clone().with_normalized(false).columns()
}

/// `K(B)` with exact cyclotomic weights.
pub fn k_graph(b: &FlatMatrix) -> WeightedPairGraph<crate::flatmat::Cyclo> {
    k_graph_columns(&exact_columns(b), 0.0).expect("flat matrix rows share a length")
}

/// `L(A)` with exact orthogonality.
pub fn l_graph(a: &FlatMatrix) -> PairGraph {
    l_graph_columns(&exact_columns(a), 0.0).expect("flat matrix rows share a length")
}

/// `L(A)` in floating point.
pub fn l_graph_float(a: &FlatMatrix, tol: f64) -> PairGraph {
    l_graph_columns(&a.clone().with_normalized(false).float_columns(), tol)
        .expect("flat matrix rows share a length")
}

/// The graph predicted for the character table of `g`: rows indexed by group
/// elements, `{a,b}` adjacent to `{c,d}` iff `a + b ≠ c + d`.
pub fn sum_class_graph(g: &AbelianGroup) -> PairGraph {
    let table = g.addition_table();
    let mut graph = PairGraph::empty(g.order());
    let sums: Vec<usize> = graph.vertices().iter().map(|&[a, b]| table[a][b]).collect();
    for u in 0..sums.len() {
        for v in u + 1..sums.len() {
            if sums[u] != sums[v] {
                graph.add_edge(u, v);
            }
        }
    }
    graph
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covered: bool,
    /// Vertex pairs `({i,j}, {k,l})` adjacent in neither graph.
    pub missing: Vec<([usize; 2], [usize; 2])>,
}

/// Whether `la` and `lh` together cover every pair of distinct vertices.
pub fn covers_complete(la: &PairGraph, lh: &PairGraph) -> Result<Coverage> {
    if la.vertices != lh.vertices {
        return Err(Error::VertexSetMismatch(la.order(), lh.order()));
    }
    let mut missing = Vec::new();
    for u in 0..la.order() {
        for v in u + 1..la.order() {
            if !la.has_edge(u, v) && !lh.has_edge(u, v) {
                missing.push((la.vertices[u], la.vertices[v]));
            }
        }
    }
    Ok(Coverage { covered: missing.is_empty(), missing })
}

/// Sum of each edge weight over several `K`-graphs on the same vertex set,
/// row-major over `u < v`.
pub fn edge_weight_sums<S: Scalar>(graphs: &[WeightedPairGraph<S>]) -> Result<Vec<S>> {
    let first = graphs.first().ok_or(Error::EmptySystem)?;
    let mut sums = first.weights.clone();
    for g in &graphs[1..] {
        if g.graph.vertices != first.graph.vertices {
            return Err(Error::VertexSetMismatch(first.graph.order(), g.graph.order()));
        }
        for (s, w) in sums.iter_mut().zip(&g.weights) {
            *s = s.plus(w);
        }
    }
    Ok(sums)
}

/// First edge `(u, v)` whose weights across `graphs` do not cancel, if any.
pub fn first_uncancelled_edge<S: Scalar>(
    graphs: &[WeightedPairGraph<S>],
    tol: f64,
) -> Result<Option<([usize; 2], [usize; 2])>> {
    let sums = edge_weight_sums(graphs)?;
    let g = &graphs[0].graph;
    let m = g.order();
    let mut k = 0;
    for u in 0..m {
        for v in u + 1..m {
            if !sums[k].is_zero_tol(tol) {
                return Ok(Some((g.vertices[u], g.vertices[v])));
            }
            k += 1;
        }
    }
    Ok(None)
}

fn check_cap(g: &PairGraph, cap: usize) -> Result<()> {
    if g.order() > cap {
        return Err(Error::TooLarge { vertices: g.order(), cap });
    }
    Ok(())
}

/// Exact clique number by branch and bound with greedy-colouring bounds.
pub fn clique_number(g: &PairGraph, cap: usize) -> Result<usize> {
    check_cap(g, cap)?;
    let mut best = 0;
    expand_clique(g, 0, Bits::full(g.order()), &mut best);
    Ok(best)
}

/// Greedy sequential colouring of `cand`; returns vertices with their colour
/// bound, in non-decreasing colour order.
fn colour_bound(g: &PairGraph, cand: &Bits) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut rest = cand.clone();
    let mut colour = 0;
    while !rest.is_empty() {
        colour += 1;
        let mut avail = rest.clone();
        loop {
            let Some(v) = avail.iter().next() else { break };
            out.push((v, colour));
            rest.0[v / 64] &= !(1 << (v % 64));
            avail.0[v / 64] &= !(1 << (v % 64));
            for (w, a) in avail.0.iter_mut().zip(&g.adj[v].0) {
                *w &= !a;
            }
        }
    }
    out
}

fn expand_clique(g: &PairGraph, size: usize, cand: Bits, best: &mut usize) {
    if cand.is_empty() {
        *best = (*best).max(size);
        return;
    }
    let order = colour_bound(g, &cand);
    let mut cand = cand;
    for &(v, bound) in order.iter().rev() {
        if size + bound <= *best {
            return;
        }
        expand_clique(g, size + 1, cand.and(&g.adj[v]), best);
        cand.0[v / 64] &= !(1 << (v % 64));
    }
}

/// Exact chromatic number by DSATUR branch and bound.
pub fn chromatic_number(g: &PairGraph, cap: usize) -> Result<usize> {
    check_cap(g, cap)?;
    let m = g.order();
    if m == 0 {
        return Ok(0);
    }
    let omega = clique_number(g, cap)?;
    let mut colours = vec![usize::MAX; m];
    let mut best = m + 1;
    dsatur(g, &mut colours, 0, 0, omega, &mut best);
    assert!(best >= omega, "chromatic number below clique number");
    Ok(best)
}

fn dsatur(g: &PairGraph, colours: &mut [usize], coloured: usize, used: usize, lower: usize, best: &mut usize) {
    if used >= *best || *best == lower {
        return;
    }
    if coloured == colours.len() {
        *best = used;
        return;
    }
    // Uncoloured vertex of maximum saturation, ties by degree then index.
    let mut pick = None;
    let mut key = (0, 0);
    for v in 0..colours.len() {
        if colours[v] != usize::MAX {
            continue;
        }
        let mut seen = 0u128;
        let mut sat = 0;
        for w in g.adj[v].iter() {
            let c = colours[w];
            if c != usize::MAX && c < 128 && seen >> c & 1 == 0 {
                seen |= 1 << c;
                sat += 1;
            }
        }
        let k = (sat, g.degree(v));
        if pick.is_none() || k > key {
            pick = Some(v);
            key = k;
        }
    }
    let v = pick.expect("an uncoloured vertex remains");
    for c in 0..=used {
        if c + 1 >= *best {
            break;
        }
        if g.adj[v].iter().any(|w| colours[w] == c) {
            continue;
        }
        colours[v] = c;
        dsatur(g, colours, coloured + 1, used.max(c + 1), lower, best);
        colours[v] = usize::MAX;
        if *best == lower {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatmat::Cyclo;

    fn fourier(n: u64) -> FlatMatrix {
        FlatMatrix::new(n, (0..n).map(|i| (0..n).map(|j| i * j).collect()).collect(), false)
            .unwrap()
    }

    #[test]
    fn vertex_indexing() {
        let g = PairGraph::empty(4);
        assert_eq!(g.order(), 10);
        for (k, &[i, j]) in g.vertices().iter().enumerate() {
            assert_eq!(g.vertex_index(i, j), k);
            assert_eq!(g.vertex_index(j, i), k);
        }
    }

    #[test]
    fn l_graph_of_f2() {
        let g = l_graph(&fourier(2));
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.to_dot("L"), "graph L {\n  \"0,0\";\n  \"0,1\";\n  \"1,1\";\n  \"0,0\" -- \"0,1\";\n  \"0,1\" -- \"1,1\";\n}\n");
    }

    #[test]
    fn all_ones_is_empty() {
        let ones = FlatMatrix::new(1, vec![vec![0; 3]; 3], false).unwrap();
        assert_eq!(l_graph(&ones).edge_count(), 0);
    }

    #[test]
    fn fourier_graphs_follow_sum_classes() {
        for moduli in [vec![4], vec![2, 2], vec![6], vec![3, 2]] {
            let g = AbelianGroup::new(moduli).unwrap();
            let f = crate::constructions::fourier_matrix(&g);
            assert_eq!(l_graph(&f), sum_class_graph(&g));
            assert_eq!(l_graph_float(&f, 1e-9), sum_class_graph(&g));
        }
    }

    #[test]
    fn k_graph_weights() {
        let k = k_graph(&fourier(3));
        let g = &k.graph;
        assert!(k.weight(g.vertex_index(0, 1), g.vertex_index(0, 2)).is_zero());
        assert_eq!(k.weight(g.vertex_index(0, 0), g.vertex_index(1, 2)), Cyclo::from_int(&crate::flatmat::CyclotomicInt::constant(1, 3)));

        let f2 = fourier(2);
        let twisted = FlatMatrix::new(4, vec![vec![0, 0], vec![1, 3]], false).unwrap();
        let ks = [k_graph(&f2), k_graph(&twisted)];
        assert_eq!(first_uncancelled_edge(&ks, 0.0).unwrap(), None);
        assert!(first_uncancelled_edge(&[k_graph(&f2), k_graph(&f2)], 0.0).unwrap().is_some());
        assert!(k_graph(&twisted).to_dot("K").contains("label=\"-2\""));
    }

    #[test]
    fn coverage() {
        let c = covers_complete(&PairGraph::complete(3), &PairGraph::empty(3)).unwrap();
        assert!(c.covered);
        let lf = l_graph(&fourier(3));
        let c = covers_complete(&lf, &lf).unwrap();
        assert!(!c.covered);
        assert!(c.missing.contains(&([0, 2], [1, 1])));
        assert!(covers_complete(&lf, &PairGraph::empty(2)).is_err());
    }

    #[test]
    fn solvers() {
        let e = PairGraph::empty(2);
        assert_eq!(clique_number(&e, 300).unwrap(), 1);
        assert_eq!(chromatic_number(&e, 300).unwrap(), 1);
        let c = PairGraph::complete(3);
        assert_eq!(clique_number(&c, 300).unwrap(), 6);
        assert_eq!(chromatic_number(&c, 300).unwrap(), 6);
        for n in 2..=6 {
            let l = l_graph(&fourier(n));
            assert_eq!(clique_number(&l, 300).unwrap(), n as usize);
            assert_eq!(chromatic_number(&l, 300).unwrap(), n as usize);
        }
        assert!(matches!(clique_number(&c, 5), Err(Error::TooLarge { vertices: 6, cap: 5 })));
    }

    #[test]
    fn five_cycle_needs_three_colours() {
        // 2-multisets of 0..2 give 3 vertices; build C5 on a 4-row graph's first 5 vertices.
        let mut g = PairGraph::empty(4);
        for k in 0..5 {
            g.add_edge(k, (k + 1) % 5);
        }
        assert_eq!(clique_number(&g, 300).unwrap(), 2);
        assert_eq!(chromatic_number(&g, 300).unwrap(), 3);
    }
}
