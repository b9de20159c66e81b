//! Directed graphs and strongly connected components.
//!
//! [`Tarjan`] is an iterative, lazy implementation of Tarjan's algorithm: it
//! yields components one at a time in reverse topological order of the
//! condensation, so the first component it yields is always a sink. Callers
//! that only need one sink component stop after the first item.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("arc ({from}, {to}) references a vertex outside 0..{vertex_count}")]
    VertexOutOfRange {
        from: usize,
        to: usize,
        vertex_count: usize,
    },
    #[error("graph has no vertices")]
    EmptyGraph,
}

/// Digraph in compressed adjacency form. Self-loops are allowed; parallel
/// arcs are merged and each successor list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    // successors of v are targets[offsets[v]..offsets[v + 1]]
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Default for Digraph {
    fn default() -> Self {
        Digraph {
            offsets: vec![0],
            targets: Vec::new(),
        }
    }
}

impl Digraph {
    pub fn from_arcs(
        vertex_count: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (from, to) in arcs {
            if from >= vertex_count || to >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    from,
                    to,
                    vertex_count,
                });
            }
            adjacency[from].push(to);
        }
        Self::from_adjacency(adjacency)
    }

    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = adjacency.len();
        let mut builder = DigraphBuilder::with_capacity(n, adjacency.iter().map(Vec::len).sum());
        for (from, mut list) in adjacency.into_iter().enumerate() {
            if let Some(&to) = list.iter().find(|&&to| to >= n) {
                return Err(GraphError::VertexOutOfRange {
                    from,
                    to,
                    vertex_count: n,
                });
            }
            list.sort_unstable();
            list.dedup();
            builder.push_vertex(list);
        }
        Ok(builder.finish())
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.successors(from).binary_search(&to).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| self.successors(v).iter().map(move |&w| (v, w)))
    }
}

/// Appends vertices in order. Each vertex's successor list must already be
/// sorted, duplicate-free and in range once all vertices are pushed.
pub(crate) struct DigraphBuilder {
    graph: Digraph,
}

impl DigraphBuilder {
    pub(crate) fn with_capacity(vertices: usize, arcs: usize) -> Self {
        let mut offsets = Vec::with_capacity(vertices + 1);
        offsets.push(0);
        DigraphBuilder {
            graph: Digraph {
                offsets,
                targets: Vec::with_capacity(arcs),
            },
        }
    }

    pub(crate) fn push_vertex(&mut self, successors: impl IntoIterator<Item = usize>) {
        self.graph.targets.extend(successors);
        self.graph.offsets.push(self.graph.targets.len());
    }

    /// Successors of the vertex currently being built, for in-place sorting.
    pub(crate) fn open_vertex(&mut self) -> OpenVertex<'_> {
        let start = self.graph.targets.len();
        OpenVertex {
            builder: self,
            start,
        }
    }

    pub(crate) fn finish(self) -> Digraph {
        let g = self.graph;
        debug_assert!((0..g.vertex_count()).all(|v| {
            let s = g.successors(v);
            s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|&t| t < g.vertex_count())
        }));
        g
    }
}

pub(crate) struct OpenVertex<'b> {
    builder: &'b mut DigraphBuilder,
    start: usize,
}

impl OpenVertex<'_> {
    pub(crate) fn push(&mut self, w: usize) {
        self.builder.graph.targets.push(w);
    }

    /// Sorts this vertex's successors and closes it.
    pub(crate) fn close(self) {
        let g = &mut self.builder.graph;
        g.targets[self.start..].sort_unstable();
        g.offsets.push(g.targets.len());
    }
}

/// SCCs in Tarjan emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    /// Each component's vertices, ascending.
    pub components: Vec<Vec<usize>>,
    /// `component_of[v]` indexes into `components`.
    pub component_of: Vec<usize>,
}

impl SccPartition {
    /// Contracts each component to a vertex; vertex `k` is `components[k]`.
    pub fn condense(&self, g: &Digraph) -> Digraph {
        let arcs = g
            .arcs()
            .map(|(u, v)| (self.component_of[u], self.component_of[v]))
            .filter(|(a, b)| a != b);
        Digraph::from_arcs(self.components.len(), arcs).expect("component ids in range")
    }
}

const UNVISITED: u32 = u32::MAX;

/// Working memory for [`Tarjan`], reusable across searches. Preparing it for
/// another search costs time proportional to the vertices the previous search
/// visited, not to the graph size.
#[derive(Debug, Default)]
pub struct TarjanScratch {
    index: Vec<u32>,
    lowlink: Vec<u32>,
    on_stack: Vec<bool>,
    visited: Vec<usize>,
    stack: Vec<usize>,
    // (vertex, position of next successor to examine)
    frames: Vec<(usize, usize)>,
}

impl TarjanScratch {
    fn prepare(&mut self, vertex_count: usize) {
        for &v in &self.visited {
            self.index[v] = UNVISITED;
            self.on_stack[v] = false;
        }
        self.visited.clear();
        self.stack.clear();
        self.frames.clear();
        if self.index.len() < vertex_count {
            self.index.resize(vertex_count, UNVISITED);
            self.lowlink.resize(vertex_count, 0);
            self.on_stack.resize(vertex_count, false);
        }
    }
}

enum Starts {
    Ascending,
    Order(Vec<usize>),
}

/// Iterative Tarjan SCC search yielding components lazily.
pub struct Tarjan<'g> {
    graph: &'g Digraph,
    starts: Starts,
    next_start: usize,
    next_index: u32,
    s: TarjanScratch,
    work: u64,
}

impl<'g> Tarjan<'g> {
    /// Depth-first searches start from vertices in ascending id order.
    pub fn new(graph: &'g Digraph) -> Self {
        Self::with_scratch(graph, None, TarjanScratch::default())
    }

    /// Depth-first searches start from `starts` in the given order. Vertices
    /// missing from `starts` are still visited if reachable.
    pub fn with_start_order(graph: &'g Digraph, starts: Vec<usize>) -> Self {
        Self::with_scratch(graph, Some(starts), TarjanScratch::default())
    }

    /// Reuses `scratch` from an earlier search. `starts` of `None` means
    /// ascending order.
    pub fn with_scratch(
        graph: &'g Digraph,
        starts: Option<Vec<usize>>,
        mut scratch: TarjanScratch,
    ) -> Self {
        scratch.prepare(graph.vertex_count());
        Tarjan {
            graph,
            starts: starts.map_or(Starts::Ascending, Starts::Order),
            next_start: 0,
            next_index: 0,
            s: scratch,
            work: 0,
        }
    }

    /// Hands the working memory back for the next search.
    pub fn into_scratch(self) -> TarjanScratch {
        self.s
    }

    /// Vertices discovered plus arcs examined so far.
    pub fn work(&self) -> u64 {
        self.work
    }

    fn next_root(&mut self) -> Option<usize> {
        loop {
            let s = match &self.starts {
                Starts::Ascending if self.next_start < self.graph.vertex_count() => self.next_start,
                Starts::Order(order) if self.next_start < order.len() => order[self.next_start],
                _ => return None,
            };
            self.next_start += 1;
            if self.s.index[s] == UNVISITED {
                return Some(s);
            }
        }
    }

    fn discover(&mut self, v: usize) {
        let s = &mut self.s;
        s.index[v] = self.next_index;
        s.lowlink[v] = self.next_index;
        self.next_index += 1;
        s.visited.push(v);
        s.stack.push(v);
        s.on_stack[v] = true;
        s.frames.push((v, 0));
        self.work += 1;
    }
}

impl Iterator for Tarjan<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        loop {
            if self.s.frames.is_empty() {
                let root = self.next_root()?;
                self.discover(root);
            }

            while let Some(frame) = self.s.frames.last_mut() {
                let (v, pos) = *frame;
                if let Some(&w) = self.graph.successors(v).get(pos) {
                    frame.1 += 1;
                    self.work += 1;
                    if self.s.index[w] == UNVISITED {
                        self.discover(w);
                    } else if self.s.on_stack[w] {
                        self.s.lowlink[v] = self.s.lowlink[v].min(self.s.index[w]);
                    }
                    continue;
                }

                let s = &mut self.s;
                s.frames.pop();
                if let Some(&(parent, _)) = s.frames.last() {
                    s.lowlink[parent] = s.lowlink[parent].min(s.lowlink[v]);
                }
                if s.lowlink[v] == s.index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = s.stack.pop().expect("root is on the stack");
                        s.on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    return Some(component);
                }
            }
        }
    }
}

/// All strongly connected components, in reverse topological order of the
/// condensation.
pub fn tarjan_scc(g: &Digraph) -> SccPartition {
    let mut component_of = vec![usize::MAX; g.vertex_count()];
    let components: Vec<Vec<usize>> = Tarjan::new(g).collect();
    for (k, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = k;
        }
    }
    SccPartition {
        components,
        component_of,
    }
}

/// The first component Tarjan emits. It has no arc leaving it.
pub fn first_sink_scc(g: &Digraph) -> Result<Vec<usize>, GraphError> {
    Tarjan::new(g).next().ok_or(GraphError::EmptyGraph)
}

/// Condensation with vertex `k` standing for the `k`-th component emitted by
/// [`tarjan_scc`].
pub fn condensation(g: &Digraph) -> Digraph {
    tarjan_scc(g).condense(g)
}
