/// Union-find that tracks vertex and edge counts per component.
#[derive(Clone, Debug)]
pub(crate) struct ExcessUnionFind {
    parent: Vec<usize>,
    vertices: Vec<usize>,
    edges: Vec<usize>,
}

impl ExcessUnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            vertices: vec![1; n],
            edges: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Adds the edge `{x, y}` (a loop when `x == y`) and returns the root of
    /// the component that now contains it.
    pub fn add_edge(&mut self, x: usize, y: usize) -> usize {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            self.edges[rx] += 1;
            return rx;
        }
        let (big, small) = if self.vertices[rx] >= self.vertices[ry] { (rx, ry) } else { (ry, rx) };
        self.parent[small] = big;
        self.vertices[big] += self.vertices[small];
        self.edges[big] += self.edges[small] + 1;
        big
    }

    pub fn same(&mut self, x: usize, y: usize) -> bool {
        self.find(x) == self.find(y)
    }

    /// Edges minus vertices of the component rooted at `root`.
    pub fn excess(&self, root: usize) -> i64 {
        self.edges[root] as i64 - self.vertices[root] as i64
    }

    pub fn vertices(&self, root: usize) -> usize {
        self.vertices[root]
    }

    pub fn edges(&self, root: usize) -> usize {
        self.edges[root]
    }
}
