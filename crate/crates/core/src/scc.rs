//! Strongly connected components of a directed support graph.

/// Result of a strongly connected component decomposition.
#[derive(Debug, Clone)]
pub struct Components {
    /// Component id of every vertex.
    pub component_of: Vec<usize>,
    /// Members of every component, in reverse topological order (sinks first).
    pub members: Vec<Vec<usize>>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Components with no edge leaving them. For a stochastic matrix these are
    /// exactly the recurrent classes.
    pub fn closed<I, F>(&self, successors: F) -> Vec<usize>
    where
        F: Fn(usize) -> I,
        I: IntoIterator<Item = usize>,
    {
        (0..self.count())
            .filter(|&c| {
                self.members[c]
                    .iter()
                    .all(|&s| successors(s).into_iter().all(|t| self.component_of[t] == c))
            })
            .collect()
    }
}

/// Iterative Tarjan. `successors(v)` enumerates the out-neighbours of `v`.
pub fn strongly_connected_components<I, F>(n: usize, successors: F) -> Components
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component_of = vec![UNVISITED; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;

    // Each frame holds a vertex and its materialized successor list with a cursor.
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, successors(root).into_iter().collect(), 0));

        while let Some((v, succ, cursor)) = frames.last_mut() {
            let v = *v;
            if *cursor < succ.len() {
                let w = succ[*cursor];
                *cursor += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, successors(w).into_iter().collect(), 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some((parent, _, _)) = frames.last() {
                let parent = *parent;
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let id = members.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                members.push(comp);
            }
        }
    }

    Components {
        component_of,
        members,
    }
}
