//! Iterative Tarjan decomposition over implicit graphs.

/// Strongly connected components of the part of the graph reachable from
/// `roots`. `succ(v)` lists the successors of `v`; nodes are `0..n`.
///
/// Returns `(components, comp_of)` where `comp_of[v]` is `usize::MAX` for
/// nodes that were not reached. Components come out in reverse topological
/// order.
pub(crate) fn tarjan<F>(
    n: usize,
    roots: impl IntoIterator<Item = usize>,
    mut succ: F,
) -> (Vec<Vec<usize>>, Vec<usize>)
where
    F: FnMut(usize) -> Vec<usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp_of = vec![UNSEEN; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;
    // (node, successors, cursor)
    let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();

    for root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root), 0));

        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let next = succ(w);
                    call.push((w, next, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(parent) = call.last() {
                let p = parent.0;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let id = components.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp_of[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(comp);
            }
        }
    }
    (components, comp_of)
}
