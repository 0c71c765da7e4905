use crate::model::Graph;

/// A proper colouring with at most `k` colours, if one exists. Vertices are
/// coloured in order of decreasing degree; a new colour is only opened as
/// the next unused one.
pub fn find_coloring(g: &Graph, k: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut color = vec![usize::MAX; n];
    fn rec(g: &Graph, order: &[usize], i: usize, used: usize, k: usize, color: &mut [usize]) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        for c in 0..(used + 1).min(k) {
            if g.neighbors(v).ones().all(|u| color[u] != c) {
                color[v] = c;
                if rec(g, order, i + 1, used.max(c + 1), k, color) {
                    return true;
                }
                color[v] = usize::MAX;
            }
        }
        false
    }
    rec(g, &order, 0, 0, k, &mut color).then_some(color)
}

pub fn is_k_colorable(g: &Graph, k: usize) -> bool {
    find_coloring(g, k).is_some()
}
