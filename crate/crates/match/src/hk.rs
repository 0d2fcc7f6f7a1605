//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Maximum matching in the bipartite graph with `adj[u]` listing the right neighbours of left
/// vertex `u`. Returns `mate[u]` for every left vertex.
pub fn max_bipartite_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut mate_l = vec![FREE; n_left];
    let mut mate_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    loop {
        // layered BFS from the free left vertices
        let mut queue = VecDeque::new();
        let mut found = false;
        for u in 0..n_left {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mate_r[v] {
                    FREE => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..n_left {
            if mate_l[u] == FREE {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
    }
    mate_l.into_iter().map(|v| (v != FREE).then_some(v)).collect()
}

fn augment(u: usize, adj: &[Vec<usize>], mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &v in &adj[u] {
        let w = mate_r[v];
        let ok = w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist));
        if ok {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}
