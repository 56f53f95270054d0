use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::geometry::Point2;
use crate::map::{RoadGraph, WpId};

/// The graph the beam walks, plus the full-resolution waypoint chain behind
/// every coarse edge.
///
/// At 1 m waypoint spacing one beam step would be one metre, far below the
/// kinematically predicted distance, so the speed term would reject every
/// move. Coarsening keeps intersections, dead ends, junction points and the
/// start node, and cuts each chain between them into pieces of roughly the
/// predicted step length.
pub struct SearchGraph<'a> {
    pub graph: Cow<'a, RoadGraph>,
    full: &'a RoadGraph,
    chains: BTreeMap<(WpId, WpId), Vec<WpId>>,
}

impl<'a> SearchGraph<'a> {
    /// Searches `g` as is.
    pub fn identity(g: &'a RoadGraph) -> Self {
        SearchGraph {
            graph: Cow::Borrowed(g),
            full: g,
            chains: BTreeMap::new(),
        }
    }

    pub fn coarsen(full: &'a RoadGraph, start: WpId, step_m: f64) -> Result<Self> {
        let kept: BTreeSet<WpId> = full
            .waypoints
            .values()
            .filter(|w| w.is_intersection || full.neighbors(w.wp_id).len() != 2 || w.wp_id == start)
            .map(|w| w.wp_id)
            .collect();
        let mut chains: BTreeMap<(WpId, WpId), Vec<WpId>> = BTreeMap::new();
        let mut nodes: BTreeSet<WpId> = kept.clone();
        let mut seen_first_steps: BTreeSet<(WpId, WpId)> = BTreeSet::new();
        for &k in &kept {
            for e in full.neighbors(k) {
                if seen_first_steps.contains(&(k, e.to)) {
                    continue;
                }
                let mut chain = vec![k, e.to];
                while !kept.contains(chain.last().unwrap()) {
                    let cur = *chain.last().unwrap();
                    let prev = chain[chain.len() - 2];
                    let next = full.neighbors(cur).iter().map(|e| e.to).find(|&n| n != prev);
                    match next {
                        Some(n) => chain.push(n),
                        None => break,
                    }
                }
                let n_last = chain.len();
                seen_first_steps.insert((chain[n_last - 1], chain[n_last - 2]));
                for (a, b, piece) in split_chain(full, &chain, step_m, &chains) {
                    nodes.insert(a);
                    nodes.insert(b);
                    let mut rev = piece.clone();
                    rev.reverse();
                    chains.insert((a, b), piece);
                    chains.insert((b, a), rev);
                }
            }
        }
        let wps = nodes.iter().map(|id| full.waypoints[id].clone()).collect();
        let edges: Vec<(WpId, WpId)> = chains.keys().filter(|(a, b)| a < b).copied().collect();
        Ok(SearchGraph {
            graph: Cow::Owned(RoadGraph::from_edges(wps, edges)?),
            full,
            chains,
        })
    }

    pub fn full(&self) -> &RoadGraph {
        self.full
    }

    /// Full-resolution waypoint ids along a path of search-graph nodes.
    pub fn expand(&self, path: &[WpId]) -> Vec<WpId> {
        let mut out: Vec<WpId> = path.first().copied().into_iter().collect();
        for w in path.windows(2) {
            match self.chains.get(&(w[0], w[1])) {
                Some(c) => out.extend_from_slice(&c[1..]),
                None => out.push(w[1]),
            }
        }
        out
    }

    pub fn polyline(&self, path: &[WpId]) -> Vec<Point2> {
        self.expand(path).iter().map(|id| self.full.position(*id)).collect()
    }

    /// A point about `lookahead` metres down the branch `from → to`,
    /// following the road through degree-2 waypoints and stopping at the next
    /// intersection or dead end.
    pub fn branch_target(&self, from: WpId, to: WpId, lookahead: f64) -> Point2 {
        let first = self.expand(&[from, to]);
        let full = self.full;
        let mut prev = first[0];
        let mut cur = first[1];
        let mut travelled = full.position(prev).dist(full.position(cur));
        let mut idx = 1;
        while travelled < lookahead {
            let next = if idx + 1 < first.len() {
                Some(first[idx + 1])
            } else if !full.waypoints[&cur].is_intersection && full.neighbors(cur).len() == 2 {
                full.neighbors(cur).iter().map(|e| e.to).find(|&n| n != prev)
            } else {
                None
            };
            let Some(n) = next else { break };
            travelled += full.position(cur).dist(full.position(n));
            prev = cur;
            cur = n;
            idx += 1;
        }
        full.position(cur)
    }
}

/// Cuts a chain into `max(1, round(L / step))` pieces at the waypoints
/// closest to equal arc-length marks.
fn split_chain(
    full: &RoadGraph,
    chain: &[WpId],
    step_m: f64,
    existing: &BTreeMap<(WpId, WpId), Vec<WpId>>,
) -> Vec<(WpId, WpId, Vec<WpId>)> {
    let mut cum = vec![0.0];
    for w in chain.windows(2) {
        cum.push(cum.last().unwrap() + full.position(w[0]).dist(full.position(w[1])));
    }
    let total = *cum.last().unwrap();
    let max_pieces = chain.len() - 1;
    let mut n = ((total / step_m).round() as usize).clamp(1, max_pieces);
    let (a, b) = (chain[0], chain[chain.len() - 1]);
    // Two distinct chains joining the same pair would collide as one edge.
    if n == 1 && max_pieces > 1 && existing.get(&(a, b)).is_some_and(|c| c != chain) {
        n = 2;
    }
    let mut cuts = vec![0usize];
    for j in 1..n {
        let target = total * j as f64 / n as f64;
        let lo = cuts.last().unwrap() + 1;
        let hi = chain.len() - 1 - (n - j);
        let best = (lo..=hi)
            .min_by(|&x, &y| (cum[x] - target).abs().total_cmp(&(cum[y] - target).abs()))
            .unwrap_or(lo);
        cuts.push(best);
    }
    cuts.push(chain.len() - 1);
    cuts.windows(2)
        .map(|w| (chain[w[0]], chain[w[1]], chain[w[0]..=w[1]].to_vec()))
        .collect()
}
