//! Small brute-force models the table and routing code is checked against.

use vndn::mobility::RoadGraph;
use vndn::ndn::Name;
use vndn::tables::FaceId;

/// Least-recently-used cache as a plain list, least recent first.
#[derive(Debug, Clone)]
pub struct LruModel {
    capacity: usize,
    order: Vec<String>,
}

impl LruModel {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            order: Vec::new(),
        }
    }

    /// Returns the evicted name, if any.
    pub fn insert(&mut self, name: &str) -> Option<String> {
        if self.capacity == 0 {
            return None;
        }
        self.order.retain(|n| n != name);
        let evicted = (self.order.len() >= self.capacity).then(|| self.order.remove(0));
        self.order.push(name.to_string());
        evicted
    }

    pub fn touch(&mut self, name: &str) -> bool {
        match self.order.iter().position(|n| n == name) {
            Some(i) => {
                let n = self.order.remove(i);
                self.order.push(n);
                true
            }
            None => false,
        }
    }

    pub fn contents(&self) -> Vec<String> {
        let mut v = self.order.clone();
        v.sort();
        v
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CacheOp {
    Insert(usize),
    Lookup(usize),
}

/// Replays `ops` over names `/n0`..`/n4` against both the content store and
/// the model. Each op happens 1 ms after the previous one.
pub fn lru_replay(capacity: usize, ops: &[CacheOp]) -> Result<(), String> {
    use vndn::ndn::{Data, Interest};
    use vndn::tables::ContentStore;
    use vndn::SimTime;

    let mut cs = ContentStore::new(capacity);
    let mut model = LruModel::new(capacity);
    for (step, op) in ops.iter().enumerate() {
        let now = SimTime::from_millis(step as u64 + 1);
        match *op {
            CacheOp::Insert(k) => {
                let name = format!("/n{k}");
                let data = Data::new(Name::parse_uri(&name).unwrap(), vec![k as u8], 3_600_000);
                let got = cs.insert(data, now).map(|n| n.to_uri());
                let want = model.insert(&name);
                if got != want {
                    return Err(format!("step {step}: insert {name} evicted {got:?}, model {want:?}"));
                }
            }
            CacheOp::Lookup(k) => {
                let name = format!("/n{k}");
                let got = cs.find(&Interest::new(Name::parse_uri(&name).unwrap(), 0), now).is_some();
                let want = model.touch(&name);
                if got != want {
                    return Err(format!("step {step}: lookup {name} hit {got}, model {want}"));
                }
            }
        }
        let mut held: Vec<String> = cs.iter().map(|(n, _)| n.to_uri()).collect();
        held.sort();
        if held != model.contents() {
            return Err(format!("step {step}: store holds {held:?}, model {:?}", model.contents()));
        }
        if cs.len() > capacity {
            return Err(format!("step {step}: {} entries over capacity {capacity}", cs.len()));
        }
    }
    Ok(())
}

/// Longest matching prefix by scanning every entry.
pub fn linear_lpm<'a>(entries: &'a [(Name, Vec<FaceId>)], name: &Name) -> Option<&'a (Name, Vec<FaceId>)> {
    let mut best: Option<&(Name, Vec<FaceId>)> = None;
    for e in entries {
        let is_prefix = e.0.len() <= name.len() && e.0.components().iter().zip(name.components()).all(|(a, b)| a == b);
        if is_prefix && best.is_none_or(|b| e.0.len() > b.0.len()) {
            best = Some(e);
        }
    }
    best
}

/// Cheapest route from `from` to `to` by enumerating every route that uses
/// each edge at most once and never turns straight back. Ties go to the
/// smallest sequence of edge indices.
pub fn exhaustive_route(graph: &RoadGraph, from: usize, to: usize, weight: &dyn Fn(usize) -> f64) -> Option<(Vec<usize>, f64)> {
    fn walk(
        g: &RoadGraph,
        path: &mut Vec<usize>,
        cost: f64,
        to: usize,
        weight: &dyn Fn(usize) -> f64,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        let last = *path.last().unwrap();
        if last == to {
            let better = match best {
                None => true,
                Some((p, c)) => cost < *c || (cost == *c && path.as_slice() < p.as_slice()),
            };
            if better {
                *best = Some((path.clone(), cost));
            }
            return;
        }
        for n in 0..g.edges().len() {
            let follows = g.edge_from(n) == g.edge_to(last);
            let reverses = g.edge_to(n) == g.edge_from(last) && g.edge_from(n) == g.edge_to(last);
            if follows && !reverses && !path.contains(&n) {
                path.push(n);
                walk(g, path, cost + weight(n), to, weight, best);
                path.pop();
            }
        }
    }
    let mut best = None;
    let mut path = vec![from];
    walk(graph, &mut path, weight(from), to, weight, &mut best);
    best
}

/// Every route between two edges under the same rules as [`exhaustive_route`].
pub fn all_routes(graph: &RoadGraph, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn walk(g: &RoadGraph, path: &mut Vec<usize>, to: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == to {
            out.push(path.clone());
            return;
        }
        for n in 0..g.edges().len() {
            let follows = g.edge_from(n) == g.edge_to(last);
            let reverses = g.edge_to(n) == g.edge_from(last) && g.edge_from(n) == g.edge_to(last);
            if follows && !reverses && !path.contains(&n) {
                path.push(n);
                walk(g, path, to, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(graph, &mut vec![from], to, &mut out);
    out
}
