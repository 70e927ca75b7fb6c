//! Static kd-tree for Euclidean nearest-neighbour queries in fixed dimension.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

const LEAF: usize = 8;

/// Totally ordered lower bound for the search queue.
#[derive(PartialEq)]
struct Bound(f64);

impl Eq for Bound {}

impl PartialOrd for Bound {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Bound {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

enum Node {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl<const D: usize> KdTree<D> {
    pub fn new(points: Vec<[f64; D]>) -> Self {
        let mut t = KdTree {
            order: (0..points.len() as u32).collect(),
            points,
            nodes: Vec::new(),
        };
        if !t.points.is_empty() {
            let n = t.points.len();
            t.build(0, n);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, id: usize) -> &[f64; D] {
        &self.points[id]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let me = self.nodes.len();
        if end - start <= LEAF {
            self.nodes.push(Node::Leaf { start, end });
            return me;
        }
        let mut lo = [f64::INFINITY; D];
        let mut hi = [f64::NEG_INFINITY; D];
        for &i in &self.order[start..end] {
            for (d, &x) in self.points[i as usize].iter().enumerate() {
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        let dim = (0..D)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let mid = (start + end) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a as usize][dim].total_cmp(&pts[b as usize][dim]).then(a.cmp(&b))
        });
        let value = self.points[self.order[mid] as usize][dim];
        // left holds strictly smaller coordinates so exact matches follow the descent
        let mut lt = start;
        for i in start..mid {
            if self.points[self.order[i] as usize][dim] < value {
                self.order.swap(i, lt);
                lt += 1;
            }
        }
        let mid = if lt > start { lt } else { mid };
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[me] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        me
    }

    /// Nearest point as `(id, squared distance)`; ties go to the smaller id.
    pub fn nearest(&self, q: &[f64; D]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, q, &mut best);
        Some(best)
    }

    /// Best-bin-first variant of [`KdTree::nearest`] that stops after
    /// examining `max_checks` points, so the answer may be approximate.
    pub fn nearest_limited(&self, q: &[f64; D], max_checks: usize) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        let mut checks = 0usize;
        let mut heap = BinaryHeap::new();
        heap.push((Reverse(Bound(0.0)), 0usize));
        while let Some((Reverse(Bound(lb)), mut node)) = heap.pop() {
            if lb > best.1 || checks >= max_checks {
                break;
            }
            loop {
                match self.nodes[node] {
                    Node::Leaf { start, end } => {
                        self.scan(start, end, q, &mut best);
                        checks += end - start;
                        break;
                    }
                    Node::Split {
                        dim,
                        value,
                        left,
                        right,
                    } => {
                        let diff = q[dim] - value;
                        let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                        heap.push((Reverse(Bound(lb.max(diff * diff))), far));
                        node = near;
                    }
                }
            }
        }
        Some(best)
    }

    fn scan(&self, start: usize, end: usize, q: &[f64; D], best: &mut (usize, f64)) {
        for &i in &self.order[start..end] {
            let p = &self.points[i as usize];
            let mut d2 = 0.0;
            for k in 0..D {
                let t = p[k] - q[k];
                d2 += t * t;
            }
            let i = i as usize;
            if d2 < best.1 || (d2 == best.1 && i < best.0) {
                *best = (i, d2);
            }
        }
    }

    fn search(&self, node: usize, q: &[f64; D], best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => self.scan(start, end, q, best),
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pts: Vec<[f64; 4]> = (0..2000).map(|_| [rng.gen(), rng.gen(), rng.gen(), rng.gen()]).collect();
        let tree = KdTree::new(pts.clone());
        for _ in 0..200 {
            let q: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            let d2 = |p: &[f64; 4]| p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let (id, best) = tree.nearest(&q).unwrap();
            let scan = pts.iter().map(d2).fold(f64::INFINITY, f64::min);
            assert_eq!(best, scan);
            assert_eq!(d2(&pts[id]), scan);
            assert_eq!(tree.nearest_limited(&q, usize::MAX).unwrap().1, scan);
        }
        assert!(KdTree::<2>::new(Vec::new()).nearest(&[0.0, 0.0]).is_none());
    }
}
