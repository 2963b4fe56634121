use crate::Point3;

use super::distance_squared;

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Static kd-tree over mesh vertices for nearest-vertex queries.
///
/// Candidates are ranked by (squared distance, index), so the result is the
/// same vertex a linear scan with lowest-index tie-breaking would return.
pub(crate) struct VertexKdTree {
    order: Vec<usize>,
    root: Node,
}

impl VertexKdTree {
    pub fn build(points: &[Point3]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let len = order.len();
        let root = build_node(points, &mut order, 0, len);
        Self { order, root }
    }

    pub fn nearest(&self, points: &[Point3], query: &Point3) -> usize {
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(&self.root, points, query, &mut best);
        best.1
    }

    fn search(&self, node: &Node, points: &[Point3], query: &Point3, best: &mut (f64, usize)) {
        match node {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    let d = distance_squared(&points[i], query);
                    if d < best.0 || (d == best.0 && i < best.1) {
                        *best = (d, i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[*axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, points, query, best);
                // equal bounds still visited so lower-index ties are found
                if diff * diff <= best.0 {
                    self.search(far, points, query, best);
                }
            }
        }
    }
}

fn build_node(points: &[Point3], order: &mut [usize], start: usize, end: usize) -> Node {
    if end - start <= LEAF_SIZE {
        return Node::Leaf { start, end };
    }
    let slice = &mut order[start..end];
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in slice.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(points[i][a]);
            hi[a] = hi[a].max(points[i][a]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| points[a][axis].total_cmp(&points[b][axis]));
    let value = points[slice[mid]][axis];
    // left holds coordinates <= value, right holds >= value
    let left = build_node(points, order, start, start + mid);
    let right = build_node(points, order, start + mid, end);
    Node::Split {
        axis,
        value,
        left: Box::new(left),
        right: Box::new(right),
    }
}
