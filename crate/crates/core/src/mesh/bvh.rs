use crate::Point3;

use super::TriangleMesh;

const LEAF_FACES: usize = 4;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Point3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn inflated(&self, margin: f64) -> Aabb {
        let m = nalgebra::Vector3::repeat(margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|a| self.min[a] <= other.max[a] && other.min[a] <= self.max[a])
    }

    fn centroid(&self, axis: usize) -> f64 {
        0.5 * (self.min[axis] + self.max[axis])
    }
}

enum BvhNode {
    Leaf {
        bounds: Aabb,
        start: usize,
        end: usize,
    },
    Inner {
        bounds: Aabb,
        left: Box<BvhNode>,
        right: Box<BvhNode>,
    },
}

impl BvhNode {
    fn bounds(&self) -> &Aabb {
        match self {
            BvhNode::Leaf { bounds, .. } | BvhNode::Inner { bounds, .. } => bounds,
        }
    }
}

/// Median-split bounding-volume hierarchy over the non-degenerate faces of a mesh.
pub struct FaceBvh {
    faces: Vec<usize>,
    boxes: Vec<Aabb>,
    root: Option<BvhNode>,
}

impl FaceBvh {
    pub(crate) fn build(mesh: &TriangleMesh) -> Self {
        let boxes: Vec<Aabb> = (0..mesh.face_count())
            .map(|f| Aabb::from_points(mesh.triangle(f).iter()))
            .collect();
        let mut faces: Vec<usize> = (0..mesh.face_count())
            .filter(|&f| !mesh.is_degenerate_face(f))
            .collect();
        let len = faces.len();
        let root = (len > 0).then(|| build(&boxes, &mut faces, 0, len));
        Self { faces, boxes, root }
    }

    /// Faces whose bounding box overlaps `query`, in ascending face order.
    pub fn query(&self, query: &Aabb) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            self.collect(root, query, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Number of faces indexed (degenerate faces are left out).
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    fn collect(&self, node: &BvhNode, query: &Aabb, out: &mut Vec<usize>) {
        if !node.bounds().overlaps(query) {
            return;
        }
        match node {
            BvhNode::Leaf { start, end, .. } => {
                out.extend(
                    self.faces[*start..*end]
                        .iter()
                        .copied()
                        .filter(|&f| self.boxes[f].overlaps(query)),
                );
            }
            BvhNode::Inner { left, right, .. } => {
                self.collect(left, query, out);
                self.collect(right, query, out);
            }
        }
    }
}

fn build(boxes: &[Aabb], faces: &mut [usize], start: usize, end: usize) -> BvhNode {
    let bounds = faces[start..end]
        .iter()
        .fold(Aabb::empty(), |acc, &f| acc.union(&boxes[f]));
    if end - start <= LEAF_FACES {
        return BvhNode::Leaf { bounds, start, end };
    }
    let extent = bounds.max - bounds.min;
    let axis = extent.imax();
    let slice = &mut faces[start..end];
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        boxes[a].centroid(axis).total_cmp(&boxes[b].centroid(axis))
    });
    let left = build(boxes, faces, start, start + mid);
    let right = build(boxes, faces, start + mid, end);
    BvhNode::Inner {
        bounds,
        left: Box::new(left),
        right: Box::new(right),
    }
}
