use rstar::{PointDistance, RTree, RTreeObject, AABB};

use crate::geometry::{Aabb, Point2};

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    bbox: Aabb,
    doc_id: String,
}

impl RTreeObject for Entry {
    type Envelope = AABB<[f64; 2]>;

    fn envelope(&self) -> Self::Envelope {
        AABB::from_corners([self.bbox.min.x, self.bbox.min.y], [self.bbox.max.x, self.bbox.max.y])
    }
}

impl PointDistance for Entry {
    fn distance_2(&self, p: &[f64; 2]) -> f64 {
        let d = self.bbox.distance_to(Point2::new(p[0], p[1]));
        d * d
    }
}

/// Bulk-loaded R-tree over document bounding boxes.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    tree: RTree<Entry>,
}

impl SpatialIndex {
    pub fn build(entries: impl IntoIterator<Item = (Aabb, String)>) -> Self {
        let items = entries.into_iter().map(|(bbox, doc_id)| Entry { bbox, doc_id }).collect();
        SpatialIndex {
            tree: RTree::bulk_load(items),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.size()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.size() == 0
    }

    /// Ids of documents whose box meets the closed disk, sorted.
    pub fn query_radius(&self, center: Point2, r: f64) -> Vec<String> {
        let mut out: Vec<String> = self
            .tree
            .locate_within_distance([center.x, center.y], r * r)
            .filter(|e| e.bbox.intersects_disk(center, r))
            .map(|e| e.doc_id.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn query_box(&self, bb: &Aabb) -> Vec<String> {
        let env = AABB::from_corners([bb.min.x, bb.min.y], [bb.max.x, bb.max.y]);
        let mut out: Vec<String> = self
            .tree
            .locate_in_envelope_intersecting(&env)
            .map(|e| e.doc_id.clone())
            .collect();
        out.sort();
        out
    }
}
