//! kd-tree over simplex bounding boxes, one per space.
//!
//! Every node splits its box at the midpoint of each dimension at once,
//! giving `2^dims` cells. Spaces with more than [`MAX_FANOUT_DIMS`] dimensions
//! split one dimension per level instead, cycling through them. Cells that
//! receive no simplex are not stored.

use serde::{Deserialize, Serialize};

use crate::model::BoundingBox;
use crate::raytrace::{self, Ray};
use crate::triangulate::Triangulation;

pub const MAX_FANOUT_DIMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Objective,
    Design,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KdConfig {
    pub leaf_size: usize,
    pub max_depth: usize,
    /// Stop splitting once this many nodes exist.
    pub max_nodes: usize,
}

impl Default for KdConfig {
    fn default() -> Self {
        Self {
            leaf_size: 8,
            max_depth: 12,
            max_nodes: 1 << 18,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KdNode {
    pub bbox: BoundingBox,
    pub children: Vec<KdNode>,
    /// Filled at leaves only.
    pub simplex_ids: Vec<usize>,
}

impl KdNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct KdTree {
    root: KdNode,
    space: Space,
    dims: usize,
    simplex_boxes: Vec<BoundingBox>,
    node_count: usize,
}

// Simplex boxes and the root are widened by this fraction of the root extent
// so that hits computed with rounding error are never pruned.
const BOX_MARGIN: f64 = 1e-9;

impl KdTree {
    /// Indexes the projection of every simplex onto `space`. Returns `None`
    /// for the design space of a front without parameters.
    pub fn build(tri: &Triangulation, space: Space) -> Option<Self> {
        Self::build_with(tri, space, KdConfig::default())
    }

    pub fn build_with(tri: &Triangulation, space: Space, config: KdConfig) -> Option<Self> {
        let ps = tri.pareto_set();
        let range = match space {
            Space::Objective => 0..ps.n(),
            Space::Design => ps.n()..ps.n() + ps.m(),
        };
        if range.is_empty() {
            return None;
        }
        let boxes: Vec<BoundingBox> = tri
            .simplices()
            .iter()
            .map(|s| {
                let coords: Vec<Vec<f64>> = s.vertex_ids.iter().map(|&v| ps.joint(v)[range.clone()].to_vec()).collect();
                BoundingBox::enclosing(coords.iter().map(Vec::as_slice)).expect("simplices have vertices")
            })
            .collect();
        Some(Self::from_boxes(boxes, space, config))
    }

    /// Builds a tree directly over the given boxes (ids are their positions).
    pub fn from_boxes(boxes: Vec<BoundingBox>, space: Space, config: KdConfig) -> Self {
        let dims = boxes.first().map_or(0, BoundingBox::dims);
        let mut root_box = boxes
            .iter()
            .fold(None::<BoundingBox>, |acc, b| match acc {
                None => Some(b.clone()),
                Some(mut a) => {
                    a.union_with(b);
                    Some(a)
                }
            })
            .unwrap_or_else(|| BoundingBox::new(vec![0.0; dims], vec![0.0; dims]));
        let scale = root_box.widths().into_iter().fold(1.0f64, f64::max);
        let margin = BOX_MARGIN * scale;
        root_box = root_box.inflated(margin);
        let simplex_boxes: Vec<BoundingBox> = boxes.iter().map(|b| b.inflated(margin)).collect();

        let mut node_count = 1;
        let ids: Vec<usize> = (0..simplex_boxes.len()).collect();
        let root = split(root_box, ids, 0, &simplex_boxes, &config, &mut node_count);
        Self {
            root,
            space,
            dims,
            simplex_boxes,
            node_count,
        }
    }

    pub fn root(&self) -> &KdNode {
        &self.root
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Slightly widened bounding box of a simplex in this space.
    pub fn simplex_box(&self, id: usize) -> &BoundingBox {
        &self.simplex_boxes[id]
    }

    /// Sorted ids of simplices whose box the ray may cross.
    pub fn candidates_for_ray(&self, ray: &Ray) -> Vec<usize> {
        self.collect(
            |b| raytrace::ray_box(ray, b).is_some(),
            |id| raytrace::ray_box(ray, &self.simplex_boxes[id]).is_some(),
        )
    }

    /// Sorted ids of simplices whose range in `dim` contains `value`.
    pub fn candidates_for_value(&self, dim: usize, value: f64) -> Vec<usize> {
        let hit = |b: &BoundingBox| b.lower[dim] <= value && value <= b.upper[dim];
        self.collect(hit, |id| hit(&self.simplex_boxes[id]))
    }

    /// Sorted ids of simplices whose box intersects `query` (closed).
    pub fn candidates_for_box(&self, query: &BoundingBox) -> Vec<usize> {
        self.collect(|b| b.intersects(query), |id| self.simplex_boxes[id].intersects(query))
    }

    fn collect(&self, node_test: impl Fn(&BoundingBox) -> bool, simplex_test: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        if !node_test(&self.root.bbox) {
            return out;
        }
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if node.is_leaf() {
                out.extend(node.simplex_ids.iter().copied().filter(|&id| simplex_test(id)));
            } else {
                stack.extend(node.children.iter().filter(|c| node_test(&c.bbox)));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// The cells a node at `depth` splits `bbox` into, in a fixed order.
pub fn child_boxes(bbox: &BoundingBox, depth: usize) -> Vec<BoundingBox> {
    let dims = bbox.dims();
    let mid: Vec<f64> = (0..dims).map(|i| 0.5 * (bbox.lower[i] + bbox.upper[i])).collect();
    if dims > MAX_FANOUT_DIMS {
        let d = depth % dims;
        let mut low = bbox.clone();
        let mut high = bbox.clone();
        low.upper[d] = mid[d];
        high.lower[d] = mid[d];
        return vec![low, high];
    }
    (0..1usize << dims)
        .map(|mask| {
            let mut cell = bbox.clone();
            for d in 0..dims {
                if mask & (1 << d) == 0 {
                    cell.upper[d] = mid[d];
                } else {
                    cell.lower[d] = mid[d];
                }
            }
            cell
        })
        .collect()
}

fn split(
    bbox: BoundingBox,
    ids: Vec<usize>,
    depth: usize,
    boxes: &[BoundingBox],
    config: &KdConfig,
    node_count: &mut usize,
) -> KdNode {
    let leaf = |bbox, ids| KdNode {
        bbox,
        children: Vec::new(),
        simplex_ids: ids,
    };
    if ids.len() <= config.leaf_size || depth >= config.max_depth {
        return leaf(bbox, ids);
    }
    let cells: Vec<(BoundingBox, Vec<usize>)> = child_boxes(&bbox, depth)
        .into_iter()
        .map(|cell| {
            let inside: Vec<usize> = ids.iter().copied().filter(|&id| boxes[id].intersects(&cell)).collect();
            (cell, inside)
        })
        .filter(|(_, inside)| !inside.is_empty())
        .collect();
    // Stop when some cell keeps every simplex (typically the star of a
    // shared vertex) or the split copies an average id into more than
    // sqrt(fanout) cells: further splits would only duplicate ids.
    let fanout = if bbox.dims() > MAX_FANOUT_DIMS { 2 } else { 1usize << bbox.dims() };
    let total: usize = cells.iter().map(|(_, inside)| inside.len()).sum();
    let stalled = cells.iter().any(|(_, inside)| inside.len() == ids.len());
    if stalled || (fanout > 2 && total * total > fanout * ids.len() * ids.len()) {
        return leaf(bbox, ids);
    }
    if *node_count + cells.len() > config.max_nodes {
        return leaf(bbox, ids);
    }
    *node_count += cells.len();
    let children = cells
        .into_iter()
        .map(|(cell, inside)| split(cell, inside, depth + 1, boxes, config, node_count))
        .collect();
    KdNode {
        bbox,
        children,
        simplex_ids: Vec::new(),
    }
}
