//! Occlusion graph construction and pick-order planning.
//!
//! The graph records "j occludes i" edges derived from 2D masks: the edge
//! weight is the fraction of i's occluded region covered by j's visible
//! region. Random picking selects a fully visible instance to grasp next;
//! target picking removes the target's transitive occluders in topological
//! order before grasping the target itself.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::FrameLabels;
use crate::mask::{BinaryMask, MaskError};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.1;
pub const DEFAULT_FULLY_VISIBLE_EPS: f64 = 0.02;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("instance {0} has zero whole area")]
    ZeroWholeArea(u32),
    #[error("instance {0}: visible and occluded masks overlap")]
    MasksOverlap(u32),
    #[error("visible masks of instances {0} and {1} overlap")]
    VisibleOverlap(u32, u32),
    #[error("instance id {0} appears more than once")]
    DuplicateId(u32),
    #[error("the graph has no instances")]
    EmptyGraph,
    #[error("every instance is fully occluded; nothing presents a graspable surface")]
    NoGraspableInstance,
    #[error("unknown target instance {0}")]
    UnknownTarget(u32),
    #[error("plan schedules instance {instance} before its occluder {occluder}")]
    OrderingViolation { instance: u32, occluder: u32 },
}

/// One instance given to the planner.
#[derive(Debug, Clone)]
pub struct PlannerInstance {
    pub id: u32,
    pub class_id: usize,
    pub visible: BinaryMask,
    pub occluded: BinaryMask,
}

impl PlannerInstance {
    pub fn from_labels(labels: &FrameLabels) -> Vec<Self> {
        labels
            .instances
            .iter()
            .map(|i| Self {
                id: i.id,
                class_id: i.class_id,
                visible: i.visible.clone(),
                occluded: i.occluded.clone(),
            })
            .collect()
    }
}

/// Node of the occlusion graph.
#[derive(Debug, Clone)]
pub struct OcclusionNode {
    pub id: u32,
    pub class_id: usize,
    pub visible: BinaryMask,
    pub occluded: BinaryMask,
    pub whole: BinaryMask,
    /// `area(occluded) / area(whole)`.
    pub occluded_ratio: f64,
}

/// Directed edge: `occluder` lies on top of `occludee`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcclusionEdge {
    pub occluder: u32,
    pub occludee: u32,
    /// `area(occluded_i  ∩ visible_j) / area(occluded_i)`, in `[0, 1]`.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct OcclusionGraph {
    nodes: Vec<OcclusionNode>,
    edges: Vec<OcclusionEdge>,
}

impl OcclusionGraph {
    pub fn nodes(&self) -> &[OcclusionNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[OcclusionEdge] {
        &self.edges
    }

    pub fn node(&self, id: u32) -> Option<&OcclusionNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn has_incoming(&self, id: u32) -> bool {
        self.edges.iter().any(|e| e.occludee == id)
    }

    /// Ids of the instances that directly occlude `id`.
    pub fn occluders_of(&self, id: u32) -> Vec<u32> {
        self.edges
            .iter()
            .filter(|e| e.occludee == id)
            .map(|e| e.occluder)
            .collect()
    }
}

/// Builds the occlusion graph. An edge `j -> i` exists iff the fraction of
/// i's occluded region covered by j's visible region reaches
/// `edge_threshold`; the threshold suppresses single-pixel rasterization
/// noise.
pub fn build_graph(
    instances: &[PlannerInstance],
    edge_threshold: f64,
) -> Result<OcclusionGraph, PlanError> {
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::with_capacity(instances.len());
    for inst in instances {
        if !seen.insert(inst.id) {
            return Err(PlanError::DuplicateId(inst.id));
        }
        if inst.visible.intersection_area(&inst.occluded)? > 0 {
            return Err(PlanError::MasksOverlap(inst.id));
        }
        let whole = inst.visible.union(&inst.occluded)?;
        let whole_area = whole.area();
        if whole_area == 0 {
            return Err(PlanError::ZeroWholeArea(inst.id));
        }
        nodes.push(OcclusionNode {
            id: inst.id,
            class_id: inst.class_id,
            visible: inst.visible.clone(),
            occluded: inst.occluded.clone(),
            occluded_ratio: inst.occluded.area() as f64 / whole_area as f64,
            whole,
        });
    }
    nodes.sort_by_key(|n| n.id);

    for (a, na) in nodes.iter().enumerate() {
        for nb in &nodes[a + 1..] {
            if na.visible.intersection_area(&nb.visible)? > 0 {
                return Err(PlanError::VisibleOverlap(na.id, nb.id));
            }
        }
    }

    let mut edges = Vec::new();
    for occludee in &nodes {
        let occluded_area = occludee.occluded.area();
        if occluded_area == 0 {
            continue;
        }
        for occluder in &nodes {
            if occluder.id == occludee.id {
                continue;
            }
            let covered = occludee.occluded.intersection_area(&occluder.visible)?;
            let weight = covered as f64 / occluded_area as f64;
            if weight >= edge_threshold {
                edges.push(OcclusionEdge {
                    occluder: occluder.id,
                    occludee: occludee.id,
                    weight,
                });
            }
        }
    }
    Ok(OcclusionGraph { nodes, edges })
}

/// Next instance to grasp in random picking.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomPick {
    pub instance_id: u32,
    /// `(row, col)` grasp pixel on the visible region.
    pub suction_point: (u32, u32),
    /// Set when no fully visible instance existed and the least-occluded one
    /// was chosen instead.
    pub degraded: bool,
}

/// Selects the next pick: among instances without occluders, prefer those
/// whose occluded ratio is at most `fully_visible_eps` and take the one with
/// the largest visible area (ties to the lowest id). When every instance has
/// an occluder or exceeds the ratio, fall back to the minimum occluded ratio
/// and flag the pick as degraded. Instances with occluders are only eligible
/// once no occluder-free instance remains, so the pick never climbs over
/// something known to sit on top of it.
pub fn next_random_pick(
    graph: &OcclusionGraph,
    fully_visible_eps: f64,
) -> Result<RandomPick, PlanError> {
    if graph.nodes().is_empty() {
        return Err(PlanError::EmptyGraph);
    }
    let free: Vec<&OcclusionNode> = graph
        .nodes()
        .iter()
        .filter(|n| !graph.has_incoming(n.id))
        .collect();

    let candidates: Vec<&&OcclusionNode> = free
        .iter()
        .filter(|n| n.occluded_ratio <= fully_visible_eps)
        .collect();

    let (chosen, degraded) = if let Some(best) = candidates
        .iter()
        .max_by(|a, b| {
            a.visible
                .area()
                .cmp(&b.visible.area())
                .then(b.id.cmp(&a.id))
        })
    {
        (**best, false)
    } else {
        let pool: Vec<&OcclusionNode> = if free.is_empty() {
            graph.nodes().iter().collect()
        } else {
            free.clone()
        };
        let best = pool
            .iter()
            .min_by(|a, b| {
                a.occluded_ratio
                    .partial_cmp(&b.occluded_ratio)
                    .unwrap()
                    .then(a.id.cmp(&b.id))
            })
            .expect("graph is non-empty");
        (*best, true)
    };

    let suction_point = chosen
        .visible
        .safe_point()
        .map_err(|_| PlanError::NoGraspableInstance)?;
    Ok(RandomPick {
        instance_id: chosen.id,
        suction_point,
        degraded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickAction {
    MoveToObstacleBin,
    MoveToTargetBox,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PickStep {
    pub instance_id: u32,
    pub action: PickAction,
    /// `(row, col)` grasp pixel.
    pub suction_point: (u32, u32),
}

/// Ordered removal plan for target picking: every obstacle goes to the
/// obstacle bin, the target goes to the target box last.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PickPlan {
    pub format_version: u32,
    pub steps: Vec<PickStep>,
    pub warnings: Vec<String>,
}

impl PickPlan {
    /// Replays the plan against the graph: no step may be scheduled before
    /// all of its in-plan occluders.
    pub fn verify_against(&self, graph: &OcclusionGraph) -> Result<(), PlanError> {
        let planned: BTreeMap<u32, usize> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| (s.instance_id, i))
            .collect();
        // cycle-broken edges are exempt from the ordering check
        let broken: BTreeSet<u32> = self.cycle_broken_ids();
        for edge in graph.edges() {
            if broken.contains(&edge.occluder) || broken.contains(&edge.occludee) {
                continue;
            }
            if let (Some(&top), Some(&below)) =
                (planned.get(&edge.occluder), planned.get(&edge.occludee))
            {
                if below < top {
                    return Err(PlanError::OrderingViolation {
                        instance: edge.occludee,
                        occluder: edge.occluder,
                    });
                }
            }
        }
        Ok(())
    }

    fn cycle_broken_ids(&self) -> BTreeSet<u32> {
        self.warnings
            .iter()
            .filter_map(|w| {
                w.strip_prefix("cycle broken at instance ")
                    .and_then(|rest| rest.split_whitespace().next())
                    .and_then(|id| id.parse().ok())
            })
            .collect()
    }
}

/// Plans the removals needed to grasp `target_id`: all transitive occluders
/// of the target, ordered so nothing is picked while something still sits on
/// top of it. Mutual-occlusion cycles are broken at the least-occluded node
/// in the cycle, recorded in the warnings.
pub fn plan_target_pick(graph: &OcclusionGraph, target_id: u32) -> Result<PickPlan, PlanError> {
    let target = graph
        .node(target_id)
        .ok_or(PlanError::UnknownTarget(target_id))?;

    // collect the target's transitive occluders (excluding the target itself)
    let mut obstacle_set = BTreeSet::new();
    let mut queue = VecDeque::from([target_id]);
    while let Some(id) = queue.pop_front() {
        for occluder in graph.occluders_of(id) {
            if occluder != target_id && obstacle_set.insert(occluder) {
                queue.push_back(occluder);
            }
        }
    }

    // Kahn's algorithm over the obstacle subgraph; the ready set is kept
    // ordered so equal-depth obstacles come out in id order
    let mut in_degree: BTreeMap<u32, usize> = obstacle_set.iter().map(|&id| (id, 0)).collect();
    for edge in graph.edges() {
        if obstacle_set.contains(&edge.occluder) && obstacle_set.contains(&edge.occludee) {
            *in_degree.get_mut(&edge.occludee).unwrap() += 1;
        }
    }
    let mut ready: BTreeSet<u32> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();

    let mut warnings = Vec::new();
    let mut order = Vec::with_capacity(obstacle_set.len());
    let mut remaining: BTreeSet<u32> = obstacle_set.clone();
    while !remaining.is_empty() {
        let next = if let Some(&id) = ready.iter().next() {
            ready.remove(&id);
            id
        } else {
            // a cycle: every remaining node still has an occluder; release
            // the least-occluded one first
            let &id = remaining
                .iter()
                .min_by(|a, b| {
                    let ra = graph.node(**a).unwrap().occluded_ratio;
                    let rb = graph.node(**b).unwrap().occluded_ratio;
                    ra.partial_cmp(&rb).unwrap().then(a.cmp(b))
                })
                .unwrap();
            warnings.push(format!(
                "cycle broken at instance {id} (mutual occlusion); picked least-occluded first"
            ));
            id
        };
        remaining.remove(&next);
        order.push(next);
        for edge in graph.edges() {
            if edge.occluder == next && remaining.contains(&edge.occludee) {
                let d = in_degree.get_mut(&edge.occludee).unwrap();
                *d = d.saturating_sub(1);
                if *d == 0 {
                    ready.insert(edge.occludee);
                }
            }
        }
    }

    let mut steps = Vec::with_capacity(order.len() + 1);
    for id in order {
        let node = graph.node(id).unwrap();
        let suction_point = match node.visible.safe_point() {
            Ok(p) => p,
            Err(_) => {
                // no visible surface (deep inside a broken cycle); aim at the
                // whole-footprint safe point and say so
                warnings.push(format!(
                    "instance {id} has no visible surface; suction point taken from its whole footprint"
                ));
                node.whole.safe_point().map_err(PlanError::Mask)?
            }
        };
        steps.push(PickStep {
            instance_id: id,
            action: PickAction::MoveToObstacleBin,
            suction_point,
        });
    }
    let target_point = match target.visible.safe_point() {
        Ok(p) => p,
        Err(_) => {
            warnings.push(format!(
                "target {target_id} has no visible surface before obstacle removal; suction point taken from its whole footprint"
            ));
            target.whole.safe_point().map_err(PlanError::Mask)?
        }
    };
    steps.push(PickStep {
        instance_id: target_id,
        action: PickAction::MoveToTargetBox,
        suction_point: target_point,
    });

    Ok(PickPlan {
        format_version: FORMAT_VERSION,
        steps,
        warnings,
    })
}
