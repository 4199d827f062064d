//! Dataset generation from one-polygon-per-instance video annotations.
//!
//! Input videos record each object once, as a whole-region polygon annotated
//! at the frame where the object is picked out of the scene. The camera is
//! fixed and objects do not move while present, so the annotated mask is
//! backprojected to every earlier frame. An object picked earlier was on top,
//! hence it occludes objects picked later: for frame `t`, an instance is
//! present iff `pick_frame >= t`, its occluded region is the part of its
//! whole mask covered by present instances with an earlier pick frame, and
//! its visible region is the rest.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{BinaryMask, MaskError, Polygon};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("class names must be unique and non-empty: {0:?}")]
    InvalidCatalog(String),
    #[error("unknown class name {0:?}")]
    UnknownClass(String),
    #[error("class id {0} is out of range for {1} classes")]
    ClassIdOutOfRange(usize, usize),
    #[error("instance id {0} appears more than once")]
    DuplicateInstanceId(u32),
    #[error("instances {0} and {1} share pick_frame {2}; pick order must be total")]
    DuplicatePickFrame(u32, u32, usize),
    #[error("pick_frame {pick_frame} of instance {id} is outside 0..{frame_count}")]
    PickFrameOutOfRange {
        id: u32,
        pick_frame: usize,
        frame_count: usize,
    },
    #[error("visible masks of instances {0} and {1} overlap")]
    VisibleOverlap(u32, u32),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON")]
    Schema(#[from] serde_json::Error),
}

/// Ordered foreground class names; background is the implicit class 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCatalog {
    names: Vec<String>,
}

impl ClassCatalog {
    pub fn new(names: Vec<String>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(DatasetError::InvalidCatalog(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(DatasetError::InvalidCatalog(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// Total class count including background.
    pub fn n_class(&self) -> usize {
        self.names.len() + 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// 1-based class id for a name; 0 is background.
    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|i| i + 1)
    }

    pub fn name_of(&self, class_id: usize) -> Option<&str> {
        if class_id == 0 {
            Some("background")
        } else {
            self.names.get(class_id - 1).map(String::as_str)
        }
    }
}

/// One annotated object: a whole-region polygon drawn at its pick frame.
#[derive(Debug, Clone)]
pub struct InstanceAnnotation {
    pub id: u32,
    pub class_id: usize,
    pub polygon: Polygon,
    pub pick_frame: usize,
}

/// A fixed-camera video of objects being removed one by one.
#[derive(Debug, Clone)]
pub struct VideoAnnotation {
    pub frame_count: usize,
    pub instances: Vec<InstanceAnnotation>,
}

impl VideoAnnotation {
    fn validate(&self, n_class: usize) -> Result<(), DatasetError> {
        let mut ids = HashSet::new();
        let mut picks: Vec<(usize, u32)> = Vec::new();
        for inst in &self.instances {
            if !ids.insert(inst.id) {
                return Err(DatasetError::DuplicateInstanceId(inst.id));
            }
            if inst.pick_frame >= self.frame_count {
                return Err(DatasetError::PickFrameOutOfRange {
                    id: inst.id,
                    pick_frame: inst.pick_frame,
                    frame_count: self.frame_count,
                });
            }
            if inst.class_id == 0 || inst.class_id >= n_class {
                return Err(DatasetError::ClassIdOutOfRange(inst.class_id, n_class));
            }
            picks.push((inst.pick_frame, inst.id));
        }
        picks.sort_unstable();
        for pair in picks.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(DatasetError::DuplicatePickFrame(
                    pair[0].1, pair[1].1, pair[0].0,
                ));
            }
        }
        Ok(())
    }
}

/// Per-frame masks of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceLabels {
    pub id: u32,
    pub class_id: usize,
    pub whole: BinaryMask,
    pub visible: BinaryMask,
    pub occluded: BinaryMask,
}

/// Dense per-pixel class labels (0 = background), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    height: u32,
    width: u32,
    labels: Vec<u32>,
}

impl LabelImage {
    pub fn new(height: u32, width: u32, labels: Vec<u32>) -> Result<Self, DatasetError> {
        let n = height as usize * width as usize;
        if labels.len() != n {
            return Err(MaskError::LengthMismatch {
                expected: n,
                actual: labels.len(),
            }
            .into());
        }
        Ok(Self {
            height,
            width,
            labels,
        })
    }

    pub fn zeros(height: u32, width: u32) -> Self {
        Self {
            height,
            width,
            labels: vec![0; height as usize * width as usize],
        }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, row: u32, col: u32) -> u32 {
        self.labels[row as usize * self.width as usize + col as usize]
    }

    fn set(&mut self, row: u32, col: u32, value: u32) {
        self.labels[row as usize * self.width as usize + col as usize] = value;
    }
}

/// Complete labels for one frame: per-instance masks plus the derived
/// semantic visible label image and per-class occluded channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLabels {
    pub frame: usize,
    pub instances: Vec<InstanceLabels>,
    pub semantic_visible: LabelImage,
    /// One channel per foreground class; channels may overlap.
    pub semantic_occluded: Vec<BinaryMask>,
}

/// Propagates whole-region annotations to every frame of the video,
/// deriving visible and occluded masks from the pick order.
pub fn backproject(
    video: &VideoAnnotation,
    catalog: &ClassCatalog,
    height: u32,
    width: u32,
) -> Result<Vec<FrameLabels>, DatasetError> {
    video.validate(catalog.n_class())?;
    let wholes: Vec<BinaryMask> = video
        .instances
        .iter()
        .map(|inst| Ok(inst.polygon.rasterize(height, width)?.mask))
        .collect::<Result<_, DatasetError>>()?;

    (0..video.frame_count)
        .into_par_iter()
        .map(|frame| {
            let mut instances = Vec::new();
            for (i, inst) in video.instances.iter().enumerate() {
                if inst.pick_frame < frame {
                    continue; // already removed
                }
                // union of wholes of present instances picked before this one
                let mut cover = BinaryMask::empty(height, width)?;
                for (j, other) in video.instances.iter().enumerate() {
                    if j != i && other.pick_frame >= frame && other.pick_frame < inst.pick_frame {
                        cover = cover.union(&wholes[j])?;
                    }
                }
                let occluded = wholes[i].intersect(&cover)?;
                let visible = wholes[i].subtract(&occluded)?;
                instances.push(InstanceLabels {
                    id: inst.id,
                    class_id: inst.class_id,
                    whole: wholes[i].clone(),
                    visible,
                    occluded,
                });
            }
            let (semantic_visible, semantic_occluded) =
                instance_to_semantic(&instances, catalog, height, width)?;
            Ok(FrameLabels {
                frame,
                instances,
                semantic_visible,
                semantic_occluded,
            })
        })
        .collect()
}

/// Converts instance-level masks to class-level labels: the visible label
/// image assigns each pixel the class of the instance covering it, and each
/// occluded channel is the union of the occluded masks of its class.
/// Occluded channels of different classes may overlap.
pub fn instance_to_semantic(
    instances: &[InstanceLabels],
    catalog: &ClassCatalog,
    height: u32,
    width: u32,
) -> Result<(LabelImage, Vec<BinaryMask>), DatasetError> {
    instance_to_semantic_n(instances, catalog.n_class(), height, width)
}

/// As [`instance_to_semantic`] but taking the class count directly, for
/// callers that carry labels without a catalog.
pub(crate) fn instance_to_semantic_n(
    instances: &[InstanceLabels],
    n_class: usize,
    height: u32,
    width: u32,
) -> Result<(LabelImage, Vec<BinaryMask>), DatasetError> {
    let mut semantic_visible = LabelImage::zeros(height, width);
    let mut owner: Vec<Option<u32>> = vec![None; height as usize * width as usize];
    for inst in instances {
        if inst.class_id == 0 || inst.class_id >= n_class {
            return Err(DatasetError::ClassIdOutOfRange(inst.class_id, n_class));
        }
        for (idx, on) in inst.visible.to_pixels().into_iter().enumerate() {
            if on {
                if let Some(prev) = owner[idx] {
                    return Err(DatasetError::VisibleOverlap(prev, inst.id));
                }
                owner[idx] = Some(inst.id);
                let row = idx as u32 / width;
                let col = idx as u32 % width;
                semantic_visible.set(row, col, inst.class_id as u32);
            }
        }
    }

    let mut semantic_occluded = Vec::with_capacity(n_class - 1);
    for class_id in 1..n_class {
        let mut channel = BinaryMask::empty(height, width)?;
        for inst in instances.iter().filter(|i| i.class_id == class_id) {
            channel = channel.union(&inst.occluded)?;
        }
        semantic_occluded.push(channel);
    }
    Ok((semantic_visible, semantic_occluded))
}

/// A complete annotated dataset: catalog, canvas size, and videos.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub catalog: ClassCatalog,
    pub height: u32,
    pub width: u32,
    pub videos: Vec<VideoAnnotation>,
}

impl Dataset {
    pub fn validate(&self) -> Result<(), DatasetError> {
        for video in &self.videos {
            video.validate(self.catalog.n_class())?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    #[serde(default = "default_version")]
    format_version: u32,
    classes: Vec<String>,
    height: u32,
    width: u32,
    videos: Vec<VideoFile>,
}

#[derive(Serialize, Deserialize)]
struct VideoFile {
    frame_count: usize,
    instances: Vec<InstanceFile>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    id: u32,
    class: String,
    polygon: Vec<[f64; 2]>,
    pick_frame: usize,
}

impl Dataset {
    pub fn to_json(&self) -> Result<String, DatasetError> {
        let file = DatasetFile {
            format_version: FORMAT_VERSION,
            classes: self.catalog.names().to_vec(),
            height: self.height,
            width: self.width,
            videos: self
                .videos
                .iter()
                .map(|v| VideoFile {
                    frame_count: v.frame_count,
                    instances: v
                        .instances
                        .iter()
                        .map(|i| InstanceFile {
                            id: i.id,
                            class: self
                                .catalog
                                .name_of(i.class_id)
                                .unwrap_or("background")
                                .to_string(),
                            polygon: i.polygon.vertices().iter().map(|&(x, y)| [x, y]).collect(),
                            pick_frame: i.pick_frame,
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(json: &str) -> Result<Self, DatasetError> {
        let file: DatasetFile = serde_json::from_str(json)?;
        if file.format_version != FORMAT_VERSION {
            return Err(DatasetError::UnsupportedVersion(file.format_version));
        }
        let catalog = ClassCatalog::new(file.classes)?;
        let videos = file
            .videos
            .into_iter()
            .map(|v| {
                let instances = v
                    .instances
                    .into_iter()
                    .map(|i| {
                        let class_id = catalog
                            .id_of(&i.class)
                            .ok_or_else(|| DatasetError::UnknownClass(i.class.clone()))?;
                        Ok(InstanceAnnotation {
                            id: i.id,
                            class_id,
                            polygon: Polygon::new(
                                i.polygon.iter().map(|&[x, y]| (x, y)).collect(),
                            )?,
                            pick_frame: i.pick_frame,
                        })
                    })
                    .collect::<Result<Vec<_>, DatasetError>>()?;
                Ok(VideoAnnotation {
                    frame_count: v.frame_count,
                    instances,
                })
            })
            .collect::<Result<Vec<_>, DatasetError>>()?;
        let dataset = Dataset {
            catalog,
            height: file.height,
            width: file.width,
            videos,
        };
        dataset.validate()?;
        Ok(dataset)
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let json = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Dataset::from_json(&json)
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), DatasetError> {
    let json = dataset.to_json()?;
    fs::write(path, json).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Frame label serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FrameLabelsFile {
    #[serde(default = "default_version")]
    format_version: u32,
    frame: usize,
    classes: Vec<String>,
    instances: Vec<InstanceLabelsFile>,
    semantic_visible: Vec<Vec<u32>>,
    semantic_occluded: Vec<BinaryMask>,
}

#[derive(Serialize, Deserialize)]
struct InstanceLabelsFile {
    id: u32,
    class: usize,
    whole: BinaryMask,
    visible: BinaryMask,
    occluded: BinaryMask,
}

impl FrameLabels {
    pub fn to_json(&self, catalog: &ClassCatalog) -> Result<String, DatasetError> {
        let width = self.semantic_visible.width() as usize;
        let file = FrameLabelsFile {
            format_version: FORMAT_VERSION,
            frame: self.frame,
            classes: catalog.names().to_vec(),
            instances: self
                .instances
                .iter()
                .map(|i| InstanceLabelsFile {
                    id: i.id,
                    class: i.class_id,
                    whole: i.whole.clone(),
                    visible: i.visible.clone(),
                    occluded: i.occluded.clone(),
                })
                .collect(),
            semantic_visible: self
                .semantic_visible
                .labels()
                .chunks(width)
                .map(|row| row.to_vec())
                .collect(),
            semantic_occluded: self.semantic_occluded.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses a frame-labels file, returning the labels and the embedded
    /// class catalog.
    pub fn from_json(json: &str) -> Result<(Self, ClassCatalog), DatasetError> {
        let file: FrameLabelsFile = serde_json::from_str(json)?;
        if file.format_version != FORMAT_VERSION {
            return Err(DatasetError::UnsupportedVersion(file.format_version));
        }
        let catalog = ClassCatalog::new(file.classes)?;
        let height = file.semantic_visible.len() as u32;
        let width = file.semantic_visible.first().map_or(0, Vec::len) as u32;
        let semantic_visible = LabelImage::new(
            height,
            width,
            file.semantic_visible.into_iter().flatten().collect(),
        )?;
        let instances = file
            .instances
            .into_iter()
            .map(|i| {
                if i.class == 0 || i.class >= catalog.n_class() {
                    return Err(DatasetError::ClassIdOutOfRange(i.class, catalog.n_class()));
                }
                Ok(InstanceLabels {
                    id: i.id,
                    class_id: i.class,
                    whole: i.whole,
                    visible: i.visible,
                    occluded: i.occluded,
                })
            })
            .collect::<Result<Vec<_>, DatasetError>>()?;
        Ok((
            FrameLabels {
                frame: file.frame,
                instances,
                semantic_visible,
                semantic_occluded: file.semantic_occluded,
            },
            catalog,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_poly(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)]).unwrap()
    }

    /// Canvas 12x12; rect A covers cols 1..9 rows 4..10, rect B covers
    /// cols 4..11 rows 1..7; the overlap is cols 4..9 rows 4..7 (15 px).
    /// B is picked at frame 1 (on top), A at frame 2.
    pub(crate) fn two_rectangle_video() -> (Dataset, VideoAnnotation) {
        let catalog = ClassCatalog::new(vec!["book".into(), "tray".into()]).unwrap();
        let video = VideoAnnotation {
            frame_count: 3,
            instances: vec![
                InstanceAnnotation {
                    id: 1,
                    class_id: 1,
                    polygon: rect_poly(1.0, 4.0, 9.0, 10.0),
                    pick_frame: 2,
                },
                InstanceAnnotation {
                    id: 2,
                    class_id: 2,
                    polygon: rect_poly(4.0, 1.0, 11.0, 7.0),
                    pick_frame: 1,
                },
            ],
        };
        let dataset = Dataset {
            catalog,
            height: 12,
            width: 12,
            videos: vec![video.clone()],
        };
        (dataset, video)
    }

    #[test]
    fn two_rectangles_frame0() {
        let (dataset, video) = two_rectangle_video();
        let frames = backproject(&video, &dataset.catalog, 12, 12).unwrap();
        assert_eq!(frames.len(), 3);

        let f0 = &frames[0];
        assert_eq!(f0.instances.len(), 2);
        let a = f0.instances.iter().find(|i| i.id == 1).unwrap();
        let b = f0.instances.iter().find(|i| i.id == 2).unwrap();

        let rect_a = rect_poly(1.0, 4.0, 9.0, 10.0).rasterize(12, 12).unwrap().mask;
        let rect_b = rect_poly(4.0, 1.0, 11.0, 7.0).rasterize(12, 12).unwrap().mask;
        assert_eq!(a.occluded, rect_a.intersect(&rect_b).unwrap());
        assert_eq!(a.visible, rect_a.subtract(&rect_b).unwrap());
        assert_eq!(b.visible, rect_b);
        assert!(b.occluded.is_empty());
        assert_eq!(a.occluded.area(), 15);
    }

    #[test]
    fn two_rectangles_after_removal() {
        let (dataset, video) = two_rectangle_video();
        let frames = backproject(&video, &dataset.catalog, 12, 12).unwrap();
        let f2 = &frames[2];
        assert_eq!(f2.instances.len(), 1);
        let a = &f2.instances[0];
        assert_eq!(a.id, 1);
        assert_eq!(a.visible, a.whole);
        assert!(a.occluded.is_empty());
    }

    #[test]
    fn single_instance_fully_visible() {
        let catalog = ClassCatalog::new(vec!["box".into()]).unwrap();
        let video = VideoAnnotation {
            frame_count: 2,
            instances: vec![InstanceAnnotation {
                id: 7,
                class_id: 1,
                polygon: rect_poly(2.0, 2.0, 6.0, 6.0),
                pick_frame: 1,
            }],
        };
        let frames = backproject(&video, &catalog, 8, 8).unwrap();
        for frame in &frames {
            let inst = &frame.instances[0];
            assert_eq!(inst.visible, inst.whole);
            assert!(inst.occluded.is_empty());
        }
    }

    #[test]
    fn duplicate_pick_frame_rejected() {
        let catalog = ClassCatalog::new(vec!["box".into()]).unwrap();
        let video = VideoAnnotation {
            frame_count: 2,
            instances: vec![
                InstanceAnnotation {
                    id: 1,
                    class_id: 1,
                    polygon: rect_poly(0.0, 0.0, 2.0, 2.0),
                    pick_frame: 1,
                },
                InstanceAnnotation {
                    id: 2,
                    class_id: 1,
                    polygon: rect_poly(3.0, 3.0, 5.0, 5.0),
                    pick_frame: 1,
                },
            ],
        };
        assert!(matches!(
            backproject(&video, &catalog, 8, 8),
            Err(DatasetError::DuplicatePickFrame(1, 2, 1))
        ));
    }

    #[test]
    fn semantic_empty_frame() {
        let catalog = ClassCatalog::new(vec!["a".into(), "b".into()]).unwrap();
        let (vis, occ) = instance_to_semantic(&[], &catalog, 6, 6).unwrap();
        assert!(vis.labels().iter().all(|&l| l == 0));
        assert_eq!(occ.len(), 2);
        assert!(occ.iter().all(BinaryMask::is_empty));
    }

    #[test]
    fn semantic_single_visible_instance() {
        let catalog =
            ClassCatalog::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let whole = rect_poly(1.0, 1.0, 4.0, 4.0).rasterize(6, 6).unwrap().mask;
        let inst = InstanceLabels {
            id: 1,
            class_id: 3,
            whole: whole.clone(),
            visible: whole.clone(),
            occluded: BinaryMask::empty(6, 6).unwrap(),
        };
        let (vis, occ) = instance_to_semantic(&[inst], &catalog, 6, 6).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let expected = if whole.contains(r, c) { 3 } else { 0 };
                assert_eq!(vis.get(r, c), expected);
            }
        }
        assert!(occ[2].is_empty());
    }

    #[test]
    fn semantic_preserves_overlapping_occlusions() {
        // instances of two different classes occluded in an overlapping region
        let catalog = ClassCatalog::new(vec!["socks".into(), "jokes".into()]).unwrap();
        let overlap = rect_poly(2.0, 2.0, 5.0, 5.0).rasterize(8, 8).unwrap().mask;
        let mk = |class_id, id| InstanceLabels {
            id,
            class_id,
            whole: overlap.clone(),
            visible: BinaryMask::empty(8, 8).unwrap(),
            occluded: overlap.clone(),
        };
        let (_, occ) =
            instance_to_semantic(&[mk(1, 1), mk(2, 2)], &catalog, 8, 8).unwrap();
        assert_eq!(occ[0].intersection_area(&occ[1]).unwrap(), overlap.area());
    }

    #[test]
    fn semantic_rejects_overlapping_visible() {
        let catalog = ClassCatalog::new(vec!["a".into()]).unwrap();
        let m = rect_poly(1.0, 1.0, 4.0, 4.0).rasterize(6, 6).unwrap().mask;
        let mk = |id| InstanceLabels {
            id,
            class_id: 1,
            whole: m.clone(),
            visible: m.clone(),
            occluded: BinaryMask::empty(6, 6).unwrap(),
        };
        assert!(matches!(
            instance_to_semantic(&[mk(1), mk(2)], &catalog, 6, 6),
            Err(DatasetError::VisibleOverlap(1, 2))
        ));
    }

    #[test]
    fn dataset_json_roundtrip() {
        let (dataset, _) = two_rectangle_video();
        let json = dataset.to_json().unwrap();
        let back = Dataset::from_json(&json).unwrap();
        assert_eq!(back.catalog, dataset.catalog);
        assert_eq!(back.height, dataset.height);
        assert_eq!(back.videos.len(), 1);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn missing_field_is_schema_error() {
        let json = r#"{
            "classes": ["a"], "height": 4, "width": 4,
            "videos": [{"frame_count": 1, "instances": [
                {"id": 1, "class": "a", "polygon": [[0,0],[2,0],[2,2]]}
            ]}]
        }"#;
        let err = Dataset::from_json(json).unwrap_err();
        let chain = format!("{err:?}");
        assert!(
            chain.contains("pick_frame"),
            "error should name the missing field: {chain}"
        );
    }

    #[test]
    fn unknown_class_is_rejected() {
        let json = r#"{
            "classes": ["a"], "height": 4, "width": 4,
            "videos": [{"frame_count": 1, "instances": [
                {"id": 1, "class": "zzz", "polygon": [[0,0],[2,0],[2,2]], "pick_frame": 0}
            ]}]
        }"#;
        assert!(matches!(
            Dataset::from_json(json),
            Err(DatasetError::UnknownClass(name)) if name == "zzz"
        ));
    }

    #[test]
    fn frame_labels_json_roundtrip() {
        let (dataset, video) = two_rectangle_video();
        let frames = backproject(&video, &dataset.catalog, 12, 12).unwrap();
        let json = frames[0].to_json(&dataset.catalog).unwrap();
        let (back, catalog) = FrameLabels::from_json(&json).unwrap();
        assert_eq!(catalog, dataset.catalog);
        assert_eq!(back, frames[0]);
    }

    #[test]
    fn static_scene_frames_are_identical() {
        // frames 0 and 1 have the same present set (B removed only after 1)
        let (dataset, video) = two_rectangle_video();
        let frames = backproject(&video, &dataset.catalog, 12, 12).unwrap();
        assert_eq!(frames[0].instances, frames[1].instances);
        assert_eq!(frames[0].semantic_visible, frames[1].semantic_visible);
    }
}
