//! JSON serialization of embeddings.
//!
//! The canonical form is `serde_json` pretty output of the schema below;
//! parsing it and re-emitting reproduces the bytes exactly.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Domain, Perm};
use crate::wreath::{wreath_imprimitive, wreath_product_action, Tower, TowerElement, WreathKind};

use super::{EmbeddingReport, PEmbedding};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub degree: usize,
    pub generators: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
    /// Exact order, decimal.
    pub order: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TowerJson {
    Flat {
        group: GroupJson,
    },
    Wreath {
        action: String,
        bottom: GroupJson,
        top: Box<TowerJson>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum ElementJson {
    Perm {
        images: Vec<usize>,
    },
    Wreath {
        base: Vec<Vec<usize>>,
        top: Box<ElementJson>,
    },
}

/// Serialized embedding: source and target descriptions, the degree, the
/// generator images, the point-to-subset table as sorted target indices,
/// and optionally the verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub source: GroupJson,
    pub target: TowerJson,
    pub degree: u64,
    pub iota: Vec<ElementJson>,
    pub gamma: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<EmbeddingReport>,
}

pub fn group_to_json(g: &PermGroup) -> GroupJson {
    GroupJson {
        degree: g.degree(),
        generators: g.generators().iter().map(|p| p.to_cycle_string()).collect(),
        labels: g.domain().labels().map(|ls| ls.to_vec()),
        order: g.order().to_string(),
    }
}

pub fn group_from_json(j: &GroupJson) -> Result<PermGroup> {
    let domain = match &j.labels {
        Some(ls) => Domain::with_labels(ls.clone())?,
        None => Domain::plain(j.degree),
    };
    let gens = j
        .generators
        .iter()
        .map(|s| Perm::parse(s, j.degree))
        .collect::<Result<Vec<_>>>()?;
    let order: BigUint = j
        .order
        .parse()
        .map_err(|_| Error::Parse(format!("bad order `{}`", j.order)))?;
    PermGroup::with_known_order(domain, gens, order)
}

pub fn tower_to_json(t: &Tower) -> TowerJson {
    match t {
        Tower::Leaf(g) => TowerJson::Flat {
            group: group_to_json(g),
        },
        Tower::Node(w) => TowerJson::Wreath {
            action: w.kind().short().to_string(),
            bottom: group_to_json(w.bottom()),
            top: Box::new(tower_to_json(w.top())),
        },
    }
}

pub fn tower_from_json(j: &TowerJson) -> Result<Tower> {
    match j {
        TowerJson::Flat { group } => Ok(Tower::Leaf(group_from_json(group)?)),
        TowerJson::Wreath {
            action,
            bottom,
            top,
        } => {
            let bottom = group_from_json(bottom)?;
            let top = tower_from_json(top)?;
            let node = match WreathKind::parse(action)? {
                WreathKind::Imprimitive => wreath_imprimitive(bottom, top)?,
                WreathKind::ProductAction => wreath_product_action(bottom, top)?,
            };
            Ok(Tower::Node(Box::new(node)))
        }
    }
}

pub fn element_to_json(el: &TowerElement) -> ElementJson {
    match el {
        TowerElement::Perm(p) => ElementJson::Perm {
            images: p.images().to_vec(),
        },
        TowerElement::Wreath { base, top } => ElementJson::Wreath {
            base: base.iter().map(|p| p.images().to_vec()).collect(),
            top: Box::new(element_to_json(top)),
        },
    }
}

pub fn element_from_json(j: &ElementJson) -> Result<TowerElement> {
    match j {
        ElementJson::Perm { images } => Ok(TowerElement::Perm(Perm::from_images(images.clone())?)),
        ElementJson::Wreath { base, top } => {
            let base = base
                .iter()
                .map(|im| Perm::from_images(im.clone()))
                .collect::<Result<Vec<_>>>()?;
            Ok(TowerElement::wreath(base, element_from_json(top)?))
        }
    }
}

/// Serialize an embedding. The gamma table is emitted as target point
/// indices, so the target domain must be index-addressable.
pub fn embedding_to_json(e: &PEmbedding, report: Option<EmbeddingReport>) -> Result<EmbeddingJson> {
    let mut gamma = Vec::with_capacity(e.gamma.len());
    for set in &e.gamma {
        let mut idx = set
            .iter()
            .map(|p| e.target.point_index(p))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        gamma.push(idx);
    }
    Ok(EmbeddingJson {
        source: group_to_json(&e.source),
        target: tower_to_json(&e.target),
        degree: e.degree,
        iota: e.iota_gens.iter().map(element_to_json).collect(),
        gamma,
        report,
    })
}

/// Rebuild an embedding from its serialized form. The source tower is the
/// flat source; structural source information is not part of the wire
/// format.
pub fn embedding_from_json(j: &EmbeddingJson) -> Result<PEmbedding> {
    let source = group_from_json(&j.source)?;
    let target = tower_from_json(&j.target)?;
    let iota_gens = j
        .iota
        .iter()
        .map(element_from_json)
        .collect::<Result<Vec<_>>>()?;
    let gamma = j
        .gamma
        .iter()
        .map(|set| {
            let mut pts = set
                .iter()
                .map(|&i| target.point_from_index(i))
                .collect::<Result<Vec<_>>>()?;
            pts.sort();
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PEmbedding {
        source: source.clone(),
        source_tower: Tower::Leaf(source),
        target,
        degree: j.degree,
        iota_gens,
        gamma,
    })
}

/// The canonical textual form.
pub fn embedding_to_string(j: &EmbeddingJson) -> String {
    serde_json::to_string_pretty(j).expect("schema serializes")
}
