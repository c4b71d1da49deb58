//! Parallel-sets algebra over the two modality partitions: the contingency
//! table, the block/ribbon model, user selections and their survival
//! comparison.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cluster::Partition;
use crate::error::{Error, Result};
use crate::ingest::ClinicalTable;
use crate::survival::{km_curve, logrank, shared_ids, LogRankResult, SurvivalCurve};

/// Which of the two partitions (columns of the parallel-sets display).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "a",
            Side::B => "b",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Side::A),
            "b" | "B" => Ok(Side::B),
            other => Err(Error::Domain(format!("unknown modality side `{other}`"))),
        }
    }
}

const PALETTE_A: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];
const PALETTE_B: [&str; 8] = [
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3", "#a6d854", "#ffd92f", "#e5c494", "#b3b3b3",
];

/// Fixed colour for a cluster; shared by every view that shows it.
pub fn cluster_color(side: Side, cluster: usize) -> &'static str {
    match side {
        Side::A => PALETTE_A[cluster % PALETTE_A.len()],
        Side::B => PALETTE_B[cluster % PALETTE_B.len()],
    }
}

pub fn color_key(side: Side, cluster: usize) -> String {
    format!("{side}:{cluster}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub modality_a: String,
    pub modality_b: String,
    pub sample_ids: Vec<String>,
    pub k_a: usize,
    pub k_b: usize,
    /// `counts[a][b]` = patients in cluster a of A and cluster b of B.
    pub counts: Vec<Vec<usize>>,
    /// Sample indices per cell, in sample order.
    pub cells: Vec<Vec<Vec<usize>>>,
}

impl ContingencyTable {
    pub fn n(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.k_b)
            .map(|b| self.counts.iter().map(|r| r[b]).sum())
            .collect()
    }

    pub fn cell_ids(&self, a: usize, b: usize) -> Vec<String> {
        self.cells[a][b]
            .iter()
            .map(|&i| self.sample_ids[i].clone())
            .collect()
    }
}

pub fn cross_tab(pa: &Partition, pb: &Partition) -> Result<ContingencyTable> {
    if pa.sample_ids != pb.sample_ids {
        return Err(Error::SampleMismatch);
    }
    let mut counts = vec![vec![0; pb.k]; pa.k];
    let mut cells = vec![vec![Vec::new(); pb.k]; pa.k];
    for (i, (&a, &b)) in pa.labels.iter().zip(&pb.labels).enumerate() {
        counts[a][b] += 1;
        cells[a][b].push(i);
    }
    Ok(ContingencyTable {
        modality_a: pa.modality_name.clone(),
        modality_b: pb.modality_name.clone(),
        sample_ids: pa.sample_ids.clone(),
        k_a: pa.k,
        k_b: pb.k,
        counts,
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsBlock {
    pub cluster: usize,
    pub size: usize,
    pub color_key: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsRibbon {
    pub a: usize,
    pub b: usize,
    pub size: usize,
}

/// Geometry-free parallel-sets model. Blocks in each column are ordered by
/// descending size (ties by cluster index); ribbons follow the block order
/// of their endpoints; empty cells have no ribbon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelSetsModel {
    pub modality_a: String,
    pub modality_b: String,
    pub n: usize,
    pub blocks_a: Vec<PsBlock>,
    pub blocks_b: Vec<PsBlock>,
    pub ribbons: Vec<PsRibbon>,
}

fn ordered_blocks(side: Side, sizes: &[usize]) -> Vec<PsBlock> {
    let mut idx: Vec<usize> = (0..sizes.len()).collect();
    idx.sort_by(|&x, &y| sizes[y].cmp(&sizes[x]).then(x.cmp(&y)));
    idx.into_iter()
        .map(|c| PsBlock {
            cluster: c,
            size: sizes[c],
            color_key: color_key(side, c),
            color: cluster_color(side, c).to_string(),
        })
        .collect()
}

pub fn build_parallel_sets(t: &ContingencyTable) -> ParallelSetsModel {
    let blocks_a = ordered_blocks(Side::A, &t.row_sums());
    let blocks_b = ordered_blocks(Side::B, &t.col_sums());
    let mut ribbons = Vec::new();
    for ba in &blocks_a {
        for bb in &blocks_b {
            let size = t.counts[ba.cluster][bb.cluster];
            if size > 0 {
                ribbons.push(PsRibbon {
                    a: ba.cluster,
                    b: bb.cluster,
                    size,
                });
            }
        }
    }
    ParallelSetsModel {
        modality_a: t.modality_a.clone(),
        modality_b: t.modality_b.clone(),
        n: t.n(),
        blocks_a,
        blocks_b,
        ribbons,
    }
}

/// A clickable region of the parallel-sets display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Atom {
    Block { modality: Side, cluster: usize },
    Ribbon { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSpec {
    pub name: String,
    pub atoms: Vec<Atom>,
}

impl SelectionSpec {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>) -> Self {
        Self {
            name: name.into(),
            atoms,
        }
    }
}

/// Union of the atoms' memberships, as sample indices in ascending order.
pub fn resolve_indices(atoms: &[Atom], t: &ContingencyTable) -> Result<Vec<usize>> {
    let mut set = BTreeSet::new();
    for atom in atoms {
        match *atom {
            Atom::Block { modality: Side::A, cluster } => {
                if cluster >= t.k_a {
                    return Err(Error::AtomOutOfRange(format!("block a:{cluster} (k_a = {})", t.k_a)));
                }
                for cell in &t.cells[cluster] {
                    set.extend(cell.iter().copied());
                }
            }
            Atom::Block { modality: Side::B, cluster } => {
                if cluster >= t.k_b {
                    return Err(Error::AtomOutOfRange(format!("block b:{cluster} (k_b = {})", t.k_b)));
                }
                for row in &t.cells {
                    set.extend(row[cluster].iter().copied());
                }
            }
            Atom::Ribbon { a, b } => {
                if a >= t.k_a || b >= t.k_b {
                    return Err(Error::AtomOutOfRange(format!(
                        "ribbon ({a}, {b}) (k_a = {}, k_b = {})",
                        t.k_a, t.k_b
                    )));
                }
                set.extend(t.cells[a][b].iter().copied());
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Sample ids selected by `atoms`, in cohort order.
pub fn resolve_selection(atoms: &[Atom], t: &ContingencyTable) -> Result<Vec<String>> {
    Ok(resolve_indices(atoms, t)?
        .into_iter()
        .map(|i| t.sample_ids[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub curves: Vec<SurvivalCurve>,
    pub logrank: Option<LogRankResult>,
}

pub fn compare_selections(
    specs: &[SelectionSpec],
    t: &ContingencyTable,
    clinical: &ClinicalTable,
) -> Result<Comparison> {
    let mut groups = Vec::with_capacity(specs.len());
    for spec in specs {
        let ids = resolve_selection(&spec.atoms, t)?;
        if ids.is_empty() {
            return Err(Error::EmptyGroup(spec.name.clone()));
        }
        groups.push((spec.name.clone(), ids));
    }
    if groups.is_empty() {
        return Err(Error::TooFewGroups(0));
    }
    let shared = shared_ids(&groups);
    if !shared.is_empty() {
        return Err(Error::OverlappingGroups(shared));
    }
    let curves = groups
        .iter()
        .map(|(label, ids)| km_curve(label, ids, clinical))
        .collect::<Result<Vec<_>>>()?;
    let logrank = if groups.len() >= 2 {
        Some(logrank(&groups, clinical)?)
    } else {
        None
    };
    Ok(Comparison { curves, logrank })
}
