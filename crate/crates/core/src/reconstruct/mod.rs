//! The inverse problem: from a frequency table alone, recover the Albanese
//! torus, complexity, block structure, planarity, a dual and, for planar
//! 3-connected graphs, the metric graph itself.

mod blocks;
mod cycles;
mod gram;
mod planar;

use std::fmt;
use std::sync::Arc;

pub use blocks::{block_distances, block_partition, block_structure, tree_from_leaves, BlockStructure, LeafTree};
pub use cycles::{
    cycle_candidates, cycle_generator_sets, decompositions, generator_cap, is_cycle_class, is_cycle_frequency,
    non_positive_basis, prepare_table, Decomposition,
};
pub use gram::{albanese_gram, complexity, positive_overlap, AlbaneseGram, Complexity};
pub use planar::{
    build_dual, cycle_decomposition, dual_to_primal, recover_edge_lengths, shared_edge_count, DualGraph, Primal,
};

use crate::error::{Error, Result};
use crate::frequency::{split_components, FrequencyTable};
use crate::graph::{find_isomorphism, max_length_error, BlockTree, MetricGraph};
use crate::homology::{HomologyClass, LengthTable};
use crate::io::serialize_graph;
use crate::real::Real;
use crate::spectrum::{zero_multiplicity, FluxForm};
use crate::trace::FluxRay;

#[derive(Clone, Debug)]
pub struct Planarity {
    pub planar: bool,
    /// Oriented face cycles without pairwise positive overlap.
    pub witness: Option<Vec<HomologyClass>>,
}

/// Everything recovered from one connected table.
#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub rank: usize,
    /// Length cap used by the generator searches.
    pub cap: Real,
    pub generators: Vec<HomologyClass>,
    pub gram: AlbaneseGram,
    pub complexity: Complexity,
    pub blocks: BlockStructure,
    pub planarity: Planarity,
    /// One dual per block, when planar.
    pub duals: Vec<DualGraph>,
    pub primal: Option<Primal>,
    pub reconstructed: Option<MetricGraph>,
    /// One line per stage.
    pub stages: Vec<String>,
}

impl ReconstructionReport {
    pub fn block_tree(&self) -> &BlockTree {
        &self.blocks.tree
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

/// Runs the inverse pipeline on the table of a connected graph.
pub fn full_pipeline(table: &FrequencyTable) -> Result<ReconstructionReport> {
    let mut stages = Vec::new();
    let (t, cap) = stage("generators", prepare_table(table))?;
    let generators = stage("generators", cycle_generator_sets(&t, &cap, 1))?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Inconsistent("no basis of cycles below the cap".into()).at_stage("generators"))?;
    stages.push(format!("generators: {} cycles below length {}", generators.len(), cap));
    let gram = stage("albanese", albanese_gram(&t, &generators))?;
    let complexity = complexity(&gram);
    stages.push(format!("albanese: det {}", complexity.determinant));
    let blocks = stage("blocks", block_structure(&t, &generators))?;
    stages.push(format!("blocks: {} with dimensions {:?}", blocks.blocks.len(), blocks.tree.block_dims()));
    let witness = stage("planarity", non_positive_basis(&t, &cap))?;
    let planarity = Planarity { planar: witness.is_some(), witness };
    stages.push(format!("planarity: {}", if planarity.planar { "planar" } else { "nonplanar" }));
    let mut duals = Vec::new();
    let mut primal = None;
    let mut reconstructed = None;
    if let Some(w) = &planarity.witness {
        let parts = stage("dual", block_partition(&t, w))?;
        for part in &parts {
            let faces: Vec<HomologyClass> = part.iter().map(|&i| w[i].clone()).collect();
            duals.push(stage("dual", build_dual(&t, &faces, None))?);
        }
        stages.push(format!("dual: {} block dual(s), {} edges", duals.len(), duals.iter().map(DualGraph::edge_count).sum::<usize>()));
        if duals.len() == 1 && duals[0].caveat.is_none() {
            let p = stage("primal", dual_to_primal(&duals[0]))?;
            if p.unique {
                let g = stage("lengths", recover_edge_lengths(&t, &p, &duals[0].faces))?;
                stages.push(format!("lengths: {} edges recovered", g.edge_count()));
                reconstructed = Some(g);
            } else {
                stages.push("primal: not 3-connected, determined up to 2-isomorphism".into());
            }
            primal = Some(p);
        } else if duals.len() > 1 {
            stages.push("primal: several blocks, lengths not recovered".into());
        }
    }
    Ok(ReconstructionReport {
        rank: t.rank(),
        cap,
        generators,
        gram,
        complexity,
        blocks,
        planarity,
        duals,
        primal,
        reconstructed,
        stages,
    })
}

impl fmt::Display for ReconstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[HomologyClass]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "length cap: {}", self.cap)?;
        writeln!(f, "generators: {}", list(&self.generators))?;
        writeln!(f, "gram:")?;
        write!(f, "{}", self.gram)?;
        writeln!(
            f,
            "complexity: det {} (fourth root {:.12})",
            self.complexity.determinant, self.complexity.root_volume
        )?;
        writeln!(f, "blocks: {} dims {:?}", self.blocks.blocks.len(), self.blocks.tree.block_dims())?;
        writeln!(f, "inner blocks: {:?}", self.blocks.inner)?;
        writeln!(f, "block tree: {}", self.blocks.tree.canonical_form())?;
        match &self.planarity.witness {
            Some(w) => writeln!(f, "planar: yes, faces {}", list(w))?,
            None => writeln!(f, "planar: no")?,
        }
        for (i, d) in self.duals.iter().enumerate() {
            write!(f, "dual {i}: {d}")?;
        }
        if let Some(p) = &self.primal {
            writeln!(
                f,
                "primal: {} vertices, {} edges, unique: {}",
                p.graph.vertex_count(),
                p.graph.edge_count(),
                if p.unique { "yes" } else { "no" }
            )?;
        }
        if let Some(g) = &self.reconstructed {
            writeln!(f, "reconstructed graph:")?;
            write!(f, "{}", serialize_graph(g))?;
        }
        for s in &self.stages {
            writeln!(f, "stage {s}")?;
        }
        Ok(())
    }
}

/// Reconstruction of one component, compared with the original when known.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub report: ReconstructionReport,
    /// Whether the reconstructed graph is isomorphic to some component of
    /// the input, and the largest length error under that isomorphism.
    pub matched: Option<(bool, Option<Real>)>,
}

/// Forward (oracle) tables of a graph, split by component, each run
/// through the inverse pipeline.
#[derive(Clone, Debug)]
pub struct GraphReport {
    pub components: usize,
    pub tree_components: usize,
    pub reports: Vec<ComponentReport>,
}

impl fmt::Display for GraphReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components: {} ({} without cycles)", self.components, self.tree_components)?;
        for (i, c) in self.reports.iter().enumerate() {
            writeln!(f, "== component {i}")?;
            write!(f, "{}", c.report)?;
            match &c.matched {
                Some((true, Some(err))) => writeln!(f, "isomorphic to input: yes, max length error {err}")?,
                Some((true, None)) => writeln!(f, "isomorphic to input: yes")?,
                Some((false, _)) => writeln!(f, "isomorphic to input: no")?,
                None => {}
            }
        }
        Ok(())
    }
}

/// Table of a graph along the square-root-of-primes ray, backed by its
/// length oracle.
pub fn oracle_table(g: &MetricGraph) -> Result<FrequencyTable> {
    let lt = Arc::new(LengthTable::new(g.clone()));
    let ray = FluxRay::sqrt_primes(lt.rank());
    let start = g.edges().iter().map(|e| e.length.clone()).fold(Real::zero(), Real::max).scale(3);
    FrequencyTable::from_oracle(lt, &ray, &start)
}

/// Forward then inverse: the oracle table of `g`, split into components
/// by the zero multiplicity of the Laplacian, each reconstructed and
/// checked against the components of `g`.
pub fn reconstruct_graph(g: &MetricGraph) -> Result<GraphReport> {
    let zm = zero_multiplicity(g, &FluxForm::zero(g));
    let table = stage("forward", oracle_table(g))?;
    let split = stage("components", split_components(&table, zm))?;
    let originals: Vec<MetricGraph> = g.split_components().into_iter().map(|(c, _, _)| c).collect();
    // exact inputs must agree exactly; the combinatorial match only reports the error
    let tol = if g.is_exact() { 0.0 } else { 1e-9 };
    let mut reports = Vec::new();
    for t in &split.tables {
        let report = full_pipeline(t)?;
        let matched = report.reconstructed.as_ref().map(|rec| {
            originals
                .iter()
                .find_map(|o| {
                    find_isomorphism(o, rec, Some(tol))
                        .or_else(|| find_isomorphism(o, rec, None))
                        .map(|iso| (true, Some(max_length_error(o, rec, &iso))))
                })
                .unwrap_or((false, None))
        });
        reports.push(ComponentReport { report, matched });
    }
    Ok(GraphReport { components: zm, tree_components: split.tree_components, reports })
}
