//! Exact 1D route: compile a sub-action-free one-dimensional term to a
//! labeled graph whose path language is the term's true language.

use crate::error::{Error, Result};
use crate::onedim::{
    graph_factor, graph_product, intersect, sft_to_graph, trim, LabeledGraph,
};
use crate::tileset::TileSet;

use super::{SubshiftTerm, TermNode};

/// Labeled-graph presentation of a 1D term. Errors on terms of higher
/// dimension and on sub-action or superposition nodes (which change the
/// dimension away from the graph machinery).
pub fn term_graph(t: &SubshiftTerm) -> Result<LabeledGraph> {
    if t.dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "exact graph route requires dimension 1, term has {}",
            t.dim()
        )));
    }
    build(t)
}

fn build(t: &SubshiftTerm) -> Result<LabeledGraph> {
    match t.node() {
        TermNode::FullShift => Ok(LabeledGraph::full_shift(t.alphabet().clone())),
        TermNode::Sft(ts) => sft_to_graph(ts),
        TermNode::FiniteType(extra, inner) => {
            let g = build(inner)?;
            let constraint = sft_to_graph(&TileSet::new(
                "finite-type",
                t.alphabet().clone(),
                1,
                extra.as_ref().clone(),
            )?)?;
            intersect(&g, &constraint)
        }
        TermNode::Product(a, b) => {
            let ga = build(a)?;
            let gb = build(b)?;
            let p = graph_product(&ga, &gb);
            // graph_product builds its own product alphabet with the same
            // token layout as the term alphabet.
            debug_assert_eq!(p.alphabet().tokens(), t.alphabet().tokens());
            LabeledGraph::new(
                t.alphabet().clone(),
                p.vertices().to_vec(),
                p.edges().to_vec(),
            )
            .map(|g| trim(&g))
        }
        TermNode::Factor(code, inner) => {
            let g = build(inner)?;
            let offsets: Vec<i64> = code.neighborhood().iter().map(|p| p.0[0]).collect();
            graph_factor(&g, &offsets, code.target().clone(), &|args| {
                code.apply(args)
            })
        }
        TermNode::SubAction(_, _) => Err(Error::Unsupported(
            "exact graph route does not cover sub-action".into(),
        )),
        TermNode::Superposition(_, _, _) => Err(Error::Unsupported(
            "exact graph route does not cover superposition".into(),
        )),
    }
}
