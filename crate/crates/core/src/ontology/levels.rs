use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::error::OntologyError;
use super::tbox::TBox;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaxonomyLevel {
    pub concept: String,
    pub level: usize,
}

/// Level of every concept: the length of the longest chain of declared
/// named parents up to a root. Roots have level 0.
///
/// `A SubClassOf A` is a tautology and ignored; any other cycle is an error.
pub fn compute_levels(tbox: &TBox) -> Result<Vec<TaxonomyLevel>, OntologyError> {
    let parents = tbox.named_parents();
    let mut levels: BTreeMap<&str, usize> = BTreeMap::new();
    // 0 = unvisited, 1 = on the current path, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();

    for &start in parents.keys() {
        if state.get(start).copied().unwrap_or(0) == 2 {
            continue;
        }
        // iterative DFS; the frame holds the concept and its pending parents
        let mut path: Vec<&str> = vec![start];
        let mut stack: Vec<(&str, Vec<&str>)> =
            vec![(start, parents[start].iter().copied().collect())];
        state.insert(start, 1);
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            if let Some(parent) = top.1.pop() {
                match state.get(parent).copied().unwrap_or(0) {
                    0 => {
                        state.insert(parent, 1);
                        path.push(parent);
                        stack.push((parent, parents[parent].iter().copied().collect()));
                    }
                    1 => {
                        let from = path.iter().position(|&p| p == parent).unwrap();
                        let mut cycle: Vec<String> =
                            path[from..].iter().map(|s| s.to_string()).collect();
                        cycle.push(parent.to_string());
                        return Err(OntologyError::CycleDetected { concepts: cycle });
                    }
                    _ => {}
                }
            } else {
                let level = parents[node]
                    .iter()
                    .map(|p| levels[p] + 1)
                    .max()
                    .unwrap_or(0);
                levels.insert(node, level);
                state.insert(node, 2);
                stack.pop();
                path.pop();
            }
        }
    }

    Ok(levels
        .into_iter()
        .map(|(concept, level)| TaxonomyLevel {
            concept: concept.to_string(),
            level,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaxonomyNode {
    pub concept: String,
    pub level: usize,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub capability: bool,
    pub children: Vec<TaxonomyNode>,
}

/// The declared hierarchy below `root`. A concept with several parents is
/// listed under each of them.
pub fn taxonomy_tree(tbox: &TBox, root: &str) -> Result<TaxonomyNode, OntologyError> {
    if !tbox.has_concept(root) {
        return Err(OntologyError::undeclared(root));
    }
    let levels: BTreeMap<String, usize> = compute_levels(tbox)?
        .into_iter()
        .map(|l| (l.concept, l.level))
        .collect();
    let mut children: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (child, ps) in tbox.named_parents() {
        for p in ps {
            children.entry(p).or_default().insert(child);
        }
    }

    fn build(
        name: &str,
        tbox: &TBox,
        levels: &BTreeMap<String, usize>,
        children: &BTreeMap<&str, BTreeSet<&str>>,
    ) -> TaxonomyNode {
        TaxonomyNode {
            concept: name.to_string(),
            level: levels[name],
            capability: tbox.is_capability(name),
            children: children
                .get(name)
                .into_iter()
                .flatten()
                .map(|c| build(c, tbox, levels, children))
                .collect(),
        }
    }

    Ok(build(root, tbox, &levels, &children))
}
