//! Predicate dependency graph, strongly connected components, strata ranks,
//! and per-component rule partitions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::normalize::{ArgumentId, EstimationRule, Predicate};

/// Directed graph over predicates: an edge `(p, q)` means some rule has `p`
/// in its positive body and `q` in its head.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<Predicate>,
    pub edges: BTreeSet<(Predicate, Predicate)>,
}

/// Builds the dependency graph of a normalized rule set. Falsum heads
/// contribute no nodes or edges beyond their body predicates.
pub fn build_dependency_graph(rules: &[EstimationRule]) -> DependencyGraph {
    let mut graph = DependencyGraph::default();
    for rule in rules {
        let head = rule.head.atom().map(|a| a.key());
        if let Some(h) = &head {
            graph.nodes.insert(h.clone());
        }
        for atom in &rule.positive_body {
            let body = atom.key();
            graph.nodes.insert(body.clone());
            if let Some(h) = &head {
                graph.edges.insert((body, h.clone()));
            }
        }
    }
    graph
}

/// True iff the graph has no directed cycle; a self-loop counts as a cycle.
pub fn is_tight(graph: &DependencyGraph) -> bool {
    let analysis = condense(graph);
    analysis.components.len() == graph.nodes.len()
        && graph.edges.iter().all(|(p, q)| p != q)
}

/// Renders the graph in DOT format, nodes and edges in sorted order.
pub fn dependency_dot(graph: &DependencyGraph) -> String {
    let mut out = String::from("digraph dependencies {\n");
    for node in &graph.nodes {
        out.push_str(&format!("  \"{node}\";\n"));
    }
    for (from, to) in &graph.edges {
        out.push_str(&format!("  \"{from}\" -> \"{to}\";\n"));
    }
    out.push_str("}\n");
    out
}

/// The layering of one component's module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partition {
    /// The module is non-empty but has no exit rule; all estimates for its
    /// arguments are zero.
    NoExitRule,
    /// Groups `M1..Mn` of rule indices; `M1` holds the exit rules and every
    /// later group is enabled by heads of strictly earlier groups. An empty
    /// list means the module has no rules at all.
    Groups(Vec<Vec<usize>>),
}

impl Partition {
    /// Number of groups (zero for an empty module).
    pub fn cardinality(&self) -> usize {
        match self {
            Partition::NoExitRule => 0,
            Partition::Groups(groups) => groups.len(),
        }
    }
}

/// Strongly connected components of the dependency graph in topological
/// order, with the derived orderings the estimator consumes.
#[derive(Debug, Clone)]
pub struct ComponentAnalysis {
    /// Components in topological order (bodies before heads). Ties are broken
    /// by the smallest predicate in the component so the order is stable
    /// under rule permutations.
    pub components: Vec<BTreeSet<Predicate>>,
    pub component_of: BTreeMap<Predicate, usize>,
    /// Condensation edges between component indices.
    pub component_edges: BTreeSet<(usize, usize)>,
    /// 1-based topological position of each predicate's component.
    pub strong_strata_rank: BTreeMap<Predicate, usize>,
    /// Per component: indices into the rule slice of the rules headed in it.
    pub modules: Vec<Vec<usize>>,
    pub partitions: Vec<Partition>,
    pub diagnostics: Vec<String>,
}

impl ComponentAnalysis {
    pub fn component_index(&self, predicate: &Predicate) -> Option<usize> {
        self.component_of.get(predicate).copied()
    }

    /// Cardinality of the partition of the component containing `predicate`.
    pub fn partition_cardinality(&self, predicate: &Predicate) -> usize {
        match self.component_index(predicate) {
            Some(c) => self.partitions[c].cardinality(),
            None => 0,
        }
    }

    /// `M_k^{p[i]}`: the rules of group `k` (1-based) whose head is `p` with
    /// a variable at position `i`.
    pub fn rules_m(&self, rules: &[EstimationRule], arg: &ArgumentId, k: usize) -> Vec<usize> {
        let Some(c) = self.component_index(&arg.predicate) else {
            return Vec::new();
        };
        let Partition::Groups(groups) = &self.partitions[c] else {
            return Vec::new();
        };
        if k == 0 || k > groups.len() {
            return Vec::new();
        }
        groups[k - 1]
            .iter()
            .copied()
            .filter(|&idx| head_has_var_at(&rules[idx], arg))
            .collect()
    }

    /// `M^{p[i]}_{1..k}`: the union of `rules_m` over groups `1..=k`.
    pub fn rules_m_prefix(
        &self,
        rules: &[EstimationRule],
        arg: &ArgumentId,
        k: usize,
    ) -> Vec<usize> {
        (1..=k).flat_map(|j| self.rules_m(rules, arg, j)).collect()
    }

    /// Renders the component graph in DOT format with strata ranks.
    pub fn component_dot(&self) -> String {
        let mut out = String::from("digraph components {\n");
        for (idx, comp) in self.components.iter().enumerate() {
            let members: Vec<String> = comp.iter().map(|p| format!("{p}")).collect();
            out.push_str(&format!(
                "  c{idx} [label=\"rank {} {{{}}}\"];\n",
                idx + 1,
                members.join(", ")
            ));
        }
        for (from, to) in &self.component_edges {
            out.push_str(&format!("  c{from} -> c{to};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn head_has_var_at(rule: &EstimationRule, arg: &ArgumentId) -> bool {
    match rule.head.atom() {
        Some(atom) if atom.key() == arg.predicate => {
            matches!(atom.terms.get(arg.position - 1), Some(crate::normalize::NormTerm::Var(_)))
        }
        _ => false,
    }
}

/// Computes components, ranks, modules, and partitions for a rule set.
pub fn build_component_analysis(
    graph: &DependencyGraph,
    rules: &[EstimationRule],
) -> ComponentAnalysis {
    let mut analysis = condense(graph);

    // Module of a component: all rules whose head predicate lies in it.
    let mut modules: Vec<Vec<usize>> = alloc::vec![Vec::new(); analysis.components.len()];
    for (idx, rule) in rules.iter().enumerate() {
        if let Some(atom) = rule.head.atom() {
            if let Some(&c) = analysis.component_of.get(&atom.key()) {
                modules[c].push(idx);
            }
        }
    }

    let mut partitions = Vec::with_capacity(analysis.components.len());
    for (c, module) in modules.iter().enumerate() {
        partitions.push(build_partition(
            &analysis.components[c],
            module,
            rules,
            &mut analysis.diagnostics,
        ));
    }

    analysis.modules = modules;
    analysis.partitions = partitions;
    analysis
}

/// A rule is recursive in its component if some positive body atom's
/// predicate belongs to the component; otherwise it is an exit rule.
pub fn is_recursive(rule: &EstimationRule, component: &BTreeSet<Predicate>) -> bool {
    rule.positive_body.iter().any(|a| component.contains(&a.key()))
}

fn build_partition(
    component: &BTreeSet<Predicate>,
    module: &[usize],
    rules: &[EstimationRule],
    diagnostics: &mut Vec<String>,
) -> Partition {
    if module.is_empty() {
        return Partition::Groups(Vec::new());
    }
    let exit: Vec<usize> =
        module.iter().copied().filter(|&i| !is_recursive(&rules[i], component)).collect();
    if exit.is_empty() {
        return Partition::NoExitRule;
    }

    // Heads available in groups 1..k-1 and in group k-1 alone drive the
    // placement of recursive rules.
    let mut groups = alloc::vec![exit];
    let mut placed: BTreeSet<usize> = groups[0].iter().copied().collect();
    let mut earlier_heads: BTreeSet<Predicate> =
        groups[0].iter().filter_map(|&i| rules[i].head.atom().map(|a| a.key())).collect();
    let mut last_heads = earlier_heads.clone();

    loop {
        let mut next = Vec::new();
        for &idx in module {
            if placed.contains(&idx) {
                continue;
            }
            let rule = &rules[idx];
            let intra: BTreeSet<Predicate> = rule
                .positive_body
                .iter()
                .map(|a| a.key())
                .filter(|p| component.contains(p))
                .collect();
            let all_available = intra.iter().all(|p| earlier_heads.contains(p));
            let some_fresh = intra.iter().any(|p| last_heads.contains(p));
            if all_available && some_fresh {
                next.push(idx);
            }
        }
        if next.is_empty() {
            break;
        }
        placed.extend(next.iter().copied());
        last_heads =
            next.iter().filter_map(|&i| rules[i].head.atom().map(|a| a.key())).collect();
        earlier_heads.extend(last_heads.iter().cloned());
        groups.push(next);
    }

    // Rules none of whose intra-component body predicates ever become
    // available cannot be placed by the fixpoint; they are appended as one
    // final group so estimation stays total.
    let unplaced: Vec<usize> = module.iter().copied().filter(|i| !placed.contains(i)).collect();
    if !unplaced.is_empty() {
        diagnostics.push(format!(
            "{} rule(s) in a recursive component could not be layered; appended as a final group",
            unplaced.len()
        ));
        groups.push(unplaced);
    }
    Partition::Groups(groups)
}

/// Tarjan's algorithm plus a deterministic topological order of the
/// condensation.
fn condense(graph: &DependencyGraph) -> ComponentAnalysis {
    let nodes: Vec<&Predicate> = graph.nodes.iter().collect();
    let index_of: BTreeMap<&Predicate, usize> =
        nodes.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); nodes.len()];
    for (from, to) in &graph.edges {
        adj[index_of[from]].push(index_of[to]);
    }

    let mut state = TarjanState {
        counter: 0,
        stack: Vec::new(),
        on_stack: alloc::vec![false; nodes.len()],
        index: alloc::vec![None; nodes.len()],
        low: alloc::vec![0; nodes.len()],
        comps: Vec::new(),
    };
    for v in 0..nodes.len() {
        if state.index[v].is_none() {
            strongconnect(v, &adj, &mut state);
        }
    }

    // Condensation over Tarjan's components.
    let mut comp_of_node = alloc::vec![usize::MAX; nodes.len()];
    for (cid, comp) in state.comps.iter().enumerate() {
        for &v in comp {
            comp_of_node[v] = cid;
        }
    }
    let ncomp = state.comps.len();
    let mut comp_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (from, to) in &graph.edges {
        let (cf, ct) = (comp_of_node[index_of[from]], comp_of_node[index_of[to]]);
        if cf != ct {
            comp_edges.insert((cf, ct));
        }
    }

    // Kahn's algorithm with the ready set ordered by each component's
    // smallest predicate: a fixed topological order independent of input
    // rule order.
    let mut indegree = alloc::vec![0usize; ncomp];
    for &(_, to) in &comp_edges {
        indegree[to] += 1;
    }
    let min_pred = |cid: usize| -> &Predicate {
        state.comps[cid].iter().map(|&v| nodes[v]).min().expect("non-empty component")
    };
    let mut ready: BTreeSet<(&Predicate, usize)> = (0..ncomp)
        .filter(|&c| indegree[c] == 0)
        .map(|c| (min_pred(c), c))
        .collect();
    let mut order: Vec<usize> = Vec::with_capacity(ncomp);
    while let Some(&(pred, cid)) = ready.iter().next() {
        ready.remove(&(pred, cid));
        order.push(cid);
        for &(from, to) in &comp_edges {
            if from == cid {
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    ready.insert((min_pred(to), to));
                }
            }
        }
    }
    debug_assert_eq!(order.len(), ncomp, "condensation must be acyclic");

    // Re-index components in topological order.
    let mut new_index = alloc::vec![0usize; ncomp];
    for (pos, &old) in order.iter().enumerate() {
        new_index[old] = pos;
    }
    let mut components: Vec<BTreeSet<Predicate>> = alloc::vec![BTreeSet::new(); ncomp];
    let mut component_of = BTreeMap::new();
    let mut strong_strata_rank = BTreeMap::new();
    for (old, comp) in state.comps.iter().enumerate() {
        let new = new_index[old];
        for &v in comp {
            components[new].insert(nodes[v].clone());
            component_of.insert(nodes[v].clone(), new);
            strong_strata_rank.insert(nodes[v].clone(), new + 1);
        }
    }
    let component_edges =
        comp_edges.into_iter().map(|(f, t)| (new_index[f], new_index[t])).collect();

    ComponentAnalysis {
        components,
        component_of,
        component_edges,
        strong_strata_rank,
        modules: Vec::new(),
        partitions: Vec::new(),
        diagnostics: Vec::new(),
    }
}

struct TarjanState {
    counter: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut TarjanState) {
    state.index[v] = Some(state.counter);
    state.low[v] = state.counter;
    state.counter += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &adj[v] {
        if state.index[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.index[w].unwrap());
        }
    }

    if state.low[v] == state.index[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::Program;
    use alloc::string::ToString;
    use alloc::vec;

    const CHAIN: &str = "p(1). p(2). r(3). q(X,1) :- p(X). r(2). r(4). \
                         s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z).";
    const CYCLIC: &str = "p(1). p(2). r(3). q(X,1) :- p(X). r(2). r(4). \
                          s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z). q(Y,X) :- s(X,Y,Z).";

    fn pred(name: &str, arity: usize) -> Predicate {
        Predicate::new(name, arity)
    }

    #[test]
    fn edges_run_from_body_to_head() {
        let program = Program::parse(CHAIN).unwrap();
        let graph = build_dependency_graph(&program.rules);
        let expected: BTreeSet<(Predicate, Predicate)> = [
            (pred("p", 1), pred("q", 2)),
            (pred("p", 1), pred("s", 3)),
            (pred("q", 2), pred("s", 3)),
            (pred("r", 1), pred("s", 3)),
        ]
        .into_iter()
        .collect();
        assert_eq!(graph.edges, expected);
        assert!(is_tight(&graph));
    }

    #[test]
    fn recursive_extension_breaks_tightness() {
        let program = Program::parse(CYCLIC).unwrap();
        let graph = build_dependency_graph(&program.rules);
        assert!(graph.edges.contains(&(pred("s", 3), pred("q", 2))));
        assert!(!is_tight(&graph));
    }

    #[test]
    fn fact_only_program_has_no_edges() {
        let program = Program::parse("p(1). q(2).").unwrap();
        let graph = build_dependency_graph(&program.rules);
        assert_eq!(graph.nodes.len(), 2);
        assert!(graph.edges.is_empty());
        assert!(is_tight(&graph));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let program = Program::parse("p(1). p(X) :- p(X).").unwrap();
        let graph = build_dependency_graph(&program.rules);
        assert!(!is_tight(&graph));
    }

    #[test]
    fn components_and_ranks() {
        let program = Program::parse(CYCLIC).unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        let comps: Vec<Vec<&str>> = analysis
            .components
            .iter()
            .map(|c| c.iter().map(|p| p.name.as_str()).collect())
            .collect();
        assert_eq!(comps, vec![vec!["p"], vec!["r"], vec!["q", "s"]]);
        assert_eq!(analysis.strong_strata_rank[&pred("p", 1)], 1);
        assert_eq!(analysis.strong_strata_rank[&pred("r", 1)], 2);
        assert_eq!(analysis.strong_strata_rank[&pred("q", 2)], 3);
        assert_eq!(analysis.strong_strata_rank[&pred("s", 3)], 3);
    }

    #[test]
    fn partition_layers_the_recursive_component() {
        let program = Program::parse(CYCLIC).unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        let c = analysis.component_index(&pred("q", 2)).unwrap();
        let Partition::Groups(groups) = &analysis.partitions[c] else {
            panic!("expected groups");
        };
        // M1 = { q(X,1) :- p(X) }, M2 = { s(..) :- .. }, M3 = { q(Y,X) :- s(..) }.
        let texts: Vec<Vec<String>> = groups
            .iter()
            .map(|g| g.iter().map(|&i| alloc::string::ToString::to_string(&program.rules[i])).collect())
            .collect();
        assert_eq!(
            texts,
            vec![
                vec!["q(X,1) :- p(X).".to_string()],
                vec!["s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z).".to_string()],
                vec!["q(Y,X) :- s(X,Y,Z).".to_string()],
            ]
        );
    }

    #[test]
    fn prefix_union_selects_variable_headed_rules() {
        let program = Program::parse(CYCLIC).unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);

        let q1 = ArgumentId::new("q", 2, 1);
        let rules = analysis.rules_m_prefix(&program.rules, &q1, 3);
        let texts: BTreeSet<String> =
            rules.iter().map(|&i| alloc::string::ToString::to_string(&program.rules[i])).collect();
        assert_eq!(
            texts,
            ["q(X,1) :- p(X).", "q(Y,X) :- s(X,Y,Z)."]
                .into_iter()
                .map(alloc::string::String::from)
                .collect()
        );

        // q[2] in group 1 has a constant head term there.
        let q2 = ArgumentId::new("q", 2, 2);
        assert!(analysis.rules_m(&program.rules, &q2, 1).is_empty());

        // s[3]: Z is a variable, so group 2 contains the s-rule.
        let s3 = ArgumentId::new("s", 3, 3);
        assert_eq!(analysis.rules_m(&program.rules, &s3, 2).len(), 1);
    }

    #[test]
    fn module_without_exit_rule() {
        let program = Program::parse("a(X) :- b(X). b(X) :- a(X).").unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        let c = analysis.component_index(&pred("a", 1)).unwrap();
        assert_eq!(analysis.partitions[c], Partition::NoExitRule);
    }

    #[test]
    fn body_only_predicate_has_empty_module() {
        let program = Program::parse("q(X) :- u(X).").unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        let c = analysis.component_index(&pred("u", 1)).unwrap();
        assert_eq!(analysis.partitions[c], Partition::Groups(Vec::new()));
    }

    #[test]
    fn tight_programs_have_singleton_components_and_exit_rules_only() {
        let program = Program::parse(CHAIN).unwrap();
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        for comp in &analysis.components {
            assert_eq!(comp.len(), 1);
        }
        for partition in &analysis.partitions {
            assert!(partition.cardinality() <= 1);
        }
    }
}
