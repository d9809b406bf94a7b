//! Network, tunnel, SRLG and path model plus the incidence queries the
//! solver and evaluator are built on.
//!
//! Instances are immutable once built (construction helpers aside) and hold
//! no interior mutability, so they can be shared freely across threads.

use std::collections::BTreeSet;
use std::fmt;

use crate::scalar::Real;

/// Index of a node inside a [`NetworkInstance`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub usize);

/// Index of a link inside a [`NetworkInstance`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinkId(pub usize);

/// Index of a tunnel inside a [`NetworkInstance`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TunnelId(pub usize);

/// Identifier of a candidate path, unique across all pathsets of an instance.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PathId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for TunnelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}", self.0)
    }
}

impl fmt::Display for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// An undirected physical link with a bandwidth capacity and a unit
/// reservation cost. `capacity` may be `+inf` for uncapacitated links.
#[derive(Clone, Debug, PartialEq)]
pub struct Link<F> {
    pub id: LinkId,
    pub name: String,
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: F,
    pub unit_cost: F,
}

impl<F> Link<F> {
    pub fn other_end(&self, n: NodeId) -> Option<NodeId> {
        if n == self.a {
            Some(self.b)
        } else if n == self.b {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }
}

/// A source/destination traffic aggregate. Protected tunnels get worst-case
/// bandwidth reservations; unprotected ones only count against capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct Tunnel<F> {
    pub id: TunnelId,
    pub name: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub demand: F,
    pub protected: bool,
}

/// A set of links that fail together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Srlg {
    pub id: usize,
    links: Vec<LinkId>,
}

impl Srlg {
    /// Builds an SRLG from a link set; links are kept sorted and deduplicated.
    pub fn new(id: usize, mut links: Vec<LinkId>) -> Self {
        links.sort_unstable();
        links.dedup();
        Srlg { id, links }
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.links.binary_search(&link).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// An ordered sequence of links from a tunnel's source to its destination.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<F> {
    pub id: PathId,
    pub tunnel: TunnelId,
    pub links: Vec<LinkId>,
    pub routing_cost: F,
}

impl<F> Path<F> {
    pub fn contains_link(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }

    pub fn intersects(&self, srlg: &Srlg) -> bool {
        self.links.iter().any(|&l| srlg.contains(l))
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }
}

/// The candidate paths of one tunnel.
#[derive(Clone, Debug, PartialEq)]
pub struct TunnelPathSet<F> {
    pub tunnel: TunnelId,
    pub paths: Vec<Path<F>>,
}

impl<F> TunnelPathSet<F> {
    pub fn path_ids(&self) -> impl Iterator<Item = PathId> + '_ {
        self.paths.iter().map(|p| p.id)
    }
}

/// A complete problem instance: topology, tunnels and failure scenarios.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkInstance<F> {
    node_names: Vec<String>,
    pub links: Vec<Link<F>>,
    pub tunnels: Vec<Tunnel<F>>,
    pub srlgs: Vec<Srlg>,
    pub epsilon: F,
}

/// Default headroom fraction: a protected tunnel may send at most
/// `1 - DEFAULT_EPSILON` of its traffic across any single SRLG.
pub const DEFAULT_EPSILON: f64 = 0.01;

impl<F: Real> Default for NetworkInstance<F> {
    fn default() -> Self {
        Self::empty(F::c(DEFAULT_EPSILON))
    }
}

impl<F: Real> NetworkInstance<F> {
    pub fn empty(epsilon: F) -> Self {
        NetworkInstance {
            node_names: Vec::new(),
            links: Vec::new(),
            tunnels: Vec::new(),
            srlgs: Vec::new(),
            epsilon,
        }
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> NodeId {
        self.node_names.push(name.into());
        NodeId(self.node_names.len() - 1)
    }

    pub fn add_link(
        &mut self,
        name: impl Into<String>,
        a: NodeId,
        b: NodeId,
        capacity: F,
        unit_cost: F,
    ) -> LinkId {
        let id = LinkId(self.links.len());
        self.links.push(Link {
            id,
            name: name.into(),
            a,
            b,
            capacity,
            unit_cost,
        });
        id
    }

    pub fn add_tunnel(
        &mut self,
        name: impl Into<String>,
        src: NodeId,
        dst: NodeId,
        demand: F,
        protected: bool,
    ) -> TunnelId {
        let id = TunnelId(self.tunnels.len());
        self.tunnels.push(Tunnel {
            id,
            name: name.into(),
            src,
            dst,
            demand,
            protected,
        });
        id
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.node_names[n.0]
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.node_names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn link_by_name(&self, name: &str) -> Option<LinkId> {
        self.links.iter().position(|l| l.name == name).map(LinkId)
    }

    pub fn tunnel_by_name(&self, name: &str) -> Option<TunnelId> {
        self.tunnels.iter().position(|t| t.name == name).map(TunnelId)
    }

    pub fn link(&self, id: LinkId) -> &Link<F> {
        &self.links[id.0]
    }

    pub fn tunnel(&self, id: TunnelId) -> &Tunnel<F> {
        &self.tunnels[id.0]
    }

    /// Links incident to `n`, in id order.
    pub fn incident_links(&self, n: NodeId) -> impl Iterator<Item = &Link<F>> {
        self.links.iter().filter(move |l| l.touches(n))
    }

    pub fn protected_tunnels(&self) -> impl Iterator<Item = &Tunnel<F>> {
        self.tunnels.iter().filter(|t| t.protected)
    }

    pub fn unprotected_tunnels(&self) -> impl Iterator<Item = &Tunnel<F>> {
        self.tunnels.iter().filter(|t| !t.protected)
    }
}

/// One broken invariant found by [`validate`]. Violations are data, not
/// faults; an instance with violations can still be inspected.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DanglingLinkEndpoint { link: LinkId },
    DuplicateLinkName { name: String },
    DuplicateLinkPair { first: LinkId, second: LinkId },
    SelfLoopLink { link: LinkId },
    NegativeCapacity { link: LinkId },
    NegativeCost { link: LinkId },
    EpsilonOutOfRange,
    EmptySrlg { srlg: usize },
    SrlgUnknownLink { srlg: usize },
    NonpositiveDemand { tunnel: TunnelId },
    TunnelSelfLoop { tunnel: TunnelId },
    TunnelUnknownEndpoint { tunnel: TunnelId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingLinkEndpoint { link } => {
                write!(f, "link {link} references an undeclared node")
            }
            Violation::DuplicateLinkName { name } => write!(f, "duplicate link name {name:?}"),
            Violation::DuplicateLinkPair { first, second } => {
                write!(f, "links {first} and {second} join the same node pair")
            }
            Violation::SelfLoopLink { link } => write!(f, "link {link} is a self-loop"),
            Violation::NegativeCapacity { link } => write!(f, "link {link} has negative capacity"),
            Violation::NegativeCost { link } => write!(f, "link {link} has negative unit cost"),
            Violation::EpsilonOutOfRange => write!(f, "epsilon must satisfy 0 <= epsilon < 1"),
            Violation::EmptySrlg { srlg } => write!(f, "SRLG {srlg} is empty"),
            Violation::SrlgUnknownLink { srlg } => {
                write!(f, "SRLG {srlg} references an unknown link id")
            }
            Violation::NonpositiveDemand { tunnel } => {
                write!(f, "tunnel {tunnel} has nonpositive demand")
            }
            Violation::TunnelSelfLoop { tunnel } => {
                write!(f, "tunnel {tunnel} has identical source and destination")
            }
            Violation::TunnelUnknownEndpoint { tunnel } => {
                write!(f, "tunnel {tunnel} references an undeclared node")
            }
        }
    }
}

/// Checks every instance invariant and returns one record per breach.
/// Returns an empty list iff the instance is well formed.
pub fn validate<F: Real>(instance: &NetworkInstance<F>) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_nodes = instance.node_count();
    let n_links = instance.links.len();

    let mut seen_names: BTreeSet<&str> = BTreeSet::new();
    let mut seen_pairs: std::collections::BTreeMap<(NodeId, NodeId), LinkId> =
        std::collections::BTreeMap::new();
    for link in &instance.links {
        if link.a.0 >= n_nodes || link.b.0 >= n_nodes {
            out.push(Violation::DanglingLinkEndpoint { link: link.id });
            continue;
        }
        if link.a == link.b {
            out.push(Violation::SelfLoopLink { link: link.id });
        }
        if !seen_names.insert(&link.name) {
            out.push(Violation::DuplicateLinkName {
                name: link.name.clone(),
            });
        }
        let key = if link.a <= link.b {
            (link.a, link.b)
        } else {
            (link.b, link.a)
        };
        if let Some(&first) = seen_pairs.get(&key) {
            out.push(Violation::DuplicateLinkPair {
                first,
                second: link.id,
            });
        } else {
            seen_pairs.insert(key, link.id);
        }
        if link.capacity < F::zero() {
            out.push(Violation::NegativeCapacity { link: link.id });
        }
        if link.unit_cost < F::zero() || !link.unit_cost.is_finite() {
            out.push(Violation::NegativeCost { link: link.id });
        }
    }

    if !(instance.epsilon >= F::zero() && instance.epsilon < F::one()) {
        out.push(Violation::EpsilonOutOfRange);
    }

    for srlg in &instance.srlgs {
        if srlg.is_empty() {
            out.push(Violation::EmptySrlg { srlg: srlg.id });
        }
        if srlg.links().iter().any(|l| l.0 >= n_links) {
            out.push(Violation::SrlgUnknownLink { srlg: srlg.id });
        }
    }

    for tunnel in &instance.tunnels {
        if tunnel.src.0 >= n_nodes || tunnel.dst.0 >= n_nodes {
            out.push(Violation::TunnelUnknownEndpoint { tunnel: tunnel.id });
        } else if tunnel.src == tunnel.dst {
            out.push(Violation::TunnelSelfLoop { tunnel: tunnel.id });
        }
        if !(tunnel.demand > F::zero()) {
            out.push(Violation::NonpositiveDemand { tunnel: tunnel.id });
        }
    }

    out
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("SRLG size {q} is invalid for {links} links (need 1 <= q <= links)")]
    InvalidSrlgSize { q: usize, links: usize },
    #[error("unknown tunnel {0}")]
    UnknownTunnel(TunnelId),
    #[error("path {path} is not a connected walk from source to destination")]
    DisconnectedPath { path: PathId },
    #[error("path {path} repeats a link or node")]
    NonSimplePath { path: PathId },
    #[error("tunnel {tunnel} has no candidate paths")]
    TunnelWithoutPaths { tunnel: TunnelId },
}

/// Enumerates all `C(|E|, q)` link subsets of size `q` as SRLGs, in
/// lexicographic order of link ids. SRLG ids follow enumeration order.
pub fn enumerate_srlgs<F: Real>(
    instance: &NetworkInstance<F>,
    q: usize,
) -> Result<Vec<Srlg>, ModelError> {
    let n = instance.links.len();
    if q == 0 || q > n {
        return Err(ModelError::InvalidSrlgSize { q, links: n });
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..q).collect();
    loop {
        out.push(Srlg::new(out.len(), combo.iter().map(|&i| LinkId(i)).collect()));
        // Advance to the next combination in lexicographic order.
        let mut i = q;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if combo[i] != i + n - q {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..q {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// `P^k_S`: the paths of this tunnel that touch at least one link of `srlg`.
pub fn paths_intersecting<F>(set: &TunnelPathSet<F>, srlg: &Srlg) -> BTreeSet<PathId> {
    set.paths
        .iter()
        .filter(|p| p.intersects(srlg))
        .map(|p| p.id)
        .collect()
}

/// `P^k_e`: the paths of this tunnel that contain link `e`.
pub fn paths_through_edge<F>(set: &TunnelPathSet<F>, e: LinkId) -> BTreeSet<PathId> {
    set.paths
        .iter()
        .filter(|p| p.contains_link(e))
        .map(|p| p.id)
        .collect()
}

/// Looks up the pathset of a tunnel in a pathset collection.
pub fn pathset_for<F>(
    pathsets: &[TunnelPathSet<F>],
    tunnel: TunnelId,
) -> Result<&TunnelPathSet<F>, ModelError> {
    pathsets
        .iter()
        .find(|s| s.tunnel == tunnel)
        .ok_or(ModelError::UnknownTunnel(tunnel))
}

/// Checks that a path is a simple connected walk between its tunnel's
/// endpoints and returns the traversed node sequence.
pub fn path_node_sequence<F: Real>(
    instance: &NetworkInstance<F>,
    path: &Path<F>,
) -> Result<Vec<NodeId>, ModelError> {
    let tunnel = instance.tunnel(path.tunnel);
    let mut seq = vec![tunnel.src];
    let mut at = tunnel.src;
    let mut seen_links = BTreeSet::new();
    for &lid in &path.links {
        if !seen_links.insert(lid) {
            return Err(ModelError::NonSimplePath { path: path.id });
        }
        let link = instance.link(lid);
        let next = link
            .other_end(at)
            .ok_or(ModelError::DisconnectedPath { path: path.id })?;
        seq.push(next);
        at = next;
    }
    if at != tunnel.dst {
        return Err(ModelError::DisconnectedPath { path: path.id });
    }
    let distinct: BTreeSet<_> = seq.iter().collect();
    if distinct.len() != seq.len() {
        return Err(ModelError::NonSimplePath { path: path.id });
    }
    Ok(seq)
}

/// Checks that `pathsets` covers every tunnel of the instance with at least
/// one valid path.
pub fn validate_pathsets<F: Real>(
    instance: &NetworkInstance<F>,
    pathsets: &[TunnelPathSet<F>],
) -> Result<(), ModelError> {
    for tunnel in &instance.tunnels {
        let set = pathset_for(pathsets, tunnel.id)?;
        if set.paths.is_empty() {
            return Err(ModelError::TunnelWithoutPaths { tunnel: tunnel.id });
        }
        for path in &set.paths {
            path_node_sequence(instance, path)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> NetworkInstance<f64> {
        let mut inst = NetworkInstance::default();
        let a = inst.add_node("a");
        let b = inst.add_node("b");
        let c = inst.add_node("c");
        inst.add_link("ab", a, b, 100.0, 1.0);
        inst.add_link("bc", b, c, 100.0, 1.0);
        inst.add_link("ca", c, a, 100.0, 1.0);
        inst.add_tunnel("t0", a, c, 10.0, true);
        inst
    }

    #[test]
    fn validate_accepts_well_formed_triangle() {
        assert_eq!(validate(&triangle()), vec![]);
    }

    #[test]
    fn validate_flags_nonpositive_demand() {
        let mut inst = triangle();
        inst.tunnels[0].demand = 0.0;
        assert_eq!(
            validate(&inst),
            vec![Violation::NonpositiveDemand { tunnel: TunnelId(0) }]
        );
    }

    #[test]
    fn validate_flags_srlg_with_unknown_link() {
        let mut inst = triangle();
        inst.srlgs = vec![Srlg::new(0, vec![LinkId(9)])];
        assert_eq!(validate(&inst), vec![Violation::SrlgUnknownLink { srlg: 0 }]);
    }

    #[test]
    fn validate_flags_duplicate_pair_and_self_loop() {
        let mut inst = triangle();
        let a = NodeId(0);
        let b = NodeId(1);
        inst.add_link("ba", b, a, 10.0, 1.0);
        inst.add_link("aa", a, a, 10.0, 1.0);
        let violations = validate(&inst);
        assert!(violations.contains(&Violation::DuplicateLinkPair {
            first: LinkId(0),
            second: LinkId(3),
        }));
        assert!(violations.contains(&Violation::SelfLoopLink { link: LinkId(4) }));
    }

    #[test]
    fn validate_flags_bad_epsilon() {
        let mut inst = triangle();
        inst.epsilon = 1.0;
        assert_eq!(validate(&inst), vec![Violation::EpsilonOutOfRange]);
    }

    #[test]
    fn validate_is_pure() {
        let inst = triangle();
        let before = inst.clone();
        let _ = validate(&inst);
        let _ = validate(&inst);
        assert_eq!(inst, before);
    }

    #[test]
    fn enumerate_singletons() {
        let srlgs = enumerate_srlgs(&triangle(), 1).unwrap();
        assert_eq!(srlgs.len(), 3);
        for (i, s) in srlgs.iter().enumerate() {
            assert_eq!(s.id, i);
            assert_eq!(s.links(), &[LinkId(i)]);
        }
    }

    #[test]
    fn enumerate_pairs_of_four() {
        let mut inst = triangle();
        inst.add_link("bd", NodeId(1), inst.add_node("d"), 1.0, 1.0);
        let srlgs = enumerate_srlgs(&inst, 2).unwrap();
        assert_eq!(srlgs.len(), 6);
        let expected: Vec<Vec<usize>> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ];
        for (s, exp) in srlgs.iter().zip(expected) {
            let got: Vec<usize> = s.links().iter().map(|l| l.0).collect();
            assert_eq!(got, exp);
        }
    }

    #[test]
    fn enumerate_rejects_degenerate_sizes() {
        let inst = triangle();
        assert!(matches!(
            enumerate_srlgs(&inst, 0),
            Err(ModelError::InvalidSrlgSize { q: 0, .. })
        ));
        assert!(matches!(
            enumerate_srlgs(&inst, 4),
            Err(ModelError::InvalidSrlgSize { q: 4, .. })
        ));
    }

    /// C(n, q) by the multiplicative rule; independent of the enumerator.
    fn binomial(n: usize, q: usize) -> usize {
        if q > n {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..q {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as usize
    }

    #[test]
    fn enumerate_count_matches_binomial_at_sndlib_scale() {
        let mut inst = NetworkInstance::<f64>::default();
        let nodes: Vec<NodeId> = (0..46).map(|i| inst.add_node(format!("n{i}"))).collect();
        for i in 0..45 {
            inst.add_link(format!("l{i}"), nodes[i], nodes[i + 1], 1.0, 1.0);
        }
        assert_eq!(binomial(45, 2), 990);
        assert_eq!(enumerate_srlgs(&inst, 2).unwrap().len(), 990);
    }

    fn two_path_set() -> TunnelPathSet<f64> {
        TunnelPathSet {
            tunnel: TunnelId(0),
            paths: vec![
                Path {
                    id: PathId(0),
                    tunnel: TunnelId(0),
                    links: vec![LinkId(0), LinkId(1)],
                    routing_cost: 2.0,
                },
                Path {
                    id: PathId(1),
                    tunnel: TunnelId(0),
                    links: vec![LinkId(2)],
                    routing_cost: 1.0,
                },
            ],
        }
    }

    #[test]
    fn intersecting_and_through_edge_queries() {
        let set = two_path_set();
        let s_only_p0 = Srlg::new(0, vec![LinkId(1)]);
        assert_eq!(
            paths_intersecting(&set, &s_only_p0),
            BTreeSet::from([PathId(0)])
        );
        let s_disjoint = Srlg::new(1, vec![LinkId(7)]);
        assert!(paths_intersecting(&set, &s_disjoint).is_empty());
        let s_both = Srlg::new(2, vec![LinkId(0), LinkId(2)]);
        assert_eq!(
            paths_intersecting(&set, &s_both),
            BTreeSet::from([PathId(0), PathId(1)])
        );

        assert_eq!(paths_through_edge(&set, LinkId(2)), BTreeSet::from([PathId(1)]));
        assert!(paths_through_edge(&set, LinkId(5)).is_empty());
    }

    #[test]
    fn reservation_term_partition_is_disjoint() {
        let set = two_path_set();
        for srlg in [
            Srlg::new(0, vec![LinkId(0)]),
            Srlg::new(1, vec![LinkId(2)]),
            Srlg::new(2, vec![LinkId(0), LinkId(2)]),
        ] {
            for e in 0..3 {
                let crossing = paths_intersecting(&set, &srlg);
                let through: BTreeSet<_> = paths_through_edge(&set, LinkId(e))
                    .difference(&crossing)
                    .copied()
                    .collect();
                assert!(crossing.intersection(&through).next().is_none());
            }
        }
    }

    #[test]
    fn path_node_sequence_checks_connectivity() {
        let inst = triangle();
        let good = Path {
            id: PathId(0),
            tunnel: TunnelId(0),
            links: vec![LinkId(0), LinkId(1)],
            routing_cost: 2.0,
        };
        assert_eq!(
            path_node_sequence(&inst, &good).unwrap(),
            vec![NodeId(0), NodeId(1), NodeId(2)]
        );
        let broken = Path {
            id: PathId(1),
            tunnel: TunnelId(0),
            links: vec![LinkId(1)],
            routing_cost: 1.0,
        };
        assert!(path_node_sequence(&inst, &broken).is_err());
    }
}
