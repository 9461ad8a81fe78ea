//! Interferometer topologies as directed acyclic graphs of optical elements,
//! and their reduction to a table of source-to-detector paths.
//!
//! A beam splitter has two input ports (`A`, `B`) and two output ports
//! (`T`, `R`). Light entering `A` and leaving `T`, or entering `B` and
//! leaving `R`, is transmitted with factor `sqrt(1 - r)`; the crossed
//! combinations are reflections with factor `i sqrt(r)`. A mirror contributes
//! only its static phase `exp(i phi)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConnectionId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutPort {
    /// Single output of a source, mirror or block.
    Out,
    T,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InPort {
    /// Single input of a mirror, block or detector.
    In,
    A,
    B,
}

impl fmt::Display for OutPort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutPort::Out => "out",
            OutPort::T => "t",
            OutPort::R => "r",
        })
    }
}

impl fmt::Display for InPort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InPort::In => "in",
            InPort::A => "a",
            InPort::B => "b",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Source,
    /// `reflect_fraction` is the reflected power fraction.
    BeamSplitter { reflect_fraction: f64 },
    /// `static_phase` in radians. The element label is the mirror id.
    Mirror { static_phase: f64 },
    Block,
    Detector,
}

impl ElementKind {
    fn accepts_in(&self, port: InPort) -> bool {
        match self {
            ElementKind::Source => false,
            ElementKind::BeamSplitter { .. } => matches!(port, InPort::A | InPort::B),
            _ => port == InPort::In,
        }
    }

    fn accepts_out(&self, port: OutPort) -> bool {
        match self {
            ElementKind::Detector => false,
            ElementKind::BeamSplitter { .. } => matches!(port, OutPort::T | OutPort::R),
            _ => port == OutPort::Out,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub label: String,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connection {
    pub from: ElementId,
    pub from_port: OutPort,
    pub to: ElementId,
    pub to_port: InPort,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("topology error: {0}")]
    Topology(String),
    #[error("unknown connection {0}")]
    UnknownConnection(usize),
    #[error("unknown mirror `{0}`")]
    UnknownMirror(String),
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    SplitterFraction { label: String, value: f64 },
    Cycle { label: String },
    DuplicateLabel { label: String },
    Orphan { label: String },
    SourceCount(usize),
    DetectorCount(usize),
    InvalidPort { label: String, port: String },
    PortReused { label: String, port: String },
    DanglingConnection { index: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::SplitterFraction { label, value } => {
                write!(f, "beam splitter `{label}`: reflect fraction {value} outside (0, 1)")
            }
            Diagnostic::Cycle { label } => write!(f, "cycle through `{label}`"),
            Diagnostic::DuplicateLabel { label } => write!(f, "duplicate label `{label}`"),
            Diagnostic::Orphan { label } => {
                write!(f, "`{label}` is disconnected from both source and detector")
            }
            Diagnostic::SourceCount(n) => write!(f, "expected exactly one source, found {n}"),
            Diagnostic::DetectorCount(n) => write!(f, "expected exactly one detector, found {n}"),
            Diagnostic::InvalidPort { label, port } => {
                write!(f, "`{label}` has no port `{port}`")
            }
            Diagnostic::PortReused { label, port } => {
                write!(f, "port `{port}` of `{label}` is connected more than once")
            }
            Diagnostic::DanglingConnection { index } => {
                write!(f, "connection {index} refers to a missing element")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalPath {
    pub element_sequence: Vec<ElementId>,
    pub connections: Vec<ConnectionId>,
    pub amplitude: Complex64,
    pub mirrors: Vec<String>,
}

impl OpticalPath {
    pub fn passes(&self, mirror: &str) -> bool {
        self.mirrors.iter().any(|m| m == mirror)
    }

    pub fn term(&self) -> PathTerm {
        PathTerm { amplitude: self.amplitude, mirrors: self.mirrors.clone() }
    }
}

/// A path reduced to what the detector sees: its complex amplitude and the
/// ordered mirrors it bounces off.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTerm {
    pub amplitude: Complex64,
    pub mirrors: Vec<String>,
}

impl PathTerm {
    pub fn new(amplitude: Complex64, mirrors: &[&str]) -> Self {
        Self { amplitude, mirrors: mirrors.iter().map(|m| m.to_string()).collect() }
    }

    pub fn passes(&self, mirror: &str) -> bool {
        self.mirrors.iter().any(|m| m == mirror)
    }
}

/// Immutable interferometer graph. Build one with [`NetworkBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalNetwork {
    elements: Vec<Element>,
    connections: Vec<Connection>,
}

impl OpticalNetwork {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn element(&self, id: ElementId) -> &Element {
        &self.elements[id.0]
    }

    pub fn find(&self, label: &str) -> Option<ElementId> {
        self.elements.iter().position(|e| e.label == label).map(ElementId)
    }

    /// Connection leaving `from_label` through `port`.
    pub fn connection_from(&self, from_label: &str, port: OutPort) -> Option<ConnectionId> {
        let from = self.find(from_label)?;
        self.connections
            .iter()
            .position(|c| c.from == from && c.from_port == port)
            .map(ConnectionId)
    }

    /// Labels of all mirrors, in element order.
    pub fn mirror_labels(&self) -> Vec<String> {
        self.elements
            .iter()
            .filter(|e| matches!(e.kind, ElementKind::Mirror { .. }))
            .map(|e| e.label.clone())
            .collect()
    }

    fn ids_of(&self, pred: impl Fn(&ElementKind) -> bool) -> Vec<ElementId> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| pred(&e.kind))
            .map(|(i, _)| ElementId(i))
            .collect()
    }

    pub(crate) fn source(&self) -> Result<ElementId, NetworkError> {
        match self.ids_of(|k| matches!(k, ElementKind::Source)).as_slice() {
            [one] => Ok(*one),
            other => Err(NetworkError::Topology(format!(
                "expected exactly one source, found {}",
                other.len()
            ))),
        }
    }

    pub(crate) fn detector(&self) -> Result<ElementId, NetworkError> {
        match self.ids_of(|k| matches!(k, ElementKind::Detector)).as_slice() {
            [one] => Ok(*one),
            other => Err(NetworkError::Topology(format!(
                "expected exactly one detector, found {}",
                other.len()
            ))),
        }
    }

    /// Outgoing connections of `id`, sorted by destination element id so
    /// that traversal order is deterministic.
    pub(crate) fn outgoing(&self, id: ElementId) -> Vec<ConnectionId> {
        let mut out: Vec<ConnectionId> = self
            .connections
            .iter()
            .enumerate()
            .filter(|(_, c)| c.from == id)
            .map(|(i, _)| ConnectionId(i))
            .collect();
        out.sort_by_key(|c| (self.connections[c.0].to, self.connections[c.0].from_port));
        out
    }

    pub(crate) fn incoming(&self, id: ElementId) -> Vec<ConnectionId> {
        self.connections
            .iter()
            .enumerate()
            .filter(|(_, c)| c.to == id)
            .map(|(i, _)| ConnectionId(i))
            .collect()
    }

    /// Amplitude factor picked up when light enters `element` through
    /// `in_port` and leaves through `out_port`.
    pub fn element_factor(&self, id: ElementId, in_port: InPort, out_port: OutPort) -> Complex64 {
        match self.elements[id.0].kind {
            ElementKind::BeamSplitter { reflect_fraction } => {
                splitter_factor(reflect_fraction, in_port, out_port)
            }
            ElementKind::Mirror { static_phase } => Complex64::from_polar(1.0, static_phase),
            ElementKind::Block => Complex64::new(0.0, 0.0),
            ElementKind::Source | ElementKind::Detector => Complex64::new(1.0, 0.0),
        }
    }

    fn find_cycle(&self) -> Option<ElementId> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.elements.len()];
        fn visit(net: &OpticalNetwork, v: usize, state: &mut [u8]) -> Option<ElementId> {
            state[v] = 1;
            for c in &net.connections {
                if c.from.0 != v || c.to.0 >= state.len() {
                    continue;
                }
                match state[c.to.0] {
                    1 => return Some(c.to),
                    0 => {
                        if let Some(hit) = visit(net, c.to.0, state) {
                            return Some(hit);
                        }
                    }
                    _ => {}
                }
            }
            state[v] = 2;
            None
        }
        (0..self.elements.len()).find_map(|v| {
            if state[v] == 0 {
                visit(self, v, &mut state)
            } else {
                None
            }
        })
    }

    fn reachable(&self, start: ElementId, forward: bool) -> BTreeSet<ElementId> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for c in &self.connections {
                let (a, b) = if forward { (c.from, c.to) } else { (c.to, c.from) };
                if a == v && b.0 < self.elements.len() && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// Transmission `sqrt(1 - r)` when the ports are aligned (`A`->`T`,
/// `B`->`R`), reflection `i sqrt(r)` otherwise.
pub fn splitter_factor(reflect_fraction: f64, in_port: InPort, out_port: OutPort) -> Complex64 {
    let transmitted = matches!(
        (in_port, out_port),
        (InPort::A, OutPort::T) | (InPort::B, OutPort::R)
    );
    if transmitted {
        Complex64::new((1.0 - reflect_fraction).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, reflect_fraction.sqrt())
    }
}

#[derive(Debug, Default)]
pub struct NetworkBuilder {
    elements: Vec<Element>,
    connections: Vec<Connection>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: impl Into<String>, kind: ElementKind) -> ElementId {
        self.elements.push(Element { label: label.into(), kind });
        ElementId(self.elements.len() - 1)
    }

    pub fn source(&mut self, label: &str) -> ElementId {
        self.add(label, ElementKind::Source)
    }

    pub fn splitter(&mut self, label: &str, reflect_fraction: f64) -> ElementId {
        self.add(label, ElementKind::BeamSplitter { reflect_fraction })
    }

    pub fn mirror(&mut self, label: &str, static_phase: f64) -> ElementId {
        self.add(label, ElementKind::Mirror { static_phase })
    }

    pub fn block(&mut self, label: &str) -> ElementId {
        self.add(label, ElementKind::Block)
    }

    pub fn detector(&mut self, label: &str) -> ElementId {
        self.add(label, ElementKind::Detector)
    }

    pub fn connect(&mut self, from: ElementId, from_port: OutPort, to: ElementId, to_port: InPort) -> ConnectionId {
        self.connections.push(Connection { from, from_port, to, to_port });
        ConnectionId(self.connections.len() - 1)
    }

    /// `from.Out -> to.In`
    pub fn link(&mut self, from: ElementId, to: ElementId) -> ConnectionId {
        self.connect(from, OutPort::Out, to, InPort::In)
    }

    pub fn build(self) -> OpticalNetwork {
        OpticalNetwork { elements: self.elements, connections: self.connections }
    }
}

pub fn validate(network: &OpticalNetwork) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let n = network.elements.len();

    let sources = network.ids_of(|k| matches!(k, ElementKind::Source));
    if sources.len() != 1 {
        diags.push(Diagnostic::SourceCount(sources.len()));
    }
    let detectors = network.ids_of(|k| matches!(k, ElementKind::Detector));
    if detectors.len() != 1 {
        diags.push(Diagnostic::DetectorCount(detectors.len()));
    }

    let mut seen_labels = BTreeSet::new();
    for e in &network.elements {
        if !seen_labels.insert(e.label.as_str()) {
            diags.push(Diagnostic::DuplicateLabel { label: e.label.clone() });
        }
        if let ElementKind::BeamSplitter { reflect_fraction } = e.kind {
            if !(reflect_fraction > 0.0 && reflect_fraction < 1.0) {
                diags.push(Diagnostic::SplitterFraction {
                    label: e.label.clone(),
                    value: reflect_fraction,
                });
            }
        }
    }

    let mut used_out = BTreeSet::new();
    let mut used_in = BTreeSet::new();
    for (i, c) in network.connections.iter().enumerate() {
        if c.from.0 >= n || c.to.0 >= n {
            diags.push(Diagnostic::DanglingConnection { index: i });
            continue;
        }
        let from = &network.elements[c.from.0];
        let to = &network.elements[c.to.0];
        if !from.kind.accepts_out(c.from_port) {
            diags.push(Diagnostic::InvalidPort { label: from.label.clone(), port: c.from_port.to_string() });
        } else if !used_out.insert((c.from, c.from_port)) {
            diags.push(Diagnostic::PortReused { label: from.label.clone(), port: c.from_port.to_string() });
        }
        if !to.kind.accepts_in(c.to_port) {
            diags.push(Diagnostic::InvalidPort { label: to.label.clone(), port: c.to_port.to_string() });
        } else if !used_in.insert((c.to, c.to_port)) {
            diags.push(Diagnostic::PortReused { label: to.label.clone(), port: c.to_port.to_string() });
        }
    }

    if let Some(v) = network.find_cycle() {
        diags.push(Diagnostic::Cycle { label: network.elements[v.0].label.clone() });
    }

    let from_source: BTreeSet<ElementId> = sources
        .iter()
        .flat_map(|&s| network.reachable(s, true))
        .collect();
    let to_detector: BTreeSet<ElementId> = detectors
        .iter()
        .flat_map(|&d| network.reachable(d, false))
        .collect();
    if !sources.is_empty() && !detectors.is_empty() {
        for (i, e) in network.elements.iter().enumerate() {
            let id = ElementId(i);
            if !from_source.contains(&id) && !to_detector.contains(&id) {
                diags.push(Diagnostic::Orphan { label: e.label.clone() });
            }
        }
    }
    diags
}

/// All acyclic source-to-detector routes that avoid blocks, ordered
/// lexicographically by element sequence.
pub fn enumerate_paths(network: &OpticalNetwork) -> Result<Vec<OpticalPath>, NetworkError> {
    if let Some(v) = network.find_cycle() {
        return Err(NetworkError::Topology(format!(
            "cycle through `{}`",
            network.elements[v.0].label
        )));
    }
    let source = network.source()?;
    let detector = network.detector()?;

    let mut paths = Vec::new();
    let mut elements = vec![source];
    let mut conns = Vec::new();
    walk(network, source, detector, &mut elements, &mut conns, &mut paths);
    for p in &mut paths {
        p.amplitude = path_amplitude(p, network);
    }
    paths.sort_by(|a, b| a.element_sequence.cmp(&b.element_sequence));
    Ok(paths)
}

fn walk(
    net: &OpticalNetwork,
    at: ElementId,
    detector: ElementId,
    elements: &mut Vec<ElementId>,
    conns: &mut Vec<ConnectionId>,
    out: &mut Vec<OpticalPath>,
) {
    if at == detector {
        let mirrors = elements
            .iter()
            .filter(|id| matches!(net.element(**id).kind, ElementKind::Mirror { .. }))
            .map(|id| net.element(*id).label.clone())
            .collect();
        out.push(OpticalPath {
            element_sequence: elements.clone(),
            connections: conns.clone(),
            amplitude: Complex64::new(0.0, 0.0),
            mirrors,
        });
        return;
    }
    for cid in net.outgoing(at) {
        let next = net.connections[cid.0].to;
        if next.0 >= net.elements.len() || matches!(net.element(next).kind, ElementKind::Block) {
            continue;
        }
        elements.push(next);
        conns.push(cid);
        walk(net, next, detector, elements, conns, out);
        elements.pop();
        conns.pop();
    }
}

/// Product of the per-element factors along `path`.
pub fn path_amplitude(path: &OpticalPath, network: &OpticalNetwork) -> Complex64 {
    let mut amp = Complex64::new(1.0, 0.0);
    for (k, &id) in path.element_sequence.iter().enumerate() {
        let in_port = match k {
            0 => InPort::In,
            _ => network.connections[path.connections[k - 1].0].to_port,
        };
        let out_port = match path.connections.get(k) {
            Some(c) => network.connections[c.0].from_port,
            None => OutPort::Out,
        };
        amp *= network.element_factor(id, in_port, out_port);
    }
    amp
}

/// Copy of `network` with a block spliced into connection `edge`. The
/// blocked connection keeps its id and now ends at the block; the block's
/// output is appended as a new connection.
pub fn apply_block(network: &OpticalNetwork, edge: ConnectionId) -> Result<OpticalNetwork, NetworkError> {
    let original = *network
        .connections
        .get(edge.0)
        .ok_or(NetworkError::UnknownConnection(edge.0))?;
    let mut out = network.clone();
    let mut label = format!("block{}", edge.0);
    while out.find(&label).is_some() {
        label.push('\'');
    }
    out.elements.push(Element { label, kind: ElementKind::Block });
    let block = ElementId(out.elements.len() - 1);
    out.connections[edge.0] = Connection { to: block, to_port: InPort::In, ..original };
    out.connections.push(Connection {
        from: block,
        from_port: OutPort::Out,
        to: original.to,
        to_port: original.to_port,
    });
    Ok(out)
}

/// Path amplitudes grouped by mirror label: `Σ amplitude(p)` over the paths
/// that bounce off each mirror.
pub fn mirror_path_sums(paths: &[PathTerm]) -> BTreeMap<String, Complex64> {
    let mut sums = BTreeMap::new();
    for p in paths {
        for m in &p.mirrors {
            *sums.entry(m.clone()).or_insert(Complex64::new(0.0, 0.0)) += p.amplitude;
        }
    }
    sums
}
