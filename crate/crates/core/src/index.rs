//! The attributed truss index: structural trussness of `G`, trussness inside
//! every attribute projection `G_w`, and per-attribute inverted vertex lists
//! ordered by structural vertex trussness.
//!
//! On disk the index is a versioned, sectioned text file:
//!
//! ```text
//! ATIDX 1
//! STRUCT_V <n>          one row per vertex: ext_id τ_G(v)
//! CRC <crc32>
//! STRUCT_E <m>          one row per edge:   u v τ_G(e)
//! CRC <crc32>
//! ATTR <label> <rows>   one row per edge of G_w:   u v τ_{G_w}(e)
//! CRC <crc32>
//! INV <label> <rows>    one row per vertex of V_w: v τ_G(v) τ_{G_w}(v)
//! CRC <crc32>
//! …                      (ATTR/INV pairs in attribute id order)
//! END <attribute count>
//! ```
//!
//! Fields are tab-separated. Vertex columns other than `ext_id` are internal
//! ids. The CRC of a section covers its header line and rows,
//! newline-terminated. The file carries the whole attributed graph, so an
//! index can be queried without the source files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AttrId, EdgeId, Graph, Subgraph, VertexId};
use crate::truss::{truss_decompose, TrussnessMap};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "ATIDX";

/// Trussness values of one attribute projection. Only edges and vertices of
/// `G_w` are present.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttrTruss {
    pub edges: HashMap<EdgeId, u32>,
    pub vertices: HashMap<VertexId, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtIndex {
    structural: TrussnessMap,
    attr: Vec<AttrTruss>,
    inverted: Vec<Vec<(VertexId, u32)>>,
    tau_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrussKind {
    Structural,
    Attribute(AttrId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Edge(VertexId, VertexId),
    Vertex(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Trussness(u32),
    /// The element is not part of the requested projection `G_w`.
    NotInProjection,
}

fn decompose_projection(g: &Graph, w: AttrId) -> AttrTruss {
    let (gw, map) = g.induced_structure(g.posting(w));
    let truss = truss_decompose(&Subgraph::full(&gw));
    let mut out = AttrTruss::default();
    for (local, &(lu, lv)) in gw.edges().iter().enumerate() {
        let e = g
            .edge_id(map[lu as usize], map[lv as usize])
            .expect("projection edge exists in parent");
        out.edges.insert(e, truss.edge[local]);
    }
    for (local, &v) in map.iter().enumerate() {
        out.vertices.insert(v, truss.vertex[local]);
    }
    out
}

/// Builds the index on the current rayon pool.
pub fn build_index(g: &Graph) -> AtIndex {
    let structural = truss_decompose(&Subgraph::full(g));
    let attr: Vec<AttrTruss> = (0..g.num_attrs() as AttrId)
        .into_par_iter()
        .map(|w| decompose_projection(g, w))
        .collect();
    let inverted = (0..g.num_attrs() as AttrId)
        .map(|w| {
            let mut list: Vec<(VertexId, u32)> = g
                .posting(w)
                .iter()
                .map(|&v| (v, structural.vertex[v as usize]))
                .collect();
            list.sort_by_key(|&(v, t)| (std::cmp::Reverse(t), v));
            list
        })
        .collect();
    let tau_max = structural.max();
    AtIndex {
        structural,
        attr,
        inverted,
        tau_max,
    }
}

/// Builds the index with a dedicated pool of `threads` workers.
pub fn build_index_with_threads(g: &Graph, threads: usize) -> Result<AtIndex> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| build_index(g)))
}

impl AtIndex {
    pub fn structural(&self) -> &TrussnessMap {
        &self.structural
    }

    /// `τ̄(∅)`
    pub fn tau_max(&self) -> u32 {
        self.tau_max
    }

    pub fn edge_trussness(&self, e: EdgeId) -> u32 {
        self.structural.edge[e as usize]
    }

    pub fn vertex_trussness(&self, v: VertexId) -> u32 {
        self.structural.vertex[v as usize]
    }

    /// `τ_{G_w}(e)`, `None` when `e ∉ E(G_w)`.
    pub fn attr_edge_trussness(&self, w: AttrId, e: EdgeId) -> Option<u32> {
        self.attr.get(w as usize)?.edges.get(&e).copied()
    }

    pub fn attr_vertex_trussness(&self, w: AttrId, v: VertexId) -> Option<u32> {
        self.attr.get(w as usize)?.vertices.get(&v).copied()
    }

    pub fn attr_truss(&self, w: AttrId) -> Option<&AttrTruss> {
        self.attr.get(w as usize)
    }

    /// `invA_w`: `(v, τ_G(v))` for `v ∈ V_w`, by decreasing trussness then id.
    pub fn inverted(&self, w: AttrId) -> &[(VertexId, u32)] {
        self.inverted.get(w as usize).map_or(&[], |l| l.as_slice())
    }

    pub fn num_attrs(&self) -> usize {
        self.attr.len()
    }

    pub fn lookup(&self, g: &Graph, kind: TrussKind, element: Element) -> Result<Lookup> {
        let attr = match kind {
            TrussKind::Structural => None,
            TrussKind::Attribute(w) => Some(
                self.attr
                    .get(w as usize)
                    .ok_or_else(|| Error::UnknownAttribute(w.to_string()))?,
            ),
        };
        let found = match element {
            Element::Edge(u, v) => {
                let e = g.edge_id(u, v).ok_or(Error::UnknownEdge(u, v))?;
                match attr {
                    None => Some(self.structural.edge[e as usize]),
                    Some(a) => a.edges.get(&e).copied(),
                }
            }
            Element::Vertex(v) => {
                g.check_vertex(v)?;
                match attr {
                    None => Some(self.structural.vertex[v as usize]),
                    Some(a) => a.vertices.get(&v).copied(),
                }
            }
        };
        Ok(found.map_or(Lookup::NotInProjection, Lookup::Trussness))
    }

    /// Stored rows: `m + n + Σ_w (|E(G_w)| + |V_w|)`.
    pub fn entry_count(&self) -> usize {
        self.structural.edge.len()
            + self.structural.vertex.len()
            + self
                .attr
                .iter()
                .map(|a| a.edges.len() + a.vertices.len())
                .sum::<usize>()
    }
}

struct SectionWriter {
    out: String,
    section: String,
}

impl SectionWriter {
    fn begin(&mut self, header: String) {
        self.section.clear();
        self.section.push_str(&header);
        self.section.push('\n');
    }

    fn row(&mut self, cols: &[u64]) {
        for (i, c) in cols.iter().enumerate() {
            if i > 0 {
                self.section.push('\t');
            }
            write!(self.section, "{c}").unwrap();
        }
        self.section.push('\n');
    }

    fn end(&mut self) {
        let crc = crc32fast::hash(self.section.as_bytes());
        self.out.push_str(&self.section);
        writeln!(self.out, "CRC\t{crc:08x}").unwrap();
    }
}

/// Serializes the graph and its index.
pub fn to_text(g: &Graph, idx: &AtIndex) -> String {
    let mut w = SectionWriter {
        out: format!("{MAGIC}\t{FORMAT_VERSION}\n"),
        section: String::new(),
    };
    w.begin(format!("STRUCT_V\t{}", g.num_vertices()));
    for v in 0..g.num_vertices() as VertexId {
        w.row(&[g.ext_id(v), idx.structural.vertex[v as usize] as u64]);
    }
    w.end();
    w.begin(format!("STRUCT_E\t{}", g.num_edges()));
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        w.row(&[u as u64, v as u64, idx.structural.edge[e] as u64]);
    }
    w.end();
    for attr in 0..g.num_attrs() as AttrId {
        let label = g.attr_label(attr);
        let truss = &idx.attr[attr as usize];
        let mut edges: Vec<(EdgeId, u32)> = truss.edges.iter().map(|(&e, &t)| (e, t)).collect();
        edges.sort_unstable();
        w.begin(format!("ATTR\t{label}\t{}", edges.len()));
        for (e, t) in edges {
            let (u, v) = g.edge(e);
            w.row(&[u as u64, v as u64, t as u64]);
        }
        w.end();
        let inv = &idx.inverted[attr as usize];
        w.begin(format!("INV\t{label}\t{}", inv.len()));
        for &(v, t) in inv {
            w.row(&[v as u64, t as u64, truss.vertices[&v] as u64]);
        }
        w.end();
    }
    writeln!(w.out, "END\t{}", g.num_attrs()).unwrap();
    w.out
}

pub fn save(g: &Graph, idx: &AtIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_text(g, idx)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<(Graph, AtIndex)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;
    from_text(&text)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptIndex(msg.into())
}

struct Reader<'a> {
    lines: std::str::Lines<'a>,
}

struct Section<'a> {
    header: Vec<&'a str>,
    rows: Vec<Vec<u64>>,
}

impl<'a> Reader<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        self.lines
            .next()
            .ok_or_else(|| corrupt("unexpected end of file"))
    }

    /// Reads one section whose header starts with `name`; the last header
    /// field is the row count.
    fn section(&mut self, header_line: &'a str, width: usize) -> Result<Section<'a>> {
        let header: Vec<&str> = header_line.split('\t').collect();
        let name = header[0];
        let count: usize = header
            .last()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| corrupt(format!("bad row count in {name} header")))?;
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(header_line.as_bytes());
        hasher.update(b"\n");
        let mut rows = Vec::with_capacity(count);
        for _ in 0..count {
            let line = self.next_line()?;
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
            let row: Vec<u64> = line
                .split('\t')
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| corrupt(format!("non-integer row in {name}")))?;
            if row.len() != width {
                return Err(corrupt(format!("row of width {} in {name}", row.len())));
            }
            rows.push(row);
        }
        let crc_line = self.next_line()?;
        let stored = crc_line
            .strip_prefix("CRC\t")
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .ok_or_else(|| corrupt(format!("missing checksum after {name}")))?;
        if stored != hasher.finalize() {
            let label = if header.len() > 2 {
                format!("{name} {}", header[1])
            } else {
                name.to_owned()
            };
            return Err(Error::IndexChecksum(label));
        }
        Ok(Section { header, rows })
    }

    fn expect_section(&mut self, name: &str, width: usize) -> Result<Section<'a>> {
        let line = self.next_line()?;
        if line.split('\t').next() != Some(name) {
            return Err(corrupt(format!("expected {name} section")));
        }
        self.section(line, width)
    }
}

fn to_u32(x: u64, what: &str) -> Result<u32> {
    u32::try_from(x).map_err(|_| corrupt(format!("{what} out of range")))
}

/// Parses a serialized index back into the graph and the index.
pub fn from_text(text: &str) -> Result<(Graph, AtIndex)> {
    let mut r = Reader {
        lines: text.lines(),
    };
    let head = r.next_line()?;
    let (magic, version) = head.split_once('\t').ok_or_else(|| corrupt("bad header"))?;
    if magic != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version: u32 = version.parse().map_err(|_| corrupt("bad version"))?;
    if version != FORMAT_VERSION {
        return Err(Error::IndexVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }

    let sv = r.expect_section("STRUCT_V", 2)?;
    let n = sv.rows.len();
    let ext_ids: Vec<u64> = sv.rows.iter().map(|r| r[0]).collect();
    let vertex_truss = sv
        .rows
        .iter()
        .map(|r| to_u32(r[1], "trussness"))
        .collect::<Result<Vec<_>>>()?;

    let se = r.expect_section("STRUCT_E", 3)?;
    let mut pairs = Vec::with_capacity(se.rows.len());
    let mut edge_truss = Vec::with_capacity(se.rows.len());
    for row in &se.rows {
        let (u, v) = (to_u32(row[0], "vertex")?, to_u32(row[1], "vertex")?);
        if u >= v || v as usize >= n {
            return Err(corrupt("invalid edge row"));
        }
        if pairs.last().is_some_and(|&last| last >= (u, v)) {
            return Err(corrupt("edges not strictly sorted"));
        }
        pairs.push((u, v));
        edge_truss.push(to_u32(row[2], "trussness")?);
    }
    let mut g = Graph::from_stored(ext_ids, &pairs);
    if (0..n as VertexId).any(|v| g.vertex_of(g.ext_id(v)) != Some(v)) {
        return Err(corrupt("duplicate external ids"));
    }

    let mut attr = Vec::new();
    let mut inverted = Vec::new();
    let mut assignments: Vec<(VertexId, String)> = Vec::new();
    let attr_count;
    loop {
        let line = r.next_line()?;
        if let Some(count) = line.strip_prefix("END\t") {
            attr_count = count
                .parse::<usize>()
                .map_err(|_| corrupt("bad END line"))?;
            break;
        }
        if !line.starts_with("ATTR\t") {
            return Err(corrupt("expected ATTR section"));
        }
        let sa = r.section(line, 3)?;
        if sa.header.len() != 3 {
            return Err(corrupt("bad ATTR header"));
        }
        let label = sa.header[1].to_owned();
        let mut truss = AttrTruss::default();
        for row in &sa.rows {
            let (u, v) = (to_u32(row[0], "vertex")?, to_u32(row[1], "vertex")?);
            let e = g
                .edge_id(u, v)
                .ok_or_else(|| corrupt("ATTR edge not in graph"))?;
            truss.edges.insert(e, to_u32(row[2], "trussness")?);
        }
        let si = r.expect_section("INV", 3)?;
        if si.header.len() != 3 || si.header[1] != label {
            return Err(corrupt("INV section does not match ATTR"));
        }
        let mut list = Vec::with_capacity(si.rows.len());
        for row in &si.rows {
            let v = to_u32(row[0], "vertex")?;
            if v as usize >= n {
                return Err(corrupt("INV vertex out of range"));
            }
            list.push((v, to_u32(row[1], "trussness")?));
            truss.vertices.insert(v, to_u32(row[2], "trussness")?);
            assignments.push((v, label.clone()));
        }
        attr.push(truss);
        inverted.push(list);
    }
    if attr_count != attr.len() {
        return Err(corrupt("attribute count mismatch"));
    }
    if r.lines.next().is_some() {
        return Err(corrupt("trailing data after END"));
    }
    g = g.with_attributes(assignments);
    if g.num_attrs() != attr.len() {
        return Err(corrupt("duplicate attribute labels"));
    }
    let structural = TrussnessMap {
        edge: edge_truss,
        vertex: vertex_truss,
    };
    let tau_max = structural.max();
    Ok((
        g,
        AtIndex {
            structural,
            attr,
            inverted,
            tau_max,
        },
    ))
}
