//! Labeled 2-complexes: Euler characteristic, surface and orientability
//! checks, components, and builders for identification data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    /// Reference direction: from `ends[0]` to `ends[1]`.
    pub ends: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub edge: String,
    /// `+1` traverses the edge along its reference direction, `-1` against it.
    pub dir: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: String,
    pub walk: Vec<WalkStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complex2 {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
}

/// Index form of a validated complex.
struct Indexed {
    nv: usize,
    ends: Vec<[usize; 2]>,
    /// Per face: `(edge, forward)`.
    walks: Vec<Vec<(usize, bool)>>,
}

impl Complex2 {
    /// Checks that ids are unique, edge ends are declared vertices, and every
    /// face boundary is a closed walk.
    pub fn validate(&self) -> Result<()> {
        self.indexed().map(|_| ())
    }

    fn indexed(&self) -> Result<Indexed> {
        let mut vid = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vid.insert(v.as_str(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate vertex {v:?}")));
            }
        }
        let mut eid = HashMap::new();
        let mut ends = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if eid.insert(e.id.as_str(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate edge {:?}", e.id)));
            }
            let look = |v: &String| {
                vid.get(v.as_str())
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("edge {:?} ends at unknown vertex {v:?}", e.id)))
            };
            ends.push([look(&e.ends[0])?, look(&e.ends[1])?]);
        }
        let mut fids = BTreeSet::new();
        let mut walks = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            if !fids.insert(f.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate face {:?}", f.id)));
            }
            if f.walk.is_empty() {
                return Err(Error::InvalidArgument(format!("face {:?} has an empty boundary", f.id)));
            }
            let mut w = Vec::with_capacity(f.walk.len());
            for s in &f.walk {
                let e = *eid
                    .get(s.edge.as_str())
                    .ok_or_else(|| Error::InvalidArgument(format!("face {:?} uses unknown edge {:?}", f.id, s.edge)))?;
                let fwd = match s.dir {
                    1 => true,
                    -1 => false,
                    d => return Err(Error::InvalidArgument(format!("face {:?}: direction {d} is not +-1", f.id))),
                };
                w.push((e, fwd));
            }
            for i in 0..w.len() {
                let (a, b) = (w[i], w[(i + 1) % w.len()]);
                if head(&ends, a) != tail(&ends, b) {
                    return Err(Error::InvalidArgument(format!("boundary of face {:?} is not a closed walk", f.id)));
                }
            }
            walks.push(w);
        }
        Ok(Indexed { nv: self.vertices.len(), ends, walks })
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

fn tail(ends: &[[usize; 2]], (e, fwd): (usize, bool)) -> usize {
    ends[e][if fwd { 0 } else { 1 }]
}

fn head(ends: &[[usize; 2]], (e, fwd): (usize, bool)) -> usize {
    ends[e][if fwd { 1 } else { 0 }]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub euler: i64,
    pub closed_surface: bool,
    pub orientable: bool,
    pub connected: bool,
    /// `(2 - euler) / 2` for closed connected orientable surfaces.
    pub genus: Option<i64>,
    /// `2 - euler` (number of cross-caps) for closed connected non-orientable surfaces.
    pub nonorientable_genus: Option<i64>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Component index of every vertex (vertices joined by edges; faces only
/// touch vertices of their boundary edges, which are already joined).
fn vertex_components(ix: &Indexed) -> (usize, Vec<usize>) {
    let mut d = Dsu::new(ix.nv);
    for [a, b] in &ix.ends {
        d.union(*a, *b);
    }
    let mut label = HashMap::new();
    let comp: Vec<usize> = (0..ix.nv)
        .map(|v| {
            let r = d.find(v);
            let n = label.len();
            *label.entry(r).or_insert(n)
        })
        .collect();
    (label.len(), comp)
}

/// Every edge occurs exactly twice in face boundaries and every vertex link
/// is one cycle.
fn is_closed_surface(ix: &Indexed) -> bool {
    let ne = ix.ends.len();
    let mut uses = vec![0usize; ne];
    for w in &ix.walks {
        for &(e, _) in w {
            uses[e] += 1;
        }
    }
    if ix.nv == 0 || uses.iter().any(|&u| u != 2) {
        return false;
    }
    // link nodes are edge ends (edge, 0|1); corners join the incoming end of
    // one step to the outgoing end of the next
    let node = |e: usize, end: usize| 2 * e + end;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * ne];
    for w in &ix.walks {
        for i in 0..w.len() {
            let (a, b) = (w[i], w[(i + 1) % w.len()]);
            let into = node(a.0, if a.1 { 1 } else { 0 });
            let out = node(b.0, if b.1 { 0 } else { 1 });
            adj[into].push(out);
            adj[out].push(into);
        }
    }
    if adj.iter().any(|a| a.len() != 2) {
        return false;
    }
    // each vertex's link nodes must form a single cycle
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); ix.nv];
    for (e, [a, b]) in ix.ends.iter().enumerate() {
        at_vertex[*a].push(node(e, 0));
        at_vertex[*b].push(node(e, 1));
    }
    let mut seen = vec![false; 2 * ne];
    for nodes in &at_vertex {
        let Some(&first) = nodes.first() else {
            return false;
        };
        let mut count = 0;
        let mut queue = VecDeque::from([first]);
        seen[first] = true;
        while let Some(x) = queue.pop_front() {
            count += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if count != nodes.len() {
            return false;
        }
    }
    true
}

/// Breadth-first face orientation: two faces sharing an edge must traverse it
/// in opposite directions after orientation. Edges used more than twice make
/// the complex non-orientable.
fn is_orientable(ix: &Indexed) -> bool {
    let mut occ: Vec<Vec<(usize, i8)>> = vec![Vec::new(); ix.ends.len()];
    for (f, w) in ix.walks.iter().enumerate() {
        for &(e, fwd) in w {
            occ[e].push((f, if fwd { 1 } else { -1 }));
        }
    }
    if occ.iter().any(|o| o.len() > 2) {
        return false;
    }
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); ix.walks.len()];
    for o in &occ {
        if let [(f, d), (g, e)] = o[..] {
            if f == g {
                if d == e {
                    return false;
                }
                continue;
            }
            // sign(g) = -d * e * sign(f)
            adj[f].push((g, -d * e));
            adj[g].push((f, -d * e));
        }
    }
    let mut sign = vec![0i8; ix.walks.len()];
    for s in 0..sign.len() {
        if sign[s] != 0 {
            continue;
        }
        sign[s] = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(f) = queue.pop_front() {
            for &(g, rel) in &adj[f] {
                let want = sign[f] * rel;
                if sign[g] == 0 {
                    sign[g] = want;
                    queue.push_back(g);
                } else if sign[g] != want {
                    return false;
                }
            }
        }
    }
    true
}

pub fn surface_report(c: &Complex2) -> Result<SurfaceReport> {
    let ix = c.indexed()?;
    let euler = c.euler_characteristic();
    let closed = is_closed_surface(&ix);
    let orientable = is_orientable(&ix);
    let (ncomp, _) = vertex_components(&ix);
    let connected = ncomp == 1;
    let surface = closed && connected;
    Ok(SurfaceReport {
        v: c.vertices.len(),
        e: c.edges.len(),
        f: c.faces.len(),
        euler,
        closed_surface: closed,
        orientable,
        connected,
        genus: (surface && orientable).then_some((2 - euler) / 2),
        nonorientable_genus: (surface && !orientable).then_some(2 - euler),
    })
}

/// Sub-complexes spanned by the connected components, in order of first vertex.
pub fn connected_components(c: &Complex2) -> Result<Vec<Complex2>> {
    let ix = c.indexed()?;
    let (n, comp) = vertex_components(&ix);
    let mut out = vec![Complex2 { vertices: Vec::new(), edges: Vec::new(), faces: Vec::new() }; n];
    for (v, name) in c.vertices.iter().enumerate() {
        out[comp[v]].vertices.push(name.clone());
    }
    for (e, edge) in c.edges.iter().enumerate() {
        out[comp[ix.ends[e][0]]].edges.push(edge.clone());
    }
    for (f, face) in c.faces.iter().enumerate() {
        let e = ix.walks[f][0].0;
        out[comp[ix.ends[e][0]]].faces.push(face.clone());
    }
    Ok(out)
}

/// Circles with marked points glued at the marked points; arcs join
/// cyclically consecutive marked points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleRecipe {
    pub marked_points: Vec<String>,
    pub circles: Vec<String>,
    pub classes: Vec<CircleClass>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleClass {
    pub name: String,
    pub members: Vec<CirclePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CirclePoint {
    pub circle: String,
    pub point: String,
}

pub fn build_from_circles(r: &CircleRecipe) -> Result<Complex2> {
    let mut class_of: HashMap<(&str, &str), &str> = HashMap::new();
    for cl in &r.classes {
        for m in &cl.members {
            if !r.circles.contains(&m.circle) || !r.marked_points.contains(&m.point) {
                return Err(Error::Transcription(format!("class {} names unknown point {}({})", cl.name, m.circle, m.point)));
            }
            if class_of.insert((&m.circle, &m.point), &cl.name).is_some() {
                return Err(Error::Transcription(format!("{}({}) lies in two classes", m.circle, m.point)));
            }
        }
    }
    let mut edges = Vec::new();
    let np = r.marked_points.len();
    for c in &r.circles {
        for i in 0..np {
            let (p, q) = (&r.marked_points[i], &r.marked_points[(i + 1) % np]);
            let end = |x: &String| {
                class_of
                    .get(&(c.as_str(), x.as_str()))
                    .map(|s| s.to_string())
                    .ok_or_else(|| Error::Transcription(format!("{c}({x}) is in no class")))
            };
            edges.push(Edge { id: format!("{c}[{p},{q}]"), ends: [end(p)?, end(q)?] });
        }
    }
    Ok(Complex2 { vertices: r.classes.iter().map(|c| c.name.clone()).collect(), edges, faces: Vec::new() })
}

/// Copies of one polygon indexed by sign vectors, with edge pairings and
/// vertex classes given up to a sign twist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonRecipe {
    pub group_rank: usize,
    pub face: String,
    pub boundary: Boundary,
    pub edge_pairs: Vec<EdgePair>,
    pub vertex_classes: Vec<VertexClass>,
}

/// Boundary walk: edge `i` runs from vertex `i` to vertex `i + 1` (cyclically).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Boundary {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

/// `edge(eps)` is glued to `mate(twist * eps)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgePair {
    pub edge: String,
    pub mate: String,
    pub twist: Vec<i8>,
}

/// `name(eps) = { vertex(twist * eps) : members }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexClass {
    pub name: String,
    pub members: Vec<ClassMember>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassMember {
    pub vertex: String,
    pub twist: Vec<i8>,
}

type Signs = Vec<i8>;

fn sign_label(name: &str, eps: &[i8]) -> String {
    let s: Vec<&str> = eps.iter().map(|&x| if x > 0 { "+" } else { "-" }).collect();
    format!("{name}({})", s.join(","))
}

fn twist(t: &[i8], eps: &[i8]) -> Signs {
    t.iter().zip(eps).map(|(a, b)| a * b).collect()
}

fn all_signs(rank: usize) -> Vec<Signs> {
    (0..1u32 << rank)
        .map(|bits| (0..rank).map(|j| if bits >> (rank - 1 - j) & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Builds the quotient complex. Each glued edge pair takes its direction from
/// the vertex classes of its endpoints; a pair whose endpoint classes do not
/// match in either direction is reported as a transcription error.
pub fn build_from_polygons(r: &PolygonRecipe) -> Result<Complex2> {
    let nb = r.boundary.vertices.len();
    if r.boundary.edges.len() != nb || nb == 0 {
        return Err(Error::Transcription("boundary needs as many edges as vertices".into()));
    }
    let check_twist = |t: &[i8]| t.len() == r.group_rank && t.iter().all(|x| *x == 1 || *x == -1);
    let vpos: HashMap<&str, usize> = r.boundary.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let epos: HashMap<&str, usize> = r.boundary.edges.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let group = all_signs(r.group_rank);

    let mut vclass: HashMap<(usize, Signs), String> = HashMap::new();
    let mut vnames = Vec::new();
    for eps in &group {
        for cl in &r.vertex_classes {
            let label = sign_label(&cl.name, eps);
            for m in &cl.members {
                if !check_twist(&m.twist) {
                    return Err(Error::Transcription(format!("bad twist in class {}", cl.name)));
                }
                let p = *vpos
                    .get(m.vertex.as_str())
                    .ok_or_else(|| Error::Transcription(format!("class {} names unknown vertex {}", cl.name, m.vertex)))?;
                let key = (p, twist(&m.twist, eps));
                if let Some(prev) = vclass.insert(key, label.clone()) {
                    return Err(Error::Transcription(format!(
                        "vertex {} lies in {prev} and {label}",
                        sign_label(&m.vertex, &twist(&m.twist, eps))
                    )));
                }
            }
            vnames.push(label);
        }
    }
    for eps in &group {
        for (p, v) in r.boundary.vertices.iter().enumerate() {
            if !vclass.contains_key(&(p, eps.clone())) {
                return Err(Error::Transcription(format!("vertex {} is in no class", sign_label(v, eps))));
            }
        }
    }
    let ends_of = |e: usize, eps: &Signs| -> [String; 2] {
        [vclass[&(e, eps.clone())].clone(), vclass[&((e + 1) % nb, eps.clone())].clone()]
    };

    // edge class of each raw edge and its direction relative to the class reference
    let mut eclass: HashMap<(usize, Signs), (String, i8)> = HashMap::new();
    let mut edges = Vec::new();
    for eps in &group {
        for pair in &r.edge_pairs {
            if !check_twist(&pair.twist) {
                return Err(Error::Transcription(format!("bad twist for {}", pair.edge)));
            }
            let look = |x: &str| {
                epos.get(x).copied().ok_or_else(|| Error::Transcription(format!("unknown edge {x}")))
            };
            let (a, b) = (look(&pair.edge)?, look(&pair.mate)?);
            let eps_b = twist(&pair.twist, eps);
            let (ea, eb) = (ends_of(a, eps), ends_of(b, &eps_b));
            let dir = if ea[0] == eb[0] && ea[1] == eb[1] && ea[0] != ea[1] {
                1
            } else if ea[0] == eb[1] && ea[1] == eb[0] && ea[0] != ea[1] {
                -1
            } else {
                return Err(Error::Transcription(format!(
                    "{} with ends {:?} cannot be glued to {} with ends {:?}",
                    sign_label(&pair.edge, eps),
                    ea,
                    sign_label(&pair.mate, &eps_b),
                    eb
                )));
            };
            let label = sign_label(&format!("{}bar", pair.edge), eps);
            for (key, d) in [((a, eps.clone()), 1), ((b, eps_b.clone()), dir)] {
                if let Some((prev, _)) = eclass.insert(key.clone(), (label.clone(), d)) {
                    return Err(Error::Transcription(format!(
                        "edge {} lies in {prev} and {label}",
                        sign_label(&r.boundary.edges[key.0], &key.1)
                    )));
                }
            }
            edges.push(Edge { id: label, ends: ea });
        }
    }
    let mut faces = Vec::new();
    for eps in &group {
        let mut walk = Vec::with_capacity(nb);
        for (i, e) in r.boundary.edges.iter().enumerate() {
            let (label, dir) = eclass
                .get(&(i, eps.clone()))
                .ok_or_else(|| Error::Transcription(format!("edge {} is not glued", sign_label(e, eps))))?;
            walk.push(WalkStep { edge: label.clone(), dir: *dir });
        }
        faces.push(Face { id: sign_label(&r.face, eps), walk });
    }
    Ok(Complex2 { vertices: vnames, edges, faces })
}

const G42_DATA: &str = include_str!("../data/g42.json");
const G52_DATA: &str = include_str!("../data/g52.json");

pub fn g42_recipe() -> CircleRecipe {
    serde_json::from_str(G42_DATA).expect("embedded G(4,2) data parses")
}

pub fn g52_recipe() -> PolygonRecipe {
    serde_json::from_str(G52_DATA).expect("embedded G(5,2) data parses")
}

/// The graph `G(4,2)`: six circles glued at marked points.
pub fn build_g42() -> Result<Complex2> {
    build_from_circles(&g42_recipe())
}

/// The surface `G(5,2)`: sixteen 20-gons glued along their edges.
pub fn build_g52() -> Result<Complex2> {
    build_from_polygons(&g52_recipe())
}
