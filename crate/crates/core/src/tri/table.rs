//! Gluing tables for compact orientable triangulated 3-manifolds, and the
//! validation suite: face-pairing involution, orientability, Euler
//! characteristic, torus-boundary census, and vertex-link checks.

use std::fmt;

use thiserror::Error;

/// The six edges of a tetrahedron as sorted vertex pairs, in the canonical
/// order used for edge-slot indices.
pub const EDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of edge `{a, b}` (unordered) in [`EDGE_PAIRS`].
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGE_PAIRS.iter().position(|&(x, y)| (x, y) == (a, b)).expect("vertex pair")
}

/// The three vertices of face `f` (the face opposite vertex `f`), sorted.
pub fn face_vertices(f: usize) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut k = 0;
    for v in 0..4 {
        if v != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// One face identification: the i-th vertex of the *sorted* source face is
/// sent to vertex `perm[i]` of tetrahedron `tet`, and the images form face
/// `face` of `tet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub face: usize,
    pub perm: [usize; 3],
}

/// A gluing table: one row of four face entries per tetrahedron. `None`
/// marks a boundary face.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Triangulation {
    pub tets: Vec<[Option<Gluing>; 4]>,
}

/// Errors raised by triangulation construction and the topological ops.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("malformed gluing at tet {tet} face {face}: {reason}")]
    BadGluing { tet: usize, face: usize, reason: String },
    #[error("face {face} of tet {tet} is already glued")]
    FaceOccupied { tet: usize, face: usize },
    #[error("edge class carries inconsistent directions (reversed edge)")]
    ReversedEdge,
    #[error("integer overflow in homology computation")]
    Overflow,
    #[error("boundary frame {0} does not exist")]
    NoSuchFrame(usize),
    #[error("slope {0} is not an edge slope of the frame")]
    SlopeNotInFrame(String),
    #[error("frame is not normalized: {0}")]
    FrameNotNormalized(String),
    #[error("frame invariant broken: {0}")]
    FrameInvariant(String),
    #[error("boundary walk failed: {0}")]
    BoundaryWalk(String),
    #[error("triangulation failed validation: {0}")]
    Invalid(String),
    #[error("no filling curve (meridian) is recorded on the frame")]
    MissingMeridian,
    #[error("filling distance {got} is below the minimum {min}")]
    FillDistanceTooSmall { got: u64, min: u64 },
    #[error("resulting Farey distance {got} not greater than required {want}")]
    DistanceTooSmall { got: u64, want: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

/// One boundary component found by the census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryComponent {
    /// Open `(tet, face)` slots in this component.
    pub faces: Vec<(usize, usize)>,
    /// Euler characteristic of the component surface.
    pub euler: i64,
    /// Number of vertices on the component after identification.
    pub vertices: usize,
}

/// Outcome of [`validate`]: accumulated violations plus the invariants that
/// could be computed.
#[derive(Debug, Clone, Default)]
pub struct TriReport {
    pub violations: Vec<String>,
    pub orientable: bool,
    /// χ = V − E + F − T of the pseudo-manifold (0 for a manifold).
    pub euler: i64,
    pub vertex_classes: usize,
    pub edge_classes: usize,
    pub face_classes: usize,
    pub boundary: Vec<BoundaryComponent>,
}

impl TriReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for TriReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            writeln!(
                f,
                "ok: chi={} V={} E={} F={} boundary components={}",
                self.euler,
                self.vertex_classes,
                self.edge_classes,
                self.face_classes,
                self.boundary.len()
            )
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            Ok(())
        }
    }
}

/// Plain union-find with path compression, shared by the class computations.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub(crate) fn class_count(&mut self, n: usize) -> usize {
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Union-find tracking a Z/2 parity (edge direction) relative to the root.
/// `conflict` is set when two members of one class disagree on direction,
/// i.e. the edge class is identified with itself reversed.
#[derive(Debug, Clone)]
pub(crate) struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<u8>,
    pub(crate) conflict: bool,
}

impl ParityUnionFind {
    pub(crate) fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n).collect(), parity: vec![0; n], conflict: false }
    }

    pub(crate) fn find(&mut self, x: usize) -> (usize, u8) {
        if self.parent[x] == x {
            return (x, 0);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= p;
        (root, self.parity[x])
    }

    /// Declare that `a` and `b` differ in direction by `p` (0 same, 1 flipped).
    pub(crate) fn union(&mut self, a: usize, b: usize, p: u8) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa ^ pb != p {
                self.conflict = true;
            }
            return;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ p;
    }
}

impl Triangulation {
    pub fn new() -> Self {
        Triangulation { tets: Vec::new() }
    }

    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    /// Append an unglued tetrahedron, returning its index.
    pub fn add_tet(&mut self) -> usize {
        self.tets.push([None; 4]);
        self.tets.len() - 1
    }

    pub fn is_boundary_face(&self, t: usize, f: usize) -> bool {
        self.tets[t][f].is_none()
    }

    /// All open `(tet, face)` slots, in table order.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, row) in self.tets.iter().enumerate() {
            for (f, entry) in row.iter().enumerate() {
                if entry.is_none() {
                    out.push((t, f));
                }
            }
        }
        out
    }

    /// Glue face `f` of tet `t` to face `f2` of tet `t2`, sending the sorted
    /// vertices of face `f` to `images`. Installs both directions of the
    /// involution. Fails if either face is occupied or the images do not
    /// form face `f2`.
    pub fn glue(
        &mut self,
        t: usize,
        f: usize,
        t2: usize,
        f2: usize,
        images: [usize; 3],
    ) -> Result<(), TriError> {
        let bad = |reason: &str| TriError::BadGluing { tet: t, face: f, reason: reason.into() };
        if t >= self.tets.len() || t2 >= self.tets.len() || f > 3 || f2 > 3 {
            return Err(bad("tet or face index out of range"));
        }
        if t == t2 && f == f2 {
            return Err(bad("cannot glue a face to itself"));
        }
        let mut sorted = images;
        sorted.sort_unstable();
        if sorted != face_vertices(f2) {
            return Err(bad(&format!("images {images:?} do not form face {f2} of tet {t2}")));
        }
        if self.tets[t][f].is_some() {
            return Err(TriError::FaceOccupied { tet: t, face: f });
        }
        if self.tets[t2][f2].is_some() {
            return Err(TriError::FaceOccupied { tet: t2, face: f2 });
        }
        let src = face_vertices(f);
        let mut inverse = [0usize; 3];
        let tgt = face_vertices(f2);
        for (i, &w) in tgt.iter().enumerate() {
            let j = images.iter().position(|&x| x == w).expect("surjective");
            inverse[i] = src[j];
        }
        self.tets[t][f] = Some(Gluing { tet: t2, face: f2, perm: images });
        self.tets[t2][f2] = Some(Gluing { tet: t, face: f, perm: inverse });
        Ok(())
    }

    /// Remove the identification at `(t, f)` (and its mirror).
    pub fn unglue(&mut self, t: usize, f: usize) {
        if let Some(g) = self.tets[t][f].take() {
            self.tets[g.tet][g.face] = None;
        }
    }

    /// The gluing at `(t, f)` extended to all four vertices: vertex `v` of
    /// tet `t` maps to `vertex_map(t,f)[v]` of the partner tet (vertex `f`
    /// maps to the partner's opposite vertex).
    pub fn vertex_map(&self, t: usize, f: usize) -> Option<[usize; 4]> {
        let g = self.tets[t][f]?;
        let mut m = [usize::MAX; 4];
        for (i, &v) in face_vertices(f).iter().enumerate() {
            m[v] = g.perm[i];
        }
        m[f] = g.face;
        Some(m)
    }

    /// Starting at the open face `(t, f)` and the directed edge `a → b` of
    /// that face, walk through the interior around the edge to the *other*
    /// open face bordering the same edge class. Returns `(t', f', a', b')`
    /// with the direction carried through the simplicial maps.
    pub fn boundary_partner(
        &self,
        t: usize,
        f: usize,
        a: usize,
        b: usize,
    ) -> Result<(usize, usize, usize, usize), TriError> {
        if !self.is_boundary_face(t, f) {
            return Err(TriError::BoundaryWalk(format!("({t},{f}) is not a boundary face")));
        }
        if a == b || a == f || b == f || a > 3 || b > 3 {
            return Err(TriError::BoundaryWalk(format!("edge ({a},{b}) not on face {f}")));
        }
        let (mut ct, mut prev, mut ca, mut cb) = (t, f, a, b);
        // Each tetrahedron contains the current edge in exactly two faces;
        // having entered through `prev`, exit through the other one.
        for _ in 0..4 * self.tets.len() + 4 {
            let exit = (0..4)
                .find(|&g| g != ca && g != cb && g != prev)
                .expect("two faces contain an edge");
            match self.vertex_map(ct, exit) {
                None => return Ok((ct, exit, ca, cb)),
                Some(m) => {
                    let g = self.tets[ct][exit].expect("glued");
                    prev = g.face;
                    ct = g.tet;
                    (ca, cb) = (m[ca], m[cb]);
                }
            }
        }
        Err(TriError::BoundaryWalk("walk did not terminate (bad involution)".into()))
    }

    /// Edge classes as a parity union-find over slots `t*6 + edge_index`,
    /// with parity = direction relative to the sorted representative.
    pub(crate) fn edge_classes(&self) -> ParityUnionFind {
        let n = self.tets.len();
        let mut uf = ParityUnionFind::new(6 * n);
        for t in 0..n {
            for f in 0..4 {
                if let Some(m) = self.vertex_map(t, f) {
                    let vs = face_vertices(f);
                    for i in 0..3 {
                        for j in i + 1..3 {
                            let (a, b) = (vs[i], vs[j]);
                            let (a2, b2) = (m[a], m[b]);
                            let g = self.tets[t][f].expect("glued");
                            let p = u8::from(a2 > b2);
                            uf.union(t * 6 + edge_index(a, b), g.tet * 6 + edge_index(a2, b2), p);
                        }
                    }
                }
            }
        }
        uf
    }

    /// Vertex classes as a union-find over slots `t*4 + v`.
    pub(crate) fn vertex_classes(&self) -> UnionFind {
        let n = self.tets.len();
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                if let Some(m) = self.vertex_map(t, f) {
                    let g = self.tets[t][f].expect("glued");
                    for &v in &face_vertices(f) {
                        uf.union(t * 4 + v, g.tet * 4 + m[v]);
                    }
                }
            }
        }
        uf
    }

    /// Face classes as a union-find over slots `t*4 + f`.
    pub(crate) fn face_classes(&self) -> UnionFind {
        let n = self.tets.len();
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                if let Some(g) = self.tets[t][f] {
                    uf.union(t * 4 + f, g.tet * 4 + g.face);
                }
            }
        }
        uf
    }
}

/// Parity (0 even, 1 odd) of a permutation of `{0..3}` given as images.
fn permutation_parity(m: [usize; 4]) -> u8 {
    let mut inversions = 0u8;
    for i in 0..4 {
        for j in i + 1..4 {
            if m[i] > m[j] {
                inversions ^= 1;
            }
        }
    }
    inversions
}

/// Full validation: involution well-formedness, orientability, Euler
/// characteristic, per-component boundary census, vertex links.
pub fn validate(tri: &Triangulation) -> TriReport {
    let mut r = TriReport { orientable: true, ..TriReport::default() };
    let n = tri.tets.len();

    // 1. Involution and permutation well-formedness.
    for t in 0..n {
        for f in 0..4 {
            let Some(g) = tri.tets[t][f] else { continue };
            let mut fail = |why: String| r.violations.push(format!("tet {t} face {f}: {why}"));
            if g.tet >= n || g.face > 3 {
                fail(format!("target ({},{}) out of range", g.tet, g.face));
                continue;
            }
            if (g.tet, g.face) == (t, f) {
                fail("face glued to itself".into());
                continue;
            }
            let mut sorted = g.perm;
            sorted.sort_unstable();
            if sorted != face_vertices(g.face) {
                fail(format!("images {:?} do not form face {} of tet {}", g.perm, g.face, g.tet));
                continue;
            }
            // Mirror entry must be the inverse map.
            match tri.tets[g.tet][g.face] {
                None => fail(format!("mirror entry ({},{}) is empty", g.tet, g.face)),
                Some(h) => {
                    let ok = (h.tet, h.face) == (t, f) && {
                        let m = tri.vertex_map(t, f).expect("glued");
                        let m2 = tri.vertex_map(g.tet, g.face).expect("glued");
                        (0..4).all(|v| m2[m[v]] == v)
                    };
                    if !ok {
                        fail(format!("mirror entry ({},{}) is not the inverse", g.tet, g.face));
                    }
                }
            }
        }
    }
    if !r.violations.is_empty() {
        // Downstream checks assume a well-formed involution.
        return r;
    }

    // 2. Orientability: 2-color tetrahedra so that every gluing's extended
    // permutation is orientation-reversing on labels (odd ⟺ same sign).
    {
        let mut sign = vec![0i8; n];
        for start in 0..n {
            if sign[start] != 0 {
                continue;
            }
            sign[start] = 1;
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                for f in 0..4 {
                    if let Some(m) = tri.vertex_map(t, f) {
                        let g = tri.tets[t][f].expect("glued");
                        let want = if permutation_parity(m) == 1 { sign[t] } else { -sign[t] };
                        if sign[g.tet] == 0 {
                            sign[g.tet] = want;
                            stack.push(g.tet);
                        } else if sign[g.tet] != want {
                            r.orientable = false;
                        }
                    }
                }
            }
        }
        if !r.orientable {
            r.violations.push("triangulation is not orientable".into());
        }
    }

    // 3. Classes and Euler characteristic.
    let mut vuf = tri.vertex_classes();
    let mut euf = tri.edge_classes();
    let mut fuf = tri.face_classes();
    if euf.conflict {
        r.violations.push("an edge class is identified with itself reversed".into());
    }
    r.vertex_classes = vuf.class_count(4 * n);
    r.edge_classes = (0..6 * n).filter(|&i| euf.find(i).0 == i).count();
    r.face_classes = fuf.class_count(4 * n);
    r.euler = r.vertex_classes as i64 - r.edge_classes as i64 + r.face_classes as i64 - n as i64;
    if n > 0 && r.euler != 0 {
        // χ = 0 characterizes compact 3-manifolds whose boundary components
        // are all tori (or empty); non-torus components are flagged below.
        r.violations.push(format!("Euler characteristic is {} (expected 0)", r.euler));
    }

    // 4. Boundary census: pair boundary face-edges by walking around edges,
    // then compute χ per component.
    let bfaces = tri.boundary_faces();
    let nb = bfaces.len();
    let face_idx = |t: usize, f: usize| bfaces.iter().position(|&x| x == (t, f));
    let mut comp = UnionFind::new(nb);
    let mut corner = UnionFind::new(3 * nb); // (face, vertex-position) slots
    let mut edge_pairings_ok = true;
    for (i, &(t, f)) in bfaces.iter().enumerate() {
        let vs = face_vertices(f);
        for ai in 0..3 {
            for bi in ai + 1..3 {
                let (a, b) = (vs[ai], vs[bi]);
                match tri.boundary_partner(t, f, a, b) {
                    Err(e) => {
                        r.violations.push(format!("boundary walk from ({t},{f}) edge ({a},{b}): {e}"));
                        edge_pairings_ok = false;
                    }
                    Ok((t2, f2, a2, b2)) => {
                        if (t2, f2, a2.min(b2), b2.max(a2)) == (t, f, a.min(b), a.max(b)) {
                            r.violations.push(format!(
                                "boundary edge ({a},{b}) of ({t},{f}) is its own partner"
                            ));
                            edge_pairings_ok = false;
                            continue;
                        }
                        let j = face_idx(t2, f2).expect("partner is a boundary face");
                        comp.union(i, j);
                        let vs2 = face_vertices(f2);
                        let pos = |face: &[usize; 3], v: usize| {
                            face.iter().position(|&x| x == v).expect("on face")
                        };
                        corner.union(3 * i + pos(&vs, a), 3 * j + pos(&vs2, a2));
                        corner.union(3 * i + pos(&vs, b), 3 * j + pos(&vs2, b2));
                    }
                }
            }
        }
    }
    if edge_pairings_ok {
        let mut roots: Vec<usize> = (0..nb).map(|i| comp.find(i)).collect();
        let mut uniq = roots.clone();
        uniq.sort_unstable();
        uniq.dedup();
        for root in uniq {
            let members: Vec<usize> =
                (0..nb).filter(|&i| roots[i] == root).collect();
            let fb = members.len();
            if fb % 2 != 0 {
                r.violations.push(format!("boundary component with odd face count {fb}"));
                continue;
            }
            let eb = 3 * fb / 2;
            let mut vcorners: Vec<usize> = members
                .iter()
                .flat_map(|&i| (0..3).map(move |k| 3 * i + k))
                .map(|s| corner.find(s))
                .collect();
            vcorners.sort_unstable();
            vcorners.dedup();
            let vb = vcorners.len();
            let euler = vb as i64 - eb as i64 + fb as i64;
            if euler != 0 {
                r.violations.push(format!(
                    "boundary component with {fb} faces has χ = {euler} (torus required)"
                ));
            }
            r.boundary.push(BoundaryComponent {
                faces: members.iter().map(|&i| bfaces[i]).collect(),
                euler,
                vertices: vb,
            });
        }
        roots.clear();
    }

    // 5. Vertex links: χ(link) must be 2 (interior vertex, sphere link) or
    // 1 (boundary vertex, disk link). Link faces = vertex slots in the
    // class; link edges = corners of face-class representatives; link
    // vertices = endpoints of edge-class representatives.
    {
        let mut link_f = vec![0i64; 4 * n];
        let mut link_e = vec![0i64; 4 * n];
        let mut link_v = vec![0i64; 4 * n];
        let mut on_boundary = vec![false; 4 * n];
        for t in 0..n {
            for v in 0..4 {
                link_f[vuf.find(4 * t + v)] += 1;
            }
            for f in 0..4 {
                let is_root = fuf.find(4 * t + f) == 4 * t + f;
                if is_root {
                    for &v in &face_vertices(f) {
                        link_e[vuf.find(4 * t + v)] += 1;
                    }
                }
                if tri.tets[t][f].is_none() {
                    for &v in &face_vertices(f) {
                        on_boundary[vuf.find(4 * t + v)] = true;
                    }
                }
            }
            for (e, &(a, b)) in EDGE_PAIRS.iter().enumerate() {
                if euf.find(6 * t + e).0 == 6 * t + e {
                    link_v[vuf.find(4 * t + a)] += 1;
                    link_v[vuf.find(4 * t + b)] += 1;
                }
            }
        }
        for s in 0..4 * n {
            if vuf.find(s) != s {
                continue;
            }
            let chi = link_v[s] - link_e[s] + link_f[s];
            let expected = if on_boundary[s] { 1 } else { 2 };
            if chi != expected {
                r.violations.push(format!(
                    "vertex class of slot {s}: link χ = {chi}, expected {expected} ({})",
                    if on_boundary[s] { "boundary" } else { "interior" }
                ));
            }
        }
    }

    r
}
