//! End-to-end reduction: CNF formula → block graph → assembled
//! triangulated manifold, with a machine-checkable certificate recording
//! counts, distances, the tetrahedron budget, and the genus claim.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blockgraph::{build_block_graph, structural_check, BlockCensus, BlockGraph, BlockType};
use crate::farey::Slope;
use crate::formula::Formula;
use crate::splitting::{assignment_from_coloring, min_genus, MinGenus, SplittingError};
use crate::tri::{
    fill_by_layered_solid_torus, glue_frames, homology_h1, parse_manifest, parse_tri_text,
    validate, BlockData, BoundaryFrame, Complex, DistanceStatus, TriError, FILL_MIN_DISTANCE,
};

/// Default Euler characteristic assumed for a frame's designated surface.
pub const DEFAULT_CHI_S: i64 = -1;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("formula is not in CNF")]
    NotCnf,
    #[error("block graph failed structural checks: {0:?}")]
    Structural(Vec<String>),
    #[error("frame has positive chi_S = {0}")]
    PositiveChi(i64),
    #[error("block library has no entry for {0}")]
    MissingBlock(BlockType),
    #[error("block data for {block}: {reason}")]
    BadBlockData { block: BlockType, reason: String },
    #[error("assembly lost track of port {0}")]
    LostPort(String),
    #[error("tetrahedron count {got} exceeds the budget {budget}")]
    BudgetExceeded { got: u64, budget: u64 },
    #[error(transparent)]
    Tri(#[from] TriError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error("io: {0}")]
    Io(String),
}

/// `K = 24 (1 − 3χ(S₀) − 3χ(S₁))` for the two surfaces framed on the glued
/// boundary components; both Euler characteristics must be ≤ 0.
pub fn compute_k(a: &BoundaryFrame, b: &BoundaryFrame) -> Result<u64, CompileError> {
    for chi in [a.chi_s, b.chi_s] {
        if chi > 0 {
            return Err(CompileError::PositiveChi(chi));
        }
    }
    Ok((24 * (1 - 3 * a.chi_s - 3 * b.chi_s)) as u64)
}

/// Budget `T (|Q|+1) + 3 K (|Q|+1)(|Q|+2)`: per-block tetrahedra plus the
/// layered tetrahedra of at most `(3/2)(|Q|+1)` gluings of `2·K(|Q|+2)`
/// tetrahedra each.
pub fn tet_budget(q_len: u64, t_max: u64, k_max: u64) -> u64 {
    t_max * (q_len + 1) + 3 * k_max * (q_len + 1) * (q_len + 2)
}

// ---------------------------------------------------------------------------
// Block library
// ---------------------------------------------------------------------------

/// Name of the extra NOT-block frame that gets Dehn filled.
pub const KNOT_PORT: &str = "knot";

/// A source of per-type block data.
pub struct BlockLibrary {
    templates: BTreeMap<BlockType, BlockData>,
    /// False for the abstract stand-in blocks; true for externally
    /// supplied (concrete) block data.
    pub authentic: bool,
}

pub const ALL_BLOCK_TYPES: [BlockType; 6] = [
    BlockType::Var,
    BlockType::Rep,
    BlockType::Not,
    BlockType::And,
    BlockType::Or,
    BlockType::End,
];

fn file_stem(t: BlockType) -> &'static str {
    match t {
        BlockType::Var => "var",
        BlockType::Rep => "rep",
        BlockType::Not => "not",
        BlockType::And => "and",
        BlockType::Or => "or",
        BlockType::End => "end",
    }
}

impl BlockLibrary {
    /// The abstract stand-in library: one standalone one-vertex torus
    /// (a one-tetrahedron layered solid torus) per port, so the layering,
    /// gluing, and certificate pipeline runs end to end without authentic
    /// block interiors. The NOT block carries an additional `knot` frame
    /// with meridian ∞ that the compiler fills.
    pub fn abstract_library() -> BlockLibrary {
        let mu = Slope::reduce(-1, 2).unwrap();
        let mut templates = BTreeMap::new();
        for t in ALL_BLOCK_TYPES {
            let mut complex = Complex::default();
            for p in 0..t.n_ports() {
                let stand_in =
                    Complex::lst(mu.clone(), DEFAULT_CHI_S, None, Some(format!("p{p}")));
                complex.merge(stand_in);
            }
            if t == BlockType::Not {
                let knotted = Complex::lst(
                    mu.clone(),
                    DEFAULT_CHI_S,
                    Some(Slope::infinity()),
                    Some(KNOT_PORT.to_string()),
                );
                complex.merge(knotted);
            }
            let rank = complex.frames.len() as u64;
            templates.insert(
                t,
                BlockData { complex, declared_h1: crate::tri::H1Descriptor::free(rank) },
            );
        }
        BlockLibrary { templates, authentic: false }
    }

    /// Load a library from a directory holding `<type>.tri` and
    /// `<type>.json` for each block type. Every block is checked: the
    /// table validates, the frames validate, computed H₁ matches the
    /// declared one, and ports `p0..` are all present.
    pub fn load_dir(dir: &Path) -> Result<BlockLibrary, CompileError> {
        let mut templates = BTreeMap::new();
        for t in ALL_BLOCK_TYPES {
            let stem = file_stem(t);
            let read = |ext: &str| {
                std::fs::read_to_string(dir.join(format!("{stem}.{ext}")))
                    .map_err(|e| CompileError::Io(format!("{stem}.{ext}: {e}")))
            };
            let tri = parse_tri_text(&read("tri")?)?;
            let (frames, declared_h1) = parse_manifest(&read("json")?)?;
            let complex = Complex { tri, frames };
            let bad = |reason: String| CompileError::BadBlockData { block: t, reason };
            let rep = validate(&complex.tri);
            if !rep.is_ok() {
                return Err(bad(format!("{rep}")));
            }
            complex.validate_frames()?;
            let computed = homology_h1(&complex.tri)?;
            if computed != declared_h1 {
                return Err(bad(format!(
                    "declared H1 (rank {}) differs from computed (rank {})",
                    declared_h1.rank, computed.rank
                )));
            }
            for p in 0..t.n_ports() {
                if !complex.frames.iter().any(|f| f.port.as_deref() == Some(&format!("p{p}")[..])) {
                    return Err(bad(format!("missing port frame p{p}")));
                }
            }
            if t == BlockType::Not
                && !complex.frames.iter().any(|f| f.port.as_deref() == Some(KNOT_PORT))
            {
                return Err(bad("missing knot frame".into()));
            }
            templates.insert(t, BlockData { complex, declared_h1 });
        }
        Ok(BlockLibrary { templates, authentic: true })
    }

    pub fn get(&self, t: BlockType) -> Result<&BlockData, CompileError> {
        self.templates.get(&t).ok_or(CompileError::MissingBlock(t))
    }
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum DistanceRecord {
    /// Farey distance evaluated exactly.
    Exact(u64),
    /// Exceeds the bound by the Fibonacci-layering construction; too large
    /// to evaluate.
    Symbolic,
}

impl From<DistanceStatus> for DistanceRecord {
    fn from(s: DistanceStatus) -> Self {
        match s {
            DistanceStatus::Exact(d) => DistanceRecord::Exact(d),
            DistanceStatus::Symbolic => DistanceRecord::Symbolic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingRecord {
    pub from_block: usize,
    pub from_port: usize,
    pub to_block: usize,
    pub to_port: usize,
    pub k: u64,
    pub d: u64,
    pub layered_tets: u64,
    pub distance: DistanceRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingRecord {
    pub block: usize,
    pub min_dist: u64,
    pub added_tets: u64,
    pub distance: DistanceRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinGenusRecord {
    /// `"exact"` (witness found) or `"lower-bound"`.
    pub kind: String,
    pub genus: u64,
    /// Satisfying assignment extracted from the witness splitting.
    pub witness_assignment: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusClaim {
    pub claim: String,
    pub genus_if_satisfiable: u64,
    /// Present when the block count admits the exhaustive splitting search.
    pub min_genus: Option<MinGenusRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub formula: String,
    pub formula_sha256: String,
    pub q_len: u64,
    pub census: BlockCensus,
    pub block_tet_max: u64,
    pub k_max: u64,
    pub fillings: Vec<FillingRecord>,
    pub gluings: Vec<GluingRecord>,
    pub tet_count: u64,
    pub tet_budget: u64,
    pub genus: GenusClaim,
    /// True only when the block interiors are externally supplied; the
    /// abstract stand-in mode is not topologically authentic.
    pub authentic: bool,
    /// Why Farey distance certifies the curve-complex distance hypothesis.
    pub distance_model: String,
}

/// The assembled manifold plus its certificate and the intermediate graph.
pub struct CompileResult {
    pub complex: Complex,
    pub block_graph: BlockGraph,
    pub certificate: Certificate,
}

pub fn formula_sha256(f: &Formula) -> String {
    let mut h = Sha256::new();
    h.update(f.to_string().as_bytes());
    let mut out = String::new();
    for b in h.finalize() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

/// Compile a CNF formula to the reduction manifold.
///
/// Builds the block graph, instantiates one block copy per node (NOT
/// blocks have their knotted frame pre-filled at distance
/// [`FILL_MIN_DISTANCE`]), then glues every block-graph edge with a
/// high-distance torus gluing at `D = K(|Q|+2)`, and emits the
/// certificate. Tetrahedron count is O(|Q|²) and asserted against the
/// budget.
pub fn compile(f: &Formula, lib: &BlockLibrary) -> Result<CompileResult, CompileError> {
    compile_with(f, lib, None)
}

/// [`compile`] with an explicit override for the per-gluing constant `K`
/// (otherwise computed from the glued frames' surfaces).
pub fn compile_with(
    f: &Formula,
    lib: &BlockLibrary,
    k_override: Option<u64>,
) -> Result<CompileResult, CompileError> {
    if !f.is_cnf() {
        return Err(CompileError::NotCnf);
    }
    let bg = build_block_graph(f);
    let report = structural_check(&bg);
    if !report.is_ok() {
        return Err(CompileError::Structural(report.violations));
    }
    let q_len = f.length();

    let mut assembled = Complex::default();
    let mut fillings = Vec::new();
    let mut block_tet_max = 0u64;
    for b in &bg.blocks {
        let data = lib.get(b.block_type)?;
        let mut c = data.complex.clone();
        // Preprocessing: fill the NOT block's knotted boundary at the
        // constant minimum distance, keeping per-block size constant.
        if let Some(ki) = c.frames.iter().position(|fr| fr.port.as_deref() == Some(KNOT_PORT)) {
            let (filled, res) = fill_by_layered_solid_torus(c, ki, FILL_MIN_DISTANCE)?;
            c = filled;
            fillings.push(FillingRecord {
                block: b.id,
                min_dist: FILL_MIN_DISTANCE,
                added_tets: res.added_tets + 1,
                distance: res.distance.into(),
            });
        }
        block_tet_max = block_tet_max.max(c.tri.tet_count() as u64);
        // Tag every port frame with its global address.
        for fr in &mut c.frames {
            let Some(p) = fr.port.as_deref().and_then(|p| p.strip_prefix('p')) else {
                return Err(CompileError::BadBlockData {
                    block: b.block_type,
                    reason: format!("unexpected frame port {:?}", fr.port),
                });
            };
            let p: usize = p
                .parse()
                .map_err(|_| CompileError::LostPort(format!("b{}.{:?}", b.id, fr.port)))?;
            fr.port = Some(format!("b{}.p{}", b.id, p));
        }
        assembled.merge(c);
    }

    let find_frame = |assembled: &Complex, block: usize, port: usize| {
        let tag = format!("b{block}.p{port}");
        assembled
            .frames
            .iter()
            .position(|fr| fr.port.as_deref() == Some(&tag[..]))
            .ok_or_else(|| CompileError::LostPort(tag))
    };

    let mut gluings = Vec::new();
    let mut k_max = 0u64;
    for e in &bg.edges {
        let fu = find_frame(&assembled, e.from.block, e.from.port)?;
        let fv = find_frame(&assembled, e.to.block, e.to.port)?;
        let k = match k_override {
            Some(k) => k,
            None => compute_k(&assembled.frames[fu], &assembled.frames[fv])?,
        };
        k_max = k_max.max(k);
        let d = k * (q_len + 2);
        let (next, res) = glue_frames(assembled, fu, fv, d)?;
        assembled = next;
        gluings.push(GluingRecord {
            from_block: e.from.block,
            from_port: e.from.port,
            to_block: e.to.block,
            to_port: e.to.port,
            k,
            d,
            layered_tets: res.added_tets,
            distance: res.distance.into(),
        });
    }
    if !assembled.frames.is_empty() {
        return Err(CompileError::LostPort(format!(
            "{} port frames left unglued",
            assembled.frames.len()
        )));
    }

    let tet_count = assembled.tri.tet_count() as u64;
    let budget = tet_budget(q_len, block_tet_max, k_max);
    if tet_count > budget {
        return Err(CompileError::BudgetExceeded { got: tet_count, budget });
    }

    let min_genus_record = match min_genus(&bg) {
        Ok(MinGenus::Exact { genus, witness }) => {
            let a = assignment_from_coloring(&bg, &witness)?;
            Some(MinGenusRecord {
                kind: "exact".into(),
                genus,
                witness_assignment: Some(a.values().to_vec()),
            })
        }
        Ok(MinGenus::LowerBound { genus }) => {
            Some(MinGenusRecord { kind: "lower-bound".into(), genus, witness_assignment: None })
        }
        Err(SplittingError::TooManyBlocks(..)) => None,
        Err(e) => return Err(e.into()),
    };

    let certificate = Certificate {
        formula: f.to_string(),
        formula_sha256: formula_sha256(f),
        q_len,
        census: bg.census(),
        block_tet_max,
        k_max,
        fillings,
        gluings,
        tet_count,
        tet_budget: budget,
        genus: GenusClaim {
            claim: format!(
                "the amalgamated manifold has Heegaard genus {} iff the formula is satisfiable",
                q_len + 2
            ),
            genus_if_satisfiable: q_len + 2,
            min_genus: min_genus_record,
        },
        authentic: lib.authentic,
        distance_model: "curve-complex distance on a torus is Farey-graph distance of slopes; \
                         each gluing's distance bound is certified on slopes in the glued frame's basis"
            .into(),
    };

    Ok(CompileResult { complex: assembled, block_graph: bg, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_expr;
    use crate::tri::H1Descriptor;

    fn small() -> Formula {
        parse_expr("a & b").unwrap() // |Q| = 3: 2 occurrences + 1 and
    }

    #[test]
    fn abstract_library_shapes() {
        let lib = BlockLibrary::abstract_library();
        assert!(!lib.authentic);
        assert_eq!(lib.get(BlockType::Var).unwrap().complex.frames.len(), 1);
        assert_eq!(lib.get(BlockType::Or).unwrap().complex.frames.len(), 3);
        let not = lib.get(BlockType::Not).unwrap();
        assert_eq!(not.complex.frames.len(), 3);
        assert_eq!(not.complex.tri.tet_count(), 3);
        assert!(not.complex.frames.iter().any(|f| f.port.as_deref() == Some(KNOT_PORT)));
        for t in ALL_BLOCK_TYPES {
            let data = lib.get(t).unwrap();
            assert!(validate(&data.complex.tri).is_ok());
            data.complex.validate_frames().unwrap();
            assert_eq!(homology_h1(&data.complex.tri).unwrap(), data.declared_h1);
        }
    }

    #[test]
    fn compute_k_default() {
        let lib = BlockLibrary::abstract_library();
        let a = &lib.get(BlockType::Var).unwrap().complex.frames[0];
        assert_eq!(compute_k(a, a).unwrap(), 168);
        let mut pos = a.clone();
        pos.chi_s = 1;
        assert!(matches!(compute_k(a, &pos), Err(CompileError::PositiveChi(1))));
    }

    #[test]
    fn compile_small_formula() {
        let lib = BlockLibrary::abstract_library();
        let f = small();
        assert_eq!(f.length(), 3);
        let out = compile(&f, &lib).unwrap();
        let cert = &out.certificate;
        assert_eq!(cert.q_len, 3);
        assert_eq!(cert.census.total() as u64, cert.q_len + 1);
        // a & b: VAR a, VAR b, AND, END → 4 blocks; ports 1+1+3+1 = 6 → 3 gluings.
        assert_eq!(cert.gluings.len(), 3);
        assert_eq!(cert.k_max, 168);
        assert!(cert.fillings.is_empty());
        assert!(!cert.authentic);
        // Every gluing layers 2·K(|Q|+2) tets at D = 168·5 = 840.
        assert!(cert.gluings.iter().all(|g| g.d == 840 && g.layered_tets == 1680));
        assert_eq!(cert.tet_count, 6 + 3 * 1680);
        assert!(cert.tet_count <= cert.tet_budget);
        assert!(out.complex.tri.boundary_faces().is_empty());
        assert!(validate(&out.complex.tri).is_ok());
        // Satisfiable, 4 blocks ≤ search limit → exact genus |Q|+2.
        let mg = cert.genus.min_genus.as_ref().unwrap();
        assert_eq!((mg.kind.as_str(), mg.genus), ("exact", 5));
        assert_eq!(mg.witness_assignment, Some(vec![true, true]));
    }

    #[test]
    fn compile_with_not_records_filling() {
        let lib = BlockLibrary::abstract_library();
        let f = parse_expr("~a").unwrap(); // |Q| = 2: 1 occurrence + 1 not
        let out = compile(&f, &lib).unwrap();
        let cert = &out.certificate;
        assert_eq!(cert.q_len, 2);
        assert_eq!(cert.fillings.len(), 1);
        assert_eq!(cert.fillings[0].added_tets, 23);
        assert_eq!(cert.fillings[0].min_dist, 11);
        assert!(matches!(cert.fillings[0].distance, DistanceRecord::Exact(d) if d > 11));
        // NOT block after preprocessing: 3 LSTs + 23 = 26 tets.
        assert_eq!(cert.block_tet_max, 26);
        assert!(validate(&out.complex.tri).is_ok());
        // ~a alone is satisfiable (a = false).
        let mg = cert.genus.min_genus.as_ref().unwrap();
        assert_eq!(mg.kind, "exact");
        assert_eq!(mg.witness_assignment, Some(vec![false]));
    }

    #[test]
    fn compile_rejects_non_cnf() {
        let lib = BlockLibrary::abstract_library();
        let f = parse_expr("~(a & b)").unwrap();
        assert!(matches!(compile(&f, &lib), Err(CompileError::NotCnf)));
    }

    #[test]
    fn certificate_serializes() {
        let lib = BlockLibrary::abstract_library();
        let out = compile(&small(), &lib).unwrap();
        let json = serde_json::to_string_pretty(&out.certificate).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, out.certificate);
    }

    #[test]
    fn library_round_trips_through_a_directory() {
        use crate::tri::{render_manifest, render_tri_text};
        let lib = BlockLibrary::abstract_library();
        let dir = std::env::temp_dir().join(format!("sat2tri-lib-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        for t in ALL_BLOCK_TYPES {
            let data = lib.get(t).unwrap();
            let stem = file_stem(t);
            std::fs::write(dir.join(format!("{stem}.tri")), render_tri_text(&data.complex.tri))
                .unwrap();
            std::fs::write(
                dir.join(format!("{stem}.json")),
                render_manifest(&data.complex.frames, &data.declared_h1),
            )
            .unwrap();
        }
        let loaded = BlockLibrary::load_dir(&dir).unwrap();
        assert!(loaded.authentic);
        for t in ALL_BLOCK_TYPES {
            assert_eq!(
                loaded.get(t).unwrap().complex.tri,
                lib.get(t).unwrap().complex.tri
            );
        }
        // A corrupted declared H1 is rejected.
        std::fs::write(
            dir.join("var.json"),
            render_manifest(
                &lib.get(BlockType::Var).unwrap().complex.frames,
                &H1Descriptor::free(7),
            ),
        )
        .unwrap();
        assert!(matches!(
            BlockLibrary::load_dir(&dir),
            Err(CompileError::BadBlockData { block: BlockType::Var, .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }
}
