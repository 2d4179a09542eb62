//! Serialization: a plain-text gluing-table format and a JSON block
//! manifest carrying boundary frames and the declared first homology.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::farey::Slope;

use super::frames::{BoundaryFrame, EdgeSlot};
use super::homology::H1Descriptor;
use super::table::{Gluing, TriError, Triangulation};

/// Render the gluing table: header `tri <tet_count>`, then one line per
/// tetrahedron with four entries, each `-` (boundary) or `t:f:abc` where
/// `abc` are the images of the sorted source-face vertices.
pub fn render_tri_text(tri: &Triangulation) -> String {
    let mut out = format!("tri {}\n", tri.tet_count());
    for row in &tri.tets {
        let entries: Vec<String> = row
            .iter()
            .map(|e| match e {
                None => "-".to_string(),
                Some(g) => format!("{}:{}:{}{}{}", g.tet, g.face, g.perm[0], g.perm[1], g.perm[2]),
            })
            .collect();
        out.push_str(&entries.join(" "));
        out.push('\n');
    }
    out
}

/// Parse the format produced by [`render_tri_text`]. Structural validation
/// (involution, orientability, …) is left to [`super::validate`].
pub fn parse_tri_text(text: &str) -> Result<Triangulation, TriError> {
    let err = |m: String| TriError::Parse(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| err("empty input".into()))?;
    let count: usize = header
        .strip_prefix("tri ")
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| err(format!("bad header {header:?}")))?;
    let mut tri = Triangulation::new();
    for t in 0..count {
        let line = lines.next().ok_or_else(|| err(format!("missing row for tet {t}")))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != 4 {
            return Err(err(format!("tet {t}: expected 4 entries, got {}", entries.len())));
        }
        let mut row = [None; 4];
        for (f, e) in entries.iter().enumerate() {
            if *e == "-" {
                continue;
            }
            let parts: Vec<&str> = e.split(':').collect();
            let bad = || err(format!("tet {t} face {f}: bad entry {e:?}"));
            if parts.len() != 3 || parts[2].len() != 3 {
                return Err(bad());
            }
            let tet: usize = parts[0].parse().map_err(|_| bad())?;
            let face: usize = parts[1].parse().map_err(|_| bad())?;
            let mut perm = [0usize; 3];
            for (i, ch) in parts[2].chars().enumerate() {
                perm[i] = ch.to_digit(10).ok_or_else(bad)? as usize;
            }
            row[f] = Some(Gluing { tet, face, perm });
        }
        tri.tets.push(row);
    }
    if lines.next().is_some() {
        return Err(err("trailing lines after the last tetrahedron".into()));
    }
    Ok(tri)
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    slot: [usize; 4],
    slope: String,
}

#[derive(Serialize, Deserialize)]
struct FrameManifest {
    faces: [[usize; 2]; 2],
    edges: Vec<EdgeEntry>,
    /// The three distinct slopes of the torus (the Farey triple).
    slopes: Vec<String>,
    alpha: String,
    #[serde(rename = "chi_S")]
    chi_s: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meridian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    port: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    boundary: Vec<FrameManifest>,
    declared_h1: H1Descriptor,
}

/// Render frames and declared H₁ as the JSON block manifest.
pub fn render_manifest(frames: &[BoundaryFrame], h1: &H1Descriptor) -> String {
    let boundary = frames
        .iter()
        .map(|fr| {
            let mut distinct: Vec<String> = Vec::new();
            for s in fr.edge_slopes.values() {
                let txt = s.to_string();
                if !distinct.contains(&txt) {
                    distinct.push(txt);
                }
            }
            FrameManifest {
                faces: fr.faces.map(|(t, f)| [t, f]),
                edges: fr
                    .edge_slopes
                    .iter()
                    .map(|(&(t, f, a, b), s)| EdgeEntry { slot: [t, f, a, b], slope: s.to_string() })
                    .collect(),
                slopes: distinct,
                alpha: fr.alpha.to_string(),
                chi_s: fr.chi_s,
                meridian: fr.meridian.as_ref().map(|s| s.to_string()),
                port: fr.port.clone(),
            }
        })
        .collect();
    serde_json::to_string_pretty(&Manifest { boundary, declared_h1: h1.clone() })
        .expect("manifest serializes")
}

/// Parse a JSON block manifest into frames plus the declared H₁.
pub fn parse_manifest(text: &str) -> Result<(Vec<BoundaryFrame>, H1Descriptor), TriError> {
    let m: Manifest =
        serde_json::from_str(text).map_err(|e| TriError::Parse(format!("manifest: {e}")))?;
    let parse_slope = |s: &str| -> Result<Slope, TriError> {
        s.parse().map_err(|_| TriError::Parse(format!("bad slope {s:?}")))
    };
    let mut frames = Vec::new();
    for fm in &m.boundary {
        let mut edge_slopes: BTreeMap<EdgeSlot, Slope> = BTreeMap::new();
        for e in &fm.edges {
            let [t, f, a, b] = e.slot;
            let slope = parse_slope(&e.slope)?;
            if !fm.slopes.iter().any(|s| parse_slope(s).map(|x| x == slope).unwrap_or(false)) {
                return Err(TriError::Parse(format!(
                    "edge slope {} not listed in the frame's slope triple",
                    e.slope
                )));
            }
            edge_slopes.insert((t, f, a.min(b), a.max(b)), slope);
        }
        frames.push(BoundaryFrame {
            faces: [
                (fm.faces[0][0], fm.faces[0][1]),
                (fm.faces[1][0], fm.faces[1][1]),
            ],
            edge_slopes,
            alpha: parse_slope(&fm.alpha)?,
            chi_s: fm.chi_s,
            meridian: fm.meridian.as_deref().map(parse_slope).transpose()?,
            port: fm.port.clone(),
        });
    }
    Ok((frames, m.declared_h1))
}
