//! One-vertex torus boundary frames: the bookkeeping that ties boundary
//! edges of a gluing table to slopes in a fixed homology basis of each
//! torus boundary component.

use std::collections::BTreeMap;

use crate::farey::{FareyTriple, Slope};

use super::homology::H1Descriptor;
use super::table::{face_vertices, Gluing, TriError, Triangulation, UnionFind};

/// Key for a boundary edge slot: `(tet, face, a, b)` with `a < b`.
pub type EdgeSlot = (usize, usize, usize, usize);

pub(crate) fn slot(t: usize, f: usize, a: usize, b: usize) -> EdgeSlot {
    if a < b {
        (t, f, a, b)
    } else {
        (t, f, b, a)
    }
}

/// Shorthand for a small literal slope.
pub(crate) fn sl(p: i64, q: i64) -> Slope {
    Slope::reduce(p, q).expect("nonzero pair")
}

/// A framed one-vertex torus boundary component: its two boundary faces,
/// the slope carried by each boundary edge slot, the reference slope α of
/// the designated essential surface S with Euler characteristic `chi_s`,
/// and optionally a filling curve (meridian) and a port name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFrame {
    pub faces: [(usize, usize); 2],
    pub edge_slopes: BTreeMap<EdgeSlot, Slope>,
    pub alpha: Slope,
    pub chi_s: i64,
    pub meridian: Option<Slope>,
    pub port: Option<String>,
}

impl BoundaryFrame {
    /// The three distinct slopes on this torus, if exactly three exist.
    pub fn triple(&self) -> Result<FareyTriple, TriError> {
        let mut distinct: Vec<&Slope> = Vec::new();
        for s in self.edge_slopes.values() {
            if !distinct.contains(&s) {
                distinct.push(s);
            }
        }
        if distinct.len() != 3 {
            return Err(TriError::FrameInvariant(format!(
                "{} distinct edge slopes (expected 3)",
                distinct.len()
            )));
        }
        let t = FareyTriple(distinct[0].clone(), distinct[1].clone(), distinct[2].clone());
        if !t.is_valid() {
            return Err(TriError::FrameInvariant(format!(
                "edge slopes {}, {}, {} are not a Farey triple",
                t.0, t.1, t.2
            )));
        }
        Ok(t)
    }

    /// Slope at the boundary edge `{a, b}` of face `(t, f)`.
    pub fn slope_at(&self, t: usize, f: usize, a: usize, b: usize) -> Option<&Slope> {
        self.edge_slopes.get(&slot(t, f, a, b))
    }

    /// Shift all tetrahedron indices by `offset` (used when appending one
    /// complex to another).
    pub fn shift(&mut self, offset: usize) {
        for face in &mut self.faces {
            face.0 += offset;
        }
        self.edge_slopes = std::mem::take(&mut self.edge_slopes)
            .into_iter()
            .map(|((t, f, a, b), s)| ((t + offset, f, a, b), s))
            .collect();
    }
}

/// A triangulation together with the frames of (some of) its torus
/// boundary components.
#[derive(Debug, Clone, Default)]
pub struct Complex {
    pub tri: Triangulation,
    pub frames: Vec<BoundaryFrame>,
}

/// A gadget block's triangulated stand-in: a complex whose frames carry
/// port names, plus the H₁ the block's author declares for cross-checking.
#[derive(Debug, Clone)]
pub struct BlockData {
    pub complex: Complex,
    pub declared_h1: H1Descriptor,
}

impl Complex {
    /// The one-tetrahedron layered solid torus LST(1,2,3) with the standard
    /// frame: boundary faces (0,1), (0,2); edge slopes 0/1 on {0,3},
    /// 1/0 on {0,2}/{1,3}, 1/1 on {0,1}/{1,2}/{2,3}; meridian −1/2.
    pub fn lst(alpha: Slope, chi_s: i64, meridian: Option<Slope>, port: Option<String>) -> Complex {
        let mut tri = Triangulation::new();
        tri.add_tet();
        tri.glue(0, 3, 0, 0, [1, 2, 3]).expect("standard LST gluing");
        let zero = sl(0, 1);
        let inf = Slope::infinity();
        let one = sl(1, 1);
        let mut edge_slopes = BTreeMap::new();
        // Face (0,1), vertices {0,2,3}.
        edge_slopes.insert(slot(0, 1, 0, 2), inf.clone());
        edge_slopes.insert(slot(0, 1, 0, 3), zero.clone());
        edge_slopes.insert(slot(0, 1, 2, 3), one.clone());
        // Face (0,2), vertices {0,1,3}.
        edge_slopes.insert(slot(0, 2, 0, 1), one);
        edge_slopes.insert(slot(0, 2, 0, 3), zero);
        edge_slopes.insert(slot(0, 2, 1, 3), inf);
        Complex {
            tri,
            frames: vec![BoundaryFrame {
                faces: [(0, 1), (0, 2)],
                edge_slopes,
                alpha,
                chi_s,
                meridian,
                port,
            }],
        }
    }

    /// Append `other`'s tetrahedra and frames, returning the tetrahedron
    /// index offset applied to them.
    pub fn merge(&mut self, other: Complex) -> usize {
        let offset = self.tri.tets.len();
        for row in other.tri.tets {
            self.tri.tets.push(row.map(|e| {
                e.map(|g| Gluing { tet: g.tet + offset, ..g })
            }));
        }
        for mut fr in other.frames {
            fr.shift(offset);
            self.frames.push(fr);
        }
        offset
    }

    /// Check every frame invariant for frame `idx`: two distinct open
    /// faces, six slope entries matching the face edges, a valid Farey
    /// triple realized on both faces, slope agreement across the boundary
    /// edge pairing, and a one-vertex torus component consisting of exactly
    /// these two faces.
    pub fn validate_frame(&self, idx: usize) -> Result<(), TriError> {
        let fr = self.frames.get(idx).ok_or(TriError::NoSuchFrame(idx))?;
        let err = |m: String| Err(TriError::FrameInvariant(m));
        let [(t0, f0), (t1, f1)] = fr.faces;
        if (t0, f0) == (t1, f1) {
            return err("frame lists the same face twice".into());
        }
        for &(t, f) in &fr.faces {
            if t >= self.tri.tets.len() || f > 3 {
                return err(format!("face ({t},{f}) out of range"));
            }
            if !self.tri.is_boundary_face(t, f) {
                return err(format!("face ({t},{f}) is not a boundary face"));
            }
        }
        if fr.edge_slopes.len() != 6 {
            return err(format!("{} edge-slope entries (expected 6)", fr.edge_slopes.len()));
        }
        let triple = fr.triple()?;
        for &(t, f) in &fr.faces {
            let vs = face_vertices(f);
            let mut face_slopes: Vec<&Slope> = Vec::new();
            for i in 0..3 {
                for j in i + 1..3 {
                    match fr.slope_at(t, f, vs[i], vs[j]) {
                        None => {
                            return err(format!(
                                "missing slope for edge ({},{}) of face ({t},{f})",
                                vs[i], vs[j]
                            ))
                        }
                        Some(s) => face_slopes.push(s),
                    }
                }
            }
            for s in &face_slopes {
                if !triple.contains(s) {
                    return err(format!("slope {s} on face ({t},{f}) outside the triple"));
                }
            }
            if face_slopes[0] == face_slopes[1]
                || face_slopes[0] == face_slopes[2]
                || face_slopes[1] == face_slopes[2]
            {
                return err(format!("face ({t},{f}) repeats a slope"));
            }
        }
        // Boundary pairing: every edge slot of one face pairs with a slot
        // of the other frame face carrying the same slope, and corner
        // identifications leave a single vertex.
        let mut corners = UnionFind::new(6); // 3 corners per frame face
        let corner_id = |fi: usize, f: usize, v: usize| {
            3 * fi + face_vertices(f).iter().position(|&x| x == v).expect("corner on face")
        };
        for (fi, &(t, f)) in fr.faces.iter().enumerate() {
            let vs = face_vertices(f);
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (vs[i], vs[j]);
                    let (t2, f2, a2, b2) = self.tri.boundary_partner(t, f, a, b)?;
                    let Some(fj) = fr.faces.iter().position(|&x| x == (t2, f2)) else {
                        return err(format!(
                            "edge ({a},{b}) of ({t},{f}) pairs with ({t2},{f2}), outside the frame"
                        ));
                    };
                    if (fj, slot(t2, f2, a2, b2)) == (fi, slot(t, f, a, b)) {
                        return err(format!("edge ({a},{b}) of ({t},{f}) pairs with itself"));
                    }
                    let s1 = fr.slope_at(t, f, a, b).expect("checked above");
                    let s2 = fr.slope_at(t2, f2, a2, b2).ok_or_else(|| {
                        TriError::FrameInvariant(format!(
                            "partner edge ({a2},{b2}) of ({t2},{f2}) has no slope"
                        ))
                    })?;
                    if s1 != s2 {
                        return err(format!(
                            "slope mismatch across boundary pairing: {s1} vs {s2}"
                        ));
                    }
                    corners.union(corner_id(fi, f, a), corner_id(fj, f2, a2));
                    corners.union(corner_id(fi, f, b), corner_id(fj, f2, b2));
                }
            }
        }
        if corners.class_count(6) != 1 {
            return err(format!(
                "boundary component has {} vertices (one-vertex torus required)",
                corners.class_count(6)
            ));
        }
        Ok(())
    }

    /// Validate all frames.
    pub fn validate_frames(&self) -> Result<(), TriError> {
        for i in 0..self.frames.len() {
            self.validate_frame(i)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tri::table::validate;

    fn standard_lst() -> Complex {
        Complex::lst(sl(-1, 2), -1, Some(sl(-1, 2)), None)
    }

    #[test]
    fn lst_frame_validates() {
        let c = standard_lst();
        assert!(validate(&c.tri).is_ok());
        c.validate_frame(0).unwrap();
        let triple = c.frames[0].triple().unwrap();
        assert!(triple.same_slopes(&FareyTriple::standard()));
    }

    #[test]
    fn frame_rejects_wrong_slopes() {
        let mut c = standard_lst();
        // Break the pairing consistency: perturb one entry.
        let key = slot(0, 1, 0, 3);
        c.frames[0].edge_slopes.insert(key, sl(1, 2));
        assert!(c.validate_frame(0).is_err());
    }

    #[test]
    fn frame_rejects_non_boundary_face() {
        let mut c = standard_lst();
        c.frames[0].faces[0] = (0, 0); // glued face
        assert!(matches!(c.validate_frame(0), Err(TriError::FrameInvariant(_))));
    }

    #[test]
    fn merge_shifts_tets_and_frames() {
        let mut a = standard_lst();
        let b = standard_lst();
        let off = a.merge(b);
        assert_eq!(off, 1);
        assert_eq!(a.tri.tet_count(), 2);
        assert_eq!(a.frames.len(), 2);
        assert_eq!(a.frames[1].faces, [(1, 1), (1, 2)]);
        assert!(validate(&a.tri).is_ok());
        a.validate_frames().unwrap();
        let g = a.tri.tets[1][3].unwrap();
        assert_eq!(g.tet, 1);
    }
}
