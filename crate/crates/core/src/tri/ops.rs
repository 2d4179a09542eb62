//! Boundary operations: layering a tetrahedron on a framed torus edge,
//! Fibonacci layering, high-Farey-distance torus gluings, and Dehn filling
//! by a layered solid torus.

use num_bigint::BigInt;

use crate::farey::{farey_distance, fibonacci_pair, FareyTriple, Slope};

use super::frames::{sl, slot, Complex};
use super::table::{face_vertices, validate, TriError};

/// Minimum admissible filling distance for the knotted-port filling.
pub const FILL_MIN_DISTANCE: u64 = 11;

/// How the distance guarantee of a gluing is recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceStatus {
    /// `farey_distance` was evaluated exactly.
    Exact(u64),
    /// The distance exceeds the bound by construction; too large to
    /// evaluate exactly.
    Symbolic,
}

/// Certificate data for one high-distance gluing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueResult {
    /// Tetrahedra added by the Fibonacci layering (2D).
    pub added_tets: u64,
    /// Status of the guarantee `d_F(α₀, image of α₁) > D`.
    pub distance: DistanceStatus,
    /// α₁ expressed in the first frame's basis.
    pub image_alpha: Slope,
}

impl Complex {
    /// Layer a new tetrahedron over the boundary edge of slope `d` on frame
    /// `frame_idx`, flipping that diagonal. The frame is updated in place:
    /// its faces become the two new boundary faces and `d` is replaced by
    /// the opposite diagonal of the surrounding quadrilateral.
    pub fn layer(&mut self, frame_idx: usize, d: &Slope) -> Result<(), TriError> {
        let fr = self.frames.get(frame_idx).ok_or(TriError::NoSuchFrame(frame_idx))?;
        let (ta, fa) = fr.faces[0];
        let vs = face_vertices(fa);
        let mut diag = None;
        for i in 0..3 {
            for j in i + 1..3 {
                if fr.slope_at(ta, fa, vs[i], vs[j]) == Some(d) {
                    diag = Some((vs[i], vs[j]));
                }
            }
        }
        let (u, v) = diag.ok_or_else(|| TriError::SlopeNotInFrame(d.to_string()))?;
        let (tb, fb, u2, v2) = self.tri.boundary_partner(ta, fa, u, v)?;
        if (tb, fb) != fr.faces[1] {
            return Err(TriError::FrameInvariant(format!(
                "diagonal pairs with ({tb},{fb}), not the frame's second face"
            )));
        }
        let a3 = face_vertices(fa).into_iter().find(|&x| x != u && x != v).expect("third vertex");
        let b3 = face_vertices(fb).into_iter().find(|&x| x != u2 && x != v2).expect("third vertex");
        // Move the retained slopes out of the old map instead of cloning:
        // the entries are arbitrarily large integers in deep layerings.
        let mut old = std::mem::take(&mut self.frames[frame_idx].edge_slopes);
        let mut take = |t: usize, f: usize, x: usize, y: usize| {
            old.remove(&slot(t, f, x, y))
                .ok_or_else(|| TriError::FrameInvariant(format!("no slope on ({t},{f}) edge ({x},{y})")))
        };
        let s_au = take(ta, fa, a3, u)?;
        let s_av = take(ta, fa, a3, v)?;
        let s_bu = take(tb, fb, b3, u2)?;
        let s_bv = take(tb, fb, b3, v2)?;
        // Opposite sides of the quadrilateral around the diagonal carry
        // equal slopes on a one-vertex torus.
        if s_au != s_bv || s_av != s_bu {
            return Err(TriError::FrameInvariant(
                "retained slopes around the diagonal are inconsistent".into(),
            ));
        }
        let m = s_au.mediant_unchecked(&s_av);
        let d_new = if &m == d { s_au.anti_mediant_unchecked(&s_av) } else { m };

        let n = self.tri.add_tet();
        self.tri.glue(n, 0, ta, fa, [a3, u, v])?;
        self.tri.glue(n, 1, tb, fb, [b3, u2, v2])?;

        // New boundary faces: (n,2) = {0,1,3}, (n,3) = {0,1,2}; vertex 0 of
        // the new tetrahedron lies over b3, vertex 1 over a3, 2 over u, 3
        // over v. The flipped diagonal is edge {0,1}.
        let fr = &mut self.frames[frame_idx];
        fr.faces = [(n, 2), (n, 3)];
        fr.edge_slopes.clear();
        fr.edge_slopes.insert(slot(n, 2, 0, 1), d_new.clone());
        fr.edge_slopes.insert(slot(n, 2, 0, 3), s_bv);
        fr.edge_slopes.insert(slot(n, 2, 1, 3), s_av.clone());
        fr.edge_slopes.insert(slot(n, 3, 0, 1), d_new);
        fr.edge_slopes.insert(slot(n, 3, 0, 2), s_bu);
        fr.edge_slopes.insert(slot(n, 3, 1, 2), s_au);
        Ok(())
    }

    /// Layer `k` tetrahedra following the Fibonacci sequence of slopes,
    /// starting from the standard triple `(0/1, 1/0, 1/1)`: step `i` flips
    /// the oldest slope `F_{i-1}/F_{i-2}`. Afterwards the frame's triple is
    /// `(F_{k-1}/F_{k-2}, F_k/F_{k-1}, F_{k+1}/F_k)`.
    pub fn layer_fibonacci(&mut self, frame_idx: usize, k: u64) -> Result<(), TriError> {
        let fr = self.frames.get(frame_idx).ok_or(TriError::NoSuchFrame(frame_idx))?;
        if !fr.triple()?.same_slopes(&FareyTriple::standard()) {
            return Err(TriError::FrameNotNormalized(
                "Fibonacci layering requires the standard (0/1, 1/0, 1/1) triple".into(),
            ));
        }
        let mut a = sl(0, 1);
        let mut b = Slope::infinity();
        let mut c = sl(1, 1);
        for _ in 0..k {
            self.layer(frame_idx, &a)?;
            let next = b.mediant_unchecked(&c);
            a = b;
            b = c;
            c = next;
        }
        Ok(())
    }
}

/// Extended Fibonacci slope `F_{k+1}/F_k` for `k ≥ -2` (`F_{-1} = 0`,
/// `F_{-2} = 1`).
fn fib_slope_ext(k: i64) -> Slope {
    match k {
        -2 => sl(0, 1),
        -1 => Slope::infinity(),
        _ => crate::farey::fibonacci_slope(k as u64),
    }
}

/// Glue the torus boundary `frame_a` of `a` to `frame_b` of `b` so that the
/// two reference slopes end up at Farey distance greater than `d_bound`.
///
/// Both frames must be pre-normalized: edge-slope triple `(0/1, 1/0, 1/1)`
/// and reference slope `α ≤ 0` or `∞`. Layers `2·d_bound` tetrahedra on the
/// first frame, then identifies the tori by the simplicial map matching the
/// slope `F_{2D+1}/F_{2D} ↦ 0/1`, `F_{2D}/F_{2D-1} ↦ 1/0`,
/// `F_{2D-1}/F_{2D-2} ↦ 1/1`.
pub fn glue_high_distance(
    mut a: Complex,
    frame_a: usize,
    b: Complex,
    frame_b: usize,
    d_bound: u64,
) -> Result<(Complex, GlueResult), TriError> {
    let frames_before = a.frames.len();
    a.merge(b);
    glue_frames(a, frame_a, frames_before + frame_b, d_bound)
}

/// Same as [`glue_high_distance`], but for two frames that already live in
/// one complex (needed when the assembly graph contains cycles).
pub fn glue_frames(
    mut a: Complex,
    frame_a: usize,
    frame_b: usize,
    d_bound: u64,
) -> Result<(Complex, GlueResult), TriError> {
    if frame_a == frame_b {
        return Err(TriError::FrameInvariant("cannot glue a frame to itself".into()));
    }
    a.validate_frame(frame_a)?;
    a.validate_frame(frame_b)?;
    for i in [frame_a, frame_b] {
        let fr = &a.frames[i];
        if !fr.triple()?.same_slopes(&FareyTriple::standard()) {
            return Err(TriError::FrameNotNormalized(
                "edge-slope triple must be (0/1, 1/0, 1/1)".into(),
            ));
        }
        if !fr.alpha.is_non_positive_or_infinity() {
            return Err(TriError::FrameNotNormalized(format!(
                "reference slope {} must be ≤ 0 or ∞",
                fr.alpha
            )));
        }
    }
    let alpha0 = a.frames[frame_a].alpha.clone();
    let alpha1 = a.frames[frame_b].alpha.clone();

    let d = d_bound;
    a.layer_fibonacci(frame_a, 2 * d)?;

    // Slope correspondence A → B for the identification.
    let di = d as i64;
    let phi = [
        (fib_slope_ext(2 * di), sl(0, 1)),
        (fib_slope_ext(2 * di - 1), Slope::infinity()),
        (fib_slope_ext(2 * di - 2), sl(1, 1)),
    ];

    let a_faces = a.frames[frame_a].faces;
    let b_faces = a.frames[frame_b].faces;
    let mut glued = false;
    for crossed in [false, true] {
        let pairing = if crossed {
            [(a_faces[0], b_faces[1]), (a_faces[1], b_faces[0])]
        } else {
            [(a_faces[0], b_faces[0]), (a_faces[1], b_faces[1])]
        };
        let mut ok = true;
        for &((ta, fa), (tb, fb)) in &pairing {
            let src = face_vertices(fa);
            let mut images = [usize::MAX; 3];
            for (i, &w) in src.iter().enumerate() {
                // w maps to the target-face vertex opposite the edge whose
                // slope is φ(slope of the edge opposite w).
                let opp: Vec<usize> = src.iter().copied().filter(|&x| x != w).collect();
                let s = a.frames[frame_a]
                    .slope_at(ta, fa, opp[0], opp[1])
                    .ok_or_else(|| TriError::FrameInvariant("missing slope in layered frame".into()))?;
                let s2 = &phi
                    .iter()
                    .find(|(from, _)| from == s)
                    .ok_or_else(|| {
                        TriError::FrameInvariant(format!("slope {s} not in the Fibonacci triple"))
                    })?
                    .1;
                let tgt = face_vertices(fb);
                let mut image = None;
                for x in 0..3 {
                    for y in x + 1..3 {
                        if a.frames[frame_b].slope_at(tb, fb, tgt[x], tgt[y]) == Some(s2) {
                            image = Some(
                                tgt.iter().copied().find(|&z| z != tgt[x] && z != tgt[y]).unwrap(),
                            );
                        }
                    }
                }
                images[i] = image.ok_or_else(|| {
                    TriError::FrameInvariant(format!("no edge of slope {s2} on target face"))
                })?;
            }
            a.tri.glue(ta, fa, tb, fb, images)?;
        }
        let rep = validate(&a.tri);
        if rep.is_ok() {
            glued = true;
        } else {
            ok = false;
            for &((ta, fa), _) in &pairing {
                a.tri.unglue(ta, fa);
            }
        }
        if ok {
            break;
        }
    }
    if !glued {
        return Err(TriError::FrameInvariant(
            "face matching fails the orientation/link check in both pairings".into(),
        ));
    }

    // Both frames are consumed.
    let (hi, lo) = if frame_a > frame_b { (frame_a, frame_b) } else { (frame_b, frame_a) };
    a.frames.remove(hi);
    a.frames.remove(lo);

    // α₁ in the A basis: columns are the images of 1/0 and 0/1.
    let (f1, f0) = fibonacci_pair(2 * d); // (F_{2D+1}, F_{2D})
    let fm1 = &f1 - &f0; // F_{2D-1}
    let m: [[BigInt; 2]; 2] = [[-f0.clone(), f1.clone()], [-fm1, f0]];
    let image_alpha = alpha1.transform(&m).expect("unimodular");
    let distance = if d <= 12 {
        let dist = farey_distance(&alpha0, &image_alpha);
        if dist <= d {
            return Err(TriError::DistanceTooSmall { got: dist, want: d });
        }
        DistanceStatus::Exact(dist)
    } else {
        DistanceStatus::Symbolic
    };
    Ok((a, GlueResult { added_tets: 2 * d, distance, image_alpha }))
}

/// Close off the torus boundary `frame_idx` by gluing a one-tetrahedron
/// layered solid torus at Farey distance greater than `min_dist ≥ 11`, so
/// the filling slope γ (image of the solid-torus meridian −1/2) satisfies
/// `d_F(γ, meridian) > min_dist`. Adds `2·min_dist + 1` tetrahedra.
pub fn fill_by_layered_solid_torus(
    mut c: Complex,
    frame_idx: usize,
    min_dist: u64,
) -> Result<(Complex, GlueResult), TriError> {
    if min_dist < FILL_MIN_DISTANCE {
        return Err(TriError::FillDistanceTooSmall { got: min_dist, min: FILL_MIN_DISTANCE });
    }
    let fr = c.frames.get(frame_idx).ok_or(TriError::NoSuchFrame(frame_idx))?;
    let meridian = fr.meridian.clone().ok_or(TriError::MissingMeridian)?;
    // The distance that matters is d_F(γ, meridian); measure it by using
    // the meridian as the reference slope on this side and μ = −1/2 on the
    // solid-torus side.
    c.frames[frame_idx].alpha = meridian;
    let lst = Complex::lst(sl(-1, 2), -1, Some(sl(-1, 2)), None);
    glue_high_distance(c, frame_idx, lst, 0, min_dist)
}
