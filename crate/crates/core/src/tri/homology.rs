//! Simplicial first homology of a gluing table over ℤ, via Smith normal
//! form of the boundary maps on identified cells.

use serde::{Deserialize, Serialize};

use super::table::{edge_index, face_vertices, TriError, Triangulation, EDGE_PAIRS};

/// H₁ as rank plus torsion invariant factors (each > 1, in divisibility
/// order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Descriptor {
    pub rank: u64,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl H1Descriptor {
    pub fn free(rank: u64) -> Self {
        H1Descriptor { rank, torsion: Vec::new() }
    }
}

/// First homology H₁(M; ℤ) of the identified complex.
///
/// Errors with [`TriError::ReversedEdge`] if some edge class is identified
/// with itself reversed (the quotient is not a simplicial complex in the
/// sense needed here), and with [`TriError::Overflow`] if the Smith normal
/// form reduction leaves `i128`.
pub fn homology_h1(tri: &Triangulation) -> Result<H1Descriptor, TriError> {
    let n = tri.tets.len();
    if n == 0 {
        return Ok(H1Descriptor::free(0));
    }
    let mut vuf = tri.vertex_classes();
    let mut euf = tri.edge_classes();
    let mut fuf = tri.face_classes();
    if euf.conflict {
        return Err(TriError::ReversedEdge);
    }

    // Resolve every slot's class root (and edge parity) up front.
    let vroot: Vec<usize> = (0..4 * n).map(|s| vuf.find(s)).collect();
    let eroot: Vec<(usize, u8)> = (0..6 * n).map(|s| euf.find(s)).collect();
    let froot: Vec<usize> = (0..4 * n).map(|s| fuf.find(s)).collect();

    // Index the class representatives.
    let mut vidx = vec![usize::MAX; 4 * n];
    let mut nv = 0;
    for s in 0..4 * n {
        if vroot[s] == s {
            vidx[s] = nv;
            nv += 1;
        }
    }
    let mut eidx = vec![usize::MAX; 6 * n];
    let mut ne = 0;
    for s in 0..6 * n {
        if eroot[s].0 == s {
            eidx[s] = ne;
            ne += 1;
        }
    }
    let fcount = (0..4 * n).filter(|&s| froot[s] == s).count();

    // Oriented edge class of slot (t, {a,b}) read in direction a → b:
    // (class index, sign relative to the representative's direction).
    let oriented_edge = |t: usize, a: usize, b: usize| -> (usize, i128) {
        let flip = a > b;
        let (root, parity) = eroot[6 * t + edge_index(a, b)];
        let sign = if (parity == 1) ^ flip { -1 } else { 1 };
        (eidx[root], sign)
    };

    // ∂₁ : C₁ → C₀, one row per vertex class, one column per edge class.
    let mut d1 = vec![vec![0i128; ne]; nv];
    for t in 0..n {
        for (e, &(a, b)) in EDGE_PAIRS.iter().enumerate() {
            if eroot[6 * t + e].0 != 6 * t + e {
                continue;
            }
            let (col, _) = oriented_edge(t, a, b);
            d1[vidx[vroot[4 * t + b]]][col] += 1;
            d1[vidx[vroot[4 * t + a]]][col] -= 1;
        }
    }

    // ∂₂ : C₂ → C₁, one row per edge class, one column per face class.
    let mut d2 = vec![vec![0i128; fcount]; ne];
    let mut col = 0;
    for t in 0..n {
        for f in 0..4 {
            if froot[4 * t + f] != 4 * t + f {
                continue;
            }
            let [x, y, z] = face_vertices(f);
            for (sign, (a, b)) in [(1i128, (y, z)), (-1, (x, z)), (1, (x, y))] {
                let (row, s) = oriented_edge(t, a, b);
                d2[row][col] += sign * s;
            }
            col += 1;
        }
    }

    let r1 = smith_normal_form(&mut d1)?;
    let snf2 = smith_normal_form(&mut d2)?;
    let r2 = snf2.len();
    let rank = ne
        .checked_sub(r1.len())
        .and_then(|x| x.checked_sub(r2))
        .ok_or(TriError::Overflow)? as u64;
    let torsion: Vec<u64> = snf2
        .iter()
        .filter(|&&d| d > 1)
        .map(|&d| u64::try_from(d).map_err(|_| TriError::Overflow))
        .collect::<Result<_, _>>()?;
    Ok(H1Descriptor { rank, torsion })
}

/// In-place Smith normal form over ℤ with checked `i128` arithmetic.
/// Returns the nonzero diagonal (invariant factors, positive, each
/// dividing the next).
fn smith_normal_form(m: &mut [Vec<i128>]) -> Result<Vec<i128>, TriError> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        // Pivot: smallest-magnitude nonzero entry in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        // Clear row and column k by Euclidean steps.
        loop {
            let mut clean = true;
            for i in k + 1..rows {
                if m[i][k] != 0 {
                    let q = m[i][k].div_euclid(m[k][k]);
                    sub_row(m, i, k, q, k, cols)?;
                    if m[i][k] != 0 {
                        m.swap(i, k);
                        clean = false;
                    }
                }
            }
            for j in k + 1..cols {
                if m[k][j] != 0 {
                    let q = m[k][j].div_euclid(m[k][k]);
                    sub_col(m, j, k, q, k, rows)?;
                    if m[k][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(j, k);
                        }
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        // Divisibility: the pivot must divide every remaining entry.
        let p = m[k][k];
        if let Some((i, _)) = (k + 1..rows)
            .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| m[i][j] % p != 0)
        {
            // Fold the offending row into row k and redo this pivot.
            for j in k..cols {
                m[k][j] = m[k][j].checked_add(m[i][j]).ok_or(TriError::Overflow)?;
            }
            continue;
        }
        diag.push(p.abs());
        k += 1;
    }
    Ok(diag)
}

/// `row[i] -= q * row[src]` over columns `from..cols`.
fn sub_row(m: &mut [Vec<i128>], i: usize, src: usize, q: i128, from: usize, cols: usize) -> Result<(), TriError> {
    for j in from..cols {
        let d = q.checked_mul(m[src][j]).ok_or(TriError::Overflow)?;
        m[i][j] = m[i][j].checked_sub(d).ok_or(TriError::Overflow)?;
    }
    Ok(())
}

/// `col[j] -= q * col[src]` over rows `from..rows`.
fn sub_col(m: &mut [Vec<i128>], j: usize, src: usize, q: i128, from: usize, rows: usize) -> Result<(), TriError> {
    for i in from..rows {
        let d = q.checked_mul(m[i][src]).ok_or(TriError::Overflow)?;
        m[i][j] = m[i][j].checked_sub(d).ok_or(TriError::Overflow)?;
    }
    Ok(())
}
