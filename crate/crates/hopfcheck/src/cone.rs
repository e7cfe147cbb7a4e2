//! Extreme rays of the flux cone `ker(N) ∩ ℝ^r_{≥0}`.
//!
//! Positive steady-state flux vectors of a mass-action network live in the
//! intersection of the stoichiometric kernel with the nonnegative orthant —
//! a pointed polyhedral cone. Its extreme rays, collected as the columns of
//! the matrix `E`, are the convex parameters `ℓ` enter through: every
//! positive flux is `E·ℓ` with `ℓ ≥ 0`.
//!
//! The enumeration is exact integer double description run in kernel
//! coordinates: with `K` an integer kernel basis of `N`, the cone is the
//! preimage of `{c : K·c ≥ 0}` under `c ↦ K·c`, and that system is processed
//! one inequality at a time. Lineality present before enough inequalities
//! have been seen is handled by pivoting; adjacency of rays is decided by an
//! exact rank test. Rays are mapped back to flux space, made primitive, and
//! sorted ascending-lexicographically, which fixes a canonical column order
//! for `E` independent of enumeration order.
//!
//! A brute-force enumerator over support subsets doubles as a test oracle,
//! and [`block_form`] verifies the structural relation between the extreme
//! rays of a network and of its motif reduction.

use crate::matrix::{self, IMat, Mat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Errors in cone computations.
#[derive(Debug, thiserror::Error)]
pub enum ConeError {
    /// The enumerator tracks constraint activity in a 64-bit mask.
    #[error("too many reactions for the ray enumerator: {n} exceeds 64")]
    TooManyReactions {
        /// Number of reactions requested.
        n: usize,
    },
    /// Internal invariant failure: the cone was not pointed.
    #[error("internal error: lineality survived constraint processing")]
    LinealityRemained,
    /// A structural expectation about extreme-ray matrices failed.
    #[error("extreme-ray structure mismatch: {reason}")]
    Structure {
        /// What did not match.
        reason: String,
    },
}

/// The extreme rays of a flux cone, columns in canonical ascending-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeRays {
    /// Reactions × rays matrix `E`; primitive integer columns.
    pub e: IMat,
}

impl ExtremeRays {
    /// Number of rays.
    pub fn count(&self) -> usize {
        self.e.cols()
    }

    /// Support (set of reactions with positive flux) of each ray.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        (0..self.e.cols())
            .map(|c| {
                (0..self.e.rows())
                    .filter(|&r| !self.e.at(r, c).is_zero())
                    .collect()
            })
            .collect()
    }

    /// Reactions carrying zero flux on every ray (never active at a positive
    /// steady state of the cone's relative interior).
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.e.rows())
            .filter(|&r| (0..self.e.cols()).all(|c| self.e.at(r, c).is_zero()))
            .collect()
    }

    /// Finds the ray whose support is exactly `support`, if present.
    pub fn ray_with_support(&self, support: &[usize]) -> Option<usize> {
        let want: Vec<usize> = {
            let mut s = support.to_vec();
            s.sort_unstable();
            s
        };
        self.supports().into_iter().position(|s| s == want)
    }
}

/// Computes the extreme rays of `ker(N) ∩ ℝ^r_{≥0}` for a stoichiometric
/// matrix `N` (species × reactions).
pub fn extreme_rays(n: &IMat) -> Result<ExtremeRays, ConeError> {
    let r = n.cols();
    if r > 64 {
        return Err(ConeError::TooManyReactions { n: r });
    }
    let kernel = matrix::kernel_basis(n);
    let d = kernel.cols();
    if d == 0 {
        return Ok(ExtremeRays {
            e: Mat::from_fn(r, 0, |_, _| BigInt::zero()),
        });
    }
    // Constraints: row i of the kernel basis, as a functional on c-space.
    let constraints: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..d).map(|j| kernel.at(i, j).clone()).collect())
        .collect();

    let mut lineality: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();
    struct Ray {
        v: Vec<BigInt>,
        active: u64, // bit i set ⇔ processed constraint i is tight
    }
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();

    for (ci, a) in constraints.iter().enumerate() {
        if a.iter().all(Zero::is_zero) {
            // 0 ≥ 0: trivially satisfied, and trivially tight everywhere.
            for ray in &mut rays {
                ray.active |= 1 << ci;
            }
            processed.push(ci);
            continue;
        }
        let dot = |v: &[BigInt]| -> BigInt {
            v.iter().zip(a).map(|(x, y)| x * y).sum()
        };
        // Try to pivot a lineality vector on this constraint.
        let pivot = lineality.iter().position(|l| !dot(l).is_zero());
        if let Some(pi) = pivot {
            let mut l0 = lineality.remove(pi);
            let mut s0 = dot(&l0);
            if s0.is_negative() {
                for x in &mut l0 {
                    *x = -x.clone();
                }
                s0 = -s0;
            }
            for l in &mut lineality {
                let sl = dot(l);
                if !sl.is_zero() {
                    let combined: Vec<BigInt> = l
                        .iter()
                        .zip(&l0)
                        .map(|(x, y)| x * &s0 - y * &sl)
                        .collect();
                    *l = reduce_gcd(&combined);
                }
            }
            for ray in &mut rays {
                let sr = dot(&ray.v);
                if !sr.is_zero() {
                    let combined: Vec<BigInt> = ray
                        .v
                        .iter()
                        .zip(&l0)
                        .map(|(x, y)| x * &s0 - y * &sr)
                        .collect();
                    ray.v = reduce_gcd(&combined);
                }
                // Every adjusted ray lands exactly on the new hyperplane;
                // earlier activities are unchanged because the pivot vector
                // was orthogonal to all processed constraints.
                ray.active |= 1 << ci;
            }
            // The pivot vector was orthogonal to every processed constraint,
            // so all of them are tight at the new ray; only the current one
            // is strict.
            let mut act = 0u64;
            for &i in &processed {
                act |= 1 << i;
            }
            rays.push(Ray {
                v: reduce_gcd(&l0),
                active: act,
            });
            processed.push(ci);
            continue;
        }
        // Constraint is orthogonal to the remaining lineality: classic
        // double-description split of the ray list.
        let lin_dim = lineality.len();
        let mut keep: Vec<Ray> = Vec::new();
        let mut pos: Vec<Ray> = Vec::new();
        let mut neg: Vec<Ray> = Vec::new();
        for mut ray in rays.drain(..) {
            let s = dot(&ray.v);
            if s.is_zero() {
                ray.active |= 1 << ci;
                keep.push(ray);
            } else if s.is_positive() {
                pos.push(ray);
            } else {
                neg.push(ray);
            }
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for p in &pos {
            for q in &neg {
                if !adjacent(&constraints, &processed, p.active & q.active, d, lin_dim) {
                    continue;
                }
                let sp = dot(&p.v);
                let sq = dot(&q.v);
                // sp > 0 > sq: sp·q − sq·p is a conic combination.
                let combined: Vec<BigInt> = p
                    .v
                    .iter()
                    .zip(&q.v)
                    .map(|(x, y)| y * &sp - x * &sq)
                    .collect();
                new_rays.push(Ray {
                    v: reduce_gcd(&combined),
                    active: (p.active & q.active) | (1 << ci),
                });
            }
        }
        rays = keep;
        rays.extend(pos);
        rays.extend(new_rays);
        processed.push(ci);
    }

    if !lineality.is_empty() {
        return Err(ConeError::LinealityRemained);
    }

    // Map back to flux space, normalize, dedupe, and sort canonically.
    let mut lambda: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|ray| {
            let v: Vec<BigInt> = (0..r)
                .map(|i| {
                    (0..d)
                        .map(|j| kernel.at(i, j) * &ray.v[j])
                        .sum::<BigInt>()
                })
                .collect();
            primitive(&v)
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    debug_assert!(
        lambda.iter().all(|v| v.iter().all(|x| !x.is_negative())),
        "a computed ray left the nonnegative orthant"
    );
    lambda.sort();
    lambda.dedup();
    let e = Mat::from_fn(r, lambda.len(), |row, col| lambda[col][row].clone());
    Ok(ExtremeRays { e })
}

/// Exact adjacency test: the rays' common active set must cut a face of
/// dimension `lineality + 2`.
fn adjacent(
    constraints: &[Vec<BigInt>],
    processed: &[usize],
    common: u64,
    dim: usize,
    lin_dim: usize,
) -> bool {
    let rows: Vec<Vec<BigInt>> = processed
        .iter()
        .filter(|&&i| common & (1 << i) != 0)
        .map(|&i| constraints[i].clone())
        .collect();
    let need = dim - lin_dim - 2;
    if rows.len() < need {
        return false;
    }
    let m = Mat::from_rows(rows);
    matrix::rank(&m) == need
}

/// Divides out the content, keeping the direction. Safe on direction-
/// sensitive vectors mid-enumeration.
fn reduce_gcd(v: &[BigInt]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut gcd = BigInt::zero();
    for x in v {
        gcd = gcd.gcd(x);
    }
    if gcd.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &gcd).collect()
}

/// Canonical primitive form for output columns: content one, first nonzero
/// entry positive.
fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut out = reduce_gcd(v);
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -x.clone();
            }
        }
    }
    out
}

/// Brute-force extreme-ray enumeration by minimal positive supports.
///
/// A vector is an extreme ray of `ker(N) ∩ ℝ^r_{≥0}` exactly when its
/// support `S` is minimal among nonzero member supports — equivalently, the
/// columns `N_S` have a one-dimensional kernel spanned by a strictly
/// positive vector, and no smaller support works. Exponential in `r`;
/// intended as an oracle for small networks.
pub fn brute_force_rays(n: &IMat) -> Result<ExtremeRays, ConeError> {
    let r = n.cols();
    if r > 20 {
        return Err(ConeError::TooManyReactions { n: r });
    }
    let mut found: Vec<(Vec<usize>, Vec<BigInt>)> = Vec::new();
    for mask in 1u32..(1u32 << r) {
        let support: Vec<usize> = (0..r).filter(|&i| mask & (1 << i) != 0).collect();
        // Skip supersets of an already-found support: not minimal.
        if found
            .iter()
            .any(|(s, _)| s.iter().all(|i| support.contains(i)))
        {
            continue;
        }
        let all_rows: Vec<usize> = (0..n.rows()).collect();
        let sub = n.submatrix(&all_rows, &support);
        let kernel = matrix::kernel_basis(&sub);
        if kernel.cols() != 1 {
            continue;
        }
        let col = kernel.col(0);
        let all_pos = col.iter().all(|x| x.is_positive());
        let all_neg = col.iter().all(|x| x.is_negative());
        if !(all_pos || all_neg) {
            continue;
        }
        let mut full = vec![BigInt::zero(); r];
        for (idx, &pos) in support.iter().enumerate() {
            full[pos] = if all_pos {
                col[idx].clone()
            } else {
                -col[idx].clone()
            };
        }
        found.push((support, primitive(&full)));
    }
    let mut lambda: Vec<Vec<BigInt>> = found.into_iter().map(|(_, v)| v).collect();
    lambda.sort();
    lambda.dedup();
    let e = Mat::from_fn(r, lambda.len(), |row, col| lambda[col][row].clone());
    Ok(ExtremeRays { e })
}

/// How the extreme rays of a network decompose against those of its motif
/// reduction.
///
/// Deleting the backward reaction of a motif removes exactly one ray — the
/// two-cycle through the binding and unbinding reactions — and puts the
/// rest in bijection with the reduced network's rays (zero-padded at the
/// deleted coordinate). `block_form` verifies this and records the column
/// correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockForm {
    /// Column of the full matrix holding the binding/unbinding two-cycle.
    pub motif_col: usize,
    /// `full_col_for_reduced[j]` = column of the full matrix matching
    /// reduced column `j` after deleting the backward row.
    pub full_col_for_reduced: Vec<usize>,
    /// Row (reaction index in the full network) of the backward reaction.
    pub backward_row: usize,
}

impl BlockForm {
    /// Splits per-ray values of the full network into (reduced-aligned,
    /// motif) parts.
    pub fn split_values<T: Clone>(&self, full: &[T]) -> (Vec<T>, T) {
        let reduced: Vec<T> = self
            .full_col_for_reduced
            .iter()
            .map(|&c| full[c].clone())
            .collect();
        (reduced, full[self.motif_col].clone())
    }

    /// Reassembles full-network per-ray values from the parts.
    pub fn merge_values<T: Clone>(&self, reduced: &[T], motif: &T) -> Vec<T> {
        let total = reduced.len() + 1;
        let mut out: Vec<Option<T>> = vec![None; total];
        for (j, &c) in self.full_col_for_reduced.iter().enumerate() {
            out[c] = Some(reduced[j].clone());
        }
        out[self.motif_col] = Some(motif.clone());
        out.into_iter().map(|x| x.expect("column covered")).collect()
    }
}

/// Verifies the block decomposition of `e_full` (extreme rays of a network
/// with a motif) against `e_reduced` (extreme rays after deleting the
/// backward reaction at row `backward`, with `forward` the binding row).
pub fn block_form(
    e_full: &IMat,
    e_reduced: &IMat,
    forward: usize,
    backward: usize,
) -> Result<BlockForm, ConeError> {
    let r = e_full.rows();
    if e_reduced.rows() != r - 1 {
        return Err(ConeError::Structure {
            reason: format!(
                "reduced matrix has {} rows, expected {}",
                e_reduced.rows(),
                r - 1
            ),
        });
    }
    if e_full.cols() != e_reduced.cols() + 1 {
        return Err(ConeError::Structure {
            reason: format!(
                "expected one extra ray in the full network ({} vs {})",
                e_full.cols(),
                e_reduced.cols()
            ),
        });
    }
    // Exactly one full column may use the backward reaction, and it must be
    // the two-cycle through forward and backward.
    let users: Vec<usize> = (0..e_full.cols())
        .filter(|&c| !e_full.at(backward, c).is_zero())
        .collect();
    let [motif_col] = users[..] else {
        return Err(ConeError::Structure {
            reason: format!(
                "{} rays use the backward reaction, expected exactly 1",
                users.len()
            ),
        });
    };
    for row in 0..r {
        let expected = u32::from(row == forward || row == backward);
        if *e_full.at(row, motif_col) != BigInt::from(expected) {
            return Err(ConeError::Structure {
                reason: "the backward-using ray is not the binding two-cycle".into(),
            });
        }
    }
    // Match the remaining columns to reduced columns after dropping the
    // backward row.
    let drop_row = |c: usize| -> Vec<BigInt> {
        (0..r)
            .filter(|&row| row != backward)
            .map(|row| e_full.at(row, c).clone())
            .collect()
    };
    let reduced_cols: Vec<Vec<BigInt>> = (0..e_reduced.cols()).map(|c| e_reduced.col(c)).collect();
    let mut used = vec![false; reduced_cols.len()];
    let mut full_col_for_reduced = vec![usize::MAX; reduced_cols.len()];
    for c in 0..e_full.cols() {
        if c == motif_col {
            continue;
        }
        let v = drop_row(c);
        let Some(j) = reduced_cols
            .iter()
            .enumerate()
            .position(|(j, rc)| !used[j] && *rc == v)
        else {
            return Err(ConeError::Structure {
                reason: format!("full ray in column {c} has no counterpart after reduction"),
            });
        };
        used[j] = true;
        full_col_for_reduced[j] = c;
    }
    Ok(BlockForm {
        motif_col,
        full_col_for_reduced,
        backward_row: backward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rays_as_rows(e: &ExtremeRays) -> Vec<Vec<i64>> {
        (0..e.e.cols())
            .map(|c| {
                (0..e.e.rows())
                    .map(|r| {
                        let x = e.e.at(r, c);
                        let s: String = x.to_string();
                        s.parse().unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn triangle_cycle() {
        // A → B → C → A: one ray, the full cycle.
        let n = IMat::from_i64_rows(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
        let e = extreme_rays(&n).unwrap();
        assert_eq!(rays_as_rows(&e), vec![vec![1, 1, 1]]);
        assert_eq!(e.zero_rows(), Vec::<usize>::new());
    }

    #[test]
    fn reversible_pair_and_cycle() {
        // A ⇌ B (k1, k2) and B → A (k3): rays = pair (1,1,0) and cycle
        // (1,0,1).
        let n = IMat::from_i64_rows(&[&[-1, 1, 1], &[1, -1, -1]]);
        let e = extreme_rays(&n).unwrap();
        assert_eq!(rays_as_rows(&e), vec![vec![1, 0, 1], vec![1, 1, 0]]);
    }

    #[test]
    fn no_positive_flux() {
        // A → B irreversibly: kernel is trivial.
        let n = IMat::from_i64_rows(&[&[-1], &[1]]);
        let e = extreme_rays(&n).unwrap();
        assert_eq!(e.count(), 0);
    }

    #[test]
    fn zero_row_detected() {
        // A ⇌ B plus an irreversible C → D that can never balance.
        let n = IMat::from_i64_rows(&[
            &[-1, 1, 0],
            &[1, -1, 0],
            &[0, 0, -1],
            &[0, 0, 1],
        ]);
        let e = extreme_rays(&n).unwrap();
        assert_eq!(e.count(), 1);
        assert_eq!(e.zero_rows(), vec![2]);
    }

    #[test]
    fn matches_brute_force_on_random_networks() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..40 {
            let rows = rng.gen_range(2..5);
            let cols = rng.gen_range(2..7);
            let m = Mat::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-2i64..=2)));
            let fast = extreme_rays(&m).unwrap();
            let slow = brute_force_rays(&m).unwrap();
            assert_eq!(fast.e, slow.e, "mismatch on {m:?}");
        }
    }

    #[test]
    fn support_lookup() {
        let n = IMat::from_i64_rows(&[&[-1, 1, 1], &[1, -1, -1]]);
        let e = extreme_rays(&n).unwrap();
        assert_eq!(e.ray_with_support(&[0, 1]), Some(1));
        assert_eq!(e.ray_with_support(&[0, 2]), Some(0));
        assert_eq!(e.ray_with_support(&[1, 2]), None);
    }

    #[test]
    fn block_form_round_trip() {
        // Full: A ⇌ B (rows 0, 1) and B → C → A (rows 2, 3).
        let n_full = IMat::from_i64_rows(&[
            &[-1, 1, 0, 1],
            &[1, -1, -1, 0],
            &[0, 0, 1, -1],
        ]);
        let e_full = extreme_rays(&n_full).unwrap();
        // Reduced: drop the backward reaction (row 1).
        let n_red = IMat::from_i64_rows(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
        let e_red = extreme_rays(&n_red).unwrap();
        let bf = block_form(&e_full.e, &e_red.e, 0, 1).unwrap();
        assert_eq!(e_full.supports()[bf.motif_col], vec![0, 1]);
        let (vals, motif) = bf.split_values(&["a", "b"].map(String::from));
        let merged = bf.merge_values(&vals, &motif);
        assert_eq!(merged, ["a", "b"].map(String::from));
    }
}
