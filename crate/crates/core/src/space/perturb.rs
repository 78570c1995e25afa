use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{sup_distance, EqualityFamily, TheoryPoint};
use crate::behavior::Direction;
use crate::error::{Error, Result};
use crate::tol;

/// Random tangent direction of a simplex (coordinates sum to zero), scaled
/// to unit sup-norm.
fn tangent_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let norm = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Longest step along `v` from `p` that stays in the simplex.
fn max_step(p: &[f64], v: &[f64]) -> f64 {
    p.iter()
        .zip(v)
        .filter(|(_, &vk)| vk < 0.0)
        .map(|(&pk, &vk)| pk / -vk)
        .fold(f64::INFINITY, f64::min)
}

/// Moves every block by `step(block)` along a random tangent direction,
/// shortened where the simplex boundary is closer.
fn perturb_blocks<R: Rng + ?Sized>(
    p: &TheoryPoint,
    rng: &mut R,
    mut step: impl FnMut(&mut R) -> f64,
) -> Result<TheoryPoint> {
    let mut table = p.table().to_vec();
    for range in p.block_ranges() {
        let block = &p.table()[range.clone()];
        let v = tangent_direction(rng, block.len());
        let target = step(rng);
        // try both orientations, keep the longer feasible step
        let forward = max_step(block, &v);
        let backward = max_step(block, &v.iter().map(|x| -x).collect::<Vec<_>>());
        let (sign, room) = if forward >= backward {
            (1.0, forward)
        } else {
            (-1.0, backward)
        };
        let s = target.min(room);
        if s > 0.0 {
            for (k, idx) in range.enumerate() {
                table[idx] = (block[k] + sign * s * v[k]).max(0.0);
            }
        }
    }
    p.with_table(table)
}

/// Random point within sup-distance `eps` of `p`: each block moves along a
/// uniformly oriented tangent direction by a uniform fraction of `eps`.
pub fn perturb_in_ball(p: &TheoryPoint, eps: f64, seed: u64) -> Result<TheoryPoint> {
    if eps < 0.0 {
        return Err(Error::Precondition(format!("radius {eps} is negative")));
    }
    if eps == 0.0 {
        return Ok(p.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb_blocks(p, &mut rng, |r| eps * r.random::<f64>())
}

/// Random point with every block displaced by exactly `eps` in sup-norm,
/// except where the simplex boundary forces a shorter step.
pub fn perturb_at_distance<R: Rng + ?Sized>(p: &TheoryPoint, eps: f64, rng: &mut R) -> Result<TheoryPoint> {
    if eps < 0.0 {
        return Err(Error::Precondition(format!("radius {eps} is negative")));
    }
    perturb_blocks(p, rng, |_| eps)
}

/// Radius of a sup-norm ball around `p` containing only theories that
/// violate the family: `measure / (2 · width)`.
pub fn openness_radius(p: &TheoryPoint, family: &dyn EqualityFamily) -> f64 {
    let width = family.lipschitz_width(p.behavior());
    if width == 0 {
        return 0.0;
    }
    family.measure(p.behavior()) / (2 * width) as f64
}

/// A theory within sup-distance `eps` of a theory satisfying the family that
/// violates it.
///
/// In one block, mass `min(eps, p)` moves between two entries with the same
/// outcome on one side and different outcomes on the other, leaving the
/// sibling blocks untouched. Moving along the local outcome at fixed remote
/// outcome changes the remote marginal (a signal to the remote region) when
/// a second local context exists; the mirrored move handles the other
/// direction. The entry with the most mass is tried first.
pub fn construct_signaling_perturbation(p: &TheoryPoint, eps: f64, family: &dyn EqualityFamily) -> Result<TheoryPoint> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps {eps} must be positive")));
    }
    let before = family.measure(p.behavior());
    if before > tol::SIG {
        return Err(Error::Precondition(format!(
            "theory already violates the {} equalities by {before:e}",
            family.name()
        )));
    }
    let jb = p.behavior();
    let (local, remote) = (jb.local_contexts(), jb.remote_contexts());

    // (mass, from, to)
    let mut moves: Vec<(f64, usize, usize)> = Vec::new();
    for &direction in family.directions() {
        let has_sibling = match direction {
            Direction::ToRemote => local.len() > 1,
            Direction::ToLocal => remote.len() > 1,
        };
        if !has_sibling {
            continue;
        }
        for w in 0..jb.preparations().len() {
            for e in 0..local.len() {
                for d in 0..remote.len() {
                    let start = jb.block_range(w, e, d).start;
                    let (n, m) = (local[e].len(), remote[d].len());
                    for i in 0..n {
                        for j in 0..m {
                            let from = start + i * m + j;
                            let mass = jb.table()[from];
                            if mass <= 0.0 {
                                continue;
                            }
                            let to = match direction {
                                Direction::ToRemote if m > 1 => start + i * m + (j + 1) % m,
                                Direction::ToLocal if n > 1 => start + ((i + 1) % n) * m + j,
                                _ => continue,
                            };
                            moves.push((mass, from, to));
                        }
                    }
                }
            }
        }
    }
    // stable sort keeps scan order among equal masses
    moves.sort_by(|a, b| b.0.total_cmp(&a.0));

    for (mass, from, to) in moves {
        let mut table = jb.table().to_vec();
        let (a, b) = (table[from], table[to]);
        // rounding can realize a move slightly above eps
        let mut amount = eps.min(mass);
        while amount > 0.0 && (a - (a - amount) > eps || (b + amount) - b > eps) {
            amount = amount.next_down();
        }
        table[from] = a - amount;
        table[to] = b + amount;
        let q = p.with_table(table)?;
        if family.measure(q.behavior()) > 0.0 && sup_distance(p, &q) <= eps {
            return Ok(q);
        }
    }
    Err(Error::Degenerate(
        "no block admits a mass move that breaks the equalities".into(),
    ))
}
