//! Exhaustive oracles for set functions on finite carriers.
//!
//! Everything here enumerates subsets or set partitions directly from the
//! defining sup formulas. Nothing calls into the fast paths of
//! [`crate::charges`].

use crate::charges::Charge;
use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::measure::Carrier;

/// `ν(E)` for every subset mask `E` of a finite carrier.
pub fn set_values(nu: &Charge) -> Result<Vec<f64>> {
    let n = finite_len(nu.carrier(), 20)?;
    let mut values = vec![0.0; 1 << n];
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        values[mask] = values[mask & (mask - 1)] + nu.mass(low);
    }
    Ok(values)
}

fn finite_len(c: &Carrier, cap: usize) -> Result<usize> {
    if !c.is_finite_points() {
        return Err(Error::WrongCarrierKind { expected: "finite" });
    }
    if c.len() > cap {
        return Err(Error::InvalidArgument(format!(
            "oracle enumeration capped at {cap} points, got {}",
            c.len()
        )));
    }
    Ok(c.len())
}

/// Total variation as the supremum over all set partitions of
/// `Σ_i |ν(A_i)|`, enumerated by restricted growth strings.
pub fn total_variation_by_partitions(nu: &Charge) -> Result<f64> {
    let n = finite_len(nu.carrier(), 10)?;
    if n == 0 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    // block[i] = block index of point i; block[i] <= 1 + max(block[..i])
    let mut block = vec![0usize; n];
    loop {
        let blocks = block.iter().max().unwrap() + 1;
        let mut sums = vec![0.0; blocks];
        for (i, b) in block.iter().enumerate() {
            sums[*b] += nu.mass(i);
        }
        best = best.max(sums.iter().map(|s| s.abs()).sum());

        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            let prefix_max = block[..i].iter().copied().max().unwrap_or(0);
            if i > 0 && block[i] <= prefix_max {
                block[i] += 1;
                for b in block.iter_mut().skip(i + 1) {
                    *b = 0;
                }
                break;
            }
            if i <= 1 {
                return Ok(best);
            }
            i -= 1;
        }
    }
}

/// `ν⁺(A) = sup_{B ⊆ A} ν(B)` for every mask `A`.
pub fn positive_part_by_sup(nu: &Charge) -> Result<Vec<f64>> {
    let values = set_values(nu)?;
    let mut out = vec![0.0; values.len()];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut best = 0.0f64;
        let mut sub = a;
        loop {
            best = best.max(values[sub]);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & a;
        }
        *slot = best;
    }
    Ok(out)
}

/// The three de Giorgi components evaluated on every subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GiorgiTables {
    pub absolutely_continuous: Vec<f64>,
    pub diffuse: Vec<f64>,
    pub singular: Vec<f64>,
}

/// Brute-force evaluation of the three sup formulas for a nonnegative charge.
///
/// * a.c.: `sup { ∫_A u dμ : u ≥ 0, ∫_E u dμ ≤ ν(E) for all E ⊆ A }`. The
///   feasible masses `m_i = u_i μ_i` form a polymatroid cut out by one
///   constraint per subset; it is maximised greedily, checking every subset
///   constraint at each step. Points with `μ_i = 0` contribute nothing for any
///   `u_i`, points with `μ_i = ∞` force `u_i = 0`.
/// * diffuse: `sup { ν(E) : E ⊆ A, every E' ⊆ E with ν(E') > 0 has μ(E') = ∞ }`.
/// * singular: `sup { ν(E) : E ⊆ A, μ(E) = 0 }`.
pub fn de_giorgi_brute_force(nu: &Charge, mu: &Carrier) -> Result<GiorgiTables> {
    let n = finite_len(nu.carrier(), 14)?;
    if mu.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: mu.len(),
        });
    }
    if let Some((point, mass)) = nu.masses().iter().copied().enumerate().find(|(_, m)| *m < 0.0) {
        return Err(Error::SignedCharge { point, mass });
    }
    let size = 1usize << n;
    let values = set_values(nu)?;
    let mut mu_values = vec![ExtReal::ZERO; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        mu_values[mask] = mu_values[mask & (mask - 1)] + mu.weights()[low];
    }

    // a.c. part
    let mut ac = vec![0.0; size];
    let mut allotted = vec![0.0; size];
    for a in 0..size {
        let mut masses = vec![0.0; n];
        for slot in allotted.iter_mut() {
            *slot = 0.0;
        }
        for i in (0..n).filter(|i| a >> i & 1 == 1) {
            let w = mu.weights()[i];
            if w.is_zero() || w == PosInf {
                continue;
            }
            // largest m_i keeping Σ_{j∈E} m_j ≤ ν(E) for every E ⊆ A containing i
            let mut slack = f64::INFINITY;
            let mut sub = a;
            loop {
                if sub >> i & 1 == 1 {
                    slack = slack.min(values[sub] - allotted[sub]);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & a;
            }
            let m = slack.max(0.0);
            masses[i] = m;
            let mut sub = a;
            loop {
                if sub >> i & 1 == 1 {
                    allotted[sub] += m;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & a;
            }
        }
        ac[a] = masses.iter().sum();
    }

    // diffuse-admissible sets
    let admissible: Vec<bool> = (0..size)
        .map(|e| {
            let mut sub = e;
            loop {
                if values[sub] > 0.0 && mu_values[sub] != PosInf {
                    return false;
                }
                if sub == 0 {
                    return true;
                }
                sub = (sub - 1) & e;
            }
        })
        .collect();

    let sup_over = |a: usize, ok: &dyn Fn(usize) -> bool| {
        let mut best = 0.0f64;
        let mut sub = a;
        loop {
            if ok(sub) {
                best = best.max(values[sub]);
            }
            if sub == 0 {
                return best;
            }
            sub = (sub - 1) & a;
        }
    };
    let diffuse = (0..size).map(|a| sup_over(a, &|e| admissible[e])).collect();
    let singular = (0..size).map(|a| sup_over(a, &|e| mu_values[e].is_zero())).collect();

    Ok(GiorgiTables {
        absolutely_continuous: ac,
        diffuse,
        singular,
    })
}
