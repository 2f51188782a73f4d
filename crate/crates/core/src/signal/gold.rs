//! Gold code families built from preferred pairs of maximal-length sequences.

use crate::error::{Error, Result};

/// One user's spreading code: `N` chips, each `±1/√N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingCode {
    chips: Vec<f64>,
    pub user_id: usize,
}

impl SpreadingCode {
    /// Builds a code from binary chips, mapping `0 → +1/√N` and `1 → −1/√N`.
    pub fn from_binary(bits: &[u8], user_id: usize) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::config("spreading code must have at least one chip"));
        }
        let amp = 1.0 / (bits.len() as f64).sqrt();
        let chips = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(amp),
                1 => Ok(-amp),
                other => Err(Error::config(format!("chip value {other} is not binary"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { chips, user_id })
    }

    /// Builds a code from antipodal signs (`+1`/`−1`), normalised to unit energy.
    pub fn from_signs(signs: &[i8], user_id: usize) -> Result<Self> {
        let bits = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(0u8),
                -1 => Ok(1u8),
                other => Err(Error::config(format!("chip sign {other} is not ±1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_binary(&bits, user_id)
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    /// Spreading gain `N`.
    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Chips as integers `±1` (the unnormalised code).
    pub fn signs(&self) -> Vec<i32> {
        self.chips
            .iter()
            .map(|&c| if c > 0.0 { 1 } else { -1 })
            .collect()
    }
}

/// Feedback taps (exponents below the leading term, constant term implied)
/// of the preferred pairs we support.
fn preferred_pair(degree: u32) -> Option<(&'static [u32], &'static [u32])> {
    match degree {
        // x^5 + x^2 + 1  and  x^5 + x^4 + x^3 + x^2 + 1
        5 => Some((&[2], &[4, 3, 2])),
        // x^7 + x^3 + 1  and  x^7 + x^3 + x^2 + x + 1
        7 => Some((&[3], &[3, 2, 1])),
        _ => None,
    }
}

/// One period of the m-sequence with characteristic polynomial
/// `x^degree + Σ x^tap + 1`, started from the all-ones fill.
///
/// The sequence obeys `a[n + degree] = a[n] ⊕ ⨁ a[n + tap]`.
pub fn m_sequence(degree: u32, taps: &[u32]) -> Vec<u8> {
    let n = (1usize << degree) - 1;
    let deg = degree as usize;
    let mut seq = vec![1u8; deg];
    seq.reserve(n);
    while seq.len() < n {
        let base = seq.len() - deg;
        let mut next = seq[base];
        for &t in taps {
            next ^= seq[base + t as usize];
        }
        seq.push(next);
    }
    seq.truncate(n);
    seq
}

/// The full Gold family for `degree`: the `2^degree − 1` sums
/// `u ⊕ Tᵏv` (`k = 0, 1, …`) followed by the two m-sequences `u` and `v`.
pub fn generate_gold_family(degree: u32) -> Result<Vec<SpreadingCode>> {
    let (taps_u, taps_v) = preferred_pair(degree).ok_or_else(|| {
        Error::config(format!(
            "no preferred m-sequence pair for degree {degree} (supported: 5, 7)"
        ))
    })?;
    let u = m_sequence(degree, taps_u);
    let v = m_sequence(degree, taps_v);
    let n = u.len();

    let mut family = Vec::with_capacity(n + 2);
    for shift in 0..n {
        let bits: Vec<u8> = (0..n).map(|m| u[m] ^ v[(m + shift) % n]).collect();
        family.push(SpreadingCode::from_binary(&bits, family.len())?);
    }
    family.push(SpreadingCode::from_binary(&u, n)?);
    family.push(SpreadingCode::from_binary(&v, n + 1)?);
    Ok(family)
}

/// Degree whose Gold family has spreading gain `n`, if supported.
pub fn degree_for_length(n: usize) -> Option<u32> {
    [5u32, 7]
        .into_iter()
        .find(|&d| (1usize << d) - 1 == n)
}

/// Unnormalised periodic cross-correlation `Σ a[m]·b[(m + shift) mod N]` of two `±1` codes.
pub fn periodic_correlation(a: &[i32], b: &[i32], shift: usize) -> i32 {
    let n = a.len();
    (0..n).map(|m| a[m] * b[(m + shift) % n]).sum()
}
