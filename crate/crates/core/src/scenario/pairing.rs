use super::config::Pairing;
use crate::error::{Error, Result};

/// Split users into groups of `size`.
///
/// `sorted` lists user indices in ascending channel quality. Group `g` is
/// meant for subchannel `g`; each returned group is in ascending order.
///
/// With 8 users and pairs: SS gives (8,7),(6,5),(4,3),(2,1); SW gives
/// (8,1),(7,2),(6,3),(5,4); SM gives (8,4),(7,3),(6,2),(5,1). Larger groups
/// follow the same patterns: SS takes consecutive blocks, SW deals users
/// snake-wise, SM deals them round-robin.
pub fn pair_users(sorted: &[usize], size: usize, method: Pairing) -> Result<Vec<Vec<usize>>> {
    let n = sorted.len();
    if size == 0 || !n.is_multiple_of(size) {
        return Err(Error::Config(format!(
            "{n} users do not split into groups of {size}"
        )));
    }
    let count = n / size;
    let mut groups: Vec<Vec<usize>> = vec![Vec::with_capacity(size); count];
    // positions from the strongest down
    for (rank, pos) in (0..n).rev().enumerate() {
        let g = match method {
            Pairing::SS => rank / size,
            Pairing::SM => rank % count,
            Pairing::SW => {
                let (round, k) = (rank / count, rank % count);
                if round % 2 == 0 {
                    k
                } else {
                    count - 1 - k
                }
            }
        };
        groups[g].push(pos);
    }
    Ok(groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g.into_iter().map(|pos| sorted[pos]).collect()
        })
        .collect())
}
