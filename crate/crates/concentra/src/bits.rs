//! Flat `u64` bit rows backing adjacency matrices and edge-presence vectors.

pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub fn get(words: &[u64], i: usize) -> bool {
    (words[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
pub fn set(words: &mut [u64], i: usize, value: bool) {
    if value {
        words[i / 64] |= 1 << (i % 64);
    } else {
        words[i / 64] &= !(1 << (i % 64));
    }
}

pub fn count_ones(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Popcount of `a & b` restricted to bit indices strictly above `floor`.
pub fn and_count_above(a: &[u64], b: &[u64], floor: usize) -> usize {
    let start = (floor + 1) / 64;
    let mut total = 0usize;
    for w in start..a.len() {
        let mut word = a[w] & b[w];
        if w == start {
            let offset = (floor + 1) % 64;
            if offset > 0 {
                word &= !0u64 << offset;
            }
        }
        total += word.count_ones() as usize;
    }
    total
}
