use fixedbitset::FixedBitSet;

use crate::muse::Endpoint;

/// Many small sets over `0..stride`, stored in one bit block with a
/// per-set cardinality so emptiness checks are O(1).
#[derive(Clone, Debug)]
pub(crate) struct SetFamily {
    stride: usize,
    bits: FixedBitSet,
    len: Vec<u32>,
}

impl SetFamily {
    pub fn new(slots: usize, stride: usize) -> Self {
        Self {
            stride,
            bits: FixedBitSet::with_capacity(slots * stride),
            len: vec![0; slots],
        }
    }

    pub fn insert(&mut self, slot: usize, x: usize) -> bool {
        let idx = slot * self.stride + x;
        if self.bits.put(idx) {
            false
        } else {
            self.len[slot] += 1;
            true
        }
    }

    pub fn remove(&mut self, slot: usize, x: usize) -> bool {
        let idx = slot * self.stride + x;
        if self.bits.contains(idx) {
            self.bits.set(idx, false);
            self.len[slot] -= 1;
            true
        } else {
            false
        }
    }

    pub fn contains(&self, slot: usize, x: usize) -> bool {
        self.bits.contains(slot * self.stride + x)
    }

    pub fn is_empty(&self, slot: usize) -> bool {
        self.len[slot] == 0
    }

    pub fn members(&self, slot: usize) -> Vec<usize> {
        let base = slot * self.stride;
        (0..self.stride)
            .filter(|&x| self.bits.contains(base + x))
            .collect()
    }
}

/// Endpoints are coded as node ids, with `n` for start and `n + 1` for end.
pub(crate) fn encode(n: usize, e: Endpoint) -> usize {
    match e {
        Endpoint::Node(i) => i,
        Endpoint::Start => n,
        Endpoint::End => n + 1,
    }
}

pub(crate) fn decode(n: usize, x: usize) -> Endpoint {
    if x == n {
        Endpoint::Start
    } else if x == n + 1 {
        Endpoint::End
    } else {
        Endpoint::Node(x)
    }
}

pub(crate) fn decode_sorted(n: usize, xs: Vec<usize>) -> Vec<Endpoint> {
    let mut v: Vec<Endpoint> = xs.into_iter().map(|x| decode(n, x)).collect();
    v.sort_unstable();
    v
}
