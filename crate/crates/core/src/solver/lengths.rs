/// Set of feasible clique counts `l`, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LengthSet {
    words: Vec<u64>,
}

impl LengthSet {
    pub fn singleton(l: usize) -> Self {
        let mut s = Self::default();
        s.insert(l);
        s
    }

    /// Set from the low bits of a mask (`bit k` means `k` is present).
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: vec![mask] };
        s.trim();
        s
    }

    pub fn insert(&mut self, l: usize) {
        let w = l / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (l % 64);
    }

    pub fn contains(&self, l: usize) -> bool {
        self.words.get(l / 64).is_some_and(|w| w >> (l % 64) & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(64 * i + b)
            })
        })
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `{a + k : a in self}`.
    pub fn shifted(&self, k: usize) -> Self {
        let (ws, bs) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] |= w << bs;
            if bs > 0 {
                words[i + ws + 1] |= w >> (64 - bs);
            }
        }
        let mut out = Self { words };
        out.trim();
        out
    }

    /// Minkowski sum `{a + b}`.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for a in self.iter() {
            out.union_with(&other.shifted(a));
        }
        out
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}
