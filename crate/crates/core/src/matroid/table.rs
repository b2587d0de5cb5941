//! Rank functions stored as full subset tables.
//!
//! Every matroid handled here has at most [`MAX_TABLE_ELEMENTS`] elements, so
//! the rank of every subset fits comfortably in memory and most structural
//! questions reduce to scans over bitmasks.

pub type Mask = u32;

pub const MAX_TABLE_ELEMENTS: usize = 22;

#[inline]
pub fn bit(i: usize) -> Mask {
    1 << i
}

#[inline]
pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn mask_elements(m: Mask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| m & (1 << i) != 0)
}

pub fn mask_of(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |acc, &i| acc | bit(i))
}

/// All `k`-subsets of the bits set in `within`, in increasing numeric order.
pub fn subsets_of_size(within: Mask, k: usize) -> Vec<Mask> {
    let elems: Vec<usize> = mask_elements(within).collect();
    let n = elems.len();
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let spread = |c: u64| mask_elements(c as Mask).fold(0, |acc, i| acc | bit(elems[i]));
    let mut out = Vec::new();
    // Gosper's hack over index space
    let mut c: u64 = (1 << k) - 1;
    while c < (1u64 << n) {
        out.push(spread(c));
        let u = c & c.wrapping_neg();
        let v = c + u;
        c = v + (((v ^ c) / u) >> 2);
    }
    out.sort_unstable();
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankTable {
    n: usize,
    ranks: Vec<u8>,
}

impl std::fmt::Debug for RankTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RankTable(n={}, r={})", self.n, self.rank())
    }
}

impl RankTable {
    pub fn from_ranks(n: usize, ranks: Vec<u8>) -> Self {
        assert_eq!(ranks.len(), 1usize << n);
        RankTable { n, ranks }
    }

    /// Builds a table by evaluating `rank` on every subset.
    pub fn from_fn(n: usize, rank: impl Fn(Mask) -> usize) -> Self {
        let ranks = (0..1usize << n).map(|m| rank(m as Mask) as u8).collect();
        RankTable { n, ranks }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ground(&self) -> Mask {
        if self.n == 32 {
            Mask::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    #[inline]
    pub fn rank_of(&self, m: Mask) -> usize {
        self.ranks[m as usize] as usize
    }

    pub fn rank(&self) -> usize {
        self.rank_of(self.ground())
    }

    pub fn raw(&self) -> &[u8] {
        &self.ranks
    }

    pub fn is_independent(&self, m: Mask) -> bool {
        self.rank_of(m) == popcount(m)
    }

    pub fn closure(&self, m: Mask) -> Mask {
        let r = self.rank_of(m);
        let mut cl = m;
        for e in 0..self.n {
            if m & bit(e) == 0 && self.rank_of(m | bit(e)) == r {
                cl |= bit(e);
            }
        }
        cl
    }

    pub fn is_flat(&self, m: Mask) -> bool {
        self.closure(m) == m
    }

    pub fn is_circuit(&self, m: Mask) -> bool {
        let k = popcount(m);
        k > 0 && self.rank_of(m) == k - 1 && mask_elements(m).all(|e| self.rank_of(m & !bit(e)) == k - 1)
    }

    pub fn circuits(&self) -> Vec<Mask> {
        (1..=self.ground()).filter(|&m| self.is_circuit(m)).collect()
    }

    pub fn dual(&self) -> RankTable {
        let full = self.ground();
        let r = self.rank();
        let ranks = (0..=full).map(|m| (popcount(m) + self.rank_of(full & !m) - r) as u8).collect();
        RankTable { n: self.n, ranks }
    }

    /// Rank table of `M / contract | keep`; `keep` lists old indices in their
    /// new order and must be disjoint from `contract`.
    pub fn minor(&self, keep: &[usize], contract: Mask) -> RankTable {
        let rc = self.rank_of(contract);
        let k = keep.len();
        let mut old = vec![contract; 1 << k];
        let mut ranks = vec![0u8; 1 << k];
        for m in 1..(1usize << k) {
            let low = m.trailing_zeros() as usize;
            old[m] = old[m & (m - 1)] | bit(keep[low]);
            ranks[m] = (self.rank_of(old[m]) - rc) as u8;
        }
        RankTable { n: k, ranks }
    }

    pub fn restrict(&self, keep: &[usize]) -> RankTable {
        self.minor(keep, 0)
    }

    pub fn loops(&self) -> Mask {
        (0..self.n).filter(|&e| self.rank_of(bit(e)) == 0).fold(0, |a, e| a | bit(e))
    }

    pub fn coloops(&self) -> Mask {
        let full = self.ground();
        let r = self.rank();
        (0..self.n).filter(|&e| self.rank_of(full & !bit(e)) < r).fold(0, |a, e| a | bit(e))
    }

    /// Parallel classes of non-loop elements, each sorted, in order of their
    /// smallest member.
    pub fn parallel_classes(&self) -> Vec<Vec<usize>> {
        let loops = self.loops();
        let mut assigned = loops;
        let mut classes = Vec::new();
        for e in 0..self.n {
            if assigned & bit(e) != 0 {
                continue;
            }
            let mut class = vec![e];
            assigned |= bit(e);
            for f in e + 1..self.n {
                if assigned & bit(f) == 0 && self.rank_of(bit(e) | bit(f)) == 1 {
                    class.push(f);
                    assigned |= bit(f);
                }
            }
            classes.push(class);
        }
        classes
    }

    pub fn is_simple(&self) -> bool {
        self.loops() == 0 && self.parallel_classes().iter().all(|c| c.len() == 1)
    }

    pub fn triangles(&self) -> Vec<Mask> {
        subsets_of_size(self.ground(), 3).into_iter().filter(|&m| self.is_circuit(m)).collect()
    }

    pub fn triads(&self) -> Vec<Mask> {
        let full = self.ground();
        let r = self.rank();
        subsets_of_size(full, 3)
            .into_iter()
            .filter(|&m| {
                // cocircuit: E - m is a hyperplane-complement, i.e. r(E-m) = r-1
                // and removing any proper subset keeps full rank
                self.rank_of(full & !m) == r.wrapping_sub(1)
                    && mask_elements(m).all(|e| self.rank_of((full & !m) | bit(e)) == r)
            })
            .collect()
    }

    pub fn is_triangle(&self, m: Mask) -> bool {
        popcount(m) == 3 && self.is_circuit(m)
    }

    pub fn is_triad(&self, m: Mask) -> bool {
        let full = self.ground();
        let r = self.rank();
        popcount(m) == 3
            && r >= 1
            && self.rank_of(full & !m) == r - 1
            && mask_elements(m).all(|e| self.rank_of((full & !m) | bit(e)) == r)
    }

    pub fn hyperplanes(&self) -> Vec<Mask> {
        let r = self.rank();
        if r == 0 {
            return Vec::new();
        }
        (0..=self.ground()).filter(|&m| self.rank_of(m) == r - 1 && self.is_flat(m)).collect()
    }

    /// `r(X) + r(E - X) - r(E)`.
    pub fn connectivity(&self, x: Mask) -> usize {
        let full = self.ground();
        self.rank_of(x) + self.rank_of(full & !x) - self.rank()
    }

    /// Smallest `k` such that the matroid has a `k`-separation, capped at `limit`.
    pub fn separation_order(&self, limit: usize) -> usize {
        let full = self.ground();
        let n = self.n;
        if n == 0 {
            return limit;
        }
        let mut best = limit;
        // masks containing element 0 cover every separation up to complement
        let rest = full & !1;
        let mut sub: Mask = rest;
        loop {
            let x = sub | 1;
            if x != full {
                let size = popcount(x).min(n - popcount(x));
                let lam = self.connectivity(x);
                // a k-separation needs lambda < k <= min side
                let k = lam + 1;
                if k <= size && k < best {
                    best = k;
                    if best == 1 {
                        return 1;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best
    }

    pub fn is_connected(&self) -> bool {
        self.separation_order(2) >= 2
    }

    pub fn is_3connected(&self) -> bool {
        self.separation_order(3) >= 3
    }

    /// A 3-connected matroid on at least four elements in which every
    /// element lies in both a triangle and a triad is a wheel or a whirl.
    pub fn is_wheel_or_whirl(&self) -> bool {
        if self.n < 4 || !self.is_3connected() {
            return false;
        }
        let tri = self.triangles().into_iter().fold(0, |a, m| a | m);
        let triads = self.triads().into_iter().fold(0, |a, m| a | m);
        tri == self.ground() && triads == self.ground()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(r: usize, n: usize) -> RankTable {
        RankTable::from_fn(n, |m| popcount(m).min(r))
    }

    #[test]
    fn subsets_enumeration_counts() {
        assert_eq!(subsets_of_size(0b11111, 2).len(), 10);
        assert_eq!(subsets_of_size(0b10110, 3), vec![0b10110]);
        assert_eq!(subsets_of_size(0b111, 0), vec![0]);
        assert!(subsets_of_size(0b11, 3).is_empty());
    }

    #[test]
    fn uniform_connectivity_and_duality() {
        let u25 = uniform(2, 5);
        assert!(u25.is_3connected());
        assert_eq!(u25.dual(), uniform(3, 5));
        assert!(u25.triads().is_empty());
        assert_eq!(u25.triangles().len(), 10);
        assert!(uniform(2, 4).is_wheel_or_whirl());
        assert!(!u25.is_wheel_or_whirl());
    }

    #[test]
    fn parallel_pair_breaks_3_connectivity() {
        // U_{2,4} with element 0 doubled
        let t = RankTable::from_fn(5, |m| {
            let m2 = if m & 1 != 0 { (m >> 1) | 1 } else { m >> 1 };
            popcount(m2 & 0b1111).min(2)
        });
        assert!(t.is_connected());
        assert!(!t.is_3connected());
    }

    #[test]
    fn minor_rank_is_shifted() {
        let t = uniform(3, 6);
        let m = t.minor(&[1, 2, 3, 4, 5], 0b1);
        assert_eq!(m, uniform(2, 5));
    }
}
