/// Binary min-heap over node indices with decrease-key.
pub(crate) struct IndexedHeap {
    items: Vec<(f64, u32)>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedHeap {
    pub fn new(n: usize) -> Self {
        Self { items: Vec::new(), pos: vec![ABSENT; n] }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Insert, or lower the key of a present node.
    pub fn push_or_decrease(&mut self, node: usize, key: f64) {
        let p = self.pos[node];
        if p == ABSENT {
            self.items.push((key, node as u32));
            let at = self.items.len() - 1;
            self.pos[node] = at as u32;
            self.sift_up(at);
        } else if key < self.items[p as usize].0 {
            self.items[p as usize].0 = key;
            self.sift_up(p as usize);
        }
    }

    pub fn pop(&mut self) -> Option<(f64, usize)> {
        if self.items.is_empty() {
            return None;
        }
        let last = self.items.len() - 1;
        self.items.swap(0, last);
        let (key, node) = self.items.pop().unwrap();
        self.pos[node as usize] = ABSENT;
        if !self.items.is_empty() {
            self.pos[self.items[0].1 as usize] = 0;
            self.sift_down(0);
        }
        Some((key, node as usize))
    }

    fn sift_up(&mut self, mut at: usize) {
        while at > 0 {
            let parent = (at - 1) / 2;
            if self.items[parent].0 <= self.items[at].0 {
                break;
            }
            self.swap(at, parent);
            at = parent;
        }
    }

    fn sift_down(&mut self, mut at: usize) {
        let n = self.items.len();
        loop {
            let (l, r) = (2 * at + 1, 2 * at + 2);
            let mut best = at;
            if l < n && self.items[l].0 < self.items[best].0 {
                best = l;
            }
            if r < n && self.items[r].0 < self.items[best].0 {
                best = r;
            }
            if best == at {
                break;
            }
            self.swap(at, best);
            at = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.items.swap(a, b);
        self.pos[self.items[a].1 as usize] = a as u32;
        self.pos[self.items[b].1 as usize] = b as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_key_order_after_decreases() {
        let mut h = IndexedHeap::new(10);
        for (n, k) in [(3, 5.0), (1, 2.0), (7, 9.0), (4, 4.0)] {
            h.push_or_decrease(n, k);
        }
        h.push_or_decrease(7, 1.0);
        h.push_or_decrease(1, 3.0);
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).map(|(_, n)| n).collect();
        assert_eq!(order, vec![7, 1, 4, 3]);
        assert_eq!(h.len(), 0);
    }
}
