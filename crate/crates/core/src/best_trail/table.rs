//! Tip selection table.
//!
//! Candidate tips live in a binary search tree ordered by rank: the left
//! subtree holds better tips, so an in-order walk lists candidates from rank
//! 0 downwards. Each row caches the score sum (`subscore`) and size
//! (`subcount`) of its subtree, which lets both selection rules pick a tip
//! by descending from the root through nested intervals.
//!
//! The tree is a treap: row priorities come from a hash of the tip ID, so
//! the shape stays logarithmic even when many tips share a score. Shape never
//! affects which tip an interval draw selects, because the interval layout
//! follows in-order position. [`Balancing::Unbalanced`] keeps plain
//! insertion order instead.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};

/// Ranking key of a tip. Better tips compare as [`Ordering::Less`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipKey {
    /// Distinct query terms matched anywhere on the trail.
    pub terms: u32,
    /// Most query terms matched by a single page of the trail.
    pub best_page: u32,
    pub score: f64,
    pub tip: u32,
}

/// Orders tips by matched terms, then best single-page match, then trail
/// score (all descending), then tip ID ascending. Total.
pub fn compare_tips(a: &TipKey, b: &TipKey) -> Ordering {
    b.terms
        .cmp(&a.terms)
        .then(b.best_page.cmp(&a.best_page))
        .then(b.score.total_cmp(&a.score))
        .then(a.tip.cmp(&b.tip))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Balancing {
    /// Treap with priorities derived from `seed` and the tip ID.
    Randomized { seed: u64 },
    /// Plain search tree in insertion order.
    Unbalanced,
}

#[derive(Debug, Clone)]
struct Row {
    key: TipKey,
    priority: u64,
    left: Option<usize>,
    right: Option<usize>,
    subscore: f64,
    subcount: u32,
}

/// Read-only view of one table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowView {
    pub tip: u32,
    pub score: f64,
    pub left: Option<u32>,
    pub right: Option<u32>,
    pub subscore: f64,
    pub subcount: u32,
}

#[derive(Debug, Clone)]
pub struct TipSelectionTable {
    rows: Vec<Row>,
    free: Vec<usize>,
    slot_of_tip: Vec<u32>,
    root: Option<usize>,
    balancing: Balancing,
}

const NO_SLOT: u32 = u32::MAX;

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// `sum_{k=x}^{y} a^k` in closed form. Empty ranges sum to 0 and `a = 1`
/// counts the terms.
pub fn geometric_sum(a: f64, x: u64, y: u64) -> f64 {
    if x > y {
        return 0.0;
    }
    if a == 1.0 {
        return (y - x + 1) as f64;
    }
    let n = (y - x + 1) as f64;
    if a > 0.0 {
        // expm1 keeps `a^n - 1` accurate when `a` is close to 1.
        return a.powf(x as f64) * (n * a.ln()).exp_m1() / (a - 1.0);
    }
    a.powf(x as f64) * (1.0 - a.powf(n)) / (1.0 - a)
}

/// Below this geometric ratio the convergence rule picks rank 0 outright.
const DETERMINISTIC_RATIO: f64 = 1e-12;

impl TipSelectionTable {
    pub fn new(balancing: Balancing) -> Self {
        TipSelectionTable {
            rows: Vec::new(),
            free: Vec::new(),
            slot_of_tip: Vec::new(),
            root: None,
            balancing,
        }
    }

    pub fn len(&self) -> usize {
        self.root.map_or(0, |r| self.rows[r].subcount as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn contains(&self, tip: u32) -> bool {
        self.slot(tip).is_some()
    }

    pub fn root_tip(&self) -> Option<u32> {
        self.root.map(|r| self.rows[r].key.tip)
    }

    /// Sum of all candidate scores.
    pub fn total_score(&self) -> f64 {
        self.subscore(self.root)
    }

    fn slot(&self, tip: u32) -> Option<usize> {
        match self.slot_of_tip.get(tip as usize) {
            Some(&s) if s != NO_SLOT => Some(s as usize),
            _ => None,
        }
    }

    fn subscore(&self, slot: Option<usize>) -> f64 {
        slot.map_or(0.0, |s| self.rows[s].subscore)
    }

    fn subcount(&self, slot: Option<usize>) -> u32 {
        slot.map_or(0, |s| self.rows[s].subcount)
    }

    fn update(&mut self, s: usize) {
        let (l, r) = (self.rows[s].left, self.rows[s].right);
        let subscore = self.rows[s].key.score + self.subscore(l) + self.subscore(r);
        let subcount = 1 + self.subcount(l) + self.subcount(r);
        let row = &mut self.rows[s];
        row.subscore = subscore;
        row.subcount = subcount;
    }

    fn ranks_before(&self, a: usize, b: usize) -> bool {
        compare_tips(&self.rows[a].key, &self.rows[b].key) == Ordering::Less
    }

    /// Adds a candidate. Panics if the tip is already present or its score
    /// is negative or not finite.
    pub fn insert(&mut self, key: TipKey) {
        assert!(key.score.is_finite() && key.score >= 0.0, "bad tip score {}", key.score);
        assert!(!self.contains(key.tip), "tip {} already in table", key.tip);
        let priority = match self.balancing {
            Balancing::Randomized { seed } => splitmix64(seed ^ u64::from(key.tip)),
            Balancing::Unbalanced => 0,
        };
        let row = Row {
            key,
            priority,
            left: None,
            right: None,
            subscore: key.score,
            subcount: 1,
        };
        let slot = match self.free.pop() {
            Some(s) => {
                self.rows[s] = row;
                s
            }
            None => {
                self.rows.push(row);
                self.rows.len() - 1
            }
        };
        let t = key.tip as usize;
        if self.slot_of_tip.len() <= t {
            self.slot_of_tip.resize(t + 1, NO_SLOT);
        }
        self.slot_of_tip[t] = slot as u32;
        self.root = Some(self.insert_at(self.root, slot));
    }

    fn insert_at(&mut self, node: Option<usize>, new: usize) -> usize {
        let Some(n) = node else { return new };
        if self.ranks_before(new, n) {
            let l = self.insert_at(self.rows[n].left, new);
            self.rows[n].left = Some(l);
            if self.rows[l].priority > self.rows[n].priority {
                return self.rotate_right(n);
            }
        } else {
            let r = self.insert_at(self.rows[n].right, new);
            self.rows[n].right = Some(r);
            if self.rows[r].priority > self.rows[n].priority {
                return self.rotate_left(n);
            }
        }
        self.update(n);
        n
    }

    fn rotate_right(&mut self, n: usize) -> usize {
        let l = self.rows[n].left.expect("rotate_right needs a left child");
        self.rows[n].left = self.rows[l].right;
        self.rows[l].right = Some(n);
        self.update(n);
        self.update(l);
        l
    }

    fn rotate_left(&mut self, n: usize) -> usize {
        let r = self.rows[n].right.expect("rotate_left needs a right child");
        self.rows[n].right = self.rows[r].left;
        self.rows[r].left = Some(n);
        self.update(n);
        self.update(r);
        r
    }

    /// Removes a candidate; returns whether it was present.
    pub fn remove(&mut self, tip: u32) -> bool {
        let Some(slot) = self.slot(tip) else {
            return false;
        };
        self.root = self.remove_at(self.root, slot);
        self.slot_of_tip[tip as usize] = NO_SLOT;
        self.free.push(slot);
        true
    }

    fn remove_at(&mut self, node: Option<usize>, target: usize) -> Option<usize> {
        let n = node.expect("tip present in table");
        if n == target {
            return self.merge(self.rows[n].left, self.rows[n].right);
        }
        if self.ranks_before(target, n) {
            self.rows[n].left = self.remove_at(self.rows[n].left, target);
        } else {
            self.rows[n].right = self.remove_at(self.rows[n].right, target);
        }
        self.update(n);
        Some(n)
    }

    /// Joins two subtrees where every tip of `a` ranks before every tip of `b`.
    fn merge(&mut self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                if self.rows[a].priority >= self.rows[b].priority {
                    self.rows[a].right = self.merge(self.rows[a].right, Some(b));
                    self.update(a);
                    Some(a)
                } else {
                    self.rows[b].left = self.merge(Some(a), self.rows[b].left);
                    self.update(b);
                    Some(b)
                }
            }
        }
    }

    /// Tip whose score interval contains `u`, with intervals laid out in
    /// rank order over `[0, total_score)`.
    pub fn descend_by_score(&self, mut u: f64) -> Result<u32> {
        let mut node = self.root.ok_or(Error::EmptyTable)?;
        loop {
            let row = &self.rows[node];
            let left = self.subscore(row.left);
            if let Some(l) = row.left {
                if u < left {
                    node = l;
                    continue;
                }
            }
            u -= left;
            if u < row.key.score {
                return Ok(row.key.tip);
            }
            u -= row.key.score;
            match row.right {
                Some(r) => node = r,
                None => return Ok(row.key.tip),
            }
        }
    }

    /// Tip at 0-based `rank`.
    pub fn tip_at_rank(&self, mut rank: u32) -> Result<u32> {
        let mut node = self.root.ok_or(Error::EmptyTable)?;
        loop {
            let row = &self.rows[node];
            let left = self.subcount(row.left);
            match rank.cmp(&left) {
                Ordering::Less => node = row.left.expect("nonzero left count"),
                Ordering::Equal => return Ok(row.key.tip),
                Ordering::Greater => {
                    rank -= left + 1;
                    node = row.right.ok_or(Error::EmptyTable)?;
                }
            }
        }
    }

    /// Tip whose interval contains `u` when rank `r` is weighted `a^r`.
    pub fn descend_geometric(&self, mut u: f64, a: f64) -> Result<u32> {
        let mut node = self.root.ok_or(Error::EmptyTable)?;
        let mut base = 0u64;
        loop {
            let row = &self.rows[node];
            let left_count = u64::from(self.subcount(row.left));
            if let Some(l) = row.left {
                let left = geometric_sum(a, base, base + left_count - 1);
                if u < left {
                    node = l;
                    continue;
                }
                u -= left;
            }
            let own = a.powf((base + left_count) as f64);
            if u < own {
                return Ok(row.key.tip);
            }
            u -= own;
            match row.right {
                Some(r) => {
                    base += left_count + 1;
                    node = r;
                }
                None => return Ok(row.key.tip),
            }
        }
    }

    /// Exploration rule: probability proportional to trail score, uniform
    /// when every candidate scores zero.
    pub fn select_explore<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32> {
        let total = self.total_score();
        if self.is_empty() {
            return Err(Error::EmptyTable);
        }
        if total > 0.0 {
            self.descend_by_score(rng.random::<f64>() * total)
        } else {
            self.tip_at_rank(rng.random_range(0..self.len() as u32))
        }
    }

    /// Convergence rule: rank `r` is drawn with probability proportional to
    /// `(df^j)^r`. `df = 0` always picks rank 0; `j = 0` is uniform.
    pub fn select_converge<R: Rng + ?Sized>(&self, df: f64, j: usize, rng: &mut R) -> Result<u32> {
        if self.is_empty() {
            return Err(Error::EmptyTable);
        }
        if df == 0.0 {
            return self.tip_at_rank(0);
        }
        let a = df.powf(j as f64);
        if a < DETERMINISTIC_RATIO {
            return self.tip_at_rank(0);
        }
        let n = self.len() as u64;
        if a == 1.0 {
            return self.tip_at_rank(rng.random_range(0..n) as u32);
        }
        let total = geometric_sum(a, 0, n - 1);
        self.descend_geometric(rng.random::<f64>() * total, a)
    }

    /// Candidate tips in rank order.
    pub fn in_order(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut node = self.root;
        while node.is_some() || !stack.is_empty() {
            while let Some(n) = node {
                stack.push(n);
                node = self.rows[n].left;
            }
            let n = stack.pop().unwrap();
            out.push(self.rows[n].key.tip);
            node = self.rows[n].right;
        }
        out
    }

    pub fn height(&self) -> usize {
        fn h(t: &TipSelectionTable, s: Option<usize>) -> usize {
            s.map_or(0, |s| 1 + h(t, t.rows[s].left).max(h(t, t.rows[s].right)))
        }
        h(self, self.root)
    }

    pub fn key(&self, tip: u32) -> Option<TipKey> {
        self.slot(tip).map(|s| self.rows[s].key)
    }

    pub fn row(&self, tip: u32) -> Option<RowView> {
        let s = self.slot(tip)?;
        let row = &self.rows[s];
        Some(RowView {
            tip,
            score: row.key.score,
            left: row.left.map(|l| self.rows[l].key.tip),
            right: row.right.map(|r| self.rows[r].key.tip),
            subscore: row.subscore,
            subcount: row.subcount,
        })
    }

    /// Recomputes every cached sum and checks ordering and heap shape.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        fn walk(t: &TipSelectionTable, s: Option<usize>) -> std::result::Result<(f64, u32), String> {
            let Some(s) = s else { return Ok((0.0, 0)) };
            let row = &t.rows[s];
            let (ls, lc) = walk(t, row.left)?;
            let (rs, rc) = walk(t, row.right)?;
            let score = row.key.score + ls + rs;
            let count = 1 + lc + rc;
            if (score - row.subscore).abs() > 1e-9 * score.max(1.0) {
                return Err(format!("tip {}: subscore {} != {}", row.key.tip, row.subscore, score));
            }
            if count != row.subcount {
                return Err(format!("tip {}: subcount {} != {}", row.key.tip, row.subcount, count));
            }
            for child in [row.left, row.right].into_iter().flatten() {
                if t.rows[child].priority > row.priority {
                    return Err(format!("tip {}: heap order violated", row.key.tip));
                }
            }
            Ok((score, count))
        }
        walk(self, self.root)?;
        let order = self.in_order();
        for pair in order.windows(2) {
            let (a, b) = (self.key(pair[0]).unwrap(), self.key(pair[1]).unwrap());
            if compare_tips(&a, &b) != Ordering::Less {
                return Err(format!("tips {} and {} out of rank order", a.tip, b.tip));
            }
        }
        if order.len() != self.len() {
            return Err("root subcount does not match candidate count".into());
        }
        Ok(())
    }
}
