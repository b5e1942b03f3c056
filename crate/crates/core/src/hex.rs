//! Hexagon cell geometry.
//!
//! Cells are addressed in axial coordinates `(q, r)`. Offsets from the
//! service cell use polar `(ring, index)` labels: `ring` is the hop distance
//! from the origin and `index` runs over `0..6*ring` counterclockwise, with
//! index 0 on the `+q` axis.

use core::cmp::Ordering;

use crate::math::{abs, round, sqrt};

/// Axial hexagon coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Axial {
    pub q: i32,
    pub r: i32,
}

/// The six unit steps in counterclockwise order starting from `+q`.
pub const DIRECTIONS: [Axial; 6] = [
    Axial { q: 1, r: 0 },
    Axial { q: 1, r: -1 },
    Axial { q: 0, r: -1 },
    Axial { q: -1, r: 0 },
    Axial { q: -1, r: 1 },
    Axial { q: 0, r: 1 },
];

impl Axial {
    pub const ORIGIN: Axial = Axial { q: 0, r: 0 };

    pub const fn new(q: i32, r: i32) -> Self {
        Self { q, r }
    }

    /// Hop count to the origin.
    pub fn norm(self) -> u32 {
        (self.q.unsigned_abs() + self.r.unsigned_abs() + (self.q + self.r).unsigned_abs()) / 2
    }

    pub fn distance(self, other: Axial) -> u32 {
        (self - other).norm()
    }

    pub fn scale(self, k: i32) -> Axial {
        Axial { q: self.q * k, r: self.r * k }
    }

    pub fn neighbors(self) -> [Axial; 6] {
        DIRECTIONS.map(|d| self + d)
    }

    /// Center of the cell in a y-up plane with unit center-to-center spacing.
    pub fn to_plane(self) -> (f64, f64) {
        let q = self.q as f64;
        let r = self.r as f64;
        (q + r / 2.0, -(sqrt(3.0) / 2.0) * r)
    }

    /// Cell whose center is nearest to `(x, y)` (unit spacing). Exact ties go
    /// to the lexicographically smallest `(q, r)`.
    pub fn nearest_to_plane(x: f64, y: f64) -> Axial {
        let rf = -y / (sqrt(3.0) / 2.0);
        let qf = x - rf / 2.0;
        let guess = cube_round(qf, rf);
        let mut best = guess;
        let mut best_d = sq_dist(guess, x, y);
        for cand in guess.neighbors() {
            let d = sq_dist(cand, x, y);
            let tie = abs(d - best_d) <= 1e-12 * (1.0 + best_d);
            if (tie && cand < best) || (!tie && d < best_d) {
                best = cand;
                best_d = d;
            }
        }
        best
    }
}

fn sq_dist(a: Axial, x: f64, y: f64) -> f64 {
    let (cx, cy) = a.to_plane();
    (cx - x) * (cx - x) + (cy - y) * (cy - y)
}

fn cube_round(qf: f64, rf: f64) -> Axial {
    let sf = -qf - rf;
    let mut q = round(qf);
    let mut r = round(rf);
    let s = round(sf);
    let dq = abs(q - qf);
    let dr = abs(r - rf);
    let ds = abs(s - sf);
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    Axial { q: q as i32, r: r as i32 }
}

impl core::ops::Add for Axial {
    type Output = Axial;
    fn add(self, o: Axial) -> Axial {
        Axial { q: self.q + o.q, r: self.r + o.r }
    }
}

impl core::ops::Sub for Axial {
    type Output = Axial;
    fn sub(self, o: Axial) -> Axial {
        Axial { q: self.q - o.q, r: self.r - o.r }
    }
}

/// Polar `(ring, index)` label of a user-service offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HexOffset {
    pub ring: u32,
    pub index: u32,
}

impl Ord for HexOffset {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ring, self.index).cmp(&(other.ring, other.index))
    }
}

impl PartialOrd for HexOffset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl HexOffset {
    pub const ORIGIN: HexOffset = HexOffset { ring: 0, index: 0 };

    /// `None` unless `index < 6 * ring` (or both are zero).
    pub fn new(ring: u32, index: u32) -> Option<Self> {
        let ok = if ring == 0 { index == 0 } else { index < 6 * ring };
        ok.then_some(Self { ring, index })
    }

    pub fn to_axial(self) -> Axial {
        if self.ring == 0 {
            return Axial::ORIGIN;
        }
        let i = self.ring as i32;
        let side = (self.index / self.ring) as usize;
        let step = (self.index % self.ring) as i32;
        DIRECTIONS[side].scale(i) + DIRECTIONS[(side + 2) % 6].scale(step)
    }

    pub fn from_axial(a: Axial) -> Self {
        let ring = a.norm();
        if ring == 0 {
            return Self::ORIGIN;
        }
        let i = ring as i32;
        for side in 0..6 {
            let rel = a - DIRECTIONS[side].scale(i);
            let dir = DIRECTIONS[(side + 2) % 6];
            // rel must be step * dir with 0 <= step < ring
            for step in 0..i {
                if dir.scale(step) == rel {
                    return Self { ring, index: side as u32 * ring + step as u32 };
                }
            }
        }
        unreachable!("every axial cell lies on its ring")
    }

    pub fn neighbors(self) -> [HexOffset; 6] {
        self.to_axial().neighbors().map(HexOffset::from_axial)
    }

    /// Dense position in the ring-major enumeration of all offsets.
    pub fn linear_index(self) -> usize {
        if self.ring == 0 {
            0
        } else {
            ring_start(self.ring) + self.index as usize
        }
    }

    pub fn from_linear_index(k: usize) -> Self {
        if k == 0 {
            return Self::ORIGIN;
        }
        let mut ring = 1u32;
        while ring_start(ring + 1) <= k {
            ring += 1;
        }
        Self { ring, index: (k - ring_start(ring)) as u32 }
    }
}

/// Minimum hop count between two offsets.
pub fn hex_distance(a: HexOffset, b: HexOffset) -> u32 {
    a.to_axial().distance(b.to_axial())
}

/// Linear index of `(ring, 0)`.
pub fn ring_start(ring: u32) -> usize {
    if ring == 0 {
        0
    } else {
        let i = ring as usize;
        3 * i * (i - 1) + 1
    }
}

/// Number of offsets with `ring <= n_max`: `3N^2 + 3N + 1`.
pub fn state_count(n_max: u32) -> usize {
    ring_start(n_max + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn ring_label_round_trips() {
        for k in 0..state_count(6) {
            let s = HexOffset::from_linear_index(k);
            assert_eq!(s.linear_index(), k);
            assert_eq!(HexOffset::from_axial(s.to_axial()), s);
            assert_eq!(s.to_axial().norm(), s.ring);
        }
    }

    #[test]
    fn ring_sizes() {
        assert_eq!(state_count(0), 1);
        assert_eq!(state_count(3), 37);
        assert_eq!(state_count(10), 331);
        for ring in 1..8 {
            assert_eq!(ring_start(ring + 1) - ring_start(ring), 6 * ring as usize);
        }
    }

    #[test]
    fn labelled_example_path() {
        // (3,2) -> (2,1) -> (1,0) is a shortest path; (2,2) is the other
        // ring-2 cell adjacent to (3,2).
        let s = HexOffset::new(3, 2).unwrap();
        let a = HexOffset::new(2, 1).unwrap();
        let b = HexOffset::new(2, 2).unwrap();
        let c = HexOffset::new(1, 0).unwrap();
        assert_eq!(hex_distance(s, a), 1);
        assert_eq!(hex_distance(s, b), 1);
        assert_eq!(hex_distance(a, c), 1);
        assert_eq!(hex_distance(s, c), 2);
        let ring1_min = (0..6).map(|j| hex_distance(s, HexOffset::new(1, j).unwrap())).min();
        assert_eq!(ring1_min, Some(2));
    }

    #[test]
    fn neighbor_ring_multisets() {
        for ring in 1..=4u32 {
            for index in 0..6 * ring {
                let s = HexOffset::new(ring, index).unwrap();
                let mut rings: Vec<u32> = s.neighbors().iter().map(|n| n.ring).collect();
                rings.sort_unstable();
                let corner = [ring - 1, ring, ring, ring + 1, ring + 1, ring + 1];
                let edge = [ring - 1, ring - 1, ring, ring, ring + 1, ring + 1];
                if ring == 1 {
                    // ring 1: origin once, two ring-1 cells, three ring-2 cells
                    assert_eq!(rings, [0, 1, 1, 2, 2, 2]);
                } else if index % ring == 0 {
                    assert_eq!(rings, corner, "corner ({ring},{index})");
                } else {
                    assert_eq!(rings, edge, "edge ({ring},{index})");
                }
            }
        }
    }

    #[test]
    fn origin_neighbors_are_ring_one() {
        let mut n: Vec<HexOffset> = HexOffset::ORIGIN.neighbors().to_vec();
        n.sort();
        let want: Vec<HexOffset> = (0..6).map(|j| HexOffset::new(1, j).unwrap()).collect();
        assert_eq!(n, want);
    }

    #[test]
    fn handshake_between_rings() {
        for ring in 0..5u32 {
            let count = if ring == 0 { 1 } else { 6 * ring };
            let outward: usize = (0..count)
                .map(|j| HexOffset { ring, index: j }.neighbors().iter().filter(|n| n.ring == ring + 1).count())
                .sum();
            let inward: usize = (0..6 * (ring + 1))
                .map(|j| HexOffset { ring: ring + 1, index: j }.neighbors().iter().filter(|n| n.ring == ring).count())
                .sum();
            assert_eq!(outward, inward, "ring {ring}");
        }
    }

    #[test]
    fn nearest_cell() {
        for a in [Axial::new(0, 0), Axial::new(2, -1), Axial::new(-3, 5)] {
            let (x, y) = a.to_plane();
            assert_eq!(Axial::nearest_to_plane(x, y), a);
        }
        // midpoint between origin and (1,0): tie goes to the smaller id
        assert_eq!(Axial::nearest_to_plane(0.5, 0.0), Axial::new(0, 0));
        let (x, y) = Axial::new(1, -1).to_plane();
        assert_eq!(Axial::nearest_to_plane(x / 2.0, y / 2.0), Axial::new(0, 0));
    }
}
