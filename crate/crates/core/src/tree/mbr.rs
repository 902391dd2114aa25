use crate::object::Point;

/// Axis-aligned minimum bounding rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mbr {
    pub lo: Point,
    pub hi: Point,
}

impl Mbr {
    pub fn new(lo: Point, hi: Point) -> Self {
        debug_assert!(lo.x <= hi.x && lo.y <= hi.y);
        Mbr { lo, hi }
    }

    pub fn point(p: Point) -> Self {
        Mbr { lo: p, hi: p }
    }

    pub fn union(&self, other: &Mbr) -> Mbr {
        Mbr {
            lo: Point::new(self.lo.x.min(other.lo.x), self.lo.y.min(other.lo.y)),
            hi: Point::new(self.hi.x.max(other.hi.x), self.hi.y.max(other.hi.y)),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.lo.x <= p.x && p.x <= self.hi.x && self.lo.y <= p.y && p.y <= self.hi.y
    }

    pub fn center(&self) -> Point {
        Point::new((self.lo.x + self.hi.x) / 2.0, (self.lo.y + self.hi.y) / 2.0)
    }
}

/// Smallest distance between any point of `a` and any point of `b`.
pub fn min_dist(a: &Mbr, b: &Mbr) -> f64 {
    let dx = 0f64.max(b.lo.x - a.hi.x).max(a.lo.x - b.hi.x);
    let dy = 0f64.max(b.lo.y - a.hi.y).max(a.lo.y - b.hi.y);
    (dx * dx + dy * dy).sqrt()
}

/// Largest distance between any point of `a` and any point of `b`; attained at
/// a pair of corners.
pub fn max_dist(a: &Mbr, b: &Mbr) -> f64 {
    let dx = (a.hi.x - b.lo.x).max(b.hi.x - a.lo.x);
    let dy = (a.hi.y - b.lo.y).max(b.hi.y - a.lo.y);
    (dx * dx + dy * dy).sqrt()
}
