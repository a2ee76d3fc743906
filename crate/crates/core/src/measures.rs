//! Levels, the cuts-level measure and the multiset object order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{is_free, FreshSupply, Sel, Term};

/// `lv_z(t)`.
pub fn level(t: &Term, z: &str) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::App(f, a) => level(f, z).max(level(a, z)),
        Term::Abs(x, b) => {
            if x == z {
                0
            } else {
                level(b, z)
            }
        }
        Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
            let es = usize::from(matches!(t, Term::Sub(..)));
            let body = if x == z { 0 } else { level(b, z) };
            if !is_free(z, c) {
                body
            } else {
                body.max(level(b, x) + level(c, z) + es)
            }
        }
    }
}

/// `lv_⋄(C)` for the context denoted by `t` and `path`.
pub fn hole_level(t: &Term, path: &[Sel]) -> usize {
    let mut supply = FreshSupply::new();
    supply.avoid_term(t);
    let z = supply.fresh("hole");
    match t.replace_at(path, Term::var(z.clone())) {
        Ok(c) => level(&c, &z),
        Err(_) => 0,
    }
}

/// Objects `a(k, n)` and `b(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OObject {
    A(usize, usize),
    B(usize),
}

impl OObject {
    pub fn k(self) -> usize {
        match self {
            OObject::A(k, _) | OObject::B(k) => k,
        }
    }

    fn shift(self, p: usize) -> OObject {
        match self {
            OObject::A(k, n) => OObject::A(k + p, n),
            OObject::B(k) => OObject::B(k + p),
        }
    }
}

impl fmt::Display for OObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OObject::A(k, n) => write!(f, "a({k},{n})"),
            OObject::B(k) => write!(f, "b({k})"),
        }
    }
}

/// `a >^O b`.
pub fn o_greater(a: OObject, b: OObject) -> bool {
    use OObject::*;
    match (a, b) {
        (A(k, n), A(k2, n2)) => k > k2 || (k == k2 && n > n2),
        (A(k, _), B(k2)) => k > k2,
        (B(k), A(k2, _)) => k >= k2,
        (B(k), B(k2)) => k > k2,
    }
}

/// `a <^O b`.
pub fn o_less(a: OObject, b: OObject) -> bool {
    o_greater(b, a)
}

/// A finite multiset of objects, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OMeasure(Vec<OObject>);

impl OMeasure {
    pub fn new() -> OMeasure {
        OMeasure(Vec::new())
    }

    pub fn from_vec(mut v: Vec<OObject>) -> OMeasure {
        v.sort();
        OMeasure(v)
    }

    pub fn elements(&self) -> &[OObject] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `M ⊔ N`.
    pub fn union(mut self, other: OMeasure) -> OMeasure {
        self.0.extend(other.0);
        self.0.sort();
        self
    }

    pub fn push(&mut self, o: OObject) {
        let i = self.0.partition_point(|x| *x <= o);
        self.0.insert(i, o);
    }

    /// `p · M`.
    pub fn scale(&self, p: usize) -> OMeasure {
        OMeasure::from_vec(self.0.iter().map(|o| o.shift(p)).collect())
    }

    /// `M ∖ N` and `N ∖ M` after cancelling common elements.
    fn cancel(&self, other: &OMeasure) -> (Vec<OObject>, Vec<OObject>) {
        let (mut i, mut j) = (0, 0);
        let (mut l, mut r) = (Vec::new(), Vec::new());
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    l.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    r.push(b[j]);
                    j += 1;
                }
            }
        }
        l.extend_from_slice(&a[i..]);
        r.extend_from_slice(&b[j..]);
        (l, r)
    }
}

impl fmt::Display for OMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str("]")
    }
}

/// `M1 >_MUL M2`: cancel common elements, then every remaining element of
/// `M2` must be dominated by a remaining element of `M1`.
pub fn mul_greater(m1: &OMeasure, m2: &OMeasure) -> bool {
    let (l, r) = m1.cancel(m2);
    !l.is_empty() && r.iter().all(|y| l.iter().any(|x| o_greater(*x, *y)))
}

/// `M1 <_MUL M2`.
pub fn mul_less(m1: &OMeasure, m2: &OMeasure) -> bool {
    mul_greater(m2, m1)
}

/// `M1 ≥_MUL M2`.
pub fn mul_geq(m1: &OMeasure, m2: &OMeasure) -> bool {
    m1 == m2 || mul_greater(m1, m2)
}

/// `CL(t)`.
pub fn cl_measure(t: &Term) -> OMeasure {
    match t {
        Term::Var(_) => OMeasure::new(),
        Term::Abs(_, b) => cl_measure(b),
        Term::App(f, a) => cl_measure(f).union(cl_measure(a)),
        Term::Sub(b, x, c) => {
            let k = level(b, x) + 1;
            let mut m = cl_measure(b).union(cl_measure(c).scale(k));
            m.push(OObject::A(k, c.size()));
            m
        }
        Term::Dist(b, x, c) => {
            let k = level(b, x);
            let mut m = cl_measure(b).union(cl_measure(c).scale(k));
            m.push(OObject::B(k));
            m
        }
    }
}
