use std::fmt;

use thiserror::Error;

/// Group elements are indices into the Cayley table; 0 is always the identity.
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table is not square or has an out-of-range entry at row {row}, column {col}")]
    BadTable { row: usize, col: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("multiplication is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("element {a} has no two-sided inverse")]
    NoInverse { a: usize },
}

#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<Elem>,
    inv: Vec<Elem>,
    classes: Vec<Vec<Elem>>,
    class_of: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validates a Cayley table. If the identity is not at index 0 the labels of
    /// the identity and element 0 are swapped, so callers must use the table
    /// returned by [`FiniteGroup::table`] afterwards.
    pub fn load(name: impl Into<String>, table: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::BadTable { row: 0, col: 0 });
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::BadTable { row: r, col: row.len().min(n) });
            }
            if let Some(c) = row.iter().position(|&x| x >= n) {
                return Err(GroupError::BadTable { row: r, col: c });
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        // relabel so the identity sits at 0
        let relabel = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut mul = vec![0 as Elem; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as Elem;
            }
        }
        let at = |a: usize, b: usize| mul[a * n + b] as usize;
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NonAssociative {
                            a: relabel(a),
                            b: relabel(b),
                            c: relabel(c),
                        });
                    }
                }
            }
        }
        let mut inv = vec![0 as Elem; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                .ok_or(GroupError::NoInverse { a: relabel(a) })?;
            inv[a] = b as Elem;
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut members: Vec<Elem> = (0..n)
                .map(|g| at(at(g, x), inv[g] as usize) as Elem)
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m as usize] = classes.len();
            }
            classes.push(members);
        }
        Ok(FiniteGroup {
            name: name.into(),
            order: n,
            mul,
            inv,
            classes,
            class_of,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    /// g x g⁻¹
    #[inline]
    pub fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// a b a⁻¹ b⁻¹
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn pow(&self, x: Elem, n: i64) -> Elem {
        let base = if n < 0 { self.inv(x) } else { x };
        let mut acc = 0;
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, x: Elem) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn classes(&self) -> &[Vec<Elem>] {
        &self.classes
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x as usize]
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| {
                (0..self.order)
                    .map(|b| self.mul[a * self.order + b] as usize)
                    .collect()
            })
            .collect()
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::load(format!("Z{n}"), &table).expect("cyclic table")
    }

    /// Permutations of {0..n} in lexicographic order; (p*q)(i) = q(p(i)).
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        Self::from_elements(format!("S{n}"), &perms, |p, q| p.iter().map(|&i| q[i]).collect())
    }

    pub fn dihedral(n: usize) -> Self {
        // (r, s): r^i s^j, with s r s = r^-1
        let elems: Vec<(usize, usize)> = (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        Self::from_elements(format!("D{n}"), &elems, |&(i1, j1), &(i2, j2)| {
            let i = if j1 == 0 { (i1 + i2) % n } else { (i1 + n - i2) % n };
            (i, (j1 + j2) % 2)
        })
    }

    pub fn quaternion() -> Self {
        // (sign, unit) with unit in 1,i,j,k
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let elems: Vec<(bool, usize)> = [false, true]
            .iter()
            .flat_map(|&s| (0..4).map(move |u| (s, u)))
            .collect();
        Self::from_elements("Q8", &elems, |&(s1, u1), &(s2, u2)| {
            let (s, u) = UNIT[u1][u2];
            (s ^ s1 ^ s2, u)
        })
    }

    /// Builds a group from an explicit element list (identity first) and a product.
    pub fn from_elements<T: PartialEq + Clone>(
        name: impl Into<String>,
        elems: &[T],
        op: impl Fn(&T, &T) -> T,
    ) -> Self {
        let index = |x: &T| elems.iter().position(|y| y == x).expect("closed product");
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| index(&op(a, b))).collect())
            .collect();
        Self::load(name, &table).expect("valid group")
    }

    /// The default list of test groups.
    pub fn test_groups() -> Vec<FiniteGroup> {
        vec![
            Self::cyclic(2),
            Self::cyclic(3),
            Self::cyclic(4),
            Self::symmetric(3),
            Self::quaternion(),
        ]
    }

    pub fn by_name(name: &str) -> Option<FiniteGroup> {
        let lower = name.to_ascii_lowercase();
        let num = |p: &str| lower.strip_prefix(p).and_then(|s| s.parse::<usize>().ok());
        if lower == "q8" {
            return Some(Self::quaternion());
        }
        if lower == "trivial" {
            return Some(Self::trivial());
        }
        if let Some(n) = num("z").filter(|&n| n >= 1) {
            return Some(Self::cyclic(n));
        }
        if let Some(n) = num("s").filter(|&n| (1..=6).contains(&n)) {
            return Some(Self::symmetric(n));
        }
        if let Some(n) = num("d").filter(|&n| n >= 1) {
            return Some(Self::dihedral(n));
        }
        None
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group_has_one_class() {
        let g = FiniteGroup::load("1", &[vec![0]]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.classes().len(), 1);
    }

    #[test]
    fn class_counts() {
        assert_eq!(FiniteGroup::cyclic(4).classes().len(), 4);
        assert_eq!(FiniteGroup::symmetric(3).classes().len(), 3);
        assert_eq!(FiniteGroup::quaternion().classes().len(), 5);
        assert_eq!(FiniteGroup::symmetric(4).classes().len(), 5);
        assert_eq!(FiniteGroup::dihedral(4).classes().len(), 5);
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // Z/3 with identity at index 2
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::load("z3", &t).unwrap();
        for x in g.elements() {
            assert_eq!(g.mul(0, x), x);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            FiniteGroup::load("x", &[vec![0, 1], vec![1, 2]]),
            Err(GroupError::BadTable { row: 1, col: 1 })
        );
        assert_eq!(
            FiniteGroup::load("x", &[vec![1, 1], vec![1, 1]]),
            Err(GroupError::NoIdentity)
        );
        // identity 0, but 1*1 = 1 and 1 has no inverse
        assert_eq!(
            FiniteGroup::load("x", &[vec![0, 1], vec![1, 1]]),
            Err(GroupError::NoInverse { a: 1 })
        );
        // a loop that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::load("x", &t),
            Err(GroupError::NonAssociative { .. })
        ));
    }

    #[test]
    fn element_orders_of_q8() {
        let q = FiniteGroup::quaternion();
        let mut orders: Vec<usize> = q.elements().map(|x| q.element_order(x)).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 4, 4, 4, 4, 4, 4]);
    }
}
