use std::fmt;

use super::group::{Elem, FiniteGroup};
use super::AlgebraError;

/// A word in a₁,b₁,…,a_g,b_g. Letters are signed generator indices: a_i is
/// 2i−1, b_i is 2i, and a negative sign is the inverse letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    genus: usize,
    letters: Vec<i32>,
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, &l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let g = l.unsigned_abs();
            let name = if g % 2 == 1 { 'a' } else { 'b' };
            write!(f, "{name}{}", g.div_ceil(2))?;
            if l < 0 {
                write!(f, "'")?;
            }
        }
        Ok(())
    }
}

pub fn a(i: usize) -> i32 {
    2 * i as i32 - 1
}

pub fn b(i: usize) -> i32 {
    2 * i as i32
}

impl Word {
    pub fn new(genus: usize, letters: Vec<i32>) -> Result<Self, AlgebraError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize > 2 * genus {
                return Err(AlgebraError::BadLetter { letter: l, genus });
            }
        }
        Ok(Word { genus, letters })
    }

    /// Builds a word from (generator index, exponent) pairs with exponent ±1.
    pub fn from_pairs(genus: usize, pairs: &[(i64, i64)]) -> Result<Self, AlgebraError> {
        let mut letters = Vec::with_capacity(pairs.len());
        for &(g, e) in pairs {
            if e != 1 && e != -1 || g < 1 || g > 2 * genus as i64 {
                return Err(AlgebraError::BadLetter { letter: (g * e) as i32, genus });
            }
            letters.push((g * e) as i32);
        }
        Ok(Word { genus, letters })
    }

    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.letters
            .iter()
            .map(|&l| (l.unsigned_abs() as i64, l.signum() as i64))
            .collect()
    }

    pub(crate) fn raw(genus: usize, letters: Vec<i32>) -> Self {
        debug_assert!(letters.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= 2 * genus));
        Word { genus, letters }
    }

    pub fn empty(genus: usize) -> Self {
        Word { genus, letters: Vec::new() }
    }

    pub fn generator(genus: usize, letter: i32) -> Self {
        Word::raw(genus, vec![letter])
    }

    /// R_g = ∏ a_i b_i a_i⁻¹ b_i⁻¹
    pub fn relator(genus: usize) -> Self {
        let letters = (1..=genus).flat_map(|i| [a(i), b(i), -a(i), -b(i)]).collect();
        Word { genus, letters }
    }

    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse()).reduce_free()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn reduce_free(&self) -> Word {
        Word { genus: self.genus, letters: free_reduce(&self.letters) }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn inverse(&self) -> Word {
        Word {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Concatenation. Both words must live over the same genus.
    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.genus, other.genus, "concatenating words of different genus");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { genus: self.genus, letters }
    }

    /// c w c⁻¹, freely reduced.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse()).reduce_free()
    }

    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; 2 * self.genus];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    pub fn eval(&self, assignment: &[Elem], g: &FiniteGroup) -> Result<Elem, AlgebraError> {
        if assignment.len() != 2 * self.genus {
            return Err(AlgebraError::GenusMismatch {
                expected: 2 * self.genus,
                found: assignment.len(),
            });
        }
        Ok(self.eval_unchecked(assignment, g))
    }

    #[inline]
    pub fn eval_unchecked(&self, assignment: &[Elem], g: &FiniteGroup) -> Elem {
        let mut acc = 0;
        for &l in &self.letters {
            let x = assignment[l.unsigned_abs() as usize - 1];
            acc = g.mul(acc, if l > 0 { x } else { g.inv(x) });
        }
        acc
    }

    /// Replaces generator k by images[k-1] (all images over `target_genus`), freely reduced.
    pub fn substitute(&self, images: &[Word], target_genus: usize) -> Word {
        let mut letters = Vec::new();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|&x| -x));
            }
        }
        Word { genus: target_genus, letters: free_reduce(&letters) }
    }

    /// Relabels handle i as handle i+k inside genus+k.
    pub fn shift(&self, k: usize) -> Word {
        let off = 2 * k as i32;
        Word {
            genus: self.genus + k,
            letters: self.letters.iter().map(|&l| l + l.signum() * off).collect(),
        }
    }

    /// Deletes a₁ and b₁ and relabels handle i+1 as handle i.
    pub fn kill_first_handle(&self) -> Word {
        assert!(self.genus >= 1);
        let letters: Vec<i32> = self
            .letters
            .iter()
            .filter(|l| l.unsigned_abs() > 2)
            .map(|&l| l - l.signum() * 2)
            .collect();
        Word { genus: self.genus - 1, letters: free_reduce(&letters) }
    }

    /// Deletes the letters of one generator (signed index ignored).
    pub fn delete_generator(&self, gen: i32) -> Word {
        let g = gen.unsigned_abs();
        let letters: Vec<i32> = self.letters.iter().copied().filter(|l| l.unsigned_abs() != g).collect();
        Word { genus: self.genus, letters: free_reduce(&letters) }
    }

    /// Returns (p, core) with self = p · core · p⁻¹ after free reduction and core cyclically reduced.
    pub fn cyclic_core(&self) -> (Word, Word) {
        let w = free_reduce(&self.letters);
        let mut i = 0;
        let mut j = w.len();
        while j >= i + 2 && w[i] == -w[j - 1] {
            i += 1;
            j -= 1;
        }
        (
            Word { genus: self.genus, letters: w[..i].to_vec() },
            Word { genus: self.genus, letters: w[i..j].to_vec() },
        )
    }

    pub fn cyclically_reduce(&self) -> Word {
        self.cyclic_core().1
    }
}

pub(crate) fn free_reduce(letters: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// True iff u and v are conjugate in the free group.
pub fn free_conjugate_test(u: &Word, v: &Word) -> bool {
    free_conjugator(u, v).is_some()
}

/// Some c with c u c⁻¹ = v in the free group.
pub fn free_conjugator(u: &Word, v: &Word) -> Option<Word> {
    if u.genus != v.genus {
        return None;
    }
    let (p, cu) = u.cyclic_core();
    let (q, cv) = v.cyclic_core();
    if cu.len() != cv.len() {
        return None;
    }
    let n = cu.len();
    if n == 0 {
        return Some(Word::empty(u.genus));
    }
    for k in 0..n {
        if (0..n).all(|i| cu.letters[(i + k) % n] == cv.letters[i]) {
            // cu = x y with |x| = k, cv = y x = x⁻¹ cu x
            let x = Word { genus: u.genus, letters: cu.letters[..k].to_vec() };
            let c = q.concat(&x.inverse()).concat(&p.inverse()).reduce_free();
            return Some(c);
        }
    }
    None
}

/// Decides whether w is trivial in π₁(Σ_g).
pub fn surface_trivial(w: &Word) -> bool {
    let g = w.genus;
    if w.abelianization().iter().any(|&x| x != 0) {
        return false;
    }
    if g <= 1 {
        return true;
    }
    dehn_reduce(w).is_empty()
}

pub fn surface_equal(u: &Word, v: &Word) -> bool {
    u.genus == v.genus && surface_trivial(&u.concat(&v.inverse()))
}

/// Dehn's algorithm: repeatedly replace a subword longer than half of a cyclic
/// rotation of R_g^{±1} by the inverse of the complementary piece.
pub fn dehn_reduce(w: &Word) -> Word {
    let g = w.genus;
    if g < 2 {
        return w.reduce_free();
    }
    let rel = Word::relator(g);
    let n = rel.len();
    let mut rotations: Vec<Vec<i32>> = Vec::with_capacity(2 * n);
    for r in [&rel.letters, &rel.inverse().letters] {
        for k in 0..n {
            rotations.push((0..n).map(|i| r[(i + k) % n]).collect());
        }
    }
    let mut cur = free_reduce(&w.letters);
    'outer: loop {
        for i in 0..cur.len() {
            for r in &rotations {
                if r[0] != cur[i] {
                    continue;
                }
                let mut l = 1;
                while l < n && i + l < cur.len() && cur[i + l] == r[l] {
                    l += 1;
                }
                if 2 * l > n {
                    let rep: Vec<i32> = r[l..].iter().rev().map(|&x| -x).collect();
                    cur.splice(i..i + l, rep);
                    cur = free_reduce(&cur);
                    continue 'outer;
                }
            }
        }
        break;
    }
    Word { genus: g, letters: cur }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(g: usize, l: &[i32]) -> Word {
        Word::new(g, l.to_vec()).unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        assert!(w(1, &[1, -1]).reduce_free().is_empty());
        assert_eq!(w(2, &[1, 2, -2, 3]).reduce_free(), w(2, &[1, 3]));
        assert_eq!(Word::relator(2).reduce_free(), Word::relator(2));
    }

    #[test]
    fn eval_examples() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(Word::empty(1).eval(&[1, 2], &z4).unwrap(), 0);
        assert_eq!(w(1, &[1]).eval(&[3, 2], &z4).unwrap(), 3);
        assert_eq!(Word::relator(1).eval(&[3, 2], &z4).unwrap(), 0);
        assert!(w(1, &[1]).eval(&[3], &z4).is_err());
    }

    #[test]
    fn conjugacy_examples() {
        let r2 = Word::relator(2);
        let b1 = Word::generator(2, 2);
        assert!(free_conjugate_test(&r2, &r2.conjugate_by(&b1.inverse())));
        assert!(!free_conjugate_test(&w(2, &[1]), &w(2, &[3])));
        let a1 = Word::generator(1, 1);
        let b1 = Word::generator(1, 2);
        let lhs = Word::commutator(&b1, &a1.inverse());
        let rhs = Word::commutator(&a1, &b1);
        // a₁⁻¹[a₁,b₁]a₁ reduces to [b₁,a₁⁻¹]
        assert_eq!(rhs.conjugate_by(&a1.inverse()), lhs);
        assert!(free_conjugate_test(&lhs, &rhs));
    }

    #[test]
    fn conjugator_is_correct() {
        let u = w(2, &[1, 2, -1, 3, 4]);
        let c = w(2, &[2, 3, -1]);
        let v = u.conjugate_by(&c);
        let found = free_conjugator(&u, &v).unwrap();
        assert_eq!(u.conjugate_by(&found), v.reduce_free());
    }

    #[test]
    fn dehn_examples() {
        let r2 = Word::relator(2);
        assert!(surface_trivial(&r2));
        assert!(surface_trivial(&r2.inverse()));
        let c = w(2, &[3, 2, 2]);
        assert!(surface_trivial(&r2.conjugate_by(&c)));
        // [a1,b1] equals [a2,b2]⁻¹
        let lhs = Word::commutator(&Word::generator(2, 1), &Word::generator(2, 2));
        let rhs = Word::commutator(&Word::generator(2, 3), &Word::generator(2, 4)).inverse();
        assert!(surface_equal(&lhs, &rhs));
        assert!(!surface_trivial(&lhs));
        assert!(!surface_trivial(&w(2, &[1, 3, -1, -3])));
    }

    #[test]
    fn kill_and_shift() {
        let x = w(2, &[1, 3, 2, -4]);
        assert_eq!(x.kill_first_handle(), w(1, &[1, -2]));
        assert_eq!(w(1, &[1, -2]).shift(1), w(2, &[3, -4]));
    }
}
