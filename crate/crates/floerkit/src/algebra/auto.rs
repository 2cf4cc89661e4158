use std::fmt;

use super::word::{a, b, free_conjugator, surface_equal, Word};
use super::AlgebraError;

/// An automorphism of π₁(Σ_g) given by generator images together with the
/// images of its inverse. Generator k is sent to `images[k-1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SurfaceAutomorphism {
    genus: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

impl fmt::Debug for SurfaceAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Aut{}[", self.genus)?;
        for (k, w) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "]")
    }
}

impl SurfaceAutomorphism {
    /// Validates relator conjugacy for both directions and that the two maps are
    /// mutually inverse in the surface group.
    pub fn new(genus: usize, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self, AlgebraError> {
        if images.len() != 2 * genus || inverse_images.len() != 2 * genus {
            return Err(AlgebraError::GenusMismatch {
                expected: 2 * genus,
                found: images.len().min(inverse_images.len()),
            });
        }
        for w in images.iter().chain(&inverse_images) {
            if w.genus() != genus {
                return Err(AlgebraError::GenusMismatch { expected: genus, found: w.genus() });
            }
        }
        let images: Vec<Word> = images.iter().map(Word::reduce_free).collect();
        let inverse_images: Vec<Word> = inverse_images.iter().map(Word::reduce_free).collect();
        let phi = SurfaceAutomorphism { genus, images, inverse_images };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let r = Word::relator(self.genus);
        if free_conjugator(&r, &self.apply(&r)).is_none() {
            return Err(AlgebraError::NotAutomorphism(format!(
                "image of the relator {} is not conjugate to the relator",
                self.apply(&r)
            )));
        }
        if free_conjugator(&r, &self.apply_inverse(&r)).is_none() {
            return Err(AlgebraError::NotAutomorphism(
                "inverse image of the relator is not conjugate to the relator".into(),
            ));
        }
        for k in 1..=2 * self.genus as i32 {
            let g = Word::generator(self.genus, k);
            if !surface_equal(&self.apply(&self.apply_inverse(&g)), &g) {
                return Err(AlgebraError::NotAutomorphism(format!(
                    "phi(phi^-1(x{k})) differs from x{k}"
                )));
            }
            if !surface_equal(&self.apply_inverse(&self.apply(&g)), &g) {
                return Err(AlgebraError::NotAutomorphism(format!(
                    "phi^-1(phi(x{k})) differs from x{k}"
                )));
            }
        }
        Ok(())
    }

    pub fn identity(genus: usize) -> Self {
        let gens: Vec<Word> = (1..=2 * genus as i32).map(|k| Word::generator(genus, k)).collect();
        SurfaceAutomorphism { genus, images: gens.clone(), inverse_images: gens }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images, self.genus)
    }

    pub fn apply_inverse(&self, w: &Word) -> Word {
        w.substitute(&self.inverse_images, self.genus)
    }

    pub fn inverse(&self) -> Self {
        SurfaceAutomorphism {
            genus: self.genus,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// x ↦ ψ(φ(x)): φ acts first.
    pub fn compose(&self, psi: &SurfaceAutomorphism) -> Result<Self, AlgebraError> {
        if self.genus != psi.genus {
            return Err(AlgebraError::GenusMismatch { expected: self.genus, found: psi.genus });
        }
        Ok(SurfaceAutomorphism {
            genus: self.genus,
            images: self.images.iter().map(|w| psi.apply(w)).collect(),
            inverse_images: psi.inverse_images.iter().map(|w| self.apply_inverse(w)).collect(),
        })
    }

    pub fn power(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.genus);
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base).expect("same genus");
        }
        acc
    }

    /// Equality in Aut(π₁Σ_g): every generator image agrees in the surface group.
    pub fn surface_eq(&self, other: &SurfaceAutomorphism) -> bool {
        self.genus == other.genus
            && self.images.iter().zip(&other.images).all(|(u, v)| surface_equal(u, v))
    }

    pub fn is_identity(&self) -> bool {
        self.surface_eq(&Self::identity(self.genus))
    }

    /// Rows are the abelianized images; invariant under surface-group equality.
    pub fn abelian_matrix(&self) -> Vec<Vec<i64>> {
        self.images.iter().map(Word::abelianization).collect()
    }

    /// c with φ(R_g) = c R_g c⁻¹ in the free group.
    pub fn relator_conjugator(&self) -> Word {
        let r = Word::relator(self.genus);
        free_conjugator(&r, &self.apply(&r)).expect("validated automorphism")
    }

    /// Extends φ to Σ_{g+1} acting on handles 2..g+1 and fixing the first
    /// handle up to the conjugation needed to keep the relator.
    pub fn lift(&self) -> Self {
        let g = self.genus;
        let c = self.relator_conjugator().shift(1);
        let d = self.apply_inverse(&self.relator_conjugator()).inverse().shift(1);
        let build = |imgs: &[Word], conj: &Word| {
            let mut out = vec![
                Word::generator(g + 1, 1).conjugate_by(conj),
                Word::generator(g + 1, 2).conjugate_by(conj),
            ];
            out.extend(imgs.iter().map(|w| w.shift(1)));
            out
        };
        SurfaceAutomorphism {
            genus: g + 1,
            images: build(&self.images, &c),
            inverse_images: build(&self.inverse_images, &d),
        }
    }

    fn from_gens(genus: usize, images: Vec<Vec<i32>>, inverse: Vec<Vec<i32>>) -> Self {
        let mk = |v: Vec<Vec<i32>>| v.into_iter().map(|l| Word::raw(genus, l).reduce_free()).collect();
        let phi = SurfaceAutomorphism { genus, images: mk(images), inverse_images: mk(inverse) };
        debug_assert!(phi.validate().is_ok(), "built-in automorphism failed validation");
        phi
    }

    fn identity_letters(genus: usize) -> Vec<Vec<i32>> {
        (1..=2 * genus as i32).map(|k| vec![k]).collect()
    }

    /// Dehn twist along a_i: b_i ↦ b_i a_i.
    pub fn twist_a(genus: usize, i: usize) -> Self {
        assert!((1..=genus).contains(&i));
        let mut img = Self::identity_letters(genus);
        let mut inv = Self::identity_letters(genus);
        img[2 * i - 1] = vec![b(i), a(i)];
        inv[2 * i - 1] = vec![b(i), -a(i)];
        Self::from_gens(genus, img, inv)
    }

    /// Dehn twist along b_i: a_i ↦ a_i b_i.
    pub fn twist_b(genus: usize, i: usize) -> Self {
        assert!((1..=genus).contains(&i));
        let mut img = Self::identity_letters(genus);
        let mut inv = Self::identity_letters(genus);
        img[2 * i - 2] = vec![a(i), b(i)];
        inv[2 * i - 2] = vec![a(i), -b(i)];
        Self::from_gens(genus, img, inv)
    }

    /// The genus-1 T-move a ↦ a, b ↦ ba.
    pub fn t_move() -> Self {
        Self::twist_a(1, 1)
    }

    /// Quarter turn on handle i. On the torus this is a ↦ b, b ↦ a⁻¹; in
    /// higher genus a_i ↦ a_i b_i a_i⁻¹, b_i ↦ a_i⁻¹, which fixes R_g letter for letter.
    pub fn s_move(genus: usize, i: usize) -> Self {
        assert!((1..=genus).contains(&i));
        let mut img = Self::identity_letters(genus);
        let mut inv = Self::identity_letters(genus);
        if genus == 1 {
            img[0] = vec![b(1)];
            img[1] = vec![-a(1)];
            inv[0] = vec![-b(1)];
            inv[1] = vec![a(1)];
        } else {
            img[2 * i - 2] = vec![a(i), b(i), -a(i)];
            img[2 * i - 1] = vec![-a(i)];
            inv[2 * i - 2] = vec![-b(i)];
            inv[2 * i - 1] = vec![b(i), a(i), -b(i)];
        }
        Self::from_gens(genus, img, inv)
    }

    /// Exchanges handles i and i+1: a_i ↦ a_{i+1}, b_i ↦ b_{i+1}, and the
    /// old pair returns conjugated by [a_{i+1},b_{i+1}]⁻¹ so that R_g is fixed.
    pub fn handle_swap(genus: usize, i: usize) -> Self {
        assert!(i >= 1 && i < genus);
        let j = i + 1;
        let conj = |x: i32, c: &[i32]| {
            let mut v = c.to_vec();
            v.push(x);
            v.extend(c.iter().rev().map(|&l| -l));
            v
        };
        let c = [b(j), a(j), -b(j), -a(j)];
        let d = [a(i), b(i), -a(i), -b(i)];
        let mut img = Self::identity_letters(genus);
        let mut inv = Self::identity_letters(genus);
        img[2 * i - 2] = vec![a(j)];
        img[2 * i - 1] = vec![b(j)];
        img[2 * j - 2] = conj(a(i), &c);
        img[2 * j - 1] = conj(b(i), &c);
        inv[2 * j - 2] = vec![a(i)];
        inv[2 * j - 1] = vec![b(i)];
        inv[2 * i - 2] = conj(a(j), &d);
        inv[2 * i - 1] = conj(b(j), &d);
        Self::from_gens(genus, img, inv)
    }

    /// A genus-1 automorphism ψ with ψ(a₁) of homology class q·a₁ + p·b₁,
    /// built from Dehn twists by the Euclidean algorithm. Attaching along
    /// ψ(a₁) after a 1-handle along a₁ gives the lens space L(p, q).
    pub fn lens_transport(p: u64, q: u64) -> Result<Self, AlgebraError> {
        if p == 0 || gcd(p, q) != 1 {
            return Err(AlgebraError::NotAutomorphism(format!("L({p},{q}) needs gcd(p,q) = 1, p > 0")));
        }
        if q == 0 {
            return Ok(Self::s_move(1, 1));
        }
        let (mut x, mut y) = (q, p);
        let mut ops = Vec::new();
        while (x, y) != (1, 0) {
            if y >= x {
                y -= x;
                ops.push(Self::twist_b(1, 1));
            } else {
                x -= y;
                ops.push(Self::twist_a(1, 1));
            }
        }
        let mut psi = Self::identity(1);
        for op in ops.iter().rev() {
            psi = psi.compose(op)?;
        }
        Ok(psi)
    }

    /// The registered library of named automorphisms at a genus.
    pub fn library(genus: usize) -> Vec<(String, SurfaceAutomorphism)> {
        let mut out = vec![("id".to_string(), Self::identity(genus))];
        for i in 1..=genus {
            out.push((format!("S{i}"), Self::s_move(genus, i)));
            out.push((format!("Ta{i}"), Self::twist_a(genus, i)));
            out.push((format!("Tb{i}"), Self::twist_b(genus, i)));
        }
        for i in 1..genus {
            out.push((format!("H{i}{}", i + 1), Self::handle_swap(genus, i)));
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_is_valid() {
        for g in 0..=3 {
            for (name, phi) in SurfaceAutomorphism::library(g) {
                assert!(phi.validate().is_ok(), "{name} at genus {g}");
                assert!(phi.lift().validate().is_ok(), "lift of {name} at genus {g}");
            }
        }
    }

    #[test]
    fn s_move_has_order_four_on_torus() {
        let s = SurfaceAutomorphism::s_move(1, 1);
        let s4 = s.power(4);
        assert_eq!(s4.images(), SurfaceAutomorphism::identity(1).images());
        assert!(!s.power(2).is_identity());
    }

    #[test]
    fn handle_swap_squared_is_identity_on_abelianization() {
        let h = SurfaceAutomorphism::handle_swap(2, 1);
        let h2 = h.compose(&h).unwrap();
        assert_eq!(h2.abelian_matrix(), SurfaceAutomorphism::identity(2).abelian_matrix());
        assert!(h.compose(&h.inverse()).unwrap().is_identity());
    }

    #[test]
    fn compose_with_identity() {
        let t = SurfaceAutomorphism::twist_b(2, 2);
        let id = SurfaceAutomorphism::identity(2);
        assert_eq!(t.compose(&id).unwrap(), t);
        assert_eq!(id.compose(&t).unwrap(), t);
        assert!(t.compose(&SurfaceAutomorphism::identity(1)).is_err());
    }

    #[test]
    fn lens_transport_homology() {
        for p in 1..=6u64 {
            for q in 0..p.max(2) {
                if gcd(p, q) != 1 {
                    continue;
                }
                let psi = SurfaceAutomorphism::lens_transport(p, q).unwrap();
                psi.validate().unwrap();
                let h = psi.images()[0].abelianization();
                if q == 0 {
                    assert_eq!(h, vec![0, 1]);
                } else {
                    assert_eq!(h, vec![q as i64, p as i64]);
                }
            }
        }
        let l51 = SurfaceAutomorphism::lens_transport(5, 1).unwrap();
        assert_eq!(l51.images()[0].letters(), &[1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn rejects_non_automorphism() {
        let g = 1;
        let imgs = vec![Word::generator(g, 1), Word::generator(g, 1)];
        assert!(SurfaceAutomorphism::new(g, imgs.clone(), imgs).is_err());
        // plain handle swap at genus 3 does not preserve the relator
        let gens: Vec<Word> = [3, 4, 1, 2, 5, 6].iter().map(|&k| Word::generator(3, k)).collect();
        assert!(SurfaceAutomorphism::new(3, gens.clone(), gens).is_err());
    }
}
