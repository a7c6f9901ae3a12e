use crate::fincat::{decomposition_check, Functor, Ideal, Mor, SetBifunctor};
use crate::qlinalg::{is_exact_sequence, Flanks, Matrix};
use crate::scalar::Scalar;

use super::{BimodError, Bimodule, RawBimodule};

/// `0 → M_𝒵 → M → M_𝒱 → 0` for a bimodule over `1_U` and a decomposition
/// `Mor(U) = 𝒵 ⊔ 𝒱` with `𝒵` an ideal.
#[derive(Clone, Debug)]
pub struct SupportSplit<F: Scalar> {
    /// Spaces of `M` over `𝒵`, zero elsewhere.
    pub sub: Bimodule<F>,
    /// Spaces of `M` over `𝒱`, zero elsewhere; actions landing in `𝒵` vanish.
    pub quotient: Bimodule<F>,
    pub inclusion: Vec<Matrix<F>>,
    pub projection: Vec<Matrix<F>>,
}

impl<F: Scalar> SupportSplit<F> {
    /// Indices of spaces where `0 → M_𝒵 → M → M_𝒱 → 0` fails to be exact.
    pub fn inexact_spaces(&self) -> Vec<usize> {
        (0..self.inclusion.len())
            .filter(|&k| {
                let maps = [self.inclusion[k].clone(), self.projection[k].clone()];
                !is_exact_sequence(&maps, Flanks::SHORT).map(|e| e.is_exact()).unwrap_or(false)
            })
            .collect()
    }
}

/// Splits `M` by support; `v` is the inclusion of the complement of `z`.
pub fn support_split<F: Scalar>(
    m: &Bimodule<F>,
    z: &Ideal,
    v: &Functor,
) -> Result<SupportSplit<F>, BimodError> {
    let base = &m.left.base;
    if *m.carrier != SetBifunctor::identity(base) || !decomposition_check(base, z, v) {
        return Err(BimodError::NotADecomposition);
    }
    let keep = |inside: bool| {
        let mut raw: RawBimodule<F> = m.to_raw();
        raw.bases.retain(|k, _| z.contains(Mor(k.0)) == inside);
        raw.left_act
            .retain(|k, _| z.contains(Mor(k.2 .0)) == inside && raw.bases.contains_key(&k.2));
        raw.right_act
            .retain(|k, _| z.contains(Mor(k.0 .0)) == inside && raw.bases.contains_key(&k.0));
        let bases = raw.bases.clone();
        let left = m.left.clone();
        let right = m.right.clone();
        let carrier = m.carrier.clone();
        // drop terms landing outside the kept spaces
        raw.left_act.retain(|&(g, _, k, _), _| {
            let (u, _, tgt) = left.key(g);
            bases.contains_key(&(carrier.act_left(u, k.0), k.1, tgt))
        });
        raw.right_act.retain(|&(k, _, h, _), _| {
            let (w, src, _) = right.key(h);
            bases.contains_key(&(carrier.act_right(k.0, w), src, k.2))
        });
        Bimodule::assemble(raw).map_err(|_| BimodError::NotADecomposition)
    };
    let sub = keep(true)?;
    let quotient = keep(false)?;
    if !quotient.axiom_violations().is_empty() || !sub.axiom_violations().is_empty() {
        return Err(BimodError::NotADecomposition);
    }
    let mut inclusion = Vec::new();
    let mut projection = Vec::new();
    for k in 0..m.num_spaces() {
        let d = m.dim(k);
        let inside = z.contains(Mor(m.key(k).0));
        inclusion.push(if inside { Matrix::identity(d) } else { Matrix::zeros(d, 0) });
        projection.push(if inside { Matrix::zeros(0, d) } else { Matrix::identity(d) });
    }
    Ok(SupportSplit {
        sub,
        quotient,
        inclusion,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fincat::FinCat;
    use crate::mapgraded::GradedCat;
    use crate::Q;

    fn chain2() -> (Arc<FinCat>, Bimodule<Q>) {
        let c = Arc::new(FinCat::chain(1));
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&c));
        (c, Bimodule::identity(&a))
    }

    #[test]
    fn empty_support() {
        let (c, one) = chain2();
        let z = Ideal::new(c.clone(), []).unwrap();
        let v = z.complement().unwrap();
        let split = support_split(&one, &z, &v).unwrap();
        assert_eq!(split.sub.total_dim(), 0);
        assert!(split.quotient.structurally_equal(&one));
        assert!(split.inexact_spaces().is_empty());
    }

    #[test]
    fn off_diagonal_support() {
        let (c, one) = chain2();
        let off: Vec<Mor> = c.morphism_ids().filter(|&m| !c.is_identity(m)).collect();
        let z = Ideal::new(c.clone(), off).unwrap();
        let v = z.complement().unwrap();
        let split = support_split(&one, &z, &v).unwrap();
        assert_eq!(split.sub.total_dim(), 1);
        assert_eq!(split.quotient.total_dim(), 2);
        for k in 0..one.num_spaces() {
            let diag = c.is_identity(Mor(one.key(k).0));
            assert_eq!(split.sub.dim(k) == 0, diag);
        }
        assert!(split.inexact_spaces().is_empty());
    }

    #[test]
    fn bad_decomposition() {
        let (c, one) = chain2();
        let z = Ideal::new(c.clone(), []).unwrap();
        let other = Ideal::new(c.clone(), c.morphism_ids().filter(|&m| !c.is_identity(m))).unwrap();
        let v = other.complement().unwrap();
        assert_eq!(support_split(&one, &z, &v).unwrap_err(), BimodError::NotADecomposition);
    }
}
