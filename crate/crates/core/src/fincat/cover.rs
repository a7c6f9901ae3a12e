use std::collections::{HashMap, HashSet};

use super::{nerve, FinCat, Functor, Mor, Obj, Simplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverDegree {
    Finite(usize),
    /// Checked up to `depth`; see [`CoverVerdict::exhaustive`].
    Infinite { depth: usize },
}

impl CoverDegree {
    /// Infinite degree with the default depth `2 · |Mor(U)|`.
    pub fn infinite_default(target: &FinCat) -> CoverDegree {
        CoverDegree::Infinite {
            depth: (2 * target.num_morphisms()).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverVerdict {
    pub covered: bool,
    /// Lexicographically first unhit simplex of the smallest failing degree.
    pub witness: Option<Simplex>,
    /// Largest degree examined.
    pub depth_checked: usize,
    /// Every reachable search state was visited, so the verdict holds in all
    /// degrees, not only up to `depth_checked`.
    pub exhaustive: bool,
}

/// Per-leg sets of objects of the source reachable by a lift of the current
/// path prefix. A simplex is unhit exactly when every set is empty.
type State = (Obj, Vec<Vec<usize>>);

struct Search<'a> {
    target: &'a FinCat,
    legs: &'a [Functor],
    /// `pre[i][u]`: morphisms of leg `i` over `u`.
    pre: Vec<Vec<Vec<Mor>>>,
}

impl<'a> Search<'a> {
    fn new(target: &'a FinCat, legs: &'a [Functor]) -> Self {
        let pre = legs
            .iter()
            .map(|f| {
                let mut p = vec![Vec::new(); target.num_morphisms()];
                for v in f.source.morphism_ids() {
                    p[f.mor(v).0].push(v);
                }
                p
            })
            .collect();
        Search { target, legs, pre }
    }

    fn start(&self, o: Obj) -> State {
        let sets = self
            .legs
            .iter()
            .map(|f| {
                f.source
                    .object_ids()
                    .filter(|&b| f.obj(b) == o)
                    .map(|b| b.0)
                    .collect()
            })
            .collect();
        (o, sets)
    }

    fn step(&self, s: &State, u: Mor) -> State {
        let sets = self
            .legs
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut next: Vec<usize> = self.pre[i][u.0]
                    .iter()
                    .filter(|&&v| s.1[i].binary_search(&f.source.src(v).0).is_ok())
                    .map(|&v| f.source.tgt(v).0)
                    .collect();
                next.sort_unstable();
                next.dedup();
                next
            })
            .collect();
        (self.target.tgt(u), sets)
    }

    fn unhit(s: &State) -> bool {
        s.1.iter().all(Vec::is_empty)
    }

    /// Lexicographically first path of `len` morphisms from `s` ending unhit.
    fn first_unhit(
        &self,
        s: &State,
        len: usize,
        dead: &mut HashSet<(State, usize)>,
        path: &mut Vec<Mor>,
    ) -> bool {
        if len == 0 {
            return Self::unhit(s);
        }
        if dead.contains(&(s.clone(), len)) {
            return false;
        }
        for &u in self.target.out_mors(s.0) {
            path.push(u);
            if self.first_unhit(&self.step(s, u), len - 1, dead, path) {
                return true;
            }
            path.pop();
        }
        dead.insert((s.clone(), len));
        false
    }
}

/// Joint surjectivity of `N_k` for `k ≤ n` of a family of functors into
/// `target`.
///
/// The search walks paths of `target` while tracking, for every leg, the set
/// of source objects at which a lift of the path can end. A path is unhit
/// exactly when all sets are empty, and extending an unhit path keeps it
/// unhit, which is the padding argument behind checking `N_n` alone. Since
/// the state space is finite, a breadth-first search over states that runs
/// out of new states decides the infinite case exactly.
pub fn is_n_cover(target: &FinCat, legs: &[Functor], degree: CoverDegree) -> CoverVerdict {
    for f in legs {
        assert!(*f.target == *target, "cover legs must share the target");
    }
    let max = match degree {
        CoverDegree::Finite(n) => n,
        CoverDegree::Infinite { depth } => depth,
    };
    let search = Search::new(target, legs);
    let mut seen: HashSet<State> = HashSet::new();
    let mut frontier: Vec<State> = Vec::new();
    for o in target.object_ids() {
        let s = search.start(o);
        if Search::unhit(&s) {
            return CoverVerdict {
                covered: false,
                witness: Some(Simplex::object(o)),
                depth_checked: 0,
                exhaustive: true,
            };
        }
        if seen.insert(s.clone()) {
            frontier.push(s);
        }
    }
    for k in 1..=max {
        let mut next = Vec::new();
        let mut failing = false;
        for s in &frontier {
            for &u in target.out_mors(s.0) {
                let t = search.step(s, u);
                if Search::unhit(&t) {
                    failing = true;
                }
                if seen.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        if failing {
            let mut dead = HashSet::new();
            for o in target.object_ids() {
                let s = search.start(o);
                let mut path = Vec::new();
                if search.first_unhit(&s, k, &mut dead, &mut path) {
                    return CoverVerdict {
                        covered: false,
                        witness: Some(Simplex::path(target, path)),
                        depth_checked: k,
                        exhaustive: true,
                    };
                }
            }
            unreachable!("an unhit state was reached at degree {k}");
        }
        if next.is_empty() {
            return CoverVerdict {
                covered: true,
                witness: None,
                depth_checked: k,
                exhaustive: true,
            };
        }
        frontier = next;
    }
    CoverVerdict {
        covered: true,
        witness: None,
        depth_checked: max,
        exhaustive: frontier.is_empty(),
    }
}

/// `N_k(f)` injective for all `k ≤ n`. Injectivity on morphisms gives
/// injectivity in every positive degree, and on objects through identities.
pub fn is_n_injective(f: &Functor, n: usize) -> bool {
    if n == 0 {
        let mut seen = HashSet::new();
        f.obj_map().iter().all(|o| seen.insert(*o))
    } else {
        f.is_injective_on_morphisms()
    }
}

/// `N_k(f)` surjective for all `k ≤ n`.
pub fn is_n_surjective(f: &Functor, n: usize) -> bool {
    is_n_cover(&f.target, std::slice::from_ref(f), CoverDegree::Finite(n)).covered
}

/// Brute-force joint surjectivity of `N_k` alone, for cross-checks.
pub fn jointly_surjective_in_degree(target: &FinCat, legs: &[Functor], k: usize) -> bool {
    let mut hit: HashMap<Simplex, ()> = HashMap::new();
    for f in legs {
        for s in nerve(&f.source, k) {
            hit.insert(s.image(f), ());
        }
    }
    nerve(target, k).iter().all(|s| hit.contains_key(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn point_inclusions() -> (Arc<FinCat>, Vec<Functor>) {
        let a2 = Arc::new(FinCat::chain(1));
        let legs = [0, 1]
            .iter()
            .map(|&i| {
                let (sub, objs, mors) = a2.full_subcategory(&[Obj(i)]);
                Functor::from_sub(Arc::new(sub), a2.clone(), objs, mors)
            })
            .collect();
        (a2, legs)
    }

    #[test]
    fn identity_is_infinite_cover() {
        let c = Arc::new(FinCat::chain(3));
        let v = is_n_cover(&c, &[Functor::identity(&c)], CoverDegree::infinite_default(&c));
        assert!(v.covered && v.exhaustive);
    }

    #[test]
    fn points_cover_objects_only() {
        let (a2, legs) = point_inclusions();
        assert!(is_n_cover(&a2, &legs, CoverDegree::Finite(0)).covered);
        let v = is_n_cover(&a2, &legs, CoverDegree::Finite(1));
        assert!(!v.covered);
        let w = v.witness.unwrap();
        assert_eq!(w.display(&a2), "(0<=1)");
    }

    #[test]
    fn vposet_chains_form_infinite_cover() {
        let p = Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap());
        let legs: Vec<Functor> = ["t0", "t1"]
            .iter()
            .map(|t| {
                let (sub, o, m) = p.full_subcategory(&[p.find_object("s").unwrap(), p.find_object(t).unwrap()]);
                Functor::from_sub(Arc::new(sub), p.clone(), o, m)
            })
            .collect();
        for depth in [1, 3, 10] {
            let v = is_n_cover(&p, &legs, CoverDegree::Infinite { depth });
            assert!(v.covered);
        }
        assert!(is_n_cover(&p, &legs, CoverDegree::Infinite { depth: 10 }).exhaustive);
    }

    #[test]
    fn shortcut_agrees_with_per_degree_checks() {
        let (a2, legs) = point_inclusions();
        for n in 0..4 {
            let direct = (0..=n).all(|k| jointly_surjective_in_degree(&a2, &legs, k));
            assert_eq!(is_n_cover(&a2, &legs, CoverDegree::Finite(n)).covered, direct);
        }
    }
}
