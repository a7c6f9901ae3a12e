use std::collections::HashMap;

use super::{FinCat, Functor, Mor, Obj};

/// An `n`-simplex: a path of `n` composable morphisms listed first-applied
/// first. For `n = 0` the path is empty and `start` is the object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    pub start: Obj,
    pub mors: Vec<Mor>,
}

impl Simplex {
    pub fn object(o: Obj) -> Simplex {
        Simplex {
            start: o,
            mors: Vec::new(),
        }
    }

    /// Path of composable morphisms; `mors` must be nonempty.
    pub fn path(c: &FinCat, mors: Vec<Mor>) -> Simplex {
        Simplex {
            start: c.src(mors[0]),
            mors,
        }
    }

    pub fn degree(&self) -> usize {
        self.mors.len()
    }

    /// Vertex `i` for `0 ≤ i ≤ n`.
    pub fn vertex(&self, c: &FinCat, i: usize) -> Obj {
        if i == 0 {
            self.start
        } else {
            c.tgt(self.mors[i - 1])
        }
    }

    pub fn end(&self, c: &FinCat) -> Obj {
        self.vertex(c, self.degree())
    }

    /// The composite `|u|`; the identity of `start` for a 0-simplex.
    pub fn composite(&self, c: &FinCat) -> Mor {
        c.compose_path(&self.mors).unwrap_or_else(|| c.id(self.start))
    }

    pub fn image(&self, f: &Functor) -> Simplex {
        Simplex {
            start: f.obj(self.start),
            mors: self.mors.iter().map(|&m| f.mor(m)).collect(),
        }
    }

    pub fn display(&self, c: &FinCat) -> String {
        if self.mors.is_empty() {
            c.obj_name(self.start).to_string()
        } else {
            let names: Vec<&str> = self.mors.iter().map(|&m| c.mor_name(m)).collect();
            format!("({})", names.join(", "))
        }
    }
}

/// All `n`-simplices in lexicographic order of their morphism tuples
/// (objects in declaration order for `n = 0`). Degenerate simplices included.
pub fn nerve(c: &FinCat, n: usize) -> Vec<Simplex> {
    if n == 0 {
        return c.object_ids().map(Simplex::object).collect();
    }
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    for m in c.morphism_ids() {
        path.push(m);
        extend(c, n, &mut path, &mut out);
        path.pop();
    }
    out
}

fn extend(c: &FinCat, n: usize, path: &mut Vec<Mor>, out: &mut Vec<Simplex>) {
    if path.len() == n {
        out.push(Simplex::path(c, path.clone()));
        return;
    }
    let last = *path.last().unwrap();
    for &m in c.out_mors(c.tgt(last)) {
        path.push(m);
        extend(c, n, path, out);
        path.pop();
    }
}

/// `|N_n(c)|` by dynamic programming over end objects.
pub fn nerve_count(c: &FinCat, n: usize) -> usize {
    if n == 0 {
        return c.num_objects();
    }
    let mut ending: Vec<usize> = vec![0; c.num_objects()];
    for m in c.morphism_ids() {
        ending[c.tgt(m).0] += 1;
    }
    for _ in 1..n {
        let mut next = vec![0; c.num_objects()];
        for m in c.morphism_ids() {
            next[c.tgt(m).0] += ending[c.src(m).0];
        }
        ending = next;
    }
    ending.iter().sum()
}

/// Positions of the simplices of one degree.
#[derive(Clone, Debug)]
pub struct NerveIndex {
    pub simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
}

impl NerveIndex {
    pub fn new(c: &FinCat, n: usize) -> NerveIndex {
        let simplices = nerve(c, n);
        let index = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        NerveIndex { simplices, index }
    }

    pub fn position(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_has_one_simplex_per_degree() {
        let e = FinCat::terminal();
        for n in 0..6 {
            assert_eq!(nerve(&e, n).len(), 1);
        }
    }

    #[test]
    fn a2_counts() {
        let a2 = FinCat::chain(1);
        assert_eq!(nerve(&a2, 1).len(), 3);
        assert_eq!(nerve(&a2, 2).len(), 4);
        for n in 1..=6 {
            assert_eq!(nerve(&a2, n).len(), n + 2);
            assert_eq!(nerve_count(&a2, n), n + 2);
        }
    }

    #[test]
    fn ordering_is_lexicographic() {
        let c = FinCat::chain(2);
        for n in 1..4 {
            let s = nerve(&c, n);
            for w in s.windows(2) {
                assert!(w[0].mors < w[1].mors);
            }
        }
    }

    #[test]
    fn brute_force_count_on_free_category() {
        let c = FinCat::free_on_dag(&["a", "b", "c"], &[("f", "a", "b"), ("g", "a", "b"), ("h", "b", "c")])
            .unwrap();
        for n in 0..5 {
            // brute force: all n-tuples of morphisms that compose
            let m = c.num_morphisms();
            let mut count = 0;
            let total = m.pow(n as u32);
            for code in 0..total {
                let mut t = Vec::new();
                let mut x = code;
                for _ in 0..n {
                    t.push(Mor(x % m));
                    x /= m;
                }
                if t.windows(2).all(|w| c.tgt(w[0]) == c.src(w[1])) {
                    count += 1;
                }
            }
            let expected = if n == 0 { c.num_objects() } else { count };
            assert_eq!(nerve(&c, n).len(), expected);
            assert_eq!(nerve_count(&c, n), expected);
        }
    }
}
