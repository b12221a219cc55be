use serde::{Deserialize, Serialize};

use super::{MetricAction, OrbitWalker};
use crate::error::{Error, Result};
use crate::group::{Letter, ReducedWord, MAX_RANK};

/// Free group acting on its Cayley tree, generator `k` labelling edges of length `weights[k-1]`.
///
/// The orbit of the identity vertex is the whole vertex set, and
/// `d(u·o, v·o)` is the weighted length of `u⁻¹v`; the tree is 0-hyperbolic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTreeAction {
    weights: Vec<f64>,
}

impl WeightedTreeAction {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_RANK {
            return Err(Error::InvalidParameter(format!("tree rank must lie in 1..={MAX_RANK}")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("tree weight {w} must be positive")));
        }
        Ok(Self { weights })
    }

    /// Unit weights: the word metric.
    pub fn unit(rank: usize) -> Self {
        Self::new(vec![1.0; rank]).expect("unit weights are valid")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    fn weight(&self, l: Letter) -> f64 {
        self.weights[l.unsigned_abs() as usize - 1]
    }

    /// Weighted length of a reduced word.
    pub fn word_length(&self, w: &ReducedWord) -> f64 {
        w.letters().iter().map(|&l| self.weight(l)).sum()
    }

    /// Weighted length of `reduce(u⁻¹v)`.
    pub fn tree_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64> {
        u.check_rank(self.rank())?;
        v.check_rank(self.rank())?;
        Ok(self.word_length(&u.inverse().multiply(v)))
    }

    /// Weighted length of the common prefix of `o⁻¹u` and `o⁻¹v`.
    pub fn tree_gromov_product(&self, u: &ReducedWord, v: &ReducedWord, o: &ReducedWord) -> Result<f64> {
        for x in [u, v, o] {
            x.check_rank(self.rank())?;
        }
        let (x, y) = (o.inverse().multiply(u), o.inverse().multiply(v));
        let k = x.common_prefix_len(&y);
        Ok(x.letters()[..k].iter().map(|&l| self.weight(l)).sum())
    }
}

impl MetricAction for WeightedTreeAction {
    fn rank(&self) -> usize {
        self.weights.len()
    }

    fn delta(&self) -> f64 {
        0.0
    }

    fn orbit_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64> {
        self.tree_distance(u, v)
    }

    fn translation_length(&self, w: &ReducedWord) -> Result<f64> {
        w.check_rank(self.rank())?;
        Ok(self.word_length(&w.cyclic_decomposition().1))
    }

    fn independent(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool> {
        for x in [u, v] {
            x.check_rank(self.rank())?;
            if x.is_identity() {
                return Err(Error::NotLoxodromic(format!("{x} fixes the base vertex")));
            }
        }
        // nontrivial elements of a free group share an axis iff they commute
        Ok(u.multiply(v) != v.multiply(u))
    }

    fn walker(&self, atoms: &[ReducedWord]) -> Result<Box<dyn OrbitWalker + '_>> {
        for a in atoms {
            a.check_rank(self.rank())?;
        }
        Ok(Box::new(TreeWalker {
            tree: self,
            atoms: atoms.iter().map(|a| a.letters().to_vec()).collect(),
            letters: Vec::new(),
            prefix: vec![0.0],
        }))
    }
}

/// Reduced word plus prefix sums of edge weights; cancellation restores the earlier sum exactly.
struct TreeWalker<'a> {
    tree: &'a WeightedTreeAction,
    atoms: Vec<Vec<Letter>>,
    letters: Vec<Letter>,
    prefix: Vec<f64>,
}

impl TreeWalker<'_> {
    #[inline]
    fn push_letter(&mut self, l: Letter) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
            self.prefix.pop();
        } else {
            let top = *self.prefix.last().expect("prefix holds 0");
            self.letters.push(l);
            self.prefix.push(top + self.tree.weight(l));
        }
    }
}

impl OrbitWalker for TreeWalker<'_> {
    fn reset(&mut self, start: &ReducedWord) -> Result<()> {
        start.check_rank(self.tree.rank())?;
        self.letters.clear();
        self.prefix.truncate(1);
        for &l in start.letters() {
            self.push_letter(l);
        }
        Ok(())
    }

    fn push(&mut self, idx: usize) -> Result<()> {
        for k in 0..self.atoms[idx].len() {
            let l = self.atoms[idx][k];
            self.push_letter(l);
        }
        Ok(())
    }

    fn distance(&self) -> f64 {
        *self.prefix.last().expect("prefix holds 0")
    }

    fn word(&self) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.letters.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::words_up_to;
    use proptest::prelude::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 4).unwrap()
    }

    #[test]
    fn distance_examples() {
        let unit = WeightedTreeAction::unit(2);
        assert_eq!(unit.tree_distance(&w("1"), &w("ab")).unwrap(), 2.0);
        assert_eq!(unit.tree_distance(&w("aB"), &w("aB")).unwrap(), 0.0);
        let t = WeightedTreeAction::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(t.tree_distance(&w("1"), &w("aBa")).unwrap(), 7.0);
        assert!(WeightedTreeAction::new(vec![1.0, 0.0]).is_err());
        assert!(t.tree_distance(&w("1"), &w("c")).is_err());
    }

    #[test]
    fn gromov_product_examples() {
        let t = WeightedTreeAction::unit(3);
        let id = ReducedWord::identity();
        assert_eq!(t.tree_gromov_product(&w("ab"), &w("ac"), &id).unwrap(), 1.0);
        assert_eq!(t.tree_gromov_product(&w("abc"), &w("abc"), &id).unwrap(), 3.0);
        assert_eq!(t.tree_gromov_product(&w("a"), &w("A"), &id).unwrap(), 0.0);
        // matches the distance formula
        let (x, y, o) = (w("abC"), w("aBa"), w("b"));
        let formula = MetricAction::gromov_product(&t, &x, &y, &o).unwrap();
        assert_eq!(t.tree_gromov_product(&x, &y, &o).unwrap(), formula);
    }

    #[test]
    fn translation_and_independence() {
        let t = WeightedTreeAction::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(t.translation_length(&w("abA")).unwrap(), 3.0);
        assert_eq!(t.translation_length(&w("ab")).unwrap(), 5.0);
        assert!(t.independent(&w("a"), &w("b")).unwrap());
        assert!(!t.independent(&w("ab"), &w("abab")).unwrap());
        assert!(!t.independent(&w("a"), &w("A")).unwrap());
        assert!(t.independent(&w("1"), &w("a")).is_err());
    }

    #[test]
    fn walker_tracks_word_length() {
        let t = WeightedTreeAction::new(vec![0.5, 2.0]).unwrap();
        let atoms = [w("a"), w("bA"), w("B")];
        let mut walker = t.walker(&atoms).unwrap();
        walker.reset(&w("b")).unwrap();
        for s in [0, 1, 2, 2, 0, 1] {
            walker.push(s).unwrap();
        }
        assert_eq!(walker.distance(), t.word_length(&walker.word()));
        assert_eq!(walker.word(), w("babABBabA"));
    }

    #[test]
    fn exhaustive_zero_hyperbolic_small() {
        let t = WeightedTreeAction::new(vec![1.0, 2.5]).unwrap();
        let ws = words_up_to(2, 2);
        for x in &ws {
            for y in &ws {
                for z in &ws {
                    for o in &ws {
                        let gp = |p, q| t.tree_gromov_product(p, q, o).unwrap();
                        assert!(gp(x, y).min(gp(y, z)) <= gp(x, z) + 1e-12);
                    }
                }
            }
        }
    }

    fn word(max_len: usize) -> impl Strategy<Value = ReducedWord> {
        prop::collection::vec((1..=2i32, any::<bool>()), 0..max_len).prop_map(|v| {
            let raw: Vec<i32> = v.into_iter().map(|(k, inv)| if inv { -k } else { k }).collect();
            crate::group::reduce(&raw, 2).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn left_invariance_and_metric(u in word(10), v in word(10), g in word(10), x in word(10)) {
            let t = WeightedTreeAction::new(vec![0.7, 1.9]).unwrap();
            let d = t.orbit_distance(&u, &v).unwrap();
            prop_assert!((t.orbit_distance(&g.multiply(&u), &g.multiply(&v)).unwrap() - d).abs() <= 1e-8);
            prop_assert!((d - t.orbit_distance(&v, &u).unwrap()).abs() <= 1e-12);
            prop_assert!(d <= t.orbit_distance(&u, &x).unwrap() + t.orbit_distance(&x, &v).unwrap() + 1e-12);
        }

        #[test]
        fn gromov_product_is_bounded(u in word(10), v in word(10), o in word(10)) {
            let t = WeightedTreeAction::new(vec![0.7, 1.9]).unwrap();
            let p = t.tree_gromov_product(&u, &v, &o).unwrap();
            prop_assert!(p >= 0.0);
            let bound = t.orbit_distance(&o, &u).unwrap().min(t.orbit_distance(&o, &v).unwrap());
            prop_assert!(p <= bound + 1e-12);
        }
    }
}
