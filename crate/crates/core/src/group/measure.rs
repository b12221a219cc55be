use std::collections::BTreeMap;

use rand::Rng;

use super::word::ReducedWord;
use crate::error::{Error, Result};

/// Default cap on the support size of a convolution.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

const MASS_TOL: f64 = 1e-9;

/// Finitely supported probability measure on reduced words.
///
/// Atoms are kept in shortlex order with strictly positive masses summing to 1;
/// a parallel cumulative table drives inverse-CDF sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure {
    atoms: Vec<(ReducedWord, f64)>,
    cumulative: Vec<f64>,
}

impl FiniteMeasure {
    /// Builds a measure, merging repeated words. The masses must be positive and
    /// sum to 1 within 1e-9; they are renormalized to sum to 1.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ReducedWord, f64)>,
    {
        let mut map = BTreeMap::new();
        for (w, m) in atoms {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidMeasure(format!("mass {m} at {w} is not positive")));
            }
            *map.entry(w).or_insert(0.0) += m;
        }
        if map.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let total = pairwise_sum(&map.values().copied().collect::<Vec<_>>());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(Self::from_sorted(map.into_iter().map(|(w, m)| (w, m / total)).collect()))
    }

    fn from_sorted(atoms: Vec<(ReducedWord, f64)>) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = atoms
            .iter()
            .map(|(_, m)| {
                acc += m;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        Self { atoms, cumulative }
    }

    pub fn point_mass(w: ReducedWord) -> Self {
        Self::from_sorted(vec![(w, 1.0)])
    }

    /// Uniform measure on the given (deduplicated) words.
    pub fn uniform<I: IntoIterator<Item = ReducedWord>>(words: I) -> Result<Self> {
        let mut ws: Vec<ReducedWord> = words.into_iter().collect();
        ws.sort();
        ws.dedup();
        if ws.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let m = 1.0 / ws.len() as f64;
        Ok(Self::from_sorted(ws.into_iter().map(|w| (w, m)).collect()))
    }

    /// Uniform measure on the `2·rank` generators and their inverses.
    pub fn uniform_generators(rank: usize) -> Self {
        let ws = (1..=rank as i8).flat_map(|k| [ReducedWord::letter(k), ReducedWord::letter(-k)]);
        Self::uniform(ws).expect("rank is positive")
    }

    pub fn atoms(&self) -> &[(ReducedWord, f64)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &ReducedWord> {
        self.atoms.iter().map(|(w, _)| w)
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn mass(&self, w: &ReducedWord) -> f64 {
        self.atoms
            .binary_search_by(|(x, _)| x.cmp(w))
            .map(|i| self.atoms[i].1)
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.atoms.iter().map(|(_, m)| *m).collect::<Vec<_>>())
    }

    /// Largest generator index occurring in the support.
    pub fn max_generator(&self) -> usize {
        self.support().map(ReducedWord::max_generator).max().unwrap_or(0)
    }

    /// Whether `μ(w) = μ(w⁻¹)` for every word, within 1e-12.
    pub fn is_symmetric(&self) -> bool {
        self.atoms
            .iter()
            .all(|(w, m)| (self.mass(&w.inverse()) - m).abs() <= 1e-12)
    }

    /// Index of an atom drawn with probability equal to its mass.
    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|&c| c <= u)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &ReducedWord {
        &self.atoms[self.sample_index(rng)].0
    }

    /// `(μ * ν)(w) = Σ μ(u) ν(u⁻¹w)`; fails once the support would exceed `cap`.
    pub fn convolve(&self, other: &FiniteMeasure, cap: usize) -> Result<FiniteMeasure> {
        let mut map: BTreeMap<ReducedWord, f64> = BTreeMap::new();
        for (u, mu) in &self.atoms {
            for (v, mv) in &other.atoms {
                *map.entry(u.multiply(v)).or_insert(0.0) += mu * mv;
                if map.len() > cap {
                    return Err(Error::ConvolutionBlowUp { cap });
                }
            }
        }
        Ok(Self::from_sorted(map.into_iter().collect()))
    }

    /// `n`-fold convolution power by repeated squaring.
    pub fn power(&self, n: usize, cap: usize) -> Result<FiniteMeasure> {
        if n == 0 {
            return Err(Error::InvalidParameter("convolution power must be at least 1".into()));
        }
        let mut result: Option<FiniteMeasure> = None;
        let mut base = self.clone();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve(&base, cap)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.convolve(&base, cap)?;
        }
        Ok(result.expect("n >= 1"))
    }

    /// Shannon entropy `-Σ μ(g) ln μ(g)` in nats.
    pub fn entropy(&self) -> f64 {
        let terms: Vec<f64> = self.atoms.iter().map(|(_, m)| -m * m.ln()).collect();
        pairwise_sum(&terms)
    }

    /// `ν = (μ^{2N} − α μ_S²)/(1 − α)` where `μ_S` is uniform on `s`.
    ///
    /// Requires `μ^{2N}(w) ≥ α μ_S²(w)` on the support of `μ_S²`; the first
    /// violating word (shortlex) is reported otherwise.
    pub fn decompose(
        &self,
        s: &[ReducedWord],
        alpha: f64,
        n: usize,
        cap: usize,
    ) -> Result<FiniteMeasure> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        let mu_s = FiniteMeasure::uniform(s.iter().cloned())?;
        if !mu_s.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let mu_s2 = mu_s.convolve(&mu_s, cap)?;
        let big = self.power(2 * n, cap)?;
        for (w, m) in mu_s2.atoms() {
            let deficit = alpha * m - big.mass(w);
            if deficit > 1e-15 {
                return Err(Error::DominationFailure { word: w.to_string(), deficit });
            }
        }
        let mut atoms = Vec::with_capacity(big.support_len());
        for (w, m) in big.atoms() {
            let rest = (m - alpha * mu_s2.mass(w)) / (1.0 - alpha);
            if rest > 0.0 {
                atoms.push((w.clone(), rest));
            }
        }
        Ok(Self::from_sorted(atoms))
    }
}

/// Pairwise (cascade) summation; independent of thread scheduling for a fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::{reduce, words_up_to};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 4).unwrap()
    }

    const CAP: usize = DEFAULT_SUPPORT_CAP;

    #[test]
    fn validation() {
        assert!(FiniteMeasure::new([(w("a"), 0.5)]).is_err());
        assert!(FiniteMeasure::new([(w("a"), 1.5), (w("b"), -0.5)]).is_err());
        let m = FiniteMeasure::new([(w("a"), 0.25), (w("a"), 0.25), (w("b"), 0.5)]).unwrap();
        assert_eq!(m.support_len(), 2);
        assert_eq!(m.mass(&w("a")), 0.5);
        assert_eq!(m.mass(&w("c")), 0.0);
    }

    #[test]
    fn convolve_examples() {
        let da = FiniteMeasure::point_mass(w("a"));
        let db = FiniteMeasure::point_mass(w("b"));
        assert_eq!(da.convolve(&db, CAP).unwrap(), FiniteMeasure::point_mass(w("ab")));
        let u = FiniteMeasure::uniform([w("a"), w("A")]).unwrap();
        let sq = u.convolve(&u, CAP).unwrap();
        assert_eq!(sq.support_len(), 3);
        assert_eq!(sq.mass(&w("1")), 0.5);
        assert_eq!(sq.mass(&w("aa")), 0.25);
        assert_eq!(sq.mass(&w("AA")), 0.25);
    }

    #[test]
    fn convolution_cap() {
        let u = FiniteMeasure::uniform_generators(2);
        assert_eq!(u.power(6, 50), Err(Error::ConvolutionBlowUp { cap: 50 }));
    }

    #[test]
    fn power_examples() {
        let u = FiniteMeasure::uniform_generators(2);
        assert_eq!(u.power(1, CAP).unwrap(), u);
        let da = FiniteMeasure::point_mass(w("a"));
        assert_eq!(da.power(5, CAP).unwrap(), FiniteMeasure::point_mass(w("aaaaa")));
        assert!(u.power(0, CAP).is_err());
    }

    #[test]
    fn power_matches_exhaustive_enumeration() {
        // enumerate all 4^4 letter sequences and reduce
        let u = FiniteMeasure::uniform_generators(2);
        let p4 = u.power(4, CAP).unwrap();
        let alphabet = [1, -1, 2, -2];
        let mut counts: BTreeMap<ReducedWord, u32> = BTreeMap::new();
        for code in 0..256u32 {
            let raw: Vec<i32> = (0..4).map(|k| alphabet[((code >> (2 * k)) & 3) as usize]).collect();
            *counts.entry(reduce(&raw, 2).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), p4.support_len());
        for (word, c) in &counts {
            assert!((p4.mass(word) - f64::from(*c) / 256.0).abs() < 1e-15);
        }
        // identity: 4·(1 + 3) closed paths of length 4 in the 4-regular tree = 28
        assert_eq!(counts[&ReducedWord::identity()], 28);
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = FiniteMeasure::point_mass(w("ab"));
        assert!((0..100).all(|_| p.sample(&mut rng) == &w("ab")));
        let u = FiniteMeasure::uniform_generators(2);
        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| u.sample_index(&mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn sampling_frequencies_binomial() {
        let u = FiniteMeasure::uniform([w("a"), w("b")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let hits = (0..n).filter(|_| u.sample(&mut rng) == &w("a")).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((hits - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn sample_power_consistency() {
        let u = FiniteMeasure::new([(w("a"), 0.5), (w("B"), 0.3), (w("1"), 0.2)]).unwrap();
        let n = 3;
        let p = u.power(n, CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000;
        let mut counts: BTreeMap<ReducedWord, f64> = BTreeMap::new();
        for _ in 0..trials {
            let mut z = ReducedWord::identity();
            for _ in 0..n {
                z = z.multiply(u.sample(&mut rng));
            }
            *counts.entry(z).or_default() += 1.0;
        }
        for (word, m) in p.atoms() {
            let got = counts.get(word).copied().unwrap_or(0.0) / trials as f64;
            let sigma = (m * (1.0 - m) / trials as f64).sqrt();
            assert!((got - m).abs() <= 4.0 * sigma + 1e-12, "{word}: {got} vs {m}");
        }
    }

    #[test]
    fn entropy_of_uniform() {
        let u = FiniteMeasure::uniform_generators(2);
        assert!((u.entropy() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(FiniteMeasure::point_mass(w("a")).entropy(), 0.0);
    }

    #[test]
    fn decompose_examples() {
        let s = [w("a"), w("A"), w("b"), w("B")];
        let mu = FiniteMeasure::uniform(s.clone()).unwrap();
        let nu = mu.decompose(&s, 0.3, 1, CAP).unwrap();
        let sq = mu.convolve(&mu, CAP).unwrap();
        assert_eq!(nu.support_len(), sq.support_len());
        for (word, m) in sq.atoms() {
            assert!((nu.mass(word) - m).abs() < 1e-12);
        }
        let lazy = FiniteMeasure::new([(w("a"), 0.4), (w("A"), 0.4), (w("1"), 0.2)]).unwrap();
        let sub = [w("a"), w("A")];
        // lazy² puts 0.16 on a² while μ_S² puts 1/4 there: the ratio is 0.64
        assert!(lazy.decompose(&sub, 0.6, 1, CAP).is_ok());
        match lazy.decompose(&sub, 0.7, 1, CAP) {
            Err(Error::DominationFailure { word, deficit }) => {
                assert_eq!(word, "aa");
                assert!((deficit - (0.7 * 0.25 - 0.16)).abs() < 1e-12);
            }
            other => panic!("expected domination failure, got {other:?}"),
        }
        assert!(mu.decompose(&s, 1.0, 1, CAP).is_err());
        assert_eq!(mu.decompose(&[w("a"), w("b")], 0.1, 1, CAP), Err(Error::NotSymmetric));
    }

    fn random_measure() -> impl Strategy<Value = FiniteMeasure> {
        let words = words_up_to(2, 2);
        prop::collection::vec((0..words.len(), 0.05f64..1.0), 1..6).prop_map(move |v| {
            let total: f64 = v.iter().map(|(_, m)| m).sum();
            FiniteMeasure::new(v.into_iter().map(|(i, m)| (words[i].clone(), m / total))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_conserves_mass(a in random_measure(), b in random_measure()) {
            let c = a.convolve(&b, CAP).unwrap();
            prop_assert!((c.total_mass() - 1.0).abs() <= 1e-12);
            prop_assert!(c.atoms().iter().all(|(_, m)| *m > 0.0));
        }

        #[test]
        fn convolution_is_associative(a in random_measure(), b in random_measure(), c in random_measure()) {
            let lhs = a.convolve(&b, CAP).unwrap().convolve(&c, CAP).unwrap();
            let rhs = a.convolve(&b.convolve(&c, CAP).unwrap(), CAP).unwrap();
            prop_assert_eq!(lhs.support_len(), rhs.support_len());
            for (word, m) in lhs.atoms() {
                prop_assert!((rhs.mass(word) - m).abs() <= 1e-12);
            }
        }

        #[test]
        fn decompose_reconstructs(a in random_measure(), alpha in 0.01f64..0.5) {
            // symmetrize and add the generators so that S ⊂ supp μ²
            let mut atoms: Vec<(ReducedWord, f64)> = a
                .atoms()
                .iter()
                .flat_map(|(w, m)| [(w.clone(), m / 4.0), (w.inverse(), m / 4.0)])
                .collect();
            let s = [w("a"), w("A"), w("b"), w("B")];
            atoms.extend(s.iter().map(|x| (x.clone(), 0.125)));
            let mu = FiniteMeasure::new(atoms).unwrap();
            let sq = mu.convolve(&mu, CAP).unwrap();
            let mu_s = FiniteMeasure::uniform(s.clone()).unwrap();
            let mu_s2 = mu_s.convolve(&mu_s, CAP).unwrap();
            match mu.decompose(&s, alpha, 1, CAP) {
                Ok(nu) => {
                    prop_assert!((nu.total_mass() - 1.0).abs() <= 1e-12);
                    for (word, m) in sq.atoms() {
                        let recon = (1.0 - alpha) * nu.mass(word) + alpha * mu_s2.mass(word);
                        prop_assert!((recon - m).abs() <= 1e-12);
                    }
                }
                Err(Error::DominationFailure { .. }) => {
                    let ratio = mu_s2
                        .atoms()
                        .iter()
                        .map(|(word, m)| sq.mass(word) / m)
                        .fold(f64::INFINITY, f64::min);
                    prop_assert!(alpha > ratio - 1e-12);
                }
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
