use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Signed generator index: `+k` is generator `k` (1-based), `-k` its inverse.
pub type Letter = i8;

/// Largest supported rank (one lowercase letter per generator).
pub const MAX_RANK: usize = 26;

/// Freely reduced word in a free group.
///
/// Ordered shortlex: shorter words first, then letter by letter with
/// `a < A < b < B < …`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

fn letter_key(l: Letter) -> i16 {
    2 * (l.unsigned_abs() as i16) + i16::from(l < 0)
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters.len().cmp(&other.letters.len()).then_with(|| {
            self.letters
                .iter()
                .map(|&l| letter_key(l))
                .cmp(other.letters.iter().map(|&l| letter_key(l)))
        })
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Appends `l` to a reduced letter buffer, cancelling against the last letter.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&-l) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// Freely reduces a raw letter sequence; every letter must satisfy `1 ≤ |l| ≤ rank`.
pub fn reduce(letters: &[i32], rank: usize) -> Result<ReducedWord> {
    let mut buf = Vec::with_capacity(letters.len());
    for &l in letters {
        if l == 0 || l.unsigned_abs() as usize > rank || rank > MAX_RANK {
            return Err(Error::LetterOutOfRange { letter: l, rank });
        }
        push_reduced(&mut buf, l as Letter);
    }
    Ok(ReducedWord { letters: buf })
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Single letter word; `k` may be negative for an inverse generator.
    pub fn letter(k: Letter) -> Self {
        assert!(k != 0, "letter 0 does not name a generator");
        Self { letters: vec![k] }
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != -w[1]));
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.unsigned_abs() as usize > rank) {
            Some(&l) => Err(Error::LetterOutOfRange { letter: i32::from(l), rank }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn multiply(&self, other: &ReducedWord) -> ReducedWord {
        let cancel = self
            .letters
            .iter()
            .rev()
            .zip(&other.letters)
            .take_while(|(&x, &y)| x == -y)
            .count();
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * cancel);
        letters.extend_from_slice(&self.letters[..self.len() - cancel]);
        letters.extend_from_slice(&other.letters[cancel..]);
        ReducedWord { letters }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> ReducedWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = ReducedWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &ReducedWord) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(x, y)| x == y)
            .count()
    }

    /// Splits `w = p · c · p⁻¹` with `c` cyclically reduced; returns `(p, c)`.
    pub fn cyclic_decomposition(&self) -> (ReducedWord, ReducedWord) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == -self.letters[n - 1 - k] {
            k += 1;
        }
        (
            ReducedWord { letters: self.letters[..k].to_vec() },
            ReducedWord { letters: self.letters[k..n - k].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() < 2 || self.letters[0] != -self.letters[self.len() - 1]
    }

    /// Parses `a..z` (generators) and `A..Z` (inverses); `""` and `"1"` are the identity.
    pub fn parse(s: &str, rank: usize) -> Result<ReducedWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(ReducedWord::identity());
        }
        let mut raw = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let l = match ch {
                'a'..='z' => (ch as i32) - ('a' as i32) + 1,
                'A'..='Z' => -((ch as i32) - ('A' as i32) + 1),
                _ => return Err(Error::InvalidWord(s.to_string())),
            };
            raw.push(l);
        }
        reduce(&raw, rank).map_err(|_| Error::InvalidWord(s.to_string()))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for &l in &self.letters {
            let base = if l > 0 { b'a' } else { b'A' };
            let c = (base + l.unsigned_abs() - 1) as char;
            fmt::Write::write_char(f, c)?;
        }
        Ok(())
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ReducedWord::parse(&s, MAX_RANK).map_err(serde::de::Error::custom)
    }
}

/// All reduced words of length at most `max_len` over `rank` generators, in shortlex order.
pub fn words_up_to(rank: usize, max_len: usize) -> Vec<ReducedWord> {
    let alphabet: Vec<Letter> = (1..=rank as Letter).flat_map(|k| [k, -k]).collect();
    let mut out = vec![ReducedWord::identity()];
    let mut frontier = vec![ReducedWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * (2 * rank).saturating_sub(1).max(1));
        for w in &frontier {
            for &l in &alphabet {
                if w.letters.last() != Some(&-l) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(ReducedWord { letters });
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 4).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(&[1, -1], 2).unwrap().is_identity());
        assert_eq!(reduce(&[1, 2, -2, 1], 2).unwrap(), w("aa"));
        assert_eq!(
            reduce(&[3], 2),
            Err(Error::LetterOutOfRange { letter: 3, rank: 2 })
        );
        assert!(reduce(&[0], 2).is_err());
    }

    #[test]
    fn multiply_examples() {
        let u = w("abA");
        assert_eq!(u.multiply(&ReducedWord::identity()), u);
        assert!(u.multiply(&u.inverse()).is_identity());
        assert_eq!(w("ab").multiply(&w("Ba")), w("aa"));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(w("abA").to_string(), "abA");
        assert_eq!(ReducedWord::identity().to_string(), "1");
        assert!(w("1").is_identity());
        assert_eq!(w("aAb"), w("b"));
        assert!(ReducedWord::parse("a-b", 2).is_err());
        assert!(ReducedWord::parse("c", 2).is_err());
    }

    #[test]
    fn shortlex_order() {
        let mut v = vec![w("b"), w("aa"), w("A"), w("a"), w("1")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["1", "a", "A", "b", "aa"]);
    }

    #[test]
    fn enumeration_counts() {
        // 1 + 4 + 12 + 36 + 108 for rank 2
        assert_eq!(words_up_to(2, 4).len(), 161);
        assert_eq!(words_up_to(1, 3).len(), 7);
        let all = words_up_to(2, 3);
        assert!(all.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn cyclic_decomposition_examples() {
        let (p, c) = w("abbA").cyclic_decomposition();
        assert_eq!((p, c), (w("a"), w("bb")));
        let (p, c) = w("abaBA").cyclic_decomposition();
        assert_eq!((p, c), (w("ab"), w("a")));
        let (p, c) = w("aBA").cyclic_decomposition();
        assert_eq!((p, c), (w("a"), w("B")));
        assert!(w("abab").is_cyclically_reduced());
        assert!(!w("abA").is_cyclically_reduced());
    }

    #[test]
    fn powers() {
        assert_eq!(w("ab").pow(3), w("ababab"));
        assert_eq!(w("ab").pow(-2), w("BABA"));
        assert!(w("ab").pow(0).is_identity());
        assert_eq!(w("abA").pow(3), w("abbbA"));
    }

    fn raw_word(rank: i32, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1..=rank, any::<bool>()), 0..max_len)
            .prop_map(|v| v.into_iter().map(|(k, inv)| if inv { -k } else { k }).collect())
    }

    proptest! {
        #[test]
        fn reduced_has_no_cancelling_pair(raw in raw_word(3, 40)) {
            let r = reduce(&raw, 3).unwrap();
            prop_assert!(r.letters().windows(2).all(|p| p[0] != -p[1]));
        }

        #[test]
        fn word_times_formal_inverse_is_identity(raw in raw_word(3, 30)) {
            let mut both = raw.clone();
            both.extend(raw.iter().rev().map(|l| -l));
            prop_assert!(reduce(&both, 3).unwrap().is_identity());
        }

        #[test]
        fn multiply_is_associative_and_length_bounded(
            a in raw_word(2, 12), b in raw_word(2, 12), c in raw_word(2, 12)
        ) {
            let (a, b, c) = (reduce(&a, 2).unwrap(), reduce(&b, 2).unwrap(), reduce(&c, 2).unwrap());
            prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
            prop_assert!(a.multiply(&b).len() <= a.len() + b.len());
        }

        #[test]
        fn multiply_agrees_with_reducing_concatenation(a in raw_word(2, 15), b in raw_word(2, 15)) {
            let mut cat = a.clone();
            cat.extend(&b);
            let lhs = reduce(&a, 2).unwrap().multiply(&reduce(&b, 2).unwrap());
            prop_assert_eq!(lhs, reduce(&cat, 2).unwrap());
        }

        #[test]
        fn display_parse_round_trip(raw in raw_word(4, 20)) {
            let r = reduce(&raw, 4).unwrap();
            prop_assert_eq!(ReducedWord::parse(&r.to_string(), 4).unwrap(), r);
        }

        #[test]
        fn cyclic_decomposition_recomposes(raw in raw_word(2, 20)) {
            let r = reduce(&raw, 2).unwrap();
            let (p, c) = r.cyclic_decomposition();
            prop_assert!(c.is_cyclically_reduced());
            prop_assert_eq!(p.multiply(&c).multiply(&p.inverse()), r);
        }
    }
}
