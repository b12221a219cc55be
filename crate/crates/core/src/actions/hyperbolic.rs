use super::{MetricAction, OrbitWalker};
use crate::error::{Error, Result};
use crate::group::{Letter, ReducedWord, Representation};
use crate::hplane::{self, HPoint, ScaledIsometry, DEFAULT_DELTA};

/// Action on the hyperbolic plane through a representation, observed from a basepoint.
#[derive(Clone, Debug)]
pub struct HyperbolicAction {
    rep: Representation,
    basepoint: HPoint,
    delta: f64,
}

impl HyperbolicAction {
    /// Basepoint `i` and the default hyperbolicity constant.
    pub fn new(rep: Representation) -> Self {
        Self { rep, basepoint: HPoint::I, delta: DEFAULT_DELTA }
    }

    pub fn with_basepoint(mut self, o: HPoint) -> Self {
        self.basepoint = o;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be non-negative")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn basepoint(&self) -> HPoint {
        self.basepoint
    }

    /// Walker with access to the accumulated isometry.
    pub fn rep_walker(&self, atoms: &[ReducedWord]) -> Result<RepWalker<'_>> {
        for a in atoms {
            a.check_rank(self.rep.rank())?;
        }
        Ok(RepWalker {
            rep: &self.rep,
            basepoint: self.basepoint,
            atoms: atoms.iter().map(|a| a.letters().to_vec()).collect(),
            letters: Vec::new(),
            products: vec![ScaledIsometry::identity()],
        })
    }
}

impl MetricAction for HyperbolicAction {
    fn rank(&self) -> usize {
        self.rep.rank()
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn orbit_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64> {
        let g = self.rep.eval(&u.inverse().multiply(v))?;
        Ok(g.displacement(&self.basepoint))
    }

    fn translation_length(&self, w: &ReducedWord) -> Result<f64> {
        Ok(self.rep.eval(w)?.translation_length())
    }

    fn independent(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool> {
        hplane::independent(&self.rep.eval(u)?, &self.rep.eval(v)?)
    }

    fn walker(&self, atoms: &[ReducedWord]) -> Result<Box<dyn OrbitWalker + '_>> {
        Ok(Box::new(self.rep_walker(atoms)?))
    }
}

/// Walker over a representation.
///
/// Keeps the freely reduced word together with the isometry of each of its
/// prefixes, so that free cancellation pops the stack exactly instead of
/// multiplying by an inverse (which would lose `e^{-2·logscale}` relative
/// precision at every cancellation).
pub struct RepWalker<'a> {
    rep: &'a Representation,
    basepoint: HPoint,
    atoms: Vec<Vec<Letter>>,
    letters: Vec<Letter>,
    products: Vec<ScaledIsometry>,
}

impl RepWalker<'_> {
    #[inline]
    fn push_letter(&mut self, l: Letter) -> Result<()> {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
            self.products.pop();
        } else {
            let top = self.products.last().expect("stack holds the identity");
            let next = top.compose(self.rep.letter_image(l))?;
            self.letters.push(l);
            self.products.push(next);
        }
        Ok(())
    }

    /// Current `ρ(Z)`.
    pub fn isometry(&self) -> &ScaledIsometry {
        self.products.last().expect("stack holds the identity")
    }
}

impl OrbitWalker for RepWalker<'_> {
    fn reset(&mut self, start: &ReducedWord) -> Result<()> {
        start.check_rank(self.rep.rank())?;
        self.letters.clear();
        self.products.truncate(1);
        for &l in start.letters() {
            self.push_letter(l)?;
        }
        Ok(())
    }

    fn push(&mut self, idx: usize) -> Result<()> {
        for k in 0..self.atoms[idx].len() {
            let l = self.atoms[idx][k];
            self.push_letter(l)?;
        }
        Ok(())
    }

    fn distance(&self) -> f64 {
        self.isometry().displacement(&self.basepoint)
    }

    fn word(&self) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.letters.clone())
    }
}
