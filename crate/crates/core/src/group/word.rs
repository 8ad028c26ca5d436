//! Formal words over indexed generators, presentations, and relator checks.

use std::fmt;

use super::Group;
use crate::error::{Error, Result};

/// A freely reduced product of generator powers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generator(index: usize) -> Self {
        Self::power(index, 1)
    }

    pub fn power(index: usize, exp: i64) -> Self {
        Self::from_letters([(index, exp)])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = Self::empty();
        for (g, e) in letters {
            w.push(g, e);
        }
        w
    }

    /// Appends `g^e`, merging with the last letter when possible.
    pub fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((last, exp)) if *last == g => {
                *exp += e;
                if *exp == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push((g, e)),
        }
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|(g, _)| *g).max()
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters.iter().filter(|(h, _)| *h == g).map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Self {
        Self::from_letters(self.letters.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Self::empty();
        for _ in 0..n.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// `by^-1 self by`.
    pub fn conjugate(&self, by: &Self) -> Self {
        by.inverse().mul(self).mul(by)
    }

    /// `[self, other] = self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// `[self, other; k]`; `k = 0` returns `self`.
    pub fn iterated_commutator(&self, other: &Self, k: usize) -> Self {
        let mut w = self.clone();
        for _ in 0..k {
            w = w.commutator(other);
        }
        w
    }

    /// Replaces each generator `i` by `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Self {
        let mut w = Self::empty();
        for &(g, e) in &self.letters {
            w = w.mul(&images[g].pow(e));
        }
        w
    }

    /// Renders with the supplied generator names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|&(g, e)| {
                let name = names.get(g).cloned().unwrap_or_else(|| format!("x{}", g + 1));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses words such as `x1^2`, `(x1 x2)^-2`, `[x1, x2, x2]` or `1`.
    ///
    /// `resolve` maps a symbol name to a generator index. Commutator brackets are
    /// left-normed: `[a, b, c] = [[a, b], c]`.
    pub fn parse(text: &str, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<Self> {
        let mut p = Parser { text, pos: 0, resolve };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(w)
    }

    /// Parses with the default names `x1, x2, ...` for `count` generators.
    pub fn parse_default(text: &str, count: usize) -> Result<Self> {
        Self::parse(text, &|name| default_symbol(name, count))
    }
}

/// `x<k>` with `1 <= k <= count`, 0-based result.
pub fn default_symbol(name: &str, count: usize) -> Option<usize> {
    let k: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=count).contains(&k).then(|| k - 1)
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Option<usize>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: format!("{message} in word {:?}", self.text),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '*' || c == '.' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::empty();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') | Some(']') | Some(',') => return Ok(w),
                _ => {
                    let f = self.factor()?;
                    w = w.mul(&f);
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if self.peek() == Some('-') {
                self.pos += 1;
            }
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let n: i64 = self.text[start..self.pos]
                .parse()
                .map_err(|_| self.error("expected integer exponent"))?;
            return Ok(atom.pow(n));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let mut acc = self.word()?;
                let mut parts = 1;
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => {
                            self.pos += 1;
                            let next = self.word()?;
                            acc = acc.commutator(&next);
                            parts += 1;
                        }
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or ']'")),
                    }
                }
                if parts < 2 {
                    return Err(self.error("commutator needs at least two entries"));
                }
                Ok(acc)
            }
            Some(c) if c.is_alphanumeric() || c == '_' || c == '~' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '~') {
                    self.pos += self.peek().map_or(1, char::len_utf8);
                }
                let name = &self.text[start..self.pos];
                if name == "1" {
                    return Ok(Word::empty());
                }
                (self.resolve)(name).map(Word::generator).ok_or_else(|| Error::Parse {
                    line: 1,
                    column: start + 1,
                    message: format!("unknown generator {name:?} in word {:?}", self.text),
                })
            }
            _ => Err(self.error("expected generator, '(' or '['")),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }
}

/// Relators over a fixed number of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generator_count: usize,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generator_count: usize, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g >= generator_count {
                    return Err(Error::GeneratorOutOfRange {
                        index: g,
                        count: generator_count,
                    });
                }
            }
        }
        Ok(Self {
            generator_count,
            relators,
        })
    }

    pub fn parse(generator_count: usize, relators: &[&str]) -> Result<Self> {
        let words = relators
            .iter()
            .map(|r| Word::parse_default(r, generator_count))
            .collect::<Result<Vec<_>>>()?;
        Self::new(generator_count, words)
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }
}

/// Evaluates `word` with generator `i` mapped to `images[i]`.
pub fn eval_word<G: Group + ?Sized>(group: &G, word: &Word, images: &[G::Elem]) -> G::Elem {
    let mut acc = group.identity();
    for &(g, e) in word.letters() {
        let p = group.pow(&images[g], e);
        acc = group.mul(&acc, &p);
    }
    acc
}

/// Index of the first relator that does not evaluate to the identity.
pub fn first_failing_relator<G: Group + ?Sized>(
    presentation: &Presentation,
    images: &[G::Elem],
    group: &G,
) -> Result<Option<usize>> {
    if images.len() != presentation.generator_count {
        return Err(Error::ArityMismatch {
            expected: presentation.generator_count,
            got: images.len(),
        });
    }
    Ok(presentation
        .relators
        .iter()
        .position(|r| !group.is_identity(&eval_word(group, r, images))))
}

/// True iff every relator of `presentation` vanishes on `images`.
pub fn check_relations<G: Group + ?Sized>(presentation: &Presentation, images: &[G::Elem], group: &G) -> Result<bool> {
    first_failing_relator(presentation, images, group).map(|f| f.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::EffectiveGroup;

    #[test]
    fn parse_forms() {
        let w = Word::parse_default("x1^2 (x1 x2)^-1 [x1, x2]", 2).unwrap();
        let expected = Word::power(0, 2)
            .mul(&Word::from_letters([(0, 1), (1, 1)]).inverse())
            .mul(&Word::generator(0).commutator(&Word::generator(1)));
        assert_eq!(w, expected);
        assert_eq!(Word::parse_default("1", 2).unwrap(), Word::empty());
        assert_eq!(
            Word::parse_default("[x1,x2,x2]", 2).unwrap(),
            Word::generator(0).iterated_commutator(&Word::generator(1), 2)
        );
        assert!(matches!(
            Word::parse_default("x3", 2),
            Err(Error::Parse { column: 1, .. })
        ));
        assert!(Word::parse_default("(x1", 2).is_err());
        assert!(Word::parse_default("[x1]", 2).is_err());
    }

    #[test]
    fn free_reduction_and_sums() {
        let w = Word::from_letters([(0, 2), (0, -2), (1, 3), (0, 1), (1, -1)]);
        assert_eq!(w.letters(), &[(1, 3), (0, 1), (1, -1)]);
        assert_eq!(w.exponent_sum(1), 2);
        assert_eq!(w.exponent_sum(0), 1);
        assert!(w.mul(&w.inverse()).is_empty());
        assert_eq!(Word::generator(0).commutator(&Word::generator(1)).exponent_sum(0), 0);
    }

    #[test]
    fn presentation_checks() {
        let s3 = EffectiveGroup::permutation("S3", 3, &["(1 2)", "(1 2 3)"]).unwrap();
        let empty = Presentation::new(2, vec![]).unwrap();
        assert!(check_relations(&empty, s3.generators(), &s3).unwrap());
        let p = Presentation::parse(2, &["x1^2", "x2^3", "(x1 x2)^2"]).unwrap();
        assert!(check_relations(&p, s3.generators(), &s3).unwrap());
        let involution = Presentation::parse(1, &["x1^2"]).unwrap();
        assert!(check_relations(&involution, &s3.generators()[..1], &s3).unwrap());
        let wrong = Presentation::parse(2, &["x1^2", "x2^2"]).unwrap();
        assert_eq!(first_failing_relator(&wrong, s3.generators(), &s3).unwrap(), Some(1));
        assert!(matches!(
            check_relations(&p, &s3.generators()[..1], &s3),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
        assert!(Presentation::new(1, vec![Word::generator(3)]).is_err());
    }
}
