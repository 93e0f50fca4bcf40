//! Random term generation shared by the integration tests.
#![allow(dead_code)]

use lmu::Term;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 3] = ["x", "y", "z"];
pub const NAMES: [&str; 3] = ["a", "b", "c"];

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub bot: bool,
}

impl Gen {
    pub fn new(seed: u64, bot: bool) -> Self {
        use rand::SeedableRng;
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), bot }
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.rng.gen_range(0..xs.len())]
    }

    /// A term of roughly `size` nodes. Applications favour λ and μ heads so
    /// that redexes are common.
    pub fn term(&mut self, size: usize) -> Term {
        if size <= 1 {
            return if self.bot && self.rng.gen_bool(0.15) {
                Term::Bot
            } else {
                Term::var(self.pick(&VARS))
            };
        }
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let x = self.pick(&VARS);
                Term::lam(x, self.term(size - 1))
            }
            3..=4 => {
                let a = self.pick(&NAMES);
                let b = self.pick(&NAMES);
                Term::mu(a, b, self.term(size - 1))
            }
            _ => {
                let left = self.rng.gen_range(1..size.max(2));
                let right = (size - 1).saturating_sub(left).max(1);
                let f = if self.rng.gen_bool(0.4) {
                    let x = self.pick(&VARS);
                    Term::lam(x, self.term(left))
                } else if self.rng.gen_bool(0.3) {
                    let a = self.pick(&NAMES);
                    let b = self.pick(&NAMES);
                    Term::mu(a, b, self.term(left))
                } else {
                    self.term(left)
                };
                Term::app(f, self.term(right))
            }
        }
    }

    /// A term of random size in `1..=max`.
    pub fn small(&mut self, max: usize) -> Term {
        let s = self.rng.gen_range(1..=max);
        self.term(s)
    }
}
