use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: BigRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, BigRational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms.get(exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: BigRational) {
        assert_eq!(exponents.len(), self.nvars, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: &[i64]) -> BigRational {
        assert_eq!(x.len(), self.nvars, "point arity mismatch");
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let mut num = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = BigInt::one();
            for (b, &k) in xs.iter().zip(e) {
                if k > 0 {
                    m *= b.pow(k);
                }
            }
            num += c * m;
        }
        num
    }

    /// `p(x − a)`.
    pub fn translate(&self, a: &[i64]) -> Polynomial {
        assert_eq!(a.len(), self.nvars, "shift arity mismatch");
        if a.iter().all(|&v| v == 0) {
            return self.clone();
        }
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            // expand ∏ (x_i − a_i)^{e_i}
            let mut acc = vec![(vec![0u32; self.nvars], c.clone())];
            for (i, (&k, &ai)) in e.iter().zip(a).enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(acc.len() * (k as usize + 1));
                for (ex, cx) in &acc {
                    for j in 0..=k {
                        let coef = BigInt::from(binomial(k as u64, j as u64))
                            * BigInt::from(-ai).pow(k - j);
                        if coef.is_zero() {
                            continue;
                        }
                        let mut ey = ex.clone();
                        ey[i] += j;
                        next.push((ey, cx * coef));
                    }
                }
                acc = next;
            }
            for (ex, cx) in acc {
                out.add_term(ex, cx);
            }
        }
        out
    }

    /// Formats with the given variable names, highest degree first.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (n, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = names.get(i).copied().unwrap_or("x");
                    if k == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&format_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", format_rational(&mag), mono.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let default: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let names: Vec<&str> = if self.nvars == 2 {
            vec!["mu", "t"]
        } else {
            default.iter().map(String::as_str).collect()
        };
        f.write_str(&self.display_with(&names))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exp: Vec<u32>,
    c: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.clone(),
                    c: format_rational(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let mut p = Polynomial::zero(r.nvars);
        for t in r.terms {
            if t.exp.len() != r.nvars {
                return Err(D::Error::custom("exponent arity does not match nvars"));
            }
            let c = parse_rational(&t.c)
                .ok_or_else(|| D::Error::custom(format!("invalid rational {:?}", t.c)))?;
            p.add_term(t.exp, c);
        }
        Ok(p)
    }
}
