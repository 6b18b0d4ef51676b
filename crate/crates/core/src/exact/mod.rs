//! Exact rational arithmetic shared by the geometry modules: vector helpers,
//! a parser for `p/q` strings, and a two-phase simplex solver.

pub mod lp;
pub(crate) mod rational;

pub use lp::{Constraint, LinearProgram, LpOutcome, Relation};
pub use rational::{
    dot, from_f64, int, parse_rational, ratio, rational_to_string, scale, sub, to_f64, RVec,
    Rational,
};

/// Serde adapters that read and write rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{parse_rational, rational_to_string, Rational};
    use serde::de::{self, Deserializer, Visitor};
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Deserialize;

    struct RationalVisitor;

    impl Visitor<'_> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational string \"p/q\" or a number")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
            parse_rational(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
            Ok(super::int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
            Ok(Rational::from_integer(v.into()))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
            super::from_f64(v).ok_or_else(|| E::custom("non-finite number"))
        }
    }

    #[derive(Deserialize)]
    struct Wrapped(#[serde(deserialize_with = "one")] Rational);

    pub fn one<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }

    pub fn vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }

    pub fn matrix<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw: Vec<Vec<Wrapped>> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|row| row.into_iter().map(|w| w.0).collect())
            .collect())
    }

    pub fn ser_vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&rational_to_string(x))?;
        }
        seq.end()
    }

    pub fn ser_matrix<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(rational_to_string).collect())
            .collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn ser_opt_vec<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => ser_vec(v, s),
            None => s.serialize_none(),
        }
    }
}
