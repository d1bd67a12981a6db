//! JSON helpers for arbitrary-precision integers: values that fit in `i64`
//! are written as numbers, larger ones as decimal strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub(crate) struct BigIntRef<'a>(pub &'a BigInt);

impl Serialize for BigIntRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub(crate) struct BigIntSeq<'a>(pub &'a [BigInt]);

impl Serialize for BigIntSeq<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in self.0 {
            seq.serialize_element(&BigIntRef(v))?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(i64),
    Str(String),
}

impl NumOrStr {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            NumOrStr::Num(v) => Ok(v.into()),
            NumOrStr::Str(s) => s.parse().map_err(E::custom),
        }
    }
}

pub(crate) fn deserialize_bigints<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    struct V;
    impl<'de> Visitor<'de> for V {
        type Value = Vec<BigInt>;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a sequence of integers")
        }
        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
            let mut out = Vec::new();
            while let Some(v) = seq.next_element::<NumOrStr>()? {
                out.push(v.into_bigint()?);
            }
            Ok(out)
        }
    }
    d.deserialize_seq(V)
}

pub(crate) mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        BigIntSeq(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        deserialize_bigints(d)
    }
}

pub(crate) mod opt_bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => BigIntSeq(v).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let raw: Option<Vec<NumOrStr>> = Option::deserialize(d)?;
        raw.map(|v| v.into_iter().map(NumOrStr::into_bigint).collect())
            .transpose()
    }
}
