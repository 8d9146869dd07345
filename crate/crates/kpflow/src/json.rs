//! JSON encodings of scalars, ring elements, operators and series.
//!
//! Rationals are `"p/q"` strings (integers as `"p"`), Gaussian rationals
//! `[re, im]`, Fourier elements `{frequency: coefficient}`, polynomials
//! `{degree: coefficient}` and z-series `{power: element, "z_max": n}`.

use std::collections::BTreeMap;

use kpflow_core::ring::Z_EXACT;
use kpflow_core::tseries::Series;
use kpflow_core::{DiffRing, Error, Fourier, GaussRational, Monomial, Poly, PsiOp, Rational, Scalar, TSeries, ZScalar, ZSeries};
use serde_json::{json, Map, Value};

pub trait Codec: Sized {
    fn encode(&self) -> Value;
    fn decode(v: &Value) -> Result<Self, Error>;
}

/// Ring elements that can be read from and written to files.
pub trait JsonRing: DiffRing<Scalar: Codec> + Codec {
    /// Applies a `--zmax` truncation; a no-op outside z-series rings.
    fn with_z_max(self, _z_max: u32) -> Self {
        self
    }
}

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, found {v}"))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| bad(what, v))
}

fn key<T: std::str::FromStr>(k: &str, what: &str) -> Result<T, Error> {
    k.parse().map_err(|_| Error::Parse(format!("{what}: bad key {k:?}")))
}

pub fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, Error> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

pub fn int_field(v: &Value, name: &str) -> Result<i64, Error> {
    let f = field(v, name)?;
    f.as_i64().ok_or_else(|| bad(&format!("integer {name:?}"), f))
}

impl Codec for Rational {
    fn encode(&self) -> Value {
        Value::String(self.to_string())
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        match v {
            Value::String(s) => s.parse(),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_int(n.as_i64().unwrap())),
            _ => Err(bad("rational string", v)),
        }
    }
}

impl Codec for GaussRational {
    fn encode(&self) -> Value {
        json!([self.re.encode(), self.im.encode()])
    }

    /// `[re, im]`, or a bare rational for a real number.
    fn decode(v: &Value) -> Result<Self, Error> {
        match v.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(GaussRational::new(Rational::decode(re)?, Rational::decode(im)?)),
            Some(_) => Err(bad("[re, im]", v)),
            None => Rational::decode(v).map(GaussRational::real),
        }
    }
}

impl Codec for Fourier {
    fn encode(&self) -> Value {
        Value::Object(self.modes().iter().map(|(n, c)| (n.to_string(), c.encode())).collect())
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        let modes = object(v, "Fourier element")?
            .iter()
            .map(|(k, c)| Ok((key(k, "frequency")?, GaussRational::decode(c)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Fourier::from_modes(modes))
    }
}

impl JsonRing for Fourier {}

impl Codec for Poly {
    fn encode(&self) -> Value {
        Value::Object(self.terms().iter().map(|(d, c)| (d.to_string(), c.encode())).collect())
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        let terms = object(v, "polynomial")?
            .iter()
            .map(|(k, c)| Ok((key(k, "degree")?, Rational::decode(c)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Poly::from_terms(terms))
    }
}

impl JsonRing for Poly {}

fn encode_z_max(z_max: u32) -> Value {
    if z_max == Z_EXACT {
        Value::String("exact".into())
    } else {
        json!(z_max)
    }
}

/// Splits `{power: x, ..., "z_max": n}`; a missing `z_max` means exact.
fn decode_z<T>(v: &Value, inner: impl Fn(&Value) -> Result<T, Error>) -> Result<(u32, Vec<(u32, T)>), Error> {
    let obj = object(v, "z-series")?;
    let z_max = match obj.get("z_max") {
        None => Z_EXACT,
        Some(Value::String(s)) if s == "exact" => Z_EXACT,
        Some(n) => n.as_u64().and_then(|n| u32::try_from(n).ok()).filter(|n| *n != Z_EXACT).ok_or_else(|| bad("z_max", n))?,
    };
    let terms = obj
        .iter()
        .filter(|(k, _)| *k != "z_max")
        .map(|(k, x)| Ok((key(k, "z power")?, inner(x)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((z_max, terms))
}

fn encode_z<T>(z_max: u32, terms: &[(u32, T)], inner: impl Fn(&T) -> Value) -> Value {
    let mut m: Map<String, Value> = terms.iter().map(|(p, x)| (p.to_string(), inner(x))).collect();
    m.insert("z_max".into(), encode_z_max(z_max));
    Value::Object(m)
}

impl<R: JsonRing> Codec for ZSeries<R> {
    fn encode(&self) -> Value {
        encode_z(self.z_max(), self.terms(), R::encode)
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        let (z_max, terms) = decode_z(v, R::decode)?;
        Ok(ZSeries::new(z_max, terms))
    }
}

impl<R: JsonRing> JsonRing for ZSeries<R> {
    fn with_z_max(self, z_max: u32) -> Self {
        let keep = self.z_max().min(z_max);
        ZSeries::new(keep, self.terms().to_vec())
    }
}

impl<S: Scalar + Codec> Codec for ZScalar<S> {
    fn encode(&self) -> Value {
        encode_z(self.z_max(), self.terms(), S::encode)
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        let (z_max, terms) = decode_z(v, S::decode)?;
        Ok(ZScalar::new(z_max, terms))
    }
}

impl<R: JsonRing> Codec for PsiOp<R> {
    fn encode(&self) -> Value {
        let orders: Map<String, Value> = self.terms().rev().map(|(o, c)| (o.to_string(), c.encode())).collect();
        json!({ "ring": R::tag(), "depth": self.depth(), "exact": self.is_exact(), "orders": orders })
    }

    /// `"exact"` defaults to `true`: a hand-written operator lists all its terms.
    /// `"depth"` is required only for truncated operators.
    fn decode(v: &Value) -> Result<Self, Error> {
        check_ring::<R>(v)?;
        let exact = match v.get("exact") {
            None => true,
            Some(b) => b.as_bool().ok_or_else(|| bad("boolean \"exact\"", b))?,
        };
        let depth = match v.get("depth") {
            None if exact => PsiOp::<R>::one().depth(),
            _ => int_field(v, "depth")?,
        };
        let terms = object(field(v, "orders")?, "orders")?
            .iter()
            .map(|(k, c)| Ok((key::<i64>(k, "order")?, R::decode(c)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        if let Some((o, _)) = terms.iter().find(|(o, c)| *o < depth && !c.is_zero()) {
            return Err(Error::Parse(format!("order {o} lies below depth {depth}")));
        }
        Ok(if exact { PsiOp::exact(terms).with_floor(depth) } else { PsiOp::truncated(terms, depth) })
    }
}

pub fn check_ring<R: DiffRing>(v: &Value) -> Result<(), Error> {
    let tag = field(v, "ring")?;
    match tag.as_str() {
        Some(t) if t == R::tag() => Ok(()),
        Some(t) => Err(Error::RingMismatch(format!("file has ring {t:?}, run uses {:?}", R::tag()))),
        None => Err(bad("ring tag", tag)),
    }
}

impl Codec for Monomial {
    fn encode(&self) -> Value {
        Value::Object(self.exponents().map(|(i, n)| (i.to_string(), json!(n))).collect())
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        let pairs = object(v, "monomial")?
            .iter()
            .map(|(k, n)| {
                let i: u32 = key(k, "time index")?;
                let n = n.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| bad("exponent", n))?;
                if i == 0 {
                    return Err(Error::Parse("time indices start at 1".into()));
                }
                Ok((i, n))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Monomial::from_exponents(pairs))
    }
}

impl<R: JsonRing> Codec for TSeries<R> {
    fn encode(&self) -> Value {
        let terms: Vec<Value> = self.slices().map(|(t, op)| json!({ "monomial": t.encode(), "operator": op.encode() })).collect();
        json!({
            "ring": R::tag(),
            "vMax": self.v_max(),
            "floor": self.floor(),
            "barred": self.barred_flag(),
            "terms": terms,
        })
    }

    fn decode(v: &Value) -> Result<Self, Error> {
        check_ring::<R>(v)?;
        let v_max = u32::try_from(int_field(v, "vMax")?).map_err(|_| Error::Parse("vMax must be >= 0".into()))?;
        let terms = field(v, "terms")?.as_array().ok_or_else(|| bad("terms array", v))?;
        let slices = terms
            .iter()
            .map(|e| Ok((Monomial::decode(field(e, "monomial")?)?, PsiOp::<R>::decode(field(e, "operator")?)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let floor = match v.get("floor") {
            Some(_) => int_field(v, "floor")?,
            None => slices.iter().map(|(_, op)| op.depth()).min().unwrap_or(-1),
        };
        let series = TSeries::from_slices(v_max, floor, slices);
        match v.get("barred").and_then(Value::as_bool) {
            Some(true) => series.assert_barred(),
            _ => Ok(series.clear_barred()),
        }
    }
}

/// `[{"monomial": m, "value": x}, ...]`.
pub fn encode_series<V>(s: &Series<V>, value: impl Fn(&V) -> Value) -> Value {
    let terms: Vec<Value> = s.terms.iter().map(|(t, x)| json!({ "monomial": t.encode(), "value": value(x) })).collect();
    json!({ "vMax": s.v_max, "terms": terms })
}

pub fn decode_series<V>(v: &Value, value: impl Fn(&Value) -> Result<V, Error>) -> Result<Series<V>, Error> {
    let v_max = u32::try_from(int_field(v, "vMax")?).map_err(|_| Error::Parse("vMax must be >= 0".into()))?;
    let mut terms = BTreeMap::new();
    for e in field(v, "terms")?.as_array().ok_or_else(|| bad("terms array", v))? {
        terms.insert(Monomial::decode(field(e, "monomial")?)?, value(field(e, "value")?)?);
    }
    Ok(Series { v_max, terms })
}

/// Number of stored coefficients, used for the residual size cap.
pub fn weight<R: DiffRing>(s: &TSeries<R>) -> usize {
    s.slices().map(|(_, op)| op.len()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<T: Codec + PartialEq + std::fmt::Debug>(x: &T) {
        let text = serde_json::to_string(&x.encode()).unwrap();
        let back = T::decode(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, x);
    }

    fn g(a: i64, b: i64) -> GaussRational {
        GaussRational::new(Rational::from_int(a), Rational::new(b, 3))
    }

    #[test]
    fn scalar_formats() {
        assert_eq!(Rational::new(-3, 4).encode(), json!("-3/4"));
        assert_eq!(Rational::decode(&json!(5)).unwrap(), Rational::from_int(5));
        assert_eq!(g(1, 2).encode(), json!(["1", "2/3"]));
        assert_eq!(GaussRational::decode(&json!("1/2")).unwrap(), GaussRational::real(Rational::new(1, 2)));
        assert!(Rational::decode(&json!("1/0")).is_err());
    }

    #[test]
    fn element_formats() {
        let f = Fourier::from_modes([(-1, g(1, 0)), (2, g(0, 1))]);
        assert_eq!(f.encode(), json!({ "-1": ["1", "0"], "2": ["0", "1/3"] }));
        roundtrip(&f);
        roundtrip(&Poly::from_terms([(0, Rational::one()), (3, Rational::new(2, 5))]));
        let z = ZSeries::new(2, [(0, f.clone()), (2, Fourier::sin(1))]);
        assert_eq!(z.encode()["z_max"], json!(2));
        roundtrip(&z);
        roundtrip(&ZSeries::constant(f));
    }

    #[test]
    fn operator_format() {
        let op = PsiOp::exact([(1, Fourier::one()), (-1, Fourier::cos(1))]).with_floor(-6);
        let v = op.encode();
        assert_eq!(v["ring"], json!("fourier"));
        assert_eq!(v["depth"], json!(-6));
        roundtrip(&op);
        roundtrip(&PsiOp::truncated([(0, Fourier::sin(2))], -3));
        let hand = json!({ "ring": "fourier", "depth": -4, "orders": { "1": { "0": "1" } } });
        assert!(PsiOp::<Fourier>::decode(&hand).unwrap().is_exact());
    }

    #[test]
    fn operator_errors() {
        let wrong = json!({ "ring": "poly", "depth": -4, "orders": {} });
        assert!(matches!(PsiOp::<Fourier>::decode(&wrong), Err(Error::RingMismatch(_))));
        let below = json!({ "ring": "fourier", "depth": -2, "orders": { "-3": { "1": "1" } }, "exact": false });
        assert!(matches!(PsiOp::<Fourier>::decode(&below), Err(Error::Parse(_))));
    }

    #[test]
    fn series_format() {
        let t = Monomial::from_exponents([(1, 2), (3, 1)]);
        assert_eq!(t.encode(), json!({ "1": 2, "3": 1 }));
        roundtrip(&t);
        let s = TSeries::from_slices(
            3,
            -5,
            [
                (Monomial::one(), PsiOp::exact([(0, Fourier::one()), (-1, Fourier::sin(1))])),
                (Monomial::var(2), PsiOp::truncated([(2, Fourier::cos(1))], -5)),
            ],
        );
        roundtrip(&s);
        let back = TSeries::<Fourier>::decode(&s.encode()).unwrap();
        assert_eq!(back.floor(), -5);
        assert!(back.barred_flag());
    }
}
