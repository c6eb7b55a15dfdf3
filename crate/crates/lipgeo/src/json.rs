//! JSON encodings of every exchange format, with canonical serialization:
//! emitted documents re-parse to identical values byte for byte.
//!
//! Rationals travel as strings `"p"` / `"p/q"` (or `"inf"` for the extended
//! exponent); piecewise-linear breakpoint tables additionally accept plain
//! integers for convenience and emit them as numbers.

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::complexes::HolderComplex;
use crate::exponents::exponent::{format_rational, parse_rational};
use crate::exponents::{Arc, ArcFamily, ExtendedExponent, FunctionExpr, Parameterization, PuiseuxSeries};
use crate::metriclab::{
    GermModel, Gluing, PancakeDecomposition, PancakeGroup, Patch, PatchTerm, PiecewiseLinear, Side,
};
use crate::pizza::{AbstractPizza, PizzaSlice, WidthFunction};
use crate::Error;

fn err(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, Error> {
    v.as_str().ok_or_else(|| err(format!("{what}: expected a string")))
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| err(format!("{what}: expected an object")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| err(format!("{what}: expected an array")))
}

fn field<'a>(m: &'a Map<String, Value>, k: &str, what: &str) -> Result<&'a Value, Error> {
    m.get(k).ok_or_else(|| err(format!("{what}: missing field {k:?}")))
}

// ---- rationals and exponents ----

pub fn rational_to_json(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value, what: &str) -> Result<BigRational, Error> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| err(format!("{what}: non-integer number")))?;
            Ok(BigRational::from_integer(i.into()))
        }
        _ => Err(err(format!("{what}: expected a rational"))),
    }
}

pub fn exponent_to_json(e: &ExtendedExponent) -> Value {
    Value::String(e.to_string())
}

pub fn exponent_from_json(v: &Value, what: &str) -> Result<ExtendedExponent, Error> {
    let s = as_str(v, what)?;
    s.parse()
}

// ---- series and arcs ----

pub fn series_to_json(s: &PuiseuxSeries) -> Value {
    Value::Array(
        s.terms()
            .iter()
            .map(|(e, c)| json!({"exp": format_rational(e), "c": format_rational(c)}))
            .collect(),
    )
}

pub fn series_from_json(v: &Value) -> Result<PuiseuxSeries, Error> {
    let arr = as_arr(v, "series")?;
    let mut terms = Vec::with_capacity(arr.len());
    for t in arr {
        let m = as_obj(t, "series term")?;
        let e = rational_from_json(field(m, "exp", "series term")?, "series exp")?;
        let c = rational_from_json(field(m, "c", "series term")?, "series coeff")?;
        terms.push((e, c));
    }
    Ok(PuiseuxSeries::from_terms(terms))
}

pub fn arc_to_json(a: &Arc) -> Value {
    json!({
        "param": match a.param() {
            Parameterization::Distance => "distance",
            Parameterization::Coordinate => "coordinate",
        },
        "coords": a.coords().iter().map(series_to_json).collect::<Vec<_>>(),
    })
}

pub fn arc_from_json(v: &Value) -> Result<Arc, Error> {
    let m = as_obj(v, "arc")?;
    let param = match as_str(field(m, "param", "arc")?, "arc param")? {
        "distance" => Parameterization::Distance,
        "coordinate" => Parameterization::Coordinate,
        other => return Err(err(format!("arc param: unknown value {other:?}"))),
    };
    let coords = as_arr(field(m, "coords", "arc")?, "arc coords")?
        .iter()
        .map(series_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Arc::new(param, coords)
}

pub fn arc_family_to_json(f: &ArcFamily) -> Value {
    json!({"arcs": f.arcs().iter().map(arc_to_json).collect::<Vec<_>>()})
}

pub fn arc_family_from_json(v: &Value) -> Result<ArcFamily, Error> {
    let m = as_obj(v, "arc family")?;
    let arcs = as_arr(field(m, "arcs", "arc family")?, "arcs")?
        .iter()
        .map(arc_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    ArcFamily::new(arcs)
}

// ---- expressions ----

pub fn expr_to_json(e: &FunctionExpr) -> Value {
    match e {
        FunctionExpr::Monomial { coeff, pu, pw } => json!({
            "op": "mono",
            "c": format_rational(coeff),
            "pu": format_rational(pu),
            "pw": format_rational(pw),
        }),
        FunctionExpr::Abs(a) => json!({"op": "abs", "arg": expr_to_json(a)}),
        FunctionExpr::Add(a, b) => json!({"op": "add", "args": [expr_to_json(a), expr_to_json(b)]}),
        FunctionExpr::Sub(a, b) => json!({"op": "sub", "args": [expr_to_json(a), expr_to_json(b)]}),
        FunctionExpr::Mul(a, b) => json!({"op": "mul", "args": [expr_to_json(a), expr_to_json(b)]}),
        FunctionExpr::Min(a, b) => json!({"op": "min", "args": [expr_to_json(a), expr_to_json(b)]}),
        FunctionExpr::Max(a, b) => json!({"op": "max", "args": [expr_to_json(a), expr_to_json(b)]}),
    }
}

pub fn expr_from_json(v: &Value) -> Result<FunctionExpr, Error> {
    let m = as_obj(v, "expression")?;
    let op = as_str(field(m, "op", "expression")?, "expression op")?;
    let binary = |kind: fn(Box<FunctionExpr>, Box<FunctionExpr>) -> FunctionExpr| -> Result<FunctionExpr, Error> {
        let args = as_arr(field(m, "args", "expression")?, "expression args")?;
        if args.len() != 2 {
            return Err(err("expression args: expected exactly two"));
        }
        Ok(kind(
            Box::new(expr_from_json(&args[0])?),
            Box::new(expr_from_json(&args[1])?),
        ))
    };
    let e = match op {
        "mono" => FunctionExpr::Monomial {
            coeff: rational_from_json(field(m, "c", "monomial")?, "monomial c")?,
            pu: rational_from_json(field(m, "pu", "monomial")?, "monomial pu")?,
            pw: rational_from_json(field(m, "pw", "monomial")?, "monomial pw")?,
        },
        "abs" => FunctionExpr::Abs(Box::new(expr_from_json(field(m, "arg", "abs")?)?)),
        "add" => binary(FunctionExpr::Add)?,
        "sub" => binary(FunctionExpr::Sub)?,
        "mul" => binary(FunctionExpr::Mul)?,
        "min" => binary(FunctionExpr::Min)?,
        "max" => binary(FunctionExpr::Max)?,
        other => return Err(err(format!("expression op: unknown {other:?}"))),
    };
    e.validate()?;
    Ok(e)
}

// ---- complexes ----

pub fn complex_to_json(c: &HolderComplex) -> Value {
    json!({
        "vertices": c.vertices(),
        "edges": c.edges().iter().map(|e| json!({
            "id": e.id,
            "ends": [e.ends.0, e.ends.1],
            "beta": format_rational(&e.beta),
        })).collect::<Vec<_>>(),
    })
}

pub fn complex_from_json(v: &Value) -> Result<HolderComplex, Error> {
    let m = as_obj(v, "complex")?;
    let vertices = as_arr(field(m, "vertices", "complex")?, "vertices")?
        .iter()
        .map(|x| Ok(as_str(x, "vertex id")?.to_string()))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut edges = Vec::new();
    for e in as_arr(field(m, "edges", "complex")?, "edges")? {
        let em = as_obj(e, "edge")?;
        let id = as_str(field(em, "id", "edge")?, "edge id")?.to_string();
        let ends = as_arr(field(em, "ends", "edge")?, "edge ends")?;
        if ends.len() != 2 {
            return Err(err("edge ends: expected two vertex ids"));
        }
        let beta = rational_from_json(field(em, "beta", "edge")?, "edge beta")?;
        edges.push((
            id,
            as_str(&ends[0], "edge end")?.to_string(),
            as_str(&ends[1], "edge end")?.to_string(),
            beta,
        ));
    }
    HolderComplex::new(vertices, edges)
}

// ---- pizzas ----

pub fn pizza_to_json(p: &AbstractPizza) -> Value {
    json!({
        "triangle_beta": format_rational(&p.triangle_beta),
        "slices": p.slices.iter().map(|s| json!({
            "q_in": s.q_in.to_string(),
            "q_out": s.q_out.to_string(),
            "beta": s.beta.to_string(),
            "mu": {"a": format_rational(&s.mu.a), "b": format_rational(&s.mu.b)},
        })).collect::<Vec<_>>(),
    })
}

pub fn pizza_from_json(v: &Value) -> Result<AbstractPizza, Error> {
    let m = as_obj(v, "pizza")?;
    let triangle_beta = rational_from_json(field(m, "triangle_beta", "pizza")?, "triangle_beta")?;
    let mut slices = Vec::new();
    for s in as_arr(field(m, "slices", "pizza")?, "slices")? {
        let sm = as_obj(s, "slice")?;
        let mu = as_obj(field(sm, "mu", "slice")?, "mu")?;
        slices.push(PizzaSlice {
            q_in: exponent_from_json(field(sm, "q_in", "slice")?, "q_in")?,
            q_out: exponent_from_json(field(sm, "q_out", "slice")?, "q_out")?,
            beta: exponent_from_json(field(sm, "beta", "slice")?, "beta")?,
            mu: WidthFunction {
                a: rational_from_json(field(mu, "a", "mu")?, "mu a")?,
                b: rational_from_json(field(mu, "b", "mu")?, "mu b")?,
            },
        });
    }
    Ok(AbstractPizza { triangle_beta, slices })
}

// ---- germ models ----

fn pl_entry_to_json(r: &BigRational) -> Value {
    if r.denom().is_one() {
        if let Ok(i) = i64::try_from(r.numer().clone()) {
            return json!(i);
        }
    }
    rational_to_json(r)
}

pub fn model_to_json(m: &GermModel) -> Value {
    json!({
        "dim": m.dim,
        "patches": m.patches.iter().map(|p| json!({
            "coords": p.coords.iter().map(|terms| terms.iter().map(|t| json!({
                "exp": format_rational(&t.exp),
                "pl": t.coeff.points().iter()
                    .map(|(s, v)| json!([pl_entry_to_json(s), pl_entry_to_json(v)]))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "gluings": m.gluings.iter().map(|g| json!({
            "a": {"patch": g.a.0, "side": g.a.1.index()},
            "b": {"patch": g.b.0, "side": g.b.1.index()},
        })).collect::<Vec<_>>(),
    })
}

fn side_from_json(v: &Value) -> Result<Side, Error> {
    match v.as_u64() {
        Some(0) => Ok(Side::S0),
        Some(1) => Ok(Side::S1),
        _ => Err(err("gluing side: expected 0 or 1")),
    }
}

pub fn model_from_json(v: &Value) -> Result<GermModel, Error> {
    let m = as_obj(v, "model")?;
    let dim = field(m, "dim", "model")?
        .as_u64()
        .ok_or_else(|| err("model dim: expected an integer"))? as usize;
    let mut patches = Vec::new();
    for p in as_arr(field(m, "patches", "model")?, "patches")? {
        let pm = as_obj(p, "patch")?;
        let mut coords = Vec::new();
        for coord in as_arr(field(pm, "coords", "patch")?, "patch coords")? {
            let mut terms = Vec::new();
            for t in as_arr(coord, "coordinate terms")? {
                let tm = as_obj(t, "term")?;
                let exp = rational_from_json(field(tm, "exp", "term")?, "term exp")?;
                let mut pts = Vec::new();
                for pair in as_arr(field(tm, "pl", "term")?, "term pl")? {
                    let pv = as_arr(pair, "pl entry")?;
                    if pv.len() != 2 {
                        return Err(err("pl entry: expected [s, value]"));
                    }
                    pts.push((
                        rational_from_json(&pv[0], "pl s")?,
                        rational_from_json(&pv[1], "pl value")?,
                    ));
                }
                terms.push(PatchTerm { exp, coeff: PiecewiseLinear::new(pts)? });
            }
            coords.push(terms);
        }
        patches.push(Patch { coords });
    }
    let mut gluings = Vec::new();
    for g in as_arr(field(m, "gluings", "model")?, "gluings")? {
        let gm = as_obj(g, "gluing")?;
        let end = |k: &str| -> Result<(usize, Side), Error> {
            let e = as_obj(field(gm, k, "gluing")?, "gluing end")?;
            let patch = field(e, "patch", "gluing end")?
                .as_u64()
                .ok_or_else(|| err("gluing patch: expected an integer"))? as usize;
            Ok((patch, side_from_json(field(e, "side", "gluing end")?)?))
        };
        gluings.push(Gluing { a: end("a")?, b: end("b")? });
    }
    GermModel::new(dim, patches, gluings)
}

// ---- pancake decompositions ----

pub fn decomposition_to_json(d: &PancakeDecomposition) -> Value {
    json!({
        "groups": d.groups.iter().map(|g| json!({
            "patches": g.patches,
            "beta": format_rational(&g.beta),
        })).collect::<Vec<_>>(),
    })
}

pub fn decomposition_from_json(v: &Value) -> Result<PancakeDecomposition, Error> {
    let m = as_obj(v, "decomposition")?;
    let mut groups = Vec::new();
    for g in as_arr(field(m, "groups", "decomposition")?, "groups")? {
        let gm = as_obj(g, "group")?;
        let patches = as_arr(field(gm, "patches", "group")?, "group patches")?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|i| i as usize)
                    .ok_or_else(|| err("group patch: expected an integer"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let beta = rational_from_json(field(gm, "beta", "group")?, "group beta")?;
        groups.push(PancakeGroup { patches, beta });
    }
    Ok(PancakeDecomposition { groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::exponent::{rat, rat_int};
    use crate::exponents::series::Series;
    use crate::metriclab;

    #[test]
    fn exponent_and_series_roundtrip() {
        for s in ["3/2", "inf", "7"] {
            let e: ExtendedExponent = s.parse().unwrap();
            let v = exponent_to_json(&e);
            assert_eq!(exponent_from_json(&v, "x").unwrap(), e);
        }
        let ser = Series::from_terms(vec![(rat(3, 2), rat_int(5)), (rat_int(2), rat(-1, 3))]);
        let v = series_to_json(&ser);
        assert_eq!(series_from_json(&v).unwrap(), ser);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[{"c":"5","exp":"3/2"},{"c":"-1/3","exp":"2"}]"#
        );
    }

    #[test]
    fn arc_roundtrip_and_validation() {
        let a = Arc::triangle_arc(Series::monomial(rat_int(2), rat_int(1)));
        let v = arc_to_json(&a);
        assert_eq!(arc_from_json(&v).unwrap(), a);
        // invalid arcs are rejected at parse time
        let bad = serde_json::json!({"param": "distance", "coords": [[], []]});
        assert!(arc_from_json(&bad).is_err());
    }

    #[test]
    fn expr_roundtrip() {
        let f = FunctionExpr::Abs(Box::new(FunctionExpr::Sub(
            Box::new(FunctionExpr::mono(rat_int(1), rat_int(0), rat_int(1))),
            Box::new(FunctionExpr::mono(rat_int(1), rat_int(2), rat_int(0))),
        )));
        let v = expr_to_json(&f);
        assert_eq!(expr_from_json(&v).unwrap(), f);
        let neg = serde_json::json!({"op":"mono","c":"1","pu":"-1","pw":"0"});
        assert!(expr_from_json(&neg).is_err());
    }

    #[test]
    fn complex_roundtrip() {
        let c = HolderComplex::new(
            vec!["a".into(), "b".into()],
            vec![
                ("g1".into(), "a".into(), "b".into(), rat(3, 2)),
                ("g2".into(), "a".into(), "b".into(), rat_int(2)),
            ],
        )
        .unwrap();
        let v = complex_to_json(&c);
        assert_eq!(complex_from_json(&v).unwrap(), c);
    }

    #[test]
    fn pizza_roundtrip_matches_spec_shape() {
        let p = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![PizzaSlice {
                q_in: ExtendedExponent::from_int(2),
                q_out: ExtendedExponent::Infinity,
                beta: ExtendedExponent::from_int(2),
                mu: WidthFunction { a: rat_int(1), b: rat_int(0) },
            }],
        };
        let v = pizza_to_json(&p);
        assert_eq!(pizza_from_json(&v).unwrap(), p);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains(r#""q_out":"inf""#));
        assert!(s.contains(r#""triangle_beta":"1""#));
    }

    #[test]
    fn model_roundtrip_byte_identical() {
        let m = metriclab::horn_model(&rat(3, 2), 6);
        let v = model_to_json(&m);
        let m2 = model_from_json(&v).unwrap();
        assert_eq!(m, m2);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&model_to_json(&m2)).unwrap()
        );
        let d = metriclab::split_horn_decomposition(&rat(3, 2), 6);
        let dv = decomposition_to_json(&d);
        assert_eq!(decomposition_from_json(&dv).unwrap(), d);
    }
}
